use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ReconConfig;
use crate::error::{Error, Result};
use crate::grid_field::{
    dirichlet_energy, energy, make_phantom, random_bumps, LaplaceSystem, NodeClass, PhantomKind, ScalarField,
    WaveState,
};
use crate::medium::Medium;
use crate::wave::{forward, forward_run, solve_backward, BoundaryTrace, ForwardOptions};

/// Result of the time-reversal pseudo-inverse together with the harmonic
/// Cauchy data it used at `t = T`.
pub struct TimeReversal {
    pub state: WaveState,
    pub phi: ScalarField,
}

/// Forward map, pseudo-inverse and error operator for one configuration.
///
/// The Laplace systems of omega and K are built once and reused across
/// series terms.
pub struct Reconstructor {
    medium: Medium,
    cfg: ReconConfig,
    omega_sys: LaplaceSystem,
    k_sys: LaplaceSystem,
}

impl Reconstructor {
    pub fn new(medium: Medium, cfg: ReconConfig) -> Result<Self> {
        cfg.validate(&medium)?;
        let omega_sys = LaplaceSystem::new(&cfg.omega);
        let k_sys = LaplaceSystem::new(&cfg.kset);
        Ok(Reconstructor {
            medium,
            cfg,
            omega_sys,
            k_sys,
        })
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn config(&self) -> &ReconConfig {
        &self.cfg
    }

    /// `Λ₁ f₁`: boundary trace of the solution with data `[f₁, 0]`.
    pub fn measure(&self, f1: &ScalarField) -> Result<BoundaryTrace> {
        let w = WaveState::displacement(f1.clone());
        forward(&w, &self.medium, &self.cfg.omega, &self.cfg.solver)
    }

    /// Backward solve from the harmonic extension of the final trace
    /// snapshot with zero velocity.
    pub fn time_reverse_detailed(&self, h: &BoundaryTrace) -> Result<TimeReversal> {
        h.ensure_on(&self.cfg.omega)?;
        let last = h.n_times() - 1;
        let phi = self.omega_sys.solve(h.row(last), self.cfg.harmonic_tol)?;
        let cauchy = WaveState::displacement(phi.clone());
        let state = solve_backward(h, &cauchy, &self.medium, &self.cfg.omega, &self.cfg.solver)?;
        Ok(TimeReversal { state, phi })
    }

    /// `[A₁h, A₂h]`.
    pub fn time_reverse(&self, h: &BoundaryTrace) -> Result<WaveState> {
        Ok(self.time_reverse_detailed(h)?.state)
    }

    /// `Π_K` of a field: restriction to K minus the harmonic extension of its
    /// trace on the boundary of K.
    pub fn project_k(&self, s: &ScalarField) -> Result<ScalarField> {
        self.k_sys.project(s, self.cfg.harmonic_tol)
    }

    /// `Π_K A₁ h`.
    pub fn pseudo_inverse_step(&self, h: &BoundaryTrace) -> Result<ScalarField> {
        let a = self.time_reverse(h)?;
        self.project_k(&a.u)
    }

    fn ensure_in_k(&self, f1: &ScalarField) -> Result<()> {
        f1.ensure_same_grid(self.medium.grid())?;
        let k = &self.cfg.kset;
        if f1
            .data()
            .iter()
            .enumerate()
            .any(|(n, &v)| v != 0.0 && k.class_of(n) != NodeClass::Interior)
        {
            return Err(Error::config("field is not supported in the interior of K"));
        }
        Ok(())
    }

    /// `K f₁ = f₁ − Π_K A₁ Λ₁ f₁`.
    pub fn apply_error_operator(&self, f1: &ScalarField) -> Result<ScalarField> {
        self.ensure_in_k(f1)?;
        let step = self.pseudo_inverse_step(&self.measure(f1)?)?;
        f1.sub(&step)
    }

    /// `E_Ω(u(T)) / E_Ω([f₁, 0])`.
    pub fn energy_decay_ratio(&self, f1: &ScalarField) -> Result<f64> {
        self.ensure_in_k(f1)?;
        let w0 = WaveState::displacement(f1.clone());
        let e0 = energy(&w0, &self.cfg.omega, &self.medium)?;
        if e0 == 0.0 {
            return Err(Error::Degenerate("initial energy is zero".into()));
        }
        let opts = ForwardOptions {
            record_trace: false,
            ..Default::default()
        };
        let run = forward_run(&w0, &self.medium, &self.cfg.omega, &self.cfg.solver, &opts)?;
        let e_t = energy(run.final_state.as_ref().expect("final state kept"), &self.cfg.omega, &self.medium)?;
        Ok(e_t / e0)
    }

    pub fn hd_norm_k(&self, s: &ScalarField) -> Result<f64> {
        Ok(dirichlet_energy(s, &self.cfg.kset)?.sqrt())
    }

    /// Smooth random field in K with zero trace: six random bumps with
    /// random signs, as wide as K allows up to eight cells.
    pub fn random_k_field(&self, seed: u64) -> Result<ScalarField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = *self.medium.grid();
        let mut sigma = 8.0 * g.h;
        let bumps = loop {
            match random_bumps(&self.cfg.kset, 6, sigma, &mut rng) {
                Ok(b) => break b,
                Err(e) if sigma < 2.0 * g.h => return Err(e),
                Err(_) => sigma *= 0.7,
            }
        };
        let mut out = ScalarField::zeros(g);
        for b in bumps {
            let sign = if rand::Rng::gen_bool(&mut rng, 0.5) { 1.0 } else { -1.0 };
            let f = make_phantom(&PhantomKind::GaussianBump(b), g, &self.cfg.kset)?;
            out = out.lin_comb(1.0, &f, sign)?;
        }
        Ok(out)
    }

    /// Power iteration on K in the H_D(K) norm from a seeded smooth random
    /// field. Returns the ratio `‖K f‖ / ‖f‖` of every iteration; the last
    /// entry is the estimate.
    pub fn estimate_contraction(&self, n_power_iters: usize, seed: u64) -> Result<Vec<f64>> {
        if n_power_iters < 5 {
            return Err(Error::config("power iteration needs at least 5 iterations"));
        }
        let mut f = self.random_k_field(seed)?;
        let mut ratios = Vec::with_capacity(n_power_iters);
        for _ in 0..n_power_iters {
            let nf = self.hd_norm_k(&f)?;
            if !(nf > 0.0) {
                return Err(Error::Degenerate("power iterate has zero H_D norm".into()));
            }
            f = f.scaled(1.0 / nf);
            let kf = self.apply_error_operator(&f)?;
            let nk = self.hd_norm_k(&kf)?;
            ratios.push(nk);
            f = kf;
        }
        Ok(ratios)
    }
}
