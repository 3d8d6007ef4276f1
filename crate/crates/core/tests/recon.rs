//! Pseudo-inverse, error operator and Neumann-series reconstruction.

use thermotomo::grid_field::{Bump, PhantomKind};
use thermotomo::recon::{Reconstructor, Scenario};
use thermotomo::ScalarField;

fn example1(cells: usize, t_final: f64) -> Reconstructor {
    Scenario::example1(cells, 0.5, 0.5, 0.2, t_final)
        .build()
        .unwrap()
        .into_reconstructor()
        .unwrap()
}

fn bump(r: &Reconstructor, x: f64, y: f64, sigma: f64) -> ScalarField {
    let g = *r.medium().grid();
    thermotomo::grid_field::make_phantom(&PhantomKind::GaussianBump(Bump { x, y, sigma }), g, &r.config().kset)
        .unwrap()
}

fn rel_hd(r: &Reconstructor, a: &ScalarField, b: &ScalarField) -> f64 {
    r.hd_norm_k(&a.sub(b).unwrap()).unwrap() / r.hd_norm_k(b).unwrap()
}

#[test]
fn pseudo_inverse_is_linear() {
    let r = example1(64, 2.0);
    let f1 = bump(&r, 0.04, 0.0, 0.035);
    let f2 = bump(&r, -0.03, 0.04, 0.03);
    let h1 = r.measure(&f1).unwrap();
    let h2 = r.measure(&f2).unwrap();
    let (a, b) = (1.7, -0.6);
    let combo = h1.lin_comb(a, &h2, b).unwrap();
    let lhs = r.pseudo_inverse_step(&combo).unwrap();
    let rhs = r
        .pseudo_inverse_step(&h1)
        .unwrap()
        .lin_comb(a, &r.pseudo_inverse_step(&h2).unwrap(), b)
        .unwrap();
    assert!(rel_hd(&r, &lhs, &rhs) < 1e-8);
}

#[test]
fn zero_data_reconstructs_zero() {
    let r = example1(32, 1.0);
    let h = r.measure(&ScalarField::zeros(*r.medium().grid())).unwrap();
    let (f, report) = r.neumann_series(&h, None).unwrap();
    assert_eq!(f.max_abs(), 0.0);
    assert!(report.converged);
    assert_eq!(report.terms.len(), 1);
}

#[test]
fn error_operator_rejects_fields_outside_k() {
    let r = example1(32, 1.0);
    let mut f = ScalarField::zeros(*r.medium().grid());
    let k = r.config().omega.interior()[0];
    f.data_mut()[k] = 1.0;
    assert!(matches!(r.apply_error_operator(&f), Err(thermotomo::Error::Config(_))));
    assert!(matches!(r.energy_decay_ratio(&f), Err(thermotomo::Error::Config(_))));
}

#[test]
fn projection_leaves_zero_trace_and_is_idempotent() {
    let r = example1(64, 1.0);
    let g = *r.medium().grid();
    let s = ScalarField::from_fn(g, |x, y| 1.0 + x * y + 3.0 * x);
    let p = r.project_k(&s).unwrap();
    for &k in r.config().kset.boundary() {
        assert_eq!(p.data()[k], 0.0);
    }
    let pp = r.project_k(&p).unwrap();
    assert!(rel_hd(&r, &pp, &p) < 1e-8);
}

#[test]
fn series_on_exact_data_contracts() {
    // Data from the same discretisation: the error obeys e_k = K^k e_0
    // exactly, so it shrinks every term at a rate consistent with the
    // power-iteration estimate.
    let mut sc = Scenario::example1(64, 0.5, 0.5, 0.2, 4.0);
    sc.m_max = 6;
    sc.tol_rel = 0.0;
    let r = sc.build().unwrap().into_reconstructor().unwrap();
    let truth = bump(&r, 0.03, -0.02, 0.035);
    let h = r.measure(&truth).unwrap();
    let (f, report) = r.neumann_series(&h, Some(&truth)).unwrap();
    let errs = report.errors_hd();
    assert_eq!(errs.len(), 6);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(rel_hd(&r, &f, &truth) < errs[0]);
    let mu = *r.estimate_contraction(8, 3).unwrap().last().unwrap();
    assert!(mu < 1.0);
    let c = errs.iter().enumerate().skip(1).map(|(k, e)| e / mu.powi(k as i32)).fold(0.0, f64::max);
    for (k, e) in errs.iter().enumerate().skip(1) {
        assert!(*e <= 2.0 * c * mu.powi(k as i32));
    }
    assert!(report.warning.is_none());
    let csv = report.to_csv();
    assert!(csv.starts_with("term,update_norm,err_HD,err_L2\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn error_operator_is_bounded_by_residual_energy() {
    // ‖K f‖ ≤ sqrt(E(u(T)) / E(f)) ‖f‖, for random fields and for the
    // iterates of the power method alike.
    let r = example1(64, 4.0);
    for seed in 0..3 {
        let mut f = r.random_k_field(seed).unwrap();
        for _ in 0..3 {
            let nf = r.hd_norm_k(&f).unwrap();
            let kf = r.apply_error_operator(&f).unwrap();
            let ratio = r.hd_norm_k(&kf).unwrap() / nf;
            let decay = r.energy_decay_ratio(&f).unwrap();
            assert!(decay < 1.0);
            assert!(ratio <= decay.sqrt() + 0.1, "seed {seed}: {ratio} vs {decay}");
            f = kf;
        }
    }
}

#[test]
fn time_reversal_returns_harmonic_cauchy_data() {
    let r = example1(64, 2.0);
    let f = bump(&r, 0.0, 0.0, 0.05);
    let h = r.measure(&f).unwrap();
    let tr = r.time_reverse_detailed(&h).unwrap();
    let omega = &r.config().omega;
    let last = h.row(h.n_times() - 1);
    for (n, &k) in omega.boundary().iter().enumerate() {
        assert_eq!(tr.phi.data()[k], last[n]);
    }
    assert_eq!(tr.state.u.grid(), f.grid());
}
