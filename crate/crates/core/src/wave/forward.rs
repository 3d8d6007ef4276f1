use super::config::SolverConfig;
use super::stepper::Propagator;
use super::trace::BoundaryTrace;
use crate::error::{Error, Result};
use crate::grid_field::{NodeClass, Region, WaveState};
use crate::medium::Medium;

/// Steps between full-field finiteness checks.
const CHECK_EVERY: usize = 64;

/// Optional extras for a forward run.
pub struct ForwardOptions<'a> {
    /// Grid nodes sampled every `probe_stride` steps.
    pub probes: &'a [usize],
    pub probe_stride: usize,
    /// Record `u` on the boundary of omega at every step.
    pub record_trace: bool,
    /// Keep `[u, u_t]` at the final time.
    pub keep_final: bool,
    /// Called with the step index after every step.
    pub progress: Option<&'a dyn Fn(usize)>,
}

impl Default for ForwardOptions<'_> {
    fn default() -> Self {
        ForwardOptions {
            probes: &[],
            probe_stride: 1,
            record_trace: true,
            keep_final: true,
            progress: None,
        }
    }
}

pub struct ForwardRun {
    /// Empty (zero rows) when the trace was not recorded.
    pub trace: Option<BoundaryTrace>,
    /// Time-major probe samples, one row per sampled level.
    pub probes: Vec<f64>,
    pub final_state: Option<WaveState>,
}

pub(crate) fn check_support(f: &WaveState, omega: &Region) -> Result<()> {
    for (name, s) in [("u", &f.u), ("u_t", &f.ut)] {
        let bad = s
            .data()
            .iter()
            .enumerate()
            .find(|(k, v)| **v != 0.0 && omega.class_of(*k) != NodeClass::Interior);
        if let Some((k, _)) = bad {
            let (x, y) = omega.grid().coord_of(k);
            return Err(Error::config(format!(
                "initial {name} is nonzero at ({x}, {y}), outside the interior of omega"
            )));
        }
    }
    Ok(())
}

/// Measurement operator: `u` on the boundary of `omega` for every time level
/// of `cfg`, starting from the Cauchy data `f`.
pub fn forward(f: &WaveState, m: &Medium, omega: &Region, cfg: &SolverConfig) -> Result<BoundaryTrace> {
    let opts = ForwardOptions {
        keep_final: false,
        ..Default::default()
    };
    Ok(forward_run(f, m, omega, cfg, &opts)?.trace.expect("trace recorded"))
}

pub fn forward_run(
    f: &WaveState,
    m: &Medium,
    omega: &Region,
    cfg: &SolverConfig,
    opts: &ForwardOptions,
) -> Result<ForwardRun> {
    cfg.validate(m, omega)?;
    f.u.ensure_same_grid(m.grid())?;
    f.ut.ensure_same_grid(m.grid())?;
    check_support(f, omega)?;
    let stride = opts.probe_stride.max(1);
    let det = omega.boundary();
    let n_det = det.len();

    let mut prop = Propagator::for_medium(m, cfg.dt, cfg.sponge);
    prop.seed(f.u.data(), f.ut.data());

    let mut values = Vec::with_capacity(if opts.record_trace { n_det * cfg.n_times() } else { 0 });
    let mut probes = Vec::with_capacity(opts.probes.len() * (cfg.n_steps / stride + 1));
    let mut record = |prop: &Propagator, n: usize| -> Result<()> {
        let u = prop.current();
        if opts.record_trace {
            let start = values.len();
            values.extend(det.iter().map(|&k| u[k]));
            if values[start..].iter().any(|v| !v.is_finite()) {
                return Err(Error::Instability { step: n });
            }
        }
        if n % stride == 0 {
            probes.extend(opts.probes.iter().map(|&k| u[k]));
        }
        if (n % CHECK_EVERY == 0 || n == cfg.n_steps) && !prop.is_finite() {
            return Err(Error::Instability { step: n });
        }
        Ok(())
    };

    record(&prop, 0)?;
    for n in 1..=cfg.n_steps {
        prop.step();
        record(&prop, n)?;
        if let Some(cb) = opts.progress {
            cb(n);
        }
    }

    let trace = if opts.record_trace {
        let g = omega.grid();
        let points = det.iter().map(|&k| g.coord_of(k)).collect();
        Some(BoundaryTrace::new(cfg.dt, points, det.to_vec(), values)?)
    } else {
        None
    };
    Ok(ForwardRun {
        trace,
        probes,
        final_state: opts.keep_final.then(|| prop.state()),
    })
}
