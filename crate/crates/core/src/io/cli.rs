//! Command-line driver. Every subcommand reads a run configuration and
//! writes its artifacts into the output directory.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::atomic::write_atomic;
use super::binary::{read_trace, write_grid, write_trace};
use super::config::RunConfig;
use super::pgm::emit_pgm;
use crate::error::{Error, Result};
use crate::grid_field::ScalarField;
use crate::par;
use crate::rays::{check_visibility, sample_points, trace_branches};
use crate::recon::{ReconReport, Setup};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "thermotomo", version, about = "Thermoacoustic tomography in media with sound-speed jumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate boundary data for the configured phantom.
    Forward(Common),
    /// Reconstruct the source from a recorded trace.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Trace to invert; defaults to `<out>/trace.taws`.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Trace ray branches and check the visibility of K.
    Raytrace(Common),
    /// Estimate the contraction factor of the error operator.
    Knorm(Common),
    /// Energy decay ratio of the phantom at time T.
    Energy(Common),
    /// Forward simulation followed by reconstruction against the truth.
    Roundtrip(Common),
}

/// Maps an error to the process exit status.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status. Diagnostics go to stderr, summaries to stdout.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    par::init_from_env();
    match dispatch(cli.command) {
        Ok(summary) => {
            print!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("thermotomo: {e}");
            exit_code(&e)
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    setup: Setup,
    out: PathBuf,
}

impl Ctx {
    fn load(c: &Common) -> Result<Self> {
        let cfg = RunConfig::load(&c.config)?;
        let setup = cfg.scenario.build()?;
        let out = c.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok(Ctx { cfg, setup, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Forward(c) => forward(&Ctx::load(&c)?),
        Command::Reconstruct { common, trace } => {
            let ctx = Ctx::load(&common)?;
            let path = trace.unwrap_or_else(|| ctx.path("trace.taws"));
            reconstruct(&ctx, &path)
        }
        Command::Raytrace(c) => raytrace(&Ctx::load(&c)?),
        Command::Knorm(c) => knorm(&Ctx::load(&c)?),
        Command::Energy(c) => energy(&Ctx::load(&c)?),
        Command::Roundtrip(c) => roundtrip(&Ctx::load(&c)?),
    }
}

/// PGM with the given range, or the field's own range; a constant field
/// renders as mid-grey.
fn image(field: &ScalarField, path: &Path, range: Option<(f64, f64)>) -> Result<()> {
    let range = range.or_else(|| {
        let (lo, hi) = field.min_max();
        (lo == hi).then_some((lo - 1.0, lo + 1.0))
    });
    emit_pgm(field, path, range)
}

fn truth_range(f: &ScalarField) -> Option<(f64, f64)> {
    let (lo, hi) = f.min_max();
    (lo < hi).then_some((lo, hi))
}

fn forward(ctx: &Ctx) -> Result<String> {
    let kind = ctx.cfg.phantom_kind(&ctx.setup)?;
    let f = ctx.setup.phantom(&kind)?;
    let trace = ctx.setup.simulate_trace(&kind, ctx.cfg.reference_refine)?;
    write_trace(&ctx.path("trace.taws"), &trace)?;
    write_grid(&ctx.path("phantom.tawg"), &f)?;
    image(&f, &ctx.path("phantom.pgm"), None)?;
    Ok(format!(
        "forward: {} time levels x {} detectors, max |h| = {:.6e}\n",
        trace.n_times(),
        trace.n_det(),
        trace.max_abs()
    ))
}

fn series(ctx: &Ctx, trace_path: Option<&Path>, truth: Option<&ScalarField>) -> Result<(ScalarField, ReconReport)> {
    let rec = ctx.setup.reconstructor()?;
    let h = match trace_path {
        Some(p) => read_trace(p)?.bind(&ctx.setup.cfg.omega)?,
        None => {
            let kind = ctx.cfg.phantom_kind(&ctx.setup)?;
            let h = ctx.setup.simulate_trace(&kind, ctx.cfg.reference_refine)?;
            write_trace(&ctx.path("trace.taws"), &h)?;
            h
        }
    };
    let range = truth.and_then(truth_range);
    let (f, report) = rec.neumann_series_with(&h, truth, |k, fk| image(fk, &ctx.path(&format!("term_{k:02}.pgm")), range))?;
    write_atomic(&ctx.path("report.csv"), report.to_csv().as_bytes())?;
    write_grid(&ctx.path("recon.tawg"), &f)?;
    image(&f, &ctx.path("recon.pgm"), range)?;
    Ok((f, report))
}

fn summarize(report: &ReconReport) -> String {
    let mut s = String::new();
    for t in &report.terms {
        let _ = write!(s, "term {:2}  update {:.6e}", t.index, t.update_norm);
        if let (Some(hd), Some(l2)) = (t.err_hd, t.err_l2) {
            let _ = write!(s, "  err_HD {hd:.6e}  err_L2 {l2:.6e}");
        }
        s.push('\n');
    }
    if let Some(mu) = report.mu_hat {
        let _ = writeln!(s, "mu_hat {mu:.6}");
    }
    let _ = writeln!(s, "converged {}", report.converged);
    if let Some(w) = &report.warning {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn reconstruct(ctx: &Ctx, trace_path: &Path) -> Result<String> {
    let (_, report) = series(ctx, Some(trace_path), None)?;
    Ok(summarize(&report))
}

fn roundtrip(ctx: &Ctx) -> Result<String> {
    let kind = ctx.cfg.phantom_kind(&ctx.setup)?;
    let truth = ctx.setup.phantom(&kind)?;
    write_grid(&ctx.path("phantom.tawg"), &truth)?;
    image(&truth, &ctx.path("phantom.pgm"), None)?;
    let (_, report) = series(ctx, None, Some(&truth))?;
    Ok(summarize(&report))
}

fn raytrace(ctx: &Ctx) -> Result<String> {
    let (m, cfg) = (&ctx.setup.medium, &ctx.setup.cfg);
    let report = check_visibility(&cfg.kset, m, &cfg.omega, cfg.t_final, ctx.cfg.sampling, ctx.cfg.caps)?;
    write_atomic(&ctx.path("visibility.csv"), report.to_csv().as_bytes())?;
    let origin = match ctx.cfg.ray_origin {
        Some(p) => p,
        None => *sample_points(&cfg.kset, 1)
            .first()
            .ok_or_else(|| Error::Degenerate("K has no sample points".into()))?,
    };
    let graph = trace_branches(origin, ctx.cfg.ray_direction.normalized(), m, &cfg.omega, cfg.t_final, ctx.cfg.caps)?;
    write_atomic(&ctx.path("branches.txt"), graph.to_text().as_bytes())?;
    let mut s = format!(
        "visible {}  uncovered {} of {}\n",
        report.visible,
        report.uncovered().len(),
        report.samples.len()
    );
    if let Some(frac) = report.min_transmitted_fraction {
        let _ = writeln!(s, "min transmitted fraction {frac:.6}");
    }
    let _ = writeln!(s, "branch graph: {} events, exit {}", graph.events.len(), graph.has_exit());
    Ok(s)
}

fn knorm(ctx: &Ctx) -> Result<String> {
    let rec = ctx.setup.reconstructor()?;
    let ratios = rec.estimate_contraction(ctx.cfg.knorm_iters, ctx.cfg.seed)?;
    let mut csv = String::from("iteration,ratio\n");
    for (i, r) in ratios.iter().enumerate() {
        let _ = writeln!(csv, "{},{r:.12e}", i + 1);
    }
    write_atomic(&ctx.path("knorm.csv"), csv.as_bytes())?;
    let mu = ratios.last().copied().unwrap_or(f64::NAN);
    Ok(format!("mu_hat {mu:.6}\n"))
}

fn energy(ctx: &Ctx) -> Result<String> {
    let rec = ctx.setup.reconstructor()?;
    let kind = ctx.cfg.phantom_kind(&ctx.setup)?;
    let f = ctx.setup.phantom(&kind)?;
    let ratio = rec.energy_decay_ratio(&f)?;
    Ok(format!("energy decay ratio {ratio:.6e}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["thermotomo", "bogus"]), EXIT_CONFIG);
        assert_eq!(run(["thermotomo", "forward", "--config", "x.cfg", "--nope"]), EXIT_CONFIG);
        assert_eq!(run(["thermotomo", "forward"]), EXIT_CONFIG);
    }

    #[test]
    fn missing_config_exits_2() {
        assert_eq!(run(["thermotomo", "energy", "--config", "/nonexistent/run.cfg"]), EXIT_CONFIG);
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::config("x")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Instability { step: 3 }), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::Tangency), EXIT_NUMERICAL);
    }
}
