//! One function per subcommand; [`run`] wraps them with validation, the
//! manifest and output bookkeeping.

use std::path::{Path, PathBuf};

use log::{info, warn};
use serde_json::{json, Value};
use wigner_lab::bh_kernel::kernel_sweep;
use wigner_lab::ensemble::{sample_deformed, sample_wigner, validate_law};
use wigner_lab::fredholm::{fredholm_table, gap_integral, sine_kernel};
use wigner_lab::montecarlo::Harness;
use wigner_lab::ou_flow::{
    flow_bounds, grid, reversal_approximant, reversal_error_chi2, semigroup, HermiteDensity,
};
use wigner_lab::spectra::{hermitian_eigenvalues, SpectralSample};
use wigner_lab::statistics::{
    cdf_sup_distance, gap_statistic_pooled, in_good_set, pair_correlation_estimate,
    poisson_control, GoodSetParams,
};

use crate::compare::compare;
use crate::config::{Command, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::manifest::{ManifestWriter, RunManifest, Status};
use crate::table::Table;

pub const VERSION: &str = concat!("wigner-lab ", env!("CARGO_PKG_VERSION"));

/// Files written by a command, plus the reason its check failed, if any.
#[derive(Default)]
struct Outcome {
    files: Vec<PathBuf>,
    failure: Option<String>,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    hash: String,
    harness: Harness,
    dir: &'a Path,
}

impl Ctx<'_> {
    fn metadata(&self, extra: &[String]) -> Vec<String> {
        let mut m = vec![
            VERSION.to_string(),
            format!("command={}", self.cfg.command.name()),
            format!("config_hash={}", self.hash),
            format!("seed={}", self.cfg.seed),
        ];
        m.extend_from_slice(extra);
        m
    }

    fn write(&self, name: &str, text: &str, out: &mut Outcome) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        info!("wrote {}", path.display());
        out.files.push(path);
        Ok(())
    }

    fn write_table(&self, mut t: Table, extra: &[String], out: &mut Outcome) -> Result<()> {
        t.metadata = self.metadata(extra);
        self.write(&format!("{}.csv", self.cfg.command.stem()), &t.to_csv(), out)
    }

    fn write_json(&self, mut v: Value, out: &mut Outcome) -> Result<()> {
        v["config_hash"] = json!(self.hash);
        v["command"] = json!(self.cfg.command.name());
        let text = serde_json::to_string_pretty(&v).map_err(|e| CliError::config(e.to_string()))?;
        self.write(&format!("{}.json", self.cfg.command.stem()), &(text + "\n"), out)
    }

    fn spectra(&self) -> Result<Vec<SpectralSample>> {
        let e = &self.cfg.ensemble;
        let (off, diag) = e.laws()?;
        off.prepare_sampler()?;
        diag.prepare_sampler()?;
        Ok(self.harness.run(e.samples, |_, seed| {
            let h = sample_wigner(e.n, &off, &diag, e.convention, seed)?;
            let h = sample_deformed(&h, e.deformation, seed)?;
            hermitian_eigenvalues(&h)
        })?)
    }
}

/// Number of Monte Carlo replicas the command uses.
fn replicas(cfg: &ExperimentConfig) -> usize {
    match cfg.command {
        Command::SampleSpectrum | Command::ScCheck | Command::Gaps | Command::Paircorr => {
            cfg.ensemble.samples
        }
        _ => 0,
    }
}

/// Validates `cfg`, runs the command and writes its outputs and manifest
/// into the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let hash = cfg.hash()?;
    let harness = Harness::new(cfg.seed, cfg.workers);
    let mut writer = ManifestWriter::start(
        dir,
        RunManifest {
            command: cfg.command.name().to_string(),
            config_hash: hash.clone(),
            version: VERSION.to_string(),
            started_unix: ManifestWriter::now_unix(),
            wall_time: None,
            status: Status::Running,
            error: None,
            master_seed: cfg.seed,
            workers: cfg.workers,
            replica_seeds: harness.seeds(replicas(cfg)),
            outputs: Vec::new(),
        },
    )?;
    let ctx = Ctx {
        cfg,
        hash,
        harness,
        dir,
    };
    let mut out = Outcome::default();
    let result = dispatch(&ctx, &mut out);
    writer.manifest.outputs = out.files.clone();
    let error = match (&result, &out.failure) {
        (Err(e), _) => Some(e.to_string()),
        (Ok(()), Some(f)) => Some(f.clone()),
        _ => None,
    };
    let manifest = writer.finish(error.clone().map_or(Ok(()), Err))?;
    result?;
    match out.failure {
        Some(f) => Err(CliError::Check(f)),
        None => Ok(manifest),
    }
}

fn dispatch(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    match ctx.cfg.command {
        Command::ValidateLaw => validate(ctx, out),
        Command::SampleSpectrum => sample_spectrum(ctx, out),
        Command::ScCheck => sc_check(ctx, out),
        Command::Flow => flow(ctx, out),
        Command::Reverse => reverse(ctx, out),
        Command::Kernel => kernel(ctx, out),
        Command::Fredholm => fredholm(ctx, out),
        Command::Gaps => gaps(ctx, out),
        Command::Paircorr => paircorr(ctx, out),
        Command::Compare => compare_tables(ctx, out),
    }
}

fn validate(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let (law, _) = ctx.cfg.ensemble.laws()?;
    let report = validate_law(&law)?;
    let passed = report.passed();
    ctx.write_json(
        json!({ "law": ctx.cfg.ensemble.law, "report": report, "passed": passed }),
        out,
    )?;
    if !passed {
        out.failure = Some("law failed validation".into());
    }
    Ok(())
}

fn sample_spectrum(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let spectra = ctx.spectra()?;
    let mut t = Table::new(&["sample", "index", "eigenvalue"]);
    for (k, s) in spectra.iter().enumerate() {
        for (j, &x) in s.eigenvalues.iter().enumerate() {
            t.push(vec![k as f64, j as f64, x]);
        }
    }
    let e = &ctx.cfg.ensemble;
    let extra = [
        format!("n={}", e.n),
        format!("convention={}", e.convention.name()),
        format!("deformation={}", e.deformation),
    ];
    ctx.write_table(t, &extra, out)
}

fn sc_check(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let st = &ctx.cfg.statistics;
    let sc = ctx.cfg.ensemble.semicircle();
    let spectra = ctx.spectra()?;
    let params = GoodSetParams {
        k: st.bound,
        ..GoodSetParams::new(st.eta, st.tolerance)
    };
    let mut t = Table::new(&["sample", "sup_cdf_distance", "good_set_worst", "good_set_pass"]);
    let mut passed = 0;
    for (k, s) in spectra.iter().enumerate() {
        let d = cdf_sup_distance(std::slice::from_ref(s), &sc)?;
        let g = in_good_set(s, &params)?;
        passed += g.pass as usize;
        t.push(vec![k as f64, d, g.worst, g.pass as u8 as f64]);
    }
    let pooled = cdf_sup_distance(&spectra, &sc)?;
    let extra = [format!("pooled_sup_cdf_distance={pooled}")];
    ctx.write_table(t, &extra, out)?;
    ctx.write_json(
        json!({
            "pooled_sup_cdf_distance": pooled,
            "good_set_pass_fraction": passed as f64 / spectra.len() as f64,
            "eta": st.eta,
            "tolerance": st.tolerance,
        }),
        out,
    )
}

fn density(ctx: &Ctx) -> Result<HermiteDensity> {
    let f = &ctx.cfg.flow;
    match &f.density_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Ok(HermiteDensity::from_text(&text)?)
        }
        None => Ok(HermiteDensity::from_coeffs(f.coeffs.clone())?),
    }
}

fn flow(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let f = &ctx.cfg.flow;
    let v = density(ctx)?;
    let vt = semigroup(&v, f.t)?;
    let back = reversal_approximant(&vt, f.t, f.order)?;
    let mut t = Table::new(&["x", "v", "v_t", "v_reversed"]);
    for x in grid() {
        t.push(vec![x, v.eval(x), vt.eval(x), back.eval(x)]);
    }
    let extra = [format!("t={}", f.t), format!("order={}", f.order)];
    ctx.write_table(t, &extra, out)?;
    let bounds = flow_bounds(&v).ok();
    let chi2 = if f.t > 0.0 { reversal_error_chi2(&v, f.t, f.order).ok() } else { Some(0.0) };
    ctx.write_json(
        json!({
            "t": f.t,
            "order": f.order,
            "mass": v.mass(),
            "is_probability": v.is_probability(),
            "bounds": bounds.map(|b| json!({ "a1": b.a1, "a2": b.a2, "a3": b.a3 })),
            "reversal_chi2": chi2,
            "reversed_is_probability": back.is_probability(),
        }),
        out,
    )
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn reverse(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let f = &ctx.cfg.flow;
    let v = density(ctx)?;
    let ts = f.t_grid();
    let chi: Vec<f64> = ts
        .iter()
        .map(|&t| reversal_error_chi2(&v, t, f.order))
        .collect::<wigner_lab::Result<_>>()?;
    let mut t = Table::new(&["t", "chi2"]);
    for (a, b) in ts.iter().zip(&chi) {
        t.push(vec![*a, *b]);
    }
    let slope = if ts.len() >= 2 { Some(loglog_slope(&ts, &chi)) } else { None };
    let extra = [format!("order={}", f.order)];
    ctx.write_table(t, &extra, out)?;
    ctx.write_json(
        json!({ "order": f.order, "slope": slope, "expected_slope": 2 * f.order }),
        out,
    )
}

fn kernel(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let cfg = ctx.cfg.kernel_config()?;
    let rows = kernel_sweep(&cfg, &ctx.cfg.kernel.taus)?;
    let mut t = Table::new(&["tau", "kernel", "saddle_approx", "sinc", "abs_error"]);
    for r in &rows {
        t.push(vec![r.tau, r.kernel, r.saddle, r.sinc, r.abs_error]);
    }
    let max_error = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let extra = [
        format!("n={}", cfg.n()),
        format!("t={}", cfg.t),
        format!("u={}", cfg.u),
    ];
    ctx.write_table(t, &extra, out)?;
    ctx.write_json(
        json!({ "n": cfg.n(), "t": cfg.t, "u": cfg.u, "max_abs_error": max_error }),
        out,
    )
}

fn fredholm(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let f = &ctx.cfg.fredholm;
    let rows = fredholm_table(f.alpha_max, f.step)?;
    let mut t = Table::new(&["alpha", "det", "p", "int_p"]);
    for r in &rows {
        t.push(vec![r.alpha, r.det, r.p, r.int_p]);
    }
    ctx.write_table(t, &[], out)
}

fn gaps(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let st = &ctx.cfg.statistics;
    let spectra = ctx.spectra()?;
    let mut t = Table::new(&["s", "lambda_hat", "stderr", "samples", "reference", "abs_error"]);
    for &s in &st.s {
        let g = gap_statistic_pooled(&spectra, st.u, s, st.delta)?;
        if g.low_count {
            warn!("gap window at u = {} holds few eigenvalues ({})", st.u, g.window_count);
        }
        let reference = gap_integral(s)?;
        t.push(vec![s, g.value, g.stderr, g.count as f64, reference, (g.value - reference).abs()]);
    }
    let extra = [
        format!("n={}", ctx.cfg.ensemble.n),
        format!("u={}", st.u),
        format!("delta={}", st.delta),
    ];
    ctx.write_table(t, &extra, out)
}

fn paircorr(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let st = &ctx.cfg.statistics;
    let e = &ctx.cfg.ensemble;
    let samples = if st.poisson {
        let sc = e.semicircle();
        ctx.harness.run(e.samples, |_, seed| poisson_control(e.n, &sc, seed))?
    } else {
        ctx.spectra()?
    };
    let est = pair_correlation_estimate(&samples, st.u, st.half_width, st.tau_max, st.bins)?;
    let mut t = Table::new(&["tau_lo", "tau_hi", "density", "stderr", "reference"]);
    for k in 0..est.density.len() {
        let (lo, hi) = (est.edges[k], est.edges[k + 1]);
        let mid = 0.5 * (lo + hi);
        let reference = if st.poisson { 1.0 } else { 1.0 - sine_kernel(mid).powi(2) };
        t.push(vec![lo, hi, est.density[k], est.stderr[k], reference]);
    }
    let extra = [
        format!("n={}", e.n),
        format!("u={}", st.u),
        format!("half_width={}", st.half_width),
        format!("poisson={}", st.poisson),
        format!("total_pairs={}", est.total_pairs),
    ];
    ctx.write_table(t, &extra, out)?;
    if est.empty {
        out.failure = Some("no pairs in the window".into());
    }
    Ok(())
}

fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Table::parse(&text)
}

fn compare_tables(ctx: &Ctx, out: &mut Outcome) -> Result<()> {
    let c = &ctx.cfg.compare;
    let (Some(tp), Some(rp)) = (&c.table, &c.reference) else {
        return Err(CliError::config("compare needs a table and a reference"));
    };
    let report = compare(
        &read_table(tp)?,
        &read_table(rp)?,
        c.column.as_deref(),
        c.reference_column.as_deref(),
        c.tolerance,
    )?;
    let value = serde_json::to_value(&report).map_err(|e| CliError::config(e.to_string()))?;
    ctx.write_json(value, out)?;
    if !report.pass {
        out.failure = Some(format!(
            "sup deviation {} exceeds tolerance {}",
            report.sup_deviation, report.tolerance
        ));
    }
    Ok(())
}
