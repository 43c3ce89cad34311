//! Command line: flags override the values of an optional `--config` file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use wigner_lab::ensemble::{Convention, LawSpec, PotentialName};

use crate::commands;
use crate::config::{parse_range, Command, EnsembleConfig, ExperimentConfig};
use crate::error::Result;

/// Exit code for command line usage errors.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "wigner-lab", version, about = "Random matrix experiments")]
pub struct Cli {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Check normalization, moments and regularity of an entry law.
    ValidateLaw(LawArgs),
    /// Sample matrices and write their eigenvalues.
    SampleSpectrum(EnsembleArgs),
    /// Semicircle CDF distance and good-set membership per sample.
    ScCheck(ScCheckArgs),
    /// Evolve a Hermite density under the OU semigroup and reverse it.
    Flow(FlowArgs),
    /// Chi-square error of the reversal approximant over a time grid.
    Reverse(ReverseArgs),
    /// Correlation kernel sweep against the sine kernel.
    Kernel(KernelArgs),
    /// Sine-kernel gap probability table.
    Fredholm(FredholmArgs),
    /// Gap statistic against the sine-kernel prediction.
    Gaps(GapsArgs),
    /// Rescaled pair-correlation histogram.
    Paircorr(PaircorrArgs),
    /// Compare a statistics table with a reference table.
    Compare(CompareArgs),
}

fn convention(s: &str) -> std::result::Result<Convention, String> {
    Convention::parse(s).map_err(|e| e.to_string())
}

fn potential(s: &str) -> std::result::Result<PotentialName, String> {
    match s {
        "gaussian" => Ok(PotentialName::Gaussian),
        "quartic" => Ok(PotentialName::Quartic),
        "bump" => Ok(PotentialName::Bump),
        "two-sided-exponential" | "two_sided_exponential" => Ok(PotentialName::TwoSidedExponential),
        _ => Err(format!("unknown potential `{s}`")),
    }
}

/// Values of a `start:stop:step` flag.
#[derive(Debug, Clone)]
pub struct Sweep(pub Vec<f64>);

fn sweep(s: &str) -> std::result::Result<Sweep, String> {
    parse_range(s).map(Sweep).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// gaussian, quartic, bump or two-sided-exponential.
    #[arg(long, value_parser = potential)]
    pub potential: Option<PotentialName>,
    #[arg(long)]
    pub coeff: Option<f64>,
    #[arg(long)]
    pub power: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub variance: Option<f64>,
}

impl LawArgs {
    fn apply(&self, e: &mut EnsembleConfig) {
        if let Some(p) = self.potential {
            e.law = Some(LawSpec {
                potential: p,
                coeff: None,
                power: None,
                rate: None,
                variance: None,
            });
        }
        let any = self.coeff.is_some()
            || self.power.is_some()
            || self.rate.is_some()
            || self.variance.is_some();
        if any {
            let law = e.law.get_or_insert(LawSpec {
                potential: PotentialName::Gaussian,
                coeff: None,
                power: None,
                rate: None,
                variance: None,
            });
            law.coeff = self.coeff.or(law.coeff);
            law.power = self.power.or(law.power);
            law.rate = self.rate.or(law.rate);
            law.variance = self.variance.or(law.variance);
        }
    }
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Matrix size.
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<usize>,
    /// Number of matrices.
    #[arg(long)]
    pub samples: Option<usize>,
    /// support2 or support1.
    #[arg(long, value_parser = convention)]
    pub convention: Option<Convention>,
    /// Coefficient of an added GUE matrix.
    #[arg(long)]
    pub deformation: Option<f64>,
    #[command(flatten)]
    pub law: LawArgs,
}

impl EnsembleArgs {
    fn apply(&self, e: &mut EnsembleConfig) {
        set(&mut e.n, self.n);
        set(&mut e.samples, self.samples);
        set(&mut e.convention, self.convention);
        set(&mut e.deformation, self.deformation);
        self.law.apply(e);
    }
}

#[derive(Debug, Args)]
pub struct ScCheckArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Allowed Stieltjes deviation.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Bound on the largest eigenvalue modulus.
    #[arg(long)]
    pub bound: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Comma-separated Hermite coefficients.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Hermite coefficient file.
    #[arg(long)]
    pub density_file: Option<PathBuf>,
    /// Order of the reversal approximant.
    #[arg(long)]
    pub order: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReverseArgs {
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of log-spaced times.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Number of quantile eigenvalues.
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<usize>,
    /// Sets `t = N^-lambda` unless `--t` is given.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// `start:stop:step`.
    #[arg(long, value_parser = sweep)]
    pub tau_sweep: Option<Sweep>,
    /// Spectrum CSV to use instead of quantiles.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FredholmArgs {
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// Comma-separated gap thresholds.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Window exponent.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PaircorrArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Poisson points at semicircle intensity instead of matrix spectra.
    #[arg(long)]
    pub poisson: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub reference_column: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl DensityArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let f = &mut cfg.flow;
        if let Some(c) = &self.coeffs {
            f.coeffs = c.clone();
            f.density_file = None;
        }
        if self.density_file.is_some() {
            f.density_file = self.density_file.clone();
        }
        set(&mut f.order, self.order);
    }
}

impl Sub {
    pub fn command(&self) -> Command {
        match self {
            Sub::ValidateLaw(_) => Command::ValidateLaw,
            Sub::SampleSpectrum(_) => Command::SampleSpectrum,
            Sub::ScCheck(_) => Command::ScCheck,
            Sub::Flow(_) => Command::Flow,
            Sub::Reverse(_) => Command::Reverse,
            Sub::Kernel(_) => Command::Kernel,
            Sub::Fredholm(_) => Command::Fredholm,
            Sub::Gaps(_) => Command::Gaps,
            Sub::Paircorr(_) => Command::Paircorr,
            Sub::Compare(_) => Command::Compare,
        }
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        match self {
            Sub::ValidateLaw(a) => a.apply(&mut cfg.ensemble),
            Sub::SampleSpectrum(a) => a.apply(&mut cfg.ensemble),
            Sub::ScCheck(a) => {
                a.ensemble.apply(&mut cfg.ensemble);
                let st = &mut cfg.statistics;
                set(&mut st.eta, a.eta);
                set(&mut st.tolerance, a.tolerance);
                set(&mut st.bound, a.bound);
            }
            Sub::Flow(a) => {
                a.density.apply(cfg);
                set(&mut cfg.flow.t, a.t);
            }
            Sub::Reverse(a) => {
                a.density.apply(cfg);
                let f = &mut cfg.flow;
                set(&mut f.t_min, a.t_min);
                set(&mut f.t_max, a.t_max);
                set(&mut f.points, a.points);
            }
            Sub::Kernel(a) => {
                set(&mut cfg.ensemble.n, a.n);
                set(&mut cfg.flow.lambda, a.lambda);
                let k = &mut cfg.kernel;
                if a.t.is_some() {
                    k.t = a.t;
                }
                set(&mut k.u, a.u);
                set(&mut k.taus, a.tau_sweep.clone().map(|s| s.0));
                if a.spectrum.is_some() {
                    k.spectrum = a.spectrum.clone();
                }
                k.r = a.r.or(k.r);
                k.omega = a.omega.or(k.omega);
                k.rho = a.rho.or(k.rho);
                set(&mut k.rel_tol, a.rel_tol);
            }
            Sub::Fredholm(a) => {
                set(&mut cfg.fredholm.alpha_max, a.alpha_max);
                set(&mut cfg.fredholm.step, a.step);
            }
            Sub::Gaps(a) => {
                a.ensemble.apply(&mut cfg.ensemble);
                let st = &mut cfg.statistics;
                set(&mut st.u, a.u);
                set(&mut st.s, a.s.clone());
                set(&mut st.delta, a.delta);
            }
            Sub::Paircorr(a) => {
                a.ensemble.apply(&mut cfg.ensemble);
                let st = &mut cfg.statistics;
                set(&mut st.u, a.u);
                set(&mut st.half_width, a.half_width);
                set(&mut st.bins, a.bins);
                set(&mut st.tau_max, a.tau_max);
                st.poisson |= a.poisson;
            }
            Sub::Compare(a) => {
                let c = &mut cfg.compare;
                if a.table.is_some() {
                    c.table = a.table.clone();
                }
                if a.reference.is_some() {
                    c.reference = a.reference.clone();
                }
                if a.column.is_some() {
                    c.column = a.column.clone();
                }
                if a.reference_column.is_some() {
                    c.reference_column = a.reference_column.clone();
                }
                set(&mut c.tolerance, a.tolerance);
            }
        }
    }
}

impl Cli {
    /// The config file (or defaults) with every given flag applied.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let command = self.command.command();
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new(command),
        };
        cfg.command = command;
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.workers, self.workers);
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        self.command.apply(&mut cfg);
        Ok(cfg)
    }
}

/// Parses `args`, runs the experiment and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match cli.config().and_then(|cfg| commands::run(&cfg)) {
        Ok(manifest) => {
            for f in &manifest.outputs {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
