//! Experiment configuration: a TOML document with one section per concern.
//!
//! ```toml
//! command = "gaps"
//! seed = 7
//!
//! [ensemble]
//! n = 400
//! samples = 500
//!
//! [statistics]
//! u = 0.0
//! s = [0.5, 1.0, 2.0]
//! delta = 0.8
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wigner_lab::bh_kernel::KernelConfig;
use wigner_lab::ensemble::{Convention, EntryLaw, LawSpec};
use wigner_lab::statistics::{semicircle_quantiles, SemicircleRef};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ValidateLaw,
    SampleSpectrum,
    ScCheck,
    Flow,
    Reverse,
    Kernel,
    Fredholm,
    Gaps,
    Paircorr,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ValidateLaw => "validate-law",
            Command::SampleSpectrum => "sample-spectrum",
            Command::ScCheck => "sc-check",
            Command::Flow => "flow",
            Command::Reverse => "reverse",
            Command::Kernel => "kernel",
            Command::Fredholm => "fredholm",
            Command::Gaps => "gaps",
            Command::Paircorr => "paircorr",
            Command::Compare => "compare",
        }
    }

    /// File stem of the command's outputs.
    pub fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 picks the number of cores.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub statistics: StatisticsConfig,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub fredholm: FredholmConfig,
    #[serde(default)]
    pub compare: CompareConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("wigner-lab-out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n: usize,
    pub samples: usize,
    pub convention: Convention,
    /// Off-diagonal law; Gaussian (GUE) when absent. Its variance defaults
    /// to the convention's.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSpec>,
    /// Diagonal law; Gaussian when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag_law: Option<LawSpec>,
    /// Coefficient of an added independent GUE matrix.
    pub deformation: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n: 400,
            samples: 1,
            convention: Convention::Support2,
            law: None,
            diag_law: None,
            deformation: 0.0,
        }
    }
}

impl EnsembleConfig {
    fn law_with_variance(spec: Option<&LawSpec>, variance: f64) -> Result<EntryLaw> {
        let mut spec = spec.cloned().unwrap_or_else(|| LawSpec::gaussian(variance));
        spec.variance.get_or_insert(variance);
        Ok(spec.to_law()?)
    }

    /// Off-diagonal and diagonal entry laws.
    pub fn laws(&self) -> Result<(EntryLaw, EntryLaw)> {
        let c = self.convention;
        Ok((
            Self::law_with_variance(self.law.as_ref(), c.off_diag_variance())?,
            Self::law_with_variance(self.diag_law.as_ref(), c.diag_variance())?,
        ))
    }

    pub fn semicircle(&self) -> SemicircleRef {
        SemicircleRef::new(self.convention, self.deformation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    /// Flow time.
    pub t: f64,
    /// Time scale exponent, `t = N^-lambda`.
    pub lambda: f64,
    /// Order `m` of the reversal approximant.
    pub order: u32,
    /// Hermite coefficients of the density `v`.
    pub coeffs: Vec<f64>,
    /// Hermite text file; overrides `coeffs`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_file: Option<PathBuf>,
    /// Time grid of the reversal sweep: `points` log-spaced values.
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            t: 0.1,
            lambda: 0.5,
            order: 3,
            coeffs: vec![1.0, 0.0, 0.2, 0.0, 0.05],
            density_file: None,
            t_min: 1e-3,
            t_max: 1e-1,
            points: 9,
        }
    }
}

impl FlowConfig {
    pub fn t_grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.t_min];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.points)
            .map(|k| (a + (b - a) * k as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatisticsConfig {
    pub u: f64,
    /// Gap thresholds.
    pub s: Vec<f64>,
    /// Window exponent, `t_N = N^(-1+delta)`.
    pub delta: f64,
    pub bins: usize,
    pub tau_max: f64,
    /// Half-width of the pair-correlation window around `u`.
    pub half_width: f64,
    /// Use the Poisson control instead of matrix spectra.
    pub poisson: bool,
    /// Good-set parameters.
    pub eta: f64,
    pub tolerance: f64,
    pub bound: f64,
}

impl Default for StatisticsConfig {
    fn default() -> Self {
        StatisticsConfig {
            u: 0.0,
            s: vec![0.5, 1.0, 2.0],
            delta: 0.8,
            bins: 24,
            tau_max: 3.0,
            half_width: 0.1,
            poisson: false,
            eta: 0.05,
            tolerance: 0.05,
            bound: 10.0,
        }
    }
}

/// Kernel parameters. The spectrum is either read from `spectrum` or taken
/// as the `ensemble.n` support1 semicircle quantiles; `t` defaults to
/// `N^-lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub u: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub taus: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub cutoff: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub bound: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        let d = KernelConfig::new(0.0, 0.0, 1.0, Vec::new());
        KernelSection {
            u: 0.0,
            t: None,
            taus: range(0.25, 3.0, 0.25).unwrap_or_default(),
            spectrum: None,
            r: None,
            omega: None,
            rho: None,
            cutoff: d.cutoff,
            rel_tol: d.rel_tol,
            max_panels: d.max_panels,
            bound: d.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FredholmConfig {
    pub alpha_max: f64,
    pub step: f64,
}

impl Default for FredholmConfig {
    fn default() -> Self {
        FredholmConfig {
            alpha_max: 4.0,
            step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    /// Value column of the table; its second column when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    /// Value column of the reference; defaults to `column` if the
    /// reference has it, else its second column.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_column: Option<String>,
    pub tolerance: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            table: None,
            reference: None,
            column: None,
            reference_column: None,
            tolerance: 0.05,
        }
    }
}

/// `start, start + step, ...` up to `stop` inclusive (with a 1e-9 step
/// allowance).
pub fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !(stop >= start) {
        return Err(CliError::config(format!(
            "bad range {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count > 1e6 {
        return Err(CliError::config("range has more than a million points"));
    }
    Ok((0..=count as usize).map(|k| start + k as f64 * step).collect())
}

/// Parses `start:stop:step`.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err(CliError::config(format!("expected start:stop:step, got `{text}`")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::config(format!("bad number `{s}` in range: {e}")))
    };
    range(num(a)?, num(b)?, num(c)?)
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{what} must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            seed: 0,
            workers: 0,
            output: OutputConfig::default(),
            ensemble: EnsembleConfig::default(),
            flow: FlowConfig::default(),
            statistics: StatisticsConfig::default(),
            kernel: KernelSection::default(),
            fredholm: FredholmConfig::default(),
            compare: CompareConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical TOML form, ignoring the worker count and
    /// the output directory (neither changes the results).
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.workers = 0;
        c.output = OutputConfig::default();
        let digest = Sha256::digest(c.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Checks the preconditions of the selected command.
    pub fn validate(&self) -> Result<()> {
        let e = &self.ensemble;
        let st = &self.statistics;
        let needs_ensemble = matches!(
            self.command,
            Command::SampleSpectrum | Command::ScCheck | Command::Gaps | Command::Paircorr
        );
        if needs_ensemble {
            if e.n < 2 || e.samples == 0 {
                return Err(CliError::config("need n >= 2 and samples >= 1"));
            }
            if !(e.deformation >= 0.0 && e.deformation.is_finite()) {
                return Err(CliError::config("deformation must be >= 0"));
            }
            e.laws()?;
        }
        match self.command {
            Command::ValidateLaw => {
                e.laws()?;
            }
            Command::ScCheck => {
                positive(st.eta, "eta")?;
                positive(st.tolerance, "tolerance")?;
                positive(st.bound, "bound")?;
            }
            Command::Gaps | Command::Paircorr => {
                if !(e.semicircle().density(st.u) > 0.0) {
                    return Err(CliError::config(format!("u = {} is outside the bulk", st.u)));
                }
                if self.command == Command::Gaps {
                    if !(st.delta > 0.0 && st.delta < 1.0) {
                        return Err(CliError::config("delta must lie in (0, 1)"));
                    }
                    if st.s.is_empty() || st.s.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                        return Err(CliError::config("need at least one finite s >= 0"));
                    }
                } else {
                    if st.bins == 0 {
                        return Err(CliError::config("bins must be positive"));
                    }
                    positive(st.tau_max, "tau_max")?;
                    positive(st.half_width, "half_width")?;
                }
            }
            Command::Flow | Command::Reverse => {
                let f = &self.flow;
                if f.order < 2 {
                    return Err(CliError::config("order must be >= 2"));
                }
                if self.command == Command::Flow {
                    if !(f.t >= 0.0 && f.t.is_finite()) {
                        return Err(CliError::config("t must be >= 0"));
                    }
                } else {
                    positive(f.t_min, "t_min")?;
                    positive(f.t_max, "t_max")?;
                    if f.points == 0 || f.t_max < f.t_min {
                        return Err(CliError::config("need points >= 1 and t_min <= t_max"));
                    }
                }
                if f.density_file.is_none() && f.coeffs.is_empty() {
                    return Err(CliError::config("no density coefficients"));
                }
            }
            Command::Kernel => {
                let k = &self.kernel;
                if k.taus.is_empty() {
                    return Err(CliError::config("empty tau sweep"));
                }
                if k.spectrum.is_none() && e.n < 2 {
                    return Err(CliError::config("need n >= 2"));
                }
                match k.t {
                    Some(t) => positive(t, "t")?,
                    None => positive(self.flow.lambda, "lambda")?,
                }
            }
            Command::Fredholm => {
                positive(self.fredholm.step, "step")?;
                if !(self.fredholm.alpha_max >= 0.0) {
                    return Err(CliError::config("alpha_max must be >= 0"));
                }
            }
            Command::Compare => {
                let c = &self.compare;
                if c.table.is_none() || c.reference.is_none() {
                    return Err(CliError::config("compare needs a table and a reference"));
                }
                if !(c.tolerance >= 0.0) {
                    return Err(CliError::config("tolerance must be >= 0"));
                }
            }
            Command::SampleSpectrum => {}
        }
        Ok(())
    }

    /// Kernel configuration at the first `tau` of the sweep.
    pub fn kernel_config(&self) -> Result<KernelConfig> {
        let k = &self.kernel;
        let y = match &k.spectrum {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                wigner_lab::spectra::SpectralSample::from_csv(&text)?.eigenvalues
            }
            None => {
                semicircle_quantiles(self.ensemble.n, &SemicircleRef::new(Convention::Support1, 0.0))?
                    .eigenvalues
            }
        };
        let n = y.len() as f64;
        let t = k.t.unwrap_or_else(|| n.powf(-self.flow.lambda));
        let mut cfg = KernelConfig::new(k.u, k.taus[0], t, y);
        cfg.r = k.r;
        cfg.omega = k.omega;
        cfg.rho = k.rho;
        cfg.cutoff = k.cutoff;
        cfg.rel_tol = k.rel_tol;
        cfg.max_panels = k.max_panels;
        cfg.bound = k.bound;
        cfg.validate()?;
        Ok(cfg)
    }
}
