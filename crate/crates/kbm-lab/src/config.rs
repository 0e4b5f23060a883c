//! Run configuration: defaults, TOML files and command-line overrides.
//!
//! Values are resolved with the precedence command line > file > defaults.
//! A configuration file may contain the sections
//!
//! ```toml
//! [model]
//! sigma = 1.0
//! dim = 3
//!
//! [metric]
//! family = "polynomial"   # euclidean | hyperbolic | polynomial | subexponential | exponential
//! beta = 3.0
//! c = 1.0
//!
//! [sde]
//! dt = 1e-3
//! scheme = "ito_euler_project"
//! horizon = 1.0
//! stride = 1
//!
//! [rng]
//! seed = 7
//!
//! [run]
//! paths = 1
//! out = "out"
//! threads = 4
//! r0 = 1.0
//! rdot0 = 0.0
//! ```
//!
//! Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::geometry::ModelSpace;
use crate::sde::SchemeKind;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Metric parameter used when `beta` is not given.
pub const DEFAULT_BETA: f64 = 3.0;
/// Exponential rate used when `c` is not given.
pub const DEFAULT_C: f64 = 1.0;

/// Partially specified configuration, as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub sigma: Option<f64>,
    pub dim: Option<usize>,
    pub metric: Option<String>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub scheme: Option<String>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub r0: Option<f64>,
    pub rdot0: Option<f64>,
}

impl Overrides {
    /// Fills every field unset in `self` from `lower`.
    pub fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            sigma: self.sigma.or(lower.sigma),
            dim: self.dim.or(lower.dim),
            metric: self.metric.or(lower.metric),
            beta: self.beta.or(lower.beta),
            c: self.c.or(lower.c),
            horizon: self.horizon.or(lower.horizon),
            dt: self.dt.or(lower.dt),
            paths: self.paths.or(lower.paths),
            seed: self.seed.or(lower.seed),
            scheme: self.scheme.or(lower.scheme),
            stride: self.stride.or(lower.stride),
            out: self.out.or(lower.out),
            threads: self.threads.or(lower.threads),
            r0: self.r0.or(lower.r0),
            rdot0: self.rdot0.or(lower.rdot0),
        }
    }

    /// Parsed scheme, if one was given.
    pub fn scheme_kind(&self) -> Result<Option<SchemeKind>> {
        self.scheme.as_deref().map(str::parse).transpose()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileLayout {
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    metric: MetricSection,
    #[serde(default)]
    sde: SdeSection,
    #[serde(default)]
    rng: RngSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    sigma: Option<f64>,
    dim: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricSection {
    family: Option<String>,
    beta: Option<f64>,
    c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdeSection {
    dt: Option<f64>,
    scheme: Option<String>,
    horizon: Option<f64>,
    stride: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RngSection {
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    paths: Option<usize>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    r0: Option<f64>,
    rdot0: Option<f64>,
}

/// Parses a TOML configuration document.
pub fn parse_file_config(text: &str) -> Result<Overrides> {
    let f: FileLayout = toml::from_str(text).map_err(|e| Error::Config(format!("configuration file: {e}")))?;
    Ok(Overrides {
        sigma: f.model.sigma,
        dim: f.model.dim,
        metric: f.metric.family,
        beta: f.metric.beta,
        c: f.metric.c,
        horizon: f.sde.horizon,
        dt: f.sde.dt,
        paths: f.run.paths,
        seed: f.rng.seed,
        scheme: f.sde.scheme,
        stride: f.sde.stride,
        out: f.run.out,
        threads: f.run.threads,
        r0: f.run.r0,
        rdot0: f.run.rdot0,
    })
}

/// Reads a TOML configuration file.
pub fn read_file_config(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read configuration file {}: {e}", path.display())))?;
    parse_file_config(&text)
}

/// Builds a metric family from its name and parameters.
pub fn parse_metric(name: &str, beta: Option<f64>, c: Option<f64>) -> Result<ModelSpace> {
    match name {
        "euclidean" | "flat" => Ok(ModelSpace::Euclidean),
        "hyperbolic" | "sinh" => Ok(ModelSpace::Hyperbolic),
        "polynomial" => Ok(ModelSpace::Polynomial { beta: beta.unwrap_or(DEFAULT_BETA) }),
        "subexponential" => Ok(ModelSpace::Subexponential { beta: beta.unwrap_or(0.5) }),
        "exponential" => Ok(ModelSpace::Exponential { c: c.unwrap_or(DEFAULT_C) }),
        other => Err(Error::Config(format!(
            "unknown metric `{other}` (expected euclidean, hyperbolic, polynomial, subexponential or exponential)"
        ))),
    }
}

/// Kind of trajectory a command produces, used for configuration checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// The hyperbolic half-plane simulator, which is two-dimensional.
    HyperbolicPlane,
    /// Every other simulation command.
    General,
}

/// Fully resolved simulation configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub sigma: f64,
    pub d: usize,
    pub metric: ModelSpace,
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    pub scheme: SchemeKind,
    pub stride: usize,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub r0: f64,
    pub rdot0: f64,
}

impl SimConfig {
    /// Resolves `cli` over `file` over the defaults and validates the result.
    pub fn resolve(cli: Overrides, file: Overrides, kind: CommandKind) -> Result<SimConfig> {
        let o = cli.or(file);
        let default_d = match kind {
            CommandKind::HyperbolicPlane => 2,
            CommandKind::General => 3,
        };
        let metric = parse_metric(o.metric.as_deref().unwrap_or("hyperbolic"), o.beta, o.c)?;
        let cfg = SimConfig {
            sigma: o.sigma.unwrap_or(1.0),
            d: o.dim.unwrap_or(default_d),
            metric,
            horizon: o.horizon.unwrap_or(1.0),
            dt: o.dt.unwrap_or(1e-3),
            paths: o.paths.unwrap_or(1),
            seed: o.seed.unwrap_or(crate::checks::DEFAULT_SEED),
            scheme: o.scheme_kind()?.unwrap_or(SchemeKind::ItoEulerProject),
            stride: o.stride.unwrap_or(1),
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            threads: o.threads,
            r0: o.r0.unwrap_or(1.0),
            rdot0: o.rdot0.unwrap_or(0.0),
        };
        cfg.validate(kind)?;
        Ok(cfg)
    }

    /// Checks the configuration invariants, naming the first one violated.
    pub fn validate(&self, kind: CommandKind) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return fail(format!("invariant `sigma >= 0` violated: sigma = {}", self.sigma));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return fail(format!("invariant `horizon > 0` violated: horizon = {}", self.horizon));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon / 100.0) {
            return fail(format!(
                "invariant `dt <= T/100` violated: dt = {}, T/100 = {}",
                self.dt,
                self.horizon / 100.0
            ));
        }
        if self.paths < 1 {
            return fail("invariant `paths >= 1` violated: paths = 0".into());
        }
        if self.stride < 1 {
            return fail("invariant `stride >= 1` violated: stride = 0".into());
        }
        if self.threads == Some(0) {
            return fail("invariant `threads >= 1` violated: threads = 0".into());
        }
        match kind {
            CommandKind::HyperbolicPlane if self.d != 2 => {
                fail(format!("invariant `d = 2 for the hyperbolic plane` violated: d = {}", self.d))
            }
            CommandKind::General if self.d < 3 => fail(format!(
                "invariant `d >= 3 outside the hyperbolic plane` violated: d = {} (d = 2 is permitted only for h2)",
                self.d
            )),
            _ => Ok(()),
        }?;
        if !(self.rdot0.abs() < 1.0) {
            return fail(format!("invariant `|rdot0| < 1` violated: rdot0 = {}", self.rdot0));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return fail(format!("invariant `r0 > 0` violated: r0 = {}", self.r0));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_cli_over_file_over_defaults() {
        let file = parse_file_config("[model]\nsigma = 2.0\ndim = 4\n[rng]\nseed = 9\n").unwrap();
        let cli = Overrides { sigma: Some(3.0), ..Default::default() };
        let c = SimConfig::resolve(cli, file, CommandKind::General).unwrap();
        assert_eq!(c.sigma, 3.0);
        assert_eq!(c.d, 4);
        assert_eq!(c.seed, 9);
        assert_eq!(c.dt, 1e-3);
    }

    #[test]
    fn file_sections_parse() {
        let o = parse_file_config(
            "[metric]\nfamily = \"polynomial\"\nbeta = 2.0\n[sde]\ndt = 0.01\nscheme = \"stratonovich_heun_project\"\n",
        )
        .unwrap();
        assert_eq!(parse_metric(o.metric.as_deref().unwrap(), o.beta, o.c).unwrap(), ModelSpace::Polynomial { beta: 2.0 });
        assert_eq!(o.scheme_kind().unwrap(), Some(SchemeKind::StratonovichHeunProject));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_file_config("[sde]\nstep = 0.1\n").is_err());
        assert!(parse_file_config("[extra]\n").is_err());
    }

    #[test]
    fn invariants_named() {
        let bad = Overrides { dt: Some(0.1), horizon: Some(1.0), ..Default::default() };
        let e = SimConfig::resolve(bad, Overrides::default(), CommandKind::General).unwrap_err();
        assert!(e.to_string().contains("dt <= T/100"));
        let two = Overrides { dim: Some(2), ..Default::default() };
        let e = SimConfig::resolve(two.clone(), Overrides::default(), CommandKind::General).unwrap_err();
        assert!(e.to_string().contains("d = 2 is permitted only for h2"));
        assert!(SimConfig::resolve(two, Overrides::default(), CommandKind::HyperbolicPlane).is_ok());
        let zero = Overrides { paths: Some(0), ..Default::default() };
        assert!(SimConfig::resolve(zero, Overrides::default(), CommandKind::General).unwrap_err().to_string().contains("paths >= 1"));
    }
}
