//! Run configuration: a single JSON file whose keys are the fields of
//! [`RunConfig`]. Missing keys take their defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};
use crate::params::{BoundaryParams, ModelParams, Sampler, DEFAULT_ANNULUS};

/// Names of all verification suites, in canonical order.
pub const SUITES: [&str; 9] = [
    "ybe",
    "rll",
    "algebra",
    "reflection",
    "dressing",
    "onsager",
    "transfer",
    "hamiltonian",
    "spectrum",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QSampling {
    /// Modulus range `[min, max)` of every generic complex sample
    /// (`q`, spectral parameters, boundary constants).
    pub min_modulus: f64,
    pub max_modulus: f64,
    /// Samples per check; `None` keeps each check's own default.
    #[serde(default)]
    pub count: Option<usize>,
}

impl Default for QSampling {
    fn default() -> Self {
        Self {
            min_modulus: DEFAULT_ANNULUS.0,
            max_modulus: DEFAULT_ANNULUS.1,
            count: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistMode {
    /// `|tᵢ| = 1`, uniform phase.
    #[default]
    Unimodular,
    /// Generic complex twists.
    Generic,
    /// Fixed per-site values `[[re, im], ...]`.
    Fixed(Vec<C64>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InhomogeneityMode {
    Ones,
    #[default]
    Random,
    Fixed(Vec<C64>),
}

/// `"random"` or explicit constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Named(String),
    Fixed(BoundaryParams),
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self::Named("random".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_sites")]
    pub n_sites: usize,
    /// Generator depth for the algebra checks; defaults per chain length.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub q_sampling: QSampling,
    #[serde(default)]
    pub twist_mode: TwistMode,
    #[serde(default)]
    pub inhomogeneity_mode: InhomogeneityMode,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub seed: u64,
    /// Keyed by `suite.check`.
    #[serde(default)]
    pub tolerance_overrides: BTreeMap<String, f64>,
    #[serde(default = "all_suites")]
    pub suites: Vec<String>,
}

fn default_sites() -> usize {
    6
}

fn all_suites() -> Vec<String> {
    SUITES.iter().map(|s| s.to_string()).collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_sites: default_sites(),
            depth: None,
            q_sampling: QSampling::default(),
            twist_mode: TwistMode::default(),
            inhomogeneity_mode: InhomogeneityMode::default(),
            boundary: BoundarySpec::default(),
            seed: 0,
            tolerance_overrides: BTreeMap::new(),
            suites: all_suites(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json(&text)
    }

    pub fn with_suites(mut self, suites: &[&str]) -> Self {
        self.suites = suites.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let qs = &self.q_sampling;
        Sampler::new(0).with_annulus(qs.min_modulus, qs.max_modulus)?;
        if qs.count == Some(0) {
            return Err(Error::Config("q_sampling.count must be positive".into()));
        }
        if self.n_sites == 0 {
            return Err(Error::Config("n_sites must be at least 1".into()));
        }
        if self.depth == Some(0) {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if let BoundarySpec::Named(n) = &self.boundary {
            if n != "random" {
                return Err(Error::Config(format!(
                    "boundary `{n}`: expected \"random\" or constants"
                )));
            }
        }
        for (mode, list) in [
            ("twist_mode", fixed_list(&self.twist_mode)),
            ("inhomogeneity_mode", fixed_inh(&self.inhomogeneity_mode)),
        ] {
            if let Some(l) = list {
                if l.iter()
                    .any(|z| z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite())
                {
                    return Err(Error::Config(format!(
                        "{mode}: entries must be finite and nonzero"
                    )));
                }
            }
        }
        for (k, v) in &self.tolerance_overrides {
            let suite = k.split('.').next().unwrap_or("");
            if !SUITES.contains(&suite) || !k.contains('.') {
                return Err(Error::Config(format!(
                    "tolerance override `{k}`: expected suite.check"
                )));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::Config(format!(
                    "tolerance override `{k}` must be >= 0"
                )));
            }
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::UnknownSuite(s.clone()));
            }
        }
        Ok(())
    }

    /// Sampler for one labelled stream of this run.
    pub fn sampler(&self, label: &str, index: u64) -> Sampler {
        let qs = &self.q_sampling;
        Sampler::fork(self.seed ^ fnv1a(label), index)
            .with_annulus(qs.min_modulus, qs.max_modulus)
            .expect("validated annulus")
    }

    /// One twist, honouring `twist_mode` (fixed lists give their first entry).
    pub fn twist(&self, s: &mut Sampler) -> C64 {
        match &self.twist_mode {
            TwistMode::Unimodular => s.unimodular(),
            TwistMode::Generic => s.generic(),
            TwistMode::Fixed(l) => l.first().copied().unwrap_or(ONE),
        }
    }

    /// Model on `n` sites drawn according to the configured modes.
    pub fn model(&self, s: &mut Sampler, n: usize) -> Result<ModelParams> {
        let q = s.deformation();
        let t = match &self.twist_mode {
            TwistMode::Unimodular => (0..n).map(|_| s.unimodular()).collect(),
            TwistMode::Generic => (0..n).map(|_| s.generic()).collect(),
            TwistMode::Fixed(l) => take(l, n, "twist_mode")?,
        };
        let v = match &self.inhomogeneity_mode {
            InhomogeneityMode::Ones => vec![ONE; n],
            InhomogeneityMode::Random => (0..n).map(|_| s.generic()).collect(),
            InhomogeneityMode::Fixed(l) => take(l, n, "inhomogeneity_mode")?,
        };
        let boundary = match &self.boundary {
            BoundarySpec::Fixed(b) => *b,
            BoundarySpec::Named(_) => s.boundary(),
        };
        ModelParams::new(q, t, v, boundary)
    }
}

fn fixed_list(m: &TwistMode) -> Option<&[C64]> {
    match m {
        TwistMode::Fixed(l) => Some(l),
        _ => None,
    }
}

fn fixed_inh(m: &InhomogeneityMode) -> Option<&[C64]> {
    match m {
        InhomogeneityMode::Fixed(l) => Some(l),
        _ => None,
    }
}

fn take(l: &[C64], n: usize, what: &str) -> Result<Vec<C64>> {
    if l.len() < n {
        return Err(Error::Config(format!(
            "{what}: {n} sites need {n} values, got {}",
            l.len()
        )));
    }
    Ok(l[..n].to_vec())
}

/// FNV-1a, a stable string hash for deriving per-check streams.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn defaults_from_empty_object() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.suites.len(), 9);
    }

    #[test]
    fn full_file_round_trips() {
        let text = r#"{
            "n_sites": 3, "depth": 5,
            "q_sampling": {"min_modulus": 0.9, "max_modulus": 1.1, "count": 4},
            "twist_mode": {"fixed": [[1, 0], [0, 1], [0.6, 0.8]]},
            "inhomogeneity_mode": "ones",
            "boundary": "random", "seed": 17,
            "tolerance_overrides": {"ybe.ybe": 1e-9},
            "suites": ["ybe", "rll"]
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(
            cfg.twist_mode,
            TwistMode::Fixed(vec![ONE, c(0.0, 1.0), c(0.6, 0.8)])
        );
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let m = cfg.model(&mut cfg.sampler("x", 0), 3).unwrap();
        assert_eq!(m.v, vec![ONE; 3]);
        assert_eq!(m.t[1], c(0.0, 1.0));
        assert!(cfg.model(&mut cfg.sampler("x", 0), 4).is_err());
    }

    #[test]
    fn fixed_boundary_parses() {
        let text = r#"{"boundary": {
            "eps_plus": [1, 0], "eps_minus": [-1, 0], "k_plus": [1, 0], "k_minus": [1, 0],
            "kappa": [1, 0], "kappa_star": [1, 0], "kappa_plus": [1, 0], "kappa_minus": [1, 0]}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let m = cfg.model(&mut cfg.sampler("x", 0), 2).unwrap();
        assert_eq!(m.boundary.eps_minus, c(-1.0, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::from_json(r#"{"suites": ["nope"]}"#),
            Err(Error::UnknownSuite(_))
        ));
        for bad in [
            r#"{"boundary": "fixed"}"#,
            r#"{"n_sites": 0}"#,
            r#"{"q_sampling": {"min_modulus": 2, "max_modulus": 1}}"#,
            r#"{"tolerance_overrides": {"ybe": 1.0}}"#,
            r#"{"twist_mode": {"fixed": [[0, 0]]}}"#,
            r#"{"unknown_key": 1}"#,
        ] {
            assert!(RunConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let cfg = RunConfig::default();
        let a = cfg.model(&mut cfg.sampler("a", 0), 2).unwrap();
        assert_eq!(a, cfg.model(&mut cfg.sampler("a", 0), 2).unwrap());
        assert_ne!(a, cfg.model(&mut cfg.sampler("a", 1), 2).unwrap());
        assert_ne!(a, cfg.model(&mut cfg.sampler("b", 0), 2).unwrap());
    }
}
