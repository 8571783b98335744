use std::path::Path;

use serde::{Deserialize, Serialize};

use satbody_core::lemmas::ProbeSet;
use satbody_core::{BodyDescriptor, Constants, NormKind};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Every knob of every subcommand. Missing fields take their defaults, so
/// `{}` is a valid configuration (the pilot sweep).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Quotient maps per rank in sweeps; lemma suites use their own counts
    /// unless this is set explicitly on the command line.
    pub trials: usize,
    pub body: BodyConfig,
    pub sweep: SweepConfig,
    pub params: ParamsConfig,
    pub lemma: LemmaConfig,
    pub constants: Constants,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: 200,
            body: BodyConfig::default(),
            sweep: SweepConfig::default(),
            params: ParamsConfig::default(),
            lemma: LemmaConfig::default(),
            constants: Constants::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub blocks: usize,
    pub k: usize,
    pub kind: NormKind,
    /// Exponent of the outer sum.
    pub p: f64,
    pub stream: u64,
}

impl Default for BodyConfig {
    fn default() -> Self {
        Self {
            n: 48,
            blocks: 240,
            k: 2,
            kind: NormKind::Linf,
            p: 1.0,
            stream: 0,
        }
    }
}

impl BodyConfig {
    pub fn descriptor(&self, seed: u64) -> BodyDescriptor {
        BodyDescriptor {
            n: self.n,
            blocks: self.blocks,
            k: self.k,
            kind: self.kind,
            p: self.p,
            seed,
            stream: self.stream,
        }
    }

    pub fn matches(&self, d: &BodyDescriptor) -> bool {
        self.n == d.n
            && self.blocks == d.blocks
            && self.k == d.k
            && self.kind == d.kind
            && self.p == d.p
            && self.stream == d.stream
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Quotient ranks.
    pub m: Vec<usize>,
    /// Overrides `√(m/(64nk))`.
    pub kappa: Option<f64>,
    pub exact: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: vec![36, 42, 48],
            kappa: None,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: u64,
    pub m0: u64,
    /// Absent in q-mode selects `⌈(n^{3/2} log n)^p⌉`.
    #[serde(rename = "N")]
    pub blocks: Option<u64>,
    pub k: u64,
    pub q: Option<f64>,
    pub unproven: bool,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            n: 48,
            m0: 36,
            blocks: Some(240),
            k: 2,
            q: None,
            unproven: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    pub gamma_m: Vec<u64>,
    pub turan_trials: usize,
    pub turan_max_n: usize,
    pub svtail: Vec<SvTailCase>,
    /// t values as multiples of `σ√m`.
    pub svtail_t_factors: Vec<f64>,
    pub svtail_trials: usize,
    pub shrinking: Vec<ShrinkCase>,
    pub shrinking_trials: usize,
    pub meanwidth: Vec<MeanWidthCase>,
    pub meanwidth_trials: usize,
    pub chevet: Vec<ChevetCase>,
    pub chevet_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvTailCase {
    pub m: usize,
    pub k: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkCase {
    pub set: ProbeSet,
    pub m: usize,
    pub d: usize,
    pub a: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanWidthCase {
    /// Ambient dimension.
    pub m: usize,
    /// Dimension of the coordinate section of the unit ball.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChevetCase {
    pub set: ProbeSet,
    pub d: usize,
    pub m: usize,
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

impl Default for LemmaConfig {
    fn default() -> Self {
        let cloud = |m: usize| {
            let mut third = vec![0.0; m];
            third[0] = 0.6;
            third[1] = -0.8;
            ProbeSet::PointCloud(vec![unit(m, 0), unit(m, 1), third])
        };
        Self {
            gamma_m: vec![1, 2, 3, 10, 100, 1000, 1_000_000],
            turan_trials: 10_000,
            turan_max_n: 64,
            svtail: [(50, 10), (100, 25), (200, 50)]
                .into_iter()
                .map(|(m, k)| SvTailCase {
                    m,
                    k,
                    sigma: 1.0 / (m as f64).sqrt(),
                })
                .collect(),
            svtail_t_factors: vec![0.1, 0.2, 0.4],
            svtail_trials: 10_000,
            shrinking: [(60, 6), (100, 10)]
                .into_iter()
                .flat_map(|(m, d)| {
                    [
                        ShrinkCase {
                            set: ProbeSet::BallSection { dim: 8, radius: 1.0 },
                            m,
                            d,
                            a: 1.0,
                            t: 0.4,
                        },
                        ShrinkCase {
                            set: cloud(m),
                            m,
                            d,
                            a: 1.0,
                            t: 0.4,
                        },
                    ]
                })
                .collect(),
            shrinking_trials: 1000,
            meanwidth: vec![MeanWidthCase { m: 50, k: 50 }, MeanWidthCase { m: 50, k: 8 }],
            meanwidth_trials: 100_000,
            chevet: vec![
                ChevetCase {
                    set: ProbeSet::BallSection { dim: 20, radius: 1.0 },
                    d: 5,
                    m: 20,
                },
                ChevetCase {
                    set: ProbeSet::BallSection { dim: 8, radius: 1.0 },
                    d: 6,
                    m: 60,
                },
                ChevetCase {
                    set: cloud(30),
                    d: 4,
                    m: 30,
                },
            ],
            chevet_trials: 1000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, serde_json::Value), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let raw: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
        Ok((Self::from_json(&text)?, raw))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
