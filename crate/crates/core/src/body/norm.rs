//! Target spaces W in John position.
//!
//! For the symmetric families below the minimal-volume ellipsoid of the unit
//! ball is a multiple of the Euclidean ball, so the position is reached by a
//! single scaling `gauge(x) = c·‖x‖_p`, `c = max(1, k^{1/2 − 1/p})`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "L1")]
    L1,
    #[serde(rename = "LINF")]
    Linf,
    /// ℓ_p with p in (1, ∞).
    #[serde(rename = "LP")]
    Lp(f64),
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => write!(f, "L1"),
            NormKind::Linf => write!(f, "LINF"),
            NormKind::Lp(p) => write!(f, "LP({p})"),
            NormKind::Custom => write!(f, "CUSTOM"),
        }
    }
}

/// A user supplied norm on ℝᵏ, assumed to already be in John position.
pub trait CustomNorm: Send + Sync + fmt::Debug {
    fn gauge(&self, x: &[f64]) -> f64;
    fn dual_gauge(&self, y: &[f64]) -> f64;
    /// `(a, b)` with `a·B₂ᵏ ⊆ B_W ⊆ b·B₂ᵏ`.
    fn sandwich(&self) -> (f64, f64);
    fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        None
    }
}

/// Gauge and dual gauge of a k-dimensional normed space W.
#[derive(Debug, Clone)]
pub struct NormOracle {
    k: usize,
    kind: NormKind,
    scale: f64,
    sandwich: (f64, f64),
    custom: Option<Arc<dyn CustomNorm>>,
}

/// Builds W of the given kind and dimension, scaled into John position:
/// `(1/√k)·B₂ᵏ ⊆ a·B₂ᵏ ⊆ B_W ⊆ B₂ᵏ`.
pub fn make_norm_oracle(kind: NormKind, k: usize) -> Result<NormOracle> {
    if k == 0 {
        return Err(Error::invalid("norm dimension k must be at least 1"));
    }
    let kf = k as f64;
    let (scale, inner) = match kind {
        NormKind::L1 => (1.0, 1.0 / kf.sqrt()),
        NormKind::Linf => (kf.sqrt(), 1.0 / kf.sqrt()),
        NormKind::Lp(p) => {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::invalid(format!("LP norm needs p in (1, ∞), got {p}")));
            }
            let e = 0.5 - 1.0 / p;
            (kf.powf(e).max(1.0), kf.powf(-e.abs()))
        }
        NormKind::Custom => {
            return Err(Error::UnsupportedKind(
                "CUSTOM norms are built with NormOracle::custom".into(),
            ))
        }
    };
    Ok(NormOracle {
        k,
        kind,
        scale,
        sandwich: (inner, 1.0),
        custom: None,
    })
}

impl NormOracle {
    pub fn custom(k: usize, norm: Arc<dyn CustomNorm>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("norm dimension k must be at least 1"));
        }
        let sandwich = norm.sandwich();
        if !(sandwich.0 > 0.0 && sandwich.0 <= sandwich.1) {
            return Err(Error::invalid(format!("bad sandwich constants {sandwich:?}")));
        }
        Ok(Self {
            k,
            kind: NormKind::Custom,
            scale: 1.0,
            sandwich,
            custom: Some(norm),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    /// Multiplier `c` in `gauge = c·‖·‖_p` (1 for custom norms).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sandwich(&self) -> (f64, f64) {
        self.sandwich
    }

    pub fn is_polytopal(&self) -> bool {
        match self.kind {
            NormKind::L1 | NormKind::Linf => true,
            NormKind::Lp(_) => false,
            NormKind::Custom => self.custom.as_ref().is_some_and(|c| c.vertices().is_some()),
        }
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.k);
        match self.kind {
            NormKind::L1 => self.scale * x.iter().map(|v| v.abs()).sum::<f64>(),
            NormKind::Linf => self.scale * max_abs(x),
            NormKind::Lp(p) => self.scale * lp_norm(x, p),
            NormKind::Custom => self.custom.as_ref().expect("custom norm").gauge(x),
        }
    }

    /// `max { ⟨x, y⟩ : gauge(x) ≤ 1 }`.
    pub fn dual_gauge(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.k);
        match self.kind {
            NormKind::L1 => max_abs(y) / self.scale,
            NormKind::Linf => y.iter().map(|v| v.abs()).sum::<f64>() / self.scale,
            NormKind::Lp(p) => lp_norm(y, p / (p - 1.0)) / self.scale,
            NormKind::Custom => self.custom.as_ref().expect("custom norm").dual_gauge(y),
        }
    }

    /// Extreme points of B_W, when W is polytopal.
    pub fn polytopal_vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self.kind {
            NormKind::L1 => {
                let mut out = Vec::with_capacity(2 * self.k);
                for i in 0..self.k {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; self.k];
                        v[i] = s / self.scale;
                        out.push(v);
                    }
                }
                Some(out)
            }
            NormKind::Linf => {
                let r = 1.0 / self.scale;
                let out = (0u64..1 << self.k)
                    .map(|mask| {
                        (0..self.k)
                            .map(|i| if mask >> i & 1 == 1 { -r } else { r })
                            .collect()
                    })
                    .collect();
                Some(out)
            }
            NormKind::Lp(_) => None,
            NormKind::Custom => self.custom.as_ref().and_then(|c| c.vertices()),
        }
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// ℓ_p norm, rescaled by the largest entry to avoid overflow.
pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = max_abs(x);
    if m == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return m;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
