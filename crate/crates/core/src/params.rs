//! Arithmetic of the parameter constraints and of the failure-probability
//! bounds for the ℓ₁-sum construction and its ℓ_p variant.
//!
//! `log` is the natural logarithm. Probability bounds are stored as
//! logarithms; their values are exponentiated only through [`safe_exp`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemmas::ln_choose;

/// Relative slack for inequalities that hold with equality by construction.
pub const EQUALITY_SLACK: f64 = 1e-12;

/// The unspecified universal constants, all user-configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(rename = "C0", default = "one")]
    pub c0_big: f64,
    #[serde(rename = "Cprime", default = "twenty")]
    pub c_prime: f64,
    #[serde(rename = "C2", default = "three")]
    pub c2: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(rename = "c0prime", default = "one")]
    pub c0_prime: f64,
    #[serde(default = "one")]
    pub cq: f64,
}

fn one() -> f64 {
    1.0
}
fn twenty() -> f64 {
    20.0
}
fn three() -> f64 {
    3.0
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c0_big: 1.0,
            c_prime: 20.0,
            c2: 3.0,
            c1: 1.0,
            c0: 1.0,
            c0_prime: 1.0,
            cq: 1.0,
        }
    }
}

impl Constants {
    fn validate(&self) -> Result<()> {
        let all = [
            self.c0_big,
            self.c_prime,
            self.c2,
            self.c1,
            self.c0,
            self.c0_prime,
            self.cq,
        ];
        if all.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::invalid(format!("constants must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// `e^x`, returning 0 below −700 and saturating at `f64::MAX`.
pub fn safe_exp(x: f64) -> f64 {
    if x < -700.0 {
        0.0
    } else {
        x.exp().min(f64::MAX)
    }
}

/// `log(e^a + e^b)`
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `κ = √(m/(64nk))`
pub fn default_kappa(n: u64, m: u64, k: u64) -> f64 {
    (m as f64 / (64.0 * n as f64 * k as f64)).sqrt()
}

/// `m(n−m)·log(C₂/δ)`, the logarithm of the size of a δ-net of rank-m
/// projections of ℝⁿ.
pub fn net_cardinality_log(n: u64, m: u64, delta: f64, c2: f64) -> Result<f64> {
    if m > n {
        return Err(Error::invalid(format!("rank m={m} exceeds n={n}")));
    }
    if !(delta > 0.0 && delta < c2) {
        return Err(Error::invalid(format!("need 0 < δ < C₂, got δ={delta}, C₂={c2}")));
    }
    Ok(m as f64 * (n - m) as f64 * (c2 / delta).ln())
}

/// One displayed inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Check {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs <= rhs,
        }
    }

    /// `lhs ≤ rhs` with the relative slack used for equalities that hold by
    /// construction.
    fn le_slack(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs <= rhs * (1.0 + EQUALITY_SLACK),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub log_omega1: f64,
    /// `N·e^{−9n/32}`
    pub omega1_bound: f64,
    /// `log[C(N,ℓ)(2e)^ℓ e^{−κ²mℓ/32}]`
    pub log_single_term: f64,
    /// `log` of the single-quotient bound, first term plus the above.
    pub log_single_bound: f64,
    pub single_bound: f64,
    /// `m(n−m)log(C₂/δ)`
    pub log_net_cardinality: f64,
    /// `log` of the many-quotient (union) bound.
    pub log_union_bound: f64,
    pub union_bound: f64,
    /// `mn log n − κ²mN/128`, the closed-form upper estimate of the second
    /// union term.
    pub log_union_simplified: f64,
    /// Minimum of the three k-terms times the leading constant.
    pub kmax: f64,
    pub kmax_terms: Vec<f64>,
    /// The k-bound forced by the explicit constant conditions.
    pub kmax_explicit: f64,
    /// Largest leading constant for which `kmax ≤ kmax_explicit`.
    pub c1_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDetails {
    pub q: f64,
    /// `q/(q−1)`
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub beta_limit: f64,
    pub gamma_limit: f64,
    /// The proof covers q > 4.
    pub proof_regime: bool,
    pub default_n_blocks: bool,
    /// `c₀·min{m₀/(n^β (log n)^{γ−½}), m₀²/(n^{2β}(log n)^{2γ})}`
    pub proposition_bound: f64,
    pub proposition_terms: Vec<f64>,
    /// `c_q·m₀/(n^{1−η}(log n)^{(1−2η)/3})` with `η = (q−2)/(2q+2)`; only
    /// evaluated on request since it is not established here.
    pub unproven_eta: Option<f64>,
    pub unproven_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCertificate {
    pub n: u64,
    pub m0: u64,
    #[serde(rename = "N")]
    pub n_blocks: u64,
    pub k: u64,
    pub q: Option<f64>,
    pub constants: Constants,
    pub kappa: f64,
    pub ell: u64,
    pub delta: f64,
    /// Conditions whose conjunction is `feasible`.
    pub checks: Vec<Check>,
    /// Conditions that depend on the explicit values of the constants or
    /// that record hypothesis ranges; they do not enter `feasible`.
    pub diagnostics: Vec<Check>,
    pub feasible: bool,
    pub bounds: Bounds,
    pub q_details: Option<QDetails>,
}

impl ParamCertificate {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().chain(&self.diagnostics).find(|c| c.name == name)
    }

    /// Two-column text table: condition, status or value.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("n".into(), self.n.to_string()),
            ("m0".into(), self.m0.to_string()),
            ("N".into(), self.n_blocks.to_string()),
            ("k".into(), self.k.to_string()),
        ];
        if let Some(q) = self.q {
            rows.push(("q".into(), fmt_num(q)));
        }
        rows.push(("kappa".into(), fmt_num(self.kappa)));
        rows.push(("ell".into(), self.ell.to_string()));
        rows.push(("delta".into(), fmt_num(self.delta)));
        for c in &self.checks {
            rows.push((c.name.clone(), status(c)));
        }
        for c in &self.diagnostics {
            rows.push((format!("{} (constant-dependent)", c.name), status(c)));
        }
        let b = &self.bounds;
        rows.push(("kmax".into(), fmt_num(b.kmax)));
        for (i, t) in b.kmax_terms.iter().enumerate() {
            rows.push((format!("kmax term {}", i + 1), fmt_num(*t)));
        }
        rows.push(("kmax explicit".into(), fmt_num(b.kmax_explicit)));
        rows.push(("c1 max".into(), fmt_num(b.c1_max)));
        rows.push(("log omega1 bound".into(), fmt_num(b.log_omega1)));
        rows.push(("log single-quotient bound".into(), fmt_num(b.log_single_bound)));
        rows.push(("log net cardinality".into(), fmt_num(b.log_net_cardinality)));
        rows.push(("log union bound".into(), fmt_num(b.log_union_bound)));
        rows.push(("log union (simplified)".into(), fmt_num(b.log_union_simplified)));
        if let Some(d) = &self.q_details {
            rows.push(("p".into(), fmt_num(d.p)));
            rows.push(("beta".into(), fmt_num(d.beta)));
            rows.push(("gamma".into(), fmt_num(d.gamma)));
            rows.push(("q > 4".into(), d.proof_regime.to_string()));
            rows.push(("proposition bound".into(), fmt_num(d.proposition_bound)));
            if let Some(u) = d.unproven_bound {
                rows.push(("unproven eta bound".into(), fmt_num(u)));
            }
        }
        rows.push(("feasible".into(), self.feasible.to_string()));
        let width = rows.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (a, b) in rows {
            let pad = width - a.chars().count();
            let _ = writeln!(out, "{a}{}  {b}", " ".repeat(pad));
        }
        out
    }
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e6 || x.abs() < 1e-3) {
        format!("{x:.6e}")
    } else {
        format!("{x:.6}")
    }
}

fn status(c: &Check) -> String {
    format!(
        "{} ({} <= {})",
        if c.pass { "pass" } else { "FAIL" },
        fmt_num(c.lhs),
        fmt_num(c.rhs)
    )
}

fn validate_order(n: u64, m0: u64, n_blocks: u64, k: u64) -> Result<()> {
    if k < 1 {
        return Err(Error::precondition("violated 1 ≤ k"));
    }
    if k > m0 {
        return Err(Error::precondition(format!("violated k ≤ m0 (k={k}, m0={m0})")));
    }
    if m0 > n {
        return Err(Error::precondition(format!("violated m0 ≤ n (m0={m0}, n={n})")));
    }
    if (n as u128) > (k as u128) * (n_blocks as u128) {
        return Err(Error::precondition(format!(
            "violated n ≤ kN (n={n}, k={k}, N={n_blocks})"
        )));
    }
    if n < 2 {
        return Err(Error::precondition("n ≥ 2 is needed for log n > 0"));
    }
    Ok(())
}

struct Common {
    ell: u64,
    delta: f64,
    bounds: Bounds,
}

/// Probability bounds and explicit-constant k-bound shared by both modes.
fn common(n: u64, m: u64, n_blocks: u64, kappa: f64, kmax_terms: Vec<f64>, lead: f64, c: &Constants) -> Result<Common> {
    let (nf, mf, big_n) = (n as f64, m as f64, n_blocks as f64);
    let (ln_n, ln_big_n) = (nf.ln(), big_n.ln());
    let ell = n_blocks.div_ceil(3);
    let delta = 1.0 / (8.0 * nf.sqrt());
    let log_omega1 = ln_big_n - 9.0 * nf / 32.0;
    let ellf = ell as f64;
    let log_single_term =
        ln_choose(big_n, ellf) + ellf * (2.0 * std::f64::consts::E).ln() - kappa * kappa * mf * ellf / 32.0;
    let log_single_bound = log_add_exp(log_omega1, log_single_term);
    let log_net_cardinality = net_cardinality_log(n, m, delta, c.c2)?;
    let log_union_bound = log_add_exp(log_omega1, log_net_cardinality + log_single_term);
    let log_union_simplified = mf * nf * ln_n - kappa * kappa * mf * big_n / 128.0;
    let min_term = kmax_terms.iter().copied().fold(f64::INFINITY, f64::min);
    let kmax_explicit = [
        mf / (8.0 * c.c_prime * nf.sqrt()),
        mf * mf / (64.0 * c.c_prime * c.c_prime * nf * ln_big_n),
        mf * big_n / (16384.0 * nf * nf * ln_n),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    Ok(Common {
        ell,
        delta,
        bounds: Bounds {
            log_omega1,
            omega1_bound: safe_exp(log_omega1),
            log_single_term,
            log_single_bound,
            single_bound: safe_exp(log_single_bound),
            log_net_cardinality,
            log_union_bound,
            union_bound: safe_exp(log_union_bound),
            log_union_simplified,
            kmax: lead * min_term,
            kmax_terms,
            kmax_explicit,
            c1_max: kmax_explicit / min_term,
        },
    })
}

/// Conditions shared by both modes that depend on the explicit constants.
fn explicit_checks(n: u64, m: u64, n_blocks: u64, k: u64, kappa: f64, c: &Constants) -> Vec<Check> {
    let (nf, mf, kf, big_n) = (n as f64, m as f64, k as f64, n_blocks as f64);
    let (ln_n, ln_big_n) = (nf.ln(), big_n.ln());
    vec![
        Check::le(
            "kappa_lower_explicit",
            c.c_prime * (kf.max(ln_big_n) / mf).sqrt(),
            kappa,
        ),
        Check::le("net_exponent", 256.0 * mf * nf * ln_n, kappa * kappa * mf * big_n),
        Check::le("cprime_consistent", 20f64.max(2.0 * (c.c0_big + 4.0)), c.c_prime),
        Check::le("m_ge_16k", 16.0 * kf, mf),
    ]
}

/// Evaluates the constraint system of the ℓ₁-sum construction at `m = m0`
/// with `κ = √(m0/(64nk))`.
pub fn certify_params(n: u64, m0: u64, n_blocks: u64, k: u64, constants: &Constants) -> Result<ParamCertificate> {
    validate_order(n, m0, n_blocks, k)?;
    constants.validate()?;
    let c = constants;
    let (nf, mf, kf, big_n) = (n as f64, m0 as f64, k as f64, n_blocks as f64);
    let (ln_n, ln_big_n) = (nf.ln(), big_n.ln());
    let kappa = default_kappa(n, m0, k);
    let terms = vec![
        mf / nf.sqrt(),
        mf * mf / (nf * ln_big_n),
        mf * big_n / (nf * nf * ln_n),
    ];
    let com = common(n, m0, n_blocks, kappa, terms, c.c1, c)?;
    let checks = vec![
        Check::le("k_le_kmax", kf, com.bounds.kmax),
        Check::le_slack(
            "cube_in_ball",
            2.0 * kappa,
            (mf / nf).sqrt() / (4.0 * kf.sqrt()),
        ),
        Check::le("kappa_le_1", kappa, 1.0),
        Check::le("log_n_blocks", 8.0 * ln_big_n, nf),
    ];
    let mut diagnostics = explicit_checks(n, m0, n_blocks, k, kappa, c);
    diagnostics.extend([
        Check::le("n_blocks_lower", nf * ln_n, big_n),
        Check::le("n_blocks_upper", big_n, nf.powf(1.5) * ln_n),
        Check::le(
            "m0_lower",
            (nf * ln_n).sqrt().max(nf * nf * ln_n / big_n),
            mf,
        ),
        Check::le("net_simplification", com.bounds.log_net_cardinality, mf * nf * ln_n),
    ]);
    let feasible = checks.iter().all(|c| c.pass);
    Ok(ParamCertificate {
        n,
        m0,
        n_blocks,
        k,
        q: None,
        constants: *c,
        kappa,
        ell: com.ell,
        delta: com.delta,
        checks,
        diagnostics,
        feasible,
        bounds: com.bounds,
        q_details: None,
    })
}

/// `(p, β, γ)` for a cotype exponent q.
pub fn q_exponents(q: f64) -> (f64, f64, f64) {
    (q / (q - 1.0), (q + 2.0) / (2.0 * q - 2.0), (q + 1.0) / (2.0 * q - 2.0))
}

/// `⌈(n^{3/2} log n)^p⌉`
pub fn default_n_blocks_q(n: u64, q: f64) -> Result<u64> {
    let nf = n as f64;
    let (p, _, _) = q_exponents(q);
    let v = (nf.powf(1.5) * nf.ln()).powf(p).ceil();
    if !(v >= 1.0 && v < u64::MAX as f64) {
        return Err(Error::invalid(format!("default N = {v} does not fit in 64 bits")));
    }
    Ok(v as u64)
}

/// Evaluates the ℓ_p-sum constraint system with `κ = √(m0/(64nk))·N^{−1/q}`.
/// `n_blocks = None` selects `N = ⌈(n^{3/2} log n)^p⌉`.
pub fn certify_params_q(
    n: u64,
    m0: u64,
    n_blocks: Option<u64>,
    k: u64,
    q: f64,
    constants: &Constants,
    unproven: bool,
) -> Result<ParamCertificate> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(Error::precondition(format!("violated q > 2 (q={q})")));
    }
    if n < 2 {
        return Err(Error::precondition("n ≥ 2 is needed for log n > 0"));
    }
    let default_n_blocks = n_blocks.is_none();
    let n_blocks = match n_blocks {
        Some(v) => v,
        None => default_n_blocks_q(n, q)?,
    };
    validate_order(n, m0, n_blocks, k)?;
    constants.validate()?;
    let c = constants;
    let (nf, mf, kf, big_n) = (n as f64, m0 as f64, k as f64, n_blocks as f64);
    let (ln_n, ln_big_n) = (nf.ln(), big_n.ln());
    let (p, beta, gamma) = q_exponents(q);
    let kappa = default_kappa(n, m0, k) * big_n.powf(-1.0 / q);
    let terms = vec![
        mf * big_n.powf(1.0 - 2.0 / q) / (nf * nf * ln_n),
        mf / (nf.sqrt() * big_n.powf(1.0 / q)),
        mf * mf / (nf * big_n.powf(2.0 / q) * ln_big_n),
    ];
    let com = common(n, m0, n_blocks, kappa, terms, c.c0_prime, c)?;
    let checks = vec![
        Check::le("k_le_kmax_q", kf, com.bounds.kmax),
        Check::le_slack(
            "cube_in_ball_q",
            (big_n - 1.0).powf(1.0 / q) * 2.0 * kappa,
            (mf / nf).sqrt() / (4.0 * kf.sqrt()),
        ),
        Check::le("kappa_le_1", kappa, 1.0),
        Check::le("log_n_blocks", 8.0 * ln_big_n, nf),
    ];
    let mut diagnostics = explicit_checks(n, m0, n_blocks, k, kappa, c);
    diagnostics.push(Check::le(
        "kappa_lower_q",
        c.c0_big * (nf * ln_n / big_n).max(kf / mf).max(ln_big_n / mf),
        kappa * kappa,
    ));
    let proposition_terms = vec![
        mf / (nf.powf(beta) * ln_n.powf(gamma - 0.5)),
        mf * mf / (nf.powf(2.0 * beta) * ln_n.powf(2.0 * gamma)),
    ];
    let proposition_bound = c.c0 * proposition_terms[0].min(proposition_terms[1]);
    diagnostics.push(Check::le("m0_lower_q", nf.powf(beta) * ln_n.powf(gamma), mf));
    diagnostics.push(Check::le("k_le_proposition_bound", kf, proposition_bound));
    let (unproven_eta, unproven_bound) = if unproven {
        let eta = (q - 2.0) / (2.0 * q + 2.0);
        let b = c.cq * mf / (nf.powf(1.0 - eta) * ln_n.powf((1.0 - 2.0 * eta) / 3.0));
        (Some(eta), Some(b))
    } else {
        (None, None)
    };
    let feasible = checks.iter().all(|c| c.pass);
    Ok(ParamCertificate {
        n,
        m0,
        n_blocks,
        k,
        q: Some(q),
        constants: *c,
        kappa,
        ell: com.ell,
        delta: com.delta,
        checks,
        diagnostics,
        feasible,
        bounds: com.bounds,
        q_details: Some(QDetails {
            q,
            p,
            beta,
            gamma,
            beta_limit: 0.5,
            gamma_limit: 0.5,
            proof_regime: q > 4.0,
            default_n_blocks,
            proposition_bound,
            proposition_terms,
            unproven_eta,
            unproven_bound,
        }),
    })
}
