//! Second, self-contained evaluation of the parameter constraint systems.
//!
//! Written directly from the displayed inequalities, without reusing any
//! of the library's arithmetic. Shared by the core params tests and the
//! acceptance runner through `#[path]`.

#![allow(dead_code)]

use satbody_core::params::{Constants, ParamCertificate};
use statrs::function::factorial::ln_binomial;

/// Relative tolerance for comparing real-valued fields.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Oracle {
    pub kappa: f64,
    pub ell: u64,
    pub delta: f64,
    pub gating: Vec<(&'static str, bool)>,
    pub diagnostics: Vec<(&'static str, bool)>,
    pub feasible: bool,
    pub kmax: f64,
    pub kmax_terms: Vec<f64>,
    pub log_omega1: f64,
    pub log_single_term: f64,
    pub log_net: f64,
    pub log_union: f64,
    /// Sum of the magnitudes of the terms in the single-quotient exponent;
    /// the exponent itself can cancel far below them.
    pub log_scale: f64,
    pub exponents: Option<(f64, f64, f64)>,
    pub n_blocks: u64,
}

fn ln_sum(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn min3(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Returns `None` when the tuple violates the ordering preconditions.
pub fn evaluate(n: u64, m0: u64, blocks: Option<u64>, k: u64, q: Option<f64>, c: &Constants) -> Option<Oracle> {
    if n < 2 || k == 0 {
        return None;
    }
    if let Some(q) = q {
        if q <= 2.0 {
            return None;
        }
    }
    let nn = n as f64;
    let ln_n = nn.ln();
    let big = match (blocks, q) {
        (Some(b), _) => b,
        (None, Some(q)) => {
            let p = q / (q - 1.0);
            let v = (nn.powf(1.5) * ln_n).powf(p).ceil();
            if v >= u64::MAX as f64 {
                return None;
            }
            v as u64
        }
        (None, None) => return None,
    };
    if k > m0 || m0 > n || (n as u128) > (k as u128) * (big as u128) {
        return None;
    }
    let (m, kk, bb) = (m0 as f64, k as f64, big as f64);
    let ln_b = bb.ln();

    // κ² first, then κ
    let mut kappa_sq = m / (64.0 * nn * kk);
    if let Some(q) = q {
        kappa_sq *= bb.powf(-2.0 / q);
    }
    let kappa = kappa_sq.sqrt();
    let ell = (big + 2) / 3;
    let delta = 0.125 / nn.sqrt();

    let log_omega1 = ln_b - 9.0 * nn / 32.0;
    let l = ell as f64;
    let ln_c = ln_binomial(big, ell);
    let decay = kappa_sq * m * l / 32.0;
    let log_single_term = ln_c + l * (1.0 + 2f64.ln()) - decay;
    let log_scale = ln_c + l * (1.0 + 2f64.ln()) + decay + log_net_scale(n, m0, c.c2);
    let log_net = (m0 * (n - m0)) as f64 * (c.c2 * 8.0 * nn.sqrt()).ln();
    let log_union = ln_sum(log_omega1, log_net + log_single_term);

    let cube_rhs = 0.25 * (m / (nn * kk)).sqrt();
    let (kmax_terms, lead, cube_lhs) = match q {
        None => (
            vec![m / nn.sqrt(), m * m / (nn * ln_b), m * bb / (nn * nn * ln_n)],
            c.c1,
            2.0 * kappa,
        ),
        Some(q) => (
            vec![
                m * bb.powf(1.0 - 2.0 / q) / (nn * nn * ln_n),
                m / (nn.sqrt() * bb.powf(1.0 / q)),
                m * m / (nn * bb.powf(2.0 / q) * ln_b),
            ],
            c.c0_prime,
            2.0 * kappa * (bb - 1.0).powf(1.0 / q),
        ),
    };
    let kmax = lead * min3(&kmax_terms);
    let cube_name = if q.is_some() { "cube_in_ball_q" } else { "cube_in_ball" };
    let kmax_name = if q.is_some() { "k_le_kmax_q" } else { "k_le_kmax" };
    let gating = vec![
        (kmax_name, kk <= kmax),
        (cube_name, cube_lhs <= cube_rhs * (1.0 + 1e-12)),
        ("kappa_le_1", kappa <= 1.0),
        ("log_n_blocks", 8.0 * ln_b <= nn),
    ];
    let feasible = gating.iter().all(|g| g.1);

    let mut diagnostics = vec![
        ("kappa_lower_explicit", c.c_prime * (kk.max(ln_b) / m).sqrt() <= kappa),
        ("net_exponent", 256.0 * m * nn * ln_n <= kappa_sq * m * bb),
        ("cprime_consistent", 20f64.max(2.0 * c.c0_big + 8.0) <= c.c_prime),
        ("m_ge_16k", 16.0 * kk <= m),
    ];
    let exponents = match q {
        None => {
            diagnostics.push(("n_blocks_lower", nn * ln_n <= bb));
            diagnostics.push(("n_blocks_upper", bb <= nn * nn.sqrt() * ln_n));
            diagnostics.push(("m0_lower", (nn * ln_n).sqrt().max(nn * nn * ln_n / bb) <= m));
            diagnostics.push(("net_simplification", log_net <= m * nn * ln_n));
            None
        }
        Some(q) => {
            let lower = [nn * ln_n / bb, kk / m, ln_b / m];
            diagnostics.push(("kappa_lower_q", c.c0_big * lower.iter().cloned().fold(0.0, f64::max) <= kappa_sq));
            let beta = (q + 2.0) / (2.0 * q - 2.0);
            let gamma = (q + 1.0) / (2.0 * q - 2.0);
            let prop = c.c0
                * (m / (nn.powf(beta) * ln_n.powf(gamma - 0.5)))
                    .min(m * m / (nn.powf(2.0 * beta) * ln_n.powf(2.0 * gamma)));
            diagnostics.push(("m0_lower_q", nn.powf(beta) * ln_n.powf(gamma) <= m));
            diagnostics.push(("k_le_proposition_bound", kk <= prop));
            Some((q / (q - 1.0), beta, gamma))
        }
    };
    Some(Oracle {
        kappa,
        ell,
        delta,
        gating,
        diagnostics,
        feasible,
        kmax,
        kmax_terms,
        log_omega1,
        log_single_term,
        log_net,
        log_union,
        log_scale,
        exponents,
        n_blocks: big,
    })
}

fn log_net_scale(n: u64, m0: u64, c2: f64) -> f64 {
    ((m0 * (n - m0)) as f64 * (c2 * 8.0 * (n as f64).sqrt()).ln()).abs()
}

fn close_at(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= REL_TOL * scale.max(a.abs()).max(b.abs()).max(1.0)
}

fn close(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Every disagreement between a certificate and the oracle, as text.
pub fn mismatches(cert: &ParamCertificate, o: &Oracle) -> Vec<String> {
    let mut out = Vec::new();
    let mut num = |name: &str, a: f64, b: f64| {
        if !close(a, b) {
            out.push(format!("{name}: {a} vs {b}"));
        }
    };
    let b = &cert.bounds;
    num("kappa", cert.kappa, o.kappa);
    num("delta", cert.delta, o.delta);
    num("kmax", b.kmax, o.kmax);
    num("log_omega1", b.log_omega1, o.log_omega1);
    num("log_net_cardinality", b.log_net_cardinality, o.log_net);
    for (i, (x, y)) in b.kmax_terms.iter().zip(&o.kmax_terms).enumerate() {
        num(&format!("kmax_terms[{i}]"), *x, *y);
    }
    for (name, a, e) in [
        ("log_single_term", b.log_single_term, o.log_single_term),
        ("log_union_bound", b.log_union_bound, o.log_union),
    ] {
        if !close_at(a, e, o.log_scale) {
            out.push(format!("{name}: {a} vs {e}"));
        }
    }
    if cert.ell != o.ell {
        out.push(format!("ell: {} vs {}", cert.ell, o.ell));
    }
    if cert.n_blocks != o.n_blocks {
        out.push(format!("N: {} vs {}", cert.n_blocks, o.n_blocks));
    }
    if cert.feasible != o.feasible {
        out.push(format!("feasible: {} vs {}", cert.feasible, o.feasible));
    }
    for (list, expected) in [(&cert.checks, &o.gating), (&cert.diagnostics, &o.diagnostics)] {
        if list.len() != expected.len() {
            out.push(format!("check count: {} vs {}", list.len(), expected.len()));
        }
        for (name, pass) in expected {
            match list.iter().find(|c| c.name == *name) {
                Some(c) if c.pass == *pass => {}
                Some(c) => out.push(format!("{name}: {} vs {pass}", c.pass)),
                None => out.push(format!("{name}: missing")),
            }
        }
    }
    match (&cert.q_details, o.exponents) {
        (None, None) => {}
        (Some(d), Some((p, beta, gamma))) => {
            if d.p != p || d.beta != beta || d.gamma != gamma {
                out.push(format!("exponents: {:?} vs {:?}", (d.p, d.beta, d.gamma), (p, beta, gamma)));
            }
        }
        _ => out.push("q details presence differs".into()),
    }
    out
}
