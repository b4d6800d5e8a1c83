//! Closed-form redundancy bounds in terms of a known symbol probability,
//! with optimal-depth selection and the threshold constants they rely on.

use std::sync::OnceLock;

use serde::Serialize;

use crate::dist::binary_entropy;
use crate::{Error, Result};

/// Which bound a [`BoundValue`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundId {
    #[serde(rename = "r_max")]
    RMax,
    #[serde(rename = "r_ub")]
    RUb,
    #[serde(rename = "f_p1")]
    FP1,
    #[serde(rename = "r_min")]
    RMin,
    #[serde(rename = "r_min_pN")]
    RMinPN,
    #[serde(rename = "r_min_D")]
    RMinD,
}

impl BoundId {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::RMax => "r_max",
            BoundId::RUb => "r_ub",
            BoundId::FP1 => "f_p1",
            BoundId::RMin => "r_min",
            BoundId::RMinPN => "r_min_pN",
            BoundId::RMinD => "r_min_D",
        }
    }
}

/// An evaluated bound: the value, the depth that attains it (for the
/// lower bounds), and which piecewise branch fired.
#[derive(Debug, Clone, Serialize)]
pub struct BoundValue {
    pub bound: BoundId,
    pub p: f64,
    pub radix: u32,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_m: Option<u32>,
    pub branch: &'static str,
}

/// Threshold constants shared by the bounds. `pi0` is the smallest root
/// of 1 + p − H(p) = 1/2; `pi1` solves 3 − 5x − H(2x) = gamma;
/// `gamma` = 4/3 − H(1/3); `mid_p1_cap` = 1 − H(pi0) + pi0/2 caps the
/// redundancy when the top probability is in neither extreme regime;
/// `betas[k]` separates the regions where the optimal backbone depth is
/// k from k+1 (`betas[0]` = 1 by convention).
#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub pi0: f64,
    pub pi1: f64,
    pub gamma: f64,
    pub mid_p1_cap: f64,
    pub betas: Vec<f64>,
}

fn check_open_unit(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) || !p.is_finite() {
        return Err(Error::OutOfRange {
            name,
            value: p,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// Largest possible Huffman redundancy when some symbol has probability
/// `p`: 1 + p − H(p) below 1/2, and 2 − p − H(p) from 1/2 up.
pub fn r_max(p: f64) -> Result<BoundValue> {
    check_open_unit("p", p)?;
    let (value, branch) = if p < 0.5 {
        (1.0 + p - binary_entropy(p), "1+p-H(p)")
    } else {
        (2.0 - p - binary_entropy(p), "2-p-H(p)")
    };
    Ok(BoundValue {
        bound: BoundId::RMax,
        p,
        radix: 2,
        value,
        witness_m: None,
        branch,
    })
}

/// Earlier three-branch upper bound: flat at 1/2 between `pi0` and 1/2,
/// matching [`r_max`] outside that window.
pub fn r_ub(p: f64) -> Result<BoundValue> {
    check_open_unit("p", p)?;
    let pi0 = constants().pi0;
    let (value, branch) = if p <= pi0 {
        (1.0 + p - binary_entropy(p), "1+p-H(p)")
    } else if p < 0.5 {
        (0.5, "1/2")
    } else {
        (2.0 - p - binary_entropy(p), "2-p-H(p)")
    };
    Ok(BoundValue {
        bound: BoundId::RUb,
        p,
        radix: 2,
        value,
        witness_m: None,
        branch,
    })
}

/// Upper bound in terms of the largest probability `p1`: flat at `gamma`
/// up to `pi1`, then 3 − 5·p1 − H(2·p1), then 2 − p1 − H(p1) beyond 1/2.
pub fn f_p1(p1: f64) -> Result<BoundValue> {
    check_open_unit("p1", p1)?;
    let c = constants();
    let (value, branch) = if p1 >= 0.5 {
        (2.0 - p1 - binary_entropy(p1), "2-p1-H(p1)")
    } else if p1 >= c.pi1 {
        (3.0 - 5.0 * p1 - binary_entropy(2.0 * p1), "3-5p1-H(2p1)")
    } else {
        (c.gamma, "gamma")
    };
    Ok(BoundValue {
        bound: BoundId::FP1,
        p: p1,
        radix: 2,
        value,
        witness_m: None,
        branch,
    })
}

/// One depth level of the anchored-backbone lower bound:
/// m·p − H_D(p) − (1−p)·log_D(1 − D^(−m)).
pub(crate) fn depth_term(p: f64, m: u32, radix: u32) -> f64 {
    let scale = (radix as f64).log2();
    let tail = (1.0 - (radix as f64).powi(-(m as i32))).log2() / scale;
    m as f64 * p - binary_entropy(p) / scale - (1.0 - p) * tail
}

/// Candidate depths ⌊−log_D p⌋ and ⌈−log_D p⌉, clamped to m ≥ 1.
fn depth_candidates(p: f64, radix: u32) -> Vec<u32> {
    let t = -p.log2() / (radix as f64).log2();
    let lo = t.floor() as i64;
    let hi = t.ceil() as i64;
    let mut out = Vec::new();
    for m in [lo, hi] {
        if m >= 1 && !out.contains(&(m as u32)) {
            out.push(m as u32);
        }
    }
    if out.is_empty() {
        out.push(1);
    }
    out
}

fn best_depth(p: f64, radix: u32) -> (f64, u32, &'static str) {
    let cands = depth_candidates(p, radix);
    let mut best = (f64::INFINITY, 0u32);
    for &m in &cands {
        let v = depth_term(p, m, radix);
        if v < best.0 {
            best = (v, m);
        }
    }
    let branch = if best.1 == cands[0] && cands.len() > 1 {
        "floor"
    } else if cands.len() > 1 {
        "ceil"
    } else if (-p.log2() / (radix as f64).log2()) < 1.0 {
        "ceil"
    } else {
        "floor"
    };
    (best.0, best.1, branch)
}

/// Smallest possible Huffman redundancy when some symbol has probability
/// `p`, taking the better of the two candidate backbone depths.
pub fn r_min(p: f64) -> Result<BoundValue> {
    check_open_unit("p", p)?;
    let (value, m, branch) = best_depth(p, 2);
    Ok(BoundValue {
        bound: BoundId::RMin,
        p,
        radix: 2,
        value,
        witness_m: Some(m),
        branch,
    })
}

/// Radix-`radix` generalization of [`r_min`].
pub fn r_min_d(p: f64, radix: u32) -> Result<BoundValue> {
    check_open_unit("p", p)?;
    if radix < 2 {
        return Err(Error::BadRadix(radix));
    }
    let (value, m, branch) = best_depth(p, radix);
    Ok(BoundValue {
        bound: BoundId::RMinD,
        p,
        radix,
        value,
        witness_m: Some(m),
        branch,
    })
}

/// Smallest possible Huffman redundancy when the *least likely* symbol
/// has probability `p` ∈ (0, 1/2]. Minimum of two families: the backbone
/// anchored at `p` with depth ⌊−log p⌋ (the feasible depth, since the
/// remaining leaf weight must stay ≥ p), and the backbone anchored at a
/// merged pair of weight 2p with depth ⌈−log 2p⌉.
pub fn r_min_pn(p: f64) -> Result<BoundValue> {
    if !(p > 0.0 && p <= 0.5) || !p.is_finite() {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "(0, 0.5]",
        });
    }
    let m1 = ((-p.log2()).floor() as u32).max(1);
    let single = depth_term(p, m1, 2);
    let q = 2.0 * p;
    let m2 = ((-q.log2()).ceil() as u32).max(1);
    let paired = depth_term(q, m2, 2);
    let (value, m, branch) = if single <= paired {
        (single, m1, "min-symbol")
    } else {
        (paired, m2, "merged-pair")
    };
    Ok(BoundValue {
        bound: BoundId::RMinPN,
        p,
        radix: 2,
        value,
        witness_m: Some(m),
        branch,
    })
}

/// β_k, the probability below which the optimal backbone depth moves
/// from k to k+1. β₀ is 1 by convention.
pub fn beta(k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let c = (1.0 + 1.0 / ((2f64.powi(k as i32 + 1)) - 2.0)).log2();
    1.0 / (1.0 + 1.0 / c)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(
        f_lo * f(hi) < 0.0,
        "bracket [{lo}, {hi}] does not straddle a root"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-10 {
            return mid;
        }
        if f(mid) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The shared threshold constants, computed once.
pub fn constants() -> &'static Constants {
    static CONSTANTS: OnceLock<Constants> = OnceLock::new();
    CONSTANTS.get_or_init(|| {
        let gamma = 4.0 / 3.0 - binary_entropy(1.0 / 3.0);
        let pi0 = bisect(|p| 1.0 + p - binary_entropy(p) - 0.5, 0.1, 0.25);
        let pi1 = bisect(
            |x| 3.0 - 5.0 * x - binary_entropy(2.0 * x) - gamma,
            0.45,
            0.4999,
        );
        let mid_p1_cap = 1.0 - binary_entropy(pi0) + pi0 / 2.0;
        let betas = (0..=8).map(beta).collect();
        Constants {
            pi0,
            pi1,
            gamma,
            mid_p1_cap,
            betas,
        }
    })
}
