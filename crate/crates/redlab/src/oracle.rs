//! Brute-force and numerical verifiers for the closed-form results.
//!
//! Everything here recomputes claims from first principles: exhaustive
//! rational-grid searches for extremal redundancy, a projected-descent
//! minimizer for the depth-m objective, and exhaustive checks of the
//! shallow-codeword and level-equalization properties.

use crate::dist::ProbabilityMultiset;
use crate::huffman::{build_huffman, redundancy};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

/// Search direction over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    #[serde(rename = "MIN")]
    Min,
    #[serde(rename = "MAX")]
    Max,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMode::Min => write!(f, "MIN"),
            SearchMode::Max => write!(f, "MAX"),
        }
    }
}

/// How the designated symbol participates in each candidate multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchConstraint {
    #[serde(rename = "CONTAINS_P")]
    ContainsP,
    #[serde(rename = "MIN_IS_P")]
    MinIsP,
    #[serde(rename = "MAX_IS_P")]
    MaxIsP,
}

impl fmt::Display for SearchConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchConstraint::ContainsP => write!(f, "CONTAINS_P"),
            SearchConstraint::MinIsP => write!(f, "MIN_IS_P"),
            SearchConstraint::MaxIsP => write!(f, "MAX_IS_P"),
        }
    }
}

/// Guardrails for a search run. `Default` gives the desk-scale limits.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_q: u32,
    pub max_n: usize,
    pub instance_cap: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_q: 64,
            max_n: 7,
            instance_cap: 100_000_000,
        }
    }
}

/// Outcome of one exhaustive grid search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub mode: SearchMode,
    pub constraint: SearchConstraint,
    pub p_num: u32,
    pub q: u32,
    pub n_max: usize,
    pub value: f64,
    /// Grid numerators of the extremal distribution, nonincreasing.
    pub witness: Vec<u32>,
    pub examined: u64,
}

impl SearchReport {
    pub fn witness_dist(&self) -> ProbabilityMultiset {
        let q = f64::from(self.q);
        let probs: Vec<f64> = self.witness.iter().map(|&k| f64::from(k) / q).collect();
        ProbabilityMultiset::new(&probs).expect("witness is a valid distribution")
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.witness.iter().map(|k| format!("{k}")).collect();
        write!(
            f,
            "{} {} p={}/{} N<={}: value={:.9} witness={{{}}}/{} examined={}",
            self.mode,
            self.constraint,
            self.p_num,
            self.q,
            self.n_max,
            self.value,
            parts.join(","),
            self.q,
            self.examined
        )
    }
}

/// Counts partitions of `n` into at most `slots` parts, each within
/// `[lo, cap]`, without enumerating them.
fn count_partitions(
    n: u32,
    cap: u32,
    slots: usize,
    lo: u32,
    memo: &mut HashMap<(u32, u32, usize), u128>,
) -> u128 {
    if n == 0 {
        return 1;
    }
    if slots == 0 || cap < lo || n < lo {
        return 0;
    }
    let key = (n, cap, slots);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let mut total = 0u128;
    let hi = cap.min(n);
    for c in lo..=hi {
        total += count_partitions(n - c, c, slots - 1, lo, memo);
    }
    memo.insert(key, total);
    total
}

/// Visits partitions of `n` into at most `slots` parts within `[lo, cap]`,
/// largest part first, in lexicographically descending order.
fn visit_partitions<F: FnMut(&[u32])>(
    n: u32,
    cap: u32,
    slots: usize,
    lo: u32,
    stack: &mut Vec<u32>,
    visit: &mut F,
) {
    if n == 0 {
        visit(stack);
        return;
    }
    if slots == 0 || cap < lo || n < lo {
        return;
    }
    let hi = cap.min(n);
    for c in (lo..=hi).rev() {
        let rest = n - c;
        if rest > 0 && (slots == 1 || rest < lo || rest as u64 > (slots as u64 - 1) * c as u64) {
            continue;
        }
        stack.push(c);
        visit_partitions(rest, c, slots - 1, lo, stack, visit);
        stack.pop();
    }
}

fn part_bounds(constraint: SearchConstraint, p_num: u32, rem: u32) -> (u32, u32) {
    match constraint {
        SearchConstraint::ContainsP => (1, rem),
        SearchConstraint::MinIsP => (p_num, rem),
        SearchConstraint::MaxIsP => (1, p_num),
    }
}

fn grid_redundancy(parts: &[u32], q: u32) -> f64 {
    let qf = f64::from(q);
    let probs: Vec<f64> = parts.iter().map(|&k| f64::from(k) / qf).collect();
    let dist = ProbabilityMultiset::new(&probs).expect("grid parts form a distribution");
    redundancy(&dist, 2).expect("binary build cannot fail")
}

/// Inserts `p` into a nonincreasing sequence, keeping it nonincreasing.
fn with_p(parts: &[u32], p_num: u32) -> Vec<u32> {
    let mut full = Vec::with_capacity(parts.len() + 1);
    let pos = parts.partition_point(|&k| k >= p_num);
    full.extend_from_slice(&parts[..pos]);
    full.push(p_num);
    full.extend_from_slice(&parts[pos..]);
    full
}

struct LaneResult {
    best: Option<(f64, Vec<u32>)>,
    examined: u64,
}

/// Scans every multiset whose largest non-designated part is `first`.
fn scan_lane(
    first: u32,
    rem: u32,
    slots: usize,
    lo: u32,
    p_num: u32,
    q: u32,
    mode: SearchMode,
) -> LaneResult {
    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut examined = 0u64;
    let rest = rem - first;
    let mut stack = vec![first];
    visit_partitions(rest, first, slots - 1, lo, &mut stack, &mut |parts| {
        let full = with_p(parts, p_num);
        let r = grid_redundancy(&full, q);
        examined += 1;
        let better = match &best {
            None => true,
            Some((b, _)) => match mode {
                SearchMode::Min => r < *b,
                SearchMode::Max => r > *b,
            },
        };
        if better {
            best = Some((r, full));
        }
    });
    LaneResult { best, examined }
}

/// Exhaustively searches the rational grid `k/q` for the distribution of at
/// most `n_max` symbols with extremal Huffman redundancy, subject to the
/// designated symbol `p_num/q` appearing per `constraint`.
///
/// Ties keep the first candidate in the descending-lexicographic enumeration
/// of nonincreasing part sequences, so serial and parallel runs agree.
pub fn search_extremal(
    p_num: u32,
    q: u32,
    n_max: usize,
    mode: SearchMode,
    constraint: SearchConstraint,
) -> Result<SearchReport> {
    search_extremal_with(p_num, q, n_max, mode, constraint, SearchLimits::default())
}

pub fn search_extremal_with(
    p_num: u32,
    q: u32,
    n_max: usize,
    mode: SearchMode,
    constraint: SearchConstraint,
    limits: SearchLimits,
) -> Result<SearchReport> {
    if p_num == 0 || p_num >= q {
        return Err(Error::OutOfRange {
            name: "p_num",
            value: f64::from(p_num),
            range: "[1, q)",
        });
    }
    if q > limits.max_q {
        return Err(Error::GridTooFine(format!(
            "grid denominator {q} exceeds the limit {}",
            limits.max_q
        )));
    }
    if n_max > limits.max_n {
        return Err(Error::GridTooFine(format!(
            "symbol budget {n_max} exceeds the limit {}",
            limits.max_n
        )));
    }
    if n_max < 2 {
        return Err(Error::BadConstraint(
            "at least two symbols are needed once p < 1".into(),
        ));
    }
    let rem = q - p_num;
    let (lo, cap) = part_bounds(constraint, p_num, rem);
    let slots = n_max - 1;
    let mut memo = HashMap::new();
    let instances = count_partitions(rem, cap, slots, lo, &mut memo);
    if instances == 0 {
        return Err(Error::BadConstraint(format!(
            "no {} distribution on the grid has {} symbols or fewer",
            constraint, n_max
        )));
    }
    if instances > u128::from(limits.instance_cap) {
        return Err(Error::GridTooFine(format!(
            "{instances} instances exceed the cap of {}",
            limits.instance_cap
        )));
    }

    let firsts: Vec<u32> = (lo..=cap.min(rem)).rev().collect();
    let lanes: Vec<LaneResult> = firsts
        .par_iter()
        .map(|&first| scan_lane(first, rem, slots, lo, p_num, q, mode))
        .collect();

    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut examined = 0u64;
    for lane in lanes {
        examined += lane.examined;
        if let Some((r, w)) = lane.best {
            let better = match &best {
                None => true,
                Some((b, _)) => match mode {
                    SearchMode::Min => r < *b,
                    SearchMode::Max => r > *b,
                },
            };
            if better {
                best = Some((r, w));
            }
        }
    }
    assert_eq!(examined as u128, instances, "enumeration missed instances");
    let (value, witness) = best.expect("at least one instance was examined");
    let report = SearchReport {
        mode,
        constraint,
        p_num,
        q,
        n_max,
        value,
        witness,
        examined,
    };
    debug_assert!((grid_redundancy(&report.witness, q) - report.value).abs() <= 1e-12);
    Ok(report)
}

/// Outcome of the projected-descent check of the depth-m profile.
#[derive(Debug, Clone, Serialize)]
pub struct KktReport {
    pub m: u32,
    pub alpha_star: Vec<f64>,
    pub alpha: Vec<f64>,
    pub objective_gap: f64,
    pub max_deviation: f64,
    pub iterations_used: u64,
}

fn objective(alpha: &[f64]) -> f64 {
    let mut g = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        g += i as f64 * a;
        if a > 0.0 {
            g += a * a.log2();
        }
    }
    g
}

/// Pool-adjacent-violators projection onto nonincreasing sequences.
fn project_nonincreasing(v: &mut [f64]) {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v.iter() {
        let mut sum = x;
        let mut count = 1usize;
        while let Some(&(ps, pc)) = blocks.last() {
            if ps / (pc as f64) < sum / (count as f64) {
                sum += ps;
                count += pc;
                blocks.pop();
            } else {
                break;
            }
        }
        blocks.push((sum, count));
    }
    let mut idx = 0;
    for (sum, count) in blocks {
        let mean = sum / count as f64;
        for _ in 0..count {
            v[idx] = mean;
            idx += 1;
        }
    }
}

const ALPHA_FLOOR: f64 = 1e-12;
const KKT_TOL: f64 = 1e-7;

/// Minimizes `sum (i-1) a_i - H(a)` over nonincreasing distributions of
/// length `m` by projected gradient descent from the uniform start and
/// compares the result with the closed form `2^(m-i)/(2^m - 1)`.
pub fn kkt_verify(m: u32, iterations: u64, step: f64) -> Result<KktReport> {
    if m < 1 || m > 20 {
        return Err(Error::OutOfRange {
            name: "m",
            value: f64::from(m),
            range: "[1, 20]",
        });
    }
    if !(step > 0.0) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
            range: "(0, inf)",
        });
    }
    let n = m as usize;
    let denom = (2f64).powi(m as i32) - 1.0;
    let alpha_star: Vec<f64> = (1..=n)
        .map(|i| (2f64).powi((m - i as u32) as i32) / denom)
        .collect();
    let g_star = objective(&alpha_star);

    let mut alpha = vec![1.0 / n as f64; n];
    let mut used = 0u64;
    let mut converged_at: Option<(f64, f64)> = None;
    for t in 1..=iterations {
        used = t;
        let scale = step / (t as f64).sqrt();
        for (i, a) in alpha.iter_mut().enumerate() {
            let grad = i as f64 + a.max(ALPHA_FLOOR).log2() + 1.0 / std::f64::consts::LN_2;
            *a -= scale * grad;
        }
        let shift = (1.0 - alpha.iter().sum::<f64>()) / n as f64;
        for a in alpha.iter_mut() {
            *a += shift;
        }
        project_nonincreasing(&mut alpha);
        if alpha.iter().any(|&a| a < ALPHA_FLOOR) {
            for a in alpha.iter_mut() {
                *a = a.max(ALPHA_FLOOR);
            }
            let sum: f64 = alpha.iter().sum();
            for a in alpha.iter_mut() {
                *a /= sum;
            }
        }
        if t % 16 == 0 || t == iterations {
            let dev = alpha
                .iter()
                .zip(&alpha_star)
                .map(|(a, s)| (a - s).abs())
                .fold(0.0f64, f64::max);
            let gap = (objective(&alpha) - g_star).abs();
            if dev < KKT_TOL && gap < KKT_TOL {
                converged_at = Some((dev, gap));
                break;
            }
        }
    }
    let (max_deviation, objective_gap) = match converged_at {
        Some(pair) => pair,
        None => {
            let dev = alpha
                .iter()
                .zip(&alpha_star)
                .map(|(a, s)| (a - s).abs())
                .fold(0.0f64, f64::max);
            let gap = (objective(&alpha) - g_star).abs();
            if dev < 1e-6 && gap < 1e-6 {
                (dev, gap)
            } else {
                return Err(Error::NoConvergence(format!(
                    "m={m}: deviation {dev:.3e}, gap {gap:.3e} after {iterations} iterations"
                )));
            }
        }
    };
    for w in alpha.windows(2) {
        assert!(w[0] >= w[1] - 1e-12, "descent left the ordered simplex");
    }
    assert!((alpha.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    Ok(KktReport {
        m,
        alpha_star,
        alpha,
        objective_gap,
        max_deviation,
        iterations_used: used,
    })
}

/// Outcome of the shallow-codeword sweep.
#[derive(Debug, Clone, Serialize)]
pub struct JohnsenReport {
    pub q: u32,
    pub n_max: usize,
    pub holds: bool,
    /// Grid numerators of the first failing distribution, if any.
    pub counterexample: Option<Vec<u32>>,
    pub checked: u64,
}

/// Checks that every grid distribution whose largest probability is at
/// least 0.4 gives that symbol a one-letter codeword.
pub fn johnsen_verify(q: u32, n_max: usize) -> Result<JohnsenReport> {
    let limits = SearchLimits::default();
    if q == 0 || q > limits.max_q {
        return Err(Error::GridTooFine(format!(
            "grid denominator {q} outside [1, {}]",
            limits.max_q
        )));
    }
    if n_max == 0 || n_max > limits.max_n {
        return Err(Error::GridTooFine(format!(
            "symbol budget {n_max} outside [1, {}]",
            limits.max_n
        )));
    }
    let mut checked = 0u64;
    let mut counterexample: Option<Vec<u32>> = None;
    let mut stack = Vec::new();
    visit_partitions(q, q, n_max, 1, &mut stack, &mut |parts| {
        if counterexample.is_some() {
            return;
        }
        // Integer form of parts[0]/q >= 0.4.
        if 5 * parts[0] < 2 * q {
            return;
        }
        checked += 1;
        let qf = f64::from(q);
        let probs: Vec<f64> = parts.iter().map(|&k| f64::from(k) / qf).collect();
        let dist = ProbabilityMultiset::new(&probs).expect("grid parts form a distribution");
        let tree = build_huffman(&dist, 2).expect("binary build cannot fail");
        if tree.code_lengths().as_slice()[0] != 1 {
            counterexample = Some(parts.to_vec());
        }
    });
    Ok(JohnsenReport {
        q,
        n_max,
        holds: counterexample.is_none(),
        counterexample,
        checked,
    })
}

/// Outcome of one level-averaging step.
#[derive(Debug, Clone, Serialize)]
pub struct EqualizeOutcome {
    /// True when every level was already uniform away from the designated
    /// symbol, so averaging changed nothing.
    pub already_equalized: bool,
    pub redundancy_before: f64,
    pub redundancy_after: f64,
    pub entropy_before: f64,
    pub entropy_after: f64,
    pub equalized: ProbabilityMultiset,
}

/// Replaces the leaf probabilities at each depth of the code tree by their
/// level average, leaving the designated symbol `p` untouched, and checks
/// that the step never increases redundancy.
///
/// The tree must be a chain: at most one internal node per level.
pub fn equalize_verify(dist: &ProbabilityMultiset, radix: u32, p: f64) -> Result<EqualizeOutcome> {
    let tree = build_huffman(dist, radix)?;
    let mut internals_per_level: HashMap<u32, u32> = HashMap::new();
    for node in tree.internal_nodes() {
        *internals_per_level.entry(node.depth).or_insert(0) += 1;
    }
    if let Some((&depth, _)) = internals_per_level.iter().find(|(_, &c)| c > 1) {
        return Err(Error::NotCanonical(format!(
            "level {depth} has more than one internal node"
        )));
    }
    let designated = tree
        .find_leaf(p, 1e-9)
        .ok_or(Error::MissingSymbol { p, tol: 1e-9 })?;

    let mut new_probs: Vec<f64> = Vec::with_capacity(dist.len());
    let mut by_level: HashMap<u32, Vec<f64>> = HashMap::new();
    for (id, symbol, prob) in tree.leaves() {
        if symbol.is_none() || id == designated {
            continue;
        }
        by_level.entry(id.depth).or_default().push(prob);
    }
    let mut changed = false;
    for level in by_level.values() {
        let mean = level.iter().sum::<f64>() / level.len() as f64;
        if level.iter().any(|&x| (x - mean).abs() > 1e-12) {
            changed = true;
        }
        new_probs.extend(level.iter().map(|_| mean));
    }
    new_probs.push(p);

    let entropy_before = dist.entropy(2)?;
    let redundancy_before = tree.average_length() - dist.entropy(radix)?;
    let equalized = ProbabilityMultiset::new(&new_probs)?;
    let entropy_after = equalized.entropy(2)?;
    let redundancy_after = redundancy(&equalized, radix)?;

    // Averaging within levels preserves the same-shape average length, so
    // the redundancy comparison reduces to the entropy comparison.
    let mass_before: f64 = dist.probs().iter().sum();
    let mass_after: f64 = equalized.probs().iter().sum();
    assert!((mass_before - mass_after).abs() <= 1e-9);
    assert!(entropy_after >= entropy_before - 1e-12, "averaging lowered entropy");
    assert!(
        redundancy_after <= redundancy_before + 1e-9,
        "averaging raised redundancy"
    );
    Ok(EqualizeOutcome {
        already_equalized: !changed,
        redundancy_before,
        redundancy_after,
        entropy_before,
        entropy_after,
        equalized,
    })
}
