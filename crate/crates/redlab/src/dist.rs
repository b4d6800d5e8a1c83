//! Probability multisets: validated, sorted-descending source distributions.

use serde::Serialize;

use crate::{Error, Result};

/// Tolerance on |sum - 1| when validating a distribution.
pub const SUM_TOL: f64 = 1e-9;

/// A finite source distribution. Probabilities are kept sorted in
/// nonincreasing order; the multiset, not the original symbol order, is
/// what every operation in this crate consumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityMultiset {
    probs: Vec<f64>,
}

impl ProbabilityMultiset {
    /// Validates and sorts. Requires a nonempty list of finite,
    /// nonnegative values summing to 1 within [`SUM_TOL`].
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &p in probs {
            if !p.is_finite() {
                return Err(Error::OutOfRange {
                    name: "probability",
                    value: p,
                    range: "[0, 1]",
                });
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::SumNotOne { sum, tol: SUM_TOL });
        }
        let mut probs = probs.to_vec();
        probs.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// The probabilities, largest first.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest probability.
    pub fn max(&self) -> f64 {
        self.probs[0]
    }

    /// Smallest probability.
    pub fn min(&self) -> f64 {
        *self.probs.last().unwrap()
    }

    /// Shannon entropy in base-`radix` units. Zero-probability symbols
    /// contribute nothing.
    pub fn entropy(&self, radix: u32) -> Result<f64> {
        if radix < 2 {
            return Err(Error::BadRadix(radix));
        }
        Ok(entropy_of(&self.probs, radix))
    }

    /// Whether some symbol lies within `tol` of `p`.
    pub fn contains(&self, p: f64, tol: f64) -> bool {
        self.position_of(p, tol).is_some()
    }

    /// Index of the first (i.e. largest) symbol within `tol` of `p`.
    pub fn position_of(&self, p: f64, tol: f64) -> Option<usize> {
        self.probs.iter().position(|&q| (q - p).abs() <= tol)
    }

    /// Parses the text format: probabilities separated by newlines,
    /// commas, or whitespace. Blank lines and lines starting with `#` are
    /// skipped. Errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for field in line.split(|c: char| c == ',' || c.is_whitespace()) {
                if field.is_empty() {
                    continue;
                }
                let p: f64 = field.parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("{e:?} in {field:?}"),
                })?;
                probs.push(p);
            }
        }
        Self::new(&probs)
    }

    /// One probability per line, full precision, largest first. Output
    /// round-trips through [`ProbabilityMultiset::parse`] exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.probs {
            out.push_str(&format!("{p}\n"));
        }
        out
    }
}

/// Entropy of a raw slice in base-`radix` units, skipping zeros. No
/// validation; callers must pass a distribution.
pub fn entropy_of(probs: &[f64], radix: u32) -> f64 {
    let h2: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h2 / (radix as f64).log2()
}

/// Binary entropy of a single parameter, h(p) = -p lg p - (1-p) lg (1-p),
/// with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p), "binary_entropy({p})");
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sorts_descending() {
        let d = ProbabilityMultiset::new(&[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.3, 0.2]);
        assert_eq!(d.max(), 0.5);
        assert_eq!(d.min(), 0.2);
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(ProbabilityMultiset::new(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn rejects_negative() {
        let e = ProbabilityMultiset::new(&[1.2, -0.2]).unwrap_err();
        assert_eq!(e, Error::NegativeProbability(-0.2));
    }

    #[test]
    fn rejects_bad_sum() {
        let e = ProbabilityMultiset::new(&[0.5, 0.4]).unwrap_err();
        assert!(matches!(e, Error::SumNotOne { .. }));
    }

    #[test]
    fn accepts_sum_within_tolerance() {
        ProbabilityMultiset::new(&[0.5, 0.5 + 5e-10]).unwrap();
    }

    #[test]
    fn rejects_non_finite() {
        let e = ProbabilityMultiset::new(&[f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(e, Error::OutOfRange { .. }));
    }

    #[test]
    fn uniform_entropy_is_log_n() {
        let d = ProbabilityMultiset::new(&[0.125; 8]).unwrap();
        assert!((d.entropy(2).unwrap() - 3.0).abs() < 1e-12);
        let t = ProbabilityMultiset::new(&[1.0 / 9.0; 9]).unwrap();
        assert!((t.entropy(3).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_skips_zeros() {
        let d = ProbabilityMultiset::new(&[0.5, 0.5, 0.0]).unwrap();
        assert!((d.entropy(2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_rejects_bad_radix() {
        let d = ProbabilityMultiset::new(&[1.0]).unwrap();
        assert_eq!(d.entropy(1), Err(Error::BadRadix(1)));
        assert_eq!(d.entropy(0), Err(Error::BadRadix(0)));
    }

    #[test]
    fn binary_entropy_known_points() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(1.0 / 3.0) - 0.9182958340544896).abs() < 1e-15);
        assert!((binary_entropy(0.3) - 0.8812908992306927).abs() < 1e-15);
    }

    #[test]
    fn contains_with_tolerance() {
        let d = ProbabilityMultiset::new(&[0.5, 0.3, 0.2]).unwrap();
        assert!(d.contains(0.3, 0.0));
        assert!(d.contains(0.3 + 1e-7, 1e-6));
        assert!(!d.contains(0.31, 1e-6));
        assert_eq!(d.position_of(0.2, 0.0), Some(2));
    }

    #[test]
    fn parse_skips_blanks_and_comments() {
        let d = ProbabilityMultiset::parse("# header\n0.5\n\n  0.25\n0.25\n").unwrap();
        assert_eq!(d.probs(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn parse_reports_line_number() {
        let e = ProbabilityMultiset::parse("0.5\nnope\n0.5\n").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_accepts_one_line_separators() {
        let a = ProbabilityMultiset::parse("0.5, 0.25, 0.25\n").unwrap();
        let b = ProbabilityMultiset::parse("0.5 0.25\t0.25").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.probs(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let d = ProbabilityMultiset::new(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let back = ProbabilityMultiset::parse(&d.to_text()).unwrap();
        assert_eq!(d, back);
    }

    fn arb_dist(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-3..1.0f64, 1..=max_len).prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn new_output_is_sorted(raw in arb_dist(12)) {
            let d = ProbabilityMultiset::new(&raw).unwrap();
            prop_assert!(d.probs().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn entropy_is_permutation_invariant(raw in arb_dist(10)) {
            let d = ProbabilityMultiset::new(&raw).unwrap();
            let mut rev = raw.clone();
            rev.reverse();
            let e = ProbabilityMultiset::new(&rev).unwrap();
            prop_assert_eq!(d, e);
        }

        #[test]
        fn entropy_bounded_by_log_n(raw in arb_dist(10)) {
            let d = ProbabilityMultiset::new(&raw).unwrap();
            let h = d.entropy(2).unwrap();
            prop_assert!(h >= -1e-12);
            prop_assert!(h <= (d.len() as f64).log2() + 1e-9);
        }

        #[test]
        fn entropy_grouping_identity(raw in arb_dist(8)) {
            prop_assume!(raw.len() >= 2);
            let d = ProbabilityMultiset::new(&raw).unwrap();
            let p = d.probs();
            let merged = p[0] + p[1];
            let mut grouped = vec![merged];
            grouped.extend_from_slice(&p[2..]);
            let hg = entropy_of(&grouped, 2);
            let split = merged * binary_entropy(p[0] / merged);
            let h = d.entropy(2).unwrap();
            prop_assert!((h - (hg + split)).abs() < 1e-9);
        }
    }
}
