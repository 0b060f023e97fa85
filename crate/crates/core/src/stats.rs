//! Sphere sizes `c_i`, single-descent counts `d_i`, and the counting
//! identities and inequalities relating them.
//!
//! Every check is an exact integer or rational comparison. The uniform-label
//! checks assume rank `n >= 3` and `m_st = m >= 3` for all `s != t`, and only
//! look at indices `i > m`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::element::Ball;
use crate::matrix::{CoxeterMatrix, DiagramProperties};
use crate::report::{Comparison, VerificationReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("requires a uniform label m >= {min}")]
    NotUniform { min: u32 },
    #[error("requires rank at least {min}, got {rank}")]
    RankTooSmall { min: usize, rank: usize },
    #[error("requires m > 3")]
    RequiresMGreaterThan3,
    #[error("requires a 2-spherical system with complete diagram")]
    DiagramNotComplete,
    #[error("index range for {lemma} is empty at depth {depth}")]
    RangeEmpty { lemma: &'static str, depth: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Whether verifiers refuse to run outside their hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gate {
    #[default]
    Enforced,
    /// Run anyway and report what is found.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SphereStats {
    pub n: usize,
    pub m: Option<u32>,
    pub diagram: DiagramProperties,
    pub c: Vec<u64>,
    pub d: Vec<u64>,
    /// Elements with exactly two right descents, per sphere.
    pub two_descents: Vec<u64>,
    /// Largest right-descent set size in each sphere.
    pub max_descents: Vec<usize>,
}

pub fn compute_stats(ball: &Ball) -> SphereStats {
    let depth = ball.depth();
    let mut d = vec![0u64; depth + 1];
    let mut two = vec![0u64; depth + 1];
    let mut max_desc = vec![0usize; depth + 1];
    for i in 0..=depth {
        for w in ball.layer_ids(i) {
            let k = ball.descents(w).len();
            match k {
                1 => d[i] += 1,
                2 => two[i] += 1,
                _ => {}
            }
            max_desc[i] = max_desc[i].max(k);
        }
    }
    let diagram = ball.matrix().diagram_properties();
    SphereStats {
        n: ball.rank(),
        m: diagram.uniform_label,
        diagram,
        c: ball.sphere_sizes(),
        d,
        two_descents: two,
        max_descents: max_desc,
    }
}

impl SphereStats {
    pub fn depth(&self) -> usize {
        self.c.len() - 1
    }

    fn ci(&self, i: usize) -> i128 {
        self.c[i] as i128
    }

    fn di(&self, i: usize) -> i128 {
        self.d[i] as i128
    }

    /// CSV table `i,c_i,d_i`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,c_i,d_i\n");
        for i in 0..=self.depth() {
            writeln!(out, "{i},{},{}", self.c[i], self.d[i]).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (0..=self.depth())
            .map(|i| serde_json::json!({ "i": i, "c": self.c[i], "d": self.d[i] }))
            .collect();
        serde_json::json!({ "n": self.n, "m": self.m, "depth": self.depth(), "rows": rows })
    }

    fn uniform(&self, min: u32, gate: Gate) -> Result<(usize, u32), StatsError> {
        if gate == Gate::Diagnostic {
            if let Some(m) = self.m {
                return Ok((self.n, m));
            }
            return Err(StatsError::NotUniform { min });
        }
        match self.m {
            Some(m) if m >= min => {}
            _ => return Err(StatsError::NotUniform { min }),
        }
        if self.n < 3 {
            return Err(StatsError::RankTooSmall { min: 3, rank: self.n });
        }
        Ok((self.n, self.m.unwrap()))
    }
}

fn range(lemma: &'static str, lo: usize, hi: Option<usize>, depth: usize) -> Result<[usize; 2], StatsError> {
    match hi {
        Some(hi) if lo <= hi => Ok([lo, hi]),
        _ => Err(StatsError::RangeEmpty { lemma, depth }),
    }
}

fn binom2(x: i128) -> i128 {
    if x < 2 {
        0
    } else {
        x * (x - 1) / 2
    }
}

fn cmp(i: usize, part: Option<&'static str>, lhs: i128, rhs: i128) -> Comparison {
    Comparison {
        i,
        part,
        lhs: lhs.into(),
        rhs: rhs.into(),
        detail: None,
    }
}

/// `c_i - d_i = C(n-2, 2) c_{i-m} + (n-2) d_{i-m}` for `m < i <= N`.
pub fn verify_l32(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    let (n, m) = stats.uniform(3, gate)?;
    let m = m as usize;
    let [lo, hi] = range("L32", m + 1, Some(stats.depth()), stats.depth())?;
    let n = n as i128;
    let mut report = VerificationReport::new("L32", Some([lo, hi]));
    for i in lo..=hi {
        let lhs = stats.ci(i) - stats.di(i);
        let rhs = binom2(n - 2) * stats.ci(i - m) + (n - 2) * stats.di(i - m);
        report.record(cmp(i, None, lhs, rhs), lhs == rhs, true);
    }
    Ok(report)
}

/// `2 c_{i+1} - d_{i+1} = (n-2) c_i + d_i` for `m < i <= N-1`.
pub fn verify_l33(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    let (n, m) = stats.uniform(3, gate)?;
    let [lo, hi] = range("L33", m as usize + 1, stats.depth().checked_sub(1), stats.depth())?;
    let n = n as i128;
    let mut report = VerificationReport::new("L33", Some([lo, hi]));
    for i in lo..=hi {
        let lhs = 2 * stats.ci(i + 1) - stats.di(i + 1);
        let rhs = (n - 2) * stats.ci(i) + stats.di(i);
        report.record(cmp(i, None, lhs, rhs), lhs == rhs, true);
    }
    Ok(report)
}

/// `c_{i+1} <= (n-1) c_i - (n-2) d_{i-m+1} <= (n-1) c_i` for `m < i <= N-1`.
///
/// Part `a` is the first inequality, part `b` the second.
pub fn verify_l34(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    let (n, m) = stats.uniform(3, gate)?;
    let m = m as usize;
    let [lo, hi] = range("L34", m + 1, stats.depth().checked_sub(1), stats.depth())?;
    let n = n as i128;
    let mut report = VerificationReport::new("L34", Some([lo, hi]));
    for i in lo..=hi {
        let middle = (n - 1) * stats.ci(i) - (n - 2) * stats.di(i + 1 - m);
        let upper = (n - 1) * stats.ci(i);
        let next = stats.ci(i + 1);
        report.record(cmp(i, Some("a"), next, middle), next <= middle, true);
        report.record(cmp(i, Some("b"), middle, upper), middle <= upper, true);
    }
    Ok(report)
}

/// `(n-2) c_i <= c_{i+1}` (part `a`) and `(n-2) d_i <= d_{i+1}` (part `b`)
/// for `m < i <= N-1`; needs `m > 3`.
pub fn verify_l35(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    let (n, m) = stats.uniform(3, gate)?;
    if m <= 3 && gate == Gate::Enforced {
        return Err(StatsError::RequiresMGreaterThan3);
    }
    let [lo, hi] = range("L35", m as usize + 1, stats.depth().checked_sub(1), stats.depth())?;
    let n = n as i128;
    let mut report = VerificationReport::new("L35", Some([lo, hi]));
    for i in lo..=hi {
        let (a, b) = ((n - 2) * stats.ci(i), stats.ci(i + 1));
        report.record(cmp(i, Some("a"), a, b), a <= b, true);
        let (a, b) = ((n - 2) * stats.di(i), stats.di(i + 1));
        report.record(cmp(i, Some("b"), a, b), a <= b, true);
    }
    Ok(report)
}

/// `(n-2) c_i <= d_i + d_{i+1}` for `0 <= i <= N-1`; needs `n >= 4` and a
/// 2-spherical system whose diagram is complete.
pub fn verify_l45(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    if gate == Gate::Enforced {
        if stats.n < 4 {
            return Err(StatsError::RankTooSmall { min: 4, rank: stats.n });
        }
        if !(stats.diagram.two_spherical && stats.diagram.complete_diagram) {
            return Err(StatsError::DiagramNotComplete);
        }
    }
    let [lo, hi] = range("L45", 0, stats.depth().checked_sub(1), stats.depth())?;
    let n = stats.n as i128;
    let mut report = VerificationReport::new("L45", Some([lo, hi]));
    for i in lo..=hi {
        let lhs = (n - 2) * stats.ci(i);
        let rhs = stats.di(i) + stats.di(i + 1);
        report.record(cmp(i, None, lhs, rhs), lhs <= rhs, true);
    }
    Ok(report)
}

/// The lower bound for `d_i / c_i` (`i > m`) in rank `n >= 3` with uniform `m >= 4`:
/// `k = (1 - 1/(2 (n-2)^(m-2))) / (1/(n-2)^(m-1) + 1)`.
pub fn compute_k(n: usize, m: u32) -> Result<BigRational, StatsError> {
    if n < 3 || m < 4 {
        return Err(StatsError::HypothesisViolated(format!(
            "k needs n >= 3 and m >= 4, got n={n}, m={m}"
        )));
    }
    let base = BigInt::from(n - 2);
    let one = BigRational::one();
    let pow = |e: u32| BigRational::from_integer(num_traits::pow(base.clone(), e as usize));
    let first = &one - (&one / (BigRational::from_integer(2.into()) * pow(m - 2)));
    let second = &one / pow(m - 1) + &one;
    Ok(first / second)
}

/// `d_i >= k c_i` for `m < i <= N`.
pub fn verify_descent_ratio(
    stats: &SphereStats,
    k: &BigRational,
    gate: Gate,
) -> Result<VerificationReport, StatsError> {
    let (_, m) = stats.uniform(4, gate)?;
    let [lo, hi] = range("k-ratio", m as usize + 1, Some(stats.depth()), stats.depth())?;
    let mut report = VerificationReport::new("k-ratio", Some([lo, hi]));
    for i in lo..=hi {
        let lhs = BigRational::from_integer(BigInt::from(stats.d[i]));
        let rhs = k * BigRational::from_integer(BigInt::from(stats.c[i]));
        let holds = lhs >= rhs;
        report.record(
            Comparison {
                i,
                part: None,
                lhs: lhs.into(),
                rhs: rhs.into(),
                detail: None,
            },
            holds,
            true,
        );
    }
    Ok(report)
}

/// Every nontrivial element has one or two right descents, so each sphere
/// splits as `c_i = d_i + #{two descents}`; checked for `i >= 1`.
pub fn verify_descent_partition(stats: &SphereStats, gate: Gate) -> Result<VerificationReport, StatsError> {
    stats.uniform(3, gate)?;
    let [lo, hi] = range("descent-partition", 1, Some(stats.depth()), stats.depth())?;
    let mut report = VerificationReport::new("descent-partition", Some([lo, hi]));
    for i in lo..=hi {
        if stats.c[i] == 0 {
            report.skip();
            continue;
        }
        let lhs = stats.ci(i);
        let rhs = stats.di(i) + stats.two_descents[i] as i128;
        let mut c = cmp(i, None, lhs, rhs);
        c.detail = Some(format!("max descents {}", stats.max_descents[i]));
        report.record(c, lhs == rhs && stats.max_descents[i] <= 2, true);
    }
    Ok(report)
}

/// Sphere sizes are monotone along the reduction preorder: if `a ⪯ b` then
/// `c_i(a) <= c_i(b)` for every `i` both tables cover.
pub fn verify_monotonicity(
    a: (&CoxeterMatrix, &SphereStats),
    b: (&CoxeterMatrix, &SphereStats),
) -> Result<VerificationReport, StatsError> {
    if !a.0.precedes(b.0) {
        return Err(StatsError::HypothesisViolated(
            "first system does not precede the second".into(),
        ));
    }
    let hi = a.1.depth().min(b.1.depth());
    let mut report = VerificationReport::new("monotonicity", Some([0, hi]));
    for i in 0..=hi {
        let (x, y) = (a.1.ci(i), b.1.ci(i));
        report.record(cmp(i, None, x, y), x <= y, true);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{Ball, DEFAULT_CAP};
    use crate::matrix::Order;

    fn stats(n: usize, m: u32, depth: usize) -> SphereStats {
        let matrix = CoxeterMatrix::uniform(n, Order::Finite(m)).unwrap();
        compute_stats(&Ball::build(&matrix, depth, DEFAULT_CAP).unwrap())
    }

    #[test]
    fn base_values() {
        for (n, m) in [(3, 4), (4, 3), (5, 3), (3, 7)] {
            let s = stats(n, m, 3);
            assert_eq!((s.c[0], s.d[0]), (1, 0));
            assert_eq!((s.c[1], s.d[1]), (n as u64, n as u64));
        }
    }

    #[test]
    fn k_values() {
        assert_eq!(compute_k(3, 4).unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(compute_k(4, 4).unwrap(), BigRational::new(7.into(), 9.into()));
        assert!(matches!(compute_k(3, 3), Err(StatsError::HypothesisViolated(_))));
    }

    #[test]
    fn l32_spot_values() {
        let s = stats(3, 4, 6);
        let r = verify_l32(&s, Gate::Enforced).unwrap();
        assert_eq!(r.range, Some([5, 6]));
        assert_eq!(r.entries[0].lhs, 3i128.into());
        assert!(r.holds());

        let s = stats(4, 3, 5);
        let r = verify_l32(&s, Gate::Enforced).unwrap();
        assert_eq!(r.entries[0].i, 4);
        assert_eq!(r.entries[0].rhs, 12i128.into());
        assert_eq!(r.entries[0].lhs, 12i128.into());
    }

    #[test]
    fn ranges_and_preconditions() {
        let s = stats(3, 4, 4);
        assert_eq!(
            verify_l32(&s, Gate::Enforced),
            Err(StatsError::RangeEmpty { lemma: "L32", depth: 4 })
        );
        let s = stats(3, 4, 5);
        assert!(matches!(
            verify_l33(&s, Gate::Enforced),
            Err(StatsError::RangeEmpty { .. })
        ));
        let s = stats(3, 3, 8);
        assert_eq!(verify_l35(&s, Gate::Enforced), Err(StatsError::RequiresMGreaterThan3));
        assert!(verify_l35(&s, Gate::Diagnostic).is_ok());
        assert!(matches!(
            verify_l45(&s, Gate::Enforced),
            Err(StatsError::RankTooSmall { min: 4, .. })
        ));
        assert!(matches!(
            verify_descent_ratio(&s, &BigRational::one(), Gate::Enforced),
            Err(StatsError::NotUniform { min: 4 })
        ));
        let mixed = CoxeterMatrix::from_ints(&[vec![1, 3, 4], vec![3, 1, 4], vec![4, 4, 1]]).unwrap();
        let s = compute_stats(&Ball::build(&mixed, 8, DEFAULT_CAP).unwrap());
        assert_eq!(verify_l33(&s, Gate::Enforced), Err(StatsError::NotUniform { min: 3 }));
        let sparse =
            CoxeterMatrix::from_ints(&[vec![1, 3, 2, 3], vec![3, 1, 3, 2], vec![2, 3, 1, 3], vec![3, 2, 3, 1]])
                .unwrap();
        let s = compute_stats(&Ball::build(&sparse, 4, DEFAULT_CAP).unwrap());
        assert_eq!(verify_l45(&s, Gate::Enforced), Err(StatsError::DiagramNotComplete));
    }

    #[test]
    fn corrupted_stats_fail_with_both_sides() {
        let mut s = stats(3, 4, 9);
        assert!(verify_l33(&s, Gate::Enforced).unwrap().holds());
        s.d[6] += 1;
        let r = verify_l33(&s, Gate::Enforced).unwrap();
        assert!(!r.holds());
        let first = r.first_failure().unwrap();
        assert!(first.i == 5 || first.i == 6);
        assert_ne!(first.lhs, first.rhs);
    }

    #[test]
    fn ratio_with_k_one_fails() {
        let s = stats(3, 4, 10);
        let r = verify_descent_ratio(&s, &BigRational::one(), Gate::Enforced).unwrap();
        assert!(!r.holds());
        assert_eq!(r.first_failure().unwrap().i, 5);
    }

    #[test]
    fn csv_table() {
        let s = stats(3, 4, 2);
        assert_eq!(s.to_csv(), "i,c_i,d_i\n0,1,0\n1,3,3\n2,6,6\n");
    }
}
