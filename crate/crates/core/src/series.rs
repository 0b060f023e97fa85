//! Rational growth series, exact evaluation and convergence verdicts.
//!
//! For infinite `W` the series comes from the alternating sum over spherical
//! subsets
//!
//! ```text
//! 1 / W(t) = sum_{J spherical} (-1)^|J| t^{N_J} / W_J(t),
//! ```
//!
//! where `W_J` is the Poincaré polynomial of `<J>` and `N_J` the length of
//! its longest element. Finite `W` gets its Poincaré polynomial directly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify, poincare_polynomial, spherical_subsets};
use crate::matrix::CoxeterMatrix;
use crate::poly::Poly;
use crate::report::{rational_string, ExactValue};
use crate::roots::{dyadic_width, smallest_root_in, square_free_part};
use crate::stats::{compute_k, SphereStats};

/// Reported pole intervals are refined to this width.
pub const POLE_WIDTH_BITS: u32 = 64;

/// Coefficients sampled before a verdict to confirm they are nonnegative.
pub const DEFAULT_SAMPLE: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("denominator vanishes at 0")]
    SingularAtZero,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("Taylor coefficient {0} is not an integer")]
    NonIntegralCoefficient(usize),
    #[error("negative Taylor coefficient at index {0}")]
    NegativeCoefficientDetected(usize),
    #[error("classification failed: {0}")]
    ClassificationFailure(String),
    #[error("evaluation point must be positive")]
    NonPositivePoint,
    #[error("not enough data for ratios from index {i_min} at depth {depth}")]
    RangeEmpty { i_min: usize, depth: usize },
}

/// `num / den` in lowest terms with `den(0) > 0` (or positive leading
/// coefficient when `den(0) = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, SeriesError> {
        if den.is_zero() {
            return Err(SeriesError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_zero() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let flip = match den.coeff(0).sign() {
            num_bigint::Sign::Minus => true,
            num_bigint::Sign::Plus => false,
            num_bigint::Sign::NoSign => den.leading().unwrap().is_negative(),
        };
        if flip {
            num = -&num;
            den = -&den;
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `{"num": [...], "den": [...], "coeffs": [...]}`, ascending degree.
    pub fn to_json(&self, coeffs: &[BigInt]) -> serde_json::Value {
        let ints = |v: &[BigInt]| -> Vec<ExactValue> { v.iter().cloned().map(ExactValue::Int).collect() };
        serde_json::json!({
            "num": ints(self.num.coeffs()),
            "den": ints(self.den.coeffs()),
            "coeffs": ints(coeffs),
        })
    }
}

/// The growth series `sum_i c_i t^i` of `(W, S)` as an exact rational function.
pub fn rational_growth_series(matrix: &CoxeterMatrix) -> Result<RationalFunction, SeriesError> {
    let all: Vec<usize> = (0..matrix.rank()).collect();
    let full = classify(matrix, &all);
    if full.is_finite() {
        let p = poincare_polynomial(&full).map_err(|e| SeriesError::ClassificationFailure(e.to_string()))?;
        return Ok(RationalFunction::polynomial(p));
    }
    let subsets = spherical_subsets(matrix);
    let mut terms = Vec::with_capacity(subsets.len());
    let mut common = Poly::one();
    for sub in &subsets {
        let w = poincare_polynomial(&sub.label).map_err(|e| SeriesError::ClassificationFailure(e.to_string()))?;
        let longest = sub.label.longest_length().expect("spherical");
        common = common.lcm(&w);
        terms.push((sub.generators.len(), longest, w));
    }
    // 1/W = sum / common
    let mut sum = Poly::zero();
    for (size, longest, w) in &terms {
        let mut shifted = vec![BigInt::zero(); *longest];
        shifted.extend(common.div_exact(w).expect("lcm is divisible").coeffs().iter().cloned());
        let term = Poly::new(shifted);
        sum = if size % 2 == 0 { &sum + &term } else { &sum - &term };
    }
    RationalFunction::new(common, sum)
}

/// First `n + 1` Taylor coefficients at 0.
pub fn taylor_coefficients(f: &RationalFunction, n: usize) -> Result<Vec<BigInt>, SeriesError> {
    let d0 = f.den.coeff(0);
    if d0.is_zero() {
        return Err(SeriesError::SingularAtZero);
    }
    let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut acc = f.num.coeff(k);
        let top = f.den.degree().unwrap_or(0).min(k);
        for j in 1..=top {
            acc -= f.den.coeff(j) * &out[k - j];
        }
        let (q, r) = acc.div_rem(&d0);
        if !r.is_zero() {
            return Err(SeriesError::NonIntegralCoefficient(k));
        }
        out.push(q);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Value(BigRational),
    PoleAt,
}

pub fn evaluate_at_rational(f: &RationalFunction, t: &BigRational) -> Evaluation {
    let den = f.den.eval(t);
    if den.is_zero() {
        return Evaluation::PoleAt;
    }
    Evaluation::Value(f.num.eval(t) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Infinite,
}

/// Whether `p(t0) = sum_i c_i t0^i` is finite, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceVerdict {
    pub point: BigRational,
    pub verdict: Finiteness,
    /// Exact `p(t0)` when finite.
    pub value: Option<BigRational>,
    /// `(lo, hi]` containing the smallest positive pole when infinite;
    /// `lo == hi` when the pole is rational and found exactly.
    pub pole: Option<(BigRational, BigRational)>,
    pub pole_exact: bool,
    pub justification: String,
    pub quotient: Option<QuotientReport>,
}

impl ConvergenceVerdict {
    pub fn is_finite(&self) -> bool {
        self.verdict == Finiteness::Finite
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "point": rational_string(&self.point),
            "verdict": self.verdict,
            "justification": self.justification,
        });
        if let Some(x) = &self.value {
            v["value"] = rational_string(x).into();
        }
        if let Some((lo, hi)) = &self.pole {
            v["pole_interval"] = serde_json::json!([rational_string(lo), rational_string(hi)]);
            v["pole_exact"] = self.pole_exact.into();
        }
        if let Some(q) = &self.quotient {
            v["quotient_criterion"] = q.to_json();
        }
        v
    }
}

/// Decides finiteness at `t0 > 0` by locating the poles of `f` in `(0, t0]`.
///
/// With nonnegative coefficients the radius of convergence is the smallest
/// positive real pole (Pringsheim), so no pole in `(0, t0]` means the series
/// converges to `f(t0)`, and a pole there means it diverges.
pub fn finiteness_verdict(
    f: &RationalFunction,
    t0: &BigRational,
    sample: usize,
) -> Result<ConvergenceVerdict, SeriesError> {
    if !t0.is_positive() {
        return Err(SeriesError::NonPositivePoint);
    }
    let coeffs = taylor_coefficients(f, sample)?;
    if let Some(i) = coeffs.iter().position(Signed::is_negative) {
        return Err(SeriesError::NegativeCoefficientDetected(i));
    }
    let den = square_free_part(&f.den);
    let zero = BigRational::zero();
    match smallest_root_in(&den, &zero, t0, &dyadic_width(POLE_WIDTH_BITS)) {
        None => {
            let Evaluation::Value(value) = evaluate_at_rational(f, t0) else {
                unreachable!("no pole in (0, t0]");
            };
            Ok(ConvergenceVerdict {
                point: t0.clone(),
                verdict: Finiteness::Finite,
                value: Some(value),
                pole: None,
                pole_exact: false,
                justification: "denominator has no root in (0, t0]; nonnegative coefficients put the radius of \
                                convergence at the smallest positive pole (Pringsheim), so the series converges to \
                                the exact value"
                    .into(),
                quotient: None,
            })
        }
        Some(iv) => Ok(ConvergenceVerdict {
            point: t0.clone(),
            verdict: Finiteness::Infinite,
            value: None,
            pole: Some(if iv.exact {
                (iv.hi.clone(), iv.hi)
            } else {
                (iv.lo, iv.hi)
            }),
            pole_exact: iv.exact,
            justification: "denominator has a root in (0, t0]; with nonnegative coefficients the radius of \
                            convergence is at most that pole (Pringsheim), so the series diverges at t0"
                .into(),
            quotient: None,
        }),
    }
}

/// What the ratios are compared against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientMode {
    /// All ratios at most `rho < 1`.
    Convergence { rho: BigRational },
    /// All ratios at least 1.
    Divergence,
    /// Only record the ratios.
    Observe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientReport {
    pub point: BigRational,
    pub i_min: usize,
    pub mode: QuotientMode,
    /// `(i, c_{i+1} t0 / c_i)` for every `i >= i_min` with `c_i > 0`.
    pub ratios: Vec<(usize, BigRational)>,
    pub holds: bool,
    pub first_violation: Option<usize>,
}

impl QuotientReport {
    pub fn min_ratio(&self) -> Option<&BigRational> {
        self.ratios.iter().map(|r| &r.1).min()
    }

    pub fn max_ratio(&self) -> Option<&BigRational> {
        self.ratios.iter().map(|r| &r.1).max()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (mode, bound) = match &self.mode {
            QuotientMode::Convergence { rho } => ("convergence", Some(rational_string(rho))),
            QuotientMode::Divergence => ("divergence", Some("1".to_string())),
            QuotientMode::Observe => ("observe", None),
        };
        serde_json::json!({
            "point": rational_string(&self.point),
            "i_min": self.i_min,
            "mode": mode,
            "bound": bound,
            "holds": self.holds,
            "first_violation": self.first_violation,
            "ratio_window": [
                self.min_ratio().map(rational_string),
                self.max_ratio().map(rational_string),
            ],
            "ratios": self.ratios.iter().map(|(i, r)| serde_json::json!({"i": i, "r": rational_string(r)})).collect::<Vec<_>>(),
        })
    }
}

/// Ratios `r_i = c_{i+1} t0 / c_i` for `i_min <= i <= N - 1`, checked against `mode`.
pub fn quotient_criterion(
    c: &[u64],
    t0: &BigRational,
    i_min: usize,
    mode: QuotientMode,
) -> Result<QuotientReport, SeriesError> {
    let depth = c.len().saturating_sub(1);
    if c.is_empty() || depth < i_min + 2 {
        return Err(SeriesError::RangeEmpty { i_min, depth });
    }
    let one = BigRational::one();
    let mut ratios = Vec::new();
    let mut first_violation = None;
    for i in i_min..depth {
        if c[i] == 0 {
            continue;
        }
        let r = BigRational::new(BigInt::from(c[i + 1]), BigInt::from(c[i])) * t0;
        let ok = match &mode {
            QuotientMode::Convergence { rho } => r <= *rho,
            QuotientMode::Divergence => r >= one,
            QuotientMode::Observe => true,
        };
        if !ok && first_violation.is_none() {
            first_violation = Some(i);
        }
        ratios.push((i, r));
    }
    Ok(QuotientReport {
        point: t0.clone(),
        i_min,
        holds: first_violation.is_none(),
        first_violation,
        mode,
        ratios,
    })
}

/// `1 - (n-2) k / (n-1)^m`: the ratio bound at `t = 1/(n-1)` for uniform `m >= 4`.
pub fn convergence_ratio_bound(n: usize, m: u32, k: &BigRational) -> BigRational {
    let denom = num_traits::pow(BigInt::from(n - 1), m as usize);
    BigRational::one() - k * BigRational::new(BigInt::from(n - 2), denom)
}

/// Exact verdicts at `1/(n-1)` and (for `n >= 3`) `1/(n-2)`, each corroborated
/// by the quotient criterion when its hypotheses hold for the system itself.
#[derive(Debug, Clone)]
pub struct ReciprocalVerdicts {
    pub at_n_minus_1: ConvergenceVerdict,
    pub at_n_minus_2: Option<ConvergenceVerdict>,
}

pub fn reciprocal_verdicts(f: &RationalFunction, stats: &SphereStats) -> Result<ReciprocalVerdicts, SeriesError> {
    let n = stats.n;
    if n < 2 {
        return Err(SeriesError::ClassificationFailure("rank at least 2 is required".into()));
    }
    let recip = |q: usize| BigRational::new(BigInt::one(), BigInt::from(q));
    let mut a = finiteness_verdict(f, &recip(n - 1), DEFAULT_SAMPLE)?;
    a.quotient = corroborate(stats, &a.point, n - 1);
    let c = if n >= 3 {
        let mut v = finiteness_verdict(f, &recip(n - 2), DEFAULT_SAMPLE)?;
        v.quotient = corroborate(stats, &v.point, n - 2);
        Some(v)
    } else {
        None
    };
    Ok(ReciprocalVerdicts {
        at_n_minus_1: a,
        at_n_minus_2: c,
    })
}

/// The quotient check that applies at `t = 1/q`, if any does.
pub fn corroborate(stats: &SphereStats, t: &BigRational, q: usize) -> Option<QuotientReport> {
    let n = stats.n;
    let m = stats.m?;
    if n >= 3 && q == n - 1 && m >= 4 {
        let k = compute_k(n, m).ok()?;
        let rho = convergence_ratio_bound(n, m, &k);
        return quotient_criterion(&stats.c, t, 2 * m as usize, QuotientMode::Convergence { rho }).ok();
    }
    if n >= 4 && q == n - 2 && m == 3 {
        return quotient_criterion(&stats.c, t, m as usize + 1, QuotientMode::Divergence).ok();
    }
    None
}

/// Partial sums `sum_{i <= N} c_i t^i` for `N = 0..c.len()`.
pub fn partial_sums(c: &[BigInt], t: &BigRational) -> Vec<BigRational> {
    let mut acc = BigRational::zero();
    let mut pow = BigRational::one();
    c.iter()
        .map(|ci| {
            acc += BigRational::from_integer(ci.clone()) * &pow;
            pow *= t;
            acc.clone()
        })
        .collect()
}

/// Parses `p/q` or an integer.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Order;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn geometric(r: i64) -> RationalFunction {
        RationalFunction::new(Poly::one(), Poly::from_i64s(&[1, -r])).unwrap()
    }

    #[test]
    fn geometric_series() {
        let f = geometric(1);
        let ones: Vec<BigInt> = vec![1.into(); 5];
        assert_eq!(taylor_coefficients(&f, 4).unwrap(), ones);
        assert_eq!(evaluate_at_rational(&f, &q(1, 2)), Evaluation::Value(q(2, 1)));
        assert_eq!(evaluate_at_rational(&geometric(2), &q(1, 2)), Evaluation::PoleAt);
        let v = finiteness_verdict(&f, &q(1, 2), 16).unwrap();
        assert!(v.is_finite());
        assert_eq!(v.value, Some(q(2, 1)));
        let v = finiteness_verdict(&geometric(2), &q(1, 2), 16).unwrap();
        assert!(!v.is_finite());
        assert!(v.pole_exact);
        assert_eq!(v.pole.unwrap().1, q(1, 2));
    }

    #[test]
    fn normalization() {
        let f = RationalFunction::new(Poly::from_i64s(&[-2, -2]), Poly::from_i64s(&[-1, 0, 1])).unwrap();
        // -2(1+t) / ((t-1)(t+1)) = 2 / (1 - t)
        assert_eq!(f.numerator(), &Poly::from_i64s(&[2]));
        assert_eq!(f.denominator(), &Poly::from_i64s(&[1, -1]));
        assert_eq!(
            RationalFunction::new(Poly::one(), Poly::zero()),
            Err(SeriesError::ZeroDenominator)
        );
        let singular = RationalFunction::new(Poly::one(), Poly::from_i64s(&[0, 1])).unwrap();
        assert_eq!(taylor_coefficients(&singular, 3), Err(SeriesError::SingularAtZero));
    }

    #[test]
    fn dihedral_polynomial() {
        let f = rational_growth_series(&CoxeterMatrix::dihedral(4).unwrap()).unwrap();
        assert!(f.is_polynomial());
        let c: Vec<i64> = taylor_coefficients(&f, 6)
            .unwrap()
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect();
        assert_eq!(c, vec![1, 2, 2, 2, 1, 0, 0]);
        assert_eq!(evaluate_at_rational(&f, &q(1, 1)), Evaluation::Value(q(8, 1)));
    }

    #[test]
    fn triangle_group_series() {
        let f = rational_growth_series(&CoxeterMatrix::uniform(3, Order::Finite(4)).unwrap()).unwrap();
        let c: Vec<i64> = taylor_coefficients(&f, 4)
            .unwrap()
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect();
        assert_eq!(c, vec![1, 3, 6, 12, 21]);
    }

    #[test]
    fn negative_coefficients_are_rejected() {
        let f = RationalFunction::new(Poly::from_i64s(&[1, -3]), Poly::one()).unwrap();
        assert_eq!(
            finiteness_verdict(&f, &q(1, 2), 8),
            Err(SeriesError::NegativeCoefficientDetected(1))
        );
        assert_eq!(
            finiteness_verdict(&geometric(1), &q(0, 1), 8),
            Err(SeriesError::NonPositivePoint)
        );
    }

    #[test]
    fn quotient_on_constant_series() {
        let r = quotient_criterion(&[1; 8], &q(1, 2), 0, QuotientMode::Observe).unwrap();
        assert!(r.ratios.iter().all(|(_, x)| *x == q(1, 2)));
        let r = quotient_criterion(&[1; 8], &q(1, 2), 0, QuotientMode::Divergence).unwrap();
        assert_eq!(r.first_violation, Some(0));
        assert!(matches!(
            quotient_criterion(&[1; 4], &q(1, 2), 3, QuotientMode::Observe),
            Err(SeriesError::RangeEmpty { .. })
        ));
    }

    #[test]
    fn ratio_bound_value() {
        assert_eq!(convergence_ratio_bound(3, 4, &q(1, 4)), q(63, 64));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/3"), Some(q(1, 3)));
        assert_eq!(parse_rational(" 2 "), Some(q(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
