//! Real-root counting and isolation with Sturm sequences at exact rational points.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Poly;

/// `p / gcd(p, p')`, primitive with positive leading coefficient.
pub fn square_free_part(p: &Poly) -> Poly {
    if p.degree().unwrap_or(0) == 0 {
        return p.primitive_part();
    }
    let g = p.gcd(&p.derivative());
    p.div_exact(&g).expect("gcd divides p").primitive_part()
}

/// Sign of `p(x)` for rational `x = a/b`, via the homogenised integer sum.
pub fn sign_at(p: &Poly, x: &BigRational) -> Ordering {
    let Some(deg) = p.degree() else {
        return Ordering::Equal;
    };
    let (a, b) = (x.numer(), x.denom());
    // sum_i c_i a^i b^(deg - i); b > 0 keeps the sign
    let mut acc = BigInt::zero();
    let mut apow = BigInt::one();
    let mut bpows = Vec::with_capacity(deg + 1);
    let mut bp = BigInt::one();
    for _ in 0..=deg {
        bpows.push(bp.clone());
        bp *= b;
    }
    for (i, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc += c * &apow * &bpows[deg - i];
        }
        apow *= a;
    }
    acc.sign().cmp_zero()
}

trait SignExt {
    fn cmp_zero(self) -> Ordering;
}

impl SignExt for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// Sturm sequence of `p`: `p, p', -rem(...)`, each term rescaled by a positive constant.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    terms: Vec<Poly>,
}

impl SturmSequence {
    pub fn new(p: &Poly) -> Self {
        let mut terms = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            terms.push(d);
        }
        while terms.len() >= 2 {
            let a = &terms[terms.len() - 2];
            let b = &terms[terms.len() - 1];
            if b.degree() == Some(0) {
                break;
            }
            let r = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            let neg = -&r;
            // divide by the positive content only
            let content = neg.content();
            terms.push(Poly::new(neg.coeffs().iter().map(|c| c / &content).collect()));
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[Poly] {
        &self.terms
    }

    /// Sign changes in the sequence at `x`, zeros dropped.
    pub fn variations(&self, x: &BigRational) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for t in &self.terms {
            let s = sign_at(t, x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct roots in `(lo, hi]`, assuming `lo` is not a root.
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// An interval `(lo, hi]` containing exactly the root of interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Set when `hi` itself is the root.
    pub exact: bool,
}

/// Isolates the smallest root of `p` in `(lo, hi]`, refined until the width is at most `width`.
///
/// `p` should be square-free and nonzero at `lo`.
pub fn smallest_root_in(
    p: &Poly,
    lo: &BigRational,
    hi: &BigRational,
    width: &BigRational,
) -> Option<IsolatingInterval> {
    let sturm = SturmSequence::new(p);
    if sturm.count_roots(lo, hi) == 0 {
        return None;
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > *width {
        if sign_at(p, &hi) == Ordering::Equal && sturm.count_roots(&lo, &hi) == 1 {
            return Some(IsolatingInterval { lo, hi, exact: true });
        }
        let mid = (&lo + &hi) / &two;
        if sturm.count_roots(&lo, &mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let exact = sign_at(p, &hi) == Ordering::Equal;
    Some(IsolatingInterval { lo, hi, exact })
}

/// `2^-bits`
pub fn dyadic_width(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}
