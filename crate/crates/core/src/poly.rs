//! Dense univariate polynomials over the integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending degree order; never has a trailing zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `1 + t + ... + t^e`
    pub fn q_integer(e: usize) -> Self {
        Self::new(vec![BigInt::one(); e + 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// gcd of the coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_some_and(Signed::is_negative) {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Remainder of `|lc(divisor)|^(deg self - deg divisor + 1) * self` modulo `divisor`.
    ///
    /// The scaling factor is positive, so the sign structure used by Sturm
    /// sequences is preserved.
    pub fn pseudo_rem(&self, divisor: &Poly) -> Poly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap().abs();
        let lc_signed = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(mut dr) = self.degree() else {
            return Poly::zero();
        };
        if dr < dd {
            return self.clone();
        }
        let steps = dr - dd + 1;
        let mut performed = 0;
        while dr >= dd && !rem.is_empty() {
            let lead = rem[dr].clone();
            // rem = lc * rem - lead * x^(dr-dd) * divisor, with lc = |lc(divisor)|
            for c in rem.iter_mut() {
                *c *= &lc;
            }
            let factor = if lc_signed.is_negative() { -lead } else { lead };
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[dr - dd + i] -= &factor * dc;
            }
            performed += 1;
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
            match rem.len().checked_sub(1) {
                Some(d) => dr = d,
                None => break,
            }
        }
        let mut out = Poly::new(rem);
        for _ in performed..steps {
            out = out.scale(&lc);
        }
        out
    }

    /// Exact quotient over the integers, if `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let dd = divisor.degree()?;
        let lc = divisor.leading().unwrap();
        let Some(dr) = self.degree() else {
            return Some(Poly::zero());
        };
        if dr < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); dr - dd + 1];
        for k in (0..=dr - dd).rev() {
            let (q, r) = rem[k + dd].div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= &q * dc;
            }
            quot[k] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| Poly::new(quot))
    }

    /// Greatest common divisor, primitive with positive leading coefficient
    /// (times the gcd of the contents).
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let content = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&content)
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        let g = self.gcd(other);
        let prod = self * other;
        prod.div_exact(&g).expect("gcd divides the product").primitive_part()
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * t + BigRational::from_integer(c.clone())
        })
    }

    pub fn eval_int(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    pub fn sign_at(&self, t: &BigRational) -> Ordering {
        self.eval(t).cmp(&BigRational::zero())
    }

    /// Coefficients as decimal strings, ascending.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p(&[1, 1]);
        let b = p(&[1, 1, 1, 1]);
        let prod = &a * &b;
        assert_eq!(prod, p(&[1, 2, 2, 2, 1]));
        assert_eq!(prod.to_string(), "1 + 2t + 2t^2 + 2t^3 + t^4");
        assert_eq!(p(&[0, -1, 0, 3]).to_string(), "-t + 3t^3");
        assert_eq!(&a - &a, Poly::zero());
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
        assert_eq!(prod.eval_int(&BigInt::from(1)), BigInt::from(8));
    }

    #[test]
    fn exact_division_and_gcd() {
        let a = p(&[1, 1]);
        let b = p(&[1, -1]);
        let c = p(&[2, 0, 1]);
        let ab = &a * &b;
        let ac = &a * &c;
        assert_eq!(ab.gcd(&ac), a);
        assert_eq!(ac.div_exact(&a), Some(c.clone()));
        assert_eq!(c.div_exact(&a), None);
        assert_eq!(p(&[2, 4]).gcd(&p(&[4, 8])), p(&[2, 4]));
        assert_eq!(ab.lcm(&ac), (&ab * &c).primitive_part());
    }

    #[test]
    fn pseudo_remainder_keeps_sign() {
        // x^2 - 2 mod (-2x + 1): |lc| = 2, 4(x^2 - 2) = (-2x+1)(-2x-1) - 7
        let r = p(&[-2, 0, 1]).pseudo_rem(&p(&[1, -2]));
        assert_eq!(r, p(&[-7]));
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-6i64..=6, 1..5).prop_map(|c| Poly::from_i64s(&c))
    }

    proptest! {
        #[test]
        fn gcd_divides_both(a in small_poly(), b in small_poly(), c in small_poly()) {
            let x = &a * &c;
            let y = &b * &c;
            let g = x.gcd(&y);
            if !g.is_zero() {
                prop_assert!(x.div_exact(&g).is_some());
                prop_assert!(y.div_exact(&g).is_some());
                if !c.is_zero() {
                    prop_assert!(g.div_exact(&c.primitive_part()).is_some());
                }
            }
        }

        #[test]
        fn multiplication_then_division_roundtrips(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }
    }
}
