use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactcore::PrimePower;
use crate::modrep::q_pow;

/// Integer Laurent polynomial `sum_t coeffs[t] X^{min_exp + t}`, trimmed so
/// that the first and last coefficients are nonzero. Zero has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawLaurent", into = "RawLaurent")]
pub struct LaurentPoly {
    min_exp: i64,
    coeffs: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawLaurent {
    min_exp: i64,
    #[serde(with = "crate::num_json::vec")]
    coeffs: Vec<BigInt>,
}

impl From<RawLaurent> for LaurentPoly {
    fn from(r: RawLaurent) -> Self {
        LaurentPoly::new(r.min_exp, r.coeffs)
    }
}

impl From<LaurentPoly> for RawLaurent {
    fn from(p: LaurentPoly) -> Self {
        RawLaurent {
            min_exp: p.min_exp,
            coeffs: p.coeffs,
        }
    }
}

impl LaurentPoly {
    pub fn new(min_exp: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { min_exp, coeffs };
        p.trim();
        p
    }

    pub fn from_i64(min_exp: i64, coeffs: &[i64]) -> Self {
        Self::new(min_exp, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        LaurentPoly {
            min_exp: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, exp: i64) -> Self {
        Self::new(exp, vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.min_exp += lead as i64;
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_exp + self.coeffs.len() as i64 - 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        let t = exp - self.min_exp;
        if t < 0 {
            return BigInt::zero();
        }
        self.coeffs.get(t as usize).cloned().unwrap_or_default()
    }

    /// `(exponent, coefficient)` pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(t, c)| (self.min_exp + t as i64, c))
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(other.min_exp);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let coeffs = (lo..=hi).map(|e| self.coeff(e) + other.coeff(e)).collect();
        LaurentPoly::new(lo, coeffs)
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.min_exp + other.min_exp, coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        LaurentPoly::new(self.min_exp, self.coeffs.iter().map(|x| x * c).collect())
    }
}

/// Exact value at `X = q`; the denominator divides a power of q.
pub fn eval_laurent(f: &LaurentPoly, q: PrimePower) -> BigRational {
    f.terms()
        .map(|(e, c)| BigRational::from_integer(c.clone()) * q_pow(q, e))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = c < &BigInt::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("X")?,
                1 => write!(f, "{mag}X")?,
                _ if unit => write!(f, "X^{e}")?,
                _ => write!(f, "{mag}X^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(q: u64) -> PrimePower {
        PrimePower::from_q(q).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn evaluation() {
        assert_eq!(eval_laurent(&LaurentPoly::from_i64(0, &[-2, 3]), pp(5)), rat(13, 1));
        assert_eq!(eval_laurent(&LaurentPoly::from_i64(-1, &[1]), pp(3)), rat(1, 3));
        assert_eq!(eval_laurent(&LaurentPoly::zero(), pp(7)), rat(0, 1));
    }

    #[test]
    fn trimming_and_display() {
        let p = LaurentPoly::from_i64(-2, &[0, 0, -2, 3, 0]);
        assert_eq!(p.min_exp(), 0);
        assert_eq!(p.coeffs().len(), 2);
        assert_eq!(p.to_string(), "3X - 2");
        assert_eq!(LaurentPoly::from_i64(3, &[-2, 3]).to_string(), "3X^4 - 2X^3");
        assert!(LaurentPoly::from_i64(4, &[0, 0]).is_zero());
        assert_eq!(LaurentPoly::from_i64(-1, &[1]).to_string(), "X^-1");
    }

    #[test]
    fn ring_operations() {
        let a = LaurentPoly::from_i64(-1, &[1, 1]); // X^-1 + 1
        let b = LaurentPoly::from_i64(0, &[1, -1]); // 1 - X
        assert_eq!(a.mul(&b), LaurentPoly::from_i64(-1, &[1, 0, -1]));
        assert_eq!(a.add(&b), LaurentPoly::from_i64(-1, &[1, 2, -1]));
        assert!(b.add(&b.scale(&BigInt::from(-1))).is_zero());
    }
}
