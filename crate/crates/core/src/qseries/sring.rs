use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::{eval_laurent, LaurentPoly};
use crate::error::{Error, Result};
use crate::exactcore::PrimePower;

/// Element `f(X) / prod_n (1 - X^n)` of `Z[X^{+-1}; (1 - X^n)^{-1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SRingElem {
    #[serde(rename = "laurent")]
    pub numerator: LaurentPoly,
    #[serde(default)]
    pub geom_factors: Vec<u32>,
}

impl SRingElem {
    pub fn new(numerator: LaurentPoly, geom_factors: Vec<u32>) -> Result<Self> {
        if geom_factors.contains(&0) {
            return Err(Error::Invalid("geometric factor exponents must be at least 1".into()));
        }
        Ok(SRingElem {
            numerator,
            geom_factors,
        })
    }

    pub fn laurent(f: LaurentPoly) -> Self {
        SRingElem {
            numerator: f,
            geom_factors: Vec::new(),
        }
    }

    pub fn integer(c: i64) -> Self {
        Self::laurent(LaurentPoly::monomial(BigInt::from(c), 0))
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.numerator.clone(), self.geom_factors.clone()).map(|_| ())
    }
}

pub fn eval_sring(s: &SRingElem, q: PrimePower) -> BigRational {
    let qb = BigInt::from(q.q());
    let den = s
        .geom_factors
        .iter()
        .fold(BigInt::one(), |acc, &n| acc * (BigInt::one() - Pow::pow(&qb, n)));
    eval_laurent(&s.numerator, q) / BigRational::from_integer(den)
}

/// Truncated expansion in `Z[[q]][q^{-1}]` modulo `q^cutoff`: coefficients
/// for exponents `min_exp .. cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QAdicTruncation {
    pub min_exp: i64,
    #[serde(with = "crate::num_json::vec")]
    pub coeffs: Vec<BigInt>,
    pub cutoff: i64,
}

impl QAdicTruncation {
    pub fn from_laurent(f: &LaurentPoly, cutoff: i64) -> Self {
        let min_exp = f.min_exp().min(cutoff);
        let coeffs = (min_exp..cutoff).map(|e| f.coeff(e)).collect();
        QAdicTruncation {
            min_exp,
            coeffs,
            cutoff,
        }
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        if exp < self.min_exp || exp >= self.cutoff {
            return BigInt::zero();
        }
        self.coeffs[(exp - self.min_exp) as usize].clone()
    }

    pub fn add(&self, other: &QAdicTruncation) -> QAdicTruncation {
        let cutoff = self.cutoff.min(other.cutoff);
        let min_exp = self.min_exp.min(other.min_exp).min(cutoff);
        let coeffs = (min_exp..cutoff).map(|e| self.coeff(e) + other.coeff(e)).collect();
        QAdicTruncation {
            min_exp,
            coeffs,
            cutoff,
        }
    }

    /// Product; precision is limited by the lower-order ends of both factors.
    pub fn mul(&self, other: &QAdicTruncation) -> QAdicTruncation {
        let min_exp = self.min_exp + other.min_exp;
        let cutoff = (self.cutoff + other.min_exp).min(other.cutoff + self.min_exp);
        let min_exp = min_exp.min(cutoff);
        let mut coeffs = vec![BigInt::zero(); (cutoff - min_exp) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let e = self.min_exp + i as i64 + other.min_exp + j as i64;
                if e >= cutoff {
                    break;
                }
                coeffs[(e - min_exp) as usize] += a * b;
            }
        }
        QAdicTruncation {
            min_exp,
            coeffs,
            cutoff,
        }
    }

    /// Multiply by `(1 - q^n)^{-1} = sum_k q^{kn}`, keeping the cutoff.
    pub fn mul_geometric(&self, n: u32) -> QAdicTruncation {
        let n = n as i64;
        let mut coeffs = self.coeffs.clone();
        // c'_e = c_e + c'_{e-n}
        for t in n as usize..coeffs.len() {
            let prev = coeffs[t - n as usize].clone();
            coeffs[t] += prev;
        }
        QAdicTruncation {
            min_exp: self.min_exp,
            coeffs,
            cutoff: self.cutoff,
        }
    }

    /// The truncation as a Laurent polynomial.
    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::new(self.min_exp, self.coeffs.clone())
    }

    pub fn eval(&self, q: PrimePower) -> BigRational {
        eval_laurent(&self.to_laurent(), q)
    }
}

/// Geometric-series expansion of `s` modulo `q^cutoff`.
pub fn expand_sring(s: &SRingElem, cutoff: i64) -> QAdicTruncation {
    let mut t = QAdicTruncation::from_laurent(&s.numerator, cutoff);
    for &n in &s.geom_factors {
        t = t.mul_geometric(n);
    }
    t
}
