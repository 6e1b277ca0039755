use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::exactcore::{Elem, FiniteField};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::num_json")]
    pub coeff: BigInt,
    pub exps: Vec<u32>,
}

/// Closed subscheme of affine `vars`-space cut out by integer polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineScheme {
    pub vars: usize,
    pub polys: Vec<Vec<Term>>,
}

impl AffineScheme {
    pub fn new(vars: usize, polys: Vec<Vec<Term>>) -> Result<Self> {
        let s = AffineScheme { vars, polys };
        s.validate()?;
        Ok(s)
    }

    pub fn affine_space(vars: usize) -> Self {
        AffineScheme {
            vars,
            polys: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, poly) in self.polys.iter().enumerate() {
            for (t, term) in poly.iter().enumerate() {
                if term.exps.len() != self.vars {
                    return Err(Error::ShapeMismatch {
                        location: format!("polys[{i}][{t}].exps"),
                        expected: self.vars,
                        found: term.exps.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let scheme: AffineScheme = serde_json::from_str(s)?;
        scheme.validate()?;
        Ok(scheme)
    }

    /// Disjoint union of variable blocks: the product scheme.
    pub fn product(&self, other: &AffineScheme) -> AffineScheme {
        let vars = self.vars + other.vars;
        let pad = |poly: &Vec<Term>, before: usize, after: usize| -> Vec<Term> {
            poly.iter()
                .map(|t| {
                    let mut exps = vec![0; before];
                    exps.extend(&t.exps);
                    exps.extend(std::iter::repeat(0).take(after));
                    Term {
                        coeff: t.coeff.clone(),
                        exps,
                    }
                })
                .collect()
        };
        let mut polys: Vec<Vec<Term>> = self.polys.iter().map(|p| pad(p, 0, other.vars)).collect();
        polys.extend(other.polys.iter().map(|p| pad(p, self.vars, 0)));
        AffineScheme { vars, polys }
    }
}

/// Number of F_q-points, by exhaustive evaluation.
pub fn affine_count(y: &AffineScheme, field: &FiniteField, budget: &Budget) -> Result<u64> {
    y.validate()?;
    let total = pow_saturating(field.q(), y.vars);
    budget.check_points("affine point count", total)?;
    let polys: Vec<Vec<(Elem, &[u32])>> = y
        .polys
        .iter()
        .map(|p| p.iter().map(|t| (field.from_int(&t.coeff), t.exps.as_slice())).collect())
        .collect();
    let q = field.q() as u128;
    let vars = y.vars;
    let step = 1u128 << 12;
    let starts: Vec<u128> = (0..total.div_ceil(step)).map(|c| c * step).collect();
    let count = starts
        .into_par_iter()
        .map(|s| {
            let e = (s + step).min(total);
            let mut x = vec![0 as Elem; vars];
            let mut n = 0u64;
            for idx in s..e {
                let mut rest = idx;
                for v in x.iter_mut() {
                    *v = (rest % q) as Elem;
                    rest /= q;
                }
                let zero = polys.iter().all(|poly| {
                    let mut acc = 0;
                    for &(c, exps) in poly {
                        let mut t = c;
                        for (&xi, &ei) in x.iter().zip(exps) {
                            if ei > 0 {
                                t = field.mul(t, field.pow(xi, ei as u64));
                            }
                        }
                        acc = field.add(acc, t);
                    }
                    acc == 0
                });
                if zero {
                    n += 1;
                }
            }
            n
        })
        .sum();
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::make_field;

    fn b() -> Budget {
        Budget::default()
    }

    fn term(c: i64, exps: &[u32]) -> Term {
        Term {
            coeff: BigInt::from(c),
            exps: exps.to_vec(),
        }
    }

    #[test]
    fn examples() {
        let k7 = make_field(7, 1).unwrap();
        let line = AffineScheme::new(1, vec![vec![term(1, &[1])]]).unwrap();
        assert_eq!(affine_count(&line, &k7, &b()).unwrap(), 1);
        for q in [2u64, 3, 4, 5] {
            let k = FiniteField::new(crate::exactcore::PrimePower::from_q(q).unwrap()).unwrap();
            assert_eq!(affine_count(&AffineScheme::affine_space(2), &k, &b()).unwrap(), q * q);
        }
        let k5 = make_field(5, 1).unwrap();
        let hyperbola = AffineScheme::new(2, vec![vec![term(1, &[1, 1]), term(-1, &[0, 0])]]).unwrap();
        assert_eq!(affine_count(&hyperbola, &k5, &b()).unwrap(), 4);
    }

    #[test]
    fn product_is_multiplicative() {
        let k = make_field(3, 1).unwrap();
        let circle = AffineScheme::new(2, vec![vec![term(1, &[2, 0]), term(1, &[0, 2]), term(-1, &[0, 0])]]).unwrap();
        let cusp = AffineScheme::new(2, vec![vec![term(1, &[0, 2]), term(-1, &[3, 0])]]).unwrap();
        let a = affine_count(&circle, &k, &b()).unwrap();
        let c = affine_count(&cusp, &k, &b()).unwrap();
        assert_eq!(affine_count(&circle.product(&cusp), &k, &b()).unwrap(), a * c);
    }

    #[test]
    fn bad_exponent_length() {
        assert!(AffineScheme::new(2, vec![vec![term(1, &[1])]]).is_err());
        assert!(AffineScheme::from_json(r#"{"vars":1,"polys":[[{"coeff":1,"exps":[1,1]}]]}"#).is_err());
        let s = AffineScheme::from_json(r#"{"vars":1,"polys":[[{"coeff":"5","exps":[1]}]]}"#).unwrap();
        assert_eq!(s.polys[0][0].coeff, BigInt::from(5));
    }
}
