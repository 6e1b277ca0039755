use std::collections::BTreeSet;
use std::io::Read;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::Deserialize;

use super::laurent::{eval_laurent, LaurentPoly};
use crate::error::{Error, Result};
use crate::exactcore::PrimePower;
use crate::modrep::q_pow;

/// Fit a Laurent polynomial with exponents in `lo..=hi` to exact samples.
///
/// The first `hi - lo + 1` samples determine the coefficients; every later
/// sample is a holdout that must be matched exactly. Returns `None` when the
/// solution is not integral or a holdout disagrees.
pub fn laurent_fit(samples: &[(PrimePower, BigRational)], lo: i64, hi: i64) -> Result<Option<LaurentPoly>> {
    if hi < lo {
        return Err(Error::Invalid(format!("empty exponent range [{lo}, {hi}]")));
    }
    let unknowns = (hi - lo + 1) as usize;
    let distinct: BTreeSet<u64> = samples.iter().map(|(q, _)| q.q()).collect();
    if distinct.len() != samples.len() || samples.len() < unknowns + 1 {
        return Err(Error::InsufficientSamples {
            needed: unknowns + 1,
            got: distinct.len().min(samples.len()),
        });
    }
    let (fit, holdout) = samples.split_at(unknowns);

    // Generalised Vandermonde system, nonsingular for distinct q > 0.
    let mut m: Vec<Vec<BigRational>> = fit
        .iter()
        .map(|(q, v)| {
            let mut row: Vec<BigRational> = (lo..=hi).map(|e| q_pow(*q, e)).collect();
            row.push(v.clone());
            row
        })
        .collect();
    for c in 0..unknowns {
        let p = (c..unknowns)
            .find(|&r| !m[r][c].is_zero())
            .expect("distinct nodes give a nonsingular system");
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..unknowns {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for t in c..=unknowns {
                    let sub = &f * &m[c][t];
                    m[r][t] -= sub;
                }
            }
        }
    }
    let mut coeffs = Vec::with_capacity(unknowns);
    for row in &m {
        let c = &row[unknowns];
        if !c.is_integer() {
            return Ok(None);
        }
        coeffs.push(c.to_integer());
    }
    let poly = LaurentPoly::new(lo, coeffs);
    if holdout.iter().all(|(q, v)| &eval_laurent(&poly, *q) == v) {
        Ok(Some(poly))
    } else {
        Ok(None)
    }
}

#[derive(Deserialize)]
struct SampleRow {
    q_p: u64,
    q_f: u32,
    num: String,
    den_exp: u32,
}

/// Read a sample table with columns `q_p, q_f, num, den_exp`; each row is
/// the value `num / q^den_exp`.
pub fn read_samples(reader: impl Read) -> Result<Vec<(PrimePower, BigRational)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: SampleRow = row?;
        let q = PrimePower::new(row.q_p, row.q_f)?;
        let num: BigInt = row
            .num
            .parse()
            .map_err(|_| Error::Invalid(format!("{:?} is not an integer", row.num)))?;
        let den = Pow::pow(BigInt::from(q.q()), row.den_exp);
        out.push((q, BigRational::new(num, den)));
    }
    Ok(out)
}
