use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactcore::PrimePower;

/// p-adic valuation of a nonzero integer.
fn int_p_valuation(x: &BigInt, p: &BigInt) -> i64 {
    let mut k = 0;
    let mut rest = x.clone();
    loop {
        let (quot, rem) = rest.div_rem(p);
        if !rem.is_zero() {
            return k;
        }
        rest = quot;
        k += 1;
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn p_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    Some(int_p_valuation(x.numer(), &p) - int_p_valuation(x.denom(), &p))
}

/// Largest `n` with `x in q^n Z_(p)`, i.e. `floor(v_p(x) / f)`; `None` for zero.
pub fn q_valuation(x: &BigRational, q: PrimePower) -> Option<i64> {
    p_valuation(x, q.p()).map(|v| Integer::div_floor(&v, &(q.f() as i64)))
}

/// Is the reduced denominator a power of p?
pub fn has_q_power_denominator(x: &BigRational, q: PrimePower) -> bool {
    let p = BigInt::from(q.p());
    let mut d = x.denom().abs();
    while (&d % &p).is_zero() {
        d /= &p;
    }
    d.is_one()
}

/// `x = y (mod q^n)` for rationals whose denominators are powers of q.
pub fn congruent_mod_qn(x: &BigRational, y: &BigRational, q: PrimePower, n: i64) -> Result<bool> {
    for v in [x, y] {
        if !has_q_power_denominator(v, q) {
            return Err(Error::BadDenominator(v.denom().to_string()));
        }
    }
    Ok(q_valuation(&(x - y), q).map_or(true, |v| v >= n))
}
