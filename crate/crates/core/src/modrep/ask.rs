use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::rep::ModuleRep;
use crate::budget::{pow_saturating, Budget};
use crate::error::Result;
use crate::exactcore::{rank_in_place, Elem, FiniteField, PrimePower};

/// Exact value `numerator / q^denom_exp`, kept unreduced.
#[derive(Clone, Debug, Serialize)]
pub struct AskValue {
    pub q: PrimePower,
    #[serde(with = "crate::num_json")]
    pub numerator: BigInt,
    pub denom_exp: u32,
}

impl AskValue {
    pub fn new(q: PrimePower, numerator: BigInt, denom_exp: u32) -> Self {
        AskValue {
            q,
            numerator,
            denom_exp,
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            self.numerator.clone(),
            Pow::pow(BigInt::from(self.q.q()), self.denom_exp),
        )
    }

    /// `q^k * self`, exact.
    pub fn scale_q_pow(&self, k: i64) -> BigRational {
        self.to_rational() * q_pow(self.q, k)
    }
}

/// `q^k` as an exact rational, `k` of either sign.
pub fn q_pow(q: PrimePower, k: i64) -> BigRational {
    let base = BigInt::from(q.q());
    let mag = Pow::pow(base, k.unsigned_abs());
    if k >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

impl PartialEq for AskValue {
    fn eq(&self, other: &Self) -> bool {
        let q = BigInt::from(self.q.q());
        self.q == other.q
            && &self.numerator * Pow::pow(&q, other.denom_exp)
                == &other.numerator * Pow::pow(&q, self.denom_exp)
    }
}

impl Eq for AskValue {}

impl fmt::Display for AskValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Counts of module points by the rank of their image matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankHistogram {
    pub q: PrimePower,
    pub l: usize,
    pub d: usize,
    pub e: usize,
    /// `counts[i]` is the number of `a` in `F_q^l` with `rank(a theta) = i`.
    pub counts: Vec<u64>,
}

impl RankHistogram {
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Histogram of the m-th power: rank `i` becomes rank `m i`.
    pub fn power(&self, m: usize) -> RankHistogram {
        let mut counts = vec![0; m * self.d.min(self.e) + 1];
        for (i, &c) in self.counts.iter().enumerate() {
            counts[m * i] = c;
        }
        RankHistogram {
            q: self.q,
            l: self.l,
            d: m * self.d,
            e: m * self.e,
            counts,
        }
    }
}

/// Reduction of an integer tensor into F_q slices `C_k` (d×e each).
struct ReducedRep {
    l: usize,
    rows: usize,
    cols: usize,
    slices: Vec<Vec<Elem>>,
}

impl ReducedRep {
    fn new(theta: &ModuleRep, field: &FiniteField) -> Self {
        ReducedRep {
            l: theta.l(),
            rows: theta.d(),
            cols: theta.e(),
            slices: (0..theta.l())
                .map(|k| theta.slice(k).iter().map(|x| field.from_int(x)).collect())
                .collect(),
        }
    }
}

/// Visit every `a` in the index range `start..end` of `F_q^l` (base-q digits,
/// coordinate 0 least significant) together with the matrix `a theta`.
///
/// Partial sums `P_k = sum_{t >= k} a_t C_t` are maintained so that each step
/// only recomputes the prefix touched by the odometer carry.
fn for_each_point(
    rep: &ReducedRep,
    field: &FiniteField,
    start: u128,
    end: u128,
    mut visit: impl FnMut(&[Elem]),
) {
    let q = field.q() as u128;
    let n = rep.rows * rep.cols;
    let l = rep.l;
    let mut digits = vec![0 as Elem; l];
    let mut rest = start;
    for d in digits.iter_mut() {
        *d = (rest % q) as Elem;
        rest /= q;
    }
    // partial[k] holds P_k; partial[l] is zero.
    let mut partial = vec![vec![0 as Elem; n]; l + 1];
    let recompute = |partial: &mut Vec<Vec<Elem>>, digits: &[Elem], top: usize| {
        for k in (0..=top.min(l.saturating_sub(1))).rev() {
            if l == 0 {
                break;
            }
            let (lo, hi) = partial.split_at_mut(k + 1);
            let cur = &mut lo[k];
            let next = &hi[0];
            let a = digits[k];
            let slice = &rep.slices[k];
            for t in 0..n {
                cur[t] = field.add(next[t], field.mul(a, slice[t]));
            }
        }
    };
    recompute(&mut partial, &digits, l.saturating_sub(1));
    let mut scratch = vec![0 as Elem; n];
    let mut idx = start;
    while idx < end {
        scratch.copy_from_slice(&partial[0]);
        visit(&scratch);
        idx += 1;
        if idx == end {
            break;
        }
        let mut top = 0;
        while top < l {
            digits[top] += 1;
            if (digits[top] as u128) < q {
                break;
            }
            digits[top] = 0;
            top += 1;
        }
        recompute(&mut partial, &digits, top);
    }
}

const CHUNK: u128 = 1 << 12;

fn chunks(total: u128) -> Vec<(u128, u128)> {
    let mut out = Vec::new();
    let mut s = 0;
    while s < total {
        let e = (s + CHUNK).min(total);
        out.push((s, e));
        s = e;
    }
    out
}

/// `h[i] = #{a in F_q^l : rank(a theta) = i}`, enumerated in parallel.
pub fn rank_histogram(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<RankHistogram> {
    let total = pow_saturating(field.q(), theta.l());
    budget.check_points("rank histogram", total)?;
    let rep = ReducedRep::new(theta, field);
    let width = theta.d().min(theta.e()) + 1;
    let counts = chunks(total)
        .into_par_iter()
        .map(|(s, e)| {
            let mut h = vec![0u64; width];
            let mut buf = vec![0 as Elem; rep.rows * rep.cols];
            for_each_point(&rep, field, s, e, |m| {
                buf.copy_from_slice(m);
                h[rank_in_place(field, &mut buf, rep.rows, rep.cols)] += 1;
            });
            h
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(RankHistogram {
        q: field.prime_power(),
        l: theta.l(),
        d: theta.d(),
        e: theta.e(),
        counts,
    })
}

/// `sum_i h[i] q^{m(d-i)}` over `q^l`.
pub fn ask_from_histogram(h: &RankHistogram, m: usize) -> AskValue {
    let q = BigInt::from(h.q.q());
    let mut num = BigInt::zero();
    for (i, &c) in h.counts.iter().enumerate() {
        if c != 0 {
            num += BigInt::from(c) * Pow::pow(&q, (m * (h.d - i)) as u32);
        }
    }
    AskValue::new(h.q, num, h.l as u32)
}

pub fn ask(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<AskValue> {
    ask_power(theta, 1, field, budget)
}

/// `ask` of the m-th power, derived from the histogram of `theta` itself.
pub fn ask_power(theta: &ModuleRep, m: usize, field: &FiniteField, budget: &Budget) -> Result<AskValue> {
    Ok(ask_from_histogram(&rank_histogram(theta, field, budget)?, m))
}

/// Direct kernel-size sum over the given representation, with no
/// histogram in between. Used to cross-validate the fast path.
pub fn ask_naive(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<AskValue> {
    let total = pow_saturating(field.q(), theta.l());
    budget.check_points("naive ask", total)?;
    let rep = ReducedRep::new(theta, field);
    let q = BigInt::from(field.q());
    let d = theta.d();
    let num = chunks(total)
        .into_par_iter()
        .map(|(s, e)| {
            let mut acc = BigInt::zero();
            let mut buf = vec![0 as Elem; rep.rows * rep.cols];
            for_each_point(&rep, field, s, e, |m| {
                buf.copy_from_slice(m);
                let r = rank_in_place(field, &mut buf, rep.rows, rep.cols);
                acc += Pow::pow(&q, (d - r) as u32);
            });
            acc
        })
        .reduce(BigInt::zero, |a, b| a + b);
    Ok(AskValue::new(field.prime_power(), num, theta.l() as u32))
}

/// Number of points in the rank-d stratum; zero when the generic rank is
/// smaller than d.
pub fn vmax_count(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<u64> {
    let h = rank_histogram(theta, field, budget)?;
    Ok(h.counts.get(theta.d()).copied().unwrap_or(0))
}
