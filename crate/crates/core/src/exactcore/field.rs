use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::prime::PrimePower;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// A field element, encoded as the base-p number whose digits are the
/// polynomial coefficients (constant term least significant). Integers
/// 0..p are therefore the prime subfield.
pub type Elem = u32;

/// Finite field F_q with full arithmetic tables.
///
/// Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<FieldData>,
}

struct FieldData {
    pp: PrimePower,
    /// Monic modulus, low degree first, length f + 1.
    modulus: Vec<u64>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.pp == other.inner.pp && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FiniteField {}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("q", &self.inner.pp.q())
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

/// Field of order p^f under the default budget.
pub fn make_field(p: u64, f: u32) -> Result<FiniteField> {
    make_field_with_budget(p, f, &Budget::default())
}

pub fn make_field_with_budget(p: u64, f: u32, budget: &Budget) -> Result<FiniteField> {
    let pp = PrimePower::new(p, f)?;
    FiniteField::with_budget(pp, budget)
}

impl FiniteField {
    pub fn new(pp: PrimePower) -> Result<Self> {
        Self::with_budget(pp, &Budget::default())
    }

    pub fn with_budget(pp: PrimePower, budget: &Budget) -> Result<Self> {
        if pp.q() > budget.field_order {
            return Err(Error::BudgetExceeded {
                what: "field order",
                needed: pp.q() as u128,
                budget: budget.field_order as u128,
            });
        }
        let p = pp.p();
        let f = pp.f() as usize;
        let modulus = smallest_irreducible(p, f);
        let q = pp.q() as usize;

        let digits: Vec<Vec<u64>> = (0..q).map(|x| to_digits(x as u64, p, f)).collect();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let sum: Vec<u64> = digits[a]
                    .iter()
                    .zip(&digits[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * q + b] = from_digits(&sum, p);
                mul[a * q + b] = from_digits(&poly_mul_mod(&digits[a], &digits[b], &modulus, p), p);
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * q + b] == 0 {
                    neg[a] = b as Elem;
                }
                if mul[a * q + b] == 1 {
                    inv[a] = b as Elem;
                }
            }
        }
        Ok(FiniteField {
            inner: Arc::new(FieldData {
                pp,
                modulus,
                add,
                mul,
                neg,
                inv,
            }),
        })
    }

    pub fn prime_power(&self) -> PrimePower {
        self.inner.pp
    }

    pub fn p(&self) -> u64 {
        self.inner.pp.p()
    }

    pub fn q(&self) -> u64 {
        self.inner.pp.q()
    }

    pub fn order(&self) -> usize {
        self.inner.pp.q() as usize
    }

    /// Modulus coefficients, constant term first, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.inner.add[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.inner.mul[a as usize * self.order() + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.inner.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            None
        } else {
            Some(self.inner.inv[a as usize])
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc: Elem = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: &BigInt) -> Elem {
        n.mod_floor(&BigInt::from(self.p())).to_u32().expect("residue fits")
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        n.rem_euclid(self.p() as i64) as Elem
    }

    /// Basis of F_q over F_p: 1, x, ..., x^{f-1}.
    pub fn prime_basis(&self) -> Vec<Elem> {
        (0..self.inner.pp.f())
            .map(|i| self.p().pow(i) as Elem)
            .collect()
    }

    /// Smallest element (in encoding order) generating the unit group.
    pub fn primitive_element(&self) -> Elem {
        let n = self.q() - 1;
        let factors = prime_factors(n);
        (1..self.q() as Elem)
            .find(|&g| factors.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("unit group of a finite field is cyclic")
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q() as Elem
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn to_digits(mut x: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % p);
        x /= p;
    }
    out
}

fn from_digits(d: &[u64], p: u64) -> Elem {
    d.iter().rev().fold(0u64, |acc, &c| acc * p + c) as Elem
}

/// Product of two residues (length f) modulo a monic degree-f polynomial.
fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (f..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in modulus[..f].iter().enumerate() {
            let idx = deg - f + i;
            prod[idx] = (prod[idx] + (p - c) * m) % p;
        }
    }
    prod.truncate(f);
    prod.resize(f, 0);
    prod
}

/// Remainder of `a` modulo monic `m` over F_p (both low degree first).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * mi) % p;
            }
        }
        r.pop();
    }
    r
}

/// Lexicographically smallest monic irreducible polynomial of degree `f`
/// over F_p, comparing coefficient lists constant term first.
pub fn smallest_irreducible(p: u64, f: usize) -> Vec<u64> {
    let count = p.pow(f as u32);
    for t in 0..count {
        // c_0 is the most significant digit of t.
        let mut poly = to_digits(t, p, f);
        poly.reverse();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        for t in 0..p.pow(d as u32) {
            let mut divisor = to_digits(t, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}
