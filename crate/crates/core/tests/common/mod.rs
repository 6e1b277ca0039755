#![allow(dead_code)]

use askcount::grouplab::GroupTable;
use askcount::modrep::ModuleRep;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    (r.to_i64().unwrap()).rem_euclid(p as i64) as u64
}

/// Rank of a matrix over F_p by plain row reduction.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] % p != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % p;
                for k in 0..cols {
                    m[r][k] = (m[r][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// `p^l ask` of the m-th power for prime `p`, by building every block
/// diagonal matrix and reducing it.
pub fn oracle_ask_num(theta: &ModuleRep, m: usize, p: u64) -> BigInt {
    let (l, d, e) = theta.shape();
    let c: Vec<u64> = theta.flat().iter().map(|x| residue(x, p)).collect();
    let mut total = BigInt::from(0);
    let points = p.pow(l as u32);
    for idx in 0..points {
        let mut a = vec![0u64; l];
        let mut rest = idx;
        for v in a.iter_mut() {
            *v = rest % p;
            rest /= p;
        }
        let mut mat = vec![vec![0u64; m * e]; m * d];
        for b in 0..m {
            for i in 0..d {
                for j in 0..e {
                    let mut s = 0;
                    for k in 0..l {
                        s = (s + a[k] * c[(k * d + i) * e + j]) % p;
                    }
                    mat[b * d + i][b * e + j] = s;
                }
            }
        }
        let r = rank_mod_p(mat, p);
        total += Pow::pow(BigInt::from(p), (m * d - r) as u32);
    }
    total
}

pub fn oracle_ask(theta: &ModuleRep, m: usize, p: u64) -> BigRational {
    BigRational::new(oracle_ask_num(theta, m, p), Pow::pow(BigInt::from(p), theta.l() as u32))
}

/// Class number as the number of commuting ordered pairs over `|G|`.
pub fn commuting_pairs_classes(g: &GroupTable) -> u64 {
    let n = g.order();
    let mut pairs = 0u64;
    for a in 0..n {
        for b in 0..n {
            if g.mul(a, b) == g.mul(b, a) {
                pairs += 1;
            }
        }
    }
    assert_eq!(pairs % n as u64, 0);
    pairs / n as u64
}

/// Invertible symmetric `n×n` matrices over F_p vanishing on the edges.
pub fn oracle_vmax(n: usize, edges: &[(usize, usize)], p: u64) -> u64 {
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i == j || !edges.contains(&(i, j)))
        .collect();
    let mut count = 0;
    for idx in 0..p.pow(free.len() as u32) {
        let mut m = vec![vec![0u64; n]; n];
        let mut rest = idx;
        for &(i, j) in &free {
            m[i][j] = rest % p;
            m[j][i] = rest % p;
            rest /= p;
        }
        if rank_mod_p(m, p) == n {
            count += 1;
        }
    }
    count
}

pub fn random_rep(rng: &mut ChaCha8Rng, max_dim: usize, bound: i64) -> ModuleRep {
    let l = rng.gen_range(1..=max_dim);
    let d = rng.gen_range(1..=max_dim);
    let e = rng.gen_range(1..=max_dim);
    random_rep_shape(rng, l, d, e, bound)
}

pub fn random_rep_shape(rng: &mut ChaCha8Rng, l: usize, d: usize, e: usize, bound: i64) -> ModuleRep {
    ModuleRep::from_fn(l, d, e, |_, _, _| BigInt::from(rng.gen_range(-bound..=bound)))
}
