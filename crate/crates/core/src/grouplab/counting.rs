use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use super::group::GroupTable;
use super::unionfind::UnionFind;
use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::exactcore::{Elem, FiniteField};
use crate::modrep::{ask, ask_power, q_pow, ModuleRep};

/// Which elements to conjugate by when merging classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateBy {
    Generators,
    AllElements,
}

/// Number of conjugacy classes by union-find over `g -> h^{-1} g h`.
pub fn class_count_naive(g: &GroupTable, budget: &Budget) -> Result<u64> {
    class_count_naive_with(g, ConjugateBy::Generators, budget)
}

pub fn class_count_naive_with(g: &GroupTable, by: ConjugateBy, budget: &Budget) -> Result<u64> {
    Ok(conjugacy_classes(g, by, budget)?.len() as u64)
}

/// Sizes of all conjugacy classes.
pub fn conjugacy_classes(g: &GroupTable, by: ConjugateBy, budget: &Budget) -> Result<Vec<usize>> {
    let n = g.order();
    budget.check_group("naive class count", n as u128)?;
    let conjugators: Vec<usize> = match by {
        ConjugateBy::Generators => g.generators().to_vec(),
        ConjugateBy::AllElements => (0..n).collect(),
    };
    let inverses: Vec<usize> = conjugators.iter().map(|&h| g.inv(h)).collect();
    let mut uf = UnionFind::new(n);
    for x in 0..n {
        for (&h, &hi) in conjugators.iter().zip(&inverses) {
            let y = g.mul(hi, g.mul(x, h));
            uf.union(x, y);
        }
    }
    Ok(uf.component_sizes())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralKind {
    Baer,
    Heisenberg,
}

/// Class number from average kernel sizes:
/// Baer groups give `q^e ask(theta)`; Heisenberg groups give
/// `q^e ask(hull(theta))`, cross-checked against `q^{l-d+e} ask(2^(theta*))`.
pub fn class_count_structural(
    theta: &ModuleRep,
    field: &FiniteField,
    kind: StructuralKind,
    budget: &Budget,
) -> Result<BigInt> {
    let (l, d, e) = theta.shape();
    let q = field.prime_power();
    match kind {
        StructuralKind::Baer => {
            if !theta.is_alternating() {
                return Err(Error::NotAlternating);
            }
            let v = ask(theta, field, budget)?.scale_q_pow(e as i64);
            integral(v, "baer class number")
        }
        StructuralKind::Heisenberg => {
            let via_hull = ask(&theta.alternating_hull(), field, budget)?.scale_q_pow(e as i64);
            let via_dual = ask_power(&theta.knuth_dual(), 2, field, budget)?
                .scale_q_pow(l as i64 - d as i64 + e as i64);
            if via_hull != via_dual {
                return Err(Error::Invalid(format!(
                    "heisenberg class number formulas disagree at q = {q}: {via_hull} vs {via_dual}"
                )));
            }
            integral(via_hull, "heisenberg class number")
        }
    }
}

fn integral(v: BigRational, context: &str) -> Result<BigInt> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::NonIntegral {
            value: v.to_string(),
            context: context.into(),
        })
    }
}

/// A finite group acting on the right of a finite set, both enumerated.
pub trait FiniteAction {
    fn group_order(&self) -> usize;
    fn point_count(&self) -> usize;
    fn group_identity(&self) -> usize;
    fn group_mul(&self, g: usize, h: usize) -> usize;
    /// `x g`
    fn act(&self, x: usize, g: usize) -> usize;
}

/// Orbit count via `sum_g |Fix(g)| / |G|`, after spot-checking the action
/// axioms on a deterministic sample.
pub fn burnside_orbits(action: &impl FiniteAction, budget: &Budget) -> Result<u64> {
    let (ng, nx) = (action.group_order(), action.point_count());
    budget.check_points("burnside enumeration", ng as u128 * nx as u128)?;
    let id = action.group_identity();
    let gstep = (ng / 17).max(1);
    let xstep = (nx / 17).max(1);
    for x in (0..nx).step_by(xstep) {
        if action.act(x, id) != x {
            return Err(Error::NotAnAction(format!("identity moves point {x}")));
        }
        for g in (0..ng).step_by(gstep) {
            for h in (0..ng).step_by(gstep) {
                if action.act(action.act(x, g), h) != action.act(x, action.group_mul(g, h)) {
                    return Err(Error::NotAnAction(format!(
                        "(x g) h != x (g h) for x = {x}, g = {g}, h = {h}"
                    )));
                }
            }
        }
    }
    let fixed: u128 = (0..ng)
        .map(|g| (0..nx).filter(|&x| action.act(x, g) == x).count() as u128)
        .sum();
    let (quot, rem) = fixed.div_rem(&(ng as u128));
    if rem != 0 {
        return Err(Error::NonIntegral {
            value: format!("{fixed}/{ng}"),
            context: "burnside orbit count".into(),
        });
    }
    Ok(quot as u64)
}

/// Orbits of a group on a set by union-find over generator moves.
pub fn orbit_count_union_find(points: usize, generators: usize, act: impl Fn(usize, usize) -> usize) -> u64 {
    let mut uf = UnionFind::new(points);
    for x in 0..points {
        for g in 0..generators {
            uf.union(x, act(x, g));
        }
    }
    uf.components() as u64
}

/// `F_q^l` acting on `F_q^{d+e}` by `(x, y) a = (x, x * a + y)`.
pub struct MthetaAction {
    field: FiniteField,
    l: usize,
    d: usize,
    e: usize,
    /// Reduced tensor, indexed `(k d + i) e + j`.
    tensor: Vec<Elem>,
}

impl MthetaAction {
    pub fn new(theta: &ModuleRep, field: &FiniteField) -> Self {
        MthetaAction {
            field: field.clone(),
            l: theta.l(),
            d: theta.d(),
            e: theta.e(),
            tensor: theta.flat().iter().map(|x| field.from_int(x)).collect(),
        }
    }

    fn decode(&self, mut x: usize, len: usize) -> Vec<Elem> {
        let q = self.field.order();
        (0..len)
            .map(|_| {
                let v = (x % q) as Elem;
                x /= q;
                v
            })
            .collect()
    }

    fn encode(&self, u: &[Elem]) -> usize {
        let q = self.field.order();
        u.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    fn act_coords(&self, point: &[Elem], a: &[Elem]) -> Vec<Elem> {
        let k = &self.field;
        let (d, e) = (self.d, self.e);
        let mut out = point.to_vec();
        for kk in 0..self.l {
            if a[kk] == 0 {
                continue;
            }
            for i in 0..d {
                let xa = k.mul(point[i], a[kk]);
                if xa == 0 {
                    continue;
                }
                for j in 0..e {
                    let c = self.tensor[(kk * d + i) * e + j];
                    out[d + j] = k.add(out[d + j], k.mul(c, xa));
                }
            }
        }
        out
    }
}

impl FiniteAction for MthetaAction {
    fn group_order(&self) -> usize {
        self.field.order().pow(self.l as u32)
    }

    fn point_count(&self) -> usize {
        self.field.order().pow((self.d + self.e) as u32)
    }

    fn group_identity(&self) -> usize {
        0
    }

    fn group_mul(&self, g: usize, h: usize) -> usize {
        let (a, b) = (self.decode(g, self.l), self.decode(h, self.l));
        let s: Vec<Elem> = a.iter().zip(&b).map(|(&x, &y)| self.field.add(x, y)).collect();
        self.encode(&s)
    }

    fn act(&self, x: usize, g: usize) -> usize {
        let point = self.decode(x, self.d + self.e);
        let a = self.decode(g, self.l);
        self.encode(&self.act_coords(&point, &a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    Bfs,
    Burnside,
    Formula,
}

/// Orbits of the module on `F_q^{d+e}`.
pub fn mtheta_orbit_count(theta: &ModuleRep, field: &FiniteField, mode: OrbitMode, budget: &Budget) -> Result<BigInt> {
    let (l, d, e) = theta.shape();
    match mode {
        OrbitMode::Formula => integral(ask(theta, field, budget)?.scale_q_pow(e as i64), "orbit formula"),
        OrbitMode::Bfs => {
            budget.check_points("orbit union-find", pow_saturating(field.q(), d + e))?;
            let action = MthetaAction::new(theta, field);
            let basis = field.prime_basis();
            let gens: Vec<Vec<Elem>> = (0..l)
                .flat_map(|k| {
                    basis.iter().map(move |&c| {
                        let mut a = vec![0; l];
                        a[k] = c;
                        a
                    })
                })
                .collect();
            let n = action.point_count();
            let count = orbit_count_union_find(n, gens.len(), |x, g| {
                action.encode(&action.act_coords(&action.decode(x, d + e), &gens[g]))
            });
            Ok(BigInt::from(count))
        }
        OrbitMode::Burnside => {
            budget.check_points("burnside enumeration", pow_saturating(field.q(), l + d + e))?;
            Ok(BigInt::from(burnside_orbits(&MthetaAction::new(theta, field), budget)?))
        }
    }
}

/// Orbits of a matrix group on row vectors `F_q^n` under `v -> v g`.
pub fn natural_orbit_count(g: &GroupTable, budget: &Budget) -> Result<u64> {
    let mg = g
        .matrices()
        .ok_or_else(|| Error::Invalid("natural action needs a matrix group".into()))?;
    let (n, k) = (mg.n(), mg.field());
    let points = pow_saturating(k.q(), n);
    budget.check_points("natural orbit union-find", points)?;
    let q = k.order();
    let decode = |mut x: usize| -> Vec<Elem> {
        (0..n)
            .map(|_| {
                let v = (x % q) as Elem;
                x /= q;
                v
            })
            .collect()
    };
    let encode = |u: &[Elem]| u.iter().rev().fold(0usize, |acc, &c| acc * q + c as usize);
    let gens = mg.generator_matrices();
    Ok(orbit_count_union_find(points as usize, gens.len(), |x, gi| {
        let v = decode(x);
        let m = &gens[gi];
        let mut out = vec![0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for j in 0..n {
                out[j] = k.add(out[j], k.mul(vi, m[i * n + j]));
            }
        }
        encode(&out)
    }))
}

/// `q^k * count` as a convenience for identities with rescaled sides.
pub fn scaled(field: &FiniteField, count: &BigInt, k: i64) -> BigRational {
    BigRational::from_integer(count.clone()) * q_pow(field.prime_power(), k)
}

/// Checks that class sizes sum to the group order.
pub fn class_equation_holds(g: &GroupTable, budget: &Budget) -> Result<bool> {
    let sizes = conjugacy_classes(g, ConjugateBy::Generators, budget)?;
    Ok(sizes.iter().sum::<usize>() == g.order())
}
