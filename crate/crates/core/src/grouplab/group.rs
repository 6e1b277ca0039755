use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::exactcore::{Elem, FiniteField};
use crate::modrep::ModuleRep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Baer,
    Heisenberg,
    Mtheta,
    LieExp,
    MatrixClosure,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupKind::Baer => "baer",
            GroupKind::Heisenberg => "heisenberg",
            GroupKind::Mtheta => "mtheta",
            GroupKind::LieExp => "lie_exp",
            GroupKind::MatrixClosure => "matrix_closure",
        };
        f.write_str(s)
    }
}

/// Group on `F_q^n` with law `u v = u + v + B(u, v)`, `B` bilinear.
///
/// Every output coordinate of `B` must be an input coordinate of no term,
/// which makes the image of `B` central and the law associative.
#[derive(Clone, Debug)]
pub struct CocycleGroup {
    field: FiniteField,
    dim: usize,
    /// `(i, k, j, c)`: coordinate `j` of the product gains `c u_i v_k`.
    terms: Vec<(usize, usize, usize, Elem)>,
}

impl CocycleGroup {
    pub fn new(field: &FiniteField, dim: usize, terms: Vec<(usize, usize, usize, Elem)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|t| t.3 != 0).collect();
        for &(i, k, j, _) in &terms {
            assert!(i < dim && k < dim && j < dim);
            assert!(
                terms.iter().all(|&(a, b, _, _)| a != j && b != j),
                "cocycle output coordinate {j} is also an input"
            );
        }
        CocycleGroup {
            field: field.clone(),
            dim,
            terms,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn decode(&self, mut x: usize) -> Vec<Elem> {
        let q = self.field.order();
        (0..self.dim)
            .map(|_| {
                let d = (x % q) as Elem;
                x /= q;
                d
            })
            .collect()
    }

    pub fn encode(&self, u: &[Elem]) -> usize {
        let q = self.field.order();
        u.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    pub fn mul_coords(&self, u: &[Elem], v: &[Elem]) -> Vec<Elem> {
        let k = &self.field;
        let mut w: Vec<Elem> = u.iter().zip(v).map(|(&a, &b)| k.add(a, b)).collect();
        for &(i, kk, j, c) in &self.terms {
            let t = k.mul(c, k.mul(u[i], v[kk]));
            w[j] = k.add(w[j], t);
        }
        w
    }

    /// `u^{-1} = -u + B(u, u)`, valid because `B` vanishes on its image.
    pub fn inv_coords(&self, u: &[Elem]) -> Vec<Elem> {
        let k = &self.field;
        let mut w: Vec<Elem> = u.iter().map(|&a| k.neg(a)).collect();
        for &(i, kk, j, c) in &self.terms {
            w[j] = k.add(w[j], k.mul(c, k.mul(u[i], u[kk])));
        }
        w
    }
}

/// Matrix group given by breadth-first closure of its generators.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    field: FiniteField,
    n: usize,
    elements: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, usize>,
    generator_matrices: Vec<Vec<Elem>>,
}

impl MatrixGroup {
    pub fn closure(field: &FiniteField, n: usize, gens: Vec<Vec<Elem>>, budget: &Budget) -> Result<Self> {
        let id = identity_matrix(n);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut head = 0;
        while head < elements.len() {
            let g = elements[head].clone();
            head += 1;
            for h in &gens {
                let gh = mat_mul(field, n, &g, h);
                if !index.contains_key(&gh) {
                    if elements.len() as u128 >= budget.closure {
                        return Err(Error::BudgetExceeded {
                            what: "matrix group closure",
                            needed: elements.len() as u128 + 1,
                            budget: budget.closure,
                        });
                    }
                    index.insert(gh.clone(), elements.len());
                    elements.push(gh);
                }
            }
        }
        Ok(MatrixGroup {
            field: field.clone(),
            n,
            elements,
            index,
            generator_matrices: gens,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn matrix(&self, g: usize) -> &[Elem] {
        &self.elements[g]
    }

    pub fn generator_matrices(&self) -> &[Vec<Elem>] {
        &self.generator_matrices
    }

    pub fn index_of(&self, m: &[Elem]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Cocycle(CocycleGroup),
    Matrix(MatrixGroup),
}

/// A fully enumerable finite group with elements numbered `0..order`.
#[derive(Clone, Debug)]
pub struct GroupTable {
    kind: GroupKind,
    repr: Repr,
    generators: Vec<usize>,
    expected_order: Option<u128>,
}

impl GroupTable {
    pub fn from_cocycle(kind: GroupKind, group: CocycleGroup, budget: &Budget) -> Result<Self> {
        let order = pow_saturating(group.field.q(), group.dim);
        budget.check_points("group order", order)?;
        let mut generators = Vec::new();
        for t in 0..group.dim {
            for c in group.field.prime_basis() {
                let mut u = vec![0; group.dim];
                u[t] = c;
                generators.push(group.encode(&u));
            }
        }
        Ok(GroupTable {
            kind,
            repr: Repr::Cocycle(group),
            generators,
            expected_order: Some(order),
        })
    }

    pub fn from_matrix(kind: GroupKind, group: MatrixGroup, expected_order: Option<u128>) -> Self {
        let generators = group
            .generator_matrices
            .iter()
            .map(|g| group.index_of(g).expect("generators lie in their closure"))
            .collect();
        GroupTable {
            kind,
            repr: Repr::Matrix(group),
            generators,
            expected_order,
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        match &self.repr {
            Repr::Cocycle(c) => c.field.order().pow(c.dim as u32),
            Repr::Matrix(m) => m.elements.len(),
        }
    }

    /// Predicted order; for exponential groups a mismatch is reported, not fatal.
    pub fn expected_order(&self) -> Option<u128> {
        self.expected_order
    }

    pub fn order_matches(&self) -> bool {
        self.expected_order.map_or(true, |o| o == self.order() as u128)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn cocycle(&self) -> Option<&CocycleGroup> {
        match &self.repr {
            Repr::Cocycle(c) => Some(c),
            Repr::Matrix(_) => None,
        }
    }

    pub fn matrices(&self) -> Option<&MatrixGroup> {
        match &self.repr {
            Repr::Matrix(m) => Some(m),
            Repr::Cocycle(_) => None,
        }
    }

    /// Coordinates (cocycle kinds) or row-major matrix entries.
    pub fn element(&self, g: usize) -> Vec<Elem> {
        match &self.repr {
            Repr::Cocycle(c) => c.decode(g),
            Repr::Matrix(m) => m.elements[g].clone(),
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            Repr::Cocycle(c) => c.encode(&c.mul_coords(&c.decode(a), &c.decode(b))),
            Repr::Matrix(m) => {
                let p = mat_mul(&m.field, m.n, &m.elements[a], &m.elements[b]);
                m.index[&p]
            }
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        match &self.repr {
            Repr::Cocycle(c) => c.encode(&c.inv_coords(&c.decode(a))),
            Repr::Matrix(m) => {
                let i = mat_inv(&m.field, m.n, &m.elements[a]).expect("group elements are invertible");
                m.index[&i]
            }
        }
    }

    /// `h^{-1} g h`
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.inv(h), self.mul(g, h))
    }

    /// `a^{-1} b^{-1} a b`
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// Commutes with every generator.
    pub fn is_central(&self, g: usize) -> bool {
        self.generators.iter().all(|&h| self.mul(g, h) == self.mul(h, g))
    }
}

pub fn identity_matrix(n: usize) -> Vec<Elem> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

pub fn mat_mul(k: &FiniteField, n: usize, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for l in 0..n {
            let x = a[i * n + l];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = k.add(out[i * n + j], k.mul(x, b[l * n + j]));
            }
        }
    }
    out
}

/// Gauss-Jordan inverse; `None` if singular.
pub fn mat_inv(k: &FiniteField, n: usize, a: &[Elem]) -> Option<Vec<Elem>> {
    let mut m = a.to_vec();
    let mut inv = identity_matrix(n);
    for c in 0..n {
        let pr = (c..n).find(|&r| m[r * n + c] != 0)?;
        for j in 0..n {
            m.swap(pr * n + j, c * n + j);
            inv.swap(pr * n + j, c * n + j);
        }
        let s = k.inv(m[c * n + c])?;
        for j in 0..n {
            m[c * n + j] = k.mul(s, m[c * n + j]);
            inv[c * n + j] = k.mul(s, inv[c * n + j]);
        }
        for r in 0..n {
            let f = m[r * n + c];
            if r == c || f == 0 {
                continue;
            }
            let nf = k.neg(f);
            for j in 0..n {
                m[r * n + j] = k.add(m[r * n + j], k.mul(nf, m[c * n + j]));
                inv[r * n + j] = k.add(inv[r * n + j], k.mul(nf, inv[c * n + j]));
            }
        }
    }
    Some(inv)
}

/// Baer group of an alternating representation: `F_q^l x F_q^e` with
/// `(a, y)(a', y') = (a + a', y + y' + beta(a, a'))`, where `beta` keeps the
/// strictly upper triangular half of the form. Commutators are
/// `[(a, y), (a', y')] = (0, a * a')` in every characteristic.
pub fn baer_group(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    if !theta.is_alternating() {
        return Err(Error::NotAlternating);
    }
    let (l, _, e) = theta.shape();
    budget.check_points("baer group order", pow_saturating(field.q(), l + e))?;
    let mut terms = Vec::new();
    for k in 0..l {
        for k2 in k + 1..l {
            for j in 0..e {
                // e_k in the domain slot, e_{k2} in the module slot.
                terms.push((k, k2, l + j, field.from_int(theta.entry(k2, k, j))));
            }
        }
    }
    let group = CocycleGroup::new(field, l + e, terms);
    GroupTable::from_cocycle(GroupKind::Baer, group, budget)
}

/// Block unitriangular group on `M (+) V (+) W`, coordinates `(a, v, w)`:
/// `(a, v, w)(a', v', w') = (a + a', v + v', w + w' + v * a')`.
pub fn heisenberg_group(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    let (l, d, e) = theta.shape();
    budget.check_points("heisenberg group order", pow_saturating(field.q(), l + d + e))?;
    let mut terms = Vec::new();
    for k in 0..l {
        for i in 0..d {
            for j in 0..e {
                terms.push((l + i, k, l + d + j, field.from_int(theta.entry(k, i, j))));
            }
        }
    }
    let group = CocycleGroup::new(field, l + d + e, terms);
    GroupTable::from_cocycle(GroupKind::Heisenberg, group, budget)
}

/// The additive group `F_q^l` of the module, acting on `F_q^{d+e}`.
pub fn mtheta_group(theta: &ModuleRep, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    let group = CocycleGroup::new(field, theta.l(), Vec::new());
    GroupTable::from_cocycle(GroupKind::Mtheta, group, budget)
}

/// Upper unitriangular `n×n` matrices, generated by elementary transvections.
pub fn unitriangular_group(n: usize, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for c in field.prime_basis() {
                let mut m = identity_matrix(n);
                m[i * n + j] = c;
                gens.push(m);
            }
        }
    }
    let expected = pow_saturating(field.q(), n * (n - 1) / 2);
    let g = MatrixGroup::closure(field, n, gens, budget)?;
    Ok(GroupTable::from_matrix(GroupKind::MatrixClosure, g, Some(expected)))
}

/// `GL_n(F_q)`, generated by transvections and `diag(g, 1, ..., 1)` for a
/// primitive element `g`.
pub fn general_linear_group(n: usize, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for c in field.prime_basis() {
                let mut m = identity_matrix(n);
                m[i * n + j] = c;
                gens.push(m);
            }
        }
    }
    if n > 0 && field.q() > 2 {
        let mut m = identity_matrix(n);
        m[0] = field.primitive_element();
        gens.push(m);
    }
    let q = field.q() as u128;
    let expected = (0..n as u32).fold(1u128, |acc, i| acc.saturating_mul(q.pow(n as u32) - q.pow(i)));
    let g = MatrixGroup::closure(field, n, gens, budget)?;
    Ok(GroupTable::from_matrix(GroupKind::MatrixClosure, g, Some(expected)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::make_field;

    fn b() -> Budget {
        Budget::default()
    }

    fn check_axioms(g: &GroupTable) {
        let n = g.order();
        let id = g.identity();
        for x in 0..n {
            assert_eq!(g.mul(x, id), x);
            assert_eq!(g.mul(id, x), x);
            assert_eq!(g.mul(x, g.inv(x)), id);
            assert_eq!(g.mul(g.inv(x), x), id);
        }
        let step = (n / 23).max(1);
        for x in (0..n).step_by(step) {
            for y in (0..n).step_by(step) {
                for z in (0..n).step_by(step) {
                    assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn baer_and_heisenberg_axioms() {
        let hull = ModuleRep::id1().alternating_hull();
        for (p, f) in [(2, 1), (3, 1), (2, 2)] {
            let k = make_field(p, f).unwrap();
            let g = baer_group(&hull, &k, &b()).unwrap();
            assert_eq!(g.order() as u64, k.q().pow(3));
            check_axioms(&g);
            let h = heisenberg_group(&ModuleRep::id1(), &k, &b()).unwrap();
            assert_eq!(h.order() as u64, k.q().pow(3));
            check_axioms(&h);
        }
        let k = make_field(3, 1).unwrap();
        let two = ModuleRep::id1().direct_sum(&ModuleRep::id1());
        let h = heisenberg_group(&two, &k, &b()).unwrap();
        assert_eq!(h.order(), 729);
        check_axioms(&h);
    }

    #[test]
    fn baer_commutator_is_the_form() {
        let theta = ModuleRep::id1().direct_sum(&ModuleRep::id1()).alternating_hull();
        let k = make_field(2, 1).unwrap();
        let g = baer_group(&theta, &k, &b()).unwrap();
        let c = g.cocycle().unwrap();
        let (l, e) = (theta.l(), theta.e());
        for x in (0..g.order()).step_by(7) {
            for y in (0..g.order()).step_by(5) {
                let comm = c.decode(g.commutator(x, y));
                let (a, a2) = (c.decode(x), c.decode(y));
                let mut expect = vec![0; l + e];
                for kk in 0..l {
                    for i in 0..l {
                        for j in 0..e {
                            let coeff = k.from_int(theta.entry(kk, i, j));
                            let t = k.mul(coeff, k.mul(a[i], a2[kk]));
                            expect[l + j] = k.add(expect[l + j], t);
                        }
                    }
                }
                assert_eq!(comm, expect);
            }
        }
    }

    #[test]
    fn heisenberg_commutator() {
        let theta = ModuleRep::from_i64(1, 2, 1, &[&[&[1], &[2]]]).unwrap();
        let k = make_field(3, 1).unwrap();
        let g = heisenberg_group(&theta, &k, &b()).unwrap();
        let c = g.cocycle().unwrap();
        for x in 0..g.order() {
            for y in (0..g.order()).step_by(11) {
                let (u, v) = (c.decode(x), c.decode(y));
                // (0, 0, v*a' - v'*a) with a = u[0], v = u[1..3]
                let star = |vv: &[Elem], a: Elem| k.mul(a, k.add(vv[0], k.mul(2, vv[1])));
                let w = k.sub(star(&u[1..3], v[0]), star(&v[1..3], u[0]));
                assert_eq!(c.decode(g.commutator(x, y)), vec![0, 0, 0, w]);
            }
        }
    }

    #[test]
    fn codomain_block_is_central() {
        let theta = ModuleRep::id1().alternating_hull();
        let k = make_field(5, 1).unwrap();
        let g = baer_group(&theta, &k, &b()).unwrap();
        let c = g.cocycle().unwrap();
        for y in 0..5 {
            assert!(g.is_central(c.encode(&[0, 0, y])));
        }
        assert!(!g.is_central(c.encode(&[1, 0, 0])));
    }

    #[test]
    fn not_alternating_rejected() {
        let k = make_field(3, 1).unwrap();
        assert!(matches!(baer_group(&ModuleRep::id1(), &k, &b()), Err(Error::NotAlternating)));
    }

    #[test]
    fn classical_orders() {
        let k = make_field(3, 1).unwrap();
        let u = unitriangular_group(3, &k, &b()).unwrap();
        assert_eq!(u.order(), 27);
        assert!(u.order_matches());
        check_axioms(&u);
        let gl = general_linear_group(2, &k, &b()).unwrap();
        assert_eq!(gl.order(), 48);
        assert!(gl.order_matches());
        let k4 = make_field(2, 2).unwrap();
        let gl = general_linear_group(2, &k4, &b()).unwrap();
        assert_eq!(gl.order(), 180);
    }

    #[test]
    fn closure_cap() {
        let k = make_field(5, 1).unwrap();
        let tight = Budget {
            closure: 100,
            ..Budget::default()
        };
        assert!(general_linear_group(2, &k, &tight).unwrap_err().is_budget());
    }

    #[test]
    fn matrix_inverse() {
        let k = make_field(7, 1).unwrap();
        let a = vec![2, 3, 1, 4];
        let inv = mat_inv(&k, 2, &a).unwrap();
        assert_eq!(mat_mul(&k, 2, &a, &inv), identity_matrix(2));
        assert!(mat_inv(&k, 2, &[1, 2, 2, 4]).is_none());
    }
}
