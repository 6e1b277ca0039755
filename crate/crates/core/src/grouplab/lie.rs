use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::group::{identity_matrix, mat_mul, GroupKind, GroupTable, MatrixGroup};
use crate::budget::{pow_saturating, Budget};
use crate::error::{Error, Result};
use crate::exactcore::{rational_rank, Elem, FiniteField, IntMatrix};
use crate::modrep::io::{int_from_json, int_to_json};
use crate::modrep::ModuleRep;

/// A Lie subalgebra of strictly upper triangular integer matrices, with
/// its structure constants `[b_i, b_k] = sum_j s[i][k][j] b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieData {
    n: usize,
    basis: Vec<Vec<BigInt>>,
    structure: Vec<BigInt>,
}

impl LieData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Row-major `n×n` entries of basis element `k`.
    pub fn basis_matrix(&self, k: usize) -> &[BigInt] {
        &self.basis[k]
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(Zero::is_zero)
    }

    pub fn structure_constant(&self, i: usize, k: usize, j: usize) -> &BigInt {
        let r = self.dim();
        &self.structure[(i * r + k) * r + j]
    }

    /// Strictly upper triangular matrix units `E_{ij}` (0-based `i < j`).
    pub fn from_units(n: usize, units: &[(usize, usize)]) -> Result<Self> {
        let basis = units
            .iter()
            .map(|&(i, j)| {
                let mut m = vec![BigInt::zero(); n * n];
                if i < n && j < n {
                    m[i * n + j] = BigInt::one();
                }
                m
            })
            .collect();
        lie_validate(n, basis)
    }

    /// The full algebra of strictly upper triangular `n×n` matrices, basis
    /// ordered by superdiagonal and then by row.
    pub fn full_upper(n: usize) -> Result<Self> {
        let mut units = Vec::new();
        for gap in 1..n {
            for i in 0..n - gap {
                units.push((i, i + gap));
            }
        }
        Self::from_units(n, &units)
    }
}

fn commutator(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for l in 0..n {
            for j in 0..n {
                out[i * n + j] += &a[i * n + l] * &b[l * n + j] - &b[i * n + l] * &a[l * n + j];
            }
        }
    }
    out
}

/// Coordinates of `v` in the span of `basis` over Q, if it lies there.
fn solve_in_span(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigRational>> {
    let r = basis.len();
    let rows = v.len();
    // Augmented system: columns are basis vectors, last column is v.
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|t| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| BigRational::from_integer(b[t].clone())).collect();
            row.push(BigRational::from_integer(v[t].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..r {
        let Some(p) = (pr..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(pr, p);
        let piv = m[pr][c].clone();
        for x in m[pr].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..rows {
            if i != pr && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for t in 0..=r {
                    let sub = &f * &m[pr][t];
                    m[i][t] -= sub;
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    if m[pr..].iter().any(|row| !row[r].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); r];
    for (row, &c) in pivots.iter().enumerate() {
        sol[c] = m[row][r].clone();
    }
    Some(sol)
}

/// Check shape, independence and integral bracket closure; compute the
/// structure constants.
pub fn lie_validate(n: usize, basis: Vec<Vec<BigInt>>) -> Result<LieData> {
    for (k, b) in basis.iter().enumerate() {
        if b.len() != n * n {
            return Err(Error::NotNilpotentShape(k));
        }
        for i in 0..n {
            for j in 0..=i {
                if !b[i * n + j].is_zero() {
                    return Err(Error::NotNilpotentShape(k));
                }
            }
        }
    }
    let r = basis.len();
    if rational_rank(&IntMatrix::from_rows(n * n, basis.clone())) != r {
        return Err(Error::LinearlyDependent);
    }
    let mut structure = vec![BigInt::zero(); r * r * r];
    for i in 0..r {
        for k in 0..r {
            let br = commutator(n, &basis[i], &basis[k]);
            let coords = solve_in_span(&basis, &br).ok_or(Error::NotClosed(i, k))?;
            for (j, c) in coords.into_iter().enumerate() {
                if !c.is_integer() {
                    return Err(Error::NotClosed(i, k));
                }
                structure[(i * r + k) * r + j] = c.to_integer();
            }
        }
    }
    Ok(LieData {
        n,
        basis,
        structure,
    })
}

/// The inclusion of the algebra into `n×n` matrices:
/// `c[k][i][j] = (b_k)_{ij}`.
pub fn lie_inclusion_rep(lie: &LieData) -> ModuleRep {
    let n = lie.n;
    ModuleRep::from_fn(lie.dim(), n, n, |k, i, j| lie.basis[k][i * n + j].clone()).named("iota")
}

/// Right adjoint representation `a -> (x -> [x, a])`:
/// `c[k][i][j] = s[i][k][j]`.
pub fn lie_adjoint_rep(lie: &LieData) -> ModuleRep {
    let r = lie.dim();
    ModuleRep::from_fn(r, r, r, |k, i, j| lie.structure_constant(i, k, j).clone()).named("ad")
}

/// `exp(X) = sum_{k < n} X^k / k!` for nilpotent `X` over F_q, `p >= n`.
fn exp_nilpotent(field: &FiniteField, n: usize, x: &[Elem]) -> Vec<Elem> {
    let mut out = identity_matrix(n);
    let mut power = identity_matrix(n);
    let mut fact: Elem = 1;
    for k in 1..n {
        power = mat_mul(field, n, &power, x);
        fact = field.mul(fact, field.from_i64(k as i64));
        let s = field.inv(fact).expect("k! is a unit when p >= n");
        for (o, &v) in out.iter_mut().zip(&power) {
            *o = field.add(*o, field.mul(s, v));
        }
    }
    out
}

/// Closure of `{exp(c b_i)}` in `U_n(F_q)`. Multiples `c` range over an
/// F_p-basis of F_q, which generates the same group since
/// `exp(c b) exp(c' b) = exp((c + c') b)`.
pub fn lie_exp_group(lie: &LieData, field: &FiniteField, budget: &Budget) -> Result<GroupTable> {
    let n = lie.n;
    if (field.p() as u128) < n as u128 {
        return Err(Error::CharTooSmall { p: field.p(), n });
    }
    let expected = pow_saturating(field.q(), lie.dim());
    let mut gens = Vec::new();
    for b in &lie.basis {
        let reduced: Vec<Elem> = b.iter().map(|x| field.from_int(x)).collect();
        for c in field.prime_basis() {
            let x: Vec<Elem> = reduced.iter().map(|&v| field.mul(c, v)).collect();
            gens.push(exp_nilpotent(field, n, &x));
        }
    }
    let g = MatrixGroup::closure(field, n, gens, budget)?;
    Ok(GroupTable::from_matrix(GroupKind::LieExp, g, Some(expected)))
}

#[derive(Serialize, Deserialize)]
struct RawLie {
    n: usize,
    basis: Vec<Vec<Vec<Value>>>,
}

pub fn lie_from_json(s: &str) -> Result<LieData> {
    let raw: RawLie = serde_json::from_str(s)?;
    let mut basis = Vec::new();
    for (k, m) in raw.basis.iter().enumerate() {
        if m.len() != raw.n || m.iter().any(|row| row.len() != raw.n) {
            return Err(Error::NotNilpotentShape(k));
        }
        let flat = m
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| int_from_json(v, &format!("basis[{k}][{i}][{j}]")))
            .collect::<Result<Vec<_>>>()?;
        basis.push(flat);
    }
    lie_validate(raw.n, basis)
}

pub fn lie_to_json(lie: &LieData) -> String {
    let n = lie.n;
    let basis = lie
        .basis
        .iter()
        .map(|b| b.chunks(n.max(1)).map(|row| row.iter().map(int_to_json).collect()).collect())
        .collect();
    serde_json::to_string_pretty(&RawLie { n, basis }).expect("plain data serializes")
}

/// Structure constants as nested `s[i][k][j]`, for reports.
pub fn structure_constants(lie: &LieData) -> Vec<Vec<Vec<BigInt>>> {
    let r = lie.dim();
    (0..r)
        .map(|i| (0..r).map(|k| (0..r).map(|j| lie.structure_constant(i, k, j).clone()).collect()).collect())
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::make_field;
    use crate::grouplab::counting::{class_count_naive, natural_orbit_count};
    use crate::modrep::{ask, AskValue};
    use crate::exactcore::PrimePower;

    fn b() -> Budget {
        Budget::default()
    }

    fn n3() -> LieData {
        // E12, E23, E13
        LieData::from_units(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn n3_structure() {
        let l = n3();
        let one = BigInt::one();
        assert_eq!(l.structure_constant(0, 1, 2), &one);
        assert_eq!(l.structure_constant(1, 0, 2), &-one);
        let nonzero = l.structure.iter().filter(|s| !s.is_zero()).count();
        assert_eq!(nonzero, 2);
        assert!(!l.is_abelian());
    }

    #[test]
    fn abelian_subalgebra() {
        let l = LieData::from_units(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(l.is_abelian());
    }

    #[test]
    fn non_closed_rejected() {
        let mut e12_23 = vec![BigInt::zero(); 9];
        e12_23[1] = BigInt::one();
        e12_23[5] = BigInt::one();
        let mut e12 = vec![BigInt::zero(); 9];
        e12[1] = BigInt::one();
        assert!(matches!(lie_validate(3, vec![e12_23, e12]), Err(Error::NotClosed(0, 1))));
    }

    #[test]
    fn non_integral_closure_rejected() {
        // [E12, E23] = E13 = (1/2)(2 E13)
        let mut basis = Vec::new();
        for (i, j, c) in [(0, 1, 1), (1, 2, 1), (0, 2, 2)] {
            let mut m = vec![BigInt::zero(); 9];
            m[i * 3 + j] = BigInt::from(c);
            basis.push(m);
        }
        assert!(matches!(lie_validate(3, basis), Err(Error::NotClosed(0, 1))));
    }

    #[test]
    fn shape_errors() {
        let mut lower = vec![BigInt::zero(); 4];
        lower[2] = BigInt::one();
        assert!(matches!(lie_validate(2, vec![lower]), Err(Error::NotNilpotentShape(0))));
        let mut e = vec![BigInt::zero(); 4];
        e[1] = BigInt::one();
        assert!(matches!(lie_validate(2, vec![e.clone(), e]), Err(Error::LinearlyDependent)));
    }

    #[test]
    fn inclusion_and_adjoint_asks() {
        let l = n3();
        let iota = lie_inclusion_rep(&l);
        assert!(iota.is_immersive());
        let ad = lie_adjoint_rep(&l);
        assert!(ad.is_alternating());
        for q in [2u64, 3, 5, 7] {
            let k = make_field(q, 1).unwrap();
            let pp = PrimePower::from_q(q).unwrap();
            let qi = q as i64;
            assert_eq!(ask(&iota, &k, &b()).unwrap(), AskValue::new(pp, BigInt::from(3 * qi - 2), 0));
            assert_eq!(ask(&ad, &k, &b()).unwrap(), AskValue::new(pp, BigInt::from(qi * qi + qi - 1), 0));
        }
        let n2 = LieData::full_upper(2).unwrap();
        let k = make_field(5, 1).unwrap();
        assert_eq!(
            ask(&lie_inclusion_rep(&n2), &k, &b()).unwrap().to_rational(),
            BigRational::from_integer(BigInt::from(9))
        );
    }

    #[test]
    fn exp_groups() {
        let n2 = LieData::full_upper(2).unwrap();
        let g = lie_exp_group(&n2, &make_field(3, 1).unwrap(), &b()).unwrap();
        assert_eq!(g.order(), 3);
        let g = lie_exp_group(&n3(), &make_field(5, 1).unwrap(), &b()).unwrap();
        assert_eq!(g.order(), 125);
        assert!(g.order_matches());
        assert_eq!(class_count_naive(&g, &b()).unwrap(), 29);
        assert_eq!(natural_orbit_count(&g, &b()).unwrap(), 13);
        assert!(matches!(
            lie_exp_group(&n3(), &make_field(2, 1).unwrap(), &b()),
            Err(Error::CharTooSmall { p: 2, n: 3 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let l = n3();
        let back = lie_from_json(&lie_to_json(&l)).unwrap();
        assert_eq!(back, l);
        let err = lie_from_json(r#"{"n":2,"basis":[[[0,1],[0]]]}"#).unwrap_err();
        assert!(matches!(err, Error::NotNilpotentShape(0)));
    }
}
