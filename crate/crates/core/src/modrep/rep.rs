use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactcore::{rational_rank, saturation_basis, smith_invariants, IntMatrix};

/// A finite free module representation `M -> Hom(V, W)` over the integers,
/// stored as its structure tensor `c[k][i][j]` with `k < l` indexing the
/// module basis, `i < d` the domain and `j < e` the codomain:
/// `(x * a)_j = sum_{i,k} c[k][i][j] x_i a_k`.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleRep {
    l: usize,
    d: usize,
    e: usize,
    tensor: Vec<BigInt>,
    name: Option<String>,
}

impl fmt::Debug for ModuleRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleRep")
            .field("name", &self.name)
            .field("shape", &(self.l, self.d, self.e))
            .field("tensor", &self.nested())
            .finish()
    }
}

impl ModuleRep {
    /// Panics if `tensor.len() != l * d * e`.
    pub fn from_flat(l: usize, d: usize, e: usize, tensor: Vec<BigInt>) -> Self {
        assert_eq!(tensor.len(), l * d * e, "tensor length does not match shape");
        ModuleRep {
            l,
            d,
            e,
            tensor,
            name: None,
        }
    }

    pub fn from_fn(l: usize, d: usize, e: usize, mut f: impl FnMut(usize, usize, usize) -> BigInt) -> Self {
        let mut tensor = Vec::with_capacity(l * d * e);
        for k in 0..l {
            for i in 0..d {
                for j in 0..e {
                    tensor.push(f(k, i, j));
                }
            }
        }
        Self::from_flat(l, d, e, tensor)
    }

    /// Build from nested `tensor[k][i][j]`, reporting the first ragged slice.
    pub fn from_nested(l: usize, d: usize, e: usize, nested: Vec<Vec<Vec<BigInt>>>) -> Result<Self> {
        check_len("tensor".into(), l, nested.len())?;
        let mut flat = Vec::with_capacity(l * d * e);
        for (k, slice) in nested.into_iter().enumerate() {
            check_len(format!("tensor[{k}]"), d, slice.len())?;
            for (i, row) in slice.into_iter().enumerate() {
                check_len(format!("tensor[{k}][{i}]"), e, row.len())?;
                flat.extend(row);
            }
        }
        Ok(Self::from_flat(l, d, e, flat))
    }

    pub fn from_i64(l: usize, d: usize, e: usize, nested: &[&[&[i64]]]) -> Result<Self> {
        let nested = nested
            .iter()
            .map(|s| s.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .collect();
        Self::from_nested(l, d, e, nested)
    }

    pub fn zero(l: usize, d: usize, e: usize) -> Self {
        Self::from_fn(l, d, e, |_, _, _| BigInt::zero())
    }

    /// The multiplication map `Z -> Hom(Z, Z)`.
    pub fn id1() -> Self {
        Self::from_flat(1, 1, 1, vec![BigInt::one()]).named("id1")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("rep({},{},{})", self.l, self.d, self.e))
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.l, self.d, self.e)
    }

    #[inline]
    pub fn entry(&self, k: usize, i: usize, j: usize) -> &BigInt {
        &self.tensor[(k * self.d + i) * self.e + j]
    }

    pub fn flat(&self) -> &[BigInt] {
        &self.tensor
    }

    /// The d×e matrix of the k-th module basis element.
    pub fn slice(&self, k: usize) -> &[BigInt] {
        let n = self.d * self.e;
        &self.tensor[k * n..(k + 1) * n]
    }

    pub fn nested(&self) -> Vec<Vec<Vec<BigInt>>> {
        (0..self.l)
            .map(|k| {
                (0..self.d)
                    .map(|i| (0..self.e).map(|j| self.entry(k, i, j).clone()).collect())
                    .collect()
            })
            .collect()
    }

    /// Tensor equality, ignoring names.
    pub fn same_tensor(&self, other: &ModuleRep) -> bool {
        self.shape() == other.shape() && self.tensor == other.tensor
    }

    /// `a` maps to `(a theta)^{(+) m}`: block-diagonal replication.
    pub fn mth_power(&self, m: usize) -> ModuleRep {
        assert!(m >= 1, "power must be at least 1");
        let (d, e) = (self.d, self.e);
        let rep = Self::from_fn(self.l, m * d, m * e, |k, bi, bj| {
            if bi / d == bj / e {
                self.entry(k, bi % d, bj % e).clone()
            } else {
                BigInt::zero()
            }
        });
        match &self.name {
            Some(n) => rep.named(format!("{m}^{n}")),
            None => rep,
        }
    }

    /// Swap the module and codomain axes: shape `(e, d, l)`.
    pub fn knuth_dual(&self) -> ModuleRep {
        let rep = Self::from_fn(self.e, self.d, self.l, |j, i, k| self.entry(k, i, j).clone());
        match &self.name {
            Some(n) => rep.named(format!("{n}*")),
            None => rep,
        }
    }

    /// Alternating hull on `V (+) M`, domain and module both indexed
    /// `[V-part | M-part]`.
    pub fn alternating_hull(&self) -> ModuleRep {
        let (l, d) = (self.l, self.d);
        let n = d + l;
        let rep = Self::from_fn(n, n, self.e, |k, i, j| {
            if k >= d && i < d {
                self.entry(k - d, i, j).clone()
            } else if k < d && i >= d {
                -self.entry(i - d, k, j)
            } else {
                BigInt::zero()
            }
        });
        match &self.name {
            Some(nm) => rep.named(format!("hull({nm})")),
            None => rep,
        }
    }

    /// Block-diagonal in all three axes.
    pub fn direct_sum(&self, other: &ModuleRep) -> ModuleRep {
        let (l, d, e) = self.shape();
        let rep = Self::from_fn(l + other.l, d + other.d, e + other.e, |k, i, j| {
            match (k < l, i < d, j < e) {
                (true, true, true) => self.entry(k, i, j).clone(),
                (false, false, false) => other.entry(k - l, i - d, j - e).clone(),
                _ => BigInt::zero(),
            }
        });
        match (&self.name, &other.name) {
            (Some(a), Some(b)) => rep.named(format!("{a}+{b}")),
            _ => rep,
        }
    }

    /// `a * a = 0` for all `a`: square, skew in (module, domain), zero diagonal.
    pub fn is_alternating(&self) -> bool {
        if self.d != self.l {
            return false;
        }
        for k in 0..self.l {
            for j in 0..self.e {
                if !self.entry(k, k, j).is_zero() {
                    return false;
                }
            }
            for i in 0..k {
                for j in 0..self.e {
                    if *self.entry(k, i, j) != -self.entry(i, k, j) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The ℓ × (d·e) matrix whose rows are the images of the module basis.
    pub fn flatten(&self) -> IntMatrix {
        let n = self.d * self.e;
        IntMatrix::from_rows(n, (0..self.l).map(|k| self.slice(k).to_vec()).collect())
    }

    pub fn is_immersive(&self) -> bool {
        let flat = self.flatten();
        let inv = smith_invariants(&flat);
        inv.len() == self.l && inv.iter().all(|d| d.is_one())
    }

    pub fn rational_rank(&self) -> usize {
        rational_rank(&self.flatten())
    }

    /// Replace the module by the saturation of its image in `Hom(V, W)`.
    /// Returns the immersive representation and the index of the image in
    /// its saturation.
    pub fn saturate(&self) -> (ModuleRep, BigInt) {
        let (basis, index) = saturation_basis(&self.flatten());
        let rows = basis.row_vecs();
        let rep = Self::from_flat(rows.len(), self.d, self.e, rows.into_iter().flatten().collect());
        let rep = match &self.name {
            Some(n) => rep.named(format!("sat({n})")),
            None => rep,
        };
        (rep, index)
    }
}

fn check_len(location: String, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            location,
            expected,
            found,
        })
    }
}
