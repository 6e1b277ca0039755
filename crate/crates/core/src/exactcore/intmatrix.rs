use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            entries.extend(r);
        }
        IntMatrix {
            rows: n,
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += t * row[src]
    fn add_row(&mut self, dst: usize, src: usize, t: &BigInt) {
        for j in 0..self.cols {
            let v = &self.entries[src * self.cols + j] * t;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += t * col[src]
    fn add_col(&mut self, dst: usize, src: usize, t: &BigInt) {
        for i in 0..self.rows {
            let v = &self.entries[i * self.cols + src] * t;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.entries[i * self.cols + j]);
            self.entries[i * self.cols + j] = v;
        }
    }
}

/// Result of diagonalising `A` as `U A V = D`; only `V^{-1}` is kept, since
/// the row lattice of `A` is spanned by `d_i * (row i of V^{-1})`.
struct SmithData {
    invariants: Vec<BigInt>,
    inv_col_transform: IntMatrix,
}

fn smith(a: &IntMatrix) -> SmithData {
    let mut m = a.clone();
    let mut w = IntMatrix::identity(a.cols);
    let (rows, cols) = (a.rows, a.cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = m.get(i, j);
                if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < m.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap_rows(t, bi);
        m.swap_cols(t, bj);
        w.swap_rows(t, bj);

        let mut dirty = false;
        for i in t + 1..rows {
            if m.get(i, t).is_zero() {
                continue;
            }
            let qt = m.get(i, t).div_floor(m.get(t, t));
            m.add_row(i, t, &-qt);
            if !m.get(i, t).is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..cols {
            if m.get(t, j).is_zero() {
                continue;
            }
            let qt = m.get(t, j).div_floor(m.get(t, t));
            m.add_col(j, t, &-qt.clone());
            // Column op A <- A E with E = I - qt e_t e_j^T; V^{-1} <- E^{-1} V^{-1}.
            w.add_row(t, j, &qt);
            if !m.get(t, j).is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // Row and column cleared; enforce divisibility of the trailing block.
        let pivot = m.get(t, t).clone();
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m.get(i, j).is_multiple_of(&pivot)));
        if let Some(i) = offender {
            m.add_row(t, i, &BigInt::one());
            continue;
        }
        if pivot.is_negative() {
            m.negate_row(t);
        }
        t += 1;
    }
    let invariants = (0..t).map(|i| m.get(i, i).clone()).collect();
    SmithData {
        invariants,
        inv_col_transform: w,
    }
}

/// Nonzero invariant factors d_1 | d_2 | ... | d_r, with r the rank over Q.
pub fn smith_invariants(a: &IntMatrix) -> Vec<BigInt> {
    smith(a).invariants
}

pub fn rational_rank(a: &IntMatrix) -> usize {
    smith(a).invariants.len()
}

/// Basis of the saturation of the row lattice of `a`, in Hermite normal
/// form, together with the index of the row lattice in its saturation.
pub fn saturation_basis(a: &IntMatrix) -> (IntMatrix, BigInt) {
    let sd = smith(a);
    let r = sd.invariants.len();
    let index = sd.invariants.iter().fold(BigInt::one(), |acc, d| acc * d);
    let rows = (0..r).map(|i| sd.inv_col_transform.row(i).to_vec()).collect();
    let basis = hermite_rows(&IntMatrix::from_rows(a.cols, rows));
    (basis, index)
}

/// Row-style Hermite normal form: echelon, positive pivots, entries above
/// each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let best = (r..rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by(|&x, &y| m.get(x, c).abs().cmp(&m.get(y, c).abs()));
            let Some(b) = best else { break };
            m.swap_rows(r, b);
            let mut done = true;
            for i in r + 1..rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let qt = m.get(i, c).div_floor(m.get(r, c));
                m.add_row(i, r, &-qt);
                if !m.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m.get(r, c).is_zero() {
            continue;
        }
        if m.get(r, c).is_negative() {
            m.negate_row(r);
        }
        let pivot = m.get(r, c).clone();
        for i in 0..r {
            let qt = m.get(i, c).div_floor(&pivot);
            if !qt.is_zero() {
                m.add_row(i, r, &-qt);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let kept = (0..r).map(|i| m.row(i).to_vec()).collect();
    IntMatrix::from_rows(cols, kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// gcd of all k×k minors, by cofactor expansion.
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|s| s.count_ones() as usize == k)
            .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
            .collect()
    }

    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        let mut g = BigInt::zero();
        for rs in subsets(a.rows(), k) {
            for cs in subsets(a.cols(), k) {
                let sub: Vec<Vec<BigInt>> = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect())
                    .collect();
                g = g.gcd(&det(&sub));
            }
        }
        g
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariants(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]])), ints(&[1, 6]));
        assert_eq!(smith_invariants(&IntMatrix::identity(4)), ints(&[1, 1, 1, 1]));
        assert_eq!(smith_invariants(&IntMatrix::from_i64(&[&[2, 4], &[4, 8]])), ints(&[2]));
        assert_eq!(smith_invariants(&IntMatrix::zero(2, 3)), ints(&[]));
    }

    #[test]
    fn minor_gcd_oracle_on_fixed_cases() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[4, 8]]);
        assert_eq!(minor_gcd(&a, 1), BigInt::from(2));
        assert_eq!(minor_gcd(&a, 2), BigInt::zero());
    }

    #[test]
    fn saturation_examples() {
        let (b, n) = saturation_basis(&IntMatrix::from_i64(&[&[2]]));
        assert_eq!(b, IntMatrix::from_i64(&[&[1]]));
        assert_eq!(n, BigInt::from(2));

        let (b, n) = saturation_basis(&IntMatrix::identity(2));
        assert_eq!(b, IntMatrix::identity(2));
        assert_eq!(n, BigInt::one());

        let (b, n) = saturation_basis(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(b, IntMatrix::identity(2));
        assert_eq!(n, BigInt::from(6));
    }

    #[test]
    fn saturation_drops_dependent_rows() {
        let (b, n) = saturation_basis(&IntMatrix::from_i64(&[&[2, 2, 0], &[4, 4, 0], &[0, 0, 3]]));
        assert_eq!(b, IntMatrix::from_i64(&[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(n, BigInt::from(6));
    }

    #[test]
    fn hermite_is_canonical() {
        let a = IntMatrix::from_i64(&[&[3, 1], &[1, 0]]);
        assert_eq!(hermite_rows(&a), IntMatrix::identity(2));
        let a = IntMatrix::from_i64(&[&[-2, 4, 1], &[0, 3, 5]]);
        let h = hermite_rows(&a);
        assert_eq!(h, hermite_rows(&h));
        assert!(h.get(0, 0) > &BigInt::zero());
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
                IntMatrix::from_rows(
                    c,
                    v.chunks(c).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn smith_matches_minor_gcds(a in small_matrix()) {
            let inv = smith_invariants(&a);
            for w in inv.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert!(inv.iter().all(|d| d > &BigInt::zero()));
            let r = inv.len();
            let prod = inv.iter().fold(BigInt::one(), |acc, d| acc * d);
            prop_assert_eq!(prod, minor_gcd(&a, r));
            if r < a.rows().min(a.cols()) {
                prop_assert!(minor_gcd(&a, r + 1).is_zero());
            }
        }

        #[test]
        fn saturation_is_idempotent_and_contains_lattice(a in small_matrix()) {
            let (b, n) = saturation_basis(&a);
            let inv = smith_invariants(&a);
            let prod = inv.iter().fold(BigInt::one(), |acc, d| acc * d);
            prop_assert_eq!(&n, &prod);
            let (b2, n2) = saturation_basis(&b);
            prop_assert_eq!(b2, b.clone());
            prop_assert!(n2.is_one());
            // Stacking the original rows onto the saturated basis keeps the rank.
            let mut stacked = b.row_vecs();
            stacked.extend(a.row_vecs());
            prop_assert_eq!(rational_rank(&IntMatrix::from_rows(a.cols(), stacked)), inv.len());
        }
    }
}
