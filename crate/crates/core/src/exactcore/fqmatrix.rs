use super::field::{Elem, FiniteField};

/// Dense matrix over a finite field, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
    field: FiniteField,
}

impl FqMatrix {
    pub fn zero(field: &FiniteField, rows: usize, cols: usize) -> Self {
        FqMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FiniteField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics if `entries.len() != rows * cols` or an entry is not a field element.
    pub fn from_entries(field: &FiniteField, rows: usize, cols: usize, entries: Vec<Elem>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        assert!(entries.iter().all(|&x| (x as u64) < field.q()));
        FqMatrix {
            rows,
            cols,
            entries,
            field: field.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &FqMatrix) -> FqMatrix {
        assert_eq!(self.cols, other.rows);
        let k = &self.field;
        let mut out = Self::zero(k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, k.add(cur, k.mul(a, other.get(l, j))));
                }
            }
        }
        out
    }
}

/// Rank of a matrix over F_q.
pub fn fq_rank(a: &FqMatrix) -> usize {
    let mut buf = a.entries.clone();
    rank_in_place(&a.field, &mut buf, a.rows, a.cols)
}

/// Fraction-free Gaussian elimination on a row-major buffer, destroying it.
///
/// Columns are scanned left to right; the pivot is the first remaining row
/// with a nonzero entry in the current column.
pub fn rank_in_place(k: &FiniteField, m: &mut [Elem], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            for j in c..cols {
                m.swap(pr * cols + j, rank * cols + j);
            }
        }
        let pv = m[rank * cols + c];
        for r in rank + 1..rows {
            let v = m[r * cols + c];
            if v == 0 {
                continue;
            }
            let nv = k.neg(v);
            for j in c..cols {
                let x = k.mul(pv, m[r * cols + j]);
                let y = k.mul(nv, m[rank * cols + j]);
                m[r * cols + j] = k.add(x, y);
            }
        }
        rank += 1;
    }
    rank
}
