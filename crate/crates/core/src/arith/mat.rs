//! Dense exact linear algebra: row reduction, kernels, echelon bases.
//!
//! Row reduction always pivots on the leftmost available column, so kernel
//! bases and echelon bases are canonical for a given column layout. The
//! solvers work on plain `Vec<Vec<Elem>>` rows; [`Mat`] is a contiguous
//! matrix used for the degreewise restriction/action maps where matvec
//! throughput matters.

use super::field::{Field, FieldElem, FieldSpec, PrimeField, Rationals};
use super::ArithError;

/// Contiguous row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(f: F, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity(f: F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows(f: F, rows: Vec<Vec<F::Elem>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        let _ = f;
        Mat { rows: nrows, cols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, f: F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![f.zero(); self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = f.zero();
            for (a, x) in row.iter().zip(v) {
                if !f.is_zero(a) && !f.is_zero(x) {
                    f.add_assign(&mut acc, &f.mul(a, x));
                }
            }
            out[i] = acc;
        }
        out
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn rank(&self, f: F) -> usize {
        let mut rows = self.to_rows();
        rref(f, &mut rows).len()
    }
}

/// In-place reduced row echelon form. Returns the pivot columns in order.
/// Zero rows are moved to the bottom and truncated away.
pub fn rref<F: Field>(f: F, rows: &mut Vec<Vec<F::Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots: Vec<usize> = Vec::new();
    let mut next = 0usize;
    for col in 0..ncols {
        // find a pivot row for this column
        let mut sel = None;
        for (i, row) in rows.iter().enumerate().skip(next) {
            if !f.is_zero(&row[col]) {
                sel = Some(i);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        rows.swap(next, sel);
        // normalize to a unit pivot
        if rows[next][col] != f.one() {
            let inv = f.inv(&rows[next][col]).expect("nonzero pivot");
            for x in rows[next][col..].iter_mut() {
                if !f.is_zero(x) {
                    *x = f.mul(x, &inv);
                }
            }
        }
        // eliminate everywhere else
        let (before, rest) = rows.split_at_mut(next);
        let (pivot_row, after) = rest.split_first_mut().unwrap();
        for row in before.iter_mut().chain(after.iter_mut()) {
            if !f.is_zero(&row[col]) {
                let c = std::mem::replace(&mut row[col], f.zero());
                for (x, p) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                    f.sub_mul_assign(x, &c, p);
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    pivots
}

/// Kernel basis of the matrix given by `rows` (each of width `ncols`).
/// One basis vector per non-pivot column, with a 1 at that column; the
/// basis is the canonical one for left-to-right pivoting.
pub fn kernel_basis<F: Field>(f: F, mut rows: Vec<Vec<F::Elem>>, ncols: usize) -> Vec<Vec<F::Elem>> {
    for r in &rows {
        assert_eq!(r.len(), ncols);
    }
    let pivots = rref(f, &mut rows);
    let mut is_pivot = vec![usize::MAX; ncols];
    for (i, &p) in pivots.iter().enumerate() {
        is_pivot[p] = i;
    }
    let mut basis = Vec::with_capacity(ncols - pivots.len());
    for j in 0..ncols {
        if is_pivot[j] != usize::MAX {
            continue;
        }
        let mut v = vec![f.zero(); ncols];
        v[j] = f.one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(&rows[i][j]);
        }
        basis.push(v);
    }
    basis
}

/// Solution of `A x = b`: a particular solution (free variables zero) when
/// consistent, plus the canonical kernel basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<E> {
    pub particular: Option<Vec<E>>,
    pub kernel: Vec<Vec<E>>,
}

pub fn solve_linear<F: Field>(
    f: F,
    a: &[Vec<F::Elem>],
    b: &[F::Elem],
) -> Result<LinearSolution<F::Elem>, ArithError> {
    if a.len() != b.len() {
        return Err(ArithError::DimensionMismatch);
    }
    let ncols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != ncols) {
        return Err(ArithError::DimensionMismatch);
    }
    // augmented reduction
    let mut aug: Vec<Vec<F::Elem>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    let inconsistent = pivots.last() == Some(&ncols);
    let particular = if inconsistent {
        None
    } else {
        let mut x = vec![f.zero(); ncols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug[i][ncols].clone();
        }
        Some(x)
    };
    let kernel = kernel_basis(f, a.to_vec(), ncols);
    Ok(LinearSolution { particular, kernel })
}

/// Dynamic entry point on tagged scalars; rejects mixed-field inputs.
pub fn solve_linear_elems(
    a: &[Vec<FieldElem>],
    b: &[FieldElem],
) -> Result<LinearSolution<FieldElem>, ArithError> {
    let mut spec: Option<FieldSpec> = None;
    for e in a.iter().flatten().chain(b.iter()) {
        match spec {
            None => spec = Some(e.spec()),
            Some(s) if s == e.spec() => {}
            Some(_) => return Err(ArithError::MixedFields),
        }
    }
    let spec = spec.unwrap_or(FieldSpec::Q);
    match spec {
        FieldSpec::Q => {
            let conv = |e: &FieldElem| match e {
                FieldElem::Q(r) => r.clone(),
                _ => unreachable!(),
            };
            let ra: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(conv).collect()).collect();
            let rb: Vec<_> = b.iter().map(conv).collect();
            let sol = solve_linear(Rationals, &ra, &rb)?;
            Ok(LinearSolution {
                particular: sol.particular.map(|v| v.into_iter().map(FieldElem::Q).collect()),
                kernel: sol
                    .kernel
                    .into_iter()
                    .map(|v| v.into_iter().map(FieldElem::Q).collect())
                    .collect(),
            })
        }
        FieldSpec::Fp(p) => {
            let f = PrimeField::new(p)?;
            let conv = |e: &FieldElem| match e {
                FieldElem::Fp { val, .. } => *val,
                _ => unreachable!(),
            };
            let ra: Vec<Vec<_>> = a.iter().map(|r| r.iter().map(conv).collect()).collect();
            let rb: Vec<_> = b.iter().map(conv).collect();
            let sol = solve_linear(f, &ra, &rb)?;
            let wrap = |v: Vec<u64>| v.into_iter().map(|val| FieldElem::Fp { p, val }).collect();
            Ok(LinearSolution {
                particular: sol.particular.map(wrap),
                kernel: sol.kernel.into_iter().map(wrap).collect(),
            })
        }
    }
}

/// A subspace kept in reduced row echelon form. Insertion order does not
/// matter: the stored basis is the canonical RREF basis of the span.
#[derive(Clone, Debug)]
pub struct EchelonBasis<F: Field> {
    f: F,
    pub cols: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> EchelonBasis<F> {
    pub fn new(f: F, cols: usize) -> Self {
        EchelonBasis { f, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Eliminate the pivot coordinates of `v` against the basis.
    pub fn reduce(&self, v: &mut [F::Elem]) {
        let f = self.f;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&v[p]) {
                let c = std::mem::replace(&mut v[p], f.zero());
                for (x, y) in v[p + 1..].iter_mut().zip(&row[p + 1..]) {
                    f.sub_mul_assign(x, &c, y);
                }
            }
        }
    }

    /// Insert `v` if it extends the span; returns true when the dimension grew.
    pub fn insert(&mut self, mut v: Vec<F::Elem>) -> bool {
        assert_eq!(v.len(), self.cols);
        let f = self.f;
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[p]).unwrap();
        for x in v[p..].iter_mut() {
            if !f.is_zero(x) {
                *x = f.mul(x, &inv);
            }
        }
        // clear column p in existing rows to keep full RREF
        for row in self.rows.iter_mut() {
            if !f.is_zero(&row[p]) {
                let c = std::mem::replace(&mut row[p], f.zero());
                for (x, y) in row[p + 1..].iter_mut().zip(&v[p + 1..]) {
                    f.sub_mul_assign(x, &c, y);
                }
            }
        }
        let idx = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(idx, p);
        self.rows.insert(idx, v);
        true
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.f.is_zero(x))
    }

    /// Coordinates of `v` in the stored basis, or `None` if outside the span.
    pub fn coords(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.f;
        let mut w = v.to_vec();
        self.reduce(&mut w);
        if !w.iter().all(|x| f.is_zero(x)) {
            return None;
        }
        // with unit pivots and full reduction, the coordinate on each basis
        // row is just the entry of v at its pivot column
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;
    use proptest::prelude::*;

    fn q(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn identity_system() {
        // identity matrix, rhs 0: kernel {0}, solution 0
        let f = Rationals;
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let sol = solve_linear(f, &a, &[q(0), q(0)]).unwrap();
        assert_eq!(sol.particular, Some(vec![q(0), q(0)]));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn zero_map_over_f5() {
        // 1x2 zero matrix over F_5, rhs 0: kernel dimension 2
        let f = PrimeField::new(5).unwrap();
        let a = vec![vec![0u64, 0u64]];
        let sol = solve_linear(f, &a, &[0]).unwrap();
        assert_eq!(sol.particular, Some(vec![0, 0]));
        assert_eq!(sol.kernel.len(), 2);
    }

    #[test]
    fn rank_deficient_rational_system() {
        // [[1,2],[2,4]] x = [1,2]: particular [1,0], kernel span {[-2,1]}
        // (hand row reduction: both equations are x + 2y = 1)
        let f = Rationals;
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        let sol = solve_linear(f, &a, &[q(1), q(2)]).unwrap();
        assert_eq!(sol.particular, Some(vec![q(1), q(0)]));
        assert_eq!(sol.kernel, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn inconsistent_system() {
        let f = Rationals;
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        let sol = solve_linear(f, &a, &[q(1), q(3)]).unwrap();
        assert!(sol.particular.is_none());
        assert_eq!(sol.kernel.len(), 1);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = vec![vec![FieldElem::Q(q(1)), FieldElem::Fp { p: 5, val: 1 }]];
        let b = vec![FieldElem::Q(q(0))];
        assert_eq!(solve_linear_elems(&a, &b), Err(ArithError::MixedFields));
    }

    #[test]
    fn echelon_basis_coords() {
        let f = Rationals;
        let mut eb = EchelonBasis::new(f, 3);
        assert!(eb.insert(vec![q(2), q(0), q(2)]));
        assert!(eb.insert(vec![q(0), q(1), q(1)]));
        assert!(!eb.insert(vec![q(2), q(3), q(5)]));
        assert_eq!(eb.dim(), 2);
        let c = eb.coords(&[q(4), q(1), q(5)]).unwrap();
        assert_eq!(c, vec![q(4), q(1)]);
        assert!(eb.coords(&[q(0), q(0), q(1)]).is_none());
    }

    proptest! {
        // solutions verify exactly: A x = b and A k = 0
        #[test]
        fn solutions_verify(
            entries in proptest::collection::vec(-4i64..5, 12),
            rhs in proptest::collection::vec(-4i64..5, 3),
        ) {
            let f = Rationals;
            let a: Vec<Vec<Rat>> = entries.chunks(4).map(|c| c.iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<Rat> = rhs.iter().map(|&x| q(x)).collect();
            let sol = solve_linear(f, &a, &b).unwrap();
            let apply = |x: &[Rat]| -> Vec<Rat> {
                a.iter().map(|row| {
                    let mut acc = q(0);
                    for (r, v) in row.iter().zip(x) { acc = acc.add(&r.mul(v)); }
                    acc
                }).collect()
            };
            if let Some(x) = &sol.particular {
                prop_assert_eq!(apply(x), b);
            }
            for k in &sol.kernel {
                prop_assert!(apply(k).iter().all(|v| v.is_zero()));
            }
            // kernel dimension = cols - rank
            let rank = Mat::from_rows(f, a.clone(), 4).rank(f);
            prop_assert_eq!(sol.kernel.len(), 4 - rank);
        }

        #[test]
        fn solutions_verify_fp(
            entries in proptest::collection::vec(0u64..7, 12),
            rhs in proptest::collection::vec(0u64..7, 4),
        ) {
            let f = PrimeField::new(7).unwrap();
            let a: Vec<Vec<u64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let sol = solve_linear(f, &a, &rhs).unwrap();
            let apply = |x: &[u64]| -> Vec<u64> {
                a.iter().map(|row| {
                    let mut acc = 0u64;
                    for (r, v) in row.iter().zip(x) { acc = f.add(&acc, &f.mul(r, v)); }
                    acc
                }).collect()
            };
            if let Some(x) = &sol.particular {
                prop_assert_eq!(apply(x), rhs.clone());
            }
            for k in &sol.kernel {
                prop_assert!(apply(k).iter().all(|v| *v == 0));
            }
        }
    }
}
