use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat_from_int, Int, IntVec, Rational};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: &[IntVec]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<IntVec> = rows.iter().map(|r| super::ivec(r)).collect();
        Self::from_rows(&rows)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVec]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<IntVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[target] -= factor * row[source]
    fn sub_row_multiple(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = factor * &self[(source, j)];
            self[(target, j)] -= v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }
}

/// Row-style Hermite normal form: returns `(h, u)` with `u` unimodular,
/// `u * m == h`, `h` in row echelon form with positive pivots and every
/// entry above a pivot reduced into `[0, pivot)`. Zero rows come last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut pivot_row = 0;
    for col in 0..h.cols() {
        if pivot_row == h.rows() {
            break;
        }
        // Euclid on the column below pivot_row.
        loop {
            let best = (pivot_row..h.rows())
                .filter(|&r| !h[(r, col)].is_zero())
                .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut clean = true;
            for r in pivot_row + 1..h.rows() {
                if h[(r, col)].is_zero() {
                    continue;
                }
                let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
                h.sub_row_multiple(r, pivot_row, &q);
                u.sub_row_multiple(r, pivot_row, &q);
                if !h[(r, col)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for r in 0..pivot_row {
            let q = h[(r, col)].div_floor(&h[(pivot_row, col)]);
            h.sub_row_multiple(r, pivot_row, &q);
            u.sub_row_multiple(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Invariant factors `d_1 | d_2 | ...` of `m`, `min(rows, cols)` of them,
/// with zeros trailing when `m` is rank deficient.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<Int> {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let k = rows.min(cols);
    let mut diag = Vec::with_capacity(k);
    for t in 0..k {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.resize(k, Int::zero());
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut done = true;
            let pivot = a[t].clone();
            for row in a.iter_mut().skip(t + 1) {
                let q = row[t].div_floor(&pivot[t]);
                if !q.is_zero() {
                    for (x, p) in row[t..].iter_mut().zip(&pivot[t..]) {
                        *x -= &q * p;
                    }
                }
                if !row[t].is_zero() {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let v = &q * &row[t];
                        row[j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    done = false;
                }
            }
            if !done {
                continue;
            }
            // Divisibility: fold any offending row into the pivot row.
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    let source = a[i][t..].to_vec();
                    for (x, v) in a[t][t..].iter_mut().zip(source) {
                        *x += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Lattice basis of `{x in Z^cols : m x = 0}`, canonicalized by Hermite
/// normal form so the result does not depend on the elimination path.
pub fn integer_kernel(m: &IntMatrix) -> Vec<IntVec> {
    let (h, u) = hermite_normal_form(&m.transpose());
    let basis: Vec<IntVec> = (0..h.rows())
        .filter(|&r| h.row(r).iter().all(Zero::is_zero))
        .map(|r| u.row(r).to_vec())
        .collect();
    if basis.is_empty() {
        return basis;
    }
    let (hk, _) = hermite_normal_form(&IntMatrix::from_rows(&basis));
    hk.to_rows()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Rank over the rationals.
pub fn rank(vectors: &[IntVec]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let (h, _) = hermite_normal_form(&IntMatrix::from_rows(vectors));
    (0..h.rows())
        .filter(|&r| h.row(r).iter().any(|x| !x.is_zero()))
        .count()
}

/// Outcome of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    Inconsistent,
    /// Consistent but with a nontrivial solution space.
    Underdetermined,
}

/// Solves `a x = b` exactly by Gauss-Jordan elimination over the rationals.
pub fn solve_linear_system(a: &[Vec<Rational>], b: &[Rational]) -> LinearSolution {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..aug.len()).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for x in aug[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..=n].iter_mut().zip(&pivot[c..=n]) {
                    *x -= &f * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    if pivot_cols.len() < n {
        return LinearSolution::Underdetermined;
    }
    LinearSolution::Unique((0..n).map(|i| aug[i][n].clone()).collect())
}

/// Solves `a x = b` for integer `a` and `b`.
pub(crate) fn solve_integer_system(a: &[IntVec], b: &[Int]) -> LinearSolution {
    let a: Vec<Vec<Rational>> = a
        .iter()
        .map(|r| r.iter().map(rat_from_int).collect())
        .collect();
    let b: Vec<Rational> = b.iter().map(rat_from_int).collect();
    solve_linear_system(&a, &b)
}

/// Coordinates of `v` in the basis given by `basis` (as columns), if `v`
/// lies in their rational span and the coordinates are unique.
pub(crate) fn coordinates_in_basis(basis: &[IntVec], v: &[Int]) -> Option<Vec<Rational>> {
    let dim = v.len();
    let rows: Vec<IntVec> = (0..dim)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    match solve_integer_system(&rows, v) {
        LinearSolution::Unique(x) => Some(x),
        _ => None,
    }
}
