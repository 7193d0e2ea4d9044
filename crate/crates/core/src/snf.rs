//! Exact integer matrices and Smith normal form.
//!
//! All arithmetic is arbitrary precision. [`smith_normal_form`] is the dense
//! algorithm with optional column transforms; [`sparse_invariant_factors`]
//! first eliminates unit pivots on a sparse matrix and hands the remainder to
//! the dense routine, which is what large relator matrices need.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix row {i}");
            for (j, v) in row.iter().enumerate() {
                m.data[i * cols + j] = v.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !b.is_zero() {
                    *slot += a * b;
                }
            }
        }
        out
    }

    /// Entries as `i64` when every entry fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q · row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if !s.is_zero() {
                self.data[dst * self.cols + j] += q * s;
            }
        }
    }

    /// col[dst] += q · col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let s = self.data[i * self.cols + src].clone();
            if !s.is_zero() {
                self.data[i * self.cols + dst] += q * s;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[r * self.cols + j];
            *v = -std::mem::take(v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation.
///
/// `factors` are the nonzero diagonal entries `d_1 | d_2 | … | d_rank`, all
/// positive. When column transforms are tracked, `column` is the unimodular `V`
/// with `U·M·V = D` and `column_inverse` is `V⁻¹`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub factors: Vec<BigInt>,
    pub column: Option<IntMatrix>,
    pub column_inverse: Option<IntMatrix>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn smith_normal_form(matrix: &IntMatrix, track_columns: bool) -> SmithForm {
    let mut a = matrix.clone();
    let n = a.cols;
    let mut v = track_columns.then(|| IntMatrix::identity(n));
    let mut vinv = track_columns.then(|| IntMatrix::identity(n));
    let mut factors = Vec::new();

    let col_swap = |v: &mut Option<IntMatrix>, vinv: &mut Option<IntMatrix>, x: usize, y: usize| {
        if let (Some(v), Some(vi)) = (v.as_mut(), vinv.as_mut()) {
            v.swap_cols(x, y);
            vi.swap_rows(x, y);
        }
    };
    // col[dst] -= q · col[src] on A, mirrored on V and V⁻¹.
    let col_sub = |a: &mut IntMatrix,
                   v: &mut Option<IntMatrix>,
                   vinv: &mut Option<IntMatrix>,
                   dst: usize,
                   src: usize,
                   q: &BigInt| {
        let neg = -q;
        a.add_col_multiple(dst, src, &neg);
        if let (Some(v), Some(vi)) = (v.as_mut(), vinv.as_mut()) {
            v.add_col_multiple(dst, src, &neg);
            vi.add_row_multiple(src, dst, q);
        }
    };

    let mut t = 0;
    while t < a.rows.min(a.cols) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                let x = a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        col_swap(&mut v, &mut vinv, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..a.rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                a.add_row_multiple(i, t, &-q);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..a.cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                col_sub(&mut a, &mut v, &mut vinv, j, t, &q);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // Move the smallest remainder in row/column t onto the pivot.
                let mut best = (t, t);
                for i in t + 1..a.rows {
                    let x = a.get(i, t);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..a.cols {
                    let x = a.get(t, j);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap_rows(t, best.0);
                } else if best.1 != t {
                    a.swap_cols(t, best.1);
                    col_swap(&mut v, &mut vinv, t, best.1);
                }
                continue;
            }
            // Divisibility: fold a non-divisible row into row t and repeat.
            let pivot = a.get(t, t).clone();
            let offender = (t + 1..a.rows).find(|&i| (t + 1..a.cols).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => a.add_row_multiple(t, i, &BigInt::one()),
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
        }
        factors.push(a.get(t, t).clone());
        t += 1;
    }

    SmithForm { factors, column: v, column_inverse: vinv }
}

/// Invariant factors of a sparse integer matrix given as rows of
/// `(column, value)` entries. Unit pivots are eliminated sparsely; the dense
/// algorithm finishes whatever remains. Returns the nonzero factors in
/// divisibility order.
pub fn sparse_invariant_factors(rows: &[Vec<(usize, i64)>], cols: usize) -> Vec<BigInt> {
    let mut live: Vec<Option<Vec<(usize, BigInt)>>> = rows
        .iter()
        .map(|r| {
            let mut r: Vec<(usize, BigInt)> =
                r.iter().filter(|(_, v)| *v != 0).map(|&(c, v)| (c, BigInt::from(v))).collect();
            r.sort_by_key(|(c, _)| *c);
            merge_duplicate_columns(r)
        })
        .map(Some)
        .collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for (i, r) in live.iter().enumerate() {
        for (c, _) in r.as_ref().unwrap() {
            col_rows[*c].push(i);
        }
    }

    let mut unit_pivots = 0usize;
    loop {
        let mut progress = false;
        for r in 0..live.len() {
            let Some(row) = live[r].as_ref() else { continue };
            let pivot = row
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(c, _)| (col_rows[*c].len(), *c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((pc, pv)) = pivot else { continue };
            let pivot_row = live[r].take().unwrap();
            let mut touched = std::mem::take(&mut col_rows[pc]);
            touched.sort_unstable();
            touched.dedup();
            for i in touched {
                if i == r {
                    continue;
                }
                let Some(target) = live[i].as_mut() else { continue };
                let Ok(pos) = target.binary_search_by_key(&pc, |(c, _)| *c) else { continue };
                // pv is ±1, so a / pv == a * pv.
                let factor = -(&target[pos].1 * &pv);
                let merged = axpy_sparse(target, &pivot_row, &factor);
                for (c, _) in &merged {
                    if target.binary_search_by_key(c, |(c2, _)| *c2).is_err() {
                        col_rows[*c].push(i);
                    }
                }
                *target = merged;
            }
            unit_pivots += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }

    let remaining: Vec<&Vec<(usize, BigInt)>> = live.iter().flatten().filter(|r| !r.is_empty()).collect();
    let mut active: Vec<usize> = remaining.iter().flat_map(|r| r.iter().map(|(c, _)| *c)).collect();
    active.sort_unstable();
    active.dedup();
    let mut dense = IntMatrix::zeros(remaining.len(), active.len());
    for (i, r) in remaining.iter().enumerate() {
        for (c, v) in r.iter() {
            let j = active.binary_search(c).unwrap();
            dense.set(i, j, v.clone());
        }
    }
    let tail = smith_normal_form(&dense, false);
    let mut factors = vec![BigInt::one(); unit_pivots];
    factors.extend(tail.factors);
    factors
}

fn merge_duplicate_columns(row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// `x + factor · y` for sorted sparse rows.
fn axpy_sparse(x: &[(usize, BigInt)], y: &[(usize, BigInt)], factor: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i].clone());
            i += 1;
        } else if take_y {
            out.push((y[j].0, factor * &y[j].1));
            j += 1;
        } else {
            let v = &x[i].1 + factor * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
