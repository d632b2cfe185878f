//! Dense matrices over the scalar field and over truncated Laurent series,
//! with the exact linear algebra the classification pipeline leans on:
//! Gaussian elimination with valuation-aware pivoting, kernels,
//! characteristic polynomials and Kronecker products.

use crate::error::{Error, Result};
use crate::scalars::poly::Poly;
use crate::scalars::{QContext, ScalarElem, ScalarField};
use crate::series::{LaurentSeries, Prec};

/// A dense matrix over the scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarMat {
    field: ScalarField,
    rows: usize,
    cols: usize,
    entries: Vec<ScalarElem>,
}

impl ScalarMat {
    pub fn new(field: &ScalarField, rows: usize, cols: usize, entries: Vec<ScalarElem>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        ScalarMat { field: field.clone(), rows, cols, entries }
    }

    pub fn zero(field: &ScalarField, rows: usize, cols: usize) -> Self {
        ScalarMat {
            field: field.clone(),
            rows,
            cols,
            entries: vec![ScalarElem::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &ScalarField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ScalarElem::one(field);
        }
        m
    }

    pub fn from_fn(
        field: &ScalarField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ScalarElem,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ScalarMat { field: field.clone(), rows, cols, entries }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &ScalarElem {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut ScalarElem {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> ScalarMat {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, other: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).add(other.at(i, j)))
    }

    pub fn sub(&self, other: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).sub(other.at(i, j)))
    }

    pub fn neg(&self) -> ScalarMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn scale(&self, c: &ScalarElem) -> ScalarMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    pub fn mul(&self, other: &ScalarMat) -> ScalarMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.mul(other.at(k, j));
                    *out.at_mut(i, j) = out.at(i, j).add(&t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[ScalarElem]) -> Vec<ScalarElem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ScalarElem::zero(&self.field);
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> ScalarMat {
        assert_eq!(self.rows, self.cols);
        let mut out = Self::identity(&self.field, self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Row echelon reduction in place; returns pivot columns.
    fn row_reduce(m: &mut Vec<Vec<ScalarElem>>) -> Vec<usize> {
        let rows = m.len();
        if rows == 0 {
            return Vec::new();
        }
        let cols = m[0].len();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..cols {
            let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, pr);
            let inv = m[r][c].inv().expect("pivot nonzero");
            for x in m[r].iter_mut() {
                *x = x.mul(&inv);
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for cc in 0..cols {
                        let t = m[r][cc].mul(&f);
                        m[i][cc] = m[i][cc].sub(&t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<ScalarElem>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        Self::row_reduce(&mut rows).len()
    }

    /// Basis of the right kernel, returned as columns.
    pub fn kernel(&self) -> Vec<Vec<ScalarElem>> {
        let mut rows: Vec<Vec<ScalarElem>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let pivots = Self::row_reduce(&mut rows);
        let mut basis = Vec::new();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![ScalarElem::zero(&self.field); self.cols];
            v[free] = ScalarElem::one(&self.field);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = rows[r][free].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve self * x = b; None when inconsistent. When the system is
    /// underdetermined an arbitrary solution is returned.
    pub fn solve(&self, b: &[ScalarElem]) -> Option<Vec<ScalarElem>> {
        assert_eq!(self.rows, b.len());
        let mut rows: Vec<Vec<ScalarElem>> = (0..self.rows)
            .map(|i| {
                let mut row: Vec<ScalarElem> =
                    (0..self.cols).map(|j| self.at(i, j).clone()).collect();
                row.push(b[i].clone());
                row
            })
            .collect();
        let pivots = Self::row_reduce(&mut rows);
        // Inconsistent when a pivot lands in the augmented column.
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![ScalarElem::zero(&self.field); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = rows[r][self.cols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<ScalarMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut rows: Vec<Vec<ScalarElem>> = (0..n)
            .map(|i| {
                let mut row: Vec<ScalarElem> = (0..n).map(|j| self.at(i, j).clone()).collect();
                for k in 0..n {
                    row.push(if k == i {
                        ScalarElem::one(&self.field)
                    } else {
                        ScalarElem::zero(&self.field)
                    });
                }
                row
            })
            .collect();
        let pivots = Self::row_reduce(&mut rows);
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return Err(Error::parameter("matrix not invertible"));
        }
        Ok(Self::from_fn(&self.field, n, n, |i, j| rows[i][n + j].clone()))
    }

    pub fn det(&self) -> ScalarElem {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m: Vec<Vec<ScalarElem>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut det = ScalarElem::one(&self.field);
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return ScalarElem::zero(&self.field);
            };
            if pr != c {
                m.swap(c, pr);
                det = det.neg();
            }
            det = det.mul(&m[c][c]);
            let inv = m[c][c].inv().expect("pivot nonzero");
            for i in (c + 1)..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].mul(&inv);
                for j in c..n {
                    let t = m[c][j].mul(&f);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        det
    }

    /// Characteristic polynomial det(x I - A) by the Faddeev-LeVerrier
    /// recursion (valid in characteristic zero).
    pub fn charpoly(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let field = &self.field;
        let mut coeffs = vec![ScalarElem::zero(field); n + 1];
        coeffs[n] = ScalarElem::one(field);
        let mut m = Self::identity(field, n);
        for k in 1..=n {
            m = self.mul(&m);
            let mut tr = ScalarElem::zero(field);
            for i in 0..n {
                tr = tr.add(m.at(i, i));
            }
            let c = tr
                .mul(&ScalarElem::from_ratio(field, -1, k as i64));
            coeffs[n - k] = c.clone();
            for i in 0..n {
                *m.at_mut(i, i) = m.at(i, i).add(&c);
            }
        }
        Poly::new(field.clone(), coeffs)
    }

    /// Evaluate a polynomial at this matrix.
    pub fn eval_poly(&self, p: &Poly) -> ScalarMat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut acc = Self::zero(&self.field, n, n);
        for c in p.coeffs().iter().rev() {
            acc = self.mul(&acc);
            for i in 0..n {
                *acc.at_mut(i, i) = acc.at(i, i).add(c);
            }
        }
        acc
    }

    pub fn lift_to(&self, target: &ScalarField) -> Result<ScalarMat> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift_to(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarMat { field: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn to_series(&self) -> SeriesMat {
        SeriesMat::from_fn(&self.field, self.rows, self.cols, |i, j| {
            LaurentSeries::constant(self.at(i, j).clone())
        })
    }

    /// Columns as coordinate vectors.
    pub fn columns(&self) -> Vec<Vec<ScalarElem>> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.at(i, j).clone()).collect())
            .collect()
    }

    pub fn from_columns(field: &ScalarField, rows: usize, cols: &[Vec<ScalarElem>]) -> Self {
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }
}

/// A dense matrix of truncated Laurent series. Equality compares all
/// jointly-known coefficients.
#[derive(Clone, Debug)]
pub struct SeriesMat {
    field: ScalarField,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentSeries>,
}

impl PartialEq for SeriesMat {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees_with(b))
    }
}

impl SeriesMat {
    pub fn new(field: &ScalarField, rows: usize, cols: usize, entries: Vec<LaurentSeries>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        SeriesMat { field: field.clone(), rows, cols, entries }
    }

    pub fn zero(field: &ScalarField, rows: usize, cols: usize) -> Self {
        SeriesMat {
            field: field.clone(),
            rows,
            cols,
            entries: vec![LaurentSeries::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &ScalarField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = LaurentSeries::one(field);
        }
        m
    }

    pub fn from_fn(
        field: &ScalarField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentSeries,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SeriesMat { field: field.clone(), rows, cols, entries }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut LaurentSeries {
        &mut self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> SeriesMat {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, other: &SeriesMat) -> SeriesMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).add(other.at(i, j)))
    }

    pub fn sub(&self, other: &SeriesMat) -> SeriesMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).sub(other.at(i, j)))
    }

    pub fn neg(&self) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn mul(&self, other: &SeriesMat) -> SeriesMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<LaurentSeries> = None;
                for k in 0..self.cols {
                    let t = self.at(i, k).mul(other.at(k, j));
                    acc = Some(match acc {
                        None => t,
                        Some(s) => s.add(&t),
                    });
                }
                *out.at_mut(i, j) = acc.unwrap();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[LaurentSeries]) -> Vec<LaurentSeries> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = LaurentSeries::zero(&self.field);
                for j in 0..self.cols {
                    acc = acc.add(&self.at(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &LaurentSeries) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    pub fn sigma_q(&self, ctx: &QContext) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).sigma_q(ctx))
    }

    pub fn truncate(&self, n: i64) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).truncate(n))
    }

    /// Entrywise agreement on jointly-known coefficients.
    pub fn agrees_with(&self, other: &SeriesMat) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.at(i, j).agrees_with(other.at(i, j))))
    }

    /// Direct sum (block diagonal).
    pub fn direct_sum(&self, other: &SeriesMat) -> SeriesMat {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        Self::from_fn(&self.field, rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.at(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.at(i - self.rows, j - self.cols).clone()
            } else {
                LaurentSeries::zero(&self.field)
            }
        })
    }

    /// Kronecker product.
    pub fn kronecker(&self, other: &SeriesMat) -> SeriesMat {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(&self.field, rows, cols, |i, j| {
            let (i1, i2) = (i / other.rows, i % other.rows);
            let (j1, j2) = (j / other.cols, j % other.cols);
            self.at(i1, j1).mul(other.at(i2, j2))
        })
    }

    /// Determinant by elimination with minimal-valuation pivoting. Precision
    /// loss follows the series rules; an undecidable pivot surfaces as an
    /// insufficient-precision error.
    pub fn det(&self) -> Result<LaurentSeries> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m: Vec<Vec<LaurentSeries>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut det = LaurentSeries::one(&self.field);
        for c in 0..n {
            // minimal valuation pivot for numerical sanity of truncations
            let mut pivot: Option<(usize, i64)> = None;
            let mut saw_unknown = false;
            for (i, row) in m.iter().enumerate().take(n).skip(c) {
                match row[c].valuation() {
                    Some(v) => {
                        if pivot.map(|(_, pv)| v < pv).unwrap_or(true) {
                            pivot = Some((i, v));
                        }
                    }
                    None => {
                        if !row[c].is_exactly_zero() {
                            saw_unknown = true;
                        }
                    }
                }
            }
            let Some((pr, _)) = pivot else {
                if saw_unknown {
                    return Err(Error::precision(
                        "determinant",
                        format!("column {c} has no entry with determined valuation"),
                    ));
                }
                return Ok(LaurentSeries::zero(&self.field));
            };
            if pr != c {
                m.swap(c, pr);
                det = det.neg();
            }
            det = det.mul(&m[c][c]);
            let inv = m[c][c].invert(None).or_else(|_| {
                m[c][c].invert(Some(self.max_known_bound() + 4))
            })?;
            for i in (c + 1)..n {
                if m[i][c].is_zero_known() {
                    continue;
                }
                let f = m[i][c].mul(&inv);
                for j in c..n {
                    let t = m[c][j].mul(&f);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        Ok(det)
    }

    fn max_known_bound(&self) -> i64 {
        self.entries
            .iter()
            .filter_map(|e| match e.prec() {
                Prec::Mod(n) => Some(n),
                Prec::Exact => e.valuation().map(|v| v + 8),
            })
            .max()
            .unwrap_or(8)
    }

    /// Inverse via Gauss-Jordan with minimal-valuation pivoting. Exact
    /// entries are expanded to `work_prec` absolute precision where division
    /// forces truncation.
    pub fn inverse(&self, work_prec: i64) -> Result<SeriesMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m: Vec<Vec<LaurentSeries>> = (0..n)
            .map(|i| {
                let mut row: Vec<LaurentSeries> =
                    (0..n).map(|j| self.at(i, j).clone()).collect();
                for k in 0..n {
                    row.push(if k == i {
                        LaurentSeries::one(&self.field)
                    } else {
                        LaurentSeries::zero(&self.field)
                    });
                }
                row
            })
            .collect();
        for c in 0..n {
            let mut pivot: Option<(usize, i64)> = None;
            for (i, row) in m.iter().enumerate().take(n).skip(c) {
                if let Some(v) = row[c].valuation() {
                    if pivot.map(|(_, pv)| v < pv).unwrap_or(true) {
                        pivot = Some((i, v));
                    }
                }
            }
            let Some((pr, _)) = pivot else {
                return Err(Error::precision(
                    "matrix inverse",
                    format!("no usable pivot in column {c}"),
                ));
            };
            m.swap(c, pr);
            let inv = m[c][c].invert(Some(work_prec))?;
            for j in 0..(2 * n) {
                m[c][j] = m[c][j].mul(&inv);
            }
            for i in 0..n {
                if i == c || m[i][c].is_zero_known() {
                    continue;
                }
                let f = m[i][c].clone();
                for j in 0..(2 * n) {
                    let t = m[c][j].mul(&f);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        Ok(Self::from_fn(&self.field, n, n, |i, j| m[i][n + j].clone()))
    }

    /// Solve self * x = b over the series field.
    pub fn solve(&self, b: &[LaurentSeries], work_prec: i64) -> Result<Vec<LaurentSeries>> {
        assert_eq!(self.rows, b.len());
        assert_eq!(self.rows, self.cols, "square solve only");
        let inv = self.inverse(work_prec)?;
        Ok(inv.mul_vec(b))
    }

    /// Constant term as a scalar matrix (coefficients of t^0).
    pub fn constant_term(&self) -> ScalarMat {
        ScalarMat::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).coeff(0))
    }

    /// Coefficient of t^k throughout.
    pub fn coeff_matrix(&self, k: i64) -> ScalarMat {
        ScalarMat::from_fn(&self.field, self.rows, self.cols, |i, j| self.at(i, j).coeff(k))
    }

    /// The least exponent with a nonzero known coefficient anywhere.
    pub fn min_valuation(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.valuation()).min()
    }

    /// The weakest absolute precision bound among entries (None = all exact).
    pub fn min_precision(&self) -> Option<i64> {
        self.entries
            .iter()
            .filter_map(|e| match e.prec() {
                Prec::Mod(n) => Some(n),
                Prec::Exact => None,
            })
            .min()
    }

    pub fn lift_to(&self, target: &ScalarField) -> Result<SeriesMat> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift_to(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesMat { field: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// Exponent reindexing t -> u^s for scalar extension to a ramified cover.
    pub fn ramify_exponents(&self, s: i64) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.at(i, j).ramify_exponents(s)
        })
    }

    pub fn map(&self, mut f: impl FnMut(&LaurentSeries) -> LaurentSeries) -> SeriesMat {
        Self::from_fn(&self.field, self.rows, self.cols, |i, j| f(self.at(i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> ScalarField {
        ScalarField::rationals()
    }

    fn sm(entries: &[i64], n: usize) -> ScalarMat {
        let field = f();
        ScalarMat::new(
            &field,
            n,
            n,
            entries.iter().map(|&e| ScalarElem::from_i64(&field, e)).collect(),
        )
    }

    #[test]
    fn inverse_and_det() {
        let a = sm(&[2, 1, 1, 1], 2);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), ScalarMat::identity(&f(), 2));
        assert_eq!(a.det(), ScalarElem::from_i64(&f(), 1));
    }

    #[test]
    fn kernel_dimensions() {
        let a = sm(&[1, 2, 2, 4], 2);
        let ker = a.kernel();
        assert_eq!(ker.len(), 1);
        let img = a.mul_vec(&ker[0]);
        assert!(img.iter().all(|c| c.is_zero()));
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn charpoly_companion() {
        // companion of x^2 - x - 1
        let field = f();
        let a = ScalarMat::from_fn(&field, 2, 2, |i, j| match (i, j) {
            (0, 1) => ScalarElem::from_i64(&field, 1),
            (1, 0) => ScalarElem::from_i64(&field, 1),
            (1, 1) => ScalarElem::from_i64(&field, 1),
            _ => ScalarElem::zero(&field),
        });
        let cp = a.charpoly();
        assert_eq!(cp, Poly::from_i64(&field, &[-1, -1, 1]));
        // Cayley-Hamilton
        assert!(a.eval_poly(&cp).is_zero());
    }

    #[test]
    fn series_det_and_inverse() {
        let field = f();
        let t = LaurentSeries::monomial(ScalarElem::one(&field), 1);
        let tinv = LaurentSeries::monomial(ScalarElem::one(&field), -1);
        let g = SeriesMat::from_fn(&field, 2, 2, |i, j| match (i, j) {
            (0, 0) => t.clone(),
            (1, 1) => tinv.clone(),
            _ => LaurentSeries::zero(&field),
        });
        let d = g.det().unwrap();
        assert!(d.is_one());
        let gi = g.inverse(8).unwrap();
        assert!(g.mul(&gi).agrees_with(&SeriesMat::identity(&field, 2)));
    }

    #[test]
    fn kronecker_shapes() {
        let field = f();
        let a = SeriesMat::identity(&field, 2);
        let b = SeriesMat::identity(&field, 3);
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        assert!(k.agrees_with(&SeriesMat::identity(&field, 6)));
        let s = a.direct_sum(&b);
        assert_eq!((s.rows(), s.cols()), (5, 5));
    }

    #[test]
    fn truncated_pivoting() {
        let field = f();
        // [[t, 1], [1, 0]] needs the off-diagonal pivot first
        let g = SeriesMat::from_fn(&field, 2, 2, |i, j| match (i, j) {
            (0, 0) => LaurentSeries::monomial(ScalarElem::one(&field), 1),
            (0, 1) | (1, 0) => LaurentSeries::one(&field),
            _ => LaurentSeries::zero(&field),
        });
        let d = g.det().unwrap();
        assert_eq!(d.coeff(0), ScalarElem::from_i64(&field, -1));
        let gi = g.inverse(6).unwrap();
        assert!(g.mul(&gi).agrees_with(&SeriesMat::identity(&field, 2)));
    }
}
