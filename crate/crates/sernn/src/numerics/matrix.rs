use super::{lit, Real};
use crate::error::{Error, Result};

/// Dense row-major matrix.
///
/// The layout is a single contiguous buffer; `row(i)` hands out slices so
/// hot loops run over plain slices and vectorize. Nothing here allocates
/// behind the caller's back except the obvious constructors.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "buffer of {} entries cannot fill a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("from_rows"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimMismatch("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn fill(&mut self, v: T) {
        for x in &mut self.data {
            *x = v;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    fn check_same_shape(&self, rhs: &Self, what: &str) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimMismatch(format!(
                "{}: {}x{} vs {}x{}",
                what, self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "add")?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "sub")?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: T, x: &Self) -> Result<()> {
        self.check_same_shape(x, "axpy")?;
        for (a, &b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn scale_in_place(&mut self, s: T) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn zip_map(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_shape(rhs, "zip_map")?;
        Ok(self.zip_with(rhs, f))
    }

    pub fn hadamard(&self, rhs: &Self) -> Result<Self> {
        self.zip_map(rhs, |a, b| a * b)
    }

    pub fn abs(&self) -> Self {
        self.map(|x| x.abs())
    }

    /// Matrix product `self * rhs`, i-k-j order so the inner loop runs
    /// along contiguous rows of both operands.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let arow = &self.data[i * k..(i + 1) * k];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (kk, &a) in arow.iter().enumerate() {
                let brow = &rhs.data[kk * n..(kk + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^T * rhs` without materializing the transpose.
    pub fn tr_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimMismatch(format!(
                "tr_matmul: ({}x{})^T * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (m, n) = (self.cols, rhs.cols);
        let mut out = Self::zeros(m, n);
        for kk in 0..self.rows {
            let arow = &self.data[kk * m..(kk + 1) * m];
            let brow = &rhs.data[kk * n..(kk + 1) * n];
            for (i, &a) in arow.iter().enumerate() {
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * rhs^T`; rows of `rhs` are reduced by dot products.
    pub fn matmul_bt(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(Error::DimMismatch(format!(
                "matmul_bt: {}x{} * ({}x{})^T",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.rows);
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let arow = &self.data[i * k..(i + 1) * k];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (j, o) in orow.iter_mut().enumerate() {
                let brow = &rhs.data[j * k..(j + 1) * k];
                let mut acc = T::zero();
                for (&a, &b) in arow.iter().zip(brow) {
                    acc += a * b;
                }
                *o = acc;
            }
        }
        Ok(out)
    }

    /// Rank-1 update `self += alpha * x y^T`.
    pub fn add_outer(&mut self, alpha: T, x: &[T], y: &[T]) -> Result<()> {
        if x.len() != self.rows || y.len() != self.cols {
            return Err(Error::DimMismatch(format!(
                "add_outer: {}x{} += ({})({})^T",
                self.rows,
                self.cols,
                x.len(),
                y.len()
            )));
        }
        for (i, &xi) in x.iter().enumerate() {
            let a = alpha * xi;
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &yj) in row.iter_mut().zip(y) {
                *r += a * yj;
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> Result<T> {
        let n = self.require_square()?;
        let mut t = T::zero();
        for i in 0..n {
            t += self.data[i * n + i];
        }
        Ok(t)
    }

    pub fn sum(&self) -> T {
        let mut s = T::zero();
        for &x in &self.data {
            s += x;
        }
        s
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for &x in &self.data {
            s += x * x;
        }
        s.sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut s = T::zero();
            for i in 0..self.rows {
                s += self.data[i * self.cols + j].abs();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn max_abs(&self) -> T {
        let mut best = T::zero();
        for &x in &self.data {
            let a = x.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for &x in self.row(i) {
                    s += x;
                }
                s
            })
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (s, &x) in sums.iter_mut().zip(self.row(i)) {
                *s += x;
            }
        }
        sums
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn require_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `A X = B` by LU decomposition with partial pivoting.
///
/// `A` must be square and nonsingular; `B` may carry any number of
/// right-hand-side columns.
pub fn lu_solve<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(Error::DimMismatch(format!(
            "lu_solve: A is {}x{} but B has {} rows",
            n,
            n,
            b.rows()
        )));
    }
    a.require_finite("lu_solve input")?;
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut pivot = col;
        let mut best = lu.get(col, col).abs();
        for i in col + 1..n {
            let v = lu.get(i, col).abs();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if best == T::zero() {
            return Err(Error::Singular("lu_solve"));
        }
        lu.swap_rows(col, pivot);
        x.swap_rows(col, pivot);
        let inv = T::one() / lu.get(col, col);
        for i in col + 1..n {
            let factor = lu.get(i, col) * inv;
            if factor == T::zero() {
                continue;
            }
            lu.set(i, col, factor);
            for j in col + 1..n {
                let v = lu.get(col, j);
                let cur = lu.get(i, j);
                lu.set(i, j, cur - factor * v);
            }
            for j in 0..x.cols() {
                let v = x.get(col, j);
                let cur = x.get(i, j);
                x.set(i, j, cur - factor * v);
            }
        }
    }
    // Back substitution on the upper triangle.
    for col in (0..n).rev() {
        let inv = T::one() / lu.get(col, col);
        for j in 0..x.cols() {
            let v = x.get(col, j) * inv;
            x.set(col, j, v);
            for i in 0..col {
                let f = lu.get(i, col);
                let cur = x.get(i, j);
                x.set(i, j, cur - f * v);
            }
        }
    }
    Ok(x)
}

/// Householder QR. Returns `(Q, R)` with `Q` orthogonal and `R` upper
/// triangular; no sign normalization is applied here, callers that need a
/// canonical factor fix the signs of `diag(R)` themselves.
pub fn qr_decompose<T: Real>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let n = a.require_square()?;
    a.require_finite("qr input")?;
    let mut r = a.clone();
    let mut q = DenseMatrix::<T>::identity(n);
    let mut v = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        let mut norm = T::zero();
        for i in k..n {
            let x = r.get(i, k);
            norm += x * x;
        }
        norm = norm.sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r.get(k, k) >= T::zero() { -norm } else { norm };
        let mut vnorm = T::zero();
        for i in k..n {
            let vi = if i == k { r.get(i, k) - alpha } else { r.get(i, k) };
            v[i] = vi;
            vnorm += vi * vi;
        }
        if vnorm == T::zero() {
            continue;
        }
        let beta = lit::<T>(2.0) / vnorm;
        // R <- (I - beta v v^T) R
        for j in k..n {
            let mut dot = T::zero();
            for i in k..n {
                dot += v[i] * r.get(i, j);
            }
            let f = beta * dot;
            for i in k..n {
                let cur = r.get(i, j);
                r.set(i, j, cur - f * v[i]);
            }
        }
        // Q <- Q (I - beta v v^T)
        for i in 0..n {
            let mut dot = T::zero();
            for j in k..n {
                dot += q.get(i, j) * v[j];
            }
            let f = beta * dot;
            for j in k..n {
                let cur = q.get(i, j);
                q.set(i, j, cur - f * v[j]);
            }
        }
    }
    // Zero the strictly-lower part that should now hold numerical dust.
    for i in 1..n {
        for j in 0..i {
            r.set(i, j, T::zero());
        }
    }
    Ok((q, r))
}
