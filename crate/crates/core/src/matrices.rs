//! Dense matrices over ℝ, ℂ or ℍ.
//!
//! Entries are stored as [`Quat`] in row-major order. Products, inverses and
//! exponentials never reorder factors, so the same code is correct over the
//! noncommutative quaternions. Hot kernels branch on the field tag only to skip
//! components that are known to vanish.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{Field, Quat};

/// Relative pivot threshold for inversion, measured against the max-entry norm.
pub const PIVOT_REL_TOL: f64 = 1e-12;

const EXP_TAYLOR_DEGREE: usize = 12;
const EXP_SCALE_TARGET: f64 = 0.5;

#[derive(Clone, PartialEq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Quat>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![Quat::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Mat::scalar(field, n, Quat::ONE)
    }

    /// `s·I` for a scalar `s` of the field.
    pub fn scalar(field: Field, n: usize, s: Quat) -> Self {
        let mut m = Mat::zeros(field, n, n);
        let s = field.project(s);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Quat,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(field.project(f(r, c)));
            }
        }
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(
            values.len(),
            rows * cols,
            "from_real: wrong number of values"
        );
        Mat::from_fn(Field::Real, rows, cols, |r, c| {
            Quat::real(values[r * cols + c])
        })
    }

    pub fn from_rows(field: Field, rows: &[Vec<Quat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Mat::from_fn(field, r, c, |i, j| rows[i][j])
    }

    pub fn diag(field: Field, entries: &[Quat]) -> Self {
        let n = entries.len();
        Mat::from_fn(
            field,
            n,
            n,
            |r, c| if r == c { entries[r] } else { Quat::ZERO },
        )
    }

    /// Block-diagonal matrix from square blocks of one field.
    pub fn block_diag(blocks: &[&Mat]) -> Self {
        let field = blocks[0].field;
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Mat::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            m.set_block(off, off, b);
            off += b.rows;
        }
        m
    }

    /// `(a b; c d)` from four blocks.
    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Self {
        let field = a.field;
        let mut m = Mat::zeros(field, a.rows + c.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, a.cols, b);
        m.set_block(a.rows, 0, c);
        m.set_block(a.rows, a.cols, d);
        m
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Quat] {
        &self.data
    }

    /// Same entries reinterpreted over a larger field (ℝ ⊂ ℂ ⊂ ℍ).
    pub fn with_field(&self, field: Field) -> Mat {
        Mat::from_fn(field, self.rows, self.cols, |r, c| self[(r, c)])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(self.field, rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = self.field.project(b[(r, c)]);
            }
        }
    }

    /// The four `n×n` blocks of a `2n×2n` matrix.
    pub fn quarters(&self) -> (Mat, Mat, Mat, Mat) {
        let n = self.rows / 2;
        (
            self.block(0, 0, n, n),
            self.block(0, n, n, n),
            self.block(n, 0, n, n),
            self.block(n, n, n, n),
        )
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn try_sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(Quat, Quat) -> Quat) -> Mat {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| f(x, y))
            .collect();
        Mat {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn map(&self, f: impl Fn(Quat) -> Quat) -> Mat {
        let field = self.field;
        let data = self.data.iter().map(|&x| field.project(f(x))).collect();
        Mat {
            field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        self.map(|x| x * s)
    }

    /// `s·A` with the scalar on the left.
    pub fn left_scale(&self, s: Quat) -> Mat {
        self.map(|x| s * x)
    }

    /// `A·s` with the scalar on the right.
    pub fn right_scale(&self, s: Quat) -> Mat {
        self.map(|x| x * s)
    }

    /// `self += s·other` for a real `s`.
    pub fn axpy(&mut self, s: f64, other: &Mat) {
        debug_assert_eq!(self.shape(), other.shape());
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += *y * s;
        }
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        if self.cols != other.rows {
            return Err(Error::Shape {
                expected: (self.cols, other.cols),
                got: other.shape(),
            });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Mat) -> Mat {
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Mat::zeros(self.field, n, m);
        match self.field {
            Field::Real => {
                for i in 0..n {
                    for l in 0..k {
                        let a = self.data[i * k + l].a;
                        if a == 0.0 {
                            continue;
                        }
                        let row = &other.data[l * m..(l + 1) * m];
                        let dst = &mut out.data[i * m..(i + 1) * m];
                        for (d, b) in dst.iter_mut().zip(row) {
                            d.a += a * b.a;
                        }
                    }
                }
            }
            Field::Complex => {
                for i in 0..n {
                    for l in 0..k {
                        let x = self.data[i * k + l];
                        let row = &other.data[l * m..(l + 1) * m];
                        let dst = &mut out.data[i * m..(i + 1) * m];
                        for (d, y) in dst.iter_mut().zip(row) {
                            d.a += x.a * y.a - x.b * y.b;
                            d.b += x.a * y.b + x.b * y.a;
                        }
                    }
                }
            }
            Field::Quaternion => {
                for i in 0..n {
                    for l in 0..k {
                        let x = self.data[i * k + l];
                        let row = &other.data[l * m..(l + 1) * m];
                        let dst = &mut out.data[i * m..(i + 1) * m];
                        for (d, &y) in dst.iter_mut().zip(row) {
                            *d += x * y;
                        }
                    }
                }
            }
        }
        out
    }

    /// Entrywise conjugate transpose `conj(A)ᵀ`.
    pub fn conj_transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Plain transpose without conjugation.
    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Entrywise conjugation.
    pub fn conj(&self) -> Mat {
        self.map(Quat::conj)
    }

    pub fn trace(&self) -> Quat {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Quat::ZERO, |s, x| s + x)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Induced ∞-norm (max row sum of entry moduli).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Re tr(conj(X)ᵀ Y)`, the real inner product on `𝔽^{n×m}`.
    pub fn frob_inner(&self, other: &Mat) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.dot(other))
    }

    #[inline]
    pub(crate) fn dot(&self, other: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x.dot(*y))
            .sum()
    }

    /// Real coordinates of all entries, `real_dim` consecutive values per entry.
    pub fn flatten_real(&self) -> Vec<f64> {
        let k = self.field.real_dim();
        self.data
            .iter()
            .flat_map(|q| q.to_array().into_iter().take(k))
            .collect()
    }

    /// Inverse of the flattening.
    pub fn unflatten_real(field: Field, rows: usize, cols: usize, values: &[f64]) -> Mat {
        let k = field.real_dim();
        assert_eq!(values.len(), rows * cols * k);
        Mat::from_fn(field, rows, cols, |r, c| {
            let mut v = [0.0; 4];
            v[..k].copy_from_slice(&values[(r * cols + c) * k..(r * cols + c + 1) * k]);
            Quat::from_array(v)
        })
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    ///
    /// Only left row operations are used, so the result is a left inverse (and
    /// therefore the inverse) over ℍ as well.
    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Shape {
                expected: (self.rows, self.rows),
                got: self.shape(),
            });
        }
        let n = self.rows;
        let threshold = PIVOT_REL_TOL * self.norm_max();
        let mut a = self.data.clone();
        let mut inv = Mat::identity(self.field, n).data;
        for col in 0..n {
            let (piv_row, piv_abs) =
                (col..n)
                    .map(|r| (r, a[r * n + col].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_abs <= threshold || piv_abs == 0.0 {
                return Err(Error::Singular {
                    pivot: piv_abs,
                    threshold,
                });
            }
            if piv_row != col {
                for c in 0..n {
                    a.swap(piv_row * n + c, col * n + c);
                    inv.swap(piv_row * n + c, col * n + c);
                }
            }
            let p_inv = a[col * n + col].inv().expect("nonzero pivot");
            for c in 0..n {
                a[col * n + c] = p_inv * a[col * n + c];
                inv[col * n + c] = p_inv * inv[col * n + c];
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == Quat::ZERO {
                    continue;
                }
                for c in 0..n {
                    let (pa, pi) = (a[col * n + c], inv[col * n + c]);
                    a[r * n + c] -= f * pa;
                    inv[r * n + c] -= f * pi;
                }
            }
        }
        Ok(Mat {
            field: self.field,
            rows: n,
            cols: n,
            data: inv.into_iter().map(|q| self.field.project(q)).collect(),
        })
    }

    /// Determinant over a commutative field (ℝ or ℂ).
    pub fn det(&self) -> Result<Quat> {
        if self.field == Field::Quaternion {
            return Err(Error::InvalidArgument(
                "determinant over H; use complex_repr".into(),
            ));
        }
        if !self.is_square() {
            return Err(Error::Shape {
                expected: (self.rows, self.rows),
                got: self.shape(),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Quat::ONE;
        for col in 0..n {
            let piv_row = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap_or(col);
            let p = a[piv_row * n + col];
            if p.norm() == 0.0 {
                return Ok(Quat::ZERO);
            }
            if piv_row != col {
                for c in 0..n {
                    a.swap(piv_row * n + c, col * n + c);
                }
                det = -det;
            }
            det = det * p;
            let p_inv = p.inv().expect("nonzero pivot");
            for r in col + 1..n {
                let f = a[r * n + col] * p_inv;
                for c in col..n {
                    let pc = a[col * n + c];
                    a[r * n + c] -= f * pc;
                }
            }
        }
        Ok(det)
    }

    /// Complex `2n×2n` representation of a quaternionic matrix, writing each
    /// entry `z₁ + z₂·j` as `(z₁ z₂; −conj(z₂) conj(z₁))`. Real and complex
    /// matrices are returned unchanged (as complex matrices).
    pub fn complex_repr(&self) -> Mat {
        match self.field {
            Field::Real | Field::Complex => self.with_field(Field::Complex),
            Field::Quaternion => {
                let mut out = Mat::zeros(Field::Complex, 2 * self.rows, 2 * self.cols);
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        let q = self[(r, c)];
                        let z1 = Quat::complex(q.a, q.b);
                        let z2 = Quat::complex(q.c, q.d);
                        out[(2 * r, 2 * c)] = z1;
                        out[(2 * r, 2 * c + 1)] = z2;
                        out[(2 * r + 1, 2 * c)] = -z2.conj();
                        out[(2 * r + 1, 2 * c + 1)] = z1.conj();
                    }
                }
                out
            }
        }
    }

    /// Real `(k·rows)×(k·cols)` matrix of left multiplication, replacing each
    /// entry by its `k×k` real block in the basis `{1, i}` or `{1, i, j, k}`.
    pub fn real_repr(&self) -> Mat {
        let k = self.field.real_dim();
        let mut out = Mat::zeros(Field::Real, k * self.rows, k * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let lm = self[(r, c)].left_matrix();
                for i in 0..k {
                    for j in 0..k {
                        out[(k * r + i, k * c + j)] = Quat::real(lm[i][j]);
                    }
                }
            }
        }
        out
    }

    /// Matrix exponential `exp(t·A)` by scaling and squaring with a degree-12
    /// Taylor polynomial.
    pub fn mexp(&self, t: f64) -> Mat {
        assert!(self.is_square(), "mexp of a non-square matrix");
        let n = self.rows;
        let x = self.scale(t);
        let norm = x.norm_inf();
        let squarings = if norm > EXP_SCALE_TARGET {
            (norm / EXP_SCALE_TARGET).log2().ceil() as u32
        } else {
            0
        };
        let x = x.scale(0.5f64.powi(squarings as i32));
        // Horner form of the truncated series: I + X(I + X/2(I + X/3(...))).
        let id = Mat::identity(self.field, n);
        let mut e = id.clone();
        for k in (1..=EXP_TAYLOR_DEGREE).rev() {
            e = &id + &(&x * &e).scale(1.0 / k as f64);
        }
        for _ in 0..squarings {
            e = &e * &e;
        }
        e
    }

    /// Commutator `AB − BA`.
    pub fn bracket(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Quat;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Quat {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quat {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, other: &Mat) -> Mat {
        debug_assert_eq!(self.field, other.field, "field mismatch in product");
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        self.mul_unchecked(other)
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        self.zip_with(other, |x, y| x + y)
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, other: &Mat) -> Mat {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in difference");
        self.zip_with(other, |x, y| x - y)
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.map(|x| -x)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat<{}> {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let q = self[(r, c)];
                    match self.field {
                        Field::Real => format!("{:.6}", q.a),
                        Field::Complex => format!("{:.6}{:+.6}i", q.a, q.b),
                        Field::Quaternion => {
                            format!("{:.4}{:+.4}i{:+.4}j{:+.4}k", q.a, q.b, q.c, q.d)
                        }
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
