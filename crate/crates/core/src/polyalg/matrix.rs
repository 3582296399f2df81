use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use super::poly::Polynomial;
use super::scalar::{Field, FieldError, Scalar};

/// Dense row-major matrix over one scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            field: field.clone(),
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Scalar>>) -> Result<Self, FieldError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for x in row {
                data.push(field.embed(&x)?);
            }
        }
        Ok(Self {
            rows: r,
            cols: c,
            field: field.clone(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) -> Result<(), FieldError> {
        self.data[i * self.cols + j] = self.field.embed(&value)?;
        Ok(())
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        if self.field != other.field {
            return Err(FieldError::IncompatibleField {
                left: self.field.clone(),
                right: other.field.clone(),
            });
        }
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    acc = acc.try_add(&self.get(i, k).try_mul(other.get(k, j))?)?;
                }
                out.data[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// `M − λI` for a scalar `λ` in the same field.
    pub fn shift_diagonal(&self, lambda: &Scalar) -> Result<Self, FieldError> {
        let lambda = self.field.embed(lambda)?;
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let idx = i * self.cols + i;
            out.data[idx] = out.data[idx].try_sub(&lambda)?;
        }
        Ok(out)
    }

    /// Numeric embedding (positive square roots).
    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }

    pub fn to_float(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            field: Field::Float,
            data: self.data.iter().map(Scalar::to_float).collect(),
        }
    }

    /// Determinant. Exact fields use fraction-free (Bareiss) elimination;
    /// the float path uses partial pivoting.
    pub fn determinant(&self) -> Result<Scalar, FieldError> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if !self.field.is_exact() {
            return Ok(Scalar::Float(float_determinant(&self.to_f64())));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.field.one());
        }
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| self.data[i * n..(i + 1) * n].to_vec()).collect();
        let mut prev = self.field.one();
        let mut sign = false;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = !sign;
                    }
                    None => return Ok(self.field.zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k].try_mul(&a[i][j])?.try_sub(&a[i][k].try_mul(&a[k][j])?)?;
                    a[i][j] = num.try_div(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        Ok(if sign { -det } else { det })
    }

    /// `det(M − λI)` as a polynomial in `λ` (leading coefficient `(−1)^n`).
    ///
    /// Bareiss elimination over `F[λ]`: every pivot is a leading principal
    /// minor of `M − λI`, a polynomial with leading coefficient `±1`, so the
    /// exact divisions never need pivoting.
    pub fn characteristic_polynomial(&self) -> Result<Polynomial, FieldError> {
        assert_eq!(self.rows, self.cols, "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let f = &self.field;
        if n == 0 {
            return Ok(Polynomial::constant(f.one()));
        }
        let minus_lambda = Polynomial::monomial(-f.one(), 1);
        let mut a: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = Polynomial::constant(self.get(i, j).clone());
                        if i == j {
                            &c + &minus_lambda
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        let mut prev = Polynomial::constant(f.one());
        for k in 0..n - 1 {
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[k][k].try_mul(&a[i][j])?.try_sub(&a[i][k].try_mul(&a[k][j])?)?;
                    a[i][j] = if f.is_exact() {
                        num.div_exact(&prev)?
                    } else {
                        num.div_rem(&prev)?.0
                    };
                }
            }
            prev = a[k][k].clone();
        }
        Ok(a[n - 1][n - 1].clone())
    }

    /// Basis of the right kernel, by Gauss–Jordan elimination.
    ///
    /// Exact fields pick the first invertible pivot in each column; the float
    /// path uses partial pivoting and treats entries below
    /// `tol · max|M|` as zero.
    pub fn nullspace(&self, tol: f64) -> Result<Vec<Vec<Scalar>>, FieldError> {
        let (r, c) = (self.rows, self.cols);
        let f = &self.field;
        let mut a: Vec<Vec<Scalar>> = (0..r).map(|i| self.data[i * c..(i + 1) * c].to_vec()).collect();
        let scale = self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max).max(1.0);
        let negligible = |x: &Scalar| match x {
            Scalar::Float(v) => v.abs() <= tol * scale,
            other => other.is_zero(),
        };
        let mut pivots: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..c {
            if row >= r {
                break;
            }
            let candidate = if f.is_exact() {
                (row..r).find(|&i| !a[i][col].is_zero() && a[i][col].try_inv().is_ok())
            } else {
                (row..r)
                    .filter(|&i| !negligible(&a[i][col]))
                    .max_by(|&x, &y| a[x][col].abs_f64().total_cmp(&a[y][col].abs_f64()))
            };
            let Some(p) = candidate else {
                if f.is_exact() && (row..r).any(|i| !a[i][col].is_zero()) {
                    // only zero divisors left in this column
                    return Err(FieldError::DivisionByZero);
                }
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].try_inv()?;
            for j in 0..c {
                a[row][j] = a[row][j].try_mul(&inv)?;
            }
            for i in 0..r {
                if i != row && !a[i][col].is_zero() {
                    let factor = a[i][col].clone();
                    for j in 0..c {
                        a[i][j] = a[i][j].try_sub(&factor.try_mul(&a[row][j])?)?;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let mut basis = Vec::new();
        for free in (0..c).filter(|j| !pivots.contains(j)) {
            let mut v = vec![f.zero(); c];
            v[free] = f.one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -&a[prow][free];
            }
            basis.push(v);
        }
        Ok(basis)
    }
}

pub(crate) fn float_determinant(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs()))
            .unwrap_or(k);
        if a[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap_rows(p, k);
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            if factor != 0.0 {
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= factor * v;
                }
            }
        }
    }
    det
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
