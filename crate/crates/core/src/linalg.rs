//! Small dense complex matrices and vectors.
//!
//! Transposition never conjugates and the "square" of a vector is the
//! holomorphic bilinear form `sum z_i^2`. Both conventions are what the
//! complexified Riccati formulas need; the Hermitian versions are never used.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square `d x d` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    d: usize,
    data: Vec<Complex64>,
}

/// Complex vector of length `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(pub Vec<Complex64>);

impl CMatrix {
    pub fn zeros(d: usize) -> Self {
        CMatrix {
            d,
            data: vec![ZERO; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if `data.len() != d * d`.
    pub fn from_row_major(d: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), d * d, "row-major data must hold d*d entries");
        CMatrix { d, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let d = rows.len();
        let mut data = Vec::with_capacity(d * d);
        for row in rows {
            assert_eq!(row.len(), d, "matrix rows must have length d");
            data.extend_from_slice(row);
        }
        CMatrix { d, data }
    }

    /// Embeds a real row-major matrix.
    pub fn from_real(d: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), d * d, "row-major data must hold d*d entries");
        CMatrix {
            d,
            data: data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Transpose without conjugation.
    pub fn transpose_star(&self) -> CMatrix {
        let d = self.d;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.d).map(|i| self.data[i * self.d + i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            d: self.d,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        CMatrix {
            d: self.d,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self + s * other`, the workhorse of the Runge-Kutta stages.
    pub fn add_scaled(&self, s: f64, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.d, other.d);
        CMatrix {
            d: self.d,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b * s)
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.same_dim(other)?;
        Ok(self * other)
    }

    pub fn checked_mul_vec(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                what: "vector",
                index: 0,
                expected: self.d,
                found: v.len(),
            });
        }
        Ok(self.mul_vec(v))
    }

    fn same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                what: "matrix",
                index: 0,
                expected: self.d,
                found: other.d,
            });
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(v.len(), self.d, "matrix-vector dimension mismatch");
        let d = self.d;
        CVector(
            (0..d)
                .map(|i| {
                    self.data[i * d..(i + 1) * d]
                        .iter()
                        .zip(&v.0)
                        .map(|(&a, &b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.d.max(1))
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry of `self - self^*`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i]).norm());
            }
        }
        worst
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let d = self.d;
        let scale = self.norm_inf();
        let tol = 1e-14 * scale;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(d).data;

        for col in 0..d {
            let (pivot_row, pivot_abs) = (col..d)
                .map(|r| (r, a[r * d + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > tol) || pivot_abs == 0.0 {
                return Err(Error::SingularMatrix {
                    column: col,
                    pivot: pivot_abs.max(0.0),
                });
            }
            if pivot_row != col {
                for k in 0..d {
                    a.swap(col * d + k, pivot_row * d + k);
                    inv.swap(col * d + k, pivot_row * d + k);
                }
            }
            let p = a[col * d + col].inv();
            for k in 0..d {
                a[col * d + k] *= p;
                inv[col * d + k] *= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * d + col];
                if f == ZERO {
                    continue;
                }
                for k in 0..d {
                    let ak = a[col * d + k];
                    let ik = inv[col * d + k];
                    a[r * d + k] -= f * ak;
                    inv[r * d + k] -= f * ik;
                }
            }
        }
        Ok(CMatrix { d, data: inv })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.d + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.d + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.d, rhs.d, "matrix dimension mismatch");
        CMatrix {
            d: self.d,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.d, rhs.d, "matrix dimension mismatch");
        CMatrix {
            d: self.d,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.d, rhs.d, "matrix dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix {
            d: self.d,
            data: self.data.iter().map(|&a| -a).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.d, rhs.d, "matrix dimension mismatch");
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                for (o, &b) in out[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        CMatrix { d, data: out }
    }
}

impl CVector {
    pub fn zeros(d: usize) -> Self {
        CVector(vec![ZERO; d])
    }

    pub fn from_real(v: &[f64]) -> Self {
        CVector(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum z_i^2` with no conjugation.
    pub fn bilinear_square(&self) -> Complex64 {
        self.0.iter().map(|z| z * z).sum()
    }

    /// Unconjugated dot product `sum a_i b_i`.
    pub fn dot_star(&self, other: &CVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.len(), rhs.len(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.len(), rhs.len(), "vector dimension mismatch");
        CVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

/// Free-function form of [`CMatrix::transpose_star`].
pub fn transpose_star(m: &CMatrix) -> CMatrix {
    m.transpose_star()
}

/// Free-function form of [`CVector::bilinear_square`].
pub fn bilinear_square(z: &CVector) -> Complex64 {
    z.bilinear_square()
}
