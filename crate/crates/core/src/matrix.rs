//! Dense square complex matrix in row-major storage.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense N x N complex matrix. Row index is the creation-operator site,
/// column index the annihilation-operator site.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest magnitude among entries that are not exactly zero.
    pub fn min_nonzero_abs_entry(&self) -> Option<f64> {
        self.data
            .iter()
            .filter(|z| **z != Complex64::ZERO)
            .map(|z| z.norm())
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.min(x))))
    }

    /// Number of entries that are not exactly zero.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|z| **z != Complex64::ZERO).count()
    }

    /// y = M v.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// y = u M for a row vector u.
    pub fn vecmat(&self, u: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(u.len(), self.dim);
        let mut out = vec![Complex64::ZERO; self.dim];
        for (i, ui) in u.iter().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            for (o, a) in out.iter_mut().zip(row) {
                *o += ui * a;
            }
        }
        out
    }

    /// D M D^{-1} for a diagonal D.
    pub fn diag_conjugate(&self, d: &[Complex64]) -> Result<Self> {
        if d.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "diagonal has {} entries, matrix dimension is {}",
                d.len(),
                self.dim
            )));
        }
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = d[i] * self[(i, j)] / d[j];
            }
        }
        Ok(out)
    }

    /// max_{ij} |a_ij - b_ij|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unnormalized bilinear dot product u . v (no conjugation).
pub fn bilinear_dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
