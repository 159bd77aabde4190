//! Dense complex non-symmetric eigendecomposition.
//!
//! The pipeline is balance, Householder reduction to upper Hessenberg
//! form, explicit single-shift QR with Wilkinson shifts and deflation,
//! then eigenvectors by back-substitution on the triangular factor.
//! Left eigenvectors come from the same machinery applied to the
//! transpose and are paired to the right system by optimal assignment.
//!
//! Everything is plain f64 arithmetic in a fixed order: identical input
//! bits give identical output bits, with no randomness anywhere.
//!
//! Balancing is what makes the boundary-driven chains tractable: their
//! corner entries can span dozens of orders of magnitude, and the
//! diagonal similarity compresses that spread before the QR iteration
//! sees it.

use num_complex::Complex64;

use crate::assign::{bottleneck_value, hungarian};
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix};

/// Eigenvector-matrix condition number at or above this value marks the
/// basis as unreliable (defective or numerically so).
pub const DEFECTIVE_COND_THRESHOLD: f64 = 1e12;

const MAX_BALANCE_PASSES: usize = 100;

/// Full spectral data of a square complex matrix.
///
/// Eigenvalues are sorted by (Re, Im); right eigenvectors are unit-norm
/// columns, left eigenvectors unit-norm rows, both aligned with the
/// eigenvalue order. Residuals are relative to the Frobenius norm of
/// the input.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<Complex64>,
    right: ComplexMatrix,
    left: ComplexMatrix,
    residuals: Vec<f64>,
    left_residuals: Vec<f64>,
    max_residual: f64,
    cond_v: f64,
    balanced: bool,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Unit-norm right eigenvector for eigenvalue k (column k).
    pub fn right_vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|r| self.right[(r, k)]).collect()
    }

    /// Unit-norm left row vector u_k with u_k M = lambda_k u_k.
    pub fn left_vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|c| self.left[(k, c)]).collect()
    }

    pub fn right_matrix(&self) -> &ComplexMatrix {
        &self.right
    }

    pub fn left_matrix(&self) -> &ComplexMatrix {
        &self.left
    }

    /// Per-mode right residuals |M v - lambda v| / |M|_F.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Per-mode left residuals |u M - lambda u| / |M|_F.
    pub fn left_residuals(&self) -> &[f64] {
        &self.left_residuals
    }

    /// Largest residual across right and left modes.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// 1-norm condition number of the right-eigenvector matrix.
    pub fn cond_v(&self) -> f64 {
        self.cond_v
    }

    pub fn balanced(&self) -> bool {
        self.balanced
    }

    /// True when the eigenvector basis should not be trusted.
    pub fn is_defective(&self) -> bool {
        !self.cond_v.is_finite() || self.cond_v >= DEFECTIVE_COND_THRESHOLD
    }
}

/// Diagonal similarity D^{-1} M D with row and column norms
/// equilibrated by iterated power-of-two scalings. The spectrum is
/// preserved exactly in exact arithmetic; D is returned for
/// back-transforming eigenvectors (v = D v_balanced).
pub fn balance(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut d = vec![1.0_f64; n];
    let radix = 2.0_f64;
    let radix_sq = radix * radix;
    for _ in 0..MAX_BALANCE_PASSES {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                col += a[(j, i)].re.abs() + a[(j, i)].im.abs();
                row += a[(i, j)].re.abs() + a[(i, j)].im.abs();
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut c = col;
            let mut f = 1.0;
            let mut g = row / radix;
            while c < g {
                f *= radix;
                c *= radix_sq;
            }
            g = row * radix;
            while c > g {
                f /= radix;
                c /= radix_sq;
            }
            if (c + row) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (a, d)
}

/// Eigenvalues only (balanced path, no eigenvectors), sorted by
/// (Re, Im).
pub fn eigenvalues_only(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    check_input(m)?;
    let (mut t, _) = balance(m);
    hessenberg(&mut t, None);
    schur(&mut t, None)?;
    let mut vals: Vec<Complex64> = (0..m.dim()).map(|i| t[(i, i)]).collect();
    for v in &vals {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonConvergence { sweeps: 0, dim: m.dim(), norm: m.frobenius_norm() });
        }
    }
    sort_complex(&mut vals);
    Ok(vals)
}

/// Full eigensystem with balancing.
pub fn eigensystem(m: &ComplexMatrix) -> Result<EigenSystem> {
    eigensystem_opts(m, true)
}

/// Full eigensystem; `use_balance = false` skips the equilibration
/// step (useful for measuring what balancing buys).
pub fn eigensystem_opts(m: &ComplexMatrix, use_balance: bool) -> Result<EigenSystem> {
    check_input(m)?;
    let n = m.dim();
    let fro = m.frobenius_norm();

    let (right, eigenvalues) = right_system(m, use_balance)?;
    let (left_cols, left_vals) = right_system(&m.transpose(), use_balance)?;

    // Pair the transpose system to the right system by eigenvalue
    // proximity; the multisets agree up to roundoff.
    let pairing = if n > 0 {
        let mut cost = vec![0.0_f64; n * n];
        for i in 0..n {
            for j in 0..n {
                cost[i * n + j] = (eigenvalues[i] - left_vals[j]).norm();
            }
        }
        hungarian(n, &cost)
    } else {
        Vec::new()
    };
    let mut left = ComplexMatrix::zeros(n);
    for k in 0..n {
        let src = pairing[k];
        for c in 0..n {
            left[(k, c)] = left_cols[(c, src)];
        }
    }

    let mut residuals = Vec::with_capacity(n);
    let mut left_residuals = Vec::with_capacity(n);
    let denom = if fro > 0.0 { fro } else { 1.0 };
    for k in 0..n {
        let v: Vec<Complex64> = (0..n).map(|r| right[(r, k)]).collect();
        let mut mv = m.matvec(&v);
        for (x, vi) in mv.iter_mut().zip(&v) {
            *x -= eigenvalues[k] * vi;
        }
        residuals.push(vec_norm(&mv) / denom);

        let u: Vec<Complex64> = (0..n).map(|c| left[(k, c)]).collect();
        let mut um = m.vecmat(&u);
        for (x, ui) in um.iter_mut().zip(&u) {
            *x -= eigenvalues[k] * ui;
        }
        left_residuals.push(vec_norm(&um) / denom);
    }
    let max_residual = residuals
        .iter()
        .chain(left_residuals.iter())
        .fold(0.0_f64, |a, &b| a.max(b));

    let cond_v = cond_one(&right);

    Ok(EigenSystem {
        eigenvalues,
        right,
        left,
        residuals,
        left_residuals,
        max_residual,
        cond_v,
        balanced: use_balance,
    })
}

/// Minimal worst-pair distance between two eigenvalue multisets
/// (bottleneck assignment on |a_i - b_j|). Symmetric, and zero exactly
/// when the multisets coincide.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "multisets have {} and {} entries",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut cost = vec![0.0_f64; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (a[i] - b[j]).norm();
        }
    }
    Ok(bottleneck_value(n, &cost))
}

fn check_input(m: &ComplexMatrix) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::InvalidInput(
            "eigensolver input contains non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Right eigenvectors and sorted eigenvalues of m.
fn right_system(m: &ComplexMatrix, use_balance: bool) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    let n = m.dim();
    let (mut t, d) = if use_balance {
        balance(m)
    } else {
        (m.clone(), vec![1.0; n])
    };
    let mut z = ComplexMatrix::identity(n);
    hessenberg(&mut t, Some(&mut z));
    schur(&mut t, Some(&mut z))?;

    let mut vecs = right_vectors_from_schur(&t, &z);
    // Undo balancing column by column, then normalize and fix phases.
    for k in 0..n {
        for r in 0..n {
            vecs[(r, k)] *= d[r];
        }
        normalize_column(&mut vecs, k);
    }

    let mut vals: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    for v in &vals {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonConvergence { sweeps: 0, dim: n, norm: m.frobenius_norm() });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (vals[i].re, vals[i].im)
            .partial_cmp(&(vals[j].re, vals[j].im))
            .unwrap()
    });
    let sorted_vals: Vec<Complex64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = ComplexMatrix::zeros(n);
    for (new_k, &old_k) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[(r, new_k)] = vecs[(r, old_k)];
        }
    }
    vals = sorted_vals;
    Ok((sorted_vecs, vals))
}

/// In-place Householder reduction to upper Hessenberg form; the
/// accumulated unitary goes into `q` when provided (caller passes the
/// identity).
fn hessenberg(a: &mut ComplexMatrix, mut q: Option<&mut ComplexMatrix>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1; // length of the column tail
        let mut tail_sq = 0.0;
        for i in k + 2..n {
            tail_sq += a[(i, k)].norm_sqr();
        }
        if tail_sq == 0.0 {
            continue;
        }
        let alpha = a[(k + 1, k)];
        let xnorm = (alpha.norm_sqr() + tail_sq).sqrt();
        let phase = if alpha == Complex64::ZERO {
            Complex64::ONE
        } else {
            alpha / alpha.norm()
        };
        let mu = phase * xnorm;
        v[0] = alpha + mu;
        for i in 1..m {
            v[i] = a[(k + 1 + i, k)];
        }
        let vhv: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vhv == 0.0 {
            continue;
        }
        let beta = 2.0 / vhv;

        // Left application to rows k+1..n over columns k..n.
        for j in k..n {
            let mut w = Complex64::ZERO;
            for i in 0..m {
                w += v[i].conj() * a[(k + 1 + i, j)];
            }
            let wb = beta * w;
            for i in 0..m {
                let val = wb * v[i];
                a[(k + 1 + i, j)] -= val;
            }
        }
        // Right application to columns k+1..n over all rows.
        for r in 0..n {
            let mut w = Complex64::ZERO;
            for i in 0..m {
                w += a[(r, k + 1 + i)] * v[i];
            }
            let wb = beta * w;
            for i in 0..m {
                let val = wb * v[i].conj();
                a[(r, k + 1 + i)] -= val;
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let mut w = Complex64::ZERO;
                for i in 0..m {
                    w += q[(r, k + 1 + i)] * v[i];
                }
                let wb = beta * w;
                for i in 0..m {
                    let val = wb * v[i].conj();
                    q[(r, k + 1 + i)] -= val;
                }
            }
        }
        // The reflection sends the tail to zero exactly.
        a[(k + 1, k)] = -mu;
        for i in k + 2..n {
            a[(i, k)] = Complex64::ZERO;
        }
    }
}

/// Plane rotation [c, s; -conj(s), c] with real c sending (a, b) to
/// (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    if b == Complex64::ZERO {
        return (1.0, Complex64::ZERO, a);
    }
    if a == Complex64::ZERO {
        let s = b.conj() / b.norm();
        return (0.0, s, Complex64::new(b.norm(), 0.0));
    }
    let na = a.norm();
    let scale = na.max(b.norm());
    let d = scale * ((a / scale).norm_sqr() + (b / scale).norm_sqr()).sqrt();
    let c = na / d;
    let phase = a / na;
    let s = phase * b.conj() / d;
    (c, s, phase * d)
}

/// Single-shift QR with deflation on an upper Hessenberg matrix,
/// accumulating the unitary into `z` when provided. On success `t` is
/// upper triangular with the eigenvalues on its diagonal.
fn schur(t: &mut ComplexMatrix, mut z: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = t.dim();
    if n <= 1 {
        return Ok(());
    }
    let fro = t.frobenius_norm();
    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE / eps;
    let max_sweeps = 30 * n;
    let mut total_sweeps = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;

    loop {
        // Deflation scan: find the start of the active window.
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let local = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let thresh = (eps * if local > 0.0 { local } else { fro }).max(tiny);
            if sub <= thresh {
                t[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                break;
            }
            hi -= 1;
            its = 0;
            continue;
        }

        total_sweeps += 1;
        its += 1;
        if total_sweeps > max_sweeps {
            return Err(Error::NonConvergence { sweeps: total_sweeps, dim: n, norm: fro });
        }

        let shift = if its.is_multiple_of(10) {
            // Occasional ad hoc shift to break symmetry cycles.
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        // Explicit shifted QR step on the window, with rotations applied
        // across the full width so the deflated blocks stay coupled
        // correctly.
        for i in lo..=hi {
            let val = t[(i, i)] - shift;
            t[(i, i)] = val;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s, r) = givens(t[(i, i)], t[(i + 1, i)]);
            t[(i, i)] = r;
            t[(i + 1, i)] = Complex64::ZERO;
            for j in i + 1..n {
                let x = t[(i, j)];
                let y = t[(i + 1, j)];
                t[(i, j)] = c * x + s * y;
                t[(i + 1, j)] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (k, &(c, s)) in rots.iter().enumerate() {
            let i = lo + k;
            for r in 0..=i + 1 {
                let x = t[(r, i)];
                let y = t[(r, i + 1)];
                t[(r, i)] = c * x + s.conj() * y;
                t[(r, i + 1)] = -s * x + c * y;
            }
            if let Some(z) = z.as_deref_mut() {
                for r in 0..n {
                    let x = z[(r, i)];
                    let y = z[(r, i + 1)];
                    z[(r, i)] = c * x + s.conj() * y;
                    z[(r, i + 1)] = -s * x + c * y;
                }
            }
        }
        for i in lo..=hi {
            let val = t[(i, i)] + shift;
            t[(i, i)] = val;
        }
    }

    // Clean the strictly lower part; deflation already zeroed the
    // subdiagonal entries.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 block closest to its (2,2) entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let s = (p * p + bc).sqrt();
    let plus = p + s;
    let minus = p - s;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    if big == Complex64::ZERO {
        d
    } else {
        d - bc / big
    }
}

/// Right eigenvectors of the (triangular, unitary) Schur pair by
/// back-substitution, columns in Schur order, not yet normalized.
fn right_vectors_from_schur(t: &ComplexMatrix, z: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let tnorm = t.frobenius_norm();
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE * n as f64);
    let mut out = ComplexMatrix::zeros(n);
    let mut y = vec![Complex64::ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        for item in y.iter_mut().take(k) {
            *item = Complex64::ZERO;
        }
        y[k] = Complex64::ONE;
        for i in (0..k).rev() {
            let mut num = Complex64::ZERO;
            for j in i + 1..=k {
                num += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < smin {
                // Repeated eigenvalue: floor the pivot so the solve
                // stays finite. Defective structure then shows up as
                // nearly parallel columns and a huge cond_v.
                den = Complex64::new(smin, 0.0);
            }
            y[i] = -num / den;
            let mag = y[i].norm();
            if mag > 1e100 {
                let scale = 1.0 / mag;
                for item in y.iter_mut().take(k + 1).skip(i) {
                    *item *= scale;
                }
            }
        }
        for r in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..=k {
                acc += z[(r, j)] * y[j];
            }
            out[(r, k)] = acc;
        }
    }
    out
}

/// Normalize column k to unit 2-norm and rotate the phase so that the
/// first entry of largest magnitude is real and positive.
fn normalize_column(m: &mut ComplexMatrix, k: usize) {
    let n = m.dim();
    let mut norm_sq = 0.0;
    for r in 0..n {
        norm_sq += m[(r, k)].norm_sqr();
    }
    let norm = norm_sq.sqrt();
    if norm == 0.0 {
        return;
    }
    let mut best_mag = 0.0_f64;
    for r in 0..n {
        best_mag = best_mag.max(m[(r, k)].norm());
    }
    // First entry within roundoff of the maximum, so ulp-level ties
    // resolve to the lowest index.
    let mut best = 0usize;
    for r in 0..n {
        if m[(r, k)].norm() >= best_mag * (1.0 - 1e-12) {
            best = r;
            break;
        }
    }
    let pivot = m[(best, k)];
    let phase = pivot / pivot.norm();
    let factor = phase.conj() / norm;
    for r in 0..n {
        let val = m[(r, k)] * factor;
        m[(r, k)] = val;
    }
}

/// 1-norm condition number via LU with partial pivoting and explicit
/// inverse. Infinite when the matrix is numerically singular.
fn cond_one(v: &ComplexMatrix) -> f64 {
    let n = v.dim();
    if n == 0 {
        return 1.0;
    }
    let norm_v = one_norm(v);
    let mut lu = v.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[(col, col)].norm();
        for r in col + 1..n {
            let mag = lu[(r, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return f64::INFINITY;
        }
        if pivot_row != col {
            for j in 0..n {
                let a = lu[(col, j)];
                let b = lu[(pivot_row, j)];
                lu[(col, j)] = b;
                lu[(pivot_row, j)] = a;
            }
            perm.swap(col, pivot_row);
        }
        let inv_pivot = 1.0 / lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] * inv_pivot;
            lu[(r, col)] = factor;
            for j in col + 1..n {
                let val = factor * lu[(col, j)];
                lu[(r, j)] -= val;
            }
        }
    }
    // Solve V x = e_j for each j to build the inverse, column by column.
    let mut inv_norm = 0.0_f64;
    let mut x = vec![Complex64::ZERO; n];
    for j in 0..n {
        for (r, item) in x.iter_mut().enumerate() {
            *item = if perm[r] == j { Complex64::ONE } else { Complex64::ZERO };
        }
        for r in 1..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= lu[(r, c)] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= lu[(r, c)] * x[c];
            }
            x[r] = acc / lu[(r, r)];
        }
        let col_sum: f64 = x.iter().map(|z| z.norm()).sum();
        inv_norm = inv_norm.max(col_sum);
    }
    norm_v * inv_norm
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut best = 0.0_f64;
    for j in 0..n {
        let mut sum = 0.0;
        for i in 0..n {
            sum += m[(i, j)].norm();
        }
        best = best.max(sum);
    }
    best
}

fn sort_complex(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::bilinear_dot;
    use crate::model::{build_hamiltonian, build_transformed, BoundaryFamily, ModelParams};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn pauli_x_eigensystem() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let es = eigensystem(&m).unwrap();
        assert!((es.eigenvalues()[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((es.eigenvalues()[1] - c(1.0, 0.0)).norm() < 1e-14);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let v0 = es.right_vector(0);
        let v1 = es.right_vector(1);
        assert!((v0[0].re - inv_sqrt2).abs() < 1e-12 && (v0[1].re + inv_sqrt2).abs() < 1e-12);
        assert!((v1[0].re - inv_sqrt2).abs() < 1e-12 && (v1[1].re - inv_sqrt2).abs() < 1e-12);
        assert!(es.max_residual() < 1e-14);
        // 1-norm condition of an orthogonal 2x2 basis is exactly 2.
        assert!(es.cond_v() <= 2.0 + 1e-12);
    }

    #[test]
    fn jordan_block_is_flagged_defective() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let es = eigensystem(&m).unwrap();
        assert!(es.eigenvalues()[0].norm() < 1e-14);
        assert!(es.eigenvalues()[1].norm() < 1e-14);
        assert!(es.cond_v() >= DEFECTIVE_COND_THRESHOLD, "cond_v = {}", es.cond_v());
        assert!(es.is_defective());
    }

    #[test]
    fn real_ring_spectrum_matches_cosines() {
        let family = BoundaryFamily::new(1.0, 0.0, c(4.0, 0.0), c(1.0, 0.0)).unwrap();
        let h = family.hamiltonian(10).unwrap();
        let computed = eigenvalues_only(&h).unwrap();
        let mut expected: Vec<Complex64> =
            (0..10).map(|m| c(2.0 * (2.0 * PI * m as f64 / 10.0).cos(), 0.0)).collect();
        expected.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let dist = multiset_distance(&computed, &expected).unwrap();
        assert!(dist < 1e-8, "distance {dist}");
    }

    #[test]
    fn isospectral_pair_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.random_range(2..=14usize);
            let draw = |rng: &mut ChaCha8Rng| {
                Complex64::from_polar(rng.random_range(0.3..2.5), rng.random_range(-3.1..3.1))
            };
            let p = ModelParams::new(
                n,
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng) * rng.random_range(0.2..1.5),
                draw(&mut rng) * rng.random_range(0.2..1.5),
            )
            .unwrap();
            let h = build_hamiltonian(&p);
            let ht = build_transformed(&p).unwrap();
            let a = eigenvalues_only(&h).unwrap();
            let b = eigenvalues_only(&ht).unwrap();
            let scale = ht.frobenius_norm().max(1.0);
            let dist = multiset_distance(&a, &b).unwrap();
            assert!(dist < 1e-8 * scale, "distance {dist} at scale {scale}");
        }
    }

    #[test]
    fn balance_leaves_symmetric_tridiagonal_alone() {
        let mut m = ComplexMatrix::zeros(6);
        for i in 0..5 {
            m[(i, i + 1)] = c(1.0, 0.0);
            m[(i + 1, i)] = c(1.0, 0.0);
        }
        let (b, d) = balance(&m);
        assert!(b.max_abs_diff(&m) == 0.0);
        for &x in &d {
            assert!((0.5..=2.0).contains(&x));
        }
    }

    #[test]
    fn balance_compresses_extreme_corners() {
        // Transformed chain at rho = 2, q = 4, N = 10 has corners
        // e^{+20} and e^{-20}.
        let family = BoundaryFamily::new(2.0, 0.0, c(4.0, 0.0), c(1.0, 0.0)).unwrap();
        let ht = family.transformed(10).unwrap();
        let spread_before = ht.max_abs_entry() / ht.min_nonzero_abs_entry().unwrap();
        assert!(spread_before > 1e17);
        let (b, _) = balance(&ht);
        let spread_after = b.max_abs_entry() / b.min_nonzero_abs_entry().unwrap();
        assert!(
            spread_before / spread_after >= 1e8,
            "spread {spread_before:.3e} -> {spread_after:.3e}"
        );
    }

    #[test]
    fn balance_undoes_diagonal_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(2..=8usize);
            let a = random_matrix(&mut rng, n);
            let mut d = vec![Complex64::ONE; n];
            for item in d.iter_mut() {
                *item = c(10.0_f64.powi(rng.random_range(-10..=10)), 0.0);
            }
            let inv: Vec<Complex64> = d.iter().map(|z| 1.0 / z).collect();
            let skewed = a.diag_conjugate(&inv).unwrap();
            let (b, _) = balance(&skewed);
            let spread_a = a.max_abs_entry() / a.min_nonzero_abs_entry().unwrap();
            let spread_b = b.max_abs_entry() / b.min_nonzero_abs_entry().unwrap();
            assert!(
                spread_b <= 4.0 * spread_a,
                "spread {spread_b:.3e} vs original {spread_a:.3e}"
            );
        }
    }

    #[test]
    fn balancing_does_not_move_well_conditioned_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.random_range(2..=10usize);
            let m = random_matrix(&mut rng, n);
            let with = eigensystem_opts(&m, true).unwrap();
            let without = eigensystem_opts(&m, false).unwrap();
            if with.cond_v() >= 1e6 {
                continue;
            }
            let dist = multiset_distance(with.eigenvalues(), without.eigenvalues()).unwrap();
            assert!(dist < 1e-8, "distance {dist}");
        }
    }

    #[test]
    fn hermitian_transformed_chain_has_real_spectrum() {
        // Purely imaginary q keeps the transformed chain Hermitian for
        // any rho and phi.
        let family = BoundaryFamily::new(0.6, 1.1, c(0.0, 1.3), c(1.0, 0.0)).unwrap();
        let ht = family.transformed(9).unwrap();
        let vals = eigenvalues_only(&ht).unwrap();
        let scale = ht.frobenius_norm();
        for v in vals {
            assert!(v.im.abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn deterministic_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let m = random_matrix(&mut rng, 12);
        let a = eigensystem(&m).unwrap();
        let b = eigensystem(&m).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        for k in 0..a.dim() {
            for (x, y) in a.right_vector(k).iter().zip(b.right_vector(k)) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }

    #[test]
    fn residuals_and_biorthogonality_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked_pairs = 0;
        for _ in 0..15 {
            let n = rng.random_range(2..=12usize);
            let m = random_matrix(&mut rng, n);
            let es = eigensystem(&m).unwrap();
            if es.cond_v() >= 1e8 {
                continue;
            }
            assert!(es.max_residual() < 1e-10, "residual {}", es.max_residual());
            let fro = m.frobenius_norm();
            let mut min_gap = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    min_gap = min_gap.min((es.eigenvalues()[i] - es.eigenvalues()[j]).norm());
                }
            }
            if min_gap < 1e-6 * fro {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    let dot = bilinear_dot(&es.left_vector(j), &es.right_vector(k));
                    assert!(dot.norm() <= 1e-8, "|u_{j} . v_{k}| = {}", dot.norm());
                    checked_pairs += 1;
                }
            }
        }
        assert!(checked_pairs > 0);
    }

    #[test]
    fn multiset_distance_examples() {
        let a = [c(1.0, 0.0), c(0.0, 1.0)];
        let b = [c(0.0, 1.0), c(1.0, 0.0)];
        assert_eq!(multiset_distance(&a, &b).unwrap(), 0.0);

        let eps = 1e-3;
        let a = [c(0.0, 0.0), c(0.0, 0.0)];
        let b = [c(eps, 0.0), c(-eps, 0.0)];
        assert!((multiset_distance(&a, &b).unwrap() - eps).abs() < 1e-18);

        assert!(multiset_distance(&a, &b[..1]).is_err());
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(eigensystem(&m).is_err());
    }

    #[test]
    fn upper_triangular_input_short_circuits() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(3.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.5), c(4.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, -2.0)],
        ])
        .unwrap();
        let vals = eigenvalues_only(&m).unwrap();
        let expected = [c(-1.0, 0.5), c(0.5, -2.0), c(3.0, 1.0)];
        assert!(multiset_distance(&vals, &expected).unwrap() < 1e-14);
    }
}
