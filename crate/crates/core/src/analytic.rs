//! Closed-form spectra and eigenmodes.
//!
//! For boundary coefficients alpha_L = e^{i phi} e^{rho q N / 2} and
//! alpha_R = 1 / alpha_L the chain diagonalizes in exponential modes
//! with quantized momenta
//!
//!   k_m = (phi + 2 pi m) / N + (i / 2)(1 - rho) q,   m = 0..N-1,
//!
//! and dispersion E = 2 t cos(k). The right and left modes are
//! v_n = e^{-q n / 2} e^{-i k n} and u_n = e^{+q n / 2} e^{+i k n}; in
//! the transformed frame the e^{+-q n / 2} factor drops out. Everything
//! here is exact algebra, used as the oracle for the numeric solver.
//!
//! The dispersion is written with the hopping scale t restored; the
//! dimensionless form sets t = 1.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::vec_norm;
use crate::model::BoundaryFamily;

/// Quantized momenta for a boundary family on N sites.
#[derive(Debug, Clone)]
pub struct MomentumSet {
    momenta: Vec<Complex64>,
    rho: f64,
    phi: f64,
    q: Complex64,
    n_sites: usize,
}

impl MomentumSet {
    pub fn momenta(&self) -> &[Complex64] {
        &self.momenta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }
}

/// Exact spectrum of the four-site chain together with the discriminant
/// whose root marks the exceptional point.
#[derive(Debug, Clone)]
pub struct N4Spectrum {
    energies: [Complex64; 4],
    delta: Complex64,
    alpha_sq: Complex64,
}

impl N4Spectrum {
    /// The four energies, one per sign combination of
    /// +-(t / sqrt 2) sqrt(alpha^2 + 3 +- sqrt(Delta)).
    pub fn energies(&self) -> &[Complex64; 4] {
        &self.energies
    }

    /// Discriminant Delta = alpha^4 + 2 alpha^2
    /// + 4 (alpha_L e^{-2q} + alpha_R e^{2q}) + 5.
    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    /// alpha^2 = alpha_L alpha_R.
    pub fn alpha_sq(&self) -> Complex64 {
        self.alpha_sq
    }
}

/// Momenta k_m = (phi + 2 pi m) / N + (i/2)(1 - rho) q, checked against
/// the boundary condition e^{rho q N / 2 + i phi} = e^{q N / 2 + i k N}.
pub fn momenta(family: &BoundaryFamily, n_sites: usize) -> Result<MomentumSet> {
    // Triggers the range guard for oversized exponents.
    family.to_params(n_sites)?;
    let n = n_sites as f64;
    let offset = Complex64::new(0.0, 0.5) * (1.0 - family.rho()) * family.q();
    let momenta: Vec<Complex64> = (0..n_sites)
        .map(|m| Complex64::new((family.phi() + 2.0 * PI * m as f64) / n, 0.0) + offset)
        .collect();

    let lhs = (family.q() * (family.rho() * n / 2.0) + Complex64::new(0.0, family.phi())).exp();
    for (m, k) in momenta.iter().enumerate() {
        let rhs = (family.q() * (n / 2.0) + Complex64::new(0.0, 1.0) * k * n).exp();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        if (lhs - rhs).norm() > 1e-12 * scale {
            return Err(Error::InvalidInput(format!(
                "momentum self-check failed at m = {m}: |lhs - rhs| = {:.3e}",
                (lhs - rhs).norm()
            )));
        }
    }
    Ok(MomentumSet { momenta, rho: family.rho(), phi: family.phi(), q: family.q(), n_sites })
}

/// Closed-form spectrum E_m = 2 t cos(k_m) over the momentum set.
pub fn spectrum_closed_form(family: &BoundaryFamily, n_sites: usize) -> Result<Vec<Complex64>> {
    let ks = momenta(family, n_sites)?;
    Ok(ks.momenta().iter().map(|k| 2.0 * family.t() * k.cos()).collect())
}

/// Which side of the biorthogonal pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSide {
    Right,
    Left,
}

/// Site basis for an eigenmode: the bare chain or its gauge-transformed
/// partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeBasis {
    Bare,
    Tilde,
}

/// Unnormalized closed-form eigenmode with momentum k on n_sites sites.
/// Right bare: v_n = e^{-qn/2} e^{-ikn}; left bare: u_n = e^{+qn/2}
/// e^{+ikn}; the tilde variants drop the e^{+-qn/2} factor.
pub fn eigenmode_closed_form(
    k: Complex64,
    q: Complex64,
    n_sites: usize,
    side: ModeSide,
    basis: ModeBasis,
) -> Vec<Complex64> {
    let sign = match side {
        ModeSide::Right => -1.0,
        ModeSide::Left => 1.0,
    };
    (1..=n_sites)
        .map(|n| {
            let n = n as f64;
            let gauge = match basis {
                ModeBasis::Bare => (q * (sign * n / 2.0)).exp(),
                ModeBasis::Tilde => Complex64::ONE,
            };
            gauge * (Complex64::new(0.0, sign * n) * k).exp()
        })
        .collect()
}

/// Copy of a mode scaled to unit Euclidean norm, for comparison against
/// numerically computed eigenvectors.
pub fn normalized_mode(v: &[Complex64]) -> Vec<Complex64> {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|z| z / norm).collect()
}

/// Open-chain spectrum {2 t cos(pi m / (N + 1)) : m = 1..N}, from the
/// quantization sin(k (N + 1)) = 0.
pub fn spectrum_obc(n_sites: usize, t: Complex64) -> Vec<Complex64> {
    (1..=n_sites)
        .map(|m| 2.0 * t * (PI * m as f64 / (n_sites as f64 + 1.0)).cos())
        .collect()
}

/// Exact four-site spectrum for arbitrary boundary coefficients, with
/// hoppings t_L = t e^{-q/2} and t_R = t e^{+q/2}. Principal square
/// roots; all four sign pairs are enumerated, so a vanishing
/// discriminant shows up as repeated energies rather than being
/// collapsed.
pub fn spectrum_n4(
    t: Complex64,
    q: Complex64,
    alpha_left: Complex64,
    alpha_right: Complex64,
) -> N4Spectrum {
    let alpha_sq = alpha_left * alpha_right;
    let delta = alpha_sq * alpha_sq
        + 2.0 * alpha_sq
        + 4.0 * (alpha_left * (-2.0 * q).exp() + alpha_right * (2.0 * q).exp())
        + 5.0;
    let root = delta.sqrt();
    let base = t / 2.0_f64.sqrt();
    let inner_plus = (alpha_sq + 3.0 + root).sqrt();
    let inner_minus = (alpha_sq + 3.0 - root).sqrt();
    let energies = [
        base * inner_plus,
        -base * inner_plus,
        base * inner_minus,
        -base * inner_minus,
    ];
    N4Spectrum { energies, delta, alpha_sq }
}
