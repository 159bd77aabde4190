//! Hatano-Nelson chain with a tunable boundary link.
//!
//! The chain couples N sites with asymmetric hopping amplitudes t_R
//! (rightward, superdiagonal) and t_L (leftward, subdiagonal). The link
//! between sites N and 1 carries extra factors alpha_R and alpha_L, so a
//! single pair of boundary coefficients interpolates between open
//! (alpha = 0), periodic (alpha = 1) and antiperiodic (alpha = -1)
//! closures, or any generalized closure in between.
//!
//! An imaginary gauge transformation with scaling S_n = e^{q n / 2},
//! where e^q = t_R / t_L, maps the chain onto a partner with symmetric
//! bulk hopping t and rescaled corner links. The two matrices are
//! related by S H S^{-1} = H~ and therefore share their spectrum.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest allowed |Re q| * N. Keeps corner magnitudes of the
/// transformed chain at or below e^60 ~ 1.1e26 before balancing.
pub const RANGE_GUARD_LIMIT: f64 = 60.0;

fn guard_check(n_sites: usize, q: Complex64) -> Result<()> {
    let value = q.re.abs() * n_sites as f64;
    if value > RANGE_GUARD_LIMIT {
        return Err(Error::RangeGuard { value, limit: RANGE_GUARD_LIMIT });
    }
    Ok(())
}

fn require_finite(name: &str, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParams(format!("{name} must be finite, got {z}")));
    }
    Ok(())
}

/// Validated parameters of the chain: size, bulk hoppings and boundary
/// coefficients. The asymmetry exponent q = Log(t_R / t_L) and the
/// symmetric scale t = sqrt(t_L t_R) are derived on principal branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n_sites: usize,
    t_left: Complex64,
    t_right: Complex64,
    alpha_left: Complex64,
    alpha_right: Complex64,
}

impl ModelParams {
    pub fn new(
        n_sites: usize,
        t_left: Complex64,
        t_right: Complex64,
        alpha_left: Complex64,
        alpha_right: Complex64,
    ) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidParams(format!(
                "n_sites must be at least 2 (a boundary link needs two distinct sites), got {n_sites}"
            )));
        }
        require_finite("t_left", t_left)?;
        require_finite("t_right", t_right)?;
        require_finite("alpha_left", alpha_left)?;
        require_finite("alpha_right", alpha_right)?;
        if t_left == Complex64::ZERO || t_right == Complex64::ZERO {
            return Err(Error::InvalidParams(
                "hopping amplitudes must be nonzero so that Log(t_R / t_L) exists".into(),
            ));
        }
        Ok(Self { n_sites, t_left, t_right, alpha_left, alpha_right })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn t_left(&self) -> Complex64 {
        self.t_left
    }

    pub fn t_right(&self) -> Complex64 {
        self.t_right
    }

    pub fn alpha_left(&self) -> Complex64 {
        self.alpha_left
    }

    pub fn alpha_right(&self) -> Complex64 {
        self.alpha_right
    }

    /// Asymmetry exponent q = Log(t_R / t_L), principal branch, so
    /// exp(q) = t_R / t_L to machine precision.
    pub fn asymmetry_exponent(&self) -> Complex64 {
        (self.t_right / self.t_left).ln()
    }

    /// Symmetric hopping scale sqrt(t_L t_R) on the principal branch.
    pub fn hopping_scale(&self) -> Complex64 {
        (self.t_left * self.t_right).sqrt()
    }

    /// Hopping scale on the branch coherent with the gauge scaling,
    /// t = t_R e^{-q/2}. Its square is t_L t_R; it may differ from the
    /// principal square root by a sign for complex hoppings. Used by the
    /// transformed builder so that S H S^{-1} reproduces it entrywise.
    pub fn coherent_hopping_scale(&self) -> Complex64 {
        self.t_right * (-self.asymmetry_exponent() / 2.0).exp()
    }

    /// True when bulk and boundary links connect the same pair of sites
    /// (N = 2), in which case their amplitudes add on that pair.
    pub fn has_merged_boundary(&self) -> bool {
        self.n_sites == 2
    }
}

/// Boundary family parametrized by (rho, phi, q, t): the boundary
/// coefficients are alpha_L = e^{i phi} e^{rho q N / 2} and
/// alpha_R = 1 / alpha_L, while t_L = t e^{-q/2} and t_R = t e^{+q/2}.
///
/// q is taken as given rather than derived from hoppings: the rho
/// parametrization is ambiguous under q -> q + 2 pi i, so the caller's
/// branch is authoritative. phi is stored reduced to [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFamily {
    rho: f64,
    phi: f64,
    q: Complex64,
    t: Complex64,
}

impl BoundaryFamily {
    pub fn new(rho: f64, phi: f64, q: Complex64, t: Complex64) -> Result<Self> {
        if !rho.is_finite() || !(0.0..=2.0).contains(&rho) {
            return Err(Error::InvalidParams(format!(
                "rho must lie in [0, 2], got {rho}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParams("phi must be finite".into()));
        }
        require_finite("q", q)?;
        require_finite("t", t)?;
        if t == Complex64::ZERO {
            return Err(Error::InvalidParams("hopping scale t must be nonzero".into()));
        }
        let tau = 2.0 * std::f64::consts::PI;
        Ok(Self { rho, phi: phi.rem_euclid(tau), q, t })
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

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn alpha_left(&self, n_sites: usize) -> Complex64 {
        let exponent = Complex64::new(0.0, self.phi) + self.q * (self.rho * n_sites as f64 / 2.0);
        exponent.exp()
    }

    pub fn alpha_right(&self, n_sites: usize) -> Complex64 {
        1.0 / self.alpha_left(n_sites)
    }

    /// Expand to direct parameters for a chain of n_sites sites.
    pub fn to_params(&self, n_sites: usize) -> Result<ModelParams> {
        guard_check(n_sites, self.q)?;
        let t_left = self.t * (-self.q / 2.0).exp();
        let t_right = self.t * (self.q / 2.0).exp();
        ModelParams::new(
            n_sites,
            t_left,
            t_right,
            self.alpha_left(n_sites),
            self.alpha_right(n_sites),
        )
    }

    /// Chain matrix for this family.
    pub fn hamiltonian(&self, n_sites: usize) -> Result<ComplexMatrix> {
        Ok(build_hamiltonian(&self.to_params(n_sites)?))
    }

    /// Gauge-transformed partner, built with the family's own q and t so
    /// the branch is exact even when Im q lies outside (-pi, pi].
    pub fn transformed(&self, n_sites: usize) -> Result<ComplexMatrix> {
        let params = self.to_params(n_sites)?;
        build_transformed_with(&params, self.q, self.t)
    }
}

/// Chain matrix: t_R on the superdiagonal, t_L on the subdiagonal,
/// alpha_R t_R at (N, 1) and alpha_L t_L at (1, N) in 1-based site
/// labels. For N = 2 the boundary link lands on the same pair as the
/// bulk link and the amplitudes add.
pub fn build_hamiltonian(p: &ModelParams) -> ComplexMatrix {
    let n = p.n_sites;
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n - 1 {
        m[(i, i + 1)] += p.t_right;
        m[(i + 1, i)] += p.t_left;
    }
    m[(n - 1, 0)] += p.alpha_right * p.t_right;
    m[(0, n - 1)] += p.alpha_left * p.t_left;
    m
}

/// Gauge-transformed chain: symmetric bulk hopping t on both
/// off-diagonals, corners t alpha_R e^{qN/2} at (N, 1) and
/// t alpha_L e^{-qN/2} at (1, N).
pub fn build_transformed(p: &ModelParams) -> Result<ComplexMatrix> {
    build_transformed_with(p, p.asymmetry_exponent(), p.coherent_hopping_scale())
}

fn build_transformed_with(p: &ModelParams, q: Complex64, t: Complex64) -> Result<ComplexMatrix> {
    let n = p.n_sites;
    guard_check(n, q)?;
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n - 1 {
        m[(i, i + 1)] += t;
        m[(i + 1, i)] += t;
    }
    let half_qn = q * (n as f64 / 2.0);
    m[(n - 1, 0)] += t * p.alpha_right * half_qn.exp();
    m[(0, n - 1)] += t * p.alpha_left * (-half_qn).exp();
    if !m.is_finite() {
        return Err(Error::InvalidParams(
            "transformed corner entries overflow double precision".into(),
        ));
    }
    Ok(m)
}

/// Diagonal gauge scaling S_n = e^{q n / 2}, n = 1..N. Conjugation by S
/// maps the chain onto its transformed partner: S H S^{-1} = H~.
pub fn gauge_scaling(n_sites: usize, q: Complex64) -> Result<Vec<Complex64>> {
    guard_check(n_sites, q)?;
    Ok((1..=n_sites)
        .map(|n| (q * (n as f64 / 2.0)).exp())
        .collect())
}

/// Combined parity and time-reversal image of a matrix: conjugate the
/// entries and reflect them across the anti-diagonal,
/// out[i][j] = conj(m[N+1-j][N+1-i]). The chain matrix is invariant
/// under this map whenever all four amplitudes are real.
pub fn pt_conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(n - 1 - j, n - 1 - i)].conj();
        }
    }
    out
}
