//! Skin-effect diagnostics: averaged probability densities of the
//! right or left eigenmodes, exponential decay fits, and inverse
//! participation ratios.

use num_complex::Complex64;

use crate::analytic::ModeSide;
use crate::eig::EigenSystem;
use crate::error::{Error, Result};

/// Largest eigensystem residual accepted when forming a profile.
const RESIDUAL_THRESHOLD: f64 = 1e-6;

/// Which edge the averaged density clings to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Extended,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Extended => "extended",
        }
    }
}

/// Result of a least-squares line on (site, log density).
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Negated slope: density is proportional to e^{-rate * n}.
    pub rate: f64,
    /// Coefficient of determination of the linear fit.
    pub r2: f64,
    /// Sites dropped because their density was not positive.
    pub excluded_sites: usize,
}

/// Per-site average probability density over a full mode set, with the
/// fitted decay rate and localization label.
#[derive(Debug, Clone)]
pub struct SkinProfile {
    densities: Vec<f64>,
    side: Side,
    decay_rate: f64,
    fit_r2: f64,
    ipr_mean: f64,
    trusted: bool,
    excluded_sites: usize,
}

impl SkinProfile {
    /// Build a profile from raw densities (normalized to unit sum).
    pub fn from_densities(densities: Vec<f64>, ipr_mean: f64, trusted: bool) -> Result<Self> {
        if densities.len() < 2 {
            return Err(Error::InvalidInput("profile needs at least two sites".into()));
        }
        if densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidInput("densities must be finite and nonnegative".into()));
        }
        let total: f64 = densities.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("densities sum to zero".into()));
        }
        let densities: Vec<f64> = densities.iter().map(|d| d / total).collect();
        let n = densities.len();
        let fit = fit_decay(&densities)?;
        let side = if ipr_mean < 2.0 / n as f64 {
            Side::Extended
        } else if fit.rate > 0.0 {
            Side::Left
        } else {
            Side::Right
        };
        Ok(Self {
            densities,
            side,
            decay_rate: fit.rate,
            fit_r2: fit.r2,
            ipr_mean,
            trusted,
            excluded_sites: fit.excluded_sites,
        })
    }

    /// Normalized per-site densities; they sum to one.
    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Fitted exponent: density ~ e^{-rate * n}. Positive means the
    /// weight sits at the left edge, negative at the right edge.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    pub fn fit_r2(&self) -> f64 {
        self.fit_r2
    }

    pub fn ipr_mean(&self) -> f64 {
        self.ipr_mean
    }

    /// False when the eigenvector basis behind the profile was flagged
    /// as unreliable.
    pub fn trusted(&self) -> bool {
        self.trusted
    }

    pub fn excluded_sites(&self) -> usize {
        self.excluded_sites
    }
}

/// Average probability density of the right or left eigenmodes. Every
/// mode is unit-normalized, so the mean of |psi_n|^2 over modes sums to
/// one over sites. A defective eigenvector basis does not abort the
/// computation; the profile is just marked untrusted.
pub fn density_profile(es: &EigenSystem, which: ModeSide) -> Result<SkinProfile> {
    let n = es.dim();
    if n < 2 {
        return Err(Error::InvalidInput("profile needs at least two sites".into()));
    }
    if es.max_residual() > RESIDUAL_THRESHOLD {
        return Err(Error::InvalidInput(format!(
            "eigensystem residual {:.3e} exceeds {RESIDUAL_THRESHOLD:.0e}",
            es.max_residual()
        )));
    }
    let mut densities = vec![0.0_f64; n];
    let mut ipr_sum = 0.0;
    for k in 0..n {
        let v = match which {
            ModeSide::Right => es.right_vector(k),
            ModeSide::Left => es.left_vector(k),
        };
        for (site, z) in v.iter().enumerate() {
            densities[site] += z.norm_sqr();
        }
        ipr_sum += ipr(&v);
    }
    for d in densities.iter_mut() {
        *d /= n as f64;
    }
    let ipr_mean = ipr_sum / n as f64;
    SkinProfile::from_densities(densities, ipr_mean, !es.is_defective())
}

/// Least-squares line on (n, log density) over all sites, 1-based n.
/// Nonpositive densities are excluded and counted. The negated slope is
/// the decay rate.
pub fn fit_decay(densities: &[f64]) -> Result<DecayFit> {
    let mut xs = Vec::with_capacity(densities.len());
    let mut ys = Vec::with_capacity(densities.len());
    let mut excluded = 0usize;
    for (i, &d) in densities.iter().enumerate() {
        if d > 0.0 && d.is_finite() {
            xs.push((i + 1) as f64);
            ys.push(d.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput(
            "fewer than two positive densities, cannot fit a decay rate".into(),
        ));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    // A flat log profile fits its own constant perfectly.
    let r2 = if syy <= 1e-24 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit { rate: -slope, r2, excluded_sites: excluded })
}

/// Inverse participation ratio of a unit-norm mode: sum of |v_n|^4.
/// 1/N for a uniform mode, 1 for a single-site mode.
pub fn ipr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum()
}
