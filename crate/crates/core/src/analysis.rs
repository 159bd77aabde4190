//! Parameter sweeps with eigenvalue-branch tracking, exceptional-point
//! search, and spectral reality classification.

use num_complex::Complex64;

use crate::analytic::spectrum_n4;
use crate::assign::hungarian;
use crate::eig::{eigensystem, eigenvalues_only, DEFECTIVE_COND_THRESHOLD};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::model::{build_hamiltonian, build_transformed, BoundaryFamily, ModelParams};

/// Which parameter a sweep or search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Boundary exponent weight rho of the (rho, phi, q, t) family.
    Rho,
    /// Boundary phase phi of the family.
    Phi,
    /// Prefactor r in the boundary scan alpha_L = r e^{qN/2},
    /// alpha_R = e^{-qN/2}.
    BoundaryR,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Rho => "rho",
            SweepAxis::Phi => "phi",
            SweepAxis::BoundaryR => "r",
        }
    }
}

/// Which of the two isospectral chains to diagonalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Bare,
    Transformed,
}

/// Template for sweeps: the family parameters, with the swept one
/// replaced point by point.
#[derive(Debug, Clone, Copy)]
pub struct SweepBase {
    pub n_sites: usize,
    pub t: Complex64,
    pub q: Complex64,
    pub rho: f64,
    pub phi: f64,
    pub kind: MatrixKind,
}

impl SweepBase {
    /// Chain matrix at axis value x.
    pub fn matrix_at(&self, axis: SweepAxis, x: f64) -> Result<ComplexMatrix> {
        match axis {
            SweepAxis::Rho | SweepAxis::Phi => {
                let (rho, phi) = match axis {
                    SweepAxis::Rho => (x, self.phi),
                    SweepAxis::Phi => (self.rho, x),
                    SweepAxis::BoundaryR => unreachable!(),
                };
                let family = BoundaryFamily::new(rho, phi, self.q, self.t)?;
                match self.kind {
                    MatrixKind::Bare => family.hamiltonian(self.n_sites),
                    MatrixKind::Transformed => family.transformed(self.n_sites),
                }
            }
            SweepAxis::BoundaryR => {
                let params = self.boundary_scan_params(x)?;
                match self.kind {
                    MatrixKind::Bare => Ok(build_hamiltonian(&params)),
                    MatrixKind::Transformed => build_transformed(&params),
                }
            }
        }
    }

    fn boundary_scan_params(&self, r: f64) -> Result<ModelParams> {
        let half_qn = self.q * (self.n_sites as f64 / 2.0);
        ModelParams::new(
            self.n_sites,
            self.t * (-self.q / 2.0).exp(),
            self.t * (self.q / 2.0).exp(),
            r * half_qn.exp(),
            (-half_qn).exp(),
        )
    }

    /// Discriminant of the four-site closed form at axis value x, when
    /// the template describes a four-site chain.
    fn delta_at(&self, axis: SweepAxis, x: f64) -> Option<Complex64> {
        if self.n_sites != 4 {
            return None;
        }
        let (alpha_left, alpha_right) = match axis {
            SweepAxis::BoundaryR => {
                let half_qn = self.q * 2.0;
                (x * half_qn.exp(), (-half_qn).exp())
            }
            SweepAxis::Rho => {
                let family = BoundaryFamily::new(x, self.phi, self.q, self.t).ok()?;
                (family.alpha_left(4), family.alpha_right(4))
            }
            SweepAxis::Phi => {
                let family = BoundaryFamily::new(self.rho, x, self.q, self.t).ok()?;
                (family.alpha_left(4), family.alpha_right(4))
            }
        };
        Some(spectrum_n4(self.t, self.q, alpha_left, alpha_right).delta())
    }
}

/// Matched eigenvalue trajectories over a (possibly refined) grid.
#[derive(Debug, Clone)]
pub struct SweepTrace {
    axis: SweepAxis,
    grid: Vec<f64>,
    /// One list per branch, each with exactly one eigenvalue per grid
    /// point; the union over branches at any point is the computed
    /// spectrum there.
    trajectories: Vec<Vec<Complex64>>,
    /// Largest single-branch movement at each step, under the optimal
    /// assignment.
    match_cost: Vec<f64>,
    /// Per step: matching not trustworthy (near-degenerate endpoints or
    /// refinement exhausted).
    degeneracy_flags: Vec<bool>,
}

impl SweepTrace {
    pub fn axis(&self) -> SweepAxis {
        self.axis
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn trajectories(&self) -> &[Vec<Complex64>] {
        &self.trajectories
    }

    pub fn match_cost(&self) -> &[f64] {
        &self.match_cost
    }

    pub fn degeneracy_flags(&self) -> &[bool] {
        &self.degeneracy_flags
    }

    pub fn n_branches(&self) -> usize {
        self.trajectories.len()
    }

    /// Spectrum at grid point g, assembled from the branches.
    pub fn spectrum_at(&self, g: usize) -> Vec<Complex64> {
        self.trajectories.iter().map(|t| t[g]).collect()
    }
}

/// How the gap behaves at a reported coalescence candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpClass {
    /// Gap closes and the eigenvector basis collapses.
    Exceptional,
    /// Gap closes while the eigenvector basis stays usable.
    DiabolicOrOrdinaryCrossing,
    /// Refined dip that does not actually close the gap.
    None,
}

impl EpClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EpClass::Exceptional => "exceptional",
            EpClass::DiabolicOrOrdinaryCrossing => "diabolic-or-ordinary-crossing",
            EpClass::None => "none",
        }
    }
}

/// One refined coalescence candidate. Both diagnostics are reported
/// raw so the caller can see which criterion fired.
#[derive(Debug, Clone)]
pub struct EpReport {
    pub parameter_value: f64,
    pub min_gap: f64,
    pub cond_v_at_point: f64,
    /// Four-site discriminant at the reported point, when available.
    pub delta_value: Option<Complex64>,
    pub classification: EpClass,
}

/// Gap below this fraction of the spectral scale counts as closed.
const GAP_CLOSED_FRACTION: f64 = 1e-6;
/// Candidates whose refined gap stays above this fraction are dropped.
const CANDIDATE_KEEP_FRACTION: f64 = 1e-3;
/// Dip walls must reach this fraction of the spectral scale.
const PROMINENCE_FLOOR_FRACTION: f64 = 1e-4;
/// Walls must exceed the dip bottom by this factor.
const PROMINENCE_RATIO: f64 = 5.0;

const MAX_REFINEMENT_DEPTH: usize = 8;

/// Eigenvalues along a parameter grid with branches matched across
/// consecutive points by minimal-cost assignment. Steps whose largest
/// branch movement exceeds half the local eigenvalue spacing are
/// bisected adaptively, up to eight levels; exhausted steps are
/// flagged rather than silently mismatched.
///
/// The grid must be monotone with at least two points; repeated values
/// yield zero-cost steps.
pub fn sweep(
    base: &SweepBase,
    axis: SweepAxis,
    grid: &[f64],
    threads: usize,
) -> Result<SweepTrace> {
    validate_grid(grid)?;
    let spectra = spectra_on_grid(base, axis, grid, threads)?;
    let n = base.n_sites;

    // points: refined sequence of (x, branch-ordered eigenvalues).
    let mut xs: Vec<f64> = vec![grid[0]];
    let mut branches: Vec<Vec<Complex64>> = vec![spectra[0].clone()];
    let mut costs: Vec<f64> = Vec::new();
    let mut flags: Vec<bool> = Vec::new();

    for g in 1..grid.len() {
        refine_step(
            base,
            axis,
            grid[g - 1],
            grid[g],
            &spectra[g],
            0,
            &mut xs,
            &mut branches,
            &mut costs,
            &mut flags,
        )?;
    }

    let g_total = xs.len();
    let mut trajectories = vec![vec![Complex64::ZERO; g_total]; n];
    for (g, vals) in branches.iter().enumerate() {
        for (b, v) in vals.iter().enumerate() {
            trajectories[b][g] = *v;
        }
    }
    Ok(SweepTrace { axis, grid: xs, trajectories, match_cost: costs, degeneracy_flags: flags })
}

#[allow(clippy::too_many_arguments)]
fn refine_step(
    base: &SweepBase,
    axis: SweepAxis,
    xl: f64,
    xr: f64,
    right_raw: &[Complex64],
    depth: usize,
    xs: &mut Vec<f64>,
    branches: &mut Vec<Vec<Complex64>>,
    costs: &mut Vec<f64>,
    flags: &mut Vec<bool>,
) -> Result<()> {
    let left = branches.last().expect("at least one point present").clone();
    let matched = match_to(&left, right_raw);
    let cost = step_cost(&left, &matched);
    let scale = spectral_scale(&left).max(spectral_scale(&matched));
    let spacing = local_spacing(&left, scale).min(local_spacing(&matched, scale));
    let acceptable = cost <= 0.5 * spacing || xl == xr;

    if acceptable || depth >= MAX_REFINEMENT_DEPTH {
        let degenerate = near_degenerate(&left, scale) || near_degenerate(&matched, scale);
        xs.push(xr);
        branches.push(matched);
        costs.push(cost);
        flags.push(degenerate || !acceptable);
        return Ok(());
    }
    let xm = 0.5 * (xl + xr);
    let mid_raw = eigenvalues_only(&base.matrix_at(axis, xm)?)?;
    refine_step(base, axis, xl, xm, &mid_raw, depth + 1, xs, branches, costs, flags)?;
    refine_step(base, axis, xm, xr, right_raw, depth + 1, xs, branches, costs, flags)
}

/// Reorder `target` so that entry i continues branch i of `reference`.
fn match_to(reference: &[Complex64], target: &[Complex64]) -> Vec<Complex64> {
    let n = reference.len();
    let mut cost = vec![0.0_f64; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (reference[i] - target[j]).norm();
        }
    }
    let assignment = hungarian(n, &cost);
    assignment.iter().map(|&j| target[j]).collect()
}

fn step_cost(left: &[Complex64], matched: &[Complex64]) -> f64 {
    left.iter()
        .zip(matched)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn spectral_scale(vals: &[Complex64]) -> f64 {
    vals.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Smallest gap among pairs that are actually split (beyond roundoff);
/// infinite when every pair is degenerate.
fn local_spacing(vals: &[Complex64], scale: f64) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            let gap = (vals[i] - vals[j]).norm();
            if gap > 1e-12 * scale && gap < min {
                min = gap;
            }
        }
    }
    min
}

fn near_degenerate(vals: &[Complex64], scale: f64) -> bool {
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if (vals[i] - vals[j]).norm() < 1e-8 * scale {
                return true;
            }
        }
    }
    false
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("grid contains non-finite values".into()));
    }
    let increasing = grid.windows(2).all(|w| w[0] <= w[1]);
    let decreasing = grid.windows(2).all(|w| w[0] >= w[1]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidInput("grid must be monotone".into()));
    }
    Ok(())
}

fn spectra_on_grid(
    base: &SweepBase,
    axis: SweepAxis,
    grid: &[f64],
    threads: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let work = |g: usize| -> Result<Vec<Complex64>> {
        eigenvalues_only(&base.matrix_at(axis, grid[g])?)
    };
    if threads <= 1 || grid.len() < 4 {
        return (0..grid.len()).map(work).collect();
    }
    let threads = threads.min(grid.len());
    let chunk = grid.len().div_ceil(threads);
    let mut out: Vec<Result<Vec<Complex64>>> = Vec::with_capacity(grid.len());
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for c in 0..threads {
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(grid.len());
            if lo >= hi {
                break;
            }
            let work = &work;
            handles.push(scope.spawn(move || (lo..hi).map(work).collect::<Vec<_>>()));
        }
        for h in handles {
            out.extend(h.join().expect("worker thread panicked"));
        }
    });
    out.into_iter().collect()
}

/// Scan a bracket for eigenvalue coalescence. Pairwise branch
/// distances are tracked along the grid; isolated dips with enough
/// prominence are bracketed and refined by golden-section search on
/// the tracked pair distance. Classification needs both a closed gap
/// and a collapsed eigenvector basis; near-misses keep their
/// diagnostics so the caller can see which criterion fired.
pub fn find_exceptional_points(
    base: &SweepBase,
    axis: SweepAxis,
    bracket: (f64, f64),
    steps: usize,
    threads: usize,
) -> Result<Vec<EpReport>> {
    let (a, b) = bracket;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidInput(format!("bad bracket [{a}, {b}]")));
    }
    let steps = steps.max(8);
    let grid: Vec<f64> = (0..steps)
        .map(|i| a + (b - a) * i as f64 / (steps - 1) as f64)
        .collect();
    let raw = spectra_on_grid(base, axis, &grid, threads)?;

    // Branch-consistent series via chained matching.
    let n = base.n_sites;
    let mut series: Vec<Vec<Complex64>> = Vec::with_capacity(steps);
    series.push(raw[0].clone());
    for g in 1..steps {
        let matched = match_to(&series[g - 1], &raw[g]);
        series.push(matched);
    }
    let scale = series
        .iter()
        .flat_map(|vals| vals.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);

    let mut candidates: Vec<(usize, usize, usize)> = Vec::new(); // (g, i, j)
    for i in 0..n {
        for j in i + 1..n {
            let d: Vec<f64> = series.iter().map(|v| (v[i] - v[j]).norm()).collect();
            for g in 1..steps - 1 {
                if d[g] > d[g - 1] || d[g] > d[g + 1] {
                    continue;
                }
                if !dip_is_prominent(&d, g, scale) {
                    continue;
                }
                candidates.push((g, i, j));
            }
        }
    }

    let mut reports: Vec<EpReport> = Vec::new();
    for (g, i, j) in candidates {
        let reference = series[g].clone();
        let lo = grid[g - 1];
        let hi = grid[g + 1];
        let x_star = golden_section_pair_gap(base, axis, lo, hi, &reference, i, j)?;
        let report = assess_point(base, axis, x_star)?;
        if report.min_gap > CANDIDATE_KEEP_FRACTION * scale {
            continue;
        }
        reports.push(report);
    }

    // Merge duplicates from different pair tracks.
    reports.sort_by(|p, q| p.parameter_value.partial_cmp(&q.parameter_value).unwrap());
    let merge_tol = (b - a) * 1e-6;
    let mut merged: Vec<EpReport> = Vec::new();
    for r in reports {
        match merged.last_mut() {
            Some(last) if (r.parameter_value - last.parameter_value).abs() <= merge_tol => {
                if r.min_gap < last.min_gap {
                    *last = r;
                }
            }
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

fn dip_is_prominent(d: &[f64], g: usize, scale: f64) -> bool {
    let bottom = d[g];
    let mut wall_left = 0.0_f64;
    for k in (0..g).rev() {
        wall_left = wall_left.max(d[k]);
        if k > 0 && d[k] <= bottom {
            break;
        }
    }
    let mut wall_right = 0.0_f64;
    for &val in d.iter().skip(g + 1) {
        wall_right = wall_right.max(val);
        if val <= bottom {
            break;
        }
    }
    let wall = wall_left.min(wall_right);
    wall >= PROMINENCE_FLOOR_FRACTION * scale && wall >= PROMINENCE_RATIO * bottom
}

/// Golden-section minimization of the tracked pair distance.
fn golden_section_pair_gap(
    base: &SweepBase,
    axis: SweepAxis,
    mut lo: f64,
    mut hi: f64,
    reference: &[Complex64],
    i: usize,
    j: usize,
) -> Result<f64> {
    let pair_gap = |x: f64| -> Result<f64> {
        let vals = eigenvalues_only(&base.matrix_at(axis, x)?)?;
        let matched = match_to(reference, &vals);
        Ok((matched[i] - matched[j]).norm())
    };
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = pair_gap(x1)?;
    let mut f2 = pair_gap(x2)?;
    for _ in 0..300 {
        if (hi - lo).abs() <= 1e-13 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = pair_gap(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = pair_gap(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn assess_point(base: &SweepBase, axis: SweepAxis, x: f64) -> Result<EpReport> {
    let m = base.matrix_at(axis, x)?;
    let es = eigensystem(&m)?;
    let vals = es.eigenvalues();
    let mut min_gap = f64::INFINITY;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            min_gap = min_gap.min((vals[i] - vals[j]).norm());
        }
    }
    // Gap closure is judged against the matrix norm, like the solver's
    // residuals: a k-fold defective cluster is only resolvable to about
    // eps^{1/k} of that norm.
    let gap_scale = m.frobenius_norm().max(1.0);
    let classification = if min_gap < GAP_CLOSED_FRACTION * gap_scale {
        if es.cond_v() >= DEFECTIVE_COND_THRESHOLD {
            EpClass::Exceptional
        } else {
            EpClass::DiabolicOrOrdinaryCrossing
        }
    } else {
        EpClass::None
    };
    Ok(EpReport {
        parameter_value: x,
        min_gap,
        cond_v_at_point: es.cond_v(),
        delta_value: base.delta_at(axis, x),
        classification,
    })
}

/// Whether a spectrum is real at the given scale, and its largest
/// imaginary part.
pub fn reality_check(eigenvalues: &[Complex64], scale: f64) -> (bool, f64) {
    let max_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (max_imag < 1e-9 * scale, max_imag)
}

/// Total signed argument swept about the origin by a branch, in
/// radians. Points at the origin contribute nothing.
pub fn winding_about_origin(trajectory: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for w in trajectory.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.norm() < 1e-300 || b.norm() < 1e-300 {
            continue;
        }
        let mut diff = b.arg() - a.arg();
        while diff > std::f64::consts::PI {
            diff -= 2.0 * std::f64::consts::PI;
        }
        while diff < -std::f64::consts::PI {
            diff += 2.0 * std::f64::consts::PI;
        }
        total += diff;
    }
    total
}
