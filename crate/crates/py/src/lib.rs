//! Python bindings: chain builders, the dense eigensolver, closed-form
//! spectra, sweeps, exceptional-point search and skin-effect profiles.
//!
//! Matrices cross the boundary as nested lists of Python complex
//! numbers; spectra as flat lists. Errors surface as ValueError.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nh_lattice::analysis::{MatrixKind, SweepAxis, SweepBase};
use nh_lattice::analytic::{ModeBasis, ModeSide};
use nh_lattice::{BoundaryFamily, ComplexMatrix, Error as CoreError, ModelParams};

fn err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn from_matrix(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let n = m.dim();
    (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
}

fn family(rho: f64, phi: f64, q: Complex64, t: Complex64) -> PyResult<BoundaryFamily> {
    BoundaryFamily::new(rho, phi, q, t).map_err(err)
}

/// Chain matrix from direct parameters.
#[pyfunction]
fn hamiltonian(
    n: usize,
    t_left: Complex64,
    t_right: Complex64,
    alpha_left: Complex64,
    alpha_right: Complex64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let p = ModelParams::new(n, t_left, t_right, alpha_left, alpha_right).map_err(err)?;
    Ok(from_matrix(&nh_lattice::build_hamiltonian(&p)))
}

/// Gauge-transformed chain matrix from direct parameters.
#[pyfunction]
fn transformed(
    n: usize,
    t_left: Complex64,
    t_right: Complex64,
    alpha_left: Complex64,
    alpha_right: Complex64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let p = ModelParams::new(n, t_left, t_right, alpha_left, alpha_right).map_err(err)?;
    Ok(from_matrix(&nh_lattice::build_transformed(&p).map_err(err)?))
}

/// Chain matrix for the boundary family (rho, phi, q, t); set
/// tilde=True for the gauge-transformed partner.
#[pyfunction]
#[pyo3(signature = (n, t, q, rho, phi, tilde = false))]
fn family_matrix(
    n: usize,
    t: Complex64,
    q: Complex64,
    rho: f64,
    phi: f64,
    tilde: bool,
) -> PyResult<Vec<Vec<Complex64>>> {
    let fam = family(rho, phi, q, t)?;
    let m = if tilde {
        fam.transformed(n).map_err(err)?
    } else {
        fam.hamiltonian(n).map_err(err)?
    };
    Ok(from_matrix(&m))
}

/// Diagonal gauge scaling e^{q n / 2}, n = 1..N.
#[pyfunction]
fn gauge_scaling(n: usize, q: Complex64) -> PyResult<Vec<Complex64>> {
    nh_lattice::gauge_scaling(n, q).map_err(err)
}

/// Conjugated anti-transpose (parity times time reversal) of a matrix.
#[pyfunction]
fn pt_conjugate(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    let m = to_matrix(matrix)?;
    Ok(from_matrix(&nh_lattice::pt_conjugate(&m)))
}

/// Eigenvalues of a dense complex matrix, sorted by (Re, Im).
#[pyfunction]
fn eigenvalues(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let m = to_matrix(matrix)?;
    nh_lattice::eig::eigenvalues_only(&m).map_err(err)
}

/// Full eigensystem: eigenvalues, unit-norm right (columns) and left
/// (rows) eigenvectors, residuals and the eigenvector condition number.
#[pyfunction]
fn eigensystem(py: Python<'_>, matrix: Vec<Vec<Complex64>>) -> PyResult<Py<PyDict>> {
    let m = to_matrix(matrix)?;
    let es = nh_lattice::eig::eigensystem(&m).map_err(err)?;
    let n = es.dim();
    let right: Vec<Vec<Complex64>> = (0..n).map(|k| es.right_vector(k)).collect();
    let left: Vec<Vec<Complex64>> = (0..n).map(|k| es.left_vector(k)).collect();
    let out = PyDict::new(py);
    out.set_item("eigenvalues", es.eigenvalues().to_vec())?;
    out.set_item("right_vectors", right)?;
    out.set_item("left_vectors", left)?;
    out.set_item("residuals", es.residuals().to_vec())?;
    out.set_item("left_residuals", es.left_residuals().to_vec())?;
    out.set_item("max_residual", es.max_residual())?;
    out.set_item("cond_v", es.cond_v())?;
    out.set_item("defective", es.is_defective())?;
    Ok(out.into())
}

/// Bottleneck distance between two eigenvalue multisets.
#[pyfunction]
fn multiset_distance(a: Vec<Complex64>, b: Vec<Complex64>) -> PyResult<f64> {
    nh_lattice::eig::multiset_distance(&a, &b).map_err(err)
}

/// Quantized momenta of the boundary family.
#[pyfunction]
fn momenta(n: usize, t: Complex64, q: Complex64, rho: f64, phi: f64) -> PyResult<Vec<Complex64>> {
    let fam = family(rho, phi, q, t)?;
    Ok(nh_lattice::analytic::momenta(&fam, n).map_err(err)?.momenta().to_vec())
}

/// Closed-form spectrum 2 t cos(k_m) of the boundary family.
#[pyfunction]
fn spectrum_closed_form(
    n: usize,
    t: Complex64,
    q: Complex64,
    rho: f64,
    phi: f64,
) -> PyResult<Vec<Complex64>> {
    let fam = family(rho, phi, q, t)?;
    nh_lattice::analytic::spectrum_closed_form(&fam, n).map_err(err)
}

/// Closed-form eigenmode with momentum k; side is "right" or "left",
/// basis "bare" or "tilde".
#[pyfunction]
#[pyo3(signature = (k, q, n, side = "right", basis = "bare"))]
fn eigenmode_closed_form(
    k: Complex64,
    q: Complex64,
    n: usize,
    side: &str,
    basis: &str,
) -> PyResult<Vec<Complex64>> {
    let side = match side {
        "right" => ModeSide::Right,
        "left" => ModeSide::Left,
        other => return Err(PyValueError::new_err(format!("side must be right or left, got {other}"))),
    };
    let basis = match basis {
        "bare" => ModeBasis::Bare,
        "tilde" => ModeBasis::Tilde,
        other => return Err(PyValueError::new_err(format!("basis must be bare or tilde, got {other}"))),
    };
    Ok(nh_lattice::analytic::eigenmode_closed_form(k, q, n, side, basis))
}

/// Open-chain spectrum {2 t cos(pi m / (N + 1))}.
#[pyfunction]
fn spectrum_obc(n: usize, t: Complex64) -> Vec<Complex64> {
    nh_lattice::analytic::spectrum_obc(n, t)
}

/// Exact four-site spectrum; returns (energies, delta, alpha_sq).
#[pyfunction]
fn spectrum_n4(
    t: Complex64,
    q: Complex64,
    alpha_left: Complex64,
    alpha_right: Complex64,
) -> (Vec<Complex64>, Complex64, Complex64) {
    let s = nh_lattice::analytic::spectrum_n4(t, q, alpha_left, alpha_right);
    (s.energies().to_vec(), s.delta(), s.alpha_sq())
}

fn parse_axis(axis: &str) -> PyResult<SweepAxis> {
    match axis {
        "rho" => Ok(SweepAxis::Rho),
        "phi" => Ok(SweepAxis::Phi),
        "r" => Ok(SweepAxis::BoundaryR),
        other => Err(PyValueError::new_err(format!("axis must be rho, phi or r, got {other}"))),
    }
}

fn sweep_base(n: usize, t: Complex64, q: Complex64, rho: f64, phi: f64, tilde: bool) -> SweepBase {
    SweepBase {
        n_sites: n,
        t,
        q,
        rho,
        phi,
        kind: if tilde { MatrixKind::Transformed } else { MatrixKind::Bare },
    }
}

/// Eigenvalue trajectories along a parameter grid, with branches
/// matched across points. Returns {"grid", "trajectories",
/// "match_cost", "degeneracy_flags"}.
#[pyfunction]
#[pyo3(signature = (n, t, q, axis, grid, rho = 0.0, phi = 0.0, tilde = false, threads = 1))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    n: usize,
    t: Complex64,
    q: Complex64,
    axis: &str,
    grid: Vec<f64>,
    rho: f64,
    phi: f64,
    tilde: bool,
    threads: usize,
) -> PyResult<Py<PyDict>> {
    let base = sweep_base(n, t, q, rho, phi, tilde);
    let trace = nh_lattice::analysis::sweep(&base, parse_axis(axis)?, &grid, threads).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("grid", trace.grid().to_vec())?;
    out.set_item("trajectories", trace.trajectories().to_vec())?;
    out.set_item("match_cost", trace.match_cost().to_vec())?;
    out.set_item("degeneracy_flags", trace.degeneracy_flags().to_vec())?;
    Ok(out.into())
}

/// Scan a bracket for eigenvalue coalescence; returns one dict per
/// refined candidate.
#[pyfunction]
#[pyo3(signature = (n, t, q, axis, lo, hi, steps = 500, rho = 0.0, phi = 0.0, tilde = false, threads = 1))]
#[allow(clippy::too_many_arguments)]
fn find_exceptional_points(
    py: Python<'_>,
    n: usize,
    t: Complex64,
    q: Complex64,
    axis: &str,
    lo: f64,
    hi: f64,
    steps: usize,
    rho: f64,
    phi: f64,
    tilde: bool,
    threads: usize,
) -> PyResult<Vec<Py<PyDict>>> {
    let base = sweep_base(n, t, q, rho, phi, tilde);
    let reports =
        nh_lattice::analysis::find_exceptional_points(&base, parse_axis(axis)?, (lo, hi), steps, threads)
            .map_err(err)?;
    reports
        .into_iter()
        .map(|r| {
            let out = PyDict::new(py);
            out.set_item("parameter", r.parameter_value)?;
            out.set_item("min_gap", r.min_gap)?;
            out.set_item("cond_v", r.cond_v_at_point)?;
            out.set_item("classification", r.classification.as_str())?;
            out.set_item("delta", r.delta_value)?;
            Ok(out.into())
        })
        .collect()
}

/// Averaged probability density of the right or left eigenmodes with
/// decay fit, localization side and mean inverse participation ratio.
#[pyfunction]
#[pyo3(signature = (n, t, q, rho, phi, side = "right", tilde = false))]
#[allow(clippy::too_many_arguments)]
fn skin_profile(
    py: Python<'_>,
    n: usize,
    t: Complex64,
    q: Complex64,
    rho: f64,
    phi: f64,
    side: &str,
    tilde: bool,
) -> PyResult<Py<PyDict>> {
    let which = match side {
        "right" => ModeSide::Right,
        "left" => ModeSide::Left,
        other => return Err(PyValueError::new_err(format!("side must be right or left, got {other}"))),
    };
    let fam = family(rho, phi, q, t)?;
    let m = if tilde {
        fam.transformed(n).map_err(err)?
    } else {
        fam.hamiltonian(n).map_err(err)?
    };
    let es = nh_lattice::eig::eigensystem(&m).map_err(err)?;
    let profile = nh_lattice::skin::density_profile(&es, which).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("densities", profile.densities().to_vec())?;
    out.set_item("side", profile.side().as_str())?;
    out.set_item("decay_rate", profile.decay_rate())?;
    out.set_item("fit_r2", profile.fit_r2())?;
    out.set_item("ipr_mean", profile.ipr_mean())?;
    out.set_item("trusted", profile.trusted())?;
    Ok(out.into())
}

/// Inverse participation ratio of a unit-norm mode.
#[pyfunction]
fn ipr(mode: Vec<Complex64>) -> f64 {
    nh_lattice::skin::ipr(&mode)
}

/// Run the invariant suite; returns a list of (name, passed, detail).
#[pyfunction]
#[pyo3(signature = (quick = true))]
fn verify(quick: bool) -> Vec<(String, bool, String)> {
    nh_lattice::verify::run_all(quick)
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
fn nh_lattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(transformed, m)?)?;
    m.add_function(wrap_pyfunction!(family_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_scaling, m)?)?;
    m.add_function(wrap_pyfunction!(pt_conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(eigensystem, m)?)?;
    m.add_function(wrap_pyfunction!(multiset_distance, m)?)?;
    m.add_function(wrap_pyfunction!(momenta, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(eigenmode_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_obc, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_n4, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(find_exceptional_points, m)?)?;
    m.add_function(wrap_pyfunction!(skin_profile, m)?)?;
    m.add_function(wrap_pyfunction!(ipr, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
