//! One-shot invariant suite behind the `verify` command. Each check
//! prints a single pass or fail line; the quick variant trims draw
//! counts and grids.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::analysis::{find_exceptional_points, MatrixKind, SweepAxis, SweepBase};
use crate::analytic::{
    eigenmode_closed_form, momenta, spectrum_closed_form, spectrum_n4, spectrum_obc, ModeBasis,
    ModeSide,
};
use crate::eig::{eigensystem, eigenvalues_only, multiset_distance};
use crate::matrix::{bilinear_dot, vec_norm};
use crate::model::{build_hamiltonian, build_transformed, gauge_scaling, pt_conjugate,
    BoundaryFamily, ModelParams};
use crate::skin::density_profile;

/// Outcome of one verification property.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }
}

/// Small deterministic generator so the suite needs no external
/// randomness crate.
struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Self {
        Lcg(seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493))
    }

    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    fn usize_range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_f64() * ((hi - lo + 1) as f64)) as usize % (hi - lo + 1)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Run every property and return the per-check outcomes.
pub fn run_all(quick: bool) -> Vec<Check> {
    vec![
        pt_identity(quick),
        gauge_similarity(quick),
        isospectrality(quick),
        closed_form_oracle(quick),
        reality_at_rho_one(),
        rho_reflection_symmetry(),
        obc_limit(),
        n4_closed_form(quick),
        ep_location(),
        skin_rates(),
        mode_residuals_and_biorthogonality(),
        balancing_invariance(quick),
        determinism(),
    ]
}

fn pt_identity(quick: bool) -> Check {
    let mut rng = Lcg::new(1);
    let draws = if quick { 20 } else { 200 };
    for _ in 0..draws {
        let n = rng.usize_range(2, 12);
        let sign = |r: &mut Lcg| if r.next_f64() < 0.5 { -1.0 } else { 1.0 };
        let p = match ModelParams::new(
            n,
            c(sign(&mut rng) * rng.range(0.2, 3.0), 0.0),
            c(sign(&mut rng) * rng.range(0.2, 3.0), 0.0),
            c(rng.range(-2.0, 2.0), 0.0),
            c(rng.range(-2.0, 2.0), 0.0),
        ) {
            Ok(p) => p,
            Err(e) => return Check::new("pt-identity", false, e.to_string()),
        };
        let h = build_hamiltonian(&p);
        if pt_conjugate(&h) != h {
            return Check::new(
                "pt-identity",
                false,
                format!("image differs for real draw with N = {n}"),
            );
        }
    }
    Check::new("pt-identity", true, format!("{draws} real draws, exact"))
}

fn gauge_similarity(quick: bool) -> Check {
    let mut rng = Lcg::new(2);
    let draws = if quick { 15 } else { 100 };
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let n = rng.usize_range(2, 12);
        let q = c(rng.range(-3.0, 3.0), rng.range(-3.0, 3.0));
        let t = c(rng.range(0.3, 2.0), rng.range(-1.0, 1.0));
        let family = match BoundaryFamily::new(rng.range(0.0, 2.0), rng.range(0.0, 6.2), q, t) {
            Ok(f) => f,
            Err(e) => return Check::new("gauge-similarity", false, e.to_string()),
        };
        let outcome = (|| -> crate::Result<f64> {
            let h = family.hamiltonian(n)?;
            let ht = family.transformed(n)?;
            let s = gauge_scaling(n, q)?;
            let conj = h.diag_conjugate(&s)?;
            Ok(conj.max_abs_diff(&ht) / ht.max_abs_entry().max(1e-300))
        })();
        match outcome {
            Ok(rel) => worst = worst.max(rel),
            Err(e) => return Check::new("gauge-similarity", false, e.to_string()),
        }
    }
    Check::new(
        "gauge-similarity",
        worst < 1e-12,
        format!("worst relative residual {worst:.3e} over {draws} draws"),
    )
}

fn isospectrality(quick: bool) -> Check {
    let mut rng = Lcg::new(3);
    let draws = if quick { 15 } else { 100 };
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let n = rng.usize_range(2, 24);
        let polar = |r: &mut Lcg, lo: f64, hi: f64| {
            Complex64::from_polar(r.range(lo, hi), r.range(-PI, PI))
        };
        let p = match ModelParams::new(
            n,
            polar(&mut rng, 0.3, 3.0),
            polar(&mut rng, 0.3, 3.0),
            polar(&mut rng, 0.2, 5.0),
            polar(&mut rng, 0.2, 5.0),
        ) {
            Ok(p) => p,
            Err(e) => return Check::new("isospectrality", false, e.to_string()),
        };
        let outcome = (|| -> crate::Result<f64> {
            let h = build_hamiltonian(&p);
            let ht = build_transformed(&p)?;
            let a = eigenvalues_only(&h)?;
            let b = eigenvalues_only(&ht)?;
            let scale = ht.frobenius_norm().max(1.0);
            Ok(multiset_distance(&a, &b)? / scale)
        })();
        match outcome {
            Ok(rel) => worst = worst.max(rel),
            Err(e) => return Check::new("isospectrality", false, e.to_string()),
        }
    }
    Check::new(
        "isospectrality",
        worst < 1e-8,
        format!("worst scaled multiset distance {worst:.3e} over {draws} draws"),
    )
}

fn closed_form_oracle(quick: bool) -> Check {
    let rhos: Vec<f64> = if quick {
        vec![0.0, 0.5, 1.0, 1.5, 2.0]
    } else {
        (0..9).map(|i| 0.25 * i as f64).collect()
    };
    let mut worst = 0.0_f64;
    let mut cases = 0usize;
    for &n in &[4usize, 10] {
        for &q in &[c(4.0, 0.0), c(4.0, PI)] {
            for &phi in &[0.0, PI / 2.0, PI] {
                for &rho in &rhos {
                    let family = match BoundaryFamily::new(rho, phi, q, c(1.0, 0.0)) {
                        Ok(f) => f,
                        Err(e) => return Check::new("closed-form-oracle", false, e.to_string()),
                    };
                    let outcome = (|| -> crate::Result<f64> {
                        let analytic = spectrum_closed_form(&family, n)?;
                        let numeric = eigenvalues_only(&family.hamiltonian(n)?)?;
                        let scale =
                            analytic.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
                        Ok(multiset_distance(&analytic, &numeric)? / scale)
                    })();
                    match outcome {
                        Ok(rel) => worst = worst.max(rel),
                        Err(e) => return Check::new("closed-form-oracle", false, e.to_string()),
                    }
                    cases += 1;
                }
            }
        }
    }
    Check::new(
        "closed-form-oracle",
        worst < 1e-8,
        format!("worst scaled multiset distance {worst:.3e} over {cases} grid points"),
    )
}

fn reality_at_rho_one() -> Check {
    let mut worst = 0.0_f64;
    for &n in &[4usize, 10] {
        for &phi in &[0.0, PI / 2.0, PI] {
            let family = match BoundaryFamily::new(1.0, phi, c(4.0, 0.0), c(1.0, 0.0)) {
                Ok(f) => f,
                Err(e) => return Check::new("reality-at-rho-one", false, e.to_string()),
            };
            let outcome = (|| -> crate::Result<f64> {
                let vals = eigenvalues_only(&family.hamiltonian(n)?)?;
                Ok(vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
            })();
            match outcome {
                Ok(max_imag) => worst = worst.max(max_imag),
                Err(e) => return Check::new("reality-at-rho-one", false, e.to_string()),
            }
        }
    }
    Check::new(
        "reality-at-rho-one",
        worst < 1e-10,
        format!("largest |Im E| = {worst:.3e}"),
    )
}

fn rho_reflection_symmetry() -> Check {
    let q = c(4.0, 0.0);
    let mut worst = 0.0_f64;
    for &rho in &[0.0, 0.25, 0.5, 0.75] {
        let outcome = (|| -> crate::Result<f64> {
            let a = spectrum_closed_form(&BoundaryFamily::new(rho, 0.0, q, c(1.0, 0.0))?, 10)?;
            let b =
                spectrum_closed_form(&BoundaryFamily::new(2.0 - rho, 0.0, q, c(1.0, 0.0))?, 10)?;
            multiset_distance(&a, &b)
        })();
        match outcome {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Check::new("rho-reflection-symmetry", false, e.to_string()),
        }
    }
    // Negative control: the reflection fails for phi = pi/2.
    let control = (|| -> crate::Result<f64> {
        let a = spectrum_closed_form(&BoundaryFamily::new(0.5, PI / 2.0, q, c(1.0, 0.0))?, 10)?;
        let b = spectrum_closed_form(&BoundaryFamily::new(1.5, PI / 2.0, q, c(1.0, 0.0))?, 10)?;
        multiset_distance(&a, &b)
    })();
    let control = match control {
        Ok(d) => d,
        Err(e) => return Check::new("rho-reflection-symmetry", false, e.to_string()),
    };
    let passed = worst < 1e-8 && control > 1e-3;
    Check::new(
        "rho-reflection-symmetry",
        passed,
        format!("phi = 0 distance {worst:.3e}; phi = pi/2 control {control:.3e}"),
    )
}

fn obc_limit() -> Check {
    let mut worst = 0.0_f64;
    for &(n, q) in &[(2usize, 4.0), (4, 4.0), (10, 4.0), (64, 0.5)] {
        let outcome = (|| -> crate::Result<f64> {
            let p = ModelParams::new(
                n,
                c((-q / 2.0_f64).exp(), 0.0),
                c((q / 2.0_f64).exp(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            )?;
            let numeric = eigenvalues_only(&build_hamiltonian(&p))?;
            multiset_distance(&numeric, &spectrum_obc(n, c(1.0, 0.0)))
        })();
        match outcome {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Check::new("obc-limit", false, e.to_string()),
        }
    }
    Check::new("obc-limit", worst < 1e-10, format!("worst distance {worst:.3e}"))
}

fn n4_closed_form(quick: bool) -> Check {
    let mut rng = Lcg::new(4);
    let draws = if quick { 100 } else { 1000 };
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let t = Complex64::from_polar(rng.range(0.3, 2.0), rng.range(-PI, PI));
        let q = c(rng.range(-2.5, 2.5), rng.range(-3.0, 3.0));
        let al = Complex64::from_polar(rng.range(0.0, 3.0), rng.range(-PI, PI));
        let ar = Complex64::from_polar(rng.range(0.0, 3.0), rng.range(-PI, PI));
        let outcome = (|| -> crate::Result<f64> {
            let s = spectrum_n4(t, q, al, ar);
            let p = ModelParams::new(4, t * (-q / 2.0).exp(), t * (q / 2.0).exp(), al, ar)?;
            let h = build_hamiltonian(&p);
            let numeric = eigenvalues_only(&h)?;
            let scale = h.frobenius_norm().max(1.0);
            Ok(multiset_distance(s.energies(), &numeric)? / scale)
        })();
        match outcome {
            Ok(rel) => worst = worst.max(rel),
            Err(e) => return Check::new("n4-closed-form", false, e.to_string()),
        }
    }
    Check::new(
        "n4-closed-form",
        worst < 1e-9,
        format!("worst scaled multiset distance {worst:.3e} over {draws} draws"),
    )
}

fn ep_location() -> Check {
    let base = SweepBase {
        n_sites: 4,
        t: c(1.0, 0.0),
        q: c(4.0, 0.0),
        rho: 0.0,
        phi: 0.0,
        kind: MatrixKind::Bare,
    };
    match find_exceptional_points(&base, SweepAxis::BoundaryR, (-5.0, 0.0), 500, 1) {
        Ok(reports) => {
            if reports.len() != 1 {
                return Check::new(
                    "ep-location",
                    false,
                    format!("expected one report, got {}", reports.len()),
                );
            }
            let err = (reports[0].parameter_value + 3.0).abs();
            let delta = reports[0].delta_value.map(|d| d.norm()).unwrap_or(f64::NAN);
            Check::new(
                "ep-location",
                err < 1e-6 && delta < 1e-8,
                format!("|r + 3| = {err:.3e}, |delta| = {delta:.3e}"),
            )
        }
        Err(e) => Check::new("ep-location", false, e.to_string()),
    }
}

fn skin_rates() -> Check {
    let q = 4.0;
    let mut detail = String::new();
    let mut passed = true;
    for &rho in &[0.25, 0.5, 1.0, 1.5, 2.0] {
        let outcome = (|| -> crate::Result<(f64, f64)> {
            // phi = 0 makes the rho = 1 spectrum doubly degenerate and
            // the averaged density basis-dependent; a generic phase
            // splits the levels without touching the rate.
            let phi = if (rho - 1.0f64).abs() < 1e-12 { PI / 2.0 } else { 0.0 };
            let family = BoundaryFamily::new(rho, phi, c(q, 0.0), c(1.0, 0.0))?;
            let es = eigensystem(&family.hamiltonian(10)?)?;
            let bare = density_profile(&es, ModeSide::Right)?.decay_rate();
            let tilde_rate = if (rho - 1.0).abs() > 1e-12 {
                let est = eigensystem(&family.transformed(10)?)?;
                density_profile(&est, ModeSide::Right)?.decay_rate()
            } else {
                f64::NAN
            };
            Ok((bare, tilde_rate))
        })();
        match outcome {
            Ok((bare, tilde_rate)) => {
                let expect_bare = rho * q;
                if (bare - expect_bare).abs() > 0.02 * expect_bare.abs() {
                    passed = false;
                }
                if (rho - 1.0f64).abs() > 1e-12 {
                    let expect_tilde = -(1.0 - rho) * q;
                    if (tilde_rate - expect_tilde).abs() > 0.02 * expect_tilde.abs() {
                        passed = false;
                    }
                }
                detail.push_str(&format!("rho {rho}: bare {bare:.3}; "));
            }
            Err(e) => return Check::new("skin-rates", false, e.to_string()),
        }
    }
    // Extended endpoints.
    let extended = (|| -> crate::Result<(f64, f64)> {
        let f0 = BoundaryFamily::new(0.0, 0.0, c(q, 0.0), c(1.0, 0.0))?;
        let bare = density_profile(&eigensystem(&f0.hamiltonian(10)?)?, ModeSide::Right)?;
        let f1 = BoundaryFamily::new(1.0, 0.0, c(q, 0.0), c(1.0, 0.0))?;
        let tilde = density_profile(&eigensystem(&f1.transformed(10)?)?, ModeSide::Right)?;
        Ok((bare.ipr_mean(), tilde.ipr_mean()))
    })();
    match extended {
        Ok((a, b)) => {
            if a >= 0.2 || b >= 0.2 {
                passed = false;
            }
            detail.push_str(&format!("extended ipr {a:.3}/{b:.3}"));
        }
        Err(e) => return Check::new("skin-rates", false, e.to_string()),
    }
    Check::new("skin-rates", passed, detail)
}

fn mode_residuals_and_biorthogonality() -> Check {
    let outcome = (|| -> crate::Result<(f64, f64)> {
        let family = BoundaryFamily::new(0.5, 0.0, c(4.0, 0.0), c(1.0, 0.0))?;
        let n = 10;
        let h = family.hamiltonian(n)?;
        let ks = momenta(&family, n)?;
        let mut worst_res = 0.0_f64;
        let mut worst_ortho = 0.0_f64;
        for (j, kj) in ks.momenta().iter().enumerate() {
            let e = 2.0 * family.t() * kj.cos();
            let v = eigenmode_closed_form(*kj, family.q(), n, ModeSide::Right, ModeBasis::Bare);
            let mut hv = h.matvec(&v);
            for (x, vi) in hv.iter_mut().zip(&v) {
                *x -= e * vi;
            }
            worst_res = worst_res.max(vec_norm(&hv) / vec_norm(&v));

            let u = eigenmode_closed_form(*kj, family.q(), n, ModeSide::Left, ModeBasis::Bare);
            let mut uh = h.vecmat(&u);
            for (x, ui) in uh.iter_mut().zip(&u) {
                *x -= e * ui;
            }
            worst_res = worst_res.max(vec_norm(&uh) / vec_norm(&u));

            for (m, km) in ks.momenta().iter().enumerate() {
                let w = eigenmode_closed_form(*km, family.q(), n, ModeSide::Right, ModeBasis::Bare);
                let dot = bilinear_dot(&u, &w);
                let target = if j == m { c(n as f64, 0.0) } else { Complex64::ZERO };
                worst_ortho = worst_ortho.max((dot - target).norm() / n as f64);
            }
        }
        Ok((worst_res, worst_ortho))
    })();
    match outcome {
        Ok((res, ortho)) => Check::new(
            "mode-residuals",
            res < 1e-10 && ortho < 1e-9,
            format!("worst residual {res:.3e}, worst biorthogonality error {ortho:.3e}"),
        ),
        Err(e) => Check::new("mode-residuals", false, e.to_string()),
    }
}

fn balancing_invariance(quick: bool) -> Check {
    let mut rng = Lcg::new(5);
    let draws = if quick { 5 } else { 25 };
    let mut worst = 0.0_f64;
    let mut used = 0usize;
    for _ in 0..draws {
        let n = rng.usize_range(2, 10);
        let mut m = crate::matrix::ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            }
        }
        let outcome = (|| -> crate::Result<Option<f64>> {
            let with = crate::eig::eigensystem_opts(&m, true)?;
            if with.cond_v() >= 1e6 {
                return Ok(None);
            }
            let without = crate::eig::eigensystem_opts(&m, false)?;
            Ok(Some(multiset_distance(with.eigenvalues(), without.eigenvalues())?))
        })();
        match outcome {
            Ok(Some(d)) => {
                worst = worst.max(d);
                used += 1;
            }
            Ok(None) => {}
            Err(e) => return Check::new("balancing-invariance", false, e.to_string()),
        }
    }
    Check::new(
        "balancing-invariance",
        worst < 1e-8 && used > 0,
        format!("worst distance {worst:.3e} over {used} well-conditioned draws"),
    )
}

fn determinism() -> Check {
    let family = match BoundaryFamily::new(0.5, PI / 2.0, c(4.0, PI), c(1.0, 0.0)) {
        Ok(f) => f,
        Err(e) => return Check::new("determinism", false, e.to_string()),
    };
    let outcome = (|| -> crate::Result<bool> {
        let h = family.hamiltonian(10)?;
        let a = eigensystem(&h)?;
        let b = eigensystem(&h)?;
        let mut same = true;
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            same &= x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits();
        }
        for k in 0..a.dim() {
            for (x, y) in a.right_vector(k).iter().zip(b.right_vector(k)) {
                same &= x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits();
            }
        }
        Ok(same)
    })();
    match outcome {
        Ok(same) => Check::new(
            "determinism",
            same,
            "repeated decompositions bit-identical".into(),
        ),
        Err(e) => Check::new("determinism", false, e.to_string()),
    }
}

/// Convenience: run the suite, write one line per check, return overall
/// success.
pub fn run_and_report(quick: bool, out: &mut dyn std::io::Write) -> std::io::Result<bool> {
    let checks = run_all(quick);
    let mut all = true;
    for check in &checks {
        all &= check.passed;
        writeln!(
            out,
            "{} {} ({})",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        )?;
    }
    writeln!(out, "{}/{} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len())?;
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::reality_check;
    use crate::skin::Side;

    #[test]
    fn quick_suite_is_green() {
        let checks = run_all(true);
        for check in &checks {
            assert!(check.passed, "{} failed: {}", check.name, check.detail);
        }
    }

    #[test]
    fn side_labels_agree_with_extended_threshold() {
        let family = BoundaryFamily::new(0.0, 0.0, c(4.0, 0.0), c(1.0, 0.0)).unwrap();
        let es = eigensystem(&family.hamiltonian(10).unwrap()).unwrap();
        let profile = density_profile(&es, ModeSide::Right).unwrap();
        assert_eq!(profile.side(), Side::Extended);
        let (is_real, _) = reality_check(es.eigenvalues(), 2.0);
        assert!(!is_real);
    }
}
