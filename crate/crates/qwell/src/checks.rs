//! Self-check suite: fast, deterministic verifications of the solver's
//! internal consistency, runnable from the command line.
//!
//! Each check exercises one independent identity — flux conservation,
//! the closed-form chain formula, reduction to textbook wells, the
//! transmission-pole route, and the finite-difference cross-check — and
//! reports a pass/fail with a one-line numeric summary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{finite_difference_levels, GridConfig};
use crate::potential::{Element, Wall, WellSpec};
use crate::scattering::{
    compose, element_coefficients, identity, periodic_coefficients, rect_coefficients, shift,
};
use crate::spectrum::{
    find_bound_states, plane_bottom_infinite_levels, plane_bottom_levels, spectrum_residual,
    transmission_pole_residual, SolverConfig,
};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

// Pair composition squares |α|, so roundoff in the flux identity scales
// like ε·|α|⁴ — ~3e-11 at the strongest sampled barriers.
const FLUX_SAMPLES: usize = 2000;
const FLUX_TOL: f64 = 1e-10;
const CHEBYSHEV_TOL: f64 = 1e-10;
const POLE_TOL: f64 = 1e-8;
const ORACLE_REL_TOL: f64 = 1e-3;

fn random_element(rng: &mut ChaCha8Rng) -> Element {
    if rng.gen_bool(0.5) {
        Element::Delta {
            x: rng.gen_range(-5.0..5.0),
            g: rng.gen_range(-10.0..10.0),
        }
    } else {
        Element::Rect {
            a: rng.gen_range(-5.0..5.0),
            w: rng.gen_range(0.05..1.2),
            u: rng.gen_range(-8.0..8.0),
        }
    }
}

/// `|α|² − |β|² = 1` for random elements and random pairs.
fn flux_check() -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f1e2d3c);
    let mut worst: f64 = 0.0;
    for _ in 0..FLUX_SAMPLES {
        let k = rng.gen_range(0.2..12.0);
        let first = element_coefficients(&random_element(&mut rng), k);
        let second = element_coefficients(&random_element(&mut rng), k);
        let pair = compose(second, first).expect("same wavenumber");
        worst = worst
            .max((first.flux() - 1.0).abs())
            .max((pair.flux() - 1.0).abs());
    }
    CheckReport {
        name: "flux",
        passed: worst < FLUX_TOL,
        detail: format!(
            "max ||α|²−|β|²−1| = {worst:.3e} over {FLUX_SAMPLES} random samples"
        ),
    }
}

/// Closed-form chain scattering equals explicit matrix composition.
fn chebyshev_check() -> CheckReport {
    let cases = [
        (2.0, 1.0, 1.5, 0.9, 4usize),
        (5.0, 0.8, 1.3, 1.7, 8),
        (150.0, 1.0, 1.25, 2.0, 6), // deep in a band gap
    ];
    let mut worst: f64 = 0.0;
    for &(u, l, a, k, n) in &cases {
        let cell = rect_coefficients(u, l, k).expect("positive width and wavenumber");
        let first = shift(cell, 0.5 * l);
        let chain = periodic_coefficients(
            cell.inverse_transmission(),
            first.reflection_over_transmission(),
            a,
            n,
            k,
        )
        .expect("n >= 1");
        let mut acc = identity(k);
        for j in 0..n {
            let m = shift(cell, 0.5 * l + a * j as f64);
            acc = compose(m, acc).expect("same wavenumber");
        }
        let dt = (chain.inv_t - acc.inverse_transmission()).norm()
            / acc.inverse_transmission().norm().max(1.0);
        let dr = (chain.r_over_t - acc.reflection_over_transmission()).norm()
            / acc.reflection_over_transmission().norm().max(1.0);
        worst = worst.max(dt).max(dr);
    }
    CheckReport {
        name: "chebyshev",
        passed: worst < CHEBYSHEV_TOL,
        detail: format!("max relative deviation from explicit composition = {worst:.3e}"),
    }
}

/// Empty wells reduce to the textbook levels, within `tol`.
fn reduction_check(tol: f64) -> CheckReport {
    let mut worst: f64 = 0.0;
    let mut note = String::new();

    let finite = WellSpec::new(Wall::Finite(25.0), Wall::Finite(25.0), 1.0, vec![]);
    match find_bound_states(&finite, &SolverConfig::default()) {
        Ok(got) => {
            let want = plane_bottom_levels(25.0, 1.0);
            if got.energies.len() == want.len() {
                for (g, w) in got.energies.iter().zip(&want) {
                    worst = worst.max((g - w).abs());
                }
            } else {
                note = format!(
                    "finite well found {} levels, closed form has {}; ",
                    got.energies.len(),
                    want.len()
                );
            }
        }
        Err(err) => note = format!("finite well solve failed: {err}; "),
    }

    let hard = WellSpec::new(Wall::Infinite, Wall::Infinite, 1.0, vec![]);
    let cfg = SolverConfig {
        e_max: Some(100.0),
        ..SolverConfig::default()
    };
    match find_bound_states(&hard, &cfg) {
        Ok(got) => {
            let want = plane_bottom_infinite_levels(1.0, got.energies.len());
            for (g, w) in got.energies.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
        Err(err) => note.push_str(&format!("hard-wall solve failed: {err}; ")),
    }

    CheckReport {
        name: "reduction",
        passed: note.is_empty() && worst <= tol,
        detail: format!("{note}max |E − closed form| = {worst:.3e} (tolerance {tol:.1e})"),
    }
}

/// Roots of the transmission-pole condition coincide with the spectrum.
fn pole_check() -> CheckReport {
    let spec = WellSpec::new(
        Wall::Finite(30.0),
        Wall::Finite(45.0),
        1.4,
        vec![
            Element::Rect { a: 0.5, w: 0.3, u: 8.0 },
            Element::Delta { x: 1.1, g: -2.0 },
        ],
    );
    let generic = match find_bound_states(&spec, &SolverConfig::default()) {
        Ok(r) => r,
        Err(err) => {
            return CheckReport {
                name: "pole",
                passed: false,
                detail: format!("solver failed: {err}"),
            }
        }
    };

    let im = |e: f64| transmission_pole_residual(&spec, e).expect("in window").im;
    let n = 4000;
    let (lo, hi) = (1e-9 * 30.0, (1.0 - 1e-9) * 30.0);
    let h = (hi - lo) / (n - 1) as f64;
    let mut roots = Vec::new();
    let mut prev = im(lo);
    for i in 1..n {
        let e = lo + h * i as f64;
        let cur = im(e);
        if prev.signum() * cur.signum() < 0.0 {
            let (mut a, mut b, mut fa) = (e - h, e, prev);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = im(mid);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = cur;
    }

    if roots.len() != generic.energies.len() {
        return CheckReport {
            name: "pole",
            passed: false,
            detail: format!(
                "pole route found {} levels, matching residual found {}",
                roots.len(),
                generic.energies.len()
            ),
        };
    }
    let mut worst: f64 = 0.0;
    for (a, b) in roots.iter().zip(&generic.energies) {
        worst = worst.max((a - b).abs());
    }
    CheckReport {
        name: "pole",
        passed: worst < POLE_TOL,
        detail: format!(
            "{} levels agree, max |ΔE| = {worst:.3e}",
            roots.len()
        ),
    }
}

/// Finite differences confirm the solver on a spiked well.
fn oracle_check() -> CheckReport {
    let spec = WellSpec::new(
        Wall::Finite(25.0),
        Wall::Finite(25.0),
        1.0,
        vec![Element::Delta { x: 0.3, g: 3.0 }],
    );
    let tm = match find_bound_states(&spec, &SolverConfig::default()) {
        Ok(r) => r,
        Err(err) => {
            return CheckReport {
                name: "oracle",
                passed: false,
                detail: format!("solver failed: {err}"),
            }
        }
    };
    let fd = match finite_difference_levels(&spec, &GridConfig::default()) {
        Ok(l) => l,
        Err(err) => {
            return CheckReport {
                name: "oracle",
                passed: false,
                detail: format!("finite differences failed: {err}"),
            }
        }
    };
    if fd.len() != tm.energies.len() {
        return CheckReport {
            name: "oracle",
            passed: false,
            detail: format!("level counts differ: fd {} vs solver {}", fd.len(), tm.energies.len()),
        };
    }
    let mut worst: f64 = 0.0;
    for (a, b) in fd.iter().zip(&tm.energies) {
        worst = worst.max((a - b).abs() / b);
    }
    // Also make sure the solver's own residual vanishes at its levels.
    let mut worst_res: f64 = 0.0;
    for e in &tm.energies {
        worst_res = worst_res.max(spectrum_residual(&spec, *e).expect("in window").abs());
    }
    CheckReport {
        name: "oracle",
        passed: worst < ORACLE_REL_TOL && worst_res < 1e-8,
        detail: format!(
            "{} levels, max relative gap to finite differences = {worst:.3e}",
            fd.len()
        ),
    }
}

/// Run the named checks (all of them when `filter` is `None`, otherwise
/// those whose name contains the filter substring). `reduction_tol` is the
/// acceptance threshold of the closed-form reduction check.
pub fn run_checks(filter: Option<&str>, reduction_tol: f64) -> Vec<CheckReport> {
    let wanted = |name: &str| filter.is_none_or(|f| name.contains(f));
    let mut reports = Vec::new();
    if wanted("flux") {
        reports.push(flux_check());
    }
    if wanted("chebyshev") {
        reports.push(chebyshev_check());
    }
    if wanted("reduction") {
        reports.push(reduction_check(reduction_tol));
    }
    if wanted("pole") {
        reports.push(pole_check());
    }
    if wanted("oracle") {
        reports.push(oracle_check());
    }
    reports
}
