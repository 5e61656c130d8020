//! Bound-state residuals and the root-finding solver.
//!
//! Matching decaying tails (or hard-wall nodes) against the interior
//! coefficients `(α, β)` turns the spectrum into the real roots of a
//! residual `f(E)`. The residual used here is the boundary determinant
//! with its poles cancelled, so it is smooth across the whole window and
//! every sign change is a genuine level.

use num_complex::Complex64;

use crate::error::Error;
use crate::exec;
use crate::potential::{validate, Wall, WellSpec};
use crate::scattering::fold_elements;

/// Sign changes in adjacent scan cells are re-scanned this much finer to
/// separate near-degenerate pairs before bisection.
const REFINE_FACTOR: usize = 16;
/// Fewer grid points than this cannot resolve even a single-level well
/// reliably.
const MIN_GRID_POINTS: usize = 16;

/// Tunable knobs of [`find_bound_states`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of points in the initial residual scan.
    pub grid_points: usize,
    /// Guaranteed bracket width: exhausting `max_iter` is only an error
    /// while the bracket is still wider than this.
    pub tol_e: f64,
    /// A root is accepted only if the residual magnitude gets below this.
    pub tol_res: f64,
    /// Relative inset keeping the scan off the singular window edges.
    pub edge_offset: f64,
    /// Upper end of the search window. Mandatory for hard-wall wells,
    /// optional cap below `min(v1, v2)` otherwise.
    pub e_max: Option<f64>,
    /// Bisection evaluation budget per bracket.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            grid_points: 2000,
            tol_e: 1e-10,
            tol_res: 1e-8,
            edge_offset: 1e-9,
            e_max: None,
            max_iter: 200,
        }
    }
}

/// Output of [`find_bound_states`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Bound-state energies above the well bottom, ascending.
    pub energies: Vec<f64>,
    /// Residual magnitude at each accepted energy.
    pub residuals: Vec<f64>,
    /// Isolating bracket each root was polished inside.
    pub brackets: Vec<(f64, f64)>,
    /// Energy window that was scanned.
    pub window: (f64, f64),
}

/// Residual shared by both wall types; assumes a validated spec and an
/// energy inside the window. `(α, β)` are scaled by `1/|α|` first — a
/// positive factor that leaves roots and signs alone but keeps deep or
/// long structures, where `|α|` grows like `e^{κL}`, in `f64` range.
pub(crate) fn residual_validated(spec: &WellSpec, e: f64) -> f64 {
    let k = e.sqrt();
    let tc = fold_elements(&spec.elements, k);
    let scale = tc.alpha.norm();
    let a = tc.alpha / scale;
    let b = tc.beta / scale;
    let (sin_kd, cos_kd) = (k * spec.d).sin_cos();
    match (spec.v1, spec.v2) {
        (Wall::Finite(v1), Wall::Finite(v2)) => {
            let x1 = (v1 - e).sqrt();
            let x2 = (v2 - e).sqrt();
            let num = k * (x1 + x2) * a.re + (x1 * x2 - e) * a.im
                - (x1 * x2 + e) * b.im
                - k * (x1 - x2) * b.re;
            let den = k * (x1 + x2) * a.im - (x1 * x2 - e) * a.re
                + (x1 * x2 + e) * b.re
                - k * (x1 - x2) * b.im;
            sin_kd * den - cos_kd * num
        }
        // Hard walls: the matching reduces to a node condition at both ends.
        _ => sin_kd * (a.re - b.re) - cos_kd * (b.im - a.im),
    }
}

/// Bound-state residual of a finite-wall well at energy `e ∈ (0, min(v1, v2))`.
///
/// With `k = √e`, `χᵢ = √(vᵢ − e)` and normalized interior coefficients
/// `(α, β)`:
///
/// ```text
/// f = sin(kd)·Den − cos(kd)·Num
/// Num = k(χ₁+χ₂)Re α + (χ₁χ₂−k²)Im α − (χ₁χ₂+k²)Im β − k(χ₁−χ₂)Re β
/// Den = k(χ₁+χ₂)Im α − (χ₁χ₂−k²)Re α + (χ₁χ₂+k²)Re β − k(χ₁−χ₂)Im β
/// ```
///
/// An empty well reduces this to the textbook square-well condition.
pub fn spectrum_residual(spec: &WellSpec, e: f64) -> Result<f64, Error> {
    let spec = validate(spec.clone())?;
    let ceiling = spec.wall_min().ok_or_else(|| {
        Error::InfiniteWall("finite-wall residual called on a hard-wall well".into())
    })?;
    if !(e.is_finite() && e > 0.0 && e < ceiling) {
        return Err(Error::Domain(format!(
            "energy {e} outside the bound-state window (0, {ceiling})"
        )));
    }
    Ok(residual_validated(&spec, e))
}

/// Bound-state residual of a hard-wall well at energy `e > 0`:
/// `f = sin(kd)(Re α − Re β) − cos(kd)(Im β − Im α)`, which collapses to
/// `sin(kd)` for an empty box.
pub fn spectrum_residual_infinite(spec: &WellSpec, e: f64) -> Result<f64, Error> {
    let spec = validate(spec.clone())?;
    if !spec.is_infinite() {
        return Err(Error::FiniteWall(
            "hard-wall residual called on a finite-wall well".into(),
        ));
    }
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Domain(format!("energy {e} must be positive")));
    }
    Ok(residual_validated(&spec, e))
}

fn check_config(cfg: &SolverConfig) -> Result<(), Error> {
    if cfg.grid_points < MIN_GRID_POINTS {
        return Err(Error::Grid(format!(
            "grid_points = {} is below the minimum of {MIN_GRID_POINTS}",
            cfg.grid_points
        )));
    }
    if !(cfg.tol_e.is_finite() && cfg.tol_e > 0.0) {
        return Err(Error::Grid(format!("tol_e = {} must be > 0", cfg.tol_e)));
    }
    if !(cfg.tol_res.is_finite() && cfg.tol_res > 0.0) {
        return Err(Error::Grid(format!("tol_res = {} must be > 0", cfg.tol_res)));
    }
    if !(cfg.edge_offset > 0.0 && cfg.edge_offset < 0.5) {
        return Err(Error::Grid(format!(
            "edge_offset = {} must lie in (0, 0.5)",
            cfg.edge_offset
        )));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Grid("max_iter must be at least 1".into()));
    }
    Ok(())
}

fn search_window(spec: &WellSpec, cfg: &SolverConfig) -> Result<(f64, f64), Error> {
    match spec.wall_min() {
        Some(ceiling) => {
            let lo = cfg.edge_offset * ceiling;
            let mut hi = (1.0 - cfg.edge_offset) * ceiling;
            if let Some(cap) = cfg.e_max {
                hi = hi.min(cap);
            }
            if lo >= hi {
                return Err(Error::Range(format!(
                    "empty search window [{lo}, {hi}]"
                )));
            }
            Ok((lo, hi))
        }
        None => {
            let cap = cfg.e_max.ok_or_else(|| {
                Error::Range("hard-wall wells are unbounded above; set e_max".into())
            })?;
            if !(cap.is_finite() && cap > 0.0) {
                return Err(Error::Range(format!("e_max = {cap} must be > 0")));
            }
            Ok((cfg.edge_offset * cap, cap))
        }
    }
}

/// An accepted root: `(energy, |residual|, final bracket)`.
type RootHit = (f64, f64, (f64, f64));

/// Bisect one sign-change bracket `[lo, hi]` with residuals `f_lo, f_hi`.
///
/// Refinement runs all the way to `f64` spacing when the evaluation budget
/// allows, so accepted energies are accurate to rounding noise rather than
/// just to `tol_e`. Running out of `max_iter` is fine once the bracket is
/// inside `tol_e` with a residual under `tol_res`, and an error before
/// that. A collapsed bracket whose residual never got below `tol_res` is
/// a crossing that is not a root (a pole) and is discarded.
fn bisect_root<F: Fn(f64) -> f64>(
    bracket: &[f64; 4],
    cfg: &SolverConfig,
    f: &F,
) -> Result<Option<RootHit>, Error> {
    let [mut lo, mut hi, mut f_lo, f_hi] = *bracket;
    let (mut best_e, mut best_f) = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    let mut evals = 0usize;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket narrower than f64 resolution
        }
        if evals >= cfg.max_iter {
            if hi - lo <= cfg.tol_e && best_f.abs() <= cfg.tol_res {
                break;
            }
            return Err(Error::Convergence(cfg.max_iter, lo, hi));
        }
        evals += 1;
        let f_mid = f(mid);
        if f_mid.abs() < best_f.abs() {
            best_e = mid;
            best_f = f_mid;
        }
        if f_mid == 0.0 {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if best_f.abs() <= cfg.tol_res {
        Ok(Some((best_e, best_f.abs(), (lo, hi))))
    } else {
        Ok(None)
    }
}

/// Find every bound state of a well inside the search window.
///
/// The residual is scanned on a uniform grid, sign changes are bracketed
/// (runs of sign changes in adjacent cells are first re-scanned 16× finer),
/// and each bracket is polished by bisection. No deflation is attempted:
/// roots the scan cannot separate need a denser grid. Scan and polish both
/// run through [`exec::map_grid`], so they parallelize when the `parallel`
/// feature is on; results are deterministic either way.
pub fn find_bound_states(spec: &WellSpec, config: &SolverConfig) -> Result<SpectrumResult, Error> {
    let spec = validate(spec.clone())?;
    check_config(config)?;
    let (lo, hi) = search_window(&spec, config)?;

    let n = config.grid_points;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    let vals = exec::map_grid(&grid, |&e| residual_validated(&spec, e));

    let flagged: Vec<bool> = (0..n - 1)
        .map(|i| vals[i].signum() * vals[i + 1].signum() < 0.0)
        .collect();

    // Assemble brackets; a run of ≥ 2 flagged neighbors gets the finer scan.
    let mut brackets: Vec<[f64; 4]> = Vec::new();
    let mut i = 0;
    while i < n - 1 {
        if !flagged[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n - 1 && flagged[j + 1] {
            j += 1;
        }
        if j == i {
            brackets.push([grid[i], grid[i + 1], vals[i], vals[i + 1]]);
        } else {
            let cells = (j - i + 1) * REFINE_FACTOR;
            let (run_lo, run_hi) = (grid[i], grid[j + 1]);
            let sub_step = (run_hi - run_lo) / cells as f64;
            let sub: Vec<f64> = (0..=cells).map(|t| run_lo + sub_step * t as f64).collect();
            let sub_vals = exec::map_grid(&sub, |&e| residual_validated(&spec, e));
            for t in 0..cells {
                if sub_vals[t].signum() * sub_vals[t + 1].signum() < 0.0 {
                    brackets.push([sub[t], sub[t + 1], sub_vals[t], sub_vals[t + 1]]);
                }
            }
        }
        i = j + 1;
    }

    let polished = exec::map_grid(&brackets, |br| {
        bisect_root(br, config, &|e| residual_validated(&spec, e))
    });

    let mut energies: Vec<f64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    let mut out_brackets: Vec<(f64, f64)> = Vec::new();
    for item in polished {
        let Some((e, r, br)) = item? else { continue };
        // Merge roots the polish step collapsed onto the same energy.
        if let Some(&last) = energies.last() {
            if e - last < config.tol_e {
                let tail = energies.len() - 1;
                if r < residuals[tail] {
                    energies[tail] = e;
                    residuals[tail] = r;
                    out_brackets[tail] = br;
                }
                continue;
            }
        }
        energies.push(e);
        residuals.push(r);
        out_brackets.push(br);
    }

    Ok(SpectrumResult {
        energies,
        residuals,
        brackets: out_brackets,
        window: (lo, hi),
    })
}

/// Bisection to `f64` resolution for a function with one sign change in
/// `[lo, hi]`.
fn bisect_to_limit<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form levels of an empty symmetric finite well (depth `v`, width
/// `d`), from the even/odd branch conditions in `θ = kd/2` with
/// `Θ = (d/2)√v`:
///
/// ```text
/// even: θ·tan θ = √(Θ² − θ²)      odd: θ·cot θ = −√(Θ² − θ²)
/// ```
///
/// There are `⌊2Θ/π⌋ + 1` levels, one per half-period of the branch
/// functions.
pub fn plane_bottom_levels(v: f64, d: f64) -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let theta_max = 0.5 * d * v.sqrt();
    let count = (2.0 * theta_max / PI).floor() as usize + 1;
    let mut levels = Vec::with_capacity(count);
    for j in 0..count {
        let even = j % 2 == 0;
        let branch = |theta: f64| {
            let tail = (theta_max * theta_max - theta * theta).max(0.0).sqrt();
            if even {
                theta * theta.sin() - tail * theta.cos()
            } else {
                theta * theta.cos() + tail * theta.sin()
            }
        };
        let nudge = 1e-12 * theta_max.max(1.0);
        let lo = j as f64 * FRAC_PI_2 + nudge;
        let hi = ((j + 1) as f64 * FRAC_PI_2).min(theta_max) - nudge;
        if hi <= lo || branch(lo).signum() == branch(hi).signum() {
            continue; // marginally bound threshold state
        }
        let theta = bisect_to_limit(branch, lo, hi);
        levels.push((2.0 * theta / d).powi(2));
    }
    levels
}

/// First `n` levels of an empty hard-wall well: `E_j = (jπ/d)²`.
pub fn plane_bottom_infinite_levels(d: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| (j as f64 * std::f64::consts::PI / d).powi(2))
        .collect()
}

/// Closed-form residual for one delta spike of strength `g` at distance
/// `d1` from the left wall of a symmetric finite well (depth `v`, width
/// `d`), evaluated at `e ∈ (0, v)`.
///
/// With `k = √e`, `χ = √(v − e)`, `u = g/2k` and
///
/// ```text
/// A = 1 + (k/χ)²   B = (1 − (k/χ)²)·u − 2k/χ   C = (1 − (k/χ)²) + g/χ
/// ```
///
/// the residual is
///
/// ```text
/// f = sin(kd₁)sin(kd₂)·(B + Au)/C − cos(kd₁)cos(kd₂)·(B − Au)/C + sin(kd)
/// ```
///
/// This equals the generic residual up to the factor `−1/(χ²C)`, so the
/// roots coincide — except that `C` itself can vanish inside the window,
/// where the sign flip across the pole fakes a crossing. Callers doing
/// root-finding on this form should cross-check candidates against
/// [`spectrum_residual`]. (The sign of the `g/χ` term in `C` is fixed by
/// that agreement requirement; the generic matching equations are the
/// authority here.)
pub fn delta_well_residual(g: f64, d1: f64, d: f64, v: f64, e: f64) -> Result<f64, Error> {
    if !(d.is_finite() && d > 0.0 && d1 > 0.0 && d1 < d) {
        return Err(Error::Geometry(format!(
            "delta offset d1 = {d1} must lie strictly inside (0, {d})"
        )));
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Geometry(format!("wall height v = {v} must be > 0")));
    }
    if !(e.is_finite() && e > 0.0 && e < v) {
        return Err(Error::Domain(format!(
            "energy {e} outside the bound-state window (0, {v})"
        )));
    }
    let k = e.sqrt();
    let chi = (v - e).sqrt();
    let ratio2 = e / (v - e); // (k/χ)²
    let u = g / (2.0 * k);
    let a = 1.0 + ratio2;
    let b = (1.0 - ratio2) * u - 2.0 * k / chi;
    let c = (1.0 - ratio2) + g / chi;
    let d2 = d - d1;
    let (s1, c1) = (k * d1).sin_cos();
    let (s2, c2) = (k * d2).sin_cos();
    Ok(s1 * s2 * (b + a * u) / c - c1 * c2 * (b - a * u) / c + (k * d).sin())
}

/// The pole condition of the full transmission amplitude through a
/// finite-wall well, continued below the walls: `k₁ = iχ₁`, `k₂ = iχ₂`,
/// interior wavenumber `k = √e`, and `1/t = conj(α)`, `r/t = −conj(β)` of
/// the interior structure:
///
/// ```text
/// (k₂−k)(k−k₁)/t*·e^{ikd} + (k₂+k)(k+k₁)/t·e^{−ikd}
///   + (k+k₂)(k₁−k)·r/t·e^{−ikd} + (k−k₂)(k+k₁)·r*/t*·e^{ikd}
/// ```
///
/// The value is purely imaginary (up to roundoff) for `e` in the bound
/// window, and its zeros are the bound-state energies — the same roots the
/// matching residual [`spectrum_residual`] produces.
pub fn transmission_pole_residual(spec: &WellSpec, e: f64) -> Result<Complex64, Error> {
    let spec = validate(spec.clone())?;
    let ceiling = spec.wall_min().ok_or_else(|| {
        Error::InfiniteWall("transmission poles need finite walls".into())
    })?;
    if !(e.is_finite() && e > 0.0 && e < ceiling) {
        return Err(Error::Domain(format!(
            "energy {e} outside the bound-state window (0, {ceiling})"
        )));
    }
    let (v1, v2) = match (spec.v1, spec.v2) {
        (Wall::Finite(v1), Wall::Finite(v2)) => (v1, v2),
        _ => unreachable!("wall_min returned Some"),
    };
    let k = e.sqrt();
    let k1 = Complex64::new(0.0, (v1 - e).sqrt());
    let k2 = Complex64::new(0.0, (v2 - e).sqrt());
    let tc = fold_elements(&spec.elements, k);
    let phase = Complex64::from_polar(1.0, k * spec.d); // e^{+ikd}
    // 1/t* = α, 1/t = conj(α), r/t = −conj(β), r*/t* = −β.
    Ok((k2 - k) * (k - k1) * tc.alpha * phase
        + (k2 + k) * (k + k1) * tc.alpha.conj() * phase.conj()
        - (k + k2) * (k1 - k) * tc.beta.conj() * phase.conj()
        - (k - k2) * (k + k1) * tc.beta * phase)
}
