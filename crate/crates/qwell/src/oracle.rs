//! Independent finite-difference cross-check for the transfer-matrix
//! solver.
//!
//! The well (padded with wall material on both sides when the walls are
//! finite) is discretized on a uniform grid with Dirichlet ends, giving a
//! symmetric tridiagonal matrix whose lowest eigenvalues approximate the
//! bound states to `O(h²)` — `O(h)` where delta spikes are involved, since
//! a spike becomes a single `g/h` node. Eigenvalues come from Sturm
//! bisection, which never builds eigenvectors and is immune to clustering.

use crate::error::Error;
use crate::exec;
use crate::potential::{validate, Element, WellSpec};

/// Discretization knobs for [`finite_difference_levels`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Wall material added on each side of a finite well, in length units.
    /// `None` picks `8/√(W/2)` — eight decay lengths at half the ceiling.
    /// Hard-wall wells take no padding (the wavefunction is pinned).
    pub pad: Option<f64>,
    /// Number of interior grid points.
    pub n: usize,
    /// How many levels to return (fewer if fewer are bound).
    pub n_levels: usize,
}

impl Default for GridConfig {
    fn default() -> GridConfig {
        GridConfig {
            pad: None,
            n: 20_000,
            n_levels: 8,
        }
    }
}

/// Eigenvalues strictly below `x` of the tridiagonal matrix with the given
/// diagonal and constant off-diagonal square `off2`, by Sturm sequence in
/// LDLT form.
fn count_below(diag: &[f64], off2: f64, x: f64) -> usize {
    let pivot_min = f64::EPSILON * off2.max(1.0);
    let mut count = 0;
    let mut p = f64::INFINITY;
    for &d in diag {
        p = d - x - off2 / p;
        if p.abs() < pivot_min {
            p = -pivot_min;
        }
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `j`-th (0-based) eigenvalue, by bisection on the Sturm count inside
/// `[lo, hi]`.
fn eigenvalue_by_index(diag: &[f64], off2: f64, j: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off2, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Bound levels of a well by finite differences, ascending, measured from
/// the well bottom like the solver's energies.
///
/// Finite wells return only levels below `min(v1, v2)`; hard-wall wells
/// return the first `n_levels`. Accuracy is second order in `h` for smooth
/// content and first order for delta spikes and for sampled potential
/// steps (wall and block edges contribute a term whose size depends on
/// where the edge falls between nodes), so agreement with the
/// transfer-matrix solver is expected at the `1e-4`–`1e-3` level with the
/// default grid, not at solver precision.
pub fn finite_difference_levels(spec: &WellSpec, grid: &GridConfig) -> Result<Vec<f64>, Error> {
    let spec = validate(spec.clone())?;
    if grid.n < 100 {
        return Err(Error::Grid(format!("n = {} grid points is too coarse", grid.n)));
    }
    if grid.n_levels == 0 {
        return Err(Error::Grid("n_levels must be at least 1".into()));
    }
    // A credible O(h²) eigenvalue needs many nodes per oscillation; with
    // fewer than ~8 points per requested half-wave the high levels are
    // discretization artifacts.
    if grid.n < 8 * grid.n_levels {
        return Err(Error::Grid(format!(
            "n = {} grid points cannot resolve {} levels",
            grid.n, grid.n_levels
        )));
    }

    let ceiling = spec.wall_min();
    let pad = match (ceiling, grid.pad) {
        (None, None) => 0.0,
        (None, Some(p)) if p != 0.0 => {
            return Err(Error::Grid(
                "hard walls pin the wavefunction at the edges; pad must be 0".into(),
            ));
        }
        (None, Some(_)) => 0.0,
        (Some(w), None) => 8.0 / (0.5 * w).sqrt(),
        (Some(_), Some(p)) => {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::Grid(format!("pad = {p} must be ≥ 0")));
            }
            p
        }
    };

    let n = grid.n;
    let h = (spec.d + 2.0 * pad) / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);

    // Potential on the interior nodes; rectangles cover a ≤ x < a+w so
    // touching blocks never double-count a node.
    let mut diag: Vec<f64> = (0..n)
        .map(|i| {
            let x = -pad + h * (i + 1) as f64;
            let mut v = 0.0;
            if x < 0.0 {
                v += spec.v1.height().expect("padding only exists for finite walls");
            } else if x > spec.d {
                v += spec.v2.height().expect("padding only exists for finite walls");
            }
            for el in &spec.elements {
                if let Element::Rect { a, w, u } = *el {
                    if x >= a && x < a + w {
                        v += u;
                    }
                }
            }
            2.0 * inv_h2 + v
        })
        .collect();

    // Each delta spike lands on its nearest node as g/h.
    for el in &spec.elements {
        if let Element::Delta { x, g } = *el {
            let idx = ((x + pad) / h - 1.0).round() as isize;
            let idx = idx.clamp(0, n as isize - 1) as usize;
            diag[idx] += g / h;
        }
    }

    let off2 = inv_h2 * inv_h2; // off-diagonal is −1/h²

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &d in &diag {
        lo = lo.min(d - 2.0 * inv_h2);
        hi = hi.max(d + 2.0 * inv_h2);
    }
    let (lo, hi) = (lo - 1.0, hi + 1.0);

    let wanted = match ceiling {
        Some(w) => grid.n_levels.min(count_below(&diag, off2, w)),
        None => grid.n_levels.min(n),
    };
    let indices: Vec<usize> = (0..wanted).collect();
    Ok(exec::map_grid(&indices, |&j| {
        eigenvalue_by_index(&diag, off2, j, lo, hi)
    }))
}
