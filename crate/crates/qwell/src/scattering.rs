//! Transfer coefficients of interior elements and their composition.
//!
//! Every element is described by two complex numbers `(α, β)` relating the
//! plane-wave amplitudes on its two sides at energy `E = k²`:
//!
//! ```text
//! | α       β      |        with  |α|² − |β|² = 1
//! | conj(β) conj(α)|
//! ```
//!
//! The canonical coefficients place the element at the origin; [`shift`]
//! moves it to its actual position, and [`compose`] multiplies matrices of
//! adjacent (non-overlapping) elements. For scattering off the same
//! structure the conversions are `1/T = conj(α)` and `R/T = −conj(β)`.

use num_complex::Complex64;

use crate::error::Error;
use crate::potential::{Element, WellSpec};

/// Arguments `|q·w|` below this are handled by the series form of
/// `sin(qw)/q`, which is exact in the `q → 0` limit.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Transfer coefficients `(α, β)` of a structure at wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub k: f64,
}

impl TransferCoefficients {
    /// `|α|² − |β|²`; exactly 1 for any lossless structure.
    #[must_use]
    pub fn flux(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    /// `1/T = conj(α)` for a left-incident scattering problem.
    #[must_use]
    pub fn inverse_transmission(&self) -> Complex64 {
        self.alpha.conj()
    }

    /// `R/T = −conj(β)` for a left-incident scattering problem.
    #[must_use]
    pub fn reflection_over_transmission(&self) -> Complex64 {
        -self.beta.conj()
    }
}

/// The empty structure: `α = 1`, `β = 0`.
pub fn identity(k: f64) -> TransferCoefficients {
    TransferCoefficients {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
        k,
    }
}

/// Canonical coefficients of a delta spike `g·δ(x)` at wavenumber `k > 0`:
/// `α = 1 − ig/2k`, `β = −ig/2k`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the guard
pub fn delta_coefficients(g: f64, k: f64) -> Result<TransferCoefficients, Error> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!(
            "delta coefficients need a positive wavenumber, got k = {k}"
        )));
    }
    let w = g / (2.0 * k);
    Ok(TransferCoefficients {
        alpha: Complex64::new(1.0, -w),
        beta: Complex64::new(0.0, -w),
        k,
    })
}

/// `sin(q·w)/q` with the removable singularity at `q = 0` filled in by its
/// Taylor series (error `O(|qw|¹⁰)` below the cutoff).
fn sinc_q(q: Complex64, w: f64) -> Complex64 {
    let qw = q * w;
    if qw.norm() < SINC_SERIES_CUTOFF {
        let z = qw * qw;
        let z2 = z * z;
        (Complex64::new(1.0, 0.0) - z / 6.0 + z2 / 120.0 - z2 * z / 5040.0
            + z2 * z2 / 362_880.0)
            * w
    } else {
        qw.sin() / q
    }
}

/// Canonical coefficients of a rectangular block of height `u` (either
/// sign) and width `w`, centered on the origin, at wavenumber `k > 0`.
///
/// With `q = √(k² − u)` (principal branch, so tunneling just makes `q`
/// imaginary) and `S = sin(qw)/q`:
///
/// ```text
/// α = e^{−ikw} · (cos(qw) + i·(k² + q²)/(2k)·S)
/// β = −i·(k² − q²)/(2k)·S
/// ```
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail the guards
pub fn rect_coefficients(u: f64, w: f64, k: f64) -> Result<TransferCoefficients, Error> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!(
            "rect coefficients need a positive wavenumber, got k = {k}"
        )));
    }
    if !(w > 0.0) {
        return Err(Error::Domain(format!(
            "rect coefficients need a positive width, got w = {w}"
        )));
    }
    let q = Complex64::new(k * k - u, 0.0).sqrt();
    let s = sinc_q(q, w);
    let cos_qw = (q * w).cos();
    // k² + q² = 2k² − u and k² − q² = u hold exactly by construction.
    let alpha = Complex64::from_polar(1.0, -k * w)
        * (cos_qw + Complex64::i() * ((2.0 * k * k - u) / (2.0 * k)) * s);
    let beta = -Complex64::i() * (u / (2.0 * k)) * s;
    Ok(TransferCoefficients { alpha, beta, k })
}

/// Move a structure from the origin to `x`: `β ← β·e^{−2ikx}`, `α` fixed.
pub fn shift(tc: TransferCoefficients, x: f64) -> TransferCoefficients {
    TransferCoefficients {
        beta: tc.beta * Complex64::from_polar(1.0, -2.0 * tc.k * x),
        ..tc
    }
}

/// Coefficients of `outer` stacked after (to the right of) `inner`. Both
/// must be at the same wavenumber.
pub fn compose(
    outer: TransferCoefficients,
    inner: TransferCoefficients,
) -> Result<TransferCoefficients, Error> {
    if outer.k != inner.k {
        return Err(Error::Mismatch(outer.k, inner.k));
    }
    Ok(TransferCoefficients {
        alpha: outer.alpha * inner.alpha + outer.beta * inner.beta.conj(),
        beta: outer.alpha * inner.beta + outer.beta * inner.alpha.conj(),
        k: outer.k,
    })
}

/// Coefficients of one element placed at its position in the well. The
/// wavenumber and widths are assumed positive (a validated spec and the
/// solver's `e > 0` window guarantee this).
pub fn element_coefficients(el: &Element, k: f64) -> TransferCoefficients {
    match *el {
        Element::Delta { x, g } => shift(
            delta_coefficients(g, k).expect("solver wavenumbers are positive"),
            x,
        ),
        Element::Rect { a, w, u } => shift(
            rect_coefficients(u, w, k).expect("validated widths and wavenumbers are positive"),
            a + 0.5 * w,
        ),
    }
}

/// Fold a left-to-right sorted element list into total coefficients.
/// Assumes the list came out of `validate` (sorted, non-overlapping).
pub(crate) fn fold_elements(elements: &[Element], k: f64) -> TransferCoefficients {
    let mut acc = identity(k);
    for el in elements {
        acc = compose(element_coefficients(el, k), acc)
            .expect("folded coefficients share one wavenumber");
    }
    acc
}

/// Total interior coefficients of a well at energy `e > 0` above the well
/// bottom. Validates the geometry, then multiplies the element matrices
/// left to right.
pub fn interior_coefficients(spec: &WellSpec, e: f64) -> Result<TransferCoefficients, Error> {
    let spec = crate::potential::validate(spec.clone())?;
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Domain(format!(
            "interior coefficients need an energy above the well bottom, got {e}"
        )));
    }
    Ok(fold_elements(&spec.elements, e.sqrt()))
}

/// Closed-chain coefficients of `n` identical cells of period `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicCoefficients {
    /// `1/T` of the whole chain.
    pub inv_t: Complex64,
    /// `R/T` of the whole chain.
    pub r_over_t: Complex64,
    /// `cos β = Re((1/T₁)·e^{−ika})`; `|cos β| ≤ 1` marks an allowed band.
    pub bloch_cos: f64,
    pub n: usize,
}

impl PeriodicCoefficients {
    /// Equivalent `(α, β)` of the whole chain at wavenumber `k`.
    #[must_use]
    pub fn coefficients(&self, k: f64) -> TransferCoefficients {
        TransferCoefficients {
            alpha: self.inv_t.conj(),
            beta: -self.r_over_t.conj(),
            k,
        }
    }
}

/// Scattering off `n ≥ 1` identical cells in closed form.
///
/// `t1_inv` is `1/T₁` of a single canonical (origin-centered) cell and
/// `r1_over_t1` is `R₁/T₁` of the first cell at its real position; `a` is
/// the period. The chain quantities follow from the Chebyshev recurrence
/// `U_m = 2cosβ·U_{m−1} − U_{m−2}` in the real variable `cos β`, which
/// stays stable inside band gaps where `|cos β| > 1`:
///
/// ```text
/// 1/T_n = e^{ikna}·(cos nβ + i·Im((1/T₁)e^{−ika})·U_{n−1})
/// R_n/T_n = e^{ik(n−1)a}·(R₁/T₁)·U_{n−1}
/// ```
pub fn periodic_coefficients(
    t1_inv: Complex64,
    r1_over_t1: Complex64,
    a: f64,
    n: usize,
    k: f64,
) -> Result<PeriodicCoefficients, Error> {
    if n < 1 {
        return Err(Error::Domain("chain needs at least one cell".into()));
    }
    let t_phase = t1_inv * Complex64::from_polar(1.0, -k * a);
    let c = t_phase.re;

    // U_{n−1}(c) and U_{n−2}(c), seeded with U_{−1} = 0, U₀ = 1.
    let mut u_prev = 0.0_f64;
    let mut u_cur = 1.0_f64;
    for _ in 1..n {
        let u_next = 2.0 * c * u_cur - u_prev;
        u_prev = u_cur;
        u_cur = u_next;
    }
    let cos_n = c * u_cur - u_prev;

    let inv_t = Complex64::from_polar(1.0, k * a * n as f64)
        * Complex64::new(cos_n, t_phase.im * u_cur);
    let r_over_t =
        Complex64::from_polar(1.0, k * a * (n as f64 - 1.0)) * r1_over_t1 * u_cur;
    Ok(PeriodicCoefficients {
        inv_t,
        r_over_t,
        bloch_cos: c,
        n,
    })
}

/// `cos β` for a chain of rectangular barriers (height `u`, width `l`,
/// period `a`) at wavenumber `k` — the band condition is `|cos β| ≤ 1`.
/// Needs `k > 0` and `0 < l < a` (the barrier fits inside one period).
pub fn bloch_cos_rect(u: f64, l: f64, a: f64, k: f64) -> Result<f64, Error> {
    if !(l > 0.0 && l < a) {
        return Err(Error::Domain(format!(
            "band function needs a barrier narrower than the period, got l = {l}, a = {a}"
        )));
    }
    let tc = rect_coefficients(u, l, k)?;
    Ok((tc.alpha.conj() * Complex64::from_polar(1.0, -k * a)).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{validate, Wall};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn delta_matches_closed_form() {
        let tc = delta_coefficients(2.0, 1.0).unwrap();
        assert_eq!(tc.alpha, Complex64::new(1.0, -1.0));
        assert_eq!(tc.beta, Complex64::new(0.0, -1.0));
        assert!((tc.flux() - 1.0).abs() < 1e-15);

        // Attractive spike flips both imaginary parts.
        let tc = delta_coefficients(-2.0, 1.0).unwrap();
        assert_eq!(tc.alpha, Complex64::new(1.0, 1.0));
        assert_eq!(tc.beta, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn rect_tunneling_matches_closed_form() {
        // U = 2, w = 1, k = 1: q = i, so cos(qw) = cosh 1, S = sinh 1.
        let tc = rect_coefficients(2.0, 1.0, 1.0).unwrap();
        let expect_alpha =
            Complex64::from_polar(1.0, -1.0) * Complex64::new(1.0_f64.cosh(), 0.0);
        let expect_beta = Complex64::new(0.0, -1.0_f64.sinh());
        assert!(close(tc.alpha, expect_alpha, 1e-14));
        assert!(close(tc.beta, expect_beta, 1e-14));
        assert!((tc.flux() - 1.0).abs() < 1e-13);

        // U = 1, w = 1, k = 1: q = 0 exactly, S = w.
        let tc = rect_coefficients(1.0, 1.0, 1.0).unwrap();
        let expect_alpha = Complex64::from_polar(1.0, -1.0) * Complex64::new(1.0, 0.5);
        assert!(close(tc.alpha, expect_alpha, 1e-14));
        assert!(close(tc.beta, Complex64::new(0.0, -0.5), 1e-14));
    }

    #[test]
    fn constructors_reject_bad_domains() {
        assert!(matches!(delta_coefficients(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(delta_coefficients(1.0, -2.0), Err(Error::Domain(_))));
        assert!(matches!(rect_coefficients(1.0, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(rect_coefficients(1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(rect_coefficients(1.0, -0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bloch_cos_rect(1.0, 1.5, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bloch_cos_rect(1.0, 1.0, 1.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn centered_elements_have_real_alpha_axis_symmetry() {
        // An element mirror-symmetric about the origin has Re β = 0: the
        // canonical forms carry β on the imaginary axis by construction,
        // and any centering shift must preserve that.
        for k in [0.3, 1.0, 4.7] {
            let d = delta_coefficients(3.5, k).unwrap();
            assert_eq!(d.beta.re, 0.0);
            let r = rect_coefficients(-2.0, 0.8, k).unwrap();
            assert!(r.beta.re.abs() < 1e-12);
            // Placed so its center sits at the origin: shift by zero.
            let centered = shift(r, 0.0);
            assert!(centered.beta.re.abs() < 1e-12);
        }
    }

    #[test]
    fn rect_at_grazing_energy_is_finite_and_lossless() {
        // u = k² makes q = 0; the series form must take over smoothly.
        let (k, w) = (1.0, 0.5);
        let tc = rect_coefficients(k * k, w, k).unwrap();
        let expect_beta = Complex64::new(0.0, -k * w / 2.0);
        assert!(close(tc.beta, expect_beta, 1e-15));
        assert!((tc.flux() - 1.0).abs() < 1e-13);

        // Just below and just above the series cutoff agree with the q = 0
        // value to O(q²w²) — no jump across the switch.
        for dq in [0.99e-4, 1.01e-4] {
            let q = dq / w;
            let tc = rect_coefficients(k * k - q * q, w, k).unwrap();
            assert!(close(tc.beta, expect_beta, 5e-8));
            assert!((tc.flux() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn shift_rotates_beta_only() {
        let tc = shift(
            delta_coefficients(2.0, 1.0).unwrap(),
            std::f64::consts::FRAC_PI_2,
        );
        assert_eq!(tc.alpha, Complex64::new(1.0, -1.0));
        // β = (−i)·e^{−iπ} = +i.
        assert!(close(tc.beta, Complex64::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn identity_is_neutral_for_compose() {
        let m = shift(rect_coefficients(-3.0, 0.7, 1.3).unwrap(), 0.4);
        let id = identity(1.3);
        assert_eq!(compose(id, m).unwrap(), m);
        assert_eq!(compose(m, id).unwrap(), m);
    }

    #[test]
    fn compose_rejects_mixed_wavenumbers() {
        let a = identity(1.0);
        let b = identity(2.0);
        assert!(matches!(compose(a, b), Err(Error::Mismatch(..))));
    }

    #[test]
    fn stacked_rects_equal_one_wide_rect() {
        // Two adjacent blocks of the same height are one block.
        let (u, w1, w2, k) = (3.0, 0.4, 0.7, 1.3);
        let m1 = shift(rect_coefficients(u, w1, k).unwrap(), 0.5 * w1);
        let m2 = shift(rect_coefficients(u, w2, k).unwrap(), w1 + 0.5 * w2);
        let stacked = compose(m2, m1).unwrap();
        let wide = shift(rect_coefficients(u, w1 + w2, k).unwrap(), 0.5 * (w1 + w2));
        assert!(close(stacked.alpha, wide.alpha, 1e-12));
        assert!(close(stacked.beta, wide.beta, 1e-12));
    }

    #[test]
    fn chain_flux_stays_unity() {
        let elements = vec![
            Element::Delta { x: 0.3, g: -4.0 },
            Element::Rect { a: 0.5, w: 0.6, u: 7.0 },
            Element::Rect { a: 1.2, w: 0.3, u: -2.5 },
            Element::Delta { x: 1.9, g: 2.0 },
        ];
        let spec = validate(WellSpec::new(
            Wall::Finite(50.0),
            Wall::Finite(80.0),
            2.5,
            elements,
        ))
        .unwrap();
        for &e in &[0.5, 3.0, 11.0, 29.0] {
            let tc = interior_coefficients(&spec, e).unwrap();
            assert!((tc.flux() - 1.0).abs() < 1e-12, "flux off at e = {e}");
        }
    }

    #[test]
    fn interior_requires_positive_energy() {
        let spec = WellSpec::new(Wall::Finite(5.0), Wall::Finite(5.0), 1.0, vec![]);
        assert!(matches!(interior_coefficients(&spec, 0.0), Err(Error::Domain(_))));
        assert!(matches!(interior_coefficients(&spec, -1.0), Err(Error::Domain(_))));
        let tc = interior_coefficients(&spec, 2.0).unwrap();
        assert_eq!(tc.alpha, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn periodic_single_cell_reduces_exactly() {
        let (u, l, a, k) = (2.0, 1.0, 1.5, 0.9);
        let cell = rect_coefficients(u, l, k).unwrap();
        let first = shift(cell, 0.5 * l);
        let chain = periodic_coefficients(
            cell.inverse_transmission(),
            first.reflection_over_transmission(),
            a,
            1,
            k,
        )
        .unwrap();
        assert!(close(chain.inv_t, cell.inverse_transmission(), 1e-14));
        assert!(close(chain.r_over_t, first.reflection_over_transmission(), 1e-14));
    }

    #[test]
    fn periodic_chain_matches_explicit_composition() {
        let (u, l, a, k, n) = (2.0, 1.0, 1.5, 0.9, 3usize);
        let cell = rect_coefficients(u, l, k).unwrap();
        let first = shift(cell, 0.5 * l);
        let chain =
            periodic_coefficients(cell.inverse_transmission(), first.reflection_over_transmission(), a, n, k)
                .unwrap();

        let mut acc = identity(k);
        for j in 0..n {
            let m = shift(cell, 0.5 * l + a * j as f64);
            acc = compose(m, acc).unwrap();
        }
        assert!(close(chain.inv_t, acc.inverse_transmission(), 1e-12));
        assert!(close(chain.r_over_t, acc.reflection_over_transmission(), 1e-12));
        assert!((chain.coefficients(k).flux() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transparent_cells_compose_to_nothing() {
        // u = 0 cells are free space: 1/T = 1, R/T = 0 for any n.
        let (l, a, k) = (1.0, 1.5, 0.9);
        let cell = rect_coefficients(0.0, l, k).unwrap();
        let first = shift(cell, 0.5 * l);
        let chain = periodic_coefficients(
            cell.inverse_transmission(),
            first.reflection_over_transmission(),
            a,
            5,
            k,
        )
        .unwrap();
        assert!(close(chain.inv_t, Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(chain.r_over_t, Complex64::new(0.0, 0.0), 1e-12));
    }

    #[test]
    fn periodic_rejects_empty_chain() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            periodic_coefficients(one, one, 1.0, 0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bloch_cos_is_the_band_function() {
        // Free cells: cos β = cos(ka) exactly.
        let (a, k) = (1.5, 0.9);
        assert!((bloch_cos_rect(0.0, 1.0, a, k).unwrap() - (k * a).cos()).abs() < 1e-14);
        // A strong barrier at low k sits deep in a gap: |cos β| > 1.
        assert!(bloch_cos_rect(150.0, 1.0, 1.25, 1.0).unwrap().abs() > 1.0);
    }
}
