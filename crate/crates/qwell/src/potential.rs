//! Well geometry: walls, interior elements, validation, and the
//! dimensionless parameter set used by the single-barrier studies.

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::Error;

/// Height of one confining wall. `Finite(v)` is measured from the well
/// floor (the element-free interior potential); `Infinite` is a hard wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wall {
    Finite(f64),
    Infinite,
}

impl Wall {
    pub fn is_infinite(self) -> bool {
        matches!(self, Wall::Infinite)
    }

    /// Finite height, if any.
    pub fn height(self) -> Option<f64> {
        match self {
            Wall::Finite(v) => Some(v),
            Wall::Infinite => None,
        }
    }
}

// JSON form: a plain number, or the string "inf" for a hard wall.
impl Serialize for Wall {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Wall::Finite(v) => ser.serialize_f64(*v),
            Wall::Infinite => ser.serialize_str("inf"),
        }
    }
}

struct WallVisitor;

impl Visitor<'_> for WallVisitor {
    type Value = Wall;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Wall, E> {
        Ok(Wall::Finite(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Wall, E> {
        Ok(Wall::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Wall, E> {
        Ok(Wall::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, s: &str) -> Result<Wall, E> {
        if s == "inf" {
            Ok(Wall::Infinite)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(s), &self))
        }
    }
}

impl<'de> Deserialize<'de> for Wall {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Wall, D::Error> {
        de.deserialize_any(WallVisitor)
    }
}

/// One interior potential feature.
///
/// `Delta` is a spike `g·δ(x − x_c)` (strength in length⁻¹, either sign);
/// `Rect` is a block of height `u` (length⁻², either sign) on `[a, a+w]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Element {
    Delta { x: f64, g: f64 },
    Rect { a: f64, w: f64, u: f64 },
}

impl Element {
    /// Left end of the support.
    pub fn left(&self) -> f64 {
        match *self {
            Element::Delta { x, .. } => x,
            Element::Rect { a, .. } => a,
        }
    }

    /// Right end of the support (equals `left` for a delta).
    pub fn right(&self) -> f64 {
        match *self {
            Element::Delta { x, .. } => x,
            Element::Rect { a, w, .. } => a + w,
        }
    }

    /// Midpoint of the support — the position the canonical transfer
    /// coefficients get shifted to.
    pub fn center(&self) -> f64 {
        0.5 * (self.left() + self.right())
    }

    fn all_finite(&self) -> bool {
        match *self {
            Element::Delta { x, g } => x.is_finite() && g.is_finite(),
            Element::Rect { a, w, u } => a.is_finite() && w.is_finite() && u.is_finite(),
        }
    }

    /// The same element reflected about `x = d/2`.
    fn mirrored(&self, d: f64) -> Element {
        match *self {
            Element::Delta { x, g } => Element::Delta { x: d - x, g },
            Element::Rect { a, w, u } => Element::Rect { a: d - a - w, w, u },
        }
    }
}

/// Geometry and potential content of one well: walls `v1` (left), `v2`
/// (right), width `d`, and the ordered interior elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellSpec {
    pub v1: Wall,
    pub v2: Wall,
    pub d: f64,
    #[serde(default)]
    pub elements: Vec<Element>,
}

impl WellSpec {
    pub fn new(v1: Wall, v2: Wall, d: f64, elements: Vec<Element>) -> WellSpec {
        WellSpec { v1, v2, d, elements }
    }

    /// True when the well has hard walls (valid specs have either both or
    /// neither infinite).
    pub fn is_infinite(&self) -> bool {
        self.v1.is_infinite() && self.v2.is_infinite()
    }

    /// The binding ceiling `min(v1, v2)` of a finite well.
    pub fn wall_min(&self) -> Option<f64> {
        match (self.v1, self.v2) {
            (Wall::Finite(a), Wall::Finite(b)) => Some(a.min(b)),
            _ => None,
        }
    }

    /// The well reflected about its midpoint: wall heights swapped, every
    /// element moved from `x` to `d − x`.
    pub fn mirror(&self) -> WellSpec {
        let mut elements: Vec<Element> =
            self.elements.iter().map(|e| e.mirrored(self.d)).collect();
        elements.reverse();
        WellSpec {
            v1: self.v2,
            v2: self.v1,
            d: self.d,
            elements,
        }
    }
}

/// Check every invariant of a well description and return it with the
/// elements sorted by left coordinate.
///
/// Rules enforced: `d > 0`; finite walls strictly positive; walls are
/// either both finite or both infinite; every element lies inside `[0, d]`
/// (deltas strictly inside); rectangles have positive width; supports may
/// touch at a point but must not share interior (a delta strictly inside a
/// rectangle is rejected — the transfer-matrix product is only defined for
/// disjoint supports).
pub fn validate(spec: WellSpec) -> Result<WellSpec, Error> {
    if !spec.d.is_finite() || spec.d <= 0.0 {
        return Err(Error::Geometry(format!("well width d = {} must be > 0", spec.d)));
    }
    match (spec.v1, spec.v2) {
        (Wall::Finite(v), _) | (_, Wall::Finite(v)) if !(v.is_finite() && v > 0.0) => {
            return Err(Error::Geometry(format!("wall height {v} must be finite and > 0")));
        }
        (Wall::Finite(_), Wall::Infinite) | (Wall::Infinite, Wall::Finite(_)) => {
            return Err(Error::Geometry(
                "walls must be both finite or both infinite".into(),
            ));
        }
        _ => {}
    }

    for el in &spec.elements {
        if !el.all_finite() {
            return Err(Error::Range(format!("non-finite element field in {el:?}")));
        }
        match *el {
            Element::Delta { x, .. } => {
                if !(x > 0.0 && x < spec.d) {
                    return Err(Error::Range(format!(
                        "delta at x = {x} outside the open well (0, {})",
                        spec.d
                    )));
                }
            }
            Element::Rect { a, w, .. } => {
                if w <= 0.0 {
                    return Err(Error::Range(format!("rect width w = {w} must be > 0")));
                }
                if a < 0.0 || a + w > spec.d {
                    return Err(Error::Range(format!(
                        "rect [{a}, {}] outside the well [0, {}]",
                        a + w,
                        spec.d
                    )));
                }
            }
        }
    }

    let mut spec = spec;
    // Ties (a delta sitting on a rectangle edge) order the zero-width
    // support first so it composes on the correct side.
    spec.elements.sort_by(|p, q| {
        (p.left(), p.right())
            .partial_cmp(&(q.left(), q.right()))
            .expect("element coordinates are finite")
    });

    for pair in spec.elements.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        // Supports may touch (hi.left == lo.right) but not share interior.
        if hi.left() < lo.right() {
            return Err(Error::Overlap(lo.left(), lo.right(), hi.left(), hi.right()));
        }
    }
    Ok(spec)
}

/// Build the single-barrier well of the dimensionless parameter set
/// `x = Δ/d`, `y = a/Δ`, `u = UΔ²`, `v = V₁Δ² = V₂Δ²`, with the length
/// scale fixed by `Δ = 1`. Solver energies for this well are then directly
/// the dimensionless `εᵢΔ²`.
pub fn from_dimensionless(x: f64, y: f64, u: f64, v: f64) -> Result<WellSpec, Error> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Range(format!("width ratio x = {x} must be in (0, 1]")));
    }
    if y < 0.0 {
        return Err(Error::Range(format!("offset ratio y = {y} must be ≥ 0")));
    }
    // Barrier must fit: y ≤ 1/x − 1, i.e. x(y + 1) ≤ 1.
    if x * (y + 1.0) > 1.0 {
        return Err(Error::Range(format!(
            "barrier does not fit: y = {y} exceeds 1/x − 1 = {}",
            1.0 / x - 1.0
        )));
    }
    validate(WellSpec::new(
        Wall::Finite(v),
        Wall::Finite(v),
        1.0 / x,
        vec![Element::Rect { a: y, w: 1.0, u }],
    ))
}
