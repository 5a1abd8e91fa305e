//! Exact rational geometry for convex polygon regions.
//!
//! Regions are non-empty, regular closed, bounded convex subsets of Q^2 kept
//! in half-space form `a*x + b*y <= c` with exact rational coefficients.
//! All predicates (containment, interior overlap, boundary contact) are
//! decided exactly; no floating point anywhere.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("region is unbounded: half-space normals do not span the plane")]
    Unbounded,
    #[error("region is empty or lower-dimensional (not regular closed)")]
    Degenerate,
    #[error("half-space with zero normal vector")]
    ZeroNormal,
}

/// Closed half-plane `a*x + b*y <= c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfPlane {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl HalfPlane {
    pub fn new(a: Rat, b: Rat, c: Rat) -> Self {
        HalfPlane { a, b, c }
    }

    fn contains(&self, p: &Point) -> bool {
        &self.a * &p.0 + &self.b * &p.1 <= self.c
    }

    fn contains_strictly(&self, p: &Point) -> bool {
        &self.a * &p.0 + &self.b * &p.1 < self.c
    }
}

pub type Point = (Rat, Rat);

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Intersection point of the two boundary lines, if not parallel.
fn line_intersection(h1: &HalfPlane, h2: &HalfPlane) -> Option<Point> {
    let det = &h1.a * &h2.b - &h2.a * &h1.b;
    if det.is_zero() {
        return None;
    }
    let x = (&h1.c * &h2.b - &h2.c * &h1.b) / &det;
    let y = (&h1.a * &h2.c - &h2.a * &h1.c) / &det;
    Some((x, y))
}

/// Andrew's monotone chain; returns hull in counter-clockwise order without
/// collinear points. Input is deduplicated and sorted here.
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort();
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in pts.iter() {
        while lower.len() >= 2
            && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rat::zero()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rat::zero()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // Degenerate inputs (all collinear) collapse to fewer than 3 points.
    if lower.len() < 3 {
        let mut minimal = vec![pts[0].clone(), pts[n - 1].clone()];
        minimal.dedup();
        return minimal;
    }
    lower
}

fn hull_area_doubled(hull: &[Point]) -> Rat {
    let mut acc = Rat::zero();
    let n = hull.len();
    for i in 0..n {
        let p = &hull[i];
        let q = &hull[(i + 1) % n];
        acc += &p.0 * &q.1 - &q.0 * &p.1;
    }
    acc
}

/// A bounded, full-dimensional convex polygon. Equality, ordering and hashing
/// go through the canonical vertex cycle, so two different half-space lists
/// describing the same region compare equal.
#[derive(Debug, Clone)]
pub struct Polygon {
    halves: Vec<HalfPlane>,
    verts: Vec<Point>,
}

impl Polygon {
    pub fn new(halves: Vec<HalfPlane>) -> Result<Polygon, GeomError> {
        if halves.iter().any(|h| h.a.is_zero() && h.b.is_zero()) {
            return Err(GeomError::ZeroNormal);
        }
        if !normals_positively_span(&halves) {
            return Err(GeomError::Unbounded);
        }
        let mut candidates = Vec::new();
        for i in 0..halves.len() {
            for j in i + 1..halves.len() {
                if let Some(p) = line_intersection(&halves[i], &halves[j]) {
                    if halves.iter().all(|h| h.contains(&p)) {
                        candidates.push(p);
                    }
                }
            }
        }
        let hull = convex_hull(candidates);
        if hull.len() < 3 || hull_area_doubled(&hull) <= Rat::zero() {
            return Err(GeomError::Degenerate);
        }
        Ok(Polygon {
            halves,
            verts: canonical_cycle(hull),
        })
    }

    /// Axis-aligned rectangle `[x1,x2] x [y1,y2]`; requires x1 < x2, y1 < y2.
    pub fn rect(x1: Rat, y1: Rat, x2: Rat, y2: Rat) -> Result<Polygon, GeomError> {
        Polygon::new(vec![
            HalfPlane::new(-Rat::one(), Rat::zero(), -x1),
            HalfPlane::new(Rat::one(), Rat::zero(), x2),
            HalfPlane::new(Rat::zero(), -Rat::one(), -y1),
            HalfPlane::new(Rat::zero(), Rat::one(), y2),
        ])
    }

    pub fn rect_i(x1: i64, y1: i64, x2: i64, y2: i64) -> Result<Polygon, GeomError> {
        Polygon::rect(rat(x1), rat(y1), rat(x2), rat(y2))
    }

    pub fn halves(&self) -> &[HalfPlane] {
        &self.halves
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    pub fn bbox(&self) -> (Rat, Rat, Rat, Rat) {
        let mut xs: Vec<&Rat> = self.verts.iter().map(|p| &p.0).collect();
        let mut ys: Vec<&Rat> = self.verts.iter().map(|p| &p.1).collect();
        xs.sort();
        ys.sort();
        (
            xs[0].clone(),
            ys[0].clone(),
            xs[xs.len() - 1].clone(),
            ys[ys.len() - 1].clone(),
        )
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.halves.iter().all(|h| h.contains(p))
    }

    /// `self` is a subset of `other` (as closed regions).
    pub fn subset_of(&self, other: &Polygon) -> bool {
        self.verts.iter().all(|v| other.contains_point(v))
    }

    /// `self` lies in the topological interior of `other`.
    pub fn inside_interior_of(&self, other: &Polygon) -> bool {
        self.verts
            .iter()
            .all(|v| other.halves.iter().all(|h| h.contains_strictly(v)))
    }

    /// The closed intersection `self /\ other` is non-empty.
    pub fn meets(&self, other: &Polygon) -> bool {
        !self.combined_feasible_points(other).is_empty()
    }

    /// The interiors of `self` and `other` intersect, i.e. the closed
    /// intersection is full-dimensional.
    pub fn interiors_meet(&self, other: &Polygon) -> bool {
        let pts = self.combined_feasible_points(other);
        let hull = convex_hull(pts);
        hull.len() >= 3 && hull_area_doubled(&hull) > Rat::zero()
    }

    fn combined_feasible_points(&self, other: &Polygon) -> Vec<Point> {
        let all: Vec<&HalfPlane> = self.halves.iter().chain(other.halves.iter()).collect();
        let mut pts = Vec::new();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if let Some(p) = line_intersection(all[i], all[j]) {
                    if all.iter().all(|h| h.contains(&p)) {
                        pts.push(p);
                    }
                }
            }
        }
        pts
    }
}

/// Rotate the hull so it starts at the lexicographically smallest vertex.
fn canonical_cycle(hull: Vec<Point>) -> Vec<Point> {
    let start = hull
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = Vec::with_capacity(hull.len());
    for k in 0..hull.len() {
        out.push(hull[(start + k) % hull.len()].clone());
    }
    out
}

/// The outward normals positively span the plane iff the region's recession
/// cone is trivial, i.e. the region is bounded (possibly empty). Checked by
/// sorting the distinct normal directions by angle and requiring every cyclic
/// gap to be strictly less than a half turn.
fn normals_positively_span(halves: &[HalfPlane]) -> bool {
    let mut dirs: Vec<(Rat, Rat)> = Vec::new();
    for h in halves {
        let d = normalize_dir(&h.a, &h.b);
        if !dirs.contains(&d) {
            dirs.push(d);
        }
    }
    if dirs.len() < 3 {
        return false;
    }
    dirs.sort_by(|u, v| angle_cmp(u, v));
    for i in 0..dirs.len() {
        let u = &dirs[i];
        let v = &dirs[(i + 1) % dirs.len()];
        let cr = &u.0 * &v.1 - &u.1 * &v.0;
        if cr <= Rat::zero() {
            return false;
        }
    }
    true
}

fn normalize_dir(a: &Rat, b: &Rat) -> (Rat, Rat) {
    // Scale so that the largest absolute component is 1; keeps direction only.
    let scale = if a.abs() >= b.abs() { a.abs() } else { b.abs() };
    (a / &scale, b / &scale)
}

fn half_plane_index(d: &(Rat, Rat)) -> u8 {
    // 0 for the upper half (y > 0, or y = 0 and x > 0), 1 for the lower half.
    if d.1 > Rat::zero() || (d.1.is_zero() && d.0 > Rat::zero()) {
        0
    } else {
        1
    }
}

fn angle_cmp(u: &(Rat, Rat), v: &(Rat, Rat)) -> Ordering {
    let hu = half_plane_index(u);
    let hv = half_plane_index(v);
    if hu != hv {
        return hu.cmp(&hv);
    }
    let cr = &u.0 * &v.1 - &u.1 * &v.0;
    if cr > Rat::zero() {
        Ordering::Less
    } else if cr < Rat::zero() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

impl PartialEq for Polygon {
    fn eq(&self, other: &Self) -> bool {
        self.verts == other.verts
    }
}

impl Eq for Polygon {}

impl PartialOrd for Polygon {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polygon {
    fn cmp(&self, other: &Self) -> Ordering {
        self.verts.cmp(&other.verts)
    }
}

impl Hash for Polygon {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.verts.hash(state);
    }
}

impl fmt::Display for Polygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.halves.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            write!(f, "{}", display_half(h))?;
        }
        Ok(())
    }
}

fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render `a*x + b*y <= c`, flipping sign so the leading coefficient prints
/// positively (`-x <= -6` becomes `x >= 6`).
fn display_half(h: &HalfPlane) -> String {
    let flip = h.a < Rat::zero() || (h.a.is_zero() && h.b < Rat::zero());
    let (a, b, c, op) = if flip {
        (-h.a.clone(), -h.b.clone(), -h.c.clone(), ">=")
    } else {
        (h.a.clone(), h.b.clone(), h.c.clone(), "<=")
    };
    let mut lhs = String::new();
    if !a.is_zero() {
        if a.is_one() {
            lhs.push('x');
        } else {
            lhs.push_str(&format!("{}x", rat_str(&a)));
        }
    }
    if !b.is_zero() {
        if lhs.is_empty() {
            if b.is_one() {
                lhs.push('y');
            } else {
                lhs.push_str(&format!("{}y", rat_str(&b)));
            }
        } else if b > Rat::zero() {
            if b.is_one() {
                lhs.push_str(" + y");
            } else {
                lhs.push_str(&format!(" + {}y", rat_str(&b)));
            }
        } else {
            let nb = -b.clone();
            if nb.is_one() {
                lhs.push_str(" - y");
            } else {
                lhs.push_str(&format!(" - {}y", rat_str(&nb)));
            }
        }
    }
    format!("{} {} {}", lhs, op, rat_str(&c))
}

/// Axis-aligned box with exact rational corners; the constant space of the
/// rectangle constraint language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxC {
    pub x1: Rat,
    pub y1: Rat,
    pub x2: Rat,
    pub y2: Rat,
}

impl BoxC {
    pub fn new(x1: Rat, y1: Rat, x2: Rat, y2: Rat) -> Result<BoxC, GeomError> {
        if x1 >= x2 || y1 >= y2 {
            return Err(GeomError::Degenerate);
        }
        Ok(BoxC { x1, y1, x2, y2 })
    }

    pub fn coord(&self, corner: crate::constraint::Corner) -> &Rat {
        use crate::constraint::Corner::*;
        match corner {
            Llx => &self.x1,
            Lly => &self.y1,
            Urx => &self.x2,
            Ury => &self.y2,
        }
    }
}

impl fmt::Display for BoxC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}]",
            rat_str(&self.x1),
            rat_str(&self.y1),
            rat_str(&self.x2),
            rat_str(&self.y2)
        )
    }
}

pub fn format_rat(r: &Rat) -> String {
    rat_str(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_has_four_vertices() {
        let p = Polygon::rect_i(1, 1, 2, 2).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.vertices()[0], (rat(1), rat(1)));
    }

    #[test]
    fn region_equality_ignores_redundant_halves() {
        let p = Polygon::rect_i(0, 0, 10, 10).unwrap();
        let mut halves = p.halves().to_vec();
        halves.push(HalfPlane::new(Rat::one(), Rat::one(), rat(100)));
        let q = Polygon::new(halves).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn empty_region_rejected() {
        let err = Polygon::new(vec![
            HalfPlane::new(Rat::one(), Rat::zero(), rat(0)),
            HalfPlane::new(-Rat::one(), Rat::zero(), rat(-1)),
            HalfPlane::new(Rat::zero(), Rat::one(), rat(1)),
            HalfPlane::new(Rat::zero(), -Rat::one(), rat(0)),
        ])
        .unwrap_err();
        assert_eq!(err, GeomError::Degenerate);
    }

    #[test]
    fn segment_rejected_even_with_extra_crossings() {
        // y = 0 strip of width zero, with a redundant x <= 3 line crossing it.
        let err = Polygon::new(vec![
            HalfPlane::new(Rat::zero(), Rat::one(), rat(0)),
            HalfPlane::new(Rat::zero(), -Rat::one(), rat(0)),
            HalfPlane::new(-Rat::one(), Rat::zero(), rat(0)),
            HalfPlane::new(Rat::one(), Rat::zero(), rat(10)),
            HalfPlane::new(Rat::one(), Rat::zero(), rat(3)),
        ])
        .unwrap_err();
        assert_eq!(err, GeomError::Degenerate);
    }

    #[test]
    fn unbounded_strip_rejected() {
        let err = Polygon::new(vec![
            HalfPlane::new(Rat::one(), Rat::zero(), rat(1)),
            HalfPlane::new(-Rat::one(), Rat::zero(), rat(0)),
        ])
        .unwrap_err();
        assert_eq!(err, GeomError::Unbounded);
    }

    #[test]
    fn triangle_accepted() {
        let p = Polygon::new(vec![
            HalfPlane::new(Rat::zero(), -Rat::one(), rat(0)),
            HalfPlane::new(-Rat::one(), Rat::zero(), rat(0)),
            HalfPlane::new(Rat::one(), Rat::one(), rat(2)),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 3);
    }

    #[test]
    fn subset_and_interior_predicates() {
        let small = Polygon::rect_i(1, 1, 2, 2).unwrap();
        let big = Polygon::rect_i(0, 0, 10, 10).unwrap();
        let touching = Polygon::rect_i(0, 0, 2, 2).unwrap();
        assert!(small.subset_of(&big));
        assert!(small.inside_interior_of(&big));
        assert!(touching.subset_of(&big));
        assert!(!touching.inside_interior_of(&big));
        assert!(!big.subset_of(&small));
    }

    #[test]
    fn meets_and_interiors_meet() {
        let a = Polygon::rect_i(0, 0, 2, 2).unwrap();
        let b = Polygon::rect_i(2, 2, 4, 4).unwrap(); // corner contact at (2,2)
        let c = Polygon::rect_i(3, 3, 5, 5).unwrap();
        let d = Polygon::rect_i(1, 1, 3, 3).unwrap();
        assert!(a.meets(&b));
        assert!(!a.interiors_meet(&b));
        assert!(!a.meets(&c));
        assert!(a.meets(&d));
        assert!(a.interiors_meet(&d));
    }

    #[test]
    fn display_round_readable() {
        let p = Polygon::rect_i(6, 8, 23, 19).unwrap();
        assert_eq!(p.to_string(), "x >= 6 && x <= 23 && y >= 8 && y <= 19");
    }
}
