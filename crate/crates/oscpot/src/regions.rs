//! Exact geometry of the boundedness region in the `(1/p, 1/q)` square.
//!
//! The mapping properties of the oscillatory potential are organized around
//! seventeen labeled points of the unit square whose coordinates are rational
//! functions of the dimension `n` and the order `Re a`.  The classifier
//! evaluates, in order, three unboundedness clauses (closed corner triangles,
//! a closed lower triangle minus one open segment, and an open quadrilateral
//! active only for `(n-1)/2 < a < n`), then the sufficiency clause matching
//! the `(n, a)` range (an open polygon together with its listed open
//! segments), and reports `Open` when nothing fires — the remaining gap is a
//! genuinely open problem, not a computable answer.
//!
//! All geometric predicates run in exact `i128` rational arithmetic.
//! Floating-point entry points snap inputs to nearby rationals within 1e-12
//! (continued-fraction convergents, dyadic fallback), so decimal data with up
//! to ~9 fractional digits is classified exactly.

use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar used by the region geometry.
pub type Rat = Ratio<i128>;

fn q(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

fn qi(value: i128) -> Rat {
    Ratio::from_integer(value)
}

fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Snap a float to an exact rational: continued-fraction convergents until
/// the approximation error drops below 1e-12 (relative for large values),
/// falling back to the dyadic rounding `round(x·2^40)/2^40` for inputs with
/// no moderate-denominator convergent.
pub fn rationalize(x: f64) -> Result<Rat> {
    const TOL: f64 = 1e-12;
    const MAX_DEN: i128 = 1 << 40;
    if !x.is_finite() {
        return Err(Error::Domain {
            context: "regions::rationalize",
            message: format!("cannot rationalize {x}"),
        });
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let v = x.abs();
    if v <= TOL {
        return Ok(Rat::zero());
    }
    let scale = v.max(1.0);
    // Continued-fraction convergents p/q of v.
    let (mut p0, mut q0) = (1i128, 0i128);
    let (mut p1, mut q1) = (v.floor() as i128, 1i128);
    let mut frac = v - v.floor();
    for _ in 0..64 {
        if (p1 as f64 / q1 as f64 - v).abs() <= TOL * scale {
            return Ok(q(sign * p1, q1));
        }
        if frac <= 0.0 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a >= MAX_DEN as f64 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > MAX_DEN {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        frac = inv - a;
    }
    if (p1 as f64 / q1 as f64 - v).abs() <= TOL * scale {
        return Ok(q(sign * p1, q1));
    }
    let scaled = (v * MAX_DEN as f64).round() as i128;
    Ok(q(sign * scaled, MAX_DEN))
}

/// The seventeen labeled points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    O,
    E,
    F,
    L,
    A,
    APrime,
    H,
    HPrime,
    B,
    BPrime,
    C,
    CPrime,
    D,
    G,
    GPrime,
    P,
    PPrime,
}

/// All labels, in display order.
pub const ALL_LABELS: [Label; 17] = [
    Label::O,
    Label::E,
    Label::F,
    Label::L,
    Label::A,
    Label::APrime,
    Label::H,
    Label::HPrime,
    Label::B,
    Label::BPrime,
    Label::C,
    Label::CPrime,
    Label::D,
    Label::G,
    Label::GPrime,
    Label::P,
    Label::PPrime,
];

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::O => "O",
            Label::E => "E",
            Label::F => "F",
            Label::L => "L",
            Label::A => "A",
            Label::APrime => "A'",
            Label::H => "H",
            Label::HPrime => "H'",
            Label::B => "B",
            Label::BPrime => "B'",
            Label::C => "C",
            Label::CPrime => "C'",
            Label::D => "D",
            Label::G => "G",
            Label::GPrime => "G'",
            Label::P => "P",
            Label::PPrime => "P'",
        }
    }

    /// Partner under the adjoint duality `(x, y) ↦ (1-y, 1-x)`:
    /// each primed label pairs with its unprimed partner, `F` with `O`,
    /// and `E`, `L`, `D` are self-dual.
    pub fn dual(&self) -> Label {
        match self {
            Label::O => Label::F,
            Label::F => Label::O,
            Label::E => Label::E,
            Label::L => Label::L,
            Label::D => Label::D,
            Label::A => Label::APrime,
            Label::APrime => Label::A,
            Label::H => Label::HPrime,
            Label::HPrime => Label::H,
            Label::B => Label::BPrime,
            Label::BPrime => Label::B,
            Label::C => Label::CPrime,
            Label::CPrime => Label::C,
            Label::G => Label::GPrime,
            Label::GPrime => Label::G,
            Label::P => Label::PPrime,
            Label::PPrime => Label::P,
        }
    }

    fn index(&self) -> usize {
        ALL_LABELS.iter().position(|l| l == self).unwrap()
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A query point `(1/p, 1/q)` in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub inv_p: f64,
    pub inv_q: f64,
}

impl PlanePoint {
    /// Validates both coordinates in `[0, 1]`.
    pub fn new(inv_p: f64, inv_q: f64) -> Result<Self> {
        for (name, v) in [("inv_p", inv_p), ("inv_q", inv_q)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::Domain {
                    context: "PlanePoint",
                    message: format!("{name} = {v} must lie in [0, 1]"),
                });
            }
        }
        Ok(PlanePoint { inv_p, inv_q })
    }
}

/// Classification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Bounded,
    Unbounded,
    Open,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Bounded => "Bounded",
            Status::Unbounded => "Unbounded",
            Status::Open => "Open",
        })
    }
}

/// Which clause decided a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    II1,
    II2,
    II3,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseId::I1 => "I.1",
            CaseId::I2 => "I.2",
            CaseId::I3 => "I.3",
            CaseId::I4 => "I.4",
            CaseId::I5 => "I.5",
            CaseId::I6 => "I.6",
            CaseId::II1 => "II.1",
            CaseId::II2 => "II.2",
            CaseId::II3 => "II.3",
        })
    }
}

/// A classification with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionVerdict {
    pub status: Status,
    /// Which clause fired; `None` exactly when `status` is `Open`.
    pub case_id: Option<CaseId>,
}

/// The labeled points for one `(n, a)`, exact.
#[derive(Debug, Clone)]
pub struct VertexTable {
    n: u32,
    alpha: Rat,
    verts: Vec<(Rat, Rat)>,
}

impl VertexTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> Rat {
        self.alpha
    }

    /// Exact coordinates of a labeled point.  Coordinates can leave the unit
    /// square for labels whose clause is inactive at this `(n, a)` (e.g. `C`
    /// for small `n`); the classifier only consults labels within range.
    pub fn get_exact(&self, label: Label) -> (Rat, Rat) {
        self.verts[label.index()]
    }

    /// Coordinates of a labeled point as floats.
    pub fn get(&self, label: Label) -> (f64, f64) {
        let (x, y) = self.get_exact(label);
        (rat_to_f64(x), rat_to_f64(y))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, (f64, f64))> + '_ {
        ALL_LABELS.iter().map(move |&l| (l, self.get(l)))
    }
}

fn validate_domain(n: u32, alpha: Rat) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain {
            context: "regions",
            message: format!("dimension n = {n} must be at least 2"),
        });
    }
    if alpha <= Rat::zero() || alpha >= qi(n as i128) {
        return Err(Error::Domain {
            context: "regions",
            message: format!("order alpha = {alpha} must satisfy 0 < alpha < n = {n}"),
        });
    }
    Ok(())
}

fn build_vertices(n: u32, alpha: Rat) -> Vec<(Rat, Rat)> {
    let ni = n as i128;
    let a = alpha;
    let an = a / qi(ni); // a/n
    let half = q(1, 2);
    let one = Rat::one();
    let zero = Rat::zero();
    // (n-1)(n-a) / (n(n+1)) — the B-offset.
    let b_off = qi(ni - 1) * (qi(ni) - a) / qi(ni * (ni + 1));
    // 2a/(n-1) — the C-offset about the diagonal midline.
    let c_off = qi(2) * a / qi(ni - 1);
    let mut verts = vec![(zero, zero); 17];
    let mut set = |l: Label, x: Rat, y: Rat| verts[l.index()] = (x, y);
    set(Label::O, zero, zero);
    set(Label::E, one, zero);
    set(Label::F, one, one);
    set(Label::L, half, half);
    set(Label::A, one, one - an);
    set(Label::APrime, an, zero);
    set(Label::H, one - an, one - an);
    set(Label::HPrime, an, an);
    set(Label::B, one - b_off, one - an);
    set(Label::BPrime, an, b_off);
    set(Label::C, q(3, 2) - c_off, q(3, 2) - c_off);
    set(Label::CPrime, c_off - half, c_off - half);
    set(Label::D, (a + one) / qi(ni + 1), (qi(ni) - a) / qi(ni + 1));
    set(Label::G, q(ni + 3, 2 * ni + 2), one - an);
    set(Label::GPrime, an, q(ni - 1, 2 * ni + 2));
    set(Label::P, (qi(4) * a + qi(3 - ni)) / qi(2 * ni + 2), half);
    set(Label::PPrime, half, (qi(3 * ni - 1) - qi(4) * a) / qi(2 * ni + 2));
    verts
}

/// Exact vertex table.
pub fn vertices_exact(n: u32, alpha: Rat) -> Result<VertexTable> {
    validate_domain(n, alpha)?;
    Ok(VertexTable { n, alpha, verts: build_vertices(n, alpha) })
}

/// Vertex table from a float order (snapped to rational).
pub fn vertices(n: u32, alpha: f64) -> Result<VertexTable> {
    vertices_exact(n, rationalize(alpha)?)
}

// ---------------------------------------------------------------------------
// Exact planar predicates.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Inside,
    Boundary,
    Outside,
}

type RPoint = (Rat, Rat);

/// Sign of the cross product `(b - a) × (c - a)`.
fn orientation(a: &RPoint, b: &RPoint, c: &RPoint) -> i8 {
    let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    if cross.is_zero() {
        0
    } else if cross.is_positive() {
        1
    } else {
        -1
    }
}

fn on_closed_segment(a: &RPoint, b: &RPoint, p: &RPoint) -> bool {
    orientation(a, b, p) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

fn on_open_segment(a: &RPoint, b: &RPoint, p: &RPoint) -> bool {
    on_closed_segment(a, b, p) && p != a && p != b
}

/// Locate a point relative to a polygon, tolerating repeated vertices
/// (threshold orders collapse some vertices; consecutive duplicates and a
/// repeated closing vertex are dropped, and fully degenerate polygons are
/// handled as segments or points).
fn polygon_place(poly: &[RPoint], p: &RPoint) -> Place {
    let mut v: Vec<RPoint> = Vec::with_capacity(poly.len());
    for &pt in poly {
        if v.last() != Some(&pt) {
            v.push(pt);
        }
    }
    while v.len() >= 2 && v.first() == v.last() {
        v.pop();
    }
    match v.len() {
        0 => return Place::Outside,
        1 => return if *p == v[0] { Place::Boundary } else { Place::Outside },
        2 => {
            return if on_closed_segment(&v[0], &v[1], p) {
                Place::Boundary
            } else {
                Place::Outside
            }
        }
        _ => {}
    }
    let mut winding = 0i32;
    for i in 0..v.len() {
        let a = &v[i];
        let b = &v[(i + 1) % v.len()];
        if on_closed_segment(a, b, p) {
            return Place::Boundary;
        }
        if a.1 <= p.1 {
            if b.1 > p.1 && orientation(a, b, p) > 0 {
                winding += 1;
            }
        } else if b.1 <= p.1 && orientation(a, b, p) < 0 {
            winding -= 1;
        }
    }
    if winding != 0 {
        Place::Inside
    } else {
        Place::Outside
    }
}

// ---------------------------------------------------------------------------
// Floating-point fast path.
//
// Exact rational predicates cost microseconds per polygon; batch
// classification wants an order of magnitude less.  Every clause polygon is
// mirrored into f64 once per `CaseGeometry`.  A query point that keeps a
// safety margin from every mirrored edge is classified with plain
// winding-number tests: vertex rounding moves each edge by at most a few
// ulps (~1e-15 here), so far from the boundary the float verdict and the
// exact verdict coincide, and open/closed boundary semantics cannot fire.
// Points inside the margin fall back to the exact path.

type FPt = (f64, f64);

/// Safety margin of the float fast path.  Conservative by ~six orders of
/// magnitude over the worst-case rounding of mirrored vertices.
const FAST_PATH_MARGIN: f64 = 1e-9;

fn fcross(a: FPt, b: FPt, p: FPt) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Nonzero-winding containment; degenerate (zero-length) edges contribute
/// nothing, matching the exact path's vertex deduplication.
fn fwinding_inside(poly: &[FPt], p: FPt) -> bool {
    let mut winding = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if a.1 <= p.1 {
            if b.1 > p.1 && fcross(a, b, p) > 0.0 {
                winding += 1;
            }
        } else if b.1 <= p.1 && fcross(a, b, p) < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

fn fsegment_distance(a: FPt, b: FPt, p: FPt) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Float mirrors of all clause polygons, with exactly-coincident vertices
/// removed at build time.
#[derive(Debug, Clone)]
struct FastGeometry {
    corner_upper: Vec<FPt>,
    corner_lower: Vec<FPt>,
    below_critical: Vec<FPt>,
    /// Empty when the strip clause is inactive.
    strip: Vec<FPt>,
    bounded: Vec<FPt>,
    edges: Vec<(FPt, FPt)>,
}

impl FastGeometry {
    fn build(table: &VertexTable, bounded_polygon: &[Label], ii3_active: bool) -> Self {
        use Label::*;
        // Deduplicate by exact rational equality so threshold orders
        // (coincident labeled points) cannot leave zero-length edges whose
        // float images misbehave.
        let mirror = |labels: &[Label]| -> Vec<FPt> {
            let mut exact: Vec<RPoint> = Vec::with_capacity(labels.len());
            for &l in labels {
                let pt = table.get_exact(l);
                if exact.last() != Some(&pt) {
                    exact.push(pt);
                }
            }
            while exact.len() >= 2 && exact.first() == exact.last() {
                exact.pop();
            }
            exact.into_iter().map(|(x, y)| (rat_to_f64(x), rat_to_f64(y))).collect()
        };
        let corner_upper = mirror(&[H, A, F]);
        let corner_lower = mirror(&[HPrime, APrime, O]);
        let below_critical = mirror(&[APrime, A, E]);
        let strip = if ii3_active { mirror(&[B, BPrime, HPrime, H]) } else { Vec::new() };
        let bounded = mirror(bounded_polygon);
        let mut edges = Vec::new();
        for poly in [&corner_upper, &corner_lower, &below_critical, &strip, &bounded] {
            for i in 0..poly.len() {
                edges.push((poly[i], poly[(i + 1) % poly.len()]));
            }
        }
        FastGeometry { corner_upper, corner_lower, below_critical, strip, bounded, edges }
    }

    fn clear_of_boundaries(&self, p: FPt) -> bool {
        self.edges.iter().all(|&(a, b)| fsegment_distance(a, b, p) > FAST_PATH_MARGIN)
    }

    /// Verdict for a point outside the safety band, in clause order.  The
    /// open bounded segments all lie on mirrored polygon edges, so a clear
    /// point can never be on one.
    fn verdict(&self, p: FPt, bounded_case: CaseId) -> RegionVerdict {
        if fwinding_inside(&self.corner_upper, p) || fwinding_inside(&self.corner_lower, p) {
            return RegionVerdict { status: Status::Unbounded, case_id: Some(CaseId::II1) };
        }
        if fwinding_inside(&self.below_critical, p) {
            return RegionVerdict { status: Status::Unbounded, case_id: Some(CaseId::II2) };
        }
        if !self.strip.is_empty() && fwinding_inside(&self.strip, p) {
            return RegionVerdict { status: Status::Unbounded, case_id: Some(CaseId::II3) };
        }
        if fwinding_inside(&self.bounded, p) {
            return RegionVerdict { status: Status::Bounded, case_id: Some(bounded_case) };
        }
        RegionVerdict { status: Status::Open, case_id: None }
    }
}

// ---------------------------------------------------------------------------
// Clause geometry.

/// Which clauses a point triggers, evaluated independently (used by the
/// consistency scan; the classifier itself short-circuits in clause order).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseHits {
    pub unbounded: bool,
    pub bounded: bool,
}

/// Precomputed clause geometry for one `(n, a)`: build once, classify many.
#[derive(Debug, Clone)]
pub struct CaseGeometry {
    table: VertexTable,
    bounded_case: CaseId,
    bounded_polygon: Vec<Label>,
    bounded_segments: Vec<(Label, Label)>,
    ii3_active: bool,
    fast: FastGeometry,
}

impl CaseGeometry {
    pub fn new(n: u32, alpha: Rat) -> Result<Self> {
        let table = vertices_exact(n, alpha)?;
        let ni = n as i128;
        use CaseId::*;
        use Label::*;
        let (bounded_case, bounded_polygon, bounded_segments): (
            CaseId,
            Vec<Label>,
            Vec<(Label, Label)>,
        ) = if n == 2 {
            let half = q(1, 2);
            if alpha < half {
                (I1, vec![APrime, HPrime, H, A], vec![(APrime, A), (HPrime, H)])
            } else if alpha == half {
                (I5, vec![APrime, BPrime, B, A], vec![(APrime, A)])
            } else {
                (I3, vec![APrime, BPrime, B, A], vec![(APrime, A), (B, BPrime)])
            }
        } else {
            let t1 = q(ni * (ni - 1), 2 * (ni + 1));
            let t2 = q(ni - 1, 2);
            let t3 = q(ni, 2);
            if alpha < t1 {
                (I1, vec![APrime, HPrime, H, A], vec![(APrime, A), (HPrime, H)])
            } else if alpha < t2 {
                (I2, vec![APrime, GPrime, CPrime, C, G, A], vec![(APrime, A), (CPrime, C)])
            } else if alpha == t2 {
                (I6, vec![APrime, GPrime, L, G, A], vec![(APrime, A)])
            } else if alpha < t3 {
                (I4, vec![APrime, GPrime, PPrime, P, G, A], vec![(APrime, A), (PPrime, P)])
            } else {
                (I3, vec![APrime, BPrime, B, A], vec![(APrime, A), (B, BPrime)])
            }
        };
        let ii3_active = alpha > q(ni - 1, 2);
        let fast = FastGeometry::build(&table, &bounded_polygon, ii3_active);
        Ok(CaseGeometry { table, bounded_case, bounded_polygon, bounded_segments, ii3_active, fast })
    }

    pub fn table(&self) -> &VertexTable {
        &self.table
    }

    /// The sufficiency clause active at this `(n, a)`.
    pub fn bounded_case(&self) -> CaseId {
        self.bounded_case
    }

    /// Vertex labels of the active bounded polygon (open).
    pub fn bounded_polygon(&self) -> &[Label] {
        &self.bounded_polygon
    }

    /// Endpoint labels of the active bounded open segments.
    pub fn bounded_segments(&self) -> &[(Label, Label)] {
        &self.bounded_segments
    }

    /// Whether the open-quadrilateral unboundedness clause is active.
    pub fn quad_clause_active(&self) -> bool {
        self.ii3_active
    }

    fn v(&self, l: Label) -> RPoint {
        self.table.get_exact(l)
    }

    fn poly(&self, labels: &[Label]) -> Vec<RPoint> {
        labels.iter().map(|&l| self.v(l)).collect()
    }

    fn unbounded_case(&self, p: &RPoint) -> Option<CaseId> {
        use Label::*;
        // Closed corner triangles.
        if polygon_place(&self.poly(&[H, A, F]), p) != Place::Outside
            || polygon_place(&self.poly(&[HPrime, APrime, O]), p) != Place::Outside
        {
            return Some(CaseId::II1);
        }
        // Closed lower triangle minus the open segment (A A').
        if polygon_place(&self.poly(&[APrime, A, E]), p) != Place::Outside
            && !on_open_segment(&self.v(APrime), &self.v(A), p)
        {
            return Some(CaseId::II2);
        }
        // Open quadrilateral between the parallel segments BB' and H'H.
        if self.ii3_active
            && polygon_place(&self.poly(&[B, BPrime, HPrime, H]), p) == Place::Inside
        {
            return Some(CaseId::II3);
        }
        None
    }

    fn bounded_hit(&self, p: &RPoint) -> bool {
        if polygon_place(&self.poly(&self.bounded_polygon), p) == Place::Inside {
            return true;
        }
        self.bounded_segments
            .iter()
            .any(|&(s, t)| on_open_segment(&self.v(s), &self.v(t), p))
    }

    /// Classify one exact point.  Points clear of every clause boundary by
    /// [`FAST_PATH_MARGIN`] take the float mirror; the rest use exact
    /// rational predicates.
    pub fn classify_point(&self, x: Rat, y: Rat) -> RegionVerdict {
        let pf = (rat_to_f64(x), rat_to_f64(y));
        if self.fast.clear_of_boundaries(pf) {
            return self.fast.verdict(pf, self.bounded_case);
        }
        self.classify_point_exact(x, y)
    }

    /// Classify one exact point with rational predicates only.
    pub fn classify_point_exact(&self, x: Rat, y: Rat) -> RegionVerdict {
        let p = (x, y);
        if let Some(case) = self.unbounded_case(&p) {
            return RegionVerdict { status: Status::Unbounded, case_id: Some(case) };
        }
        if self.bounded_hit(&p) {
            return RegionVerdict { status: Status::Bounded, case_id: Some(self.bounded_case) };
        }
        RegionVerdict { status: Status::Open, case_id: None }
    }

    /// Evaluate the bounded and unbounded clause families independently.
    pub fn clause_hits(&self, x: Rat, y: Rat) -> ClauseHits {
        let p = (x, y);
        ClauseHits { unbounded: self.unbounded_case(&p).is_some(), bounded: self.bounded_hit(&p) }
    }
}

/// Classify with exact rational inputs.
pub fn classify_exact(n: u32, alpha: Rat, inv_p: Rat, inv_q: Rat) -> Result<RegionVerdict> {
    for (name, v) in [("inv_p", inv_p), ("inv_q", inv_q)] {
        if v < Rat::zero() || v > Rat::one() {
            return Err(Error::Domain {
                context: "regions::classify",
                message: format!("{name} = {v} must lie in [0, 1]"),
            });
        }
    }
    Ok(CaseGeometry::new(n, alpha)?.classify_point(inv_p, inv_q))
}

/// Classify with float inputs (snapped to rationals within 1e-12).
pub fn classify(n: u32, alpha: f64, pt: PlanePoint) -> Result<RegionVerdict> {
    classify_exact(n, rationalize(alpha)?, rationalize(pt.inv_p)?, rationalize(pt.inv_q)?)
}

// ---------------------------------------------------------------------------
// Radial-operator Lebesgue interval.

/// Open `L_p` exponent interval for the spherically truncated operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpInterval {
    pub p_low: f64,
    pub p_high: f64,
    /// Whether the interval is known to be sharp (matches the necessary
    /// condition `n/(n-a) < p < n/a`).
    pub sharp: bool,
}

/// The open `L_p` interval on which the truncated radial operator is
/// bounded, by `(n, a)` range:
///
/// * `n = 2`, `0 < a < 1/2` — `(2/(2-a), 2/a)`, sharp;
/// * `n ≥ 3`, `0 < a < n(n-1)/(2(n+1))` — `(n/(n-a), n/a)`, sharp;
/// * `n ≥ 3`, `n(n-1)/(2(n+1)) ≤ a < (n-1)/2` —
///   `(2(n-1)/(3(n-1)-4a), 2(n-1)/(4a-n+1))`, not known sharp;
/// * otherwise (`a ≥ (n-1)/2`) — domain error: no clause applies.
pub fn s_alpha_lp_interval(n: u32, alpha: f64) -> Result<LpInterval> {
    validate_domain(n, rationalize(alpha)?)?;
    let nf = n as f64;
    if n == 2 {
        if alpha < 0.5 {
            return Ok(LpInterval { p_low: 2.0 / (2.0 - alpha), p_high: 2.0 / alpha, sharp: true });
        }
    } else {
        let t1 = nf * (nf - 1.0) / (2.0 * (nf + 1.0));
        let t2 = (nf - 1.0) / 2.0;
        if alpha < t1 {
            return Ok(LpInterval { p_low: nf / (nf - alpha), p_high: nf / alpha, sharp: true });
        }
        if alpha < t2 {
            return Ok(LpInterval {
                p_low: 2.0 * (nf - 1.0) / (3.0 * (nf - 1.0) - 4.0 * alpha),
                p_high: 2.0 * (nf - 1.0) / (4.0 * alpha - nf + 1.0),
                sharp: false,
            });
        }
    }
    Err(Error::Domain {
        context: "s_alpha_lp_interval",
        message: format!("no boundedness clause applies for n = {n}, alpha = {alpha}"),
    })
}

// ---------------------------------------------------------------------------
// Polygon export.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub label: String,
    pub inv_p: f64,
    pub inv_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonEntry {
    pub name: String,
    pub case_id: String,
    pub role: String,
    pub closed: bool,
    pub vertices: Vec<VertexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEntry {
    pub name: String,
    pub case_id: String,
    pub role: String,
    pub open: bool,
    pub endpoints: Vec<VertexEntry>,
}

/// Serializable geometry of one `(n, a)` case: the active bounded polygon
/// and segments plus the unbounded sets, for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDocument {
    pub n: u32,
    pub alpha: f64,
    pub bounded_case: String,
    pub polygons: Vec<PolygonEntry>,
    pub segments: Vec<SegmentEntry>,
}

impl RegionDocument {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization {
            message: format!("region document: {e}"),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization {
            message: format!("region document: {e}"),
        })
    }
}

/// Export the active clause geometry as a structured document.
pub fn polygon_export(n: u32, alpha: f64) -> Result<RegionDocument> {
    let geo = CaseGeometry::new(n, rationalize(alpha)?)?;
    let entry = |l: Label| {
        let (x, y) = geo.table().get(l);
        VertexEntry { label: l.as_str().to_string(), inv_p: x, inv_q: y }
    };
    let poly_name = |ls: &[Label]| ls.iter().map(|l| l.as_str()).collect::<String>();
    use Label::*;
    let mut polygons = vec![PolygonEntry {
        name: poly_name(geo.bounded_polygon()),
        case_id: geo.bounded_case().to_string(),
        role: "bounded".into(),
        closed: false,
        vertices: geo.bounded_polygon().iter().map(|&l| entry(l)).collect(),
    }];
    for tri in [[H, A, F], [HPrime, APrime, O]] {
        polygons.push(PolygonEntry {
            name: poly_name(&tri),
            case_id: CaseId::II1.to_string(),
            role: "unbounded".into(),
            closed: true,
            vertices: tri.iter().map(|&l| entry(l)).collect(),
        });
    }
    polygons.push(PolygonEntry {
        name: poly_name(&[APrime, A, E]),
        case_id: CaseId::II2.to_string(),
        role: "unbounded".into(),
        closed: true,
        vertices: [APrime, A, E].iter().map(|&l| entry(l)).collect(),
    });
    if geo.quad_clause_active() {
        polygons.push(PolygonEntry {
            name: poly_name(&[B, BPrime, HPrime, H]),
            case_id: CaseId::II3.to_string(),
            role: "unbounded".into(),
            closed: false,
            vertices: [B, BPrime, HPrime, H].iter().map(|&l| entry(l)).collect(),
        });
    }
    let mut segments: Vec<SegmentEntry> = geo
        .bounded_segments()
        .iter()
        .map(|&(s, t)| SegmentEntry {
            name: format!("{}{}", s.as_str(), t.as_str()),
            case_id: geo.bounded_case().to_string(),
            role: "bounded".into(),
            open: true,
            endpoints: vec![entry(s), entry(t)],
        })
        .collect();
    segments.push(SegmentEntry {
        name: "AA'".into(),
        case_id: CaseId::II2.to_string(),
        role: "excluded".into(),
        open: true,
        endpoints: vec![entry(A), entry(APrime)],
    });
    Ok(RegionDocument {
        n,
        alpha,
        bounded_case: geo.bounded_case().to_string(),
        polygons,
        segments,
    })
}
