//! Shared fixtures for the integration suites: the nine dimension/order
//! combinations under cross-validation, and an independently implemented
//! floating-point winding-number oracle for region membership.
//!
//! Each integration binary compiles this module separately and uses a
//! different subset of it.
#![allow(dead_code)]

use num_rational::Ratio;
use oscpot::regions::{CaseId, Label, Rat, Status};

/// The nine dimension/order combinations exercised by the region suites;
/// orders are exact rationals.
pub const CASES: [(u32, (i128, i128)); 9] = [
    (2, (3, 10)),
    (2, (1, 2)),
    (2, (1, 1)),
    (3, (1, 2)),
    (3, (17, 20)),
    (3, (1, 1)),
    (3, (6, 5)),
    (3, (8, 5)),
    (3, (5, 2)),
];

pub const POINTS_PER_CASE: usize = 100_000;

/// Query points are dyadic rationals `k / 2^20`, exactly representable both
/// as `Rat` and as `f64`, so the exact classifier and the float oracle see
/// the same point.
pub const DENOM_BITS: u32 = 20;

/// Verdicts are only compared for points farther than this from every
/// polygon edge, where open/closed boundary semantics cannot matter.
pub const SNAP: f64 = 1e-9;

pub fn q(nu: i128, de: i128) -> Rat {
    Ratio::new(nu, de)
}

// ---------------------------------------------------------------------------
// Independent vertex recomputation, exact.

/// All seventeen labeled points, recomputed from their coordinate formulas.
pub fn vertex_formulas(n: u32, a: Rat) -> Vec<(Label, (Rat, Rat))> {
    let ni = q(n as i128, 1);
    let nm1 = q(n as i128 - 1, 1);
    let np1 = q(n as i128 + 1, 1);
    let two_n_two = q(2 * n as i128 + 2, 1);
    let one = q(1, 1);
    let half = q(1, 2);
    let zero = q(0, 1);
    let an = a / ni;
    let b_off = nm1 * (ni - a) / (ni * np1);
    let c_diag = q(2, 1) * a / nm1;
    vec![
        (Label::O, (zero, zero)),
        (Label::E, (one, zero)),
        (Label::F, (one, one)),
        (Label::L, (half, half)),
        (Label::A, (one, one - an)),
        (Label::APrime, (an, zero)),
        (Label::H, (one - an, one - an)),
        (Label::HPrime, (an, an)),
        (Label::B, (one - b_off, one - an)),
        (Label::BPrime, (an, b_off)),
        (Label::C, (q(3, 2) - c_diag, q(3, 2) - c_diag)),
        (Label::CPrime, (c_diag - half, c_diag - half)),
        (Label::D, ((a + one) / np1, (ni - a) / np1)),
        (Label::G, ((ni + q(3, 1)) / two_n_two, one - an)),
        (Label::GPrime, (an, nm1 / two_n_two)),
        (Label::P, ((q(4, 1) * a - ni + q(3, 1)) / two_n_two, half)),
        (Label::PPrime, (half, (q(3, 1) * ni - q(4, 1) * a - one) / two_n_two)),
    ]
}

// ---------------------------------------------------------------------------
// Floating-point winding-number oracle.

pub type FPoint = (f64, f64);

fn cross(a: FPoint, b: FPoint, p: FPoint) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Nonzero-winding containment; zero-length edges (degenerate vertices at
/// threshold orders) contribute nothing.
pub fn winding_inside(poly: &[FPoint], p: FPoint) -> bool {
    let mut winding = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if a.1 <= p.1 {
            if b.1 > p.1 && cross(a, b, p) > 0.0 {
                winding += 1;
            }
        } else if b.1 <= p.1 && cross(a, b, p) < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

pub fn segment_distance(a: FPoint, b: FPoint, p: FPoint) -> f64 {
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

/// Region membership re-derived in floating point: fresh vertex coordinates,
/// fresh clause selection, generic winding-number containment.
pub struct FloatOracle {
    pub unbounded_corner: [Vec<FPoint>; 2],
    pub below_critical: Vec<FPoint>,
    pub strip_quad: Option<Vec<FPoint>>,
    pub bounded: Vec<FPoint>,
    pub bounded_case: CaseId,
    pub edges: Vec<(FPoint, FPoint)>,
}

impl FloatOracle {
    pub fn new(n: u32, alpha: f64) -> Self {
        let nf = f64::from(n);
        let an = alpha / nf;
        let b_off = (nf - 1.0) * (nf - alpha) / (nf * (nf + 1.0));
        let c_diag = 2.0 * alpha / (nf - 1.0);
        let o = (0.0, 0.0);
        let e = (1.0, 0.0);
        let f = (1.0, 1.0);
        let l = (0.5, 0.5);
        let a_pt = (1.0, 1.0 - an);
        let a_pr = (an, 0.0);
        let h = (1.0 - an, 1.0 - an);
        let h_pr = (an, an);
        let b = (1.0 - b_off, 1.0 - an);
        let b_pr = (an, b_off);
        let c = (1.5 - c_diag, 1.5 - c_diag);
        let c_pr = (c_diag - 0.5, c_diag - 0.5);
        let g = ((nf + 3.0) / (2.0 * nf + 2.0), 1.0 - an);
        let g_pr = (an, (nf - 1.0) / (2.0 * nf + 2.0));
        let p = ((4.0 * alpha - nf + 3.0) / (2.0 * nf + 2.0), 0.5);
        let p_pr = (0.5, (3.0 * nf - 4.0 * alpha - 1.0) / (2.0 * nf + 2.0));

        let (bounded_case, bounded) = if n == 2 {
            if alpha < 0.5 {
                (CaseId::I1, vec![a_pr, h_pr, h, a_pt])
            } else if alpha == 0.5 {
                (CaseId::I5, vec![a_pr, b_pr, b, a_pt])
            } else {
                (CaseId::I3, vec![a_pr, b_pr, b, a_pt])
            }
        } else {
            let t1 = nf * (nf - 1.0) / (2.0 * (nf + 1.0));
            let t2 = (nf - 1.0) / 2.0;
            if alpha < t1 {
                (CaseId::I1, vec![a_pr, h_pr, h, a_pt])
            } else if alpha < t2 {
                (CaseId::I2, vec![a_pr, g_pr, c_pr, c, g, a_pt])
            } else if alpha == t2 {
                (CaseId::I6, vec![a_pr, g_pr, l, g, a_pt])
            } else if alpha < nf / 2.0 {
                (CaseId::I4, vec![a_pr, g_pr, p_pr, p, g, a_pt])
            } else {
                (CaseId::I3, vec![a_pr, b_pr, b, a_pt])
            }
        };

        // The unbounded strip lies between the parallel segments BB' and
        // H'H; traverse whichever vertex order keeps the quadrilateral
        // simple (H and H' swap diagonal order at alpha = n/2).
        let strip_quad = if 2.0 * alpha > nf - 1.0 {
            Some(if 2.0 * alpha < nf {
                vec![b, b_pr, h_pr, h]
            } else {
                vec![b, b_pr, h, h_pr]
            })
        } else {
            None
        };

        let unbounded_corner = [vec![h, a_pt, f], vec![h_pr, a_pr, o]];
        let below_critical = vec![a_pr, a_pt, e];

        let mut edges = Vec::new();
        let mut add_edges = |poly: &[FPoint]| {
            for i in 0..poly.len() {
                edges.push((poly[i], poly[(i + 1) % poly.len()]));
            }
        };
        add_edges(&unbounded_corner[0]);
        add_edges(&unbounded_corner[1]);
        add_edges(&below_critical);
        if let Some(quad) = &strip_quad {
            add_edges(quad);
        }
        add_edges(&bounded);

        FloatOracle { unbounded_corner, below_critical, strip_quad, bounded, bounded_case, edges }
    }

    /// Distance from the point to the nearest polygon edge.
    pub fn boundary_distance(&self, p: FPoint) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| segment_distance(a, b, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Verdict for a point that is not near any boundary, applying the same
    /// clause precedence the classifier documents.
    pub fn verdict(&self, p: FPoint) -> (Status, Option<CaseId>) {
        if self.unbounded_corner.iter().any(|tri| winding_inside(tri, p)) {
            return (Status::Unbounded, Some(CaseId::II1));
        }
        if winding_inside(&self.below_critical, p) {
            return (Status::Unbounded, Some(CaseId::II2));
        }
        if let Some(quad) = &self.strip_quad {
            if winding_inside(quad, p) {
                return (Status::Unbounded, Some(CaseId::II3));
            }
        }
        if winding_inside(&self.bounded, p) {
            return (Status::Bounded, Some(self.bounded_case));
        }
        (Status::Open, None)
    }
}
