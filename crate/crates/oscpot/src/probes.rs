//! Scaling probes: regress measured grid norms against a scale ladder and
//! compare the fitted exponent with the predicted one.
//!
//! Three drivers share one report format.  `probe_blowup` feeds a family of
//! concentrating or spreading test functions through the full operator and
//! watches the norm ratio `‖K f_s‖_q / ‖f_s‖_p`: at an unbounded exponent
//! pair the ratio must grow along the ladder, at a bounded pair it must not.
//! `probe_g_lambda` measures how the norm of the oscillatory annulus
//! convolution decays as the frequency `λ` climbs, against the dispersive
//! bounds `λ^{-n/p'}` (matching exponents) and `λ^{-n/q}` (dual-line
//! exponents).  `probe_piece_norms` measures the growth of the dyadic piece
//! norms `‖S_ℓ f‖_p` in the piece index.  All probes are deterministic:
//! fixed grids, fixed evaluation order, no randomness, so reports and
//! campaign outputs reproduce bit for bit.

use serde::{Deserialize, Serialize};

use crate::dyadic::{apply_piece, embed_in_zero_extension, make_pieces, CutoffEta};
use crate::fit::{fit_linear, SlopeFit};
use crate::grid::{ball_indicator, GridFunction};
use crate::operator::{apply_g_lambda, apply_spectral, lp_norm, DIRECT_CELL_CAP};
use crate::regions::{classify, PlanePoint, Status};
use crate::symbol::PotentialParams;
use crate::{Complex64, Error, Result};

/// Default cell budget for blow-up probe grids (matches the direct-path cap:
/// the probe refuses to build anything larger and trims the ladder instead).
pub const BLOWUP_CELL_BUDGET: usize = DIRECT_CELL_CAP;

/// Default cell budget for the zero-extended grids of the piece-norm probe.
/// Piece supports grow like `2^ℓ`, so the extended grids are much larger
/// than the input; the budget caps memory, and piece indices whose extension
/// would exceed it are dropped from the fit.
pub const PIECE_CELL_BUDGET: usize = 1 << 24;

/// Floor used before taking logarithms of measured norms, so that exact
/// zeros (fully cancelled or underflowed values) stay finite in fits.
const LOG_FLOOR: f64 = 1e-300;

/// Residual cap above which a blow-up probe declines to report a verdict.
const BLOWUP_RESIDUAL_CAP: f64 = 0.5;

// ---------------------------------------------------------------------------
// Families of test functions.

/// Shape of the test-function family fed to the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Indicator of the ball `|x| ≤ s`.
    Ball,
    /// `e^{i θ·x}` times the indicator of `|x| ≤ s`, `θ` a unit vector.
    ModulatedBall,
    /// Indicator of a slab of extent `1` along `θ` and `√s` across it.
    KnappBox,
}

impl ProbeKind {
    fn name(self) -> &'static str {
        match self {
            ProbeKind::Ball => "ball",
            ProbeKind::ModulatedBall => "modulated_ball",
            ProbeKind::KnappBox => "knapp_box",
        }
    }
}

/// Whether the ladder is walked toward small scales or large ones.  The
/// fitted slope is always taken against the *refinement* direction, so a
/// growing ratio yields a positive slope for either setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderDirection {
    Shrinking,
    Growing,
}

/// A validated family of test functions over a scale ladder.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    kind: ProbeKind,
    scale_ladder: Vec<f64>,
    modulation: Option<Vec<f64>>,
    direction: LadderDirection,
    cell_budget: usize,
}

impl ProbeFamily {
    /// Validates the ladder (at least 4 positive, strictly increasing
    /// scales) and the modulation vector (unit length; required by
    /// `ModulatedBall`, optional orientation for `KnappBox`, absent for
    /// `Ball`).
    pub fn new(
        kind: ProbeKind,
        scale_ladder: Vec<f64>,
        modulation: Option<Vec<f64>>,
        direction: LadderDirection,
    ) -> Result<Self> {
        if scale_ladder.len() < 4 {
            return Err(Error::Domain {
                context: "ProbeFamily",
                message: format!(
                    "scale ladder needs at least 4 entries, got {}",
                    scale_ladder.len()
                ),
            });
        }
        for pair in scale_ladder.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::Domain {
                    context: "ProbeFamily",
                    message: format!(
                        "scale ladder must be strictly increasing, got {} then {}",
                        pair[0], pair[1]
                    ),
                });
            }
        }
        if !scale_ladder.iter().all(|&s| s.is_finite() && s > 0.0) {
            return Err(Error::Domain {
                context: "ProbeFamily",
                message: "scale ladder entries must be finite and positive".into(),
            });
        }
        match (&kind, &modulation) {
            (ProbeKind::Ball, Some(_)) => {
                return Err(Error::Domain {
                    context: "ProbeFamily",
                    message: "plain ball family takes no modulation vector".into(),
                });
            }
            (ProbeKind::ModulatedBall, None) => {
                return Err(Error::Domain {
                    context: "ProbeFamily",
                    message: "modulated ball family requires a modulation vector".into(),
                });
            }
            _ => {}
        }
        if let Some(theta) = &modulation {
            let norm: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
            if theta.is_empty() || (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Domain {
                    context: "ProbeFamily",
                    message: format!("modulation vector must have unit length, |θ| = {norm}"),
                });
            }
        }
        Ok(ProbeFamily {
            kind,
            scale_ladder,
            modulation,
            direction,
            cell_budget: BLOWUP_CELL_BUDGET,
        })
    }

    /// Replace the default cell budget.
    pub fn with_cell_budget(mut self, cell_budget: usize) -> Self {
        self.cell_budget = cell_budget;
        self
    }

    pub fn kind(&self) -> ProbeKind {
        self.kind
    }

    pub fn scale_ladder(&self) -> &[f64] {
        &self.scale_ladder
    }

    pub fn direction(&self) -> LadderDirection {
        self.direction
    }

    /// Sample the family member at scale `s` on a grid sized for it, or
    /// `None` when that grid would exceed the cell budget.
    fn sample(&self, dim: usize, s: f64) -> Result<Option<GridFunction>> {
        if let Some(theta) = &self.modulation {
            if theta.len() != dim {
                return Err(Error::Domain {
                    context: "ProbeFamily",
                    message: format!(
                        "modulation vector has dimension {}, grid needs {dim}",
                        theta.len()
                    ),
                });
            }
        }
        // Margin past the support: the kernel's unit wavelength plus room
        // for the near field, where the singular part of the image lives.
        let margin = 1.5;
        match self.kind {
            ProbeKind::Ball | ProbeKind::ModulatedBall => {
                let h = (s / 4.0).min(0.25);
                let (shape, origin) = match centered_grid(dim, s + margin, h, self.cell_budget) {
                    Some(g) => g,
                    None => return Ok(None),
                };
                let mut f = ball_indicator(shape, h, origin, &vec![0.0; dim], s)?;
                if let Some(theta) = &self.modulation {
                    f.modulate(theta);
                }
                Ok(Some(f))
            }
            ProbeKind::KnappBox => {
                let w = s.sqrt();
                let h = (w / 4.0).min(0.25);
                let bounding = 0.5 * (1.0 + (dim as f64 - 1.0) * s).sqrt();
                let (shape, origin) = match centered_grid(dim, bounding + margin, h, self.cell_budget)
                {
                    Some(g) => g,
                    None => return Ok(None),
                };
                let frame = orthonormal_frame(
                    self.modulation.as_deref().unwrap_or(&unit_axis(dim)),
                    dim,
                );
                GridFunction::from_fn(shape, h, origin, move |x| {
                    let along: f64 = x.iter().zip(&frame[0]).map(|(a, b)| a * b).sum();
                    if along.abs() > 0.5 {
                        return Complex64::new(0.0, 0.0);
                    }
                    for axis in &frame[1..] {
                        let t: f64 = x.iter().zip(axis).map(|(a, b)| a * b).sum();
                        if t.abs() > w / 2.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                    }
                    Complex64::new(1.0, 0.0)
                })
                .map(Some)
            }
        }
    }
}

/// Even, origin-centred grid of cell centres covering half-width `e`, or
/// `None` when the cell count would exceed `budget`.
fn centered_grid(dim: usize, e: f64, h: f64, budget: usize) -> Option<(Vec<usize>, Vec<f64>)> {
    let m = ((e / h).ceil() as usize).max(2);
    let side = 2 * m;
    let mut cells: usize = 1;
    for _ in 0..dim {
        cells = cells.checked_mul(side)?;
        if cells > budget {
            return None;
        }
    }
    let origin = vec![-((m as f64) - 0.5) * h; dim];
    Some((vec![side; dim], origin))
}

fn unit_axis(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = 1.0;
    e
}

/// Orthonormal frame whose first vector is `theta/|theta|`, completed by
/// Gram–Schmidt over the standard basis in index order (deterministic).
fn orthonormal_frame(theta: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let norm: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    let mut frame: Vec<Vec<f64>> = vec![theta.iter().map(|t| t / norm).collect()];
    for d in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[d] = 1.0;
        for b in &frame {
            let proj: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        let vn: f64 = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if vn > 1e-8 {
            for vi in &mut v {
                *vi /= vn;
            }
            frame.push(v);
        }
    }
    frame
}

// ---------------------------------------------------------------------------
// Slope reports.

/// Which way a measured slope must relate to its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeGate {
    /// Pass when `fitted_slope ≤ predicted_bound + tolerance`.
    UpperBound,
    /// Pass when `fitted_slope > predicted_bound + tolerance`.
    MustExceed,
}

/// Outcome of one slope measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    /// Least-squares slope of the measured log-norms over the ladder.
    pub fitted_slope: f64,
    /// Predicted exponent the slope is gated against.
    pub predicted_bound: f64,
    /// Slack added to the bound before gating.
    pub tolerance: f64,
    /// Direction of the gate.
    pub gate: SlopeGate,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
    /// True when every measured norm was zero: nothing to gate, the probe
    /// passes vacuously and `fitted_slope`/`residual` are reported as 0.
    pub vacuous: bool,
    /// Verdict, always equal to the gate applied to the fields above (or
    /// `true` when `vacuous`).
    pub pass: bool,
}

impl SlopeReport {
    fn evaluate(fit: &SlopeFit, predicted_bound: f64, tolerance: f64, gate: SlopeGate) -> Self {
        let threshold = predicted_bound + tolerance;
        let pass = match gate {
            SlopeGate::UpperBound => fit.slope <= threshold,
            SlopeGate::MustExceed => fit.slope > threshold,
        };
        SlopeReport {
            fitted_slope: fit.slope,
            predicted_bound,
            tolerance,
            gate,
            residual: fit.residual_rms,
            vacuous: false,
            pass,
        }
    }

    fn vacuous_pass(predicted_bound: f64, tolerance: f64, gate: SlopeGate) -> Self {
        SlopeReport {
            fitted_slope: 0.0,
            predicted_bound,
            tolerance,
            gate,
            residual: 0.0,
            vacuous: true,
            pass: true,
        }
    }

    /// The value the fitted slope is compared against.
    pub fn threshold(&self) -> f64 {
        self.predicted_bound + self.tolerance
    }

    /// Whether `pass` agrees with the other fields.
    pub fn is_consistent(&self) -> bool {
        if self.vacuous {
            return self.pass;
        }
        let expect = match self.gate {
            SlopeGate::UpperBound => self.fitted_slope <= self.threshold(),
            SlopeGate::MustExceed => self.fitted_slope > self.threshold(),
        };
        self.pass == expect
    }
}

/// One measured point of a probe run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LadderPoint {
    /// Ladder parameter: scale `s`, frequency `λ`, or piece index `ℓ`.
    pub parameter: f64,
    /// Input norm `‖f‖_p` on the probe grid.
    pub input_norm: f64,
    /// Output norm (`‖K f‖_q`, `‖G_λ f‖_q`, or `‖S_ℓ f‖_p`).
    pub output_norm: f64,
    /// `output_norm / input_norm`.
    pub ratio: f64,
}

/// A slope report together with the per-ladder measurements behind it.
#[derive(Debug, Clone)]
pub struct ProbeRun {
    pub points: Vec<LadderPoint>,
    pub report: SlopeReport,
}

/// Slack applied to slope gates; grids in three dimensions are necessarily
/// coarser, so their measurements get twice the slack.
fn dimensional_tolerance(base: f64, n: u32) -> f64 {
    if n <= 2 {
        base
    } else {
        2.0 * base
    }
}

fn invert_exponent(inv: f64) -> f64 {
    if inv == 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

/// Largest distance from the origin to any grid point of `f`.
fn bounding_radius(f: &GridFunction) -> f64 {
    let mut sq = 0.0;
    for d in 0..f.dim() {
        let lo = f.origin()[d];
        let hi = lo + (f.shape()[d] - 1) as f64 * f.spacing();
        let m = lo.abs().max(hi.abs());
        sq += m * m;
    }
    sq.sqrt()
}

// ---------------------------------------------------------------------------
// Blow-up probe.

/// Norm ratio `‖K f‖_q / ‖f‖_p` of the operator applied spectrally on `f`'s
/// own grid.  The ratio is invariant under rescaling the amplitude of `f`.
pub fn operator_ratio(p: &PotentialParams, f: &GridFunction, lp: f64, lq: f64) -> Result<f64> {
    let input = lp_norm(f, lp)?.value;
    if input == 0.0 {
        return Err(Error::Domain {
            context: "operator_ratio",
            message: "input function vanishes on its grid".into(),
        });
    }
    let image = apply_spectral(p, f)?;
    Ok(lp_norm(&image, lq)?.value / input)
}

/// Run the blow-up probe, returning both the measurements and the report.
///
/// The classification of `(1/p, 1/q)` fixes the gate: at an unbounded pair
/// the ratio must grow along the family's refinement direction
/// (slope > tolerance), at a bounded pair it must not (slope ≤ tolerance).
/// Ladder entries whose grid would exceed the family's cell budget are
/// dropped rather than computed under-resolved; fewer than three surviving
/// entries is a resolution error.  A point whose boundedness is not settled
/// by the classification yields an inconclusive error, as does a fit whose
/// residual exceeds the cap (the family does not cleanly witness either
/// behaviour).
pub fn probe_blowup_run(
    p: &PotentialParams,
    pt: PlanePoint,
    family: &ProbeFamily,
) -> Result<ProbeRun> {
    if p.alpha().im != 0.0 {
        return Err(Error::Domain {
            context: "probe_blowup",
            message: "mapping-region classification requires a real order".into(),
        });
    }
    let verdict = classify(p.n(), p.alpha().re, pt)?;
    let gate = match verdict.status {
        Status::Unbounded => SlopeGate::MustExceed,
        Status::Bounded => SlopeGate::UpperBound,
        Status::Open => {
            return Err(Error::Inconclusive {
                message: format!(
                    "({}, {}) lies in the region with no settled verdict; nothing to probe",
                    pt.inv_p, pt.inv_q
                ),
            });
        }
    };
    let lp = invert_exponent(pt.inv_p);
    let lq = invert_exponent(pt.inv_q);
    let dim = p.n() as usize;
    let mut points = Vec::new();
    for &s in &family.scale_ladder {
        let f = match family.sample(dim, s)? {
            Some(f) => f,
            None => continue,
        };
        let input = lp_norm(&f, lp)?.value;
        if input == 0.0 {
            return Err(Error::Inconclusive {
                message: format!("family member at scale {s} vanished on its grid"),
            });
        }
        let image = apply_spectral(p, &f)?;
        let output = lp_norm(&image, lq)?.value;
        points.push(LadderPoint { parameter: s, input_norm: input, output_norm: output, ratio: output / input });
    }
    if points.len() < 3 {
        return Err(Error::Resolution {
            message: format!(
                "cell budget {} left {} resolvable ladder entries; need at least 3",
                family.cell_budget,
                points.len()
            ),
        });
    }
    let samples: Vec<(f64, f64)> = points
        .iter()
        .map(|pt| {
            let t = match family.direction {
                LadderDirection::Shrinking => -pt.parameter.log2(),
                LadderDirection::Growing => pt.parameter.log2(),
            };
            (t, pt.ratio.max(LOG_FLOOR).log2())
        })
        .collect();
    let fit = fit_linear(&samples)?;
    if fit.residual_rms > BLOWUP_RESIDUAL_CAP {
        return Err(Error::Inconclusive {
            message: format!(
                "ratio fit residual {:.3} exceeds {BLOWUP_RESIDUAL_CAP}; \
                 this family does not cleanly witness either behaviour",
                fit.residual_rms
            ),
        });
    }
    let tolerance = dimensional_tolerance(0.1, p.n());
    let report = SlopeReport::evaluate(&fit, 0.0, tolerance, gate);
    Ok(ProbeRun { points, report })
}

/// Blow-up probe: measure the operator norm ratio along the family and gate
/// its growth against the point's classification.
pub fn probe_blowup(
    p: &PotentialParams,
    pt: PlanePoint,
    family: &ProbeFamily,
) -> Result<SlopeReport> {
    Ok(probe_blowup_run(p, pt, family)?.report)
}

/// Search the standard witness families (shrinking balls, growing balls,
/// growing modulated balls) for one whose ratio grows at an unbounded point.
///
/// Returns the first passing family.  Families that fail their own
/// preconditions (budget, residual) are skipped; if none passes, the result
/// is an inconclusive error — absence of a witness is not a refutation.
pub fn blowup_witness_search(
    p: &PotentialParams,
    pt: PlanePoint,
) -> Result<(ProbeKind, LadderDirection, SlopeReport)> {
    if p.alpha().im != 0.0 {
        return Err(Error::Domain {
            context: "blowup_witness_search",
            message: "mapping-region classification requires a real order".into(),
        });
    }
    let verdict = classify(p.n(), p.alpha().re, pt)?;
    if verdict.status != Status::Unbounded {
        return Err(Error::Domain {
            context: "blowup_witness_search",
            message: format!("witness search expects an unbounded point, got {}", verdict.status),
        });
    }
    let shrink: Vec<f64> = vec![1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0];
    let grow: Vec<f64> = vec![1.0, 2.0, 4.0, 8.0];
    let theta = unit_axis(p.n() as usize);
    let candidates = [
        (ProbeKind::Ball, LadderDirection::Shrinking, shrink, None),
        (ProbeKind::Ball, LadderDirection::Growing, grow.clone(), None),
        (ProbeKind::ModulatedBall, LadderDirection::Growing, grow, Some(theta)),
    ];
    let mut notes = Vec::new();
    for (kind, direction, ladder, modulation) in candidates {
        let family = ProbeFamily::new(kind, ladder, modulation, direction)?;
        match probe_blowup(p, pt, &family) {
            Ok(report) if report.pass => return Ok((kind, direction, report)),
            Ok(report) => notes.push(format!(
                "{} {:?}: slope {:.3} did not exceed {:.3}",
                kind.name(),
                direction,
                report.fitted_slope,
                report.threshold()
            )),
            Err(e) => notes.push(format!("{} {direction:?}: {e}", kind.name())),
        }
    }
    Err(Error::Inconclusive {
        message: format!(
            "no standard family witnessed ratio growth at ({}, {}); this does not refute \
             unboundedness [{}]",
            pt.inv_p,
            pt.inv_q,
            notes.join("; ")
        ),
    })
}

// ---------------------------------------------------------------------------
// Oscillatory annulus decay probe.

/// Predicted decay exponent of `‖G_λ f‖_q / ‖f‖_p` in `λ`, after checking
/// that `(p, q)` sits in one of the two covered exponent families.
fn g_lambda_predicted(n: u32, p: f64, q: f64) -> Result<f64> {
    if !(2..=3).contains(&n) {
        return Err(Error::Domain {
            context: "probe_g_lambda",
            message: format!("dimension n = {n} outside the supported range 2..=3"),
        });
    }
    if !p.is_finite() || p < 1.0 || q < 1.0 {
        return Err(Error::Domain {
            context: "probe_g_lambda",
            message: format!("exponents p = {p}, q = {q} must satisfy p, q >= 1"),
        });
    }
    let nf = f64::from(n);
    let pprime = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    if (q - p).abs() <= 1e-12 * p {
        // Matching exponents: bound `λ^{-n/p'}` holds for p up to the
        // dimension-dependent cap (strict in two dimensions).
        let cap = if n == 2 { 4.0 / 3.0 } else { (2.0 * nf + 2.0) / (nf + 3.0) };
        let ok = if n == 2 { p < cap } else { p <= cap + 1e-12 };
        if !ok {
            return Err(Error::Domain {
                context: "probe_g_lambda",
                message: format!("matching exponents p = q = {p} exceed the covered range (max {cap})"),
            });
        }
        Ok(-nf * (1.0 - 1.0 / p))
    } else {
        // Dual-line exponents: q pinned to p' by the dimension.
        if p > 2.0 {
            return Err(Error::Domain {
                context: "probe_g_lambda",
                message: format!("dual-line probe needs 1 <= p <= 2, got {p}"),
            });
        }
        let expected_q =
            if n == 2 { 3.0 * pprime } else { (nf + 1.0) * pprime / (nf - 1.0) };
        let ok = if expected_q.is_infinite() {
            q.is_infinite()
        } else {
            (q - expected_q).abs() <= 1e-9 * expected_q
        };
        if !ok {
            return Err(Error::Domain {
                context: "probe_g_lambda",
                message: format!(
                    "q = {q} is not the dual-line exponent {expected_q} for p = {p} in dimension {n}"
                ),
            });
        }
        Ok(if q.is_infinite() { 0.0 } else { -nf / q })
    }
}

/// Run the annulus decay probe, returning measurements and report.
///
/// `f` is convolved with `e^{iλ|y|} ψ(|y|)` for each ladder frequency, `ψ`
/// the standard smooth bump on the annulus `1/2 < |y| < 2`; the norm ratio
/// is regressed against `log₂ λ` and gated from above by the predicted
/// exponent.  The grid must resolve the largest frequency (four cells per
/// wavelength), otherwise a resolution error propagates.
pub fn probe_g_lambda_run(
    n: u32,
    p: f64,
    q: f64,
    lambda_ladder: &[f64],
    f: &GridFunction,
) -> Result<ProbeRun> {
    let predicted = g_lambda_predicted(n, p, q)?;
    let tolerance = dimensional_tolerance(0.1, n);
    if f.dim() != n as usize {
        return Err(Error::Domain {
            context: "probe_g_lambda",
            message: format!("grid dimension {} does not match n = {n}", f.dim()),
        });
    }
    if lambda_ladder.len() < 4
        || lambda_ladder.windows(2).any(|w| !(w[0] < w[1]))
        || !lambda_ladder.iter().all(|&l| l.is_finite() && l > 0.0)
    {
        return Err(Error::Domain {
            context: "probe_g_lambda",
            message: "frequency ladder must be at least 4 strictly increasing positive values"
                .into(),
        });
    }
    let input = lp_norm(f, p)?.value;
    if input == 0.0 {
        return Ok(ProbeRun {
            points: lambda_ladder
                .iter()
                .map(|&l| LadderPoint { parameter: l, input_norm: 0.0, output_norm: 0.0, ratio: 0.0 })
                .collect(),
            report: SlopeReport::vacuous_pass(predicted, tolerance, SlopeGate::UpperBound),
        });
    }
    let eta = CutoffEta::exponential_glue();
    let psi = move |r: f64| eta.eval(r) - eta.eval(2.0 * r);
    // The image extends two units past the input's support; extend the grid
    // so the norm sees all of it.
    let extended = embed_in_zero_extension(f, bounding_radius(f) + 2.0 + f.spacing())?;
    let mut points = Vec::new();
    for &lambda in lambda_ladder {
        let image = apply_g_lambda(lambda, &psi, &extended)?;
        let output = lp_norm(&image, q)?.value;
        points.push(LadderPoint {
            parameter: lambda,
            input_norm: input,
            output_norm: output,
            ratio: output / input,
        });
    }
    let samples: Vec<(f64, f64)> = points
        .iter()
        .map(|pt| (pt.parameter.log2(), pt.ratio.max(LOG_FLOOR).log2()))
        .collect();
    let fit = fit_linear(&samples)?;
    let report = SlopeReport::evaluate(&fit, predicted, tolerance, SlopeGate::UpperBound);
    Ok(ProbeRun { points, report })
}

/// Annulus decay probe: `‖G_λ f‖_q / ‖f‖_p` regressed against `log₂ λ`.
pub fn probe_g_lambda(
    n: u32,
    p: f64,
    q: f64,
    lambda_ladder: &[f64],
    f: &GridFunction,
) -> Result<SlopeReport> {
    Ok(probe_g_lambda_run(n, p, q, lambda_ladder, f)?.report)
}

// ---------------------------------------------------------------------------
// Piece-norm probe.

/// Predicted growth exponent of `‖S_ℓ f‖_p` in `ℓ` (base-2 logarithm per
/// unit of `ℓ`), after checking `p` is covered: either `p = 2` or `p` in the
/// low range where the matching-exponent annulus bound applies.
fn piece_norm_predicted(p: &PotentialParams, lp: f64) -> Result<f64> {
    let nf = p.nf();
    if (lp - 2.0).abs() <= 1e-12 {
        return Ok(p.alpha().re - (nf - 1.0) / 2.0);
    }
    let cap = if p.n() == 2 { 4.0 / 3.0 } else { (2.0 * nf + 2.0) / (nf + 3.0) };
    let ok = if p.n() == 2 { (1.0..cap).contains(&lp) } else { lp >= 1.0 && lp <= cap + 1e-12 };
    if !ok {
        return Err(Error::Domain {
            context: "probe_piece_norms",
            message: format!(
                "exponent p = {lp} outside the covered set (p = 2 or 1 <= p < {cap})"
            ),
        });
    }
    Ok(p.alpha().re - nf * (1.0 - 1.0 / lp))
}

/// Run the piece-norm probe, returning measurements and report.
///
/// Each requested piece is applied to `f` on a zero-extended grid covering
/// the full image support, and `log₂ ‖S_ℓ f‖_p` is regressed against `ℓ`.
/// Pieces whose extended grid would exceed the cell budget are dropped; if
/// fewer than two survive, that is a resolution error.
pub fn probe_piece_norms_run(
    p: &PotentialParams,
    lp: f64,
    ell_range: &[u32],
    f: &GridFunction,
) -> Result<ProbeRun> {
    let predicted = piece_norm_predicted(p, lp)?;
    let tolerance = 0.15;
    if f.dim() != p.n() as usize {
        return Err(Error::Domain {
            context: "probe_piece_norms",
            message: format!("grid dimension {} does not match n = {}", f.dim(), p.n()),
        });
    }
    if ell_range.len() < 2
        || ell_range.windows(2).any(|w| !(w[0] < w[1]))
        || !ell_range.iter().all(|&l| (1..=12).contains(&l))
    {
        return Err(Error::Domain {
            context: "probe_piece_norms",
            message: "piece range must be at least 2 strictly increasing indices within 1..=12"
                .into(),
        });
    }
    if f.spacing() > 0.25 {
        return Err(Error::Resolution {
            message: format!(
                "spacing {} too coarse to resolve the pieces' unit-frequency oscillation \
                 (need <= 0.25)",
                f.spacing()
            ),
        });
    }
    if f.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Ok(ProbeRun {
            points: ell_range
                .iter()
                .map(|&l| LadderPoint {
                    parameter: f64::from(l),
                    input_norm: 0.0,
                    output_norm: 0.0,
                    ratio: 0.0,
                })
                .collect(),
            report: SlopeReport::vacuous_pass(predicted, tolerance, SlopeGate::UpperBound),
        });
    }
    let input = lp_norm(f, lp)?.value;
    let eta = CutoffEta::exponential_glue();
    let pieces = make_pieces(p, &eta, u32::from(*ell_range.last().unwrap()));
    let rf = bounding_radius(f);
    let h = f.spacing();
    let mut points = Vec::new();
    for &ell in ell_range {
        let reach = 2f64.powi(ell as i32 + 1) + rf + h;
        // Upper bound on the extended cell count, to respect the budget
        // without allocating first.
        let per_axis_growth = 2 * (reach / h).ceil() as usize + 2;
        let mut cells: usize = 1;
        let mut fits = true;
        for d in 0..f.dim() {
            match cells.checked_mul(f.shape()[d] + per_axis_growth) {
                Some(c) if c <= PIECE_CELL_BUDGET => cells = c,
                _ => {
                    fits = false;
                    break;
                }
            }
        }
        if !fits {
            continue;
        }
        let extended = embed_in_zero_extension(f, reach)?;
        let image = apply_piece(&pieces[ell as usize], &extended)?;
        let output = lp_norm(&image, lp)?.value;
        points.push(LadderPoint {
            parameter: f64::from(ell),
            input_norm: input,
            output_norm: output,
            ratio: output / input,
        });
    }
    if points.len() < 2 {
        return Err(Error::Resolution {
            message: format!(
                "cell budget {PIECE_CELL_BUDGET} left {} computable pieces; need at least 2",
                points.len()
            ),
        });
    }
    let samples: Vec<(f64, f64)> = points
        .iter()
        .map(|pt| (pt.parameter, pt.output_norm.max(LOG_FLOOR).log2()))
        .collect();
    let fit = fit_linear(&samples)?;
    let report = SlopeReport::evaluate(&fit, predicted, tolerance, SlopeGate::UpperBound);
    Ok(ProbeRun { points, report })
}

/// Piece-norm probe: `log₂ ‖S_ℓ f‖_p` regressed against `ℓ`.
pub fn probe_piece_norms(
    p: &PotentialParams,
    lp: f64,
    ell_range: &[u32],
    f: &GridFunction,
) -> Result<SlopeReport> {
    Ok(probe_piece_norms_run(p, lp, ell_range, f)?.report)
}

/// Smooth compactly supported radial bump `exp(1 − 1/(1 − (|x|/radius)²))`
/// (peak 1 at the origin, identically 0 outside the ball), sampled on an
/// origin-centred grid just covering its support.
pub fn smooth_bump(dim: usize, radius: f64, spacing: f64) -> Result<GridFunction> {
    if !(radius > 0.0) || !(spacing > 0.0) {
        return Err(Error::Domain {
            context: "smooth_bump",
            message: format!("radius = {radius} and spacing = {spacing} must be positive"),
        });
    }
    let (shape, origin) = centered_grid(dim, radius + spacing, spacing, usize::MAX)
        .expect("unbounded budget");
    GridFunction::from_fn(shape, spacing, origin, move |x| {
        let t2: f64 = x.iter().map(|a| a * a).sum::<f64>() / (radius * radius);
        if t2 >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((1.0 - 1.0 / (1.0 - t2)).exp(), 0.0)
        }
    })
}

// ---------------------------------------------------------------------------
// Campaigns: config file in, CSV + JSON out.

/// One probe request in a campaign file.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeSpec {
    /// Operator-ratio blow-up probe at a classified exponent pair.
    Blowup {
        n: u32,
        alpha: f64,
        inv_p: f64,
        inv_q: f64,
        family: ProbeKind,
        direction: LadderDirection,
        ladder: Vec<f64>,
        #[serde(default)]
        modulation: Option<Vec<f64>>,
        #[serde(default)]
        cell_budget: Option<usize>,
    },
    /// Annulus decay probe on a standard smooth bump.
    GLambda {
        n: u32,
        p: f64,
        q: f64,
        ladder: Vec<f64>,
        #[serde(default)]
        spacing: Option<f64>,
        #[serde(default)]
        bump_radius: Option<f64>,
    },
    /// Piece-norm probe on a standard smooth bump.
    PieceNorms {
        n: u32,
        alpha: f64,
        p: f64,
        ell: Vec<u32>,
        #[serde(default)]
        spacing: Option<f64>,
        #[serde(default)]
        bump_radius: Option<f64>,
    },
}

impl ProbeSpec {
    fn kind_name(&self) -> &'static str {
        match self {
            ProbeSpec::Blowup { .. } => "blowup",
            ProbeSpec::GLambda { .. } => "g_lambda",
            ProbeSpec::PieceNorms { .. } => "piece_norms",
        }
    }
}

/// A parsed campaign: a list of probes to run in order.
#[derive(Debug, Clone, Deserialize)]
pub struct CampaignConfig {
    #[serde(default)]
    pub probe: Vec<ProbeSpec>,
}

/// Parse a campaign from TOML text.
pub fn parse_campaign(text: &str) -> Result<CampaignConfig> {
    toml::from_str(text).map_err(|e| Error::Serialization { message: e.to_string() })
}

/// Summary of one probe of a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeOutcome {
    /// Position in the campaign file.
    pub index: usize,
    pub kind: &'static str,
    /// `"pass"`, `"fail"`, `"inconclusive"`, or `"error"`.
    pub status: &'static str,
    /// The slope report, when the probe ran to completion.
    pub report: Option<SlopeReport>,
    /// Error or inconclusive message, when it did not.
    pub detail: Option<String>,
}

/// All results of a campaign run.
#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub outcomes: Vec<ProbeOutcome>,
    rows: Vec<(usize, &'static str, LadderPoint)>,
}

impl CampaignResult {
    /// One CSV row per measured ladder entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe,kind,parameter,input_norm,output_norm,ratio\n");
        for (index, kind, pt) in &self.rows {
            out.push_str(&format!(
                "{index},{kind},{},{},{},{}\n",
                pt.parameter, pt.input_norm, pt.output_norm, pt.ratio
            ));
        }
        out
    }

    /// JSON array with one summary object per probe.
    pub fn summary_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.outcomes)
            .map_err(|e| Error::Serialization { message: e.to_string() })
    }
}

fn run_spec(spec: &ProbeSpec) -> Result<ProbeRun> {
    match spec {
        ProbeSpec::Blowup {
            n,
            alpha,
            inv_p,
            inv_q,
            family,
            direction,
            ladder,
            modulation,
            cell_budget,
        } => {
            let params = PotentialParams::new(*n, Complex64::new(*alpha, 0.0))?;
            let pt = PlanePoint::new(*inv_p, *inv_q)?;
            let mut fam =
                ProbeFamily::new(*family, ladder.clone(), modulation.clone(), *direction)?;
            if let Some(budget) = cell_budget {
                fam = fam.with_cell_budget(*budget);
            }
            probe_blowup_run(&params, pt, &fam)
        }
        ProbeSpec::GLambda { n, p, q, ladder, spacing, bump_radius } => {
            let lambda_max = ladder.iter().copied().fold(1.0, f64::max);
            let h = spacing
                .unwrap_or_else(|| (0.999 * std::f64::consts::PI / (2.0 * lambda_max)).min(0.25));
            let f = smooth_bump(*n as usize, bump_radius.unwrap_or(1.0), h)?;
            probe_g_lambda_run(*n, *p, *q, ladder, &f)
        }
        ProbeSpec::PieceNorms { n, alpha, p, ell, spacing, bump_radius } => {
            let params = PotentialParams::new(*n, Complex64::new(*alpha, 0.0))?;
            let f = smooth_bump(*n as usize, bump_radius.unwrap_or(1.0), spacing.unwrap_or(0.25))?;
            probe_piece_norms_run(&params, *p, ell, &f)
        }
    }
}

/// Run every probe of a campaign in order.  Individual probe failures are
/// recorded in the outcome list (inconclusive results are expressly not
/// campaign failures), so the campaign itself always completes.
pub fn run_campaign(cfg: &CampaignConfig) -> CampaignResult {
    let mut outcomes = Vec::new();
    let mut rows = Vec::new();
    for (index, spec) in cfg.probe.iter().enumerate() {
        let kind = spec.kind_name();
        match run_spec(spec) {
            Ok(run) => {
                for pt in &run.points {
                    rows.push((index, kind, *pt));
                }
                outcomes.push(ProbeOutcome {
                    index,
                    kind,
                    status: if run.report.pass { "pass" } else { "fail" },
                    report: Some(run.report),
                    detail: None,
                });
            }
            Err(Error::Inconclusive { message }) => outcomes.push(ProbeOutcome {
                index,
                kind,
                status: "inconclusive",
                report: None,
                detail: Some(message),
            }),
            Err(e) => outcomes.push(ProbeOutcome {
                index,
                kind,
                status: "error",
                report: None,
                detail: Some(e.to_string()),
            }),
        }
    }
    CampaignResult { outcomes, rows }
}

// ---------------------------------------------------------------------------
