//! Cross-validation of the exact rational region classifier.
//!
//! Three independent checks over nine dimension/order combinations:
//! a floating-point winding-number oracle re-derives every verdict on large
//! random point sets, the adjoint-duality reflection must preserve verdicts,
//! and every labeled vertex is recomputed from scratch in exact arithmetic.

mod common;

use common::{q, vertex_formulas, FloatOracle, CASES, DENOM_BITS, POINTS_PER_CASE, SNAP};
use oscpot::regions::{vertices_exact, CaseGeometry, CaseId, Rat, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn vertex_table_reproduces_the_coordinate_formulas_exactly() {
    for &(n, (nu, de)) in &CASES {
        let alpha = q(nu, de);
        let table = vertices_exact(n, alpha).unwrap();
        for (label, expected) in vertex_formulas(n, alpha) {
            assert_eq!(
                table.get_exact(label),
                expected,
                "vertex {label} differs for n = {n}, alpha = {alpha}"
            );
        }
    }
}

#[test]
fn classifier_matches_the_float_oracle_on_random_points() {
    let denom = 1i128 << DENOM_BITS;
    for (case_idx, &(n, (nu, de))) in CASES.iter().enumerate() {
        let alpha = q(nu, de);
        let alpha_f = nu as f64 / de as f64;
        let geo = CaseGeometry::new(n, alpha).unwrap();
        let oracle = FloatOracle::new(n, alpha_f);
        assert_eq!(
            oracle.bounded_case,
            geo.bounded_case(),
            "active sufficiency clause differs for n = {n}, alpha = {alpha}"
        );

        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001 + case_idx as u64);
        let mut compared = 0usize;
        let mut skipped = 0usize;
        for _ in 0..POINTS_PER_CASE {
            let kx = rng.gen_range(0..=denom);
            let ky = rng.gen_range(0..=denom);
            let (x, y) = (q(kx, denom), q(ky, denom));
            let pf = (kx as f64 / denom as f64, ky as f64 / denom as f64);
            if oracle.boundary_distance(pf) < SNAP {
                skipped += 1;
                continue;
            }
            let got = geo.classify_point(x, y);
            let (status, case_id) = oracle.verdict(pf);
            assert_eq!(
                (got.status, got.case_id),
                (status, case_id),
                "verdict differs at ({x}, {y}) for n = {n}, alpha = {alpha}"
            );
            // The production classifier takes a float fast path well away
            // from boundaries; pin the all-rational predicates against the
            // oracle too, on a subsample.
            if compared % 4 == 0 {
                let exact = geo.classify_point_exact(x, y);
                assert_eq!(
                    (exact.status, exact.case_id),
                    (status, case_id),
                    "exact-path verdict differs at ({x}, {y}) for n = {n}, alpha = {alpha}"
                );
            }
            compared += 1;
        }
        // Dyadic samples land exactly on a clause boundary only with
        // probability ~2^-20 per line; the snap band must stay negligible.
        assert!(
            skipped < 100,
            "snap band swallowed {skipped} of {POINTS_PER_CASE} points (n = {n}, alpha = {alpha})"
        );
        assert!(compared > POINTS_PER_CASE - 100);
    }
}

#[test]
fn verdicts_are_invariant_under_the_duality_reflection() {
    let denom = 1i128 << DENOM_BITS;
    let one = q(1, 1);
    for (case_idx, &(n, (nu, de))) in CASES.iter().enumerate() {
        let geo = CaseGeometry::new(n, q(nu, de)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1_0002 + case_idx as u64);
        for _ in 0..20_000 {
            let x = q(rng.gen_range(0..=denom), denom);
            let y = q(rng.gen_range(0..=denom), denom);
            let direct = geo.classify_point(x, y);
            let dual = geo.classify_point(one - y, one - x);
            assert_eq!(
                (direct.status, direct.case_id),
                (dual.status, dual.case_id),
                "duality broken at ({x}, {y}) for n = {n}, alpha = {}",
                q(nu, de)
            );
        }
    }
}

#[test]
fn classification_throughput_supports_batch_streaming() {
    // The batch contract asks for >= 1e5 classifications per second on the
    // geometry alone; time the hexagon case, which has the most edges.
    let geo = CaseGeometry::new(3, q(17, 20)).unwrap();
    let denom = 1i128 << DENOM_BITS;
    let mut rng = ChaCha8Rng::seed_from_u64(0xbead_0003);
    let points: Vec<(Rat, Rat)> = (0..100_000)
        .map(|_| (q(rng.gen_range(0..=denom), denom), q(rng.gen_range(0..=denom), denom)))
        .collect();
    let start = std::time::Instant::now();
    let mut counts = [0usize; 3];
    for &(x, y) in &points {
        let v = geo.classify_point(x, y);
        counts[match v.status {
            Status::Bounded => 0,
            Status::Unbounded => 1,
            Status::Open => 2,
        }] += 1;
    }
    let elapsed = start.elapsed();
    assert!(counts.iter().all(|&c| c > 0), "degenerate sample: {counts:?}");
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "100k classifications took {elapsed:?}, below the 1e5/sec contract"
    );
}

#[test]
fn float_entry_points_agree_with_the_exact_path() {
    // The f64 front door (rationalize + classify) must agree with direct
    // rational classification on representative points of every status.
    use oscpot::regions::{classify, PlanePoint};
    let samples = [
        (3u32, 1.0, 0.5, 0.1, Status::Unbounded, Some(CaseId::II2)),
        (2, 1.0, 0.9, 0.05, Status::Unbounded, Some(CaseId::II2)),
        (2, 1.0, 0.7, 0.3, Status::Bounded, Some(CaseId::I3)),
        (3, 0.85, 0.68, 0.68, Status::Open, None),
        (3, 0.5, 0.4, 0.35, Status::Bounded, Some(CaseId::I1)),
        (3, 1.2, 0.55, 0.45, Status::Bounded, Some(CaseId::I4)),
    ];
    for (n, alpha, ip, iq, status, case_id) in samples {
        let v = classify(n, alpha, PlanePoint::new(ip, iq).unwrap()).unwrap();
        assert_eq!(
            (v.status, v.case_id),
            (status, case_id),
            "classify(n = {n}, alpha = {alpha}, ({ip}, {iq}))"
        );
    }
}
