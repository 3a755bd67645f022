use framelab::approxrep::{self, ScheduleInput};
use framelab::builtins;
use framelab::carleson::{self, CarlesonSeq, CarlesonSeqJson};
use framelab::frames::{self, Frame};
use framelab::hypercyclic::{self, PlanJson};
use framelab::seqspace::{self, Diagonal, OperatorSpec};
use framelab::SeqVec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn seqvec(max_index: usize) -> impl Strategy<Value = SeqVec> {
    prop::collection::vec((1..=max_index, complex()), 0..6).prop_map(|pairs| SeqVec::from_pairs(pairs).unwrap())
}

fn operator() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        Just(OperatorSpec::RightShift),
        Just(OperatorSpec::LeftShift),
        (1.01..3.0f64).prop_map(OperatorSpec::ScaledLeftShift),
        (1.01..3.0f64).prop_map(OperatorSpec::ScaledRightShift),
        prop::collection::vec(complex(), 1..8)
            .prop_map(|v| OperatorSpec::Diagonal(Diagonal::from_values("d", v).unwrap())),
        prop::collection::vec(complex(), 64)
            .prop_map(|v| OperatorSpec::dense(DMatrix::from_vec(8, 8, v)).unwrap()),
        (1.01..3.0f64).prop_map(|l| OperatorSpec::Composition(vec![
            OperatorSpec::ScaledLeftShift(l),
            OperatorSpec::RightShift
        ])),
    ]
}

/// Random frame for `C^d`: the basis plus `extra` random vectors.
fn frame(d: usize) -> impl Strategy<Value = Frame> {
    prop::collection::vec(prop::collection::vec(complex(), d), 0..4).prop_map(move |extra| {
        let mut els: Vec<SeqVec> = (1..=d).map(SeqVec::basis).collect();
        els.extend(extra.iter().map(|v| SeqVec::from_dense(v)));
        Frame::with_ambient("random", els, d).unwrap()
    })
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_is_linear(op in operator(), x in seqvec(8), y in seqvec(8), a in complex(), b in complex()) {
        let lhs = seqspace::apply(&op, &x.combine(a, &y, b)).unwrap();
        let rhs = seqspace::apply(&op, &x).unwrap().combine(a, &seqspace::apply(&op, &y).unwrap(), b);
        let scale = lhs.norm() + rhs.norm();
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn adjoint_is_consistent(op in operator(), x in seqvec(8), y in seqvec(8)) {
        let lhs = seqspace::apply(&op, &x).unwrap().inner(&y);
        let rhs = x.inner(&seqspace::apply(&op.adjoint(), &y).unwrap());
        prop_assert!(close(lhs, rhs, x.norm() * y.norm() * op.norm_bound()));
    }

    #[test]
    fn power_apply_matches_repeated_apply(op in operator(), x in seqvec(6), n in 0u64..6) {
        let mut v = x.clone();
        for _ in 0..n {
            v = seqspace::apply(&op, &v).unwrap();
        }
        let p = seqspace::power_apply(&op, n, &x).unwrap();
        prop_assert!(p.sub(&v).norm() <= 1e-10 * v.norm().max(1.0));
    }

    #[test]
    fn frame_inequality_holds(f in frame(4), v in prop::collection::vec(complex(), 4)) {
        let b = frames::frame_bounds(&f);
        let x = SeqVec::from_dense(&v);
        let s = f.bessel_sum(&x);
        let n = x.norm_sq();
        prop_assert!(s >= b.lower * n * (1.0 - 1e-10) - 1e-12);
        prop_assert!(s <= b.upper * n * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn double_dual_is_original(f in frame(4)) {
        let back = frames::canonical_dual(&frames::canonical_dual(&f).unwrap()).unwrap();
        for (a, b) in f.elements().iter().zip(back.elements()) {
            prop_assert!(a.approx_eq(b, 1e-8));
        }
    }

    #[test]
    fn dual_reconstructs(f in frame(3), v in prop::collection::vec(complex(), 3)) {
        let x = SeqVec::from_dense(&v);
        let (g, residual) = frames::reconstruct(&f, &frames::canonical_dual(&f).unwrap(), &x).unwrap();
        prop_assert!(residual <= 1e-9 * x.norm().max(1.0));
        prop_assert!(g.approx_eq(&x, 1e-9 * x.norm().max(1.0)));
    }

    #[test]
    fn excess_is_permutation_invariant(f in frame(4), seed in any::<u64>()) {
        let mut els = f.elements().to_vec();
        let len = els.len();
        for i in (1..len).rev() {
            els.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        let g = Frame::with_ambient("perm", els, 4).unwrap();
        prop_assert_eq!(frames::excess(&f), frames::excess(&g));
        prop_assert_eq!(frames::excess(&f), len - 4);
    }

    #[test]
    fn carleson_inf_is_permutation_invariant(alpha in 1.5..4.0f64, k in 2usize..12, rot in 0usize..12) {
        let seq = carleson::geometric_lambda(alpha, k).unwrap();
        let mut lambdas = seq.lambdas().to_vec();
        lambdas.rotate_left(rot % k);
        lambdas.reverse();
        let a = carleson::carleson_inf(seq.lambdas()).unwrap();
        let b = carleson::carleson_inf(&lambdas).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn epsilon_check_is_symmetric(f in frame(3), noise in prop::collection::vec(complex(), 3), eps in 0.01..0.5f64) {
        let g = Frame::with_ambient(
            "moved",
            f.elements().iter().enumerate().map(|(i, e)| e.add(&SeqVec::basis(i % 3 + 1).scale(noise[i % 3] * 0.05))).collect(),
            3,
        ).unwrap();
        let ab = frames::epsilon_approx_check(&f, &g, eps).unwrap();
        let ba = frames::epsilon_approx_check(&g, &f, eps).unwrap();
        prop_assert!((ab.synthesis_gap - ba.synthesis_gap).abs() <= 1e-12);
        prop_assert_eq!(ab.verdict, ba.verdict);
        prop_assert_eq!(ab.per_element_errors, ba.per_element_errors);
    }

    #[test]
    fn frame_json_round_trips(f in frame(3)) {
        let back = Frame::from_json_str(&f.to_json_string().unwrap()).unwrap();
        prop_assert_eq!(back.elements(), f.elements());
        prop_assert_eq!(back.ambient_dim(), f.ambient_dim());
    }

    #[test]
    fn carleson_json_round_trips(lams in prop::collection::vec((0.0..0.99f64, 0.0..std::f64::consts::TAU), 2..8)) {
        let lambdas: Vec<Complex64> = lams.iter().enumerate()
            .map(|(i, (r, t))| Complex64::from_polar(r * 0.5 + 0.4 * i as f64 / 8.0, *t))
            .collect();
        let Ok(seq) = CarlesonSeq::from_lambdas(lambdas) else { return Ok(()) };
        let text = serde_json::to_string(&seq.to_json()).unwrap();
        let json: CarlesonSeqJson = serde_json::from_str(&text).unwrap();
        let back = CarlesonSeq::from_json(&json).unwrap();
        prop_assert_eq!(back.lambdas(), seq.lambdas());
    }

    #[test]
    fn general_schedule_invariants(
        supports in prop::collection::vec(1usize..40, 1..12),
        upper in 1.0..8.0f64,
        lambda in 1.1..3.0f64,
        eps_frac in 0.01..0.99f64,
    ) {
        let k = supports.len() + 1;
        let input = ScheduleInput { supports: supports.clone(), lambda, upper, epsilon: eps_frac, lower: 1.0 };
        let s = approxrep::alpha_schedule_general(&input, k).unwrap();
        prop_assert!(s.is_strictly_increasing());
        for (i, w) in s.alphas.windows(2).enumerate() {
            let gap = (w[1] - w[0]) as f64;
            prop_assert!(gap >= supports[i] as f64);
            let l2 = lambda * lambda;
            let bound = upper * l2 / (l2 - 1.0) * lambda.powf(-2.0 * gap);
            prop_assert!(bound <= eps_frac / 2f64.powi(i as i32 + 1) * (1.0 + 1e-8));
        }
    }

    #[test]
    fn dyadic_supports_dominate(n in 1u32..4, j in 1u32..6, supports in prop::collection::vec(1usize..20, 1..15)) {
        let k = supports.len() + 1;
        let with = approxrep::alpha_schedule_dyadic(n, j, Some(&supports), k).unwrap();
        let without = approxrep::alpha_schedule_dyadic(n, j, None, k).unwrap();
        prop_assert!(with.is_strictly_increasing() && without.is_strictly_increasing());
        for (a, b) in with.alphas.iter().zip(&without.alphas) {
            prop_assert!(a >= b);
        }
        for (i, w) in with.alphas.windows(2).enumerate() {
            prop_assert!(w[1] - w[0] >= supports[i] as u64);
        }
    }

    #[test]
    fn hypercyclic_plans_meet_tolerances(
        targets in prop::collection::vec(seqvec(6), 1..6),
        a in 1.5..4.0f64,
        eps in 0.01..1.0f64,
    ) {
        let plan = hypercyclic::plan_hypercyclic_vector(&targets, a, eps).unwrap();
        let tols = plan.tolerances();
        for (k, e) in plan.certified_errors.iter().enumerate() {
            prop_assert!(*e <= tols[k] * (1.0 + 1e-12) + 1e-20, "k={} e={} tol={}", k, e, tols[k]);
        }
        let json = serde_json::to_string(&plan.to_json()).unwrap();
        let back: PlanJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, plan.to_json());
    }
}

#[test]
fn every_builtin_constructs_up_to_64() {
    for d in 1..=64 {
        for spec in [
            format!("onb({d})"),
            format!("doubled_onb({d})"),
            format!("scaled_basis({d})"),
            format!("riesz_perturbed({d}, 0.5)"),
        ] {
            let f = builtins::parse_builtin(&spec).unwrap();
            assert!(f.len() >= d, "{spec}");
        }
    }
    for k in 1..=64 {
        let f = builtins::parse_builtin(&format!("carleson(1.5, {k})")).unwrap();
        assert_eq!((f.len(), f.ambient_dim()), (2 * k, k));
    }
}

#[test]
fn geometric_two_hits_the_unit_circle_in_double_precision() {
    // 1 − 2^{-53} is the largest double below 1; 1 − 2^{-54} rounds to 1.
    assert!(builtins::parse_builtin("carleson(2, 53)").is_ok());
    assert!(builtins::parse_builtin("carleson(2, 54)").is_err());
}

#[test]
fn approximation_pipeline_certifies_random_riesz_frames() {
    for delta in [0.05, 0.1, 0.2] {
        let f = frames::riesz_perturbed(6, delta);
        let r = approxrep::approx_suborbit_pipeline(&f, 1.5, 0.1, approxrep::ScheduleKind::General).unwrap();
        assert!(r.all_certified());
        assert!(r.report.conclusions_hold(1e-10), "{delta}");
    }
}
