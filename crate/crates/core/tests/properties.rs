use plap_core::barriers::{build_counterexample, counterexample_residual, hadamard_lower_bound, HadamardInput};
use plap_core::bvp::{solve_annulus_dirichlet, AnnulusProblem, Rhs};
use plap_core::exponents::{
    classify_regime, equation_critical, pohozaev_coefficient, serrin_critical, Operator, ProblemParams,
};
use plap_core::identities::{
    caccioppoli_check, moser_recursion_bound, recursion_bound_for_sequence, Cutoff, RecursionSpec,
};
use plap_core::radial::{p_laplacian_radial, EvalPoint, FnProfile, PowerBarrier, RadialProfile};
use plap_core::shooting::{classify_outcome, integrate_ivp, IvpSpec, Outcome, Sign};
use proptest::prelude::*;

fn high_dim() -> impl Strategy<Value = (u32, f64, f64)> {
    (2u32..=9).prop_flat_map(|n| (Just(n), 1.1..f64::from(n) - 0.05, 0.0..4.0))
}

fn smooth_point() -> impl Strategy<Value = EvalPoint> {
    (0.1..10.0f64, -3.0..3.0f64, 0.05..3.0f64, -3.0..3.0f64).prop_map(|(r, value, g, d2)| EvalPoint {
        r,
        value,
        d1: -g,
        d2,
    })
}

proptest! {
    #[test]
    fn exponents_are_ordered((n, p, gamma) in high_dim()) {
        let params = ProblemParams::unit(n, p, gamma, p).unwrap();
        let qs = serrin_critical(&params).unwrap();
        let qe = equation_critical(&params).unwrap();
        prop_assert!(p - 1.0 < qs && qs < qe);
        // The gap is exactly (p + gamma) / (N - p).
        let gap = (p + gamma) / (f64::from(n) - p);
        prop_assert!(((qe - qs) - gap).abs() <= 1e-12 * qe.max(1.0));
    }

    #[test]
    fn pohozaev_coefficient_changes_sign_at_equation_exponent((n, p, gamma) in high_dim(), t in 0.01..5.0f64) {
        let base = ProblemParams::unit(n, p, gamma, p).unwrap();
        let qe = equation_critical(&base).unwrap();
        prop_assert!(pohozaev_coefficient(&base.with_q(qe + t)).unwrap() > 0.0);
        let below = (p - 1.0) + (qe - p + 1.0) * (1.0 - t / 5.01);
        prop_assert!(pohozaev_coefficient(&base.with_q(below)).unwrap() < 0.0);
    }

    #[test]
    fn regime_flags_follow_exponents((n, p, gamma) in high_dim(), t in 0.0..3.0f64) {
        let base = ProblemParams::unit(n, p, gamma, p).unwrap();
        let qs = serrin_critical(&base).unwrap();
        let q = (p - 1.0) * 1.01 + t * qs;
        let reg = classify_regime(&base.with_q(q));
        prop_assert!(!reg.low_dimension);
        prop_assert_eq!(reg.inequality_nonexistence, q <= qs);
        prop_assert_eq!(reg.counterexample_exists, q > qs);
    }

    #[test]
    fn homogeneity_of_operator(pt in smooth_point(), n in 1u32..7, p in 1.2..5.0f64, c in 0.1..10.0f64) {
        let op = Operator::new(n, p).unwrap();
        let base = p_laplacian_radial(&pt, &op).unwrap();
        let scaled = EvalPoint { value: c * pt.value, d1: c * pt.d1, d2: c * pt.d2, ..pt };
        let lhs = p_laplacian_radial(&scaled, &op).unwrap();
        let rhs = c.powf(p - 1.0) * base;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1e-300));
    }

    #[test]
    fn dilation_of_operator(n in 1u32..7, p in 1.2..5.0f64, a in 0.3..2.0f64, s in 0.2..4.0f64, lam in 0.2..5.0f64) {
        prop_assume!(a * lam * s < 10.0);
        let op = Operator::new(n, p).unwrap();
        let u = |x: f64| {
            let e = (-a * x).exp();
            (e, -a * e, a * a * e)
        };
        let base = p_laplacian_radial(&FnProfile(u).eval(lam * s).unwrap(), &op).unwrap();
        let v = FnProfile(move |x: f64| {
            let (f, f1, f2) = u(lam * x);
            (f, lam * f1, lam * lam * f2)
        });
        let lhs = p_laplacian_radial(&v.eval(s).unwrap(), &op).unwrap();
        let rhs = lam.powf(p) * base;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn counterexample_is_supersolution((n, p, gamma) in high_dim(), t in 1.01..4.0f64, a in 0.1..10.0f64, r in -3.0..6.0f64) {
        let base = ProblemParams::unit(n, p, gamma, p).unwrap();
        let q = serrin_critical(&base).unwrap() * t;
        let params = ProblemParams::new(n, p, gamma, q, a).unwrap();
        let k = build_counterexample(&params).unwrap();
        prop_assert!(k.epsilon > 0.0 && k.alpha > 0.0 && k.c > 0.0);
        // Decay matches the fundamental solution up to epsilon / (p - 1).
        prop_assert!((k.alpha - (-op_lambda(n, p) - k.epsilon / (p - 1.0))).abs() < 1e-12 * k.alpha.max(1.0));
        let rep = counterexample_residual(&k, &params, 10f64.powf(r)).unwrap();
        prop_assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn hadamard_bound_interpolates_endpoints(n in 2u32..7, p in 1.2..7.0f64, r1 in 0.1..3.0f64, ratio in 1.1..100.0f64, m1 in 0.0..5.0f64, m2 in 0.0..5.0f64) {
        let op = Operator::new(n, p).unwrap();
        let r2 = r1 * ratio;
        let input = HadamardInput::new(r1, m1, r2, m2, &op).unwrap();
        prop_assert!((hadamard_lower_bound(&input, r1).unwrap() - m1).abs() <= 1e-12 * m1.max(m2).max(1.0));
        prop_assert!((hadamard_lower_bound(&input, r2).unwrap() - m2).abs() <= 1e-12 * m1.max(m2).max(1.0));
        let mid = hadamard_lower_bound(&input, (r1 * r2).sqrt()).unwrap();
        prop_assert!(mid >= m1.min(m2) - 1e-12 && mid <= m1.max(m2) + 1e-12);
    }

    #[test]
    fn extremal_recursion_respects_bound(c in 1.0..10.0f64, k in 1.1..5.0f64, phi0 in 0.05..20.0f64, n in 1u32..40) {
        let rep = moser_recursion_bound(&RecursionSpec::new(c, k, phi0, n).unwrap());
        prop_assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn perturbed_recursion_respects_bound(c in 1.0..10.0f64, k in 1.1..5.0f64, phi0 in 0.05..20.0f64, cuts in prop::collection::vec(0.0..3.0f64, 1..30)) {
        let spec = RecursionSpec::new(c, k, phi0, cuts.len() as u32).unwrap();
        let mut prev = phi0.ln();
        let mut logs = Vec::new();
        for (i, cut) in cuts.iter().enumerate() {
            let l = (i + 1) as f64 * c.ln() + k * prev - cut;
            logs.push(l);
            prev = l;
        }
        let rep = recursion_bound_for_sequence(&spec, &logs).unwrap();
        prop_assert!(rep.passed, "{rep:?}");
    }
}

fn op_lambda(n: u32, p: f64) -> f64 {
    Operator::new(n, p).unwrap().lambda()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_maximum_principle(n in 1u32..6, p in 1.3..4.0f64, ri in 0.2..2.0f64, ratio in 1.2..8.0f64, ua in -2.0..2.0f64, ub in -2.0..2.0f64) {
        let op = Operator::new(n, p).unwrap();
        let prob = AnnulusProblem::new(op, ri, ri * ratio, (ua, ub), Rhs::Zero, 128).unwrap();
        let sol = solve_annulus_dirichlet(&prob).unwrap();
        let (lo, hi) = (ua.min(ub), ua.max(ub));
        for (_, u) in sol.profile.iter() {
            prop_assert!(u >= lo - 1e-9 && u <= hi + 1e-9);
        }
    }

    #[test]
    fn nonnegative_source_lifts_solution(n in 1u32..6, p in 1.3..4.0f64, ri in 0.2..2.0f64, ratio in 1.2..8.0f64, f in 0.01..3.0f64) {
        let op = Operator::new(n, p).unwrap();
        let free = solve_annulus_dirichlet(&AnnulusProblem::new(op, ri, ri * ratio, (1.0, 0.0), Rhs::Zero, 128).unwrap()).unwrap();
        let forced = solve_annulus_dirichlet(&AnnulusProblem::new(op, ri, ri * ratio, (1.0, 0.0), Rhs::Constant(f), 128).unwrap()).unwrap();
        for ((_, a), (_, b)) in free.profile.iter().zip(forced.profile.iter()) {
            prop_assert!(b >= a - 1e-9);
        }
    }

    #[test]
    fn caccioppoli_is_homogeneous(n in 2u32..6, p in 1.3..4.0f64, c2 in 0.2..3.0f64, c1 in 0.0..3.0f64, t in 0.1..10.0f64) {
        let op = Operator::new(n, p).unwrap();
        let cutoff = Cutoff::new(1.0, 1.5, 2.5, 3.0).unwrap();
        let base = caccioppoli_check(&PowerBarrier::new(c2, c1, &op), &op, &cutoff).unwrap();
        let scaled = caccioppoli_check(&PowerBarrier::new(t * c2, t * c1, &op), &op, &cutoff).unwrap();
        prop_assert!(base.passed && scaled.passed);
        let f = t.powf(p);
        prop_assert!((scaled.lhs - f * base.lhs).abs() <= 1e-8 * scaled.lhs.abs().max(1e-300));
        prop_assert!((scaled.rhs - f * base.rhs).abs() <= 1e-8 * scaled.rhs.abs().max(1e-300));
    }

    #[test]
    fn shooting_is_monotone(n in 2u32..6, p in 1.5..3.0f64, gamma in 0.0..1.0f64, q_rel in 0.3..2.0f64, u0 in 0.3..3.0f64, plus in any::<bool>()) {
        prop_assume!(f64::from(n) > p + 0.2);
        let base = ProblemParams::unit(n, p, gamma, p).unwrap();
        let q = (p - 1.0) + q_rel * (equation_critical(&base).unwrap() - p + 1.0);
        let sign = if plus { Sign::EquationPlus } else { Sign::EquationMinus };
        let traj = integrate_ivp(&IvpSpec::new(base.with_q(q), u0, sign, 20.0).unwrap()).unwrap();
        let outcome = classify_outcome(&traj);
        for (&r, &w) in traj.r.iter().zip(&traj.w).skip(1) {
            if plus {
                prop_assert!(w > 0.0, "w = {w} at r = {r}");
            } else {
                prop_assert!(w < 0.0, "w = {w} at r = {r}");
            }
        }
        if plus {
            prop_assert!(matches!(outcome, Outcome::BlowsUp { .. } | Outcome::Indeterminate { .. }), "{outcome:?}");
        } else {
            prop_assert!(!matches!(outcome, Outcome::BlowsUp { .. }), "{outcome:?}");
        }
    }
}
