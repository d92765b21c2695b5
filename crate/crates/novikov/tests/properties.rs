//! Property-based invariants: domination, monotonicity, the exact hitting
//! identities, certificate soundness and serialization round-trips over
//! randomized inputs.

use novikov::certificate::{self, Variant};
use novikov::exponential::lb_value;
use novikov::poisson::{generate_path, hit_lower, hit_upper, SeedSpec};
use novikov::report::{CommandKind, Format, RunConfig};
use novikov::special::{self, EvalPolicy};
use proptest::prelude::*;

proptest! {
    /// `h(x) <= alpha(a) x^2` and `g(x) <= beta(a) x^2` for any admissible
    /// floor and any jump size respecting it.
    #[test]
    fn domination_holds_pointwise(a in -1.0f64..6.0, dx in 0.0f64..30.0) {
        let x = a + dx;
        let h = special::h(x).unwrap();
        let alpha = special::alpha(a).unwrap();
        prop_assert!(h - alpha * x * x <= 1e-12 * alpha.max(1.0));
        if a > -1.0 {
            let g = special::g(x).unwrap();
            let beta = special::beta(a).unwrap();
            prop_assert!(g - beta * x * x <= 1e-12 * beta.max(1.0));
        }
    }

    /// Strict decrease of both constant functions.
    #[test]
    fn constants_strictly_decrease(a in -1.0f64..19.0, gap in 1e-6f64..1.0) {
        let a2 = a + gap;
        prop_assert!(special::alpha(a2).unwrap() < special::alpha(a).unwrap());
        if a > -1.0 {
            prop_assert!(special::beta(a2).unwrap() < special::beta(a).unwrap());
        }
    }

    /// `g = h/(1+x)` away from the removable singularity.
    #[test]
    fn g_h_ratio_identity(x in -0.99f64..50.0) {
        let g = special::g(x).unwrap();
        let h = special::h(x).unwrap();
        prop_assert!((g - h / (1.0 + x)).abs() <= 1e-11 * (1.0 + g.abs()));
    }

    /// `-f_b` at the argmin equals `h(b)`.
    #[test]
    fn argmin_depth_is_h(b in -0.99f64..20.0) {
        let (lambda_star, depth) = special::argmin_f(b).unwrap();
        prop_assert!((-special::f(b, lambda_star) - depth).abs() <= 1e-13 * depth.abs().max(1.0));
        prop_assert!((depth - special::h(b).unwrap()).abs() <= 1e-12 * depth.abs().max(1.0));
    }

    /// Series and closed form agree near the switch radius, at the accuracy
    /// the closed form supports there.
    #[test]
    fn series_agrees_with_closed_form(scale in 0.2f64..5.0, sign in prop::bool::ANY) {
        let threshold = EvalPolicy::default().series_threshold;
        let x = if sign { scale * threshold } else { -scale * threshold };
        let loose = EvalPolicy::new(1e-9, 1e-12).unwrap();  // forces closed form
        let tight = EvalPolicy::new(2e-2, 1e-12).unwrap();  // may use series
        let closed = loose.alpha(x).unwrap();
        let series = tight.alpha(x).unwrap();
        // The closed form carries cancellation noise of order eps/|x|.
        prop_assert!((closed - series).abs() <= 1e-15 / x.abs() + 1e-12);
    }

    /// Jump times are strictly increasing and bit-deterministic per seed.
    #[test]
    fn paths_increasing_and_deterministic(master in 0u64..1_000_000, index in 0u64..1_000_000) {
        let seed = SeedSpec { master_seed: master, path_index: index };
        let mut p1 = generate_path(seed);
        let mut p2 = generate_path(seed);
        let mut prev = 0.0;
        for n in 1..=64u64 {
            let t = p1.jump_time(n);
            prop_assert!(t > prev);
            prop_assert_eq!(t.to_bits(), p2.jump_time(n).to_bits());
            prev = t;
        }
    }

    /// Exact passage identity at the lower barrier: `N_T = (1+b)T - 1`.
    #[test]
    fn lower_barrier_identity(b in 0.05f64..4.0, index in 0u64..100_000) {
        let mut path = generate_path(SeedSpec { master_seed: 1, path_index: index });
        let rec = hit_lower(b, &mut path, 1_000_000);
        prop_assert!(rec.hit);
        let expected = (1.0 + b) * rec.passage_time - 1.0;
        prop_assert!((rec.jumps_at_passage as f64 - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    /// Sandwich at the upper barrier: `(1+b)T + c <= N_T <= (1+b)T + c + 1`.
    #[test]
    fn upper_barrier_sandwich(b in -0.9f64..-0.05, c in 0.5f64..8.0, index in 0u64..100_000) {
        let mut path = generate_path(SeedSpec { master_seed: 2, path_index: index });
        let rec = hit_upper(b, c, &mut path, 1_000_000);
        prop_assert!(rec.hit);
        let n_t = rec.jumps_at_passage as f64;
        let low = (1.0 + b) * rec.passage_time + c;
        prop_assert!(low - 1e-9 <= n_t && n_t <= low + 1.0 + 1e-9);
    }

    /// Every certificate the solver emits passes its own checks and the
    /// independent verifier, for either variant and any admissible input.
    #[test]
    fn solver_is_sound(
        a in prop_oneof![0.01f64..6.0, -0.99f64..-0.01, Just(0.0), Just(-1.0)],
        eps in 0.02f64..0.98,
        beta_kind in prop::bool::ANY,
    ) {
        let variant = if beta_kind { Variant::Beta } else { Variant::Alpha };
        if a == -1.0 && variant == Variant::Beta {
            prop_assert!(matches!(
                certificate::solve(a, eps, variant),
                Err(novikov::Error::NoBetaAtMinusOne)
            ));
            return Ok(());
        }
        let cert = certificate::solve(a, eps, variant).unwrap();
        prop_assert!(cert.all_checks_passed());
        prop_assert!(certificate::verify_certificate(&cert).all_passed);
        // The witness exponent stays strictly inside the finite region.
        prop_assert!(cert.witness_exponent().unwrap() < cert.witness_boundary().unwrap());
    }

    /// `L^b` telescopes deterministically between jumps.
    #[test]
    fn lb_telescoping(
        b in -0.9f64..3.0,
        lambda in -1.5f64..1.5,
        n in 0u64..30,
        s in 0.1f64..5.0,
        dt in 0.0f64..5.0,
    ) {
        let t = s + dt;
        let lhs = lb_value(b, lambda, n, t);
        let rhs = lb_value(b, lambda, n, s)
            * (lambda * (1.0 + b) * dt - dt * special::f(b, lambda)).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    /// Run configurations survive a JSON round trip bit for bit.
    #[test]
    fn config_roundtrips_through_json(
        a in -1.0f64..5.0,
        eps in 0.01f64..0.99,
        n_paths in 1u64..10_000_000,
        seed in prop::num::u64::ANY,
        csv in prop::bool::ANY,
    ) {
        let mut config = RunConfig::new(CommandKind::Counterexample);
        config.a = a;
        config.eps = eps;
        config.n_paths = n_paths;
        config.master_seed = seed;
        config.format = if csv { Format::Csv } else { Format::Json };
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, config);
    }
}
