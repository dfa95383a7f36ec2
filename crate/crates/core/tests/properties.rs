//! Property suites over random finite instances and scalar round trips.

mod common;

use dinkelbach::{
    accelerated_interval_upper_step, check_invariants, divided_difference, finite_min_ratio,
    real_from_decimal, solve, tangent_step, trace_csv, FiniteSetProblem, Method, PrecisionContext,
    Problem, Real, SolverConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn native() -> PrecisionContext {
    PrecisionContext::native()
}

fn items() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1_000_000i64..=1_000_000, 0.1f64..=10.0), 1..=50).prop_map(|v| {
        v.into_iter()
            .map(|(m, f2)| (m as f64 * 1e-5 * f2, f2))
            .collect()
    })
}

fn integer_items() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-50i64..=50, 1i64..=20), 1..=20)
        .prop_map(|v| v.into_iter().map(|(a, b)| (a as f64, b as f64)).collect())
}

fn ratio(f1: &Real, f2: &Real) -> Real {
    f1 / f2
}

fn close(a: &Real, b: &Real, rel: f64) -> bool {
    let scale = Real::max_of(&a.abs(), &b.abs()).to_f64().max(1.0);
    (a - b).abs().to_f64() <= rel * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decimal_round_trip_native(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let r = real_from_decimal(&format!("{x:e}"), native()).unwrap();
        prop_assert_eq!(r.to_f64().to_bits(), x.to_bits());
        let again = real_from_decimal(&r.to_scientific(17), native()).unwrap();
        prop_assert_eq!(again, r);
    }

    #[test]
    fn decimal_round_trip_big(mantissa in "[1-9][0-9]{0,39}", exp in -300i32..300, neg in any::<bool>()) {
        let ctx = PrecisionContext::with_digits(60).unwrap();
        let text = format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, exp);
        let r = real_from_decimal(&text, ctx).unwrap();
        let printed = r.to_scientific(mantissa.len());
        let back = real_from_decimal(&printed, ctx).unwrap();
        prop_assert_eq!(&back.to_scientific(mantissa.len()), &printed);
        let exponent = exp + mantissa.len() as i32 - 1;
        prop_assert!(printed.ends_with(&format!("e{exponent}")), "{} vs {}", printed, text);
    }

    #[test]
    fn comparison_is_monotone_across_representations(a in -1e300f64..1e300, b in -1e300f64..1e300) {
        let big = PrecisionContext::with_digits(40).unwrap();
        let (na, nb) = (native().from_f64(a), native().from_f64(b));
        let (ba, bb) = (big.from_f64(a), big.from_f64(b));
        prop_assert_eq!(na.partial_cmp(&nb), a.partial_cmp(&b));
        prop_assert_eq!(ba.partial_cmp(&bb), a.partial_cmp(&b));
        prop_assert_eq!(na.partial_cmp(&bb), a.partial_cmp(&b));
        prop_assert_eq!(ba.partial_cmp(&nb), a.partial_cmp(&b));
    }

    #[test]
    fn divided_difference_is_sandwiched(data in items(), a in -2000i64..2000, gap in 1i64..2000) {
        // 60 digits keep the difference quotient free of cancellation noise
        let ctx = PrecisionContext::with_digits(60).unwrap();
        let p = FiniteSetProblem::from_f64(ctx, &data).unwrap();
        let (alpha, beta) = (ctx.int(a) / ctx.int(100), ctx.int(a + gap) / ctx.int(100));
        let (ea, eb) = (p.evaluate(&alpha).unwrap(), p.evaluate(&beta).unwrap());
        let dd = divided_difference(&ea, &eb).unwrap();
        let slack = ctx.pow10_neg(40);
        prop_assert!(dd.is_positive());
        prop_assert!(&ea.f2 - &slack <= dd, "{} > {}", ea.f2, dd);
        prop_assert!(dd <= &eb.f2 + &slack, "{} > {}", dd, eb.f2);
    }

    #[test]
    fn g_is_strictly_increasing(data in items(), a in -800i64..800, gap in 1i64..800) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let (alpha, beta) = (native().int(a) / native().int(8), native().int(a + gap) / native().int(8));
        prop_assert!(p.evaluate(&alpha).unwrap().g < p.evaluate(&beta).unwrap().g);
    }

    #[test]
    fn witness_attains_the_maximum(data in integer_items(), a in -60i64..60) {
        // integer data and integer alpha keep every product exact
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let alpha = native().int(a);
        let e = p.evaluate(&alpha).unwrap();
        let w = e.witness.unwrap();
        let value = |(f1, f2): &(Real, Real)| -f1 + &alpha * f2;
        prop_assert_eq!(&e.g, &value(&p.items()[w]));
        prop_assert_eq!(&e.f1, &p.items()[w].0);
        prop_assert_eq!(&e.f2, &p.items()[w].1);
        for (i, item) in p.items().iter().enumerate() {
            let v = value(item);
            prop_assert!(v <= e.g);
            if i < w {
                prop_assert!(v < e.g, "tie must resolve to the smallest index");
            }
        }
    }

    #[test]
    fn tangent_step_is_the_witness_ratio(data in items(), a in -1000i64..1000) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let e = p.evaluate(&(native().int(a) / native().int(100))).unwrap();
        let (f1, f2) = &p.items()[e.witness.unwrap()];
        prop_assert!(close(&tangent_step(&e), &ratio(f1, f2), 1e-12));
    }

    #[test]
    fn accelerated_upper_step_is_the_smaller_witness_ratio(data in items(), a in -1000i64..1000, b in -1000i64..1000) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let ea = p.evaluate(&(native().int(a) / native().int(100))).unwrap();
        let eb = p.evaluate(&(native().int(b) / native().int(100))).unwrap();
        let ra = ratio(&ea.f1, &ea.f2);
        let rb = ratio(&eb.f1, &eb.f2);
        prop_assert!(close(&accelerated_interval_upper_step(&ea, &eb), &Real::min_of(&ra, &rb), 1e-12));
    }

    #[test]
    fn solvers_find_the_minimum_ratio(data in items(), seed in any::<u64>()) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let (min, _) = finite_min_ratio(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = Problem::Finite(p.clone());
        let config = SolverConfig::new(native());
        for method in Method::ALL {
            let start = common::start_for(&mut rng, &p, method.is_interval());
            let t = solve(&problem, method, &start, &config).unwrap();
            prop_assert!(t.is_success(), "{} {:?}", method, t.status);
            prop_assert!(close(&t.final_alpha, &min, 1e-9), "{}: {} vs {}", method, t.final_alpha, min);
            prop_assert!(check_invariants(&t).is_empty(), "{:?}\n{}", check_invariants(&t), trace_csv(&t));
        }
    }

    #[test]
    fn oracle_is_called_once_per_distinct_point(data in items(), seed in any::<u64>()) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = Problem::Finite(p.clone());
        for method in Method::ALL {
            let start = common::start_for(&mut rng, &p, method.is_interval());
            let t = solve(&problem, method, &start, &SolverConfig::new(native())).unwrap();
            prop_assert_eq!(t.oracle_calls, t.distinct_alphas(), "{}", method);
        }
    }

    #[test]
    fn records_match_fresh_evaluations(data in items(), seed in any::<u64>()) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = Problem::Finite(p.clone());
        for method in Method::ALL {
            let start = common::start_for(&mut rng, &p, method.is_interval());
            let t = solve(&problem, method, &start, &SolverConfig::new(native())).unwrap();
            for r in t.records.iter().chain(&t.lower) {
                let e = p.evaluate(&r.alpha).unwrap();
                prop_assert_eq!(&e.g, &r.g);
                prop_assert_eq!(&e.f2, &r.f2);
            }
        }
    }

    #[test]
    fn replay_is_deterministic(data in items(), seed in any::<u64>()) {
        let p = FiniteSetProblem::from_f64(native(), &data).unwrap();
        let problem = Problem::Finite(p.clone());
        for method in Method::ALL {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = common::start_for(&mut rng, &p, method.is_interval());
            let a = solve(&problem, method, &start, &SolverConfig::new(native())).unwrap();
            let b = solve(&problem, method, &start, &SolverConfig::new(native())).unwrap();
            prop_assert_eq!(trace_csv(&a), trace_csv(&b));
        }
    }
}

#[test]
fn high_precision_finite_solves_agree_with_exact_ratio() {
    let ctx = PrecisionContext::with_digits(100).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let p = common::random_finite(&mut rng, ctx);
        let (min, _) = finite_min_ratio(&p);
        let problem = Problem::Finite(p.clone());
        for method in Method::ALL {
            let start = common::start_for(&mut rng, &p, method.is_interval());
            let t = solve(&problem, method, &start, &SolverConfig::new(ctx)).unwrap();
            assert!(t.is_success());
            assert!(
                (&t.final_alpha - &min).abs() < ctx.pow10_neg(70),
                "{method}: {} vs {min}",
                t.final_alpha
            );
        }
    }
}
