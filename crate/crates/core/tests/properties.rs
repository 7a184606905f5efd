use convexcert_core::certify::{
    check_smoothness, check_strong_convexity, estimate_l, estimate_mu, ConditionId,
};
use convexcert_core::conjugate::{engine, llt_1d, BruteForce, Conjugator, GridFunction};
use convexcert_core::expr::{ad_gradient, evaluate, parse_expression, BinOp, Expression, Func, Node};
use convexcert_core::point::linspace;
use convexcert_core::{fd_gradient, tilt, AxisBox, FunctionOracle, Point, SamplingPlan};
use proptest::prelude::*;

/// Piecewise-linear-plus-quadratic values on a sorted grid, built from
/// random pieces so that collinear runs and exact float ties occur.
fn piecewise() -> impl Strategy<Value = GridFunction> {
    (
        2usize..400,
        prop::collection::vec((-5i32..=5, -3i32..=3, 0u8..3), 1..6),
        -10.0f64..10.0,
        0.01f64..2.0,
    )
        .prop_map(|(n, pieces, lo, width)| {
            let xs = linspace(lo, lo + width * n as f64 / 10.0, n);
            let per = n.div_ceil(pieces.len());
            let values = xs
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let (slope, offset, kind) = pieces[(i / per).min(pieces.len() - 1)];
                    let base = slope as f64 * x + offset as f64;
                    match kind {
                        0 => base,
                        1 => base + 0.5 * x * x,
                        _ => base - 0.25 * x.abs(),
                    }
                })
                .collect();
            GridFunction::new(xs, values).unwrap()
        })
}

fn sorted_slopes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(-20i32..=20).prop_map(f64::from), -20.0f64..20.0], 0..120)
        .prop_map(|mut v| {
            v.sort_by(f64::total_cmp);
            v
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn linear_time_matches_brute_force_exactly(g in piecewise(), slopes in sorted_slopes()) {
        let fast = llt_1d(&g, &slopes).unwrap();
        let slow = BruteForce.transform(&g, &slopes).unwrap();
        prop_assert_eq!(&fast.values, &slow.values);
        prop_assert_eq!(&fast.argmax_index, &slow.argmax_index);
    }

    #[test]
    fn conjugate_is_convex_in_the_slope(g in piecewise()) {
        let slopes = linspace(-10.0, 10.0, 101);
        let r = llt_1d(&g, &slopes).unwrap();
        let scale = r.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for w in r.values.windows(3) {
            prop_assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-9 * scale);
        }
    }

    #[test]
    fn argmax_is_monotone_for_strictly_convex_input(c in 0.1f64..10.0, b in -5.0f64..5.0, n in 3usize..500) {
        let xs = linspace(-3.0, 3.0, n);
        let vs = xs.iter().map(|x| c * x * x + b * x).collect();
        let g = GridFunction::new(xs, vs).unwrap();
        let r = llt_1d(&g, &linspace(-80.0, 80.0, 401)).unwrap();
        for w in r.argmax_index.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn conjugation_reverses_order(g in piecewise(), bumps in prop::collection::vec(0.0f64..3.0, 400), slopes in sorted_slopes()) {
        let above: Vec<f64> = g.values().iter().zip(&bumps).map(|(v, d)| v + d).collect();
        let h = GridFunction::new(g.xs().to_vec(), above).unwrap();
        let fg = llt_1d(&g, &slopes).unwrap();
        let fh = llt_1d(&h, &slopes).unwrap();
        for (a, b) in fg.values.iter().zip(&fh.values) {
            prop_assert!(a >= b);
        }
    }

    #[test]
    fn tilting_back_restores_the_function(s in -5.0f64..5.0, x in -5.0f64..5.0) {
        let f = FunctionOracle::from_fns(1, true, |x| x[0].exp() + x[0] * x[0], |x| vec![x[0].exp() + 2.0 * x[0]]);
        let slope = Point::scalar(s).unwrap();
        let back = tilt(&tilt(&f, &slope).unwrap(), &Point::scalar(-s).unwrap()).unwrap();
        let p = [x];
        prop_assert!((back.value(&p).unwrap() - f.value(&p).unwrap()).abs() <= 1e-12 * (1.0 + f.value(&p).unwrap().abs()));
        prop_assert!((back.grad_select(&p).unwrap()[0] - f.grad_select(&p).unwrap()[0]).abs() <= 1e-12 * (1.0 + x.abs().exp()));
    }

    #[test]
    fn tilted_function_is_stationary_at_the_tilt_point(x in -3.0f64..3.0) {
        let f = FunctionOracle::from_fns(1, true, |x| x[0].powi(4) + x[0], |x| vec![4.0 * x[0].powi(3) + 1.0]);
        let s = f.grad_at(&Point::scalar(x).unwrap()).unwrap();
        let phi = tilt(&f, &s).unwrap();
        prop_assert!(phi.grad_select(&[x]).unwrap()[0].abs() <= 1e-12 * (1.0 + 4.0 * x.abs().powi(3)));
    }
}

fn leaf() -> impl Strategy<Value = Node> {
    prop_oneof![
        (0usize..2).prop_map(Node::Var),
        (-4.0f64..4.0).prop_map(Node::Const),
    ]
}

fn smooth_tree() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::binary(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::binary(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::binary(BinOp::Mul, a, b)),
            inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
            (inner.clone(), 0u8..4).prop_map(|(a, k)| Node::Pow(Box::new(a), f64::from(k))),
            inner.clone().prop_map(|a| Node::Call(Func::Sin, Box::new(a))),
            inner.clone().prop_map(|a| Node::Call(Func::Cos, Box::new(a))),
            inner.clone().prop_map(|a| Node::Call(Func::Exp, Box::new(Node::Call(Func::Sin, Box::new(a))))),
            prop::collection::vec(inner, 1..4).prop_map(Node::Sum),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printing_then_parsing_preserves_the_function(t in smooth_tree(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let e = Expression::from_node(t, 2).unwrap();
        let printed = e.to_string();
        let back = parse_expression(&printed, 2).unwrap();
        prop_assert_eq!(back.to_string(), printed);
        let p = [x, y];
        match (evaluate(&e, &p), evaluate(&back, &p)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn forward_mode_matches_central_differences(t in smooth_tree(), x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let e = Expression::from_node(t, 2).unwrap();
        let p = Point::new(vec![x, y]).unwrap();
        let (Ok(ad), Ok(fd)) = (ad_gradient(&e, &p), fd_gradient(&e.oracle(), &p, 1e-6)) else {
            return Ok(());
        };
        let scale = ad.iter().chain(fd.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
        let value_scale = evaluate(&e, &p).unwrap().abs().max(1.0);
        for (a, f) in ad.iter().zip(fd.iter()) {
            // Central differences lose ~ eps·|f|/h to cancellation.
            prop_assert!((a - f).abs() <= 1e-4 * scale + 1e-9 * value_scale, "{a} vs {f} for {e}");
        }
    }

    #[test]
    fn verdicts_are_monotone_in_the_constant(c in 0.5f64..4.0, seed in 0u64..1000, shrink in 0.1f64..0.99) {
        let f = FunctionOracle::from_fns(1, true, move |x| c * (x[0] * x[0] + (x[0]).cos()), move |x| vec![c * (2.0 * x[0] - x[0].sin())]);
        let plan = SamplingPlan::new(AxisBox::cube(1, -3.0, 3.0).unwrap(), 200, seed);
        for id in [ConditionId::ScDef, ConditionId::ScFirstOrder, ConditionId::ScMonotone, ConditionId::ScJensen] {
            for mu in [0.5 * c, c, 2.0 * c] {
                if check_strong_convexity(&f, mu, &plan, id).unwrap().holds {
                    prop_assert!(check_strong_convexity(&f, mu * shrink, &plan, id).unwrap().holds);
                }
            }
        }
        for id in [ConditionId::Sm0, ConditionId::Sm2, ConditionId::Sm5, ConditionId::Sm7] {
            for l in [c, 2.0 * c, 3.0 * c] {
                if check_smoothness(&f, l, &plan, id).unwrap().holds {
                    prop_assert!(check_smoothness(&f, l / shrink, &plan, id).unwrap().holds);
                }
            }
        }
    }

    #[test]
    fn mu_estimate_never_exceeds_l_estimate(seed in 0u64..10_000, a in 0.1f64..5.0, b in -2.0f64..2.0) {
        let f = FunctionOracle::from_fns(2, true,
            move |x| a * x[0] * x[0] + b * x[0] * x[1] + x[1] * x[1] + x[0].sin(),
            move |x| vec![2.0 * a * x[0] + b * x[1] + x[0].cos(), b * x[0] + 2.0 * x[1]]);
        let plan = SamplingPlan::new(AxisBox::cube(2, -2.0, 2.0).unwrap(), 50, seed);
        prop_assert!(estimate_mu(&f, &plan).unwrap() <= estimate_l(&f, &plan).unwrap());
    }
}

#[test]
fn engines_agree_on_a_large_grid() {
    let xs = linspace(-7.0, 7.0, 10_000);
    let vs: Vec<f64> = xs.iter().map(|x| (x * 1.3).sin() * 3.0 + 0.1 * x * x).collect();
    let g = GridFunction::new(xs, vs).unwrap();
    let slopes = linspace(-5.0, 5.0, 2001);
    let a = engine("llt").unwrap().transform(&g, &slopes).unwrap();
    let b = engine("brute").unwrap().transform(&g, &slopes).unwrap();
    assert_eq!(a, b);
}
