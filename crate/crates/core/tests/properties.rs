//! Property suites for the algebraic invariants of the engine.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segre_lie::algebra::{random_rational, rat, ExactMatrix, MultiIndex, Polynomial, Rational, TruncatedSeries, VarContext};
use segre_lie::cli::print::print_system;
use segre_lie::cli::{parse_source, run, Command, Config, SourceSystem};
use segre_lie::fields::{lie_series_flow, prolong2_closed, prolong_recursive, ConcreteVectorField};
use segre_lie::jets::{total_derivative, JetContext};
use segre_lie::lieeq::{residual_of_field, DEFAULT_SEED};
use segre_lie::segre::{derive_segre_system, flat_nondegenerate_check, model_quadric, scale_deform, segre_ctx, SegreDefining};
use segre_lie::systems::PDESystemS;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| rat(a, b))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=5, any::<bool>()).prop_map(|(a, b, neg)| rat(if neg { -a } else { a }, b))
}

fn poly3() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0u16..3, 0u16..3, 0u16..3, small_rat()), 0..6).prop_map(|terms| {
        let ctx = VarContext::new(["a", "b", "c"]);
        let mut p = Polynomial::zero(&ctx);
        for (i, j, k, c) in terms {
            p.add_term(MultiIndex::new(vec![i, j, k]), c);
        }
        p
    })
}

fn random_poly(rng: &mut ChaCha8Rng, ctx: &segre_lie::algebra::Ctx, vars: &[usize], min_deg: u32, max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(ctx);
    for _ in 0..terms {
        let d = rng.gen_range(min_deg..=max_deg);
        let idx: Vec<usize> = (0..d).map(|_| vars[rng.gen_range(0..vars.len())]).collect();
        p.add_term(MultiIndex::from_indices(&idx), random_rational(rng));
    }
    p
}

fn random_field(seed: u64, n: usize, m: usize, min_deg: u32) -> ConcreteVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = JetContext::new(n, m, 0).unwrap().vars().clone();
    let vars: Vec<usize> = (0..n + m).collect();
    let mut coeff = || TruncatedSeries::exact(random_poly(&mut rng, &ctx, &vars, min_deg, 3, 3));
    let theta = (0..n).map(|_| coeff()).collect();
    let eta = (0..m).map(|_| coeff()).collect();
    ConcreteVectorField::new(n, m, theta, eta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly3(), q in poly3(), r in poly3()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn leibniz_rule(p in poly3(), q in poly3(), v in 0usize..3) {
        prop_assert_eq!((&p * &q).diff(v), &(&p.diff(v) * &q) + &(&p * &q.diff(v)));
    }

    #[test]
    fn total_derivatives_commute(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jc = JetContext::new(2, 1, 1).unwrap();
        let vars: Vec<usize> = (0..jc.len()).collect();
        let e = TruncatedSeries::exact(random_poly(&mut rng, jc.vars(), &vars, 0, 3, 4));
        let d01 = total_derivative(2, 1, &total_derivative(2, 1, &e, 0).unwrap(), 1).unwrap();
        let d10 = total_derivative(2, 1, &total_derivative(2, 1, &e, 1).unwrap(), 0).unwrap();
        prop_assert!(d01.checked_sub(&d10).unwrap().is_zero());
    }

    #[test]
    fn rref_is_idempotent(rows in prop::collection::vec(prop::collection::vec(small_rat(), 4), 3)) {
        let a = ExactMatrix::from_rows(rows).unwrap();
        let (r, p) = a.rref();
        let (rr, pp) = r.rref();
        prop_assert_eq!(&r, &rr);
        prop_assert_eq!(p, pp);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closed_second_prolongation_matches_recursion(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=2) {
        let f = random_field(seed, n, m, 0);
        let (a, b) = (prolong2_closed(&f).unwrap(), prolong_recursive(&f, 2).unwrap());
        prop_assert_eq!(a.theta, b.theta);
        prop_assert_eq!(a.eta, b.eta);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prolongation_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in small_rat(), b in small_rat()) {
        let (x, y) = (random_field(s1, 1, 2, 0), random_field(s2, 1, 2, 0));
        let mix = x.combine(&a, &y, &b).unwrap();
        let (px, py, pm) = (prolong_recursive(&x, 2).unwrap(), prolong_recursive(&y, 2).unwrap(), prolong_recursive(&mix, 2).unwrap());
        for (key, v) in &pm.eta {
            let expect = px.eta[key].scale(&a).checked_add(&py.eta[key].scale(&b)).unwrap();
            prop_assert!(v.checked_sub(&expect).unwrap().is_zero());
        }
    }

    #[test]
    fn flow_group_law(seed in any::<u64>(), s in small_rat(), t in small_rat()) {
        // coefficients vanish to order two, so the Lie series is exact through the cap
        let x = random_field(seed, 1, 1, 2);
        let cap = 4;
        let ctx = x.ctx().clone();
        let fs = lie_series_flow(&x, &s, cap).unwrap();
        let ft = lie_series_flow(&x, &t, cap).unwrap();
        let fst = lie_series_flow(&x, &(&s + &t), cap).unwrap();
        for i in 0..2 {
            let composed = fs[i].compose(&ctx, &ft, Some(cap)).unwrap();
            prop_assert!(composed.checked_sub(&fst[i]).unwrap().is_zero(), "component {}", i);
        }
    }

    #[test]
    fn classical_combinations_preserve_solutions(coeffs in prop::collection::vec(small_rat(), 8)) {
        let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
        let (x, u, one) = (Polynomial::var(&ctx, 0), Polynomial::var(&ctx, 1), Polynomial::one(&ctx));
        let thetas = [one.clone(), Polynomial::zero(&ctx), x.clone(), u.clone(), Polynomial::zero(&ctx), Polynomial::zero(&ctx), x.pow(2), &x * &u];
        let etas = [Polynomial::zero(&ctx), one, Polynomial::zero(&ctx), Polynomial::zero(&ctx), x.clone(), u.clone(), &x * &u, u.pow(2)];
        let mut th = Polynomial::zero(&ctx);
        let mut et = Polynomial::zero(&ctx);
        for (k, c) in coeffs.iter().enumerate() {
            th = &th + &thetas[k].scale(c);
            et = &et + &etas[k].scale(c);
        }
        let field = ConcreteVectorField::new(1, 1, vec![TruncatedSeries::exact(th)], vec![TruncatedSeries::exact(et)]).unwrap();
        let s = PDESystemS::new(1, 1, 4).unwrap();
        prop_assert!(residual_of_field(&s, &field, DEFAULT_SEED).unwrap().iter().all(TruncatedSeries::is_zero));
    }

    #[test]
    fn scaling_is_multiplicative(seed in any::<u64>(), e1 in nonzero_rat(), e2 in nonzero_rat()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = segre_ctx(1, 1);
        let r = random_poly(&mut rng, &ctx, &[0, 1, 2], 3, 5, 4);
        let d = SegreDefining::new(1, 1, 6, vec![ExactMatrix::identity(1)], vec![TruncatedSeries::exact(r)]).unwrap();
        let twice = scale_deform(&scale_deform(&d, &e1), &e2);
        let once = scale_deform(&d, &(&e1 * &e2));
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn nondegeneracy_depends_only_on_the_span(entries in prop::collection::vec(small_rat(), 8), c in small_rat(), k in nonzero_rat()) {
        let a2 = ExactMatrix::from_rows(vec![entries[0..2].to_vec(), entries[2..4].to_vec()]).unwrap();
        let a3 = ExactMatrix::from_rows(vec![entries[4..6].to_vec(), entries[6..8].to_vec()]).unwrap();
        let id = ExactMatrix::identity(2);
        let combo = |x: &ExactMatrix, s: &Rational, y: &ExactMatrix, t: &Rational| {
            ExactMatrix::from_rows((0..2).map(|i| (0..2).map(|j| s * x.get(i, j) + t * y.get(i, j)).collect()).collect()).unwrap()
        };
        // A3 -> k A3 + c A2 + c Id keeps the span of {Id, A2, A3}
        let a3b = combo(&combo(&a3, &k, &a2, &c), &rat(1, 1), &id, &c);
        prop_assert_eq!(flat_nondegenerate_check(&[a2.clone(), a3]), flat_nondegenerate_check(&[a2, a3b]));
    }

    #[test]
    fn restricted_derivatives_commute_on_involutive_systems(seed in any::<u64>(), which in 1u8..=3) {
        let s = derive_segre_system(&SegreDefining::quadric(2, 2, 4, model_quadric(which).unwrap()).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jc = s.jet();
        let vars = [jc.x(0), jc.x(1), jc.u(0, &MultiIndex::zero()), jc.u(1, &MultiIndex::zero()), jc.u(0, &MultiIndex::unit(0)), jc.u(0, &MultiIndex::unit(1))];
        let e = TruncatedSeries::exact(random_poly(&mut rng, jc.vars(), &vars, 0, 3, 4));
        let d01 = s.restricted_total_derivative(&s.restricted_total_derivative(&e, 0).unwrap(), 1).unwrap();
        let d10 = s.restricted_total_derivative(&s.restricted_total_derivative(&e, 1).unwrap(), 0).unwrap();
        prop_assert!(d01.checked_sub(&d10).unwrap().is_zero());
    }
}

fn random_system(seed: u64) -> PDESystemS {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let cap = rng.gen_range(2..=5);
    let truncated = rng.gen_bool(0.3);
    let mut s = PDESystemS::new(n, m, cap).unwrap();
    let jc = s.jet();
    let mut vars: Vec<usize> = (0..n).map(|i| jc.x(i)).collect();
    vars.extend((0..m).map(|k| jc.u(k, &MultiIndex::zero())));
    vars.extend((0..n).map(|i| jc.u(0, &MultiIndex::unit(i))));
    let ctx = jc.vars().clone();
    let series = |rng: &mut ChaCha8Rng| {
        let terms = rng.gen_range(0..=3);
        TruncatedSeries::new(random_poly(rng, &ctx, &vars, 0, 3, terms), if truncated { Some(cap) } else { None })
    };
    for i in 0..n {
        for j in i..n {
            let v = series(&mut rng);
            s.set_f(i, j, v).unwrap();
        }
    }
    for k in 1..m {
        for j in 0..n {
            let v = series(&mut rng);
            s.set_g(k, j, v).unwrap();
        }
    }
    s
}

#[test]
fn printer_parser_round_trip_on_200_systems() {
    for seed in 0..200 {
        let s = random_system(seed);
        let text = print_system(&s);
        let back = match parse_source(&text) {
            Ok(SourceSystem::System(b)) => b,
            other => panic!("seed {seed}: {other:?}\n{text}"),
        };
        assert_eq!(back, s, "seed {seed}\n{text}");
    }
}

#[test]
fn reports_are_deterministic_on_random_inputs() {
    let cfg = Config::default();
    for seed in 0..6 {
        let mut s = random_system(seed);
        s.set_cap(3);
        let text = print_system(&s);
        for cmd in [Command::Involutive, Command::Parse, Command::LieEqs] {
            assert_eq!(run(&cmd, &cfg, &text), run(&cmd, &cfg, &text), "seed {seed} {cmd:?}");
        }
    }
}
