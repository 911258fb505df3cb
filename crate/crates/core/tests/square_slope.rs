//! u'' = (u')^2 linearises under v = e^{-u}, so its symmetry algebra is known
//! in closed form. These tests pin the determining equations against it.

use segre_lie::algebra::{rat, MultiIndex, Polynomial, TruncatedSeries};
use segre_lie::fields::{ConcreteVectorField, LinearForm, UnknownSymbol};
use segre_lie::jets::JetContext;
use segre_lie::lieeq::{generate_lie_equations, in_row_space, residual_of_field, sample_points, DEFAULT_SEED};
use segre_lie::systems::PDESystemS;

const TH: usize = 0;
const ETA: usize = 1;

fn form(terms: &[(i64, usize, &[usize])]) -> LinearForm {
    let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
    let mut f = LinearForm::zero(&ctx);
    for &(c, func, d) in terms {
        f.add_term(UnknownSymbol::new(func, MultiIndex::from_indices(d)), TruncatedSeries::constant(&ctx, rat(c, 1))).unwrap();
    }
    f
}

fn system(cap: u32) -> PDESystemS {
    let mut s = PDESystemS::new(1, 1, cap).unwrap();
    let w = s.jet().u_series(0, &MultiIndex::unit(0));
    s.set_f(0, 0, w.checked_mul(&w).unwrap()).unwrap();
    s
}

#[test]
fn determining_equations_carry_the_f2_terms() {
    let gen = generate_lie_equations(&system(4), DEFAULT_SEED).unwrap();
    let expected = [
        form(&[(1, ETA, &[0, 0])]),
        form(&[(2, ETA, &[0, 1]), (-2, ETA, &[0]), (-1, TH, &[0, 0])]),
        form(&[(1, ETA, &[1, 1]), (-1, ETA, &[1]), (-2, TH, &[0, 1])]),
        form(&[(-1, TH, &[1, 1]), (-1, TH, &[1])]),
    ];
    let points = sample_points(2, DEFAULT_SEED, true);
    let generated: Vec<&LinearForm> = gen.system.equations.iter().map(|e| &e.form).collect();
    let exp: Vec<&LinearForm> = expected.iter().collect();
    for f in &expected {
        assert!(in_row_space(&generated, f, &points), "{f:?}");
    }
    for f in &generated {
        assert!(in_row_space(&exp, f, &points), "{f:?}");
    }
}

/// `-x e^u d/du`, with `e^u` truncated at total degree `cap`.
fn exp_symmetry(cap: u32) -> ConcreteVectorField {
    let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
    let x = Polynomial::var(&ctx, 0);
    let mut eu = Polynomial::zero(&ctx);
    let mut fact = rat(1, 1);
    for k in 0..cap {
        if k > 0 {
            fact /= rat(i64::from(k), 1);
        }
        eu.add_term(MultiIndex::new(vec![0, k as u16]), fact.clone());
    }
    let eta = TruncatedSeries::new(&x * &eu, Some(cap)).scale(&rat(-1, 1));
    ConcreteVectorField::new(1, 1, vec![TruncatedSeries::zero(&ctx, None)], vec![eta]).unwrap()
}

#[test]
fn exponential_symmetry_has_zero_residuals() {
    let res = residual_of_field(&system(4), &exp_symmetry(8), DEFAULT_SEED).unwrap();
    assert!(!res.is_empty());
    for r in &res {
        assert!(r.is_zero(), "{r}");
        assert!(r.cap().is_none_or(|c| c >= 5), "{r}");
    }
}

#[test]
fn exponential_symmetry_violates_the_equations_without_f2_terms() {
    // 2 eta_xu - theta_xx for eta = -x e^u is -2 e^u, nonzero at the origin
    let x = exp_symmetry(8);
    let v = form(&[(2, ETA, &[0, 1]), (-1, TH, &[0, 0])]).evaluate_field(&x).unwrap();
    assert_eq!(v.constant_term().unwrap(), rat(-2, 1));
}
