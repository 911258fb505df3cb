//! Linear determining equations for the infinitesimal symmetries of a
//! [`PDESystemS`].

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{random_rational, Ctx, MultiIndex, Polynomial, Rational, RowReducer, SparseRow, TruncatedSeries};
use crate::error::{Error, Result};
use crate::fields::{prolong_recursive, ConcreteVectorField, LinearForm, SymbolicVectorField, UnknownSymbol};
use crate::jets::{JetContext, JetVar};
use crate::systems::PDESystemS;

/// Seed for every randomized step unless configured otherwise.
pub const DEFAULT_SEED: u64 = 0x5EC4E;
/// Number of sample points for generic ranks.
pub const GENERIC_SAMPLES: usize = 5;

/// How unknown functions are named when printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// `theta<j>`, `eta<k>` for a field on `(n, m)`.
    Lie { n: usize, m: usize },
    /// `t<j>`.
    Generic,
}

impl Naming {
    pub fn name(&self, s: &UnknownSymbol) -> String {
        match self {
            Naming::Lie { n, .. } => s.lie_name(*n),
            Naming::Generic => s.generic_name(),
        }
    }
}

/// One equation `form = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEquation {
    pub form: LinearForm,
    pub order: u32,
    pub origin: String,
}

impl LinearEquation {
    pub fn new(form: LinearForm, origin: impl Into<String>) -> Self {
        let order = form.order();
        LinearEquation { form, order, origin: origin.into() }
    }
}

/// Homogeneous linear PDE system for unknown functions of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPDESystem {
    pub ctx: Ctx,
    pub nfuncs: usize,
    pub naming: Naming,
    pub equations: Vec<LinearEquation>,
}

impl LinearPDESystem {
    pub fn new(ctx: Ctx, nfuncs: usize, naming: Naming) -> Self {
        LinearPDESystem { ctx, nfuncs, naming, equations: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.ctx.len()
    }

    /// Adds an equation unless it is the exact zero form.
    pub fn push(&mut self, form: LinearForm, origin: impl Into<String>) {
        if form.is_empty() || form.terms().all(|(_, c)| c.is_zero()) {
            return;
        }
        self.equations.push(LinearEquation::new(form, origin));
    }

    /// Highest equation order.
    pub fn order(&self) -> u32 {
        self.equations.iter().map(|e| e.order).max().unwrap_or(0)
    }

    /// True when every coefficient is an exact polynomial.
    pub fn is_exact(&self) -> bool {
        self.equations.iter().all(|e| e.form.terms().all(|(_, c)| c.is_exact()))
    }

    pub fn symbols(&self) -> BTreeSet<UnknownSymbol> {
        self.equations.iter().flat_map(|e| e.form.terms().map(|(s, _)| s.clone())).collect()
    }

    pub fn symbol_name(&self, s: &UnknownSymbol) -> String {
        self.naming.name(s)
    }

    /// Substitutes a concrete field into every equation.
    pub fn residuals(&self, field: &ConcreteVectorField) -> Result<Vec<TruncatedSeries>> {
        self.equations.iter().map(|e| e.form.evaluate_field(field)).collect()
    }

    /// Points for generic ranks: 5 seeded random points for exact systems,
    /// the origin otherwise (truncated coefficients are only known there).
    pub fn sample_points(&self, seed: u64) -> Vec<Vec<Rational>> {
        sample_points(self.nvars(), seed, self.is_exact())
    }
}

pub fn sample_points(nvars: usize, seed: u64, exact: bool) -> Vec<Vec<Rational>> {
    if !exact {
        return vec![vec![Rational::from_integer(0.into()); nvars]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..GENERIC_SAMPLES).map(|_| (0..nvars).map(|_| random_rational(&mut rng)).collect()).collect()
}

/// Evaluates a form at a point as a sparse row over `columns`. Returns `None`
/// if some coefficient is not determined there.
pub fn eval_form(form: &LinearForm, point: &[Rational], columns: &BTreeMap<UnknownSymbol, usize>) -> Option<SparseRow> {
    let mut row = BTreeMap::new();
    for (s, c) in form.terms() {
        let v = c.eval(point).ok()?;
        let col = *columns.get(s)?;
        row.insert(col, v);
    }
    Some(SparseRow::from_map(row))
}

/// Rank of a family of forms at one point; undetermined rows are skipped.
pub fn rank_at(forms: &[&LinearForm], point: &[Rational]) -> usize {
    let columns: BTreeMap<UnknownSymbol, usize> =
        forms.iter().flat_map(|f| f.terms().map(|(s, _)| s.clone())).collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut red = RowReducer::new(columns.len());
    for f in forms {
        if let Some(r) = eval_form(f, point, &columns) {
            red.insert(r);
        }
    }
    red.rank()
}

/// Maximum rank over the sample points.
pub fn generic_rank(forms: &[&LinearForm], points: &[Vec<Rational>]) -> usize {
    points.iter().map(|p| rank_at(forms, p)).max().unwrap_or(0)
}

/// True when `form` lies in the span of `forms` at every sample point.
pub fn in_row_space(forms: &[&LinearForm], form: &LinearForm, points: &[Vec<Rational>]) -> bool {
    let mut all: Vec<&LinearForm> = forms.to_vec();
    all.push(form);
    points.iter().all(|p| rank_at(forms, p) == rank_at(&all, p))
}

/// Output of [`generate_lie_equations`].
#[derive(Clone, Debug)]
pub struct GeneratedEquations {
    pub system: LinearPDESystem,
    /// Degree bound for the `w_x`-monomials kept.
    pub n_w: u32,
    /// Generic rank of the rows with monomial degree at most `d`, per `d`.
    pub ranks: Vec<(u32, usize)>,
    pub warnings: Vec<String>,
}

fn j2_restriction(s: &PDESystemS) -> Result<(std::sync::Arc<JetContext>, Vec<(usize, TruncatedSeries)>)> {
    let (n, m) = (s.n(), s.m());
    let j2 = JetContext::new(n, m, 2)?;
    let derived = s.derive_full_second_order()?;
    let mut assign = Vec::new();
    for mu in 0..m {
        for i in 0..n {
            for j in i..n {
                assign.push((j2.u(mu, &MultiIndex::from_indices(&[i, j])), derived.get(mu, i, j).rebase(j2.vars())?));
            }
        }
    }
    for k in 1..m {
        for p in 0..n {
            assign.push((j2.u(k, &MultiIndex::unit(p)), s.g(k, p).rebase(j2.vars())?));
        }
    }
    Ok((j2, assign))
}

/// `X^(1) e = sum theta_j e_{x_j} + sum eta^k e_{u^k} + sum_p eta^1_p e_{w_p}`
/// for `e` depending on `(x, u, w_x)`.
fn apply_first_prolongation(
    pf: &crate::fields::ProlongedField<LinearForm>,
    jc: &JetContext,
    e: &TruncatedSeries,
) -> Result<LinearForm> {
    let (n, m) = (jc.n(), jc.m());
    let mut acc = LinearForm::zero(jc.vars());
    for j in 0..n {
        acc = acc.checked_add(&pf.theta[j].mul_series(&e.diff(jc.x(j)))?)?;
    }
    for k in 0..m {
        let d = e.diff(jc.u(k, &MultiIndex::zero()));
        acc = acc.checked_add(&pf.get(k, &MultiIndex::zero()).expect("order 0").mul_series(&d)?)?;
    }
    for p in 0..n {
        let d = e.diff(jc.u(0, &MultiIndex::unit(p)));
        acc = acc.checked_add(&pf.get(0, &MultiIndex::unit(p)).expect("order 1").mul_series(&d)?)?;
    }
    Ok(acc)
}

/// Splits coefficients into `w_x`-monomial parts: `beta -> form over z`.
fn split_by_w(form: &LinearForm, jc: &JetContext, z: &Ctx) -> Result<BTreeMap<MultiIndex, LinearForm>> {
    let n = jc.n();
    let nz = z.len();
    let mut out: BTreeMap<MultiIndex, LinearForm> = BTreeMap::new();
    for (s, c) in form.terms() {
        let mut parts: BTreeMap<MultiIndex, Polynomial> = BTreeMap::new();
        for (mono, v) in c.poly().terms() {
            let mut zpart = Vec::new();
            let mut beta = Vec::new();
            for idx in mono.to_indices() {
                match jc.coord(idx) {
                    JetVar::U(0, a) if a.degree() == 1 => beta.push(a.to_indices()[0]),
                    _ if idx < nz => zpart.push(idx),
                    _ => return Err(Error::Invalid(format!("unexpected jet variable `{}` after restriction", jc.vars().name(idx)))),
                }
            }
            let b = MultiIndex::from_indices(&beta);
            parts.entry(b).or_insert_with(|| Polynomial::zero(z)).add_term(MultiIndex::from_indices(&zpart), v.clone());
        }
        // a truncated coefficient is unknown beyond its cap, so every beta within
        // the cap is represented even when its known part vanishes
        if let Some(cap) = c.cap() {
            for d in 0..=cap.max(-1) {
                for b in MultiIndex::all_of_degree(n, d as u32) {
                    parts.entry(b).or_insert_with(|| Polynomial::zero(z));
                }
            }
        }
        for (b, p) in parts {
            let cap = c.cap().map(|k| k - i64::from(b.degree()));
            out.entry(b).or_insert_with(|| LinearForm::zero(z)).add_term(s.clone(), TruncatedSeries::with_cap(p, cap))?;
        }
    }
    Ok(out)
}

fn beta_label(b: &MultiIndex, n: usize) -> String {
    let e: Vec<String> = (0..n).map(|i| b.get(i).to_string()).collect();
    format!("({})", e.join(","))
}

/// Determining equations: tangency of the second prolongation to the second-
/// order equations and of the first prolongation to the relations, restricted
/// to the system and split by monomials in `w_x`.
pub fn generate_lie_equations(s: &PDESystemS, seed: u64) -> Result<GeneratedEquations> {
    let (n, m) = (s.n(), s.m());
    let mut warnings = Vec::new();
    let inv = s.involutivity_residuals()?;
    if !inv.involutive_to_cap() {
        warnings.push(format!("system is not involutive to cap {}; equations are generated regardless", s.cap()));
    }
    let pf = prolong_recursive(&SymbolicVectorField::new(n, m)?, 2)?;
    let j1 = JetContext::new(n, m, 1)?;
    let z = j1.base_ctx();
    let (j2, assign) = j2_restriction(s)?;
    let derived = s.derive_full_second_order()?;
    let restrict = |f: &LinearForm| -> Result<LinearForm> {
        f.map_coefficients(j1.vars(), |c| c.rebase(j2.vars())?.substitute(&assign, None)?.rebase(j1.vars()))
    };

    let mut raw: Vec<(String, LinearForm)> = Vec::new();
    for mu in 0..m {
        for i in 0..n {
            for j in i..n {
                let lhs = pf.get(mu, &MultiIndex::from_indices(&[i, j])).expect("order 2");
                let rhs = apply_first_prolongation(&pf, &j1, &derived.get(mu, i, j).rebase(j1.vars())?)?;
                raw.push((format!("second-order u{}_{}{}", mu + 1, i + 1, j + 1), restrict(&lhs.checked_sub(&rhs)?)?));
            }
        }
    }
    for k in 1..m {
        for p in 0..n {
            let lhs = pf.get(k, &MultiIndex::unit(p)).expect("order 1");
            let rhs = apply_first_prolongation(&pf, &j1, &s.g(k, p))?;
            raw.push((format!("relation u{}_{}", k + 1, p + 1), restrict(&lhs.checked_sub(&rhs)?)?));
        }
    }

    let mut by_degree: BTreeMap<u32, Vec<(String, LinearForm)>> = BTreeMap::new();
    for (label, form) in &raw {
        for (b, f) in split_by_w(form, &j1, &z)? {
            if f.is_empty() || f.terms().all(|(_, c)| c.is_zero()) {
                continue;
            }
            by_degree.entry(b.degree()).or_default().push((format!("{label} beta={}", beta_label(&b, n)), f));
        }
    }

    let max_deg = by_degree.keys().next_back().copied().unwrap_or(0);
    let exact = by_degree.values().flatten().all(|(_, f)| f.terms().all(|(_, c)| c.is_exact()));
    let points = sample_points(z.len(), seed, exact);
    let mut ranks = Vec::new();
    let mut forms: Vec<&LinearForm> = Vec::new();
    let mut n_w = max_deg;
    let mut prev: Option<usize> = None;
    for d in 0..=max_deg {
        if let Some(v) = by_degree.get(&d) {
            forms.extend(v.iter().map(|(_, f)| f));
        }
        let r = generic_rank(&forms, &points);
        ranks.push((d, r));
        if d > 4 && prev == Some(r) {
            n_w = d - 1;
            break;
        }
        prev = Some(r);
    }
    let mut system = LinearPDESystem::new(z.clone(), n + m, Naming::Lie { n, m });
    for (d, v) in by_degree {
        if d > n_w {
            break;
        }
        for (label, f) in v {
            system.push(f, label);
        }
    }
    Ok(GeneratedEquations { system, n_w, ranks, warnings })
}

/// Residuals of a concrete field in the determining equations of `s`.
pub fn residual_of_field(s: &PDESystemS, x: &ConcreteVectorField, seed: u64) -> Result<Vec<TruncatedSeries>> {
    generate_lie_equations(s, seed)?.system.residuals(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn sym(func: usize, d: &[usize]) -> UnknownSymbol {
        UnknownSymbol::new(func, MultiIndex::from_indices(d))
    }

    fn form(ctx: &Ctx, terms: &[(i64, UnknownSymbol)]) -> LinearForm {
        let mut f = LinearForm::zero(ctx);
        for (c, s) in terms {
            f.add_term(s.clone(), TruncatedSeries::constant(ctx, rat(*c, 1))).unwrap();
        }
        f
    }

    #[test]
    fn flat_ode_row_space() {
        let s = PDESystemS::new(1, 1, 4).unwrap();
        let g = generate_lie_equations(&s, DEFAULT_SEED).unwrap();
        let sys = &g.system;
        // theta = 0, eta = 1; x = 0, u = 1
        let z = sys.ctx.clone();
        let expected = [
            form(&z, &[(1, sym(1, &[0, 0]))]),
            form(&z, &[(2, sym(1, &[0, 1])), (-1, sym(0, &[0, 0]))]),
            form(&z, &[(1, sym(1, &[1, 1])), (-2, sym(0, &[0, 1]))]),
            form(&z, &[(1, sym(0, &[1, 1]))]),
        ];
        let pts = sys.sample_points(DEFAULT_SEED);
        let got: Vec<&LinearForm> = sys.equations.iter().map(|e| &e.form).collect();
        let exp: Vec<&LinearForm> = expected.iter().collect();
        for p in &pts {
            assert_eq!(rank_at(&got, p), 4);
        }
        for e in &expected {
            assert!(in_row_space(&got, e, &pts));
        }
        for f in &got {
            assert!(in_row_space(&exp, f, &pts));
        }
        assert!(sys.equations.iter().all(|e| e.order == 2));
    }

    #[test]
    fn projective_generator_is_a_symmetry() {
        let s = PDESystemS::new(1, 1, 4).unwrap();
        let z = JetContext::new(1, 1, 0).unwrap().base_ctx();
        let x = Polynomial::var(&z, 0);
        let u = Polynomial::var(&z, 1);
        let good = ConcreteVectorField::new(1, 1, vec![TruncatedSeries::exact(x.pow(2))], vec![TruncatedSeries::exact(&x * &u)]).unwrap();
        assert!(residual_of_field(&s, &good, DEFAULT_SEED).unwrap().iter().all(|r| r.is_zero()));
        let bad = ConcreteVectorField::new(1, 1, vec![TruncatedSeries::exact(u.pow(2))], vec![TruncatedSeries::zero(&z, None)]).unwrap();
        assert!(residual_of_field(&s, &bad, DEFAULT_SEED).unwrap().iter().any(|r| !r.is_zero()));
    }
}
