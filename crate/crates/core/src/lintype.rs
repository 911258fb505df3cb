//! Formal analysis of linear PDE systems: completion, prolongation, symbols,
//! finite type, dimension bounds and a polynomial-solution oracle.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::{ExactMatrix, MultiIndex, Polynomial, Rational, RowReducer, SparseRow, TruncatedSeries};
use crate::error::{Error, Result};
use crate::fields::{LinearForm, UnknownSymbol};
use crate::lieeq::{eval_form, LinearPDESystem};

/// Default bound on the number of prolongations tried by [`finite_type`].
pub const DEFAULT_RMAX: u32 = 6;

/// `d/dz_l` of a form: `sum (c_{z_l} s + c s_{+l})`.
pub fn diff_form(form: &LinearForm, l: usize) -> Result<LinearForm> {
    let mut out = LinearForm::zero(form.ctx());
    for (s, c) in form.terms() {
        out.add_term(s.clone(), c.diff(l))?;
        out.add_term(UnknownSymbol::new(s.func, s.deriv.incremented(l)), c.clone())?;
    }
    Ok(out)
}

/// All derivatives `d^alpha form` with `|alpha| <= r`, keyed by `alpha`.
fn derivatives_up_to(form: &LinearForm, nvars: usize, r: u32) -> Result<BTreeMap<MultiIndex, LinearForm>> {
    let mut out = BTreeMap::new();
    out.insert(MultiIndex::zero(), form.clone());
    for d in 1..=r {
        for alpha in MultiIndex::all_of_degree(nvars, d) {
            let l = *alpha.to_indices().last().expect("nonempty");
            let parent = alpha.decremented(l).expect("contains l");
            let f = diff_form(&out[&parent], l)?;
            out.insert(alpha, f);
        }
    }
    Ok(out)
}

/// Adds every derivative of each lower-order equation up to order `target`
/// (the system order if `None`).
pub fn complete(r: &LinearPDESystem, target: Option<u32>) -> Result<LinearPDESystem> {
    let q = target.unwrap_or_else(|| r.order());
    let mut out = LinearPDESystem::new(r.ctx.clone(), r.nfuncs, r.naming);
    for eq in &r.equations {
        let lift = q.saturating_sub(eq.order);
        for (alpha, f) in derivatives_up_to(&eq.form, r.nvars(), lift)? {
            let tag = if alpha.is_zero() { eq.origin.clone() } else { format!("d{:?} {}", alpha, eq.origin) };
            out.push(f, tag);
        }
    }
    Ok(out)
}

/// All derivatives of order at most `steps` of every equation.
pub fn prolong_linear(r: &LinearPDESystem, steps: u32) -> Result<LinearPDESystem> {
    let mut out = LinearPDESystem::new(r.ctx.clone(), r.nfuncs, r.naming);
    for eq in &r.equations {
        for (alpha, f) in derivatives_up_to(&eq.form, r.nvars(), steps)? {
            let tag = if alpha.is_zero() { eq.origin.clone() } else { format!("d{:?} {}", alpha, eq.origin) };
            out.push(f, tag);
        }
    }
    Ok(out)
}

/// Jet coordinates `d^gamma tau_j` with `|gamma| = s`.
pub fn jets_of_order(nfuncs: usize, nvars: usize, s: u32) -> Vec<UnknownSymbol> {
    let mut out = Vec::new();
    for f in 0..nfuncs {
        for g in MultiIndex::all_of_degree(nvars, s) {
            out.push(UnknownSymbol::new(f, g));
        }
    }
    out
}

/// Number of jet coordinates of order at most `s`.
pub fn jet_count(nfuncs: usize, nvars: usize, s: u32) -> usize {
    (0..=s).map(|k| nfuncs * MultiIndex::all_of_degree(nvars, k).len()).sum()
}

/// Kernel of the order-`s` coefficient matrix at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpace {
    pub order: u32,
    pub coordinates: Vec<UnknownSymbol>,
    pub basis: Vec<Vec<Rational>>,
    /// Rows skipped because a coefficient is not determined at the point.
    pub dropped_rows: usize,
}

impl SymbolSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn check_point(r: &LinearPDESystem, y0: &[Rational]) -> Result<()> {
    if y0.len() != r.nvars() {
        return Err(Error::Dimension(format!("point has {} coordinates, system has {} variables", y0.len(), r.nvars())));
    }
    if !r.is_exact() && y0.iter().any(|v| !v.is_zero()) {
        return Err(Error::NotRepresentable("truncated coefficients can only be evaluated at the origin".into()));
    }
    Ok(())
}

fn value_at(c: &TruncatedSeries, y0: &[Rational]) -> Option<Rational> {
    c.eval(y0).ok()
}

/// Top-order rows of `sum_s c_s(y0) v_{s + alpha}` for the order-`q` equations,
/// shifted by every `|alpha| = shift`.
fn top_rows(r: &LinearPDESystem, y0: &[Rational], q: u32, shift: u32, columns: &BTreeMap<UnknownSymbol, usize>) -> (Vec<SparseRow>, usize) {
    let mut rows = Vec::new();
    let mut dropped = 0;
    let shifts = MultiIndex::all_of_degree(r.nvars(), shift);
    for eq in r.equations.iter().filter(|e| e.order == q) {
        let mut top = Vec::new();
        let mut ok = true;
        for (s, c) in eq.form.terms().filter(|(s, _)| s.order() == q) {
            match value_at(c, y0) {
                Some(v) => top.push((s.clone(), v)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            dropped += 1;
            continue;
        }
        for a in &shifts {
            let mut row = BTreeMap::new();
            for (s, v) in &top {
                let col = columns[&UnknownSymbol::new(s.func, s.deriv.mul(a))];
                *row.entry(col).or_insert_with(Rational::zero) += v;
            }
            rows.push(SparseRow::from_map(row));
        }
    }
    (rows, dropped)
}

fn symbol_shifted(r: &LinearPDESystem, y0: &[Rational], q: u32, shift: u32) -> SymbolSpace {
    let coords = jets_of_order(r.nfuncs, r.nvars(), q + shift);
    let columns: BTreeMap<UnknownSymbol, usize> = coords.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let (rows, dropped) = top_rows(r, y0, q, shift, &columns);
    let mut red = RowReducer::new(coords.len());
    for row in rows {
        red.insert(row);
    }
    SymbolSpace { order: q + shift, basis: red.nullspace(), coordinates: coords, dropped_rows: dropped }
}

/// Symbol at `y0` of the equations of order exactly `s`.
pub fn symbol_at(r: &LinearPDESystem, y0: &[Rational], s: u32) -> Result<SymbolSpace> {
    check_point(r, y0)?;
    Ok(symbol_shifted(r, y0, s, 0))
}

/// Result of the finite-type search.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeReport {
    pub finite: bool,
    /// Smallest `r` with `G_{q+r} = 0`.
    pub type_value: Option<u32>,
    /// System order after completion.
    pub order: u32,
    /// `(q + r, dim G_{q+r})` for each order inspected.
    pub symbol_dims: Vec<(u32, usize)>,
    pub r_max: u32,
    pub dropped_rows: usize,
}

/// Computes symbols of the prolongations of the completed system until one
/// vanishes or `r_max` is exceeded.
pub fn finite_type(r: &LinearPDESystem, y0: &[Rational], r_max: u32) -> Result<TypeReport> {
    check_point(r, y0)?;
    let rc = complete(r, None)?;
    let q = rc.order();
    let mut dims = Vec::new();
    let mut dropped = 0;
    for k in 0..=r_max {
        // the order-(q+k) rows of R_{q+k} are the k-th derivatives of the
        // order-q rows, whose top coefficients are unchanged by differentiation
        let sym = symbol_shifted(&rc, y0, q, k);
        dropped = dropped.max(sym.dropped_rows);
        dims.push((q + k, sym.dim()));
        if sym.dim() == 0 {
            return Ok(TypeReport { finite: true, type_value: Some(k), order: q, symbol_dims: dims, r_max, dropped_rows: dropped });
        }
    }
    Ok(TypeReport { finite: false, type_value: None, order: q, symbol_dims: dims, r_max, dropped_rows: dropped })
}

/// Parametric-derivative count at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DimBoundReport {
    /// Jets of order at most `q + type - 1`.
    pub jet_count: usize,
    /// Rank of the lower-order algebraic system.
    pub rank_l: usize,
    pub parametric: Vec<UnknownSymbol>,
    pub bound: usize,
    /// Order of the prolongation used.
    pub prolonged_to: u32,
    pub dropped_rows: usize,
}

/// Column order: higher derivative order first, then later unknowns first,
/// then descending graded-lex derivative index.
fn column_key(s: &UnknownSymbol) -> (Reverse<u32>, Reverse<usize>, Reverse<MultiIndex>) {
    (Reverse(s.order()), Reverse(s.func), Reverse(s.deriv.clone()))
}

fn bound_at_order(rc: &LinearPDESystem, y0: &[Rational], low: u32, top: u32) -> Result<DimBoundReport> {
    let mut cols: Vec<UnknownSymbol> = (0..=top).flat_map(|s| jets_of_order(rc.nfuncs, rc.nvars(), s)).collect();
    cols.sort_by_key(column_key);
    let columns: BTreeMap<UnknownSymbol, usize> = cols.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let q = rc.order();
    let pr = prolong_linear(rc, top - q)?;
    let mut red = RowReducer::new(cols.len());
    let mut dropped = 0;
    for eq in &pr.equations {
        match eval_form(&eq.form, y0, &columns) {
            Some(row) => {
                red.insert(row);
            }
            None => dropped += 1,
        }
    }
    let pivots: BTreeSet<usize> = red.pivots().into_iter().collect();
    let parametric: Vec<UnknownSymbol> = cols.iter().enumerate().filter(|(i, _)| !pivots.contains(i)).map(|(_, s)| s.clone()).collect();
    let jet_count_low = jet_count(rc.nfuncs, rc.nvars(), low);
    let high_jets = cols.len() - jet_count_low;
    Ok(DimBoundReport {
        jet_count: jet_count_low,
        rank_l: red.rank().saturating_sub(high_jets),
        bound: parametric.len(),
        parametric,
        prolonged_to: top,
        dropped_rows: dropped,
    })
}

/// Upper bound for the solution dimension from the parametric derivatives of
/// order at most `q + type - 1`. Further prolongations are added while they
/// lower the count.
pub fn dim_bound(r: &LinearPDESystem, y0: &[Rational], t: &TypeReport) -> Result<DimBoundReport> {
    let Some(ty) = t.type_value else {
        return Err(Error::Precondition(format!("finite type not decided within r_max={}", t.r_max)));
    };
    check_point(r, y0)?;
    let rc = complete(r, None)?;
    let q = rc.order();
    let low = (q + ty).saturating_sub(1);
    let mut best = bound_at_order(&rc, y0, low, q + ty)?;
    for extra in 1..=2 {
        let next = bound_at_order(&rc, y0, low, q + ty + extra)?;
        let stable = next.bound == best.bound;
        if next.bound <= best.bound {
            best = next;
        }
        if stable {
            break;
        }
    }
    Ok(best)
}

/// Polynomial solutions of bounded degree.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSolutions {
    pub degree: u32,
    pub dim: usize,
    /// Each basis element lists one polynomial per unknown function.
    pub basis: Vec<Vec<Polynomial>>,
}

/// Solves the system on the ansatz of all polynomials of degree at most
/// `d_max`. Requires exact coefficients.
pub fn polynomial_solutions(r: &LinearPDESystem, d_max: u32) -> Result<PolynomialSolutions> {
    if !r.is_exact() {
        return Err(Error::Precondition("polynomial ansatz needs exact coefficients".into()));
    }
    let nv = r.nvars();
    let monos = MultiIndex::all_up_to(nv, d_max);
    let unknowns: Vec<(usize, MultiIndex)> = (0..r.nfuncs).flat_map(|f| monos.iter().map(move |m| (f, m.clone()))).collect();
    let index: BTreeMap<(usize, MultiIndex), usize> = unknowns.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut red = RowReducer::new(unknowns.len());
    for eq in &r.equations {
        // output monomial -> row over ansatz coefficients
        let mut rows: BTreeMap<MultiIndex, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (s, c) in eq.form.terms() {
            for g in &monos {
                let Some(rest) = g.checked_div(&s.deriv) else { continue };
                // d^beta z^g = (g! / (g - beta)!) z^(g - beta)
                let mut k = Rational::one();
                for i in 0..nv {
                    for t in 0..s.deriv.get(i) {
                        k *= Rational::from_integer((g.get(i) - t).into());
                    }
                }
                let col = index[&(s.func, g.clone())];
                for (cm, cv) in c.poly().terms() {
                    let e = rows.entry(rest.mul(cm)).or_default().entry(col).or_insert_with(Rational::zero);
                    *e += &k * cv;
                }
            }
        }
        for (_, row) in rows {
            red.insert(SparseRow::from_map(row));
        }
    }
    let ctx = r.ctx.clone();
    let basis = red
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut comps = vec![Polynomial::zero(&ctx); r.nfuncs];
            for (i, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    let (f, m) = &unknowns[i];
                    comps[*f].add_term(m.clone(), c);
                }
            }
            comps
        })
        .collect::<Vec<_>>();
    Ok(PolynomialSolutions { degree: d_max, dim: basis.len(), basis })
}

/// The space `V_s` of constant-coefficient, order-homogeneous systems: the
/// degree-`s` homogeneous polynomial solutions, in derivative coordinates.
pub fn constant_coeff_vs(r: &LinearPDESystem, s: u32) -> Result<SymbolSpace> {
    for eq in &r.equations {
        for (sym, c) in eq.form.terms() {
            if sym.order() != eq.order {
                return Err(Error::Precondition(format!("equation `{}` mixes derivative orders", eq.origin)));
            }
            if !c.poly().is_constant() || !c.known_through(0) {
                return Err(Error::Precondition(format!("equation `{}` has non-constant coefficients", eq.origin)));
            }
        }
    }
    let coords = jets_of_order(r.nfuncs, r.nvars(), s);
    let columns: BTreeMap<UnknownSymbol, usize> = coords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut red = RowReducer::new(coords.len());
    let origin = vec![Rational::zero(); r.nvars()];
    let orders: BTreeSet<u32> = r.equations.iter().map(|e| e.order).filter(|&q| q <= s).collect();
    for q in orders {
        let (rows, _) = top_rows(r, &origin, q, s - q, &columns);
        for row in rows {
            red.insert(row);
        }
    }
    Ok(SymbolSpace { order: s, basis: red.nullspace(), coordinates: coords, dropped_rows: 0 })
}

/// `sigma_lambda(y0)`: rows are the top-order equations, columns the unknowns.
pub fn characteristic_matrix(r: &LinearPDESystem, y0: &[Rational], lambda: &[Rational]) -> Result<(ExactMatrix, bool)> {
    check_point(r, y0)?;
    if lambda.len() != r.nvars() {
        return Err(Error::Dimension("covector length".into()));
    }
    let q = r.order();
    let tops: Vec<_> = r.equations.iter().filter(|e| e.order == q).collect();
    let mut m = ExactMatrix::zeros(tops.len(), r.nfuncs);
    for (i, eq) in tops.iter().enumerate() {
        for (s, c) in eq.form.terms().filter(|(s, _)| s.order() == q) {
            let Some(v) = value_at(c, y0) else { continue };
            let mut lam = v;
            for (k, &e) in s.deriv.exponents().iter().enumerate() {
                lam *= num_traits::pow(lambda[k].clone(), e as usize);
            }
            let cur = m.get(i, s.func) + lam;
            m.set(i, s.func, cur);
        }
    }
    let injective = m.rank() == r.nfuncs;
    Ok((m, injective))
}

/// One sample of a deformation family.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSample {
    pub epsilon: Rational,
    pub type_value: Option<u32>,
    pub bound: Option<usize>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationReport {
    pub baseline: DeformationSample,
    pub samples: Vec<DeformationSample>,
    pub findings: Vec<String>,
}

impl DeformationReport {
    pub fn monotone(&self) -> bool {
        self.samples.iter().all(|s| s.monotone)
    }
}

fn analyse(r: &LinearPDESystem, y0: &[Rational], r_max: u32) -> Result<(Option<u32>, Option<usize>)> {
    let t = finite_type(r, y0, r_max)?;
    if !t.finite {
        return Ok((None, None));
    }
    let b = dim_bound(r, y0, &t)?;
    Ok((t.type_value, Some(b.bound)))
}

/// Checks `type(eps) <= type(0)` and `bound(eps) <= bound(0)` on samples.
pub fn deformation_monotonicity_check(
    family: &dyn Fn(&Rational) -> Result<LinearPDESystem>,
    samples: &[Rational],
    y0: &[Rational],
    r_max: u32,
) -> Result<DeformationReport> {
    let zero = Rational::zero();
    let (t0, b0) = analyse(&family(&zero)?, y0, r_max)?;
    if t0.is_none() {
        return Err(Error::Precondition(format!("unperturbed system: finite type not decided within r_max={r_max}")));
    }
    let baseline = DeformationSample { epsilon: zero, type_value: t0, bound: b0, monotone: true };
    let mut out = Vec::new();
    let mut findings = Vec::new();
    for eps in samples {
        let (t, b) = analyse(&family(eps)?, y0, r_max)?;
        let monotone = matches!((t, t0), (Some(a), Some(c)) if a <= c) && matches!((b, b0), (Some(a), Some(c)) if a <= c);
        if !monotone {
            findings.push(format!("epsilon {eps}: type {t:?}, bound {b:?} exceeds the unperturbed values (epsilon may be too large)"));
        }
        out.push(DeformationSample { epsilon: eps.clone(), type_value: t, bound: b, monotone });
    }
    Ok(DeformationReport { baseline, samples: out, findings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, VarContext};
    use crate::lieeq::{generate_lie_equations, Naming, DEFAULT_SEED};
    use crate::systems::PDESystemS;

    fn one_var(terms: &[(i64, usize, &[usize])]) -> LinearPDESystem {
        let ctx = VarContext::new(["y1", "y2"]);
        let mut f = LinearForm::zero(&ctx);
        for (c, func, d) in terms {
            f.add_term(UnknownSymbol::new(*func, MultiIndex::from_indices(d)), TruncatedSeries::constant(&ctx, rat(*c, 1))).unwrap();
        }
        let mut r = LinearPDESystem::new(ctx, 1, Naming::Generic);
        r.push(f, "eq");
        r
    }

    fn flat_ode() -> LinearPDESystem {
        generate_lie_equations(&PDESystemS::new(1, 1, 4).unwrap(), DEFAULT_SEED).unwrap().system
    }

    #[test]
    fn completion_adds_derivatives() {
        let r = one_var(&[(1, 0, &[0])]);
        let c = complete(&r, Some(2)).unwrap();
        assert_eq!(c.equations.len(), 3);
        assert_eq!(prolong_linear(&r, 0).unwrap(), r);
    }

    #[test]
    fn flat_ode_analysis() {
        let r = flat_ode();
        let y0 = vec![rat(0, 1); 2];
        assert_eq!(symbol_at(&r, &y0, 2).unwrap().dim(), 2);
        let t = finite_type(&r, &y0, DEFAULT_RMAX).unwrap();
        assert_eq!(t.type_value, Some(1));
        let b = dim_bound(&r, &y0, &t).unwrap();
        assert_eq!((b.jet_count, b.rank_l, b.bound), (12, 4, 8));
        let names: Vec<String> = b.parametric.iter().map(|s| r.symbol_name(s)).collect();
        assert_eq!(names, ["theta1_x1x1", "theta1_x1u1", "eta1_x1", "eta1_u1", "theta1_x1", "theta1_u1", "eta1", "theta1"]);
        assert_eq!(polynomial_solutions(&r, 1).unwrap().dim, 6);
        assert_eq!(polynomial_solutions(&r, 2).unwrap().dim, 8);
        assert_eq!(polynomial_solutions(&r, 3).unwrap().dim, 8);
        assert_eq!(constant_coeff_vs(&r, 2).unwrap().dim(), 2);
        assert_eq!(constant_coeff_vs(&r, 3).unwrap().dim(), 0);
        let (_, inj) = characteristic_matrix(&r, &y0, &[rat(1, 1), rat(0, 1)]).unwrap();
        assert!(inj);
        let (_, inj0) = characteristic_matrix(&r, &y0, &[rat(0, 1), rat(0, 1)]).unwrap();
        assert!(!inj0);
    }

    #[test]
    fn laplace_is_not_finite_type() {
        let r = one_var(&[(1, 0, &[0, 0]), (1, 0, &[1, 1])]);
        let t = finite_type(&r, &[rat(0, 1), rat(0, 1)], DEFAULT_RMAX).unwrap();
        assert!(!t.finite);
        assert!(t.symbol_dims.iter().all(|(_, d)| *d == 2));
    }

    #[test]
    fn empty_and_trivial_symbols() {
        let ctx = VarContext::new(["y1"]);
        let empty = LinearPDESystem::new(ctx.clone(), 1, Naming::Generic);
        assert_eq!(symbol_at(&empty, &[rat(0, 1)], 2).unwrap().dim(), 1);
        let mut r = LinearPDESystem::new(ctx.clone(), 1, Naming::Generic);
        r.push(LinearForm::symbol(&ctx, UnknownSymbol::new(0, MultiIndex::new(vec![2]))), "eq");
        assert_eq!(symbol_at(&r, &[rat(0, 1)], 2).unwrap().dim(), 0);
    }
}
