//! Vector fields `X = sum theta_j d/dx_j + sum eta^k d/du^k` with concrete or
//! symbolic coefficients, their prolongations and truncated flows.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{unify_contexts, Ctx, MultiIndex, Polynomial, Rational, TruncatedSeries};
use crate::error::{Error, Result};
use crate::jets::{total_derivative, JetContext};

/// `d^deriv tau_func` for an unknown coefficient function. `func < n` is
/// `theta_{func+1}`, otherwise `eta^{func-n+1}`; `deriv` is over `z = (x, u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnknownSymbol {
    pub func: usize,
    pub deriv: MultiIndex,
}

impl UnknownSymbol {
    pub fn new(func: usize, deriv: MultiIndex) -> Self {
        UnknownSymbol { func, deriv }
    }

    pub fn order(&self) -> u32 {
        self.deriv.degree()
    }

    /// `theta2_x1u1` style name for a field on `(n, m)`.
    pub fn lie_name(&self, n: usize) -> String {
        let head = if self.func < n { format!("theta{}", self.func + 1) } else { format!("eta{}", self.func - n + 1) };
        if self.deriv.is_zero() {
            return head;
        }
        let mut tail = String::new();
        for i in self.deriv.to_indices() {
            if i < n {
                tail.push_str(&format!("x{}", i + 1));
            } else {
                tail.push_str(&format!("u{}", i - n + 1));
            }
        }
        format!("{head}_{tail}")
    }

    /// `t<j>_<digits>` style name with one-based base-variable digits.
    pub fn generic_name(&self) -> String {
        if self.deriv.is_zero() {
            return format!("t{}", self.func + 1);
        }
        let digits: String = self.deriv.to_indices().iter().map(|i| char::from(b'1' + *i as u8)).collect();
        format!("t{}_{}", self.func + 1, digits)
    }
}

/// Linear combination of unknown symbols with series coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearForm {
    ctx: Ctx,
    terms: BTreeMap<UnknownSymbol, TruncatedSeries>,
}

impl LinearForm {
    pub fn zero(ctx: &Ctx) -> Self {
        LinearForm { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn symbol(ctx: &Ctx, s: UnknownSymbol) -> Self {
        let mut f = Self::zero(ctx);
        f.terms.insert(s, TruncatedSeries::constant(ctx, Rational::one()));
        f
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UnknownSymbol, &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &UnknownSymbol) -> Option<&TruncatedSeries> {
        self.terms.get(s)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order among the symbols present.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(UnknownSymbol::order).max().unwrap_or(0)
    }

    /// Adds `c * s`. Exact zero coefficients are not stored; coefficients that
    /// vanish only through a cap are kept since they are not known to be zero.
    pub fn add_term(&mut self, s: UnknownSymbol, c: TruncatedSeries) -> Result<()> {
        self.ctx = unify_contexts(&self.ctx, c.ctx())?;
        let sum = match self.terms.remove(&s) {
            Some(old) => old.checked_add(&c)?,
            None => c,
        };
        if !(sum.is_zero() && sum.is_exact()) {
            self.terms.insert(s, sum);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.ctx);
        if c.is_zero() {
            return out;
        }
        for (s, v) in &self.terms {
            out.terms.insert(s.clone(), v.scale(c));
        }
        out
    }

    pub fn mul_series(&self, f: &TruncatedSeries) -> Result<Self> {
        let mut out = Self::zero(&unify_contexts(&self.ctx, f.ctx())?);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c.checked_mul(f)?)?;
        }
        Ok(out)
    }

    /// Applies `op` to every coefficient.
    pub fn map_coefficients(&self, ctx: &Ctx, mut op: impl FnMut(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<Self> {
        let mut out = Self::zero(ctx);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), op(c)?)?;
        }
        Ok(out)
    }

    /// Restricts to the symbols accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&UnknownSymbol) -> bool) -> Self {
        LinearForm { ctx: self.ctx.clone(), terms: self.terms.iter().filter(|(s, _)| keep(s)).map(|(s, c)| (s.clone(), c.clone())).collect() }
    }

    /// Replaces every symbol by the corresponding derivative of a concrete
    /// field's coefficients, both over `z`.
    pub fn evaluate_field(&self, field: &ConcreteVectorField) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::exact(Polynomial::zero(&unify_contexts(&self.ctx, field.ctx())?));
        for (s, c) in &self.terms {
            let v = field.derivative(s.func, &s.deriv)?;
            acc = acc.checked_add(&c.checked_mul(&v)?)?;
        }
        Ok(acc)
    }

    /// Formats with the given symbol naming.
    pub fn display_with(&self, name: impl Fn(&UnknownSymbol) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        // highest symbols first
        for (s, c) in self.terms.iter().rev() {
            let body = if c.poly().num_terms() == 1 {
                let (mono, v) = c.poly().terms().next().expect("one term");
                let sign = if *v < Rational::zero() { "-" } else { "+" };
                let single = Polynomial::monomial(c.ctx(), mono.clone(), num_traits::Signed::abs(v));
                if single.is_constant() && single.constant_term().is_one() {
                    format!("{sign} {}", name(s))
                } else {
                    format!("{sign} {}*{}", single, name(s))
                }
            } else {
                format!("+ ({})*{}", c.poly(), name(s))
            };
            parts.push(body);
        }
        let s = parts.join(" ");
        match s.strip_prefix("+ ") {
            Some(rest) => rest.to_string(),
            None => format!("-{}", &s[2..]),
        }
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(UnknownSymbol::generic_name))
    }
}

/// Ring of prolongation coefficients: polynomials in jet coordinates with
/// coefficients that carry a total derivative. Shared by the concrete mode
/// (plain series) and the symbolic mode (linear forms in unknown symbols).
pub trait JetAlgebra: Clone + fmt::Debug + PartialEq {
    fn zero_in(ctx: &Ctx) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn mul_jet(&self, f: &TruncatedSeries) -> Result<Self>;
    fn scale(&self, c: &Rational) -> Self;
    fn total_derivative(&self, n: usize, m: usize, i: usize) -> Result<Self>;
}

impl JetAlgebra for TruncatedSeries {
    fn zero_in(ctx: &Ctx) -> Self {
        TruncatedSeries::exact(Polynomial::zero(ctx))
    }
    fn add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other)
    }
    fn mul_jet(&self, f: &TruncatedSeries) -> Result<Self> {
        self.checked_mul(f)
    }
    fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries::scale(self, c)
    }
    fn total_derivative(&self, n: usize, m: usize, i: usize) -> Result<Self> {
        total_derivative(n, m, self, i)
    }
}

impl JetAlgebra for LinearForm {
    fn zero_in(ctx: &Ctx) -> Self {
        LinearForm::zero(ctx)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other)
    }
    fn mul_jet(&self, f: &TruncatedSeries) -> Result<Self> {
        self.mul_series(f)
    }
    fn scale(&self, c: &Rational) -> Self {
        LinearForm::scale(self, c)
    }
    /// `D_i(c s) = D_i(c) s + c s_{x_i} + sum_k c u^k_i s_{u^k}`.
    fn total_derivative(&self, n: usize, m: usize, i: usize) -> Result<Self> {
        let mut out = LinearForm::zero(&self.ctx);
        let j1 = JetContext::new(n, m, 1)?;
        for (s, c) in &self.terms {
            out.add_term(s.clone(), total_derivative(n, m, c, i)?)?;
            out.add_term(UnknownSymbol::new(s.func, s.deriv.incremented(i)), c.clone())?;
            for k in 0..m {
                let uki = j1.u_series(k, &MultiIndex::unit(i));
                out.add_term(UnknownSymbol::new(s.func, s.deriv.incremented(n + k)), c.checked_mul(&uki)?)?;
            }
        }
        Ok(out)
    }
}

/// Source of the coefficients `theta_j`, `eta^k` and their `z`-derivatives.
pub trait FieldCoefficients {
    type Elem: JetAlgebra;
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    /// `d^deriv tau_func` as an element over the jet context `J^0`.
    fn component(&self, func: usize, deriv: &MultiIndex) -> Result<Self::Elem>;
}

/// Field whose coefficients are opaque unknown functions of `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicVectorField {
    pub n: usize,
    pub m: usize,
}

impl SymbolicVectorField {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        JetContext::new(n, m, 0)?;
        Ok(SymbolicVectorField { n, m })
    }
}

impl FieldCoefficients for SymbolicVectorField {
    type Elem = LinearForm;
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m
    }
    fn component(&self, func: usize, deriv: &MultiIndex) -> Result<LinearForm> {
        let ctx = JetContext::new(self.n, self.m, 0)?.vars().clone();
        Ok(LinearForm::symbol(&ctx, UnknownSymbol::new(func, deriv.clone())))
    }
}

/// Field with series coefficients in `z = (x, u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteVectorField {
    n: usize,
    m: usize,
    theta: Vec<TruncatedSeries>,
    eta: Vec<TruncatedSeries>,
}

impl ConcreteVectorField {
    pub fn new(n: usize, m: usize, theta: Vec<TruncatedSeries>, eta: Vec<TruncatedSeries>) -> Result<Self> {
        if theta.len() != n || eta.len() != m {
            return Err(Error::Dimension(format!("field on (n={n}, m={m}) needs {n} theta and {m} eta coefficients")));
        }
        let ctx = JetContext::new(n, m, 0)?.vars().clone();
        let fix = |s: &TruncatedSeries| -> Result<TruncatedSeries> {
            if s.poly().span() > ctx.len() {
                return Err(Error::Invalid("field coefficient involves jet coordinates beyond (x, u)".into()));
            }
            s.rebase(&ctx)
        };
        let theta = theta.iter().map(fix).collect::<Result<_>>()?;
        let eta = eta.iter().map(fix).collect::<Result<_>>()?;
        Ok(ConcreteVectorField { n, m, theta, eta })
    }

    pub fn ctx(&self) -> &Ctx {
        self.theta[0].ctx()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> &[TruncatedSeries] {
        &self.theta
    }

    pub fn eta(&self) -> &[TruncatedSeries] {
        &self.eta
    }

    pub fn coefficient(&self, func: usize) -> &TruncatedSeries {
        if func < self.n {
            &self.theta[func]
        } else {
            &self.eta[func - self.n]
        }
    }

    pub fn derivative(&self, func: usize, deriv: &MultiIndex) -> Result<TruncatedSeries> {
        if func >= self.n + self.m {
            return Err(Error::Invalid(format!("no coefficient function {func}")));
        }
        let mut s = self.coefficient(func).clone();
        for v in deriv.to_indices() {
            s = s.diff(v);
        }
        Ok(s)
    }

    /// `a X + b Y`
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        let mix = |p: &[TruncatedSeries], q: &[TruncatedSeries]| -> Result<Vec<TruncatedSeries>> {
            p.iter().zip(q).map(|(x, y)| x.scale(a).checked_add(&y.scale(b))).collect()
        };
        Ok(ConcreteVectorField { n: self.n, m: self.m, theta: mix(&self.theta, &other.theta)?, eta: mix(&self.eta, &other.eta)? })
    }

    /// `X(f) = sum theta_j f_{x_j} + sum eta^k f_{u^k}`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::exact(Polynomial::zero(&unify_contexts(self.ctx(), f.ctx())?));
        for func in 0..self.n + self.m {
            acc = acc.checked_add(&self.coefficient(func).checked_mul(&f.diff(func))?)?;
        }
        Ok(acc)
    }
}

impl FieldCoefficients for ConcreteVectorField {
    type Elem = TruncatedSeries;
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m
    }
    fn component(&self, func: usize, deriv: &MultiIndex) -> Result<TruncatedSeries> {
        self.derivative(func, deriv)
    }
}

/// Coefficients of `X^(r)`: `theta_j` and `eta^mu_alpha` for `|alpha| <= r`,
/// keyed by `(mu, alpha)` with `alpha` a multi-index over `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlongedField<E> {
    pub n: usize,
    pub m: usize,
    pub order: u32,
    pub theta: Vec<E>,
    pub eta: BTreeMap<(usize, MultiIndex), E>,
}

impl<E: JetAlgebra> ProlongedField<E> {
    pub fn get(&self, mu: usize, alpha: &MultiIndex) -> Option<&E> {
        self.eta.get(&(mu, alpha.clone()))
    }
}

fn base_ctx(n: usize, m: usize) -> Result<Ctx> {
    Ok(JetContext::new(n, m, 0)?.vars().clone())
}

/// Prolongation by the recursion
/// `eta^mu_{alpha+i} = D_i eta^mu_alpha - sum_j (D_i theta^j) u^mu_{alpha+j}`,
/// adding the largest index of each sorted multi-index last.
pub fn prolong_recursive<F: FieldCoefficients>(x: &F, r: u32) -> Result<ProlongedField<F::Elem>> {
    let (n, m) = (x.n(), x.m());
    let jet = JetContext::new(n, m, r)?;
    let theta: Vec<F::Elem> = (0..n).map(|j| x.component(j, &MultiIndex::zero())).collect::<Result<_>>()?;
    let mut dtheta: Vec<Vec<F::Elem>> = Vec::with_capacity(n);
    for i in 0..n {
        dtheta.push(theta.iter().map(|t| t.total_derivative(n, m, i)).collect::<Result<_>>()?);
    }
    let mut eta = BTreeMap::new();
    for mu in 0..m {
        eta.insert((mu, MultiIndex::zero()), x.component(n + mu, &MultiIndex::zero())?);
    }
    for s in 1..=r {
        for mu in 0..m {
            for alpha in MultiIndex::all_of_degree(n, s) {
                let i = *alpha.to_indices().last().expect("nonempty");
                let beta = alpha.decremented(i).expect("contains i");
                let mut e = eta[&(mu, beta.clone())].total_derivative(n, m, i)?;
                for (j, dt) in dtheta[i].iter().enumerate() {
                    e = e.sub(&dt.mul_jet(&jet.u_series(mu, &beta.incremented(j)))?)?;
                }
                eta.insert((mu, alpha), e);
            }
        }
    }
    Ok(ProlongedField { n, m, order: r, theta, eta })
}

/// Second prolongation assembled from the closed formulas for `eta^mu_i`,
/// `eta^mu_{i1 i2}` (`i1 != i2`), `eta^mu_{ii}` and the second-jet-linear
/// terms `Lambda^mu`.
pub fn prolong2_closed<F: FieldCoefficients>(x: &F) -> Result<ProlongedField<F::Elem>> {
    let (n, m) = (x.n(), x.m());
    let jet = JetContext::new(n, m, 2)?;
    let zero = F::Elem::zero_in(&base_ctx(n, m)?);
    // derivative slots over z: x_i -> i, u^k -> n + k
    let th = |j: usize, d: &[usize]| x.component(j, &MultiIndex::from_indices(d));
    let et = |mu: usize, d: &[usize]| x.component(n + mu, &MultiIndex::from_indices(d));
    let xv = |i: usize| i;
    let uv = |k: usize| n + k;
    let u1 = |k: usize, i: usize| jet.u_series(k, &MultiIndex::unit(i));
    let u2 = |k: usize, i: usize, j: usize| jet.u_series(k, &MultiIndex::from_indices(&[i, j]));
    let term = |acc: &mut F::Elem, c: i64, e: F::Elem, vars: &[TruncatedSeries]| -> Result<()> {
        let mut t = e.scale(&Rational::from_integer(c.into()));
        for v in vars {
            t = t.mul_jet(v)?;
        }
        *acc = acc.add(&t)?;
        Ok(())
    };

    let theta: Vec<F::Elem> = (0..n).map(|j| th(j, &[])).collect::<Result<_>>()?;
    let mut eta = BTreeMap::new();
    for mu in 0..m {
        eta.insert((mu, MultiIndex::zero()), et(mu, &[])?);
        for i1 in 0..n {
            let mut e = zero.clone();
            term(&mut e, 1, et(mu, &[xv(i1)])?, &[])?;
            for k in 0..m {
                term(&mut e, 1, et(mu, &[uv(k)])?, &[u1(k, i1)])?;
            }
            for j in 0..n {
                term(&mut e, -1, th(j, &[xv(i1)])?, &[u1(mu, j)])?;
                for k in 0..m {
                    term(&mut e, -1, th(j, &[uv(k)])?, &[u1(k, i1), u1(mu, j)])?;
                }
            }
            eta.insert((mu, MultiIndex::unit(i1)), e);
        }
    }

    let lambda = |mu: usize, i1: usize, i2: usize| -> Result<F::Elem> {
        let mut l = zero.clone();
        for s in 0..m {
            term(&mut l, 1, et(mu, &[uv(s)])?, &[u2(s, i2, i1)])?;
        }
        for p in 0..n {
            term(&mut l, -1, th(p, &[xv(i1)])?, &[u2(mu, i2, p)])?;
        }
        for j in 0..n {
            term(&mut l, -1, th(j, &[xv(i2)])?, &[u2(mu, i1, j)])?;
        }
        for p in 0..n {
            for q in 0..m {
                term(&mut l, -1, th(p, &[uv(q)])?, &[u2(q, i2, i1), u1(mu, p)])?;
                term(&mut l, -1, th(p, &[uv(q)])?, &[u2(mu, i2, p), u1(q, i1)])?;
            }
        }
        for j in 0..n {
            for s in 0..m {
                term(&mut l, -1, th(j, &[uv(s)])?, &[u2(mu, i1, j), u1(s, i2)])?;
            }
        }
        Ok(l)
    };

    for mu in 0..m {
        for i1 in 0..n {
            for i2 in i1 + 1..n {
                let mut e = zero.clone();
                term(&mut e, 1, et(mu, &[xv(i2), xv(i1)])?, &[])?;
                term(&mut e, 1, et(mu, &[xv(i2), uv(mu)])?, &[u1(mu, i1)])?;
                term(&mut e, -1, th(i1, &[xv(i2), xv(i1)])?, &[u1(mu, i1)])?;
                term(&mut e, 1, et(mu, &[xv(i1), uv(mu)])?, &[u1(mu, i2)])?;
                term(&mut e, -1, th(i2, &[xv(i2), xv(i1)])?, &[u1(mu, i2)])?;
                for k in (0..m).filter(|&k| k != mu) {
                    term(&mut e, 1, et(mu, &[xv(i2), uv(k)])?, &[u1(k, i1)])?;
                    term(&mut e, 1, et(mu, &[xv(i1), uv(k)])?, &[u1(k, i2)])?;
                }
                for k in (0..n).filter(|&k| k != i1 && k != i2) {
                    term(&mut e, -1, th(k, &[xv(i2), xv(i1)])?, &[u1(mu, k)])?;
                }
                for k in 0..m {
                    for j in (0..n).filter(|&j| j != i2) {
                        term(&mut e, -1, th(j, &[xv(i2), uv(k)])?, &[u1(k, i1), u1(mu, j)])?;
                    }
                }
                for i in 0..m {
                    for s in (0..n).filter(|&s| s != i1) {
                        term(&mut e, -1, th(s, &[xv(i1), uv(i)])?, &[u1(i, i2), u1(mu, s)])?;
                    }
                }
                for r in (0..m).filter(|&r| r != mu) {
                    for p in (0..m).filter(|&p| p != mu) {
                        term(&mut e, 1, et(mu, &[uv(r), uv(p)])?, &[u1(r, i2), u1(p, i1)])?;
                    }
                }
                for t in (0..m).filter(|&t| t != mu) {
                    term(&mut e, -1, th(i2, &[xv(i2), uv(t)])?, &[u1(t, i1), u1(mu, i2)])?;
                    term(&mut e, 1, et(mu, &[uv(mu), uv(t)])?, &[u1(t, i1), u1(mu, i2)])?;
                }
                for q in (0..m).filter(|&q| q != mu) {
                    term(&mut e, -1, th(i1, &[uv(q), xv(i1)])?, &[u1(q, i2), u1(mu, i1)])?;
                    term(&mut e, 1, et(mu, &[uv(q), uv(mu)])?, &[u1(q, i2), u1(mu, i1)])?;
                }
                term(&mut e, 1, et(mu, &[uv(mu), uv(mu)])?, &[u1(mu, i1), u1(mu, i2)])?;
                term(&mut e, -1, th(i2, &[xv(i2), uv(mu)])?, &[u1(mu, i1), u1(mu, i2)])?;
                term(&mut e, -1, th(i1, &[xv(i1), uv(mu)])?, &[u1(mu, i1), u1(mu, i2)])?;
                for a in 0..m {
                    for b in 0..m {
                        for s in 0..n {
                            term(&mut e, -1, th(s, &[uv(a), uv(b)])?, &[u1(a, i2), u1(b, i1), u1(mu, s)])?;
                        }
                    }
                }
                e = e.add(&lambda(mu, i1, i2)?)?;
                eta.insert((mu, MultiIndex::from_indices(&[i1, i2])), e);
            }
            let i = i1;
            let mut e = zero.clone();
            term(&mut e, 1, et(mu, &[xv(i), xv(i)])?, &[])?;
            term(&mut e, 2, et(mu, &[xv(i), uv(mu)])?, &[u1(mu, i)])?;
            term(&mut e, -1, th(i, &[xv(i), xv(i)])?, &[u1(mu, i)])?;
            for k in (0..m).filter(|&k| k != mu) {
                term(&mut e, 2, et(mu, &[xv(i), uv(k)])?, &[u1(k, i)])?;
            }
            for k in (0..n).filter(|&k| k != i) {
                term(&mut e, -1, th(k, &[xv(i), xv(i)])?, &[u1(mu, k)])?;
            }
            for k in 0..m {
                for j in (0..n).filter(|&j| j != i) {
                    term(&mut e, -2, th(j, &[xv(i), uv(k)])?, &[u1(k, i), u1(mu, j)])?;
                }
            }
            for r in (0..m).filter(|&r| r != mu) {
                for p in (0..m).filter(|&p| p != mu) {
                    term(&mut e, 1, et(mu, &[uv(r), uv(p)])?, &[u1(r, i), u1(p, i)])?;
                }
            }
            for t in (0..m).filter(|&t| t != mu) {
                term(&mut e, -1, th(i, &[xv(i), uv(t)])?, &[u1(t, i), u1(mu, i)])?;
                term(&mut e, 1, et(mu, &[uv(mu), uv(t)])?, &[u1(t, i), u1(mu, i)])?;
            }
            for q in (0..m).filter(|&q| q != mu) {
                term(&mut e, -1, th(i, &[xv(i), uv(q)])?, &[u1(q, i), u1(mu, i)])?;
                term(&mut e, 1, et(mu, &[uv(q), uv(mu)])?, &[u1(q, i), u1(mu, i)])?;
            }
            term(&mut e, 1, et(mu, &[uv(mu), uv(mu)])?, &[u1(mu, i), u1(mu, i)])?;
            term(&mut e, -2, th(i, &[xv(i), uv(mu)])?, &[u1(mu, i), u1(mu, i)])?;
            for a in 0..m {
                for b in 0..m {
                    for s in 0..n {
                        term(&mut e, -1, th(s, &[uv(a), uv(b)])?, &[u1(a, i), u1(b, i), u1(mu, s)])?;
                    }
                }
            }
            e = e.add(&lambda(mu, i, i)?)?;
            eta.insert((mu, MultiIndex::from_indices(&[i, i])), e);
        }
    }
    Ok(ProlongedField { n, m, order: 2, theta, eta })
}

/// Lie series `z_i* = sum_{k <= cap} t^k / k! X^k(z_i)`, truncated at total
/// degree `cap`. Exact through `cap` when the coefficients vanish to second
/// order at the origin, since then each application of `X` raises the degree.
pub fn lie_series_flow(x: &ConcreteVectorField, t: &Rational, cap: u32) -> Result<Vec<TruncatedSeries>> {
    let ctx = x.ctx().clone();
    let limit = Some(i64::from(cap));
    let mut out = Vec::with_capacity(x.n + x.m);
    for i in 0..x.n + x.m {
        let mut term = TruncatedSeries::var(&ctx, i);
        let mut acc = term.truncate(limit);
        let mut factor = Rational::one();
        for k in 1..=cap {
            term = x.apply(&term)?.truncate(limit);
            factor = factor * t / Rational::from_integer(k.into());
            acc = acc.checked_add(&term.scale(&factor))?;
            if term.is_zero() {
                break;
            }
        }
        out.push(TruncatedSeries::with_cap(acc.into_poly(), limit));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn one_dim(theta: Polynomial, eta: Polynomial) -> ConcreteVectorField {
        ConcreteVectorField::new(1, 1, vec![TruncatedSeries::exact(theta)], vec![TruncatedSeries::exact(eta)]).unwrap()
    }

    #[test]
    fn symbolic_first_prolongation() {
        let x = SymbolicVectorField::new(1, 1).unwrap();
        let p = prolong_recursive(&x, 1).unwrap();
        let e1 = p.get(0, &MultiIndex::unit(0)).unwrap();
        let s = e1.display_with(|s| s.lie_name(1));
        assert_eq!(s, "eta1_x1 + u1_1*eta1_u1 - u1_1*theta1_x1 - u1_1^2*theta1_u1");
    }

    #[test]
    fn euler_field_prolongation() {
        let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
        let f = one_dim(Polynomial::var(&ctx, 0), Polynomial::zero(&ctx));
        let p = prolong_recursive(&f, 2).unwrap();
        assert_eq!(p.get(0, &MultiIndex::unit(0)).unwrap().poly().to_string(), "-u1_1");
        assert_eq!(p.get(0, &MultiIndex::new(vec![2])).unwrap().poly().to_string(), "-2*u1_11");
    }

    #[test]
    fn translation_has_trivial_prolongation() {
        let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
        let f = one_dim(Polynomial::one(&ctx), Polynomial::zero(&ctx));
        let p = prolong_recursive(&f, 3).unwrap();
        assert!(p.eta.values().all(|e| e.is_zero()));
        assert_eq!(prolong2_closed(&f).unwrap().eta, prolong_recursive(&f, 2).unwrap().eta);
    }

    #[test]
    fn closed_form_matches_recursion_symbolically() {
        for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)] {
            let x = SymbolicVectorField::new(n, m).unwrap();
            assert_eq!(prolong2_closed(&x).unwrap().eta, prolong_recursive(&x, 2).unwrap().eta, "n={n} m={m}");
        }
    }

    #[test]
    fn flows() {
        let ctx = JetContext::new(1, 1, 0).unwrap().vars().clone();
        let x = Polynomial::var(&ctx, 0);
        let f = one_dim(Polynomial::one(&ctx), Polynomial::zero(&ctx));
        assert_eq!(lie_series_flow(&f, &rat(1, 1), 4).unwrap()[0].poly().to_string(), "x1 + 1");
        let g = one_dim(x.pow(2), Polynomial::zero(&ctx));
        let fl = lie_series_flow(&g, &rat(2, 1), 4).unwrap();
        // x / (1 - t x) with t = 2
        assert_eq!(fl[0].poly().to_string(), "8*x1^4 + 4*x1^3 + 2*x1^2 + x1");
        let e = one_dim(x.clone(), Polynomial::zero(&ctx));
        assert_eq!(lie_series_flow(&e, &rat(1, 1), 3).unwrap()[0].poly().to_string(), "8/3*x1");
    }
}
