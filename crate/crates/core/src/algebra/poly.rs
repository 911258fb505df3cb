use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Signed, Zero};

use super::{MultiIndex, Rational};
use crate::error::{Error, Result};

/// Ordered list of variable names. Contexts are interned, so equal name lists
/// share one allocation.
#[derive(Debug, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

pub type Ctx = Arc<VarContext>;

fn interned() -> &'static Mutex<HashMap<Vec<String>, Ctx>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<String>, Ctx>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl VarContext {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Ctx {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut cache = interned().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(c) = cache.get(&names) {
            return c.clone();
        }
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let ctx = Arc::new(VarContext { names: names.clone(), index });
        cache.insert(names, ctx.clone());
        ctx
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn is_prefix_of(&self, other: &VarContext) -> bool {
        self.names.len() <= other.names.len() && self.names.iter().zip(&other.names).all(|(a, b)| a == b)
    }
}

/// The longer of two prefix-compatible contexts.
pub fn unify_contexts(a: &Ctx, b: &Ctx) -> Result<Ctx> {
    if Arc::ptr_eq(a, b) {
        return Ok(a.clone());
    }
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::ContextMismatch(format!("[{}] vs [{}]", a.names.join(","), b.names.join(","))))
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Ctx,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(ctx: &Ctx) -> Self {
        Polynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Ctx, c: Rational) -> Self {
        Self::monomial(ctx, MultiIndex::zero(), c)
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn var(ctx: &Ctx, i: usize) -> Self {
        assert!(i < ctx.len(), "variable index {i} out of range");
        Self::monomial(ctx, MultiIndex::unit(i), Rational::one())
    }

    pub fn monomial(ctx: &Ctx, m: MultiIndex, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { ctx: ctx.clone(), terms }
    }

    pub fn from_terms(ctx: &Ctx, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(m.span() <= self.ctx.len());
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&MultiIndex::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_zero())
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Lowest total degree, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Whether variable `i` occurs.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.get(i) > 0)
    }

    /// Largest variable index in use plus one.
    pub fn span(&self) -> usize {
        self.terms.keys().map(|m| m.span()).max().unwrap_or(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let ctx = unify_contexts(&self.ctx, &other.ctx)?;
        let (mut acc, rhs) = if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        acc.ctx = ctx;
        for (m, c) in &rhs.terms {
            acc.add_term(m.clone(), c.clone());
        }
        Ok(acc)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.mul_truncated(other, None)
    }

    /// Product keeping only terms of degree at most `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: Option<u32>) -> Result<Self> {
        let ctx = unify_contexts(&self.ctx, &other.ctx)?;
        let mut out = Polynomial::zero(&ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(d) = max_degree {
                    if ma.degree() + mb.degree() > d {
                        // terms are sorted by degree
                        break;
                    }
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = Polynomial::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e > 0 {
                out.add_term(m.decremented(i).expect("positive exponent"), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Terms of total degree at most `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Evaluates at a point; missing trailing coordinates count as zero.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match point.get(i) {
                    Some(v) => t *= num_traits::pow(v.clone(), e as usize),
                    None => {
                        t = Rational::zero();
                        break;
                    }
                }
            }
            acc += t;
        }
        acc
    }

    /// Moves the polynomial to a prefix-compatible context.
    pub fn rebase(&self, ctx: &Ctx) -> Result<Self> {
        let ok = self.ctx.is_prefix_of(ctx) || (ctx.is_prefix_of(&self.ctx) && self.span() <= ctx.len());
        if !ok {
            return Err(Error::ContextMismatch(format!(
                "cannot rebase from [{}] to [{}]",
                self.ctx.names.join(","),
                ctx.names.join(",")
            )));
        }
        Ok(Polynomial { ctx: ctx.clone(), terms: self.terms.clone() })
    }

    /// Renames variables: variable `i` becomes `map(i)` of `ctx`.
    pub fn remap(&self, ctx: &Ctx, map: impl Fn(usize) -> usize) -> Self {
        let mut out = Polynomial::zero(ctx);
        for (m, c) in &self.terms {
            let mut idx = Vec::new();
            for i in m.to_indices() {
                idx.push(map(i));
            }
            out.add_term(MultiIndex::from_indices(&idx), c.clone());
        }
        out
    }

    pub(crate) fn retain(&mut self, f: impl FnMut(&MultiIndex, &mut Rational) -> bool) {
        self.terms.retain(f);
    }

    fn fmt_monomial(&self, m: &MultiIndex) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.ctx.name(i).to_string()),
                _ => parts.push(format!("{}^{}", self.ctx.name(i), e)),
            }
        }
        parts.join("*")
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        unify_contexts(&self.ctx, &other.ctx).is_ok() && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    /// Terms in descending graded-lex order, e.g. `x1^2 - 3/2*x1*u1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_zero() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", self.fmt_monomial(m))?;
            } else {
                write!(f, "{}*{}", a, self.fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

macro_rules! checked_op {
    ($tr:ident, $f:ident, $method:ident) => {
        /// Panics if the contexts are not prefix-compatible.
        impl $tr for &Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                self.$method(rhs).expect("incompatible polynomial contexts")
            }
        }
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}

checked_op!(Add, add, checked_add);
checked_op!(Sub, sub, checked_sub);
checked_op!(Mul, mul, checked_mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn xy() -> (Polynomial, Polynomial) {
        let ctx = VarContext::new(["x1", "x2"]);
        (Polynomial::var(&ctx, 0), Polynomial::var(&ctx, 1))
    }

    #[test]
    fn difference_of_squares() {
        let (x, y) = xy();
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn display_rational_coefficients() {
        let (x, y) = xy();
        let p = &(&x * &y).scale(&rat(-3, 2)) + &Polynomial::constant(x.ctx(), rat(1, 2));
        assert_eq!(p.to_string(), "-3/2*x1*x2 + 1/2");
    }

    #[test]
    fn prefix_contexts_interoperate() {
        let short = VarContext::new(["x1"]);
        let long = VarContext::new(["x1", "u1"]);
        let p = &Polynomial::var(&short, 0) + &Polynomial::var(&long, 1);
        assert!(Arc::ptr_eq(p.ctx(), &long));
        let other = VarContext::new(["y1"]);
        assert!(Polynomial::var(&other, 0).checked_add(&Polynomial::var(&long, 0)).is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let (x, y) = xy();
        let p = &(&x * &x) * &y;
        assert_eq!(p.diff(0).to_string(), "2*x1*x2");
        assert_eq!(p.eval(&[rat(2, 1), rat(3, 1)]), rat(12, 1));
    }
}
