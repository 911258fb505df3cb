use std::fmt;

use num_traits::Zero;

use super::{unify_contexts, Ctx, MultiIndex, Polynomial, Rational};
use crate::error::{Error, Result};

/// Power series known through total degree `cap`; `cap = None` marks an
/// exact polynomial. A negative cap means no coefficient is known.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: Polynomial,
    cap: Option<i64>,
}

fn min_cap(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl TruncatedSeries {
    pub fn new(poly: Polynomial, cap: Option<u32>) -> Self {
        Self::with_cap(poly, cap.map(i64::from))
    }

    /// Same as [`TruncatedSeries::new`] but allows a negative cap.
    pub fn with_cap(mut poly: Polynomial, cap: Option<i64>) -> Self {
        if let Some(c) = cap {
            poly.retain(|m, _| (m.degree() as i64) <= c);
        }
        TruncatedSeries { poly, cap }
    }

    pub fn exact(poly: Polynomial) -> Self {
        TruncatedSeries { poly, cap: None }
    }

    pub fn zero(ctx: &Ctx, cap: Option<u32>) -> Self {
        Self::new(Polynomial::zero(ctx), cap)
    }

    pub fn constant(ctx: &Ctx, c: Rational) -> Self {
        Self::exact(Polynomial::constant(ctx, c))
    }

    pub fn var(ctx: &Ctx, i: usize) -> Self {
        Self::exact(Polynomial::var(ctx, i))
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn ctx(&self) -> &Ctx {
        self.poly.ctx()
    }

    pub fn cap(&self) -> Option<i64> {
        self.cap
    }

    pub fn is_exact(&self) -> bool {
        self.cap.is_none()
    }

    /// True if every coefficient of degree at most `d` is determined.
    pub fn known_through(&self, d: i64) -> bool {
        self.cap.is_none_or(|c| c >= d)
    }

    /// Zero as far as known (exact zero or zero through the cap).
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Lowest degree that may carry a nonzero coefficient, `None` for the exact
    /// zero series.
    pub fn order(&self) -> Option<i64> {
        match self.poly.min_degree() {
            Some(d) => Some(d as i64),
            None => self.cap.map(|c| c + 1),
        }
    }

    pub fn truncate(&self, cap: Option<i64>) -> Self {
        Self::with_cap(self.poly.clone(), min_cap(self.cap, cap))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self::with_cap(self.poly.checked_add(&other.poly)?, min_cap(self.cap, other.cap)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::with_cap(self.poly.checked_sub(&other.poly)?, min_cap(self.cap, other.cap)))
    }

    /// Product; the result is known through min(capA + ord B, capB + ord A).
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, None)
    }

    /// Product additionally truncated at `limit`.
    pub fn mul_capped(&self, other: &Self, limit: Option<i64>) -> Result<Self> {
        let cap = |c: Option<i64>, o: Option<i64>| -> Option<i64> {
            match (c, o) {
                (None, _) => None,
                // the other factor is the exact zero
                (Some(_), None) => None,
                (Some(c), Some(o)) => Some(c + o),
            }
        };
        let a_ord = self.order();
        let b_ord = other.order();
        if (a_ord.is_none() && self.cap.is_none()) || (b_ord.is_none() && other.cap.is_none()) {
            let ctx = unify_contexts(self.ctx(), other.ctx())?;
            return Ok(Self::exact(Polynomial::zero(&ctx)));
        }
        let c = min_cap(min_cap(cap(self.cap, b_ord), cap(other.cap, a_ord)), limit);
        let max_deg = c.map(|c| c.max(-1));
        let poly = match max_deg {
            Some(d) if d < 0 => Polynomial::zero(&unify_contexts(self.ctx(), other.ctx())?),
            Some(d) => self.poly.mul_truncated(&other.poly, Some(d as u32))?,
            None => self.poly.mul_truncated(&other.poly, None)?,
        };
        Ok(Self::with_cap(poly, c))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { poly: -&self.poly, cap: self.cap }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::exact(Polynomial::zero(self.ctx()));
        }
        TruncatedSeries { poly: self.poly.scale(c), cap: self.cap }
    }

    /// Partial derivative; the cap drops by one.
    pub fn diff(&self, i: usize) -> Self {
        Self::with_cap(self.poly.diff(i), self.cap.map(|c| c - 1))
    }

    pub fn constant_term(&self) -> Result<Rational> {
        if !self.known_through(0) {
            return Err(Error::CapExhausted("constant term of a series with no known coefficients".into()));
        }
        Ok(self.poly.constant_term())
    }

    /// Value at a point. Truncated series can only be evaluated at the origin.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if self.cap.is_none() {
            return Ok(self.poly.eval(point));
        }
        if point.iter().all(|v| v.is_zero()) {
            return self.constant_term();
        }
        Err(Error::NotRepresentable("truncated series evaluated away from the origin".into()))
    }

    pub fn rebase(&self, ctx: &Ctx) -> Result<Self> {
        Ok(TruncatedSeries { poly: self.poly.rebase(ctx)?, cap: self.cap })
    }

    pub fn remap(&self, ctx: &Ctx, map: impl Fn(usize) -> usize) -> Self {
        TruncatedSeries { poly: self.poly.remap(ctx, map), cap: self.cap }
    }

    /// Substitutes `images[i]` for variable `i` of `self`; variables beyond
    /// `images` must not occur. Images live in `target`. The result is
    /// truncated at `limit`.
    pub fn compose(&self, target: &Ctx, images: &[TruncatedSeries], limit: Option<u32>) -> Result<Self> {
        let span = self.poly.span();
        if span > images.len() {
            return Err(Error::Dimension(format!("substitution covers {} variables, series uses {}", images.len(), span)));
        }
        if self.cap.is_some() {
            if images.len() < self.ctx().len() {
                return Err(Error::Dimension("truncated series needs an image for every variable".into()));
            }
            for (i, img) in images.iter().enumerate().take(self.ctx().len()) {
                let c0 = img.constant_term().map_err(|_| {
                    Error::NotRepresentable(format!("image of `{}` has unknown constant term", self.ctx().name(i)))
                })?;
                if !c0.is_zero() {
                    return Err(Error::NotRepresentable(format!(
                        "image of `{}` has nonzero constant term but the series is truncated",
                        self.ctx().name(i)
                    )));
                }
            }
        }
        let limit = min_cap(limit.map(i64::from), self.cap);
        let mut acc = Self::with_cap(Polynomial::zero(target), limit);
        let mut powers = Vec::with_capacity(images.len());
        for s in images {
            powers.push(vec![Self::constant(target, Rational::from_integer(1.into())), s.rebase(target)?]);
        }
        for (m, c) in self.poly.terms() {
            let mut term = Self::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("nonempty").mul_capped(&powers[i][1], limit)?;
                    powers[i].push(next);
                }
                term = term.mul_capped(&powers[i][e as usize], limit)?;
            }
            acc = acc.checked_add(&term)?;
        }
        Ok(acc.truncate(limit))
    }

    /// Substitutes series for some variables, leaving the others in place.
    pub fn substitute(&self, assignments: &[(usize, TruncatedSeries)], limit: Option<u32>) -> Result<Self> {
        let mut ctx = self.ctx().clone();
        for (_, s) in assignments {
            ctx = unify_contexts(&ctx, s.ctx())?;
        }
        let mut images: Vec<TruncatedSeries> = (0..ctx.len()).map(|i| Self::var(&ctx, i)).collect();
        for (i, s) in assignments {
            images[*i] = s.rebase(&ctx)?;
        }
        self.compose(&ctx, &images, limit)
    }

    pub fn coefficient(&self, m: &MultiIndex) -> Rational {
        self.poly.coefficient(m)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cap {
            None => write!(f, "{}", self.poly),
            Some(c) => write!(f, "{} + O({})", self.poly, c + 1),
        }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, VarContext};

    fn ctx() -> Ctx {
        VarContext::new(["x1", "x2"])
    }

    #[test]
    fn product_cap_uses_orders() {
        let c = ctx();
        let x = TruncatedSeries::var(&c, 0);
        let a = TruncatedSeries::new(Polynomial::var(&c, 0), Some(3));
        // x is exact, so the product is known through 3 + 1
        let p = a.checked_mul(&x).unwrap();
        assert_eq!(p.cap(), Some(4));
        let one = TruncatedSeries::new(Polynomial::one(&c), Some(3));
        assert_eq!(a.checked_mul(&one).unwrap().cap(), Some(3));
    }

    #[test]
    fn derivative_lowers_cap() {
        let c = ctx();
        let s = TruncatedSeries::new(Polynomial::var(&c, 0).pow(2), Some(2));
        let d = s.diff(0);
        assert_eq!(d.cap(), Some(1));
        assert_eq!(d.poly().to_string(), "2*x1");
        let dd = d.diff(0).diff(0);
        assert!(dd.constant_term().is_err());
    }

    #[test]
    fn substitution_rejects_constant_images_into_truncated() {
        let c = ctx();
        let s = TruncatedSeries::new(Polynomial::var(&c, 0), Some(2));
        let img = TruncatedSeries::constant(&c, rat(1, 1));
        assert!(s.substitute(&[(0, img.clone())], None).is_err());
        let exact = TruncatedSeries::var(&c, 0);
        assert_eq!(exact.substitute(&[(0, img)], None).unwrap().coefficient(&MultiIndex::zero()), rat(1, 1));
    }

    #[test]
    fn geometric_composition() {
        // 1/(1-y) truncated, composed with y = x + x^2
        let c = ctx();
        let y = Polynomial::var(&c, 1);
        let mut g = Polynomial::zero(&c);
        for k in 0..5 {
            g = &g + &y.pow(k);
        }
        let g = TruncatedSeries::new(g, Some(4));
        let x = Polynomial::var(&c, 0);
        let img = TruncatedSeries::exact(&x + &x.pow(2));
        let r = g.substitute(&[(1, img)], None).unwrap();
        // 1/(1-x-x^2) = 1 + x + 2x^2 + 3x^3 + 5x^4 + ...
        assert_eq!(r.cap(), Some(4));
        assert_eq!(r.poly().to_string(), "5*x1^4 + 3*x1^3 + 2*x1^2 + x1 + 1");
    }
}
