//! Second-order systems `w_{x_i x_j} = F_ij(x, u, w_x)` with first-order
//! relations `v^k_{x_j} = G^k_j(x, u, w_x)`, where `w = u^1` and
//! `v = (u^2, ..., u^m)`.

use std::collections::BTreeMap;

use crate::algebra::{Ctx, ExactMatrix, MultiIndex, Polynomial, Rational, TruncatedSeries};
use crate::error::{Error, Result};
use crate::jets::{JetContext, JetVar};

/// The system class. Indices are zero-based: `f[(i, j)]` with `i <= j`,
/// `g[(k, j)]` with `1 <= k < m`. Missing entries are the exact zero. Every
/// series lives in the `J^1` context and involves only `x`, `u` and `w_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PDESystemS {
    n: usize,
    m: usize,
    cap: u32,
    f: BTreeMap<(usize, usize), TruncatedSeries>,
    g: BTreeMap<(usize, usize), TruncatedSeries>,
}

/// Right sides `F^k_ij` of all second-order equations, `k = 0` being `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedSystem {
    pub n: usize,
    pub m: usize,
    pub f: BTreeMap<(usize, usize, usize), TruncatedSeries>,
}

impl DerivedSystem {
    /// `F^k_ij` with symmetric lookup.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &TruncatedSeries {
        let key = if i <= j { (k, i, j) } else { (k, j, i) };
        &self.f[&key]
    }
}

/// One cross-derivative compatibility residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub value: TruncatedSeries,
}

/// Outcome of the compatibility check.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutivityReport {
    pub cap: u32,
    pub residuals: Vec<Residual>,
}

impl InvolutivityReport {
    /// True when every residual vanishes as far as it is known.
    pub fn involutive_to_cap(&self) -> bool {
        self.residuals.iter().all(|r| r.value.is_zero())
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.value.is_zero())
    }
}

impl PDESystemS {
    pub fn new(n: usize, m: usize, cap: u32) -> Result<Self> {
        JetContext::new(n, m, 1)?;
        Ok(PDESystemS { n, m, cap, f: BTreeMap::new(), g: BTreeMap::new() })
    }

    /// `w_{x_i x_j} = 0`, `v^k_x = A^k w_x`, exact.
    pub fn flat(n: usize, m: usize, a: &[ExactMatrix], cap: u32) -> Result<Self> {
        if a.len() + 1 != m {
            return Err(Error::Dimension(format!("{} relation matrices for m = {}", a.len(), m)));
        }
        let mut s = Self::new(n, m, cap)?;
        let jc = JetContext::new(n, m, 1)?;
        for (k, ak) in a.iter().enumerate() {
            if ak.rows() != n || ak.cols() != n {
                return Err(Error::Dimension(format!("relation matrix must be {n}x{n}")));
            }
            for i in 0..n {
                let mut p = Polynomial::zero(jc.vars());
                for j in 0..n {
                    p = &p + &Polynomial::var(jc.vars(), jc.u(0, &MultiIndex::unit(j))).scale(ak.get(i, j));
                }
                s.set_g(k + 1, i, TruncatedSeries::exact(p))?;
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn set_cap(&mut self, cap: u32) {
        self.cap = cap;
    }

    pub fn jet(&self) -> std::sync::Arc<JetContext> {
        JetContext::new(self.n, self.m, 1).expect("validated dimensions")
    }

    pub fn ctx(&self) -> Ctx {
        self.jet().vars().clone()
    }

    fn check_gamma(&self, e: &TruncatedSeries) -> Result<TruncatedSeries> {
        let jc = self.jet();
        let e = e.rebase(jc.vars())?;
        for (mono, _) in e.poly().terms() {
            for v in mono.to_indices() {
                if let JetVar::U(k, a) = jc.coord(v) {
                    if *k > 0 && !a.is_zero() {
                        return Err(Error::Invalid(format!("right sides may not involve `{}`", jc.vars().name(v))));
                    }
                }
            }
        }
        Ok(e)
    }

    pub fn set_f(&mut self, i: usize, j: usize, e: TruncatedSeries) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!("F index ({}, {}) out of range", i + 1, j + 1)));
        }
        let e = self.check_gamma(&e)?;
        let key = (i.min(j), i.max(j));
        if e.is_zero() && e.is_exact() {
            self.f.remove(&key);
        } else {
            self.f.insert(key, e);
        }
        Ok(())
    }

    pub fn set_g(&mut self, k: usize, j: usize, e: TruncatedSeries) -> Result<()> {
        if k == 0 || k >= self.m || j >= self.n {
            return Err(Error::Invalid(format!("G index ({}, {}) out of range", k + 1, j + 1)));
        }
        let e = self.check_gamma(&e)?;
        if e.is_zero() && e.is_exact() {
            self.g.remove(&(k, j));
        } else {
            self.g.insert((k, j), e);
        }
        Ok(())
    }

    /// `F_ij` (symmetric), the exact zero if unset.
    pub fn f(&self, i: usize, j: usize) -> TruncatedSeries {
        self.f.get(&(i.min(j), i.max(j))).cloned().unwrap_or_else(|| TruncatedSeries::zero(&self.ctx(), None))
    }

    /// `G^k_j` for `k >= 1`, the exact zero if unset.
    pub fn g(&self, k: usize, j: usize) -> TruncatedSeries {
        self.g.get(&(k, j)).cloned().unwrap_or_else(|| TruncatedSeries::zero(&self.ctx(), None))
    }

    pub fn f_entries(&self) -> impl Iterator<Item = (&(usize, usize), &TruncatedSeries)> {
        self.f.iter()
    }

    pub fn g_entries(&self) -> impl Iterator<Item = (&(usize, usize), &TruncatedSeries)> {
        self.g.iter()
    }

    /// True when every right side is an exact polynomial.
    pub fn is_exact(&self) -> bool {
        self.f.values().chain(self.g.values()).all(TruncatedSeries::is_exact)
    }

    /// Derivative along the system:
    /// `D_i e = e_{x_i} + w_i e_{u^1} + sum_k G^k_i e_{u^k} + sum_j F_ij e_{w_j}`.
    pub fn restricted_total_derivative(&self, e: &TruncatedSeries, i: usize) -> Result<TruncatedSeries> {
        let e = self.check_gamma(e)?;
        let jc = self.jet();
        let ctx = jc.vars().clone();
        let mut acc = e.diff(jc.x(i));
        let w_i = jc.u_series(0, &MultiIndex::unit(i));
        acc = acc.checked_add(&w_i.checked_mul(&e.diff(jc.u(0, &MultiIndex::zero())))?)?;
        for k in 1..self.m {
            let d = e.diff(jc.u(k, &MultiIndex::zero()));
            if !(d.is_zero() && d.is_exact()) {
                acc = acc.checked_add(&self.g(k, i).checked_mul(&d)?)?;
            }
        }
        for j in 0..self.n {
            let d = e.diff(jc.u(0, &MultiIndex::unit(j)));
            if !(d.is_zero() && d.is_exact()) {
                acc = acc.checked_add(&self.f(i, j).checked_mul(&d)?)?;
            }
        }
        acc.rebase(&ctx)
    }

    /// `F^k_ij = D_j G^k_i` for `k >= 1`, `F^0 = F`.
    pub fn derive_full_second_order(&self) -> Result<DerivedSystem> {
        let mut f = BTreeMap::new();
        for i in 0..self.n {
            for j in i..self.n {
                f.insert((0, i, j), self.f(i, j));
                for k in 1..self.m {
                    f.insert((k, i, j), self.restricted_total_derivative(&self.g(k, i), j)?);
                }
            }
        }
        Ok(DerivedSystem { n: self.n, m: self.m, f })
    }

    /// Residuals `D_l F_ij - D_j F_il` and `D_i G^k_j - D_j G^k_i`.
    pub fn involutivity_residuals(&self) -> Result<InvolutivityReport> {
        let mut residuals = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for l in j + 1..self.n {
                    let a = self.restricted_total_derivative(&self.f(i, j), l)?;
                    let b = self.restricted_total_derivative(&self.f(i, l), j)?;
                    residuals.push(Residual {
                        label: format!("D{} F{}{} - D{} F{}{}", l + 1, i + 1, j + 1, j + 1, i + 1, l + 1),
                        value: a.checked_sub(&b)?,
                    });
                }
            }
        }
        for k in 1..self.m {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let a = self.restricted_total_derivative(&self.g(k, j), i)?;
                    let b = self.restricted_total_derivative(&self.g(k, i), j)?;
                    residuals.push(Residual {
                        label: format!("D{} G{}{} - D{} G{}{}", i + 1, k + 1, j + 1, j + 1, k + 1, i + 1),
                        value: a.checked_sub(&b)?,
                    });
                }
            }
        }
        Ok(InvolutivityReport { cap: self.cap, residuals })
    }

    /// Truncates every right side at the working cap.
    pub fn truncated(&self, cap: u32) -> Self {
        let t = |m: &BTreeMap<(usize, usize), TruncatedSeries>| m.iter().map(|(k, v)| (*k, v.truncate(Some(i64::from(cap))))).collect();
        PDESystemS { n: self.n, m: self.m, cap, f: t(&self.f), g: t(&self.g) }
    }

    /// Linear part of `G^k` as a matrix: `G^k_i = sum_j A_ij w_j + ...`.
    pub fn relation_matrix(&self, k: usize) -> ExactMatrix {
        let jc = self.jet();
        let mut a = ExactMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let g = self.g(k, i);
            for j in 0..self.n {
                let c: Rational = g.coefficient(&MultiIndex::unit(jc.u(0, &MultiIndex::unit(j))));
                a.set(i, j, c);
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn w(jc: &JetContext, i: usize) -> TruncatedSeries {
        jc.u_series(0, &MultiIndex::unit(i))
    }

    #[test]
    fn restricted_derivative_basics() {
        let a = ExactMatrix::from_rows(vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(-1, 1)]]).unwrap();
        let s = PDESystemS::flat(2, 2, &[a], 4).unwrap();
        let jc = s.jet();
        assert!(s.restricted_total_derivative(&w(&jc, 0), 0).unwrap().is_zero());
        let v = jc.u_series(1, &MultiIndex::zero());
        assert_eq!(s.restricted_total_derivative(&v, 0).unwrap(), s.g(1, 0));
        assert_eq!(s.restricted_total_derivative(&jc.x_series(1), 1).unwrap().poly().to_string(), "1");
        assert!(s.involutivity_residuals().unwrap().involutive_to_cap());
    }

    #[test]
    fn non_involutive_relation() {
        let mut s = PDESystemS::new(2, 2, 3).unwrap();
        let jc = s.jet();
        s.set_g(1, 0, jc.x_series(1)).unwrap();
        let r = s.involutivity_residuals().unwrap();
        assert!(!r.involutive_to_cap());
        assert_eq!(r.nonzero().next().unwrap().value.poly().to_string(), "-1");
    }

    #[test]
    fn chain_rule_for_quadratic_relation() {
        let mut s = PDESystemS::new(1, 2, 3).unwrap();
        let jc = s.jet();
        s.set_g(1, 0, w(&jc, 0).checked_mul(&w(&jc, 0)).unwrap()).unwrap();
        let d = s.derive_full_second_order().unwrap();
        assert!(d.get(1, 0, 0).is_zero());
    }

    #[test]
    fn rejects_second_function_derivatives() {
        let mut s = PDESystemS::new(1, 2, 3).unwrap();
        let jc = s.jet();
        assert!(s.set_f(0, 0, jc.u_series(1, &MultiIndex::unit(0))).is_err());
    }
}
