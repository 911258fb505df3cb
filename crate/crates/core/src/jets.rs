//! Jet spaces `J^r(n, m)`: coordinates, naming and total derivatives.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{Ctx, MultiIndex, Polynomial, TruncatedSeries, VarContext};
use crate::error::{Error, Result};

/// A jet coordinate: an independent variable `x_i` or a derivative
/// `u^k_alpha` (`alpha = 0` is `u^k` itself). Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetVar {
    X(usize),
    U(usize, MultiIndex),
}

impl JetVar {
    pub fn order(&self) -> u32 {
        match self {
            JetVar::X(_) => 0,
            JetVar::U(_, a) => a.degree(),
        }
    }
}

/// Coordinates of `J^r(n, m)`: `x1..xn`, `u1..um`, then `u<k>_<digits>`
/// ordered by derivative order, then `k`, then the sorted index string.
#[derive(Debug)]
pub struct JetContext {
    n: usize,
    m: usize,
    order: u32,
    vars: Ctx,
    coords: Vec<JetVar>,
    lookup: HashMap<JetVar, usize>,
}

fn cache() -> &'static Mutex<HashMap<(usize, usize, u32), Arc<JetContext>>> {
    static C: OnceLock<Mutex<HashMap<(usize, usize, u32), Arc<JetContext>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Name of a jet coordinate, e.g. `x2`, `u1`, `u2_13`.
pub fn jet_var_name(v: &JetVar) -> String {
    match v {
        JetVar::X(i) => format!("x{}", i + 1),
        JetVar::U(k, a) if a.is_zero() => format!("u{}", k + 1),
        JetVar::U(k, a) => {
            let digits: String = a.to_indices().iter().map(|i| char::from(b'1' + *i as u8)).collect();
            format!("u{}_{}", k + 1, digits)
        }
    }
}

/// Number of coordinates of `J^r(n, m)` and the count of fiber coordinates of
/// each exact order `0..=r`.
pub fn jet_dimensions(n: usize, m: usize, r: u32) -> (usize, Vec<usize>) {
    let per: Vec<usize> = (0..=r).map(|s| m * MultiIndex::all_of_degree(n, s).len()).collect();
    (n + per.iter().sum::<usize>(), per)
}

impl JetContext {
    pub fn new(n: usize, m: usize, order: u32) -> Result<Arc<JetContext>> {
        if n == 0 || m == 0 || n > 9 || m > 9 {
            return Err(Error::Invalid(format!("jet space needs 1 <= n, m <= 9 (got n={n}, m={m})")));
        }
        let key = (n, m, order);
        if let Some(j) = cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(j.clone());
        }
        let mut coords: Vec<JetVar> = (0..n).map(JetVar::X).collect();
        for s in 0..=order {
            for k in 0..m {
                for a in MultiIndex::all_of_degree(n, s) {
                    coords.push(JetVar::U(k, a));
                }
            }
        }
        let vars = VarContext::new(coords.iter().map(jet_var_name));
        let lookup = coords.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let jc = Arc::new(JetContext { n, m, order, vars, coords, lookup });
        cache().lock().unwrap_or_else(|e| e.into_inner()).insert(key, jc.clone());
        Ok(jc)
    }

    /// Smallest jet context whose coordinates extend `ctx`.
    pub fn covering(n: usize, m: usize, ctx: &Ctx) -> Result<Arc<JetContext>> {
        let mut r = 0;
        loop {
            let jc = JetContext::new(n, m, r)?;
            if jc.vars.len() >= ctx.len() {
                if !ctx.is_prefix_of(&jc.vars) {
                    return Err(Error::ContextMismatch(format!("context is not a jet context of J(n={n}, m={m})")));
                }
                return Ok(jc);
            }
            r += 1;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vars(&self) -> &Ctx {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, idx: usize) -> &JetVar {
        &self.coords[idx]
    }

    pub fn index(&self, v: &JetVar) -> Option<usize> {
        self.lookup.get(v).copied()
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    /// Index of `u^k_alpha`; panics if the order exceeds the context.
    pub fn u(&self, k: usize, alpha: &MultiIndex) -> usize {
        self.index(&JetVar::U(k, alpha.clone())).unwrap_or_else(|| panic!("u{}_{:?} not in J^{}", k + 1, alpha, self.order))
    }

    pub fn x_series(&self, i: usize) -> TruncatedSeries {
        TruncatedSeries::var(&self.vars, i)
    }

    pub fn u_series(&self, k: usize, alpha: &MultiIndex) -> TruncatedSeries {
        TruncatedSeries::var(&self.vars, self.u(k, alpha))
    }

    /// Context of the base coordinates `(x, u)`, i.e. `J^0`.
    pub fn base_ctx(&self) -> Ctx {
        JetContext::new(self.n, self.m, 0).expect("valid dimensions").vars.clone()
    }
}

/// Highest derivative order of any coordinate occurring in `p`.
pub fn max_order(jc: &JetContext, p: &Polynomial) -> u32 {
    p.terms().flat_map(|(m, _)| m.to_indices()).map(|i| jc.coord(i).order()).max().unwrap_or(0)
}

/// Total derivative `D_i` on series over a jet context of `J(n, m)`. The
/// result lives in a jet context of one order higher when needed; the cap
/// drops by one.
pub fn total_derivative(n: usize, m: usize, e: &TruncatedSeries, i: usize) -> Result<TruncatedSeries> {
    if i >= n {
        return Err(Error::Invalid(format!("total derivative index {} exceeds n = {}", i + 1, n)));
    }
    let jc = JetContext::covering(n, m, e.ctx())?;
    let need = max_order(&jc, e.poly()) + 1;
    let target = if need > jc.order() { JetContext::new(n, m, need)? } else { jc.clone() };
    let mut out = Polynomial::zero(target.vars());
    for (mono, c) in e.poly().terms() {
        for (v, &exp) in mono.exponents().iter().enumerate() {
            if exp == 0 {
                continue;
            }
            let rest = mono.decremented(v).expect("positive exponent");
            let coef = c * crate::algebra::Rational::from_integer(exp.into());
            match jc.coord(v) {
                JetVar::X(j) => {
                    if *j == i {
                        out.add_term(rest, coef);
                    }
                }
                JetVar::U(k, a) => {
                    let w = target.u(*k, &a.incremented(i));
                    out.add_term(rest.incremented(w), coef);
                }
            }
        }
    }
    Ok(TruncatedSeries::with_cap(out, e.cap().map(|c| c - 1)))
}

/// Parses a jet coordinate name (`x<i>`, `u<k>`, `u<k>_<digits>`); the digit
/// string may be unsorted.
pub fn parse_jet_name(name: &str) -> Option<JetVar> {
    let idx = |s: &str| -> Option<usize> {
        let v: usize = s.parse().ok()?;
        if s.starts_with('0') || v == 0 {
            None
        } else {
            Some(v - 1)
        }
    };
    if let Some(rest) = name.strip_prefix('x') {
        return idx(rest).map(JetVar::X);
    }
    let rest = name.strip_prefix('u')?;
    match rest.split_once('_') {
        None => idx(rest).map(|k| JetVar::U(k, MultiIndex::zero())),
        Some((k, digits)) => {
            let k = idx(k)?;
            if digits.is_empty() || !digits.bytes().all(|b| (b'1'..=b'9').contains(&b)) {
                return None;
            }
            let ids: Vec<usize> = digits.bytes().map(|b| (b - b'1') as usize).collect();
            Some(JetVar::U(k, MultiIndex::from_indices(&ids)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(jet_dimensions(1, 1, 2), (4, vec![1, 1, 1]));
        assert_eq!(jet_dimensions(2, 2, 2).0, 2 + 2 + 4 + 6);
        let jc = JetContext::new(2, 1, 2).unwrap();
        assert_eq!(jc.vars().names(), ["x1", "x2", "u1", "u1_1", "u1_2", "u1_11", "u1_12", "u1_22"]);
    }

    #[test]
    fn total_derivative_of_coordinates() {
        let jc = JetContext::new(2, 1, 1).unwrap();
        let u1 = jc.u_series(0, &MultiIndex::unit(0));
        let d = total_derivative(2, 1, &u1, 1).unwrap();
        assert_eq!(d.poly().to_string(), "u1_12");
        let x1 = jc.x_series(0);
        let p = x1.checked_mul(&jc.u_series(0, &MultiIndex::zero())).unwrap();
        assert_eq!(total_derivative(2, 1, &p, 0).unwrap().poly().to_string(), "x1*u1_1 + u1");
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(parse_jet_name("u2_31"), Some(JetVar::U(1, MultiIndex::from_indices(&[0, 2]))));
        assert_eq!(parse_jet_name("u1_"), None);
        assert_eq!(parse_jet_name("x0"), None);
        let v = JetVar::U(0, MultiIndex::from_indices(&[1, 0, 1]));
        assert_eq!(jet_var_name(&v), "u1_122");
    }
}
