use num_traits::Zero;

use super::{ExactMatrix, TruncatedSeries};
use crate::error::{Error, Result};

/// Solves `E(x, p(x)) = 0` for `p` as series in the remaining variables, with
/// `p(0) = 0`, given that `E(0, 0) = 0` and `dE/dp(0, 0)` is invertible.
/// `p_vars` lists the variable indices of the unknowns; the result has one
/// series per unknown, known through `cap`.
pub fn implicit_solve(equations: &[TruncatedSeries], p_vars: &[usize], cap: u32) -> Result<Vec<TruncatedSeries>> {
    let k = p_vars.len();
    if equations.len() != k {
        return Err(Error::Dimension(format!("{} equations for {} unknowns", equations.len(), k)));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut ctx = equations[0].ctx().clone();
    for e in equations {
        ctx = super::unify_contexts(&ctx, e.ctx())?;
    }
    let equations: Vec<TruncatedSeries> = equations.iter().map(|e| e.rebase(&ctx)).collect::<Result<_>>()?;
    for e in &equations {
        if !e.constant_term()?.is_zero() {
            return Err(Error::Precondition("equations do not vanish at the origin".into()));
        }
    }
    let mut jac = ExactMatrix::zeros(k, k);
    for (i, e) in equations.iter().enumerate() {
        for (j, &v) in p_vars.iter().enumerate() {
            jac.set(i, j, e.diff(v).constant_term()?);
        }
    }
    let inv = jac.inverse()?;
    let limit = Some(i64::from(cap));
    let mut p: Vec<TruncatedSeries> = (0..k).map(|_| TruncatedSeries::zero(&ctx, Some(cap))).collect();
    for _ in 0..=cap {
        let assign: Vec<(usize, TruncatedSeries)> = p_vars.iter().copied().zip(p.iter().cloned()).collect();
        // E(x, p) - J p
        let mut resid = Vec::with_capacity(k);
        for (i, e) in equations.iter().enumerate() {
            let mut r = e.substitute(&assign, Some(cap))?;
            for (j, pj) in p.iter().enumerate() {
                r = r.checked_sub(&pj.scale(jac.get(i, j)))?;
            }
            resid.push(r);
        }
        let mut next = Vec::with_capacity(k);
        for i in 0..k {
            let mut acc = TruncatedSeries::zero(&ctx, None);
            for (j, rj) in resid.iter().enumerate() {
                acc = acc.checked_sub(&rj.scale(inv.get(i, j)))?;
            }
            next.push(acc.truncate(limit));
        }
        if next == p {
            break;
        }
        p = next;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Polynomial, VarContext};

    #[test]
    fn quadratic_branch() {
        // u - x - u^2 = 0  =>  u = x + x^2 + 2x^3 + ...
        let ctx = VarContext::new(["x", "u"]);
        let x = Polynomial::var(&ctx, 0);
        let u = Polynomial::var(&ctx, 1);
        let e = TruncatedSeries::exact(&(&u - &x) - &u.pow(2));
        let sol = implicit_solve(&[e], &[1], 3).unwrap();
        assert_eq!(sol[0].poly().to_string(), "2*x^3 + x^2 + x");
        assert_eq!(sol[0].cap(), Some(3));
    }

    #[test]
    fn singular_jacobian() {
        let ctx = VarContext::new(["x", "u"]);
        let x = Polynomial::var(&ctx, 0);
        let u = Polynomial::var(&ctx, 1);
        let e = TruncatedSeries::exact(&u.pow(2) - &x);
        assert_eq!(implicit_solve(&[e], &[1], 3), Err(Error::Singular { rank: 0, size: 1 }));
    }

    #[test]
    fn non_square() {
        let ctx = VarContext::new(["x", "u"]);
        let e = TruncatedSeries::var(&ctx, 1);
        assert!(matches!(implicit_solve(&[e.clone(), e], &[1], 2), Err(Error::Dimension(_))));
    }
}
