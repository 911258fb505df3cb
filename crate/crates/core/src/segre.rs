//! Systems whose solutions are the Segre families of Levi-nondegenerate
//! submanifolds `u^k + omega_k = <L^k x, zeta> + R^k(x, zeta, omega)`.

use num_traits::Zero;

use crate::algebra::{implicit_solve, Ctx, ExactMatrix, MultiIndex, Polynomial, Rational, TruncatedSeries, VarContext};
use crate::error::{Error, Result};
use crate::jets::JetContext;
use crate::systems::PDESystemS;

/// Variables of the remainder series: `x1..xn`, `z1..zn` for `zeta`,
/// `o1..om` for `omega`.
pub fn segre_ctx(n: usize, m: usize) -> Ctx {
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend((1..=n).map(|i| format!("z{i}")));
    names.extend((1..=m).map(|k| format!("o{k}")));
    VarContext::new(names)
}

/// Holomorphized defining data.
#[derive(Clone, Debug, PartialEq)]
pub struct SegreDefining {
    n: usize,
    m: usize,
    cap: u32,
    l: Vec<ExactMatrix>,
    r: Vec<TruncatedSeries>,
}

impl SegreDefining {
    /// Validates shapes, invertibility of `L^1` and that `R^k` has no terms of
    /// degree at most 2.
    pub fn new(n: usize, m: usize, cap: u32, l: Vec<ExactMatrix>, r: Vec<TruncatedSeries>) -> Result<Self> {
        JetContext::new(n, m, 1)?;
        if l.len() != m || r.len() != m {
            return Err(Error::Dimension(format!("need {m} hermitian matrices and {m} remainders")));
        }
        if l.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::Dimension(format!("hermitian matrices must be {n}x{n}")));
        }
        l[0].inverse().map_err(|e| Error::Precondition(format!("L1 is singular: {e}")))?;
        let ctx = segre_ctx(n, m);
        let mut rr = Vec::with_capacity(m);
        for (k, s) in r.into_iter().enumerate() {
            let s = s.rebase(&ctx)?;
            if s.poly().min_degree().is_some_and(|d| d <= 2) {
                return Err(Error::Precondition(format!("R{} has terms of degree <= 2", k + 1)));
            }
            rr.push(s);
        }
        Ok(SegreDefining { n, m, cap, l, r: rr })
    }

    /// Quadric: all remainders vanish.
    pub fn quadric(n: usize, m: usize, cap: u32, l: Vec<ExactMatrix>) -> Result<Self> {
        let ctx = segre_ctx(n, m);
        Self::new(n, m, cap, l, vec![TruncatedSeries::zero(&ctx, None); m])
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

    pub fn hermitian(&self) -> &[ExactMatrix] {
        &self.l
    }

    pub fn remainders(&self) -> &[TruncatedSeries] {
        &self.r
    }

    pub fn ctx(&self) -> Ctx {
        segre_ctx(self.n, self.m)
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        SegreDefining { cap, ..self.clone() }
    }
}

/// `A^k = L^{kT} (L^{1T})^{-1}` for `k >= 2`, so that the relations read
/// `v^k_x = A^k w_x` for the quadric.
pub fn flat_relation_matrices(l: &[ExactMatrix]) -> Result<Vec<ExactMatrix>> {
    let first = l.first().ok_or_else(|| Error::Dimension("no hermitian matrices".into()))?;
    let inv = first.transpose().inverse().map_err(|e| Error::Precondition(format!("L1 is singular: {e}")))?;
    l[1..].iter().map(|lk| lk.transpose().mul(&inv)).collect()
}

/// Exact system of a quadric: `w_{x_i x_j} = 0`, `v^k_x = A^k w_x`.
pub fn quadric_system(l: &[ExactMatrix], cap: u32) -> Result<PDESystemS> {
    let n = l.first().map_or(0, ExactMatrix::rows);
    let a = flat_relation_matrices(l)?;
    PDESystemS::flat(n, l.len(), &a, cap)
}

/// `{Id, A^2, ..., A^m}` linearly independent.
pub fn flat_nondegenerate_check(a: &[ExactMatrix]) -> bool {
    let Some(n) = a.first().map(ExactMatrix::rows) else { return true };
    let mut rows = vec![ExactMatrix::identity(n).to_rows().concat()];
    rows.extend(a.iter().map(|m| m.to_rows().concat()));
    let k = rows.len();
    ExactMatrix::from_rows(rows).map(|m| m.rank() == k).unwrap_or(false)
}

/// Eliminates `(zeta, omega)` from the Segre family and its first derivatives
/// and returns the resulting system, known through the defining cap. Outputs
/// are exact when the elimination closes up in polynomials.
pub fn derive_segre_system(d: &SegreDefining) -> Result<PDESystemS> {
    let (n, m, cap) = (d.n, d.m, d.cap);
    // working variables: x, u, w_x, zeta, omega
    let mut names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    names.extend((1..=m).map(|k| format!("u{k}")));
    names.extend((1..=n).map(|i| format!("u1_{i}")));
    names.extend((1..=n).map(|i| format!("z{i}")));
    names.extend((1..=m).map(|k| format!("o{k}")));
    let wctx = VarContext::new(names);
    let (xo, uo, wo, zo, oo) = (0, n, n + m, 2 * n + m, 3 * n + m);
    let var = |i: usize| TruncatedSeries::var(&wctx, i);
    let r_w: Vec<TruncatedSeries> = d.r.iter().map(|r| r.remap(&wctx, |i| if i < n { xo + i } else if i < 2 * n { zo + i - n } else { oo + i - 2 * n })).collect();
    let bilinear = |lk: &ExactMatrix| -> Result<TruncatedSeries> {
        // <L x, zeta> = sum_ij L_ij x_j zeta_i
        let mut acc = TruncatedSeries::zero(&wctx, None);
        for i in 0..n {
            for j in 0..n {
                if !lk.get(i, j).is_zero() {
                    acc = acc.checked_add(&var(xo + j).checked_mul(&var(zo + i))?.scale(lk.get(i, j)))?;
                }
            }
        }
        Ok(acc)
    };
    let mut eqs = Vec::new();
    for k in 0..m {
        let e = var(uo + k).checked_add(&var(oo + k))?.checked_sub(&bilinear(&d.l[k])?)?.checked_sub(&r_w[k])?;
        eqs.push(e);
    }
    let b1 = bilinear(&d.l[0])?;
    for i in 0..n {
        let e = var(wo + i).checked_sub(&b1.diff(xo + i))?.checked_sub(&r_w[0].diff(xo + i))?;
        eqs.push(e);
    }
    let p_vars: Vec<usize> = (zo..zo + n).chain(oo..oo + m).collect();
    let mut phi = implicit_solve(&eqs, &p_vars, cap)?;

    let exact_phi: Vec<TruncatedSeries> = phi.iter().map(|s| TruncatedSeries::exact(s.poly().clone())).collect();
    let assign_exact: Vec<(usize, TruncatedSeries)> = p_vars.iter().copied().zip(exact_phi.iter().cloned()).collect();
    let closes = d.r.iter().all(TruncatedSeries::is_exact)
        && eqs.iter().all(|e| e.substitute(&assign_exact, None).map(|r| r.is_zero() && r.is_exact()).unwrap_or(false));
    let limit = if closes {
        phi = exact_phi;
        None
    } else {
        Some(cap)
    };
    let assign: Vec<(usize, TruncatedSeries)> = p_vars.iter().copied().zip(phi.iter().cloned()).collect();

    let jc = JetContext::new(n, m, 1)?;
    let to_j1 = |s: &TruncatedSeries| -> Result<TruncatedSeries> {
        if (zo..wctx.len()).any(|i| s.poly().involves(i)) {
            return Err(Error::Invalid("elimination left parameters behind".into()));
        }
        Ok(s.remap(jc.vars(), |i| if i < wo { i } else { jc.u(0, &MultiIndex::unit(i - wo)) }))
    };
    let mut sys = PDESystemS::new(n, m, cap)?;
    for i in 0..n {
        for j in i..n {
            let f = r_w[0].diff(xo + i).diff(xo + j).substitute(&assign, limit)?;
            sys.set_f(i, j, to_j1(&f)?)?;
        }
    }
    for k in 1..m {
        let bk = bilinear(&d.l[k])?;
        for i in 0..n {
            let g = bk.diff(xo + i).checked_add(&r_w[k].diff(xo + i))?.substitute(&assign, limit)?;
            sys.set_g(k, i, to_j1(&g)?)?;
        }
    }
    Ok(sys)
}

/// `R^k(x, zeta, omega) -> eps^-2 R^k(eps x, eps zeta, eps^2 omega)`.
pub fn scale_deform(d: &SegreDefining, eps: &Rational) -> SegreDefining {
    let n = d.n;
    let r = d
        .r
        .iter()
        .map(|s| {
            if eps.is_zero() {
                return TruncatedSeries::zero(s.ctx(), None);
            }
            let mut p = Polynomial::zero(s.ctx());
            for (mono, c) in s.poly().terms() {
                let weight: i64 = mono.exponents().iter().enumerate().map(|(i, &e)| if i < 2 * n { i64::from(e) } else { 2 * i64::from(e) }).sum();
                let f = if weight >= 2 { num_traits::pow(eps.clone(), (weight - 2) as usize) } else { num_traits::pow(eps.recip(), (2 - weight) as usize) };
                p.add_term(mono.clone(), c * f);
            }
            TruncatedSeries::with_cap(p, s.cap())
        })
        .collect();
    SegreDefining { r, ..d.clone() }
}

/// Majoration of the automorphism group by the symmetry bound.
pub fn aut_bound_report(bound: usize) -> String {
    format!("dim_R Aut(M) ≤ {bound}")
}

/// Hermitian matrices of the three model quadrics in complex dimension 4.
pub fn model_quadric(which: u8) -> Option<Vec<ExactMatrix>> {
    let m = |rows: [[i64; 2]; 2]| {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect()).collect()).expect("2x2")
    };
    let id = m([[1, 0], [0, 1]]);
    let diag = m([[1, 0], [0, -1]]);
    let swap = m([[0, 1], [1, 0]]);
    let e11 = m([[1, 0], [0, 0]]);
    match which {
        1 => Some(vec![id, diag]),
        2 => Some(vec![diag, swap]),
        3 => Some(vec![swap, e11]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn g_lines(s: &PDESystemS) -> Vec<String> {
        let mut out = Vec::new();
        for k in 1..s.m() {
            for j in 0..s.n() {
                out.push(format!("G {} {} = {}", k + 1, j + 1, s.g(k, j).poly()));
            }
        }
        out
    }

    #[test]
    fn model_quadric_systems() {
        let s1 = quadric_system(&model_quadric(1).unwrap(), 3).unwrap();
        assert_eq!(g_lines(&s1), ["G 2 1 = u1_1", "G 2 2 = -u1_2"]);
        let s2 = quadric_system(&model_quadric(2).unwrap(), 3).unwrap();
        assert_eq!(g_lines(&s2), ["G 2 1 = -u1_2", "G 2 2 = u1_1"]);
        let s3 = quadric_system(&model_quadric(3).unwrap(), 3).unwrap();
        assert_eq!(g_lines(&s3), ["G 2 1 = u1_2", "G 2 2 = 0"]);
    }

    #[test]
    fn elimination_of_quadric_is_exact() {
        for w in 1..=3 {
            let l = model_quadric(w).unwrap();
            let d = SegreDefining::quadric(2, 2, 3, l.clone()).unwrap();
            assert_eq!(derive_segre_system(&d).unwrap(), quadric_system(&l, 3).unwrap());
        }
    }

    #[test]
    fn perturbed_sphere() {
        let ctx = segre_ctx(1, 1);
        let x = Polynomial::var(&ctx, 0);
        let z = Polynomial::var(&ctx, 1);
        let r = TruncatedSeries::exact(&x.pow(2) * &z.pow(2));
        let l = vec![ExactMatrix::identity(1)];
        let d = SegreDefining::new(1, 1, 5, l, vec![r]).unwrap();
        let s = derive_segre_system(&d).unwrap();
        let f = s.f(0, 0);
        assert_eq!(f.cap(), Some(5));
        assert_eq!(f.poly().to_string(), "-8*x1*u1_1^3 + 2*u1_1^2");
        assert!(s.involutivity_residuals().unwrap().involutive_to_cap());
        let half = scale_deform(&d, &rat(1, 2));
        assert_eq!(half.remainders()[0].poly().to_string(), "1/4*x1^2*z1^2");
        assert!(scale_deform(&d, &rat(0, 1)).remainders()[0].is_zero());
    }

    #[test]
    fn nondegeneracy() {
        let a = flat_relation_matrices(&model_quadric(1).unwrap()).unwrap();
        assert!(flat_nondegenerate_check(&a));
        assert!(!flat_nondegenerate_check(&[ExactMatrix::identity(2)]));
        assert!(flat_nondegenerate_check(&flat_relation_matrices(&model_quadric(3).unwrap()).unwrap()));
    }
}
