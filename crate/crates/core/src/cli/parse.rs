//! Expression grammar and the line-oriented input files.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{parse_rational, Ctx, ExactMatrix, MultiIndex, Polynomial, Rational, TruncatedSeries, VarContext};
use crate::error::{Error, Result};
use crate::fields::{LinearForm, UnknownSymbol};
use crate::jets::{jet_var_name, parse_jet_name, JetContext};
use crate::lieeq::{LinearPDESystem, Naming};
use crate::segre::{segre_ctx, SegreDefining};
use crate::systems::PDESystemS;

/// Expression tree. Variable names are stored normalized (jet index digits
/// sorted).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Checks an identifier and returns its normalized form.
fn normalize_ident(name: &str, line: usize, col: usize) -> Result<String> {
    let head = name.chars().next().unwrap_or(' ');
    if !matches!(head, 'x' | 'u' | 'z' | 'o' | 'y' | 't') {
        return Err(perr(line, col, format!("unknown variable `{name}`")));
    }
    let rest = &name[1..];
    let (idx, tail) = match rest.split_once('_') {
        Some((a, b)) => (a, Some(b)),
        None => (rest, None),
    };
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) || idx.starts_with('0') {
        return Err(perr(line, col, format!("unknown variable `{name}`")));
    }
    if let Some(t) = tail {
        if !matches!(head, 'u' | 't') {
            return Err(perr(line, col, format!("unknown variable `{name}`")));
        }
        if let Some(p) = t.bytes().position(|b| !(b'1'..=b'9').contains(&b)) {
            return Err(perr(line, col + 2 + idx.len() + p, format!("malformed jet index in `{name}`")));
        }
        if t.is_empty() {
            return Err(perr(line, col + 1 + idx.len(), format!("malformed jet index in `{name}`: trailing underscore")));
        }
        if head == 'u' {
            let v = parse_jet_name(name).ok_or_else(|| perr(line, col, format!("malformed jet index in `{name}`")))?;
            return Ok(jet_var_name(&v));
        }
        let mut digits: Vec<char> = t.chars().collect();
        digits.sort();
        return Ok(format!("t{}_{}", idx, digits.into_iter().collect::<String>()));
    }
    Ok(name.to_string())
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = col0 + i;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'/' {
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(perr(line, col0 + i, "expected denominator digits"));
                }
            }
            let lit = &text[start..i];
            let v = parse_rational(lit).ok_or_else(|| perr(line, col, format!("invalid rational `{lit}`")))?;
            out.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = normalize_ident(&text[start..i], line, col)?;
            out.push((Tok::Ident(name), col));
        } else if "+-*^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else if c == '/' {
            return Err(perr(line, col, "division is only allowed inside rational literals"));
        } else {
            return Err(perr(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { Expr::Add(Box::new(lhs), Box::new(rhs)) } else { Expr::Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(v)) if v.is_integer() && !v.is_negative_or_zero_sign() => {
                    self.pos += 1;
                    let e: u32 = v.to_integer().try_into().map_err(|_| perr(self.line, col, "exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => return Err(perr(self.line, col, "`^` needs a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(perr(self.line, self.col(), "expected `)`")),
                }
            }
            Some(t) => Err(perr(self.line, col, format!("unexpected token {t:?}"))),
            None => Err(perr(self.line, col, "unexpected end of expression")),
        }
    }
}

trait SignCheck {
    fn is_negative_or_zero_sign(&self) -> bool;
}

impl SignCheck for Rational {
    fn is_negative_or_zero_sign(&self) -> bool {
        *self < Rational::zero()
    }
}

/// Parses an expression; `line` and `col0` locate it in its file for errors.
pub fn parse_expression_at(text: &str, line: usize, col0: usize) -> Result<Expr> {
    let toks = lex(text, line, col0)?;
    let mut p = Parser { toks, pos: 0, line, end_col: col0 + text.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(line, p.col(), "unexpected trailing input"));
    }
    Ok(e)
}

pub fn parse_expression(text: &str) -> Result<Expr> {
    parse_expression_at(text, 1, 1)
}

/// Value of an expression that is at most linear in unknown symbols:
/// `None` keys the symbol-free part.
#[derive(Clone, Debug)]
struct LinValue(BTreeMap<Option<UnknownSymbol>, Polynomial>);

impl LinValue {
    fn scalar(p: Polynomial) -> Self {
        LinValue(BTreeMap::from([(None, p)]))
    }

    fn add(mut self, other: LinValue, sign: i64) -> Result<Self> {
        for (k, v) in other.0 {
            let v = v.scale(&Rational::from_integer(sign.into()));
            let cur = self.0.remove(&k);
            let sum = match cur {
                Some(c) => c.checked_add(&v)?,
                None => v,
            };
            self.0.insert(k, sum);
        }
        Ok(self)
    }

    fn is_scalar(&self) -> bool {
        self.0.keys().all(Option::is_none)
    }

    fn scalar_part(&self, ctx: &Ctx) -> Polynomial {
        self.0.get(&None).cloned().unwrap_or_else(|| Polynomial::zero(ctx))
    }
}

fn eval_lin(e: &Expr, ctx: &Ctx, resolve: &dyn Fn(&str) -> Result<Resolved>) -> Result<LinValue> {
    Ok(match e {
        Expr::Num(v) => LinValue::scalar(Polynomial::constant(ctx, v.clone())),
        Expr::Var(name) => match resolve(name)? {
            Resolved::Var(i) => LinValue::scalar(Polynomial::var(ctx, i)),
            Resolved::Symbol(s) => LinValue(BTreeMap::from([(Some(s), Polynomial::one(ctx))])),
        },
        Expr::Neg(a) => LinValue::scalar(Polynomial::zero(ctx)).add(eval_lin(a, ctx, resolve)?, -1)?,
        Expr::Add(a, b) => eval_lin(a, ctx, resolve)?.add(eval_lin(b, ctx, resolve)?, 1)?,
        Expr::Sub(a, b) => eval_lin(a, ctx, resolve)?.add(eval_lin(b, ctx, resolve)?, -1)?,
        Expr::Mul(a, b) => {
            let (x, y) = (eval_lin(a, ctx, resolve)?, eval_lin(b, ctx, resolve)?);
            let (s, other) = if x.is_scalar() {
                (x, y)
            } else if y.is_scalar() {
                (y, x)
            } else {
                return Err(Error::Invalid("product of two unknown-function terms is not linear".into()));
            };
            let f = s.scalar_part(ctx);
            LinValue(other.0.into_iter().map(|(k, v)| Ok((k, f.checked_mul(&v)?))).collect::<Result<_>>()?)
        }
        Expr::Pow(a, k) => {
            let x = eval_lin(a, ctx, resolve)?;
            if !x.is_scalar() {
                if *k == 1 {
                    return Ok(x);
                }
                return Err(Error::Invalid("power of an unknown-function term is not linear".into()));
            }
            LinValue::scalar(x.scalar_part(ctx).pow(*k))
        }
    })
}

enum Resolved {
    Var(usize),
    Symbol(UnknownSymbol),
}

/// Evaluates a polynomial expression in `ctx`; names must be variables of it.
pub fn to_polynomial(e: &Expr, ctx: &Ctx) -> Result<Polynomial> {
    let resolve = |name: &str| -> Result<Resolved> { ctx.position(name).map(Resolved::Var).ok_or_else(|| Error::UnknownVariable(name.into())) };
    let v = eval_lin(e, ctx, &resolve)?;
    Ok(v.scalar_part(ctx))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    }
}

/// Non-empty, comment-stripped lines with their one-based numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.trim().is_empty()).collect()
}

fn header_fields(line: &str, lno: usize) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, w) in line.split_whitespace().skip(1).enumerate() {
        match w.split_once('=') {
            Some((a, b)) => {
                out.insert(a.to_string(), b.to_string());
            }
            None => {
                out.insert(format!("#{k}"), w.to_string());
            }
        }
    }
    let _ = lno;
    Ok(out)
}

fn field_num<T: std::str::FromStr>(f: &BTreeMap<String, String>, key: &str, pos: &str, lno: usize) -> Result<T> {
    let v = f.get(key).or_else(|| f.get(pos)).ok_or_else(|| perr(lno, 1, format!("header is missing `{key}`")))?;
    v.parse().map_err(|_| perr(lno, 1, format!("invalid value `{v}` for `{key}`")))
}

/// Splits `lhs = rhs`, returning the rhs column (one-based).
fn split_eq(line: &str, lno: usize) -> Result<(&str, &str, usize)> {
    let p = line.find('=').ok_or_else(|| perr(lno, 1, "expected `=`"))?;
    Ok((line[..p].trim(), &line[p + 1..], p + 2))
}

/// A parsed input file.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSystem {
    System(PDESystemS),
    Segre(SegreDefining),
    Linear(LinearPDESystem),
    Flat { n: usize, m: usize, a: Vec<ExactMatrix> },
}

impl SourceSystem {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceSystem::System(_) => "system",
            SourceSystem::Segre(_) => "segre",
            SourceSystem::Linear(_) => "linear",
            SourceSystem::Flat { .. } => "flat",
        }
    }
}

pub fn parse_source(text: &str) -> Result<SourceSystem> {
    let lines = content_lines(text);
    let Some(&(lno, head)) = lines.first() else { return Err(perr(1, 1, "empty input")) };
    let word = head.split_whitespace().next().unwrap_or("");
    let body = &lines[1..];
    match word {
        "system" => parse_system(head, lno, body).map(SourceSystem::System),
        "segre" => parse_segre(head, lno, body).map(SourceSystem::Segre),
        "linear" => parse_linear(head, lno, body).map(SourceSystem::Linear),
        "flat" => parse_flat(head, lno, body),
        _ => Err(perr(lno, 1, format!("unknown file kind `{word}` (expected system, segre, linear or flat)"))),
    }
}

fn parse_indices(lhs: &str, tag: &str, lno: usize) -> Result<(usize, usize)> {
    let parts: Vec<&str> = lhs.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != tag {
        return Err(perr(lno, 1, format!("expected `{tag} <i> <j>`")));
    }
    let num = |s: &str| -> Result<usize> {
        s.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(|| perr(lno, 1, format!("invalid index `{s}`")))
    };
    Ok((num(parts[1])?, num(parts[2])?))
}

fn parse_system(head: &str, lno: usize, body: &[(usize, &str)]) -> Result<PDESystemS> {
    let f = header_fields(head, lno)?;
    let n: usize = field_num(&f, "n", "#0", lno)?;
    let m: usize = field_num(&f, "m", "#1", lno)?;
    let cap: u32 = field_num(&f, "cap", "#2", lno)?;
    let truncated = f.values().any(|v| v == "truncated");
    let mut s = PDESystemS::new(n, m, cap).map_err(|e| perr(lno, 1, e.to_string()))?;
    let ctx = s.ctx();
    for &(l, line) in body {
        let (lhs, rhs, col) = split_eq(line, l)?;
        let tag = lhs.split_whitespace().next().unwrap_or("");
        let poly = to_polynomial(&parse_expression_at(rhs, l, col)?, &ctx).map_err(|e| perr(l, col, e.to_string()))?;
        let series = TruncatedSeries::new(poly, if truncated { Some(cap) } else { None });
        match tag {
            "F" => {
                let (i, j) = parse_indices(lhs, "F", l)?;
                s.set_f(i - 1, j - 1, series).map_err(|e| perr(l, 1, e.to_string()))?;
            }
            "G" => {
                let (k, j) = parse_indices(lhs, "G", l)?;
                s.set_g(k - 1, j - 1, series).map_err(|e| perr(l, 1, e.to_string()))?;
            }
            _ => return Err(perr(l, 1, format!("expected `F i j = ...` or `G k j = ...`, found `{lhs}`"))),
        }
    }
    Ok(s)
}

/// Parses `[[a, b], [c, d]]`.
pub fn parse_matrix(text: &str, lno: usize) -> Result<ExactMatrix> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t.strip_prefix("[[").and_then(|s| s.strip_suffix("]]")).ok_or_else(|| perr(lno, 1, "expected a matrix `[[...],[...]]`"))?;
    let rows: Vec<Vec<Rational>> = inner
        .split("],[")
        .map(|r| r.split(',').map(|v| parse_rational(v).ok_or_else(|| perr(lno, 1, format!("invalid matrix entry `{v}`")))).collect())
        .collect::<Result<_>>()?;
    ExactMatrix::from_rows(rows).map_err(|e| perr(lno, 1, e.to_string()))
}

fn indexed(lhs: &str, prefix: char, lno: usize) -> Result<usize> {
    lhs.strip_prefix(prefix)
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| perr(lno, 1, format!("expected `{prefix}<k>`, found `{lhs}`")))
}

fn parse_segre(head: &str, lno: usize, body: &[(usize, &str)]) -> Result<SegreDefining> {
    let f = header_fields(head, lno)?;
    let n: usize = field_num(&f, "n", "#0", lno)?;
    let m: usize = field_num(&f, "m", "#1", lno)?;
    let cap: u32 = field_num(&f, "cap", "#2", lno)?;
    if n == 0 || m == 0 || n > 9 || m > 9 {
        return Err(perr(lno, 1, "n and m must be between 1 and 9"));
    }
    let ctx = segre_ctx(n, m);
    let mut l: Vec<Option<ExactMatrix>> = vec![None; m];
    let mut r: Vec<TruncatedSeries> = vec![TruncatedSeries::zero(&ctx, None); m];
    for &(lno2, line) in body {
        let (lhs, rhs, col) = split_eq(line, lno2)?;
        if lhs.starts_with('L') {
            let k = indexed(lhs, 'L', lno2)?;
            if k > m {
                return Err(perr(lno2, 1, format!("L{k} exceeds m = {m}")));
            }
            l[k - 1] = Some(parse_matrix(rhs, lno2)?);
        } else if lhs.starts_with('R') {
            let k = indexed(lhs, 'R', lno2)?;
            if k > m {
                return Err(perr(lno2, 1, format!("R{k} exceeds m = {m}")));
            }
            let p = to_polynomial(&parse_expression_at(rhs, lno2, col)?, &ctx).map_err(|e| perr(lno2, col, e.to_string()))?;
            r[k - 1] = TruncatedSeries::exact(p);
        } else {
            return Err(perr(lno2, 1, format!("expected `L<k> = ...` or `R<k> = ...`, found `{lhs}`")));
        }
    }
    let l: Vec<ExactMatrix> = l.into_iter().enumerate().map(|(k, v)| v.ok_or_else(|| perr(lno, 1, format!("missing L{}", k + 1)))).collect::<Result<_>>()?;
    SegreDefining::new(n, m, cap, l, r).map_err(|e| perr(lno, 1, e.to_string()))
}

/// Base variables `y1..yN` of linear files.
pub fn linear_ctx(nvars: usize) -> Ctx {
    VarContext::new((1..=nvars).map(|i| format!("y{i}")))
}

fn parse_linear(head: &str, lno: usize, body: &[(usize, &str)]) -> Result<LinearPDESystem> {
    let f = header_fields(head, lno)?;
    let nvars: usize = field_num(&f, "vars", "#0", lno)?;
    if nvars == 0 || nvars > 9 {
        return Err(perr(lno, 1, "vars must be between 1 and 9"));
    }
    let declared: Option<usize> = match f.get("unknowns") {
        Some(v) => Some(v.parse().map_err(|_| perr(lno, 1, format!("invalid unknowns `{v}`")))?),
        None => None,
    };
    let cap: Option<i64> = match f.get("truncated") {
        Some(v) => Some(v.parse().map_err(|_| perr(lno, 1, format!("invalid truncated cap `{v}`")))?),
        None => None,
    };
    let ctx = linear_ctx(nvars);
    let mut forms = Vec::new();
    let mut max_func = 0;
    for &(l, line) in body {
        let (lhs, rhs, col) = split_eq(line, l)?;
        if lhs != "eq" {
            return Err(perr(l, 1, format!("expected `eq = ...`, found `{lhs}`")));
        }
        let e = parse_expression_at(rhs, l, col)?;
        let resolve = |name: &str| -> Result<Resolved> {
            if let Some(p) = ctx.position(name) {
                return Ok(Resolved::Var(p));
            }
            if let Some(rest) = name.strip_prefix('t') {
                let (j, digits) = match rest.split_once('_') {
                    Some((a, b)) => (a, b),
                    None => (rest, ""),
                };
                let j: usize = j.parse().map_err(|_| Error::UnknownVariable(name.into()))?;
                let ids: Vec<usize> = digits.bytes().map(|b| (b - b'1') as usize).collect();
                if ids.iter().any(|&i| i >= nvars) {
                    return Err(Error::UnknownVariable(format!("{name} (derivative index exceeds vars={nvars})")));
                }
                return Ok(Resolved::Symbol(UnknownSymbol::new(j - 1, MultiIndex::from_indices(&ids))));
            }
            Err(Error::UnknownVariable(name.into()))
        };
        let v = eval_lin(&e, &ctx, &resolve).map_err(|e| perr(l, col, e.to_string()))?;
        let mut form = LinearForm::zero(&ctx);
        for (k, p) in v.0 {
            match k {
                None if !p.is_zero() => return Err(perr(l, col, "equation has a term without unknown functions")),
                None => {}
                Some(s) => {
                    max_func = max_func.max(s.func + 1);
                    form.add_term(s, TruncatedSeries::with_cap(p, cap))?;
                }
            }
        }
        forms.push((l, form));
    }
    let nfuncs = declared.unwrap_or(max_func).max(1);
    if max_func > nfuncs {
        return Err(perr(lno, 1, format!("equations use t{max_func} but unknowns={nfuncs}")));
    }
    let mut sys = LinearPDESystem::new(ctx, nfuncs, Naming::Generic);
    for (l, form) in forms {
        sys.push(form, format!("line {l}"));
    }
    Ok(sys)
}

fn parse_flat(head: &str, lno: usize, body: &[(usize, &str)]) -> Result<SourceSystem> {
    let f = header_fields(head, lno)?;
    let n: usize = field_num(&f, "n", "#0", lno)?;
    let m: usize = field_num(&f, "m", "#1", lno)?;
    JetContext::new(n, m, 1).map_err(|e| perr(lno, 1, e.to_string()))?;
    let mut a: Vec<Option<ExactMatrix>> = vec![None; m.saturating_sub(1)];
    for &(l, line) in body {
        let (lhs, rhs, _) = split_eq(line, l)?;
        let k = indexed(lhs, 'A', l)?;
        if k < 2 || k > m {
            return Err(perr(l, 1, format!("A{k} must have 2 <= k <= m = {m}")));
        }
        let mat = parse_matrix(rhs, l)?;
        if mat.rows() != n || mat.cols() != n {
            return Err(perr(l, 1, format!("A{k} must be {n}x{n}")));
        }
        a[k - 2] = Some(mat);
    }
    let a = a.into_iter().enumerate().map(|(k, v)| v.ok_or_else(|| perr(lno, 1, format!("missing A{}", k + 2)))).collect::<Result<_>>()?;
    Ok(SourceSystem::Flat { n, m, a })
}

/// Parses a comma-separated rational vector such as `0,1/2,-3`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(|v| parse_rational(v.trim()).ok_or_else(|| Error::Invalid(format!("invalid rational `{v}`")))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let ctx = JetContext::new(2, 1, 2).unwrap().vars().clone();
        let p = to_polynomial(&parse_expression("u1_12 + 3/2*x1*u1_2").unwrap(), &ctx).unwrap();
        assert_eq!(p.to_string(), "3/2*x1*u1_2 + u1_12");
        let q = to_polynomial(&parse_expression("u1_21").unwrap(), &ctx).unwrap();
        assert_eq!(q.to_string(), "u1_12");
        assert_eq!(parse_expression("u2_11").unwrap(), Expr::Var("u2_11".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse_expression("u1_"), Err(Error::Parse { line: 1, col: 3, msg: "malformed jet index in `u1_`: trailing underscore".into() }));
        assert!(matches!(parse_expression("x1 ^ -1"), Err(Error::Parse { col: 6, .. })));
        assert!(matches!(parse_expression("x1/2"), Err(Error::Parse { col: 3, .. })));
        assert!(matches!(parse_expression("(x1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expression("w1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn files() {
        let s = parse_source("system n=1 m=1 cap=4\nF 1 1 = u1_1^2\n").unwrap();
        assert_eq!(s.kind(), "system");
        let l = parse_source("linear vars=2\neq = t1_11 + t1_22\n").unwrap();
        let SourceSystem::Linear(l) = l else { panic!() };
        assert_eq!(l.equations.len(), 1);
        assert!(parse_source("linear vars=2\neq = t1_11 + 1\n").is_err());
        let g = parse_source("segre 1 1 3\nL1 = [[1]]\nR1 = x1^2*z1^2\n").unwrap();
        assert_eq!(g.kind(), "segre");
        assert!(parse_source("segre n=1 m=1 cap=3\nL1 = [[1]]\nR1 = x1*z1\n").is_err());
    }
}
