use crate::algebra::{rat, Rational};
use crate::error::{Error, Result};
use crate::fields::{prolong2_closed, prolong_recursive, SymbolicVectorField};
use crate::jets::{jet_var_name, JetVar};
use crate::lieeq::{generate_lie_equations, GeneratedEquations, LinearPDESystem};
use crate::lintype::{deformation_monotonicity_check, dim_bound, finite_type, polynomial_solutions};
use crate::segre::{aut_bound_report, derive_segre_system, flat_nondegenerate_check, flat_relation_matrices, scale_deform};
use crate::systems::PDESystemS;

use super::parse::{parse_source, SourceSystem};
use super::print::{print_linear, print_source, print_system};
use super::report::{join, Report};
use super::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

/// Cap for flat systems when neither the input nor the config gives one.
const FLAT_CAP: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// Echo the input in canonical form.
    Parse,
    /// Symbolic prolongation of a general field on `(n, m)`.
    Prolong { n: usize, m: usize, order: u32 },
    LieEqs,
    Analyze,
    Segre,
    Involutive,
    FlatDim,
    DeformCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse => "parse",
            Command::Prolong { .. } => "prolong",
            Command::LieEqs => "lie-eqs",
            Command::Analyze => "analyze",
            Command::Segre => "segre",
            Command::Involutive => "involutive",
            Command::FlatDim => "flat-dim",
            Command::DeformCheck => "deform-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownVariable(_) | Error::Invalid(_) | Error::Dimension(_) | Error::ContextMismatch(_) | Error::NotRepresentable(_) => EXIT_INPUT,
        _ => EXIT_FAILURE,
    }
}

/// Runs one subcommand on the text of its input file.
pub fn run(cmd: &Command, cfg: &Config, input: &str) -> Outcome {
    match dispatch(cmd, cfg, input) {
        Ok(o) => o,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(&e) },
    }
}

fn dispatch(cmd: &Command, cfg: &Config, input: &str) -> Result<Outcome> {
    if let Command::Prolong { n, m, order } = cmd {
        return prolong(*n, *m, *order, cfg).map(Outcome::ok);
    }
    let src = apply_cap(parse_source(input)?, cfg)?;
    match cmd {
        Command::Parse => Ok(Outcome::ok(print_source(&src))),
        Command::LieEqs => {
            let (_, gen) = generate(&src, cfg)?;
            let mut out = format!("# {} {}\n# n_w: {}\n", Report::tool(), cmd.name(), gen.n_w);
            for w in &gen.warnings {
                out.push_str(&format!("# warning: {w}\n"));
            }
            out.push_str(&print_linear(&gen.system));
            Ok(Outcome::ok(out))
        }
        Command::Segre => {
            let SourceSystem::Segre(d) = &src else { return Err(wrong_kind(cmd, &src, "segre")) };
            let s = derive_segre_system(d)?;
            let inv = s.involutivity_residuals()?;
            let mut out = format!("# {} {}\n# involutive_to_cap: {}\n", Report::tool(), cmd.name(), inv.involutive_to_cap());
            out.push_str(&print_system(&s));
            Ok(Outcome::ok(out))
        }
        Command::Involutive => involutive(&src, cfg).map(Outcome::ok),
        Command::Analyze => analyze(&src, cfg),
        Command::FlatDim => flat_dim(&src, cfg),
        Command::DeformCheck => deform_check(&src, cfg),
        Command::Prolong { .. } => unreachable!("handled above"),
    }
}

fn wrong_kind(cmd: &Command, src: &SourceSystem, want: &str) -> Error {
    Error::Invalid(format!("`{}` expects a {want} file, got a {} file", cmd.name(), src.kind()))
}

fn apply_cap(src: SourceSystem, cfg: &Config) -> Result<SourceSystem> {
    let Some(c) = cfg.cap else { return Ok(src) };
    Ok(match src {
        SourceSystem::System(mut s) => {
            if s.is_exact() {
                s.set_cap(c);
                SourceSystem::System(s)
            } else if c <= s.cap() {
                SourceSystem::System(s.truncated(c))
            } else {
                return Err(Error::Invalid(format!("cannot raise the cap of a truncated system from {} to {c}", s.cap())));
            }
        }
        SourceSystem::Segre(d) => SourceSystem::Segre(d.with_cap(c)),
        other => other,
    })
}

/// The second-order system behind a system, Segre or flat input.
fn pde_system(src: &SourceSystem, cfg: &Config) -> Result<Option<PDESystemS>> {
    Ok(match src {
        SourceSystem::System(s) => Some(s.clone()),
        SourceSystem::Segre(d) => Some(derive_segre_system(d)?),
        SourceSystem::Flat { n, m, a } => Some(PDESystemS::flat(*n, *m, a, cfg.cap.unwrap_or(FLAT_CAP))?),
        SourceSystem::Linear(_) => None,
    })
}

fn generate(src: &SourceSystem, cfg: &Config) -> Result<(PDESystemS, GeneratedEquations)> {
    let s = pde_system(src, cfg)?.ok_or_else(|| Error::Invalid("a linear file already holds determining equations".into()))?;
    let gen = generate_lie_equations(&s, cfg.seed)?;
    Ok((s, gen))
}

fn describe_input(rep: &mut Report, src: &SourceSystem) {
    rep.section("input");
    rep.kv("kind", src.kind());
    match src {
        SourceSystem::System(s) => {
            rep.kv("n", s.n());
            rep.kv("m", s.m());
            rep.kv("cap", s.cap());
            rep.kv("exact", s.is_exact());
        }
        SourceSystem::Segre(d) => {
            rep.kv("n", d.n());
            rep.kv("m", d.m());
            rep.kv("cap", d.cap());
            rep.kv("quadric", d.remainders().iter().all(|r| r.is_zero()));
        }
        SourceSystem::Linear(l) => {
            rep.kv("vars", l.nvars());
            rep.kv("unknowns", l.nfuncs);
            rep.kv("equations", l.equations.len());
            rep.kv("exact", l.is_exact());
        }
        SourceSystem::Flat { n, m, .. } => {
            rep.kv("n", n);
            rep.kv("m", m);
        }
    }
    rep.end();
}

fn involutivity_section(rep: &mut Report, s: &PDESystemS) -> Result<bool> {
    let inv = s.involutivity_residuals()?;
    rep.section("involutivity");
    rep.kv("cap", inv.cap);
    rep.kv("checked", inv.residuals.len());
    rep.kv("involutive_to_cap", inv.involutive_to_cap());
    let bad: Vec<_> = inv.nonzero().collect();
    if !bad.is_empty() {
        rep.section("nonzero");
        for r in bad {
            rep.item(format!("{} = {}", r.label, r.value));
        }
        rep.end();
    }
    rep.end();
    Ok(inv.involutive_to_cap())
}

fn involutive(src: &SourceSystem, cfg: &Config) -> Result<String> {
    let s = pde_system(src, cfg)?.ok_or_else(|| Error::Invalid("`involutive` expects a system, segre or flat file".into()))?;
    let mut rep = Report::new("involutive", cfg);
    describe_input(&mut rep, src);
    involutivity_section(&mut rep, &s)?;
    Ok(rep.render())
}

fn generation_section(rep: &mut Report, gen: &GeneratedEquations) {
    rep.section("lie_equations");
    rep.kv("count", gen.system.equations.len());
    rep.kv("order", gen.system.order());
    rep.kv("exact", gen.system.is_exact());
    rep.kv("n_w", gen.n_w);
    rep.kv("ranks", gen.ranks.iter().map(|(d, r)| format!("{d}:{r}")).collect::<Vec<_>>().join(", "));
    for w in &gen.warnings {
        rep.kv("warning", w);
    }
    rep.end();
}

fn point_for(l: &LinearPDESystem, cfg: &Config) -> Result<Vec<Rational>> {
    match &cfg.point {
        Some(p) if p.len() != l.nvars() => Err(Error::Dimension(format!("--point has {} coordinates, the system has {} variables", p.len(), l.nvars()))),
        Some(p) => Ok(p.clone()),
        None => Ok(vec![rat(0, 1); l.nvars()]),
    }
}

/// Type, bound and optional oracle. Returns the bound, or `None` when the
/// type is not decided within `rmax`.
fn linear_sections(rep: &mut Report, l: &LinearPDESystem, cfg: &Config) -> Result<Option<usize>> {
    let y0 = point_for(l, cfg)?;
    let t = finite_type(l, &y0, cfg.rmax)?;
    rep.section("finite_type");
    rep.kv("point", join(&y0));
    rep.kv("completed_order", t.order);
    rep.kv("symbol_dims", t.symbol_dims.iter().map(|(s, d)| format!("{s}:{d}")).collect::<Vec<_>>().join(", "));
    rep.kv("r_max", t.r_max);
    rep.kv("dropped_rows", t.dropped_rows);
    match t.type_value {
        Some(v) => rep.kv("type", v),
        None => rep.kv("type", format!("not decided within r_max={}", t.r_max)),
    }
    rep.end();
    if !t.finite {
        return Ok(None);
    }
    let b = dim_bound(l, &y0, &t)?;
    rep.section("dim_bound");
    rep.kv("jet_count", b.jet_count);
    rep.kv("rank_l", b.rank_l);
    rep.kv("prolonged_to", b.prolonged_to);
    rep.kv("dropped_rows", b.dropped_rows);
    rep.kv("bound", b.bound);
    rep.kv("parametric", b.parametric.iter().map(|s| l.symbol_name(s)).collect::<Vec<_>>().join(", "));
    rep.end();
    if let Some(d) = cfg.oracle_degree {
        rep.section("oracle");
        rep.kv("degree", d);
        if l.is_exact() {
            let p = polynomial_solutions(l, d)?;
            rep.kv("polynomial_solutions", p.dim);
            rep.kv("within_bound", p.dim <= b.bound);
        } else {
            rep.kv("polynomial_solutions", "skipped (truncated coefficients)");
        }
        rep.end();
    }
    Ok(Some(b.bound))
}

fn finish(rep: Report, bound: Option<usize>, cfg: &Config) -> Outcome {
    match bound {
        Some(_) => Outcome::ok(rep.render()),
        None => Outcome { stdout: rep.render(), stderr: format!("finite type not decided within r_max={}\n", cfg.rmax), code: EXIT_UNDECIDED },
    }
}

fn analyze(src: &SourceSystem, cfg: &Config) -> Result<Outcome> {
    let mut rep = Report::new("analyze", cfg);
    describe_input(&mut rep, src);
    let lin = match src {
        SourceSystem::Linear(l) => l.clone(),
        _ => {
            let (s, gen) = generate(src, cfg)?;
            involutivity_section(&mut rep, &s)?;
            generation_section(&mut rep, &gen);
            gen.system
        }
    };
    let bound = linear_sections(&mut rep, &lin, cfg)?;
    if let (SourceSystem::Segre(_), Some(b)) = (src, bound) {
        rep.kv("aut", aut_bound_report(b));
    }
    Ok(finish(rep, bound, cfg))
}

fn flat_dim(src: &SourceSystem, cfg: &Config) -> Result<Outcome> {
    let (n, m, a) = match src {
        SourceSystem::Flat { n, m, a } => (*n, *m, a.clone()),
        SourceSystem::Segre(d) => (d.n(), d.m(), flat_relation_matrices(d.hermitian())?),
        _ => return Err(wrong_kind(&Command::FlatDim, src, "flat or segre")),
    };
    let mut rep = Report::new("flat-dim", cfg);
    describe_input(&mut rep, src);
    rep.section("flat");
    rep.kv("matrices", a.iter().map(super::print::format_matrix).collect::<Vec<_>>().join("; "));
    rep.kv("nondegenerate", flat_nondegenerate_check(&a));
    rep.end();
    let s = PDESystemS::flat(n, m, &a, cfg.cap.unwrap_or(FLAT_CAP))?;
    let gen = generate_lie_equations(&s, cfg.seed)?;
    generation_section(&mut rep, &gen);
    let bound = linear_sections(&mut rep, &gen.system, cfg)?;
    if let (SourceSystem::Segre(_), Some(b)) = (src, bound) {
        rep.kv("aut", aut_bound_report(b));
    }
    Ok(finish(rep, bound, cfg))
}

fn deform_check(src: &SourceSystem, cfg: &Config) -> Result<Outcome> {
    let SourceSystem::Segre(d) = src else { return Err(wrong_kind(&Command::DeformCheck, src, "segre")) };
    let samples = if cfg.epsilon.is_empty() { vec![rat(1, 8), rat(1, 4)] } else { cfg.epsilon.clone() };
    let family = |eps: &Rational| -> Result<LinearPDESystem> { Ok(generate_lie_equations(&derive_segre_system(&scale_deform(d, eps))?, cfg.seed)?.system) };
    let probe = family(&rat(0, 1))?;
    let y0 = point_for(&probe, cfg)?;
    let report = deformation_monotonicity_check(&family, &samples, &y0, cfg.rmax)?;
    let mut rep = Report::new("deform-check", cfg);
    describe_input(&mut rep, src);
    rep.section("deformation");
    let fmt = |t: Option<u32>, b: Option<usize>| {
        format!("type {} bound {}", t.map_or("undecided".into(), |v| v.to_string()), b.map_or("undecided".into(), |v| v.to_string()))
    };
    rep.kv("baseline", fmt(report.baseline.type_value, report.baseline.bound));
    for s in &report.samples {
        rep.item(format!("epsilon {}: {} monotone {}", s.epsilon, fmt(s.type_value, s.bound), s.monotone));
    }
    rep.kv("monotone", report.monotone());
    for f in &report.findings {
        rep.kv("finding", f);
    }
    rep.end();
    rep.section("aut");
    for s in std::iter::once(&report.baseline).chain(&report.samples) {
        if let Some(b) = s.bound {
            rep.item(format!("epsilon {}: {}", s.epsilon, aut_bound_report(b)));
        }
    }
    rep.end();
    Ok(Outcome::ok(rep.render()))
}

fn prolong(n: usize, m: usize, order: u32, cfg: &Config) -> Result<String> {
    if order == 0 {
        return Err(Error::Invalid("prolongation order must be at least 1".into()));
    }
    let x = SymbolicVectorField::new(n, m)?;
    let pf = prolong_recursive(&x, order)?;
    let mut rep = Report::new("prolong", cfg);
    rep.kv("n", n);
    rep.kv("m", m);
    rep.kv("order", order);
    if order >= 2 && n * m <= 9 {
        let closed = prolong2_closed(&x)?;
        let agrees = pf.eta.iter().filter(|((_, a), _)| a.degree() <= 2).all(|(k, v)| closed.eta.get(k) == Some(v));
        rep.kv("closed_form_agrees", agrees);
    }
    let name = |s: &crate::fields::UnknownSymbol| s.lie_name(n);
    rep.section("coefficients");
    for (j, t) in pf.theta.iter().enumerate() {
        rep.kv(&format!("x{}", j + 1), t.display_with(name));
    }
    for ((mu, alpha), e) in &pf.eta {
        rep.kv(&jet_var_name(&JetVar::U(*mu, alpha.clone())), e.display_with(name));
    }
    rep.end();
    Ok(rep.render())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = "segre n=1 m=1 cap=5\nL1 = [[1]]\nR1 = x1^2*z1^2\n";

    #[test]
    fn exit_codes() {
        let cfg = Config::default();
        assert_eq!(run(&Command::Parse, &cfg, "system n=1 m=1 cap=3\nF 1 1 = u1_\n").code, EXIT_INPUT);
        let lap = "linear vars=2 unknowns=1\neq = t1_11 + t1_22\n";
        let o = run(&Command::Analyze, &cfg, lap);
        assert_eq!(o.code, EXIT_UNDECIDED);
        assert_eq!(o.stderr, "finite type not decided within r_max=6\n");
    }

    #[test]
    fn segre_analysis_reports_aut_line() {
        let cfg = Config { cap: Some(4), ..Config::default() };
        let o = run(&Command::Analyze, &cfg, SPHERE);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(o.stdout.contains("aut: dim_R Aut(M) ≤ "), "{}", o.stdout);
        assert_eq!(o, run(&Command::Analyze, &cfg, SPHERE));
    }

    #[test]
    fn prolong_first_order() {
        let o = run(&Command::Prolong { n: 1, m: 1, order: 2 }, &Config::default(), "");
        assert!(o.stdout.contains("u1_1: eta1_x1 + u1_1*eta1_u1 - u1_1*theta1_x1 - u1_1^2*theta1_u1"), "{}", o.stdout);
        assert!(o.stdout.contains("closed_form_agrees: true"));
    }
}
