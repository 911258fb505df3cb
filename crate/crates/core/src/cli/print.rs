//! Canonical text for the input file kinds. Output of these printers parses
//! back to an equal value.

use std::fmt::Write;

use crate::algebra::ExactMatrix;
use crate::lieeq::LinearPDESystem;
use crate::segre::SegreDefining;
use crate::systems::PDESystemS;

use super::parse::{linear_ctx, SourceSystem};

pub fn print_source(s: &SourceSystem) -> String {
    match s {
        SourceSystem::System(s) => print_system(s),
        SourceSystem::Segre(d) => print_segre(d),
        SourceSystem::Linear(l) => print_linear(l),
        SourceSystem::Flat { n, m, a } => print_flat(*n, *m, a),
    }
}

/// Every `F i j` with `i <= j` and every `G k j`, zeros included.
pub fn print_system(s: &PDESystemS) -> String {
    let mut out = format!("system n={} m={} cap={}", s.n(), s.m(), s.cap());
    if !s.is_exact() {
        out.push_str(" truncated");
    }
    out.push('\n');
    for i in 0..s.n() {
        for j in i..s.n() {
            let _ = writeln!(out, "F {} {} = {}", i + 1, j + 1, s.f(i, j).poly());
        }
    }
    for k in 1..s.m() {
        for j in 0..s.n() {
            let _ = writeln!(out, "G {} {} = {}", k + 1, j + 1, s.g(k, j).poly());
        }
    }
    out
}

pub fn format_matrix(a: &ExactMatrix) -> String {
    let rows: Vec<String> = a.to_rows().iter().map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}

pub fn print_segre(d: &SegreDefining) -> String {
    let mut out = format!("segre n={} m={} cap={}\n", d.n(), d.m(), d.cap());
    for (k, l) in d.hermitian().iter().enumerate() {
        let _ = writeln!(out, "L{} = {}", k + 1, format_matrix(l));
    }
    for (k, r) in d.remainders().iter().enumerate() {
        let _ = writeln!(out, "R{} = {}", k + 1, r.poly());
    }
    out
}

/// Coefficients are renamed positionally to `y1..yN`, unknowns to `t<j>`.
/// Truncated coefficients are written with the smallest cap of the system.
pub fn print_linear(l: &LinearPDESystem) -> String {
    let ctx = linear_ctx(l.nvars());
    let mut out = format!("linear vars={} unknowns={}", l.nvars(), l.nfuncs);
    // one conservative cap for the whole file
    if let Some(c) = l.equations.iter().flat_map(|e| e.form.terms().filter_map(|(_, c)| c.cap())).min() {
        let _ = write!(out, " truncated={c}");
    }
    out.push('\n');
    for e in &l.equations {
        let form = e.form.map_coefficients(&ctx, |c| Ok(c.remap(&ctx, |i| i))).expect("positional rename");
        let _ = writeln!(out, "eq = {}", form.display_with(|s| s.generic_name()));
    }
    out
}

pub fn print_flat(n: usize, m: usize, a: &[ExactMatrix]) -> String {
    let mut out = format!("flat n={n} m={m}\n");
    for (k, mat) in a.iter().enumerate() {
        let _ = writeln!(out, "A{} = {}", k + 2, format_matrix(mat));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse::parse_source;
    use crate::segre::{derive_segre_system, model_quadric};

    #[test]
    fn round_trips() {
        for text in [
            "system n=1 m=1 cap=4\nF 1 1 = u1_1^2\n",
            "segre n=2 m=2 cap=4\nL1 = [[1, 0], [0, 1]]\nL2 = [[1, 0], [0, -1]]\nR1 = 0\nR2 = 0\n",
            "flat n=2 m=2\nA2 = [[1, 0], [0, -1]]\n",
            "linear vars=2 unknowns=1\neq = t1_22 + t1_11\neq = (y1 + 1)*t1_1 - 2*y2*t1\n",
        ] {
            let a = parse_source(text).unwrap();
            let printed = print_source(&a);
            let b = parse_source(&printed).unwrap();
            assert_eq!(printed, print_source(&b));
        }
    }

    #[test]
    fn segre_system_prints_golden_lines() {
        let d = SegreDefining::quadric(2, 2, 4, model_quadric(1).unwrap()).unwrap();
        let text = print_system(&derive_segre_system(&d).unwrap());
        assert!(text.contains("G 2 1 = u1_1\n"));
        assert!(text.contains("G 2 2 = -u1_2\n"));
        assert!(text.starts_with("system n=2 m=2 cap=4\n"));
    }
}
