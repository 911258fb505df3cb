use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../inputs").join(name)
}

fn tool(args: &[&str], stdin: Option<&str>) -> (String, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_segre-lie"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap(), out.status.code().unwrap())
}

#[test]
fn analyze_flat_ode() {
    let (out, _, code) = tool(&["analyze", input("flat_ode.txt").to_str().unwrap(), "--oracle-degree", "3"], None);
    assert_eq!(code, 0);
    assert!(out.contains("\n  type: 1\n"), "{out}");
    assert!(out.contains("\n  bound: 8\n"), "{out}");
    assert!(out.contains("\n  polynomial_solutions: 8\n"), "{out}");
}

#[test]
fn segre_prints_the_third_model_system() {
    let (out, _, code) = tool(&["segre", input("quadric_m3.txt").to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(out.ends_with("system n=2 m=2 cap=4\nF 1 1 = 0\nF 1 2 = 0\nF 2 2 = 0\nG 2 1 = u1_2\nG 2 2 = 0\n"), "{out}");
}

#[test]
fn laplace_is_not_decided() {
    let (_, err, code) = tool(&["analyze", input("laplace.txt").to_str().unwrap()], None);
    assert_eq!(code, 3);
    assert!(err.contains("finite type not decided within r_max=6"));
}

#[test]
fn input_errors_exit_with_two() {
    let (_, err, code) = tool(&["parse", "-"], Some("system n=1 m=1 cap=3\nF 1 1 = u1_\n"));
    assert_eq!(code, 2);
    assert!(err.contains("2:11"), "{err}");
    let (_, _, code) = tool(&["analyze", "/nonexistent/file"], None);
    assert_eq!(code, 2);
}

#[test]
fn lie_equations_pipe_into_analyze() {
    let (eqs, _, code) = tool(&["lie-eqs", input("square_slope.txt").to_str().unwrap()], None);
    assert_eq!(code, 0);
    let (out, _, code) = tool(&["analyze", "-"], Some(&eqs));
    assert_eq!(code, 0);
    assert!(out.contains("\n  bound: 8\n"), "{out}");
}

#[test]
fn seed_flag_accepts_hex() {
    let (out, _, code) = tool(&["--seed", "0x10", "involutive", input("perturbed_sphere.txt").to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(out.contains("seed: 0x10"));
}
