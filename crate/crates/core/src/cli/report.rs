//! Structured key/value report. Deterministic: same input and config give
//! byte-identical text.

use std::fmt::Display;

use super::Config;

pub const SCHEMA: &str = "segre-lie-report/1";

pub struct Report {
    lines: Vec<String>,
    depth: usize,
}

impl Report {
    pub fn new(command: &str, cfg: &Config) -> Self {
        let mut r = Report { lines: Vec::new(), depth: 0 };
        r.kv("schema", SCHEMA);
        r.kv("tool", Self::tool());
        r.kv("command", command);
        r.section("config");
        r.kv("cap", cfg.cap.map_or("from input".to_string(), |c| c.to_string()));
        r.kv("seed", format!("{:#x}", cfg.seed));
        r.kv("rmax", cfg.rmax);
        r.kv("point", cfg.point.as_ref().map_or("origin".to_string(), |p| join(p)));
        r.kv("epsilon", if cfg.epsilon.is_empty() { "none".to_string() } else { join(&cfg.epsilon) });
        r.kv("oracle_degree", cfg.oracle_degree.map_or("none".to_string(), |d| d.to_string()));
        r.end();
        r
    }

    pub fn tool() -> &'static str {
        concat!("segre-lie ", env!("CARGO_PKG_VERSION"))
    }

    pub fn section(&mut self, name: &str) {
        self.push(format!("{name}:"));
        self.depth += 1;
    }

    pub fn end(&mut self) {
        self.depth = self.depth.saturating_sub(1);
    }

    pub fn kv(&mut self, key: &str, value: impl Display) {
        self.push(format!("{key}: {value}"));
    }

    pub fn item(&mut self, value: impl Display) {
        self.push(format!("- {value}"));
    }

    fn push(&mut self, s: String) {
        self.lines.push(format!("{}{}", "  ".repeat(self.depth), s));
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

pub fn join<T: Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
