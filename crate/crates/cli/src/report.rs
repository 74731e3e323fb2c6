//! Serializable command reports and their plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use isingkw::exactalg::{GPoly, GaussRat, VarId};
use serde::Serialize;

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Term {
    pub monomial: String,
    pub coeff: String,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Value {
    Polynomial { text: String, terms: Vec<Term> },
    Scalar { value: String },
    Float { value: f64 },
}

impl Value {
    pub fn poly(p: &GPoly, names: &dyn Fn(VarId) -> String) -> Value {
        Value::Polynomial {
            text: p.display_with(names).to_string(),
            terms: p.term_strings(names).into_iter().map(|(monomial, coeff)| Term { monomial, coeff }).collect(),
        }
    }

    pub fn scalar(c: &GaussRat) -> Value {
        Value::Scalar { value: c.to_string() }
    }

    pub fn text(&self) -> String {
        match self {
            Value::Polynomial { text, .. } | Value::Scalar { value: text } => text.clone(),
            Value::Float { value } => format!("{value:.15e}"),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct GraphInfo {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
    pub components: usize,
    pub variables: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct MethodResult {
    pub method: String,
    pub value: Value,
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct ClassInfo {
    pub index: usize,
    /// Values of the quadratic form on the homology basis.
    pub form: Vec<u8>,
    pub arf: u8,
    pub eps_m0: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_sqrt: Option<Value>,
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Skipped, detail: why.into() }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct PathInfo {
    pub path: String,
    pub length: usize,
    pub sign: i32,
}

#[derive(Serialize, Clone, Debug)]
pub struct Matrices {
    pub spin: usize,
    pub kw_rows: Vec<String>,
    pub kac_ward: Vec<Vec<String>>,
    pub kasteleyn_size: usize,
    pub kasteleyn: Vec<Vec<String>>,
}

#[derive(Serialize, Clone, Debug)]
pub struct BenchInfo {
    pub n: usize,
    pub weight: f64,
    pub ising_vertices: usize,
    pub ising_edges: usize,
    pub fisher_vertices: usize,
    pub z: f64,
    pub free_energy_per_site: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_brute: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    pub setup_seconds: f64,
    pub pfaffian_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_seconds: Option<f64>,
}

/// One file's worth of output.
#[derive(Serialize, Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Matrices>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: &str, file: Option<String>) -> Report {
        Report { command: command.into(), file, ..Report::default() }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn timing(&mut self, name: &str, secs: f64) {
        self.timings.get_or_insert_with(BTreeMap::new).insert(name.into(), secs);
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        if let Some(f) = &self.file {
            let _ = writeln!(s, "{f}");
        }
        if let Some(g) = &self.graph {
            let _ = writeln!(
                s,
                "  V={} E={} F={} genus={} components={}",
                g.vertices, g.edges, g.faces, g.genus, g.components
            );
        }
        if let Some(p) = &self.point {
            let parts: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  at {}", parts.join(", "));
        }
        for (i, b) in self.basis.iter().enumerate() {
            let _ = writeln!(s, "  basis cycle {i}: {}", b.join(" "));
        }
        for m in &self.methods {
            let _ = writeln!(s, "  {:<9} {}", format!("{}:", m.method), m.value.text());
        }
        for c in &self.classes {
            let form: Vec<String> = c.form.iter().map(|b| b.to_string()).collect();
            let _ = write!(s, "  class {}: q = [{}] arf = {} eps(M0) = {:+}", c.index, form.join(" "), c.arf, c.eps_m0);
            if let Some(d) = &c.det_sqrt {
                let _ = write!(s, " det^(1/2) = {}", d.text());
            }
            s.push('\n');
        }
        if let Some(m) = &self.matrices {
            let _ = writeln!(s, "  Kac-Ward matrix I - T (spin {}), rows {}:", m.spin, m.kw_rows.join(" "));
            write_grid(&mut s, &m.kac_ward);
            let _ = writeln!(s, "  Kasteleyn matrix (size {}):", m.kasteleyn_size);
            write_grid(&mut s, &m.kasteleyn);
        }
        for p in &self.paths {
            let _ = writeln!(s, "  {:>2}  {:+}  {}", p.length, p.sign, p.path);
        }
        if let Some(b) = &self.bench {
            let _ = writeln!(s, "  torus {}x{} weight {}: {} vertices, {} edges, Fisher graph {} vertices", b.n, b.n, b.weight, b.ising_vertices, b.ising_edges, b.fisher_vertices);
            let _ = writeln!(s, "  Z = {:.15e}  (log Z)/V = {:.15}", b.z, b.free_energy_per_site);
            let _ = writeln!(s, "  setup {:.3} s, Pfaffians {:.3} s", b.setup_seconds, b.pfaffian_seconds);
            if let (Some(zb), Some(r), Some(t)) = (b.z_brute, b.relative_error, b.brute_seconds) {
                let _ = writeln!(s, "  brute force {zb:.15e} in {t:.3} s, relative error {r:.2e}");
            }
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "ok  ",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            if c.detail.is_empty() {
                let _ = writeln!(s, "  [{tag}] {}", c.name);
            } else {
                let _ = writeln!(s, "  [{tag}] {}: {}", c.name, c.detail);
            }
        }
        if let Some(t) = &self.timings {
            for (k, v) in t {
                let _ = writeln!(s, "  time {k}: {v:.4} s");
            }
        }
        s
    }
}

fn write_grid(s: &mut String, rows: &[Vec<String>]) {
    let width = rows.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(s, "    {}", cells.join(" "));
    }
}
