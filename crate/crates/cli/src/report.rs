use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::Command;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub engine: String,
    pub command: Command,
    pub config: ConfigEcho,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectional: Option<SectionalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<ParallelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milnor: Option<MilnorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub randers: Option<RandersSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<GeodesicSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// The configuration as resolved, with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub algebra: AlgebraEcho,
    pub gram: Vec<Vec<f64>>,
    pub drift: Option<DriftEcho>,
    pub seed: u64,
    pub samples: usize,
    pub flagpole: Option<Vec<f64>>,
    pub edge: Option<Vec<f64>>,
    pub geodesic: GeodesicEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraEcho {
    pub dim: usize,
    pub preset: Option<String>,
    pub params: Option<ParamsEcho>,
    /// Nonzero brackets `[b_i, b_j]` with `i < j`, 1-based.
    pub brackets: Vec<VectorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub lambda: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub n: usize,
    pub u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEcho {
    /// `vector`, `preset` or `parallel:k`.
    pub source: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicEcho {
    pub v0: Vec<f64>,
    pub t: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub null: f64,
    pub positive_definite: f64,
    pub flag_relative: f64,
    pub jacobi: f64,
    pub numeric: f64,
}

/// `value` is `nabla_{b_i} b_j`, `[b_i, b_j]` and the like; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorEntry {
    pub i: usize,
    pub j: usize,
    pub value: Vec<f64>,
}

/// `value` is `R(b_i, b_j) b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSection {
    pub dim: usize,
    pub jacobi_residual: f64,
    pub jacobi_tolerance: f64,
    pub unimodular: bool,
    pub ad_traces: Vec<f64>,
    pub metric_min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSection {
    pub entries: Vec<VectorEntry>,
    pub max_abs: f64,
    pub torsion_residual: f64,
    pub compatibility_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSection {
    /// All `R(b_i, b_j) b_k` with `i < j`.
    pub entries: Vec<CurvatureEntry>,
    pub max_abs: f64,
    pub flat: bool,
    pub antisymmetry: f64,
    pub skew_last_pair: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionalSection {
    /// Zero when a single plane was given.
    pub samples: usize,
    pub seed: Option<u64>,
    pub max: Plane,
    pub min: Plane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelSection {
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilnorSection {
    pub constants: [f64; 3],
    pub mu: [f64; 3],
    /// Columns of the frame in the input basis.
    pub frame: Vec<Vec<f64>>,
    pub bracket_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandersSection {
    pub drift: Vec<f64>,
    pub drift_norm: f64,
    pub parallel_residual: f64,
    pub berwald: bool,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<Plane>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSection {
    pub samples: usize,
    pub seed: u64,
    pub max: Plane,
    pub min: Plane,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSection {
    pub v0: Vec<f64>,
    pub t: f64,
    pub steps: usize,
    pub final_velocity: Vec<f64>,
    pub energy_drift: f64,
    pub drift_pairing_drift: f64,
    pub finsler_drift: f64,
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json(doc: &ReportDocument) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits(PrettyFormatter::new()));
    doc.serialize(&mut ser).expect("report serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn from_json(text: &str) -> serde_json::Result<ReportDocument> {
    serde_json::from_str(text)
}

struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// `x, y, z` in three dimensions, `e1, ..., en` otherwise.
pub fn basis_names(dim: usize) -> Vec<String> {
    if dim == 3 {
        ["x", "y", "z"].map(String::from).to_vec()
    } else {
        (1..=dim).map(|i| format!("e{i}")).collect()
    }
}

/// Short decimal form: integers print bare, tiny and huge values in
/// scientific notation, the rest with at most ten decimals.
pub fn number(x: f64) -> String {
    if x == x.round() && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    if x.abs() < 1e-4 || x.abs() >= 1e8 {
        return format!("{x:.6e}");
    }
    let s = format!("{x:.10}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders a vector as a linear combination such as `-2 y + 0.5 z`.
pub fn combination(v: &[f64], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in v.iter().zip(names) {
        if c.abs() <= 1e-12 {
            continue;
        }
        let mag = c.abs();
        let coeff = if (mag - 1.0).abs() <= 1e-12 {
            String::new()
        } else {
            format!("{} ", number(mag))
        };
        match (out.is_empty(), *c < 0.0) {
            (true, false) => {}
            (true, true) => out.push('-'),
            (false, false) => out.push_str(" + "),
            (false, true) => out.push_str(" - "),
        }
        let _ = write!(out, "{coeff}{name}");
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn tuple(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| number(x)).collect();
    format!("({})", parts.join(", "))
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Human-readable form with tables in `nabla_x y = ...` notation.
pub fn to_text(doc: &ReportDocument, styled: bool) -> String {
    let names = basis_names(doc.config.algebra.dim);
    let mut out = String::new();
    let heading = |out: &mut String, title: &str| {
        if !out.is_empty() {
            out.push('\n');
        }
        if styled {
            let _ = writeln!(out, "\x1b[1m{title}\x1b[0m");
        } else {
            let _ = writeln!(out, "{title}");
        }
    };

    let algebra = &doc.config.algebra;
    heading(&mut out, "algebra");
    match &algebra.preset {
        Some(p) => {
            let _ = writeln!(out, "  preset {p}, dimension {}", algebra.dim);
        }
        None => {
            let _ = writeln!(out, "  dimension {}", algebra.dim);
        }
    }
    for b in &algebra.brackets {
        let _ = writeln!(
            out,
            "  [{}, {}] = {}",
            names[b.i - 1],
            names[b.j - 1],
            combination(&b.value, &names)
        );
    }
    if let Some(d) = &doc.config.drift {
        let _ = writeln!(out, "  drift X = {} ({})", combination(&d.vector, &names), d.source);
    }

    if let Some(c) = &doc.check {
        heading(&mut out, "check");
        let _ = writeln!(
            out,
            "  jacobi residual {} (tolerance {})",
            sci(c.jacobi_residual),
            sci(c.jacobi_tolerance)
        );
        let _ = writeln!(out, "  unimodular: {}", c.unimodular);
        let _ = writeln!(out, "  tr ad = {}", tuple(&c.ad_traces));
        let _ = writeln!(out, "  smallest metric eigenvalue {}", number(c.metric_min_eigenvalue));
    }

    if let Some(c) = &doc.connection {
        heading(&mut out, "Levi-Civita connection");
        for e in &c.entries {
            let _ = writeln!(
                out,
                "  ∇_{} {} = {}",
                names[e.i - 1],
                names[e.j - 1],
                combination(&e.value, &names)
            );
        }
        let _ = writeln!(
            out,
            "  torsion residual {}, compatibility residual {}",
            sci(c.torsion_residual),
            sci(c.compatibility_residual)
        );
    }

    if let Some(c) = &doc.curvature {
        heading(&mut out, "curvature");
        let mut any = false;
        for e in &c.entries {
            if e.value.iter().any(|x| x.abs() > 1e-12) {
                any = true;
                let _ = writeln!(
                    out,
                    "  R({},{}){} = {}",
                    names[e.i - 1],
                    names[e.j - 1],
                    names[e.k - 1],
                    combination(&e.value, &names)
                );
            }
        }
        if !any {
            out.push_str("  R = 0\n");
        }
        let _ = writeln!(out, "  max |R| {}, flat: {}", sci(c.max_abs), c.flat);
        let worst = c.antisymmetry.max(c.skew_last_pair).max(c.pair_symmetry).max(c.bianchi);
        let _ = writeln!(out, "  worst symmetry/Bianchi residual {}", sci(worst));
    }

    if let Some(s) = &doc.sectional {
        heading(&mut out, "sectional curvature");
        if s.samples == 0 {
            let _ = writeln!(
                out,
                "  K(span{{{}, {}}}) = {}",
                tuple(&s.max.y),
                tuple(&s.max.v),
                number(s.max.value)
            );
        } else {
            let _ = writeln!(out, "  {} random planes, seed {}", s.samples, s.seed.unwrap_or(0));
            let _ = writeln!(out, "  max K = {}", number(s.max.value));
            let _ = writeln!(out, "  min K = {}", number(s.min.value));
        }
    }

    if let Some(p) = &doc.parallel {
        heading(&mut out, "parallel left-invariant fields");
        let _ = writeln!(out, "  dimension {}", p.dimension);
        for b in &p.basis {
            let _ = writeln!(out, "  {}", combination(b, &names));
        }
        let _ = writeln!(out, "  max residual {}", sci(p.max_residual));
    }

    if let Some(m) = &doc.milnor {
        heading(&mut out, "Milnor frame");
        let _ = writeln!(
            out,
            "  c = ({}, {}, {}), mu = ({}, {}, {})",
            number(m.constants[0]),
            number(m.constants[1]),
            number(m.constants[2]),
            number(m.mu[0]),
            number(m.mu[1]),
            number(m.mu[2])
        );
        for (k, col) in m.frame.iter().enumerate() {
            let _ = writeln!(out, "  e{} = {}", k + 1, combination(col, &names));
        }
    }

    if let Some(r) = &doc.randers {
        heading(&mut out, "Randers structure");
        let _ = writeln!(out, "  |X| = {}", number(r.drift_norm));
        let _ = writeln!(out, "  max |∇X| {}", sci(r.parallel_residual));
        let _ = writeln!(out, "  labels: {}", r.labels.join(", "));
        if let Some(f) = &r.flag {
            let _ = writeln!(
                out,
                "  K(Y = {}, V = {}) = {}",
                tuple(&f.y),
                tuple(&f.v),
                number(f.value)
            );
        }
    }

    if let Some(s) = &doc.scan {
        heading(&mut out, "flag curvature scan");
        let _ = writeln!(out, "  {} flags, seed {}", s.samples, s.seed);
        let _ = writeln!(
            out,
            "  max K = {} at Y = {}, V = {}",
            number(s.max.value),
            tuple(&s.max.y),
            tuple(&s.max.v)
        );
        let _ = writeln!(out, "  min K = {}", number(s.min.value));
    }

    if let Some(g) = &doc.geodesic {
        heading(&mut out, "geodesic");
        let _ = writeln!(
            out,
            "  u0 = {}, t = {}, {} RK4 steps",
            tuple(&g.v0),
            number(g.t),
            g.steps
        );
        let _ = writeln!(out, "  u(t) = {}", tuple(&g.final_velocity));
        let _ = writeln!(
            out,
            "  drift: energy {}, <X,u> {}, F {}",
            sci(g.energy_drift),
            sci(g.drift_pairing_drift),
            sci(g.finsler_drift)
        );
    }

    for note in &doc.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_read_like_tables() {
        let names = basis_names(3);
        assert_eq!(combination(&[0.0, -2.0, 2.0], &names), "-2 y + 2 z");
        assert_eq!(combination(&[1.0, 0.0, -0.5], &names), "x - 0.5 z");
        assert_eq!(combination(&[0.0, 0.0, 1e-15], &names), "0");
        assert_eq!(basis_names(4)[3], "e4");
    }

    #[test]
    fn seventeen_digit_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = format!("{x:.16e}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}
