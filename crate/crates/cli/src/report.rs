//! Reports and their text and JSON renderings.

use std::fmt::Write as _;
use std::time::Duration;

use epsfac_core::TrivializedGradedLine;
use serde::Serialize;

use crate::problem::ProblemFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

/// One asserted equality, with both sides as printed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub lhs: String,
    pub rhs: String,
}

impl Check {
    pub fn equal<T: PartialEq + std::fmt::Display>(name: impl Into<String>, lhs: &T, rhs: &T) -> Self {
        Check { name: name.into(), verdict: Verdict::of(lhs == rhs), lhs: lhs.to_string(), rhs: rhs.to_string() }
    }

    /// Compares printed forms; used where the two sides live in different
    /// types or bases.
    pub fn same_text(name: impl Into<String>, lhs: String, rhs: String) -> Self {
        Check { name: name.into(), verdict: Verdict::of(lhs == rhs), lhs, rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    pub grade: i64,
    pub unit: String,
}

impl From<&TrivializedGradedLine> for Line {
    fn from(l: &TrivializedGradedLine) -> Self {
        Line { grade: l.grade(), unit: l.unit().to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormLine {
    pub form: String,
    pub grade: i64,
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointLine {
    pub point: String,
    pub grade: i64,
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiskCohomology {
    pub h0: u64,
    pub h1: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveCohomology {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalResults {
    pub rank: usize,
    pub irregularity: i64,
    pub good_pair: [String; 2],
    pub cohomology: DiskCohomology,
    pub epsilon: Vec<FormLine>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalResults {
    pub cohomology: CurveCohomology,
    pub euler_characteristic: i64,
    pub local: Vec<PointLine>,
    pub local_grade_sum: i64,
    pub euler_oracle: i64,
    pub line_bundle_grades: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Iso {
    pub from: usize,
    pub to: usize,
    pub unit: String,
}

/// Units of `grdet(f^-1 L : L)` measured on several lattices `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistData {
    pub f: String,
    pub lattices: Vec<String>,
    pub units: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrystalResults {
    pub epsilon: Vec<FormLine>,
    pub crystal_isos: Vec<Iso>,
    pub twists: Vec<TwistData>,
    pub random_triples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairDet {
    pub from: usize,
    pub to: usize,
    pub grade: i64,
    pub unit: String,
    pub smith_exponents: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeResults {
    pub rank: usize,
    pub relative_det: Vec<PairDet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Results {
    Local(LocalResults),
    Global(GlobalResults),
    Crystal(CrystalResults),
    Lattice(LatticeResults),
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub base: String,
    pub truncation: i64,
    pub seed: u64,
    pub input: ProblemFile,
    pub results: Results,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).expect("reports serialize");
            v.push(b'\n');
            v
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "epsfac {} over {} (truncation {}, seed {})", r.command, r.base, r.truncation, r.seed);
    match &r.results {
        Results::Local(x) => {
            let _ = writeln!(s, "rank {}, irregularity {}", x.rank, x.irregularity);
            let _ = writeln!(s, "good pair L = {}, N = {}", x.good_pair[0], x.good_pair[1]);
            let _ = writeln!(s, "H^0 = {}, H^1 = {}", x.cohomology.h0, x.cohomology.h1);
            for e in &x.epsilon {
                let _ = writeln!(s, "eps~[{}] = (grade {}, unit {})", e.form, e.grade, e.unit);
            }
        }
        Results::Global(x) => {
            let c = &x.cohomology;
            let _ = writeln!(s, "H^0 = {}, H^1 = {}, H^2 = {}, chi = {}", c.h0, c.h1, c.h2, x.euler_characteristic);
            for p in &x.local {
                let _ = writeln!(s, "  at {}: (grade {}, unit {})", p.point, p.grade, p.unit);
            }
            let _ = writeln!(s, "sum of local grades = {}, Euler oracle = {}", x.local_grade_sum, x.euler_oracle);
        }
        Results::Crystal(x) => {
            for e in &x.epsilon {
                let _ = writeln!(s, "eps~[{}] = (grade {}, unit {})", e.form, e.grade, e.unit);
            }
            for c in &x.crystal_isos {
                let _ = writeln!(s, "c[{}<-{}] = {}", c.to, c.from, c.unit);
            }
            for t in &x.twists {
                let _ = writeln!(s, "grdet_f units for f = {} on {}: {}", t.f, t.lattices.join(", "), t.units.join(", "));
            }
            if x.random_triples > 0 {
                let _ = writeln!(s, "random triples: {}", x.random_triples);
            }
        }
        Results::Lattice(x) => {
            let _ = writeln!(s, "rank {}", x.rank);
            for d in &x.relative_det {
                let _ = writeln!(
                    s,
                    "grdet(L{} : L{}) = (grade {}, unit {}), elementary divisors t^{:?}",
                    d.from, d.to, d.grade, d.unit, d.smith_exponents
                );
            }
        }
    }
    for c in &r.checks {
        if c.verdict == Verdict::Pass {
            let _ = writeln!(s, "{} {}", c.verdict.label(), c.name);
        } else {
            let _ = writeln!(s, "{} {}: {} != {}", c.verdict.label(), c.name, c.lhs, c.rhs);
        }
    }
    let _ = writeln!(s, "verdict: {} ({:.3} s)", r.verdict.label(), r.elapsed.as_secs_f64());
    s
}
