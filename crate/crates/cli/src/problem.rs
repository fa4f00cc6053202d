//! Problem files: JSON documents validated against a closed schema before
//! any computation runs.

use std::fmt;
use std::path::Path;

use epsfac_core::parse::{parse_ratfunc, parse_series};
use epsfac_core::poly::RatFunc;
use epsfac_core::{BaseRing, FormalConnection, LTCell, Lattice, LaurentSeries, Point, Rational};
use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    DiskEpsilon,
    GlobalCheck,
    CrystalCheck,
    LatticeDet,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::DiskEpsilon => "disk-epsilon",
            Mode::GlobalCheck => "global-check",
            Mode::CrystalCheck => "crystal-check",
            Mode::LatticeDet => "lattice-det",
        }
    }

    /// The subcommand that runs this mode.
    pub fn command(self) -> &'static str {
        match self {
            Mode::DiskEpsilon => "local",
            m => m.name(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Rationals,
    Nilpotent,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kind: BaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(default = "zero_str")]
    pub q: String,
    #[serde(default = "zero_str")]
    pub lambda: String,
    #[serde(default = "one")]
    pub jordan: usize,
    #[serde(default = "one")]
    pub ram: usize,
}

fn zero_str() -> String {
    "0".into()
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub cells: Vec<CellSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalSpec {
    pub omega: String,
    pub nu: String,
    pub points: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// Rows of the basis matrix; columns are the basis vectors.
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub grade: i64,
    pub unit: String,
}

/// Expected values; each present entry becomes an extra check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<LineSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal_isos: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_det: Option<Vec<LineSpec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twists: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_triples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattices: Option<Vec<LatticeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectSpec>,
}

pub fn parse_input(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ProblemFile, CliError> {
    let p: ProblemFile = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let msg = strip_position(&e.to_string());
        match e.classify() {
            Category::Data => CliError::Schema { line, column, msg },
            _ => CliError::Syntax { line, column, msg },
        }
    })?;
    p.validate()?;
    Ok(p)
}

fn strip_position(s: &str) -> String {
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s.to_string(),
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema { line: 0, column: 0, msg: msg.into() }
}

impl ProblemFile {
    fn validate(&self) -> Result<(), CliError> {
        if self.version != FORMAT_VERSION {
            return Err(schema(format!("unsupported version {} (expected {FORMAT_VERSION})", self.version)));
        }
        let need = |present: bool, key: &str| {
            if present {
                Ok(())
            } else {
                Err(schema(format!("mode `{}` requires `{key}`", self.mode)))
            }
        };
        let forbid = |present: bool, key: &str| {
            if present {
                Err(schema(format!("key `{key}` is not used by mode `{}`", self.mode)))
            } else {
                Ok(())
            }
        };
        match self.mode {
            Mode::DiskEpsilon => {
                need(self.connection.is_some(), "connection")?;
                need(self.forms.is_some(), "forms")?;
                forbid(self.global.is_some(), "global")?;
                forbid(self.lattices.is_some(), "lattices")?;
                forbid(self.twists.is_some(), "twists")?;
                forbid(self.random_triples.is_some(), "random_triples")?;
            }
            Mode::GlobalCheck => {
                need(self.global.is_some(), "global")?;
                forbid(self.connection.is_some(), "connection")?;
                forbid(self.forms.is_some(), "forms")?;
                forbid(self.lattices.is_some(), "lattices")?;
                forbid(self.twists.is_some(), "twists")?;
                forbid(self.random_triples.is_some(), "random_triples")?;
            }
            Mode::CrystalCheck => {
                need(self.connection.is_some(), "connection")?;
                need(self.forms.is_some(), "forms")?;
                forbid(self.global.is_some(), "global")?;
                forbid(self.lattices.is_some(), "lattices")?;
                if self.forms.as_ref().is_some_and(|f| f.len() < 2) {
                    return Err(schema("crystal-check needs at least two forms"));
                }
                if self.base().is_ok_and(BaseRing::is_reduced) {
                    return Err(schema("crystal-check needs a nilpotent base"));
                }
            }
            Mode::LatticeDet => {
                need(self.lattices.is_some(), "lattices")?;
                forbid(self.connection.is_some(), "connection")?;
                forbid(self.forms.is_some(), "forms")?;
                forbid(self.global.is_some(), "global")?;
                forbid(self.twists.is_some(), "twists")?;
                forbid(self.random_triples.is_some(), "random_triples")?;
                if self.lattices.as_ref().is_some_and(|l| l.len() < 2) {
                    return Err(schema("lattice-det needs at least two lattices"));
                }
            }
        }
        if self.truncation.is_some_and(|t| t < 1) {
            return Err(schema("truncation must be positive"));
        }
        self.base()?;
        Ok(())
    }

    pub fn base(&self) -> Result<BaseRing, CliError> {
        match &self.base {
            None => Ok(BaseRing::Rationals),
            Some(BaseSpec { kind: BaseKind::Rationals, order: None }) => Ok(BaseRing::Rationals),
            Some(BaseSpec { kind: BaseKind::Rationals, order: Some(_) }) => {
                Err(schema("`order` is only meaningful for a nilpotent base"))
            }
            Some(BaseSpec { kind: BaseKind::Nilpotent, order }) => {
                let n = order.ok_or_else(|| schema("a nilpotent base requires `order`"))?;
                BaseRing::nilpotent(n).map_err(|e| schema(e.to_string()))
            }
        }
    }

    pub fn connection(&self) -> Result<FormalConnection, CliError> {
        let spec = self.connection.as_ref().ok_or_else(|| schema("missing `connection`"))?;
        if spec.cells.is_empty() {
            return Err(schema("`connection.cells` is empty"));
        }
        let mut cells = Vec::new();
        for (i, c) in spec.cells.iter().enumerate() {
            let at = |k: &str| format!("connection.cells[{i}].{k}");
            let q = field(&at("q"), parse_series(&c.q, BaseRing::Rationals))?;
            let lambda = parse_rational(&at("lambda"), &c.lambda)?;
            cells.push(LTCell::new(q, lambda, c.jordan, c.ram).map_err(|e| CliError::core(at("q"), e))?);
        }
        FormalConnection::from_cells(cells).map_err(|e| CliError::core("connection", e))
    }

    pub fn forms(&self) -> Result<Vec<LaurentSeries>, CliError> {
        let base = self.base()?;
        let forms = self.forms.as_deref().unwrap_or(&[]);
        forms.iter().enumerate().map(|(i, s)| form_series(&format!("forms[{i}]"), s, base)).collect()
    }

    pub fn twists(&self) -> Result<Vec<LaurentSeries>, CliError> {
        let base = self.base()?;
        let ts = self.twists.as_deref().unwrap_or(&[]);
        ts.iter().enumerate().map(|(i, s)| field(&format!("twists[{i}]"), parse_series(s, base))).collect()
    }

    pub fn global(&self) -> Result<(RatFunc, RatFunc, Vec<Point>), CliError> {
        let g = self.global.as_ref().ok_or_else(|| schema("missing `global`"))?;
        let omega = field("global.omega", parse_ratfunc(&g.omega, BaseRing::Rationals))?;
        let nu = field("global.nu", strip_dt(&g.nu))?;
        let nu = field("global.nu", parse_ratfunc(&nu, self.base()?))?;
        let points = g
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| field(&format!("global.points[{i}]"), Point::parse(p)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((omega, nu, points))
    }

    pub fn lattices(&self) -> Result<Vec<Lattice>, CliError> {
        let base = self.base()?;
        let specs = self.lattices.as_deref().unwrap_or(&[]);
        let mut out = Vec::new();
        for (i, l) in specs.iter().enumerate() {
            let r = l.basis.len();
            if r == 0 || l.basis.iter().any(|row| row.len() != r) {
                return Err(schema(format!("lattices[{i}].basis must be a nonempty square matrix")));
            }
            let mut rows = Vec::new();
            for (a, row) in l.basis.iter().enumerate() {
                let mut out_row = Vec::new();
                for (b, s) in row.iter().enumerate() {
                    out_row.push(field(&format!("lattices[{i}].basis[{a}][{b}]"), parse_series(s, base))?);
                }
                rows.push(out_row);
            }
            out.push(Lattice::from_basis(rows).map_err(|e| CliError::core(format!("lattices[{i}]"), e))?);
        }
        if out.windows(2).any(|w| w[0].rank() != w[1].rank()) {
            return Err(schema("all lattices must have the same rank"));
        }
        Ok(out)
    }
}

fn field<T>(name: &str, r: epsfac_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::core(name, e))
}

fn parse_rational(name: &str, s: &str) -> Result<Rational, CliError> {
    let f = field(name, parse_ratfunc(s, BaseRing::Rationals))?;
    if f.num().degree().unwrap_or(0) > 0 || f.den().degree().unwrap_or(0) > 0 {
        return Err(CliError::core(name, epsfac_core::Error::Parse { pos: 0, msg: "expected a rational number".into() }));
    }
    Ok(f.num().coeff(0).reduction() / f.den().coeff(0).reduction())
}

/// Replaces the factor `dt` by `1`, padded so that error positions still
/// point into the original string: `"t^2*dt"`, `"dt/t"` and `"dt"` all
/// become the coefficient `u` of `u dt`.
pub fn strip_dt(s: &str) -> Result<String, epsfac_core::Error> {
    let b = s.as_bytes();
    let word = |i: usize| i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_');
    let mut out = String::with_capacity(s.len());
    let mut seen = false;
    let mut i = 0;
    while i < b.len() {
        if s[i..].starts_with("dt") && (i == 0 || !word(i - 1)) && !word(i + 2) {
            if seen {
                return Err(epsfac_core::Error::Parse { pos: i, msg: "`dt` appears more than once".into() });
            }
            seen = true;
            out.push_str(" 1");
            i += 2;
        } else {
            let c = s[i..].chars().next().expect("in bounds");
            out.push(c);
            i += c.len_utf8();
        }
    }
    Ok(out)
}

fn form_series(name: &str, s: &str, base: BaseRing) -> Result<LaurentSeries, CliError> {
    let u = field(name, strip_dt(s))?;
    field(name, parse_series(&u, base))
}
