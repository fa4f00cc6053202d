//! Python bindings. Series, ring elements and rationals cross the boundary
//! as strings in the library's input grammar, so nothing is ever rounded.

use epsfac_core::connection;
use epsfac_core::curve;
use epsfac_core::family;
use epsfac_core::lattice;
use epsfac_core::parse::{parse_ratfunc, parse_series};
use epsfac_core::{
    BaseRing, Error, FamilyForm, GlobalRank1Connection, LTCell, LaurentSeries, Point, TrivializedGradedLine,
    TwistUnit, DEFAULT_PRECISION,
};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(epsfac, EpsfacError, PyException);
create_exception!(epsfac, InputError, EpsfacError);
create_exception!(epsfac, AdmissibilityError, EpsfacError);
create_exception!(epsfac, PrecisionError, EpsfacError);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        e if e.is_precision() || matches!(e, Error::NonConvergent(_)) => PrecisionError::new_err(msg),
        Error::AdmissibilityViolation(_)
        | Error::ReductionMismatch
        | Error::NotAUnit(_)
        | Error::NormalizationRequired(_)
        | Error::InvalidRamification(_)
        | Error::InvalidLatticePair(_)
        | Error::NonFreeQuotient(_)
        | Error::NonRationalPoint(_) => AdmissibilityError::new_err(msg),
        _ => InputError::new_err(msg),
    }
}

fn ok<T>(r: epsfac_core::Result<T>) -> PyResult<T> {
    r.map_err(err)
}

/// `Q` or `Q[eps]/(eps^N)`.
#[pyclass(name = "BaseRing", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyBase(BaseRing);

#[pymethods]
impl PyBase {
    #[staticmethod]
    fn rationals() -> Self {
        PyBase(BaseRing::Rationals)
    }

    #[staticmethod]
    fn nilpotent(order: usize) -> PyResult<Self> {
        Ok(PyBase(ok(BaseRing::nilpotent(order))?))
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.width()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

fn base_of(b: Option<PyBase>) -> BaseRing {
    b.map_or(BaseRing::Rationals, |b| b.0)
}

/// Laurent series with exact rational coefficients.
#[pyclass(name = "Series", frozen, from_py_object)]
#[derive(Clone)]
struct PySeries(LaurentSeries);

#[pymethods]
impl PySeries {
    #[new]
    #[pyo3(signature = (text, base=None))]
    fn new(text: &str, base: Option<PyBase>) -> PyResult<Self> {
        Ok(PySeries(ok(parse_series(text, base_of(base)))?))
    }

    #[getter]
    fn base(&self) -> PyBase {
        PyBase(self.0.base())
    }

    fn valuation(&self) -> PyResult<i64> {
        ok(self.0.valuation())
    }

    fn reduce(&self) -> Self {
        PySeries(self.0.reduce())
    }

    fn coeff(&self, e: i64) -> PyResult<String> {
        Ok(ok(self.0.coeff(e))?.to_string())
    }

    fn __add__(&self, other: &PySeries) -> PyResult<Self> {
        ok(self.0.base().check_same(other.0.base()))?;
        Ok(PySeries(&self.0 + &other.0))
    }

    fn __mul__(&self, other: &PySeries) -> PyResult<Self> {
        ok(self.0.base().check_same(other.0.base()))?;
        Ok(PySeries(&self.0 * &other.0))
    }

    fn __eq__(&self, other: &PySeries) -> bool {
        self.0.base() == other.0.base() && (&self.0 - &other.0).is_known_zero()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Series('{}')", self.0)
    }
}

/// A graded line trivialized by a unit: `(grade, unit)`.
#[pyclass(name = "GradedLine", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyLine(TrivializedGradedLine);

#[pymethods]
impl PyLine {
    #[getter]
    fn grade(&self) -> i64 {
        self.0.grade()
    }

    #[getter]
    fn unit(&self) -> String {
        self.0.unit().to_string()
    }

    fn tensor(&self, other: &PyLine) -> PyResult<Self> {
        Ok(PyLine(ok(self.0.tensor(&other.0))?))
    }

    fn inverse(&self) -> Self {
        PyLine(self.0.inverse())
    }

    fn reduce(&self) -> Self {
        PyLine(self.0.reduce())
    }

    fn __repr__(&self) -> String {
        format!("GradedLine{}", self.0)
    }
}

/// A lattice spanned by the columns of a square matrix of series.
#[pyclass(name = "Lattice", frozen, from_py_object)]
#[derive(Clone)]
struct PyLattice(lattice::Lattice);

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (rows, base=None))]
    fn new(rows: Vec<Vec<String>>, base: Option<PyBase>) -> PyResult<Self> {
        let base = base_of(base);
        let m = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_series(x, base)).collect::<epsfac_core::Result<Vec<_>>>())
            .collect::<epsfac_core::Result<Vec<_>>>();
        Ok(PyLattice(ok(lattice::Lattice::from_basis(ok(m)?))?))
    }

    #[staticmethod]
    #[pyo3(signature = (rank, base=None))]
    fn standard(rank: usize, base: Option<PyBase>) -> Self {
        PyLattice(lattice::Lattice::standard(base_of(base), rank))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn shift(&self, m: i64) -> Self {
        PyLattice(self.0.shift(m))
    }

    fn scale(&self, f: &PySeries) -> PyResult<Self> {
        Ok(PyLattice(ok(self.0.scale(&f.0))?))
    }

    fn reduce(&self) -> Self {
        PyLattice(self.0.reduce())
    }

    fn __repr__(&self) -> String {
        format!("Lattice({})", self.0)
    }
}

/// A formal connection on the punctured disk given by Levelt-Turrittin
/// cells `(q, lambda, jordan, ram)`.
#[pyclass(name = "FormalConnection", frozen, from_py_object)]
#[derive(Clone)]
struct PyConnection(connection::FormalConnection);

#[pymethods]
impl PyConnection {
    /// `cells`: tuples `(q, lambda, jordan, ram)` with `q` and `lambda` as
    /// strings.
    #[new]
    fn new(cells: Vec<(String, String, usize, usize)>) -> PyResult<Self> {
        let mut out = Vec::new();
        for (q, lambda, jordan, ram) in cells {
            let q = ok(parse_series(&q, BaseRing::Rationals))?;
            let l = ok(parse_ratfunc(&lambda, BaseRing::Rationals))?;
            if l.num().degree().unwrap_or(0) > 0 || l.den().degree().unwrap_or(0) > 0 {
                return Err(InputError::new_err(format!("lambda must be a rational number: {lambda}")));
            }
            let lambda = l.num().coeff(0).reduction() / l.den().coeff(0).reduction();
            out.push(ok(LTCell::new(q, lambda, jordan, ram))?);
        }
        Ok(PyConnection(ok(connection::FormalConnection::from_cells(out))?))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn irregularity(&self) -> i64 {
        self.0.irregularity()
    }

    fn direct_sum(&self, other: &PyConnection) -> Self {
        PyConnection(self.0.direct_sum(&other.0))
    }

    /// `(h^0, h^1)` of the de Rham complex on the canonical good pair.
    #[pyo3(signature = (work=DEFAULT_PRECISION))]
    fn dr_cohomology(&self, work: i64) -> PyResult<(u64, u64)> {
        ok(connection::disk_dr_cohomology(&self.0, &connection::good_pair(&self.0), work))
    }

    /// `ε̃` for the form `u dt`.
    #[pyo3(signature = (u, work=DEFAULT_PRECISION))]
    fn epsilon(&self, u: &PySeries, work: i64) -> PyResult<PyLine> {
        Ok(PyLine(ok(connection::epsilon_tilde(&self.0, &u.0, work))?))
    }

    /// `(dim ker, dim coker)` of the quotient complex between the canonical
    /// good pair and its `k`-fold enlargement.
    #[pyo3(signature = (k=1, work=DEFAULT_PRECISION))]
    fn goodness_defect(&self, k: i64, work: i64) -> PyResult<(u64, u64)> {
        let g = connection::good_pair(&self.0);
        ok(connection::quotient_cohomology(&self.0, &g, &g.shift(k), work))
    }

    fn __repr__(&self) -> String {
        format!("FormalConnection(rank={}, irregularity={})", self.0.rank(), self.0.irregularity())
    }
}

/// `grdet(L1 : L2)`.
#[pyfunction]
#[pyo3(signature = (l1, l2, work=DEFAULT_PRECISION))]
fn relative_det(l1: &PyLattice, l2: &PyLattice, work: i64) -> PyResult<PyLine> {
    Ok(PyLine(ok(lattice::relative_det(&l1.0, &l2.0, work))?))
}

/// `grdet(f^-1 L : L)`.
#[pyfunction]
#[pyo3(signature = (f, l, work=DEFAULT_PRECISION))]
fn grdet_f(f: &PySeries, l: &PyLattice, work: i64) -> PyResult<PyLine> {
    let f = ok(TwistUnit::new(f.0.clone()))?;
    Ok(PyLine(ok(family::grdet_f(&f, &l.0, work))?))
}

/// Both sides of the twist identity for `ν = u dt` and `f`.
#[pyfunction]
#[pyo3(signature = (conn, u, f, work=DEFAULT_PRECISION))]
fn twist_identity(conn: &PyConnection, u: &PySeries, f: &PySeries, work: i64) -> PyResult<(PyLine, PyLine)> {
    let nu = ok(FamilyForm::new(u.0.clone()))?;
    let f = ok(TwistUnit::new(f.0.clone()))?;
    let (l, r) = ok(family::twist_identity_sides(&conn.0, &nu, &f, work))?;
    Ok((PyLine(l), PyLine(r)))
}

/// The crystal isomorphism `c₂₁` between `u₁ dt` and `u₂ dt`.
#[pyfunction]
#[pyo3(signature = (conn, u1, u2, work=DEFAULT_PRECISION))]
fn crystal_iso(conn: &PyConnection, u1: &PySeries, u2: &PySeries, work: i64) -> PyResult<String> {
    let n1 = ok(FamilyForm::new(u1.0.clone()))?;
    let n2 = ok(FamilyForm::new(u2.0.clone()))?;
    Ok(ok(family::crystal_iso(&conn.0, &n1, &n2, work))?.to_string())
}

#[pyfunction]
#[pyo3(signature = (conn, u1, u2, u3, work=DEFAULT_PRECISION))]
fn cocycle_check(conn: &PyConnection, u1: &PySeries, u2: &PySeries, u3: &PySeries, work: i64) -> PyResult<bool> {
    let f = |u: &PySeries| ok(FamilyForm::new(u.0.clone()));
    ok(family::cocycle_check(&conn.0, &f(u1)?, &f(u2)?, &f(u3)?, work))
}

/// Product formula for `d + omega dt` on `P^1 - points` with the form
/// `nu dt`; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (omega, points, nu, base=None, work=DEFAULT_PRECISION))]
fn product_formula<'py>(
    py: Python<'py>,
    omega: &str,
    points: Vec<String>,
    nu: &str,
    base: Option<PyBase>,
    work: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let omega = ok(parse_ratfunc(omega, BaseRing::Rationals))?;
    let points = points.iter().map(|p| Point::parse(p)).collect::<epsfac_core::Result<Vec<_>>>();
    let conn = ok(GlobalRank1Connection::new(omega, ok(points)?))?;
    let nu = ok(parse_ratfunc(nu, base_of(base)))?;
    let rep = ok(curve::product_formula_check(&conn, &nu, work))?;
    let d = PyDict::new(py);
    d.set_item("h0", rep.h0)?;
    d.set_item("h1", rep.h1)?;
    d.set_item("h2", rep.h2)?;
    d.set_item("euler_characteristic", rep.cohomology_grade())?;
    let local: Vec<(String, i64, String)> =
        rep.local.iter().map(|(x, l)| (x.to_string(), l.grade(), l.unit().to_string())).collect();
    d.set_item("local", local)?;
    d.set_item("local_grade_sum", rep.local_grade_sum)?;
    d.set_item("euler_oracle", rep.euler_oracle)?;
    d.set_item("holds", rep.holds())?;
    Ok(d)
}

/// Runs a problem file given as JSON text; returns `(report_json, passed)`.
#[pyfunction]
#[pyo3(signature = (text, truncation=None, seed=None))]
fn run_problem(text: &str, truncation: Option<i64>, seed: Option<u64>) -> PyResult<(String, bool)> {
    let p = epsfac_cli::parse_str(text).map_err(cli_err)?;
    let report = epsfac_cli::run(&p, epsfac_cli::Options { truncation, seed }).map_err(cli_err)?;
    let json = String::from_utf8(epsfac_cli::emit_report(&report, epsfac_cli::Format::Json)).expect("utf-8 json");
    Ok((json, report.passed()))
}

fn cli_err(e: epsfac_cli::CliError) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        epsfac_cli::error::EXIT_ADMISSIBILITY => AdmissibilityError::new_err(msg),
        epsfac_cli::error::EXIT_PRECISION => PrecisionError::new_err(msg),
        _ => InputError::new_err(msg),
    }
}

#[pymodule]
fn epsfac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyBase>()?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyLine>()?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyConnection>()?;
    m.add_function(wrap_pyfunction!(relative_det, m)?)?;
    m.add_function(wrap_pyfunction!(grdet_f, m)?)?;
    m.add_function(wrap_pyfunction!(twist_identity, m)?)?;
    m.add_function(wrap_pyfunction!(crystal_iso, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_check, m)?)?;
    m.add_function(wrap_pyfunction!(product_formula, m)?)?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    m.add("EpsfacError", py.get_type::<EpsfacError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("AdmissibilityError", py.get_type::<AdmissibilityError>())?;
    m.add("PrecisionError", py.get_type::<PrecisionError>())?;
    m.add("DEFAULT_PRECISION", DEFAULT_PRECISION)?;
    Ok(())
}
