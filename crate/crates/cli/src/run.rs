//! Dispatch from a validated problem to the library and assembly of the
//! report.

use std::time::Instant;

use epsfac_core::connection::{self, disk_dr_cohomology, epsilon_tilde, epsilon_tilde_good, good_pair};
use epsfac_core::curve::{self, product_formula_check};
use epsfac_core::family::{self, crystal_iso, crystal_iso_direct, loop_composite, twist_identity_sides};
use epsfac_core::lattice::{quotient_rank, relative_det, smith_exponents};
use epsfac_core::{
    BaseRing, FamilyForm, GlobalRank1Connection, Lattice, LaurentSeries, RingElem, TrivializedGradedLine, TwistUnit,
    DEFAULT_PRECISION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::problem::{LineSpec, Mode, ProblemFile};
use crate::report::{
    Check, CrystalResults, CurveCohomology, DiskCohomology, FormLine, GlobalResults, Iso, LatticeResults, LocalResults,
    PairDet, PointLine, Report, Results, TwistData, Verdict,
};

/// Command-line overrides of the values in the problem file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub truncation: Option<i64>,
    pub seed: Option<u64>,
}

type Outcome = (Results, Vec<Check>);

pub fn check_command(command: Mode, p: &ProblemFile) -> Result<(), CliError> {
    if command == p.mode {
        Ok(())
    } else {
        Err(CliError::ModeMismatch { command: command.command().into(), mode: p.mode.name().into() })
    }
}

pub fn run(p: &ProblemFile, opts: Options) -> Result<Report, CliError> {
    let start = Instant::now();
    let truncation = opts.truncation.or(p.truncation).unwrap_or(DEFAULT_PRECISION);
    let seed = opts.seed.or(p.seed).unwrap_or(0);
    let base = p.base()?;
    let compute = |w: i64| match p.mode {
        Mode::DiskEpsilon => run_local(p, w),
        Mode::GlobalCheck => run_global(p, w),
        Mode::CrystalCheck => run_crystal(p, seed, w),
        Mode::LatticeDet => run_lattice(p, w),
    };
    let (results, mut checks) = match compute(truncation) {
        Err(e) if e.kind() == "precision" => compute(2 * truncation)?,
        other => other?,
    };
    checks.extend(expectations(p, &results));
    let verdict = Verdict::of(checks.iter().all(|c| c.verdict == Verdict::Pass));
    Ok(Report {
        command: p.mode.command().into(),
        base: base.to_string(),
        truncation,
        seed,
        input: p.clone(),
        results,
        checks,
        verdict,
        elapsed: start.elapsed(),
    })
}

fn core<T>(ctx: &str, r: epsfac_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::core(ctx, e))
}

fn form_line(form: &str, l: &TrivializedGradedLine) -> FormLine {
    FormLine { form: form.into(), grade: l.grade(), unit: l.unit().to_string() }
}

fn run_local(p: &ProblemFile, w: i64) -> Result<Outcome, CliError> {
    let conn = p.connection()?;
    let forms = p.forms()?;
    let names = p.forms.clone().unwrap_or_default();
    let good = good_pair(&conn);
    let enlarged = good.shift(1);
    let (h0, h1) = core("cohomology", disk_dr_cohomology(&conn, &good, w))?;
    let mut checks = Vec::new();
    let (k, c) = core("goodness", connection::quotient_cohomology(&conn, &good, &enlarged, w))?;
    checks.push(Check::same_text("nested good pairs: quotient complex is acyclic", format!("({k}, {c})"), "(0, 0)".into()));
    let irr = core("irregularity", quotient_rank(&good.n, &good.l, w))?;
    checks.push(Check::equal("dim N/L equals the irregularity", &irr, &conn.irregularity()));
    let mut epsilon = Vec::new();
    for (u, name) in forms.iter().zip(&names) {
        let e = core(name, epsilon_tilde(&conn, u, w))?;
        let e2 = core(name, epsilon_tilde_good(&conn, u, &enlarged, w))?;
        checks.push(Check::equal(format!("two good pairs agree for {name}"), &e, &e2));
        if !u.base().is_reduced() {
            let red = core(name, epsilon_tilde(&conn, &u.reduce(), w))?;
            checks.push(Check::same_text(format!("reduction of {name}"), e.reduce().to_string(), red.to_string()));
        }
        epsilon.push(form_line(name, &e));
    }
    let results = LocalResults {
        rank: conn.rank(),
        irregularity: conn.irregularity(),
        good_pair: [good.l.to_string(), good.n.to_string()],
        cohomology: DiskCohomology { h0, h1 },
        epsilon,
    };
    Ok((Results::Local(results), checks))
}

fn run_global(p: &ProblemFile, w: i64) -> Result<Outcome, CliError> {
    let (omega, nu, points) = p.global()?;
    let conn = core("global", GlobalRank1Connection::new(omega, points))?;
    let rep = core("global", product_formula_check(&conn, &nu, w))?;
    let chi = rep.cohomology_grade();
    let mut checks = vec![
        Check::equal("product formula: chi equals the sum of local grades", &chi, &rep.local_grade_sum),
        Check::equal("Euler oracle: chi equals chi(U) minus total irregularity", &chi, &rep.euler_oracle),
        Check::equal("line bundle grades: chi equals grade O(A) minus grade O(B')", &chi, &(rep.grade_a - rep.grade_b_prime)),
        Check::equal("chosen lattices are locally good", &rep.locally_good, &true),
    ];
    if !nu.base().is_reduced() {
        let red = core("global", curve::local_epsilon_factors(&conn, &nu.reduce(), w))?;
        let lhs: Vec<String> = rep.local.iter().map(|(x, l)| format!("{x}: {}", l.reduce())).collect();
        let rhs: Vec<String> = red.iter().map(|(x, l)| format!("{x}: {l}")).collect();
        checks.push(Check::same_text("reduction of the local factors", lhs.join(", "), rhs.join(", ")));
    }
    let results = GlobalResults {
        cohomology: CurveCohomology { h0: rep.h0, h1: rep.h1, h2: rep.h2 },
        euler_characteristic: chi,
        local: rep
            .local
            .iter()
            .map(|(x, l)| PointLine { point: x.to_string(), grade: l.grade(), unit: l.unit().to_string() })
            .collect(),
        local_grade_sum: rep.local_grade_sum,
        euler_oracle: rep.euler_oracle,
        line_bundle_grades: [rep.grade_a, rep.grade_b_prime],
    };
    Ok((Results::Global(results), checks))
}

/// `1 + n`, `n` a nilpotent Laurent polynomial with poles of order at most 3.
fn random_perturbation(rng: &mut ChaCha8Rng, base: BaseRing) -> LaurentSeries {
    let mut terms = Vec::new();
    for e in -3..=1 {
        let mut c = vec![epsfac_core::Rational::from_integer(0.into())];
        for _ in 1..base.width() {
            c.push(epsfac_core::ring::rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
        }
        terms.push((e, RingElem::from_coeffs(base, c)));
    }
    &LaurentSeries::one(base) + &LaurentSeries::from_terms(base, terms, None)
}

fn run_crystal(p: &ProblemFile, seed: u64, w: i64) -> Result<Outcome, CliError> {
    let base = p.base()?;
    let conn = p.connection()?;
    let names = p.forms.clone().unwrap_or_default();
    let forms = p
        .forms()?
        .into_iter()
        .zip(&names)
        .map(|(u, name)| core(name, FamilyForm::new(u)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut checks = Vec::new();
    let mut epsilon = Vec::new();
    for (nu, name) in forms.iter().zip(&names) {
        let e = core(name, family::epsilon_tilde(&conn, nu, w))?;
        let red = core(name, epsilon_tilde(&conn, &nu.u().reduce(), w))?;
        checks.push(Check::same_text(format!("reduction of {name}"), e.reduce().to_string(), red.to_string()));
        epsilon.push(form_line(name, &e));
    }
    let n = forms.len();
    let mut iso = vec![vec![None; n]; n];
    let mut crystal_isos = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = core("crystal iso", crystal_iso(&conn, &forms[i], &forms[j], w))?;
            let direct = core("crystal iso", crystal_iso_direct(&conn, &forms[i], &forms[j], w))?;
            checks.push(Check::equal(format!("c[{j}<-{i}] equals the ratio of epsilon units"), &c, &direct));
            crystal_isos.push(Iso { from: i, to: j, unit: c.to_string() });
            iso[i][j] = Some(c);
        }
    }
    let get = |i: usize, j: usize| iso[i][j].clone().expect("computed above");
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let lhs = &get(j, k) * &get(i, j);
                checks.push(Check::equal(format!("cocycle c[{k}<-{j}] c[{j}<-{i}] = c[{k}<-{i}]"), &lhs, &get(i, k)));
            }
        }
    }
    let lp = core("loop", loop_composite(&conn, &forms, w))?;
    checks.push(Check::equal("loop composite through all forms", &lp, &base.one()));
    let twists = p.twists()?;
    let lam = core("twisted lattice", family::twisted_lattice(&conn, &forms[0], w))?;
    let probes = [
        ("O".to_string(), Lattice::standard(base, conn.rank())),
        ("Lambda".to_string(), lam.clone()),
        ("t^-1 Lambda".to_string(), lam.shift(1)),
    ];
    let mut twist_data = Vec::new();
    for (f, name) in twists.iter().zip(p.twists.as_deref().unwrap_or(&[])) {
        let tw = core(name, TwistUnit::new(f.clone()))?;
        let (lhs, rhs) = core(name, twist_identity_sides(&conn, &forms[0], &tw, w))?;
        checks.push(Check::equal(format!("twist identity for f = {name}"), &lhs, &rhs));
        let ls: Vec<Lattice> = probes.iter().map(|(_, l)| l.clone()).collect();
        let units = core(name, family::grdet_f_lattice_dependence(&tw, &ls, w))?;
        twist_data.push(TwistData {
            f: name.clone(),
            lattices: probes.iter().map(|(n, _)| n.clone()).collect(),
            units: units.iter().map(ToString::to_string).collect(),
        });
    }
    let count = p.random_triples.unwrap_or(0);
    if count > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut held = 0usize;
        for _ in 0..count {
            let u = forms[0].u();
            let f2 = random_perturbation(&mut rng, base);
            let f3 = random_perturbation(&mut rng, base);
            let n2 = core("random triple", FamilyForm::new(u * &f2))?;
            let n3 = core("random triple", FamilyForm::new(u * &f3))?;
            if core("random triple", family::cocycle_check(&conn, &forms[0], &n2, &n3, w))? {
                held += 1;
            }
        }
        checks.push(Check::equal("cocycle on seeded random triples (count holding)", &held, &count));
    }
    let results = CrystalResults { epsilon, crystal_isos, twists: twist_data, random_triples: count };
    Ok((Results::Crystal(results), checks))
}

fn run_lattice(p: &ProblemFile, w: i64) -> Result<Outcome, CliError> {
    let ls = p.lattices()?;
    let mut checks = Vec::new();
    let mut dets = Vec::new();
    let mut lines = Vec::new();
    for i in 0..ls.len() - 1 {
        let (a, b) = (&ls[i], &ls[i + 1]);
        let ctx = format!("lattices[{i}], lattices[{}]", i + 1);
        let d = core(&ctx, relative_det(a, b, w))?;
        let back = core(&ctx, relative_det(b, a, w))?;
        checks.push(Check::equal(format!("grdet(L{} : L{i}) is the inverse", i + 1), &back, &d.inverse()));
        let smith = core(&ctx, smith_exponents(a, b, w))?;
        checks.push(Check::equal(format!("elementary divisors of (L{i}, L{}) sum to the grade", i + 1), &smith.iter().sum::<i64>(), &d.grade()));
        if !a.base().is_reduced() {
            let red = core(&ctx, relative_det(&a.reduce(), &b.reduce(), w))?;
            checks.push(Check::same_text(format!("reduction of grdet(L{i} : L{})", i + 1), d.reduce().to_string(), red.to_string()));
        }
        dets.push(PairDet { from: i, to: i + 1, grade: d.grade(), unit: d.unit().to_string(), smith_exponents: smith });
        lines.push(d);
    }
    for i in 0..ls.len().saturating_sub(2) {
        let ctx = format!("lattices[{i}], lattices[{}]", i + 2);
        let direct = core(&ctx, relative_det(&ls[i], &ls[i + 2], w))?;
        let composed = core(&ctx, lines[i].tensor(&lines[i + 1]))?;
        checks.push(Check::equal(format!("transitivity through L{}", i + 1), &composed, &direct));
    }
    let results = LatticeResults { rank: ls[0].rank(), relative_det: dets };
    Ok((Results::Lattice(results), checks))
}

fn line_text(l: &LineSpec) -> String {
    format!("({}, {})", l.grade, l.unit)
}

/// Checks against the `expect` block; units are compared in printed form
/// after a round trip through the parser.
fn expectations(p: &ProblemFile, results: &Results) -> Vec<Check> {
    let Some(exp) = &p.expect else { return Vec::new() };
    let base = p.base().unwrap_or(BaseRing::Rationals);
    let canon = |s: &str| match epsfac_core::parse::parse_series(s, base) {
        Ok(x) if x.high_exponent().unwrap_or(0) <= 0 && x.low_exponent().unwrap_or(0) >= 0 => {
            x.coeff(0).map(|c| c.to_string()).unwrap_or_else(|_| s.to_string())
        }
        _ => s.to_string(),
    };
    let canon_line = |l: &LineSpec| line_text(&LineSpec { grade: l.grade, unit: canon(&l.unit) });
    let mut out = Vec::new();
    let mut lines = |name: &str, want: &[LineSpec], got: Vec<(String, i64, String)>| {
        if want.len() != got.len() {
            out.push(Check::same_text(format!("{name}: number of entries"), got.len().to_string(), want.len().to_string()));
            return;
        }
        for (w, (label, grade, unit)) in want.iter().zip(got) {
            out.push(Check::same_text(format!("{name} at {label}"), format!("({grade}, {unit})"), canon_line(w)));
        }
    };
    if let Some(want) = &exp.epsilon {
        match results {
            Results::Local(r) => lines("expected epsilon", want, r.epsilon.iter().map(|e| (e.form.clone(), e.grade, e.unit.clone())).collect()),
            Results::Crystal(r) => lines("expected epsilon", want, r.epsilon.iter().map(|e| (e.form.clone(), e.grade, e.unit.clone())).collect()),
            Results::Global(r) => lines("expected epsilon", want, r.local.iter().map(|e| (e.point.clone(), e.grade, e.unit.clone())).collect()),
            Results::Lattice(_) => {}
        }
    }
    if let Some(want) = &exp.relative_det {
        if let Results::Lattice(r) = results {
            lines("expected grdet", want, r.relative_det.iter().map(|d| (format!("(L{}, L{})", d.from, d.to), d.grade, d.unit.clone())).collect());
        }
    }
    if let (Some(want), Results::Global(r)) = (exp.euler_characteristic, results) {
        out.push(Check::equal("expected Euler characteristic", &r.euler_characteristic, &want));
    }
    if let (Some(want), Results::Crystal(r)) = (&exp.crystal_isos, results) {
        let got: Vec<String> = r.crystal_isos.iter().map(|c| c.unit.clone()).collect();
        let want: Vec<String> = want.iter().map(|s| canon(s)).collect();
        out.push(Check::same_text("expected crystal isos", got.join(", "), want.join(", ")));
    }
    out
}
