use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::value::RawValue;

use pvsusy::hierarchies::{crosscheck, detect, Family, HierarchyTag};
use pvsusy::ladder_algebra::{
    check_commutators, check_factorization, check_intertwining, check_new_level_annihilated, check_number_operator,
    check_shift_factorizations, CheckReport, CHECK_POINTS,
};
use pvsusy::painleve::{default_z_grid, solve_allow_degenerate, Degeneracy, RESIDUAL_TOL, Z_GRID};
use pvsusy::seed_solutions::{linear_grid, seed_chain, v0, Nu, SeedSpec};
use pvsusy::special_functions::{gamma, kummer_1f1, laguerre};
use pvsusy::susy_engine::{member, partner_potential, Member};
use pvsusy::tables::{check_all_params, check_w_row, PrintedW, TableId, TABLE_ELLS};

use crate::config::{tolerance, FileConfig, Format, GridArgs, OutputArgs, SpecArgs};
use crate::error::CliError;
use crate::output::{emit, fmt_num, raw, render, Table};

type Raw = Box<RawValue>;

fn cx(c: C64) -> [Raw; 2] {
    [raw(c.re), raw(c.im)]
}

#[derive(Serialize)]
struct SpecMeta {
    ell: Raw,
    eps1: [Raw; 2],
    mixture: [[Raw; 2]; 2],
    k: usize,
    mode: String,
}

impl SpecMeta {
    fn new(s: &SeedSpec) -> Self {
        Self {
            ell: raw(s.ell),
            eps1: cx(s.eps1),
            mixture: [cx(s.mixture.0), cx(s.mixture.1)],
            k: s.k,
            mode: format!("{:?}", s.mode),
        }
    }
}

#[derive(Serialize)]
struct SolveMeta {
    spec: SpecMeta,
    ordering: String,
    degeneracy: String,
    params: ParamsMeta,
    hierarchy: HierarchyTag,
    max_residual: Raw,
    tolerance: Raw,
    points: usize,
    ok_points: usize,
    pole_points: usize,
    pass: bool,
}

#[derive(Serialize)]
struct ParamsMeta {
    a: [Raw; 2],
    b: [Raw; 2],
    c: [Raw; 2],
    d: [Raw; 2],
}

fn complex_text(c: C64) -> String {
    format!("{},{}", fmt_num(c.re), fmt_num(c.im))
}

pub fn solve(
    file: &FileConfig,
    spec_args: &SpecArgs,
    grid_args: &GridArgs,
    out: &OutputArgs,
    tol: Option<f64>,
    allow_degenerate: bool,
) -> Result<u8, CliError> {
    let resolved = spec_args.resolve(file, 1)?;
    let grid = grid_args.resolve(file, Z_GRID)?;
    let tol = tolerance(tol, file, "tol", RESIDUAL_TOL)?;
    let allow_degenerate = allow_degenerate || file.get::<bool>("allow-degenerate")?.unwrap_or(false);
    let format = out.format(file)?;
    let path = out.path(file)?;

    let sol = solve_allow_degenerate(&resolved.spec, resolved.order)?;
    if sol.degeneracy != Degeneracy::Generic && !allow_degenerate {
        return Err(CliError::Degenerate(format!(
            "ordering {} gives {} (use --allow-degenerate to write it anyway)",
            sol.label, sol.degeneracy
        )));
    }
    let cert = sol.certify(&grid);
    let tag = detect(&resolved.spec);
    let pass = sol.degeneracy != Degeneracy::Generic || (cert.ok > 0 && cert.passes(tol));

    let p = &sol.params;
    let meta_pairs = vec![
        ("l".to_string(), fmt_num(resolved.spec.ell)),
        ("eps1".into(), complex_text(resolved.spec.eps1)),
        ("mixture".into(), format!("{};{}", complex_text(resolved.spec.mixture.0), complex_text(resolved.spec.mixture.1))),
        ("k".into(), resolved.spec.k.to_string()),
        ("ordering".into(), sol.label.to_string()),
        ("degeneracy".into(), sol.degeneracy.to_string()),
        ("a".into(), complex_text(p.a)),
        ("b".into(), complex_text(p.b)),
        ("c".into(), complex_text(p.c)),
        ("d".into(), complex_text(p.d)),
        ("hierarchy".into(), tag.family.to_string()),
        ("max_residual".into(), fmt_num(cert.max_residual)),
        ("tolerance".into(), fmt_num(tol)),
    ];
    let meta = SolveMeta {
        spec: SpecMeta::new(&resolved.spec),
        ordering: sol.label.to_string(),
        degeneracy: sol.degeneracy.to_string(),
        params: ParamsMeta { a: cx(p.a), b: cx(p.b), c: cx(p.c), d: cx(p.d) },
        hierarchy: tag,
        max_residual: raw(cert.max_residual),
        tolerance: raw(tol),
        points: grid.len(),
        ok_points: cert.ok,
        pole_points: cert.poles,
        pass,
    };
    let table = Table {
        columns: vec!["z", "w_re", "w_im", "residual"],
        rows: cert.samples.iter().map(|s| vec![Some(s.z), s.w.map(|w| w.re), s.w.map(|w| w.im), s.residual]).collect(),
        tags: Some(("flag", cert.samples.iter().map(|s| s.flag.to_string()).collect())),
    };
    emit(path.as_deref(), &render(format, &meta_pairs, &meta, &table)?)?;
    if !pass {
        eprintln!(
            "pvsusy: max residual {} exceeds tolerance {} ({} ok points)",
            fmt_num(cert.max_residual),
            fmt_num(tol),
            cert.ok
        );
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct ReportLine {
    name: String,
    status: String,
    max_error: Option<Raw>,
    tolerance: Option<Raw>,
    detail: String,
}

impl ReportLine {
    fn pass(&self) -> bool {
        self.status != "FAIL"
    }

    fn text(&self) -> String {
        let mut s = format!("{} {}", self.status, self.name);
        if let Some(e) = &self.max_error {
            s.push_str(&format!(" max_error={}", e.get()));
        }
        if let Some(t) = &self.tolerance {
            s.push_str(&format!(" tol={}", t.get()));
        }
        if !self.detail.is_empty() {
            s.push_str(&format!(" {}", self.detail));
        }
        s
    }
}

fn status(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.to_string()
}

fn emit_report(out: &OutputArgs, file: &FileConfig, lines: &[ReportLine]) -> Result<u8, CliError> {
    let text = match out.format(file)? {
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                pass: bool,
                checks: &'a [ReportLine],
            }
            let report = Report { pass: lines.iter().all(ReportLine::pass), checks: lines };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Invalid(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => lines.iter().map(|l| l.text() + "\n").collect(),
    };
    emit(out.path(file)?.as_deref(), &text)?;
    Ok(if lines.iter().all(ReportLine::pass) { 0 } else { 1 })
}

pub fn table(file: &FileConfig, which: &str, ell: Option<f64>, out: &OutputArgs) -> Result<u8, CliError> {
    let tables: Vec<TableId> = if which == "all" {
        TableId::ALL.to_vec()
    } else {
        vec![which.parse().map_err(|e: pvsusy::Error| CliError::Invalid(e.to_string()))?]
    };
    let ells: Vec<f64> = ell.map(|l| vec![l]).unwrap_or_else(|| TABLE_ELLS.to_vec());
    let params = check_all_params()?;
    let mut lines = Vec::new();
    for t in tables {
        for row in params.iter().filter(|r| r.table == t) {
            lines.push(ReportLine {
                name: format!("table {} row {} parameters", t, row.label),
                status: status(row.pass()),
                max_error: None,
                tolerance: None,
                detail: row.first_mismatch.clone().unwrap_or_else(|| format!("exact at {} rational points", row.points)),
            });
        }
        if !t.has_w_column() {
            continue;
        }
        for label in pvsusy::painleve::CANONICAL_ORDERINGS {
            for &l in &ells {
                let r = check_w_row(t, label, l)?;
                let mut detail = format!("l={} printed {:?}, machinery {}", l, r.printed, r.machinery);
                if r.printed == PrintedW::ResidualOnly {
                    detail.push_str(", residual-certified only");
                }
                if let Some(pr) = r.printed_residual {
                    detail.push_str(&format!(", printed-form PV residual {}", fmt_num(pr)));
                }
                let (err, tol) = match (r.deviation, r.residual) {
                    (Some(d), _) => (Some(raw(d)), Some(raw(pvsusy::tables::TABLE_W_TOL))),
                    (None, Some(res)) => (Some(raw(res)), Some(raw(RESIDUAL_TOL))),
                    _ => (None, None),
                };
                lines.push(ReportLine {
                    name: format!("table {} row {} w", t, label),
                    status: status(r.pass),
                    max_error: err,
                    tolerance: tol,
                    detail,
                });
            }
        }
    }
    emit_report(out, file, &lines)
}

fn any_spec_flag(a: &SpecArgs, file: &FileConfig) -> bool {
    a.ell.is_some() || a.eps.is_some() || a.nu.is_some() || a.lk.is_some() || a.k.is_some() || file.get::<String>("l").ok().flatten().is_some()
}

/// Default verification matrix: three nodeless seeds at k = 1, 2, 3.
fn verify_specs() -> Result<Vec<SeedSpec>, CliError> {
    let mut out = Vec::new();
    for (ell, eps, nu) in [(1.0, -0.3, 0.8), (0.0, -0.2, 1.0), (2.0, -1.1, 0.5)] {
        for k in 1..=3 {
            out.push(SeedSpec::real(ell, eps, Nu::Finite(nu), k)?);
        }
    }
    Ok(out)
}

fn from_report(r: CheckReport) -> ReportLine {
    ReportLine {
        name: r.name.clone(),
        status: status(r.pass),
        max_error: Some(raw(r.max_error)),
        tolerance: Some(raw(r.tolerance)),
        detail: r.detail,
    }
}

fn from_check(r: CheckReport, spec: &SeedSpec) -> ReportLine {
    let detail = format!("l={} eps1={} {}", spec.ell, spec.eps1, r.detail);
    ReportLine { detail, ..from_report(r) }
}

const SPECIAL_TOL: f64 = 1e-11;

fn special_checks() -> Result<Vec<ReportLine>, CliError> {
    let mut kummer: f64 = 0.0;
    for (a, b, x) in [
        (C64::new(-1.3, 0.4), C64::new(2.1, -0.7), C64::new(4.0, 3.0)),
        (C64::new(0.75, 0.0), C64::new(0.5, 0.0), C64::new(-7.5, 0.0)),
        (C64::new(2.2, -1.0), C64::new(3.3, 1.1), C64::new(-2.0, 8.0)),
        (C64::new(-2.5, 0.0), C64::new(1.5, 0.0), C64::new(9.5, 0.0)),
    ] {
        let lhs = kummer_1f1(a, b, x)?;
        let rhs = x.exp() * kummer_1f1(b - a, b, -x)?;
        kummer = kummer.max((lhs - rhs).norm() / lhs.norm());
    }
    let mut lag: f64 = 0.0;
    for n in 0..=8usize {
        for (alpha, x) in [(0.5, 3.7), (-0.5, 11.0), (2.25, -4.0)] {
            let mut scale = 1.0;
            for j in 0..n {
                scale *= (alpha + 1.0 + j as f64) / (j + 1) as f64;
            }
            let via = kummer_1f1(C64::new(-(n as f64), 0.0), C64::new(alpha + 1.0, 0.0), C64::new(x, 0.0))? * scale;
            let direct = laguerre(n, alpha, &C64::new(x, 0.0));
            lag = lag.max((via - direct).norm() / via.norm().max(1.0));
        }
    }
    let mut gam: f64 = 0.0;
    for z in [C64::new(0.3, 2.0), C64::new(4.5, -1.0), C64::new(1.25, -11.0)] {
        let lhs = gamma(z + 1.0)?;
        let rhs = z * gamma(z)?;
        gam = gam.max((lhs - rhs).norm() / lhs.norm());
    }
    Ok([("kummer-transformation", kummer), ("laguerre-1f1", lag), ("gamma-recurrence", gam)]
        .into_iter()
        .map(|(name, e)| ReportLine {
            name: name.into(),
            status: status(e <= SPECIAL_TOL),
            max_error: Some(raw(e)),
            tolerance: Some(raw(SPECIAL_TOL)),
            detail: String::new(),
        })
        .collect())
}

const CHECKS: [&str; 7] = ["intertwining", "commutators", "factorization", "shift", "number-operator", "annihilation", "special"];

pub fn verify(file: &FileConfig, spec_args: &SpecArgs, check: Option<&str>, out: &OutputArgs, corrupt: bool) -> Result<u8, CliError> {
    if let Some(c) = check {
        if !CHECKS.contains(&c) {
            return Err(CliError::Invalid(format!("unknown check {c:?}; choose from {}", CHECKS.join(", "))));
        }
    }
    let wants = |name: &str| check.is_none_or(|c| c == name);
    let specs = if any_spec_flag(spec_args, file) { vec![spec_args.resolve(file, 1)?.spec] } else { verify_specs()? };
    let mut lines = Vec::new();
    let mut ells: Vec<f64> = specs.iter().map(|s| s.ell).collect();
    ells.dedup();
    for spec in &specs {
        if wants("intertwining") {
            lines.push(from_check(check_intertwining(spec, corrupt)?, spec));
        }
        if wants("factorization") {
            lines.push(from_check(check_factorization(spec)?, spec));
        }
        if wants("annihilation") {
            lines.push(from_check(check_new_level_annihilated(spec)?, spec));
        }
        if wants("number-operator") {
            for n in 1..=4 {
                let r = check_number_operator(spec, n, &CHECK_POINTS)?;
                lines.push(ReportLine {
                    name: format!("number-operator n={n}"),
                    status: status(r.pass),
                    max_error: Some(raw(r.eigen_error.max(r.reduction_error))),
                    tolerance: Some(raw(pvsusy::ladder_algebra::NUMBER_OPERATOR_TOL)),
                    detail: format!(
                        "l={} eps1={} k={} eigenvalue {} reduced {} quartic {}",
                        spec.ell,
                        spec.eps1,
                        spec.k,
                        complex_text(r.predicted),
                        complex_text(r.reduced_measured),
                        complex_text(r.reduced_predicted)
                    ),
                });
            }
        }
    }
    for &ell in &ells {
        if wants("commutators") {
            lines.push(from_report(check_commutators(ell)?));
        }
        if wants("shift") {
            lines.push(from_report(check_shift_factorizations(ell)?));
        }
    }
    if wants("special") {
        lines.extend(special_checks()?);
    }
    emit_report(out, file, &lines)
}

pub fn hierarchy(file: &FileConfig, spec_args: &SpecArgs, out: &OutputArgs) -> Result<u8, CliError> {
    let spec = spec_args.resolve_unchecked(file, 1)?.spec;
    let nodeless = spec_args.resolve(file, 1).is_ok();
    let tag = detect(&spec);
    let mut lines = vec![ReportLine {
        name: "detect".into(),
        status: "INFO".into(),
        max_error: None,
        tolerance: None,
        detail: format!(
            "family={} condition={} n={} mu={}",
            tag.family,
            tag.condition,
            tag.n.map_or("-".into(), |n| n.to_string()),
            tag.mu.map_or("-".into(), |m| m.to_string())
        ),
    }];
    match tag.family {
        Family::Transcendent => {}
        Family::Weber => {
            let mut worst: f64 = 0.0;
            for label in pvsusy::painleve::Ordering::all() {
                let sol = solve_allow_degenerate(&spec, label)?;
                if sol.degeneracy == Degeneracy::Generic {
                    worst = worst.max(sol.certify(&default_z_grid()).max_residual);
                }
            }
            lines.push(ReportLine {
                name: "weber residual".into(),
                status: status(worst <= RESIDUAL_TOL),
                max_error: Some(raw(worst)),
                tolerance: Some(raw(RESIDUAL_TOL)),
                detail: format!(
                    "closed form not implemented; certified by the PV residual ({})",
                    if nodeless { "nodeless seed" } else { "seed has nodes, w has poles on the grid" }
                ),
            });
        }
        _ => {
            let report = crosscheck(&spec)?;
            for f in &report.forms {
                lines.push(ReportLine {
                    name: format!("{} vs construction", f.form),
                    status: if f.matched { "PASS".into() } else { "MISMATCH".into() },
                    max_error: Some(raw(f.deviation)),
                    tolerance: Some(raw(pvsusy::hierarchies::CROSSCHECK_TOL)),
                    detail: format!(
                        "best ordering {} with {}, printed-form residual {}",
                        f.ordering,
                        f.convention,
                        f.residual.map_or("-".into(), fmt_num)
                    ),
                });
            }
            if !report.any_match() {
                lines.push(ReportLine {
                    name: "hierarchy crosscheck".into(),
                    status: "FAIL".into(),
                    max_error: None,
                    tolerance: None,
                    detail: "no printed form matches any ordering under either argument convention".into(),
                });
            }
        }
    }
    emit_report(out, file, &lines)
}

pub fn grid_potential(
    file: &FileConfig,
    spec_args: &SpecArgs,
    x: (Option<f64>, Option<f64>, Option<usize>),
    out: &OutputArgs,
) -> Result<u8, CliError> {
    let spec = spec_args.resolve(file, 1)?.spec;
    let lo = x.0.map_or(file.get("x-min"), |v| Ok(Some(v)))?.unwrap_or(0.05);
    let hi = x.1.map_or(file.get("x-max"), |v| Ok(Some(v)))?.unwrap_or(8.0);
    let n = x.2.map_or(file.get("points"), |v| Ok(Some(v)))?.unwrap_or(400);
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(CliError::Invalid(format!("bad x grid [{lo}, {hi}] with {n} points")));
    }
    let chain: Vec<Member> = seed_chain(&spec)?.into_iter().map(member).collect();
    let xs = linear_grid(lo, hi, n);
    let mut rows = Vec::with_capacity(n);
    for &xv in &xs {
        let vk = partner_potential(spec.ell, &chain, xv).ok();
        rows.push(vec![Some(xv), Some(v0(spec.ell, xv)), vk.map(|v| v.re), vk.map(|v| v.im)]);
    }
    let meta_pairs = vec![
        ("l".to_string(), fmt_num(spec.ell)),
        ("eps1".into(), complex_text(spec.eps1)),
        ("k".into(), spec.k.to_string()),
    ];
    let table = Table { columns: vec!["x", "v0", "vk_re", "vk_im"], rows, tags: None };
    #[derive(Serialize)]
    struct Meta {
        spec: SpecMeta,
    }
    let meta = Meta { spec: SpecMeta::new(&spec) };
    emit(out.path(file)?.as_deref(), &render(out.format(file)?, &meta_pairs, &meta, &table)?)?;
    Ok(0)
}
