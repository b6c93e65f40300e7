use std::fmt::Write as _;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use ffartin::artin::{self, Method, Subject};
use ffartin::heuristic;
use ffartin::verify::{self, Status, VerifyConfig};
use ffartin::{arith, build_field, Error};

use crate::config::ExperimentConfig;
use crate::output::{Cell, Table};

/// Everything that can end a command early, with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a checked invariant failed.
    Invariant(String),
    /// Exit 2: invalid configuration or input.
    Config(String),
    /// Exit 3: a resource cap would be exceeded.
    Cap(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Config(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invariant(m) | Failure::Config(m) | Failure::Cap(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::Overflow(_) => Failure::Cap(e.to_string()),
            Error::Internal(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for Failure {
    fn from(e: crate::config::ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

pub type CmdResult<T> = Result<T, Failure>;

/// What a command produced.
pub enum Output {
    Table(Table),
    /// Preformatted text (verify summaries, gnuplot data).
    Text(String),
}

/// Shared per-run state.
pub struct Run {
    pub cfg: ExperimentConfig,
    pub timing: bool,
}

impl Run {
    fn subject(&self) -> CmdResult<Subject> {
        let field = build_field(self.cfg.p, self.cfg.k)?;
        let g = self
            .cfg
            .g
            .as_deref()
            .ok_or_else(|| Failure::Config("missing function g".into()))?;
        Ok(Subject::parse(&field, &self.cfg.variety, g, self.cfg.cap)?)
    }

    /// Rejects `n` whose `q^n` exceeds `max_qn`.
    fn check_qn(&self, q: u64, n: u32) -> CmdResult<()> {
        if let Some(max) = self.cfg.max_qn {
            let qn = (q as u128).checked_pow(n).unwrap_or(u128::MAX);
            if qn > max as u128 {
                return Err(Failure::Cap(format!("q^n = {q}^{n} exceeds max_qn = {max}")));
            }
        }
        Ok(())
    }

    fn elapsed(&self, t: Instant) -> Cell {
        if self.timing {
            Cell::Float((t.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3)
        } else {
            Cell::Empty
        }
    }
}

pub const COUNT_COLUMNS: &[&str] = &[
    "q", "n", "r", "N", "N_closed", "rho", "main_term", "error_ratio", "restricted_points",
    "zeros", "poles", "excluded_indeterminate", "generating_points", "note", "timing_ms",
];

pub fn cmd_count(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let mut table = Table::new(COUNT_COLUMNS);
    for &n in &run.cfg.n {
        run.check_qn(s.q(), n)?;
        let t = Instant::now();
        let rep = artin::count_artin_points(&s, n)?;
        let note = match rep.full_power {
            Some(l) => Cell::text(format!("g is a full {l}-th power")),
            None if rep.rho.is_none() => Cell::text("g is constant"),
            None => Cell::Empty,
        };
        table.push(vec![
            rep.q.into(),
            n.into(),
            rep.r.into(),
            rep.n_points.into(),
            Cell::opt_int(rep.n_closed),
            Cell::opt_ratio(rep.rho.as_ref().map(|r| &r.value)),
            Cell::opt_ratio(rep.main_term.as_ref()),
            rep.error_ratio.map_or(Cell::Empty, Cell::Float),
            rep.restricted.into(),
            rep.zeros.into(),
            rep.poles.into(),
            rep.excluded_indeterminate.into(),
            rep.generating_points.into(),
            note,
            run.elapsed(t),
        ]);
    }
    Ok(Output::Table(table))
}

fn render_factors(v: &artin::RhoValue) -> String {
    v.factors
        .iter()
        .map(|f| format!("{}:{}", f.ell, f.value))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_rho(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let mut table = Table::new(&["q", "n", "rho", "positive", "factors", "timing_ms"]);
    for &n in &run.cfg.n {
        let t = Instant::now();
        let v = artin::rho(&s, n as u64)?;
        let positive = artin::rho_positive(&s, n as u64)?;
        if positive != v.is_positive() {
            return Err(Failure::Invariant(format!(
                "rho_positive({n}) = {positive} but rho = {}",
                v.value
            )));
        }
        table.push(vec![
            s.q().into(),
            n.into(),
            Cell::ratio(&v.value),
            positive.into(),
            Cell::text(render_factors(&v)),
            run.elapsed(t),
        ]);
    }
    Ok(Output::Table(table))
}

fn method_name(m: &Method) -> String {
    match m {
        Method::Valuation => "valuation".into(),
        Method::ResidueTest { degrees, points } => format!(
            "residue(n={};points={points})",
            degrees.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        ),
        Method::DegreeBound => "degree_bound".into(),
    }
}

pub fn cmd_geometric(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let set = s.nongeometric()?;
    let p = s.field().characteristic() as u64;
    let primes: Vec<u64> = match run.cfg.option("ell") {
        Some(list) => list
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::Config(format!("ell: bad prime {x:?}")))
            })
            .collect::<CmdResult<_>>()?,
        None => arith::primes_up_to(set.search_bound)
            .into_iter()
            .filter(|&l| l != p)
            .collect(),
    };
    let mut table = Table::new(&[
        "q", "ell", "geometric", "full_power", "mu", "b", "unit_order", "method", "search_bound",
        "timing_ms",
    ]);
    for ell in primes {
        let t = Instant::now();
        let rep = s.geometricity(ell)?;
        let (mu, b) = match &rep.witness {
            Some(w) => (
                Cell::text(ffartin::poly::render_elem(s.field(), w.mu)),
                Cell::text(w.b.to_string()),
            ),
            None => (Cell::Empty, Cell::Empty),
        };
        table.push(vec![
            s.q().into(),
            ell.into(),
            rep.geometric.into(),
            rep.full_power.into(),
            mu,
            b,
            Cell::opt_int(rep.unit_order()),
            Cell::text(method_name(&rep.method)),
            set.search_bound.into(),
            run.elapsed(t),
        ]);
    }
    Ok(Output::Table(table))
}

/// The characters requested by `delta`: `prime` (default), `all`, or a
/// comma-separated list; only divisors of `q^n − 1` are kept.
fn deltas(run: &Run, m: u64) -> CmdResult<Vec<u64>> {
    let spec = run.cfg.option("delta").unwrap_or("prime");
    let fac = arith::factor_integer(m);
    Ok(match spec {
        "prime" => fac.primes().collect(),
        "all" => fac.divisors().into_iter().filter(|&d| d > 1).collect(),
        list => {
            let mut out = Vec::new();
            for x in list.split(',') {
                let d = x
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::Config(format!("delta: bad value {x:?}")))?;
                if d <= 1 {
                    return Err(Failure::Config(
                        "delta must exceed 1: the bound concerns nontrivial characters only".into(),
                    ));
                }
                if m % d == 0 {
                    out.push(d);
                }
            }
            out
        }
    })
}

pub fn cmd_charsum(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let hist = run.cfg.flag("hist")?;
    let strict = run.cfg.flag("strict")?;
    let mut table = Table::new(&[
        "q", "n", "delta", "a", "magnitude", "ratio", "trivial_sum", "in_hypothesis", "histogram",
        "timing_ms",
    ]);
    for &n in &run.cfg.n {
        run.check_qn(s.q(), n)?;
        let m = arith::checked_pow(s.q(), n)? - 1;
        for delta in deltas(run, m)? {
            let t = Instant::now();
            let rep = if strict {
                artin::charsum_experiment(&s, n, delta)?
            } else {
                artin::charsum_explore(&s, n, delta)?
            };
            let histogram = if hist {
                Cell::text(
                    rep.counts
                        .counts
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                )
            } else {
                Cell::Empty
            };
            let timing = run.elapsed(t);
            for row in &rep.rows {
                table.push(vec![
                    s.q().into(),
                    n.into(),
                    delta.into(),
                    row.a.into(),
                    row.magnitude.into(),
                    row.ratio.into(),
                    rep.trivial_sum.into(),
                    rep.in_hypothesis.into(),
                    histogram.clone(),
                    timing.clone(),
                ]);
            }
        }
    }
    Ok(Output::Table(table))
}

pub fn cmd_heuristic(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let empirical = run.cfg.flag("empirical")?;
    let line = s.g().as_line().cloned();
    if empirical && line.is_none() {
        return Err(Failure::Config("empirical=true needs a function on P1".into()));
    }
    let mut table = Table::new(&[
        "q", "n", "ell", "case", "P_ell", "r", "hits", "total", "observed", "A", "rhs", "timing_ms",
    ]);
    for &n in &run.cfg.n {
        let t = Instant::now();
        let d = heuristic::density(&s, n)?;
        for sp in &d.factors {
            let (hits, total, observed) = match (&line, empirical) {
                (Some(g), true) => {
                    run.check_qn(s.q(), n)?;
                    let c = heuristic::empirical_split_check(g, sp.ell, n, run.cfg.cap)?;
                    (c.hits.into(), c.total.into(), Cell::ratio(&c.observed))
                }
                _ => (Cell::Empty, Cell::Empty, Cell::Empty),
            };
            table.push(vec![
                s.q().into(),
                n.into(),
                sp.ell.into(),
                Cell::text(format!("{:?}", sp.case)),
                Cell::ratio(&sp.value),
                Cell::opt_int(sp.r),
                hits,
                total,
                observed,
                Cell::ratio(&d.a),
                Cell::ratio(&d.rhs),
                run.elapsed(t),
            ]);
        }
    }
    Ok(Output::Table(table))
}

pub fn cmd_generate_n(run: &Run) -> CmdResult<Output> {
    let s = run.subject()?;
    let m_max = run.cfg.option_u64("m_max", 20)?;
    let count = run.cfg.flag("count")?;
    let ns = artin::artin_n_generator(&s, m_max)?;
    let mut table = Table::new(&["m", "n", "rho", "positive", "N", "timing_ms"]);
    for (m, &n) in ns.iter().enumerate() {
        let t = Instant::now();
        let v = artin::rho(&s, n)?;
        let big = u32::try_from(n).ok().filter(|&n| {
            (s.q() as u128)
                .checked_pow(n)
                .is_some_and(|qn| qn <= run.cfg.max_qn.unwrap_or(run.cfg.cap) as u128)
        });
        let count_cell = match (count, big) {
            (true, Some(n)) => Cell::from(artin::count_artin_points(&s, n)?.n_points),
            _ => Cell::Empty,
        };
        table.push(vec![
            (m as u64).into(),
            n.into(),
            Cell::ratio(&v.value),
            artin::rho_positive(&s, n)?.into(),
            count_cell,
            run.elapsed(t),
        ]);
    }
    Ok(Output::Table(table))
}

pub struct VerifyRequest {
    pub suites: Vec<String>,
    pub faults: Vec<String>,
    pub cap: u64,
}

/// Runs the invariant battery. Returns the table, a text summary and
/// whether everything passed.
pub fn cmd_verify(req: &VerifyRequest) -> CmdResult<(Table, String, bool)> {
    let mut cfg = VerifyConfig {
        cap: req.cap,
        ..Default::default()
    };
    for f in &req.faults {
        cfg.faults.inject(f)?;
    }
    let names: Vec<String> = if req.suites.is_empty() {
        verify::suite_names().into_iter().map(String::from).collect()
    } else {
        req.suites.clone()
    };
    let mut table = Table::new(&["suite", "status", "checks", "failed", "skipped", "first_failure"]);
    let mut text = String::new();
    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for name in &names {
        let out = verify::run_suite(name, &cfg)?;
        let status = out.status();
        match status {
            Status::Pass => pass += 1,
            Status::Fail => fail += 1,
            Status::Skipped => skip += 1,
        }
        let _ = writeln!(
            text,
            "{status} {:<34} checks={} failed={} skipped={}",
            out.name,
            out.checks,
            out.failed,
            out.skipped.len()
        );
        for f in &out.failures {
            let _ = writeln!(text, "    violated {}: {f}", out.name);
        }
        for s in &out.skipped {
            let _ = writeln!(text, "    skipped: {s}");
        }
        table.push(vec![
            Cell::text(out.name),
            Cell::text(status.to_string()),
            out.checks.into(),
            out.failed.into(),
            (out.skipped.len() as u64).into(),
            out.failures.first().map_or(Cell::Empty, |f| Cell::text(f.clone())),
        ]);
    }
    let _ = writeln!(text, "summary: {pass} passed, {fail} failed, {skip} skipped");
    Ok((table, text, fail == 0))
}

fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Whitespace-separated columns with a `#` header, for gnuplot.
pub fn cmd_plotdata(run: &Run) -> CmdResult<Output> {
    let what = run.cfg.option("what").unwrap_or("count");
    let mut text = String::new();
    match what {
        "count" => {
            let Output::Table(t) = cmd_count(run)? else { unreachable!() };
            let s = run.subject()?;
            let _ = writeln!(text, "# g = {} on {} over GF({})", s.g(), s.variety(), s.q());
            let _ = writeln!(text, "# n N main_term error_ratio");
            for row in &t.rows {
                let cell = |name: &str| &row[COUNT_COLUMNS.iter().position(|c| *c == name).unwrap()];
                let main = match cell("main_term") {
                    Cell::Text(s) => approx(&s.parse::<BigRational>().expect("own output")),
                    _ => f64::NAN,
                };
                let ratio = match cell("error_ratio") {
                    Cell::Float(x) => *x,
                    _ => f64::NAN,
                };
                let (Cell::Int(n), Cell::Int(big_n)) = (cell("n"), cell("N")) else { unreachable!() };
                let _ = writeln!(text, "{n} {big_n} {main} {ratio}");
            }
        }
        "charsum" => {
            let Output::Table(t) = cmd_charsum(run)? else { unreachable!() };
            let _ = writeln!(text, "# n delta max_ratio");
            let mut best: Vec<((i128, i128), f64)> = Vec::new();
            for row in &t.rows {
                let (Cell::Int(n), Cell::Int(d), Cell::Float(r)) = (&row[1], &row[2], &row[5]) else {
                    unreachable!()
                };
                match best.iter_mut().find(|(k, _)| *k == (*n, *d)) {
                    Some((_, m)) => *m = m.max(*r),
                    None => best.push(((*n, *d), *r)),
                }
            }
            for ((n, d), r) in best {
                let _ = writeln!(text, "{n} {d} {r}");
            }
        }
        other => {
            return Err(Failure::Config(format!(
                "what: unknown plot {other:?} (expected count or charsum)"
            )))
        }
    }
    Ok(Output::Text(text))
}
