//! Seeded experiment suites, run records and performance profiles.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::{derive_seed, Rng};
use crate::problems::{lookup, make_bvp_quadratic, make_random_quadratic, Problem, Rosenbrock, SpectrumSpec};
use crate::solver::{solve_nonquadratic, solve_quadratic, SolverConfig, Status, StopRule, Trace};
use crate::stepsize::RuleConfig;

/// One problem family entry of a suite.
#[derive(Debug, Clone, PartialEq)]
pub enum SuiteProblem {
    /// Random quadratic with a block spectrum; one instance per repetition.
    Quadratic { distribution: u8, kappa: f64, n: usize },
    /// Tridiagonal BVP quadratic with a random minimizer; one instance per repetition.
    Bvp { n: usize },
    /// Two-dimensional Rosenbrock, stopped by distance to `(1, 1)`.
    Rosenbrock { c: f64 },
    /// Registered test function from its standard start.
    Function { name: String, n: Option<usize> },
}

impl SuiteProblem {
    fn is_random(&self) -> bool {
        matches!(self, SuiteProblem::Quadratic { .. } | SuiteProblem::Bvp { .. })
    }

    fn build(&self, seed: u64) -> Result<Problem> {
        Ok(match self {
            SuiteProblem::Quadratic { distribution, kappa, n } => {
                let spec = SpectrumSpec::new(*distribution, *kappa, *n);
                Problem::Quadratic(make_random_quadratic(&spec, &mut Rng::seed_from(seed))?)
            }
            SuiteProblem::Bvp { n } => Problem::Quadratic(make_bvp_quadratic(*n, &mut Rng::seed_from(seed))?),
            SuiteProblem::Rosenbrock { c } => Problem::Rosenbrock(Rosenbrock::new(*c)?),
            SuiteProblem::Function { name, n } => Problem::Function(lookup(name, *n)?),
        })
    }
}

/// Problems x rules x tolerances x repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub problems: Vec<SuiteProblem>,
    pub rules: Vec<RuleConfig>,
    pub tolerances: Vec<f64>,
    /// Instances per random problem family; deterministic problems run once.
    pub repetitions: usize,
    /// Solver limits and line-search parameters; `rule` and `epsilon` are
    /// replaced per cell.
    pub solver: SolverConfig,
}

impl SuiteSpec {
    pub fn new(problems: Vec<SuiteProblem>, rules: Vec<RuleConfig>, tolerances: Vec<f64>, repetitions: usize) -> Self {
        let solver = SolverConfig::new(rules.first().copied().unwrap_or_else(|| RuleConfig::new(crate::stepsize::RuleName::Pbb)), 1e-6);
        Self { problems, rules, tolerances, repetitions, solver }
    }

    fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.rules.is_empty() || self.tolerances.is_empty() {
            return Err(Error::Config("suite needs at least one problem, rule and tolerance".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        let mut labels = BTreeSet::new();
        for r in &self.rules {
            r.validate()?;
            if !labels.insert(r.label()) {
                return Err(Error::Config(format!("rule `{}` listed twice", r.label())));
            }
        }
        for &eps in &self.tolerances {
            let mut c = self.solver.clone();
            c.epsilon = eps;
            c.validate()?;
        }
        Ok(())
    }
}

/// Outcome of one (problem instance, rule, tolerance) cell.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RunRecord {
    pub problem_id: String,
    pub rule: String,
    pub eps: f64,
    pub seed: u64,
    pub iters: usize,
    pub fevals: usize,
    pub grad_ratio: f64,
    #[serde(deserialize_with = "de_status")]
    pub status: Status,
    pub ms: f64,
}

fn de_status<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Status, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl RunRecord {
    fn from_trace(problem_id: &str, rule: &str, eps: f64, seed: u64, t: &Trace, ms: f64) -> Self {
        Self {
            problem_id: problem_id.to_string(),
            rule: rule.to_string(),
            eps,
            seed,
            iters: t.iterations,
            fevals: t.fevals,
            grad_ratio: t.grad_ratio(),
            status: t.status,
            ms,
        }
    }

    /// Same record with the wall time zeroed, for determinism comparisons.
    pub fn without_time(&self) -> Self {
        Self { ms: 0.0, ..self.clone() }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.problem_id
            .cmp(&other.problem_id)
            .then_with(|| self.rule.cmp(&other.rule))
            .then_with(|| self.seed.cmp(&other.seed))
            .then_with(|| self.eps.total_cmp(&other.eps))
    }
}

/// Runs every cell of the suite. Records come back sorted by
/// `(problem_id, rule, seed, eps)` whatever the execution mode.
///
/// Random instances for repetition `r` use `derive_seed(master_seed, r)` and
/// are shared by all rules and tolerances.
pub fn run_suite(spec: &SuiteSpec, master_seed: u64, execution: Execution) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let mut instances = Vec::new();
    for p in &spec.problems {
        let reps = if p.is_random() { spec.repetitions } else { 1 };
        for rep in 0..reps {
            let seed = if p.is_random() { derive_seed(master_seed, rep as u64) } else { 0 };
            instances.push((p.build(seed)?, seed, matches!(p, SuiteProblem::Rosenbrock { .. })));
        }
    }

    let mut jobs = Vec::new();
    for inst in 0..instances.len() {
        for rule in &spec.rules {
            for &eps in &spec.tolerances {
                jobs.push((inst, *rule, eps));
            }
        }
    }

    let results = exec::map(&jobs, execution, |&(inst, rule, eps)| -> Result<RunRecord> {
        let (problem, seed, distance_stop) = &instances[inst];
        let mut config = spec.solver.clone();
        config.rule = rule;
        config.epsilon = eps;
        let objective = problem.as_objective();
        if *distance_stop {
            config.stop = StopRule::DistanceTo(vec![1.0; objective.dim()]);
        }
        let start = Instant::now();
        let trace = match problem {
            Problem::Quadratic(q) => solve_quadratic(q, &config)?,
            _ => solve_nonquadratic(objective, &config, &objective.start())?,
        };
        let ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(RunRecord::from_trace(objective.name(), &rule.label(), eps, *seed, &trace, ms))
    });
    let mut records = results.into_iter().collect::<Result<Vec<_>>>()?;
    records.sort_by(RunRecord::canonical_cmp);
    Ok(records)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

pub const RECORD_HEADER: [&str; 9] = ["problem_id", "rule", "eps", "seed", "iters", "fevals", "grad_ratio", "status", "ms"];

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.problem_id.clone(),
            r.rule.clone(),
            fmt_f(r.eps),
            r.seed.to_string(),
            r.iters.to_string(),
            r.fevals.to_string(),
            fmt_f(r.grad_ratio),
            r.status.to_string(),
            format!("{:.3}", r.ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != RECORD_HEADER {
        return Err(Error::Config(format!("unexpected record header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Cost used to compare rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Iterations,
    Fevals,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iterations" | "iters" => Ok(Metric::Iterations),
            "fevals" => Ok(Metric::Fevals),
            other => Err(Error::Config(format!("unknown metric `{other}` (iterations, fevals)"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Iterations => "iterations",
            Metric::Fevals => "fevals",
        })
    }
}

/// `rho(omega)` for one rule, on the shared breakpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub rule: String,
    /// `(omega, rho)` with `omega = log2(ratio)`, increasing.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// `rho` at `omega`, as a right-continuous step function.
    pub fn rho_at(&self, omega: f64) -> f64 {
        self.points.iter().take_while(|(w, _)| *w <= omega).last().map_or(0.0, |p| p.1)
    }
}

/// Dolan-More profiles over cells `(problem_id, eps, seed)`.
///
/// The ratio of a rule on a cell is its cost over the cheapest converged cost
/// there; a run that did not converge, or a rule with no record for the cell,
/// gets an infinite ratio. Zero costs count as one. Cells no rule solved stay
/// in the denominator with every ratio infinite.
pub fn performance_profile(records: &[RunRecord], metric: Metric) -> Result<Vec<ProfileCurve>> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no records to profile".into()));
    }
    type Cell = (String, u64, u64);
    let rules: BTreeSet<&str> = records.iter().map(|r| r.rule.as_str()).collect();
    let mut cells: BTreeMap<Cell, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in records {
        let key = (r.problem_id.clone(), r.eps.to_bits(), r.seed);
        let cost = if r.status.is_converged() {
            let c = match metric {
                Metric::Iterations => r.iters,
                Metric::Fevals => r.fevals,
            };
            c.max(1) as f64
        } else {
            f64::INFINITY
        };
        if cells.entry(key).or_default().insert(r.rule.as_str(), cost).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate record for rule {} on {} (eps {}, seed {})",
                r.rule, r.problem_id, r.eps, r.seed
            )));
        }
    }

    let mut log_ratios: BTreeMap<&str, Vec<f64>> = rules.iter().map(|r| (*r, Vec::new())).collect();
    for costs in cells.values() {
        let best = costs.values().copied().fold(f64::INFINITY, f64::min);
        for rule in &rules {
            let c = costs.get(rule).copied().unwrap_or(f64::INFINITY);
            let lr = if best.is_finite() && c.is_finite() { (c / best).log2() } else { f64::INFINITY };
            log_ratios.get_mut(rule).expect("rule present").push(lr);
        }
    }

    let mut grid: Vec<f64> = vec![0.0];
    grid.extend(log_ratios.values().flatten().copied().filter(|v| v.is_finite()));
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let n = cells.len() as f64;
    Ok(log_ratios
        .into_iter()
        .map(|(rule, mut lr)| {
            lr.sort_by(f64::total_cmp);
            let mut i = 0;
            let points = grid
                .iter()
                .map(|&w| {
                    while i < lr.len() && lr[i] <= w {
                        i += 1;
                    }
                    (w, i as f64 / n)
                })
                .collect();
            ProfileCurve { rule: rule.to_string(), points }
        })
        .collect())
}

pub fn write_profile_csv<W: Write>(curves: &[ProfileCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rule", "omega", "rho"])?;
    for c in curves {
        for &(omega, rho) in &c.points {
            w.write_record([c.rule.clone(), fmt_f(omega), fmt_f(rho)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Plain `key=value` lines describing how a result file was produced.
pub fn write_metadata<W: Write>(mut out: W, entries: &[(&str, String)]) -> Result<()> {
    for (k, v) in entries {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

/// Metadata entries for a suite: solver parameters and every rule's settings.
pub fn suite_metadata(spec: &SuiteSpec, master_seed: u64, execution: Execution) -> Vec<(&'static str, String)> {
    let s = &spec.solver;
    let mut e = vec![
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("master_seed", master_seed.to_string()),
        ("execution", execution.to_string()),
        ("repetitions", spec.repetitions.to_string()),
        ("max_iter", s.max_iter.to_string()),
        ("max_feval", s.max_feval.to_string()),
        ("alpha_min", fmt_f(s.alpha_min)),
        ("alpha_max", fmt_f(s.alpha_max)),
        ("memory", s.memory.to_string()),
        ("sigma", fmt_f(s.sigma)),
        ("delta", fmt_f(s.delta)),
        ("max_backtracks", s.max_backtracks.to_string()),
        ("alpha1", fmt_f(s.alpha1)),
    ];
    for r in &spec.rules {
        e.push(("rule", r.to_kv().lines().collect::<Vec<_>>().join(";")));
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepsize::RuleName;
    use proptest::prelude::*;

    fn rec(problem: &str, rule: &str, seed: u64, iters: usize, status: Status) -> RunRecord {
        RunRecord {
            problem_id: problem.into(),
            rule: rule.into(),
            eps: 1e-6,
            seed,
            iters,
            fevals: iters + 1,
            grad_ratio: if status.is_converged() { 1e-7 } else { 1e-3 },
            status,
            ms: 0.0,
        }
    }

    fn rules(names: &[RuleName]) -> Vec<RuleConfig> {
        names.iter().map(|n| RuleConfig::new(*n)).collect()
    }

    #[test]
    fn suite_cardinality() {
        let spec = SuiteSpec::new(vec![SuiteProblem::Rosenbrock { c: 100.0 }], rules(&[RuleName::Pbb, RuleName::Bb1]), vec![1e-1], 1);
        assert_eq!(run_suite(&spec, 0, Execution::Sequential).unwrap().len(), 2);

        let problems: Vec<SuiteProblem> = (1..=7)
            .flat_map(|d| [1e3, 1e4].map(|kappa| SuiteProblem::Quadratic { distribution: d, kappa, n: 100 }))
            .collect();
        let six = rules(&[RuleName::Bb1, RuleName::Bb2, RuleName::Abb, RuleName::Atc, RuleName::Tbb, RuleName::Pbb]);
        let mut spec = SuiteSpec::new(problems, six, vec![1e-6], 10);
        spec.solver.max_iter = 30;
        let records = run_suite(&spec, 5, Execution::default()).unwrap();
        assert_eq!(records.len(), 840);
    }

    #[test]
    fn suites_are_deterministic_and_sorted() {
        let spec = SuiteSpec::new(
            vec![
                SuiteProblem::Quadratic { distribution: 2, kappa: 1e3, n: 50 },
                SuiteProblem::Bvp { n: 40 },
                SuiteProblem::Function { name: "LIARWHD".into(), n: Some(20) },
            ],
            rules(&[RuleName::Pbb, RuleName::Abb, RuleName::AbbMin]),
            vec![1e-4, 1e-6],
            3,
        );
        let a = run_suite(&spec, 77, Execution::Sequential).unwrap();
        let b = run_suite(&spec, 77, Execution::Parallel).unwrap();
        let strip = |v: &[RunRecord]| v.iter().map(RunRecord::without_time).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.len(), (3 + 3 + 1) * 3 * 2);
        assert!(a.windows(2).all(|w| w[0].canonical_cmp(&w[1]) != Ordering::Greater));
        for r in &a {
            if r.status.is_converged() {
                assert!(r.grad_ratio <= r.eps);
            }
        }
        let c = run_suite(&spec, 78, Execution::Sequential).unwrap();
        assert_ne!(strip(&a), strip(&c));
    }

    #[test]
    fn bad_suites_fail_before_running() {
        let spec = SuiteSpec::new(vec![SuiteProblem::Function { name: "nope".into(), n: None }], rules(&[RuleName::Pbb]), vec![1e-6], 1);
        assert!(matches!(run_suite(&spec, 0, Execution::Sequential), Err(Error::UnknownFunction { .. })));
        let spec = SuiteSpec::new(vec![SuiteProblem::Rosenbrock { c: 1.0 }], vec![], vec![1e-6], 1);
        assert!(matches!(run_suite(&spec, 0, Execution::Sequential), Err(Error::Config(_))));
        let spec = SuiteSpec::new(vec![SuiteProblem::Rosenbrock { c: 1.0 }], rules(&[RuleName::Pbb, RuleName::Pbb]), vec![1e-6], 1);
        assert!(run_suite(&spec, 0, Execution::Sequential).is_err());
    }

    #[test]
    fn records_roundtrip_through_csv() {
        let spec = SuiteSpec::new(vec![SuiteProblem::Bvp { n: 30 }], rules(&[RuleName::Pbb, RuleName::Tbb]), vec![1e-8], 2);
        let records = run_suite(&spec, 3, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("problem_id,rule,eps,seed,iters,fevals,grad_ratio,status,ms\n"));
        let back = read_records_csv(&buf[..]).unwrap();
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.without_time(), b.without_time());
        }
        assert!(read_records_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn profile_examples() {
        let single = vec![rec("p", "a", 0, 5, Status::Converged), rec("q", "a", 0, 9, Status::Converged)];
        let c = performance_profile(&single, Metric::Iterations).unwrap();
        assert_eq!(c[0].rho_at(0.0), 1.0);

        let two = vec![rec("p", "a", 0, 10, Status::Converged), rec("p", "b", 0, 20, Status::Converged)];
        let c = performance_profile(&two, Metric::Iterations).unwrap();
        assert_eq!(c[0].rule, "a");
        assert_eq!(c[0].rho_at(0.0), 1.0);
        assert_eq!(c[1].rho_at(0.0), 0.0);
        assert_eq!(c[1].rho_at(1.0), 1.0);

        let tie = vec![rec("p", "a", 0, 10, Status::Converged), rec("p", "b", 0, 10, Status::Converged)];
        let c = performance_profile(&tie, Metric::Iterations).unwrap();
        assert_eq!(c[0].rho_at(0.0) + c[1].rho_at(0.0), 2.0);

        let failed = vec![rec("p", "a", 0, 10, Status::Converged), rec("p", "b", 0, 3, Status::MaxIter)];
        let c = performance_profile(&failed, Metric::Iterations).unwrap();
        assert_eq!(c[1].points.last().unwrap().1, 0.0);

        assert!(performance_profile(&[], Metric::Fevals).is_err());
        let dup = vec![rec("p", "a", 0, 10, Status::Converged), rec("p", "a", 0, 11, Status::Converged)];
        assert!(performance_profile(&dup, Metric::Iterations).is_err());
    }

    #[test]
    fn profile_csv_is_idempotent() {
        let recs = vec![
            rec("p", "b", 0, 12, Status::Converged),
            rec("p", "a", 0, 10, Status::Converged),
            rec("q", "a", 1, 40, Status::Converged),
            rec("q", "b", 1, 30, Status::MaxIter),
        ];
        let write = |r: &[RunRecord]| {
            let mut buf = Vec::new();
            write_profile_csv(&performance_profile(r, Metric::Fevals).unwrap(), &mut buf).unwrap();
            buf
        };
        let first = write(&recs);
        let mut csv = Vec::new();
        write_records_csv(&recs, &mut csv).unwrap();
        let reread = read_records_csv(&csv[..]).unwrap();
        assert_eq!(first, write(&reread));
        assert_eq!(first, write(&reread));
        assert!(String::from_utf8(first).unwrap().starts_with("rule,omega,rho\na,0.0000000000000000e0,"));
    }

    proptest! {
        #[test]
        fn profiles_are_monotone_and_dominance_is_preserved(
            costs in prop::collection::vec((1usize..500, 0usize..300, 0usize..300, any::<bool>()), 1..40)
        ) {
            let mut recs = Vec::new();
            for (i, (best, extra_b, extra_c, fail_c)) in costs.iter().enumerate() {
                let p = format!("p{i}");
                recs.push(rec(&p, "best", 0, *best, Status::Converged));
                recs.push(rec(&p, "b", 0, best + extra_b + 1, Status::Converged));
                let sc = if *fail_c { Status::MaxFeval } else { Status::Converged };
                recs.push(rec(&p, "c", 0, best + extra_c, sc));
            }
            let curves = performance_profile(&recs, Metric::Iterations).unwrap();
            let best = curves.iter().find(|c| c.rule == "best").unwrap();
            prop_assert_eq!(best.rho_at(0.0), 1.0);
            for c in &curves {
                prop_assert!(c.points.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
                for (j, &(_, rho)) in c.points.iter().enumerate() {
                    prop_assert!(best.points[j].1 >= rho);
                }
            }
        }
    }
}
