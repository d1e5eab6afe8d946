//! Gradient iteration drivers.
//!
//! [`solve_quadratic`] runs the plain iteration `x <- x - g / alpha` on a
//! quadratic with no line search. [`solve_nonquadratic`] wraps the same
//! step rules in a GLL nonmonotone backtracking search with step safeguards
//! and a fallback for uphill pairs.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{dot_unchecked, norm2};
use crate::problems::{Objective, QuadraticProblem};
use crate::stepsize::{RuleConfig, RuleName, RuleState, StepChoice, StepPair};

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Converged,
    MaxIter,
    MaxFeval,
    LineSearchFailure,
    NumericalBreakdown,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIter => "MaxIter",
            Status::MaxFeval => "MaxFeval",
            Status::LineSearchFailure => "LineSearchFailure",
            Status::NumericalBreakdown => "NumericalBreakdown",
        }
    }

    pub fn is_converged(&self) -> bool {
        *self == Status::Converged
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Converged" => Status::Converged,
            "MaxIter" => Status::MaxIter,
            "MaxFeval" => Status::MaxFeval,
            "LineSearchFailure" => Status::LineSearchFailure,
            "NumericalBreakdown" => Status::NumericalBreakdown,
            other => return Err(Error::Config(format!("unknown status `{other}`"))),
        })
    }
}

/// When a run counts as converged.
#[derive(Debug, Clone, PartialEq)]
pub enum StopRule {
    /// `||g_k|| <= epsilon ||g_1||`.
    GradientRatio,
    /// `||x_k - target|| < epsilon`.
    DistanceTo(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_iter: usize,
    pub max_feval: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// GLL memory `M`.
    pub memory: usize,
    pub sigma: f64,
    pub delta: f64,
    pub max_backtracks: usize,
    /// First `alpha` for the nonquadratic driver; the quadratic driver
    /// always starts from the Rayleigh quotient of `g_1`.
    pub alpha1: f64,
    pub rule: RuleConfig,
    pub stop: StopRule,
}

impl SolverConfig {
    pub fn new(rule: RuleConfig, epsilon: f64) -> Self {
        Self {
            epsilon,
            max_iter: 20_000,
            max_feval: 100_000,
            alpha_min: 1e-30,
            alpha_max: 1e30,
            memory: 10,
            sigma: 1e-4,
            delta: 0.5,
            max_backtracks: 100,
            alpha1: 1.0,
            rule,
            stop: StopRule::GradientRatio,
        }
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max && self.alpha_max.is_finite()) {
            return bad(format!("need 0 < alpha_min < alpha_max, got [{}, {}]", self.alpha_min, self.alpha_max));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.memory == 0 {
            return bad("memory M must be at least 1".into());
        }
        if !(self.alpha1 >= self.alpha_min && self.alpha1 <= self.alpha_max) {
            return bad(format!("alpha1 = {} outside [alpha_min, alpha_max]", self.alpha1));
        }
        self.rule.validate()
    }
}

/// One row per iterate `x_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// Step parameter used to leave `x_k`; `None` at the final iterate.
    pub alpha: Option<f64>,
    /// Interpolation parameter behind `alpha` (PBB only).
    pub m: Option<f64>,
    pub grad_norm: f64,
    pub f: f64,
    /// `cos^2` of the pair that produced `alpha`.
    pub cos2: Option<f64>,
    /// Cumulative function evaluations once `x_k` was reached.
    pub fevals: usize,
    /// Step reductions spent leaving `x_k`.
    pub backtracks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<IterRecord>,
    pub status: Status,
    /// Steps taken, `k - 1` at the final iterate.
    pub iterations: usize,
    pub fevals: usize,
    pub grad_evals: usize,
    pub grad_norm_initial: f64,
    pub x: Vec<f64>,
}

impl Trace {
    pub fn grad_norm_final(&self) -> f64 {
        self.records.last().map_or(self.grad_norm_initial, |r| r.grad_norm)
    }

    /// `||g_final|| / ||g_1||`, zero when the start is stationary.
    pub fn grad_ratio(&self) -> f64 {
        if self.grad_norm_initial > 0.0 {
            self.grad_norm_final() / self.grad_norm_initial
        } else {
            0.0
        }
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter_map(|r| r.alpha)
    }

    /// CSV with one row per iterate and a closing `status` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["k", "alpha", "m_k", "grad_norm", "f", "cos2", "fevals", "backtracks"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.k.to_string(),
                opt(r.alpha),
                opt(r.m),
                format!("{:.16e}", r.grad_norm),
                format!("{:.16e}", r.f),
                opt(r.cos2),
                r.fevals.to_string(),
                r.backtracks.to_string(),
            ])?;
        }
        w.write_record(["status", self.status.as_str()])?;
        w.flush()?;
        Ok(())
    }
}

/// What an observer sees at each iterate.
#[derive(Debug)]
pub struct IterView<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub g: &'a [f64],
}

/// GLL acceptance test
/// `f_trial <= max(history) - sigma * gamma * (1 / alpha) * gsq`.
pub fn gll_accept(f_trial: f64, history: &[f64], sigma: f64, gamma: f64, alpha: f64, gsq: f64) -> bool {
    let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    f_trial <= reference - sigma * gamma / alpha * gsq
}

fn stopped(stop: &StopRule, eps: f64, x: &[f64], gnorm: f64, g1norm: f64) -> bool {
    match stop {
        StopRule::GradientRatio => gnorm <= eps * g1norm,
        StopRule::DistanceTo(target) => {
            let d2: f64 = x.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() < eps
        }
    }
}

struct Clamped {
    alpha: f64,
    changed: bool,
}

fn clamp_alpha(alpha: f64, config: &SolverConfig) -> Clamped {
    let c = alpha.clamp(config.alpha_min, config.alpha_max);
    Clamped { alpha: c, changed: c != alpha }
}

/// Plain gradient iteration on a quadratic.
pub fn solve_quadratic(problem: &QuadraticProblem, config: &SolverConfig) -> Result<Trace> {
    solve_quadratic_observed(problem, config, |_| {})
}

/// [`solve_quadratic`] with a callback at every iterate, including the last.
pub fn solve_quadratic_observed<F>(problem: &QuadraticProblem, config: &SolverConfig, mut observe: F) -> Result<Trace>
where
    F: FnMut(&IterView<'_>),
{
    config.validate()?;
    let n = problem.dim();
    let xstar = problem.minimizer();
    let mut x = problem.start().to_vec();
    let mut g = problem.gradient(&x);
    let mut ag = vec![0.0; n];
    let quad_f = |x: &[f64], g: &[f64]| {
        0.5 * x.iter().zip(xstar).zip(g).map(|((a, b), gi)| (a - b) * gi).sum::<f64>()
    };

    let g1 = norm2(&g);
    let mut records = Vec::new();
    let mut state: Option<RuleState> = None;
    let mut pending: Option<StepPair> = None;
    let mut k = 1;

    let status = loop {
        let gnorm = norm2(&g);
        let f = quad_f(&x, &g);
        observe(&IterView { k, x: &x, g: &g });
        let mut rec = IterRecord { k, alpha: None, m: None, grad_norm: gnorm, f, cos2: None, fevals: k, backtracks: 0 };
        if !(gnorm.is_finite() && f.is_finite()) {
            records.push(rec);
            break Status::NumericalBreakdown;
        }
        if stopped(&config.stop, config.epsilon, &x, gnorm, g1) {
            records.push(rec);
            break Status::Converged;
        }
        if k > config.max_iter {
            records.push(rec);
            break Status::MaxIter;
        }

        problem.apply(&g, &mut ag);
        let gg = dot_unchecked(&g, &g);
        let gag = dot_unchecked(&g, &ag);
        let alpha = match (pending.take(), state.as_mut()) {
            (Some(pair), Some(st)) => match st.next(&pair) {
                Ok(StepChoice { alpha, m, cos2 }) => {
                    rec.m = m;
                    rec.cos2 = cos2;
                    let c = clamp_alpha(alpha, config);
                    if c.changed {
                        st.override_alpha(c.alpha);
                    }
                    c.alpha
                }
                Err(_) => {
                    records.push(rec);
                    break Status::NumericalBreakdown;
                }
            },
            _ => {
                let a = clamp_alpha(gag / gg, config).alpha;
                state = Some(RuleState::new(config.rule, a));
                a
            }
        };
        rec.alpha = Some(alpha);
        records.push(rec);
        if !(alpha.is_finite() && gag > 0.0) {
            break Status::NumericalBreakdown;
        }

        let inv = 1.0 / alpha;
        for i in 0..n {
            x[i] -= inv * g[i];
            g[i] -= inv * ag[i];
        }
        // s = -g/alpha, y = -Ag/alpha; every rule is invariant under a common scale
        let agag = dot_unchecked(&ag, &ag);
        pending = match StepPair::from_products(gg, gag, agag) {
            Ok(p) => Some(p),
            Err(_) => break Status::NumericalBreakdown,
        };
        k += 1;
    };

    Ok(Trace {
        iterations: k - 1,
        fevals: k,
        grad_evals: k,
        records,
        status,
        grad_norm_initial: g1,
        x,
    })
}

/// Nonmonotone spectral gradient method for a general smooth objective.
pub fn solve_nonquadratic<O: Objective + ?Sized>(f: &O, config: &SolverConfig, x1: &[f64]) -> Result<Trace> {
    config.validate()?;
    if x1.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x1.len() });
    }
    if let StopRule::DistanceTo(t) = &config.stop {
        if t.len() != x1.len() {
            return Err(Error::DimensionMismatch { expected: x1.len(), got: t.len() });
        }
    }
    let n = x1.len();
    let mut x = x1.to_vec();
    let mut fx = f.value(&x);
    if !fx.is_finite() {
        return Err(Error::Evaluation);
    }
    let mut g = f.gradient(&x);
    let mut fevals = 1;
    let mut grad_evals = 1;
    let g1 = norm2(&g);

    let mut alpha = config.alpha1;
    let mut state = RuleState::new(config.rule, alpha);
    let mut history: VecDeque<f64> = VecDeque::with_capacity(config.memory);
    history.push_back(fx);
    let mut records: Vec<IterRecord> = Vec::new();
    let mut last_choice: (Option<f64>, Option<f64>) = (None, None);
    let mut xt = vec![0.0; n];
    let mut k = 1;

    let status = loop {
        let gnorm = norm2(&g);
        let mut rec = IterRecord {
            k,
            alpha: None,
            m: last_choice.0,
            grad_norm: gnorm,
            f: fx,
            cos2: last_choice.1,
            fevals,
            backtracks: 0,
        };
        if !gnorm.is_finite() {
            records.push(rec);
            break Status::NumericalBreakdown;
        }
        if stopped(&config.stop, config.epsilon, &x, gnorm, g1) {
            records.push(rec);
            break Status::Converged;
        }
        if k > config.max_iter {
            records.push(rec);
            break Status::MaxIter;
        }
        if fevals >= config.max_feval {
            records.push(rec);
            break Status::MaxFeval;
        }
        rec.alpha = Some(alpha);

        let gg = dot_unchecked(&g, &g);
        let hist = history.make_contiguous();
        let mut gamma = 1.0;
        let mut backtracks = 0;
        let outcome = loop {
            let t = gamma / alpha;
            for i in 0..n {
                xt[i] = x[i] - t * g[i];
            }
            let ft = f.value(&xt);
            fevals += 1;
            // a non-finite trial value simply fails the test
            if gll_accept(ft, hist, config.sigma, gamma, alpha, gg) {
                break Ok(ft);
            }
            backtracks += 1;
            if backtracks > config.max_backtracks {
                break Err(Status::LineSearchFailure);
            }
            if fevals >= config.max_feval {
                break Err(Status::MaxFeval);
            }
            gamma *= config.delta;
        };
        rec.backtracks = backtracks;
        records.push(rec);
        let ft = match outcome {
            Ok(ft) => ft,
            Err(s) => break s,
        };

        let gt = f.gradient(&xt);
        grad_evals += 1;
        if gt.iter().any(|v| !v.is_finite()) {
            x.copy_from_slice(&xt);
            fx = ft;
            k += 1;
            records.push(IterRecord { k, alpha: None, m: None, grad_norm: f64::NAN, f: fx, cos2: None, fevals, backtracks: 0 });
            break Status::NumericalBreakdown;
        }
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        x.copy_from_slice(&xt);
        g = gt;
        fx = ft;
        if history.len() == config.memory {
            history.pop_front();
        }
        history.push_back(fx);
        k += 1;

        let pair = StepPair::new(&s, &y).ok().filter(|p| p.sy > 0.0);
        match pair {
            Some(p) => match state.next(&p) {
                Ok(choice) => {
                    let c = clamp_alpha(choice.alpha, config);
                    if c.changed {
                        state.override_alpha(c.alpha);
                    }
                    alpha = c.alpha;
                    last_choice = (choice.m, choice.cos2);
                }
                Err(_) => {
                    records.push(IterRecord { k, alpha: None, m: None, grad_norm: norm2(&g), f: fx, cos2: None, fevals, backtracks: 0 });
                    break Status::NumericalBreakdown;
                }
            },
            None => {
                alpha = uphill_fallback(norm2(&g));
                state.skip(alpha);
                last_choice = (None, None);
            }
        }
    };

    Ok(Trace {
        iterations: k - 1,
        fevals,
        grad_evals,
        records,
        status,
        grad_norm_initial: g1,
        x,
    })
}

/// Replacement for `alpha` after a pair with `s^T y <= 0`:
/// `1 / alpha = max(min(1 / ||g||, 1e5), 1)`.
pub fn uphill_fallback(gnorm: f64) -> f64 {
    let inv_g = if gnorm > 0.0 { 1.0 / gnorm } else { f64::INFINITY };
    1.0 / inv_g.min(1e5).max(1.0)
}

/// Solver defaults for a rule on the BVP family, whose ATC cycle is 8.
pub fn bvp_rule(name: RuleName) -> RuleConfig {
    let mut r = RuleConfig::new(name);
    if name == RuleName::Atc {
        r.cycle = 8;
    }
    r
}
