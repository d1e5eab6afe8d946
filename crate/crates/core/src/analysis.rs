//! Two-dimensional theory of the parameterized BB iteration.
//!
//! On `A = diag(lambda, 1)` with `lambda > 1`, the iteration is described by
//! the squared gradient-component ratio `eps_k = (g_{k-1}^(1) / g_{k-1}^(2))^2`,
//! which obeys the second-order recurrence `eps_{k+2} = e(eps_k)^2 eps_{k+1}`.
//! This module evaluates that recurrence, the step in `eps` coordinates, the
//! ABB switching ratio and the roots of its threshold quadratic.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::Rng;
use crate::stepsize::{m_k, zeta, M_TRUNCATION};

/// Default number of dynamics steps simulated.
pub const DEFAULT_HORIZON: usize = 200;

/// Gradient components at or below this magnitude make `eps` meaningless.
pub const COMPONENT_FLOOR: f64 = 1e-12;

fn check_args(eps: f64, lambda: f64, m: f64) {
    debug_assert!(eps > 0.0 && eps.is_finite(), "eps = {eps}");
    debug_assert!(lambda > 1.0 && lambda.is_finite(), "lambda = {lambda}");
    debug_assert!((0.0..=1.0).contains(&m), "m = {m}");
}

/// `2(1-m)(lambda-1) eps / (r + lambda eps + 1)`, with `r` the square root
/// in the closed form. Equals `(r - lambda eps - 1) / (2m(lambda-1))` for
/// `m > 0` but has no cancellation. Large `eps` is divided out first.
fn w_term(eps: f64, lambda: f64, m: f64) -> f64 {
    let c = 4.0 * m * (1.0 - m) * (lambda - 1.0).powi(2);
    if eps <= 1.0 {
        let le1 = lambda * eps + 1.0;
        let r = (le1 * le1 + c * eps).sqrt();
        2.0 * (1.0 - m) * (lambda - 1.0) * eps / (r + le1)
    } else {
        let t = 1.0 / eps;
        let le = lambda + t;
        let r = (le * le + c * t).sqrt();
        2.0 * (1.0 - m) * (lambda - 1.0) / (r + le)
    }
}

/// `(a eps + 1) / (b eps + 1)` without overflow for large `eps`.
fn mobius(eps: f64, a: f64, b: f64) -> f64 {
    if eps <= 1.0 {
        (a * eps + 1.0) / (b * eps + 1.0)
    } else {
        let t = 1.0 / eps;
        (a + t) / (b + t)
    }
}

/// BB1 in `eps` form, `(lambda eps + 1) / (eps + 1)`.
pub fn bb1_eps(eps: f64, lambda: f64) -> f64 {
    mobius(eps, lambda, 1.0)
}

/// BB2 in `eps` form, `(lambda^2 eps + 1) / (lambda eps + 1)`.
pub fn bb2_eps(eps: f64, lambda: f64) -> f64 {
    mobius(eps, lambda * lambda, lambda)
}

/// The PBB step on `diag(lambda, 1)` as a function of `eps`.
///
/// Closed form
/// `[(2m-1)(lambda eps+1) + sqrt((lambda eps+1)^2 + 4m(1-m)(lambda-1)^2 eps)] / (2m(eps+1))`,
/// evaluated as `(lambda eps + 1 + (lambda-1) w) / (eps + 1)`; `m = 0` gives BB2.
pub fn alpha_pbb_eps(eps: f64, lambda: f64, m: f64) -> f64 {
    check_args(eps, lambda, m);
    let w = w_term(eps, lambda, m);
    let a = if eps <= 1.0 {
        (lambda * eps + 1.0 + (lambda - 1.0) * w) / (eps + 1.0)
    } else {
        let t = 1.0 / eps;
        (lambda + t + (lambda - 1.0) * w * t) / (1.0 + t)
    };
    a.clamp(1.0, lambda)
}

/// Denominator of the `e` quotient in its displayed form,
/// `(2m-1)(lambda eps+1) + r - 2m(eps+1)`, computed as `2m(lambda-1)(eps+w)`.
pub fn e_denominator(eps: f64, lambda: f64, m: f64) -> f64 {
    check_args(eps, lambda, m);
    2.0 * m * (lambda - 1.0) * (eps + w_term(eps, lambda, m))
}

/// Lower bound `2m(lambda-1) eps` on [`e_denominator`].
pub fn e_denominator_bound(eps: f64, lambda: f64, m: f64) -> f64 {
    2.0 * m * (lambda - 1.0) * eps
}

/// `e(eps) = (alpha - lambda) / (alpha - 1)` at `alpha = alpha_pbb_eps(eps)`,
/// evaluated as `(w - 1) / (eps + w)`.
pub fn e_factor(eps: f64, lambda: f64, m: f64) -> f64 {
    check_args(eps, lambda, m);
    let w = w_term(eps, lambda, m);
    debug_assert!(e_denominator(eps, lambda, m) >= e_denominator_bound(eps, lambda, m) * (1.0 - 1e-12));
    (w - 1.0) / (eps + w)
}

/// `eps_{k+2} = e(eps_k)^2 eps_{k+1}` for a fixed `m`.
pub fn step_dynamics(eps_k: f64, eps_k1: f64, lambda: f64, m: f64) -> f64 {
    e_factor(eps_k, lambda, m).powi(2) * eps_k1
}

/// `alpha^BB1 / alpha^BB2`, which is `cos^2` of the angle between `s` and `y`.
pub fn abb_ratio(eps: f64, lambda: f64) -> f64 {
    mobius(eps, lambda, 1.0) / mobius(eps, lambda * lambda, lambda)
}

/// How the interpolation parameter is chosen along a simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MPolicy {
    Fixed(f64),
    /// `m_k` from the alignment indicator with exponent `q`.
    Adaptive { q: u32 },
}

impl MPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MPolicy::Fixed(m) if !(m > 0.0 && m <= 1.0) => {
                Err(Error::InvalidInput(format!("fixed m must lie in (0, 1], got {m}")))
            }
            MPolicy::Adaptive { q: 0 } => Err(Error::InvalidInput("q must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MPolicy::Fixed(m) => write!(f, "{m}"),
            MPolicy::Adaptive { q } => write!(f, "adaptive(q={q})"),
        }
    }
}

/// Two consecutive ratios and the problem/policy that evolves them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsState {
    pub eps_k: f64,
    pub eps_k1: f64,
    pub lambda: f64,
    pub m_policy: MPolicy,
}

impl EpsState {
    pub fn new(eps_k: f64, eps_k1: f64, lambda: f64, m_policy: MPolicy) -> Result<Self> {
        for (name, v) in [("eps_k", eps_k), ("eps_k1", eps_k1)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda must exceed 1, got {lambda}")));
        }
        m_policy.validate()?;
        Ok(Self { eps_k, eps_k1, lambda, m_policy })
    }
}

/// Result of [`simulate_dynamics`].
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsRun {
    pub state: EpsState,
    /// `values[0] = eps_k1`; `values[j]` is the ratio after `j` steps.
    pub values: Vec<f64>,
    /// `m` used at each step.
    pub ms: Vec<f64>,
    /// First `j` with `values[j] <= 1`.
    pub first_index_le_1: Option<usize>,
    /// Step at which the ratio became non-finite or non-positive.
    pub diverged_at: Option<usize>,
}

impl DynamicsRun {
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// CSV with columns `step,eps`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "eps"])?;
        for (j, v) in self.values.iter().enumerate() {
            w.write_record([j.to_string(), format!("{v:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Iterates the ratio recurrence for `steps` steps.
///
/// Under the adaptive policy `cos^2` is taken from [`abb_ratio`] and the
/// ratio before the first step is treated as `cos^2 = 1`.
pub fn simulate_dynamics(state: EpsState, steps: usize) -> Result<DynamicsRun> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    let EpsState { lambda, m_policy, .. } = state;
    let mut values = Vec::with_capacity(steps + 1);
    let mut ms = Vec::with_capacity(steps);
    values.push(state.eps_k1);
    let mut first = (state.eps_k1 <= 1.0).then_some(0);
    let mut diverged_at = None;
    let (mut a, mut b) = (state.eps_k, state.eps_k1);
    let mut prev_cos2 = 1.0;
    for j in 1..=steps {
        let m = match m_policy {
            MPolicy::Fixed(m) => m,
            MPolicy::Adaptive { q } => {
                let c = abb_ratio(a, lambda);
                let m = m_k(zeta(c, prev_cos2), bb1_eps(a, lambda), q);
                prev_cos2 = c;
                if m < M_TRUNCATION {
                    0.0
                } else {
                    m
                }
            }
        };
        let next = step_dynamics(a, b, lambda, m);
        ms.push(m);
        values.push(next);
        if !(next.is_finite() && next > 0.0) {
            diverged_at = Some(j);
            break;
        }
        if first.is_none() && next <= 1.0 {
            first = Some(j);
        }
        (a, b) = (b, next);
    }
    Ok(DynamicsRun { state, values, ms, first_index_le_1: first, diverged_at })
}

/// `(g^(1) / g^(2))^2`, or `None` once either component is at the floor.
pub fn eps_from_gradient(g: &[f64]) -> Option<f64> {
    match g {
        [g1, g2] if g1.abs() > COMPONENT_FLOOR && g2.abs() > COMPONENT_FLOOR => Some((g1 / g2).powi(2)),
        _ => None,
    }
}

/// The threshold quadratic
/// `Phi(eps) = lambda^2 (1-eta) eps^2 + [2 lambda - eta (1 + lambda^2)] eps + 1 - eta`,
/// negative exactly where `abb_ratio(eps) < eta`.
pub fn phi(eps: f64, lambda: f64, eta: f64) -> f64 {
    let l2 = lambda * lambda;
    l2 * (1.0 - eta) * eps * eps + (2.0 * lambda - eta * (1.0 + l2)) * eps + 1.0 - eta
}

/// `|Phi(eps)|` relative to the sum of the magnitudes of its three terms.
pub fn phi_relative_residual(eps: f64, lambda: f64, eta: f64) -> f64 {
    let l2 = lambda * lambda;
    let t = [
        l2 * (1.0 - eta) * eps * eps,
        (2.0 * lambda - eta * (1.0 + l2)) * eps,
        1.0 - eta,
    ];
    (t[0] + t[1] + t[2]).abs() / (t[0].abs() + t[1].abs() + t[2].abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRoots {
    pub eps1: f64,
    pub eps2: f64,
    pub lambda: f64,
    pub eta: f64,
}

/// Smallest `eta` for which the threshold quadratic has two positive roots
/// (exclusive), `4 lambda / (1 + lambda)^2`.
pub fn eta_lower_bound(lambda: f64) -> f64 {
    4.0 * lambda / (1.0 + lambda).powi(2)
}

/// Both roots of [`phi`]. The larger one uses the closed form with the `+`
/// sign; the smaller one follows from `eps1 eps2 = 1 / lambda^2`.
pub fn abb_threshold_roots(lambda: f64, eta: f64) -> Result<ThresholdRoots> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must exceed 1, got {lambda}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidInput(format!("eta must lie in (0, 1), got {eta}")));
    }
    let gap = eta - eta_lower_bound(lambda);
    if !(gap > 0.0) {
        return Err(Error::NoRealRoots { lambda, eta });
    }
    let l2 = lambda * lambda;
    let eps2 = (eta * (1.0 + l2) - 2.0 * lambda + (l2 - 1.0) * (eta * gap).sqrt()) / (2.0 * l2 * (1.0 - eta));
    let eps1 = 1.0 / (l2 * eps2);
    Ok(ThresholdRoots { eps1, eps2, lambda, eta })
}

/// One row of a start sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub policy: MPolicy,
    pub eps0: f64,
    pub eps1: f64,
    pub first_index_le_1: Option<usize>,
    pub steps: usize,
}

/// Runs the recurrence from `starts` seeded initial pairs with both ratios
/// uniform in `(lo, hi)`, for every `(lambda, policy)` combination.
///
/// Start pairs depend only on `seed` and are shared across combinations.
pub fn lemma1_sweep(
    lambdas: &[f64],
    policies: &[MPolicy],
    starts: usize,
    range: (f64, f64),
    seed: u64,
    horizon: usize,
    execution: Execution,
) -> Result<Vec<SweepRow>> {
    let (lo, hi) = range;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("bad start range ({lo}, {hi})")));
    }
    let mut rng = Rng::seed_from(seed);
    let pairs: Vec<(f64, f64)> = (0..starts).map(|_| (rng.uniform_open(lo, hi), rng.uniform_open(lo, hi))).collect();
    let mut jobs = Vec::new();
    for &lambda in lambdas {
        for &policy in policies {
            for &(a, b) in &pairs {
                jobs.push(EpsState::new(a, b, lambda, policy)?);
            }
        }
    }
    let runs = exec::map(&jobs, execution, |s| simulate_dynamics(*s, horizon));
    runs.into_iter()
        .map(|r| {
            let r = r?;
            Ok(SweepRow {
                lambda: r.state.lambda,
                policy: r.state.m_policy,
                eps0: r.state.eps_k,
                eps1: r.state.eps_k1,
                first_index_le_1: r.first_index_le_1,
                steps: r.steps(),
            })
        })
        .collect()
}

/// CSV with columns `lambda,m_or_policy,eps0,eps1,first_index_le_1,steps`;
/// an empty index means none within the horizon.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "m_or_policy", "eps0", "eps1", "first_index_le_1", "steps"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.lambda),
            r.policy.to_string(),
            format!("{:.16e}", r.eps0),
            format!("{:.16e}", r.eps1),
            r.first_index_le_1.map(|i| i.to_string()).unwrap_or_default(),
            r.steps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepsize::{bb1, bb2, pbb, StepPair};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// Pair `(s, y)` on `diag(lambda, 1)` from `g = (sqrt(eps), 1)`.
    fn pair_from_eps(eps: f64, lambda: f64) -> StepPair {
        let g = [eps.sqrt(), 1.0];
        let ag = [lambda * g[0], g[1]];
        StepPair::new(&g, &ag).unwrap()
    }

    /// The displayed quotient for `e`, evaluated literally.
    fn e_literal(eps: f64, lambda: f64, m: f64) -> f64 {
        let le1 = lambda * eps + 1.0;
        let p = (2.0 * m - 1.0) * le1 + (le1 * le1 + 4.0 * m * (1.0 - m) * (lambda - 1.0).powi(2) * eps).sqrt();
        (p - 2.0 * m * lambda * (eps + 1.0)) / (p - 2.0 * m * (eps + 1.0))
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_pbb_eps(1.0, 10.0, 0.5);
        assert!(rel(a, 202f64.sqrt() / 2.0) < 1e-14);
        assert!(rel(a, (5.5 * 101.0 / 11.0f64).sqrt()) < 1e-14);
        assert!(rel(alpha_pbb_eps(1.0, 10.0, 1.0), 5.5) < 1e-15);
        assert!(rel(alpha_pbb_eps(3.0, 7.0, 0.0), bb2_eps(3.0, 7.0)) < 1e-15);
        assert!(rel(alpha_pbb_eps(1e-14, 50.0, 0.3), 1.0) < 1e-9);
        assert!(rel(alpha_pbb_eps(1e14, 50.0, 0.3), 50.0) < 1e-11);
    }

    #[test]
    fn e_factor_examples() {
        for eps in [1e-6, 0.3, 1.0, 7.0, 1e5] {
            for lambda in [1.5, 10.0, 1e4] {
                assert!(rel(e_factor(eps, lambda, 1.0), -1.0 / eps) < 1e-14);
            }
        }
        let d = e_denominator(1.0, 10.0, 0.5);
        assert!(d >= 9.0);
        assert!(rel(d, 202f64.sqrt() - 2.0) < 1e-14);
    }

    #[test]
    fn dynamics_examples() {
        assert!(rel(step_dynamics(2.0, 3.0, 10.0, 1.0), 0.75) < 1e-15);
        let s = EpsState::new(10.0, 10.0, 1e3, MPolicy::Adaptive { q: 8 }).unwrap();
        let r = simulate_dynamics(s, 1).unwrap();
        assert!(r.values[1].is_finite() && r.values[1] > 0.0);

        let run = simulate_dynamics(EpsState::new(0.5, 0.5, 10.0, MPolicy::Fixed(1.0)).unwrap(), 5).unwrap();
        assert_eq!(run.first_index_le_1, Some(0));
        for lambda in [2.0, 10.0, 1e6] {
            let run = simulate_dynamics(EpsState::new(2.0, 3.0, lambda, MPolicy::Fixed(1.0)).unwrap(), 5).unwrap();
            assert!(rel(run.values[1], 0.75) < 1e-15);
            assert_eq!(run.first_index_le_1, Some(1));
        }
    }

    #[test]
    fn lemma1_at_lambda_100_half() {
        let rows = lemma1_sweep(&[100.0], &[MPolicy::Fixed(0.5)], 1000, (1.0, 100.0), 2024, DEFAULT_HORIZON, Execution::default()).unwrap();
        assert_eq!(rows.len(), 1000);
        assert!(rows.iter().all(|r| r.first_index_le_1.is_some_and(|i| i <= 50)));
    }

    #[test]
    fn abb_ratio_examples() {
        assert!(rel(abb_ratio(1.0, 3.0), 0.8) < 1e-15);
        assert!(rel(abb_ratio(1e-15, 1e3), 1.0) < 1e-9);
        assert!(rel(abb_ratio(1e20, 1e3), 1.0) < 1e-9);
    }

    #[test]
    fn threshold_examples() {
        let r = abb_threshold_roots(1e3, 0.4).unwrap();
        assert!(rel(r.eps1 * r.eps2 * 1e6, 1.0) < 1e-10);
        assert!(phi_relative_residual(r.eps1, 1e3, 0.4) < 1e-8);
        assert!(phi_relative_residual(r.eps2, 1e3, 0.4) < 1e-8);
        assert!(phi((r.eps1 * r.eps2).sqrt(), 1e3, 0.4) < 0.0);

        let (lambda, eta) = (1e6, 0.4);
        let r = abb_threshold_roots(lambda, eta).unwrap();
        assert!(rel(r.eps2, eta / (1.0 - eta)) < 0.01);
        assert!(rel(r.eps1, (1.0 - eta) / (eta * lambda * lambda)) < 0.01);
        assert!(rel(bb1_eps(r.eps2, lambda), eta * (lambda - 1.0) + 1.0) < 0.01);
        assert!(rel(bb2_eps(r.eps2, lambda), lambda) < 0.01);
        assert!(rel(bb1_eps(r.eps1, lambda), 1.0) < 0.01);
        assert!(rel(bb2_eps(r.eps1, lambda), 1.0 / eta) < 0.01);

        // 4 lambda / (1 + lambda)^2 = 0.75 at lambda = 3
        assert!(matches!(abb_threshold_roots(3.0, 0.75), Err(Error::NoRealRoots { .. })));
        assert!(abb_threshold_roots(3.0, 0.76).is_ok());
        assert!(abb_threshold_roots(0.5, 0.9).is_err());
        assert!(abb_threshold_roots(10.0, 1.0).is_err());
    }

    #[test]
    fn gradient_eps_floor() {
        assert_eq!(eps_from_gradient(&[2.0, 1.0]), Some(4.0));
        assert_eq!(eps_from_gradient(&[1e-13, 1.0]), None);
        assert_eq!(eps_from_gradient(&[1.0, 0.0]), None);
        assert_eq!(eps_from_gradient(&[1.0, 1.0, 1.0]), None);
    }

    #[test]
    fn csv_outputs() {
        let run = simulate_dynamics(EpsState::new(2.0, 3.0, 10.0, MPolicy::Fixed(1.0)).unwrap(), 3).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,eps\n0,3.0000000000000000e0\n1,7.5"));
        let rows = lemma1_sweep(&[10.0], &[MPolicy::Adaptive { q: 8 }], 3, (1.0, 100.0), 1, 10, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().contains(",adaptive(q=8),"));
    }

    #[test]
    fn sweep_is_identical_across_execution_modes() {
        let lambdas = [10.0, 1e3];
        let policies = [MPolicy::Fixed(0.25), MPolicy::Adaptive { q: 8 }];
        let a = lemma1_sweep(&lambdas, &policies, 50, (1.0, 100.0), 9, 60, Execution::Sequential).unwrap();
        let b = lemma1_sweep(&lambdas, &policies, 50, (1.0, 100.0), 9, 60, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn alpha_matches_pair_rule_and_brackets(le in -8.0f64..8.0, ll in 0.01f64..6.0, m in 0.0f64..=1.0) {
            let eps = 10f64.powf(le);
            let lambda = 1.0 + 10f64.powf(ll) - 1.0 + 1e-3;
            let a = alpha_pbb_eps(eps, lambda, m);
            let lo = bb1_eps(eps, lambda);
            let hi = bb2_eps(eps, lambda);
            prop_assert!(a >= lo * (1.0 - 1e-14) && a <= hi * (1.0 + 1e-14));
            prop_assert!(a >= 1.0 && a <= lambda);
            let p = pair_from_eps(eps, lambda);
            prop_assert!(rel(lo, bb1(&p)) < 1e-12);
            prop_assert!(rel(hi, bb2(&p).unwrap()) < 1e-12);
            prop_assert!(rel(a, pbb(&p, m).unwrap()) < 1e-10);
            if m > 0.0 {
                let m2 = (m * 0.9).max(1e-9);
                prop_assert!(alpha_pbb_eps(eps, lambda, m2) >= a * (1.0 - 1e-14));
            }
        }

        #[test]
        fn e_matches_component_updates(le in -4.0f64..4.0, ll in 0.05f64..4.0, m in 0.01f64..=1.0) {
            let eps = 10f64.powf(le);
            let lambda = 10f64.powf(ll);
            let a = alpha_pbb_eps(eps, lambda, m);
            let composed = ((a - lambda) / (a - 1.0)).powi(2);
            prop_assert!(rel(e_factor(eps, lambda, m).powi(2), composed) < 1e-10);
            prop_assert!(e_denominator(eps, lambda, m) >= e_denominator_bound(eps, lambda, m));
            let lit = e_literal(eps, lambda, m);
            prop_assert!(rel(e_factor(eps, lambda, m), lit) < 1e-6);
        }

        #[test]
        fn bb1_specialization(a in 1e-3f64..1e3, b in 1e-3f64..1e3, ll in 0.01f64..6.0) {
            let lambda = 10f64.powf(ll);
            prop_assert!(rel(step_dynamics(a, b, lambda, 1.0), b / (a * a)) <= 1e-12);
        }

        #[test]
        fn abb_ratio_is_pair_cos2(le in -6.0f64..6.0, ll in 0.01f64..6.0) {
            let eps = 10f64.powf(le);
            let lambda = 10f64.powf(ll);
            let p = pair_from_eps(eps, lambda);
            let r = abb_ratio(eps, lambda);
            prop_assert!(r > 0.0 && r <= 1.0);
            prop_assert!(rel(r, p.cos2().unwrap()) < 1e-12);
        }

        #[test]
        fn threshold_roots_solve_phi(ll in 0.1f64..6.0, t in 0.01f64..0.99) {
            let lambda = 10f64.powf(ll);
            let lb = eta_lower_bound(lambda);
            let eta = lb + t * (1.0 - lb);
            prop_assume!(eta > lb && eta < 1.0);
            let r = abb_threshold_roots(lambda, eta).unwrap();
            prop_assert!(r.eps1 < r.eps2 && r.eps1 > 0.0);
            prop_assert!(phi_relative_residual(r.eps1, lambda, eta) < 1e-8);
            prop_assert!(phi_relative_residual(r.eps2, lambda, eta) < 1e-8);
            prop_assert!(rel(r.eps1 * r.eps2 * lambda * lambda, 1.0) < 1e-10);
            let mid = (r.eps1 * r.eps2).sqrt();
            prop_assert!(phi(mid, lambda, eta) < 0.0);
            prop_assert!(abb_ratio(mid, lambda) < eta);
        }
    }
}
