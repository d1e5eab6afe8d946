//! Scalar step-size rules.
//!
//! Every rule returns `alpha`, an approximation of the curvature along the
//! last step; the gradient step actually taken is `-g / alpha`. The
//! parameterized rule [`pbb`] interpolates between [`bb1`] (`m = 1`) and
//! [`bb2`] (`m = 0`) through the positive root of
//!
//! ```text
//! m ss a^2 - (2m - 1) sy a + (m - 1) yy = 0
//! ```
//!
//! and [`m_k`] turns the alignment indicator [`zeta`] into an adaptive `m`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::dot;

/// Below this interpolation parameter the rule returns BB2 directly.
pub const M_TRUNCATION: f64 = 1e-8;

/// Floor for the previous `cos^2` in the zeta quotient.
pub const COS2_FLOOR: f64 = 1e-16;

/// Inner products of a displacement `s` and gradient difference `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPair {
    pub ss: f64,
    pub sy: f64,
    pub yy: f64,
}

impl StepPair {
    pub fn new(s: &[f64], y: &[f64]) -> Result<Self> {
        let ss = dot(s, s)?;
        let sy = dot(s, y)?;
        let yy = dot(y, y)?;
        Self::from_products(ss, sy, yy)
    }

    pub fn from_products(ss: f64, sy: f64, yy: f64) -> Result<Self> {
        if !(ss > 0.0) || !ss.is_finite() {
            return Err(Error::InvalidInput(format!("s^T s must be positive, got {ss}")));
        }
        if !(yy >= 0.0) || !sy.is_finite() || !yy.is_finite() {
            return Err(Error::InvalidInput("non-finite or negative y^T y".into()));
        }
        Ok(Self { ss, sy, yy })
    }

    /// Squared cosine of the angle between `s` and `y`; `None` when `y = 0`.
    pub fn cos2(&self) -> Option<f64> {
        if self.yy > 0.0 {
            Some(((self.sy * self.sy) / (self.ss * self.yy)).min(1.0))
        } else {
            None
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let c2 = c * c;
        Self { ss: self.ss * c2, sy: self.sy * c2, yy: self.yy * c2 }
    }
}

pub fn bb1(p: &StepPair) -> f64 {
    p.sy / p.ss
}

pub fn bb2(p: &StepPair) -> Result<f64> {
    if p.sy == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(p.yy / p.sy)
}

fn require_curvature(p: &StepPair) -> Result<()> {
    if p.sy > 0.0 {
        Ok(())
    } else {
        Err(Error::Curvature(p.sy))
    }
}

/// Interpolated BB step for `m` in `[0, 1]`.
///
/// The radicand is evaluated as `((2m-1) sy)^2 + 4m(1-m) ss yy`, a sum of
/// nonnegative terms. For `m < 1/2` the root is taken from the conjugate
/// form `2(1-m) yy / (sqrt(D) + (1-2m) sy)` so neither branch subtracts
/// nearly equal quantities.
pub fn pbb(p: &StepPair, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidInput(format!("interpolation parameter {m} not in [0, 1]")));
    }
    require_curvature(p)?;
    let lo = bb1(p);
    let hi = bb2(p)?;
    if m < M_TRUNCATION {
        return Ok(hi);
    }
    let b = (2.0 * m - 1.0) * p.sy;
    let disc = b * b + 4.0 * m * (1.0 - m) * p.ss * p.yy;
    let root = disc.sqrt();
    let alpha = if b >= 0.0 {
        (b + root) / (2.0 * m * p.ss)
    } else {
        2.0 * (1.0 - m) * p.yy / (root - b)
    };
    Ok(alpha.clamp(lo.min(hi), lo.max(hi)))
}

/// Alignment indicator `cos2_k * (cos2_k / cos2_prev)`.
pub fn zeta(cos2_k: f64, cos2_prev: f64) -> f64 {
    cos2_k * (cos2_k / cos2_prev.max(COS2_FLOOR))
}

/// Adaptive interpolation parameter `zeta^q / (bb1 + zeta^q)`.
pub fn m_k(zeta_val: f64, bb1_val: f64, q: u32) -> f64 {
    let log_zeta = zeta_val.ln();
    let q = f64::from(q);
    if (q * log_zeta).abs() > 300.0 {
        // logistic form: 1 / (1 + bb1 * zeta^-q)
        let t = bb1_val.ln() - q * log_zeta;
        return 1.0 / (1.0 + t.exp());
    }
    let zq = zeta_val.powf(q);
    let m = zq / (bb1_val + zq);
    if m.is_nan() {
        0.0
    } else {
        m
    }
}

/// Adaptive alternation: BB2 when `bb1 / bb2 < eta`, otherwise BB1.
pub fn abb(p: &StepPair, eta: f64) -> Result<f64> {
    require_curvature(p)?;
    let a1 = bb1(p);
    let a2 = bb2(p)?;
    Ok(if a1 / a2 < eta { a2 } else { a1 })
}

/// Largest recent BB2 value when `cos^2 < xi`, else BB1. `window` holds the
/// BB2 values of the last `m + 1` iterations, current one included.
pub fn abbmin(p: &StepPair, window: &[f64], xi: f64) -> Result<f64> {
    require_curvature(p)?;
    if window.is_empty() {
        return Err(Error::InvalidInput("empty BB2 window".into()));
    }
    let cos2 = p.cos2().unwrap_or(1.0);
    if cos2 < xi {
        Ok(window.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    } else {
        Ok(bb1(p))
    }
}

pub const XI_MIN: f64 = 1e-8;
pub const XI_MAX: f64 = 1.0 - 1e-8;

/// [`abbmin`] with the threshold `xi` updated in place: `0.9 xi` after a
/// BB2-window step, `1.1 xi` after a BB1 step.
pub fn abbbon(p: &StepPair, window: &[f64], xi: &mut f64) -> Result<f64> {
    let alpha = abbmin(p, window, *xi)?;
    let cos2 = p.cos2().unwrap_or(1.0);
    let next = if cos2 < *xi { 0.9 * *xi } else { 1.1 * *xi };
    *xi = next.clamp(XI_MIN, XI_MAX);
    Ok(alpha)
}

/// Adaptive truncated cyclic rule.
pub fn atc(p: &StepPair, prev_alpha: f64, k: usize, cycle: usize) -> Result<f64> {
    require_curvature(p)?;
    if cycle == 0 {
        return Err(Error::InvalidInput("cycle length must be >= 1".into()));
    }
    let a1 = bb1(p);
    if k % cycle == 0 {
        return Ok(a1);
    }
    let a2 = bb2(p)?;
    Ok(if prev_alpha <= a1 {
        a1
    } else if prev_alpha >= a2 {
        a2
    } else {
        prev_alpha
    })
}

/// Harmonic-framework step `(yy - tau sy) / (sy - tau ss)`.
pub fn tbb(p: &StepPair, tau: f64) -> Result<f64> {
    require_curvature(p)?;
    if tau == f64::NEG_INFINITY {
        return Ok(bb1(p));
    }
    let den = p.sy - tau * p.ss;
    if den.abs() < 1e-300 {
        return bb2(p);
    }
    Ok((p.yy - tau * p.sy) / den)
}

/// [`tbb`] with `tau = -cot(theta)`.
///
/// Evaluated after multiplying through by `sin(theta)`:
/// `(yy sin + sy cos) / (sy sin + ss cos)`, finite even when `cos^2 = 1`
/// (which gives BB1).
pub fn tbb_cot(p: &StepPair) -> Result<f64> {
    require_curvature(p)?;
    let cos2 = p.cos2().unwrap_or(1.0);
    let cos = cos2.sqrt();
    let sin = (1.0 - cos2).max(0.0).sqrt();
    let den = p.sy * sin + p.ss * cos;
    if den.abs() < 1e-300 {
        return bb2(p);
    }
    Ok((p.yy * sin + p.sy * cos) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    Bb1,
    Bb2,
    Pbb,
    Abb,
    AbbMin,
    AbbBon,
    Atc,
    Tbb,
}

impl RuleName {
    pub const ALL: [RuleName; 8] = [
        RuleName::Bb1,
        RuleName::Bb2,
        RuleName::Pbb,
        RuleName::Abb,
        RuleName::AbbMin,
        RuleName::AbbBon,
        RuleName::Atc,
        RuleName::Tbb,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleName::Bb1 => "bb1",
            RuleName::Bb2 => "bb2",
            RuleName::Pbb => "pbb",
            RuleName::Abb => "abb",
            RuleName::AbbMin => "abbmin",
            RuleName::AbbBon => "abbbon",
            RuleName::Atc => "atc",
            RuleName::Tbb => "tbb",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        RuleName::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = RuleName::ALL.iter().map(|r| r.as_str()).collect();
                Error::Config(format!("unknown rule `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Parameters of one rule. Unused fields are ignored by rules that do not
/// need them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleConfig {
    pub name: RuleName,
    /// ABB threshold.
    pub eta: f64,
    /// ABBmin threshold; ABBbon starts from [`ABBBON_XI0`] instead.
    pub xi: f64,
    /// ABBmin/ABBbon look-back `m`; the window holds `m + 1` values.
    pub window: usize,
    /// ATC cycle length.
    pub cycle: usize,
    /// Exponent in the adaptive interpolation parameter.
    pub q: u32,
    /// Fixed interpolation parameter for PBB; `None` selects the adaptive scheme.
    pub m: Option<f64>,
}

pub const ABBBON_XI0: f64 = 0.5;

impl RuleConfig {
    pub fn new(name: RuleName) -> Self {
        Self { name, eta: 0.5, xi: 0.8, window: 5, cycle: 4, q: 8, m: None }
    }

    pub fn pbb_fixed(m: f64) -> Self {
        Self { m: Some(m), ..Self::new(RuleName::Pbb) }
    }

    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match (self.name, self.m) {
            (RuleName::Pbb, Some(m)) => format!("pbb(m={m})"),
            (name, _) => name.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return bad(format!("xi must lie in (0, 1), got {}", self.xi));
        }
        if self.cycle == 0 {
            return bad("cycle must be >= 1".into());
        }
        if self.q == 0 {
            return bad("q must be >= 1".into());
        }
        if let Some(m) = self.m {
            if !(0.0..=1.0).contains(&m) {
                return bad(format!("m must lie in [0, 1], got {m}"));
            }
        }
        Ok(())
    }

    /// `rule_name=pbb,eta=0.5,xi=0.8,window=5,cycle=4,q=8[,m=0.5]`
    pub fn to_kv(&self) -> String {
        let mut s = format!(
            "rule_name={},eta={},xi={},window={},cycle={},q={}",
            self.name, self.eta, self.xi, self.window, self.cycle, self.q
        );
        if let Some(m) = self.m {
            s.push_str(&format!(",m={m}"));
        }
        s
    }

    /// Parses [`RuleConfig::to_kv`] output. A bare rule name is accepted too.
    pub fn from_kv(text: &str) -> Result<Self> {
        let text = text.trim();
        if !text.contains('=') {
            return Ok(Self::new(text.parse()?));
        }
        let mut name = None;
        let mut pairs = Vec::new();
        for item in text.split([',', '\n']).map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{item}`")))?;
            if k.trim() == "rule_name" {
                name = Some(v.trim().parse::<RuleName>()?);
            } else {
                pairs.push((k.trim(), v.trim()));
            }
        }
        let mut cfg =
            Self::new(name.ok_or_else(|| Error::Config("missing rule_name".into()))?);
        for (k, v) in pairs {
            let num = |v: &str| -> Result<f64> {
                v.parse().map_err(|_| Error::Config(format!("bad number for {k}: `{v}`")))
            };
            match k {
                "eta" => cfg.eta = num(v)?,
                "xi" => cfg.xi = num(v)?,
                "window" => cfg.window = num(v)? as usize,
                "cycle" => cfg.cycle = num(v)? as usize,
                "q" => cfg.q = num(v)? as u32,
                "m" => cfg.m = Some(num(v)?),
                other => return Err(Error::Config(format!("unknown rule key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of one rule evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepChoice {
    pub alpha: f64,
    /// Interpolation parameter actually used (PBB only).
    pub m: Option<f64>,
    pub cos2: Option<f64>,
}

/// Mutable history for one rule over one solver run.
#[derive(Debug, Clone)]
pub struct RuleState {
    config: RuleConfig,
    /// Index of the most recently chosen `alpha` (the first step is `k = 1`).
    k: usize,
    prev_alpha: f64,
    prev_cos2: Option<f64>,
    bb2_window: VecDeque<f64>,
    xi: f64,
}

impl RuleState {
    /// `alpha1` is the step used at the first iteration.
    pub fn new(config: RuleConfig, alpha1: f64) -> Self {
        let xi = if config.name == RuleName::AbbBon { ABBBON_XI0 } else { config.xi };
        Self {
            config,
            k: 1,
            prev_alpha: alpha1,
            prev_cos2: None,
            bb2_window: VecDeque::with_capacity(config.window + 1),
            xi,
        }
    }

    pub fn config(&self) -> &RuleConfig {
        &self.config
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn prev_alpha(&self) -> f64 {
        self.prev_alpha
    }

    /// Chooses `alpha_{k+1}` from the pair `(s_k, y_k)`.
    pub fn next(&mut self, p: &StepPair) -> Result<StepChoice> {
        require_curvature(p)?;
        let k = self.k + 1;
        let cos2 = p.cos2();
        let a2 = bb2(p)?;
        self.bb2_window.push_back(a2);
        while self.bb2_window.len() > self.config.window + 1 {
            self.bb2_window.pop_front();
        }
        let mut m_used = None;
        let alpha = match self.config.name {
            RuleName::Bb1 => bb1(p),
            RuleName::Bb2 => a2,
            RuleName::Pbb => {
                let m = match self.config.m {
                    Some(m) => m,
                    None => {
                        let c = cos2.unwrap_or(1.0);
                        // cos^2 of the step before the first pair is taken as 1
                        let z = zeta(c, self.prev_cos2.unwrap_or(1.0));
                        m_k(z, bb1(p), self.config.q)
                    }
                };
                let m = if m < M_TRUNCATION { 0.0 } else { m };
                m_used = Some(m);
                pbb(p, m)?
            }
            RuleName::Abb => abb(p, self.config.eta)?,
            RuleName::AbbMin => {
                let w = self.bb2_window.make_contiguous();
                abbmin(p, w, self.config.xi)?
            }
            RuleName::AbbBon => {
                let mut xi = self.xi;
                let w = self.bb2_window.make_contiguous();
                let a = abbbon(p, w, &mut xi)?;
                self.xi = xi;
                a
            }
            RuleName::Atc => atc(p, self.prev_alpha, k, self.config.cycle)?,
            RuleName::Tbb => tbb_cot(p)?,
        };
        self.prev_cos2 = cos2.or(self.prev_cos2);
        self.prev_alpha = alpha;
        self.k = k;
        Ok(StepChoice { alpha, m: m_used, cos2 })
    }

    /// Records an externally chosen step (safeguard clamp or fallback).
    pub fn override_alpha(&mut self, alpha: f64) {
        self.prev_alpha = alpha;
    }

    /// Advances the iteration counter without a curvature pair, after a
    /// fallback step replaced the rule.
    pub fn skip(&mut self, alpha: f64) {
        self.k += 1;
        self.prev_alpha = alpha;
    }
}
