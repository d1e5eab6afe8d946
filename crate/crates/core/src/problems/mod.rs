//! Test problems: random and BVP quadratics, and nonquadratic functions.

mod functions;
mod quadratic;

use std::collections::BTreeMap;
use std::fmt;

pub use functions::TestFunction;
pub use quadratic::{
    make_bvp_quadratic, make_random_quadratic, Operator, QuadraticProblem, SpectrumBlock,
    SpectrumSpec,
};

use crate::error::{Error, Result};
use crate::numerics::Rng;

/// A smooth objective with an analytic gradient.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn start(&self) -> Vec<f64>;
    fn known_minimum(&self) -> Option<f64> {
        None
    }
}

/// Two-dimensional Rosenbrock `c (x2 - x1^2)^2 + (1 - x1)^2`, started at `(-1.2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    pub c: f64,
}

impl Rosenbrock {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput(format!("Rosenbrock c must be positive, got {c}")));
        }
        Ok(Self { c })
    }
}

impl Objective for Rosenbrock {
    fn name(&self) -> &str {
        "Rosenbrock"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.c * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let t = 2.0 * self.c * (x[1] - x[0] * x[0]);
        vec![-2.0 * x[0] * t - 2.0 * (1.0 - x[0]), t]
    }

    fn start(&self) -> Vec<f64> {
        vec![-1.2, 1.0]
    }

    fn known_minimum(&self) -> Option<f64> {
        Some(0.0)
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, ' ' | '_' | '-'))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Names of every registered nonquadratic function.
pub fn available_functions() -> Vec<String> {
    functions::ENTRIES.iter().map(|e| e.name.to_string()).collect()
}

/// Names of the twelve functions in the standard comparison set.
pub fn core_functions() -> Vec<String> {
    functions::ENTRIES.iter().filter(|e| e.core).map(|e| e.name.to_string()).collect()
}

/// Looks a function up by name, ignoring case, spaces, `_` and `-`.
///
/// `n` overrides the default dimension.
pub fn lookup(name: &str, n: Option<usize>) -> Result<TestFunction> {
    let key = normalize(name);
    let entry = functions::ENTRIES
        .iter()
        .find(|e| normalize(e.name) == key)
        .ok_or_else(|| Error::UnknownFunction {
            name: name.to_string(),
            available: available_functions(),
        })?;
    let n = n.unwrap_or(entry.default_n);
    if !entry.accepts(n) {
        return Err(Error::InvalidInput(format!(
            "{} needs n >= {} and a multiple of {}, got {n}",
            entry.name, entry.min_n, entry.multiple_of
        )));
    }
    Ok(entry.build(n))
}

/// Largest per-coordinate discrepancy between the analytic gradient and central
/// differences, relative to `max(1, |g_i|)`.
///
/// With `Some(h)` a single step `h max(1, |x_i|)` is used. With `None` each
/// coordinate takes the best of steps `1e-6 .. 1` (scaled the same way), which
/// keeps badly scaled functions from failing on roundoff alone.
pub fn check_gradient<O: Objective + ?Sized>(f: &O, x: &[f64], h: Option<f64>) -> Result<f64> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let g = f.gradient(x);
    let ladder: Vec<f64> = match h {
        Some(h) if h > 0.0 && h.is_finite() => vec![h],
        Some(h) => return Err(Error::InvalidInput(format!("step must be positive, got {h}"))),
        None => (0..=6).map(|p| 10f64.powi(-6 + p)).collect(),
    };
    let mut xp = x.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let scale = x[i].abs().max(1.0);
        let mut best = f64::INFINITY;
        for (rung, &step) in ladder.iter().enumerate() {
            let hi = step * scale;
            xp[i] = x[i] + hi;
            let fp = f.value(&xp);
            xp[i] = x[i] - hi;
            let fm = f.value(&xp);
            xp[i] = x[i];
            if !(fp.is_finite() && fm.is_finite()) {
                if rung == 0 {
                    return Err(Error::Evaluation);
                }
                continue;
            }
            let fd = (fp - fm) / (2.0 * hi);
            best = best.min((g[i] - fd).abs() / g[i].abs().max(1.0));
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Which family a [`ProblemSpec`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Quadratic,
    Bvp,
    Rosenbrock,
    Function,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Quadratic => "quadratic",
            ProblemKind::Bvp => "bvp",
            ProblemKind::Rosenbrock => "rosenbrock",
            ProblemKind::Function => "function",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quadratic" => Ok(ProblemKind::Quadratic),
            "bvp" => Ok(ProblemKind::Bvp),
            "rosenbrock" => Ok(ProblemKind::Rosenbrock),
            "function" => Ok(ProblemKind::Function),
            other => Err(Error::Config(format!("unknown problem kind `{other}`"))),
        }
    }
}

/// Serializable description of one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: Option<usize>,
    pub kappa: Option<f64>,
    pub distribution_id: Option<u8>,
    pub seed: Option<u64>,
    pub c: Option<f64>,
    pub name: Option<String>,
}

impl ProblemSpec {
    pub fn quadratic(distribution_id: u8, kappa: f64, n: usize, seed: u64) -> Self {
        Self {
            kind: ProblemKind::Quadratic,
            n: Some(n),
            kappa: Some(kappa),
            distribution_id: Some(distribution_id),
            seed: Some(seed),
            c: None,
            name: None,
        }
    }

    pub fn bvp(n: usize, seed: u64) -> Self {
        Self {
            kind: ProblemKind::Bvp,
            n: Some(n),
            kappa: None,
            distribution_id: None,
            seed: Some(seed),
            c: None,
            name: None,
        }
    }

    pub fn rosenbrock(c: f64) -> Self {
        Self {
            kind: ProblemKind::Rosenbrock,
            n: Some(2),
            kappa: None,
            distribution_id: None,
            seed: None,
            c: Some(c),
            name: None,
        }
    }

    pub fn function(name: &str, n: Option<usize>) -> Self {
        Self {
            kind: ProblemKind::Function,
            n,
            kappa: None,
            distribution_id: None,
            seed: None,
            c: None,
            name: Some(name.to_string()),
        }
    }

    /// Key-value form, one `key=value` per line, keys sorted.
    pub fn to_kv(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("kind", self.kind.as_str().to_string());
        if let Some(n) = self.n {
            m.insert("n", n.to_string());
        }
        if let Some(k) = self.kappa {
            m.insert("kappa", format!("{k:e}"));
        }
        if let Some(d) = self.distribution_id {
            m.insert("distribution_id", d.to_string());
        }
        if let Some(s) = self.seed {
            m.insert("seed", s.to_string());
        }
        if let Some(c) = self.c {
            m.insert("c", format!("{c:e}"));
        }
        if let Some(name) = &self.name {
            m.insert("name", name.clone());
        }
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut m = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{line}`")))?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        fn parse<T: std::str::FromStr>(m: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
            m.get(key)
                .map(|v| v.parse().map_err(|_| Error::Config(format!("bad value for {key}: `{v}`"))))
                .transpose()
        }
        for k in m.keys() {
            if !matches!(k.as_str(), "kind" | "n" | "kappa" | "distribution_id" | "seed" | "c" | "name") {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        let kind: ProblemKind = m
            .get("kind")
            .ok_or_else(|| Error::Config("missing key `kind`".into()))?
            .parse()?;
        Ok(Self {
            kind,
            n: parse(&m, "n")?,
            kappa: parse(&m, "kappa")?,
            distribution_id: parse(&m, "distribution_id")?,
            seed: parse(&m, "seed")?,
            c: parse(&m, "c")?,
            name: m.get("name").cloned(),
        })
    }

    fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn build(&self) -> Result<Problem> {
        match self.kind {
            ProblemKind::Quadratic => {
                let spec = SpectrumSpec::new(
                    Self::need(self.distribution_id, "distribution_id")?,
                    Self::need(self.kappa, "kappa")?,
                    Self::need(self.n, "n")?,
                );
                let mut rng = Rng::seed_from(Self::need(self.seed, "seed")?);
                Ok(Problem::Quadratic(make_random_quadratic(&spec, &mut rng)?))
            }
            ProblemKind::Bvp => {
                let mut rng = Rng::seed_from(Self::need(self.seed, "seed")?);
                Ok(Problem::Quadratic(make_bvp_quadratic(Self::need(self.n, "n")?, &mut rng)?))
            }
            ProblemKind::Rosenbrock => Ok(Problem::Rosenbrock(Rosenbrock::new(Self::need(self.c, "c")?)?)),
            ProblemKind::Function => {
                let name = self.name.as_deref().ok_or_else(|| Error::Config("missing key `name`".into()))?;
                Ok(Problem::Function(lookup(name, self.n)?))
            }
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_kv())
    }
}

/// A built problem instance.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(QuadraticProblem),
    Rosenbrock(Rosenbrock),
    Function(TestFunction),
}

impl Problem {
    pub fn as_objective(&self) -> &dyn Objective {
        match self {
            Problem::Quadratic(q) => q,
            Problem::Rosenbrock(r) => r,
            Problem::Function(t) => t,
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadraticProblem> {
        match self {
            Problem::Quadratic(q) => Some(q),
            _ => None,
        }
    }
}
