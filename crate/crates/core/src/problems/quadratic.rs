//! Strictly convex quadratics `f(x) = 1/2 (x - x*)^T A (x - x*)`.

use crate::error::{Error, Result};
use crate::numerics::{unit_random_vector, HouseholderChain, LinearOperator, Rng, Tridiagonal};
use crate::problems::Objective;

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Householder(HouseholderChain),
    Tridiagonal(Tridiagonal),
}

impl LinearOperator for Operator {
    fn dim(&self) -> usize {
        match self {
            Operator::Householder(h) => h.dim(),
            Operator::Tridiagonal(t) => t.dim(),
        }
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Operator::Householder(h) => h.apply_into(v, out),
            Operator::Tridiagonal(t) => t.apply_into(v, out),
        }
    }

    fn eigen_bounds(&self) -> (f64, f64) {
        match self {
            Operator::Householder(h) => h.eigen_bounds(),
            Operator::Tridiagonal(t) => t.eigen_bounds(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    id: String,
    operator: Operator,
    minimizer: Vec<f64>,
    start: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(
        id: impl Into<String>,
        operator: Operator,
        minimizer: Vec<f64>,
        start: Vec<f64>,
    ) -> Result<Self> {
        let n = operator.dim();
        for v in [&minimizer, &start] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let (lo, _) = operator.eigen_bounds();
        if !(lo > 0.0) {
            return Err(Error::InvalidInput("operator is not positive definite".into()));
        }
        Ok(Self { id: id.into(), operator, minimizer, start })
    }

    /// `diag(d)` with minimizer `x*`, started from the origin.
    pub fn diagonal(d: Vec<f64>, minimizer: Vec<f64>) -> Result<Self> {
        let n = d.len();
        Self::new(
            format!("diag-n{n}"),
            Operator::Householder(HouseholderChain::diagonal(d)?),
            minimizer,
            vec![0.0; n],
        )
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Result<Self> {
        if start.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: start.len() });
        }
        self.start = start;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = self.operator.eigen_bounds();
        hi / lo
    }

    /// `A v`
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.operator.apply_into(v, out);
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.minimizer).map(|(a, b)| a - b).collect()
    }
}

impl Objective for QuadraticProblem {
    fn name(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.operator.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        let mut ar = vec![0.0; r.len()];
        self.operator.apply_into(&r, &mut ar);
        0.5 * r.iter().zip(&ar).map(|(a, b)| a * b).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = self.residual(x);
        let mut g = vec![0.0; r.len()];
        self.operator.apply_into(&r, &mut g);
        g
    }

    fn start(&self) -> Vec<f64> {
        self.start.clone()
    }

    fn known_minimum(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// One of the seven block-structured spectra. `v_1 = 1`, `v_n = kappa`,
/// interior values uniform on open intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub distribution: u8,
    pub kappa: f64,
    pub n: usize,
}

/// A run of eigenvalues `v_first ..= v_last` (1-based) drawn from `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBlock {
    pub first: usize,
    pub last: usize,
    pub lo: f64,
    pub hi: f64,
}

impl SpectrumSpec {
    pub fn new(distribution: u8, kappa: f64, n: usize) -> Self {
        Self { distribution, kappa, n }
    }

    /// Interior blocks for this distribution, validated to be nonempty and
    /// properly ordered.
    pub fn blocks(&self) -> Result<Vec<SpectrumBlock>> {
        let (n, k) = (self.n, self.kappa);
        if n < 3 {
            return Err(Error::InvalidInput(format!("spectrum needs n >= 3, got {n}")));
        }
        if !(k > 1.0) || !k.is_finite() {
            return Err(Error::InvalidInput(format!("kappa must exceed 1, got {k}")));
        }
        let b = |first, last, lo, hi| SpectrumBlock { first, last, lo, hi };
        let (low, high) = ((1.0, 100.0), (k / 2.0, k));
        let two = |split: usize| {
            vec![b(2, split, low.0, low.1), b(split + 1, n - 1, high.0, high.1)]
        };
        let blocks = match self.distribution {
            1 => vec![b(2, n - 1, 1.0, k)],
            2 => two(n / 5),
            3 => two(n / 2),
            4 => two(4 * n / 5),
            5 => vec![
                b(2, n / 5, low.0, low.1),
                b(n / 5 + 1, 4 * n / 5, 100.0, k / 2.0),
                b(4 * n / 5 + 1, n - 1, high.0, high.1),
            ],
            6 => two(10),
            7 => two(n.saturating_sub(10)),
            d => {
                return Err(Error::InvalidInput(format!(
                    "spectral distribution must be in 1..=7, got {d}"
                )))
            }
        };
        for blk in &blocks {
            if blk.first > blk.last || blk.last > n - 1 || blk.first < 2 {
                return Err(Error::InvalidInput(format!(
                    "distribution {} leaves an empty eigenvalue block at n = {n}",
                    self.distribution
                )));
            }
            if !(blk.lo < blk.hi) || blk.hi > k {
                return Err(Error::InvalidInput(format!(
                    "distribution {} needs interval ({}, {}) inside (1, kappa = {k})",
                    self.distribution, blk.lo, blk.hi
                )));
            }
        }
        Ok(blocks)
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<Vec<f64>> {
        let blocks = self.blocks()?;
        let mut v = vec![0.0; self.n];
        v[0] = 1.0;
        v[self.n - 1] = self.kappa;
        for blk in blocks {
            for slot in &mut v[blk.first - 1..blk.last] {
                *slot = rng.uniform_open(blk.lo, blk.hi);
            }
        }
        Ok(v)
    }
}

/// Random quadratic with Householder-rotated prescribed spectrum, started
/// at the origin.
///
/// Draw order from `rng`: eigenvalues `v_2..v_{n-1}`, reflectors
/// `w_1, w_2, w_3`, then `x*` uniform on `[-10, 10]^n`.
pub fn make_random_quadratic(spec: &SpectrumSpec, rng: &mut Rng) -> Result<QuadraticProblem> {
    let diag = spec.sample(rng)?;
    let n = spec.n;
    let reflectors = (0..3)
        .map(|_| unit_random_vector(rng, n))
        .collect::<Result<Vec<_>>>()?;
    let minimizer: Vec<f64> = (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect();
    let op = Operator::Householder(HouseholderChain::new(reflectors, diag)?);
    let id = format!("quad-d{}-n{}-k{:e}", spec.distribution, n, spec.kappa);
    QuadraticProblem::new(id, op, minimizer, vec![0.0; n])
}

/// Finite-difference Laplacian quadratic on `n` points with `h = 11 / n`,
/// random `x*` on `[-10, 10]^n` and start at the all-ones vector.
pub fn make_bvp_quadratic(n: usize, rng: &mut Rng) -> Result<QuadraticProblem> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("boundary value problem needs n >= 2, got {n}")));
    }
    let h = 11.0 / n as f64;
    let h2 = h * h;
    let op = Operator::Tridiagonal(Tridiagonal::new(n, 2.0 / h2, -1.0 / h2)?);
    let minimizer: Vec<f64> = (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect();
    QuadraticProblem::new(format!("bvp-n{n}"), op, minimizer, vec![1.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_one_bounds() {
        let mut rng = Rng::seed_from(1);
        let spec = SpectrumSpec::new(1, 1e4, 100);
        let v = spec.sample(&mut rng).unwrap();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[99], 1e4);
        assert!(v[1..99].iter().all(|&x| x > 1.0 && x < 1e4));
    }

    #[test]
    fn distribution_three_blocks() {
        let mut rng = Rng::seed_from(2);
        let spec = SpectrumSpec::new(3, 1e4, 100);
        let v = spec.sample(&mut rng).unwrap();
        // v_2..v_50 in (1, 100), v_51..v_99 in (kappa/2, kappa)
        assert!(v[1..50].iter().all(|&x| x > 1.0 && x < 100.0));
        assert!(v[50..99].iter().all(|&x| x > 5e3 && x < 1e4));
    }

    #[test]
    fn every_distribution_respects_blocks() {
        for d in 1..=7u8 {
            for seed in 0..100 {
                let spec = SpectrumSpec::new(d, 1e3, 100);
                let v = spec.sample(&mut Rng::seed_from(seed)).unwrap();
                assert_eq!(v[0], 1.0);
                assert_eq!(v[99], 1e3);
                let blocks = spec.blocks().unwrap();
                let covered: usize = blocks.iter().map(|b| b.last - b.first + 1).sum();
                assert_eq!(covered, 98, "distribution {d}");
                for b in blocks {
                    for &x in &v[b.first - 1..b.last] {
                        assert!(x > b.lo && x < b.hi, "d={d} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn spectrum_errors() {
        assert!(SpectrumSpec::new(8, 1e3, 100).blocks().is_err());
        assert!(SpectrumSpec::new(0, 1e3, 100).blocks().is_err());
        assert!(SpectrumSpec::new(1, 1e3, 2).blocks().is_err());
        assert!(SpectrumSpec::new(1, 0.5, 10).blocks().is_err());
        assert!(SpectrumSpec::new(5, 150.0, 100).blocks().is_err());
        assert!(SpectrumSpec::new(6, 1e3, 10).blocks().is_err());
        assert!(SpectrumSpec::new(2, 1e3, 8).blocks().is_err());
    }

    #[test]
    fn random_quadratic_minimizer_has_zero_gradient() {
        let mut rng = Rng::seed_from(9);
        for d in 1..=7 {
            let p = make_random_quadratic(&SpectrumSpec::new(d, 1e4, 100), &mut rng).unwrap();
            let g = p.gradient(p.minimizer());
            assert!(g.iter().all(|x| x.abs() <= 1e-10));
            assert!(p.minimizer().iter().all(|x| (-10.0..=10.0).contains(x)));
            assert!((p.condition_estimate() - 1e4).abs() < 1e-9);
            for _ in 0..5 {
                let x: Vec<f64> = (0..100).map(|_| rng.uniform(-20.0, 20.0)).collect();
                assert!(p.value(&x) >= 0.0);
            }
        }
    }

    #[test]
    fn regeneration_is_deterministic() {
        let spec = SpectrumSpec::new(2, 1e3, 50);
        let a = make_random_quadratic(&spec, &mut Rng::seed_from(77)).unwrap();
        let b = make_random_quadratic(&spec, &mut Rng::seed_from(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bvp_operator() {
        let mut rng = Rng::seed_from(0);
        let p = make_bvp_quadratic(11, &mut rng).unwrap();
        match p.operator() {
            Operator::Tridiagonal(t) => {
                assert_eq!(t.diag_value(), 2.0);
                assert_eq!(t.off_value(), -1.0);
            }
            _ => panic!("expected tridiagonal operator"),
        }
        assert_eq!(p.start(), &[1.0; 11][..]);
        assert!(make_bvp_quadratic(1, &mut rng).is_err());
    }
}
