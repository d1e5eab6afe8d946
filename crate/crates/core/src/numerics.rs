//! Dense vector kernels, matrix-free symmetric operators and the seeded
//! generator shared by every other module.
//!
//! All arithmetic is `f64`. Operators are immutable once built and can be
//! shared between worker threads; the generator is single-owner.

use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(dot_unchecked(a, b))
}

pub fn norm2(a: &[f64]) -> f64 {
    dot_unchecked(a, a).sqrt()
}

/// `alpha * a + b`
pub fn axpy(alpha: f64, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| alpha * x + y).collect())
}

#[inline]
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A symmetric linear map applied without assembling its matrix.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A v` into `out`. Both slices have length `dim()`.
    fn apply_into(&self, v: &[f64], out: &mut [f64]);

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), v.len())?;
        let mut out = vec![0.0; v.len()];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// Smallest and largest eigenvalue, when known in closed form.
    fn eigen_bounds(&self) -> (f64, f64);
}

/// `A = Q diag(v) Q^T` with `Q = H_k ... H_2 H_1` and `H_i = I - 2 w_i w_i^T`.
///
/// An empty reflector list gives `Q = I`, i.e. a plain diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderChain {
    reflectors: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

const UNIT_TOL: f64 = 1e-12;

impl HouseholderChain {
    pub fn new(reflectors: Vec<Vec<f64>>, diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        if let Some(bad) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "eigenvalues must be finite and positive, found {bad}"
            )));
        }
        for w in &reflectors {
            check_len(diag.len(), w.len())?;
            let nrm = norm2(w);
            if (nrm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!(
                    "reflector is not a unit vector (norm {nrm})"
                )));
            }
        }
        Ok(Self { reflectors, diag })
    }

    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), diag)
    }

    pub fn reflectors(&self) -> &[Vec<f64>] {
        &self.reflectors
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    fn reflect(w: &[f64], v: &mut [f64]) {
        let c = 2.0 * dot_unchecked(w, v);
        for (vi, wi) in v.iter_mut().zip(w) {
            *vi -= c * wi;
        }
    }
}

impl LinearOperator for HouseholderChain {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
        // Q^T = H_1 H_2 ... H_k: the last reflector acts first.
        for w in self.reflectors.iter().rev() {
            Self::reflect(w, out);
        }
        for (o, d) in out.iter_mut().zip(&self.diag) {
            *o *= d;
        }
        for w in &self.reflectors {
            Self::reflect(w, out);
        }
    }

    fn eigen_bounds(&self) -> (f64, f64) {
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Symmetric tridiagonal Toeplitz operator: `diag` on the main diagonal,
/// `off` on both neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    n: usize,
    diag: f64,
    off: f64,
}

impl Tridiagonal {
    pub fn new(n: usize, diag: f64, off: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("operator dimension must be >= 1".into()));
        }
        Ok(Self { n, diag, off })
    }

    pub fn diag_value(&self) -> f64 {
        self.diag
    }

    pub fn off_value(&self) -> f64 {
        self.off
    }

    /// Eigenvalue `k` (1-based) of the Toeplitz matrix:
    /// `diag + 2 off cos(k pi / (n + 1))`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let theta = k as f64 * std::f64::consts::PI / (self.n as f64 + 1.0);
        self.diag + 2.0 * self.off * theta.cos()
    }
}

impl LinearOperator for Tridiagonal {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut acc = self.diag * v[i];
            if i > 0 {
                acc += self.off * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off * v[i + 1];
            }
            out[i] = acc;
        }
    }

    fn eigen_bounds(&self) -> (f64, f64) {
        let a = self.eigenvalue(1);
        let b = self.eigenvalue(self.n);
        (a.min(b), a.max(b))
    }
}

/// Seeded generator: xoshiro256++ whose 256-bit state is expanded from a
/// `u64` seed with SplitMix64 (the reference seeding procedure).
///
/// Uniform doubles take the top 53 bits of `next_u64`; normals use the
/// `rand_distr` ziggurat sampler on the same stream.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: Xoshiro256PlusPlus,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th independent stream under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

impl Rng {
    pub fn seed_from(seed: u64) -> Self {
        Self { inner: Xoshiro256PlusPlus::seed_from_u64(seed) }
    }

    pub fn for_run(master: u64, index: u64) -> Self {
        Self::seed_from(derive_seed(master, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform on the open interval `(lo, hi)`; redraws the endpoints.
    pub fn uniform_open(&mut self, lo: f64, hi: f64) -> f64 {
        loop {
            let v = self.uniform(lo, hi);
            if v > lo && v < hi {
                return v;
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

/// Direction drawn uniformly on the unit sphere in `R^n`.
pub fn unit_random_vector(rng: &mut Rng, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("vector length must be >= 1".into()));
    }
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let nrm = norm2(&v);
        if nrm > 0.0 && nrm.is_finite() {
            v.iter_mut().for_each(|x| *x /= nrm);
            return Ok(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_from_chain(chain: &HouseholderChain) -> Vec<Vec<f64>> {
        let n = chain.dim();
        // Q column by column: Q e_j = H_k ... H_1 e_j
        let mut q = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            for w in chain.reflectors() {
                let c = 2.0 * w.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>();
                for i in 0..n {
                    e[i] -= c * w[i];
                }
            }
            for i in 0..n {
                q[i][j] = e[i];
            }
        }
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..n).map(|k| q[i][k] * chain.diag()[k] * q[j][k]).sum();
            }
        }
        a
    }

    fn random_chain(rng: &mut Rng, n: usize) -> HouseholderChain {
        let refl = (0..3).map(|_| unit_random_vector(rng, n).unwrap()).collect();
        let diag = (0..n).map(|_| rng.uniform(1.0, 1000.0)).collect();
        HouseholderChain::new(refl, diag).unwrap()
    }

    #[test]
    fn vector_kernels() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert_eq!(axpy(2.0, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), vec![2.0, 1.0]);
        assert!(matches!(dot(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        assert!(axpy(1.0, &[1.0], &[]).is_err());
    }

    #[test]
    fn identity_spectrum_gives_identity() {
        let mut rng = Rng::seed_from(3);
        let refl = (0..3).map(|_| unit_random_vector(&mut rng, 7).unwrap()).collect();
        let chain = HouseholderChain::new(refl, vec![1.0; 7]).unwrap();
        let v: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        let av = chain.apply(&v).unwrap();
        for (a, b) in av.iter().zip(&v) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn empty_chain_is_diagonal() {
        let chain = HouseholderChain::diagonal(vec![7.0, 1.0]).unwrap();
        assert_eq!(chain.apply(&[1.0, 1.0]).unwrap(), vec![7.0, 1.0]);
    }

    #[test]
    fn chain_matches_dense_matrix() {
        let mut rng = Rng::seed_from(11);
        for &n in &[2usize, 13, 50, 100] {
            let chain = random_chain(&mut rng, n);
            let a = dense_from_chain(&chain);
            let v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let av = chain.apply(&v).unwrap();
            for i in 0..n {
                let expect: f64 = (0..n).map(|j| a[i][j] * v[j]).sum();
                assert!((av[i] - expect).abs() <= 1e-10, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn chain_is_self_adjoint_with_bounded_rayleigh_quotient() {
        let mut rng = Rng::seed_from(5);
        let chain = random_chain(&mut rng, 40);
        let (lo, hi) = chain.eigen_bounds();
        for _ in 0..20 {
            let u: Vec<f64> = (0..40).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let v: Vec<f64> = (0..40).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let lhs = dot(&chain.apply(&u).unwrap(), &v).unwrap();
            let rhs = dot(&u, &chain.apply(&v).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
            let rq = dot(&u, &chain.apply(&u).unwrap()).unwrap() / dot(&u, &u).unwrap();
            assert!(rq >= lo * (1.0 - 1e-12) && rq <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn chain_rejects_bad_input() {
        assert!(HouseholderChain::new(vec![vec![1.0, 1.0]], vec![1.0, 2.0]).is_err());
        assert!(HouseholderChain::diagonal(vec![1.0, 0.0]).is_err());
        assert!(HouseholderChain::diagonal(vec![]).is_err());
        let chain = HouseholderChain::diagonal(vec![1.0, 2.0]).unwrap();
        assert!(chain.apply(&[1.0]).is_err());
    }

    #[test]
    fn tridiagonal_apply() {
        let t = Tridiagonal::new(4, 2.0, -1.0).unwrap();
        let out = t.apply(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(out, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn unit_vectors() {
        let mut rng = Rng::seed_from(1);
        let v = unit_random_vector(&mut rng, 1).unwrap();
        assert_eq!(v[0].abs(), 1.0);
        let a = unit_random_vector(&mut Rng::seed_from(99), 1000).unwrap();
        let b = unit_random_vector(&mut Rng::seed_from(99), 1000).unwrap();
        assert_eq!(a, b);
        assert!((norm2(&a) - 1.0).abs() < 1e-12);
        assert!(unit_random_vector(&mut rng, 0).is_err());

        let n = 10_000;
        let big = unit_random_vector(&mut Rng::seed_from(7), n).unwrap();
        let mean = big.iter().sum::<f64>() / n as f64;
        // entries have standard deviation 1/sqrt(n)
        assert!(mean.abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn derived_streams_differ() {
        let a = Rng::for_run(42, 0).next_u64();
        let b = Rng::for_run(42, 1).next_u64();
        assert_ne!(a, b);
        assert_eq!(Rng::for_run(42, 1).next_u64(), b);
        let mut r = Rng::seed_from(0);
        for _ in 0..1000 {
            let u = r.uniform_open(1.0, 2.0);
            assert!(u > 1.0 && u < 2.0);
        }
    }
}
