//! Nonquadratic test functions with analytic gradients.
//!
//! Formulas follow the standard unconstrained collections (Moré-Garbow-
//! Hillstrom, Andrei's 2008 collection, CUTE). Where a name has several
//! published variants, the one used here is written out on the function.

use crate::problems::Objective;

type ValueFn = fn(&[f64]) -> f64;
type GradFn = fn(&[f64], &mut [f64]);

/// A registered test function at a fixed dimension.
#[derive(Clone)]
pub struct TestFunction {
    name: &'static str,
    n: usize,
    start: Vec<f64>,
    value: ValueFn,
    grad: GradFn,
    minimum: Option<f64>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).field("n", &self.n).finish()
    }
}

impl Objective for TestFunction {
    fn name(&self) -> &str {
        self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        (self.grad)(x, &mut g);
        g
    }

    fn start(&self) -> Vec<f64> {
        self.start.clone()
    }

    fn known_minimum(&self) -> Option<f64> {
        self.minimum
    }
}

/// Registry entry: canonical name, default dimension, dimension rule,
/// start pattern (repeated cyclically), value, gradient and known minimum.
pub(crate) struct Entry {
    pub name: &'static str,
    pub default_n: usize,
    /// Dimension must be a multiple of this.
    pub multiple_of: usize,
    pub min_n: usize,
    pub start: &'static [f64],
    pub value: ValueFn,
    pub grad: GradFn,
    pub minimum: Option<f64>,
    /// Member of the mandatory core set.
    pub core: bool,
}

impl Entry {
    pub fn build(&self, n: usize) -> TestFunction {
        let start = (0..n).map(|i| self.start[i % self.start.len()]).collect();
        TestFunction {
            name: self.name,
            n,
            start,
            value: self.value,
            grad: self.grad,
            minimum: self.minimum,
        }
    }

    pub fn accepts(&self, n: usize) -> bool {
        n >= self.min_n && n % self.multiple_of == 0
    }
}

macro_rules! entry {
    ($name:expr, $n:expr, $mult:expr, $min:expr, $start:expr, $f:ident, $g:ident, $fmin:expr, $core:expr) => {
        Entry {
            name: $name,
            default_n: $n,
            multiple_of: $mult,
            min_n: $min,
            start: $start,
            value: $f,
            grad: $g,
            minimum: $fmin,
            core: $core,
        }
    };
}

pub(crate) static ENTRIES: &[Entry] = &[
    entry!("Almost Perturbed Quadratic", 100, 1, 2, &[0.5], apq_f, apq_g, Some(0.0), true),
    entry!("BIGGSB1", 100, 1, 2, &[0.0], biggsb1_f, biggsb1_g, Some(0.0), false),
    entry!("CUBE", 2, 1, 2, &[-1.2, 1.0], cube_f, cube_g, Some(0.0), false),
    entry!("Diagonal4", 100, 2, 2, &[1.0], diag4_f, diag4_g, Some(0.0), true),
    entry!("Dixon Price", 100, 1, 2, &[1.0], dixon_price_f, dixon_price_g, Some(0.0), true),
    entry!("DIXON3DQ", 100, 1, 3, &[-1.0], dixon3dq_f, dixon3dq_g, Some(0.0), true),
    entry!("DQDRTIC", 100, 1, 3, &[3.0], dqdrtic_f, dqdrtic_g, Some(0.0), true),
    entry!("DIXMAANI", 100, 1, 3, &[2.0], dixmaan_i_f, dixmaan_i_g, Some(1.0), false),
    entry!("DIXMAANJ", 100, 1, 3, &[2.0], dixmaan_j_f, dixmaan_j_g, Some(1.0), false),
    entry!("DIXMAANK", 100, 1, 3, &[2.0], dixmaan_k_f, dixmaan_k_g, Some(1.0), false),
    entry!("DIXMAANL", 100, 1, 3, &[2.0], dixmaan_l_f, dixmaan_l_g, Some(1.0), false),
    entry!("DIXMAANM", 100, 1, 3, &[2.0], dixmaan_m_f, dixmaan_m_g, Some(1.0), false),
    entry!("DIXMAANN", 100, 1, 3, &[2.0], dixmaan_n_f, dixmaan_n_g, Some(1.0), false),
    entry!("DIXMAANP", 100, 1, 3, &[2.0], dixmaan_p_f, dixmaan_p_g, Some(1.0), false),
    entry!("Extended DENSCHNF", 100, 2, 2, &[2.0, 0.0], denschnf_f, denschnf_g, Some(0.0), false),
    entry!("Extended Himmelblau", 100, 2, 2, &[1.0], ext_himmelblau_f, ext_himmelblau_g, Some(0.0), true),
    entry!("Extended White Holst", 100, 2, 2, &[-1.2, 1.0], white_holst_f, white_holst_g, Some(0.0), false),
    entry!("Extended Powell", 100, 4, 4, &[3.0, -1.0, 0.0, 1.0], ext_powell_f, ext_powell_g, Some(0.0), false),
    entry!("Extended Rosenbrock", 50, 2, 2, &[-1.2, 1.0], ext_rosenbrock_f, ext_rosenbrock_g, Some(0.0), true),
    entry!("Extended Beale", 100, 2, 2, &[1.0, 0.8], ext_beale_f, ext_beale_g, Some(0.0), true),
    entry!("Extended quadratic penalty QP2", 100, 1, 2, &[1.0], qp2_f, qp2_g, None, false),
    entry!("FLETCHCR", 50, 1, 2, &[0.0], fletchcr_f, fletchcr_g, Some(0.0), false),
    entry!("Generalized Rosenbrock", 10, 1, 2, &[-1.2, 1.0], gen_rosenbrock_f, gen_rosenbrock_g, Some(0.0), true),
    entry!("HIMMELBG", 100, 2, 2, &[1.5], himmelbg_f, himmelbg_g, Some(0.0), false),
    entry!("LIARWHD", 100, 1, 1, &[4.0], liarwhd_f, liarwhd_g, Some(0.0), true),
    entry!("MCCORMCK", 100, 1, 2, &[1.0], mccormck_f, mccormck_g, None, false),
    entry!("NONSCOMP", 100, 1, 2, &[3.0], nonscomp_f, nonscomp_g, Some(0.0), false),
    entry!("NONDIA", 100, 1, 2, &[-1.0], nondia_f, nondia_g, Some(0.0), true),
    entry!("Perturbed Quadratic", 100, 1, 1, &[0.5], pq_f, pq_g, Some(0.0), false),
    entry!("Perturbed QuadraticDiagonal", 100, 1, 1, &[0.5], pqd_f, pqd_g, Some(0.0), false),
    entry!("Perturbed Tridiagonal Quadratic", 100, 1, 3, &[0.5], ptq_f, ptq_g, Some(0.0), false),
    entry!("POWER", 2000, 1, 1, &[1.0], power_f, power_g, Some(0.0), true),
    entry!("Staircase1", 100, 1, 2, &[1.0], staircase1_f, staircase1_g, None, false),
];

// -- Almost Perturbed Quadratic: sum i x_i^2 + (x_1 + x_n)^2 / 100

fn apq_f(x: &[f64]) -> f64 {
    let n = x.len();
    let s: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum();
    s + (x[0] + x[n - 1]).powi(2) / 100.0
}

fn apq_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    for (i, (gi, v)) in g.iter_mut().zip(x).enumerate() {
        *gi = 2.0 * (i + 1) as f64 * v;
    }
    let c = 2.0 * (x[0] + x[n - 1]) / 100.0;
    g[0] += c;
    g[n - 1] += c;
}

// -- Perturbed Quadratic: sum i x_i^2 + (sum x_i)^2 / 100

fn pq_f(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum::<f64>() + s * s / 100.0
}

fn pq_g(x: &[f64], g: &mut [f64]) {
    let s: f64 = x.iter().sum();
    for (i, (gi, v)) in g.iter_mut().zip(x).enumerate() {
        *gi = 2.0 * (i + 1) as f64 * v + 2.0 * s / 100.0;
    }
}

// -- Perturbed Quadratic Diagonal: (sum x_i)^2 + sum (i / 100) x_i^2

fn pqd_f(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    s * s + x.iter().enumerate().map(|(i, v)| (i + 1) as f64 / 100.0 * v * v).sum::<f64>()
}

fn pqd_g(x: &[f64], g: &mut [f64]) {
    let s: f64 = x.iter().sum();
    for (i, (gi, v)) in g.iter_mut().zip(x).enumerate() {
        *gi = 2.0 * s + 2.0 * (i + 1) as f64 / 100.0 * v;
    }
}

// -- Perturbed Tridiagonal Quadratic:
//    x_1^2 + sum_{i=2}^{n-1} [ i x_i^2 + (x_{i-1} + x_i + x_{i+1})^2 ]

fn ptq_f(x: &[f64]) -> f64 {
    let n = x.len();
    let mut f = x[0] * x[0];
    for i in 1..n - 1 {
        let t = x[i - 1] + x[i] + x[i + 1];
        f += (i + 1) as f64 * x[i] * x[i] + t * t;
    }
    f
}

fn ptq_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.fill(0.0);
    g[0] = 2.0 * x[0];
    for i in 1..n - 1 {
        let t = 2.0 * (x[i - 1] + x[i] + x[i + 1]);
        g[i] += 2.0 * (i + 1) as f64 * x[i] + t;
        g[i - 1] += t;
        g[i + 1] += t;
    }
}

// -- BIGGSB1: (x_1 - 1)^2 + sum (x_{i+1} - x_i)^2 + (1 - x_n)^2

fn biggsb1_f(x: &[f64]) -> f64 {
    let n = x.len();
    let inner: f64 = x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    (x[0] - 1.0).powi(2) + inner + (1.0 - x[n - 1]).powi(2)
}

fn biggsb1_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.fill(0.0);
    g[0] += 2.0 * (x[0] - 1.0);
    for i in 0..n - 1 {
        let d = 2.0 * (x[i + 1] - x[i]);
        g[i + 1] += d;
        g[i] -= d;
    }
    g[n - 1] -= 2.0 * (1.0 - x[n - 1]);
}

// -- CUBE, chained: (x_1 - 1)^2 + sum_{i>=2} 100 (x_i - x_{i-1}^3)^2.
//    At n = 2 this is the classical 100 (x_2 - x_1^3)^2 + (1 - x_1)^2.

fn cube_f(x: &[f64]) -> f64 {
    (x[0] - 1.0).powi(2) + x.windows(2).map(|w| 100.0 * (w[1] - w[0].powi(3)).powi(2)).sum::<f64>()
}

fn cube_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 1..x.len() {
        let t = 200.0 * (x[i] - x[i - 1].powi(3));
        g[i] += t;
        g[i - 1] -= t * 3.0 * x[i - 1] * x[i - 1];
    }
}

// -- Extended White & Holst: sum over pairs 100 (x_2i - x_{2i-1}^3)^2 + (1 - x_{2i-1})^2

fn white_holst_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| 100.0 * (p[1] - p[0].powi(3)).powi(2) + (1.0 - p[0]).powi(2))
        .sum()
}

fn white_holst_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let t = 200.0 * (p[1] - p[0].powi(3));
        q[0] = -t * 3.0 * p[0] * p[0] - 2.0 * (1.0 - p[0]);
        q[1] = t;
    }
}

// -- Diagonal 4: sum over pairs 1/2 (x_{2i-1}^2 + 100 x_{2i}^2)

fn diag4_f(x: &[f64]) -> f64 {
    x.chunks_exact(2).map(|p| 0.5 * (p[0] * p[0] + 100.0 * p[1] * p[1])).sum()
}

fn diag4_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        q[0] = p[0];
        q[1] = 100.0 * p[1];
    }
}

// -- Dixon & Price: (x_1 - 1)^2 + sum_{i>=2} i (2 x_i^2 - x_{i-1})^2

fn dixon_price_f(x: &[f64]) -> f64 {
    let tail: f64 = (1..x.len())
        .map(|i| (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]).powi(2))
        .sum();
    (x[0] - 1.0).powi(2) + tail
}

fn dixon_price_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 1..x.len() {
        let t = 2.0 * (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]);
        g[i] += t * 4.0 * x[i];
        g[i - 1] -= t;
    }
}

// -- DIXON3DQ: (x_1 - 1)^2 + sum_{i=2}^{n-1} (x_i - x_{i+1})^2 + (x_n - 1)^2

fn dixon3dq_f(x: &[f64]) -> f64 {
    let n = x.len();
    let mid: f64 = (1..n - 1).map(|i| (x[i] - x[i + 1]).powi(2)).sum();
    (x[0] - 1.0).powi(2) + mid + (x[n - 1] - 1.0).powi(2)
}

fn dixon3dq_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.fill(0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 1..n - 1 {
        let d = 2.0 * (x[i] - x[i + 1]);
        g[i] += d;
        g[i + 1] -= d;
    }
    g[n - 1] += 2.0 * (x[n - 1] - 1.0);
}

// -- DQDRTIC: sum_{i=1}^{n-2} (x_i^2 + 100 x_{i+1}^2 + 100 x_{i+2}^2)

fn dqdrtic_f(x: &[f64]) -> f64 {
    x.windows(3).map(|w| w[0] * w[0] + 100.0 * w[1] * w[1] + 100.0 * w[2] * w[2]).sum()
}

fn dqdrtic_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    for i in 0..x.len() - 2 {
        g[i] += 2.0 * x[i];
        g[i + 1] += 200.0 * x[i + 1];
        g[i + 2] += 200.0 * x[i + 2];
    }
}

// -- DIXMAAN family, n = 3m:
//    1 + sum a x_i^2 (i/n)^k1
//      + sum_{i<n} b x_i^2 (x_{i+1} + x_{i+1}^2)^2 (i/n)^k2
//      + sum_{i<=2m} c x_i^2 x_{i+m}^4 (i/n)^k3
//      + sum_{i<=m} d x_i x_{i+2m} (i/n)^k4
//    I-L use exponents (2, 0, 0, 2); M-P use (2, 1, 1, 2) as in CUTE.

#[derive(Clone, Copy)]
struct Dixmaan {
    coef: [f64; 4],
    pow: [i32; 4],
}

const DIXMAAN_I: Dixmaan = Dixmaan { coef: [1.0, 0.0, 0.125, 0.125], pow: [2, 0, 0, 2] };
const DIXMAAN_J: Dixmaan = Dixmaan { coef: [1.0, 0.0625, 0.0625, 0.0625], pow: [2, 0, 0, 2] };
const DIXMAAN_K: Dixmaan = Dixmaan { coef: [1.0, 0.125, 0.125, 0.125], pow: [2, 0, 0, 2] };
const DIXMAAN_L: Dixmaan = Dixmaan { coef: [1.0, 0.26, 0.26, 0.26], pow: [2, 0, 0, 2] };
const DIXMAAN_M: Dixmaan = Dixmaan { coef: [1.0, 0.0, 0.125, 0.125], pow: [2, 1, 1, 2] };
const DIXMAAN_N: Dixmaan = Dixmaan { coef: [1.0, 0.0625, 0.0625, 0.0625], pow: [2, 1, 1, 2] };
const DIXMAAN_P: Dixmaan = Dixmaan { coef: [1.0, 0.26, 0.26, 0.26], pow: [2, 1, 1, 2] };

impl Dixmaan {
    fn weight(&self, term: usize, i: usize, n: usize) -> f64 {
        ((i + 1) as f64 / n as f64).powi(self.pow[term])
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let m = n / 3;
        let [a, b, c, d] = self.coef;
        let mut f = 1.0;
        for i in 0..n {
            f += a * x[i] * x[i] * self.weight(0, i, n);
        }
        for i in 0..n - 1 {
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            f += b * x[i] * x[i] * u * u * self.weight(1, i, n);
        }
        for i in 0..2 * m {
            f += c * x[i] * x[i] * x[i + m].powi(4) * self.weight(2, i, n);
        }
        for i in 0..m {
            f += d * x[i] * x[i + 2 * m] * self.weight(3, i, n);
        }
        f
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let n = x.len();
        let m = n / 3;
        let [a, b, c, d] = self.coef;
        g.fill(0.0);
        for i in 0..n {
            g[i] += 2.0 * a * x[i] * self.weight(0, i, n);
        }
        for i in 0..n - 1 {
            let w = b * self.weight(1, i, n);
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            g[i] += 2.0 * w * x[i] * u * u;
            g[i + 1] += 2.0 * w * x[i] * x[i] * u * (1.0 + 2.0 * x[i + 1]);
        }
        for i in 0..2 * m {
            let w = c * self.weight(2, i, n);
            g[i] += 2.0 * w * x[i] * x[i + m].powi(4);
            g[i + m] += 4.0 * w * x[i] * x[i] * x[i + m].powi(3);
        }
        for i in 0..m {
            let w = d * self.weight(3, i, n);
            g[i] += w * x[i + 2 * m];
            g[i + 2 * m] += w * x[i];
        }
    }
}

macro_rules! dixmaan_fns {
    ($($params:ident => $f:ident, $g:ident;)*) => {$(
        fn $f(x: &[f64]) -> f64 {
            $params.value(x)
        }
        fn $g(x: &[f64], g: &mut [f64]) {
            $params.gradient(x, g)
        }
    )*};
}

dixmaan_fns! {
    DIXMAAN_I => dixmaan_i_f, dixmaan_i_g;
    DIXMAAN_J => dixmaan_j_f, dixmaan_j_g;
    DIXMAAN_K => dixmaan_k_f, dixmaan_k_g;
    DIXMAAN_L => dixmaan_l_f, dixmaan_l_g;
    DIXMAAN_M => dixmaan_m_f, dixmaan_m_g;
    DIXMAAN_N => dixmaan_n_f, dixmaan_n_g;
    DIXMAAN_P => dixmaan_p_f, dixmaan_p_g;
}

// -- Extended DENSCHNF, per pair (u, v):
//    (2 (u + v)^2 + (u - v)^2 - 8)^2 + (5 u^2 + (v - 3)^2 - 9)^2

fn denschnf_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| {
            let (u, v) = (p[0], p[1]);
            let t1 = 2.0 * (u + v).powi(2) + (u - v).powi(2) - 8.0;
            let t2 = 5.0 * u * u + (v - 3.0).powi(2) - 9.0;
            t1 * t1 + t2 * t2
        })
        .sum()
}

fn denschnf_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let (u, v) = (p[0], p[1]);
        let t1 = 2.0 * (u + v).powi(2) + (u - v).powi(2) - 8.0;
        let t2 = 5.0 * u * u + (v - 3.0).powi(2) - 9.0;
        q[0] = 2.0 * t1 * (4.0 * (u + v) + 2.0 * (u - v)) + 2.0 * t2 * 10.0 * u;
        q[1] = 2.0 * t1 * (4.0 * (u + v) - 2.0 * (u - v)) + 2.0 * t2 * 2.0 * (v - 3.0);
    }
}

// -- Extended Himmelblau, per pair: (u^2 + v - 11)^2 + (u + v^2 - 7)^2

fn ext_himmelblau_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| (p[0] * p[0] + p[1] - 11.0).powi(2) + (p[0] + p[1] * p[1] - 7.0).powi(2))
        .sum()
}

fn ext_himmelblau_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let a = p[0] * p[0] + p[1] - 11.0;
        let b = p[0] + p[1] * p[1] - 7.0;
        q[0] = 4.0 * p[0] * a + 2.0 * b;
        q[1] = 2.0 * a + 4.0 * p[1] * b;
    }
}

// -- Extended Powell singular, per block of four (a, b, c, d):
//    (a + 10 b)^2 + 5 (c - d)^2 + (b - 2 c)^4 + 10 (a - d)^4

fn ext_powell_f(x: &[f64]) -> f64 {
    x.chunks_exact(4)
        .map(|p| {
            (p[0] + 10.0 * p[1]).powi(2)
                + 5.0 * (p[2] - p[3]).powi(2)
                + (p[1] - 2.0 * p[2]).powi(4)
                + 10.0 * (p[0] - p[3]).powi(4)
        })
        .sum()
}

fn ext_powell_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(4).zip(g.chunks_exact_mut(4)) {
        let t1 = p[0] + 10.0 * p[1];
        let t2 = p[2] - p[3];
        let t3 = (p[1] - 2.0 * p[2]).powi(3);
        let t4 = (p[0] - p[3]).powi(3);
        q[0] = 2.0 * t1 + 40.0 * t4;
        q[1] = 20.0 * t1 + 4.0 * t3;
        q[2] = 10.0 * t2 - 8.0 * t3;
        q[3] = -10.0 * t2 - 40.0 * t4;
    }
}

// -- Extended Rosenbrock, per pair: 100 (x_2i - x_{2i-1}^2)^2 + (1 - x_{2i-1})^2

fn ext_rosenbrock_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| 100.0 * (p[1] - p[0] * p[0]).powi(2) + (1.0 - p[0]).powi(2))
        .sum()
}

fn ext_rosenbrock_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let t = 200.0 * (p[1] - p[0] * p[0]);
        q[0] = -2.0 * p[0] * t - 2.0 * (1.0 - p[0]);
        q[1] = t;
    }
}

// -- Generalized Rosenbrock: sum_{i<n} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2

fn gen_rosenbrock_f(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

fn gen_rosenbrock_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    for i in 0..x.len() - 1 {
        let t = 200.0 * (x[i + 1] - x[i] * x[i]);
        g[i] += -2.0 * x[i] * t - 2.0 * (1.0 - x[i]);
        g[i + 1] += t;
    }
}

// -- Extended Beale, per pair (u, v):
//    (1.5 - u(1 - v))^2 + (2.25 - u(1 - v^2))^2 + (2.625 - u(1 - v^3))^2

fn ext_beale_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| {
            let (u, v) = (p[0], p[1]);
            (1.5 - u * (1.0 - v)).powi(2)
                + (2.25 - u * (1.0 - v * v)).powi(2)
                + (2.625 - u * (1.0 - v * v * v)).powi(2)
        })
        .sum()
}

fn ext_beale_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let (u, v) = (p[0], p[1]);
        let t1 = 1.5 - u * (1.0 - v);
        let t2 = 2.25 - u * (1.0 - v * v);
        let t3 = 2.625 - u * (1.0 - v * v * v);
        q[0] = -2.0 * (t1 * (1.0 - v) + t2 * (1.0 - v * v) + t3 * (1.0 - v * v * v));
        q[1] = 2.0 * u * (t1 + 2.0 * t2 * v + 3.0 * t3 * v * v);
    }
}

// -- Extended quadratic penalty QP2:
//    sum_{i<n} (x_i^2 - sin x_i)^2 + (sum x_i^2 - 100)^2

fn qp2_f(x: &[f64]) -> f64 {
    let n = x.len();
    let s: f64 = x.iter().map(|v| v * v).sum();
    x[..n - 1].iter().map(|v| (v * v - v.sin()).powi(2)).sum::<f64>() + (s - 100.0).powi(2)
}

fn qp2_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    let s: f64 = x.iter().map(|v| v * v).sum();
    for i in 0..n {
        g[i] = 4.0 * (s - 100.0) * x[i];
        if i < n - 1 {
            g[i] += 2.0 * (x[i] * x[i] - x[i].sin()) * (2.0 * x[i] - x[i].cos());
        }
    }
}

// -- FLETCHCR: sum_{i<n} 100 (x_{i+1} - x_i + 1 - x_i^2)^2

fn fletchcr_f(x: &[f64]) -> f64 {
    x.windows(2).map(|w| 100.0 * (w[1] - w[0] + 1.0 - w[0] * w[0]).powi(2)).sum()
}

fn fletchcr_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    for i in 0..x.len() - 1 {
        let t = 200.0 * (x[i + 1] - x[i] + 1.0 - x[i] * x[i]);
        g[i + 1] += t;
        g[i] += t * (-1.0 - 2.0 * x[i]);
    }
}

// -- HIMMELBG, per pair: (2 u^2 + 3 v^2) exp(-u - v)

fn himmelbg_f(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| (2.0 * p[0] * p[0] + 3.0 * p[1] * p[1]) * (-p[0] - p[1]).exp())
        .sum()
}

fn himmelbg_g(x: &[f64], g: &mut [f64]) {
    for (p, q) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let e = (-p[0] - p[1]).exp();
        let r = 2.0 * p[0] * p[0] + 3.0 * p[1] * p[1];
        q[0] = e * (4.0 * p[0] - r);
        q[1] = e * (6.0 * p[1] - r);
    }
}

// -- LIARWHD: sum 4 (x_i^2 - x_1)^2 + sum (x_i - 1)^2

fn liarwhd_f(x: &[f64]) -> f64 {
    x.iter().map(|v| 4.0 * (v * v - x[0]).powi(2) + (v - 1.0).powi(2)).sum()
}

fn liarwhd_g(x: &[f64], g: &mut [f64]) {
    let mut g0 = 0.0;
    for (gi, v) in g.iter_mut().zip(x) {
        let t = 8.0 * (v * v - x[0]);
        *gi = t * 2.0 * v + 2.0 * (v - 1.0);
        g0 -= t;
    }
    g[0] += g0;
}

// -- MCCORMCK: sum_{i<n} -1.5 x_i + 2.5 x_{i+1} + 1 + (x_i - x_{i+1})^2 + sin(x_i + x_{i+1})

fn mccormck_f(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| -1.5 * w[0] + 2.5 * w[1] + 1.0 + (w[0] - w[1]).powi(2) + (w[0] + w[1]).sin())
        .sum()
}

fn mccormck_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    for i in 0..x.len() - 1 {
        let d = 2.0 * (x[i] - x[i + 1]);
        let c = (x[i] + x[i + 1]).cos();
        g[i] += -1.5 + d + c;
        g[i + 1] += 2.5 - d + c;
    }
}

// -- NONSCOMP: (x_1 - 1)^2 + sum_{i>=2} 4 (x_i - x_{i-1}^2)^2

fn nonscomp_f(x: &[f64]) -> f64 {
    (x[0] - 1.0).powi(2) + x.windows(2).map(|w| 4.0 * (w[1] - w[0] * w[0]).powi(2)).sum::<f64>()
}

fn nonscomp_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 1..x.len() {
        let t = 8.0 * (x[i] - x[i - 1] * x[i - 1]);
        g[i] += t;
        g[i - 1] -= t * 2.0 * x[i - 1];
    }
}

// -- NONDIA: (x_1 - 1)^2 + sum_{i>=2} 100 (x_1 - x_{i-1}^2)^2

fn nondia_f(x: &[f64]) -> f64 {
    let n = x.len();
    (x[0] - 1.0).powi(2) + x[..n - 1].iter().map(|v| 100.0 * (x[0] - v * v).powi(2)).sum::<f64>()
}

fn nondia_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.fill(0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 0..n - 1 {
        let t = 200.0 * (x[0] - x[i] * x[i]);
        g[0] += t;
        g[i] -= t * 2.0 * x[i];
    }
}

// -- POWER: sum (i x_i)^2

fn power_f(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| ((i + 1) as f64 * v).powi(2)).sum()
}

fn power_g(x: &[f64], g: &mut [f64]) {
    for (i, (gi, v)) in g.iter_mut().zip(x).enumerate() {
        let c = (i + 1) as f64;
        *gi = 2.0 * c * c * v;
    }
}

// -- Staircase S1: sum_{i<n} (x_i + x_{i+1} - i)^2

fn staircase1_f(x: &[f64]) -> f64 {
    x.windows(2).enumerate().map(|(i, w)| (w[0] + w[1] - (i + 1) as f64).powi(2)).sum()
}

fn staircase1_g(x: &[f64], g: &mut [f64]) {
    g.fill(0.0);
    for i in 0..x.len() - 1 {
        let t = 2.0 * (x[i] + x[i + 1] - (i + 1) as f64);
        g[i] += t;
        g[i + 1] += t;
    }
}
