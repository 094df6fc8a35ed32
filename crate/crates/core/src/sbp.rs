//! Legendre-Gauss-Lobatto collocation operators with the summation-by-parts
//! property `Q + Q^T = B`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::MeshError;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct SbpOperatorSet {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Row-major `(N+1) x (N+1)` differentiation matrix.
    d: Vec<f64>,
}

impl SbpOperatorSet {
    /// LGL operators of degree `n >= 1`, built once per degree and shared.
    pub fn lgl(n: usize) -> Result<Arc<Self>, MeshError> {
        if n < 1 {
            return Err(MeshError::InvalidDegree(n));
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SbpOperatorSet>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        Ok(map.entry(n).or_insert_with(|| Arc::new(Self::build_lgl(n))).clone())
    }

    /// One-node operator (node 0, weight 2, `D = 0`). With it the DGSEM
    /// reduces to first-order finite volumes.
    pub fn single_node() -> Arc<Self> {
        Arc::new(Self { degree: 0, nodes: vec![0.0], weights: vec![2.0], d: vec![0.0] })
    }

    fn build_lgl(n: usize) -> Self {
        let nodes = lgl_nodes(n);
        let weights = nodes
            .iter()
            .map(|&x| {
                let (p, _) = legendre(n, x);
                2.0 / ((n * (n + 1)) as f64 * p * p)
            })
            .collect();
        let d = differentiation_matrix(&nodes);
        Self { degree: n, nodes, weights, d }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.nodes.len() + j]
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.weights[i] * self.d(i, j)
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        let last = self.nodes.len() - 1;
        match (i == j, i) {
            (true, 0) if last > 0 => -1.0,
            (true, i) if i == last && last > 0 => 1.0,
            _ => 0.0,
        }
    }

    /// `max |Q + Q^T - B|` over all entries.
    pub fn sbp_residual(&self) -> f64 {
        let m = self.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((self.q(i, j) + self.q(j, i) - self.b(i, j)).abs());
            }
        }
        worst
    }

    /// Applies `D` to nodal values.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        let m = self.len();
        assert_eq!(values.len(), m);
        (0..m).map(|i| (0..m).map(|j| self.d(i, j) * values[j]).sum()).collect()
    }
}

/// `P_n(x)` and `P_{n-1}(x)` by the three-term recursion.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `(1 - x^2) P_n'(x) / n = P_{n-1}(x) - x P_n(x)`, zero exactly at the LGL nodes.
fn lobatto_polynomial(n: usize, x: f64) -> f64 {
    let (p, p_prev) = legendre(n, x);
    p_prev - x * p
}

fn lgl_nodes(n: usize) -> Vec<f64> {
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let mut converged = true;
    for (j, node) in nodes.iter_mut().enumerate().take(n).skip(1) {
        // Chebyshev-Gauss-Lobatto initial guess.
        let mut x = -(std::f64::consts::PI * j as f64 / n as f64).cos();
        let mut ok = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p_prev) = legendre(n, x);
            let step = (x * p - p_prev) / ((n + 1) as f64 * p);
            x -= step;
            if step.abs() <= NEWTON_TOL {
                ok = true;
                break;
            }
        }
        converged &= ok;
        *node = x;
    }
    if !converged {
        nodes = lgl_nodes_bisection(n);
    }
    // exact symmetry about the origin
    for j in 0..=n / 2 {
        let s = 0.5 * (nodes[n - j] - nodes[j]);
        nodes[j] = -s;
        nodes[n - j] = s;
    }
    if n.is_multiple_of(2) {
        nodes[n / 2] = 0.0;
    }
    nodes
}

/// Interior-and-end LGL nodes by sign-change bracketing and bisection of
/// `P_N'`; the slow fallback of the Newton iteration.
pub fn lgl_nodes_bisection(n: usize) -> Vec<f64> {
    let samples = 64 * n;
    let mut nodes = vec![-1.0];
    let grid = |k: usize| -1.0 + 2.0 * k as f64 / samples as f64;
    for k in 1..samples - 1 {
        let (mut a, mut b) = (grid(k), grid(k + 1));
        let (mut fa, fb) = (lobatto_polynomial(n, a), lobatto_polynomial(n, b));
        if fa == 0.0 {
            nodes.push(a);
            continue;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        while b - a > 4.0 * f64::EPSILON {
            let mid = 0.5 * (a + b);
            let fm = lobatto_polynomial(n, mid);
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        nodes.push(0.5 * (a + b));
    }
    nodes.push(1.0);
    nodes
}

fn differentiation_matrix(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let bary: Vec<f64> = (0..m)
        .map(|j| 1.0 / (0..m).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product::<f64>())
        .collect();
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut diag = 0.0;
        for j in 0..m {
            if i != j {
                let v = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                d[i * m + j] = v;
                diag -= v;
            }
        }
        d[i * m + i] = diag;
    }
    d
}
