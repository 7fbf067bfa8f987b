//! Gauss-Legendre quadrature on intervals and on the square `[0, pi]^2`.
//!
//! The inner products appearing in the reduced bifurcation equations are
//! integrals of smooth trigonometric expressions, so a fixed tensor-product
//! Gauss rule with 96 nodes per axis evaluates them to near machine
//! precision.

/// Default node count per axis for closed-form inner products.
pub const DEFAULT_NODES: usize = 96;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Newton iteration on P_n starting from the Chebyshev-based guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    // Map from [-1, 1]; flip so nodes come out ascending.
    let mapped: Vec<f64> = nodes.iter().rev().map(|&x| mid + half * x).collect();
    let scaled: Vec<f64> = weights.iter().rev().map(|&w| w * half).collect();
    (mapped, scaled)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of `f` over `[a, b]` with an `n`-point Gauss rule.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n, a, b);
    x.iter().zip(&w).map(|(&xi, &wi)| wi * f(xi)).sum()
}

/// Integral of `f(x, y)` over `[0, pi]^2` with an `n`-by-`n` tensor rule.
pub fn integrate_square<F: Fn(f64, f64) -> f64>(f: F, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n, 0.0, std::f64::consts::PI);
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let mut row = 0.0;
        for (j, &yj) in x.iter().enumerate() {
            row += w[j] * f(xi, yj);
        }
        total += w[i] * row;
    }
    total
}
