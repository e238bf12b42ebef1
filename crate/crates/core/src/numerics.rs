//! Special functions and quadrature primitives shared by the higher modules:
//! physicists' Hermite polynomials, Gauss-Hermite rules, the closed form of
//! the Hermite-times-shifted-Gaussian integral, and chirped (oscillatory)
//! 1D quadrature with node-doubling convergence control.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Guard radius around the `alpha^2 = 1` singularity of the closed-form
/// Hermite-Gaussian integral.
pub const BRANCH_EPS: f64 = 1e-10;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Truncation range, node count, and tolerance governing numeric integrals.
///
/// `half_width` is the truncation limit (the integrand must have decayed
/// below `abs_tol` at the ends), `nodes_per_axis` the starting trapezoid
/// resolution, and `abs_tol` the absolute tolerance enforced by node
/// doubling.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureSpec {
    pub half_width: f64,
    pub nodes_per_axis: usize,
    pub abs_tol: f64,
}

impl QuadratureSpec {
    pub fn new(half_width: f64, nodes_per_axis: usize, abs_tol: f64) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if nodes_per_axis < 2 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "nodes_per_axis must be >= 2, got {nodes_per_axis}"
            )));
        }
        if !abs_tol.is_finite() || abs_tol <= 0.0 {
            return Err(Error::InvalidQuadratureSpec(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        Ok(Self { half_width, nodes_per_axis, abs_tol })
    }

    /// Same spec on a different truncation range.
    pub fn with_half_width(self, half_width: f64) -> Self {
        Self { half_width, ..self }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { half_width: 12.0, nodes_per_axis: 4096, abs_tol: 1e-9 }
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{k+1}(x) = 2x H_k(x) - 2k H_{k-1}(x)`.
pub fn hermite_poly(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("hermite_poly argument"));
    }
    Ok(hermite_rec(n, x))
}

pub(crate) fn hermite_rec(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n` extended to complex argument by the same recurrence.
pub(crate) fn hermite_rec_complex(n: u32, z: Complex64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed form of `integral H_n(alpha y) exp(-(y - beta)^2) dy` over the real
/// line:
///
/// `sqrt(pi) (1 - alpha^2)^(n/2) H_n(alpha beta / sqrt(1 - alpha^2))`
///
/// using the principal branch of the complex square root. The value is
/// insensitive to the branch choice (for odd `n` the sign of the root cancels
/// against the odd parity of `H_n`), but it degenerates at `alpha^2 = 1`
/// where the error path tells the caller to integrate directly.
pub fn hermite_gaussian_integral(n: u32, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::NonFinite("hermite_gaussian_integral alpha"));
    }
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::NonFinite("hermite_gaussian_integral beta"));
    }
    if n == 0 {
        return Ok(Complex64::new(SQRT_PI, 0.0));
    }
    let one_minus_a2 = Complex64::new(1.0, 0.0) - alpha * alpha;
    if one_minus_a2.norm() < BRANCH_EPS {
        return Err(Error::DegenerateBranch(one_minus_a2.norm()));
    }
    let root = one_minus_a2.sqrt();
    let arg = alpha * beta / root;
    Ok(SQRT_PI * root.powi(n as i32) * hermite_rec_complex(n, arg))
}

/// Orthonormal Hermite functions at `x`: returns `(h_n, h_{n-1})` where
/// `h_k = H_k / sqrt(2^k k! sqrt(pi))`. Values stay O(1) near the nodes, so
/// the recurrence never overflows even at order 200.
fn hermite_orthonormal_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Christoffel number `1 / sum_{k<n} h_k(x)^2` of the order-`n` rule.
fn christoffel_weight(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum = cur * cur;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
    }
    1.0 / sum
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`.
///
/// Golub-Welsch eigenvalues of the Jacobi matrix seed the nodes, which are
/// then polished to machine precision by Newton steps on the orthonormal
/// Hermite function (`h_n' = sqrt(2n) h_{n-1}`); weights are the Christoffel
/// numbers. A rule of the given order integrates polynomials of degree
/// `2*order - 1` exactly against the weight.
pub fn gauss_hermite_rule(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > 200 {
        return Err(Error::QuadratureOrder(order));
    }
    if order == 1 {
        return Ok((vec![0.0], vec![SQRT_PI]));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 0..order - 1 {
        let off = ((k as f64 + 1.0) / 2.0).sqrt();
        jacobi[(k, k + 1)] = off;
        jacobi[(k + 1, k)] = off;
    }
    let eigen = jacobi.symmetric_eigen();
    let mut nodes: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let slope = (2.0 * order as f64).sqrt();
    for x in &mut nodes {
        for _ in 0..3 {
            let (hn, hn1) = hermite_orthonormal_pair(order, *x);
            let step = hn / (slope * hn1);
            *x -= step;
            if step.abs() < 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    // fold out residual asymmetry: nodes come in +/- pairs
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let node = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -node;
        nodes[j] = node;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    let weights = nodes.iter().map(|&x| christoffel_weight(order, x)).collect();
    Ok((nodes, weights))
}

/// Trapezoid sum of `g` over `[-w, w]` with `m` intervals, reusing `prev`
/// (the sum at `m/2` intervals) when given.
fn trapezoid_step<G: Fn(f64) -> Complex64>(g: &G, w: f64, m: usize, prev: Option<Complex64>) -> Complex64 {
    let h = 2.0 * w / m as f64;
    match prev {
        None => {
            let mut acc = 0.5 * (g(-w) + g(w));
            for k in 1..m {
                acc += g(-w + k as f64 * h);
            }
            acc * h
        }
        Some(coarse) => {
            // new nodes are the midpoints of the coarse intervals
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (1..m).step_by(2) {
                acc += g(-w + k as f64 * h);
            }
            0.5 * coarse + acc * h
        }
    }
}

const MAX_DOUBLINGS: usize = 8;

pub(crate) fn refine_integral<G: Fn(f64) -> Complex64>(
    g: &G,
    half_width: f64,
    start_intervals: usize,
    abs_tol: f64,
) -> Result<Complex64> {
    let mut m = start_intervals.max(2).next_power_of_two();
    let mut cur = trapezoid_step(g, half_width, m, None);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        m *= 2;
        let next = trapezoid_step(g, half_width, m, Some(cur));
        change = (next - cur).norm();
        cur = next;
        if change <= abs_tol {
            return Ok(cur);
        }
    }
    if change > 10.0 * abs_tol {
        return Err(Error::NonConvergence { change, tol: abs_tol });
    }
    Ok(cur)
}

/// `integral f(x) exp(i (a x^2 / 2 + b x)) dx` truncated to
/// `[-half_width, half_width]`, for a callable integrand that has decayed
/// below `abs_tol` at the ends.
///
/// Uniform trapezoid nodes with node-doubling convergence control; the chirp
/// defeats polynomial exactness, so Gauss rules would buy nothing here. For
/// `a = 0` this is a plain Fourier-type integral.
pub fn oscillatory_line_integral<F>(f: F, chirp_a: f64, linear_b: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !chirp_a.is_finite() || !linear_b.is_finite() {
        return Err(Error::NonFinite("oscillatory_line_integral phase coefficient"));
    }
    let g = |x: f64| f(x) * Complex64::new(0.0, 0.5 * chirp_a * x * x + linear_b * x).exp();
    refine_integral(&g, spec.half_width, spec.nodes_per_axis, spec.abs_tol)
}

/// Chirp-weighted trapezoid sum of already-sampled values: the sampled
/// counterpart of [`oscillatory_line_integral`].
///
/// `values[k]` sits at `x_k = x0 + k step`. No refinement is possible on
/// fixed samples, so instead the per-step phase advance of the kernel is
/// checked against the Nyquist limit and the call is rejected if the chirp
/// is undersampled.
pub fn chirp_weighted_sum(
    values: &[Complex64],
    x0: f64,
    step: f64,
    chirp_a: f64,
    linear_b: f64,
) -> Result<Complex64> {
    if values.len() < 2 {
        return Err(Error::InvalidGrid("need at least 2 samples".into()));
    }
    let x_end = x0 + step * (values.len() - 1) as f64;
    let max_rate = (chirp_a * x0 + linear_b).abs().max((chirp_a * x_end + linear_b).abs());
    let phase_step = max_rate * step;
    if phase_step > std::f64::consts::PI {
        return Err(Error::ChirpUndersampled(phase_step));
    }
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        let x = x0 + k as f64 * step;
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * v * Complex64::new(0.0, 0.5 * chirp_a * x * x + linear_b * x).exp();
    }
    Ok(acc * step)
}

/// `ln(n!)` by direct summation; exact enough for normalization factors.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn hermite_low_orders() {
        assert_abs_diff_eq!(hermite_poly(0, 3.7).unwrap(), 1.0);
        assert_abs_diff_eq!(hermite_poly(1, 2.0).unwrap(), 4.0);
        assert_abs_diff_eq!(hermite_poly(2, 1.0).unwrap(), 2.0);
        assert!(hermite_poly(3, f64::NAN).is_err());
    }

    #[test]
    fn hermite_recurrence_consistency() {
        for n in 1..=25u32 {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let lhs = hermite_rec(n + 1, x);
                let rhs = 2.0 * x * hermite_rec(n, x) - 2.0 * n as f64 * hermite_rec(n - 1, x);
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                assert!(
                    (lhs - rhs).abs() / scale < 1e-9,
                    "recurrence broke at n={n}, x={x}"
                );
            }
        }
    }

    /// Independent oracle: plain trapezoid of H_n(alpha y) exp(-(y-beta)^2)
    /// on a wide fixed grid.
    fn hgi_brute(n: u32, alpha: Complex64, beta: Complex64) -> Complex64 {
        let m = 1 << 15;
        let w = 14.0 + beta.re.abs();
        let h = 2.0 * w / m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=m {
            let y = -w + k as f64 * h;
            let d = Complex64::new(y, 0.0) - beta;
            let v = hermite_rec_complex(n, alpha * y) * (-d * d).exp();
            acc += if k == 0 || k == m { 0.5 * v } else { v };
        }
        acc * h
    }

    #[test]
    fn hermite_gaussian_integral_examples() {
        // n = 0: plain Gaussian integral regardless of alpha
        let v = hermite_gaussian_integral(0, Complex64::new(0.9, 0.2), Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, SQRT_PI, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);

        // n = 1: 2 alpha beta sqrt(pi), cross-checked against the brute oracle
        let v = hermite_gaussian_integral(1, Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let oracle = hgi_brute(1, Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(v.re, SQRT_PI, epsilon = 1e-10);
        assert_abs_diff_eq!(v.re, oracle.re, epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, oracle.im, epsilon = 1e-9);

        // n = 2, alpha = 0.3, beta = 0: sqrt(pi) * 0.91 * H2(0) = -3.2259
        let v = hermite_gaussian_integral(2, Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let oracle = hgi_brute(2, Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(v.re, -3.225_866_008_648_039, epsilon = 1e-10);
        assert_abs_diff_eq!(v.re, oracle.re, epsilon = 1e-9);
    }

    #[test]
    fn hermite_gaussian_integral_vs_quadrature_grid() {
        // n <= 6, real and complex alpha, |beta| <= 3
        for n in 0..=6u32 {
            for &ai in &[0.0, 0.25, 0.5] {
                for &ar in &[-0.9, -0.4, 0.1, 0.6, 0.9] {
                    for &br in &[-3.0, -1.0, 0.0, 2.0] {
                        let alpha = Complex64::new(ar, ai);
                        let beta = Complex64::new(br, 0.3);
                        let closed = hermite_gaussian_integral(n, alpha, beta).unwrap();
                        let brute = hgi_brute(n, alpha, beta);
                        assert!(
                            (closed - brute).norm() < 1e-8,
                            "mismatch n={n} alpha={alpha} beta={beta}: {closed} vs {brute}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hermite_gaussian_integral_degenerate_branch() {
        let alpha = Complex64::new(1.0, 0.0);
        assert!(matches!(
            hermite_gaussian_integral(2, alpha, Complex64::new(0.5, 0.0)),
            Err(Error::DegenerateBranch(_))
        ));
        // n = 0 stays well defined on the singular set
        assert!(hermite_gaussian_integral(0, alpha, Complex64::new(0.5, 0.0)).is_ok());
    }

    #[test]
    fn gauss_hermite_small_rules() {
        let (nodes, weights) = gauss_hermite_rule(1).unwrap();
        assert_eq!(nodes, vec![0.0]);
        assert_abs_diff_eq!(weights[0], SQRT_PI, epsilon = 1e-14);

        let (nodes, weights) = gauss_hermite_rule(2).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(nodes[0], -r, epsilon = 1e-14);
        assert_abs_diff_eq!(nodes[1], r, epsilon = 1e-14);
        assert_abs_diff_eq!(weights[0], SQRT_PI / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(weights[1], SQRT_PI / 2.0, epsilon = 1e-14);

        assert!(gauss_hermite_rule(0).is_err());
        assert!(gauss_hermite_rule(201).is_err());
    }

    #[test]
    fn gauss_hermite_moment_exactness() {
        // integral x^{2k} e^{-x^2} = sqrt(pi) (2k-1)!! / 2^k, exact for
        // 2k <= 2*order - 2 on an order-point rule.
        for &order in &[1usize, 2, 3, 5, 8, 12, 20, 40] {
            let (nodes, weights) = gauss_hermite_rule(order).unwrap();
            let total: f64 = weights.iter().sum();
            assert_relative_eq!(total, SQRT_PI, epsilon = 1e-12);
            let mut moment = SQRT_PI;
            let mut k = 0usize;
            while 2 * (k + 1) <= 2 * order - 2 {
                k += 1;
                moment *= (2.0 * k as f64 - 1.0) / 2.0;
                let quad: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &w)| w * x.powi(2 * k as i32))
                    .sum();
                assert_relative_eq!(quad, moment, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn oscillatory_examples() {
        let spec = QuadratureSpec::default();
        let gauss = |x: f64| Complex64::new((-x * x).exp(), 0.0);

        let v = oscillatory_line_integral(gauss, 0.0, 0.0, &spec).unwrap();
        assert_abs_diff_eq!(v.re, SQRT_PI, epsilon = 1e-10);

        // Fourier of a Gaussian: sqrt(pi) e^{-b^2/4}
        let v = oscillatory_line_integral(gauss, 0.0, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(v.re, SQRT_PI * (-0.25f64).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-10);

        // chirped Gaussian: integral e^{-(1-i)x^2} = sqrt(pi/(1-i)), principal root
        let v = oscillatory_line_integral(gauss, 2.0, 0.0, &spec).unwrap();
        let expect = (Complex64::new(std::f64::consts::PI, 0.0) / Complex64::new(1.0, -1.0)).sqrt();
        assert_abs_diff_eq!(v.re, expect.re, epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, expect.im, epsilon = 1e-10);
    }

    #[test]
    fn oscillatory_rejects_unresolvable_chirp() {
        // a chirp far beyond what the doubling budget can resolve
        let spec = QuadratureSpec::new(12.0, 64, 1e-12).unwrap();
        let f = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        assert!(matches!(
            oscillatory_line_integral(f, 5e4, 0.0, &spec),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn oscillatory_refinement_stability() {
        // doubling nodes of an already-converged integral moves it by < abs_tol
        let spec = QuadratureSpec::new(12.0, 2048, 1e-9).unwrap();
        let doubled = QuadratureSpec::new(12.0, 4096, 1e-9).unwrap();
        let f = |x: f64| Complex64::new((-x * x).exp() * (1.0 + 0.3 * x), 0.0);
        let a = oscillatory_line_integral(f, 1.0, 0.5, &spec).unwrap();
        let b = oscillatory_line_integral(f, 1.0, 0.5, &doubled).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn chirp_sum_matches_callable_route_and_guards_nyquist() {
        let n = 4096usize;
        let x0 = -12.0;
        let step = 24.0 / (n - 1) as f64;
        let samples: Vec<Complex64> = (0..n)
            .map(|k| {
                let x = x0 + k as f64 * step;
                Complex64::new((-x * x).exp(), 0.0)
            })
            .collect();
        let s = chirp_weighted_sum(&samples, x0, step, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.re, SQRT_PI * (-0.25f64).exp(), epsilon = 1e-9);

        assert!(matches!(
            chirp_weighted_sum(&samples, x0, step, 5000.0, 0.0),
            Err(Error::ChirpUndersampled(_))
        ));
    }

    proptest! {
        /// Linearity in f and conjugate symmetry: flipping the signs of
        /// (a, b) conjugates the integral of a real integrand.
        #[test]
        fn oscillatory_linear_and_conjugate_symmetric(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            c1 in -2.0f64..2.0,
            c2 in -2.0f64..2.0,
        ) {
            let spec = QuadratureSpec::new(12.0, 1024, 1e-9).unwrap();
            let f1 = |x: f64| Complex64::new((-x * x).exp(), 0.0);
            let f2 = |x: f64| Complex64::new(x * (-x * x).exp(), 0.0);
            let combo = |x: f64| c1 * f1(x) + c2 * f2(x);

            let i1 = oscillatory_line_integral(f1, a, b, &spec).unwrap();
            let i2 = oscillatory_line_integral(f2, a, b, &spec).unwrap();
            let ic = oscillatory_line_integral(combo, a, b, &spec).unwrap();
            prop_assert!((ic - (c1 * i1 + c2 * i2)).norm() < 1e-8);

            let flipped = oscillatory_line_integral(f1, -a, -b, &spec).unwrap();
            prop_assert!((flipped - i1.conj()).norm() < 1e-8);
        }
    }
}
