//! Shannon entropies of tomograms, the position-momentum entropic bound,
//! and the nonnegative consistency function `R(theta1, theta2)`.
//!
//! All entropies are differential entropies in nats with the `0 ln 0 = 0`
//! convention. For a normalized pure mode the conjugate-pair sum obeys
//! `H(theta) + H(theta + pi/2) >= 2 ln(pi e)` per axis pair, with equality
//! exactly for minimum-uncertainty Gaussians; `R` is that sum minus the
//! bound and serves as a measurement-consistency check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::beam::{fourier_transform, GridAxis, HgMode, SampledField};
use crate::error::{Error, Result};
use crate::numerics::QuadratureSpec;
use crate::tomography::{BeamSource, OpticalAngles, NU_EPS};

const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

/// `ln(pi e)`, the per-axis-pair entropy bound.
pub const LN_PI_E: f64 = 2.144_729_885_849_400_2;

/// `2 ln(pi e)`, the 2D position-momentum bound.
pub const ENTROPY_BOUND: f64 = 2.0 * LN_PI_E;

/// Tomogram values below this floor contribute nothing to `w ln w`;
/// Gaussian tails underflow long before they matter.
const W_FLOOR: f64 = 1e-300;

/// Early-exit target for entropy refinement.
const ENTROPY_TARGET: f64 = 1e-7;

/// Hard failure threshold: a final doubling step may not move the entropy
/// by more than this.
const ENTROPY_FAIL: f64 = 1e-4;

/// An entropy in nats together with the magnitude of the last refinement
/// step; converged results keep `estimated_error` under `1e-4`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub estimated_error: f64,
}

fn plogp(w: f64) -> f64 {
    if w > W_FLOOR {
        -w * w.ln()
    } else {
        0.0
    }
}

/// Trapezoid refinement of a real integrand over `[center - half, center + half]`
/// with midpoint reuse; converges to `ENTROPY_TARGET`, fails past `ENTROPY_FAIL`.
fn refine_entropy<F: Fn(f64) -> f64>(f: &F, center: f64, half: f64, start: usize) -> Result<(f64, f64)> {
    let mut m = start.max(16).next_power_of_two();
    let h0 = 2.0 * half / m as f64;
    let mut acc = 0.5 * (f(center - half) + f(center + half));
    for k in 1..m {
        acc += f(center - half + k as f64 * h0);
    }
    let mut cur = acc * h0;
    let mut change = f64::INFINITY;
    for _ in 0..8 {
        m *= 2;
        let h = 2.0 * half / m as f64;
        let mut mid = 0.0;
        for k in (1..m).step_by(2) {
            mid += f(center - half + k as f64 * h);
        }
        let next = 0.5 * cur + mid * h;
        change = (next - cur).abs();
        cur = next;
        if change <= ENTROPY_TARGET {
            return Ok((cur, change));
        }
    }
    if change > ENTROPY_FAIL {
        return Err(Error::NonConvergence { change, tol: ENTROPY_FAIL });
    }
    Ok((cur, change))
}

/// Entropy of one closed-form axis tomogram of a mode.
fn mode_axis_entropy(order: u32, sigma0: f64, mu: f64, nu: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let scale = (mu * mu * sigma0 * sigma0 / 4.0 + nu * nu / (sigma0 * sigma0)).sqrt();
    // tomogram box (turning point + tails), inflated because w ln w decays slower
    let half = 1.5 * ((2.0 * order as f64 + 1.0).sqrt() + 8.0) * scale;
    let f = |x_val: f64| {
        plogp(crate::tomography::hg_tomogram_1d(order, sigma0, x_val, mu, nu).unwrap_or(0.0))
    };
    refine_entropy(&f, 0.0, half, (spec.nodes_per_axis / 8).clamp(512, 4096))
}

enum AxisOp {
    Chirp { mu: f64, nu: f64 },
    Slice { mu: f64 },
}

impl AxisOp {
    fn new(mu: f64, nu: f64) -> Self {
        if nu.abs() < NU_EPS {
            AxisOp::Slice { mu }
        } else {
            AxisOp::Chirp { mu, nu }
        }
    }

    fn front(&self) -> f64 {
        match *self {
            AxisOp::Chirp { nu, .. } => 1.0 / (TAU * nu.abs()),
            AxisOp::Slice { mu } => 1.0 / mu.abs(),
        }
    }
}

fn interp_complex(values: &[Complex64], axis: &GridAxis, x: f64) -> Complex64 {
    let t = (x - axis.first()) / axis.step;
    if t < 0.0 || t > (axis.count - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let i = (t.floor() as usize).min(axis.count - 2);
    let frac = t - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Transform a set of rows along one axis: for each requested `X` either the
/// chirp-weighted sum or the interpolated slice at `X/mu`.
fn apply_axis_op(
    rows: &[Vec<Complex64>],
    axis: &GridAxis,
    op: &AxisOp,
    targets: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    match *op {
        AxisOp::Chirp { mu, nu } => {
            let a = mu / nu;
            let first = axis.first();
            let last = axis.point(axis.count - 1);
            let mut kernels = Vec::with_capacity(targets.len());
            for &x_val in targets {
                let b = -x_val / nu;
                let rate = (a * first + b).abs().max((a * last + b).abs());
                if rate * axis.step > PI {
                    return Err(Error::ChirpUndersampled(rate * axis.step));
                }
                let k: Vec<Complex64> = (0..axis.count)
                    .map(|i| {
                        let x = axis.point(i);
                        let w = if i == 0 || i == axis.count - 1 { 0.5 } else { 1.0 };
                        w * Complex64::new(0.0, 0.5 * a * x * x + b * x).exp()
                    })
                    .collect();
                kernels.push(k);
            }
            Ok(targets
                .iter()
                .enumerate()
                .map(|(ti, _)| {
                    rows.iter()
                        .map(|row| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (v, k) in row.iter().zip(&kernels[ti]) {
                                acc += v * k;
                            }
                            acc * axis.step
                        })
                        .collect()
                })
                .collect())
        }
        AxisOp::Slice { mu } => Ok(targets
            .iter()
            .map(|&x_val| {
                rows.iter()
                    .map(|row| interp_complex(row, axis, x_val / mu))
                    .collect()
            })
            .collect()),
    }
}

/// Entropy of the symplectic tomogram of a sampled field by direct scan of
/// the transform over an adaptive `X` box.
fn field_entropy(
    field: &SampledField,
    mu1: f64,
    nu1: f64,
    mu2: f64,
    nu2: f64,
) -> Result<(f64, f64)> {
    let spatial = field.moments();
    let spectrum = fourier_transform(field);
    let spectral = spectrum.moments();

    let center1 = mu1 * spatial.mean1 + nu1 * spectral.mean1;
    let center2 = mu2 * spatial.mean2 + nu2 * spectral.mean2;
    let scale1 = (mu1 * mu1 * spatial.var1 + nu1 * nu1 * spectral.var1).sqrt();
    let scale2 = (mu2 * mu2 * spatial.var2 + nu2 * nu2 * spectral.var2).sqrt();
    // 1.5 x a six-sigma tomogram box; w ln w tails are ~1e-17 there, and a
    // tighter box keeps the kernel's linear phase inside the grid Nyquist
    // limit for moderate grids
    let half1 = 1.5 * 6.0 * scale1;
    let half2 = 1.5 * 6.0 * scale2;

    let op1 = AxisOp::new(mu1, nu1);
    let op2 = AxisOp::new(mu2, nu2);
    let front = op1.front() * op2.front();

    let (na1, na2) = (field.x1_axis(), field.x2_axis());
    let rows_axis1: Vec<Vec<Complex64>> = (0..na2.count)
        .map(|i2| (0..na1.count).map(|i1| field.value(i1, i2)).collect())
        .collect();

    let entropy_at = |nx: usize| -> Result<f64> {
        let grid = |c: f64, h: f64| -> Vec<f64> {
            (0..nx)
                .map(|i| c - h + 2.0 * h * i as f64 / (nx - 1) as f64)
                .collect()
        };
        let xs1 = grid(center1, half1);
        let xs2 = grid(center2, half2);
        // stage 1: S[i1][y], stage 2: F[i1][i2]
        let stage1 = apply_axis_op(&rows_axis1, na1, &op1, &xs1)?;
        let amplitudes = apply_axis_op(&stage1, na2, &op2, &xs2)?;
        let h1 = 2.0 * half1 / (nx - 1) as f64;
        let h2 = 2.0 * half2 / (nx - 1) as f64;
        let mut total = 0.0;
        for (j, row) in amplitudes.iter().enumerate() {
            let wj = if j == 0 || j == nx - 1 { 0.5 } else { 1.0 };
            for (i, amp) in row.iter().enumerate() {
                let wi = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                total += wi * wj * plogp(front * amp.norm_sqr());
            }
        }
        Ok(total * h1 * h2)
    };

    // Zero lines of excited-mode tomograms make w ln w kinked, so the scan
    // refines at ~h^3; four doublings reach the failure threshold even then,
    // while smooth tomograms exit after one or two.
    let mut nx = 65;
    let mut cur = entropy_at(nx)?;
    let mut change = f64::INFINITY;
    for _ in 0..4 {
        nx = (nx - 1) * 2 + 1;
        let next = entropy_at(nx)?;
        change = (next - cur).abs();
        cur = next;
        if change <= 1e-6 {
            return Ok((cur, change));
        }
    }
    if change > ENTROPY_FAIL {
        return Err(Error::NonConvergence { change, tol: ENTROPY_FAIL });
    }
    Ok((cur, change))
}

fn validate_axis(mu: f64, nu: f64, axis: u8) -> Result<()> {
    if !mu.is_finite() || !nu.is_finite() {
        return Err(Error::NonFinite("entropy query component"));
    }
    if mu == 0.0 && nu == 0.0 {
        return Err(Error::DegenerateQuery { axis });
    }
    Ok(())
}

/// Shannon entropy `H(mu1, nu1, mu2, nu2) = -iint w ln w dX1 dX2` of the
/// symplectic tomogram. Product modes evaluate as the sum of two 1D axis
/// entropies; sampled fields go through a 2D transform scan.
pub fn tomographic_entropy(
    source: &BeamSource,
    mu1: f64,
    nu1: f64,
    mu2: f64,
    nu2: f64,
    spec: &QuadratureSpec,
) -> Result<EntropyValue> {
    validate_axis(mu1, nu1, 1)?;
    validate_axis(mu2, nu2, 2)?;
    let (value, err) = match source {
        BeamSource::Mode(mode) => {
            let (h1, e1) = mode_axis_entropy(mode.n, mode.sigma0, mu1, nu1, spec)?;
            let (h2, e2) = mode_axis_entropy(mode.m, mode.sigma0, mu2, nu2, spec)?;
            (h1 + h2, e1 + e2)
        }
        BeamSource::Field(field) => field_entropy(field, mu1, nu1, mu2, nu2)?,
    };
    Ok(EntropyValue { value, estimated_error: err })
}

/// Optical tomographic entropy: the symplectic entropy at
/// `(mu, nu) = (cos theta, sin theta)` per axis.
pub fn optical_entropy(
    source: &BeamSource,
    angles: &OpticalAngles,
    spec: &QuadratureSpec,
) -> Result<EntropyValue> {
    tomographic_entropy(
        source,
        angles.theta1().cos(),
        angles.theta1().sin(),
        angles.theta2().cos(),
        angles.theta2().sin(),
        spec,
    )
}

/// Fresnel tomographic entropy: the symplectic entropy at `mu1 = mu2 = 1`.
pub fn fresnel_entropy(
    source: &BeamSource,
    nu1: f64,
    nu2: f64,
    spec: &QuadratureSpec,
) -> Result<EntropyValue> {
    if nu1 == 0.0 {
        return Err(Error::FresnelNuZero { axis: 1 });
    }
    if nu2 == 0.0 {
        return Err(Error::FresnelNuZero { axis: 2 });
    }
    tomographic_entropy(source, 1.0, nu1, 1.0, nu2, spec)
}

/// Position and momentum intensity entropies of a sampled field and the
/// slack of the uncertainty bound `Hx + Hp >= 2 ln(pi e)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PositionMomentumEntropy {
    pub hx: f64,
    pub hp: f64,
    pub slack: f64,
}

pub fn position_momentum_entropy_sum(field: &SampledField) -> PositionMomentumEntropy {
    let sum_entropy = |a1: &GridAxis, a2: &GridAxis, values: &[Complex64]| -> f64 {
        let mut total = 0.0;
        for i2 in 0..a2.count {
            let w2 = if i2 == 0 || i2 == a2.count - 1 { 0.5 } else { 1.0 };
            for i1 in 0..a1.count {
                let w1 = if i1 == 0 || i1 == a1.count - 1 { 0.5 } else { 1.0 };
                total += w1 * w2 * plogp(values[i2 * a1.count + i1].norm_sqr());
            }
        }
        total * a1.step * a2.step
    };
    let hx = sum_entropy(field.x1_axis(), field.x2_axis(), field.values());
    let spectrum = fourier_transform(field);
    let hp = sum_entropy(spectrum.p1_axis(), spectrum.p2_axis(), spectrum.values());
    PositionMomentumEntropy { hx, hp, slack: hx + hp - ENTROPY_BOUND }
}

/// The entropic consistency function
/// `R(theta1, theta2) = H_opt(theta1, theta2)
///  + H_opt(theta1 + pi/2, theta2 + pi/2) - 2 ln(pi e)`,
/// nonnegative for every normalized pure mode.
pub fn r_function(source: &BeamSource, angles: &OpticalAngles, spec: &QuadratureSpec) -> Result<f64> {
    let direct = optical_entropy(source, angles, spec)?;
    let conjugate = optical_entropy(source, &angles.quarter_shifted(), spec)?;
    Ok(direct.value + conjugate.value - ENTROPY_BOUND)
}

/// `R` evaluated on a uniform lattice over `[0, pi)^2`.
#[derive(Debug, Clone)]
pub struct RSurface {
    pub grid_n: usize,
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    /// Row-major, theta1-major: `values[i * grid_n + j] = R(theta1[i], theta2[j])`.
    pub values: Vec<f64>,
    pub mode: Option<HgMode>,
}

impl RSurface {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid_n + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// CSV rows `theta1,theta2,R`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta1,theta2,R\n");
        for (i, &t1) in self.theta1.iter().enumerate() {
            for (j, &t2) in self.theta2.iter().enumerate() {
                out.push_str(&format!("{:.11e},{:.11e},{:.11e}\n", t1, t2, self.value(i, j)));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct Doc<'a> {
            mode: Option<&'a HgMode>,
            grid_n: usize,
            theta_step: f64,
            min: f64,
            mean: f64,
            max: f64,
            values: &'a [f64],
        }
        serde_json::to_string_pretty(&Doc {
            mode: self.mode.as_ref(),
            grid_n: self.grid_n,
            theta_step: PI / self.grid_n as f64,
            min: self.min(),
            mean: self.mean(),
            max: self.max(),
            values: &self.values,
        })
        .expect("surface serializes")
    }
}

/// Scan `R` over a `grid_n x grid_n` lattice on `[0, pi)^2`. Lattice points
/// evaluate in parallel; the output ordering is fixed regardless of the
/// execution order.
pub fn r_surface_scan(source: &BeamSource, grid_n: usize, spec: &QuadratureSpec) -> Result<RSurface> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!("grid_n must be >= 2, got {grid_n}")));
    }
    let step = PI / grid_n as f64;
    let thetas: Vec<f64> = (0..grid_n).map(|i| i as f64 * step).collect();
    let values: Vec<f64> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid_n, idx % grid_n);
            r_function(source, &OpticalAngles::new(thetas[i], thetas[j]), spec)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mode = match source {
        BeamSource::Mode(m) => Some(*m),
        BeamSource::Field(_) => None,
    };
    Ok(RSurface { grid_n, theta1: thetas.clone(), theta2: thetas, values, mode })
}
