//! Symplectic, optical, and Fresnel tomograms of 2D beam modes.
//!
//! The symplectic tomogram is the squared modulus of a chirped Fresnel-type
//! transform of the field,
//!
//! ```text
//! w(X1,mu1,nu1,X2,mu2,nu2) = 1/(4 pi^2 |nu1 nu2|) *
//!   | iint psi(x,y) exp[i (mu1 x^2/(2 nu1) + mu2 y^2/(2 nu2)
//!                          - X1 x/nu1 - X2 y/nu2)] dx dy |^2,
//! ```
//!
//! the probability density of `X_k = mu_k * coordinate + nu_k * momentum`.
//! The optical family restricts `(mu, nu) = (cos theta, sin theta)` per axis
//! and the Fresnel family restricts `mu = 1`. For Hermite-Gauss modes the
//! transform evaluates in closed form; for sampled fields it is computed by
//! chirp-weighted sums on the field's own grid.

use num_complex::Complex64;

use crate::beam::{hg_amplitude_1d, HgMode, SampledField};
use crate::error::{Error, Result};
use crate::numerics::{
    hermite_gaussian_integral, oscillatory_line_integral, QuadratureSpec,
};

const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

/// Below this |nu| the chirped kernel on that axis is replaced by its
/// delta-kernel limit `w -> (1/|mu|) * marginal intensity at X/mu`; the
/// transform has a removable singularity there.
pub const NU_EPS: f64 = 1e-8;

/// One symplectic query: the random-variable values `X1, X2` and the linear
/// map coefficients `mu_k, nu_k` per axis. `(mu_k, nu_k) != (0, 0)` is
/// enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TomogramQuery {
    pub x1: f64,
    pub mu1: f64,
    pub nu1: f64,
    pub x2: f64,
    pub mu2: f64,
    pub nu2: f64,
}

impl TomogramQuery {
    pub fn new(x1: f64, mu1: f64, nu1: f64, x2: f64, mu2: f64, nu2: f64) -> Result<Self> {
        for (name, v) in [
            ("X1", x1), ("mu1", mu1), ("nu1", nu1),
            ("X2", x2), ("mu2", mu2), ("nu2", nu2),
        ] {
            if !v.is_finite() {
                let _ = name;
                return Err(Error::NonFinite("tomogram query component"));
            }
        }
        if mu1 == 0.0 && nu1 == 0.0 {
            return Err(Error::DegenerateQuery { axis: 1 });
        }
        if mu2 == 0.0 && nu2 == 0.0 {
            return Err(Error::DegenerateQuery { axis: 2 });
        }
        Ok(Self { x1, mu1, nu1, x2, mu2, nu2 })
    }

    /// Parse `X1,mu1,nu1,X2,mu2,nu2` (six comma-separated reals).
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(Error::QueryParse(format!(
                "expected 6 comma-separated values, got {}",
                parts.len()
            )));
        }
        let mut vals = [0.0f64; 6];
        for (slot, token) in vals.iter_mut().zip(&parts) {
            *slot = token
                .parse()
                .map_err(|_| Error::QueryParse(format!("bad number `{token}`")))?;
        }
        Self::new(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5])
    }

    /// Query with every axis-k argument multiplied by `lambda_k`.
    pub fn scaled(&self, lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::new(
            lambda1 * self.x1,
            lambda1 * self.mu1,
            lambda1 * self.nu1,
            lambda2 * self.x2,
            lambda2 * self.mu2,
            lambda2 * self.nu2,
        )
    }
}

impl std::fmt::Display for TomogramQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.x1, self.mu1, self.nu1, self.x2, self.mu2, self.nu2
        )
    }
}

/// Pair of rotation angles, stored reduced to `[0, pi)`.
///
/// Tomograms are invariant under `theta -> theta + pi` combined with
/// `X -> -X`; reduction records the required sign flip per axis so
/// value-level queries stay faithful to the raw angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalAngles {
    theta1: f64,
    theta2: f64,
    flip1: bool,
    flip2: bool,
}

fn reduce_angle(theta: f64) -> (f64, bool) {
    let reduced = theta.rem_euclid(PI);
    let reduced = if reduced >= PI { 0.0 } else { reduced };
    let wraps = ((theta - reduced) / PI).round() as i64;
    (reduced, wraps.rem_euclid(2) == 1)
}

impl OpticalAngles {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        let (theta1, flip1) = reduce_angle(theta1);
        let (theta2, flip2) = reduce_angle(theta2);
        Self { theta1, theta2, flip1, flip2 }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// True when reduction removed an odd number of half turns on the axis,
    /// i.e. the X argument of that axis must be negated.
    pub fn flips(&self) -> (bool, bool) {
        (self.flip1, self.flip2)
    }

    /// Angles advanced by a quarter period on both axes.
    pub fn quarter_shifted(&self) -> Self {
        Self::new(self.theta1 + PI / 2.0, self.theta2 + PI / 2.0)
    }
}

/// Per-axis intermediates of the closed-form Hermite-Gauss tomogram:
///
/// `q = 1/sigma0^2 - i mu/(2 nu)`, `alpha = sqrt(2)/(sigma0 sqrt(q))`,
/// `beta = -i X/(2 nu sqrt(q))`.
///
/// `Re(q) = 1/sigma0^2 > 0` always, which keeps `alpha^2` away from the
/// branch cut of `(1 - alpha^2)^(1/2)` (in fact `|1 - alpha^2| = 1`).
#[derive(Debug, Clone, Copy)]
pub struct AxisIntermediates {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub q: Complex64,
}

/// Intermediates for one axis of a mode of waist `sigma0` at `(X, mu, nu)`,
/// valid for `|nu| >= NU_EPS`.
pub fn closed_form_intermediates(sigma0: f64, x_val: f64, mu: f64, nu: f64) -> AxisIntermediates {
    let q = Complex64::new(1.0 / (sigma0 * sigma0), -mu / (2.0 * nu));
    let sqrt_q = q.sqrt();
    AxisIntermediates {
        alpha: std::f64::consts::SQRT_2 / (sigma0 * sqrt_q),
        beta: Complex64::new(0.0, -1.0) * x_val / (2.0 * nu * sqrt_q),
        q,
    }
}

/// Closed-form tomogram of a 1D Hermite-Gauss mode along one axis.
///
/// For `|nu| >= NU_EPS` this assembles
/// `|N exp(-X^2/(4 nu^2 q)) / sqrt(q) * I_n(alpha, beta)|^2 / (2 pi |nu|)`
/// from [`hermite_gaussian_integral`]; below the guard it evaluates the
/// delta-kernel limit `(1/|mu|) |phi_n(X/mu)|^2`.
pub fn hg_tomogram_1d(order: u32, sigma0: f64, x_val: f64, mu: f64, nu: f64) -> Result<f64> {
    if mu == 0.0 && nu == 0.0 {
        return Err(Error::DegenerateQuery { axis: 0 });
    }
    if !x_val.is_finite() || !mu.is_finite() || !nu.is_finite() {
        return Err(Error::NonFinite("tomogram argument"));
    }
    if nu.abs() < NU_EPS {
        let a = hg_amplitude_1d(order, sigma0, x_val / mu);
        return Ok(a * a / mu.abs());
    }
    let im = closed_form_intermediates(sigma0, x_val, mu, nu);
    let integral = hermite_gaussian_integral(order, im.alpha, im.beta)?;
    let envelope = (-(x_val * x_val) / (4.0 * nu * nu * im.q)).exp() / im.q.sqrt();
    let amplitude = crate::beam::norm_1d(order, sigma0) * envelope * integral;
    Ok(amplitude.norm_sqr() / (TAU * nu.abs()))
}

/// Closed-form symplectic tomogram of a 2D Hermite-Gauss mode: the product
/// of the two axis factors (the transform of a product mode factorizes).
pub fn symplectic_tomogram_hg(mode: &HgMode, q: &TomogramQuery) -> Result<f64> {
    let w1 = hg_tomogram_1d(mode.n, mode.sigma0, q.x1, q.mu1, q.nu1)?;
    let w2 = hg_tomogram_1d(mode.m, mode.sigma0, q.x2, q.mu2, q.nu2)?;
    Ok(w1 * w2)
}

fn axis_kernel(
    first: f64,
    step: f64,
    count: usize,
    mu: f64,
    nu: f64,
    x_val: f64,
) -> Result<Vec<Complex64>> {
    let a = mu / nu;
    let b = -x_val / nu;
    let last = first + step * (count - 1) as f64;
    let max_rate = (a * first + b).abs().max((a * last + b).abs());
    if max_rate * step > PI {
        return Err(Error::ChirpUndersampled(max_rate * step));
    }
    Ok((0..count)
        .map(|k| {
            let x = first + k as f64 * step;
            Complex64::new(0.0, 0.5 * a * x * x + b * x).exp()
        })
        .collect())
}

/// Linear interpolation of the complex field along `x1` at fixed row `i2`.
fn interp_row(field: &SampledField, x: f64, i2: usize) -> Complex64 {
    let axis = field.x1_axis();
    let t = (x - axis.first()) / axis.step;
    if t < 0.0 || t > (axis.count - 1) as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let i = (t.floor() as usize).min(axis.count - 2);
    let frac = t - i as f64;
    field.value(i, i2) * (1.0 - frac) + field.value(i + 1, i2) * frac
}

fn interp_intensity(field: &SampledField, x1: f64, x2: f64) -> f64 {
    let axis2 = field.x2_axis();
    let t = (x2 - axis2.first()) / axis2.step;
    if t < 0.0 || t > (axis2.count - 1) as f64 {
        return 0.0;
    }
    let j = (t.floor() as usize).min(axis2.count - 2);
    let frac = t - j as f64;
    let lo = interp_row(field, x1, j).norm_sqr();
    let hi = interp_row(field, x1, j + 1).norm_sqr();
    lo * (1.0 - frac) + hi * frac
}

/// Two-pass chirp-weighted trapezoid sum over the field grid with an
/// optional node stride (stride 2 realizes the half-resolution check).
fn chirped_double_sum(
    field: &SampledField,
    k1: &[Complex64],
    k2: &[Complex64],
    stride: usize,
) -> Complex64 {
    let (n1, n2) = (field.x1_axis().count, field.x2_axis().count);
    let idx1: Vec<usize> = (0..n1).step_by(stride).collect();
    let idx2: Vec<usize> = (0..n2).step_by(stride).collect();
    let step1 = field.x1_axis().step * stride as f64;
    let step2 = field.x2_axis().step * stride as f64;
    let mut outer = Complex64::new(0.0, 0.0);
    for (jj, &i2) in idx2.iter().enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        for (ii, &i1) in idx1.iter().enumerate() {
            let w = if ii == 0 || ii == idx1.len() - 1 { 0.5 } else { 1.0 };
            inner += w * field.value(i1, i2) * k1[i1];
        }
        let w = if jj == 0 || jj == idx2.len() - 1 { 0.5 } else { 1.0 };
        outer += w * inner * k2[i2];
    }
    outer * step1 * step2
}

/// Symplectic tomogram of a sampled field, evaluated on the field's grid.
///
/// Truncation and resolution come from the grid itself; `spec.abs_tol` sets
/// the threshold of the half-resolution consistency check that guards
/// against unresolved chirps, alongside a hard per-step Nyquist bound.
pub fn symplectic_tomogram_numeric(
    field: &SampledField,
    q: &TomogramQuery,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let tiny1 = q.nu1.abs() < NU_EPS;
    let tiny2 = q.nu2.abs() < NU_EPS;
    match (tiny1, tiny2) {
        (true, true) => {
            Ok(interp_intensity(field, q.x1 / q.mu1, q.x2 / q.mu2) / (q.mu1 * q.mu2).abs())
        }
        (true, false) => {
            let x_star = q.x1 / q.mu1;
            let axis2 = field.x2_axis();
            let slice: Vec<Complex64> = (0..axis2.count)
                .map(|i2| interp_row(field, x_star, i2))
                .collect();
            let g = crate::numerics::chirp_weighted_sum(
                &slice,
                axis2.first(),
                axis2.step,
                q.mu2 / q.nu2,
                -q.x2 / q.nu2,
            )?;
            Ok(g.norm_sqr() / (TAU * q.nu2.abs() * q.mu1.abs()))
        }
        (false, true) => {
            let swapped = TomogramQuery::new(q.x2, q.mu2, q.nu2, q.x1, q.mu1, q.nu1)?;
            symplectic_tomogram_numeric(&transpose(field), &swapped, spec)
        }
        (false, false) => {
            let a1 = field.x1_axis();
            let a2 = field.x2_axis();
            let k1 = axis_kernel(a1.first(), a1.step, a1.count, q.mu1, q.nu1, q.x1)?;
            let k2 = axis_kernel(a2.first(), a2.step, a2.count, q.mu2, q.nu2, q.x2)?;
            let front = 1.0 / (4.0 * PI * PI * (q.nu1 * q.nu2).abs());
            let full = chirped_double_sum(field, &k1, &k2, 1);
            let coarse = chirped_double_sum(field, &k1, &k2, 2);
            let w = front * full.norm_sqr();
            let w_coarse = front * coarse.norm_sqr();
            let change = (w - w_coarse).abs();
            if change > (10.0 * spec.abs_tol).max(1e-6 * w) {
                return Err(Error::NonConvergence { change, tol: spec.abs_tol });
            }
            Ok(w)
        }
    }
}

fn transpose(field: &SampledField) -> SampledField {
    let (a1, a2) = (*field.x1_axis(), *field.x2_axis());
    let mut values = vec![Complex64::default(); a1.count * a2.count];
    for i2 in 0..a2.count {
        for i1 in 0..a1.count {
            values[i1 * a2.count + i2] = field.value(i1, i2);
        }
    }
    SampledField::from_parts(a2, a1, values).expect("transpose preserves shape")
}

/// A beam source: an analytic mode (closed-form tomograms) or a sampled
/// field (grid-based tomograms).
#[derive(Debug, Clone)]
pub enum BeamSource {
    Mode(HgMode),
    Field(SampledField),
}

impl From<HgMode> for BeamSource {
    fn from(mode: HgMode) -> Self {
        BeamSource::Mode(mode)
    }
}

impl From<SampledField> for BeamSource {
    fn from(field: SampledField) -> Self {
        BeamSource::Field(field)
    }
}

/// Symplectic tomogram of either source kind.
pub fn tomogram_value(source: &BeamSource, q: &TomogramQuery, spec: &QuadratureSpec) -> Result<f64> {
    match source {
        BeamSource::Mode(mode) => symplectic_tomogram_hg(mode, q),
        BeamSource::Field(field) => symplectic_tomogram_numeric(field, q, spec),
    }
}

/// Optical tomogram: the symplectic tomogram at
/// `(mu_k, nu_k) = (cos theta_k, sin theta_k)`. At `theta = 0 (mod pi)` the
/// delta-kernel limit applies exactly, giving the intensity slice.
pub fn optical_tomogram(
    source: &BeamSource,
    x1: f64,
    angles: &OpticalAngles,
    x2: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (f1, f2) = angles.flips();
    let x1 = if f1 { -x1 } else { x1 };
    let x2 = if f2 { -x2 } else { x2 };
    let q = TomogramQuery::new(
        x1,
        angles.theta1().cos(),
        angles.theta1().sin(),
        x2,
        angles.theta2().cos(),
        angles.theta2().sin(),
    )?;
    tomogram_value(source, &q, spec)
}

/// Fresnel tomogram: the symplectic tomogram restricted to `mu1 = mu2 = 1`.
pub fn fresnel_tomogram(
    source: &BeamSource,
    x1: f64,
    nu1: f64,
    x2: f64,
    nu2: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if nu1 == 0.0 {
        return Err(Error::FresnelNuZero { axis: 1 });
    }
    if nu2 == 0.0 {
        return Err(Error::FresnelNuZero { axis: 2 });
    }
    let q = TomogramQuery::new(x1, 1.0, nu1, x2, 1.0, nu2)?;
    tomogram_value(source, &q, spec)
}

/// Both sides of the homogeneity relation
/// `w(l1 X1, l1 mu1, l1 nu1, l2 X2, ...) = w(X1, ...) / |l1 l2|`,
/// returned as `(lhs, rhs)` for assertion.
pub fn homogeneity_check(
    q: &TomogramQuery,
    lambda1: f64,
    lambda2: f64,
    source: &BeamSource,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if lambda1 == 0.0 || lambda2 == 0.0 || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::InvalidArgument("homogeneity scale must be finite and nonzero".into()));
    }
    let lhs = tomogram_value(source, &q.scaled(lambda1, lambda2)?, spec)?;
    let rhs = tomogram_value(source, q, spec)? / (lambda1 * lambda2).abs();
    Ok((lhs, rhs))
}

/// Effective propagation picture of a query against a mode: per-axis
/// distances `z_k = 2 pi nu_k / (lambda mu_k)`, the Rayleigh range `z0`,
/// the spread widths `sigma_k(z_k) = sigma0 sqrt(1 + (z_k/z0)^2)`, and the
/// common ratio `rho = mu/nu` when both axes share one.
#[derive(Debug, Clone, Copy)]
pub struct PropagationGeometry {
    pub z1: f64,
    pub z2: f64,
    pub z0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: Option<f64>,
}

pub fn propagation_geometry(mode: &HgMode, q: &TomogramQuery) -> PropagationGeometry {
    let z0 = mode.rayleigh_range();
    let z_of = |mu: f64, nu: f64| {
        if mu == 0.0 {
            f64::INFINITY
        } else {
            TAU * nu / (mode.lambda * mu)
        }
    };
    let z1 = z_of(q.mu1, q.nu1);
    let z2 = z_of(q.mu2, q.nu2);
    let sigma = |z: f64| {
        if z.is_infinite() {
            f64::INFINITY
        } else {
            mode.sigma0 * (1.0 + (z / z0) * (z / z0)).sqrt()
        }
    };
    let rho = if q.nu1 != 0.0 && q.nu2 != 0.0 {
        let r1 = q.mu1 / q.nu1;
        let r2 = q.mu2 / q.nu2;
        ((r1 - r2).abs() <= 1e-9 * r1.abs().max(r2.abs()).max(1e-300)).then_some(r1)
    } else {
        None
    };
    PropagationGeometry { z1, z2, z0, sigma1: sigma(z1), sigma2: sigma(z2), rho }
}

/// Two-point correlation `psi(x) psi*(x')` of a 1D pure mode recovered from
/// its tomogram:
///
/// `psi(x) psi*(x') = 1/(2 pi) iint w(X, mu, x - x')
///                    exp[i (X - mu (x + x')/2)] dX dmu`.
///
/// The inner X integral runs over a window scaled to the tomogram's spread
/// at each `mu`; the outer mu window starts at `2.5 * spec.half_width` and
/// grows until the integrand tail falls below tolerance.
pub fn reconstruct_correlation_1d<S>(
    sampler: &S,
    x: f64,
    xprime: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    S: Fn(f64, f64, f64) -> f64,
{
    let raw_nu = x - xprime;
    // keep the sampler off the degenerate (mu, nu) = (0, 0) point
    let nu = if raw_nu.abs() < 1e-6 {
        1e-6f64.copysign(if raw_nu == 0.0 { 1.0 } else { raw_nu })
    } else {
        raw_nu
    };

    let inner_spec = QuadratureSpec {
        half_width: 1.0, // replaced per mu
        nodes_per_axis: (spec.nodes_per_axis / 4).max(512),
        abs_tol: spec.abs_tol,
    };
    let probe = |mu: f64| -> Result<Complex64> {
        let window = spec.half_width * ((mu * mu + nu * nu) / 2.0).sqrt();
        let local = inner_spec.with_half_width(window);
        oscillatory_line_integral(|x_val| Complex64::new(sampler(x_val, mu, nu), 0.0), 0.0, 1.0, &local)
    };

    let mut mu_max = 2.5 * spec.half_width;
    let tail_tol = (10.0 * spec.abs_tol).max(1e-12);
    let mut grown = 0;
    loop {
        let tail = probe(mu_max)?.norm().max(probe(-mu_max)?.norm());
        if tail <= tail_tol {
            break;
        }
        grown += 1;
        if grown > 4 {
            return Err(Error::Truncation { tail, limit: mu_max });
        }
        mu_max *= 1.5;
    }

    let inner_err = std::cell::RefCell::new(None);
    let inner = |mu: f64| -> Complex64 {
        if inner_err.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match probe(mu) {
            Ok(v) => v,
            Err(e) => {
                inner_err.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let outer_spec = QuadratureSpec {
        half_width: mu_max,
        nodes_per_axis: (spec.nodes_per_axis / 8).max(256),
        abs_tol: spec.abs_tol,
    };
    let value = oscillatory_line_integral(inner, 0.0, -(x + xprime) / 2.0, &outer_spec)?;
    if let Some(e) = inner_err.into_inner() {
        return Err(e);
    }
    Ok(value / TAU)
}

/// CSV rows for a tomogram scan: `X1,mu1,nu1,X2,mu2,nu2,w` with
/// round-trip-exact decimal formatting.
pub fn tomogram_csv(rows: &[(TomogramQuery, f64)]) -> String {
    let mut out = String::from("X1,mu1,nu1,X2,mu2,nu2,w\n");
    for (q, w) in rows {
        out.push_str(&format!("{q},{w}\n"));
    }
    out
}
