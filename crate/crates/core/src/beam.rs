//! Two-dimensional paraxial beam modes: analytic Hermite-Gauss
//! specifications, sampled complex fields on rectangular grids, Fourier
//! transforms, and free-space Fresnel propagation.
//!
//! All transverse coordinates and momenta are dimensionless reduced units;
//! the wavelength enters only through the propagation geometry.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerics::{hermite_rec, ln_factorial};

const TAU: f64 = std::f64::consts::TAU;
const SQRT_TAU: f64 = 2.506_628_274_631_000_7;

/// Analytic Hermite-Gauss mode of order `(n, m)` with waist `sigma0`.
///
/// The normalized profile is
/// `N_nm H_n(sqrt(2) x1 / sigma0) H_m(sqrt(2) x2 / sigma0)
///  exp(-(x1^2 + x2^2) / sigma0^2)` with
/// `N_nm = sqrt(2 / (pi sigma0^2 n! m! 2^(n+m)))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HgMode {
    pub n: u32,
    pub m: u32,
    pub sigma0: f64,
    pub lambda: f64,
}

impl HgMode {
    /// Mode with the default wavelength `2 pi`, which makes the reduced
    /// wavelength equal to one so reduced and physical units coincide.
    pub fn new(n: u32, m: u32, sigma0: f64) -> Result<Self> {
        Self::with_wavelength(n, m, sigma0, TAU)
    }

    pub fn with_wavelength(n: u32, m: u32, sigma0: f64, lambda: f64) -> Result<Self> {
        if n > 100 || m > 100 {
            return Err(Error::InvalidMode(format!(
                "orders up to 100 supported, got ({n}, {m})"
            )));
        }
        if !sigma0.is_finite() || sigma0 <= 0.0 {
            return Err(Error::InvalidMode(format!("sigma0 must be positive, got {sigma0}")));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidMode(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { n, m, sigma0, lambda })
    }

    /// Reduced wavelength `lambda / 2 pi`.
    pub fn lambda_bar(&self) -> f64 {
        self.lambda / TAU
    }

    /// Rayleigh range `pi sigma0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        std::f64::consts::PI * self.sigma0 * self.sigma0 / self.lambda
    }

    /// Normalization factor `N_nm`.
    pub fn normalization(&self) -> f64 {
        norm_1d(self.n, self.sigma0) * norm_1d(self.m, self.sigma0)
    }

    /// Half-width that the sampling grid must reach per axis: classical
    /// turning point plus four widths of Gaussian tail.
    pub fn required_half_width(&self) -> f64 {
        let peak = (2.0 * self.n.max(self.m) as f64 + 1.0).sqrt();
        self.sigma0 * (peak + 4.0)
    }
}

pub(crate) fn norm_1d(order: u32, sigma0: f64) -> f64 {
    let ln = 0.25 * (2f64.ln() - std::f64::consts::PI.ln() - 2.0 * sigma0.ln())
        - 0.5 * (ln_factorial(order) + order as f64 * 2f64.ln());
    ln.exp()
}

/// Normalized 1D Hermite-Gauss profile of the given order and waist.
pub fn hg_amplitude_1d(order: u32, sigma0: f64, x: f64) -> f64 {
    norm_1d(order, sigma0)
        * hermite_rec(order, std::f64::consts::SQRT_2 * x / sigma0)
        * (-x * x / (sigma0 * sigma0)).exp()
}

/// Mode amplitude at a transverse point. The value is real.
pub fn hg_amplitude(mode: &HgMode, x1: f64, x2: f64) -> f64 {
    hg_amplitude_1d(mode.n, mode.sigma0, x1) * hg_amplitude_1d(mode.m, mode.sigma0, x2)
}

/// Uniform grid on one axis: `count` nodes symmetric about `center`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridAxis {
    pub center: f64,
    pub step: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(center: f64, step: f64, count: usize) -> Result<Self> {
        if !center.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "center and step must be finite, step positive: center={center}, step={step}"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {count}")));
        }
        Ok(Self { center, step, count })
    }

    /// Symmetric grid covering `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidGrid(format!("half_width must be positive, got {half_width}")));
        }
        Self::new(0.0, 2.0 * half_width / (count.max(2) as f64 - 1.0), count)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.center + (i as f64 - (self.count as f64 - 1.0) / 2.0) * self.step
    }

    pub fn first(&self) -> f64 {
        self.point(0)
    }

    pub fn half_span(&self) -> f64 {
        self.step * (self.count as f64 - 1.0) / 2.0
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Conjugate (momentum) axis of the same node count, step `2 pi / (N dx)`.
    pub fn conjugate(&self) -> GridAxis {
        GridAxis {
            center: 0.0,
            step: TAU / (self.count as f64 * self.step),
            count: self.count,
        }
    }

    fn close_to(&self, other: &GridAxis) -> bool {
        self.count == other.count
            && (self.center - other.center).abs() < 1e-12
            && (self.step - other.step).abs() < 1e-12 * self.step.abs()
    }
}

/// Square sampling window: half-width per axis and node count per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, nodes: usize) -> Self {
        Self { half_width, nodes }
    }

    /// Default window for a mode: tail bound plus safety margin, 512 nodes.
    pub fn for_mode(mode: &HgMode) -> Self {
        let peak = (2.0 * mode.n.max(mode.m) as f64 + 1.0).sqrt();
        Self { half_width: mode.sigma0 * (peak + 8.0), nodes: 512 }
    }
}

/// First and second intensity moments of a field, per axis.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
}

fn intensity_moments(a1: &GridAxis, a2: &GridAxis, values: &[Complex64]) -> Moments {
    let (mut mass, mut s1, mut s2, mut q1, mut q2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i2 in 0..a2.count {
        let y = a2.point(i2);
        for i1 in 0..a1.count {
            let x = a1.point(i1);
            let w = values[i2 * a1.count + i1].norm_sqr();
            mass += w;
            s1 += w * x;
            s2 += w * y;
            q1 += w * x * x;
            q2 += w * y * y;
        }
    }
    let mean1 = s1 / mass;
    let mean2 = s2 / mass;
    Moments {
        mean1,
        mean2,
        var1: (q1 / mass - mean1 * mean1).max(0.0),
        var2: (q2 / mass - mean2 * mean2).max(0.0),
    }
}

/// Complex amplitude sampled on a rectangular grid, row-major with the
/// `x1` index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    x1: GridAxis,
    x2: GridAxis,
    values: Vec<Complex64>,
    norm: f64,
}

impl SampledField {
    pub fn from_parts(x1: GridAxis, x2: GridAxis, values: Vec<Complex64>) -> Result<Self> {
        let expected = x1
            .count
            .checked_mul(x2.count)
            .ok_or_else(|| Error::InvalidGrid("grid size overflow".into()))?;
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid {} x {}",
                values.len(),
                x1.count,
                x2.count
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("field amplitude"));
        }
        let norm = discrete_norm(&x1, &x2, &values);
        Ok(Self { x1, x2, values, norm })
    }

    pub fn x1_axis(&self) -> &GridAxis {
        &self.x1
    }

    pub fn x2_axis(&self) -> &GridAxis {
        &self.x2
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[i2 * self.x1.count + i1]
    }

    /// Cached L2 norm `sqrt(sum |psi|^2 dx1 dx2)`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Rescaled copy with unit L2 norm.
    pub fn normalized(&self) -> SampledField {
        let scale = 1.0 / self.norm;
        let values = self.values.iter().map(|v| v * scale).collect();
        SampledField { x1: self.x1, x2: self.x2, values, norm: 1.0 }
    }

    pub fn moments(&self) -> Moments {
        intensity_moments(&self.x1, &self.x2, &self.values)
    }

    /// RMS widths of the intensity about its centroid, per axis.
    pub fn rms_widths(&self) -> (f64, f64) {
        let m = self.moments();
        (m.var1.sqrt(), m.var2.sqrt())
    }
}

fn discrete_norm(x1: &GridAxis, x2: &GridAxis, values: &[Complex64]) -> f64 {
    let sum: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    (sum * x1.step * x2.step).sqrt()
}

/// Overlap `<a, b> = sum conj(a) b dx1 dx2`; the fields must share a grid.
pub fn inner_product(a: &SampledField, b: &SampledField) -> Result<Complex64> {
    if !a.x1.close_to(&b.x1) || !a.x2.close_to(&b.x2) {
        return Err(Error::InvalidGrid("inner product requires matching grids".into()));
    }
    let acc: Complex64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| u.conj() * v)
        .sum();
    Ok(acc * a.x1.step * a.x2.step)
}

/// Sample a mode on a square window centered on the axis.
///
/// Rejects windows smaller than the mode's turning point plus tail bound.
pub fn sample(mode: &HgMode, grid: &GridSpec) -> Result<SampledField> {
    let needed = mode.required_half_width();
    if grid.half_width < needed {
        return Err(Error::GridTooSmall { needed, got: grid.half_width });
    }
    let axis = GridAxis::symmetric(grid.half_width, grid.nodes)?;
    let profile1: Vec<f64> = axis.points().map(|x| hg_amplitude_1d(mode.n, mode.sigma0, x)).collect();
    let profile2: Vec<f64> = axis.points().map(|x| hg_amplitude_1d(mode.m, mode.sigma0, x)).collect();
    let mut values = Vec::with_capacity(grid.nodes * grid.nodes);
    for &a2 in &profile2 {
        for &a1 in &profile1 {
            values.push(Complex64::new(a1 * a2, 0.0));
        }
    }
    SampledField::from_parts(axis, axis, values)
}

/// Fourier-domain amplitude on the conjugate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    p1: GridAxis,
    p2: GridAxis,
    values: Vec<Complex64>,
}

impl SpectralField {
    pub fn p1_axis(&self) -> &GridAxis {
        &self.p1
    }

    pub fn p2_axis(&self) -> &GridAxis {
        &self.p2
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, j1: usize, j2: usize) -> Complex64 {
        self.values[j2 * self.p1.count + j1]
    }

    pub fn norm(&self) -> f64 {
        discrete_norm(&self.p1, &self.p2, &self.values)
    }

    pub fn moments(&self) -> Moments {
        intensity_moments(&self.p1, &self.p2, &self.values)
    }

    /// Reinterpret the spectrum as a spatial field, e.g. to transform again.
    pub fn into_field(self) -> Result<SampledField> {
        SampledField::from_parts(self.p1, self.p2, self.values)
    }
}

/// One axis of the continuum transform
/// `out(p) = (2 pi)^(-1/2) integral in(x) exp(-i p x) dx`
/// realized as an FFT with pre/post twiddles for the off-origin grids.
fn dft_axis(
    input: &[Complex64],
    x: &GridAxis,
    p: &GridAxis,
    fft: &Arc<dyn Fft<f64>>,
    scratch: &mut Vec<Complex64>,
) -> Vec<Complex64> {
    let n = x.count;
    let x0 = x.first();
    let p0 = p.first();
    scratch.clear();
    scratch.extend((0..n).map(|k| {
        input[k] * Complex64::new(0.0, -p0 * (k as f64) * x.step).exp()
    }));
    fft.process(scratch);
    let front = x.step / SQRT_TAU;
    (0..n)
        .map(|j| front * scratch[j] * Complex64::new(0.0, -p.point(j) * x0).exp())
        .collect()
}

/// Two-dimensional Fourier transform with the `(2 pi)^(-1)` prefactor and
/// `exp(-i p x)` sign convention; Parseval holds on the conjugate grid.
pub fn fourier_transform(field: &SampledField) -> SpectralField {
    let (n1, n2) = (field.x1.count, field.x2.count);
    let p1 = field.x1.conjugate();
    let p2 = field.x2.conjugate();
    let mut planner = FftPlanner::new();
    let fft1 = planner.plan_fft_forward(n1);
    let fft2 = planner.plan_fft_forward(n2);
    let mut scratch = Vec::with_capacity(n1.max(n2));

    let mut rows_done = vec![Complex64::default(); n1 * n2];
    for i2 in 0..n2 {
        let row = &field.values[i2 * n1..(i2 + 1) * n1];
        let out = dft_axis(row, &field.x1, &p1, &fft1, &mut scratch);
        rows_done[i2 * n1..(i2 + 1) * n1].copy_from_slice(&out);
    }

    let mut values = vec![Complex64::default(); n1 * n2];
    let mut column = vec![Complex64::default(); n2];
    for j1 in 0..n1 {
        for i2 in 0..n2 {
            column[i2] = rows_done[i2 * n1 + j1];
        }
        let out = dft_axis(&column, &field.x2, &p2, &fft2, &mut scratch);
        for j2 in 0..n2 {
            values[j2 * n1 + j1] = out[j2];
        }
    }
    SpectralField { p1, p2, values }
}

/// Free-space Fresnel propagation over distance `z >= 0`.
///
/// Spectral method: multiply the spectrum by `exp(-i z lambda_bar p^2 / 2)`
/// with `lambda_bar = lambda / 2 pi`, which preserves the norm
/// unconditionally. Rejects distances whose predicted beam extent outgrows
/// the grid window.
pub fn free_space_propagate(field: &SampledField, z: f64, lambda: f64) -> Result<SampledField> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::InvalidArgument(format!("propagation distance must be >= 0, got {z}")));
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if z == 0.0 {
        return Ok(field.clone());
    }
    let lambda_bar = lambda / TAU;

    let spatial = field.moments();
    let spectrum = fourier_transform(field);
    let spectral = spectrum.moments();
    for (axis, var_x, var_p) in [
        (&field.x1, spatial.var1, spectral.var1),
        (&field.x2, spatial.var2, spectral.var2),
    ] {
        let predicted = var_x.sqrt() + z * lambda_bar * var_p.sqrt();
        if 4.0 * predicted > axis.half_span() {
            return Err(Error::Aliasing { z, predicted: 4.0 * predicted, half_span: axis.half_span() });
        }
    }

    let (n1, n2) = (field.x1.count, field.x2.count);
    let mut planner = FftPlanner::new();
    let fwd1 = planner.plan_fft_forward(n1);
    let fwd2 = planner.plan_fft_forward(n2);
    let inv1 = planner.plan_fft_inverse(n1);
    let inv2 = planner.plan_fft_inverse(n2);

    // FFT-native wavenumbers; only p^2 enters, so no shift bookkeeping.
    let wavenumbers = |n: usize, step: f64| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let f = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                TAU * f / (n as f64 * step)
            })
            .collect()
    };
    let k1 = wavenumbers(n1, field.x1.step);
    let k2 = wavenumbers(n2, field.x2.step);

    let mut work = field.values.clone();
    for i2 in 0..n2 {
        fwd1.process(&mut work[i2 * n1..(i2 + 1) * n1]);
    }
    let mut column = vec![Complex64::default(); n2];
    for j1 in 0..n1 {
        for i2 in 0..n2 {
            column[i2] = work[i2 * n1 + j1];
        }
        fwd2.process(&mut column);
        for (i2, c) in column.iter().enumerate() {
            let phase = -0.5 * z * lambda_bar * (k1[j1] * k1[j1] + k2[i2] * k2[i2]);
            work[i2 * n1 + j1] = c * Complex64::new(0.0, phase).exp();
        }
    }
    for j1 in 0..n1 {
        for i2 in 0..n2 {
            column[i2] = work[i2 * n1 + j1];
        }
        inv2.process(&mut column);
        for i2 in 0..n2 {
            work[i2 * n1 + j1] = column[i2];
        }
    }
    let scale = 1.0 / (n1 as f64 * n2 as f64);
    for i2 in 0..n2 {
        inv1.process(&mut work[i2 * n1..(i2 + 1) * n1]);
    }
    for v in &mut work {
        *v *= scale;
    }
    SampledField::from_parts(field.x1, field.x2, work)
}

// --- text field format -----------------------------------------------------
//
// Two header lines, then `count2` rows of `count1` whitespace-separated
// `re im` pairs, x1 fastest:
//
//   x1: <center> <step> <count>
//   x2: <center> <step> <count>
//   <re> <im> <re> <im> ...

const MAX_AXIS_NODES: usize = 8192;
const MAX_TOTAL_NODES: usize = 1 << 22;

fn parse_axis_line(line: &str, tag: &str, line_no: usize) -> Result<GridAxis> {
    let err = |msg: String| Error::FieldParse { line: line_no, msg };
    let rest = line
        .trim()
        .strip_prefix(tag)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| err(format!("expected `{tag}: <center> <step> <count>`")))?;
    let mut parts = rest.split_whitespace();
    let center: f64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad center".into()))?;
    let step: f64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad step".into()))?;
    let count: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad count".into()))?;
    if parts.next().is_some() {
        return Err(err("trailing tokens after axis description".into()));
    }
    if count > MAX_AXIS_NODES {
        return Err(err(format!("axis count {count} exceeds limit {MAX_AXIS_NODES}")));
    }
    GridAxis::new(center, step, count).map_err(|e| err(e.to_string()))
}

/// Parse the self-describing text field format. Never panics on malformed
/// input; every defect maps to a `FieldParse` error.
pub fn parse_field(input: &str) -> Result<SampledField> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (no1, l1) = lines
        .next()
        .ok_or(Error::FieldParse { line: 1, msg: "empty input".into() })?;
    let x1 = parse_axis_line(l1, "x1", no1 + 1)?;
    let (no2, l2) = lines
        .next()
        .ok_or(Error::FieldParse { line: no1 + 2, msg: "missing x2 header".into() })?;
    let x2 = parse_axis_line(l2, "x2", no2 + 1)?;

    let total = x1
        .count
        .checked_mul(x2.count)
        .filter(|&t| t <= MAX_TOTAL_NODES)
        .ok_or(Error::FieldParse { line: no2 + 1, msg: "grid size exceeds limit".into() })?;

    let mut values: Vec<Complex64> = Vec::with_capacity(total);
    let mut pending_re: Option<f64> = None;
    for (no, line) in lines {
        for token in line.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| Error::FieldParse {
                line: no + 1,
                msg: format!("bad number `{token}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::FieldParse { line: no + 1, msg: "non-finite amplitude".into() });
            }
            match pending_re.take() {
                None => pending_re = Some(v),
                Some(re) => {
                    if values.len() == total {
                        return Err(Error::FieldParse { line: no + 1, msg: "too many values".into() });
                    }
                    values.push(Complex64::new(re, v));
                }
            }
        }
    }
    if pending_re.is_some() {
        return Err(Error::FieldParse { line: 0, msg: "odd number of floats".into() });
    }
    if values.len() != total {
        return Err(Error::FieldParse {
            line: 0,
            msg: format!("expected {total} complex samples, got {}", values.len()),
        });
    }
    SampledField::from_parts(x1, x2, values)
}

/// Serialize a field in the text format; output re-parses to identical bits.
pub fn write_field(field: &SampledField) -> String {
    let (a1, a2) = (field.x1_axis(), field.x2_axis());
    let mut out = String::new();
    let _ = writeln!(out, "x1: {} {} {}", a1.center, a1.step, a1.count);
    let _ = writeln!(out, "x2: {} {} {}", a2.center, a2.step, a2.count);
    for i2 in 0..a2.count {
        let mut first = true;
        for i1 in 0..a1.count {
            let v = field.value(i1, i2);
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{} {}", v.re, v.im);
            first = false;
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn amplitude_examples() {
        // ground mode with sigma0 = sqrt(2) peaks at 1/sqrt(pi)
        let mode = HgMode::new(0, 0, SQRT2).unwrap();
        assert_abs_diff_eq!(
            hg_amplitude(&mode, 0.0, 0.0),
            1.0 / std::f64::consts::PI.sqrt(),
            epsilon = 1e-12
        );
        // H1(0) = 0
        let mode10 = HgMode::new(1, 0, 0.7).unwrap();
        assert_abs_diff_eq!(hg_amplitude(&mode10, 0.0, 1.3), 0.0);
        // exponent -sigma0^2/sigma0^2 = -1 on axis
        let mode = HgMode::new(0, 0, 1.7).unwrap();
        assert_abs_diff_eq!(
            hg_amplitude(&mode, 1.7, 0.0),
            mode.normalization() * (-1.0f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mode_validation() {
        assert!(HgMode::new(0, 0, 0.0).is_err());
        assert!(HgMode::new(0, 0, -1.0).is_err());
        assert!(HgMode::with_wavelength(0, 0, 1.0, 0.0).is_err());
        assert!(HgMode::new(101, 0, 1.0).is_err());
    }

    #[test]
    fn sampling_norms() {
        let grid = GridSpec::new(8.0, 256);
        for (n, m) in [(0, 0), (3, 3)] {
            let mode = HgMode::new(n, m, 1.0).unwrap();
            let field = sample(&mode, &grid).unwrap();
            assert_abs_diff_eq!(field.norm(), 1.0, epsilon = 1e-6);
            // normalize pins the discrete norm to one within rounding
            let unit = field.normalized();
            let recomputed =
                SampledField::from_parts(*unit.x1_axis(), *unit.x2_axis(), unit.values().to_vec())
                    .unwrap();
            assert_abs_diff_eq!(recomputed.norm(), 1.0, epsilon = 1e-12);
        }
        let wide = HgMode::new(0, 0, 4.0).unwrap();
        assert!(matches!(
            sample(&wide, &GridSpec::new(1.0, 64)),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn orthonormality_up_to_order_four() {
        let grid = GridSpec::new(9.5, 256);
        let modes: Vec<SampledField> = (0..=4)
            .flat_map(|n| (0..=4).map(move |m| (n, m)))
            .map(|(n, m)| sample(&HgMode::new(n, m, 1.0).unwrap(), &grid).unwrap())
            .collect();
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate() {
                let ov = inner_product(a, b).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (ov.re - expect).abs() < 1e-6 && ov.im.abs() < 1e-9,
                    "overlap ({i},{j}) = {ov}"
                );
            }
        }
    }

    #[test]
    fn parity_exact_at_grid_points() {
        let mode = HgMode::new(3, 2, 1.0).unwrap();
        let field = sample(&mode, &GridSpec::new(9.0, 128)).unwrap();
        let n = 128;
        for i2 in 0..n {
            for i1 in 0..n {
                let mirrored = field.value(n - 1 - i1, i2);
                let sign = if mode.n % 2 == 1 { -1.0 } else { 1.0 };
                assert_eq!(field.value(i1, i2).re, sign * mirrored.re);
            }
        }
    }

    #[test]
    fn fourier_ground_is_gaussian_of_conjugate_width() {
        let sigma0 = 1.3;
        let mode = HgMode::new(0, 0, sigma0).unwrap();
        let field = sample(&mode, &GridSpec::new(12.0, 512)).unwrap();
        let spec = fourier_transform(&field);
        // |psi_tilde| is the ground profile with width 2/sigma0
        let dual = 2.0 / sigma0;
        let p2 = spec.p2_axis().point(256);
        for j in [200, 256, 300, 340] {
            let p1 = spec.p1_axis().point(j);
            let expect = hg_amplitude_1d(0, dual, p1) * hg_amplitude_1d(0, dual, p2);
            assert_abs_diff_eq!(spec.value(j, 256).norm(), expect, epsilon = 1e-6);
        }
        // odd mode vanishes on the p2 axis (odd count puts a node at p1 = 0)
        let field10 = sample(&HgMode::new(1, 0, 1.0).unwrap(), &GridSpec::new(10.0, 255)).unwrap();
        let spec10 = fourier_transform(&field10);
        assert_abs_diff_eq!(spec10.p1_axis().point(127), 0.0);
        for j2 in 0..255 {
            assert!(
                spec10.value(127, j2).norm() < 1e-10,
                "odd-mode spectral slice should vanish at p1 = 0"
            );
        }
    }

    #[test]
    fn parseval_and_involution() {
        let mode = HgMode::new(2, 1, 1.0).unwrap();
        let field = sample(&mode, &GridSpec::new(10.0, 256)).unwrap();
        let spec = fourier_transform(&field);
        assert_abs_diff_eq!(spec.norm(), field.norm(), epsilon = 1e-9);

        // double transform gives the parity-flipped field: (-1)^(n+m) psi
        let twice = fourier_transform(&spec.into_field().unwrap());
        let sign = if (mode.n + mode.m) % 2 == 1 { -1.0 } else { 1.0 };
        let mut worst = 0.0f64;
        for i2 in (8..248).step_by(13) {
            for i1 in (8..248).step_by(13) {
                let got = twice.value(i1, i2);
                let expect = sign * field.value(i1, i2).re;
                worst = worst.max((got.re - expect).abs()).max(got.im.abs());
            }
        }
        assert!(worst < 1e-6, "double transform parity error {worst}");
    }

    #[test]
    fn self_fourier_family_at_sigma_sqrt2() {
        let mode = HgMode::new(2, 3, SQRT2).unwrap();
        let field = sample(&mode, &GridSpec::new(12.0, 512)).unwrap();
        let spec = fourier_transform(&field);
        let mut worst = 0.0f64;
        for j2 in (30..480).step_by(21) {
            for j1 in (30..480).step_by(21) {
                let p1 = spec.p1_axis().point(j1);
                let p2 = spec.p2_axis().point(j2);
                let expect = hg_amplitude(&mode, p1, p2).abs();
                worst = worst.max((spec.value(j1, j2).norm() - expect).abs());
            }
        }
        assert!(worst < 1e-6, "self-Fourier deviation {worst}");
    }

    #[test]
    fn propagation_width_law_and_unitarity() {
        let mode = HgMode::new(0, 0, 1.0).unwrap();
        let field = sample(&mode, &GridSpec::for_mode(&mode)).unwrap();
        let z0 = mode.rayleigh_range();
        assert_abs_diff_eq!(z0, 0.5, epsilon = 1e-12);

        let same = free_space_propagate(&field, 0.0, mode.lambda).unwrap();
        assert_eq!(same, field);

        let moved = free_space_propagate(&field, z0, mode.lambda).unwrap();
        assert_abs_diff_eq!(moved.norm(), 1.0, epsilon = 1e-6);
        let (w0, _) = field.rms_widths();
        let (wz, _) = moved.rms_widths();
        assert_abs_diff_eq!(wz / w0, SQRT2, epsilon = 1e-3);

        assert!(matches!(
            free_space_propagate(&field, 200.0, mode.lambda),
            Err(Error::Aliasing { .. })
        ));
        assert!(free_space_propagate(&field, -1.0, mode.lambda).is_err());
    }

    #[test]
    fn field_format_round_trip_and_errors() {
        let mode = HgMode::new(1, 0, 1.0).unwrap();
        let field = sample(&mode, &GridSpec::new(6.0, 16)).unwrap();
        let text = write_field(&field);
        let back = parse_field(&text).unwrap();
        assert_eq!(field, back);

        assert!(parse_field("").is_err());
        assert!(parse_field("x1: 0 0.1 4\n").is_err());
        assert!(parse_field("x1: 0 0.1 4\nx2: 0 0.1 4\n1 2 3\n").is_err());
        assert!(parse_field("x1: 0 -1 4\nx2: 0 0.1 4\n").is_err());
        assert!(parse_field("x1: 0 0.1 99999999\nx2: 0 0.1 4\n").is_err());
        let nan = "x1: 0 1 2\nx2: 0 1 2\nnan 0 0 0 0 0 0 0\n";
        assert!(parse_field(nan).is_err());
    }

    proptest! {
        #[test]
        fn field_format_round_trips(
            c1 in -3.0f64..3.0,
            c2 in -3.0f64..3.0,
            step in 0.01f64..0.5,
            n1 in 2usize..9,
            n2 in 2usize..9,
            seed in any::<u64>(),
        ) {
            let x1 = GridAxis::new(c1, step, n1).unwrap();
            let x2 = GridAxis::new(c2, step * 1.5, n2).unwrap();
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let values: Vec<Complex64> = (0..n1 * n2)
                .map(|_| Complex64::new(next(), next()))
                .collect();
            let field = SampledField::from_parts(x1, x2, values).unwrap();
            let back = parse_field(&write_field(&field)).unwrap();
            prop_assert_eq!(field, back);
        }
    }
}
