//! Separable bi-parameter convolution operators with exact per-cell weights.
//!
//! For a piecewise-constant input the value at a cell centre is
//! `Σ_{c'} f_{c'} w₁(x_c, I_{c'}) w₂(y_c, J_{c'})`, where `wᵢ` is the exact (principal
//! value, for the cell containing the point) integral of the axis kernel over the
//! source interval. For `1/(πu)` this is `(1/π) ln|(x - a)/(x - b)|`; on a uniform grid
//! it only depends on the index offset, so each axis is a Toeplitz product and the whole
//! transform costs `O(N³)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// One factor of a separable kernel.
#[derive(Clone)]
pub enum AxisKernel {
    /// `1/(πu)`.
    Hilbert,
    /// A pointwise rule with no antiderivative; usable for condition checks only.
    Custom { name: String, eval: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for AxisKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisKernel::Hilbert => write!(f, "Hilbert"),
            AxisKernel::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl AxisKernel {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            AxisKernel::Hilbert => 1.0 / (PI * u),
            AxisKernel::Custom { eval, .. } => eval(u),
        }
    }

    /// Cell weights by index offset `d = target - source`, stored at `d + n - 1`.
    fn offset_weights(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            AxisKernel::Hilbert => {
                let mut w = vec![0.0; 2 * n - 1];
                for d in 1..n {
                    // ln((d + 1/2) / (d - 1/2))
                    let v = (1.0 / (d as f64 - 0.5)).ln_1p() / PI;
                    w[n - 1 + d] = v;
                    w[n - 1 - d] = -v;
                }
                Ok(w)
            }
            AxisKernel::Custom { name, .. } => {
                Err(Error::UnsupportedKernel(format!("axis kernel {name} has no per-cell antiderivative rule")))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeparableKernel {
    pub name: String,
    pub k1: AxisKernel,
    pub k2: AxisKernel,
    /// Smoothness exponent used by the condition checks.
    pub eta: f64,
}

pub const KERNEL_NAMES: &[&str] = &["double_hilbert"];

impl SeparableKernel {
    /// `K(x, y) = 1/(π² x y)`.
    pub fn double_hilbert() -> Self {
        SeparableKernel { name: "double_hilbert".into(), k1: AxisKernel::Hilbert, k2: AxisKernel::Hilbert, eta: 1.0 }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "double_hilbert" => Ok(Self::double_hilbert()),
            other => Err(Error::UnknownKernel(format!("{other} (known: {})", KERNEL_NAMES.join(", ")))),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.k1.eval(x) * self.k2.eval(y)
    }
}

fn toeplitz_rows(values: &[f64], n: usize, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).zip(values.par_chunks(n)).for_each(|(o, row)| {
        for (x, slot) in o.iter_mut().enumerate() {
            // source x' contributes w[x - x' + n - 1]
            let taps = &w[x..x + n];
            let mut acc = 0.0;
            for (xs, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    acc += v * taps[n - 1 - xs];
                }
            }
            *slot = acc;
        }
    });
    out
}

fn transpose(values: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            out[x * n + y] = values[y * n + x];
        }
    }
    out
}

/// `T_K f` at every cell centre.
pub fn cz_apply(f: &GridFunction, kernel: &SeparableKernel) -> Result<GridFunction> {
    let n = f.n();
    let w1 = kernel.k1.offset_weights(n)?;
    let w2 = kernel.k2.offset_weights(n)?;
    let along_x = toeplitz_rows(f.values(), n, &w1);
    let along_y = toeplitz_rows(&transpose(&along_x, n), n, &w2);
    GridFunction::from_values(*f.spec(), transpose(&along_y, n))
}

/// `[b, T_K] f = b T_K f - T_K(b f)`.
pub fn commutator(b: &GridFunction, f: &GridFunction, kernel: &SeparableKernel) -> Result<GridFunction> {
    let tf = cz_apply(f, kernel)?;
    let tbf = cz_apply(&b.mul(f)?, kernel)?;
    b.mul(&tf)?.sub(&tbf)
}

/// Log-spaced sample magnitudes `2^{e / per_octave}` for `e` in `[min_exp, max_exp] * per_octave`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_octave: u32,
    /// Midpoint nodes per annulus in the cancellation integrals.
    pub nodes: u32,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { min_exp: -6, max_exp: 6, per_octave: 2, nodes: 256 }
    }
}

impl SamplePlan {
    fn magnitudes(&self) -> Vec<f64> {
        let k = self.per_octave.max(1) as i32;
        (self.min_exp * k..=self.max_exp * k).map(|e| (e as f64 / k as f64).exp2()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConditionReport {
    pub kernel: String,
    pub eta: f64,
    /// Largest `|∫_{a<|x|<b} K(x, y) dx|` (and the same in `y`) over the samples.
    pub cancellation_max: f64,
    /// `sup |K(x, y) x y|`.
    pub size_constant: f64,
    /// `sup |K(x + h, y) - K(x, y)| |x|^{1+η} |y| / |h|^η` over `|x| > 2|h|`, both factors.
    pub smoothness_constant: f64,
    /// `sup |Δ_k Δ_h K| |x|^{1+η} |y|^{1+η} / (|h|^η |k|^η)` over `|x| > 2|h|, |y| > 2|k|`.
    pub mixed_constant: f64,
    pub samples: usize,
}

pub fn kernel_condition_check(kernel: &SeparableKernel, plan: &SamplePlan) -> Result<KernelConditionReport> {
    if plan.min_exp > plan.max_exp || plan.max_exp - plan.min_exp > 40 || plan.nodes == 0 || plan.nodes > 1 << 16 {
        return Err(Error::Parameter(format!("sample plan out of bounds: {plan:?}")));
    }
    let mags = plan.magnitudes();
    let signed: Vec<f64> = mags.iter().flat_map(|&m| [m, -m]).collect();
    let eta = kernel.eta;
    let k = |x: f64, y: f64| kernel.eval(x, y);
    let mut samples = 0usize;

    let mut cancellation = 0.0f64;
    let nodes = plan.nodes as usize;
    for &a in &mags {
        for ratio in [2.0, 8.0] {
            let b = a * ratio;
            let step = (b - a) / nodes as f64;
            for &t in &signed {
                let (mut ix, mut iy) = (0.0, 0.0);
                for i in 0..nodes {
                    let u = a + (i as f64 + 0.5) * step;
                    ix += (k(u, t) + k(-u, t)) * step;
                    iy += (k(t, u) + k(t, -u)) * step;
                }
                cancellation = cancellation.max(ix.abs()).max(iy.abs());
                samples += 1;
            }
        }
    }

    let mut size = 0.0f64;
    for &x in &signed {
        for &y in &signed {
            size = size.max((k(x, y) * x * y).abs());
            samples += 1;
        }
    }

    let mut smooth = 0.0f64;
    let mut mixed = 0.0f64;
    for &x in &signed {
        for &y in &signed {
            for &h in &signed {
                if x.abs() <= 2.0 * h.abs() {
                    continue;
                }
                let dx = (k(x + h, y) - k(x, y)).abs() * x.abs().powf(1.0 + eta) * y.abs() / h.abs().powf(eta);
                let dy = (k(y, x + h) - k(y, x)).abs() * x.abs().powf(1.0 + eta) * y.abs() / h.abs().powf(eta);
                smooth = smooth.max(dx).max(dy);
                samples += 1;
            }
        }
    }
    let coarse: Vec<f64> = signed.iter().copied().step_by(2).collect();
    for &x in &coarse {
        for &y in &coarse {
            for &h in &coarse {
                if x.abs() <= 2.0 * h.abs() {
                    continue;
                }
                for &kk in &coarse {
                    if y.abs() <= 2.0 * kk.abs() {
                        continue;
                    }
                    let d = k(x + h, y + kk) - k(x + h, y) - k(x, y + kk) + k(x, y);
                    let r = d.abs() * (x.abs() * y.abs()).powf(1.0 + eta) / (h.abs() * kk.abs()).powf(eta);
                    mixed = mixed.max(r);
                    samples += 1;
                }
            }
        }
    }
    Ok(KernelConditionReport {
        kernel: kernel.name.clone(),
        eta,
        cancellation_max: cancellation,
        size_constant: size,
        smoothness_constant: smooth,
        mixed_constant: mixed,
        samples,
    })
}
