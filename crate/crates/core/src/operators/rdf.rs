//! The Rubio de Francia iteration `ℜ_K h = Σ_{k<=K} M_S^k |h| / (2c)^k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::norms::block::block_upper;
use crate::norms::params::ExponentParams;
use crate::operators::maximal::{strong_maximal, MaximalVariant};

#[derive(Clone, Debug)]
pub struct RdfOutput {
    pub function: GridFunction,
    pub c: f64,
    pub k: u32,
    /// `2^-K`: what the first omitted term weighs relative to a sum with `c = 1`.
    pub tail_factor: f64,
}

/// Partial sums `ℜ_0 |h|, ..., ℜ_K |h|` of the series.
pub fn rubio_de_francia_partials(
    h: &GridFunction,
    c: f64,
    k: u32,
    variant: MaximalVariant,
) -> Result<Vec<GridFunction>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("the constant c must be positive and finite, got {c}")));
    }
    let mut term = h.abs();
    let mut sum = term.clone();
    let mut out = vec![sum.clone()];
    let mut scale = 1.0;
    for _ in 0..k {
        term = strong_maximal(&term, variant)?;
        scale /= 2.0 * c;
        sum = sum.zip_with(&term, |s, t| s + scale * t)?;
        out.push(sum.clone());
    }
    Ok(out)
}

pub fn rubio_de_francia(h: &GridFunction, c: f64, k: u32, variant: MaximalVariant) -> Result<RdfOutput> {
    if k < 1 {
        return Err(Error::Parameter("the truncation K must be at least 1".into()));
    }
    let function = rubio_de_francia_partials(h, c, k, variant)?.pop().expect("K + 1 partial sums");
    Ok(RdfOutput { function, c, k, tail_factor: (-(k as f64)).exp2() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CEstimate {
    pub c: f64,
    /// Largest observed ratio `upper(M_S g) / upper(g)` over the probes and iterations.
    pub observed: f64,
    pub ratios: Vec<f64>,
    pub floor: f64,
}

/// Power-iteration estimate of the operator norm of `M_S` on the block-Herz space:
/// each probe is pushed through `M_S` a few times, renormalized by its block upper
/// bound, and the largest ratio of upper bounds is kept. Because `M_S g >= |g|` the
/// true norm is at least one, which is used as a floor.
pub fn estimate_c(
    probes: &[GridFunction],
    params: &ExponentParams,
    variant: MaximalVariant,
    iterations: u32,
) -> Result<CEstimate> {
    let mut ratios = Vec::new();
    for h in probes {
        let (mut up, _) = block_upper(h, params)?;
        if up == 0.0 {
            continue;
        }
        let mut g = h.scale(1.0 / up)?;
        up = 1.0;
        for _ in 0..iterations.max(1) {
            let mg = strong_maximal(&g, variant)?;
            let (next, _) = block_upper(&mg, params)?;
            ratios.push(next / up);
            g = mg.scale(1.0 / next)?;
            up = 1.0;
        }
    }
    let observed = ratios.iter().copied().fold(0.0, f64::max);
    Ok(CEstimate { c: observed.max(1.0), observed, ratios, floor: 1.0 })
}
