//! Certified two-sided bounds for the block-Herz norm.
//!
//! The norm is an infimum over decompositions `g = Σ μ_k b_k` into blocks `b_k`
//! supported in dyadic rectangles `R_{l1,l2}` with `‖b_k‖_K̇ <= 2^{-(l1+l2)λ}`.
//! Any explicit decomposition gives an upper bound `Σ |μ_k|`. Pairing against a test
//! function `f` gives the lower bound `∫|fg| / ‖f‖_MK̇` for the dual exponents
//! `(-α, p', q', λ)`. Hölder's inequality in the Herz scale has constant one, so
//! `lower <= upper` holds exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DyadicRectangle, GridFunction, GridRectangle};
use crate::norms::herz::{morrey_herz_norm, ClassProfile, HerzProfile};
use crate::norms::params::ExponentParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub upper_method: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl NormBracket {
    pub fn width_ratio(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }
}

/// `∫ |f g|`.
pub fn pairing(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.same_grid(g)?;
    let s: f64 = f.values().iter().zip(g.values()).map(|(a, b)| (a * b).abs()).sum();
    Ok(s * f.spec().cell_area())
}

fn check_block_params(params: &ExponentParams) -> Result<()> {
    params.validate()?;
    params.pred_block()?;
    if params.p < 1.0 || params.q < 1.0 {
        return Err(Error::Parameter(format!(
            "block brackets need p, q >= 1 for the dual exponents; got p = {}, q = {}",
            params.p, params.q
        )));
    }
    Ok(())
}

/// Upper bound only: the better of a single enclosing block and one block per level class pair.
pub fn block_upper(g: &GridFunction, params: &ExponentParams) -> Result<(f64, String)> {
    check_block_params(params)?;
    if g.is_zero() {
        return Ok((0.0, "zero function".into()));
    }
    let spec = g.spec();
    let profile = ClassProfile::of(g, params.p);
    let herz = HerzProfile::checked(&profile, params).map_err(|d| Error::Support {
        count: g.support().count(),
        cells: g.support().take(8).collect(),
        reason: d.0,
    })?;
    let lambda = params.lambda;
    let (mut l1, mut l2) = (spec.innermost_level(), spec.innermost_level());
    for (ix, iy) in g.support() {
        l1 = l1.max(spec.axis_level(ix));
        l2 = l2.max(spec.axis_level(iy));
    }
    let single = (((l1 + l2) as f64) * lambda).exp2() * herz.herz();
    let k = profile.classes();
    let mut pieces = 0.0;
    for a in 0..k {
        for b in 0..k {
            if profile.mass(a, b) != 0.0 {
                let lv = (spec.class_level(a) + spec.class_level(b)) as f64;
                pieces += (lv * lambda).exp2() * herz.piece(a, b);
            }
        }
    }
    Ok(if single <= pieces {
        (single, format!("single block on R_{{{l1},{l2}}}"))
    } else {
        (pieces, "one block per level class pair".into())
    })
}

/// Test functions for the lower bound: centred dyadic indicators, level class
/// indicators, `|g|^{p-1}`, and `|g|^{p-1}` reweighted per class pair toward the
/// Hölder extremal of the Herz pairing.
pub fn default_test_family(g: &GridFunction, params: &ExponentParams) -> Result<Vec<GridFunction>> {
    let spec = *g.spec();
    let mut out = Vec::new();
    for l1 in spec.aligned_levels() {
        for l2 in spec.aligned_levels() {
            out.push(GridFunction::indicator(spec, &DyadicRectangle::new(l1, l2).to_grid(&spec)?)?);
        }
    }
    let n = spec.n();
    let k = spec.num_classes();
    let cls: Vec<usize> = (0..n).map(|i| spec.level_class(i)).collect();
    for a in 0..k {
        for b in 0..k {
            let mut v = vec![0.0; n * n];
            for iy in 0..n {
                if cls[iy] == b {
                    for ix in 0..n {
                        if cls[ix] == a {
                            v[iy * n + ix] = 1.0;
                        }
                    }
                }
            }
            out.push(GridFunction::from_values(spec, v)?);
        }
    }
    if let Some((base, tuned)) = extremals(g, params)? {
        out.push(base);
        out.push(tuned);
    }
    Ok(out)
}

/// `|g|^{p-1}` and its reweighting per class pair toward the Hölder extremal of the
/// Herz pairing with `g`; `None` for `g = 0` or `p = ∞`.
pub fn extremals(g: &GridFunction, params: &ExponentParams) -> Result<Option<(GridFunction, GridFunction)>> {
    if g.is_zero() || !params.p.is_finite() {
        return Ok(None);
    }
    let spec = *g.spec();
    let (n, k) = (spec.n(), spec.num_classes());
    let cls: Vec<usize> = (0..n).map(|i| spec.level_class(i)).collect();
    let p = params.p;
    let base = g.map(|v| v.abs().powf(p - 1.0))?;
    let profile = ClassProfile::of(g, p);
    let mut weights = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let mu = profile.mass(a, b);
            if mu > 0.0 {
                let lv = (spec.class_level(a) + spec.class_level(b)) as f64;
                let amp = (lv * params.alpha).exp2() * mu.powf(1.0 / p);
                let qm1 = if params.q.is_finite() { params.q - 1.0 } else { 0.0 };
                weights[a * k + b] = (lv * params.alpha).exp2() * amp.powf(qm1) * mu.powf(-(p - 1.0) / p);
            }
        }
    }
    let tuned: Vec<f64> =
        base.values().iter().enumerate().map(|(c, v)| v * weights[cls[c % n] * k + cls[c / n]]).collect();
    let tuned = GridFunction::from_values(spec, tuned)?;
    Ok(Some((base, tuned)))
}

/// Certified bracket `lower <= ‖g‖_BK̇ <= upper`.
pub fn block_norm_bracket(
    g: &GridFunction,
    params: &ExponentParams,
    test_family: &[GridFunction],
) -> Result<NormBracket> {
    check_block_params(params)?;
    if g.is_zero() {
        return Ok(NormBracket {
            lower: 0.0,
            upper: 0.0,
            lower_method: "zero function".into(),
            upper_method: "zero function".into(),
            notes: Vec::new(),
        });
    }
    let (upper, upper_method) = block_upper(g, params)?;
    let dual = params.dual();
    let mut notes = Vec::new();
    let mut lower = 0.0f64;
    let mut best = None;
    if test_family.is_empty() {
        notes.push("empty test family: lower bound is 0".into());
    }
    for (i, f) in test_family.iter().enumerate() {
        let pair = pairing(f, g)?;
        if pair == 0.0 {
            continue;
        }
        match morrey_herz_norm(f, &dual) {
            Ok(d) if d > 0.0 && d.is_finite() => {
                if pair / d > lower {
                    lower = pair / d;
                    best = Some(i);
                }
            }
            Ok(_) => {}
            Err(e) => notes.push(format!("test function {i} skipped: {e}")),
        }
    }
    let lower_method = match best {
        Some(i) => format!("pairing with test function {i} of {}", test_family.len()),
        None => "no test function pairs with g".into(),
    };
    Ok(NormBracket { lower, upper, lower_method, upper_method, notes })
}

/// Smallest centred dyadic rectangle containing `rect`.
pub fn enclosing_dyadic(spec: &crate::grid::GridSpec, rect: &GridRectangle) -> DyadicRectangle {
    let lx = spec.axis_level(rect.ix0).max(spec.axis_level(rect.ix1 - 1));
    let ly = spec.axis_level(rect.iy0).max(spec.axis_level(rect.iy1 - 1));
    DyadicRectangle::new(lx, ly)
}
