//! Little bmo and its Morrey-Herz counterpart.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridRectangle};
use crate::norms::family::RectangleFamily;
use crate::norms::herz::{ClassProfile, HerzProfile, Truncation};
use crate::norms::params::ExponentParams;

/// Exact mean `f_R` of `f` over `rect`.
pub fn rect_mean(f: &GridFunction, rect: &GridRectangle) -> f64 {
    f.cell_sum(rect, false) / rect.cells() as f64
}

/// `(1/|R|) ∫_R |f - f_R|`, summed directly over the cells of `R`.
pub fn mean_oscillation(f: &GridFunction, rect: &GridRectangle) -> f64 {
    let mean = rect_mean(f, rect);
    let mut acc = 0.0;
    for iy in rect.iy0..rect.iy1 {
        acc += f.row(iy)[rect.ix0..rect.ix1].iter().map(|v| (v - mean).abs()).sum::<f64>();
    }
    acc / rect.cells() as f64
}

/// `sup_R (1/|R|) ∫_R |f - f_R|` over the family.
pub fn bmo_norm(f: &GridFunction, family: &RectangleFamily) -> Result<f64> {
    bmo_norm_arg(f, family).map(|(v, _)| v)
}

/// [`bmo_norm`] together with the first rectangle attaining it.
pub fn bmo_norm_arg(f: &GridFunction, family: &RectangleFamily) -> Result<(f64, GridRectangle)> {
    family
        .max_over(f.spec(), |r| Ok(mean_oscillation(f, r)))?
        .ok_or_else(|| Error::Domain("empty rectangle family".into()))
}

/// `‖(f - f_R) χ_R‖_MK̇ / ‖χ_R‖_MK̇` for one rectangle.
pub fn mk_oscillation(f: &GridFunction, params: &ExponentParams, rect: &GridRectangle) -> Result<f64> {
    let spec = f.spec();
    let mean = rect_mean(f, rect);
    let osc = ClassProfile::build(spec, rect, params.p, |ix, iy| f.value(ix, iy) - mean);
    let ind = ClassProfile::build(spec, rect, params.p, |_, _| 1.0);
    let support = |reason: String| Error::Support { count: rect.cells(), cells: vec![(rect.ix0, rect.iy0)], reason };
    let num = HerzProfile::checked(&osc, params)
        .map_err(|d| support(d.0))?
        .morrey_herz(Truncation::Rectangular)
        .map_err(support)?;
    let den = HerzProfile::checked(&ind, params)
        .map_err(|d| support(d.0))?
        .morrey_herz(Truncation::Rectangular)
        .map_err(support)?;
    if den <= 0.0 {
        return Err(Error::Domain(format!("rectangle {rect:?} has zero Morrey-Herz norm")));
    }
    Ok(num / den)
}

/// `sup_R ‖(f - f_R) χ_R‖_MK̇ / ‖χ_R‖_MK̇` over the family.
pub fn bmo_mk_norm(f: &GridFunction, params: &ExponentParams, family: &RectangleFamily) -> Result<f64> {
    params.pred_char()?;
    params.pred_ms_herz()?;
    if params.n != 1 || params.m != 1 {
        return Err(Error::Parameter("sampled grids have one dimension per factor".into()));
    }
    family
        .max_over(f.spec(), |r| mk_oscillation(f, params, r))?
        .map(|(v, _)| v)
        .ok_or_else(|| Error::Domain("empty rectangle family".into()))
}
