use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DyadicRectangle, GridFunction, GridRectangle, GridSpec, MAX_LEVEL_SUM};
use crate::norms::bmo::{bmo_mk_norm, bmo_norm, rect_mean};
use crate::norms::herz::morrey_herz_norm;
use crate::norms::params::{recip, ExponentParams};
use crate::verify::report::{Check, InequalityReport, Stability, Summary, Trial};
use crate::verify::{JohnNirenbergOptions, SuiteRun};

/// Least-squares line `y = a + b x`: returns `(slope, intercept, R²)`.
pub fn line_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// `χ_{{|b - b_R| > γ} ∩ R}`, tested at cell centres.
pub fn level_set(b: &GridFunction, rect: &GridRectangle, gamma: f64) -> Result<GridFunction> {
    let mean = rect_mean(b, rect);
    let n = b.n();
    let mut v = vec![0.0; n * n];
    for iy in rect.iy0..rect.iy1 {
        for ix in rect.ix0..rect.ix1 {
            if (b.value(ix, iy) - mean).abs() > gamma {
                v[iy * n + ix] = 1.0;
            }
        }
    }
    GridFunction::from_values(*b.spec(), v)
}

/// The level set of `b` measured on a grid `2^sub` times finer: each coarse cell
/// carries `(area fraction)^{1/p}`, so its `L^p` mass is the measured area of the set
/// in that cell. Returns the coarse function and the area fraction of the set in `R`.
pub fn level_set_fraction(
    fine: &GridFunction,
    sub: u32,
    coarse: GridSpec,
    rect: &GridRectangle,
    gamma: f64,
    p: f64,
) -> Result<(GridFunction, f64)> {
    let k = 1usize << sub;
    let fr = GridRectangle::new(rect.ix0 * k, rect.ix1 * k, rect.iy0 * k, rect.iy1 * k)?;
    let mean = rect_mean(fine, &fr);
    let n = coarse.n();
    let mut v = vec![0.0; n * n];
    let mut total = 0usize;
    for iy in rect.iy0..rect.iy1 {
        for ix in rect.ix0..rect.ix1 {
            let mut hits = 0usize;
            for fy in iy * k..(iy + 1) * k {
                hits += fine.row(fy)[ix * k..(ix + 1) * k].iter().filter(|x| (**x - mean).abs() > gamma).count();
            }
            total += hits;
            v[iy * n + ix] = (hits as f64 / (k * k) as f64).powf(recip(p));
        }
    }
    Ok((GridFunction::from_values(coarse, v)?, total as f64 / (fr.cells()) as f64))
}

/// Per-axis supersampling used for level sets: up to eight, within the grid size guard.
pub fn supersampling(grid: &GridSpec) -> u32 {
    (MAX_LEVEL_SUM - grid.l_max() - grid.s()).clamp(0, 3) as u32
}

fn nonconstant(b: &GridFunction) -> Result<()> {
    let v = b.values();
    if v.iter().all(|x| *x == v[0]) {
        return Err(Error::DegenerateSymbol(format!("the symbol is constant ({})", v[0])));
    }
    Ok(())
}

fn equivalence(grid: GridSpec, opts: &JohnNirenbergOptions, prm: &ExponentParams) -> Result<Vec<Option<(f64, f64)>>> {
    opts.test_symbols
        .par_iter()
        .map(|s| {
            let b = s.build(grid)?;
            let bmo = bmo_norm(&b, &opts.family)?;
            if bmo == 0.0 {
                return Ok(None);
            }
            Ok(Some((bmo_mk_norm(&b, prm, &opts.family)?, bmo)))
        })
        .collect()
}

pub(super) fn run(run: &SuiteRun, opts: &JohnNirenbergOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let b = opts.symbol.build(grid)?;
    nonconstant(&b)?;
    let mut notes = Vec::new();
    let mut trials = Vec::new();
    let mut checks = Vec::new();

    let mut rects = vec![("box".to_string(), grid.whole())];
    for &(l1, l2) in &opts.rectangles {
        rects.push((format!("R_{{{l1},{l2}}}"), DyadicRectangle::new(l1, l2).to_grid(&grid)?));
    }
    let sub = supersampling(&grid);
    let fine = opts.symbol.build(GridSpec::new(grid.l_max(), grid.s() + sub as i32)?)?;
    notes.push(format!("level sets measured with {0}x{0} sub-samples per cell", 1u32 << sub));
    let mut fit_points = Vec::new();
    for (name, rect) in &rects {
        let full = morrey_herz_norm(&GridFunction::indicator(grid, rect)?, &prm)?;
        let rows: Vec<(f64, f64, f64)> = opts
            .gammas
            .par_iter()
            .map(|&gamma| {
                let (e, frac) = level_set_fraction(&fine, sub, grid, rect, gamma, prm.p)?;
                Ok((gamma, morrey_herz_norm(&e, &prm)?, frac))
            })
            .collect::<Result<_>>()?;
        for (gamma, mk, frac) in rows {
            let t = Trial::new(trials.len(), format!("level_set/{name}/gamma={gamma}"), mk, full);
            let y = t.ratio.ln();
            if name == "box" && t.ratio > 0.0 {
                fit_points.push((gamma, y));
            }
            trials.push(t.at(gamma, y));
            let m = Trial::new(trials.len(), format!("measure/{name}/gamma={gamma}"), frac, 1.0);
            trials.push(m.at(gamma, frac.ln()));
        }
    }
    if fit_points.len() >= 2 {
        let (slope, intercept, r2) = line_fit(&fit_points);
        checks.push(Check::at_most("decay_fit_slope", slope, 0.0));
        checks.push(Check::at_least("decay_fit_r2", r2, opts.r2_min));
        notes.push(format!("log level-set ratio ≈ {intercept} + ({slope}) γ over {} points", fit_points.len()));
    } else {
        notes.push("level sets inside the box are empty beyond the first γ: bounded symbol, decay is trivial".into());
    }

    let base = equivalence(grid, opts, &prm)?;
    let fine = equivalence(grid.refined()?, opts, &prm)?;
    let mut ratios = Vec::new();
    let mut drift = 0.0f64;
    for (i, (a, f)) in base.iter().zip(&fine).enumerate() {
        match (a, f) {
            (Some((mk, bmo)), Some((mk1, bmo1))) => {
                let t = Trial::new(trials.len(), format!("equivalence/symbol{i}"), *mk, *bmo);
                ratios.push(t.ratio);
                drift = drift.max(Stability::new("", t.ratio, mk1 / bmo1).delta);
                trials.push(t);
            }
            _ => notes.push(format!("test symbol {i} is constant; skipped")),
        }
    }
    let mut stability = Vec::new();
    if !ratios.is_empty() {
        let s = Summary::of(&ratios);
        checks.push(Check::at_most("equivalence_max_ratio", s.max, opts.ratio_cap));
        checks.push(Check::at_least("equivalence_min_ratio", s.min, 1.0 / opts.ratio_cap));
        checks.push(Check::at_most("equivalence_refinement_drift", drift, opts.drift));
        let fine_max = fine.iter().flatten().map(|(m, b)| m / b).fold(0.0, f64::max);
        stability.push(Stability::new("equivalence_max_ratio", s.max, fine_max));
    }
    Ok(InequalityReport::new(run.clone(), trials, stability, checks, run.violated_hypotheses(), notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, FunctionSpec};
    use crate::verify::{Suite, SuiteRun};

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        let (s, a, r2) = line_fit(&pts);
        assert!((s + 0.5).abs() < 1e-14 && (a - 2.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_symbol_is_rejected() {
        let g = make_grid(2, 2).unwrap();
        let prm = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap();
        let suite: Suite = serde_json::from_value(serde_json::json!({
            "suite": "john_nirenberg_bmo", "symbol": {"kind": "constant", "value": 2.0}
        }))
        .unwrap();
        assert!(matches!(SuiteRun::new(g, prm, suite).run(), Err(Error::DegenerateSymbol(_))));
    }

    #[test]
    fn bounded_symbol_has_empty_level_sets() {
        let g = make_grid(2, 2).unwrap();
        let b = FunctionSpec::RectIndicator { x0: -1.0, x1: 1.0, y0: 0.0, y1: 1.0 }.build(g).unwrap();
        assert!(level_set(&b, &g.whole(), 1.0).unwrap().is_zero());
        assert!(!level_set(&b, &g.whole(), 0.05).unwrap().is_zero());
    }

    #[test]
    fn fractions_match_the_cell_test_without_sub_samples() {
        let g = make_grid(2, 2).unwrap();
        let b = FunctionSpec::TruncatedLog { axes: crate::grid::LogAxes::Both, clip: None }.build(g).unwrap();
        let r = GridRectangle::new(3, 13, 2, 9).unwrap();
        let (frac, m) = level_set_fraction(&b, 0, g, &r, 0.7, 2.0).unwrap();
        let set = level_set(&b, &r, 0.7).unwrap();
        assert_eq!(frac.values(), set.values());
        let cells = set.values().iter().filter(|v| **v > 0.0).count();
        assert_eq!(m, cells as f64 / r.cells() as f64);
        // sub-sampled fractions carry the set's area as L^2 mass
        let fine = b.spec().refined().unwrap().refined().unwrap();
        let bf = FunctionSpec::Gaussian { cx: 0.0, cy: 0.0, sigma: 1.0, amplitude: 1.0 }.build(fine).unwrap();
        let (e, m) = level_set_fraction(&bf, 2, g, &g.whole(), 0.1, 2.0).unwrap();
        let mass: f64 = e.values().iter().map(|v| v * v).sum::<f64>() * g.cell_area();
        assert!((mass - m * g.box_area()).abs() < 1e-12);
    }
}
