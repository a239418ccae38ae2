use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{DyadicRectangle, GridFunction, GridSpec};
use crate::norms::block::{block_upper, extremals, pairing};
use crate::norms::herz::{herz_norm, morrey_herz_norm};
use crate::norms::params::ExponentParams;
use crate::verify::probes::{random_probe, rng};
use crate::verify::report::{Check, InequalityReport, Stability, Summary, Trial};
use crate::verify::{NormDualityOptions, SuiteRun};

const HOLDER_SLACK: f64 = 1e-9;

/// `‖χ_R‖_X ‖χ_R‖_Y / |R|` for every level pair, as `(l1, l2, product, |R|)`.
fn rectangle_sweep(
    grid: GridSpec,
    levels: &[i32],
    norm: impl Fn(&GridFunction) -> Result<f64> + Sync,
) -> Result<Vec<(i32, i32, f64, f64)>> {
    let pairs: Vec<(i32, i32)> = levels.iter().flat_map(|&a| levels.iter().map(move |&b| (a, b))).collect();
    pairs
        .par_iter()
        .map(|&(l1, l2)| {
            let r = DyadicRectangle::new(l1, l2);
            let chi = GridFunction::indicator(grid, &r.to_grid(&grid)?)?;
            Ok((l1, l2, norm(&chi)?, r.measure()))
        })
        .collect()
}

fn spread(rows: &[(i32, i32, f64, f64)]) -> f64 {
    let s = Summary::of(&rows.iter().map(|r| r.2 / r.3).collect::<Vec<_>>());
    s.max / s.min
}

/// Lower estimate of `‖f‖_MK̇` by pairing with Hölder extremals of `f` restricted to
/// each centred dyadic rectangle, each measured by its block upper bound.
fn sup_pairing(f: &GridFunction, prm: &ExponentParams) -> Result<f64> {
    let grid = *f.spec();
    let dual = prm.dual();
    let mut best = 0.0f64;
    for l1 in grid.aligned_levels() {
        for l2 in grid.aligned_levels() {
            let fr = f.restrict(&DyadicRectangle::new(l1, l2).to_grid(&grid)?)?;
            let Some((_, g)) = extremals(&fr, prm)? else { continue };
            let (up, _) = block_upper(&g, &dual)?;
            if up > 0.0 {
                best = best.max(pairing(f, &g)? / up);
            }
        }
    }
    Ok(best)
}

pub(super) fn run(run: &SuiteRun, opts: &NormDualityOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let dual = prm.dual();
    let herz_dual = dual.with_lambda(0.0);
    let mut notes = Vec::new();
    let mut trials = Vec::new();
    let mut checks = Vec::new();
    let mut stability = Vec::new();

    // (i) Hölder pairing in the Herz scale
    let pairs: Vec<(String, f64, f64)> = (0..opts.trials as u64)
        .into_par_iter()
        .map(|t| {
            let (lf, sf) = random_probe(&mut rng(opts.seed, 2 * t), &grid);
            let (lg, sg) = random_probe(&mut rng(opts.seed, 2 * t + 1), &grid);
            let (f, g) = (sf.build(grid)?, sg.build(grid)?);
            let rhs = herz_norm(&f, &herz_dual)? * herz_norm(&g, &prm)?;
            Ok((format!("holder/{lf}x{lg}"), pairing(&f, &g)?, rhs))
        })
        .collect::<Result<_>>()?;
    trials.push(Trial::new(0, "holder/zero", 0.0, 0.0));
    for (label, lhs, rhs) in pairs {
        trials.push(Trial::new(trials.len(), label, lhs, rhs));
    }
    let holder_max = trials.iter().map(|t| t.ratio).fold(0.0, f64::max);
    checks.push(Check::at_most("holder_max_ratio", holder_max, 1.0 + HOLDER_SLACK));

    // (ii) norm products of rectangle indicators against |R|
    let levels: Vec<i32> = match opts.levels {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => grid.aligned_levels().collect(),
    };
    let herz_product = |chi: &GridFunction| Ok(herz_norm(chi, &prm)? * herz_norm(chi, &herz_dual)?);
    let base = rectangle_sweep(grid, &levels, herz_product)?;
    let fine = rectangle_sweep(grid.refined()?, &levels, herz_product)?;
    for &(l1, l2, v, m) in &base {
        trials.push(Trial::new(trials.len(), format!("herz_product/R_{{{l1},{l2}}}"), v, m));
    }
    let (s0, s1) = (spread(&base), spread(&fine));
    checks.push(Check::at_most("herz_product_spread", s0, opts.spread_cap));
    let st = Stability::new("herz_product_spread", s0, s1);
    checks.push(Check::at_most("herz_product_spread_drift", st.delta, opts.drift));
    stability.push(st);

    let mk_block = |chi: &GridFunction| Ok(morrey_herz_norm(chi, &prm)? * block_upper(chi, &dual)?.0);
    match rectangle_sweep(grid, &levels, mk_block) {
        Ok(rows) => {
            for &(l1, l2, v, m) in &rows {
                trials.push(Trial::new(trials.len(), format!("mk_block_product/R_{{{l1},{l2}}}"), v, m));
            }
            checks.push(Check::at_most("mk_block_product_spread", spread(&rows), opts.spread_cap));
        }
        Err(e) => notes.push(format!("Morrey-Herz / block product sweep skipped: {e}")),
    }

    // (iii) sup-pairing lower bound against the Morrey-Herz norm
    let sup: Vec<Result<(String, f64, f64)>> = (0..opts.trials as u64)
        .into_par_iter()
        .map(|t| {
            let (label, spec) = random_probe(&mut rng(opts.seed ^ 0x5eed, t), &grid);
            let f = spec.build(grid)?;
            Ok((format!("sup_pairing/{label}"), sup_pairing(&f, &prm)?, morrey_herz_norm(&f, &prm)?))
        })
        .collect();
    let mut sup_ratios = Vec::new();
    for r in sup {
        match r {
            Ok((label, lhs, rhs)) if rhs > 0.0 => {
                let t = Trial::new(trials.len(), label, lhs, rhs);
                sup_ratios.push(t.ratio);
                trials.push(t);
            }
            Ok(_) => {}
            Err(e) => notes.push(format!("sup-pairing trial skipped: {e}")),
        }
    }
    if !sup_ratios.is_empty() {
        let s = Summary::of(&sup_ratios);
        checks.push(Check::at_most("sup_pairing_max_ratio", s.max, 1.0 + HOLDER_SLACK));
        checks.push(Check::at_least("sup_pairing_min_ratio", s.min, 1.0 / opts.spread_cap));
    }
    Ok(InequalityReport::new(run.clone(), trials, stability, checks, run.violated_hypotheses(), notes))
}

#[cfg(test)]
mod tests {
    use crate::grid::make_grid;
    use crate::norms::params::ExponentParams;
    use crate::verify::{Status, Suite, SuiteRun};

    #[test]
    fn small_grid_passes() {
        let run = SuiteRun::new(
            make_grid(2, 2).unwrap(),
            ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap(),
            Suite::default_for("norm_duality").unwrap(),
        );
        let rep = run.run().unwrap();
        assert_eq!(rep.status, Status::Pass, "{:#?}\n{:?}", rep.checks, rep.notes);
    }
}
