use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{DyadicRectangle, GridFunction};
use crate::norms::herz::{char_rect_norm_closed_form, morrey_herz_norm, Space};
use crate::verify::report::{Check, InequalityReport, Trial};
use crate::verify::{CharNormsOptions, SuiteRun};

pub(super) fn run(run: &SuiteRun, opts: &CharNormsOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let levels: Vec<i32> = grid.aligned_levels().collect();
    let pairs: Vec<(i32, i32)> = levels.iter().flat_map(|&a| levels.iter().map(move |&b| (a, b))).collect();
    let rows: Vec<(i32, i32, f64, f64)> = pairs
        .par_iter()
        .map(|&(l1, l2)| {
            let chi = GridFunction::indicator(grid, &DyadicRectangle::new(l1, l2).to_grid(&grid)?)?;
            let norm = morrey_herz_norm(&chi, &prm)?;
            let closed = char_rect_norm_closed_form(&prm, l1, l2, Space::MorreyHerz)?;
            Ok((l1, l2, norm, closed))
        })
        .collect::<Result<_>>()?;

    let trials: Vec<Trial> = rows
        .iter()
        .enumerate()
        .map(|(i, &(l1, l2, norm, closed))| {
            Trial::new(i, format!("R_{{{l1},{l2}}}"), norm, closed).at((l1 + l2) as f64, norm.ln())
        })
        .collect();
    let rel = trials.iter().map(|t| (t.ratio - 1.0).abs()).fold(0.0, f64::max);

    // one level step along either axis scales the norm by 2^{α + 1/p - λ}
    let step = (prm.beta(1) - prm.lambda).exp2();
    let lookup = |l1: i32, l2: i32| rows.iter().find(|r| r.0 == l1 && r.1 == l2).map(|r| r.2);
    let mut step_err = 0.0f64;
    for &(l1, l2, norm, _) in &rows {
        for next in [lookup(l1 + 1, l2), lookup(l1, l2 + 1)].into_iter().flatten() {
            step_err = step_err.max((next / norm / step - 1.0).abs());
        }
    }
    let checks = vec![
        Check::at_most("closed_form_relative_error", rel, opts.tolerance),
        Check::at_most("level_step_relative_error", step_err, opts.tolerance),
    ];
    let notes = vec![format!("{} aligned level pairs; level step factor {step}", rows.len())];
    Ok(InequalityReport::new(run.clone(), trials, Vec::new(), checks, run.violated_hypotheses(), notes))
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
            Suite::default_for("char_norms").unwrap(),
        );
        let rep = run.run().unwrap();
        assert_eq!(rep.status, Status::Pass, "{:?}", rep.checks);
        assert_eq!(rep.trials.len(), 16);
    }
}
