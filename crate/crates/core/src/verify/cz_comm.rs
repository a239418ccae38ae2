use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{FunctionSpec, GridFunction, GridSpec};
use crate::norms::herz::morrey_herz_norm;
use crate::norms::params::ExponentParams;
use crate::operators::cz::{commutator, cz_apply, SeparableKernel};
use crate::verify::probes::{dilate, random_probe, rng};
use crate::verify::report::{Check, InequalityReport, Stability, Summary, Trial};
use crate::verify::{CzCommOptions, Expectation, SuiteRun};

const CONSTANT_TOLERANCE: f64 = 1e-8;

fn t_layer(
    grid: GridSpec,
    probes: &[(String, FunctionSpec)],
    k: &SeparableKernel,
    prm: &ExponentParams,
) -> Result<Vec<(f64, f64)>> {
    probes
        .par_iter()
        .map(|(_, s)| {
            let f = s.build(grid)?;
            Ok((morrey_herz_norm(&cz_apply(&f, k)?, prm)?, morrey_herz_norm(&f, prm)?))
        })
        .collect()
}

fn comm_ratio(b: &GridFunction, f: &FunctionSpec, k: &SeparableKernel, prm: &ExponentParams) -> Result<(f64, f64)> {
    let f = f.build(*b.spec())?;
    Ok((morrey_herz_norm(&commutator(b, &f, k)?, prm)?, morrey_herz_norm(&f, prm)?))
}

pub(super) fn run(run: &SuiteRun, opts: &CzCommOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let kernel = SeparableKernel::from_name(&opts.kernel)?;
    let mut trials = Vec::new();
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    let probes: Vec<_> = (0..opts.trials as u64).map(|t| random_probe(&mut rng(opts.seed, t), &grid)).collect();
    let base = t_layer(grid, &probes, &kernel, &prm)?;
    let fine = t_layer(grid.refined()?, &probes, &kernel, &prm)?;
    for ((label, _), (lhs, rhs)) in probes.iter().zip(&base) {
        trials.push(Trial::new(trials.len(), format!("operator/{label}"), *lhs, *rhs));
    }
    let sup = |rows: &[(f64, f64)]| rows.iter().map(|r| r.0 / r.1).fold(0.0, f64::max);
    let st = Stability::new("operator_sup_ratio", sup(&base), sup(&fine));
    checks.push(Check::at_most(
        "operator_non_finite_ratios",
        base.iter().filter(|r| !(r.0 / r.1).is_finite()).count() as f64,
        0.0,
    ));
    checks.push(Check::at_most("operator_sup_ratio", st.base, opts.cap));
    checks.push(Check::at_most("operator_refinement_drift", st.delta, opts.drift));

    if opts.sweep {
        let l0 = opts.base_level.unwrap_or(grid.l_max() - 5);
        let side = (l0 as f64).exp2();
        let bases = [
            ("cube".to_string(), FunctionSpec::DyadicIndicator { l1: l0, l2: l0 }),
            ("quadrant".to_string(), FunctionSpec::RectIndicator { x0: 0.0, x1: side, y0: -side, y1: 0.0 }),
        ];
        let constant = GridFunction::constant(grid, 2.5)?;
        let (cl, cr) = comm_ratio(&constant, &bases[0].1, &kernel, &prm)?;
        let ct = Trial::new(trials.len(), "commutator/constant", cl, cr);
        checks.push(Check::at_most("constant_symbol_ratio", ct.ratio, CONSTANT_TOLERANCE));
        trials.push(ct);

        let mut bmo_sup = 0.0f64;
        let mut bmo_spread = 0.0f64;
        let mut growth = f64::INFINITY;
        let mut decreasing = 0usize;
        for (si, sym) in opts.symbols.iter().enumerate() {
            let b = sym.function.build(grid)?;
            for (bname, bspec) in &bases {
                let curve: Vec<(f64, f64, f64)> = opts
                    .dilations
                    .par_iter()
                    .map(|&t| {
                        let (l, r) = comm_ratio(&b, &dilate(bspec, t)?, &kernel, &prm)?;
                        Ok((t, l, r))
                    })
                    .collect::<Result<_>>()?;
                let tag = match sym.expect {
                    Expectation::Bmo => "bmo",
                    Expectation::NonBmo => "non_bmo",
                };
                let mut rs = Vec::new();
                for (t, l, r) in curve {
                    let tr = Trial::new(trials.len(), format!("commutator/{tag}{si}/{bname}/t={t}"), l, r);
                    rs.push(tr.ratio);
                    trials.push(tr.at(t, l / r));
                }
                match sym.expect {
                    Expectation::Bmo => {
                        let s = Summary::of(&rs);
                        bmo_sup = bmo_sup.max(s.max);
                        bmo_spread = bmo_spread.max(s.max / s.min);
                    }
                    Expectation::NonBmo => {
                        growth = growth.min(rs[rs.len() - 1] / rs[0]);
                        decreasing += rs.windows(2).filter(|w| w[1] < w[0]).count();
                    }
                }
            }
        }
        if opts.symbols.iter().any(|s| s.expect == Expectation::Bmo) {
            checks.push(Check::at_most("bmo_commutator_sup_ratio", bmo_sup, opts.cap));
            checks.push(Check::at_most("bmo_commutator_sweep_spread", bmo_spread, opts.bmo_spread));
        }
        if growth.is_finite() {
            checks.push(Check::at_least("non_bmo_commutator_growth", growth, opts.growth));
            checks.push(Check::at_most("non_bmo_decreasing_steps", decreasing as f64, 0.0));
        }
        notes.push(format!("dilation sweep of the level-{l0} cube and quadrant over t = {:?}", opts.dilations));
    }
    Ok(InequalityReport::new(run.clone(), trials, vec![st], checks, run.violated_hypotheses(), notes))
}
