use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{FunctionSpec, GridFunction, GridSpec};
use crate::norms::block::block_upper;
use crate::norms::family::RectangleFamily;
use crate::norms::herz::morrey_herz_norm;
use crate::norms::params::ExponentParams;
use crate::operators::cz::cz_apply;
use crate::operators::maximal::{strong_maximal, MaximalVariant};
use crate::operators::rdf::{estimate_c, CEstimate};
use crate::verify::probes::{random_probe, rng};
use crate::verify::report::{Check, InequalityReport, Stability, Summary, Trial};
use crate::verify::{operator_from_name, weight_block_params, ExtrapolationOptions, NamedOperator, SuiteRun};
use crate::weights::{ap_star_characteristic, generate_a1_weight, weighted_lp_norm, WeightFunction};

const H_STREAM: u64 = 1 << 32;

fn apply(op: &NamedOperator, f: &GridFunction, variant: MaximalVariant) -> Result<GridFunction> {
    match op {
        NamedOperator::StrongMaximal => strong_maximal(f, variant),
        NamedOperator::Singular(k) => cz_apply(f, k),
    }
}

struct Layers {
    /// `(label, lhs, rhs)` of the weighted `L^{p0}` layer, the unit weight first.
    weighted: Vec<(String, f64, f64)>,
    morrey_herz: Vec<(String, f64, f64)>,
    /// `(label, [w]_{A_1*})` of every generated weight.
    a1: Vec<(String, f64)>,
}

fn sup(rows: &[(String, f64, f64)]) -> f64 {
    rows.iter().map(|r| r.1 / r.2).fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn measure(
    grid: GridSpec,
    op: &NamedOperator,
    fs: &[(String, FunctionSpec)],
    hs: &[(String, FunctionSpec)],
    c: f64,
    normalize: Option<&ExponentParams>,
    opts: &ExtrapolationOptions,
    prm: &ExponentParams,
) -> Result<Layers> {
    let rows: Vec<_> = fs
        .par_iter()
        .zip(hs)
        .map(|((lf, sf), (lh, sh))| {
            let f = sf.build(grid)?;
            let tf = apply(op, &f, opts.variant)?;
            let gw = generate_a1_weight(&sh.build(grid)?, c, opts.k, opts.variant, normalize)?;
            let a1 = ap_star_characteristic(&gw.weight, 1.0, &RectangleFamily::dyadic_sides())?;
            let wl = (weighted_lp_norm(&tf, &gw.weight, opts.p0)?, weighted_lp_norm(&f, &gw.weight, opts.p0)?);
            let mk = (morrey_herz_norm(&tf, prm)?, morrey_herz_norm(&f, prm)?);
            Ok((format!("{lf}/v={lh}"), lf.clone(), wl, mk, (lh.clone(), a1)))
        })
        .collect::<Result<_>>()?;
    let unit = WeightFunction::new(GridFunction::constant(grid, 1.0)?)?;
    let (lf, sf) = &fs[0];
    let f = sf.build(grid)?;
    let tf = apply(op, &f, opts.variant)?;
    let mut out = Layers {
        weighted: vec![(
            format!("{lf}/v=unit"),
            weighted_lp_norm(&tf, &unit, opts.p0)?,
            weighted_lp_norm(&f, &unit, opts.p0)?,
        )],
        morrey_herz: Vec::new(),
        a1: Vec::new(),
    };
    for (label, lf, wl, mk, a1) in rows {
        out.weighted.push((label, wl.0, wl.1));
        out.morrey_herz.push((lf, mk.0, mk.1));
        out.a1.push(a1);
    }
    Ok(out)
}

struct Generators {
    hs: Vec<(String, FunctionSpec)>,
    built: Vec<GridFunction>,
    /// Block exponents the generators are normalized in, or why they cannot be.
    normalize: std::result::Result<ExponentParams, String>,
}

fn generators(run: &SuiteRun, opts: &ExtrapolationOptions) -> Result<Generators> {
    let grid = run.grid;
    let hs: Vec<_> = (0..opts.trials as u64).map(|t| random_probe(&mut rng(opts.seed, H_STREAM | t), &grid)).collect();
    let block = weight_block_params(&run.params, opts.p0)?;
    let built: Vec<GridFunction> = hs.iter().map(|(_, s)| s.build(grid)).collect::<Result<_>>()?;
    let normalize = match built.iter().try_for_each(|h| block_upper(h, &block).map(|_| ())) {
        Ok(()) => Ok(block),
        Err(e) => Err(e.to_string()),
    };
    Ok(Generators { hs, built, normalize })
}

/// Power-iteration estimate of `c` over the run's own weight generators, normalized in
/// the block space the weights are measured against.
pub fn estimate_weight_constant(run: &SuiteRun, opts: &ExtrapolationOptions) -> Result<CEstimate> {
    let g = generators(run, opts)?;
    let block = g.normalize.map_err(|e| Error::Config(format!("weight generators cannot be normalized: {e}")))?;
    estimate_c(&g.built, &block, opts.variant, 3)
}

pub(super) fn run(run: &SuiteRun, opts: &ExtrapolationOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let op = operator_from_name(&opts.operator)?;
    let mut notes = Vec::new();
    let fs: Vec<_> = (0..opts.trials as u64).map(|t| random_probe(&mut rng(opts.seed, t), &grid)).collect();
    let Generators { hs, built, normalize } = generators(run, opts)?;
    let normalize = match normalize {
        Ok(b) => Some(b),
        Err(e) => {
            notes.push(format!("weight generators left unnormalized: {e}"));
            None
        }
    };
    let c = match (opts.c, &normalize) {
        (Some(c), _) => c,
        (None, Some(b)) => {
            let est = estimate_c(&built, b, opts.variant, 3)?;
            notes.push(format!("c estimated as {} from {} block upper-bound ratios", est.c, est.ratios.len()));
            est.c
        }
        (None, None) => 1.0,
    };
    notes.push(format!(
        "{} generated weights v = R_{} h with c = {c}; the weight class is sampled, not exhausted",
        hs.len(),
        opts.k
    ));

    let base = measure(grid, &op, &fs, &hs, c, normalize.as_ref(), opts, &prm)?;
    let fine = measure(grid.refined()?, &op, &fs, &hs, c, normalize.as_ref(), opts, &prm)?;

    let mut trials = Vec::new();
    for (label, lhs, rhs) in &base.weighted {
        trials.push(Trial::new(trials.len(), format!("weighted/{label}"), *lhs, *rhs));
    }
    for (label, lhs, rhs) in &base.morrey_herz {
        trials.push(Trial::new(trials.len(), format!("morrey_herz/{label}"), *lhs, *rhs));
    }
    for (label, a1) in &base.a1 {
        trials.push(Trial::new(trials.len(), format!("a1/{label}"), *a1, 2.0 * c));
    }
    let wsum = Summary::of(&base.weighted.iter().map(|r| r.1 / r.2).collect::<Vec<_>>());
    let msum = Summary::of(&base.morrey_herz.iter().map(|r| r.1 / r.2).collect::<Vec<_>>());
    let stw = Stability::new("weighted_sup_ratio", sup(&base.weighted), sup(&fine.weighted));
    let stm = Stability::new("morrey_herz_sup_ratio", sup(&base.morrey_herz), sup(&fine.morrey_herz));
    let finite = trials.iter().filter(|t| !t.ratio.is_finite()).count() as f64;
    let checks = vec![
        Check::at_most("non_finite_ratios", finite, 0.0),
        Check::at_most("weighted_sup_ratio", wsum.max, opts.cap),
        Check::at_most("morrey_herz_sup_ratio", msum.max, opts.cap),
        Check::at_most("weighted_refinement_drift", stw.delta, opts.drift),
        Check::at_most("morrey_herz_refinement_drift", stm.delta, opts.drift),
    ];
    Ok(InequalityReport::new(run.clone(), trials, vec![stw, stm], checks, run.violated_hypotheses(), notes))
}

#[cfg(test)]
mod tests {
    use crate::grid::make_grid;
    use crate::norms::params::ExponentParams;
    use crate::verify::{Status, Suite, SuiteRun};

    #[test]
    fn small_sweeps() {
        let g = make_grid(2, 2).unwrap();
        let prm = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap();
        for op in ["strong_maximal", "double_hilbert"] {
            let suite: Suite =
                serde_json::from_value(serde_json::json!({"suite": "extrapolation", "operator": op, "trials": 3}))
                    .unwrap();
            let rep = SuiteRun::new(g, prm, suite).run().unwrap();
            assert!(rep.summary.max.is_finite(), "{op}");
            assert_ne!(rep.status, Status::OutOfHypothesis);
            let unit = rep.trials.iter().find(|t| t.label.ends_with("v=unit")).unwrap();
            assert!(unit.ratio >= 1.0 || op != "strong_maximal");
        }
    }
}
