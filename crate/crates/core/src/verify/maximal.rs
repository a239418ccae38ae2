use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{FunctionSpec, GridFunction, GridSpec};
use crate::norms::block::block_upper;
use crate::norms::herz::{herz_norm, morrey_herz_norm};
use crate::norms::params::ExponentParams;
use crate::operators::maximal::strong_maximal;
use crate::verify::probes::{adversarial, random_probe, rng};
use crate::verify::report::{Check, InequalityReport, Stability, Summary, Trial};
use crate::verify::{FeffermanSteinOptions, MaximalBoundsOptions, NormSpace, SuiteRun};

const LATTICE_SLACK: f64 = 1e-12;

pub(super) fn space_norm(space: NormSpace, f: &GridFunction, prm: &ExponentParams) -> Result<f64> {
    match space {
        NormSpace::Herz => herz_norm(f, prm),
        NormSpace::MorreyHerz => morrey_herz_norm(f, prm),
        NormSpace::BlockUpper => block_upper(f, prm).map(|b| b.0),
    }
}

/// Runs `measure` on every probe, on the base grid and once refined.
fn on_both_grids<T: Send>(
    grid: GridSpec,
    probes: &[(String, FunctionSpec)],
    measure: impl Fn(GridSpec, &FunctionSpec) -> Result<T> + Sync,
) -> Result<[Vec<Result<T>>; 2]> {
    let fine = grid.refined()?;
    let go = |g: GridSpec| probes.par_iter().map(|(_, spec)| measure(g, spec)).collect::<Vec<_>>();
    Ok([go(grid), go(fine)])
}

fn sup_of(rows: &[Result<(f64, f64)>]) -> f64 {
    rows.iter().filter_map(|r| r.as_ref().ok()).map(|(a, b)| a / b).fold(0.0, f64::max)
}

pub(super) fn run_bounds(run: &SuiteRun, opts: &MaximalBoundsOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let mut probes = adversarial(&grid);
    probes.extend((0..opts.trials as u64).map(|t| random_probe(&mut rng(opts.seed, t), &grid)));
    let [base, fine] = on_both_grids(grid, &probes, |g, spec| {
        let f = spec.build(g)?;
        let mf = strong_maximal(&f, opts.variant)?;
        Ok((space_norm(opts.space, &mf, &prm)?, space_norm(opts.space, &f, &prm)?))
    })?;

    let mut trials = Vec::new();
    let mut notes = Vec::new();
    for ((label, _), row) in probes.iter().zip(&base) {
        match row {
            Ok((lhs, rhs)) => trials.push(Trial::new(trials.len(), label.clone(), *lhs, *rhs)),
            Err(e) => notes.push(format!("{label}: {e}")),
        }
    }
    let ratios: Vec<f64> = trials.iter().map(|t| t.ratio).collect();
    let s = Summary::of(&ratios);
    let mut checks = vec![
        Check::at_most("failed_trials", notes.len() as f64, 0.0),
        Check::at_most("non_finite_ratios", ratios.iter().filter(|r| !r.is_finite()).count() as f64, 0.0),
        Check::at_most("sup_ratio", s.max, opts.cap),
    ];
    if let Some(t) = trials.iter().find(|t| t.label == "constant") {
        checks.push(Check::at_most("constant_ratio", t.ratio, opts.constant_cap));
    }
    if opts.space != NormSpace::BlockUpper {
        checks.push(Check::at_least("lattice_lower_bound", s.min, 1.0 - LATTICE_SLACK));
    }
    let st = Stability::new("sup_ratio", sup_of(&base), sup_of(&fine));
    checks.push(Check::at_most("refinement_drift", st.delta, opts.drift));
    notes.push(format!("{:?} on the {:?} norm; {}", opts.variant, opts.space, opts.variant.cost_note()));
    Ok(InequalityReport::new(run.clone(), trials, vec![st], checks, run.violated_hypotheses(), notes))
}

/// `(Σ_i |f_i|^r)^{1/r}`.
fn r_sum(fs: &[GridFunction], r: f64) -> Result<GridFunction> {
    let spec = *fs.first().ok_or_else(|| Error::Config("empty function family".into()))?.spec();
    let n2 = spec.n() * spec.n();
    let mut acc = vec![0.0; n2];
    for f in fs {
        for (a, v) in acc.iter_mut().zip(f.values()) {
            *a += v.abs().powf(r);
        }
    }
    GridFunction::from_values(spec, acc.into_iter().map(|a| a.powf(1.0 / r)).collect())
}

struct Family {
    label: String,
    specs: Vec<FunctionSpec>,
}

fn families(grid: &GridSpec, opts: &FeffermanSteinOptions) -> Vec<Family> {
    let size = 2 * opts.family_size;
    let mut out: Vec<Family> = (0..opts.trials as u64)
        .map(|t| Family {
            label: format!("random{t}"),
            specs: (0..size as u64).map(|i| random_probe(&mut rng(opts.seed, (t << 16) | i), grid).1).collect(),
        })
        .collect();
    let (lo, hi) = grid.annulus_window();
    let annuli: Vec<FunctionSpec> =
        (lo..=hi).flat_map(|i| (lo..=hi).map(move |j| FunctionSpec::AnnulusIndicator { i, j })).collect();
    if !annuli.is_empty() {
        out.push(Family {
            label: "disjoint_annuli".into(),
            specs: (0..size).map(|k| annuli[(k * 7) % annuli.len()].clone()).collect(),
        });
    }
    out
}

/// `(r, size, family index, lhs, rhs)` for every combination on one grid.
type FsRow = (f64, usize, usize, f64, f64);

fn fs_measure(
    grid: GridSpec,
    fams: &[Family],
    opts: &FeffermanSteinOptions,
    prm: &ExponentParams,
) -> Result<Vec<FsRow>> {
    let per_family: Vec<Vec<FsRow>> = fams
        .par_iter()
        .enumerate()
        .map(|(k, fam)| {
            let fs: Vec<GridFunction> = fam.specs.iter().map(|s| s.build(grid)).collect::<Result<_>>()?;
            let ms: Vec<GridFunction> =
                fs.par_iter().map(|f| strong_maximal(f, opts.variant)).collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for &r in &opts.r {
                for size in [opts.family_size, 2 * opts.family_size] {
                    let lhs = morrey_herz_norm(&r_sum(&ms[..size], r)?, prm)?;
                    let rhs = morrey_herz_norm(&r_sum(&fs[..size], r)?, prm)?;
                    rows.push((r, size, k, lhs, rhs));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_family.into_iter().flatten().collect())
}

fn sup_where(rows: &[FsRow], keep: impl Fn(&FsRow) -> bool) -> f64 {
    rows.iter().filter(|r| keep(r)).map(|r| r.3 / r.4).fold(0.0, f64::max)
}

pub(super) fn run_fefferman_stein(run: &SuiteRun, opts: &FeffermanSteinOptions) -> Result<InequalityReport> {
    let (grid, prm) = (run.grid, run.params);
    let fams = families(&grid, opts);
    let base = fs_measure(grid, &fams, opts, &prm)?;
    let fine = fs_measure(grid.refined()?, &fams, opts, &prm)?;

    let trials: Vec<Trial> = base
        .iter()
        .enumerate()
        .map(|(i, &(r, size, k, lhs, rhs))| {
            Trial::new(i, format!("r={r}/size={size}/{}", fams[k].label), lhs, rhs).at(r, size as f64)
        })
        .collect();
    let s = Summary::of(trials.iter().map(|t| &t.ratio));
    let mut size_drift = 0.0f64;
    for &r in &opts.r {
        let small = sup_where(&base, |row| row.0 == r && row.1 == opts.family_size);
        let large = sup_where(&base, |row| row.0 == r && row.1 == 2 * opts.family_size);
        size_drift = size_drift.max(Stability::new("", small, large).delta);
    }
    let st = Stability::new("sup_ratio", sup_where(&base, |_| true), sup_where(&fine, |_| true));
    let checks = vec![
        Check::at_most("non_finite_ratios", trials.iter().filter(|t| !t.ratio.is_finite()).count() as f64, 0.0),
        Check::at_most("sup_ratio", s.max, opts.cap),
        Check::at_least("lattice_lower_bound", s.min, 1.0 - LATTICE_SLACK),
        Check::at_most("family_size_drift", size_drift, opts.size_drift),
        Check::at_most("refinement_drift", st.delta, opts.drift),
    ];
    let notes = vec![format!(
        "{} families of sizes {} and {}; Morrey-Herz norms of r-sums",
        fams.len(),
        opts.family_size,
        2 * opts.family_size
    )];
    Ok(InequalityReport::new(run.clone(), trials, vec![st], checks, run.violated_hypotheses(), notes))
}
