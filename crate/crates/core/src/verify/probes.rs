//! Test objects for the sweeps, always in continuum coordinates so the same object can
//! be rebuilt on the refined grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Axis, FunctionSpec, GridSpec, LogAxes, Term};

/// Per-trial generator: one ChaCha stream per trial id under a common seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub const LOG_CLIP: f64 = 16.0;

fn log_spike() -> FunctionSpec {
    FunctionSpec::TruncatedLog { axes: LogAxes::Both, clip: Some(LOG_CLIP) }
}

/// Indicators at extreme annuli, an annulus comb, a log spike, the constant one, and
/// the unit square when it is resolved.
pub fn adversarial(grid: &GridSpec) -> Vec<(String, FunctionSpec)> {
    let (lo, hi) = grid.annulus_window();
    let mut out = vec![("constant".to_string(), FunctionSpec::Constant { value: 1.0 })];
    if grid.aligned_levels().contains(&0) {
        out.push(("unit_square".into(), FunctionSpec::DyadicIndicator { l1: 0, l2: 0 }));
    }
    if lo <= hi {
        out.push(("annulus_outer".into(), FunctionSpec::AnnulusIndicator { i: hi, j: hi }));
        out.push(("annulus_inner".into(), FunctionSpec::AnnulusIndicator { i: lo, j: lo }));
        out.push(("annulus_mixed".into(), FunctionSpec::AnnulusIndicator { i: lo, j: hi }));
        let terms = (lo..=hi)
            .step_by(2)
            .map(|i| Term { weight: 1.0, function: FunctionSpec::AnnulusIndicator { i, j: i } })
            .collect();
        out.push(("annulus_comb".into(), FunctionSpec::Combination { terms }));
    }
    out.push(("log_spike".into(), log_spike()));
    out
}

/// A random bounded or mildly singular object, drawn from a handful of shapes.
pub fn random_probe(rng: &mut ChaCha8Rng, grid: &GridSpec) -> (String, FunctionSpec) {
    let hw = grid.half_width();
    let levels: Vec<i32> = grid.aligned_levels().collect();
    let level = |rng: &mut ChaCha8Rng| levels[rng.gen_range(0..levels.len())];
    match rng.gen_range(0..5) {
        0 => (
            "gaussian".into(),
            FunctionSpec::Gaussian {
                cx: rng.gen_range(-hw / 2.0..hw / 2.0),
                cy: rng.gen_range(-hw / 2.0..hw / 2.0),
                sigma: rng.gen_range(-2.0f64..1.0).exp2(),
                amplitude: rng.gen_range(0.5..2.0),
            },
        ),
        1 => (
            "noisy_bump".into(),
            FunctionSpec::Product {
                factors: vec![
                    FunctionSpec::Noise { seed: rng.gen(), level: 0, low: 0.2, high: 1.0 },
                    FunctionSpec::Gaussian {
                        cx: 0.0,
                        cy: 0.0,
                        sigma: rng.gen_range(-1.0f64..1.0).exp2(),
                        amplitude: 1.0,
                    },
                ],
            },
        ),
        2 => {
            let terms = (0..3)
                .map(|_| Term {
                    weight: rng.gen_range(-1.0..1.0),
                    function: FunctionSpec::DyadicIndicator { l1: level(rng), l2: level(rng) },
                })
                .collect();
            ("dyadic_combination".into(), FunctionSpec::Combination { terms })
        }
        3 => {
            let u = (-(grid.s().min(2) as f64)).exp2();
            let steps = (2.0 * hw / u) as i64;
            let side = |rng: &mut ChaCha8Rng| {
                let a = rng.gen_range(0..steps);
                let b = rng.gen_range(a + 1..=steps);
                (a as f64 * u - hw, b as f64 * u - hw)
            };
            let (x0, x1) = side(rng);
            let (y0, y1) = side(rng);
            ("rectangle".into(), FunctionSpec::RectIndicator { x0, x1, y0, y1 })
        }
        _ => (
            "power_bump".into(),
            FunctionSpec::Product {
                factors: vec![
                    FunctionSpec::Power { a: rng.gen_range(-0.2..0.5), b: rng.gen_range(-0.2..0.5) },
                    FunctionSpec::Gaussian { cx: 0.0, cy: 0.0, sigma: 2.0, amplitude: 1.0 },
                ],
            },
        ),
    }
}

/// Six symbols for the bmo equivalence sweep.
pub fn bmo_test_symbols() -> Vec<FunctionSpec> {
    vec![
        FunctionSpec::TruncatedLog { axes: LogAxes::Both, clip: None },
        FunctionSpec::TruncatedLog { axes: LogAxes::X, clip: None },
        FunctionSpec::RectIndicator { x0: -1.0, x1: 1.0, y0: 0.0, y1: 1.0 },
        FunctionSpec::Gaussian { cx: 0.5, cy: -0.5, sigma: 1.0, amplitude: 1.0 },
        FunctionSpec::Noise { seed: 7, level: 0, low: 0.0, high: 1.0 },
        FunctionSpec::Coordinate { axis: Axis::X },
    ]
}

/// `k` with `t = 2^k`, `k >= 0`.
pub fn dilation_exponent(t: f64) -> Result<i32> {
    let k = t.log2().round();
    if t >= 1.0 && t.is_finite() && k.exp2() == t {
        Ok(k as i32)
    } else {
        Err(Error::Config(format!("dilation factors must be powers of two >= 1, got {t}")))
    }
}

/// `f(z / t)` for the shapes that admit an exact continuum dilation.
pub fn dilate(f: &FunctionSpec, t: f64) -> Result<FunctionSpec> {
    Ok(match f {
        FunctionSpec::Constant { value } => FunctionSpec::Constant { value: *value },
        FunctionSpec::DyadicIndicator { l1, l2 } => {
            let k = dilation_exponent(t)?;
            FunctionSpec::DyadicIndicator { l1: l1 + k, l2: l2 + k }
        }
        FunctionSpec::RectIndicator { x0, x1, y0, y1 } => {
            FunctionSpec::RectIndicator { x0: x0 * t, x1: x1 * t, y0: y0 * t, y1: y1 * t }
        }
        FunctionSpec::Gaussian { cx, cy, sigma, amplitude } => {
            FunctionSpec::Gaussian { cx: cx * t, cy: cy * t, sigma: sigma * t, amplitude: *amplitude }
        }
        other => return Err(Error::Config(format!("no exact dilation for {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn probes_build_on_base_and_refined_grids() {
        let g = make_grid(3, 2).unwrap();
        let fine = g.refined().unwrap();
        let mut all = adversarial(&g);
        for t in 0..40 {
            all.push(random_probe(&mut rng(9, t), &g));
        }
        for (label, spec) in &all {
            let a = spec.build(g).unwrap();
            let b = spec.build(fine).unwrap();
            assert!(!a.is_zero() || label.starts_with("dyadic_combination"), "{label}");
            assert!(b.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let g = make_grid(3, 2).unwrap();
        assert_eq!(random_probe(&mut rng(1, 4), &g), random_probe(&mut rng(1, 4), &g));
        let draws: Vec<u64> = (0..8).map(|t| rng(1, t).gen()).collect();
        let mut uniq = draws.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), draws.len());
    }

    #[test]
    fn dilations() {
        assert_eq!(dilation_exponent(8.0).unwrap(), 3);
        assert!(dilation_exponent(3.0).is_err());
        assert!(dilation_exponent(0.5).is_err());
        let d = dilate(&FunctionSpec::DyadicIndicator { l1: -2, l2: -1 }, 4.0).unwrap();
        assert_eq!(d, FunctionSpec::DyadicIndicator { l1: 0, l2: 1 });
        assert!(dilate(&FunctionSpec::Coordinate { axis: Axis::X }, 2.0).is_err());
    }
}
