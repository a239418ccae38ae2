//! The strong maximal operator `M_S f(z) = sup_{z ∈ R} (1/|R|) ∫_R |f|`.
//!
//! All variants start from `|f|` (the one-cell rectangle) and read rectangle averages
//! from the shared prefix table through [`table_sum`], so a rectangle belonging to two
//! families yields the same bits in both.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{table_sum, GridFunction, GridRectangle};
use crate::norms::family::DEFAULT_EXACT_GATE;
use crate::operators::sliding::sliding_max;

fn default_gate() -> usize {
    DEFAULT_EXACT_GATE
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaximalVariant {
    /// Every grid rectangle, `O(N⁴)`; refused above `max_n` cells per axis.
    ExactGrid {
        #[serde(default = "default_gate")]
        max_n: usize,
    },
    /// Rectangles with power-of-two sides at every position, `O(N² log² N)`.
    #[default]
    DyadicSides,
    /// One-dimensional maximal operator along `y`, then along `x`, `O(N³)`.
    Iterated1d,
}

impl MaximalVariant {
    pub fn exact() -> Self {
        MaximalVariant::ExactGrid { max_n: DEFAULT_EXACT_GATE }
    }

    pub fn cost_note(&self) -> &'static str {
        match self {
            MaximalVariant::ExactGrid { .. } => "O(N^4): one O(N^2) interval sweep per row range",
            MaximalVariant::DyadicSides => "O(N^2 log^2 N): window sums and clipped sliding maxima per side pair",
            MaximalVariant::Iterated1d => "O(N^3): all-interval sweeps along columns, then rows",
        }
    }
}

pub fn strong_maximal(f: &GridFunction, variant: MaximalVariant) -> Result<GridFunction> {
    let values = match variant {
        MaximalVariant::ExactGrid { max_n } => {
            if f.n() > max_n {
                return Err(Error::Cost(format!(
                    "exact-grid maximal operator on {n}x{n} cells exceeds the gate of {max_n} per axis",
                    n = f.n()
                )));
            }
            exact_grid(f)
        }
        MaximalVariant::DyadicSides => dyadic_sides(f),
        MaximalVariant::Iterated1d => iterated(f),
    };
    GridFunction::from_values(*f.spec(), values)
}

fn exact_grid(f: &GridFunction) -> Vec<f64> {
    let n = f.n();
    let w = n + 1;
    let table = f.abs_prefix();
    let start: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    (0..n)
        .into_par_iter()
        .fold(
            || start.clone(),
            |mut out, y0| {
                let mut run = vec![0.0f64; n];
                let mut line = vec![0.0f64; n];
                for y1 in (y0 + 1..=n).rev() {
                    let hgt = y1 - y0;
                    line.fill(0.0);
                    // line[x] = max over a <= x < b of the average on [a, b) x [y0, y1)
                    for a in 0..n {
                        let mut best = 0.0f64;
                        for b in (a + 1..=n).rev() {
                            let avg = table_sum(table, w, a, b, y0, y1) / ((b - a) * hgt) as f64;
                            best = best.max(avg);
                            let x = b - 1;
                            line[x] = line[x].max(best);
                        }
                    }
                    // run[x] = max over y1' >= y1, which is every admissible top for row y1 - 1
                    let row = &mut out[(y1 - 1) * n..y1 * n];
                    for x in 0..n {
                        run[x] = run[x].max(line[x]);
                        row[x] = row[x].max(run[x]);
                    }
                }
                out
            },
        )
        .reduce(|| start.clone(), max_into)
}

fn max_into(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.iter_mut().zip(&b).for_each(|(x, y)| *x = x.max(*y));
    a
}

fn dyadic_sides(f: &GridFunction) -> Vec<f64> {
    let n = f.n();
    let w = n + 1;
    let table = f.abs_prefix();
    let levels = n.trailing_zeros() as usize + 1;
    let start: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    (0..levels * levels)
        .into_par_iter()
        .fold(
            || start.clone(),
            |mut out, pair| {
                let (wd, ht) = (1usize << (pair % levels), 1usize << (pair / levels));
                let (nx, ny) = (n - wd + 1, n - ht + 1);
                let cells = (wd * ht) as f64;
                // best over x-windows covering each column, for every window start row
                let mut rows = vec![0.0f64; ny * n];
                let mut avg = vec![0.0f64; nx];
                for y in 0..ny {
                    for (x, a) in avg.iter_mut().enumerate() {
                        *a = table_sum(table, w, x, x + wd, y, y + ht) / cells;
                    }
                    sliding_max(&avg, wd, &mut rows[y * n..(y + 1) * n]);
                }
                let mut col = vec![0.0f64; ny];
                let mut hit = vec![0.0f64; n];
                for x in 0..n {
                    for (y, c) in col.iter_mut().enumerate() {
                        *c = rows[y * n + x];
                    }
                    sliding_max(&col, ht, &mut hit);
                    for (y, v) in hit.iter().enumerate() {
                        let o = &mut out[y * n + x];
                        *o = o.max(*v);
                    }
                }
                out
            },
        )
        .reduce(|| start.clone(), max_into)
}

/// One-dimensional all-interval maximal function of nonnegative `vals`.
pub fn maximal_1d(vals: &[f64], out: &mut [f64]) {
    let n = vals.len();
    let mut prefix = vec![0.0f64; n + 1];
    for (i, v) in vals.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    out.copy_from_slice(vals);
    for a in 0..n {
        let mut best = 0.0f64;
        for b in (a + 1..=n).rev() {
            best = best.max((prefix[b] - prefix[a]) / (b - a) as f64);
            out[b - 1] = out[b - 1].max(best);
        }
    }
}

fn iterated(f: &GridFunction) -> Vec<f64> {
    let n = f.n();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let col: Vec<f64> = (0..n).map(|y| abs[y * n + x]).collect();
            let mut out = vec![0.0; n];
            maximal_1d(&col, &mut out);
            out
        })
        .collect();
    let mut mid = vec![0.0; n * n];
    for (x, col) in cols.iter().enumerate() {
        for (y, v) in col.iter().enumerate() {
            mid[y * n + x] = *v;
        }
    }
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).zip(mid.par_chunks(n)).for_each(|(o, m)| maximal_1d(m, o));
    out
}

/// `P_R g = ((1/|R|) ∫_R |g|) χ_R`.
pub fn rect_average_p(f: &GridFunction, rect: &GridRectangle) -> Result<GridFunction> {
    let r = GridRectangle::new(rect.ix0, rect.ix1, rect.iy0, rect.iy1)?;
    f.spec().check_rect(&r)?;
    let avg = f.abs_average(&r);
    let mut out = GridFunction::indicator(*f.spec(), &r)?;
    if avg != 1.0 {
        out = out.scale(avg)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, FunctionSpec, GridSpec};

    fn brute(f: &GridFunction) -> Vec<f64> {
        let n = f.n();
        let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        for y0 in 0..n {
            for y1 in y0 + 1..=n {
                for x0 in 0..n {
                    for x1 in x0 + 1..=n {
                        let r = GridRectangle { ix0: x0, ix1: x1, iy0: y0, iy1: y1 };
                        let avg = f.abs_average(&r);
                        for y in y0..y1 {
                            for x in x0..x1 {
                                out[y * n + x] = out[y * n + x].max(avg);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn noise(g: GridSpec, seed: u64) -> GridFunction {
        FunctionSpec::Noise { seed, level: g.s(), low: -1.0, high: 1.0 }.build(g).unwrap()
    }

    #[test]
    fn exact_matches_brute_force() {
        let g = make_grid(2, 1).unwrap();
        for seed in 0..5 {
            let f = noise(g, seed);
            let m = strong_maximal(&f, MaximalVariant::exact()).unwrap();
            assert_eq!(m.values(), &brute(&f)[..]);
        }
    }

    #[test]
    fn constants_are_fixed() {
        let g = make_grid(2, 2).unwrap();
        let c = GridFunction::constant(g, -0.75).unwrap();
        for v in [MaximalVariant::exact(), MaximalVariant::DyadicSides, MaximalVariant::Iterated1d] {
            let m = strong_maximal(&c, v).unwrap();
            assert!(m.values().iter().all(|&x| (x - 0.75).abs() < 1e-15), "{v:?}");
        }
    }

    #[test]
    fn unit_interval_slice() {
        // axis [-4, 4) at h = 1/4; chi of [0,1] is 4 cells, x = 2 sits in cell 24
        let g = make_grid(3, 2).unwrap();
        let line: Vec<f64> = (0..g.n()).map(|k| if (16..20).contains(&k) { 1.0 } else { 0.0 }).collect();
        let mut out = vec![0.0; g.n()];
        maximal_1d(&line, &mut out);
        // best interval for the cell [2, 2.25) is [0, 2.25): 1 / 2.25
        assert!((out[24] - 4.0 / 9.0).abs() < 1e-15);
        // the cell just left of x = 2 sees [0, 2): 1/2
        assert!((out[23] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn square_indicator_value_at_two_one_half() {
        let g = make_grid(3, 1).unwrap();
        let f = FunctionSpec::RectIndicator { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }.build(g).unwrap();
        let m = strong_maximal(&f, MaximalVariant::exact()).unwrap();
        // cell [1.5, 2) x [0, 0.5): best rectangle [0, 2) x [0, 1)
        let (ix, iy) = (g.boundary_index(1.5).unwrap(), g.boundary_index(0.0).unwrap());
        assert!((m.value(ix, iy) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn indicator_level_sets() {
        let g = make_grid(2, 2).unwrap();
        let r = GridRectangle::new(3, 9, 5, 7).unwrap();
        let chi = GridFunction::indicator(g, &r).unwrap();
        for v in [MaximalVariant::exact(), MaximalVariant::DyadicSides, MaximalVariant::Iterated1d] {
            let m = strong_maximal(&chi, v).unwrap();
            for iy in r.iy0..r.iy1 {
                for ix in r.ix0..r.ix1 {
                    assert_eq!(m.value(ix, iy), 1.0);
                }
            }
        }
    }

    #[test]
    fn gate_and_p_r() {
        let g = make_grid(4, 3).unwrap();
        let f = GridFunction::constant(g, 1.0).unwrap();
        assert!(matches!(strong_maximal(&f, MaximalVariant::exact()), Err(Error::Cost(_))));
        assert!(strong_maximal(&f, MaximalVariant::ExactGrid { max_n: 128 }).is_ok());

        let g = make_grid(2, 1).unwrap();
        let r = GridRectangle::new(1, 3, 0, 4).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert_eq!(rect_average_p(&one, &r).unwrap(), GridFunction::indicator(g, &r).unwrap());
        let f = noise(g, 3);
        let p = rect_average_p(&f, &r).unwrap();
        let m = strong_maximal(&f, MaximalVariant::exact()).unwrap();
        let avg =
            f.values().iter().enumerate().filter(|(c, _)| r.contains(c % 8, c / 8)).map(|(_, v)| v.abs()).sum::<f64>()
                / 8.0;
        for iy in 0..8 {
            for ix in 0..8 {
                if r.contains(ix, iy) {
                    assert!((p.value(ix, iy) - avg).abs() < 1e-15);
                    assert!(p.value(ix, iy) <= m.value(ix, iy));
                } else {
                    assert_eq!(p.value(ix, iy), 0.0);
                }
            }
        }
        assert!(rect_average_p(&f, &GridRectangle { ix0: 2, ix1: 2, iy0: 0, iy1: 1 }).is_err());
    }
}
