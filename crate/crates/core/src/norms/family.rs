use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridRectangle, GridSpec};

pub const DEFAULT_EXACT_GATE: usize = 64;

fn default_gate() -> usize {
    DEFAULT_EXACT_GATE
}

/// A finite stand-in for the family of all axis-parallel rectangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RectangleFamily {
    /// Every grid-aligned rectangle, `O(N⁴)` members; refused above `max_n` cells per axis.
    ExactGrid {
        #[serde(default = "default_gate")]
        max_n: usize,
    },
    /// Rectangles with power-of-two side lengths (in cells), at every position, or only
    /// at positions that are multiples of the side when `aligned`.
    DyadicSides {
        #[serde(default)]
        aligned: bool,
    },
    /// The centred dyadic rectangles `R_{l1,l2}` at aligned levels.
    DyadicCentered,
}

impl Default for RectangleFamily {
    fn default() -> Self {
        RectangleFamily::DyadicSides { aligned: false }
    }
}

impl RectangleFamily {
    pub fn exact_grid() -> Self {
        RectangleFamily::ExactGrid { max_n: DEFAULT_EXACT_GATE }
    }

    pub fn dyadic_sides() -> Self {
        RectangleFamily::DyadicSides { aligned: false }
    }

    pub fn check(&self, spec: &GridSpec) -> Result<()> {
        if let RectangleFamily::ExactGrid { max_n } = self {
            if spec.n() > *max_n {
                return Err(Error::Cost(format!(
                    "exact-grid rectangle family on {n}x{n} cells exceeds the gate of {max_n} per axis",
                    n = spec.n()
                )));
            }
        }
        Ok(())
    }

    /// Members whose bottom row is `iy0`, in a fixed order.
    pub fn visit_row(&self, spec: &GridSpec, iy0: usize, cb: &mut impl FnMut(GridRectangle)) {
        let n = spec.n();
        match *self {
            RectangleFamily::ExactGrid { .. } => {
                for iy1 in iy0 + 1..=n {
                    for ix0 in 0..n {
                        for ix1 in ix0 + 1..=n {
                            cb(GridRectangle { ix0, ix1, iy0, iy1 });
                        }
                    }
                }
            }
            RectangleFamily::DyadicSides { aligned } => {
                let mut hgt = 1;
                while hgt <= n && iy0 + hgt <= n {
                    if !aligned || iy0.is_multiple_of(hgt) {
                        let mut w = 1;
                        while w <= n {
                            let step = if aligned { w } else { 1 };
                            let mut ix0 = 0;
                            while ix0 + w <= n {
                                cb(GridRectangle { ix0, ix1: ix0 + w, iy0, iy1: iy0 + hgt });
                                ix0 += step;
                            }
                            w *= 2;
                        }
                    }
                    hgt *= 2;
                }
            }
            RectangleFamily::DyadicCentered => {
                for l2 in spec.aligned_levels() {
                    let ys = spec.cube_range(l2).expect("aligned level");
                    if ys.start != iy0 {
                        continue;
                    }
                    for l1 in spec.aligned_levels() {
                        let xs = spec.cube_range(l1).expect("aligned level");
                        cb(GridRectangle { ix0: xs.start, ix1: xs.end, iy0: ys.start, iy1: ys.end });
                    }
                }
            }
        }
    }

    pub fn visit(&self, spec: &GridSpec, mut cb: impl FnMut(GridRectangle)) -> Result<()> {
        self.check(spec)?;
        for iy0 in 0..spec.n() {
            self.visit_row(spec, iy0, &mut cb);
        }
        Ok(())
    }

    pub fn rectangles(&self, spec: &GridSpec) -> Result<Vec<GridRectangle>> {
        let mut out = Vec::new();
        self.visit(spec, |r| out.push(r))?;
        Ok(out)
    }

    pub fn count(&self, spec: &GridSpec) -> Result<usize> {
        let mut c = 0;
        self.visit(spec, |_| c += 1)?;
        Ok(c)
    }

    /// Largest `score` over the family with its first maximizer, evaluated in parallel
    /// over bottom rows and merged in row order, so the result is deterministic.
    pub fn max_over<F>(&self, spec: &GridSpec, score: F) -> Result<Option<(f64, GridRectangle)>>
    where
        F: Fn(&GridRectangle) -> Result<f64> + Sync,
    {
        self.check(spec)?;
        let rows: Vec<Result<Option<(f64, GridRectangle)>>> = (0..spec.n())
            .into_par_iter()
            .map(|iy0| {
                let mut best: Option<(f64, GridRectangle)> = None;
                let mut err = None;
                self.visit_row(spec, iy0, &mut |r| {
                    if err.is_some() {
                        return;
                    }
                    match score(&r) {
                        Ok(v) => {
                            if best.is_none_or(|(b, _)| v > b) {
                                best = Some((v, r));
                            }
                        }
                        Err(e) => err = Some(e),
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(best),
                }
            })
            .collect();
        let mut best: Option<(f64, GridRectangle)> = None;
        for row in rows {
            if let Some((v, r)) = row? {
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, r));
                }
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::collections::HashSet;

    #[test]
    fn counts() {
        let g = make_grid(2, 1).unwrap();
        let n = g.n();
        let exact = RectangleFamily::exact_grid().count(&g).unwrap();
        assert_eq!(exact, (n * (n + 1) / 2).pow(2));
        let aligned = RectangleFamily::DyadicSides { aligned: true }.count(&g).unwrap();
        // (1 + 2 + 4 + 8) blocks per axis
        assert_eq!(aligned, 15 * 15);
        let centred = RectangleFamily::DyadicCentered.count(&g).unwrap();
        assert_eq!(centred, 9);
    }

    #[test]
    fn dyadic_sides_is_a_subfamily_of_exact_grid() {
        let g = make_grid(2, 1).unwrap();
        let exact: HashSet<_> = RectangleFamily::exact_grid().rectangles(&g).unwrap().into_iter().collect();
        for fam in [
            RectangleFamily::dyadic_sides(),
            RectangleFamily::DyadicSides { aligned: true },
            RectangleFamily::DyadicCentered,
        ] {
            for r in fam.rectangles(&g).unwrap() {
                assert!(r.ix0 < r.ix1 && r.iy0 < r.iy1 && r.ix1 <= g.n() && r.iy1 <= g.n());
                assert!(exact.contains(&r));
            }
        }
    }

    #[test]
    fn gate() {
        let g = make_grid(4, 3).unwrap();
        assert!(matches!(RectangleFamily::exact_grid().count(&g), Err(Error::Cost(_))));
        assert!(RectangleFamily::ExactGrid { max_n: 128 }.check(&g).is_ok());
    }

    #[test]
    fn max_over_is_deterministic() {
        let g = make_grid(2, 2).unwrap();
        let fam = RectangleFamily::dyadic_sides();
        let score = |r: &GridRectangle| Ok((r.cells() % 7) as f64);
        let a = fam.max_over(&g, score).unwrap();
        let b = fam.max_over(&g, score).unwrap();
        assert_eq!(a, b);
        let all = fam.rectangles(&g).unwrap();
        let top = all.iter().map(|r| r.cells() % 7).max().unwrap();
        let first = all.into_iter().find(|r| r.cells() % 7 == top);
        assert_eq!(a.map(|x| x.1), first);
    }
}
