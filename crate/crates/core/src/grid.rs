//! Piecewise-constant functions on a truncated dyadic product plane.
//!
//! A [`GridSpec`] covers the box `[-2^(L-1), 2^(L-1))²` with square cells of side
//! `h = 2^-s`, so that every centred dyadic cube `Q_k = {|x| < 2^(k-1)}` with
//! `1 - s <= k <= L` is a union of whole cells. Cells are half-open, `0` is always a
//! cell boundary, and the `N = 2^(L+s)` cells per axis are indexed from the left/bottom.
//!
//! Per axis, cell `k` belongs to exactly one *level class*: class `0` is the pair of
//! cells adjacent to the origin (the innermost aligned cube `Q_{1-s}`), and class
//! `c >= 1` is the dyadic annulus `Q_{c+1-s} \ Q_{c-s}`. Annuli at levels inside the
//! window `[2 - s, L]` are therefore whole cell sets; the annuli below the window all
//! live inside class `0` and are handled analytically by the norm code.

use std::ops::Range;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `L + s`; keeps a value table at `4096²` cells or fewer.
pub const MAX_LEVEL_SUM: i32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGridSpec", into = "RawGridSpec")]
pub struct GridSpec {
    l_max: i32,
    s: i32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGridSpec {
    l_max: i32,
    s: i32,
}

impl TryFrom<RawGridSpec> for GridSpec {
    type Error = Error;
    fn try_from(raw: RawGridSpec) -> Result<Self> {
        make_grid(raw.l_max, raw.s)
    }
}

impl From<GridSpec> for RawGridSpec {
    fn from(g: GridSpec) -> Self {
        RawGridSpec { l_max: g.l_max, s: g.s }
    }
}

/// Builds the grid covering `Q_{l_max}²` at cell side `2^-s`.
pub fn make_grid(l_max: i32, s: i32) -> Result<GridSpec> {
    if l_max < 1 {
        return Err(Error::Config(format!("truncation level L_max must be >= 1, got {l_max}")));
    }
    if s < 0 {
        return Err(Error::Config(format!("resolution level s must be >= 0, got {s}")));
    }
    if l_max + s > MAX_LEVEL_SUM {
        return Err(Error::Config(format!(
            "size guard: L_max + s must be <= {MAX_LEVEL_SUM}, got {l_max} + {s} = {}",
            l_max + s
        )));
    }
    Ok(GridSpec { l_max, s })
}

impl GridSpec {
    pub fn new(l_max: i32, s: i32) -> Result<Self> {
        make_grid(l_max, s)
    }

    pub fn l_max(&self) -> i32 {
        self.l_max
    }

    pub fn s(&self) -> i32 {
        self.s
    }

    /// Cells per axis, `2^(L+s)`.
    pub fn n(&self) -> usize {
        1usize << (self.l_max + self.s)
    }

    /// Cell side `h = 2^-s`.
    pub fn h(&self) -> f64 {
        (-self.s as f64).exp2()
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h * h
    }

    /// Half the box side, `2^(L-1)`.
    pub fn half_width(&self) -> f64 {
        ((self.l_max - 1) as f64).exp2()
    }

    pub fn box_area(&self) -> f64 {
        let w = 2.0 * self.half_width();
        w * w
    }

    /// Level of the innermost aligned cube, `1 - s`.
    pub fn innermost_level(&self) -> i32 {
        1 - self.s
    }

    /// Inclusive range of annulus levels that are whole cell sets: `[2 - s, L]`.
    pub fn annulus_window(&self) -> (i32, i32) {
        (2 - self.s, self.l_max)
    }

    /// Inclusive range of levels `l` for which `Q_l` is cell aligned: `[1 - s, L]`.
    pub fn aligned_levels(&self) -> Range<i32> {
        self.innermost_level()..self.l_max + 1
    }

    /// Number of level classes per axis (innermost cube plus window annuli).
    pub fn num_classes(&self) -> usize {
        (self.l_max + self.s) as usize + 1
    }

    pub fn cell_edges(&self, k: usize) -> (f64, f64) {
        let h = self.h();
        let x0 = -self.half_width();
        (x0 + k as f64 * h, x0 + (k + 1) as f64 * h)
    }

    pub fn cell_center(&self, k: usize) -> f64 {
        -self.half_width() + (k as f64 + 0.5) * self.h()
    }

    /// Level class of cell `k` along an axis (see module docs).
    #[inline]
    pub fn level_class(&self, k: usize) -> usize {
        let mid = self.n() / 2;
        let d = if k >= mid { k - mid } else { mid - 1 - k };
        (usize::BITS - d.leading_zeros()) as usize
    }

    /// Dyadic level `i` such that cell `k` lies in `Q_i \ Q_{i-1}`; the innermost pair
    /// of cells reports `1 - s`.
    pub fn axis_level(&self, k: usize) -> i32 {
        self.level_class(k) as i32 + self.innermost_level()
    }

    pub fn class_level(&self, class: usize) -> i32 {
        class as i32 + self.innermost_level()
    }

    /// Cell index range of the centred cube `Q_level` along one axis.
    pub fn cube_range(&self, level: i32) -> Result<Range<usize>> {
        if !self.aligned_levels().contains(&level) {
            return Err(Error::Alignment(format!(
                "cube Q_{level} is not cell aligned on this grid (aligned levels {}..={})",
                self.innermost_level(),
                self.l_max
            )));
        }
        let half_cells = 1usize << (level - 1 + self.s);
        let mid = self.n() / 2;
        Ok(mid - half_cells..mid + half_cells)
    }

    /// Index of the cell boundary located exactly at coordinate `x`.
    pub fn boundary_index(&self, x: f64) -> Result<usize> {
        let t = (x + self.half_width()) / self.h();
        if !(t.is_finite() && t.fract() == 0.0 && t >= 0.0 && t <= self.n() as f64) {
            return Err(Error::Alignment(format!(
                "coordinate {x} is not a cell boundary of the grid (h = {}, box half width {})",
                self.h(),
                self.half_width()
            )));
        }
        Ok(t as usize)
    }

    /// The same box at twice the resolution.
    pub fn refined(&self) -> Result<GridSpec> {
        make_grid(self.l_max, self.s + 1)
    }

    pub fn whole(&self) -> GridRectangle {
        let n = self.n();
        GridRectangle { ix0: 0, ix1: n, iy0: 0, iy1: n }
    }

    pub fn check_rect(&self, r: &GridRectangle) -> Result<()> {
        let n = self.n();
        if r.ix1 > n || r.iy1 > n {
            return Err(Error::Domain(format!("rectangle {r:?} exceeds the {n}x{n} grid")));
        }
        Ok(())
    }
}

/// The centred dyadic rectangle `R_{l1,l2} = Q_{l1} x Q_{l2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicRectangle {
    pub l1: i32,
    pub l2: i32,
}

impl DyadicRectangle {
    pub fn new(l1: i32, l2: i32) -> Self {
        DyadicRectangle { l1, l2 }
    }

    pub fn measure(&self) -> f64 {
        ((self.l1 + self.l2) as f64).exp2()
    }

    pub fn to_grid(&self, spec: &GridSpec) -> Result<GridRectangle> {
        let xs = spec.cube_range(self.l1)?;
        let ys = spec.cube_range(self.l2)?;
        GridRectangle::new(xs.start, xs.end, ys.start, ys.end)
    }
}

/// A grid-aligned rectangle `[ix0, ix1) x [iy0, iy1)` in cell indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridRectangle {
    pub ix0: usize,
    pub ix1: usize,
    pub iy0: usize,
    pub iy1: usize,
}

impl GridRectangle {
    pub fn new(ix0: usize, ix1: usize, iy0: usize, iy1: usize) -> Result<Self> {
        if ix0 >= ix1 || iy0 >= iy1 {
            return Err(Error::Domain(format!("empty rectangle [{ix0}, {ix1}) x [{iy0}, {iy1})")));
        }
        Ok(GridRectangle { ix0, ix1, iy0, iy1 })
    }

    /// Rectangle with real-coordinate corners; every edge must be a cell boundary.
    pub fn from_coords(spec: &GridSpec, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::new(
            spec.boundary_index(x0)?,
            spec.boundary_index(x1)?,
            spec.boundary_index(y0)?,
            spec.boundary_index(y1)?,
        )
    }

    pub fn width(&self) -> usize {
        self.ix1 - self.ix0
    }

    pub fn height(&self) -> usize {
        self.iy1 - self.iy0
    }

    pub fn cells(&self) -> usize {
        self.width() * self.height()
    }

    pub fn measure(&self, spec: &GridSpec) -> f64 {
        self.cells() as f64 * spec.cell_area()
    }

    pub fn contains(&self, ix: usize, iy: usize) -> bool {
        (self.ix0..self.ix1).contains(&ix) && (self.iy0..self.iy1).contains(&iy)
    }
}

/// The product annulus `I_i x J_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnulusIndex {
    pub i: i32,
    pub j: i32,
}

impl AnnulusIndex {
    pub fn new(i: i32, j: i32) -> Self {
        AnnulusIndex { i, j }
    }

    pub fn in_window(&self, spec: &GridSpec) -> bool {
        let (lo, hi) = spec.annulus_window();
        (lo..=hi).contains(&self.i) && (lo..=hi).contains(&self.j)
    }
}

#[derive(Clone, Debug)]
struct PrefixTables {
    signed: Vec<f64>,
    absolute: Vec<f64>,
}

/// A function constant on each grid cell, stored row-major (`values[iy * n + ix]`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction", into = "RawGridFunction")]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
    prefix: OnceLock<PrefixTables>,
}

#[derive(Serialize, Deserialize)]
struct RawGridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;
    fn try_from(raw: RawGridFunction) -> Result<Self> {
        GridFunction::from_values(raw.spec, raw.values)
    }
}

impl From<GridFunction> for RawGridFunction {
    fn from(f: GridFunction) -> Self {
        RawGridFunction { spec: f.spec, values: f.values }
    }
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.values == other.values
    }
}

impl GridFunction {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        let n = spec.n();
        if values.len() != n * n {
            return Err(Error::Data(format!(
                "expected {} cell values for a {n}x{n} grid, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite value {} at cell ({}, {})", values[pos], pos % n, pos / n)));
        }
        Ok(GridFunction { spec, values, prefix: OnceLock::new() })
    }

    /// Samples `rule(x, y)` at every cell centre.
    pub fn from_fn(spec: GridSpec, rule: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = spec.n();
        let centers: Vec<f64> = (0..n).map(|k| spec.cell_center(k)).collect();
        let mut values = Vec::with_capacity(n * n);
        for &y in &centers {
            for &x in &centers {
                values.push(rule(x, y));
            }
        }
        Self::from_values(spec, values)
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.n();
        GridFunction { spec, values: vec![0.0; n * n], prefix: OnceLock::new() }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Result<Self> {
        let n = spec.n();
        Self::from_values(spec, vec![value; n * n])
    }

    pub fn indicator(spec: GridSpec, rect: &GridRectangle) -> Result<Self> {
        spec.check_rect(rect)?;
        let mut f = Self::zeros(spec);
        let n = spec.n();
        for iy in rect.iy0..rect.iy1 {
            f.values[iy * n + rect.ix0..iy * n + rect.ix1].fill(1.0);
        }
        Ok(f)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.n() + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        let n = self.spec.n();
        &self.values[iy * n..(iy + 1) * n]
    }

    /// Applies `op` cellwise; the result must stay finite.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.spec, self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_grid(other)?;
        Self::from_values(self.spec, self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect())
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Domain(format!("grid mismatch: {:?} vs {:?}", self.spec, other.spec)));
        }
        Ok(())
    }

    pub fn abs(&self) -> Self {
        GridFunction { spec: self.spec, values: self.values.iter().map(|v| v.abs()).collect(), prefix: OnceLock::new() }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Keeps the values inside `rect`, zeroing everything else.
    pub fn restrict(&self, rect: &GridRectangle) -> Result<Self> {
        self.spec.check_rect(rect)?;
        let n = self.n();
        let mut out = Self::zeros(self.spec);
        for iy in rect.iy0..rect.iy1 {
            let r = iy * n + rect.ix0..iy * n + rect.ix1;
            out.values[r.clone()].copy_from_slice(&self.values[r]);
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    fn prefix(&self) -> &PrefixTables {
        self.prefix.get_or_init(|| {
            let n = self.n();
            let w = n + 1;
            let mut signed = vec![0.0; w * w];
            let mut absolute = vec![0.0; w * w];
            for iy in 0..n {
                let mut row_s = 0.0;
                let mut row_a = 0.0;
                for ix in 0..n {
                    let v = self.values[iy * n + ix];
                    row_s += v;
                    row_a += v.abs();
                    signed[(iy + 1) * w + ix + 1] = signed[iy * w + ix + 1] + row_s;
                    absolute[(iy + 1) * w + ix + 1] = absolute[iy * w + ix + 1] + row_a;
                }
            }
            PrefixTables { signed, absolute }
        })
    }

    /// Sum of cell values (or of their absolute values) over `rect`, in O(1) after the
    /// prefix tables are built.
    #[inline]
    pub fn cell_sum(&self, rect: &GridRectangle, absolute: bool) -> f64 {
        let t = self.prefix();
        let table = if absolute { &t.absolute } else { &t.signed };
        table_sum(table, self.n() + 1, rect.ix0, rect.ix1, rect.iy0, rect.iy1)
    }

    /// The `(N+1)²` inclusive prefix table of `|f|`, row-major.
    pub fn abs_prefix(&self) -> &[f64] {
        &self.prefix().absolute
    }

    /// Average of `|f|` over `rect` in cell units.
    #[inline]
    pub fn abs_average(&self, rect: &GridRectangle) -> f64 {
        self.cell_sum(rect, true) / rect.cells() as f64
    }

    /// Cells where the value is nonzero, as `(ix, iy)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        self.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(move |(k, _)| (k % n, k / n))
    }
}

/// Rectangle sum from a row-major `(N+1)²` prefix table of width `w`. Every rectangle
/// average in the crate goes through this expression so that equal rectangles give
/// bit-identical sums.
#[inline]
pub fn table_sum(table: &[f64], w: usize, ix0: usize, ix1: usize, iy0: usize, iy1: usize) -> f64 {
    table[iy1 * w + ix1] - table[iy0 * w + ix1] - table[iy1 * w + ix0] + table[iy0 * w + ix0]
}

/// Exact integral `h² Σ f_c` (or `h² Σ |f_c|`) over a grid rectangle.
pub fn integrate_over_rectangle(f: &GridFunction, rect: &GridRectangle, absolute: bool) -> Result<f64> {
    GridRectangle::new(rect.ix0, rect.ix1, rect.iy0, rect.iy1)?;
    f.spec().check_rect(rect)?;
    Ok(f.spec().cell_area() * f.cell_sum(rect, absolute))
}

/// `f · χ_{I_i x J_j}` for a window annulus.
pub fn annulus_restrict(f: &GridFunction, a: AnnulusIndex) -> Result<GridFunction> {
    let spec = *f.spec();
    if !a.in_window(&spec) {
        let (lo, hi) = spec.annulus_window();
        return Err(Error::Domain(format!(
            "annulus ({}, {}) lies outside the window [{lo}, {hi}]; its cells are not resolved on this grid, so its contribution must be treated as zero by the caller",
            a.i, a.j
        )));
    }
    let n = spec.n();
    let mut values = vec![0.0; n * n];
    for iy in 0..n {
        if spec.axis_level(iy) != a.j {
            continue;
        }
        for ix in 0..n {
            if spec.axis_level(ix) == a.i {
                values[iy * n + ix] = f.value(ix, iy);
            }
        }
    }
    GridFunction::from_values(spec, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogAxes {
    #[default]
    Both,
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub function: FunctionSpec,
}

/// Builtin test objects, expressed in continuum coordinates so the same spec can be
/// built on grids of different resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    /// `χ_{R_{l1,l2}}`.
    DyadicIndicator {
        l1: i32,
        l2: i32,
    },
    /// Indicator of `[x0, x1) x [y0, y1)`; edges must be cell boundaries.
    RectIndicator {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    /// `χ_{I_i x J_j}` for a window annulus.
    AnnulusIndicator {
        i: i32,
        j: i32,
    },
    /// `|x|^a |y|^b` sampled at cell centres.
    Power {
        a: f64,
        b: f64,
    },
    /// `ln(1/|x|) + ln(1/|y|)` (or one axis only) clipped to `[-clip, clip]`;
    /// the default clip is `2^s`.
    TruncatedLog {
        #[serde(default)]
        axes: LogAxes,
        #[serde(default)]
        clip: Option<f64>,
    },
    Gaussian {
        cx: f64,
        cy: f64,
        sigma: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Uniform noise in `[low, high)`, constant on cells of side `2^-level`.
    Noise {
        seed: u64,
        level: i32,
        #[serde(default)]
        low: f64,
        #[serde(default = "one")]
        high: f64,
    },
    /// The coordinate function `x` or `y`.
    Coordinate {
        axis: Axis,
    },
    Combination {
        terms: Vec<Term>,
    },
    Product {
        factors: Vec<FunctionSpec>,
    },
}

fn one() -> f64 {
    1.0
}

/// Where the cell values of a [`GridFunction`] come from.
pub enum FunctionSource<'a> {
    Builtin(&'a FunctionSpec),
    Rule(&'a dyn Fn(f64, f64) -> f64),
    Values(Vec<f64>),
}

pub fn build_function(spec: GridSpec, source: FunctionSource<'_>) -> Result<GridFunction> {
    match source {
        FunctionSource::Builtin(b) => b.build(spec),
        FunctionSource::Rule(rule) => GridFunction::from_fn(spec, rule),
        FunctionSource::Values(v) => GridFunction::from_values(spec, v),
    }
}

impl FunctionSpec {
    pub fn build(&self, spec: GridSpec) -> Result<GridFunction> {
        match self {
            FunctionSpec::Constant { value } => GridFunction::constant(spec, *value),
            FunctionSpec::DyadicIndicator { l1, l2 } => {
                GridFunction::indicator(spec, &DyadicRectangle::new(*l1, *l2).to_grid(&spec)?)
            }
            FunctionSpec::RectIndicator { x0, x1, y0, y1 } => {
                GridFunction::indicator(spec, &GridRectangle::from_coords(&spec, *x0, *x1, *y0, *y1)?)
            }
            FunctionSpec::AnnulusIndicator { i, j } => {
                let ones = GridFunction::constant(spec, 1.0)?;
                annulus_restrict(&ones, AnnulusIndex::new(*i, *j))
            }
            FunctionSpec::Power { a, b } => GridFunction::from_fn(spec, |x, y| x.abs().powf(*a) * y.abs().powf(*b)),
            FunctionSpec::TruncatedLog { axes, clip } => {
                let clip = clip.unwrap_or_else(|| (spec.s() as f64).exp2());
                let axes = *axes;
                GridFunction::from_fn(spec, move |x, y| {
                    let v = match axes {
                        LogAxes::Both => -x.abs().ln() - y.abs().ln(),
                        LogAxes::X => -x.abs().ln(),
                        LogAxes::Y => -y.abs().ln(),
                    };
                    v.clamp(-clip, clip)
                })
            }
            FunctionSpec::Gaussian { cx, cy, sigma, amplitude } => {
                if *sigma <= 0.0 {
                    return Err(Error::Parameter(format!("gaussian sigma must be > 0, got {sigma}")));
                }
                GridFunction::from_fn(spec, |x, y| {
                    let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                    amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
                })
            }
            FunctionSpec::Noise { seed, level, low, high } => noise(spec, *seed, *level, *low, *high),
            FunctionSpec::Coordinate { axis } => match axis {
                Axis::X => GridFunction::from_fn(spec, |x, _| x),
                Axis::Y => GridFunction::from_fn(spec, |_, y| y),
            },
            FunctionSpec::Combination { terms } => {
                let mut acc = GridFunction::zeros(spec);
                for t in terms {
                    let g = t.function.build(spec)?;
                    acc = acc.zip_with(&g, |a, b| a + t.weight * b)?;
                }
                Ok(acc)
            }
            FunctionSpec::Product { factors } => {
                let mut acc = GridFunction::constant(spec, 1.0)?;
                for f in factors {
                    acc = acc.mul(&f.build(spec)?)?;
                }
                Ok(acc)
            }
        }
    }
}

fn noise(spec: GridSpec, seed: u64, level: i32, low: f64, high: f64) -> Result<GridFunction> {
    if level > spec.s() || level < -spec.l_max() + 1 {
        return Err(Error::Alignment(format!(
            "noise level {level} must lie in [{}, {}] so its cells are unions of grid cells",
            -spec.l_max() + 1,
            spec.s()
        )));
    }
    if !(low <= high) {
        return Err(Error::Parameter(format!("noise range [{low}, {high}) is empty")));
    }
    let coarse = 1usize << (spec.l_max() + level);
    let shift = (spec.s() - level) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<f64> =
        (0..coarse * coarse).map(|_| if low == high { low } else { rng.gen_range(low..high) }).collect();
    let n = spec.n();
    let mut values = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            values.push(table[(iy >> shift) * coarse + (ix >> shift)]);
        }
    }
    GridFunction::from_values(spec, values)
}
