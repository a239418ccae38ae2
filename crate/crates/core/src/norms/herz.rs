//! Lebesgue, product Herz and product Morrey-Herz norms.
//!
//! The grid norms are computed from a *class profile*: for every pair of axis level
//! classes `(a, b)` the mass `h² Σ |f|^p` (or `max |f|` when `p = ∞`) of the cells in
//! that class pair. Window annuli are single classes. The innermost class on an axis is
//! the cube `Q_{1-s}`, which is split evenly by every annulus `I_i`, `i <= 1 - s`, so its
//! infinite tail of annuli sums in closed form. The grid values are therefore the exact
//! norms of the piecewise-constant function, not a truncation of them; the tail only
//! diverges when `α + 1/p <= 0` (or `< λ` for the Morrey-Herz supremum) and mass sits on
//! the innermost cells, which is reported as a support error.
//!
//! The Morrey-Herz supremum runs over `L₁, L₂ ∈ [1 - s, L]`. Below `1 - s` the truncated
//! norm scales like `2^{L(α + 1/p)}` against the prefactor `2^{-Lλ}`, and above `L` the
//! truncated sum is saturated while the prefactor decreases, so the supremum over that
//! range is the supremum over all of `ℤ²`.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridRectangle, GridSpec};
use crate::norms::params::{recip, ExponentParams};

/// Which truncation `f χ_{R_{L₁,L₂}}` is used inside the Morrey-Herz supremum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Annuli with `i <= L₁` and `j <= L₂`.
    #[default]
    Rectangular,
    /// Annuli with `i + j <= L`, supremum over `L ∈ [2(1 - s), 2 L_max]`.
    Diagonal,
}

/// `(Σ |f_c|^p h²)^{1/p}` over the grid or a sub-rectangle; `p = ∞` is the max.
pub fn lp_norm(f: &GridFunction, p: f64, region: Option<&GridRectangle>) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Parameter(format!("L^p exponent must lie in (0, inf], got {p}")));
    }
    let spec = f.spec();
    let r = region.copied().unwrap_or_else(|| spec.whole());
    spec.check_rect(&r)?;
    let mut acc = 0.0f64;
    for iy in r.iy0..r.iy1 {
        let row = &f.row(iy)[r.ix0..r.ix1];
        if p.is_infinite() {
            acc = row.iter().fold(acc, |m, v| m.max(v.abs()));
        } else {
            acc += row.iter().map(|v| pow_abs(*v, p)).sum::<f64>();
        }
    }
    Ok(if p.is_infinite() { acc } else { (acc * spec.cell_area()).powf(1.0 / p) })
}

#[inline]
pub(crate) fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else if p == 1.0 {
        v.abs()
    } else {
        v.abs().powf(p)
    }
}

/// Per class pair masses of a function, row-major in `(x-class, y-class)`.
#[derive(Clone, Debug)]
pub struct ClassProfile {
    spec: GridSpec,
    k: usize,
    p: f64,
    mass: Vec<f64>,
}

impl ClassProfile {
    /// Profile of `value(ix, iy)` over the cells of `rect`.
    pub fn build(spec: &GridSpec, rect: &GridRectangle, p: f64, value: impl Fn(usize, usize) -> f64) -> Self {
        let k = spec.num_classes();
        let mut mass = vec![0.0f64; k * k];
        let xc: Vec<usize> = (rect.ix0..rect.ix1).map(|ix| spec.level_class(ix)).collect();
        for iy in rect.iy0..rect.iy1 {
            let row = &mut mass[spec.level_class(iy)..];
            for (ix, &a) in (rect.ix0..rect.ix1).zip(&xc) {
                let v = value(ix, iy);
                let slot = &mut row[a * k];
                if p.is_infinite() {
                    *slot = (*slot).max(v.abs());
                } else {
                    *slot += pow_abs(v, p);
                }
            }
        }
        if p.is_finite() {
            let area = spec.cell_area();
            mass.iter_mut().for_each(|m| *m *= area);
        }
        ClassProfile { spec: *spec, k, p, mass }
    }

    pub fn of(f: &GridFunction, p: f64) -> Self {
        Self::build(f.spec(), &f.spec().whole(), p, |ix, iy| f.value(ix, iy))
    }

    pub fn classes(&self) -> usize {
        self.k
    }

    /// Mass of class pair `(a, b)`: `‖f χ_ab‖_p^p`, or the max of `|f|` when `p = ∞`.
    pub fn mass(&self, a: usize, b: usize) -> f64 {
        self.mass[a * self.k + b]
    }

    fn inner_mass(&self) -> bool {
        (0..self.k).any(|c| self.mass(0, c) != 0.0 || self.mass(c, 0) != 0.0)
    }
}

/// The per-class terms of the Herz sum for one set of exponents.
#[derive(Clone, Debug)]
pub struct HerzProfile {
    spec: GridSpec,
    k: usize,
    params: ExponentParams,
    /// `m_ab^{q/p}` (or `m_ab^{1/p}` when `q = ∞`), with `m_ab^{·}` of the `p = ∞` max read as `m_ab`.
    powered: Vec<f64>,
    /// Weight of window class `c >= 1`; entry 0 is unused.
    level_factor: Vec<f64>,
    /// Axis weights with no level cap.
    full: Vec<f64>,
    inner_mass: bool,
}

/// Why an inner-class tail cannot be summed.
#[derive(Clone, Debug)]
pub(crate) struct Divergence(pub String);

impl HerzProfile {
    pub fn new(profile: &ClassProfile, params: &ExponentParams) -> Result<Self> {
        Self::checked(profile, params).map_err(|d| Error::Support { count: 0, cells: Vec::new(), reason: d.0 })
    }

    pub(crate) fn checked(profile: &ClassProfile, params: &ExponentParams) -> std::result::Result<Self, Divergence> {
        debug_assert_eq!(profile.p.to_bits(), params.p.to_bits(), "profile built for another exponent");
        let spec = profile.spec;
        let k = profile.k;
        let q = params.q;
        let ip = recip(params.p);
        let e = if q.is_infinite() { ip } else { q * ip };
        let exponent = if params.p.is_infinite() {
            if q.is_infinite() {
                1.0
            } else {
                q
            }
        } else {
            e
        };
        let powered = profile
            .mass
            .iter()
            .map(|&m| {
                if m == 0.0 {
                    0.0
                } else if exponent == 1.0 {
                    m
                } else {
                    m.powf(exponent)
                }
            })
            .collect();
        let qq = if q.is_infinite() { 1.0 } else { q };
        let level_factor = (0..k).map(|c| (spec.class_level(c) as f64 * qq * params.alpha).exp2()).collect();
        let inner_mass = profile.inner_mass();
        let mut out = HerzProfile { spec, k, params: *params, powered, level_factor, full: Vec::new(), inner_mass };
        out.full = (0..k).map(|c| out.axis_factor(c, spec.l_max())).collect();
        if inner_mass {
            let beta = params.beta(1);
            if q.is_finite() && beta <= 0.0 {
                return Err(Divergence(format!(
                    "alpha + 1/p = {beta} <= 0 makes the annulus sum over the innermost cube diverge"
                )));
            }
            if q.is_infinite() && beta < 0.0 {
                return Err(Divergence(format!(
                    "alpha + 1/p = {beta} < 0 makes the annulus supremum over the innermost cube infinite"
                )));
            }
        }
        Ok(out)
    }

    pub fn params(&self) -> &ExponentParams {
        &self.params
    }

    /// Axis weight of class `c` when the annulus level is capped at `cap`
    /// (already raised to the power `q`, unless `q = ∞`).
    fn axis_factor(&self, c: usize, cap: i32) -> f64 {
        let i0 = self.spec.innermost_level();
        if c > 0 {
            return if self.spec.class_level(c) <= cap { self.level_factor[c] } else { 0.0 };
        }
        let s = self.spec.s() as f64;
        let ip = recip(self.params.p);
        let beta = self.params.beta(1);
        let top = cap.min(i0) as f64;
        if self.params.q.is_infinite() {
            ((s - 2.0) * ip + top * beta).exp2()
        } else {
            let q = self.params.q;
            ((s - 2.0) * q * ip + top * q * beta).exp2() / (1.0 - (-q * beta).exp2())
        }
    }

    fn term(&self, a: usize, b: usize, cap_a: i32, cap_b: i32) -> f64 {
        let m = self.powered[a * self.k + b];
        if m == 0.0 {
            return 0.0;
        }
        let l = self.spec.l_max();
        let fa = if cap_a >= l { self.full[a] } else { self.axis_factor(a, cap_a) };
        let fb = if cap_b >= l { self.full[b] } else { self.axis_factor(b, cap_b) };
        fa * fb * m
    }

    fn finish(&self, acc: f64) -> f64 {
        if self.params.q.is_infinite() {
            acc
        } else {
            acc.powf(1.0 / self.params.q)
        }
    }

    fn combine(&self, acc: f64, t: f64) -> f64 {
        if self.params.q.is_infinite() {
            acc.max(t)
        } else {
            acc + t
        }
    }

    /// `‖f χ_{R_{l1,l2}}‖_K̇` for aligned levels `l1, l2`.
    pub fn truncated(&self, l1: i32, l2: i32) -> f64 {
        let mut acc = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                acc = self.combine(acc, self.term(a, b, l1, l2));
            }
        }
        self.finish(acc)
    }

    /// `‖f χ_ab‖_K̇` for a single class pair.
    pub fn piece(&self, a: usize, b: usize) -> f64 {
        let l = self.spec.l_max();
        self.finish(self.term(a, b, l, l))
    }

    pub fn herz(&self) -> f64 {
        self.truncated_table()[self.k * self.k - 1]
    }

    /// Truncated Herz norms at every pair of aligned levels, row-major in class index.
    fn truncated_table(&self) -> Vec<f64> {
        let k = self.k;
        let l = self.spec.l_max();
        let mut prefix = vec![0.0; k * k];
        for a in 0..k {
            let mut row = 0.0;
            for b in 0..k {
                row = self.combine(row, self.term(a, b, l, l));
                let above = if a > 0 { prefix[(a - 1) * k + b] } else { 0.0 };
                prefix[a * k + b] = self.combine(above, row);
            }
        }
        prefix.into_iter().map(|v| self.finish(v)).collect()
    }

    pub fn morrey_herz(&self, truncation: Truncation) -> std::result::Result<f64, String> {
        let lambda = self.params.lambda;
        if self.inner_mass && self.params.beta(1) < lambda {
            return Err(format!(
                "alpha + 1/p = {} < lambda = {lambda} makes the Morrey-Herz supremum over shrinking cubes infinite",
                self.params.beta(1)
            ));
        }
        let spec = &self.spec;
        let k = self.k;
        let mut best = 0.0f64;
        match truncation {
            Truncation::Rectangular => {
                let table = self.truncated_table();
                for a in 0..k {
                    for b in 0..k {
                        let lv = (spec.class_level(a) + spec.class_level(b)) as f64;
                        best = best.max((-lv * lambda).exp2() * table[a * k + b]);
                    }
                }
            }
            Truncation::Diagonal => {
                let i0 = spec.innermost_level();
                for t in 2 * i0..=2 * spec.l_max() {
                    let mut acc = 0.0;
                    for a in 0..k {
                        for b in 0..k {
                            let (la, lb) = (spec.class_level(a), spec.class_level(b));
                            let v = match (a, b) {
                                (0, 0) => self.term(0, 0, i0, i0),
                                (0, _) if lb <= t - i0 => self.term(0, b, t - lb, lb),
                                (_, 0) if la <= t - i0 => self.term(a, 0, la, t - la),
                                _ if a > 0 && b > 0 && la + lb <= t => self.term(a, b, la, lb),
                                _ => 0.0,
                            };
                            acc = self.combine(acc, v);
                        }
                    }
                    best = best.max((-(t as f64) * lambda).exp2() * self.finish(acc));
                }
            }
        }
        Ok(best)
    }
}

fn grid_only(params: &ExponentParams) -> Result<()> {
    params.validate()?;
    if params.n != 1 || params.m != 1 {
        return Err(Error::Parameter(format!(
            "sampled grids have one dimension per factor; got n = {}, m = {}",
            params.n, params.m
        )));
    }
    Ok(())
}

fn support_error(f: &GridFunction, reason: String) -> Error {
    let spec = f.spec();
    let inner: Vec<(usize, usize)> =
        f.support().filter(|&(ix, iy)| spec.level_class(ix) == 0 || spec.level_class(iy) == 0).collect();
    Error::Support { count: inner.len(), cells: inner.into_iter().take(8).collect(), reason }
}

fn profile(f: &GridFunction, params: &ExponentParams) -> Result<HerzProfile> {
    grid_only(params)?;
    HerzProfile::checked(&ClassProfile::of(f, params.p), params).map_err(|d| support_error(f, d.0))
}

/// `(Σ_{i,j} 2^{(i+j)qα} ‖f χ_{I_i × J_j}‖_p^q)^{1/q}`, supremum form when `q = ∞`.
pub fn herz_norm(f: &GridFunction, params: &ExponentParams) -> Result<f64> {
    Ok(profile(f, params)?.herz())
}

/// `‖f χ_{R_{l1,l2}}‖_K̇` for aligned `l1, l2`.
pub fn truncated_herz_norm(f: &GridFunction, params: &ExponentParams, l1: i32, l2: i32) -> Result<f64> {
    let spec = f.spec();
    for l in [l1, l2] {
        if !spec.aligned_levels().contains(&l) {
            return Err(Error::Alignment(format!("level {l} is not aligned on this grid")));
        }
    }
    Ok(profile(f, params)?.truncated(l1, l2))
}

/// `sup_{L₁,L₂} 2^{-(L₁+L₂)λ} ‖f χ_{R_{L₁,L₂}}‖_K̇`.
pub fn morrey_herz_norm(f: &GridFunction, params: &ExponentParams) -> Result<f64> {
    morrey_herz_norm_with(f, params, Truncation::Rectangular)
}

pub fn morrey_herz_norm_with(f: &GridFunction, params: &ExponentParams, truncation: Truncation) -> Result<f64> {
    profile(f, params)?.morrey_herz(truncation).map_err(|reason| support_error(f, reason))
}

/// Which closed form [`char_rect_norm_closed_form`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Herz,
    MorreyHerz,
}

/// Exact `‖χ_{R_{l1,l2}}‖` for `R_{l1,l2} ⊂ ℝⁿ × ℝᵐ`.
///
/// Per factor of dimension `d` the annulus sum is geometric:
/// `(1 - 2^-d)^{1/p} 2^{l(α + d/p)} (1 - 2^{-q(α + d/p)})^{-1/q}`. The Morrey-Herz
/// supremum is attained at `(L₁, L₂) = (l1, l2)` and contributes `2^{-(l1+l2)λ}`;
/// `λ = 0` reduces to the Herz value.
pub fn char_rect_norm_closed_form(params: &ExponentParams, l1: i32, l2: i32, space: Space) -> Result<f64> {
    params.validate()?;
    let lambda = match space {
        Space::Herz => 0.0,
        Space::MorreyHerz => params.lambda,
    };
    if lambda > 0.0 {
        params.pred_char()?;
    } else {
        let b = params.beta(params.n).min(params.beta(params.m));
        let ok = if params.q.is_infinite() { b >= 0.0 } else { b > 0.0 };
        if !ok {
            return Err(Error::Predicate {
                name: "herz_char",
                inequality: "alpha + n/p > 0",
                detail: format!("got alpha + n/p = {b}"),
            });
        }
    }
    let ip = recip(params.p);
    let axis = |d: u32, l: i32| {
        let beta = params.beta(d);
        let shell = (1.0 - (-(d as f64)).exp2()).powf(ip);
        let tail = if params.q.is_infinite() { 1.0 } else { (1.0 - (-params.q * beta).exp2()).powf(-1.0 / params.q) };
        shell * (l as f64 * beta).exp2() * tail
    };
    Ok(axis(params.n, l1) * axis(params.m, l2) * (-((l1 + l2) as f64) * lambda).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, FunctionSpec};

    fn params(a: f64, p: f64, q: f64, l: f64) -> ExponentParams {
        ExponentParams::new(a, p, q, l).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn noise(g: GridSpec, seed: u64) -> GridFunction {
        FunctionSpec::Noise { seed, level: g.s(), low: -1.0, high: 1.0 }.build(g).unwrap()
    }

    /// Direct evaluation of the Herz sum over window annuli only, for functions that
    /// vanish on the innermost cross.
    fn window_herz(f: &GridFunction, prm: &ExponentParams) -> f64 {
        let spec = f.spec();
        let (lo, hi) = spec.annulus_window();
        let mut acc: f64 = 0.0;
        for i in lo..=hi {
            for j in lo..=hi {
                let piece = crate::grid::annulus_restrict(f, crate::grid::AnnulusIndex::new(i, j)).unwrap();
                let lp = lp_norm(&piece, prm.p, None).unwrap();
                let w = ((i + j) as f64 * prm.alpha).exp2() * lp;
                if prm.q.is_infinite() {
                    acc = acc.max(w);
                } else {
                    acc += w.powf(prm.q);
                }
            }
        }
        if prm.q.is_infinite() {
            acc
        } else {
            acc.powf(1.0 / prm.q)
        }
    }

    fn off_cross(f: &GridFunction) -> GridFunction {
        let spec = *f.spec();
        let n = spec.n();
        let mut v = f.values().to_vec();
        for iy in 0..n {
            for ix in 0..n {
                if spec.level_class(ix) == 0 || spec.level_class(iy) == 0 {
                    v[iy * n + ix] = 0.0;
                }
            }
        }
        GridFunction::from_values(spec, v).unwrap()
    }

    #[test]
    fn lp_examples() {
        let g = make_grid(2, 3).unwrap();
        let chi = FunctionSpec::DyadicIndicator { l1: 0, l2: 0 }.build(g).unwrap();
        assert!(rel(lp_norm(&chi, 2.0, None).unwrap(), 1.0) < 1e-15);
        let c = GridFunction::constant(g, -3.0).unwrap();
        for p in [0.5, 1.0, 2.0, 3.5] {
            assert!(rel(lp_norm(&c, p, None).unwrap(), 3.0 * g.box_area().powf(1.0 / p)) < 1e-13);
        }
        assert_eq!(lp_norm(&c, f64::INFINITY, None).unwrap(), 3.0);
        assert!(lp_norm(&c, 0.0, None).is_err());

        let f = noise(g, 1);
        let direct = (f.values().iter().map(|v| v.abs().powi(3)).sum::<f64>() * g.cell_area()).cbrt();
        assert!(rel(lp_norm(&f, 3.0, None).unwrap(), direct) < 1e-12);
    }

    #[test]
    fn herz_matches_window_sum_off_the_cross() {
        let g = make_grid(2, 2).unwrap();
        let f = off_cross(&noise(g, 4));
        for prm in [params(0.25, 2.0, 2.0, 0.0), params(-0.3, 3.0, 1.5, 0.0), params(0.1, 1.5, f64::INFINITY, 0.0)] {
            assert!(rel(herz_norm(&f, &prm).unwrap(), window_herz(&f, &prm)) < 1e-12);
        }
    }

    #[test]
    fn herz_examples() {
        let g = make_grid(2, 3).unwrap();
        let chi = FunctionSpec::DyadicIndicator { l1: 0, l2: 0 }.build(g).unwrap();
        assert!(rel(herz_norm(&chi, &params(0.0, 2.0, 2.0, 0.0)).unwrap(), 1.0) < 1e-14);
        let v = herz_norm(&chi, &params(0.25, 2.0, 2.0, 0.0)).unwrap();
        assert!(rel(v, 0.5 / (1.0 - (-1.5f64).exp2())) < 1e-14, "{v}");
        assert!((v - 0.773459).abs() < 1e-6);
        let f = noise(g, 9);
        let prm = params(0.2, 2.5, 1.5, 0.0);
        assert!(rel(herz_norm(&f.scale(2.0).unwrap(), &prm).unwrap(), 2.0 * herz_norm(&f, &prm).unwrap()) < 1e-13);
    }

    #[test]
    fn alpha_zero_q_equal_p_is_lp() {
        let g = make_grid(2, 2).unwrap();
        for seed in 0..20 {
            let f = noise(g, seed);
            for p in [1.0, 2.0, 3.0] {
                let h = herz_norm(&f, &params(0.0, p, p, 0.0)).unwrap();
                assert!(rel(h, lp_norm(&f, p, None).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn morrey_herz_lambda_zero_is_herz() {
        let g = make_grid(2, 2).unwrap();
        let f = noise(g, 2);
        let prm = params(0.3, 2.0, 3.0, 0.0);
        assert_eq!(morrey_herz_norm(&f, &prm).unwrap(), herz_norm(&f, &prm).unwrap());
    }

    #[test]
    fn closed_form_matches_grid_on_every_aligned_indicator() {
        let g = make_grid(2, 3).unwrap();
        for prm in [params(0.25, 2.0, 2.0, 0.5), params(0.0, 3.0, 1.5, 0.2), params(0.1, f64::INFINITY, 2.0, 0.05)] {
            for l1 in g.aligned_levels() {
                for l2 in g.aligned_levels() {
                    let chi = FunctionSpec::DyadicIndicator { l1, l2 }.build(g).unwrap();
                    let grid = morrey_herz_norm(&chi, &prm).unwrap();
                    let exact = char_rect_norm_closed_form(&prm, l1, l2, Space::MorreyHerz).unwrap();
                    assert!(rel(grid, exact) < 1e-12, "{l1},{l2}: {grid} vs {exact}");
                    let h = herz_norm(&chi, &prm).unwrap();
                    let hx = char_rect_norm_closed_form(&prm, l1, l2, Space::Herz).unwrap();
                    assert!(rel(h, hx) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_example_and_scaling() {
        let prm = params(0.25, 2.0, 2.0, 0.5);
        let v = char_rect_norm_closed_form(&prm, 0, 0, Space::MorreyHerz).unwrap();
        assert!((v - 0.773459).abs() < 1e-6);
        let r = char_rect_norm_closed_form(&prm, 1, 0, Space::MorreyHerz).unwrap() / v;
        assert!(rel(r, 0.25f64.exp2()) < 1e-15);
        assert!(char_rect_norm_closed_form(&params(0.25, 2.0, 2.0, 0.75), 0, 0, Space::MorreyHerz).is_err());
    }

    #[test]
    fn inner_mass_with_divergent_tail_is_a_support_error() {
        let g = make_grid(2, 2).unwrap();
        let chi = FunctionSpec::DyadicIndicator { l1: -1, l2: 0 }.build(g).unwrap();
        let err = herz_norm(&chi, &params(-0.5, 2.0, 2.0, 0.0)).unwrap_err();
        match err {
            Error::Support { count, cells, .. } => {
                assert!(count > 0 && !cells.is_empty());
                assert!(cells.iter().all(|&(ix, iy)| g.level_class(ix) == 0 || g.level_class(iy) == 0));
            }
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(morrey_herz_norm(&chi, &params(0.0, 2.0, 2.0, 0.6)), Err(Error::Support { .. })));
        // the same exponents are fine once the cross is empty
        let far = FunctionSpec::AnnulusIndicator { i: 1, j: 1 }.build(g).unwrap();
        assert!(herz_norm(&far, &params(-0.5, 2.0, 2.0, 0.0)).is_ok());
    }

    #[test]
    fn truncated_norm_is_restriction() {
        let g = make_grid(2, 2).unwrap();
        let f = noise(g, 6);
        let prm = params(0.2, 2.0, 1.5, 0.0);
        for (l1, l2) in [(0, 1), (-1, 2), (2, -1)] {
            let r = crate::grid::DyadicRectangle::new(l1, l2).to_grid(&g).unwrap();
            let restricted = herz_norm(&f.restrict(&r).unwrap(), &prm).unwrap();
            assert!(rel(truncated_herz_norm(&f, &prm, l1, l2).unwrap(), restricted) < 1e-13);
        }
    }

    #[test]
    fn diagonal_truncation_agrees_on_the_unit_cube_scaling() {
        let g = make_grid(2, 2).unwrap();
        let prm = params(0.25, 2.0, 2.0, 0.5);
        let chi = FunctionSpec::DyadicIndicator { l1: 0, l2: 0 }.build(g).unwrap();
        let rect = morrey_herz_norm(&chi, &prm).unwrap();
        let diag = morrey_herz_norm_with(&chi, &prm, Truncation::Diagonal).unwrap();
        assert!(diag > 0.0 && diag.is_finite());
        assert!(rect > 0.0);
        let full = morrey_herz_norm_with(&chi, &prm.with_lambda(0.0), Truncation::Diagonal).unwrap();
        assert!(rel(full, herz_norm(&chi, &prm).unwrap()) < 1e-14);
    }

    #[test]
    fn grid_norms_reject_symbolic_dimensions() {
        let g = make_grid(1, 1).unwrap();
        let f = GridFunction::constant(g, 1.0).unwrap();
        let prm = ExponentParams::with_dims(0.0, 2.0, 2.0, 0.0, 2, 1).unwrap();
        assert!(matches!(herz_norm(&f, &prm), Err(Error::Parameter(_))));
    }
}
