//! Empirical sweeps turning each inequality into measured ratios with declared caps.
//!
//! A [`SuiteRun`] fixes the grid, one exponent tuple, and one [`Suite`] with its
//! options; [`SuiteRun::run`] returns an [`InequalityReport`] that carries the run
//! block verbatim, so every report can be re-run from its own parameters.

mod char_norms;
mod cz_comm;
mod duality;
pub mod extrapolation;
pub mod john_nirenberg;
mod maximal;
pub mod probes;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FunctionSpec, GridSpec, LogAxes};
use crate::norms::family::RectangleFamily;
use crate::norms::params::{conjugate, ExponentParams, Predicate};
use crate::operators::cz::SeparableKernel;
use crate::operators::maximal::MaximalVariant;

pub use report::{Check, InequalityReport, Stability, Status, Summary, Trial, TOOL_VERSION};

fn seed0() -> u64 {
    0
}
fn yes() -> bool {
    true
}

macro_rules! defaults {
    ($($name:ident: $ty:ty = $val:expr;)*) => {
        $(fn $name() -> $ty { $val })*
    };
}

defaults! {
    d_tol: f64 = 1e-12;
    d_trials: usize = 8;
    d_spread: f64 = 16.0;
    d_drift10: f64 = 0.10;
    d_drift20: f64 = 0.20;
    d_drift25: f64 = 0.25;
    d_cap: f64 = 50.0;
    d_constant_cap: f64 = 1.5;
    d_r_list: Vec<f64> = vec![1.5, 2.0, 3.0];
    d_family_size: usize = 4;
    d_fs_trials: usize = 3;
    d_operator: String = "strong_maximal".into();
    d_p0: f64 = 1.25;
    d_k: u32 = 8;
    d_ext_trials: usize = 6;
    d_kernel: String = "double_hilbert".into();
    d_dilations: Vec<f64> = vec![1.0, 2.0, 4.0, 8.0, 16.0];
    d_growth: f64 = 2.0;
    d_bmo_spread: f64 = 4.0;
    d_cz_trials: usize = 6;
    d_equiv_cap: f64 = 10.0;
    d_r2: f64 = 0.98;
    d_aligned: RectangleFamily = RectangleFamily::DyadicSides { aligned: true };
    d_gammas: Vec<f64> = (0..8).map(|i| 1.5 + 0.5 * i as f64).collect();
    d_symbol: FunctionSpec = FunctionSpec::TruncatedLog { axes: LogAxes::Both, clip: None };
    d_test_symbols: Vec<FunctionSpec> = probes::bmo_test_symbols();
    d_cz_symbols: Vec<Symbol> = vec![
        Symbol { function: FunctionSpec::TruncatedLog { axes: LogAxes::Both, clip: None }, expect: Expectation::Bmo },
        Symbol { function: FunctionSpec::TruncatedLog { axes: LogAxes::X, clip: None }, expect: Expectation::Bmo },
        Symbol { function: FunctionSpec::Coordinate { axis: crate::grid::Axis::X }, expect: Expectation::NonBmo },
    ];
}

/// Which norm the maximal-operator sweep measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpace {
    Herz,
    #[default]
    MorreyHerz,
    /// The explicit-decomposition upper bound of the block-Herz norm.
    BlockUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Bmo,
    NonBmo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Symbol {
    pub function: FunctionSpec,
    pub expect: Expectation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharNormsOptions {
    /// Relative tolerance for grid norm vs closed form and for the level-step ratio.
    #[serde(default = "d_tol")]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormDualityOptions {
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default = "seed0")]
    pub seed: u64,
    #[serde(default = "d_spread")]
    pub spread_cap: f64,
    #[serde(default = "d_drift10")]
    pub drift: f64,
    /// Restricts the rectangle sweep to levels `lo..=hi`; by default all aligned levels.
    #[serde(default)]
    pub levels: Option<(i32, i32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalBoundsOptions {
    #[serde(default)]
    pub space: NormSpace,
    #[serde(default)]
    pub variant: MaximalVariant,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default = "seed0")]
    pub seed: u64,
    #[serde(default = "d_cap")]
    pub cap: f64,
    #[serde(default = "d_constant_cap")]
    pub constant_cap: f64,
    #[serde(default = "d_drift20")]
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeffermanSteinOptions {
    #[serde(default = "d_r_list")]
    pub r: Vec<f64>,
    /// Size of the smaller family; each trial also uses the family of twice this size.
    #[serde(default = "d_family_size")]
    pub family_size: usize,
    #[serde(default = "d_fs_trials")]
    pub trials: usize,
    #[serde(default = "seed0")]
    pub seed: u64,
    #[serde(default)]
    pub variant: MaximalVariant,
    #[serde(default = "d_cap")]
    pub cap: f64,
    #[serde(default = "d_drift25")]
    pub size_drift: f64,
    #[serde(default = "d_drift25")]
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolationOptions {
    /// `strong_maximal` or a kernel name such as `double_hilbert`.
    #[serde(default = "d_operator")]
    pub operator: String,
    #[serde(default = "d_p0")]
    pub p0: f64,
    #[serde(default = "d_ext_trials")]
    pub trials: usize,
    /// Constant of the weight-generating series; estimated from the probes when absent.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default = "d_k")]
    pub k: u32,
    #[serde(default = "seed0")]
    pub seed: u64,
    #[serde(default)]
    pub variant: MaximalVariant,
    #[serde(default = "d_cap")]
    pub cap: f64,
    #[serde(default = "d_drift25")]
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JohnNirenbergOptions {
    #[serde(default = "d_symbol")]
    pub symbol: FunctionSpec,
    #[serde(default = "d_gammas")]
    pub gammas: Vec<f64>,
    /// Centred dyadic rectangles measured besides the whole box; the fit uses the box.
    #[serde(default)]
    pub rectangles: Vec<(i32, i32)>,
    #[serde(default = "d_r2")]
    pub r2_min: f64,
    #[serde(default = "d_test_symbols")]
    pub test_symbols: Vec<FunctionSpec>,
    #[serde(default = "d_aligned")]
    pub family: RectangleFamily,
    #[serde(default = "d_equiv_cap")]
    pub ratio_cap: f64,
    #[serde(default = "d_drift20")]
    pub drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CzCommOptions {
    #[serde(default = "d_kernel")]
    pub kernel: String,
    #[serde(default = "d_cz_symbols")]
    pub symbols: Vec<Symbol>,
    #[serde(default = "d_dilations")]
    pub dilations: Vec<f64>,
    /// Level of the undilated test cube; defaults to `L_max - 5`.
    #[serde(default)]
    pub base_level: Option<i32>,
    #[serde(default = "d_cz_trials")]
    pub trials: usize,
    #[serde(default = "seed0")]
    pub seed: u64,
    #[serde(default = "d_cap")]
    pub cap: f64,
    /// Largest allowed max/min of a bmo symbol's ratios across the dilation sweep.
    #[serde(default = "d_bmo_spread")]
    pub bmo_spread: f64,
    /// Smallest required growth of a non-bmo symbol's ratio from the first to the last dilation.
    #[serde(default = "d_growth")]
    pub growth: f64,
    #[serde(default = "d_drift25")]
    pub drift: f64,
    #[serde(default = "yes")]
    pub sweep: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum Suite {
    CharNorms(CharNormsOptions),
    NormDuality(NormDualityOptions),
    MaximalBounds(MaximalBoundsOptions),
    FeffermanStein(FeffermanSteinOptions),
    Extrapolation(ExtrapolationOptions),
    JohnNirenbergBmo(JohnNirenbergOptions),
    CzComm(CzCommOptions),
}

pub const SUITE_NAMES: [&str; 7] = [
    "char_norms",
    "norm_duality",
    "maximal_bounds",
    "fefferman_stein",
    "extrapolation",
    "john_nirenberg_bmo",
    "cz_comm",
];

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::CharNorms(_) => SUITE_NAMES[0],
            Suite::NormDuality(_) => SUITE_NAMES[1],
            Suite::MaximalBounds(_) => SUITE_NAMES[2],
            Suite::FeffermanStein(_) => SUITE_NAMES[3],
            Suite::Extrapolation(_) => SUITE_NAMES[4],
            Suite::JohnNirenbergBmo(_) => SUITE_NAMES[5],
            Suite::CzComm(_) => SUITE_NAMES[6],
        }
    }

    pub fn describe(name: &str) -> Option<&'static str> {
        Some(match name {
            "char_norms" => "Morrey-Herz norms of dyadic rectangle indicators against the closed form",
            "norm_duality" => "Hölder pairing, the norm-product lemma, and sup-pairing lower bounds",
            "maximal_bounds" => "norm(M_S f) / norm(f) on Herz, Morrey-Herz, or block upper bounds",
            "fefferman_stein" => "vector-valued maximal inequality for r-sums of function families",
            "extrapolation" => "weighted L^p0 bounds with generated A_1 weights beside Morrey-Herz bounds",
            "john_nirenberg_bmo" => "level-set decay of a bmo symbol and bmo vs Morrey-Herz bmo",
            "cz_comm" => "singular integral and commutator ratios under a dilation sweep",
            _ => return None,
        })
    }

    /// Each suite with its default options.
    pub fn default_for(name: &str) -> Option<Suite> {
        let v = serde_json::json!({ "suite": name });
        serde_json::from_value(v).ok()
    }

    /// Predicates whose failure makes the suite meaningless; checked before any compute.
    pub fn required(&self) -> &'static [Predicate] {
        match self {
            Suite::CharNorms(_) | Suite::NormDuality(_) | Suite::FeffermanStein(_) | Suite::CzComm(_) => {
                &[Predicate::Char]
            }
            Suite::JohnNirenbergBmo(_) => &[Predicate::Char, Predicate::MsHerz],
            Suite::MaximalBounds(_) | Suite::Extrapolation(_) => &[],
        }
    }

    /// Hypotheses of the measured claim; a violation still runs but reports out-of-hypothesis.
    pub fn hypotheses(&self) -> Vec<Predicate> {
        match self {
            Suite::CharNorms(_) | Suite::NormDuality(_) | Suite::JohnNirenbergBmo(_) => vec![],
            Suite::MaximalBounds(o) => match o.space {
                NormSpace::BlockUpper => vec![Predicate::MsHerz, Predicate::Block],
                _ => vec![Predicate::MsHerz],
            },
            Suite::FeffermanStein(_) | Suite::Extrapolation(_) | Suite::CzComm(_) => vec![Predicate::MsHerz],
        }
    }
}

/// One suite invocation: grid, exponents, and options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRun {
    pub grid: GridSpec,
    pub params: ExponentParams,
    #[serde(flatten)]
    pub suite: Suite,
}

impl SuiteRun {
    pub fn new(grid: GridSpec, params: ExponentParams, suite: Suite) -> Self {
        SuiteRun { grid, params, suite }
    }

    /// Everything that can be checked without computing: exponents, required
    /// predicates, option ranges, names, and the refined grid.
    pub fn validate(&self) -> Result<()> {
        let prm = &self.params;
        prm.validate()?;
        if prm.n != 1 || prm.m != 1 {
            return Err(Error::Parameter("sampled grids have one dimension per factor (n = m = 1)".into()));
        }
        for pred in self.suite.required() {
            prm.check(*pred)?;
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && !v.is_nan() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let nonzero = |name: &str, v: usize| {
            if v > 0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be at least 1")))
            }
        };
        let needs_refined = match &self.suite {
            Suite::CharNorms(o) => {
                positive("tolerance", o.tolerance)?;
                false
            }
            Suite::NormDuality(o) => {
                positive("spread_cap", o.spread_cap)?;
                positive("drift", o.drift)?;
                if let Some((lo, hi)) = o.levels {
                    let r = self.grid.aligned_levels();
                    if lo > hi || !r.contains(&lo) || !r.contains(&hi) {
                        return Err(Error::Config(format!(
                            "levels ({lo}, {hi}) must be an ordered pair within the aligned levels {r:?}"
                        )));
                    }
                }
                true
            }
            Suite::MaximalBounds(o) => {
                positive("cap", o.cap)?;
                positive("drift", o.drift)?;
                check_variant(&self.grid, o.variant)?;
                true
            }
            Suite::FeffermanStein(o) => {
                if o.r.is_empty() {
                    return Err(Error::Config("r must list at least one exponent".into()));
                }
                for r in &o.r {
                    if !(*r > 1.0 && r.is_finite()) {
                        return Err(Error::Parameter(format!(
                            "vector-valued exponent r must lie in (1, inf), got {r}"
                        )));
                    }
                }
                nonzero("family_size", o.family_size)?;
                nonzero("trials", o.trials)?;
                positive("cap", o.cap)?;
                check_variant(&self.grid, o.variant)?;
                true
            }
            Suite::Extrapolation(o) => {
                operator_from_name(&o.operator)?;
                if !(o.p0 > 0.0 && o.p0 < prm.p) {
                    return Err(Error::Parameter(format!(
                        "extrapolation needs 0 < p0 < p, got p0 = {}, p = {}",
                        o.p0, prm.p
                    )));
                }
                if !prm.q.is_finite() || o.p0 >= prm.q {
                    return Err(Error::Parameter(format!(
                        "extrapolation needs p0 < q < inf, got p0 = {}, q = {}",
                        o.p0, prm.q
                    )));
                }
                if let Some(c) = o.c {
                    positive("c", c)?;
                }
                if o.k < 1 {
                    return Err(Error::Config("k must be at least 1".into()));
                }
                nonzero("trials", o.trials)?;
                check_variant(&self.grid, o.variant)?;
                true
            }
            Suite::JohnNirenbergBmo(o) => {
                if o.gammas.len() < 2 {
                    return Err(Error::Config("gammas must list at least two levels".into()));
                }
                for g in &o.gammas {
                    positive("gamma", *g)?;
                }
                for &(l1, l2) in &o.rectangles {
                    crate::grid::DyadicRectangle::new(l1, l2).to_grid(&self.grid)?;
                }
                positive("ratio_cap", o.ratio_cap)?;
                o.family.check(&self.grid)?;
                o.family.check(&self.grid.refined()?)?;
                true
            }
            Suite::CzComm(o) => {
                SeparableKernel::from_name(&o.kernel)?;
                if o.sweep {
                    if o.dilations.len() < 2 {
                        return Err(Error::Config("dilations must list at least two factors".into()));
                    }
                    for t in &o.dilations {
                        probes::dilation_exponent(*t)?;
                    }
                    let base = o.base_level.unwrap_or(self.grid.l_max() - 5);
                    let top = o.dilations.iter().map(|t| probes::dilation_exponent(*t).unwrap()).max().unwrap();
                    let r = self.grid.aligned_levels();
                    if !r.contains(&base) || !r.contains(&(base + top)) {
                        return Err(Error::Config(format!(
                            "dilated cubes span levels {base}..={} but the grid resolves only {r:?}",
                            base + top
                        )));
                    }
                }
                positive("cap", o.cap)?;
                true
            }
        };
        if needs_refined {
            self.grid.refined()?;
        }
        Ok(())
    }

    /// Names of the violated hypotheses, formatted with their inequalities.
    pub fn violated_hypotheses(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .suite
            .hypotheses()
            .into_iter()
            .filter_map(|p| self.params.check(p).err().map(|e| e.to_string()))
            .collect();
        // the weight generators live in a block space on which M_S must be bounded
        if let Suite::Extrapolation(o) = &self.suite {
            match weight_block_params(&self.params, o.p0).and_then(|b| b.pred_ms_herz()) {
                Ok(()) => {}
                Err(e) => out.push(format!("weight block space (p0 = {}): {e}", o.p0)),
            }
        }
        out
    }

    pub fn run(&self) -> Result<InequalityReport> {
        self.validate()?;
        match &self.suite {
            Suite::CharNorms(o) => char_norms::run(self, o),
            Suite::NormDuality(o) => duality::run(self, o),
            Suite::MaximalBounds(o) => maximal::run_bounds(self, o),
            Suite::FeffermanStein(o) => maximal::run_fefferman_stein(self, o),
            Suite::Extrapolation(o) => extrapolation::run(self, o),
            Suite::JohnNirenbergBmo(o) => john_nirenberg::run(self, o),
            Suite::CzComm(o) => cz_comm::run(self, o),
        }
    }
}

fn check_variant(grid: &GridSpec, variant: MaximalVariant) -> Result<()> {
    if let MaximalVariant::ExactGrid { max_n } = variant {
        let n = grid.refined()?.n();
        if n > max_n {
            return Err(Error::Cost(format!(
                "exact-grid maximal operator on the refined {n}x{n} grid exceeds the gate of {max_n} per axis"
            )));
        }
    }
    Ok(())
}

/// Operators accepted by the extrapolation sweep.
#[derive(Clone, Debug)]
pub enum NamedOperator {
    StrongMaximal,
    Singular(SeparableKernel),
}

pub fn operator_from_name(name: &str) -> Result<NamedOperator> {
    match name {
        "strong_maximal" | "m_s" => Ok(NamedOperator::StrongMaximal),
        other => SeparableKernel::from_name(other)
            .map(NamedOperator::Singular)
            .map_err(|_| Error::UnknownOperator(format!("{other:?}; expected strong_maximal or a kernel name"))),
    }
}

/// Exponents of the block space used to normalize weight generators: the block space
/// paired with the Morrey-Herz space of exponents `(p0 α, p/p0, q/p0, p0 λ)`.
pub fn weight_block_params(params: &ExponentParams, p0: f64) -> Result<ExponentParams> {
    ExponentParams::new(-p0 * params.alpha, conjugate(params.p / p0), conjugate(params.q / p0), p0 * params.lambda)
}
