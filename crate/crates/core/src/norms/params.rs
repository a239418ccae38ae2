use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent tuple `(α, p, q, λ)` with symbolic dimensions `n`, `m`.
///
/// `p` and `q` may be `f64::INFINITY`; in serialized form infinity is written as the
/// string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentParams {
    pub alpha: f64,
    #[serde(serialize_with = "ser_exp", deserialize_with = "de_exp")]
    pub p: f64,
    #[serde(serialize_with = "ser_exp", deserialize_with = "de_exp")]
    pub q: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "one")]
    pub n: u32,
    #[serde(default = "one")]
    pub m: u32,
}

fn one() -> u32 {
    1
}

fn ser_exp<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_exp<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Int(v) => Ok(v as f64),
        Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
    }
}

/// Named admissibility predicates, one per family of hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Banach,
    MsHerz,
    Char,
    Block,
}

impl Predicate {
    pub fn name(self) -> &'static str {
        match self {
            Predicate::Banach => "pred_banach",
            Predicate::MsHerz => "pred_ms_herz",
            Predicate::Char => "pred_char",
            Predicate::Block => "pred_block",
        }
    }

    pub fn inequality(self) -> &'static str {
        match self {
            Predicate::Banach => "p >= 1 and q >= 1",
            Predicate::MsHerz => "1 < p < inf, 0 < q < inf, max(-n/p, -m/p) < alpha < min(n(1-1/p), m(1-1/p))",
            Predicate::Char => "alpha + n/p > lambda > 0",
            Predicate::Block => "-alpha + n/p' > lambda > 0",
        }
    }
}

/// Hölder conjugate, with `1' = ∞`, `∞' = 1`, and `∞` for exponents below 1.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p <= 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `1/p`, zero at infinity.
pub fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

impl ExponentParams {
    pub fn new(alpha: f64, p: f64, q: f64, lambda: f64) -> Result<Self> {
        Self::with_dims(alpha, p, q, lambda, 1, 1)
    }

    pub fn with_dims(alpha: f64, p: f64, q: f64, lambda: f64, n: u32, m: u32) -> Result<Self> {
        let out = ExponentParams { alpha, p, q, lambda, n, m };
        out.validate()?;
        Ok(out)
    }

    /// Basic well-formedness: `p, q ∈ (0, ∞]`, `λ ≥ 0`, finite `α`, positive dimensions.
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be finite, got {}", self.alpha)));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Parameter(format!("{name} must lie in (0, inf], got {v}")));
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Parameter(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::Parameter("dimensions n, m must be positive".into()));
        }
        Ok(())
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_conj(&self) -> f64 {
        conjugate(self.q)
    }

    /// `(-α, p', q', λ)`.
    pub fn dual(&self) -> ExponentParams {
        ExponentParams { alpha: -self.alpha, p: self.p_conj(), q: self.q_conj(), ..*self }
    }

    pub fn with_lambda(&self, lambda: f64) -> ExponentParams {
        ExponentParams { lambda, ..*self }
    }

    /// `α + d/p` for an axis of dimension `d`.
    pub fn beta(&self, d: u32) -> f64 {
        self.alpha + d as f64 * recip(self.p)
    }

    fn violation(&self, pred: Predicate, detail: String) -> Error {
        Error::Predicate { name: pred.name(), inequality: pred.inequality(), detail }
    }

    pub fn check(&self, pred: Predicate) -> Result<()> {
        match pred {
            Predicate::Banach => self.pred_banach(),
            Predicate::MsHerz => self.pred_ms_herz(),
            Predicate::Char => self.pred_char(),
            Predicate::Block => self.pred_block(),
        }
    }

    pub fn holds(&self, pred: Predicate) -> bool {
        self.check(pred).is_ok()
    }

    pub fn pred_banach(&self) -> Result<()> {
        if self.p >= 1.0 && self.q >= 1.0 {
            Ok(())
        } else {
            Err(self.violation(Predicate::Banach, format!("got p = {}, q = {}", self.p, self.q)))
        }
    }

    pub fn pred_ms_herz(&self) -> Result<()> {
        let (p, q, a) = (self.p, self.q, self.alpha);
        let (n, m) = (self.n as f64, self.m as f64);
        let lo = (-n / p).max(-m / p);
        let hi = (n * (1.0 - 1.0 / p)).min(m * (1.0 - 1.0 / p));
        let ok = p > 1.0 && p.is_finite() && q > 0.0 && q.is_finite() && lo < a && a < hi;
        if ok {
            Ok(())
        } else {
            Err(self.violation(
                Predicate::MsHerz,
                format!("got p = {p}, q = {q}, alpha = {a}, admissible alpha range ({lo}, {hi})"),
            ))
        }
    }

    /// Checked on both factors, so `α + min(n, m)/p > λ > 0`.
    pub fn pred_char(&self) -> Result<()> {
        let b = self.beta(self.n).min(self.beta(self.m));
        if b > self.lambda && self.lambda > 0.0 {
            Ok(())
        } else {
            Err(self.violation(Predicate::Char, format!("got alpha + n/p = {b}, lambda = {}", self.lambda)))
        }
    }

    /// The characteristic-function predicate of the dual exponents `(-α, p', q', λ)`.
    pub fn pred_block(&self) -> Result<()> {
        let d = self.dual();
        let b = d.beta(self.n).min(d.beta(self.m));
        if b > self.lambda && self.lambda > 0.0 {
            Ok(())
        } else {
            Err(self.violation(Predicate::Block, format!("got -alpha + n/p' = {b}, lambda = {}", self.lambda)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(3.0), 1.5);
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        let d = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap().dual();
        assert_eq!((d.alpha, d.p, d.q, d.lambda), (-0.25, 2.0, 2.0, 0.5));
    }

    #[test]
    fn predicates() {
        let base = ExponentParams::new(0.25, 2.0, 2.0, 0.5).unwrap();
        assert!(base.pred_banach().is_ok());
        assert!(base.pred_ms_herz().is_ok());
        assert!(base.pred_char().is_ok());
        // -0.25 + 0.5 = 0.25 is not above 0.5
        assert!(base.pred_block().is_err());
        assert!(base.with_lambda(0.2).pred_block().is_ok());

        let err = ExponentParams::new(0.25, 2.0, 2.0, 0.75).unwrap().pred_char().unwrap_err();
        assert!(err.to_string().contains("alpha + n/p > lambda > 0"), "{err}");
        assert!(ExponentParams::new(0.6, 2.0, 2.0, 0.1).unwrap().pred_ms_herz().is_err());
        assert!(ExponentParams::new(0.0, 0.5, 2.0, 0.1).unwrap().pred_banach().is_err());
        assert!(ExponentParams::new(0.0, f64::INFINITY, 2.0, 0.1).unwrap().pred_ms_herz().is_err());
    }

    #[test]
    fn char_checks_both_factors() {
        let p = ExponentParams::with_dims(-0.4, 2.0, 2.0, 0.2, 2, 1).unwrap();
        // n-factor: -0.4 + 1 = 0.6, m-factor: -0.4 + 0.5 = 0.1
        assert!(p.pred_char().is_err());
    }

    #[test]
    fn malformed() {
        assert!(ExponentParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ExponentParams::new(0.0, 1.0, -1.0, 0.0).is_err());
        assert!(ExponentParams::new(0.0, 1.0, 1.0, -0.1).is_err());
        assert!(ExponentParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn infinite_exponents_round_trip() {
        let p = ExponentParams::new(0.1, f64::INFINITY, 2.0, 0.0).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"inf\""));
        let back: ExponentParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let q: ExponentParams = serde_json::from_str(r#"{"alpha": 0, "p": 2, "q": 3}"#).unwrap();
        assert_eq!((q.lambda, q.n, q.m), (0.0, 1, 1));
    }
}
