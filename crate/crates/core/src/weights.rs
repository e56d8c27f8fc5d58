//! Strictly positive symmetric weight sequences.
//!
//! One type covers the three roles a sequence plays: regularity of the
//! target (`γ`), decay of the error coefficients (`λ`) and the risk norm
//! (`ω`).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `|j|^{2p}`, regularity of a periodic Sobolev space.
    Sobolev { p: f64 },
    /// `|j|^{2s}`, the norm of the `s`-th derivative up to `(2π)^{2s}`.
    Derivative { s: u32 },
    /// `|j|^{-2a}`, ordinarily smooth error density.
    OrdinarySmooth { a: f64 },
    /// `exp(-|j|^{2a})`, super smooth error density.
    SuperSmooth { a: f64 },
    /// `1` everywhere.
    Constant,
    /// Explicit values `w_0, w_1, ...`; the last entry repeats beyond the table.
    Custom { values: Arc<[f64]> },
}

/// A weight sequence `w_j`, `j ∈ Z`, with `w_j = w_{-j} > 0`.
///
/// `scale` multiplies every entry, `w_0` included; unscaled sequences have
/// `w_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    #[serde(flatten)]
    family: WeightFamily,
    #[serde(default = "unit_scale", skip_serializing_if = "is_unit")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

/// Family tag accepted by [`make_weights`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    Sobolev,
    Derivative,
    OrdinarySmooth,
    SuperSmooth,
}

/// Constructs one of the parametric families with its range checks.
pub fn make_weights(tag: FamilyTag, param: f64) -> Result<WeightSequence> {
    let family = match tag {
        FamilyTag::Sobolev => {
            if !(param > 0.5) {
                return Err(Error::InvalidParameter(format!("sobolev requires p > 1/2, got {param}")));
            }
            WeightFamily::Sobolev { p: param }
        }
        FamilyTag::Derivative => {
            if !(param >= 0.0 && param.fract() == 0.0 && param <= u32::MAX as f64) {
                return Err(Error::InvalidParameter(format!(
                    "derivative requires an integer s >= 0, got {param}"
                )));
            }
            WeightFamily::Derivative { s: param as u32 }
        }
        FamilyTag::OrdinarySmooth => {
            if !(param > 0.5) {
                return Err(Error::InvalidParameter(format!("os requires a > 1/2, got {param}")));
            }
            WeightFamily::OrdinarySmooth { a: param }
        }
        FamilyTag::SuperSmooth => {
            if !(param > 0.0) {
                return Err(Error::InvalidParameter(format!("ss requires a > 0, got {param}")));
            }
            WeightFamily::SuperSmooth { a: param }
        }
    };
    Ok(WeightSequence { family, scale: 1.0 })
}

impl WeightSequence {
    pub fn constant() -> Self {
        Self {
            family: WeightFamily::Constant,
            scale: 1.0,
        }
    }

    pub fn sobolev(p: f64) -> Result<Self> {
        make_weights(FamilyTag::Sobolev, p)
    }

    pub fn derivative(s: u32) -> Result<Self> {
        make_weights(FamilyTag::Derivative, s as f64)
    }

    pub fn ordinary_smooth(a: f64) -> Result<Self> {
        make_weights(FamilyTag::OrdinarySmooth, a)
    }

    pub fn super_smooth(a: f64) -> Result<Self> {
        make_weights(FamilyTag::SuperSmooth, a)
    }

    /// Tabulated sequence `w_0, w_1, ..`; entries must be finite and positive.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("custom weights need at least one value".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "custom weights must be strictly positive, got {v}"
            )));
        }
        Ok(Self {
            family: WeightFamily::Custom { values: values.into() },
            scale: 1.0,
        })
    }

    /// The same sequence multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {factor}")));
        }
        Ok(Self {
            family: self.family.clone(),
            scale: self.scale * factor,
        })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Checks the family parameters after deserialization.
    pub fn validate(&self) -> Result<()> {
        match &self.family {
            WeightFamily::Sobolev { p } => make_weights(FamilyTag::Sobolev, *p).map(|_| ()),
            WeightFamily::OrdinarySmooth { a } => make_weights(FamilyTag::OrdinarySmooth, *a).map(|_| ()),
            WeightFamily::SuperSmooth { a } => make_weights(FamilyTag::SuperSmooth, *a).map(|_| ()),
            WeightFamily::Custom { values } => Self::custom(values.to_vec()).map(|_| ()),
            WeightFamily::Derivative { .. } | WeightFamily::Constant => Ok(()),
        }?;
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    /// `w_j`.
    pub fn eval(&self, j: i64) -> f64 {
        let k = j.unsigned_abs();
        let base = if k == 0 {
            match &self.family {
                WeightFamily::Custom { values } => values[0],
                _ => 1.0,
            }
        } else {
            let x = k as f64;
            match &self.family {
                WeightFamily::Sobolev { p } => x.powf(2.0 * p),
                WeightFamily::Derivative { s } => x.powi(2 * *s as i32),
                WeightFamily::OrdinarySmooth { a } => x.powf(-2.0 * a),
                WeightFamily::SuperSmooth { a } => (-x.powf(2.0 * a)).exp(),
                WeightFamily::Constant => 1.0,
                WeightFamily::Custom { values } => values[(k as usize).min(values.len() - 1)],
            }
        };
        self.scale * base
    }

    /// `w_0, .., w_k` evaluated once, for table builders that revisit indices.
    pub fn table(&self, k: usize) -> Vec<f64> {
        (0..=k as i64).map(|j| self.eval(j)).collect()
    }

    /// Exponent `e` with `w_j = O(|j|^e)`; super smooth sequences report 0 as
    /// an upper bound.
    pub fn growth_exponent(&self) -> f64 {
        match &self.family {
            WeightFamily::Sobolev { p } => 2.0 * p,
            WeightFamily::Derivative { s } => 2.0 * *s as f64,
            WeightFamily::OrdinarySmooth { a } => -2.0 * a,
            WeightFamily::SuperSmooth { .. } | WeightFamily::Constant | WeightFamily::Custom { .. } => 0.0,
        }
    }

    /// Whether `w_1, .., w_len` is non-increasing.
    pub fn is_non_increasing(&self, len: usize) -> bool {
        let t = self.table(len);
        t[1..].windows(2).all(|w| w[1] <= w[0])
    }

    /// Whether `self_j / other_j` is non-increasing on `1..=len`.
    pub fn ratio_non_increasing(&self, other: &WeightSequence, len: usize) -> bool {
        let r: Vec<f64> = (1..=len as i64).map(|j| self.eval(j) / other.eval(j)).collect();
        r.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }
}
