//! Decomposition of predictive uncertainty into epistemic and aleatoric parts.
//!
//! A classifier reports how plausible each class is for an instance as a pair
//! of support degrees in [0,1]. Both classes plausible at once means the model
//! cannot tell them apart for lack of data (epistemic uncertainty); both
//! implausible means the instance looks intrinsically ambiguous (aleatoric
//! uncertainty). What remains is strict preference for one class. The four
//! quantities always sum to one.

use crate::error::{Error, Result};

/// Plausibility of class 1 and class 0 for a single instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportDegrees {
    pub pi1: f64,
    pub pi0: f64,
}

impl SupportDegrees {
    pub fn new(pi1: f64, pi0: f64) -> Result<Self> {
        for (what, v) in [("pi1", pi1), ("pi0", pi0)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { what, value: v });
            }
        }
        Ok(SupportDegrees { pi1, pi0 })
    }
}

/// Epistemic/aleatoric degrees plus strict class preferences; sums to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyProfile {
    pub epistemic: f64,
    pub aleatoric: f64,
    /// Strict preference for class 1 (positive only when pi1 > pi0).
    pub s1: f64,
    /// Strict preference for class 0 (positive only when pi0 > pi1).
    pub s0: f64,
}

/// Support degrees together with their derived profile.
#[derive(Debug, Clone, Copy)]
pub struct Assessment {
    pub support: SupportDegrees,
    pub profile: UncertaintyProfile,
}

impl Assessment {
    pub fn from_support(support: SupportDegrees) -> Result<Self> {
        Ok(Assessment { support, profile: profile_from_support(support)? })
    }
}

/// Splits a support pair into epistemic, aleatoric, and preference degrees.
pub fn profile_from_support(support: SupportDegrees) -> Result<UncertaintyProfile> {
    let SupportDegrees { pi1, pi0 } = SupportDegrees::new(support.pi1, support.pi0)?;
    Ok(UncertaintyProfile {
        epistemic: pi1.min(pi0),
        aleatoric: 1.0 - pi1.max(pi0),
        s1: (pi1 - pi0).max(0.0),
        s0: (pi0 - pi1).max(0.0),
    })
}

/// Shannon entropy of a binary posterior, in bits. Maximal at p = 0.5.
pub fn entropy_score(p: f64) -> f64 {
    let xlog2 = |v: f64| if v <= 0.0 { 0.0 } else { v * v.log2() };
    -xlog2(p) - xlog2(1.0 - p)
}

/// One minus the probability of the predicted class. Maximal at p = 0.5.
pub fn least_confidence_score(p: f64) -> f64 {
    1.0 - p.max(1.0 - p)
}

/// Negated gap between the two class probabilities, in [-1, 0]. Maximal at p = 0.5.
pub fn margin_score(p: f64) -> f64 {
    p.min(1.0 - p) - p.max(1.0 - p)
}
