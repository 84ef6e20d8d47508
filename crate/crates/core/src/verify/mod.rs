//! Verification suites: pole cancellation under the Bethe ansatz equations,
//! functional relations sampled in exact arithmetic, and fixture matches.

mod poles;
mod relations;
mod tsystem;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::dvf::DvfError;
use crate::qalgebra::{EvalError, Rational, RootAssignment};

pub use poles::{
    check_dvf, check_site, exact_cancellation_check, numeric_total_residue, prefactor_site,
    scan_poles, CancellationReport, CheckMode, NumericResidue, PairResult, PoleContext, PoleSite,
};
pub use relations::{
    sixteen_term_match, relation_check, relation_i_sides, relation_ids, sampled_identity, Side,
};
pub use tsystem::{tsystem_evidence, TSystemPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Dvf(#[from] DvfError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Newton iteration did not converge after {0} restarts")]
    NoConvergence(usize),
    #[error("could not draw {wanted} usable samples ({got} succeeded)")]
    TooManyRetries { wanted: usize, got: usize },
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("relation {id} is not defined for {what}")]
    OutOfRange { id: String, what: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            samples: 20,
        }
    }
}

impl VerifyConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        VerifyConfig { seed, samples }
    }

    /// Generator for one named check, so that reordering checks does not
    /// change their samples.
    pub(crate) fn rng(&self, salt: &str) -> ChaCha8Rng {
        let h = salt.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    /// `Fail` dominates, then `Inconclusive`.
    pub fn and(self, o: Verdict) -> Verdict {
        match (self, o) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

/// The common report shape of every check.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<CancellationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub verdict: Verdict,
    pub details: Vec<Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

pub(crate) fn ser_rat<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A rational with numerator and denominator bounded by `10^3`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = rng.random_range(-1000..=1000);
    let d: i64 = rng.random_range(1..=1000);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `per_color` roots for each of `colors` colors and `inhom` inhomogeneities.
pub fn random_assignment<R: Rng>(
    rng: &mut R,
    colors: usize,
    per_color: usize,
    inhom: usize,
) -> RootAssignment<Rational> {
    let roots = (0..colors)
        .map(|_| (0..per_color).map(|_| random_rational(rng)).collect())
        .collect();
    let inhom = (0..inhom).map(|_| random_rational(rng)).collect();
    RootAssignment::new(roots, inhom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_salted_and_deterministic() {
        let c = VerifyConfig::new(7, 20);
        let a: u64 = c.rng("x").random();
        let b: u64 = c.rng("x").random();
        let d: u64 = c.rng("y").random();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn verdict_combination() {
        assert_eq!(
            Verdict::Pass.and(Verdict::Inconclusive),
            Verdict::Inconclusive
        );
        assert_eq!(Verdict::Inconclusive.and(Verdict::Fail), Verdict::Fail);
        assert!(Verdict::from_bool(true).passed());
    }
}
