//! Finite-support probability distributions with exact rational weights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistributionError {
    #[error("distribution has empty support")]
    EmptySupport,
    #[error("probability {0} is negative")]
    NegativeProbability(Rational),
    #[error("probabilities sum to {0}, expected 1")]
    BadTotal(Rational),
}

/// A probability distribution with finite support.
///
/// Atoms are kept sorted by value with zero-probability entries dropped and
/// duplicates merged, so two equal distributions are structurally identical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(T, Rational)>", into = "Vec<(T, Rational)>")]
pub struct Distribution<T: Ord + Clone> {
    atoms: Vec<(T, Rational)>,
}

impl<T: Ord + Clone> Distribution<T> {
    /// Builds a distribution from `(value, probability)` pairs. Probabilities
    /// must be nonnegative and sum to exactly 1.
    pub fn new(pairs: impl IntoIterator<Item = (T, Rational)>) -> Result<Self, DistributionError> {
        let mut merged: BTreeMap<T, Rational> = BTreeMap::new();
        for (value, p) in pairs {
            if p.is_negative() {
                return Err(DistributionError::NegativeProbability(p));
            }
            let entry = merged.entry(value).or_insert_with(Rational::zero);
            *entry += p;
        }
        let atoms: Vec<(T, Rational)> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        if atoms.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        let total: Rational = atoms.iter().map(|(_, p)| *p).sum();
        if total != Rational::one() {
            return Err(DistributionError::BadTotal(total));
        }
        Ok(Distribution { atoms })
    }

    /// Point mass on a single value.
    pub fn point(value: T) -> Self {
        Distribution {
            atoms: vec![(value, Rational::one())],
        }
    }

    /// Uniform distribution over distinct values.
    pub fn uniform(values: impl IntoIterator<Item = T>) -> Result<Self, DistributionError> {
        let values: Vec<T> = values.into_iter().collect();
        let n = values.len();
        if n == 0 {
            return Err(DistributionError::EmptySupport);
        }
        let p = Rational::new(1, n as i128).expect("n > 0");
        Distribution::new(values.into_iter().map(|v| (v, p)))
    }

    pub fn atoms(&self) -> &[(T, Rational)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.atoms.iter().map(|(v, _)| v)
    }

    pub fn probability(&self, value: &T) -> Rational {
        self.atoms
            .iter()
            .find(|(v, _)| v == value)
            .map(|(_, p)| *p)
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_point_mass(&self) -> bool {
        self.atoms.len() == 1
    }

    /// The unique supported value, if this is a point mass.
    pub fn as_point(&self) -> Option<&T> {
        if self.is_point_mass() {
            Some(&self.atoms[0].0)
        } else {
            None
        }
    }

    /// Expectation of a rational-valued function over the support.
    pub fn expect_with(&self, f: impl Fn(&T) -> Rational) -> Rational {
        self.atoms.iter().map(|(v, p)| f(v) * *p).sum()
    }

    /// Pushforward along a mapping, merging collided values.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Distribution<U> {
        Distribution::new(self.atoms.iter().map(|(v, p)| (f(v), *p)))
            .expect("pushforward of a valid distribution is valid")
    }
}

impl<T: Ord + Clone> TryFrom<Vec<(T, Rational)>> for Distribution<T> {
    type Error = DistributionError;
    fn try_from(pairs: Vec<(T, Rational)>) -> Result<Self, Self::Error> {
        Distribution::new(pairs)
    }
}

impl<T: Ord + Clone> From<Distribution<T>> for Vec<(T, Rational)> {
    fn from(d: Distribution<T>) -> Self {
        d.atoms
    }
}

/// Total variation distance between two distributions: half the L1 distance
/// between their probability vectors.
pub fn total_variation<T: Ord + Clone>(a: &Distribution<T>, b: &Distribution<T>) -> Rational {
    let mut values: Vec<&T> = a.support().chain(b.support()).collect();
    values.sort();
    values.dedup();
    let sum: Rational = values
        .into_iter()
        .map(|v| (a.probability(v) - b.probability(v)).abs())
        .sum();
    sum / Rational::from_integer(2)
}
