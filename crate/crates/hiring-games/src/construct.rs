//! Constructive existence proofs: classifiers that pass a given fairness
//! check yet play a blatantly unfair strategy for a designated candidate.
//!
//! Each constructor takes an [`UnfairSeed`] naming the anchor candidate
//! and the decision distribution that a blatantly unfair equilibrium plays
//! for them ([`validate_seed`] checks that invariant against the
//! detector). The constructors then extend that single assignment to a
//! whole classifier that the respective checker cannot distinguish from a
//! fair one:
//!
//! - [`construct_group_fair_blatant`] covers checks of the form "the value
//!   F1(decision, label) is identically distributed across candidates". It
//!   pushes the seed distribution through F1 at the anchor's label and
//!   routes every other candidate through a right inverse of F1 at their
//!   own label, so all candidates induce the same F1 distribution.
//! - [`construct_sufficiency_blatant`] covers conditional-independence
//!   checks parameterized by a conditioning function F2. It assigns one
//!   decision per label class, chosen so the induced label-to-F2-value map
//!   is injective; distinct label classes then live in distinct F2 cells
//!   and no cross-group comparison ever happens inside a cell.
//! - [`construct_constant`] covers individual and counterfactual fairness:
//!   a constant classifier treats likes alike vacuously.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::blatant::{detect_blatant_unfairness, BlatantError, EquilibriumSet};
use crate::dist::{Distribution, DistributionError};
use crate::fairness::{Classifier, FairnessError, Population, Value};
use crate::market::{HiringMarket, MarketError};
use crate::rational::Rational;

/// A fairness function presented as an explicit finite table over
/// (decision, label) pairs, the form the constructors invert.
pub type FairnessTable = BTreeMap<(Rational, Value), Value>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Fairness(#[from] FairnessError),
    #[error(transparent)]
    Blatant(#[from] BlatantError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Dist(#[from] DistributionError),
    #[error("fairness table has no entry for decision {decision} with label {label}")]
    MissingTableEntry { decision: Rational, label: Value },
    #[error("value {value} is not attainable from label {label}, so the table has no right inverse there")]
    NotAttainable { label: Value, value: Value },
    #[error("{labels} label classes cannot be told apart by {image} distinct table values")]
    CardinalityHypothesis { labels: usize, image: usize },
    #[error("this construction needs a pure seed decision, got a mixed one")]
    MixedSeed,
    #[error("no candidate named {0} in the population")]
    UnknownCandidate(String),
    #[error("seed is not grounded in a blatantly unfair equilibrium: {0}")]
    SeedNotBlatant(String),
}

/// The anchor of every construction: the candidate singled out and the
/// decision distribution a blatantly unfair equilibrium plays for them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfairSeed {
    /// The unfair decision (wage offer) distribution for the anchor.
    pub strategy: Distribution<Rational>,
    /// Id of the anchored candidate.
    pub anchor: String,
}

/// Checks the seed invariant against the detector: every decision in the
/// seed's support must be the anchor's offer in some equilibrium of `set`
/// flagged as blatantly unfair to the anchor.
pub fn validate_seed(
    market: &HiringMarket,
    set: &EquilibriumSet,
    seed: &UnfairSeed,
) -> Result<(), ConstructError> {
    let player = market.candidate_player(&seed.anchor)?;
    let findings = detect_blatant_unfairness(set)?;
    for z in seed.strategy.support() {
        let grounded = findings.iter().any(|f| {
            if f.player != player {
                return false;
            }
            let eq = &set.members()[f.member];
            let offers = market.offers_of(&eq.strategies[&market.firm()]);
            offers.map(|o| o[&seed.anchor] == *z).unwrap_or(false)
        });
        if !grounded {
            return Err(ConstructError::SeedNotBlatant(format!(
                "no flagged equilibrium offers {z} to {}",
                seed.anchor
            )));
        }
    }
    Ok(())
}

fn table_value(
    table: &FairnessTable,
    d: Rational,
    y: &Value,
) -> Result<Value, ConstructError> {
    table
        .get(&(d, y.clone()))
        .cloned()
        .ok_or(ConstructError::MissingTableEntry { decision: d, label: y.clone() })
}

fn sorted_decisions(decisions: &[Rational]) -> Vec<Rational> {
    let mut d: Vec<Rational> = decisions.to_vec();
    d.sort();
    d.dedup();
    d
}

fn population_labels(population: &Population) -> Vec<Value> {
    let labels: BTreeSet<Value> =
        population.candidates().iter().map(|c| c.label.clone()).collect();
    labels.into_iter().collect()
}

/// The full image of the table over `decisions` and `labels`, checking
/// totality along the way.
fn table_image(
    table: &FairnessTable,
    decisions: &[Rational],
    labels: &[Value],
) -> Result<BTreeSet<Value>, ConstructError> {
    let mut image = BTreeSet::new();
    for y in labels {
        for d in decisions {
            image.insert(table_value(table, *d, y)?);
        }
    }
    Ok(image)
}

/// For each value the table attains at `label`, the smallest decision
/// attaining it: a right inverse of the table's section at that label,
/// with a deterministic tie-break.
pub fn right_inverse_table(
    table: &FairnessTable,
    decisions: &[Rational],
    label: &Value,
) -> Result<BTreeMap<Value, Rational>, ConstructError> {
    let mut inverse = BTreeMap::new();
    for d in sorted_decisions(decisions) {
        let z = table_value(table, d, label)?;
        inverse.entry(z).or_insert(d);
    }
    Ok(inverse)
}

/// Builds a classifier that plays the seed distribution for the anchor and
/// still makes F1(decision, label) identically distributed across all
/// candidates: every other candidate's decision is the seed pushed through
/// F1 at the anchor's label and pulled back through a right inverse of F1
/// at their own label.
///
/// Requires every value in the table's image to be attainable from every
/// label present in the population ([`ConstructError::NotAttainable`]
/// names the first offending pair otherwise).
pub fn construct_group_fair_blatant(
    f1: &FairnessTable,
    decisions: &[Rational],
    population: &Population,
    seed: &UnfairSeed,
) -> Result<Classifier, ConstructError> {
    let anchor = population
        .candidate(&seed.anchor)
        .ok_or_else(|| ConstructError::UnknownCandidate(seed.anchor.clone()))?;
    let decisions = sorted_decisions(decisions);
    let labels = population_labels(population);
    let image = table_image(f1, &decisions, &labels)?;

    let mut inverses: BTreeMap<Value, BTreeMap<Value, Rational>> = BTreeMap::new();
    for y in &labels {
        let inv = right_inverse_table(f1, &decisions, y)?;
        for z in &image {
            if !inv.contains_key(z) {
                return Err(ConstructError::NotAttainable {
                    label: y.clone(),
                    value: z.clone(),
                });
            }
        }
        inverses.insert(y.clone(), inv);
    }

    let mut assignments = BTreeMap::new();
    for c in population.candidates() {
        if c.id == seed.anchor {
            assignments.insert(c.id.clone(), seed.strategy.clone());
            continue;
        }
        let inv = &inverses[&c.label];
        let atoms = seed
            .strategy
            .atoms()
            .iter()
            .map(|(d, p)| Ok((inv[&table_value(f1, *d, &anchor.label)?], *p)))
            .collect::<Result<Vec<_>, ConstructError>>()?;
        assignments.insert(c.id.clone(), Distribution::new(atoms)?);
    }
    Ok(Classifier::new(assignments))
}

/// Builds a classifier, constant on label classes, that plays the (pure)
/// seed decision for the anchor's whole label class while conditioning
/// checks keyed on F2 cannot see any group difference: each label class is
/// routed into its own F2 value, chosen injectively.
///
/// The injection anchors the seed first: the anchor's label is assigned
/// the F2 value of the seed decision itself, and the remaining labels map
/// onto the remaining image values in ascending order, each realized by
/// the smallest decision attaining it. Anchoring first is what keeps
/// the induced label-to-value map injective in every case; repairing a
/// collision afterwards by swapping two classes' decisions can itself
/// collide with a third class.
///
/// Requires a pure seed, every image value attainable from every label,
/// and at least as many distinct table values as label classes.
pub fn construct_sufficiency_blatant(
    f2: &FairnessTable,
    decisions: &[Rational],
    population: &Population,
    seed: &UnfairSeed,
) -> Result<Classifier, ConstructError> {
    let d0 = *seed.strategy.as_point().ok_or(ConstructError::MixedSeed)?;
    let anchor = population
        .candidate(&seed.anchor)
        .ok_or_else(|| ConstructError::UnknownCandidate(seed.anchor.clone()))?;
    let y0 = anchor.label.clone();
    let decisions = sorted_decisions(decisions);
    let labels = population_labels(population);
    let image = table_image(f2, &decisions, &labels)?;

    if labels.len() > image.len() {
        return Err(ConstructError::CardinalityHypothesis {
            labels: labels.len(),
            image: image.len(),
        });
    }

    let mut inverses: BTreeMap<Value, BTreeMap<Value, Rational>> = BTreeMap::new();
    for y in &labels {
        let inv = right_inverse_table(f2, &decisions, y)?;
        for z in &image {
            if !inv.contains_key(z) {
                return Err(ConstructError::NotAttainable {
                    label: y.clone(),
                    value: z.clone(),
                });
            }
        }
        inverses.insert(y.clone(), inv);
    }

    let seed_value = table_value(f2, d0, &y0)?;
    let mut assigned: BTreeMap<Value, Value> = BTreeMap::new();
    assigned.insert(y0.clone(), seed_value.clone());
    let mut remaining = image.iter().filter(|z| **z != seed_value);
    for y in labels.iter().filter(|y| **y != y0) {
        let z = remaining.next().expect("cardinality was checked");
        assigned.insert(y.clone(), z.clone());
    }

    let mut by_label: BTreeMap<Value, Rational> = BTreeMap::new();
    by_label.insert(y0.clone(), d0);
    for y in labels.iter().filter(|y| **y != y0) {
        by_label.insert(y.clone(), inverses[y][&assigned[y]]);
    }

    // the whole point: distinct label classes sit in distinct F2 cells.
    debug_assert_eq!(
        by_label
            .iter()
            .map(|(y, d)| table_value(f2, *d, y).unwrap())
            .collect::<BTreeSet<_>>()
            .len(),
        labels.len()
    );

    let assignments = population
        .candidates()
        .iter()
        .map(|c| (c.id.clone(), Distribution::point(by_label[&c.label])))
        .collect();
    Ok(Classifier::new(assignments))
}

/// The constant classifier playing the seed distribution for everyone:
/// passes individual fairness for every metric pair and counterfactual
/// fairness for every model in which the sensitive attribute does not
/// feed the decision.
pub fn construct_constant(population: &Population, strategy: &Distribution<Rational>) -> Classifier {
    Classifier::constant(population, strategy.clone())
}
