//! Fairness checkers over finite weighted populations and finite-support
//! randomized classifiers.
//!
//! Group fairness is conditional independence of F1(g(X),Y) from the
//! sensitive attribute given F2(g(X),Y); statistical parity, equalized odds,
//! and sufficiency are presets of (F1,F2). Individual fairness bounds a
//! statistical distance between decision distributions by a candidate
//! metric. Everything is exact: verdicts come from rational equalities over
//! fully enumerated joint tables, so a failed check always carries a
//! concrete witness. Counterfactual fairness lives in [`scm`].

pub mod scm;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{self, Distribution, DistributionError};
use crate::equilibrium::Verdict;
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FairnessError {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("candidate id {0} appears twice")]
    DuplicateId(String),
    #[error("candidates {0} and {1} share a feature vector")]
    DuplicateFeatures(String, String),
    #[error("candidate {0} has non-positive weight")]
    NonPositiveWeight(String),
    #[error("population weights sum to {0}, not 1")]
    WeightSum(Rational),
    #[error("classifier has no decision distribution for candidate {0}")]
    MissingDecision(String),
    #[error("no table entry for decision {decision} and label {label:?}")]
    MissingTableEntry { decision: Rational, label: Value },
    #[error("no metric entry for decision distributions {0} and {1}")]
    MissingDecisionMetricEntry(String, String),
    #[error("no metric entry for candidates {0} and {1}")]
    MissingCandidateMetricEntry(String, String),
    #[error("decision metric is not zero on the identical pair {0}")]
    NonZeroDiagonal(String),
    #[error("metric value for ({0}, {1}) is negative")]
    NegativeMetric(String, String),
    #[error("candidate metric is asymmetric on ({0}, {1})")]
    AsymmetricMetric(String, String),
    #[error("candidate metric violates the triangle inequality via {0} -> {1} -> {2}")]
    TriangleViolation(String, String, String),
    #[error("candidates have feature vectors of different lengths")]
    MixedFeatureArity,
    #[error(transparent)]
    Dist(#[from] DistributionError),
}

/// A categorical or numeric value: labels, sensitive attributes, and the
/// outputs of the F1/F2 statistics all live in this one ordered type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Num(Rational),
    Cat(String),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Num(r) => write!(f, "{r}"),
            Value::Cat(s) => write!(f, "{s}"),
        }
    }
}

/// One member of the population: identified by id, described by a feature
/// vector (unique per candidate), carrying a sensitive attribute, a label,
/// and a positive sampling weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub features: Vec<Rational>,
    pub sensitive: Value,
    pub label: Value,
    pub weight: Rational,
}

/// A finite weighted population; weights sum to one exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    candidates: Vec<Candidate>,
}

impl Population {
    pub fn new(candidates: Vec<Candidate>) -> Result<Self, FairnessError> {
        if candidates.is_empty() {
            return Err(FairnessError::EmptyPopulation);
        }
        let mut ids = BTreeSet::new();
        let mut features: BTreeMap<&[Rational], &str> = BTreeMap::new();
        let mut total = Rational::zero();
        let arity = candidates[0].features.len();
        for c in &candidates {
            if !ids.insert(c.id.as_str()) {
                return Err(FairnessError::DuplicateId(c.id.clone()));
            }
            if c.features.len() != arity {
                return Err(FairnessError::MixedFeatureArity);
            }
            if let Some(other) = features.insert(&c.features, &c.id) {
                return Err(FairnessError::DuplicateFeatures(
                    other.to_string(),
                    c.id.clone(),
                ));
            }
            if c.weight <= Rational::zero() {
                return Err(FairnessError::NonPositiveWeight(c.id.clone()));
            }
            total += c.weight;
        }
        if total != Rational::one() {
            return Err(FairnessError::WeightSum(total));
        }
        Ok(Population { candidates })
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn candidate(&self, id: &str) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.id == id)
    }

    /// The distinct sensitive values present, ascending.
    pub fn groups(&self) -> BTreeSet<Value> {
        self.candidates.iter().map(|c| c.sensitive.clone()).collect()
    }
}

/// A randomized classifier: a finite-support distribution over offers per
/// candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    decisions: BTreeMap<String, Distribution<Rational>>,
}

impl Classifier {
    pub fn new(decisions: BTreeMap<String, Distribution<Rational>>) -> Self {
        Classifier { decisions }
    }

    /// The constant classifier assigning one decision distribution to every
    /// member of the population.
    pub fn constant(population: &Population, d: Distribution<Rational>) -> Self {
        Classifier {
            decisions: population
                .candidates()
                .iter()
                .map(|c| (c.id.clone(), d.clone()))
                .collect(),
        }
    }

    pub fn decision(&self, id: &str) -> Option<&Distribution<Rational>> {
        self.decisions.get(id)
    }

    pub fn decisions(&self) -> &BTreeMap<String, Distribution<Rational>> {
        &self.decisions
    }

    fn decision_or_err(&self, id: &str) -> Result<&Distribution<Rational>, FairnessError> {
        self.decisions
            .get(id)
            .ok_or_else(|| FairnessError::MissingDecision(id.to_string()))
    }
}

/// An evaluable statistic of (decision, label): the named presets cover the
/// classical definitions, the table form covers everything else on a finite
/// domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FairnessFn {
    /// F(d, y) = d.
    Decision,
    /// F(d, y) = y.
    Label,
    /// F(d, y) = c.
    Constant(Value),
    /// Explicit finite table over (decision, label).
    Table(BTreeMap<(Rational, Value), Value>),
}

impl FairnessFn {
    pub fn eval(&self, d: Rational, y: &Value) -> Result<Value, FairnessError> {
        match self {
            FairnessFn::Decision => Ok(Value::Num(d)),
            FairnessFn::Label => Ok(y.clone()),
            FairnessFn::Constant(c) => Ok(c.clone()),
            FairnessFn::Table(t) => t
                .get(&(d, y.clone()))
                .cloned()
                .ok_or(FairnessError::MissingTableEntry { decision: d, label: y.clone() }),
        }
    }
}

/// The (F1, F2) pair parameterizing group fairness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFairnessSpec {
    pub f1: FairnessFn,
    pub f2: FairnessFn,
}

impl GroupFairnessSpec {
    /// F1 = decision, F2 constant: per-group decision distributions must
    /// coincide.
    pub fn statistical_parity() -> Self {
        GroupFairnessSpec {
            f1: FairnessFn::Decision,
            f2: FairnessFn::Constant(Value::Cat("const".into())),
        }
    }

    /// F1 = decision, F2 = label: decisions independent of the group within
    /// every label class.
    pub fn equalized_odds() -> Self {
        GroupFairnessSpec { f1: FairnessFn::Decision, f2: FairnessFn::Label }
    }

    /// F1 = label, F2 = decision: the label independent of the group given
    /// the decision (fair calibration).
    pub fn sufficiency() -> Self {
        GroupFairnessSpec { f1: FairnessFn::Label, f2: FairnessFn::Decision }
    }
}

/// Exact pushforward of (candidate weight x decision probability) through
/// (F1, F2, A).
pub fn joint_distribution(
    population: &Population,
    classifier: &Classifier,
    spec: &GroupFairnessSpec,
) -> Result<Distribution<(Value, Value, Value)>, FairnessError> {
    let mut atoms: BTreeMap<(Value, Value, Value), Rational> = BTreeMap::new();
    for c in population.candidates() {
        let d = classifier.decision_or_err(&c.id)?;
        for (dec, p) in d.atoms() {
            let u = spec.f1.eval(*dec, &c.label)?;
            let v = spec.f2.eval(*dec, &c.label)?;
            *atoms
                .entry((u, v, c.sensitive.clone()))
                .or_insert(Rational::zero()) += c.weight * *p;
        }
    }
    Ok(Distribution::new(atoms)?)
}

/// The witness of a group-fairness failure: conditioning cell and the
/// F1-value whose conditional probability departs from the marginal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFairnessViolation {
    pub sensitive: Value,
    pub f2: Value,
    pub f1: Value,
    /// P(F1 = f1 | A = sensitive, F2 = f2).
    pub conditional: Rational,
    /// P(F1 = f1 | F2 = f2).
    pub marginal: Rational,
}

/// Conditional-independence check: for every group a and every F2-value v
/// with positive joint mass, the conditional law of F1 equals the marginal
/// law given v alone. The first violation in (a, v, u) order is returned.
pub fn check_group_fairness(
    population: &Population,
    classifier: &Classifier,
    spec: &GroupFairnessSpec,
) -> Result<Verdict<(), GroupFairnessViolation>, FairnessError> {
    let joint = joint_distribution(population, classifier, spec)?;

    let mut mass_av: BTreeMap<(Value, Value), Rational> = BTreeMap::new();
    let mut mass_v: BTreeMap<Value, Rational> = BTreeMap::new();
    let mut mass_uva: BTreeMap<(Value, Value, Value), Rational> = BTreeMap::new();
    let mut mass_uv: BTreeMap<(Value, Value), Rational> = BTreeMap::new();
    let mut f1_values: BTreeSet<Value> = BTreeSet::new();
    for ((u, v, a), p) in joint.atoms().iter().map(|(t, p)| (t.clone(), *p)) {
        *mass_av.entry((a.clone(), v.clone())).or_insert(Rational::zero()) += p;
        *mass_v.entry(v.clone()).or_insert(Rational::zero()) += p;
        *mass_uva.entry((u.clone(), v.clone(), a)).or_insert(Rational::zero()) += p;
        *mass_uv.entry((u.clone(), v)).or_insert(Rational::zero()) += p;
        f1_values.insert(u);
    }

    for ((a, v), pav) in &mass_av {
        let pv = mass_v[v];
        for u in &f1_values {
            let conditional = mass_uva
                .get(&(u.clone(), v.clone(), a.clone()))
                .copied()
                .unwrap_or(Rational::zero())
                .checked_div(pav)
                .expect("conditioning mass is positive");
            let marginal = mass_uv
                .get(&(u.clone(), v.clone()))
                .copied()
                .unwrap_or(Rational::zero())
                .checked_div(&pv)
                .expect("conditioning mass is positive");
            if conditional != marginal {
                return Ok(Verdict::Fails(GroupFairnessViolation {
                    sensitive: a.clone(),
                    f2: v.clone(),
                    f1: u.clone(),
                    conditional,
                    marginal,
                }));
            }
        }
    }
    Ok(Verdict::Holds(()))
}

pub fn check_statistical_parity(
    population: &Population,
    classifier: &Classifier,
) -> Result<Verdict<(), GroupFairnessViolation>, FairnessError> {
    check_group_fairness(population, classifier, &GroupFairnessSpec::statistical_parity())
}

pub fn check_equalized_odds(
    population: &Population,
    classifier: &Classifier,
) -> Result<Verdict<(), GroupFairnessViolation>, FairnessError> {
    check_group_fairness(population, classifier, &GroupFairnessSpec::equalized_odds())
}

pub fn check_sufficiency(
    population: &Population,
    classifier: &Classifier,
) -> Result<Verdict<(), GroupFairnessViolation>, FairnessError> {
    check_group_fairness(population, classifier, &GroupFairnessSpec::sufficiency())
}

/// Statistical distance between decision distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionMetric {
    TotalVariation,
    /// Explicit table keyed by ordered pairs of decision distributions.
    Table(BTreeMap<(Distribution<Rational>, Distribution<Rational>), Rational>),
}

impl DecisionMetric {
    fn eval(
        &self,
        p: &Distribution<Rational>,
        q: &Distribution<Rational>,
    ) -> Result<Rational, FairnessError> {
        match self {
            DecisionMetric::TotalVariation => Ok(dist::total_variation(p, q)),
            DecisionMetric::Table(t) => t
                .get(&(p.clone(), q.clone()))
                .copied()
                .ok_or_else(|| {
                    FairnessError::MissingDecisionMetricEntry(
                        format!("{:?}", p.atoms()),
                        format!("{:?}", q.atoms()),
                    )
                }),
        }
    }

    fn validate(&self) -> Result<(), FairnessError> {
        if let DecisionMetric::Table(t) = self {
            for ((p, q), v) in t {
                if *v < Rational::zero() {
                    return Err(FairnessError::NegativeMetric(
                        format!("{:?}", p.atoms()),
                        format!("{:?}", q.atoms()),
                    ));
                }
                if p == q && !v.is_zero() {
                    return Err(FairnessError::NonZeroDiagonal(format!("{:?}", p.atoms())));
                }
            }
        }
        Ok(())
    }
}

/// The similarity metric between candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateMetric {
    /// scale * mean absolute difference of feature coordinates.
    ScaledL1 { scale: Rational },
    /// Explicit table keyed by candidate id pairs; must be symmetric,
    /// nonnegative, and satisfy the triangle inequality.
    Table(BTreeMap<(String, String), Rational>),
}

impl CandidateMetric {
    fn eval(&self, x: &Candidate, y: &Candidate) -> Result<Rational, FairnessError> {
        match self {
            CandidateMetric::ScaledL1 { scale } => {
                if x.features.len() != y.features.len() {
                    return Err(FairnessError::MixedFeatureArity);
                }
                let mut sum = Rational::zero();
                for (a, b) in x.features.iter().zip(&y.features) {
                    sum += (*a - *b).abs();
                }
                let dim = Rational::from_integer(x.features.len() as i128);
                Ok(*scale * sum.checked_div(&dim).unwrap_or(Rational::zero()))
            }
            CandidateMetric::Table(t) => t
                .get(&(x.id.clone(), y.id.clone()))
                .copied()
                .ok_or_else(|| {
                    FairnessError::MissingCandidateMetricEntry(x.id.clone(), y.id.clone())
                }),
        }
    }

    fn validate(&self) -> Result<(), FairnessError> {
        if let CandidateMetric::Table(t) = self {
            for ((x, y), v) in t {
                if *v < Rational::zero() {
                    return Err(FairnessError::NegativeMetric(x.clone(), y.clone()));
                }
                match t.get(&(y.clone(), x.clone())) {
                    Some(w) if w == v => {}
                    _ => return Err(FairnessError::AsymmetricMetric(x.clone(), y.clone())),
                }
            }
            // Triangle inequality over every keyed triple.
            let ids: BTreeSet<&String> = t.keys().flat_map(|(a, b)| [a, b]).collect();
            for x in &ids {
                for y in &ids {
                    for z in &ids {
                        let (Some(xy), Some(xz), Some(zy)) = (
                            t.get(&((*x).clone(), (*y).clone())),
                            t.get(&((*x).clone(), (*z).clone())),
                            t.get(&((*z).clone(), (*y).clone())),
                        ) else {
                            continue;
                        };
                        if *xy > *xz + *zy {
                            return Err(FairnessError::TriangleViolation(
                                (*x).clone(),
                                (*z).clone(),
                                (*y).clone(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The (M, m) pair of individual fairness: a statistical distance on
/// decision distributions and a metric on candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricPair {
    pub decisions: DecisionMetric,
    pub candidates: CandidateMetric,
}

impl MetricPair {
    pub fn new(
        decisions: DecisionMetric,
        candidates: CandidateMetric,
    ) -> Result<Self, FairnessError> {
        decisions.validate()?;
        candidates.validate()?;
        Ok(MetricPair { decisions, candidates })
    }

    /// Total variation against unit-scaled mean L1 feature distance.
    pub fn default_pair() -> Self {
        MetricPair {
            decisions: DecisionMetric::TotalVariation,
            candidates: CandidateMetric::ScaledL1 { scale: Rational::one() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndividualViolation {
    pub x: String,
    pub y: String,
    pub decision_distance: Rational,
    pub candidate_distance: Rational,
}

/// Lipschitz check M(g(x), g(y)) <= m(x, y) over every ordered pair of
/// distinct candidates, scanned in id order; the first violating pair is the
/// witness.
pub fn check_individual_fairness(
    population: &Population,
    classifier: &Classifier,
    pair: &MetricPair,
) -> Result<Verdict<(), IndividualViolation>, FairnessError> {
    let mut ordered: Vec<&Candidate> = population.candidates().iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    for x in &ordered {
        for y in &ordered {
            if x.id == y.id {
                continue;
            }
            let gx = classifier.decision_or_err(&x.id)?;
            let gy = classifier.decision_or_err(&y.id)?;
            let big_m = pair.decisions.eval(gx, gy)?;
            let small_m = pair.candidates.eval(x, y)?;
            if big_m > small_m {
                return Ok(Verdict::Fails(IndividualViolation {
                    x: x.id.clone(),
                    y: y.id.clone(),
                    decision_distance: big_m,
                    candidate_distance: small_m,
                }));
            }
        }
    }
    Ok(Verdict::Holds(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn person(id: &str, feat: i128, group: &str, label: i128, w: Rational) -> Candidate {
        Candidate {
            id: id.into(),
            features: vec![rat(feat, 1)],
            sensitive: Value::Cat(group.into()),
            label: Value::Num(rat(label, 1)),
            weight: w,
        }
    }

    fn two_groups() -> Population {
        Population::new(vec![
            person("a1", 0, "a", 1, rat(1, 2)),
            person("b1", 1, "b", 1, rat(1, 2)),
        ])
        .unwrap()
    }

    #[test]
    fn joint_distribution_pushforward() {
        let pop = two_groups();
        let g = Classifier::new(
            [
                ("a1".to_string(), Distribution::point(rat(0, 1))),
                ("b1".to_string(), Distribution::point(rat(3, 2))),
            ]
            .into_iter()
            .collect(),
        );
        let joint =
            joint_distribution(&pop, &g, &GroupFairnessSpec::statistical_parity()).unwrap();
        assert_eq!(joint.atoms().len(), 2);
        assert_eq!(
            joint.probability(&(
                Value::Num(rat(0, 1)),
                Value::Cat("const".into()),
                Value::Cat("a".into())
            )),
            rat(1, 2)
        );
    }

    #[test]
    fn parity_fails_on_group_dependent_decisions() {
        let pop = two_groups();
        let g = Classifier::new(
            [
                ("a1".to_string(), Distribution::point(rat(3, 2))),
                ("b1".to_string(), Distribution::point(rat(0, 1))),
            ]
            .into_iter()
            .collect(),
        );
        match check_statistical_parity(&pop, &g).unwrap() {
            Verdict::Fails(v) => {
                assert_eq!(v.sensitive, Value::Cat("a".into()));
                assert_ne!(v.conditional, v.marginal);
            }
            Verdict::Holds(()) => panic!("group-dependent decisions must fail parity"),
        }
    }

    #[test]
    fn constant_classifier_passes_parity_and_odds() {
        let pop = two_groups();
        let g = Classifier::constant(&pop, Distribution::point(rat(0, 1)));
        assert!(check_statistical_parity(&pop, &g).unwrap().holds());
        assert!(check_equalized_odds(&pop, &g).unwrap().holds());
        assert!(check_sufficiency(&pop, &g).unwrap().holds());
    }

    #[test]
    fn sufficiency_distinguishes_label_leakage() {
        // Same decision for both, but labels differ across groups at
        // different rates given the decision.
        let pop = Population::new(vec![
            person("a1", 0, "a", 0, rat(1, 4)),
            person("a2", 1, "a", 1, rat(1, 4)),
            person("b1", 2, "b", 1, rat(1, 2)),
        ])
        .unwrap();
        let g = Classifier::constant(&pop, Distribution::point(rat(0, 1)));
        assert!(!check_sufficiency(&pop, &g).unwrap().holds());
        // Distinct decisions per label restore sufficiency.
        let fixed = Classifier::new(
            [
                ("a1".to_string(), Distribution::point(rat(0, 1))),
                ("a2".to_string(), Distribution::point(rat(3, 2))),
                ("b1".to_string(), Distribution::point(rat(3, 2))),
            ]
            .into_iter()
            .collect(),
        );
        assert!(check_sufficiency(&pop, &fixed).unwrap().holds());
    }

    #[test]
    fn randomized_classifier_quarter_masses() {
        let pop = two_groups();
        let uniform = Distribution::new(vec![
            (rat(0, 1), rat(1, 2)),
            (rat(3, 2), rat(1, 2)),
        ])
        .unwrap();
        let g = Classifier::constant(&pop, uniform);
        let joint =
            joint_distribution(&pop, &g, &GroupFairnessSpec::statistical_parity()).unwrap();
        assert_eq!(joint.atoms().len(), 4);
        assert!(joint.atoms().iter().all(|(_, p)| *p == rat(1, 4)));
        assert!(check_statistical_parity(&pop, &g).unwrap().holds());
    }

    #[test]
    fn individual_fairness_tv_against_scaled_l1() {
        let pop = two_groups();
        let distinct = Classifier::new(
            [
                ("a1".to_string(), Distribution::point(rat(0, 1))),
                ("b1".to_string(), Distribution::point(rat(3, 2))),
            ]
            .into_iter()
            .collect(),
        );
        // m == 0 makes any difference a violation.
        let zero = MetricPair::new(
            DecisionMetric::TotalVariation,
            CandidateMetric::ScaledL1 { scale: rat(0, 1) },
        )
        .unwrap();
        match check_individual_fairness(&pop, &distinct, &zero).unwrap() {
            Verdict::Fails(v) => {
                assert_eq!((v.x.as_str(), v.y.as_str()), ("a1", "b1"));
                assert_eq!(v.decision_distance, rat(1, 1));
            }
            Verdict::Holds(()) => panic!("TV 1 > 0 must fail"),
        }
        // m(x,y) = 1 via scale 1 and unit feature distance: TV = 1 passes.
        assert!(check_individual_fairness(&pop, &distinct, &MetricPair::default_pair())
            .unwrap()
            .holds());
        // Constant classifiers are always individually fair.
        let constant = Classifier::constant(&pop, Distribution::point(rat(0, 1)));
        assert!(check_individual_fairness(&pop, &constant, &zero).unwrap().holds());
    }

    #[test]
    fn metric_tables_validated() {
        let bad = CandidateMetric::Table(
            [(("a".to_string(), "b".to_string()), rat(1, 1))].into_iter().collect(),
        );
        assert!(matches!(
            MetricPair::new(DecisionMetric::TotalVariation, bad),
            Err(FairnessError::AsymmetricMetric(_, _))
        ));
        let skewed = CandidateMetric::Table(
            [
                (("a".to_string(), "b".to_string()), rat(5, 1)),
                (("b".to_string(), "a".to_string()), rat(5, 1)),
                (("a".to_string(), "c".to_string()), rat(1, 1)),
                (("c".to_string(), "a".to_string()), rat(1, 1)),
                (("c".to_string(), "b".to_string()), rat(1, 1)),
                (("b".to_string(), "c".to_string()), rat(1, 1)),
            ]
            .into_iter()
            .collect(),
        );
        assert!(matches!(
            MetricPair::new(DecisionMetric::TotalVariation, skewed),
            Err(FairnessError::TriangleViolation(_, _, _))
        ));
    }

    #[test]
    fn population_invariants() {
        assert!(matches!(
            Population::new(vec![]),
            Err(FairnessError::EmptyPopulation)
        ));
        let dup = Population::new(vec![
            person("a", 0, "a", 0, rat(1, 2)),
            person("a", 1, "a", 0, rat(1, 2)),
        ]);
        assert!(matches!(dup, Err(FairnessError::DuplicateId(_))));
        let clash = Population::new(vec![
            person("a", 0, "a", 0, rat(1, 2)),
            person("b", 0, "a", 0, rat(1, 2)),
        ]);
        assert!(matches!(clash, Err(FairnessError::DuplicateFeatures(_, _))));
        let sum = Population::new(vec![person("a", 0, "a", 0, rat(1, 3))]);
        assert!(matches!(sum, Err(FairnessError::WeightSum(_))));
    }
}
