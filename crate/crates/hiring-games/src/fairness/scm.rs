//! Discrete structural causal models with exact counterfactual queries.
//!
//! A model is a DAG of named nodes: exogenous nodes carry finite-support
//! noise distributions, endogenous nodes carry deterministic tables over
//! their parents' values. One node is designated as the sensitive attribute
//! and, optionally, one as the decision; the decision node alone may be
//! randomized (it must then have no children). Counterfactual output is
//! computed by exact abduction over the finite noise space: condition on the
//! observed evidence, intervene on the sensitive node, and push the
//! surviving noise forward through the mechanisms.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dist::{Distribution, DistributionError};
use crate::equilibrium::Verdict;
use crate::fairness::{Population, Value};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScmError {
    #[error("node {0} is not defined")]
    MissingNode(String),
    #[error("nodes {0:?} form a dependency cycle")]
    Cycle(Vec<String>),
    #[error("randomized node {0} must be the decision node and have no children")]
    RandomizedInternal(String),
    #[error("node {node} has no table entry for parent values {key:?}")]
    MissingTableEntry { node: String, key: Vec<Value> },
    #[error("evidence has probability zero under the model")]
    ZeroProbabilityEvent,
    #[error("model has no decision node")]
    NoDecision,
    #[error("evidence must not constrain {0}; it is set by the query")]
    EvidenceOnSensitive(String),
    #[error("cannot condition on randomized node {0}")]
    EvidenceOnRandomized(String),
    #[error("expected {expected} feature values, got {got}")]
    FeatureArity { expected: usize, got: usize },
    #[error(transparent)]
    Dist(#[from] DistributionError),
}

/// How one node's value is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    /// Independent noise with finite support.
    Exogenous(Distribution<Value>),
    /// Deterministic function of the parents, given as a finite table.
    Deterministic {
        parents: Vec<String>,
        table: BTreeMap<Vec<Value>, Value>,
    },
    /// Randomized function of the parents. Only the decision node may use
    /// this, and only when nothing depends on it.
    Randomized {
        parents: Vec<String>,
        table: BTreeMap<Vec<Value>, Distribution<Value>>,
    },
}

impl Mechanism {
    fn parents(&self) -> &[String] {
        match self {
            Mechanism::Exogenous(_) => &[],
            Mechanism::Deterministic { parents, .. } => parents,
            Mechanism::Randomized { parents, .. } => parents,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StructuralCausalModel {
    nodes: BTreeMap<String, Mechanism>,
    order: Vec<String>,
    sensitive: String,
    decision: Option<String>,
    feature_nodes: Vec<String>,
}

impl StructuralCausalModel {
    /// Validates the graph: all parents defined, acyclic, randomized
    /// mechanisms confined to a childless decision node, and the designated
    /// sensitive / decision / feature nodes present.
    pub fn new(
        nodes: BTreeMap<String, Mechanism>,
        sensitive: impl Into<String>,
        decision: Option<String>,
        feature_nodes: Vec<String>,
    ) -> Result<Self, ScmError> {
        let sensitive = sensitive.into();
        let mut children: BTreeMap<&str, usize> = BTreeMap::new();
        for (name, mech) in &nodes {
            for p in mech.parents() {
                if !nodes.contains_key(p) {
                    return Err(ScmError::MissingNode(p.clone()));
                }
                *children.entry(p.as_str()).or_insert(0) += 1;
            }
            let _ = name;
        }
        for name in std::iter::once(&sensitive)
            .chain(decision.iter())
            .chain(feature_nodes.iter())
        {
            if !nodes.contains_key(name) {
                return Err(ScmError::MissingNode(name.clone()));
            }
        }
        for (name, mech) in &nodes {
            if matches!(mech, Mechanism::Randomized { .. }) {
                let is_decision = decision.as_deref() == Some(name.as_str());
                let childless = children.get(name.as_str()).copied().unwrap_or(0) == 0;
                if !is_decision || !childless {
                    return Err(ScmError::RandomizedInternal(name.clone()));
                }
            }
        }

        // Kahn's algorithm with lexicographic tie-breaking for determinism.
        let mut missing: BTreeMap<&str, usize> = nodes
            .iter()
            .map(|(n, m)| (n.as_str(), m.parents().len()))
            .collect();
        let mut ready: BTreeSet<&str> = missing
            .iter()
            .filter(|(_, k)| **k == 0)
            .map(|(n, _)| *n)
            .collect();
        let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (name, mech) in &nodes {
            for p in mech.parents() {
                dependents.entry(p.as_str()).or_default().push(name.as_str());
            }
        }
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(&next) = ready.iter().next() {
            ready.remove(next);
            order.push(next.to_string());
            for d in dependents.get(next).into_iter().flatten() {
                let k = missing.get_mut(d).expect("dependent is a node");
                *k -= 1;
                if *k == 0 {
                    ready.insert(d);
                }
            }
        }
        if order.len() != nodes.len() {
            let stuck: Vec<String> = nodes
                .keys()
                .filter(|n| !order.contains(*n))
                .cloned()
                .collect();
            return Err(ScmError::Cycle(stuck));
        }

        Ok(StructuralCausalModel { nodes, order, sensitive, decision, feature_nodes })
    }

    pub fn sensitive_node(&self) -> &str {
        &self.sensitive
    }

    pub fn decision_node(&self) -> Option<&str> {
        self.decision.as_deref()
    }

    pub fn feature_nodes(&self) -> &[String] {
        &self.feature_nodes
    }

    pub fn node(&self, name: &str) -> Option<&Mechanism> {
        self.nodes.get(name)
    }

    /// The values a node's mechanism can produce: noise support for
    /// exogenous nodes, table range otherwise.
    pub fn node_domain(&self, name: &str) -> Result<BTreeSet<Value>, ScmError> {
        match self.nodes.get(name) {
            None => Err(ScmError::MissingNode(name.to_string())),
            Some(Mechanism::Exogenous(d)) => Ok(d.support().cloned().collect()),
            Some(Mechanism::Deterministic { table, .. }) => {
                Ok(table.values().cloned().collect())
            }
            Some(Mechanism::Randomized { table, .. }) => {
                Ok(table.values().flat_map(|d| d.support().cloned()).collect())
            }
        }
    }

    /// Every joint assignment of the exogenous nodes with its probability.
    fn noise_assignments(&self) -> Vec<(BTreeMap<String, Value>, Rational)> {
        let mut out = vec![(BTreeMap::new(), Rational::one())];
        for (name, mech) in &self.nodes {
            if let Mechanism::Exogenous(d) = mech {
                let mut next = Vec::with_capacity(out.len() * d.atoms().len());
                for (assignment, w) in &out {
                    for (v, p) in d.atoms() {
                        let mut assignment = assignment.clone();
                        assignment.insert(name.clone(), v.clone());
                        next.push((assignment, *w * *p));
                    }
                }
                out = next;
            }
        }
        out
    }

    /// Evaluates all node values in topological order given fixed noise and
    /// interventions. Returns the deterministic values plus, separately, the
    /// decision node's distribution when it is randomized (and not
    /// intervened on).
    fn evaluate(
        &self,
        noise: &BTreeMap<String, Value>,
        interventions: &BTreeMap<String, Value>,
    ) -> Result<(BTreeMap<String, Value>, Option<Distribution<Value>>), ScmError> {
        let mut values: BTreeMap<String, Value> = BTreeMap::new();
        let mut decision_dist = None;
        for name in &self.order {
            if let Some(v) = interventions.get(name) {
                values.insert(name.clone(), v.clone());
                continue;
            }
            match &self.nodes[name] {
                Mechanism::Exogenous(_) => {
                    values.insert(name.clone(), noise[name].clone());
                }
                Mechanism::Deterministic { parents, table } => {
                    let key: Vec<Value> =
                        parents.iter().map(|p| values[p].clone()).collect();
                    let v = table.get(&key).ok_or_else(|| ScmError::MissingTableEntry {
                        node: name.clone(),
                        key: key.clone(),
                    })?;
                    values.insert(name.clone(), v.clone());
                }
                Mechanism::Randomized { parents, table } => {
                    let key: Vec<Value> =
                        parents.iter().map(|p| values[p].clone()).collect();
                    let d = table.get(&key).ok_or_else(|| ScmError::MissingTableEntry {
                        node: name.clone(),
                        key: key.clone(),
                    })?;
                    decision_dist = Some(d.clone());
                }
            }
        }
        Ok((values, decision_dist))
    }
}

/// The exact counterfactual decision distribution: abduct the noise
/// consistent with the evidence and the observed sensitive value, intervene
/// on the sensitive node, and mix the resulting decision distributions.
///
/// `evidence` maps observed node names to values; it must not mention the
/// sensitive node (passed as `actual`) or any randomized node. Errors when
/// the conditioning event has probability zero.
pub fn counterfactual_output(
    scm: &StructuralCausalModel,
    evidence: &BTreeMap<String, Value>,
    actual: &Value,
    counterfactual: &Value,
) -> Result<Distribution<Value>, ScmError> {
    let decision = scm.decision.clone().ok_or(ScmError::NoDecision)?;
    for name in evidence.keys() {
        match scm.nodes.get(name) {
            None => return Err(ScmError::MissingNode(name.clone())),
            Some(Mechanism::Randomized { .. }) => {
                return Err(ScmError::EvidenceOnRandomized(name.clone()))
            }
            Some(_) => {}
        }
        if *name == scm.sensitive {
            return Err(ScmError::EvidenceOnSensitive(name.clone()));
        }
    }

    let mut kept: Vec<(BTreeMap<String, Value>, Rational)> = Vec::new();
    let mut total = Rational::zero();
    for (noise, w) in scm.noise_assignments() {
        let (values, _) = scm.evaluate(&noise, &BTreeMap::new())?;
        let matches = values[&scm.sensitive] == *actual
            && evidence.iter().all(|(k, v)| values[k] == *v);
        if matches {
            total += w;
            kept.push((noise, w));
        }
    }
    if total.is_zero() {
        return Err(ScmError::ZeroProbabilityEvent);
    }

    let intervention: BTreeMap<String, Value> =
        [(scm.sensitive.clone(), counterfactual.clone())].into_iter().collect();
    let mut mixture: BTreeMap<Value, Rational> = BTreeMap::new();
    for (noise, w) in kept {
        let share = w.checked_div(&total).expect("total is positive");
        let (values, dist) = scm.evaluate(&noise, &intervention)?;
        match dist {
            Some(d) => {
                for (v, p) in d.atoms() {
                    *mixture.entry(v.clone()).or_insert(Rational::zero()) += share * *p;
                }
            }
            None => {
                *mixture
                    .entry(values[&decision].clone())
                    .or_insert(Rational::zero()) += share;
            }
        }
    }
    Ok(Distribution::new(mixture)?)
}

/// Witness of a counterfactual-fairness failure: for this candidate,
/// switching the sensitive value from `actual` to `counterfactual` moves the
/// probability of decision `decision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualViolation {
    pub candidate: String,
    pub actual: Value,
    pub counterfactual: Value,
    pub decision: Value,
    pub factual_probability: Rational,
    pub counterfactual_probability: Rational,
}

/// Checks counterfactual fairness of the model's decision node over a
/// population: for every candidate (in id order), conditioning on that
/// candidate's features and sensitive value, the decision distribution must
/// be invariant under every counterfactual intervention on the sensitive
/// node. Candidate features are bound to the model's feature nodes in
/// declaration order.
pub fn check_counterfactual_fairness(
    scm: &StructuralCausalModel,
    population: &Population,
) -> Result<Verdict<(), CounterfactualViolation>, ScmError> {
    let domain = scm.node_domain(&scm.sensitive)?;
    let mut ordered: Vec<_> = population.candidates().iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    for c in ordered {
        if c.features.len() != scm.feature_nodes.len() {
            return Err(ScmError::FeatureArity {
                expected: scm.feature_nodes.len(),
                got: c.features.len(),
            });
        }
        let evidence: BTreeMap<String, Value> = scm
            .feature_nodes
            .iter()
            .cloned()
            .zip(c.features.iter().map(|r| Value::Num(*r)))
            .collect();
        let factual = counterfactual_output(scm, &evidence, &c.sensitive, &c.sensitive)?;
        for alt in &domain {
            if *alt == c.sensitive {
                continue;
            }
            let flipped = counterfactual_output(scm, &evidence, &c.sensitive, alt)?;
            if flipped != factual {
                let mut decisions: BTreeSet<Value> =
                    factual.support().cloned().collect();
                decisions.extend(flipped.support().cloned());
                let d = decisions
                    .into_iter()
                    .find(|d| factual.probability(d) != flipped.probability(d))
                    .expect("distributions differ on some value");
                return Ok(Verdict::Fails(CounterfactualViolation {
                    candidate: c.id.clone(),
                    actual: c.sensitive.clone(),
                    counterfactual: alt.clone(),
                    factual_probability: factual.probability(&d),
                    counterfactual_probability: flipped.probability(&d),
                    decision: d,
                }));
            }
        }
    }
    Ok(Verdict::Holds(()))
}

/// The directed edge from the sensitive node into the decision node, when it
/// exists; its presence is taste-based discrimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TasteBasedEdge {
    pub sensitive: String,
    pub decision: String,
}

/// Holds exactly when the decision node does not take the sensitive node as
/// a parent. Errors when the model has no decision node.
pub fn check_no_taste_based(
    scm: &StructuralCausalModel,
) -> Result<Verdict<(), TasteBasedEdge>, ScmError> {
    let decision = scm.decision_node().ok_or(ScmError::NoDecision)?;
    let mech = scm.node(decision).expect("decision node validated");
    if mech.parents().iter().any(|p| p == &scm.sensitive) {
        Ok(Verdict::Fails(TasteBasedEdge {
            sensitive: scm.sensitive.clone(),
            decision: decision.to_string(),
        }))
    } else {
        Ok(Verdict::Holds(()))
    }
}
