//! Scenario files: one JSON document describing a market, optionally a
//! population with a classifier, a strategy profile with beliefs, a list of
//! checks, and a constructor request. Every number is an exact rational
//! written as a "p/q" string; unknown fields are rejected so typos surface
//! as schema errors naming the field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use hiring_games::dist::Distribution;
use hiring_games::fairness::scm::{Mechanism, StructuralCausalModel};
use hiring_games::fairness::{
    Candidate, CandidateMetric, Classifier, DecisionMetric, FairnessFn, MetricPair, Population,
    Value,
};
use hiring_games::game::StrategyProfile;
use hiring_games::market::{
    apply_job_cap, build_bilateral_market, build_bilateral_market_with_offers,
    build_simultaneous_market, build_simultaneous_market_with_offers, offer_grid,
    offer_anchored_beliefs, HiringMarket, MarketCandidate, MarketSpec, OutsideOptionBeliefs,
};
use hiring_games::rational::{rat, Rational};

use crate::error::CliError;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub market: MarketSection,
    #[serde(default)]
    pub concept: Option<ConceptSection>,
    #[serde(default)]
    pub enumeration: Option<EnumerationSection>,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub beliefs: Option<BeliefSection>,
    #[serde(default)]
    pub population: Option<Vec<CandidateSection>>,
    #[serde(default)]
    pub classifier: Option<ClassifierSection>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub constructor: Option<ConstructorSection>,
}

impl Scenario {
    /// Parses a scenario file, returning it together with the raw bytes the
    /// report digest is computed over.
    pub fn load(path: &Path) -> Result<(Scenario, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if scenario.version != SCENARIO_VERSION {
            return Err(CliError::Config(format!(
                "{}: version {} is not supported (expected {SCENARIO_VERSION})",
                path.display(),
                scenario.version
            )));
        }
        Ok((scenario, bytes))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    #[serde(default)]
    pub grid_step: Option<Rational>,
    #[serde(default)]
    pub grid: Option<Vec<Rational>>,
    pub firm_outside: Rational,
    #[serde(default)]
    pub need_penalty: Option<Rational>,
    pub candidates: Vec<CandidateEntry>,
    pub form: FormSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateEntry {
    pub id: String,
    pub outside: Rational,
    #[serde(default)]
    pub surplus: Option<Rational>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FormSection {
    Bilateral {
        candidate: String,
        #[serde(default)]
        offers: Option<Vec<Rational>>,
    },
    Simultaneous {
        #[serde(default)]
        offers: Option<Vec<Rational>>,
    },
    Capped { cap: usize, offers: Vec<Rational> },
}

impl MarketSection {
    pub fn spec(&self) -> Result<MarketSpec, CliError> {
        let grid = match (&self.grid_step, &self.grid) {
            (Some(step), None) => offer_grid(*step)?,
            (None, Some(g)) => g.clone(),
            _ => {
                return Err(CliError::Config(
                    "market: exactly one of grid_step and grid is required".into(),
                ))
            }
        };
        let candidates = self
            .candidates
            .iter()
            .map(|c| MarketCandidate {
                id: c.id.clone(),
                outside: c.outside,
                surplus: c.surplus.unwrap_or_else(|| rat(1, 1)),
            })
            .collect();
        let need = self.need_penalty.unwrap_or_else(|| rat(-1, 1));
        Ok(MarketSpec::with_need_penalty(grid, self.firm_outside, candidates, need)?)
    }

    pub fn build(&self) -> Result<HiringMarket, CliError> {
        let spec = self.spec()?;
        Ok(match &self.form {
            FormSection::Bilateral { candidate, offers: None } => {
                build_bilateral_market(&spec, candidate)?
            }
            FormSection::Bilateral { candidate, offers: Some(o) } => {
                build_bilateral_market_with_offers(&spec, candidate, o)?
            }
            FormSection::Simultaneous { offers: None } => build_simultaneous_market(&spec)?,
            FormSection::Simultaneous { offers: Some(o) } => {
                build_simultaneous_market_with_offers(&spec, o)?
            }
            FormSection::Capped { cap, offers } => apply_job_cap(&spec, *cap, offers)?,
        })
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConceptKind {
    Nash,
    Sce,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptSection {
    pub kind: ConceptKind,
    #[serde(default = "default_belief_budget")]
    pub belief_budget: usize,
}

fn default_belief_budget() -> usize {
    16
}

impl Default for ConceptSection {
    fn default() -> Self {
        ConceptSection { kind: ConceptKind::Sce, belief_budget: default_belief_budget() }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Full,
    Reduced,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationSection {
    #[serde(default = "default_mode")]
    pub mode: ModeKind,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_mode() -> ModeKind {
    ModeKind::Reduced
}

fn default_budget() -> usize {
    200_000
}

impl Default for EnumerationSection {
    fn default() -> Self {
        EnumerationSection { mode: default_mode(), budget: default_budget() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub offers: BTreeMap<String, Rational>,
    pub responses: BTreeMap<String, ResponseSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ResponseSection {
    /// Accept exactly the offers weakly above the threshold.
    Threshold(Rational),
    /// Accept (true) or reject per listed offer.
    Accept(BTreeMap<Rational, bool>),
}

impl ProfileSection {
    pub fn build(&self, market: &HiringMarket) -> Result<StrategyProfile, CliError> {
        for id in self.responses.keys() {
            market.candidate_player(id)?;
        }
        let firm = market.firm_strategy(&self.offers)?;
        let mut responses = Vec::new();
        for id in market.candidate_ids() {
            let r = self.responses.get(id).ok_or_else(|| {
                CliError::Config(format!("profile.responses: missing candidate {id}"))
            })?;
            responses.push(match r {
                ResponseSection::Threshold(t) => market.candidate_threshold_strategy(id, *t)?,
                ResponseSection::Accept(map) => market.candidate_response_strategy(id, map)?,
            });
        }
        Ok(market.profile(firm, responses)?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    OfferAnchored,
    MarketRate,
}

/// Either a named preset with its anchoring offer, or all six explicit
/// belief coordinates.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefSection {
    #[serde(default)]
    pub preset: Option<PresetKind>,
    #[serde(default)]
    pub offer: Option<Rational>,
    #[serde(default)]
    pub o_f_f: Option<Rational>,
    #[serde(default)]
    pub o_f_x: Option<Rational>,
    #[serde(default)]
    pub o_x_x: Option<Rational>,
    #[serde(default)]
    pub o_x_f: Option<Rational>,
    #[serde(default)]
    pub firm_threshold: Option<Rational>,
    #[serde(default)]
    pub believed_offer: Option<Rational>,
}

impl BeliefSection {
    pub fn resolve(&self, market: &HiringMarket) -> Result<OutsideOptionBeliefs, CliError> {
        let explicit = [
            ("o_f_f", self.o_f_f),
            ("o_f_x", self.o_f_x),
            ("o_x_x", self.o_x_x),
            ("o_x_f", self.o_x_f),
            ("firm_threshold", self.firm_threshold),
            ("believed_offer", self.believed_offer),
        ];
        match self.preset {
            Some(preset) => {
                if let Some((name, _)) = explicit.iter().find(|(_, v)| v.is_some()) {
                    return Err(CliError::Config(format!(
                        "beliefs: {name} cannot be combined with a preset"
                    )));
                }
                let offer = self.offer.ok_or_else(|| {
                    CliError::Config("beliefs: a preset requires the offer field".into())
                })?;
                match preset {
                    PresetKind::OfferAnchored => Ok(offer_anchored_beliefs(offer)),
                    PresetKind::MarketRate => {
                        let spec = market.spec();
                        let [c] = spec.candidates() else {
                            return Err(CliError::Config(
                                "beliefs: the market-rate preset needs a single-candidate market"
                                    .into(),
                            ));
                        };
                        Ok(OutsideOptionBeliefs {
                            o_f_f: spec.firm_outside(),
                            o_f_x: c.outside,
                            o_x_x: c.outside,
                            o_x_f: spec.firm_outside(),
                            firm_threshold: c.outside,
                            believed_offer: offer,
                        })
                    }
                }
            }
            None => {
                if self.offer.is_some() {
                    return Err(CliError::Config(
                        "beliefs: offer is only meaningful with a preset".into(),
                    ));
                }
                if let Some((name, _)) = explicit.iter().find(|(_, v)| v.is_none()) {
                    return Err(CliError::Config(format!(
                        "beliefs: missing field {name} (or use a preset)"
                    )));
                }
                Ok(OutsideOptionBeliefs {
                    o_f_f: self.o_f_f.expect("checked above"),
                    o_f_x: self.o_f_x.expect("checked above"),
                    o_x_x: self.o_x_x.expect("checked above"),
                    o_x_f: self.o_x_f.expect("checked above"),
                    firm_threshold: self.firm_threshold.expect("checked above"),
                    believed_offer: self.believed_offer.expect("checked above"),
                })
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSection {
    pub id: String,
    pub features: Vec<Rational>,
    pub sensitive: Value,
    pub label: Value,
    pub weight: Rational,
}

pub fn build_population(entries: &[CandidateSection]) -> Result<Population, CliError> {
    let candidates = entries
        .iter()
        .map(|c| Candidate {
            id: c.id.clone(),
            features: c.features.clone(),
            sensitive: c.sensitive.clone(),
            label: c.label.clone(),
            weight: c.weight,
        })
        .collect();
    Ok(Population::new(candidates)?)
}

pub type Atoms = Vec<(Rational, Rational)>;

pub fn build_dist(atoms: &Atoms) -> Result<Distribution<Rational>, CliError> {
    Ok(Distribution::new(atoms.iter().copied())?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum ClassifierSection {
    /// One decision distribution shared by the whole population.
    Constant(Atoms),
    /// An explicit distribution per candidate id; must cover the population.
    PerCandidate(BTreeMap<String, Atoms>),
}

impl ClassifierSection {
    pub fn build(&self, population: &Population) -> Result<Classifier, CliError> {
        match self {
            ClassifierSection::Constant(atoms) => {
                Ok(Classifier::constant(population, build_dist(atoms)?))
            }
            ClassifierSection::PerCandidate(map) => {
                for id in map.keys() {
                    if population.candidate(id).is_none() {
                        return Err(CliError::Config(format!(
                            "classifier: unknown candidate {id}"
                        )));
                    }
                }
                let mut decisions = BTreeMap::new();
                for c in population.candidates() {
                    let atoms = map.get(&c.id).ok_or_else(|| {
                        CliError::Config(format!("classifier: missing candidate {}", c.id))
                    })?;
                    decisions.insert(c.id.clone(), build_dist(atoms)?);
                }
                Ok(Classifier::new(decisions))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum FnSpec {
    Decision,
    Label,
    Constant(Value),
    /// Rows of (decision, label, value).
    Table(Vec<(Rational, Value, Value)>),
}

impl FnSpec {
    pub fn build(&self) -> FairnessFn {
        match self {
            FnSpec::Decision => FairnessFn::Decision,
            FnSpec::Label => FairnessFn::Label,
            FnSpec::Constant(v) => FairnessFn::Constant(v.clone()),
            FnSpec::Table(rows) => FairnessFn::Table(table_of(rows)),
        }
    }
}

pub fn table_of(rows: &[(Rational, Value, Value)]) -> BTreeMap<(Rational, Value), Value> {
    rows.iter().map(|(d, y, v)| ((*d, y.clone()), v.clone())).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DecisionMetricSpec {
    TotalVariation,
    /// Rows of (first distribution, second distribution, distance).
    Table(Vec<(Atoms, Atoms, Rational)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum CandidateMetricSpec {
    ScaledL1 { scale: Rational },
    /// Rows of (id, id, distance).
    Table(Vec<(String, String, Rational)>),
}

pub fn build_metric_pair(
    decisions: &Option<DecisionMetricSpec>,
    candidates: &Option<CandidateMetricSpec>,
) -> Result<MetricPair, CliError> {
    let defaults = MetricPair::default_pair();
    let d = match decisions {
        None => defaults.decisions,
        Some(DecisionMetricSpec::TotalVariation) => DecisionMetric::TotalVariation,
        Some(DecisionMetricSpec::Table(rows)) => {
            let mut table = BTreeMap::new();
            for (p, q, v) in rows {
                table.insert((build_dist(p)?, build_dist(q)?), *v);
            }
            DecisionMetric::Table(table)
        }
    };
    let c = match candidates {
        None => defaults.candidates,
        Some(CandidateMetricSpec::ScaledL1 { scale }) => CandidateMetric::ScaledL1 { scale: *scale },
        Some(CandidateMetricSpec::Table(rows)) => CandidateMetric::Table(
            rows.iter().map(|(x, y, v)| ((x.clone(), y.clone()), *v)).collect(),
        ),
    };
    Ok(MetricPair::new(d, c)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmSpec {
    pub sensitive: String,
    #[serde(default)]
    pub decision: Option<String>,
    #[serde(default)]
    pub features: Vec<String>,
    pub nodes: BTreeMap<String, NodeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum NodeSpec {
    Exogenous(Vec<(Value, Rational)>),
    Deterministic {
        parents: Vec<String>,
        /// Rows of (parent values in declared order, output).
        table: Vec<(Vec<Value>, Value)>,
    },
    Randomized {
        parents: Vec<String>,
        table: Vec<(Vec<Value>, Vec<(Value, Rational)>)>,
    },
}

impl ScmSpec {
    pub fn build(&self) -> Result<StructuralCausalModel, CliError> {
        let mut nodes = BTreeMap::new();
        for (name, spec) in &self.nodes {
            let mech = match spec {
                NodeSpec::Exogenous(atoms) => Mechanism::Exogenous(Distribution::new(
                    atoms.iter().map(|(v, p)| (v.clone(), *p)),
                )?),
                NodeSpec::Deterministic { parents, table } => Mechanism::Deterministic {
                    parents: parents.clone(),
                    table: table.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
                },
                NodeSpec::Randomized { parents, table } => Mechanism::Randomized {
                    parents: parents.clone(),
                    table: table
                        .iter()
                        .map(|(k, atoms)| {
                            Ok((
                                k.clone(),
                                Distribution::new(atoms.iter().map(|(v, p)| (v.clone(), *p)))?,
                            ))
                        })
                        .collect::<Result<_, CliError>>()?,
                },
            };
            nodes.insert(name.clone(), mech);
        }
        Ok(StructuralCausalModel::new(
            nodes,
            &self.sensitive,
            self.decision.clone(),
            self.features.clone(),
        )?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum CheckSpec {
    StatisticalParity,
    EqualizedOdds,
    Sufficiency,
    Group {
        f1: FnSpec,
        f2: FnSpec,
    },
    Individual {
        #[serde(default)]
        decision_metric: Option<DecisionMetricSpec>,
        #[serde(default)]
        candidate_metric: Option<CandidateMetricSpec>,
    },
    Counterfactual {
        scm: ScmSpec,
    },
    TasteBased {
        scm: ScmSpec,
    },
    StatisticalDiscrimination,
    Becker,
    Nash,
    SelfConfirming,
    Blatant,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub strategy: Atoms,
    pub anchor: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum ConstructorSection {
    GroupFair {
        decisions: Vec<Rational>,
        table: Vec<(Rational, Value, Value)>,
        seed: SeedSection,
    },
    Sufficiency {
        decisions: Vec<Rational>,
        table: Vec<(Rational, Value, Value)>,
        seed: SeedSection,
    },
    Constant {
        strategy: Atoms,
    },
}
