//! Hiring-market games over a finite wage grid.
//!
//! A firm makes take-it-or-leave-it wage offers to one or more candidates;
//! each candidate sees only their own offer and accepts or rejects; a
//! market move (Nature) then assigns outside options to the firm and to
//! every rejecting candidate. Accepting at wage w yields `surplus - need -
//! w` for the firm and `w + need` for the candidate; rejection replaces w
//! with the drawn outside options on both sides. With unit surplus and
//! `need = -1` this is the familiar (2 - w, w - 1) split.
//!
//! Three builders share one tree shape: [`build_bilateral_market`] (one
//! candidate, one offer per grid point), [`build_simultaneous_market`] (an
//! offer vector per action), and [`apply_job_cap`] (offer vectors with a
//! bounded number of nonzero offers). The market move is a single action
//! per *set* of rejectors, choosing outside-option pairs for all of them at
//! once, which keeps every information set's own-history uniform.
//!
//! [`OutsideOptionBeliefs`] captures the four-number belief shorthand
//! (each side's view of both outside options), [`GridBeliefSpace`] feeds
//! the witness search, and the discrimination diagnostics compare realized
//! surplus across sensitive groups.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dist::Distribution;
use crate::equilibrium::{BeliefSpace, Beliefs, PlayerJustification};
use crate::fairness::{Population, Value};
use crate::game::{
    evaluate_profile, to_behavior, BehaviorStrategy, GameBuilder, GameError, GameTree,
    InfoSetId, PlayerId, PureStrategy, Strategy, StrategyProfile,
};
use crate::rational::{rat, Rational};

/// Hard ceiling on the number of leaves a builder will materialize.
const MAX_LEAVES: u128 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarketError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("invalid wage grid: {0}")]
    InvalidGrid(String),
    #[error("{0} is not on the wage grid")]
    OffGrid(String),
    #[error("no candidate named {0}")]
    UnknownCandidate(String),
    #[error("candidate {candidate} never receives offer {offer}")]
    UnknownOffer { candidate: String, offer: Rational },
    #[error("no firm action makes these offers: {0}")]
    UnknownMapping(String),
    #[error("candidate id {0} appears twice")]
    DuplicateCandidate(String),
    #[error("market needs at least one candidate")]
    NoCandidates,
    #[error("job cap {cap} must be smaller than the number of candidates {candidates}")]
    CapTooLarge { cap: usize, candidates: usize },
    #[error("game would have about {estimated} leaves, over the limit of {limit}")]
    TreeTooLarge { estimated: u128, limit: u128 },
    #[error("strategy for {0} is not pure at a reached information set")]
    NotPure(String),
    #[error("population candidate {0} has no outcome entry")]
    PopulationMismatch(String),
}

/// One candidate's market-side parameters. `outside` is the candidate's
/// true outside option (must sit on the grid); `surplus` is the match
/// surplus the firm earns by employing them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketCandidate {
    pub id: String,
    pub outside: Rational,
    pub surplus: Rational,
}

impl MarketCandidate {
    /// Unit-surplus candidate.
    pub fn unit(id: &str, outside: Rational) -> Self {
        MarketCandidate { id: id.into(), outside, surplus: Rational::one() }
    }
}

/// The primitives of a hiring market: wage/outside-option grid, true
/// outside options, and the need penalty added to every candidate payoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketSpec {
    grid: Vec<Rational>,
    firm_outside: Rational,
    candidates: Vec<MarketCandidate>,
    need_penalty: Rational,
}

impl MarketSpec {
    /// Standard need penalty of -1.
    pub fn new(
        grid: Vec<Rational>,
        firm_outside: Rational,
        candidates: Vec<MarketCandidate>,
    ) -> Result<Self, MarketError> {
        MarketSpec::with_need_penalty(grid, firm_outside, candidates, rat(-1, 1))
    }

    pub fn with_need_penalty(
        mut grid: Vec<Rational>,
        firm_outside: Rational,
        candidates: Vec<MarketCandidate>,
        need_penalty: Rational,
    ) -> Result<Self, MarketError> {
        grid.sort();
        grid.dedup();
        if grid.is_empty() {
            return Err(MarketError::InvalidGrid("grid is empty".into()));
        }
        let lo = Rational::zero();
        let hi = rat(3, 1);
        if grid[0] != lo || *grid.last().expect("nonempty") != hi {
            return Err(MarketError::InvalidGrid(
                "grid must contain both endpoints 0 and 3".into(),
            ));
        }
        if candidates.is_empty() {
            return Err(MarketError::NoCandidates);
        }
        let mut ids = BTreeSet::new();
        for c in &candidates {
            if !ids.insert(c.id.as_str()) {
                return Err(MarketError::DuplicateCandidate(c.id.clone()));
            }
            if grid.binary_search(&c.outside).is_err() {
                return Err(MarketError::OffGrid(format!(
                    "outside option {} of candidate {}",
                    c.outside, c.id
                )));
            }
        }
        if grid.binary_search(&firm_outside).is_err() {
            return Err(MarketError::OffGrid(format!("firm outside option {firm_outside}")));
        }
        Ok(MarketSpec { grid, firm_outside, candidates, need_penalty })
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    pub fn firm_outside(&self) -> Rational {
        self.firm_outside
    }

    pub fn candidates(&self) -> &[MarketCandidate] {
        &self.candidates
    }

    pub fn need_penalty(&self) -> Rational {
        self.need_penalty
    }

    pub fn candidate_index(&self, id: &str) -> Result<usize, MarketError> {
        self.candidates
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| MarketError::UnknownCandidate(id.to_string()))
    }
}

/// The evenly spaced wage grid from 0 to 3; `step` must divide 3 exactly.
pub fn offer_grid(step: Rational) -> Result<Vec<Rational>, MarketError> {
    if !step.is_positive() {
        return Err(MarketError::InvalidGrid(format!("step {step} is not positive")));
    }
    let span = rat(3, 1);
    let k = span.checked_div(&step).expect("step is positive");
    if k.denominator() != 1 {
        return Err(MarketError::InvalidGrid(format!("step {step} does not divide 3")));
    }
    Ok((0..=k.numerator())
        .map(|i| Rational::from_integer(i) * step)
        .collect())
}

/// An offer mapping plus the index structures needed to talk about the
/// game: which firm action makes which offers, which information set hears
/// which offer, and which market move covers which set of rejectors.
#[derive(Debug, Clone)]
pub struct HiringMarket {
    game: GameTree,
    spec: MarketSpec,
    firm: PlayerId,
    market: PlayerId,
    candidates: Vec<(String, PlayerId)>,
    firm_root: InfoSetId,
    mappings: Vec<Vec<Rational>>,
    candidate_sets: Vec<BTreeMap<Rational, InfoSetId>>,
    market_sets: BTreeMap<Vec<usize>, InfoSetId>,
    pairs: Vec<(Rational, Rational)>,
}

/// The bilateral game: one firm action per entry of `spec.grid()`.
pub fn build_bilateral_market(
    spec: &MarketSpec,
    candidate_id: &str,
) -> Result<HiringMarket, MarketError> {
    build_bilateral_market_with_offers(spec, candidate_id, &spec.grid.clone())
}

/// Bilateral game with a restricted set of offers (each still on the grid).
pub fn build_bilateral_market_with_offers(
    spec: &MarketSpec,
    candidate_id: &str,
    offers: &[Rational],
) -> Result<HiringMarket, MarketError> {
    let k = spec.candidate_index(candidate_id)?;
    let sub = MarketSpec {
        grid: spec.grid.clone(),
        firm_outside: spec.firm_outside,
        candidates: vec![spec.candidates[k].clone()],
        need_penalty: spec.need_penalty,
    };
    let mappings: Vec<Vec<Rational>> = offers.iter().map(|v| vec![*v]).collect();
    build_market(sub, mappings)
}

/// The simultaneous game: one firm action per offer vector over the grid.
pub fn build_simultaneous_market(spec: &MarketSpec) -> Result<HiringMarket, MarketError> {
    build_simultaneous_market_with_offers(spec, &spec.grid.clone())
}

/// Simultaneous game over a restricted offer set; firm actions are the
/// |offers|^n vectors in lexicographic order (first candidate most
/// significant).
pub fn build_simultaneous_market_with_offers(
    spec: &MarketSpec,
    offers: &[Rational],
) -> Result<HiringMarket, MarketError> {
    let mappings = offer_vectors(spec.candidates.len(), offers);
    build_market(spec.clone(), mappings)
}

/// The job-capped simultaneous game: the firm may extend at most `cap`
/// nonzero offers (offer 0 is "no job"), drawn from `allowed_offers`.
/// Requires `cap < |candidates|`; `cap = 0` leaves only the all-zero
/// mapping.
pub fn apply_job_cap(
    spec: &MarketSpec,
    cap: usize,
    allowed_offers: &[Rational],
) -> Result<HiringMarket, MarketError> {
    let n = spec.candidates.len();
    if cap >= n {
        return Err(MarketError::CapTooLarge { cap, candidates: n });
    }
    if !allowed_offers.contains(&Rational::zero()) {
        return Err(MarketError::InvalidGrid(
            "allowed offers must include 0 (the no-job offer)".into(),
        ));
    }
    let mappings: Vec<Vec<Rational>> = offer_vectors(n, allowed_offers)
        .into_iter()
        .filter(|m| m.iter().filter(|w| !w.is_zero()).count() <= cap)
        .collect();
    build_market(spec.clone(), mappings)
}

fn offer_vectors(n: usize, offers: &[Rational]) -> Vec<Vec<Rational>> {
    let mut sorted: Vec<Rational> = offers.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * sorted.len());
        for prefix in &out {
            for v in &sorted {
                let mut m = prefix.clone();
                m.push(*v);
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn build_market(
    spec: MarketSpec,
    mappings: Vec<Vec<Rational>>,
) -> Result<HiringMarket, MarketError> {
    if mappings.is_empty() {
        return Err(MarketError::InvalidGrid("no offers to build actions from".into()));
    }
    let n = spec.candidates.len();
    for m in &mappings {
        debug_assert_eq!(m.len(), n);
        for (k, w) in m.iter().enumerate() {
            if spec.grid.binary_search(w).is_err() {
                return Err(MarketError::OffGrid(format!(
                    "offer {} to candidate {}",
                    w, spec.candidates[k].id
                )));
            }
        }
    }

    let p = (spec.grid.len() as u128).pow(2);
    let per_mapping = (1 + p)
        .checked_pow(n as u32)
        .ok_or(MarketError::TreeTooLarge { estimated: u128::MAX, limit: MAX_LEAVES })?;
    let estimated = (mappings.len() as u128)
        .checked_mul(per_mapping)
        .ok_or(MarketError::TreeTooLarge { estimated: u128::MAX, limit: MAX_LEAVES })?;
    if estimated > MAX_LEAVES {
        return Err(MarketError::TreeTooLarge { estimated, limit: MAX_LEAVES });
    }

    let mut b = GameBuilder::new();
    let firm = b.add_player("firm");
    let candidates: Vec<(String, PlayerId)> = spec
        .candidates
        .iter()
        .map(|c| (c.id.clone(), b.add_player(&c.id)))
        .collect();
    let market = b.add_nature("market")?;

    let mut candidate_sets: Vec<BTreeMap<Rational, InfoSetId>> = vec![BTreeMap::new(); n];
    for k in 0..n {
        let heard: BTreeSet<Rational> = mappings.iter().map(|m| m[k]).collect();
        for v in heard {
            let h = b.add_info_set(candidates[k].1, vec!["accept".into(), "reject".into()]);
            candidate_sets[k].insert(v, h);
        }
    }

    let pairs: Vec<(Rational, Rational)> = spec
        .grid
        .iter()
        .flat_map(|of| spec.grid.iter().map(move |ox| (*of, *ox)))
        .collect();

    let mut market_sets: BTreeMap<Vec<usize>, InfoSetId> = BTreeMap::new();
    let mut roots = Vec::with_capacity(mappings.len());
    for mapping in &mappings {
        let mut accepted = Vec::with_capacity(n);
        roots.push(response_chain(
            &mut b,
            &spec,
            firm,
            &candidates,
            market,
            &candidate_sets,
            &mut market_sets,
            &pairs,
            mapping,
            &mut accepted,
        ));
    }

    let firm_root = b.add_info_set(
        firm,
        mappings.iter().map(|m| mapping_label(&spec, m)).collect(),
    );
    let root = b.decision(firm_root, roots);
    let game = b.build(root)?;

    Ok(HiringMarket {
        game,
        spec,
        firm,
        market,
        candidates,
        firm_root,
        mappings,
        candidate_sets,
        market_sets,
        pairs,
    })
}

fn mapping_label(spec: &MarketSpec, mapping: &[Rational]) -> String {
    mapping
        .iter()
        .zip(&spec.candidates)
        .map(|(w, c)| format!("{}:{}", c.id, w))
        .collect::<Vec<_>>()
        .join(";")
}

#[allow(clippy::too_many_arguments)]
fn response_chain(
    b: &mut GameBuilder,
    spec: &MarketSpec,
    firm: PlayerId,
    candidates: &[(String, PlayerId)],
    market: PlayerId,
    candidate_sets: &[BTreeMap<Rational, InfoSetId>],
    market_sets: &mut BTreeMap<Vec<usize>, InfoSetId>,
    pairs: &[(Rational, Rational)],
    mapping: &[Rational],
    accepted: &mut Vec<bool>,
) -> crate::game::NodeId {
    let n = candidates.len();
    let k = accepted.len();
    if k == n {
        let rejectors: Vec<usize> = (0..n).filter(|i| !accepted[*i]).collect();
        if rejectors.is_empty() {
            let payoffs = leaf_payoffs(spec, firm, candidates, mapping, accepted, &BTreeMap::new());
            return b.leaf(payoffs);
        }
        let m = rejectors.len();
        let total = pairs.len().pow(m as u32);
        let h = *market_sets.entry(rejectors.clone()).or_insert_with(|| {
            let labels: Vec<String> = (0..total)
                .map(|idx| {
                    decode_pairs(pairs, &rejectors, idx)
                        .iter()
                        .map(|(i, (of, ox))| format!("{}:({},{})", candidates[*i].0, of, ox))
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .collect();
            b.add_info_set(market, labels)
        });
        let children: Vec<crate::game::NodeId> = (0..total)
            .map(|idx| {
                let drawn = decode_pairs(pairs, &rejectors, idx);
                let payoffs = leaf_payoffs(spec, firm, candidates, mapping, accepted, &drawn);
                b.leaf(payoffs)
            })
            .collect();
        return b.decision(h, children);
    }

    let set = candidate_sets[k][&mapping[k]];
    accepted.push(true);
    let acc = response_chain(
        b, spec, firm, candidates, market, candidate_sets, market_sets, pairs, mapping, accepted,
    );
    accepted.pop();
    accepted.push(false);
    let rej = response_chain(
        b, spec, firm, candidates, market, candidate_sets, market_sets, pairs, mapping, accepted,
    );
    accepted.pop();
    b.decision(set, vec![acc, rej])
}

/// Decodes a market action index into the pair drawn for each rejector
/// (first rejector most significant).
fn decode_pairs(
    pairs: &[(Rational, Rational)],
    rejectors: &[usize],
    mut idx: usize,
) -> BTreeMap<usize, (Rational, Rational)> {
    let p = pairs.len();
    let mut out = BTreeMap::new();
    for (j, &k) in rejectors.iter().enumerate() {
        let power = p.pow((rejectors.len() - 1 - j) as u32);
        let d = idx / power;
        idx %= power;
        out.insert(k, pairs[d]);
    }
    out
}

fn leaf_payoffs(
    spec: &MarketSpec,
    firm: PlayerId,
    candidates: &[(String, PlayerId)],
    mapping: &[Rational],
    accepted: &[bool],
    drawn: &BTreeMap<usize, (Rational, Rational)>,
) -> Vec<(PlayerId, Rational)> {
    let need = spec.need_penalty;
    let mut firm_total = Rational::zero();
    let mut out = Vec::with_capacity(candidates.len() + 1);
    for (k, (_, player)) in candidates.iter().enumerate() {
        let s = spec.candidates[k].surplus;
        if accepted[k] {
            let w = mapping[k];
            firm_total += s - need - w;
            out.push((*player, w + need));
        } else {
            let (of, ox) = drawn[&k];
            firm_total += s - need - of;
            out.push((*player, ox + need));
        }
    }
    out.push((firm, firm_total));
    out
}

impl HiringMarket {
    pub fn game(&self) -> &GameTree {
        &self.game
    }

    pub fn spec(&self) -> &MarketSpec {
        &self.spec
    }

    pub fn firm(&self) -> PlayerId {
        self.firm
    }

    pub fn market_player(&self) -> PlayerId {
        self.market
    }

    pub fn firm_root(&self) -> InfoSetId {
        self.firm_root
    }

    /// Offer vectors, indexed by firm action, parallel to `spec.candidates`.
    pub fn mappings(&self) -> &[Vec<Rational>] {
        &self.mappings
    }

    pub fn candidate_ids(&self) -> Vec<&str> {
        self.candidates.iter().map(|(id, _)| id.as_str()).collect()
    }

    pub fn candidate_player(&self, id: &str) -> Result<PlayerId, MarketError> {
        self.candidates
            .iter()
            .find(|(cid, _)| cid == id)
            .map(|(_, p)| *p)
            .ok_or_else(|| MarketError::UnknownCandidate(id.to_string()))
    }

    /// The offers a candidate can hear, each with its information set.
    pub fn candidate_sets(&self, id: &str) -> Result<&BTreeMap<Rational, InfoSetId>, MarketError> {
        let k = self.spec.candidate_index(id)?;
        Ok(&self.candidate_sets[k])
    }

    /// The firm strategy making exactly these offers.
    pub fn firm_strategy(
        &self,
        offers: &BTreeMap<String, Rational>,
    ) -> Result<PureStrategy, MarketError> {
        let mut target = Vec::with_capacity(self.candidates.len());
        for (id, _) in &self.candidates {
            let w = offers
                .get(id)
                .ok_or_else(|| MarketError::UnknownCandidate(id.clone()))?;
            target.push(*w);
        }
        for extra in offers.keys() {
            self.spec.candidate_index(extra)?;
        }
        let a = self
            .mappings
            .iter()
            .position(|m| *m == target)
            .ok_or_else(|| {
                MarketError::UnknownMapping(
                    target.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","),
                )
            })?;
        Ok(PureStrategy::new(self.firm, [(self.firm_root, a)].into_iter().collect()))
    }

    /// Bilateral convenience: offer the same wage to every candidate.
    pub fn uniform_offer_strategy(&self, offer: Rational) -> Result<PureStrategy, MarketError> {
        let offers: BTreeMap<String, Rational> = self
            .candidates
            .iter()
            .map(|(id, _)| (id.clone(), offer))
            .collect();
        self.firm_strategy(&offers)
    }

    /// Reads the offers a pure firm strategy makes.
    pub fn offers_of(&self, firm: &PureStrategy) -> Result<BTreeMap<String, Rational>, MarketError> {
        let a = firm
            .action_at(self.firm_root)
            .ok_or_else(|| MarketError::NotPure("firm".into()))?;
        Ok(self
            .candidates
            .iter()
            .zip(&self.mappings[a])
            .map(|((id, _), w)| (id.clone(), *w))
            .collect())
    }

    /// A candidate strategy from explicit accept/reject answers, one per
    /// offer the candidate can hear (`true` = accept).
    pub fn candidate_response_strategy(
        &self,
        id: &str,
        responses: &BTreeMap<Rational, bool>,
    ) -> Result<PureStrategy, MarketError> {
        let k = self.spec.candidate_index(id)?;
        let mut choices = BTreeMap::new();
        for (v, h) in &self.candidate_sets[k] {
            let accept = responses.get(v).ok_or(MarketError::UnknownOffer {
                candidate: id.to_string(),
                offer: *v,
            })?;
            choices.insert(*h, if *accept { 0 } else { 1 });
        }
        Ok(PureStrategy::new(self.candidates[k].1, choices))
    }

    /// The threshold policy: accept exactly the offers at or above `threshold`.
    pub fn candidate_threshold_strategy(
        &self,
        id: &str,
        threshold: Rational,
    ) -> Result<PureStrategy, MarketError> {
        let k = self.spec.candidate_index(id)?;
        let choices = self.candidate_sets[k]
            .iter()
            .map(|(v, h)| (*h, usize::from(*v < threshold)))
            .collect();
        Ok(PureStrategy::new(self.candidates[k].1, choices))
    }

    fn pair_action(
        &self,
        rejectors: &[usize],
        pair_for: impl Fn(usize) -> (Rational, Rational),
    ) -> Result<usize, MarketError> {
        let mut idx = 0usize;
        for &k in rejectors {
            let pair = pair_for(k);
            let d = self.pairs.binary_search(&pair).map_err(|_| {
                MarketError::OffGrid(format!(
                    "outside-option pair ({},{}) for candidate {}",
                    pair.0, pair.1, self.candidates[k].0
                ))
            })?;
            idx = idx * self.pairs.len() + d;
        }
        Ok(idx)
    }

    /// A deterministic market behavior: at every market move, draw the given
    /// `(firm outside, candidate outside)` pair for each rejector.
    pub fn market_behavior(
        &self,
        pairs: &BTreeMap<String, (Rational, Rational)>,
    ) -> Result<BehaviorStrategy, MarketError> {
        let by_index: BTreeMap<usize, (Rational, Rational)> = pairs
            .iter()
            .map(|(id, pr)| Ok((self.spec.candidate_index(id)?, *pr)))
            .collect::<Result<_, MarketError>>()?;
        for (id, _) in &self.candidates {
            if !pairs.contains_key(id) {
                return Err(MarketError::UnknownCandidate(id.clone()));
            }
        }
        let mut choices = BTreeMap::new();
        for (rejectors, h) in &self.market_sets {
            let idx = self.pair_action(rejectors, |k| by_index[&k])?;
            choices.insert(*h, Distribution::point(idx));
        }
        Ok(BehaviorStrategy::new(self.market, choices))
    }

    /// The market behavior drawing the true outside options from the spec.
    pub fn true_market_behavior(&self) -> BehaviorStrategy {
        let pairs: BTreeMap<String, (Rational, Rational)> = self
            .spec
            .candidates
            .iter()
            .map(|c| (c.id.clone(), (self.spec.firm_outside, c.outside)))
            .collect();
        self.market_behavior(&pairs).expect("true outside options are on the grid")
    }

    /// Assembles a profile from pure strategic strategies plus the true
    /// market behavior.
    pub fn profile(
        &self,
        firm: PureStrategy,
        responses: Vec<PureStrategy>,
    ) -> Result<StrategyProfile, MarketError> {
        let mut strategies = vec![Strategy::Pure(firm)];
        strategies.extend(responses.into_iter().map(Strategy::Pure));
        strategies.push(Strategy::Behavior(self.true_market_behavior()));
        Ok(StrategyProfile::new(&self.game, strategies)?)
    }
}

/// What actually happened under a pure profile: payoffs, who was offered
/// what, who matched, and the surplus each match realized (zero when
/// unmatched).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumOutcome {
    pub payoffs: BTreeMap<PlayerId, Rational>,
    pub offers: BTreeMap<String, Rational>,
    pub matched: BTreeMap<String, bool>,
    pub surplus: BTreeMap<String, Rational>,
}

fn pure_action(strategy: &Strategy, h: InfoSetId, who: &str) -> Result<usize, MarketError> {
    let err = || MarketError::NotPure(who.to_string());
    match strategy {
        Strategy::Pure(s) => s.action_at(h).ok_or_else(err),
        Strategy::Mixed(m) => m
            .dist()
            .as_point()
            .and_then(|s| s.action_at(h))
            .ok_or_else(err),
        Strategy::Behavior(b) => b
            .action_dist(h)
            .and_then(|d| d.as_point())
            .copied()
            .ok_or_else(err),
    }
}

/// Evaluates a pure profile into an [`EquilibriumOutcome`].
pub fn outcome_from_profile(
    market: &HiringMarket,
    profile: &StrategyProfile,
) -> Result<EquilibriumOutcome, MarketError> {
    let payoffs = evaluate_profile(&market.game, profile);
    let a = pure_action(profile.strategy(market.firm), market.firm_root, "firm")?;
    let mapping = &market.mappings[a];
    let mut offers = BTreeMap::new();
    let mut matched = BTreeMap::new();
    let mut surplus = BTreeMap::new();
    for (k, (id, player)) in market.candidates.iter().enumerate() {
        let set = market.candidate_sets[k][&mapping[k]];
        let r = pure_action(profile.strategy(*player), set, id)?;
        let hit = r == 0;
        offers.insert(id.clone(), mapping[k]);
        matched.insert(id.clone(), hit);
        surplus.insert(
            id.clone(),
            if hit { market.spec.candidates[k].surplus } else { Rational::zero() },
        );
    }
    Ok(EquilibriumOutcome { payoffs, offers, matched, surplus })
}

/// The four-number belief shorthand for bilateral games: each side's view
/// of the firm's and the candidate's outside options, the acceptance
/// threshold the firm ascribes to the candidate, and the offer the
/// candidate expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutsideOptionBeliefs {
    /// o_f(f): the firm's view of its own outside option.
    pub o_f_f: Rational,
    /// o_f(x): the firm's view of the candidate's outside option.
    pub o_f_x: Rational,
    /// o_x(x): the candidate's view of their own outside option.
    pub o_x_x: Rational,
    /// o_x(f): the candidate's view of the firm's outside option. Recorded
    /// for completeness; no condition below constrains it.
    pub o_x_f: Rational,
    /// The acceptance threshold the firm believes the candidate uses.
    pub firm_threshold: Rational,
    /// The offer the candidate believes the firm makes.
    pub believed_offer: Rational,
}

/// The offer-anchored belief assignment sustaining an accepted offer z:
/// the firm thinks its own fallback is the top wage and that the candidate
/// accepts anything at or above z; the candidate expects z and values their
/// own fallback at exactly z.
pub fn offer_anchored_beliefs(offer: Rational) -> OutsideOptionBeliefs {
    OutsideOptionBeliefs {
        o_f_f: rat(3, 1),
        o_f_x: offer,
        o_x_x: offer,
        o_x_f: Rational::zero(),
        firm_threshold: offer,
        believed_offer: offer,
    }
}

/// Sufficient conditions for `(offer o_f_x, accept)` to be self-confirming
/// under threshold beliefs: the firm's believed fallback covers the offer
/// it believes the candidate needs, and the candidate's believed fallback
/// does not beat that offer.
pub fn offer_anchored_conditions(b: &OutsideOptionBeliefs) -> bool {
    b.o_f_f >= b.o_f_x && b.o_f_x >= b.o_x_x
}

/// Conditions under which a profile with everyone believing the true
/// market rates `(o(f), o(x))` is both Nash and self-confirming: all four
/// outside-option beliefs agree with the truth, the candidate's rate is at
/// least the firm's, and the offer does not exceed the firm's rate.
pub fn market_rate_conditions(
    b: &OutsideOptionBeliefs,
    market: (Rational, Rational),
    offer: Rational,
) -> bool {
    let (of, ox) = market;
    b.o_f_f == of
        && b.o_x_f == of
        && b.o_f_x == ox
        && b.o_x_x == ox
        && of <= ox
        && offer <= of
}

impl HiringMarket {
    fn threshold_behavior(&self, k: usize, threshold: Rational) -> BehaviorStrategy {
        let choices = self.candidate_sets[k]
            .iter()
            .map(|(v, h)| (*h, Distribution::point(usize::from(*v < threshold))))
            .collect();
        BehaviorStrategy::new(self.candidates[k].1, choices)
    }

    fn reject_all_behavior(&self, k: usize) -> BehaviorStrategy {
        let choices = self.candidate_sets[k]
            .iter()
            .map(|(_, h)| (*h, Distribution::point(1)))
            .collect();
        BehaviorStrategy::new(self.candidates[k].1, choices)
    }

    fn market_point_behavior(
        &self,
        pair_for: impl Fn(&[usize], usize) -> (Rational, Rational),
    ) -> Result<BehaviorStrategy, MarketError> {
        let mut choices = BTreeMap::new();
        for (rejectors, h) in &self.market_sets {
            let idx = self.pair_action(rejectors, |k| pair_for(rejectors, k))?;
            choices.insert(*h, Distribution::point(idx));
        }
        Ok(BehaviorStrategy::new(self.market, choices))
    }

    /// Game-level beliefs for the single-candidate market induced by the
    /// outside-option shorthand. Returns `(firm's beliefs, candidate's
    /// beliefs)`.
    pub fn bilateral_beliefs(
        &self,
        b: &OutsideOptionBeliefs,
    ) -> Result<(Beliefs, Beliefs), MarketError> {
        if self.candidates.len() != 1 {
            return Err(MarketError::InvalidGrid(
                "outside-option beliefs describe the single-candidate game".into(),
            ));
        }
        let candidate = self.candidates[0].1;

        let firm_market = self.market_point_behavior(|_, _| (b.o_f_f, b.o_f_x))?;
        let firm_beliefs = Beliefs::new(
            self.firm,
            [
                (
                    candidate,
                    Distribution::point(self.threshold_behavior(0, b.firm_threshold)),
                ),
                (self.market, Distribution::point(firm_market)),
            ]
            .into_iter()
            .collect(),
        );

        let offer_action = self
            .mappings
            .iter()
            .position(|m| m[0] == b.believed_offer)
            .ok_or(MarketError::UnknownOffer {
                candidate: "firm".to_string(),
                offer: b.believed_offer,
            })?;
        let firm_behavior = BehaviorStrategy::new(
            self.firm,
            [(self.firm_root, Distribution::point(offer_action))].into_iter().collect(),
        );
        let candidate_market = self.market_point_behavior(|_, _| (b.o_x_f, b.o_x_x))?;
        let candidate_beliefs = Beliefs::new(
            candidate,
            [
                (self.firm, Distribution::point(firm_behavior)),
                (self.market, Distribution::point(candidate_market)),
            ]
            .into_iter()
            .collect(),
        );
        Ok((firm_beliefs, candidate_beliefs))
    }

    /// Justifications for a pure bilateral profile from the shorthand:
    /// each side's support strategy paired with the induced beliefs.
    pub fn bilateral_justifications(
        &self,
        profile: &StrategyProfile,
        b: &OutsideOptionBeliefs,
    ) -> Result<Vec<PlayerJustification>, MarketError> {
        let (firm_beliefs, candidate_beliefs) = self.bilateral_beliefs(b)?;
        let firm_strategy = match profile.strategy(self.firm) {
            Strategy::Pure(s) => s.clone(),
            _ => return Err(MarketError::NotPure("firm".into())),
        };
        let candidate = self.candidates[0].1;
        let candidate_strategy = match profile.strategy(candidate) {
            Strategy::Pure(s) => s.clone(),
            _ => return Err(MarketError::NotPure(self.candidates[0].0.clone())),
        };
        Ok(vec![
            PlayerJustification {
                player: self.firm,
                beliefs: vec![(firm_strategy, firm_beliefs)],
            },
            PlayerJustification {
                player: candidate,
                beliefs: vec![(candidate_strategy, candidate_beliefs)],
            },
        ])
    }

    /// The sustaining belief for the firm, built from its support
    /// strategy's on-path play: accepted candidates are believed to use the
    /// threshold policy at their current offer, rejected candidates to
    /// reject everything, and the market to pay the firm the top wage
    /// anywhere off path (true pairs on path). None when the on-path play
    /// is not deterministic.
    fn firm_sustaining(
        &self,
        profile: &StrategyProfile,
        strategy: &PureStrategy,
    ) -> Option<Beliefs> {
        let a = strategy.action_at(self.firm_root)?;
        let mapping = &self.mappings[a];
        let mut about: BTreeMap<PlayerId, Distribution<BehaviorStrategy>> = BTreeMap::new();
        let mut rejectors = Vec::new();
        let mut off_path: Vec<(Rational, Rational)> = Vec::with_capacity(self.candidates.len());
        for (k, (id, player)) in self.candidates.iter().enumerate() {
            let set = self.candidate_sets[k][&mapping[k]];
            let r = pure_action(profile.strategy(*player), set, id).ok()?;
            if r == 0 {
                about.insert(
                    *player,
                    Distribution::point(self.threshold_behavior(k, mapping[k])),
                );
                off_path.push((rat(3, 1), mapping[k]));
            } else {
                rejectors.push(k);
                about.insert(*player, Distribution::point(self.reject_all_behavior(k)));
                off_path.push((rat(3, 1), rat(3, 1)));
            }
        }
        let market = self
            .market_point_behavior(|set, k| {
                if set == rejectors.as_slice() {
                    (self.spec.firm_outside, self.spec.candidates[k].outside)
                } else {
                    off_path[k]
                }
            })
            .ok()?;
        about.insert(self.market, Distribution::point(market));
        Some(Beliefs::new(self.firm, about))
    }

    /// The sustaining belief for an accepting candidate: everyone else as
    /// they truly play, except that at unreached market moves the
    /// candidate's own outside option is believed to equal their offer (so
    /// rejecting could never strictly beat accepting). None when play is
    /// not deterministic or the candidate rejects on path (truth is then
    /// the only belief that can work).
    fn candidate_sustaining(
        &self,
        profile: &StrategyProfile,
        holder: usize,
        strategy: &PureStrategy,
    ) -> Option<Beliefs> {
        let a = pure_action(profile.strategy(self.firm), self.firm_root, "firm").ok()?;
        let offer = self.mappings[a][holder];
        let own_set = self.candidate_sets[holder][&offer];
        if strategy.action_at(own_set)? != 0 {
            return None;
        }
        let mut about: BTreeMap<PlayerId, Distribution<BehaviorStrategy>> = BTreeMap::new();
        for p in self.game.players() {
            if p == self.candidates[holder].1 || p == self.market {
                continue;
            }
            let truth = to_behavior(&self.game, profile.strategy(p)).ok()?;
            about.insert(p, Distribution::point(truth));
        }
        let market = self
            .market_point_behavior(|_, k| {
                if k == holder {
                    (Rational::zero(), offer)
                } else {
                    (self.spec.firm_outside, self.spec.candidates[k].outside)
                }
            })
            .ok()?;
        about.insert(self.market, Distribution::point(market));
        Some(Beliefs::new(self.candidates[holder].1, about))
    }
}

/// The belief space the witness search walks for hiring markets: first the
/// sustaining belief constructed from on-path play, then the true belief.
/// For pure profiles of these games this two-element family is complete: a
/// player's part is self-confirmable exactly when one of the two works
/// (rejecting candidates have their reached market move pinned to the true
/// outside options, so truth decides; everyone else is sustained by the
/// constructed belief).
pub struct GridBeliefSpace<'m> {
    market: &'m HiringMarket,
}

impl<'m> GridBeliefSpace<'m> {
    pub fn new(market: &'m HiringMarket) -> Self {
        GridBeliefSpace { market }
    }
}

impl BeliefSpace for GridBeliefSpace<'_> {
    fn candidate_beliefs(
        &self,
        game: &GameTree,
        profile: &StrategyProfile,
        player: PlayerId,
        strategy: &PureStrategy,
    ) -> Box<dyn Iterator<Item = Beliefs> + '_> {
        let m = self.market;
        let mut out = Vec::new();
        if player == m.firm {
            out.extend(m.firm_sustaining(profile, strategy));
        } else if let Some(k) = m.candidates.iter().position(|(_, p)| *p == player) {
            out.extend(m.candidate_sustaining(profile, k, strategy));
        }
        out.extend(Beliefs::correct(game, player, profile).ok());
        Box::new(out.into_iter())
    }
}

/// Per-group weighted average of realized surplus. Equal averages mean the
/// equilibrium shows no statistical discrimination between groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatisticalDiscriminationReport {
    pub holds: bool,
    pub group_means: BTreeMap<Value, Rational>,
}

pub fn statistical_discrimination_check(
    population: &Population,
    outcome: &EquilibriumOutcome,
) -> Result<StatisticalDiscriminationReport, MarketError> {
    let mut totals: BTreeMap<Value, (Rational, Rational)> = BTreeMap::new();
    for c in population.candidates() {
        let s = outcome
            .surplus
            .get(&c.id)
            .ok_or_else(|| MarketError::PopulationMismatch(c.id.clone()))?;
        let entry = totals
            .entry(c.sensitive.clone())
            .or_insert((Rational::zero(), Rational::zero()));
        entry.0 += c.weight * *s;
        entry.1 += c.weight;
    }
    let group_means: BTreeMap<Value, Rational> = totals
        .into_iter()
        .map(|(g, (num, den))| (g, num.checked_div(&den).expect("group weight is positive")))
        .collect();
    let mut means = group_means.values();
    let first = means.next().copied();
    let holds = means.all(|m| Some(*m) == first);
    Ok(StatisticalDiscriminationReport { holds, group_means })
}

/// Per-group minimum surplus among matched candidates. Groups with no
/// matched member are vacuous (`None`) and excluded from the comparison;
/// equality of the remaining minima is the no-taste-discrimination
/// condition at the margin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeckerReport {
    pub holds: bool,
    pub group_minima: BTreeMap<Value, Option<Rational>>,
}

pub fn becker_test(
    population: &Population,
    outcome: &EquilibriumOutcome,
) -> Result<BeckerReport, MarketError> {
    let mut group_minima: BTreeMap<Value, Option<Rational>> = BTreeMap::new();
    for c in population.candidates() {
        let hit = outcome
            .matched
            .get(&c.id)
            .ok_or_else(|| MarketError::PopulationMismatch(c.id.clone()))?;
        let entry = group_minima.entry(c.sensitive.clone()).or_insert(None);
        if *hit {
            let s = outcome.surplus[&c.id];
            *entry = Some(match entry {
                Some(m) => (*m).min(s),
                None => s,
            });
        }
    }
    let mut present = group_minima.values().filter_map(|m| *m);
    let first = present.next();
    let holds = present.all(|m| Some(m) == first);
    Ok(BeckerReport { holds, group_minima })
}
