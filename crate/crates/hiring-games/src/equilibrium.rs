//! Nash and self-confirming equilibrium checks, best responses under
//! explicit beliefs, and exhaustive equilibrium enumeration.
//!
//! Beliefs are first-class: a player's belief assigns each other player
//! (Nature included) a distribution over that player's behavior strategies.
//! A profile is self-confirming when every support strategy of every player
//! best-responds to some belief that is correct at every information set the
//! play reaches; Nash is the special case where beliefs are everywhere
//! correct, checked directly against deviations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dist::Distribution;
use crate::game::{
    all_pure_strategies, evaluate_profile, reached_information_sets, to_behavior,
    BehaviorStrategy, GameError, GameTree, InfoSetId, Node, NodeId, PlayerId, PureStrategy,
    Strategy, StrategyProfile,
};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("belief for player {player} is missing an entry for player {missing}")]
    IncompleteBelief { player: String, missing: String },
    #[error("the belief space offered no candidate beliefs for player {0}")]
    EmptyBeliefSpace(String),
    #[error("search budget of {budget} candidate beliefs exhausted for player {player}")]
    BudgetExceeded { player: String, budget: usize },
    #[error("enumeration budget of {budget} profiles exhausted")]
    EnumerationBudgetExceeded { budget: usize },
}

/// What one player believes the rest of the game does: an independent
/// distribution over behavior strategies for every other player, Nature
/// included.
#[derive(Debug, Clone)]
pub struct Beliefs {
    holder: PlayerId,
    about: BTreeMap<PlayerId, Distribution<BehaviorStrategy>>,
}

impl Beliefs {
    pub fn new(
        holder: PlayerId,
        about: BTreeMap<PlayerId, Distribution<BehaviorStrategy>>,
    ) -> Self {
        Beliefs { holder, about }
    }

    /// The belief that puts probability one on the true behavior of every
    /// other player, derived from the profile.
    pub fn correct(
        game: &GameTree,
        holder: PlayerId,
        profile: &StrategyProfile,
    ) -> Result<Beliefs, EquilibriumError> {
        let mut about = BTreeMap::new();
        for p in game.players() {
            if p == holder {
                continue;
            }
            let b = to_behavior(game, profile.strategy(p))?;
            about.insert(p, Distribution::point(b));
        }
        Ok(Beliefs { holder, about })
    }

    pub fn holder(&self) -> PlayerId {
        self.holder
    }

    pub fn about(&self, p: PlayerId) -> Option<&Distribution<BehaviorStrategy>> {
        self.about.get(&p)
    }

    fn validate(&self, game: &GameTree) -> Result<(), EquilibriumError> {
        for p in game.players() {
            if p == self.holder {
                continue;
            }
            match self.about.get(&p) {
                None => {
                    return Err(EquilibriumError::IncompleteBelief {
                        player: game.player_name(self.holder).to_string(),
                        missing: game.player_name(p).to_string(),
                    })
                }
                Some(d) => {
                    for b in d.support() {
                        if b.player() != p {
                            return Err(GameError::WrongPlayer {
                                player: game.player_name(p).to_string(),
                                actual: game.player_name(b.player()).to_string(),
                            }
                            .into());
                        }
                        b.validate(game)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A deviation that beats the profile for its player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitableDeviation {
    pub player: PlayerId,
    pub strategy: PureStrategy,
    pub payoff: Rational,
    pub current_payoff: Rational,
}

/// Why a profile failed a self-confirming check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelfConfirmingFailure {
    /// A support strategy is not a best response to the supplied belief.
    NotBestResponse {
        player: PlayerId,
        strategy: PureStrategy,
        deviation: ProfitableDeviation,
    },
    /// The supplied belief disagrees with true behavior at a reached set.
    IncorrectBelief {
        player: PlayerId,
        about: PlayerId,
        info_set: InfoSetId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W, F> {
    Holds(W),
    Fails(F),
}

impl<W, F> Verdict<W, F> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }
}

/// Expected utility for the belief holder when they play `strategy` and the
/// rest of the game follows the belief.
pub fn expected_utility_under_belief(
    game: &GameTree,
    beliefs: &Beliefs,
    strategy: &Strategy,
) -> Result<Rational, EquilibriumError> {
    beliefs.validate(game)?;
    let holder = beliefs.holder();
    if strategy.player() != holder {
        return Err(GameError::WrongPlayer {
            player: game.player_name(holder).to_string(),
            actual: game.player_name(strategy.player()).to_string(),
        }
        .into());
    }
    // Expand the belief's per-player supports into weighted behavior combos;
    // beliefs are independent across players, so weights multiply.
    let mut total = Rational::zero();
    for (w, combo) in belief_combos(game, beliefs)? {
        let mut strategies: Vec<Strategy> =
            combo.into_iter().map(|(_, b)| Strategy::Behavior(b)).collect();
        strategies.push(strategy.clone());
        let profile = StrategyProfile::new(game, strategies)?;
        total += w * evaluate_profile(game, &profile)[&holder];
    }
    Ok(total)
}

fn belief_combos(
    game: &GameTree,
    beliefs: &Beliefs,
) -> Result<Vec<(Rational, BTreeMap<PlayerId, BehaviorStrategy>)>, EquilibriumError> {
    let mut combos: Vec<(Rational, BTreeMap<PlayerId, BehaviorStrategy>)> =
        vec![(Rational::one(), BTreeMap::new())];
    for p in game.players() {
        if p == beliefs.holder() {
            continue;
        }
        let d = beliefs.about(p).expect("validated belief is complete");
        let mut next = Vec::with_capacity(combos.len() * d.atoms().len());
        for (w, combo) in &combos {
            for (b, q) in d.atoms() {
                let mut combo = combo.clone();
                combo.insert(p, b.clone());
                next.push((*w * *q, combo));
            }
        }
        combos = next;
    }
    Ok(combos)
}

/// Best response of the belief holder against their beliefs: the optimal
/// value and one pure strategy attaining it (ties broken towards the
/// smallest action index at every information set).
pub fn best_response(
    game: &GameTree,
    beliefs: &Beliefs,
) -> Result<(PureStrategy, Rational), EquilibriumError> {
    beliefs.validate(game)?;
    let holder = beliefs.holder();

    // Arrival weight of every node counting only other players' choices: the
    // belief-weighted probability of reaching the node if the holder always
    // steered towards it.
    let mut arrival: Vec<Rational> = vec![Rational::zero(); game.node_count()];
    for (w, combo) in belief_combos(game, beliefs)? {
        let mut stack: Vec<(NodeId, Rational)> = vec![(game.root(), w)];
        while let Some((id, weight)) = stack.pop() {
            arrival[id.index()] += weight;
            if let Node::Decision { info_set, children } = game.node(id) {
                let owner = game.info_set(*info_set).owner();
                if owner == holder {
                    for child in children {
                        stack.push((*child, weight));
                    }
                } else {
                    let d = combo[&owner]
                        .action_dist(*info_set)
                        .expect("validated strategy covers every owned set");
                    for (a, p) in d.atoms() {
                        stack.push((children[*a], weight * *p));
                    }
                }
            }
        }
    }

    // Work through the holder's information sets deepest first (by the
    // length of the holder's own history); any own set inside the subtree
    // below a choice has a strictly longer history, so its action is already
    // fixed when the choice is scored.
    let mut sets: Vec<InfoSetId> = game.sets_of(holder).collect();
    sets.sort_by_key(|h| std::cmp::Reverse(game.info_set(*h).own_history().len()));

    let mut chosen: BTreeMap<InfoSetId, usize> = BTreeMap::new();
    // Conditional values: v[node] = expected holder payoff from this node
    // per unit of arrival weight, given choices fixed so far.
    fn value(
        game: &GameTree,
        holder: PlayerId,
        chosen: &BTreeMap<InfoSetId, usize>,
        beliefs_avg: &dyn Fn(InfoSetId, usize) -> Rational,
        node: NodeId,
    ) -> Rational {
        match game.node(node) {
            Node::Leaf { payoffs } => payoffs
                .iter()
                .find(|(p, _)| *p == holder)
                .map(|(_, u)| *u)
                .unwrap_or(Rational::zero()),
            Node::Decision { info_set, children } => {
                let owner = game.info_set(*info_set).owner();
                if owner == holder {
                    let a = chosen[info_set];
                    value(game, holder, chosen, beliefs_avg, children[a])
                } else {
                    let mut total = Rational::zero();
                    for (a, child) in children.iter().enumerate() {
                        let p = beliefs_avg(*info_set, a);
                        if !p.is_zero() {
                            total += p * value(game, holder, chosen, beliefs_avg, *child);
                        }
                    }
                    total
                }
            }
        }
    }

    // Marginal action probabilities of other players under the belief. The
    // subtree below a holder choice contains no holder sets that are still
    // open, so averaging the belief's mixture per set is sound there: within
    // one belief combo behavior is independent across sets.
    //
    // To stay exact about correlation across different support atoms of the
    // belief, score choices with per-combo arrival weights instead of one
    // averaged tree when the belief mixes over several strategies per player.
    let combos = belief_combos(game, beliefs)?;
    let score = |h: InfoSetId,
                 a: usize,
                 chosen: &BTreeMap<InfoSetId, usize>|
     -> Rational {
        let mut total = Rational::zero();
        for (w, combo) in &combos {
            // Arrival weight of each node of h under this combo only.
            let mut stack: Vec<(NodeId, Rational)> = vec![(game.root(), *w)];
            let mut weights: BTreeMap<NodeId, Rational> = BTreeMap::new();
            while let Some((id, weight)) = stack.pop() {
                if let Node::Decision { info_set, children } = game.node(id) {
                    if *info_set == h {
                        *weights.entry(id).or_insert(Rational::zero()) += weight;
                        continue;
                    }
                    let owner = game.info_set(*info_set).owner();
                    if owner == holder {
                        for child in children {
                            stack.push((*child, weight));
                        }
                    } else {
                        let d = combo[&owner]
                            .action_dist(*info_set)
                            .expect("validated strategy covers every owned set");
                        for (act, p) in d.atoms() {
                            stack.push((children[*act], weight * *p));
                        }
                    }
                }
            }
            let avg = |set: InfoSetId, act: usize| -> Rational {
                let owner = game.info_set(set).owner();
                combo[&owner]
                    .action_dist(set)
                    .map(|d| d.probability(&act))
                    .unwrap_or(Rational::zero())
            };
            for (node, weight) in weights {
                if let Node::Decision { children, .. } = game.node(node) {
                    total += weight * value(game, holder, chosen, &avg, children[a]);
                }
            }
        }
        total
    };

    for h in sets {
        let n = game.info_set(h).actions().len();
        let mut best_a = 0usize;
        // Seed with action 0 so unreachable sets (all scores zero) default
        // to the first action.
        chosen.insert(h, 0);
        let mut best_q = score(h, 0, &chosen);
        for a in 1..n {
            let q = score(h, a, &chosen);
            if q > best_q {
                best_q = q;
                best_a = a;
                chosen.insert(h, a);
            } else {
                chosen.insert(h, best_a);
            }
        }
        chosen.insert(h, best_a);
    }

    let strategy = PureStrategy::new(holder, chosen);
    let value = expected_utility_under_belief(game, beliefs, &strategy.clone().into())?;
    Ok((strategy, value))
}

/// Whether the strategy attains the best-response value against the beliefs.
pub fn is_best_response(
    game: &GameTree,
    beliefs: &Beliefs,
    strategy: &Strategy,
) -> Result<Verdict<(), ProfitableDeviation>, EquilibriumError> {
    let (br, br_value) = best_response(game, beliefs)?;
    let current = expected_utility_under_belief(game, beliefs, strategy)?;
    if current >= br_value {
        Ok(Verdict::Holds(()))
    } else {
        Ok(Verdict::Fails(ProfitableDeviation {
            player: beliefs.holder(),
            strategy: br,
            payoff: br_value,
            current_payoff: current,
        }))
    }
}

/// Nash check by direct deviation search: every strategic player's payoff
/// must match their best response against the others' true strategies.
pub fn check_nash(
    game: &GameTree,
    profile: &StrategyProfile,
) -> Result<Verdict<(), ProfitableDeviation>, EquilibriumError> {
    let payoffs = evaluate_profile(game, profile);
    for p in game.strategic_players() {
        let beliefs = Beliefs::correct(game, p, profile)?;
        let (br, br_value) = best_response(game, &beliefs)?;
        if payoffs[&p] < br_value {
            return Ok(Verdict::Fails(ProfitableDeviation {
                player: p,
                strategy: br,
                payoff: br_value,
                current_payoff: payoffs[&p],
            }));
        }
    }
    Ok(Verdict::Holds(()))
}

/// Beliefs justifying one player's part of a self-confirming profile: one
/// belief per support strategy of that player.
#[derive(Debug, Clone)]
pub struct PlayerJustification {
    pub player: PlayerId,
    pub beliefs: Vec<(PureStrategy, Beliefs)>,
}

/// Checks a self-confirming equilibrium claim with explicit beliefs: each
/// justification's strategy must (a) best-respond to its belief and (b) the
/// belief must put probability one on true behavior at every information
/// set reached when that strategy meets the true opponents.
pub fn check_sce(
    game: &GameTree,
    profile: &StrategyProfile,
    justifications: &[PlayerJustification],
) -> Result<Verdict<(), SelfConfirmingFailure>, EquilibriumError> {
    let by_player: BTreeMap<PlayerId, &PlayerJustification> =
        justifications.iter().map(|j| (j.player, j)).collect();
    for p in game.strategic_players() {
        let j = by_player.get(&p).ok_or_else(|| {
            EquilibriumError::EmptyBeliefSpace(game.player_name(p).to_string())
        })?;
        let support = support_strategies(game, profile.strategy(p));
        for s in &support {
            let (_, beliefs) = j
                .beliefs
                .iter()
                .find(|(js, _)| js == s)
                .ok_or_else(|| EquilibriumError::EmptyBeliefSpace(game.player_name(p).to_string()))?;
            match check_sce_for_strategy(game, profile, s, beliefs)? {
                Verdict::Holds(()) => {}
                Verdict::Fails(f) => return Ok(Verdict::Fails(f)),
            }
        }
    }
    Ok(Verdict::Holds(()))
}

/// The self-confirming conditions for one support strategy and one belief.
pub fn check_sce_for_strategy(
    game: &GameTree,
    profile: &StrategyProfile,
    strategy: &PureStrategy,
    beliefs: &Beliefs,
) -> Result<Verdict<(), SelfConfirmingFailure>, EquilibriumError> {
    beliefs.validate(game)?;
    let p = strategy.player();

    // (b) belief correctness on the reached sets.
    let reached = reached_with_strategy(game, profile, strategy)?;
    for h in &reached {
        let owner = game.info_set(*h).owner();
        if owner == p {
            continue;
        }
        let believed = beliefs.about(owner).expect("validated belief is complete");
        let truth = to_behavior(game, profile.strategy(owner))?;
        let truth_dist = truth
            .action_dist(*h)
            .expect("owner's strategy covers the reached set");
        let correct_here = believed.is_point_mass()
            && believed
                .as_point()
                .map(|b| b.action_dist(*h) == Some(truth_dist))
                .unwrap_or(false)
            || believed
                .atoms()
                .iter()
                .all(|(b, _)| b.action_dist(*h) == Some(truth_dist));
        if !correct_here {
            return Ok(Verdict::Fails(SelfConfirmingFailure::IncorrectBelief {
                player: p,
                about: owner,
                info_set: *h,
            }));
        }
    }

    // (a) best response to the belief.
    match is_best_response(game, beliefs, &strategy.clone().into())? {
        Verdict::Holds(()) => Ok(Verdict::Holds(())),
        Verdict::Fails(d) => Ok(Verdict::Fails(SelfConfirmingFailure::NotBestResponse {
            player: p,
            strategy: strategy.clone(),
            deviation: d,
        })),
    }
}

/// Information sets reached when `strategy` replaces its player's entry in
/// the profile and everyone else plays on.
fn reached_with_strategy(
    game: &GameTree,
    profile: &StrategyProfile,
    strategy: &PureStrategy,
) -> Result<BTreeSet<InfoSetId>, EquilibriumError> {
    let modified = profile.with_strategy(game, strategy.clone().into())?;
    Ok(reached_information_sets(game, &modified))
}

/// The pure strategies a strategy can realize: the support of a mixed
/// strategy, the strategy itself when pure, and the per-set product for a
/// behavior strategy.
pub fn support_strategies(game: &GameTree, strategy: &Strategy) -> Vec<PureStrategy> {
    match strategy {
        Strategy::Pure(s) => vec![s.clone()],
        Strategy::Mixed(m) => m.dist().support().cloned().collect(),
        Strategy::Behavior(b) => {
            let player = b.player();
            let sets: Vec<InfoSetId> = game.sets_of(player).collect();
            let mut out: Vec<BTreeMap<InfoSetId, usize>> = vec![BTreeMap::new()];
            for h in sets {
                let d = b.action_dist(h).expect("behavior strategy is total");
                let mut next = Vec::with_capacity(out.len() * d.atoms().len());
                for partial in &out {
                    for a in d.support() {
                        let mut partial = partial.clone();
                        partial.insert(h, *a);
                        next.push(partial);
                    }
                }
                out = next;
            }
            out.into_iter()
                .map(|choices| PureStrategy::new(player, choices))
                .collect()
        }
    }
}

/// A source of candidate beliefs for the self-confirming witness search.
///
/// Implementations yield, for a given player, support strategy, and true
/// profile, a finite or lazily unbounded sequence of beliefs to try. The
/// search accepts the first belief satisfying both self-confirming
/// conditions.
pub trait BeliefSpace {
    fn candidate_beliefs(
        &self,
        game: &GameTree,
        profile: &StrategyProfile,
        player: PlayerId,
        strategy: &PureStrategy,
    ) -> Box<dyn Iterator<Item = Beliefs> + '_>;
}

/// Searches for beliefs turning the profile into a self-confirming
/// equilibrium. The conditions decompose per player, so each player's
/// justification is searched independently; failure reports the player whose
/// candidates were exhausted (or the budget, counted per support strategy).
pub fn find_sce_witness(
    game: &GameTree,
    profile: &StrategyProfile,
    space: &dyn BeliefSpace,
    budget: usize,
) -> Result<Verdict<Vec<PlayerJustification>, SelfConfirmingFailure>, EquilibriumError> {
    let mut out = Vec::new();
    for p in game.strategic_players() {
        let support = support_strategies(game, profile.strategy(p));
        let mut beliefs = Vec::new();
        for s in support {
            let mut found = None;
            let mut last_failure = None;
            let mut tried = 0usize;
            for b in space.candidate_beliefs(game, profile, p, &s) {
                tried += 1;
                if tried > budget {
                    return Err(EquilibriumError::BudgetExceeded {
                        player: game.player_name(p).to_string(),
                        budget,
                    });
                }
                match check_sce_for_strategy(game, profile, &s, &b)? {
                    Verdict::Holds(()) => {
                        found = Some(b);
                        break;
                    }
                    Verdict::Fails(f) => last_failure = Some(f),
                }
            }
            match found {
                Some(b) => beliefs.push((s, b)),
                None => {
                    return match last_failure {
                        Some(f) => Ok(Verdict::Fails(f)),
                        None => Err(EquilibriumError::EmptyBeliefSpace(
                            game.player_name(p).to_string(),
                        )),
                    }
                }
            }
        }
        out.push(PlayerJustification { player: p, beliefs });
    }
    Ok(Verdict::Holds(out))
}

/// Which solution concept an enumeration targets.
pub enum Concept<'a> {
    Nash,
    SelfConfirming {
        space: &'a dyn BeliefSpace,
        belief_budget: usize,
    },
}

/// How profiles are enumerated.
///
/// `Full` ranges over every combination of total pure strategies. `Reduced`
/// enumerates one representative per on-path equivalence class: actions are
/// assigned only at information sets the assignment itself reaches (under
/// the fixed Nature behavior), and unreached sets take the canonical first
/// action. Two full profiles agreeing on reached sets produce identical
/// play, payoffs, and self-confirming verdicts, so the representative
/// answers for its class; Nash verdicts under `Reduced` refer to the
/// canonical completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    Full,
    Reduced,
}

/// Joint reduced profiles: every assignment of actions to exactly the
/// strategic information sets reached under the assignment itself, extended
/// by the first action at unreached sets. Generated in depth-first order,
/// branching at the first unassigned set the play encounters, so the output
/// is lexicographic in encounter order.
pub fn reduced_profiles(
    game: &GameTree,
    nature: Option<&BehaviorStrategy>,
    budget: usize,
) -> Result<Vec<BTreeMap<PlayerId, PureStrategy>>, EquilibriumError> {
    fn explore(
        game: &GameTree,
        nature: Option<&BehaviorStrategy>,
        mut stack: Vec<NodeId>,
        assignment: BTreeMap<InfoSetId, usize>,
        out: &mut Vec<BTreeMap<InfoSetId, usize>>,
        budget: usize,
    ) -> Result<(), EquilibriumError> {
        while let Some(id) = stack.pop() {
            let (info_set, children) = match game.node(id) {
                Node::Leaf { .. } => continue,
                Node::Decision { info_set, children } => (*info_set, children),
            };
            let owner = game.info_set(info_set).owner();
            if Some(owner) == game.nature() {
                let d = nature
                    .expect("presence of a Nature strategy is checked by the caller")
                    .action_dist(info_set)
                    .expect("a validated Nature strategy covers every owned set");
                for a in (0..children.len()).rev() {
                    if !d.probability(&a).is_zero() {
                        stack.push(children[a]);
                    }
                }
            } else if let Some(&a) = assignment.get(&info_set) {
                stack.push(children[a]);
            } else {
                for a in 0..children.len() {
                    let mut stack = stack.clone();
                    stack.push(children[a]);
                    let mut assignment = assignment.clone();
                    assignment.insert(info_set, a);
                    explore(game, nature, stack, assignment, out, budget)?;
                }
                return Ok(());
            }
        }
        if out.len() >= budget {
            return Err(EquilibriumError::EnumerationBudgetExceeded { budget });
        }
        out.push(assignment);
        Ok(())
    }

    let mut assignments = Vec::new();
    if let Some(n) = nature {
        n.validate(game)?;
    }
    explore(
        game,
        nature,
        vec![game.root()],
        BTreeMap::new(),
        &mut assignments,
        budget,
    )?;

    let players: Vec<PlayerId> = game.strategic_players().collect();
    Ok(assignments
        .into_iter()
        .map(|assignment| {
            players
                .iter()
                .map(|p| {
                    let choices = game
                        .sets_of(*p)
                        .map(|h| (h, assignment.get(&h).copied().unwrap_or(0)))
                        .collect();
                    (*p, PureStrategy::new(*p, choices))
                })
                .collect()
        })
        .collect())
}

/// One enumerated equilibrium: the profile (pure for every strategic
/// player), its payoffs, and for self-confirming concepts the justifying
/// beliefs.
#[derive(Debug, Clone)]
pub struct EnumeratedEquilibrium {
    pub strategies: BTreeMap<PlayerId, PureStrategy>,
    pub payoffs: BTreeMap<PlayerId, Rational>,
    pub justifications: Option<Vec<PlayerJustification>>,
}

/// Exhaustively enumerates pure-strategy equilibria of the game under a
/// fixed Nature behavior strategy.
///
/// Profiles are generated in lexicographic order (players by id, each
/// player's strategies ordered by [`all_pure_strategies`]). `budget` caps
/// the number of profiles inspected.
pub fn enumerate_equilibria(
    game: &GameTree,
    nature: Option<&BehaviorStrategy>,
    concept: &Concept<'_>,
    mode: EnumerationMode,
    budget: usize,
) -> Result<Vec<EnumeratedEquilibrium>, EquilibriumError> {
    match (game.nature(), nature) {
        (Some(_), Some(_)) | (None, None) => {}
        (Some(m), None) => {
            return Err(GameError::MissingStrategy(game.player_name(m).to_string()).into())
        }
        (None, Some(_)) => {
            return Err(GameError::Validation(
                "a Nature strategy was supplied but the game has no Nature player".into(),
            )
            .into())
        }
    }

    let players: Vec<PlayerId> = game.strategic_players().collect();
    let mut out = Vec::new();

    // Best-response values for the Nash concept in full mode are keyed by
    // (player index, other players' strategy indices), so each distinct
    // opponent combination is solved once.
    let mut br_cache: BTreeMap<(usize, Vec<usize>), Rational> = BTreeMap::new();

    let consider = |strategies: BTreeMap<PlayerId, PureStrategy>,
                        index: Option<&Vec<usize>>,
                        br_cache: &mut BTreeMap<(usize, Vec<usize>), Rational>,
                        out: &mut Vec<EnumeratedEquilibrium>|
     -> Result<(), EquilibriumError> {
        let mut listed: Vec<Strategy> = strategies
            .values()
            .map(|s| Strategy::Pure(s.clone()))
            .collect();
        if let Some(n) = nature {
            listed.push(Strategy::Behavior(n.clone()));
        }
        let profile = StrategyProfile::new(game, listed)?;

        let keep = match concept {
            Concept::Nash => {
                let payoffs = evaluate_profile(game, &profile);
                let mut all_best = true;
                for (k, p) in players.iter().enumerate() {
                    let br_value = match index {
                        Some(index) => {
                            let mut opp_key = index.clone();
                            opp_key.remove(k);
                            let key = (k, opp_key);
                            match br_cache.get(&key) {
                                Some(v) => *v,
                                None => {
                                    let beliefs = Beliefs::correct(game, *p, &profile)?;
                                    let (_, v) = best_response(game, &beliefs)?;
                                    br_cache.insert(key, v);
                                    v
                                }
                            }
                        }
                        None => {
                            let beliefs = Beliefs::correct(game, *p, &profile)?;
                            best_response(game, &beliefs)?.1
                        }
                    };
                    if payoffs[p] < br_value {
                        all_best = false;
                        break;
                    }
                }
                if all_best {
                    Some(None)
                } else {
                    None
                }
            }
            Concept::SelfConfirming {
                space,
                belief_budget,
            } => match find_sce_witness(game, &profile, *space, *belief_budget)? {
                Verdict::Holds(j) => Some(Some(j)),
                Verdict::Fails(_) => None,
            },
        };

        if let Some(justifications) = keep {
            let payoffs = evaluate_profile(game, &profile);
            out.push(EnumeratedEquilibrium {
                strategies,
                payoffs,
                justifications,
            });
        }
        Ok(())
    };

    match mode {
        EnumerationMode::Reduced => {
            for strategies in reduced_profiles(game, nature, budget)? {
                consider(strategies, None, &mut br_cache, &mut out)?;
            }
            Ok(out)
        }
        EnumerationMode::Full => {
            let candidates: Vec<Vec<PureStrategy>> = players
                .iter()
                .map(|p| all_pure_strategies(game, *p))
                .collect();
            if candidates.iter().any(|c| c.is_empty()) {
                return Ok(out);
            }
            let mut inspected = 0usize;
            let mut index = vec![0usize; players.len()];
            loop {
                inspected += 1;
                if inspected > budget {
                    return Err(EquilibriumError::EnumerationBudgetExceeded { budget });
                }
                let strategies: BTreeMap<PlayerId, PureStrategy> = players
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (*p, candidates[k][index[k]].clone()))
                    .collect();
                consider(strategies, Some(&index), &mut br_cache, &mut out)?;

                // Odometer, last player fastest.
                let mut k = players.len();
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    index[k] += 1;
                    if index[k] < candidates[k].len() {
                        break;
                    }
                    index[k] = 0;
                }
            }
        }
    }
}
