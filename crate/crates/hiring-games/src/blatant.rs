//! Blatant-unfairness detection over enumerated equilibrium sets.
//!
//! An equilibrium is blatantly unfair to a player when that player walks
//! away with nothing (payoff at most zero) even though the set contains an
//! alternative equilibrium that would have paid them, at no one else's
//! meaningful expense. Two forms: the two-player form demands an
//! alternative paying **both** players strictly positive amounts; the
//! multi-player form demands the flagged player gain strictly while every
//! other player either loses nothing or stays strictly positive.
//!
//! Both predicates search only within the supplied [`EquilibriumSet`], so
//! a negative verdict means "not flagged within the searched space", not a
//! proof that no wider equilibrium set would flag it. The set records the
//! solution concept it was enumerated under so reports can say which space
//! was searched.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::equilibrium::EnumeratedEquilibrium;
use crate::game::{
    evaluate_profile, BehaviorStrategy, GameError, GameTree, PlayerId, Strategy, StrategyProfile,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlatantError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("member index {index} out of range for a set of {len}")]
    MemberOutOfRange { index: usize, len: usize },
    #[error("{0} is not a payoff-bearing player of this game")]
    NotStrategic(String),
    #[error("the two-player form needs exactly two payoff-bearing players, this game has {0}")]
    NotTwoPlayer(usize),
    #[error("member {member} is missing a payoff for {player}")]
    MissingPayoff { member: usize, player: String },
    #[error("member {member}'s recorded payoffs do not match re-evaluation")]
    PayoffMismatch { member: usize },
}

/// The solution concept an equilibrium set was enumerated under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchedConcept {
    Nash,
    /// Self-confirming equilibria found through the named belief space.
    SelfConfirming { belief_space: String },
}

impl std::fmt::Display for SearchedConcept {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SearchedConcept::Nash => write!(f, "Nash"),
            SearchedConcept::SelfConfirming { belief_space } => {
                write!(f, "self-confirming ({belief_space} beliefs)")
            }
        }
    }
}

/// An enumerated equilibrium set, the domain both predicates quantify
/// over. Construction checks that every member carries a payoff for every
/// payoff-bearing player and, when the chance player's behavior is
/// supplied (or the game has none), that the recorded payoffs match
/// re-evaluation. Whether each member actually passes the named concept's
/// checker is the producer's responsibility; `enumerate_equilibria` output
/// satisfies it by construction.
#[derive(Debug, Clone)]
pub struct EquilibriumSet<'g> {
    game: &'g GameTree,
    concept: SearchedConcept,
    members: Vec<EnumeratedEquilibrium>,
}

impl<'g> EquilibriumSet<'g> {
    pub fn new(
        game: &'g GameTree,
        concept: SearchedConcept,
        members: Vec<EnumeratedEquilibrium>,
        nature: Option<&BehaviorStrategy>,
    ) -> Result<Self, BlatantError> {
        let strategic: Vec<PlayerId> = game.strategic_players().collect();
        for (i, m) in members.iter().enumerate() {
            for &p in &strategic {
                if !m.payoffs.contains_key(&p) {
                    return Err(BlatantError::MissingPayoff {
                        member: i,
                        player: game.player_name(p).to_string(),
                    });
                }
            }
            if game.nature().is_none() || nature.is_some() {
                let mut strategies: Vec<Strategy> =
                    m.strategies.values().cloned().map(Strategy::Pure).collect();
                if let Some(nb) = nature {
                    strategies.push(Strategy::Behavior(nb.clone()));
                }
                let profile = StrategyProfile::new(game, strategies)?;
                if evaluate_profile(game, &profile) != m.payoffs {
                    return Err(BlatantError::PayoffMismatch { member: i });
                }
            }
        }
        Ok(EquilibriumSet { game, concept, members })
    }

    pub fn game(&self) -> &GameTree {
        self.game
    }

    pub fn concept(&self) -> &SearchedConcept {
        &self.concept
    }

    pub fn members(&self) -> &[EnumeratedEquilibrium] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn member(&self, index: usize) -> Result<&EnumeratedEquilibrium, BlatantError> {
        self.members.get(index).ok_or(BlatantError::MemberOutOfRange {
            index,
            len: self.members.len(),
        })
    }

    fn require_strategic(&self, player: PlayerId) -> Result<(), BlatantError> {
        if self.game.strategic_players().any(|p| p == player) {
            Ok(())
        } else {
            let name = if self.game.players().any(|p| p == player) {
                self.game.player_name(player).to_string()
            } else {
                format!("{player:?}")
            };
            Err(BlatantError::NotStrategic(name))
        }
    }
}

/// Two-player form: `member` is blatantly unfair to `player` when the
/// player's payoff there is at most zero and some member of the set pays
/// both players strictly positive amounts. Returns the index of the first
/// such alternative, or None when not flagged within the searched set.
pub fn is_blatantly_unfair_two_player(
    set: &EquilibriumSet,
    member: usize,
    player: PlayerId,
) -> Result<Option<usize>, BlatantError> {
    let strategic: Vec<PlayerId> = set.game.strategic_players().collect();
    if strategic.len() != 2 {
        return Err(BlatantError::NotTwoPlayer(strategic.len()));
    }
    set.require_strategic(player)?;
    let eq = set.member(member)?;
    if eq.payoffs[&player].is_positive() {
        return Ok(None);
    }
    Ok(set
        .members
        .iter()
        .position(|alt| strategic.iter().all(|p| alt.payoffs[p].is_positive())))
}

/// Multi-player form: `member` is blatantly unfair to `player` when the
/// player's payoff there is at most zero and some member pays them
/// strictly positive while every other player either does at least as well
/// as under `member` or is strictly positive. Returns the first witness
/// index, or None when not flagged within the searched set.
pub fn is_blatantly_unfair_multi(
    set: &EquilibriumSet,
    member: usize,
    player: PlayerId,
) -> Result<Option<usize>, BlatantError> {
    set.require_strategic(player)?;
    let eq = set.member(member)?;
    if eq.payoffs[&player].is_positive() {
        return Ok(None);
    }
    let others: Vec<PlayerId> = set
        .game
        .strategic_players()
        .filter(|p| *p != player)
        .collect();
    Ok(set.members.iter().position(|alt| {
        alt.payoffs[&player].is_positive()
            && others
                .iter()
                .all(|j| alt.payoffs[j] >= eq.payoffs[j] || alt.payoffs[j].is_positive())
    }))
}

/// One flagged (equilibrium, player) pair with its witnessing alternative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlatantFinding {
    pub member: usize,
    pub player: PlayerId,
    pub witness: usize,
}

/// Applies the applicable form (two-player when the game has exactly two
/// payoff-bearing players, multi-player otherwise) to every (member,
/// player) pair, in ascending member then player order.
pub fn detect_blatant_unfairness(
    set: &EquilibriumSet,
) -> Result<Vec<BlatantFinding>, BlatantError> {
    let strategic: BTreeSet<PlayerId> = set.game.strategic_players().collect();
    let two_player = strategic.len() == 2;
    let mut findings = Vec::new();
    for member in 0..set.members.len() {
        for &player in &strategic {
            let witness = if two_player {
                is_blatantly_unfair_two_player(set, member, player)?
            } else {
                is_blatantly_unfair_multi(set, member, player)?
            };
            if let Some(witness) = witness {
                findings.push(BlatantFinding { member, player, witness });
            }
        }
    }
    Ok(findings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{enumerate_equilibria, Concept, EnumerationMode};
    use crate::market::{
        build_bilateral_market_with_offers, build_simultaneous_market_with_offers, offer_grid,
        GridBeliefSpace, HiringMarket, MarketCandidate, MarketSpec,
    };
    use crate::rational::{rat, Rational};

    fn sce_set<'m>(m: &'m HiringMarket) -> EquilibriumSet<'m> {
        let space = GridBeliefSpace::new(m);
        let nature = m.true_market_behavior();
        let members = enumerate_equilibria(
            m.game(),
            Some(&nature),
            &Concept::SelfConfirming { space: &space, belief_budget: 16 },
            EnumerationMode::Reduced,
            100_000,
        )
        .unwrap();
        EquilibriumSet::new(
            m.game(),
            SearchedConcept::SelfConfirming { belief_space: "grid".into() },
            members,
            Some(&nature),
        )
        .unwrap()
    }

    fn member_with_offers(
        m: &HiringMarket,
        set: &EquilibriumSet,
        offers: &[(&str, Rational)],
        matched: &[(&str, bool)],
    ) -> usize {
        let offers: std::collections::BTreeMap<String, Rational> =
            offers.iter().map(|(id, w)| (id.to_string(), *w)).collect();
        set.members()
            .iter()
            .position(|eq| {
                let firm = m.offers_of(&eq.strategies[&m.firm()]).unwrap();
                firm == offers
                    && matched.iter().all(|(id, want)| {
                        let p = m.candidate_player(id).unwrap();
                        let sets = m.candidate_sets(id).unwrap();
                        let h = sets[&offers[*id]];
                        (eq.strategies[&p].action_at(h).unwrap() == 0) == *want
                    })
            })
            .expect("expected equilibrium in the enumerated set")
    }

    #[test]
    fn low_offers_are_flagged_against_the_candidate() {
        let spec = MarketSpec::new(
            offer_grid(rat(3, 2)).unwrap(),
            rat(0, 1),
            vec![MarketCandidate::unit("x", rat(0, 1))],
        )
        .unwrap();
        let m = build_bilateral_market_with_offers(&spec, "x", &spec.grid().to_vec()).unwrap();
        let set = sce_set(&m);
        let candidate = m.candidate_player("x").unwrap();

        // accepts at 0, 3/2, 3 and the reject at 0 are all self-confirming.
        assert_eq!(set.len(), 4);

        let zero_accept = member_with_offers(&m, &set, &[("x", rat(0, 1))], &[("x", true)]);
        let good = member_with_offers(&m, &set, &[("x", rat(3, 2))], &[("x", true)]);
        let top = member_with_offers(&m, &set, &[("x", rat(3, 1))], &[("x", true)]);

        let w = is_blatantly_unfair_two_player(&set, zero_accept, candidate).unwrap();
        assert_eq!(w, Some(good));
        // the candidate does fine at the top offer; the firm does not.
        assert_eq!(is_blatantly_unfair_two_player(&set, top, candidate).unwrap(), None);
        assert_eq!(
            is_blatantly_unfair_two_player(&set, top, m.firm()).unwrap(),
            Some(good)
        );
        assert_eq!(is_blatantly_unfair_two_player(&set, good, candidate).unwrap(), None);
        assert_eq!(is_blatantly_unfair_two_player(&set, good, m.firm()).unwrap(), None);

        // the two forms agree member by member on this two-player set.
        for i in 0..set.len() {
            for p in [m.firm(), candidate] {
                assert_eq!(
                    is_blatantly_unfair_two_player(&set, i, p).unwrap().is_some(),
                    is_blatantly_unfair_multi(&set, i, p).unwrap().is_some()
                );
            }
        }

        let findings = detect_blatant_unfairness(&set).unwrap();
        // flagged: candidate at (0, accept), candidate at (0, reject),
        // firm at (3, accept).
        assert_eq!(findings.len(), 3);
        assert!(findings.iter().all(|f| f.witness == good));
    }

    #[test]
    fn no_both_positive_alternative_means_no_flags() {
        // Only the top offer is available and the market pays everyone
        // their ceiling: the firm always ends at -1, the candidate at 2.
        let spec = MarketSpec::new(
            offer_grid(rat(3, 2)).unwrap(),
            rat(3, 1),
            vec![MarketCandidate::unit("x", rat(3, 1))],
        )
        .unwrap();
        let m = build_bilateral_market_with_offers(&spec, "x", &[rat(3, 1)]).unwrap();
        let set = sce_set(&m);
        assert_eq!(set.len(), 2);
        for i in 0..set.len() {
            for p in [m.firm(), m.candidate_player("x").unwrap()] {
                assert_eq!(is_blatantly_unfair_two_player(&set, i, p).unwrap(), None);
            }
        }
        assert!(detect_blatant_unfairness(&set).unwrap().is_empty());
    }

    #[test]
    fn multi_form_flags_the_lowballed_candidate() {
        let spec = MarketSpec::new(
            offer_grid(rat(3, 2)).unwrap(),
            rat(0, 1),
            vec![MarketCandidate::unit("x1", rat(0, 1)), MarketCandidate::unit("x2", rat(0, 1))],
        )
        .unwrap();
        let m =
            build_simultaneous_market_with_offers(&spec, &[rat(0, 1), rat(3, 2)]).unwrap();
        let set = sce_set(&m);
        let x1 = m.candidate_player("x1").unwrap();

        let split = member_with_offers(
            &m,
            &set,
            &[("x1", rat(0, 1)), ("x2", rat(3, 2))],
            &[("x1", true), ("x2", true)],
        );
        let fair = member_with_offers(
            &m,
            &set,
            &[("x1", rat(3, 2)), ("x2", rat(3, 2))],
            &[("x1", true), ("x2", true)],
        );

        // x1 earns -1 in the split equilibrium; paying both 3/2 hands x1
        // 1/2, keeps x2 at 1/2, and leaves the firm strictly positive.
        let w = is_blatantly_unfair_multi(&set, split, x1).unwrap();
        assert!(w.is_some());
        let alt = &set.members()[w.unwrap()];
        assert!(alt.payoffs[&x1].is_positive());
        let _ = fair;

        assert!(matches!(
            is_blatantly_unfair_two_player(&set, split, x1),
            Err(BlatantError::NotTwoPlayer(3))
        ));
    }

    #[test]
    fn argument_validation() {
        let spec = MarketSpec::new(
            offer_grid(rat(3, 2)).unwrap(),
            rat(0, 1),
            vec![MarketCandidate::unit("x", rat(0, 1))],
        )
        .unwrap();
        let m = build_bilateral_market_with_offers(&spec, "x", &[rat(0, 1)]).unwrap();
        let set = sce_set(&m);
        assert!(matches!(
            is_blatantly_unfair_multi(&set, set.len() + 5, m.firm()),
            Err(BlatantError::MemberOutOfRange { .. })
        ));
        assert!(matches!(
            is_blatantly_unfair_multi(&set, 0, m.market_player()),
            Err(BlatantError::NotStrategic(_))
        ));
    }

    #[test]
    fn empty_set_detects_nothing() {
        let spec = MarketSpec::new(
            offer_grid(rat(3, 2)).unwrap(),
            rat(0, 1),
            vec![MarketCandidate::unit("x", rat(0, 1))],
        )
        .unwrap();
        let m = build_bilateral_market_with_offers(&spec, "x", &[rat(0, 1)]).unwrap();
        let set = EquilibriumSet::new(
            m.game(),
            SearchedConcept::Nash,
            Vec::new(),
            Some(&m.true_market_behavior()),
        )
        .unwrap();
        assert!(detect_blatant_unfairness(&set).unwrap().is_empty());
    }
}
