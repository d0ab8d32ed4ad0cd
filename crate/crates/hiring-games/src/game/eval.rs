//! Exact evaluation of strategy profiles.

use std::collections::{BTreeMap, BTreeSet};

use crate::dist::Distribution;
use crate::game::{
    GameTree, InfoSetId, Node, NodeId, PlayerId, ResolvedStrategy, Strategy, StrategyProfile,
};
use crate::rational::Rational;

/// Expands every mixed entry into its pure support, returning weighted
/// combinations of resolved (pure or behavior) strategies whose weights sum
/// to one.
pub(crate) fn expand_profile<'a>(
    profile: &'a StrategyProfile,
) -> Vec<(Rational, BTreeMap<PlayerId, ResolvedStrategy<'a>>)> {
    let mut combos: Vec<(Rational, BTreeMap<PlayerId, ResolvedStrategy<'a>>)> =
        vec![(Rational::one(), BTreeMap::new())];
    for (p, strategy) in profile.strategies() {
        match strategy {
            Strategy::Pure(s) => {
                for (_, combo) in combos.iter_mut() {
                    combo.insert(*p, ResolvedStrategy::Pure(s));
                }
            }
            Strategy::Behavior(b) => {
                for (_, combo) in combos.iter_mut() {
                    combo.insert(*p, ResolvedStrategy::Behavior(b));
                }
            }
            Strategy::Mixed(m) => {
                let mut next = Vec::with_capacity(combos.len() * m.dist().atoms().len());
                for (w, combo) in &combos {
                    for (s, q) in m.dist().atoms() {
                        let mut combo = combo.clone();
                        combo.insert(*p, ResolvedStrategy::Pure(s));
                        next.push((*w * *q, combo));
                    }
                }
                combos = next;
            }
        }
    }
    combos
}

/// Walks the tree under one resolved combination, calling `visit_set` on
/// every decision node reached with positive probability and `emit` with the
/// arrival probability of every leaf reached.
fn walk(
    game: &GameTree,
    combo: &BTreeMap<PlayerId, ResolvedStrategy<'_>>,
    node: NodeId,
    weight: Rational,
    visit_set: &mut impl FnMut(InfoSetId),
    emit: &mut impl FnMut(NodeId, Rational),
) {
    match game.node(node) {
        Node::Leaf { .. } => emit(node, weight),
        Node::Decision { info_set, children } => {
            visit_set(*info_set);
            let owner = game.info_set(*info_set).owner();
            match combo[&owner] {
                ResolvedStrategy::Pure(s) => {
                    let a = s
                        .action_at(*info_set)
                        .expect("validated strategy covers every owned set");
                    walk(game, combo, children[a], weight, visit_set, emit);
                }
                ResolvedStrategy::Behavior(b) => {
                    let d = b
                        .action_dist(*info_set)
                        .expect("validated strategy covers every owned set");
                    for (a, p) in d.atoms() {
                        walk(game, combo, children[*a], weight * *p, visit_set, emit);
                    }
                }
            }
        }
    }
}

/// Expected payoff of every strategic player under the profile.
///
/// The profile must have been validated against this game.
pub fn evaluate_profile(
    game: &GameTree,
    profile: &StrategyProfile,
) -> BTreeMap<PlayerId, Rational> {
    let mut totals: BTreeMap<PlayerId, Rational> = game
        .strategic_players()
        .map(|p| (p, Rational::zero()))
        .collect();
    for (w, combo) in expand_profile(profile) {
        walk(
            game,
            &combo,
            game.root(),
            w,
            &mut |_| {},
            &mut |leaf, prob| {
                if let Node::Leaf { payoffs } = game.node(leaf) {
                    for (p, u) in payoffs {
                        *totals.get_mut(p).unwrap() += prob * *u;
                    }
                }
            },
        );
    }
    totals
}

/// The distribution over terminal nodes induced by the profile.
pub fn outcome_distribution(game: &GameTree, profile: &StrategyProfile) -> Distribution<NodeId> {
    let mut probs: BTreeMap<NodeId, Rational> = BTreeMap::new();
    for (w, combo) in expand_profile(profile) {
        walk(
            game,
            &combo,
            game.root(),
            w,
            &mut |_| {},
            &mut |leaf, prob| {
                *probs.entry(leaf).or_insert(Rational::zero()) += prob;
            },
        );
    }
    Distribution::new(probs.into_iter().collect::<Vec<_>>())
        .expect("leaf arrival probabilities sum to one")
}

/// Information sets that contain a node reached with positive probability
/// under the profile. Nature's sets count like any other player's.
pub fn reached_information_sets(
    game: &GameTree,
    profile: &StrategyProfile,
) -> BTreeSet<InfoSetId> {
    let mut reached = BTreeSet::new();
    for (_, combo) in expand_profile(profile) {
        walk(
            game,
            &combo,
            game.root(),
            Rational::one(),
            &mut |h| {
                reached.insert(h);
            },
            &mut |_, _| {},
        );
    }
    reached
}
