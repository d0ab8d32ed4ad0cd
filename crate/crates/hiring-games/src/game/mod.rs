//! Finite extensive-form games with explicit trees and information sets.
//!
//! A [`GameTree`] is an arena of decision nodes and leaves. Each decision
//! node belongs to exactly one information set; the set's owner cannot
//! distinguish nodes within it, so strategies choose per information set,
//! never per node. One player may be designated as Nature (here: the
//! market); Nature carries no payoffs and its fixed behavior strategy is
//! supplied as part of a profile.
//!
//! Trees are validated at construction: every node is reachable exactly
//! once from the root, action lists agree across an information set, leaf
//! payoffs cover exactly the non-Nature players, and every player has
//! perfect recall (all nodes in an information set share the same history
//! of the owner's own past actions).

mod eval;
mod strategy;

pub use eval::{evaluate_profile, outcome_distribution, reached_information_sets};
pub use strategy::{
    all_pure_strategies, to_behavior, BehaviorStrategy, MixedStrategy, PureStrategy,
    ResolvedStrategy, Strategy, StrategyProfile,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid game structure: {0}")]
    Validation(String),
    #[error("player {player} lacks perfect recall at information set {info_set}")]
    PerfectRecall { player: String, info_set: usize },
    #[error("profile is missing a strategy for player {0}")]
    MissingStrategy(String),
    #[error("strategy for {player} belongs to {actual}")]
    WrongPlayer { player: String, actual: String },
    #[error("strategy for {player} does not cover information set {info_set}")]
    StrategyNotTotal { player: String, info_set: usize },
    #[error("action {action} is not available at information set {info_set}")]
    ActionUnavailable { info_set: usize, action: usize },
    #[error("Nature's strategy must be a behavior strategy")]
    NatureNotBehavior,
}

/// Index of a player within a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(pub(crate) usize);

impl PlayerId {
    pub fn index(&self) -> usize {
        self.0
    }
}

/// Index of an information set within a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSetId(pub(crate) usize);

impl InfoSetId {
    pub fn index(&self) -> usize {
        self.0
    }
}

/// Index of a node within a game's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(&self) -> usize {
        self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PlayerDef {
    pub name: String,
}

/// An information set: its owner, the common action labels of its nodes,
/// and the owner's own action history leading to it.
#[derive(Debug, Clone)]
pub struct InfoSet {
    pub(crate) owner: PlayerId,
    pub(crate) actions: Vec<String>,
    pub(crate) nodes: Vec<NodeId>,
    /// The owner's past (information set, action) pairs on every path into
    /// this set; equal across the set's nodes by perfect recall.
    pub(crate) own_history: Vec<(InfoSetId, usize)>,
}

impl InfoSet {
    pub fn owner(&self) -> PlayerId {
        self.owner
    }
    pub fn actions(&self) -> &[String] {
        &self.actions
    }
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }
    pub fn own_history(&self) -> &[(InfoSetId, usize)] {
        &self.own_history
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Decision {
        info_set: InfoSetId,
        children: Vec<NodeId>,
    },
    Leaf {
        /// Sorted by player; covers exactly the non-Nature players.
        payoffs: Vec<(PlayerId, Rational)>,
    },
}

/// A validated extensive-form game tree.
#[derive(Debug, Clone)]
pub struct GameTree {
    players: Vec<PlayerDef>,
    nature: Option<PlayerId>,
    info_sets: Vec<InfoSet>,
    nodes: Vec<Node>,
    root: NodeId,
}

impl GameTree {
    pub fn players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        (0..self.players.len()).map(PlayerId)
    }

    /// Players that carry payoffs, i.e. everyone but Nature.
    pub fn strategic_players(&self) -> impl Iterator<Item = PlayerId> + '_ {
        let nature = self.nature;
        self.players().filter(move |p| Some(*p) != nature)
    }

    pub fn nature(&self) -> Option<PlayerId> {
        self.nature
    }

    pub fn player_name(&self, p: PlayerId) -> &str {
        &self.players[p.0].name
    }

    pub fn player_by_name(&self, name: &str) -> Option<PlayerId> {
        self.players
            .iter()
            .position(|d| d.name == name)
            .map(PlayerId)
    }

    pub fn info_set(&self, h: InfoSetId) -> &InfoSet {
        &self.info_sets[h.0]
    }

    pub fn info_sets(&self) -> impl Iterator<Item = (InfoSetId, &InfoSet)> {
        self.info_sets
            .iter()
            .enumerate()
            .map(|(i, s)| (InfoSetId(i), s))
    }

    /// Information sets owned by a player, in id order.
    pub fn sets_of(&self, player: PlayerId) -> impl Iterator<Item = InfoSetId> + '_ {
        self.info_sets()
            .filter(move |(_, s)| s.owner == player)
            .map(|(id, _)| id)
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.0]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_payoff(&self, n: NodeId, player: PlayerId) -> Option<Rational> {
        match self.node(n) {
            Node::Leaf { payoffs } => payoffs
                .iter()
                .find(|(p, _)| *p == player)
                .map(|(_, u)| *u),
            Node::Decision { .. } => None,
        }
    }
}

/// Incremental builder for [`GameTree`]. Nodes are created bottom-up (leaves
/// first), then `build` runs the structural validation.
pub struct GameBuilder {
    players: Vec<PlayerDef>,
    nature: Option<PlayerId>,
    info_sets: Vec<(PlayerId, Vec<String>)>,
    nodes: Vec<Node>,
}

impl GameBuilder {
    pub fn new() -> Self {
        GameBuilder {
            players: Vec::new(),
            nature: None,
            info_sets: Vec::new(),
            nodes: Vec::new(),
        }
    }

    pub fn add_player(&mut self, name: &str) -> PlayerId {
        self.players.push(PlayerDef {
            name: name.to_string(),
        });
        PlayerId(self.players.len() - 1)
    }

    /// Adds the Nature player. At most one is allowed.
    pub fn add_nature(&mut self, name: &str) -> Result<PlayerId, GameError> {
        if self.nature.is_some() {
            return Err(GameError::Validation(
                "a game may have at most one Nature player".into(),
            ));
        }
        let id = self.add_player(name);
        self.nature = Some(id);
        Ok(id)
    }

    pub fn add_info_set(&mut self, owner: PlayerId, actions: Vec<String>) -> InfoSetId {
        self.info_sets.push((owner, actions));
        InfoSetId(self.info_sets.len() - 1)
    }

    pub fn leaf(&mut self, payoffs: Vec<(PlayerId, Rational)>) -> NodeId {
        let mut payoffs = payoffs;
        payoffs.sort_by_key(|(p, _)| *p);
        self.nodes.push(Node::Leaf { payoffs });
        NodeId(self.nodes.len() - 1)
    }

    pub fn decision(&mut self, info_set: InfoSetId, children: Vec<NodeId>) -> NodeId {
        self.nodes.push(Node::Decision { info_set, children });
        NodeId(self.nodes.len() - 1)
    }

    pub fn build(self, root: NodeId) -> Result<GameTree, GameError> {
        let GameBuilder {
            players,
            nature,
            info_sets,
            nodes,
        } = self;
        if root.0 >= nodes.len() {
            return Err(GameError::Validation("root node does not exist".into()));
        }

        let mut sets: Vec<InfoSet> = info_sets
            .into_iter()
            .map(|(owner, actions)| {
                if owner.0 >= players.len() {
                    return Err(GameError::Validation(
                        "information set owned by unknown player".into(),
                    ));
                }
                if actions.is_empty() {
                    return Err(GameError::Validation(
                        "information set with no actions".into(),
                    ));
                }
                Ok(InfoSet {
                    owner,
                    actions,
                    nodes: Vec::new(),
                    own_history: Vec::new(),
                })
            })
            .collect::<Result<_, _>>()?;

        // Walk the tree: check single-parenthood, fill set membership, and
        // record each node's per-player own history for the recall check.
        let mut seen = vec![false; nodes.len()];
        let mut histories: Vec<Option<BTreeMap<PlayerId, Vec<(InfoSetId, usize)>>>> =
            vec![None; nodes.len()];
        let mut stack = vec![(root, BTreeMap::new())];
        while let Some((id, hist)) = stack.pop() {
            if seen[id.0] {
                return Err(GameError::Validation(format!(
                    "node {} has multiple parents; the game must be a tree",
                    id.0
                )));
            }
            seen[id.0] = true;
            match &nodes[id.0] {
                Node::Leaf { payoffs } => {
                    let expected: Vec<PlayerId> = (0..players.len())
                        .map(PlayerId)
                        .filter(|p| Some(*p) != nature)
                        .collect();
                    let actual: Vec<PlayerId> = payoffs.iter().map(|(p, _)| *p).collect();
                    if actual != expected {
                        return Err(GameError::Validation(format!(
                            "leaf {} must assign payoffs to exactly the non-Nature players",
                            id.0
                        )));
                    }
                }
                Node::Decision { info_set, children } => {
                    let set = sets.get_mut(info_set.0).ok_or_else(|| {
                        GameError::Validation(format!("node {} uses unknown information set", id.0))
                    })?;
                    if children.len() != set.actions.len() {
                        return Err(GameError::Validation(format!(
                            "node {} has {} children but its information set has {} actions",
                            id.0,
                            children.len(),
                            set.actions.len()
                        )));
                    }
                    set.nodes.push(id);
                    let owner = set.owner;
                    for (ix, child) in children.iter().enumerate() {
                        if child.0 >= nodes.len() {
                            return Err(GameError::Validation(format!(
                                "node {} references unknown child",
                                id.0
                            )));
                        }
                        let mut child_hist = hist.clone();
                        child_hist
                            .entry(owner)
                            .or_insert_with(Vec::new)
                            .push((*info_set, ix));
                        stack.push((*child, child_hist));
                    }
                }
            }
            histories[id.0] = Some(hist_for_node(&nodes[id.0], &hist));
        }
        if !seen.iter().all(|s| *s) {
            return Err(GameError::Validation(
                "every node must be reachable from the root".into(),
            ));
        }

        // Perfect recall: within a set, all nodes share the owner's own history.
        for (ix, set) in sets.iter_mut().enumerate() {
            if set.nodes.is_empty() {
                return Err(GameError::Validation(format!(
                    "information set {ix} has no nodes"
                )));
            }
            set.nodes.sort();
            let owner = set.owner;
            let reference = histories[set.nodes[0].0]
                .as_ref()
                .and_then(|h| h.get(&owner).cloned())
                .unwrap_or_default();
            for n in &set.nodes {
                let h = histories[n.0]
                    .as_ref()
                    .and_then(|h| h.get(&owner).cloned())
                    .unwrap_or_default();
                if h != reference {
                    return Err(GameError::PerfectRecall {
                        player: players[owner.0].name.clone(),
                        info_set: ix,
                    });
                }
            }
            set.own_history = reference;
        }

        Ok(GameTree {
            players,
            nature,
            info_sets: sets,
            nodes,
            root,
        })
    }
}

impl Default for GameBuilder {
    fn default() -> Self {
        GameBuilder::new()
    }
}

fn hist_for_node(
    _node: &Node,
    hist: &BTreeMap<PlayerId, Vec<(InfoSetId, usize)>>,
) -> BTreeMap<PlayerId, Vec<(InfoSetId, usize)>> {
    hist.clone()
}
