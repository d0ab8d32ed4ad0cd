//! Pure, mixed, and behavior strategies, and whole-game profiles.

use std::collections::BTreeMap;

use crate::dist::Distribution;
use crate::game::{GameError, GameTree, InfoSetId, PlayerId};
use crate::rational::Rational;

/// One action index per information set the player owns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PureStrategy {
    player: PlayerId,
    choices: BTreeMap<InfoSetId, usize>,
}

impl PureStrategy {
    pub fn new(player: PlayerId, choices: BTreeMap<InfoSetId, usize>) -> Self {
        PureStrategy { player, choices }
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn action_at(&self, h: InfoSetId) -> Option<usize> {
        self.choices.get(&h).copied()
    }

    pub fn choices(&self) -> &BTreeMap<InfoSetId, usize> {
        &self.choices
    }

    pub(crate) fn validate(&self, game: &GameTree) -> Result<(), GameError> {
        for h in game.sets_of(self.player) {
            match self.choices.get(&h) {
                None => {
                    return Err(GameError::StrategyNotTotal {
                        player: game.player_name(self.player).to_string(),
                        info_set: h.index(),
                    })
                }
                Some(&a) if a >= game.info_set(h).actions().len() => {
                    return Err(GameError::ActionUnavailable {
                        info_set: h.index(),
                        action: a,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// A probability distribution over the player's pure strategies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MixedStrategy {
    player: PlayerId,
    dist: Distribution<PureStrategy>,
}

impl MixedStrategy {
    pub fn new(player: PlayerId, dist: Distribution<PureStrategy>) -> Self {
        MixedStrategy { player, dist }
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn dist(&self) -> &Distribution<PureStrategy> {
        &self.dist
    }

    fn validate(&self, game: &GameTree) -> Result<(), GameError> {
        for s in self.dist.support() {
            if s.player() != self.player {
                return Err(GameError::WrongPlayer {
                    player: game.player_name(self.player).to_string(),
                    actual: game.player_name(s.player()).to_string(),
                });
            }
            s.validate(game)?;
        }
        Ok(())
    }
}

/// An independent action distribution at each owned information set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BehaviorStrategy {
    player: PlayerId,
    choices: BTreeMap<InfoSetId, Distribution<usize>>,
}

impl BehaviorStrategy {
    pub fn new(player: PlayerId, choices: BTreeMap<InfoSetId, Distribution<usize>>) -> Self {
        BehaviorStrategy { player, choices }
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn action_dist(&self, h: InfoSetId) -> Option<&Distribution<usize>> {
        self.choices.get(&h)
    }

    pub fn choices(&self) -> &BTreeMap<InfoSetId, Distribution<usize>> {
        &self.choices
    }

    pub(crate) fn validate(&self, game: &GameTree) -> Result<(), GameError> {
        for h in game.sets_of(self.player) {
            match self.choices.get(&h) {
                None => {
                    return Err(GameError::StrategyNotTotal {
                        player: game.player_name(self.player).to_string(),
                        info_set: h.index(),
                    })
                }
                Some(d) => {
                    let n = game.info_set(h).actions().len();
                    if let Some(&a) = d.support().find(|&&a| a >= n) {
                        return Err(GameError::ActionUnavailable {
                            info_set: h.index(),
                            action: a,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Pure(PureStrategy),
    Mixed(MixedStrategy),
    Behavior(BehaviorStrategy),
}

impl Strategy {
    pub fn player(&self) -> PlayerId {
        match self {
            Strategy::Pure(s) => s.player(),
            Strategy::Mixed(s) => s.player(),
            Strategy::Behavior(s) => s.player(),
        }
    }
}

impl From<PureStrategy> for Strategy {
    fn from(s: PureStrategy) -> Self {
        Strategy::Pure(s)
    }
}
impl From<MixedStrategy> for Strategy {
    fn from(s: MixedStrategy) -> Self {
        Strategy::Mixed(s)
    }
}
impl From<BehaviorStrategy> for Strategy {
    fn from(s: BehaviorStrategy) -> Self {
        Strategy::Behavior(s)
    }
}

/// A borrowed strategy with any mixing already expanded away, used by the
/// evaluator after enumerating mixed-strategy supports.
#[derive(Debug, Clone, Copy)]
pub enum ResolvedStrategy<'a> {
    Pure(&'a PureStrategy),
    Behavior(&'a BehaviorStrategy),
}

/// One strategy per player, Nature included when the game has it.
#[derive(Debug, Clone)]
pub struct StrategyProfile {
    strategies: BTreeMap<PlayerId, Strategy>,
}

impl StrategyProfile {
    /// Validates totality, ownership, coverage of every player exactly once,
    /// and that Nature's entry (if any) is a behavior strategy.
    pub fn new(game: &GameTree, strategies: Vec<Strategy>) -> Result<Self, GameError> {
        let mut map = BTreeMap::new();
        for s in strategies {
            let p = s.player();
            match &s {
                Strategy::Pure(s) => s.validate(game)?,
                Strategy::Mixed(s) => s.validate(game)?,
                Strategy::Behavior(s) => s.validate(game)?,
            }
            if map.insert(p, s).is_some() {
                return Err(GameError::Validation(format!(
                    "profile contains two strategies for player {}",
                    game.player_name(p)
                )));
            }
        }
        for p in game.players() {
            if !map.contains_key(&p) {
                return Err(GameError::MissingStrategy(
                    game.player_name(p).to_string(),
                ));
            }
        }
        if let Some(m) = game.nature() {
            if !matches!(map.get(&m), Some(Strategy::Behavior(_))) {
                return Err(GameError::NatureNotBehavior);
            }
        }
        Ok(StrategyProfile { strategies: map })
    }

    pub fn strategy(&self, p: PlayerId) -> &Strategy {
        &self.strategies[&p]
    }

    pub fn strategies(&self) -> &BTreeMap<PlayerId, Strategy> {
        &self.strategies
    }

    /// A copy of the profile with one player's strategy swapped out.
    pub fn with_strategy(
        &self,
        game: &GameTree,
        replacement: Strategy,
    ) -> Result<StrategyProfile, GameError> {
        let mut strategies: Vec<Strategy> = Vec::new();
        for (p, s) in &self.strategies {
            if *p == replacement.player() {
                continue;
            }
            strategies.push(s.clone());
        }
        strategies.push(replacement);
        StrategyProfile::new(game, strategies)
    }
}

/// Converts any strategy to an outcome-equivalent behavior strategy.
///
/// For a mixed strategy the action distribution at an information set h is
/// the support-weighted frequency among the pure strategies consistent with
/// the owner's own action history into h. If no support strategy is
/// consistent (h cannot be reached given the mix), the convention is a point
/// mass on the first action; any choice there leaves outcomes unchanged.
pub fn to_behavior(game: &GameTree, strategy: &Strategy) -> Result<BehaviorStrategy, GameError> {
    match strategy {
        Strategy::Behavior(b) => {
            b.validate(game)?;
            Ok(b.clone())
        }
        Strategy::Pure(s) => {
            s.validate(game)?;
            let mut choices = BTreeMap::new();
            for h in game.sets_of(s.player()) {
                choices.insert(h, Distribution::point(s.action_at(h).unwrap()));
            }
            Ok(BehaviorStrategy::new(s.player(), choices))
        }
        Strategy::Mixed(m) => {
            m.validate(game)?;
            let player = m.player();
            let mut choices = BTreeMap::new();
            for h in game.sets_of(player) {
                let hist = game.info_set(h).own_history().to_vec();
                let consistent = |s: &PureStrategy| {
                    hist.iter().all(|(h2, a2)| s.action_at(*h2) == Some(*a2))
                };
                let mut denom = Rational::zero();
                let mut by_action: BTreeMap<usize, Rational> = BTreeMap::new();
                for (s, p) in m.dist().atoms() {
                    if consistent(s) {
                        denom += *p;
                        *by_action
                            .entry(s.action_at(h).unwrap())
                            .or_insert(Rational::zero()) += *p;
                    }
                }
                let dist = if denom.is_zero() {
                    Distribution::point(0)
                } else {
                    Distribution::new(
                        by_action
                            .into_iter()
                            .map(|(a, p)| (a, p.checked_div(&denom).unwrap()))
                            .collect::<Vec<_>>(),
                    )
                    .expect("consistent support frequencies form a distribution")
                };
                choices.insert(h, dist);
            }
            Ok(BehaviorStrategy::new(player, choices))
        }
    }
}

/// Every pure strategy of a player, ordered lexicographically by
/// (information set id, action index).
pub fn all_pure_strategies(game: &GameTree, player: PlayerId) -> Vec<PureStrategy> {
    let sets: Vec<InfoSetId> = game.sets_of(player).collect();
    let sizes: Vec<usize> = sets
        .iter()
        .map(|h| game.info_set(*h).actions().len())
        .collect();
    let mut out = Vec::new();
    let mut current = vec![0usize; sets.len()];
    loop {
        let choices: BTreeMap<InfoSetId, usize> =
            sets.iter().copied().zip(current.iter().copied()).collect();
        out.push(PureStrategy::new(player, choices));
        // Odometer increment, last set fastest.
        let mut i = sets.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < sizes[i] {
                break;
            }
            current[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameBuilder;
    use crate::rational::rat;

    fn one_player_two_sets() -> (GameTree, PlayerId, InfoSetId, InfoSetId) {
        let mut b = GameBuilder::new();
        let p = b.add_player("p");
        let h1 = b.add_info_set(p, vec!["l".into(), "r".into()]);
        let h2 = b.add_info_set(p, vec!["a".into(), "b".into()]);
        let l: Vec<_> = (0..3).map(|i| b.leaf(vec![(p, rat(i, 1))])).collect();
        let n = b.decision(h2, vec![l[0], l[1]]);
        let root = b.decision(h1, vec![n, l[2]]);
        (b.build(root).unwrap(), p, h1, h2)
    }

    #[test]
    fn pure_strategy_enumeration_is_lexicographic() {
        let (g, p, h1, h2) = one_player_two_sets();
        let all = all_pure_strategies(&g, p);
        assert_eq!(all.len(), 4);
        assert_eq!(all[0].action_at(h1), Some(0));
        assert_eq!(all[0].action_at(h2), Some(0));
        assert_eq!(all[1].action_at(h1), Some(0));
        assert_eq!(all[1].action_at(h2), Some(1));
        assert_eq!(all[3].action_at(h1), Some(1));
    }

    #[test]
    fn profile_requires_every_player() {
        let mut b = GameBuilder::new();
        let p1 = b.add_player("one");
        let p2 = b.add_player("two");
        let h1 = b.add_info_set(p1, vec!["l".into(), "r".into()]);
        let h2 = b.add_info_set(p2, vec!["a".into(), "b".into()]);
        let pay = |b: &mut GameBuilder| b.leaf(vec![(p1, rat(0, 1)), (p2, rat(0, 1))]);
        let l1 = pay(&mut b);
        let l2 = pay(&mut b);
        let l3 = pay(&mut b);
        let n = b.decision(h2, vec![l1, l2]);
        let root = b.decision(h1, vec![n, l3]);
        let g = b.build(root).unwrap();

        let s1 = PureStrategy::new(p1, [(h1, 0)].into_iter().collect());
        assert!(matches!(
            StrategyProfile::new(&g, vec![s1.clone().into()]),
            Err(GameError::MissingStrategy(_))
        ));
        let s2 = PureStrategy::new(p2, [(h2, 1)].into_iter().collect());
        assert!(StrategyProfile::new(&g, vec![s1.into(), s2.into()]).is_ok());
    }

    #[test]
    fn mixed_to_behavior_conditions_on_own_history() {
        let (g, p, h1, h2) = one_player_two_sets();
        // 1/2 on (r, a-irrelevant... both sets must be assigned), mix:
        //   1/2 (h1=l, h2=a), 1/4 (h1=l, h2=b), 1/4 (h1=r, h2=a)
        let s = |a1: usize, a2: usize| {
            PureStrategy::new(p, [(h1, a1), (h2, a2)].into_iter().collect())
        };
        let mix = MixedStrategy::new(
            p,
            Distribution::new(vec![
                (s(0, 0), rat(1, 2)),
                (s(0, 1), rat(1, 4)),
                (s(1, 0), rat(1, 4)),
            ])
            .unwrap(),
        );
        let b = to_behavior(&g, &mix.into()).unwrap();
        assert_eq!(b.action_dist(h1).unwrap().probability(&0), rat(3, 4));
        // At h2 only the h1=l strategies are consistent: 1/2 a, 1/4 b.
        assert_eq!(b.action_dist(h2).unwrap().probability(&0), rat(2, 3));
        assert_eq!(b.action_dist(h2).unwrap().probability(&1), rat(1, 3));
    }

    #[test]
    fn unreachable_set_defaults_to_first_action() {
        let (g, p, h1, h2) = one_player_two_sets();
        let s = PureStrategy::new(p, [(h1, 1), (h2, 1)].into_iter().collect());
        let mix = MixedStrategy::new(p, Distribution::point(s));
        let b = to_behavior(&g, &mix.into()).unwrap();
        // h2 is never reached under h1=r; convention picks action 0.
        assert!(b.action_dist(h2).unwrap().is_point_mass());
        assert_eq!(b.action_dist(h2).unwrap().as_point(), Some(&0));
    }
}
