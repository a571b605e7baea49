//! Environments, action profiles, joint distributions and action subspaces.
//!
//! Profiles are enumerated row-major over per-player action indices: the last
//! player's index varies fastest. Every profile-indexed vector in the crate
//! (distribution weights, payoff rows, LP variable blocks) uses that order.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// One action index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile(Vec<usize>);

impl ActionProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        ActionProfile(actions)
    }

    /// Same profile with player `player` switched to `action`.
    pub fn with(&self, player: usize, action: usize) -> Self {
        let mut v = self.0.clone();
        v[player] = action;
        ActionProfile(v)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for ActionProfile {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for ActionProfile {
    fn from(v: Vec<usize>) -> Self {
        ActionProfile(v)
    }
}

/// A finite strategic environment `(I, A, u)`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    counts: Vec<usize>,
    strides: Vec<usize>,
    // payoffs[profile][player]
    payoffs: Vec<Vec<Rational>>,
}

impl Environment {
    /// `payoffs[k][i]` is player `i`'s payoff at the `k`-th profile in
    /// row-major order.
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n = players.len();
        if n < 2 {
            return Err(Error::InvalidEnvironment(format!(
                "need at least two players, got {n}"
            )));
        }
        if actions.len() != n {
            return Err(Error::InvalidEnvironment(format!(
                "{} action lists for {n} players",
                actions.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for p in &players {
            if !seen.insert(p) {
                return Err(Error::InvalidEnvironment(format!("duplicate player {p:?}")));
            }
        }
        for (i, list) in actions.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidEnvironment(format!(
                    "player {} has no actions",
                    players[i]
                )));
            }
            let mut seen = BTreeSet::new();
            for a in list {
                if !seen.insert(a) {
                    return Err(Error::InvalidEnvironment(format!(
                        "duplicate action {a:?} for player {}",
                        players[i]
                    )));
                }
            }
        }
        let counts: Vec<usize> = actions.iter().map(Vec::len).collect();
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let total: usize = counts.iter().product();
        if payoffs.len() != total {
            return Err(Error::InvalidEnvironment(format!(
                "payoff table has {} rows, expected {total}",
                payoffs.len()
            )));
        }
        if let Some(k) = payoffs.iter().position(|row| row.len() != n) {
            return Err(Error::InvalidEnvironment(format!(
                "payoff row {k} has {} entries, expected {n}",
                payoffs[k].len()
            )));
        }
        Ok(Environment {
            players,
            actions,
            counts,
            strides,
            payoffs,
        })
    }

    /// Builds the payoff table by calling `f` on every profile in row-major
    /// order.
    pub fn from_fn(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        mut f: impl FnMut(&ActionProfile) -> Vec<Rational>,
    ) -> Result<Self> {
        let counts: Vec<usize> = actions.iter().map(Vec::len).collect();
        let payoffs = ProfileIter::new(counts).map(|p| f(&p)).collect();
        Environment::new(players, actions, payoffs)
    }

    /// Two-player constructor: `cells[r][c] = (u1, u2)`.
    pub fn bimatrix(
        rows: &[&str],
        cols: &[&str],
        cells: Vec<Vec<(Rational, Rational)>>,
    ) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::InvalidEnvironment(
                "bimatrix cell grid does not match action labels".into(),
            ));
        }
        let payoffs = cells
            .into_iter()
            .flatten()
            .map(|(a, b)| vec![a, b])
            .collect();
        Environment::new(
            vec!["1".into(), "2".into()],
            vec![
                rows.iter().map(|s| s.to_string()).collect(),
                cols.iter().map(|s| s.to_string()).collect(),
            ],
            payoffs,
        )
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_name(&self, i: usize) -> &str {
        &self.players[i]
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    pub fn num_actions(&self, i: usize) -> usize {
        self.counts[i]
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn actions(&self, i: usize) -> &[String] {
        &self.actions[i]
    }

    pub fn action_label(&self, i: usize, a: usize) -> &str {
        &self.actions[i][a]
    }

    pub fn action_index(&self, i: usize, label: &str) -> Option<usize> {
        self.actions[i].iter().position(|l| l == label)
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profiles(&self) -> ProfileIter {
        ProfileIter::new(self.counts.clone())
    }

    pub fn profile_at(&self, mut index: usize) -> ActionProfile {
        let mut v = vec![0; self.counts.len()];
        for (i, s) in self.strides.iter().enumerate() {
            v[i] = index / s;
            index %= s;
        }
        ActionProfile(v)
    }

    pub fn index_of(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }

    /// Checks arity and bounds of an externally supplied profile.
    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(Error::ProfileArity {
                expected: self.num_players(),
                got: profile.len(),
            });
        }
        for (i, &a) in profile.iter().enumerate() {
            if a >= self.counts[i] {
                return Err(Error::ActionOutOfRange {
                    player: i,
                    action: a,
                });
            }
        }
        Ok(())
    }

    pub fn payoff(&self, i: usize, profile: &[usize]) -> &Rational {
        &self.payoffs[self.index_of(profile)][i]
    }

    pub fn payoff_at(&self, index: usize, i: usize) -> &Rational {
        &self.payoffs[index][i]
    }

    /// Opponent action tuples of player `i` (in player order, `i` skipped),
    /// restricted to `within` when given.
    pub fn opponent_profiles(&self, i: usize, within: Option<&ActionSubspace>) -> Vec<Vec<usize>> {
        let lists: Vec<Vec<usize>> = (0..self.num_players())
            .filter(|&j| j != i)
            .map(|j| match within {
                Some(w) => w.component(j).iter().copied().collect(),
                None => (0..self.counts[j]).collect(),
            })
            .collect();
        cartesian(&lists)
    }

    /// Inserts `a_i` at position `i` of an opponent tuple.
    pub fn compose(&self, i: usize, a_i: usize, opponents: &[usize]) -> ActionProfile {
        let mut v = Vec::with_capacity(opponents.len() + 1);
        v.extend_from_slice(&opponents[..i]);
        v.push(a_i);
        v.extend_from_slice(&opponents[i..]);
        ActionProfile(v)
    }

    /// Pure profiles at which no player gains from a unilateral deviation.
    pub fn pure_nash_profiles(&self) -> Vec<ActionProfile> {
        self.profiles()
            .filter(|p| {
                (0..self.num_players()).all(|i| {
                    let u = self.payoff(i, p);
                    (0..self.counts[i]).all(|b| self.payoff(i, &p.with(i, b)) <= u)
                })
            })
            .collect()
    }

    /// True when two distinct profiles give some player the same payoff.
    pub fn has_repeated_payoffs(&self, i: usize) -> bool {
        let mut seen = BTreeSet::new();
        self.payoffs.iter().any(|row| !seen.insert(&row[i]))
    }
}

/// Row-major iterator over the product of `0..counts[i]`.
#[derive(Debug, Clone)]
pub struct ProfileIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    fn new(counts: Vec<usize>) -> Self {
        let next = if counts.contains(&0) {
            None
        } else {
            Some(vec![0; counts.len()])
        };
        ProfileIter { counts, next }
    }
}

impl Iterator for ProfileIter {
    type Item = ActionProfile;

    fn next(&mut self) -> Option<ActionProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.counts[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(ActionProfile(current))
    }
}

pub(crate) fn cartesian(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for &x in list {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Exact probability distribution over action profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    counts: Vec<usize>,
    weights: Vec<Rational>,
}

impl JointDistribution {
    /// Weights in row-major profile order. Must be nonnegative and sum to 1.
    pub fn new(env: &Environment, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != env.num_profiles() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for {} profiles",
                weights.len(),
                env.num_profiles()
            )));
        }
        if let Some(k) = weights.iter().position(Signed::is_negative) {
            return Err(Error::InvalidDistribution(format!(
                "negative weight {} on profile {k}",
                weights[k]
            )));
        }
        let sum = rational::sum(&weights);
        if !sum.is_one() {
            return Err(Error::NotNormalized { sum });
        }
        Ok(JointDistribution {
            counts: env.action_counts().to_vec(),
            weights,
        })
    }

    pub fn from_entries(
        env: &Environment,
        entries: impl IntoIterator<Item = (ActionProfile, Rational)>,
    ) -> Result<Self> {
        let mut weights = vec![Rational::zero(); env.num_profiles()];
        for (p, w) in entries {
            env.check_profile(&p)?;
            weights[env.index_of(&p)] += w;
        }
        JointDistribution::new(env, weights)
    }

    pub fn point_mass(env: &Environment, profile: &[usize]) -> Result<Self> {
        env.check_profile(profile)?;
        let mut weights = vec![Rational::zero(); env.num_profiles()];
        weights[env.index_of(profile)] = Rational::one();
        JointDistribution::new(env, weights)
    }

    pub fn uniform(env: &Environment) -> Self {
        let n = env.num_profiles();
        let w = rational::rat(1, n as i64);
        JointDistribution {
            counts: env.action_counts().to_vec(),
            weights: vec![w; n],
        }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.weights[index]
    }

    /// True when the distribution was built for an environment with the same
    /// action counts.
    pub fn fits(&self, env: &Environment) -> bool {
        self.counts == env.action_counts()
    }

    /// `α_i`: probability of each of player `i`'s actions.
    pub fn marginal(&self, env: &Environment, i: usize) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); env.num_actions(i)];
        for (k, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                m[env.profile_at(k)[i]] += w;
            }
        }
        m
    }

    pub fn expected_payoff(&self, env: &Environment, i: usize) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .fold(Rational::zero(), |acc, (k, w)| acc + w * env.payoff_at(k, i))
    }

    /// Profile indices with positive weight, ascending.
    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&k| self.weights[k].is_positive())
            .collect()
    }

    pub fn support(&self, env: &Environment) -> Vec<ActionProfile> {
        self.support_indices()
            .into_iter()
            .map(|k| env.profile_at(k))
            .collect()
    }

    /// Per-player union of the supported profiles' components.
    pub fn support_subspace(&self, env: &Environment) -> ActionSubspace {
        let mut sub = ActionSubspace::empty(env.num_players());
        for p in self.support(env) {
            for (i, &a) in p.iter().enumerate() {
                sub.insert(i, a);
            }
        }
        sub
    }
}

/// Per-player subset of actions; components may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSubspace {
    sets: Vec<BTreeSet<usize>>,
}

impl ActionSubspace {
    pub fn full(env: &Environment) -> Self {
        ActionSubspace {
            sets: env
                .action_counts()
                .iter()
                .map(|&c| (0..c).collect())
                .collect(),
        }
    }

    pub fn empty(num_players: usize) -> Self {
        ActionSubspace {
            sets: vec![BTreeSet::new(); num_players],
        }
    }

    pub fn from_sets(env: &Environment, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != env.num_players() {
            return Err(Error::ProfileArity {
                expected: env.num_players(),
                got: sets.len(),
            });
        }
        let mut sub = ActionSubspace::empty(sets.len());
        for (i, list) in sets.into_iter().enumerate() {
            for a in list {
                if a >= env.num_actions(i) {
                    return Err(Error::ActionOutOfRange {
                        player: i,
                        action: a,
                    });
                }
                sub.insert(i, a);
            }
        }
        Ok(sub)
    }

    pub fn num_players(&self) -> usize {
        self.sets.len()
    }

    pub fn component(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i]
    }

    pub fn components(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn contains(&self, i: usize, a: usize) -> bool {
        self.sets[i].contains(&a)
    }

    pub fn contains_profile(&self, profile: &[usize]) -> bool {
        profile.iter().enumerate().all(|(i, a)| self.contains(i, *a))
    }

    pub fn insert(&mut self, i: usize, a: usize) -> bool {
        self.sets[i].insert(a)
    }

    pub fn remove(&mut self, i: usize, a: usize) -> bool {
        self.sets[i].remove(&a)
    }

    /// Componentwise union.
    pub fn union(&self, other: &ActionSubspace) -> ActionSubspace {
        ActionSubspace {
            sets: self
                .sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.union(b).copied().collect())
                .collect(),
        }
    }

    pub fn intersection(&self, other: &ActionSubspace) -> ActionSubspace {
        ActionSubspace {
            sets: self
                .sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.intersection(b).copied().collect())
                .collect(),
        }
    }

    /// Componentwise inclusion.
    pub fn is_subset(&self, other: &ActionSubspace) -> bool {
        self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }

    pub fn is_full(&self, env: &Environment) -> bool {
        self.sets
            .iter()
            .enumerate()
            .all(|(i, s)| s.len() == env.num_actions(i))
    }

    pub fn has_empty_component(&self) -> bool {
        self.sets.iter().any(BTreeSet::is_empty)
    }

    pub fn total_actions(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).sum()
    }

    /// Profiles of the product set, row-major.
    pub fn profiles(&self) -> Vec<ActionProfile> {
        let lists: Vec<Vec<usize>> = self.sets.iter().map(|s| s.iter().copied().collect()).collect();
        cartesian(&lists).into_iter().map(ActionProfile).collect()
    }

    /// Every product of nonempty per-player subsets of `env`'s actions, in a
    /// fixed order (per player ascending bitmask, first player slowest).
    pub fn all_nonempty_products(env: &Environment) -> Vec<ActionSubspace> {
        let masks: Vec<Vec<usize>> = env
            .action_counts()
            .iter()
            .map(|&c| (1..(1usize << c)).collect())
            .collect();
        cartesian(&masks)
            .into_iter()
            .map(|choice| ActionSubspace {
                sets: choice
                    .iter()
                    .map(|&mask| (0..usize::BITS as usize).filter(|b| mask >> b & 1 == 1).collect())
                    .collect(),
            })
            .collect()
    }

    /// Number of products [`ActionSubspace::all_nonempty_products`] would
    /// return, saturating.
    pub fn count_nonempty_products(env: &Environment) -> usize {
        env.action_counts().iter().fold(1usize, |acc, &c| {
            let per = 1usize.checked_shl(c as u32).map_or(usize::MAX, |v| v - 1);
            acc.saturating_mul(per)
        })
    }

    /// Renders as `{C,D} x {C}` using the environment's labels.
    pub fn display<'a>(&'a self, env: &'a Environment) -> SubspaceDisplay<'a> {
        SubspaceDisplay { sub: self, env }
    }
}

pub struct SubspaceDisplay<'a> {
    sub: &'a ActionSubspace,
    env: &'a Environment,
}

impl fmt::Display for SubspaceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, set) in self.sub.sets.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            let labels: Vec<&str> = set.iter().map(|&a| self.env.action_label(i, a)).collect();
            write!(f, "{{{}}}", labels.join(","))?;
        }
        Ok(())
    }
}

/// Declared credible threats `B`. Effective threats add the support of the
/// implemented distribution: `B*_i = B_i ∪ supp α_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatSpace {
    base: ActionSubspace,
}

impl ThreatSpace {
    pub fn new(base: ActionSubspace) -> Self {
        ThreatSpace { base }
    }

    /// `B = A`.
    pub fn all(env: &Environment) -> Self {
        ThreatSpace::new(ActionSubspace::full(env))
    }

    /// `B = ∅`.
    pub fn none(env: &Environment) -> Self {
        ThreatSpace::new(ActionSubspace::empty(env.num_players()))
    }

    pub fn base(&self) -> &ActionSubspace {
        &self.base
    }

    pub fn effective(&self, env: &Environment, alpha: &JointDistribution) -> ActionSubspace {
        self.base.union(&alpha.support_subspace(env))
    }

    pub fn effective_with_support(&self, support: &ActionSubspace) -> ActionSubspace {
        self.base.union(support)
    }
}
