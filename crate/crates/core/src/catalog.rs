//! Small named environments used by tests, benchmarks and the bundled game
//! files.

use crate::env::Environment;
use crate::rational::{int, Rational};

/// Prisoner's dilemma with payoffs `B < b < g < G`: `(C,C) = (g,g)`,
/// `(C,D) = (B,G)`, `(D,C) = (G,B)`, `(D,D) = (b,b)`.
pub fn prisoners_dilemma(sucker: Rational, bad: Rational, good: Rational, temptation: Rational) -> Environment {
    let cells = vec![
        vec![(good.clone(), good), (sucker.clone(), temptation.clone())],
        vec![(temptation, sucker), (bad.clone(), bad)],
    ];
    Environment::bimatrix(&["C", "D"], &["C", "D"], cells).expect("well-formed 2x2")
}

/// Prisoner's dilemma with integer payoffs.
pub fn prisoners_dilemma_int(sucker: i64, bad: i64, good: i64, temptation: i64) -> Environment {
    prisoners_dilemma(int(sucker), int(bad), int(good), int(temptation))
}

/// Chicken with shirk/work actions: `(S,S) = (0,0)`, `(S,W) = (5,1)`,
/// `(W,S) = (1,5)`, `(W,W) = (4,4)`.
pub fn chicken() -> Environment {
    let c = |a, b| (int(a), int(b));
    Environment::bimatrix(
        &["S", "W"],
        &["S", "W"],
        vec![vec![c(0, 0), c(5, 1)], vec![c(1, 5), c(4, 4)]],
    )
    .expect("well-formed 2x2")
}

/// A prisoner's dilemma on `{C,D}` embedded in a 4x4 game whose outer
/// actions (`T`, `B` for the row player, `L`, `R` for the column player)
/// form a best-response cycle; `k` scales the payoff of meeting an outer
/// action with `C`.
pub fn punishment_cycle(k: i64) -> Environment {
    let c = |a: i64, b: i64| (int(a), int(b));
    Environment::bimatrix(
        &["T", "C", "D", "B"],
        &["L", "C", "D", "R"],
        vec![
            vec![c(3, 0), c(0, k), c(0, 0), c(0, 3)],
            vec![c(k, 0), c(6, 6), c(2, 9), c(k, 0)],
            vec![c(0, 0), c(9, 2), c(5, 5), c(0, 0)],
            vec![c(0, 3), c(0, k), c(0, 0), c(3, 0)],
        ],
    )
    .expect("well-formed 4x4")
}

/// Game where every player gets `value` at every profile. Players are
/// `1..=n`; actions are `s0, s1, ...`.
pub fn constant_game(counts: &[usize], value: Rational) -> Environment {
    let players = (1..=counts.len()).map(|i| i.to_string()).collect();
    let actions = counts
        .iter()
        .map(|&c| (0..c).map(|k| format!("s{k}")).collect())
        .collect();
    let n = counts.len();
    Environment::from_fn(players, actions, |_| vec![value.clone(); n]).expect("well-formed")
}
