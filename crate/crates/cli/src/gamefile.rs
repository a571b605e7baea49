//! Line-oriented game files.
//!
//! ```text
//! players: 1, 2
//! actions 1: C, D
//! actions 2: C, D
//! payoffs:
//!   C,C : 3 3
//!   C,D : 0 4
//!   D,C : 4 0
//!   D,D : 1 1
//! dist cooperate:
//!   C,C = 1
//! threats inner:
//!   1: C
//!   2: C, D
//! order cooperate:
//!   C,C = 1/2 1/2
//! expect:
//!   check cooperate ice.holds = yes
//! ```
//!
//! `#` starts a comment. Order weights follow the lexicographic enumeration
//! of players (`1>2`, `2>1` for two players).

use std::fmt::{self, Write as _};

use ice_lab::ice::enumerations;
use ice_lab::{rational, ActionSubspace, Environment, JointDistribution, OrderingDistribution, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// One stated claim about a command's report. Equality ignores `line`.
#[derive(Debug, Clone, Eq)]
pub struct Expectation {
    pub line: usize,
    /// Command followed by its positional selector (distribution or region).
    pub selector: Vec<String>,
    /// Dotted path into the JSON report.
    pub key: String,
    pub value: String,
    /// `~` instead of `=`: a claim the tool is known to disagree with; it is
    /// reported, never silently dropped.
    pub divergent: bool,
}

impl PartialEq for Expectation {
    fn eq(&self, other: &Self) -> bool {
        (&self.selector, &self.key, &self.value, self.divergent)
            == (&other.selector, &other.key, &other.value, other.divergent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameFile {
    pub env: Environment,
    pub distributions: Vec<(String, JointDistribution)>,
    pub threats: Vec<(String, ActionSubspace)>,
    /// Ordering distributions keyed by distribution name.
    pub orders: Vec<(String, OrderingDistribution)>,
    pub expectations: Vec<Expectation>,
}

impl GameFile {
    pub fn distribution(&self, name: &str) -> Option<&JointDistribution> {
        self.distributions.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn threat_set(&self, name: &str) -> Option<&ActionSubspace> {
        self.threats.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn order(&self, name: &str) -> Option<&OrderingDistribution> {
        self.orders.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }
}

pub fn profile_label(env: &Environment, profile: &[usize]) -> String {
    profile
        .iter()
        .enumerate()
        .map(|(i, &a)| env.action_label(i, a))
        .collect::<Vec<_>>()
        .join(",")
}

/// `1>2>3` style label of a move order.
pub fn order_label(env: &Environment, order: &[usize]) -> String {
    order.iter().map(|&i| env.player_name(i)).collect::<Vec<_>>().join(">")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Payoffs,
    Dist(usize),
    Threats(usize),
    Order(usize),
    Expect,
}

struct Line<'a> {
    number: usize,
    raw: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, at: &str, message: impl Into<String>) -> ParseError {
        let col = offset_in(self.raw, at).map_or(1, |o| o + 1);
        ParseError {
            line: self.number,
            col,
            message: message.into(),
        }
    }
}

fn offset_in(outer: &str, inner: &str) -> Option<usize> {
    let start = outer.as_ptr() as usize;
    let p = inner.as_ptr() as usize;
    (p >= start && p <= start + outer.len()).then(|| p - start)
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && !s.contains([',', ':', '=', '~', '#', '>']) && !s.contains(char::is_whitespace)
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

struct Builder {
    players: Option<Vec<String>>,
    actions: Vec<Option<Vec<String>>>,
    payoffs: Vec<Option<Vec<Rational>>>,
    payoff_line: usize,
    dists: Vec<(String, Vec<Rational>, usize, bool)>,
    threats: Vec<(String, Vec<Vec<usize>>)>,
    orders: Vec<(String, usize, OrderingDistribution)>,
    expectations: Vec<Expectation>,
    env: Option<Environment>,
}

pub fn parse(text: &str) -> Result<GameFile, ParseError> {
    let mut b = Builder {
        players: None,
        actions: Vec::new(),
        payoffs: Vec::new(),
        payoff_line: 0,
        dists: Vec::new(),
        threats: Vec::new(),
        orders: Vec::new(),
        expectations: Vec::new(),
        env: None,
    };
    let mut section = Section::None;
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        last_line = k + 1;
        let line = Line { number: k + 1, raw };
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indented = body.starts_with(char::is_whitespace);
        if !indented {
            section = b.header(&line, trimmed)?;
            continue;
        }
        match section {
            Section::None => return Err(line.err(trimmed, "entry outside of a section")),
            Section::Payoffs => b.payoff_entry(&line, trimmed)?,
            Section::Dist(d) => b.dist_entry(&line, trimmed, d)?,
            Section::Threats(t) => b.threat_entry(&line, trimmed, t)?,
            Section::Order(o) => b.order_entry(&line, trimmed, o)?,
            Section::Expect => b.expect_entry(&line, trimmed)?,
        }
    }
    b.finish(last_line)
}

impl Builder {
    fn env(&mut self, line: &Line, at: &str) -> Result<&Environment, ParseError> {
        if self.env.is_none() {
            let players = self.players.clone().ok_or_else(|| line.err(at, "`players:` must come first"))?;
            let mut actions = Vec::new();
            for (i, a) in self.actions.iter().enumerate() {
                actions.push(a.clone().ok_or_else(|| line.err(at, format!("no `actions {}:` line", players[i])))?);
            }
            let counts: usize = actions.iter().map(Vec::len).product();
            let n = players.len();
            let placeholder = vec![vec![Rational::zero(); n]; counts];
            let env = Environment::new(players, actions, placeholder).map_err(|e| line.err(at, e.to_string()))?;
            self.payoffs = vec![None; env.num_profiles()];
            self.env = Some(env);
        }
        Ok(self.env.as_ref().expect("just built"))
    }

    fn header(&mut self, line: &Line, text: &str) -> Result<Section, ParseError> {
        let Some((head, rest)) = text.split_once(':') else {
            return Err(line.err(text, "expected a section header ending in `:`"));
        };
        let mut words = head.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let name = words.next();
        if let Some(extra) = words.next() {
            return Err(line.err(extra, "unexpected word in header"));
        }
        let rest = rest.trim();
        let need_name = |what: &str| name.ok_or_else(|| line.err(head, format!("`{what}` needs a name")));
        let no_rest = |s: Section| {
            if rest.is_empty() {
                Ok(s)
            } else {
                Err(line.err(rest, "unexpected text after header"))
            }
        };
        match keyword {
            "players" => {
                if self.players.is_some() {
                    return Err(line.err(head, "duplicate `players:`"));
                }
                let names = split_list(rest);
                for n in &names {
                    if !is_label(n) {
                        return Err(line.err(n, format!("invalid player name {n:?}")));
                    }
                }
                if names.len() < 2 {
                    return Err(line.err(text, "need at least two players"));
                }
                self.actions = vec![None; names.len()];
                self.players = Some(names.into_iter().map(String::from).collect());
                Ok(Section::None)
            }
            "actions" => {
                let who = need_name("actions")?;
                let players = self.players.as_ref().ok_or_else(|| line.err(head, "`players:` must come first"))?;
                let i = players
                    .iter()
                    .position(|p| p == who)
                    .ok_or_else(|| line.err(who, format!("unknown player {who:?}")))?;
                if self.env.is_some() || self.actions[i].is_some() {
                    return Err(line.err(who, format!("actions of {who:?} declared twice or too late")));
                }
                let labels = split_list(rest);
                for l in &labels {
                    if !is_label(l) {
                        return Err(line.err(l, format!("invalid action label {l:?}")));
                    }
                }
                if labels.is_empty() {
                    return Err(line.err(text, "no actions"));
                }
                self.actions[i] = Some(labels.into_iter().map(String::from).collect());
                Ok(Section::None)
            }
            "payoffs" => {
                if name.is_some() {
                    return Err(line.err(head, "`payoffs:` takes no name"));
                }
                self.env(line, head)?;
                self.payoff_line = line.number;
                no_rest(Section::Payoffs)
            }
            "dist" => {
                let n = need_name("dist")?;
                let profiles = self.env(line, head)?.num_profiles();
                if self.dists.iter().any(|d| d.0 == n) {
                    return Err(line.err(n, format!("duplicate distribution {n:?}")));
                }
                self.dists.push((n.to_string(), vec![Rational::zero(); profiles], line.number, false));
                no_rest(Section::Dist(self.dists.len() - 1))
            }
            "threats" => {
                let n = need_name("threats")?;
                if matches!(n, "all" | "none") {
                    return Err(line.err(n, format!("{n:?} is reserved")));
                }
                let players = self.env(line, head)?.num_players();
                if self.threats.iter().any(|t| t.0 == n) {
                    return Err(line.err(n, format!("duplicate threat set {n:?}")));
                }
                self.threats.push((n.to_string(), vec![Vec::new(); players]));
                no_rest(Section::Threats(self.threats.len() - 1))
            }
            "order" => {
                let n = need_name("order")?;
                let players = self.env(line, head)?.num_players();
                if self.orders.iter().any(|o| o.0 == n) {
                    return Err(line.err(n, format!("duplicate order for {n:?}")));
                }
                self.orders.push((n.to_string(), line.number, OrderingDistribution::new(players)));
                no_rest(Section::Order(self.orders.len() - 1))
            }
            "expect" => {
                if name.is_some() {
                    return Err(line.err(head, "`expect:` takes no name"));
                }
                no_rest(Section::Expect)
            }
            _ => Err(line.err(head, format!("unknown section {keyword:?}"))),
        }
    }

    fn profile(&self, line: &Line, text: &str) -> Result<Vec<usize>, ParseError> {
        let env = self.env.as_ref().expect("sections build the environment first");
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != env.num_players() {
            return Err(line.err(text, format!("profile needs {} actions, got {}", env.num_players(), parts.len())));
        }
        parts
            .iter()
            .enumerate()
            .map(|(i, l)| {
                env.action_index(i, l)
                    .ok_or_else(|| line.err(l, format!("unknown action {l:?} for player {}", env.player_name(i))))
            })
            .collect()
    }

    fn rationals(&self, line: &Line, text: &str) -> Result<Vec<Rational>, ParseError> {
        text.split_whitespace()
            .map(|t| rational::parse(t).map_err(|_| line.err(t, format!("malformed number {t:?}"))))
            .collect()
    }

    fn payoff_entry(&mut self, line: &Line, text: &str) -> Result<(), ParseError> {
        let (lhs, rhs) = text
            .split_once(':')
            .ok_or_else(|| line.err(text, "payoff row must look like `a,b : u1 u2`"))?;
        let p = self.profile(line, lhs)?;
        let values = self.rationals(line, rhs)?;
        let env = self.env.as_ref().expect("built");
        if values.len() != env.num_players() {
            return Err(line.err(rhs.trim_start(), format!("expected {} payoffs, got {}", env.num_players(), values.len())));
        }
        let idx = env.index_of(&p);
        if self.payoffs[idx].is_some() {
            return Err(line.err(lhs.trim_start(), "duplicate payoff row"));
        }
        self.payoffs[idx] = Some(values);
        Ok(())
    }

    fn dist_entry(&mut self, line: &Line, text: &str, d: usize) -> Result<(), ParseError> {
        let (lhs, rhs) = text
            .split_once('=')
            .ok_or_else(|| line.err(text, "distribution entry must look like `a,b = p/q`"))?;
        let p = self.profile(line, lhs)?;
        let values = self.rationals(line, rhs)?;
        if values.len() != 1 {
            return Err(line.err(rhs.trim_start(), "expected one weight"));
        }
        let idx = self.env.as_ref().expect("built").index_of(&p);
        let dist = &mut self.dists[d];
        if !dist.1[idx].is_zero() {
            return Err(line.err(lhs.trim_start(), "duplicate profile"));
        }
        if values[0] < Rational::zero() {
            return Err(line.err(rhs.trim_start(), "negative weight"));
        }
        dist.1[idx] = values[0].clone();
        dist.3 = true;
        Ok(())
    }

    fn threat_entry(&mut self, line: &Line, text: &str, t: usize) -> Result<(), ParseError> {
        let (who, rest) = text
            .split_once(':')
            .ok_or_else(|| line.err(text, "threat entry must look like `player: a, b`"))?;
        let env = self.env.as_ref().expect("built");
        let who = who.trim();
        let i = env.player_index(who).ok_or_else(|| line.err(who, format!("unknown player {who:?}")))?;
        let mut actions = Vec::new();
        for l in split_list(rest) {
            actions.push(
                env.action_index(i, l)
                    .ok_or_else(|| line.err(l, format!("unknown action {l:?} for player {who}")))?,
            );
        }
        self.threats[t].1[i].extend(actions);
        Ok(())
    }

    fn order_entry(&mut self, line: &Line, text: &str, o: usize) -> Result<(), ParseError> {
        let (lhs, rhs) = text
            .split_once('=')
            .ok_or_else(|| line.err(text, "order entry must look like `a,b = w1 w2`"))?;
        let p = self.profile(line, lhs)?;
        let values = self.rationals(line, rhs)?;
        let idx = self.env.as_ref().expect("built").index_of(&p);
        let order = &mut self.orders[o].2;
        if order.get(idx).is_some() {
            return Err(line.err(lhs.trim_start(), "duplicate profile"));
        }
        order.set(idx, values).map_err(|e| line.err(rhs.trim_start(), e.to_string()))
    }

    fn expect_entry(&mut self, line: &Line, text: &str) -> Result<(), ParseError> {
        let (pos, divergent) = match (text.find('='), text.find('~')) {
            (Some(a), Some(b)) => (a.min(b), b < a),
            (Some(a), None) => (a, false),
            (None, Some(b)) => (b, true),
            (None, None) => return Err(line.err(text, "expectation must look like `command [name] key = value`")),
        };
        let mut words: Vec<String> = text[..pos].split_whitespace().map(String::from).collect();
        let value = text[pos + 1..].trim();
        if words.len() < 2 || value.is_empty() {
            return Err(line.err(text, "expectation needs a command, a key and a value"));
        }
        let key = words.pop().expect("nonempty");
        self.expectations.push(Expectation {
            line: line.number,
            selector: words,
            key,
            value: value.to_string(),
            divergent,
        });
        Ok(())
    }

    fn finish(mut self, last_line: usize) -> Result<GameFile, ParseError> {
        let end = |message: String| ParseError {
            line: last_line.max(1),
            col: 1,
            message,
        };
        let Some(env) = self.env.take() else {
            return Err(end("missing `payoffs:` section".into()));
        };
        let mut rows = Vec::with_capacity(env.num_profiles());
        for (k, row) in self.payoffs.into_iter().enumerate() {
            match row {
                Some(r) => rows.push(r),
                None => {
                    return Err(ParseError {
                        line: self.payoff_line,
                        col: 1,
                        message: format!("payoff table is missing profile {}", profile_label(&env, &env.profile_at(k))),
                    })
                }
            }
        }
        let env = Environment::new(env.players().to_vec(), (0..env.num_players()).map(|i| env.actions(i).to_vec()).collect(), rows)
            .map_err(|e| end(e.to_string()))?;
        let mut distributions = Vec::new();
        for (name, weights, at, any) in self.dists {
            let fail = |message: String| ParseError { line: at, col: 1, message };
            if !any {
                return Err(fail(format!("distribution {name:?} is empty")));
            }
            let sum = rational::sum(&weights);
            if sum != rational::one() {
                return Err(fail(format!("distribution {name:?} sums to {sum}, expected 1")));
            }
            let d = JointDistribution::new(&env, weights).map_err(|e| fail(e.to_string()))?;
            distributions.push((name, d));
        }
        let mut threats = Vec::new();
        for (name, sets) in self.threats {
            let s = ActionSubspace::from_sets(&env, sets).map_err(|e| end(e.to_string()))?;
            threats.push((name, s));
        }
        let mut orders = Vec::new();
        for (name, at, o) in self.orders {
            if !distributions.iter().any(|(n, _)| *n == name) {
                return Err(ParseError {
                    line: at,
                    col: 1,
                    message: format!("order for unknown distribution {name:?}"),
                });
            }
            orders.push((name, o));
        }
        Ok(GameFile {
            env,
            distributions,
            threats,
            orders,
            expectations: self.expectations,
        })
    }
}

/// Canonical text form; `parse(serialize(g)) == g`.
pub fn serialize(g: &GameFile) -> String {
    let env = &g.env;
    let mut out = String::new();
    let _ = writeln!(out, "players: {}", env.players().join(", "));
    for i in 0..env.num_players() {
        let _ = writeln!(out, "actions {}: {}", env.player_name(i), env.actions(i).join(", "));
    }
    out.push_str("payoffs:\n");
    for a in env.profiles() {
        let vals: Vec<String> = (0..env.num_players()).map(|i| env.payoff(i, &a).to_string()).collect();
        let _ = writeln!(out, "  {} : {}", profile_label(env, &a), vals.join(" "));
    }
    for (name, d) in &g.distributions {
        let _ = writeln!(out, "dist {name}:");
        for p in d.support_indices() {
            let _ = writeln!(out, "  {} = {}", profile_label(env, &env.profile_at(p)), d.weight(p));
        }
    }
    for (name, t) in &g.threats {
        let _ = writeln!(out, "threats {name}:");
        for i in 0..env.num_players() {
            let labels: Vec<&str> = t.component(i).iter().map(|&a| env.action_label(i, a)).collect();
            let _ = writeln!(out, "  {}: {}", env.player_name(i), labels.join(", "));
        }
    }
    for (name, o) in &g.orders {
        let _ = writeln!(out, "order {name}:");
        for p in o.profiles() {
            let w: Vec<String> = o.get(p).expect("listed").iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "  {} = {}", profile_label(env, &env.profile_at(p)), w.join(" "));
        }
    }
    if !g.expectations.is_empty() {
        out.push_str("expect:\n");
        for e in &g.expectations {
            let _ = writeln!(out, "  {} {} {} {}", e.selector.join(" "), e.key, if e.divergent { "~" } else { "=" }, e.value);
        }
    }
    out
}

impl fmt::Display for GameFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

/// Move-order labels for an environment, in weight order.
pub fn order_labels(env: &Environment) -> Vec<String> {
    enumerations(env.num_players()).iter().map(|o| order_label(env, o)).collect()
}
