//! Command implementations. Each command returns a JSON report; text output
//! is rendered from the same value.

use anyhow::{anyhow, bail, Context, Result};
use ice_lab::elimination::{cr_set, fcr_set, iterated_r_set, strict_dominator, EliminationTrace, Reason};
use ice_lab::ice::{
    ce_payoff_region, ice_payoff_region, ir_payoff_region, is_correlated_eq, is_ice, is_individually_rational, nash_pure_hull,
    worst_punishment, Point, RowKind,
};
use ice_lab::ice::Witness;
use ice_lab::mediated::{DeviationStrategy, MediatedMechanism};
use ice_lab::refinement::{a_infinity_with, classify_with, OperatorTrace, RNotion, ThreatSets, Verdict};
use ice_lab::{
    ActionProfile, ActionSubspace, Environment, IceCertificate, JointDistribution, OrderingDistribution, PunishmentMode, Rational, ThreatSpace,
};
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::gamefile::{order_labels, profile_label, GameFile};

/// Vertex probes per region; the hull refinement makes the result exact
/// regardless, this only seeds it.
pub const REGION_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Ice,
    Ce,
    Ir,
    Nash,
}

impl RegionKind {
    pub const ALL: [RegionKind; 4] = [RegionKind::Ice, RegionKind::Ce, RegionKind::Ir, RegionKind::Nash];

    pub fn name(self) -> &'static str {
        match self {
            RegionKind::Ice => "ice",
            RegionKind::Ce => "ce",
            RegionKind::Ir => "ir",
            RegionKind::Nash => "nash",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Options shared by every command, already resolved against defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub dist: Option<String>,
    /// `all`, `none`, or a threat set declared in the file.
    pub threats: String,
    pub mode: PunishmentMode,
    pub seed: u64,
    pub samples: u64,
    pub alt_r: bool,
    pub regions: Vec<RegionKind>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            dist: None,
            threats: "all".into(),
            mode: PunishmentMode::WorstInThreats,
            seed: 0,
            samples: 10_000,
            alt_r: false,
            regions: vec![RegionKind::Ice],
        }
    }
}

pub fn mode_name(mode: PunishmentMode) -> &'static str {
    match mode {
        PunishmentMode::WorstInThreats => "worst",
        PunishmentMode::BestResponseOnly => "br",
        PunishmentMode::Minimax => "minimax",
    }
}

pub fn mode_from_name(s: &str) -> Option<PunishmentMode> {
    match s {
        "worst" => Some(PunishmentMode::WorstInThreats),
        "br" => Some(PunishmentMode::BestResponseOnly),
        "minimax" => Some(PunishmentMode::Minimax),
        _ => None,
    }
}

fn notion(opts: &Options) -> RNotion {
    if opts.alt_r {
        RNotion::Iterated
    } else {
        RNotion::FirstOrder
    }
}

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn set_text(env: &Environment, s: &ActionSubspace) -> Value {
    Value::String(s.display(env).to_string())
}

fn action(env: &Environment, i: usize, a: usize) -> String {
    format!("{}:{}", env.player_name(i), env.action_label(i, a))
}

fn mixed(env: &Environment, i: usize, sigma: &[Rational]) -> Value {
    let mut m = Map::new();
    for (a, w) in sigma.iter().enumerate() {
        if !w.is_zero() {
            m.insert(env.action_label(i, a).to_string(), rat(w));
        }
    }
    Value::Object(m)
}

fn distribution_json(env: &Environment, alpha: &JointDistribution) -> Value {
    Value::Array(
        alpha
            .support_indices()
            .into_iter()
            .map(|p| json!({"profile": profile_label(env, &env.profile_at(p)), "weight": rat(alpha.weight(p))}))
            .collect(),
    )
}

pub fn theta_json(env: &Environment, theta: &OrderingDistribution) -> Value {
    let labels = order_labels(env);
    Value::Array(
        theta
            .profiles()
            .map(|p| {
                let mut orders = Map::new();
                for (l, w) in labels.iter().zip(theta.get(p).expect("listed")) {
                    orders.insert(l.clone(), rat(w));
                }
                json!({"profile": profile_label(env, &env.profile_at(p)), "orders": orders})
            })
            .collect(),
    )
}

fn row_label(env: &Environment, kind: &RowKind) -> String {
    match *kind {
        RowKind::Incentive { player, rec, dev } => format!(
            "obedience {} told {} -> {}",
            env.player_name(player),
            env.action_label(player, rec),
            env.action_label(player, dev)
        ),
        RowKind::Normalization => "normalization".into(),
        RowKind::Marginal { profile } => format!("marginal {}", profile_label(env, &env.profile_at(profile))),
        RowKind::SupportMass { player, action: a } => format!("support mass {}", action(env, player, a)),
        RowKind::Extra(k) => format!("extra {k}"),
    }
}

pub fn certificate_json(env: &Environment, alpha: &JointDistribution, cert: &IceCertificate) -> Value {
    let verified = cert.verify(env, alpha);
    match &cert.witness {
        Witness::Gamma(g) => json!({
            "kind": "ordering",
            "theta": theta_json(env, &g.theta(env)),
            "verified": verified,
        }),
        Witness::Farkas(y) => {
            let rows: Vec<Value> = cert
                .system
                .rows
                .iter()
                .zip(y)
                .filter(|(_, m)| !m.is_zero())
                .map(|(k, m)| json!({"row": row_label(env, k), "multiplier": rat(m)}))
                .collect();
            json!({"kind": "farkas", "multipliers": rows, "verified": verified})
        }
    }
}

fn verdict_json(env: &Environment, alpha: &JointDistribution, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "threats": set_text(env, &v.threats),
        "certificate": certificate_json(env, alpha, &v.certificate),
    })
}

fn resolve_dist<'a>(game: &'a GameFile, opts: &Options) -> Result<(&'a str, &'a JointDistribution)> {
    let names: Vec<&str> = game.distributions.iter().map(|(n, _)| n.as_str()).collect();
    let name = match &opts.dist {
        Some(n) => n.as_str(),
        None if names.len() == 1 => names[0],
        None => bail!("choose a distribution with --dist (file declares: {})", list_or_none(&names)),
    };
    let (n, d) = game
        .distributions
        .iter()
        .find(|(n, _)| n == name)
        .ok_or_else(|| anyhow!("unknown distribution {name:?} (file declares: {})", list_or_none(&names)))?;
    Ok((n.as_str(), d))
}

fn list_or_none(names: &[&str]) -> String {
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

pub fn resolve_threats(game: &GameFile, name: &str) -> Result<ThreatSpace> {
    match name {
        "all" => Ok(ThreatSpace::all(&game.env)),
        "none" => Ok(ThreatSpace::none(&game.env)),
        n => game
            .threat_set(n)
            .map(|s| ThreatSpace::new(s.clone()))
            .ok_or_else(|| anyhow!("unknown threat set {n:?}")),
    }
}

/// Smallest obedience row `Σ_{a: a_i = rec} α(a) (u_i(a) − v(a))` over
/// `(i, rec, dev)`, where `v` gives the deviation payoff.
fn worst_row(
    env: &Environment,
    alpha: &JointDistribution,
    skip: impl Fn(usize, usize) -> bool,
    mut v: impl FnMut(usize, usize, usize, &ActionProfile) -> Result<Rational>,
) -> Result<Option<(usize, usize, usize, Rational)>> {
    let mut worst: Option<(usize, usize, usize, Rational)> = None;
    for i in 0..env.num_players() {
        for rec in 0..env.num_actions(i) {
            if skip(i, rec) {
                continue;
            }
            for dev in (0..env.num_actions(i)).filter(|&d| d != rec) {
                let mut total = Rational::zero();
                for a in env.profiles().filter(|a| a[i] == rec) {
                    let w = alpha.weight(env.index_of(&a));
                    if w.is_zero() {
                        continue;
                    }
                    total += w * (env.payoff(i, &a) - v(i, rec, dev, &a)?);
                }
                if worst.as_ref().is_none_or(|x| total < x.3) {
                    worst = Some((i, rec, dev, total));
                }
            }
        }
    }
    Ok(worst)
}

fn row_json(env: &Environment, row: Option<(usize, usize, usize, Rational)>) -> Value {
    match row {
        None => Value::Null,
        Some((i, rec, dev, v)) => json!({
            "player": env.player_name(i),
            "recommended": env.action_label(i, rec),
            "deviation": env.action_label(i, dev),
            "value": rat(&v),
        }),
    }
}

fn header(game: &GameFile, command: &str) -> Map<String, Value> {
    let env = &game.env;
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert(
        "game".into(),
        json!({
            "players": env.players(),
            "actions": (0..env.num_players()).map(|i| env.actions(i).to_vec()).collect::<Vec<_>>(),
        }),
    );
    m
}

pub fn check(game: &GameFile, opts: &Options) -> Result<Value> {
    let env = &game.env;
    let (name, alpha) = resolve_dist(game, opts)?;
    let threats = resolve_threats(game, &opts.threats)?;
    let effective = threats.effective(env, alpha);

    let ce = is_correlated_eq(env, alpha);
    let ce_row = worst_row(env, alpha, |_, _| false, |i, _, dev, a| Ok(env.payoff(i, &a.with(i, dev)).clone()))?;
    if ce != ce_row.as_ref().is_none_or(|r| !r.3.is_negative()) {
        bail!("correlated-equilibrium rows disagree with the membership test");
    }

    let ir = is_individually_rational(env, alpha, &threats, opts.mode)?;
    let marginals: Vec<Vec<Rational>> = (0..env.num_players()).map(|i| alpha.marginal(env, i)).collect();
    let ir_row = worst_row(
        env,
        alpha,
        |i, rec| !marginals[i][rec].is_positive(),
        |i, rec, dev, _| Ok(worst_punishment(env, i, rec, dev, &effective, opts.mode)?),
    )?;
    if ir != ir_row.as_ref().is_none_or(|r| !r.3.is_negative()) {
        bail!("individual-rationality rows disagree with the membership test");
    }

    let cert = is_ice(env, alpha, &threats, opts.mode)?;
    let mut m = header(game, "check");
    m.insert("distribution".into(), json!({"name": name, "weights": distribution_json(env, alpha)}));
    m.insert(
        "threats".into(),
        json!({"declared": opts.threats, "set": set_text(env, threats.base()), "effective": set_text(env, &effective)}),
    );
    m.insert("mode".into(), json!(mode_name(opts.mode)));
    m.insert("ce".into(), json!({"holds": ce, "tightest_row": row_json(env, ce_row)}));
    m.insert("ir".into(), json!({"holds": ir, "tightest_row": row_json(env, ir_row)}));
    m.insert("ice".into(), json!({"holds": cert.verdict, "certificate": certificate_json(env, alpha, &cert)}));
    Ok(Value::Object(m))
}

fn trace_json(env: &Environment, trace: &EliminationTrace) -> Value {
    let removals: Vec<Value> = trace
        .removals
        .iter()
        .map(|r| {
            let (kind, by) = match &r.reason {
                Reason::AbsoluteDominance { by } => ("absolute", json!(env.action_label(r.player, *by))),
                Reason::StrictDominance { by } => ("strict", mixed(env, r.player, by)),
                Reason::FcrDominance { witness } => ("fc", mixed(env, r.player, witness)),
            };
            json!({
                "round": r.round,
                "player": env.player_name(r.player),
                "action": env.action_label(r.player, r.action),
                "reason": kind,
                "by": by,
            })
        })
        .collect();
    json!({"rounds": trace.rounds, "removals": removals})
}

/// First-order `R` as a one-round trace.
fn r_trace(env: &Environment) -> Result<(ActionSubspace, EliminationTrace)> {
    let mut set = ActionSubspace::full(env);
    let mut trace = EliminationTrace {
        removals: Vec::new(),
        rounds: 1,
    };
    for i in 0..env.num_players() {
        for a in 0..env.num_actions(i) {
            if let Some(by) = strict_dominator(env, i, a, None)? {
                set.remove(i, a);
                trace.removals.push(ice_lab::elimination::Removal {
                    round: 1,
                    player: i,
                    action: a,
                    reason: Reason::StrictDominance { by },
                });
            }
        }
    }
    Ok((set, trace))
}

fn operator_trace_json(env: &Environment, trace: &OperatorTrace) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut removed = Vec::new();
            for i in 0..env.num_players() {
                for &a in s.input.component(i) {
                    if !s.output.contains(i, a) {
                        removed.push(action(env, i, a));
                    }
                }
            }
            let witnesses: Vec<Value> = s
                .witnesses
                .iter()
                .map(|w| {
                    json!({
                        "action": action(env, w.player, w.action),
                        "support": set_text(env, &w.support),
                        "alpha": distribution_json(env, &w.alpha),
                    })
                })
                .collect();
            json!({
                "round": k + 1,
                "input": set_text(env, &s.input),
                "output": set_text(env, &s.output),
                "removed": removed,
                "slices_solved": s.slices_solved,
                "witnesses": witnesses,
            })
        })
        .collect();
    Value::Array(steps)
}

pub fn sets(game: &GameFile, opts: &Options) -> Result<Value> {
    let env = &game.env;
    let (r, r_tr) = if opts.alt_r { iterated_r_set(env) } else { r_trace(env)? };
    let (cr, cr_tr) = cr_set(env);
    let (fcr, fcr_tr) = fcr_set(env)?;
    let (ainf, ainf_tr) = a_infinity_with(env, opts.mode, notion(opts)).context("computing the operator limit")?;
    let full = ActionSubspace::full(env);
    let mut m = header(game, "sets");
    m.insert("mode".into(), json!(mode_name(opts.mode)));
    m.insert("alt_r".into(), json!(opts.alt_r));
    m.insert("full".into(), set_text(env, &full));
    m.insert("r".into(), json!({"set": set_text(env, &r), "is_full": r == full, "trace": trace_json(env, &r_tr)}));
    m.insert("cr".into(), json!({"set": set_text(env, &cr), "is_full": cr == full, "trace": trace_json(env, &cr_tr)}));
    m.insert("fcr".into(), json!({"set": set_text(env, &fcr), "is_full": fcr == full, "trace": trace_json(env, &fcr_tr)}));
    m.insert(
        "a_infinity".into(),
        json!({
            "set": set_text(env, &ainf),
            "is_full": ainf == full,
            "threats": set_text(env, &ainf.union(&r)),
            "trace": operator_trace_json(env, &ainf_tr),
        }),
    );
    Ok(Value::Object(m))
}

pub fn classify(game: &GameFile, opts: &Options) -> Result<Value> {
    let env = &game.env;
    let (name, alpha) = resolve_dist(game, opts)?;
    let sets = ThreatSets::compute(env, opts.mode, notion(opts))?;
    let c = classify_with(env, alpha, opts.mode, &sets)?;
    let mut m = header(game, "classify");
    m.insert("distribution".into(), json!({"name": name, "weights": distribution_json(env, alpha)}));
    m.insert("mode".into(), json!(mode_name(opts.mode)));
    m.insert("alt_r".into(), json!(opts.alt_r));
    m.insert(
        "flags".into(),
        json!({
            "no_strict_dominance": c.flags.no_strict_dominance,
            "no_absolute_dominance": c.flags.no_absolute_dominance,
            "generic_2x2": c.flags.generic_2x2,
        }),
    );
    m.insert(
        "sets".into(),
        json!({
            "r": set_text(env, &sets.r),
            "cr": set_text(env, &sets.cr),
            "fcr": set_text(env, &sets.fcr),
            "a_infinity": set_text(env, &sets.a_infinity),
        }),
    );
    m.insert("nash".into(), verdict_json(env, alpha, &c.nash));
    m.insert("quasi_sequential".into(), verdict_json(env, alpha, &c.quasi_sequential));
    m.insert("sequential_sufficient".into(), verdict_json(env, alpha, &c.sequential_sufficient));
    m.insert("sequential_necessary".into(), verdict_json(env, alpha, &c.sequential_necessary));
    m.insert(
        "sequential_2x2".into(),
        c.sequential_2x2.as_ref().map_or(Value::Null, |v| verdict_json(env, alpha, v)),
    );
    m.insert(
        "implications".into(),
        json!(c.violated_implication().map_or("consistent".to_string(), |v| format!("violated: {v}"))),
    );
    Ok(Value::Object(m))
}

pub fn region_vertices(game: &GameFile, opts: &Options, kind: RegionKind) -> Result<Vec<Point>> {
    let env = &game.env;
    let threats = resolve_threats(game, &opts.threats)?;
    Ok(match kind {
        RegionKind::Ice => ice_payoff_region(env, &threats, opts.mode, REGION_RESOLUTION)?,
        RegionKind::Ce => ce_payoff_region(env, REGION_RESOLUTION)?,
        RegionKind::Ir => ir_payoff_region(env, &threats, opts.mode, REGION_RESOLUTION)?,
        RegionKind::Nash => nash_pure_hull(env)?,
    })
}

pub fn vertex_text(p: &Point) -> String {
    format!("{},{}", p.0, p.1)
}

pub fn region(game: &GameFile, opts: &Options) -> Result<(Value, Vec<(RegionKind, Vec<Point>)>)> {
    if opts.regions.is_empty() {
        bail!("no region requested");
    }
    let mut computed = Vec::new();
    for &k in &opts.regions {
        computed.push((k, region_vertices(game, opts, k)?));
    }
    let mut m = header(game, "region");
    m.insert("threats".into(), json!(opts.threats));
    m.insert("mode".into(), json!(mode_name(opts.mode)));
    let mut regions = Map::new();
    for (k, v) in &computed {
        regions.insert(
            k.name().into(),
            json!({"vertices": v.iter().map(vertex_text).collect::<Vec<_>>()}),
        );
    }
    if let [(k, v)] = computed.as_slice() {
        m.insert("which".into(), json!(k.name()));
        m.insert("vertices".into(), json!(v.iter().map(vertex_text).collect::<Vec<_>>()));
    }
    m.insert("regions".into(), Value::Object(regions));
    Ok((Value::Object(m), computed))
}

fn strategy_json(env: &Environment, i: usize, d: &DeviationStrategy) -> Value {
    let mut m = Map::new();
    for (rec, &play) in d.0.iter().enumerate() {
        m.insert(env.action_label(i, rec).into(), json!(env.action_label(i, play)));
    }
    Value::Object(m)
}

pub fn oracle(game: &GameFile, opts: &Options) -> Result<Value> {
    let env = &game.env;
    if opts.mode != PunishmentMode::WorstInThreats {
        bail!("the mediated oracle models worst punishments only; use --mode worst");
    }
    let (name, alpha) = resolve_dist(game, opts)?;
    let threats = resolve_threats(game, &opts.threats)?;
    let cert = is_ice(env, alpha, &threats, opts.mode)?;
    let (theta, source) = match (cert.theta(env), game.order(name)) {
        (Some(t), _) => (t, "lp certificate"),
        (None, Some(o)) => (o.clone(), "file"),
        (None, None) => (OrderingDistribution::uniform(env, alpha), "uniform"),
    };
    let mech = MediatedMechanism::build(env, alpha, &theta, &threats)?;
    let check = mech.is_nash()?;
    let players: Vec<Value> = check
        .players
        .iter()
        .map(|p| {
            json!({
                "player": env.player_name(p.player),
                "compliance": rat(&p.compliance),
                "best_deviation": strategy_json(env, p.player, &p.best),
                "best_value": rat(&p.best_value),
                "gain": rat(&p.gain()),
                "strategies": p.strategies,
            })
        })
        .collect();
    // A positive LP verdict must survive the replay; a negative one is
    // refuted for every θ by the Farkas vector, so the tested θ must fail.
    let agreement = cert.verdict == check.holds;

    let sim = mech.simulate(opts.seed, opts.samples, None)?;
    let frequencies: Vec<Value> = sim
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(p, &c)| {
            json!({
                "profile": profile_label(env, &env.profile_at(p)),
                "count": c,
                "frequency": rat(&sim.frequency(p)),
                "target": rat(alpha.weight(p)),
            })
        })
        .collect();
    let mut simulation = json!({
        "seed": sim.seed,
        "rounds": sim.rounds,
        "shards": sim.shards,
        "frequencies": frequencies,
        "mean_payoffs": sim.mean_payoffs.iter().map(rat).collect::<Vec<_>>(),
        "expected_payoffs": (0..env.num_players()).map(|i| rat(&alpha.expected_payoff(env, i))).collect::<Vec<_>>(),
    });
    if let Some(p) = check.players.iter().find(|p| p.gain().is_positive()) {
        let dev = mech.simulate(opts.seed, opts.samples, Some((p.player, &p.best)))?;
        simulation["deviation"] = json!({
            "player": env.player_name(p.player),
            "strategy": strategy_json(env, p.player, &p.best),
            "mean_payoff": rat(&dev.mean_payoffs[p.player]),
            "exact_payoff": rat(&p.best_value),
        });
    }

    let mut m = header(game, "oracle");
    m.insert("distribution".into(), json!({"name": name, "weights": distribution_json(env, alpha)}));
    m.insert("threats".into(), json!({"declared": opts.threats, "effective": set_text(env, mech.effective_threats())}));
    m.insert("lp".into(), json!({"holds": cert.verdict, "certificate": certificate_json(env, alpha, &cert)}));
    m.insert(
        "mechanism".into(),
        json!({"theta_source": source, "theta": theta_json(env, &theta), "holds": check.holds, "players": players}),
    );
    m.insert("agreement".into(), json!(agreement));
    m.insert("simulation".into(), simulation);
    Ok(Value::Object(m))
}
