//! Human-readable rendering of JSON reports.

use std::fmt::Write as _;

use serde_json::Value;

use crate::expect::render as flat;

fn s(v: &Value, key: &str) -> String {
    crate::expect::lookup(v, key).map_or_else(String::new, flat)
}

fn yn(v: &Value, key: &str) -> &'static str {
    match crate::expect::lookup(v, key) {
        Some(Value::Bool(true)) => "yes",
        Some(Value::Bool(false)) => "no",
        _ => "-",
    }
}

fn certificate(out: &mut String, cert: &Value, indent: &str) {
    let verified = if cert["verified"] == Value::Bool(true) { "verified" } else { "NOT VERIFIED" };
    match cert["kind"].as_str() {
        Some("ordering") => {
            let _ = writeln!(out, "{indent}move orders ({verified}):");
            for row in cert["theta"].as_array().into_iter().flatten() {
                let _ = writeln!(out, "{indent}  {:<12} {}", s(row, "profile"), s(row, "orders"));
            }
        }
        Some("farkas") => {
            let _ = writeln!(out, "{indent}Farkas multipliers ({verified}):");
            for row in cert["multipliers"].as_array().into_iter().flatten() {
                let _ = writeln!(out, "{indent}  {:<40} {}", s(row, "row"), s(row, "multiplier"));
            }
        }
        _ => {}
    }
}

fn tightest(out: &mut String, row: &Value) {
    if row.is_null() {
        let _ = writeln!(out, "    no deviation rows");
    } else {
        let _ = writeln!(
            out,
            "    tightest row: {} told {} -> {}: {}",
            s(row, "player"),
            s(row, "recommended"),
            s(row, "deviation"),
            s(row, "value")
        );
    }
}

fn weights(out: &mut String, report: &Value) {
    let _ = writeln!(out, "distribution {}:", s(report, "distribution.name"));
    for w in report["distribution"]["weights"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "  {:<12} {}", s(w, "profile"), s(w, "weight"));
    }
}

fn trace(out: &mut String, t: &Value) {
    for r in t["removals"].as_array().into_iter().flatten() {
        let _ = writeln!(
            out,
            "    round {}: {} drops {} ({} by {})",
            s(r, "round"),
            s(r, "player"),
            s(r, "action"),
            s(r, "reason"),
            s(r, "by")
        );
    }
}

pub fn check(r: &Value) -> String {
    let mut out = String::new();
    weights(&mut out, r);
    let _ = writeln!(
        out,
        "threats {} = {} (effective {}), mode {}",
        s(r, "threats.declared"),
        s(r, "threats.set"),
        s(r, "threats.effective"),
        s(r, "mode")
    );
    let _ = writeln!(out, "CE:  {}", yn(r, "ce.holds"));
    tightest(&mut out, &r["ce"]["tightest_row"]);
    let _ = writeln!(out, "IR:  {}", yn(r, "ir.holds"));
    tightest(&mut out, &r["ir"]["tightest_row"]);
    let _ = writeln!(out, "ICE: {}", yn(r, "ice.holds"));
    certificate(&mut out, &r["ice"]["certificate"], "    ");
    out
}

pub fn sets(r: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "A       = {}", s(r, "full"));
    for (key, name) in [("r", "R"), ("cr", "A^CR"), ("fcr", "A^FR")] {
        let _ = writeln!(out, "{name:<7} = {}", s(&r[key], "set"));
        trace(&mut out, &r[key]["trace"]);
    }
    let _ = writeln!(out, "A^inf   = {}  (threats A^inf u R = {})", s(r, "a_infinity.set"), s(r, "a_infinity.threats"));
    for step in r["a_infinity"]["trace"].as_array().into_iter().flatten() {
        let removed = s(step, "removed");
        let _ = writeln!(
            out,
            "    round {}: {} -> {}{}  [{} slices]",
            s(step, "round"),
            s(step, "input"),
            s(step, "output"),
            if removed.is_empty() { String::new() } else { format!(", drops {removed}") },
            s(step, "slices_solved")
        );
    }
    out
}

pub fn classify(r: &Value) -> String {
    let mut out = String::new();
    weights(&mut out, r);
    let _ = writeln!(
        out,
        "flags: no strict dominance {}, no absolute dominance {}, generic 2x2 {}",
        yn(r, "flags.no_strict_dominance"),
        yn(r, "flags.no_absolute_dominance"),
        yn(r, "flags.generic_2x2")
    );
    let lines = [
        ("nash", "Nash implementable", "B = A", ""),
        ("quasi_sequential", "quasi-sequential", "B = A^FR", "  "),
        ("sequential_necessary", "sequential, necessary", "B = A^FR", "    "),
        ("sequential_sufficient", "sequential, sufficient", "B = A^inf u R", "    "),
        ("sequential_2x2", "sequential, 2x2 exact", "B = A^CR", "    "),
    ];
    for (key, label, rule, indent) in lines {
        if r[key].is_null() {
            let _ = writeln!(out, "{indent}{label:<24} n/a (not a generic 2x2 game)");
            continue;
        }
        let _ = writeln!(out, "{indent}{label:<24} {:<4} {rule} = {}", yn(r, &format!("{key}.holds")), s(r, &format!("{key}.threats")));
        certificate(&mut out, &r[key]["certificate"], &format!("{indent}    "));
    }
    let _ = writeln!(out, "implications: {}", s(r, "implications"));
    out
}

pub fn region(r: &Value) -> String {
    let mut out = String::new();
    for (name, reg) in r["regions"].as_object().into_iter().flatten() {
        let _ = writeln!(out, "{name}: {}", s(reg, "vertices"));
    }
    out
}

pub fn oracle(r: &Value) -> String {
    let mut out = String::new();
    weights(&mut out, r);
    let _ = writeln!(out, "LP:        {}", yn(r, "lp.holds"));
    certificate(&mut out, &r["lp"]["certificate"], "    ");
    let _ = writeln!(out, "mechanism: {}  (orders from {})", yn(r, "mechanism.holds"), s(r, "mechanism.theta_source"));
    for p in r["mechanism"]["players"].as_array().into_iter().flatten() {
        let _ = writeln!(
            out,
            "    player {}: comply {}, best deviation {} worth {} (gain {}, {} strategies)",
            s(p, "player"),
            s(p, "compliance"),
            s(p, "best_deviation"),
            s(p, "best_value"),
            s(p, "gain"),
            s(p, "strategies")
        );
    }
    let _ = writeln!(out, "agreement: {}", yn(r, "agreement"));
    let sim = &r["simulation"];
    let _ = writeln!(out, "simulation: seed {}, {} rounds", s(sim, "seed"), s(sim, "rounds"));
    for f in sim["frequencies"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "    {:<12} {} (target {})", s(f, "profile"), s(f, "count"), s(f, "target"));
    }
    let _ = writeln!(out, "    mean payoffs {} (expected {})", approx_list(&sim["mean_payoffs"]), s(sim, "expected_payoffs"));
    if !sim["deviation"].is_null() {
        let d = &sim["deviation"];
        let _ = writeln!(
            out,
            "    player {} deviating {}: mean {} (exact {})",
            s(d, "player"),
            s(d, "strategy"),
            approx(&d["mean_payoff"]),
            s(d, "exact_payoff")
        );
    }
    out
}

fn approx(v: &Value) -> String {
    v.as_str()
        .and_then(|t| ice_lab::rational::parse(t).ok())
        .map_or_else(|| flat(v), |q| format!("{:.4}", ice_lab::rational::to_f64(&q)))
}

fn approx_list(v: &Value) -> String {
    v.as_array().into_iter().flatten().map(approx).collect::<Vec<_>>().join(" ")
}

pub fn expectations(outcomes: &[Value]) -> String {
    let mut out = String::new();
    if outcomes.is_empty() {
        return out;
    }
    let _ = writeln!(out, "stated claims:");
    for o in outcomes {
        let _ = writeln!(
            out,
            "    line {}: {} {} {} -> {} (actual {})",
            s(o, "line"),
            s(o, "claim"),
            s(o, "relation"),
            s(o, "stated"),
            s(o, "status"),
            s(o, "actual")
        );
    }
    out
}
