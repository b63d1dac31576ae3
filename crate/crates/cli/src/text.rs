//! Human-readable renderings for `--format text`. Not a stable format.

use std::fmt::Write;

use locc_core::engine::{Complement, DiscriminationReport, Leaf, Node, ProtocolTree};
use locc_core::families::StateSet;
use locc_core::scalar::to_fraction_string as frac;
use locc_core::verification::{SetCheck, WitnessResult};

pub(crate) fn set(set: &StateSet) -> String {
    let mut out = format!(
        "{} {:?}: {} states (claimed {}), registers {}\n",
        set.family,
        set.params,
        set.len(),
        set.claimed_count,
        set.layout().ids().join(",")
    );
    for s in set.states() {
        let terms: Vec<String> = s
            .ket
            .entries()
            .map(|(t, a)| {
                let t: Vec<String> = t.iter().map(|l| l.to_string()).collect();
                format!("{}|{}>", frac(a), t.join(","))
            })
            .collect();
        let _ = writeln!(out, "{}: {}", s.label, terms.join(" + "));
    }
    out
}

pub(crate) fn check(c: &SetCheck) -> String {
    let mut out = format!("{} {:?}\n", c.family, c.params);
    let _ = writeln!(out, "orthogonal: {}", c.gram_ok);
    for (a, b) in &c.non_orthogonal {
        let _ = writeln!(out, "  <{a}|{b}> != 0");
    }
    let _ = writeln!(out, "product:    {}", c.product_ok);
    for s in &c.entangled {
        let _ = writeln!(out, "  {s} is entangled across some cut");
    }
    let _ = writeln!(out, "count:      {} ({} enumerated, {} claimed)", c.count_ok, c.count.actual, c.count.claimed);
    for w in &c.witness {
        let _ = writeln!(
            out,
            "witness {}: solution dimension {}, trivial only {}",
            w.party, w.solution_dim, w.trivial_only
        );
    }
    out
}

fn node(n: &Node, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match n {
        Node::Leaf(Leaf::Declare(l)) => {
            let _ = writeln!(out, "{pad}=> {l}");
        }
        Node::Leaf(Leaf::Fail) => {
            let _ = writeln!(out, "{pad}=> FAIL");
        }
        Node::Measure(m) => {
            let tag = m.tag.as_deref().map(|t| format!(" [{t}]")).unwrap_or_default();
            let _ = writeln!(out, "{pad}{} measures{tag}", m.party);
            for o in &m.outcomes {
                let ps = if o.postselect { " (post-selected)" } else { "" };
                let _ = writeln!(out, "{pad}- {} on {}{ps}", o.label(), o.op.registers().join(","));
                node(&o.child, depth + 1, out);
            }
            let c = match &m.complement {
                Complement::Forbidden => None,
                Complement::Fail => Some("FAIL".to_owned()),
                Complement::Declare(l) => Some(l.clone()),
            };
            if let Some(c) = c {
                let _ = writeln!(out, "{pad}- otherwise => {c}");
            }
        }
    }
}

pub(crate) fn tree(t: &ProtocolTree) -> String {
    let mut out = format!("{} on {} {:?}\n", t.name, t.set.family, t.set.params);
    node(&t.root, 0, &mut out);
    if !t.discrepancies.is_empty() {
        out.push_str("deviations from the printed protocol:\n");
        for d in &t.discrepancies {
            let _ = writeln!(out, "  {:?} at {}: {} -> {}", d.kind, d.location, d.printed, d.used);
        }
    }
    out
}

pub(crate) fn runs(v: &serde_json::Value) -> String {
    let mut out = String::new();
    if let Some(runs) = v["runs"].as_object() {
        for (state, leaves) in runs {
            let _ = writeln!(out, "{state}:");
            for (path, leaf) in leaves.as_object().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "  {path} -> {} with probability {}",
                    leaf["declared"].as_str().unwrap_or("?"),
                    leaf["probability"].as_str().unwrap_or("?")
                );
            }
        }
    }
    out
}

pub(crate) fn report(r: &DiscriminationReport) -> String {
    let mut out = format!(
        "{} on {} {:?} ({}): perfect = {}\n",
        r.protocol,
        r.family,
        r.params,
        if r.post_selected { "post-selected" } else { "unconditional" },
        r.perfect
    );
    for (label, s) in &r.states {
        let _ = writeln!(
            out,
            "  {label}: branch {}, identified {}, conditional {}",
            frac(&s.branch_probability),
            frac(&s.identified),
            frac(&s.conditional_success)
        );
    }
    for f in &r.failures {
        let _ = writeln!(out, "failure: {f}");
    }
    out
}

pub(crate) fn witness(results: &[WitnessResult]) -> String {
    let mut out = String::new();
    for w in results {
        let _ = writeln!(
            out,
            "{}: solution dimension {}, trivial only {}",
            w.party, w.solution_dimension, w.trivial_only
        );
    }
    out.push_str(locc_core::verification::WITNESS_SCOPE);
    out.push('\n');
    out
}
