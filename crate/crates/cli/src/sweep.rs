//! `sweep`: verify one theorem's protocol over every admissible dimension
//! tuple up to a bound.

use locc_core::builders::build_protocol;
use locc_core::engine::verify_perfect;
use locc_core::par::{self, Exec};
use serde::Serialize;

use crate::{emit_json, status, Output, Status};

#[derive(Serialize)]
struct Cell {
    dims: Vec<usize>,
    states: usize,
    perfect: bool,
    nodes: usize,
    /// First failure message, or the build error.
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    schema: u32,
    theorem: String,
    max: usize,
    post_selected: bool,
    all_perfect: bool,
    cells: Vec<Cell>,
}

/// Non-decreasing tuples of length `k` over `4..=max`.
fn chains(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                let lo = t.last().copied().unwrap_or(4);
                (lo..=max).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

fn grid(theorem: &str, max: usize) -> anyhow::Result<Vec<Vec<usize>>> {
    let pairs = chains(2, max);
    Ok(match theorem {
        "1" => pairs,
        "3" => chains(3, max),
        "2" => pairs
            .iter()
            .flat_map(|a| pairs.iter().map(move |b| [a.as_slice(), b].concat()))
            .collect(),
        "4" => chains(3, max)
            .iter()
            .flat_map(|a| pairs.iter().map(move |b| [a.as_slice(), b].concat()))
            .collect(),
        other => anyhow::bail!("sweep supports theorems 1, 2, 3 and 4, not `{other}`"),
    })
}

fn cell(theorem: &str, dims: &[usize], post_selected: bool) -> Cell {
    let run = || -> locc_core::Result<(usize, usize, Option<String>, bool)> {
        let tree = build_protocol(theorem, dims)?;
        let set = tree.set.build()?;
        let r = verify_perfect(&tree, &set, post_selected)?;
        Ok((set.len(), tree.root.node_count(), r.failures.first().cloned(), r.perfect))
    };
    match run() {
        Ok((states, nodes, error, perfect)) => Cell {
            dims: dims.to_vec(),
            states,
            perfect,
            nodes,
            error,
        },
        Err(e) => Cell {
            dims: dims.to_vec(),
            states: 0,
            perfect: false,
            nodes: 0,
            error: Some(e.to_string()),
        },
    }
}

pub(crate) fn run(theorem: &str, max: usize, post_selected: bool, out: &Output) -> anyhow::Result<Status> {
    if max < 4 {
        anyhow::bail!("--max must be at least 4");
    }
    let dims = grid(theorem, max)?;
    let cells = par::map(Exec::Auto, &dims, |d| cell(theorem, d, post_selected));
    let summary = Summary {
        schema: locc_core::SCHEMA_VERSION,
        theorem: theorem.to_owned(),
        max,
        post_selected,
        all_perfect: cells.iter().all(|c| c.perfect),
        cells,
    };
    emit_json(out, &summary, || table(&summary))?;
    Ok(status(summary.all_perfect))
}

fn table(s: &Summary) -> String {
    let mut out = format!(
        "theorem {} up to {} ({})\n{:<16} {:>6} {:>6}  perfect\n",
        s.theorem,
        s.max,
        if s.post_selected { "post-selected" } else { "unconditional" },
        "dims",
        "states",
        "nodes"
    );
    for c in &s.cells {
        let dims = c.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        out.push_str(&format!("{:<16} {:>6} {:>6}  {}", dims, c.states, c.nodes, if c.perfect { "yes" } else { "no" }));
        if let Some(e) = &c.error {
            out.push_str(&format!("  ({e})"));
        }
        out.push('\n');
    }
    let ok = s.cells.iter().filter(|c| c.perfect).count();
    out.push_str(&format!("{ok}/{} perfect\n", s.cells.len()));
    out
}
