//! Text tile diagrams: each state marks the basis cells its support covers.
//!
//! Two-register blocks draw one grid (first register down, second across).
//! Three-register blocks draw one grid per label of the first register.
//! Composed sets draw one diagram per block, showing the states that are
//! active in that block. The stopper is omitted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::families::StateSet;
use crate::linalg::Ket;
use crate::{Error, Result};

/// Short cell name: the label with a leading `phi` and any block suffix
/// removed.
fn short(label: &str) -> &str {
    let s = label.strip_prefix("phi").unwrap_or(label);
    s.split('_').next().unwrap_or(s)
}

/// Support of `ket` restricted to the registers at `pos`, or `None` when
/// the ket leaves the all-ones fill on some register outside `pos`.
fn block_support(ket: &Ket, pos: &[usize]) -> Option<BTreeSet<Vec<usize>>> {
    let mut out = BTreeSet::new();
    for (t, _) in ket.entries() {
        if t.iter().enumerate().any(|(i, &l)| !pos.contains(&i) && l != 1) {
            return None;
        }
        out.insert(pos.iter().map(|&i| t[i]).collect());
    }
    Some(out)
}

fn grid(rows: usize, cols: usize, cells: &BTreeMap<(usize, usize), Vec<&str>>, out: &mut String) {
    let width = cells
        .values()
        .map(|v| v.join("/").chars().count())
        .chain([cols.to_string().len(), 1])
        .max()
        .unwrap_or(1);
    let rw = rows.to_string().len();
    let _ = write!(out, "{:rw$} |", "");
    for c in 1..=cols {
        let _ = write!(out, " {c:>width$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}-+{}", "-".repeat(rw), "-".repeat((width + 1) * cols));
    for r in 1..=rows {
        let _ = write!(out, "{r:>rw$} |");
        for c in 1..=cols {
            let cell = cells.get(&(r, c)).map(|v| v.join("/")).unwrap_or_else(|| ".".into());
            let _ = write!(out, " {cell:>width$}");
        }
        out.push('\n');
    }
}

pub fn render_tiles(set: &StateSet) -> Result<String> {
    let layout = set.layout();
    let blocks = set.blocks();
    let composed = blocks.len() > 1;
    let mut out = String::new();
    let _ = writeln!(out, "{} {:?}: {} states, stopper {} omitted", set.family, set.params, set.len(), set.stopper);
    for (b, ids) in blocks.iter().enumerate() {
        let pos: Vec<usize> = ids
            .iter()
            .map(|id| layout.require(id).map(|(p, _)| p))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = pos.iter().map(|&p| layout.registers()[p].dim).collect();
        if !(2..=3).contains(&pos.len()) {
            return Err(Error::InvalidParameters(format!(
                "tiles need blocks of two or three registers, got {}",
                pos.len()
            )));
        }
        let mut members = Vec::new();
        for s in set.states().iter().filter(|s| s.label != set.stopper) {
            if let Some(sup) = block_support(&s.ket, &pos) {
                // The all-ones fill belongs to no block.
                if composed && sup.iter().all(|t| t.iter().all(|&l| l == 1)) {
                    continue;
                }
                members.push((s.label.as_str(), sup));
            }
        }
        if composed {
            let _ = writeln!(out, "\nblock {} ({}): {} states", b + 1, ids.join(","), members.len());
        } else {
            out.push('\n');
        }
        let names: Vec<&str> = ids.iter().map(String::as_str).collect();
        let slices: Vec<Option<usize>> = if pos.len() == 3 {
            (1..=dims[0]).map(Some).collect()
        } else {
            vec![None]
        };
        for slice in slices {
            let (rows, cols, rname, cname) = match slice {
                Some(c) => {
                    let _ = writeln!(out, "{} = {c}", names[0]);
                    (dims[1], dims[2], names[1], names[2])
                }
                None => (dims[0], dims[1], names[0], names[1]),
            };
            let mut cells: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
            for (label, sup) in &members {
                for t in sup {
                    let cell = match slice {
                        Some(c) if t[0] != c => continue,
                        Some(_) => (t[1], t[2]),
                        None => (t[0], t[1]),
                    };
                    let v = cells.entry(cell).or_default();
                    if !v.contains(&short(label)) {
                        v.push(short(label));
                    }
                }
            }
            let _ = writeln!(out, "rows {rname}, columns {cname}");
            grid(rows, cols, &cells, &mut out);
        }
    }
    Ok(out)
}

/// Number of states drawn for a non-composed set.
pub fn tile_count(set: &StateSet) -> usize {
    set.states().iter().filter(|s| s.label != set.stopper).count()
}
