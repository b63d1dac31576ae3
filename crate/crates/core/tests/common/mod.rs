#![allow(dead_code)]

use std::collections::BTreeMap;

use locc_core::engine::{simulate, LeafMap, ProtocolTree};
use locc_core::families::StateSet;
use locc_core::linalg::tensor;
use locc_core::Scalar;

/// Leaf map of every state of `set`, with the resource attached.
pub fn run_all(tree: &ProtocolTree, set: &StateSet) -> BTreeMap<String, LeafMap> {
    let res = tree.resource.kets().unwrap();
    set.states()
        .iter()
        .map(|s| {
            let mut parts = vec![&s.ket];
            parts.extend(res.iter());
            (s.label.clone(), simulate(tree, &tensor(&parts).unwrap()).unwrap())
        })
        .collect()
}

/// Probability of each declared result, restricted to post-selected leaves
/// when `post_selected`.
pub fn declared(hits: &LeafMap, post_selected: bool) -> BTreeMap<String, Scalar> {
    let mut out: BTreeMap<String, Scalar> = BTreeMap::new();
    for h in hits.values() {
        if post_selected && !h.in_postselection {
            continue;
        }
        *out.entry(h.kind.as_str().to_owned()).or_default() += &h.probability;
    }
    out
}

/// Dense amplitude vector of a ket over its layout, row-major.
pub fn dense(k: &locc_core::linalg::Ket) -> Vec<Scalar> {
    let dims = k.layout().dims();
    let mut v = vec![Scalar::default(); dims.iter().product()];
    for (t, a) in k.entries() {
        let mut idx = 0;
        for (l, d) in t.iter().zip(&dims) {
            idx = idx * d + (l - 1);
        }
        v[idx] = a.clone();
    }
    v
}
