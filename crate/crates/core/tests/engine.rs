use locc_core::builders::theorem1_protocol;
use locc_core::engine::{
    simulate, validate, validate_against, verify_perfect, Complement, MeasurementNode, Node, Outcome, ProtocolTree,
    ResourceSpec, SetRef,
};
use locc_core::families::{self, Family, LabeledKet, StateSet};
use locc_core::linalg::{tensor, Ket, LocalOperator, Register, SystemLayout};
use locc_core::scalar::{frac, int, one, zero};
use locc_core::{json, Scalar};

fn layout() -> SystemLayout {
    SystemLayout::new(vec![Register::principal("A", "Alice", 3), Register::principal("B", "Bob", 3)]).unwrap()
}

fn basis_set(labels: &[(usize, usize)]) -> StateSet {
    let l = layout();
    let states = labels
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| LabeledKet {
            label: format!("s{}", i + 1),
            ket: Ket::basis(l.clone(), &[a, b]).unwrap(),
        })
        .collect();
    StateSet::new(Family::BipartiteEq1, vec![3, 3], labels.len(), "s1", states).unwrap()
}

fn proj(party: &str, reg: &str, v: &[(usize, i64)], label: &str) -> LocalOperator {
    let vec: Vec<(Vec<usize>, Scalar)> = v.iter().map(|&(i, a)| (vec![i], int(a))).collect();
    LocalOperator::projector(&layout(), party, &[reg], &[vec], label).unwrap()
}

fn tree(root: Node) -> ProtocolTree {
    ProtocolTree {
        name: "test".into(),
        set: SetRef {
            family: Family::BipartiteEq1,
            params: vec![3, 3],
        },
        resource: ResourceSpec::default(),
        root,
        discrepancies: vec![],
        notes: vec![],
    }
}

#[test]
fn separating_basis_measurement_is_perfect() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![
            Outcome::new(proj("Alice", "A", &[(1, 1)], "a1"), Node::declare("s1")),
            Outcome::new(proj("Alice", "A", &[(2, 1)], "a2"), Node::declare("s2")),
        ],
        Complement::Fail,
    )));
    let r = verify_perfect(&t, &set, false).unwrap();
    assert!(r.perfect, "{:?}", r.failures);
    assert_eq!(r.states["s1"].identified, one());
    assert!(r.diagnostics.completeness.len() == 1);
}

#[test]
fn operator_on_foreign_register_is_a_locality_violation() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![
            Outcome::new(proj("Alice", "B", &[(1, 1)], "b1"), Node::declare("s1")),
            Outcome::new(proj("Alice", "B", &[(2, 1)], "b2"), Node::declare("s2")),
        ],
        Complement::Fail,
    )));
    let d = validate_against(&t, &set);
    assert!(!d.locality_violations.is_empty());
    assert!(!verify_perfect(&t, &set, false).unwrap().perfect);
}

#[test]
fn overlapping_outcomes_are_flagged() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![
            Outcome::new(proj("Alice", "A", &[(1, 1)], "p1"), Node::declare("s1")),
            Outcome::new(proj("Alice", "A", &[(1, 1), (2, 1)], "p12"), Node::declare("s2")),
        ],
        Complement::Fail,
    )));
    let d = validate_against(&t, &set);
    assert!(!d.non_orthogonal_outcomes.is_empty());
    assert!(!d.is_clean());
}

#[test]
fn non_projector_is_flagged() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let l = layout();
    let m = locc_core::linalg::SparseMatrix::from_entries(3, [((0, 0), int(2))]).unwrap();
    let op = LocalOperator::new(&l, "Alice", &["A"], m, "twice").unwrap();
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![Outcome::new(op, Node::declare("s1"))],
        Complement::Fail,
    )));
    assert!(!validate_against(&t, &set).non_projectors.is_empty());
}

#[test]
fn failing_complement_takes_the_remaining_weight() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![Outcome::new(proj("Alice", "A", &[(3, 1)], "a3"), Node::declare("s1"))],
        Complement::Fail,
    )));
    let r = verify_perfect(&t, &set, false).unwrap();
    assert_eq!(r.states["s1"].failed, one());
    assert_eq!(r.states["s1"].identified, zero());
    assert!(!r.perfect);
}

#[test]
fn forbidden_complement_with_a_gap_is_structural() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![Outcome::new(proj("Alice", "A", &[(1, 1)], "a1"), Node::declare("s1"))],
        Complement::Forbidden,
    )));
    let d = validate_against(&t, &set);
    assert!(!d.structural.is_empty());
}

#[test]
fn shared_leaf_is_not_perfect() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::measure(MeasurementNode::new(
        "Alice",
        vec![Outcome::new(proj("Alice", "A", &[(1, 1), (2, 1)], "a12"), Node::declare("s1"))],
        Complement::Fail,
    )));
    let r = verify_perfect(&t, &set, false).unwrap();
    assert!(!r.perfect);
    assert_eq!(r.shared_leaves.len(), 1);
    assert_eq!(r.shared_leaves[0].states, vec!["s1".to_string(), "s2".to_string()]);
}

#[test]
fn unknown_leaf_label_is_flagged() {
    let set = basis_set(&[(1, 1), (2, 2)]);
    let t = tree(Node::declare("nobody"));
    assert_eq!(validate_against(&t, &set).unknown_labels.len(), 1);
}

#[test]
fn simulation_probabilities_sum_to_one() {
    let t = theorem1_protocol(4, 5).unwrap();
    let set = families::build_bipartite_eq1(4, 5).unwrap();
    let res = t.resource.kets().unwrap();
    for s in set.states() {
        let mut parts = vec![&s.ket];
        parts.extend(res.iter());
        let hits = simulate(&t, &tensor(&parts).unwrap()).unwrap();
        let total = hits.values().fold(zero(), |acc, h| acc + &h.probability);
        assert_eq!(total, one(), "{}", s.label);
        let fail: Scalar = hits.values().filter(|h| !h.in_postselection).fold(zero(), |a, h| a + &h.probability);
        assert_eq!(fail, one() - frac(1, 5));
    }
}

#[test]
fn simulate_rejects_wrong_registers() {
    let t = theorem1_protocol(4, 5).unwrap();
    let set = families::build_bipartite_eq1(4, 5).unwrap();
    assert!(simulate(&t, &set.states()[0].ket).is_err());
}

#[test]
fn tree_json_round_trip() {
    for t in [theorem1_protocol(4, 5).unwrap(), locc_core::builders::tripartite456_protocol().unwrap()] {
        let text = json::to_string(&t).unwrap();
        let back: ProtocolTree = json::from_str(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(json::to_string(&back).unwrap(), text);
        assert!(validate(&back).is_clean());
    }
}

#[test]
fn malformed_tree_json_names_the_path() {
    let t = theorem1_protocol(4, 4).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&json::to_string(&t).unwrap()).unwrap();
    v["root"]["outcomes"][0]["matrix"]["dim"] = serde_json::json!("x");
    let err = json::from_str::<ProtocolTree>(&v.to_string()).unwrap_err().to_string();
    assert!(err.contains("root"), "{err}");
}
