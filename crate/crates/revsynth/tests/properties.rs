//! Property-based invariants: exact-unitary algebra under random primitive
//! sequences, and serialization/evaluation invariants on randomly wired
//! catalog netlists.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use revsynth::format;
use revsynth::gate::builtin_gate;
use revsynth::netlist::{LineRole, NetlistBuilder, ReversibilityVerdict};
use revsynth::quantum::{sequence_unitary, ExactUnitary, PrimitiveOp};

fn arb_op(width: usize) -> impl Strategy<Value = PrimitiveOp> {
    (0..4u8, 0..width, 0..width - 1).prop_map(move |(kind, target, c)| {
        let control = if c >= target { c + 1 } else { c };
        match kind {
            0 => PrimitiveOp::not(target),
            1 => PrimitiveOp::cnot(control, target),
            2 => PrimitiveOp::cv(control, target),
            _ => PrimitiveOp::cvdag(control, target),
        }
    })
}

proptest! {
    /// Any primitive sequence composes to an exactly unitary matrix.
    #[test]
    fn sequences_compose_to_unitaries(ops in prop::collection::vec(arb_op(3), 0..=6)) {
        let u = sequence_unitary(&ops, 3).unwrap();
        prop_assert!(u.is_unitary());
    }

    /// Running a sequence and then its inverse is the identity.
    #[test]
    fn inverse_sequence_cancels(ops in prop::collection::vec(arb_op(3), 0..=6)) {
        let forward = sequence_unitary(&ops, 3).unwrap();
        prop_assert!(forward.mul(&forward.dagger()).is_identity());
    }

    /// Composition order matters but matrix algebra is associative:
    /// U(a ++ b) = U(b) * U(a).
    #[test]
    fn concatenation_is_matrix_product(
        a in prop::collection::vec(arb_op(3), 0..=3),
        b in prop::collection::vec(arb_op(3), 0..=3),
    ) {
        let mut ab = a.clone();
        ab.extend(b.iter().cloned());
        let whole = sequence_unitary(&ab, 3).unwrap();
        let parts = sequence_unitary(&b, 3).unwrap().mul(&sequence_unitary(&a, 3).unwrap());
        prop_assert_eq!(whole, parts);
    }
}

/// A random combinational netlist over the bijective catalog gates.
fn arb_netlist() -> impl Strategy<Value = revsynth::netlist::Netlist> {
    let gate_names = prop::sample::select(vec!["not", "fg", "dfg", "tg", "frg", "pg", "mfrg1", "mfrg2"]);
    (4..9usize, prop::collection::vec((gate_names, prop::num::u64::ANY), 1..12)).prop_map(
        |(width, picks)| {
            let mut b = NetlistBuilder::new("random");
            let lines: Vec<usize> = (0..width)
                .map(|i| {
                    let role = match i % 3 {
                        0 => LineRole::PrimaryInput,
                        1 => LineRole::ConstantZero,
                        _ => LineRole::ConstantOne,
                    };
                    b.line(format!("x{i}"), role)
                })
                .collect();
            for (name, mut seed) in picks {
                let gate = Arc::new(builtin_gate(name).unwrap());
                // pick distinct lines pseudo-randomly from the seed
                let mut chosen = Vec::new();
                while chosen.len() < gate.width {
                    let pick = lines[(seed % width as u64) as usize];
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                    if !chosen.contains(&pick) {
                        chosen.push(pick);
                    }
                }
                b.gate(gate, chosen);
            }
            for (i, &line) in lines.iter().enumerate() {
                if i % 2 == 0 {
                    b.primary(line, format!("y{i}"));
                } else {
                    b.garbage(line);
                }
            }
            b.finish().unwrap()
        },
    )
}

proptest! {
    /// parse . serialize is the identity on random catalog netlists.
    #[test]
    fn random_netlists_round_trip(netlist in arb_netlist()) {
        let text = format::serialize(&netlist);
        let parsed = format::parse(&text).unwrap();
        prop_assert_eq!(format::serialize(&parsed), text);
        prop_assert_eq!(parsed.metrics(), netlist.metrics());
    }

    /// Netlists built purely from bijective gates are always reversible.
    #[test]
    fn catalog_netlists_are_reversible(netlist in arb_netlist()) {
        prop_assert_eq!(
            netlist.check_reversibility().unwrap(),
            ReversibilityVerdict::Reversible
        );
    }

    /// Evaluating twice with the same assignment is deterministic, and the
    /// parsed copy evaluates identically to the original.
    #[test]
    fn parsed_netlists_evaluate_identically(netlist in arb_netlist(), seed in prop::num::u64::ANY) {
        let free = netlist.free_lines();
        let mut assignment = BTreeMap::new();
        for (pos, &idx) in free.iter().enumerate() {
            assignment.insert(
                netlist.lines()[idx].name.clone(),
                seed >> (pos % 64) & 1 == 1,
            );
        }
        let parsed = format::parse(&format::serialize(&netlist)).unwrap();
        let ours = netlist.evaluate(&assignment).unwrap();
        let theirs = parsed.evaluate(&assignment).unwrap();
        prop_assert_eq!(netlist.primary_outputs(&ours), parsed.primary_outputs(&theirs));
    }
}

/// The permutation of a composed gate sequence matches matrix composition
/// on a concrete example: CV;CV on the same pair equals CNOT.
#[test]
fn cv_squared_is_cnot_at_netlist_level() {
    let seq = [PrimitiveOp::cv(0, 1), PrimitiveOp::cv(0, 1)];
    let u = sequence_unitary(&seq, 2).unwrap();
    let cnot = ExactUnitary::from_permutation(&[0, 1, 3, 2]);
    assert_eq!(u, cnot);
}
