//! Round-trip properties of the Bristol writer and parser over random
//! circuits: re-parsing a written circuit preserves structure and function,
//! and writing is idempotent after one canonicalization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use strata_core::backend::{Backend, PlainBackend, SecurityParams};
use strata_core::circuit::Circuit;
use strata_core::eval::{decrypt_outputs, encrypt_inputs, eval_serial};
use strata_core::netlist::{parse_bristol, write_bristol};
use strata_core::refcircuits::random::{random_circuit, random_inputs, RandomCircuitParams};
use strata_core::schedule::topo_sort;

fn eval_bits(circuit: &Circuit, inputs: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let backend = PlainBackend;
    let keys = backend.keygen(&SecurityParams::default_128()).unwrap();
    let values = encrypt_inputs(&backend, &keys, inputs).unwrap();
    let order = topo_sort(circuit).unwrap();
    let report = eval_serial(circuit, &order, &backend, &keys, &values).unwrap();
    decrypt_outputs(&backend, &keys, report).unwrap().outputs
}

#[test]
fn parse_write_round_trip_preserves_structure_and_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0);
    for _ in 0..100 {
        let original = random_circuit(&mut rng, &RandomCircuitParams::default());
        let text = write_bristol(&original).expect("random circuits are writable");
        let reparsed = parse_bristol(&text).expect("writer output parses").circuit;

        assert_eq!(reparsed.gate_count(), original.gate_count());
        assert_eq!(reparsed.wire_count(), original.wire_count());
        assert_eq!(
            reparsed.inputs().iter().map(Vec::len).collect::<Vec<_>>(),
            original.inputs().iter().map(Vec::len).collect::<Vec<_>>()
        );
        assert!(reparsed.validate().is_ok());

        // writing again is bit-stable: the reparsed circuit is canonical
        let again = write_bristol(&reparsed).unwrap();
        assert_eq!(text, again);

        // same boolean function on random assignments
        for _ in 0..5 {
            let inputs = random_inputs(&mut rng, &original);
            assert_eq!(eval_bits(&original, &inputs), eval_bits(&reparsed, &inputs));
        }
    }
}

#[test]
fn bundled_aes_round_trips_byte_identical() {
    let text = strata_core::refcircuits::bundled_aes_text();
    let parsed = parse_bristol(text).unwrap().circuit;
    let rewritten = write_bristol(&parsed).unwrap();
    assert_eq!(text.trim_end(), rewritten.trim_end());
}

#[test]
fn parser_and_validator_agree_on_writer_output() {
    // circuits that reach the writer are validated, so everything the
    // writer emits must parse without error diagnostics and validate clean
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1);
    for _ in 0..30 {
        let original = random_circuit(&mut rng, &RandomCircuitParams::default());
        let text = write_bristol(&original).unwrap();
        let parsed = parse_bristol(&text).unwrap();
        assert!(parsed.circuit.validate().is_ok());
        assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    }
}
