//! Regenerates the bundled circuit data files and their manifest.
//!
//! Usage: `cargo run -p strata-core --example gen_circuits`
//! (writes into `crates/core/circuits/`).

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use strata_core::netlist::write_bristol;
use strata_core::refcircuits::build_aes128_circuit;
use strata_core::schedule::{assign_depths, layer_histogram, topo_sort};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("circuits");
    fs::create_dir_all(&dir).unwrap();

    let aes = build_aes128_circuit();
    let report = aes.validate();
    assert!(report.is_ok(), "{report}");
    let text = write_bristol(&aes).expect("aes circuit is canonical");

    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let sha: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();

    let depths = assign_depths(&aes, &topo_sort(&aes).unwrap()).unwrap();
    let hist = layer_histogram(&depths);

    fs::write(dir.join("aes_128.txt"), &text).unwrap();
    let manifest = serde_json::json!({
        "circuits": {
            "aes_128": {
                "file": "aes_128.txt",
                "sha256": sha,
                "gates": aes.gate_count(),
                "wires": aes.wire_count(),
                "depth": depths.circuit_depth(),
                "inputs": [
                    { "name": "plaintext", "bits": 128 },
                    { "name": "expanded_key", "bits": 1408,
                      "note": "11 round keys of 128 bits, MSB-first; clients precompute key expansion" }
                ],
                "outputs": [ { "name": "ciphertext", "bits": 128 } ]
            }
        }
    });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap() + "\n",
    )
    .unwrap();

    println!(
        "aes_128: {} gates, {} wires, depth {}, max width {}, sha256 {}",
        aes.gate_count(),
        aes.wire_count(),
        depths.circuit_depth(),
        hist.max_width(),
        sha
    );
}
