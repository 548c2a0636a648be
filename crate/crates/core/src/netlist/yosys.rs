//! Reader for Yosys `write_json` netlists mapped to the gate-level cell
//! library (`$_AND_`, `$_XOR_`, `$_MUX_`, ...).
//!
//! Only `direction`-bearing ports of the top module define circuit I/O;
//! named internal nets are ignored. Yosys lists port bits LSB-first; groups
//! here are MSB-first, so each port's bit list is reversed. Net numbers are
//! remapped to dense wire ids with input ports taking the lowest block, and
//! constant bits become `CONST0`/`CONST1` gates feeding fresh wires.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::Deserialize;

use crate::circuit::{Circuit, Gate, GateKind, WireId};
use crate::netlist::{ParseDiagnostic, ParseError, Parsed};

#[derive(Deserialize)]
struct Netlist {
    modules: IndexMap<String, Module>,
}

#[derive(Deserialize)]
struct Module {
    #[serde(default)]
    attributes: HashMap<String, serde_json::Value>,
    #[serde(default)]
    ports: IndexMap<String, Port>,
    #[serde(default)]
    cells: IndexMap<String, Cell>,
}

#[derive(Deserialize)]
struct Port {
    direction: String,
    bits: Vec<Bit>,
}

#[derive(Deserialize)]
struct Cell {
    #[serde(rename = "type")]
    cell_type: String,
    connections: IndexMap<String, Vec<Bit>>,
}

/// A connection bit: a net number or the constant strings "0"/"1"/"x"/"z".
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
enum Bit {
    Net(u64),
    Literal(String),
}

fn cell_kind(cell_type: &str) -> Option<GateKind> {
    Some(match cell_type {
        "$_AND_" => GateKind::And,
        "$_OR_" => GateKind::Or,
        "$_XOR_" => GateKind::Xor,
        "$_NAND_" => GateKind::Nand,
        "$_NOR_" => GateKind::Nor,
        "$_XNOR_" => GateKind::Xnor,
        "$_NOT_" => GateKind::Not,
        "$_ANDNOT_" => GateKind::AndNot,
        "$_ORNOT_" => GateKind::OrNot,
        "$_MUX_" => GateKind::Mux,
        "$_BUF_" => GateKind::Buf,
        _ => return None,
    })
}

/// Connection port names for a kind, in our canonical input order, plus the
/// output port.
fn cell_ports(kind: GateKind) -> (&'static [&'static str], &'static str) {
    match kind {
        GateKind::Not | GateKind::Buf => (&["A"], "Y"),
        GateKind::Mux => (&["S", "A", "B"], "Y"),
        _ => (&["A", "B"], "Y"),
    }
}

fn attr_is_set(value: &serde_json::Value) -> bool {
    match value {
        serde_json::Value::Number(n) => n.as_u64().unwrap_or(0) != 0,
        serde_json::Value::String(s) => s.contains('1'),
        serde_json::Value::Bool(b) => *b,
        _ => false,
    }
}

struct WireAlloc {
    map: HashMap<u64, WireId>,
    next: u32,
}

impl WireAlloc {
    fn net(&mut self, net: u64) -> WireId {
        *self.map.entry(net).or_insert_with(|| {
            let w = WireId(self.next);
            self.next += 1;
            w
        })
    }

    fn fresh(&mut self) -> WireId {
        let w = WireId(self.next);
        self.next += 1;
        w
    }
}

/// Parses a Yosys JSON netlist (single top module, gate-level cells) into a
/// circuit. JSON carries no line structure worth reporting, so diagnostics
/// use line 0 and name the offending module, port or cell instead.
pub fn parse_yosys_json(source: &str) -> Result<Parsed, ParseError> {
    let mut diagnostics: Vec<ParseDiagnostic> = Vec::new();

    let netlist: Netlist = match serde_json::from_str(source) {
        Ok(n) => n,
        Err(e) => {
            diagnostics.push(ParseDiagnostic::error(
                e.line(),
                format!("not a Yosys JSON netlist: {e}"),
            ));
            return Err(ParseError { diagnostics });
        }
    };

    let (top_name, module) = match select_top(&netlist, &mut diagnostics) {
        Some(m) => m,
        None => return Err(ParseError { diagnostics }),
    };

    let mut alloc = WireAlloc {
        map: HashMap::new(),
        next: 0,
    };
    let mut gates: Vec<Gate> = Vec::new();
    let mut const_wires: [Option<WireId>; 2] = [None, None];

    // Input ports claim the lowest wire ids, in declaration order, MSB first.
    let mut input_groups: Vec<Vec<WireId>> = Vec::new();
    let mut input_wires: std::collections::HashSet<WireId> = std::collections::HashSet::new();
    for (name, port) in &module.ports {
        match port.direction.as_str() {
            "input" => {}
            "output" => continue,
            other => {
                diagnostics.push(ParseDiagnostic::error(
                    0,
                    format!("port `{name}`: unsupported direction `{other}`"),
                ));
                continue;
            }
        }
        let mut group = Vec::with_capacity(port.bits.len());
        for bit in port.bits.iter().rev() {
            match bit {
                Bit::Net(n) => {
                    let w = alloc.net(*n);
                    if !input_wires.insert(w) {
                        diagnostics.push(ParseDiagnostic::error(
                            0,
                            format!("port `{name}`: net {n} is bound to more than one input bit"),
                        ));
                    }
                    group.push(w);
                }
                Bit::Literal(l) => {
                    diagnostics.push(ParseDiagnostic::error(
                        0,
                        format!("port `{name}`: input bit is the literal \"{l}\""),
                    ));
                }
            }
        }
        input_groups.push(group);
    }

    // Cells, in declaration order.
    for (name, cell) in &module.cells {
        let Some(kind) = cell_kind(&cell.cell_type) else {
            diagnostics.push(ParseDiagnostic::error(
                0,
                format!("unsupported cell {} (instance `{name}`)", cell.cell_type),
            ));
            continue;
        };
        let (in_ports, out_port) = cell_ports(kind);
        let mut inputs = Vec::with_capacity(in_ports.len());
        let mut ok = true;
        for port in in_ports {
            match single_bit(cell, port, name, &mut diagnostics) {
                Some(Bit::Net(n)) => inputs.push(alloc.net(*n)),
                Some(Bit::Literal(l)) => match l.as_str() {
                    "0" | "1" => {
                        let idx = usize::from(l == "1");
                        let w = *const_wires[idx].get_or_insert_with(|| {
                            let w = alloc.fresh();
                            let kind = if idx == 0 { GateKind::Const0 } else { GateKind::Const1 };
                            gates.push(Gate::new(kind, vec![], w));
                            w
                        });
                        inputs.push(w);
                    }
                    other => {
                        diagnostics.push(ParseDiagnostic::error(
                            0,
                            format!("cell `{name}` port {port} is connected to \"{other}\""),
                        ));
                        ok = false;
                    }
                },
                None => ok = false,
            }
        }
        let output = match single_bit(cell, out_port, name, &mut diagnostics) {
            Some(Bit::Net(n)) => Some(alloc.net(*n)),
            Some(Bit::Literal(l)) => {
                diagnostics.push(ParseDiagnostic::error(
                    0,
                    format!("cell `{name}` output is the literal \"{l}\""),
                ));
                None
            }
            None => None,
        };
        if let (true, Some(output)) = (ok, output) {
            gates.push(Gate::new(kind, inputs, output));
        }
    }

    // Output ports, in declaration order, MSB first. Bits that alias an
    // input, a constant or an already-used output position get a BUF/CONST
    // gate so every output wire has exactly one producer and the circuit
    // stays expressible in Bristol form.
    let mut output_groups: Vec<Vec<WireId>> = Vec::new();
    let mut taken: std::collections::HashSet<WireId> = std::collections::HashSet::new();
    for (name, port) in &module.ports {
        if port.direction != "output" {
            continue;
        }
        let mut group = Vec::with_capacity(port.bits.len());
        for bit in port.bits.iter().rev() {
            match bit {
                Bit::Net(n) => {
                    if !alloc.map.contains_key(n) {
                        diagnostics.push(ParseDiagnostic::error(
                            0,
                            format!("port `{name}`: output net {n} has no driver"),
                        ));
                        continue;
                    }
                    let w = alloc.net(*n);
                    if input_wires.contains(&w) || taken.contains(&w) {
                        let fresh = alloc.fresh();
                        gates.push(Gate::new(GateKind::Buf, vec![w], fresh));
                        taken.insert(fresh);
                        group.push(fresh);
                    } else {
                        taken.insert(w);
                        group.push(w);
                    }
                }
                Bit::Literal(l) => match l.as_str() {
                    "0" | "1" => {
                        let kind = if l == "1" { GateKind::Const1 } else { GateKind::Const0 };
                        let fresh = alloc.fresh();
                        gates.push(Gate::new(kind, vec![], fresh));
                        taken.insert(fresh);
                        group.push(fresh);
                    }
                    other => {
                        diagnostics.push(ParseDiagnostic::error(
                            0,
                            format!("port `{name}`: output bit is \"{other}\""),
                        ));
                    }
                },
            }
        }
        output_groups.push(group);
    }

    if diagnostics.iter().any(|d| d.severity == super::Severity::Error) {
        return Err(ParseError { diagnostics });
    }

    let circuit = Circuit::new(
        top_name,
        alloc.next as usize,
        gates,
        input_groups,
        output_groups,
    );
    Ok(Parsed {
        circuit,
        warnings: diagnostics,
    })
}

fn single_bit<'c>(
    cell: &'c Cell,
    port: &str,
    name: &str,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<&'c Bit> {
    match cell.connections.get(port) {
        Some(bits) if bits.len() == 1 => Some(&bits[0]),
        Some(bits) => {
            diagnostics.push(ParseDiagnostic::error(
                0,
                format!(
                    "cell `{name}` port {port} is {} bits wide, expected 1",
                    bits.len()
                ),
            ));
            None
        }
        None => {
            diagnostics.push(ParseDiagnostic::error(
                0,
                format!("cell `{name}` has no {port} connection"),
            ));
            None
        }
    }
}

fn select_top<'n>(
    netlist: &'n Netlist,
    diagnostics: &mut Vec<ParseDiagnostic>,
) -> Option<(String, &'n Module)> {
    if netlist.modules.is_empty() {
        diagnostics.push(ParseDiagnostic::error(0, "netlist contains no modules"));
        return None;
    }
    if netlist.modules.len() == 1 {
        let (name, module) = netlist.modules.iter().next().unwrap();
        return Some((name.clone(), module));
    }
    let tops: Vec<(&String, &Module)> = netlist
        .modules
        .iter()
        .filter(|(_, m)| m.attributes.get("top").is_some_and(attr_is_set))
        .collect();
    match tops.as_slice() {
        [(name, module)] => Some(((*name).clone(), module)),
        [] => {
            diagnostics.push(ParseDiagnostic::error(
                0,
                format!(
                    "{} modules but none is marked top; set the `top` attribute",
                    netlist.modules.len()
                ),
            ));
            None
        }
        several => {
            let names: Vec<&str> = several.iter().map(|(n, _)| n.as_str()).collect();
            diagnostics.push(ParseDiagnostic::error(
                0,
                format!("multiple modules marked top: {}", names.join(", ")),
            ));
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_not_cell() {
        let src = r#"{
          "modules": {
            "inverter": {
              "ports": {
                "a": { "direction": "input", "bits": [2] },
                "y": { "direction": "output", "bits": [3] }
              },
              "cells": {
                "n1": {
                  "type": "$_NOT_",
                  "connections": { "A": [2], "Y": [3] }
                }
              }
            }
          }
        }"#;
        let parsed = parse_yosys_json(src).unwrap();
        let c = &parsed.circuit;
        assert_eq!(c.inputs(), &[vec![WireId(0)]]);
        assert_eq!(c.outputs(), &[vec![WireId(1)]]);
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.gates()[0].kind, GateKind::Not);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn dff_cell_is_unsupported() {
        let src = r#"{
          "modules": {
            "m": {
              "ports": {
                "clk": { "direction": "input", "bits": [2] },
                "d": { "direction": "input", "bits": [3] },
                "q": { "direction": "output", "bits": [4] }
              },
              "cells": {
                "ff": {
                  "type": "$_DFF_P_",
                  "connections": { "C": [2], "D": [3], "Q": [4] }
                }
              }
            }
          }
        }"#;
        let err = parse_yosys_json(src).unwrap_err();
        assert!(err
            .errors()
            .any(|d| d.message.contains("unsupported cell $_DFF_P_")));
    }

    #[test]
    fn constant_output_bit_gets_a_const_gate() {
        let src = r#"{
          "modules": {
            "m": {
              "ports": {
                "a": { "direction": "input", "bits": [2] },
                "y": { "direction": "output", "bits": ["1", 2] }
              },
              "cells": {}
            }
          }
        }"#;
        let parsed = parse_yosys_json(src).unwrap();
        let c = &parsed.circuit;
        // y is 2 bits: MSB is net 2 (aliases input a -> BUF), LSB is const 1
        assert_eq!(c.gates().len(), 2);
        assert!(c.gates().iter().any(|g| g.kind == GateKind::Const1));
        assert!(c.gates().iter().any(|g| g.kind == GateKind::Buf));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn x_bit_is_an_error() {
        let src = r#"{
          "modules": {
            "m": {
              "ports": {
                "a": { "direction": "input", "bits": [2] },
                "y": { "direction": "output", "bits": ["x"] }
              },
              "cells": {}
            }
          }
        }"#;
        let err = parse_yosys_json(src).unwrap_err();
        assert!(err.errors().any(|d| d.message.contains("\"x\"")));
    }

    #[test]
    fn two_modules_without_top_is_an_error() {
        let src = r#"{
          "modules": {
            "m1": { "ports": {}, "cells": {} },
            "m2": { "ports": {}, "cells": {} }
          }
        }"#;
        let err = parse_yosys_json(src).unwrap_err();
        assert!(err.errors().any(|d| d.message.contains("none is marked top")));
    }

    #[test]
    fn top_attribute_selects_module() {
        let src = r#"{
          "modules": {
            "helper": { "ports": {}, "cells": {} },
            "main": {
              "attributes": { "top": "00000000000000000000000000000001" },
              "ports": {
                "a": { "direction": "input", "bits": [2] },
                "b": { "direction": "input", "bits": [3] },
                "y": { "direction": "output", "bits": [4] }
              },
              "cells": {
                "g": { "type": "$_ANDNOT_", "connections": { "A": [2], "B": [3], "Y": [4] } }
              }
            }
          }
        }"#;
        let parsed = parse_yosys_json(src).unwrap();
        assert_eq!(parsed.circuit.name(), "main");
        assert_eq!(parsed.circuit.gates()[0].kind, GateKind::AndNot);
    }

    #[test]
    fn mux_input_order_is_select_a_b() {
        let src = r#"{
          "modules": {
            "m": {
              "ports": {
                "s": { "direction": "input", "bits": [2] },
                "a": { "direction": "input", "bits": [3] },
                "b": { "direction": "input", "bits": [4] },
                "y": { "direction": "output", "bits": [5] }
              },
              "cells": {
                "mux": { "type": "$_MUX_", "connections": { "A": [3], "B": [4], "S": [2], "Y": [5] } }
              }
            }
          }
        }"#;
        let parsed = parse_yosys_json(src).unwrap();
        let gate = &parsed.circuit.gates()[0];
        assert_eq!(gate.kind, GateKind::Mux);
        // select is wire 0 (port s), then a (wire 1), then b (wire 2)
        assert_eq!(gate.inputs, vec![WireId(0), WireId(1), WireId(2)]);
    }

    #[test]
    fn multibit_ports_reverse_to_msb_first() {
        let src = r#"{
          "modules": {
            "m": {
              "ports": {
                "a": { "direction": "input", "bits": [2, 3] },
                "y": { "direction": "output", "bits": [4, 5] }
              },
              "cells": {
                "n0": { "type": "$_NOT_", "connections": { "A": [2], "Y": [4] } },
                "n1": { "type": "$_NOT_", "connections": { "A": [3], "Y": [5] } }
              }
            }
          }
        }"#;
        let parsed = parse_yosys_json(src).unwrap();
        let c = &parsed.circuit;
        // bits [2,3] are LSB-first; net 3 (the MSB) is listed first and is
        // allocated wire 0
        assert_eq!(c.inputs()[0], vec![WireId(0), WireId(1)]);
        let not_of_msb = c
            .gates()
            .iter()
            .find(|g| g.inputs == vec![WireId(0)])
            .unwrap();
        assert_eq!(c.outputs()[0][0], not_of_msb.output);
        assert!(c.validate().is_ok());
    }
}
