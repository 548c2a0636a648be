//! Bristol Fashion reader and writer.
//!
//! Layout: line 1 is `<ngates> <nwires>`; line 2 is `<niv>` followed by the
//! bit width of each input value; line 3 is `<nov>` followed by the widths
//! of each output value; then one gate per line as
//! `<n_in> <n_out> <input wires...> <output wire> <KIND>`. Blank lines are
//! skipped, CRLF is tolerated.
//!
//! Input values occupy the lowest wire indices (first value first) and
//! output values the highest. Beyond the standard `XOR`/`AND`/`INV`/`EQ`/
//! `EQW` tokens the reader accepts the richer synthesis cells `OR`, `NAND`,
//! `NOR`, `XNOR`, `ANDNOT`, `ORNOT` and `MUX` (inputs ordered
//! `select, a, b`). `INV` maps to `NOT`, `EQW` to `BUF`, and `EQ` — whose
//! "input" token is the literal constant 0 or 1 — to `CONST0`/`CONST1`.

use std::collections::HashMap;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateId, GateKind, WireId};
use crate::netlist::{ParseDiagnostic, ParseError, Parsed};

fn kind_from_token(token: &str) -> Option<GateKind> {
    Some(match token {
        "AND" => GateKind::And,
        "OR" => GateKind::Or,
        "XOR" => GateKind::Xor,
        "NAND" => GateKind::Nand,
        "NOR" => GateKind::Nor,
        "XNOR" => GateKind::Xnor,
        "INV" | "NOT" => GateKind::Not,
        "ANDNOT" => GateKind::AndNot,
        "ORNOT" => GateKind::OrNot,
        "MUX" => GateKind::Mux,
        "EQW" | "BUF" => GateKind::Buf,
        _ => return None,
    })
}

fn token_for_kind(kind: GateKind) -> &'static str {
    match kind {
        GateKind::Not => "INV",
        GateKind::Buf => "EQW",
        other => other.token(),
    }
}

/// Parses Bristol Fashion text into a circuit. Warnings ride along with a
/// successful parse; any error fails the parse with all diagnostics kept.
pub fn parse_bristol(source: &str) -> Result<Parsed, ParseError> {
    let mut diagnostics: Vec<ParseDiagnostic> = Vec::new();

    // (1-based line number, tokens) with blank lines skipped
    let rows: Vec<(usize, Vec<&str>)> = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<&str>>()))
        .filter(|(_, tokens)| !tokens.is_empty())
        .collect();

    fn numbers_row(
        rows: &[(usize, Vec<&str>)],
        index: usize,
        expected: &str,
        diags: &mut Vec<ParseDiagnostic>,
    ) -> Option<(usize, Vec<u64>)> {
        let (line_no, tokens) = match rows.get(index) {
            Some(x) => x,
            None => {
                diags.push(ParseDiagnostic::error(0, format!("missing {expected} line")));
                return None;
            }
        };
        let mut numbers = Vec::with_capacity(tokens.len());
        for t in tokens {
            match t.parse::<u64>() {
                Ok(n) => numbers.push(n),
                Err(_) => {
                    diags.push(ParseDiagnostic::error(
                        *line_no,
                        format!("{expected}: expected integer, found `{t}`"),
                    ));
                    return None;
                }
            }
        }
        Some((*line_no, numbers))
    }

    let header = numbers_row(&rows, 0, "header", &mut diagnostics);
    let inputs_line = numbers_row(&rows, 1, "input declaration", &mut diagnostics);
    let outputs_line = numbers_row(&rows, 2, "output declaration", &mut diagnostics);

    let (Some((header_no, header)), Some((in_no, in_decl)), Some((out_no, out_decl))) =
        (header, inputs_line, outputs_line)
    else {
        return Err(ParseError { diagnostics });
    };

    if header.len() != 2 {
        diagnostics.push(ParseDiagnostic::error(
            header_no,
            format!("header must be `<ngates> <nwires>`, found {} tokens", header.len()),
        ));
        return Err(ParseError { diagnostics });
    }
    let ngates = header[0] as usize;
    let nwires = header[1] as usize;

    let decode_decl = |line_no: usize, decl: &[u64], what: &str, diags: &mut Vec<ParseDiagnostic>| -> Option<Vec<usize>> {
        if decl.is_empty() {
            diags.push(ParseDiagnostic::error(line_no, format!("empty {what} declaration")));
            return None;
        }
        let count = decl[0] as usize;
        if decl.len() - 1 != count {
            diags.push(ParseDiagnostic::error(
                line_no,
                format!("{what} declaration announces {count} values but lists {}", decl.len() - 1),
            ));
            return None;
        }
        Some(decl[1..].iter().map(|&n| n as usize).collect())
    };

    let in_widths = decode_decl(in_no, &in_decl, "input", &mut diagnostics);
    let out_widths = decode_decl(out_no, &out_decl, "output", &mut diagnostics);
    let (Some(in_widths), Some(out_widths)) = (in_widths, out_widths) else {
        return Err(ParseError { diagnostics });
    };

    let total_in: usize = in_widths.iter().sum();
    let total_out: usize = out_widths.iter().sum();
    if total_in > nwires || total_out > nwires {
        diagnostics.push(ParseDiagnostic::error(
            header_no,
            format!("{total_in} input and {total_out} output bits do not fit in {nwires} wires"),
        ));
        return Err(ParseError { diagnostics });
    }

    let mut gates: Vec<Gate> = Vec::with_capacity(ngates);
    let mut gate_lines = 0usize;
    let mut last_line = out_no;

    for (line_no, tokens) in rows.iter().skip(3).map(|(n, t)| (*n, t)) {
        last_line = line_no;
        gate_lines += 1;
        if gate_lines > ngates {
            // counted below; skip parsing the excess
            continue;
        }
        let Some((kind_token, nums)) = tokens.split_last() else {
            continue;
        };
        let mut numbers = Vec::with_capacity(nums.len());
        let mut ok = true;
        for t in nums {
            match t.parse::<u64>() {
                Ok(n) => numbers.push(n),
                Err(_) => {
                    diagnostics.push(ParseDiagnostic::error(
                        line_no,
                        format!("expected integer, found `{t}`"),
                    ));
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if numbers.len() < 2 {
            diagnostics.push(ParseDiagnostic::error(line_no, "gate line too short"));
            continue;
        }
        let n_in = numbers[0] as usize;
        let n_out = numbers[1] as usize;
        if n_out != 1 {
            diagnostics.push(ParseDiagnostic::error(
                line_no,
                format!("gates must drive exactly one wire, found {n_out}"),
            ));
            continue;
        }
        if numbers.len() != 2 + n_in + n_out {
            diagnostics.push(ParseDiagnostic::error(
                line_no,
                format!(
                    "gate line announces {n_in}+{n_out} wires but carries {}",
                    numbers.len() - 2
                ),
            ));
            continue;
        }

        let is_eq = *kind_token == "EQ";
        let kind = if is_eq {
            if n_in != 1 {
                diagnostics.push(ParseDiagnostic::error(line_no, "EQ takes one constant operand"));
                continue;
            }
            match numbers[2] {
                0 => GateKind::Const0,
                1 => GateKind::Const1,
                other => {
                    diagnostics.push(ParseDiagnostic::error(
                        line_no,
                        format!("EQ operand must be 0 or 1, found {other}"),
                    ));
                    continue;
                }
            }
        } else {
            match kind_from_token(kind_token) {
                Some(k) => k,
                None => {
                    diagnostics.push(ParseDiagnostic::error(
                        line_no,
                        format!("unknown gate `{kind_token}`"),
                    ));
                    continue;
                }
            }
        };
        if !is_eq && n_in != kind.arity() {
            diagnostics.push(ParseDiagnostic::error(
                line_no,
                format!("{kind} takes {} inputs, found {n_in}", kind.arity()),
            ));
            continue;
        }

        let mut wires_ok = true;
        // EQ's operand is a literal, not a wire
        let wire_numbers = if is_eq { &numbers[3..] } else { &numbers[2..] };
        for &w in wire_numbers {
            if w as usize >= nwires {
                diagnostics.push(ParseDiagnostic::error(
                    line_no,
                    format!("wire {w} out of range (nwires = {nwires})"),
                ));
                wires_ok = false;
            }
        }
        if !wires_ok {
            continue;
        }

        let inputs: Vec<WireId> = if is_eq {
            Vec::new()
        } else {
            numbers[2..2 + n_in].iter().map(|&w| WireId(w as u32)).collect()
        };
        let output = WireId(*numbers.last().unwrap() as u32);
        gates.push(Gate::new(kind, inputs, output));
    }

    if gate_lines != ngates {
        diagnostics.push(ParseDiagnostic::error(
            last_line,
            format!("header announces {ngates} gates but file carries {gate_lines}"),
        ));
    }

    if diagnostics.iter().any(|d| d.severity == super::Severity::Error) {
        return Err(ParseError { diagnostics });
    }

    // Input groups take the lowest wires in declaration order, output groups
    // the highest.
    let mut next = 0u32;
    let mut inputs = Vec::with_capacity(in_widths.len());
    for width in &in_widths {
        inputs.push((next..next + *width as u32).map(WireId).collect::<Vec<_>>());
        next += *width as u32;
    }
    let mut outputs = Vec::with_capacity(out_widths.len());
    let mut start = (nwires - total_out) as u32;
    for width in &out_widths {
        outputs.push((start..start + *width as u32).map(WireId).collect::<Vec<_>>());
        start += *width as u32;
    }

    // Convention check: the trailing output wires should each be driven by a
    // gate (or be an input bit of a gate-free passthrough).
    let mut produced = vec![false; nwires];
    for w in 0..total_in {
        produced[w] = true;
    }
    for g in &gates {
        produced[g.output.index()] = true;
    }
    for group in &outputs {
        for &w in group {
            if !produced[w.index()] {
                diagnostics.push(ParseDiagnostic::warning(
                    0,
                    format!("output wire {w} is never driven; outputs may not occupy the highest indices"),
                ));
            }
        }
    }

    Ok(Parsed {
        circuit: Circuit::new("bristol", nwires, gates, inputs, outputs),
        warnings: diagnostics,
    })
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("gate {gate} reads wire {wire} before it is produced; gate list is not topologically ordered")]
    NotTopological { gate: GateId, wire: WireId },
    #[error("circuit fails validation: {0}")]
    Invalid(String),
    #[error("output wire {wire} cannot be renumbered into the trailing block: {reason}")]
    OutputNotRenumberable { wire: WireId, reason: String },
}

/// Renders a validated, topologically ordered circuit as Bristol Fashion
/// text. If the circuit's wire numbering is already canonical (inputs
/// lowest, outputs highest) the file reproduces it verbatim; otherwise the
/// wires are renumbered by a pure permutation, which keeps the result
/// circuit-isomorphic to the argument.
pub fn write_bristol(circuit: &Circuit) -> Result<String, WriteError> {
    let report = circuit.validate();
    if !report.is_ok() {
        return Err(WriteError::Invalid(report.to_string()));
    }

    // Topological order of the gate list.
    let mut produced = vec![false; circuit.wire_count()];
    for group in circuit.inputs() {
        for &w in group {
            produced[w.index()] = true;
        }
    }
    for (i, gate) in circuit.gates().iter().enumerate() {
        for &w in &gate.inputs {
            if !produced[w.index()] {
                return Err(WriteError::NotTopological {
                    gate: GateId(i as u32),
                    wire: w,
                });
            }
        }
        produced[gate.output.index()] = true;
    }

    let renumber = wire_permutation(circuit)?;

    let mut out = String::new();
    out.push_str(&format!("{} {}\n", circuit.gate_count(), circuit.wire_count()));
    out.push_str(&circuit.inputs().len().to_string());
    for group in circuit.inputs() {
        out.push_str(&format!(" {}", group.len()));
    }
    out.push('\n');
    out.push_str(&circuit.outputs().len().to_string());
    for group in circuit.outputs() {
        out.push_str(&format!(" {}", group.len()));
    }
    out.push('\n');

    let map = |w: WireId| renumber.as_ref().map_or(w.0, |p| p[w.index()]);
    for gate in circuit.gates() {
        match gate.kind {
            GateKind::Const0 => {
                out.push_str(&format!("1 1 0 {} EQ\n", map(gate.output)));
            }
            GateKind::Const1 => {
                out.push_str(&format!("1 1 1 {} EQ\n", map(gate.output)));
            }
            kind => {
                out.push_str(&format!("{} 1", gate.inputs.len()));
                for &w in &gate.inputs {
                    out.push_str(&format!(" {}", map(w)));
                }
                out.push_str(&format!(" {} {}\n", map(gate.output), token_for_kind(kind)));
            }
        }
    }
    Ok(out)
}

/// `None` when the numbering is already canonical; otherwise the permutation
/// old wire id -> new wire id.
fn wire_permutation(circuit: &Circuit) -> Result<Option<Vec<u32>>, WriteError> {
    let flat_inputs: Vec<WireId> = circuit.inputs().iter().flatten().copied().collect();
    let flat_outputs: Vec<WireId> = circuit.outputs().iter().flatten().copied().collect();
    let n = circuit.wire_count();

    let canonical_inputs = flat_inputs.iter().enumerate().all(|(i, w)| w.index() == i);
    let out_base = n - flat_outputs.len();
    let canonical_outputs = flat_outputs
        .iter()
        .enumerate()
        .all(|(i, w)| w.index() == out_base + i);
    if canonical_inputs && canonical_outputs {
        return Ok(None);
    }

    let mut perm: Vec<Option<u32>> = vec![None; n];
    let mut used = vec![false; n];
    for (i, w) in flat_inputs.iter().enumerate() {
        perm[w.index()] = Some(i as u32);
        used[i] = true;
    }
    let input_set: std::collections::HashSet<WireId> = flat_inputs.iter().copied().collect();
    let mut seen_out: HashMap<WireId, usize> = HashMap::new();
    for (i, &w) in flat_outputs.iter().enumerate() {
        if input_set.contains(&w) {
            return Err(WriteError::OutputNotRenumberable {
                wire: w,
                reason: "it is also a primary input".into(),
            });
        }
        if let Some(prev) = seen_out.insert(w, i) {
            return Err(WriteError::OutputNotRenumberable {
                wire: w,
                reason: format!("it appears at output positions {prev} and {i}"),
            });
        }
        let slot = (out_base + i) as u32;
        perm[w.index()] = Some(slot);
        used[slot as usize] = true;
    }
    // Interior wires take the remaining slots in gate order.
    let mut free = (0..n as u32).filter(|&s| !used[s as usize]);
    for gate in circuit.gates() {
        let w = gate.output;
        if perm[w.index()].is_none() {
            perm[w.index()] = Some(free.next().expect("slot available"));
        }
    }
    Ok(Some(
        perm.into_iter()
            .map(|p| p.expect("validated circuits produce every wire"))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    const MINIMAL: &str = "1 3\n2 1 1\n1 1\n2 1 0 1 2 XOR\n";

    #[test]
    fn minimal_xor_file() {
        let parsed = parse_bristol(MINIMAL).unwrap();
        let c = &parsed.circuit;
        assert_eq!(c.wire_count(), 3);
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.inputs(), &[vec![WireId(0)], vec![WireId(1)]]);
        assert_eq!(c.outputs(), &[vec![WireId(2)]]);
        assert_eq!(c.gates()[0].kind, GateKind::Xor);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_gate_token_is_an_error_with_line() {
        let src = "1 3\n2 1 1\n1 1\n\n2 1 0 1 2 XO\n";
        let err = parse_bristol(src).unwrap_err();
        let diag = err.errors().next().unwrap();
        assert_eq!(diag.line, 5);
        assert!(diag.message.contains("unknown gate"), "{}", diag.message);
    }

    #[test]
    fn wire_out_of_range_is_an_error() {
        let src = "1 3\n2 1 1\n1 1\n\n2 1 0 9 2 XOR\n";
        let err = parse_bristol(src).unwrap_err();
        assert!(err.errors().any(|d| d.message.contains("out of range")));
    }

    #[test]
    fn gate_count_mismatch_is_an_error() {
        let src = "2 3\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n";
        let err = parse_bristol(src).unwrap_err();
        assert!(err.errors().any(|d| d.message.contains("announces 2 gates")));
    }

    #[test]
    fn crlf_and_blank_lines_are_tolerated() {
        let src = "1 3\r\n2 1 1\r\n1 1\r\n\r\n2 1 0 1 2 XOR\r\n";
        assert!(parse_bristol(src).is_ok());
    }

    #[test]
    fn eq_gates_become_constants() {
        let src = "2 3\n1 1\n2 1 1\n\n1 1 0 1 EQ\n1 1 1 2 EQ\n";
        let parsed = parse_bristol(src).unwrap();
        assert_eq!(parsed.circuit.gates()[0].kind, GateKind::Const0);
        assert_eq!(parsed.circuit.gates()[1].kind, GateKind::Const1);
    }

    #[test]
    fn write_is_inverse_of_parse() {
        let parsed = parse_bristol(MINIMAL).unwrap();
        let written = write_bristol(&parsed.circuit).unwrap();
        assert_eq!(written, MINIMAL);
    }

    #[test]
    fn writer_refuses_disorder() {
        let mut b = CircuitBuilder::new("t");
        let input = b.input_group(2);
        let x = b.gate(GateKind::And, &[input[0], input[1]]);
        let y = b.gate(GateKind::Not, &[x]);
        b.output_group(vec![y]);
        let c = b.finish();
        let shuffled = c.reordered(&[GateId(1), GateId(0)]);
        assert!(matches!(
            write_bristol(&shuffled),
            Err(WriteError::NotTopological { .. })
        ));
    }

    #[test]
    fn writer_renumbers_non_canonical_outputs() {
        // output is the AND (wire 2), but a later NOT gate owns wire 3
        let mut b = CircuitBuilder::new("t");
        let input = b.input_group(2);
        let x = b.gate(GateKind::And, &[input[0], input[1]]);
        let _y = b.gate(GateKind::Not, &[x]);
        b.output_group(vec![x]);
        let c = b.finish();
        let text = write_bristol(&c).unwrap();
        let reparsed = parse_bristol(&text).unwrap().circuit;
        assert_eq!(reparsed.gate_count(), 2);
        assert_eq!(reparsed.outputs()[0], vec![WireId(3)]);
        // same function: output = AND of the inputs
        assert_eq!(reparsed.gates()[0].kind, GateKind::And);
        assert_eq!(reparsed.gates()[0].output, WireId(3));
    }

    #[test]
    fn undriven_trailing_output_warns() {
        // 1 gate drives wire 2 but nwires=4 so the output block is wire 3
        let src = "1 4\n2 1 1\n1 1\n\n2 1 0 1 2 XOR\n";
        let parsed = parse_bristol(src).unwrap();
        assert!(!parsed.warnings.is_empty());
    }
}
