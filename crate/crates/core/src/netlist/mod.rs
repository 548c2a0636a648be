//! Netlist interchange formats.
//!
//! Two parsers produce [`Circuit`](crate::circuit::Circuit)s: Bristol
//! Fashion text ([`parse_bristol`]) and the Yosys JSON netlist emitted by
//! `write_json` ([`parse_yosys_json`]). [`write_bristol`] renders a circuit
//! back into canonical Bristol form.
//!
//! Parsers are diagnostic-oriented: they keep going after the first problem
//! where possible and report every finding with its 1-based source line.

use std::fmt;

use thiserror::Error;

mod bristol;
mod yosys;

pub use bristol::{parse_bristol, write_bristol, WriteError};
pub use yosys::parse_yosys_json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One parser finding, anchored to a 1-based source line (line 0 marks
/// file-level findings with no useful anchor).
#[derive(Clone, Debug)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    fn error(line: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    fn warning(line: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            message: message.into(),
            severity: Severity::Warning,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}: {}: {}", self.line, tag, self.message)
    }
}

/// Successful parse: the circuit plus any non-fatal findings.
#[derive(Debug)]
pub struct Parsed {
    pub circuit: crate::circuit::Circuit,
    pub warnings: Vec<ParseDiagnostic>,
}

/// Failed parse: every collected diagnostic, at least one of which is an
/// error.
#[derive(Debug, Error)]
pub struct ParseError {
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseError {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
