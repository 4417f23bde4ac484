//! Plain-text circuit listing.
//!
//! ```text
//! n=3
//! H 0
//! CNOT 0,1
//! RZ 2 1.25
//! U4 1,2 re,im re,im ... (16 entries, row-major)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written
//! in shortest round-trip form, so a dump parses back to the same circuit.

use std::fmt::Write as _;
use std::path::Path;

use framepot_core::linalg::{Mat4, C64, ZERO};
use framepot_core::{Circuit, Gate, GateKind, Wires};

use crate::error::{Error, Result};

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("n={}\n", c.qubit_count());
    for g in c.gates() {
        let wires = match g.wires() {
            Wires::One(w) => w.to_string(),
            Wires::Two(a, b) => format!("{a},{b}"),
        };
        match g.kind() {
            GateKind::Hadamard => writeln!(out, "H {wires}"),
            GateKind::PauliX => writeln!(out, "X {wires}"),
            GateKind::Cnot => writeln!(out, "CNOT {wires}"),
            GateKind::Cz => writeln!(out, "CZ {wires}"),
            GateKind::RotX(t) => writeln!(out, "RX {wires} {t}"),
            GateKind::RotY(t) => writeln!(out, "RY {wires} {t}"),
            GateKind::RotZ(t) => writeln!(out, "RZ {wires} {t}"),
            GateKind::TwoQubitUnitary(m) => {
                let entries: Vec<String> = m.iter().flatten().map(|z| format!("{},{}", z.re, z.im)).collect();
                writeln!(out, "U4 {wires} {}", entries.join(" "))
            }
        }
        .expect("writing to a String");
    }
    out
}

/// Parses a circuit listing; `origin` names the source in errors.
pub fn parse_circuit(text: &str, origin: &Path) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::parse(origin, line_no, msg);
        let Some(c) = circuit.as_mut() else {
            let n = line
                .strip_prefix("n=")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or_else(|| err(format!("expected header `n=<qubits>`, found `{line}`")))?;
            circuit = Some(Circuit::new(n).map_err(|e| err(e.to_string()))?);
            continue;
        };
        let mut fields = line.split_whitespace();
        let kind = fields.next().expect("non-empty line");
        let wires = fields.next().ok_or_else(|| err(format!("{kind}: missing wires")))?;
        let rest: Vec<&str> = fields.collect();
        let one = || -> Result<usize> {
            wires.parse().map_err(|_| err(format!("{kind}: bad wire `{wires}`")))
        };
        let two = || -> Result<(usize, usize)> {
            let (a, b) = wires.split_once(',').ok_or_else(|| err(format!("{kind}: expected `a,b`, found `{wires}`")))?;
            match (a.parse(), b.parse()) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                _ => Err(err(format!("{kind}: bad wires `{wires}`"))),
            }
        };
        let angle = || -> Result<f64> {
            match rest.as_slice() {
                [t] => t.parse().map_err(|_| err(format!("{kind}: bad angle `{t}`"))),
                _ => Err(err(format!("{kind}: expected one angle"))),
            }
        };
        let no_params = |g: Gate| -> Result<Gate> {
            if rest.is_empty() {
                Ok(g)
            } else {
                Err(err(format!("{kind}: unexpected parameters")))
            }
        };
        let gate = match kind {
            "H" => no_params(Gate::hadamard(one()?))?,
            "X" => no_params(Gate::pauli_x(one()?))?,
            "CNOT" => {
                let (a, b) = two()?;
                no_params(Gate::cnot(a, b))?
            }
            "CZ" => {
                let (a, b) = two()?;
                no_params(Gate::cz(a, b))?
            }
            "RX" => Gate::rot_x(one()?, angle()?),
            "RY" => Gate::rot_y(one()?, angle()?),
            "RZ" => Gate::rot_z(one()?, angle()?),
            "U4" => {
                let (a, b) = two()?;
                if rest.len() != 16 {
                    return Err(err(format!("U4: expected 16 entries, found {}", rest.len())));
                }
                let mut m: Mat4 = [[ZERO; 4]; 4];
                for (k, entry) in rest.iter().enumerate() {
                    let z = entry
                        .split_once(',')
                        .and_then(|(re, im)| Some(C64::new(re.parse().ok()?, im.parse().ok()?)))
                        .ok_or_else(|| err(format!("U4: bad entry `{entry}`")))?;
                    m[k / 4][k % 4] = z;
                }
                Gate::unitary(a, b, m).map_err(|e| err(e.to_string()))?
            }
            other => return Err(err(format!("unknown gate `{other}`"))),
        };
        c.push(gate).map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or_else(|| Error::parse(origin, text.lines().count().max(1), "missing header `n=<qubits>`"))
}
