use super::{Angle, Circuit, Gate, Polarity};
use crate::error::{Error, Result};

/// Parses the line-oriented circuit text format.
///
/// ```text
/// qubits 2
/// rz -90 0      # comments run to end of line
/// cr+- 0 1
/// ```
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let err = |msg: String| Error::Parse { line, msg };

        let Some(c) = circuit.as_mut() else {
            if toks[0] != "qubits" {
                return Err(err(format!("expected `qubits <n>` header, found `{}`", toks[0])));
            }
            if toks.len() != 2 {
                return Err(err("`qubits` takes exactly one count".into()));
            }
            let n: usize = toks[1]
                .parse()
                .map_err(|_| err(format!("bad qubit count `{}`", toks[1])))?;
            circuit = Some(Circuit::new(n).map_err(|e| err(e.to_string()))?);
            continue;
        };

        let wire = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| err(format!("bad wire index `{s}`")))
        };
        let expect = |n: usize, usage: &str| -> Result<()> {
            if toks.len() == n {
                Ok(())
            } else if toks.len() < n && usage.contains("<deg>") && toks.len() == n - 1 {
                Err(err(format!("missing angle: usage `{usage}`")))
            } else {
                Err(err(format!("expected `{usage}`")))
            }
        };

        let gate = match toks[0] {
            kind @ ("rx" | "ry" | "rz") => {
                expect(3, &format!("{kind} <deg> <wire>"))?;
                let deg: f64 = toks[1]
                    .parse()
                    .map_err(|_| err(format!("bad angle `{}`", toks[1])))?;
                if !deg.is_finite() {
                    return Err(err(format!("bad angle `{}`", toks[1])));
                }
                let w = wire(toks[2])?;
                let a = Angle::deg(deg);
                match kind {
                    "rx" => Gate::Rx(a, w),
                    "ry" => Gate::Ry(a, w),
                    _ => Gate::Rz(a, w),
                }
            }
            "cr" => return Err(err("missing polarity: use `cr+-` or `cr-+`".into())),
            kind @ ("cr+-" | "cr-+") => {
                expect(3, &format!("{kind} <control> <target>"))?;
                let polarity = if kind == "cr+-" {
                    Polarity::PlusMinus
                } else {
                    Polarity::MinusPlus
                };
                Gate::cr(polarity, wire(toks[1])?, wire(toks[2])?)
            }
            kind @ ("cnot" | "notc" | "swap") => {
                expect(3, &format!("{kind} <a> <b>"))?;
                let (a, b) = (wire(toks[1])?, wire(toks[2])?);
                match kind {
                    "cnot" => Gate::Cnot(a, b),
                    "notc" => Gate::Notc(a, b),
                    _ => Gate::Swap(a, b),
                }
            }
            kind @ ("h" | "x") => {
                expect(2, &format!("{kind} <wire>"))?;
                let w = wire(toks[1])?;
                if kind == "h" {
                    Gate::H(w)
                } else {
                    Gate::X(w)
                }
            }
            "qubits" => return Err(err("duplicate `qubits` header".into())),
            other => return Err(err(format!("unknown gate `{other}`"))),
        };
        c.push(gate).map_err(|e| err(e.to_string()))?;
    }

    circuit.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        msg: "missing `qubits <n>` header".into(),
    })
}
