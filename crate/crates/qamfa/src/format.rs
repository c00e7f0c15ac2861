//! Machine-description file format: a JSON document describing states,
//! alphabets, the quantum register, per-(state, symbol) actions and
//! communication entries. Complex numbers are `[re, im]` pairs; matrices and
//! projectors are row-major lists of such pairs; the end-markers are written
//! `"^"` and `"$"` and may not appear in the input alphabet.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, ProjectiveMeasurement};
use crate::machine::{Action, SpecBuilder, StateId, StateKind, TapeSymbol, VerifierSpec};

pub const SCHEMA: &str = "qamfa-machine/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MachineDoc {
    pub schema: String,
    pub name: String,
    pub quantum_dim: usize,
    pub initial: String,
    pub initial_quantum: Vec<[f64; 2]>,
    pub input_alphabet: Vec<String>,
    pub comm_alphabet: Vec<String>,
    pub states: Vec<StateDoc>,
    pub theta: Vec<ThetaDoc>,
    pub comm: Vec<CommDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDoc {
    pub name: String,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaDoc {
    pub state: String,
    pub symbol: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<ProjectorDoc>>,
    pub delta: DeltaDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectorDoc {
    pub label: String,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaDoc {
    /// Unitary actions: a single (next, move).
    Step(StepDoc),
    /// Measurement actions: one (next, move) per outcome label.
    Outcomes(BTreeMap<String, StepDoc>),
    /// Coin actions: weighted (prob, next, move) arms.
    Coin(Vec<CoinArmDoc>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDoc {
    pub next: String,
    #[serde(rename = "move")]
    pub mv: i8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoinArmDoc {
    pub prob: f64,
    pub next: String,
    #[serde(rename = "move")]
    pub mv: i8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommDoc {
    pub state: String,
    pub emit: String,
    pub responses: BTreeMap<String, String>,
}

fn symbol_name(sym: TapeSymbol) -> String {
    match sym {
        TapeSymbol::LeftMarker => "^".to_string(),
        TapeSymbol::RightMarker => "$".to_string(),
        TapeSymbol::Input(c) => c.to_string(),
    }
}

fn parse_symbol(name: &str, alphabet: &[char], context: &str) -> Result<TapeSymbol> {
    match name {
        "^" => Ok(TapeSymbol::LeftMarker),
        "$" => Ok(TapeSymbol::RightMarker),
        s => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if alphabet.contains(&c) => Ok(TapeSymbol::Input(c)),
                _ => Err(Error::Parse {
                    location: context.to_string(),
                    message: format!("symbol {name:?} is not in the input alphabet"),
                }),
            }
        }
    }
}

fn complex_pairs(entries: &[Complex64]) -> Vec<[f64; 2]> {
    entries.iter().map(|c| [c.re, c.im]).collect()
}

fn matrix_from_pairs(dim: usize, pairs: &[[f64; 2]], context: &str) -> Result<CMat> {
    if pairs.len() != dim * dim {
        return Err(Error::Parse {
            location: context.to_string(),
            message: format!(
                "matrix has {} entries, register dimension {dim} needs {}",
                pairs.len(),
                dim * dim
            ),
        });
    }
    Ok(CMat::new(
        dim,
        pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
    ))
}

/// Export a machine to its document form.
pub fn to_document(spec: &VerifierSpec) -> MachineDoc {
    let mut theta = Vec::new();
    let mut comm = Vec::new();
    for sid in 0..spec.state_count() as StateId {
        let state = spec.state_name(sid).to_string();
        for sym in spec.tape_symbols() {
            let Some(action) = spec.action(sid, sym) else {
                continue;
            };
            let (kind, matrix, projectors, delta) = match action {
                Action::Unitary { op, next, mv } => (
                    "unitary",
                    Some(complex_pairs(op.entries())),
                    None,
                    DeltaDoc::Step(StepDoc {
                        next: spec.state_name(*next).to_string(),
                        mv: *mv,
                    }),
                ),
                Action::Measure { m, arms } => {
                    let projectors: Vec<ProjectorDoc> = m
                        .outcomes()
                        .iter()
                        .map(|(label, p)| ProjectorDoc {
                            label: label.clone(),
                            matrix: complex_pairs(p.entries()),
                        })
                        .collect();
                    let outcomes: BTreeMap<String, StepDoc> = m
                        .outcomes()
                        .iter()
                        .zip(arms.iter())
                        .map(|((label, _), (next, mv))| {
                            (
                                label.clone(),
                                StepDoc {
                                    next: spec.state_name(*next).to_string(),
                                    mv: *mv,
                                },
                            )
                        })
                        .collect();
                    (
                        "measurement",
                        None,
                        Some(projectors),
                        DeltaDoc::Outcomes(outcomes),
                    )
                }
                Action::Coin { arms } => (
                    "coin",
                    None,
                    None,
                    DeltaDoc::Coin(
                        arms.iter()
                            .map(|(prob, next, mv)| CoinArmDoc {
                                prob: *prob,
                                next: spec.state_name(*next).to_string(),
                                mv: *mv,
                            })
                            .collect(),
                    ),
                ),
            };
            theta.push(ThetaDoc {
                state: state.clone(),
                symbol: symbol_name(sym),
                kind: kind.to_string(),
                matrix,
                projectors,
                delta,
            });
        }
        if let Some(entry) = spec.comm_entry(sid) {
            comm.push(CommDoc {
                state: state.clone(),
                emit: entry.emit.clone(),
                responses: entry
                    .responses
                    .iter()
                    .map(|(gamma, next)| (gamma.clone(), spec.state_name(*next).to_string()))
                    .collect(),
            });
        }
    }
    MachineDoc {
        schema: SCHEMA.to_string(),
        name: spec.name.clone(),
        quantum_dim: spec.quantum_dim,
        initial: spec.state_name(spec.initial).to_string(),
        initial_quantum: complex_pairs(spec.initial_quantum.amps()),
        input_alphabet: spec.input_alphabet.iter().map(|c| c.to_string()).collect(),
        comm_alphabet: spec.comm_alphabet.clone(),
        states: spec
            .states
            .iter()
            .map(|s| StateDoc {
                name: s.name.clone(),
                kind: match s.kind {
                    StateKind::Reading => "reading",
                    StateKind::Communication => "communication",
                    StateKind::Accept => "accept",
                    StateKind::Reject => "reject",
                }
                .to_string(),
            })
            .collect(),
        theta,
        comm,
    }
}

/// Rebuild a machine from its document form. Structural problems (unknown
/// states, malformed symbols, missing outcome arms) are parse errors naming
/// the offending location; semantic problems surface through
/// [`crate::machine::validate_spec`].
pub fn from_document(doc: &MachineDoc) -> Result<VerifierSpec> {
    if doc.schema != SCHEMA {
        return Err(Error::Parse {
            location: "schema".to_string(),
            message: format!("unsupported schema {:?}, expected {SCHEMA:?}", doc.schema),
        });
    }
    let mut alphabet = Vec::new();
    for s in &doc.input_alphabet {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c != '^' && c != '$' => alphabet.push(c),
            _ => {
                return Err(Error::Parse {
                    location: "input_alphabet".to_string(),
                    message: format!(
                        "symbols must be single characters other than ^ and $, got {s:?}"
                    ),
                })
            }
        }
    }

    let mut builder = SpecBuilder::new(&doc.name, &alphabet, doc.quantum_dim);
    let comm_alphabet: Vec<&str> = doc.comm_alphabet.iter().map(String::as_str).collect();
    builder.comm_alphabet(&comm_alphabet);

    let mut ids: BTreeMap<&str, StateId> = BTreeMap::new();
    let mut reject_state = None;
    for state in &doc.states {
        let kind = match state.kind.as_str() {
            "reading" => StateKind::Reading,
            "communication" => StateKind::Communication,
            "accept" => StateKind::Accept,
            "reject" => StateKind::Reject,
            other => {
                return Err(Error::Parse {
                    location: format!("states.{}", state.name),
                    message: format!("unknown state kind {other:?}"),
                })
            }
        };
        let id = builder.state(&state.name, kind);
        if kind == StateKind::Reject && reject_state.is_none() {
            reject_state = Some(id);
        }
        if ids.insert(state.name.as_str(), id).is_some() {
            return Err(Error::Parse {
                location: format!("states.{}", state.name),
                message: "duplicate state name".to_string(),
            });
        }
    }
    let lookup = |name: &str, context: &str| -> Result<StateId> {
        ids.get(name).copied().ok_or_else(|| Error::Parse {
            location: context.to_string(),
            message: format!("unknown state {name:?}"),
        })
    };

    for (i, entry) in doc.theta.iter().enumerate() {
        let context = format!("theta[{i}] ({}, {})", entry.state, entry.symbol);
        let state = lookup(&entry.state, &context)?;
        let sym = parse_symbol(&entry.symbol, &alphabet, &context)?;
        match entry.kind.as_str() {
            "unitary" => {
                let pairs = entry.matrix.as_ref().ok_or_else(|| Error::Parse {
                    location: context.clone(),
                    message: "unitary entry needs a matrix".to_string(),
                })?;
                let op = matrix_from_pairs(doc.quantum_dim, pairs, &context)?;
                let DeltaDoc::Step(step) = &entry.delta else {
                    return Err(Error::Parse {
                        location: context,
                        message: "unitary entry needs a single (next, move) delta".to_string(),
                    });
                };
                let next = lookup(&step.next, &context)?;
                builder.unitary(state, &[sym], op, next, step.mv);
            }
            "measurement" => {
                let projector_docs = entry.projectors.as_ref().ok_or_else(|| Error::Parse {
                    location: context.clone(),
                    message: "measurement entry needs projectors".to_string(),
                })?;
                let DeltaDoc::Outcomes(outcomes) = &entry.delta else {
                    return Err(Error::Parse {
                        location: context,
                        message: "measurement entry needs per-outcome deltas".to_string(),
                    });
                };
                let mut named = Vec::with_capacity(projector_docs.len());
                let mut arms = Vec::with_capacity(projector_docs.len());
                for p in projector_docs {
                    let projector = matrix_from_pairs(doc.quantum_dim, &p.matrix, &context)?;
                    let step = outcomes.get(&p.label).ok_or_else(|| Error::Parse {
                        location: context.clone(),
                        message: format!("no delta for measurement outcome {:?}", p.label),
                    })?;
                    let next = lookup(&step.next, &context)?;
                    named.push((p.label.clone(), projector));
                    arms.push((next, step.mv));
                }
                builder.measure(state, &[sym], ProjectiveMeasurement::new(named), arms);
            }
            "coin" => {
                let DeltaDoc::Coin(coin_arms) = &entry.delta else {
                    return Err(Error::Parse {
                        location: context,
                        message: "coin entry needs weighted arms".to_string(),
                    });
                };
                let mut arms = Vec::with_capacity(coin_arms.len());
                for arm in coin_arms {
                    arms.push((arm.prob, lookup(&arm.next, &context)?, arm.mv));
                }
                builder.coin(state, &[sym], arms);
            }
            other => {
                return Err(Error::Parse {
                    location: context,
                    message: format!("unknown action kind {other:?}"),
                })
            }
        }
    }

    for (i, entry) in doc.comm.iter().enumerate() {
        let context = format!("comm[{i}] ({})", entry.state);
        let state = lookup(&entry.state, &context)?;
        let mut responses = Vec::with_capacity(entry.responses.len());
        for (gamma, next) in &entry.responses {
            responses.push((gamma.as_str(), lookup(next, &context)?));
        }
        let fallback = reject_state.unwrap_or(state);
        builder.comm(state, &entry.emit, &responses, fallback);
    }

    let initial = lookup(&doc.initial, "initial")?;
    let initial_quantum = CVec::new(
        doc.initial_quantum
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect(),
    );
    let dead = reject_state.unwrap_or(initial);
    Ok(builder.finish(initial, initial_quantum, dead))
}

/// Serialize a machine to pretty JSON.
pub fn to_json(spec: &VerifierSpec) -> String {
    serde_json::to_string_pretty(&to_document(spec)).expect("machine documents serialize")
}

/// Parse a machine from JSON text.
pub fn from_json(text: &str) -> Result<VerifierSpec> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            location: "document".to_string(),
            message: "empty document".to_string(),
        });
    }
    let doc: MachineDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    from_document(&doc)
}

/// Load a machine description from a file.
pub fn load_machine(path: &Path) -> Result<VerifierSpec> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}

/// Write a machine description to a file.
pub fn save_machine(spec: &VerifierSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(spec))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_spec;
    use crate::protocols::{build_verifier, ProtocolId};

    #[test]
    fn round_trip_preserves_the_machine() {
        for protocol in [ProtocolId::Middle, ProtocolId::Knapsack] {
            let (spec, _) = build_verifier(protocol, 0.25).unwrap();
            let json = to_json(&spec);
            let back = from_json(&json).unwrap();
            assert!(validate_spec(&back).is_empty());
            assert_eq!(spec, back, "{protocol} round trip changed the machine");
        }
    }

    #[test]
    fn empty_document_is_a_parse_error() {
        assert!(matches!(from_json(""), Err(Error::Parse { .. })));
        assert!(matches!(from_json("   \n "), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_outcome_delta_is_a_parse_error() {
        let (spec, _) = build_verifier(ProtocolId::Middle, 0.25).unwrap();
        let mut doc = to_document(&spec);
        for entry in &mut doc.theta {
            if entry.kind == "measurement" {
                if let DeltaDoc::Outcomes(outcomes) = &mut entry.delta {
                    outcomes.remove("q1");
                }
                break;
            }
        }
        let text = serde_json::to_string(&doc).unwrap();
        match from_json(&text).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("q1"), "{message}"),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn unknown_state_reference_is_located() {
        let (spec, _) = build_verifier(ProtocolId::Middle, 0.25).unwrap();
        let mut doc = to_document(&spec);
        doc.theta[0].delta = DeltaDoc::Step(StepDoc {
            next: "nowhere".to_string(),
            mv: 0,
        });
        let text = serde_json::to_string(&doc).unwrap();
        match from_json(&text).unwrap_err() {
            Error::Parse { location, message } => {
                assert!(message.contains("nowhere"));
                assert!(location.contains("theta[0]"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn corrupted_operator_fails_validation_after_load() {
        let (spec, _) = build_verifier(ProtocolId::Middle, 0.25).unwrap();
        let mut doc = to_document(&spec);
        let entry = doc
            .theta
            .iter_mut()
            .find(|e| e.kind == "unitary" && e.state == "rot")
            .unwrap();
        entry.matrix.as_mut().unwrap()[0] = [3.0, 0.0];
        let text = serde_json::to_string(&doc).unwrap();
        let loaded = from_json(&text).unwrap();
        let report = validate_spec(&loaded);
        assert!(report.iter().any(|v| v.message.contains("not unitary")));
    }
}
