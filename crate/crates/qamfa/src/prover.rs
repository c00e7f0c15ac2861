//! Prover strategies: the all-powerful honest provers of each protocol and
//! exhaustive deterministic adversary families for soundness testing.
//!
//! A strategy is a pure function of (input, communication history, emitted
//! symbol), so strategies are freely shareable. Per-iteration outcome
//! probabilities are affine in a mixed strategy's weights, so the extremal
//! deterministic strategies enumerated here attain every soundness minimum.

use crate::error::{Error, Result};
use crate::machine::CommHistory;
use crate::protocols::{knapsack, reference_decider, ProtocolId};

/// The finite decision datum a deterministic strategy encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyParam {
    /// For machines without communication states.
    Silent,
    /// Claim that the middle of the input is at 0-based position `m`;
    /// `None` never claims.
    MiddleClaim { m: Option<usize> },
    /// Per-block selection answers for the subset-sum protocol.
    SubsetSelect { take: Vec<bool> },
    /// Position claim for the center-or-mirrored-pair protocol.
    MirroredB { claim: Option<BClaim> },
    /// Mirrored position pair whose symbols differ; `None` never claims.
    DifferingPair { claim: Option<(usize, usize)> },
}

/// The two claim shapes of the mirrored-'b' protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BClaim {
    /// A single 'b' at the exact center (odd-length inputs).
    Center(usize),
    /// Two 'b's at mirrored positions i < j.
    Pair(usize, usize),
}

/// A deterministic prover strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ProverStrategy {
    pub param: StrategyParam,
}

impl ProverStrategy {
    pub fn silent() -> Self {
        ProverStrategy {
            param: StrategyParam::Silent,
        }
    }

    pub fn middle_claim(m: Option<usize>) -> Self {
        ProverStrategy {
            param: StrategyParam::MiddleClaim { m },
        }
    }

    /// Short human-readable description of the decision parameter.
    pub fn describe(&self) -> String {
        match &self.param {
            StrategyParam::Silent => "silent".to_string(),
            StrategyParam::MiddleClaim { m: Some(m) } => format!("claim middle at {m}"),
            StrategyParam::MiddleClaim { m: None } => "never claim".to_string(),
            StrategyParam::SubsetSelect { take } => {
                let picked: Vec<String> = take
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t)
                    .map(|(i, _)| (i + 1).to_string())
                    .collect();
                format!("subset {{{}}}", picked.join(","))
            }
            StrategyParam::MirroredB { claim: None } => "never claim".to_string(),
            StrategyParam::MirroredB {
                claim: Some(BClaim::Center(i)),
            } => format!("center b at {i}"),
            StrategyParam::MirroredB {
                claim: Some(BClaim::Pair(i, j)),
            } => format!("b pair at ({i},{j})"),
            StrategyParam::DifferingPair { claim: None } => "never claim".to_string(),
            StrategyParam::DifferingPair {
                claim: Some((i, j)),
            } => format!("differing pair at ({i},{j})"),
        }
    }

    /// Deterministic response to an emitted symbol given the history of the
    /// current iteration.
    pub fn respond(&self, _input: &str, history: &CommHistory, emitted: &str) -> String {
        match &self.param {
            StrategyParam::Silent => String::new(),
            StrategyParam::MiddleClaim { m } => {
                let asked = history.len();
                match m {
                    Some(m) if asked == *m => "middle".to_string(),
                    _ => "not-middle".to_string(),
                }
            }
            StrategyParam::SubsetSelect { take } => {
                let block = history.len();
                if take.get(block).copied().unwrap_or(false) {
                    "take".to_string()
                } else {
                    "skip".to_string()
                }
            }
            StrategyParam::MirroredB { claim } => {
                let scan_queries = history.iter().filter(|(e, _)| e == "u?").count();
                let gap_queries = history.iter().filter(|(e, _)| e == "z?").count();
                match (claim, emitted) {
                    (Some(BClaim::Center(i)), "u?") if scan_queries == *i => "mid-b".to_string(),
                    (Some(BClaim::Pair(i, _)), "u?") if scan_queries == *i => "pair-b".to_string(),
                    (Some(BClaim::Pair(i, j)), "z?") if i + 1 + gap_queries == *j => {
                        "here".to_string()
                    }
                    _ => "go".to_string(),
                }
            }
            StrategyParam::DifferingPair { claim } => {
                let scan_queries = history.iter().filter(|(e, _)| e == "u?").count();
                let gap_queries = history.iter().filter(|(e, _)| e == "z?").count();
                match (claim, emitted) {
                    (Some((i, _)), "u?") if scan_queries == *i => "here".to_string(),
                    (Some((i, j)), "z?") if i + 1 + gap_queries == *j => "here".to_string(),
                    _ => "go".to_string(),
                }
            }
        }
    }
}

/// The honest prover for an in-language input. The returned strategy makes
/// the verifier's per-iteration rejection probability exactly zero.
pub fn honest_prover(protocol: ProtocolId, input: &str) -> Result<ProverStrategy> {
    if !reference_decider(protocol, input) {
        return Err(Error::NoWitness {
            protocol: protocol.to_string(),
            input: input.to_string(),
        });
    }
    let n = input.chars().count();
    let chars: Vec<char> = input.chars().collect();
    let param = match protocol {
        ProtocolId::Middle | ProtocolId::Mpal => StrategyParam::MiddleClaim {
            m: Some((n - 1) / 2),
        },
        ProtocolId::Knapsack => {
            let instance = knapsack::parse(input).expect("member inputs are well-formed");
            let take = knapsack::smallest_witness(&instance).expect("member inputs have a witness");
            StrategyParam::SubsetSelect { take }
        }
        ProtocolId::L1 => {
            let claim = if n % 2 == 1 && chars[(n - 1) / 2] == 'b' {
                BClaim::Center((n - 1) / 2)
            } else {
                let i = (0..n)
                    .find(|&i| i < n - 1 - i && chars[i] == 'b' && chars[n - 1 - i] == 'b')
                    .expect("member inputs have a mirrored b pair");
                BClaim::Pair(i, n - 1 - i)
            };
            StrategyParam::MirroredB { claim: Some(claim) }
        }
        ProtocolId::L2 => {
            let i = (0..n)
                .find(|&i| i < n - 1 - i && chars[i] != chars[n - 1 - i])
                .expect("member inputs have a differing mirrored pair");
            StrategyParam::DifferingPair {
                claim: Some((i, n - 1 - i)),
            }
        }
    };
    Ok(ProverStrategy { param })
}

/// Enumeration cap for subset adversaries.
pub const MAX_SUBSET_BLOCKS: usize = 20;

/// Every deterministic adversary relevant to the protocol on this input:
/// one strategy per value of the decision parameter, plus the degenerate
/// never-claim strategy where the parameter is optional.
pub fn enumerate_adversaries(protocol: ProtocolId, input: &str) -> Result<Vec<ProverStrategy>> {
    let n = input.chars().count();
    let mut out = Vec::new();
    match protocol {
        ProtocolId::Middle | ProtocolId::Mpal => {
            for m in 0..n {
                out.push(ProverStrategy::middle_claim(Some(m)));
            }
            out.push(ProverStrategy::middle_claim(None));
        }
        ProtocolId::Knapsack => {
            let blocks = input.chars().filter(|&c| c == '#').count();
            if blocks > MAX_SUBSET_BLOCKS {
                return Err(Error::BudgetExceeded(format!(
                    "{blocks} blocks exceed the {MAX_SUBSET_BLOCKS}-block subset enumeration cap"
                )));
            }
            for mask in 0u32..(1u32 << blocks) {
                let take = (0..blocks).map(|i| mask >> i & 1 == 1).collect();
                out.push(ProverStrategy {
                    param: StrategyParam::SubsetSelect { take },
                });
            }
        }
        ProtocolId::L1 => {
            for i in 0..n {
                out.push(ProverStrategy {
                    param: StrategyParam::MirroredB {
                        claim: Some(BClaim::Center(i)),
                    },
                });
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(ProverStrategy {
                        param: StrategyParam::MirroredB {
                            claim: Some(BClaim::Pair(i, j)),
                        },
                    });
                }
            }
            out.push(ProverStrategy {
                param: StrategyParam::MirroredB { claim: None },
            });
        }
        ProtocolId::L2 => {
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(ProverStrategy {
                        param: StrategyParam::DifferingPair {
                            claim: Some((i, j)),
                        },
                    });
                }
            }
            out.push(ProverStrategy {
                param: StrategyParam::DifferingPair { claim: None },
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_middle_forces_center() {
        let s = honest_prover(ProtocolId::Middle, "aaa").unwrap();
        assert_eq!(s.param, StrategyParam::MiddleClaim { m: Some(1) });
        assert_eq!(s.describe(), "claim middle at 1");
    }

    #[test]
    fn honest_mpal_claims_center() {
        let s = honest_prover(ProtocolId::Mpal, "ababa").unwrap();
        assert_eq!(s.param, StrategyParam::MiddleClaim { m: Some(2) });
    }

    #[test]
    fn honest_knapsack_picks_smallest_witness() {
        let s = honest_prover(ProtocolId::Knapsack, "101#10#11").unwrap();
        assert_eq!(
            s.param,
            StrategyParam::SubsetSelect {
                take: vec![true, true]
            }
        );
        assert_eq!(s.describe(), "subset {1,2}");
    }

    #[test]
    fn non_member_has_no_witness() {
        let err = honest_prover(ProtocolId::Middle, "aba").unwrap_err();
        assert!(matches!(err, Error::NoWitness { .. }));
    }

    #[test]
    fn adversary_counts_match_parameter_spaces() {
        assert_eq!(enumerate_adversaries(ProtocolId::Middle, "aba").unwrap().len(), 4);
        assert_eq!(
            enumerate_adversaries(ProtocolId::Knapsack, "10#1#1").unwrap().len(),
            4
        );
        assert_eq!(enumerate_adversaries(ProtocolId::Mpal, "a").unwrap().len(), 2);
        // n positions + C(n,2) pairs + never-claim
        assert_eq!(enumerate_adversaries(ProtocolId::L1, "abab").unwrap().len(), 4 + 6 + 1);
        assert_eq!(enumerate_adversaries(ProtocolId::L2, "ab").unwrap().len(), 1 + 1);
    }

    #[test]
    fn subset_enumeration_has_a_cap() {
        let input = format!("1{}", "#1".repeat(21));
        let err = enumerate_adversaries(ProtocolId::Knapsack, &input).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn responses_are_deterministic_and_positional() {
        let s = ProverStrategy::middle_claim(Some(2));
        let h1: CommHistory = vec![("mid?".into(), "not-middle".into())];
        assert_eq!(s.respond("aaaa", &h1, "mid?"), "not-middle");
        let h2: CommHistory = vec![
            ("mid?".into(), "not-middle".into()),
            ("mid?".into(), "not-middle".into()),
        ];
        assert_eq!(s.respond("aaaa", &h2, "mid?"), "middle");
        for _ in 0..5 {
            assert_eq!(s.respond("aaaa", &h2, "mid?"), "middle");
        }

        let k = ProverStrategy {
            param: StrategyParam::SubsetSelect {
                take: vec![false, true],
            },
        };
        assert_eq!(k.respond("1#1#1", &CommHistory::new(), "sel?"), "skip");
        let h: CommHistory = vec![("sel?".into(), "skip".into())];
        assert_eq!(k.respond("1#1#1", &h, "sel?"), "take");
    }
}
