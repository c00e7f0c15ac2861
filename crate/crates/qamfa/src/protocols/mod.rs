//! The five concrete verifier protocols: machine constructions, fixed
//! constants, reference language deciders, and closed-form bound evaluators.

pub mod bounds;
pub mod constants;
pub mod gadgets;
pub mod knapsack;
pub mod middle;
pub mod mpal;
pub mod pairs;

use crate::error::{Error, Result};
use crate::machine::VerifierSpec;

/// The implemented protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolId {
    /// Strings xay with |x| = |y| over {a,b}.
    Middle,
    /// Marked palindromes xax^R over {a,b}.
    Mpal,
    /// Subset-sum instances b#a_1#...#a_N over {0,1,#}.
    Knapsack,
    /// Strings with a 'b' at a pair of mirrored positions (or dead center).
    L1,
    /// Non-palindromes: some mirrored position pair carries differing symbols.
    L2,
}

pub const ALL_PROTOCOLS: [ProtocolId; 5] = [
    ProtocolId::Middle,
    ProtocolId::Mpal,
    ProtocolId::Knapsack,
    ProtocolId::L1,
    ProtocolId::L2,
];

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ProtocolId::Middle => "middle",
            ProtocolId::Mpal => "mpal",
            ProtocolId::Knapsack => "knapsack",
            ProtocolId::L1 => "l1",
            ProtocolId::L2 => "l2",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "middle" => Ok(ProtocolId::Middle),
            "mpal" => Ok(ProtocolId::Mpal),
            "knapsack" => Ok(ProtocolId::Knapsack),
            "l1" => Ok(ProtocolId::L1),
            "l2" => Ok(ProtocolId::L2),
            other => Err(Error::InvalidArgument(format!(
                "unknown protocol {other:?}; expected middle, mpal, knapsack, l1 or l2"
            ))),
        }
    }
}

/// Error bound and the repetition parameter derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub epsilon: f64,
    pub k: u32,
}

/// Repetition parameter for a protocol at error bound `epsilon`.
pub fn params_for(protocol: ProtocolId, epsilon: f64) -> Result<ProtocolParams> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let log_inv = (1.0 / epsilon).log2();
    let k = match protocol {
        ProtocolId::Mpal => log_inv.max(5.0f64.log2()).ceil() as u32,
        _ => 1 + log_inv.ceil() as u32,
    };
    Ok(ProtocolParams { epsilon, k })
}

/// Input alphabet of a protocol.
pub fn alphabet(protocol: ProtocolId) -> &'static [char] {
    match protocol {
        ProtocolId::Knapsack => &['0', '1', '#'],
        _ => &['a', 'b'],
    }
}

/// Build the validated verifier machine for a protocol at error bound
/// `epsilon`.
pub fn build_verifier(protocol: ProtocolId, epsilon: f64) -> Result<(VerifierSpec, ProtocolParams)> {
    let params = params_for(protocol, epsilon)?;
    Ok((build_verifier_with_k(protocol, params.k), params))
}

/// Build a verifier with an explicit repetition parameter. Exactness checks
/// sweep k directly instead of deriving it from epsilon.
pub fn build_verifier_with_k(protocol: ProtocolId, k: u32) -> VerifierSpec {
    match protocol {
        ProtocolId::Middle => middle::build_with_k(k),
        ProtocolId::Mpal => mpal::build_with_k(k),
        ProtocolId::Knapsack => knapsack::build_with_k(k),
        ProtocolId::L1 => pairs::build_l1_with_k(k),
        ProtocolId::L2 => pairs::build_l2_with_k(k),
    }
}

/// Brute-force ground truth for language membership.
pub fn reference_decider(protocol: ProtocolId, input: &str) -> bool {
    let ok_alphabet = input.chars().all(|c| alphabet(protocol).contains(&c));
    if !ok_alphabet {
        return false;
    }
    let chars: Vec<char> = input.chars().collect();
    let n = chars.len();
    match protocol {
        ProtocolId::Middle => n % 2 == 1 && chars[(n - 1) / 2] == 'a',
        ProtocolId::Mpal => {
            n % 2 == 1
                && chars[(n - 1) / 2] == 'a'
                && (0..n / 2).all(|i| chars[i] == chars[n - 1 - i])
        }
        ProtocolId::Knapsack => match knapsack::parse(input) {
            Some(instance) => knapsack::smallest_witness(&instance).is_some(),
            None => false,
        },
        ProtocolId::L1 => (0..n).any(|i| i <= n - 1 - i && chars[i] == 'b' && chars[n - 1 - i] == 'b'),
        ProtocolId::L2 => (0..n).any(|i| i < n - 1 - i && chars[i] != chars[n - 1 - i]),
    }
}

/// A canonical in-language input of length `n`, where one exists.
pub fn canonical_member(protocol: ProtocolId, n: usize) -> Option<String> {
    match protocol {
        ProtocolId::Middle | ProtocolId::Mpal => {
            (n % 2 == 1).then(|| "a".repeat(n))
        }
        ProtocolId::L1 => {
            if n % 2 == 1 {
                let half = "a".repeat((n - 1) / 2);
                Some(format!("{half}b{half}"))
            } else if n >= 2 {
                Some(format!("b{}b", "a".repeat(n - 2)))
            } else {
                None
            }
        }
        ProtocolId::L2 => (n >= 2).then(|| format!("{}b", "a".repeat(n - 1))),
        ProtocolId::Knapsack => {
            // "10^{m-1}#10^{m-1}" has length 2m+1 and equal blocks.
            if n >= 3 && n % 2 == 1 {
                let block = format!("1{}", "0".repeat((n - 1) / 2 - 1));
                Some(format!("{block}#{block}"))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_parameter_examples() {
        assert_eq!(params_for(ProtocolId::Middle, 0.25).unwrap().k, 3);
        assert_eq!(params_for(ProtocolId::Mpal, 0.2).unwrap().k, 3);
        assert_eq!(params_for(ProtocolId::Knapsack, 0.25).unwrap().k, 3);
        assert_eq!(params_for(ProtocolId::Middle, 0.1).unwrap().k, 5);
        assert_eq!(params_for(ProtocolId::Mpal, 0.4).unwrap().k, 3);
        assert!(params_for(ProtocolId::Middle, 0.5).is_err());
        assert!(params_for(ProtocolId::Middle, 0.0).is_err());
    }

    #[test]
    fn middle_decider() {
        assert!(reference_decider(ProtocolId::Middle, "aaa"));
        assert!(reference_decider(ProtocolId::Middle, "a"));
        assert!(reference_decider(ProtocolId::Middle, "bab"));
        assert!(!reference_decider(ProtocolId::Middle, "aba"));
        assert!(!reference_decider(ProtocolId::Middle, "aa"));
        assert!(!reference_decider(ProtocolId::Middle, ""));
    }

    #[test]
    fn mpal_decider() {
        assert!(reference_decider(ProtocolId::Mpal, "a"));
        assert!(reference_decider(ProtocolId::Mpal, "ababa"));
        assert!(reference_decider(ProtocolId::Mpal, "bab"));
        assert!(!reference_decider(ProtocolId::Mpal, "aba")); // center is 'b'
        assert!(!reference_decider(ProtocolId::Mpal, "baab")); // even length
        assert!(!reference_decider(ProtocolId::Mpal, "aab"));
        assert!(!reference_decider(ProtocolId::Mpal, ""));
    }

    #[test]
    fn knapsack_decider() {
        assert!(reference_decider(ProtocolId::Knapsack, "101#10#11"));
        assert!(!reference_decider(ProtocolId::Knapsack, "101#10#110"));
        assert!(!reference_decider(ProtocolId::Knapsack, "101"));
        assert!(!reference_decider(ProtocolId::Knapsack, "101#01"));
        assert!(!reference_decider(ProtocolId::Knapsack, "101##10"));
    }

    /// The position-scan deciders match the literal decomposition
    /// definitions: w = sbt = ubv with |s| = |v| (and the a/b variant).
    #[test]
    fn pair_language_deciders_match_decomposition_scan() {
        fn l1_by_decomposition(w: &[char]) -> bool {
            let n = w.len();
            // w = sbt = ubv with |s| = |v|: the first decomposition puts a
            // 'b' at position p = |s|, the second at q = |u| = n − 1 − |v|,
            // and |s| = |v| forces p = n − 1 − q.
            for p in 0..n {
                for q in 0..n {
                    if w[p] == 'b' && w[q] == 'b' && p == n - 1 - q {
                        return true;
                    }
                }
            }
            false
        }
        fn l2_by_decomposition(w: &[char]) -> bool {
            let n = w.len();
            for p in 0..n {
                for q in 0..n {
                    let mirrored = p == n - 1 - q;
                    if mirrored && p < q && w[p] != w[q] {
                        return true;
                    }
                }
            }
            false
        }
        for n in 0..=10usize {
            for bits in 0..(1u32 << n) {
                let w: String = (0..n)
                    .map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' })
                    .collect();
                let chars: Vec<char> = w.chars().collect();
                assert_eq!(
                    reference_decider(ProtocolId::L1, &w),
                    l1_by_decomposition(&chars),
                    "L1 mismatch on {w:?}"
                );
                assert_eq!(
                    reference_decider(ProtocolId::L2, &w),
                    l2_by_decomposition(&chars),
                    "L2 mismatch on {w:?}"
                );
            }
        }
    }

    #[test]
    fn l2_is_the_nonpalindromes() {
        for n in 0..=9usize {
            for bits in 0..(1u32 << n) {
                let w: String = (0..n)
                    .map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' })
                    .collect();
                let is_pal = w.chars().eq(w.chars().rev());
                assert_eq!(reference_decider(ProtocolId::L2, &w), !is_pal);
            }
        }
    }

    #[test]
    fn canonical_members_are_members() {
        for protocol in ALL_PROTOCOLS {
            for n in 1..=11usize {
                if let Some(w) = canonical_member(protocol, n) {
                    assert_eq!(w.chars().count(), n);
                    assert!(
                        reference_decider(protocol, &w),
                        "{protocol} canonical {w:?} not a member"
                    );
                }
            }
        }
    }
}
