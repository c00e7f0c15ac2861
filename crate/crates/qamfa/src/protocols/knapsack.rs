//! Verifier for subset-sum instances b#a_1#...#a_N over {0,1,#}: the input
//! is a member when every block lies in 1{0,1}* and some subset of the a_i
//! values sums to v(b).
//!
//! The 8-dimensional register encodes binary values in its amplitudes: after
//! reading b through U_0/U_1 with a forward measurement per bit, the
//! conditioned state is (1, v(b), 0, ...)/√(1+v(b)²). Selected blocks are
//! encoded into the third amplitude through U_0'/U_1', and the boundary
//! operator subtracts them from the second. On the right end-marker a full
//! computational measurement rejects on |q1⟩ — for any wrong subset the
//! leftover difference keeps |q1⟩ mass at least 1/2 — and otherwise runs k
//! coin flips, accepting on all heads. Any forward-measurement outcome `r`
//! resets the register via a computational measurement and an
//! outcome-indexed swap back to |q0⟩, then restarts. Format violations
//! (empty block, leading zero, missing '#') reject deterministically
//! during the scan.

use super::constants::{m_fin, m_for, u_0, u_0_prime, u_1, u_1_prime, u_hash};
use super::gadgets::{flip_chain, rewind, RIGHT};
use crate::linalg::{CMat, CVec};
use crate::machine::{SpecBuilder, StateId, StateKind, TapeSymbol, VerifierSpec};

pub const SYM_0: TapeSymbol = TapeSymbol::Input('0');
pub const SYM_1: TapeSymbol = TapeSymbol::Input('1');
pub const SYM_HASH: TapeSymbol = TapeSymbol::Input('#');
const LEFT: TapeSymbol = TapeSymbol::LeftMarker;

/// A parsed well-formed instance. `None` from [`parse`] means the framing is
/// malformed (no '#', an empty block, or a leading zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub target: u64,
    pub values: Vec<u64>,
}

pub fn parse(input: &str) -> Option<Instance> {
    let parts: Vec<&str> = input.split('#').collect();
    if parts.len() < 2 {
        return None;
    }
    let mut numbers = Vec::with_capacity(parts.len());
    for part in &parts {
        if part.is_empty() || !part.starts_with('1') || !part.chars().all(|c| c == '0' || c == '1')
        {
            return None;
        }
        numbers.push(u64::from_str_radix(part, 2).ok()?);
    }
    Some(Instance {
        target: numbers[0],
        values: numbers[1..].to_vec(),
    })
}

/// First subset (in lexicographic order of sorted index lists) whose values
/// sum to the target, as a per-block selection vector.
pub fn smallest_witness(instance: &Instance) -> Option<Vec<bool>> {
    fn search(values: &[u64], index: usize, remaining: u64, take: &mut Vec<bool>) -> bool {
        if remaining == 0 {
            // Blocks past `index` stay unselected.
            return true;
        }
        if index == values.len() {
            return false;
        }
        if values[index] <= remaining {
            take[index] = true;
            if search(values, index + 1, remaining - values[index], take) {
                return true;
            }
            take[index] = false;
        }
        search(values, index + 1, remaining, take)
    }
    let mut take = vec![false; instance.values.len()];
    search(&instance.values, 0, instance.target, &mut take).then_some(take)
}

pub fn build_with_k(k: u32) -> VerifierSpec {
    let dim = 8;
    let mut b = SpecBuilder::new("knapsack", &['0', '1', '#'], dim);
    b.comm_alphabet(&["sel?", "take", "skip"]);
    let bits = [SYM_0, SYM_1];

    let s0 = b.state("s0", StateKind::Reading);
    let b_first = b.state("b.first", StateKind::Reading);
    let b_meas = b.state("b.meas", StateKind::Reading);
    let b_next = b.state("b.next", StateKind::Reading);
    let ask = b.state("ask", StateKind::Communication);
    let sel_enter = b.state("sel.enter", StateKind::Reading);
    let a_first = b.state("a.first", StateKind::Reading);
    let a_meas = b.state("a.meas", StateKind::Reading);
    let a_next = b.state("a.next", StateKind::Reading);
    let h_meas = b.state("sub.meas", StateKind::Reading);
    let skip_enter = b.state("skip.enter", StateKind::Reading);
    let skip_first = b.state("skip.first", StateKind::Reading);
    let skip_scan = b.state("skip.scan", StateKind::Reading);
    let fin = b.state("fin", StateKind::Reading);
    let acc = b.state("acc", StateKind::Accept);
    let rej = b.state("rej", StateKind::Reject);

    let rew = rewind(&mut b, "rew", dim, s0);
    let reset = add_reset(&mut b, dim, rew);
    let flips = flip_chain(
        &mut b,
        "flip",
        dim,
        k,
        &[RIGHT],
        (acc, 0),
        (rew, -1),
        Some((reset, 0)),
    );

    let id = CMat::identity(dim);
    b.unitary(s0, &[LEFT], id.clone(), b_first, 1);

    // Target block b: leading '1' required, one encode + measure per bit.
    b.unitary(b_first, &[SYM_1], u_1(), b_meas, 0);
    b.unitary(b_first, &[SYM_0, SYM_HASH, RIGHT], id.clone(), rej, 0);
    b.measure(b_meas, &bits, m_for(), vec![(b_next, 1), (reset, 0)]);
    b.unitary(b_next, &[SYM_0], u_0(), b_meas, 0);
    b.unitary(b_next, &[SYM_1], u_1(), b_meas, 0);
    b.unitary(b_next, &[SYM_HASH], id.clone(), ask, 0);
    b.unitary(b_next, &[RIGHT], id.clone(), rej, 0); // no '#' at all

    // One selection query per block boundary.
    b.comm(ask, "sel?", &[("take", sel_enter), ("skip", skip_enter)], rej);

    // Selected block: encode through the primed operators, then subtract at
    // the following boundary.
    b.unitary(sel_enter, &[SYM_HASH], id.clone(), a_first, 1);
    b.unitary(a_first, &[SYM_1], u_1_prime(), a_meas, 0);
    b.unitary(a_first, &[SYM_0, SYM_HASH, RIGHT], id.clone(), rej, 0);
    b.measure(a_meas, &bits, m_for(), vec![(a_next, 1), (reset, 0)]);
    b.unitary(a_next, &[SYM_0], u_0_prime(), a_meas, 0);
    b.unitary(a_next, &[SYM_1], u_1_prime(), a_meas, 0);
    b.unitary(a_next, &[SYM_HASH], u_hash(), h_meas, 0);
    b.unitary(a_next, &[RIGHT], u_hash(), h_meas, 0);
    b.measure(h_meas, &[SYM_HASH], m_for(), vec![(ask, 0), (reset, 0)]);
    b.measure(h_meas, &[RIGHT], m_for(), vec![(fin, 0), (reset, 0)]);

    // Skipped block: classical format scan only.
    b.unitary(skip_enter, &[SYM_HASH], id.clone(), skip_first, 1);
    b.unitary(skip_first, &[SYM_1], id.clone(), skip_scan, 1);
    b.unitary(skip_first, &[SYM_0, SYM_HASH, RIGHT], id.clone(), rej, 0);
    b.unitary(skip_scan, &bits, id.clone(), skip_scan, 1);
    b.unitary(skip_scan, &[SYM_HASH], id.clone(), ask, 0);
    b.unitary(skip_scan, &[RIGHT], id, fin, 0);

    // Final measurement: |q1⟩ rejects, |q0⟩ runs the coin flips, any other
    // outcome resets and restarts.
    let mut fin_arms: Vec<(StateId, i8)> = Vec::with_capacity(8);
    fin_arms.push((flips, 0));
    fin_arms.push((rej, 0));
    for i in 2..8 {
        let fix = b.state(&format!("fin.fix{i}"), StateKind::Reading);
        b.unitary(fix, &[RIGHT], CMat::basis_swap(dim, 0, i), rew, 0);
        fin_arms.push((fix, 0));
    }
    b.measure(fin, &[RIGHT], m_fin(), fin_arms);

    b.finish(s0, CVec::basis(dim, 0), rej)
}

/// Reset procedure: measure in the computational basis, map the resulting
/// basis state back to |q0⟩ with a swap, rewind and restart.
fn add_reset(b: &mut SpecBuilder, dim: usize, rew: StateId) -> StateId {
    let all: Vec<TapeSymbol> = {
        let mut syms = vec![LEFT, RIGHT];
        syms.extend(b.input_symbols());
        syms
    };
    let reset = b.state("reset", StateKind::Reading);
    let mut arms = Vec::with_capacity(dim);
    for i in 0..dim {
        let fix = b.state(&format!("reset.fix{i}"), StateKind::Reading);
        b.unitary(fix, &all, CMat::basis_swap(dim, 0, i), rew, 0);
        arms.push((fix, 0));
    }
    b.measure(reset, &all, m_fin(), arms);
    reset
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_spec;

    #[test]
    fn machine_validates() {
        for k in [1, 3] {
            let report = validate_spec(&build_with_k(k));
            assert!(report.is_empty(), "k={k}: {report:?}");
        }
    }

    #[test]
    fn parse_rejects_malformed_framings() {
        assert!(parse("101").is_none()); // no '#'
        assert!(parse("101#").is_none()); // empty block
        assert!(parse("#101").is_none());
        assert!(parse("101#011").is_none()); // leading zero
        assert!(parse("10a#1").is_none());
        let inst = parse("101#10#11").unwrap();
        assert_eq!(inst.target, 5);
        assert_eq!(inst.values, vec![2, 3]);
    }

    #[test]
    fn witness_search_prefers_lexicographically_smallest() {
        // 4 = 1+3 = 4: the subset {1,2} precedes {3} in index-lex order.
        let inst = parse("100#1#11#100").unwrap();
        assert_eq!(
            smallest_witness(&inst),
            Some(vec![true, true, false])
        );
        let no = parse("101#10#110").unwrap();
        assert_eq!(smallest_witness(&no), None);
    }
}
