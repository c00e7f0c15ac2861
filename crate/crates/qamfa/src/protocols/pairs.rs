//! Verifiers for the two mirrored-position languages over {a,b}:
//! strings with a 'b' at dead center or at two mirrored positions, and
//! non-palindromes (some mirrored pair of positions carries differing
//! symbols).
//!
//! Both reuse the middle protocol's rotation arithmetic: +α per symbol
//! before the first claimed position, no rotation across the claimed
//! positions and the gap between them, −α per symbol after the last one.
//! The claimed symbols are checked classically ('b'/'b' for the first
//! language, a differing pair for the second). The net rotation is zero
//! exactly when the claimed positions are mirrored, so the end-marker
//! measurement plus the shared acceptance gadget give one-sided error.

use super::constants::{m_01, u_alpha, u_minus_alpha};
use super::gadgets::{acceptance_gadget, INPUTS_AB, LEFT, RIGHT, SYM_A, SYM_B};
use crate::linalg::{CMat, CVec};
use crate::machine::{SpecBuilder, StateId, StateKind, VerifierSpec};

struct Scaffold {
    s0: StateId,
    uask: StateId,
    urot: StateId,
    down: StateId,
    rej: StateId,
}

/// Shared skeleton: query scan, rotation states, descent, end measurement
/// and acceptance gadget. Callers wire the claim-checking states.
fn scaffold(b: &mut SpecBuilder, k: u32) -> Scaffold {
    let dim = 2;
    let s0 = b.state("s0", StateKind::Reading);
    let uscan = b.state("u.scan", StateKind::Reading);
    let uask = b.state("u.ask", StateKind::Communication);
    let urot = b.state("u.rot", StateKind::Reading);
    let down = b.state("down", StateKind::Reading);
    let meas = b.state("meas", StateKind::Reading);
    let acc = b.state("acc", StateKind::Accept);
    let rej = b.state("rej", StateKind::Reject);
    let gadget = acceptance_gadget(b, dim, k, s0, acc);

    let id = CMat::identity(dim);
    b.unitary(s0, &[LEFT], id.clone(), uscan, 1);
    b.unitary(uscan, &INPUTS_AB, id.clone(), uask, 0);
    b.unitary(uscan, &[RIGHT], id.clone(), rej, 0);
    b.unitary(urot, &INPUTS_AB, u_alpha(), uscan, 1);
    b.unitary(down, &INPUTS_AB, u_minus_alpha(), down, 1);
    b.unitary(down, &[RIGHT], id, meas, 0);
    b.measure(meas, &[RIGHT], m_01(), vec![(gadget, -1), (rej, 0)]);

    Scaffold {
        s0,
        uask,
        urot,
        down,
        rej,
    }
}

pub fn build_l1_with_k(k: u32) -> VerifierSpec {
    let dim = 2;
    let mut b = SpecBuilder::new("l1", &['a', 'b'], dim);
    b.comm_alphabet(&["u?", "z?", "go", "mid-b", "pair-b", "here"]);
    let sc = scaffold(&mut b, k);
    let urot = sc.urot;

    let chk_mid = b.state("chk.mid", StateKind::Reading);
    let chk_first = b.state("chk.first", StateKind::Reading);
    let zscan = b.state("z.scan", StateKind::Reading);
    let zask = b.state("z.ask", StateKind::Communication);
    let zmove = b.state("z.move", StateKind::Reading);
    let chk_second = b.state("chk.second", StateKind::Reading);

    b.comm(
        sc.uask,
        "u?",
        &[("go", urot), ("mid-b", chk_mid), ("pair-b", chk_first)],
        sc.rej,
    );
    let id = CMat::identity(dim);
    // Single center claim: a 'b' here, then descend.
    b.unitary(chk_mid, &[SYM_B], id.clone(), sc.down, 1);
    b.unitary(chk_mid, &[SYM_A], id.clone(), sc.rej, 0);
    // Pair claim: a 'b' here, then scan the gap without rotating until the
    // prover marks the mirrored 'b'.
    b.unitary(chk_first, &[SYM_B], id.clone(), zscan, 1);
    b.unitary(chk_first, &[SYM_A], id.clone(), sc.rej, 0);
    b.unitary(zscan, &INPUTS_AB, id.clone(), zask, 0);
    b.unitary(zscan, &[RIGHT], id.clone(), sc.rej, 0);
    b.comm(zask, "z?", &[("go", zmove), ("here", chk_second)], sc.rej);
    b.unitary(zmove, &INPUTS_AB, id.clone(), zscan, 1);
    b.unitary(chk_second, &[SYM_B], id.clone(), sc.down, 1);
    b.unitary(chk_second, &[SYM_A], id, sc.rej, 0);

    b.finish(sc.s0, CVec::basis(dim, 0), sc.rej)
}

pub fn build_l2_with_k(k: u32) -> VerifierSpec {
    let dim = 2;
    let mut b = SpecBuilder::new("l2", &['a', 'b'], dim);
    b.comm_alphabet(&["u?", "z?", "go", "here"]);
    let sc = scaffold(&mut b, k);
    let urot = sc.urot;

    let mark = b.state("mark", StateKind::Reading);
    let id = CMat::identity(dim);
    b.comm(sc.uask, "u?", &[("go", urot), ("here", mark)], sc.rej);

    // Remember the first claimed symbol in the classical state, scan the gap
    // without rotating, and require the mirrored symbol to differ.
    for (seen, expect) in [(SYM_A, SYM_B), (SYM_B, SYM_A)] {
        let tag = if seen == SYM_A { "a" } else { "b" };
        let zscan = b.state(&format!("z.scan.{tag}"), StateKind::Reading);
        let zask = b.state(&format!("z.ask.{tag}"), StateKind::Communication);
        let zmove = b.state(&format!("z.move.{tag}"), StateKind::Reading);
        let chk = b.state(&format!("chk.{tag}"), StateKind::Reading);
        b.unitary(mark, &[seen], id.clone(), zscan, 1);
        b.unitary(zscan, &INPUTS_AB, id.clone(), zask, 0);
        b.unitary(zscan, &[RIGHT], id.clone(), sc.rej, 0);
        b.comm(zask, "z?", &[("go", zmove), ("here", chk)], sc.rej);
        b.unitary(zmove, &INPUTS_AB, id.clone(), zscan, 1);
        b.unitary(chk, &[expect], id.clone(), sc.down, 1);
        b.unitary(chk, &[seen], id.clone(), sc.rej, 0);
    }

    b.finish(sc.s0, CVec::basis(dim, 0), sc.rej)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_spec;

    #[test]
    fn machines_validate() {
        for k in [1, 3] {
            let r1 = validate_spec(&build_l1_with_k(k));
            assert!(r1.is_empty(), "l1 k={k}: {r1:?}");
            let r2 = validate_spec(&build_l2_with_k(k));
            assert!(r2.is_empty(), "l2 k={k}: {r2:?}");
        }
    }
}
