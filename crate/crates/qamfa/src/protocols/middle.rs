//! Verifier for the language of strings xay with |x| = |y| over {a,b}.
//!
//! The machine scans left to right, asking the prover at every input cell
//! whether it is the middle one. Before a positive reply each cell rotates
//! the qubit by +α; the claimed middle must read 'a' and contributes no
//! rotation; the remaining cells rotate by −α. On the right end-marker the
//! qubit is measured: |q1⟩ rejects, |q0⟩ enters the acceptance gadget. For
//! members with an honest prover the rotations cancel exactly, so rejection
//! never occurs; a false middle claim leaves a net rotation whose |q1⟩ mass
//! is at least 1/(2n²+1). Reaching the right end-marker without a claim
//! rejects.

use super::constants::{m_01, u_alpha, u_minus_alpha};
use super::gadgets::{acceptance_gadget, INPUTS_AB, LEFT, RIGHT, SYM_A, SYM_B};
use crate::linalg::{CMat, CVec};
use crate::machine::{SpecBuilder, StateKind, VerifierSpec};

pub fn build_with_k(k: u32) -> VerifierSpec {
    let dim = 2;
    let mut b = SpecBuilder::new("middle", &['a', 'b'], dim);
    b.comm_alphabet(&["mid?", "middle", "not-middle"]);

    let s0 = b.state("s0", StateKind::Reading);
    let scan = b.state("scan", StateKind::Reading);
    let ask = b.state("ask", StateKind::Communication);
    let rot = b.state("rot", StateKind::Reading);
    let chk = b.state("chk", StateKind::Reading);
    let down = b.state("down", StateKind::Reading);
    let meas = b.state("meas", StateKind::Reading);
    let acc = b.state("acc", StateKind::Accept);
    let rej = b.state("rej", StateKind::Reject);

    let gadget = acceptance_gadget(&mut b, dim, k, s0, acc);

    let id = CMat::identity(dim);
    b.unitary(s0, &[LEFT], id.clone(), scan, 1);
    b.unitary(scan, &INPUTS_AB, id.clone(), ask, 0);
    b.unitary(scan, &[RIGHT], id.clone(), rej, 0);
    b.comm(ask, "mid?", &[("middle", chk), ("not-middle", rot)], rej);
    b.unitary(rot, &INPUTS_AB, u_alpha(), scan, 1);
    b.unitary(chk, &[SYM_A], id.clone(), down, 1);
    b.unitary(chk, &[SYM_B], id.clone(), rej, 0);
    b.unitary(down, &INPUTS_AB, u_minus_alpha(), down, 1);
    b.unitary(down, &[RIGHT], id, meas, 0);
    b.measure(meas, &[RIGHT], m_01(), vec![(gadget, -1), (rej, 0)]);

    b.finish(s0, CVec::basis(dim, 0), rej)
}

/// The acceptance gadget alone, entered directly after a deterministic scan
/// to the right end-marker: accepts with probability 1/(2^k (n+1)²) on an
/// input of length n, restarts otherwise. Used to pin the gadget law across
/// (n, k) without the protocol phases around it.
pub fn build_gadget_only(k: u32) -> VerifierSpec {
    let dim = 2;
    let mut b = SpecBuilder::new("middle-gadget", &['a', 'b'], dim);
    b.comm_alphabet(&["mid?", "middle", "not-middle"]);

    let s0 = b.state("s0", StateKind::Reading);
    let run = b.state("run", StateKind::Reading);
    let acc = b.state("acc", StateKind::Accept);
    let rej = b.state("rej", StateKind::Reject);
    let gadget = acceptance_gadget(&mut b, dim, k, s0, acc);

    let id = CMat::identity(dim);
    b.unitary(s0, &[LEFT], id.clone(), run, 1);
    b.unitary(run, &INPUTS_AB, id.clone(), run, 1);
    b.unitary(run, &[RIGHT], id, gadget, -1);
    b.finish(s0, CVec::basis(dim, 0), rej)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_spec;

    #[test]
    fn machine_validates() {
        for k in [1, 3, 5] {
            let spec = build_with_k(k);
            let report = validate_spec(&spec);
            assert!(report.is_empty(), "k={k}: {report:?}");
            assert!(validate_spec(&build_gadget_only(k)).is_empty());
        }
    }
}
