//! Verifier for marked palindromes xax^R over {a,b}.
//!
//! The qutrit register starts in |q0⟩. Before the claimed middle every
//! symbol σ applies U_σ; the middle must read 'a' and applies nothing; after
//! it every symbol applies U_σ†. On the right end-marker a measurement
//! separates |q0⟩ from span{q1,q2}: any mass outside |q0⟩ rejects, and for
//! mismatched halves that mass exceeds 5^(1−n). Members then run the flag
//! loop: k passes over the input, one coin flip per cell, accepting only if
//! every flip of every pass came up heads (probability 2^(−kn)); otherwise
//! the machine rewinds and restarts.

use super::constants::{coin_rotation, coin_swap, m_coin, m_pal, u_a, u_b};
use super::gadgets::{rewind, INPUTS_AB, LEFT, RIGHT, SYM_A, SYM_B};
use crate::linalg::{CMat, CVec};
use crate::machine::{Move, SpecBuilder, StateId, StateKind, VerifierSpec};

pub fn build_with_k(k: u32) -> VerifierSpec {
    let dim = 3;
    let mut b = SpecBuilder::new("mpal", &['a', 'b'], dim);
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

    let rew = rewind(&mut b, "rew", dim, s0);
    let loop_entry = flag_loop(&mut b, dim, k, s0, acc, rew);

    let id = CMat::identity(dim);
    b.unitary(s0, &[LEFT], id.clone(), scan, 1);
    b.unitary(scan, &INPUTS_AB, id.clone(), ask, 0);
    b.unitary(scan, &[RIGHT], id.clone(), rej, 0);
    b.comm(ask, "mid?", &[("middle", chk), ("not-middle", rot)], rej);
    b.unitary(rot, &[SYM_A], u_a(), scan, 1);
    b.unitary(rot, &[SYM_B], u_b(), scan, 1);
    b.unitary(chk, &[SYM_A], id.clone(), down, 1);
    b.unitary(chk, &[SYM_B], id.clone(), rej, 0);
    b.unitary(down, &[SYM_A], u_a().dagger(), down, 1);
    b.unitary(down, &[SYM_B], u_b().dagger(), down, 1);
    b.unitary(down, &[RIGHT], id, meas, 0);
    b.measure(meas, &[RIGHT], m_pal(), vec![(loop_entry, -1), (rej, 0)]);

    b.finish(s0, CVec::basis(dim, 0), rej)
}

/// The flag loop: k passes across the n input cells in alternating
/// directions, flipping one coin per cell and latching a flag on any tails.
/// After the last pass a clear flag accepts, a set flag restarts. Entered
/// moving left off the right end-marker. Accepts with probability 2^(−kn).
fn flag_loop(
    b: &mut SpecBuilder,
    dim: usize,
    k: u32,
    restart: StateId,
    accept: StateId,
    rew: StateId,
) -> StateId {
    // Catch-all outcome for mass outside span{q0, q1}: map q2 back to q0
    // and restart. Unreachable on the flag loop's |q0⟩/|q1⟩ orbit.
    let q2fix = b.state("flag.q2fix", StateKind::Reading);
    b.unitary(
        q2fix,
        &INPUTS_AB,
        CMat::basis_swap(dim, 0, 2),
        rew,
        0,
    );

    // pass[j][flag] scans the tape in direction d_j = (−1)^(j+1).
    let mut pass = Vec::new();
    for j in 1..=k {
        let p0 = b.state(&format!("flag.p{j}"), StateKind::Reading);
        let p1 = b.state(&format!("flag.p{j}.set"), StateKind::Reading);
        pass.push([p0, p1]);
    }
    for j in 1..=k as usize {
        let dir: Move = if j % 2 == 1 { -1 } else { 1 };
        let end_marker = if j % 2 == 1 { LEFT } else { RIGHT };
        for flag in 0..2usize {
            let here = pass[j - 1][flag];
            let m = b.state(&format!("flag.p{j}.f{flag}.m"), StateKind::Reading);
            let x = b.state(&format!("flag.p{j}.f{flag}.x"), StateKind::Reading);
            b.unitary(here, &INPUTS_AB, coin_rotation(dim), m, 0);
            b.measure(
                m,
                &INPUTS_AB,
                m_coin(dim),
                vec![(here, dir), (x, 0), (q2fix, 0)],
            );
            // Tails: restore the register and continue with the flag set.
            b.unitary(x, &INPUTS_AB, coin_swap(dim), pass[j - 1][1], dir);

            // End of this pass.
            let done: (StateId, Move) = if j < k as usize {
                (pass[j][flag], -dir)
            } else if flag == 0 {
                (accept, 0)
            } else if end_marker == LEFT {
                (restart, 0)
            } else {
                (rew, -1)
            };
            b.unitary(here, &[end_marker], CMat::identity(dim), done.0, done.1);
        }
    }
    pass[0][0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::validate_spec;

    #[test]
    fn machine_validates() {
        for k in [1, 3, 4] {
            let spec = build_with_k(k);
            let report = validate_spec(&spec);
            assert!(report.is_empty(), "k={k}: {report:?}");
        }
    }
}
