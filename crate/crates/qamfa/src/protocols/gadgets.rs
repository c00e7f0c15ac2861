//! Shared machine fragments: quantum coin flips, random walks on the tape,
//! head rewinds and the acceptance gadget.
//!
//! A coin flip costs two or three machine steps: rotate |q0⟩ into
//! (|q0⟩+|q1⟩)/√2, measure in the computational basis, and on tails swap the
//! register back to |q0⟩. By the Born rule both outcomes have probability
//! exactly 1/2 and the register always leaves the flip in |q0⟩.

use super::constants::{coin_rotation, coin_swap, m_coin};
use crate::linalg::CMat;
use crate::machine::{Move, SpecBuilder, StateId, StateKind, TapeSymbol};

pub const SYM_A: TapeSymbol = TapeSymbol::Input('a');
pub const SYM_B: TapeSymbol = TapeSymbol::Input('b');
pub const INPUTS_AB: [TapeSymbol; 2] = [SYM_A, SYM_B];
pub const LEFT: TapeSymbol = TapeSymbol::LeftMarker;
pub const RIGHT: TapeSymbol = TapeSymbol::RightMarker;

/// Chain of `k` coin flips performed in place on the cells in `at`;
/// all heads reach `success`, the first tails (after restoring the register)
/// goes to `fail`. `rest` handles the unreachable catch-all outcome of
/// registers wider than two.
#[allow(clippy::too_many_arguments)]
pub fn flip_chain(
    b: &mut SpecBuilder,
    prefix: &str,
    dim: usize,
    k: u32,
    at: &[TapeSymbol],
    success: (StateId, Move),
    fail: (StateId, Move),
    rest: Option<(StateId, Move)>,
) -> StateId {
    let flips: Vec<StateId> = (1..=k)
        .map(|j| b.state(&format!("{prefix}{j}"), StateKind::Reading))
        .collect();
    let meas: Vec<StateId> = (1..=k)
        .map(|j| b.state(&format!("{prefix}{j}.m"), StateKind::Reading))
        .collect();
    let restore = b.state(&format!("{prefix}.x"), StateKind::Reading);

    for j in 0..k as usize {
        b.unitary(flips[j], at, coin_rotation(dim), meas[j], 0);
        let heads = if j + 1 < k as usize {
            (flips[j + 1], 0)
        } else {
            success
        };
        let mut arms = vec![heads, (restore, 0)];
        if dim > 2 {
            arms.push(rest.expect("wide registers need a catch-all target"));
        }
        b.measure(meas[j], at, m_coin(dim), arms);
    }
    b.unitary(restore, at, coin_swap(dim), fail.0, fail.1);
    flips[0]
}

/// Fair random walk over the input cells: one coin flip per step, heads
/// moves the head right and tails left. Arrival at an end-marker hands
/// control to `at_left` / `at_right`.
pub fn walk(
    b: &mut SpecBuilder,
    prefix: &str,
    dim: usize,
    at_left: (StateId, Move),
    at_right: (StateId, Move),
) -> StateId {
    let inputs = b.input_symbols();
    let w = b.state(prefix, StateKind::Reading);
    let wm = b.state(&format!("{prefix}.m"), StateKind::Reading);
    let wx = b.state(&format!("{prefix}.x"), StateKind::Reading);
    b.unitary(w, &inputs, coin_rotation(dim), wm, 0);
    b.measure(wm, &inputs, m_coin(dim), vec![(w, 1), (wx, 0)]);
    b.unitary(wx, &inputs, coin_swap(dim), w, -1);
    b.unitary(w, &[LEFT], CMat::identity(dim), at_left.0, at_left.1);
    b.unitary(w, &[RIGHT], CMat::identity(dim), at_right.0, at_right.1);
    w
}

/// Walk the head left to the left end-marker, then hand control to `to`.
pub fn rewind(b: &mut SpecBuilder, name: &str, dim: usize, to: StateId) -> StateId {
    let inputs = b.input_symbols();
    let rew = b.state(name, StateKind::Reading);
    let id = CMat::identity(dim);
    b.unitary(rew, &inputs, id.clone(), rew, -1);
    b.unitary(rew, &[RIGHT], id.clone(), rew, -1);
    b.unitary(rew, &[LEFT], id, to, 0);
    rew
}

/// The acceptance gadget of the polynomial-time protocols, entered moving
/// left off the right end-marker with the register in |q0⟩. It accepts with
/// probability exactly 1/(2^k (n+1)²) and otherwise returns the machine to
/// its initial configuration:
///
/// 1. a timing walk (reflected at the right end-marker, absorbed at the
///    left) that always completes, in (n)(n+2) expected flips;
/// 2. a ruin walk from the cell right of the left end-marker, succeeding at
///    the right end-marker with probability 1/(n+1);
/// 3. a ruin walk from the cell left of the right end-marker, succeeding at
///    the left end-marker with probability 1/(n+1);
/// 4. k coin flips at the left end-marker, accepting on all heads.
///
/// Failures of 2 and 4 happen with the head already on the left end-marker
/// and restart directly; a failure of 3 rewinds first.
pub fn acceptance_gadget(
    b: &mut SpecBuilder,
    dim: usize,
    k: u32,
    restart: StateId,
    accept: StateId,
) -> StateId {
    let rew = rewind(b, "g.rew", dim, restart);
    let flips = flip_chain(
        b,
        "g.flip",
        dim,
        k,
        &[LEFT],
        (accept, 0),
        (restart, 0),
        None,
    );
    let ruin_back = walk(b, "g.ruin2", dim, (flips, 0), (rew, -1));
    let ruin_fwd = walk(b, "g.ruin1", dim, (restart, 0), (ruin_back, -1));

    // Timing walk: reflect on the right marker, absorb on the left.
    let inputs = b.input_symbols();
    let t = b.state("g.time", StateKind::Reading);
    let tm = b.state("g.time.m", StateKind::Reading);
    let tx = b.state("g.time.x", StateKind::Reading);
    b.unitary(t, &inputs, coin_rotation(dim), tm, 0);
    b.measure(tm, &inputs, m_coin(dim), vec![(t, 1), (tx, 0)]);
    b.unitary(tx, &inputs, coin_swap(dim), t, -1);
    b.unitary(t, &[RIGHT], CMat::identity(dim), t, -1);
    b.unitary(t, &[LEFT], CMat::identity(dim), ruin_fwd, 1);
    t
}
