//! Fixed unitaries and projective measurements shared by the protocols.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use crate::linalg::{CMat, ProjectiveMeasurement};

/// Rotation angle applied once per scanned symbol: √2·π radians. Irrational
/// multiples of π never realign for a nonzero net symbol count, which is
/// what the soundness bounds quantify.
pub fn alpha() -> f64 {
    SQRT_2 * PI
}

/// 2×2 rotation by +α.
pub fn u_alpha() -> CMat {
    CMat::plane_rotation(2, 0, 1, alpha())
}

/// 2×2 rotation by −α.
pub fn u_minus_alpha() -> CMat {
    CMat::plane_rotation(2, 0, 1, -alpha())
}

/// 3×3 operator applied on symbol 'a' in the palindrome protocol.
pub fn u_a() -> CMat {
    CMat::from_real_scaled(
        3,
        0.2,
        &[4.0, 3.0, 0.0, -3.0, 4.0, 0.0, 0.0, 0.0, 5.0],
    )
}

/// 3×3 operator applied on symbol 'b' in the palindrome protocol.
pub fn u_b() -> CMat {
    CMat::from_real_scaled(
        3,
        0.2,
        &[4.0, 0.0, 3.0, 0.0, 5.0, 0.0, -3.0, 0.0, 4.0],
    )
}

const S6H: f64 = 1.224744871391589; // √6 / 2

/// 8×8 operator encoding a '0' of the target block: doubles the encoded value.
pub fn u_0() -> CMat {
    CMat::from_real_scaled(
        8,
        0.5,
        &[
            1.0, 0.0, 0.0, -S6H, S6H, 0.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, S6H, S6H, 0.0, 0.0, 0.0, //
            -S6H, 0.0, S6H, -1.0, 0.0, 0.0, 0.0, 0.0, //
            S6H, 0.0, S6H, 0.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0,
        ],
    )
}

/// 8×8 operator encoding a '1' of the target block: doubles and adds one.
pub fn u_1() -> CMat {
    CMat::from_real_scaled(
        8,
        1.0 / 6.0f64.sqrt(),
        &[
            1.0, 0.0, 0.0, -1.0, 2.0, 0.0, 0.0, 0.0, //
            1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 2.0, 0.0, //
            2.0, -1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, -2.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0, 1.0, //
            0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 2.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0, 1.0,
        ],
    )
}

/// 8×8 operator encoding a '0' of a selected block (third amplitude).
pub fn u_0_prime() -> CMat {
    CMat::from_real_scaled(
        8,
        0.5,
        &[
            1.0, 0.0, 0.0, -S6H, S6H, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, S6H, S6H, 0.0, 0.0, 0.0, //
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            -S6H, S6H, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, //
            S6H, S6H, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0,
        ],
    )
}

/// 8×8 operator encoding a '1' of a selected block.
pub fn u_1_prime() -> CMat {
    CMat::from_real_scaled(
        8,
        1.0 / 6.0f64.sqrt(),
        &[
            1.0, 0.0, 0.0, -1.0, 2.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, //
            1.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
            2.0, 0.0, -1.0, 0.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, -2.0, -1.0, 0.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, 0.0, 0.0, 0.0, -1.0, 1.0, //
            0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0, 1.0,
        ],
    )
}

fn u_hash_rows() -> [f64; 64] {
    [
        1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, SQRT_2, 0.0, //
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, SQRT_2,
    ]
}

/// 8×8 subtraction operator used at a block boundary, with the 1/√2
/// normalization its row norms require. See [`u_hash_unnormalized`].
pub fn u_hash() -> CMat {
    CMat::from_real_scaled(8, 1.0 / SQRT_2, &u_hash_rows())
}

/// The subtraction operator without the 1/√2 prefactor. Its rows have norm
/// √2, so it is not unitary; the normalized form reproduces the intended
/// boundary state exactly and is the one the machines apply.
pub fn u_hash_unnormalized() -> CMat {
    CMat::from_real_scaled(8, 1.0, &u_hash_rows())
}

/// Two-outcome measurement keeping the register in span{q0, q1, q2} on
/// outcome `f`; outcome `r` triggers the reset procedure.
pub fn m_for() -> ProjectiveMeasurement {
    ProjectiveMeasurement::new(vec![
        (
            "f".to_string(),
            ProjectiveMeasurement::basis_projector(8, &[0, 1, 2]),
        ),
        (
            "r".to_string(),
            ProjectiveMeasurement::basis_projector(8, &[3, 4, 5, 6, 7]),
        ),
    ])
}

/// Full computational-basis measurement on the 8-dimensional register.
pub fn m_fin() -> ProjectiveMeasurement {
    ProjectiveMeasurement::computational(8, "q")
}

/// Two-outcome computational measurement on the 2-dimensional register.
pub fn m_01() -> ProjectiveMeasurement {
    ProjectiveMeasurement::computational(2, "q")
}

/// Measurement separating |q0⟩ from span{q1, q2} for the palindrome check.
pub fn m_pal() -> ProjectiveMeasurement {
    ProjectiveMeasurement::new(vec![
        (
            "q0".to_string(),
            ProjectiveMeasurement::basis_projector(3, &[0]),
        ),
        (
            "q12".to_string(),
            ProjectiveMeasurement::basis_projector(3, &[1, 2]),
        ),
    ])
}

/// π/4 rotation in the (q0, q1) plane: sends |q0⟩ to (|q0⟩+|q1⟩)/√2. One
/// such rotation, a computational measurement and an outcome-indexed swap
/// realize a fair coin flip on the quantum register.
pub fn coin_rotation(dim: usize) -> CMat {
    CMat::plane_rotation(dim, 0, 1, FRAC_PI_4)
}

/// Swap of q0 and q1, restoring |q0⟩ after a tails outcome.
pub fn coin_swap(dim: usize) -> CMat {
    CMat::basis_swap(dim, 0, 1)
}

/// Coin measurement: heads |q0⟩, tails |q1⟩, plus a catch-all outcome for
/// registers of dimension above two.
pub fn m_coin(dim: usize) -> ProjectiveMeasurement {
    let mut outcomes = vec![
        (
            "h".to_string(),
            ProjectiveMeasurement::basis_projector(dim, &[0]),
        ),
        (
            "t".to_string(),
            ProjectiveMeasurement::basis_projector(dim, &[1]),
        ),
    ];
    if dim > 2 {
        let rest: Vec<usize> = (2..dim).collect();
        outcomes.push((
            "rest".to_string(),
            ProjectiveMeasurement::basis_projector(dim, &rest),
        ));
    }
    ProjectiveMeasurement::new(outcomes)
}

/// Every named protocol unitary, for the validation suite.
pub fn protocol_unitaries() -> Vec<(&'static str, CMat)> {
    vec![
        ("U_alpha", u_alpha()),
        ("U_minus_alpha", u_minus_alpha()),
        ("U_a", u_a()),
        ("U_b", u_b()),
        ("U_0", u_0()),
        ("U_1", u_1()),
        ("U_0'", u_0_prime()),
        ("U_1'", u_1_prime()),
        ("U_#", u_hash()),
    ]
}

/// Every named protocol measurement, for the validation suite.
pub fn protocol_measurements() -> Vec<(&'static str, ProjectiveMeasurement)> {
    vec![
        ("M_for", m_for()),
        ("M_fin", m_fin()),
        ("M_01", m_01()),
        ("M_pal", m_pal()),
        ("M_coin2", m_coin(2)),
        ("M_coin3", m_coin(3)),
        ("M_coin8", m_coin(8)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, mat_apply, CVec, VALIDATION_TOL};

    #[test]
    fn all_protocol_unitaries_are_unitary() {
        for (name, u) in protocol_unitaries() {
            assert!(is_unitary(&u, VALIDATION_TOL), "{name} failed unitarity");
        }
    }

    #[test]
    fn unnormalized_subtraction_operator_is_not_unitary() {
        assert!(!is_unitary(&u_hash_unnormalized(), VALIDATION_TOL));
        assert!(is_unitary(&u_hash(), VALIDATION_TOL));
    }

    #[test]
    fn all_measurements_validate() {
        for (name, m) in protocol_measurements() {
            let violations = m.validate(VALIDATION_TOL);
            assert!(violations.is_empty(), "{name}: {violations:?}");
        }
    }

    #[test]
    fn u1_encodes_value_one() {
        let v = mat_apply(&u_1(), &CVec::basis(8, 0)).unwrap();
        let s6 = 6.0f64.sqrt();
        let expected =
            CVec::from_real(&[1.0 / s6, 1.0 / s6, 0.0, 2.0 / s6, 0.0, 0.0, 0.0, 0.0]);
        assert!(v.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn scan_rotations_cancel_exactly_in_pairs() {
        let fwd = u_alpha();
        let back = u_minus_alpha();
        let id = back.mul(&fwd);
        assert!(id.max_abs_diff(&CMat::identity(2)) < 1e-15);
    }
}
