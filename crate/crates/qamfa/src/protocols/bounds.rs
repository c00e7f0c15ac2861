//! Closed-form bound evaluators for every quantitative claim the protocols
//! make, plus the brute-force two-sided rotation gap.

use std::f64::consts::{PI, SQRT_2};

use super::constants::{u_a, u_b};
use crate::error::{Error, Result};
use crate::linalg::{mat_apply, CVec};

/// Symbols of the rotation-gap brute force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ab {
    A,
    B,
}

/// A named scalar bound with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    /// Acceptance probability of the two-ruin-walk + k-flip gadget:
    /// 1/(2^k (n+1)²).
    GadgetAccept { n: u64, k: u32 },
    /// Per-iteration rejection lower bound for false middle claims:
    /// 1/(2n²+1).
    MiddleRejectLb { n: u64 },
    /// sin²(√2·j·π); stays above 1/(2j²+1) for every nonzero integer j.
    Sin2Gap { j: u64 },
    /// Per-iteration rejection lower bound for mismatched halves: 5^(1−n).
    MpalRejectLb { n: u64 },
    /// Residual mass outside the first amplitude after scanning X forward
    /// and Y backward.
    XyGap { x: Vec<Ab>, y: Vec<Ab> },
    /// Acceptance probability of the flag loop: 2^(−kn).
    FlagAccept { n: u64, k: u32 },
    /// Final-measurement rejection lower bound for wrong subsets: 1/2.
    KnapsackRejectLb,
    /// Lower bound on reaching the final measurement in one iteration:
    /// (1/6)^n.
    KnapsackReachLb { n: u64 },
}

/// Evaluate a bound exactly per its formula.
pub fn evaluate_bound(bound: &Bound) -> Result<f64> {
    match bound {
        Bound::GadgetAccept { n, k } => {
            let np1 = (*n + 1) as f64;
            Ok(1.0 / (2f64.powi(*k as i32) * np1 * np1))
        }
        Bound::MiddleRejectLb { n } => {
            require_positive(*n)?;
            Ok(1.0 / (2.0 * (*n as f64) * (*n as f64) + 1.0))
        }
        Bound::Sin2Gap { j } => {
            if *j == 0 {
                return Err(Error::InvalidArgument("sin2_gap needs j != 0".into()));
            }
            Ok(sin2_gap(*j))
        }
        Bound::MpalRejectLb { n } => {
            require_positive(*n)?;
            Ok(5f64.powi(1 - *n as i32))
        }
        Bound::XyGap { x, y } => Ok(xy_gap(x, y)),
        Bound::FlagAccept { n, k } => Ok(2f64.powi(-((*k as i32) * (*n as i32)))),
        Bound::KnapsackRejectLb => Ok(0.5),
        Bound::KnapsackReachLb { n } => {
            require_positive(*n)?;
            Ok((1.0f64 / 6.0).powi(*n as i32))
        }
    }
}

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("bound needs n >= 1".into()))
    } else {
        Ok(())
    }
}

/// sin²(√2·j·π), computed against the nearest integer to √2·j so the sine
/// argument stays small.
pub fn sin2_gap(j: u64) -> f64 {
    let m = SQRT_2 * j as f64;
    let d = m - m.round();
    (PI * d).sin().powi(2)
}

/// The claimed lower bound for [`sin2_gap`]: 1/(2j²+1).
pub fn sin2_lower_bound(j: u64) -> f64 {
    let jf = j as f64;
    1.0 / (2.0 * jf * jf + 1.0)
}

/// u[2]² + u[3]² for u = Y_1⁻¹…Y_l⁻¹ X_m…X_1 (1,0,0)ᵀ, by matrix brute
/// force. Zero exactly when m = l and X = Y; otherwise above 5^(−(m+l)).
pub fn xy_gap(x: &[Ab], y: &[Ab]) -> f64 {
    let a = u_a();
    let b = u_b();
    let mut v = CVec::basis(3, 0);
    for sym in x {
        let m = match sym {
            Ab::A => &a,
            Ab::B => &b,
        };
        v = mat_apply(m, &v).expect("dimensions fixed");
    }
    let a_inv = a.dagger();
    let b_inv = b.dagger();
    for sym in y.iter().rev() {
        let m = match sym {
            Ab::A => &a_inv,
            Ab::B => &b_inv,
        };
        v = mat_apply(m, &v).expect("dimensions fixed");
    }
    v.amp(1).norm_sqr() + v.amp(2).norm_sqr()
}

/// The conditioned register state after encoding a bit string: amplitudes
/// (1, v(bits), 0, …)/√(1+v(bits)²) on the 8-dimensional register.
pub fn encode_state(bits: &str) -> Result<CVec> {
    if bits.is_empty() || !bits.starts_with('1') || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::InvalidArgument(format!(
            "encode_state needs a bit string in 1{{0,1}}*, got {bits:?}"
        )));
    }
    let v = u64::from_str_radix(bits, 2)
        .map_err(|e| Error::InvalidArgument(format!("bit string too long: {e}")))? as f64;
    let norm = (1.0 + v * v).sqrt();
    let mut amps = vec![0.0; 8];
    amps[0] = 1.0 / norm;
    amps[1] = v / norm;
    Ok(CVec::from_real(&amps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_accept_instances() {
        let v = evaluate_bound(&Bound::GadgetAccept { n: 3, k: 2 }).unwrap();
        assert_eq!(v, 1.0 / 64.0);
        let v = evaluate_bound(&Bound::GadgetAccept { n: 3, k: 3 }).unwrap();
        assert_eq!(v, 1.0 / 128.0);
    }

    #[test]
    fn sin2_gap_at_one() {
        // Independently computed with 40-digit arithmetic.
        let v = sin2_gap(1);
        assert!((v - 0.929_108_092_834_408_8).abs() < 1e-14);
        assert!(v > 1.0 / 3.0);
        assert!(evaluate_bound(&Bound::Sin2Gap { j: 0 }).is_err());
    }

    #[test]
    fn xy_gap_single_mismatch() {
        // One forward 'a' against one backward 'b': 369/625.
        let v = xy_gap(&[Ab::A], &[Ab::B]);
        assert!((v - 369.0 / 625.0).abs() < 1e-15);
        assert!(v > 1.0 / 25.0);

        assert!(xy_gap(&[Ab::A], &[Ab::A]) < 1e-30);
        assert!(xy_gap(&[], &[]) == 0.0);
    }

    #[test]
    fn encode_state_values() {
        let v = encode_state("101").unwrap();
        let norm = 26.0f64.sqrt();
        assert!((v.amp(0).re - 1.0 / norm).abs() < 1e-15);
        assert!((v.amp(1).re - 5.0 / norm).abs() < 1e-15);
        assert!(encode_state("01").is_err());
        assert!(encode_state("").is_err());
    }

    #[test]
    fn domain_checks() {
        assert!(evaluate_bound(&Bound::MiddleRejectLb { n: 0 }).is_err());
        assert!(evaluate_bound(&Bound::MpalRejectLb { n: 0 }).is_err());
        assert_eq!(
            evaluate_bound(&Bound::MpalRejectLb { n: 3 }).unwrap(),
            1.0 / 25.0
        );
        assert_eq!(evaluate_bound(&Bound::KnapsackRejectLb).unwrap(), 0.5);
        assert_eq!(
            evaluate_bound(&Bound::FlagAccept { n: 2, k: 3 }).unwrap(),
            1.0 / 64.0
        );
    }
}
