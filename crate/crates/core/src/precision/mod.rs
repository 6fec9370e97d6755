//! Precision levels, emulated rounding of matrices, reduced-precision QR and
//! the single-precision condition estimate that drives automatic selection.

mod estimate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Binary16, Binary32, Binary64};
use crate::dense::qr::{qr_with, r_with};
use crate::dense::{Matrix, QrFactors, StoragePrecision};
use crate::error::{Error, Result};
use crate::sketch::SketchOperator;

pub use estimate::{estimate_log10_condition, ConditionEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionLevel {
    Half,
    Single,
    Double,
}

impl PrecisionLevel {
    pub const ALL: [PrecisionLevel; 3] = [
        PrecisionLevel::Half,
        PrecisionLevel::Single,
        PrecisionLevel::Double,
    ];

    /// IEEE unit roundoff for round-to-nearest.
    pub fn unit_roundoff(self) -> f64 {
        match self {
            PrecisionLevel::Half => 2f64.powi(-11),
            PrecisionLevel::Single => 2f64.powi(-24),
            PrecisionLevel::Double => 2f64.powi(-53),
        }
    }

    /// Constant plugged in as `u₁` when evaluating the error bounds
    /// (machine epsilon for single and double, unit roundoff for half).
    pub fn bound_u1(self) -> f64 {
        match self {
            PrecisionLevel::Half => 2f64.powi(-11),
            PrecisionLevel::Single => 2f64.powi(-23),
            PrecisionLevel::Double => 2f64.powi(-52),
        }
    }

    pub fn max_finite(self) -> f64 {
        match self {
            PrecisionLevel::Half => Binary16::MAX,
            PrecisionLevel::Single => Binary32::MAX,
            PrecisionLevel::Double => Binary64::MAX,
        }
    }

    pub fn storage(self) -> StoragePrecision {
        match self {
            PrecisionLevel::Half => StoragePrecision::Binary16,
            PrecisionLevel::Single => StoragePrecision::Binary32,
            PrecisionLevel::Double => StoragePrecision::Binary64,
        }
    }

    pub fn next_higher(self) -> Option<PrecisionLevel> {
        match self {
            PrecisionLevel::Half => Some(PrecisionLevel::Single),
            PrecisionLevel::Single => Some(PrecisionLevel::Double),
            PrecisionLevel::Double => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PrecisionLevel::Half => "half",
            PrecisionLevel::Single => "single",
            PrecisionLevel::Double => "double",
        }
    }
}

impl fmt::Display for PrecisionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecisionLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "half" | "binary16" | "fp16" => Ok(PrecisionLevel::Half),
            "single" | "binary32" | "fp32" => Ok(PrecisionLevel::Single),
            "double" | "binary64" | "fp64" => Ok(PrecisionLevel::Double),
            other => Err(Error::InvalidInput(format!("unknown precision `{other}`"))),
        }
    }
}

/// A fixed precision or automatic selection from the condition estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionChoice {
    #[default]
    Auto,
    Half,
    Single,
    Double,
}

impl PrecisionChoice {
    pub fn fixed(self) -> Option<PrecisionLevel> {
        match self {
            PrecisionChoice::Auto => None,
            PrecisionChoice::Half => Some(PrecisionLevel::Half),
            PrecisionChoice::Single => Some(PrecisionLevel::Single),
            PrecisionChoice::Double => Some(PrecisionLevel::Double),
        }
    }
}

impl From<PrecisionLevel> for PrecisionChoice {
    fn from(p: PrecisionLevel) -> Self {
        match p {
            PrecisionLevel::Half => PrecisionChoice::Half,
            PrecisionLevel::Single => PrecisionChoice::Single,
            PrecisionLevel::Double => PrecisionChoice::Double,
        }
    }
}

impl fmt::Display for PrecisionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fixed() {
            Some(p) => p.fmt(f),
            None => f.write_str("auto"),
        }
    }
}

impl FromStr for PrecisionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(PrecisionChoice::Auto)
        } else {
            s.parse::<PrecisionLevel>().map(Into::into)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionDecision {
    /// Estimated `log10 κ(A)`; infinite when the estimate overflowed.
    pub kappa0: f64,
    pub selected: PrecisionLevel,
    pub overflowed: bool,
}

/// Half below 4, single up to and including 8, double above 8 or when the
/// estimate overflowed.
pub fn select_precision(kappa0: f64, overflowed: bool) -> PrecisionLevel {
    if overflowed || kappa0.is_nan() || kappa0 > 8.0 {
        PrecisionLevel::Double
    } else if kappa0 < 4.0 {
        PrecisionLevel::Half
    } else {
        PrecisionLevel::Single
    }
}

/// Estimate the condition of `a` in binary32 and pick a precision.
pub fn decide_precision(a: &Matrix) -> Result<PrecisionDecision> {
    let est = estimate_log10_condition(a)?;
    Ok(PrecisionDecision {
        kappa0: est.kappa0,
        selected: select_precision(est.kappa0, est.overflowed),
        overflowed: est.overflowed,
    })
}

#[derive(Debug, Clone)]
pub struct RoundedMatrix {
    pub matrix: Matrix,
    /// Some finite entry rounded to infinity.
    pub overflowed: bool,
}

pub fn round_slice(x: &mut [f64], p: PrecisionLevel) -> bool {
    fn go<A: Arith>(x: &mut [f64]) -> bool {
        let mut over = false;
        for v in x {
            let r = A::round(*v);
            over |= r.is_infinite() && v.is_finite();
            *v = r;
        }
        over
    }
    match p {
        PrecisionLevel::Half => go::<Binary16>(x),
        PrecisionLevel::Single => go::<Binary32>(x),
        PrecisionLevel::Double => false,
    }
}

/// Entrywise round-to-nearest-even into `p`.
pub fn round_to_precision(a: &Matrix, p: PrecisionLevel) -> RoundedMatrix {
    let mut m = a.clone();
    let overflowed = round_slice(m.as_mut_slice(), p);
    RoundedMatrix {
        matrix: m.with_storage(p.storage()),
        overflowed,
    }
}

/// Power of two `s` with `max · s` in `(1/2, 1]`; 1 for zero or non-finite
/// `max`.
pub fn power_of_two_scale(max: f64) -> f64 {
    if max == 0.0 || !max.is_finite() {
        return 1.0;
    }
    let e = max.log2().ceil() as i32;
    let mut s = 2f64.powi(-e);
    // log2 can be off by an ulp near exact powers of two.
    if max * s > 1.0 {
        s *= 0.5;
    } else if max * s * 2.0 <= 1.0 {
        s *= 2.0;
    }
    s
}

fn prescale_for(a: &Matrix, p: PrecisionLevel) -> f64 {
    match p {
        PrecisionLevel::Half => power_of_two_scale(a.max_abs()),
        _ => 1.0,
    }
}

/// Householder QR with every flop rounded to `p`. The input is rounded to
/// `p` first; for half precision it is also scaled by a power of two so its
/// largest entry is at most one, and `R` is scaled back afterwards.
pub fn qr_in_precision(a: &Matrix, p: PrecisionLevel) -> Result<QrFactors> {
    let s = prescale_for(a, p);
    let scaled = if s == 1.0 { a.clone() } else { a.scale(s) };
    let rounded = round_to_precision(&scaled, p);
    if rounded.overflowed {
        return Err(Error::Overflow(p.name()));
    }
    let mut f = match p {
        PrecisionLevel::Half => qr_with::<Binary16>(&rounded.matrix)?,
        PrecisionLevel::Single => qr_with::<Binary32>(&rounded.matrix)?,
        PrecisionLevel::Double => qr_with::<Binary64>(&rounded.matrix)?,
    };
    if s != 1.0 {
        f.r = f.r.scale(1.0 / s);
    }
    f.q = f.q.with_storage(p.storage());
    Ok(f)
}

/// Triangular factor only, in precision `p` (same scaling as
/// [`qr_in_precision`]), returned promoted to binary64.
pub fn r_in_precision(a: &Matrix, p: PrecisionLevel) -> Result<Matrix> {
    let s = prescale_for(a, p);
    let scaled = if s == 1.0 { a.clone() } else { a.scale(s) };
    let rounded = round_to_precision(&scaled, p);
    if rounded.overflowed {
        return Err(Error::Overflow(p.name()));
    }
    let r = match p {
        PrecisionLevel::Half => r_with::<Binary16>(&rounded.matrix)?,
        PrecisionLevel::Single => r_with::<Binary32>(&rounded.matrix)?,
        PrecisionLevel::Double => r_with::<Binary64>(&rounded.matrix)?,
    };
    Ok(if s != 1.0 { r.scale(1.0 / s) } else { r })
}

/// `ΩA` with the sketch arithmetic rounded to `p`.
pub fn sketch_in_precision(op: &SketchOperator, a: &Matrix, p: PrecisionLevel) -> Result<Matrix> {
    let out = match p {
        PrecisionLevel::Half => op.apply_with::<Binary16>(a)?,
        PrecisionLevel::Single => op.apply_with::<Binary32>(a)?,
        PrecisionLevel::Double => op.apply_with::<Binary64>(a)?,
    };
    if !out.is_finite() {
        return Err(Error::Overflow(p.name()));
    }
    Ok(out.with_storage(p.storage()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::householder_qr;
    use crate::rng::{gaussian_matrix, stream_rng};

    fn recon(a: &Matrix, f: &QrFactors) -> f64 {
        f.q.matmul(&f.r).unwrap().sub(a).unwrap().frobenius_norm() / a.frobenius_norm()
    }

    #[test]
    fn rounding_examples() {
        let a = Matrix::from_rows(&[&[1.0, 0.1, 70000.0]]).unwrap();
        let r = round_to_precision(&a, PrecisionLevel::Half);
        assert_eq!(r.matrix.as_slice(), &[1.0, 0.0999755859375, f64::INFINITY]);
        assert!(r.overflowed);
        assert_eq!(r.matrix.storage(), StoragePrecision::Binary16);
        let ok = round_to_precision(&Matrix::identity(2), PrecisionLevel::Half);
        assert!(!ok.overflowed);
    }

    #[test]
    fn double_rounding_is_identity() {
        let a = gaussian_matrix(&mut stream_rng(1, 0), 5, 5);
        assert_eq!(
            round_to_precision(&a, PrecisionLevel::Double)
                .matrix
                .as_slice(),
            a.as_slice()
        );
    }

    #[test]
    fn selection_thresholds() {
        assert_eq!(select_precision(3.2, false), PrecisionLevel::Half);
        assert_eq!(select_precision(4.0, false), PrecisionLevel::Single);
        assert_eq!(select_precision(6.0, false), PrecisionLevel::Single);
        assert_eq!(select_precision(8.0, false), PrecisionLevel::Single);
        assert_eq!(select_precision(8.01, false), PrecisionLevel::Double);
        assert_eq!(select_precision(1.0, true), PrecisionLevel::Double);
        assert_eq!(select_precision(f64::NAN, false), PrecisionLevel::Double);
    }

    #[test]
    fn names_parse() {
        for p in PrecisionLevel::ALL {
            assert_eq!(p.name().parse::<PrecisionLevel>().unwrap(), p);
        }
        assert_eq!(
            "auto".parse::<PrecisionChoice>().unwrap(),
            PrecisionChoice::Auto
        );
        assert!("quad".parse::<PrecisionChoice>().is_err());
        assert_eq!(
            serde_json::to_string(&PrecisionLevel::Single).unwrap(),
            "\"single\""
        );
    }

    #[test]
    fn unit_roundoffs() {
        assert_eq!(PrecisionLevel::Half.unit_roundoff(), 1.0 / 2048.0);
        assert_eq!(
            PrecisionLevel::Single.unit_roundoff(),
            f32::EPSILON as f64 / 2.0
        );
        assert_eq!(PrecisionLevel::Double.unit_roundoff(), f64::EPSILON / 2.0);
        assert_eq!(PrecisionLevel::Double.bound_u1(), f64::EPSILON);
    }

    #[test]
    fn identity_qr_exact_in_every_format() {
        for p in PrecisionLevel::ALL {
            let f = qr_in_precision(&Matrix::identity(4), p).unwrap();
            assert_eq!(f.r.as_slice(), Matrix::identity(4).as_slice());
        }
    }

    #[test]
    fn reduced_precision_qr_backward_error() {
        let a = gaussian_matrix(&mut stream_rng(11, 0), 64, 8);
        let e32 = recon(&a, &qr_in_precision(&a, PrecisionLevel::Single).unwrap());
        let e16 = recon(&a, &qr_in_precision(&a, PrecisionLevel::Half).unwrap());
        assert!(e32 <= 1e-5, "{e32}");
        assert!(e16 <= 5e-2, "{e16}");
        assert!(e16 >= 10.0 * e32, "{e16} vs {e32}");
    }

    #[test]
    fn double_qr_matches_plain_householder() {
        let a = gaussian_matrix(&mut stream_rng(12, 0), 30, 6);
        let f = qr_in_precision(&a, PrecisionLevel::Double).unwrap();
        let g = householder_qr(&a).unwrap();
        assert_eq!(f.r.as_slice(), g.r.as_slice());
        assert_eq!(f.q.as_slice(), g.q.as_slice());
    }

    #[test]
    fn half_qr_survives_large_entries() {
        let a = gaussian_matrix(&mut stream_rng(13, 0), 64, 4).scale(1e6);
        let f = qr_in_precision(&a, PrecisionLevel::Half).unwrap();
        assert!(f.r.is_finite());
        assert!(recon(&a, &f) < 5e-2);
        let r = r_in_precision(&a, PrecisionLevel::Half).unwrap();
        assert_eq!(r.as_slice(), f.r.as_slice());
    }

    #[test]
    fn power_of_two_scales() {
        assert_eq!(power_of_two_scale(1.0), 1.0);
        assert_eq!(power_of_two_scale(3.0), 0.25);
        assert_eq!(power_of_two_scale(0.3), 2.0);
        assert_eq!(power_of_two_scale(0.0), 1.0);
        for x in [1e-300, 7e-5, 65504.0, 1e300] {
            let s = power_of_two_scale(x);
            assert!(x * s > 0.5 && x * s <= 1.0, "{x}");
        }
    }
}
