//! Subsampled randomized trigonometric sketch `Ω = √(M/d)·S·F·D`.
//!
//! `D` is a random ±1 diagonal, `F` an orthonormal real transform (DCT-II by
//! default, Walsh–Hadamard on the input zero-padded to a power of two) and
//! `S` samples `d` rows uniformly with replacement. `M` is the transform
//! length (`m` for DCT-II, the padded length for WHT), which makes
//! `E[ΩᵀΩ] = I`.

mod embedding;
pub(crate) mod fft;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Binary64};
use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

pub use embedding::{coherence, sample_size_lower_bound, EmbeddingParams};
use fft::{wht_in_place, DctPlan};

/// Rows sampled per column of `A` by default (`d = 3n`).
pub const DEFAULT_D_FACTOR: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Dct2,
    Wht,
}

impl Transform {
    /// Length of the transform applied to `m`-vectors.
    pub fn padded_len(self, m: usize) -> usize {
        match self {
            Transform::Dct2 => m,
            Transform::Wht => m.next_power_of_two(),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Dct2 => "dct2",
            Transform::Wht => "wht",
        })
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dct" | "dct2" => Ok(Transform::Dct2),
            "wht" | "hadamard" => Ok(Transform::Wht),
            other => Err(Error::InvalidInput(format!("unknown transform `{other}`"))),
        }
    }
}

/// Serialized form of a sketch. Signs and samples are regenerated from the
/// seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SketchDescriptor {
    pub m: usize,
    pub d: usize,
    pub transform: Transform,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SketchDescriptor", into = "SketchDescriptor")]
pub struct SketchOperator {
    m: usize,
    d: usize,
    transform: Transform,
    seed: u64,
    signs: Vec<f64>,
    sampled_rows: Vec<usize>,
}

impl TryFrom<SketchDescriptor> for SketchOperator {
    type Error = Error;

    fn try_from(d: SketchDescriptor) -> Result<Self> {
        make_sketch(d.m, d.d, d.transform, d.seed)
    }
}

impl From<SketchOperator> for SketchDescriptor {
    fn from(op: SketchOperator) -> Self {
        op.descriptor()
    }
}

/// Builds the sketch for `m`-row inputs with `d` samples.
///
/// Signs come from one random stream and row samples from another, so
/// changing `d` leaves the signs unchanged.
pub fn make_sketch(m: usize, d: usize, transform: Transform, seed: u64) -> Result<SketchOperator> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidInput(format!(
            "sketch needs m >= 1 and d >= 1, got m={m}, d={d}"
        )));
    }
    let len = transform.padded_len(m);
    let mut sign_rng = stream_rng(seed, stream::SKETCH_SIGNS);
    let signs = (0..len)
        .map(|_| if sign_rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let mut row_rng = stream_rng(seed, stream::SKETCH_ROWS);
    let sampled_rows = (0..d).map(|_| row_rng.random_range(0..len)).collect();
    Ok(SketchOperator {
        m,
        d,
        transform,
        seed,
        signs,
        sampled_rows,
    })
}

impl SketchOperator {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Diagonal of `D`, length [`Transform::padded_len`].
    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn sampled_rows(&self) -> &[usize] {
        &self.sampled_rows
    }

    pub fn descriptor(&self) -> SketchDescriptor {
        SketchDescriptor {
            m: self.m,
            d: self.d,
            transform: self.transform,
            seed: self.seed,
        }
    }

    /// Replaces signs and samples, e.g. to build a fixed test operator.
    pub fn with_parts(mut self, signs: Vec<f64>, sampled_rows: Vec<usize>) -> Result<Self> {
        let len = self.transform.padded_len(self.m);
        if signs.len() != len || signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidInput(format!(
                "signs must be {len} entries of ±1"
            )));
        }
        if sampled_rows.is_empty() || sampled_rows.iter().any(|&r| r >= len) {
            return Err(Error::InvalidInput(format!(
                "sampled rows must be nonempty and below {len}"
            )));
        }
        self.d = sampled_rows.len();
        self.signs = signs;
        self.sampled_rows = sampled_rows;
        Ok(self)
    }

    /// `√(M/d)`.
    pub fn scale(&self) -> f64 {
        (self.transform.padded_len(self.m) as f64 / self.d as f64).sqrt()
    }

    /// `ΩA` in binary64.
    pub fn apply(&self, a: &Matrix) -> Result<Matrix> {
        self.apply_with::<Binary64>(a)
    }

    /// `ΩA` with every flop rounded to `A`'s format. The input is used as
    /// given; round it first if it should be stored in that format too.
    pub fn apply_with<A: Arith>(&self, a: &Matrix) -> Result<Matrix> {
        if a.rows() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "sketch expects {} rows, input has {}",
                self.m,
                a.rows()
            )));
        }
        let len = self.transform.padded_len(self.m);
        let scale = A::round(self.scale());
        let dct = match self.transform {
            Transform::Dct2 => Some(DctPlan::<A>::new(len)),
            Transform::Wht => None,
        };
        let cols = crate::par::map_indices(a.cols(), |j| {
            let mut buf = vec![0.0; len];
            for (b, (&x, &s)) in buf.iter_mut().zip(a.col(j).iter().zip(&self.signs)) {
                *b = x * s;
            }
            match &dct {
                Some(plan) => plan.apply(&mut buf, &mut Vec::new()),
                None => wht_in_place::<A>(&mut buf),
            }
            self.sampled_rows
                .iter()
                .map(|&r| A::mul(buf[r], scale))
                .collect::<Vec<f64>>()
        });
        let data = cols.concat();
        Matrix::from_col_major(self.d, a.cols(), data)
    }
}

pub fn apply_sketch(op: &SketchOperator, a: &Matrix) -> Result<Matrix> {
    op.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{householder_qr, singular_values};
    use crate::rng::gaussian_matrix;

    #[test]
    fn deterministic_from_seed() {
        let a = make_sketch(4, 2, Transform::Dct2, 99).unwrap();
        let b = make_sketch(4, 2, Transform::Dct2, 99).unwrap();
        assert_eq!(a, b);
        let c = make_sketch(4, 2, Transform::Dct2, 100).unwrap();
        assert_eq!(c.d(), 2);
    }

    #[test]
    fn signs_do_not_depend_on_d() {
        let a = make_sketch(50, 3, Transform::Dct2, 5).unwrap();
        let b = make_sketch(50, 30, Transform::Dct2, 5).unwrap();
        assert_eq!(a.signs(), b.signs());
    }

    #[test]
    fn sign_frequency_is_fair() {
        let plus = (0..10_000u64)
            .filter(|&s| make_sketch(2, 1, Transform::Dct2, s).unwrap().signs()[0] > 0.0)
            .count();
        let p = plus as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&p), "{p}");
    }

    #[test]
    fn stores_three_n_samples() {
        let op = make_sketch(1000, DEFAULT_D_FACTOR * 100, Transform::Dct2, 1).unwrap();
        assert_eq!(op.sampled_rows().len(), 300);
        assert!(op.sampled_rows().iter().all(|&r| r < 1000));
    }

    #[test]
    fn two_point_hadamard_by_hand() {
        let op = make_sketch(2, 2, Transform::Wht, 0)
            .unwrap()
            .with_parts(vec![1.0, 1.0], vec![0, 1])
            .unwrap();
        let out = op.apply(&Matrix::column_vector(&[1.0, 0.0])).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(out.as_slice(), &[h, h]);
    }

    #[test]
    fn full_unsampled_transform_preserves_column_norms() {
        let a = gaussian_matrix(&mut stream_rng(4, 0), 37, 3);
        for t in [Transform::Dct2, Transform::Wht] {
            let len = t.padded_len(37);
            let op = make_sketch(37, 1, t, 0)
                .unwrap()
                .with_parts(vec![1.0; len], (0..len).collect())
                .unwrap();
            let out = op.apply(&a).unwrap();
            for j in 0..3 {
                let r = crate::dense::norm2(out.col(j)) / crate::dense::norm2(a.col(j));
                assert!((r - 1.0).abs() < 1e-13, "{t}: {r}");
            }
        }
    }

    #[test]
    fn sketched_orthonormal_basis_is_well_conditioned() {
        let a = gaussian_matrix(&mut stream_rng(8, 0), 1024, 16);
        let q = householder_qr(&a).unwrap().q;
        for seed in 0..20 {
            for t in [Transform::Dct2, Transform::Wht] {
                let sv =
                    singular_values(&make_sketch(1024, 48, t, seed).unwrap().apply(&q).unwrap())
                        .unwrap();
                assert!(
                    sv[0] <= 2.0 && *sv.last().unwrap() >= 0.3,
                    "seed {seed} {t}: {sv:?}"
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let op = make_sketch(5, 2, Transform::Dct2, 0).unwrap();
        assert!(matches!(
            op.apply(&Matrix::zeros(4, 1)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(make_sketch(0, 1, Transform::Dct2, 0).is_err());
    }

    #[test]
    fn json_descriptor_round_trip() {
        let op = make_sketch(33, 7, Transform::Wht, 12).unwrap();
        let js = serde_json::to_string(&op).unwrap();
        assert_eq!(js, r#"{"m":33,"d":7,"transform":"wht","seed":12}"#);
        let back: SketchOperator = serde_json::from_str(&js).unwrap();
        assert_eq!(back, op);
        assert_eq!(back.signs().len(), 64);
    }
}
