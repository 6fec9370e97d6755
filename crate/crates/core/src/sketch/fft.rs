//! Complex FFT, orthonormal DCT-II and Walsh–Hadamard transform, all with
//! every flop rounded through an [`Arith`] format.

use std::f64::consts::PI;
use std::marker::PhantomData;

use crate::arith::{Arith, Binary64};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    fn new(re: f64, im: f64) -> Self {
        Cx { re, im }
    }

    fn expi(theta: f64) -> Self {
        Cx::new(theta.cos(), theta.sin())
    }

    fn conj(self) -> Self {
        Cx::new(self.re, -self.im)
    }

    fn rounded<A: Arith>(self) -> Self {
        Cx::new(A::round(self.re), A::round(self.im))
    }
}

#[inline(always)]
fn cadd<A: Arith>(a: Cx, b: Cx) -> Cx {
    Cx::new(A::add(a.re, b.re), A::add(a.im, b.im))
}

#[inline(always)]
fn csub<A: Arith>(a: Cx, b: Cx) -> Cx {
    Cx::new(A::sub(a.re, b.re), A::sub(a.im, b.im))
}

#[inline(always)]
fn cmul<A: Arith>(a: Cx, b: Cx) -> Cx {
    Cx::new(
        A::sub(A::mul(a.re, b.re), A::mul(a.im, b.im)),
        A::add(A::mul(a.re, b.im), A::mul(a.im, b.re)),
    )
}

/// Forward DFT `X_k = Σ x_n e^{-2πikn/N}` of any length. Powers of two use
/// an iterative radix-2 kernel, other lengths go through Bluestein's chirp
/// convolution on the next power of two at least `2N - 1`.
pub(crate) struct FftPlan<A: Arith> {
    len: usize,
    kind: FftKind,
    _arith: PhantomData<A>,
}

enum FftKind {
    Radix2 {
        twiddles: Vec<Cx>,
    },
    Bluestein {
        chirp: Vec<Cx>,
        kernel: Vec<Cx>,
        twiddles: Vec<Cx>,
    },
}

impl<A: Arith> FftPlan<A> {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "empty transform");
        let kind = if len.is_power_of_two() {
            FftKind::Radix2 {
                twiddles: radix2_twiddles::<A>(len),
            }
        } else {
            let big = (2 * len - 1).next_power_of_two();
            let two_n = 2 * len as u128;
            // e^{-iπ n²/N}; n² is reduced mod 2N in integers so the angle
            // stays accurate for long transforms.
            let chirp_f64: Vec<Cx> = (0..len)
                .map(|n| {
                    let r = (n as u128 * n as u128) % two_n;
                    Cx::expi(-PI * r as f64 / len as f64)
                })
                .collect();
            let mut b = vec![Cx::default(); big];
            b[0] = Cx::new(1.0, 0.0);
            for n in 1..len {
                b[n] = chirp_f64[n].conj();
                b[big - n] = chirp_f64[n].conj();
            }
            // The kernel spectrum is computed once in binary64.
            radix2::<Binary64>(&mut b, &radix2_twiddles::<Binary64>(big));
            let inv = 1.0 / big as f64;
            let kernel = b
                .iter()
                .map(|c| Cx::new(c.re * inv, c.im * inv).rounded::<A>())
                .collect();
            FftKind::Bluestein {
                chirp: chirp_f64.iter().map(|c| c.rounded::<A>()).collect(),
                kernel,
                twiddles: radix2_twiddles::<A>(big),
            }
        };
        FftPlan {
            len,
            kind,
            _arith: PhantomData,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn forward(&self, x: &mut [Cx]) {
        assert_eq!(x.len(), self.len);
        match &self.kind {
            FftKind::Radix2 { twiddles } => radix2::<A>(x, twiddles),
            FftKind::Bluestein {
                chirp,
                kernel,
                twiddles,
            } => {
                let big = kernel.len();
                let mut a = vec![Cx::default(); big];
                for n in 0..self.len {
                    a[n] = cmul::<A>(x[n], chirp[n]);
                }
                radix2::<A>(&mut a, twiddles);
                for (v, k) in a.iter_mut().zip(kernel) {
                    *v = cmul::<A>(*v, *k).conj();
                }
                // Unscaled inverse as conj(FFT(conj(.))); the 1/M is in the kernel.
                radix2::<A>(&mut a, twiddles);
                for k in 0..self.len {
                    x[k] = cmul::<A>(a[k].conj(), chirp[k]);
                }
            }
        }
    }
}

fn radix2_twiddles<A: Arith>(len: usize) -> Vec<Cx> {
    (0..len / 2)
        .map(|k| Cx::expi(-2.0 * PI * k as f64 / len as f64).rounded::<A>())
        .collect()
}

fn radix2<A: Arith>(x: &mut [Cx], twiddles: &[Cx]) {
    let n = x.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            x.swap(i, j);
        }
    }
    let mut half = 1;
    while half < n {
        let stride = n / (2 * half);
        for start in (0..n).step_by(2 * half) {
            for k in 0..half {
                let t = cmul::<A>(twiddles[k * stride], x[start + k + half]);
                let u = x[start + k];
                x[start + k] = cadd::<A>(u, t);
                x[start + k + half] = csub::<A>(u, t);
            }
        }
        half *= 2;
    }
}

/// Orthonormal DCT-II, `X_k = c_k Σ x_n cos(πk(2n+1)/(2N))` with
/// `c_0 = √(1/N)` and `c_k = √(2/N)`, computed with one length-N complex FFT
/// after an even/odd reordering of the input.
pub(crate) struct DctPlan<A: Arith> {
    fft: FftPlan<A>,
    post: Vec<Cx>,
    pre_scale: f64,
    dc_scale: f64,
}

impl<A: Arith> DctPlan<A> {
    pub fn new(len: usize) -> Self {
        let post = (0..len)
            .map(|k| Cx::expi(-PI * k as f64 / (2 * len) as f64).rounded::<A>())
            .collect();
        DctPlan {
            fft: FftPlan::new(len),
            post,
            // Scaling before the FFT keeps intermediate magnitudes near the
            // input's 2-norm, which matters in binary16.
            pre_scale: A::round((2.0 / len as f64).sqrt()),
            dc_scale: A::round(std::f64::consts::FRAC_1_SQRT_2),
        }
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    /// Transforms `x` in place; `work` is scratch of the same length.
    pub fn apply(&self, x: &mut [f64], work: &mut Vec<Cx>) {
        let n = self.len();
        assert_eq!(x.len(), n);
        work.clear();
        work.resize(n, Cx::default());
        let evens = n.div_ceil(2);
        for k in 0..evens {
            work[k].re = A::mul(x[2 * k], self.pre_scale);
        }
        for k in 0..n / 2 {
            work[n - 1 - k].re = A::mul(x[2 * k + 1], self.pre_scale);
        }
        self.fft.forward(work);
        for k in 0..n {
            let v = work[k];
            let t = self.post[k];
            x[k] = A::sub(A::mul(v.re, t.re), A::mul(v.im, t.im));
        }
        x[0] = A::mul(x[0], self.dc_scale);
    }
}

/// Orthonormal Walsh–Hadamard transform of a power-of-two length, natural
/// (Hadamard) ordering.
pub(crate) fn wht_in_place<A: Arith>(x: &mut [f64]) {
    let n = x.len();
    assert!(n.is_power_of_two(), "WHT length must be a power of two");
    let levels = n.trailing_zeros() as i32;
    // The normalization 2^{-levels/2} is split into an exact power of two
    // applied first and at most one 1/√2 applied last.
    let exact = 2f64.powi(-(levels / 2));
    if exact != 1.0 {
        x.iter_mut().for_each(|v| *v = A::mul(*v, exact));
    }
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (x[i], x[i + h]);
                x[i] = A::add(a, b);
                x[i + h] = A::sub(a, b);
            }
        }
        h *= 2;
    }
    if levels % 2 == 1 {
        let s = A::round(std::f64::consts::FRAC_1_SQRT_2);
        x.iter_mut().for_each(|v| *v = A::mul(*v, s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Binary16, Binary32};
    use crate::dense::norm2;

    fn naive_dft(x: &[Cx]) -> Vec<Cx> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Cx::default(), |acc, (j, v)| {
                    let w = Cx::expi(-2.0 * PI * ((j * k) % n) as f64 / n as f64);
                    let p = cmul::<Binary64>(*v, w);
                    Cx::new(acc.re + p.re, acc.im + p.im)
                })
            })
            .collect()
    }

    fn naive_dct(x: &[f64]) -> Vec<f64> {
        let n = x.len() as f64;
        (0..x.len())
            .map(|k| {
                let c = if k == 0 {
                    (1.0 / n).sqrt()
                } else {
                    (2.0 / n).sqrt()
                };
                c * x
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (2.0 * j as f64 + 1.0) / (2.0 * n)).cos())
                    .sum::<f64>()
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| ((i * 7919 % 113) as f64 - 56.0) / 40.0)
            .collect()
    }

    #[test]
    fn fft_matches_naive_dft() {
        for n in [1, 2, 3, 5, 8, 12, 17, 64, 100] {
            let x: Vec<Cx> = signal(2 * n)
                .chunks(2)
                .map(|c| Cx::new(c[0], c[1]))
                .collect();
            let mut y = x.clone();
            FftPlan::<Binary64>::new(n).forward(&mut y);
            let z = naive_dft(&x);
            for (a, b) in y.iter().zip(&z) {
                assert!(
                    (a.re - b.re).abs() + (a.im - b.im).abs() < 1e-11 * n as f64,
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn dct_matches_naive() {
        for n in [1, 2, 3, 4, 7, 16, 30, 31] {
            let x = signal(n);
            let mut y = x.clone();
            DctPlan::<Binary64>::new(n).apply(&mut y, &mut Vec::new());
            for (a, b) in y.iter().zip(naive_dct(&x)) {
                assert!((a - b).abs() < 1e-13, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn transforms_preserve_norm() {
        for n in [64, 100, 1000] {
            let x = signal(n);
            let mut y = x.clone();
            DctPlan::<Binary64>::new(n).apply(&mut y, &mut Vec::new());
            assert!((norm2(&y) / norm2(&x) - 1.0).abs() < 1e-13);
        }
        for n in [1, 2, 8, 512] {
            let x = signal(n);
            let mut y = x.clone();
            wht_in_place::<Binary64>(&mut y);
            assert!((norm2(&y) / norm2(&x) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn wht_two_point() {
        let mut x = [1.0, 0.0];
        wht_in_place::<Binary64>(&mut x);
        assert_eq!(x, [std::f64::consts::FRAC_1_SQRT_2; 2]);
        let mut y = [1.0, 1.0, 1.0, 1.0];
        wht_in_place::<Binary64>(&mut y);
        assert_eq!(y, [2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn reduced_precision_error_tracks_unit_roundoff() {
        for n in [256, 300] {
            let x = signal(n);
            let mut exact = x.clone();
            DctPlan::<Binary64>::new(n).apply(&mut exact, &mut Vec::new());
            let err = |y: &[f64]| {
                let d: Vec<f64> = y.iter().zip(&exact).map(|(a, b)| a - b).collect();
                norm2(&d) / norm2(&exact)
            };
            let mut s = x.clone();
            DctPlan::<Binary32>::new(n).apply(&mut s, &mut Vec::new());
            let mut h = x.clone();
            DctPlan::<Binary16>::new(n).apply(&mut h, &mut Vec::new());
            let (es, eh) = (err(&s), err(&h));
            assert!(es > 1e-9 && es < 1e-5, "binary32 n={n}: {es}");
            assert!(eh > 1e-5 && eh < 5e-2, "binary16 n={n}: {eh}");
        }
    }
}
