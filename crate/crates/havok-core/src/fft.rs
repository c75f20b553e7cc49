//! Discrete Fourier transform for arbitrary lengths.
//!
//! Power-of-two sizes run through an iterative radix-2 kernel; every
//! other length is handled by Bluestein's chirp-z reduction to a
//! power-of-two convolution, so the result matches the plain DFT sum
//! for any `n`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Forward DFT of a real signal: `V_k = sum_t x_t exp(-i 2 pi k t / n)`.
pub fn fft_forward(x: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&buf)
}

/// Forward DFT of a complex signal.
pub fn fft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform(&mut buf, false);
    buf
}

/// Inverse DFT including the `1/n` factor.
pub fn ifft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    transform(&mut buf, true);
    buf
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(buf, inverse);
        if inverse {
            let scale = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    } else {
        bluestein(buf, inverse);
    }
}

/// Iterative Cooley-Tukey, n a power of two. No scaling applied.
fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let wlen = Complex64::new(libm::cos(ang), libm::sin(ang));
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Bluestein's algorithm: expresses an arbitrary-length DFT as a
/// circular convolution of chirp-modulated sequences.
fn bluestein(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = if inverse { 1.0 } else { -1.0 };

    // chirp c_k = exp(sign * i pi k^2 / n), sign -1 forward; k^2 taken
    // mod 2n to keep the trig argument small for large k
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k = k as u64;
            let sq = (k * k) % (2 * n as u64);
            let ang = sign * core::f64::consts::PI * sq as f64 / n as f64;
            Complex64::new(libm::cos(ang), libm::sin(ang))
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = buf[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let c = chirp[k].conj();
        b[k] = c;
        b[m - k] = c;
    }

    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for k in 0..m {
        a[k] *= b[k];
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;

    let inv_scale = if inverse { 1.0 / n as f64 } else { 1.0 };
    for k in 0..n {
        buf[k] = a[k] * scale * chirp[k] * inv_scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Brute-force O(n^2) DFT used as the independent oracle.
    fn dft_naive(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let ang = sign * 2.0 * core::f64::consts::PI * (k * t) as f64 / n as f64;
                acc += v * Complex64::new(libm::cos(ang), libm::sin(ang));
            }
            if inverse {
                acc /= n as f64;
            }
            out.push(acc);
        }
        out
    }

    fn max_rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        let norm = b.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-300);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm() / norm)
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_signal_is_dc_only() {
        let v = fft_forward(&[1.0, 1.0, 1.0, 1.0]);
        assert!((v[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for bin in &v[1..] {
            assert!(bin.norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_at_k1_for_n4() {
        let v = fft_forward(&[1.0, 0.0, -1.0, 0.0]);
        let expect = [0.0, 2.0, 0.0, 2.0];
        for (k, (&e, got)) in expect.iter().zip(&v).enumerate() {
            assert!((got - Complex64::new(e, 0.0)).norm() < 1e-12, "bin {k}: {got:?}");
        }
    }

    #[test]
    fn matches_naive_dft_across_lengths() {
        // deterministic pseudo-random input
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [8usize, 15, 97, 256] {
            let x: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(next(), next())).collect();
            let fast = fft(&x);
            let slow = dft_naive(&x, false);
            assert!(max_rel_err(&fast, &slow) < 1e-9, "forward mismatch at n={n}");
            let back = ifft(&fast);
            assert!(max_rel_err(&back, &x) < 1e-9, "round trip mismatch at n={n}");
            let slow_inv = dft_naive(&fast, true);
            assert!(max_rel_err(&back, &slow_inv) < 1e-9, "inverse mismatch at n={n}");
        }
    }

    #[test]
    fn parseval_holds_for_odd_prime_length() {
        let x: Vec<f64> = (0..97).map(|k| libm::sin(0.37 * k as f64) + 0.2).collect();
        let v = fft_forward(&x);
        let time_energy: f64 = x.iter().map(|a| a * a).sum();
        let freq_energy: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>() / 97.0;
        assert!((time_energy - freq_energy).abs() / time_energy < 1e-12);
    }

    #[test]
    fn single_sample_passthrough() {
        let v = fft(&[Complex64::new(3.5, -1.0)]);
        assert_eq!(v, vec![Complex64::new(3.5, -1.0)]);
    }
}
