//! Small three-dimensional complex DFT for reconstruction areas.
//!
//! Power-of-two lengths use an iterative radix-2 transform; other lengths
//! fall back to a direct O(n^2) DFT. Conventions: forward is
//! `X[k] = sum_m x[m] e^{-j 2 pi k m / n}`, the inverse carries the `1/n`
//! factor per axis.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
struct Fft1 {
    n: usize,
    /// `e^{-j 2 pi i / n}` for `i in 0..n`.
    roots: Vec<Complex64>,
    /// Bit-reversal permutation, empty for non power-of-two lengths.
    bitrev: Vec<usize>,
}

impl Fft1 {
    fn new(n: usize) -> Self {
        let roots = (0..n)
            .map(|i| {
                let a = -2.0 * PI * i as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bitrev = if n.is_power_of_two() && n > 1 {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| i.reverse_bits() >> (usize::BITS - bits))
                .collect()
        } else {
            Vec::new()
        };
        Self { n, roots, bitrev }
    }

    fn root(&self, i: usize, inverse: bool) -> Complex64 {
        let r = self.roots[i];
        if inverse {
            r.conj()
        } else {
            r
        }
    }

    fn process(&self, buf: &mut [Complex64], scratch: &mut [Complex64], inverse: bool) {
        let n = self.n;
        if n == 1 {
            return;
        }
        if self.bitrev.is_empty() {
            for (k, out) in scratch[..n].iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, x) in buf.iter().enumerate() {
                    acc += x * self.root((k * m) % n, inverse);
                }
                *out = acc;
            }
            buf.copy_from_slice(&scratch[..n]);
            return;
        }
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = self.root(j * stride, inverse);
                    let u = buf[start + j];
                    let v = buf[start + j + half] * w;
                    buf[start + j] = u + v;
                    buf[start + j + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

/// Separable 3D transform over a buffer laid out with the first axis fastest.
#[derive(Debug, Clone)]
pub struct Fft3 {
    shape: [usize; 3],
    axes: [Fft1; 3],
}

impl Fft3 {
    pub fn new(shape: [usize; 3]) -> Self {
        Self {
            shape,
            axes: shape.map(Fft1::new),
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse transform including the `1/(M N P)` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len(), "buffer does not match transform shape");
        let [m, n, p] = self.shape;
        let longest = m.max(n).max(p);
        let mut lane = vec![Complex64::new(0.0, 0.0); longest];
        let mut scratch = vec![Complex64::new(0.0, 0.0); longest];

        for row in data.chunks_exact_mut(m) {
            self.axes[0].process(row, &mut scratch, inverse);
        }
        for plane in data.chunks_exact_mut(m * n) {
            for i in 0..m {
                for j in 0..n {
                    lane[j] = plane[j * m + i];
                }
                self.axes[1].process(&mut lane[..n], &mut scratch, inverse);
                for j in 0..n {
                    plane[j * m + i] = lane[j];
                }
            }
        }
        let slab = m * n;
        for i in 0..slab {
            for k in 0..p {
                lane[k] = data[k * slab + i];
            }
            self.axes[2].process(&mut lane[..p], &mut scratch, inverse);
            for k in 0..p {
                data[k * slab + i] = lane[k];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dft(shape: [usize; 3], x: &[Complex64]) -> Vec<Complex64> {
        let [m, n, p] = shape;
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        for q in 0..p {
            for l in 0..n {
                for k in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..p {
                        for b in 0..n {
                            for a in 0..m {
                                let ang = -2.0
                                    * PI
                                    * ((k * a) as f64 / m as f64
                                        + (l * b) as f64 / n as f64
                                        + (q * c) as f64 / p as f64);
                                acc += x[(c * n + b) * m + a]
                                    * Complex64::new(libm::cos(ang), libm::sin(ang));
                            }
                        }
                    }
                    out[(q * n + l) * m + k] = acc;
                }
            }
        }
        out
    }

    fn sample(len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|i| {
                let f = i as f64;
                Complex64::new(libm::sin(f * 0.37) + 0.1 * f, libm::cos(f * 1.3))
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        for shape in [[4, 2, 8], [3, 5, 2], [8, 8, 8], [1, 6, 4]] {
            let fft = Fft3::new(shape);
            let x = sample(fft.len());
            let mut y = x.clone();
            fft.forward(&mut y);
            let reference = direct_dft(shape, &x);
            for (a, b) in y.iter().zip(&reference) {
                assert!((a - b).norm() < 1e-9, "{shape:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let fft = Fft3::new([16, 8, 4]);
        let x = sample(fft.len());
        let mut y = x.clone();
        fft.forward(&mut y);
        fft.inverse(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
