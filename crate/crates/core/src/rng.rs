//! Deterministic, splittable random streams.
//!
//! A stream is identified by `(master_seed, stream_index)`. The generator is
//! ChaCha8 in counter mode: the master seed selects the key and the stream
//! index selects the 64-bit nonce, so any number of workers can derive
//! independent streams without coordination and the output never depends on
//! scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream namespaces used by the experiment layer. The domain occupies the
/// top byte of the stream index so per-path indices never collide across
/// purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamDomain {
    Paths = 1,
    LimitDraws = 2,
    Walks = 3,
    OrwLimit = 4,
    LimitSample = 5,
}

impl StreamDomain {
    pub fn index(self, i: u64) -> u64 {
        debug_assert!(i < (1u64 << 56));
        ((self as u64) << 56) | (i & ((1u64 << 56) - 1))
    }
}

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn derive(master_seed: u64, domain: StreamDomain, index: u64) -> Self {
        Self::new(master_seed, domain.index(index))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Exp(1) by inversion.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }

    /// Standard Rayleigh (density `x e^{-x²/2}`) by inversion.
    #[inline]
    pub fn rayleigh(&mut self) -> f64 {
        (2.0 * self.exponential()).sqrt()
    }

    #[inline]
    pub fn fair_sign(&mut self) -> f64 {
        if self.inner.next_u32() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_pair_same_stream() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn distinct_indices_differ() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 4);
        let xs: Vec<u64> = (0..8).map(|_| a.inner.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.inner.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn uniform_ranges() {
        let mut r = RngStream::new(1, 0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = r.uniform_open();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn domains_do_not_collide() {
        assert_ne!(StreamDomain::Paths.index(5), StreamDomain::LimitDraws.index(5));
        assert_eq!(StreamDomain::Paths.index(5) & 0xff, 5);
    }

    #[test]
    fn exponential_mean() {
        let mut r = RngStream::new(11, 0);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| r.exponential()).sum::<f64>() / n as f64;
        assert!((m - 1.0).abs() < 0.01, "{m}");
    }
}
