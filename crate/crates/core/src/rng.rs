//! Splittable, counter-seeded random number streams.
//!
//! Every Monte Carlo replicate gets its own [`Stream`] derived from
//! `(master_seed, replicate_index)` through a splitmix64 key schedule, so
//! serial and parallel executions of the same experiment consume identical
//! random numbers. The generator itself is xoshiro256++; distinct replicates
//! start from independently mixed 256-bit states.

use crate::specfun::ln_gamma_unchecked;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 output mixer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn rotl(x: u64, k: u32) -> u64 {
    x.rotate_left(k)
}

/// A deterministic pseudo-random stream (xoshiro256++).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    s: [u64; 4],
}

impl Stream {
    /// Stream keyed by a bare seed. Equivalent to `for_replicate(seed, 0)`.
    pub fn new(seed: u64) -> Self {
        Self::for_replicate(seed, 0)
    }

    /// Derive the stream for one replicate of an experiment. Streams for
    /// distinct `(master_seed, replicate)` pairs are statistically
    /// independent; the derivation is pure, so any worker may recreate the
    /// stream for any replicate.
    pub fn for_replicate(master_seed: u64, replicate: u64) -> Self {
        let mut x = mix(replicate.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d) ^ master_seed;
        let mut s = [0u64; 4];
        for w in &mut s {
            x = x.wrapping_add(GOLDEN);
            *w = mix(x);
        }
        if s == [0, 0, 0, 0] {
            s[0] = GOLDEN; // xoshiro must not start from the all-zero state
        }
        Stream { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = rotl(s[0].wrapping_add(s[3]), 23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        result
    }

    /// Uniform draw on `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform_co(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform draw on `(0, 1]`; never returns zero, so inverse-power
    /// transforms cannot overflow.
    #[inline]
    pub fn uniform_oc(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Poisson draw with the given mean.
    ///
    /// Multiplicative inversion (Knuth) below mean 10, Hormann's PTRS
    /// transformed rejection above; both are exact samplers.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        debug_assert!(mean.is_finite() && mean >= 0.0);
        if mean <= 0.0 {
            0
        } else if mean < 10.0 {
            self.poisson_knuth(mean)
        } else {
            self.poisson_ptrs(mean)
        }
    }

    fn poisson_knuth(&mut self, mean: f64) -> u64 {
        let limit = (-mean).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= self.uniform_oc();
            if p <= limit {
                return k;
            }
            k += 1;
        }
    }

    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let smu = mean.sqrt();
        let b = 0.931 + 2.53 * smu;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        let ln_mu = mean.ln();
        loop {
            let u = self.uniform_co() - 0.5;
            let v = self.uniform_co();
            let us = 0.5 - u.abs();
            let kf = (2.0 * a / us + b) * u + mean + 0.43;
            if us >= 0.07 && v <= v_r {
                return kf.floor() as u64;
            }
            if kf < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            let k = kf.floor();
            if (v * inv_alpha / (a / (us * us) + b)).ln()
                <= k * ln_mu - mean - ln_gamma_unchecked(k + 1.0)
            {
                return k as u64;
            }
        }
    }
}
