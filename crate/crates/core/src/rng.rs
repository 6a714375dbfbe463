//! Counter-based deterministic random streams.
//!
//! Every Monte Carlo sample in this crate is drawn from a stream keyed by
//! `(seed, sample_index)`, so estimates are bit-reproducible regardless of
//! how the sample loop is blocked or restarted.

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic stream of pseudo-random numbers for one sample index.
#[derive(Clone, Debug)]
pub struct SampleRng {
    state: u64,
    /// Cached second output of the last Box-Muller pair.
    spare_normal: Option<f64>,
}

impl SampleRng {
    /// Stream keyed by a global seed and a sample counter.
    pub fn new(seed: u64, index: u64) -> Self {
        // Decorrelate the key before using it as a splitmix state.
        let mut s = seed ^ index.wrapping_mul(GOLDEN) ^ 0x6a09e667f3bcc909;
        // Burn a few outputs so nearby (seed, index) keys diverge.
        splitmix64(&mut s);
        let state = splitmix64(&mut s);
        SampleRng { state, spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform in (0, 1].
    pub fn uniform(&mut self) -> f64 {
        // 53 random bits; add 1 to avoid exact zero (needed for log()).
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.uniform() - 0.5 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller (fixed draw count, no rejection).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * t.sin());
        r * t.cos()
    }

    /// Uniform point on the unit sphere in `dim` dimensions.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<f64> {
        assert!(dim >= 1);
        if dim == 1 {
            return vec![if self.next_u64() & 1 == 0 { 1.0 } else { -1.0 }];
        }
        loop {
            let v: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }
}
