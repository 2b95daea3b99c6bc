//! Counter-based random streams.
//!
//! A stream is a key derived from `(master, task)`; the `k`-th draw is a
//! pure function of `(key, k)`. Parallel consumers index draws by position,
//! so results never depend on scheduling.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Well-known task tags so distinct samplers never share a stream.
pub mod task {
    pub const GINIBRE: u64 = 0x6769_6e69_6272_6501;
    pub const DIAGONAL: u64 = 0x6469_6167_6f6e_6102;
    pub const FRAME: u64 = 0x6672_616d_6503;
    pub const LIMIT_LAW: u64 = 0x6c69_6d69_7404;
    pub const LYAPUNOV: u64 = 0x6c79_6170_0005;
    pub const ACCEPTANCE: u64 = 0x6163_6365_7074_0006;
    pub const SCHUR: u64 = 0x7363_6875_7207;
}

#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(master: u64, task: u64) -> Self {
        let key = mix64(master.wrapping_add(mix64(task.wrapping_add(GOLDEN))));
        Self { key, counter: 0 }
    }

    /// A child stream for replica or instance `index`.
    pub fn child(&self, index: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(index.wrapping_mul(GOLDEN).wrapping_add(1))),
            counter: 0,
        }
    }

    #[inline]
    pub fn u64_at(&self, k: u64) -> u64 {
        mix64(self.key.wrapping_add(k.wrapping_mul(GOLDEN)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform_at(&self, k: u64) -> f64 {
        (self.u64_at(k) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian (`E|g|^2 = 1`) from draws `k` and `k + 1`.
    #[inline]
    pub fn complex_normal_at(&self, k: u64) -> num_complex::Complex64 {
        let u = 1.0 - self.uniform_at(k);
        let v = self.uniform_at(k + 1);
        let r = (-u.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * v).sin_cos();
        num_complex::Complex64::new(r * c, r * s)
    }

    pub fn next_u64(&mut self) -> u64 {
        let x = self.u64_at(self.counter);
        self.counter += 1;
        x
    }

    pub fn uniform(&mut self) -> f64 {
        let x = self.uniform_at(self.counter);
        self.counter += 1;
        x
    }

    pub fn complex_normal(&mut self) -> num_complex::Complex64 {
        let g = self.complex_normal_at(self.counter);
        self.counter += 2;
        g
    }

    /// Real standard normal.
    pub fn normal(&mut self) -> f64 {
        self.complex_normal().re * std::f64::consts::SQRT_2
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }
}
