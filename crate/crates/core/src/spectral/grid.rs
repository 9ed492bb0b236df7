use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Cubic grid of `n^3` points on the torus `[0, 2π)^3` and its spectral dual.
///
/// Wavenumbers run over `-n/2+1 ..= n/2` per axis; the Nyquist plane `k_i = n/2`
/// is kept in storage but always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(LabError::InvalidGrid(format!("n={n} must be even and >= 4")));
        }
        if n > 1024 {
            return Err(LabError::InvalidGrid(format!("n={n} exceeds the supported maximum 1024")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest resolved |k_i| (Nyquist excluded).
    pub fn kmax(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    /// Largest |k_i| kept by the 2/3 rule.
    pub fn dealias_kmax(&self) -> i64 {
        self.n as i64 / 3
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    pub fn in_band(&self, k: [i64; 3]) -> bool {
        k.iter().all(|&c| c.abs() <= self.kmax())
    }

    /// Storage index of a resolved wavevector.
    pub fn index(&self, k: [i64; 3]) -> Option<usize> {
        if !self.in_band(k) {
            return None;
        }
        let n = self.n as i64;
        let i = |c: i64| c.rem_euclid(n) as usize;
        Some((i(k[0]) * self.n + i(k[1])) * self.n + i(k[2]))
    }

    /// Signed wavenumber stored at axis position `i` (Nyquist reported as `n/2`).
    pub fn axis_wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [
            self.axis_wavenumber(idx / (n * n)),
            self.axis_wavenumber((idx / n) % n),
            self.axis_wavenumber(idx % n),
        ]
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n as i64 / 2;
        self.wavevector(idx).iter().any(|&c| c == h)
    }

    /// Index of `-k` for the wavevector stored at `idx`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let neg = |i: usize| (n - i) % n;
        (neg(idx / (n * n)) * n + neg((idx / n) % n)) * n + neg(idx % n)
    }
}

/// Smallest integer `>= m` whose prime factors are 2, 3 and 5 only.
pub fn fft_friendly(m: usize) -> usize {
    let mut c = m.max(1);
    loop {
        let mut r = c;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return c;
        }
        c += 1;
    }
}
