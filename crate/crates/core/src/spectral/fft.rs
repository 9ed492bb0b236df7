use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalised 3D complex FFT on a row-major `shape[0] x shape[1] x shape[2]` array.
///
/// `forward` computes `sum_x f(x) e^{-ikx}`, `inverse` computes `sum_k f(k) e^{+ikx}`.
pub struct Fft3 {
    shape: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
    scratch: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Fft3 {
    pub fn new(shape: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = shape.map(|m| planner.plan_fft_forward(m));
        let inv = shape.map(|m| planner.plan_fft_inverse(m));
        let scratch_len = fwd
            .iter()
            .chain(inv.iter())
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let tmp_len = (shape[1] * shape[2]).max(shape[0] * shape[2]);
        Self {
            shape,
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
            tmp: vec![Complex64::default(); tmp_len],
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

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        let plans = self.fwd.clone();
        self.run(buf, &plans);
    }

    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        let plans = self.inv.clone();
        self.run(buf, &plans);
    }

    fn run(&mut self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(buf.len(), self.len(), "buffer does not match FFT shape");
        let [n0, n1, n2] = self.shape;
        let scratch = &mut self.scratch;
        let tmp = &mut self.tmp;

        plans[2].process_with_scratch(buf, scratch);

        if n1 > 1 {
            for slab in buf.chunks_exact_mut(n1 * n2) {
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        tmp[i2 * n1 + i1] = slab[i1 * n2 + i2];
                    }
                }
                plans[1].process_with_scratch(&mut tmp[..n1 * n2], scratch);
                for i1 in 0..n1 {
                    for i2 in 0..n2 {
                        slab[i1 * n2 + i2] = tmp[i2 * n1 + i1];
                    }
                }
            }
        }

        if n0 > 1 {
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    let row = (i0 * n1 + i1) * n2;
                    for i2 in 0..n2 {
                        tmp[i2 * n0 + i0] = buf[row + i2];
                    }
                }
                plans[0].process_with_scratch(&mut tmp[..n0 * n2], scratch);
                for i0 in 0..n0 {
                    let row = (i0 * n1 + i1) * n2;
                    for i2 in 0..n2 {
                        buf[row + i2] = tmp[i2 * n0 + i0];
                    }
                }
            }
        }
    }
}
