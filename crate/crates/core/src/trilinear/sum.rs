use num_complex::Complex64;

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    re: (f64, f64),
    im: (f64, f64),
    abs: f64,
}

fn add(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl Accumulator {
    pub fn push(&mut self, z: Complex64) {
        self.push_raw(z);
        self.abs += z.norm();
    }

    /// Adds `z` to the sum only.
    pub fn push_raw(&mut self, z: Complex64) {
        add(&mut self.re, z.re);
        add(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs
    }
}

impl Accumulator {
    /// Adds to the absolute-value budget without touching the sum.
    pub fn abs_add(&mut self, a: f64) {
        self.abs += a;
    }
}
