use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::spectral::{fft_friendly, Fft3, GridSpec, ModeSource, Vec3c, TORUS_VOLUME};

struct Synth {
    shape: [usize; 3],
    fft: Fft3,
}

impl Synth {
    fn index(&self, k: [i64; 3]) -> usize {
        let s = self.shape;
        let i = |d: usize| k[d].rem_euclid(s[d] as i64) as usize;
        (i(0) * s[1] + i(1)) * s[2] + i(2)
    }

    /// Synthesises `a(x) + i b(x)` where `a`, `b` are the coefficient maps `fa`, `fb`
    /// applied to the modes of `src_a` and `src_b`.
    fn pair(
        &mut self,
        buf: &mut [Complex64],
        src_a: &dyn ModeSource,
        fa: &dyn Fn([i64; 3], &Vec3c) -> Complex64,
        src_b: &dyn ModeSource,
        fb: &dyn Fn([i64; 3], &Vec3c) -> Complex64,
    ) {
        buf.iter_mut().for_each(|z| *z = Complex64::default());
        src_a.for_each_mode(&mut |k, c| buf[self.index(k)] += fa(k, &c));
        src_b.for_each_mode(&mut |k, c| buf[self.index(k)] += Complex64::i() * fb(k, &c));
        self.fft.inverse(buf);
    }
}

struct Erased<'a, T: ?Sized>(&'a T);

impl<T: ModeSource + ?Sized> ModeSource for Erased<'_, T> {
    fn for_each_mode(&self, f: &mut dyn FnMut([i64; 3], Vec3c)) {
        self.0.for_each_mode(f)
    }
    fn extent(&self) -> [i64; 3] {
        self.0.extent()
    }
}

/// Physical-space quadrature of `∫ u_j v_i ∂_i w_j dx`.
///
/// Every field must lie in the band of `band`; the quadrature grid is chosen per
/// axis with at least `3K + 1` points so the cubic product is alias free.
pub fn trilinear_grid<U, V, W>(u: &U, v: &V, w: &W, band: GridSpec) -> Result<f64>
where
    U: ModeSource + ?Sized,
    V: ModeSource + ?Sized,
    W: ModeSource + ?Sized,
{
    let mut ext = [0i64; 3];
    for e in [u.extent(), v.extent(), w.extent()] {
        for d in 0..3 {
            if e[d] > band.kmax() {
                return Err(LabError::Resolution {
                    needed: e[d],
                    available: band.kmax(),
                });
            }
            ext[d] = ext[d].max(e[d]);
        }
    }
    let shape = ext.map(|k| fft_friendly(3 * k as usize + 1));
    let total: usize = shape.iter().product();
    let mut s = Synth {
        shape,
        fft: Fft3::new(shape),
    };
    let (u, v, w) = (Erased(u), Erased(v), Erased(w));
    let comp = |j: usize| move |_: [i64; 3], c: &Vec3c| c[j];
    let grad = |j: usize, d: usize| move |k: [i64; 3], c: &Vec3c| Complex64::new(0.0, k[d] as f64) * c[j];

    let mut buf = vec![Complex64::default(); total];
    let mut buf2 = vec![Complex64::default(); total];
    s.pair(&mut buf, &v, &comp(0), &v, &comp(1));
    s.pair(&mut buf2, &v, &comp(2), &v, &|_, _| Complex64::default());
    let vf: [Vec<f64>; 3] = [
        buf.iter().map(|z| z.re).collect(),
        buf.iter().map(|z| z.im).collect(),
        buf2.iter().map(|z| z.re).collect(),
    ];

    let mut acc = 0.0f64;
    for j in 0..3 {
        s.pair(&mut buf, &u, &comp(j), &w, &grad(j, 0));
        s.pair(&mut buf2, &w, &grad(j, 1), &w, &grad(j, 2));
        let mut part = 0.0;
        for x in 0..total {
            let adv = vf[0][x] * buf[x].im + vf[1][x] * buf2[x].re + vf[2][x] * buf2[x].im;
            part += buf[x].re * adv;
        }
        acc += part;
    }
    Ok(acc * TORUS_VOLUME / total as f64)
}
