use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::SimState;
use crate::construction::Mode;
use crate::error::{LabError, Result};
use crate::spectral::{Fft3, GridSpec, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Nonlinear tendencies and the largest pointwise speed seen while forming them.
pub struct Tendency {
    pub u: SpectralField,
    pub b: Option<SpectralField>,
    pub max_speed: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub dt: f64,
    pub cfl: f64,
    /// `∫ ‖∇u‖² ds` over the step.
    pub diss_u: f64,
    /// `∫ nu ‖∇b‖² ds` over the step.
    pub diss_b: f64,
}

/// Pseudo-spectral integrating-factor RK4 stepper.
pub struct Integrator {
    grid: GridSpec,
    mode: Mode,
    mu: f64,
    nu: f64,
    dealias: bool,
    nonlinear: bool,
    cfl_limit: f64,
    fft: Fft3,
    k2: Vec<f64>,
    kvec: Vec<[f64; 3]>,
    conj: Vec<usize>,
    keep: Vec<bool>,
    buf: Vec<Complex64>,
}

#[derive(Clone, Copy)]
enum Entry {
    /// `(u⊗u - b⊗b)_ij`, `i <= j`.
    Sym(usize, usize),
    /// `(u⊗b - b⊗u)_ij`, `i < j`.
    Asym(usize, usize),
}

const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const ASYM: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl Integrator {
    pub fn new(grid: GridSpec, mode: Mode, mu: f64, nu: f64) -> Self {
        let n = grid.len();
        let mut k2 = vec![0.0; n];
        let mut kvec = vec![[0.0; 3]; n];
        let keep = vec![false; n];
        let conj = (0..n).map(|idx| grid.conjugate_index(idx)).collect();
        for idx in 0..n {
            let k = grid.wavevector(idx);
            k2[idx] = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            kvec[idx] = k.map(|c| c as f64);
        }
        let mut out = Self {
            grid,
            mode,
            mu,
            nu,
            dealias: true,
            nonlinear: true,
            cfl_limit: 0.5,
            fft: Fft3::new([grid.n(); 3]),
            k2,
            kvec,
            conj,
            keep,
            buf: Vec::new(),
        };
        out.set_dealias(true);
        out
    }

    pub fn set_dealias(&mut self, on: bool) {
        self.dealias = on;
        let kd = self.grid.dealias_kmax();
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            self.keep[idx] = !self.grid.is_nyquist(idx) && (!on || k.iter().all(|c| c.abs() <= kd));
        }
    }

    pub fn set_nonlinear(&mut self, on: bool) {
        self.nonlinear = on;
    }

    pub fn set_cfl_limit(&mut self, limit: f64) {
        self.cfl_limit = limit;
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Largest retained wavenumber component, the `k_max` of the CFL number.
    pub fn cfl_kmax(&self) -> f64 {
        if self.dealias {
            self.grid.dealias_kmax() as f64
        } else {
            self.grid.kmax() as f64
        }
    }

    fn masked(&self, f: &SpectralField) -> SpectralField {
        let mut out = f.clone();
        for c in out.components_mut() {
            for (z, &k) in c.iter_mut().zip(&self.keep) {
                if !k {
                    *z = Complex64::default();
                }
            }
        }
        out
    }

    /// Two Hermitian spectra to two real sample arrays with one FFT.
    fn synth_pair(&mut self, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> = match b {
            Some(b) => a.iter().zip(b).map(|(x, y)| x + I * y).collect(),
            None => a.to_vec(),
        };
        self.fft.inverse(&mut buf);
        (buf.iter().map(|z| z.re).collect(), buf.iter().map(|z| z.im).collect())
    }

    fn to_samples(&mut self, f: &SpectralField) -> [Vec<f64>; 3] {
        let c = f.components();
        let (x, y) = self.synth_pair(&c[0], Some(&c[1]));
        let (z, _) = self.synth_pair(&c[2], None);
        [x, y, z]
    }

    /// Nonlinear tendencies `-P div(u⊗u - b⊗b)` and `-div(u⊗b - b⊗u)` with 2/3 dealiasing.
    pub fn nonlinear(&mut self, u: &SpectralField, b: Option<&SpectralField>) -> Result<Tendency> {
        let um = self.masked(u);
        let us = self.to_samples(&um);
        let bs = match (self.mode, b) {
            (Mode::Mhd, Some(b)) => {
                let bm = self.masked(b);
                Some(self.to_samples(&bm))
            }
            _ => None,
        };
        let n = self.grid.len();
        let mut max2 = 0.0f64;
        let mut finite = true;
        for m in 0..n {
            let su = us[0][m] * us[0][m] + us[1][m] * us[1][m] + us[2][m] * us[2][m];
            finite &= su.is_finite();
            max2 = max2.max(su);
            if let Some(bs) = &bs {
                let sb = bs[0][m] * bs[0][m] + bs[1][m] * bs[1][m] + bs[2][m] * bs[2][m];
                finite &= sb.is_finite();
                max2 = max2.max(sb);
            }
        }
        if !finite {
            return Err(LabError::BlowUp {
                t: f64::NAN,
                what: "non-finite velocity or magnetic field".into(),
            });
        }

        let mut entries: Vec<Entry> = SYM.iter().map(|&(i, j)| Entry::Sym(i, j)).collect();
        if bs.is_some() {
            entries.extend(ASYM.iter().map(|&(i, j)| Entry::Asym(i, j)));
        }
        let value = |e: Entry, m: usize| -> f64 {
            match (e, &bs) {
                (Entry::Sym(i, j), None) => us[i][m] * us[j][m],
                (Entry::Sym(i, j), Some(bs)) => us[i][m] * us[j][m] - bs[i][m] * bs[j][m],
                (Entry::Asym(i, j), Some(bs)) => us[i][m] * bs[j][m] - bs[i][m] * us[j][m],
                (Entry::Asym(..), None) => 0.0,
            }
        };

        let zero = || [vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n]];
        let mut out_u = zero();
        let mut out_b = bs.as_ref().map(|_| zero());
        let norm = 1.0 / n as f64;
        let mut buf = std::mem::take(&mut self.buf);
        buf.resize(n, Complex64::default());
        for pair in entries.chunks(2) {
            let (ea, eb) = (pair[0], pair.get(1).copied());
            for (m, z) in buf.iter_mut().enumerate() {
                *z = Complex64::new(value(ea, m), eb.map_or(0.0, |e| value(e, m)));
            }
            self.fft.forward(&mut buf);
            for idx in 0..n {
                if !self.keep[idx] {
                    continue;
                }
                let zk = buf[idx];
                let zm = buf[self.conj[idx]].conj();
                let ta = (zk + zm) * (0.5 * norm);
                let tb = (zk - zm) * Complex64::new(0.0, -0.5 * norm);
                let k = self.kvec[idx];
                for (e, t) in std::iter::once((ea, ta)).chain(eb.map(|e| (e, tb))) {
                    // Adds -i k_i T_ij to component j for both (i, j) and (j, i).
                    match e {
                        Entry::Sym(i, j) => {
                            out_u[j][idx] += -I * (k[i] * t);
                            if i != j {
                                out_u[i][idx] += -I * (k[j] * t);
                            }
                        }
                        Entry::Asym(i, j) => {
                            let ob = out_b.as_mut().expect("antisymmetric entries only in MHD");
                            ob[j][idx] += -I * (k[i] * t);
                            ob[i][idx] += I * (k[j] * t);
                        }
                    }
                }
            }
        }
        self.buf = buf;
        self.project(&mut out_u);
        if let Some(ob) = out_b.as_mut() {
            self.project(ob);
        }
        let g = self.grid;
        let nu = SpectralField::from_components(g, out_u).expect("shape is the integrator's own");
        let nb = match (self.mode, out_b) {
            (Mode::Mhd, Some(ob)) => Some(SpectralField::from_components(g, ob).expect("shape is the integrator's own")),
            (Mode::Mhd, None) => Some(SpectralField::zeros(g)),
            (Mode::Nse, _) => None,
        };
        Ok(Tendency {
            u: nu,
            b: nb,
            max_speed: max2.sqrt(),
        })
    }

    /// `‖∇f‖₂²` from the integrator's wavenumber table.
    fn gradient_energy(&self, f: &SpectralField) -> f64 {
        let c = f.components();
        let s: f64 = (0..self.grid.len())
            .map(|idx| self.k2[idx] * (c[0][idx].norm_sqr() + c[1][idx].norm_sqr() + c[2][idx].norm_sqr()))
            .sum();
        crate::spectral::TORUS_VOLUME * s
    }

    fn project(&self, c: &mut [Vec<Complex64>; 3]) {
        for idx in 0..self.grid.len() {
            let k2 = self.k2[idx];
            if k2 == 0.0 {
                continue;
            }
            let k = self.kvec[idx];
            let kv = (c[0][idx] * k[0] + c[1][idx] * k[1] + c[2][idx] * k[2]) / k2;
            for (d, &kd) in k.iter().enumerate() {
                c[d][idx] -= kv * kd;
            }
        }
    }

    /// Full tendencies including diffusion.
    pub fn rhs(&mut self, s: &SimState) -> Result<(SpectralField, Option<SpectralField>)> {
        let (mut du, mut db) = if self.nonlinear {
            let t = self.nonlinear(&s.u, s.b.as_ref())?;
            (t.u, t.b)
        } else {
            (SpectralField::zeros(self.grid), s.b.as_ref().map(|_| SpectralField::zeros(self.grid)))
        };
        add_diffusion(&mut du, &s.u, &self.k2, -self.mu);
        if let (Some(db), Some(b)) = (db.as_mut(), s.b.as_ref()) {
            add_diffusion(db, b, &self.k2, -self.nu);
        }
        Ok((du, db))
    }

    /// Nonlinear tendencies, or zeros when the nonlinearity is switched off.
    pub fn nonlinear_terms(&mut self, u: &SpectralField, b: Option<&SpectralField>) -> Result<Tendency> {
        if self.nonlinear {
            self.nonlinear(u, b)
        } else {
            let max_speed = 0.0;
            Ok(Tendency {
                u: SpectralField::zeros(self.grid),
                b: b.map(|_| SpectralField::zeros(self.grid)),
                max_speed,
            })
        }
    }

    /// CFL number of a step of length `dt` from the state's current speed.
    pub fn cfl_number(&mut self, s: &SimState, dt: f64) -> Result<f64> {
        Ok(dt * self.max_speed(s)? * self.cfl_kmax())
    }

    pub fn max_speed(&mut self, s: &SimState) -> Result<f64> {
        let um = self.masked(&s.u);
        let mut m = max_norm(&self.to_samples(&um));
        if let Some(b) = &s.b {
            let bm = self.masked(b);
            m = m.max(max_norm(&self.to_samples(&bm)));
        }
        Ok(m)
    }

    /// One integrating-factor RK4 step; the state is left untouched on error.
    pub fn step(&mut self, s: &mut SimState, dt: f64) -> Result<StepInfo> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(LabError::InvalidParameter(format!("dt must be positive (got {dt})")));
        }
        let eu_h: Vec<f64> = self.k2.iter().map(|k2| (-self.mu * k2 * dt * 0.5).exp()).collect();
        let eb_h: Vec<f64> = self.k2.iter().map(|k2| (-self.nu * k2 * dt * 0.5).exp()).collect();
        let eu: Vec<f64> = eu_h.iter().map(|e| e * e).collect();
        let eb: Vec<f64> = eb_h.iter().map(|e| e * e).collect();

        let u0 = &s.u;
        let b0 = s.b.as_ref();
        let n1 = self.nonlinear_terms(u0, b0)?;
        let cfl = dt * n1.max_speed * self.cfl_kmax();
        if cfl > self.cfl_limit * (1.0 + 1e-12) {
            return Err(LabError::StepRejected {
                cfl,
                limit: self.cfl_limit,
            });
        }
        let h = dt;
        let comb = |terms: &[(&SpectralField, Option<&[f64]>, f64)]| combine(terms);
        let pick = |v: &Option<SpectralField>| v.as_ref().expect("b tendency present for b state").clone();

        let ua = comb(&[(u0, Some(&eu_h), 1.0), (&n1.u, Some(&eu_h), h / 2.0)]);
        let ba = b0.map(|b| comb(&[(b, Some(&eb_h), 1.0), (&pick(&n1.b), Some(&eb_h), h / 2.0)]));
        let n2 = self.nonlinear_terms(&ua, ba.as_ref())?;
        let ub = comb(&[(u0, Some(&eu_h), 1.0), (&n2.u, None, h / 2.0)]);
        let bb = b0.map(|b| comb(&[(b, Some(&eb_h), 1.0), (&pick(&n2.b), None, h / 2.0)]));
        let n3 = self.nonlinear_terms(&ub, bb.as_ref())?;
        let uc = comb(&[(u0, Some(&eu), 1.0), (&n3.u, Some(&eu_h), h)]);
        let bc = b0.map(|b| comb(&[(b, Some(&eb), 1.0), (&pick(&n3.b), Some(&eb_h), h)]));
        let n4 = self.nonlinear_terms(&uc, bc.as_ref())?;

        let mut u1 = comb(&[
            (u0, Some(&eu), 1.0),
            (&n1.u, Some(&eu), h / 6.0),
            (&n2.u, Some(&eu_h), h / 3.0),
            (&n3.u, Some(&eu_h), h / 3.0),
            (&n4.u, None, h / 6.0),
        ]);
        let mut b1 = b0.map(|b| {
            comb(&[
                (b, Some(&eb), 1.0),
                (&pick(&n1.b), Some(&eb), h / 6.0),
                (&pick(&n2.b), Some(&eb_h), h / 3.0),
                (&pick(&n3.b), Some(&eb_h), h / 3.0),
                (&pick(&n4.b), None, h / 6.0),
            ])
        });

        // Dissipation integrals with the stepper's own stage weights.
        let ge = |f: &SpectralField| self.gradient_energy(f);
        let du = h / 6.0 * (ge(u0) + 2.0 * ge(&ua) + 2.0 * ge(&ub) + ge(&uc));
        let dbi = match (b0, &ba, &bb, &bc) {
            (Some(b), Some(ba), Some(bb), Some(bc)) => {
                self.nu * h / 6.0 * (ge(b) + 2.0 * ge(ba) + 2.0 * ge(bb) + ge(bc))
            }
            _ => 0.0,
        };

        self.project(u1.components_mut());
        if let Some(b1) = b1.as_mut() {
            self.project(b1.components_mut());
        }
        let bad = |f: &SpectralField| f.components().iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite());
        if bad(&u1) || b1.as_ref().is_some_and(bad) {
            return Err(LabError::BlowUp {
                t: s.t + dt,
                what: "non-finite coefficients after step".into(),
            });
        }
        s.u = u1;
        s.b = b1;
        s.t += dt;
        Ok(StepInfo {
            dt,
            cfl,
            diss_u: du,
            diss_b: dbi,
        })
    }
}

fn max_norm(c: &[Vec<f64>; 3]) -> f64 {
    (0..c[0].len())
        .map(|m| (c[0][m] * c[0][m] + c[1][m] * c[1][m] + c[2][m] * c[2][m]).sqrt())
        .fold(0.0, f64::max)
}

fn add_diffusion(out: &mut SpectralField, f: &SpectralField, k2: &[f64], coef: f64) {
    let src = f.components();
    for (c, oc) in out.components_mut().iter_mut().enumerate() {
        for (idx, z) in oc.iter_mut().enumerate() {
            *z += src[c][idx] * (coef * k2[idx]);
        }
    }
}

/// `sum_t a_t sym_t(k) f_t(k)`.
fn combine(terms: &[(&SpectralField, Option<&[f64]>, f64)]) -> SpectralField {
    let g = terms[0].0.grid();
    let mut out = SpectralField::zeros(g);
    let oc = out.components_mut();
    for &(f, sym, a) in terms {
        let fc = f.components();
        for c in 0..3 {
            match sym {
                Some(e) => {
                    for (idx, z) in oc[c].iter_mut().enumerate() {
                        *z += fc[c][idx] * (a * e[idx]);
                    }
                }
                None => {
                    for (z, v) in oc[c].iter_mut().zip(&fc[c]) {
                        *z += v * a;
                    }
                }
            }
        }
    }
    out
}
