use crate::construction::{GridData, Mode};
use crate::error::{LabError, Result};
use crate::spectral::{GridSpec, SpectralField};

/// Invariant tolerance for realness and solenoidality of accepted states.
pub const STATE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub mode: Mode,
    pub grid: GridSpec,
    pub u: SpectralField,
    /// `None` in NSE mode.
    pub b: Option<SpectralField>,
    pub t: f64,
    pub mu: f64,
    pub nu: f64,
}

impl SimState {
    pub fn new(mode: Mode, u: SpectralField, b: Option<SpectralField>, mu: f64, nu: f64) -> Result<Self> {
        let grid = u.grid();
        let b = match (mode, b) {
            (Mode::Nse, Some(b)) if b.max_abs() != 0.0 => {
                return Err(LabError::InvalidParameter("NSE state with nonzero magnetic field".into()))
            }
            (Mode::Nse, _) => None,
            (Mode::Mhd, b) => Some(b.unwrap_or_else(|| SpectralField::zeros(grid))),
        };
        let s = Self { mode, grid, u, b, t: 0.0, mu, nu };
        s.check()?;
        Ok(s)
    }

    pub fn from_data(mode: Mode, d: &GridData, mu: f64, nu: f64) -> Result<Self> {
        Self::new(mode, d.u0.clone(), d.b0.clone(), mu, nu)
    }

    pub fn fields(&self) -> impl Iterator<Item = &SpectralField> {
        std::iter::once(&self.u).chain(self.b.iter())
    }

    pub fn check(&self) -> Result<()> {
        for f in self.fields() {
            if f.grid() != self.grid {
                return Err(LabError::GridMismatch);
            }
            let (defect, at) = f.hermitian_defect();
            if defect > STATE_TOLERANCE * f.max_abs().max(1.0) {
                return Err(LabError::SymmetryViolation { at, defect });
            }
            let div = f.divergence_residual();
            if div > STATE_TOLERANCE {
                return Err(LabError::InvalidParameter(format!(
                    "field not solenoidal (residual {div:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn energy_u(&self) -> f64 {
        self.u.energy()
    }

    pub fn energy_b(&self) -> f64 {
        self.b.as_ref().map_or(0.0, |b| b.energy())
    }
}
