//! Lacunary-shell initial data built from integer frequency blocks.
//!
//! Shell `q_j` carries three boxes `L`, `M`, `N = L + M` and their negatives.
//! `psi1` lives on `L ∪ N` (and duals), `psi2` on `M`; the velocity is
//! `sum_j lambda_{q_j}^{-theta} (psi1 + psi2)` and, for MHD, the magnetic field is
//! `sum_j lambda_{q_j}^{-gamma} psi2`.

mod block_field;
mod blocks;
mod lemma;
mod params;

pub use block_field::{BlockField, BlockPiece};
pub use blocks::{block_l, block_m, block_set, on_plateau, BlockSet, IntBox};
pub use lemma::{block_family, family_norm_table, piece_norms, verify_lemma_u0, NormOptions, NormRow, NormTable, ShellPiece};
pub use params::{lacunary_sequence, ConstructionParams, Mode, MAX_SHELL};

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::littlewood_paley::{lambda, project_shell};
use crate::spectral::{GridSpec, SpectralField};

const E1: [f64; 3] = [1.0, 0.0, 0.0];
const E2: [f64; 3] = [0.0, 1.0, 0.0];
const E2_MINUS_E1: [f64; 3] = [-1.0, 1.0, 0.0];

fn piece(bx: IntBox, amp: Complex64, dir: [f64; 3]) -> BlockPiece {
    BlockPiece { bx, amp, dir }
}

/// `(psi1, psi2)` for one block set.
pub fn synthesize_psi(b: &BlockSet) -> Result<(BlockField, BlockField)> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let psi1 = BlockField::new(vec![
        piece(b.l, one, E2),
        piece(b.l_star(), one, E2),
        piece(b.n, i, E2_MINUS_E1),
        piece(b.n_star(), -i, E2_MINUS_E1),
    ]);
    let psi2 = BlockField::new(vec![piece(b.m, one, E1), piece(b.m_star(), one, E1)]);
    if !psi1.pieces_disjoint() || !psi2.pieces_disjoint() {
        return Err(LabError::ConstructionIntegrity("overlapping block membership".into()));
    }
    Ok((psi1, psi2))
}

/// Pieces attached to one shell of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellData {
    pub j: usize,
    pub q: i32,
    pub blocks: BlockSet,
    pub psi1: BlockField,
    pub psi2: BlockField,
    /// `U_{q_j} = lambda^{-theta} psi1`.
    pub u_top: BlockField,
    /// `U_{q_j - 1} = lambda^{-theta} psi2` when present in the velocity.
    pub u_low: BlockField,
    /// `B_{q_j} = lambda^{-gamma} psi2` (MHD only).
    pub b: BlockField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub params: ConstructionParams,
    pub seq: Vec<i32>,
    pub shells: Vec<ShellData>,
    pub u0: BlockField,
    pub b0: Option<BlockField>,
}

/// Dense materialisation of the initial data.
#[derive(Clone, Debug, PartialEq)]
pub struct GridData {
    pub u0: SpectralField,
    pub b0: Option<SpectralField>,
}

pub fn build_blocks(j: usize, q: i32, c: f64) -> Result<BlockSet> {
    block_set(j, q, c)
}

/// Builds the data symbolically and checks its structural invariants.
pub fn build_initial(p: &ConstructionParams) -> Result<InitialData> {
    let seq = lacunary_sequence(p)?;
    let gamma = match p.mode {
        Mode::Mhd => Some(p.gamma_or_err()?),
        Mode::Nse => None,
    };
    let mut shells = Vec::with_capacity(seq.len());
    for (j, &q) in seq.iter().enumerate() {
        let blocks = build_blocks(j, q, p.c)?;
        let (psi1, psi2) = synthesize_psi(&blocks)?;
        let wt = lambda(q).powf(-p.theta);
        let u_top = psi1.scaled(wt);
        let with_low = p.mode == Mode::Nse || p.mhd_velocity_includes_psi2;
        let u_low = if with_low { psi2.scaled(wt) } else { BlockField::default() };
        let b = match gamma {
            Some(g) => psi2.scaled(lambda(q).powf(-g)),
            None => BlockField::default(),
        };
        shells.push(ShellData {
            j,
            q,
            blocks,
            psi1,
            psi2,
            u_top,
            u_low,
            b,
        });
    }
    let u0 = BlockField::sum(shells.iter().flat_map(|s| [&s.u_top, &s.u_low]));
    let b0 = gamma.map(|_| BlockField::sum(shells.iter().map(|s| &s.b)));
    let data = InitialData {
        params: p.clone(),
        seq,
        shells,
        u0,
        b0,
    };
    data.check_structure()?;
    Ok(data)
}

fn phi_on_box(bx: &IntBox, q: i32) -> Option<f64> {
    // Returns the constant value of the shell symbol on the box when it is constant.
    let (lo, hi) = bx.radius2_range();
    let l = (1i128 << q) as f64;
    let (rlo, rhi) = ((lo as f64).sqrt(), (hi as f64).sqrt());
    if on_plateau(bx, q) {
        Some(1.0)
    } else if rhi <= 0.75 * l || rlo >= 2.0 * l {
        Some(0.0)
    } else {
        None
    }
}

impl InitialData {
    pub fn fields(&self) -> Vec<&BlockField> {
        let mut v = vec![&self.u0];
        if let Some(b) = &self.b0 {
            v.push(b);
        }
        v
    }

    fn check_structure(&self) -> Result<()> {
        let all: Vec<IntBox> = self
            .shells
            .iter()
            .flat_map(|s| s.blocks.all_boxes().map(|(_, b)| b))
            .collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.intersects(b) {
                    return Err(LabError::ConstructionIntegrity(
                        "supports of distinct blocks intersect".into(),
                    ));
                }
            }
        }
        for f in self.fields() {
            for p in &f.pieces {
                let partner = f.pieces.iter().find(|o| {
                    o.bx == p.bx.neg() && o.dir == p.dir && o.amp == p.amp.conj()
                });
                if partner.is_none() {
                    return Err(LabError::ConstructionIntegrity(
                        "piece without a Hermitian partner".into(),
                    ));
                }
                for k in corners(&p.bx) {
                    let kf = k.map(|c| c as f64);
                    let s = p.symbol(kf);
                    let kn = (kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2]).sqrt();
                    let dv = (kf[0] * s[0] + kf[1] * s[1] + kf[2] * s[2]).abs();
                    if dv > 1e-12 * kn.max(1.0) {
                        return Err(LabError::ConstructionIntegrity(format!(
                            "symbol not solenoidal at {k:?}"
                        )));
                    }
                }
            }
        }
        // Shell identities: on every piece of u0 the symbols of shells q_j and q_j + 1
        // must be constant, equal to 1 exactly on the U_{q_j} pieces.
        for s in &self.shells {
            for p in &self.u0.pieces {
                let top = s.u_top.pieces.iter().any(|t| t.bx == p.bx);
                match phi_on_box(&p.bx, s.q) {
                    Some(v) if v == if top { 1.0 } else { 0.0 } => {}
                    _ => {
                        return Err(LabError::ConstructionIntegrity(format!(
                            "shell projection onto q={} is not an exact restriction",
                            s.q
                        )))
                    }
                }
                if phi_on_box(&p.bx, s.q + 1) != Some(0.0) {
                    return Err(LabError::ConstructionIntegrity(format!(
                        "projection onto q={} does not vanish",
                        s.q + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest |k_i| over all supports.
    pub fn extent(&self) -> i64 {
        use crate::spectral::ModeSource;
        self.fields()
            .iter()
            .flat_map(|f| f.extent())
            .max()
            .unwrap_or(0)
    }

    /// Materialises the data on `grid` and re-verifies the invariants numerically.
    pub fn on_grid(&self, grid: GridSpec) -> Result<GridData> {
        let needed = self.extent();
        if needed > grid.kmax() {
            return Err(LabError::Resolution {
                needed,
                available: grid.kmax(),
            });
        }
        let dense = |f: &BlockField| -> Result<SpectralField> {
            f.to_sparse(grid.len() as u128)?.to_dense(grid)
        };
        let u0 = dense(&self.u0)?;
        let b0 = self.b0.as_ref().map(dense).transpose()?;
        for f in std::iter::once(&u0).chain(b0.iter()) {
            let (d, at) = f.hermitian_defect();
            if d != 0.0 {
                return Err(LabError::SymmetryViolation { at, defect: d });
            }
            let r = f.divergence_residual();
            if r > 1e-12 {
                return Err(LabError::ConstructionIntegrity(format!(
                    "divergence residual {r:.3e} exceeds 1e-12"
                )));
            }
        }
        for s in &self.shells {
            let want = dense(&s.u_top)?;
            let got = project_shell(&u0, s.q)?;
            let err = got.sub(&want)?.max_abs();
            if err > 1e-12 * want.max_abs() {
                return Err(LabError::ConstructionIntegrity(format!(
                    "shell identity at q={} fails by {err:.3e}",
                    s.q
                )));
            }
            let above = project_shell(&u0, s.q + 1)?.max_abs();
            if above > 1e-12 * want.max_abs() {
                return Err(LabError::ConstructionIntegrity(format!(
                    "projection onto q={} is {above:.3e}, not zero",
                    s.q + 1
                )));
            }
        }
        Ok(GridData { u0, b0 })
    }
}

fn corners(b: &IntBox) -> impl Iterator<Item = [i64; 3]> + '_ {
    (0..8).map(move |m| [0, 1, 2].map(|d| if m >> d & 1 == 1 { b.hi[d] } else { b.lo[d] }))
}
