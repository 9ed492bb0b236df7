//! Pseudo-spectral Navier-Stokes / MHD integrator with shell diagnostics.

mod config;
mod diagnostics;
mod integrator;
mod run;
mod state;

pub use config::{BesovSpec, SolverConfig, TimeStep};
pub use diagnostics::{
    besov_distance, energy_balance_residual, shell_dissipation, shell_energy, shell_production,
    shell_productions, Record, ShellRecord, SimHistory,
};
pub use integrator::{Integrator, StepInfo, Tendency};
pub use run::{choose_dt, make_integrator, run, taylor_green, Reference, RunOutput, RunSummary};
pub use state::{SimState, STATE_TOLERANCE};
