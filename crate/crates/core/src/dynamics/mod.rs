//! Generators, trajectories, RK4 propagation and closed-form models.

mod analytic;
mod generator;
mod propagate;
mod trajectory;

pub use analytic::{
    analytic_trajectory, analytic_trajectory_by_name, dephasing_generator, spontaneous_emission_generator,
    uniform_grid, AnalyticModel, MIN_ANALYTIC_GRID, QUDIT4_ENERGIES, QUDIT4_WEIGHTS,
};
pub use generator::{
    adjoint_rhs, lindblad_rhs, GeneratorSpec, Hamiltonian, HamiltonianFn, Picture, SuperOperator,
    HAMILTONIAN_TOLERANCE,
};
pub use propagate::{propagate, CONVERGENCE_TOLERANCE, MAX_STEPS, MIN_BASE_STEPS};
pub use trajectory::{Break, Source, Trajectory, STATE_TOLERANCE};
