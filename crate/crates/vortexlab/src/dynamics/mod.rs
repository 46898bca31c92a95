//! Self-similar perturbation dynamics on a periodic box.

pub mod diagnostics;
pub mod evolve;
pub mod experiment;
pub mod fft;
pub mod field;
pub mod weak;

pub use diagnostics::{
    fit_line, growth_rate_fit, holder_diagnostic, linear_gap, mode_phase_series, mode_projection, nonradial_fraction,
    GapPoint, HolderReport, LineFit, PolarQuadrature,
};
pub use evolve::{biot_savart, evolve, evolve_with, step, EvolutionConfig, NormRecord, Stepper, Trajectory, Variant};
pub use experiment::{
    ansatz_weak_residual, mode_field, nonuniqueness_experiment, transport_bound, AnsatzCheck, AnsatzReport,
    AssembledSolution, ExperimentReport, LadderRow, NonuniqConfig, RadialSolution, TimePoint, TransportCheck,
    TransportReport, TransportRow,
};
pub use fft::Spectral2D;
pub use field::{Field2D, FieldKind};
pub use weak::{weak_residual, weak_residual_analytic, AnalyticQuadrature, TestFunction, WeakResidual, WeakSnapshot, WeakSolution};
