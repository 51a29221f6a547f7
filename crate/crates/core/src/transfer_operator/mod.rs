//! Transfer operators of the Farey map and the asymptotics of `λ(Cₙ)`.

mod checkpoint;
mod grid;
mod induced;
mod monotone;
mod series;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use grid::{dual_apply, pf_apply, Basis, DensityGrid, FareyOperator};
pub use induced::{lambda_induced, InducedEngine};
pub use monotone::{monotone_class_check, MonotoneReport, Violation, ViolationKind, GRID_SLACK};
pub use series::{
    cesaro_series, deviation_strictly_decreasing, lambda_operator, lambda_operator_with, return_sequence, run_lambda,
    trend_rows, wandering_rate, AsymptoticSeries, CesaroSeries, Engine, GridEngine, LambdaSample, Law, OperatorConfig,
    RunOptions, Sampling, TrendRow, DEFAULT_GRID,
};
