//! The experiment matrix: comparison tables, the absorption-strength scaling
//! study and the reflection-coefficient check.

mod checks;
mod published;
mod studies;
mod table;

pub use checks::{
    check_mu_scaling, check_reflection, check_table, within_factor, CheckLine,
};
pub use published::published_value;
pub use studies::{
    entry_step, estimate_carrier, fit_slope, mu_scaling_config, mu_scaling_study, probe_error,
    probe_strip, reflection_config, reflection_vs_formula, Carrier, MuPoint, MuScaling,
    ReflectionCheck, SlopeFit, MAX_BANDWIDTH, SATURATION_FLOOR,
};
pub use table::{run_table, ColumnGroup, RunOptions, TableCell, TableRun, TableSpec, DEFAULT_SEED};
