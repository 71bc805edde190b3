//! Parameter sweeps, figure presets and result files.

mod engine;
mod io;
mod optimize;
mod presets;
mod spec;

pub use engine::{run_sweep, BoundaryHit, Failure, Metadata, RunOptions, SeriesInfo, SweepResult, Tolerances};
pub use io::{
    csv_string, format_value, json_string, metadata_string, read_csv, read_json, sidecar_path, write_file,
    write_result, Format,
};
pub use optimize::{g2_at, optimize_probe_detuning, Optimum, MAX_GOLDEN_ITERATIONS, RESOLUTION_OVER_G, SCAN_POINTS};
pub use presets::{
    all_presets, figure_preset, linspace, logspace, CESIUM_BRACKET, FABRY_PEROT_BRACKET, FABRY_PEROT_EPS_GHZ, FABRY_PEROT_G_GHZ,
    FABRY_PEROT_KAPPA_GHZ, FIGURE_IDS, GRID_POINTS, G_GHZ, TWO_LEVEL_BRACKET,
};
pub use spec::{Axis, Column, Minimize, Observable, Param, Series, SweepSpec};
