//! Scenario files, CSV writers and run records.

mod csv;
mod record;
mod scenario;

pub use csv::{format_float, sweep_csv_string, trajectory_csv_string, write_sweep_csv, write_trajectory_csv};
pub use record::{digest_hex, RunRecord};
pub use scenario::{
    parse_scenario, AttributeEntry, ConsumerEntry, DiversitySection, DynamicsSection, FromDiversity,
    GameSection, GridSpec, Scenario, SchumpeterSection, SweepSection, TechnologyEntry,
};
