//! Mode families, partitions, supervisor configuration, disturbance norms
//! and switch logs.

pub mod config;
pub mod family;
pub mod norm;
pub mod partition;
pub mod switchlog;

pub use config::{default_chi, in_switch_band, validate_config, DwellTime, SupervisorConfig, Violation};
pub use family::{euclidean_norm, LinearFamily, ModeFamily};
pub use norm::{
    s_norm, ClassK, Disturbance, FnDisturbance, GeneralizedNormParams, NoDisturbance, SNormAccumulator,
    SineTerm, Sinusoids,
};
pub use partition::{interval_index, Partition};
pub use switchlog::{average_dwell, count_switches, SwitchEvent, SwitchLog};
