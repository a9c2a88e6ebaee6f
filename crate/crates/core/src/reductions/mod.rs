pub mod experiment;
pub mod monitor;
pub mod transducer;
pub mod wtt;

pub use experiment::{theorem12_experiment, UseBoundedReport};
pub use monitor::QueryMonitor;
pub use transducer::{transduce, SwitchEvent, TransduceReport};
pub use wtt::{apply_wtt, Program, WttImage, WttMachine, WttOutcome};
