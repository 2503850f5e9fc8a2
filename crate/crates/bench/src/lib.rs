//! Problem-instance files, synthetic scenes, and a benchmark harness for
//! `magsac-core` estimators.

pub mod benchmark;
pub mod format;
pub mod instance;
pub mod method;
pub mod synth;

pub use benchmark::{run_benchmark, BenchmarkOutput, BenchmarkRecord, SummaryRow};
pub use instance::{parse_instance, parse_str, serialize, InstanceError, ProblemInstance};
pub use method::{MethodParseError, MethodSpec};
pub use synth::{generate_synthetic, Layout, SynthError, SynthSpec};
