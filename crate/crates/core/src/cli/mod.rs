//! Configuration, GeoJSON interchange, synthetic scenes, the reconstruction
//! pipeline and the command-line front end.

mod commands;
mod config;
mod geojson;
mod pipeline;
mod synth;

pub use commands::{main_with_args, Cli, Command, ExitCode};
pub use config::{Config, DangleConfig, JunctionConfig, LaneConfig, LaneOffset, LoopConfig, SimplifyConfig};
pub use geojson::{from_geojson_str, read_network, to_geojson_string, write_network};
pub use pipeline::run_reconstruct;
pub use synth::{run_synth, SynthParams, SynthScene};
