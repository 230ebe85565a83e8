use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use super::config::Config;
use super::geojson::{read_network, write_network};
use super::pipeline::run_reconstruct;
use super::synth::run_synth;
use crate::error::{Error, Result};
use crate::eval::{evaluate, table_text};
use crate::material::{
    classify_network, load_model, save_model, training_samples, train_svm, write_samples, SurfaceClass,
};
use crate::netgraph::Material;
use crate::raster::{load_image, load_lulc, load_mask, write_image, write_mask};

#[derive(Debug, Parser)]
#[command(name = "roadnet", version, about = "Road network extraction from segmentation masks")]
pub struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic scene: mask, imagery and ground-truth network.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Vectorize a segmentation mask into a road network.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mask: PathBuf,
        /// Defaults to the mask path with a `.pgw` or `.wld` extension.
        #[arg(long)]
        worldfile: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label each road of a network with its surface material.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        image: PathBuf,
        /// World file of the image.
        #[arg(long)]
        worldfile: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Land-cover labels, with a sibling world file.
        #[arg(long)]
        lulc: Option<PathBuf>,
        /// Land-cover legend; defaults to the labels path with a `.json` extension.
        #[arg(long)]
        legend: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the surface classifier on a network with known materials.
    TrainMaterial {
        #[command(flatten)]
        common: Common,
        /// Network whose edges carry materials; unknown edges are unlabeled.
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        worldfile: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the extracted samples as CSV.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Model output (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a network with ground truth.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Buffer radius, meters.
        #[arg(long)]
        buffer: Option<f64>,
        /// JSON report output; the summary table always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    Input = 1,
    Stage = 2,
    Config = 3,
}

impl ExitCode {
    pub fn of(e: &Error) -> ExitCode {
        match e {
            Error::Config(_) => ExitCode::Config,
            Error::Io { .. }
            | Error::Image(_)
            | Error::WorldFile(_)
            | Error::LabelOutOfRange { .. }
            | Error::Parse { .. }
            | Error::Dimension { .. } => ExitCode::Input,
            _ => ExitCode::Stage,
        }
    }
}

/// Parse `args` (program name first), run, and report errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Config } else { ExitCode::Success };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(cli.command) {
        Ok(()) => ExitCode::Success,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::of(&e)
        }
    }
}

fn load_config(c: &Common) -> Result<Config> {
    match &c.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

/// Sibling world file of a raster: `.pgw` for PNG, `.wld` otherwise, or
/// whichever exists.
fn world_file_for(raster: &Path, given: Option<&Path>) -> PathBuf {
    if let Some(p) = given {
        return p.to_path_buf();
    }
    let ext = raster.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let preferred = if ext == "png" { "pgw" } else { "wld" };
    let first = raster.with_extension(preferred);
    if first.exists() {
        first
    } else {
        let wld = raster.with_extension("wld");
        if wld.exists() {
            wld
        } else {
            first
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth { common, seed, out } => {
            let cfg = load_config(&common)?;
            let scene = run_synth(seed, &cfg.synth)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            write_mask(&scene.mask, out.join("mask.png"), out.join("mask.pgw"))?;
            write_image(&scene.image, out.join("image.png"), out.join("image.pgw"))?;
            write_network(&scene.ground_truth, out.join("truth.geojson"))?;
            info!("wrote scene {seed} to {}", out.display());
        }
        Command::Reconstruct {
            common,
            mask,
            worldfile,
            out,
        } => {
            let cfg = load_config(&common)?;
            let m = load_mask(&mask, world_file_for(&mask, worldfile.as_deref()))?;
            let g = run_reconstruct(&m, &cfg)?;
            write_network(&g, &out)?;
        }
        Command::Classify {
            common,
            network,
            image,
            worldfile,
            model,
            lulc,
            legend,
            out,
        } => {
            let cfg = load_config(&common)?;
            let mut g = read_network(&network)?;
            let img = load_image(&image, world_file_for(&image, worldfile.as_deref()))?;
            let m = load_model(&model)?;
            let lc = match &lulc {
                Some(p) => {
                    let legend = legend.clone().unwrap_or_else(|| p.with_extension("json"));
                    Some(load_lulc(p, world_file_for(p, None), legend)?)
                }
                None => None,
            };
            let s = classify_network(&mut g, &img, &m, lc.as_ref(), &cfg.material)?;
            println!(
                "processed {}  gravel {}  sand {}  unknown {}",
                s.processed, s.gravel, s.sand, s.unknown
            );
            write_network(&g, &out)?;
        }
        Command::TrainMaterial {
            common,
            gt,
            image,
            worldfile,
            seed,
            samples,
            out,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(s) = seed {
                cfg.svm.seed = s;
            }
            let g = read_network(&gt)?;
            let img = load_image(&image, world_file_for(&image, worldfile.as_deref()))?;
            let labeled = training_samples(&g, &img, cfg.material.buffer)?;
            if let Some(p) = &samples {
                write_samples(&labeled, p)?;
            }
            let unlabeled = if cfg.svm.iterations > 1 {
                g.edges()
                    .filter(|(_, e)| e.attrs.material == Material::Unknown)
                    .filter_map(|(_, e)| crate::material::extract_features(&img, &e.geometry, cfg.material.buffer).ok())
                    .collect()
            } else {
                Vec::new()
            };
            let pairs: Vec<_> = labeled.into_iter().map(|s| (s.features, s.label)).collect();
            let n_proc = pairs.iter().filter(|p| p.1 == SurfaceClass::Processed).count();
            info!("training on {} processed, {} unprocessed segments", n_proc, pairs.len() - n_proc);
            let model = train_svm(&pairs, &unlabeled, &cfg.svm)?;
            save_model(&model, &out)?;
        }
        Command::Eval {
            common,
            network,
            gt,
            buffer,
            out,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(b) = buffer {
                cfg.eval.buffer = b;
                cfg.validate()?;
            }
            let pred = read_network(&network)?;
            let truth = read_network(&gt)?;
            let report = evaluate(&pred, &truth, &cfg.eval)?;
            print!("{}", table_text(&[(network.display().to_string(), report.row())]));
            println!(
                "buffer {} m: TP {}  FP {}  FN {}",
                report.buffer_radius, report.true_positives, report.false_positives, report.false_negatives
            );
            if let Some(p) = &out {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(p, text).map_err(|e| Error::io(p, e))?;
            }
        }
    }
    Ok(())
}
