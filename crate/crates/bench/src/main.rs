use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use magsac_bench::benchmark::{
    configure, estimate, run_benchmark, summary_text, write_cdf_csv, write_records_csv, write_summary_csv,
    write_timing_csv,
};
use magsac_bench::format::format_g;
use magsac_bench::instance::{parse_instance, write_instance};
use magsac_bench::method::{parse_sampler, parse_scorer, MethodSpec};
use magsac_bench::synth::{generate_synthetic, Layout, SynthSpec};
use magsac_core::metrics::is_failure;
use magsac_core::{EngineError, ImageSizes, ModelKind};

#[derive(Parser)]
#[command(
    name = "magsac",
    version,
    about = "Robust homography and fundamental-matrix estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    H,
    F,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::H => ModelKind::Homography,
            KindArg::F => ModelKind::FundamentalMatrix,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Global,
    Localized,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a model from an instance file.
    Estimate {
        file: PathBuf,
        /// Model kind; defaults to the kind of the file's ground truth.
        #[arg(long)]
        model: Option<KindArg>,
        #[arg(long, default_value = "magsac++")]
        scorer: String,
        #[arg(long, default_value = "uniform")]
        sampler: String,
        /// Upper bound of the noise scale, in pixels.
        #[arg(long, conflicts_with = "threshold")]
        sigma_max: Option<f64>,
        /// Inlier threshold kσ_max, in pixels.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        /// Termination relaxation; 0.1 for NAPSAC samplers, 0 otherwise.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic instance with ground truth.
    Synth {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        inlier_ratio: f64,
        /// Gaussian noise on inlier coordinates in the second image, in pixels.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, value_enum, default_value = "global")]
        layout: LayoutArg,
        #[arg(long, default_value_t = 1000.0)]
        width: f64,
        #[arg(long, default_value_t = 1000.0)]
        height: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run methods over every instance in a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated `scorer:sampler[:key=value]` strings.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "magsac++:pnapsac,magsac++:uniform,msac:uniform"
        )]
        methods: Vec<String>,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Outputs go to <prefix>_records.csv, _timing.csv, _cdf.csv,
        /// _summary.csv and _summary.txt.
        #[arg(long)]
        out_prefix: PathBuf,
        /// Kind for instances without a ground-truth model section.
        #[arg(long)]
        model: Option<KindArg>,
    },
}

enum Failure {
    NoModel(String),
    Input(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate {
            file,
            model,
            scorer,
            sampler,
            sigma_max,
            threshold,
            confidence,
            gamma,
            max_iterations,
            seed,
        } => {
            let mut id = format!("{scorer}:{sampler}:conf={confidence}:cap={max_iterations}");
            if let Some(s) = sigma_max {
                id.push_str(&format!(":sigma={s}"));
            }
            if let Some(t) = threshold {
                id.push_str(&format!(":threshold={t}"));
            }
            if let Some(g) = gamma {
                id.push_str(&format!(":gamma={g}"));
            }
            run_estimate(&file, model, &id, &scorer, &sampler, seed)
        }
        Command::Synth {
            kind,
            n,
            inlier_ratio,
            noise,
            layout,
            width,
            height,
            seed,
            out,
        } => {
            let spec = SynthSpec {
                kind: kind.into(),
                n_points: n,
                inlier_ratio,
                noise_sigma: noise,
                layout: match layout {
                    LayoutArg::Global => Layout::Global,
                    LayoutArg::Localized => Layout::Localized,
                },
                sizes: ImageSizes::square(width, height),
                seed,
            };
            run_synth(&spec, &out)
        }
        Command::Bench {
            dir,
            methods,
            repeats,
            seed,
            out_prefix,
            model,
        } => run_bench(&dir, &methods, repeats, seed, &out_prefix, model),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoModel(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn run_estimate(
    file: &Path,
    model: Option<KindArg>,
    method_id: &str,
    scorer: &str,
    sampler: &str,
    seed: u64,
) -> Result<(), Failure> {
    parse_scorer(scorer).map_err(input("--scorer"))?;
    parse_sampler(sampler).map_err(input("--sampler"))?;
    let method: MethodSpec = method_id.parse().map_err(input("method"))?;
    let mut instance = parse_instance(file).map_err(input(&file.display().to_string()))?;
    if let Some(kind) = model {
        instance.kind = Some(kind.into());
    }
    let Some(config) = configure(&method, &instance, seed) else {
        return Err(Failure::Input("model kind unknown; pass --model h|f".to_owned()));
    };
    let report = match estimate(&instance, &config) {
        Ok(r) => r,
        Err(EngineError::NoModelFound) => return Err(Failure::NoModel("no model found".to_owned())),
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    let m = report.model.matrix();
    println!("model:");
    for r in 0..3 {
        println!(
            "  {} {} {}",
            format_g(m[(r, 0)]),
            format_g(m[(r, 1)]),
            format_g(m[(r, 2)])
        );
    }
    println!("quality: {}", format_g(report.quality));
    println!("inliers: {} / {}", report.inlier_count, instance.points.len());
    println!("iterations: {}", report.iterations);
    println!("degenerate samples: {}", report.degenerate_samples);
    println!("wall time ms: {}", format_g(report.wall_time.as_secs_f64() * 1e3));
    if report.low_confidence {
        println!("low confidence: inlier ratio below 0.1");
    }
    if let Some(truth) = &instance.truth {
        if let Ok(error) = truth.error_of(&report.model, &instance.points) {
            println!("error px: {}", format_g(error));
            println!("failure: {}", is_failure(error, &instance.sizes));
        }
    }
    Ok(())
}

fn run_synth(spec: &SynthSpec, out: &Path) -> Result<(), Failure> {
    let mut instance = generate_synthetic(spec).map_err(input("synth"))?;
    if let Some(stem) = out.file_stem() {
        instance.id = stem.to_string_lossy().into_owned();
    }
    write_instance(out, &instance).map_err(input(&out.display().to_string()))?;
    Ok(())
}

fn run_bench(
    dir: &Path,
    methods: &[String],
    repeats: usize,
    seed: u64,
    prefix: &Path,
    model: Option<KindArg>,
) -> Result<(), Failure> {
    let methods: Vec<MethodSpec> = methods
        .iter()
        .map(|m| m.parse().map_err(input("--methods")))
        .collect::<Result<_, _>>()?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(input(&dir.display().to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut instances = Vec::with_capacity(paths.len());
    for path in &paths {
        let mut instance = parse_instance(path).map_err(input(&path.display().to_string()))?;
        if instance.kind.is_none() {
            instance.kind = model.map(Into::into);
        }
        instances.push(instance);
    }
    let output = run_benchmark(&instances, &methods, repeats, seed).map_err(input("bench"))?;

    let target = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    let create = |suffix: &str| {
        let path = target(suffix);
        fs::File::create(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    };
    let csv_err = |e: csv::Error| Failure::Input(e.to_string());
    write_records_csv(&output.records, create("_records.csv")?).map_err(csv_err)?;
    write_timing_csv(&output.records, create("_timing.csv")?).map_err(csv_err)?;
    write_cdf_csv(&output.cdf, create("_cdf.csv")?).map_err(csv_err)?;
    write_summary_csv(&output.summary, create("_summary.csv")?).map_err(csv_err)?;
    let text = summary_text(&output.summary);
    let path = target("_summary.txt");
    fs::write(&path, &text).map_err(input(&path.display().to_string()))?;
    print!("{text}");
    Ok(())
}
