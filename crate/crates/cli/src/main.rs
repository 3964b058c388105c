mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use afsmr_core::benchmark::{
    emit_report, expand_sequences, forward_warp, image_center, load_dataset, run_benchmark,
    summary_path,
};
use afsmr_core::{kernel_warp, resample_mesh, AffineTransform, Image, MeshSampleSet, Method};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use config::{CliConfig, FileConfig};

#[derive(Debug, Parser)]
#[command(name = "afsmr", version, about = "Mesh-to-grid resampling and warp benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct one grid from a mesh CSV or from a warped image.
    Resample(ResampleArgs),
    /// Run warp sequences over a dataset and write a CSV/JSON report.
    Benchmark(BenchmarkArgs),
}

/// Model and runtime settings shared by all commands.
#[derive(Debug, Args)]
struct ModelArgs {
    /// Block edge length in pixels.
    #[arg(long)]
    block: Option<usize>,
    /// Support ring width around each block.
    #[arg(long)]
    support: Option<usize>,
    /// Iteration budget per block.
    #[arg(long)]
    iterations: Option<usize>,
    /// Stop once a step reduces the weighted energy by less than this.
    #[arg(long)]
    min_gain: Option<f64>,
    /// Spatial weighting base.
    #[arg(long)]
    rho: Option<f64>,
    /// Spectral weighting base (AFSMR).
    #[arg(long)]
    sigma: Option<f64>,
    /// Key-point attenuation (FSMR).
    #[arg(long)]
    alpha: Option<f64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// TOML file with any of the flag names as keys. Flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Debug, Args)]
struct ResampleArgs {
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// Mesh CSV with header `x,y,value`.
    #[arg(long, conflicts_with = "image", requires_all = ["width", "height"])]
    mesh: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Grid image to warp and reconstruct.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Warp about the image center: `identity`, `rot<deg>`, `zoom<factor>`
    /// or `affine:a,b,c,d` (row-major matrix).
    #[arg(long, default_value = "identity", requires = "image")]
    transform: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Directory of PGM/PNG images.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Comma list of zoom15, affine4, identity, rot<deg>, rotation-sweep.
    #[arg(long)]
    sequences: Option<String>,
    /// Comma list of methods.
    #[arg(long, value_parser = parse_method_list)]
    methods: Option<String>,
    /// Border excluded from PSNR and SSIM.
    #[arg(long)]
    crop: Option<usize>,
    /// CSV report path; the JSON summary goes next to it.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|_| {
        format!("expected one of {}", Method::ALL.map(Method::name).join(", "))
    })
}

fn parse_method_list(s: &str) -> Result<String, String> {
    for m in s.split(',').map(str::trim).filter(|m| !m.is_empty()) {
        parse_method(m).map_err(|e| format!("`{m}`: {e}"))?;
    }
    Ok(s.to_string())
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<afsmr_core::Error> for Failure {
    fn from(e: afsmr_core::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn parse_transform(spec: &str, center: [f64; 2]) -> Result<AffineTransform, Failure> {
    let s = spec.trim().to_ascii_lowercase();
    let bad = || Failure::Usage(format!("bad transform `{spec}`"));
    let linear = if s == "identity" {
        AffineTransform::identity()
    } else if let Some(deg) = s.strip_prefix("rot") {
        AffineTransform::rotation_degrees(deg.parse().map_err(|_| bad())?)
    } else if let Some(f) = s.strip_prefix("zoom") {
        AffineTransform::zoom(f.parse().map_err(|_| bad())?).map_err(|_| bad())?
    } else if let Some(m) = s.strip_prefix("affine:") {
        let v: Vec<f64> = m
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        if v.len() != 4 {
            return Err(bad());
        }
        AffineTransform::new([[v[0], v[1]], [v[2], v[3]]], [0.0; 2]).map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    Ok(linear.about(center))
}

fn resolve(model: &ModelArgs, flags: FileConfig) -> Result<CliConfig, Failure> {
    let flags = FileConfig {
        block: model.block,
        support: model.support,
        iterations: model.iterations,
        min_gain: model.min_gain,
        rho: model.rho,
        sigma: model.sigma,
        alpha: model.alpha,
        threads: model.threads,
        ..flags
    };
    let file = match &model.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    CliConfig::resolve(flags.or(file)).map_err(Failure::Usage)
}

fn echo(cfg: &CliConfig) {
    eprintln!("effective configuration:");
    for line in cfg.to_toml().lines() {
        eprintln!("  {line}");
    }
}

fn save(image: &Image, path: &Path) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    }
    image.save(path)?;
    Ok(())
}

fn cmd_resample(args: ResampleArgs) -> Result<(), Failure> {
    let flags = FileConfig {
        method: args.method.map(|m| m.to_string()),
        ..FileConfig::default()
    };
    let cfg = resolve(&args.model, flags)?;
    if args.model.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    echo(&cfg);
    let method = cfg.primary_method().map_err(Failure::Usage)?;
    let rcfg = cfg.resampler();
    let output = args
        .output
        .ok_or_else(|| Failure::Usage("missing output path (-o)".into()))?;

    let (image, blocks, elapsed) = match (&args.mesh, &args.image) {
        (Some(mesh_path), None) => {
            if !method.is_model_based() {
                return Err(Failure::Usage(format!(
                    "{method} needs a grid image; use --image with --transform"
                )));
            }
            let (w, h) = (args.width.unwrap_or(0), args.height.unwrap_or(0));
            let mesh = MeshSampleSet::read_csv(mesh_path, w, h)?;
            let rec = resample_mesh(&mesh, &rcfg)?;
            (rec.image, rec.blocks, rec.elapsed)
        }
        (None, Some(image_path)) => {
            let src = Image::load(image_path)?;
            let a = parse_transform(&args.transform, image_center(src.width(), src.height()))?;
            match method.kernel() {
                None => {
                    let rec = resample_mesh(&forward_warp(&src, &a), &rcfg)?;
                    (rec.image, rec.blocks, rec.elapsed)
                }
                Some(kernel) => {
                    let inverse = a.invert()?;
                    let start = std::time::Instant::now();
                    let out = rcfg.install(|| kernel_warp(&src, &inverse, kernel))?;
                    let blocks = src.width().div_ceil(rcfg.block) * src.height().div_ceil(rcfg.block);
                    (out, blocks, start.elapsed())
                }
            }
        }
        _ => return Err(Failure::Usage("give either --mesh or --image".into())),
    };
    save(&image, &output)?;
    let ms = elapsed.as_secs_f64() * 1e3 / blocks.max(1) as f64;
    println!("{method}: {blocks} blocks, mean {ms:.3} ms/block");
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), Failure> {
    let flags = FileConfig {
        methods: args.methods.clone(),
        sequences: args.sequences.clone(),
        crop: args.crop,
        report: args.report.clone(),
        ..FileConfig::default()
    };
    let cfg = resolve(&args.model, flags)?;
    let sequences = expand_sequences(&cfg.sequences).map_err(|e| Failure::Usage(e.to_string()))?;
    if args.model.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    echo(&cfg);
    let dataset = args
        .dataset
        .ok_or_else(|| Failure::Usage("missing --dataset".into()))?;
    let methods = cfg.method_list().map_err(Failure::Usage)?;
    let images = load_dataset(&dataset)?;
    eprintln!(
        "{} images x {} sequences x {} methods",
        images.len(),
        sequences.len(),
        methods.len()
    );
    let report = run_benchmark(&images, &sequences, &methods, &cfg.resampler(), cfg.crop)?;
    emit_report(&report, &cfg.report)?;

    println!("mean PSNR [dB], crop {}", cfg.crop);
    print!("{}", report.psnr_table());
    println!();
    for m in report.methods() {
        let s = report.summary(&m, None);
        println!("{m:<18} ssim {:.4}  {:.3} ms/block", s.ssim, s.block_ms);
    }
    println!(
        "wrote {} and {}",
        cfg.report.display(),
        summary_path(&cfg.report).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Resample(args) => cmd_resample(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
