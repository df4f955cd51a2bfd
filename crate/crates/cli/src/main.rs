mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qhosvd::denoise::{block_match, denoise_quaternion_with_progress, DenoiseConfig};
use qhosvd::fusion::{fuse, FusionConfig};
use qhosvd::hosvd::{full_modes, qhosvd, reconstruct};
use qhosvd::metrics::{add_gaussian_noise, MetricReport};
use qhosvd::{decode, encode_rgb, read_image, write_image, QuaternionTensor};

use manifest::{json_f64, FileDigest, RunManifest};

/// Quaternion HOSVD tools for color image fusion, denoising and inspection.
#[derive(Debug, Parser)]
#[command(name = "qhosvd", version)]
struct Cli {
    /// Worker threads [default: available hardware parallelism]
    #[arg(long, global = true, env = "QHOSVD_THREADS", hide_env_values = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse multi-focus images of one scene
    Fuse(FuseArgs),
    /// Remove Gaussian noise from a color image
    Denoise(DenoiseArgs),
    /// Compare two images by PSNR and SSIM
    Metrics(MetricsArgs),
    /// Run QHOSVD on an image tensor and export per-mode singular values
    Decompose(DecomposeArgs),
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// Source images (PNG or binary PPM), all the same size
    #[arg(long, required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Fused image path (.png, or .ppm for binary PPM)
    #[arg(long)]
    output: PathBuf,
    /// Square patch size in pixels
    #[arg(long, default_value_t = 25)]
    patch: usize,
    /// Overlap between neighbouring patches in pixels
    #[arg(long, default_value_t = 6)]
    overlap: usize,
    /// Relative tolerance under which all feature norms count as equal
    #[arg(long, default_value_t = 1e-12)]
    tie_tolerance: f64,
    /// Accept a single input and pass it through the pipeline
    #[arg(long, default_value_t = false)]
    allow_single: bool,
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    /// Noisy image, or the clean image when --add-noise is given
    #[arg(long)]
    input: PathBuf,
    /// Denoised image path
    #[arg(long)]
    output: PathBuf,
    /// Noise standard deviation in 0..255 units
    #[arg(long)]
    sigma: f64,
    /// Patch size w [default: from the sigma schedule]
    #[arg(long)]
    patch: Option<usize>,
    /// Patches per group K [default: from the sigma schedule]
    #[arg(long)]
    group: Option<usize>,
    /// Iterations [default: from the sigma schedule]
    #[arg(long)]
    iters: Option<usize>,
    /// Threshold scale eta [default: from the sigma schedule]
    #[arg(long)]
    eta: Option<f64>,
    /// Relaxation delta of the iterative regularization
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Search window W in pixels
    #[arg(long, default_value_t = 30)]
    window: usize,
    /// Step between reference patches in pixels
    #[arg(long, default_value_t = 4)]
    stride: usize,
    /// Fixed core threshold replacing eta*sigma*sqrt(2 ln(w^2 K))
    #[arg(long)]
    tau: Option<f64>,
    /// Add seeded Gaussian noise of the given sigma to the input first
    #[arg(long, default_value_t = false)]
    add_noise: bool,
    /// Noise seed used with --add-noise
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the synthesized noisy image (with --add-noise)
    #[arg(long, requires = "add_noise")]
    noisy_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Reference image
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Image under test
    #[arg(long)]
    test: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TensorKind {
    /// The whole image as a quaternion matrix (order 2)
    Image,
    /// A w x w x K group of similar patches around --anchor
    Group,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Image to decompose
    #[arg(long)]
    input: PathBuf,
    /// CSV file receiving mode,index,sigma rows
    #[arg(long)]
    output: PathBuf,
    /// Tensor to build from the image
    #[arg(long, value_enum, default_value_t = TensorKind::Image)]
    tensor: TensorKind,
    /// Patch size w for --tensor group
    #[arg(long, default_value_t = 6)]
    patch: usize,
    /// Group size K for --tensor group
    #[arg(long, default_value_t = 70)]
    group: usize,
    /// Search window W for --tensor group
    #[arg(long, default_value_t = 30)]
    window: usize,
    /// Reference patch anchor ROW,COL for --tensor group
    #[arg(long, value_parser = parse_anchor, default_value = "0,0")]
    anchor: (usize, usize),
}

fn parse_anchor(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected ROW,COL, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(r)?, parse(c)?))
}

type Failure = Box<dyn std::error::Error + Send + Sync>;

fn digests(paths: &[&Path]) -> Result<Vec<FileDigest>, Failure> {
    paths.iter().map(|p| FileDigest::of(p).map_err(|e| format!("{}: {e}", p.display()).into())).collect()
}

struct Outcome {
    config: Value,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    results: Value,
}

fn run_fuse(args: &FuseArgs) -> Result<Outcome, Failure> {
    let cfg = FusionConfig {
        patch_rows: args.patch,
        patch_cols: args.patch,
        overlap: args.overlap,
        tie_tolerance: args.tie_tolerance,
        allow_single_source: args.allow_single,
    };
    let sources = args.inputs.iter().map(read_image).collect::<Result<Vec<_>, _>>()?;
    let fused = fuse(&sources, &cfg)?;
    write_image(&fused, &args.output)?;
    let inputs: Vec<&Path> = args.inputs.iter().map(PathBuf::as_path).collect();
    Ok(Outcome {
        config: serde_json::to_value(&cfg)?,
        inputs: digests(&inputs)?,
        outputs: digests(&[&args.output])?,
        results: json!({ "height": fused.height(), "width": fused.width(), "sources": sources.len() }),
    })
}

fn run_denoise(args: &DenoiseArgs) -> Result<Outcome, Failure> {
    let mut cfg = DenoiseConfig::for_sigma(args.sigma);
    cfg.patch_size = args.patch.unwrap_or(cfg.patch_size);
    cfg.group_size = args.group.unwrap_or(cfg.group_size);
    cfg.iterations = args.iters.unwrap_or(cfg.iterations);
    cfg.eta = args.eta.unwrap_or(cfg.eta);
    cfg.delta = args.delta;
    cfg.search_window = args.window;
    cfg.ref_stride = args.stride;
    cfg.tau_override = args.tau;
    cfg.validate()?;

    let input = read_image(&args.input)?;
    let (clean, noisy) = if args.add_noise {
        // 8-bit, exactly as written by --noisy-output
        let noisy = add_gaussian_noise(&input, args.sigma, args.seed)?.quantize();
        (Some(input), noisy)
    } else {
        (None, input)
    };
    let mut outputs: Vec<&Path> = vec![&args.output];
    if let Some(path) = &args.noisy_output {
        write_image(&noisy, path)?;
        outputs.push(path);
    }

    let estimate = denoise_quaternion_with_progress(&encode_rgb(&noisy), &cfg, |it, total| {
        eprintln!("denoise: iteration {it}/{total}");
    })?;
    let denoised = decode(&estimate)?;
    write_image(&denoised, &args.output)?;

    let mut results = json!({ "tau": cfg.threshold() });
    if let Some(clean) = &clean {
        let before = MetricReport::compute(clean, &noisy)?;
        let after = MetricReport::compute(clean, &denoised.quantize())?;
        results["noisy"] = json!({ "psnr": json_f64(before.psnr_db), "ssim": before.ssim });
        results["denoised"] = json!({ "psnr": json_f64(after.psnr_db), "ssim": after.ssim });
    }
    let mut config = serde_json::to_value(&cfg)?;
    config["add_noise"] = json!(args.add_noise);
    config["seed"] = json!(args.seed);
    Ok(Outcome { config, inputs: digests(&[&args.input])?, outputs: digests(&outputs)?, results })
}

fn run_metrics(args: &MetricsArgs) -> Result<Outcome, Failure> {
    let reference = read_image(&args.reference)?;
    let test = read_image(&args.test)?;
    let report = MetricReport::compute(&reference, &test)?;
    println!("psnr={:?} ssim={:?}", report.psnr_db, report.ssim);
    Ok(Outcome {
        config: json!({}),
        inputs: digests(&[&args.reference, &args.test])?,
        outputs: vec![],
        results: json!({ "psnr": json_f64(report.psnr_db), "ssim": report.ssim }),
    })
}

fn run_decompose(args: &DecomposeArgs) -> Result<Outcome, Failure> {
    let q = encode_rgb(&read_image(&args.input)?);
    let tensor = match args.tensor {
        TensorKind::Image => QuaternionTensor::from_matrix(&q),
        TensorKind::Group => {
            let cfg = DenoiseConfig {
                patch_size: args.patch,
                group_size: args.group,
                search_window: args.window,
                ..DenoiseConfig::for_sigma(0.0)
            };
            block_match(&q, args.anchor, &cfg)?.tensor
        }
    };
    let factors = qhosvd(&tensor, &full_modes(tensor.order()))?;
    let norm = tensor.frobenius_norm();
    let diff = reconstruct(&factors)?.distance(&tensor)?;
    let residual = if norm > 0.0 { diff / norm } else { diff };

    let mut csv = csv::Writer::from_path(&args.output)?;
    csv.write_record(["mode", "index", "sigma"])?;
    let mut modes: Vec<usize> = factors.modes.clone();
    modes.sort_unstable();
    for mode in modes {
        let sigma = factors.singular_values(mode).expect("decomposed mode");
        for (i, s) in sigma.iter().enumerate() {
            csv.write_record([mode.to_string(), (i + 1).to_string(), format!("{s:e}")])?;
        }
    }
    csv.flush()?;

    let ranks: Vec<usize> = (1..=tensor.order()).map(|m| factors.rank(m).unwrap_or(0)).collect();
    Ok(Outcome {
        config: json!({
            "tensor": format!("{:?}", args.tensor).to_lowercase(),
            "patch": args.patch,
            "group": args.group,
            "window": args.window,
            "anchor": [args.anchor.0, args.anchor.1],
        }),
        inputs: digests(&[&args.input])?,
        outputs: digests(&[&args.output])?,
        results: json!({ "dims": tensor.dims(), "ranks": ranks, "residual": residual }),
    })
}

fn run(cli: &Cli) -> Result<RunManifest, Failure> {
    let start = Instant::now();
    let (command, outcome) = match &cli.command {
        Command::Fuse(a) => ("fuse", run_fuse(a)?),
        Command::Denoise(a) => ("denoise", run_denoise(a)?),
        Command::Metrics(a) => ("metrics", run_metrics(a)?),
        Command::Decompose(a) => ("decompose", run_decompose(a)?),
    };
    Ok(RunManifest {
        command,
        config: outcome.config,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        results: outcome.results,
        duration_secs: start.elapsed().as_secs_f64(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(manifest) => {
            println!("{}", serde_json::to_string(&manifest).expect("manifest serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
