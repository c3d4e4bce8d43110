//! `spotter`: generate data, train, evaluate, detect, count MACs, benchmark and
//! compare the character and bigram text detectors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use spotter_core::detector::{benchmark_fps, detect, read_pgm, write_pgm, PyramidConfig, DEFAULT_SCALE_FACTOR};
use spotter_core::evalkit::{
    emit_report, format_comparison, operating_point, read_roc_csv, relative_reduction, roc_curve, run_experiment,
    score_dataset, ComparisonRow, ExperimentConfig, Progress, ReportFormat,
};
use spotter_core::image::GrayImage;
use spotter_core::netzoo::{build_net, count_macs, NetKind, NetworkParams};
use spotter_core::synthgen::{generate_dataset, read_dataset, synth_scene, write_dataset, DataKind, GenConfig};
use spotter_core::trainer::{load_model, save_model, train_with_progress, TrainConfig};
use spotter_core::Result;

#[derive(Parser)]
#[command(name = "spotter", version, about = "Sliding-window character and bigram text detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic dataset (.bgds)
    Gen(GenArgs),
    /// Train a detector network on a dataset
    Train(TrainArgs),
    /// Score a held-out dataset and report the ROC operating point
    Eval(EvalArgs),
    /// Run multi-scale detection on a PGM image
    Detect(DetectArgs),
    /// Print the analytic per-layer MAC table of a network
    Macs(MacsArgs),
    /// Measure dense-inference throughput
    Bench(BenchArgs),
    /// Compare two ROC curves at a fixed precision
    Compare(CompareArgs),
    /// Render a synthetic scene with planted bigrams (.pgm)
    Scene(SceneArgs),
    /// Run the full unigram versus bigram comparison with fixed seeds
    ReproPaper(ReproArgs),
}

#[derive(Args, Clone)]
struct Distortion {
    /// Rotation range in degrees (uniform in ±ROT)
    #[arg(long = "rot", default_value_t = 15.0)]
    rotation: f64,
    /// Perspective corner jitter as a fraction of the window size
    #[arg(long = "persp", default_value_t = 0.08)]
    perspective: f64,
    /// Additive Gaussian noise sigma in grey levels
    #[arg(long, default_value_t = 8.0)]
    noise: f64,
    /// Lower end of the text contrast range
    #[arg(long, default_value_t = 0.3)]
    contrast_min: f64,
    /// Upper end of the text contrast range
    #[arg(long, default_value_t = 1.0)]
    contrast_max: f64,
    /// Upper end of the procedural texture amplitude in grey levels
    #[arg(long, default_value_t = 60.0)]
    texture: f64,
    /// Probability of stroke clutter on positives and plain backgrounds
    #[arg(long, default_value_t = 0.3)]
    clutter: f64,
    /// Directory of PGM images used as extra backgrounds
    #[arg(long)]
    backgrounds: Option<PathBuf>,
}

impl Distortion {
    fn apply(&self, base: GenConfig) -> Result<GenConfig> {
        Ok(GenConfig {
            rotation_deg: self.rotation,
            perspective: self.perspective,
            noise_sigma: self.noise,
            contrast: (self.contrast_min, self.contrast_max),
            texture_amplitude: (base.texture_amplitude.0.min(self.texture), self.texture),
            clutter_prob: self.clutter,
            backgrounds: Arc::new(match &self.backgrounds {
                Some(dir) => load_backgrounds(dir)?,
                None => Vec::new(),
            }),
            ..base
        })
    }
}

fn load_backgrounds(dir: &Path) -> Result<Vec<GrayImage>> {
    let entries = std::fs::read_dir(dir).map_err(|e| spotter_core::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    paths.iter().map(read_pgm).collect()
}

#[derive(Args)]
struct GenArgs {
    /// Data kind: unigram (32x32) or bigram (64x32)
    #[arg(long)]
    kind: DataKind,
    /// Number of samples
    #[arg(long)]
    count: usize,
    /// Fraction of positive samples
    #[arg(long, default_value_t = 0.5)]
    pos_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset path
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    distortion: Distortion,
}

#[derive(Args)]
struct TrainArgs {
    /// Network: unigram, bigram-naive or bigram-shared
    #[arg(long)]
    net: NetKind,
    /// Training dataset
    #[arg(long)]
    data: PathBuf,
    /// Validation dataset
    #[arg(long)]
    val: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Adam learning rate
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    /// Mini-batch size
    #[arg(long, default_value_t = 100)]
    batch: usize,
    /// Output model path
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch log as CSV
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Held-out dataset
    #[arg(long)]
    data: PathBuf,
    /// ROC curve output (CSV)
    #[arg(long)]
    roc: PathBuf,
    /// Optional ROC plot (SVG)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Precision floor of the operating point
    #[arg(long, default_value_t = 0.9)]
    precision: f64,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input image (binary PGM)
    #[arg(long)]
    image: PathBuf,
    /// Decision threshold on the text probability
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Score map of the full-resolution level (PGM, score x 255)
    #[arg(long)]
    out_map: PathBuf,
    /// Binary mask of the full-resolution level (PGM)
    #[arg(long)]
    out_mask: PathBuf,
    /// Pyramid scale factor between levels
    #[arg(long, default_value_t = DEFAULT_SCALE_FACTOR)]
    pyramid: f64,
    /// Analyse pyramid levels concurrently
    #[arg(long)]
    parallel_levels: bool,
}

#[derive(Args)]
struct MacsArgs {
    #[arg(long)]
    net: NetKind,
}

#[derive(Args)]
struct BenchArgs {
    /// Trained model; without it a seeded random-weight network is timed
    #[arg(long, required_unless_present = "net")]
    model: Option<PathBuf>,
    /// Network to time with random weights
    #[arg(long, conflicts_with = "model")]
    net: Option<NetKind>,
    /// Square image size in pixels
    #[arg(long, default_value_t = 512)]
    size: usize,
    /// Timed iterations (at least 3)
    #[arg(long, default_value_t = 10)]
    iters: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Baseline ROC curve (CSV)
    #[arg(long)]
    roc_a: PathBuf,
    /// Candidate ROC curve (CSV)
    #[arg(long)]
    roc_b: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    precision: f64,
}

#[derive(Args)]
struct SceneArgs {
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    /// Number of planted bigrams
    #[arg(long, default_value_t = 5)]
    bigrams: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output image (PGM)
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    distortion: Distortion,
}

#[derive(Args)]
struct ReproArgs {
    /// Directory for datasets, models and ROC curves
    #[arg(long, default_value = "repro-out")]
    out: PathBuf,
    /// Training samples per data kind
    #[arg(long, default_value_t = 20_000)]
    train_count: usize,
    /// Validation samples per data kind
    #[arg(long, default_value_t = 1_000)]
    val_count: usize,
    /// Held-out test samples per data kind
    #[arg(long, default_value_t = 4_000)]
    test_count: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 2016)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    precision: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Detect(a) => detect_cmd(a),
        Command::Macs(a) => {
            macs(a.net);
            Ok(())
        }
        Command::Bench(a) => bench(a),
        Command::Compare(a) => compare(a),
        Command::Scene(a) => scene(a),
        Command::ReproPaper(a) => repro(a),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let cfg = a.distortion.apply(GenConfig {
        positive_fraction: a.pos_frac,
        ..GenConfig::new(a.kind, a.count, a.seed)
    })?;
    let samples: Vec<_> = generate_dataset(&cfg)?.into_iter().map(|g| g.sample).collect();
    write_dataset(&samples, &a.out)?;
    let (w, h) = a.kind.window();
    println!(
        "wrote {} {} samples ({w}x{h}, {} positive) to {}",
        samples.len(),
        a.kind.name(),
        cfg.positive_count(),
        a.out.display()
    );
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    let spec = build_net(a.net);
    let data = read_dataset(&a.data)?;
    let val = match &a.val {
        Some(p) => read_dataset(p)?,
        None => Vec::new(),
    };
    let cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch,
        epochs: a.epochs,
        seed: a.seed,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let (params, log) = train_with_progress(&spec, &data, &val, &cfg, |r| {
        eprintln!(
            "epoch {:>3}  train loss {:.4}  val acc {:.4}  val loss {:.4}  [{:.0}s]",
            r.epoch,
            r.train_loss,
            r.val_accuracy,
            r.val_loss,
            start.elapsed().as_secs_f64()
        );
    })?;
    save_model(&spec, &params, &a.out)?;
    if let Some(path) = &a.log {
        std::fs::write(path, log.to_csv()).map_err(|e| spotter_core::Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    println!("saved {} model to {}", a.net.name(), a.out.display());
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let (spec, params) = load_model(&a.model)?;
    let data = read_dataset(&a.data)?;
    let curve = roc_curve(&score_dataset(&spec, &params, &data)?)?;
    emit_report(&curve, &a.roc, ReportFormat::Csv)?;
    if let Some(svg) = &a.svg {
        emit_report(&curve, svg, ReportFormat::Svg)?;
    }
    let op = operating_point(&curve, a.precision)?;
    println!("network    {}", spec.kind.name());
    println!("samples    {}", data.len());
    println!("precision  {:.4} (target {:.2})", op.precision, a.precision);
    println!("threshold  {:.6}", op.threshold);
    println!("FPR        {:.4}", op.fpr);
    println!("recall     {:.4}", op.recall);
    println!("f-score    {:.4}", op.f_score);
    Ok(())
}

fn detect_cmd(a: DetectArgs) -> Result<()> {
    let (spec, params) = load_model(&a.model)?;
    let image = read_pgm(&a.image)?;
    let cfg = PyramidConfig {
        factor: a.pyramid,
        parallel: a.parallel_levels,
        max_levels: None,
    };
    let result = detect(&spec, &params, &image, a.threshold, &cfg)?;
    let base = &result.levels[0];
    write_pgm(&base.score_image(), &a.out_map)?;
    write_pgm(&base.mask_image(), &a.out_mask)?;
    println!("level  scale   map      positive cells");
    for (i, l) in result.levels.iter().enumerate() {
        println!(
            "{i:>5}  {:.4}  {:>3}x{:<3}  {}",
            l.map.scale,
            l.map.width,
            l.map.height,
            l.positives()
        );
    }
    Ok(())
}

fn macs(net: NetKind) {
    let report = count_macs(&build_net(net));
    let unigram = count_macs(&build_net(NetKind::Unigram)).total;
    println!("{}", net.name());
    println!("{:<6} {:<18} {:>8} {:>10} {:>12}", "layer", "conv", "in", "downsample", "MACs/pixel");
    for l in &report.layers {
        println!(
            "{:<6} {:<18} {:>8} {:>10} {:>12}",
            l.layer_index,
            l.layer.to_string(),
            l.in_channels,
            l.downsample,
            l.macs_per_pixel
        );
    }
    println!("total {} MACs/pixel", report.total);
    println!("ratio vs unigram {:.2}", report.total / unigram);
}

fn bench(a: BenchArgs) -> Result<()> {
    let (spec, params) = match (&a.model, a.net) {
        (Some(path), _) => load_model(path)?,
        (None, Some(net)) => {
            let spec = build_net(net);
            let params = NetworkParams::he_init(&spec, 0);
            (spec, params)
        }
        (None, None) => unreachable!("clap requires --model or --net"),
    };
    let r = benchmark_fps(&spec, &params, a.size, a.iters)?;
    println!("network      {}", spec.kind.name());
    println!("image        {0}x{0}", r.size);
    println!("iterations   {}", r.iterations);
    println!("median       {:.4} s", r.median_seconds);
    println!("fps          {:.2}", r.fps);
    println!("MACs/pixel   {}", r.macs_per_pixel);
    println!("MACs/frame   {:.4e}", r.total_macs);
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let ca = read_roc_csv(&a.roc_a)?;
    let cb = read_roc_csv(&a.roc_b)?;
    let pa = operating_point(&ca, a.precision)?;
    let pb = operating_point(&cb, a.precision)?;
    let red = relative_reduction(pa.fpr, pb.fpr)?;
    let rows = [
        ComparisonRow {
            name: "a".into(),
            macs_per_pixel: None,
            point: pa,
        },
        ComparisonRow {
            name: "b".into(),
            macs_per_pixel: None,
            point: pb,
        },
    ];
    print!("{}", format_comparison(&rows, a.precision, Some(red)));
    Ok(())
}

fn scene(a: SceneArgs) -> Result<()> {
    let cfg = a.distortion.apply(GenConfig::new(DataKind::Bigram, 1, a.seed))?;
    let s = synth_scene(&cfg, a.width, a.height, a.bigrams, a.seed)?;
    write_pgm(&s.image, &a.out)?;
    for (text, (x, y)) in s.texts.iter().zip(s.centers()) {
        println!("{text} {x:.1} {y:.1}");
    }
    Ok(())
}

fn repro(a: ReproArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out).map_err(|e| spotter_core::Error::Io {
        path: a.out.clone(),
        source: e,
    })?;
    let cfg = ExperimentConfig {
        train_count: a.train_count,
        val_count: a.val_count,
        test_count: a.test_count,
        epochs: a.epochs,
        seed: a.seed,
        precision: a.precision,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let outcome = run_experiment(&cfg, |p| {
        let t = start.elapsed().as_secs_f64();
        match p {
            Progress::Generated { kind, split, count } => {
                eprintln!("[{t:>6.0}s] generated {count} {} {split} samples", kind.name())
            }
            Progress::Epoch { net, record } => eprintln!(
                "[{t:>6.0}s] {} epoch {} train loss {:.4} val acc {:.4}",
                net.name(),
                record.epoch,
                record.train_loss,
                record.val_accuracy
            ),
            Progress::Scored { net } => eprintln!("[{t:>6.0}s] scored {} test set", net.name()),
        }
    })?;
    for arm in [&outcome.unigram, &outcome.bigram] {
        let name = arm.spec.kind.name();
        save_model(&arm.spec, &arm.params, a.out.join(format!("{name}.bgnm")))?;
        emit_report(&arm.curve, a.out.join(format!("{name}-roc.csv")), ReportFormat::Csv)?;
        emit_report(&arm.curve, a.out.join(format!("{name}-roc.svg")), ReportFormat::Svg)?;
    }
    print!("{}", outcome.table());
    println!("elapsed {:.0}s", start.elapsed().as_secs_f64());
    Ok(())
}
