//! `csketch`: build, merge and apply compressive class sketches.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or format
//! error, 3 state error (empty class, incompatible sketches).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compressive_sketch::datasets::csv_file::write_csv_dataset;
use compressive_sketch::datasets::idx::parse_idx_images;
use compressive_sketch::datasets::{
    generate, ingest_cifar, ingest_idx, parse_cifar, parse_csv_dataset, read_csv, read_input, CsvOptions, LabelColumn,
    SyntheticFamily, SyntheticSpec,
};
use compressive_sketch::eval::{run_eval, EvalConfig, MapChoice};
use compressive_sketch::{
    sketch_stream, AnyFeatureMap, CompressiveClassifier, Error, FeatureMap, FeatureMapSpec, ImageShape,
    InputTransform, LabeledDataset, ModelFile, PriorMode, RcnnArchitecture, Rescale,
};

#[derive(Parser)]
#[command(name = "csketch", version, about = "Compressive classification from per-class sketches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    GenData(GenDataArgs),
    /// Sketch a labeled dataset into a model file.
    Sketch(SketchArgs),
    /// Merge model files built with the same feature map.
    Merge(MergeArgs),
    /// Label examples with a model file.
    Classify(ClassifyArgs),
    /// Repeated split/sketch/classify experiment.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    Rff,
    Rcnn,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorArg {
    Empirical,
    Uniform,
}

impl From<PriorArg> for PriorMode {
    fn from(p: PriorArg) -> Self {
        match p {
            PriorArg::Empirical => PriorMode::Empirical,
            PriorArg::Uniform => PriorMode::Uniform,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Idx,
    Cifar,
}

#[derive(Args)]
struct GenDataArgs {
    /// gauss3 or rings3.
    #[arg(long)]
    family: SyntheticFamily,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// How dataset files are read.
#[derive(Args)]
struct InputArgs {
    /// CSV file; IDX image and label files; or CIFAR batch files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// CSV label column: `last`, `none` or a 0-based index.
    #[arg(long)]
    label_col: Option<LabelColumn>,
    /// The CSV file has no header row.
    #[arg(long)]
    no_header: bool,
    /// Image shape `HxWxC` for CSV rows holding channel-last pixels.
    #[arg(long)]
    shape: Option<ImageShape>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long, value_enum, default_value = "rff")]
    map: MapKind,
    #[arg(long, default_value_t = 1000)]
    m: usize,
    /// Gaussian kernel bandwidth (RFF only).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "empirical")]
    prior: PriorArg,
    /// Skip the [-1, 1] rescaling of tabular features.
    #[arg(long)]
    no_rescale: bool,
}

#[derive(Args)]
struct SketchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    map: MapArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MergeArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Query files. For IDX, the image file alone suffices.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// CSV label column to ignore; defaults to none.
    #[arg(long, default_value = "none")]
    label_col: LabelColumn,
    #[arg(long)]
    no_header: bool,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "rff")]
    map: MapKind,
    /// Comma-separated sketch sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    m: Vec<usize>,
    /// Comma-separated kernel bandwidths (RFF only).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    sigma: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Train fraction, as a decimal or a ratio such as `2/3`.
    #[arg(long, default_value = "2/3", value_parser = parse_fraction)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "empirical")]
    prior: PriorArg,
    #[arg(long)]
    no_rescale: bool,
    /// Directory for config.txt, runs.csv, summary.csv and timing.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("split must lie in (0, 1), got {s}"))
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 1,
        Error::Input(_) | Error::Parse { .. } | Error::Format(_) | Error::Io(_) => 2,
        Error::State(_) | Error::Incompatible(_) => 3,
    }
}

fn load_labeled(args: &InputArgs) -> Result<LabeledDataset, Error> {
    let ds = match args.format {
        Format::Csv => {
            let [path] = args.inputs.as_slice() else {
                return Err(Error::Config("CSV input takes exactly one file".into()));
            };
            let opts = CsvOptions {
                label_column: args.label_col.unwrap_or(LabelColumn::Last),
                has_header: !args.no_header,
            };
            let ds = parse_csv_dataset(BufReader::new(File::open(path)?), opts)?;
            match args.shape {
                Some(shape) => ds.with_shape(shape)?,
                None => ds,
            }
        }
        Format::Idx => {
            let [images, labels] = args.inputs.as_slice() else {
                return Err(Error::Config("IDX input takes an image file and a label file".into()));
            };
            ingest_idx(images, labels)?
        }
        Format::Cifar => ingest_cifar(&args.inputs)?,
    };
    Ok(ds)
}

fn map_spec(args: &MapArgs, ds: &LabeledDataset) -> Result<FeatureMapSpec, Error> {
    match args.map {
        MapKind::Rff => Ok(FeatureMapSpec::rff(ds.dim(), args.m, args.sigma, args.seed)),
        MapKind::Rcnn => {
            let shape = ds
                .shape
                .ok_or_else(|| Error::Config("the rcnn map needs image input (IDX, CIFAR or --shape)".into()))?;
            Ok(FeatureMapSpec::rcnn(RcnnArchitecture::lenet(shape), args.m, args.seed))
        }
    }
}

fn cmd_gen_data(args: &GenDataArgs) -> Result<(), Error> {
    let ds = generate(&SyntheticSpec {
        family: args.family,
        n: args.n,
        seed: args.seed,
    })?;
    write_csv_dataset(&ds, BufWriter::new(File::create(&args.out)?))?;
    println!("wrote {} examples to {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_sketch(args: &SketchArgs) -> Result<(), Error> {
    let mut ds = load_labeled(&args.input)?;
    let transform = if ds.shape.is_some() {
        if args.input.format == Format::Csv {
            InputTransform::None
        } else {
            InputTransform::UnitPixels
        }
    } else if args.map.no_rescale {
        InputTransform::None
    } else {
        let r = Rescale::fit(&ds)?;
        r.apply_dataset(&mut ds)?;
        InputTransform::Rescale(r)
    };
    let spec = map_spec(&args.map, &ds)?;
    let map = AnyFeatureMap::build(&spec)?;
    let bank = sketch_stream(&map, ds.iter(), ds.num_classes(), args.map.prior.into())?;
    let counts: Vec<String> = ds
        .class_names()
        .iter()
        .zip(bank.counts())
        .map(|(name, c)| format!("{name}={c}"))
        .collect();
    let model = ModelFile::new(bank, ds.class_names().to_vec(), transform)?;
    model.save(&args.out)?;
    println!("K={} m={} counts: {}", ds.num_classes(), spec.m, counts.join(" "));
    Ok(())
}

fn cmd_merge(args: &MergeArgs) -> Result<(), Error> {
    let mut merged = ModelFile::load(&args.inputs[0])?;
    for path in &args.inputs[1..] {
        merged.merge_from(&ModelFile::load(path)?)?;
    }
    merged.save(&args.out)?;
    let counts: Vec<String> = merged.bank.counts().iter().map(u64::to_string).collect();
    println!("merged {} files: K={} counts: {}", args.inputs.len(), merged.bank.num_classes(), counts.join(" "));
    Ok(())
}

/// Query rows `(n, values)` in the model's input space, before its transform.
fn load_queries(args: &ClassifyArgs) -> Result<(usize, Vec<f64>), Error> {
    match args.format {
        Format::Csv => {
            let [path] = args.inputs.as_slice() else {
                return Err(Error::Config("CSV input takes exactly one file".into()));
            };
            let opts = CsvOptions {
                label_column: args.label_col,
                has_header: !args.no_header,
            };
            let table = read_csv(BufReader::new(File::open(path)?), opts)?;
            Ok((table.n, table.values))
        }
        Format::Idx => {
            let bytes = read_input(&args.inputs[0])?;
            let (_, rows, cols, pixels) = parse_idx_images(&bytes)?;
            Ok((rows * cols, pixels.iter().map(|&p| p as f64 / 255.0).collect()))
        }
        Format::Cifar => {
            let mut values = Vec::new();
            let mut n = 0;
            for path in &args.inputs {
                let ds = parse_cifar(&read_input(path)?)?;
                n = ds.dim();
                values.extend_from_slice(ds.values());
            }
            Ok((n, values))
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Error> {
    let model = ModelFile::load(&args.model)?;
    let (n, mut values) = load_queries(args)?;
    let spec = model.bank.spec();
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    let mut header = String::from("index,label");
    for name in &model.class_names {
        header.push_str(",score_");
        header.push_str(name);
    }
    writeln!(out, "{header}")?;
    if values.is_empty() {
        return Ok(out.flush()?);
    }
    if n != spec.n {
        return Err(Error::Input(format!("queries have dimension {n}, model expects {}", spec.n)));
    }
    if let InputTransform::Rescale(r) = &model.transform {
        values.chunks_exact_mut(n).for_each(|x| r.apply(x));
    }
    let map = AnyFeatureMap::build(spec)?;
    let clf = CompressiveClassifier::new(&model.bank)?;
    let mut features = vec![Default::default(); map.output_dim()];
    for (i, x) in values.chunks_exact(n).enumerate() {
        map.eval_into(x, &mut features)?;
        let scores = clf.score_features(&features);
        write!(out, "{i},{}", model.class_names[scores.argmax()])?;
        for s in scores.as_slice() {
            write!(out, ",{s}")?;
        }
        writeln!(out)?;
    }
    Ok(out.flush()?)
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Error> {
    let ds = load_labeled(&args.input)?;
    let map = match args.map {
        MapKind::Rff => MapChoice::Rff {
            sigmas: args.sigma.clone(),
        },
        MapKind::Rcnn => {
            let shape = ds
                .shape
                .ok_or_else(|| Error::Config("the rcnn map needs image input (IDX, CIFAR or --shape)".into()))?;
            MapChoice::Rcnn {
                stages: RcnnArchitecture::lenet(shape).stages,
            }
        }
    };
    let cfg = EvalConfig {
        map,
        m_values: args.m.clone(),
        repetitions: args.reps,
        train_fraction: args.split,
        seed: args.seed,
        prior_mode: args.prior.into(),
        rescale: !args.no_rescale,
    };
    let name = args.input.inputs[0]
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = run_eval(&ds, &name, &cfg)?;
    if let Some(dir) = &args.out {
        report.write_dir(dir)?;
    }
    print!("{}", report.human_table());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::GenData(a) => cmd_gen_data(a),
        Command::Sketch(a) => cmd_sketch(a),
        Command::Merge(a) => cmd_merge(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Eval(a) => cmd_eval(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("csketch: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
