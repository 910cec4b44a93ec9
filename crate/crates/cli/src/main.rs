//! `voicetraits`: extract acoustic features from a speech corpus, quantize
//! them into trait classes, export conditioning manifests and summarize
//! listening-test ratings.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use voicetraits::lld::{FeatureConfig, UtteranceFeatureVector};
use voicetraits::mos::{self, Dimension};
use voicetraits::pipeline::{
    extract_corpus, export_f0_contours, load_corpus, parse_manifest, run_labeling, ContourSource,
    ExtractOptions, FeatureCache, LabelingConfig, Manifest, ManifestFormat, UtteranceRecord,
    DEFAULT_SPLIT_SEED, DEFAULT_TEST_FRACTION,
};
use voicetraits::quantize::{compute_corpus_stats, load_scheme_config, ClassId, Feature, FeatureSource, StatsOptions, PRESETS};

#[derive(Parser)]
#[command(name = "voicetraits", version, about = "Trait-conditioned speech corpus tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-utterance features into a cache file.
    Extract(ExtractArgs),
    /// Print corpus statistics for features or scheme sources.
    Stats(StatsArgs),
    /// Label the corpus with one or more schemes and write manifests.
    Quantize(QuantizeArgs),
    /// Export F0 contours for utterances listed in a manifest.
    Contours(ContourArgs),
    /// Aggregate listening-test ratings into MOS tables.
    Mos(MosArgs),
    /// List the built-in scheme presets.
    Presets,
}

#[derive(Args)]
struct CorpusArgs {
    /// Pipe-delimited metadata file (id|text[|normalized[|phonemes]]).
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Directory holding <id>.wav files.
    #[arg(long)]
    audio_dir: Option<PathBuf>,
    /// Feature cache (JSON). Read if present, updated after extraction.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads for extraction.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Write frame-level <id>.lld.csv dumps here.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Scheme (preset name or TOML path); repeatable. Defaults to the six features.
    #[arg(long)]
    scheme: Vec<String>,
    /// Include utterances whose feature is missing (counted as 0).
    #[arg(long)]
    include_missing: bool,
}

#[derive(Args)]
struct QuantizeArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Scheme (preset name or TOML path); repeatable.
    #[arg(long, required = true)]
    scheme: Vec<String>,
    /// Output directory for manifests and report.json.
    #[arg(long)]
    out: PathBuf,
    /// Manifest format: pipe or jsonl.
    #[arg(long, default_value = "pipe")]
    format: ManifestFormat,
    /// Seed for the train/test split.
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION)]
    test_fraction: f64,
    /// Leave out utterances flagged as all-unvoiced or formant-less.
    #[arg(long)]
    exclude_flagged: bool,
}

#[derive(Args)]
struct ContourArgs {
    /// Manifest written by `quantize`.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    audio_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Only utterances of this class.
    #[arg(long)]
    class: Option<u8>,
    /// At most this many utterances per class.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct MosArgs {
    /// Ratings CSV (listener_id,stimulus_id,system,class_id,scale,score).
    #[arg(long)]
    ratings: PathBuf,
    /// warmth or competence.
    #[arg(long)]
    dimension: Dimension,
    /// Report one row per (system, class).
    #[arg(long)]
    by_class: bool,
    /// table or csv.
    #[arg(long, default_value = "table")]
    format: String,
    /// Also write an error-bar CSV here.
    #[arg(long)]
    error_bars: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<voicetraits::Error> for Failure {
    fn from(e: voicetraits::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Quantize(a) => cmd_quantize(a),
        Command::Contours(a) => cmd_contours(a),
        Command::Mos(a) => cmd_mos(a),
        Command::Presets => cmd_presets(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Extracts (or reuses) features and returns the cached records.
fn load_records(args: &CorpusArgs, dump_dir: Option<PathBuf>) -> CliResult<Vec<UtteranceRecord>> {
    let config = FeatureConfig::default();
    let cache = match &args.cache {
        Some(path) if args.metadata.is_none() => {
            if !path.exists() {
                return Err(usage(format!("cache {} does not exist; pass --metadata to build it", path.display())));
            }
            FeatureCache::load(path)?
        }
        Some(path) => FeatureCache::open_or_new(path, config)?,
        None => FeatureCache::new(config),
    };
    if let Some(metadata) = &args.metadata {
        let audio_dir = args
            .audio_dir
            .as_ref()
            .ok_or_else(|| usage("--metadata needs --audio-dir"))?;
        let corpus = load_corpus(metadata, audio_dir)?;
        let keep = corpus.entries.iter().map(|e| e.utterance_id.clone()).collect();
        cache.retain_ids(&keep);
        let options = ExtractOptions { jobs: args.jobs, dump_dir };
        let summary = extract_corpus(&corpus, &cache, &options)?;
        eprintln!(
            "utterances: {} extracted: {} reused: {} failed: {} missing audio: {}",
            summary.total, summary.extracted, summary.reused, summary.failed, summary.missing_audio
        );
        if let Some(path) = &args.cache {
            cache.save(path)?;
            info!("cache written to {}", path.display());
        }
    } else if args.cache.is_none() {
        return Err(usage("give --metadata and --audio-dir, or --cache"));
    }
    Ok(cache.records())
}

fn feature_vectors(records: &[UtteranceRecord]) -> Vec<UtteranceFeatureVector> {
    records.iter().filter_map(|r| r.features.clone()).collect()
}

fn cmd_extract(args: ExtractArgs) -> CliResult {
    if args.corpus.metadata.is_none() {
        return Err(usage("extract needs --metadata and --audio-dir"));
    }
    let records = load_records(&args.corpus, args.dump_dir)?;
    for r in records.iter().filter(|r| r.error.is_some()) {
        warn!("{}: {}", r.utterance_id, r.error.as_deref().unwrap_or_default());
    }
    let flagged = records
        .iter()
        .filter(|r| r.features.as_ref().is_some_and(|f| f.is_flagged()))
        .count();
    println!("records: {} flagged: {}", records.len(), flagged);
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> CliResult {
    let records = load_records(&args.corpus, None)?;
    let vectors = feature_vectors(&records);
    if vectors.is_empty() {
        return Err(Failure::Data(anyhow!("no utterance has features")));
    }
    let options = StatsOptions { exclude_missing: !args.include_missing };
    let mut sources: Vec<(String, FeatureSource, Option<voicetraits::quantize::QuantizationScheme>)> = Vec::new();
    if args.scheme.is_empty() {
        for f in Feature::ALL {
            sources.push((f.name().to_string(), FeatureSource::Single(f), None));
        }
    } else {
        for spec in &args.scheme {
            let scheme = load_scheme_config(spec)?.resolve(Some(&vectors))?;
            sources.push((scheme.name.clone(), scheme.source.clone(), Some(scheme)));
        }
    }
    println!(
        "{:<18} {:>6} {:>5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}  classes",
        "source", "n", "excl", "min", "q25", "median", "q75", "max", "mean"
    );
    for (name, source, scheme) in &sources {
        let s = compute_corpus_stats(&vectors, source, options)?.summary();
        let classes = scheme.as_ref().map_or_else(String::new, |scheme| {
            let mut counts = [0usize; 3];
            for v in &vectors {
                if let Ok((_, c)) = scheme.classify_vector(v) {
                    counts[c.index()] += 1;
                }
            }
            format!("{}/{}/{}", counts[0], counts[1], counts[2])
        });
        println!(
            "{:<18} {:>6} {:>5} {:>12.5} {:>12.5} {:>12.5} {:>12.5} {:>12.5} {:>12.5}  {}",
            name, s.count, s.excluded, s.min, s.q25, s.median, s.q75, s.max, s.mean, classes
        );
    }
    Ok(())
}

fn cmd_quantize(args: QuantizeArgs) -> CliResult {
    if !(0.0..1.0).contains(&args.test_fraction) {
        return Err(usage("--test-fraction must be in [0, 1)"));
    }
    let configs = args
        .scheme
        .iter()
        .map(|s| load_scheme_config(s))
        .collect::<Result<Vec<_>, _>>()?;
    let records = load_records(&args.corpus, None)?;
    let vectors = feature_vectors(&records);
    let schemes = configs
        .iter()
        .map(|c| c.resolve(Some(&vectors)))
        .collect::<Result<Vec<_>, _>>()?;
    let config = LabelingConfig {
        seed: args.seed,
        test_fraction: args.test_fraction,
        exclude_flagged: args.exclude_flagged,
    };
    let run = run_labeling(&records, &schemes, &config)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for scheme in &schemes {
        let manifest = Manifest::from_run(&run, &scheme.name)?;
        let path = args.out.join(format!("{}.{}", scheme.name, args.format.extension()));
        manifest.write(&path, args.format)?;
        let h = manifest.class_histogram();
        println!("{}: {} rows, classes {}/{}/{} -> {}", scheme.name, manifest.rows.len(), h[0], h[1], h[2], path.display());
    }
    let report = args.out.join("report.json");
    fs::write(&report, run.report_json()?).with_context(|| format!("writing {}", report.display()))?;
    if !run.report.skipped.is_empty() {
        eprintln!("skipped {} utterances without features (see report.json)", run.report.skipped.len());
    }
    Ok(())
}

fn cmd_contours(args: ContourArgs) -> CliResult {
    let class = args
        .class
        .map(ClassId::new)
        .transpose()
        .map_err(|e| usage(e.to_string()))?;
    let manifest = parse_manifest(&args.manifest)?;
    let mut per_class: HashMap<ClassId, usize> = HashMap::new();
    let mut sources = Vec::new();
    for row in &manifest.rows {
        if class.is_some_and(|c| c != row.class_id) {
            continue;
        }
        let n = per_class.entry(row.class_id).or_default();
        if args.limit.is_some_and(|l| *n >= l) {
            continue;
        }
        *n += 1;
        sources.push(ContourSource {
            utterance_id: row.utterance_id.clone(),
            audio_path: audio_path(&args.audio_dir, &row.utterance_id),
            class_id: row.class_id,
        });
    }
    if sources.is_empty() {
        return Err(Failure::Data(anyhow!("no manifest rows match")));
    }
    let contours = export_f0_contours(&sources, &args.out, &FeatureConfig::default())?;
    println!("{} contours written to {}", contours.len(), args.out.display());
    Ok(())
}

fn audio_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.wav"))
}

fn cmd_mos(args: MosArgs) -> CliResult {
    let csv = match args.format.as_str() {
        "table" => false,
        "csv" => true,
        other => return Err(usage(format!("unknown --format '{other}' (table or csv)"))),
    };
    let ratings = mos::load_ratings(&args.ratings)?;
    for r in &ratings.rejected {
        eprintln!("{}:{}: rejected: {}", args.ratings.display(), r.line, r.reason);
    }
    let summaries = if args.by_class {
        mos::aggregate_mos_by_class(&ratings.records, args.dimension)?
    } else {
        mos::aggregate_mos(&ratings.records, args.dimension)?
    };
    if csv {
        print!("{}", mos::summaries_csv(args.dimension, &summaries));
    } else {
        print!("{}", mos::render_table(args.dimension, &summaries));
    }
    if let Some(path) = &args.error_bars {
        let pooled = if args.by_class {
            mos::aggregate_mos(&ratings.records, args.dimension)?
        } else {
            summaries
        };
        fs::write(path, mos::error_bar_csv(&pooled)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_presets() -> CliResult {
    for p in PRESETS {
        let config = load_scheme_config(p.name)?;
        let features: Vec<&str> = config.features.iter().map(|f| f.name()).collect();
        let cuts = config.boundaries.map_or_else(
            || format!("quantiles {:?}", config.quantiles.unwrap_or_default()),
            |[b1, b2]| format!("[{b1}, {b2}]"),
        );
        println!("{:<18} {:<42} {cuts}", p.name, features.join(" + "));
    }
    Ok(())
}
