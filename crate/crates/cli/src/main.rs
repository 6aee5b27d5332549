use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crisismon::lexicon::load_manifest;
use crisismon::prevalence::{aggregate_tweets_par, read_prevalence_csv, write_series_csv};
use crisismon::report::{
    annotate_peaks, read_events_csv, read_stages_csv, render_heatmap, stage_prevalence_table, write_annotations_csv,
    write_peaks_csv, HeatmapSpec,
};
use crisismon::series::smoothed_gradient;
use crisismon::{
    associate_categories, build_matcher, compute_corpus_stats, expand_lexicon, filter_analyzable, joint_peaks,
    load_category_set, load_embeddings, load_lexicon, marker_peaks, parse_corpus, smooth, DateRange, Error,
    MarkerMapping, Peak, Result, RunConfig, Series, SeriesKind, Tweet,
};

/// Label used for cross-marker peaks in the peaks and annotation files.
const JOINT: &str = "JOINT";

#[derive(Parser)]
#[command(
    name = "crisismon",
    version,
    about = "Lexicon-based prevalence and change-peak analysis of tweet corpora"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus statistics (counts per kind, per user, per day).
    Stats(Opts),
    /// Expand seed lexicons with embedding neighbors and map them to categories.
    Expand(Opts),
    /// Daily prevalence, change peaks, heatmap and tables.
    Analyze(Opts),
    /// Re-render a heatmap from a prevalence CSV.
    Render(Opts),
}

/// Flags override values from `--config`.
#[derive(Args, Debug, Default)]
struct Opts {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSONL tweet file (repeatable).
    #[arg(long)]
    corpus: Vec<PathBuf>,
    /// Construct → seed lexicon manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Category set JSON.
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Word vectors in text format.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Marker mapping written by `expand`.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Marker to analyze (repeatable).
    #[arg(long = "marker")]
    markers: Vec<String>,
    /// Prevalence CSV for `render`.
    #[arg(long)]
    prevalence: Option<PathBuf>,
    /// Events CSV (date,description) for peak annotation.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Stage windows CSV (stage,start,end).
    #[arg(long)]
    stages: Option<PathBuf>,
    /// First day analyzed (YYYY-MM-DD); defaults to the earliest tweet.
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Last day analyzed, inclusive; defaults to the latest tweet.
    #[arg(long)]
    to: Option<NaiveDate>,
    /// Trailing smoothing window in days [default: 7].
    #[arg(long)]
    window: Option<usize>,
    /// Embedding neighbors added per seed word [default: 10].
    #[arg(long)]
    k: Option<usize>,
    /// Categories kept per construct [default: 10].
    #[arg(long)]
    m: Option<usize>,
    /// Peak threshold in standard deviations above the mean prominence [default: 1].
    #[arg(long)]
    sigma_mult: Option<f64>,
    /// Days before a peak searched for events.
    #[arg(long)]
    lead_days: Option<i64>,
    /// UTC offset in hours used to bucket tweets into days.
    #[arg(long, allow_hyphen_values = true)]
    tz_offset: Option<i32>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Heatmap title.
    #[arg(long)]
    title: Option<String>,
    /// Fail on the first malformed corpus line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

impl Opts {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if !self.corpus.is_empty() {
            c.corpus = self.corpus;
        }
        if !self.markers.is_empty() {
            c.markers = self.markers;
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => {$(
                if let Some(v) = self.$f { c.$g = Some(v); }
            )*};
        }
        set!(manifest => lexicon_manifest, categories => categories, embeddings => embeddings,
             mapping => mapping, prevalence => prevalence, events => events, stages => stages,
             from => from, to => to, title => title);
        macro_rules! set_plain {
            ($($f:ident => $g:ident),*) => {$(
                if let Some(v) = self.$f { c.$g = v; }
            )*};
        }
        set_plain!(window => window, k => k, m => m, sigma_mult => sigma_mult, lead_days => lead_days,
                   tz_offset => tz_offset_hours, workers => workers, out => out);
        c.strict |= self.strict;
        c.validate()?;
        Ok(c)
    }
}

fn require<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::InvalidConfig(format!("no {what} given")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.to_path_buf())
        } else {
            Error::File {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out).map_err(|source| Error::File {
        path: cfg.out.clone(),
        source,
    })?;
    Ok(&cfg.out)
}

fn read_tweets(cfg: &RunConfig) -> Result<Vec<Tweet>> {
    if cfg.corpus.is_empty() {
        return Err(Error::InvalidConfig("no corpus given".into()));
    }
    let offset = cfg.offset()?;
    let mut tweets = Vec::new();
    for path in &cfg.corpus {
        let mut stream = parse_corpus(open(path)?, cfg.parse_mode(), offset);
        for t in stream.by_ref() {
            tweets.push(t?);
        }
        let skipped = stream.into_skipped();
        if !skipped.is_empty() {
            eprintln!("{}: skipped {} malformed line(s)", path.display(), skipped.len());
            for s in skipped.iter().take(10) {
                eprintln!("  line {}: {}", s.line, s.reason);
            }
        }
    }
    Ok(tweets)
}

fn cmd_stats(cfg: &RunConfig) -> Result<()> {
    let tweets = read_tweets(cfg)?;
    let stats = compute_corpus_stats(&tweets);
    let dir = out_dir(cfg)?;
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize");
    write_file(&dir.join("stats.json"), format!("{json}\n").as_bytes())
}

fn cmd_expand(cfg: &RunConfig) -> Result<()> {
    let cfg_exp = cfg.expansion();
    let manifest = load_manifest(require(&cfg.lexicon_manifest, "lexicon manifest")?)?;
    let cats = load_category_set(require(&cfg.categories, "category set")?)?;
    let table = load_embeddings::<f32>(require(&cfg.embeddings, "embeddings")?)?;
    let dir = out_dir(cfg)?;
    for (construct, path) in manifest {
        let mut seed = load_lexicon(&path)?;
        seed.name = construct.clone();
        let expanded = expand_lexicon(&seed, &table, &cfg_exp);
        let mapping = associate_categories(&expanded, &cats, &cfg_exp);
        log::info!(
            "{construct}: {} seed terms, {} expanded, {} markers",
            seed.len(),
            expanded.len(),
            mapping.ranked.len()
        );
        write_file(
            &dir.join(format!("{construct}.expanded.json")),
            format!("{}\n", expanded.to_json()).as_bytes(),
        )?;
        let json = serde_json::to_string_pretty(&mapping).expect("mapping serializes");
        write_file(
            &dir.join(format!("{construct}.mapping.json")),
            format!("{json}\n").as_bytes(),
        )?;
    }
    Ok(())
}

fn load_mapping(path: &Path) -> Result<MarkerMapping> {
    serde_json::from_reader(open(path)?).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

fn marker_names(cfg: &RunConfig, available: impl Iterator<Item = String>) -> Result<Vec<String>> {
    if !cfg.markers.is_empty() {
        return Ok(cfg.markers.clone());
    }
    if let Some(p) = &cfg.mapping {
        let names: Vec<String> = load_mapping(p)?.markers().map(String::from).collect();
        if names.is_empty() {
            return Err(Error::EmptyMarkers);
        }
        return Ok(names);
    }
    let all: Vec<String> = available.collect();
    if all.is_empty() {
        return Err(Error::EmptyMarkers);
    }
    Ok(all)
}

fn analysis_range(cfg: &RunConfig, tweets: &[Tweet]) -> Result<DateRange> {
    let dates = || tweets.iter().filter(|t| filter_analyzable(t)).map(|t| t.date);
    match (cfg.from.or_else(|| dates().min()), cfg.to.or_else(|| dates().max())) {
        (Some(from), Some(to)) => DateRange::new(from, to),
        _ => Err(Error::InvalidConfig(
            "empty date range: no --from/--to and no analyzable tweets".into(),
        )),
    }
}

fn smoothed(series: &[(String, Series<f64>)], window: usize) -> Vec<(String, Series<f64>)> {
    series.iter().map(|(n, s)| (n.clone(), smooth(s, window))).collect()
}

type NamedPeaks = Vec<(String, Peak<f64>)>;

/// Per-marker peaks followed by the joint peaks of all markers.
fn all_peaks(series: &[(String, Series<f64>)], cfg: &RunConfig) -> Result<(NamedPeaks, Vec<Peak<f64>>)> {
    let analysis = cfg.analysis();
    let mut rows = Vec::new();
    for (name, s) in series {
        rows.extend(marker_peaks(s, &analysis)?.into_iter().map(|p| (name.clone(), p)));
    }
    let raw: Vec<Series<f64>> = series.iter().map(|(_, s)| s.clone()).collect();
    let joint = joint_peaks(&raw, &analysis)?;
    rows.extend(joint.iter().map(|p| (JOINT.to_string(), *p)));
    Ok((rows, joint))
}

fn heatmap_spec(cfg: &RunConfig, markers: &[String], joint: &[Peak<f64>]) -> HeatmapSpec {
    HeatmapSpec {
        from: cfg.from,
        to: cfg.to,
        title: cfg.title.clone(),
        peaks: joint.iter().map(|p| p.date).collect(),
        ..HeatmapSpec::for_markers(markers.iter().cloned())
    }
}

fn cmd_analyze(cfg: &RunConfig) -> Result<()> {
    let cats = load_category_set(require(&cfg.categories, "category set")?)?;
    let markers = marker_names(cfg, cats.names().map(String::from))?;
    let sub = cats.subset(&markers)?;
    let tweets = read_tweets(cfg)?;
    let range = analysis_range(cfg, &tweets)?;
    let matcher = build_matcher(&sub);
    let counts = aggregate_tweets_par(&tweets, &matcher, range, cfg.workers)?;
    if counts.dropped() > 0 {
        eprintln!(
            "{} analyzable tweet(s) outside {}..{}",
            counts.dropped(),
            range.start(),
            range.end()
        );
    }
    let dir = out_dir(cfg)?;
    let mut w = create(&dir.join("prevalence.csv"))?;
    counts.write_csv(&mut w)?;
    w.flush()?;

    // Rows follow the requested marker order.
    let raw: Vec<(String, Series<f64>)> = markers
        .iter()
        .map(|m| counts.series::<f64>(m).map(|s| (m.clone(), s)))
        .collect::<Result<_>>()?;
    let smooth_rows = smoothed(&raw, cfg.window);
    let mut derived = smooth_rows.clone();
    for (name, s) in &raw {
        derived.push((
            name.clone(),
            smoothed_gradient(s, cfg.window)?.with_kind(SeriesKind::Gradient),
        ));
    }
    let mut w = create(&dir.join("series.csv"))?;
    write_series_csv(&derived, &mut w)?;
    w.flush()?;

    let (peaks, joint) = all_peaks(&raw, cfg)?;
    let mut w = create(&dir.join("peaks.csv"))?;
    write_peaks_csv(&peaks, &mut w)?;
    w.flush()?;

    let svg = render_heatmap(&smooth_rows, &heatmap_spec(cfg, &markers, &joint))?;
    write_file(&dir.join("heatmap.svg"), &svg)?;

    if let Some(p) = &cfg.stages {
        let stages = read_stages_csv(open(p)?)?;
        let table = stage_prevalence_table(&smooth_rows, &stages);
        let mut w = create(&dir.join("stage_table.csv"))?;
        table.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &cfg.events {
        let events = read_events_csv(open(p)?)?;
        let mut rows = Vec::new();
        for (name, p) in &peaks {
            for a in annotate_peaks(std::slice::from_ref(p), &events, cfg.lead_days)? {
                rows.push((name.clone(), a));
            }
        }
        let mut w = create(&dir.join("annotations.csv"))?;
        write_annotations_csv(&rows, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_render(cfg: &RunConfig) -> Result<()> {
    let path = require(&cfg.prevalence, "prevalence CSV")?;
    let series = read_prevalence_csv::<f64, _>(open(path)?)?;
    let markers = marker_names(cfg, series.iter().map(|(n, _)| n.clone()))?;
    let raw: Vec<(String, Series<f64>)> = markers
        .iter()
        .map(|m| {
            series
                .iter()
                .find(|(n, _)| n == m)
                .cloned()
                .ok_or_else(|| Error::UnknownCategory(m.clone()))
        })
        .collect::<Result<_>>()?;
    let only: Vec<Series<f64>> = raw.iter().map(|(_, s)| s.clone()).collect();
    let joint = joint_peaks(&only, &cfg.analysis())?;
    let svg = render_heatmap(&smoothed(&raw, cfg.window), &heatmap_spec(cfg, &markers, &joint))?;
    write_file(&out_dir(cfg)?.join("heatmap.svg"), &svg)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Stats(o) => cmd_stats(&o.resolve()?),
        Command::Expand(o) => cmd_expand(&o.resolve()?),
        Command::Analyze(o) => cmd_analyze(&o.resolve()?),
        Command::Render(o) => cmd_render(&o.resolve()?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
