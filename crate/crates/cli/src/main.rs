//! `phonofeat` command-line interface.
//!
//! Exit status: 0 on success, 1 on a domain error (message on stderr),
//! 2 on a usage error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phonofeat::frontend::{self, Frontend, MappingTable};
use phonofeat::ipa::{Overrides, Segment};
use phonofeat::metrics::{self, OosCounting, TestSetAccumulator};
use phonofeat::projection::{self, Metric, ProjectionLayer};
use phonofeat::schema;
use phonofeat::zeroshot::{self, ManualOverrides, PhonemeInventory, Strategy};
use phonofeat::{Analyzer, Error};
use serde_json::json;

/// Seed used by every randomized subcommand when `--seed` is not given.
const DEFAULT_SEED: u64 = 1234;

#[derive(Parser)]
#[command(name = "phonofeat", version, about = "Phonological-feature input pipeline for zero-shot TTS")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Feature schema JSON (default: built-in 60-bit schema)
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    /// IPA override dictionary (TSV: ipa<TAB>feature=value;...)
    #[arg(long = "chart-overrides", global = true)]
    chart_overrides: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Count stressed and unstressed vowels as separate inventory members
    #[arg(long, global = true)]
    count_stress_variants: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Show or validate the feature schema
    Schema {
        #[arg(value_enum)]
        action: SchemaAction,
    },
    /// Encode an IPA string into binary feature rows
    Encode {
        #[arg(long)]
        ipa: String,
    },
    /// Show the categorical features of a single IPA segment
    Analyze {
        #[arg(long)]
        ipa: String,
    },
    /// Run the lexicon frontend over text
    Frontend {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        /// A single sentence
        #[arg(long, conflicts_with = "input")]
        text: Option<String>,
        /// File with one sentence per line
        #[arg(long)]
        input: Option<PathBuf>,
        /// Lexicon source tag
        #[arg(long, default_value = "lexicon")]
        source: String,
    },
    /// Collect the phoneme inventory of an IPA file
    Inventory {
        #[arg(long)]
        segments: PathBuf,
    },
    /// Out-of-sample phonemes of a target inventory against a corpus inventory
    Oos {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Unseen phoneme rate per utterance and over the whole file
    Upr {
        #[arg(long)]
        inventory: PathBuf,
        /// One utterance per line: IPA, or text when --lexicon/--mapping are given
        #[arg(long)]
        utterances: PathBuf,
        /// Count distinct OOS phonemes instead of occurrences
        #[arg(long)]
        types: bool,
        #[arg(long, requires = "mapping")]
        lexicon: Option<PathBuf>,
        #[arg(long, requires = "lexicon")]
        mapping: Option<PathBuf>,
    },
    /// Nearest inventory members of a phoneme
    Nearest {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        phoneme: String,
        #[arg(short = 'k', long = "k", default_value_t = 5)]
        k: usize,
        /// Rank by projected embedding distance instead of feature distance
        #[arg(long)]
        embedding: bool,
        #[arg(long, default_value_t = projection::DEFAULT_EMBEDDING_DIM)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Trained weights CSV (overrides --dim/--seed)
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        cosine: bool,
    },
    /// Build an AUTO, MANUAL or RANDOM plan for OOS phonemes
    Plan {
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        inventory: PathBuf,
        /// IPA file whose phonemes are checked against the inventory
        #[arg(long)]
        target: PathBuf,
        /// Expert mappings (TSV: oos<TAB>target)
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Project segments through the linear input layer and export embeddings
    Project {
        #[arg(long, default_value_t = projection::DEFAULT_EMBEDDING_DIM)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// IPA file of segments to export
        #[arg(long, required_unless_present = "chart")]
        segments: Option<PathBuf>,
        /// Export every base symbol of the built-in chart
        #[arg(long)]
        chart: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also write the layer weights as CSV
        #[arg(long)]
        export_weights: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaAction {
    Show,
    Validate,
}

enum CliError {
    Domain(Error),
    Usage(String),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain(e.into())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn analyzer(global: &Global) -> Result<Analyzer, Error> {
    let schema = schema::load_schema(global.schema.as_deref())?;
    let mut analyzer = Analyzer::new(schema);
    if let Some(path) = &global.chart_overrides {
        let overrides = Overrides::load(path, analyzer.chart())?;
        analyzer = analyzer.with_overrides(overrides);
    }
    Ok(analyzer)
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = io::Result<String>>, Error> {
    let f = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(BufReader::new(f).lines())
}

fn read_error(path: &Path, e: io::Error) -> CliError {
    CliError::Domain(Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli, out: &mut impl Write) -> CliResult {
    let g = &cli.global;
    match cli.command {
        Command::Schema { action } => schema_cmd(g, action, out),
        Command::Encode { ipa } => encode_cmd(g, &ipa, out),
        Command::Analyze { ipa } => analyze_cmd(g, &ipa, out),
        Command::Frontend {
            lexicon,
            mapping,
            text,
            input,
            source,
        } => frontend_cmd(g, &lexicon, &mapping, text, input, &source, out),
        Command::Inventory { segments } => inventory_cmd(g, &segments, out),
        Command::Oos { inventory, target } => oos_cmd(g, &inventory, &target, out),
        Command::Upr {
            inventory,
            utterances,
            types,
            lexicon,
            mapping,
        } => upr_cmd(g, &inventory, &utterances, types, lexicon.zip(mapping), out),
        Command::Nearest {
            inventory,
            phoneme,
            k,
            embedding,
            dim,
            seed,
            weights,
            cosine,
        } => {
            let embed = embedding.then_some(EmbedOpts {
                dim,
                seed,
                weights,
                cosine,
            });
            nearest_cmd(g, &inventory, &phoneme, k, embed, out)
        }
        Command::Plan {
            strategy,
            inventory,
            target,
            overrides,
            seed,
        } => plan_cmd(g, strategy, &inventory, &target, overrides.as_deref(), seed, out),
        Command::Project {
            dim,
            seed,
            weights,
            segments,
            chart,
            out: path,
            export_weights,
        } => project_cmd(g, dim, seed, weights, segments, chart, &path, export_weights, out),
    }
}

fn schema_cmd(g: &Global, action: SchemaAction, out: &mut impl Write) -> CliResult {
    let schema = schema::load_schema(g.schema.as_deref())?;
    match (action, g.format) {
        (SchemaAction::Validate, Format::Json) => {
            let v = json!({"valid": true, "features": schema.features().len(), "total_bits": schema.total_bits()});
            writeln!(out, "{v}")?;
        }
        (SchemaAction::Validate, _) => {
            writeln!(out, "ok: {} features, {} bits", schema.features().len(), schema.total_bits())?;
        }
        (SchemaAction::Show, Format::Json) => writeln!(out, "{}", schema.to_json())?,
        (SchemaAction::Show, Format::Csv) => {
            writeln!(out, "feature,offset,width,nullable,values")?;
            for f in schema.features() {
                writeln!(out, "{},{},{},{},{}", f.name, f.bit_offset, f.width(), f.nullable, f.values.join("|"))?;
            }
        }
        (SchemaAction::Show, Format::Table) => {
            writeln!(out, "{:<12} {:>6} {:>5} {:>8}  values", "feature", "offset", "width", "nullable")?;
            for f in schema.features() {
                writeln!(
                    out,
                    "{:<12} {:>6} {:>5} {:>8}  {}",
                    f.name,
                    f.bit_offset,
                    f.width(),
                    f.nullable,
                    f.values.join(" ")
                )?;
            }
            writeln!(out, "total bits: {}", schema.total_bits())?;
        }
    }
    Ok(())
}

fn encode_cmd(g: &Global, ipa: &str, out: &mut impl Write) -> CliResult {
    let an = analyzer(g)?;
    let segments = an.tokenize(ipa)?;
    let rows = an.encode(&segments)?;
    match g.format {
        Format::Csv => frontend::write_matrix_csv(&segments, &rows, an.schema(), &mut *out, true)?,
        Format::Json => {
            let items: Vec<_> = segments
                .iter()
                .zip(&rows)
                .map(|(s, b)| json!({"symbol": s, "kind": s.kind, "bits": b.to_string()}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&items)?)?;
        }
        Format::Table => {
            for (s, b) in segments.iter().zip(&rows) {
                writeln!(out, "{:<6} {:<14} {}", s.to_string(), s.kind.to_string(), b)?;
            }
        }
    }
    Ok(())
}

fn single_segment(an: &Analyzer, ipa: &str) -> Result<Segment, CliError> {
    let mut segments = an.tokenize(ipa)?;
    if segments.len() != 1 {
        return Err(CliError::Usage(format!(
            "`{ipa}` has {} segments; expected exactly one",
            segments.len()
        )));
    }
    Ok(segments.remove(0))
}

fn analyze_cmd(g: &Global, ipa: &str, out: &mut impl Write) -> CliResult {
    let an = analyzer(g)?;
    let seg = single_segment(&an, ipa)?;
    let v = an.analyze(&seg)?;
    match g.format {
        Format::Json => {
            let j = json!({"symbol": seg, "features": v.categorical, "bits": v.bits.to_string()});
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Csv => {
            writeln!(out, "feature,value")?;
            for f in an.schema().features() {
                writeln!(out, "{},{}", f.name, v.categorical.get(&f.name).unwrap_or("NULL"))?;
            }
        }
        Format::Table => {
            writeln!(out, "segment: {seg}")?;
            for f in an.schema().features() {
                writeln!(out, "  {:<12} {}", f.name, v.categorical.get(&f.name).unwrap_or("NULL"))?;
            }
            writeln!(out, "bits: {}", v.bits)?;
        }
    }
    Ok(())
}

fn frontend_cmd(
    g: &Global,
    lexicon: &Path,
    mapping: &Path,
    text: Option<String>,
    input: Option<PathBuf>,
    source: &str,
    out: &mut impl Write,
) -> CliResult {
    let an = analyzer(g)?;
    let table = MappingTable::load(mapping, &an)?;
    let lex = frontend::load_lexicon(lexicon, source)?;
    let fe = Frontend::new(lex, table, an);

    let lines: Box<dyn Iterator<Item = Result<String, CliError>>> = match (text, &input) {
        (Some(t), _) => Box::new(std::iter::once(Ok(t))),
        (None, Some(path)) => {
            let path = path.clone();
            Box::new(open_lines(&path)?.map(move |l| l.map_err(|e| read_error(&path, e))))
        }
        (None, None) => return Err(CliError::Usage("one of --text or --input is required".into())),
    };

    let mut first = true;
    if g.format == Format::Json {
        write!(out, "[")?;
    }
    for line in lines {
        let line = line?;
        if input.is_some() && line.trim().is_empty() {
            continue;
        }
        let utt = fe.utterance(&line)?;
        match g.format {
            Format::Csv => utt.write_csv(fe.analyzer.schema(), &mut *out, first)?,
            Format::Json => {
                if !first {
                    write!(out, ",")?;
                }
                write!(out, "\n{}", utt.to_json())?;
            }
            Format::Table => {
                writeln!(out, "{}", phonofeat::ipa::render(&utt.segments))?;
            }
        }
        first = false;
    }
    if g.format == Format::Json {
        writeln!(out, "\n]")?;
    }
    Ok(())
}

fn load_inventory(g: &Global, path: &Path, an: &Analyzer) -> Result<PhonemeInventory, Error> {
    PhonemeInventory::load(path, g.count_stress_variants, an)
}

fn inventory_cmd(g: &Global, path: &Path, out: &mut impl Write) -> CliResult {
    let an = analyzer(g)?;
    let inv = load_inventory(g, path, &an)?;
    let members: Vec<String> = inv.members().map(Segment::to_string).collect();
    match g.format {
        Format::Json => {
            let j = json!({"name": inv.name, "count": inv.len(), "members": members});
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Csv => {
            writeln!(out, "phoneme")?;
            for m in &members {
                writeln!(out, "{m}")?;
            }
        }
        Format::Table => {
            writeln!(out, "{}", members.join(" "))?;
            writeln!(out, "{} phonemes", inv.len())?;
        }
    }
    Ok(())
}

fn oos_cmd(g: &Global, corpus: &Path, target: &Path, out: &mut impl Write) -> CliResult {
    let an = analyzer(g)?;
    let corpus = load_inventory(g, corpus, &an)?;
    let target = load_inventory(g, target, &an)?;
    let stats = metrics::inventory_stats(&corpus, &target);
    let members: Vec<Segment> = target.members().cloned().collect();
    let oos: Vec<String> = zeroshot::detect_oos(&members, &corpus)
        .iter()
        .map(Segment::to_string)
        .collect();
    match g.format {
        Format::Json => {
            let j = json!({
                "corpus": corpus.name, "target": target.name,
                "unique": stats.unique, "oos": stats.oos, "oos_phonemes": oos,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Csv => {
            writeln!(out, "corpus,phonemes,oos")?;
            writeln!(out, "{},{},{}", corpus.name, stats.unique, stats.oos)?;
        }
        Format::Table => {
            write!(out, "{}", metrics::inventory_table(&[(&corpus.name, stats)]))?;
            writeln!(out, "OOS in {}: {}", target.name, oos.join(" "))?;
        }
    }
    Ok(())
}

fn upr_cmd(
    g: &Global,
    inventory: &Path,
    utterances: &Path,
    types: bool,
    text_mode: Option<(PathBuf, PathBuf)>,
    out: &mut impl Write,
) -> CliResult {
    let an = analyzer(g)?;
    let inv = load_inventory(g, inventory, &an)?;
    let counting = if types { OosCounting::Types } else { OosCounting::Tokens };
    let fe = match text_mode {
        Some((lexicon, mapping)) => {
            let table = MappingTable::load(&mapping, &an)?;
            let lex = frontend::load_lexicon(&lexicon, "lexicon")?;
            Some(Frontend::new(lex, table, an.clone()))
        }
        None => None,
    };

    let mut acc = TestSetAccumulator::default();
    match g.format {
        Format::Json => write!(out, "{{\"utterances\":[")?,
        Format::Csv => writeln!(out, "line,words,phonemes,oos,upr_percent")?,
        Format::Table => writeln!(out, "{:>5} {:>6} {:>9} {:>4} {:>8}", "line", "words", "phonemes", "oos", "upr%")?,
    }
    for (i, line) in open_lines(utterances)?.enumerate() {
        let line = line.map_err(|e| read_error(utterances, e))?;
        if line.trim().is_empty() || line.starts_with("//") {
            continue;
        }
        let segments = match &fe {
            Some(fe) => fe.segments(&line)?.1,
            None => an.tokenize(&line)?,
        };
        let s = metrics::upr(&segments, &inv, counting)?;
        let line_no = i + 1;
        match g.format {
            Format::Json => {
                if acc.count() > 0 {
                    write!(out, ",")?;
                }
                let mut v = serde_json::to_value(&s)?;
                v["line"] = json!(line_no);
                write!(out, "\n{v}")?;
            }
            Format::Csv => writeln!(
                out,
                "{},{},{},{},{}",
                line_no, s.word_count, s.phoneme_count, s.oos_count, s.upr_percent
            )?,
            Format::Table => writeln!(
                out,
                "{:>5} {:>6} {:>9} {:>4} {:>8.2}",
                line_no, s.word_count, s.phoneme_count, s.oos_count, s.upr_percent
            )?,
        }
        acc.push(&s);
    }
    let summary = acc.finish()?;
    match g.format {
        Format::Json => writeln!(out, "\n],\"summary\":{}}}", serde_json::to_string(&summary)?)?,
        Format::Csv => {}
        Format::Table => {
            writeln!(out)?;
            write!(out, "{}", metrics::testset_table(&[(&inv.name, summary)]))?;
        }
    }
    Ok(())
}

struct EmbedOpts {
    dim: usize,
    seed: u64,
    weights: Option<PathBuf>,
    cosine: bool,
}

fn layer_for(an: &Analyzer, dim: usize, seed: u64, weights: Option<&Path>, realized: &[phonofeat::BitVector]) -> Result<ProjectionLayer, CliError> {
    let layer = match weights {
        Some(path) => ProjectionLayer::load_weights(path)?,
        None => ProjectionLayer::init_injective(dim, an.schema().total_bits(), seed, realized)?,
    };
    if layer.total_bits() != an.schema().total_bits() {
        return Err(CliError::Domain(Error::LengthMismatch {
            expected: an.schema().total_bits(),
            actual: layer.total_bits(),
        }));
    }
    Ok(layer)
}

fn nearest_cmd(
    g: &Global,
    inventory: &Path,
    phoneme: &str,
    k: usize,
    embed: Option<EmbedOpts>,
    out: &mut impl Write,
) -> CliResult {
    let an = analyzer(g)?;
    let inv = load_inventory(g, inventory, &an)?;
    let query = single_segment(&an, phoneme)?;
    let ranked: Vec<(String, serde_json::Value)> = match embed {
        None => zeroshot::suggest_nearest(&query, &inv, k, &an)?
            .into_iter()
            .map(|n| (n.segment.to_string(), json!(n.distance)))
            .collect(),
        Some(opts) => {
            let layer = layer_for(&an, opts.dim, opts.seed, opts.weights.as_deref(), &[])?;
            let metric = if opts.cosine { Metric::Cosine } else { Metric::Euclidean };
            projection::nearest_in_embedding(&layer, &query, &inv, k, &an, metric)?
                .into_iter()
                .map(|(s, d)| (s.to_string(), json!(d)))
                .collect()
        }
    };
    match g.format {
        Format::Json => {
            let items: Vec<_> = ranked
                .iter()
                .enumerate()
                .map(|(i, (s, d))| json!({"rank": i + 1, "phoneme": s, "distance": d}))
                .collect();
            let j = json!({"query": query, "neighbors": items});
            writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        }
        Format::Csv => {
            writeln!(out, "rank,phoneme,distance")?;
            for (i, (s, d)) in ranked.iter().enumerate() {
                writeln!(out, "{},{},{}", i + 1, s, d)?;
            }
        }
        Format::Table => {
            for (i, (s, d)) in ranked.iter().enumerate() {
                writeln!(out, "{:>3}  {:<6} {}", i + 1, s, d)?;
            }
        }
    }
    Ok(())
}

fn plan_cmd(
    g: &Global,
    strategy: Strategy,
    inventory: &Path,
    target: &Path,
    overrides: Option<&Path>,
    seed: u64,
    out: &mut impl Write,
) -> CliResult {
    let an = analyzer(g)?;
    let inv = load_inventory(g, inventory, &an)?;
    let text = std::fs::read_to_string(target).map_err(|e| read_error(target, e))?;
    let mut segments = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with("//")) {
        segments.extend(an.tokenize(line)?);
    }
    let oos = zeroshot::detect_oos(&segments, &inv);
    let overrides = overrides.map(|p| ManualOverrides::load(p, &an)).transpose()?;
    let plan = zeroshot::build_plan(strategy, &oos, &inv, overrides.as_ref(), Some(seed), &an)?;
    match g.format {
        Format::Json => writeln!(out, "{}", plan.to_json())?,
        Format::Csv => {
            writeln!(out, "oos,target,distance,overridden,vector_id")?;
            for r in &plan.resolutions {
                let opt = |v: Option<String>| v.unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.oos,
                    opt(r.target.as_ref().map(Segment::to_string)),
                    opt(r.distance.map(|d| d.to_string())),
                    opt(r.overridden.map(|o| o.to_string())),
                    opt(r.vector_id.map(|v| v.to_string())),
                )?;
            }
        }
        Format::Table => {
            writeln!(out, "strategy: {strategy}, {} OOS phonemes", oos.len())?;
            if strategy == Strategy::Auto {
                writeln!(out, "features inferred from IPA; no remapping")?;
            }
            for r in &plan.resolutions {
                match (&r.target, r.vector_id) {
                    (Some(t), _) => writeln!(
                        out,
                        "  {} -> {} (distance {}{})",
                        r.oos,
                        t,
                        r.distance.unwrap_or_default(),
                        if r.overridden == Some(true) { ", expert override" } else { "" }
                    )?,
                    (None, Some(id)) => writeln!(out, "  {} -> random vector #{id} (seed {seed})", r.oos)?,
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn project_cmd(
    g: &Global,
    dim: usize,
    seed: u64,
    weights: Option<PathBuf>,
    segments: Option<PathBuf>,
    chart: bool,
    path: &Path,
    export_weights: Option<PathBuf>,
    out: &mut impl Write,
) -> CliResult {
    let an = analyzer(g)?;
    let segs: Vec<Segment> = if chart {
        an.chart().bases().map(Segment::phoneme).collect()
    } else {
        let file = segments.expect("clap requires --segments without --chart");
        let text = std::fs::read_to_string(&file).map_err(|e| read_error(&file, e))?;
        let mut segs = Vec::new();
        for line in text.lines().filter(|l| !l.starts_with("//")) {
            segs.extend(an.tokenize(line)?);
        }
        segs
    };
    let realized = an.encode(&segs)?;
    let layer = layer_for(&an, dim, seed, weights.as_deref(), &realized)?;
    projection::export_embeddings(&layer, &segs, &an, path)?;
    if let Some(wpath) = export_weights {
        let f = File::create(&wpath).map_err(|e| read_error(&wpath, e))?;
        layer.write_weights(BufWriter::new(f))?;
    }
    match g.format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({"rows": segs.len(), "dim": layer.embedding_dim(), "parameters": layer.parameter_count(), "sub_seed": layer.sub_seed(), "out": path})
        )?,
        _ => writeln!(
            out,
            "wrote {} rows x {} dims to {} ({} parameters)",
            segs.len(),
            layer.embedding_dim(),
            path.display(),
            layer.parameter_count()
        )?,
    }
    Ok(())
}
