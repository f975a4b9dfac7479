use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use avl_grammar::bench::{bench_text, corpus_files, write_csv, BenchRow};
use avl_grammar::corpus::{gen_corpus, CopyModel, CorpusSpec};
use avl_grammar::io::{dump_text, read_avlg, verify_against_text, write_avlg, RunReport};
use avl_grammar::lz::{lz77_parse, lz_decode, read_lz7f, write_lz7f};
use avl_grammar::repair::repair_compress;
use avl_grammar::{convert_basic, convert_lazy, Factorization};

mod alloc;

#[global_allocator]
static GLOBAL: alloc::Counting = alloc::Counting;

#[derive(Parser)]
#[command(name = "avlg", version, about = "LZ77 parses to AVL grammars")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Basic,
    Lazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Chain,
    Star,
}

#[derive(Subcommand)]
enum Cmd {
    /// Greedy LZ77 parse of a text file into an LZ7F file.
    Parse {
        text: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decode an LZ7F file back into the text.
    Decode {
        lz77: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Convert an LZ7F parse into an AVLG grammar file.
    Convert {
        lz77: PathBuf,
        #[arg(long, value_enum, default_value = "lazy")]
        algo: Algo,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Probability of registering a new nonterminal for deduplication.
        #[arg(long, default_value_t = 0.125)]
        sample_prob: f64,
        #[arg(long, default_value_t = 1)]
        kr_seed: u64,
        /// Check every fingerprint hit by expansion.
        #[arg(long)]
        paranoid: bool,
        /// Drop unreachable nonterminals (basic only).
        #[arg(long)]
        prune: bool,
        #[arg(long)]
        verify_with: Option<PathBuf>,
        /// Append the stats row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that a grammar expands to a text.
    Verify { grammar: PathBuf, text: PathBuf },
    /// Print grammar statistics as JSON.
    Stats { grammar: PathBuf },
    /// Print the rules of a grammar, one per line.
    Dump { grammar: PathBuf },
    /// Compare basic, lazy and Re-Pair sizes on every file of a directory.
    Bench {
        corpus: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        kr_seed: u64,
        /// Write zeros in the time columns so reruns compare byte for byte.
        #[arg(long)]
        no_timing: bool,
    },
    /// Write a synthetic repetitive file.
    GenCorpus {
        #[arg(long, default_value_t = 10_000)]
        seed_size: usize,
        #[arg(long, default_value_t = 200)]
        copies: usize,
        #[arg(long, default_value_t = 0.0)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 4)]
        sigma: u16,
        #[arg(long, default_value_t = 1)]
        rng_seed: u64,
        #[arg(long, value_enum, default_value = "chain")]
        model: Model,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Re-Pair size of a text file.
    Repair {
        text: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// A failed check rather than a crash; exits with status 1.
#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn load_parse(path: &Path) -> Result<Factorization> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_lz7f(std::io::BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn append_csv(path: &Path, header: &str, row: &str) -> Result<()> {
    let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(f, "{header}")?;
    }
    writeln!(f, "{row}")?;
    Ok(())
}

fn parse(text: &Path, out: Option<PathBuf>) -> Result<()> {
    let data = read(text)?;
    if data.is_empty() {
        bail!("{}: empty text", text.display());
    }
    let fact = lz77_parse(&data)?;
    let out = out.unwrap_or_else(|| text.with_extension("lz7f"));
    let mut w = create(&out)?;
    write_lz7f(&fact, &mut w)?;
    w.flush()?;
    let (n, z) = (fact.n(), fact.f());
    println!("n={n} z={z} n/z={:.3}", n as f64 / z as f64);
    Ok(())
}

struct ConvertArgs {
    lz77: PathBuf,
    algo: Algo,
    out: Option<PathBuf>,
    sample_prob: f64,
    kr_seed: u64,
    paranoid: bool,
    prune: bool,
    verify_with: Option<PathBuf>,
    csv: Option<PathBuf>,
}

fn convert(a: ConvertArgs) -> Result<()> {
    let fact = load_parse(&a.lz77)?;
    alloc::reset_peak();
    let t = Instant::now();
    let (grammar, report) = match a.algo {
        Algo::Basic => {
            let g = convert_basic(&fact)?;
            let (pre, built) = (g.size(), g.len() as u64);
            let g = if a.prune { g.pruned()? } else { g };
            let report = RunReport {
                algo: if a.prune { "basic-pruned" } else { "basic" }.into(),
                size_pre_flatten: pre,
                size: g.size(),
                records: g.len() as u64,
                peak_records: built,
                peak_live_roots: 1,
                ..Default::default()
            };
            (g, report)
        }
        Algo::Lazy => {
            if a.prune {
                bail!("--prune applies to --algo basic only");
            }
            let (g, _, s) = convert_lazy(&fact, a.sample_prob, a.kr_seed, a.paranoid)?;
            if s.paranoid_mismatches > 0 {
                eprintln!("warning: {} fingerprint collisions rejected", s.paranoid_mismatches);
            }
            let report = RunReport {
                algo: "lazy".into(),
                size_pre_flatten: s.size_pre_flatten,
                size: s.size,
                records: s.records,
                merges_attempted: s.merges_attempted,
                merges_avoided: s.merges_avoided,
                peak_records: s.peak_records,
                peak_live_roots: s.peak_live_roots,
                ..Default::default()
            };
            (g, report)
        }
    };
    let report = RunReport {
        n: fact.n(),
        f: fact.f() as u64,
        wall_ms: t.elapsed().as_secs_f64() * 1e3,
        peak_mem_bytes: alloc::peak() as u64,
        ..report
    }
    .finish();
    if let Some(path) = &a.verify_with {
        let text = read(path)?;
        let start = grammar.start().context("grammar has no start symbol")?;
        if !verify_against_text(&grammar, start, &text) {
            return Err(Mismatch(format!("grammar does not expand to {}", path.display())).into());
        }
        eprintln!("verified against {}", path.display());
    }
    let out = a.out.unwrap_or_else(|| a.lz77.with_extension("avlg"));
    let mut w = create(&out)?;
    write_avlg(&grammar, &mut w)?;
    w.flush()?;
    println!("{}", report.json());
    if let Some(csv) = &a.csv {
        append_csv(csv, &RunReport::csv_header(), &report.csv_row())?;
    }
    Ok(())
}

fn load_grammar(path: &Path) -> Result<avl_grammar::Grammar> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_avlg(std::io::BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn verify(grammar: &Path, text: &Path) -> Result<()> {
    let g = load_grammar(grammar)?;
    let text = read(text)?;
    let start = g.start().context("grammar has no start symbol")?;
    if !verify_against_text(&g, start, &text) {
        return Err(Mismatch("grammar and text differ".into()).into());
    }
    println!("ok");
    Ok(())
}

fn stats(grammar: &Path) -> Result<()> {
    let g = load_grammar(grammar)?;
    let (len, height) = match g.start() {
        Some(s) => (g.explen(s), g.height(s)),
        None => (0, 0),
    };
    let reachable = match g.start() {
        Some(s) => g.reachable(&[s])?.iter().filter(|&&r| r).count(),
        None => 0,
    };
    let json = serde_json::json!({
        "records": g.len(),
        "size": g.size(),
        "start": g.start(),
        "expansion_length": len,
        "height": height,
        "reachable_records": reachable,
        "avl": g.avl_check(),
        "height_bounded": g.height_check(),
    });
    println!("{json}");
    Ok(())
}

fn bench(corpus: &Path, csv: Option<PathBuf>, kr_seed: u64, no_timing: bool) -> Result<bool> {
    let mut rows: Vec<BenchRow> = Vec::new();
    let mut ok = true;
    for path in corpus_files(corpus)? {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let row = read(&path).and_then(|text| Ok(bench_text(&name, &text, kr_seed)?));
        match row {
            Ok(row) if no_timing => {
                rows.push(BenchRow { parse_ms: 0.0, basic_ms: 0.0, lazy_ms: 0.0, repair_ms: 0.0, ..row })
            }
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("{name}: {e:#}");
                ok = false;
            }
        }
    }
    match csv {
        Some(path) => write_csv(&rows, create(&path)?)?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Parse { text, out } => parse(&text, out)?,
        Cmd::Decode { lz77, out } => {
            let text = lz_decode(&load_parse(&lz77)?)?;
            fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
        }
        Cmd::Convert { lz77, algo, out, sample_prob, kr_seed, paranoid, prune, verify_with, csv } => {
            convert(ConvertArgs {
                lz77,
                algo,
                out,
                sample_prob,
                kr_seed,
                paranoid,
                prune,
                verify_with,
                csv,
            })?
        }
        Cmd::Verify { grammar, text } => verify(&grammar, &text)?,
        Cmd::Stats { grammar } => stats(&grammar)?,
        Cmd::Dump { grammar } => print!("{}", dump_text(&load_grammar(&grammar)?)),
        Cmd::Bench { corpus, csv, kr_seed, no_timing } => return bench(&corpus, csv, kr_seed, no_timing),
        Cmd::GenCorpus { seed_size, copies, mutation_rate, sigma, rng_seed, model, out } => {
            let model = match model {
                Model::Chain => CopyModel::Chain,
                Model::Star => CopyModel::Star,
            };
            let spec = CorpusSpec { seed_size, copies, mutation_rate, sigma, rng_seed, model };
            let data = gen_corpus(&spec)?;
            fs::write(&out, data).with_context(|| format!("writing {}", out.display()))?;
        }
        Cmd::Repair { text, csv } => {
            let data = read(&text)?;
            let t = Instant::now();
            let r = repair_compress(&data)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            println!("rules={} sequence={} size={} ms={ms:.1}", r.rules.len(), r.sequence.len(), r.size());
            if let Some(csv) = csv {
                let row = format!("{},{},{},{},{},{ms:.3}", text.display(), data.len(), r.rules.len(), r.sequence.len(), r.size());
                append_csv(&csv, "file,n,rules,sequence,size,ms", &row)?;
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
