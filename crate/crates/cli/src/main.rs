use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use bifgraph::classes::{cactus_count, classify, husimi_count, triangular_cactus_readings};
use bifgraph::diagram::validate_diagram;
use bifgraph::enumeration::{
    count_colored, count_kary_formula, enumerate_colored, ratio_sequence, share_sequence, CountKey,
    CountTable, EnumerationSpec, Limits, RatioEntry, TreeMode,
};
use bifgraph::io::{
    emit_diagram, emit_diagram_dot, emit_graph, emit_graph_dot, emit_matroid, parse_diagram,
    parse_graph, parse_matroid, to_pretty,
};
use bifgraph::laws::parse_law_table;
use bifgraph::matroid::{graphic_matroid, has_vamos_minor, vamos, Matroid};
use bifgraph::representations::{represent, Representation};
use bifgraph::spanning::{spanning_count_kirchhoff, spanning_enumerate_brute, tutte_11};
use bifgraph::{builtin_table, LawTable};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bifgraph",
    version,
    about = "Orbit-index colored bifurcation diagrams and their graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Law table override document (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    law_table: Option<PathBuf>,
    /// Tree family: plane (positional slots), ordered, or free.
    #[arg(long, global = true, default_value = "plane")]
    mode: TreeMode,
    /// Cap on explicitly enumerated items.
    #[arg(long, global = true, env = "BIFGRAPH_LIMIT")]
    limit: Option<usize>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, value_enum)]
    emit: Option<Emit>,
    /// Report enumeration progress on stderr.
    #[arg(long, global = true)]
    progress: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Json,
    Csv,
    /// Count rows only (k,d,n,mode,count).
    Counts,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpanningMethod {
    Kirchhoff,
    Brute,
    Tutte,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram document against the law table of its dimension.
    Validate {
        file: PathBuf,
        /// Degree bound parameter (vertex degree at most k + 2); defaults to
        /// the smallest k the diagram needs.
        #[arg(short)]
        k: Option<u32>,
    },
    /// List colored trees with n nodes and at most k + 1 children per node.
    Enumerate {
        #[arg(short, long)]
        k: u32,
        #[arg(short, long, default_value_t = 4)]
        d: u32,
        #[arg(short, long)]
        n: usize,
        /// Print only the count, without listing trees.
        #[arg(long)]
        count_only: bool,
    },
    /// Ratios count(k_high) / count(k_low) for n = 1..=n_max.
    Ratio {
        #[arg(long, alias = "k1")]
        k_low: u32,
        #[arg(long, alias = "k2")]
        k_high: u32,
        #[arg(short, long, default_value_t = 4)]
        d: u32,
        #[arg(long)]
        n_max: usize,
    },
    /// Shares count(d_low) / count(d_high) at fixed k for n = 1..=n_max.
    Share {
        #[arg(short, long)]
        k: u32,
        #[arg(long, alias = "d1")]
        d_low: u32,
        #[arg(long, alias = "d2")]
        d_high: u32,
        #[arg(long)]
        n_max: usize,
    },
    /// Class membership of a graph document.
    Classify { file: PathBuf },
    /// Spanning tree count of a graph document.
    Spanning {
        file: PathBuf,
        /// Cross-check by brute force and by deletion-contraction.
        #[arg(long)]
        check: bool,
        /// Counting method.
        #[arg(long, value_enum, default_value = "kirchhoff")]
        method: SpanningMethod,
    },
    /// Star, clique or line representation of a diagram.
    #[command(group(ArgGroup::new("kind").required(true).args(["star", "clique", "line"])))]
    Repr {
        file: PathBuf,
        #[arg(long)]
        star: bool,
        #[arg(long)]
        clique: bool,
        #[arg(long)]
        line: bool,
    },
    /// Rank, circuits and Vamos-minor test for a matroid.
    #[command(group(ArgGroup::new("source").required(true).args(["file", "graph", "vamos"])))]
    Matroid {
        /// Matroid document with groundSet and bases.
        file: Option<PathBuf>,
        /// Use the graphic matroid of this graph document.
        #[arg(long, value_name = "FILE")]
        graph: Option<PathBuf>,
        /// Use the Vamos matroid.
        #[arg(long)]
        vamos: bool,
        /// Report only whether a Vamos minor exists.
        #[arg(long)]
        vamos_minor: bool,
    },
    /// Closed-form and recorded counts, as a subcommand or a single flag.
    #[command(group(ArgGroup::new("formula").args(["husimi", "cactus", "kary"])))]
    Count {
        #[command(subcommand)]
        what: Option<CountCommand>,
        /// Same as `count husimi SIZES`.
        #[arg(long, value_name = "SIZES")]
        husimi: Option<String>,
        /// Same as `count cactus SIZES`.
        #[arg(long, value_name = "SIZES")]
        cactus: Option<String>,
        /// Same as `count kary -k K -n N`.
        #[arg(long, num_args = 2, value_names = ["K", "N"])]
        kary: Option<Vec<u64>>,
    },
    /// Re-emit a diagram or graph document in canonical JSON or DOT.
    Convert { file: PathBuf },
}

#[derive(Subcommand)]
enum CountCommand {
    /// k-ary trees with n nodes.
    Kary {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
    },
    /// Labeled block graphs with the given block sizes, as SIZE:COUNT,...
    Husimi { sizes: String },
    /// Labeled cacti with the given polygon sizes (2 = edge), as SIZE:COUNT,...
    Cactus { sizes: String },
    /// Labeled triangular cacti on an odd number of nodes.
    Triangular { nodes: u64 },
    /// Colored tree counts for n = 1..=n_max, as a count table.
    Colored {
        #[arg(short)]
        k: u32,
        #[arg(short, default_value_t = 4)]
        d: u32,
        #[arg(long)]
        n_max: usize,
    },
}

struct Ctx {
    cli_json: bool,
    emit: Option<Emit>,
    law_table: Option<PathBuf>,
    mode: TreeMode,
    limits: Limits,
}

impl Ctx {
    fn json(&self) -> bool {
        self.cli_json || self.emit == Some(Emit::Json)
    }

    fn table(&self, d: u32) -> Result<LawTable> {
        match &self.law_table {
            Some(path) => {
                let t = parse_law_table(&read(path)?)
                    .with_context(|| format!("law table {}", path.display()))?;
                if t.dimension() != d {
                    bail!(
                        "law table {} is for dimension {}, not {d}",
                        path.display(),
                        t.dimension()
                    );
                }
                Ok(t)
            }
            None => Ok(builtin_table(d)?),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn ratio_text(r: &RatioEntry) -> Value {
    match r {
        Some(r) => json!(r.to_string()),
        None => Value::Null,
    }
}

fn parse_sizes(text: &str) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (size, count) = part
            .split_once(':')
            .with_context(|| format!("expected SIZE:COUNT, got {part:?}"))?;
        *out.entry(size.trim().parse()?).or_insert(0) += count.trim().parse::<usize>()?;
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = cancel.clone();
    // Failure only means a handler is already installed.
    let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    let mut limits = Limits::with_max(cli.limit.unwrap_or(Limits::DEFAULT_MAX));
    limits.cancel = Some(cancel);
    if cli.progress {
        limits.progress = Some(Arc::new(|done, total| eprintln!("progress {done}/{total}")));
    }
    let ctx = Ctx {
        cli_json: cli.json,
        emit: cli.emit,
        law_table: cli.law_table,
        mode: cli.mode,
        limits,
    };
    let mut out = io::stdout().lock();
    match run(&ctx, cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(ctx: &Ctx, command: Command, out: &mut impl Write) -> Result<ExitCode> {
    match command {
        Command::Validate { file, k } => {
            let diagram = parse_diagram(&read(&file)?)?;
            let k = k.unwrap_or_else(|| {
                let max = diagram
                    .vertices()
                    .iter()
                    .map(|v| diagram.degree(v.id))
                    .max()
                    .unwrap_or(0);
                max.saturating_sub(2).max(1) as u32
            });
            let report = validate_diagram(&diagram, k, &ctx.table(diagram.dimension())?)?;
            if ctx.json() {
                let doc =
                    json!({ "valid": report.is_valid(), "k": k, "violations": report.violations });
                write!(out, "{}", to_pretty(&doc))?;
            } else if report.is_valid() {
                writeln!(out, "valid (d={}, k={k})", diagram.dimension())?;
            } else {
                writeln!(
                    out,
                    "invalid (d={}, k={k}): {} violation(s)",
                    diagram.dimension(),
                    report.violations.len()
                )?;
                for v in &report.violations {
                    writeln!(out, "  {}", serde_json::to_string(v)?)?;
                }
            }
            return Ok(if report.is_valid() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Command::Enumerate {
            k,
            d,
            n,
            count_only,
        } => {
            let spec = EnumerationSpec {
                k,
                n,
                mode: ctx.mode,
                table: ctx.table(d)?,
            };
            if count_only || ctx.emit == Some(Emit::Counts) {
                let count = count_colored(&spec, &ctx.limits)?;
                emit_counts(ctx, out, k, d, [(n, count)])?;
                return Ok(ExitCode::SUCCESS);
            }
            let trees = enumerate_colored(&spec, &ctx.limits)?;
            match ctx.emit {
                Some(Emit::Dot) => {
                    for t in &trees {
                        write!(out, "{}", emit_graph_dot(&t.to_graph()))?;
                    }
                }
                Some(Emit::Csv) => {
                    writeln!(out, "tree,slots,colors")?;
                    for (i, t) in trees.iter().enumerate() {
                        let slots: Vec<String> =
                            t.shape.masks().iter().map(u32::to_string).collect();
                        let colors: Vec<String> = t.colors.iter().map(|c| c.to_string()).collect();
                        writeln!(out, "{i},{},{}", slots.join(" "), colors.join(" "))?;
                    }
                }
                _ if ctx.json() => {
                    let list: Vec<Value> = trees
                        .iter()
                        .map(|t| {
                            let counts: Vec<usize> = (0..t.shape.len()).map(|v| t.shape.child_count(v)).collect();
                            json!({ "slots": t.shape.masks(), "childCounts": counts, "colors": t.colors })
                        })
                        .collect();
                    let doc = json!({
                        "k": k, "d": d, "n": n, "mode": ctx.mode.to_string(),
                        "count": trees.len().to_string(), "trees": list,
                    });
                    write!(out, "{}", to_pretty(&doc))?;
                }
                _ => {
                    writeln!(
                        out,
                        "{} colored trees (k={k}, d={d}, n={n}, mode={})",
                        trees.len(),
                        ctx.mode
                    )?;
                    for t in &trees {
                        let colors: Vec<String> = t.colors.iter().map(|c| c.to_string()).collect();
                        writeln!(out, "{:?} {}", t.shape.masks(), colors.join(" "))?;
                    }
                }
            }
        }
        Command::Ratio {
            k_low,
            k_high,
            d,
            n_max,
        } => {
            let seq = ratio_sequence(k_low, k_high, &ctx.table(d)?, n_max, ctx.mode, &ctx.limits)?;
            emit_sequence(ctx, out, "ratio", &seq)?;
        }
        Command::Share {
            k,
            d_low,
            d_high,
            n_max,
        } => {
            if ctx.law_table.is_some() {
                bail!("share compares builtin tables; --law-table is not supported here");
            }
            let seq = share_sequence(
                k,
                &builtin_table(d_low)?,
                &builtin_table(d_high)?,
                n_max,
                ctx.mode,
                &ctx.limits,
            )?;
            emit_sequence(ctx, out, "share", &seq)?;
        }
        Command::Classify { file } => {
            let g = parse_graph(&read(&file)?)?;
            let c = classify(&g);
            if ctx.json() {
                write!(out, "{}", to_pretty(&c))?;
            } else {
                let show = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
                writeln!(out, "connected: {}", c.connected)?;
                writeln!(out, "tree: {}", c.tree)?;
                writeln!(out, "block graph: {}", show(c.block_graph))?;
                writeln!(out, "cactus: {}", show(c.cactus))?;
                writeln!(out, "claw-free: {}", c.claw_free)?;
                writeln!(out, "diamond minor: {}", show(c.diamond_minor))?;
            }
        }
        Command::Spanning {
            file,
            check,
            method,
        } => {
            let g = parse_graph(&read(&file)?)?;
            let count = spanning_count_kirchhoff(&g)?;
            let value = match method {
                SpanningMethod::Kirchhoff => count.count.clone(),
                SpanningMethod::Brute => BigUint::from(spanning_enumerate_brute(&g)?.len()),
                SpanningMethod::Tutte => tutte_11(&g)?,
            };
            let mut doc = json!({ "count": value.to_string(), "connected": count.connected });
            if check {
                let brute = spanning_enumerate_brute(&g)?.len();
                let tutte = tutte_11(&g)?;
                doc["brute"] = json!(brute.to_string());
                doc["tutte11"] = json!(tutte.to_string());
            }
            if ctx.json() {
                write!(out, "{}", to_pretty(&doc))?;
            } else {
                writeln!(out, "spanning trees: {value}")?;
                if check {
                    writeln!(out, "brute force: {}", doc["brute"].as_str().unwrap())?;
                    writeln!(out, "T(1,1): {}", doc["tutte11"].as_str().unwrap())?;
                }
            }
        }
        Command::Repr {
            file, star, clique, ..
        } => {
            let diagram = parse_diagram(&read(&file)?)?;
            let kind = if star {
                Representation::Star
            } else if clique {
                Representation::Clique
            } else {
                Representation::Line
            };
            let g = represent(&diagram, kind);
            if ctx.json() {
                write!(out, "{}", emit_graph(&g))?;
            } else {
                write!(out, "{}", emit_graph_dot(&g))?;
            }
        }
        Command::Matroid {
            file,
            graph,
            vamos: use_vamos,
            vamos_minor,
        } => {
            let m: Matroid = if use_vamos {
                vamos()
            } else if let Some(path) = graph {
                graphic_matroid(&parse_graph(&read(&path)?)?)
            } else {
                parse_matroid(&read(file.as_deref().expect("group requires a source"))?)?
            };
            if ctx.emit == Some(Emit::Json) {
                write!(out, "{}", emit_matroid(&m))?;
                return Ok(ExitCode::SUCCESS);
            }
            let minor = has_vamos_minor(&m)?;
            if vamos_minor {
                if ctx.json() {
                    write!(out, "{}", to_pretty(&json!({ "vamosMinor": minor })))?;
                } else {
                    writeln!(out, "vamos minor: {minor}")?;
                }
                return Ok(ExitCode::SUCCESS);
            }
            let circuits = m.circuits();
            if ctx.json() {
                let doc = json!({
                    "elements": m.len(), "rank": m.rank(),
                    "circuits": circuits.iter().map(|&c| m.names(c)).collect::<Vec<_>>(),
                    "vamosMinor": minor,
                });
                write!(out, "{}", to_pretty(&doc))?;
            } else {
                writeln!(out, "elements: {}", m.len())?;
                writeln!(out, "rank: {}", m.rank())?;
                writeln!(out, "circuits: {}", circuits.len())?;
                writeln!(out, "vamos minor: {minor}")?;
            }
        }
        Command::Count {
            what,
            husimi,
            cactus,
            kary,
        } => {
            let what = match (what, husimi, cactus, kary) {
                (Some(w), None, None, None) => w,
                (None, Some(sizes), None, None) => CountCommand::Husimi { sizes },
                (None, None, Some(sizes), None) => CountCommand::Cactus { sizes },
                (None, None, None, Some(kn)) => CountCommand::Kary { k: kn[0], n: kn[1] },
                (None, ..) => {
                    bail!("count needs a subcommand or one of --husimi, --cactus, --kary")
                }
                _ => bail!("give either a count subcommand or a flag, not both"),
            };
            count(ctx, out, what)?
        }
        Command::Convert { file } => {
            let text = read(&file)?;
            let value: Value = serde_json::from_str(&text).context("not JSON")?;
            let dot = ctx.emit == Some(Emit::Dot);
            if value.get("vertexCount").is_some() {
                let g = parse_graph(&text)?;
                write!(
                    out,
                    "{}",
                    if dot {
                        emit_graph_dot(&g)
                    } else {
                        emit_graph(&g)
                    }
                )?;
            } else {
                let d = parse_diagram(&text)?;
                write!(
                    out,
                    "{}",
                    if dot {
                        emit_diagram_dot(&d)
                    } else {
                        emit_diagram(&d)
                    }
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_sequence(ctx: &Ctx, out: &mut impl Write, name: &str, seq: &[RatioEntry]) -> Result<()> {
    if ctx.json() {
        let rows: Vec<Value> = seq
            .iter()
            .enumerate()
            .map(|(i, r)| json!({ "n": i + 1, name: ratio_text(r) }))
            .collect();
        write!(out, "{}", to_pretty(&rows))?;
    } else if ctx.emit == Some(Emit::Csv) {
        writeln!(out, "n,{name}")?;
        for (i, r) in seq.iter().enumerate() {
            writeln!(
                out,
                "{},{}",
                i + 1,
                r.as_ref().map_or(String::new(), |r| r.to_string())
            )?;
        }
    } else {
        for (i, r) in seq.iter().enumerate() {
            writeln!(
                out,
                "n={:<3} {}",
                i + 1,
                r.as_ref()
                    .map_or("undefined".to_string(), |r| r.to_string())
            )?;
        }
    }
    Ok(())
}

fn emit_counts(
    ctx: &Ctx,
    out: &mut impl Write,
    k: u32,
    d: u32,
    counts: impl IntoIterator<Item = (usize, BigUint)>,
) -> Result<()> {
    let mut table = CountTable::new();
    for (n, c) in counts {
        table.record(
            CountKey {
                k,
                d,
                n,
                mode: ctx.mode,
            },
            c,
            "dynamic programming",
        )?;
    }
    if matches!(ctx.emit, Some(Emit::Csv | Emit::Counts)) {
        table.write_csv(&mut *out)?;
    } else if ctx.json() {
        let rows: Vec<Value> = table
            .iter()
            .map(|(key, c)| json!({ "k": key.k, "d": key.d, "n": key.n, "mode": key.mode.to_string(), "count": c.to_string() }))
            .collect();
        write!(out, "{}", to_pretty(&rows))?;
    } else {
        for (key, c) in table.iter() {
            writeln!(
                out,
                "k={} d={} n={} mode={}: {c}",
                key.k, key.d, key.n, key.mode
            )?;
        }
    }
    Ok(())
}

fn count(ctx: &Ctx, out: &mut impl Write, what: CountCommand) -> Result<()> {
    let value = match what {
        CountCommand::Kary { k, n } => count_kary_formula(k, n)?.to_string(),
        CountCommand::Husimi { sizes } => husimi_count(&parse_sizes(&sizes)?)?.to_string(),
        CountCommand::Cactus { sizes } => cactus_count(&parse_sizes(&sizes)?)?.to_string(),
        CountCommand::Triangular { nodes } => {
            let r = triangular_cactus_readings(nodes)?;
            if ctx.json() {
                write!(out, "{}", to_pretty(&r))?;
                return Ok(());
            }
            r.node_reading.to_string()
        }
        CountCommand::Colored { k, d, n_max } => {
            let table = ctx.table(d)?;
            let counts = (1..=n_max)
                .map(|n| {
                    let spec = EnumerationSpec {
                        k,
                        n,
                        mode: ctx.mode,
                        table: table.clone(),
                    };
                    Ok((n, count_colored(&spec, &ctx.limits)?))
                })
                .collect::<Result<Vec<_>>>()?;
            return emit_counts(ctx, out, k, d, counts);
        }
    };
    if ctx.json() {
        write!(out, "{}", to_pretty(&json!({ "count": value })))?;
    } else {
        writeln!(out, "{value}")?;
    }
    Ok(())
}
