use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use multicurve_count::decode::ComponentKind;
use multicurve_count::enumeration::{
    count_by_type, leading_coefficient, parity_rank, to_f64, with_workers, CountTable,
    SurfaceModel,
};
use multicurve_count::error::Invalid;
use multicurve_count::experiment::{integer_grid, parse_grid, run_experiment, ExperimentConfig};
use multicurve_count::fit::powerlaw_fit;
use multicurve_count::hyperbolic::{count_by_length, pruning_constant, FenchelNielsen, LengthFunction};
use multicurve_count::sector::{Sector, Sign};
use multicurve_count::torus::{primitive_count_mobius, primitive_count_sieve, torus_primitive_count};
use multicurve_count::traintrack::{standard_track, WeightVector};
use multicurve_count::{build_surface, Decoder, DtCoords, Error, TypeInvariant};

#[derive(Parser, Debug)]
#[command(name = "mccount", version, about = "Count integral multicurves on closed surfaces")]
struct Cli {
    /// Cap on worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output path. A file for table-producing commands, a directory for `run`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Surface information.
    Surface {
        #[command(subcommand)]
        action: SurfaceCmd,
    },
    /// Check the realizability conditions of coordinates.
    Validate(CoordArgs),
    /// Decode coordinates into weighted components.
    Decode(CoordArgs),
    /// Topological type of the multicurve with these coordinates.
    Type(CoordArgs),
    /// Count lattice multicurves in norm balls, by type.
    Count {
        #[arg(long)]
        genus: usize,
        /// Largest norm; defaults to the top of the grid.
        #[arg(long)]
        norm_max: Option<u64>,
        /// `geometric:lo..hi[:n]` or a comma-separated list; defaults to 1..=norm-max.
        #[arg(long)]
        grid: Option<String>,
        /// Restrict to a sector, e.g. `orthant=+++;t1=0:0.1`.
        #[arg(long)]
        sector: Option<String>,
    },
    /// Leading coefficient of the total count.
    Volume {
        #[arg(long)]
        genus: usize,
    },
    /// Hyperbolic length of a multicurve.
    Length {
        #[arg(long)]
        genus: usize,
        /// Fenchel-Nielsen data `l1,..;theta1,..`.
        #[arg(long = "fn")]
        fnc: String,
        #[arg(long)]
        coords: String,
    },
    /// Count multicurves of one type in length balls.
    CountLength {
        #[arg(long, default_value_t = 2)]
        genus: usize,
        #[arg(long = "fn", default_value = "1,1,1;0,0,0")]
        fnc: String,
        /// Count the type of these coordinates.
        #[arg(long, conflicts_with = "type_key")]
        type_of: Option<String>,
        /// Count this type key; the nonseparating curve by default.
        #[arg(long = "type")]
        type_key: Option<String>,
        #[arg(long)]
        length_max: Option<f64>,
        #[arg(long)]
        grid: String,
    },
    /// Power-law fit of a counts CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Fit one type; totals by default.
        #[arg(long = "type")]
        type_key: Option<String>,
    },
    /// Known-answer oracles.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Run an experiment from a TOML config.
    Run { config: PathBuf },
    /// Train-track operations.
    Track {
        #[command(subcommand)]
        action: TrackCmd,
    },
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    Info {
        #[arg(long)]
        genus: usize,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Primitive vectors of Z^2 with l1 norm at most N.
    Torus {
        #[arg(long)]
        norm_max: u64,
    },
}

#[derive(Subcommand, Debug)]
enum TrackCmd {
    /// Thurston form of two weight files on the standard track of an orthant.
    Form {
        #[arg(long)]
        genus: usize,
        /// Twist signs, e.g. `+-+`.
        #[arg(long)]
        orthant: String,
        u: PathBuf,
        v: PathBuf,
    },
}

#[derive(Args, Debug)]
struct CoordArgs {
    #[arg(long)]
    genus: usize,
    /// `m1,..,mn;t1,..,tn`
    #[arg(long)]
    coords: String,
}

/// A failure with its exit status.
enum Failure {
    Domain(String),
    Audit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn config_hash(args: &[String]) -> String {
    let mut h = Sha256::new();
    for a in args.iter().skip(1) {
        h.update(a.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    eprintln!(
        "{}",
        json!({"tool": "mccount", "version": env!("CARGO_PKG_VERSION"), "config_hash": config_hash(&args)})
    );
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Audit(msg)) => {
            eprintln!("audit: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, v: &Value) -> Outcome {
    let text = format!("{}\n", serde_json::to_string_pretty(v).expect("json"));
    match &cli.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_table(cli: &Cli, table: &CountTable, meta: Value) -> Outcome {
    let body = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"rows": table.rows, "metadata": table.metadata}))
                .expect("json")
        ),
    };
    match &cli.out {
        Some(p) => {
            fs::write(p, body)?;
            let meta_path = p.with_extension("meta.json");
            fs::write(meta_path, format!("{}\n", serde_json::to_string_pretty(&meta).expect("json")))?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn coords(genus: usize, text: &str) -> std::result::Result<(multicurve_count::Surface, DtCoords), Failure> {
    let s = build_surface(genus)?;
    let c: DtCoords = text.parse()?;
    if c.dim() != s.num_cuffs {
        return Err(Error::DimensionMismatch { expected: s.num_cuffs, got: c.dim() }.into());
    }
    Ok((s, c))
}

fn reason(inv: &Invalid) -> &'static str {
    match inv {
        Invalid::Parity { .. } => "parity",
        Invalid::NegativeTwist { .. } => "negative-twist",
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Surface { action: SurfaceCmd::Info { genus } } => {
            let s = build_surface(*genus)?;
            emit(cli, &serde_json::to_value(&s).expect("json"))
        }
        Command::Validate(a) => {
            let (s, c) = coords(a.genus, &a.coords)?;
            match c.validate(&s)? {
                Ok(()) => emit(cli, &json!({"coords": c.to_string(), "valid": true})),
                Err(inv) => {
                    emit(
                        cli,
                        &json!({"coords": c.to_string(), "valid": false, "reason": reason(&inv), "detail": inv.to_string()}),
                    )?;
                    Err(Failure::Domain(reason(&inv).into()))
                }
            }
        }
        Command::Decode(a) => {
            let (s, c) = coords(a.genus, &a.coords)?;
            let mc = Decoder::new(&s).decode(&c)?;
            let comps: Vec<Value> = mc
                .components
                .iter()
                .map(|k| {
                    let kind = match &k.kind {
                        ComponentKind::Cuff(i) => json!({"cuff": i + 1}),
                        ComponentKind::Traced(steps) => json!({"traced_steps": steps.len()}),
                    };
                    json!({"kind": kind, "weight": k.weight, "crossings": k.crossings})
                })
                .collect();
            emit(
                cli,
                &json!({"coords": c.to_string(), "components": comps, "crossings": mc.crossings(), "type_key": mc.type_invariant.to_string()}),
            )
        }
        Command::Type(a) => {
            let (s, c) = coords(a.genus, &a.coords)?;
            c.ensure_valid(&s)?;
            let ty = Decoder::new(&s).classify(&c);
            emit(
                cli,
                &json!({"coords": c.to_string(), "type_key": ty.to_string(), "components": ty.num_components(), "nonseparating_scc": ty.is_nonseparating_scc(), "separating_scc": ty.is_separating_scc()}),
            )
        }
        Command::Count { genus, norm_max, grid, sector } => {
            let grid = match (grid, norm_max) {
                (Some(g), _) => integer_grid(&parse_grid(g)?)?,
                (None, Some(n)) => (1..=*n).collect(),
                (None, None) => return Err(Failure::Domain("need --norm-max or --grid".into())),
            };
            if let Some(n) = norm_max {
                if grid.last().is_some_and(|l| l > n) {
                    return Err(Failure::Domain(format!("grid exceeds --norm-max {n}")));
                }
            }
            let s = build_surface(*genus)?;
            let sector = sector.as_deref().map(|x| Sector::parse(x, s.num_cuffs)).transpose()?;
            let model = SurfaceModel::new(&s);
            let start = Instant::now();
            let table = with_workers(cli.workers, || count_by_type(&model, &grid, sector.as_ref()))?;
            let meta = json!({
                "genus": genus,
                "norm": "sum m_i + sum |t_i|",
                "sector": sector.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                "workers": cli.workers,
                "wall_time_s": start.elapsed().as_secs_f64(),
            });
            emit_table(cli, &table, meta)
        }
        Command::Volume { genus } => {
            let s = build_surface(*genus)?;
            let lc = leading_coefficient(&s);
            emit(
                cli,
                &json!({"genus": genus, "h": s.h, "parity_rank": parity_rank(&s), "leading_coefficient": lc.to_string(), "value": to_f64(&lc)}),
            )
        }
        Command::Length { genus, fnc, coords: text } => {
            let (s, c) = coords(*genus, text)?;
            c.ensure_valid(&s)?;
            let fnc: FenchelNielsen = fnc.parse()?;
            let mut lf = LengthFunction::new(&s, &fnc)?;
            let l = lf.length(&c)?;
            emit(cli, &json!({"coords": c.to_string(), "fn": fnc.to_string(), "length": l}))
        }
        Command::CountLength { genus, fnc, type_of, type_key, length_max, grid } => {
            let s = build_surface(*genus)?;
            let fnc: FenchelNielsen = fnc.parse()?;
            let ty: TypeInvariant = match (type_of, type_key) {
                (Some(t), _) => {
                    let (_, c) = coords(*genus, t)?;
                    c.ensure_valid(&s)?;
                    Decoder::new(&s).classify(&c)
                }
                (None, Some(k)) => k.parse()?,
                (None, None) => TypeInvariant::nonseparating_scc(*genus as u32),
            };
            let grid = parse_grid(grid)?;
            if let Some(m) = length_max {
                if grid.last().is_some_and(|l| l > m) {
                    return Err(Failure::Domain(format!("grid exceeds --length-max {m}")));
                }
            }
            let pruning = pruning_constant(&s, &fnc)?;
            let start = Instant::now();
            let res = with_workers(cli.workers, || count_by_length(&s, &fnc, &ty, &grid, &pruning))?;
            let table = CountTable {
                rows: res
                    .grid
                    .iter()
                    .zip(&res.counts)
                    .map(|(&l, &count)| multicurve_count::enumeration::CountRow { l, type_key: ty.to_string(), count })
                    .collect(),
                metadata: Default::default(),
            };
            let meta = json!({
                "genus": genus,
                "fn": fnc.to_string(),
                "pruning": pruning,
                "audit": res.audit,
                "workers": cli.workers,
                "wall_time_s": start.elapsed().as_secs_f64(),
            });
            emit_table(cli, &table, meta)?;
            if res.audit.incomplete {
                return Err(Failure::Audit("INCOMPLETE pruning audit".into()));
            }
            Ok(())
        }
        Command::Fit { input, type_key } => {
            let table = CountTable::from_csv(&fs::read_to_string(input)?)?;
            let series = match type_key {
                Some(k) => table.series(k),
                None => table.totals(),
            };
            let pts: Vec<(f64, f64)> = series.iter().filter(|p| p.1 > 0).map(|&(l, c)| (l, c as f64)).collect();
            let fit = powerlaw_fit(&pts)?;
            emit(cli, &json!({"input": input.display().to_string(), "type_key": type_key, "fit": fit}))
        }
        Command::Oracle { which: OracleCmd::Torus { norm_max } } => {
            let n = torus_primitive_count(*norm_max)?;
            emit(
                cli,
                &json!({"norm_max": norm_max, "count": n, "sieve": primitive_count_sieve(*norm_max), "mobius": primitive_count_mobius(*norm_max)}),
            )
        }
        Command::Run { config } => run(cli, config),
        Command::Track { action: TrackCmd::Form { genus, orthant, u, v } } => {
            let s = build_surface(*genus)?;
            let signs = orthant.chars().map(|c| c.to_string().parse::<Sign>()).collect::<Result<Vec<_>, _>>()?;
            let st = standard_track(&s, &signs)?;
            let read = |p: &Path| -> std::result::Result<WeightVector, Failure> {
                Ok(fs::read_to_string(p)?.trim().parse()?)
            };
            let w = st.track.thurston_form(&read(u)?, &read(v)?)?;
            emit(cli, &json!({"omega": w.to_string()}))
        }
    }
}

fn run(cli: &Cli, path: &Path) -> Outcome {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(o) = &cli.out {
        cfg.output = o.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    let out = run_experiment(&cfg)?;
    let files: Vec<String> = out.files.iter().map(|p| p.display().to_string()).collect();
    println!("{}", serde_json::to_string_pretty(&json!({"files": files, "incomplete": out.incomplete})).expect("json"));
    if out.incomplete {
        return Err(Failure::Audit("INCOMPLETE pruning audit".into()));
    }
    Ok(())
}
