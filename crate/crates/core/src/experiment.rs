//! Experiment configuration and orchestration: counting runs, fits, sector
//! comparisons and report files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enumeration::{
    count_by_type, leading_coefficient, to_f64, with_workers, CountRow, CountTable,
    SurfaceModel,
};
use crate::error::{Error, Result};
use crate::fit::{geometric_grid_f64, powerlaw_fit, FitResult};
use crate::hyperbolic::{count_by_length, pruning_constant, FenchelNielsen, PruningConstant};
use crate::hyperbolic::PruningAudit;
use crate::sector::Sector;
use crate::surface::build_surface;
use crate::topology::TypeInvariant;
use crate::torus::{torus_primitive_count, TorusModel};

/// Number of points of a `geometric:lo..hi` grid without an explicit count.
pub const DEFAULT_GRID_POINTS: usize = 6;

/// `geometric:lo..hi[:n]` or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let grid = if let Some(rest) = s.strip_prefix("geometric:") {
        let (range, n) = match rest.split_once(':') {
            Some((r, n)) => (
                r,
                n.parse::<usize>()
                    .map_err(|e| Error::Config(format!("grid point count {n:?}: {e}")))?,
            ),
            None => (rest, DEFAULT_GRID_POINTS),
        };
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Error::Config(format!("expected lo..hi in {s:?}")))?;
        let lo: f64 = lo.parse().map_err(|e| Error::Config(format!("{lo:?}: {e}")))?;
        let hi: f64 = hi.parse().map_err(|e| Error::Config(format!("{hi:?}: {e}")))?;
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(Error::Config(format!("bad geometric grid {s:?}")));
        }
        geometric_grid_f64(lo, hi, n)
    } else if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("grid value {x:?}: {e}")))
            })
            .collect::<Result<_>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("empty L grid".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("L grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Integer grid for lattice counts: values are rounded and deduplicated.
pub fn integer_grid(grid: &[f64]) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = grid.iter().map(|x| x.round() as u64).collect();
    out.dedup();
    if out.first() == Some(&0) {
        return Err(Error::Config("norm grid must start at 1 or above".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    List(Vec<f64>),
    Spec(String),
}

impl GridValue {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridValue::List(v) => {
                check_grid(v)?;
                Ok(v.clone())
            }
            GridValue::Spec(s) => parse_grid(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Lattice counts in norm balls, by type.
    Norm,
    /// Hyperbolic length-ball counts of one type.
    Length,
    /// Primitive vectors of the torus.
    Torus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_genus")]
    pub genus: usize,
    pub mode: Mode,
    pub grid: GridValue,
    /// Fenchel-Nielsen data `l1,..;theta1,..` (length mode).
    #[serde(default)]
    pub metric: Option<String>,
    /// Type key to count in length mode; nonseparating curve by default.
    #[serde(default)]
    pub type_key: Option<String>,
    /// Sectors compared in norm mode.
    #[serde(default)]
    pub sectors: Vec<String>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_genus() -> usize {
    2
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Parses and validates a TOML config.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.grid.values()?;
        if cfg.genus < 2 && cfg.mode != Mode::Torus {
            return Err(Error::GenusTooSmall(cfg.genus));
        }
        if cfg.mode == Mode::Length && cfg.metric.is_none() {
            return Err(Error::Config("length mode needs `metric`".into()));
        }
        if cfg.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorComparison {
    pub sector: String,
    pub nonseparating: u64,
    pub separating: u64,
    /// `nonseparating / separating` at the largest grid value.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormFits {
    pub genus: usize,
    pub leading_coefficient: String,
    pub leading_coefficient_value: f64,
    /// `N(L) / L^(6g-6)` over the leading coefficient at the largest `L`.
    pub normalized_total: f64,
    pub total: Option<FitResult>,
    pub nonseparating: Option<FitResult>,
    pub separating: Option<FitResult>,
    /// `nonseparating / separating` over the whole ball at the largest `L`.
    pub frequency_ratio: Option<f64>,
    pub sectors: Vec<SectorComparison>,
    /// `max / min - 1` of the sector ratios.
    pub sector_ratio_spread: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct NormReport {
    pub table: CountTable,
    pub sector_tables: Vec<(String, CountTable)>,
    pub fits: NormFits,
}

fn series_fit(points: &[(f64, u64)]) -> Option<FitResult> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0)
        .map(|&(l, c)| (l, c as f64))
        .collect();
    powerlaw_fit(&pts).ok()
}

/// Sums the rows of all types matching `pred` at each grid value.
pub fn series_where(table: &CountTable, grid: &[u64], pred: impl Fn(&TypeInvariant) -> bool) -> Vec<(f64, u64)> {
    grid.iter()
        .map(|&l| {
            let c = table
                .rows
                .iter()
                .filter(|r| r.l == l as f64)
                .filter(|r| r.type_key.parse::<TypeInvariant>().is_ok_and(|t| pred(&t)))
                .map(|r| r.count)
                .sum();
            (l as f64, c)
        })
        .collect()
}

/// Norm-ball counts by type with fits and sector comparisons.
pub fn norm_experiment(
    genus: usize,
    grid: &[u64],
    sectors: &[Sector],
    workers: Option<usize>,
) -> Result<NormReport> {
    let s = build_surface(genus)?;
    let model = SurfaceModel::new(&s);
    let table = with_workers(workers, || count_by_type(&model, grid, None))?;
    let lmax = *grid.last().unwrap();
    let h = (6 * genus - 6) as i32;
    let lc = leading_coefficient(&s);

    let totals: Vec<(f64, u64)> = table.totals();
    let nonsep = series_where(&table, grid, TypeInvariant::is_nonseparating_scc);
    let sep = series_where(&table, grid, TypeInvariant::is_separating_scc);
    let last = |v: &[(f64, u64)]| v.last().map_or(0, |p| p.1);
    let ratio = |a: u64, b: u64| (b > 0).then(|| a as f64 / b as f64);

    let mut sector_tables = Vec::new();
    let mut comparisons = Vec::new();
    for sec in sectors {
        let t = with_workers(workers, || count_by_type(&model, &[lmax], Some(sec)))?;
        let a = last(&series_where(&t, &[lmax], TypeInvariant::is_nonseparating_scc));
        let b = last(&series_where(&t, &[lmax], TypeInvariant::is_separating_scc));
        comparisons.push(SectorComparison {
            sector: sec.to_string(),
            nonseparating: a,
            separating: b,
            ratio: ratio(a, b),
        });
        sector_tables.push((sec.to_string(), t));
    }
    let rs: Vec<f64> = comparisons.iter().filter_map(|c| c.ratio).collect();
    let spread = (rs.len() >= 2 && rs.len() == comparisons.len()).then(|| {
        let max = rs.iter().cloned().fold(f64::MIN, f64::max);
        let min = rs.iter().cloned().fold(f64::MAX, f64::min);
        max / min - 1.0
    });

    let fits = NormFits {
        genus,
        leading_coefficient: lc.to_string(),
        leading_coefficient_value: to_f64(&lc),
        normalized_total: last(&totals) as f64 / (lmax as f64).powi(h) / to_f64(&lc),
        total: series_fit(&totals),
        nonseparating: series_fit(&nonsep),
        separating: series_fit(&sep),
        frequency_ratio: ratio(last(&nonsep), last(&sep)),
        sectors: comparisons,
        sector_ratio_spread: spread,
    };
    Ok(NormReport {
        table,
        sector_tables,
        fits,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthReport {
    pub metric: String,
    pub type_key: String,
    pub pruning: PruningConstant,
    pub audit: PruningAudit,
    pub fit: Option<FitResult>,
    pub table: CountTable,
}

/// Length-ball counts of one type for one metric.
pub fn length_experiment(
    genus: usize,
    metric: &FenchelNielsen,
    ty: &TypeInvariant,
    grid: &[f64],
    workers: Option<usize>,
) -> Result<LengthReport> {
    let s = build_surface(genus)?;
    let pruning = pruning_constant(&s, metric)?;
    let res = with_workers(workers, || count_by_length(&s, metric, ty, grid, &pruning))?;
    let key = ty.to_string();
    let rows = res
        .grid
        .iter()
        .zip(&res.counts)
        .map(|(&l, &count)| CountRow {
            l,
            type_key: key.clone(),
            count,
        })
        .collect::<Vec<_>>();
    let series: Vec<(f64, u64)> = rows.iter().map(|r| (r.l, r.count)).collect();
    let mut metadata = std::collections::BTreeMap::new();
    metadata.insert("metric".into(), metric.to_string().into());
    metadata.insert("norm_cutoff".into(), res.audit.norm_cutoff.into());
    Ok(LengthReport {
        metric: metric.to_string(),
        type_key: key,
        pruning,
        audit: res.audit,
        fit: series_fit(&series),
        table: CountTable { rows, metadata },
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusReport {
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    /// Sieve, Mobius and enumeration counts agree at every grid value.
    pub methods_agree: bool,
    pub fit: Option<FitResult>,
    /// `coefficient / (2 * 6 / pi^2)`.
    pub coefficient_ratio: Option<f64>,
    /// `max |N(L) - c L^2| / L^1.8` over the grid, with `c` the fitted
    /// coefficient.
    pub error_bound_ratio: Option<f64>,
    pub table: CountTable,
}

pub fn torus_experiment(grid: &[u64], workers: Option<usize>) -> Result<TorusReport> {
    let table = with_workers(workers, || count_by_type(&TorusModel, grid, None))?;
    let key = TorusModel::scc_type().to_string();
    let series = table.series(&key);
    let mut counts = Vec::with_capacity(grid.len());
    let mut agree = series.len() == grid.len();
    for (k, &l) in grid.iter().enumerate() {
        let exact = torus_primitive_count(l)?;
        agree &= series.get(k).is_some_and(|p| p.1 == exact);
        counts.push(exact);
    }
    let pts: Vec<(f64, u64)> = grid.iter().map(|&l| l as f64).zip(counts.iter().copied()).collect();
    let fit = series_fit(&pts);
    let density = 2.0 * 6.0 / std::f64::consts::PI.powi(2);
    let coefficient_ratio = fit.as_ref().map(|f| f.coefficient / density);
    let error_bound_ratio = fit.as_ref().map(|f| {
        pts.iter()
            .map(|&(l, n)| (n as f64 - f.coefficient * l * l).abs() / l.powf(1.8))
            .fold(0.0, f64::max)
    });
    let mut rows = table.clone();
    rows.rows.retain(|r| r.type_key == key);
    Ok(TorusReport {
        grid: grid.to_vec(),
        counts,
        methods_agree: agree,
        fit,
        coefficient_ratio,
        error_bound_ratio,
        table: rows,
    })
}

/// Files written and whether the pruning audit failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub incomplete: bool,
}

fn write(dir: &Path, name: &str, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, text)?;
    files.push(p);
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Runs the configured experiment and writes `counts.csv`, `fits.json` and
/// `audit.json` (plus one CSV per sector) into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let grid = cfg.grid.values()?;
    fs::create_dir_all(&cfg.output)?;
    let dir = cfg.output.as_path();
    let mut files = Vec::new();
    let mut incomplete = false;
    match cfg.mode {
        Mode::Norm => {
            let grid = integer_grid(&grid)?;
            let cuffs = 3 * cfg.genus - 3;
            let sectors = cfg
                .sectors
                .iter()
                .map(|s| Sector::parse(s, cuffs))
                .collect::<Result<Vec<_>>>()?;
            let r = norm_experiment(cfg.genus, &grid, &sectors, cfg.workers)?;
            write(dir, "counts.csv", &r.table.to_csv(), &mut files)?;
            for (k, (_, t)) in r.sector_tables.iter().enumerate() {
                write(dir, &format!("counts_sector{}.csv", k + 1), &t.to_csv(), &mut files)?;
            }
            write(dir, "fits.json", &json(&r.fits), &mut files)?;
            let total_points: u64 = r.table.totals().last().map_or(0, |p| p.1);
            let audit = serde_json::json!({
                "mode": "norm",
                "genus": cfg.genus,
                "grid": grid,
                "points_at_max": total_points,
                "types_at_max": r.table.rows.iter().filter(|x| x.l == *grid.last().unwrap() as f64).count(),
                "incomplete": false,
            });
            write(dir, "audit.json", &json(&audit), &mut files)?;
        }
        Mode::Length => {
            let metric: FenchelNielsen = cfg.metric.as_deref().unwrap_or_default().parse()?;
            let ty = match &cfg.type_key {
                Some(k) => k.parse()?,
                None => TypeInvariant::nonseparating_scc(cfg.genus as u32),
            };
            let r = length_experiment(cfg.genus, &metric, &ty, &grid, cfg.workers)?;
            incomplete = r.audit.incomplete;
            write(dir, "counts.csv", &r.table.to_csv(), &mut files)?;
            let fits = serde_json::json!({
                "metric": r.metric,
                "type_key": r.type_key,
                "fit": r.fit,
            });
            write(dir, "fits.json", &json(&fits), &mut files)?;
            let audit = serde_json::json!({
                "mode": "length",
                "pruning": r.pruning,
                "audit": r.audit,
                "incomplete": incomplete,
            });
            write(dir, "audit.json", &json(&audit), &mut files)?;
        }
        Mode::Torus => {
            let grid = integer_grid(&grid)?;
            let r = torus_experiment(&grid, cfg.workers)?;
            write(dir, "counts.csv", &r.table.to_csv(), &mut files)?;
            let fits = serde_json::json!({
                "fit": r.fit,
                "coefficient_ratio": r.coefficient_ratio,
                "error_bound_ratio": r.error_bound_ratio,
            });
            write(dir, "fits.json", &json(&fits), &mut files)?;
            let audit = serde_json::json!({
                "mode": "torus",
                "methods_agree": r.methods_agree,
                "incomplete": false,
            });
            write(dir, "audit.json", &json(&audit), &mut files)?;
            if !r.methods_agree {
                return Err(Error::Config("torus counting methods disagree".into()));
            }
        }
    }
    Ok(RunOutcome { files, incomplete })
}
