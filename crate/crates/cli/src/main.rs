//! `circles`: generate circle packings, count circles by curvature, fit growth
//! exponents and compare limiting measures.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use circles_core::counting::{
    count_series, default_grid, fit_exponent, log_grid, ratio_series, CountMode, CountSeries, FitWindow, Region,
};
use circles_core::io::{load_packing, read_series_csv, save_grid, save_packing, write_json, write_ratio_csv, write_series_csv};
use circles_core::measures::{
    compare_measures, constant_consistency, critical_exponent_orbit, omega_empirical, omega_from_ps, orbit_points,
    ps_measure_grid, GridSpec, DEFAULT_CELLS, DEFAULT_HEIGHT_CUT, DEFAULT_S_OFFSET,
};
use circles_core::packing::{Packing, PackingSpec};
use circles_core::render::{render_svg, RenderStyle};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use config::{parse_cells, parse_window, ExperimentConfig, MeasureConfig, NamedRegion};

#[derive(Parser, Debug)]
#[command(name = "circles", version, about = "Circle packings, curvature counts and limiting measures")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Curvature bound
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Counting mode: meets, center or contained
    #[arg(long, global = true)]
    mode: Option<CountMode>,
    /// Measure grid cells, e.g. 16x16
    #[arg(long, global = true, value_parser = parse_cells)]
    grid: Option<[usize; 2]>,
    /// Curvature window `T,KT` (fit range, or empirical measure window)
    #[arg(long, global = true, value_parser = parse_window)]
    window: Option<[f64; 2]>,
    /// Packing CSV to read (default: <out>/packing.csv)
    #[arg(long, global = true)]
    packing: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate a packing and write it as CSV with a JSON sidecar
    Generate,
    /// Count circles per region over a grid of curvature bounds
    Count,
    /// Fit the growth exponent of a count series
    Fit {
        /// Series CSV (`T,N`) to fit instead of counting the packing
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Ratio of the counts of the first two regions
    Ratio,
    /// Empirical and Patterson–Sullivan measure grids, compared
    Measure {
        /// Word length of the orbit in H³
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Draw the packing as SVG
    Render {
        /// SVG path (default: <out>/packing.svg)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Configuration after flags have been applied.
struct Settings {
    config: ExperimentConfig,
    out: PathBuf,
    packing_path: PathBuf,
    window: Option<[f64; 2]>,
}

impl Settings {
    fn resolve(common: Common) -> Result<Self> {
        let mut config = match &common.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = common.tmax {
            config.t_max = Some(t);
        }
        if let Some(out) = common.out {
            config.out = Some(out);
        }
        if let Some(mode) = common.mode {
            config.mode = Some(mode);
        }
        if let Some(cells) = common.grid {
            let grid = config.grid.get_or_insert(config::GridConfig {
                cells,
                min: None,
                max: None,
            });
            grid.cells = cells;
        }
        config.validate()?;
        let out = config.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        let packing_path = common.packing.unwrap_or_else(|| out.join("packing.csv"));
        Ok(Settings {
            config,
            out,
            packing_path,
            window: common.window,
        })
    }

    fn mode(&self) -> CountMode {
        self.config.mode.unwrap_or(CountMode::Meets)
    }

    fn out_file(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }

    fn load(&self) -> Result<Packing> {
        load_packing(&self.packing_path).with_context(|| format!("loading {}", self.packing_path.display()))
    }

    /// Curvature bounds to count at; the top defaults to the packing's bound.
    fn t_grid(&self, packing: &Packing) -> Vec<f64> {
        let t_max = self.config.t_max.unwrap_or(packing.t_bound());
        match &self.config.t_grid {
            Some(g) => log_grid(g.lo, g.hi.unwrap_or(t_max).min(t_max).max(g.lo), g.per_decade),
            None => default_grid(t_max),
        }
    }

    /// Configured regions, or the packing's bounding box.
    fn regions(&self, packing: &Packing) -> Result<Vec<NamedRegion>> {
        if !self.config.regions.is_empty() {
            return Ok(self.config.regions.clone());
        }
        let (lo, hi) = packing
            .bounding_box()
            .ok_or_else(|| anyhow!("the packing has no circles to bound a default region"))?;
        Ok(vec![NamedRegion {
            name: "bbox".into(),
            region: Region::rectangle(lo, hi),
        }])
    }

    fn record_run(&self, command: &str) -> Result<()> {
        write_json(&self.config, &self.out_file(&format!("{command}.config.json"))?)?;
        Ok(())
    }
}

fn threads_from_env() -> Result<()> {
    if let Ok(v) = std::env::var("CIRCLES_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|e| anyhow!("CIRCLES_THREADS=`{v}`: {e}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn generate(s: &Settings) -> Result<()> {
    let spec = s
        .config
        .packing
        .as_ref()
        .ok_or_else(|| anyhow!("generate needs a [packing] section in the config"))?;
    let t = s
        .config
        .t_max
        .ok_or_else(|| anyhow!("generate needs a curvature bound (--tmax or t_max)"))?;
    let mut packing = spec.build(t, None)?;
    packing.sort_canonical();
    let path = s.out_file("packing.csv")?;
    save_packing(&packing, &path)?;
    s.record_run("generate")?;
    println!("{} circles below curvature {t} -> {}", packing.len(), path.display());
    Ok(())
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn count(s: &Settings) -> Result<()> {
    let packing = s.load()?;
    let grid = s.t_grid(&packing);
    for r in s.regions(&packing)? {
        let series = count_series(&packing, &r.region, &grid, s.mode())?;
        let path = s.out_file(&format!("count_{}.csv", file_stem(&r.name)))?;
        write_series_csv(&series, BufWriter::new(File::create(&path)?))?;
        let last = series.n.last().copied().unwrap_or(0);
        println!("{}: N = {last} at T = {} -> {}", r.name, grid.last().copied().unwrap_or(0.0), path.display());
    }
    s.record_run("count")
}

fn fit(s: &Settings, series_path: Option<&Path>) -> Result<()> {
    let series: CountSeries = match series_path {
        Some(path) => read_series_csv(File::open(path).with_context(|| format!("opening {}", path.display()))?, s.mode())
            .with_context(|| format!("reading {}", path.display()))?,
        None => {
            let packing = s.load()?;
            let region = s.regions(&packing)?.remove(0);
            count_series(&packing, &region.region, &s.t_grid(&packing), s.mode())?
        }
    };
    let window = s.window.map(|[lo, hi]| FitWindow::new(lo, hi)).transpose()?;
    let result = fit_exponent(&series, window)?;
    write_json(&result, &s.out_file("fit.json")?)?;
    println!("{}", serde_json::to_string_pretty(&result)?);
    s.record_run("fit")
}

fn ratio(s: &Settings) -> Result<()> {
    let packing = s.load()?;
    let regions = s.regions(&packing)?;
    let [e1, e2] = match regions.as_slice() {
        [a, b, ..] => [a, b],
        _ => bail!("ratio needs two regions in the config"),
    };
    let series = ratio_series(&packing, &e1.region, &e2.region, &s.t_grid(&packing))?;
    let path = s.out_file("ratio.csv")?;
    write_ratio_csv(&series, BufWriter::new(File::create(&path)?))?;
    match series.last() {
        Some(r) => println!("{} / {}: {r:.6} at the largest T -> {}", e1.name, e2.name, path.display()),
        None => println!("{} / {}: undefined -> {}", e1.name, e2.name, path.display()),
    }
    s.record_run("ratio")
}

#[derive(Serialize)]
struct MeasureReport {
    delta: f64,
    delta_stderr: f64,
    s: f64,
    window: [f64; 2],
    orbit_points: usize,
    pearson: f64,
    total_variation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    constants: Option<ConstantsReport>,
}

#[derive(Serialize)]
struct ConstantsReport {
    t: f64,
    regions: Vec<String>,
    constants: Vec<f64>,
    spread: f64,
}

fn measure(s: &Settings, depth: Option<usize>) -> Result<()> {
    let packing = s.load()?;
    let spec: PackingSpec = packing
        .source()
        .or(s.config.packing.as_ref())
        .cloned()
        .ok_or_else(|| anyhow!("measure needs the packing's group: the sidecar has no source and the config no [packing]"))?;
    let mc = s.config.measure.clone().unwrap_or_default();
    let MeasureConfig {
        depth: config_depth,
        window,
        s_offset,
        height_cut,
    } = mc;
    let window = s
        .window
        .or(window)
        .unwrap_or([packing.t_bound() / 2.0, packing.t_bound()]);
    let grid = match &s.config.grid {
        Some(g) => match (g.min, g.max) {
            (Some(lo), Some(hi)) => GridSpec::new(
                Complex64::new(lo[0], lo[1]),
                Complex64::new(hi[0], hi[1]),
                g.cells[0],
                g.cells[1],
            )?,
            _ => GridSpec::around(&packing, g.cells[0], g.cells[1])?,
        },
        None => GridSpec::around(&packing, DEFAULT_CELLS, DEFAULT_CELLS)?,
    };

    let empirical = omega_empirical(&packing, &grid, window[0], window[1] / window[0])?;
    let (group, _) = spec.group_and_seeds()?;
    let orbit = orbit_points(&group, depth.unwrap_or(config_depth));
    let estimate = critical_exponent_orbit(&orbit)?;
    let exponent = estimate.delta + s_offset.unwrap_or(DEFAULT_S_OFFSET);
    let ps = ps_measure_grid(&orbit, exponent, height_cut.unwrap_or(DEFAULT_HEIGHT_CUT), &grid)?;
    let omega = omega_from_ps(&ps, estimate.delta)?;
    let cmp = compare_measures(&empirical, &omega)?;

    let constants = if s.config.regions.is_empty() {
        None
    } else {
        let regions: Vec<Region> = s.config.regions.iter().map(|r| r.region.clone()).collect();
        let report = constant_consistency(&packing, &regions, window[1], estimate.delta, &omega)?;
        Some(ConstantsReport {
            t: window[1],
            regions: s.config.regions.iter().map(|r| r.name.clone()).collect(),
            constants: report.constants,
            spread: report.spread,
        })
    };

    save_grid(&empirical, &s.out_file("omega_empirical.csv")?)?;
    save_grid(&omega, &s.out_file("omega_ps.csv")?)?;
    let report = MeasureReport {
        delta: estimate.delta,
        delta_stderr: estimate.stderr,
        s: exponent,
        window,
        orbit_points: orbit.len(),
        pearson: cmp.pearson,
        total_variation: cmp.total_variation,
        constants,
    };
    write_json(&report, &s.out_file("measure.json")?)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    s.record_run("measure")
}

fn render(s: &Settings, output: Option<PathBuf>) -> Result<()> {
    let packing = s.load()?;
    let path = match output {
        Some(p) => p,
        None => s.out_file("packing.svg")?,
    };
    fs::write(&path, render_svg(&packing, &RenderStyle::default()))
        .with_context(|| format!("writing {}", path.display()))?;
    println!("{} elements -> {}", packing.len(), path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    threads_from_env()?;
    let settings = Settings::resolve(cli.common)?;
    match cli.command {
        Command::Generate => generate(&settings),
        Command::Count => count(&settings),
        Command::Fit { series } => fit(&settings, series.as_deref()),
        Command::Ratio => ratio(&settings),
        Command::Measure { depth } => measure(&settings, depth),
        Command::Render { output } => render(&settings, output),
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
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(circles_core::Error::UnderEnumerated { requested, bound }) = err.downcast_ref() {
                eprintln!(
                    "hint: the packing only covers curvatures below {bound}; rerun `circles generate --tmax {requested}` \
                     or lower --tmax"
                );
                return ExitCode::from(2);
            }
            ExitCode::from(1)
        }
    }
}
