//! Subcommand implementations. Each returns whether the outcome is positive
//! (exit 0) or negative (exit 2); errors map to exit 1.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use srg_cert::linalg;
use srg_cert::nyquist::{det_locus, gnc, sufficient_gnc, DetLocus};
use srg_cert::oracle::{equivalence_experiment, soundness_experiment, Ensemble, ExperimentConfig};
use srg_cert::perf::{scaling_report, ScalingConfig};
use srg_cert::plot::{nyquist_svg, sample_clouds, srg_projection_svg, write_srg_triples};
use srg_cert::ratfun::{bundled_model, load_model, FrequencyGrid, LtiModel, Model};
use srg_cert::separation::{sweep_feedback, ChordSide, Method};
use srg_cert::srg::{invert_point, srg_points, SamplerConfig, SrgCloud};

use crate::artifacts::Artifacts;
use crate::config::{RunConfig, RunFlags};

/// Model file path, or `bundled:<name>` for a model shipped with the crate.
pub fn load(arg: &str) -> Result<Model> {
    if let Some(name) = arg.strip_prefix("bundled:") {
        let tf = bundled_model(name).with_context(|| format!("no bundled model named {name:?}"))?;
        return Ok(Model::from_rational(tf));
    }
    let tf = load_model(arg).with_context(|| format!("loading model {arg}"))?;
    Ok(Model::from_rational(tf))
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    run_config: &'a RunConfig,
    #[serde(flatten)]
    result: T,
}

fn ppd_capped(cfg: &RunConfig, cap: usize) -> Result<FrequencyGrid> {
    Ok(FrequencyGrid::log(cfg.omega_min, cfg.omega_max, cfg.points_per_decade.min(cap))?)
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file or `bundled:<name>`.
    #[arg(long)]
    pub model: String,
    /// Frequency in rad/s.
    #[arg(long)]
    pub omega: f64,
}

pub fn eval(args: &EvalArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, _) = RunConfig::resolve(flags)?;
    if !(args.omega >= 0.0 && args.omega.is_finite()) {
        bail!("omega must be finite and nonnegative");
    }
    let model = load(&args.model)?;
    let h = model.response(args.omega)?;
    let sampler = SamplerConfig::with_n_dir(cfg.n_dir).seed(cfg.seed);
    let cloud = srg_points(&h, &sampler)?.with_omega(args.omega);
    let rows: Vec<Vec<[f64; 2]>> = (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| [h[(i, j)].re, h[(i, j)].im]).collect())
        .collect();
    let eig: Vec<[f64; 2]> = linalg::eigenvalues(&h)?.iter().map(|z| [z.re, z.im]).collect();
    let gains = linalg::svd(&h)?.values;
    let result = serde_json::json!({
        "model": args.model,
        "omega": args.omega,
        "response": rows,
        "eigenvalues": eig,
        "singular_values": gains,
        "srg": {
            "points": cloud.len(),
            "max_modulus": cloud.max_modulus(),
            "contains_zero": cloud.contains_zero(1e-9),
        },
    });
    let mut out = Artifacts::create(&cfg.output_dir)?;
    out.write_json("eval.json", &Report { run_config: &cfg, result: &result })?;
    let mut csv = format!("{}\n", SrgCloud::CSV_HEADER).into_bytes();
    cloud.write_csv_rows(&mut csv)?;
    out.write("srg_cloud.csv", csv)?;
    out.finish()?;
    println!("H(j{}) max gain {:.6e}, {} SRG points", args.omega, cloud.max_modulus(), cloud.len());
    Ok(true)
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// First system (forward path), file or `bundled:<name>`.
    #[arg(long)]
    pub h1: String,
    /// Second system (feedback path).
    #[arg(long)]
    pub h2: String,
}

/// Inverted SRG of `H1` and the negated SRG of `H2`, the two sets being separated.
fn separation_sets(c1: &[SrgCloud], c2: &[SrgCloud]) -> (Vec<SrgCloud>, Vec<SrgCloud>) {
    let inv = c1
        .iter()
        .map(|c| SrgCloud {
            points: c.points.iter().filter(|z| z.norm() > 1e-12).map(|z| invert_point(*z)).collect(),
            ..c.clone()
        })
        .collect();
    let neg = c2
        .iter()
        .map(|c| SrgCloud {
            points: c.points.iter().map(|z| -z).collect(),
            ..c.clone()
        })
        .collect();
    (inv, neg)
}

fn write_band_plots(out: &mut Artifacts, cfg: &RunConfig, h1: &Model, h2: &Model, bands: &[(f64, f64)]) -> Result<()> {
    let grid = ppd_capped(cfg, 10)?;
    let sampler = SamplerConfig::with_n_dir(cfg.n_dir.min(100)).seed(cfg.seed);
    let c1 = sample_clouds(h1, &grid, &sampler)?;
    let c2 = sample_clouds(h2, &grid, &sampler)?;
    let (inv, neg) = separation_sets(&c1, &c2);
    for (k, band) in bands.iter().enumerate() {
        let title = format!("SRG projection, omega in [{}, {}]", band.0, band.1);
        let svg = srg_projection_svg(&[("SRG(H1)^-1", &inv), ("-SRG(H2)", &neg)], *band, &title);
        out.write(&format!("srg_band_{}.svg", k + 1), svg)?;
    }
    Ok(())
}

fn default_bands(cfg: &RunConfig) -> Vec<(f64, f64)> {
    if cfg.omega_min < 1.0 && cfg.omega_max > 1.0 {
        vec![(cfg.omega_min, 1.0), (1.0, cfg.omega_max)]
    } else {
        vec![(cfg.omega_min, cfg.omega_max)]
    }
}

fn locus_csv(loci: &[&DetLocus]) -> Result<Vec<u8>> {
    let mut csv = format!("{}\n", DetLocus::CSV_HEADER).into_bytes();
    for l in loci {
        l.write_csv_rows(&mut csv)?;
    }
    Ok(csv)
}

pub fn check(args: &PairArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, methods) = RunConfig::resolve(flags)?;
    let h1 = load(&args.h1)?;
    let h2 = load(&args.h2)?;
    let grid = cfg.grid()?;
    let mut out = Artifacts::create(&cfg.output_dir)?;
    let mut any = false;
    for method in methods {
        let v = sweep_feedback(&h1, &h2, &grid, &cfg.sweep(method))?;
        println!(
            "{method}: {} (min margin {:.6e} at omega = {}, tau = {})",
            v.status, v.margin_min, v.worst_omega, v.worst_tau
        );
        any |= v.is_certified();
        let mut csv = Vec::new();
        v.write_margin_csv(&mut csv)?;
        out.write(&format!("margins_{method}.csv"), csv)?;
        let echo = RunConfig { method, ..cfg.clone() };
        out.write_json(&format!("verdict_{method}.json"), &Report { run_config: &echo, result: &v })?;
    }
    let locus = det_locus(&h1, &h2, 1.0, &grid)?;
    out.write("locus.csv", locus_csv(&[&locus])?)?;
    out.write("nyquist.svg", nyquist_svg(&locus, "det(I + H1 H2)"))?;
    write_band_plots(&mut out, &cfg, &h1, &h2, &default_bands(&cfg))?;
    out.finish()?;
    Ok(any)
}

pub fn nyquist(args: &PairArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, _) = RunConfig::resolve(flags)?;
    let h1 = load(&args.h1)?;
    let h2 = load(&args.h2)?;
    let grid = cfg.grid()?;
    let ncfg = cfg.nyquist();
    let verdict = gnc(&h1, &h2, &grid, &ncfg)?;
    let sufficient = sufficient_gnc(&h1, &h2, &grid, &ncfg)?;
    println!(
        "gnc: {} (winding {:?}, min |det| {:.6e}); sufficient gnc: {} (min |det| {:.6e})",
        if verdict.stable { "stable" } else { "not stable" },
        verdict.winding,
        verdict.min_abs,
        if sufficient.pass { "pass" } else { "fail" },
        sufficient.min_abs
    );
    let locus = det_locus(&h1, &h2, 1.0, &grid)?;
    let mut out = Artifacts::create(&cfg.output_dir)?;
    out.write_json(
        "nyquist.json",
        &Report {
            run_config: &cfg,
            result: serde_json::json!({ "gnc": verdict, "sufficient_gnc": sufficient }),
        },
    )?;
    out.write("locus.csv", locus_csv(&[&locus])?)?;
    out.write("nyquist.svg", nyquist_svg(&locus, "det(I + H1 H2)"))?;
    out.finish()?;
    Ok(verdict.stable)
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    /// Number of random pairs.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Input/output dimension.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub min_order: usize,
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// Open-loop eigenvalues have real part at most minus this.
    #[arg(long, default_value_t = 0.1)]
    pub spectral_margin: f64,
    /// Compare the SRG verdict with the eigenvalue oracle only.
    #[arg(long)]
    pub soundness: bool,
}

/// Lighter defaults for the many-pair experiments.
pub fn experiment_base() -> RunConfig {
    RunConfig {
        points_per_decade: 20,
        n_dir: 400,
        n_phase_bins: 180,
        method: Method::Naive,
        chord_side: ChordSide::H2,
        ..RunConfig::default()
    }
}

pub fn equiv(args: &EquivArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, _) = RunConfig::resolve_with(experiment_base(), flags)?;
    let gen = Ensemble {
        min_order: args.min_order,
        spectral_margin: args.spectral_margin,
        ..Ensemble::new(cfg.seed, args.count, args.m, args.max_order)
    };
    let exp = ExperimentConfig {
        grid: cfg.grid()?,
        sweep: cfg.sweep(cfg.method),
        nyquist: cfg.nyquist(),
        ..ExperimentConfig::default()
    };
    let mut out = Artifacts::create(&cfg.output_dir)?;
    let ok = if args.soundness {
        let r = soundness_experiment(&gen, &exp)?;
        println!(
            "{} pairs: {} certified, {} oracle-stable, {} violations",
            r.count, r.certified, r.oracle_stable, r.violations
        );
        out.write_json("soundness.json", &Report { run_config: &cfg, result: &r })?;
        r.violations == 0
    } else {
        let r = equivalence_experiment(&gen, &exp)?;
        println!(
            "{} pairs: {} agree, {} disagree, {} dead band, {} skipped (non-invertible)",
            r.count, r.agree, r.disagree, r.dead_band, r.skipped_noninvertible
        );
        let mut csv = Vec::new();
        r.write_csv(&mut csv)?;
        out.write("equiv_pairs.csv", csv)?;
        out.write_json("equiv_report.json", &Report { run_config: &cfg, result: &r })?;
        r.disagree == 0 && r.dead_band * 20 <= r.count
    };
    out.finish()?;
    Ok(ok)
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// First system, defaults to the bundled `h1`.
    #[arg(long, default_value = "bundled:h1")]
    pub h1: String,
    #[arg(long, default_value = "bundled:h2")]
    pub h2: String,
    /// Smaller sizes and shorter timings.
    #[arg(long)]
    pub quick: bool,
}

pub fn bench(args: &BenchArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, _) = RunConfig::resolve(flags)?;
    let h1 = load(&args.h1)?;
    let h2 = load(&args.h2)?;
    let scfg = if args.quick {
        ScalingConfig {
            n_phi: vec![90, 180, 360],
            n_omega: vec![25, 50, 100],
            min_seconds: 0.02,
            sweep_min_seconds: 0.1,
            ..ScalingConfig::default()
        }
    } else {
        ScalingConfig::default()
    };
    let report = scaling_report(&h1, &h2, &scfg)?;
    for f in &report.fits {
        let bounds = match f.bounds {
            Some((lo, hi)) if lo.is_finite() => format!("[{lo}, {hi}]"),
            Some((_, hi)) => format!("<= {hi}"),
            None => "not checked".into(),
        };
        println!(
            "{} {}: exponent {:.3} ({bounds}) {}",
            f.method,
            f.axis,
            f.exponent,
            if f.pass { "ok" } else { "FAIL" }
        );
    }
    let mut out = Artifacts::create(&cfg.output_dir)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    out.write("bench.csv", csv)?;
    out.write_json("bench.json", &report)?;
    out.finish()?;
    Ok(report.pass)
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Frequency band `lo:hi` for an SRG projection; repeatable.
    #[arg(long = "band", value_parser = parse_band)]
    pub bands: Vec<(f64, f64)>,
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("band {s:?} is not lo:hi"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo >= 0.0 && hi > lo) {
        return Err(format!("band {s:?} needs 0 <= lo < hi"));
    }
    Ok((lo, hi))
}

/// Lighter defaults for figures.
pub fn plot_base() -> RunConfig {
    RunConfig {
        points_per_decade: 20,
        n_dir: 200,
        ..RunConfig::default()
    }
}

pub fn plot(args: &PlotArgs, flags: &RunFlags) -> Result<bool> {
    let (cfg, _) = RunConfig::resolve_with(plot_base(), flags)?;
    let h1 = load(&args.pair.h1)?;
    let h2 = load(&args.pair.h2)?;
    let grid = cfg.grid()?;
    let sampler = SamplerConfig::with_n_dir(cfg.n_dir).seed(cfg.seed);
    let c1 = sample_clouds(&h1, &grid, &sampler)?;
    let c2 = sample_clouds(&h2, &grid, &sampler)?;
    let mut out = Artifacts::create(&cfg.output_dir)?;
    for (name, clouds) in [("srg_h1.csv", &c1), ("srg_h2.csv", &c2)] {
        let mut csv = Vec::new();
        write_srg_triples(&mut csv, clouds)?;
        out.write(name, csv)?;
    }
    let bands = if args.bands.is_empty() { default_bands(&cfg) } else { args.bands.clone() };
    let (inv, neg) = separation_sets(&c1, &c2);
    for (k, band) in bands.iter().enumerate() {
        let title = format!("SRG projection, omega in [{}, {}]", band.0, band.1);
        out.write(
            &format!("srg_band_{}.svg", k + 1),
            srg_projection_svg(&[("SRG(H1)^-1", &inv), ("-SRG(H2)", &neg)], *band, &title),
        )?;
        out.write(
            &format!("srg_raw_band_{}.svg", k + 1),
            srg_projection_svg(&[("SRG(H1)", &c1), ("SRG(H2)", &c2)], *band, &title),
        )?;
    }
    let locus = det_locus(&h1, &h2, 1.0, &grid)?;
    out.write("nyquist.svg", nyquist_svg(&locus, "det(I + H1 H2)"))?;
    out.write("locus.csv", locus_csv(&[&locus])?)?;
    let path: PathBuf = out.finish()?;
    println!("wrote {} artifacts listed in {}", 4 + 2 * bands.len(), path.display());
    Ok(true)
}
