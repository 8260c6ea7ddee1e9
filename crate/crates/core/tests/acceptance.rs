//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and a summary.
//!
//! The process exits 0 even when a criterion fails so that the workspace test
//! run stays usable; set `SRG_CERT_ACCEPTANCE_STRICT=1` to exit 1 instead.
//! Positional arguments select criteria by number, e.g. `-- 4 6`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use srg_cert::linalg::CMatrix;
use srg_cert::nyquist::{det_locus, gnc, sufficient_gnc, winding_of_polyline, NyquistConfig};
use srg_cert::oracle::{
    equivalence_experiment, is_closed_loop_stable, random_stable, soundness_experiment, Ensemble, ExperimentConfig,
};
use srg_cert::perf::{scaling_report, ScalingConfig};
use srg_cert::ratfun::{bundled_model, FrequencyGrid, LtiModel, Model, StateSpaceModel};
use srg_cert::separation::{separate, sweep_feedback, Method, SeparationQuery, SweepConfig, TauSweep};
use srg_cert::srg::{chord_closure, srg_points, SamplerConfig, SrgRegion};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> srg_cert::Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("bundled pair reproduction", bundled_pair),
        ("gnc / srg equivalence", equivalence),
        ("soundness against the eigenvalue oracle", soundness),
        ("spectrum containment", spectrum_containment),
        ("method conservatism ordering", conservatism),
        ("winding numbers and conjugate symmetry", winding_suite),
        ("scaling exponents", scaling),
        ("siso exactness", siso_exactness),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::var("SRG_CERT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = 0;
    let mut ran = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        if !pass {
            failed += 1;
        }
        println!("{} {id} {name}: {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}

fn bundled(name: &str) -> Model {
    Model::from_rational(bundled_model(name).expect("bundled model"))
}

fn default_grid() -> FrequencyGrid {
    FrequencyGrid::log(1e-3, 1e3, 400).expect("grid")
}

fn complex_gaussian(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(m, m, |_, _| {
        C::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) * s
    })
}

fn bundled_pair() -> srg_cert::Result<Outcome> {
    let start = Instant::now();
    let (h1, h2) = (bundled("h1"), bundled("h2"));
    let grid = default_grid();
    let oracle = is_closed_loop_stable(&h1.state_space(), &h2.state_space())?;
    let suff = sufficient_gnc(&h1, &h2, &grid, &NyquistConfig::default())?;
    let verdict = sweep_feedback(&h1, &h2, &grid, &SweepConfig::default())?;
    let winding = gnc(&h1, &h2, &grid, &NyquistConfig::default())?.winding;
    let secs = start.elapsed().as_secs_f64();
    let pass = oracle.stable
        && suff.pass
        && suff.min_abs > 1e-6
        && verdict.is_certified()
        && verdict.margin_min > 1e-6
        && winding == Some(0)
        && secs < 60.0;
    Ok(Outcome {
        pass,
        detail: format!(
            "oracle stable {} (abscissa {:.4}), sufficient gnc {} (min |det| {:.4e}), hull {} (margin {:.4e} at omega {:.4}), winding {:?}",
            oracle.stable, oracle.abscissa, suff.pass, suff.min_abs, verdict.status, verdict.margin_min, verdict.worst_omega, winding
        ),
    })
}

fn equivalence() -> srg_cert::Result<Outcome> {
    let report = equivalence_experiment(&Ensemble::new(7, 100, 2, 6), &ExperimentConfig::screening())?;
    Ok(Outcome {
        pass: report.disagree == 0 && report.dead_band <= 5,
        detail: format!(
            "{} pairs: agree {}, disagree {}, dead band {}, skipped {}, certified-but-unstable {}",
            report.count, report.agree, report.disagree, report.dead_band, report.skipped_noninvertible, report.unsound
        ),
    })
}

fn soundness() -> srg_cert::Result<Outcome> {
    let batches = [
        Ensemble::new(11, 100, 2, 10),
        Ensemble::new(12, 80, 3, 10),
        Ensemble {
            min_order: 50,
            ..Ensemble::new(13, 20, 2, 50)
        },
    ];
    let mut parts = Vec::new();
    let (mut violations, mut certified, mut count) = (0, 0, 0);
    for method in [Method::Naive, Method::Hull] {
        let mut cfg = ExperimentConfig::screening();
        cfg.sweep.method = method;
        for gen in &batches {
            let r = soundness_experiment(gen, &cfg)?;
            violations += r.violations;
            certified += r.certified;
            count += r.count;
            parts.push(format!(
                "{method} m={} order {}..={}: {}/{} certified, {} stable, {} violations",
                gen.m, gen.min_order, gen.max_order, r.certified, r.count, r.oracle_stable, r.violations
            ));
        }
    }
    Ok(Outcome {
        pass: violations == 0 && certified > 0,
        detail: format!("{count} runs, {violations} violations; {}", parts.join("; ")),
    })
}

/// Eigenvalues through nalgebra's complex Schur form.
fn spectrum(m: &CMatrix) -> Vec<C> {
    Schur::new(m.clone()).eigenvalues().expect("complex schur").iter().copied().collect()
}

fn spectrum_containment() -> srg_cert::Result<Outcome> {
    let sizes = [100, 1_000, 10_000];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 3];
    for i in 0..200 {
        let m = 2 + i % 3;
        let mat = complex_gaussian(&mut rng, m);
        let eig = spectrum(&mat);
        for (w, &n) in worst.iter_mut().zip(&sizes) {
            let region = chord_closure(&srg_points(&mat, &SamplerConfig::blind(n).seed(i as u64))?);
            for &l in &eig {
                *w = w.max(region.distance(l));
            }
        }
    }
    let monotone = worst.windows(2).all(|p| p[1] <= p[0]);
    Ok(Outcome {
        pass: worst[2] <= 0.05 && monotone,
        detail: format!(
            "worst eigenvalue distance {:.4e} / {:.4e} / {:.4e} at N_dir 1e2 / 1e3 / 1e4",
            worst[0], worst[1], worst[2]
        ),
    })
}

fn random_points(rng: &mut ChaCha8Rng, center: C, spread: f64) -> Vec<C> {
    let n = rng.random_range(3..=12);
    (0..n)
        .map(|_| center + C::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread)))
        .collect()
}

fn dist_point_segment(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l = d.norm_sqr();
    let t = if l == 0.0 { 0.0 } else { (((p - a).conj() * d).re / l).clamp(0.0, 1.0) };
    (p - (a + d * t)).norm()
}

fn orient(a: C, b: C, c: C) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

fn segments_cross(a: C, b: C, c: C, d: C) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn in_triangle(p: C, a: C, b: C, c: C) -> bool {
    let (d1, d2, d3) = (orient(a, b, p), orient(b, c, p), orient(c, a, p));
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos) && orient(a, b, c) != 0.0
}

fn in_hull(p: C, pts: &[C]) -> bool {
    let n = pts.len();
    (0..n).any(|i| (i + 1..n).any(|j| (j + 1..n).any(|k| in_triangle(p, pts[i], pts[j], pts[k]))))
}

/// Distance between the convex hulls of two point sets by exhaustive search
/// over point triangles and point-pair segments.
fn brute_hull_distance(p: &[C], q: &[C]) -> f64 {
    if p.iter().any(|&z| in_hull(z, q)) || q.iter().any(|&z| in_hull(z, p)) {
        return 0.0;
    }
    let segs = |s: &[C]| -> Vec<(C, C)> {
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i..s.len() {
                out.push((s[i], s[j]));
            }
        }
        out
    };
    let mut best = f64::INFINITY;
    for &(a, b) in &segs(p) {
        for &(c, d) in &segs(q) {
            if segments_cross(a, b, c, d) {
                return 0.0;
            }
            best = best
                .min(dist_point_segment(a, c, d))
                .min(dist_point_segment(b, c, d))
                .min(dist_point_segment(c, a, b))
                .min(dist_point_segment(d, a, b));
        }
    }
    best
}

/// The hull method's pieces rebuilt from scratch: overlapping phase sectors
/// of `A`, and per half-plane of `B` the set `{0} u -B_h`.
fn brute_hull_margin(a: &[C], b: &[C]) -> f64 {
    let n = 64;
    let width = TAU / n as f64;
    let pad = width / 8.0;
    let phase = |z: C| {
        if z.im == 0.0 {
            if z.re >= 0.0 { 0.0 } else { PI }
        } else {
            z.im.atan2(z.re).rem_euclid(TAU)
        }
    };
    let sectors: Vec<Vec<C>> = (0..n)
        .map(|k| {
            let (lo, hi) = (k as f64 * width - pad, (k + 1) as f64 * width + pad);
            a.iter()
                .copied()
                .filter(|&z| [phase(z), phase(z) + TAU, phase(z) - TAU].iter().any(|p| *p >= lo && *p <= hi))
                .collect()
        })
        .filter(|s: &Vec<C>| !s.is_empty())
        .collect();
    let upper: Vec<C> = b.iter().filter(|z| z.im >= 0.0).map(|z| -z).collect();
    let lower: Vec<C> = b.iter().filter(|z| z.im <= 0.0).map(|z| -z).collect();
    let halves: Vec<Vec<C>> = [upper, lower]
        .into_iter()
        .filter(|h| !h.is_empty())
        .map(|mut h| {
            h.push(C::new(0.0, 0.0));
            h
        })
        .collect();
    let mut best = f64::INFINITY;
    for s in &sectors {
        for h in &halves {
            best = best.min(brute_hull_distance(s, h));
        }
    }
    best
}

fn conservatism() -> srg_cert::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut violations, mut max_err) = (0, 0.0f64);
    let mut passes = [0; 3];
    for _ in 0..100 {
        let ca = C::from_polar(rng.random_range(0.5..3.0), rng.random_range(-PI..PI));
        let cb = C::from_polar(rng.random_range(0.5..3.0), rng.random_range(-PI..PI));
        let (sa, sb) = (rng.random_range(0.05..1.0), rng.random_range(0.05..1.0));
        let a = random_points(&mut rng, ca, sa);
        let b = random_points(&mut rng, cb, sb);
        let run = |method| {
            separate(&SeparationQuery {
                omega: 1.0,
                region_a: SrgRegion::Points { points: a.clone() },
                region_b: SrgRegion::Points { points: b.clone() },
                tau: TauSweep::Continuous,
                method,
            })
        };
        let (disk, hull, naive) = (run(Method::Disk), run(Method::Hull), run(Method::Naive));
        for (k, r) in [&disk, &hull, &naive].iter().enumerate() {
            passes[k] += r.separated as usize;
        }
        if (disk.separated && !hull.separated) || (hull.separated && !naive.separated) {
            violations += 1;
        }
        max_err = max_err.max((hull.margin - brute_hull_margin(&a, &b)).abs());
    }
    Ok(Outcome {
        pass: violations == 0 && max_err <= 1e-9,
        detail: format!(
            "passes disk {} / hull {} / naive {} of 100, {violations} ordering violations, hull vs brute force {max_err:.2e}",
            passes[0], passes[1], passes[2]
        ),
    })
}

fn closed_curve(f: impl Fn(f64) -> C, n: usize) -> Vec<C> {
    (0..=n).map(|i| f(TAU * i as f64 / n as f64)).collect()
}

/// `C (j omega I - A)^{-1} B + D` by a direct solve.
fn response(ss: &StateSpaceModel, omega: f64) -> CMatrix {
    let n = ss.a.nrows();
    let cplx = |m: &DMatrix<f64>| m.map(|x| C::new(x, 0.0));
    let d = cplx(&ss.d);
    if n == 0 {
        return d;
    }
    let lhs = CMatrix::identity(n, n) * C::new(0.0, omega) - cplx(&ss.a);
    let x = lhs.lu().solve(&cplx(&ss.b)).expect("regular resolvent");
    cplx(&ss.c) * x + d
}

fn winding_suite() -> srg_cert::Result<Outcome> {
    let mut failures = Vec::new();
    let curves: Vec<(&str, Vec<C>, i64)> = vec![
        ("circle away", closed_curve(|t| C::new(3.0, 1.0) + C::from_polar(1.0, t), 2000), 0),
        ("ellipse away", closed_curve(|t| C::new(-2.0 + 0.5 * t.cos(), 4.0 * t.sin()), 2000), 0),
        ("circle once", closed_curve(|t| C::new(0.3, -0.2) + C::from_polar(1.0, t), 2000), 1),
        ("circle reversed", closed_curve(|t| C::from_polar(2.0, -t), 2000), -1),
        ("ellipse twice", closed_curve(|t| C::new(3.0 * (2.0 * t).cos(), 0.5 * (2.0 * t).sin()), 4000), 2),
        ("ellipse twice reversed", closed_curve(|t| C::new(0.4 * (2.0 * t).cos(), -1.5 * (2.0 * t).sin()), 4000), -2),
    ];
    for (name, pts, expected) in &curves {
        match winding_of_polyline(pts, 1e-9) {
            Ok(w) if w == *expected => {}
            other => failures.push(format!("{name}: {other:?}")),
        }
    }

    let grid = FrequencyGrid::log(1e-3, 1e3, 50)?;
    let mut systems: Vec<(StateSpaceModel, StateSpaceModel)> = (0..10).map(|i| Ensemble::new(6, 10, 2, 6).pair(i)).collect();
    systems.push((bundled("h1").state_space().into_owned(), bundled("h2").state_space().into_owned()));
    let mut worst = 0.0f64;
    for (h1, h2) in &systems {
        let locus = det_locus(h1, h2, 1.0, &grid)?;
        for &(w, z) in &locus.samples {
            let (m1, m2) = (response(h1, -w), response(h2, -w));
            let direct = (CMatrix::identity(m1.nrows(), m1.nrows()) + m1 * m2).determinant();
            worst = worst.max((direct - z.conj()).norm() / z.norm().max(1.0));
            if let Some(&(_, mirror)) = locus.samples.iter().find(|(v, _)| *v == -w) {
                worst = worst.max((mirror - z.conj()).norm());
            }
        }
    }
    if worst > 1e-9 {
        failures.push(format!("conjugate symmetry error {worst:.2e}"));
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} curves exact, conjugate symmetry error {worst:.2e} over {} loci", curves.len(), systems.len())
        } else {
            failures.join("; ")
        },
    })
}

fn scaling() -> srg_cert::Result<Outcome> {
    let report = scaling_report(&bundled("h1"), &bundled("h2"), &ScalingConfig::default())?;
    let fits: Vec<String> = report
        .fits
        .iter()
        .map(|f| format!("{} {} {:.2}{}", f.method, f.axis, f.exponent, if f.pass { "" } else { " (out of range)" }))
        .collect();
    Ok(Outcome {
        pass: report.pass,
        detail: fits.join(", "),
    })
}

fn siso_exactness() -> srg_cert::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut inexact = 0;
    for _ in 0..50 {
        let order = rng.random_range(1..=6);
        let sys = random_stable(&mut rng, 1, order, 0.1);
        let omega = 10f64.powf(rng.random_range(-3.0..3.0));
        let h = response(&sys, omega)[(0, 0)];
        let cloud = srg_points(&sys.response(omega)?, &SamplerConfig::default())?;
        let ok = cloud.points.iter().all(|&z| z == h || z == h.conj())
            && cloud.points.contains(&h)
            && cloud.points.contains(&h.conj());
        inexact += !ok as usize;
    }
    let h1 = Model::from_rational(srg_cert::ratfun::parse_model("dim 1\n[ 1/(s+1) ]\n")?);
    let grid = default_grid();
    let mut failures = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        let h2 = StateSpaceModel::gain(DMatrix::from_element(1, 1, k))?;
        for method in [Method::Hull, Method::Naive] {
            let v = sweep_feedback(&h1, &h2, &grid, &SweepConfig { method, ..SweepConfig::default() })?;
            if !v.is_certified() {
                failures.push(format!("{method} k={k}: {} margin {:.3e}", v.status, v.margin_min));
            }
        }
    }
    Ok(Outcome {
        pass: inexact == 0 && failures.is_empty(),
        detail: format!(
            "{}/50 clouds equal {{h, h*}}, loops 1/(s+1) with k in {{0.5, 1, 2}}: {}",
            50 - inexact,
            if failures.is_empty() { "all certified by hull and naive".to_string() } else { failures.join(", ") }
        ),
    })
}
