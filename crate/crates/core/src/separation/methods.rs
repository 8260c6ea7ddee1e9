use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, cross, gjk_distance, point_segment};
use crate::srg::{disk_of_points, SrgRegion, DISK_INFLATION};

type C = Complex64;

/// Separation test used at each frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Disk,
    Hull,
    Naive,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Disk, Method::Hull, Method::Naive];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Disk => "disk",
            Method::Hull => "hull",
            Method::Naive => "naive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disk" => Ok(Method::Disk),
            "hull" => Ok(Method::Hull),
            "naive" => Ok(Method::Naive),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

/// How `tau` ranges over `(0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauSweep {
    /// Exact treatment of the whole interval.
    #[default]
    Continuous,
    /// Finite set of values, ascending, largest equal to 1.
    Grid(Vec<f64>),
}

impl TauSweep {
    /// `n` log-spaced values from `tau_min` to 1.
    pub fn log_grid(n: usize, tau_min: f64) -> Result<Self> {
        if n == 0 || !(tau_min > 0.0 && tau_min <= 1.0) {
            return Err(Error::InvalidArgument(format!("bad tau grid: n = {n}, min = {tau_min}")));
        }
        if n == 1 {
            return Ok(TauSweep::Grid(vec![1.0]));
        }
        let l = tau_min.log10();
        let mut taus: Vec<f64> = (0..n).map(|i| 10f64.powf(l * (1.0 - i as f64 / (n - 1) as f64))).collect();
        taus[n - 1] = 1.0;
        Ok(TauSweep::Grid(taus))
    }

    pub fn tau_one() -> Self {
        TauSweep::Grid(vec![1.0])
    }

    pub fn validate(&self) -> Result<()> {
        if let TauSweep::Grid(t) = self {
            let ok = !t.is_empty()
                && t.windows(2).all(|w| w[0] < w[1])
                && t[0] > 0.0
                && *t.last().unwrap() == 1.0;
            if !ok {
                return Err(Error::InvalidArgument(
                    "tau grid must be nonempty, ascending, in (0,1] and end at 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One separation problem: is `A` disjoint from `-tau B` for every `tau`?
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationQuery {
    pub omega: f64,
    /// Inverted SRG of the first system.
    pub region_a: SrgRegion,
    /// SRG of the second system, before negation and scaling.
    pub region_b: SrgRegion,
    pub tau: TauSweep,
    pub method: Method,
}

/// Outcome of one separation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub omega: f64,
    pub separated: bool,
    /// Distance between `A` and `-tau B` minimized over `tau`, zero on contact.
    pub margin: f64,
    /// Closest pair `(a, -tau b)`.
    pub witness: Option<(C, C)>,
    pub worst_tau: f64,
}

impl SeparationResult {
    fn new(omega: f64, margin: f64, witness: Option<(C, C)>, worst_tau: f64) -> Self {
        let margin = margin.max(0.0);
        Self {
            omega,
            separated: margin > 0.0,
            margin,
            witness,
            worst_tau,
        }
    }
}

/// Dispatches on `q.method`.
pub fn separate(q: &SeparationQuery) -> SeparationResult {
    match q.method {
        Method::Disk => separate_disk(q),
        Method::Hull => separate_hull(q),
        Method::Naive => separate_naive(q),
    }
}

fn as_disk(r: &SrgRegion) -> (C, f64) {
    match r {
        SrgRegion::Disk { center, radius } => (*center, *radius),
        other => match disk_of_points(&region_points(other), DISK_INFLATION) {
            SrgRegion::Disk { center, radius } => (center, radius),
            _ => unreachable!(),
        },
    }
}

/// Sample points carried by a region; disks are represented by their boundary.
fn region_points(r: &SrgRegion) -> Vec<C> {
    match r {
        SrgRegion::Hull { vertices } => vertices.clone(),
        SrgRegion::ChordClosure { .. } => r.samples(7),
        SrgRegion::Disk { .. } => r.samples(64),
        _ => r.samples(0),
    }
}

/// Signed gap between disk `(ca, ra)` and `-tau (cb, rb)`.
#[inline]
fn disk_gap(ca: C, ra: f64, cb: C, rb: f64, tau: f64) -> f64 {
    (ca + cb * tau).norm() - ra - tau * rb
}

fn disk_witness(ca: C, ra: f64, cb: C, rb: f64, tau: f64) -> (C, C) {
    let cbt = -cb * tau;
    let d = ca - cbt;
    let dist = d.norm();
    let u = if dist > 0.0 { d / dist } else { C::new(1.0, 0.0) };
    if dist > ra + tau * rb {
        (ca - u * ra, cbt + u * (tau * rb))
    } else {
        let p = cbt + u * (tau * rb).min(dist);
        (p, p)
    }
}

/// Minimizer of a convex function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Disk test: `|c_a + tau c_b| > r_a + tau r_b`. The gap is convex in `tau`.
pub fn separate_disk(q: &SeparationQuery) -> SeparationResult {
    let (ca, ra) = as_disk(&q.region_a);
    let (cb, rb) = as_disk(&q.region_b);
    let (tau, gap) = match &q.tau {
        TauSweep::Continuous => golden_min(|t| disk_gap(ca, ra, cb, rb, t), 0.0, 1.0, 80),
        TauSweep::Grid(taus) => taus
            .iter()
            .map(|&t| (t, disk_gap(ca, ra, cb, rb, t)))
            .fold((1.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc }),
    };
    let witness = disk_witness(ca, ra, cb, rb, tau);
    SeparationResult::new(q.omega, gap, Some(witness), tau)
}

/// Splits points into closed upper and lower half-plane sets; real points go to both.
fn split_halves(points: &[C]) -> [Vec<C>; 2] {
    let mut up = Vec::new();
    let mut lo = Vec::new();
    for &z in points {
        if z.im >= 0.0 {
            up.push(z);
        }
        if z.im <= 0.0 {
            lo.push(z);
        }
    }
    [up, lo]
}

/// Phase sectors of the inverted side used by the hull method.
pub const HULL_SECTORS: usize = 64;

/// Splits points into `n` equal phase sectors, the real axis on sector
/// boundaries. Sectors overlap by an eighth of their width.
fn split_sectors(points: &[C], n: usize) -> Vec<Vec<C>> {
    use std::f64::consts::{PI, TAU};
    let width = TAU / n as f64;
    let pad = width / 8.0;
    let mut out = vec![Vec::new(); n];
    for &z in points {
        // phase in [0, 2 pi), upper half first
        let mut ph = z.im.atan2(z.re);
        if ph < 0.0 || (ph == 0.0 && z.im.is_sign_negative() && z.re < 0.0) {
            ph += TAU;
        }
        if z.im == 0.0 {
            ph = if z.re >= 0.0 { 0.0 } else { PI };
        }
        for (k, sector) in out.iter_mut().enumerate() {
            let lo = k as f64 * width - pad;
            let hi = (k + 1) as f64 * width + pad;
            let inside = |p: f64| p >= lo && p <= hi;
            if inside(ph) || inside(ph + TAU) || inside(ph - TAU) {
                sector.push(z);
            }
        }
    }
    out
}

/// Hull-side point set: vertices of a hull region also get its real-axis
/// crossings so that each half is clipped exactly.
fn hull_input(r: &SrgRegion) -> Vec<C> {
    let mut pts = region_points(r);
    if let SrgRegion::Hull { vertices } = r {
        let n = vertices.len();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if (a.im < 0.0 && b.im > 0.0) || (a.im > 0.0 && b.im < 0.0) {
                let t = a.im / (a.im - b.im);
                pts.push(C::new(a.re + t * (b.re - a.re), 0.0));
            }
        }
    }
    pts
}

/// Largest `t` with `t * dir` in the convex polygon `poly` (which contains 0).
fn ray_exit(poly: &[C], dir: C) -> f64 {
    let n = poly.len();
    let mut best: f64 = 0.0;
    let edges = if n == 2 { 1 } else { n };
    for i in 0..edges {
        let (p1, p2) = (poly[i], poly[(i + 1) % n]);
        let e = p2 - p1;
        let den = cross(dir, e);
        if den.abs() < 1e-300 {
            // parallel edge: the ray may run along it
            if cross(p1, dir).abs() <= 1e-12 * p1.norm().max(p2.norm()) {
                for p in [p1, p2] {
                    let t = (p.re * dir.re + p.im * dir.im) / dir.norm_sqr();
                    best = best.max(t);
                }
            }
            continue;
        }
        let t = cross(p1, e) / den;
        let s = cross(p1, dir) / den;
        if (-1e-12..=1.0 + 1e-12).contains(&s) && t > best {
            best = t;
        }
    }
    best
}

/// Hull test. `A` is split into overlapping phase sectors and `B` into upper
/// and lower halves; the union of `-tau conv(B_h)` over `tau` in `[0, 1]` is
/// the polygon `conv({0} u -B_h)`, so the continuous sweep reduces to a few
/// polygon distances.
pub fn separate_hull(q: &SeparationQuery) -> SeparationResult {
    let a_parts: Vec<Vec<C>> = split_sectors(&hull_input(&q.region_a), HULL_SECTORS)
        .into_iter()
        .filter(|h| !h.is_empty())
        .map(|h| convex_hull(&h))
        .collect();
    let b_halves: Vec<Vec<C>> = split_halves(&hull_input(&q.region_b))
        .into_iter()
        .filter(|h| !h.is_empty())
        .collect();
    let mut best = SeparationResult::new(q.omega, f64::INFINITY, None, 1.0);
    match &q.tau {
        TauSweep::Continuous => {
            for bh in &b_halves {
                let mut cone: Vec<C> = bh.iter().map(|b| -b).collect();
                cone.push(C::new(0.0, 0.0));
                let cone = convex_hull(&cone);
                for ah in &a_parts {
                    let d = gjk_distance(ah, &cone);
                    if d.distance < best.margin || best.witness.is_none() {
                        let qn = d.on_second.norm();
                        let tau = if qn == 0.0 {
                            0.0
                        } else {
                            let exit = ray_exit(&cone, d.on_second / qn);
                            if exit > 0.0 { (qn / exit).min(1.0) } else { 1.0 }
                        };
                        best = SeparationResult::new(q.omega, d.distance, Some((d.on_first, d.on_second)), tau);
                    }
                }
            }
        }
        TauSweep::Grid(taus) => {
            let b_hulls: Vec<Vec<C>> = b_halves.iter().map(|h| convex_hull(h)).collect();
            for &tau in taus {
                for bh in &b_hulls {
                    let scaled: Vec<C> = bh.iter().map(|b| -b * tau).collect();
                    for ah in &a_parts {
                        let d = gjk_distance(ah, &scaled);
                        if d.distance < best.margin || best.witness.is_none() {
                            best = SeparationResult::new(q.omega, d.distance, Some((d.on_first, d.on_second)), tau);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Fan of triangles `(0, -b_i, -b_j)` between phase-consecutive outer points
/// of one half of `B`, skipping gaps of `pi` or more.
fn star_fill(half: &[C]) -> Vec<(C, C)> {
    let pts: Vec<C> = half.iter().filter(|z| z.norm() > 0.0).copied().collect();
    if pts.len() < 2 {
        return Vec::new();
    }
    let bins = pts.len();
    let phases: Vec<f64> = pts.iter().map(|z| z.im.atan2(z.re)).collect();
    let lo = phases.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut outer: Vec<Option<(f64, C)>> = vec![None; bins];
    for (z, ph) in pts.iter().zip(&phases) {
        let b = (((ph - lo) / width) as usize).min(bins - 1);
        if outer[b].is_none_or(|(_, o)| z.norm() > o.norm()) {
            outer[b] = Some((*ph, *z));
        }
    }
    let outer: Vec<(f64, C)> = outer.into_iter().flatten().collect();
    outer
        .windows(2)
        .filter(|w| w[1].0 - w[0].0 < std::f64::consts::PI)
        .map(|w| (-w[0].1, -w[1].1))
        .collect()
}

/// `tau` with `a = -tau b'` for `b'` on `[b_i, b_j]`, if `a` lies in the triangle `(0, -b_i, -b_j)`.
fn in_fan_triangle(a: C, p: C, r: C) -> Option<f64> {
    let det = cross(p, r);
    if det.abs() < 1e-300 {
        return None;
    }
    let lam = cross(a, r) / det;
    let mu = cross(p, a) / det;
    let tol = -1e-14;
    if lam >= tol && mu >= tol && lam + mu <= 1.0 - tol {
        Some((lam + mu).clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Naive test over all sample pairs: distance from each `a` to the segment
/// `[0, -b]` swept by `-tau b`, plus a star-shaped fill of `-B` per half so
/// that points of `A` lying between sampled rays count as contact.
pub fn separate_naive(q: &SeparationQuery) -> SeparationResult {
    let a_pts = region_points(&q.region_a);
    let b_pts = region_points(&q.region_b);
    let zero = C::new(0.0, 0.0);
    let mut best = SeparationResult::new(q.omega, f64::INFINITY, None, 1.0);
    match &q.tau {
        TauSweep::Continuous => {
            let neg_b: Vec<C> = b_pts.iter().map(|b| -b).collect();
            for &a in &a_pts {
                for &nb in &neg_b {
                    let (d, p) = point_segment(a, zero, nb);
                    if d < best.margin {
                        let tau = if nb.norm_sqr() > 0.0 { (p.norm() / nb.norm()).min(1.0) } else { 1.0 };
                        best = SeparationResult::new(q.omega, d, Some((a, p)), tau);
                    }
                }
            }
            if best.margin > 0.0 {
                for half in split_halves(&b_pts) {
                    for (p, r) in star_fill(&half) {
                        for &a in &a_pts {
                            if let Some(tau) = in_fan_triangle(a, p, r) {
                                return SeparationResult::new(q.omega, 0.0, Some((a, a)), tau);
                            }
                        }
                    }
                }
            }
        }
        TauSweep::Grid(taus) => {
            for &tau in taus {
                for &a in &a_pts {
                    for &b in &b_pts {
                        let nb = -b * tau;
                        let d = (a - nb).norm();
                        if d < best.margin {
                            best = SeparationResult::new(q.omega, d, Some((a, nb)), tau);
                        }
                    }
                }
            }
        }
    }
    best
}
