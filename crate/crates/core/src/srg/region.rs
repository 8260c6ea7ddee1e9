use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cloud::{SampleKind, SrgCloud};
use crate::error::{Error, Result};
use crate::geometry::{self, cross, point_polygon, point_segment};

type C = Complex64;

/// Default safety inflation of disk radii.
pub const DISK_INFLATION: f64 = 1e-6;

/// Default tolerance for detecting `0` before inversion.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// An over-approximation of a sampled SRG, or a set of samples itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum SrgRegion {
    Disk { center: C, radius: f64 },
    /// Counterclockwise convex polygon (possibly a point or a segment).
    Hull { vertices: Vec<C> },
    /// Union of the vertical segments `[z, z*]`.
    ChordClosure { base_points: Vec<C> },
    /// Finite point set.
    Points { points: Vec<C> },
    Union { members: Vec<SrgRegion> },
}

impl SrgRegion {
    /// Euclidean distance from `w` to the region (zero inside).
    pub fn distance(&self, w: C) -> f64 {
        match self {
            SrgRegion::Disk { center, radius } => ((w - center).norm() - radius).max(0.0),
            SrgRegion::Hull { vertices } => point_polygon(w, vertices).0,
            SrgRegion::ChordClosure { base_points } => base_points
                .iter()
                .map(|z| point_segment(w, *z, z.conj()).0)
                .fold(f64::INFINITY, f64::min),
            SrgRegion::Points { points } => {
                points.iter().map(|z| (w - z).norm()).fold(f64::INFINITY, f64::min)
            }
            SrgRegion::Union { members } => {
                members.iter().map(|r| r.distance(w)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Membership within `tol`.
    pub fn contains(&self, w: C, tol: f64) -> bool {
        match self {
            SrgRegion::ChordClosure { base_points } => base_points
                .iter()
                .any(|z| (z.re - w.re).abs() <= tol && w.im.abs() <= z.im.abs() + tol),
            SrgRegion::Union { members } => members.iter().any(|r| r.contains(w, tol)),
            _ => self.distance(w) <= tol,
        }
    }

    /// Points representing the region: vertices, chord endpoints and `k`
    /// interior samples per edge or chord, or `4k` samples of a disk boundary.
    pub fn samples(&self, k: usize) -> Vec<C> {
        match self {
            SrgRegion::Disk { center, radius } => {
                let n = (4 * k).max(4);
                (0..n)
                    .map(|i| center + C::from_polar(*radius, std::f64::consts::TAU * i as f64 / n as f64))
                    .collect()
            }
            SrgRegion::Hull { vertices } => {
                let n = vertices.len();
                if n < 2 {
                    return vertices.clone();
                }
                let mut out = Vec::with_capacity(n * (k + 1));
                let edges = if n == 2 { 1 } else { n };
                for i in 0..edges {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    for s in 0..=k {
                        out.push(a + (b - a) * (s as f64 / (k + 1) as f64));
                    }
                }
                if n == 2 {
                    out.push(vertices[1]);
                }
                out
            }
            SrgRegion::ChordClosure { base_points } => densify_chords(base_points, k + 2),
            SrgRegion::Points { points } => points.clone(),
            SrgRegion::Union { members } => members.iter().flat_map(|r| r.samples(k)).collect(),
        }
    }

    fn map_points(&self, f: &impl Fn(C) -> C) -> Self {
        match self {
            SrgRegion::Disk { .. } => unreachable!("disks are mapped by parameters"),
            SrgRegion::Hull { vertices } => SrgRegion::Hull {
                vertices: vertices.iter().map(|z| f(*z)).collect(),
            },
            SrgRegion::ChordClosure { base_points } => SrgRegion::ChordClosure {
                base_points: base_points.iter().map(|z| f(*z)).collect(),
            },
            SrgRegion::Points { points } => SrgRegion::Points {
                points: points.iter().map(|z| f(*z)).collect(),
            },
            SrgRegion::Union { .. } => unreachable!("unions are mapped member-wise"),
        }
    }

    /// Real scaling by `factor` (any sign); rotation keeps hulls counterclockwise.
    fn real_scale(&self, factor: f64) -> Self {
        match self {
            SrgRegion::Disk { center, radius } => SrgRegion::Disk {
                center: center * factor,
                radius: radius * factor.abs(),
            },
            SrgRegion::Union { members } => SrgRegion::Union {
                members: members.iter().map(|r| r.real_scale(factor)).collect(),
            },
            _ => self.map_points(&|z| z * factor),
        }
    }

    /// Checks the structural invariants of the variant.
    pub fn is_valid(&self) -> bool {
        match self {
            SrgRegion::Disk { radius, .. } => *radius >= 0.0,
            SrgRegion::Hull { vertices } => {
                let n = vertices.len();
                n < 3
                    || (0..n).all(|i| {
                        let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                        cross(b - a, c - b) > 0.0
                    })
            }
            SrgRegion::ChordClosure { base_points } => {
                let mut up: Vec<(f64, f64)> = base_points.iter().filter(|z| z.im > 0.0).map(|z| (z.re, z.im)).collect();
                let mut down: Vec<(f64, f64)> = base_points.iter().filter(|z| z.im < 0.0).map(|z| (z.re, -z.im)).collect();
                up.sort_by(|a, b| a.partial_cmp(b).unwrap());
                down.sort_by(|a, b| a.partial_cmp(b).unwrap());
                up == down
            }
            SrgRegion::Points { .. } => true,
            SrgRegion::Union { members } => !members.is_empty() && members.iter().all(|r| r.is_valid()),
        }
    }
}

/// Result of a Möbius inversion `z -> 1/z*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inverted<T> {
    /// Image of the nonzero part.
    pub value: T,
    /// The input contained `0`, whose image is the point at infinity.
    pub unbounded: bool,
}

#[inline]
pub fn invert_point(z: C) -> C {
    z / z.norm_sqr()
}

/// Pointwise inversion of a cloud; points within `tol_zero` of `0` are dropped
/// and flag the result unbounded.
pub fn invert_cloud(cloud: &SrgCloud, tol_zero: f64) -> Inverted<SrgCloud> {
    let mut out = SrgCloud {
        omega: cloud.omega,
        points: Vec::with_capacity(cloud.len()),
        kinds: Vec::with_capacity(cloud.len()),
        n_samples: cloud.n_samples,
        closed_under_conjugation: cloud.closed_under_conjugation,
    };
    let mut unbounded = false;
    for (z, k) in cloud.points.iter().zip(&cloud.kinds) {
        if z.norm() <= tol_zero {
            unbounded = true;
        } else {
            out.points.push(invert_point(*z));
            out.kinds.push(*k);
        }
    }
    Inverted { value: out, unbounded }
}

/// Inversion of a region. Disks not containing `0` map exactly to disks;
/// other shapes are inverted through their samples (`k` per edge or chord)
/// and returned as a point set.
pub fn invert_region(region: &SrgRegion, tol_zero: f64, k: usize) -> Inverted<SrgRegion> {
    let unbounded = region.contains(C::new(0.0, 0.0), tol_zero);
    if let (SrgRegion::Disk { center, radius }, false) = (region, unbounded) {
        let denom = center.norm_sqr() - radius * radius;
        return Inverted {
            value: SrgRegion::Disk {
                center: center / denom,
                radius: radius / denom,
            },
            unbounded,
        };
    }
    let points = region
        .samples(k)
        .into_iter()
        .filter(|z| z.norm() > tol_zero)
        .map(invert_point)
        .collect();
    Inverted {
        value: SrgRegion::Points { points },
        unbounded,
    }
}

/// Smallest chord-property superset of the cloud.
pub fn chord_closure(cloud: &SrgCloud) -> SrgRegion {
    SrgRegion::ChordClosure {
        base_points: cloud.points.clone(),
    }
}

/// Mean-centered disk covering the cloud, radius inflated by `1 + DISK_INFLATION`.
pub fn disk_approx(cloud: &SrgCloud) -> SrgRegion {
    disk_of_points(&cloud.points, DISK_INFLATION)
}

pub fn disk_of_points(points: &[C], inflation: f64) -> SrgRegion {
    assert!(!points.is_empty(), "disk of an empty point set");
    let center = points.iter().sum::<C>() / points.len() as f64;
    let radius = points.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    SrgRegion::Disk {
        center,
        radius: radius * (1.0 + inflation),
    }
}

/// Convex hull of the cloud.
pub fn hull_approx(cloud: &SrgCloud) -> SrgRegion {
    assert!(!cloud.is_empty(), "hull of an empty cloud");
    SrgRegion::Hull {
        vertices: geometry::convex_hull(&cloud.points),
    }
}

/// `tau * R` for `tau` in `(0, 1]`.
pub fn scale_region(region: &SrgRegion, tau: f64) -> Result<SrgRegion> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("tau = {tau} is outside (0, 1]")));
    }
    Ok(region.real_scale(tau))
}

/// `-R`.
pub fn negate_region(region: &SrgRegion) -> SrgRegion {
    region.real_scale(-1.0)
}

/// Union of regions; a single region is returned unchanged.
pub fn union_regions(regions: Vec<SrgRegion>) -> Result<SrgRegion> {
    match regions.len() {
        0 => Err(Error::InvalidArgument("union of no regions".into())),
        1 => Ok(regions.into_iter().next().unwrap()),
        _ => Ok(SrgRegion::Union { members: regions }),
    }
}

/// Phase-binned boundary: per bin of `arg z` keep the points of minimal and
/// maximal modulus. Zero and the extreme points on each real half-axis are
/// kept as well.
pub fn phase_boundary(points: &[C], n_bins: usize) -> Vec<C> {
    assert!(n_bins >= 1);
    let mut lo: Vec<Option<C>> = vec![None; n_bins];
    let mut hi: Vec<Option<C>> = vec![None; n_bins];
    let mut zero = false;
    // exactly real points are tracked apart so they survive extraction
    let mut real: [Option<(C, C)>; 2] = [None, None];
    let width = std::f64::consts::TAU / n_bins as f64;
    for &z in points {
        let r = z.norm();
        if r == 0.0 {
            zero = true;
            continue;
        }
        if z.im == 0.0 {
            let slot = &mut real[(z.re < 0.0) as usize];
            *slot = Some(match *slot {
                None => (z, z),
                Some((l, h)) => (if r < l.norm() { z } else { l }, if r > h.norm() { z } else { h }),
            });
            continue;
        }
        let phase = z.im.atan2(z.re) + std::f64::consts::PI;
        let b = ((phase / width) as usize).min(n_bins - 1);
        if lo[b].is_none_or(|p| r < p.norm()) {
            lo[b] = Some(z);
        }
        if hi[b].is_none_or(|p| r > p.norm()) {
            hi[b] = Some(z);
        }
    }
    let mut out = Vec::with_capacity(2 * n_bins + 1);
    if zero {
        out.push(C::new(0.0, 0.0));
    }
    for (l, h) in real.into_iter().flatten() {
        out.push(l);
        if h != l {
            out.push(h);
        }
    }
    for b in 0..n_bins {
        if let Some(l) = lo[b] {
            out.push(l);
            let h = hi[b].unwrap();
            if h != l {
                out.push(h);
            }
        }
    }
    out
}

/// Phase-binned boundary of a cloud; the result is again a conjugate-closed cloud.
pub fn boundary_cloud(cloud: &SrgCloud, n_bins: usize) -> SrgCloud {
    let upper: Vec<C> = phase_boundary(&cloud.points, n_bins)
        .into_iter()
        .filter(|z| z.im >= 0.0)
        .collect();
    let mut out = SrgCloud::from_points(cloud.omega, &upper, SampleKind::Grid);
    out.n_samples = cloud.n_samples;
    out
}

/// Replaces every point by `k >= 2` evenly spaced points on its chord `[z*, z]`.
/// Real points are kept once.
pub fn densify_chords(points: &[C], k: usize) -> Vec<C> {
    let k = k.max(2);
    let mut out = Vec::with_capacity(points.len() * k);
    for &z in points {
        if z.im < 0.0 {
            continue;
        }
        if z.im == 0.0 {
            out.push(z);
            continue;
        }
        for i in 0..k {
            let t = 2.0 * i as f64 / (k - 1) as f64 - 1.0;
            out.push(C::new(z.re, z.im * t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn cloud(points: &[C]) -> SrgCloud {
        SrgCloud::from_points(1.0, points, SampleKind::Grid)
    }

    #[test]
    fn inversion_examples() {
        let inv = invert_cloud(&cloud(&[c(2.0, 0.0)]), ZERO_TOLERANCE);
        assert!(inv.value.points.iter().all(|z| (z - c(0.5, 0.0)).norm() < 1e-15));
        let inv = invert_cloud(&cloud(&[c(1.0, 1.0)]), ZERO_TOLERANCE);
        assert!((inv.value.points[0] - c(0.5, 0.5)).norm() < 1e-15);
        assert!(!inv.unbounded);
        let inv = invert_cloud(&cloud(&[c(0.0, 0.0), c(1.0, 0.0)]), ZERO_TOLERANCE);
        assert!(inv.unbounded);
    }

    #[test]
    fn disk_inversion_is_exact() {
        let d = SrgRegion::Disk { center: c(3.0, 1.0), radius: 1.0 };
        let inv = invert_region(&d, ZERO_TOLERANCE, 8);
        assert!(!inv.unbounded);
        for z in d.samples(50) {
            assert!(inv.value.distance(invert_point(z)) < 1e-12);
        }
        let d0 = SrgRegion::Disk { center: c(0.5, 0.0), radius: 1.0 };
        assert!(invert_region(&d0, ZERO_TOLERANCE, 8).unbounded);
    }

    #[test]
    fn chord_examples() {
        let r = chord_closure(&cloud(&[c(1.0, 1.0)]));
        assert!(r.contains(c(1.0, 0.0), 1e-12));
        assert!(r.contains(c(1.0, -0.99), 1e-12));
        assert!(!r.contains(c(1.1, 0.0), 1e-12));
        let r = chord_closure(&cloud(&[c(3.0, 0.0)]));
        assert!(r.contains(c(3.0, 0.0), 0.0));
        assert!(!r.contains(c(3.0, 0.1), 1e-12));
        let r = chord_closure(&cloud(&[c(0.0, 1.0)]));
        assert!(r.contains(c(0.0, 0.0), 0.0));
        assert!(r.is_valid());
    }

    #[test]
    fn disk_examples() {
        match disk_approx(&cloud(&[c(1.0, 0.0)])) {
            SrgRegion::Disk { center, radius } => {
                assert_eq!(center, c(1.0, 0.0));
                assert_eq!(radius, 0.0);
            }
            _ => unreachable!(),
        }
        match disk_approx(&cloud(&[c(1.0, 1.0)])) {
            SrgRegion::Disk { center, radius } => {
                assert!((center - c(1.0, 0.0)).norm() < 1e-15);
                assert!((radius - 1.0).abs() < 1e-5);
            }
            _ => unreachable!(),
        }
        let d = disk_of_points(&[c(0.0, 0.0), c(2.0, 0.0)], DISK_INFLATION);
        assert!(d.contains(c(0.0, 0.0), 0.0) && d.contains(c(2.0, 0.0), 0.0));
    }

    #[test]
    fn hull_examples() {
        let h = hull_approx(&cloud(&[c(1.0, 1.0), c(2.0, 0.0)]));
        match &h {
            SrgRegion::Hull { vertices } => assert_eq!(vertices.len(), 3),
            _ => unreachable!(),
        }
        assert!(h.is_valid());
        match hull_approx(&cloud(&[c(1.0, 0.0)])) {
            SrgRegion::Hull { vertices } => assert_eq!(vertices, vec![c(1.0, 0.0)]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn scaling_examples() {
        let d = scale_region(&SrgRegion::Disk { center: c(2.0, 0.0), radius: 1.0 }, 0.5).unwrap();
        assert_eq!(d, SrgRegion::Disk { center: c(1.0, 0.0), radius: 0.5 });
        let h = SrgRegion::Hull { vertices: vec![c(1.0, 0.0), c(0.0, 1.0)] };
        assert_eq!(scale_region(&h, 1.0).unwrap(), h);
        let s = scale_region(&chord_closure(&cloud(&[c(1.0, 1.0)])), 0.25).unwrap();
        assert!(s.contains(c(0.25, 0.25), 1e-15) && s.contains(c(0.25, -0.25), 1e-15));
        assert!(!s.contains(c(0.25, 0.3), 1e-12));
        assert!(scale_region(&h, 0.0).is_err());
        assert!(scale_region(&h, 1.5).is_err());
    }

    #[test]
    fn negation_keeps_hull_orientation() {
        let h = hull_approx(&cloud(&[c(1.0, 1.0), c(2.0, 0.5), c(3.0, 0.0)]));
        assert!(negate_region(&h).is_valid());
    }

    #[test]
    fn union_examples() {
        let u = union_regions(vec![
            SrgRegion::Disk { center: c(0.0, 0.0), radius: 1.0 },
            SrgRegion::Disk { center: c(3.0, 0.0), radius: 1.0 },
        ])
        .unwrap();
        assert!((u.distance(c(1.5, 0.0)) - 0.5).abs() < 1e-15);
        let one = SrgRegion::Disk { center: c(0.0, 0.0), radius: 1.0 };
        assert_eq!(union_regions(vec![one.clone()]).unwrap(), one);
        assert!(union_regions(vec![]).is_err());

        let base = hull_approx(&cloud(&[c(-1.0, 1.0)]));
        let copies = [0.25, 0.5, 1.0].iter().map(|&t| scale_region(&base, t).unwrap()).collect();
        assert!(union_regions(copies).unwrap().contains(c(-0.5, 0.5), 1e-12));
    }

    #[test]
    fn region_json_is_tagged() {
        let d = SrgRegion::Disk { center: c(1.0, 0.0), radius: 2.0 };
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["kind"], "disk");
        assert_eq!(v["payload"]["radius"], 2.0);
        let back: SrgRegion = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn boundary_keeps_extremes_per_bin() {
        let pts = [c(1.0, 0.01), c(2.0, 0.02), c(1.5, 0.015), c(-1.0, 0.0), c(0.0, 0.0)];
        let b = phase_boundary(&pts, 8);
        assert!(b.contains(&c(1.0, 0.01)) && b.contains(&c(2.0, 0.02)));
        assert!(!b.contains(&c(1.5, 0.015)));
        assert!(b.contains(&c(0.0, 0.0)) && b.contains(&c(-1.0, 0.0)));
    }

    #[test]
    fn densified_chords_span_segment() {
        let d = densify_chords(&[c(1.0, 2.0), c(1.0, -2.0), c(3.0, 0.0)], 5);
        assert_eq!(d.len(), 6);
        assert_eq!(d[0], c(1.0, -2.0));
        assert_eq!(d[2], c(1.0, 0.0));
        assert_eq!(d[4], c(1.0, 2.0));
    }
}
