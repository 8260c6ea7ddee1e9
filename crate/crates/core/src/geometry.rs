//! Planar geometry on complex numbers: convex hulls, point/segment/polygon
//! distances and the GJK distance between convex polygons.

use num_complex::Complex64;

type C = Complex64;

#[inline]
pub fn dot(a: C, b: C) -> f64 {
    a.re * b.re + a.im * b.im
}

#[inline]
pub fn cross(a: C, b: C) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Convex hull by Andrew's monotone chain, counterclockwise, collinear points dropped.
///
/// One input point gives a single vertex, collinear inputs give the two extremes.
pub fn convex_hull(points: &[C]) -> Vec<C> {
    let mut pts: Vec<C> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<C> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 2]) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<C> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 2]) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Distance from `p` to segment `[a, b]` and the closest point.
pub fn point_segment(p: C, a: C, b: C) -> (f64, C) {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return ((p - a).norm(), a);
    }
    let t = (dot(p - a, ab) / len2).clamp(0.0, 1.0);
    let q = a + ab * t;
    ((p - q).norm(), q)
}

/// Inside test for a counterclockwise convex polygon (boundary counts as inside).
pub fn point_in_convex_polygon(p: C, poly: &[C], tol: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => (p - poly[0]).norm() <= tol,
        2 => point_segment(p, poly[0], poly[1]).0 <= tol,
        n => (0..n).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let e = b - a;
            cross(e, p - a) >= -tol * e.norm()
        }),
    }
}

/// Distance from `p` to a convex polygon (zero inside) and the closest point.
pub fn point_polygon(p: C, poly: &[C]) -> (f64, C) {
    match poly.len() {
        0 => (f64::INFINITY, p),
        1 => ((p - poly[0]).norm(), poly[0]),
        n => {
            if n >= 3 && point_in_convex_polygon(p, poly, 0.0) {
                return (0.0, p);
            }
            let mut best = (f64::INFINITY, p);
            for i in 0..n {
                let d = point_segment(p, poly[i], poly[(i + 1) % n]);
                if d.0 < best.0 {
                    best = d;
                }
            }
            best
        }
    }
}

/// Outcome of a convex-polygon distance query.
#[derive(Debug, Clone, Copy)]
pub struct PolygonDistance {
    pub distance: f64,
    /// Closest point on the first polygon.
    pub on_first: C,
    /// Closest point on the second polygon.
    pub on_second: C,
    pub iterations: usize,
}

#[derive(Clone, Copy)]
struct SimplexVertex {
    w: C,
    p: C,
    q: C,
}

fn support(poly: &[C], d: C) -> C {
    let mut best = poly[0];
    let mut best_dot = dot(best, d);
    for &v in &poly[1..] {
        let s = dot(v, d);
        if s > best_dot {
            best_dot = s;
            best = v;
        }
    }
    best
}

/// Closest point of a 1- or 2-simplex to the origin, reducing the simplex to
/// the supporting face. Returns `None` when the origin lies inside a triangle.
fn reduce(simplex: &mut Vec<SimplexVertex>, weights: &mut Vec<f64>) -> Option<C> {
    match simplex.len() {
        1 => {
            weights.clear();
            weights.push(1.0);
            Some(simplex[0].w)
        }
        2 => {
            let (a, b) = (simplex[0].w, simplex[1].w);
            let ab = b - a;
            let len2 = ab.norm_sqr();
            let t = if len2 == 0.0 { 0.0 } else { (-dot(a, ab) / len2).clamp(0.0, 1.0) };
            if t == 0.0 {
                simplex.truncate(1);
                weights.clear();
                weights.push(1.0);
                Some(a)
            } else if t == 1.0 {
                simplex.swap(0, 1);
                simplex.truncate(1);
                weights.clear();
                weights.push(1.0);
                Some(b)
            } else {
                weights.clear();
                weights.extend([1.0 - t, t]);
                Some(a + ab * t)
            }
        }
        3 => {
            let (a, b, c) = (simplex[0].w, simplex[1].w, simplex[2].w);
            let area = cross(b - a, c - a);
            if area != 0.0 {
                let s0 = cross(b, c) / area;
                let s1 = cross(c, a) / area;
                let s2 = cross(a, b) / area;
                if s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0 {
                    return None;
                }
            }
            // closest point lies on an edge
            let edges = [(0usize, 1usize), (1, 2), (0, 2)];
            let mut best: Option<(f64, Vec<SimplexVertex>, Vec<f64>, C)> = None;
            for (i, j) in edges {
                let mut sub = vec![simplex[i], simplex[j]];
                let mut w = Vec::new();
                let v = reduce(&mut sub, &mut w).unwrap();
                let n = v.norm();
                if best.as_ref().is_none_or(|b| n < b.0) {
                    best = Some((n, sub, w, v));
                }
            }
            let (_, sub, w, v) = best.unwrap();
            *simplex = sub;
            *weights = w;
            Some(v)
        }
        _ => unreachable!("planar simplex has at most three vertices"),
    }
}

/// Distance between the convex hulls of two point sets by the
/// Gilbert-Johnson-Keerthi iteration on the Minkowski difference.
///
/// Inputs may be any finite point lists (hull vertices keep it `O(n + m)` per
/// iteration). Overlapping or touching sets report distance zero.
pub fn gjk_distance(first: &[C], second: &[C]) -> PolygonDistance {
    assert!(!first.is_empty() && !second.is_empty(), "empty polygon");
    let start = SimplexVertex {
        w: first[0] - second[0],
        p: first[0],
        q: second[0],
    };
    let mut simplex = vec![start];
    let mut weights = vec![1.0];
    let mut v = start.w;
    let scale = first
        .iter()
        .chain(second.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let max_iter = 4 * (first.len() + second.len()) + 16;
    let mut iterations = 0;
    let mut inside = false;
    while iterations < max_iter {
        iterations += 1;
        let vv = v.norm_sqr();
        if vv.sqrt() <= 1e-15 * scale {
            inside = true;
            break;
        }
        let p = support(first, -v);
        let q = support(second, v);
        let w = p - q;
        if vv - dot(v, w) <= 1e-13 * vv || simplex.iter().any(|s| s.w == w) {
            break;
        }
        simplex.push(SimplexVertex { w, p, q });
        match reduce(&mut simplex, &mut weights) {
            Some(nv) => v = nv,
            None => {
                inside = true;
                break;
            }
        }
    }
    let on_first = simplex.iter().zip(&weights).map(|(s, &l)| s.p * l).sum::<C>();
    let on_second = simplex.iter().zip(&weights).map(|(s, &l)| s.q * l).sum::<C>();
    if inside {
        // witnesses are a representative common point when overlapping
        let mid = (on_first + on_second) * 0.5;
        return PolygonDistance {
            distance: 0.0,
            on_first: mid,
            on_second: mid,
            iterations,
        };
    }
    PolygonDistance {
        distance: v.norm(),
        on_first,
        on_second,
        iterations,
    }
}
