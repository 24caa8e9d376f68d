//! Convex polygons in the plane, stored as counter-clockwise vertex lists.

pub type P2 = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub verts: Vec<P2>,
}

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon {
    /// Orders the points counter-clockwise around their centroid and drops
    /// near-duplicates. Input is assumed to be in convex position.
    pub fn from_convex_points(mut pts: Vec<P2>) -> Self {
        let n = pts.len().max(1) as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        pts.sort_by(|a, b| {
            let ta = (a[1] - cy).atan2(a[0] - cx);
            let tb = (b[1] - cy).atan2(b[0] - cx);
            ta.total_cmp(&tb)
        });
        let scale = pts.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs())).max(1.0);
        let mut out: Vec<P2> = Vec::with_capacity(pts.len());
        for p in pts {
            if let Some(q) = out.last() {
                if (p[0] - q[0]).abs() + (p[1] - q[1]).abs() <= 1e-12 * scale {
                    continue;
                }
            }
            out.push(p);
        }
        if out.len() > 1 {
            let (f, l) = (out[0], out[out.len() - 1]);
            if (f[0] - l[0]).abs() + (f[1] - l[1]).abs() <= 1e-12 * scale {
                out.pop();
            }
        }
        Polygon { verts: out }
    }

    pub fn rectangle(lo: P2, hi: P2) -> Self {
        Polygon { verts: vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]] }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn area(&self) -> f64 {
        let n = self.verts.len();
        if n < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            s += a[0] * b[1] - a[1] * b[0];
        }
        0.5 * s
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.verts.len();
        (0..n)
            .map(|i| {
                let a = self.verts[i];
                let b = self.verts[(i + 1) % n];
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }

    pub fn centroid(&self) -> P2 {
        let n = self.verts.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = self.verts[i];
            let q = self.verts[(i + 1) % n];
            let c = p[0] * q[1] - q[0] * p[1];
            a2 += c;
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
        }
        [cx / (3.0 * a2), cy / (3.0 * a2)]
    }

    pub fn contains(&self, p: P2, tol: f64) -> bool {
        let n = self.verts.len();
        (0..n).all(|i| {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            cross(a, b, p) >= -tol * len
        })
    }

    /// Clips to the half-plane `<n, x> <= c` (Sutherland-Hodgman step).
    pub fn clip_halfplane(&self, n: P2, c: f64) -> Polygon {
        let k = self.verts.len();
        let mut out = Vec::with_capacity(k + 1);
        for i in 0..k {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % k];
            let da = n[0] * a[0] + n[1] * a[1] - c;
            let db = n[0] * b[0] + n[1] * b[1] - c;
            if da <= 0.0 {
                out.push(a);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let s = da / (da - db);
                out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        Polygon { verts: out }
    }

    /// Intersection with another convex polygon.
    pub fn clip_convex(&self, other: &Polygon) -> Polygon {
        let mut out = self.clone();
        let k = other.verts.len();
        for i in 0..k {
            if out.verts.is_empty() {
                break;
            }
            let a = other.verts[i];
            let b = other.verts[(i + 1) % k];
            // Inward side of a CCW edge is to the left, so the outward normal is (dy, -dx).
            let n = [b[1] - a[1], a[0] - b[0]];
            out = out.clip_halfplane(n, n[0] * a[0] + n[1] * a[1]);
        }
        out
    }

    /// Length of the part of segment `p -> q` inside the polygon.
    pub fn segment_inside(&self, p: P2, q: P2) -> f64 {
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let d = [q[0] - p[0], q[1] - p[1]];
        let k = self.verts.len();
        for i in 0..k {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % k];
            let n = [b[1] - a[1], a[0] - b[0]];
            let num = n[0] * (a[0] - p[0]) + n[1] * (a[1] - p[1]);
            let den = n[0] * d[0] + n[1] * d[1];
            if den.abs() < 1e-300 {
                if num < 0.0 {
                    return 0.0;
                }
            } else {
                let t = num / den;
                if den > 0.0 {
                    t1 = t1.min(t);
                } else {
                    t0 = t0.max(t);
                }
            }
            if t0 >= t1 {
                return 0.0;
            }
        }
        (t1 - t0) * d[0].hypot(d[1])
    }

    pub fn bbox(&self) -> (P2, P2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.verts {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    /// Interior angle at each vertex.
    pub fn interior_angles(&self) -> Vec<f64> {
        let k = self.verts.len();
        (0..k)
            .map(|i| {
                let p = self.verts[(i + k - 1) % k];
                let v = self.verts[i];
                let q = self.verts[(i + 1) % k];
                let a = (p[1] - v[1]).atan2(p[0] - v[0]);
                let b = (q[1] - v[1]).atan2(q[0] - v[0]);
                let mut d = (a - b).abs();
                if d > std::f64::consts::PI {
                    d = 2.0 * std::f64::consts::PI - d;
                }
                d
            })
            .collect()
    }

    /// Area of the intersection with the disk of radius `r` about `c`.
    pub fn disk_intersection_area(&self, c: P2, r: f64) -> f64 {
        let k = self.verts.len();
        let mut s = 0.0;
        for i in 0..k {
            let a = [self.verts[i][0] - c[0], self.verts[i][1] - c[1]];
            let b = [self.verts[(i + 1) % k][0] - c[0], self.verts[(i + 1) % k][1] - c[1]];
            s += tri_disk_area(a, b, r);
        }
        s
    }

    /// Length of the circle of radius `r` about `c` that lies inside the polygon.
    pub fn circle_inside_length(&self, c: P2, r: f64) -> f64 {
        let k = self.verts.len();
        let mut angles: Vec<f64> = Vec::new();
        for i in 0..k {
            let a = [self.verts[i][0] - c[0], self.verts[i][1] - c[1]];
            let b = [self.verts[(i + 1) % k][0] - c[0], self.verts[(i + 1) % k][1] - c[1]];
            for s in segment_circle_params(a, b, r) {
                let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                angles.push(p[1].atan2(p[0]));
            }
        }
        if angles.is_empty() {
            let probe = [c[0] + r, c[1]];
            return if self.contains(probe, 0.0) { 2.0 * std::f64::consts::PI * r } else { 0.0 };
        }
        angles.sort_by(|a, b| a.total_cmp(b));
        let m = angles.len();
        let mut total = 0.0;
        for i in 0..m {
            let a0 = angles[i];
            let mut a1 = if i + 1 < m { angles[i + 1] } else { angles[0] + 2.0 * std::f64::consts::PI };
            if a1 < a0 {
                a1 += 2.0 * std::f64::consts::PI;
            }
            if a1 - a0 <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a0 + a1);
            let probe = [c[0] + r * mid.cos(), c[1] + r * mid.sin()];
            if self.contains(probe, 0.0) {
                total += r * (a1 - a0);
            }
        }
        total
    }
}

/// Parameters `s` in (0,1) where the segment a->b crosses the circle |x| = r.
fn segment_circle_params(a: P2, b: P2, r: f64) -> Vec<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if qa == 0.0 || disc <= 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut out = Vec::with_capacity(2);
    for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        if s > 0.0 && s < 1.0 {
            out.push(s);
        }
    }
    out
}

/// Signed area of the intersection of the triangle (0, a, b) with the disk
/// of radius r centered at the origin.
fn tri_disk_area(a: P2, b: P2, r: f64) -> f64 {
    // Split the edge at its circle crossings; straight pieces inside the disk
    // contribute a triangle, pieces outside contribute a circular sector.
    let mut cuts = vec![0.0];
    cuts.extend(segment_circle_params(a, b, r));
    cuts.push(1.0);
    let mut s = 0.0;
    for w in cuts.windows(2) {
        let p = [a[0] + w[0] * (b[0] - a[0]), a[1] + w[0] * (b[1] - a[1])];
        let q = [a[0] + w[1] * (b[0] - a[0]), a[1] + w[1] * (b[1] - a[1])];
        let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        if m[0] * m[0] + m[1] * m[1] <= r * r {
            s += 0.5 * (p[0] * q[1] - p[1] * q[0]);
        } else {
            let ang = (p[0] * q[1] - p[1] * q[0]).atan2(p[0] * q[0] + p[1] * q[1]);
            s += 0.5 * r * r * ang;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> Polygon {
        Polygon::rectangle([0.0, 0.0], [1.0, 1.0])
    }

    #[test]
    fn square_area_and_clip() {
        let sq = unit_square();
        assert!((sq.area() - 1.0).abs() < 1e-15);
        let half = sq.clip_halfplane([1.0, 0.0], 0.5);
        assert!((half.area() - 0.5).abs() < 1e-15);
        let tri = sq.clip_halfplane([1.0, 1.0], 1.0);
        assert!((tri.area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quarter_disk_at_corner() {
        let sq = unit_square();
        let r = 0.3;
        assert!((sq.disk_intersection_area([0.0, 0.0], r) - PI * r * r / 4.0).abs() < 1e-14);
        assert!((sq.circle_inside_length([0.0, 0.0], r) - PI * r / 2.0).abs() < 1e-14);
        assert!((sq.disk_intersection_area([0.5, 0.5], 0.2) - PI * 0.04).abs() < 1e-14);
        assert!((sq.disk_intersection_area([0.5, 0.5], 5.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn half_disk_on_edge() {
        let sq = unit_square();
        let a = sq.disk_intersection_area([0.5, 0.0], 0.25);
        assert!((a - PI * 0.0625 / 2.0).abs() < 1e-14);
        assert!((sq.circle_inside_length([0.5, 0.0], 0.25) - PI * 0.25).abs() < 1e-14);
    }

    #[test]
    fn segment_clipping() {
        let sq = unit_square();
        assert!((sq.segment_inside([-1.0, 0.5], [2.0, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(sq.segment_inside([-1.0, 2.0], [2.0, 2.0]), 0.0);
    }

    #[test]
    fn convex_clip_of_shifted_squares() {
        let a = unit_square();
        let b = Polygon::rectangle([0.1, 0.0], [1.1, 1.0]);
        assert!((a.clip_convex(&b).area() - 0.9).abs() < 1e-14);
    }
}
