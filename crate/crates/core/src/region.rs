//! The optimal DoF region and its weighted-sum decomposition.
//!
//! The region is `{d1 <= 1, d2 <= 1, d1 + d2 <= 1 + min(a_e, b_e)}` in the
//! nonnegative quadrant. It can also be written as a weighted Minkowski sum
//! of three basis regions, one per subchannel state class: the unit square
//! (both users perfectly known), the `S_3^{3/2}` pentagon (alternating
//! perfect/none) and the simplex (neither known). [`compose_weighted`]
//! builds the region that way, independently of [`dof_region`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::CsitProfile;

/// Vertices closer than this are merged.
const VERTEX_TOL: f64 = 1e-12;

/// A constraint `n1 * d1 + n2 * d2 <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlane {
    pub normal: (f64, f64),
    pub bound: f64,
}

impl HalfPlane {
    pub fn slack(&self, (d1, d2): (f64, f64)) -> f64 {
        self.bound - (self.normal.0 * d1 + self.normal.1 * d2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofRegion {
    /// `min(a_e, b_e)`.
    pub min_avg: f64,
    /// Corner points, counterclockwise from the origin.
    pub vertices: Vec<(f64, f64)>,
}

impl DofRegion {
    /// Region bounded by `d1 + d2 <= 1 + min_avg` in the unit square.
    pub fn with_min_avg(min_avg: f64) -> DofRegion {
        let m = min_avg;
        let candidates = [(0.0, 0.0), (1.0, 0.0), (1.0, m), (m, 1.0), (0.0, 1.0)];
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(5);
        for v in candidates {
            if vertices.last().is_none_or(|&u| !same_point(u, v, VERTEX_TOL)) {
                vertices.push(v);
            }
        }
        DofRegion { min_avg, vertices }
    }

    pub fn halfplanes(&self) -> [HalfPlane; 3] {
        [
            HalfPlane { normal: (1.0, 0.0), bound: 1.0 },
            HalfPlane { normal: (0.0, 1.0), bound: 1.0 },
            HalfPlane { normal: (1.0, 1.0), bound: 1.0 + self.min_avg },
        ]
    }

    /// Sum-DoF of the region.
    pub fn sum_dof(&self) -> f64 {
        1.0 + self.min_avg
    }

    /// The two nontrivial corners `(1, min_avg)` and `(min_avg, 1)`.
    pub fn corners(&self) -> [(f64, f64); 2] {
        [(1.0, self.min_avg), (self.min_avg, 1.0)]
    }

    /// The region with `d1` and `d2` exchanged.
    pub fn mirrored(&self) -> DofRegion {
        let mut vertices: Vec<(f64, f64)> = self.vertices.iter().map(|&(x, y)| (y, x)).collect();
        // keep counterclockwise order starting at the origin
        vertices[1..].reverse();
        DofRegion {
            min_avg: self.min_avg,
            vertices,
        }
    }

    /// Largest coordinate-wise distance between matching vertices, or
    /// infinity if the vertex counts differ.
    pub fn vertex_distance(&self, other: &DofRegion) -> f64 {
        if self.vertices.len() != other.vertices.len() {
            return f64::INFINITY;
        }
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(u, v)| (u.0 - v.0).abs().max((u.1 - v.1).abs()))
            .fold(0.0, f64::max)
    }
}

fn same_point(u: (f64, f64), v: (f64, f64), tol: f64) -> bool {
    (u.0 - v.0).abs() <= tol && (u.1 - v.1).abs() <= tol
}

pub fn dof_region(profile: &CsitProfile) -> DofRegion {
    DofRegion::with_min_avg(profile.a_mean().min(profile.b_mean()))
}

pub fn contains(region: &DofRegion, point: (f64, f64), tol: f64) -> bool {
    point.0 >= -tol && point.1 >= -tol && region.halfplanes().iter().all(|h| h.slack(point) >= -tol)
}

/// Channel-use shares of the subchannel state classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    /// Both users perfectly known (PP).
    pub r_bar: f64,
    /// Paired alternating PN / NP uses.
    pub r_hat: f64,
    /// Neither user known (NN), including the merged leftover.
    pub r_tilde: f64,
    /// Leftover one-sided PN or NP use that cannot be paired.
    pub r_hat_prime: f64,
}

pub fn weights(profile: &CsitProfile) -> Weights {
    let mut r_bar = 0.0;
    let mut sum_max = 0.0;
    let mut q_plus = 0.0;
    let mut q_minus = 0.0;
    for (&a, &b) in profile.a().iter().zip(profile.b()) {
        r_bar += a.min(b);
        sum_max += a.max(b);
        if a > b {
            q_plus += a - b;
        } else {
            q_minus += b - a;
        }
    }
    let r_hat_prime = (q_plus - q_minus).abs();
    Weights {
        r_bar,
        r_hat: 2.0 * q_plus.min(q_minus),
        r_tilde: profile.len() as f64 - sum_max + r_hat_prime,
        r_hat_prime,
    }
}

/// Builds the region as `(r_bar * square + r_hat * pentagon + r_tilde * simplex) / L`.
pub fn compose_weighted(w: &Weights, l: usize) -> Result<DofRegion> {
    for (name, value) in [
        ("r_bar", w.r_bar),
        ("r_hat", w.r_hat),
        ("r_tilde", w.r_tilde),
        ("r_hat_prime", w.r_hat_prime),
    ] {
        if value < -VERTEX_TOL {
            return Err(Error::NegativeWeight { name, value });
        }
    }
    let scale = 1.0 / l as f64;
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let pentagon = [(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)];
    let simplex = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];

    let mut sum = vec![(0.0, 0.0)];
    for (weight, basis) in [
        (w.r_bar.max(0.0), &square[..]),
        (w.r_hat.max(0.0), &pentagon[..]),
        (w.r_tilde.max(0.0), &simplex[..]),
    ] {
        let k = weight * scale;
        sum = minkowski_sum(&sum, &basis.iter().map(|&(x, y)| (k * x, k * y)).collect::<Vec<_>>());
    }
    let min_avg = sum.iter().map(|&(x, y)| x + y).fold(f64::NEG_INFINITY, f64::max) - 1.0;
    Ok(DofRegion { min_avg, vertices: sum })
}

fn minkowski_sum(p: &[(f64, f64)], q: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let points: Vec<(f64, f64)> = p
        .iter()
        .flat_map(|&(x, y)| q.iter().map(move |&(u, v)| (x + u, y + v)))
        .collect();
    convex_hull(points)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull, counterclockwise from the lowest-x, lowest-y point,
/// with duplicate and collinear points removed.
fn convex_hull(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)));
    points.dedup_by(|u, v| same_point(*u, *v, VERTEX_TOL));
    if points.len() < 3 {
        return points;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * points.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(points.iter())
        } else {
            Box::new(points.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= VERTEX_TOL {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Sum-DoF of the optimal two-subband scheme for the unmatched profile
/// `a = (beta, alpha)`, `b = (alpha, beta)`.
pub fn sum_dof_optimal(alpha: f64, beta: f64) -> Result<f64> {
    if beta < alpha {
        return Err(Error::OrderViolation { alpha, beta });
    }
    Ok((2.0 * beta + 2.0 * alpha + (beta - alpha) + 2.0 - 2.0 * beta) / 2.0)
}

/// Sum-DoF of the MAT-based scheme for the same unmatched profile. It spends
/// an extra `beta - alpha` channel use multicasting the overheard symbols.
pub fn sum_dof_suboptimal(alpha: f64, beta: f64) -> Result<f64> {
    if beta < alpha {
        return Err(Error::OrderViolation { alpha, beta });
    }
    let fdma = (2.0 - 3.0 * beta + alpha).max(0.0);
    Ok((2.0 * beta + 2.0 * alpha + 2.0 * (beta - alpha) + fdma) / (3.0 * beta - alpha + fdma))
}
