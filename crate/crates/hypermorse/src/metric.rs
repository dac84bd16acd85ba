//! Finite metric spaces with exact hyperbolicity diagnostics.
//!
//! Distances are integers (graph hop metrics), so Gromov products are exact
//! half-integers; nothing here rounds. The four-point constant is the least
//! `delta` such that for every ordered quadruple `(p, x, y, z)`
//!
//! ```text
//! (x|z)_p >= min{ (x|y)_p, (y|z)_p } - delta
//! ```
//!
//! and is computed by exhaustive scan (with an opt-in sampled mode for large
//! spaces). The thin-triangle constant measures, over triangles of canonical
//! geodesics, how far a point on one side can sit from the union of the other
//! two sides.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a point in a finite metric space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An exact half-integer, stored as its double.
///
/// Gromov products of integer distances always land on this grid, so
/// comparisons between them are exact integer comparisons.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HalfInteger {
    doubled: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { doubled: 0 };

    pub fn from_doubled(doubled: i64) -> Self {
        HalfInteger { doubled }
    }

    pub fn from_integer(v: i64) -> Self {
        HalfInteger { doubled: 2 * v }
    }

    pub fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn as_f64(self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled % 2 == 0 {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl std::ops::Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger { doubled: self.doubled + rhs.doubled }
    }
}

impl std::ops::Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger { doubled: self.doubled - rhs.doubled }
    }
}

/// Quadruple scan policy for the four-point constant.
#[derive(Clone, Copy, Debug)]
pub enum QuadrupleScan {
    /// Scan all `n^4` ordered quadruples; refuse spaces above `max_points`.
    Exhaustive { max_points: usize },
    /// Scan `quadruples` uniform random ordered quadruples. The result is a
    /// lower bound for the exhaustive value, exact on trees (all defects 0).
    Sampled { quadruples: usize, seed: u64 },
}

/// Default cap for the exhaustive quadruple scan.
pub const DEFAULT_EXHAUSTIVE_MAX_POINTS: usize = 150;

impl Default for QuadrupleScan {
    fn default() -> Self {
        QuadrupleScan::Exhaustive { max_points: DEFAULT_EXHAUSTIVE_MAX_POINTS }
    }
}

/// Triangle scan policy for the thin-triangle constant.
#[derive(Clone, Copy, Debug)]
pub enum TriangleScan {
    Exhaustive,
    Sampled { triangles: usize, seed: u64 },
}

impl TriangleScan {
    /// Exhaustive below 60 points, 4000 sampled triangles above.
    pub fn auto(n: usize, seed: u64) -> TriangleScan {
        if n <= 60 {
            TriangleScan::Exhaustive
        } else {
            TriangleScan::Sampled { triangles: 4000, seed }
        }
    }
}

/// Anything that can hand out one canonical geodesic per point pair.
pub trait GeodesicProvider {
    /// The canonical geodesic from `u` to `v` as a point sequence; the same
    /// pair always yields the same sequence.
    fn geodesic_points(&self, u: PointId, v: PointId) -> Result<Vec<PointId>>;
}

/// A finite metric space given by its full integer distance table.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<u32>,
}

impl FiniteMetricSpace {
    /// Builds a space from a row-major `n x n` table, checking all metric
    /// axioms (symmetry, identity, positivity, triangle inequality). The
    /// triangle check is O(n^3); graph-derived metrics skip it internally.
    pub fn from_table(n: usize, dist: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMetric("empty space".into()));
        }
        if dist.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "table has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for i in 0..n {
            if dist[i * n + i] != 0 {
                return Err(Error::InvalidMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..i {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) asymmetric")));
                }
                if dist[i * n + j] == 0 {
                    return Err(Error::InvalidMetric(format!(
                        "distinct points {j},{i} at distance 0"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = dist[i * n + j] as u64;
                for k in 0..n {
                    if dij > dist[i * n + k] as u64 + dist[k * n + j] as u64 {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { n, dist })
    }

    /// For tables already known to satisfy the metric axioms (BFS distances).
    pub(crate) fn from_table_unchecked(n: usize, dist: Vec<u32>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        FiniteMetricSpace { n, dist }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.n).map(PointId)
    }

    pub fn check_point(&self, p: PointId) -> Result<usize> {
        if p.0 < self.n {
            Ok(p.0)
        } else {
            Err(Error::PointOutOfRange { index: p.0, count: self.n })
        }
    }

    #[inline]
    pub(crate) fn raw(&self, a: usize, b: usize) -> u32 {
        debug_assert!(a < self.n && b < self.n);
        self.dist[a * self.n + b]
    }

    pub fn distance(&self, a: PointId, b: PointId) -> Result<u32> {
        Ok(self.raw(self.check_point(a)?, self.check_point(b)?))
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// Gromov product `(x|y)_p = (|xp| + |yp| - |xy|) / 2`, exact.
    pub fn gromov_product(&self, x: PointId, y: PointId, p: PointId) -> Result<HalfInteger> {
        let (x, y, p) = (self.check_point(x)?, self.check_point(y)?, self.check_point(p)?);
        let doubled =
            self.raw(x, p) as i64 + self.raw(y, p) as i64 - self.raw(x, y) as i64;
        Ok(HalfInteger::from_doubled(doubled))
    }

    /// Four-point hyperbolicity constant under the default exhaustive scan.
    pub fn four_point_delta(&self) -> Result<HalfInteger> {
        self.four_point_delta_with(QuadrupleScan::default())
    }

    pub fn four_point_delta_with(&self, scan: QuadrupleScan) -> Result<HalfInteger> {
        match scan {
            QuadrupleScan::Exhaustive { max_points } => {
                if self.n > max_points {
                    return Err(Error::TooLarge { n: self.n, max: max_points });
                }
                Ok(self.four_point_exhaustive())
            }
            QuadrupleScan::Sampled { quadruples, seed } => {
                Ok(self.four_point_sampled(quadruples, seed))
            }
        }
    }

    /// Max over ordered quadruples of `min((x|y)_p, (y|z)_p) - (x|z)_p`,
    /// clamped at zero. Runs as a (max, min) matrix self-product per base
    /// point: the inner sweep is pure i32 min/max over rows, which the
    /// compiler vectorizes; distances are far below i32 range.
    fn four_point_exhaustive(&self) -> HalfInteger {
        let n = self.n;
        let best_doubled = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut g = vec![0i32; n * n];
                for x in 0..n {
                    let dxp = self.raw(x, p) as i64;
                    for y in 0..n {
                        g[x * n + y] =
                            (dxp + self.raw(y, p) as i64 - self.raw(x, y) as i64) as i32;
                    }
                }
                let mut acc = vec![0i32; n];
                let mut best = 0i64;
                for x in 0..n {
                    acc.fill(i32::MIN);
                    for y in 0..n {
                        let gxy = g[x * n + y];
                        let row = &g[y * n..y * n + n];
                        for (a, &gyz) in acc.iter_mut().zip(row) {
                            let m = if gxy < gyz { gxy } else { gyz };
                            if m > *a {
                                *a = m;
                            }
                        }
                    }
                    let gx = &g[x * n..x * n + n];
                    for z in 0..n {
                        let defect = acc[z] as i64 - gx[z] as i64;
                        if defect > best {
                            best = defect;
                        }
                    }
                }
                best
            })
            .max()
            .unwrap_or(0);
        HalfInteger::from_doubled(best_doubled.max(0))
    }

    fn four_point_sampled(&self, quadruples: usize, seed: u64) -> HalfInteger {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0i64;
        for _ in 0..quadruples {
            let p = rng.random_range(0..n);
            let x = rng.random_range(0..n);
            let y = rng.random_range(0..n);
            let z = rng.random_range(0..n);
            let gp = |a: usize, b: usize| {
                self.raw(a, p) as i64 + self.raw(b, p) as i64 - self.raw(a, b) as i64
            };
            let defect = gp(x, y).min(gp(y, z)) - gp(x, z);
            if defect > best {
                best = defect;
            }
        }
        HalfInteger::from_doubled(best)
    }

    /// Visual distance `e^{-(xi|eta)_p}` between two proxy-boundary points as
    /// seen from `p`. Picking boundary-like points is the caller's business.
    pub fn visual_distance(&self, xi: PointId, eta: PointId, p: PointId) -> Result<f64> {
        let g = self.gromov_product(xi, eta, p)?;
        Ok((-g.as_f64()).exp())
    }
}

/// Thin-triangle constant: over scanned triangles `(x, y, z)` and points `p`
/// on the canonical side `xy`, the max of `d(p, side(xz) + side(yz))`,
/// repeated for all three side choices. Degenerate triangles contribute 0.
pub fn thin_triangle_delta(
    space: &FiniteMetricSpace,
    geodesics: &impl GeodesicProvider,
    scan: TriangleScan,
) -> Result<u32> {
    let n = space.len();
    if n < 3 {
        return Ok(0);
    }
    let mut worst = 0u32;
    let mut visit = |x: usize, y: usize, z: usize| -> Result<()> {
        let side_xy = geodesics.geodesic_points(PointId(x), PointId(y))?;
        let side_xz = geodesics.geodesic_points(PointId(x), PointId(z))?;
        let side_yz = geodesics.geodesic_points(PointId(y), PointId(z))?;
        let sides = [&side_xy, &side_xz, &side_yz];
        for base in 0..3 {
            let others: [&Vec<PointId>; 2] = match base {
                0 => [sides[1], sides[2]],
                1 => [sides[0], sides[2]],
                _ => [sides[0], sides[1]],
            };
            for &p in sides[base] {
                let mut nearest = u32::MAX;
                for other in others {
                    for &q in other {
                        nearest = nearest.min(space.raw(p.0, q.0));
                    }
                }
                worst = worst.max(nearest);
            }
        }
        Ok(())
    };
    match scan {
        TriangleScan::Exhaustive => {
            for x in 0..n {
                for y in (x + 1)..n {
                    for z in (y + 1)..n {
                        visit(x, y, z)?;
                    }
                }
            }
        }
        TriangleScan::Sampled { triangles, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..triangles {
                let x = rng.random_range(0..n);
                let mut y = rng.random_range(0..n);
                while y == x {
                    y = rng.random_range(0..n);
                }
                let mut z = rng.random_range(0..n);
                while z == x || z == y {
                    z = rng.random_range(0..n);
                }
                visit(x, y, z)?;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_space(n: usize) -> FiniteMetricSpace {
        let mut dist = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = (i as i64 - j as i64).unsigned_abs() as u32;
            }
        }
        FiniteMetricSpace::from_table(n, dist).unwrap()
    }

    fn cycle_space(n: usize) -> FiniteMetricSpace {
        let mut dist = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let a = (i as i64 - j as i64).unsigned_abs() as u32;
                dist[i * n + j] = a.min(n as u32 - a);
            }
        }
        FiniteMetricSpace::from_table(n, dist).unwrap()
    }

    /// Plain four-nested-loop oracle, kept deliberately naive.
    fn four_point_naive(space: &FiniteMetricSpace) -> i64 {
        let n = space.len();
        let mut best = 0i64;
        for p in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let g = |a: usize, b: usize| {
                            space.raw(a, p) as i64 + space.raw(b, p) as i64
                                - space.raw(a, b) as i64
                        };
                        best = best.max(g(x, y).min(g(y, z)) - g(x, z));
                    }
                }
            }
        }
        best
    }

    /// Independent pairing-sum oracle: max over 4-subsets of
    /// (largest pairing sum - second largest) / 2, doubled.
    fn four_point_pairing(space: &FiniteMetricSpace) -> i64 {
        let n = space.len();
        let mut best = 0i64;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let s1 = space.raw(a, b) as i64 + space.raw(c, d) as i64;
                        let s2 = space.raw(a, c) as i64 + space.raw(b, d) as i64;
                        let s3 = space.raw(a, d) as i64 + space.raw(b, c) as i64;
                        let mut s = [s1, s2, s3];
                        s.sort_unstable();
                        best = best.max(s[2] - s[1]);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn gromov_product_base_cases() {
        let s = path_space(6);
        // (x|y)_p with p = x vanishes
        assert_eq!(
            s.gromov_product(PointId(2), PointId(5), PointId(2)).unwrap(),
            HalfInteger::ZERO
        );
        // x = y gives the distance to the base point
        assert_eq!(
            s.gromov_product(PointId(4), PointId(4), PointId(1)).unwrap(),
            HalfInteger::from_integer(3)
        );
        // p between x and y on a path gives 0
        assert_eq!(
            s.gromov_product(PointId(0), PointId(3), PointId(1)).unwrap(),
            HalfInteger::ZERO
        );
    }

    #[test]
    fn gromov_product_nonnegative_and_half_integral() {
        let s = cycle_space(7);
        for x in s.points() {
            for y in s.points() {
                for p in s.points() {
                    let g = s.gromov_product(x, y, p).unwrap();
                    assert!(g.doubled() >= 0);
                }
            }
        }
    }

    #[test]
    fn four_point_delta_on_paths_is_zero() {
        for n in [1, 2, 5, 17] {
            let s = path_space(n);
            assert_eq!(s.four_point_delta().unwrap(), HalfInteger::ZERO, "path {n}");
        }
    }

    #[test]
    fn four_point_delta_c4_is_one() {
        // Frozen from the naive all-quadruples scan over the 4-cycle.
        let s = cycle_space(4);
        assert_eq!(s.four_point_delta().unwrap(), HalfInteger::from_integer(1));
        assert_eq!(four_point_naive(&s), 2);
    }

    #[test]
    fn four_point_fast_scan_matches_naive_oracle() {
        for s in [path_space(7), cycle_space(4), cycle_space(7), cycle_space(10)] {
            assert_eq!(s.four_point_delta().unwrap().doubled(), four_point_naive(&s));
        }
    }

    #[test]
    fn four_point_matches_pairing_oracle() {
        for s in [path_space(8), cycle_space(5), cycle_space(8), cycle_space(12)] {
            assert_eq!(s.four_point_delta().unwrap().doubled(), four_point_pairing(&s));
        }
    }

    #[test]
    fn four_point_delta_is_relabeling_invariant() {
        let s = cycle_space(9);
        let n = s.len();
        // rotate labels by 4
        let perm: Vec<usize> = (0..n).map(|i| (i + 4) % n).collect();
        let mut dist = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = s.raw(perm[i], perm[j]);
            }
        }
        let t = FiniteMetricSpace::from_table(n, dist).unwrap();
        assert_eq!(s.four_point_delta().unwrap(), t.four_point_delta().unwrap());
    }

    #[test]
    fn exhaustive_scan_refuses_oversized_spaces() {
        let s = path_space(10);
        let err = s
            .four_point_delta_with(QuadrupleScan::Exhaustive { max_points: 9 })
            .unwrap_err();
        assert!(matches!(err, Error::TooLarge { n: 10, max: 9 }));
    }

    #[test]
    fn sampled_scan_is_deterministic_and_bounded_by_exhaustive() {
        let s = cycle_space(12);
        let exact = s.four_point_delta().unwrap();
        let a = s
            .four_point_delta_with(QuadrupleScan::Sampled { quadruples: 5000, seed: 7 })
            .unwrap();
        let b = s
            .four_point_delta_with(QuadrupleScan::Sampled { quadruples: 5000, seed: 7 })
            .unwrap();
        assert_eq!(a, b);
        assert!(a <= exact);
    }

    #[test]
    fn single_point_space() {
        let s = FiniteMetricSpace::from_table(1, vec![0]).unwrap();
        assert_eq!(s.four_point_delta().unwrap(), HalfInteger::ZERO);
        assert_eq!(s.diameter(), 0);
    }

    #[test]
    fn from_table_rejects_bad_tables() {
        // asymmetric
        assert!(FiniteMetricSpace::from_table(2, vec![0, 1, 2, 0]).is_err());
        // nonzero diagonal
        assert!(FiniteMetricSpace::from_table(2, vec![1, 1, 1, 0]).is_err());
        // distinct points at distance zero
        assert!(FiniteMetricSpace::from_table(2, vec![0, 0, 0, 0]).is_err());
        // triangle violation
        assert!(FiniteMetricSpace::from_table(
            3,
            vec![0, 1, 9, 1, 0, 1, 9, 1, 0]
        )
        .is_err());
        // wrong size
        assert!(FiniteMetricSpace::from_table(2, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn point_range_errors() {
        let s = path_space(3);
        assert!(s.distance(PointId(0), PointId(3)).is_err());
        assert!(s.gromov_product(PointId(0), PointId(1), PointId(9)).is_err());
        assert!(s.visual_distance(PointId(7), PointId(0), PointId(0)).is_err());
    }

    #[test]
    fn visual_distance_base_cases() {
        let s = path_space(9);
        // xi = eta at distance R from p
        let v = s.visual_distance(PointId(8), PointId(8), PointId(0)).unwrap();
        assert!((v - (-8.0f64).exp()).abs() < 1e-15);
        // p equal to one of the points
        let v = s.visual_distance(PointId(3), PointId(7), PointId(3)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn visual_distance_comparison_is_exact_in_products() {
        // e^{-(xi|eta)_p'} <= e^{d(p,p')} e^{-(xi|eta)_p} iff
        // (xi|eta)_p - (xi|eta)_p' <= d(p,p'), checked exactly on cycles.
        let s = cycle_space(9);
        for xi in s.points() {
            for eta in s.points() {
                for p in s.points() {
                    for q in s.points() {
                        let gp = s.gromov_product(xi, eta, p).unwrap();
                        let gq = s.gromov_product(xi, eta, q).unwrap();
                        let d = s.raw(p.0, q.0) as i64;
                        assert!(
                            gp.doubled() - gq.doubled() <= 2 * d,
                            "product drop exceeds base move at {xi} {eta} {p} {q}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn half_integer_display() {
        assert_eq!(HalfInteger::from_integer(3).to_string(), "3");
        assert_eq!(HalfInteger::from_doubled(7).to_string(), "7/2");
        assert_eq!(HalfInteger::from_doubled(7).as_f64(), 3.5);
        assert!(!HalfInteger::from_doubled(7).is_integer());
    }
}
