//! Self-quasi-isometries of finite spaces.
//!
//! A map is a sorted list of (point, image) pairs with carried constants.
//! The module verifies the sandwich over all domain pairs, fits minimal
//! additive constants, measures center displacement, and builds the
//! center-shifting map on tree balls that realizes displacement lambda c / 2
//! while fixing the outer boundary pointwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::metric::{FiniteMetricSpace, PointId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiIsometryMap {
    /// (domain point, image point), sorted by domain point, no duplicates.
    pub pairs: Vec<(PointId, PointId)>,
    #[serde(with = "crate::rational::rational_string")]
    pub lambda: Rational,
    #[serde(with = "crate::rational::rational_string")]
    pub c: Rational,
}

impl QuasiIsometryMap {
    pub fn new(
        mut pairs: Vec<(PointId, PointId)>,
        lambda: Rational,
        c: Rational,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Domain("map has an empty domain".into()));
        }
        if lambda < Rational::from_integer(1) {
            return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
        }
        if c < Rational::from_integer(0) {
            return Err(Error::Domain(format!("c must be >= 0, got {c}")));
        }
        pairs.sort_by_key(|(p, _)| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("duplicate domain point in map".into()));
        }
        Ok(QuasiIsometryMap { pairs, lambda, c })
    }

    /// The identity on every point of the space.
    pub fn identity(space: &FiniteMetricSpace, lambda: Rational, c: Rational) -> Result<Self> {
        Self::new(space.points().map(|p| (p, p)).collect(), lambda, c)
    }

    pub fn domain(&self) -> impl Iterator<Item = PointId> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn image_of(&self, p: PointId) -> Result<PointId> {
        self.pairs
            .binary_search_by_key(&p.0, |&(q, _)| q.0)
            .map(|i| self.pairs[i].1)
            .map_err(|_| Error::Domain(format!("point {} is not in the map's domain", p.0)))
    }
}

/// Exhaustive sandwich check over all domain pairs; `None` means the map
/// verifies at its carried constants, otherwise the first violating domain
/// pair in id order is returned.
pub fn verify_quasi_isometry(
    space: &FiniteMetricSpace,
    map: &QuasiIsometryMap,
) -> Result<Option<(PointId, PointId)>> {
    for &(p, fp) in &map.pairs {
        space.check_point(p)?;
        space.check_point(fp)?;
    }
    let m = map.pairs.len();
    for i in 0..m {
        for j in (i + 1)..m {
            let (x, fx) = map.pairs[i];
            let (y, fy) = map.pairs[j];
            let dxy = Rational::from_integer(space.distance(x, y)? as i64);
            let dim = Rational::from_integer(space.distance(fx, fy)? as i64);
            // dxy/lambda - c <= dim <= lambda dxy + c
            if dxy > map.lambda * (dim + map.c) || dim > map.lambda * dxy + map.c {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// Least additive constant making the pair list a (lambda, c)-quasi-isometry.
pub fn fit_map_constants(
    space: &FiniteMetricSpace,
    pairs: &[(PointId, PointId)],
    lambda: Rational,
) -> Result<Rational> {
    if lambda < Rational::from_integer(1) {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    let mut best = Rational::from_integer(0);
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let (x, fx) = pairs[i];
            let (y, fy) = pairs[j];
            let dxy = Rational::from_integer(space.distance(x, y)? as i64);
            let dim = Rational::from_integer(space.distance(fx, fy)? as i64);
            let lower = dxy / lambda - dim;
            let upper = dim - lambda * dxy;
            if lower > best {
                best = lower;
            }
            if upper > best {
                best = upper;
            }
        }
    }
    Ok(best)
}

/// How far the map moves the point `o`.
pub fn displacement(
    space: &FiniteMetricSpace,
    map: &QuasiIsometryMap,
    o: PointId,
) -> Result<u32> {
    space.distance(o, map.image_of(o)?)
}

/// True iff every listed boundary point moves at most `tolerance`.
pub fn fixes_proxy_boundary(
    space: &FiniteMetricSpace,
    map: &QuasiIsometryMap,
    boundary: &[PointId],
    tolerance: u32,
) -> Result<bool> {
    for &b in boundary {
        if space.distance(b, map.image_of(b)?)? > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Center-shifting self-map of a tree ball.
///
/// Inside the inner ball of radius min(lambda c, R) around the center: the
/// initial segment of length lambda c / 2 of the canonical descent collapses
/// onto its far end f(O), and each boundary-to-segment path stretches
/// linearly onto the corresponding path ending at f(O), rounding toward the
/// fixed boundary end. Outside, the map is the identity. The inner radius is
/// clamped to R when lambda c exceeds the ball radius, which keeps the
/// construction usable on small balls; the segment must still fit, so R must
/// be at least lambda c / 2.
pub fn ball_center_shift(
    ball: &Graph,
    center: PointId,
    lambda: i64,
    c: i64,
) -> Result<QuasiIsometryMap> {
    if !ball.is_tree() {
        return Err(Error::InvalidGraph("center shift needs a tree".into()));
    }
    if lambda < 1 || c < 0 {
        return Err(Error::Domain(format!(
            "need lambda >= 1 and c >= 0, got ({lambda}, {c})"
        )));
    }
    if (lambda * c) % 2 != 0 {
        return Err(Error::Construction(format!(
            "lambda c = {} must be even so the shifted center is a vertex",
            lambda * c
        )));
    }
    let n = ball.node_count();
    if center.0 >= n {
        return Err(Error::PointOutOfRange {
            index: center.0,
            count: n,
        });
    }
    let depth = ball.bfs_dist(center.0);
    let radius = *depth.iter().max().unwrap() as i64;
    let half = lambda * c / 2;
    if half > radius {
        return Err(Error::Construction(format!(
            "shift distance {half} exceeds the ball radius {radius}"
        )));
    }
    let inner = radius.min(lambda * c);

    // parent pointers toward the center
    let mut parent = vec![usize::MAX; n];
    let mut order = std::collections::VecDeque::new();
    let mut seen = vec![false; n];
    seen[center.0] = true;
    order.push_back(center.0);
    while let Some(at) = order.pop_front() {
        for &nb in ball.neighbors(at) {
            if !seen[nb] {
                seen[nb] = true;
                parent[nb] = at;
                order.push_back(nb);
            }
        }
    }

    // canonical descent segment s_0 = center, .., s_half = f(O)
    let mut segment = vec![center.0];
    for step in 0..half {
        let cur = *segment.last().unwrap();
        let next = ball
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&nb| depth[nb] as i64 == step + 1)
            .ok_or_else(|| Error::Construction("descent stalled below the center".into()))?;
        segment.push(next);
    }
    let mut seg_index = vec![usize::MAX; n];
    for (i, &v) in segment.iter().enumerate() {
        seg_index[v] = i;
    }
    let shifted = segment[half as usize];

    let mut pairs = Vec::with_capacity(n);
    for x in 0..n {
        let dx = depth[x] as i64;
        if dx > inner {
            pairs.push((PointId(x), PointId(x)));
            continue;
        }
        if seg_index[x] != usize::MAX {
            pairs.push((PointId(x), PointId(shifted)));
            continue;
        }
        // climb to the segment
        let mut meet = x;
        while seg_index[meet] == usize::MAX {
            meet = parent[meet];
        }
        let dm = depth[meet] as i64;
        let t = dx - dm;
        let gap = half - seg_index[meet] as i64;
        let l1 = inner - dm;
        let l2 = l1 + gap;
        // position along [boundary, f(O)] scaled by l2/l1, floored toward
        // the boundary end; steps moved toward f(O) from x itself
        let steps = ((l1 - t) * l2) / l1 - (l1 - t);
        let image = if steps <= t {
            let mut at = x;
            for _ in 0..steps {
                at = parent[at];
            }
            at
        } else {
            segment[(seg_index[meet] as i64 + steps - t) as usize]
        };
        pairs.push((PointId(x), PointId(image)));
    }
    QuasiIsometryMap::new(
        pairs,
        Rational::from_integer(lambda),
        Rational::from_integer(c),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{prop1_bound, MorseConstants};
    use crate::graphs::{build_control, build_tree_ball, ControlKind};
    use crate::rational::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn identity_verifies_and_fixes_everything() {
        let g = build_tree_ball(3, 3).unwrap();
        let m = g.metric();
        let id = QuasiIsometryMap::identity(&m, rat("1"), rat("0")).unwrap();
        assert_eq!(verify_quasi_isometry(&m, &id).unwrap(), None);
        assert_eq!(displacement(&m, &id, PointId(0)).unwrap(), 0);
        let boundary = g.proxy_boundary();
        assert!(fixes_proxy_boundary(&m, &id, &boundary, 0).unwrap());
    }

    #[test]
    fn constant_map_fit_is_the_diameter() {
        let g = build_control(ControlKind::Path, 3).unwrap();
        let m = g.metric();
        let pairs: Vec<_> = m.points().map(|p| (p, PointId(0))).collect();
        assert_eq!(fit_map_constants(&m, &pairs, rat("1")).unwrap(), rat("2"));
        let map = QuasiIsometryMap::new(pairs.clone(), rat("1"), rat("2")).unwrap();
        assert_eq!(verify_quasi_isometry(&m, &map).unwrap(), None);
        let tight = QuasiIsometryMap::new(pairs, rat("1"), rat("1")).unwrap();
        assert_eq!(
            verify_quasi_isometry(&m, &tight).unwrap(),
            Some((PointId(0), PointId(2)))
        );
        let boundary = g.proxy_boundary();
        assert!(!fixes_proxy_boundary(&m, &tight, &boundary, 0).unwrap());
    }

    #[test]
    fn map_construction_guards() {
        assert!(QuasiIsometryMap::new(vec![], rat("1"), rat("0")).is_err());
        assert!(QuasiIsometryMap::new(
            vec![(PointId(0), PointId(0)), (PointId(0), PointId(1))],
            rat("1"),
            rat("0")
        )
        .is_err());
        let map = QuasiIsometryMap::new(vec![(PointId(1), PointId(1))], rat("1"), rat("0"))
            .unwrap();
        assert!(map.image_of(PointId(0)).is_err());
        let g = build_control(ControlKind::Path, 4).unwrap();
        assert!(displacement(&g.metric(), &map, PointId(0)).is_err());
    }

    #[test]
    fn center_shift_moves_half_lambda_c() {
        let ball = build_tree_ball(3, 4).unwrap();
        let m = ball.metric();
        let map = ball_center_shift(&ball, PointId(0), 2, 2).unwrap();
        assert_eq!(displacement(&m, &map, PointId(0)).unwrap(), 2);
        assert_eq!(verify_quasi_isometry(&m, &map).unwrap(), None);
        let boundary = ball.proxy_boundary();
        assert!(fixes_proxy_boundary(&m, &map, &boundary, 0).unwrap());
    }

    #[test]
    fn center_shift_with_clamped_inner_ball() {
        // lambda c = 8 exceeds the radius 5; the inner ball becomes the
        // whole ball and the construction still verifies
        let ball = build_tree_ball(3, 5).unwrap();
        let m = ball.metric();
        let map = ball_center_shift(&ball, PointId(0), 4, 2).unwrap();
        assert_eq!(displacement(&m, &map, PointId(0)).unwrap(), 4);
        assert_eq!(verify_quasi_isometry(&m, &map).unwrap(), None);
        let boundary = ball.proxy_boundary();
        assert!(fixes_proxy_boundary(&m, &map, &boundary, 0).unwrap());
    }

    #[test]
    fn center_shift_guards() {
        let ball = build_tree_ball(3, 4).unwrap();
        // odd lambda c
        assert!(ball_center_shift(&ball, PointId(0), 3, 1).is_err());
        // shift distance 8 exceeds radius 4
        assert!(ball_center_shift(&ball, PointId(0), 4, 4).is_err());
        let cyc = build_control(ControlKind::Cycle, 8).unwrap();
        assert!(ball_center_shift(&cyc, PointId(0), 2, 2).is_err());
        assert!(ball_center_shift(&ball, PointId(10_000), 2, 2).is_err());
    }

    #[test]
    fn center_shift_respects_displacement_bound() {
        let consts = MorseConstants::default();
        for (d, r, lambda, c) in [(3usize, 4u32, 2i64, 2i64), (3, 5, 4, 2), (4, 4, 2, 2)] {
            let ball = build_tree_ball(d, r as usize).unwrap();
            let m = ball.metric();
            let map = ball_center_shift(&ball, PointId(0), lambda, c).unwrap();
            let moved = displacement(&m, &map, PointId(0)).unwrap();
            let bound = prop1_bound(
                Rational::from_integer(lambda),
                Rational::from_integer(c),
                r,
                &consts,
            );
            assert!((moved as f64) <= bound);
            assert_eq!(moved as i64, lambda * c / 2);
        }
    }

    #[test]
    fn map_json_round_trip() {
        let ball = build_tree_ball(3, 3).unwrap();
        let map = ball_center_shift(&ball, PointId(0), 2, 2).unwrap();
        let text = serde_json::to_string(&map).unwrap();
        let back: QuasiIsometryMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn degenerate_shift_is_identity_map() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        let map = ball_center_shift(&ball, PointId(0), 2, 0).unwrap();
        assert_eq!(displacement(&m, &map, PointId(0)).unwrap(), 0);
        for &(p, fp) in &map.pairs {
            assert_eq!(p, fp);
        }
    }
}
