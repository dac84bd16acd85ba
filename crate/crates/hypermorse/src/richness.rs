//! Empirical richness checker.
//!
//! A space is probed against a declared pool of geodesics: condition 1 asks
//! that every far-apart ordered pair (p, q) has a pool geodesic passing near
//! p whose distance from q roughly equals d(p, q); condition 2 asks that for
//! every pool geodesic and every point there is another pool geodesic near
//! the point at roughly the same distance from the first.
//!
//! The pool can only under-approximate the space's geodesics, so a rich
//! verdict is sound while a not-rich verdict is relative to the pool; the
//! report carries witnesses either way. Residuals are reported per record
//! and fitted constants are componentwise minima maxed over the sample, so
//! enlarging the pool never increases them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{GeodesicSegment, Graph};
use crate::metric::{FiniteMetricSpace, PointId};

/// Verdict thresholds. `r0` filters which pairs condition 1 must cover;
/// `r1..r4` cap the four residuals. Defaults are calibrated so that
/// moderate-size regular tree balls verify as rich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichnessThresholds {
    pub r0: u32,
    pub r1: u32,
    pub r2: u32,
    pub r3: u32,
    pub r4: u32,
}

impl Default for RichnessThresholds {
    fn default() -> Self {
        RichnessThresholds {
            r0: 3,
            r1: 1,
            r2: 2,
            r3: 1,
            r4: 2,
        }
    }
}

/// Sampling cutoff: above this many combinations a seeded uniform sample of
/// this size is scanned instead of the full enumeration.
pub const MAX_EXHAUSTIVE_COMBOS: usize = 10_000;

/// Canonical geodesics between all unordered pairs of the given endpoints.
pub fn build_geodesic_pool(graph: &Graph, endpoints: &[PointId]) -> Result<Vec<GeodesicSegment>> {
    let mut pool = Vec::new();
    for (i, &p) in endpoints.iter().enumerate() {
        for &q in &endpoints[i + 1..] {
            pool.push(graph.canonical_geodesic(p, q)?);
        }
    }
    Ok(pool)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1Record {
    pub p: PointId,
    pub q: PointId,
    /// min over the pool of d(p, geodesic), with a witness index
    pub near: u32,
    pub near_witness: usize,
    /// min over the pool of |d(q, geodesic) - d(p, q)|, with a witness
    pub drift: u32,
    pub drift_witness: usize,
    /// some single pool geodesic meets both thresholds at once
    pub feasible: bool,
    pub joint_witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition2Record {
    /// index of the reference geodesic
    pub geodesic: usize,
    pub p: PointId,
    /// min over the pool of d(p, candidate)
    pub near: u32,
    pub near_witness: usize,
    /// min over the pool of |d(p, reference) - d(candidate, reference)|
    pub drift: u32,
    pub drift_witness: usize,
    pub feasible: bool,
    pub joint_witness: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FittedConstants {
    pub r1: u32,
    pub r2: u32,
    pub r3: u32,
    pub r4: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Rich,
    NotRich {
        condition1_witnesses: Vec<Condition1Record>,
        condition2_witnesses: Vec<Condition2Record>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichnessReport {
    pub thresholds: RichnessThresholds,
    pub pool_size: usize,
    pub seed: u64,
    /// condition lists are seeded samples rather than full enumerations
    pub sampled_condition1: bool,
    pub sampled_condition2: bool,
    pub fitted: FittedConstants,
    pub condition1: Vec<Condition1Record>,
    pub condition2: Vec<Condition2Record>,
    pub verdict: Verdict,
}

const WITNESS_CAP: usize = 16;

/// Distance from every point to every pool geodesic.
fn point_pool_table(
    space: &FiniteMetricSpace,
    pool: &[GeodesicSegment],
) -> Result<Vec<Vec<u32>>> {
    let n = space.len();
    let mut table = vec![vec![u32::MAX; pool.len()]; n];
    for (gi, seg) in pool.iter().enumerate() {
        for row in table.iter_mut().enumerate() {
            let (p, row) = row;
            let mut best = u32::MAX;
            for &s in seg.points() {
                best = best.min(space.distance(PointId(p), s)?);
            }
            row[gi] = best;
        }
    }
    Ok(table)
}

/// Scans ordered pairs at distance >= r0: exhaustive when the qualifying
/// count fits the budget, otherwise a seeded uniform sample.
pub fn check_condition1(
    space: &FiniteMetricSpace,
    pool: &[GeodesicSegment],
    thresholds: RichnessThresholds,
    seed: u64,
) -> Result<(Vec<Condition1Record>, bool)> {
    if pool.is_empty() {
        return Err(Error::Domain("richness check needs a nonempty pool".into()));
    }
    let near_table = point_pool_table(space, pool)?;
    let n = space.len();
    let mut qualifying = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && space.distance(PointId(p), PointId(q))? >= thresholds.r0 {
                qualifying.push((p, q));
            }
        }
    }
    let (pairs, sampled) = if qualifying.len() <= MAX_EXHAUSTIVE_COMBOS {
        (qualifying, false)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = (0..MAX_EXHAUSTIVE_COMBOS)
            .map(|_| qualifying[rng.random_range(0..qualifying.len())])
            .collect();
        (picks, true)
    };
    let mut records = Vec::with_capacity(pairs.len());
    for (p, q) in pairs {
        let dpq = space.distance(PointId(p), PointId(q))?;
        let mut rec = Condition1Record {
            p: PointId(p),
            q: PointId(q),
            near: u32::MAX,
            near_witness: 0,
            drift: u32::MAX,
            drift_witness: 0,
            feasible: false,
            joint_witness: None,
        };
        for gi in 0..pool.len() {
            let near = near_table[p][gi];
            let drift = near_table[q][gi].abs_diff(dpq);
            if near < rec.near {
                rec.near = near;
                rec.near_witness = gi;
            }
            if drift < rec.drift {
                rec.drift = drift;
                rec.drift_witness = gi;
            }
            if !rec.feasible && near <= thresholds.r1 && drift <= thresholds.r2 {
                rec.feasible = true;
                rec.joint_witness = Some(gi);
            }
        }
        records.push(rec);
    }
    Ok((records, sampled))
}

/// Scans (reference geodesic, point) combinations, same sampling rule.
pub fn check_condition2(
    space: &FiniteMetricSpace,
    pool: &[GeodesicSegment],
    thresholds: RichnessThresholds,
    seed: u64,
) -> Result<(Vec<Condition2Record>, bool)> {
    if pool.is_empty() {
        return Err(Error::Domain("richness check needs a nonempty pool".into()));
    }
    let near_table = point_pool_table(space, pool)?;
    let pool_len = pool.len();
    // min pointwise distance between every two pool geodesics
    let mut seg_dist = vec![vec![u32::MAX; pool_len]; pool_len];
    for a in 0..pool_len {
        seg_dist[a][a] = 0;
        for b in (a + 1)..pool_len {
            let mut best = u32::MAX;
            for &x in pool[a].points() {
                for &y in pool[b].points() {
                    best = best.min(space.distance(x, y)?);
                }
            }
            seg_dist[a][b] = best;
            seg_dist[b][a] = best;
        }
    }
    let n = space.len();
    let total = pool_len * n;
    let (combos, sampled): (Vec<(usize, usize)>, bool) = if total <= MAX_EXHAUSTIVE_COMBOS {
        (
            (0..pool_len).flat_map(|g| (0..n).map(move |p| (g, p))).collect(),
            false,
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC2B2_AE3D_27D4_EB4F);
        (
            (0..MAX_EXHAUSTIVE_COMBOS)
                .map(|_| (rng.random_range(0..pool_len), rng.random_range(0..n)))
                .collect(),
            true,
        )
    };
    let mut records = Vec::with_capacity(combos.len());
    for (g, p) in combos {
        let ref_dist = near_table[p][g];
        let mut rec = Condition2Record {
            geodesic: g,
            p: PointId(p),
            near: u32::MAX,
            near_witness: 0,
            drift: u32::MAX,
            drift_witness: 0,
            feasible: false,
            joint_witness: None,
        };
        for cand in 0..pool_len {
            let near = near_table[p][cand];
            let drift = seg_dist[g][cand].abs_diff(ref_dist);
            if near < rec.near {
                rec.near = near;
                rec.near_witness = cand;
            }
            if drift < rec.drift {
                rec.drift = drift;
                rec.drift_witness = cand;
            }
            if !rec.feasible && near <= thresholds.r3 && drift <= thresholds.r4 {
                rec.feasible = true;
                rec.joint_witness = Some(cand);
            }
        }
        records.push(rec);
    }
    Ok((records, sampled))
}

/// Runs both conditions and assembles the verdict: rich iff every sampled
/// record has a single pool geodesic inside the thresholds.
pub fn richness_check(
    space: &FiniteMetricSpace,
    pool: &[GeodesicSegment],
    thresholds: RichnessThresholds,
    seed: u64,
) -> Result<RichnessReport> {
    let (condition1, sampled1) = check_condition1(space, pool, thresholds, seed)?;
    let (condition2, sampled2) = check_condition2(space, pool, thresholds, seed)?;
    let fitted = FittedConstants {
        r1: condition1.iter().map(|r| r.near).max().unwrap_or(0),
        r2: condition1.iter().map(|r| r.drift).max().unwrap_or(0),
        r3: condition2.iter().map(|r| r.near).max().unwrap_or(0),
        r4: condition2.iter().map(|r| r.drift).max().unwrap_or(0),
    };
    let bad1: Vec<_> = condition1
        .iter()
        .filter(|r| !r.feasible)
        .take(WITNESS_CAP)
        .cloned()
        .collect();
    let bad2: Vec<_> = condition2
        .iter()
        .filter(|r| !r.feasible)
        .take(WITNESS_CAP)
        .cloned()
        .collect();
    let verdict = if bad1.is_empty() && bad2.is_empty() {
        Verdict::Rich
    } else {
        Verdict::NotRich {
            condition1_witnesses: bad1,
            condition2_witnesses: bad2,
        }
    };
    Ok(RichnessReport {
        thresholds,
        pool_size: pool.len(),
        seed,
        sampled_condition1: sampled1,
        sampled_condition2: sampled2,
        fitted,
        condition1,
        condition2,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_control, build_tree_ball, ControlKind};

    #[test]
    fn line_fails_condition1_but_not_condition2() {
        let g = build_control(ControlKind::Path, 20).unwrap();
        let m = g.metric();
        let pool = build_geodesic_pool(&g, &g.proxy_boundary()).unwrap();
        assert_eq!(pool.len(), 1);
        let report = richness_check(&m, &pool, RichnessThresholds::default(), 5).unwrap();
        // every point sits on the unique line, so condition 2 is free
        assert_eq!(report.fitted.r3, 0);
        assert_eq!(report.fitted.r4, 0);
        // but the drift residual equals d(p, q) since d(q, line) = 0
        assert_eq!(report.fitted.r2, 19);
        match &report.verdict {
            Verdict::NotRich {
                condition1_witnesses,
                condition2_witnesses,
            } => {
                assert!(!condition1_witnesses.is_empty());
                assert!(condition2_witnesses.is_empty());
                let w = &condition1_witnesses[0];
                let d = m.distance(w.p, w.q).unwrap();
                assert_eq!(w.drift, d);
            }
            Verdict::Rich => panic!("a line must not verify as rich"),
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let g = build_control(ControlKind::Path, 20).unwrap();
        let m = g.metric();
        let pool = build_geodesic_pool(&g, &g.proxy_boundary()).unwrap();
        let a = richness_check(&m, &pool, RichnessThresholds::default(), 11).unwrap();
        let b = richness_check(&m, &pool, RichnessThresholds::default(), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_pool_is_an_error() {
        let g = build_control(ControlKind::Path, 5).unwrap();
        let m = g.metric();
        assert!(richness_check(&m, &[], RichnessThresholds::default(), 0).is_err());
    }

    #[test]
    fn pairs_below_r0_are_excluded() {
        let g = build_control(ControlKind::Path, 6).unwrap();
        let m = g.metric();
        let pool = build_geodesic_pool(&g, &g.proxy_boundary()).unwrap();
        let thresholds = RichnessThresholds {
            r0: 4,
            ..RichnessThresholds::default()
        };
        let (records, sampled) = check_condition1(&m, &pool, thresholds, 0).unwrap();
        assert!(!sampled);
        for rec in &records {
            assert!(m.distance(rec.p, rec.q).unwrap() >= 4);
            assert_ne!(rec.p, rec.q);
        }
    }

    #[test]
    fn tree_ball_is_rich_at_default_thresholds() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        let pool = build_geodesic_pool(&ball, &ball.proxy_boundary()).unwrap();
        let report = richness_check(&m, &pool, RichnessThresholds::default(), 3).unwrap();
        assert_eq!(report.verdict, Verdict::Rich, "fitted {:?}", report.fitted);
    }

    #[test]
    fn superset_pool_never_increases_fitted_constants() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        let boundary = ball.proxy_boundary();
        let pool_small = build_geodesic_pool(&ball, &boundary[..4]).unwrap();
        let pool_big = build_geodesic_pool(&ball, &boundary).unwrap();
        let thresholds = RichnessThresholds::default();
        let small = richness_check(&m, &pool_small, thresholds, 9).unwrap();
        let big = richness_check(&m, &pool_big, thresholds, 9).unwrap();
        assert!(big.fitted.r1 <= small.fitted.r1);
        assert!(big.fitted.r2 <= small.fitted.r2);
        assert!(big.fitted.r3 <= small.fitted.r3);
        assert!(big.fitted.r4 <= small.fitted.r4);
    }

    #[test]
    fn point_on_geodesic_gives_zero_condition2_residuals() {
        let g = build_control(ControlKind::Path, 10).unwrap();
        let m = g.metric();
        let pool = build_geodesic_pool(&g, &g.proxy_boundary()).unwrap();
        let (records, _) =
            check_condition2(&m, &pool, RichnessThresholds::default(), 0).unwrap();
        for rec in &records {
            assert_eq!(rec.near, 0);
            assert_eq!(rec.drift, 0);
            assert!(rec.feasible);
        }
    }

    #[test]
    fn report_json_round_trip() {
        let ball = build_tree_ball(3, 2).unwrap();
        let m = ball.metric();
        let pool = build_geodesic_pool(&ball, &ball.proxy_boundary()).unwrap();
        let report = richness_check(&m, &pool, RichnessThresholds::default(), 1).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: RichnessReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
