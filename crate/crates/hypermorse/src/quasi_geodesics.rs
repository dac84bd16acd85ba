//! Quasi-geodesic curves on finite graph metrics.
//!
//! A curve is stored as integer parameters plus sampled image points; the
//! multiplicative/additive sandwich is checked exactly over all sample pairs
//! with rational arithmetic. The module measures mesh-length, rebuilds taut
//! replacements through mesh-length witnesses, constructs the tight extremal
//! family and staircase detours, and generates seeded random curves.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Graph, GeodesicSegment};
use crate::metric::{FiniteMetricSpace, GeodesicProvider, PointId};
use crate::rational::{rational_to_f64, Rational};

/// A finitely sampled (lambda, c)-quasi-geodesic.
///
/// `params` are strictly increasing integers, `points` the image samples.
/// The constants are carried with the curve; shape is validated at
/// construction, the metric sandwich is checked by [`verify_quasi_geodesic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiGeodesic {
    pub params: Vec<i64>,
    pub points: Vec<PointId>,
    #[serde(with = "crate::rational::rational_string")]
    pub lambda: Rational,
    #[serde(with = "crate::rational::rational_string")]
    pub c: Rational,
}

impl QuasiGeodesic {
    pub fn new(
        params: Vec<i64>,
        points: Vec<PointId>,
        lambda: Rational,
        c: Rational,
    ) -> Result<Self> {
        let qg = QuasiGeodesic {
            params,
            points,
            lambda,
            c,
        };
        qg.validate()?;
        Ok(qg)
    }

    /// Wraps a walk sampled at unit parameter steps 0..len.
    pub fn from_walk(points: Vec<PointId>, lambda: Rational, c: Rational) -> Result<Self> {
        let params = (0..points.len() as i64).collect();
        Self::new(params, points, lambda, c)
    }

    /// Shape checks only; deserialized values must be passed through this.
    pub fn validate(&self) -> Result<()> {
        if self.params.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                params: self.params.len(),
                points: self.points.len(),
            });
        }
        if self.params.is_empty() {
            return Err(Error::InvalidCurve("curve has no samples".into()));
        }
        if self.params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve(
                "parameters must be strictly increasing".into(),
            ));
        }
        if self.lambda < Rational::from_integer(1) {
            return Err(Error::Domain(format!(
                "lambda must be >= 1, got {}",
                self.lambda
            )));
        }
        if self.c < Rational::from_integer(0) {
            return Err(Error::Domain(format!("c must be >= 0, got {}", self.c)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Parameter interval length.
    pub fn interval_length(&self) -> i64 {
        self.params[self.params.len() - 1] - self.params[0]
    }

    pub fn first_point(&self) -> PointId {
        self.points[0]
    }

    pub fn last_point(&self) -> PointId {
        self.points[self.points.len() - 1]
    }
}

fn check_points(space: &FiniteMetricSpace, points: &[PointId]) -> Result<()> {
    for &p in points {
        space.check_point(p)?;
    }
    Ok(())
}

/// Checks the sandwich (gap/lambda - c) <= dist <= (lambda gap + c) over all
/// sample pairs, exactly in rational arithmetic. `None` means the curve
/// verifies; otherwise the lexicographically first violating index pair is
/// returned.
pub fn verify_quasi_geodesic(
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
) -> Result<Option<(usize, usize)>> {
    qg.validate()?;
    check_points(space, &qg.points)?;
    let m = qg.len();
    for i in 0..m {
        for j in (i + 1)..m {
            let gap = Rational::from_integer(qg.params[j] - qg.params[i]);
            let d = Rational::from_integer(space.distance(qg.points[i], qg.points[j])? as i64);
            // gap/lambda - c <= d  <=>  gap <= lambda (d + c)
            if gap > qg.lambda * (d + qg.c) || d > qg.lambda * gap + qg.c {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Least c making the curve a (lambda, c)-quasi-geodesic: the maximum over
/// sample pairs of the two sandwich residuals, clamped at zero.
pub fn fit_qi_constants(
    space: &FiniteMetricSpace,
    params: &[i64],
    points: &[PointId],
    lambda: Rational,
) -> Result<Rational> {
    if params.len() != points.len() {
        return Err(Error::LengthMismatch {
            params: params.len(),
            points: points.len(),
        });
    }
    if lambda < Rational::from_integer(1) {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    check_points(space, points)?;
    let mut best = Rational::from_integer(0);
    for i in 0..params.len() {
        for j in (i + 1)..params.len() {
            let gap = Rational::from_integer(params[j] - params[i]);
            let d = Rational::from_integer(space.distance(points[i], points[j])? as i64);
            let lower = gap / lambda - d;
            let upper = d - lambda * gap;
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

/// Mesh-length of a curve: the largest total image distance over index
/// subsequences that start at the first sample, end at the last, and take
/// steps of image distance at least `delta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaLengthResult {
    pub value: u64,
    /// Sample indices achieving the value; empty iff degenerate.
    pub witness: Vec<usize>,
    /// Set when no subsequence satisfies the mesh constraint.
    pub degenerate: bool,
}

/// O(m^2) dynamic program over sample indices. `delta` must be >= 1.
pub fn delta_length(
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
    delta: u32,
) -> Result<DeltaLengthResult> {
    qg.validate()?;
    check_points(space, &qg.points)?;
    if delta < 1 {
        return Err(Error::InvalidMesh(delta as i64));
    }
    let m = qg.len();
    if m < 2 {
        return Err(Error::InvalidCurve(
            "mesh-length needs at least 2 samples".into(),
        ));
    }
    // best[j] = max sum over valid subsequences 0 = i_0 < .. < i_k = j,
    // ties broken toward the smallest predecessor.
    let mut best: Vec<Option<u64>> = vec![None; m];
    let mut prev: Vec<usize> = vec![usize::MAX; m];
    best[0] = Some(0);
    for j in 1..m {
        for i in 0..j {
            let Some(b) = best[i] else { continue };
            let d = space.distance(qg.points[i], qg.points[j])? as u64;
            if d < delta as u64 {
                continue;
            }
            let cand = b + d;
            if best[j].map_or(true, |cur| cand > cur) {
                best[j] = Some(cand);
                prev[j] = i;
            }
        }
    }
    match best[m - 1] {
        None => Ok(DeltaLengthResult {
            value: 0,
            witness: Vec::new(),
            degenerate: true,
        }),
        Some(value) => {
            let mut witness = vec![m - 1];
            let mut at = m - 1;
            while at != 0 {
                at = prev[at];
                witness.push(at);
            }
            witness.reverse();
            Ok(DeltaLengthResult {
                value,
                witness,
                degenerate: false,
            })
        }
    }
}

/// Reference evaluator for [`delta_length`]: scores every subsequence of the
/// samples directly. Exponential in the sample count, so curves above 20
/// samples are refused. Deliberately shares no code with the DP.
pub fn enumerate_delta_length(
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
    delta: u32,
) -> Result<u64> {
    qg.validate()?;
    check_points(space, &qg.points)?;
    if delta < 1 {
        return Err(Error::InvalidMesh(delta as i64));
    }
    let m = qg.len();
    if m < 2 {
        return Err(Error::InvalidCurve(
            "mesh length needs at least two samples".into(),
        ));
    }
    if m > 20 {
        return Err(Error::Domain(format!(
            "enumeration reference handles at most 20 samples, got {m}"
        )));
    }
    let interior = m - 2;
    let mut best = 0u64;
    for mask in 0..(1u32 << interior) {
        let mut idx = vec![0usize];
        for b in 0..interior {
            if mask & (1 << b) != 0 {
                idx.push(b + 1);
            }
        }
        idx.push(m - 1);
        let mut ok = true;
        let mut sum = 0u64;
        for w in idx.windows(2) {
            let d = space.distance(qg.points[w[0]], qg.points[w[1]])? as u64;
            if d < delta as u64 {
                ok = false;
                break;
            }
            sum += d;
        }
        if ok && sum > best {
            best = sum;
        }
    }
    Ok(best)
}

/// Inserts every sample that keeps all witness gaps >= delta. Each insertion
/// preserves the witness sum: the triangle inequality says it cannot drop,
/// optimality of the starting witness says it cannot grow.
fn refine_witness(
    space: &FiniteMetricSpace,
    points: &[PointId],
    witness: &[usize],
    delta: u32,
) -> Result<Vec<usize>> {
    let mut w = witness.to_vec();
    let mut k = 0;
    while k + 1 < w.len() {
        let (a, b) = (w[k], w[k + 1]);
        let mut inserted = false;
        for q in (a + 1)..b {
            if space.distance(points[a], points[q])? >= delta
                && space.distance(points[q], points[b])? >= delta
            {
                w.insert(k + 1, q);
                inserted = true;
                break;
            }
        }
        if !inserted {
            k += 1;
        }
    }
    Ok(w)
}

/// Replaces a curve with the concatenation of canonical geodesics through a
/// maximal mesh-length witness, parameterized at unit steps by arc length.
///
/// The output carries constants (lambda, 12 delta + 3c) and its classical
/// length equals the mesh-length value. Defined for curves whose consecutive
/// samples move by at most one edge; coarser curves do not contain the
/// intermediate samples the witness refinement needs.
pub fn taut_replacement(
    space: &FiniteMetricSpace,
    provider: &impl GeodesicProvider,
    qg: &QuasiGeodesic,
    delta: u32,
) -> Result<QuasiGeodesic> {
    qg.validate()?;
    if Rational::from_integer(delta as i64) < qg.c {
        return Err(Error::Domain(format!(
            "mesh {delta} is below the curve's additive constant {}",
            qg.c
        )));
    }
    for w in qg.points.windows(2) {
        if space.distance(w[0], w[1])? > 1 {
            return Err(Error::InvalidCurve(
                "taut replacement needs unit-step sampling".into(),
            ));
        }
    }
    let dl = delta_length(space, qg, delta)?;
    if dl.degenerate {
        return Err(Error::Domain(
            "degenerate mesh-length: no subsequence to replace through".into(),
        ));
    }
    let witness = refine_witness(space, &qg.points, &dl.witness, delta)?;
    let mut out: Vec<PointId> = vec![qg.points[witness[0]]];
    for pair in witness.windows(2) {
        let (a, b) = (qg.points[pair[0]], qg.points[pair[1]]);
        let seg = provider.geodesic_points(a, b)?;
        // refined witness gaps stay in [delta, 3 delta]
        let seg_len = (seg.len() - 1) as u64;
        if seg_len > 3 * delta as u64 {
            return Err(Error::Construction(format!(
                "witness gap {seg_len} exceeds three mesh units"
            )));
        }
        out.extend_from_slice(&seg[1..]);
    }
    let total = (out.len() - 1) as u64;
    debug_assert_eq!(total, dl.value);
    let certified = Rational::from_integer(12 * delta as i64) + Rational::from_integer(3) * qg.c;
    QuasiGeodesic::from_walk(out, qg.lambda, certified)
}

/// The tight quadratic example: a curve on a tree segment [a, b] of length
/// lambda^2 c / 2 that starts and ends at `a`, reaches `b` at the midpoint
/// parameter, and moves at speed lambda. Both constants must be even
/// integers >= 2 so the turning point lands on a sample.
pub fn extremal_example(lambda: i64, c: i64, tree: &Graph) -> Result<QuasiGeodesic> {
    for (name, v) in [("lambda", lambda), ("c", c)] {
        if v < 2 || v % 2 != 0 {
            return Err(Error::Domain(format!(
                "{name} must be an even integer >= 2, got {v}"
            )));
        }
    }
    if !tree.is_tree() {
        return Err(Error::InvalidGraph(
            "extremal example needs a tree".into(),
        ));
    }
    let depth = lambda * lambda * c / 2;
    // double sweep: the farthest point from any vertex is a diameter end
    let d0 = tree.bfs_dist(0);
    let u = (0..tree.node_count())
        .max_by_key(|&i| (d0[i], std::cmp::Reverse(i)))
        .unwrap();
    let du = tree.bfs_dist(u);
    let v = (0..tree.node_count())
        .max_by_key(|&i| (du[i], std::cmp::Reverse(i)))
        .unwrap();
    if (du[v] as i64) < depth {
        return Err(Error::Construction(format!(
            "tree diameter {} is below the required segment length {depth}",
            du[v]
        )));
    }
    let seg = tree.canonical_geodesic(PointId(u), PointId(v))?;
    let span = lambda * c;
    let points = (0..=span)
        .map(|x| {
            let dist = lambda * x.min(span - x);
            seg.points()[dist as usize]
        })
        .collect();
    QuasiGeodesic::new(
        (0..=span).collect(),
        points,
        Rational::from_integer(lambda),
        Rational::from_integer(c),
    )
}

fn endpoints_match(qg: &QuasiGeodesic, sigma: &GeodesicSegment) -> bool {
    let (a, b) = (qg.first_point(), qg.last_point());
    let (s, t) = (sigma.first(), sigma.last());
    (a, b) == (s, t) || (a, b) == (t, s)
}

fn max_min_distance(
    space: &FiniteMetricSpace,
    from: &[PointId],
    to: &[PointId],
) -> Result<u32> {
    let mut worst = 0;
    for &p in from {
        let mut near = u32::MAX;
        for &q in to {
            near = near.min(space.distance(p, q)?);
        }
        worst = worst.max(near);
    }
    Ok(worst)
}

/// How far the curve strays from a geodesic joining its endpoints: the
/// maximum over samples of the distance to sigma's point set.
pub fn morse_distance(
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
    sigma: &GeodesicSegment,
) -> Result<u32> {
    qg.validate()?;
    check_points(space, &qg.points)?;
    check_points(space, sigma.points())?;
    if !endpoints_match(qg, sigma) {
        return Err(Error::EndpointMismatch {
            sigma_first: sigma.first().0,
            sigma_last: sigma.last().0,
            curve_first: qg.first_point().0,
            curve_last: qg.last_point().0,
        });
    }
    max_min_distance(space, &qg.points, sigma.points())
}

/// The reverse direction: how far sigma strays from the curve.
pub fn anti_morse_distance(
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
    sigma: &GeodesicSegment,
) -> Result<u32> {
    qg.validate()?;
    check_points(space, &qg.points)?;
    check_points(space, sigma.points())?;
    if !endpoints_match(qg, sigma) {
        return Err(Error::EndpointMismatch {
            sigma_first: sigma.first().0,
            sigma_last: sigma.last().0,
            curve_first: qg.first_point().0,
            curve_last: qg.last_point().0,
        });
    }
    max_min_distance(space, sigma.points(), &qg.points)
}

/// Detour walk for the logarithmic-direction sweep: follow a geodesic, leave
/// it `height` steps before its midpoint, travel around the midpoint through
/// vertices at distance >= height from it, and rejoin symmetrically.
pub fn staircase_walk(
    graph: &Graph,
    space: &FiniteMetricSpace,
    sigma: &GeodesicSegment,
    height: u32,
) -> Result<Vec<PointId>> {
    if height == 0 {
        return Err(Error::Domain("staircase height must be >= 1".into()));
    }
    let len = sigma.length() as usize;
    let mid = len / 2;
    let h = height as usize;
    if h > mid || mid + h > len {
        return Err(Error::Domain(format!(
            "height {height} does not fit a geodesic of length {len}"
        )));
    }
    let center = sigma.points()[mid];
    let enter = sigma.points()[mid - h];
    let exit = sigma.points()[mid + h];
    let allowed: Vec<bool> = (0..graph.node_count())
        .map(|i| space.distance(PointId(i), center).map(|d| d >= height))
        .collect::<Result<_>>()?;
    let around = restricted_path(graph, &allowed, enter, exit)?;
    let mut walk: Vec<PointId> = sigma.points()[..mid - h].to_vec();
    walk.extend_from_slice(&around);
    walk.extend_from_slice(&sigma.points()[mid + h + 1..]);
    Ok(walk)
}

/// Lowest-index BFS shortest path inside the induced subgraph on `allowed`.
fn restricted_path(
    graph: &Graph,
    allowed: &[bool],
    from: PointId,
    to: PointId,
) -> Result<Vec<PointId>> {
    if !allowed[from.0] || !allowed[to.0] {
        return Err(Error::Construction(
            "staircase endpoints fall inside the excluded ball".into(),
        ));
    }
    let n = graph.node_count();
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[from.0] = true;
    queue.push_back(from.0);
    while let Some(at) = queue.pop_front() {
        if at == to.0 {
            break;
        }
        for &nb in graph.neighbors(at) {
            if allowed[nb] && !seen[nb] {
                seen[nb] = true;
                parent[nb] = at;
                queue.push_back(nb);
            }
        }
    }
    if !seen[to.0] {
        return Err(Error::Construction(
            "no detour exists at the requested height".into(),
        ));
    }
    let mut path = vec![to];
    let mut at = to.0;
    while at != from.0 {
        at = parent[at];
        path.push(PointId(at));
    }
    path.reverse();
    Ok(path)
}

const GENERATION_ATTEMPTS: usize = 8;

/// Seeded random (lambda, c)-quasi-geodesic between two vertices: a canonical
/// geodesic with dwell and detour edits, rejection-sampled against the
/// verifier with shrinking intensity. With lambda = 1 and c = 0 the only
/// valid output is the canonical geodesic itself.
pub fn random_quasi_geodesic(
    graph: &Graph,
    space: &FiniteMetricSpace,
    from: PointId,
    to: PointId,
    lambda: Rational,
    c: Rational,
    seed: u64,
) -> Result<QuasiGeodesic> {
    if lambda < Rational::from_integer(1) {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    if c < Rational::from_integer(0) {
        return Err(Error::Domain(format!("c must be >= 0, got {c}")));
    }
    let base = graph.canonical_geodesic(from, to)?.points().to_vec();
    if base.len() == 1 {
        return QuasiGeodesic::from_walk(base, lambda, c);
    }
    let lf = rational_to_f64(lambda);
    let cf = rational_to_f64(c);
    let len = (base.len() - 1) as f64;
    // parameter slack the sandwich leaves over a geodesic of this length
    let slack = ((lf - 1.0) * len + lf * cf).floor().max(0.0) as usize;
    for attempt in 0..GENERATION_ATTEMPTS {
        let budget = (slack / 2) >> attempt;
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ (attempt as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let walk = perturb_walk(graph, &base, budget, lf * cf, &mut rng);
        let qg = QuasiGeodesic::from_walk(walk, lambda, c)?;
        if verify_quasi_geodesic(space, &qg)?.is_none() {
            return Ok(qg);
        }
    }
    Err(Error::Generation {
        attempts: GENERATION_ATTEMPTS,
        reason: "no perturbation satisfied the constants".into(),
    })
}

/// Applies up to `budget` edits: dwells (stay one step) when lambda c >= 1,
/// return detours (step off and back) when lambda c >= 2, and sidesteps
/// through a common neighbor otherwise.
fn perturb_walk(
    graph: &Graph,
    base: &[PointId],
    budget: usize,
    lambda_c: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<PointId> {
    let mut walk = base.to_vec();
    let mut spent = 0;
    let mut guard = 0;
    while spent < budget && guard < 4 * budget + 8 {
        guard += 1;
        let pos = rng.random_range(0..walk.len() - 1);
        match rng.random_range(0..3u32) {
            0 if lambda_c >= 1.0 => {
                walk.insert(pos + 1, walk[pos]);
                spent += 1;
            }
            1 if lambda_c >= 2.0 && spent + 2 <= budget => {
                let nbs = graph.neighbors(walk[pos].0);
                let w = PointId(nbs[rng.random_range(0..nbs.len())]);
                walk.insert(pos + 1, walk[pos]);
                walk.insert(pos + 1, w);
                spent += 2;
            }
            2 => {
                let (a, b) = (walk[pos], walk[pos + 1]);
                if a == b {
                    continue;
                }
                let common: Vec<usize> = graph
                    .neighbors(a.0)
                    .iter()
                    .copied()
                    .filter(|&w| w != b.0 && graph.neighbors(b.0).contains(&w))
                    .collect();
                if common.is_empty() {
                    continue;
                }
                let w = PointId(common[rng.random_range(0..common.len())]);
                walk.insert(pos + 1, w);
                spent += 1;
            }
            _ => {}
        }
    }
    walk
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_control, build_tree_ball, ControlKind};
    use crate::metric::QuadrupleScan;
    use crate::rational::parse_rational;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn path(n: usize) -> Graph {
        build_control(ControlKind::Path, n).unwrap()
    }

    fn unit_geodesic(g: &Graph, a: usize, b: usize) -> QuasiGeodesic {
        let pts = g
            .canonical_geodesic(PointId(a), PointId(b))
            .unwrap()
            .points()
            .to_vec();
        QuasiGeodesic::from_walk(pts, rat("1"), rat("0")).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(QuasiGeodesic::new(vec![0, 1], vec![PointId(0)], rat("1"), rat("0")).is_err());
        assert!(QuasiGeodesic::new(
            vec![0, 0],
            vec![PointId(0), PointId(1)],
            rat("1"),
            rat("0")
        )
        .is_err());
        assert!(QuasiGeodesic::new(
            vec![0, 1],
            vec![PointId(0), PointId(1)],
            rat("1/2"),
            rat("0")
        )
        .is_err());
        assert!(QuasiGeodesic::new(
            vec![0, 1],
            vec![PointId(0), PointId(1)],
            rat("1"),
            rat("-1")
        )
        .is_err());
        assert!(QuasiGeodesic::new(vec![], vec![], rat("1"), rat("0")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = path(6);
        let qg = unit_geodesic(&g, 0, 5);
        let text = serde_json::to_string(&qg).unwrap();
        assert!(text.contains("\"lambda\":\"1\""));
        let back: QuasiGeodesic = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back, qg);
    }

    #[test]
    fn geodesic_verifies_as_isometric_embedding() {
        let g = path(11);
        let m = g.metric();
        let qg = unit_geodesic(&g, 0, 10);
        assert_eq!(verify_quasi_geodesic(&m, &qg).unwrap(), None);
        assert_eq!(
            fit_qi_constants(&m, &qg.params, &qg.points, rat("1")).unwrap(),
            rat("0")
        );
    }

    #[test]
    fn extremal_is_tight_and_fails_at_half_c() {
        let g = path(20);
        let m = g.metric();
        let qg = extremal_example(2, 2, &g).unwrap();
        assert_eq!(qg.interval_length(), 4);
        assert_eq!(verify_quasi_geodesic(&m, &qg).unwrap(), None);
        // fitted additive constant reproduces the design constant exactly
        assert_eq!(
            fit_qi_constants(&m, &qg.params, &qg.points, rat("2")).unwrap(),
            rat("2")
        );
        // halving c breaks the sandwich first at the endpoint pair
        let weak = QuasiGeodesic::new(qg.params.clone(), qg.points.clone(), rat("2"), rat("1"))
            .unwrap();
        assert_eq!(verify_quasi_geodesic(&m, &weak).unwrap(), Some((0, 4)));
    }

    #[test]
    fn extremal_reaches_quadratic_depth() {
        for (lambda, c, expect) in [(2i64, 2i64, 4u32), (4, 2, 16), (2, 4, 8)] {
            let g = path(1 + expect as usize);
            let m = g.metric();
            let qg = extremal_example(lambda, c, &g).unwrap();
            assert_eq!(verify_quasi_geodesic(&m, &qg).unwrap(), None);
            let a = qg.first_point();
            assert_eq!(qg.last_point(), a);
            let sigma = g.canonical_geodesic(a, a).unwrap();
            assert_eq!(morse_distance(&m, &qg, &sigma).unwrap(), expect);
            assert_eq!(anti_morse_distance(&m, &qg, &sigma).unwrap(), 0);
        }
    }

    #[test]
    fn extremal_rejections() {
        let g = path(30);
        assert!(extremal_example(1, 2, &g).is_err());
        assert!(extremal_example(3, 2, &g).is_err());
        assert!(extremal_example(2, 0, &g).is_err());
        assert!(extremal_example(2, 3, &g).is_err());
        // diameter 4 < 2^2 * 2 / 2
        assert!(extremal_example(2, 2, &path(4)).is_err());
        let cyc = build_control(ControlKind::Cycle, 12).unwrap();
        assert!(extremal_example(2, 2, &cyc).is_err());
    }

    #[test]
    fn delta_length_geodesic_equals_length() {
        let g = path(11);
        let m = g.metric();
        let qg = unit_geodesic(&g, 0, 10);
        let r = delta_length(&m, &qg, 1).unwrap();
        assert_eq!(r.value, 10);
        assert!(!r.degenerate);
        assert_eq!(*r.witness.first().unwrap(), 0);
        assert_eq!(*r.witness.last().unwrap(), 10);
    }

    #[test]
    fn delta_length_doubles_on_backtrack() {
        let g = path(6);
        let m = g.metric();
        let mut pts: Vec<PointId> = (0..6).map(PointId).collect();
        pts.extend((0..5).rev().map(PointId));
        let qg = QuasiGeodesic::from_walk(pts, rat("3"), rat("2")).unwrap();
        let r = delta_length(&m, &qg, 1).unwrap();
        assert_eq!(r.value, 10);
        let oracle = enumerate_delta_length(&m, &qg, 1).unwrap();
        assert_eq!(r.value, oracle);
    }

    #[test]
    fn delta_length_degenerate_and_errors() {
        let g = path(3);
        let m = g.metric();
        let qg = QuasiGeodesic::new(
            vec![0, 1],
            vec![PointId(1), PointId(1)],
            rat("1"),
            rat("1"),
        )
        .unwrap();
        let r = delta_length(&m, &qg, 1).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.value, 0);
        assert!(r.witness.is_empty());
        assert!(delta_length(&m, &qg, 0).is_err());
        let single =
            QuasiGeodesic::new(vec![0], vec![PointId(0)], rat("1"), rat("0")).unwrap();
        assert!(delta_length(&m, &single, 1).is_err());
    }

    #[test]
    fn delta_length_matches_enumeration_on_random_walks() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        let mut rng = ChaCha8Rng::seed_from_u64(417);
        for _ in 0..80 {
            let steps = rng.random_range(3..=11);
            let mut at = PointId(rng.random_range(0..ball.node_count()));
            let mut pts = vec![at];
            for _ in 0..steps {
                let nbs = ball.neighbors(at.0);
                if rng.random_range(0..4u32) == 0 {
                    pts.push(at);
                } else {
                    at = PointId(nbs[rng.random_range(0..nbs.len())]);
                    pts.push(at);
                }
            }
            let qg = QuasiGeodesic::from_walk(pts, rat("20"), rat("20")).unwrap();
            for delta in 1..=3 {
                let dp = delta_length(&m, &qg, delta).unwrap();
                let oracle = enumerate_delta_length(&m, &qg, delta).unwrap();
                assert_eq!(dp.value, oracle);
                if !dp.degenerate {
                    for w in dp.witness.windows(2) {
                        let d = m.distance(qg.points[w[0]], qg.points[w[1]]).unwrap();
                        assert!(d >= delta);
                    }
                    let sum: u64 = dp
                        .witness
                        .windows(2)
                        .map(|w| m.distance(qg.points[w[0]], qg.points[w[1]]).unwrap() as u64)
                        .sum();
                    assert_eq!(sum, dp.value);
                }
            }
        }
    }

    #[test]
    fn delta_length_non_increasing_in_mesh() {
        let ball = build_tree_ball(3, 4).unwrap();
        let m = ball.metric();
        for seed in 0..20u64 {
            let qg = random_quasi_geodesic(
                &ball,
                &m,
                PointId(0),
                PointId(ball.node_count() - 1),
                rat("2"),
                rat("2"),
                seed,
            )
            .unwrap();
            let mut last = u64::MAX;
            for delta in 1..=5 {
                let v = delta_length(&m, &qg, delta).unwrap().value;
                assert!(v <= last);
                last = v;
            }
        }
    }

    #[test]
    fn taut_replacement_of_geodesic_is_identity() {
        let g = path(12);
        let m = g.metric();
        let qg = unit_geodesic(&g, 0, 11);
        let out = taut_replacement(&m, &g, &qg, 1).unwrap();
        assert_eq!(out.points, qg.points);
        assert_eq!(out.interval_length(), 11);
    }

    #[test]
    fn taut_replacement_certifies_and_preserves_length() {
        let ball = build_tree_ball(3, 4).unwrap();
        let m = ball.metric();
        let far = PointId(ball.node_count() - 1);
        for seed in 0..25u64 {
            let qg =
                random_quasi_geodesic(&ball, &m, PointId(1), far, rat("2"), rat("2"), seed)
                    .unwrap();
            let delta = 4; // max(1, 2c)
            let dl = delta_length(&m, &qg, delta).unwrap();
            if dl.degenerate {
                continue;
            }
            let out = taut_replacement(&m, &ball, &qg, delta).unwrap();
            assert_eq!(out.interval_length() as u64, dl.value);
            assert_eq!(out.c, rat("54")); // 12*4 + 3*2
            assert_eq!(verify_quasi_geodesic(&m, &out).unwrap(), None);
            for w in out.points.windows(2) {
                assert!(m.distance(w[0], w[1]).unwrap() <= 1);
            }
        }
    }

    #[test]
    fn taut_replacement_rejects_bad_inputs() {
        let g = path(20);
        let m = g.metric();
        let qg = extremal_example(2, 2, &g).unwrap();
        // extremal samples jump 2 edges per step
        assert!(matches!(
            taut_replacement(&m, &g, &qg, 2),
            Err(Error::InvalidCurve(_))
        ));
        let geo = unit_geodesic(&g, 0, 10);
        let below = QuasiGeodesic::new(geo.params.clone(), geo.points.clone(), rat("2"), rat("5"))
            .unwrap();
        assert!(matches!(
            taut_replacement(&m, &g, &below, 2),
            Err(Error::Domain(_))
        ));
        let dwell = QuasiGeodesic::new(
            vec![0, 1],
            vec![PointId(3), PointId(3)],
            rat("2"),
            rat("1"),
        )
        .unwrap();
        assert!(taut_replacement(&m, &g, &dwell, 1).is_err());
    }

    #[test]
    fn length_lemmas_hold_for_generated_curves() {
        let ball = build_tree_ball(3, 4).unwrap();
        let m = ball.metric();
        let far = PointId(ball.node_count() - 1);
        for (lambda, c) in [("1", "0"), ("2", "1"), ("2", "2"), ("3/2", "3")] {
            for seed in 0..15u64 {
                let qg = random_quasi_geodesic(
                    &ball,
                    &m,
                    PointId(2),
                    far,
                    rat(lambda),
                    rat(c),
                    seed,
                )
                .unwrap();
                let delta = {
                    let two_c = rat(c) * Rational::from_integer(2);
                    if two_c <= rat("1") {
                        1
                    } else {
                        two_c.ceil().to_integer() as u32
                    }
                };
                let l = delta_length(&m, &qg, delta).unwrap().value;
                // total mesh-length is at most 2 lambda (interval length)
                let interval = Rational::from_integer(qg.interval_length());
                assert!(
                    Rational::from_integer(l as i64)
                        <= Rational::from_integer(2) * rat(lambda) * interval
                );
                let r = m.distance(qg.first_point(), qg.last_point()).unwrap();
                if Rational::from_integer(r as i64) >= rat(c) {
                    // and at most 4 lambda^2 (endpoint distance)
                    assert!(
                        Rational::from_integer(l as i64)
                            <= Rational::from_integer(4)
                                * rat(lambda)
                                * rat(lambda)
                                * Rational::from_integer(r as i64)
                    );
                }
            }
        }
    }

    #[test]
    fn random_generation_is_deterministic_and_valid() {
        let ball = build_tree_ball(3, 4).unwrap();
        let m = ball.metric();
        let far = PointId(ball.node_count() - 1);
        let a = random_quasi_geodesic(&ball, &m, PointId(0), far, rat("2"), rat("2"), 99).unwrap();
        let b = random_quasi_geodesic(&ball, &m, PointId(0), far, rat("2"), rat("2"), 99).unwrap();
        assert_eq!(a, b);
        let c = random_quasi_geodesic(&ball, &m, PointId(0), far, rat("2"), rat("2"), 100).unwrap();
        assert_eq!(verify_quasi_geodesic(&m, &c).unwrap(), None);
        assert_eq!(a.first_point(), PointId(0));
        assert_eq!(a.last_point(), far);
    }

    #[test]
    fn strict_constants_force_the_geodesic() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        let far = PointId(ball.node_count() - 1);
        let qg = random_quasi_geodesic(&ball, &m, PointId(0), far, rat("1"), rat("0"), 7).unwrap();
        let geo = ball.canonical_geodesic(PointId(0), far).unwrap();
        assert_eq!(qg.points, geo.points());
    }

    #[test]
    fn degenerate_endpoints_give_single_sample() {
        let g = path(5);
        let m = g.metric();
        let qg =
            random_quasi_geodesic(&g, &m, PointId(2), PointId(2), rat("2"), rat("1"), 3).unwrap();
        assert_eq!(qg.len(), 1);
        assert_eq!(verify_quasi_geodesic(&m, &qg).unwrap(), None);
    }

    #[test]
    fn morse_distance_endpoint_guard() {
        let g = path(8);
        let m = g.metric();
        let qg = unit_geodesic(&g, 0, 7);
        let wrong = g.canonical_geodesic(PointId(0), PointId(5)).unwrap();
        assert!(matches!(
            morse_distance(&m, &qg, &wrong),
            Err(Error::EndpointMismatch { .. })
        ));
        let reversed = g.canonical_geodesic(PointId(7), PointId(0)).unwrap();
        assert_eq!(morse_distance(&m, &qg, &reversed).unwrap(), 0);
        assert_eq!(anti_morse_distance(&m, &qg, &reversed).unwrap(), 0);
    }

    #[test]
    fn staircase_detour_has_positive_anti_morse() {
        let patch = crate::graphs::build_tessellation_patch(7, 3, 3).unwrap();
        let m = patch.metric();
        let boundary = patch.proxy_boundary();
        let (mut a, mut b, mut best) = (PointId(0), PointId(0), 0);
        for &p in &boundary {
            for &q in &boundary {
                let d = m.distance(p, q).unwrap();
                if d > best {
                    best = d;
                    a = p;
                    b = q;
                }
            }
        }
        let sigma = patch.canonical_geodesic(a, b).unwrap();
        let walk = staircase_walk(&patch, &m, &sigma, 2).unwrap();
        let fitted = fit_qi_constants(
            &m,
            &(0..walk.len() as i64).collect::<Vec<_>>(),
            &walk,
            rat("4"),
        )
        .unwrap();
        let qg = QuasiGeodesic::from_walk(walk.clone(), rat("4"), fitted).unwrap();
        assert_eq!(verify_quasi_geodesic(&m, &qg).unwrap(), None);
        let anti = anti_morse_distance(&m, &qg, &sigma).unwrap();
        assert!(anti >= 2, "detour should clear the excluded ball, got {anti}");
        let again = staircase_walk(&patch, &m, &sigma, 2).unwrap();
        assert_eq!(walk, again);
        assert!(staircase_walk(&patch, &m, &sigma, 100).is_err());
    }

    #[test]
    fn tree_delta_is_zero_for_ball_spaces() {
        let ball = build_tree_ball(3, 3).unwrap();
        let m = ball.metric();
        assert_eq!(
            m.four_point_delta_with(QuadrupleScan::Exhaustive { max_points: 200 })
                .unwrap()
                .doubled(),
            0
        );
    }
}
