//! Graph-backed metric spaces: regular tree balls, hyperbolic tessellation
//! patches, and control families (paths, cycles, square grids).
//!
//! All graphs are finite, simple, undirected, connected; the metric is the
//! hop metric from breadth-first search. Geodesics are canonical: the unique
//! path obtained by following breadth-first parents with lowest-index
//! tie-breaking, so every (u, v) request yields the same segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, GeodesicProvider, PointId};

/// Hard cap on constructed graph sizes; anything larger is a construction
/// error rather than an out-of-memory surprise later.
pub const MAX_VERTICES: usize = 1_000_000;

/// A finite simple connected undirected graph with 0-based vertex ids.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

/// One fixed geodesic segment: consecutive points are adjacent and
/// `d(points[i], points[j]) = |i - j|` along the whole segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicSegment {
    points: Vec<PointId>,
}

impl GeodesicSegment {
    pub(crate) fn new(points: Vec<PointId>) -> Self {
        debug_assert!(!points.is_empty());
        GeodesicSegment { points }
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn first(&self) -> PointId {
        self.points[0]
    }

    pub fn last(&self) -> PointId {
        *self.points.last().unwrap()
    }

    /// Number of edges (one less than the number of points).
    pub fn length(&self) -> u32 {
        (self.points.len() - 1) as u32
    }
}

impl Graph {
    /// Builds a graph from an explicit edge list over vertices `0..n`.
    /// Rejects loops, parallel edges, out-of-range ids and disconnected
    /// graphs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::Construction(format!(
                "{n} vertices exceeds the cap of {MAX_VERTICES}"
            )));
        }
        let mut seen = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "parallel edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        for &(u, v) in &seen {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        let g = Graph { n, adj, edges: seen.into_iter().collect() };
        let dist = g.bfs_dist(0);
        if dist.iter().any(|&d| d == u32::MAX) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() == self.n - 1
    }

    fn check_point(&self, p: PointId) -> Result<usize> {
        if p.0 < self.n {
            Ok(p.0)
        } else {
            Err(Error::PointOutOfRange { index: p.0, count: self.n })
        }
    }

    /// Hop distances from `src` to every vertex (u32::MAX marks unreachable;
    /// impossible for constructed graphs, used during validation).
    pub fn bfs_dist(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The full hop metric as a table; O(n (n + m)) time, O(n^2) memory.
    pub fn metric(&self) -> FiniteMetricSpace {
        let n = self.n;
        let mut table = vec![0u32; n * n];
        for src in 0..n {
            let d = self.bfs_dist(src);
            table[src * n..(src + 1) * n].copy_from_slice(&d);
        }
        FiniteMetricSpace::from_table_unchecked(n, table)
    }

    /// The canonical geodesic from `u` to `v`: descend from `v` through the
    /// lowest-index neighbor one level closer to `u`.
    pub fn canonical_geodesic(&self, u: PointId, v: PointId) -> Result<GeodesicSegment> {
        let (u, v) = (self.check_point(u)?, self.check_point(v)?);
        let dist = self.bfs_dist(u);
        let mut rev = vec![PointId(v)];
        let mut cur = v;
        while cur != u {
            let need = dist[cur] - 1;
            let parent = self.adj[cur]
                .iter()
                .copied()
                .find(|&w| dist[w] == need)
                .expect("connected graph has a parent on every level");
            rev.push(PointId(parent));
            cur = parent;
        }
        rev.reverse();
        Ok(GeodesicSegment::new(rev))
    }

    /// All points of `sigma` at minimal distance from `x`, in segment order.
    pub fn project_to_geodesic(&self, x: PointId, sigma: &GeodesicSegment) -> Result<Vec<PointId>> {
        let x = self.check_point(x)?;
        for &p in sigma.points() {
            self.check_point(p)?;
        }
        let dist = self.bfs_dist(x);
        let best = sigma.points().iter().map(|&p| dist[p.0]).min().unwrap();
        Ok(sigma
            .points()
            .iter()
            .copied()
            .filter(|&p| dist[p.0] == best)
            .collect())
    }

    /// Diameter, measured along `sigma` by index difference, of the union of
    /// nearest-point projections of all curve points.
    pub fn projection_extent(&self, curve: &[PointId], sigma: &GeodesicSegment) -> Result<u32> {
        if curve.is_empty() {
            return Err(Error::InvalidCurve("projection of an empty curve".into()));
        }
        let index_of: HashMap<usize, usize> = sigma
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.0, i))
            .collect();
        let mut lo = usize::MAX;
        let mut hi = 0usize;
        for &x in curve {
            for p in self.project_to_geodesic(x, sigma)? {
                let i = index_of[&p.0];
                lo = lo.min(i);
                hi = hi.max(i);
            }
        }
        Ok((hi - lo) as u32)
    }

    /// Vertices of maximal eccentricity; stands in for the boundary at
    /// infinity (leaves of a tree ball, ends of a path, outer ring of a
    /// patch).
    pub fn proxy_boundary(&self) -> Vec<PointId> {
        let mut ecc = vec![0u32; self.n];
        let mut diam = 0;
        for v in 0..self.n {
            let e = *self.bfs_dist(v).iter().max().unwrap();
            ecc[v] = e;
            diam = diam.max(e);
        }
        (0..self.n).filter(|&v| ecc[v] == diam).map(PointId).collect()
    }

    /// Serializes as edge-list text: one "u v" pair per line, 0-based.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        let mut edges = Vec::new();
        let mut max = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected \"u v\", got {line:?}",
                        lineno + 1
                    )))
                }
            };
            let u: usize = u
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad id {u:?}", lineno + 1)))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad id {v:?}", lineno + 1)))?;
            max = max.max(u).max(v);
            edges.push((u, v));
        }
        if edges.is_empty() {
            return Err(Error::Parse("edge list is empty".into()));
        }
        Graph::from_edges(max + 1, &edges)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }

    pub fn load_edge_list(path: &Path) -> Result<Graph> {
        let text = std::fs::read_to_string(path)?;
        Graph::from_edge_list_str(&text)
    }
}

impl GeodesicProvider for Graph {
    fn geodesic_points(&self, u: PointId, v: PointId) -> Result<Vec<PointId>> {
        Ok(self.canonical_geodesic(u, v)?.points.clone())
    }
}

/// Ball of radius `radius` in the `degree`-regular infinite tree: the root
/// and every internal vertex have degree `degree`, leaves sit at depth
/// `radius`. Vertices are numbered in breadth-first order from the root.
pub fn build_tree_ball(degree: usize, radius: usize) -> Result<Graph> {
    if degree < 2 {
        return Err(Error::Construction(format!(
            "tree ball needs degree >= 2, got {degree}"
        )));
    }
    let expected = tree_ball_vertex_count(degree, radius)?;
    let mut edges = Vec::with_capacity(expected - 1);
    let mut next = 1usize;
    // frontier of the previous level
    let mut level = vec![0usize];
    for depth in 0..radius {
        let children_each = if depth == 0 { degree } else { degree - 1 };
        let mut new_level = Vec::with_capacity(level.len() * children_each);
        for &v in &level {
            for _ in 0..children_each {
                edges.push((v, next));
                new_level.push(next);
                next += 1;
            }
        }
        level = new_level;
    }
    debug_assert_eq!(next, expected);
    Graph::from_edges(expected, &edges)
}

/// Closed-form vertex count of the tree ball, with the overflow/cap guard.
pub fn tree_ball_vertex_count(degree: usize, radius: usize) -> Result<usize> {
    let mut total: u128 = 1;
    let mut ring: u128 = 1;
    for depth in 0..radius {
        let mult = if depth == 0 { degree } else { degree - 1 } as u128;
        ring = ring.saturating_mul(mult);
        total = total.saturating_add(ring);
        if total > MAX_VERTICES as u128 {
            return Err(Error::Construction(format!(
                "tree ball (degree {degree}, radius {radius}) exceeds {MAX_VERTICES} vertices"
            )));
        }
    }
    Ok(total as usize)
}

/// Control families: not hyperbolic-looking on purpose (except small sizes).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlKind {
    /// Path on `n` vertices.
    Path,
    /// Cycle on `n` vertices.
    Cycle,
    /// `n x n` square grid.
    Grid,
}

pub fn build_control(kind: ControlKind, n: usize) -> Result<Graph> {
    match kind {
        ControlKind::Path => {
            if n == 0 {
                return Err(Error::Construction("path needs n >= 1".into()));
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            Graph::from_edges(n, &edges)
        }
        ControlKind::Cycle => {
            if n < 3 {
                return Err(Error::Construction("cycle needs n >= 3".into()));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            Graph::from_edges(n, &edges)
        }
        ControlKind::Grid => {
            if n == 0 {
                return Err(Error::Construction("grid needs n >= 1".into()));
            }
            if n * n > MAX_VERTICES {
                return Err(Error::Construction(format!(
                    "grid {n}x{n} exceeds {MAX_VERTICES} vertices"
                )));
            }
            let id = |r: usize, c: usize| r * n + c;
            let mut edges = Vec::new();
            for r in 0..n {
                for c in 0..n {
                    if c + 1 < n {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < n {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::from_edges(n * n, &edges)
        }
    }
}

/// Uniform random recursive tree on `n` vertices (vertex `i` attaches to a
/// uniform earlier vertex), deterministic under `seed`.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Construction("tree needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    Graph::from_edges(n, &edges)
}

/// A patch of the {p, q} tessellation (p-gonal faces, q around each interior
/// vertex): `layers` concentric face rings grown from one central face.
/// Layer 1 is a single p-cycle. Requires a hyperbolic pair, 1/p + 1/q < 1/2,
/// and p >= 4 (triangle faces use a different gluing and are not supported).
pub fn build_tessellation_patch(p: usize, q: usize, layers: usize) -> Result<Graph> {
    if p < 3 || q < 3 {
        return Err(Error::Construction(format!(
            "tessellation needs p, q >= 3, got {{{p},{q}}}"
        )));
    }
    if (p - 2) * (q - 2) <= 4 {
        return Err(Error::NotHyperbolic { p, q });
    }
    if p == 3 {
        return Err(Error::Construction(
            "triangle-faced patches ({3,q}) are not supported by the ring builder".into(),
        ));
    }
    if layers == 0 {
        return Err(Error::Construction("patch needs layers >= 1".into()));
    }

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let add_edge = |a: usize, b: usize, edges: &mut BTreeSet<(usize, usize)>| {
        edges.insert((a.min(b), a.max(b)));
    };

    let mut n = p;
    let mut facedeg = vec![1usize; p];
    let mut boundary: Vec<usize> = (0..p).collect();
    for i in 0..p {
        add_edge(i, (i + 1) % p, &mut edges);
    }

    for _ring in 1..layers {
        let m = boundary.len();
        // Missing faces per boundary vertex beyond the two edge faces; -1
        // means a single face wraps around this vertex.
        let t: Vec<isize> = boundary
            .iter()
            .map(|&v| q as isize - facedeg[v] as isize - 2)
            .collect();
        let anchors: Vec<usize> = (0..m).filter(|&i| t[i] >= 0).collect();
        if anchors.len() < 2 {
            return Err(Error::Construction(
                "degenerate boundary while growing tessellation ring".into(),
            ));
        }
        // Wrapped runs must stay short enough for a p-gon to cover them.
        for w in 0..anchors.len() {
            let a = anchors[w];
            let b = anchors[(w + 1) % anchors.len()];
            let k = (b + m - a - 1) % m + 1; // edges from anchor a to next anchor
            if p < k + 3 {
                return Err(Error::Construction(
                    "boundary run too long for one face; unsupported (p, q) geometry".into(),
                ));
            }
        }

        let fresh = |n: &mut usize, facedeg: &mut Vec<usize>| -> Result<usize> {
            if *n >= MAX_VERTICES {
                return Err(Error::Construction(format!(
                    "tessellation patch exceeds {MAX_VERTICES} vertices"
                )));
            }
            let v = *n;
            *n += 1;
            facedeg.push(0);
            Ok(v)
        };

        // Fan spokes: per anchor vertex, t+1 new gap vertices.
        let mut gaps: HashMap<usize, Vec<usize>> = HashMap::new();
        for &a in &anchors {
            let count = t[a] as usize + 1;
            let mut g = Vec::with_capacity(count);
            for _ in 0..count {
                g.push(fresh(&mut n, &mut facedeg)?);
            }
            gaps.insert(a, g);
        }

        let mut new_boundary: Vec<usize> = Vec::new();
        for w in 0..anchors.len() {
            let a = anchors[w];
            let b = anchors[(w + 1) % anchors.len()];
            let v = boundary[a];
            let ga = &gaps[&a];

            new_boundary.push(ga[0]);
            // Vertex fan at v: faces between consecutive gap spokes.
            for j in 0..t[a] as usize {
                add_edge(v, ga[j], &mut edges);
                let mut prev = ga[j];
                for _ in 0..(p - 3) {
                    let x = fresh(&mut n, &mut facedeg)?;
                    facedeg[x] += 1;
                    add_edge(prev, x, &mut edges);
                    new_boundary.push(x);
                    prev = x;
                }
                add_edge(prev, ga[j + 1], &mut edges);
                add_edge(ga[j + 1], v, &mut edges);
                facedeg[v] += 1;
                facedeg[ga[j]] += 1;
                facedeg[ga[j + 1]] += 1;
                new_boundary.push(ga[j + 1]);
            }
            // Edge face from anchor a to the next anchor b, wrapping any
            // intermediate vertices (their missing face is this one).
            let k = (b + m - a - 1) % m + 1;
            let u_last = boundary[b];
            let gap_out = *ga.last().unwrap();
            let gap_in = gaps[&b][0];
            add_edge(gap_out, v, &mut edges);
            facedeg[gap_out] += 1;
            let mut chain = Vec::with_capacity(p - k - 3);
            let mut prev = gap_in;
            for _ in 0..(p - k - 3) {
                let x = fresh(&mut n, &mut facedeg)?;
                facedeg[x] += 1;
                add_edge(prev, x, &mut edges);
                chain.push(x);
                prev = x;
            }
            add_edge(prev, gap_out, &mut edges);
            add_edge(u_last, gap_in, &mut edges);
            facedeg[gap_in] += 1;
            // every old vertex under this face gains it, wrapped ones
            // reach their full complement of q here
            for step in 1..=k {
                facedeg[boundary[(a + step) % m]] += 1;
            }
            facedeg[v] += 1;
            // boundary direction runs gap_out <- chain <- gap_in
            for &x in chain.iter().rev() {
                new_boundary.push(x);
            }
        }
        boundary = new_boundary;
    }

    let edge_vec: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(n, &edge_vec)
}
