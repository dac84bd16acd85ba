//! Batch experiment drivers shared by the command-line binary: space
//! generators, per-trial invariant checks, and JSON/CSV report emission.
//!
//! Reports are deterministic given (inputs, seed); the `wall_ms` field is
//! informational and excluded from that contract.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    anti_morse_bound, contraction_bound, morse_bound, prop1_bound, thm3_bound, MorseConstants,
};
use crate::error::{Error, Result};
use crate::graphs::{
    build_control, build_tessellation_patch, build_tree_ball, ControlKind, Graph,
};
use crate::metric::{
    thin_triangle_delta, FiniteMetricSpace, PointId, QuadrupleScan, TriangleScan,
};
use crate::quasi_geodesics::{
    anti_morse_distance, delta_length, enumerate_delta_length, extremal_example, morse_distance,
    random_quasi_geodesic, taut_replacement, verify_quasi_geodesic, QuasiGeodesic,
};
use crate::quasi_isometries::{
    ball_center_shift, displacement, fixes_proxy_boundary, verify_quasi_isometry,
};
use crate::rational::{rational_to_f64, Rational};
use crate::richness::{build_geodesic_pool, richness_check, RichnessThresholds, Verdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One named invariant check and its outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

impl Check {
    fn pass(name: &str, details: String) -> Check {
        Check { name: name.into(), pass: true, details }
    }

    fn gate(name: &str, pass: bool, details: String) -> Check {
        Check { name: name.into(), pass, details }
    }
}

/// One trial: the unit of the CSV output and of seed derivation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    pub measured: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Trial {
    fn new(index: usize, seed: u64) -> Trial {
        Trial {
            index,
            seed,
            params: BTreeMap::new(),
            measured: BTreeMap::new(),
            bounds: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
        }
    }

    fn seal(mut self) -> Trial {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }
}

/// A full experiment run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub space: String,
    pub params: BTreeMap<String, String>,
    pub trials: Vec<Trial>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_ms: u128,
    /// Experiment-specific payload (richness embeds its full report here).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

impl Report {
    fn new(experiment: &str, space: &str) -> Report {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: experiment.into(),
            space: space.into(),
            params: BTreeMap::new(),
            trials: Vec::new(),
            checks: Vec::new(),
            pass: true,
            wall_ms: 0,
            extra: None,
        }
    }

    fn seal(mut self, started: Instant) -> Report {
        self.pass =
            self.checks.iter().all(|c| c.pass) && self.trials.iter().all(|t| t.pass);
        self.wall_ms = started.elapsed().as_millis();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per trial. Columns are the sorted union of the per-trial
    /// param, measured, and bound keys, so sweep outputs plot directly.
    pub fn to_csv(&self) -> String {
        let mut pk = BTreeSet::new();
        let mut mk = BTreeSet::new();
        let mut bk = BTreeSet::new();
        for t in &self.trials {
            pk.extend(t.params.keys().cloned());
            mk.extend(t.measured.keys().cloned());
            bk.extend(t.bounds.keys().cloned());
        }
        let mut out = String::new();
        out.push_str("experiment,trial,seed");
        for k in pk.iter().chain(mk.iter()).chain(bk.iter()) {
            out.push(',');
            out.push_str(k);
        }
        out.push_str(",pass\n");
        for t in &self.trials {
            out.push_str(&format!("{},{},{}", self.experiment, t.index, t.seed));
            for k in &pk {
                out.push(',');
                if let Some(v) = t.params.get(k) {
                    out.push_str(v);
                }
            }
            for k in &mk {
                out.push(',');
                if let Some(v) = t.measured.get(k) {
                    out.push_str(&format!("{v}"));
                }
            }
            for k in &bk {
                out.push(',');
                if let Some(v) = t.bounds.get(k) {
                    out.push_str(&format!("{v}"));
                }
            }
            out.push_str(&format!(",{}\n", t.pass));
        }
        out
    }
}

/// SplitMix64 step; derives decorrelated per-trial seeds from a master seed.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator mini-grammar `kind:key=val,key=val`. Unknown kinds, unknown or
/// duplicate keys, and missing keys are all errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    TreeBall { degree: usize, radius: usize },
    Path { n: usize },
    Cycle { n: usize },
    Grid { n: usize },
    Tessellation { p: usize, q: usize, layers: usize },
}

impl SpaceSpec {
    pub fn parse(text: &str) -> Result<SpaceSpec> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| {
            Error::Parse(format!("generator spec '{text}' is not of the form kind:key=val,..."))
        })?;
        let mut kv: BTreeMap<String, usize> = BTreeMap::new();
        for part in rest.split(',') {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::Parse(format!("generator field '{part}' is not key=val"))
            })?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("'{v}' is not a nonnegative integer")))?;
            if kv.insert(k.trim().to_string(), v).is_some() {
                return Err(Error::Parse(format!("duplicate generator key '{k}'")));
            }
        }
        let mut take = |key: &str| {
            kv.remove(key)
                .ok_or_else(|| Error::Parse(format!("{kind} generator is missing {key}=")))
        };
        let spec = match kind {
            "tree" => SpaceSpec::TreeBall { degree: take("d")?, radius: take("R")? },
            "path" => SpaceSpec::Path { n: take("n")? },
            "cycle" => SpaceSpec::Cycle { n: take("n")? },
            "grid" => SpaceSpec::Grid { n: take("n")? },
            "tess" => SpaceSpec::Tessellation {
                p: take("p")?,
                q: take("q")?,
                layers: take("layers")?,
            },
            other => {
                return Err(Error::Parse(format!(
                    "unknown generator kind '{other}' (expected tree, path, cycle, grid, tess)"
                )))
            }
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("unknown generator key '{k}' for kind {kind}")));
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<Graph> {
        match *self {
            SpaceSpec::TreeBall { degree, radius } => build_tree_ball(degree, radius),
            SpaceSpec::Path { n } => build_control(ControlKind::Path, n),
            SpaceSpec::Cycle { n } => build_control(ControlKind::Cycle, n),
            SpaceSpec::Grid { n } => build_control(ControlKind::Grid, n),
            SpaceSpec::Tessellation { p, q, layers } => build_tessellation_patch(p, q, layers),
        }
    }

    pub fn descriptor(&self) -> String {
        match *self {
            SpaceSpec::TreeBall { degree, radius } => format!("tree:d={degree},R={radius}"),
            SpaceSpec::Path { n } => format!("path:n={n}"),
            SpaceSpec::Cycle { n } => format!("cycle:n={n}"),
            SpaceSpec::Grid { n } => format!("grid:n={n}"),
            SpaceSpec::Tessellation { p, q, layers } => format!("tess:p={p},q={q},layers={layers}"),
        }
    }
}

/// Resolves the `--gen` / `--input` pair into a graph and a descriptor.
pub fn space_from_args(gen: Option<&str>, input: Option<&Path>) -> Result<(Graph, String)> {
    match (gen, input) {
        (Some(_), Some(_)) => Err(Error::Parse(
            "give either a generator spec or an input file, not both".into(),
        )),
        (None, None) => Err(Error::Parse("one of --gen or --input is required".into())),
        (Some(spec), None) => {
            let spec = SpaceSpec::parse(spec)?;
            Ok((spec.build()?, spec.descriptor()))
        }
        (None, Some(path)) => {
            Ok((Graph::load_edge_list(path)?, format!("file:{}", path.display())))
        }
    }
}

/// Exhaustive four-point scan where affordable, seeded sampling above.
fn delta_scan(n: usize, seed: u64) -> (QuadrupleScan, String) {
    if n <= 500 {
        (QuadrupleScan::Exhaustive { max_points: 500 }, "exhaustive".into())
    } else {
        let q = 200_000;
        (QuadrupleScan::Sampled { quadruples: q, seed }, format!("sampled:{q}"))
    }
}

fn rational_of(h: crate::metric::HalfInteger) -> Rational {
    Rational::new(h.doubled(), 2)
}

fn integer_of(r: Rational, name: &str) -> Result<i64> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::Domain(format!("{name} must be an integer here, got {r}")))
    }
}

/// Smallest mesh that is >= 1 and >= 2c.
fn mesh_for(c: Rational) -> u32 {
    let two_c = (c + c).ceil().to_integer();
    two_c.max(1) as u32
}

fn walk_length(space: &FiniteMetricSpace, points: &[PointId]) -> Result<u64> {
    let mut total = 0u64;
    for w in points.windows(2) {
        total += space.distance(w[0], w[1])? as u64;
    }
    Ok(total)
}

fn distinct_endpoints(rng: &mut ChaCha8Rng, n: usize) -> (PointId, PointId) {
    let u = rng.random_range(0..n);
    let mut v = rng.random_range(0..n);
    if v == u {
        v = (v + 1) % n;
    }
    (PointId(u), PointId(v))
}

/// Lexicographically first pair realizing the diameter.
fn diametral_pair(space: &FiniteMetricSpace) -> Result<(PointId, PointId)> {
    let n = space.len();
    let diam = space.diameter();
    for a in 0..n {
        for b in (a + 1)..n {
            if space.distance(PointId(a), PointId(b))? == diam {
                return Ok((PointId(a), PointId(b)));
            }
        }
    }
    Err(Error::Domain("space has fewer than two points".into()))
}

pub fn run_hyperbolicity(graph: &Graph, space_name: &str, seed: u64) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new("hyperbolicity", space_name);
    let space = graph.metric();
    let (scan, scan_name) = delta_scan(space.len(), seed);
    let four = space.four_point_delta_with(scan)?;
    let thin = thin_triangle_delta(&space, graph, TriangleScan::auto(space.len(), seed))?;
    report.params.insert("four_point_scan".into(), scan_name);
    let mut trial = Trial::new(0, seed);
    trial.measured.insert("four_point_delta".into(), four.as_f64());
    trial.measured.insert("thin_triangle_delta".into(), thin as f64);
    trial.measured.insert("points".into(), space.len() as f64);
    trial.measured.insert("edges".into(), graph.edge_count() as f64);
    trial.measured.insert("diameter".into(), space.diameter() as f64);
    report.trials.push(trial.seal());
    Ok(report.seal(started))
}

pub struct MorseConfig {
    pub lambda: Rational,
    pub c: Rational,
    pub trials: usize,
    pub seed: u64,
    pub extremal: bool,
}

/// Measures Morse and anti-Morse distances of generated quasi-geodesics
/// against canonical geodesics and enforces the neighborhood bound plus the
/// mesh-length and taut-replacement invariants on every trial.
pub fn run_morse(
    graph: &Graph,
    space_name: &str,
    cfg: &MorseConfig,
    consts: &MorseConstants,
) -> Result<Report> {
    consts.validate()?;
    let started = Instant::now();
    let mut report = Report::new("morse", space_name);
    let space = graph.metric();
    if space.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    let (scan, scan_name) = delta_scan(space.len(), cfg.seed);
    let delta = rational_of(space.four_point_delta_with(scan)?);
    report.params.insert("four_point_scan".into(), scan_name);
    report.params.insert("lambda".into(), cfg.lambda.to_string());
    report.params.insert("c".into(), cfg.c.to_string());
    report.params.insert("delta".into(), delta.to_string());
    report.params.insert("mode".into(), if cfg.extremal { "extremal" } else { "random" }.into());

    if cfg.extremal {
        let lam = integer_of(cfg.lambda, "lambda")?;
        let c = integer_of(cfg.c, "c")?;
        let qg = extremal_example(lam, c, graph)?;
        let trial = morse_trial_body(graph, &space, &qg, delta, consts, cfg.seed, 0, true)?;
        report.trials.push(trial);
    } else {
        let trials: Result<Vec<Trial>> = (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let seed = mix_seed(cfg.seed, i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (u, v) = distinct_endpoints(&mut rng, space.len());
                let qg = random_quasi_geodesic(graph, &space, u, v, cfg.lambda, cfg.c, seed)?;
                morse_trial_body(graph, &space, &qg, delta, consts, seed, i, false)
            })
            .collect();
        report.trials = trials?;
    }
    Ok(report.seal(started))
}

#[allow(clippy::too_many_arguments)]
fn morse_trial_body(
    graph: &Graph,
    space: &FiniteMetricSpace,
    qg: &QuasiGeodesic,
    delta: Rational,
    consts: &MorseConstants,
    seed: u64,
    index: usize,
    extremal: bool,
) -> Result<Trial> {
    let lambda = qg.lambda;
    let c = qg.c;
    let mut trial = Trial::new(index, seed);
    trial.params.insert("lambda".into(), lambda.to_string());
    trial.params.insert("c".into(), c.to_string());
    trial.params.insert("from".into(), qg.first_point().0.to_string());
    trial.params.insert("to".into(), qg.last_point().0.to_string());

    let sigma = graph.canonical_geodesic(qg.first_point(), qg.last_point())?;
    let morse = morse_distance(space, qg, &sigma)?;
    let anti = anti_morse_distance(space, qg, &sigma)?;
    let endpoint_distance = sigma.length();
    let l = Rational::from_integer(qg.interval_length());

    trial.measured.insert("morse".into(), morse as f64);
    trial.measured.insert("anti_morse".into(), anti as f64);
    trial.measured.insert("endpoint_distance".into(), endpoint_distance as f64);
    trial.measured.insert("interval_length".into(), qg.interval_length() as f64);

    let violation = verify_quasi_geodesic(space, qg)?;
    trial.checks.push(Check::gate(
        "verifies",
        violation.is_none(),
        match violation {
            None => format!("({lambda},{c})-quasi-geodesic inequality holds on all pairs"),
            Some((i, j)) => format!("violated at sample pair ({i},{j})"),
        },
    ));

    if extremal {
        let expected = lambda * lambda * c / Rational::from_integer(2);
        trial.checks.push(Check::gate(
            "extremal_exact",
            Rational::from_integer(morse as i64) == expected,
            format!("measured {morse}, construction value {expected}"),
        ));
    }

    let mb = morse_bound(lambda, c, delta, consts);
    trial.bounds.insert("morse_bound".into(), mb);
    trial.checks.push(Check::gate(
        "morse_le_bound",
        (morse as f64) <= mb,
        format!("measured {morse} vs bound {mb}"),
    ));
    if let Ok(ab) = anti_morse_bound(lambda, c, delta, consts) {
        // Reported, not gated: the anti-Morse coefficient defaults to a
        // placeholder scale of 1.
        trial.bounds.insert("anti_morse_bound".into(), ab);
    }

    let mesh = mesh_for(c);
    let dl = delta_length(space, qg, mesh)?;
    trial.measured.insert("delta_length".into(), dl.value as f64);
    let dl_r = Rational::from_integer(dl.value as i64);
    let two = Rational::from_integer(2);
    let lemma7 = two * lambda * l;
    trial.bounds.insert("interval_bound".into(), rational_to_f64(lemma7));
    trial.checks.push(Check::gate(
        "mesh_length_le_interval_bound",
        dl_r <= lemma7,
        format!("mesh-{mesh} length {} vs 2*lambda*l = {lemma7}", dl.value),
    ));
    let r = Rational::from_integer(endpoint_distance as i64);
    if r >= c {
        let lemma8 = Rational::from_integer(4) * lambda * lambda * r;
        trial.bounds.insert("endpoint_bound".into(), rational_to_f64(lemma8));
        trial.checks.push(Check::gate(
            "mesh_length_le_endpoint_bound",
            dl_r <= lemma8,
            format!("mesh-{mesh} length {} vs 4*lambda^2*R = {lemma8}", dl.value),
        ));
    }

    if dl.degenerate {
        trial.checks.push(Check::pass(
            "taut_replacement",
            "skipped: endpoints closer than the mesh".into(),
        ));
    } else if extremal {
        trial.checks.push(Check::pass(
            "taut_replacement",
            "skipped: construction moves lambda edges per step, replacement needs unit steps"
                .into(),
        ));
    } else {
        let taut = taut_replacement(space, graph, qg, mesh)?;
        let taut_violation = verify_quasi_geodesic(space, &taut)?;
        trial.checks.push(Check::gate(
            "taut_replacement",
            taut_violation.is_none(),
            format!("replacement verifies at ({},{})", taut.lambda, taut.c),
        ));
        let classical = walk_length(space, &taut.points)?;
        trial.checks.push(Check::gate(
            "taut_length",
            classical == dl.value,
            format!("replacement length {classical} vs mesh-length value {}", dl.value),
        ));
    }

    Ok(trial.seal())
}

/// Builds the center-shift self-map of a tree ball and gates it against the
/// displacement bounds.
pub fn run_displacement(
    graph: &Graph,
    space_name: &str,
    lambda: i64,
    c: i64,
    seed: u64,
    consts: &MorseConstants,
) -> Result<Report> {
    consts.validate()?;
    let started = Instant::now();
    let mut report = Report::new("displacement", space_name);
    let space = graph.metric();
    let center = PointId(0);
    let map = ball_center_shift(graph, center, lambda, c)?;
    let radius = *graph.bfs_dist(center.0).iter().max().unwrap_or(&0);
    let lambda_r = Rational::from_integer(lambda);
    let c_r = Rational::from_integer(c);
    report.params.insert("lambda".into(), lambda.to_string());
    report.params.insert("c".into(), c.to_string());
    report.params.insert("center".into(), center.0.to_string());

    let mut trial = Trial::new(0, seed);
    trial.params.insert("lambda".into(), lambda.to_string());
    trial.params.insert("c".into(), c.to_string());

    let violation = verify_quasi_isometry(&space, &map)?;
    trial.checks.push(Check::gate(
        "verifies",
        violation.is_none(),
        match violation {
            None => format!("({lambda},{c})-quasi-isometry inequality holds on all pairs"),
            Some((a, b)) => format!("violated at pair ({},{})", a.0, b.0),
        },
    ));

    let boundary = graph.proxy_boundary();
    let fixed = fixes_proxy_boundary(&space, &map, &boundary, 0)?;
    trial.checks.push(Check::gate(
        "fixes_boundary",
        fixed,
        format!("{} boundary points, tolerance 0", boundary.len()),
    ));

    let disp = displacement(&space, &map, center)?;
    trial.measured.insert("displacement".into(), disp as f64);
    trial.measured.insert("radius".into(), radius as f64);
    let expected = lambda * c / 2;
    trial.checks.push(Check::gate(
        "displacement_exact",
        disp as i64 == expected,
        format!("measured {disp}, construction value {expected}"),
    ));

    let p1 = prop1_bound(lambda_r, c_r, radius, consts);
    trial.bounds.insert("prop1_bound".into(), p1);
    trial.checks.push(Check::gate(
        "displacement_le_prop1",
        (disp as f64) <= p1,
        format!("measured {disp} vs bound {p1}"),
    ));
    trial.checks.push(Check::gate(
        "displacement_le_radius",
        disp <= radius,
        format!("measured {disp} vs radius {radius}"),
    ));
    if lambda > 1 {
        let t3 = thm3_bound(lambda_r, c_r, Rational::from_integer(0), consts)?;
        trial.bounds.insert("thm3_bound".into(), t3);
        trial.checks.push(Check::gate(
            "displacement_le_thm3",
            (disp as f64) <= t3,
            format!("measured {disp} vs bound {t3}"),
        ));
    }

    report.trials.push(trial.seal());
    Ok(report.seal(started))
}

pub struct ContractionConfig {
    pub mesh: u32,
    pub trials: usize,
    pub seed: u64,
}

/// Projects random curves that avoid a diametral geodesic and compares their
/// projection extent with the exponential contraction bound. Trees gate on
/// extent 0; elsewhere the bound is gated only inside its distance window.
pub fn run_contraction(
    graph: &Graph,
    space_name: &str,
    cfg: &ContractionConfig,
    consts: &MorseConstants,
) -> Result<Report> {
    consts.validate()?;
    if cfg.mesh == 0 {
        return Err(Error::InvalidMesh(0));
    }
    let started = Instant::now();
    let mut report = Report::new("contraction", space_name);
    let space = graph.metric();
    let (scan, scan_name) = delta_scan(space.len(), cfg.seed);
    let delta = rational_of(space.four_point_delta_with(scan)?);
    let (a, b) = diametral_pair(&space)?;
    let sigma = graph.canonical_geodesic(a, b)?;
    report.params.insert("four_point_scan".into(), scan_name);
    report.params.insert("delta".into(), delta.to_string());
    report.params.insert("mesh".into(), cfg.mesh.to_string());
    report
        .params
        .insert("geodesic".into(), format!("{}..{}", a.0, b.0));

    let n = space.len();
    let mut off_sigma = vec![true; n];
    for &p in sigma.points() {
        off_sigma[p.0] = false;
    }
    let dist_to_sigma: Vec<u32> = (0..n)
        .map(|v| {
            sigma
                .points()
                .iter()
                .map(|&s| space.distance(PointId(v), s).unwrap_or(u32::MAX))
                .min()
                .unwrap_or(u32::MAX)
        })
        .collect();
    let candidates: Vec<usize> = (0..n).filter(|&v| off_sigma[v]).collect();
    if candidates.is_empty() {
        return Err(Error::Construction(
            "the diametral geodesic touches every vertex; no avoiding curve exists".into(),
        ));
    }

    let is_tree = graph.is_tree();
    let threshold = Rational::from_integer(cfg.mesh as i64)
        + Rational::from_integer(58) * delta;
    let trials: Result<Vec<Trial>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = mix_seed(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut at = candidates[rng.random_range(0..candidates.len())];
            let steps = rng.random_range(4..=12);
            let mut curve = vec![PointId(at)];
            for _ in 0..steps {
                let open: Vec<usize> = graph
                    .neighbors(at)
                    .iter()
                    .copied()
                    .filter(|&w| off_sigma[w])
                    .collect();
                if !open.is_empty() {
                    at = open[rng.random_range(0..open.len())];
                }
                curve.push(PointId(at));
            }
            let extent = graph.projection_extent(&curve, &sigma)?;
            let r = curve.iter().map(|p| dist_to_sigma[p.0]).min().unwrap();
            let length = walk_length(&space, &curve)?;
            let mut trial = Trial::new(i, seed);
            trial.measured.insert("extent".into(), extent as f64);
            trial.measured.insert("distance".into(), r as f64);
            trial.measured.insert("curve_length".into(), length as f64);
            if is_tree {
                trial.checks.push(Check::gate(
                    "tree_extent_zero",
                    extent == 0,
                    format!("extent {extent} for a curve off the geodesic"),
                ));
            }
            if delta.is_integer() && delta.to_integer() == 0 {
                trial.bounds.insert("contraction_bound".into(), 0.0);
            } else if Rational::from_integer(r as i64) >= threshold {
                let bound = contraction_bound(cfg.mesh, delta, r, length, consts)?;
                trial.bounds.insert("contraction_bound".into(), bound);
                trial.checks.push(Check::gate(
                    "extent_le_bound",
                    (extent as f64) <= bound,
                    format!("extent {extent} vs bound {bound}"),
                ));
            } else {
                trial.checks.push(Check::pass(
                    "contraction_window",
                    format!(
                        "distance {r} below mesh + 58*delta = {threshold}; bound not asserted"
                    ),
                ));
            }
            Ok(trial.seal())
        })
        .collect();
    report.trials = trials?;
    Ok(report.seal(started))
}

/// Thin wrapper over the richness checker; the full record set lands in the
/// report's `extra` field.
pub fn run_richness(
    graph: &Graph,
    space_name: &str,
    thresholds: RichnessThresholds,
    seed: u64,
) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new("richness", space_name);
    let space = graph.metric();
    let endpoints = graph.proxy_boundary();
    let pool = build_geodesic_pool(graph, &endpoints)?;
    let rr = richness_check(&space, &pool, thresholds, seed)?;

    report.params.insert(
        "thresholds".into(),
        format!(
            "r0={};r1={};r2={};r3={};r4={}",
            thresholds.r0, thresholds.r1, thresholds.r2, thresholds.r3, thresholds.r4
        ),
    );
    let mut trial = Trial::new(0, seed);
    trial.params.insert(
        "verdict".into(),
        match rr.verdict {
            Verdict::Rich => "rich".into(),
            Verdict::NotRich { .. } => "not_rich".into(),
        },
    );
    trial
        .params
        .insert("sampled_condition1".into(), rr.sampled_condition1.to_string());
    trial
        .params
        .insert("sampled_condition2".into(), rr.sampled_condition2.to_string());
    trial.measured.insert("pool_size".into(), rr.pool_size as f64);
    trial.measured.insert("fitted_r1".into(), rr.fitted.r1 as f64);
    trial.measured.insert("fitted_r2".into(), rr.fitted.r2 as f64);
    trial.measured.insert("fitted_r3".into(), rr.fitted.r3 as f64);
    trial.measured.insert("fitted_r4".into(), rr.fitted.r4 as f64);
    report.trials.push(trial.seal());
    report.extra = Some(serde_json::to_value(&rr).map_err(|e| Error::Serde(e.to_string()))?);
    Ok(report.seal(started))
}

pub struct DeltaLengthConfig {
    pub lambda: Rational,
    pub c: Rational,
    pub mesh: Option<u32>,
    pub trials: usize,
    pub seed: u64,
}

/// Mesh-length diagnostics on random quasi-geodesics: DP value against the
/// walk length, mesh monotonicity, the enumeration reference on short
/// curves, and the taut replacement contract.
pub fn run_delta_length(
    graph: &Graph,
    space_name: &str,
    cfg: &DeltaLengthConfig,
) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new("delta-length", space_name);
    let space = graph.metric();
    if space.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    let mesh = cfg.mesh.unwrap_or_else(|| mesh_for(cfg.c));
    if mesh == 0 {
        return Err(Error::InvalidMesh(0));
    }
    report.params.insert("lambda".into(), cfg.lambda.to_string());
    report.params.insert("c".into(), cfg.c.to_string());
    report.params.insert("mesh".into(), mesh.to_string());

    let mesh_r = Rational::from_integer(mesh as i64);
    let trials: Result<Vec<Trial>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = mix_seed(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (u, v) = distinct_endpoints(&mut rng, space.len());
            let qg = random_quasi_geodesic(graph, &space, u, v, cfg.lambda, cfg.c, seed)?;
            let dl = delta_length(&space, &qg, mesh)?;
            let next = delta_length(&space, &qg, mesh + 1)?;
            let classical = walk_length(&space, &qg.points)?;
            let mut trial = Trial::new(i, seed);
            trial.params.insert("lambda".into(), cfg.lambda.to_string());
            trial.params.insert("c".into(), cfg.c.to_string());
            trial.params.insert("from".into(), u.0.to_string());
            trial.params.insert("to".into(), v.0.to_string());
            trial.measured.insert("mesh_length".into(), dl.value as f64);
            trial.measured.insert("witness_samples".into(), dl.witness.len() as f64);
            trial.measured.insert("classical_length".into(), classical as f64);
            trial.measured.insert("next_mesh_length".into(), next.value as f64);
            trial.checks.push(Check::gate(
                "le_classical",
                dl.value <= classical,
                format!("mesh-{mesh} length {} vs walk length {classical}", dl.value),
            ));
            trial.checks.push(Check::gate(
                "monotone_in_mesh",
                next.value <= dl.value,
                format!("mesh {} value {} vs mesh {} value {}", mesh + 1, next.value, mesh, dl.value),
            ));
            if qg.len() <= 12 {
                let oracle = enumerate_delta_length(&space, &qg, mesh)?;
                trial.checks.push(Check::gate(
                    "matches_enumeration",
                    dl.value == oracle,
                    format!("dp {} vs enumeration {oracle}", dl.value),
                ));
            }
            if mesh_r >= cfg.c + cfg.c {
                let l = Rational::from_integer(qg.interval_length());
                let lemma7 = Rational::from_integer(2) * cfg.lambda * l;
                trial.bounds.insert("interval_bound".into(), rational_to_f64(lemma7));
                trial.checks.push(Check::gate(
                    "mesh_length_le_interval_bound",
                    Rational::from_integer(dl.value as i64) <= lemma7,
                    format!("{} vs 2*lambda*l = {lemma7}", dl.value),
                ));
            }
            if dl.degenerate {
                trial.checks.push(Check::pass(
                    "taut_replacement",
                    "skipped: endpoints closer than the mesh".into(),
                ));
            } else if mesh_r >= cfg.c {
                let taut = taut_replacement(&space, graph, &qg, mesh)?;
                let ok = verify_quasi_geodesic(&space, &taut)?.is_none();
                let tlen = walk_length(&space, &taut.points)?;
                trial.checks.push(Check::gate(
                    "taut_replacement",
                    ok && tlen == dl.value,
                    format!(
                        "verifies={ok}, length {tlen} vs mesh-length value {}",
                        dl.value
                    ),
                ));
            }
            Ok(trial.seal())
        })
        .collect();
    report.trials = trials?;
    Ok(report.seal(started))
}
