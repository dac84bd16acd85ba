//! Nearest-point projection onto a geodesic contracts distant sets: rings
//! at growing distance from a diametral geodesic in a heptagonal patch
//! project into shrinking windows, and in a tree every avoiding curve
//! projects to a single vertex.

use hypermorse::bounds::MorseConstants;
use hypermorse::experiments::{run_contraction, ContractionConfig};
use hypermorse::graphs::{build_tessellation_patch, build_tree_ball};
use hypermorse::metric::PointId;

fn main() -> hypermorse::Result<()> {
    let patch = build_tessellation_patch(7, 3, 4)?;
    let space = patch.metric();
    let n = space.len();
    let diam = space.diameter();
    let (mut a, mut b) = (PointId(0), PointId(0));
    'outer: for x in 0..n {
        for y in (x + 1)..n {
            if space.distance(PointId(x), PointId(y))? == diam {
                a = PointId(x);
                b = PointId(y);
                break 'outer;
            }
        }
    }
    let sigma = patch.canonical_geodesic(a, b)?;
    let dist: Vec<u32> = (0..n)
        .map(|v| {
            sigma
                .points()
                .iter()
                .map(|&s| space.distance(PointId(v), s).unwrap())
                .min()
                .unwrap()
        })
        .collect();
    println!("heptagonal patch, 4 layers: geodesic of length {}\n", sigma.length());
    println!("{:>9} {:>10} {:>17}", "distance", "ring size", "projection extent");
    let maxd = *dist.iter().max().unwrap();
    for t in 1..=maxd {
        let ring: Vec<PointId> = (0..n).filter(|&v| dist[v] == t).map(PointId).collect();
        let extent = patch.projection_extent(&ring, &sigma)?;
        println!("{:>9} {:>10} {:>17}", t, ring.len(), extent);
    }

    let ball = build_tree_ball(3, 5)?;
    let cfg = ContractionConfig { mesh: 1, trials: 12, seed: 2 };
    let report = run_contraction(&ball, "tree:d=3,R=5", &cfg, &MorseConstants::default())?;
    let worst = report
        .trials
        .iter()
        .map(|t| t.measured["extent"] as u32)
        .max()
        .unwrap();
    println!(
        "\ntree ball: {} random curves off the diametral geodesic, largest extent {worst}",
        report.trials.len()
    );
    Ok(())
}
