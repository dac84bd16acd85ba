//! Random quasi-geodesic trials through the experiment driver: every trial
//! measures Morse and anti-Morse distances against the canonical geodesic
//! and gates the neighborhood bound plus the mesh-length and replacement
//! invariants.

use hypermorse::bounds::MorseConstants;
use hypermorse::experiments::{run_morse, MorseConfig};
use hypermorse::graphs::{build_tessellation_patch, build_tree_ball};
use hypermorse::rational::Rational;

fn main() -> hypermorse::Result<()> {
    let consts = MorseConstants::default();
    let spaces = [
        ("tree:d=3,R=4", build_tree_ball(3, 4)?),
        ("tess:p=7,q=3,layers=3", build_tessellation_patch(7, 3, 3)?),
    ];
    for (name, graph) in spaces {
        let cfg = MorseConfig {
            lambda: Rational::from_integer(2),
            c: Rational::from_integer(2),
            trials: 30,
            seed: 7,
            extremal: false,
        };
        let report = run_morse(&graph, name, &cfg, &consts)?;
        let worst = report
            .trials
            .iter()
            .map(|t| t.measured["morse"])
            .fold(0.0f64, f64::max);
        let bound = report.trials[0].bounds["morse_bound"];
        println!(
            "{name}: {} trials at (2,2), delta {}, worst morse {worst}, bound {bound}, all checks {}",
            report.trials.len(),
            report.params["delta"],
            if report.pass { "pass" } else { "FAIL" },
        );
        for t in report.trials.iter().take(5) {
            println!(
                "  trial {:>2}: {} -> {}, morse {}, anti {}, mesh length {}",
                t.index,
                t.params["from"],
                t.params["to"],
                t.measured["morse"],
                t.measured["anti_morse"],
                t.measured["delta_length"],
            );
        }
    }
    Ok(())
}
