//! Geodesic richness asks two things of a space: far-apart point pairs are
//! joined by pool geodesics passing near both without drifting, and every
//! point sits near an entire pool geodesic. A path fails the first test
//! badly; a tree ball passes both with room to spare.

use hypermorse::graphs::{build_control, build_tree_ball, ControlKind, Graph};
use hypermorse::richness::{build_geodesic_pool, richness_check, RichnessThresholds, Verdict};

fn inspect(name: &str, graph: &Graph) -> hypermorse::Result<()> {
    let space = graph.metric();
    let pool = build_geodesic_pool(graph, &graph.proxy_boundary())?;
    let report = richness_check(&space, &pool, RichnessThresholds::default(), 11)?;
    println!(
        "{name}: pool of {} geodesics, fitted constants (r1={}, r2={}, r3={}, r4={})",
        report.pool_size, report.fitted.r1, report.fitted.r2, report.fitted.r3, report.fitted.r4
    );
    match &report.verdict {
        Verdict::Rich => println!("  verdict: rich at the default thresholds\n"),
        Verdict::NotRich { condition1_witnesses, condition2_witnesses } => {
            println!(
                "  verdict: not rich ({} pair witnesses, {} coverage witnesses)",
                condition1_witnesses.len(),
                condition2_witnesses.len()
            );
            if let Some(w) = condition1_witnesses.first() {
                println!(
                    "  e.g. pair ({}, {}): best pool geodesic drifts {} from a direct route\n",
                    w.p.0, w.q.0, w.drift
                );
            }
        }
    }
    Ok(())
}

fn main() -> hypermorse::Result<()> {
    inspect("path on 20 vertices", &build_control(ControlKind::Path, 20)?)?;
    inspect("3-regular tree ball R=5", &build_tree_ball(3, 5)?)?;
    Ok(())
}
