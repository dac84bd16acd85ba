//! Four-point and thin-triangle constants across the built-in space
//! families. Trees sit at exactly zero, grids drift upward with size, and
//! heptagonal patches plateau once a few layers are present.

use hypermorse::graphs::{build_control, build_tessellation_patch, build_tree_ball, ControlKind};
use hypermorse::metric::{thin_triangle_delta, QuadrupleScan, TriangleScan};

fn main() -> hypermorse::Result<()> {
    let spaces = [
        ("tree ball d=3 R=4", build_tree_ball(3, 4)?),
        ("tree ball d=4 R=3", build_tree_ball(4, 3)?),
        ("path n=30", build_control(ControlKind::Path, 30)?),
        ("cycle n=12", build_control(ControlKind::Cycle, 12)?),
        ("grid 4x4", build_control(ControlKind::Grid, 4)?),
        ("grid 8x8", build_control(ControlKind::Grid, 8)?),
        ("{7,3} patch, 2 layers", build_tessellation_patch(7, 3, 2)?),
        ("{7,3} patch, 3 layers", build_tessellation_patch(7, 3, 3)?),
    ];
    println!("{:<24} {:>6} {:>10} {:>12}", "space", "points", "four-point", "thin-triangle");
    for (name, graph) in spaces {
        let space = graph.metric();
        let four = space.four_point_delta_with(QuadrupleScan::Exhaustive { max_points: 500 })?;
        let thin = thin_triangle_delta(&space, &graph, TriangleScan::auto(space.len(), 1))?;
        println!("{:<24} {:>6} {:>10} {:>12}", name, space.len(), format!("{}", four.as_f64()), thin);
    }
    Ok(())
}
