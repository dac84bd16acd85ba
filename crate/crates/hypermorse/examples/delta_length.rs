//! Mesh length of a backtracking curve: the supremum of endpoint-distance
//! sums over subdivisions whose steps are at least the mesh. Small meshes
//! see every wiggle; larger meshes smooth them away. The taut replacement
//! rebuilds the curve through the maximizing subdivision.

use hypermorse::graphs::{build_tree_ball, Graph};
use hypermorse::metric::PointId;
use hypermorse::quasi_geodesics::{
    delta_length, enumerate_delta_length, taut_replacement, verify_quasi_geodesic, QuasiGeodesic,
};
use hypermorse::rational::parse_rational;

fn main() -> hypermorse::Result<()> {
    let ball = build_tree_ball(3, 4)?;
    let space = ball.metric();

    // out three edges, back two, out four more
    let walk = wobble(&ball, PointId(0));
    let qg = QuasiGeodesic::from_walk(walk, parse_rational("2")?, parse_rational("2")?)?;
    println!(
        "curve with {} samples from {} to {}, walk length {}",
        qg.len(),
        qg.first_point().0,
        qg.last_point().0,
        qg.len() - 1
    );

    for mesh in 1..=5u32 {
        let dl = delta_length(&space, &qg, mesh)?;
        let oracle = enumerate_delta_length(&space, &qg, mesh)?;
        println!(
            "mesh {mesh}: value {:>2} (reference {:>2}), witness keeps {} of {} samples",
            dl.value,
            oracle,
            dl.witness.len(),
            qg.len(),
        );
    }

    let mesh = 4;
    let taut = taut_replacement(&space, &ball, &qg, mesh)?;
    let classical: u64 = taut
        .points
        .windows(2)
        .map(|w| space.distance(w[0], w[1]).unwrap() as u64)
        .sum();
    println!(
        "\ntaut replacement at mesh {mesh}: {} samples, constants ({}, {}), length {} = mesh value {}",
        taut.len(),
        taut.lambda,
        taut.c,
        classical,
        delta_length(&space, &qg, mesh)?.value,
    );
    assert!(verify_quasi_geodesic(&space, &taut)?.is_none());
    Ok(())
}

fn wobble(ball: &Graph, start: PointId) -> Vec<PointId> {
    let mut walk = vec![start];
    let mut path = vec![start];
    let descend = |walk: &mut Vec<PointId>, path: &mut Vec<PointId>, steps: usize| {
        for _ in 0..steps {
            let at = *path.last().unwrap();
            let next = *ball
                .neighbors(at.0)
                .iter()
                .find(|&&w| walk.iter().all(|p| p.0 != w))
                .unwrap();
            path.push(PointId(next));
            walk.push(PointId(next));
        }
    };
    descend(&mut walk, &mut path, 3);
    for _ in 0..2 {
        path.pop();
        walk.push(*path.last().unwrap());
    }
    descend(&mut walk, &mut path, 3);
    walk
}
