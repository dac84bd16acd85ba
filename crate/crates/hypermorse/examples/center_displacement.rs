//! A self-map of a tree ball that fixes the outer boundary pointwise yet
//! moves the center: descend the center toward a marked boundary direction
//! and stretch the displaced segment back out. The displacement lambda c / 2
//! stays below both displacement bounds.

use hypermorse::bounds::{prop1_bound, thm3_bound, MorseConstants};
use hypermorse::graphs::build_tree_ball;
use hypermorse::metric::PointId;
use hypermorse::quasi_isometries::{
    ball_center_shift, displacement, fixes_proxy_boundary, verify_quasi_isometry,
};
use hypermorse::rational::Rational;

fn main() -> hypermorse::Result<()> {
    let radius = 10u32;
    let ball = build_tree_ball(3, radius as usize)?;
    let space = ball.metric();
    let boundary = ball.proxy_boundary();
    let consts = MorseConstants::default();
    println!("3-regular ball of radius {radius}: {} points, {} boundary leaves\n", space.len(), boundary.len());
    println!("{:>6} {:>3} {:>12} {:>12} {:>12}", "lambda", "c", "displacement", "prop1 bound", "thm3 bound");
    for (lambda, c) in [(2i64, 2i64), (4, 2), (6, 2), (4, 4)] {
        let map = ball_center_shift(&ball, PointId(0), lambda, c)?;
        assert!(verify_quasi_isometry(&space, &map)?.is_none());
        assert!(fixes_proxy_boundary(&space, &map, &boundary, 0)?);
        let disp = displacement(&space, &map, PointId(0))?;
        let lam = Rational::from_integer(lambda);
        let cc = Rational::from_integer(c);
        let p1 = prop1_bound(lam, cc, radius, &consts);
        let t3 = thm3_bound(lam, cc, Rational::from_integer(0), &consts)?;
        println!("{:>6} {:>3} {:>12} {:>12} {:>12.2}", lambda, c, disp, p1, t3);
    }
    println!("\neach map verifies as a quasi-isometry and fixes all leaves exactly");
    Ok(())
}
