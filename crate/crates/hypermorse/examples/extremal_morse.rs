//! The tight quasi-geodesic construction: a sawtooth over a path that
//! realizes Morse distance lambda^2 c / 2 exactly, against the general bound
//! of 312 lambda^2 c on trees.

use hypermorse::bounds::{morse_bound, MorseConstants};
use hypermorse::graphs::{build_control, ControlKind};
use hypermorse::quasi_geodesics::{extremal_example, morse_distance, verify_quasi_geodesic};
use hypermorse::rational::Rational;

fn main() -> hypermorse::Result<()> {
    let consts = MorseConstants::default();
    println!("{:>6} {:>3} {:>9} {:>10} {:>12}", "lambda", "c", "measured", "predicted", "tree bound");
    for (lambda, c) in [(2i64, 2i64), (4, 2), (2, 4), (6, 2), (4, 4)] {
        let depth = (lambda * lambda * c / 2) as usize;
        let path = build_control(ControlKind::Path, depth + 1)?;
        let space = path.metric();
        let qg = extremal_example(lambda, c, &path)?;
        assert!(verify_quasi_geodesic(&space, &qg)?.is_none());
        let sigma = path.canonical_geodesic(qg.first_point(), qg.last_point())?;
        let measured = morse_distance(&space, &qg, &sigma)?;
        let bound = morse_bound(
            Rational::from_integer(lambda),
            Rational::from_integer(c),
            Rational::from_integer(0),
            &consts,
        );
        println!("{:>6} {:>3} {:>9} {:>10} {:>12}", lambda, c, measured, depth, bound);
    }
    println!("\nthe sawtooth walks the first lambda^2 c / 2 edges out and back,");
    println!("so its farthest sample sits exactly that far from the geodesic");
    Ok(())
}
