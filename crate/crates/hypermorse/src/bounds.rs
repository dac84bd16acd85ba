//! Closed-form stability and displacement bounds.
//!
//! Every named bound lives here, parameterized by one [`MorseConstants`]
//! record so experiments can swap the configurable pieces (the exponent
//! denominator, the anti-Morse slope, the richness constants) without
//! touching call sites. The structural constants are fixed: the quadratic
//! coefficient is 312 = 4 * 78 and the contraction rate is ln2/19.

use std::f64::consts::LN_2;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rational_to_f64, Rational};

/// Quadratic coefficient of the zero-delta stability bound, 4 * 78.
pub const A1: i64 = 312;

/// Configurable constants shared by the bound evaluators.
///
/// `a2_exponent_denominator` selects between the two published forms of the
/// exponential term (38 from the contraction-rate derivation, 28 from the
/// headline statement). `a3` scales the logarithmic anti-Morse bound and is
/// advisory: no pass/fail decision depends on its magnitude. `r0..r4` are the
/// richness constants consumed by the displacement bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MorseConstants {
    pub a2_exponent_denominator: u32,
    pub a3: Rational,
    pub r0: Rational,
    pub r1: Rational,
    pub r2: Rational,
    pub r3: Rational,
    pub r4: Rational,
}

impl Default for MorseConstants {
    fn default() -> Self {
        MorseConstants {
            a2_exponent_denominator: 38,
            a3: Rational::from_integer(1),
            r0: Rational::zero(),
            r1: Rational::zero(),
            r2: Rational::zero(),
            r3: Rational::zero(),
            r4: Rational::zero(),
        }
    }
}

impl MorseConstants {
    /// Decay rate ln2/19 of the projection contraction bound.
    pub fn contraction_rate(&self) -> f64 {
        LN_2 / 19.0
    }

    /// Seed constant (delta/4) e^{-157 K / 2} of the contraction argument.
    pub fn c0(&self, delta: f64) -> f64 {
        delta / 4.0 * (-157.0 * self.contraction_rate() / 2.0).exp()
    }

    /// Coefficient multiplying delta inside the stability bound.
    fn a2_inner(&self) -> f64 {
        78.0 + (133.0 / LN_2) * (157.0 * LN_2 / self.a2_exponent_denominator as f64).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if self.a2_exponent_denominator != 38 && self.a2_exponent_denominator != 28 {
            return Err(Error::Domain(format!(
                "a2_exponent_denominator must be 38 or 28, got {}",
                self.a2_exponent_denominator
            )));
        }
        if !self.a3.is_positive() {
            return Err(Error::Domain("a3 must be positive".into()));
        }
        for (name, r) in [
            ("r0", &self.r0),
            ("r1", &self.r1),
            ("r2", &self.r2),
            ("r3", &self.r3),
            ("r4", &self.r4),
        ] {
            if r.is_negative() {
                return Err(Error::Domain(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines. Keys are the field names above
    /// (case-insensitive); values are rationals like `3/2`, integers, or
    /// finite decimals. `#` starts a comment. The fixed constants `a1` and
    /// `k` are rejected rather than silently ignored.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut out = MorseConstants::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("constants line {}: expected key = value", idx + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            let rat = |v: &str| -> Result<Rational> {
                parse_rational(v).map_err(|e| {
                    Error::Parse(format!("constants line {}: {e}", idx + 1))
                })
            };
            match key.as_str() {
                "a2_exponent_denominator" => {
                    let r = rat(value)?;
                    if !r.is_integer() {
                        return Err(Error::Parse(format!(
                            "constants line {}: denominator must be an integer",
                            idx + 1
                        )));
                    }
                    out.a2_exponent_denominator = r.to_integer() as u32;
                }
                "a3" => out.a3 = rat(value)?,
                "r0" => out.r0 = rat(value)?,
                "r1" => out.r1 = rat(value)?,
                "r2" => out.r2 = rat(value)?,
                "r3" => out.r3 = rat(value)?,
                "r4" => out.r4 = rat(value)?,
                "a1" | "k" => {
                    return Err(Error::Parse(format!(
                        "constants line {}: {key} is fixed and cannot be overridden",
                        idx + 1
                    )));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "constants line {}: unknown constant {other:?}",
                        idx + 1
                    )));
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }
}

/// Stability bound 4 lambda^2 (78 c + (78 + (133/ln2) e^{157 ln2 / D}) delta).
///
/// With delta = 0 this is exactly 312 lambda^2 c, evaluated in rational
/// arithmetic before conversion so the quadratic family tests see no
/// rounding. Requires lambda >= 1, c >= 0, delta >= 0.
pub fn morse_bound(lambda: Rational, c: Rational, delta: Rational, consts: &MorseConstants) -> f64 {
    if delta.is_zero() {
        return rational_to_f64(Rational::from_integer(A1) * lambda * lambda * c);
    }
    let l = rational_to_f64(lambda);
    4.0 * l * l * (78.0 * rational_to_f64(c) + consts.a2_inner() * rational_to_f64(delta))
}

/// Logarithmic lower-direction bound a3 (c + delta) ln lambda.
///
/// Only defined for lambda > 1; at lambda = 1 the log vanishes and the bound
/// carries no information, so that case is rejected as a domain error.
pub fn anti_morse_bound(
    lambda: Rational,
    c: Rational,
    delta: Rational,
    consts: &MorseConstants,
) -> Result<f64> {
    if lambda <= Rational::from_integer(1) {
        return Err(Error::Domain(format!(
            "anti-Morse bound needs lambda > 1, got {lambda}"
        )));
    }
    Ok(rational_to_f64(consts.a3) * rational_to_f64(c + delta) * rational_to_f64(lambda).ln())
}

/// Projection contraction bound for a curve avoiding a ball of radius
/// `radius` around a geodesic, with mesh `mesh` and mesh-length `length`.
///
/// Evaluates max((4 delta / mesh) e^{-K r / delta} (length + mesh), 8 delta)
/// where r rounds radius - mesh - 58 delta down to a multiple of 19 delta.
/// Since K = ln2/19, the exponential is exactly 2^{-m} for the rounded step
/// count m, so the whole bound is rational and is computed exactly.
///
/// delta = 0 short-circuits to 0: in a tree, a connected curve avoiding any
/// ball around a geodesic projects to a single vertex. Otherwise requires
/// radius >= mesh + 58 delta.
pub fn contraction_bound(
    mesh: u32,
    delta: Rational,
    radius: u32,
    length: u64,
    _consts: &MorseConstants,
) -> Result<f64> {
    if mesh == 0 {
        return Err(Error::InvalidMesh(0));
    }
    if delta.is_negative() {
        return Err(Error::Domain(format!("delta must be >= 0, got {delta}")));
    }
    if delta.is_zero() {
        return Ok(0.0);
    }
    let mesh_r = Rational::from_integer(mesh as i64);
    let radius_r = Rational::from_integer(radius as i64);
    let threshold = mesh_r + Rational::from_integer(58) * delta;
    if radius_r < threshold {
        return Err(Error::Domain(format!(
            "radius {radius} is below the contraction threshold {}",
            threshold
        )));
    }
    // r = m * 19 delta, so K r / delta = m ln2 and the decay factor is 2^-m.
    let m = ((radius_r - mesh_r - Rational::from_integer(58) * delta)
        / (Rational::from_integer(19) * delta))
        .floor()
        .to_integer() as u32;
    let floor_bound = Rational::from_integer(8) * delta;
    // First branch exceeds 8 delta iff length + mesh > 2 mesh 2^m; for large
    // m that is impossible, and checking in u128 avoids building a rational
    // with a 2^m denominator.
    let total = length as u128 + mesh as u128;
    let first_wins = m < 100 && total > 2 * (mesh as u128) << m;
    if !first_wins {
        return Ok(rational_to_f64(floor_bound));
    }
    // Here 2^m < total / (2 mesh) so mesh * 2^m fits comfortably in i64.
    let scaled_mesh = Rational::from_integer((mesh as i64) << m);
    let value = Rational::from_integer(4) * delta * Rational::from_integer(total as i64)
        / scaled_mesh;
    Ok(rational_to_f64(value))
}

/// Displacement bound min(R, H(lambda, c, 0) + c + lambda (c + 1)) for a
/// quasi-isometry of a tree ball of radius R. Exact rational evaluation.
pub fn prop1_bound(lambda: Rational, c: Rational, radius: u32, consts: &MorseConstants) -> f64 {
    let h = Rational::from_integer(A1) * lambda * lambda * c;
    let shifted = h + c + lambda * (c + Rational::from_integer(1));
    let r = Rational::from_integer(radius as i64);
    let _ = consts;
    rational_to_f64(if r < shifted { r } else { shifted })
}

/// Displacement bound max(r0, lambda (r3 + c + c1 ln lambda)) + r1 + r2 + r4
/// with c1 = c + delta, for quasi-isometries of geodesically rich spaces.
/// Requires lambda > 1.
pub fn thm3_bound(
    lambda: Rational,
    c: Rational,
    delta: Rational,
    consts: &MorseConstants,
) -> Result<f64> {
    if lambda <= Rational::from_integer(1) {
        return Err(Error::Domain(format!(
            "displacement bound needs lambda > 1, got {lambda}"
        )));
    }
    let l = rational_to_f64(lambda);
    let c1 = rational_to_f64(c + delta);
    let inner = l * (rational_to_f64(consts.r3) + rational_to_f64(c) + c1 * l.ln());
    let first = rational_to_f64(consts.r0).max(inner);
    Ok(first + rational_to_f64(consts.r1 + consts.r2 + consts.r4))
}

/// Displacement bound H(lambda, c, delta) + r2 for self-maps fixing the
/// proxy boundary pointwise.
pub fn remark4_bound(
    lambda: Rational,
    c: Rational,
    delta: Rational,
    consts: &MorseConstants,
) -> f64 {
    morse_bound(lambda, c, delta, consts) + rational_to_f64(consts.r2)
}
