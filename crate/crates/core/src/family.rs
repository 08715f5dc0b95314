//! The four hyperbolic-type metric families built from a base distance `d`
//! and a positive weight `F`:
//!
//! | family | value |
//! |--------|-------|
//! | Gehring–Osgood `j` | `½ log (1 + d/F(x)) (1 + d/F(y))` |
//! | Dovgoshey–Hariri–Vuorinen `h_c` | `log (1 + c d / √(F(x)F(y)))` |
//! | Nikolov–Andreev `i` | `2 log ((F(x) + F(y) + d) / (2√(F(x)F(y))))` |
//! | Ibragimov `v` | `2 log ((d + max{F(x), F(y)}) / √(F(x)F(y)))` |
//!
//! Every value is computed as `log1p` of a nonnegative quantity whose
//! numerator is free of cancellation, so `d/F` down to `1e-6` and below keeps
//! full relative precision. Evaluation is symmetric in `(F(x), F(y))`
//! bit for bit.
//!
//! Besides the closed forms this module carries the near-field upper and
//! global lower envelopes of each family (as functions of `r = d(x, y)` and
//! `F(x)` only), the distance bounds obtained by inverting the lower
//! envelopes, the multiplicative comparison functionals `λ`, `ν`, `μ`, and
//! the Gehring–Osgood equality probe.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::space::TOL_ABS;

/// Tagged choice of metric family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MetricFamily {
    #[serde(rename = "go")]
    GehringOsgood,
    #[serde(rename = "dhv")]
    Dhv { c: f64 },
    #[serde(rename = "na")]
    NikolovAndreev,
    #[serde(rename = "ibr")]
    Ibragimov,
}

impl MetricFamily {
    /// DHV family with parameter `c > 0`.
    pub fn dhv(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(MetricFamily::Dhv { c })
        } else {
            Err(domain(format!(
                "DHV parameter c must be positive and finite, got {c}"
            )))
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MetricFamily::GehringOsgood => "go",
            MetricFamily::Dhv { .. } => "dhv",
            MetricFamily::NikolovAndreev => "na",
            MetricFamily::Ibragimov => "ibr",
        }
    }

    /// Whether the family is known to satisfy the triangle inequality (with
    /// 1-Lipschitz weights for GO, DHV and NA). False for DHV with `c < 2`.
    pub fn metricity_certified(&self) -> bool {
        match self {
            MetricFamily::Dhv { c } => *c >= 2.0,
            _ => true,
        }
    }

    /// Whether metricity and hyperbolicity claims need 1-Lipschitz weights.
    pub fn requires_lipschitz(&self) -> bool {
        !matches!(self, MetricFamily::Ibragimov)
    }

    /// Certified Gromov constant: `¼ log 24`, `log(2 + 1/c)`, `log 9`, `log 4`.
    pub fn certified_delta(&self) -> f64 {
        match self {
            MetricFamily::GehringOsgood => 24f64.ln() / 4.0,
            MetricFamily::Dhv { c } => (2.0 + 1.0 / c).ln(),
            MetricFamily::NikolovAndreev => 9f64.ln(),
            MetricFamily::Ibragimov => 4f64.ln(),
        }
    }

    /// Factor `K` in `Φ(x,z)Φ(y,w) <= K max{Φ(x,w)Φ(y,z), Φ(x,y)Φ(z,w)}` for
    /// the comparison functional `Φ`: `((2c+1)/c)²` for DHV, 9 for NA, 4 for IBR.
    pub fn multiplicative_factor(&self) -> Result<f64> {
        match self {
            MetricFamily::GehringOsgood => Err(Error::UnsupportedFamily("GO".into())),
            MetricFamily::Dhv { c } => Ok(((2.0 * c + 1.0) / c).powi(2)),
            MetricFamily::NikolovAndreev => Ok(9.0),
            MetricFamily::Ibragimov => Ok(4.0),
        }
    }

    /// Limit of the dilatation envelope ratio as `r -> 0`.
    pub fn dilatation_limit(&self, variant: Variant) -> f64 {
        match (self, variant) {
            (MetricFamily::GehringOsgood | MetricFamily::Dhv { .. }, _) => 1.0,
            (MetricFamily::NikolovAndreev, _) => 3.0,
            (MetricFamily::Ibragimov, Variant::Fine) => 2.5,
            (MetricFamily::Ibragimov, Variant::Coarse) => 5.0,
        }
    }
}

impl fmt::Display for MetricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricFamily::Dhv { c } => write!(f, "dhv(c={c})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// Which Ibragimov envelope to use: the fine one needs 1-Lipschitz weights,
/// the coarse one holds for any positive weights. Ignored by other families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Fine,
    Coarse,
}

fn check_weight(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "weight must be positive and finite, got {f}"
        )))
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "distance must be nonnegative and finite, got {d}"
        )))
    }
}

/// Family value for distance `d` and weights `fx`, `fy`, without argument checks.
#[inline]
pub fn rho_unchecked(family: MetricFamily, d: f64, fx: f64, fy: f64) -> f64 {
    match family {
        MetricFamily::GehringOsgood => 0.5 * ((d / fx).ln_1p() + (d / fy).ln_1p()),
        MetricFamily::Dhv { c } => (c * d / (fx * fy).sqrt()).ln_1p(),
        MetricFamily::NikolovAndreev => {
            // F(x) + F(y) - 2√(F(x)F(y)) = (√F(x) - √F(y))²
            let gap = fx.sqrt() - fy.sqrt();
            let g = (fx * fy).sqrt();
            2.0 * ((gap * gap + d) / (2.0 * g)).ln_1p()
        }
        MetricFamily::Ibragimov => {
            let (hi, lo) = if fx >= fy { (fx, fy) } else { (fy, fx) };
            let s = hi.sqrt();
            // max - √(F(x)F(y)) = √max (√max - √min)
            let excess = s * (s - lo.sqrt());
            2.0 * ((d + excess) / (hi * lo).sqrt()).ln_1p()
        }
    }
}

/// Family value `rho(x, y)` from `d = d(x, y)`, `fx = F(x)`, `fy = F(y)`.
pub fn rho(family: MetricFamily, d: f64, fx: f64, fy: f64) -> Result<f64> {
    check_distance(d)?;
    check_weight(fx)?;
    check_weight(fy)?;
    Ok(rho_unchecked(family, d, fx, fy))
}

/// Comparison functional, without argument checks. `None` for GO.
#[inline]
pub fn functional_unchecked(family: MetricFamily, d: f64, fx: f64, fy: f64) -> Option<f64> {
    match family {
        MetricFamily::GehringOsgood => None,
        MetricFamily::Dhv { c } => Some(c * d + (fx * fy).sqrt()),
        MetricFamily::NikolovAndreev => Some(fx + fy + d),
        MetricFamily::Ibragimov => Some(d + fx.max(fy)),
    }
}

/// `λ = c d + √(F(x)F(y))` (DHV), `ν = F(x) + F(y) + d` (NA) or
/// `μ = d + max{F(x), F(y)}` (IBR).
pub fn comparison_functional(family: MetricFamily, d: f64, fx: f64, fy: f64) -> Result<f64> {
    check_distance(d)?;
    check_weight(fx)?;
    check_weight(fy)?;
    functional_unchecked(family, d, fx, fy).ok_or_else(|| Error::UnsupportedFamily("GO".into()))
}

/// Upper bound on `rho(x, y)` valid whenever `d(x, y) = r < F(x)` and `F` is
/// 1-Lipschitz (so `F(y) >= F(x) - r`).
pub fn bound_upper_near(family: MetricFamily, r: f64, fx: f64) -> Result<f64> {
    check_distance(r)?;
    check_weight(fx)?;
    if r >= fx {
        return Err(domain(format!(
            "near-field bound needs r < F(x), got r = {r}, F(x) = {fx}"
        )));
    }
    let t = r / fx;
    Ok(match family {
        MetricFamily::GehringOsgood => 0.5 * (t.ln_1p() + (r / (fx - r)).ln_1p()),
        MetricFamily::Dhv { c } => (c * r / (fx * (fx - r)).sqrt()).ln_1p(),
        // 2 log((F + r) / √(F(F - r)))
        MetricFamily::NikolovAndreev => 2.0 * t.ln_1p() - (-t).ln_1p(),
        // log((F + 2r)² / (F(F - r)))
        MetricFamily::Ibragimov => 2.0 * (2.0 * t).ln_1p() - (-t).ln_1p(),
    })
}

/// Lower bound on `rho(x, y)` at `d(x, y) = r`, valid for every `r >= 0`.
///
/// The Ibragimov coarse variant needs no Lipschitz hypothesis; everything
/// else assumes 1-Lipschitz weights.
pub fn bound_lower_global(family: MetricFamily, r: f64, fx: f64, variant: Variant) -> Result<f64> {
    check_distance(r)?;
    check_weight(fx)?;
    Ok(match (family, variant) {
        (MetricFamily::GehringOsgood, _) => (r / (fx + r)).ln_1p(),
        (MetricFamily::Dhv { c }, _) => (c * r / (fx * (fx + r)).sqrt()).ln_1p(),
        (MetricFamily::NikolovAndreev, _) => 2.0 * (r / (2.0 * (fx * (fx + r)).sqrt())).ln_1p(),
        (MetricFamily::Ibragimov, Variant::Fine) => 2.0 * (r / (fx * (fx + r)).sqrt()).ln_1p(),
        (MetricFamily::Ibragimov, Variant::Coarse) => (r / fx).ln_1p(),
    })
}

/// Upper bound on `d(x, y)` implied by the metric value `rho_val = rho(x, y)`.
///
/// For GO the bound only exists while `e^rho < 2`, i.e. `rho < log 2`.
pub fn invert_distance_bound(
    family: MetricFamily,
    rho_val: f64,
    fx: f64,
    variant: Variant,
) -> Result<f64> {
    if !(rho_val.is_finite() && rho_val >= 0.0) {
        return Err(domain(format!(
            "metric value must be nonnegative and finite, got {rho_val}"
        )));
    }
    check_weight(fx)?;
    Ok(match (family, variant) {
        (MetricFamily::GehringOsgood, _) => {
            let e = rho_val.exp_m1();
            if e >= 1.0 {
                return Err(domain(format!(
                    "GO inversion needs rho < log 2, got {rho_val}"
                )));
            }
            fx * e / (1.0 - e)
        }
        (MetricFamily::Dhv { c }, _) => {
            let h = rho_val.exp_m1();
            fx / (2.0 * c * c) * h * (h + (h * h + 4.0 * c * c).sqrt())
        }
        (MetricFamily::NikolovAndreev, _) => {
            let e = (rho_val / 2.0).exp_m1();
            2.0 * fx * e * (e + (e * e + 1.0).sqrt())
        }
        (MetricFamily::Ibragimov, Variant::Fine) => {
            let e = (rho_val / 2.0).exp_m1();
            0.5 * fx * e * (e + (e * e + 4.0).sqrt())
        }
        (MetricFamily::Ibragimov, Variant::Coarse) => fx * rho_val.exp_m1(),
    })
}

/// Result of [`go_equality_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityProbe {
    /// `j(x,z) + j(z,y) - j(x,y)`.
    pub additivity_defect: f64,
    /// `d(x,y) = d(x,z) + d(z,y)`, `F(z) = F(x) + d(x,z)`, `F(z) = F(y) + d(z,y)`.
    pub conditions: [bool; 3],
}

/// Compares the Gehring–Osgood triangle slack at `(x, z, y)` with the three
/// conditions under which the triangle inequality is an equality.
pub fn go_equality_probe(
    d_xy: f64,
    d_xz: f64,
    d_zy: f64,
    fx: f64,
    fy: f64,
    fz: f64,
) -> Result<EqualityProbe> {
    for d in [d_xy, d_xz, d_zy] {
        check_distance(d)?;
    }
    for f in [fx, fy, fz] {
        check_weight(f)?;
    }
    let go = MetricFamily::GehringOsgood;
    let additivity_defect = rho_unchecked(go, d_xz, fx, fz) + rho_unchecked(go, d_zy, fz, fy)
        - rho_unchecked(go, d_xy, fx, fy);
    let close = |a: f64, b: f64| (a - b).abs() <= TOL_ABS;
    Ok(EqualityProbe {
        additivity_defect,
        conditions: [
            close(d_xy, d_xz + d_zy),
            close(fz, fx + d_xz),
            close(fz, fy + d_zy),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ALL: [MetricFamily; 4] = [
        MetricFamily::GehringOsgood,
        MetricFamily::Dhv { c: 2.0 },
        MetricFamily::NikolovAndreev,
        MetricFamily::Ibragimov,
    ];

    #[test]
    fn closed_form_values() {
        let go = rho(MetricFamily::GehringOsgood, 1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(go, 0.5 * 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(go, 0.549306, epsilon = 1e-6);

        let dhv = rho(MetricFamily::Dhv { c: 2.0 }, 3.0, 1.0, 4.0).unwrap();
        assert_relative_eq!(dhv, 4f64.ln(), max_relative = 1e-14);

        let na = rho(MetricFamily::NikolovAndreev, 2.0, 1.0, 3.0).unwrap();
        assert_relative_eq!(na, 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(na, 1.098612, epsilon = 1e-6);

        let ibr = rho(MetricFamily::Ibragimov, 1.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(ibr, 4.5f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(ibr, 1.504077, epsilon = 1e-6);
    }

    #[test]
    fn rewritten_forms_match_textbook_forms() {
        for &(d, fx, fy) in &[
            (0.3f64, 0.7f64, 1.9f64),
            (5.0, 0.01, 0.02),
            (1e-7, 1.0, 1.0 + 1e-7),
            (2.0, 3.0, 1.0),
        ] {
            let g: f64 = (fx * fy).sqrt();
            let na = 2.0 * ((fx + fy + d) / (2.0 * g)).ln();
            let ibr = 2.0 * ((d + fx.max(fy)) / g).ln();
            let got_na = rho_unchecked(MetricFamily::NikolovAndreev, d, fx, fy);
            let got_ibr = rho_unchecked(MetricFamily::Ibragimov, d, fx, fy);
            assert_relative_eq!(got_na, na, epsilon = 1e-14, max_relative = 1e-12);
            assert_relative_eq!(got_ibr, ibr, epsilon = 1e-14, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_distance_equal_weights_is_zero() {
        for fam in ALL {
            assert_eq!(rho(fam, 0.0, 1.7, 1.7).unwrap(), 0.0, "{fam}");
        }
        assert!(rho(MetricFamily::NikolovAndreev, 0.0, 1.0, 2.0).unwrap() > 0.0);
        assert!(rho(MetricFamily::Ibragimov, 0.0, 1.0, 2.0).unwrap() > 0.0);
        assert_eq!(
            rho(MetricFamily::GehringOsgood, 0.0, 1.0, 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn nonpositive_weight_is_a_domain_error() {
        for fam in ALL {
            assert!(matches!(rho(fam, 1.0, 0.0, 1.0), Err(Error::Domain(_))));
            assert!(matches!(rho(fam, 1.0, 1.0, -2.0), Err(Error::Domain(_))));
        }
        assert!(MetricFamily::dhv(0.0).is_err());
        assert!(MetricFamily::dhv(f64::NAN).is_err());
    }

    #[test]
    fn comparison_functionals() {
        assert_eq!(
            comparison_functional(MetricFamily::NikolovAndreev, 2.0, 1.0, 3.0).unwrap(),
            6.0
        );
        assert_eq!(
            comparison_functional(MetricFamily::Ibragimov, 0.0, 1.0, 1.0).unwrap(),
            1.0
        );
        assert_eq!(
            comparison_functional(MetricFamily::Dhv { c: 2.0 }, 3.0, 1.0, 4.0).unwrap(),
            8.0
        );
        assert!(matches!(
            comparison_functional(MetricFamily::GehringOsgood, 1.0, 1.0, 1.0),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn upper_envelope_values() {
        assert_eq!(
            bound_upper_near(MetricFamily::GehringOsgood, 0.0, 1.0).unwrap(),
            0.0
        );
        assert_relative_eq!(
            bound_upper_near(MetricFamily::Ibragimov, 0.5, 1.0).unwrap(),
            8f64.ln(),
            max_relative = 1e-14
        );
        let na = bound_upper_near(MetricFamily::NikolovAndreev, 0.5, 1.0).unwrap();
        assert_relative_eq!(na, 2.0 * (1.5 / 0.5f64.sqrt()).ln(), max_relative = 1e-14);
        assert_relative_eq!(na, 1.50408, epsilon = 1e-5);
        assert!(bound_upper_near(MetricFamily::Ibragimov, 1.0, 1.0).is_err());
    }

    #[test]
    fn lower_envelope_values() {
        for fam in ALL {
            assert_eq!(
                bound_lower_global(fam, 0.0, 1.3, Variant::Fine).unwrap(),
                0.0
            );
        }
        let go = bound_lower_global(MetricFamily::GehringOsgood, 1.0, 1.0, Variant::Fine).unwrap();
        assert_relative_eq!(go, 1.5f64.ln(), max_relative = 1e-14);
        let coarse =
            bound_lower_global(MetricFamily::Ibragimov, 1.0, 1.0, Variant::Coarse).unwrap();
        assert_relative_eq!(coarse, 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn inversion_values() {
        let go =
            invert_distance_bound(MetricFamily::GehringOsgood, 0.5, 1.0, Variant::Fine).unwrap();
        let e = 0.5f64.exp();
        assert_relative_eq!(go, (e - 1.0) / (2.0 - e), max_relative = 1e-14);
        assert_relative_eq!(go, 1.84674, epsilon = 1e-5);
        let coarse =
            invert_distance_bound(MetricFamily::Ibragimov, 2f64.ln(), 1.0, Variant::Coarse)
                .unwrap();
        assert_relative_eq!(coarse, 1.0, max_relative = 1e-14);
        let tiny =
            invert_distance_bound(MetricFamily::NikolovAndreev, 1e-12, 1.0, Variant::Fine).unwrap();
        assert!(tiny < 1e-11);
        assert!(
            invert_distance_bound(MetricFamily::GehringOsgood, 2f64.ln(), 1.0, Variant::Fine)
                .is_err()
        );
        assert!(
            invert_distance_bound(MetricFamily::GehringOsgood, 0.69, 1.0, Variant::Fine).is_ok()
        );
    }

    #[test]
    fn equality_probe_vertical_triple() {
        // x = (0,4), y = (0,1), z = (0,2) over the half-plane, F = height.
        let p = go_equality_probe(3.0, 2.0, 1.0, 4.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(
            p.additivity_defect,
            0.5 * (9f64.ln() - 7f64.ln()),
            epsilon = 1e-12
        );
        assert_eq!(p.conditions, [true, false, true]);
    }

    #[test]
    fn equality_probe_degenerate_and_line() {
        // x = z: the triangle is trivially additive.
        let p = go_equality_probe(2.0, 0.0, 2.0, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(p.additivity_defect, 0.0);
        assert_eq!(p.conditions, [true, true, false]);
        // x = 1, z = 2, y = 4 on the line with M = {0}.
        let p = go_equality_probe(3.0, 1.0, 2.0, 1.0, 4.0, 2.0).unwrap();
        assert_eq!(p.conditions, [true, true, false]);
        assert!(p.additivity_defect > 0.0);
    }

    #[test]
    fn certified_constants() {
        assert_relative_eq!(
            MetricFamily::GehringOsgood.certified_delta(),
            0.794513,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            MetricFamily::Dhv { c: 2.0 }.certified_delta(),
            0.916291,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            MetricFamily::NikolovAndreev.certified_delta(),
            2.197225,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            MetricFamily::Ibragimov.certified_delta(),
            1.386294,
            epsilon = 1e-6
        );
        assert!(!MetricFamily::Dhv { c: 1.0 }.metricity_certified());
        assert_eq!(
            MetricFamily::Dhv { c: 1.0 }
                .multiplicative_factor()
                .unwrap(),
            9.0
        );
    }

    #[test]
    fn serde_tags() {
        let json = serde_json::to_string(&MetricFamily::Dhv { c: 0.5 }).unwrap();
        assert_eq!(json, r#"{"family":"dhv","c":0.5}"#);
        let back: MetricFamily = serde_json::from_str(r#"{"family":"na"}"#).unwrap();
        assert_eq!(back, MetricFamily::NikolovAndreev);
    }
}
