//! Whether a plane curve is Cremona equivalent to a smooth plane curve of a
//! given degree, decided from its birational invariants.

use serde::{Deserialize, Serialize};

use super::classify::classify;
use super::{Case, Kind};
use crate::error::Result;
use crate::systems::{adjoint_chain, arithmetic_genus, is_line_case, PlaneSystem, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothVerdict {
    True,
    False,
    /// Degree `2 mod 3` between 9 and 28 in the ruled case.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothModelReport {
    pub verdict: SmoothVerdict,
    pub d: i64,
    pub m: i64,
    pub alpha: i64,
    pub genus: i64,
    pub expected_m: i64,
    pub expected_alpha: i64,
    pub expected_genus: i64,
    pub line_case: bool,
}

/// Dimension of plane curves of degree `d - 3[d/3]`.
fn expected_alpha(d: i64) -> i64 {
    match d.rem_euclid(3) {
        0 => 0,
        1 => 2,
        _ => 5,
    }
}

pub fn smooth_model_test(l: &PlaneSystem, d: i64) -> Result<SmoothModelReport> {
    let sys: System = l.unloaded()?.into();
    let genus = arithmetic_genus(&sys)?;
    let line_case = l.degree <= 0 || is_line_case(&sys)?;
    let (m, alpha) = if line_case {
        (0, -1)
    } else {
        let c = adjoint_chain(&sys)?;
        (c.m, c.alpha)
    };
    let mut r = SmoothModelReport {
        verdict: SmoothVerdict::False,
        d,
        m,
        alpha,
        genus,
        expected_m: d.div_euclid(3),
        expected_alpha: expected_alpha(d),
        expected_genus: (d - 1) * (d - 2) / 2,
        line_case,
    };
    if d <= 2 {
        if line_case && genus == 0 {
            r.verdict = SmoothVerdict::True;
        }
        return Ok(r);
    }
    if line_case || genus != r.expected_genus || m != r.expected_m || alpha != r.expected_alpha {
        return Ok(r);
    }
    r.verdict = SmoothVerdict::True;
    if d.rem_euclid(3) == 2 && (9..29).contains(&d) && classify(&sys, Kind::Curve)?.case == Case::R {
        r.verdict = SmoothVerdict::Indeterminate;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_and_quartic() {
        let r = smooth_model_test(&PlaneSystem::general(3, &[]), 3).unwrap();
        assert_eq!((r.verdict, r.m, r.alpha, r.genus), (SmoothVerdict::True, 1, 0, 1));
        let r = smooth_model_test(&PlaneSystem::general(4, &[]), 4).unwrap();
        assert_eq!((r.verdict, r.m, r.genus), (SmoothVerdict::True, 1, 3));
    }

    #[test]
    fn genus_mismatch() {
        let r = smooth_model_test(&PlaneSystem::general(6, &[2; 8]), 6).unwrap();
        assert_eq!(r.verdict, SmoothVerdict::False);
        assert_eq!((r.genus, r.expected_genus), (2, 10));
    }

    #[test]
    fn quadratic_image_of_a_quintic() {
        // a smooth quintic after a quadratic map at three general points
        let r = smooth_model_test(&PlaneSystem::general(10, &[5, 5, 5]), 5).unwrap();
        assert_eq!(r.verdict, SmoothVerdict::True);
    }

    #[test]
    fn conic_and_line() {
        assert_eq!(smooth_model_test(&PlaneSystem::general(2, &[]), 2).unwrap().verdict, SmoothVerdict::True);
        assert_eq!(smooth_model_test(&PlaneSystem::general(3, &[2]), 1).unwrap().verdict, SmoothVerdict::True);
        assert_eq!(smooth_model_test(&PlaneSystem::general(3, &[2]), 3).unwrap().verdict, SmoothVerdict::False);
    }
}
