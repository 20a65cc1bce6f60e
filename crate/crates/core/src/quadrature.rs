//! Globally adaptive 15-point Gauss–Kronrod quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the total
//! estimate meets the tolerance or the subdivision budget runs out. Node
//! placement depends only on the integrand and the spec, so repeated runs
//! are bit-identical.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && abs_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-11,
            abs_tol: 1e-15,
            max_subdivisions: 1000,
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

// Kronrod abscissae in descending order; odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

/// ∫ₐᵇ f by global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut segments = vec![Segment {
        a,
        b,
        est: gauss_kronrod_15(&f, a, b),
    }];
    loop {
        let value: f64 = segments.iter().map(|s| s.est.value).sum();
        let error: f64 = segments.iter().map(|s| s.est.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureNonconvergence {
                subdivisions: segments.len(),
                error_estimate: error,
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::QuadratureNonconvergence {
                subdivisions: segments.len(),
                error_estimate: error,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .fold(0, |best, (k, s)| {
                if s.est.error > segments[best].est.error {
                    k
                } else {
                    best
                }
            });
        let Segment { a, b, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (a + b);
        segments.push(Segment {
            a,
            b: mid,
            est: gauss_kronrod_15(&f, a, mid),
        });
        segments.push(Segment {
            a: mid,
            b,
            est: gauss_kronrod_15(&f, mid, b),
        });
    }
}
