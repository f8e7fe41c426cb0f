//! Globally adaptive Gauss–Kronrod (7/15) integration.

use crate::error::{Result, RotationError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: 1e-10,
            absolute: 1e-12,
            max_intervals: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Segment {
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(centre);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lower,
        upper,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lower, upper]`, bisecting the worst segment until the
/// summed error estimate is below `max(absolute, relative * |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lower: f64, upper: f64, tol: Tolerance) -> Result<f64> {
    if lower == upper {
        return Ok(0.0);
    }
    if upper < lower {
        return integrate(f, upper, lower, tol).map(|v| -v);
    }
    let mut segments = vec![kronrod(&f, lower, upper)];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = tol.absolute.max(tol.relative * total.abs());
        if error <= target {
            return Ok(total);
        }
        if segments.len() >= tol.max_intervals || !error.is_finite() {
            return Err(RotationError::Quadrature {
                lower,
                upper,
                achieved: error,
                requested: target,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                if s.error > acc.1 {
                    (i, s.error)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lower + seg.upper);
        if mid <= seg.lower || mid >= seg.upper {
            return Err(RotationError::Quadrature {
                lower,
                upper,
                achieved: error,
                requested: target,
            });
        }
        segments.push(kronrod(&f, seg.lower, mid));
        segments.push(kronrod(&f, mid, seg.upper));
    }
}
