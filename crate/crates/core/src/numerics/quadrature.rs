use crate::error::{invalid, Error, Result};

/// Default panel count for criteria integrated over the unit interval.
pub const DEFAULT_PANELS: usize = 201;

/// Composite midpoint rule on (0, 1) with `panels` equal panels. The
/// integrand is never evaluated at 0 or 1.
pub fn integrate_unit_interval<F>(mut f: F, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if panels == 0 {
        return invalid("panels must be at least 1");
    }
    let h = 1.0 / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let x = (i as f64 + 0.5) * h;
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { at: x, value: y });
        }
        sum += y;
    }
    Ok(sum * h)
}

/// Midpoint abscissae used by [`integrate_unit_interval`].
pub fn midpoints(panels: usize) -> Vec<f64> {
    let h = 1.0 / panels as f64;
    (0..panels).map(|i| (i as f64 + 0.5) * h).collect()
}

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval. Stops when the
/// summed error estimate is below `max(abs_tol, rel_tol * |I|)` or after
/// `max_intervals` subdivisions.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    const MAX_INTERVALS: usize = 400;
    let (v, e) = kronrod15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && parts.len() < MAX_INTERVALS {
        let (idx, _) =
            parts.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc },
            );
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    // re-sum to shed accumulated rounding in the running total
    parts.iter().map(|p| p.2).sum()
}
