use crate::error::{Error, Result};

/// Generalized inverse of a nondecreasing function: the smallest `x` in
/// `[lo, hi]` with `f(x) >= 0`, to within `tol` in `x`.
///
/// Pure bisection on the sign of `f`, so flat stretches where `f == 0`
/// resolve to their left endpoint. The returned point always satisfies
/// `f(x) >= 0`. Requires `f(lo) <= 0 <= f(hi)`.
pub fn find_root_monotone<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() || f_hi < 0.0 || f_lo > 0.0 {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = f(mid);
        if v.is_nan() {
            return Err(Error::NonFinite { at: mid, value: v });
        }
        if v >= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b)
}

/// Safeguarded Newton for an increasing function `g` returning `(g, g')`.
/// `lo`/`hi` must bracket the root; steps leaving the bracket fall back to
/// bisection.
pub(crate) fn newton_bracketed<G>(g: G, mut lo: f64, mut hi: f64, x0: f64, xtol: f64) -> f64
where
    G: Fn(f64) -> (f64, f64),
{
    let mut x = x0;
    for _ in 0..200 {
        let (v, dv) = g(x);
        if v == 0.0 {
            return x;
        }
        if v > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - v / dv;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= xtol * x.abs().max(1.0) || hi - lo <= xtol * x.abs().max(1.0) {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let x = find_root_monotone(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn linear() {
        let x = find_root_monotone(|x| x - 0.3, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn step_function_gives_left_endpoint() {
        let f = |x: f64| if x >= 0.4 { 0.5 } else { -0.5 };
        let x = find_root_monotone(f, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.4).abs() < 1e-11);
        assert!(x >= 0.4);
    }

    #[test]
    fn flat_zero_segment_gives_left_endpoint() {
        let f = |x: f64| (x - 0.2).min(0.0) + (x - 0.7).max(0.0);
        let x = find_root_monotone(f, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.2).abs() < 1e-11);
    }

    #[test]
    fn unbracketed_reports_endpoints() {
        match find_root_monotone(|x| x + 5.0, 0.0, 1.0, 1e-9) {
            Err(Error::NotBracketed { f_lo, f_hi, .. }) => {
                assert_eq!(f_lo, 5.0);
                assert_eq!(f_hi, 6.0);
            }
            other => panic!("expected bracket error, got {other:?}"),
        }
        assert!(matches!(
            find_root_monotone(|x| x - 5.0, 0.0, 1.0, 1e-9),
            Err(Error::NotBracketed { .. })
        ));
    }

    proptest! {
        #[test]
        fn recovers_cubic_roots(r in -5.0f64..5.0) {
            let x = find_root_monotone(|x| (x - r).powi(3), -10.0, 10.0, 1e-10).unwrap();
            prop_assert!((x - r).abs() < 1e-9);
        }
    }
}
