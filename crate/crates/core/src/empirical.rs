//! Rank-based empirical tail functionals.
//!
//! Pseudo-observations are `rank / n` with average ranks for ties. Window
//! tests on the first coordinate compare ranks against `k·w`, which is exact
//! for integer products.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Rank-transformed bivariate sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    rank_u: Vec<f64>,
    rank_v: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl PseudoSample {
    fn from_ranks(rank_u: Vec<f64>, rank_v: Vec<f64>) -> Self {
        let n = rank_u.len() as f64;
        let u = rank_u.iter().map(|r| r / n).collect();
        let v = rank_v.iter().map(|r| r / n).collect();
        Self {
            rank_u,
            rank_v,
            u,
            v,
        }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// The 2-reflected sample: second rank r replaced by n + 1 - r.
    pub fn reflect2(&self) -> PseudoSample {
        let n1 = self.n() as f64 + 1.0;
        let rank_v = self.rank_v.iter().map(|r| n1 - r).collect();
        Self::from_ranks(self.rank_u.clone(), rank_v)
    }
}

/// Empirical lower and upper-left tail dependence coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCoefficients {
    pub lambda_hat: f64,
    pub lambda_hat_2star: f64,
    pub k: usize,
    pub n: usize,
}

/// Average ranks (1-based) of `x`.
pub(crate) fn average_ranks(x: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = x.iter().position(|v| v.is_nan()) {
        return Err(Error::Data(format!("NaN at position {i}")));
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        // positions i..j share the average of ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &t in &idx[i..j] {
            ranks[t] = avg;
        }
        i = j;
    }
    Ok(ranks)
}

pub fn pseudo_observations(x: &[f64], y: &[f64]) -> Result<PseudoSample> {
    if x.len() != y.len() {
        return invalid(format!("length mismatch: {} vs {}", x.len(), y.len()));
    }
    if x.len() < 2 {
        return invalid(format!("need at least 2 observations, got {}", x.len()));
    }
    Ok(PseudoSample::from_ranks(
        average_ranks(x)?,
        average_ranks(y)?,
    ))
}

/// Ĉ_n(u, v) = n^{-1} #{U_i ≤ u, V_i ≤ v}.
pub fn empirical_copula(s: &PseudoSample, u: f64, v: f64) -> f64 {
    let c =
        s.u.iter()
            .zip(&s.v)
            .filter(|&(&a, &b)| a <= u && b <= v)
            .count();
    c as f64 / s.n() as f64
}

fn check_k(s: &PseudoSample, k: usize) -> Result<()> {
    if k == 0 || k > s.n() {
        return invalid(format!("k = {k} must lie in [1, n = {}]", s.n()));
    }
    Ok(())
}

/// Â_{k,n}(v) = k^{-1} #{U_i ≤ k/n, V_i ≤ v}.
pub fn a_hat(s: &PseudoSample, k: usize, v: f64) -> Result<f64> {
    check_k(s, k)?;
    let kf = k as f64;
    let c = s
        .rank_u
        .iter()
        .zip(&s.v)
        .filter(|&(&r, &b)| r <= kf && b <= v)
        .count();
    Ok(c as f64 / kf)
}

/// Â_{k,n} evaluated at every point of `grid`.
pub fn a_hat_grid(s: &PseudoSample, k: usize, grid: &[f64]) -> Result<Vec<f64>> {
    check_k(s, k)?;
    let kf = k as f64;
    let mut sel: Vec<f64> = s
        .rank_u
        .iter()
        .zip(&s.v)
        .filter(|&(&r, _)| r <= kf)
        .map(|(_, &b)| b)
        .collect();
    sel.sort_by(f64::total_cmp);
    Ok(grid
        .iter()
        .map(|&v| sel.partition_point(|&b| b <= v) as f64 / kf)
        .collect())
}

fn check_window(s: &PseudoSample, k: usize, w1: f64, w2: f64) -> Result<()> {
    check_k(s, k)?;
    if !(w1 >= 0.0 && w2 >= 0.0) {
        return invalid(format!("weights ({w1}, {w2}) must be nonnegative"));
    }
    let n = s.n() as f64;
    let kf = k as f64;
    for (name, w) in [("w1", w1), ("w2", w2)] {
        if kf * w > n {
            return invalid(format!(
                "window k*{name}/n = {} exceeds 1 (k = {k}, {name} = {w}, n = {n})",
                kf * w / n
            ));
        }
    }
    Ok(())
}

/// b̂_{k,n}(w1, w2) = k^{-1} #{U_i ≤ k w1/n, V_i ≤ k w2/n}.
pub fn b_hat(s: &PseudoSample, k: usize, w1: f64, w2: f64) -> Result<f64> {
    check_window(s, k, w1, w2)?;
    let kf = k as f64;
    let (t1, t2) = (kf * w1, kf * w2);
    let c = s
        .rank_u
        .iter()
        .zip(&s.rank_v)
        .filter(|&(&a, &b)| a <= t1 && b <= t2)
        .count();
    Ok(c as f64 / kf)
}

/// b̂_{k,n}(2t, 2(1-t)) at each `t` in `ts`: the empirical tail dependence
/// function along the simplex w1 + w2 = 2.
pub fn b_hat_simplex(s: &PseudoSample, k: usize, ts: &[f64]) -> Result<Vec<f64>> {
    check_window(s, k, 2.0, 2.0)?;
    let kf = k as f64;
    let cap = 2.0 * kf;
    let pts: Vec<(f64, f64)> = s
        .rank_u
        .iter()
        .zip(&s.rank_v)
        .filter(|&(&a, &b)| a <= cap && b <= cap)
        .map(|(&a, &b)| (a, b))
        .collect();
    Ok(ts
        .iter()
        .map(|&t| {
            let (t1, t2) = (kf * 2.0 * t, kf * 2.0 * (1.0 - t));
            pts.iter().filter(|&&(a, b)| a <= t1 && b <= t2).count() as f64 / kf
        })
        .collect())
}

/// (λ̂, λ̂^{2*}) = b̂(1,1) on the sample and on its 2-reflection.
pub fn tail_coefficients(s: &PseudoSample, k: usize) -> Result<TailCoefficients> {
    let lambda_hat = b_hat(s, k, 1.0, 1.0)?;
    let lambda_hat_2star = b_hat(&s.reflect2(), k, 1.0, 1.0)?;
    Ok(TailCoefficients {
        lambda_hat,
        lambda_hat_2star,
        k,
        n: s.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::CopulaSpec;
    use proptest::prelude::*;

    fn ranks_example() -> PseudoSample {
        pseudo_observations(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap()
    }

    #[test]
    fn pseudo_observation_examples() {
        let s = pseudo_observations(&[3.0, 1.0, 2.0], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(s.u(), &[1.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(s.v(), &[1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let t = pseudo_observations(&[5.0, 5.0, 7.0, 9.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.u()[..2], [1.5 / 4.0, 1.5 / 4.0]);
        assert!(pseudo_observations(&[1.0], &[1.0]).is_err());
        assert!(pseudo_observations(&[1.0, 2.0], &[1.0]).is_err());
        assert!(matches!(
            pseudo_observations(&[1.0, f64::NAN], &[1.0, 2.0]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn copula_and_tail_examples() {
        let s = ranks_example();
        assert_eq!(empirical_copula(&s, 0.5, 0.5), 0.25);
        assert_eq!(empirical_copula(&s, 1.0, 1.0), 1.0);
        assert_eq!(empirical_copula(&s, 0.0, 0.7), 0.0);
        assert_eq!(a_hat(&s, 2, 0.75).unwrap(), 1.0);
        assert_eq!(a_hat(&s, 3, 1.0).unwrap(), 1.0);
        assert_eq!(a_hat(&s, 2, 0.1).unwrap(), 0.0);
        assert!(a_hat(&s, 0, 0.5).is_err());
        assert!(a_hat(&s, 5, 0.5).is_err());
        assert_eq!(b_hat(&s, 1, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(b_hat(&s, 4, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(b_hat(&s, 1, 1.0, 1e-9).unwrap(), 0.0);
        match b_hat(&s, 4, 2.0, 1.0) {
            Err(Error::InvalidArgument(m)) => assert!(m.contains("w1"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_forms_agree_with_pointwise() {
        let c = CopulaSpec::clayton(1.5).unwrap();
        let smp = c.sample(3000, 17);
        let s = pseudo_observations(&smp.u, &smp.v).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let a = a_hat_grid(&s, 120, &grid).unwrap();
        for (g, av) in grid.iter().zip(&a) {
            assert_eq!(*av, a_hat(&s, 120, *g).unwrap());
        }
        let ts: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
        let b = b_hat_simplex(&s, 120, &ts).unwrap();
        for (t, bv) in ts.iter().zip(&b) {
            assert_eq!(*bv, b_hat(&s, 120, 2.0 * t, 2.0 * (1.0 - t)).unwrap());
        }
    }

    #[test]
    fn monotone_samples() {
        let x: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let y_up = x.clone();
        let y_down: Vec<f64> = x.iter().map(|v| -v).collect();
        let co = tail_coefficients(&pseudo_observations(&x, &y_up).unwrap(), 20).unwrap();
        assert_eq!((co.lambda_hat, co.lambda_hat_2star), (1.0, 0.0));
        let counter = tail_coefficients(&pseudo_observations(&x, &y_down).unwrap(), 20).unwrap();
        assert_eq!((counter.lambda_hat, counter.lambda_hat_2star), (0.0, 1.0));
    }

    #[test]
    fn clayton_lower_tail_coefficient() {
        let smp = CopulaSpec::clayton(2.0).unwrap().sample(100_000, 5);
        let s = pseudo_observations(&smp.u, &smp.v).unwrap();
        let tc = tail_coefficients(&s, 100).unwrap();
        assert!((tc.lambda_hat - 2f64.powf(-0.5)).abs() < 0.1, "{tc:?}");
        assert!(tc.lambda_hat_2star < 0.05);
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_transforms(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..60)
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let s = pseudo_observations(&x, &y).unwrap();
            let xt: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            let yt: Vec<f64> = y.iter().map(|v| 3.0 * v + v.powi(3)).collect();
            prop_assert_eq!(s, pseudo_observations(&xt, &yt).unwrap());
        }

        #[test]
        fn a_hat_is_a_cdf(seed in 0u64..500, k in 1usize..50) {
            let smp = CopulaSpec::frank(3.0).unwrap().sample(100, seed);
            let s = pseudo_observations(&smp.u, &smp.v).unwrap();
            let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
            let a = a_hat_grid(&s, k, &grid).unwrap();
            prop_assert!(a.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(a[50], 1.0);
        }

        #[test]
        fn b_hat_monotone_and_bounded(seed in 0u64..500, w1 in 0.05f64..2.0, w2 in 0.05f64..2.0) {
            let smp = CopulaSpec::gumbel(2.0).unwrap().sample(200, seed);
            let s = pseudo_observations(&smp.u, &smp.v).unwrap();
            let k = 40;
            let b = b_hat(&s, k, w1, w2).unwrap();
            prop_assert!(b <= w1.min(w2) + 1.0 / k as f64);
            prop_assert!(b_hat(&s, k, (w1 * 1.2).min(5.0), w2).unwrap() >= b);
            prop_assert!(b_hat(&s, k, w1, (w2 * 1.2).min(5.0)).unwrap() >= b);
        }
    }
}
