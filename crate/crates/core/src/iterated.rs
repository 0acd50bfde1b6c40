//! Discrete iterated integrals over a discretized martingale, power
//! variations, and the two verification routines for the Kailath-Segall
//! identity.
//!
//! The discrete iterated "integral" uses left-point (predictable)
//! evaluation,
//!
//! ```text
//! I_{m+1}(x_{i+1}) = I_{m+1}(x_i) + I_m(x_i) * increment_i,
//! ```
//!
//! which makes `I_m(x_n)` exactly the elementary symmetric polynomial
//! `e_m` of the increments. With that choice the discrete analogue of the
//! Kailath-Segall identity is Newton's identity relating elementary
//! symmetric polynomials and power sums,
//!
//! ```text
//! q e_q = sum_{k=1..q} (-1)^{k+1} e_{q-k} p_k,
//! ```
//!
//! which holds exactly (up to floating point) at every grid point. The
//! continuous-form identity `q! I_q = H~_q(M, <M>)` only emerges in the
//! mesh-refinement limit, because the higher power variations of a
//! continuous martingale vanish; `check_kailath_segall_continuous` exposes
//! the defect so that tests can verify the refinement trend.

use crate::error::{Error, Result};
use crate::hermite::scaled_hermite_eval;

/// Maximum iterated-integral order supported by the ladders.
pub const MAX_LADDER_ORDER: usize = 12;

/// Maximum order for the continuous-identity defect check.
pub const MAX_CONTINUOUS_ORDER: usize = 8;

/// A path sampled on a strictly increasing grid, interpreted as a
/// discretized martingale vanishing at the left endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedMartingale {
    grid: Vec<f64>,
    values: Vec<f64>,
    increments: Vec<f64>,
    quad_var: Vec<f64>,
}

impl DiscretizedMartingale {
    /// Build from grid points and values; requires a strictly increasing
    /// grid with at least two points and `values[0] = 0`.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain("grid and value lengths differ"));
        }
        if grid.len() < 2 {
            return Err(Error::domain("need at least two grid points"));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("grid must be strictly increasing"));
        }
        if values[0] != 0.0 {
            return Err(Error::domain("martingale must vanish at the left endpoint"));
        }
        let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let mut quad_var = Vec::with_capacity(values.len());
        let mut q = 0.0;
        quad_var.push(0.0);
        for d in &increments {
            q += d * d;
            quad_var.push(q);
        }
        Ok(DiscretizedMartingale {
            grid,
            values,
            increments,
            quad_var,
        })
    }

    /// Build from increments on the integer grid `0, 1, ..., n`.
    pub fn from_increments(increments: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(increments.len() + 1);
        values.push(0.0);
        let mut m = 0.0;
        for d in increments {
            m += d;
            values.push(m);
        }
        let grid = (0..=increments.len()).map(|i| i as f64).collect();
        Self::new(grid, values)
    }

    /// View a Brownian path as a discretized martingale (grid = time grid).
    pub fn from_brownian(path: &crate::path_sim::BrownianPath) -> Self {
        let dt = path.dt();
        let grid = (0..path.values().len()).map(|i| i as f64 * dt).collect();
        // path values start at 0 on a uniform grid, so this cannot fail
        Self::new(grid, path.values().to_vec()).expect("Brownian path is a valid martingale")
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Running quadratic variation `Q(x_i) = sum_{j<i} increment_j^2`.
    pub fn quad_var(&self) -> &[f64] {
        &self.quad_var
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Running discrete iterated integrals `I_0, ..., I_q` along a path.
#[derive(Debug, Clone)]
pub struct IteratedIntegralLadder {
    max_order: usize,
    tables: Vec<Vec<f64>>,
}

impl IteratedIntegralLadder {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Running values of `I_m` on the full grid.
    pub fn order(&self, m: usize) -> &[f64] {
        &self.tables[m]
    }

    /// End-point value `I_m(x_n)`.
    pub fn end_value(&self, m: usize) -> f64 {
        *self.tables[m].last().unwrap()
    }
}

/// Build the ladder of iterated integrals up to order `q` in one
/// `O(n q)` pass with left-point evaluation.
pub fn build_ladder(path: &DiscretizedMartingale, q: usize) -> Result<IteratedIntegralLadder> {
    if q == 0 || q > MAX_LADDER_ORDER {
        return Err(Error::domain(format!(
            "ladder order must be in 1..={MAX_LADDER_ORDER}, got {q}"
        )));
    }
    let n = path.increments().len();
    let mut tables = vec![vec![0.0; n + 1]; q + 1];
    tables[0] = vec![1.0; n + 1];
    for (i, &d) in path.increments().iter().enumerate() {
        // update higher orders from the state at x_i
        for m in (0..q).rev() {
            let bump = tables[m][i] * d;
            tables[m + 1][i + 1] = tables[m + 1][i] + bump;
        }
    }
    Ok(IteratedIntegralLadder {
        max_order: q,
        tables,
    })
}

/// Running power variation `P_k(x_i) = sum_{j<i} increment_j^k`.
pub fn power_variation(path: &DiscretizedMartingale, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > MAX_LADDER_ORDER {
        return Err(Error::domain(format!(
            "power-variation order must be in 1..={MAX_LADDER_ORDER}, got {k}"
        )));
    }
    let mut out = Vec::with_capacity(path.len());
    let mut acc = 0.0;
    out.push(0.0);
    for &d in path.increments() {
        acc += d.powi(k as i32);
        out.push(acc);
    }
    Ok(out)
}

/// End-point residual of the discrete higher-order-variation identity
/// `q I_q = sum_{k=1..q} (-1)^{k+1} I_{q-k} P_k` (Newton's identity on the
/// increment multiset). Exact up to floating point.
pub fn check_newton_identity(path: &DiscretizedMartingale, q: usize) -> Result<f64> {
    if q == 0 || q > MAX_LADDER_ORDER {
        return Err(Error::domain(format!(
            "order must be in 1..={MAX_LADDER_ORDER}, got {q}"
        )));
    }
    let ladder = build_ladder(path, q)?;
    let mut rhs = 0.0;
    for k in 1..=q {
        let p_k = *power_variation(path, k)?.last().unwrap();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        rhs += sign * ladder.end_value(q - k) * p_k;
    }
    Ok((q as f64 * ladder.end_value(q) - rhs).abs())
}

/// Natural magnitude scale for the Newton residual: the largest term
/// appearing on either side of the identity at the end point.
pub fn newton_identity_scale(path: &DiscretizedMartingale, q: usize) -> Result<f64> {
    let ladder = build_ladder(path, q)?;
    let mut scale: f64 = (q as f64 * ladder.end_value(q)).abs();
    for k in 1..=q {
        let p_k = *power_variation(path, k)?.last().unwrap();
        scale = scale.max((ladder.end_value(q - k) * p_k).abs());
    }
    Ok(scale.max(f64::MIN_POSITIVE))
}

/// Sup-norm defect of the continuous Kailath-Segall identity along the
/// grid: `max_i |q! I_q(x_i) - H~_q(M(x_i), Q(x_i))|`.
///
/// Zero (up to rounding) for `q <= 2`; for `q >= 3` it is driven by the
/// higher power variations of the discretization and shrinks as the mesh
/// is refined.
pub fn check_kailath_segall_continuous(path: &DiscretizedMartingale, q: usize) -> Result<f64> {
    if q == 0 || q > MAX_CONTINUOUS_ORDER {
        return Err(Error::domain(format!(
            "order must be in 1..={MAX_CONTINUOUS_ORDER}, got {q}"
        )));
    }
    let ladder = build_ladder(path, q)?;
    let q_fact: f64 = (1..=q as u64).map(|v| v as f64).product();
    let mut defect = 0.0f64;
    for i in 0..path.len() {
        let lhs = q_fact * ladder.order(q)[i];
        let rhs = scaled_hermite_eval(q as u32, path.values()[i], path.quad_var()[i]);
        defect = defect.max((lhs - rhs).abs());
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path_sim::simulate_brownian;
    use rand::Rng;

    fn binomial(n: usize, k: usize) -> f64 {
        let mut out = 1.0;
        for i in 0..k {
            out *= (n - i) as f64 / (i + 1) as f64;
        }
        out
    }

    /// Independent elementary-symmetric-polynomial oracle: same O(nq)
    /// dynamic program, run over a permuted copy of the increments.
    fn elementary_symmetric(increments: &[f64], q: usize) -> f64 {
        let mut e = vec![0.0; q + 1];
        e[0] = 1.0;
        for &d in increments {
            for m in (1..=q).rev() {
                e[m] += e[m - 1] * d;
            }
        }
        e[q]
    }

    #[test]
    fn ladder_small_example() {
        let path = DiscretizedMartingale::from_increments(&[1.0, 2.0, 3.0]).unwrap();
        let ladder = build_ladder(&path, 2).unwrap();
        assert_eq!(ladder.end_value(2), 11.0); // e_2(1,2,3)
        assert_eq!(ladder.end_value(1), 6.0);
        assert_eq!(ladder.end_value(0), 1.0);
    }

    #[test]
    fn ladder_first_order_telescopes_to_path_value() {
        let path = simulate_brownian(1.0, 1e-2, 4).unwrap();
        let m = DiscretizedMartingale::from_brownian(&path);
        let ladder = build_ladder(&m, 3).unwrap();
        for (i, &v) in m.values().iter().enumerate() {
            assert!((ladder.order(1)[i] - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn ladder_equal_increments_give_binomials() {
        let c = 0.7;
        let n = 9;
        let path = DiscretizedMartingale::from_increments(&vec![c; n]).unwrap();
        let ladder = build_ladder(&path, 5).unwrap();
        for q in 1..=5 {
            let expected = binomial(n, q) * c.powi(q as i32);
            assert!(
                (ladder.end_value(q) - expected).abs() <= 1e-12 * expected.abs(),
                "q={q}"
            );
        }
    }

    #[test]
    fn ladder_matches_permuted_oracle() {
        let mut rng = crate::rng::stream_rng(17, 0, crate::rng::StreamTag::Path);
        for trial in 0..20 {
            let n = 50 + trial * 10;
            let increments: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut permuted = increments.clone();
            // deterministic Fisher-Yates
            for i in (1..permuted.len()).rev() {
                let j = rng.random_range(0..=i);
                permuted.swap(i, j);
            }
            let path = DiscretizedMartingale::from_increments(&increments).unwrap();
            let ladder = build_ladder(&path, 6).unwrap();
            for q in 1..=6 {
                let oracle = elementary_symmetric(&permuted, q);
                let got = ladder.end_value(q);
                let scale = oracle.abs().max(1e-30);
                assert!(
                    (got - oracle).abs() <= 1e-10 * scale.max(1.0),
                    "trial {trial}, q={q}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn power_variation_small_examples() {
        let path = DiscretizedMartingale::from_increments(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(*power_variation(&path, 2).unwrap().last().unwrap(), 14.0);
        assert_eq!(power_variation(&path, 1).unwrap(), vec![0.0, 1.0, 3.0, 6.0]);
        let equal = DiscretizedMartingale::from_increments(&[0.5; 8]).unwrap();
        assert!((*power_variation(&equal, 3).unwrap().last().unwrap() - 8.0 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn newton_identity_small_example() {
        // 2 e_2 = e_1 p_1 - e_0 p_2: 22 = 36 - 14
        let path = DiscretizedMartingale::from_increments(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(check_newton_identity(&path, 2).unwrap(), 0.0);
        assert_eq!(check_newton_identity(&path, 1).unwrap(), 0.0);
    }

    #[test]
    fn newton_identity_holds_on_random_paths() {
        for seed in 0..10 {
            let path = simulate_brownian(1.0, 1e-3, seed).unwrap();
            let m = DiscretizedMartingale::from_brownian(&path);
            for q in 2..=8 {
                let residual = check_newton_identity(&m, q).unwrap();
                let scale = newton_identity_scale(&m, q).unwrap();
                assert!(
                    residual <= 1e-9 * scale,
                    "seed {seed}, q={q}: residual {residual}, scale {scale}"
                );
            }
        }
    }

    #[test]
    fn continuous_identity_exact_for_low_orders() {
        let path = simulate_brownian(1.0, 1e-3, 21).unwrap();
        let m = DiscretizedMartingale::from_brownian(&path);
        assert_eq!(check_kailath_segall_continuous(&m, 1).unwrap(), 0.0);
        // 2 e_2 = p_1^2 - p_2 holds at every grid point; only rounding remains
        let defect = check_kailath_segall_continuous(&m, 2).unwrap();
        let scale = m
            .values()
            .iter()
            .zip(m.quad_var())
            .map(|(v, q)| (v * v + q).abs())
            .fold(0.0f64, f64::max);
        assert!(defect <= 1e-12 * scale.max(1.0), "defect {defect}");
    }

    #[test]
    fn continuous_identity_defect_shrinks_under_refinement() {
        // 4x mesh refinement should shrink the q=3 defect by well under 0.7
        // on average (the defect is driven by the cubic variation).
        let seeds = 50;
        let mut coarse_sum = 0.0;
        let mut fine_sum = 0.0;
        for seed in 0..seeds {
            let fine = simulate_brownian(1.0, 1e-3, seed).unwrap();
            let coarse = fine.subsample(4).unwrap();
            let mf = DiscretizedMartingale::from_brownian(&fine);
            let mc = DiscretizedMartingale::from_brownian(&coarse);
            fine_sum += check_kailath_segall_continuous(&mf, 3).unwrap();
            coarse_sum += check_kailath_segall_continuous(&mc, 3).unwrap();
        }
        let ratio = fine_sum / coarse_sum;
        assert!(ratio < 0.7, "refinement ratio {ratio}");
    }

    #[test]
    fn expansion_coefficients_match_recursion_at_grid_points() {
        let path = simulate_brownian(1.0, 1e-2, 33).unwrap();
        let m = DiscretizedMartingale::from_brownian(&path);
        let mut rng = crate::rng::stream_rng(33, 1, crate::rng::StreamTag::Limit);
        for q in 2u32..=8 {
            let expansion = crate::hermite::kailath_segall_expansion(q).unwrap();
            for _ in 0..20 {
                let i = rng.random_range(0..m.len());
                let (mv, qv) = (m.values()[i], m.quad_var()[i]);
                let by_expansion = expansion.eval(mv, qv);
                let by_recursion = scaled_hermite_eval(q, mv, qv);
                let scale: f64 = expansion
                    .monomial_coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| {
                        (c as f64 * mv.powi((q - 2 * k as u32) as i32) * qv.powi(k as i32)).abs()
                    })
                    .sum();
                assert!(
                    (by_expansion - by_recursion).abs() <= 1e-10 * scale.max(1e-12),
                    "q={q}"
                );
            }
        }
    }

    #[test]
    fn martingale_constructor_validates() {
        assert!(DiscretizedMartingale::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(DiscretizedMartingale::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(DiscretizedMartingale::new(vec![0.0], vec![0.0]).is_err());
        let m = DiscretizedMartingale::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, -1.0]).unwrap();
        assert_eq!(m.increments(), &[1.0, -2.0]);
        assert_eq!(m.quad_var(), &[0.0, 1.0, 5.0]);
    }

    #[test]
    fn ladder_rejects_large_orders() {
        let path = DiscretizedMartingale::from_increments(&[1.0, 2.0]).unwrap();
        assert!(build_ladder(&path, 13).is_err());
        assert!(check_kailath_segall_continuous(&path, 9).is_err());
    }
}
