//! The increment-moment statistic, its compensator and the normalized
//! statistic, computed from a binned spatial field.
//!
//! For a field `L` on bins of width `dx`, lag `h = m dx` and weight
//! `Y = L^r`, the statistic and compensator are
//!
//! ```text
//! S_q(h)  = sum_j (L(j+m) - L(j))^q Y(j) dx
//! R_{q,h} = sum_{k=1..floor(q/2)} a_{q,k} sum_j (L(j+m) - L(j))^{q-2k} W(j)^k Y(j) dx
//! T_q(h)  = (S_q + R_{q,h}) / h^{(q+1)/2}
//! ```
//!
//! where `W(j)` discretizes `4 * integral of L over [x_j, x_j + h]`. The
//! window integral uses the trapezoid rule on the bin values,
//!
//! ```text
//! W(j) = 4 dx (L(j)/2 + L(j+1) + ... + L(j+m-1) + L(j+m)/2),
//! ```
//!
//! for which `W(j+1) - W(j)` pairs with the increment so that two grid
//! identities hold exactly (not just in the limit): `R_{2,h} = -4 h t`
//! (discrete Fubini against the total occupation) and `R_{3,h} = 0`
//! (telescoping of a perfect difference of squares).

use crate::error::{positive, Error, Result};
use crate::hermite::{bessel_number, limit_constant};
use crate::path_sim::{BesqZeroField, LocalTimeField};

/// Largest statistic order accepted by the requests.
pub const MAX_STATISTIC_ORDER: u32 = 12;

/// Largest weight power accepted by the requests.
pub const MAX_WEIGHT_POWER: u32 = 8;

/// Integration domain of a spatial field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// The field lives on all of the real line and is zero outside the
    /// stored bins (Brownian local time at fixed time).
    FullLine,
    /// The field lives on the half line starting at the first stored bin
    /// (stopping-time fields); nothing to the left contributes.
    HalfLine,
}

/// A binned non-negative field the statistics can be evaluated on.
pub trait SpatialField {
    fn bin_width(&self) -> f64;
    fn values(&self) -> &[f64];
    fn domain(&self) -> Domain;

    /// `None` if the field is complete (exactly zero beyond the stored
    /// bins). `Some(n)` if observation was cut off after `n` bins: the
    /// integration then shrinks to windows that lie fully inside the
    /// observed range, so the cut edge never masquerades as a jump to 0.
    fn observed_bins(&self) -> Option<usize> {
        None
    }
}

impl SpatialField for LocalTimeField {
    fn bin_width(&self) -> f64 {
        self.bin_width()
    }
    fn values(&self) -> &[f64] {
        self.values()
    }
    fn domain(&self) -> Domain {
        Domain::FullLine
    }
}

impl SpatialField for BesqZeroField {
    fn bin_width(&self) -> f64 {
        self.bin_width()
    }
    fn values(&self) -> &[f64] {
        self.values()
    }
    fn domain(&self) -> Domain {
        Domain::HalfLine
    }
    fn observed_bins(&self) -> Option<usize> {
        if self.absorbed() {
            None
        } else {
            Some(self.values().len())
        }
    }
}

/// Parameters of one statistic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticRequest {
    /// Moment order `q >= 2`.
    pub q: u32,
    /// Spatial lag; must be an integer multiple of the field bin width.
    pub h: f64,
    /// Weight power `r` in `Y = L^r` (`r = 0` is the unweighted statistic).
    pub weight_power: u32,
}

impl StatisticRequest {
    pub fn new(q: u32, h: f64, weight_power: u32) -> Self {
        StatisticRequest { q, h, weight_power }
    }

    /// Validate against a field and return the lag in bins.
    pub fn lag_bins(&self, field: &impl SpatialField) -> Result<usize> {
        if self.q < 2 || self.q > MAX_STATISTIC_ORDER {
            return Err(Error::domain(format!(
                "statistic order must be in 2..={MAX_STATISTIC_ORDER}, got {}",
                self.q
            )));
        }
        if self.weight_power > MAX_WEIGHT_POWER {
            return Err(Error::domain(format!(
                "weight power must be <= {MAX_WEIGHT_POWER}, got {}",
                self.weight_power
            )));
        }
        let dx = field.bin_width();
        if !positive(self.h) {
            return Err(Error::domain("lag h must be positive"));
        }
        let ratio = self.h / dx;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-9 * m {
            return Err(Error::domain(format!(
                "lag h = {} is not an integer multiple of bin width {dx}",
                self.h
            )));
        }
        Ok(m as usize)
    }
}

/// All per-path outputs of one statistic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticResult {
    /// `S_q(h)`, the weighted increment moment.
    pub s_q: f64,
    /// The compensator `R_{q,h}` (signed Bessel-number convention, so that
    /// `S_q + R_{q,h}` is the normalized numerator).
    pub r_qh: f64,
    /// `T_q(h) = (S_q + R_{q,h}) / h^{(q+1)/2}`.
    pub t_q: f64,
    /// The per-path limit scale `sum_j L(j)^q Y(j)^2 dx`.
    pub limit_scale: f64,
    /// The limit constant `c_q`.
    pub limit_constant: f64,
}

struct FieldView<'a> {
    values: &'a [f64],
    dx: f64,
    m: usize,
    j_start: i64,
    j_end: i64,
    prefix: Vec<f64>,
}

impl<'a> FieldView<'a> {
    fn new(field: &'a impl SpatialField, m: usize) -> Self {
        let values = field.values();
        let n = values.len();
        let mut prefix = Vec::with_capacity(n + 1);
        let dx = field.bin_width();
        let mut acc = 0.0;
        prefix.push(0.0);
        for &v in values {
            acc += v * dx;
            prefix.push(acc);
        }
        let (j_start, j_end) = match field.observed_bins() {
            // complete field: every window with a nonzero factor counts
            None => match field.domain() {
                Domain::FullLine => (-(m as i64), n as i64),
                Domain::HalfLine => (0, n as i64),
            },
            // cut-off field: only windows fully inside the observed range
            Some(observed) => (0, observed as i64 - m as i64),
        };
        FieldView {
            values,
            dx,
            m,
            j_start,
            j_end,
            prefix,
        }
    }

    fn value(&self, j: i64) -> f64 {
        if j >= 0 && (j as usize) < self.values.len() {
            self.values[j as usize]
        } else {
            0.0
        }
    }

    /// Left-closed window sum `sum_{i=j}^{j+m-1} L(i) dx` via prefix sums.
    fn window_left(&self, j: i64) -> f64 {
        let n = self.values.len() as i64;
        let lo = j.clamp(0, n) as usize;
        let hi = (j + self.m as i64).clamp(0, n) as usize;
        self.prefix[hi] - self.prefix[lo]
    }

    /// `W(j) = 4 *` trapezoid window integral over `[x_j, x_j + h]`.
    fn window(&self, j: i64) -> f64 {
        2.0 * (self.window_left(j) + self.window_left(j + 1))
    }

    fn increment(&self, j: i64) -> f64 {
        self.value(j + self.m as i64) - self.value(j)
    }

    fn bins(&self) -> impl Iterator<Item = i64> + '_ {
        self.j_start..self.j_end
    }

    /// Bins entering the limit-scale integral (the same interval the
    /// statistic runs over, intersected with the stored support).
    fn scale_bins(&self) -> std::ops::Range<usize> {
        0..(self.j_end.max(0) as usize).min(self.values.len())
    }
}

fn weight(v: f64, r: u32) -> f64 {
    if r == 0 {
        1.0
    } else {
        v.powi(r as i32)
    }
}

/// The weighted increment moment `S_q(h) = sum_j (dL)^q Y dx`.
pub fn increment_moment(field: &impl SpatialField, req: &StatisticRequest) -> Result<f64> {
    let m = req.lag_bins(field)?;
    let view = FieldView::new(field, m);
    let qi = req.q as i32;
    let mut sum = 0.0;
    for j in view.bins() {
        let y = weight(view.value(j), req.weight_power);
        if y == 0.0 {
            continue;
        }
        let d = view.increment(j);
        sum += d.powi(qi) * y;
    }
    Ok(sum * view.dx)
}

/// Per-`k` signed contributions `a_{q,k} sum_j (dL)^{q-2k} W^k Y dx`
/// for `k = 1..=floor(q/2)`; the compensator is their sum.
pub fn compensator_terms(field: &impl SpatialField, req: &StatisticRequest) -> Result<Vec<f64>> {
    let m = req.lag_bins(field)?;
    let view = FieldView::new(field, m);
    let k_max = (req.q / 2) as usize;
    let mut sums = vec![0.0; k_max];
    for j in view.bins() {
        let y = weight(view.value(j), req.weight_power);
        if y == 0.0 {
            continue;
        }
        let d = view.increment(j);
        let w = view.window(j);
        let mut w_pow = 1.0;
        for (k, slot) in sums.iter_mut().enumerate() {
            w_pow *= w;
            let d_pow = d.powi((req.q - 2 * (k as u32 + 1)) as i32);
            *slot += d_pow * w_pow * y;
        }
    }
    let mut terms = Vec::with_capacity(k_max);
    for (k, sum) in sums.into_iter().enumerate() {
        let a = bessel_number(req.q, k as u32 + 1)? as f64;
        terms.push(a * sum * view.dx);
    }
    Ok(terms)
}

/// The compensator `R_{q,h}`.
pub fn compensator(field: &impl SpatialField, req: &StatisticRequest) -> Result<f64> {
    Ok(compensator_terms(field, req)?.iter().sum())
}

/// Magnitude scale of the compensator: the same sum with every factor
/// replaced by its absolute value. The natural denominator for "relative"
/// comparisons of a quantity that may cancel to zero (the `q = 3` case
/// telescopes exactly).
pub fn compensator_scale(field: &impl SpatialField, req: &StatisticRequest) -> Result<f64> {
    let m = req.lag_bins(field)?;
    let view = FieldView::new(field, m);
    let mut scale = 0.0;
    for j in view.bins() {
        let y = weight(view.value(j), req.weight_power).abs();
        if y == 0.0 {
            continue;
        }
        let d = view.increment(j).abs();
        let w = view.window(j).abs();
        let mut w_pow = 1.0;
        for k in 1..=(req.q / 2) {
            w_pow *= w;
            let a = bessel_number(req.q, k)?.unsigned_abs() as f64;
            scale += a * d.powi((req.q - 2 * k) as i32) * w_pow * y;
        }
    }
    Ok(scale * view.dx)
}

/// Assemble the full statistic: `S_q`, `R_{q,h}`, normalized `T_q`, the
/// per-path limit scale and the limit constant `c_q`.
pub fn normalized_statistic(
    field: &impl SpatialField,
    req: &StatisticRequest,
) -> Result<StatisticResult> {
    let m = req.lag_bins(field)?;
    let s_q = increment_moment(field, req)?;
    let r_qh = compensator(field, req)?;
    let norm = req.h.powf((req.q as f64 + 1.0) / 2.0);
    let t_q = (s_q + r_qh) / norm;
    let view = FieldView::new(field, m);
    let limit_scale = view
        .scale_bins()
        .map(|j| {
            let v = view.values[j];
            v.powi(req.q as i32) * weight(v, req.weight_power).powi(2)
        })
        .sum::<f64>()
        * view.dx;
    Ok(StatisticResult {
        s_q,
        r_qh,
        t_q,
        limit_scale,
        limit_constant: limit_constant(req.q)?,
    })
}
