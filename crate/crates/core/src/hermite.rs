//! Exact integer combinatorics behind the increment-moment statistics:
//! Bessel numbers of the second kind, monic (probabilists') Hermite
//! polynomials in one and two variables, and the limit constants `c_q`.
//!
//! The Bessel numbers
//!
//! ```text
//! a_{q,k} = (-1)^k q! / (2^k k! (q-2k)!)
//! ```
//!
//! are the monomial coefficients of the Hermite polynomials,
//! `H_q(x) = sum_k a_{q,k} x^{q-2k}`, and simultaneously the coefficients
//! of the expansion `q! I_q = sum_k a_{q,k} M^{q-2k} <M>^k` of iterated
//! stochastic integrals in terms of the underlying martingale and its
//! quadratic variation. Everything in this module is computed in exact
//! integer (or rational) arithmetic; floating point enters only at
//! evaluation time.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest order for which exact integer arithmetic is guaranteed
/// (`q!` fits comfortably in `u128` and all quotients are exact).
pub const MAX_EXACT_ORDER: u32 = 20;

/// Largest order accepted by the Hermite evaluation recursions.
pub const MAX_EVAL_ORDER: u32 = 30;

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Signed Bessel number of the second kind `a_{q,k}`.
///
/// Requires `2k <= q` and `q <= MAX_EXACT_ORDER`; computed exactly,
/// no floating point.
pub fn bessel_number(q: u32, k: u32) -> Result<i128> {
    if 2 * k > q {
        return Err(Error::domain(format!(
            "bessel_number requires 2k <= q, got q={q}, k={k}"
        )));
    }
    if q > MAX_EXACT_ORDER {
        return Err(Error::domain(format!(
            "bessel_number is exact only for q <= {MAX_EXACT_ORDER}, got q={q}"
        )));
    }
    // q! / (2^k k! (q-2k)!) divides exactly; compute numerator first
    // (20! < 2^62, far below u128 overflow).
    let num = factorial(q);
    let den = (1u128 << k) * factorial(k) * factorial(q - 2 * k);
    debug_assert_eq!(num % den, 0);
    let magnitude = (num / den) as i128;
    Ok(if k.is_multiple_of(2) {
        magnitude
    } else {
        -magnitude
    })
}

/// Table of all Bessel numbers `a_{q,k}` with `q <= max_order`.
#[derive(Debug, Clone)]
pub struct BesselTable {
    max_order: u32,
    coefficients: BTreeMap<(u32, u32), i128>,
}

impl BesselTable {
    pub fn new(max_order: u32) -> Result<Self> {
        if max_order == 0 || max_order > MAX_EXACT_ORDER {
            return Err(Error::domain(format!(
                "BesselTable order must be in 1..={MAX_EXACT_ORDER}, got {max_order}"
            )));
        }
        let mut coefficients = BTreeMap::new();
        for q in 1..=max_order {
            for k in 0..=q / 2 {
                coefficients.insert((q, k), bessel_number(q, k)?);
            }
        }
        Ok(BesselTable {
            max_order,
            coefficients,
        })
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, q: u32, k: u32) -> Option<i128> {
        self.coefficients.get(&(q, k)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &i128)> {
        self.coefficients.iter()
    }
}

/// Monic Hermite polynomial `H_n(x)` via the three-term recursion
/// `H_n(x) = x H_{n-1}(x) - (n-1) H_{n-2}(x)`, `H_0 = 1`, `H_1(x) = x`.
pub fn hermite_eval(n: u32, x: f64) -> f64 {
    assert!(
        n <= MAX_EVAL_ORDER,
        "hermite_eval supports n <= {MAX_EVAL_ORDER}"
    );
    scaled_hermite_eval(n, x, 1.0)
}

/// Two-variable Hermite polynomial `H~_n(x, a)` via
/// `H~_n(x,a) = x H~_{n-1}(x,a) - (n-1) a H~_{n-2}(x,a)`.
///
/// Equivalent to `a^{n/2} H_n(x / sqrt(a))` for `a > 0`, but the recursion
/// keeps `a = 0` well defined (it degenerates to `x^n`).
pub fn scaled_hermite_eval(n: u32, x: f64, a: f64) -> f64 {
    assert!(
        n <= MAX_EVAL_ORDER,
        "scaled_hermite_eval supports n <= {MAX_EVAL_ORDER}"
    );
    debug_assert!(
        a >= 0.0,
        "quadratic-variation argument must be non-negative"
    );
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0; // H~_0
    let mut curr = x; // H~_1
    for m in 2..=n {
        let next = x * curr - (m - 1) as f64 * a * prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// `c_q^2 = 2^{2q+1} q! / (q+1)` as an exact reduced rational
/// `(numerator, denominator)`.
pub fn limit_constant_sq(q: u32) -> Result<(u128, u128)> {
    if q < 2 {
        return Err(Error::domain(format!(
            "limit constant is defined for q >= 2, got q={q}"
        )));
    }
    if q > MAX_EXACT_ORDER {
        return Err(Error::domain(format!(
            "limit constant is exact only for q <= {MAX_EXACT_ORDER}, got q={q}"
        )));
    }
    let num = (1u128 << (2 * q + 1)) * factorial(q);
    let den = (q + 1) as u128;
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

/// The limit scale constant `c_q = sqrt(2^{2q+1} q! / (q+1))`.
pub fn limit_constant(q: u32) -> Result<f64> {
    let (num, den) = limit_constant_sq(q)?;
    Ok((num as f64 / den as f64).sqrt())
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Monomial expansion of a Hermite polynomial: `monomial_coeffs[k]` is the
/// exact coefficient of `x^{q-2k} a^k` in `H~_q(x, a)`, i.e. `a_{q,k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteExpansion {
    pub order: u32,
    pub monomial_coeffs: Vec<i128>,
}

impl HermiteExpansion {
    /// Evaluate the expansion at martingale value `m` and quadratic
    /// variation `qv`: `sum_k a_{q,k} m^{q-2k} qv^k`.
    pub fn eval(&self, m: f64, qv: f64) -> f64 {
        self.monomial_coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                c as f64 * m.powi((self.order - 2 * k as u32) as i32) * qv.powi(k as i32)
            })
            .sum()
    }
}

/// Coefficients of the expansion `q! I_q = sum_k a_{q,k} M^{q-2k} <M>^k`.
pub fn kailath_segall_expansion(q: u32) -> Result<HermiteExpansion> {
    if q == 0 || q > MAX_EXACT_ORDER {
        return Err(Error::domain(format!(
            "expansion order must be in 1..={MAX_EXACT_ORDER}, got q={q}"
        )));
    }
    let monomial_coeffs = (0..=q / 2)
        .map(|k| bessel_number(q, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermiteExpansion {
        order: q,
        monomial_coeffs,
    })
}
