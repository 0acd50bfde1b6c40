//! The `verify-identities` gate: every machine-precision identity the
//! engine relies on, bundled into one fast command (seconds, no large
//! Monte Carlo). Exit code 2 if any check fails.

use loctime_core::hermite::{bessel_number, kailath_segall_expansion, limit_constant_sq};
use loctime_core::iterated::{
    check_kailath_segall_continuous, check_newton_identity, newton_identity_scale,
    DiscretizedMartingale,
};
use loctime_core::path_sim::{local_time_field, simulate_brownian};
use loctime_core::stats::{compensator, compensator_scale, StatisticRequest};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            name,
            passed,
            detail,
        }
    }
}

/// Reference magnitudes |a_{q,k}| for q = 2..=9, k >= 1.
const BESSEL_MAGNITUDES: [&[i128]; 8] = [
    &[1],
    &[3],
    &[6, 3],
    &[10, 15],
    &[15, 45, 15],
    &[21, 105, 105],
    &[28, 210, 420, 105],
    &[36, 378, 1260, 945],
];

fn check_bessel_table() -> CheckResult {
    let mut checked = 0;
    for (row, magnitudes) in BESSEL_MAGNITUDES.iter().enumerate() {
        let q = row as u32 + 2;
        match bessel_number(q, 0) {
            Ok(1) => {}
            other => {
                return CheckResult::new(
                    "bessel-table",
                    false,
                    format!("a_({q},0) = {other:?}, expected 1"),
                )
            }
        }
        for (i, &mag) in magnitudes.iter().enumerate() {
            let k = i as u32 + 1;
            let expected = if k.is_multiple_of(2) { mag } else { -mag };
            match bessel_number(q, k) {
                Ok(v) if v == expected => checked += 1,
                other => {
                    return CheckResult::new(
                        "bessel-table",
                        false,
                        format!("a_({q},{k}) = {other:?}, expected {expected}"),
                    )
                }
            }
        }
    }
    CheckResult::new(
        "bessel-table",
        true,
        format!("{checked} signed entries match for q in 2..=9"),
    )
}

fn check_limit_constants() -> CheckResult {
    let expected = [(2u32, (64u128, 3u128)), (3, (192, 1)), (4, (12288, 5))];
    for (q, want) in expected {
        match limit_constant_sq(q) {
            Ok(got) if got == want => {}
            other => {
                return CheckResult::new(
                    "limit-constants",
                    false,
                    format!("c_{q}^2 = {other:?}, expected {want:?}"),
                )
            }
        }
    }
    CheckResult::new(
        "limit-constants",
        true,
        "c_2^2 = 64/3, c_3^2 = 192, c_4^2 = 2^9 4!/5".to_string(),
    )
}

fn check_expansions() -> CheckResult {
    let q3 = kailath_segall_expansion(3).map(|e| e.monomial_coeffs);
    let q8 = kailath_segall_expansion(8).map(|e| e.monomial_coeffs);
    let ok3 = q3 == Ok(vec![1, -3]);
    let ok8 = q8 == Ok(vec![1, -28, 210, -420, 105]);
    CheckResult::new(
        "kailath-segall-expansions",
        ok3 && ok8,
        if ok3 && ok8 {
            "q=3 and q=8 coefficient rows match".to_string()
        } else {
            "expansion rows differ from reference".to_string()
        },
    )
}

fn check_newton() -> CheckResult {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let path = simulate_brownian(1.0, 1e-3, seed).unwrap();
        let m = DiscretizedMartingale::from_brownian(&path);
        for q in 2..=8usize {
            let residual = check_newton_identity(&m, q).unwrap();
            let scale = newton_identity_scale(&m, q).unwrap();
            worst = worst.max(residual / scale);
        }
    }
    CheckResult::new(
        "newton-identity",
        worst <= 1e-9,
        format!("worst residual/scale = {worst:.2e} over 20 paths, q <= 8"),
    )
}

fn check_continuous_q2() -> CheckResult {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let path = simulate_brownian(1.0, 1e-3, seed).unwrap();
        let m = DiscretizedMartingale::from_brownian(&path);
        let defect = check_kailath_segall_continuous(&m, 2).unwrap();
        let scale = m
            .values()
            .iter()
            .zip(m.quad_var())
            .map(|(v, q)| (v * v + q).abs())
            .fold(1.0f64, f64::max);
        worst = worst.max(defect / scale);
    }
    CheckResult::new(
        "continuous-identity-q2",
        worst <= 1e-12,
        format!("worst defect/scale = {worst:.2e}"),
    )
}

fn check_refinement() -> CheckResult {
    let mut coarse_sum = 0.0;
    let mut fine_sum = 0.0;
    for seed in 0..20u64 {
        let fine = simulate_brownian(1.0, 1e-3, seed).unwrap();
        let coarse = fine.subsample(4).unwrap();
        fine_sum +=
            check_kailath_segall_continuous(&DiscretizedMartingale::from_brownian(&fine), 3)
                .unwrap();
        coarse_sum +=
            check_kailath_segall_continuous(&DiscretizedMartingale::from_brownian(&coarse), 3)
                .unwrap();
    }
    let ratio = fine_sum / coarse_sum;
    CheckResult::new(
        "continuous-identity-refinement",
        ratio < 0.7,
        format!("q=3 defect ratio under 4x refinement = {ratio:.3}"),
    )
}

fn check_field_identities() -> CheckResult {
    let dx = 0.01;
    let mut worst_mass: f64 = 0.0;
    let mut worst_fubini: f64 = 0.0;
    let mut worst_telescope: f64 = 0.0;
    for seed in 0..20u64 {
        let path = simulate_brownian(1.0, 1e-3, seed).unwrap();
        let field = local_time_field(&path, dx).unwrap();
        let t = field.horizon();
        worst_mass = worst_mass.max((field.mass() - t).abs() / t);
        for h in [0.4, 0.1] {
            let req = StatisticRequest::new(2, h, 0);
            let r2 = compensator(&field, &req).unwrap();
            worst_fubini = worst_fubini.max((r2 + 4.0 * h * t).abs() / (4.0 * h * t));
        }
        let req3 = StatisticRequest::new(3, 0.1, 0);
        let r3 = compensator(&field, &req3).unwrap();
        let scale = compensator_scale(&field, &req3).unwrap();
        worst_telescope = worst_telescope.max(r3.abs() / scale);
    }
    let passed = worst_mass <= 1e-9 && worst_fubini <= 1e-9 && worst_telescope <= 1e-9;
    CheckResult::new(
        "occupation-fubini-telescoping",
        passed,
        format!(
            "mass defect {worst_mass:.2e}, R_2 + 4ht defect {worst_fubini:.2e}, |R_3|/scale {worst_telescope:.2e}"
        ),
    )
}

fn check_q4_expansion() -> CheckResult {
    let a41 = bessel_number(4, 1).unwrap_or(0) * 4;
    let a42 = bessel_number(4, 2).unwrap_or(0) * 16;
    CheckResult::new(
        "q4-expansion",
        a41 == -24 && a42 == 48,
        format!("window coefficients (1, {a41}, {a42})"),
    )
}

/// Run every check, print one line per check, and report overall success.
pub fn run_suite() -> Vec<CheckResult> {
    vec![
        check_bessel_table(),
        check_limit_constants(),
        check_expansions(),
        check_q4_expansion(),
        check_newton(),
        check_continuous_q2(),
        check_refinement(),
        check_field_identities(),
    ]
}

pub fn print_results(results: &[CheckResult]) -> bool {
    let mut all_ok = true;
    for r in results {
        let status = if r.passed { "ok  " } else { "FAIL" };
        println!("{status} {:<32} {}", r.name, r.detail);
        all_ok &= r.passed;
    }
    let total = results.len();
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{total} identity checks passed");
    all_ok
}
