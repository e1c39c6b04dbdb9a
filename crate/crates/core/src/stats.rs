//! Test statistics used by the three analysis steps: the binomial
//! chi-square on operator counts, 2x2 chi-square, Fisher's exact test and the
//! chi-square(1) survival function.
//!
//! Every p-value also carries its base-10 logarithm so tails far below the
//! `f64` range stay reportable.

use std::f64::consts::PI;
use std::fmt;

use libm::erfc;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{BmcmError, Result};

/// Relative slack when comparing hypergeometric probabilities in
/// [`fisher_exact`].
pub const FISHER_RELATIVE_TOLERANCE: f64 = 1e-7;

/// Beyond this `z = sqrt(x / 2)` the survival function switches from
/// `erfc` to a log-scale continued fraction.
const LOG_TAIL_Z: f64 = 26.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub log10_p_value: f64,
    pub dof: u32,
}

impl TestResult {
    fn from_ln_p(statistic: f64, ln_p: f64, dof: u32) -> Self {
        let ln_p = ln_p.min(0.0);
        TestResult {
            statistic,
            p_value: ln_p.exp(),
            log10_p_value: ln_p / std::f64::consts::LN_10,
            dof,
        }
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// A 2x2 contingency table. Rows are predictor positive / negative, columns
/// outcome 1 / outcome 0:
///
/// ```text
///            outcome=1  outcome=0
/// positive       a          b
/// negative       c          d
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Table2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Table2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Table2x2 { a, b, c, d }
    }

    pub fn n(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn row_margins(&self) -> (u64, u64) {
        (self.a + self.b, self.c + self.d)
    }

    pub fn col_margins(&self) -> (u64, u64) {
        (self.a + self.c, self.b + self.d)
    }

    pub fn transpose(&self) -> Self {
        Table2x2::new(self.a, self.c, self.b, self.d)
    }

    pub fn swap_rows(&self) -> Self {
        Table2x2::new(self.c, self.d, self.a, self.b)
    }

    pub fn swap_cols(&self) -> Self {
        Table2x2::new(self.b, self.a, self.d, self.c)
    }

    /// `a / (a + c)`, or `None` without outcome-positive rows.
    pub fn sensitivity(&self) -> Option<f64> {
        let pos = self.a + self.c;
        (pos > 0).then(|| self.a as f64 / pos as f64)
    }

    /// `d / (b + d)`, or `None` without outcome-negative rows.
    pub fn specificity(&self) -> Option<f64> {
        let neg = self.b + self.d;
        (neg > 0).then(|| self.d as f64 / neg as f64)
    }
}

impl fmt::Display for Table2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Natural log of the chi-square(1) survival function.
pub fn ln_chi2_sf(x: f64, dof: u32) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(BmcmError::Domain(x));
    }
    if dof != 1 {
        return Err(BmcmError::UnsupportedDof(dof));
    }
    let z = (x / 2.0).sqrt();
    if z < LOG_TAIL_Z {
        Ok(erfc(z).ln())
    } else {
        Ok(ln_erfc_tail(z))
    }
}

/// Survival function of chi-square with one degree of freedom,
/// `erfc(sqrt(x / 2))`.
pub fn chi2_sf(x: f64, dof: u32) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(BmcmError::Domain(x));
    }
    if dof != 1 {
        return Err(BmcmError::UnsupportedDof(dof));
    }
    let z = (x / 2.0).sqrt();
    if z < LOG_TAIL_Z {
        Ok(erfc(z))
    } else {
        Ok(ln_erfc_tail(z).exp())
    }
}

/// `ln erfc(z)` for large `z` from the Laplace continued fraction
/// `erfc z = exp(-z^2) / sqrt(pi) * 1 / (z + (1/2) / (z + 1 / (z + (3/2) / (z + ...))))`.
fn ln_erfc_tail(z: f64) -> f64 {
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + (k as f64 / 2.0) / tail;
    }
    -z * z - 0.5 * PI.ln() - tail.ln()
}

fn chi2_result(statistic: f64) -> Result<TestResult> {
    let ln_p = ln_chi2_sf(statistic, 1)?;
    Ok(TestResult {
        statistic,
        p_value: chi2_sf(statistic, 1)?,
        log10_p_value: ln_p / std::f64::consts::LN_10,
        dof: 1,
    })
}

/// Chi-square test of `H0: p = 1/2` on two complementary counts, without
/// continuity correction.
pub fn binomial_chisq(count_and: u64, count_or: u64) -> Result<TestResult> {
    let n = count_and + count_or;
    if n == 0 {
        return Err(BmcmError::UndefinedTest);
    }
    let expected = n as f64 / 2.0;
    let dev_and = count_and as f64 - expected;
    let dev_or = count_or as f64 - expected;
    chi2_result((dev_and * dev_and + dev_or * dev_or) / expected)
}

/// Continuity handling for [`contingency_chisq_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuity {
    None,
    /// `N (|ad - bc| - N/2)^2 / margins`, subtracting `N/2` unconditionally.
    Yates,
    /// As [`Continuity::Yates`] but the deviation is floored at zero.
    ClampedYates,
}

/// Pearson chi-square on a 2x2 table; `corrected` selects
/// [`Continuity::Yates`].
pub fn contingency_chisq(table: &Table2x2, corrected: bool) -> Result<TestResult> {
    let continuity = if corrected {
        Continuity::Yates
    } else {
        Continuity::None
    };
    contingency_chisq_with(table, continuity)
}

pub fn contingency_chisq_with(table: &Table2x2, continuity: Continuity) -> Result<TestResult> {
    let (r1, r2) = table.row_margins();
    let (c1, c2) = table.col_margins();
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Err(BmcmError::DegenerateTable);
    }
    let n = table.n() as f64;
    let cross =
        (table.a as i128 * table.d as i128 - table.b as i128 * table.c as i128).abs() as f64;
    let deviation = match continuity {
        Continuity::None => cross,
        Continuity::Yates => cross - n / 2.0,
        Continuity::ClampedYates => (cross - n / 2.0).max(0.0),
    };
    let denominator = r1 as f64 * r2 as f64 * c1 as f64 * c2 as f64;
    chi2_result(n * deviation * deviation / denominator)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Two-sided Fisher exact test. `statistic` holds the observed table's
/// hypergeometric probability; `dof` is 0.
pub fn fisher_exact(table: &Table2x2) -> TestResult {
    let (r1, r2) = table.row_margins();
    let (c1, _) = table.col_margins();
    let n = table.n();
    let ln_prob = |a: u64| ln_choose(r1, a) + ln_choose(r2, c1 - a) - ln_choose(n, c1);

    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let ln_observed = ln_prob(table.a);
    let cutoff = ln_observed + FISHER_RELATIVE_TOLERANCE.ln_1p();
    let scaled: f64 = (lo..=hi)
        .map(ln_prob)
        .filter(|&lp| lp <= cutoff)
        .map(|lp| (lp - ln_observed).exp())
        .sum();
    let ln_p = ln_observed + scaled.ln();
    TestResult::from_ln_p(ln_observed.exp().min(1.0), ln_p, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn binomial_reference_value() {
        let r = binomial_chisq(738, 1005).unwrap();
        assert!((r.statistic - 40.9).abs() < 0.05, "{}", r.statistic);
        assert!(rel(r.p_value, 1.6e-10) < 0.2, "{}", r.p_value);
        assert_eq!(r.dof, 1);
    }

    #[test]
    fn binomial_balanced_and_small() {
        for k in [1, 7, 1000] {
            let r = binomial_chisq(k, k).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p_value, 1.0);
        }
        let r = binomial_chisq(3, 5).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
        // erfc(0.5)
        assert!(rel(r.p_value, 0.479_500_122_186_953_5) < 1e-12);
        assert_eq!(binomial_chisq(0, 0).unwrap_err(), BmcmError::UndefinedTest);
        assert_eq!(binomial_chisq(0, 4).unwrap().statistic, 4.0);
    }

    #[test]
    fn chi2_sf_reference_values() {
        // mpmath erfc(sqrt(x/2)) at 40 digits.
        let cases = [
            (0.001, 0.974_772_879_369_960_4),
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.317_310_507_862_914_1),
            (10.0, 1.565_402_258_002_549_7e-3),
            (40.9, 1.602_211_395_572_519e-10),
            (100.0, 1.523_970_604_832_105e-23),
            (500.0, 9.505_397_766_554_092e-111),
            (1000.0, 1.795_832_784_800_726_2e-219),
            (1300.0, 1.130_372_844_149_274_2e-284),
            (1380.0, 4.661_158_455_673_913e-302),
        ];
        for (x, expected) in cases {
            let p = chi2_sf(x, 1).unwrap();
            assert!(rel(p, expected) <= 1e-10, "x={x}: {p} vs {expected}");
        }
        assert_eq!(chi2_sf(0.0, 1).unwrap(), 1.0);
        let crit = chi2_sf(3.841_458_820_694_124, 1).unwrap();
        assert!((crit - 0.05).abs() < 1e-4);
    }

    #[test]
    fn chi2_sf_far_tail_in_log_scale() {
        // Past f64 underflow the log stays finite.
        let ln_p = ln_chi2_sf(5000.0, 1).unwrap();
        assert!(ln_p.is_finite() && ln_p < -2400.0);
        assert_eq!(chi2_sf(5000.0, 1).unwrap(), 0.0);
        // Both branches agree where they meet.
        let x = 2.0 * LOG_TAIL_Z * LOG_TAIL_Z;
        let below = erfc(LOG_TAIL_Z).ln();
        assert!((ln_erfc_tail(LOG_TAIL_Z) - below).abs() < 1e-10 * below.abs());
        assert!(ln_chi2_sf(x, 1).is_ok());
    }

    #[test]
    fn chi2_sf_errors() {
        assert_eq!(chi2_sf(-1.0, 1).unwrap_err(), BmcmError::Domain(-1.0));
        assert!(matches!(chi2_sf(f64::NAN, 1), Err(BmcmError::Domain(_))));
        assert_eq!(chi2_sf(1.0, 2).unwrap_err(), BmcmError::UnsupportedDof(2));
    }

    #[test]
    fn corrected_contingency_reference_tables() {
        let r = contingency_chisq(&Table2x2::new(120, 0, 0, 122), true).unwrap();
        assert!((r.statistic - 238.016_257_959_703_2).abs() < 1e-9);
        assert!(rel(r.p_value, 1.064_773_342_487_953_7e-53) < 1e-9);

        let r = contingency_chisq(&Table2x2::new(500, 131, 0, 369), true).unwrap();
        assert!((r.statistic - 581.620_776_588_114_5).abs() < 1e-9);
        assert!(rel(r.p_value, 1.665_442_622_022_821e-128) < 1e-9);

        let r = contingency_chisq(&Table2x2::new(58, 59, 65, 65), true).unwrap();
        assert!((r.statistic - 0.003_644).abs() < 1e-6, "{}", r.statistic);
        assert!((r.p_value - 0.95).abs() < 0.01);

        let r = contingency_chisq(&Table2x2::new(10, 0, 0, 10), true).unwrap();
        assert!((r.statistic - 16.2).abs() < 1e-12);
        assert!(rel(r.p_value, 5.699_411_623_331_844e-5) < 1e-10);
    }

    #[test]
    fn clamped_yates_floors_small_deviations() {
        let t = Table2x2::new(58, 59, 65, 65);
        let r = contingency_chisq_with(&t, Continuity::ClampedYates).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn uncorrected_contingency() {
        let r = contingency_chisq(&Table2x2::new(120, 0, 0, 122), false).unwrap();
        assert!((r.statistic - 242.0).abs() < 1e-9);
        let r = contingency_chisq(&Table2x2::new(4, 2, 6, 3), false).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(
            contingency_chisq(&Table2x2::new(3, 0, 5, 0), false).unwrap_err(),
            BmcmError::DegenerateTable
        );
    }

    #[test]
    fn fisher_small_tables() {
        assert!((fisher_exact(&Table2x2::new(1, 1, 1, 1)).p_value - 1.0).abs() < 1e-12);
        let r = fisher_exact(&Table2x2::new(2, 0, 0, 2));
        assert!(rel(r.p_value, 1.0 / 3.0) < 1e-12);
        assert!(rel(r.statistic, 1.0 / 6.0) < 1e-12);
        assert_eq!(r.dof, 0);
        // Degenerate margins.
        assert_eq!(fisher_exact(&Table2x2::new(0, 0, 3, 4)).p_value, 1.0);
        assert_eq!(fisher_exact(&Table2x2::new(0, 0, 0, 0)).p_value, 1.0);
    }

    #[test]
    fn fisher_extreme_table() {
        let r = fisher_exact(&Table2x2::new(120, 0, 0, 122));
        assert!(r.p_value < 1e-53);
        assert!(r.p_value > 0.0);
        // One-sided term 1 / C(242, 120) bounds the p-value from below.
        let ln_one_sided = -ln_choose(242, 120);
        assert!(r.log10_p_value * std::f64::consts::LN_10 >= ln_one_sided - 1e-9);
        assert!(r.log10_p_value * std::f64::consts::LN_10 <= ln_one_sided + 2f64.ln() + 1e-9);
    }

    #[test]
    fn table_measures() {
        let t = Table2x2::new(500, 131, 0, 369);
        assert_eq!(t.sensitivity(), Some(1.0));
        assert!((t.specificity().unwrap() - 0.738).abs() < 1e-12);
        assert_eq!(t.transpose(), Table2x2::new(500, 0, 131, 369));
        assert_eq!(Table2x2::new(0, 1, 0, 1).sensitivity(), None);
    }
}
