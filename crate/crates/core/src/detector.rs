//! Heuristic evidence that a Hankel transform has no closed product form.
//!
//! Compute the first few d_n^{(k)} exactly, factor numerators and
//! denominators, and look at the largest prime. Product formulas built from
//! factors linear in n and k only produce primes of roughly the size of the
//! indices; a prime far beyond that is strong evidence against one.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    factor_with_budget, serde_bigint, serde_rational, BigRational, Factorization,
    DEFAULT_FACTOR_BUDGET, TRIAL_DIVISION_LIMIT,
};
use crate::error::{Error, Result};
use crate::hankel::{transform_bareiss, TransformValue};
use crate::recurrence::SequenceWindow;

/// d_1^{(k)} … d_{n_max}^{(k)} of raw terms, by Bareiss elimination.
pub fn transform_sequence(
    terms: &SequenceWindow,
    n_max: usize,
    k: usize,
) -> Result<Vec<TransformValue>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    terms.require(k, k + 2 * n_max - 2)?;
    (1..=n_max)
        .into_par_iter()
        .map(|n| transform_bareiss(terms, n, k))
        .collect()
}

/// 1000·(2·n_max + k + 2)².
pub fn default_bound(n_max: usize, k: usize) -> BigInt {
    let scale = BigInt::from(2 * n_max + k + 2);
    BigInt::from(1000) * &scale * &scale
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    /// Factorization of |numerator|; absent for a zero value.
    pub num_factors: Option<Factorization>,
    pub den_factors: Option<Factorization>,
    /// Largest prime found in either factorization, 0 when there is none.
    #[serde(with = "serde_bigint")]
    pub largest_prime: BigInt,
    /// No prime factor exceeds the bound. An unsplit composite left after
    /// trial division counts as exceeding any bound below the trial-division
    /// limit, since all of its prime factors are at least that large.
    pub smooth: bool,
    /// Both factorizations finished within the work budget.
    pub complete: bool,
}

impl FactorizationReport {
    /// ±∏num / ∏den, rebuilt from the factorizations.
    pub fn reconstruct(&self) -> BigRational {
        match (&self.num_factors, &self.den_factors) {
            (Some(num), Some(den)) => {
                let magnitude = BigRational::new(num.product(), den.product());
                if self.value.is_negative() {
                    -magnitude
                } else {
                    magnitude
                }
            }
            _ => BigRational::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ProductFormPlausible,
    NoProductFormLikely,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ProductFormPlausible => "product_form_plausible",
            Verdict::NoProductFormLikely => "no_product_form_likely",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorVerdict {
    pub reports: Vec<FactorizationReport>,
    pub verdict: Verdict,
    #[serde(with = "serde_bigint")]
    pub bound_used: BigInt,
}

impl DetectorVerdict {
    pub fn largest_prime(&self) -> BigInt {
        self.reports
            .iter()
            .map(|r| r.largest_prime.clone())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn factor_part(x: &BigInt, budget: u64) -> Factorization {
    match factor_with_budget(x, budget) {
        Ok(f) => f,
        Err(Error::FactorTimeout { partial }) => *partial,
        Err(e) => unreachable!("factoring a positive integer: {e}"),
    }
}

fn report(v: &TransformValue, bound: &BigInt, budget: u64) -> FactorizationReport {
    if v.value.is_zero() {
        return FactorizationReport {
            n: v.n,
            k: v.k,
            value: v.value.clone(),
            num_factors: None,
            den_factors: None,
            largest_prime: BigInt::zero(),
            smooth: true,
            complete: true,
        };
    }
    let num = factor_part(&v.value.numer().abs(), budget);
    let den = factor_part(v.value.denom(), budget);
    let largest_prime = [&num, &den]
        .iter()
        .filter_map(|f| f.largest_prime())
        .max()
        .cloned()
        .unwrap_or_else(BigInt::zero);
    let complete = num.is_complete() && den.is_complete();
    let leftover_exceeds = !complete && *bound < BigInt::from(TRIAL_DIVISION_LIMIT);
    FactorizationReport {
        n: v.n,
        k: v.k,
        value: v.value.clone(),
        num_factors: Some(num),
        den_factors: Some(den),
        smooth: largest_prime <= *bound && !leftover_exceeds,
        largest_prime,
        complete,
    }
}

/// Factor every nonzero value and judge smoothness against `bound`.
pub fn analyze(values: &[TransformValue], bound: &BigInt) -> DetectorVerdict {
    analyze_with_budget(values, bound, DEFAULT_FACTOR_BUDGET)
}

pub fn analyze_with_budget(
    values: &[TransformValue],
    bound: &BigInt,
    budget: u64,
) -> DetectorVerdict {
    let reports: Vec<FactorizationReport> = values
        .par_iter()
        .map(|v| report(v, bound, budget))
        .collect();
    let verdict = if reports.iter().any(|r| !r.smooth) {
        Verdict::NoProductFormLikely
    } else if reports.iter().any(|r| !r.complete) {
        Verdict::Inconclusive
    } else {
        Verdict::ProductFormPlausible
    };
    DetectorVerdict {
        reports,
        verdict,
        bound_used: bound.clone(),
    }
}

/// Terms of a_{n+1} = ratio(n)·a_n for an arbitrary rational ratio, for
/// sequences outside the linear family.
pub fn iterate_ratio(
    a0: BigRational,
    count: usize,
    ratio: impl Fn(usize) -> BigRational,
) -> SequenceWindow {
    let mut terms = Vec::with_capacity(count);
    let mut a = a0;
    for n in 0..count {
        terms.push(a.clone());
        a *= ratio(n);
    }
    SequenceWindow::from_terms(terms)
}

/// Text summary, one line per n.
pub fn render_text(v: &DetectorVerdict) -> String {
    use crate::arith::format_rational;
    let fmt_factors = |f: &Option<Factorization>| match f {
        None => "-".to_string(),
        Some(f) if f.factors.is_empty() && f.unfactored.is_empty() => "1".to_string(),
        Some(f) => {
            let mut parts: Vec<String> = f
                .factors
                .iter()
                .map(|(p, e)| {
                    if *e == 1 {
                        p.to_string()
                    } else {
                        format!("{p}^{e}")
                    }
                })
                .collect();
            parts.extend(f.unfactored.iter().map(|c| format!("[{c}]")));
            parts.join("*")
        }
    };
    let mut out = String::new();
    for r in &v.reports {
        let sign = if r.value.is_negative() { "-" } else { "" };
        out.push_str(&format!(
            "d_{}^({}) = {}  =  {}({}) / ({})  largest prime {}{}\n",
            r.n,
            r.k,
            format_rational(&r.value),
            sign,
            fmt_factors(&r.num_factors),
            fmt_factors(&r.den_factors),
            r.largest_prime,
            if r.smooth { "" } else { "  [exceeds bound]" },
        ));
    }
    out.push_str(&format!(
        "bound {}  largest prime {}  verdict {}\n",
        v.bound_used,
        v.largest_prime(),
        v.verdict
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::recurrence::{window, RecurrenceSpec};

    fn inverse_squares(count: usize) -> SequenceWindow {
        SequenceWindow::from_terms((1..=count as i64).map(|n| rat(1, n * n)).collect())
    }

    #[test]
    fn default_bound_examples() {
        assert_eq!(default_bound(7, 0), BigInt::from(256_000));
        assert_eq!(default_bound(1, 0), BigInt::from(16_000));
        assert_eq!(default_bound(3, 2), BigInt::from(100_000));
    }

    #[test]
    fn transform_sequence_examples() {
        let v = transform_sequence(&inverse_squares(5), 3, 0).unwrap();
        let den = BigInt::from(256 * 729 * 25);
        assert_eq!(v[2].value, BigRational::new(BigInt::from(647), den));

        let cat = window(&RecurrenceSpec::from_ints(4, -6, 2).unwrap(), 0, 7);
        let v = transform_sequence(&cat, 4, 0).unwrap();
        assert!(v.iter().all(|t| t.value == int(1)));

        let ones = SequenceWindow::from_terms(vec![int(1); 5]);
        let v: Vec<_> = transform_sequence(&ones, 3, 0)
            .unwrap()
            .into_iter()
            .map(|t| t.value)
            .collect();
        assert_eq!(v, vec![int(1), int(0), int(0)]);

        assert!(matches!(
            transform_sequence(&ones, 4, 0),
            Err(Error::InsufficientTerms { .. })
        ));
    }

    #[test]
    fn zero_values_are_reported_not_factored() {
        let ones = SequenceWindow::from_terms(vec![int(1); 5]);
        let v = transform_sequence(&ones, 3, 0).unwrap();
        let verdict = analyze(&v, &default_bound(3, 0));
        assert_eq!(verdict.verdict, Verdict::ProductFormPlausible);
        assert_eq!(verdict.reports.len(), 3);
        assert!(verdict.reports[1].num_factors.is_none());
        assert_eq!(verdict.largest_prime(), BigInt::zero());
    }

    #[test]
    fn inverse_squares_are_flagged() {
        let v = transform_sequence(&inverse_squares(13), 7, 0).unwrap();
        let verdict = analyze(&v, &default_bound(7, 0));
        assert_eq!(verdict.verdict, Verdict::NoProductFormLikely);
        assert_eq!(
            verdict.largest_prime().to_string(),
            "1280587616051046200369"
        );
        for r in &verdict.reports {
            assert_eq!(r.reconstruct(), r.value);
        }
        // Raising the bound past every prime flips nothing the other way.
        let huge = analyze(&v, &verdict.largest_prime());
        assert_eq!(huge.verdict, Verdict::ProductFormPlausible);
    }

    #[test]
    fn unsplit_composites() {
        let p = BigInt::from(1_000_000_000_039u64);
        let q = BigInt::from(1_000_000_000_061u64);
        let value = TransformValue {
            n: 1,
            k: 0,
            value: BigRational::from_integer(&p * &q * 6),
            method: crate::hankel::Method::Bareiss,
            fallback: false,
        };
        // Below the trial-division limit the leftover composite must exceed the bound.
        let low = analyze_with_budget(std::slice::from_ref(&value), &BigInt::from(1000), 1);
        assert_eq!(low.verdict, Verdict::NoProductFormLikely);
        assert!(!low.reports[0].complete);
        let high = analyze_with_budget(std::slice::from_ref(&value), &BigInt::from(10_000_000), 1);
        assert_eq!(high.verdict, Verdict::Inconclusive);
        assert_eq!(high.reports[0].reconstruct(), value.value);
    }

    #[test]
    fn json_report_shape() {
        let v = transform_sequence(&inverse_squares(5), 3, 0).unwrap();
        let verdict = analyze(&v, &default_bound(3, 0));
        let json = serde_json::to_value(&verdict).unwrap();
        assert_eq!(json["verdict"], "product_form_plausible");
        assert_eq!(json["reports"][2]["value"], "647/4665600");
        assert_eq!(
            json["reports"][2]["num_factors"]["factors"],
            serde_json::json!([["647", 1]])
        );
        assert_eq!(
            json["reports"][2]["den_factors"]["factors"],
            serde_json::json!([["2", 8], ["3", 6], ["5", 2]])
        );
        let back: DetectorVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back, verdict);
    }
}
