//! Closed-form product evaluations of d_n^{(k)} for sequences with
//! a_{n+1} = (α + β/(n+γ))·a_n.
//!
//! The chain is:
//!
//! * [`det_m`] / [`det_m_recurrence_step`]: the auxiliary family M_n(a, b, c)
//!   with entries m′_ij = ∏_{s=1}^{i−1} (a(s+j)+b)/(s+j+c);
//! * [`lemma_substitution`] maps a spec and offset k to (a, b, c) so that
//!   H_n^{(k)} is M_n(a, b, c) with column j scaled by a_{j+k−1};
//! * [`d_lemma`]: the resulting first expression for d_n^{(k)};
//! * [`ratio_in_k`] and [`ratio_in_n`]: the two ratio recurrences;
//! * [`d_principal`]: the double-product identity they telescope to;
//! * [`d_reciprocal`]: the same identity for the sequence 1/a_n.
//!
//! A vanishing denominator factor is reported as [`EvalOutcome::Singular`]
//! rather than an error, so callers can fall back to a determinant oracle.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, format_rational, from_usize, pow, BigRational};
use crate::error::{Error, Result};
use crate::hankel::{build_matrix, det_bareiss, det_condensation, Grid, Method, TransformValue};
use crate::recurrence::{window, RecurrenceSpec};

/// Where a closed form hit a zero denominator factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Singularity {
    /// Symbolic shape of the vanishing factor, e.g. `"i+1+c"`.
    pub factor: &'static str,
    pub i: usize,
    pub j: Option<usize>,
}

impl std::fmt::Display for Singularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.j {
            Some(j) => write!(f, "[{}] = 0 at i={}, j={}", self.factor, self.i, j),
            None => write!(f, "[{}] = 0 at i={}", self.factor, self.i),
        }
    }
}

impl From<Singularity> for Error {
    fn from(s: Singularity) -> Self {
        Error::SingularDenominator {
            factor: s.factor.to_string(),
            location: match s.j {
                Some(j) => format!("i={}, j={}", s.i, j),
                None => format!("i={}", s.i),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(BigRational),
    Singular(Singularity),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            EvalOutcome::Singular(_) => None,
        }
    }

    pub fn into_result(self) -> Result<BigRational> {
        match self {
            EvalOutcome::Value(v) => Ok(v),
            EvalOutcome::Singular(s) => Err(s.into()),
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, EvalOutcome::Singular(_))
    }
}

impl From<std::result::Result<BigRational, Singularity>> for EvalOutcome {
    fn from(r: std::result::Result<BigRational, Singularity>) -> Self {
        match r {
            Ok(v) => EvalOutcome::Value(v),
            Err(s) => EvalOutcome::Singular(s),
        }
    }
}

type Partial = std::result::Result<BigRational, Singularity>;

/// Divide `acc` by `den`, or report `factor` at (i, j) if `den` is zero.
fn checked_div(
    acc: BigRational,
    den: &BigRational,
    factor: &'static str,
    i: usize,
    j: Option<usize>,
) -> Partial {
    if den.is_zero() {
        Err(Singularity { factor, i, j })
    } else {
        Ok(acc / den)
    }
}

/// Parameters of the auxiliary matrix M_n(a, b, c).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MnParams {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub n: usize,
}

impl MnParams {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, n: usize) -> Self {
        MnParams { a, b, c, n }
    }
}

/// The explicit n×n matrix m′_ij = ∏_{s=1}^{i−1} (a(s+j)+b)/(s+j+c), 1-based.
pub fn m_matrix(p: &MnParams) -> std::result::Result<Grid, Singularity> {
    (1..=p.n)
        .map(|i| {
            (1..=p.n)
                .map(|j| {
                    (1..i).try_fold(BigRational::one(), |acc, s| {
                        let sj = from_usize(s + j);
                        let num = &p.a * &sj + &p.b;
                        checked_div(acc * num, &(sj + &p.c), "s+j+c", i, Some(j))
                    })
                })
                .collect()
        })
        .collect()
}

/// det M_n(a,b,c) = ∏_{i=1}^{n−1} i!·[a(i−1)+ac−b]^{n−i} / ∏_{i=1}^{n−1} [i+1+c]^i·[2n−i+c]^i.
pub fn det_m(p: &MnParams) -> EvalOutcome {
    let n = p.n;
    let ac_minus_b = &p.a * &p.c - &p.b;
    let result = (1..n).try_fold(BigRational::one(), |acc, i| {
        let linear = &p.a * from_usize(i - 1) + &ac_minus_b;
        let acc = acc * BigRational::from_integer(factorial(i)) * pow(&linear, n - i);
        let left = pow(&(from_usize(i + 1) + &p.c), i);
        let acc = checked_div(acc, &left, "i+1+c", i, None)?;
        let right = pow(&(from_usize(2 * n - i) + &p.c), i);
        checked_div(acc, &right, "2n-i+c", i, None)
    });
    result.into()
}

/// One step of det M_n(a,b,c) = coefficient · det M_{n−1}(a, a+b, c+2), with
/// coefficient = (n−1)!·(ac−b)^{n−1} / ∏_{i=1}^{n−1} (i+1+c)(i+2+c).
pub fn det_m_recurrence_step(p: &MnParams) -> Result<(BigRational, MnParams)> {
    if p.n < 2 {
        return Err(Error::InvalidArgument(
            "the M_n recurrence needs n >= 2".into(),
        ));
    }
    let n = p.n;
    let ac_minus_b = &p.a * &p.c - &p.b;
    let mut coefficient = BigRational::from_integer(factorial(n - 1)) * pow(&ac_minus_b, n - 1);
    for i in 1..n {
        coefficient = checked_div(coefficient, &(from_usize(i + 1) + &p.c), "i+1+c", i, None)?;
        coefficient = checked_div(coefficient, &(from_usize(i + 2) + &p.c), "i+2+c", i, None)?;
    }
    let reduced = MnParams {
        a: p.a.clone(),
        b: &p.a + &p.b,
        c: &p.c + from_usize(2),
        n: n - 1,
    };
    Ok((coefficient, reduced))
}

/// det M_n by chaining [`det_m_recurrence_step`] down to M_1 = (1).
pub fn det_m_by_recurrence(p: &MnParams) -> Result<BigRational> {
    let mut acc = BigRational::one();
    let mut current = p.clone();
    while current.n >= 2 {
        let (coefficient, reduced) = det_m_recurrence_step(&current)?;
        acc *= coefficient;
        current = reduced;
    }
    Ok(acc)
}

/// (a, b, c) = (α, αγ+αk−2α+β, γ+k−2): with these, H_n^{(k)} equals
/// M_n(a, b, c) after scaling column j by a_{j+k−1}.
pub fn lemma_substitution(spec: &RecurrenceSpec, n: usize, k: usize) -> MnParams {
    let alpha = spec.alpha();
    let shift = spec.gamma() + from_usize(k) - from_usize(2);
    MnParams {
        a: alpha.clone(),
        b: alpha * &shift + spec.beta(),
        c: shift,
        n,
    }
}

/// d_n^{(k)} = a_k···a_{k+n−1} · ∏_{i=1}^{n−1} i!·[α(i−1)−β]^{n−i}
///             / ∏_{i=1}^{n−1} [i+k+γ−1]^i·[2n−i+k+γ−2]^i.
///
/// The term product uses the spec's own a₀, which is the a₀ = 1 product
/// times a₀ⁿ.
pub fn d_lemma(spec: &RecurrenceSpec, n: usize, k: usize) -> EvalOutcome {
    if n == 0 {
        return EvalOutcome::Value(BigRational::one());
    }
    let (alpha, beta, gamma) = (spec.alpha(), spec.beta(), spec.gamma());
    let terms = window(spec, k, n);
    let start: BigRational = terms.terms.iter().product();
    let result = (1..n).try_fold(start, |acc, i| {
        let linear = alpha * from_usize(i - 1) - beta;
        let acc = acc * BigRational::from_integer(factorial(i)) * pow(&linear, n - i);
        let left = from_usize(i + k) + gamma - BigRational::one();
        let acc = checked_div(acc, &pow(&left, i), "i+k+gamma-1", i, None)?;
        let right = from_usize(2 * n - i + k) + gamma - from_usize(2);
        checked_div(acc, &pow(&right, i), "2n-i+k+gamma-2", i, None)
    });
    result.into()
}

/// d_n^{(j+1)} / d_n^{(j)} = ∏_{i=1}^{n} [α(i+j+γ−1)+β] / [i+j+γ+n−2].
pub fn ratio_in_k(spec: &RecurrenceSpec, n: usize, j: usize) -> Result<BigRational> {
    Ok(k_row(spec, n, j)?)
}

fn k_row(spec: &RecurrenceSpec, n: usize, j: usize) -> Partial {
    let (alpha, beta, gamma) = (spec.alpha(), spec.beta(), spec.gamma());
    (1..=n).try_fold(BigRational::one(), |acc, i| {
        let num = alpha * (from_usize(i + j) + gamma - BigRational::one()) + beta;
        let den = from_usize(i + j + n) + gamma - from_usize(2);
        checked_div(acc * num, &den, "i+j+gamma+n-2", i, Some(j))
    })
}

/// d_{j+1}^{(0)} / d_j^{(0)} for the a₀ = 1 normalization:
/// ∏_{i=1}^{j} i·[α(i+γ−1)+β]·[α(i−1)−β] / ([i+γ−1][i+j+γ−2][i+j+γ−1]).
pub fn ratio_in_n(spec: &RecurrenceSpec, j: usize) -> Result<BigRational> {
    Ok(principal_row(spec, j)?)
}

/// The inner product over i for a fixed j in the first factor of the
/// principal identity; shared by [`ratio_in_n`] and [`d_principal`].
fn principal_row(spec: &RecurrenceSpec, j: usize) -> Partial {
    let (alpha, beta, gamma) = (spec.alpha(), spec.beta(), spec.gamma());
    let one = BigRational::one();
    (1..=j).try_fold(BigRational::one(), |acc, i| {
        let shifted = from_usize(i) + gamma - &one;
        let num = from_usize(i) * (alpha * &shifted + beta) * (alpha * from_usize(i - 1) - beta);
        let acc = checked_div(acc * num, &shifted, "i+gamma-1", i, Some(j))?;
        let d1 = from_usize(i + j) + gamma - from_usize(2);
        let acc = checked_div(acc, &d1, "i+j+gamma-2", i, Some(j))?;
        let d2 = from_usize(i + j) + gamma - &one;
        checked_div(acc, &d2, "i+j+gamma-1", i, Some(j))
    })
}

/// The principal identity:
///
/// d_n^{(k)} = a₀ⁿ · ∏_{1≤i≤j≤n−1} i[α(i+γ−1)+β][α(i−1)−β] / ([i+γ−1][i+j+γ−2][i+j+γ−1])
///                 · ∏_{j=0}^{k−1} ∏_{i=1}^{n} [α(i+j+γ−1)+β] / [i+j+γ+n−2].
///
/// d₀^{(k)} = 1.
pub fn d_principal(spec: &RecurrenceSpec, n: usize, k: usize) -> EvalOutcome {
    if n == 0 {
        return EvalOutcome::Value(BigRational::one());
    }
    let result = (|| -> Partial {
        let mut acc = pow(spec.a0(), n);
        for j in 1..n {
            if acc.is_zero() {
                break;
            }
            acc *= principal_row(spec, j)?;
        }
        for j in 0..k {
            if acc.is_zero() {
                break;
            }
            acc *= k_row(spec, n, j)?;
        }
        Ok(acc)
    })();
    result.into()
}

/// d_n^{(k)} of the reciprocal sequence 1/a_n, evaluated directly:
///
/// (1/a₀)ⁿ · ∏_{1≤i≤j≤n−1} i[i+γ−1][α(i−1)+β] / ([α(i+γ−1)+β][α(i+j+γ−2)+β][α(i+j+γ−1)+β])
///         · ∏_{j=0}^{k−1} ∏_{i=1}^{n} [i+j+γ−1] / [α(i+j+γ+n−2)+β].
///
/// Valid for α = 0 as well, provided β ≠ 0.
pub fn d_reciprocal(spec: &RecurrenceSpec, n: usize, k: usize) -> Result<EvalOutcome> {
    if spec.a0().is_zero() {
        return Err(Error::ZeroTerm { index: "0".into() });
    }
    if let Some(step) = spec.first_vanishing_step() {
        return Err(Error::ZeroTerm {
            index: (step + 1).to_string(),
        });
    }
    if n == 0 {
        return Ok(EvalOutcome::Value(BigRational::one()));
    }
    let (alpha, beta, gamma) = (spec.alpha(), spec.beta(), spec.gamma());
    let one = BigRational::one();
    let lin = |m: BigRational| alpha * m + beta;
    let result = (|| -> Partial {
        let mut acc = pow(&spec.a0().recip(), n);
        for j in 1..n {
            for i in 1..=j {
                let shifted = from_usize(i) + gamma - &one;
                let num = from_usize(i) * &shifted * lin(from_usize(i - 1));
                acc = checked_div(
                    acc * num,
                    &lin(shifted),
                    "alpha(i+gamma-1)+beta",
                    i,
                    Some(j),
                )?;
                let d1 = lin(from_usize(i + j) + gamma - from_usize(2));
                acc = checked_div(acc, &d1, "alpha(i+j+gamma-2)+beta", i, Some(j))?;
                let d2 = lin(from_usize(i + j) + gamma - &one);
                acc = checked_div(acc, &d2, "alpha(i+j+gamma-1)+beta", i, Some(j))?;
            }
        }
        for j in 0..k {
            for i in 1..=n {
                let num = from_usize(i + j) + gamma - &one;
                let den = lin(from_usize(i + j + n) + gamma - from_usize(2));
                acc = checked_div(acc * num, &den, "alpha(i+j+gamma+n-2)+beta", i, Some(j))?;
            }
        }
        Ok(acc)
    })();
    Ok(result.into())
}

/// Which evaluator [`transform`] should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Closed,
    Bareiss,
    Condensation,
    /// Closed form, falling back to Bareiss on a singular factor.
    Auto,
}

/// d_n^{(k)} of the sequence generated by `spec`.
pub fn transform(
    spec: &RecurrenceSpec,
    n: usize,
    k: usize,
    strategy: Strategy,
) -> Result<TransformValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let oracle = |method: Method| -> Result<TransformValue> {
        let w = window(spec, k, 2 * n - 1);
        let m = build_matrix(&w, n, k)?;
        let (value, fallback) = match method {
            Method::Condensation => {
                let c = det_condensation(m.rows());
                (c.value, c.fell_back)
            }
            _ => (det_bareiss(m.rows()), false),
        };
        Ok(TransformValue {
            n,
            k,
            value,
            method,
            fallback,
        })
    };
    match strategy {
        Strategy::Bareiss => oracle(Method::Bareiss),
        Strategy::Condensation => oracle(Method::Condensation),
        Strategy::Closed => Ok(TransformValue {
            n,
            k,
            value: d_principal(spec, n, k).into_result()?,
            method: Method::ClosedForm,
            fallback: false,
        }),
        Strategy::Auto => match d_principal(spec, n, k) {
            EvalOutcome::Value(value) => Ok(TransformValue {
                n,
                k,
                value,
                method: Method::ClosedForm,
                fallback: false,
            }),
            EvalOutcome::Singular(_) => {
                let mut v = oracle(Method::Bareiss)?;
                v.fallback = true;
                Ok(v)
            }
        },
    }
}

/// One cell of a closed-form versus oracle comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub n: usize,
    pub k: usize,
    pub closed: EvalOutcome,
    pub bareiss: BigRational,
    pub condensation: BigRational,
    pub condensation_fell_back: bool,
}

impl CrossCheck {
    /// Bareiss and condensation agree, and so does the closed form unless it
    /// was singular.
    pub fn agrees(&self) -> bool {
        self.bareiss == self.condensation && self.closed.value().is_none_or(|v| *v == self.bareiss)
    }

    pub fn describe(&self) -> String {
        let closed = match &self.closed {
            EvalOutcome::Value(v) => format_rational(v),
            EvalOutcome::Singular(s) => format!("singular ({s})"),
        };
        format!(
            "n={} k={} closed={} bareiss={} condensation={}",
            self.n,
            self.k,
            closed,
            format_rational(&self.bareiss),
            format_rational(&self.condensation)
        )
    }
}

/// Compare [`d_principal`] with both determinant oracles for all
/// 1 ≤ n ≤ n_max, 0 ≤ k ≤ k_max. Cells are computed in parallel and returned
/// in (n, k) order.
pub fn cross_check(spec: &RecurrenceSpec, n_max: usize, k_max: usize) -> Vec<CrossCheck> {
    let w = window(spec, 0, (k_max + 2 * n_max).saturating_sub(1));
    let cells: Vec<(usize, usize)> = (1..=n_max)
        .flat_map(|n| (0..=k_max).map(move |k| (n, k)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, k)| {
            let m = build_matrix(&w, n, k).expect("window sized for the grid");
            let c = det_condensation(m.rows());
            CrossCheck {
                n,
                k,
                closed: d_principal(spec, n, k),
                bareiss: det_bareiss(m.rows()),
                condensation: c.value,
                condensation_fell_back: c.fell_back,
            }
        })
        .collect()
}
