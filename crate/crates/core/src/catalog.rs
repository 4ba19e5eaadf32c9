//! Named sequences whose Hankel transforms have simplified product forms.
//!
//! Each entry carries the recurrence parameters, the sequence's defining
//! formula (computed independently of the recurrence), and the simplified
//! product for d_n^{(k)}.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    factorial, format_rational, from_usize, generalized_binomial, int, is_nonnegative_integer,
    is_nonpositive_integer, pow, sign_power, BigRational,
};
use crate::closedform::{d_principal, d_reciprocal, EvalOutcome, Singularity};
use crate::error::{Error, Result};
use crate::hankel::det_bareiss;
use crate::recurrence::{make_spec, reciprocal_spec, RecurrenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// 1/(n+1)
    Hilbert,
    /// 1/(λn+μ)
    ShiftedLinear,
    /// 2/(n²+3n+2)
    TriangularReciprocal,
    /// 1/n!
    InverseFactorial,
    /// C(2n,n)/(n+1)
    Catalan,
    /// C(2n,n)
    CentralBinomial,
    /// C(λ,n)
    BinomialLambda,
    /// C(n+λ,m)
    BinomialShifted,
    /// (n+1)/C(2n,n)
    ReciprocalCatalan,
    /// 1/C(2n,n)
    ReciprocalCentralBinomial,
    /// 1/C(λ,n)
    ReciprocalBinomialLambda,
}

pub const ENTRY_KINDS: [EntryKind; 11] = [
    EntryKind::Hilbert,
    EntryKind::ShiftedLinear,
    EntryKind::TriangularReciprocal,
    EntryKind::InverseFactorial,
    EntryKind::Catalan,
    EntryKind::CentralBinomial,
    EntryKind::BinomialLambda,
    EntryKind::BinomialShifted,
    EntryKind::ReciprocalCatalan,
    EntryKind::ReciprocalCentralBinomial,
    EntryKind::ReciprocalBinomialLambda,
];

impl EntryKind {
    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Hilbert => "hilbert",
            EntryKind::ShiftedLinear => "shifted_linear",
            EntryKind::TriangularReciprocal => "triangular_reciprocal",
            EntryKind::InverseFactorial => "inverse_factorial",
            EntryKind::Catalan => "catalan",
            EntryKind::CentralBinomial => "central_binomial",
            EntryKind::BinomialLambda => "binomial_lambda",
            EntryKind::BinomialShifted => "binomial_shifted",
            EntryKind::ReciprocalCatalan => "reciprocal_catalan",
            EntryKind::ReciprocalCentralBinomial => "reciprocal_central_binomial",
            EntryKind::ReciprocalBinomialLambda => "reciprocal_binomial_lambda",
        }
    }

    pub fn sequence(self) -> &'static str {
        match self {
            EntryKind::Hilbert => "1/(n+1)",
            EntryKind::ShiftedLinear => "1/(lambda*n+mu)",
            EntryKind::TriangularReciprocal => "2/(n^2+3n+2)",
            EntryKind::InverseFactorial => "1/n!",
            EntryKind::Catalan => "C(2n,n)/(n+1)",
            EntryKind::CentralBinomial => "C(2n,n)",
            EntryKind::BinomialLambda => "C(lambda,n)",
            EntryKind::BinomialShifted => "C(n+lambda,m)",
            EntryKind::ReciprocalCatalan => "(n+1)/C(2n,n)",
            EntryKind::ReciprocalCentralBinomial => "1/C(2n,n)",
            EntryKind::ReciprocalBinomialLambda => "1/C(lambda,n)",
        }
    }

    /// Parameter names the entry needs, in CLI flag spelling.
    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            EntryKind::ShiftedLinear => &["lambda", "mu"],
            EntryKind::BinomialLambda | EntryKind::ReciprocalBinomialLambda => &["lambda"],
            EntryKind::BinomialShifted => &["lambda", "m"],
            _ => &[],
        }
    }

    /// The reciprocal bullets are built on a base sequence in the family.
    pub fn is_reciprocal(self) -> bool {
        matches!(
            self,
            EntryKind::ReciprocalCatalan
                | EntryKind::ReciprocalCentralBinomial
                | EntryKind::ReciprocalBinomialLambda
        )
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ENTRY_KINDS
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownEntry(s.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CatalogParams {
    pub lambda: Option<BigRational>,
    pub mu: Option<BigRational>,
    pub m: Option<usize>,
}

impl CatalogParams {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn lambda(lambda: BigRational) -> Self {
        CatalogParams {
            lambda: Some(lambda),
            ..Self::default()
        }
    }

    pub fn lambda_mu(lambda: BigRational, mu: BigRational) -> Self {
        CatalogParams {
            lambda: Some(lambda),
            mu: Some(mu),
            m: None,
        }
    }

    pub fn lambda_m(lambda: BigRational, m: usize) -> Self {
        CatalogParams {
            lambda: Some(lambda),
            mu: None,
            m: Some(m),
        }
    }

    /// κ = μ/λ, when both are present and λ ≠ 0.
    pub fn kappa(&self) -> Option<BigRational> {
        match (&self.mu, &self.lambda) {
            (Some(mu), Some(lambda)) if !lambda.is_zero() => Some(mu / lambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub kind: EntryKind,
    pub params: CatalogParams,
    /// Recurrence of the entry's own sequence.
    pub spec: RecurrenceSpec,
    /// For the reciprocal entries, the recurrence of the sequence being inverted.
    pub base: Option<RecurrenceSpec>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

/// Look up an entry by name and wire it to its parameters.
pub fn entry(name: &str, params: CatalogParams) -> Result<CatalogEntry> {
    let kind: EntryKind = name.parse()?;
    entry_of(kind, params)
}

pub fn entry_of(kind: EntryKind, params: CatalogParams) -> Result<CatalogEntry> {
    let needs = kind.required_params();
    let given = [
        ("lambda", params.lambda.is_some()),
        ("mu", params.mu.is_some()),
        ("m", params.m.is_some()),
    ];
    for (name, present) in given {
        if present != needs.contains(&name) {
            return Err(invalid(if present {
                format!("{kind} takes no parameter {name}")
            } else {
                format!("{kind} needs parameter {name}")
            }));
        }
    }

    let one = BigRational::one();
    let spec_of = |a: i64, b: i64, g: i64| RecurrenceSpec::from_ints(a, b, g);
    let (spec, base) = match kind {
        EntryKind::Hilbert => (spec_of(1, -1, 2)?, None),
        EntryKind::TriangularReciprocal => (spec_of(1, -2, 3)?, None),
        EntryKind::InverseFactorial => (spec_of(0, 1, 1)?, None),
        EntryKind::Catalan => (spec_of(4, -6, 2)?, None),
        EntryKind::CentralBinomial => (spec_of(4, -2, 1)?, None),
        EntryKind::ShiftedLinear => {
            let lambda = params.lambda.as_ref().expect("checked");
            let mu = params.mu.as_ref().expect("checked");
            if lambda.is_zero() || mu.is_zero() {
                return Err(invalid("shifted_linear needs lambda != 0 and mu != 0"));
            }
            let kappa = params.kappa().expect("lambda nonzero");
            if is_nonpositive_integer(&kappa) {
                return Err(invalid(format!(
                    "kappa = mu/lambda = {} makes lambda*n+mu vanish",
                    format_rational(&kappa)
                )));
            }
            (
                make_spec(one.clone(), -&one, kappa + &one, mu.recip())?,
                None,
            )
        }
        EntryKind::BinomialLambda => {
            let lambda = params.lambda.clone().expect("checked");
            (
                make_spec(-&one, lambda + &one, one.clone(), one.clone())?,
                None,
            )
        }
        EntryKind::BinomialShifted => {
            let lambda = params.lambda.as_ref().expect("checked");
            let m = params.m.expect("checked");
            if lambda.is_integer() && *lambda < from_usize(m) {
                return Err(invalid(
                    "binomial_shifted needs lambda >= m when lambda is an integer",
                ));
            }
            let a0 = generalized_binomial(lambda, m);
            let gamma = lambda - from_usize(m) + &one;
            (make_spec(one.clone(), from_usize(m), gamma, a0)?, None)
        }
        EntryKind::ReciprocalCatalan => {
            let base = spec_of(4, -6, 2)?;
            (reciprocal_spec(&base)?, Some(base))
        }
        EntryKind::ReciprocalCentralBinomial => {
            let base = spec_of(4, -2, 1)?;
            (reciprocal_spec(&base)?, Some(base))
        }
        EntryKind::ReciprocalBinomialLambda => {
            let lambda = params.lambda.clone().expect("checked");
            if is_nonnegative_integer(&lambda) {
                return Err(invalid(
                    "reciprocal_binomial_lambda needs lambda outside 0, 1, 2, ...",
                ));
            }
            let base = make_spec(-&one, lambda + &one, one.clone(), one.clone())?;
            (reciprocal_spec(&base)?, Some(base))
        }
    };
    Ok(CatalogEntry {
        kind,
        params,
        spec,
        base,
    })
}

fn central(n: usize) -> BigRational {
    BigRational::from_integer(factorial(2 * n) / (factorial(n) * factorial(n)))
}

fn fact(n: usize) -> BigRational {
    BigRational::from_integer(factorial(n))
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    fn lambda(&self) -> &BigRational {
        self.params.lambda.as_ref().expect("entry validated")
    }

    fn m(&self) -> usize {
        self.params.m.expect("entry validated")
    }

    /// a_n straight from the sequence's defining formula.
    pub fn defining_term(&self, n: usize) -> BigRational {
        let nn = from_usize(n);
        match self.kind {
            EntryKind::Hilbert => (nn + int(1)).recip(),
            EntryKind::ShiftedLinear => {
                (self.lambda() * nn + self.params.mu.as_ref().expect("validated")).recip()
            }
            EntryKind::TriangularReciprocal => int(2) / (&nn * &nn + int(3) * &nn + int(2)),
            EntryKind::InverseFactorial => fact(n).recip(),
            EntryKind::Catalan => central(n) / (nn + int(1)),
            EntryKind::CentralBinomial => central(n),
            EntryKind::BinomialLambda => generalized_binomial(self.lambda(), n),
            EntryKind::BinomialShifted => generalized_binomial(&(nn + self.lambda()), self.m()),
            EntryKind::ReciprocalCatalan => (nn + int(1)) / central(n),
            EntryKind::ReciprocalCentralBinomial => central(n).recip(),
            EntryKind::ReciprocalBinomialLambda => generalized_binomial(self.lambda(), n).recip(),
        }
    }

    pub fn defining_terms(&self, count: usize) -> Vec<BigRational> {
        (0..count).map(|n| self.defining_term(n)).collect()
    }

    /// d_n^{(k)} from the entry's simplified product formula.
    pub fn eval_simplified(&self, n: usize, k: usize) -> EvalOutcome {
        if n == 0 {
            return EvalOutcome::Value(BigRational::one());
        }
        self.simplified(n, k).into()
    }

    fn simplified(&self, n: usize, k: usize) -> std::result::Result<BigRational, Singularity> {
        let one = BigRational::one();
        let u = from_usize;
        // ∏_{i=1}^{n−1} (i!)²
        let squared_factorials = || (1..n).map(|i| pow(&fact(i), 2)).product::<BigRational>();
        // ∏_{i,j=1}^{n} f(i+j)
        let square_product = |f: &dyn Fn(usize) -> BigRational| {
            (1..=n)
                .flat_map(|i| (1..=n).map(move |j| i + j))
                .map(f)
                .product::<BigRational>()
        };
        // ∏_{1≤i≤j≤top} f(i, j)
        let triangle = |top: usize, f: &dyn Fn(usize, usize) -> Partial| -> Partial {
            let mut acc = BigRational::one();
            for j in 1..=top {
                for i in 1..=j {
                    acc *= f(i, j)?;
                }
            }
            Ok(acc)
        };
        // ∏_{j=0}^{k−1} ∏_{i=1}^{n} f(i, j)
        let block = |f: &dyn Fn(usize, usize) -> Partial| -> Partial {
            let mut acc = BigRational::one();
            for j in 0..k {
                for i in 1..=n {
                    acc *= f(i, j)?;
                }
            }
            Ok(acc)
        };
        let ratio = |num: BigRational,
                     den: BigRational,
                     factor: &'static str,
                     i: usize,
                     j: usize|
         -> Partial {
            if den.is_zero() {
                Err(Singularity {
                    factor,
                    i,
                    j: Some(j),
                })
            } else {
                Ok(num / den)
            }
        };

        match self.kind {
            EntryKind::Hilbert => Ok(squared_factorials() / square_product(&|s| u(s + k - 1))),
            EntryKind::ShiftedLinear => {
                let lambda = self.lambda();
                let kappa = self.params.kappa().expect("validated");
                let den = square_product(&|s| u(s + k) + &kappa - u(2));
                ratio(
                    squared_factorials(),
                    pow(lambda, n) * den,
                    "i+j+k+kappa-2",
                    0,
                    0,
                )
            }
            EntryKind::TriangularReciprocal => {
                let binom = fact(n + k) / (fact(n) * fact(k));
                Ok(pow(&u(2), n) / binom * squared_factorials() / square_product(&|s| u(s + k)))
            }
            EntryKind::InverseFactorial => {
                let prod: BigRational = (0..n).map(|i| fact(i) / fact(i + k + n - 1)).product();
                Ok(sign_power(n * (n - 1) / 2) * prod)
            }
            EntryKind::Catalan => {
                triangle(k.saturating_sub(1), &|i, j| Ok(u(i + j + 2 * n) / u(i + j)))
            }
            EntryKind::CentralBinomial => {
                if k == 0 {
                    Ok(pow(&u(2), n - 1))
                } else {
                    let t = triangle(k - 1, &|i, j| Ok(u(i + j - 1 + 2 * n) / u(i + j - 1)))?;
                    Ok(pow(&u(2), n) * t)
                }
            }
            EntryKind::BinomialLambda => {
                let lambda = self.lambda();
                let first = triangle(n - 1, &|i, j| {
                    Ok((u(i) - lambda - &one) * (u(i) + lambda) / (u(i + j - 1) * u(i + j)))
                })?;
                let second = block(&|i, j| Ok((u(i + j) - lambda - &one) / u(i + j + n - 1)))?;
                Ok(sign_power(n * k) * first * second)
            }
            EntryKind::BinomialShifted => {
                let m = self.m();
                if n >= m + 2 {
                    return Ok(BigRational::zero());
                }
                if n == m + 1 {
                    return Ok(sign_power(m * (m + 1) / 2));
                }
                let lambda = self.lambda();
                let a0 = generalized_binomial(lambda, m);
                let lm = lambda - u(m);
                let first = triangle(n - 1, &|i, j| {
                    let num = u(i) * (u(i) + lambda) * (u(i) - u(1) - u(m));
                    let den = (u(i) + &lm) * (u(i + j) + &lm - &one) * (u(i + j) + &lm);
                    ratio(num, den, "(i+lambda-m)(i+j+lambda-m-1)(i+j+lambda-m)", i, j)
                })?;
                let second = block(&|i, j| {
                    ratio(
                        u(i + j) + lambda,
                        u(i + j + n) + &lm - &one,
                        "i+j+n+lambda-m-1",
                        i,
                        j,
                    )
                })?;
                Ok(pow(&a0, n) * first * second)
            }
            EntryKind::ReciprocalCatalan => {
                let first = triangle(n - 1, &|i, j| {
                    let num = u(i) * u(i + 1) * (u(2 * i) - u(5));
                    let den = (u(2 * i) - &one) * (u(2 * (i + j)) - u(3)) * (u(2 * (i + j)) - &one);
                    Ok(num / den)
                })?;
                let second = block(&|i, j| Ok(u(i + j + 1) / (u(2 * (i + j + n)) - u(3))))?;
                Ok(pow(&u(2), n * (n + k - 1)).recip() * first * second)
            }
            EntryKind::ReciprocalCentralBinomial => {
                let first = triangle(n - 1, &|i, j| {
                    let num = u(i) * u(i) * (u(2 * i) - u(3));
                    let den = (u(2 * i) - &one) * (u(2 * (i + j)) - u(3)) * (u(2 * (i + j)) - &one);
                    Ok(num / den)
                })?;
                let second = block(&|i, j| Ok(u(i + j) / (u(2 * (i + j + n)) - u(3))))?;
                Ok(pow(&u(2), n * (n + k - 1)).recip() * first * second)
            }
            EntryKind::ReciprocalBinomialLambda => {
                let lambda = self.lambda();
                let first = triangle(n - 1, &|i, j| {
                    let num = u(i) * u(i) * (u(i) - lambda - u(2));
                    let den = (u(i) - lambda - &one)
                        * (u(i + j) - lambda - u(2))
                        * (u(i + j) - lambda - &one);
                    ratio(num, den, "(i-lambda-1)(i+j-lambda-2)(i+j-lambda-1)", i, j)
                })?;
                let second = block(&|i, j| {
                    ratio(
                        u(i + j),
                        u(i + j + n) - lambda - u(2),
                        "i+j+n-lambda-2",
                        i,
                        j,
                    )
                })?;
                Ok(sign_power(n * k) * first * second)
            }
        }
    }

    /// d_n^{(k)} by the principal identity on the entry's recurrence.
    pub fn eval_principal(&self, n: usize, k: usize) -> EvalOutcome {
        d_principal(&self.spec, n, k)
    }
}

type Partial = std::result::Result<BigRational, Singularity>;

/// One (n, k) cell of [`verify_entry`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryCheck {
    pub n: usize,
    pub k: usize,
    pub simplified: EvalOutcome,
    pub principal: EvalOutcome,
    /// The reciprocal closed form on the base sequence, for reciprocal entries.
    pub reciprocal: Option<EvalOutcome>,
    /// Bareiss determinant of the Hankel matrix of the defining terms.
    pub oracle: BigRational,
}

impl EntryCheck {
    pub fn agrees(&self) -> bool {
        let same = |o: &EvalOutcome| o.value() == Some(&self.oracle);
        same(&self.simplified) && same(&self.principal) && self.reciprocal.as_ref().is_none_or(same)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryReport {
    pub entry: EntryKind,
    pub cells: Vec<EntryCheck>,
}

impl EntryReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &EntryCheck> {
        self.cells.iter().filter(|c| !c.agrees())
    }

    pub fn all_agree(&self) -> bool {
        self.mismatches().next().is_none()
    }
}

/// Compare the simplified formula, the principal identity (and for
/// reciprocal entries the reciprocal closed form) with the determinant of
/// the defining terms, for 1 ≤ n ≤ n_max, 0 ≤ k ≤ k_max.
pub fn verify_entry(e: &CatalogEntry, n_max: usize, k_max: usize) -> EntryReport {
    let terms = e.defining_terms((k_max + 2 * n_max).saturating_sub(1));
    let cells: Vec<(usize, usize)> = (1..=n_max)
        .flat_map(|n| (0..=k_max).map(move |k| (n, k)))
        .collect();
    let cells = cells
        .par_iter()
        .map(|&(n, k)| {
            let rows: Vec<Vec<BigRational>> =
                (0..n).map(|i| terms[i + k..i + k + n].to_vec()).collect();
            let reciprocal = e.base.as_ref().map(|b| {
                d_reciprocal(b, n, k).expect("reciprocal entries have nonvanishing bases")
            });
            EntryCheck {
                n,
                k,
                simplified: e.eval_simplified(n, k),
                principal: e.eval_principal(n, k),
                reciprocal,
                oracle: det_bareiss(&rows),
            }
        })
        .collect();
    EntryReport {
        entry: e.kind,
        cells,
    }
}
