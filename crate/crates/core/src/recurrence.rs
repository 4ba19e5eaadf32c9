//! Sequences with a_{n+1} = (α + β/(n+γ))·a_n.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{
    format_rational, from_usize, is_nonnegative_integer, is_nonpositive_integer, rat,
    serde_rational, BigRational,
};
use crate::error::{Error, Result};

/// Parameters (α, β, γ, a₀) of the recurrence.
///
/// γ is never an integer ≤ 0, so `n + γ` is nonzero for every `n >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct RecurrenceSpec {
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
    a0: BigRational,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(with = "serde_rational")]
    alpha: BigRational,
    #[serde(with = "serde_rational")]
    beta: BigRational,
    #[serde(with = "serde_rational")]
    gamma: BigRational,
    #[serde(with = "serde_rational")]
    a0: BigRational,
}

impl TryFrom<RawSpec> for RecurrenceSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        make_spec(raw.alpha, raw.beta, raw.gamma, raw.a0)
    }
}

impl From<RecurrenceSpec> for RawSpec {
    fn from(s: RecurrenceSpec) -> Self {
        RawSpec {
            alpha: s.alpha,
            beta: s.beta,
            gamma: s.gamma,
            a0: s.a0,
        }
    }
}

pub fn make_spec(
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
    a0: BigRational,
) -> Result<RecurrenceSpec> {
    if is_nonpositive_integer(&gamma) {
        return Err(Error::InvalidGamma {
            gamma: format_rational(&gamma),
        });
    }
    Ok(RecurrenceSpec {
        alpha,
        beta,
        gamma,
        a0,
    })
}

impl RecurrenceSpec {
    /// Small-integer convenience constructor, `a0 = 1`.
    pub fn from_ints(alpha: i64, beta: i64, gamma: i64) -> Result<Self> {
        make_spec(rat(alpha, 1), rat(beta, 1), rat(gamma, 1), rat(1, 1))
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn a0(&self) -> &BigRational {
        &self.a0
    }

    /// The same recurrence with a₀ = 1.
    pub fn normalized(&self) -> RecurrenceSpec {
        RecurrenceSpec {
            a0: BigRational::one(),
            ..self.clone()
        }
    }

    pub fn with_a0(&self, a0: BigRational) -> RecurrenceSpec {
        RecurrenceSpec { a0, ..self.clone() }
    }

    /// a_{n+1}/a_n = (α(n+γ)+β)/(n+γ).
    pub fn step_factor(&self, n: usize) -> BigRational {
        let shifted = from_usize(n) + &self.gamma;
        (&self.alpha * &shifted + &self.beta) / shifted
    }

    /// α(n+γ)+β, the numerator of the step factor. It vanishes exactly when
    /// a_{n+1} = 0 while a_n might not.
    pub fn step_numerator(&self, n: usize) -> BigRational {
        &self.alpha * (from_usize(n) + &self.gamma) + &self.beta
    }

    /// Smallest `n >= 0` with α(n+γ)+β = 0, if any. Decided symbolically, so
    /// the answer covers every index.
    pub fn first_vanishing_step(&self) -> Option<usize> {
        if self.alpha.is_zero() {
            return self.beta.is_zero().then_some(0);
        }
        let root = -(&self.alpha * &self.gamma + &self.beta) / &self.alpha;
        if is_nonnegative_integer(&root) {
            root.to_integer().try_into().ok()
        } else {
            None
        }
    }

    /// True when every term a_n is nonzero.
    pub fn is_nonvanishing(&self) -> bool {
        !self.a0.is_zero() && self.first_vanishing_step().is_none()
    }
}

/// a_n = a₀ · ∏_{s=1}^{n} (α(s+γ−1)+β)/(s+γ−1).
pub fn term(spec: &RecurrenceSpec, n: usize) -> BigRational {
    (0..n).fold(spec.a0.clone(), |acc, s| {
        if acc.is_zero() {
            acc
        } else {
            acc * spec.step_factor(s)
        }
    })
}

/// Consecutive terms a_k, a_{k+1}, ...
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceWindow {
    pub origin: usize,
    #[serde(with = "crate::arith::serde_rational_vec")]
    pub terms: Vec<BigRational>,
}

impl SequenceWindow {
    /// A window over raw terms starting at a₀.
    pub fn from_terms(terms: Vec<BigRational>) -> Self {
        SequenceWindow { origin: 0, terms }
    }

    /// One past the last covered index.
    pub fn end(&self) -> usize {
        self.origin + self.terms.len()
    }

    pub fn get(&self, index: usize) -> Option<&BigRational> {
        index
            .checked_sub(self.origin)
            .and_then(|i| self.terms.get(i))
    }

    pub fn covers(&self, first: usize, last: usize) -> bool {
        first >= self.origin && last < self.end()
    }

    pub fn require(&self, first: usize, last: usize) -> Result<()> {
        if self.covers(first, last) {
            Ok(())
        } else {
            Err(Error::InsufficientTerms {
                first,
                last,
                have_first: self.origin,
                have_end: self.end(),
            })
        }
    }

    /// Parse a JSON array of `"p/q"` strings as a window starting at a₀.
    pub fn from_json(text: &str) -> Result<Self> {
        let terms: Vec<String> = serde_json::from_str(text)?;
        let terms = terms
            .iter()
            .map(|s| crate::arith::parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(terms))
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<String> = self.terms.iter().map(format_rational).collect();
        serde_json::to_string(&raw).expect("string array serializes")
    }
}

/// a_k … a_{k+count−1}. Linear in `k + count`.
pub fn window(spec: &RecurrenceSpec, k: usize, count: usize) -> SequenceWindow {
    let mut current = term(spec, k);
    let mut terms = Vec::with_capacity(count);
    for m in k..k + count {
        if m > k && !current.is_zero() {
            current *= spec.step_factor(m - 1);
        }
        terms.push(current.clone());
    }
    SequenceWindow { origin: k, terms }
}

/// Parameters of the reciprocal sequence 1/a_n:
/// (α′, β′, γ′, a₀′) = (1/α, −β/α², γ+β/α, 1/a₀).
pub fn reciprocal_spec(spec: &RecurrenceSpec) -> Result<RecurrenceSpec> {
    if spec.alpha.is_zero() {
        return Err(Error::ZeroAlpha);
    }
    if spec.a0.is_zero() {
        return Err(Error::ZeroTerm { index: "0".into() });
    }
    if let Some(n) = spec.first_vanishing_step() {
        return Err(Error::ZeroTerm {
            index: (n + 1).to_string(),
        });
    }
    let alpha = spec.alpha.recip();
    let beta = -&spec.beta / (&spec.alpha * &spec.alpha);
    let gamma = &spec.gamma + &spec.beta / &spec.alpha;
    make_spec(alpha, beta, gamma, spec.a0.recip())
}

/// Draw a spec with small rational parameters: numerators in `-5..=5`,
/// denominators in `1..=3`, γ resampled until valid, a₀ nonzero.
pub fn random_small_spec<R: Rng + ?Sized>(rng: &mut R) -> RecurrenceSpec {
    let draw = |rng: &mut R| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
    let alpha = draw(rng);
    let beta = draw(rng);
    let gamma = loop {
        let g = draw(rng);
        if !is_nonpositive_integer(&g) {
            break g;
        }
    };
    let a0 = loop {
        let a = draw(rng);
        if !a.is_zero() {
            break a;
        }
    };
    make_spec(alpha, beta, gamma, a0).expect("gamma checked above")
}

impl std::fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "alpha={} beta={} gamma={} a0={}",
            format_rational(&self.alpha),
            format_rational(&self.beta),
            format_rational(&self.gamma),
            format_rational(&self.a0)
        )
    }
}

impl RecurrenceSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalan() -> RecurrenceSpec {
        RecurrenceSpec::from_ints(4, -6, 2).unwrap()
    }

    #[test]
    fn make_spec_validates_gamma() {
        assert!(RecurrenceSpec::from_ints(4, -6, 2).is_ok());
        assert!(RecurrenceSpec::from_ints(0, 1, 1).is_ok());
        assert!(matches!(
            RecurrenceSpec::from_ints(1, -1, 0),
            Err(Error::InvalidGamma { .. })
        ));
        assert!(RecurrenceSpec::from_ints(1, -1, -3).is_err());
        assert!(make_spec(int(1), int(-1), rat(-3, 2), int(1)).is_ok());
    }

    #[test]
    fn term_examples() {
        assert_eq!(term(&catalan(), 3), int(5));
        let spec = catalan().with_a0(rat(7, 3));
        assert_eq!(term(&spec, 0), rat(7, 3));
        let central = RecurrenceSpec::from_ints(4, -2, 1).unwrap();
        assert_eq!(term(&central, 2), int(6));
    }

    #[test]
    fn window_examples() {
        let w = window(&catalan(), 0, 4);
        assert_eq!(w.terms, vec![int(1), int(1), int(2), int(5)]);
        let w = window(&catalan(), 5, 1);
        assert_eq!(w.terms, vec![int(42)]);
        assert_eq!(w.origin, 5);
        let hilbert = RecurrenceSpec::from_ints(1, -1, 2).unwrap();
        assert_eq!(
            window(&hilbert, 0, 3).terms,
            vec![int(1), rat(1, 2), rat(1, 3)]
        );
    }

    #[test]
    fn window_after_a_zero_term() {
        // C(2, n): 1, 2, 1, 0, 0, ...
        let spec = RecurrenceSpec::from_ints(-1, 3, 1).unwrap();
        assert_eq!(
            window(&spec, 0, 6).terms,
            vec![int(1), int(2), int(1), int(0), int(0), int(0)]
        );
        assert_eq!(spec.first_vanishing_step(), Some(2));
    }

    #[test]
    fn reciprocal_examples() {
        let r = reciprocal_spec(&catalan()).unwrap();
        assert_eq!(
            (r.alpha(), r.beta(), r.gamma(), r.a0()),
            (&rat(1, 4), &rat(3, 8), &rat(1, 2), &int(1))
        );
        // (n+2)/(4n+2) = a_n / a_{n+1} for Catalan.
        for n in 0..10 {
            assert_eq!(r.step_factor(n), rat(n as i64 + 2, 4 * n as i64 + 2));
        }
        let constant = RecurrenceSpec::from_ints(1, 0, 1).unwrap();
        assert_eq!(reciprocal_spec(&constant).unwrap(), constant);
        assert!(matches!(
            reciprocal_spec(&RecurrenceSpec::from_ints(0, 1, 1).unwrap()),
            Err(Error::ZeroAlpha)
        ));
        // C(2, n) vanishes from n = 3 on.
        assert!(matches!(
            reciprocal_spec(&RecurrenceSpec::from_ints(-1, 3, 1).unwrap()),
            Err(Error::ZeroTerm { .. })
        ));
        assert!(matches!(
            reciprocal_spec(&catalan().with_a0(int(0))),
            Err(Error::ZeroTerm { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let spec = catalan().with_a0(rat(-2, 3));
        let text = spec.to_json();
        assert_eq!(text, r#"{"alpha":"4","beta":"-6","gamma":"2","a0":"-2/3"}"#);
        assert_eq!(RecurrenceSpec::from_json(&text).unwrap(), spec);
        assert!(
            RecurrenceSpec::from_json(r#"{"alpha":"1","beta":"1","gamma":"-2","a0":"1"}"#).is_err()
        );
        let w = SequenceWindow::from_json(r#"["1", "1/4", "-2/6"]"#).unwrap();
        assert_eq!(w.terms, vec![int(1), rat(1, 4), rat(-1, 3)]);
        assert_eq!(w.to_json(), r#"["1","1/4","-1/3"]"#);
    }

    fn spec_strategy() -> impl Strategy<Value = RecurrenceSpec> {
        any::<u64>().prop_map(|seed| random_small_spec(&mut ChaCha8Rng::seed_from_u64(seed)))
    }

    proptest! {
        #[test]
        fn consecutive_terms_satisfy_recurrence(spec in spec_strategy(), n in 0usize..40) {
            let lhs = term(&spec, n + 1) * (from_usize(n) + spec.gamma());
            let rhs = spec.step_numerator(n) * term(&spec, n);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_form_matches_iteration(spec in spec_strategy()) {
            let w = window(&spec, 0, 51);
            let mut a = spec.a0().clone();
            for n in 0..=50 {
                prop_assert_eq!(&w.terms[n], &a);
                prop_assert_eq!(&term(&spec, n), &a);
                a = &a * (spec.alpha() + spec.beta() / (from_usize(n) + spec.gamma()));
            }
        }

        #[test]
        fn reciprocal_terms_invert(spec in spec_strategy()) {
            if let Ok(r) = reciprocal_spec(&spec) {
                for n in 0..=30 {
                    prop_assert_eq!(term(&r, n) * term(&spec, n), int(1));
                }
                if let Ok(back) = reciprocal_spec(&r) {
                    prop_assert_eq!(back, spec);
                }
            }
        }
    }
}
