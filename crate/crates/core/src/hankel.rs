//! Hankel matrices H_n^{(k)} = (a_{i+j+k-2}) and two exact determinant
//! algorithms used as independent oracles for the closed forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{serde_rational, BigRational};
use crate::error::{Error, Result};
use crate::recurrence::SequenceWindow;

/// Row-major square matrix of rationals.
pub type Grid = Vec<Vec<BigRational>>;

/// The n×n window H_n^{(k)}; entry (i, j) (0-based) is a_{i+j+k}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelMatrix {
    n: usize,
    k: usize,
    rows: Grid,
}

impl HankelMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &Grid {
        &self.rows
    }

    /// JSON form `{"n":…, "k":…, "rows":[["p/q",…],…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serializes")
    }

    /// Parse the JSON form, checking shape and constant anti-diagonals.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_str(text)?;
        let n = raw.n;
        if n == 0 || raw.rows.len() != n || raw.rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "expected a {n}x{n} grid of rationals"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let (i0, j0) = if i + j < n {
                    (0, i + j)
                } else {
                    (i + j + 1 - n, n - 1)
                };
                if raw.rows[i][j] != raw.rows[i0][j0] {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) breaks the constant anti-diagonal"
                    )));
                }
            }
        }
        Ok(HankelMatrix {
            n,
            k: raw.k,
            rows: raw.rows,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    k: usize,
    #[serde(with = "grid_strings")]
    rows: Grid,
}

impl From<&HankelMatrix> for MatrixJson {
    fn from(m: &HankelMatrix) -> Self {
        MatrixJson {
            n: m.n,
            k: m.k,
            rows: m.rows.clone(),
        }
    }
}

mod grid_strings {
    use super::Grid;
    use crate::arith::{format_rational, parse_rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(g: &Grid, s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<String>> = g
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Grid, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Build H_n^{(k)} from a window covering a_k … a_{k+2n−2}.
pub fn build_matrix(w: &SequenceWindow, n: usize, k: usize) -> Result<HankelMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "matrix order must be positive".into(),
        ));
    }
    w.require(k, k + 2 * n - 2)?;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| w.get(i + j + k).expect("coverage checked").clone())
                .collect()
        })
        .collect();
    Ok(HankelMatrix { n, k, rows })
}

fn assert_square(rows: &[Vec<BigRational>]) {
    let n = rows.len();
    assert!(
        rows.iter().all(|r| r.len() == n),
        "determinant of a non-square grid"
    );
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Every row is scaled by the LCM of all entry denominators so the
/// elimination runs over the integers, where each Bareiss division is exact.
/// Zero pivots are handled by column swaps. The empty matrix has determinant 1.
pub fn det_bareiss(rows: &[Vec<BigRational>]) -> BigRational {
    assert_square(rows);
    let n = rows.len();
    if n == 0 {
        return BigRational::one();
    }
    let lcm = rows
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
        .collect();

    let mut negate = false;
    let mut prev = BigInt::one();
    for p in 0..n {
        if m[p][p].is_zero() {
            match (p + 1..n).find(|&j| !m[p][j].is_zero()) {
                Some(j) => {
                    for row in m.iter_mut() {
                        row.swap(p, j);
                    }
                    negate = !negate;
                }
                None => return BigRational::zero(),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let cross = &m[i][j] * &m[p][p] - &m[i][p] * &m[p][j];
                m[i][j] = cross / &prev;
            }
        }
        prev = m[p][p].clone();
    }
    let det = if negate { -prev } else { prev };
    BigRational::new(det, num_traits::pow(lcm, n))
}

/// Result of Dodgson condensation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensed {
    pub value: BigRational,
    /// Set when a zero interior entry forced a fallback to [`det_bareiss`].
    pub fell_back: bool,
}

/// Exact determinant by Dodgson condensation. Each round replaces the
/// matrix by its connected 2×2 minors divided by the interior of the matrix
/// two rounds back; a zero divisor aborts to [`det_bareiss`] on the input.
pub fn det_condensation(rows: &[Vec<BigRational>]) -> Condensed {
    assert_square(rows);
    if rows.is_empty() {
        return Condensed {
            value: BigRational::one(),
            fell_back: false,
        };
    }
    let mut previous: Option<Grid> = None;
    let mut current: Grid = rows.to_vec();
    while current.len() > 1 {
        let s = current.len();
        if let Some(prev) = &previous {
            let zero_interior = (1..s).any(|i| (1..s).any(|j| prev[i][j].is_zero()));
            if zero_interior {
                return Condensed {
                    value: det_bareiss(rows),
                    fell_back: true,
                };
            }
        }
        let next: Grid = (0..s - 1)
            .map(|i| {
                (0..s - 1)
                    .map(|j| {
                        let minor = &current[i][j] * &current[i + 1][j + 1]
                            - &current[i][j + 1] * &current[i + 1][j];
                        match &previous {
                            Some(prev) => minor / &prev[i + 1][j + 1],
                            None => minor,
                        }
                    })
                    .collect()
            })
            .collect();
        previous = Some(std::mem::replace(&mut current, next));
    }
    Condensed {
        value: current[0][0].clone(),
        fell_back: false,
    }
}

/// How a transform value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bareiss,
    Condensation,
    ClosedForm,
    Catalog,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bareiss => "bareiss",
            Method::Condensation => "condensation",
            Method::ClosedForm => "closed_form",
            Method::Catalog => "catalog",
        })
    }
}

/// A computed d_n^{(k)} together with the method that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformValue {
    pub n: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    pub method: Method,
    /// Condensation fell back to Bareiss, or the closed form was singular
    /// and an oracle was used instead.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

/// d_n^{(k)} of a raw window by Bareiss elimination.
pub fn transform_bareiss(w: &SequenceWindow, n: usize, k: usize) -> Result<TransformValue> {
    let m = build_matrix(w, n, k)?;
    Ok(TransformValue {
        n,
        k,
        value: det_bareiss(m.rows()),
        method: Method::Bareiss,
        fallback: false,
    })
}

/// d_n^{(k)} of a raw window by condensation.
pub fn transform_condensation(w: &SequenceWindow, n: usize, k: usize) -> Result<TransformValue> {
    let m = build_matrix(w, n, k)?;
    let c = det_condensation(m.rows());
    Ok(TransformValue {
        n,
        k,
        value: c.value,
        method: Method::Condensation,
        fallback: c.fell_back,
    })
}
