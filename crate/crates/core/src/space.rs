//! Weighted exponential-sum spaces and their Aronszajn product.
//!
//! A space is a finite support `A ⊂ ℤⁿ` together with squared metric
//! coefficients `α²ₐ > 0`; the functions `αₐ e^{a·x}` form an orthonormal
//! basis. The product of two spaces has the Minkowski sum of the supports as
//! support, and its squared coefficients are the convolution of the factors'
//! squared coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticePoint};
use crate::scalar::{Coefficient, Real};

/// Integer exponent vector (Laurent exponents allowed).
pub type Exponent = Vec<i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumSpace<C> {
    dim: usize,
    // BTreeMap keeps terms in lexicographic exponent order.
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coefficient> ExpSumSpace<C> {
    /// Validating constructor. Duplicate exponents, nonpositive coefficients,
    /// wrong lengths and empty term lists are rejected.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("space dimension must be at least 1"));
        }
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::validation(format!(
                    "exponent {e:?} has length {}, expected {dim}",
                    e.len()
                )));
            }
            if !c.is_valid_weight() {
                return Err(Error::validation(format!(
                    "squared coefficient {c:?} at exponent {e:?} must be positive and finite"
                )));
            }
            if map.insert(e.clone(), c).is_some() {
                return Err(Error::validation(format!("duplicate exponent {e:?}")));
            }
        }
        if map.is_empty() {
            return Err(Error::validation("a space needs at least one term"));
        }
        Ok(Self { dim, terms: map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl ExactSizeIterator<Item = &Exponent> {
        self.terms.keys()
    }

    pub fn coefficient(&self, e: &[i64]) -> Option<&C> {
        self.terms.get(e)
    }

    pub fn is_singleton(&self) -> bool {
        self.terms.len() == 1
    }

    /// `Σ α²ₐ`, i.e. the kernel at the origin.
    pub fn total_weight(&self) -> C {
        self.terms
            .values()
            .fold(C::zero(), |acc, c| acc + c.clone())
    }

    pub fn map_coefficients<D: Coefficient>(
        &self,
        mut f: impl FnMut(&C) -> D,
    ) -> Result<ExpSumSpace<D>> {
        ExpSumSpace::new(self.dim, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    /// Converts the coefficients into a floating point type.
    pub fn to_real<T: Real>(&self) -> ExpSumSpace<T> {
        ExpSumSpace {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), T::lit(c.to_f64())))
                .collect(),
        }
    }

    /// Translates every exponent by `shift` and scales every squared
    /// coefficient by `scale`.
    pub fn shifted(&self, shift: &[i64], scale: C) -> Result<Self> {
        Error::check_dim(self.dim, shift.len())?;
        Self::new(
            self.dim,
            self.terms.iter().map(|(e, c)| {
                let e2 = e.iter().zip(shift).map(|(a, b)| a + b).collect();
                (e2, c.clone() * scale.clone())
            }),
        )
    }

    /// Aronszajn product: Minkowski sum of the supports, convolution of the
    /// squared coefficients.
    pub fn product(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim, other.dim)?;
        let mut out: BTreeMap<Exponent, C> = BTreeMap::new();
        for (b, cb) in &self.terms {
            for (c, cc) in &other.terms {
                let a: Exponent = b.iter().zip(c).map(|(x, y)| x + y).collect();
                let w = cb.clone() * cc.clone();
                out.entry(a)
                    .and_modify(|acc| *acc = acc.clone() + w.clone())
                    .or_insert(w);
            }
        }
        Ok(Self {
            dim: self.dim,
            terms: out,
        })
    }

    /// `d`-th Aronszajn power, by repeated squaring.
    pub fn power(&self, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("power degree must be at least 1"));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut k = d;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.product(&base)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.product(&base)?;
        }
        Ok(result.expect("d >= 1"))
    }

    /// Vertices of the convex hull of the support.
    pub fn support_hull(&self) -> Result<SupportShape> {
        let pts: Vec<LatticePoint> = self.terms.keys().cloned().collect();
        Ok(SupportShape {
            dim: self.dim,
            vertices: lattice::extreme_points(&pts, self.dim)?,
        })
    }
}

/// Builds a space from `(exponent, squared coefficient)` pairs.
pub fn make_space<C: Coefficient>(n: usize, terms: Vec<(Exponent, C)>) -> Result<ExpSumSpace<C>> {
    ExpSumSpace::new(n, terms)
}

pub fn aronszajn_product<C: Coefficient>(
    left: &ExpSumSpace<C>,
    right: &ExpSumSpace<C>,
) -> Result<ExpSumSpace<C>> {
    left.product(right)
}

pub fn power<C: Coefficient>(space: &ExpSumSpace<C>, d: u32) -> Result<ExpSumSpace<C>> {
    space.power(d)
}

/// The Kostlan linear space: support `{0, e₁, …, eₙ}`, unit coefficients.
pub fn kostlan_space<C: Coefficient>(n: usize) -> Result<ExpSumSpace<C>> {
    if n == 0 {
        return Err(Error::validation("space dimension must be at least 1"));
    }
    let mut terms = vec![(vec![0; n], C::one())];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        terms.push((e, C::one()));
    }
    ExpSumSpace::new(n, terms)
}

pub fn support_hull<C: Coefficient>(space: &ExpSumSpace<C>) -> Result<SupportShape> {
    space.support_hull()
}

/// Vertex list of the convex hull of a support, lexicographically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportShape {
    pub dim: usize,
    pub vertices: Vec<LatticePoint>,
}

impl SupportShape {
    pub fn dilate(&self, d: i64) -> SupportShape {
        SupportShape {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|c| c * d).collect())
                .collect(),
        }
    }
}

// JSON document: {"n": 2, "terms": [{"e": [0, 1], "c2": 1.0}, ...]}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub e: Exponent,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub n: usize,
    pub terms: Vec<TermDoc>,
}

impl<C: Coefficient> ExpSumSpace<C> {
    pub fn to_doc(&self) -> SpaceDoc {
        SpaceDoc {
            n: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermDoc {
                    e: e.clone(),
                    c2: c.to_f64(),
                })
                .collect(),
        }
    }
}

impl ExpSumSpace<f64> {
    pub fn from_doc(doc: &SpaceDoc) -> Result<Self> {
        Self::new(doc.n, doc.terms.iter().map(|t| (t.e.clone(), t.c2)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceDoc = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("malformed space JSON: {e}")))?;
        Self::from_doc(&doc)
    }

    /// Canonical JSON, terms sorted lexicographically by exponent.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("space documents serialize")
    }
}
