//! Integration domains: boxes in logarithmic coordinates, finite unions of
//! them, and sign-conditioned regions in monomial coordinates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Axis-aligned box `[lo, hi]` with `lo < hi` in every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Real> DomainBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::validation("box must have at least one axis"));
        }
        Error::check_dim(lo.len(), hi.len())?;
        for (a, b) in lo.iter().zip(&hi) {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::validation("box bounds must be finite"));
            }
            if !(a < b) {
                return Err(Error::validation(format!(
                    "box needs lo < hi, got {a} and {b}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[lo, hi]ⁿ`.
    pub fn cube(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn measure(&self) -> T {
        self.lo.iter().zip(&self.hi).map(|(&a, &b)| b - a).product()
    }

    fn interiors_overlap(&self, other: &Self) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((&a0, &a1), (&b0, &b1))| a0.max(b0) < a1.min(b1))
    }

    /// Componentwise logarithm of a box in the positive orthant.
    pub fn log(&self) -> Result<Self> {
        if self.lo.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::validation(
                "region touches a coordinate hyperplane (needs lo > 0 in monomial coordinates)",
            ));
        }
        Self::new(
            self.lo.iter().map(|v| v.ln()).collect(),
            self.hi.iter().map(|v| v.ln()).collect(),
        )
    }

    pub fn exp(&self) -> Result<Self> {
        Self::new(
            self.lo.iter().map(|v| v.exp()).collect(),
            self.hi.iter().map(|v| v.exp()).collect(),
        )
    }
}

/// Finite union of boxes with pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainUnion<T> {
    boxes: Vec<DomainBox<T>>,
}

impl<T: Real> DomainUnion<T> {
    pub fn new(boxes: Vec<DomainBox<T>>) -> Result<Self> {
        let first = boxes
            .first()
            .ok_or_else(|| Error::validation("domain union is empty"))?;
        let n = first.dim();
        for b in &boxes {
            Error::check_dim(n, b.dim())?;
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].interiors_overlap(&boxes[j]) {
                    return Err(Error::validation(format!(
                        "boxes {i} and {j} of the union overlap"
                    )));
                }
            }
        }
        Ok(Self { boxes })
    }

    pub fn single(b: DomainBox<T>) -> Self {
        Self { boxes: vec![b] }
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub fn boxes(&self) -> &[DomainBox<T>] {
        &self.boxes
    }
}

impl<T: Real> From<DomainBox<T>> for DomainUnion<T> {
    fn from(b: DomainBox<T>) -> Self {
        Self::single(b)
    }
}

/// Sign vector `s ∈ {±1}ⁿ`.
pub type SignVector = Vec<i8>;

/// All `2ⁿ` sign vectors in a fixed order.
pub fn all_signs(n: usize) -> Vec<SignVector> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|k| if mask & (1 << k) != 0 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// A region `W = ⋃ W_s` stored orthant by orthant, each piece reflected into
/// the positive orthant: `|W_s| = diag(s) W_s`, in monomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedDomain<T> {
    dim: usize,
    pieces: BTreeMap<SignVector, DomainUnion<T>>,
}

impl<T: Real> SignedDomain<T> {
    pub fn new(dim: usize, pieces: BTreeMap<SignVector, DomainUnion<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::validation("signed domain has no pieces"));
        }
        for (s, u) in &pieces {
            Error::check_dim(dim, s.len())?;
            Error::check_dim(dim, u.dim())?;
            if s.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::validation(format!(
                    "sign vector {s:?} must have entries ±1"
                )));
            }
            if u.boxes()
                .iter()
                .any(|b| b.lo().iter().any(|&v| !(v > T::zero())))
            {
                return Err(Error::validation(
                    "region touches a coordinate hyperplane (needs lo > 0 in monomial coordinates)",
                ));
            }
        }
        Ok(Self { dim, pieces })
    }

    /// Groups boxes given in monomial coordinates by orthant. Each box must
    /// lie inside one open orthant.
    pub fn from_monomial_boxes(boxes: Vec<DomainBox<T>>) -> Result<Self> {
        let n = boxes
            .first()
            .ok_or_else(|| Error::validation("no boxes"))?
            .dim();
        let mut grouped: BTreeMap<SignVector, Vec<DomainBox<T>>> = BTreeMap::new();
        for b in boxes {
            Error::check_dim(n, b.dim())?;
            let mut s = Vec::with_capacity(n);
            let mut lo = Vec::with_capacity(n);
            let mut hi = Vec::with_capacity(n);
            for (&a, &c) in b.lo().iter().zip(b.hi()) {
                if a > T::zero() {
                    s.push(1);
                    lo.push(a);
                    hi.push(c);
                } else if c < T::zero() {
                    s.push(-1);
                    lo.push(-c);
                    hi.push(-a);
                } else {
                    return Err(Error::validation(
                        "region touches a coordinate hyperplane (each box must lie in an open orthant)",
                    ));
                }
            }
            grouped.entry(s).or_default().push(DomainBox::new(lo, hi)?);
        }
        let pieces = grouped
            .into_iter()
            .map(|(s, bs)| Ok((s, DomainUnion::new(bs)?)))
            .collect::<Result<_>>()?;
        Self::new(n, pieces)
    }

    /// The same logarithmic domain replicated in every orthant.
    pub fn all_orthants(log_domain: &DomainUnion<T>) -> Result<Self> {
        let exp_union = DomainUnion::new(
            log_domain
                .boxes()
                .iter()
                .map(DomainBox::exp)
                .collect::<Result<_>>()?,
        )?;
        let n = log_domain.dim();
        Self::new(
            n,
            all_signs(n)
                .into_iter()
                .map(|s| (s, exp_union.clone()))
                .collect(),
        )
    }

    /// Only the positive orthant.
    pub fn positive(log_domain: &DomainUnion<T>) -> Result<Self> {
        let exp_union = DomainUnion::new(
            log_domain
                .boxes()
                .iter()
                .map(DomainBox::exp)
                .collect::<Result<_>>()?,
        )?;
        let n = log_domain.dim();
        Self::new(n, [(vec![1; n], exp_union)].into_iter().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&SignVector, &DomainUnion<T>)> {
        self.pieces.iter()
    }

    /// Each piece mapped to logarithmic coordinates.
    pub fn log_pieces(&self) -> Result<Vec<(SignVector, DomainUnion<T>)>> {
        self.pieces
            .iter()
            .map(|(s, u)| {
                let boxes = u
                    .boxes()
                    .iter()
                    .map(DomainBox::log)
                    .collect::<Result<Vec<_>>>()?;
                Ok((s.clone(), DomainUnion::new(boxes)?))
            })
            .collect()
    }
}

/// Anything whose expected root count is a sum over logarithmic boxes, each
/// tagged with the orthant it came from.
pub trait Region<T: Real> {
    fn dim(&self) -> usize;

    fn signed_log_boxes(&self) -> Result<Vec<(SignVector, DomainBox<T>)>>;

    fn log_boxes(&self) -> Result<Vec<DomainBox<T>>> {
        Ok(self
            .signed_log_boxes()?
            .into_iter()
            .map(|(_, b)| b)
            .collect())
    }
}

impl<T: Real> Region<T> for DomainUnion<T> {
    fn dim(&self) -> usize {
        DomainUnion::dim(self)
    }
    fn signed_log_boxes(&self) -> Result<Vec<(SignVector, DomainBox<T>)>> {
        let s = vec![1; self.dim()];
        Ok(self.boxes.iter().map(|b| (s.clone(), b.clone())).collect())
    }
}

impl<T: Real> Region<T> for SignedDomain<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn signed_log_boxes(&self) -> Result<Vec<(SignVector, DomainBox<T>)>> {
        Ok(self
            .log_pieces()?
            .into_iter()
            .flat_map(|(s, u)| u.boxes.into_iter().map(move |b| (s.clone(), b)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_validation() {
        assert!(DomainBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(DomainBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(DomainBox::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(DomainBox::new(vec![f64::NEG_INFINITY], vec![0.0]).is_err());
        assert!(DomainBox::new(vec![0.0], vec![1e-300]).is_ok());
    }

    #[test]
    fn union_disjointness() {
        let a = DomainBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let touching = DomainBox::new(vec![1.0, 0.0], vec![2.0, 1.0]).unwrap();
        let overlapping = DomainBox::new(vec![0.5, 0.5], vec![2.0, 2.0]).unwrap();
        assert!(DomainUnion::new(vec![a.clone(), touching]).is_ok());
        assert!(DomainUnion::new(vec![a, overlapping]).is_err());
        assert!(DomainUnion::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn signed_grouping() {
        let e = std::f64::consts::E;
        let boxes = vec![
            DomainBox::new(vec![-e * e], vec![-e]).unwrap(),
            DomainBox::new(vec![e], vec![e * e]).unwrap(),
        ];
        let w = SignedDomain::from_monomial_boxes(boxes).unwrap();
        let logs = w.log_pieces().unwrap();
        assert_eq!(logs.len(), 2);
        for (_, u) in &logs {
            assert!((u.boxes()[0].lo()[0] - 1.0).abs() < 1e-15);
            assert!((u.boxes()[0].hi()[0] - 2.0).abs() < 1e-15);
        }
        let straddle = DomainBox::new(vec![-1.0], vec![1.0]).unwrap();
        assert!(SignedDomain::from_monomial_boxes(vec![straddle]).is_err());
        let bad: BTreeMap<SignVector, DomainUnion<f64>> = [(
            vec![1],
            DomainUnion::single(DomainBox::new(vec![0.0], vec![1.0]).unwrap()),
        )]
        .into_iter()
        .collect();
        assert!(SignedDomain::new(1, bad).is_err());
    }

    #[test]
    fn all_orthants_has_two_to_the_n_pieces() {
        let d = DomainUnion::single(DomainBox::cube(3, -1.0, 1.0).unwrap());
        let w = SignedDomain::all_orthants(&d).unwrap();
        assert_eq!(w.pieces().count(), 8);
        assert_eq!(w.log_boxes().unwrap().len(), 8);
        assert_eq!(
            all_signs(2),
            vec![vec![1, 1], vec![-1, 1], vec![1, -1], vec![-1, -1]]
        );
    }
}
