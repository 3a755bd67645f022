//! Finitely supported vectors in ℓ²(ℕ) and structured operators acting on them.
//!
//! Indices are 1-based to match the canonical basis `e_1, e_2, ...`. Shift and
//! diagonal actions on a [`SeqVec`] are exact up to the scalar multiplications
//! they perform; there is no ambient truncation dimension at this layer.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Default absolute comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A finitely supported complex sequence, stored as strictly increasing
/// `(index, value)` pairs with no stored zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeqVec {
    coords: Vec<(usize, Complex64)>,
}

impl SeqVec {
    pub fn zero() -> Self {
        SeqVec { coords: Vec::new() }
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis indices start at 1");
        SeqVec {
            coords: vec![(k, Complex64::new(1.0, 0.0))],
        }
    }

    /// Builds a vector from arbitrary pairs; duplicates are summed and exact zeros dropped.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut coords: Vec<(usize, Complex64)> = pairs.into_iter().collect();
        if coords.iter().any(|&(i, _)| i == 0) {
            return Err(Error::ZeroIndex);
        }
        if coords.iter().any(|(_, v)| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("sequence coordinates"));
        }
        coords.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(coords.len());
        for (i, v) in coords {
            match merged.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|(_, v)| *v != Complex64::new(0.0, 0.0));
        Ok(SeqVec { coords: merged })
    }

    /// Real-valued convenience constructor.
    pub fn from_real<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        Self::from_pairs(pairs.into_iter().map(|(i, v)| (i, Complex64::new(v, 0.0))))
    }

    /// Interprets `values[i]` as the coordinate at index `i + 1`.
    pub fn from_dense(values: &[Complex64]) -> Self {
        let coords = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(|(i, v)| (i + 1, *v))
            .collect();
        SeqVec { coords }
    }

    /// Dense coordinates `1..=dim`; entries beyond `dim` are dropped.
    pub fn to_dense(&self, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for &(i, v) in &self.coords {
            if i <= dim {
                out[i - 1] = v;
            }
        }
        out
    }

    pub fn coords(&self) -> &[(usize, Complex64)] {
        &self.coords
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.coords
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.coords[pos].1)
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Largest index carrying a nonzero coordinate (0 for the zero vector).
    pub fn max_index(&self) -> usize {
        self.coords.last().map_or(0, |&(i, _)| i)
    }

    pub fn min_index(&self) -> usize {
        self.coords.first().map_or(0, |&(i, _)| i)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().fold(0.0, |acc, (_, v)| acc + v.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩`, linear in the first argument.
    pub fn inner(&self, other: &SeqVec) -> Complex64 {
        let (mut a, mut b) = (self.coords.iter().peekable(), other.coords.iter().peekable());
        let mut acc = Complex64::new(0.0, 0.0);
        while let (Some(&&(i, u)), Some(&&(j, v))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += u * v.conj();
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> SeqVec {
        if c == Complex64::new(0.0, 0.0) {
            return SeqVec::zero();
        }
        let coords = self
            .coords
            .iter()
            .map(|&(i, v)| (i, v * c))
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .collect();
        SeqVec { coords }
    }

    pub fn scale_real(&self, c: f64) -> SeqVec {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &SeqVec, b: Complex64) -> SeqVec {
        let mut out = Vec::with_capacity(self.coords.len() + other.coords.len());
        let (mut x, mut y) = (self.coords.iter().peekable(), other.coords.iter().peekable());
        loop {
            let next = match (x.peek(), y.peek()) {
                (None, None) => break,
                (Some(&&(i, u)), None) => {
                    x.next();
                    (i, a * u)
                }
                (None, Some(&&(j, v))) => {
                    y.next();
                    (j, b * v)
                }
                (Some(&&(i, u)), Some(&&(j, v))) => match i.cmp(&j) {
                    std::cmp::Ordering::Less => {
                        x.next();
                        (i, a * u)
                    }
                    std::cmp::Ordering::Greater => {
                        y.next();
                        (j, b * v)
                    }
                    std::cmp::Ordering::Equal => {
                        x.next();
                        y.next();
                        (i, a * u + b * v)
                    }
                },
            };
            if next.1 != Complex64::new(0.0, 0.0) {
                out.push(next);
            }
        }
        SeqVec { coords: out }
    }

    pub fn add(&self, other: &SeqVec) -> SeqVec {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &SeqVec) -> SeqVec {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Moves every coordinate from index `i` to `i + s`.
    pub fn shift_up(&self, s: usize) -> SeqVec {
        SeqVec {
            coords: self.coords.iter().map(|&(i, v)| (i + s, v)).collect(),
        }
    }

    /// Moves every coordinate from index `i` to `i - s`, discarding indices `<= s`.
    pub fn shift_down(&self, s: usize) -> SeqVec {
        SeqVec {
            coords: self
                .coords
                .iter()
                .filter(|&&(i, _)| i > s)
                .map(|&(i, v)| (i - s, v))
                .collect(),
        }
    }

    /// Keeps coordinates with index in `lo..=hi`.
    pub fn restrict(&self, lo: usize, hi: usize) -> SeqVec {
        SeqVec {
            coords: self
                .coords
                .iter()
                .filter(|&&(i, _)| i >= lo && i <= hi)
                .copied()
                .collect(),
        }
    }

    pub fn approx_eq(&self, other: &SeqVec, tol: f64) -> bool {
        self.sub(other).norm() <= tol
    }
}

impl fmt::Display for SeqVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, v)) in self.coords.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if v.im == 0.0 {
                write!(f, "{}·e_{}", v.re, i)?;
            } else {
                write!(f, "({}{:+}i)·e_{}", v.re, v.im, i)?;
            }
        }
        Ok(())
    }
}

/// Diagonal operator given by a generator `k ↦ λ_k` and a declared bound on `sup |λ_k|`.
#[derive(Clone)]
pub struct Diagonal {
    generator: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    sup_bound: f64,
    label: String,
}

impl Diagonal {
    pub fn new<F>(label: impl Into<String>, sup_bound: f64, generator: F) -> Result<Self>
    where
        F: Fn(usize) -> Complex64 + Send + Sync + 'static,
    {
        if !sup_bound.is_finite() || sup_bound < 0.0 {
            return Err(Error::InvalidOperator(format!(
                "diagonal sup bound must be finite and nonnegative, got {sup_bound}"
            )));
        }
        Ok(Diagonal {
            generator: Arc::new(generator),
            sup_bound,
            label: label.into(),
        })
    }

    /// Diagonal operator with the listed eigenvalues on indices `1..=len`, zero beyond.
    pub fn from_values(label: impl Into<String>, values: Vec<Complex64>) -> Result<Self> {
        let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self::new(label, sup, move |k| {
            values.get(k - 1).copied().unwrap_or_default()
        })
    }

    /// Constant multiple of the identity.
    pub fn constant(c: Complex64) -> Self {
        Diagonal {
            generator: Arc::new(move |_| c),
            sup_bound: c.norm(),
            label: format!("{c}·I"),
        }
    }

    pub fn eigenvalue(&self, k: usize) -> Complex64 {
        (self.generator)(k)
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn conjugate(&self) -> Self {
        let g = Arc::clone(&self.generator);
        Diagonal {
            generator: Arc::new(move |k| g(k).conj()),
            sup_bound: self.sup_bound,
            label: format!("conj({})", self.label),
        }
    }
}

impl fmt::Debug for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Diagonal")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

/// Structured bounded operator on ℓ²(ℕ).
#[derive(Clone, Debug)]
pub enum OperatorSpec {
    Diagonal(Diagonal),
    /// `λL`: `e_{k+1} ↦ λ e_k`, `e_1 ↦ 0`.
    ScaledLeftShift(f64),
    /// `λ^{-1}R`: `e_k ↦ λ^{-1} e_{k+1}`.
    ScaledRightShift(f64),
    /// The isometry `e_k ↦ e_{k+1}`.
    RightShift,
    /// The co-isometry `e_{k+1} ↦ e_k`, `e_1 ↦ 0`; adjoint of [`OperatorSpec::RightShift`].
    LeftShift,
    /// Square matrix acting on coordinates `1..=dim`; vectors supported beyond `dim` are rejected.
    DenseMatrix(DMatrix<Complex64>),
    /// `ops[0] ∘ ops[1] ∘ ...`: the last operator is applied first.
    Composition(Vec<OperatorSpec>),
}

impl OperatorSpec {
    pub fn scaled_left_shift(scale: f64) -> Result<Self> {
        if !(scale > 1.0) || !scale.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "scaled left shift requires finite scale > 1, got {scale}"
            )));
        }
        Ok(OperatorSpec::ScaledLeftShift(scale))
    }

    pub fn scaled_right_shift(scale: f64) -> Result<Self> {
        if !(scale > 1.0) || !scale.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "scaled right shift requires finite scale > 1, got {scale}"
            )));
        }
        Ok(OperatorSpec::ScaledRightShift(scale))
    }

    pub fn dense(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidOperator(format!(
                "dense operator must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("dense operator entries"));
        }
        Ok(OperatorSpec::DenseMatrix(matrix))
    }

    /// Hilbert-space adjoint.
    pub fn adjoint(&self) -> OperatorSpec {
        match self {
            OperatorSpec::Diagonal(d) => OperatorSpec::Diagonal(d.conjugate()),
            // (λL)* = λR = λ²·(λ^{-1}R)
            OperatorSpec::ScaledLeftShift(l) => OperatorSpec::Composition(vec![
                OperatorSpec::Diagonal(Diagonal::constant(Complex64::new(l * l, 0.0))),
                OperatorSpec::ScaledRightShift(*l),
            ]),
            OperatorSpec::ScaledRightShift(l) => OperatorSpec::Composition(vec![
                OperatorSpec::Diagonal(Diagonal::constant(Complex64::new(1.0 / (l * l), 0.0))),
                OperatorSpec::ScaledLeftShift(*l),
            ]),
            OperatorSpec::RightShift => OperatorSpec::LeftShift,
            OperatorSpec::LeftShift => OperatorSpec::RightShift,
            OperatorSpec::DenseMatrix(m) => OperatorSpec::DenseMatrix(m.adjoint()),
            OperatorSpec::Composition(ops) => {
                OperatorSpec::Composition(ops.iter().rev().map(|op| op.adjoint()).collect())
            }
        }
    }

    /// Upper bound on the operator norm derived from the structure.
    pub fn norm_bound(&self) -> f64 {
        match self {
            OperatorSpec::Diagonal(d) => d.sup_bound(),
            OperatorSpec::ScaledLeftShift(l) => *l,
            OperatorSpec::ScaledRightShift(l) => 1.0 / l,
            OperatorSpec::RightShift | OperatorSpec::LeftShift => 1.0,
            OperatorSpec::DenseMatrix(m) => linalg::spectral_norm(m),
            OperatorSpec::Composition(ops) => ops.iter().map(|op| op.norm_bound()).product(),
        }
    }
}

/// Exact image `op(v)` in canonical form.
pub fn apply(op: &OperatorSpec, v: &SeqVec) -> Result<SeqVec> {
    match op {
        OperatorSpec::Diagonal(d) => Ok(SeqVec {
            coords: v
                .coords
                .iter()
                .map(|&(i, x)| (i, d.eigenvalue(i) * x))
                .filter(|(_, x)| *x != Complex64::new(0.0, 0.0))
                .collect(),
        }),
        OperatorSpec::ScaledLeftShift(l) => Ok(v.shift_down(1).scale_real(*l)),
        OperatorSpec::ScaledRightShift(l) => Ok(v.shift_up(1).scale_real(1.0 / l)),
        OperatorSpec::RightShift => Ok(v.shift_up(1)),
        OperatorSpec::LeftShift => Ok(v.shift_down(1)),
        OperatorSpec::DenseMatrix(m) => {
            let dim = m.nrows();
            if v.max_index() > dim {
                return Err(Error::SupportExceedsDomain {
                    index: v.max_index(),
                    dim,
                });
            }
            let x = nalgebra::DVector::from_vec(v.to_dense(dim));
            Ok(SeqVec::from_dense((m * x).as_slice()))
        }
        OperatorSpec::Composition(ops) => {
            let mut out = v.clone();
            for op in ops.iter().rev() {
                out = apply(op, &out)?;
            }
            Ok(out)
        }
    }
}

/// `op^n(v)`; `n = 0` returns `v` unchanged.
pub fn power_apply(op: &OperatorSpec, n: u64, v: &SeqVec) -> Result<SeqVec> {
    if n == 0 {
        return Ok(v.clone());
    }
    match op {
        OperatorSpec::ScaledLeftShift(l) => {
            let s = usize::try_from(n).unwrap_or(usize::MAX);
            if s >= v.max_index() {
                return Ok(SeqVec::zero());
            }
            Ok(v.shift_down(s).scale_real(pow_real(*l, n)))
        }
        OperatorSpec::ScaledRightShift(l) => {
            let s = usize::try_from(n).expect("shift exponent fits in usize");
            Ok(v.shift_up(s).scale_real(pow_real(1.0 / l, n)))
        }
        OperatorSpec::RightShift => Ok(v.shift_up(n as usize)),
        OperatorSpec::LeftShift => Ok(v.shift_down(usize::try_from(n).unwrap_or(usize::MAX))),
        _ => {
            let mut out = v.clone();
            for _ in 0..n {
                out = apply(op, &out)?;
                if out.is_zero() {
                    break;
                }
            }
            Ok(out)
        }
    }
}

/// `base^n` by repeated squaring; exponents beyond `i32` saturate through `powf`.
pub(crate) fn pow_real(base: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(n as f64),
    }
}

/// Matrix of the leading `dim × dim` section `P_dim op P_dim`.
pub fn finite_section(op: &OperatorSpec, dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for j in 1..=dim {
        let image = match op {
            // Dense operators annihilate coordinates beyond their dimension.
            OperatorSpec::DenseMatrix(d) if j > d.nrows() => continue,
            _ => section_image(op, &SeqVec::basis(j)),
        };
        for &(i, v) in image.coords() {
            if i <= dim {
                m[(i - 1, j - 1)] = v;
            }
        }
    }
    m
}

fn section_image(op: &OperatorSpec, v: &SeqVec) -> SeqVec {
    match op {
        OperatorSpec::DenseMatrix(d) => {
            let n = d.nrows();
            if v.max_index() > n {
                SeqVec::zero()
            } else {
                apply(op, v).expect("support checked")
            }
        }
        OperatorSpec::Composition(ops) => {
            let mut out = v.clone();
            for op in ops.iter().rev() {
                out = section_image(op, &out);
            }
            out
        }
        _ => apply(op, v).expect("structured operators accept any finite support"),
    }
}

/// Largest singular value of the leading `dim × dim` section.
pub fn finite_section_norm(op: &OperatorSpec, dim: usize) -> f64 {
    assert!(dim >= 1, "section dimension must be positive");
    linalg::spectral_norm(&finite_section(op, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let v = SeqVec::from_pairs(vec![(3, c(1.0)), (1, c(2.0)), (3, c(-1.0)), (2, c(0.0))]).unwrap();
        assert_eq!(v.coords(), &[(1, c(2.0))]);
        assert!(SeqVec::from_real(vec![(0, 1.0)]).is_err());
    }

    #[test]
    fn shift_examples() {
        let t = OperatorSpec::scaled_left_shift(2.0).unwrap();
        assert_eq!(apply(&t, &SeqVec::basis(2)).unwrap(), SeqVec::basis(1).scale_real(2.0));
        assert!(apply(&t, &SeqVec::basis(1)).unwrap().is_zero());

        let u = OperatorSpec::scaled_right_shift(2.0).unwrap();
        assert_eq!(apply(&u, &SeqVec::basis(1)).unwrap(), SeqVec::basis(2).scale_real(0.5));
    }

    #[test]
    fn diagonal_example() {
        let d = Diagonal::new("1-2^-k", 1.0, |k| c(1.0 - 2f64.powi(-(k as i32)))).unwrap();
        let out = apply(&OperatorSpec::Diagonal(d), &SeqVec::basis(3)).unwrap();
        assert_eq!(out, SeqVec::basis(3).scale_real(7.0 / 8.0));
    }

    #[test]
    fn power_examples() {
        let t = OperatorSpec::ScaledLeftShift(2.0);
        assert_eq!(power_apply(&t, 0, &SeqVec::basis(5)).unwrap(), SeqVec::basis(5));
        assert_eq!(power_apply(&t, 4, &SeqVec::basis(5)).unwrap(), SeqVec::basis(1).scale_real(16.0));
        assert!(power_apply(&t, 5, &SeqVec::basis(5)).unwrap().is_zero());

        let u = OperatorSpec::ScaledRightShift(2f64.sqrt());
        let out = power_apply(&u, 2, &SeqVec::basis(1)).unwrap();
        assert!(out.approx_eq(&SeqVec::basis(3).scale_real(0.5), 1e-15));
    }

    #[test]
    fn power_apply_matches_repeated_apply() {
        let ops = vec![
            OperatorSpec::ScaledLeftShift(1.5),
            OperatorSpec::ScaledRightShift(1.5),
            OperatorSpec::RightShift,
            OperatorSpec::LeftShift,
        ];
        let v = SeqVec::from_real(vec![(2, 1.0), (5, -2.0), (9, 0.5)]).unwrap();
        for op in &ops {
            let mut w = v.clone();
            for n in 0..12u64 {
                let fast = power_apply(op, n, &v).unwrap();
                assert!(fast.approx_eq(&w, 1e-12), "{op:?} n={n}");
                w = apply(op, &w).unwrap();
            }
        }
    }

    #[test]
    fn dense_rejects_support_beyond_dim() {
        let op = OperatorSpec::dense(DMatrix::identity(3, 3)).unwrap();
        let err = apply(&op, &SeqVec::basis(4)).unwrap_err();
        assert!(err.to_string().contains("support exceeds matrix domain"));
    }

    #[test]
    fn finite_section_norm_examples() {
        let t = OperatorSpec::ScaledLeftShift(2.0);
        assert!((finite_section_norm(&t, 10) - 2.0).abs() < 1e-12);
        assert_eq!(finite_section_norm(&t, 1), 0.0);

        let d = Diagonal::new("1-2^-k", 1.0, |k| c(1.0 - 2f64.powi(-(k as i32)))).unwrap();
        let n = finite_section_norm(&OperatorSpec::Diagonal(d), 10);
        assert!((n - (1.0 - 2f64.powi(-10))).abs() < 1e-12);

        let id = OperatorSpec::dense(DMatrix::identity(3, 3)).unwrap();
        assert!((finite_section_norm(&id, 3) - 1.0).abs() < 1e-12);
        // Truncation semantics: coordinates beyond the matrix are annihilated.
        assert!((finite_section_norm(&id, 5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_section_norm_is_monotone() {
        let ops = vec![
            OperatorSpec::ScaledLeftShift(1.3),
            OperatorSpec::RightShift,
            OperatorSpec::Diagonal(Diagonal::new("k/(k+1)", 1.0, |k| c(k as f64 / (k as f64 + 1.0))).unwrap()),
        ];
        for op in &ops {
            let mut prev = 0.0;
            for d in 1..15 {
                let n = finite_section_norm(op, d);
                assert!(n + 1e-12 >= prev, "{op:?} d={d}");
                prev = n;
            }
        }
    }

    #[test]
    fn composition_applies_right_to_left() {
        let comp = OperatorSpec::Composition(vec![
            OperatorSpec::Diagonal(Diagonal::from_values("w", vec![c(1.0), c(3.0)]).unwrap()),
            OperatorSpec::RightShift,
        ]);
        assert_eq!(apply(&comp, &SeqVec::basis(1)).unwrap(), SeqVec::basis(2).scale_real(3.0));
    }

    #[test]
    fn inner_product_is_conjugate_linear_in_second() {
        let u = SeqVec::from_pairs(vec![(1, Complex64::new(0.0, 1.0))]).unwrap();
        let v = SeqVec::from_pairs(vec![(1, Complex64::new(0.0, 1.0)), (2, c(4.0))]).unwrap();
        assert_eq!(u.inner(&v), c(1.0));
        assert_eq!(u.inner(&u.scale(Complex64::new(0.0, 2.0))), Complex64::new(0.0, -2.0));
    }
}
