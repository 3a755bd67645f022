//! Frame analysis at finite scale: synthesis and frame operators, frame bounds,
//! canonical duals, excess, reconstruction, and ε-approximation reports.
//!
//! A [`Frame`] is an ordered family of finitely supported vectors together with
//! an ambient dimension `d`; the family is treated as a frame for its span inside
//! `span{e_1, ..., e_d}`. Families that do not span the whole ambient space are
//! reported as subspace frames rather than rejected.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::seqspace::{SeqVec, DEFAULT_TOL};

/// Ordered finite family of sequence vectors with a cached synthesis matrix.
#[derive(Clone, Debug)]
pub struct Frame {
    label: String,
    ambient_dim: usize,
    elements: Vec<SeqVec>,
    synthesis: CMatrix,
}

impl Frame {
    /// Ambient dimension is the smallest `d` containing every support (at least 1).
    pub fn new(label: impl Into<String>, elements: Vec<SeqVec>) -> Result<Self> {
        let dim = elements.iter().map(SeqVec::max_index).max().unwrap_or(0).max(1);
        Self::with_ambient(label, elements, dim)
    }

    pub fn with_ambient(label: impl Into<String>, elements: Vec<SeqVec>, ambient_dim: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if ambient_dim == 0 {
            return Err(Error::OutsideAmbient {
                element: 0,
                index: 0,
                dim: 0,
            });
        }
        for (k, f) in elements.iter().enumerate() {
            if f.max_index() > ambient_dim {
                return Err(Error::OutsideAmbient {
                    element: k + 1,
                    index: f.max_index(),
                    dim: ambient_dim,
                });
            }
        }
        let synthesis = linalg::columns_matrix(&elements, ambient_dim);
        Ok(Frame {
            label: label.into(),
            ambient_dim,
            elements,
            synthesis,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn elements(&self) -> &[SeqVec] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `d × M` matrix whose columns are the frame elements.
    pub fn synthesis(&self) -> &CMatrix {
        &self.synthesis
    }

    /// Synthesis matrix embedded in a larger ambient dimension.
    pub fn synthesis_in(&self, dim: usize) -> CMatrix {
        assert!(dim >= self.ambient_dim);
        linalg::embed(&self.synthesis, dim, self.len())
    }

    /// Frame operator `S = U U*` on the ambient space.
    pub fn frame_operator(&self) -> CMatrix {
        &self.synthesis * self.synthesis.adjoint()
    }

    /// `Σ_k |⟨f, f_k⟩|²`.
    pub fn bessel_sum(&self, f: &SeqVec) -> f64 {
        self.elements.iter().fold(0.0, |acc, fk| acc + f.inner(fk).norm_sqr())
    }

    /// Same family under a new label.
    pub fn relabeled(&self, label: impl Into<String>) -> Frame {
        Frame {
            label: label.into(),
            ..self.clone()
        }
    }

    /// Frame made of the elements with index (0-based) in `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Frame> {
        Frame::with_ambient(
            format!("{}[{}..{}]", self.label, range.start, range.end),
            self.elements[range].to_vec(),
            self.ambient_dim,
        )
    }

    pub fn to_json(&self) -> FrameJson {
        FrameJson {
            label: self.label.clone(),
            ambient_dim: self.ambient_dim,
            elements: self
                .elements
                .iter()
                .map(|f| f.coords().iter().map(|&(i, v)| (i, v.re, v.im)).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &FrameJson) -> Result<Frame> {
        let elements = json
            .elements
            .iter()
            .map(|e| SeqVec::from_pairs(e.iter().map(|&(i, re, im)| (i, Complex64::new(re, im)))))
            .collect::<Result<Vec<_>>>()?;
        Frame::with_ambient(json.label.clone(), elements, json.ambient_dim)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Frame> {
        Frame::from_json(&serde_json::from_str(s)?)
    }
}

/// Wire format: `{label, ambient_dim, elements: [[[index, re, im], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub label: String,
    pub ambient_dim: usize,
    pub elements: Vec<Vec<(usize, f64, f64)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    /// Smallest nonzero eigenvalue of `S` (on the span).
    pub lower: f64,
    pub upper: f64,
    /// Rank of the synthesis matrix.
    pub span_dim: usize,
    /// `false` marks a subspace frame: `lower` refers to the span only.
    pub spans_ambient: bool,
}

impl FrameBounds {
    /// Lower bound as a frame for the full ambient space (0 for subspace frames).
    pub fn ambient_lower(&self) -> f64 {
        if self.spans_ambient {
            self.lower
        } else {
            0.0
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }
}

/// Frame bounds from the singular values of the synthesis matrix; `σ_i²` are
/// the eigenvalues of `S = UU*`.
pub fn frame_bounds(frame: &Frame) -> FrameBounds {
    bounds_from_synthesis(frame.synthesis(), frame.ambient_dim())
}

pub(crate) fn bounds_from_synthesis(u: &CMatrix, ambient_dim: usize) -> FrameBounds {
    let sv = linalg::singular_values(u);
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = linalg::rank_with(&sv, linalg::rank_tolerance(top, u.nrows(), u.ncols()));
    let lower = if rank == 0 { 0.0 } else { sv[rank - 1] * sv[rank - 1] };
    FrameBounds {
        lower,
        upper: top * top,
        span_dim: rank,
        spans_ambient: rank == ambient_dim,
    }
}

/// `M − rank(U)`.
pub fn excess(frame: &Frame) -> usize {
    frame.len() - linalg::numerical_rank(frame.synthesis())
}

/// `{S^{-1} f_k}` in the original order.
pub fn canonical_dual(frame: &Frame) -> Result<Frame> {
    let bounds = frame_bounds(frame);
    if !bounds.spans_ambient {
        return Err(Error::NotSpanning {
            rank: bounds.span_dim,
            dim: frame.ambient_dim(),
        });
    }
    // S^{-1} U = (U^+)* when U has full row rank.
    let g = linalg::pseudo_inverse(frame.synthesis()).adjoint();
    let elements = (0..frame.len()).map(|k| linalg::column_to_seq(&g, k)).collect();
    Frame::with_ambient(format!("dual({})", frame.label()), elements, frame.ambient_dim())
}

/// Returns `Σ ⟨f, g_k⟩ f_k` and its distance to `f`.
pub fn reconstruct(frame: &Frame, dual: &Frame, f: &SeqVec) -> Result<(SeqVec, f64)> {
    if frame.len() != dual.len() {
        return Err(Error::LengthMismatch {
            left: frame.len(),
            right: dual.len(),
        });
    }
    let mut out = SeqVec::zero();
    for (fk, gk) in frame.elements().iter().zip(dual.elements()) {
        out = out.combine(Complex64::new(1.0, 0.0), fk, f.inner(gk));
    }
    let residual = out.sub(f).norm();
    Ok((out, residual))
}

/// `‖U G* − I‖` on the common ambient space; zero exactly for dual pairs.
pub fn dual_defect(frame: &Frame, dual: &Frame) -> Result<f64> {
    if frame.len() != dual.len() {
        return Err(Error::LengthMismatch {
            left: frame.len(),
            right: dual.len(),
        });
    }
    let dim = frame.ambient_dim().max(dual.ambient_dim());
    let u = frame.synthesis_in(dim);
    let g = dual.synthesis_in(dim);
    let defect = &u * g.adjoint() - DMatrix::<Complex64>::identity(dim, dim);
    Ok(linalg::spectral_norm(&defect))
}

/// Outcome of comparing a frame with a candidate ε-approximation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxReport {
    pub epsilon: f64,
    /// `‖f_k − f̃_k‖²` for each k.
    pub per_element_errors: Vec<f64>,
    /// `‖U − Ũ‖` on the common ambient space.
    pub synthesis_gap: f64,
    /// `synthesis_gap² ≤ ε`.
    pub verdict: bool,
    pub reference_bounds: FrameBounds,
    /// `(A(1−√(ε/A))², B(1+√(ε/B))²)` from the reference bounds.
    pub bound_interval: (f64, f64),
    /// Bounds of the approximation compressed to the reference span.
    pub approx_bounds: (f64, f64),
    pub bounds_within: bool,
    pub excess_reference: usize,
    /// Excess of the approximation compressed to the reference span.
    pub excess_approx: usize,
    /// Excess of the approximation in its own (possibly larger) ambient space.
    pub excess_approx_ambient: usize,
    /// `None` when the perturbation result does not apply (ε ≥ A).
    pub excess_match: Option<bool>,
    /// `‖S − S̃‖` on the common ambient space.
    pub frame_op_gap: f64,
    pub frame_op_bound: f64,
    /// `‖S^{-1} − S̃^{-1}‖` on the reference span (infinite if `S̃` is singular there).
    pub inv_frame_op_gap: f64,
    pub inv_frame_op_bound: f64,
    pub theorem_applicable: bool,
    pub warning: Option<String>,
}

impl ApproxReport {
    /// Every perturbation conclusion holds (only meaningful when the theorem applies).
    pub fn conclusions_hold(&self, tol: f64) -> bool {
        self.verdict
            && self.theorem_applicable
            && self.bounds_within
            && self.excess_match == Some(true)
            && self.frame_op_gap <= self.frame_op_bound + tol
            && self.inv_frame_op_gap <= self.inv_frame_op_bound + tol
    }
}

/// Compares `frame` with `approx` at tolerance `epsilon`.
///
/// The approximation may live in a larger ambient space (suborbit constructions
/// leak mass beyond the reference support). Bounds and excess of the approximation
/// are measured on its compression `Q*Ũ` to the span of the reference frame, which
/// is the Hilbert space the reference family is a frame for.
pub fn epsilon_approx_check(frame: &Frame, approx: &Frame, epsilon: f64) -> Result<ApproxReport> {
    if frame.len() != approx.len() {
        return Err(Error::LengthMismatch {
            left: frame.len(),
            right: approx.len(),
        });
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    let m = frame.len();
    let dim = frame.ambient_dim().max(approx.ambient_dim());
    let u = frame.synthesis_in(dim);
    let ut = approx.synthesis_in(dim);

    let per_element_errors = frame
        .elements()
        .iter()
        .zip(approx.elements())
        .map(|(f, g)| f.sub(g).norm_sq())
        .collect();
    let synthesis_gap = linalg::spectral_norm(&(&u - &ut));
    let verdict = synthesis_gap * synthesis_gap <= epsilon;

    let reference_bounds = frame_bounds(frame);
    let a = reference_bounds.lower;
    let b = reference_bounds.upper;
    let theorem_applicable = epsilon < a;
    let warning = (!theorem_applicable).then(|| "perturbation theorem inapplicable".to_string());
    let bound_interval = if a > 0.0 {
        (a * (1.0 - (epsilon / a).sqrt()).powi(2), b * (1.0 + (epsilon / b).sqrt()).powi(2))
    } else {
        (0.0, b * (1.0 + (epsilon / b.max(f64::MIN_POSITIVE)).sqrt()).powi(2))
    };

    // Compression to the reference span.
    let q = linalg::embed(&linalg::range_basis(frame.synthesis()), dim, reference_bounds.span_dim);
    let ut_c = q.adjoint() * &ut;
    let u_c = q.adjoint() * &u;
    let sv_c = linalg::singular_values(&ut_c);
    let r = reference_bounds.span_dim;
    let approx_lower = if r == 0 || sv_c.len() < r { 0.0 } else { sv_c[r - 1] * sv_c[r - 1] };
    let approx_upper = sv_c.first().map_or(0.0, |s| s * s);
    let tol = DEFAULT_TOL * b.max(1.0);
    let bounds_within = approx_lower + tol >= bound_interval.0 && approx_upper <= bound_interval.1 + tol;

    let excess_reference = excess(frame);
    let excess_approx = m - linalg::numerical_rank(&ut_c);
    let excess_approx_ambient = excess(approx);
    let excess_match = theorem_applicable.then_some(excess_reference == excess_approx);

    let s = &u * u.adjoint();
    let st = &ut * ut.adjoint();
    let frame_op_gap = linalg::spectral_norm(&(s - st));
    let frame_op_bound = (epsilon * b).sqrt() * (2.0 + (epsilon / b).sqrt());

    let s_c = &u_c * u_c.adjoint();
    let st_c = &ut_c * ut_c.adjoint();
    let inv_frame_op_gap = match (s_c.clone().try_inverse(), st_c.clone().try_inverse()) {
        (Some(si), Some(sti)) if approx_lower > 0.0 => linalg::spectral_norm(&(si - sti)),
        _ => f64::INFINITY,
    };
    let inv_frame_op_bound = if theorem_applicable {
        frame_op_bound / (a * a * (1.0 - (epsilon / a).sqrt()).powi(2))
    } else {
        f64::INFINITY
    };

    Ok(ApproxReport {
        epsilon,
        per_element_errors,
        synthesis_gap,
        verdict,
        reference_bounds,
        bound_interval,
        approx_bounds: (approx_lower, approx_upper),
        bounds_within,
        excess_reference,
        excess_approx,
        excess_approx_ambient,
        excess_match,
        frame_op_gap,
        frame_op_bound,
        inv_frame_op_gap,
        inv_frame_op_bound,
        theorem_applicable,
        warning,
    })
}

/// `{e_1, ..., e_d}`.
pub fn onb(d: usize) -> Frame {
    Frame::with_ambient(format!("onb({d})"), (1..=d).map(SeqVec::basis).collect(), d).expect("valid basis")
}

/// `{e_1, e_1, e_2, e_2, ..., e_d, e_d}`.
pub fn doubled_onb(d: usize) -> Frame {
    let elements = (1..=d).flat_map(|k| [SeqVec::basis(k), SeqVec::basis(k)]).collect();
    Frame::with_ambient(format!("doubled_onb({d})"), elements, d).expect("valid basis")
}

/// `{k·e_k}_{k=1..d}`.
pub fn scaled_basis(d: usize) -> Frame {
    let elements = (1..=d).map(|k| SeqVec::basis(k).scale_real(k as f64)).collect();
    Frame::with_ambient(format!("scaled_basis({d})"), elements, d).expect("valid basis")
}

/// `f_k = e_k + δ e_{k+1}` for `k < d`, `f_d = e_d`: a Riesz basis for `δ` small.
pub fn riesz_perturbed(d: usize, delta: f64) -> Frame {
    let elements = (1..=d)
        .map(|k| {
            if k < d {
                SeqVec::from_real([(k, 1.0), (k + 1, delta)]).expect("finite")
            } else {
                SeqVec::basis(k)
            }
        })
        .collect();
    Frame::with_ambient(format!("riesz_perturbed({d},{delta})"), elements, d).expect("valid basis")
}
