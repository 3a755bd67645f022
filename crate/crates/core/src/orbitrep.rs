//! Orbits `{T^n φ}` and the operators that represent a frame as an orbit.
//!
//! For a frame `{f_k}` with a dual `{g_k}` the candidate operator is
//! `T f = Σ ⟨f, g_k⟩ f_{k+1}`. At finite scale only `M − 1` terms exist, so the
//! assembled matrix uses those and the bias of the missing term is reported as a
//! tail indicator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{self, Frame, FrameBounds};
use crate::linalg::{self, CMatrix};
use crate::seqspace::{self, OperatorSpec, SeqVec, DEFAULT_TOL};

/// Norm beyond which an orbit is declared divergent.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Largest dual defect `‖U G* − I‖` accepted as a verified dual.
pub const DUAL_TOL: f64 = 1e-8;

/// Smallest relative singular value accepted as linear independence.
pub const INDEPENDENCE_TOL: f64 = 1e-8;

/// `(φ, Tφ, ..., T^{M−1}φ)` as a frame, with the operator that produced it.
#[derive(Clone, Debug)]
pub struct OrbitFrame {
    pub frame: Frame,
    pub op: OperatorSpec,
    pub phi: SeqVec,
    /// 0-based positions `n` where `T^n φ = 0`.
    pub zero_elements: Vec<usize>,
}

impl OrbitFrame {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    /// An orbit containing the zero vector is degenerate as a frame candidate.
    pub fn is_frame_candidate(&self) -> bool {
        self.zero_elements.is_empty()
    }

    /// `max_k ‖T f_k − f_{k+1}‖`, recomputed with [`seqspace::apply`].
    pub fn certify(&self) -> Result<f64> {
        let els = self.frame.elements();
        let mut worst: f64 = 0.0;
        for w in els.windows(2) {
            worst = worst.max(seqspace::apply(&self.op, &w[0])?.sub(&w[1]).norm());
        }
        Ok(worst)
    }
}

pub fn generate_orbit(op: &OperatorSpec, phi: &SeqVec, count: usize) -> Result<OrbitFrame> {
    if count == 0 {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    let mut elements = Vec::with_capacity(count);
    let mut current = phi.clone();
    for step in 0..count {
        let norm = current.norm();
        if !norm.is_finite() || norm > OVERFLOW_GUARD {
            return Err(Error::OrbitDiverges { step, norm });
        }
        let next = if step + 1 < count {
            Some(seqspace::apply(op, &current)?)
        } else {
            None
        };
        elements.push(current);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    let zero_elements = elements.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(n, _)| n).collect();
    let frame = Frame::new(format!("orbit(n<{count})"), elements)?;
    Ok(OrbitFrame {
        frame,
        op: op.clone(),
        phi: phi.clone(),
        zero_elements,
    })
}

/// Kernel of the synthesis matrix tested against the right shift on coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelShift {
    pub invariant: bool,
    /// `max ‖U 𝒯c‖ / ‖U‖` over an orthonormal basis `c` of the testable kernel.
    pub distance: f64,
    pub kernel_dim: usize,
    /// Dimension of the kernel part whose shift stays inside the index range.
    pub tested_dim: usize,
    /// Kernel directions that would need `f_{M+1}`; excluded from the verdict.
    pub excluded: usize,
}

/// Tests whether `𝒩(U)` is invariant under `𝒯(c_1, c_2, ...) = (0, c_1, c_2, ...)`.
///
/// Only kernel vectors with vanishing last coordinate are shifted; the distance of
/// `𝒯c` from the kernel is measured by the relative synthesis residual `‖U𝒯c‖/‖U‖`.
pub fn kernel_shift_invariance(frame: &Frame) -> Result<KernelShift> {
    kernel_shift_with(frame, DEFAULT_TOL)
}

pub fn kernel_shift_with(frame: &Frame, tol: f64) -> Result<KernelShift> {
    let m = frame.len();
    if m < 2 {
        return Err(Error::TooFew { needed: 2, got: m });
    }
    let u = frame.synthesis();
    let kernel = linalg::null_space(u);
    let q = kernel.ncols();
    if q == 0 {
        return Ok(KernelShift {
            invariant: true,
            distance: 0.0,
            kernel_dim: 0,
            tested_dim: 0,
            excluded: 0,
        });
    }
    let last = kernel.row(m - 1).into_owned();
    let last_norm = last.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let testable = if last_norm <= 1e-12 {
        kernel.clone()
    } else {
        let combos = linalg::null_space(&CMatrix::from_row_slice(1, q, last.as_slice()));
        &kernel * combos
    };
    let scale = linalg::spectral_norm(u).max(f64::MIN_POSITIVE);
    let mut distance: f64 = 0.0;
    for j in 0..testable.ncols() {
        let c = testable.column(j);
        let mut shifted = nalgebra::DVector::zeros(m);
        for i in 1..m {
            shifted[i] = c[i - 1];
        }
        distance = distance.max(linalg::vector_norm(&(u * shifted)) / scale);
    }
    Ok(KernelShift {
        invariant: distance <= tol,
        distance,
        kernel_dim: q,
        tested_dim: testable.ncols(),
        excluded: q - testable.ncols(),
    })
}

#[derive(Clone, Debug)]
pub struct RepresentationResult {
    /// `Σ_{k<M} f_{k+1} g_k*` on the ambient space.
    pub matrix: CMatrix,
    pub norm: f64,
    /// `(1, √(B/A))`.
    pub norm_bounds: (f64, f64),
    /// `max_{j<M} ‖T f_j − f_{j+1}‖`.
    pub residual: f64,
    /// `‖f_M‖·‖g_M‖`: size of the term the finite sum leaves out.
    pub tail_indicator: f64,
    pub frame_bounds: FrameBounds,
    pub kernel: KernelShift,
}

impl RepresentationResult {
    pub fn kernel_invariant(&self) -> bool {
        self.kernel.invariant
    }

    pub fn norm_within_bounds(&self, tol: f64) -> bool {
        self.norm >= self.norm_bounds.0 - tol && self.norm <= self.norm_bounds.1 + tol
    }

    pub fn as_operator(&self) -> OperatorSpec {
        OperatorSpec::DenseMatrix(self.matrix.clone())
    }
}

/// Dual used for orbit representations: the canonical dual of `f_1..f_{M−1}`
/// padded with `g_M = 0` when those elements already span, else the canonical dual.
///
/// With `g_M = 0` the finite sum `Σ_{k<M}` loses nothing, so exact orbits give a
/// zero residual.
pub fn truncation_dual(frame: &Frame) -> Result<Frame> {
    let m = frame.len();
    if m >= 2 {
        let head = frame.slice(0..m - 1)?;
        if frames::frame_bounds(&head).spans_ambient {
            let mut els = frames::canonical_dual(&head)?.elements().to_vec();
            els.push(SeqVec::zero());
            return Frame::with_ambient(format!("tdual({})", frame.label()), els, frame.ambient_dim());
        }
    }
    frames::canonical_dual(frame)
}

pub fn representation_operator(frame: &Frame, dual: &Frame) -> Result<RepresentationResult> {
    let m = frame.len();
    if m < 2 {
        return Err(Error::TooFew { needed: 2, got: m });
    }
    let defect = frames::dual_defect(frame, dual)?;
    if !(defect <= DUAL_TOL) {
        return Err(Error::UnverifiedDual { defect });
    }
    let dim = frame.ambient_dim().max(dual.ambient_dim());
    let u = frame.synthesis_in(dim);
    let g = dual.synthesis_in(dim);
    let matrix = u.columns(1, m - 1) * g.columns(0, m - 1).adjoint();

    let produced = &matrix * u.columns(0, m - 1);
    let residual = (0..m - 1)
        .map(|j| linalg::vector_norm(&(produced.column(j) - u.column(j + 1))))
        .fold(0.0, f64::max);

    let norm = seqspace::finite_section_norm(&OperatorSpec::DenseMatrix(matrix.clone()), dim);
    let frame_bounds = frames::frame_bounds(frame);
    let upper = if frame_bounds.lower > 0.0 {
        (frame_bounds.upper / frame_bounds.lower).sqrt()
    } else {
        f64::INFINITY
    };
    let tail_indicator = frame.elements()[m - 1].norm() * dual.elements()[m - 1].norm();
    let kernel = kernel_shift_invariance(frame)?;
    Ok(RepresentationResult {
        matrix,
        norm,
        norm_bounds: (1.0, upper),
        residual,
        tail_indicator,
        frame_bounds,
        kernel,
    })
}

/// The map `f_k ↦ f_{k+1}` on `span{f_1, ..., f_{M−1}}`, in coordinates of the
/// union of supports.
#[derive(Clone, Debug)]
pub struct SpanRepresentation {
    /// Sorted indices of the coordinates the matrix acts on.
    pub support: Vec<usize>,
    pub matrix: CMatrix,
    pub norm: f64,
}

impl SpanRepresentation {
    /// Applies the map; coordinates outside the support are orthogonal to the span and vanish.
    pub fn apply(&self, v: &SeqVec) -> SeqVec {
        let x = nalgebra::DVector::from_iterator(self.support.len(), self.support.iter().map(|&i| v.get(i)));
        let y = &self.matrix * x;
        SeqVec::from_pairs(self.support.iter().copied().zip(y.iter().copied())).expect("finite coordinates")
    }
}

pub fn span_representation(seq: &[SeqVec]) -> Result<SpanRepresentation> {
    let m = seq.len();
    if m < 2 {
        return Err(Error::TooFew { needed: 2, got: m });
    }
    let mut support: Vec<usize> = seq.iter().flat_map(|v| v.coords().iter().map(|&(i, _)| i)).collect();
    support.sort_unstable();
    support.dedup();
    let mut g = CMatrix::zeros(support.len(), m);
    for (k, v) in seq.iter().enumerate() {
        for &(i, x) in v.coords() {
            let row = support.binary_search(&i).expect("index collected above");
            g[(row, k)] = x;
        }
    }
    let sv = linalg::singular_values(&g);
    let rank = sv.iter().filter(|&&s| s > INDEPENDENCE_TOL * sv[0]).count();
    if sv.is_empty() || sv[0] == 0.0 || rank < m {
        return Err(Error::NotLinearlyIndependent { rank, len: m });
    }
    // Full column rank, so H⁺ = R⁻¹Q* from a thin QR of the head columns.
    let qr = nalgebra::linalg::QR::new(g.columns(0, m - 1).into_owned());
    let head_pinv = qr
        .r()
        .solve_upper_triangular(&qr.q().adjoint())
        .ok_or(Error::NotLinearlyIndependent { rank, len: m })?;
    let matrix = g.columns(1, m - 1) * head_pinv;
    let norm = linalg::spectral_norm(&matrix);
    Ok(SpanRepresentation { support, matrix, norm })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardyReport {
    /// `max_{n<N} ‖T V z^n − V z^{n+1}‖`.
    pub residual: f64,
    pub columns: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel: KernelShift,
}

/// Checks `TV = V𝒮` on the monomials `z^0..z^N`, where `V z^n = T^n φ`.
pub fn hardy_intertwine_check(orbit: &OrbitFrame, n: usize) -> Result<HardyReport> {
    if orbit.len() < n + 1 {
        return Err(Error::TooFew {
            needed: n + 1,
            got: orbit.len(),
        });
    }
    let cols = &orbit.frame.elements()[..=n];
    let mut residual: f64 = 0.0;
    for w in cols.windows(2) {
        residual = residual.max(seqspace::apply(&orbit.op, &w[0])?.sub(&w[1]).norm());
    }
    let v = Frame::with_ambient("V", cols.to_vec(), orbit.frame.ambient_dim())?;
    let rank = linalg::numerical_rank(v.synthesis());
    let kernel = if n + 1 >= 2 {
        kernel_shift_invariance(&v)?
    } else {
        KernelShift {
            invariant: true,
            distance: 0.0,
            kernel_dim: 1 - rank,
            tested_dim: 0,
            excluded: 0,
        }
    };
    Ok(HardyReport {
        residual,
        columns: n + 1,
        rank,
        kernel_dim: n + 1 - rank,
        kernel,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    StrictlyDecreasing,
    Constant,
    Increasing,
    Mixed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayReport {
    /// `‖T^n f‖`, `n = 0..=n_max`.
    pub norms: Vec<f64>,
    /// Trend over the prefix before the first exact zero.
    pub trend: Trend,
    /// Fraction of steps with `‖T^{n+1}f‖ < ‖T^n f‖`.
    pub decreasing_fraction: f64,
    pub first_zero: Option<usize>,
}

pub fn decay_diagnostic(op: &OperatorSpec, f: &SeqVec, n_max: usize) -> Result<DecayReport> {
    let mut norms = Vec::with_capacity(n_max + 1);
    let mut v = f.clone();
    for step in 0..=n_max {
        let norm = v.norm();
        if !norm.is_finite() || norm > OVERFLOW_GUARD {
            return Err(Error::OrbitDiverges { step, norm });
        }
        norms.push(norm);
        if step < n_max {
            v = seqspace::apply(op, &v)?;
        }
    }
    let first_zero = norms.iter().position(|&x| x == 0.0);
    let prefix = &norms[..first_zero.unwrap_or(norms.len())];
    let rel = |a: f64, b: f64| (b - a).abs() <= 1e-12 * a.abs().max(b.abs());
    let steps = prefix.len().saturating_sub(1);
    let (mut down, mut flat, mut up) = (0, 0, 0);
    for w in prefix.windows(2) {
        if rel(w[0], w[1]) {
            flat += 1;
        } else if w[1] < w[0] {
            down += 1;
        } else {
            up += 1;
        }
    }
    let trend = if steps == 0 || flat == steps {
        Trend::Constant
    } else if down == steps {
        Trend::StrictlyDecreasing
    } else if up == steps {
        Trend::Increasing
    } else {
        Trend::Mixed
    };
    let all_steps = norms.len().saturating_sub(1).max(1);
    let decreasing_fraction = norms.windows(2).filter(|w| w[1] < w[0] && !rel(w[0], w[1])).count() as f64 / all_steps as f64;
    Ok(DecayReport {
        norms,
        trend,
        decreasing_fraction,
        first_zero,
    })
}
