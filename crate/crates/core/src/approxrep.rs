//! Approximate frame representations by suborbits of scaled shifts.
//!
//! With `T = λL` and `U = λ^{-1}R` (so `TU = I`), the vector
//! `φ = Σ_n U^{α(n)} f_n` satisfies `T^{α(k)} φ ≈ f_k` once the gaps
//! `α(k+1) − α(k)` exceed the support sizes `m(k)`: earlier blocks are shifted
//! out and later blocks are damped by `λ^{-(α(n) − α(k))}`. Gap schedules come
//! from a general logarithmic rule or, for `λ = √2`, from closed dyadic formulas.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{self, ApproxReport, Frame};
use crate::seqspace::{self, OperatorSpec, SeqVec};

/// `(T, U) = (λL, λ^{-1}R)`.
pub fn scaled_shifts(lambda: f64) -> Result<(OperatorSpec, OperatorSpec)> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::LambdaTooSmall(lambda));
    }
    Ok((OperatorSpec::ScaledLeftShift(lambda), OperatorSpec::ScaledRightShift(lambda)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleInput {
    /// `m(k)`: largest index of a nonzero coordinate of `f_k`.
    pub supports: Vec<usize>,
    pub lambda: f64,
    /// Upper frame bound `B`.
    pub upper: f64,
    pub epsilon: f64,
    /// Lower frame bound `A`, for the range check `0 < ε < A`.
    pub lower: f64,
}

impl ScheduleInput {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0) || !self.lambda.is_finite() {
            return Err(Error::LambdaTooSmall(self.lambda));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::NonPositiveEpsilon(self.epsilon));
        }
        if !(self.epsilon < self.lower) {
            return Err(Error::EpsilonNotBelowLowerBound {
                epsilon: self.epsilon,
                lower: self.lower,
            });
        }
        if !(self.lower <= self.upper) || !self.upper.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "frame bounds must satisfy A <= B < inf, got ({}, {})",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Gaps `≥ max(m(k), (k ln 2 + ln(B/ε) + ln(λ²/(λ²−1))) / (2 ln λ))`.
    General,
    /// `α(k) = (k−1)[N+j+1+k/2] + Σ_{ℓ<k} m(ℓ)`.
    DyadicUnrestricted,
    /// `α(k) = (k−1)[N+j+1+k/2]`, valid when `m(k) ≤ N+j+1+k`.
    DyadicBoundedSupport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSchedule {
    pub alphas: Vec<u64>,
    pub provenance: Provenance,
    /// Some real-valued formula value was rounded up to an integer.
    pub rounded: bool,
}

impl AlphaSchedule {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn gap(&self, k: usize) -> Option<u64> {
        Some(self.alphas.get(k + 1)? - self.alphas.get(k)?)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.alphas.first() == Some(&0) && self.alphas.windows(2).all(|w| w[1] > w[0])
    }
}

/// Ceiling that treats values within `1e-9` (relative) of an integer as that integer.
fn snapped_ceil(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// Smallest admissible integer gaps for the general rule; returns `α(1..=K)`.
/// Gap `k` uses `m(k)`, so `supports` must cover `k = 1..K−1`.
pub fn alpha_schedule_general(input: &ScheduleInput, k_terms: usize) -> Result<AlphaSchedule> {
    input.validate()?;
    if k_terms == 0 {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    if input.supports.len() + 1 < k_terms {
        return Err(Error::ScheduleTooShort {
            have: input.supports.len() + 1,
            need: k_terms,
        });
    }
    let l2 = input.lambda * input.lambda;
    let log_const = (input.upper / input.epsilon).ln() + (l2 / (l2 - 1.0)).ln();
    let denom = 2.0 * input.lambda.ln();
    let mut alphas = vec![0u64];
    let mut rounded = false;
    for k in 1..k_terms {
        let rhs = (k as f64 * std::f64::consts::LN_2 + log_const) / denom;
        let log_gap = snapped_ceil(rhs);
        rounded |= (log_gap as f64 - rhs).abs() > 1e-9 * rhs.abs().max(1.0);
        let gap = (input.supports[k - 1] as u64).max(log_gap).max(1);
        alphas.push(alphas[k - 1] + gap);
    }
    Ok(AlphaSchedule {
        alphas,
        provenance: Provenance::General,
        rounded,
    })
}

/// Dyadic closed forms for `λ = √2`, `B = 2^N`, `ε = 2^{-j}`; returns `α(1..=K)`.
///
/// With `supports` the unrestricted form (adds `Σ_{ℓ<k} m(ℓ)`) is used; without,
/// the bounded-support form, whose hypothesis the caller asserts.
pub fn alpha_schedule_dyadic(n: u32, j: u32, supports: Option<&[usize]>, k_terms: usize) -> Result<AlphaSchedule> {
    if n == 0 || j == 0 {
        return Err(Error::DyadicPrecondition(format!("N >= 1 and j >= 1, got N = {n}, j = {j}")));
    }
    if let Some(m) = supports {
        if m.len() + 1 < k_terms {
            return Err(Error::ScheduleTooShort {
                have: m.len() + 1,
                need: k_terms,
            });
        }
    }
    let c = (n + j + 1) as u64;
    let mut alphas = Vec::with_capacity(k_terms);
    let mut rounded = false;
    let mut support_sum = 0u64;
    for k in 1..=k_terms as u64 {
        // (k−1)[c + k/2] = (k−1)(2c + k)/2, rounded up.
        let twice = (k - 1) * (2 * c + k);
        rounded |= !twice.is_multiple_of(2);
        let mut alpha = twice.div_ceil(2);
        if let Some(m) = supports {
            alpha += support_sum;
            if (k as usize) <= m.len() {
                support_sum += m[k as usize - 1] as u64;
            }
        }
        alphas.push(alpha);
    }
    Ok(AlphaSchedule {
        alphas,
        provenance: if supports.is_some() {
            Provenance::DyadicUnrestricted
        } else {
            Provenance::DyadicBoundedSupport
        },
        rounded,
    })
}

/// Bounded-support dyadic form after checking `m(k) ≤ N+j+1+k` for every given `k`.
pub fn alpha_schedule_dyadic_checked(n: u32, j: u32, supports: &[usize], k_terms: usize) -> Result<AlphaSchedule> {
    let c = (n + j + 1) as usize;
    for (idx, &m) in supports.iter().enumerate() {
        let k = idx + 1;
        if m > c + k {
            return Err(Error::SupportHypothesisViolated {
                k,
                support: m,
                limit: c + k,
            });
        }
    }
    alpha_schedule_dyadic(n, j, None, k_terms)
}

/// `φ = Σ_{n ≤ K} U^{α(n)} f_n` and a bound on the norm of the omitted tail
/// `Σ_{n > K} U^{α(n)} f_n`, namely `√B·λ^{-α(K+1)}/(1−λ^{-1})`.
///
/// When the schedule stops at `K`, `α(K+1)` is replaced by its smallest
/// admissible value `α(K) + max(m(K), 1)`.
pub fn assemble_phi(frame: &Frame, schedule: &AlphaSchedule, lambda: f64, k_terms: usize) -> Result<(SeqVec, f64)> {
    let (_, u) = scaled_shifts(lambda)?;
    if k_terms == 0 || k_terms > frame.len() {
        return Err(Error::TooFew {
            needed: k_terms.max(1),
            got: frame.len(),
        });
    }
    if schedule.len() < k_terms {
        return Err(Error::ScheduleTooShort {
            have: schedule.len(),
            need: k_terms,
        });
    }
    let mut phi = SeqVec::zero();
    for (f, &alpha) in frame.elements()[..k_terms].iter().zip(&schedule.alphas) {
        phi = phi.add(&seqspace::power_apply(&u, alpha, f)?);
    }
    let next_alpha = match schedule.alphas.get(k_terms) {
        Some(&a) => a,
        None => schedule.alphas[k_terms - 1] + (frame.elements()[k_terms - 1].max_index() as u64).max(1),
    };
    let b = frames::frame_bounds(frame).upper;
    let tail = b.sqrt() * seqspace::pow_real(1.0 / lambda, next_alpha) / (1.0 - 1.0 / lambda);
    Ok((phi, tail))
}

/// Which gap rule the pipeline uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    General,
    /// Dyadic closed form; the bounded-support variant when its hypothesis holds.
    Dyadic,
    DyadicUnrestricted,
}

/// Parameters derived for the dyadic rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicParams {
    pub n: u32,
    pub j: u32,
    /// `2^N`, the upper bound the schedule is built for.
    pub upper_used: f64,
    /// `2^N` differs from the measured `B`.
    pub upper_rounded: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementCertificate {
    pub k: usize,
    pub alpha: u64,
    /// `‖f_k − T^{α(k)} φ‖²` for the assembled (finite) `φ`.
    pub error_sq: f64,
    /// `(Bλ²/(λ²−1))·λ^{−2[α(k+1)−α(k)]}`.
    pub error_bound: f64,
    pub eps_over_2k: f64,
    /// Extra squared error the omitted tail of `φ` could add.
    pub tail_allowance: f64,
    pub passes: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub lambda: f64,
    pub epsilon: f64,
    pub schedule: AlphaSchedule,
    pub dyadic: Option<DyadicParams>,
    pub phi: SeqVec,
    pub tail_bound: f64,
    pub approx: Frame,
    pub report: ApproxReport,
    pub certificates: Vec<ElementCertificate>,
}

impl PipelineResult {
    pub fn measured_errors(&self) -> Vec<f64> {
        self.certificates.iter().map(|c| c.error_sq).collect()
    }

    pub fn all_certified(&self) -> bool {
        self.certificates.iter().all(|c| c.passes)
    }

    /// `{schedule, phi, errors, report}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schedule": self.schedule,
            "dyadic": self.dyadic,
            "lambda": self.lambda,
            "epsilon": self.epsilon,
            "phi": self.phi.coords().iter().map(|&(i, v)| (i, v.re, v.im)).collect::<Vec<_>>(),
            "tail_bound": self.tail_bound,
            "errors": self.certificates,
            "report": self.report,
        })
    }

    /// Table `k, alpha_k, error_sq, error_bound, eps_over_2k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["k", "alpha_k", "error_sq", "error_bound", "eps_over_2k"]).map_err(io)?;
        for c in &self.certificates {
            w.write_record([
                c.k.to_string(),
                c.alpha.to_string(),
                format!("{:.16e}", c.error_sq),
                format!("{:.16e}", c.error_bound),
                format!("{:.16e}", c.eps_over_2k),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dyadic_params(lambda: f64, epsilon: f64, upper: f64, upper_exponent: Option<u32>) -> Result<DyadicParams> {
    if (lambda - std::f64::consts::SQRT_2).abs() > 1e-12 {
        return Err(Error::DyadicPrecondition(format!("lambda = sqrt(2), got {lambda}")));
    }
    let j_real = -epsilon.log2();
    let j = j_real.round();
    if j < 1.0 || (j_real - j).abs() > 1e-12 {
        return Err(Error::DyadicPrecondition(format!("epsilon = 2^-j with j >= 1, got {epsilon}")));
    }
    let n = match upper_exponent {
        Some(n) if 2f64.powi(n as i32) < upper * (1.0 - 1e-12) => {
            return Err(Error::DyadicPrecondition(format!("2^N >= B, got N = {n}, B = {upper}")));
        }
        Some(n) => n.max(1) as f64,
        None => (upper.log2() - 1e-12).ceil().max(1.0),
    };
    let upper_used = 2f64.powi(n as i32);
    Ok(DyadicParams {
        n: n as u32,
        j: j as u32,
        upper_used,
        upper_rounded: upper_used != upper,
    })
}

/// Builds the schedule, `φ`, and the approximating suborbit `{T^{α(k)} φ}`, then
/// certifies every element and compares the two frames.
pub fn approx_suborbit_pipeline(frame: &Frame, lambda: f64, epsilon: f64, kind: ScheduleKind) -> Result<PipelineResult> {
    approx_suborbit_pipeline_with(frame, lambda, epsilon, kind, None)
}

/// As [`approx_suborbit_pipeline`], with the dyadic exponent `N` fixed instead of
/// derived from the measured `B` (requires `2^N ≥ B`; ignored by the general rule).
pub fn approx_suborbit_pipeline_with(
    frame: &Frame,
    lambda: f64,
    epsilon: f64,
    kind: ScheduleKind,
    upper_exponent: Option<u32>,
) -> Result<PipelineResult> {
    let (t, _) = scaled_shifts(lambda)?;
    let bounds = frames::frame_bounds(frame);
    let (a, b) = (bounds.lower, bounds.upper);
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    if !(epsilon < a) {
        return Err(Error::EpsilonNotBelowLowerBound { epsilon, lower: a });
    }
    let k_terms = frame.len();
    let supports: Vec<usize> = frame.elements().iter().map(SeqVec::max_index).collect();

    let (schedule, dyadic) = match kind {
        ScheduleKind::General => {
            let input = ScheduleInput {
                supports: supports.clone(),
                lambda,
                upper: b,
                epsilon,
                lower: a,
            };
            (alpha_schedule_general(&input, k_terms + 1)?, None)
        }
        ScheduleKind::Dyadic | ScheduleKind::DyadicUnrestricted => {
            let p = dyadic_params(lambda, epsilon, b, upper_exponent)?;
            let schedule = match kind {
                ScheduleKind::Dyadic => alpha_schedule_dyadic_checked(p.n, p.j, &supports, k_terms + 1)
                    .or_else(|_| alpha_schedule_dyadic(p.n, p.j, Some(&supports), k_terms + 1))?,
                _ => alpha_schedule_dyadic(p.n, p.j, Some(&supports), k_terms + 1)?,
            };
            (schedule, Some(p))
        }
    };

    let (phi, tail_bound) = assemble_phi(frame, &schedule, lambda, k_terms)?;
    let approx_elements = schedule.alphas[..k_terms]
        .iter()
        .map(|&alpha| seqspace::power_apply(&t, alpha, &phi))
        .collect::<Result<Vec<_>>>()?;
    let approx = Frame::new(format!("suborbit({})", frame.label()), approx_elements)?;

    let l2 = lambda * lambda;
    let last_alpha = schedule.alphas[k_terms];
    let certificates = (0..k_terms)
        .map(|idx| {
            let k = idx + 1;
            let alpha = schedule.alphas[idx];
            let gap = schedule.alphas[idx + 1] - alpha;
            let error_sq = frame.elements()[idx].sub(&approx.elements()[idx]).norm_sq();
            let error_bound = b * l2 / (l2 - 1.0) * seqspace::pow_real(1.0 / l2, gap);
            let eps_over_2k = epsilon / 2f64.powi(k as i32);
            let tail = b.sqrt() * seqspace::pow_real(1.0 / lambda, last_alpha - alpha) / (1.0 - 1.0 / lambda);
            let tail_allowance = tail * tail + 2.0 * tail * error_bound.sqrt();
            let limit = error_bound.min(eps_over_2k);
            let passes = error_sq <= limit * (1.0 + 1e-12) + tail_allowance;
            ElementCertificate {
                k,
                alpha,
                error_sq,
                error_bound,
                eps_over_2k,
                tail_allowance,
                passes,
            }
        })
        .collect();

    let report = frames::epsilon_approx_check(frame, &approx, epsilon)?;
    Ok(PipelineResult {
        lambda,
        epsilon,
        schedule,
        dyadic,
        phi,
        tail_bound,
        approx,
        report,
        certificates,
    })
}
