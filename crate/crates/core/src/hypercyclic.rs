//! Rolewicz operators `aL` and a constructive hypercyclic-type vector that
//! reproduces a finite list of targets along a suborbit.
//!
//! The construction places target `k` as a disjoint block
//! `a^{-α(k)} · (f_k shifted up by α(k))`, so `(aL)^{α(k)} φ` equals `f_k` exactly on
//! `supp f_k`; the only error is the mass of later blocks, which is bounded from
//! stored norms. This is specific to scaled left shifts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{self, Frame, FrameBounds};
use crate::orbitrep;
use crate::seqspace::{self, OperatorSpec, SeqVec};

/// Smallest admissible block scale `a^{-α(k)}`.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// `aL` for `a > 1`.
pub fn rolewicz(a: f64) -> Result<OperatorSpec> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(Error::RolewiczScale(a));
    }
    Ok(OperatorSpec::ScaledLeftShift(a))
}

#[derive(Clone, Debug)]
pub struct HypercyclicPlan {
    pub a: f64,
    pub targets: Vec<SeqVec>,
    pub epsilon: f64,
    pub alphas: Vec<u64>,
    pub phi: SeqVec,
    /// `‖(aL)^{α(k)} φ − f_k‖²`, evaluated exactly.
    pub certified_errors: Vec<f64>,
    /// Leakage bound `Σ_{n>k} a^{-2(α(n)−α(k))} ‖f_n‖²` from stored norms.
    pub leakage_bounds: Vec<f64>,
    /// `max_k ‖((aL)^{α(k)} φ − f_k) restricted to 1..m(k)‖`.
    pub on_support_defect: f64,
}

impl HypercyclicPlan {
    pub fn operator(&self) -> OperatorSpec {
        OperatorSpec::ScaledLeftShift(self.a)
    }

    /// `ε / 2^k` for `k = 1..=K`.
    pub fn tolerances(&self) -> Vec<f64> {
        (1..=self.targets.len()).map(|k| self.epsilon / 2f64.powi(k as i32)).collect()
    }

    /// Every certified error is within `ε/2^k`.
    pub fn within_tolerances(&self) -> bool {
        self.certified_errors.iter().zip(self.tolerances()).all(|(e, t)| *e <= t)
    }

    /// `{(aL)^{α(k)} φ}` as a frame.
    pub fn suborbit(&self) -> Result<Frame> {
        let op = self.operator();
        let els = self
            .alphas
            .iter()
            .map(|&n| seqspace::power_apply(&op, n, &self.phi))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(format!("suborbit(a={})", self.a), els)
    }

    pub fn to_json(&self) -> PlanJson {
        PlanJson {
            a: self.a,
            epsilon: self.epsilon,
            alphas: self.alphas.clone(),
            phi: self.phi.coords().iter().map(|&(i, v)| (i, v.re, v.im)).collect(),
            certified_errors: self.certified_errors.clone(),
        }
    }
}

/// Wire format: `{a, epsilon, alphas, phi, certified_errors}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanJson {
    pub a: f64,
    pub epsilon: f64,
    pub alphas: Vec<u64>,
    pub phi: Vec<(usize, f64, f64)>,
    pub certified_errors: Vec<f64>,
}

/// Builds `φ` and `α(1) = 0 < α(2) < ...` with `‖(aL)^{α(k)}φ − f_k‖² ≤ ε/2^k`.
///
/// Gap `α(k+1) − α(k)` is the smallest integer `g ≥ max(m(k), 1)` for which the
/// leakage of all later blocks, assuming every later gap is minimal, is at most
/// `ε/2^k`. Larger later gaps only shrink the leakage.
pub fn plan_hypercyclic_vector(targets: &[SeqVec], a: f64, epsilon: f64) -> Result<HypercyclicPlan> {
    rolewicz(a)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    if targets.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    let k_total = targets.len();
    let support: Vec<u64> = targets.iter().map(|f| f.max_index() as u64).collect();
    let norms_sq: Vec<f64> = targets.iter().map(SeqVec::norm_sq).collect();
    let min_gap = |k: usize| support[k].max(1);

    let mut alphas = vec![0u64];
    for k in 0..k_total - 1 {
        let tol = epsilon / 2f64.powi(k as i32 + 1);
        let leak = |g: u64| -> f64 {
            let mut offset = g;
            let mut total = 0.0;
            for (n, w) in norms_sq.iter().enumerate().take(k_total).skip(k + 1) {
                total += a.powf(-2.0 * offset as f64) * w;
                offset += min_gap(n);
            }
            total
        };
        let mut g = min_gap(k);
        while leak(g) > tol {
            g += 1;
        }
        alphas.push(alphas[k] + g);
    }

    for (k, &alpha) in alphas.iter().enumerate() {
        if a.powf(-(alpha as f64)) < UNDERFLOW_FLOOR {
            return Err(Error::PlanUnderflow { target: k + 1, alpha });
        }
    }

    let mut phi = SeqVec::zero();
    for (f, &alpha) in targets.iter().zip(&alphas) {
        let block = f.shift_up(alpha as usize).scale_real(seqspace::pow_real(1.0 / a, alpha));
        phi = phi.add(&block);
    }

    let op = OperatorSpec::ScaledLeftShift(a);
    let mut certified_errors = Vec::with_capacity(k_total);
    let mut leakage_bounds = Vec::with_capacity(k_total);
    let mut on_support_defect: f64 = 0.0;
    for k in 0..k_total {
        let image = seqspace::power_apply(&op, alphas[k], &phi)?;
        let diff = image.sub(&targets[k]);
        certified_errors.push(diff.norm_sq());
        on_support_defect = on_support_defect.max(diff.restrict(1, support[k] as usize).norm());
        leakage_bounds.push(
            (k + 1..k_total)
                .fold(0.0, |acc, n| acc + a.powf(-2.0 * (alphas[n] - alphas[k]) as f64) * norms_sq[n]),
        );
    }

    Ok(HypercyclicPlan {
        a,
        targets: targets.to_vec(),
        epsilon,
        alphas,
        phi,
        certified_errors,
        leakage_bounds,
        on_support_defect,
    })
}

/// Scans `n = 0..=budget` for the orbit element `(aL)^n φ` closest to `target`.
/// Ties resolve to the smallest `n`.
pub fn orbit_density_probe(phi: &SeqVec, a: f64, target: &SeqVec, budget: usize) -> Result<(usize, f64)> {
    let op = rolewicz(a)?;
    let mut v = phi.clone();
    let mut best = (0, f64::INFINITY);
    for n in 0..=budget {
        let norm = v.norm();
        if !norm.is_finite() || norm > orbitrep::OVERFLOW_GUARD {
            return Err(Error::OrbitDiverges { step: n, norm });
        }
        let d = v.sub(target).norm();
        if d < best.1 {
            best = (n, d);
        }
        if v.is_zero() {
            // Every later element is zero as well.
            let d0 = target.norm();
            if d0 < best.1 {
                best = (n, d0);
            }
            break;
        }
        v = seqspace::apply(&op, &v)?;
    }
    Ok(best)
}

/// Frame bounds of `{(aL)^n φ}_{n=0..=N}` for each requested `N`, on the ambient
/// space `span{e_1, ..., e_{max supp φ}}`.
pub fn orbit_section_bounds(phi: &SeqVec, a: f64, sections: &[usize]) -> Result<Vec<(usize, FrameBounds)>> {
    let op = rolewicz(a)?;
    let longest = sections.iter().copied().max().unwrap_or(0);
    let orbit = orbitrep::generate_orbit(&op, phi, longest + 1)?;
    let dim = phi.max_index().max(1);
    sections
        .iter()
        .map(|&n| {
            let f = Frame::with_ambient(format!("rolewicz(N={n})"), orbit.frame.elements()[..=n].to_vec(), dim)?;
            Ok((n, frames::frame_bounds(&f)))
        })
        .collect()
}
