//! Carleson eigenvalue sequences and the diagonal systems whose orbits form
//! Carleson frames.
//!
//! A finite list of eigenvalues cannot witness the limit `|λ_k| → 1`; when the
//! sequence carries a closed-form generator the limit is decided from the
//! generator, otherwise it is reported as unknown.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspace::{Diagonal, OperatorSpec, SeqVec};

/// Closed form attached to a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `λ_k = 1 − α^{-k}`.
    Geometric { alpha: f64 },
    /// `λ_k = 1 − 1/k`: tends to the circle but with gap ratios tending to 1.
    Harmonic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CarlesonSeq {
    lambdas: Vec<Complex64>,
    generator: Option<Generator>,
}

impl CarlesonSeq {
    /// Validates `|λ_k| < 1` and pairwise distinctness.
    pub fn from_lambdas(lambdas: Vec<Complex64>) -> Result<Self> {
        Self::validated(lambdas, None)
    }

    fn validated(lambdas: Vec<Complex64>, generator: Option<Generator>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::TooFew { needed: 1, got: 0 });
        }
        for (k, l) in lambdas.iter().enumerate() {
            if !l.re.is_finite() || !l.im.is_finite() {
                return Err(Error::NonFinite("eigenvalues"));
            }
            if l.norm() >= 1.0 {
                return Err(Error::OutsideUnitDisc {
                    index: k + 1,
                    modulus: l.norm(),
                });
            }
        }
        if let Some((i, j)) = first_repeat(&lambdas) {
            return Err(Error::EigenvaluesNotDistinct(i + 1, j + 1));
        }
        Ok(CarlesonSeq { lambdas, generator })
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn generator(&self) -> Option<Generator> {
        self.generator
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `1 − |λ_k|` for 1-based `k`, from the generator when one is attached.
    fn gap(&self, k: usize) -> f64 {
        match self.generator {
            Some(Generator::Geometric { alpha }) => alpha.powi(-(k as i32)),
            Some(Generator::Harmonic) => 1.0 / k as f64,
            None => 1.0 - self.lambdas[k - 1].norm(),
        }
    }

    pub fn to_json(&self) -> CarlesonSeqJson {
        match self.generator {
            Some(Generator::Geometric { alpha }) => CarlesonSeqJson::Geometric {
                kind: "geometric".into(),
                alpha,
                k: self.len(),
            },
            _ => CarlesonSeqJson::Explicit {
                lambdas: self.lambdas.iter().map(|l| (l.re, l.im)).collect(),
            },
        }
    }

    pub fn from_json(json: &CarlesonSeqJson) -> Result<Self> {
        match json {
            CarlesonSeqJson::Geometric { kind, alpha, k } => {
                if kind != "geometric" {
                    return Err(Error::Parse(format!("unknown sequence kind `{kind}`")));
                }
                geometric_lambda(*alpha, *k)
            }
            CarlesonSeqJson::Explicit { lambdas } => {
                Self::from_lambdas(lambdas.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            }
        }
    }
}

/// Wire format: `{kind, alpha, K}` or `{lambdas: [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CarlesonSeqJson {
    Geometric {
        kind: String,
        alpha: f64,
        #[serde(rename = "K")]
        k: usize,
    },
    Explicit {
        lambdas: Vec<(f64, f64)>,
    },
}

fn first_repeat(lambdas: &[Complex64]) -> Option<(usize, usize)> {
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            if lambdas[i] == lambdas[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// `λ_k = 1 − α^{-k}`, `k = 1..=K`.
pub fn geometric_lambda(alpha: f64, k: usize) -> Result<CarlesonSeq> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::AlphaTooSmall(alpha));
    }
    let lambdas = (1..=k).map(|n| Complex64::new(1.0 - alpha.powi(-(n as i32)), 0.0)).collect();
    CarlesonSeq::validated(lambdas, Some(Generator::Geometric { alpha }))
}

/// `λ_k = 1 − 1/k`, `k = 1..=K`.
pub fn harmonic_lambda(k: usize) -> Result<CarlesonSeq> {
    let lambdas = (1..=k).map(|n| Complex64::new(1.0 - 1.0 / n as f64, 0.0)).collect();
    CarlesonSeq::validated(lambdas, Some(Generator::Harmonic))
}

/// How much the ratio verdict can claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioStrength {
    /// Positive increasing sequences: ratio bound is equivalent to the Carleson condition.
    NecessaryAndSufficient,
    SufficientOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Asymptotics {
    /// The generator keeps every ratio at most `c_max < 1` and `|λ_k| → 1`.
    Holds,
    /// Passes on the stored prefix but the generator's ratios tend to 1.
    FailsAsymptotically,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioTest {
    /// `max_k (1−|λ_{k+1}|)/(1−|λ_k|)` over the stored prefix.
    pub c_max: f64,
    pub passes: bool,
    pub strength: RatioStrength,
    pub asymptotics: Asymptotics,
}

/// Gap-ratio criterion `(1−|λ_{k+1}|)/(1−|λ_k|) ≤ c < 1`.
pub fn ratio_test(seq: &CarlesonSeq) -> Result<RatioTest> {
    let k = seq.len();
    if k < 2 {
        return Err(Error::TooFew { needed: 2, got: k });
    }
    let c_max = (1..k).map(|n| seq.gap(n + 1) / seq.gap(n)).fold(f64::NEG_INFINITY, f64::max);
    let passes = c_max < 1.0;
    let positive_increasing = seq.lambdas().iter().all(|l| l.im == 0.0 && l.re >= 0.0)
        && seq.lambdas().windows(2).all(|w| w[1].re > w[0].re);
    let strength = if positive_increasing {
        RatioStrength::NecessaryAndSufficient
    } else {
        RatioStrength::SufficientOnly
    };
    let asymptotics = match seq.generator() {
        Some(Generator::Geometric { .. }) => Asymptotics::Holds,
        Some(Generator::Harmonic) => Asymptotics::FailsAsymptotically,
        None => Asymptotics::Unknown,
    };
    Ok(RatioTest {
        c_max,
        passes,
        strength,
        asymptotics,
    })
}

/// `min_n Π_{k≠n} |λ_k − λ_n| / |1 − λ_k λ̄_n|` over the stored prefix, accumulated in log space.
pub fn carleson_inf(lambdas: &[Complex64]) -> Result<f64> {
    if lambdas.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: lambdas.len(),
        });
    }
    if let Some((i, j)) = first_repeat(lambdas) {
        return Err(Error::EigenvaluesNotDistinct(i + 1, j + 1));
    }
    let mut min_log = f64::INFINITY;
    for (n, ln) in lambdas.iter().enumerate() {
        let log_prod: f64 = lambdas
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != n)
            .map(|(_, lk)| (lk - ln).norm().ln() - (Complex64::new(1.0, 0.0) - lk * ln.conj()).norm().ln())
            .sum();
        min_log = min_log.min(log_prod);
    }
    Ok(min_log.exp())
}

impl CarlesonSeq {
    pub fn carleson_inf(&self) -> Result<f64> {
        carleson_inf(&self.lambdas)
    }
}

/// Diagonal operator with the sequence's eigenvalues and the generating vector
/// `φ = Σ m_k √(1−|λ_k|²) e_k`.
#[derive(Clone, Debug)]
pub struct CarlesonSystem {
    pub op: OperatorSpec,
    pub phi: SeqVec,
    pub m_weights: Vec<f64>,
    pub seq: CarlesonSeq,
}

impl CarlesonSystem {
    pub fn dim(&self) -> usize {
        self.seq.len()
    }

    pub fn weight_range(&self) -> (f64, f64) {
        let lo = self.m_weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.m_weights.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    }
}

pub fn build_carleson_system(seq: &CarlesonSeq, m_weights: &[f64]) -> Result<CarlesonSystem> {
    if m_weights.len() != seq.len() {
        return Err(Error::LengthMismatch {
            left: seq.len(),
            right: m_weights.len(),
        });
    }
    for (k, &m) in m_weights.iter().enumerate() {
        if !m.is_finite() {
            return Err(Error::NonFinite("carleson weights"));
        }
        if m <= 0.0 {
            return Err(Error::WeightsNotBoundedBelow { index: k + 1, value: m });
        }
    }
    let phi = SeqVec::from_real(
        seq.lambdas()
            .iter()
            .zip(m_weights)
            .enumerate()
            .map(|(k, (l, m))| (k + 1, m * (1.0 - l.norm_sqr()).sqrt())),
    )?;
    let op = OperatorSpec::Diagonal(Diagonal::from_values("carleson", seq.lambdas().to_vec())?);
    Ok(CarlesonSystem {
        op,
        phi,
        m_weights: m_weights.to_vec(),
        seq: seq.clone(),
    })
}

/// Unit weights `m_k = 1`.
pub fn build_default_system(seq: &CarlesonSeq) -> Result<CarlesonSystem> {
    build_carleson_system(seq, &vec![1.0; seq.len()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_examples() {
        let s = geometric_lambda(2.0, 3).unwrap();
        let re: Vec<f64> = s.lambdas().iter().map(|l| l.re).collect();
        assert_eq!(re, vec![0.5, 0.75, 0.875]);
        assert_eq!(geometric_lambda(2.0, 1).unwrap().lambdas()[0].re, 0.5);
        let s = geometric_lambda(10.0, 2).unwrap();
        assert!((s.lambdas()[0].re - 0.9).abs() < 1e-15 && (s.lambdas()[1].re - 0.99).abs() < 1e-15);
        assert!(matches!(geometric_lambda(1.0, 3), Err(Error::AlphaTooSmall(_))));
    }

    #[test]
    fn ratio_examples() {
        let r = ratio_test(&geometric_lambda(2.0, 10).unwrap()).unwrap();
        assert_eq!(r.c_max, 0.5);
        assert!(r.passes);
        assert_eq!(r.strength, RatioStrength::NecessaryAndSufficient);
        assert_eq!(r.asymptotics, Asymptotics::Holds);

        let r = ratio_test(&geometric_lambda(10.0, 5).unwrap()).unwrap();
        assert!((r.c_max - 0.1).abs() < 1e-15 && r.passes);
    }

    #[test]
    fn harmonic_passes_prefix_but_fails_asymptotically() {
        // Direct ratios (1/(k+1))/(1/k) = k/(k+1), k = 1..9.
        let seq = harmonic_lambda(10).unwrap();
        let direct = (1..10).map(|k| k as f64 / (k as f64 + 1.0)).fold(0.0, f64::max);
        let r = ratio_test(&seq).unwrap();
        assert!((r.c_max - direct).abs() < 1e-15);
        assert!((r.c_max - 0.9).abs() < 1e-15);
        assert!(r.passes);
        assert_eq!(r.asymptotics, Asymptotics::FailsAsymptotically);

        let raw = CarlesonSeq::from_lambdas(seq.lambdas().to_vec()).unwrap();
        assert_eq!(ratio_test(&raw).unwrap().asymptotics, Asymptotics::Unknown);
    }

    #[test]
    fn carleson_inf_two_points() {
        let l = [Complex64::new(0.5, 0.0), Complex64::new(0.75, 0.0)];
        assert!((carleson_inf(&l).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn carleson_inf_rejects_repeats() {
        let l = [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)];
        assert!(matches!(carleson_inf(&l), Err(Error::EigenvaluesNotDistinct(1, 2))));
        assert!(CarlesonSeq::from_lambdas(l.to_vec()).is_err());
    }

    #[test]
    fn system_example() {
        let sys = build_default_system(&geometric_lambda(2.0, 3).unwrap()).unwrap();
        let want = [3f64.sqrt() / 2.0, 7f64.sqrt() / 4.0, 15f64.sqrt() / 8.0];
        for (k, w) in want.iter().enumerate() {
            assert!((sys.phi.get(k + 1).re - w).abs() < 1e-15);
        }
        let err = build_carleson_system(&geometric_lambda(2.0, 3).unwrap(), &[0.0, 1.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("weights not bounded below"));
    }

    #[test]
    fn json_forms() {
        let s = geometric_lambda(2.0, 4).unwrap();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(text, r#"{"kind":"geometric","alpha":2.0,"K":4}"#);
        assert_eq!(CarlesonSeq::from_json(&serde_json::from_str(&text).unwrap()).unwrap(), s);

        let raw: CarlesonSeqJson = serde_json::from_str(r#"{"lambdas":[[0.5,0.0],[0.0,0.25]]}"#).unwrap();
        let s = CarlesonSeq::from_json(&raw).unwrap();
        assert_eq!(s.lambdas()[1], Complex64::new(0.0, 0.25));
    }
}
