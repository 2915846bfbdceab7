//! Gain functions and the specific constructions used by the analyses:
//! the identity gain, the prior-reciprocal gain that turns max-case leakage
//! into lift, and the pointwise gain that turns a max-case prior
//! vulnerability into an ordinary one.

use crate::channel::{hyper, Channel};
use crate::error::{QifError, Result};
use crate::label::{ensure_same, ensure_unique, Label};
use crate::prior::Prior;
use crate::rational::Rational;

/// A non-negative table `g(w, x)` of the adversary's gain for taking action
/// `w` when the secret is `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainFunction {
    actions: Vec<Label>,
    secrets: Vec<Label>,
    gains: Vec<Vec<Rational>>,
}

impl GainFunction {
    pub fn new(
        actions: Vec<Label>,
        secrets: Vec<Label>,
        gains: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if actions.is_empty() {
            return Err(QifError::Empty {
                what: "gain function",
                axis: "action",
            });
        }
        if secrets.is_empty() {
            return Err(QifError::Empty {
                what: "gain function",
                axis: "secret",
            });
        }
        ensure_unique("action", &actions)?;
        ensure_unique("secret", &secrets)?;
        if gains.len() != actions.len() {
            return Err(QifError::DimensionMismatch {
                what: "gain rows".into(),
                expected: actions.len(),
                found: gains.len(),
            });
        }
        for (w, row) in actions.iter().zip(&gains) {
            if row.len() != secrets.len() {
                return Err(QifError::DimensionMismatch {
                    what: format!("gain row {w}"),
                    expected: secrets.len(),
                    found: row.len(),
                });
            }
            if let Some((x, g)) = secrets.iter().zip(row).find(|(_, g)| g.is_negative()) {
                return Err(QifError::NegativeEntry {
                    row: w.clone(),
                    col: x.clone(),
                    value: g.clone(),
                });
            }
        }
        Ok(GainFunction {
            actions,
            secrets,
            gains,
        })
    }

    pub fn actions(&self) -> &[Label] {
        &self.actions
    }

    pub fn secrets(&self) -> &[Label] {
        &self.secrets
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.gains
    }

    pub fn gain(&self, w: usize, x: usize) -> &Rational {
        &self.gains[w][x]
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }
}

/// Identity gain: one point for guessing the secret exactly.
pub fn gid(secrets: &[Label]) -> Result<GainFunction> {
    let gains = diagonal(secrets.len(), |_| Rational::one());
    GainFunction::new(secrets.to_vec(), secrets.to_vec(), gains)
}

/// `g_π(w, x) = 1/π_x` when `w = x`, else 0.
///
/// Requires a full-support prior. Its max-case leakage under `π` equals the
/// lift of `(π, C)` for every channel `C`.
pub fn reciprocal_gain(pi: &Prior) -> Result<GainFunction> {
    pi.require_full_support()?;
    let gains = diagonal(pi.len(), |i| pi.mass(i).recip().expect("full support"));
    GainFunction::new(pi.labels().to_vec(), pi.labels().to_vec(), gains)
}

/// `max_{w,x} π_x · g(w, x)`: the gain of an adversary who is scored only on
/// the single most favourable secret.
pub fn max_prior_vulnerability(g: &GainFunction, pi: &Prior) -> Result<Rational> {
    ensure_same("gain secrets", g.secrets(), "prior", pi.labels())?;
    Ok(g.rows()
        .iter()
        .flat_map(|row| row.iter().zip(pi.masses()).map(|(gain, m)| gain * m))
        .max()
        .expect("non-empty gain table"))
}

/// Splits every action `w` into one action `w@x` per secret that keeps only
/// the `x` column of `w`'s gains.
///
/// The expected gain of `w@x` under any distribution is `π_x · g(w, x)`, so
/// the ordinary vulnerability of the result equals the max-case prior
/// vulnerability of `g`.
pub fn pointwise_gain(g: &GainFunction) -> GainFunction {
    let n = g.secrets().len();
    let mut actions = Vec::with_capacity(g.n_actions() * n);
    let mut gains = Vec::with_capacity(g.n_actions() * n);
    for (w, row) in g.actions().iter().zip(g.rows()) {
        for (i, x) in g.secrets().iter().enumerate() {
            actions.push(Label::new(format!("{w}@{x}")).expect("joined labels are valid"));
            gains.push(
                (0..n)
                    .map(|j| {
                        if i == j {
                            row[j].clone()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            );
        }
    }
    GainFunction::new(actions, g.secrets().to_vec(), gains)
        .expect("pointwise gain keeps the source invariants")
}

/// Max-case leakage normalized by max-case vulnerabilities on both sides:
/// `max_y V^max_g(δ^y) / V^max_g(π)`.
///
/// Equal to the ordinary max-case leakage of [`pointwise_gain`]`(g)`.
pub fn max_normalized_max_case_leakage(
    g: &GainFunction,
    pi: &Prior,
    c: &Channel,
) -> Result<Rational> {
    let prior = max_prior_vulnerability(g, pi)?;
    if prior.is_zero() {
        return Err(QifError::DegenerateGain);
    }
    let h = hyper(pi, c)?;
    let mut best = Rational::zero();
    for post in h.posteriors() {
        let v = max_prior_vulnerability(g, post)?;
        if v > best {
            best = v;
        }
    }
    Ok(best / prior)
}

fn diagonal(n: usize, value: impl Fn(usize) -> Rational) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { value(i) } else { Rational::zero() })
                .collect()
        })
        .collect()
}
