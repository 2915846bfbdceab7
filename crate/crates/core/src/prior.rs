use crate::error::{QifError, Result};
use crate::label::{ensure_unique, Label};
use crate::rational::Rational;

/// A probability distribution over a finite, ordered set of secrets.
///
/// Posteriors are also represented as `Prior`s; the type is just a labelled
/// distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prior {
    support: Vec<Label>,
    mass: Vec<Rational>,
}

impl Prior {
    pub fn new(support: Vec<Label>, mass: Vec<Rational>) -> Result<Self> {
        if support.is_empty() {
            return Err(QifError::Empty {
                what: "prior",
                axis: "secret",
            });
        }
        if support.len() != mass.len() {
            return Err(QifError::DimensionMismatch {
                what: "prior masses".into(),
                expected: support.len(),
                found: mass.len(),
            });
        }
        ensure_unique("secret", &support)?;
        for (label, m) in support.iter().zip(&mass) {
            if m.is_negative() {
                return Err(QifError::NegativeEntry {
                    row: label.clone(),
                    col: label.clone(),
                    value: m.clone(),
                });
            }
        }
        let sum: Rational = mass.iter().sum();
        if !sum.is_one() {
            return Err(QifError::NotNormalized { what: "prior", sum });
        }
        Ok(Prior { support, mass })
    }

    /// Normalizes non-negative `weights` into a distribution.
    pub fn from_weights(support: Vec<Label>, weights: &[Rational]) -> Result<Self> {
        let total: Rational = weights.iter().sum();
        if !total.is_positive() {
            return Err(QifError::NotNormalized {
                what: "prior weights",
                sum: total,
            });
        }
        let mass = weights.iter().map(|w| w / &total).collect();
        Prior::new(support, mass)
    }

    pub fn uniform(support: Vec<Label>) -> Result<Self> {
        let n = support.len() as i64;
        if n == 0 {
            return Err(QifError::Empty {
                what: "prior",
                axis: "secret",
            });
        }
        let mass = vec![Rational::new(1, n); support.len()];
        Prior::new(support, mass)
    }

    /// The point distribution on `at`.
    pub fn point(support: Vec<Label>, at: &Label) -> Result<Self> {
        let mass = support
            .iter()
            .map(|l| {
                if l == at {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Prior::new(support, mass)
    }

    pub fn labels(&self) -> &[Label] {
        &self.support
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn mass(&self, index: usize) -> &Rational {
        &self.mass[index]
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn full_support(&self) -> bool {
        self.mass.iter().all(Rational::is_positive)
    }

    /// Errors with the first zero-mass secret, if any.
    pub fn require_full_support(&self) -> Result<()> {
        match self.mass.iter().position(Rational::is_zero) {
            Some(i) => Err(QifError::ZeroPriorMass(self.support[i].clone())),
            None => Ok(()),
        }
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.support.iter().position(|l| l == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Rational)> {
        self.support.iter().zip(&self.mass)
    }
}
