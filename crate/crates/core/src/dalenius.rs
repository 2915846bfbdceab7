//! Leakage about a secret `Z` that is only correlated with the channel's
//! input `X`.
//!
//! A correlation is a joint distribution over `Z × X`. Factorizing it gives a
//! prior `ρ` on `Z` and a channel `D: Z → X`; the adversary then faces the
//! cascade `DC`.

use std::sync::OnceLock;

use crate::channel::{compose, factorize, Channel, Joint};
use crate::error::Result;
use crate::gain::GainFunction;
use crate::label::{ensure_same, Label};
use crate::measures::{lift_capacity, lift_value, max_case_leakage};
use crate::prior::Prior;
use crate::rational::{ExtRational, Rational};

/// A joint distribution over a correlated secret `Z` and the channel input `X`.
#[derive(Debug)]
pub struct Correlation {
    joint: Joint,
    factors: OnceLock<(Prior, Channel)>,
}

impl Clone for Correlation {
    fn clone(&self) -> Self {
        Correlation::new(self.joint.clone())
    }
}

impl Correlation {
    pub fn new(joint: Joint) -> Self {
        Correlation {
            joint,
            factors: OnceLock::new(),
        }
    }

    /// The correlation `ρ_z · D[z][x]`.
    pub fn from_factors(rho: &Prior, d: &Channel) -> Result<Self> {
        ensure_same("prior", rho.labels(), "correlation rows", d.secrets())?;
        let entries = d
            .rows()
            .iter()
            .zip(rho.masses())
            .map(|(row, m)| row.iter().map(|e| m * e).collect())
            .collect();
        let joint = Joint::new(rho.labels().to_vec(), d.observations().to_vec(), entries)?;
        Ok(Correlation::new(joint))
    }

    pub fn z_labels(&self) -> &[Label] {
        self.joint.row_labels()
    }

    pub fn x_labels(&self) -> &[Label] {
        self.joint.col_labels()
    }

    pub fn joint(&self) -> &Joint {
        &self.joint
    }

    /// `(ρ, D)`, computed on first use.
    pub fn factors(&self) -> &(Prior, Channel) {
        self.factors.get_or_init(|| factorize(&self.joint))
    }

    /// `π_x = Σ_z ρ_z D[z][x]`, the column marginal of the joint.
    pub fn pushforward(&self) -> Prior {
        let masses = (0..self.x_labels().len())
            .map(|x| self.joint.column_sum(x))
            .collect();
        Prior::new(self.x_labels().to_vec(), masses).expect("joint column sums form a distribution")
    }

    /// `(ρ, D)` restricted to the `z` with positive mass.
    fn supported_factors(&self) -> (Prior, Channel) {
        let (rho, d) = self.factors();
        if rho.full_support() {
            return (rho.clone(), d.clone());
        }
        let keep: Vec<usize> = (0..rho.len())
            .filter(|&z| rho.mass(z).is_positive())
            .collect();
        let labels: Vec<Label> = keep.iter().map(|&z| rho.labels()[z].clone()).collect();
        let masses = keep.iter().map(|&z| rho.mass(z).clone()).collect();
        let rows = keep.iter().map(|&z| d.row(z).to_vec()).collect();
        (
            Prior::new(labels.clone(), masses).expect("restriction keeps all mass"),
            Channel::new(labels, d.observations().to_vec(), rows).expect("rows unchanged"),
        )
    }
}

/// Result of [`dalenius_lift`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaleniusLift {
    /// `Lift(ρ, DC)`
    pub lhs: Rational,
    /// `min(Lift(ρ, D), Lift(π, C))`
    pub bound: Rational,
    pub lift_correlation: Rational,
    pub lift_channel: Rational,
    pub pushforward: Prior,
    pub holds: bool,
}

/// Checks `Lift(ρ, DC) ≤ min(Lift(ρ, D), Lift(π, C))` where `π` is the
/// pushforward of `ρ` through `D`.
pub fn dalenius_lift(j: &Correlation, c: &Channel) -> Result<DaleniusLift> {
    ensure_same(
        "correlation X axis",
        j.x_labels(),
        "channel secrets",
        c.secrets(),
    )?;
    let (rho, d) = j.supported_factors();
    let pi = j.pushforward();
    let dc = compose(&d, c)?;
    let lhs = lift_value(&rho, &dc)?;
    let lift_correlation = lift_value(&rho, &d)?;
    let lift_channel = lift_value(&pi, c)?;
    let bound = lift_correlation.clone().min(lift_channel.clone());
    Ok(DaleniusLift {
        holds: lhs <= bound,
        lhs,
        bound,
        lift_correlation,
        lift_channel,
        pushforward: pi,
    })
}

/// Result of [`dalenius_capacity_bound`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaleniusCapacity {
    /// `MaxLeak_g(ρ, DC)`
    pub leak: Rational,
    /// `MaxLift(DC)`
    pub cap_dc: ExtRational,
    /// `MaxLift(C)`
    pub cap_c: ExtRational,
    pub holds: bool,
}

/// Checks `MaxLeak_g(ρ, DC) ≤ MaxLift(DC) ≤ MaxLift(C)`.
///
/// `g` scores guesses about `Z`, so its secret axis is the correlation's
/// `Z` axis. `ρ` must have full support.
pub fn dalenius_capacity_bound(
    j: &Correlation,
    c: &Channel,
    g: &GainFunction,
) -> Result<DaleniusCapacity> {
    ensure_same(
        "correlation X axis",
        j.x_labels(),
        "channel secrets",
        c.secrets(),
    )?;
    let (rho, d) = j.factors();
    ensure_same(
        "gain secrets",
        g.secrets(),
        "correlation Z axis",
        rho.labels(),
    )?;
    rho.require_full_support()?;
    let dc = compose(d, c)?;
    let leak = max_case_leakage(g, rho, &dc)?;
    let cap_dc = lift_capacity(&dc);
    let cap_c = lift_capacity(c);
    let holds = ExtRational::Finite(leak.clone()) <= cap_dc && cap_dc <= cap_c;
    Ok(DaleniusCapacity {
        leak,
        cap_dc,
        cap_c,
        holds,
    })
}
