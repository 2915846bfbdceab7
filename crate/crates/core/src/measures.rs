//! Vulnerabilities, leakages and capacities.
//!
//! All quantities are exact. Leakages are multiplicative ratios; capacities
//! are reported as `e^ε`-scale factors rather than logarithms so they stay
//! rational.
//!
//! Witnesses for maxima break ties by axis position: observations first,
//! then secrets, then actions, taking the earliest achiever.

use std::fmt;

use crate::channel::{hyper, joint, output_marginals, Channel};
use crate::error::{QifError, Result};
use crate::gain::GainFunction;
use crate::label::{ensure_same, Label};
use crate::prior::Prior;
use crate::rational::{ExtRational, Rational};

/// Labels identifying where a maximum is attained.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub secret: Option<Label>,
    /// For capacity ratios `C[x][y] / C[x'][y]`, the denominator row `x'`.
    pub other_secret: Option<Label>,
    pub observation: Option<Label>,
    pub action: Option<Label>,
}

impl Witness {
    /// `(role, label)` pairs for the fields that are set.
    pub fn fields(&self) -> Vec<(&'static str, &Label)> {
        [
            ("action", &self.action),
            ("secret", &self.secret),
            ("other_secret", &self.other_secret),
            ("obs", &self.observation),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|l| (k, l)))
        .collect()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// A leakage or capacity value plus the labels that attain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeakageReport {
    pub value: ExtRational,
    pub witness: Option<Witness>,
}

impl LeakageReport {
    fn finite(value: Rational, witness: Witness) -> Self {
        LeakageReport {
            value: ExtRational::Finite(value),
            witness: Some(witness),
        }
    }

    /// Four-place decimal rendering of the value.
    pub fn decimal(&self) -> String {
        self.value.to_decimal(4)
    }

    /// The value, which is finite for every measure except the capacities.
    pub fn rational(&self) -> Option<&Rational> {
        self.value.finite()
    }
}

/// Vulnerability of a single distribution and the first best action.
fn vulnerability_with_action(g: &GainFunction, dist: &Prior) -> (Rational, usize) {
    let mut best: Option<(Rational, usize)> = None;
    for (w, row) in g.rows().iter().enumerate() {
        let expected: Rational = row.iter().zip(dist.masses()).map(|(a, b)| a * b).sum();
        if best.as_ref().is_none_or(|(v, _)| expected > *v) {
            best = Some((expected, w));
        }
    }
    best.expect("gain functions have at least one action")
}

/// `V_g(π) = max_w Σ_x π_x g(w, x)`.
pub fn prior_vulnerability(g: &GainFunction, pi: &Prior) -> Result<Rational> {
    ensure_same("gain secrets", g.secrets(), "prior", pi.labels())?;
    Ok(vulnerability_with_action(g, pi).0)
}

/// Expected posterior vulnerability `Σ_y p(y) V_g(δ^y)`.
pub fn posterior_vulnerability(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<Rational> {
    ensure_same("gain secrets", g.secrets(), "channel secrets", c.secrets())?;
    let h = hyper(pi, c)?;
    Ok(h.iter()
        .map(|(_, p_y, post)| p_y * vulnerability_with_action(g, post).0)
        .sum())
}

fn nonzero_prior_vulnerability(g: &GainFunction, pi: &Prior) -> Result<Rational> {
    let v = prior_vulnerability(g, pi)?;
    if v.is_zero() {
        Err(QifError::DegenerateGain)
    } else {
        Ok(v)
    }
}

/// Average-case multiplicative g-leakage `V_g[π▷C] / V_g(π)`.
pub fn mult_leakage(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<Rational> {
    let prior = nonzero_prior_vulnerability(g, pi)?;
    Ok(posterior_vulnerability(g, pi, c)? / prior)
}

/// `max_y V_g(δ^y)` with its witness observation and action.
pub fn max_posterior_vulnerability_report(
    g: &GainFunction,
    pi: &Prior,
    c: &Channel,
) -> Result<LeakageReport> {
    ensure_same("gain secrets", g.secrets(), "channel secrets", c.secrets())?;
    let h = hyper(pi, c)?;
    let mut best: Option<(Rational, Witness)> = None;
    for (obs, _, post) in h.iter() {
        let (v, w) = vulnerability_with_action(g, post);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            let witness = Witness {
                observation: Some(obs.clone()),
                action: Some(g.actions()[w].clone()),
                ..Witness::default()
            };
            best = Some((v, witness));
        }
    }
    let (v, w) = best.expect("a hyper keeps at least one observation");
    Ok(LeakageReport::finite(v, w))
}

pub fn max_posterior_vulnerability(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<Rational> {
    let report = max_posterior_vulnerability_report(g, pi, c)?;
    Ok(report.rational().expect("finite").clone())
}

/// Max-case g-leakage `max_y V_g(δ^y) / V_g(π)`.
pub fn max_case_leakage_report(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<LeakageReport> {
    let prior = nonzero_prior_vulnerability(g, pi)?;
    let mut report = max_posterior_vulnerability_report(g, pi, c)?;
    let v = report.rational().expect("finite") / &prior;
    report.value = ExtRational::Finite(v);
    Ok(report)
}

pub fn max_case_leakage(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<Rational> {
    let report = max_case_leakage_report(g, pi, c)?;
    Ok(report.rational().expect("finite").clone())
}

/// Bayes capacity in closed form: the sum of the column maxima.
pub fn bayes_capacity(c: &Channel) -> Rational {
    (0..c.n_observations())
        .map(|y| c.column(y).max().expect("non-empty column").clone())
        .sum()
}

/// Interchangeable formulas for lift. They agree on every input; having all
/// three lets tests cross-check them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStrategy {
    /// `C[x][y] / p(y)`
    ChannelOverMarginal,
    /// `δ^y_x / π_x`
    PosteriorOverPrior,
    /// `J[x][y] / (π_x p(y))`
    JointOverProduct,
}

impl LiftStrategy {
    pub const ALL: [LiftStrategy; 3] = [
        LiftStrategy::ChannelOverMarginal,
        LiftStrategy::PosteriorOverPrior,
        LiftStrategy::JointOverProduct,
    ];
}

/// Lift: the largest ratio `C[x][y] / p(y)` over pairs with `J[x][y] > 0`.
pub fn lift(pi: &Prior, c: &Channel) -> Result<LeakageReport> {
    lift_with(pi, c, LiftStrategy::ChannelOverMarginal)
}

/// Lift value only.
pub fn lift_value(pi: &Prior, c: &Channel) -> Result<Rational> {
    Ok(lift(pi, c)?.rational().expect("lift is finite").clone())
}

pub fn lift_with(pi: &Prior, c: &Channel, strategy: LiftStrategy) -> Result<LeakageReport> {
    ensure_same("prior", pi.labels(), "channel secrets", c.secrets())?;
    // (observation, secret, ratio) for every pair with positive joint mass
    let ratios: Vec<(usize, usize, Rational)> = match strategy {
        LiftStrategy::ChannelOverMarginal => {
            let p = output_marginals(pi, c)?;
            supported_pairs(pi, c)
                .map(|(x, y)| (y, x, c.entry(x, y) / &p[y]))
                .collect()
        }
        LiftStrategy::PosteriorOverPrior => {
            let h = hyper(pi, c)?;
            h.columns()
                .iter()
                .zip(h.posteriors())
                .flat_map(|(&y, post)| {
                    (0..pi.len())
                        .filter(move |&x| post.mass(x).is_positive())
                        .map(move |x| (y, x, post.mass(x) / pi.mass(x)))
                })
                .collect()
        }
        LiftStrategy::JointOverProduct => {
            let j = joint(pi, c)?;
            let p: Vec<Rational> = (0..c.n_observations()).map(|y| j.column_sum(y)).collect();
            supported_pairs(pi, c)
                .map(|(x, y)| (y, x, j.entry(x, y) / (pi.mass(x) * &p[y])))
                .collect()
        }
    };
    let mut best: Option<(usize, usize, Rational)> = None;
    for (y, x, r) in ratios {
        let better = match &best {
            None => true,
            Some((by, bx, br)) => r > *br || (r == *br && (y, x) < (*by, *bx)),
        };
        if better {
            best = Some((y, x, r));
        }
    }
    let (y, x, value) = best.expect("some joint entry is positive");
    Ok(LeakageReport::finite(
        value,
        Witness {
            secret: Some(c.secrets()[x].clone()),
            observation: Some(c.observations()[y].clone()),
            ..Witness::default()
        },
    ))
}

/// `(x, y)` with `π_x > 0` and `C[x][y] > 0`, observation-major.
fn supported_pairs<'a>(pi: &'a Prior, c: &'a Channel) -> impl Iterator<Item = (usize, usize)> + 'a {
    (0..c.n_observations()).flat_map(move |y| {
        (0..c.n_secrets())
            .filter(move |&x| pi.mass(x).is_positive() && c.entry(x, y).is_positive())
            .map(move |x| (x, y))
    })
}

/// Lift capacity `sup_π Lift(π, C)` over full-support priors, via the
/// per-column `max / min` closed form.
///
/// Infinite when some column mixes zero and non-zero entries. This is `e^ε`
/// for the smallest `ε` making `C` locally differentially private.
pub fn lift_capacity(c: &Channel) -> ExtRational {
    lift_capacity_report(c).value
}

pub fn lift_capacity_report(c: &Channel) -> LeakageReport {
    let mut best: Option<(ExtRational, Witness)> = None;
    for y in 0..c.n_observations() {
        let column: Vec<&Rational> = c.column(y).collect();
        let (hi, max) = first_extreme(&column, |a, b| a > b);
        if max.is_zero() {
            continue;
        }
        let (lo, min) = first_extreme(&column, |a, b| a < b);
        let ratio = if min.is_zero() {
            ExtRational::Infinite
        } else {
            ExtRational::Finite(max / min)
        };
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            let witness = Witness {
                secret: Some(c.secrets()[hi].clone()),
                other_secret: Some(c.secrets()[lo].clone()),
                observation: Some(c.observations()[y].clone()),
                action: None,
            };
            best = Some((ratio, witness));
        }
    }
    let (value, witness) = best.expect("a stochastic row has a positive entry");
    LeakageReport {
        value,
        witness: Some(witness),
    }
}

fn first_extreme<'a>(
    column: &[&'a Rational],
    better: impl Fn(&Rational, &Rational) -> bool,
) -> (usize, &'a Rational) {
    let mut idx = 0;
    for (i, v) in column.iter().enumerate() {
        if better(v, column[idx]) {
            idx = i;
        }
    }
    (idx, column[idx])
}

/// `max C[x][y] / C[x'][y]` over every ordered pair of rows and every
/// column, skipping pairs where both entries vanish.
///
/// Equal to [`lift_capacity`]; computed independently as a cross-check.
pub fn pairwise_ratio_max(c: &Channel) -> ExtRational {
    let mut best = ExtRational::Finite(Rational::zero());
    for y in 0..c.n_observations() {
        for x in 0..c.n_secrets() {
            for x2 in 0..c.n_secrets() {
                let (a, b) = (c.entry(x, y), c.entry(x2, y));
                let ratio = match (a.is_zero(), b.is_zero()) {
                    (true, true) => continue,
                    (false, true) => ExtRational::Infinite,
                    _ => ExtRational::Finite(a / b),
                };
                if ratio > best {
                    best = ratio;
                }
            }
        }
    }
    best
}

/// True iff `C[x][y] ≤ k · C[x'][y]` for all rows `x, x'` and columns `y`,
/// i.e. `C` is `ln(k)`-locally differentially private.
pub fn verify_ldp(c: &Channel, eps_factor: &ExtRational) -> Result<bool> {
    let k = match eps_factor {
        ExtRational::Infinite => return Ok(true),
        ExtRational::Finite(k) if *k < Rational::one() => {
            return Err(QifError::InvalidEpsilon(k.to_string()))
        }
        ExtRational::Finite(k) => k,
    };
    for y in 0..c.n_observations() {
        for a in c.column(y) {
            for b in c.column(y) {
                if *a > k * b {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// True iff `1/k ≤ δ^y_x / π_x ≤ k` for every secret and every observation
/// that can occur (local information privacy at `ε = ln k`).
pub fn verify_lip(pi: &Prior, c: &Channel, eps_factor: &Rational) -> Result<bool> {
    pi.require_full_support()?;
    if *eps_factor < Rational::one() {
        return Err(QifError::InvalidEpsilon(eps_factor.to_string()));
    }
    let lower = eps_factor.recip()?;
    let h = hyper(pi, c)?;
    for post in h.posteriors() {
        for (d, p) in post.masses().iter().zip(pi.masses()) {
            let ratio = d / p;
            if ratio < lower || ratio > *eps_factor {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One relation in the ordering chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRelation {
    pub name: &'static str,
    pub lhs: ExtRational,
    pub rhs: ExtRational,
    pub equality: bool,
    pub holds: bool,
}

impl ChainRelation {
    fn le(name: &'static str, lhs: ExtRational, rhs: ExtRational) -> Self {
        let holds = lhs <= rhs;
        ChainRelation {
            name,
            lhs,
            rhs,
            equality: false,
            holds,
        }
    }

    fn eq(name: &'static str, lhs: ExtRational, rhs: ExtRational) -> Self {
        let holds = lhs == rhs;
        ChainRelation {
            name,
            lhs,
            rhs,
            equality: true,
            holds,
        }
    }
}

impl fmt::Display for ChainRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.equality { "=" } else { "<=" };
        let mark = if self.holds { "ok" } else { "VIOLATED" };
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.name, self.lhs, op, self.rhs, mark
        )
    }
}

/// Every leakage and capacity for one `(g, π, C)` plus the six ordering
/// relations between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingChain {
    pub mult_leakage: Rational,
    pub max_case_leakage: Rational,
    pub lift: Rational,
    pub bayes_capacity: Rational,
    pub lift_capacity: ExtRational,
    pub relations: Vec<ChainRelation>,
}

impl OrderingChain {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ChainRelation> {
        self.relations.iter().filter(|r| !r.holds)
    }
}

/// Lift implementation used by [`check_ordering_chain_with`]; swapping it
/// lets a registry run check a deliberately wrong lift.
pub type LiftFn = fn(&Prior, &Channel) -> Result<Rational>;

/// Evaluates the ordering chain
/// `L×_g ≤ MaxLeak_g ≤ Lift ≤ MaxLift`, `L×_g ≤ ML×_Bayes ≤ Lift`, and the
/// agreement of the two closed forms of `MaxLift`.
pub fn check_ordering_chain(g: &GainFunction, pi: &Prior, c: &Channel) -> Result<OrderingChain> {
    check_ordering_chain_with(g, pi, c, lift_value)
}

pub fn check_ordering_chain_with(
    g: &GainFunction,
    pi: &Prior,
    c: &Channel,
    lift_fn: LiftFn,
) -> Result<OrderingChain> {
    pi.require_full_support()?;
    let avg = mult_leakage(g, pi, c)?;
    let max_case = max_case_leakage(g, pi, c)?;
    let lift = lift_fn(pi, c)?;
    let bayes = bayes_capacity(c);
    let cap = lift_capacity(c);
    let pairwise = pairwise_ratio_max(c);
    let f = |r: &Rational| ExtRational::Finite(r.clone());
    let relations = vec![
        ChainRelation::le("avg leakage <= max-case leakage", f(&avg), f(&max_case)),
        ChainRelation::le("max-case leakage <= lift", f(&max_case), f(&lift)),
        ChainRelation::le("lift <= lift capacity", f(&lift), cap.clone()),
        ChainRelation::le("avg leakage <= Bayes capacity", f(&avg), f(&bayes)),
        ChainRelation::le("Bayes capacity <= lift", f(&bayes), f(&lift)),
        ChainRelation::eq("lift capacity = pairwise ratio max", cap.clone(), pairwise),
    ];
    Ok(OrderingChain {
        mult_leakage: avg,
        max_case_leakage: max_case,
        lift,
        bayes_capacity: bayes,
        lift_capacity: cap,
        relations,
    })
}
