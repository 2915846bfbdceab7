//! Randomized verification of every relation between the leakage measures.
//!
//! [`gen_instance`] draws a random but reproducible instance from a seed and
//! a trial index. [`run_registry`] checks every registered property on
//! `trials` instances and shrinks the first failure of each property to a
//! small counterexample. All arithmetic is exact, so equalities are checked
//! as equalities.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{compose, factorize, hyper, joint, Channel};
use crate::error::{QifError, Result};
use crate::gain::{
    gid, max_normalized_max_case_leakage, max_prior_vulnerability, pointwise_gain, reciprocal_gain,
    GainFunction,
};
use crate::label::{numbered, Label};
use crate::measures::{
    bayes_capacity, check_ordering_chain_with, lift_capacity, lift_value, lift_with,
    max_case_leakage, mult_leakage, pairwise_ratio_max, prior_vulnerability, verify_ldp,
    verify_lip, LiftFn, LiftStrategy,
};
use crate::prior::Prior;
use crate::rational::{ExtRational, Rational};

/// Bounds for random instance generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub max_secrets: usize,
    pub max_observations: usize,
    pub max_actions: usize,
    /// Raw entries are drawn as `k / denominator_bound` before rows are
    /// normalized.
    pub denominator_bound: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            max_secrets: 5,
            max_observations: 5,
            max_actions: 5,
            denominator_bound: 24,
            trials: 1000,
            seed: 0x05EE_D1F7,
        }
    }
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bounds = [
            ("max_secrets", self.max_secrets),
            ("max_observations", self.max_observations),
            ("max_actions", self.max_actions),
            ("trials", self.trials),
        ];
        for (name, v) in bounds {
            if v == 0 {
                return Err(QifError::InvalidSpec(format!("{name} must be at least 1")));
            }
        }
        if self.denominator_bound == 0 {
            return Err(QifError::InvalidSpec(
                "denominator_bound must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One randomly drawn scenario.
///
/// Besides the prior, channel and gain it carries a correlation
/// `(ρ, D: Z → X)` for the correlated-secret properties and a
/// post-processing channel `P: Y → Y'` for the data-processing ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub prior: Prior,
    pub channel: Channel,
    pub gain: GainFunction,
    pub rho: Prior,
    pub correlation: Channel,
    pub post: Channel,
}

impl Instance {
    /// `(secrets, observations)` of the main channel.
    pub fn channel_dims(&self) -> (usize, usize) {
        (self.channel.n_secrets(), self.channel.n_observations())
    }

    fn complexity(&self) -> (usize, u64) {
        let dims = self.channel.n_secrets()
            + self.channel.n_observations()
            + self.gain.n_actions()
            + self.rho.len()
            + self.post.n_observations();
        let entries = self
            .prior
            .masses()
            .iter()
            .chain(self.channel.rows().iter().flatten())
            .chain(self.gain.rows().iter().flatten())
            .chain(self.rho.masses())
            .chain(self.correlation.rows().iter().flatten())
            .chain(self.post.rows().iter().flatten());
        let denominators = entries.map(|r| r.denom().bits()).sum();
        (dims, denominators)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[Rational]| {
            r.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        writeln!(f, "prior: ({})", row(self.prior.masses()))?;
        for (x, r) in self.channel.secrets().iter().zip(self.channel.rows()) {
            writeln!(f, "C[{x}]: ({})", row(r))?;
        }
        for (w, r) in self.gain.actions().iter().zip(self.gain.rows()) {
            writeln!(f, "g[{w}]: ({})", row(r))?;
        }
        writeln!(f, "rho: ({})", row(self.rho.masses()))?;
        for (z, r) in self
            .correlation
            .secrets()
            .iter()
            .zip(self.correlation.rows())
        {
            writeln!(f, "D[{z}]: ({})", row(r))?;
        }
        for (y, r) in self.post.secrets().iter().zip(self.post.rows()) {
            writeln!(f, "P[{y}]: ({})", row(r))?;
        }
        Ok(())
    }
}

/// Draws `len` raw weights `k / bound` with `k` uniform in `0..=bound`
/// (or `1..=bound` when zeros are not allowed). At least one weight is
/// positive.
pub(crate) fn raw_weights(
    rng: &mut ChaCha8Rng,
    len: usize,
    bound: u64,
    allow_zero: bool,
) -> Vec<Rational> {
    let lo = if allow_zero { 0 } else { 1 };
    let mut ks: Vec<u64> = (0..len).map(|_| rng.random_range(lo..=bound)).collect();
    if ks.iter().all(|&k| k == 0) {
        let i = rng.random_range(0..len);
        ks[i] = rng.random_range(1..=bound);
    }
    ks.into_iter()
        .map(|k| Rational::new(k as i64, bound as i64))
        .collect()
}

fn random_stochastic(
    rng: &mut ChaCha8Rng,
    rows: Vec<Label>,
    cols: Vec<Label>,
    bound: u64,
) -> Channel {
    let weights = rows
        .iter()
        .map(|_| raw_weights(rng, cols.len(), bound, true))
        .collect();
    Channel::from_weights(rows, cols, weights).expect("positive weights")
}

fn random_prior(rng: &mut ChaCha8Rng, labels: Vec<Label>, bound: u64) -> Prior {
    let w = raw_weights(rng, labels.len(), bound, false);
    Prior::from_weights(labels, &w).expect("positive weights")
}

/// Deterministic instance number `trial_index` of `spec`.
///
/// Every tenth instance has a non-interacting channel and every tenth
/// (offset by one) has a forced zero entry, so both the zero-leakage and the
/// infinite-capacity paths are exercised.
pub fn gen_instance(spec: &InstanceSpec, trial_index: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial_index as u64);
    let bound = spec.denominator_bound;

    let n = rng.random_range(1..=spec.max_secrets);
    let force_zero = trial_index % 10 == 1 && spec.max_observations >= 2;
    let m = if force_zero {
        rng.random_range(2..=spec.max_observations)
    } else {
        rng.random_range(1..=spec.max_observations)
    };
    let actions = rng.random_range(1..=spec.max_actions);
    let zs = rng.random_range(1..=spec.max_secrets);
    let outs = rng.random_range(1..=spec.max_observations);

    let secrets = numbered("x", n);
    let observations = numbered("y", m);

    let prior = random_prior(&mut rng, secrets.clone(), bound);
    let channel = match trial_index % 10 {
        0 => {
            let row = raw_weights(&mut rng, m, bound, true);
            Channel::from_weights(secrets.clone(), observations.clone(), vec![row; n])
                .expect("positive weights")
        }
        1 if force_zero => {
            let mut weights: Vec<Vec<Rational>> = (0..n)
                .map(|_| raw_weights(&mut rng, m, bound, true))
                .collect();
            let (x, y) = (rng.random_range(0..n), rng.random_range(0..m));
            weights[x][y] = Rational::zero();
            if weights[x].iter().all(Rational::is_zero) {
                weights[x][(y + 1) % m] = Rational::one();
            }
            Channel::from_weights(secrets.clone(), observations.clone(), weights)
                .expect("positive weights")
        }
        _ => random_stochastic(&mut rng, secrets.clone(), observations.clone(), bound),
    };

    let gain_rows = (0..actions)
        .map(|_| raw_weights(&mut rng, n, bound, true))
        .collect();
    let gain = GainFunction::new(numbered("w", actions), secrets.clone(), gain_rows)
        .expect("non-negative gains");

    let z_labels = numbered("z", zs);
    let rho = random_prior(&mut rng, z_labels.clone(), bound);
    let correlation = random_stochastic(&mut rng, z_labels, secrets, bound);
    let post = random_stochastic(&mut rng, observations, numbered("o", outs), bound);

    Instance {
        prior,
        channel,
        gain,
        rho,
        correlation,
        post,
    }
}

/// The two sides of a relation that failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs = {}, rhs = {}",
            self.relation, self.lhs, self.rhs
        )
    }
}

type Checked = std::result::Result<(), Violation>;

fn violation(
    relation: impl Into<String>,
    lhs: impl fmt::Display,
    rhs: impl fmt::Display,
) -> Violation {
    Violation {
        relation: relation.into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

fn ensure_le<T: PartialOrd + fmt::Display>(relation: &str, lhs: T, rhs: T) -> Checked {
    if lhs <= rhs {
        Ok(())
    } else {
        Err(violation(format!("{relation} (<=)"), lhs, rhs))
    }
}

fn ensure_eq<T: PartialEq + fmt::Display>(relation: &str, lhs: T, rhs: T) -> Checked {
    if lhs == rhs {
        Ok(())
    } else {
        Err(violation(format!("{relation} (=)"), lhs, rhs))
    }
}

fn ensure_true(relation: &str, value: bool) -> Checked {
    if value {
        Ok(())
    } else {
        Err(violation(relation, "false", "true"))
    }
}

fn ok<T>(relation: &str, r: Result<T>) -> std::result::Result<T, Violation> {
    r.map_err(|e| violation(format!("{relation} (error)"), e, "a value"))
}

/// The implementation under test. Properties call `lift` wherever a lift
/// value enters a relation, so a mutated lift can be checked against the
/// reference formulas.
#[derive(Clone, Copy, Debug)]
pub struct Subject {
    pub name: &'static str,
    pub lift: LiftFn,
}

impl Subject {
    pub fn reference() -> Self {
        Subject {
            name: "reference",
            lift: lift_value,
        }
    }
}

/// A named relation checked on every instance.
#[derive(Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    check: fn(&Instance, &Subject) -> Checked,
}

impl fmt::Debug for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Property")
            .field("name", &self.name)
            .finish()
    }
}

impl Property {
    pub fn check(
        &self,
        instance: &Instance,
        subject: &Subject,
    ) -> std::result::Result<(), Violation> {
        (self.check)(instance, subject)
    }
}

/// Every registered property.
pub fn registry() -> Vec<Property> {
    vec![
        Property {
            name: "ordering-chain",
            check: ordering_chain,
        },
        Property {
            name: "lift-formula-equivalence",
            check: lift_formula_equivalence,
        },
        Property {
            name: "lift-realization",
            check: lift_realization,
        },
        Property {
            name: "pointwise-gain-equivalence",
            check: pointwise_gain_equivalence,
        },
        Property {
            name: "bayes-capacity-miracle",
            check: bayes_capacity_miracle,
        },
        Property {
            name: "capacity-closed-form",
            check: capacity_closed_form,
        },
        Property {
            name: "ldp-capacity-tightness",
            check: ldp_capacity_tightness,
        },
        Property {
            name: "ldp-implies-lip",
            check: ldp_implies_lip,
        },
        Property {
            name: "dalenius-lift",
            check: dalenius_lift_bound,
        },
        Property {
            name: "dalenius-capacity",
            check: dalenius_capacity,
        },
        Property {
            name: "max-case-dpi",
            check: max_case_dpi,
        },
        Property {
            name: "hyper-reconstruction",
            check: hyper_reconstruction,
        },
        Property {
            name: "factorize-round-trip",
            check: factorize_round_trip,
        },
        Property {
            name: "compose-associativity",
            check: compose_associativity,
        },
        Property {
            name: "non-interacting-fixpoint",
            check: non_interacting_fixpoint,
        },
    ]
}

pub fn property(name: &str) -> Option<Property> {
    registry().into_iter().find(|p| p.name == name)
}

fn ordering_chain(i: &Instance, s: &Subject) -> Checked {
    let chain = ok(
        "ordering chain",
        check_ordering_chain_with(&i.gain, &i.prior, &i.channel, s.lift),
    )?;
    let first = chain
        .violations()
        .next()
        .map(|r| violation(r.name, &r.lhs, &r.rhs));
    match first {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// `prior` with the mass of secret `x` removed and the rest renormalized.
fn thinned(prior: &Prior, x: usize) -> Option<Prior> {
    let mut w = prior.masses().to_vec();
    w[x] = Rational::zero();
    Prior::from_weights(prior.labels().to_vec(), &w).ok()
}

fn lift_formula_equivalence(i: &Instance, s: &Subject) -> Checked {
    // Lift is defined for any prior; partial-support priors exercise the
    // positive-joint side condition.
    let mut priors = vec![i.prior.clone()];
    if i.prior.len() > 1 {
        priors.extend((0..i.prior.len()).filter_map(|x| thinned(&i.prior, x)));
    }
    for pi in &priors {
        let subject = ok("subject lift", (s.lift)(pi, &i.channel))?;
        for strategy in LiftStrategy::ALL {
            let reference = ok("lift strategy", lift_with(pi, &i.channel, strategy))?;
            let reference = reference.rational().expect("finite").clone();
            if subject != reference {
                let masses: Vec<String> = pi.masses().iter().map(ToString::to_string).collect();
                let at = format!(" at prior ({})", masses.join(", "));
                return Err(violation(
                    format!("subject lift vs {strategy:?} (=)"),
                    format!("{subject}{at}"),
                    format!("{reference}{at}"),
                ));
            }
        }
    }
    Ok(())
}

fn lift_realization(i: &Instance, s: &Subject) -> Checked {
    let g_pi = ok("reciprocal gain", reciprocal_gain(&i.prior))?;
    let leak = ok(
        "max-case leakage",
        max_case_leakage(&g_pi, &i.prior, &i.channel),
    )?;
    let lift = ok("subject lift", (s.lift)(&i.prior, &i.channel))?;
    ensure_eq("max-case leakage of reciprocal gain vs lift", leak, lift)
}

fn pointwise_gain_equivalence(i: &Instance, _: &Subject) -> Checked {
    let star = pointwise_gain(&i.gain);
    let v_star = ok("vulnerability", prior_vulnerability(&star, &i.prior))?;
    let v_max = ok(
        "max vulnerability",
        max_prior_vulnerability(&i.gain, &i.prior),
    )?;
    ensure_eq(
        "pointwise-gain vulnerability vs max-case prior vulnerability",
        v_star,
        v_max,
    )?;
    let standard = ok(
        "max-case leakage",
        max_case_leakage(&star, &i.prior, &i.channel),
    )?;
    let normalized = ok(
        "max-normalized leakage",
        max_normalized_max_case_leakage(&i.gain, &i.prior, &i.channel),
    )?;
    ensure_eq(
        "max-case leakage of pointwise gain vs max-normalized leakage",
        standard,
        normalized,
    )
}

fn bayes_capacity_miracle(i: &Instance, _: &Subject) -> Checked {
    let c = &i.channel;
    let cap = bayes_capacity(c);
    let identity = ok("gid", gid(c.secrets()))?;
    let uniform = ok("uniform", Prior::uniform(c.secrets().to_vec()))?;
    let at_uniform = ok("mult leakage", mult_leakage(&identity, &uniform, c))?;
    ensure_eq(
        "gid leakage at uniform prior vs Bayes capacity",
        at_uniform,
        cap.clone(),
    )?;
    let at_prior = ok("mult leakage", mult_leakage(&identity, &i.prior, c))?;
    ensure_le("gid leakage vs Bayes capacity", at_prior, cap.clone())?;
    let with_g = ok("mult leakage", mult_leakage(&i.gain, &i.prior, c))?;
    ensure_le("g leakage vs Bayes capacity", with_g, cap)
}

fn capacity_closed_form(i: &Instance, s: &Subject) -> Checked {
    let cap = lift_capacity(&i.channel);
    ensure_eq(
        "column max/min vs pairwise ratio max",
        cap.clone(),
        pairwise_ratio_max(&i.channel),
    )?;
    let lift = ok("subject lift", (s.lift)(&i.prior, &i.channel))?;
    ensure_le(
        "lift vs lift capacity",
        ExtRational::Finite(lift),
        cap.clone(),
    )?;
    ensure_le(
        "1 vs lift capacity",
        ExtRational::Finite(Rational::one()),
        cap,
    )
}

fn ldp_capacity_tightness(i: &Instance, _: &Subject) -> Checked {
    let c = &i.channel;
    let cap = lift_capacity(c);
    ensure_true(
        "C is ln(lift capacity)-LDP",
        ok("verify ldp", verify_ldp(c, &cap))?,
    )?;
    let smaller = match &cap {
        ExtRational::Finite(k) if k.is_one() => return Ok(()),
        ExtRational::Finite(k) => (k + &Rational::one()) / Rational::from_integer(2),
        ExtRational::Infinite => Rational::from_integer(1_000_000_000),
    };
    let passes = ok("verify ldp", verify_ldp(c, &ExtRational::Finite(smaller)))?;
    ensure_true("C is not LDP below its lift capacity", !passes)
}

fn ldp_implies_lip(i: &Instance, _: &Subject) -> Checked {
    let cap = lift_capacity(&i.channel);
    let Some(k) = cap.finite() else {
        return Ok(());
    };
    let lip = ok("verify lip", verify_lip(&i.prior, &i.channel, k))?;
    ensure_true("ln(k)-LDP implies ln(k)-LIP", lip)
}

fn dalenius_lift_bound(i: &Instance, s: &Subject) -> Checked {
    let dc = ok("compose", compose(&i.correlation, &i.channel))?;
    let pi = pushforward(&i.rho, &i.correlation);
    let lhs = ok("subject lift", (s.lift)(&i.rho, &dc))?;
    let via_d = ok("subject lift", (s.lift)(&i.rho, &i.correlation))?;
    let via_c = ok("subject lift", (s.lift)(&pi, &i.channel))?;
    ensure_le("Lift(rho, DC) vs Lift(rho, D)", lhs.clone(), via_d)?;
    ensure_le("Lift(rho, DC) vs Lift(pi, C)", lhs, via_c)
}

fn pushforward(rho: &Prior, d: &Channel) -> Prior {
    let masses = (0..d.n_observations())
        .map(|x| d.column(x).zip(rho.masses()).map(|(e, m)| e * m).sum())
        .collect();
    Prior::new(d.observations().to_vec(), masses).expect("pushforward is a distribution")
}

fn dalenius_capacity(i: &Instance, _: &Subject) -> Checked {
    let dc = ok("compose", compose(&i.correlation, &i.channel))?;
    let cap_dc = lift_capacity(&dc);
    let cap_c = lift_capacity(&i.channel);
    for g in [gid(i.rho.labels()), reciprocal_gain(&i.rho)] {
        let g = ok("gain", g)?;
        let leak = ok("max-case leakage", max_case_leakage(&g, &i.rho, &dc))?;
        ensure_le(
            "MaxLeak(rho, DC) vs MaxLift(DC)",
            ExtRational::Finite(leak),
            cap_dc.clone(),
        )?;
    }
    ensure_le("MaxLift(DC) vs MaxLift(C)", cap_dc, cap_c)
}

fn max_case_dpi(i: &Instance, s: &Subject) -> Checked {
    let cp = ok("compose", compose(&i.channel, &i.post))?;
    let before = ok(
        "max-case leakage",
        max_case_leakage(&i.gain, &i.prior, &i.channel),
    )?;
    let after = ok("max-case leakage", max_case_leakage(&i.gain, &i.prior, &cp))?;
    ensure_le("MaxLeak(pi, CP) vs MaxLeak(pi, C)", after, before)?;
    let lift_before = ok("subject lift", (s.lift)(&i.prior, &i.channel))?;
    let lift_after = ok("subject lift", (s.lift)(&i.prior, &cp))?;
    ensure_le("Lift(pi, CP) vs Lift(pi, C)", lift_after, lift_before)?;
    ensure_le(
        "MaxLift(CP) vs MaxLift(C)",
        lift_capacity(&cp),
        lift_capacity(&i.channel),
    )
}

fn hyper_reconstruction(i: &Instance, _: &Subject) -> Checked {
    let h = ok("hyper", hyper(&i.prior, &i.channel))?;
    let j = ok("joint", joint(&i.prior, &i.channel))?;
    for x in 0..i.prior.len() {
        let mut avg = Rational::zero();
        for ((&y, p_y), post) in h.columns().iter().zip(h.marginals()).zip(h.posteriors()) {
            let cell = p_y * post.mass(x);
            ensure_eq(
                "p(y) posterior vs joint entry",
                cell.clone(),
                j.entry(x, y).clone(),
            )?;
            avg = avg + cell;
        }
        ensure_eq("average posterior vs prior", avg, i.prior.mass(x).clone())?;
    }
    let total: Rational = h.marginals().iter().sum();
    ensure_eq("marginals sum", total, Rational::one())
}

fn factorize_round_trip(i: &Instance, _: &Subject) -> Checked {
    let j = ok("joint", joint(&i.prior, &i.channel))?;
    let (rho, d) = factorize(&j);
    ensure_true("factorized prior equals prior", rho == i.prior)?;
    ensure_true("factorized channel equals channel", d == i.channel)
}

fn compose_associativity(i: &Instance, _: &Subject) -> Checked {
    let left = ok(
        "compose",
        compose(&i.correlation, &i.channel).and_then(|dc| compose(&dc, &i.post)),
    )?;
    let right = ok(
        "compose",
        compose(&i.channel, &i.post).and_then(|cp| compose(&i.correlation, &cp)),
    )?;
    ensure_true("(DC)P = D(CP)", left == right)?;
    let id = ok("identity", Channel::identity(i.channel.secrets().to_vec()))?;
    ensure_true(
        "identity is a left unit",
        ok("compose", compose(&id, &i.channel))? == i.channel,
    )?;
    let id = ok(
        "identity",
        Channel::identity(i.channel.observations().to_vec()),
    )?;
    ensure_true(
        "identity is a right unit",
        ok("compose", compose(&i.channel, &id))? == i.channel,
    )
}

fn non_interacting_fixpoint(i: &Instance, s: &Subject) -> Checked {
    let c = &i.channel;
    if !c.is_non_interacting() {
        return Ok(());
    }
    let one = Rational::one();
    ensure_eq(
        "mult leakage",
        ok("mult", mult_leakage(&i.gain, &i.prior, c))?,
        one.clone(),
    )?;
    ensure_eq(
        "max-case leakage",
        ok("max", max_case_leakage(&i.gain, &i.prior, c))?,
        one.clone(),
    )?;
    ensure_eq("lift", ok("lift", (s.lift)(&i.prior, c))?, one.clone())?;
    ensure_eq("Bayes capacity", bayes_capacity(c), one.clone())?;
    ensure_eq("lift capacity", lift_capacity(c), ExtRational::Finite(one))
}

/// A failing trial, before and after shrinking.
#[derive(Clone, Debug)]
pub struct Failure {
    pub trial_index: usize,
    pub original: Instance,
    pub shrunk: Instance,
    /// The violation as it appears on the shrunk instance.
    pub violation: Violation,
    pub shrink_steps: usize,
}

/// Outcome of one property over a registry run.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub property: &'static str,
    pub trials: usize,
    pub passed: bool,
    pub failure: Option<Failure>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} ({} trials)", self.property, self.trials),
            Some(fail) => {
                let (n, m) = fail.shrunk.channel_dims();
                write!(
                    f,
                    "FAIL {} (trial {}, shrunk to {}x{} in {} steps): {}",
                    self.property, fail.trial_index, n, m, fail.shrink_steps, fail.violation
                )
            }
        }
    }
}

/// Runs the full registry against the reference implementation.
pub fn run_registry(spec: &InstanceSpec) -> Result<Vec<CheckResult>> {
    run_registry_with(spec, &Subject::reference())
}

pub fn run_registry_with(spec: &InstanceSpec, subject: &Subject) -> Result<Vec<CheckResult>> {
    spec.validate()?;
    let instances: Vec<Instance> = (0..spec.trials)
        .into_par_iter()
        .map(|t| gen_instance(spec, t))
        .collect();
    Ok(registry()
        .iter()
        .map(|p| check_instances(p, &instances, subject))
        .collect())
}

/// Runs one property on `spec.trials` generated instances.
pub fn run_property(
    spec: &InstanceSpec,
    property: &Property,
    subject: &Subject,
) -> Result<CheckResult> {
    spec.validate()?;
    let instances: Vec<Instance> = (0..spec.trials)
        .into_par_iter()
        .map(|t| gen_instance(spec, t))
        .collect();
    Ok(check_instances(property, &instances, subject))
}

fn check_instances(property: &Property, instances: &[Instance], subject: &Subject) -> CheckResult {
    let first_failure = instances
        .par_iter()
        .enumerate()
        .find_map_first(|(t, inst)| property.check(inst, subject).err().map(|v| (t, v)));
    let failure = first_failure.map(|(trial_index, v)| {
        let original = instances[trial_index].clone();
        let (shrunk, violation, shrink_steps) = shrink(property, subject, original.clone(), v);
        Failure {
            trial_index,
            original,
            shrunk,
            violation,
            shrink_steps,
        }
    });
    CheckResult {
        property: property.name,
        trials: instances.len(),
        passed: failure.is_none(),
        failure,
    }
}

/// Greedy shrinking: first drop dimensions, then simplify denominators.
/// A candidate is kept only if it is strictly simpler and still violates
/// the same relation.
pub fn shrink(
    property: &Property,
    subject: &Subject,
    mut current: Instance,
    mut violation: Violation,
) -> (Instance, Violation, usize) {
    let mut steps = 0;
    'outer: loop {
        let complexity = current.complexity();
        let candidates: Vec<Instance> = dimension_candidates(&current)
            .chain(denominator_candidates(&current))
            .collect();
        for candidate in candidates {
            if candidate.complexity() >= complexity {
                continue;
            }
            if let Err(v) = property.check(&candidate, subject) {
                if v.relation == violation.relation {
                    current = candidate;
                    violation = v;
                    steps += 1;
                    continue 'outer;
                }
            }
        }
        return (current, violation, steps);
    }
}

fn drop_index<T: Clone>(v: &[T], i: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, t)| t.clone())
        .collect()
}

/// Drops column `col` of a channel and renormalizes; `None` if some row
/// would be left without mass.
fn drop_column(c: &Channel, col: usize) -> Option<Channel> {
    let weights = c.rows().iter().map(|r| drop_index(r, col)).collect();
    Channel::from_weights(
        c.secrets().to_vec(),
        drop_index(c.observations(), col),
        weights,
    )
    .ok()
}

fn drop_row(c: &Channel, row: usize) -> Option<Channel> {
    Channel::new(
        drop_index(c.secrets(), row),
        c.observations().to_vec(),
        drop_index(c.rows(), row),
    )
    .ok()
}

fn drop_mass(p: &Prior, i: usize) -> Option<Prior> {
    Prior::from_weights(drop_index(p.labels(), i), &drop_index(p.masses(), i)).ok()
}

fn dimension_candidates(inst: &Instance) -> impl Iterator<Item = Instance> + '_ {
    let n = inst.channel.n_secrets();
    let m = inst.channel.n_observations();
    let drop_secret = (0..n).filter(move |_| n > 1).filter_map(move |x| {
        let gain_rows = inst.gain.rows().iter().map(|r| drop_index(r, x)).collect();
        let correlation = drop_column(&inst.correlation, x).or_else(|| {
            let rows =
                vec![vec![Rational::new(1, n as i64 - 1); n - 1]; inst.correlation.n_secrets()];
            Channel::new(
                inst.correlation.secrets().to_vec(),
                drop_index(inst.channel.secrets(), x),
                rows,
            )
            .ok()
        })?;
        Some(Instance {
            prior: drop_mass(&inst.prior, x)?,
            channel: drop_row(&inst.channel, x)?,
            gain: GainFunction::new(
                inst.gain.actions().to_vec(),
                drop_index(inst.gain.secrets(), x),
                gain_rows,
            )
            .ok()?,
            correlation,
            ..inst.clone()
        })
    });
    let drop_observation = (0..m).filter(move |_| m > 1).filter_map(move |y| {
        Some(Instance {
            channel: drop_column(&inst.channel, y)?,
            post: drop_row(&inst.post, y)?,
            ..inst.clone()
        })
    });
    let a = inst.gain.n_actions();
    let drop_action = (0..a).filter(move |_| a > 1).filter_map(move |w| {
        Some(Instance {
            gain: GainFunction::new(
                drop_index(inst.gain.actions(), w),
                inst.gain.secrets().to_vec(),
                drop_index(inst.gain.rows(), w),
            )
            .ok()?,
            ..inst.clone()
        })
    });
    let zs = inst.rho.len();
    let drop_z = (0..zs).filter(move |_| zs > 1).filter_map(move |z| {
        Some(Instance {
            rho: drop_mass(&inst.rho, z)?,
            correlation: drop_row(&inst.correlation, z)?,
            ..inst.clone()
        })
    });
    let outs = inst.post.n_observations();
    let drop_out = (0..outs).filter(move |_| outs > 1).filter_map(move |o| {
        Some(Instance {
            post: drop_column(&inst.post, o)?,
            ..inst.clone()
        })
    });
    drop_secret
        .chain(drop_observation)
        .chain(drop_action)
        .chain(drop_z)
        .chain(drop_out)
}

const SIMPLE_DENOMINATORS: [i64; 7] = [1, 2, 3, 4, 6, 8, 12];

/// Rounds each weight to the nearest multiple of `1/d`, keeping zero
/// weights zero and positive weights positive.
fn round_weights(w: &[Rational], d: i64) -> Vec<Rational> {
    let total: Rational = w.iter().sum();
    w.iter()
        .map(|x| {
            if x.is_zero() {
                return Rational::zero();
            }
            let scaled = (x / &total).to_f64() * d as f64;
            Rational::new((scaled.round() as i64).max(1), d)
        })
        .collect()
}

fn denominator_candidates(inst: &Instance) -> impl Iterator<Item = Instance> + '_ {
    SIMPLE_DENOMINATORS.iter().flat_map(move |&d| {
        let mut out = Vec::new();
        if let Ok(prior) = Prior::from_weights(
            inst.prior.labels().to_vec(),
            &round_weights(inst.prior.masses(), d),
        ) {
            out.push(Instance {
                prior,
                ..inst.clone()
            });
        }
        if let Ok(rho) = Prior::from_weights(
            inst.rho.labels().to_vec(),
            &round_weights(inst.rho.masses(), d),
        ) {
            out.push(Instance {
                rho,
                ..inst.clone()
            });
        }
        for x in 0..inst.channel.n_secrets() {
            if let Some(channel) = replace_row(&inst.channel, x, d) {
                out.push(Instance {
                    channel,
                    ..inst.clone()
                });
            }
        }
        for z in 0..inst.correlation.n_secrets() {
            if let Some(correlation) = replace_row(&inst.correlation, z, d) {
                out.push(Instance {
                    correlation,
                    ..inst.clone()
                });
            }
        }
        for y in 0..inst.post.n_secrets() {
            if let Some(post) = replace_row(&inst.post, y, d) {
                out.push(Instance {
                    post,
                    ..inst.clone()
                });
            }
        }
        for w in 0..inst.gain.n_actions() {
            let mut rows = inst.gain.rows().to_vec();
            rows[w] = rows[w]
                .iter()
                .map(|g| Rational::new((g.to_f64() * d as f64).round() as i64, d))
                .collect();
            if let Ok(gain) = GainFunction::new(
                inst.gain.actions().to_vec(),
                inst.gain.secrets().to_vec(),
                rows,
            ) {
                out.push(Instance {
                    gain,
                    ..inst.clone()
                });
            }
        }
        out
    })
}

fn replace_row(c: &Channel, row: usize, d: i64) -> Option<Channel> {
    let mut weights = c.rows().to_vec();
    weights[row] = round_weights(&weights[row], d);
    Channel::from_weights(c.secrets().to_vec(), c.observations().to_vec(), weights).ok()
}

/// Deliberately wrong implementations for checking that the registry has
/// teeth.
pub mod mutants {
    use super::*;
    use crate::channel::output_marginals;

    /// Lift that forgets the positive-joint side condition and maximizes
    /// `C[x][y] / p(y)` over every secret, including zero-mass ones.
    pub fn lift_ignoring_joint_support(pi: &Prior, c: &Channel) -> Result<Rational> {
        let p = output_marginals(pi, c)?;
        let mut best = Rational::zero();
        for (y, p_y) in p.iter().enumerate() {
            if p_y.is_zero() {
                continue;
            }
            for x in 0..c.n_secrets() {
                let r = c.entry(x, y) / p_y;
                if r > best {
                    best = r;
                }
            }
        }
        Ok(best)
    }

    pub fn broken_lift_subject() -> Subject {
        Subject {
            name: "lift ignoring positive-joint condition",
            lift: lift_ignoring_joint_support,
        }
    }
}
