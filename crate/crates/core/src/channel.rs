//! Channels, joint distributions and hyper-distributions.
//!
//! A channel maps each secret (row) to a distribution over observations
//! (columns). Pushing a prior through a channel gives a joint distribution;
//! normalizing its columns gives the hyper: one posterior per observation
//! that can actually occur, weighted by that observation's marginal.

use crate::error::{QifError, Result};
use crate::label::{ensure_same, ensure_unique, Label};
use crate::prior::Prior;
use crate::rational::Rational;

/// A row-stochastic matrix from secrets to observations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    secrets: Vec<Label>,
    observations: Vec<Label>,
    rows: Vec<Vec<Rational>>,
}

impl Channel {
    /// Validates and builds a channel. Every entry must be non-negative and
    /// every row must sum to exactly one.
    pub fn new(
        secrets: Vec<Label>,
        observations: Vec<Label>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        validate_matrix("channel", &secrets, &observations, &rows)?;
        for (label, row) in secrets.iter().zip(&rows) {
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(QifError::NonStochasticRow {
                    row: label.clone(),
                    sum,
                });
            }
        }
        Ok(Channel {
            secrets,
            observations,
            rows,
        })
    }

    /// Builds a channel from non-negative row weights, normalizing each row.
    pub fn from_weights(
        secrets: Vec<Label>,
        observations: Vec<Label>,
        weights: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        validate_matrix("channel weights", &secrets, &observations, &weights)?;
        let mut rows = Vec::with_capacity(weights.len());
        for (label, row) in secrets.iter().zip(weights) {
            let total: Rational = row.iter().sum();
            if !total.is_positive() {
                return Err(QifError::NonStochasticRow {
                    row: label.clone(),
                    sum: total,
                });
            }
            rows.push(row.iter().map(|w| w / &total).collect());
        }
        Channel::new(secrets, observations, rows)
    }

    /// The perfect channel that reveals the secret.
    pub fn identity(labels: Vec<Label>) -> Result<Self> {
        let n = labels.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Channel::new(labels.clone(), labels, rows)
    }

    /// A channel whose rows all equal `row`; it leaks nothing.
    pub fn non_interacting(
        secrets: Vec<Label>,
        observations: Vec<Label>,
        row: Vec<Rational>,
    ) -> Result<Self> {
        let rows = vec![row; secrets.len()];
        Channel::new(secrets, observations, rows)
    }

    pub fn secrets(&self) -> &[Label] {
        &self.secrets
    }

    pub fn observations(&self) -> &[Label] {
        &self.observations
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[Rational] {
        &self.rows[x]
    }

    pub fn entry(&self, x: usize, y: usize) -> &Rational {
        &self.rows[x][y]
    }

    pub fn column(&self, y: usize) -> impl Iterator<Item = &Rational> + '_ {
        self.rows.iter().map(move |r| &r[y])
    }

    pub fn n_secrets(&self) -> usize {
        self.secrets.len()
    }

    pub fn n_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn is_non_interacting(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1])
    }
}

/// A joint distribution over a row axis and a column axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Joint {
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
    entries: Vec<Vec<Rational>>,
}

impl Joint {
    pub fn new(
        row_labels: Vec<Label>,
        col_labels: Vec<Label>,
        entries: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        validate_matrix("joint", &row_labels, &col_labels, &entries)?;
        let sum: Rational = entries.iter().flatten().sum();
        if !sum.is_one() {
            return Err(QifError::NotNormalized { what: "joint", sum });
        }
        Ok(Joint {
            row_labels,
            col_labels,
            entries,
        })
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r][c]
    }

    pub fn column_sum(&self, c: usize) -> Rational {
        self.entries.iter().map(|r| &r[c]).sum()
    }
}

/// The posterior decomposition of a prior pushed through a channel.
///
/// Only observations with positive marginal are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyper {
    observations: Vec<Label>,
    columns: Vec<usize>,
    marginals: Vec<Rational>,
    posteriors: Vec<Prior>,
}

impl Hyper {
    pub fn observations(&self) -> &[Label] {
        &self.observations
    }

    /// Index into the source channel's columns for each retained observation.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn marginals(&self) -> &[Rational] {
        &self.marginals
    }

    pub fn posteriors(&self) -> &[Prior] {
        &self.posteriors
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// `(observation, p(y), δ^y)` triples.
    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Rational, &Prior)> {
        self.observations
            .iter()
            .zip(&self.marginals)
            .zip(&self.posteriors)
            .map(|((o, m), p)| (o, m, p))
    }

    pub fn posterior(&self, observation: &Label) -> Option<&Prior> {
        self.observations
            .iter()
            .position(|o| o == observation)
            .map(|i| &self.posteriors[i])
    }

    pub fn marginal(&self, observation: &Label) -> Option<&Rational> {
        self.observations
            .iter()
            .position(|o| o == observation)
            .map(|i| &self.marginals[i])
    }
}

/// `J[x][y] = π_x · C[x][y]`.
pub fn joint(pi: &Prior, c: &Channel) -> Result<Joint> {
    ensure_same("prior", pi.labels(), "channel secrets", c.secrets())?;
    let entries = c
        .rows()
        .iter()
        .zip(pi.masses())
        .map(|(row, m)| row.iter().map(|e| m * e).collect())
        .collect();
    Joint::new(pi.labels().to_vec(), c.observations().to_vec(), entries)
}

/// Output marginals `p(y) = Σ_x π_x C[x][y]`, one per channel column,
/// including zero ones.
pub fn output_marginals(pi: &Prior, c: &Channel) -> Result<Vec<Rational>> {
    ensure_same("prior", pi.labels(), "channel secrets", c.secrets())?;
    Ok((0..c.n_observations())
        .map(|y| c.column(y).zip(pi.masses()).map(|(e, m)| e * m).sum())
        .collect())
}

/// Decomposes `(π, C)` into marginals and posteriors, dropping
/// observations of probability zero.
pub fn hyper(pi: &Prior, c: &Channel) -> Result<Hyper> {
    let j = joint(pi, c)?;
    let mut observations = Vec::new();
    let mut columns = Vec::new();
    let mut marginals = Vec::new();
    let mut posteriors = Vec::new();
    for (y, label) in c.observations().iter().enumerate() {
        let p_y = j.column_sum(y);
        if p_y.is_zero() {
            continue;
        }
        let posterior = j.entries().iter().map(|row| &row[y] / &p_y).collect();
        posteriors.push(Prior::new(pi.labels().to_vec(), posterior)?);
        observations.push(label.clone());
        columns.push(y);
        marginals.push(p_y);
    }
    Ok(Hyper {
        observations,
        columns,
        marginals,
        posteriors,
    })
}

/// Cascade `D` then `C`: the matrix product `DC`.
pub fn compose(d: &Channel, c: &Channel) -> Result<Channel> {
    ensure_same(
        "first channel observations",
        d.observations(),
        "second channel secrets",
        c.secrets(),
    )?;
    let rows = d
        .rows()
        .iter()
        .map(|drow| {
            (0..c.n_observations())
                .map(|y| drow.iter().zip(c.column(y)).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Channel::new(d.secrets().to_vec(), c.observations().to_vec(), rows)
}

/// Splits a joint into its row marginal `ρ` and the conditional channel `D`
/// with `ρ_z · D[z][x] = J[z][x]`.
///
/// Rows of `J` with zero mass get the uniform row in `D`; it is weighted by
/// zero, so any row would reconstruct `J`.
pub fn factorize(j: &Joint) -> (Prior, Channel) {
    let n_cols = j.col_labels().len() as i64;
    let mut masses = Vec::with_capacity(j.row_labels().len());
    let mut rows = Vec::with_capacity(j.row_labels().len());
    for row in j.entries() {
        let rho: Rational = row.iter().sum();
        if rho.is_zero() {
            rows.push(vec![Rational::new(1, n_cols); row.len()]);
        } else {
            rows.push(row.iter().map(|e| e / &rho).collect());
        }
        masses.push(rho);
    }
    let rho = Prior::new(j.row_labels().to_vec(), masses)
        .expect("row sums of a joint form a distribution");
    let d = Channel::new(j.row_labels().to_vec(), j.col_labels().to_vec(), rows)
        .expect("normalized rows are stochastic");
    (rho, d)
}

fn validate_matrix(
    what: &'static str,
    rows: &[Label],
    cols: &[Label],
    entries: &[Vec<Rational>],
) -> Result<()> {
    if rows.is_empty() {
        return Err(QifError::Empty { what, axis: "row" });
    }
    if cols.is_empty() {
        return Err(QifError::Empty {
            what,
            axis: "column",
        });
    }
    ensure_unique("row", rows)?;
    ensure_unique("column", cols)?;
    if entries.len() != rows.len() {
        return Err(QifError::DimensionMismatch {
            what: format!("{what} rows"),
            expected: rows.len(),
            found: entries.len(),
        });
    }
    for (label, row) in rows.iter().zip(entries) {
        if row.len() != cols.len() {
            return Err(QifError::DimensionMismatch {
                what: format!("{what} row {label}"),
                expected: cols.len(),
                found: row.len(),
            });
        }
        for (col, e) in cols.iter().zip(row) {
            if e.is_negative() {
                return Err(QifError::NegativeEntry {
                    row: label.clone(),
                    col: col.clone(),
                    value: e.clone(),
                });
            }
        }
    }
    Ok(())
}
