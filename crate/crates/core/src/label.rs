use std::collections::HashSet;
use std::fmt;

use crate::error::{QifError, Result};

/// Name of a secret, observation or action.
///
/// Labels match `[A-Za-z0-9_@-]+`, which keeps them safe to embed in the
/// comma-separated exchange formats without quoting.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let valid = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '@' | '-'));
        if valid {
            Ok(Label(name))
        } else {
            Err(QifError::BadLabel(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Label {
    type Err = QifError;

    fn from_str(s: &str) -> Result<Self> {
        Label::new(s)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Builds a list of labels from string literals.
///
/// Panics on an invalid name, so it is meant for tests and examples.
pub fn labels<S: AsRef<str>>(names: &[S]) -> Vec<Label> {
    names
        .iter()
        .map(|n| Label::new(n.as_ref()).expect("valid label"))
        .collect()
}

/// `prefix0, prefix1, ...`
pub fn numbered(prefix: &str, count: usize) -> Vec<Label> {
    (0..count)
        .map(|i| Label::new(format!("{prefix}{i}")).expect("valid label"))
        .collect()
}

pub(crate) fn ensure_unique(axis: &'static str, labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(QifError::DuplicateLabel {
                axis,
                label: l.clone(),
            });
        }
    }
    Ok(())
}

pub(crate) fn join(labels: &[Label]) -> String {
    labels
        .iter()
        .map(Label::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn ensure_same(
    left: &'static str,
    left_labels: &[Label],
    right: &'static str,
    right_labels: &[Label],
) -> Result<()> {
    if left_labels == right_labels {
        Ok(())
    } else {
        Err(QifError::LabelMismatch {
            left,
            left_labels: join(left_labels),
            right,
            right_labels: join(right_labels),
        })
    }
}
