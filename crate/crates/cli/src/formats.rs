//! The comma-separated exchange formats.
//!
//! ```text
//! channel,<obs1>,<obs2>,...      prior           gain,<x1>,...      joint,<x1>,...
//! <secret>,<p1>,<p2>,...         <secret>,<m>    <action>,<g1>,...  <z>,<j1>,...
//! ```
//!
//! Cells are separated by single commas with no quoting or padding. Labels
//! match `[A-Za-z0-9_@-]+`; numbers are `a`, `a/b` or terminating decimals,
//! all read exactly. Blank lines are ignored.

use std::collections::HashSet;

use qif::{Channel, GainFunction, Joint, Label, Prior, Rational};

use crate::error::{FormatError, ParseError};

struct Table {
    columns: Vec<Label>,
    rows: Vec<Label>,
    cells: Vec<Vec<Rational>>,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty())
}

fn label(line: usize, cell: &str) -> Result<Label, ParseError> {
    Label::new(cell).map_err(|_| ParseError::new(line, format!("invalid label {cell:?}")))
}

fn number(line: usize, cell: &str) -> Result<Rational, ParseError> {
    Rational::parse(cell).map_err(|_| ParseError::new(line, format!("malformed number {cell:?}")))
}

fn labeled_table(text: &str, keyword: &str) -> Result<Table, ParseError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or_else(|| {
        ParseError::new(1, format!("empty input, expected a `{keyword},...` header"))
    })?;
    let mut cells = header.split(',');
    if cells.next() != Some(keyword) {
        return Err(ParseError::new(
            hline,
            format!("header must start with `{keyword}`"),
        ));
    }
    let columns = cells
        .map(|c| label(hline, c))
        .collect::<Result<Vec<_>, _>>()?;
    if columns.is_empty() {
        return Err(ParseError::new(hline, "header names no columns"));
    }
    unique(hline, &columns)?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (line, text) in it {
        let mut cells = text.split(',');
        let name = label(line, cells.next().unwrap_or(""))?;
        if !seen.insert(name.clone()) {
            return Err(ParseError::new(line, format!("duplicate label {name}")));
        }
        let values = cells
            .map(|c| number(line, c))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != columns.len() {
            return Err(ParseError::new(
                line,
                format!(
                    "row {name} has {} values, header has {}",
                    values.len(),
                    columns.len()
                ),
            ));
        }
        rows.push(name);
        entries.push(values);
    }
    if rows.is_empty() {
        return Err(ParseError::new(hline, "no rows after the header"));
    }
    Ok(Table {
        columns,
        rows,
        cells: entries,
    })
}

fn unique(line: usize, labels: &[Label]) -> Result<(), ParseError> {
    let mut seen = HashSet::new();
    match labels.iter().find(|l| !seen.insert(*l)) {
        Some(dup) => Err(ParseError::new(line, format!("duplicate label {dup}"))),
        None => Ok(()),
    }
}

pub fn parse_channel_csv(text: &str) -> Result<Channel, FormatError> {
    let t = labeled_table(text, "channel")?;
    Ok(Channel::new(t.rows, t.columns, t.cells)?)
}

pub fn parse_gain_csv(text: &str) -> Result<GainFunction, FormatError> {
    let t = labeled_table(text, "gain")?;
    Ok(GainFunction::new(t.rows, t.columns, t.cells)?)
}

pub fn parse_joint_csv(text: &str) -> Result<Joint, FormatError> {
    let t = labeled_table(text, "joint")?;
    Ok(Joint::new(t.rows, t.columns, t.cells)?)
}

pub fn parse_prior_csv(text: &str) -> Result<Prior, FormatError> {
    let mut support = Vec::new();
    let mut masses = Vec::new();
    let mut seen = HashSet::new();
    for (line, text) in lines(text) {
        let (name, mass) = text
            .split_once(',')
            .ok_or_else(|| ParseError::new(line, "expected `<secret>,<mass>`"))?;
        let name = label(line, name)?;
        if !seen.insert(name.clone()) {
            return Err(ParseError::new(line, format!("duplicate label {name}")).into());
        }
        support.push(name);
        masses.push(number(line, mass)?);
    }
    if support.is_empty() {
        return Err(ParseError::new(1, "empty prior").into());
    }
    Ok(Prior::new(support, masses)?)
}

fn write_table(
    keyword: &str,
    columns: &[Label],
    rows: &[Label],
    cells: &[Vec<Rational>],
) -> String {
    let mut out = keyword.to_string();
    for c in columns {
        out.push(',');
        out.push_str(c.as_str());
    }
    out.push('\n');
    for (r, values) in rows.iter().zip(cells) {
        out.push_str(r.as_str());
        for v in values {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_channel_csv(c: &Channel) -> String {
    write_table("channel", c.observations(), c.secrets(), c.rows())
}

pub fn write_gain_csv(g: &GainFunction) -> String {
    write_table("gain", g.secrets(), g.actions(), g.rows())
}

pub fn write_joint_csv(j: &Joint) -> String {
    write_table("joint", j.col_labels(), j.row_labels(), j.entries())
}

pub fn write_prior_csv(p: &Prior) -> String {
    p.iter().map(|(x, m)| format!("{x},{m}\n")).collect()
}
