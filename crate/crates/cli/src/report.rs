//! Text and JSON rendering. Both renderings of a report carry the same
//! exact values; decimals are display-only.

use qif::measures::Witness;
use qif::{ExtRational, Rational};
use serde_json::{json, Map, Value};

/// How a value is annotated in text output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// A ratio shown with its 4-place decimal: `19/11 (1.7273)`.
    Ratio,
    /// An `e^ε` factor shown with its natural log: `4 (ln = 1.3863)`.
    Factor,
}

pub fn ln_text(v: &ExtRational) -> String {
    match v {
        ExtRational::Infinite => "inf".to_string(),
        ExtRational::Finite(r) => format!("{:.4}", r.to_f64().ln()),
    }
}

pub fn value_text(v: &ExtRational, scale: Scale) -> String {
    match scale {
        Scale::Ratio => format!("{v} ({})", v.to_decimal(4)),
        Scale::Factor => format!("{v} (ln = {})", ln_text(v)),
    }
}

pub fn exact_json(v: &ExtRational) -> Value {
    match v {
        ExtRational::Finite(r) => json!({
            "num": r.numer().to_string(),
            "den": r.denom().to_string(),
            "infinite": false,
        }),
        ExtRational::Infinite => json!({ "num": null, "den": null, "infinite": true }),
    }
}

/// Exact value plus its renderings, as used in table rows.
pub fn value_json(v: &ExtRational) -> Value {
    json!({
        "value": exact_json(v),
        "decimal": v.to_decimal(4),
        "ln": ln_text(v),
    })
}

pub fn witness_json(w: Option<&Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => Value::Object(
            w.fields()
                .into_iter()
                .map(|(k, l)| (k.to_string(), Value::String(l.to_string())))
                .collect(),
        ),
    }
}

pub fn inputs_json(inputs: &[(&'static str, String)]) -> Value {
    Value::Object(
        inputs
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect(),
    )
}

/// One computed quantity.
#[derive(Clone, Debug)]
pub struct Report {
    pub measure: String,
    pub value: ExtRational,
    pub scale: Scale,
    pub witness: Option<Witness>,
    pub inputs: Vec<(&'static str, String)>,
    /// Replaces the value in the first line of text output.
    pub headline: Option<String>,
    /// Extra lines printed after the headline in text output.
    pub notes: Vec<String>,
    /// Extra top-level JSON fields.
    pub extra: Map<String, Value>,
}

impl Report {
    pub fn new(measure: impl Into<String>, value: impl Into<ExtRational>, scale: Scale) -> Self {
        Report {
            measure: measure.into(),
            value: value.into(),
            scale,
            witness: None,
            headline: None,
            inputs: Vec::new(),
            notes: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn rational(measure: impl Into<String>, value: Rational) -> Self {
        Report::new(measure, value, Scale::Ratio)
    }

    pub fn text(&self) -> String {
        let mut out = match &self.headline {
            Some(h) => h.clone(),
            None => value_text(&self.value, self.scale),
        };
        if let Some(w) = &self.witness {
            let fields = w.to_string();
            if !fields.is_empty() {
                // capacities keep the headline to the factor and its log
                out.push_str(if self.scale == Scale::Factor {
                    "\nwitness "
                } else {
                    " witness "
                });
                out.push_str(&fields);
            }
        }
        out.push('\n');
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("measure".into(), Value::String(self.measure.clone()));
        obj.insert("value".into(), exact_json(&self.value));
        obj.insert("decimal".into(), Value::String(self.value.to_decimal(4)));
        if self.scale == Scale::Factor {
            obj.insert("ln".into(), Value::String(ln_text(&self.value)));
        }
        obj.insert("witness".into(), witness_json(self.witness.as_ref()));
        obj.insert("inputs".into(), inputs_json(&self.inputs));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
