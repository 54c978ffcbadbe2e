//! Rendering a command's record as JSON, CSV or text.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A command result: the JSON record plus an optional hand-written text
/// form used instead of the generic `key: value` listing.
pub struct Report {
    pub record: Value,
    pub text: Option<String>,
}

impl Report {
    pub fn new(record: Value) -> Self {
        Report { record, text: None }
    }

    pub fn with_text(record: Value, text: impl Into<String>) -> Self {
        Report {
            record,
            text: Some(text.into()),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.record).expect("JSON value");
                s.push('\n');
                s
            }
            Format::Csv => csv_row(&self.record),
            Format::Text => match &self.text {
                Some(t) if t.ends_with('\n') => t.clone(),
                Some(t) => format!("{t}\n"),
                None => text_listing(&self.record),
            },
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn fields(record: &Value) -> Vec<(String, &Value)> {
    match record {
        Value::Object(map) => map.iter().map(|(k, v)| (k.clone(), v)).collect(),
        other => vec![("value".to_string(), other)],
    }
}

/// Header and one data row; nested values are embedded as compact JSON.
fn csv_row(record: &Value) -> String {
    let fields = fields(record);
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(fields.iter().map(|(k, _)| k.as_str()))
        .expect("in-memory write");
    writer
        .write_record(fields.iter().map(|(_, v)| scalar(v)))
        .expect("in-memory write");
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8 CSV")
}

fn text_listing(record: &Value) -> String {
    fields(record)
        .into_iter()
        .map(|(k, v)| format!("{k}: {}\n", scalar(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_quotes_nested_values() {
        let r = Report::new(json!({ "a": "1/2", "b": [1, 2] }));
        assert_eq!(r.render(Format::Csv), "a,b\n1/2,\"[1,2]\"\n");
    }

    #[test]
    fn text_prefers_custom_form() {
        let r = Report::with_text(json!({ "value": "4/1" }), "4");
        assert_eq!(r.render(Format::Text), "4\n");
        assert_eq!(
            Report::new(json!({ "x": 1 })).render(Format::Text),
            "x: 1\n"
        );
    }
}
