//! Text serialization of behaviors.
//!
//! ```text
//! scenario: n=2 inputs=2,2 outputs=2,2
//! 0,0 | 0,0 : 1/2
//! 0,0 | 1,1 : 1/2
//! ```
//!
//! One line per cell, cells in table order, zero cells omitted. Blank lines
//! and lines starting with `#` are ignored when parsing.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_pq, Rational};

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn serialize(behavior: &Behavior) -> String {
    let s = behavior.scenario();
    let mut out = format!(
        "scenario: n={} inputs={} outputs={}\n",
        s.party_count(),
        join(s.inputs()),
        join(s.outputs())
    );
    let outs = s.output_tuple_count();
    for (cell, p) in behavior.table().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let x = s.input_tuple(cell / outs);
        let a = s.output_tuple(cell % outs);
        writeln!(out, "{} | {} : {}", join(&x), join(&a), to_pq(p)).expect("write to string");
    }
    out
}

fn parse_list(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::parse(line, format!("bad integer {t:?}")))
        })
        .collect()
}

fn parse_header(line: usize, text: &str) -> Result<Scenario> {
    let body = text
        .strip_prefix("scenario:")
        .ok_or_else(|| Error::parse(line, "expected `scenario:` header"))?;
    let (mut n, mut inputs, mut outputs) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("bad header field {field:?}")))?;
        match key {
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line, "bad party count"))?,
                )
            }
            "inputs" => inputs = Some(parse_list(line, value)?),
            "outputs" => outputs = Some(parse_list(line, value)?),
            _ => return Err(Error::parse(line, format!("unknown header field {key:?}"))),
        }
    }
    let (n, inputs, outputs) = match (n, inputs, outputs) {
        (Some(n), Some(i), Some(o)) => (n, i, o),
        _ => return Err(Error::parse(line, "header needs n, inputs and outputs")),
    };
    if inputs.len() != n || outputs.len() != n {
        return Err(Error::parse(line, "alphabet lists disagree with n"));
    }
    Scenario::new(inputs, outputs).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn parse(text: &str) -> Result<Behavior> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty behavior file"))?;
    let scenario = parse_header(header_line, header)?;
    let outs = scenario.output_tuple_count();
    let mut table: Vec<Option<Rational>> = vec![None; scenario.cell_count()];
    for (line, text) in lines {
        let (tuples, prob) = text
            .rsplit_once(':')
            .ok_or_else(|| Error::parse(line, "expected `inputs | outputs : p/q`"))?;
        let (xs, os) = tuples
            .split_once('|')
            .ok_or_else(|| Error::parse(line, "expected `inputs | outputs : p/q`"))?;
        let x = parse_list(line, xs)?;
        let a = parse_list(line, os)?;
        let i = scenario
            .input_index(&x)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        let o = scenario
            .output_index(&a)
            .map_err(|e| Error::parse(line, e.to_string()))?;
        let p = parse_rational(prob).map_err(|e| Error::parse(line, e.to_string()))?;
        let slot = &mut table[i * outs + o];
        if slot.is_some() {
            return Err(Error::parse(line, "duplicate cell"));
        }
        *slot = Some(p);
    }
    let table = table.into_iter().map(Option::unwrap_or_default).collect();
    Behavior::from_table(scenario, table).map_err(|e| Error::parse(header_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pr_box_text() {
        let text = serialize(&Behavior::pr_box());
        let expected = "scenario: n=2 inputs=2,2 outputs=2,2\n\
                        0,0 | 0,0 : 1/2\n0,0 | 1,1 : 1/2\n\
                        0,1 | 0,0 : 1/2\n0,1 | 1,1 : 1/2\n\
                        1,0 | 0,0 : 1/2\n1,0 | 1,1 : 1/2\n\
                        1,1 | 0,1 : 1/2\n1,1 | 1,0 : 1/2\n";
        assert_eq!(text, expected);
        assert_eq!(parse(&text).unwrap(), Behavior::pr_box());
    }

    #[test]
    fn round_trip_isotropic() {
        let b = Behavior::isotropic(&rat(3, 7)).unwrap();
        assert_eq!(parse(&serialize(&b)).unwrap(), b);
    }

    #[test]
    fn rejects_unnormalized() {
        let text = "scenario: n=1 inputs=1 outputs=2\n0 | 0 : 1/2\n0 | 1 : 1/3\n";
        assert!(matches!(parse(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn rejects_malformed_lines() {
        let header = "scenario: n=1 inputs=1 outputs=2\n";
        assert!(parse("").is_err());
        assert!(parse("scenario: n=2 inputs=2 outputs=2\n").is_err());
        assert!(parse(&format!("{header}0 | 0 : 1\n0 | 0 : 0\n")).is_err());
        assert!(parse(&format!("{header}0 | 2 : 1\n")).is_err());
        assert!(parse(&format!("{header}0 0 : 1\n")).is_err());
        assert!(parse(&format!("{header}0 | 0 : 1.0\n")).is_err());
    }

    #[test]
    fn accepts_comments_and_integers() {
        let text = "# a coin that always lands 1\nscenario: n=1 inputs=1 outputs=2\n\n0 | 1 : 1\n";
        let b = parse(text).unwrap();
        assert_eq!(b.table(), &[Rational::zero(), rat(1, 1)]);
    }
}
