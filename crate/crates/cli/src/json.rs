//! JSON renderings of core types. Exact values are always `"p/q"` strings.

use num_traits::Zero;
use serde_json::{json, Value};

use prbox_core::bell::LocalityCertificate;
use prbox_core::rational::to_pq;
use prbox_core::{Behavior, NoSignallingReport, Rational};

pub fn rational(r: &Rational) -> Value {
    Value::String(to_pq(r))
}

/// Scenario plus the nonzero cells, in table order.
pub fn behavior(b: &Behavior) -> Value {
    let s = b.scenario();
    let outs = s.output_tuple_count();
    let entries: Vec<Value> = b
        .table()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(cell, p)| {
            json!({
                "inputs": s.input_tuple(cell / outs),
                "outputs": s.output_tuple(cell % outs),
                "p": rational(p),
            })
        })
        .collect();
    json!({
        "parties": s.party_count(),
        "inputs": s.inputs(),
        "outputs": s.outputs(),
        "entries": entries,
    })
}

pub fn no_signalling(report: &NoSignallingReport) -> Value {
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| {
            json!({
                "parties": v.parties,
                "party_inputs": v.party_inputs,
                "reference_inputs": v.reference_inputs,
                "differing_inputs": v.differing_inputs,
                "discrepancy": rational(&v.discrepancy),
            })
        })
        .collect();
    json!({
        "no_signalling": report.is_no_signalling(),
        "violations": violations,
    })
}

pub fn locality(cert: &LocalityCertificate) -> Value {
    match cert {
        LocalityCertificate::Local { decomposition } => {
            let parts: Vec<Value> = decomposition
                .iter()
                .map(|(strategy, w)| json!({ "strategy": strategy, "weight": rational(w) }))
                .collect();
            json!({ "local": true, "decomposition": parts })
        }
        LocalityCertificate::Nonlocal {
            functional,
            local_bound,
            value,
        } => json!({
            "local": false,
            "functional": functional.coefficients().iter().map(rational).collect::<Vec<_>>(),
            "local_bound": rational(local_bound),
            "value": rational(value),
        }),
    }
}
