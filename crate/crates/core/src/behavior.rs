//! Multipartite conditional probability tables.
//!
//! Cells are stored densely. Input tuples and output tuples are each
//! flattened in row-major order with party 0 most significant, and the
//! table index is `input_index * output_tuple_count + output_index`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Party count and per-party alphabet sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Scenario {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::domain("a scenario needs at least one party"));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::domain(format!(
                "{} input alphabets but {} output alphabets",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.iter().chain(&outputs).any(|&n| n == 0) {
            return Err(Error::domain("alphabet sizes must be at least 1"));
        }
        Ok(Scenario { inputs, outputs })
    }

    /// `parties` parties with binary inputs and binary outputs.
    pub fn binary(parties: usize) -> Self {
        Scenario::new(vec![2; parties], vec![2; parties]).expect("binary scenario")
    }

    pub fn party_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn input_tuple_count(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn output_tuple_count(&self) -> usize {
        self.outputs.iter().product()
    }

    pub fn cell_count(&self) -> usize {
        self.input_tuple_count() * self.output_tuple_count()
    }

    pub fn input_index(&self, inputs: &[usize]) -> Result<usize> {
        encode(&self.inputs, inputs)
    }

    pub fn output_index(&self, outputs: &[usize]) -> Result<usize> {
        encode(&self.outputs, outputs)
    }

    pub fn input_tuple(&self, index: usize) -> Vec<usize> {
        decode(&self.inputs, index)
    }

    pub fn output_tuple(&self, index: usize) -> Vec<usize> {
        decode(&self.outputs, index)
    }

    /// Scenario of the listed parties, in the given order.
    pub fn restrict(&self, parties: &[usize]) -> Scenario {
        Scenario {
            inputs: parties.iter().map(|&p| self.inputs[p]).collect(),
            outputs: parties.iter().map(|&p| self.outputs[p]).collect(),
        }
    }

    /// Parties of `self` followed by parties of `other`.
    pub fn concat(&self, other: &Scenario) -> Scenario {
        Scenario {
            inputs: self.inputs.iter().chain(&other.inputs).copied().collect(),
            outputs: self.outputs.iter().chain(&other.outputs).copied().collect(),
        }
    }
}

/// Row-major mixed-radix encoding, first digit most significant.
pub(crate) fn encode(radices: &[usize], digits: &[usize]) -> Result<usize> {
    if radices.len() != digits.len() {
        return Err(Error::domain(format!(
            "tuple has {} entries, expected {}",
            digits.len(),
            radices.len()
        )));
    }
    let mut index = 0;
    for (&r, &d) in radices.iter().zip(digits) {
        if d >= r {
            return Err(Error::domain(format!(
                "symbol {d} outside alphabet of size {r}"
            )));
        }
        index = index * r + d;
    }
    Ok(index)
}

pub(crate) fn decode(radices: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    digits
}

/// A normalized, nonnegative conditional distribution `P(outputs | inputs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<Rational>,
}

impl Behavior {
    /// Validates nonnegativity and per-input normalization.
    pub fn from_table(scenario: Scenario, table: Vec<Rational>) -> Result<Self> {
        if table.len() != scenario.cell_count() {
            return Err(Error::domain(format!(
                "table has {} cells, scenario needs {}",
                table.len(),
                scenario.cell_count()
            )));
        }
        let outs = scenario.output_tuple_count();
        for (i, row) in table.chunks(outs).enumerate() {
            if let Some(p) = row.iter().find(|p| p.is_negative()) {
                return Err(Error::domain(format!(
                    "negative probability {p} at inputs {:?}",
                    scenario.input_tuple(i)
                )));
            }
            let total: Rational = row.iter().sum();
            if !total.is_one() {
                return Err(Error::domain(format!(
                    "probabilities at inputs {:?} sum to {total}",
                    scenario.input_tuple(i)
                )));
            }
        }
        Ok(Behavior { scenario, table })
    }

    /// Builds a behavior cell by cell from `f(inputs, outputs)`.
    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> Rational,
    ) -> Result<Self> {
        let outs = scenario.output_tuple_count();
        let mut table = Vec::with_capacity(scenario.cell_count());
        for i in 0..scenario.input_tuple_count() {
            let x = scenario.input_tuple(i);
            for o in 0..outs {
                table.push(f(&x, &scenario.output_tuple(o)));
            }
        }
        Behavior::from_table(scenario, table)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Flat table in serialization order.
    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn prob(&self, inputs: &[usize], outputs: &[usize]) -> Result<&Rational> {
        let i = self.scenario.input_index(inputs)?;
        let o = self.scenario.output_index(outputs)?;
        Ok(&self.table[i * self.scenario.output_tuple_count() + o])
    }

    /// Output distribution at a fixed input tuple.
    pub fn row(&self, inputs: &[usize]) -> Result<&[Rational]> {
        let i = self.scenario.input_index(inputs)?;
        let outs = self.scenario.output_tuple_count();
        Ok(&self.table[i * outs..(i + 1) * outs])
    }

    /// `P(a,b|x,y) = 1/2` if `a + b = xy (mod 2)`, else 0.
    pub fn pr_box() -> Self {
        Behavior::from_fn(Scenario::binary(2), |x, a| {
            if (a[0] ^ a[1]) == (x[0] & x[1]) {
                rat(1, 2)
            } else {
                Rational::zero()
            }
        })
        .expect("PR-box is normalized")
    }

    /// Mixture of the PR-box (weight `v`) with white noise.
    pub fn isotropic(v: &Rational) -> Result<Self> {
        if v.is_negative() || *v > Rational::one() {
            return Err(Error::domain(format!("visibility {v} outside [0, 1]")));
        }
        let noise = (Rational::one() - v) / rat(4, 1);
        let peak = v / rat(2, 1) + &noise;
        Behavior::from_fn(Scenario::binary(2), |x, a| {
            if (a[0] ^ a[1]) == (x[0] & x[1]) {
                peak.clone()
            } else {
                noise.clone()
            }
        })
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let p = Rational::new(1.into(), scenario.output_tuple_count().into());
        Behavior::from_fn(scenario, |_, _| p.clone()).expect("uniform is normalized")
    }

    /// Local deterministic behavior: party `p` answers `strategy[p][x_p]`.
    pub fn deterministic(scenario: Scenario, strategy: &[Vec<usize>]) -> Result<Self> {
        if strategy.len() != scenario.party_count() {
            return Err(Error::domain(format!(
                "strategy covers {} parties, scenario has {}",
                strategy.len(),
                scenario.party_count()
            )));
        }
        for (p, answers) in strategy.iter().enumerate() {
            if answers.len() != scenario.inputs[p] {
                return Err(Error::domain(format!(
                    "party {p} strategy defines {} of {} inputs",
                    answers.len(),
                    scenario.inputs[p]
                )));
            }
            if let Some(&o) = answers.iter().find(|&&o| o >= scenario.outputs[p]) {
                return Err(Error::domain(format!(
                    "party {p} answers {o}, outside its alphabet"
                )));
            }
        }
        Behavior::from_fn(scenario, |x, a| {
            let hit = strategy
                .iter()
                .zip(x)
                .zip(a)
                .all(|((s, &xi), &ai)| s[xi] == ai);
            if hit {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// Convex combination of behaviors sharing a scenario.
    pub fn mix(behaviors: &[Behavior], weights: &[Rational]) -> Result<Self> {
        let first = behaviors
            .first()
            .ok_or_else(|| Error::domain("cannot mix an empty list"))?;
        if behaviors.len() != weights.len() {
            return Err(Error::domain("one weight per behavior is required"));
        }
        if behaviors.iter().any(|b| b.scenario != first.scenario) {
            return Err(Error::domain("mixed behaviors must share a scenario"));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::domain("mixing weights must be nonnegative"));
        }
        if !weights.iter().sum::<Rational>().is_one() {
            return Err(Error::domain("mixing weights must sum to 1"));
        }
        let mut table = vec![Rational::zero(); first.table.len()];
        for (b, w) in behaviors.iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            for (acc, p) in table.iter_mut().zip(&b.table) {
                *acc += w * p;
            }
        }
        Behavior::from_table(first.scenario.clone(), table)
    }

    /// Independent composition; parties of `self` come first.
    pub fn product(&self, other: &Behavior) -> Behavior {
        let scenario = self.scenario.concat(&other.scenario);
        let (lo, ro) = (
            self.scenario.output_tuple_count(),
            other.scenario.output_tuple_count(),
        );
        let (li, ri) = (
            self.scenario.input_tuple_count(),
            other.scenario.input_tuple_count(),
        );
        // Row-major with left parties most significant means the combined
        // index factors as (left_in, right_in, left_out, right_out).
        let mut table = Vec::with_capacity(scenario.cell_count());
        for xl in 0..li {
            for xr in 0..ri {
                for al in 0..lo {
                    for ar in 0..ro {
                        table.push(&self.table[xl * lo + al] * &other.table[xr * ro + ar]);
                    }
                }
            }
        }
        Behavior { scenario, table }
    }

    /// Marginal on `keep` (ascending party indices) with every other party
    /// fixed to the input given in `others_inputs`, listed in ascending
    /// party order.
    pub fn marginal(&self, keep: &[usize], others_inputs: &[usize]) -> Result<Behavior> {
        let n = self.scenario.party_count();
        if keep.is_empty() {
            return Err(Error::domain("marginal must keep at least one party"));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&p| p >= n) {
            return Err(Error::domain(format!(
                "kept parties {keep:?} must be strictly ascending indices below {n}"
            )));
        }
        let others: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
        if others.len() != others_inputs.len() {
            return Err(Error::domain(format!(
                "{} discarded parties but {} inputs supplied",
                others.len(),
                others_inputs.len()
            )));
        }
        for (&p, &x) in others.iter().zip(others_inputs) {
            if x >= self.scenario.inputs[p] {
                return Err(Error::domain(format!(
                    "input {x} outside party {p}'s alphabet"
                )));
            }
        }
        let sub = self.scenario.restrict(keep);
        let table = self.marginal_table(keep, &others, others_inputs, &sub);
        Behavior::from_table(sub, table)
    }

    fn marginal_table(
        &self,
        keep: &[usize],
        others: &[usize],
        others_inputs: &[usize],
        sub: &Scenario,
    ) -> Vec<Rational> {
        let n = self.scenario.party_count();
        let sub_outs = sub.output_tuple_count();
        let mut table = vec![Rational::zero(); sub.cell_count()];
        let mut full_x = vec![0; n];
        for (&p, &x) in others.iter().zip(others_inputs) {
            full_x[p] = x;
        }
        for si in 0..sub.input_tuple_count() {
            for (&p, x) in keep.iter().zip(sub.input_tuple(si)) {
                full_x[p] = x;
            }
            let row = self.row(&full_x).expect("validated inputs");
            for (o, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let a = self.scenario.output_tuple(o);
                let kept: Vec<usize> = keep.iter().map(|&q| a[q]).collect();
                let so = sub.output_index(&kept).expect("restricted tuple");
                table[si * sub_outs + so] += p;
            }
        }
        table
    }

    /// Checks every proper nonempty subset of parties: its marginal at each
    /// of its own input tuples must not depend on the complement's inputs.
    pub fn check_no_signalling(&self) -> NoSignallingReport {
        let n = self.scenario.party_count();
        let mut violations = Vec::new();
        if n < 2 {
            return NoSignallingReport { violations };
        }
        for mask in 1..(1u64 << n) - 1 {
            let keep: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
            let others: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 0).collect();
            let sub = self.scenario.restrict(&keep);
            let other_scenario = self.scenario.restrict(&others);
            let sub_outs = sub.output_tuple_count();
            let marginals: Vec<Vec<Rational>> = (0..other_scenario.input_tuple_count())
                .map(|c| {
                    let cx = other_scenario.input_tuple(c);
                    self.marginal_table(&keep, &others, &cx, &sub)
                })
                .collect();
            let reference = &marginals[0];
            for (c, m) in marginals.iter().enumerate().skip(1) {
                for si in 0..sub.input_tuple_count() {
                    let range = si * sub_outs..(si + 1) * sub_outs;
                    let diffs: Vec<Rational> = m[range.clone()]
                        .iter()
                        .zip(&reference[range])
                        .map(|(a, b)| a - b)
                        .collect();
                    let discrepancy = crate::rational::max_abs(&diffs);
                    if !discrepancy.is_zero() {
                        violations.push(SignallingViolation {
                            parties: keep.clone(),
                            party_inputs: sub.input_tuple(si),
                            reference_inputs: other_scenario.input_tuple(0),
                            differing_inputs: other_scenario.input_tuple(c),
                            discrepancy,
                        });
                    }
                }
            }
        }
        NoSignallingReport { violations }
    }
}

/// A marginal that changes with the inputs of the parties outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignallingViolation {
    /// Parties whose joint marginal moves.
    pub parties: Vec<usize>,
    /// Inputs of those parties.
    pub party_inputs: Vec<usize>,
    /// Complement inputs the marginal is compared against (all zero).
    pub reference_inputs: Vec<usize>,
    /// Complement inputs at which the marginal differs.
    pub differing_inputs: Vec<usize>,
    /// Largest absolute cell difference between the two marginals.
    pub discrepancy: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoSignallingReport {
    pub violations: Vec<SignallingViolation>,
}

impl NoSignallingReport {
    pub fn is_no_signalling(&self) -> bool {
        self.violations.is_empty()
    }
}
