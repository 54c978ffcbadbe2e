//! Correlators, Bell functionals and exact local-polytope membership.
//!
//! Output bit `o` maps to the sign `(-1)^o` everywhere in this module.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::behavior::{decode, Behavior, Scenario};
use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus, Relation};
use crate::rational::{int, Rational};

/// Upper limit on the number of deterministic strategies enumerated.
pub const MAX_DETERMINISTIC_STRATEGIES: u128 = 10_000_000;

/// One output per input per party: `strategy[p][x]`.
pub type LocalStrategy = Vec<Vec<usize>>;

/// Linear functional `Σ coefficient(x, a) · P(a | x)` on behaviors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<Rational>,
}

impl BellFunctional {
    pub fn new(scenario: Scenario, coefficients: Vec<Rational>) -> Result<Self> {
        if coefficients.len() != scenario.cell_count() {
            return Err(Error::domain(format!(
                "{} coefficients for {} cells",
                coefficients.len(),
                scenario.cell_count()
            )));
        }
        Ok(BellFunctional {
            scenario,
            coefficients,
        })
    }

    pub fn zero(scenario: Scenario) -> Self {
        let coefficients = vec![Rational::zero(); scenario.cell_count()];
        BellFunctional {
            scenario,
            coefficients,
        }
    }

    /// `Σ_x weight[x] · E(x)` for a binary-output scenario, where `weights`
    /// is indexed by flattened input tuple.
    pub fn from_correlators(scenario: Scenario, weights: &[Rational]) -> Result<Self> {
        require_binary_outputs(&scenario)?;
        if weights.len() != scenario.input_tuple_count() {
            return Err(Error::domain("one correlator weight per input tuple"));
        }
        let outs = scenario.output_tuple_count();
        let coefficients = (0..scenario.cell_count())
            .map(|cell| {
                let w = &weights[cell / outs];
                if parity(&scenario.output_tuple(cell % outs)) {
                    -w.clone()
                } else {
                    w.clone()
                }
            })
            .collect();
        BellFunctional::new(scenario, coefficients)
    }

    /// `E(0,0) + E(0,1) + E(1,0) - E(1,1)`.
    pub fn chsh() -> Self {
        BellFunctional::from_correlators(Scenario::binary(2), &[int(1), int(1), int(1), int(-1)])
            .expect("CHSH scenario")
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn value(&self, behavior: &Behavior) -> Result<Rational> {
        if *behavior.scenario() != self.scenario {
            return Err(Error::domain("functional and behavior scenarios differ"));
        }
        Ok(self
            .coefficients
            .iter()
            .zip(behavior.table())
            .filter(|(c, p)| !c.is_zero() && !p.is_zero())
            .map(|(c, p)| c * p)
            .sum())
    }

    /// Value on a deterministic strategy without materializing its table.
    fn value_on(&self, strategy: &[Vec<usize>]) -> Rational {
        let s = &self.scenario;
        let outs = s.output_tuple_count();
        let mut total = Rational::zero();
        let mut answers = vec![0; s.party_count()];
        for i in 0..s.input_tuple_count() {
            for (p, x) in s.input_tuple(i).into_iter().enumerate() {
                answers[p] = strategy[p][x];
            }
            let o = s.output_index(&answers).expect("strategy answers in range");
            total += &self.coefficients[i * outs + o];
        }
        total
    }
}

fn parity(bits: &[usize]) -> bool {
    bits.iter().fold(0, |acc, b| acc ^ (b & 1)) == 1
}

fn require_binary_outputs(scenario: &Scenario) -> Result<()> {
    if scenario.outputs().iter().any(|&o| o != 2) {
        return Err(Error::domain(
            "correlators need binary outputs for every party",
        ));
    }
    Ok(())
}

/// `E(x) = Σ_a P(a|x) · Π_p (-1)^{a_p}`.
pub fn correlator(behavior: &Behavior, inputs: &[usize]) -> Result<Rational> {
    let s = behavior.scenario();
    require_binary_outputs(s)?;
    let row = behavior.row(inputs)?;
    Ok(row
        .iter()
        .enumerate()
        .map(|(o, p)| {
            if parity(&s.output_tuple(o)) {
                -p.clone()
            } else {
                p.clone()
            }
        })
        .sum())
}

pub fn chsh(behavior: &Behavior) -> Result<Rational> {
    if *behavior.scenario() != Scenario::binary(2) {
        return Err(Error::domain(
            "CHSH needs two parties with binary inputs and outputs",
        ));
    }
    let e = |x, y| correlator(behavior, &[x, y]);
    Ok(e(0, 0)? + e(0, 1)? + e(1, 0)? - e(1, 1)?)
}

/// Digits of a strategy index: party-major, then input, first most
/// significant.
fn strategy_radices(scenario: &Scenario) -> Vec<usize> {
    scenario
        .inputs()
        .iter()
        .zip(scenario.outputs())
        .flat_map(|(&i, &o)| std::iter::repeat_n(o, i))
        .collect()
}

pub fn deterministic_strategy_count(scenario: &Scenario) -> u128 {
    scenario
        .inputs()
        .iter()
        .zip(scenario.outputs())
        .map(|(&i, &o)| (o as u128).saturating_pow(i as u32))
        .fold(1u128, u128::saturating_mul)
}

fn check_capacity(scenario: &Scenario) -> Result<usize> {
    let count = deterministic_strategy_count(scenario);
    if count > MAX_DETERMINISTIC_STRATEGIES {
        return Err(Error::Capacity {
            required: count,
            limit: MAX_DETERMINISTIC_STRATEGIES,
        });
    }
    Ok(count as usize)
}

/// Strategy with the given enumeration index.
pub fn deterministic_strategy(scenario: &Scenario, index: usize) -> LocalStrategy {
    let digits = decode(&strategy_radices(scenario), index);
    let mut rest = digits.as_slice();
    scenario
        .inputs()
        .iter()
        .map(|&i| {
            let (head, tail) = rest.split_at(i);
            rest = tail;
            head.to_vec()
        })
        .collect()
}

/// All deterministic strategies of the scenario, in enumeration order.
pub fn deterministic_strategies(scenario: &Scenario) -> Result<Vec<LocalStrategy>> {
    let count = check_capacity(scenario)?;
    Ok((0..count)
        .map(|k| deterministic_strategy(scenario, k))
        .collect())
}

/// Maximum of `f` over the scenario's deterministic strategies, with the
/// first strategy (in enumeration order) attaining it.
pub fn local_max_with_strategy(f: &BellFunctional) -> Result<(Rational, LocalStrategy)> {
    let count = check_capacity(&f.scenario)?;
    let (best, index) = (0..count)
        .into_par_iter()
        .map(|k| (f.value_on(&deterministic_strategy(&f.scenario, k)), k))
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one strategy");
    Ok((best, deterministic_strategy(&f.scenario, index)))
}

pub fn local_max(f: &BellFunctional) -> Result<Rational> {
    local_max_with_strategy(f).map(|(v, _)| v)
}

/// Outcome of the local-polytope membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalityCertificate {
    /// Convex decomposition over deterministic strategies (positive
    /// weights only).
    Local {
        decomposition: Vec<(LocalStrategy, Rational)>,
    },
    /// A functional whose value on the behavior exceeds its local bound.
    Nonlocal {
        functional: BellFunctional,
        local_bound: Rational,
        value: Rational,
    },
}

impl LocalityCertificate {
    pub fn is_local(&self) -> bool {
        matches!(self, LocalityCertificate::Local { .. })
    }

    /// Re-checks the certificate against `behavior` from scratch.
    pub fn verify(&self, behavior: &Behavior) -> Result<()> {
        match self {
            LocalityCertificate::Local { decomposition } => {
                let scenario = behavior.scenario().clone();
                let (parts, weights): (Vec<Behavior>, Vec<Rational>) = decomposition
                    .iter()
                    .map(|(s, w)| Ok((Behavior::deterministic(scenario.clone(), s)?, w.clone())))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .unzip();
                let remixed = Behavior::mix(&parts, &weights)
                    .map_err(|e| Error::Verification(format!("bad decomposition: {e}")))?;
                if remixed != *behavior {
                    return Err(Error::Verification(
                        "decomposition does not reproduce the behavior".into(),
                    ));
                }
            }
            LocalityCertificate::Nonlocal {
                functional,
                local_bound,
                value,
            } => {
                let bound = local_max(functional)?;
                let actual = functional.value(behavior)?;
                if bound != *local_bound || actual != *value || actual <= bound {
                    return Err(Error::Verification(format!(
                        "functional value {actual} does not exceed local bound {bound}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Decides membership in the local polytope with an exact LP over the
/// weights of every deterministic strategy.
pub fn is_local(behavior: &Behavior) -> Result<LocalityCertificate> {
    let scenario = behavior.scenario();
    let strategies = deterministic_strategies(scenario)?;
    let vertices: Vec<Behavior> = strategies
        .iter()
        .map(|s| Behavior::deterministic(scenario.clone(), s))
        .collect::<Result<_>>()?;

    let mut problem = LpProblem::new(strategies.len());
    for (cell, target) in behavior.table().iter().enumerate() {
        let row = vertices.iter().map(|v| v.table()[cell].clone()).collect();
        problem.add_constraint(row, Relation::Eq, target.clone())?;
    }
    let solution = lp::solve(&problem)?;
    lp::verify(&problem, &solution)?;

    let certificate = match solution.status {
        LpStatus::Optimal => {
            let point = solution.point.expect("optimal point");
            let decomposition = strategies
                .into_iter()
                .zip(point)
                .filter(|(_, w)| w.is_positive())
                .collect();
            LocalityCertificate::Local { decomposition }
        }
        LpStatus::Infeasible => {
            // Farkas multipliers w satisfy w·D >= 0 on every vertex and
            // w·P < 0, so -w separates P from the polytope.
            let farkas = solution.farkas.expect("Farkas vector");
            let scale = crate::rational::max_abs(&farkas);
            let coefficients = farkas.iter().map(|w| -(w / &scale)).collect();
            let functional = BellFunctional::new(scenario.clone(), coefficients)?;
            let local_bound = local_max(&functional)?;
            let value = functional.value(behavior)?;
            LocalityCertificate::Nonlocal {
                functional,
                local_bound,
                value,
            }
        }
        LpStatus::Unbounded => {
            return Err(Error::Verification(
                "membership LP has a zero objective and cannot be unbounded".into(),
            ))
        }
    };
    certificate.verify(behavior)?;
    Ok(certificate)
}
