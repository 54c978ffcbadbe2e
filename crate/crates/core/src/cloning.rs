//! Cloning a PR-box port and the monogamy of CHSH violation.
//!
//! Parties are ordered Alice, Bob, Bob′ with inputs `(x, y, y′)` and
//! outputs `(a, b, b′)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus, Relation};
use crate::rational::{rat, Rational};

/// `a` uniform, `b = a + xy`, `b′ = a + xy′`: Bob's port duplicated.
pub fn perfect_clone_composite() -> Behavior {
    Behavior::from_fn(Scenario::binary(3), |x, o| {
        let (a, b, b2) = (o[0], o[1], o[2]);
        if b == a ^ (x[0] & x[1]) && b2 == a ^ (x[0] & x[2]) {
            rat(1, 2)
        } else {
            Rational::zero()
        }
    })
    .expect("clone composite is normalized")
}

/// Which constraints the tripartite extension LP includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonogamyProblem {
    /// Require the (Alice, Bob′) marginal to be isotropic at the same
    /// visibility as (Alice, Bob).
    pub clone_marginal: bool,
    /// Require `P(a,b,b′|x,y,y′) = P(a,b′,b|x,y′,y)`.
    pub swap_symmetric: bool,
}

impl Default for MonogamyProblem {
    fn default() -> Self {
        MonogamyProblem {
            clone_marginal: true,
            swap_symmetric: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonogamyResult {
    pub v_star: Rational,
    /// Optimal tripartite behavior.
    pub certificate: Behavior,
}

const CELLS: usize = 64;
const VISIBILITY: usize = CELLS;

fn cell(scenario: &Scenario, x: &[usize], o: &[usize]) -> usize {
    scenario.input_index(x).expect("binary inputs") * scenario.output_tuple_count()
        + scenario.output_index(o).expect("binary outputs")
}

/// `1/2·[a+b = xy] - 1/4`: the visibility coefficient of an isotropic cell.
fn isotropic_slope(a: usize, b: usize, x: usize, y: usize) -> Rational {
    let hit = if (a ^ b) == (x & y) {
        rat(1, 2)
    } else {
        Rational::zero()
    };
    hit - rat(1, 4)
}

impl MonogamyProblem {
    /// One variable per tripartite cell plus the visibility, maximizing the
    /// visibility.
    pub fn build(&self) -> Result<LpProblem> {
        let s = Scenario::binary(3);
        let mut problem = LpProblem::new(CELLS + 1);
        let mut objective = vec![Rational::zero(); CELLS + 1];
        objective[VISIBILITY] = Rational::one();
        problem.set_objective(objective)?;

        for i in 0..s.input_tuple_count() {
            problem.add_sparse(
                (0..8).map(|o| (i * 8 + o, Rational::one())),
                Relation::Eq,
                Rational::one(),
            )?;
        }

        for row in no_signalling_rows(&s) {
            problem.add_sparse(row, Relation::Eq, Rational::zero())?;
        }

        // Bipartite marginal on (Alice, port) equals the isotropic box at
        // visibility V, at every input of the remaining port.
        let mut ports = vec![1];
        if self.clone_marginal {
            ports.push(2);
        }
        for &port in &ports {
            let other = 3 - port;
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        for a in 0..2 {
                            for b in 0..2 {
                                let mut terms = Vec::with_capacity(3);
                                for c in 0..2 {
                                    let mut inputs = [x, 0, 0];
                                    let mut outputs = [a, 0, 0];
                                    inputs[port] = y;
                                    inputs[other] = z;
                                    outputs[port] = b;
                                    outputs[other] = c;
                                    terms.push((cell(&s, &inputs, &outputs), Rational::one()));
                                }
                                terms.push((VISIBILITY, -isotropic_slope(a, b, x, y)));
                                problem.add_sparse(terms, Relation::Eq, rat(1, 4))?;
                            }
                        }
                    }
                }
            }
        }

        if self.swap_symmetric {
            for i in 0..8 {
                let x = s.input_tuple(i);
                for o in 0..8 {
                    let a = s.output_tuple(o);
                    let here = cell(&s, &x, &a);
                    let there = cell(&s, &[x[0], x[2], x[1]], &[a[0], a[2], a[1]]);
                    if here < there {
                        problem.add_sparse(
                            [(here, Rational::one()), (there, -Rational::one())],
                            Relation::Eq,
                            Rational::zero(),
                        )?;
                    }
                }
            }
        }
        Ok(problem)
    }

    pub fn solve(&self) -> Result<MonogamyResult> {
        let problem = self.build()?;
        let solution = lp::solve(&problem)?;
        lp::verify(&problem, &solution)?;
        if solution.status != LpStatus::Optimal {
            return Err(Error::Verification(format!(
                "monogamy LP ended {:?}",
                solution.status
            )));
        }
        let mut point = solution.point.expect("optimal point");
        let v_star = point.pop().expect("visibility variable");
        let certificate = Behavior::from_table(Scenario::binary(3), point)?;
        let result = MonogamyResult {
            v_star,
            certificate,
        };
        result.verify(self)?;
        Ok(result)
    }
}

impl MonogamyResult {
    /// Re-checks no-signalling and the marginal constraints on the
    /// certificate behavior.
    pub fn verify(&self, problem: &MonogamyProblem) -> Result<()> {
        let report = self.certificate.check_no_signalling();
        if !report.is_no_signalling() {
            return Err(Error::Verification(format!(
                "certificate signals: {} violations",
                report.violations.len()
            )));
        }
        let target = Behavior::isotropic(&self.v_star)?;
        let mut ports = vec![1];
        if problem.clone_marginal {
            ports.push(2);
        }
        for port in ports {
            let keep = [0, port];
            for z in 0..2 {
                if self.certificate.marginal(&keep, &[z])? != target {
                    return Err(Error::Verification(format!(
                        "marginal on (0, {port}) is not isotropic at {}",
                        self.v_star
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Largest isotropic visibility shared by both (Alice, Bob) and
/// (Alice, Bob′) marginals of a no-signalling tripartite box.
pub fn max_symmetric_isotropic_extension() -> Result<MonogamyResult> {
    MonogamyProblem::default().solve()
}

/// Equalities `marginal_S(·|x_S; c) - marginal_S(·|x_S; c₀) = 0` for every
/// proper nonempty subset `S`, complement input `c ≠ c₀ = 0`, and cell of
/// `S`.
fn no_signalling_rows(s: &Scenario) -> Vec<Vec<(usize, Rational)>> {
    let n = s.party_count();
    let outs = s.output_tuple_count();
    let mut rows = Vec::new();
    for mask in 1..(1usize << n) - 1 {
        let keep: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
        let others: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 0).collect();
        let sub = s.restrict(&keep);
        let rest = s.restrict(&others);
        for si in 0..sub.input_tuple_count() {
            let sx = sub.input_tuple(si);
            for so in 0..sub.output_tuple_count() {
                let sa = sub.output_tuple(so);
                let marginal_terms = |c: usize, sign: Rational| {
                    let cx = rest.input_tuple(c);
                    let mut x = vec![0; n];
                    for (&p, &v) in keep.iter().zip(&sx) {
                        x[p] = v;
                    }
                    for (&p, &v) in others.iter().zip(&cx) {
                        x[p] = v;
                    }
                    let base = s.input_index(&x).expect("valid inputs") * outs;
                    (0..outs)
                        .filter(|&o| {
                            let a = s.output_tuple(o);
                            keep.iter().zip(&sa).all(|(&p, &v)| a[p] == v)
                        })
                        .map(|o| (base + o, sign.clone()))
                        .collect::<Vec<_>>()
                };
                for c in 1..rest.input_tuple_count() {
                    let mut row = marginal_terms(c, Rational::one());
                    row.extend(marginal_terms(0, -Rational::one()));
                    rows.push(row);
                }
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::chsh;
    use crate::rational::int;

    #[test]
    fn clone_marginals_are_pr_boxes() {
        let clone = perfect_clone_composite();
        for z in 0..2 {
            assert_eq!(clone.marginal(&[0, 1], &[z]).unwrap(), Behavior::pr_box());
            assert_eq!(clone.marginal(&[0, 2], &[z]).unwrap(), Behavior::pr_box());
        }
    }

    #[test]
    fn clone_signals_through_bob_pair() {
        let clone = perfect_clone_composite();
        let report = clone.check_no_signalling();
        assert!(!report.is_no_signalling());
        assert!(report.violations.iter().any(|v| v.parties == vec![1, 2]
            && v.party_inputs == vec![0, 1]
            && v.differing_inputs == vec![1]));
        // Single ports and Alice's marginals do not signal.
        assert!(report.violations.iter().all(|v| v.parties == vec![1, 2]));
    }

    #[test]
    fn clone_decodes_alice_input() {
        let clone = perfect_clone_composite();
        for x in 0..2 {
            let row = clone.row(&[x, 0, 1]).unwrap();
            for (o, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    let out = Scenario::binary(3).output_tuple(o);
                    assert_eq!(out[1] ^ out[2], x);
                }
            }
        }
    }

    #[test]
    fn no_signalling_rows_accept_pr_products() {
        let s = Scenario::binary(3);
        let b = Behavior::pr_box().product(&Behavior::uniform(Scenario::binary(1)));
        for row in no_signalling_rows(&s) {
            let total: Rational = row.iter().map(|(i, c)| c * &b.table()[*i]).sum();
            assert!(total.is_zero());
        }
        let clone = perfect_clone_composite();
        assert!(no_signalling_rows(&s).iter().any(|row| {
            !row.iter()
                .map(|(i, c)| c * &clone.table()[*i])
                .sum::<Rational>()
                .is_zero()
        }));
    }

    #[test]
    fn monogamy_optimum_is_half() {
        let r = max_symmetric_isotropic_extension().unwrap();
        assert_eq!(r.v_star, rat(1, 2));
        let ab = r.certificate.marginal(&[0, 1], &[0]).unwrap();
        assert_eq!(chsh(&ab).unwrap(), int(2));
    }

    #[test]
    fn unconstrained_clone_reaches_one() {
        let r = MonogamyProblem {
            clone_marginal: false,
            swap_symmetric: false,
        }
        .solve()
        .unwrap();
        assert_eq!(r.v_star, int(1));
    }

    #[test]
    fn symmetric_extension_still_half() {
        let r = MonogamyProblem {
            clone_marginal: true,
            swap_symmetric: true,
        }
        .solve()
        .unwrap();
        assert_eq!(r.v_star, rat(1, 2));
        let t = r.certificate.table();
        let s = Scenario::binary(3);
        for i in 0..8 {
            let x = s.input_tuple(i);
            for o in 0..8 {
                let a = s.output_tuple(o);
                assert_eq!(
                    t[cell(&s, &x, &a)],
                    t[cell(&s, &[x[0], x[2], x[1]], &[a[0], a[2], a[1]])]
                );
            }
        }
    }
}
