//! Parity-constraint correlations over binary-input, binary-output parties.
//!
//! A [`ParityConstraint`] requires that the outputs of some parties, at
//! fixed inputs, sum to a target bit mod 2 with certainty. Parties outside
//! the constraint may receive either input.
//!
//! Three tools live here:
//!
//! * [`check_lhv_impossible`] enumerates every deterministic local
//!   strategy. Perfect constraints hold for a mixture only if they hold
//!   for every strategy in its support, so deterministic enumeration
//!   decides whether shared randomness suffices.
//! * [`simulate_ghz_with_prbox`] reproduces the GHZ parities with shared
//!   randomness plus one PR-box between Alice and Bob.
//! * [`search_wirings`] exhausts the class of non-adaptive single-round
//!   wirings over pairwise single-use PR-boxes: for each external input a
//!   party either uses no box or queries one of its incident boxes with a
//!   fixed input bit, and outputs a shared-randomness bit XOR the box
//!   output. The class is complete for that restriction only; adaptive
//!   multi-box protocols are not covered.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::{Port, PrBox};

/// Upper limit on strategies enumerated by either search.
pub const MAX_STRATEGIES: u64 = 100_000_000;

pub const ALICE: usize = 0;
pub const BOB: usize = 1;
pub const CHARLIE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityConstraint {
    /// `(party, input)` pairs, parties distinct.
    terms: Vec<(usize, u8)>,
    parity: u8,
}

impl ParityConstraint {
    pub fn new(mut terms: Vec<(usize, u8)>, parity: u8) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("a parity constraint needs participants"));
        }
        terms.sort();
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::domain("each party may appear once per constraint"));
        }
        if parity > 1 || terms.iter().any(|&(_, x)| x > 1) {
            return Err(Error::domain("inputs and parity must be bits"));
        }
        Ok(ParityConstraint { terms, parity })
    }

    pub fn terms(&self) -> &[(usize, u8)] {
        &self.terms
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    fn max_party(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    fn involves(&self, party: usize) -> bool {
        self.terms.iter().any(|t| t.0 == party)
    }

    /// Holds for the deterministic answers `outputs[p][x]`.
    fn holds_for(&self, outputs: &[[u8; 2]]) -> bool {
        self.terms
            .iter()
            .fold(0, |acc, &(p, x)| acc ^ outputs[p][x as usize])
            == self.parity
    }
}

fn pc(terms: &[(usize, u8)], parity: u8) -> ParityConstraint {
    ParityConstraint::new(terms.to_vec(), parity).expect("static constraint")
}

/// `a0+b0+c1 = 0`, `a0+b1+c0 = 0`, `a1+b0+c0 = 0`, `a1+b1+c1 = 1`.
pub fn ghz_constraints() -> Vec<ParityConstraint> {
    vec![
        pc(&[(ALICE, 0), (BOB, 0), (CHARLIE, 1)], 0),
        pc(&[(ALICE, 0), (BOB, 1), (CHARLIE, 0)], 0),
        pc(&[(ALICE, 1), (BOB, 0), (CHARLIE, 0)], 0),
        pc(&[(ALICE, 1), (BOB, 1), (CHARLIE, 1)], 1),
    ]
}

/// `a0+b1 = 0`, `b0+c1 = 0`, `c0+a1 = 0`, `a0+b0+c0 = 0`, `a1+b1+c1 = 1`.
pub fn corr3_constraints() -> Vec<ParityConstraint> {
    vec![
        pc(&[(ALICE, 0), (BOB, 1)], 0),
        pc(&[(BOB, 0), (CHARLIE, 1)], 0),
        pc(&[(CHARLIE, 0), (ALICE, 1)], 0),
        pc(&[(ALICE, 0), (BOB, 0), (CHARLIE, 0)], 0),
        pc(&[(ALICE, 1), (BOB, 1), (CHARLIE, 1)], 1),
    ]
}

fn check_parties(constraints: &[ParityConstraint], parties: usize) -> Result<()> {
    if parties == 0 {
        return Err(Error::domain("at least one party is required"));
    }
    if let Some(c) = constraints.iter().find(|c| c.max_party() >= parties) {
        return Err(Error::domain(format!(
            "constraint mentions party {} of {parties}",
            c.max_party()
        )));
    }
    Ok(())
}

fn table_from_index(parties: usize, index: u64) -> Vec<[u8; 2]> {
    (0..parties)
        .map(|p| {
            let shift = 2 * (parties - 1 - p);
            let bits = (index >> shift) & 0b11;
            [(bits >> 1) as u8, (bits & 1) as u8]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LhvReport {
    pub parties: usize,
    /// `4^parties`.
    pub strategies_checked: u64,
    pub satisfying_count: u64,
    /// First satisfying table in enumeration order: `witness[p][x]`.
    pub witness: Option<Vec<[u8; 2]>>,
}

impl LhvReport {
    pub fn is_impossible(&self) -> bool {
        self.witness.is_none()
    }
}

/// Enumerates all `4^parties` deterministic strategies. Party 0's answer
/// to input 0 is the most significant bit of the enumeration index.
pub fn check_lhv_impossible(constraints: &[ParityConstraint], parties: usize) -> Result<LhvReport> {
    check_parties(constraints, parties)?;
    let count = 4u64
        .checked_pow(parties as u32)
        .filter(|&c| c <= MAX_STRATEGIES)
        .ok_or(Error::Capacity {
            required: 4u128.saturating_pow(parties as u32),
            limit: MAX_STRATEGIES as u128,
        })?;
    let mut satisfying_count = 0;
    let mut witness = None;
    for index in 0..count {
        let table = table_from_index(parties, index);
        if constraints.iter().all(|c| c.holds_for(&table)) {
            satisfying_count += 1;
            witness.get_or_insert(table);
        }
    }
    Ok(LhvReport {
        parties,
        strategies_checked: count,
        satisfying_count,
        witness,
    })
}

/// Shared random bits `α_x`, `β_y`, `γ_z` for three parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SharedRandomnessTable {
    pub alpha: [u8; 2],
    pub beta: [u8; 2],
    pub gamma: [u8; 2],
}

impl SharedRandomnessTable {
    /// All 64 tables in enumeration order.
    pub fn all() -> Vec<Self> {
        (0..64)
            .map(|i| {
                let t = table_from_index(3, i);
                SharedRandomnessTable {
                    alpha: t[0],
                    beta: t[1],
                    gamma: t[2],
                }
            })
            .collect()
    }

    fn as_rows(&self) -> [[u8; 2]; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// Satisfies the first three GHZ parities.
    pub fn fits_ghz_premise(&self) -> bool {
        ghz_constraints()[..3]
            .iter()
            .all(|c| c.holds_for(&self.as_rows()))
    }
}

/// Alice and Bob feed `(x, y)` into one PR-box and add its outputs to their
/// shared bits; Charlie answers `γ_z`. Then
/// `a_x + b_y + c_z = α_x + β_y + γ_z + xy`.
pub fn simulate_ghz_with_box(
    x: u8,
    y: u8,
    z: u8,
    table: &SharedRandomnessTable,
    pr: &mut PrBox,
) -> Result<(u8, u8, u8)> {
    if x > 1 || y > 1 || z > 1 {
        return Err(Error::domain("inputs must be bits"));
    }
    if !table.fits_ghz_premise() {
        return Err(Error::domain(
            "shared randomness must satisfy the first three GHZ parities",
        ));
    }
    let a = pr.query(Port::Alice, x)?;
    let b = pr.query(Port::Bob, y)?;
    Ok((
        table.alpha[x as usize] ^ a,
        table.beta[y as usize] ^ b,
        table.gamma[z as usize],
    ))
}

pub fn simulate_ghz_with_prbox(
    x: u8,
    y: u8,
    z: u8,
    table: &SharedRandomnessTable,
    seed: u64,
) -> Result<(u8, u8, u8)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_ghz_with_box(x, y, z, table, &mut PrBox::random(&mut rng))
}

/// What a party does with one external input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxUse {
    NoBox,
    /// Query box `pair` (index into the box list) with `input`.
    Query {
        pair: usize,
        input: u8,
    },
}

/// One member of the searched class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WiringStrategy {
    /// `uses[p][x]`.
    pub uses: Vec<[BoxUse; 2]>,
    /// Shared-randomness bit `table[p][x]` XORed into the output.
    pub table: Vec<[u8; 2]>,
}

impl WiringStrategy {
    /// Output of every party for external inputs `inputs` and box bits
    /// `box_bits`. For a box used at both ends, its first listed end gets
    /// the box bit and the second end gets the bit plus the product of the
    /// two box inputs; an end used alone gets the box bit.
    pub fn outputs(&self, boxes: &[(usize, usize)], inputs: &[u8], box_bits: &[u8]) -> Vec<u8> {
        (0..self.uses.len())
            .map(|p| {
                self.table[p][inputs[p] as usize] ^ self.box_output(boxes, p, inputs, box_bits)
            })
            .collect()
    }

    fn box_output(&self, boxes: &[(usize, usize)], p: usize, inputs: &[u8], box_bits: &[u8]) -> u8 {
        let BoxUse::Query { pair, input } = self.uses[p][inputs[p] as usize] else {
            return 0;
        };
        let (first, second) = boxes[pair];
        let other = if first == p { second } else { first };
        let r = box_bits[pair];
        match self.uses[other][inputs[other] as usize] {
            BoxUse::Query {
                pair: q,
                input: other_input,
            } if q == pair && p == second => r ^ (input & other_input),
            _ => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub strategy_class: String,
    pub parties: usize,
    pub boxes: Vec<(usize, usize)>,
    pub constraint_count: usize,
    /// Number of choices per party per input: `1 + 2 · incident boxes`.
    pub choices_per_input: Vec<u64>,
    /// `Π_p choices_p² · 4^parties`.
    pub total_strategies: u64,
    pub perfect_count: u64,
    /// Largest number of constraints one strategy satisfies with certainty.
    pub best_satisfied_constraints: usize,
    pub witness: Option<WiringStrategy>,
}

pub const STRATEGY_CLASS: &str = "non-adaptive single-round wirings: per party and input, no box or one incident pairwise box with a fixed input bit; output = shared bit XOR box output; each box used at most once per run";

struct SearchSpace<'a> {
    parties: usize,
    boxes: &'a [(usize, usize)],
    /// Per party, the choices available for one input.
    options: Vec<Vec<BoxUse>>,
    wiring_count: u64,
    table_count: u64,
}

impl<'a> SearchSpace<'a> {
    fn new(parties: usize, boxes: &'a [(usize, usize)]) -> Result<Self> {
        for &(a, b) in boxes {
            if a == b || a >= parties || b >= parties {
                return Err(Error::domain(format!(
                    "box ({a}, {b}) is not a pair of parties"
                )));
            }
        }
        let options: Vec<Vec<BoxUse>> = (0..parties)
            .map(|p| {
                let mut opts = vec![BoxUse::NoBox];
                for (pair, &(a, b)) in boxes.iter().enumerate() {
                    if a == p || b == p {
                        opts.push(BoxUse::Query { pair, input: 0 });
                        opts.push(BoxUse::Query { pair, input: 1 });
                    }
                }
                opts
            })
            .collect();
        let capacity = || Error::Capacity {
            required: u128::MAX,
            limit: MAX_STRATEGIES as u128,
        };
        let wiring_count = options
            .iter()
            .try_fold(1u64, |acc, o| acc.checked_mul((o.len() as u64).pow(2)))
            .ok_or_else(capacity)?;
        let table_count = 4u64.checked_pow(parties as u32).ok_or_else(capacity)?;
        let total = wiring_count.checked_mul(table_count).ok_or_else(capacity)?;
        if total > MAX_STRATEGIES {
            return Err(Error::Capacity {
                required: total as u128,
                limit: MAX_STRATEGIES as u128,
            });
        }
        Ok(SearchSpace {
            parties,
            boxes,
            options,
            wiring_count,
            table_count,
        })
    }

    /// Party 0's input-0 choice is the most significant digit.
    fn wiring(&self, mut index: u64) -> Vec<[BoxUse; 2]> {
        let mut uses = vec![[BoxUse::NoBox; 2]; self.parties];
        for p in (0..self.parties).rev() {
            let k = self.options[p].len() as u64;
            for x in (0..2).rev() {
                uses[p][x] = self.options[p][(index % k) as usize];
                index /= k;
            }
        }
        uses
    }

    fn strategy(&self, index: u64) -> WiringStrategy {
        WiringStrategy {
            uses: self.wiring(index / self.table_count),
            table: table_from_index(self.parties, index % self.table_count),
        }
    }
}

/// For one wiring and one constraint: the box contribution to the
/// constraint's parity if it is the same for every input of the other
/// parties and every box bit, else `None`.
fn constant_box_parity(
    space: &SearchSpace,
    uses: &[[BoxUse; 2]],
    constraint: &ParityConstraint,
) -> Option<u8> {
    let strategy = WiringStrategy {
        uses: uses.to_vec(),
        table: vec![[0; 2]; space.parties],
    };
    let free: Vec<usize> = (0..space.parties)
        .filter(|&p| !constraint.involves(p))
        .collect();
    let mut inputs = vec![0u8; space.parties];
    for &(p, x) in constraint.terms() {
        inputs[p] = x;
    }
    let mut seen = None;
    for free_bits in 0..1u32 << free.len() {
        for (k, &p) in free.iter().enumerate() {
            inputs[p] = (free_bits >> k & 1) as u8;
        }
        for box_bits in 0..1u32 << space.boxes.len() {
            let bits: Vec<u8> = (0..space.boxes.len())
                .map(|k| (box_bits >> k & 1) as u8)
                .collect();
            let out = strategy.outputs(space.boxes, &inputs, &bits);
            let parity = constraint
                .terms()
                .iter()
                .fold(0, |acc, &(p, _)| acc ^ out[p]);
            match seen {
                None => seen = Some(parity),
                Some(s) if s != parity => return None,
                _ => {}
            }
        }
    }
    seen
}

/// Which constraints the strategy meets with certainty, computed the same
/// way the search does.
pub fn always_satisfied(
    strategy: &WiringStrategy,
    boxes: &[(usize, usize)],
    constraints: &[ParityConstraint],
) -> Result<Vec<bool>> {
    let parties = strategy.uses.len();
    check_parties(constraints, parties)?;
    let space = SearchSpace::new(parties, boxes)?;
    Ok(constraints
        .iter()
        .map(|c| match constant_box_parity(&space, &strategy.uses, c) {
            Some(bp) => {
                let shared = c
                    .terms()
                    .iter()
                    .fold(0, |acc, &(p, x)| acc ^ strategy.table[p][x as usize]);
                shared ^ bp == c.parity()
            }
            None => false,
        })
        .collect())
}

/// Exhausts [`STRATEGY_CLASS`] for `parties` binary parties sharing the
/// listed pairwise boxes.
pub fn search_wirings(
    constraints: &[ParityConstraint],
    parties: usize,
    boxes: &[(usize, usize)],
) -> Result<SearchReport> {
    check_parties(constraints, parties)?;
    let space = SearchSpace::new(parties, boxes)?;

    #[derive(Clone, Copy)]
    struct Partial {
        perfect: u64,
        best: usize,
        first_perfect: Option<u64>,
    }

    // The shared-randomness table enters each constraint only through the
    // XOR of its bits, so per wiring we fix the box parity once and then
    // sweep every table.
    let result = (0..space.wiring_count)
        .into_par_iter()
        .map(|w| {
            let uses = space.wiring(w);
            let box_parity: Vec<Option<u8>> = constraints
                .iter()
                .map(|c| constant_box_parity(&space, &uses, c))
                .collect();
            let mut part = Partial {
                perfect: 0,
                best: 0,
                first_perfect: None,
            };
            for t in 0..space.table_count {
                let table = table_from_index(parties, t);
                let satisfied = constraints
                    .iter()
                    .zip(&box_parity)
                    .filter(|(c, bp)| match bp {
                        Some(bp) => {
                            let shared = c
                                .terms()
                                .iter()
                                .fold(0, |acc, &(p, x)| acc ^ table[p][x as usize]);
                            shared ^ bp == c.parity()
                        }
                        None => false,
                    })
                    .count();
                part.best = part.best.max(satisfied);
                if satisfied == constraints.len() {
                    part.perfect += 1;
                    part.first_perfect.get_or_insert(w * space.table_count + t);
                }
            }
            part
        })
        .reduce(
            || Partial {
                perfect: 0,
                best: 0,
                first_perfect: None,
            },
            |a, b| Partial {
                perfect: a.perfect + b.perfect,
                best: a.best.max(b.best),
                first_perfect: match (a.first_perfect, b.first_perfect) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                },
            },
        );

    Ok(SearchReport {
        strategy_class: STRATEGY_CLASS.to_string(),
        parties,
        boxes: boxes.to_vec(),
        constraint_count: constraints.len(),
        choices_per_input: space.options.iter().map(|o| o.len() as u64).collect(),
        total_strategies: space.wiring_count * space.table_count,
        perfect_count: result.perfect,
        best_satisfied_constraints: result.best,
        witness: result.first_perfect.map(|i| space.strategy(i)),
    })
}

/// Boxes `PR_AB`, `PR_BC`, `PR_CA`.
pub fn pairwise_boxes() -> Vec<(usize, usize)> {
    vec![(ALICE, BOB), (BOB, CHARLIE), (CHARLIE, ALICE)]
}

/// Exhaustive search for a pairwise-box wiring reproducing the corr3
/// parities.
pub fn search_corr3_strategies() -> Result<SearchReport> {
    search_wirings(&corr3_constraints(), 3, &pairwise_boxes())
}

/// Runs a strategy with real single-use boxes, querying in party order,
/// and reports which constraints held in every run. Independent of the
/// analytic evaluator used by the search.
pub fn satisfied_by_simulation(
    strategy: &WiringStrategy,
    boxes: &[(usize, usize)],
    constraints: &[ParityConstraint],
) -> Result<Vec<bool>> {
    let parties = strategy.uses.len();
    let mut ok = vec![true; constraints.len()];
    for inputs_bits in 0..1u32 << parties {
        let inputs: Vec<u8> = (0..parties).map(|p| (inputs_bits >> p & 1) as u8).collect();
        for box_bits in 0..1u32 << boxes.len() {
            let mut prs: Vec<PrBox> = (0..boxes.len())
                .map(|k| PrBox::with_bit((box_bits >> k & 1) as u8))
                .collect();
            let mut outputs = vec![0u8; parties];
            for p in 0..parties {
                let x = inputs[p] as usize;
                let box_out = match strategy.uses[p][x] {
                    BoxUse::NoBox => 0,
                    BoxUse::Query { pair, input } => {
                        let (first, second) = boxes[pair];
                        let port = if p == first {
                            Port::Alice
                        } else if p == second {
                            Port::Bob
                        } else {
                            return Err(Error::domain(format!(
                                "party {p} is not an end of box {pair}"
                            )));
                        };
                        prs[pair].query(port, input)?
                    }
                };
                outputs[p] = strategy.table[p][x] ^ box_out;
            }
            for (k, c) in constraints.iter().enumerate() {
                let applies = c.terms().iter().all(|&(p, x)| inputs[p] == x);
                let parity = c.terms().iter().fold(0, |acc, &(p, _)| acc ^ outputs[p]);
                if applies && parity != c.parity() {
                    ok[k] = false;
                }
            }
        }
    }
    Ok(ok)
}
