//! Protocols built from single-use PR-boxes plus one bit of communication:
//! oblivious transfer and the inner-product function.
//!
//! Only honest executions are modelled. The oblivious transfer below
//! assumes both parties trust that the box is a genuine PR-box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Alice,
    Bob,
}

impl Port {
    fn name(self) -> &'static str {
        match self {
            Port::Alice => "alice",
            Port::Bob => "bob",
        }
    }
}

/// A PR-box whose ports may each be queried once.
///
/// The first port queried returns the internal bit `r`; the second returns
/// `r + xy` where `x`, `y` are the two inputs. Either port alone is a fair
/// coin and `a + b = xy` always.
#[derive(Debug, Clone)]
pub struct PrBox {
    bit: u8,
    first_input: Option<u8>,
    used: [bool; 2],
}

impl PrBox {
    pub fn with_bit(bit: u8) -> Self {
        PrBox {
            bit: bit & 1,
            first_input: None,
            used: [false; 2],
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        PrBox::with_bit(rng.random::<bool>() as u8)
    }

    pub fn query(&mut self, port: Port, input: u8) -> Result<u8> {
        let input = check_bit("box input", input)?;
        let slot = port as usize;
        if self.used[slot] {
            return Err(Error::BoxReused { port: port.name() });
        }
        self.used[slot] = true;
        Ok(match self.first_input.replace(input) {
            None => self.bit,
            Some(other) => self.bit ^ (other & input),
        })
    }
}

fn check_bit(name: &str, v: u8) -> Result<u8> {
    if v > 1 {
        return Err(Error::domain(format!("{name} must be 0 or 1, got {v}")));
    }
    Ok(v)
}

/// Counts classical bits sent between the parties.
#[derive(Debug, Default)]
struct Channel {
    bits: u32,
}

impl Channel {
    fn send(&mut self, bit: u8) -> u8 {
        self.bits += 1;
        bit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OtTranscript {
    pub x0: u8,
    pub x1: u8,
    pub c: u8,
    /// Alice's box input, `x0 + x1`.
    pub x: u8,
    pub a: u8,
    /// The communicated bit, `a + x0`.
    pub m: u8,
    /// Bob's box input, `c`.
    pub y: u8,
    pub b: u8,
    /// `m + b`, equal to `x_c`.
    pub output: u8,
    pub bits_communicated: u32,
}

/// Oblivious transfer of `x_c` using the supplied box.
pub fn run_ot_with_box(x0: u8, x1: u8, c: u8, pr: &mut PrBox) -> Result<OtTranscript> {
    let x0 = check_bit("x0", x0)?;
    let x1 = check_bit("x1", x1)?;
    let c = check_bit("c", c)?;
    let mut channel = Channel::default();

    let x = x0 ^ x1;
    let a = pr.query(Port::Alice, x)?;
    let m = channel.send(a ^ x0);

    let y = c;
    let b = pr.query(Port::Bob, y)?;
    let output = m ^ b;

    Ok(OtTranscript {
        x0,
        x1,
        c,
        x,
        a,
        m,
        y,
        b,
        output,
        bits_communicated: channel.bits,
    })
}

pub fn run_ot(x0: u8, x1: u8, c: u8, seed: u64) -> Result<OtTranscript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_ot_with_box(x0, x1, c, &mut PrBox::random(&mut rng))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IpccTranscript {
    pub xs: Vec<u8>,
    pub ys: Vec<u8>,
    /// Box outputs `(a_k, b_k)` for each position.
    pub rounds: Vec<(u8, u8)>,
    /// Alice's parity `Σ a_k`, the only bit she sends.
    pub alice_parity: u8,
    pub bob_parity: u8,
    /// Bob's answer `A + B`.
    pub f: u8,
    pub bits_communicated: u32,
}

/// Inner product mod 2 with one fresh box per position; `boxes` supplies
/// them in order.
pub fn run_ip_cc_with_boxes(
    xs: &[u8],
    ys: &[u8],
    boxes: impl IntoIterator<Item = PrBox>,
) -> Result<IpccTranscript> {
    if xs.len() != ys.len() {
        return Err(Error::domain(format!(
            "strings have lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::domain("strings must be nonempty"));
    }
    let mut boxes = boxes.into_iter();
    let mut rounds = Vec::with_capacity(xs.len());
    for (k, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let mut pr = boxes
            .next()
            .ok_or_else(|| Error::domain(format!("no box left for position {k}")))?;
        let a = pr.query(Port::Alice, x)?;
        let b = pr.query(Port::Bob, y)?;
        rounds.push((a, b));
    }
    let alice_parity = rounds.iter().fold(0, |acc, r| acc ^ r.0);
    let bob_parity = rounds.iter().fold(0, |acc, r| acc ^ r.1);

    let mut channel = Channel::default();
    let received = channel.send(alice_parity);
    Ok(IpccTranscript {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        rounds,
        alice_parity,
        bob_parity,
        f: received ^ bob_parity,
        bits_communicated: channel.bits,
    })
}

pub fn run_ip_cc(xs: &[u8], ys: &[u8], seed: u64) -> Result<IpccTranscript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boxes: Vec<PrBox> = (0..xs.len()).map(|_| PrBox::random(&mut rng)).collect();
    run_ip_cc_with_boxes(xs, ys, boxes)
}

/// Parses `0x`-prefixed hexadecimal (four bits per digit, most significant
/// first) or a string of `0`/`1` characters.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    let text = text.trim();
    let bits: Vec<u8> = if let Some(hex) = text.strip_prefix("0x").or(text.strip_prefix("0X")) {
        hex.chars()
            .map(|c| {
                c.to_digit(16)
                    .ok_or_else(|| Error::domain(format!("bad hex digit {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flat_map(|d| (0..4).rev().map(move |i| ((d >> i) & 1) as u8))
            .collect()
    } else {
        text.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::domain(format!("bad bit {c:?}"))),
            })
            .collect::<Result<_>>()?
    };
    if bits.is_empty() {
        return Err(Error::domain("empty bit string"));
    }
    Ok(bits)
}
