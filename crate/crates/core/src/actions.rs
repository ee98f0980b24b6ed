//! Counter actions: atomic tokens, valuation of B-action sequences, and the seven-element
//! stabilization semigroup of S-actions.

use std::fmt;

use crate::cost::CostValue;
use crate::error::{Error, Result};

/// Atomic counter action. B automata use `E`, `Ic`, `R`; S automata use `E`, `I`, `R`, `Cr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Act {
    E,
    Ic,
    I,
    R,
    Cr,
}

impl Act {
    pub fn token(self) -> &'static str {
        match self {
            Act::E => "e",
            Act::Ic => "ic",
            Act::I => "i",
            Act::R => "r",
            Act::Cr => "cr",
        }
    }

    pub fn parse(token: &str) -> Result<Act> {
        Ok(match token {
            "e" => Act::E,
            "ic" => Act::Ic,
            "i" => Act::I,
            "r" => Act::R,
            "cr" => Act::Cr,
            t => return Err(Error::Domain(format!("unknown action token {t:?}"))),
        })
    }

    pub fn is_b(self) -> bool {
        matches!(self, Act::E | Act::Ic | Act::R)
    }

    pub fn is_s(self) -> bool {
        matches!(self, Act::E | Act::I | Act::R | Act::Cr)
    }

    /// Rank in `e < ic < r`; `None` for S-only tokens.
    fn b_rank(self) -> Option<u8> {
        match self {
            Act::E => Some(0),
            Act::Ic => Some(1),
            Act::R => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

pub fn render_seq(seq: &[Act]) -> String {
    if seq.is_empty() {
        return "e".into();
    }
    seq.iter().map(|a| a.token()).collect::<Vec<_>>().join(" ")
}

/// Runs a B sequence on one counter from `start`: `ic` increments and records the new value,
/// `r` resets. Returns the largest recorded value (0 if none) and the final counter value.
pub fn b_seq_value(seq: &[Act], start: u64) -> (CostValue, u64) {
    let mut c = start;
    let mut best = 0;
    for a in seq {
        match a {
            Act::Ic => {
                c += 1;
                best = best.max(c);
            }
            Act::R => c = 0,
            _ => {}
        }
    }
    (CostValue::Finite(best), c)
}

/// Largest token of a B sequence under `e < ic < r`.
pub fn contract_max(seq: &[Act]) -> Act {
    seq.iter()
        .copied()
        .filter(|a| a.b_rank().is_some())
        .max_by_key(|a| a.b_rank())
        .unwrap_or(Act::E)
}

/// Element of the S-action semigroup. Variant order is the table order `ω i e r crω cr ⊥`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SElem {
    Omega,
    I,
    E,
    R,
    CrOmega,
    Cr,
    Bot,
}

pub const S_ELEMS: [SElem; 7] =
    [SElem::Omega, SElem::I, SElem::E, SElem::R, SElem::CrOmega, SElem::Cr, SElem::Bot];

use SElem::{Bot, Cr, CrOmega, Omega, E as Se, I as Si, R as Sr};

/// `PRODUCT[x][y] = x · y`.
const PRODUCT: [[SElem; 7]; 7] = [
    [Omega, Omega, Omega, Sr, Omega, Sr, Bot],
    [Omega, Si, Si, Sr, CrOmega, Cr, Bot],
    [Omega, Si, Se, Sr, CrOmega, Cr, Bot],
    [Omega, Sr, Sr, Sr, Bot, Bot, Bot],
    [CrOmega, CrOmega, CrOmega, Cr, CrOmega, Cr, Bot],
    [CrOmega, Cr, Cr, Cr, Bot, Bot, Bot],
    [Bot, Bot, Bot, Bot, Bot, Bot, Bot],
];

const SHARP: [Option<SElem>; 7] =
    [Some(Omega), Some(Omega), Some(Se), Some(Sr), Some(CrOmega), None, Some(Bot)];

/// `DOWN[y]` is the bitmask of every `x ≤ y`.
const DOWN: [u8; 7] = [
    0b000_0001,
    0b000_0011,
    0b000_0111,
    0b000_1111,
    0b001_0111,
    0b011_1111,
    0b111_1111,
];

impl SElem {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Omega => "omega",
            Si => "i",
            Se => "e",
            Sr => "r",
            CrOmega => "cromega",
            Cr => "cr",
            Bot => "bot",
        }
    }

    pub fn from_name(s: &str) -> Option<SElem> {
        S_ELEMS.iter().copied().find(|x| x.name() == s)
    }

    /// Values that make a final action fail the unboundedness test.
    pub fn is_checked_small(self) -> bool {
        matches!(self, Cr | CrOmega | Bot)
    }
}

impl fmt::Display for SElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn s_product(x: SElem, y: SElem) -> SElem {
    PRODUCT[x.index()][y.index()]
}

pub fn s_sharp(x: SElem) -> Result<SElem> {
    SHARP[x.index()]
        .ok_or_else(|| Error::Domain(format!("sharp undefined on non-idempotent {x}")))
}

pub fn s_leq(x: SElem, y: SElem) -> bool {
    DOWN[y.index()] & (1 << x.index()) != 0
}

/// Embeds an atomic S token; `None` for `ic`.
pub fn atomic_s_to_elem(a: Act) -> Option<SElem> {
    match a {
        Act::E => Some(Se),
        Act::I => Some(Si),
        Act::R => Some(Sr),
        Act::Cr => Some(Cr),
        Act::Ic => None,
    }
}

/// Product of the embedded tokens of a sequence; `e` for the empty sequence.
pub fn compose_s_seq(seq: &[Act]) -> Option<SElem> {
    seq.iter().try_fold(Se, |acc, &a| Some(s_product(acc, atomic_s_to_elem(a)?)))
}

/// One S-action per counter; componentwise operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SVec(pub Vec<SElem>);

impl SVec {
    pub fn neutral(counters: usize) -> SVec {
        SVec(vec![Se; counters])
    }

    /// `x` on counter `k`, `e` elsewhere.
    pub fn single(counters: usize, k: usize, x: SElem) -> SVec {
        let mut v = SVec::neutral(counters);
        v.0[k] = x;
        v
    }

    pub fn mul(&self, other: &SVec) -> SVec {
        SVec(self.0.iter().zip(&other.0).map(|(&x, &y)| s_product(x, y)).collect())
    }

    /// Defined iff every component is.
    pub fn sharp(&self) -> Option<SVec> {
        self.0.iter().map(|&x| SHARP[x.index()]).collect::<Option<Vec<_>>>().map(SVec)
    }

    pub fn leq(&self, other: &SVec) -> bool {
        self.0.iter().zip(&other.0).all(|(&x, &y)| s_leq(x, y))
    }

    pub fn has_bot(&self) -> bool {
        self.0.contains(&Bot)
    }

    /// No component is `cr`, `crω` or `⊥`.
    pub fn is_unchecked(&self) -> bool {
        self.0.iter().all(|x| !x.is_checked_small())
    }

    pub fn from_seqs(seqs: &[Vec<Act>]) -> Option<SVec> {
        seqs.iter().map(|s| compose_s_seq(s)).collect::<Option<Vec<_>>>().map(SVec)
    }
}

impl fmt::Display for SVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|x| x.name()).collect();
        write!(f, "({})", parts.join(","))
    }
}
