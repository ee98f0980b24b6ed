//! Extended naturals `ℕ ∪ {∞}` and sample-based comparison of cost functions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::word::Word;

/// A value in `ℕ ∪ {∞}`; the derived order puts every finite value below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostValue {
    Finite(u64),
    Infinite,
}

impl CostValue {
    pub const ZERO: CostValue = CostValue::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, CostValue::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            CostValue::Finite(n) => Some(n),
            CostValue::Infinite => None,
        }
    }

    /// Identity `∞`.
    pub fn min(self, other: CostValue) -> CostValue {
        std::cmp::min(self, other)
    }

    /// Identity `0`.
    pub fn max(self, other: CostValue) -> CostValue {
        std::cmp::max(self, other)
    }

    /// `sup ∅ = 0`.
    pub fn sup<I: IntoIterator<Item = CostValue>>(values: I) -> CostValue {
        values.into_iter().fold(CostValue::ZERO, CostValue::max)
    }

    /// `inf ∅ = ∞`.
    pub fn inf<I: IntoIterator<Item = CostValue>>(values: I) -> CostValue {
        values.into_iter().fold(CostValue::Infinite, CostValue::min)
    }

    /// Absolute difference; `None` when exactly one side is infinite.
    pub fn distance(self, other: CostValue) -> Option<u64> {
        match (self, other) {
            (CostValue::Finite(a), CostValue::Finite(b)) => Some(a.abs_diff(b)),
            (CostValue::Infinite, CostValue::Infinite) => Some(0),
            _ => None,
        }
    }
}

impl From<u64> for CostValue {
    fn from(n: u64) -> Self {
        CostValue::Finite(n)
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Finite(n) => write!(f, "{n}"),
            CostValue::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for CostValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "∞" => Ok(CostValue::Infinite),
            t => t
                .parse::<u64>()
                .map(CostValue::Finite)
                .map_err(|_| Error::Domain(format!("not a cost value: {t:?}"))),
        }
    }
}

/// `α(n) = sup { f(u) : u ∈ W, g(u) ≤ n }` for every finite `n` that `g` takes on `W`.
pub fn empirical_alpha<F, G>(f: F, g: G, sample: &[Word]) -> BTreeMap<u64, CostValue>
where
    F: Fn(&Word) -> CostValue,
    G: Fn(&Word) -> CostValue,
{
    let pairs: Vec<(u64, CostValue)> = sample
        .iter()
        .filter_map(|u| g(u).finite().map(|n| (n, f(u))))
        .collect();
    let mut table = BTreeMap::new();
    for &(n, _) in &pairs {
        table.entry(n).or_insert_with(|| {
            CostValue::sup(pairs.iter().filter(|(m, _)| *m <= n).map(|&(_, v)| v))
        });
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dominance {
    Holds,
    Counterexample(Word),
}

/// Checks `f(u) ≤ α(g(u))` on the sample, with `α(∞) = ∞`.
pub fn check_dominance_on_sample<F, G, A>(f: F, g: G, sample: &[Word], alpha: A) -> Dominance
where
    F: Fn(&Word) -> CostValue,
    G: Fn(&Word) -> CostValue,
    A: Fn(u64) -> CostValue,
{
    for u in sample {
        let bound = match g(u) {
            CostValue::Finite(n) => alpha(n),
            CostValue::Infinite => CostValue::Infinite,
        };
        if f(u) > bound {
            return Dominance::Counterexample(u.clone());
        }
    }
    Dominance::Holds
}
