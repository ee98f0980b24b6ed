#![allow(dead_code)]

use costltl::formula::negated_atom;
use costltl::{Alphabet, Formula, Node};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn ab() -> Alphabet {
    Alphabet::new("ab").unwrap()
}

/// Hand-picked formulae; at most two `U#` and five nested connectives in surface syntax.
pub const HAND_CORPUS: &[&str] = &[
    "!a U# END",
    "a U# b",
    "(b | X a | X F a) U# END",
    "(a | X a | X F a) U# END",
    "G (a U# b)",
    "F (b U# END)",
    "X (a U# (b & X b))",
    "(a U# b) U# END",
    "G a",
    "F (a & X b)",
    "a U b",
    "X X a | END",
    "(!b U# END) & (!a U# END)",
    "(!b U# END) | (!a U# END)",
    "G (b | X (a U# b))",
    "(a & X b) U# (b & X END)",
];

pub fn parse(s: &str) -> Formula {
    Formula::parse(s, &ab()).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn leaf(rng: &mut ChaCha8Rng, a: &Alphabet) -> Node {
    match rng.gen_range(0..6) {
        0 | 1 => Node::atom('a'),
        2 | 3 => Node::atom('b'),
        4 => negated_atom(if rng.gen_bool(0.5) { 'a' } else { 'b' }, a),
        _ => Node::End,
    }
}

fn node(rng: &mut ChaCha8Rng, a: &Alphabet, depth: usize, counted: &mut usize) -> Node {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, a);
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Node::and(node(rng, a, d, counted), node(rng, a, d, counted)),
        1 => Node::or(node(rng, a, d, counted), node(rng, a, d, counted)),
        2 => Node::next(node(rng, a, d, counted)),
        3 => Node::until(node(rng, a, d, counted), node(rng, a, d, counted)),
        _ if *counted < 2 => {
            *counted += 1;
            Node::until_leq(node(rng, a, d, counted), node(rng, a, d, counted))
        }
        _ => Node::or(node(rng, a, d, counted), node(rng, a, d, counted)),
    }
}

/// Pure cost formulae over `{a, b}` with at most two `U#` and at most `depth` nested
/// connectives above the literals (`a`, `b`, `!a`, `!b`, `END`).
pub fn random_formulas(seed: u64, count: usize, depth: usize) -> Vec<Formula> {
    let a = ab();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut counted = 0;
            Formula::new(node(&mut rng, &a, depth, &mut counted), &a).unwrap()
        })
        .collect()
}

/// Hand corpus plus seeded random formulae.
pub fn corpus() -> Vec<Formula> {
    let mut out: Vec<Formula> = HAND_CORPUS.iter().map(|s| parse(s)).collect();
    out.extend(random_formulas(0x5eed, 24, 4));
    out
}
