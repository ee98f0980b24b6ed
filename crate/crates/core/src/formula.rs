//! Formulae of LTL≤ and its dual nLTL≤: AST, concrete syntax, subformulae, dualization.
//!
//! Only seven constructors exist. Negation, `TRUE`, `FALSE`, `F` and `G` are expanded
//! by the parser, so every consumer handles the same small grammar.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::word::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Atom(char),
    /// True exactly at the position past the last letter.
    End,
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Next(Box<Node>),
    Until(Box<Node>, Box<Node>),
    UntilLeqN(Box<Node>, Box<Node>),
    ReleaseGeqN(Box<Node>, Box<Node>),
}

impl Node {
    pub fn atom(c: char) -> Node {
        Node::Atom(c)
    }
    pub fn and(l: Node, r: Node) -> Node {
        Node::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: Node, r: Node) -> Node {
        Node::Or(Box::new(l), Box::new(r))
    }
    pub fn next(x: Node) -> Node {
        Node::Next(Box::new(x))
    }
    pub fn until(l: Node, r: Node) -> Node {
        Node::Until(Box::new(l), Box::new(r))
    }
    pub fn until_leq(l: Node, r: Node) -> Node {
        Node::UntilLeqN(Box::new(l), Box::new(r))
    }
    pub fn release_geq(l: Node, r: Node) -> Node {
        Node::ReleaseGeqN(Box::new(l), Box::new(r))
    }

    pub fn children(&self) -> Vec<&Node> {
        match self {
            Node::Atom(_) | Node::End => vec![],
            Node::Next(x) => vec![x],
            Node::And(l, r)
            | Node::Or(l, r)
            | Node::Until(l, r)
            | Node::UntilLeqN(l, r)
            | Node::ReleaseGeqN(l, r) => vec![l, r],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Node::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Node::depth).max().unwrap_or(0)
    }

    fn any(&self, pred: &dyn Fn(&Node) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_until_leq(&self) -> bool {
        self.any(&|n| matches!(n, Node::UntilLeqN(..)))
    }

    pub fn has_release_geq(&self) -> bool {
        self.any(&|n| matches!(n, Node::ReleaseGeqN(..)))
    }

    /// Neither bounded operator occurs.
    pub fn is_classical(&self) -> bool {
        !self.has_until_leq() && !self.has_release_geq()
    }

    /// Pre-order traversal, parent before children, left before right.
    pub fn preorder(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            for c in n.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }
}

/// Which bounded operator a formula uses; a formula never mixes both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Logic {
    Ltl,
    Nltl,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    root: Node,
    alphabet: Alphabet,
}

impl Formula {
    pub fn new(root: Node, alphabet: &Alphabet) -> Result<Self> {
        for n in root.preorder() {
            if let Node::Atom(c) = n {
                if !alphabet.contains(*c) {
                    return Err(Error::LetterOutsideAlphabet(*c));
                }
            }
        }
        if root.has_until_leq() && root.has_release_geq() {
            return Err(Error::Domain("a formula cannot mix U# and R#".into()));
        }
        Ok(Formula { root, alphabet: alphabet.clone() })
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut p = Parser { toks: tokenize(text)?, pos: 0, alphabet, len: text.len() };
        let root = p.parse_or()?;
        if let Some(t) = p.toks.get(p.pos) {
            return Err(Error::Syntax { pos: t.1, msg: format!("unexpected {}", t.0) });
        }
        Formula::new(root, alphabet)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn logic(&self) -> Logic {
        if self.root.has_release_geq() {
            Logic::Nltl
        } else {
            Logic::Ltl
        }
    }

    pub fn render(&self) -> String {
        render(&self.root)
    }

    pub fn subformulas(&self) -> SubformulaSet {
        SubformulaSet::of(&self.root)
    }

    /// Negation pushed to the leaves, turning an LTL≤ formula into an nLTL≤ one.
    pub fn dualize(&self) -> Result<Formula> {
        if self.root.has_release_geq() {
            return Err(Error::Domain("dualize expects a formula without R#".into()));
        }
        Ok(Formula { root: dual(&self.root, &self.alphabet), alphabet: self.alphabet.clone() })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `(∨_{b≠a} b) ∨ END`, or plain `END` over a one-letter alphabet.
pub fn negated_atom(a: char, alphabet: &Alphabet) -> Node {
    match disjunction(alphabet.letters().iter().copied().filter(|&b| b != a)) {
        Some(d) => Node::or(d, Node::End),
        None => Node::End,
    }
}

/// Left fold of the letters with `|`.
fn disjunction<I: Iterator<Item = char>>(mut letters: I) -> Option<Node> {
    let first = Node::Atom(letters.next()?);
    Some(letters.fold(first, |acc, c| Node::or(acc, Node::Atom(c))))
}

pub fn true_node(alphabet: &Alphabet) -> Node {
    let a = alphabet.letters()[0];
    Node::or(Node::Atom(a), negated_atom(a, alphabet))
}

pub fn false_node(alphabet: &Alphabet) -> Node {
    let a = alphabet.letters()[0];
    Node::and(Node::Atom(a), negated_atom(a, alphabet))
}

fn dual(n: &Node, alphabet: &Alphabet) -> Node {
    match n {
        Node::Atom(a) => negated_atom(*a, alphabet),
        Node::End => disjunction(alphabet.letters().iter().copied())
            .expect("alphabets are nonempty"),
        Node::And(l, r) => Node::or(dual(l, alphabet), dual(r, alphabet)),
        Node::Or(l, r) => Node::and(dual(l, alphabet), dual(r, alphabet)),
        // X is false at the end of the word, so its negation holds there.
        Node::Next(x) => Node::or(Node::next(dual(x, alphabet)), Node::End),
        // Stop at the first position refuting the right side and either refuting the left
        // side or sitting at the end.
        Node::Until(l, r) => {
            let nr = dual(r, alphabet);
            Node::until(nr.clone(), Node::and(nr, Node::or(dual(l, alphabet), Node::End)))
        }
        Node::UntilLeqN(l, r) => Node::release_geq(dual(l, alphabet), dual(r, alphabet)),
        Node::ReleaseGeqN(..) => unreachable!("checked by dualize"),
    }
}

/// Distinct subformulae in pre-order of first occurrence, with bounded operators numbered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubformulaSet {
    members: Vec<Node>,
    until_leq: Vec<Node>,
    release_geq: Vec<Node>,
}

impl SubformulaSet {
    pub fn of(root: &Node) -> Self {
        let mut seen = HashSet::new();
        let mut members = Vec::new();
        for n in root.preorder() {
            if seen.insert(n) {
                members.push(n.clone());
            }
        }
        let until_leq =
            members.iter().filter(|n| matches!(n, Node::UntilLeqN(..))).cloned().collect();
        let release_geq =
            members.iter().filter(|n| matches!(n, Node::ReleaseGeqN(..))).cloned().collect();
        SubformulaSet { members, until_leq, release_geq }
    }

    pub fn members(&self) -> &[Node] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: &Node) -> bool {
        self.members.contains(n)
    }

    /// 1-based index of a `U#` subformula.
    pub fn until_index(&self, n: &Node) -> Option<usize> {
        self.until_leq.iter().position(|m| m == n).map(|i| i + 1)
    }

    /// 1-based index of an `R#` subformula.
    pub fn release_index(&self, n: &Node) -> Option<usize> {
        self.release_geq.iter().position(|m| m == n).map(|i| i + 1)
    }

    pub fn until_count(&self) -> usize {
        self.until_leq.len()
    }

    pub fn release_count(&self) -> usize {
        self.release_geq.len()
    }

    pub fn is_closed(&self) -> bool {
        self.members.iter().all(|m| m.children().into_iter().all(|c| self.contains(c)))
    }
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNTIL: u8 = 3;
const PREC_UNARY: u8 = 4;

fn prec(n: &Node) -> u8 {
    match n {
        Node::Or(..) => PREC_OR,
        Node::And(..) => PREC_AND,
        Node::Until(..) | Node::UntilLeqN(..) | Node::ReleaseGeqN(..) => PREC_UNTIL,
        Node::Next(_) => PREC_UNARY,
        Node::Atom(_) | Node::End => PREC_UNARY + 1,
    }
}

pub fn render(n: &Node) -> String {
    let mut s = String::new();
    render_into(n, 0, &mut s);
    s
}

fn render_into(n: &Node, min_prec: u8, out: &mut String) {
    let wrap = prec(n) < min_prec;
    if wrap {
        out.push('(');
    }
    let binary = |l: &Node, op: &str, r: &Node, lp: u8, rp: u8, out: &mut String| {
        render_into(l, lp, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        render_into(r, rp, out);
    };
    match n {
        Node::Atom(c) => out.push(*c),
        Node::End => out.push_str("END"),
        Node::Or(l, r) => binary(l, "|", r, PREC_OR, PREC_AND, out),
        Node::And(l, r) => binary(l, "&", r, PREC_AND, PREC_UNTIL, out),
        Node::Until(l, r) => binary(l, "U", r, PREC_UNARY, PREC_UNTIL, out),
        Node::UntilLeqN(l, r) => binary(l, "U#", r, PREC_UNARY, PREC_UNTIL, out),
        Node::ReleaseGeqN(l, r) => binary(l, "R#", r, PREC_UNARY, PREC_UNTIL, out),
        Node::Next(x) => {
            out.push_str("X ");
            render_into(x, PREC_UNARY, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Letter(char),
    End,
    True,
    False,
    Not,
    Next,
    Eventually,
    Globally,
    And,
    Or,
    Until,
    UntilLeq,
    ReleaseGeq,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Letter(c) => return write!(f, "'{c}'"),
            Tok::End => "END",
            Tok::True => "TRUE",
            Tok::False => "FALSE",
            Tok::Not => "'!'",
            Tok::Next => "X",
            Tok::Eventually => "F",
            Tok::Globally => "G",
            Tok::And => "'&'",
            Tok::Or => "'|'",
            Tok::Until => "U",
            Tok::UntilLeq => "U#",
            Tok::ReleaseGeq => "R#",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
        };
        f.write_str(s)
    }
}

const KEYWORDS: [(&str, Tok); 9] = [
    ("FALSE", Tok::False),
    ("TRUE", Tok::True),
    ("END", Tok::End),
    ("U#", Tok::UntilLeq),
    ("R#", Tok::ReleaseGeq),
    ("X", Tok::Next),
    ("F", Tok::Eventually),
    ("G", Tok::Globally),
    ("U", Tok::Until),
];

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            c if c.is_lowercase() => Some(Tok::Letter(c)),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, i));
            i += c.len_utf8();
            continue;
        }
        match KEYWORDS.iter().find(|(kw, _)| rest.starts_with(kw)) {
            Some((kw, t)) => {
                toks.push((t.clone(), i));
                i += kw.len();
            }
            None => {
                return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{c}'") })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    alphabet: &'a Alphabet,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.1)
    }

    fn letter(&self, c: char) -> Result<char> {
        if self.alphabet.contains(c) {
            Ok(c)
        } else {
            Err(Error::LetterOutsideAlphabet(c))
        }
    }

    fn parse_or(&mut self) -> Result<Node> {
        let mut l = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            l = Node::or(l, self.parse_and()?);
        }
        Ok(l)
    }

    fn parse_and(&mut self) -> Result<Node> {
        let mut l = self.parse_until()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            l = Node::and(l, self.parse_until()?);
        }
        Ok(l)
    }

    fn parse_until(&mut self) -> Result<Node> {
        let l = self.parse_unary()?;
        let make: fn(Node, Node) -> Node = match self.peek() {
            Some(Tok::Until) => Node::until,
            Some(Tok::UntilLeq) => Node::until_leq,
            Some(Tok::ReleaseGeq) => Node::release_geq,
            _ => return Ok(l),
        };
        self.pos += 1;
        let r = self.parse_until()?;
        Ok(make(l, r))
    }

    fn parse_unary(&mut self) -> Result<Node> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax { pos: at, msg: "unexpected end of input".into() });
        };
        self.pos += 1;
        match tok {
            Tok::Letter(c) => Ok(Node::Atom(self.letter(c)?)),
            Tok::End => Ok(Node::End),
            Tok::True => Ok(true_node(self.alphabet)),
            Tok::False => Ok(false_node(self.alphabet)),
            Tok::Not => match self.peek().cloned() {
                Some(Tok::Letter(c)) => {
                    self.pos += 1;
                    Ok(negated_atom(self.letter(c)?, self.alphabet))
                }
                _ => Err(Error::Syntax {
                    pos: self.offset(),
                    msg: "'!' applies to a letter only".into(),
                }),
            },
            Tok::Next => Ok(Node::next(self.parse_unary()?)),
            Tok::Eventually => Ok(Node::until(true_node(self.alphabet), self.parse_unary()?)),
            Tok::Globally => Ok(Node::until(self.parse_unary()?, Node::End)),
            Tok::LParen => {
                let inner = self.parse_or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::Syntax { pos: self.offset(), msg: "expected ')'".into() });
                }
                self.pos += 1;
                Ok(inner)
            }
            t => Err(Error::Syntax { pos: at, msg: format!("unexpected {t}") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new("ab").unwrap()
    }

    fn b_or_end() -> Node {
        Node::or(Node::atom('b'), Node::End)
    }

    #[test]
    fn negated_atom_under_until_leq() {
        let f = Formula::parse("!a U# END", &ab()).unwrap();
        assert_eq!(f.root(), &Node::until_leq(b_or_end(), Node::End));
    }

    #[test]
    fn globally_is_until_end() {
        let f = Formula::parse("G b", &ab()).unwrap();
        assert_eq!(f.root(), &Node::until(Node::atom('b'), Node::End));
    }

    #[test]
    fn sugar_expansions() {
        let t = Formula::parse("TRUE", &ab()).unwrap();
        assert_eq!(t.root(), &Node::or(Node::atom('a'), b_or_end()));
        let f = Formula::parse("FALSE", &ab()).unwrap();
        assert_eq!(f.root(), &Node::and(Node::atom('a'), b_or_end()));
        let ev = Formula::parse("F a", &ab()).unwrap();
        assert_eq!(ev.root(), &Node::until(t.root().clone(), Node::atom('a')));
        let abc = Alphabet::new("abc").unwrap();
        let n = Formula::parse("!a", &abc).unwrap();
        assert_eq!(
            n.root(),
            &Node::or(Node::or(Node::atom('b'), Node::atom('c')), Node::End)
        );
        let one = Alphabet::new("a").unwrap();
        assert_eq!(Formula::parse("!a", &one).unwrap().root(), &Node::End);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = Formula::parse("a | b & X a U b U END", &ab()).unwrap();
        let expected = Node::or(
            Node::atom('a'),
            Node::and(
                Node::atom('b'),
                Node::until(
                    Node::next(Node::atom('a')),
                    Node::until(Node::atom('b'), Node::End),
                ),
            ),
        );
        assert_eq!(f.root(), &expected);
        let g = Formula::parse("a | b | a", &ab()).unwrap();
        assert_eq!(
            g.root(),
            &Node::or(Node::or(Node::atom('a'), Node::atom('b')), Node::atom('a'))
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(Formula::parse("a U", &ab()), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(Formula::parse("(a", &ab()), Err(Error::Syntax { .. })));
        assert!(matches!(Formula::parse("a b", &ab()), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(Formula::parse("!X a", &ab()), Err(Error::Syntax { .. })));
        assert!(matches!(Formula::parse("a ? b", &ab()), Err(Error::Syntax { pos: 2, .. })));
        assert_eq!(Formula::parse("c", &ab()), Err(Error::LetterOutsideAlphabet('c')));
        assert!(matches!(Formula::parse("(a U# b) & (a R# b)", &ab()), Err(Error::Domain(_))));
    }

    #[test]
    fn render_examples() {
        let r = |n: Node| render(&n);
        assert_eq!(r(Node::until_leq(b_or_end(), Node::End)), "(b | END) U# END");
        assert_eq!(r(Node::atom('a')), "a");
        assert_eq!(r(Node::next(Node::End)), "X END");
        assert_eq!(
            r(Node::until(Node::until(Node::atom('a'), Node::atom('b')), Node::End)),
            "(a U b) U END"
        );
        assert_eq!(r(Node::next(Node::and(Node::atom('a'), Node::End))), "X (a & END)");
    }

    #[test]
    fn subformula_examples() {
        let f = Formula::parse("a & b", &ab()).unwrap();
        assert_eq!(f.subformulas().len(), 3);
        let g = Formula::parse("!a U# END", &ab()).unwrap();
        let s = g.subformulas();
        assert_eq!(
            s.members(),
            &[g.root().clone(), b_or_end(), Node::atom('b'), Node::End]
        );
        assert!(s.is_closed());
        assert_eq!(s.until_index(g.root()), Some(1));
        let e = Formula::parse("END", &ab()).unwrap();
        assert_eq!(e.subformulas().members(), &[Node::End]);
    }

    #[test]
    fn until_indices_follow_preorder() {
        let f = Formula::parse("(a U# b) U# (b U# a)", &ab()).unwrap();
        let s = f.subformulas();
        assert_eq!(s.until_count(), 3);
        assert_eq!(s.until_index(f.root()), Some(1));
        let left = Node::until_leq(Node::atom('a'), Node::atom('b'));
        let right = Node::until_leq(Node::atom('b'), Node::atom('a'));
        assert_eq!(s.until_index(&left), Some(2));
        assert_eq!(s.until_index(&right), Some(3));
    }

    #[test]
    fn dualize_examples() {
        let f = Formula::parse("a U# b", &ab()).unwrap();
        let a_or_end = Node::or(Node::atom('a'), Node::End);
        assert_eq!(f.dualize().unwrap().root(), &Node::release_geq(b_or_end(), a_or_end.clone()));
        let e = Formula::parse("END", &ab()).unwrap();
        assert_eq!(e.dualize().unwrap().root(), &Node::or(Node::atom('a'), Node::atom('b')));
        let c = Formula::parse("a & b", &ab()).unwrap();
        assert_eq!(c.dualize().unwrap().root(), &Node::or(b_or_end(), a_or_end));
        let n = Formula::parse("a R# b", &ab()).unwrap();
        assert!(matches!(n.dualize(), Err(Error::Domain(_))));
    }
}
