use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Nonempty list of distinct single-character letters, kept in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    letters: Arc<[char]>,
}

impl Alphabet {
    pub fn new(letters: &str) -> Result<Self> {
        let chars: Vec<char> = letters.chars().collect();
        Self::from_letters(chars)
    }

    pub fn from_letters(chars: Vec<char>) -> Result<Self> {
        if chars.is_empty() {
            return Err(Error::Alphabet("alphabet must be nonempty".into()));
        }
        for (i, c) in chars.iter().enumerate() {
            if c.is_whitespace() {
                return Err(Error::Alphabet("whitespace is not a letter".into()));
            }
            if chars[..i].contains(c) {
                return Err(Error::Alphabet(format!("duplicate letter '{c}'")));
            }
        }
        Ok(Alphabet { letters: chars.into() })
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: char) -> bool {
        self.letters.contains(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&x| x == c)
    }

    /// All words of length at most `max_len`, shortest first, then in alphabet order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word { letters: Vec::new(), alphabet: self.clone() }];
        let mut layer = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * self.len());
            for w in &layer {
                for &c in self.letters.iter() {
                    let mut v: Vec<char> = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
            out.extend(next.iter().map(|v| Word { letters: v.clone(), alphabet: self.clone() }));
            layer = next;
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.letters.iter() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A finite word whose letters all belong to its alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<char>,
    alphabet: Alphabet,
}

impl Word {
    /// `""` and the empty string both denote the empty word.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let text = if text == "\"\"" { "" } else { text };
        Self::from_letters(alphabet, text.chars().collect())
    }

    pub fn from_letters(alphabet: &Alphabet, letters: Vec<char>) -> Result<Self> {
        if let Some(&c) = letters.iter().find(|&&c| !alphabet.contains(c)) {
            return Err(Error::LetterOutsideAlphabet(c));
        }
        Ok(Word { letters, alphabet: alphabet.clone() })
    }

    pub fn empty(alphabet: &Alphabet) -> Self {
        Word { letters: Vec::new(), alphabet: alphabet.clone() }
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn count_letter(&self, a: char) -> Result<u64> {
        if !self.alphabet.contains(a) {
            return Err(Error::LetterOutsideAlphabet(a));
        }
        Ok(self.letters.iter().filter(|&&c| c == a).count() as u64)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, alphabet: self.alphabet.clone() }
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word { letters: self.letters.repeat(times), alphabet: self.alphabet.clone() }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "\"\"");
        }
        for c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
