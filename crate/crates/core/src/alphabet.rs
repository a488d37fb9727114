//! Letters, alphabets and words.
//!
//! Letters are interned: an [`Alphabet`] owns the printable tokens and a
//! [`Letter`] is an index into it. Two automata are only comparable when
//! their alphabets are equal token by token.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(pub usize);

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for Alphabet {}

impl From<Vec<String>> for Alphabet {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Alphabet { tokens, index }
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.tokens
    }
}

impl Alphabet {
    /// Builds an alphabet from distinct, nonempty, whitespace-free tokens.
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        let alphabet = Alphabet::from(tokens);
        if alphabet.index.len() != alphabet.tokens.len() {
            return Err(Error::invalid("alphabet contains duplicate letters"));
        }
        for t in &alphabet.tokens {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("bad letter token {t:?}")));
            }
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.tokens.len()).map(Letter)
    }

    pub fn token(&self, letter: Letter) -> &str {
        &self.tokens[letter.0]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn lookup(&self, token: &str) -> Option<Letter> {
        self.index.get(token).copied().map(Letter)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.0 < self.tokens.len()
    }

    fn single_chars(&self) -> bool {
        self.tokens.iter().all(|t| t.chars().count() == 1)
    }

    /// Parses a word. Whitespace- or comma-separated tokens are always
    /// accepted; when every letter is a single character a bare string such
    /// as `aabb` is split per character. `ε` and the empty string denote the
    /// empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "eps" {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if text.contains(|c: char| c.is_whitespace() || c == ',') {
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect()
        } else if self.single_chars() {
            text.chars().map(String::from).collect()
        } else {
            vec![text.to_owned()]
        };
        tokens
            .iter()
            .map(|t| {
                self.lookup(t)
                    .ok_or_else(|| Error::invalid(format!("letter {t:?} is not in the alphabet")))
            })
            .collect()
    }

    pub fn render(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "ε".to_owned();
        }
        let sep = if self.single_chars() { "" } else { " " };
        word.iter().map(|l| self.token(*l)).collect::<Vec<_>>().join(sep)
    }

    pub fn check_word(&self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::invalid(format!("letter index {} is not in the alphabet", l.0))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.tokens.join(", "))
    }
}

/// All words over an alphabet of `size` letters, in length-then-lexicographic
/// order, up to and including `max_len`.
pub fn words_up_to(size: usize, max_len: usize) -> WordsUpTo {
    WordsUpTo {
        size,
        max_len,
        current: Some(Vec::new()),
    }
}

pub struct WordsUpTo {
    size: usize,
    max_len: usize,
    current: Option<Word>,
}

impl Iterator for WordsUpTo {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                if next.len() < self.max_len && self.size > 0 {
                    next = vec![Letter(0); next.len() + 1];
                    self.current = Some(next);
                }
                break;
            }
            i -= 1;
            if next[i].0 + 1 < self.size {
                next[i].0 += 1;
                self.current = Some(next);
                break;
            }
            next[i] = Letter(0);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order_and_count() {
        let words: Vec<Word> = words_up_to(2, 2).collect();
        assert_eq!(words.len(), 1 + 2 + 4);
        assert_eq!(words[0], vec![]);
        assert_eq!(words[1], vec![Letter(0)]);
        assert_eq!(words[3], vec![Letter(0), Letter(0)]);
        assert_eq!(words[6], vec![Letter(1), Letter(1)]);
    }

    #[test]
    fn parse_and_render() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let w = a.parse_word("abba").unwrap();
        assert_eq!(a.render(&w), "abba");
        assert!(a.parse_word("abc").is_err());
        assert_eq!(a.parse_word("ε").unwrap(), vec![]);

        let multi = Alphabet::new(["10", "2"]).unwrap();
        assert_eq!(multi.parse_word("10 2 10").unwrap().len(), 3);
        assert_eq!(multi.render(&[Letter(0), Letter(1)]), "10 2");
    }

    #[test]
    fn rejects_duplicates() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }
}
