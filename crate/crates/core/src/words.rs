//! Free-group arithmetic over a named alphabet.
//!
//! Letters are integer codes into an [`Alphabet`]; names only appear at the
//! text boundary. A [`Word`] is kept freely reduced at all times.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Checks `[A-Za-z][A-Za-z0-9_]*`, optionally followed by `@<digits>` tags.
pub fn is_valid_identifier(name: &str) -> bool {
    let mut parts = name.split('@');
    let head = parts.next().unwrap_or("");
    let mut chars = head.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    head_ok && parts.all(|tag| !tag.is_empty() && tag.chars().all(|c| c.is_ascii_digit()))
}

/// Ordered generator names, plus optional boundary letters that behave as
/// free letters with no relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    names: Vec<String>,
    boundary: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_boundary(names, std::iter::empty::<String>())
    }

    pub fn with_boundary<S: Into<String>, T: Into<String>>(
        names: impl IntoIterator<Item = S>,
        boundary: impl IntoIterator<Item = T>,
    ) -> Result<Self> {
        let alphabet = Alphabet {
            names: names.into_iter().map(Into::into).collect(),
            boundary: boundary.into_iter().map(Into::into).collect(),
        };
        let mut seen = std::collections::HashSet::new();
        for name in alphabet.all_names() {
            if !is_valid_identifier(name) {
                return Err(Error::InvalidIdentifier(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateIdentifier(name.clone()));
            }
        }
        Ok(alphabet)
    }

    /// `x1, …, xk`.
    pub fn standard(k: usize) -> Self {
        Alphabet {
            names: (1..=k).map(|i| format!("x{i}")).collect(),
            boundary: Vec::new(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn boundary_names(&self) -> &[String] {
        &self.boundary
    }

    /// Number of generators (boundary letters excluded).
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// Number of letter codes, generators first then boundary letters.
    pub fn letter_count(&self) -> usize {
        self.names.len() + self.boundary.len()
    }

    fn all_names(&self) -> impl Iterator<Item = &String> {
        self.names.iter().chain(self.boundary.iter())
    }

    pub fn name(&self, code: usize) -> Option<&str> {
        self.all_names().nth(code).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.all_names().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Builds a reduced word from `(name, exponent)` pairs.
    pub fn word(&self, pieces: &[(&str, i64)]) -> Result<Word> {
        let mut letters = Vec::new();
        for &(name, exp) in pieces {
            let code = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
            let letter = Letter::new(code, exp < 0);
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(Word::reduce(letters))
    }

    /// True when every letter of `w` names a generator or boundary letter.
    pub fn covers(&self, w: &Word) -> bool {
        w.letters().iter().all(|l| l.index() < self.letter_count())
    }

    /// True when every letter of `w` is a generator (no boundary letters).
    pub fn covers_generators(&self, w: &Word) -> bool {
        w.letters().iter().all(|l| l.index() < self.rank())
    }

    pub(crate) fn push_generator(&mut self, name: String) {
        self.names.push(name);
    }

    pub(crate) fn remove_generator(&mut self, g: usize) -> String {
        self.names.remove(g)
    }

    pub(crate) fn swap_generators(&mut self, a: usize, b: usize) {
        self.names.swap(a, b);
    }

    /// First of `stem`, `stem1`, `stem2`, … not already in use.
    pub fn fresh_name(&self, stem: &str, numbered_only: bool) -> String {
        if !numbered_only && !self.contains(stem) {
            return stem.to_string();
        }
        (1..)
            .map(|n| format!("{stem}{n}"))
            .find(|candidate| !self.contains(candidate))
            .expect("unbounded candidate supply")
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == letters[i] {
                run += 1;
            }
            let name = self
                .name(letters[i].index())
                .map(str::to_string)
                .unwrap_or_else(|| format!("?{}", letters[i].index()));
            out.push(match (letters[i].is_inverse(), run) {
                (false, 1) => name,
                (false, n) => format!("{name}^{n}"),
                (true, n) => format!("{name}^-{n}"),
            });
            i += run;
        }
        out.join(" ")
    }
}

/// A generator (or boundary letter) code with an exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    index: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Letter {
            index: index as u32,
            inverse,
        }
    }

    pub fn pos(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn neg(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter::pos(index)])
    }

    pub fn letter(letter: Letter) -> Self {
        Word(vec![letter])
    }

    /// Free reduction with a single stack pass.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word(stack)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `c · self · c⁻¹`, reduced.
    pub fn conjugate(&self, c: &Word) -> Self {
        &(c * self) * &c.inverse()
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`, reduced.
    pub fn commutator(a: &Word, b: &Word) -> Self {
        let letters =
            a.0.iter()
                .chain(b.0.iter())
                .copied()
                .chain(a.inverse().0)
                .chain(b.inverse().0);
        Word::reduce(letters)
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k].cancels(self.0[n - 1 - k]) {
            k += 1;
        }
        (Word(self.0[k..n - k].to_vec()), Word(self.0[..k].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.0.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Image under the endomorphism sending letter code `g` to `images[g]`.
    /// Codes beyond `images` (e.g. boundary letters) are fixed.
    pub fn substitute(&self, images: &[Word]) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            let piece = match images.get(l.index()) {
                Some(img) if l.is_inverse() => img.inverse(),
                Some(img) => img.clone(),
                None => Word::letter(l),
            };
            for p in piece.0 {
                match out.last() {
                    Some(&top) if top.cancels(p) => {
                        out.pop();
                    }
                    _ => out.push(p),
                }
            }
        }
        Word(out)
    }

    /// Renames letter codes through `map`, which must keep the word reduced
    /// (any injective map does).
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Self {
        Word(
            self.0
                .iter()
                .map(|l| Letter::new(map(l.index()), l.is_inverse()))
                .collect(),
        )
    }

    pub fn exponent_sum(&self, index: usize) -> i64 {
        self.0.iter().filter(|l| l.index() == index).map(|l| l.sign()).sum()
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.0.iter().any(|l| l.index() == index)
    }

    /// The letter if this word has length one.
    pub fn as_single_letter(&self) -> Option<Letter> {
        match self.0.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|l| l.index()).max()
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        let mut k = 0;
        let (a, b) = (&self.0, &rhs.0);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k].cancels(b[k]) {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        Word(out)
    }
}

impl Mul for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::reduce(iter)
    }
}

impl fmt::Display for Word {
    /// Debug-style rendering with `g<index>` names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}", l.index)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}
