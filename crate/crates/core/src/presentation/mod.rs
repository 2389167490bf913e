//! Balanced presentations, relator/dual-relator bookkeeping and the move
//! calculus acting on them.

mod ac;
mod group;
mod moves;
mod snf;

pub use ac::{is_ac_structure, maximum_matching, AcMatch, AcStatus};
pub use group::{count_homomorphisms, standard_test_groups, FiniteGroup, DEFAULT_HOM_BUDGET};
pub use moves::{Movable, MoveScript, MoveToken, Side};
pub use snf::{abelianization_matrix, homology, smith_normal_form, Homology, IntMatrix, SmithForm};

use crate::error::{check_index, Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// A group presentation `(x₁, …, x_k | r₁, …, r_ℓ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        if let Some(bad) = relators.iter().find(|r| !alphabet.covers_generators(r)) {
            return Err(Error::Precondition(format!(
                "relator {bad} uses letters outside the generators"
            )));
        }
        Ok(Presentation { alphabet, relators })
    }

    /// The standard trivial presentation `(x₁…x_k | x₁…x_k)`.
    pub fn trivial(k: usize) -> Self {
        Presentation {
            alphabet: Alphabet::standard(k),
            relators: (0..k).map(Word::generator).collect(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.generator_count() == self.relator_count()
    }

    /// Sum of the cyclically reduced relator lengths.
    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.cyclic_reduce().0.len()).sum()
    }

    pub fn invert_relator(&self, i: usize) -> Result<Self> {
        check_index("relator", i, self.relators.len())?;
        let mut out = self.clone();
        out.relators[i] = self.relators[i].inverse();
        Ok(out)
    }

    /// `r_i ← r_i · c r_j^sign c⁻¹`.
    pub fn multiply_relator(&self, i: usize, j: usize, c: &Word, sign: i8) -> Result<Self> {
        check_index("relator", i, self.relators.len())?;
        check_index("relator", j, self.relators.len())?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        self.check_word(c)?;
        let factor = signed(&self.relators[j], sign).conjugate(c);
        let mut out = self.clone();
        out.relators[i] = &self.relators[i] * &factor;
        Ok(out)
    }

    /// Replaces generator `g` by its inverse, rewriting every relator.
    pub fn invert_generator(&self, g: usize) -> Result<Self> {
        check_index("generator", g, self.generator_count())?;
        let images = self.identity_images_with(g, Word::letter(Letter::neg(g)));
        Ok(self.map_relators(|r| r.substitute(&images)))
    }

    /// New generator `x_i′ = x_i x_j^sign`; relators are rewritten by
    /// `x_i ↦ x_i′ x_j^-sign`.
    pub fn multiply_generator(&self, i: usize, j: usize, sign: i8) -> Result<Self> {
        check_index("generator", i, self.generator_count())?;
        check_index("generator", j, self.generator_count())?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        let images = self.identity_images_with(i, generator_change_image(i, j, sign));
        Ok(self.map_relators(|r| r.substitute(&images)))
    }

    /// Appends a fresh generator together with the relator equal to it.
    pub fn stabilize(&self) -> Self {
        let mut out = self.clone();
        let name = self.alphabet.fresh_name("z", false);
        out.alphabet.push_generator(name);
        out.relators.push(Word::generator(self.generator_count()));
        out
    }

    /// Removes relator `i` and generator `g`, where `r_i = g^±1` and `g`
    /// occurs in no other relator.
    pub fn destabilize(&self, i: usize, g: usize) -> Result<Self> {
        check_index("relator", i, self.relators.len())?;
        check_index("generator", g, self.generator_count())?;
        match self.relators[i].as_single_letter() {
            Some(l) if l.index() == g => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "relator {} is not the single generator {}",
                    i + 1,
                    self.alphabet.name(g).unwrap_or("?")
                )))
            }
        }
        if self
            .relators
            .iter()
            .enumerate()
            .any(|(m, r)| m != i && r.contains_index(g))
        {
            return Err(Error::Precondition(format!(
                "generator {} occurs in another relator",
                self.alphabet.name(g).unwrap_or("?")
            )));
        }
        let mut out = self.clone();
        out.relators.remove(i);
        out.alphabet.remove_generator(g);
        out.relators = out
            .relators
            .iter()
            .map(|r| r.relabel(|c| if c > g { c - 1 } else { c }))
            .collect();
        Ok(out)
    }

    pub fn swap_relators(&self, i: usize, j: usize) -> Result<Self> {
        check_index("relator", i, self.relators.len())?;
        check_index("relator", j, self.relators.len())?;
        let mut out = self.clone();
        out.relators.swap(i, j);
        Ok(out)
    }

    /// Exchanges the positions of two generators (names and letter codes).
    pub fn swap_generators(&self, a: usize, b: usize) -> Result<Self> {
        check_index("generator", a, self.generator_count())?;
        check_index("generator", b, self.generator_count())?;
        let mut out = self.map_relators(|r| r.relabel(|c| swap_code(c, a, b)));
        out.alphabet.swap_generators(a, b);
        Ok(out)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if self.alphabet.covers_generators(w) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("word {w} uses unknown generators")))
        }
    }

    fn identity_images_with(&self, g: usize, image: Word) -> Vec<Word> {
        (0..self.generator_count())
            .map(|c| if c == g { image.clone() } else { Word::generator(c) })
            .collect()
    }

    fn map_relators(&self, f: impl Fn(&Word) -> Word) -> Self {
        Presentation {
            alphabet: self.alphabet.clone(),
            relators: self.relators.iter().map(f).collect(),
        }
    }
}

pub(crate) fn signed(w: &Word, sign: i8) -> Word {
    if sign < 0 {
        w.inverse()
    } else {
        w.clone()
    }
}

fn swap_code(c: usize, a: usize, b: usize) -> usize {
    if c == a {
        b
    } else if c == b {
        a
    } else {
        c
    }
}

fn generator_change_image(i: usize, j: usize, sign: i8) -> Word {
    let xj = Letter::new(j, sign > 0);
    Word::reduce([Letter::pos(i), xj])
}

/// A 2-handle's relator together with its dual relator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HandlePair {
    pub relator: Word,
    pub dual_relator: Word,
}

impl HandlePair {
    pub fn new(relator: Word, dual_relator: Word) -> Self {
        HandlePair { relator, dual_relator }
    }
}

/// The path `(c, c*)` along which one 2-handle slides over another.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SlidePath {
    pub c: Word,
    pub c_star: Word,
}

impl SlidePath {
    pub fn new(c: Word, c_star: Word) -> Self {
        SlidePath { c, c_star }
    }

    pub fn trivial() -> Self {
        SlidePath::default()
    }
}

/// Relators over the 1-handle generators and dual relators over the dual
/// 1-handle generators (plus boundary letters), paired per 2-handle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiPresentation {
    primary: Alphabet,
    dual: Alphabet,
    pairs: Vec<HandlePair>,
}

impl BiPresentation {
    pub fn new(primary: Alphabet, dual: Alphabet, pairs: Vec<HandlePair>) -> Result<Self> {
        if !primary.boundary_names().is_empty() {
            return Err(Error::Precondition(
                "the primary alphabet cannot carry boundary letters".into(),
            ));
        }
        for (n, pair) in pairs.iter().enumerate() {
            if !primary.covers_generators(&pair.relator) {
                return Err(Error::Precondition(format!(
                    "relator {} leaves the primary alphabet",
                    n + 1
                )));
            }
            if !dual.covers(&pair.dual_relator) {
                return Err(Error::Precondition(format!(
                    "dual relator {} leaves the dual alphabet",
                    n + 1
                )));
            }
        }
        Ok(BiPresentation { primary, dual, pairs })
    }

    pub fn empty() -> Self {
        BiPresentation {
            primary: Alphabet::default(),
            dual: Alphabet::default(),
            pairs: Vec::new(),
        }
    }

    pub fn primary(&self) -> &Alphabet {
        &self.primary
    }

    pub fn dual(&self) -> &Alphabet {
        &self.dual
    }

    pub fn pairs(&self) -> &[HandlePair] {
        &self.pairs
    }

    pub fn relators(&self) -> impl Iterator<Item = &Word> {
        self.pairs.iter().map(|p| &p.relator)
    }

    pub fn dual_relators(&self) -> impl Iterator<Item = &Word> {
        self.pairs.iter().map(|p| &p.dual_relator)
    }

    /// The primary presentation `(x | r)`.
    pub fn presentation(&self) -> Presentation {
        Presentation {
            alphabet: self.primary.clone(),
            relators: self.relators().cloned().collect(),
        }
    }

    /// The dual presentation, boundary letters promoted to generators.
    pub fn dual_presentation(&self) -> Presentation {
        let names: Vec<String> = self
            .dual
            .names()
            .iter()
            .chain(self.dual.boundary_names())
            .cloned()
            .collect();
        Presentation {
            alphabet: Alphabet::new(names).expect("dual alphabet already validated"),
            relators: self.dual_relators().cloned().collect(),
        }
    }

    /// Inverts both the relator and the dual relator of pair `i`.
    pub fn invert_relator(&self, i: usize) -> Result<Self> {
        check_index("handle", i, self.pairs.len())?;
        let mut out = self.clone();
        let p = &mut out.pairs[i];
        p.relator = p.relator.inverse();
        p.dual_relator = p.dual_relator.inverse();
        Ok(out)
    }

    /// Slides `H_i` over `±H_j` along `path`.
    ///
    /// Over `H_j` (`sign = +1`): `r_i ← r_i c r_j c⁻¹` and
    /// `r*_j ← r*_j c*⁻¹ r*_i⁻¹ c*`. Over `-H_j` (`sign = -1`):
    /// `r_i ← r_i c r_j⁻¹ c⁻¹` and `r*_j ← r*_j c*⁻¹ r*_i c*`, the exact
    /// inverse of the positive slide along the same path.
    pub fn general_slide(&self, i: usize, j: usize, path: &SlidePath, sign: i8) -> Result<Self> {
        check_index("handle", i, self.pairs.len())?;
        check_index("handle", j, self.pairs.len())?;
        if i == j {
            return Err(Error::SameIndex(i));
        }
        if !self.primary.covers_generators(&path.c) {
            return Err(Error::Precondition(format!(
                "path word {} leaves the primary alphabet",
                path.c
            )));
        }
        if !self.dual.covers(&path.c_star) {
            return Err(Error::Precondition(format!(
                "path word {} leaves the dual alphabet",
                path.c_star
            )));
        }
        let (hi, hj) = (&self.pairs[i], &self.pairs[j]);
        let relator = &hi.relator * &signed(&hj.relator, sign).conjugate(&path.c);
        let dual_factor = signed(&hi.dual_relator, -sign).conjugate(&path.c_star.inverse());
        let dual_relator = &hj.dual_relator * &dual_factor;
        let mut out = self.clone();
        out.pairs[i].relator = relator;
        out.pairs[j].dual_relator = dual_relator;
        Ok(out)
    }

    /// Slide along `(c, 1)`.
    pub fn single_slide(&self, i: usize, j: usize, c: &Word, sign: i8) -> Result<Self> {
        self.general_slide(i, j, &SlidePath::new(c.clone(), Word::identity()), sign)
    }

    /// Slide over `H_j` along `(c, 1)` then over `-H_j` along `(1, 1)`:
    /// `r_i ← r_i [c, r_j]`, every dual relator fixed. With `sign = -1`
    /// the two slides are undone in reverse order: `r_i ← r_i [c, r_j]⁻¹`.
    pub fn double_slide(&self, i: usize, j: usize, c: &Word, sign: i8) -> Result<Self> {
        let trivial = Word::identity();
        if sign >= 0 {
            self.single_slide(i, j, c, 1)?.single_slide(i, j, &trivial, -1)
        } else {
            self.single_slide(i, j, &trivial, 1)?.single_slide(i, j, c, -1)
        }
    }

    /// `Primary`: a cancelling 1/2 pair, new generator `x` with pair `(x, 1)`.
    /// `Dual`: a cancelling 2/3 pair, new dual generator `x*` with pair `(1, x*)`.
    pub fn add_cancelling_pair(&self, side: Side) -> Self {
        let mut out = self.clone();
        match side {
            Side::Primary => {
                let name = self.primary.fresh_name("z", false);
                out.primary.push_generator(name);
                out.pairs
                    .push(HandlePair::new(Word::generator(self.primary.rank()), Word::identity()));
            }
            Side::Dual => {
                let name = self.dual.fresh_name("d", true);
                // boundary codes sit after the generators; shift them up by one
                let g = self.dual.rank();
                for p in &mut out.pairs {
                    p.dual_relator = p.dual_relator.relabel(|c| if c >= g { c + 1 } else { c });
                }
                out.dual.push_generator(name);
                out.pairs.push(HandlePair::new(Word::identity(), Word::generator(g)));
            }
        }
        out
    }

    /// Removes a cancelling pair: `Primary` needs pair `i = (g^±1, 1)` with
    /// `g` in no other relator; `Dual` needs `i = (1, g*^±1)` with `g*` in no
    /// other dual relator.
    pub fn remove_cancelling_pair(&self, i: usize, g: usize, side: Side) -> Result<Self> {
        check_index("handle", i, self.pairs.len())?;
        let pair = &self.pairs[i];
        let (own, other, alphabet) = match side {
            Side::Primary => (&pair.relator, &pair.dual_relator, &self.primary),
            Side::Dual => (&pair.dual_relator, &pair.relator, &self.dual),
        };
        check_index("generator", g, alphabet.rank())?;
        let single = matches!(own.as_single_letter(), Some(l) if l.index() == g);
        if !single || !other.is_empty() {
            return Err(Error::Precondition(format!(
                "handle {} is not a cancelling pair",
                i + 1
            )));
        }
        let used_elsewhere = self.pairs.iter().enumerate().any(|(m, p)| {
            m != i
                && match side {
                    Side::Primary => p.relator.contains_index(g),
                    Side::Dual => p.dual_relator.contains_index(g),
                }
        });
        if used_elsewhere {
            return Err(Error::Precondition(format!(
                "generator {} occurs in another handle",
                alphabet.name(g).unwrap_or("?")
            )));
        }
        let mut out = self.clone();
        out.pairs.remove(i);
        let shift = |c: usize| if c > g { c - 1 } else { c };
        match side {
            Side::Primary => {
                out.primary.remove_generator(g);
                for p in &mut out.pairs {
                    p.relator = p.relator.relabel(shift);
                }
            }
            Side::Dual => {
                out.dual.remove_generator(g);
                for p in &mut out.pairs {
                    p.dual_relator = p.dual_relator.relabel(shift);
                }
            }
        }
        Ok(out)
    }

    /// Generator moves act on the primary relators only.
    pub fn map_primary(&self, f: impl Fn(&Presentation) -> Result<Presentation>) -> Result<Self> {
        let moved = f(&self.presentation())?;
        if moved.relator_count() != self.pairs.len() {
            return Err(Error::Precondition("primary move changed the handle count".into()));
        }
        let mut out = self.clone();
        out.primary = moved.alphabet;
        for (p, r) in out.pairs.iter_mut().zip(moved.relators) {
            p.relator = r;
        }
        Ok(out)
    }

    pub fn swap_pairs(&self, i: usize, j: usize) -> Result<Self> {
        check_index("handle", i, self.pairs.len())?;
        check_index("handle", j, self.pairs.len())?;
        let mut out = self.clone();
        out.pairs.swap(i, j);
        Ok(out)
    }
}
