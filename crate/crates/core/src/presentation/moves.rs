use crate::error::{Error, Result};
use crate::presentation::{BiPresentation, Presentation, SlidePath};
use crate::words::Word;

/// Which side of the handle structure a cancelling pair lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Primary,
    Dual,
}

/// One application of the move calculus. Indices are 0-based; `sign` is
/// always `1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MoveToken {
    InvertRelator {
        i: usize,
    },
    /// `r_i ← r_i · c r_j^sign c⁻¹`.
    MultiplyRelator {
        i: usize,
        j: usize,
        c: Word,
        sign: i8,
    },
    GeneratorInvert {
        g: usize,
    },
    /// `x_i′ = x_i x_j^sign`.
    GeneratorMultiply {
        i: usize,
        j: usize,
        sign: i8,
    },
    Stabilize,
    /// Removes handle `relator` together with generator `generator` of `side`.
    Destabilize {
        relator: usize,
        generator: usize,
        side: Side,
    },
    AddCancellingPairPrimary,
    AddCancellingPairDual,
    SingleSlide {
        i: usize,
        j: usize,
        c: Word,
        sign: i8,
    },
    DoubleSlide {
        i: usize,
        j: usize,
        c: Word,
        sign: i8,
    },
    GeneralSlide {
        i: usize,
        j: usize,
        path: SlidePath,
        sign: i8,
    },
    SwapRelators {
        i: usize,
        j: usize,
    },
    SwapGenerators {
        i: usize,
        j: usize,
    },
}

impl MoveToken {
    pub fn keyword(&self) -> &'static str {
        match self {
            MoveToken::InvertRelator { .. } => "invert",
            MoveToken::MultiplyRelator { .. } => "multiply",
            MoveToken::GeneratorInvert { .. } => "geninvert",
            MoveToken::GeneratorMultiply { .. } => "genmultiply",
            MoveToken::Stabilize => "stabilize",
            MoveToken::Destabilize { .. } => "destabilize",
            MoveToken::AddCancellingPairPrimary => "addpair",
            MoveToken::AddCancellingPairDual => "adddualpair",
            MoveToken::SingleSlide { .. } => "singleslide",
            MoveToken::DoubleSlide { .. } => "doubleslide",
            MoveToken::GeneralSlide { .. } => "slide",
            MoveToken::SwapRelators { .. } => "swaprel",
            MoveToken::SwapGenerators { .. } => "swapgen",
        }
    }

    /// Checks sign values and `i ≠ j` for two-index kinds.
    pub fn validate(&self) -> Result<()> {
        let (pair, sign) = match self {
            MoveToken::MultiplyRelator { i, j, sign, .. }
            | MoveToken::GeneratorMultiply { i, j, sign }
            | MoveToken::SingleSlide { i, j, sign, .. }
            | MoveToken::DoubleSlide { i, j, sign, .. }
            | MoveToken::GeneralSlide { i, j, sign, .. } => (Some((*i, *j)), Some(*sign)),
            MoveToken::SwapRelators { i, j } | MoveToken::SwapGenerators { i, j } => (Some((*i, *j)), None),
            _ => (None, None),
        };
        if let Some((i, j)) = pair {
            if i == j {
                return Err(Error::SameIndex(i));
            }
        }
        match sign {
            Some(s) if s != 1 && s != -1 => Err(Error::Precondition(format!("sign must be 1 or -1, got {s}"))),
            _ => Ok(()),
        }
    }

    /// True when the handle and generator counts stay fixed.
    pub fn preserves_counts(&self) -> bool {
        !matches!(
            self,
            MoveToken::Stabilize
                | MoveToken::Destabilize { .. }
                | MoveToken::AddCancellingPairPrimary
                | MoveToken::AddCancellingPairDual
        )
    }

    /// The token undoing `self` when it does not depend on the state.
    fn plain_inverse(&self) -> Option<MoveToken> {
        let t = match self.clone() {
            MoveToken::MultiplyRelator { i, j, c, sign } => MoveToken::MultiplyRelator { i, j, c, sign: -sign },
            MoveToken::GeneratorMultiply { i, j, sign } => MoveToken::GeneratorMultiply { i, j, sign: -sign },
            MoveToken::SingleSlide { i, j, c, sign } => MoveToken::SingleSlide { i, j, c, sign: -sign },
            MoveToken::DoubleSlide { i, j, c, sign } => MoveToken::DoubleSlide { i, j, c, sign: -sign },
            MoveToken::GeneralSlide { i, j, path, sign } => MoveToken::GeneralSlide {
                i,
                j,
                path,
                sign: -sign,
            },
            t @ (MoveToken::InvertRelator { .. }
            | MoveToken::GeneratorInvert { .. }
            | MoveToken::SwapRelators { .. }
            | MoveToken::SwapGenerators { .. }) => t,
            _ => return None,
        };
        Some(t)
    }
}

/// Values the move calculus acts on.
pub trait Movable: Sized + Clone {
    fn apply_move(&self, token: &MoveToken) -> Result<Self>;

    /// The token `t′` with `apply(apply(self, t), t′) = self`, when one exists.
    fn inverse_of(&self, token: &MoveToken) -> Option<MoveToken>;

    fn handle_count(&self) -> usize;

    fn generator_count(&self) -> usize;
}

impl Movable for Presentation {
    fn apply_move(&self, token: &MoveToken) -> Result<Self> {
        token.validate()?;
        match token {
            MoveToken::InvertRelator { i } => self.invert_relator(*i),
            MoveToken::MultiplyRelator { i, j, c, sign } | MoveToken::SingleSlide { i, j, c, sign } => {
                self.multiply_relator(*i, *j, c, *sign)
            }
            MoveToken::GeneralSlide { i, j, path, sign } => self.multiply_relator(*i, *j, &path.c, *sign),
            MoveToken::DoubleSlide { i, j, c, sign } => {
                let id = Word::identity();
                if *sign > 0 {
                    self.multiply_relator(*i, *j, c, 1)?.multiply_relator(*i, *j, &id, -1)
                } else {
                    self.multiply_relator(*i, *j, &id, 1)?.multiply_relator(*i, *j, c, -1)
                }
            }
            MoveToken::GeneratorInvert { g } => self.invert_generator(*g),
            MoveToken::GeneratorMultiply { i, j, sign } => self.multiply_generator(*i, *j, *sign),
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => Ok(self.stabilize()),
            MoveToken::Destabilize {
                relator,
                generator,
                side: Side::Primary,
            } => self.destabilize(*relator, *generator),
            MoveToken::SwapRelators { i, j } => self.swap_relators(*i, *j),
            MoveToken::SwapGenerators { i, j } => self.swap_generators(*i, *j),
            MoveToken::AddCancellingPairDual | MoveToken::Destabilize { .. } => {
                Err(Error::UnsupportedMove(token.keyword()))
            }
        }
    }

    fn inverse_of(&self, token: &MoveToken) -> Option<MoveToken> {
        if let Some(t) = token.plain_inverse() {
            return Some(t);
        }
        match token {
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => Some(MoveToken::Destabilize {
                relator: self.relator_count(),
                generator: self.generator_count(),
                side: Side::Primary,
            }),
            MoveToken::Destabilize {
                relator,
                generator,
                side: Side::Primary,
            } => {
                let after = self.destabilize(*relator, *generator).ok()?;
                (after.stabilize() == *self).then_some(MoveToken::Stabilize)
            }
            _ => None,
        }
    }

    fn handle_count(&self) -> usize {
        self.relator_count()
    }

    fn generator_count(&self) -> usize {
        Presentation::generator_count(self)
    }
}

impl Movable for BiPresentation {
    fn apply_move(&self, token: &MoveToken) -> Result<Self> {
        token.validate()?;
        match token {
            MoveToken::InvertRelator { i } => self.invert_relator(*i),
            MoveToken::MultiplyRelator { i, j, c, sign } | MoveToken::SingleSlide { i, j, c, sign } => {
                self.single_slide(*i, *j, c, *sign)
            }
            MoveToken::DoubleSlide { i, j, c, sign } => self.double_slide(*i, *j, c, *sign),
            MoveToken::GeneralSlide { i, j, path, sign } => self.general_slide(*i, *j, path, *sign),
            MoveToken::GeneratorInvert { g } => self.map_primary(|p| p.invert_generator(*g)),
            MoveToken::GeneratorMultiply { i, j, sign } => self.map_primary(|p| p.multiply_generator(*i, *j, *sign)),
            MoveToken::SwapGenerators { i, j } => self.map_primary(|p| p.swap_generators(*i, *j)),
            MoveToken::SwapRelators { i, j } => self.swap_pairs(*i, *j),
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => Ok(self.add_cancelling_pair(Side::Primary)),
            MoveToken::AddCancellingPairDual => Ok(self.add_cancelling_pair(Side::Dual)),
            MoveToken::Destabilize {
                relator,
                generator,
                side,
            } => self.remove_cancelling_pair(*relator, *generator, *side),
        }
    }

    fn inverse_of(&self, token: &MoveToken) -> Option<MoveToken> {
        if let Some(t) = token.plain_inverse() {
            return Some(t);
        }
        match token {
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => Some(MoveToken::Destabilize {
                relator: self.pairs().len(),
                generator: self.primary().rank(),
                side: Side::Primary,
            }),
            MoveToken::AddCancellingPairDual => Some(MoveToken::Destabilize {
                relator: self.pairs().len(),
                generator: self.dual().rank(),
                side: Side::Dual,
            }),
            MoveToken::Destabilize {
                relator,
                generator,
                side,
            } => {
                let after = self.remove_cancelling_pair(*relator, *generator, *side).ok()?;
                let back = match side {
                    Side::Primary => MoveToken::AddCancellingPairPrimary,
                    Side::Dual => MoveToken::AddCancellingPairDual,
                };
                (after.apply_move(&back).ok()? == *self).then_some(back)
            }
            _ => None,
        }
    }

    fn handle_count(&self) -> usize {
        self.pairs().len()
    }

    fn generator_count(&self) -> usize {
        self.primary().rank()
    }
}

/// An ordered list of moves, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MoveScript {
    pub moves: Vec<MoveToken>,
}

impl MoveScript {
    pub fn new(moves: Vec<MoveToken>) -> Self {
        MoveScript { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, token: MoveToken) {
        self.moves.push(token);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MoveToken> {
        self.moves.iter()
    }

    pub fn fold<M: Movable>(&self, start: &M) -> Result<M> {
        self.moves
            .iter()
            .try_fold(start.clone(), |state, t| state.apply_move(t))
    }

    /// The script undoing `self` when started from `start`.
    pub fn inverse<M: Movable>(&self, start: &M) -> Result<Option<MoveScript>> {
        let mut state = start.clone();
        let mut inverses = Vec::with_capacity(self.moves.len());
        for t in &self.moves {
            match state.inverse_of(t) {
                Some(inv) => inverses.push(inv),
                None => return Ok(None),
            }
            state = state.apply_move(t)?;
        }
        inverses.reverse();
        Ok(Some(MoveScript::new(inverses)))
    }
}

impl FromIterator<MoveToken> for MoveScript {
    fn from_iter<I: IntoIterator<Item = MoveToken>>(iter: I) -> Self {
        MoveScript::new(iter.into_iter().collect())
    }
}
