//! Carrying a move script across canonically equal presentations.

use super::canonical::{permutations, EXHAUSTIVE_RELABEL_LIMIT};
use crate::presentation::{Movable, MoveScript, MoveToken, Presentation, Side};
use crate::words::{Letter, Word};

/// Witness that `to = σ(from)`: relator `i` of `from`, relabeled through
/// `gens` and inverted when `inverted[i]`, becomes relator `rels[i]` of `to`
/// after conjugation by `conj[i]`.
#[derive(Debug, Clone)]
struct Alignment {
    gens: Vec<usize>,
    rels: Vec<usize>,
    inverted: Vec<bool>,
    conj: Vec<Word>,
}

/// `d` with `b = d a d⁻¹`, if `a` and `b` are conjugate.
pub(crate) fn conjugator_between(a: &Word, b: &Word) -> Option<Word> {
    let (core_a, u) = a.cyclic_reduce();
    let (core_b, v) = b.cyclic_reduce();
    let n = core_a.len();
    if n != core_b.len() {
        return None;
    }
    let la = core_a.letters();
    let lb = core_b.letters();
    (0..n.max(1)).find_map(|s| {
        let s = s.min(n);
        let rotated = la[s..].iter().chain(&la[..s]);
        if !rotated.eq(lb.iter()) {
            return None;
        }
        let head: Word = la[..s].iter().copied().collect();
        Some(&(&v * &head.inverse()) * &u.inverse())
    })
}

fn align(from: &Presentation, to: &Presentation) -> Option<Alignment> {
    let k = from.generator_count();
    if k != to.generator_count() || from.relator_count() != to.relator_count() || k > EXHAUSTIVE_RELABEL_LIMIT {
        return None;
    }
    'perm: for gens in permutations(k) {
        let mut used = vec![false; to.relator_count()];
        let mut out = Alignment {
            gens: gens.clone(),
            rels: Vec::new(),
            inverted: Vec::new(),
            conj: Vec::new(),
        };
        for r in from.relators() {
            let image = r.relabel(|g| gens[g]);
            let found = to.relators().iter().enumerate().find_map(|(j, target)| {
                if used[j] {
                    return None;
                }
                if let Some(d) = conjugator_between(&image, target) {
                    return Some((j, false, d));
                }
                conjugator_between(&image.inverse(), target).map(|d| (j, true, d))
            });
            let Some((j, inv, d)) = found else { continue 'perm };
            used[j] = true;
            out.rels.push(j);
            out.inverted.push(inv);
            out.conj.push(d);
        }
        return Some(out);
    }
    None
}

/// Rewrites `script`, valid from `from`, into moves from `to` that keep the
/// two states canonically equal at every step. `None` when the states are
/// not aligned or a move has no counterpart.
pub(crate) fn transport(from: &Presentation, to: &Presentation, script: &MoveScript) -> Option<MoveScript> {
    let mut a = align(from, to)?;
    let mut from = from.clone();
    let mut to = to.clone();
    let mut out = MoveScript::default();
    for t in script.iter() {
        let mapped = match t {
            MoveToken::MultiplyRelator { i, j, c, sign } | MoveToken::SingleSlide { i, j, c, sign } => {
                let (i, j) = (*i, *j);
                let ei: i8 = if a.inverted[i] { -1 } else { 1 };
                let ej: i8 = if a.inverted[j] { -1 } else { 1 };
                let image = c.relabel(|g| a.gens[g]);
                let c2 = &(&a.conj[i] * &image) * &a.conj[j].inverse();
                if a.inverted[i] {
                    let old = from.relators()[i].relabel(|g| a.gens[g]);
                    a.conj[i] = &a.conj[i] * &old.inverse();
                }
                Some(MoveToken::MultiplyRelator {
                    i: a.rels[i],
                    j: a.rels[j],
                    c: c2,
                    sign: sign * ei * ej,
                })
            }
            MoveToken::InvertRelator { i } => {
                a.inverted[*i] = !a.inverted[*i];
                None
            }
            MoveToken::SwapRelators { i, j } => {
                a.rels.swap(*i, *j);
                a.inverted.swap(*i, *j);
                a.conj.swap(*i, *j);
                None
            }
            MoveToken::SwapGenerators { i, j } => {
                a.gens.swap(*i, *j);
                None
            }
            MoveToken::GeneratorInvert { g } => {
                let g2 = a.gens[*g];
                let images = images_with(to.generator_count(), g2, Word::letter(Letter::neg(g2)));
                a.conj = a.conj.iter().map(|d| d.substitute(&images)).collect();
                Some(MoveToken::GeneratorInvert { g: g2 })
            }
            MoveToken::GeneratorMultiply { i, j, sign } => {
                let (i2, j2) = (a.gens[*i], a.gens[*j]);
                let image = &Word::generator(i2) * &Word::generator(j2).pow(-i64::from(*sign));
                let images = images_with(to.generator_count(), i2, image);
                a.conj = a.conj.iter().map(|d| d.substitute(&images)).collect();
                Some(MoveToken::GeneratorMultiply {
                    i: i2,
                    j: j2,
                    sign: *sign,
                })
            }
            MoveToken::Stabilize | MoveToken::AddCancellingPairPrimary => {
                a.gens.push(to.generator_count());
                a.rels.push(to.relator_count());
                a.inverted.push(false);
                a.conj.push(Word::identity());
                Some(MoveToken::Stabilize)
            }
            MoveToken::Destabilize {
                relator,
                generator,
                side: Side::Primary,
            } => {
                let (r2, g2) = (a.rels[*relator], a.gens[*generator]);
                a.rels.remove(*relator);
                a.inverted.remove(*relator);
                a.conj.remove(*relator);
                a.gens.remove(*generator);
                if a.conj.iter().any(|d| d.contains_index(g2)) {
                    return None;
                }
                for r in &mut a.rels {
                    *r -= usize::from(*r > r2);
                }
                for g in &mut a.gens {
                    *g -= usize::from(*g > g2);
                }
                a.conj = a
                    .conj
                    .iter()
                    .map(|d| d.relabel(|c| if c > g2 { c - 1 } else { c }))
                    .collect();
                Some(MoveToken::Destabilize {
                    relator: r2,
                    generator: g2,
                    side: Side::Primary,
                })
            }
            _ => return None,
        };
        from = from.apply_move(t).ok()?;
        if let Some(m) = mapped {
            to = to.apply_move(&m).ok()?;
            out.push(m);
        }
    }
    Some(out)
}

fn images_with(k: usize, g: usize, image: Word) -> Vec<Word> {
    (0..k)
        .map(|c| if c == g { image.clone() } else { Word::generator(c) })
        .collect()
}
