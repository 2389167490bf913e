//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use handlecalc::corkcalc::{CertificateFactor, CommutatorDecomposition, NormalClosureCertificate};
use handlecalc::format::{Body, CertificateLine, Document};
use handlecalc::presentation::{FiniteGroup, HandlePair};
use handlecalc::{Alphabet, BiPresentation, Letter, MoveToken, Presentation, Side, SlidePath, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Raw letters, not necessarily reduced.
pub fn random_letters(rng: &mut ChaCha8Rng, letters: usize, len: usize) -> Vec<Letter> {
    (0..len)
        .map(|_| Letter::new(rng.gen_range(0..letters), rng.gen_bool(0.5)))
        .collect()
}

pub fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Word {
    if letters == 0 {
        return Word::identity();
    }
    let len = rng.gen_range(0..=max_len);
    Word::reduce(random_letters(rng, letters, len))
}

pub fn random_presentation(rng: &mut ChaCha8Rng, k: usize, l: usize, max_len: usize) -> Presentation {
    let relators = (0..l).map(|_| random_word(rng, k, max_len)).collect();
    Presentation::new(Alphabet::standard(k), relators).unwrap()
}

pub fn random_bi(rng: &mut ChaCha8Rng, handles: usize, max_len: usize) -> BiPresentation {
    let k = rng.gen_range(1..=3);
    let kd = rng.gen_range(1..=3);
    let nb = rng.gen_range(0..=2);
    let primary = Alphabet::standard(k);
    let dual = Alphabet::with_boundary((1..=kd).map(|i| format!("a{i}")), (1..=nb).map(|i| format!("m{i}"))).unwrap();
    let pairs = (0..handles)
        .map(|_| HandlePair::new(random_word(rng, k, max_len), random_word(rng, kd + nb, max_len)))
        .collect();
    BiPresentation::new(primary, dual, pairs).unwrap()
}

/// Inverse of a raw letter sequence.
pub fn invert_raw(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// Free reduction by repeated left-to-right sweeps deleting the first
/// cancelling pair; quadratic, and unrelated to the library's stack scan.
pub fn expand_and_reduce(parts: &[Vec<Letter>]) -> Vec<Letter> {
    let mut letters: Vec<Letter> = parts.concat();
    loop {
        let pair = letters.windows(2).position(|w| w[0] == w[1].inverse());
        match pair {
            Some(at) => {
                letters.drain(at..at + 2);
            }
            None => return letters,
        }
    }
}

/// Cyclic core by stripping matching ends one at a time.
pub fn cyclic_core(word: &[Letter]) -> Vec<Letter> {
    let mut w = word.to_vec();
    while w.len() >= 2 && w[0] == w[w.len() - 1].inverse() {
        w.remove(0);
        w.pop();
    }
    w
}

/// Product `∏ c · r^sign · c⁻¹` computed on raw letters.
pub fn certificate_product(relators: &[Word], cert: &NormalClosureCertificate) -> Vec<Letter> {
    let mut parts = Vec::new();
    for f in &cert.factors {
        let r = relators[f.relator].letters().to_vec();
        let r = if f.sign < 0 { invert_raw(&r) } else { r };
        let c = f.conjugator.letters().to_vec();
        parts.push(c.clone());
        parts.push(r);
        parts.push(invert_raw(&c));
    }
    expand_and_reduce(&parts)
}

/// A random legal relator or generator move, possibly stable.
pub fn random_move(rng: &mut ChaCha8Rng, p: &Presentation, conj_cap: usize, stable: bool) -> Option<MoveToken> {
    let (k, l) = (p.generator_count(), p.relator_count());
    for _ in 0..200 {
        let kind = rng.gen_range(0..if stable { 9 } else { 7 });
        let token = match kind {
            0 if l > 0 => MoveToken::InvertRelator { i: rng.gen_range(0..l) },
            1 | 2 if l > 1 => {
                let i = rng.gen_range(0..l);
                let j = (i + rng.gen_range(1..l)) % l;
                let c = random_word(rng, k, conj_cap);
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                MoveToken::MultiplyRelator { i, j, c, sign }
            }
            3 if k > 0 => MoveToken::GeneratorInvert { g: rng.gen_range(0..k) },
            4 if k > 1 => {
                let i = rng.gen_range(0..k);
                let j = (i + rng.gen_range(1..k)) % k;
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                MoveToken::GeneratorMultiply { i, j, sign }
            }
            5 if l > 1 => {
                let i = rng.gen_range(0..l);
                MoveToken::SwapRelators {
                    i,
                    j: (i + rng.gen_range(1..l)) % l,
                }
            }
            6 if k > 1 => {
                let i = rng.gen_range(0..k);
                MoveToken::SwapGenerators {
                    i,
                    j: (i + rng.gen_range(1..k)) % k,
                }
            }
            7 => MoveToken::Stabilize,
            8 => {
                let candidates: Vec<(usize, usize)> = p
                    .relators()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, r)| {
                        let g = r.as_single_letter()?.index();
                        let alone = p
                            .relators()
                            .iter()
                            .enumerate()
                            .all(|(m, s)| m == i || !s.contains_index(g));
                        alone.then_some((i, g))
                    })
                    .collect();
                let &(relator, generator) = candidates.choose(rng)?;
                MoveToken::Destabilize {
                    relator,
                    generator,
                    side: Side::Primary,
                }
            }
            _ => continue,
        };
        return Some(token);
    }
    None
}

/// A random balanced presentation that passes both AC types: generator
/// letters conjugated, inverted and permuted.
pub fn random_ac_presentation(rng: &mut ChaCha8Rng, k: usize) -> Presentation {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let names: Vec<String> = (0..k).map(|i| format!("g{}", rng.gen_range(0..4) * 10 + i)).collect();
    let relators = order
        .iter()
        .map(|&g| {
            let c = random_word(rng, k, 2);
            Word::letter(Letter::new(g, rng.gen_bool(0.5))).conjugate(&c)
        })
        .collect();
    Presentation::new(Alphabet::new(names).unwrap(), relators).unwrap()
}

pub fn random_move_for_bi(rng: &mut ChaCha8Rng, bp: &BiPresentation) -> MoveToken {
    let n = bp.pairs().len();
    let k = bp.primary().rank();
    let kd = bp.dual().letter_count();
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    let c = random_word(rng, k, 2);
    match rng.gen_range(0..8) {
        0 => MoveToken::SingleSlide { i, j, c, sign },
        1 => MoveToken::DoubleSlide { i, j, c, sign },
        2 => MoveToken::GeneralSlide {
            i,
            j,
            path: SlidePath::new(c, random_word(rng, kd, 2)),
            sign,
        },
        3 => MoveToken::InvertRelator { i },
        4 => MoveToken::SwapRelators { i, j },
        5 => MoveToken::AddCancellingPairPrimary,
        6 => MoveToken::AddCancellingPairDual,
        _ => MoveToken::GeneratorInvert { g: rng.gen_range(0..k) },
    }
}

/// A random document touching every section kind.
pub fn random_document(rng: &mut ChaCha8Rng) -> Document {
    let mut doc = Document::default();
    let bi = rng.gen_bool(0.4);
    if rng.gen_bool(0.9) {
        if bi {
            let n = rng.gen_range(2..=3);
            doc.body = Some(Body::Bi(random_bi(rng, n, 6)));
        } else {
            let k = rng.gen_range(0..=3);
            let l = rng.gen_range(0..=3);
            let names: Vec<String> = (0..k).map(|i| ["x", "y", "z@1", "w_2"][i].to_string()).collect();
            let alphabet = Alphabet::new(names).unwrap();
            let rels = (0..l).map(|_| random_word(rng, k, 8)).collect();
            doc.body = Some(Body::Presentation(Presentation::new(alphabet, rels).unwrap()));
        }
    }
    let k = doc.body.as_ref().map_or(0, |b| b.presentation().generator_count());
    if rng.gen_bool(0.5) {
        doc.target = Some(random_word(rng, k, 5));
    }
    if rng.gen_bool(0.4) {
        let mut entries = std::collections::BTreeMap::new();
        for _ in 0..rng.gen_range(1..=3) {
            let pairs = (0..rng.gen_range(0..=2))
                .map(|_| (random_word(rng, k, 3), random_word(rng, k, 3)))
                .collect();
            entries.insert(rng.gen_range(0..5), pairs);
        }
        doc.decomposition = Some(CommutatorDecomposition::new(entries));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let factors = (0..rng.gen_range(0..=3))
            .map(|_| CertificateFactor {
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                relator: rng.gen_range(0..4),
                conjugator: random_word(rng, k, 3),
            })
            .collect();
        let key = rng.gen_bool(0.5).then(|| (rng.gen_range(0..3), rng.gen_range(0..3)));
        doc.certificates.push(CertificateLine {
            key,
            certificate: NormalClosureCertificate::new(factors),
        });
    }
    if let Some(body) = doc.body.clone() {
        let mut script = handlecalc::MoveScript::default();
        match body {
            Body::Bi(bp) => {
                let mut state = bp;
                for _ in 0..rng.gen_range(0..=4) {
                    let t = random_move_for_bi(rng, &state);
                    if let Ok(next) = handlecalc::Movable::apply_move(&state, &t) {
                        state = next;
                        script.push(t);
                    }
                }
            }
            Body::Presentation(p) => {
                let mut state = p;
                for _ in 0..rng.gen_range(0..=4) {
                    if let Some(t) = random_move(rng, &state, 2, true) {
                        if let Ok(next) = handlecalc::Movable::apply_move(&state, &t) {
                            state = next;
                            script.push(t);
                        }
                    }
                }
            }
        }
        doc.script = script;
    }
    if rng.gen_bool(0.3) {
        let n = rng.gen_range(1..=4);
        doc.groups.push(FiniteGroup::cyclic(n));
    }
    if rng.gen_bool(0.2) {
        doc.groups.push(FiniteGroup::symmetric3());
    }
    for _ in 0..rng.gen_range(0..=2) {
        let k = rng.gen_range(0..=2);
        doc.components.push(random_presentation(rng, k, k, 5));
    }
    doc
}
