use crate::presentation::Presentation;
use crate::words::{Letter, Word};

/// Generators up to this count are canonicalized over every permutation;
/// larger alphabets fall back to first-use relabeling.
pub const EXHAUSTIVE_RELABEL_LIMIT: usize = 6;

/// Presentation key invariant under relator reordering, relator inversion,
/// relator conjugation and generator renaming.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    generators: usize,
    relators: Vec<Vec<u32>>,
}

impl CanonicalForm {
    pub fn of(p: &Presentation) -> Self {
        let k = p.generator_count();
        let relators = if k <= EXHAUSTIVE_RELABEL_LIMIT {
            permutations(k)
                .into_iter()
                .map(|perm| relabeled_key(p.relators(), &perm))
                .min()
                .unwrap_or_default()
        } else {
            let identity: Vec<usize> = (0..k).collect();
            let first = relabeled_key(p.relators(), &identity);
            relabeled_key(p.relators(), &first_use_order(&first, k))
        };
        CanonicalForm {
            generators: k,
            relators,
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Vec<u32>] {
        &self.relators
    }
}

fn code(l: Letter) -> u32 {
    2 * l.index() as u32 + u32::from(l.is_inverse())
}

fn min_rotation(letters: &[u32]) -> Vec<u32> {
    let n = letters.len();
    (0..n.max(1))
        .map(|s| {
            letters[s.min(n)..]
                .iter()
                .chain(&letters[..s.min(n)])
                .copied()
                .collect::<Vec<u32>>()
        })
        .min()
        .unwrap_or_default()
}

/// Least rotation of the cyclic core of `w` or of its inverse.
fn canonical_relator(w: &Word) -> Vec<u32> {
    let (core, _) = w.cyclic_reduce();
    let forward: Vec<u32> = core.letters().iter().map(|&l| code(l)).collect();
    let backward: Vec<u32> = core.inverse().letters().iter().map(|&l| code(l)).collect();
    min_rotation(&forward).min(min_rotation(&backward))
}

fn relabeled_key(relators: &[Word], perm: &[usize]) -> Vec<Vec<u32>> {
    let mut key: Vec<Vec<u32>> = relators
        .iter()
        .map(|r| canonical_relator(&r.relabel(|g| perm[g])))
        .collect();
    key.sort();
    key
}

fn first_use_order(key: &[Vec<u32>], k: usize) -> Vec<usize> {
    let mut perm = vec![usize::MAX; k];
    let mut next = 0;
    for c in key.iter().flatten() {
        let g = (*c / 2) as usize;
        if perm[g] == usize::MAX {
            perm[g] = next;
            next += 1;
        }
    }
    for slot in perm.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    perm
}

pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut current, &mut out);
    out
}

fn heap_permute(n: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..n - 1 {
        heap_permute(n - 1, a, out);
        if n.is_multiple_of(2) {
            a.swap(i, n - 1);
        } else {
            a.swap(0, n - 1);
        }
    }
    heap_permute(n - 1, a, out);
}
