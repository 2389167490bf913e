use crate::presentation::Presentation;
use crate::words::Word;

/// Relator `relator` is a conjugate `conjugator · g^±1 · conjugator⁻¹` of
/// generator `generator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AcMatch {
    pub relator: usize,
    pub generator: usize,
    pub inverse: bool,
    pub conjugator: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcStatus {
    /// The relators homotopically cancel a subset of the generators.
    pub type1: bool,
    /// A subset of the relators homotopically cancels all the generators.
    pub type2: bool,
    /// A witness matching, present when either type holds.
    pub matching: Option<Vec<AcMatch>>,
}

/// Maximum bipartite matching by augmenting paths (Kuhn). `adjacency[l]`
/// lists the right vertices of left vertex `l`; lower indices are tried
/// first. Returns `match_of_left`.
pub fn maximum_matching(adjacency: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    fn augment(
        l: usize,
        adjacency: &[Vec<usize>],
        visited: &mut [bool],
        right_owner: &mut [Option<usize>],
        left_mate: &mut [Option<usize>],
    ) -> bool {
        for &r in &adjacency[l] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            let free = match right_owner[r] {
                None => true,
                Some(other) => augment(other, adjacency, visited, right_owner, left_mate),
            };
            if free {
                right_owner[r] = Some(l);
                left_mate[l] = Some(r);
                return true;
            }
        }
        false
    }

    let mut right_owner = vec![None; right_count];
    let mut left_mate = vec![None; adjacency.len()];
    for l in 0..adjacency.len() {
        let mut visited = vec![false; right_count];
        augment(l, adjacency, &mut visited, &mut right_owner, &mut left_mate);
    }
    left_mate
}

/// Decides both AC types by matching relators to generators, where relator
/// `r` may match `g` iff its cyclic core is `g` or `g⁻¹`.
pub fn is_ac_structure(p: &Presentation) -> AcStatus {
    let (k, l) = (p.generator_count(), p.relator_count());
    let mut forms = Vec::with_capacity(l);
    let adjacency: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| {
            let (core, conjugator) = r.cyclic_reduce();
            let letter = core.as_single_letter();
            forms.push((letter, conjugator));
            letter.map(|x| vec![x.index()]).unwrap_or_default()
        })
        .collect();
    let mates = maximum_matching(&adjacency, k);
    let size = mates.iter().flatten().count();
    let type1 = k >= l && size == l;
    let type2 = k <= l && size == k;
    let matching = (type1 || type2).then(|| {
        mates
            .iter()
            .enumerate()
            .filter_map(|(relator, m)| {
                m.map(|generator| {
                    let (letter, conjugator) = &forms[relator];
                    AcMatch {
                        relator,
                        generator,
                        inverse: letter.map(|x| x.is_inverse()).unwrap_or(false),
                        conjugator: conjugator.clone(),
                    }
                })
            })
            .collect()
    });
    AcStatus { type1, type2, matching }
}
