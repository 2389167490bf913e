//! Bounded search over the move graph.
//!
//! Trivialization search runs breadth-first up to `bfs_depth`, then keeps a
//! beam ordered by total cyclically reduced relator length. States are
//! deduplicated through a transposition table keyed by [`CanonicalForm`].
//! Each wave's children are generated in parallel and merged in frontier
//! order, so results and node counts do not depend on the worker count.

mod canonical;
mod transport;

pub use crate::presentation::MoveScript;
pub use canonical::{CanonicalForm, EXHAUSTIVE_RELABEL_LIMIT};

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::corkcalc::{verify_certificate, CertificateFactor, NormalClosureCertificate};
use crate::error::{Error, Result};
use crate::presentation::{Movable, MoveToken, Presentation, Side};
use crate::words::{Letter, Word};
use transport::transport;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    pub max_depth: usize,
    /// Cap on node expansions.
    pub max_nodes: usize,
    pub beam_width: usize,
    pub conjugator_length_cap: usize,
    pub rng_seed: u64,
    /// Depth at which breadth-first search hands over to the beam.
    pub bfs_depth: usize,
    /// Allow stabilization and destabilization moves.
    pub stable: bool,
    /// Generator ceiling for stabilization; `0` means one above the start.
    pub max_generators: usize,
    pub workers: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 8,
            max_nodes: 5_000,
            beam_width: 64,
            conjugator_length_cap: 1,
            rng_seed: 0,
            bfs_depth: 2,
            stable: false,
            max_generators: 0,
            workers: 1,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.beam_width == 0 {
            return Err(Error::Precondition("beam width must be at least 1".into()));
        }
        Ok(())
    }

    /// Pure breadth-first search to `depth`.
    pub fn breadth_first(depth: usize, max_nodes: usize) -> Self {
        SearchBudget {
            max_depth: depth,
            max_nodes,
            bfs_depth: depth,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome<T> {
    pub result: Option<T>,
    pub nodes_expanded: usize,
    /// Distinct states stored, counting both search directions.
    pub states_seen: usize,
}

/// All reduced words over `k` generators of length at most `cap`, shortlex.
pub fn conjugators(k: usize, cap: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..k {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    if w.letters().last().is_some_and(|&last| last == l.inverse()) {
                        continue;
                    }
                    next.push(&w.clone() * &Word::letter(l));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The search vocabulary at `p`: relator inversions and multiplications,
/// generator inversions and multiplications, and with `budget.stable` the
/// stabilizations up to `max_generators` and every legal destabilization.
pub fn search_moves(p: &Presentation, budget: &SearchBudget, max_generators: usize) -> Vec<MoveToken> {
    let (k, l) = (p.generator_count(), p.relator_count());
    let conj = conjugators(k, budget.conjugator_length_cap);
    let mut moves: Vec<MoveToken> = (0..l).map(|i| MoveToken::InvertRelator { i }).collect();
    for i in 0..l {
        for j in (0..l).filter(|&j| j != i) {
            for c in &conj {
                for sign in [1, -1] {
                    moves.push(MoveToken::MultiplyRelator {
                        i,
                        j,
                        c: c.clone(),
                        sign,
                    });
                }
            }
        }
    }
    for g in 0..k {
        moves.push(MoveToken::GeneratorInvert { g });
    }
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            for sign in [1, -1] {
                moves.push(MoveToken::GeneratorMultiply { i, j, sign });
            }
        }
    }
    if budget.stable {
        if k < max_generators {
            moves.push(MoveToken::Stabilize);
        }
        for (i, r) in p.relators().iter().enumerate() {
            if let Some(letter) = r.as_single_letter() {
                let g = letter.index();
                if p.relators()
                    .iter()
                    .enumerate()
                    .all(|(m, s)| m == i || !s.contains_index(g))
                {
                    moves.push(MoveToken::Destabilize {
                        relator: i,
                        generator: g,
                        side: Side::Primary,
                    });
                }
            }
        }
    }
    moves
}

/// The unstable search vocabulary at `p`; every move in it is invertible.
pub fn scramble_moves(p: &Presentation, conjugator_length_cap: usize) -> Vec<MoveToken> {
    let budget = SearchBudget {
        conjugator_length_cap,
        ..Default::default()
    };
    search_moves(p, &budget, p.generator_count())
}

/// Applies `k` uniformly sampled moves; returns the result and the script
/// that undoes them.
pub fn scramble(
    p: &Presentation,
    k: usize,
    seed: u64,
    conjugator_length_cap: usize,
) -> Result<(Presentation, MoveScript)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = p.clone();
    let mut inverse = Vec::with_capacity(k);
    for _ in 0..k {
        let moves = scramble_moves(&state, conjugator_length_cap);
        if moves.is_empty() {
            break;
        }
        let t = &moves[rng.gen_range(0..moves.len())];
        let inv = state
            .inverse_of(t)
            .ok_or_else(|| Error::Precondition(format!("move {} has no inverse", t.keyword())))?;
        state = state.apply_move(t)?;
        inverse.push(inv);
    }
    inverse.reverse();
    Ok((state, MoveScript::new(inverse)))
}

struct Node {
    parent: usize,
    via: Option<MoveToken>,
}

struct Child {
    parent: usize,
    token: MoveToken,
    state: Presentation,
    form: CanonicalForm,
    weight: usize,
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Children of every frontier state, in frontier order then move order.
fn expand(frontier: &[(usize, Presentation)], budget: &SearchBudget, max_generators: usize) -> Vec<Child> {
    let waves: Vec<Vec<Child>> = with_workers(budget.workers, || {
        frontier
            .par_iter()
            .map(|(id, state)| {
                search_moves(state, budget, max_generators)
                    .into_iter()
                    .filter_map(|token| {
                        let next = state.apply_move(&token).ok()?;
                        Some(Child {
                            parent: *id,
                            token,
                            weight: next.total_length(),
                            form: CanonicalForm::of(&next),
                            state: next,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    waves.into_iter().flatten().collect()
}

fn script_to(nodes: &[Node], mut at: usize) -> MoveScript {
    let mut moves = Vec::new();
    while let Some(t) = &nodes[at].via {
        moves.push(t.clone());
        at = nodes[at].parent;
    }
    moves.reverse();
    MoveScript::new(moves)
}

/// Transposition table keyed by canonical form. Each class keeps the
/// concrete states reached in it, since moves with capped conjugators from
/// two members of a class need not reach the same classes.
#[derive(Default)]
struct Transpositions {
    classes: HashMap<CanonicalForm, Vec<usize>>,
    states: Vec<Presentation>,
}

impl Transpositions {
    /// Records `state` under node id `id` unless it is already present:
    /// exactly, or as any member of its class when `by_class`.
    fn insert(&mut self, form: CanonicalForm, state: Presentation, by_class: bool) -> bool {
        let members = self.classes.entry(form).or_default();
        if (by_class && !members.is_empty()) || members.iter().any(|&id| self.states[id] == state) {
            return false;
        }
        members.push(self.states.len());
        self.states.push(state);
        true
    }

    fn first(&self, form: &CanonicalForm) -> Option<usize> {
        self.classes.get(form).and_then(|m| m.first().copied())
    }

    fn len(&self) -> usize {
        self.states.len()
    }
}

/// States within a few moves of the goal, searched outward from it.
struct GoalBall {
    nodes: Vec<Node>,
    table: Transpositions,
}

impl GoalBall {
    fn build(
        root: Presentation,
        depth: usize,
        budget: &SearchBudget,
        max_generators: usize,
        expanded: &mut usize,
    ) -> Self {
        let mut ball = GoalBall {
            nodes: vec![Node { parent: 0, via: None }],
            table: Transpositions::default(),
        };
        ball.table.insert(CanonicalForm::of(&root), root.clone(), false);
        let mut frontier = vec![(0, root)];
        for _ in 0..depth {
            if frontier.is_empty() || *expanded >= budget.max_nodes {
                break;
            }
            frontier.truncate(budget.max_nodes - *expanded);
            *expanded += frontier.len();
            let mut next = Vec::new();
            for child in expand(&frontier, budget, max_generators) {
                if !ball.table.insert(child.form, child.state.clone(), false) {
                    continue;
                }
                ball.nodes.push(Node {
                    parent: child.parent,
                    via: Some(child.token),
                });
                next.push((ball.nodes.len() - 1, child.state));
            }
            frontier = next;
        }
        ball
    }

    /// Moves from `state` to a presentation canonically equal to the root,
    /// when `state` meets the ball.
    fn finish(&self, state: &Presentation, form: &CanonicalForm) -> Option<MoveScript> {
        let id = self.table.first(form)?;
        let back = script_to(&self.nodes, id).inverse(&self.table.states[0]).ok()??;
        transport(&self.table.states[id], state, &back)
    }
}

/// Looks for a script taking `p` to the standard trivial presentation on
/// the same number of generators, up to canonical form. `result` is `None`
/// when the budget runs out; that is not a verdict.
///
/// The breadth-first phase meets in the middle: half of `bfs_depth` is
/// searched outward from the goal, and every forward state is checked
/// against it.
pub fn trivialization_search(p: &Presentation, budget: &SearchBudget) -> Result<SearchOutcome<MoveScript>> {
    budget.validate()?;
    if !p.is_balanced() {
        return Err(Error::Precondition(format!(
            "presentation is not balanced ({} generators, {} relators)",
            p.generator_count(),
            p.relator_count()
        )));
    }
    let goal_state = Presentation::trivial(p.generator_count());
    let goal = CanonicalForm::of(&goal_state);
    let max_generators = if budget.max_generators == 0 {
        p.generator_count() + 1
    } else {
        budget.max_generators
    };
    let reverse_depth = (budget.bfs_depth / 2).min(budget.max_depth);
    let mut expanded = 0;
    let ball = GoalBall::build(goal_state, reverse_depth, budget, max_generators, &mut expanded);

    let mut nodes = vec![Node { parent: 0, via: None }];
    let start = CanonicalForm::of(p);
    let mut table = Transpositions::default();
    table.insert(start.clone(), p.clone(), false);
    let found = |nodes: &[Node], id: usize, state: &Presentation, form: &CanonicalForm| -> Result<Option<MoveScript>> {
        let Some(tail) = ball.finish(state, form) else {
            return Ok(None);
        };
        let mut script = script_to(nodes, id);
        tail.iter().for_each(|t| script.push(t.clone()));
        if CanonicalForm::of(&script.fold(p)?) != goal {
            return Err(Error::Verification(
                "search produced a script that does not trivialize".into(),
            ));
        }
        Ok(Some(script))
    };
    let outcome = |result, expanded, seen| SearchOutcome {
        result,
        nodes_expanded: expanded,
        states_seen: seen,
    };
    if let Some(script) = found(&nodes, 0, p, &start)? {
        return Ok(outcome(Some(script), expanded, table.len() + ball.table.len()));
    }

    let mut frontier: Vec<(usize, Presentation)> = vec![(0, p.clone())];
    let forward_bfs = budget.bfs_depth - reverse_depth;
    for depth in 0..budget.max_depth - reverse_depth {
        if frontier.is_empty() || expanded >= budget.max_nodes {
            break;
        }
        frontier.truncate(budget.max_nodes - expanded);
        expanded += frontier.len();
        let beam = depth + 1 >= forward_bfs;
        let mut candidates = Vec::new();
        for child in expand(&frontier, budget, max_generators) {
            if !table.insert(child.form.clone(), child.state.clone(), beam) {
                continue;
            }
            nodes.push(Node {
                parent: child.parent,
                via: Some(child.token),
            });
            let id = nodes.len() - 1;
            if let Some(script) = found(&nodes, id, &child.state, &child.form)? {
                return Ok(outcome(Some(script), expanded, table.len() + ball.table.len()));
            }
            candidates.push((child.weight, child.form, id, child.state));
        }
        candidates.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        if beam {
            candidates.truncate(budget.beam_width);
        }
        frontier = candidates.into_iter().map(|(_, _, id, state)| (id, state)).collect();
    }
    Ok(outcome(None, expanded, table.len() + ball.table.len()))
}

/// Breadth-first search for `target` as a product of at most `max_depth`
/// conjugates `c r^±1 c⁻¹` with `|c| ≤ conjugator_length_cap`.
pub fn certificate_search(
    p: &Presentation,
    target: &Word,
    budget: &SearchBudget,
) -> Result<SearchOutcome<NormalClosureCertificate>> {
    budget.validate()?;
    if !p.alphabet().covers_generators(target) {
        return Err(Error::Precondition("target leaves the generators".into()));
    }
    let conj = conjugators(p.generator_count(), budget.conjugator_length_cap);
    let mut factors = Vec::new();
    for (relator, r) in p.relators().iter().enumerate() {
        for sign in [1i8, -1] {
            let base = if sign > 0 { r.clone() } else { r.inverse() };
            for c in &conj {
                factors.push((
                    CertificateFactor {
                        sign,
                        relator,
                        conjugator: c.clone(),
                    },
                    base.conjugate(c),
                ));
            }
        }
    }
    let done = |seen: usize, expanded: usize, cert: Option<NormalClosureCertificate>| SearchOutcome {
        result: cert,
        nodes_expanded: expanded,
        states_seen: seen,
    };
    if target.is_empty() {
        return Ok(done(1, 0, Some(NormalClosureCertificate::default())));
    }
    // parent links: (parent product, factor index)
    let mut parents: HashMap<Word, Option<(Word, usize)>> = HashMap::from([(Word::identity(), None)]);
    let mut queue: VecDeque<(Word, usize)> = VecDeque::from([(Word::identity(), 0)]);
    let mut expanded = 0;
    while let Some((w, depth)) = queue.pop_front() {
        if depth >= budget.max_depth || expanded >= budget.max_nodes {
            continue;
        }
        expanded += 1;
        for (fi, (_, f)) in factors.iter().enumerate() {
            let next = &w * f;
            if parents.contains_key(&next) {
                continue;
            }
            parents.insert(next.clone(), Some((w.clone(), fi)));
            if next == *target {
                let mut chain = Vec::new();
                let mut at = next;
                while let Some(Some((prev, fi))) = parents.get(&at) {
                    chain.push(factors[*fi].0.clone());
                    at = prev.clone();
                }
                chain.reverse();
                let cert = NormalClosureCertificate::new(chain);
                if !verify_certificate(p, target, &cert) {
                    return Err(Error::Verification(
                        "certificate search produced an invalid certificate".into(),
                    ));
                }
                return Ok(done(parents.len(), expanded, Some(cert)));
            }
            queue.push_back((next, depth + 1));
        }
    }
    Ok(done(parents.len(), expanded, None))
}

/// Distinct canonical forms reachable from `p` in at most `depth` search
/// moves (for diagnostics and tests).
pub fn reachable_forms(p: &Presentation, depth: usize, budget: &SearchBudget) -> HashSet<CanonicalForm> {
    let mut seen = HashSet::from([CanonicalForm::of(p)]);
    let mut layer = vec![p.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for state in &layer {
            for t in search_moves(state, budget, state.generator_count() + 1) {
                if let Ok(q) = state.apply_move(&t) {
                    if seen.insert(CanonicalForm::of(&q)) {
                        next.push(q);
                    }
                }
            }
        }
        layer = next;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn pres(names: &[&str], rels: &[&[(&str, i64)]]) -> Presentation {
        let a = Alphabet::new(names.iter().copied()).unwrap();
        let rels = rels.iter().map(|r| a.word(r).unwrap()).collect();
        Presentation::new(a, rels).unwrap()
    }

    #[test]
    fn conjugator_enumeration() {
        assert_eq!(conjugators(2, 0), vec![Word::identity()]);
        assert_eq!(conjugators(2, 1).len(), 5);
        // 1 + 4 + 4*3
        assert_eq!(conjugators(2, 2).len(), 17);
    }

    #[test]
    fn scramble_zero_is_identity() {
        let p = Presentation::trivial(2);
        let (q, inv) = scramble(&p, 0, 7, 1).unwrap();
        assert_eq!(q, p);
        assert!(inv.is_empty());
    }

    #[test]
    fn scramble_inverse_restores_and_is_deterministic() {
        let p = Presentation::trivial(3);
        for seed in 0..20 {
            let (q, inv) = scramble(&p, 8, seed, 1).unwrap();
            assert_eq!(inv.fold(&q).unwrap(), p);
            assert_eq!(scramble(&p, 8, seed, 1).unwrap(), (q, inv));
        }
    }

    #[test]
    fn trivial_input_gives_empty_script() {
        let out = trivialization_search(&Presentation::trivial(2), &SearchBudget::default()).unwrap();
        assert_eq!(out.result, Some(MoveScript::default()));
    }

    #[test]
    fn finds_short_scrambles() {
        let p = Presentation::trivial(2);
        for seed in 0..10 {
            let (q, _) = scramble(&p, 3, seed, 1).unwrap();
            let out = trivialization_search(&q, &SearchBudget::breadth_first(3, 1_000_000)).unwrap();
            let script = out.result.expect("BFS at depth 3 finds a depth-3 scramble");
            assert!(script.len() <= 3);
            assert_eq!(CanonicalForm::of(&script.fold(&q).unwrap()), CanonicalForm::of(&p));
        }
    }

    #[test]
    fn ak2_exhausts_default_budget() {
        let p = pres(
            &["x", "y"],
            &[
                &[("x", 1), ("y", 1), ("x", 1), ("y", -1), ("x", -1), ("y", -1)],
                &[("x", 2), ("y", -3)],
            ],
        );
        let out = trivialization_search(&p, &SearchBudget::default()).unwrap();
        assert!(out.result.is_none());
        assert!(out.nodes_expanded <= SearchBudget::default().max_nodes);
    }

    #[test]
    fn unbalanced_is_rejected() {
        let p = pres(&["x", "y"], &[&[("x", 1)]]);
        assert!(trivialization_search(&p, &SearchBudget::default()).is_err());
    }

    #[test]
    fn stable_search_can_destabilize() {
        let p = Presentation::trivial(1).stabilize();
        let budget = SearchBudget {
            stable: true,
            ..SearchBudget::breadth_first(2, 10_000)
        };
        // already trivial on two generators
        assert_eq!(
            trivialization_search(&p, &budget).unwrap().result,
            Some(MoveScript::default())
        );
        let moves = search_moves(&p, &budget, 3);
        assert!(moves.iter().any(|t| matches!(t, MoveToken::Destabilize { .. })));
        assert!(moves.contains(&MoveToken::Stabilize));
    }

    #[test]
    fn certificate_examples() {
        let p = pres(&["x", "y"], &[&[("x", 1)], &[("y", 1)]]);
        let budget = SearchBudget {
            max_depth: 3,
            max_nodes: 100_000,
            ..Default::default()
        };
        let y = Word::generator(1);
        let cert = certificate_search(&p, &y, &budget).unwrap().result.unwrap();
        assert_eq!(cert.factors.len(), 1);
        assert_eq!(cert.factors[0].relator, 1);

        let x = Word::generator(0);
        let target = y.conjugate(&x);
        let cert = certificate_search(&p, &target, &budget).unwrap().result.unwrap();
        assert_eq!(
            cert.factors,
            vec![CertificateFactor {
                sign: 1,
                relator: 1,
                conjugator: x.clone()
            }]
        );

        let q = pres(&["x", "y"], &[&[("x", 2), ("y", 1)], &[("y", 1), ("x", -1)]]);
        let target = &q.relators()[0].clone() * &q.relators()[1].conjugate(&y);
        let out = certificate_search(&q, &target, &budget).unwrap();
        let cert = out.result.unwrap();
        assert_eq!(cert.factors.len(), 2);
        assert!(verify_certificate(&q, &target, &cert));
    }

    #[test]
    fn certificate_budget_exhaustion() {
        let p = pres(&["x", "y"], &[&[("x", 2)]]);
        let budget = SearchBudget {
            max_depth: 2,
            max_nodes: 1000,
            ..Default::default()
        };
        let out = certificate_search(&p, &Word::generator(1), &budget).unwrap();
        assert!(out.result.is_none());
    }
}
