use crate::error::{Error, Result};
use crate::presentation::Presentation;

/// Assignment budget used when callers do not supply one.
pub const DEFAULT_HOM_BUDGET: u64 = 50_000_000;

/// A finite group given by its multiplication table on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&e| e >= n)) {
            return Err(Error::InvalidGroup(format!("table is not a closed {n}x{n} array")));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            name: name.into(),
            table,
            identity,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(format!("Z{n}"), table).expect("cyclic table is a group")
    }

    /// Closure of a set of permutations of `0..degree`, elements sorted.
    pub fn permutation_group(name: impl Into<String>, degree: usize, generators: &[Vec<usize>]) -> Self {
        let identity: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mut elements = vec![identity];
        let mut frontier = elements.clone();
        while let Some(e) = frontier.pop() {
            for g in generators {
                let prod = compose(&e, g);
                if !elements.contains(&prod) {
                    elements.push(prod.clone());
                    frontier.push(prod);
                }
            }
        }
        elements.sort();
        let index = |p: &Vec<usize>| elements.iter().position(|e| e == p).expect("closed");
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index(&compose(a, b))).collect())
            .collect();
        Self::from_table(name, table).expect("permutation closure is a group")
    }

    pub fn symmetric3() -> Self {
        Self::permutation_group("S3", 3, &[vec![1, 0, 2], vec![1, 2, 0]])
    }

    pub fn alternating4() -> Self {
        Self::permutation_group("A4", 4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

/// `{Z₂, Z₃, S₃, A₄}`.
pub fn standard_test_groups() -> Vec<FiniteGroup> {
    vec![
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::symmetric3(),
        FiniteGroup::alternating4(),
    ]
}

/// Number of assignments of generators to elements of `group` under which
/// every relator evaluates to the identity. Exhaustive: relators are tested
/// as soon as all their letters are assigned, so no assignment is skipped.
/// Fails when `|G|^k` exceeds `budget`.
pub fn count_homomorphisms(p: &Presentation, group: &FiniteGroup, budget: u64) -> Result<u64> {
    let k = p.generator_count();
    let n = group.order() as u64;
    let total = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(n));
    match total {
        Some(t) if t <= budget => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "{}^{} assignments exceed the budget of {budget}",
                group.order(),
                k
            )))
        }
    }
    // relators grouped by the last generator they mention
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    for (i, r) in p.relators().iter().enumerate() {
        match r.max_index() {
            Some(m) => checks[m + 1].push(i),
            None => checks[0].push(i),
        }
    }
    let mut assignment = vec![0usize; k];
    Ok(count_from(0, p, group, &checks, &mut assignment))
}

fn count_from(
    depth: usize,
    p: &Presentation,
    group: &FiniteGroup,
    checks: &[Vec<usize>],
    assignment: &mut [usize],
) -> u64 {
    let satisfied = checks[depth].iter().all(|&i| {
        let value = p.relators()[i].letters().iter().fold(group.identity(), |acc, l| {
            let g = assignment[l.index()];
            group.mul(acc, if l.is_inverse() { group.inv(g) } else { g })
        });
        value == group.identity()
    });
    if !satisfied {
        return 0;
    }
    if depth == assignment.len() {
        return 1;
    }
    let mut total = 0;
    for e in 0..group.order() {
        assignment[depth] = e;
        total += count_from(depth + 1, p, group, checks, assignment);
    }
    total
}
