//! Multicorks, pinwheels and the encasement rewriting at the level of
//! presentations.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{check_index, Error, Result};
use crate::presentation::{
    abelianization_matrix, homology, is_ac_structure, signed, BiPresentation, Movable, MoveScript, MoveToken,
    Presentation,
};
use crate::words::{Alphabet, Word};

/// Free product of the components, generator `g` of component `i` renamed
/// to `g@i`.
pub fn boundary_sum_all(components: &[Presentation]) -> Presentation {
    let mut names = Vec::new();
    let mut relators = Vec::new();
    for (i, c) in components.iter().enumerate() {
        let offset = names.len();
        names.extend(c.alphabet().names().iter().map(|n| format!("{n}@{i}")));
        relators.extend(c.relators().iter().map(|r| r.relabel(|g| g + offset)));
    }
    let alphabet = Alphabet::new(names).expect("tagged names are distinct");
    Presentation::new(alphabet, relators).expect("relators stay inside their spans")
}

pub fn boundary_sum(a: &Presentation, b: &Presentation) -> Presentation {
    boundary_sum_all(&[a.clone(), b.clone()])
}

fn check_cork(p: &Presentation) -> Result<()> {
    if !p.is_balanced() {
        return Err(Error::InvalidMulticork(format!(
            "component has {} generators but {} relators",
            p.generator_count(),
            p.relator_count()
        )));
    }
    let s = is_ac_structure(p);
    if !(s.type1 && s.type2) {
        return Err(Error::InvalidMulticork("component has no AC structure".into()));
    }
    Ok(())
}

/// An ordered list of balanced AC presentations `C₀ … C_{n−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticorkModel {
    components: Vec<Presentation>,
}

impl MulticorkModel {
    pub fn new(components: Vec<Presentation>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMulticork("order must be at least 1".into()));
        }
        components.iter().try_for_each(check_cork)?;
        Ok(MulticorkModel { components })
    }

    pub fn components(&self) -> &[Presentation] {
        &self.components
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }
}

/// The constant multicork `(C, C, …, C)` of order `n`.
pub fn mu(cork: &Presentation, n: usize) -> Result<MulticorkModel> {
    check_cork(cork)?;
    MulticorkModel::new(vec![cork.clone(); n])
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentSpan {
    pub generators: Range<usize>,
    pub relators: Range<usize>,
}

/// Boundary sum of a multicork's components with the cyclic rotation
/// recorded as an index shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinwheelModel {
    components: Vec<Presentation>,
    total: Presentation,
    spans: Vec<ComponentSpan>,
}

impl PinwheelModel {
    fn assemble(components: Vec<Presentation>) -> Self {
        let total = boundary_sum_all(&components);
        let mut spans = Vec::with_capacity(components.len());
        let (mut g, mut r) = (0, 0);
        for c in &components {
            spans.push(ComponentSpan {
                generators: g..g + c.generator_count(),
                relators: r..r + c.relator_count(),
            });
            g += c.generator_count();
            r += c.relator_count();
        }
        PinwheelModel {
            components,
            total,
            spans,
        }
    }

    pub fn total(&self) -> &Presentation {
        &self.total
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    pub fn spans(&self) -> &[ComponentSpan] {
        &self.spans
    }

    pub fn components(&self) -> &[Presentation] {
        &self.components
    }

    /// Span `i` of the total, with the `@i` tags stripped.
    pub fn restrict(&self, i: usize) -> Result<Presentation> {
        check_index("component", i, self.spans.len())?;
        let span = &self.spans[i];
        let names = self.total.alphabet().names()[span.generators.clone()]
            .iter()
            .map(|n| n.rsplit_once('@').map_or(n.as_str(), |(head, _)| head).to_string());
        let alphabet = Alphabet::new(names)?;
        let start = span.generators.start;
        let relators = self.total.relators()[span.relators.clone()]
            .iter()
            .map(|r| r.relabel(|g| g - start))
            .collect();
        Presentation::new(alphabet, relators)
    }

    /// Span `i` now carries component `i + j (mod n)`.
    pub fn rotated(&self, j: i64) -> PinwheelModel {
        let n = self.components.len() as i64;
        let shift = j.rem_euclid(n) as usize;
        let components = (0..self.components.len())
            .map(|i| self.components[(i + shift) % self.components.len()].clone())
            .collect();
        PinwheelModel::assemble(components)
    }
}

pub fn pinwheel(mc: &MulticorkModel) -> Result<PinwheelModel> {
    mc.components.iter().try_for_each(check_cork)?;
    let pw = PinwheelModel::assemble(mc.components.clone());
    check_cork(&pw.total)?;
    Ok(pw)
}

/// The presentation obtained by replacing each `C_i` with `C_{i+j}`.
pub fn pinwheel_twist(pw: &PinwheelModel, j: i64) -> Presentation {
    pw.rotated(j).total
}

/// `r_i = x_i ∏_j [a_ij, b_ij]` for each listed relator index `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CommutatorDecomposition {
    pub entries: BTreeMap<usize, Vec<(Word, Word)>>,
}

impl CommutatorDecomposition {
    pub fn new(entries: BTreeMap<usize, Vec<(Word, Word)>>) -> Self {
        CommutatorDecomposition { entries }
    }

    /// `x_i ∏_j [a_ij, b_ij]`.
    pub fn product(&self, i: usize) -> Option<Word> {
        let pairs = self.entries.get(&i)?;
        Some(
            pairs
                .iter()
                .fold(Word::generator(i), |acc, (a, b)| &acc * &Word::commutator(a, b)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CertificateFactor {
    pub sign: i8,
    pub relator: usize,
    pub conjugator: Word,
}

/// A word written as `∏ c · r^sign · c⁻¹` over the relators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NormalClosureCertificate {
    pub factors: Vec<CertificateFactor>,
}

impl NormalClosureCertificate {
    pub fn new(factors: Vec<CertificateFactor>) -> Self {
        NormalClosureCertificate { factors }
    }

    /// The product the certificate denotes, or `None` on a bad index.
    pub fn evaluate(&self, p: &Presentation) -> Option<Word> {
        self.factors.iter().try_fold(Word::identity(), |acc, f| {
            let r = p.relators().get(f.relator)?;
            Some(&acc * &signed(r, f.sign).conjugate(&f.conjugator))
        })
    }
}

pub fn verify_decomposition(p: &Presentation, d: &CommutatorDecomposition) -> bool {
    d.entries
        .keys()
        .all(|&i| i < p.generator_count() && i < p.relator_count() && d.product(i).as_ref() == Some(&p.relators()[i]))
}

pub fn verify_certificate(p: &Presentation, target: &Word, cert: &NormalClosureCertificate) -> bool {
    cert.factors.iter().all(|f| f.sign == 1 || f.sign == -1) && cert.evaluate(p).as_ref() == Some(target)
}

/// Certificates for the `b_ij`, keyed by `(i, j)` (both 0-based).
pub type CertificateMap = BTreeMap<(usize, usize), NormalClosureCertificate>;

/// Rewrites each decomposed relator `r_i` to the literal generator `x_i`.
///
/// One cancelling 2/3 pair is added per commutator. Each extra 2-handle is
/// single-slid over the handles named by its certificate until its relator
/// is `b_ij`; then `H_i` is double-slid over the extra handles along
/// `(a_ij, 1)`, stripping the commutators from the right.
pub fn encase(
    bp: &BiPresentation,
    d: &CommutatorDecomposition,
    certs: &CertificateMap,
) -> Result<(BiPresentation, MoveScript)> {
    let base = bp.presentation();
    if !verify_decomposition(&base, d) {
        return Err(Error::Verification(
            "commutator decomposition does not match the relators".into(),
        ));
    }
    let handles = bp.pairs().len();
    let mut extras: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&i, pairs) in &d.entries {
        for (j, (_, b)) in pairs.iter().enumerate() {
            let cert = certs
                .get(&(i, j))
                .ok_or_else(|| Error::Verification(format!("missing certificate for b({}, {})", i + 1, j + 1)))?;
            if !verify_certificate(&base, b, cert) {
                return Err(Error::Verification(format!(
                    "certificate for b({}, {}) does not verify",
                    i + 1,
                    j + 1
                )));
            }
            extras.insert((i, j), handles + extras.len());
        }
    }

    let mut state = bp.clone();
    let mut script = MoveScript::default();
    let mut run = |state: &mut BiPresentation, token: MoveToken| -> Result<()> {
        *state = state.apply_move(&token)?;
        script.push(token);
        Ok(())
    };
    for _ in 0..extras.len() {
        run(&mut state, MoveToken::AddCancellingPairDual)?;
    }
    for (key, &e) in &extras {
        for f in &certs[key].factors {
            run(
                &mut state,
                MoveToken::SingleSlide {
                    i: e,
                    j: f.relator,
                    c: f.conjugator.clone(),
                    sign: f.sign,
                },
            )?;
        }
    }
    for (&i, pairs) in &d.entries {
        for (j, (a, _)) in pairs.iter().enumerate().rev() {
            run(
                &mut state,
                MoveToken::DoubleSlide {
                    i,
                    j: extras[&(i, j)],
                    c: a.clone(),
                    sign: -1,
                },
            )?;
        }
    }
    for &i in d.entries.keys() {
        if state.pairs()[i].relator != Word::generator(i) {
            return Err(Error::Verification(format!(
                "relator {} did not reduce to its generator",
                i + 1
            )));
        }
    }
    Ok((state, script))
}

/// Relator moves making the top `k × k` block of the abelianization matrix
/// the identity (and the rows below it zero).
pub fn homological_pairing(p: &Presentation) -> Result<(Presentation, MoveScript)> {
    let (k, l) = (p.generator_count(), p.relator_count());
    let h = homology(p);
    if !h.is_trivial() {
        return Err(Error::HomologyObstruction(format!("H1 = {h}")));
    }
    debug_assert!(l >= k);
    let mut m = abelianization_matrix(p).to_rows();
    let mut state = p.clone();
    let mut script = MoveScript::default();
    let mut emit = |state: &mut Presentation, m: &mut Vec<Vec<i64>>, token: MoveToken| -> Result<()> {
        match &token {
            MoveToken::SwapRelators { i, j } => m.swap(*i, *j),
            MoveToken::InvertRelator { i } => m[*i].iter_mut().for_each(|v| *v = -*v),
            MoveToken::MultiplyRelator { i, j, sign, .. } => {
                let src = m[*j].clone();
                m[*i].iter_mut().zip(src).for_each(|(v, s)| *v += i64::from(*sign) * s);
            }
            _ => unreachable!("pairing only uses relator moves"),
        }
        *state = state.apply_move(&token)?;
        script.push(token);
        Ok(())
    };
    // row[dst] -= q row[src] as |q| relator multiplications
    let subtract = |state: &mut Presentation,
                    m: &mut Vec<Vec<i64>>,
                    emit: &mut dyn FnMut(&mut Presentation, &mut Vec<Vec<i64>>, MoveToken) -> Result<()>,
                    dst: usize,
                    src: usize,
                    q: i64|
     -> Result<()> {
        let sign = if q > 0 { -1 } else { 1 };
        for _ in 0..q.unsigned_abs() {
            emit(
                state,
                m,
                MoveToken::MultiplyRelator {
                    i: dst,
                    j: src,
                    c: Word::identity(),
                    sign,
                },
            )?;
        }
        Ok(())
    };

    for col in 0..k {
        loop {
            let pivot = (col..l).filter(|&r| m[r][col] != 0).min_by_key(|&r| m[r][col].abs());
            let Some(pr) = pivot else {
                return Err(Error::HomologyObstruction(format!("column {} has no pivot", col + 1)));
            };
            if pr != col {
                emit(&mut state, &mut m, MoveToken::SwapRelators { i: col, j: pr })?;
            }
            let mut clean = true;
            for r in col + 1..l {
                let q = m[r][col] / m[col][col];
                subtract(&mut state, &mut m, &mut emit, r, col, q)?;
                clean &= m[r][col] == 0;
            }
            if clean {
                break;
            }
        }
        if m[col][col] < 0 {
            emit(&mut state, &mut m, MoveToken::InvertRelator { i: col })?;
        }
        if m[col][col] != 1 {
            return Err(Error::HomologyObstruction(format!(
                "pivot {} in column {}",
                m[col][col],
                col + 1
            )));
        }
        for r in 0..col {
            let q = m[r][col];
            subtract(&mut state, &mut m, &mut emit, r, col, q)?;
        }
    }
    Ok((state, script))
}
