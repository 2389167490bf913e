//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use handlecalc::cli;
use handlecalc::corkcalc::{
    encase, mu, pinwheel, pinwheel_twist, CertificateFactor, CertificateMap, CommutatorDecomposition, MulticorkModel,
    NormalClosureCertificate,
};
use handlecalc::format::Document;
use handlecalc::presentation::{
    abelianization_matrix, count_homomorphisms, homology, is_ac_structure, smith_normal_form, standard_test_groups,
    HandlePair, DEFAULT_HOM_BUDGET,
};
use handlecalc::search::{scramble, trivialization_search, SearchBudget};
use handlecalc::{Alphabet, BiPresentation, Letter, Movable, Presentation, SlidePath, Word};
use rand::seq::SliceRandom;
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// Homomorphism counts to the test groups plus SNF invariants.
fn oracle_invariants(p: &Presentation) -> (Vec<u64>, Vec<i64>) {
    let counts = standard_test_groups()
        .iter()
        .map(|g| count_homomorphisms(p, g, DEFAULT_HOM_BUDGET).expect("small presentations fit the budget"))
        .collect();
    (counts, smith_normal_form(&abelianization_matrix(p)).invariants)
}

fn move_invariance() -> Verdict {
    let start = Instant::now();
    let (mut presentations, mut moves, mut violations) = (0, 0, 0);
    for seed in 0..500 {
        let mut rng = rng(1_000 + seed);
        let k = rng.gen_range(1..=3);
        let mut state = random_presentation(&mut rng, k, k, 10);
        let expected = oracle_invariants(&state);
        presentations += 1;
        let mut applied = 0;
        while applied < 20 {
            let Some(t) = random_move(&mut rng, &state, 2, false) else {
                break;
            };
            let Ok(next) = state.apply_move(&t) else { continue };
            state = next;
            applied += 1;
            moves += 1;
            if oracle_invariants(&state) != expected {
                violations += 1;
            }
        }
        if applied < 20 {
            violations += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && presentations >= 500 && elapsed < Duration::from_secs(300),
        format!(
            "{presentations} presentations, {moves} moves, {violations} violations, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn slide_laws() -> Verdict {
    let (mut checks, mut mismatches) = (0, 0);
    for seed in 0..1_000 {
        let mut rng = rng(2_000 + seed);
        let n = rng.gen_range(2..=4);
        let bp = random_bi(&mut rng, n, 7);
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = random_word(&mut rng, bp.primary().rank(), 3);
        let c_star = random_word(&mut rng, bp.dual().letter_count(), 3);
        let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let out = bp
            .general_slide(i, j, &SlidePath::new(c.clone(), c_star.clone()), sign)
            .unwrap();

        let raw = |w: &Word| w.letters().to_vec();
        let r = |m: usize| raw(&bp.pairs()[m].relator);
        let d = |m: usize| raw(&bp.pairs()[m].dual_relator);
        let rj = if sign > 0 { r(j) } else { invert_raw(&r(j)) };
        let di = if sign > 0 { invert_raw(&d(i)) } else { d(i) };
        let want_r = expand_and_reduce(&[r(i), raw(&c), rj, invert_raw(&raw(&c))]);
        let want_d = expand_and_reduce(&[d(j), invert_raw(&raw(&c_star)), di, raw(&c_star)]);
        checks += 1;
        let mut ok = out.pairs()[i].relator.letters() == want_r.as_slice()
            && out.pairs()[j].dual_relator.letters() == want_d.as_slice();
        for m in 0..n {
            ok &= m == i || out.pairs()[m].relator == bp.pairs()[m].relator;
            ok &= m == j || out.pairs()[m].dual_relator == bp.pairs()[m].dual_relator;
        }
        mismatches += usize::from(!ok);

        let out = bp.double_slide(i, j, &c, sign).unwrap();
        let want_r = if sign > 0 {
            expand_and_reduce(&[r(i), raw(&c), r(j), invert_raw(&raw(&c)), invert_raw(&r(j))])
        } else {
            expand_and_reduce(&[r(i), r(j), raw(&c), invert_raw(&r(j)), invert_raw(&raw(&c))])
        };
        checks += 1;
        let duals_fixed = out.dual_relators().eq(bp.dual_relators());
        let others = (0..n).all(|m| m == i || out.pairs()[m].relator == bp.pairs()[m].relator);
        mismatches += usize::from(!(duals_fixed && others && out.pairs()[i].relator.letters() == want_r.as_slice()));
    }
    verdict(
        mismatches == 0,
        format!("{checks} slide checks on 1000 bi-presentations, {mismatches} mismatches"),
    )
}

/// True when each relator's cyclic core is a single letter and the
/// letters cover every generator once.
fn is_visibly_trivial(p: &Presentation) -> bool {
    let mut seen = vec![false; p.generator_count()];
    p.relator_count() == p.generator_count()
        && p.relators().iter().all(|r| match cyclic_core(r.letters()).as_slice() {
            [l] => !std::mem::replace(&mut seen[l.index()], true),
            _ => false,
        })
}

fn round_trip_search() -> Verdict {
    let trivial = Presentation::trivial(2);
    let (mut found, mut total, mut bad) = (0, 0, 0);
    let mut per_k = Vec::new();
    for k in 1..=6 {
        let mut hits = 0;
        for seed in 0..50 {
            let (q, _) = scramble(&trivial, k, 7_000 + seed, 1).unwrap();
            let budget = SearchBudget::breadth_first(k, 5_000_000);
            let out = trivialization_search(&q, &budget).unwrap();
            total += 1;
            if let Some(script) = out.result {
                match script.fold(&q) {
                    Ok(end) if is_visibly_trivial(&end) => {
                        hits += 1;
                        found += 1;
                    }
                    _ => bad += 1,
                }
            }
        }
        per_k.push(format!("k={k}:{hits}/50"));
    }
    verdict(
        found == total && bad == 0,
        format!("{found}/{total} recovered, {bad} bad scripts ({})", per_k.join(" ")),
    )
}

fn trivial_bi(k: usize) -> BiPresentation {
    let pairs = (0..k)
        .map(|i| HandlePair::new(Word::generator(i), Word::generator(i)))
        .collect();
    let dual = Alphabet::new((1..=k).map(|i| format!("a{i}"))).unwrap();
    BiPresentation::new(Alphabet::standard(k), dual, pairs).unwrap()
}

/// A perturbed trivial bi-presentation with its decomposition and
/// certificates.
fn encase_instance(seed: u64) -> (BiPresentation, CommutatorDecomposition, CertificateMap) {
    let mut rng = rng(4_000 + seed);
    let k = rng.gen_range(2..=4);
    let mut handles: Vec<usize> = (0..k).collect();
    handles.shuffle(&mut rng);
    let split = rng.gen_range(1..k);
    let (perturbed, untouched) = handles.split_at(split);
    let mut bp = trivial_bi(k);
    let mut entries: BTreeMap<usize, Vec<(Word, Word)>> = BTreeMap::new();
    let mut certs = CertificateMap::new();
    let by_slides = seed.is_multiple_of(2);
    for &i in perturbed {
        let mut pairs = Vec::new();
        for j in 0..rng.gen_range(1..=3) {
            let m = *untouched.choose(&mut rng).unwrap();
            let a = random_word(&mut rng, k, 2);
            let (b, cert) = if by_slides {
                bp = bp.double_slide(i, m, &a, 1).unwrap();
                let cert = vec![CertificateFactor {
                    sign: 1,
                    relator: m,
                    conjugator: Word::identity(),
                }];
                (Word::generator(m), cert)
            } else {
                let factors: Vec<CertificateFactor> = (0..rng.gen_range(1..=3))
                    .map(|_| CertificateFactor {
                        sign: if rng.gen_bool(0.5) { 1 } else { -1 },
                        relator: *untouched.choose(&mut rng).unwrap(),
                        conjugator: random_word(&mut rng, k, 2),
                    })
                    .collect();
                let relators: Vec<Word> = (0..k).map(Word::generator).collect();
                let cert = NormalClosureCertificate::new(factors.clone());
                (Word::reduce(certificate_product(&relators, &cert)), factors)
            };
            certs.insert((i, j), NormalClosureCertificate::new(cert));
            pairs.push((a, b));
        }
        entries.insert(i, pairs);
    }
    let d = CommutatorDecomposition::new(entries);
    if !by_slides {
        let mut pairs = bp.pairs().to_vec();
        for &i in d.entries.keys() {
            pairs[i].relator = d.product(i).unwrap();
        }
        bp = BiPresentation::new(bp.primary().clone(), bp.dual().clone(), pairs).unwrap();
    }
    (bp, d, certs)
}

fn encasement() -> Verdict {
    let (mut inputs, mut slid, mut failures) = (0, 0, 0);
    for seed in 0..200 {
        let (bp, d, certs) = encase_instance(seed);
        inputs += 1;
        slid += usize::from(seed % 2 == 0);
        let ok = match encase(&bp, &d, &certs) {
            Ok((out, script)) => {
                let literal = d.entries.keys().all(|&i| out.pairs()[i].relator == Word::generator(i));
                let refolds = script.fold(&bp).ok().as_ref() == Some(&out);
                let invariants = oracle_invariants(&bp.presentation()) == oracle_invariants(&out.presentation());
                literal && refolds && invariants
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    verdict(
        failures == 0 && slid >= 100,
        format!("{inputs} constructed inputs ({slid} by double slides), {failures} failures"),
    )
}

fn pinwheel_algebra() -> Verdict {
    let (mut cases, mut failures) = (0, 0);
    for seed in 0..100 {
        let mut rng = rng(5_000 + seed);
        let n = rng.gen_range(1..=5);
        let components: Vec<Presentation> = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=3);
                random_ac_presentation(&mut rng, k)
            })
            .collect();
        let pw = pinwheel(&MulticorkModel::new(components.clone()).unwrap()).unwrap();
        let ni = n as i64;
        let mut ok = pinwheel_twist(&pw, 0) == *pw.total() && pinwheel_twist(&pw, ni) == *pw.total();
        for j in -ni..=2 * ni {
            for j2 in -ni..=2 * ni {
                ok &= pinwheel_twist(&pw.rotated(j), j2) == pinwheel_twist(&pw, (j + j2).rem_euclid(ni));
            }
            let twisted = pw.rotated(j);
            for i in 0..n {
                let want = &components[(i + j.rem_euclid(ni) as usize) % n];
                ok &= twisted.restrict(i).ok().as_ref() == Some(want);
            }
        }
        let constant = pinwheel(&mu(&components[0], n).unwrap()).unwrap();
        for j in -ni..=2 * ni {
            ok &= pinwheel_twist(&constant, j) == *constant.total();
        }
        cases += 1;
        failures += usize::from(!ok);
    }
    verdict(
        failures == 0,
        format!("{cases} multicorks of order 1..5, {failures} failures"),
    )
}

/// Largest matching by trying every assignment of relators to unused
/// generators (or to nothing).
fn brute_matching(options: &[Vec<usize>], used: &mut Vec<bool>, at: usize) -> usize {
    if at == options.len() {
        return 0;
    }
    let mut best = brute_matching(options, used, at + 1);
    for &g in &options[at] {
        if !used[g] {
            used[g] = true;
            best = best.max(1 + brute_matching(options, used, at + 1));
            used[g] = false;
        }
    }
    best
}

fn ac_recognition() -> Verdict {
    let mut rng = rng(6_000);
    let (mut instances, mut disagreements) = (0, 0);
    for _ in 0..12_000 {
        let k = rng.gen_range(1..=4);
        let l = rng.gen_range(0..=4);
        let relators: Vec<Word> = (0..l)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    let c = random_word(&mut rng, k, 2);
                    Word::letter(Letter::new(rng.gen_range(0..k), rng.gen_bool(0.5))).conjugate(&c)
                } else {
                    random_word(&mut rng, k, 6)
                }
            })
            .collect();
        let p = Presentation::new(Alphabet::standard(k), relators).unwrap();
        let options: Vec<Vec<usize>> = p
            .relators()
            .iter()
            .map(|r| match cyclic_core(r.letters()).as_slice() {
                [letter] => vec![letter.index()],
                _ => vec![],
            })
            .collect();
        let best = brute_matching(&options, &mut vec![false; k], 0);
        let type1 = k >= l && best == l;
        let type2 = k <= l && best == k;
        let status = is_ac_structure(&p);
        let mut ok = status.type1 == type1 && status.type2 == type2;
        if let Some(m) = &status.matching {
            let mut gens: Vec<usize> = m.iter().map(|x| x.generator).collect();
            gens.sort_unstable();
            gens.dedup();
            ok &= m.len() == best && gens.len() == best;
            ok &= m.iter().all(|x| {
                Word::letter(Letter::new(x.generator, x.inverse)).conjugate(&x.conjugator) == p.relators()[x.relator]
            });
        } else {
            ok &= !(type1 || type2);
        }
        instances += 1;
        disagreements += usize::from(!ok);
    }
    verdict(
        disagreements == 0,
        format!("{instances} presentations, {disagreements} disagreements"),
    )
}

fn ak2() -> Verdict {
    let a = Alphabet::new(["x", "y"]).unwrap();
    let p = Presentation::new(
        a.clone(),
        vec![
            a.word(&[("x", 2), ("y", -3)]).unwrap(),
            a.word(&[("x", 1), ("y", 1), ("x", 1), ("y", -1), ("x", -1), ("y", -1)])
                .unwrap(),
        ],
    )
    .unwrap();
    let matrix = abelianization_matrix(&p).to_rows();
    let snf = smith_normal_form(&abelianization_matrix(&p)).invariants;
    let status = is_ac_structure(&p);
    let budget = SearchBudget::default();
    let search = trivialization_search(&p, &budget).unwrap();
    let pass = matrix == vec![vec![2, -3], vec![1, -1]]
        && snf == vec![1, 1]
        && homology(&p).is_trivial()
        && !status.type1
        && !status.type2
        && search.result.is_none()
        && search.nodes_expanded <= budget.max_nodes;
    verdict(
        pass,
        format!(
            "matrix {matrix:?}, snf {snf:?}, h1 {}, ac ({}, {}), search {} after {} expansions",
            homology(&p),
            status.type1,
            status.type2,
            if search.result.is_some() { "found" } else { "exhausted" },
            search.nodes_expanded
        ),
    )
}

fn golden_cases() -> Vec<(String, Vec<String>, String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.ok()?.file_name().into_string().ok()?;
            name.strip_suffix(".args").map(str::to_string)
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let read = |ext: &str| std::fs::read_to_string(dir.join(format!("{name}.{ext}"))).unwrap_or_default();
            let args = read("args")
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            (name.clone(), args, read("in"), read("out"))
        })
        .collect()
}

fn transcript(args: &[String], input: &str) -> String {
    let mut argv = vec!["handlecalc".to_string()];
    argv.extend(args.iter().cloned());
    let out = cli::run(argv, input.as_bytes());
    let stderr: String = out.stderr.lines().map(|l| format!("stderr: {l}\n")).collect();
    format!("{}{stderr}exit: {}\n", out.stdout, out.code)
}

fn cli_round_trip() -> Verdict {
    let mut rng = rng(8_000);
    let (mut docs, mut broken) = (0, 0);
    for _ in 0..1_200 {
        let doc = random_document(&mut rng);
        let text = doc.print();
        docs += 1;
        match Document::parse(&text) {
            Ok(back) if back == doc && back.print() == text => {}
            _ => broken += 1,
        }
    }
    let cases = golden_cases();
    let subcommands = [
        "check",
        "invariants",
        "move",
        "slide",
        "pinwheel",
        "twist",
        "encase",
        "scramble",
        "trivialize",
        "certsearch",
    ];
    let covered = subcommands.iter().all(|s| {
        cases
            .iter()
            .any(|(_, args, _, _)| args.first().map(String::as_str) == Some(*s))
    });
    let mut unstable = 0;
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    std::env::set_current_dir(manifest).unwrap();
    for (_, args, input, expected) in &cases {
        for workers in ["1", "4", "1", "4"] {
            let mut with = args.clone();
            with.extend(["--workers".to_string(), workers.to_string()]);
            unstable += usize::from(transcript(&with, input) != *expected);
        }
    }
    verdict(
        broken == 0 && covered && unstable == 0 && !cases.is_empty(),
        format!(
            "{docs} documents, {broken} round-trip failures; {} golden transcripts, all subcommands covered: {covered}, {unstable} unstable runs",
            cases.len()
        ),
    )
}

fn main() {
    let checks: [(&str, fn() -> Verdict); 8] = [
        ("move invariance of homomorphism counts and SNF", move_invariance),
        ("slide-law exactness and dual-fixing double slides", slide_laws),
        ("scramble/trivialize round trip", round_trip_search),
        ("encasement correctness", encasement),
        ("pinwheel twist algebra", pinwheel_algebra),
        ("AC recognition against brute-force matching", ac_recognition),
        ("AK(2) desk checks", ak2),
        ("text format round trip and golden transcripts", cli_round_trip),
    ];
    let mut failed = 0;
    for (n, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {}. {name}: {} [{:.1}s]",
            n + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
