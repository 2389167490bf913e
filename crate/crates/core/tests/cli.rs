//! Golden transcripts for the command-line interface. Set `BLESS=1` to
//! rewrite the `.out` files.

use std::path::{Path, PathBuf};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn transcript(args: &[String], input: &str) -> String {
    let mut argv = vec!["handlecalc".to_string()];
    argv.extend(args.iter().cloned());
    let out = handlecalc::cli::run(argv, input.as_bytes());
    let stderr: String = out.stderr.lines().map(|l| format!("stderr: {l}\n")).collect();
    format!("{}{stderr}exit: {}\n", out.stdout, out.code)
}

#[test]
fn golden_transcripts() {
    std::env::set_current_dir(env!("CARGO_MANIFEST_DIR")).unwrap();
    let dir = golden_dir();
    let bless = std::env::var_os("BLESS").is_some();
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| {
            e.ok()?
                .file_name()
                .into_string()
                .ok()?
                .strip_suffix(".args")
                .map(str::to_string)
        })
        .collect();
    names.sort();
    assert!(!names.is_empty());
    let mut mismatched = Vec::new();
    for name in &names {
        let read = |ext: &str| std::fs::read_to_string(dir.join(format!("{name}.{ext}"))).unwrap_or_default();
        let args: Vec<String> = read("args")
            .lines()
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        let got = transcript(&args, &read("in"));
        assert_eq!(got, transcript(&args, &read("in")), "{name} is not deterministic");
        if bless {
            std::fs::write(dir.join(format!("{name}.out")), &got).unwrap();
        } else if got != read("out") {
            mismatched.push(name.clone());
            eprintln!("--- {name} ---\n{got}");
        }
    }
    assert!(mismatched.is_empty(), "transcripts differ: {mismatched:?}");
}

#[test]
fn worker_count_does_not_change_output() {
    let input = "gens: x y\nrel: x^-2 y^-1 x\nrel: x^-2 y^-1 x y\n";
    let run = |w: &str| {
        let args: Vec<String> = ["trivialize", "--bfs-depth", "3", "--workers", w]
            .map(String::from)
            .to_vec();
        transcript(&args, input)
    };
    assert_eq!(run("1"), run("4"));
}
