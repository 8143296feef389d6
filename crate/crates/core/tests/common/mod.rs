//! Seeded instance generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use langinc::automata::Nfa;
use langinc::foundations::{Alphabet, Symbol, Word};
use langinc::grammar::{Cfg, GSym, Production};
use langinc::saturation::slp_lengths;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

pub fn word(a: &Alphabet, s: &str) -> Word {
    a.parse_word(s).unwrap()
}

pub const ANBN: &str = "vars: X1 X2 X3 X4\nstart: X1\nX1 -> EPS | X2 X3\nX2 -> a\nX3 -> X1 X4\nX4 -> b\n";

pub fn astar_bstar() -> Nfa {
    Nfa::parse("alphabet: a b\nstates: p q\ninitial: p\nfinal: p q\np a p\np b q\nq b q\n").unwrap()
}

pub fn anbn() -> Cfg {
    Cfg::parse_with_alphabet(ANBN, &ab()).unwrap()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_word(r: &mut ChaCha8Rng, k: usize, max_len: usize) -> Word {
    let n = r.gen_range(0..=max_len);
    Word((0..n).map(|_| Symbol(r.gen_range(0..k) as u32)).collect())
}

/// NFA with `1..=max_states` states over `a`, state 0 initial.
pub fn random_nfa(r: &mut ChaCha8Rng, a: &Alphabet, max_states: usize) -> Nfa {
    let n = r.gen_range(1..=max_states);
    let density = r.gen_range(0.2..0.6);
    let mut trans = Vec::new();
    for p in 0..n {
        for s in a.symbols() {
            for q in 0..n {
                if r.gen_bool(density) {
                    trans.push((p, s, q));
                }
            }
        }
    }
    let finals: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
    Nfa::new(a.clone(), names("q", n), 0, finals, trans).unwrap()
}

/// CNF grammar (X → YZ, X → a, start → ε), start variable 0.
pub fn random_cnf(r: &mut ChaCha8Rng, a: &Alphabet, max_vars: usize, max_prods: usize) -> Cfg {
    let n = r.gen_range(1..=max_vars);
    let m = r.gen_range(1..=max_prods);
    let mut prods = Vec::new();
    for _ in 0..m {
        let head = r.gen_range(0..n);
        let roll = r.gen_range(0..10);
        let body = if roll < 5 {
            vec![GSym::Var(r.gen_range(0..n)), GSym::Var(r.gen_range(0..n))]
        } else if roll < 9 || head != 0 {
            vec![GSym::Term(Symbol(r.gen_range(0..a.len()) as u32))]
        } else {
            vec![]
        };
        prods.push(Production::new(head, body));
    }
    Cfg::new(a.clone(), names("X", n), 0, prods).unwrap()
}

/// Right-regular grammar (X → Ya, X → a, X → ε).
pub fn random_rr(r: &mut ChaCha8Rng, a: &Alphabet, max_vars: usize, max_prods: usize) -> Cfg {
    let n = r.gen_range(1..=max_vars);
    let m = r.gen_range(1..=max_prods);
    let mut prods = Vec::new();
    for _ in 0..m {
        let head = r.gen_range(0..n);
        let t = GSym::Term(Symbol(r.gen_range(0..a.len()) as u32));
        let roll = r.gen_range(0..10);
        let body = if roll < 6 {
            vec![GSym::Var(r.gen_range(0..n)), t]
        } else if roll < 9 {
            vec![t]
        } else {
            vec![]
        };
        prods.push(Production::new(head, body));
    }
    Cfg::new(a.clone(), names("R", n), 0, prods).unwrap()
}

/// Grammar of arbitrary shape: bodies of length 0..=3 mixing variables
/// and terminals.
pub fn random_general(r: &mut ChaCha8Rng, a: &Alphabet, max_vars: usize, max_prods: usize) -> Cfg {
    let n = r.gen_range(1..=max_vars);
    let m = r.gen_range(1..=max_prods);
    let mut prods = Vec::new();
    for _ in 0..m {
        let head = r.gen_range(0..n);
        let len = r.gen_range(0..=3);
        let body = (0..len)
            .map(|_| {
                if r.gen_bool(0.5) {
                    GSym::Var(r.gen_range(0..n))
                } else {
                    GSym::Term(Symbol(r.gen_range(0..a.len()) as u32))
                }
            })
            .collect();
        prods.push(Production::new(head, body));
    }
    Cfg::new(a.clone(), names("G", n), 0, prods).unwrap()
}

/// Straight-line grammar whose word has length at most `max_len`. Variable
/// `i` only refers to variables `j > i`; rarely a variable gets no rule, which
/// makes the language empty.
pub fn random_slp(r: &mut ChaCha8Rng, a: &Alphabet, max_len: u64) -> Cfg {
    loop {
        let n = r.gen_range(1..=10);
        let mut prods = Vec::new();
        for i in 0..n {
            if r.gen_bool(0.03) {
                continue;
            }
            let len = r.gen_range(1..=3);
            let body = (0..len)
                .map(|_| {
                    if i + 1 < n && r.gen_bool(0.7) {
                        GSym::Var(r.gen_range(i + 1..n))
                    } else {
                        GSym::Term(Symbol(r.gen_range(0..a.len()) as u32))
                    }
                })
                .collect();
            prods.push(Production::new(i, body));
        }
        let g = Cfg::new(a.clone(), names("S", n), 0, prods).unwrap();
        match slp_lengths(&g).unwrap()[0] {
            Some(l) if l > max_len => continue,
            _ => return g,
        }
    }
}

/// `X_{d-1} → X_{d-2} X_{d-2}`, ..., `X_0 → a`: a single word of length 2^(d-1).
pub fn doubling_slp(depth: usize, a: &Alphabet) -> Cfg {
    let mut prods = vec![Production::new(depth - 1, vec![GSym::Term(Symbol(0))])];
    for i in 0..depth - 1 {
        prods.push(Production::new(i, vec![GSym::Var(i + 1), GSym::Var(i + 1)]));
    }
    Cfg::new(a.clone(), names("D", depth), 0, prods).unwrap()
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("langinc").chain(args.iter().copied());
    let code = langinc::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// `check` on two fixtures with extra flags.
pub fn check_fixtures(grammar: &str, automaton: &str, flags: &[&str]) -> (i32, String, String) {
    let g = fixture(grammar);
    let a = fixture(automaton);
    let mut args = vec!["check", "--grammar", g.to_str().unwrap(), "--automaton", a.to_str().unwrap()];
    args.extend_from_slice(flags);
    run_cli(&args)
}
