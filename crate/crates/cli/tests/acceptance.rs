//! The acceptance gate: every property over seeds 0 to 4 at full corpus size,
//! then a determinism check on the binary. One line per criterion.

use std::process::{Command, ExitCode};
use std::time::Instant;

use glue_core::signature::parse_signature;
use glue_core::suite::{self, Outcome, Property, SuiteConfig};

const SIG0: &str = include_str!("../../../sigs/sig0.sexp");
const SEEDS: std::ops::Range<u64> = 0..5;
const COUNT: usize = 1000;

/// Trials each property must reach per seed.
fn required(p: Property) -> usize {
    match p {
        Property::ReifyReflect | Property::Naturality => 500,
        Property::GluedSyntax => 300,
        _ => COUNT,
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sig = parse_signature(SIG0).expect("sig0 parses");
    let reports: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = SEEDS
            .map(|seed| {
                let cfg = SuiteConfig { count: COUNT, max_size: 30, max_depth: 3, ..SuiteConfig::new(sig.clone(), seed) };
                s.spawn(move || suite::run(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
    });

    let mut all_ok = true;
    for p in Property::ALL {
        let mut total: Option<Outcome> = None;
        let mut short = Vec::new();
        for r in &reports {
            let o = r.outcome(p);
            if o.trials < required(p) {
                short.push(format!("seed {} ran only {} trials", r.seed, o.trials));
            }
            match &mut total {
                Some(t) => t.merge(o),
                None => total = Some(o.clone()),
            }
        }
        let total = total.expect("at least one seed");
        let ok = total.passed() && short.is_empty();
        all_ok &= ok;
        println!(
            "{} criterion {:>2} {:<17} {} failures in {} trials over seeds 0-4",
            if ok { "PASS" } else { "FAIL" },
            p.number(),
            p.name(),
            total.failures,
            total.trials
        );
        for s in short {
            println!("     {s}");
        }
        if let Some(e) = &total.example {
            println!("     first counterexample: {e}");
        }
    }

    let fuzz = || {
        Command::new(env!("CARGO_BIN_EXE_glue"))
            .args(["fuzz", "--seed", "0"])
            .output()
            .expect("glue runs")
    };
    let (a, b) = (fuzz(), fuzz());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    all_ok &= ok;
    println!(
        "{} criterion 10 determinism       `glue fuzz --seed 0` twice: {} bytes, {}",
        if ok { "PASS" } else { "FAIL" },
        a.stdout.len(),
        if a.stdout == b.stdout { "identical" } else { "different" }
    );

    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
