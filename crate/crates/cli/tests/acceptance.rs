//! One pass/fail line per acceptance criterion; exits non-zero if any fails.

fn main() {
    let outcomes = nmm_cli::check::run(&[]);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
