//! Acceptance suite: one line per criterion, non-zero exit if a binding
//! criterion fails.

use viscous_waves::verify;

fn main() {
    let outcomes = verify::run_all();
    println!();
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.id).collect();
    let warned = outcomes.iter().filter(|o| o.ok() && !o.passed).count();
    println!(
        "acceptance: {} passed, {} warned, {} failed",
        outcomes.len() - failed.len() - warned,
        warned,
        failed.len()
    );
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
