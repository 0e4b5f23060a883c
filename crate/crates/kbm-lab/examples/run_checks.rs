//! Runs verification checks at their default parameters and prints each
//! component with its timing.
//!
//! ```text
//! cargo run --release --example run_checks -- ergodic density
//! ```

use kbm_lab::checks::{run_check, CheckParams, CHECK_NAMES};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if args.is_empty() { CHECK_NAMES.to_vec() } else { args.iter().map(String::as_str).collect() };
    for name in names {
        let start = Instant::now();
        match run_check(name, &CheckParams::default()) {
            Ok(out) => {
                let r = &out.report;
                println!("{name} (criterion {}): {} in {:.1}s", r.criterion, if r.pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
                for c in &r.components {
                    println!("  {:<4} {} = {:.6e} (target {:.6e}, tolerance {})", if c.pass { "ok" } else { "FAIL" }, c.name, c.statistic, c.target, c.tolerance);
                }
            }
            Err(e) => println!("{name}: error: {e}"),
        }
    }
}
