//! Every oracle comparison in one report, as `renewal validate` prints it.

use renewal::validate::{run, Suite};

fn main() {
    let report = run(Suite::All, 42, 20_000);
    print!("{}", report.table());
    println!("{}", if report.passed() { "all checks passed" } else { "some checks failed" });
}
