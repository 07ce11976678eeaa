//! Writes the region map and the J1 gap grid as CSV through the CLI entry
//! point, into `out/plotdata` (or `$STARCC_OUT_DIR`).

use clap::Parser;
use starcc::cli::{run, Cli};

fn main() {
    let dir = std::env::var("STARCC_OUT_DIR").unwrap_or_else(|_| "out/plotdata".into());
    for args in [["plotdata", "regions", "300"], ["plotdata", "gap-J1", "200"], ["plotdata", "geometry", "1"]] {
        let cli = Cli::parse_from(["starcc", "--out-dir", &dir].into_iter().chain(args));
        if let Err(e) = run(cli) {
            eprintln!("{e}");
            std::process::exit(e.exit_code().into());
        }
    }
}
