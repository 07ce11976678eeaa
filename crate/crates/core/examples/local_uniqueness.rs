//! Krawczyk test on B0 = [1-δ, 1+δ]² for a range of δ.

use starcc::certify::certify_local_uniqueness;

fn main() {
    for delta in [0.005, 0.01, 0.02, 0.03, 0.05] {
        match certify_local_uniqueness(delta) {
            Ok(c) => {
                let k = c.krawczyk.get().unwrap();
                println!(
                    "δ = {delta}: contracts, ‖I - CJ‖ ≤ {:.4}, K = [{:.6}, {:.6}] x [{:.6}, {:.6}]",
                    c.contraction_norm.0,
                    k.r3.lo(),
                    k.r3.hi(),
                    k.r5.lo(),
                    k.r5.hi()
                );
            }
            Err(e) => println!("δ = {delta}: {e}"),
        }
    }
}
