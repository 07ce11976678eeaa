//! Multi-start Newton scan over [0.2, 3]² and over a window that excludes
//! the pentagon.
//!
//! cargo run --release --example scan -- [n_starts]

use starcc::solver::{grid_scan, Window};

fn main() {
    let n = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    for window in [Window::square(0.2, 3.0), Window::new([1.1, 3.0], [0.2, 3.0])] {
        let r = grid_scan(&window, n, 1e-12);
        println!("window {:?} x {:?}, {n} starts: {:?}", window.r3, window.r5, r.stats);
        for root in &r.roots {
            println!("  root ({:.15}, {:.15}) spread {:.2e} y1 {:.2e}", root.r3, root.r5, root.spread, root.y1);
        }
        if r.roots.is_empty() {
            println!("  no roots");
        }
    }
}
