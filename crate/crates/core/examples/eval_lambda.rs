//! Evaluates the nine λ values, y1 and the residual spread at a few points,
//! at the pentagon and at two reference points.
//!
//! cargo run --example eval_lambda -- [r3 r5]

use starcc::model::{close_center_of_mass, golden_b, FreePoint};
use starcc::potential::residual_vector;

fn show(p: FreePoint) {
    let radii = close_center_of_mass(p).expect("point in the domain");
    let rv = residual_vector(p).expect("point in the domain");
    println!("(r3, r5) = ({}, {}), radii {:?}", p.r3, p.r5, radii.0);
    for (idx, v) in &rv.lambda_values {
        println!("  {idx} = {v:.15}");
    }
    println!("  y1 = {:.3e}, spread = {:.3e}", rv.y1, rv.pairwise_spread);
}

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if let [r3, r5] = args[..] {
        show(FreePoint::new(r3, r5));
        return;
    }
    let b = golden_b();
    show(FreePoint::PENTAGON);
    show(FreePoint::new(b / 2.02, 1.0));
    show(FreePoint::new(b, 1.0));
}
