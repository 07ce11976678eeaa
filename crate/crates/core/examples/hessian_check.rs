//! Hessian of the configuration measure at (1, 1) against its closed forms,
//! for a few finite-difference steps.

use starcc::model::FreePoint;
use starcc::potential::{det2, hessian_measure, pentagon_hessian_closed_form};

fn main() {
    let (closed, det_closed) = pentagon_hessian_closed_form();
    println!("closed form: {closed:?}, det {det_closed}");
    for h in [1e-2, 1e-3, 1e-4, 1e-5] {
        let m = hessian_measure(FreePoint::PENTAGON, h).unwrap();
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        println!(
            "h = {h:e}: H33 {:.3e}  H35 {:.3e}  H55 {:.3e}  det {:.3e} (relative errors)",
            rel(m[0][0], closed[0][0]),
            rel(m[0][1], closed[0][1]),
            rel(m[1][1], closed[1][1]),
            rel(det2(&m), det_closed)
        );
    }
}
