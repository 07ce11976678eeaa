use std::sync::OnceLock;

use super::Interval;

/// Enclosures of the golden constants and of `cos`, `sin` at the five star
/// angles `2πk/5`, all derived from an enclosure of `√5`.
#[derive(Debug, Clone, Copy)]
pub struct PentagonConstants {
    pub sqrt5: Interval,
    /// `√5 + 1`
    pub a: Interval,
    /// `√5 - 1`
    pub b: Interval,
    /// `a / 2`, the golden ratio.
    pub phi: Interval,
    pub half_b: Interval,
    pub two_over_a: Interval,
    pub two_over_b: Interval,
    pub cos: [Interval; 5],
    pub sin: [Interval; 5],
}

pub fn pentagon_constants() -> &'static PentagonConstants {
    static CONSTS: OnceLock<PentagonConstants> = OnceLock::new();
    CONSTS.get_or_init(build)
}

fn build() -> PentagonConstants {
    let one = Interval::ONE;
    let two = Interval::point(2.0);
    let sqrt5 = Interval::point(5.0).sqrt().expect("5 > 0");
    let a = sqrt5 + one;
    let b = sqrt5 - one;
    let quarter = |x: Interval| x * Interval::point(0.25);
    let half = |x: Interval| x * Interval::point(0.5);

    // cos 72° = b/4, cos 144° = -a/4; the sines follow from sin² = 1 - cos²
    // and are positive in the upper half plane.
    let c1 = quarter(b);
    let c2 = -quarter(a);
    let s1 = (one - c1.sqr()).sqrt().expect("|cos| < 1");
    let s2 = (one - c2.sqr()).sqrt().expect("|cos| < 1");

    PentagonConstants {
        sqrt5,
        a,
        b,
        phi: half(a),
        half_b: half(b),
        two_over_a: two.checked_div(a).expect("a > 0"),
        two_over_b: two.checked_div(b).expect("b > 0"),
        cos: [one, c1, c2, c2, c1],
        sin: [Interval::ZERO, s1, s2, -s2, -s1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps(x: Interval) -> f64 {
        x.width() / (f64::EPSILON * x.mag())
    }

    #[test]
    fn golden_constants_are_tight() {
        let k = pentagon_constants();
        assert!(k.b.lo() >= 1.236_067_9 && k.b.hi() <= 1.236_068_0);
        assert!(k.b.contains(5f64.sqrt() - 1.0));
        for x in [k.sqrt5, k.a, k.b, k.phi, k.half_b] {
            assert!(ulps(x) <= 4.0, "{x:?}");
        }
    }

    #[test]
    fn trig_enclosures_contain_known_values() {
        let k = pentagon_constants();
        assert!(k.cos[1].contains(0.309_016_994_374_947_4));
        assert!(k.sin[1].contains(0.951_056_516_295_153_5));
        assert!(k.cos[2].contains(-0.809_016_994_374_947_5));
        assert!(k.sin[2].contains(0.587_785_252_292_473_1));
        for i in 0..5 {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
            // Floating cos/sin are within a couple of ulps of the truth.
            let c = theta.cos();
            let s = theta.sin();
            assert!((k.cos[i].mid() - c).abs() < 1e-15, "cos {i}");
            assert!((k.sin[i].mid() - s).abs() < 1e-15, "sin {i}");
            assert!(ulps(k.cos[i]) <= 4.0);
            if i > 0 {
                assert!(ulps(k.sin[i]) <= 4.0, "sin {i}: {:?}", k.sin[i]);
            }
        }
    }

    #[test]
    fn ratio_constants_agree() {
        let k = pentagon_constants();
        // 2/a + 1 = 2/b
        assert!((k.two_over_a + Interval::ONE)
            .intersect(&k.two_over_b)
            .is_some());
        assert!(k.two_over_b.contains(1.618_033_988_749_895));
    }
}
