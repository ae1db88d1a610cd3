use crate::field::Point;

/// The optimal planar non-degeneracy constant, `1/(4e)`: the largest `c` such
/// that a shell infimum above `-c·r²` forces positivity of the maximal
/// solution at the center.
pub fn c2() -> f64 {
    0.25 / std::f64::consts::E
}

/// Dimension-indexed constants of the non-degeneracy comparison. Only the
/// planar value is known in closed form.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub n: u32,
}

impl Constants {
    pub fn new(n: u32) -> Self {
        assert!(n >= 2, "dimension must be at least 2");
        Constants { n }
    }

    pub fn nondegeneracy(&self) -> Option<f64> {
        (self.n == 2).then(c2)
    }
}

/// The stationary pulse: a paraboloid on the unit ball glued C¹ to a
/// harmonic tail outside. Solves the unstable obstacle equation globally and
/// serves as the comparison barrier in every non-degeneracy argument.
pub fn pulse_profile(radius: f64, n: u32) -> f64 {
    assert!(n >= 2, "dimension must be at least 2");
    let s = radius;
    if n == 2 {
        if s <= 1.0 {
            (1.0 - s * s) / 4.0
        } else {
            -(s * s).ln() / 4.0
        }
    } else {
        let nf = n as f64;
        if s <= 1.0 {
            (1.0 - s * s) / (2.0 * nf)
        } else {
            // the n(n-2) denominator is what makes the radial derivative
            // -1/n from both sides of the gluing sphere; it degenerates to
            // the -log(s²)/4 tail as n -> 2
            (s.powf(2.0 - nf) - 1.0) / (nf * (nf - 2.0))
        }
    }
}

/// Planar stationary pulse at a point.
pub fn pulse(p: Point) -> f64 {
    pulse_profile((p[0] * p[0] + p[1] * p[1]).sqrt(), 2)
}
