//! Periodic cubic Hermite interpolation on a uniform grid.

/// C1 piecewise cubic through `(x_j, values[j])` with `x_j = offset + j/n`,
/// matching `slopes[j]` at the nodes, extended with period one.
#[derive(Debug, Clone)]
pub struct PeriodicCubic {
    offset: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PeriodicCubic {
    pub fn with_slopes(offset: f64, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert_eq!(values.len(), slopes.len());
        assert!(values.len() >= 4, "periodic cubic needs at least 4 nodes");
        Self {
            offset,
            values,
            slopes,
        }
    }

    /// Node slopes from fourth-order central differences.
    pub fn from_values(offset: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 4, "periodic cubic needs at least 4 nodes");
        let inv_h = n as f64;
        let at = |i: isize| values[i.rem_euclid(n as isize) as usize];
        let slopes = (0..n as isize)
            .map(|i| (8.0 * (at(i + 1) - at(i - 1)) - (at(i + 2) - at(i - 2))) * inv_h / 12.0)
            .collect();
        Self::with_slopes(offset, values, slopes)
    }

    /// Value and first derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.values.len();
        let h = 1.0 / n as f64;
        let s = ((x - self.offset).rem_euclid(1.0)) * n as f64;
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        let j = (i + 1) % n;
        let (y0, y1) = (self.values[i], self.values[j]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[j] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let deriv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        (value, deriv)
    }
}
