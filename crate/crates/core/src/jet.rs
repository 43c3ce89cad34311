//! Truncated Taylor arithmetic, used to differentiate entry-law potentials up
//! to sixth order without finite differences.

use std::ops::{Add, Mul, Neg, Sub};

/// Highest derivative order carried.
pub const ORDER: usize = 6;

/// Taylor coefficients `c[k] = f^{(k)}(x0) / k!` for `k <= ORDER`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; ORDER + 1]);

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = v;
        Jet(c)
    }

    /// The affine map `x -> slope * (x - x0) + value` expanded around `x0`.
    pub fn linear(value: f64, slope: f64) -> Self {
        let mut c = [0.0; ORDER + 1];
        c[0] = value;
        c[1] = slope;
        Jet(c)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn exp(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; ORDER + 1];
        b[0] = a[0].exp();
        for k in 1..=ORDER {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Jet(b)
    }

    pub fn ln(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; ORDER + 1];
        b[0] = a[0].ln();
        for k in 1..=ORDER {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * a[k - j]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet(b)
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Jet::constant(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// `|f|`, smooth away from zeros of `f`.
    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0) {
            *x += y;
        }
        Jet(c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.0[0] += rhs;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; ORDER + 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate().take(ORDER + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Jet(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_exp_of_square() {
        // f(x) = exp(x^2) at x = 0.5
        let x = Jet::linear(0.5, 1.0);
        let f = (x * x).exp();
        let e = 0.25f64.exp();
        assert!((f.derivative(1) - 2.0 * 0.5 * e).abs() < 1e-14);
        assert!((f.derivative(2) - (2.0 + 4.0 * 0.25) * e).abs() < 1e-13);
    }

    #[test]
    fn ln_inverts_exp() {
        let x = Jet::linear(0.3, 1.0);
        let g = (x * x * 2.0 + 1.0).ln().exp();
        let want = x * x * 2.0 + 1.0;
        for k in 0..=ORDER {
            assert!((g.0[k] - want.0[k]).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn sixth_derivative_of_log() {
        // d^6/dx^6 ln(1 - x) = -5!/(1-x)^6
        let x = Jet::linear(0.2, 1.0);
        let f = (-x + 1.0).ln();
        let want = -120.0 / 0.8f64.powi(6);
        assert!((f.derivative(6) - want).abs() < 1e-9 * want.abs());
    }
}
