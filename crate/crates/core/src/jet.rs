//! Truncated Taylor jets: a value together with its first three derivatives.
//!
//! Slots above `order` are not trusted; they are filled with NaN so that misuse shows up.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub d: [f64; 4],
    pub order: usize,
}

impl Jet {
    pub fn new(d: [f64; 4], order: usize) -> Self {
        let mut d = d;
        for slot in d.iter_mut().skip(order + 1) {
            *slot = f64::NAN;
        }
        Jet { d, order }
    }

    pub fn constant(c: f64) -> Self {
        Jet {
            d: [c, 0.0, 0.0, 0.0],
            order: 3,
        }
    }

    pub fn value(&self) -> f64 {
        self.d[0]
    }

    /// The jet of the derivative (one order lower).
    pub fn dx(&self) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        Jet::new([self.d[1], self.d[2], self.d[3], f64::NAN], self.order - 1)
    }

    /// Derivative with respect to `t` where `dt/dx = xi`.
    pub fn dt(&self, xi: Jet) -> Jet {
        self.dx() / xi
    }

    /// Compose with a scalar function given its value and first three derivatives at `self.value()`.
    pub fn compose(&self, h: [f64; 4]) -> Jet {
        let [_, f1, f2, f3] = self.d;
        Jet::new(
            [
                h[0],
                h[1] * f1,
                h[2] * f1 * f1 + h[1] * f2,
                h[3] * f1 * f1 * f1 + 3.0 * h[2] * f1 * f2 + h[1] * f3,
            ],
            self.order,
        )
    }

    pub fn exp(&self) -> Jet {
        let e = self.d[0].exp();
        self.compose([e, e, e, e])
    }

    pub fn recip(&self) -> Jet {
        let u = self.d[0];
        let r = 1.0 / u;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn powi(&self, k: i32) -> Jet {
        let mut out = Jet::constant(1.0);
        for _ in 0..k {
            out = out * *self;
        }
        out
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet::new(
            [c * self.d[0], c * self.d[1], c * self.d[2], c * self.d[3]],
            self.order,
        )
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(
            [
                self.d[0] + o.d[0],
                self.d[1] + o.d[1],
                self.d[2] + o.d[2],
                self.d[3] + o.d[3],
            ],
            self.order.min(o.order),
        )
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let [f0, f1, f2, f3] = self.d;
        let [g0, g1, g2, g3] = o.d;
        Jet::new(
            [
                f0 * g0,
                f1 * g0 + f0 * g1,
                f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
                f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
            ],
            self.order.min(o.order),
        )
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut d = self.d;
        d[0] += c;
        Jet {
            d,
            order: self.order,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: f64) -> Jet {
        Jet::new([x, 1.0, 0.0, 0.0], 3)
    }

    #[test]
    fn exp_of_square() {
        let x = 0.7;
        let j = (var(x) * var(x)).exp();
        let e = (x * x).exp();
        assert!((j.d[1] - 2.0 * x * e).abs() < 1e-14);
        assert!((j.d[2] - (2.0 + 4.0 * x * x) * e).abs() < 1e-13);
        assert!((j.d[3] - (12.0 * x + 8.0 * x * x * x) * e).abs() < 1e-12);
    }

    #[test]
    fn quotient_rule() {
        let x = 1.3;
        let j = Jet::constant(1.0) / var(x);
        assert!((j.d[3] + 6.0 / x.powi(4)).abs() < 1e-13);
    }

    #[test]
    fn order_is_tracked() {
        let a = Jet::new([1.0, 2.0, 3.0, 4.0], 2);
        let b = var(0.5);
        assert_eq!((a * b).order, 2);
        assert!((a * b).d[3].is_nan());
        assert_eq!(a.dx().order, 1);
    }
}
