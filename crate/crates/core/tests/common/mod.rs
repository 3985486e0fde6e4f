//! Exact rational evaluation of the stage game, used to freeze expected
//! values independently of the floating-point implementation.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn f(x: &Q) -> f64 {
    x.to_f64().unwrap()
}

#[derive(Clone)]
pub struct RationalGame {
    pub alpha: Q,
    pub c1: Q,
    pub c2: Q,
}

/// Polynomial in one variable, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).cloned().unwrap_or_else(Q::zero) + other.0.get(i).cloned().unwrap_or_else(Q::zero))
            .collect())
    }

    fn scale(&self, s: &Q) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

impl RationalGame {
    pub fn new(alpha: Q, c1: Q, c2: Q) -> Self {
        Self { alpha, c1, c2 }
    }

    /// `u_own(own, other)` straight from the payoff definition.
    pub fn payoff(&self, own: &Q, other: &Q) -> Q {
        let two = q(2, 1);
        &self.alpha * ((own + other) / &two + &self.c1 * own * other / &two) - &self.c2 * own * own
    }

    pub fn joint(&self, x1: &Q, x2: &Q) -> Q {
        self.payoff(x1, x2) + self.payoff(x2, x1)
    }

    /// Own-effort maximiser as the vertex of the concave quadratic
    /// `-c2 y^2 + b y + ...` with `b = alpha (1 + c1 x_other) / 2`.
    pub fn argmax_own(&self, other: &Q) -> Q {
        let b = &self.alpha * (Q::one() + &self.c1 * other) / q(2, 1);
        b / (q(2, 1) * &self.c2)
    }

    /// Symmetric fixed point of the linear best-response map
    /// `y = s + m x` with `s = alpha/(4 c2)`, `m = alpha c1/(4 c2)`.
    pub fn nash(&self) -> Q {
        let s = self.argmax_own(&Q::zero());
        let m = self.argmax_own(&Q::one()) - &s;
        s / (Q::one() - m)
    }

    /// Maximiser of `u(x, x)` along the diagonal, as a vertex.
    pub fn optimum(&self) -> Q {
        // u(x,x) = alpha x + (alpha c1 / 2 - c2) x^2 per player.
        let quad = &self.alpha * &self.c1 / q(2, 1) - &self.c2;
        -&self.alpha / (q(2, 1) * quad)
    }

    /// Smallest delta with `u_hat/(1-d) >= dev + d u*/(1-d)`, solved as the
    /// linear equation `u_hat = (1-d) dev + d u*`.
    pub fn critical_delta(&self) -> Q {
        let xh = self.optimum();
        let xs = self.nash();
        let u_hat = self.payoff(&xh, &xh);
        let u_star = self.payoff(&xs, &xs);
        let dev = self.payoff(&self.argmax_own(&xh), &xh);
        (dev.clone() - u_hat) / (dev - u_star)
    }

    /// `(1 - delta) (coop_pv - dev_pv)` as a polynomial in the target effort,
    /// built from payoffs only.
    pub fn indifference_poly(&self, delta: &Q) -> Poly {
        let two = q(2, 1);
        // u(x, x)
        let coop = Poly(vec![Q::zero(), self.alpha.clone(), &self.alpha * &self.c1 / &two - &self.c2]);
        // max_y u(y, x) = alpha x / 2 + b(x)^2 / (4 c2), b(x) = alpha (1 + c1 x) / 2
        let b = Poly(vec![&self.alpha / &two, &self.alpha * &self.c1 / &two]);
        let dev = Poly(vec![Q::zero(), &self.alpha / &two]).add(&b.mul(&b).scale(&(Q::one() / (q(4, 1) * &self.c2))));
        let xs = self.nash();
        let u_star = self.payoff(&xs, &xs);
        let one_minus = Q::one() - delta;
        coop.add(&dev.scale(&-one_minus)).add(&Poly(vec![-(delta * u_star)]))
    }
}

pub fn p0() -> RationalGame {
    RationalGame::new(q(1, 1), q(1, 1), q(3, 2))
}

pub fn p1() -> RationalGame {
    RationalGame::new(q(2, 1), q(1, 2), q(2, 1))
}

pub fn rel_err(actual: f64, expected: &Q) -> f64 {
    let e = f(expected);
    if e == 0.0 {
        actual.abs()
    } else {
        ((actual - e) / e).abs()
    }
}
