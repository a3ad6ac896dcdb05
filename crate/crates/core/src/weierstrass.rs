//! Weierstrass ℘ and its first two derivatives for a general lattice.
//!
//! For the normalized lattice `Z + τZ` (`Im τ > 0`) with `u = e^{2πiz}`,
//! `q = e^{2πiτ}`:
//!
//! ```text
//! ℘(z)   = (2πi)² [1/12 + Σ_{n∈Z} q^n u/(1 − q^n u)² − 2 Σ_{n≥1} q^n/(1 − q^n)²]
//! ℘'(z)  = (2πi)³ Σ_{n∈Z} x (1 + x)/(1 − x)³,           x = q^n u
//! ℘''(z) = (2πi)⁴ Σ_{n∈Z} x (1 + 4x + x²)/(1 − x)⁴
//! ```
//!
//! Terms with `n < 0` are rewritten in `y = q^{|n|}/u` using the symmetries of
//! the summands under `x ↦ 1/x`, so every series converges geometrically in
//! `|q|`. A general lattice `ω₁Z + ω₂Z` is handled by the homogeneity
//! `℘(z; ω₁, ω₂) = ω₁⁻² ℘(z/ω₁; ω₂/ω₁)`.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Values `(℘, ℘', ℘'')` at a point; non-finite at lattice points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpValues {
    pub p: C64,
    pub dp: C64,
    pub ddp: C64,
}

/// A period lattice `ω₁Z + ω₂Z`, stored with `Im(ω₂/ω₁) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    omega1: C64,
    omega2: C64,
    tau: C64,
}

impl Lattice {
    pub fn new(omega1: C64, omega2: C64) -> Result<Self> {
        if omega1.norm() == 0.0 || omega2.norm() == 0.0 {
            return Err(Error::invalid("lattice generators must be nonzero"));
        }
        let tau = omega2 / omega1;
        if tau.im.abs() < 1e-9 * tau.norm() {
            return Err(Error::invalid("lattice generators are linearly dependent over R"));
        }
        let (omega1, omega2) = if tau.im > 0.0 { (omega1, omega2) } else { (omega2, omega1) };
        let tau = omega2 / omega1;
        if tau.im < 0.05 {
            return Err(Error::invalid("lattice is too elongated (Im τ < 0.05)"));
        }
        Ok(Self { omega1, omega2, tau })
    }

    pub fn square() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0)).expect("unit square lattice")
    }

    pub fn generators(&self) -> (C64, C64) {
        (self.omega1, self.omega2)
    }

    /// Coordinates `(s, t)` with `z = s ω₁ + t ω₂`.
    pub fn real_coords(&self, z: C64) -> (f64, f64) {
        let (a, b) = (self.omega1, self.omega2);
        let det = a.re * b.im - a.im * b.re;
        ((z.re * b.im - z.im * b.re) / det, (a.re * z.im - a.im * z.re) / det)
    }

    /// Representative of `z` in the fundamental parallelogram `[0,1)ω₁ + [0,1)ω₂`.
    pub fn reduce(&self, z: C64) -> C64 {
        let (s, t) = self.real_coords(z);
        z - self.omega1 * s.floor() - self.omega2 * t.floor()
    }

    pub fn wp(&self, z: C64) -> WpValues {
        let w = wp_normalized(z / self.omega1, self.tau);
        let s = self.omega1.inv();
        WpValues {
            p: w.p * s * s,
            dp: w.dp * s * s * s,
            ddp: w.ddp * s * s * s * s,
        }
    }
}

fn wp_normalized(zeta: C64, tau: C64) -> WpValues {
    // reduce so that |Im ζ| ≤ Im τ / 2 and |Re ζ| ≤ 1/2
    let k = (zeta.im / tau.im).round();
    let mut z = zeta - tau * k;
    z -= z.re.round();
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let u = (two_pi_i * z).exp();
    let q = (two_pi_i * tau).exp();
    let one = C64::new(1.0, 0.0);

    let term0 = |x: C64| x / ((one - x) * (one - x));
    let term1 = |x: C64| x * (one + x) / ((one - x) * (one - x) * (one - x));
    let term2 = |x: C64| x * (one + 4.0 * x + x * x) / ((one - x).powi(4));

    let mut s0 = term0(u);
    let mut s1 = term1(u);
    let mut s2 = term2(u);
    let mut c = C64::new(0.0, 0.0);
    let u_inv = u.inv();
    let mut qn = one;
    for _ in 1..200 {
        qn *= q;
        let x = qn * u;
        let y = qn * u_inv;
        s0 += term0(x) + term0(y);
        s1 += term1(x) - term1(y);
        s2 += term2(x) + term2(y);
        c += term0(qn);
        let size = qn.norm() * u.norm().max(u_inv.norm());
        if size < 1e-18 {
            break;
        }
    }
    let k2 = two_pi_i * two_pi_i;
    WpValues {
        p: k2 * (C64::new(1.0 / 12.0, 0.0) + s0 - 2.0 * c),
        dp: k2 * two_pi_i * s1,
        ddp: k2 * k2 * s2,
    }
}
