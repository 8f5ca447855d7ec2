use num_complex::Complex64;

/// A complex number stored as `(ln |z|, arg z)`.
///
/// Values of the completed L-function decay like `exp(-pi |t| / 2)` along the
/// critical line while the detector multiplies them by a growing exponential;
/// keeping the modulus in log form lets both factors meet without overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub ln_abs: f64,
    pub arg: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        ln_abs: f64::NEG_INFINITY,
        arg: 0.0,
    };

    pub fn new(ln_abs: f64, arg: f64) -> Self {
        Self { ln_abs, arg }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return Self::ZERO;
        }
        Self {
            ln_abs: z.norm().ln(),
            arg: z.arg(),
        }
    }

    /// Builds `exp(scale) * z` without forming `exp(scale)`.
    pub fn from_scaled(scale: f64, z: Complex64) -> Self {
        let mut out = Self::from_complex(z);
        out.ln_abs += scale;
        out
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }

    /// `exp(-shift) * z` as an ordinary complex number.
    pub fn to_complex_scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.ln_abs - shift).exp(), self.arg)
    }

    pub fn mul(&self, other: &LogComplex) -> LogComplex {
        LogComplex {
            ln_abs: self.ln_abs + other.ln_abs,
            arg: wrap_phase(self.arg + other.arg),
        }
    }

    pub fn recip(&self) -> LogComplex {
        LogComplex {
            ln_abs: -self.ln_abs,
            arg: -self.arg,
        }
    }

    pub fn conj(&self) -> LogComplex {
        LogComplex {
            ln_abs: self.ln_abs,
            arg: -self.arg,
        }
    }

    pub fn abs(&self) -> f64 {
        self.ln_abs.exp()
    }
}

/// Reduces a phase to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_products() {
        let a = Complex64::new(-3.0, 4.0);
        let b = Complex64::new(0.5, -0.25);
        let la = LogComplex::from_complex(a);
        let lb = LogComplex::from_complex(b);
        assert!((la.to_complex() - a).norm() < 1e-14);
        assert!((la.mul(&lb).to_complex() - a * b).norm() < 1e-14);
        assert!(LogComplex::from_complex(Complex64::new(0.0, 0.0)).is_zero());
        let big = LogComplex::from_scaled(800.0, Complex64::new(1.0, 0.0));
        let small = LogComplex::from_scaled(-800.0, Complex64::new(2.0, 0.0));
        assert!((big.mul(&small).to_complex().re - 2.0).abs() < 1e-12);
    }
}
