//! Compensated summation.
//!
//! [`ExactSum`] keeps the exact sum of its inputs as a list of non-overlapping
//! partials (Shewchuk's algorithm), so its rounded result does not depend on
//! the order in which terms were added. [`Neumaier`] is the cheap
//! running-compensation variant used for long sums where order independence
//! is not required.

use num_complex::Complex64;

/// Kahan-Babuska-Neumaier running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Complex Neumaier sum over real and imaginary parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierComplex {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Order-independent exact summation of finite `f64` values.
///
/// The result is the correctly rounded value of the exact real sum of all
/// inputs, hence bitwise identical for any permutation of the same terms.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        debug_assert!(x.is_finite(), "ExactSum only accepts finite values");
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Correctly rounded sum (round-half-even), as in Python's `math.fsum`.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

/// Complex [`ExactSum`].
#[derive(Debug, Clone, Default)]
pub struct ExactSumComplex {
    re: ExactSum,
    im: ExactSum,
}

impl ExactSumComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn exact_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = ExactSum::new();
    for x in it {
        s.add(x);
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_sum_recovers_cancelled_terms() {
        let v = [1e100, 1.0, -1e100, 1e-20];
        assert_eq!(exact_sum(v), 1.0 + 1e-20);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        let mut n = Neumaier::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            n.add(x);
        }
        assert_eq!(n.value(), 2.0);
    }

    proptest! {
        #[test]
        fn exact_sum_is_order_independent(mut v in prop::collection::vec(-1e6f64..1e6, 1..200), seed in 0u64..1000) {
            let a = exact_sum(v.iter().copied());
            // deterministic shuffle
            let n = v.len();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                v.swap(i, j);
            }
            let b = exact_sum(v.iter().copied());
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
