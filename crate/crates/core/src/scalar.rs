//! Coefficient fields.
//!
//! Every computation runs over one scalar type: arbitrary precision
//! rationals when zero tests must be decidable, or machine floats when the
//! input carries irrational data (angles such as `pi/4`). The mode is fixed
//! by the type parameter, so a single series can never mix the two.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::roots::{self, RealRoots};

/// Relative tolerance used by float-mode zero detection.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-12);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A coefficient field usable by the series, polynomial and offset code.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True for exact arithmetic, where zero tests are literal.
    const EXACT: bool;
    /// Short mode name used in reports.
    const MODE: &'static str;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Real `n`-th root when it exists in the field. Exact mode only answers
    /// for perfect powers.
    fn nth_root(&self, n: u32) -> Option<Self>;

    /// Zero test. `scale` is the magnitude of the surrounding data (for
    /// series, the largest other coefficient); exact mode ignores it.
    fn is_negligible(&self, scale: f64, tol: Tolerance) -> bool;

    /// Real roots of `sum coeffs[i] z^i` representable in this field.
    fn real_roots(coeffs: &[Self], tol: Tolerance) -> RealRoots<Self>;

    /// Rendering used in JSON reports: `n/d` for rationals, shortest
    /// round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn sqrt(&self) -> Option<Self> {
        self.nth_root(2)
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

macro_rules! float_scalar {
    ($t:ty, $mode:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const MODE: &'static str = $mode;

            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn from_rational(r: &BigRational) -> Self {
                rational_to_f64(r) as $t
            }

            fn from_f64(v: f64) -> Option<Self> {
                v.is_finite().then_some(v as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn nth_root(&self, n: u32) -> Option<Self> {
                if n == 0 {
                    return None;
                }
                if *self < 0.0 {
                    if n % 2 == 0 {
                        return None;
                    }
                    return Some(-(-*self).powf(1.0 / n as $t));
                }
                Some(self.powf(1.0 / n as $t))
            }

            fn is_negligible(&self, scale: f64, tol: Tolerance) -> bool {
                // f32 cannot resolve the session default, so never test
                // below its own epsilon.
                let floor = (<$t>::EPSILON as f64) * 16.0;
                let eps = tol.0.max(floor);
                (*self as f64).abs() <= eps * (1.0 + scale)
            }

            fn real_roots(coeffs: &[Self], tol: Tolerance) -> RealRoots<Self> {
                let wide: Vec<f64> = coeffs.iter().map(|c| *c as f64).collect();
                let found = roots::float_real_roots(&wide, tol);
                RealRoots {
                    roots: found.roots.into_iter().map(|(r, m)| (r as $t, m)).collect(),
                    unrepresented: found.unrepresented,
                }
            }

            fn to_text(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64, "float");
float_scalar!(f32, "float32");

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.is_negative() && n.is_multiple_of(2) {
            return None;
        }
        let root_of = |v: &BigInt| -> Option<BigInt> {
            let r = v.abs().nth_root(n);
            (num_traits::pow(r.clone(), n as usize) == v.abs()).then_some(r)
        };
        let num = root_of(self.numer())?;
        let den = root_of(self.denom())?;
        let r = BigRational::new(num, den);
        Some(if self.is_negative() { -r } else { r })
    }

    fn is_negligible(&self, _scale: f64, _tol: Tolerance) -> bool {
        self.is_zero()
    }

    fn real_roots(coeffs: &[Self], _tol: Tolerance) -> RealRoots<Self> {
        roots::rational_real_roots(coeffs)
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Converts a big rational to the nearest float, even when numerator and
/// denominator overflow `f64` individually.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let q = (n / d).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Parses `a`, `a/b` or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((int, frac)) = body.split_once('.') {
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.is_empty() && int.is_empty()
        {
            return None;
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        BigRational::new(num, den)
    } else {
        if !body.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        BigRational::from_integer(BigInt::parse_bytes(body.as_bytes(), 10)?)
    };
    Some(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn exact_roots_only_for_perfect_powers() {
        assert_eq!(q(9, 4).sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt(), None);
        assert_eq!(q(-8, 27).nth_root(3), Some(q(-2, 3)));
        assert_eq!(q(-4, 1).sqrt(), None);
    }

    #[test]
    fn float_negligibility_is_scale_aware() {
        let tol = Tolerance::DEFAULT;
        assert!(1e-13f64.is_negligible(0.0, tol));
        assert!(!1e-9f64.is_negligible(0.0, tol));
        assert!(1e-9f64.is_negligible(1e4, tol));
        assert!(!q(1, 1_000_000_000).is_negligible(0.0, tol));
    }

    #[test]
    fn rational_text_rendering() {
        assert_eq!(q(7071, 10000).to_text(), "7071/10000");
        assert_eq!(q(-6, 3).to_text(), "-2");
        assert_eq!(0.5f64.to_text(), "0.5");
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(parse_rational("3/5"), Some(q(3, 5)));
        assert_eq!(parse_rational("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_rational("12"), Some(q(12, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn huge_rationals_convert_to_float() {
        let big = BigRational::new(
            num_traits::pow(BigInt::from(10), 400) * 3,
            num_traits::pow(BigInt::from(10), 400),
        );
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
