//! Truncated univariate power series.
//!
//! A [`TruncSeries`] stores the coefficients of `h^0 .. h^(T-1)`; `T` is the
//! first exponent whose coefficient is not trusted. Every operation returns
//! a truncation that it can actually guarantee, so a coefficient is never
//! reported beyond what the inputs determine.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series has no trusted coefficients")]
    EmptySeries,
    #[error("series is not a unit: {0}")]
    NotAUnit(String),
    #[error("constant term has no root of index {0} in this coefficient field")]
    IrrationalRoot(u32),
    #[error("order undetermined: all {0} trusted coefficients vanish")]
    OrderUndetermined(usize),
    #[error("cannot divide by h^{shift}: coefficient of h^{index} is nonzero")]
    NotDivisible { shift: usize, index: usize },
}

#[derive(Clone, PartialEq)]
pub struct TruncSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncSeries<S> {
    /// Series whose truncation is the number of given coefficients.
    pub fn new(coeffs: Vec<S>) -> Self {
        Self { coeffs }
    }

    /// Pads with zeros or cuts so that exactly `trunc` coefficients remain.
    pub fn with_trunc(mut coeffs: Vec<S>, trunc: usize) -> Self {
        coeffs.resize(trunc, S::zero());
        Self { coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        Self::with_trunc(Vec::new(), trunc)
    }

    pub fn constant(c: S, trunc: usize) -> Self {
        Self::monomial(c, 0, trunc)
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(S::one(), trunc)
    }

    /// `c * h^exp`, truncated at `trunc`.
    pub fn monomial(c: S, exp: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if exp < trunc {
            s.coeffs[exp] = c;
        }
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(usize, S)], trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        for (e, c) in terms {
            if *e < trunc {
                s.coeffs[*e] = s.coeffs[*e].clone() + c.clone();
            }
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `h^i`, `None` beyond the truncation.
    pub fn coeff(&self, i: usize) -> Option<&S> {
        self.coeffs.get(i)
    }

    /// Coefficient of `h^i` or zero; only meaningful for `i < trunc`.
    pub fn coeff_or_zero(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.magnitude()))
    }

    /// Whether coefficient `i` counts as zero under the series-relative test.
    pub fn is_negligible_at(&self, i: usize, tol: Tolerance) -> bool {
        match self.coeffs.get(i) {
            Some(c) => c.is_negligible(self.scale(), tol),
            None => true,
        }
    }

    /// Least exponent with a nonzero coefficient; `None` means the order is
    /// at least the truncation.
    pub fn order(&self, tol: Tolerance) -> Option<usize> {
        let scale = self.scale();
        self.coeffs
            .iter()
            .position(|c| !c.is_negligible(scale, tol))
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn support(&self, tol: Tolerance) -> Vec<(usize, S)> {
        let scale = self.scale();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_negligible(scale, tol))
            .map(|(i, c)| (i, c.clone()))
            .collect()
    }

    pub fn is_zero(&self, tol: Tolerance) -> bool {
        self.order(tol).is_none()
    }

    /// Lowers the truncation to `trunc` (no-op if already lower).
    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc());
        Self::new(self.coeffs[..t].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.trunc().min(other.trunc());
        Self::new(
            (0..t)
                .map(|i| self.coeffs[i].clone() + other.coeffs[i].clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let t = self.trunc().min(other.trunc());
        Self::new(
            (0..t)
                .map(|i| self.coeffs[i].clone() - other.coeffs[i].clone())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale_by(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// Cauchy product truncated at the smaller truncation.
    pub fn mul(&self, other: &Self) -> Self {
        let t = self.trunc().min(other.trunc());
        let mut out = vec![S::zero(); t];
        for (i, a) in self.coeffs.iter().enumerate().take(t) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(t - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.trunc());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Termwise derivative; the truncation drops by one.
    pub fn differentiate(&self) -> Result<Self, SeriesError> {
        if self.trunc() == 0 {
            return Err(SeriesError::EmptySeries);
        }
        Ok(Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_int(i as i64))
                .collect(),
        ))
    }

    /// Multiplies by `h^m`; the truncation rises by `m`.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut coeffs = vec![S::zero(); m];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Divides by `h^m`; requires the first `m` coefficients to vanish.
    pub fn shift_down(&self, m: usize, tol: Tolerance) -> Result<Self, SeriesError> {
        if m > self.trunc() {
            return Err(SeriesError::OrderUndetermined(self.trunc()));
        }
        if let Some(i) = (0..m).find(|&i| !self.is_negligible_at(i, tol)) {
            return Err(SeriesError::NotDivisible { shift: m, index: i });
        }
        Ok(Self::new(self.coeffs[m..].to_vec()))
    }

    /// Splits `s = h^m * t` with `t(0) != 0`.
    pub fn extract_monomial_factor(&self, tol: Tolerance) -> Result<(usize, Self), SeriesError> {
        let m = self
            .order(tol)
            .ok_or(SeriesError::OrderUndetermined(self.trunc()))?;
        Ok((m, self.shift_down(m, tol)?))
    }

    fn unit_constant(&self, tol: Tolerance) -> Result<S, SeriesError> {
        let c0 = self.coeffs.first().ok_or(SeriesError::EmptySeries)?;
        if c0.is_negligible(self.scale(), tol) {
            return Err(SeriesError::NotAUnit("constant term vanishes".into()));
        }
        Ok(c0.clone())
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, tol: Tolerance) -> Result<Self, SeriesError> {
        let c0 = self.unit_constant(tol)?;
        let inv0 = S::one() / c0;
        let t = self.trunc();
        let mut g: Vec<S> = Vec::with_capacity(t);
        g.push(inv0.clone());
        for n in 1..t {
            let mut acc = S::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc = acc + self.coeffs[k].clone() * g[n - k].clone();
                }
            }
            g.push(-(acc * inv0.clone()));
        }
        Ok(Self::new(g))
    }

    /// `s^(num/den)` for a unit whose constant term has the needed root.
    pub fn pow_frac(&self, num: i64, den: u32, tol: Tolerance) -> Result<Self, SeriesError> {
        let c0 = self.unit_constant(tol)?;
        if den.is_multiple_of(2) && c0.is_negative() {
            return Err(SeriesError::NotAUnit(
                "even root of a negative constant term".into(),
            ));
        }
        let root = c0.nth_root(den).ok_or(SeriesError::IrrationalRoot(den))?;
        let mut g0 = S::one();
        for _ in 0..num.unsigned_abs() {
            g0 = g0 * root.clone();
        }
        if num < 0 {
            g0 = S::one() / g0;
        }
        // g' s = alpha s' g, read off coefficientwise
        let alpha = S::from_ratio(num, den as i64);
        let t = self.trunc();
        let mut g: Vec<S> = Vec::with_capacity(t);
        g.push(g0);
        for n in 1..t {
            let mut acc = S::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                let w = alpha.clone() * S::from_int(k as i64) - S::from_int((n - k) as i64);
                acc = acc + w * self.coeffs[k].clone() * g[n - k].clone();
            }
            g.push(acc / (S::from_int(n as i64) * c0.clone()));
        }
        Ok(Self::new(g))
    }

    /// `1 / sqrt(s)` for a unit with positive constant term.
    pub fn inv_sqrt(&self, tol: Tolerance) -> Result<Self, SeriesError> {
        let c0 = self.unit_constant(tol)?;
        if !c0.is_positive() {
            return Err(SeriesError::NotAUnit("constant term is negative".into()));
        }
        self.pow_frac(-1, 2, tol)
    }

    /// `s(c * h^k)`; the known coefficients spread to multiples of `k`.
    pub fn substitute_monomial(&self, c: &S, k: usize) -> Self {
        assert!(k >= 1, "monomial substitution needs a positive exponent");
        let t = self.trunc() * k;
        let mut out = vec![S::zero(); t];
        let mut pw = S::one();
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i * k] = a.clone() * pw.clone();
            pw = pw * c.clone();
        }
        Self::new(out)
    }

    /// `s(inner(h))` for `inner(0) = 0`.
    pub fn compose(&self, inner: &Self, tol: Tolerance) -> Result<Self, SeriesError> {
        if !inner.is_negligible_at(0, tol) {
            return Err(SeriesError::NotAUnit(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let o = inner
            .order(tol)
            .ok_or(SeriesError::OrderUndetermined(inner.trunc()))?;
        let t = inner.trunc().min(self.trunc().saturating_mul(o));
        let inner = inner.truncate(t);
        let mut acc = Self::zero(t);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).add(&Self::constant(c.clone(), t));
        }
        Ok(acc)
    }

    /// Compositional inverse of a series with `s(0) = 0`, `s'(0) != 0`.
    pub fn revert(&self, tol: Tolerance) -> Result<Self, SeriesError> {
        if !self.is_negligible_at(0, tol) {
            return Err(SeriesError::NotAUnit(
                "series to revert must vanish at 0".into(),
            ));
        }
        if self.trunc() < 2 || self.is_negligible_at(1, tol) {
            return Err(SeriesError::NotAUnit(
                "series to revert needs a nonzero linear term".into(),
            ));
        }
        let t = self.trunc();
        let deriv = self.differentiate()?;
        let h = Self::monomial(S::one(), 1, t);
        let mut u = Self::monomial(S::one() / self.coeffs[1].clone(), 1, t);
        let mut correct = 2usize;
        while correct < t {
            let resid = self.compose(&u, tol)?.sub(&h);
            // the residual vanishes to order >= 2, so the slope's missing
            // top coefficient never reaches the kept range
            let slope = Self::with_trunc(deriv.compose(&u, tol)?.inv(tol)?.coeffs, t);
            u = Self::with_trunc(u.sub(&resid.mul(&slope)).coeffs, t);
            correct *= 2;
        }
        Ok(Self::with_trunc(u.coeffs, t))
    }

    pub fn eval(&self, h: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * h.clone() + c.clone())
    }

    /// Evaluates the truncated polynomial in double precision.
    pub fn eval_f64(&self, h: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * h + c.to_f64())
    }

    /// Converts coefficients to another field.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TruncSeries<T> {
        TruncSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> TruncSeries<f64> {
        self.map(|c| c.to_f64())
    }
}

impl<S: Scalar> fmt::Debug for TruncSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(h^{})", self, self.trunc())
    }
}

impl<S: Scalar> fmt::Display for TruncSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_text();
            let (neg, body) = match text.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, text),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = body == "1";
            match (i, unit) {
                (0, _) => write!(f, "{body}")?,
                (1, true) => write!(f, "h")?,
                (1, false) => write!(f, "{body}*h")?,
                (_, true) => write!(f, "h^{i}")?,
                (_, false) => write!(f, "{body}*h^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn s(c: &[(i64, i64)]) -> TruncSeries<Q> {
        TruncSeries::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    fn ints(c: &[i64]) -> TruncSeries<Q> {
        TruncSeries::new(c.iter().map(|&v| Q::from_int(v)).collect())
    }

    const TOL: Tolerance = Tolerance::DEFAULT;

    #[test]
    fn add_examples() {
        assert_eq!(ints(&[1, 1, 0]).add(&ints(&[0, 0, 1])), ints(&[1, 1, 1]));
        let x = ints(&[3, -1, 4, 1]);
        assert_eq!(x.add(&TruncSeries::zero(4)), x);
        // h - h^2 with trunc 2 keeps only what it can vouch for
        let a = TruncSeries::with_trunc(ints(&[0, 1, -1]).coeffs().to_vec(), 2);
        let b = TruncSeries::monomial(Q::from_int(1), 2, 4);
        assert_eq!(a.add(&b), ints(&[0, 1]));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            ints(&[1, 1, 0, 0]).mul(&ints(&[1, -1, 0, 0])),
            ints(&[1, 0, -1, 0])
        );
        let x = ints(&[2, 0, 5]);
        assert_eq!(x.mul(&TruncSeries::one(3)), x);
        let h2 = TruncSeries::monomial(Q::from_int(1), 2, 8);
        let h3 = TruncSeries::monomial(Q::from_int(1), 3, 8);
        assert_eq!(h2.mul(&h3), TruncSeries::monomial(Q::from_int(1), 5, 8));
    }

    #[test]
    fn differentiate_examples() {
        let p = 5;
        let hp = TruncSeries::monomial(Q::from_int(1), p, 9);
        assert_eq!(
            hp.differentiate().unwrap(),
            TruncSeries::monomial(Q::from_int(p as i64), p - 1, 8)
        );
        assert!(TruncSeries::constant(q(7, 3), 4)
            .differentiate()
            .unwrap()
            .is_zero(TOL));
        let x = TruncSeries::from_terms(&[(2, Q::from_int(1)), (9, Q::from_int(1))], 10);
        let dx = x.differentiate().unwrap();
        assert_eq!(dx.trunc(), 9);
        assert_eq!(
            dx,
            TruncSeries::from_terms(&[(1, Q::from_int(2)), (8, Q::from_int(9))], 9)
        );
        assert_eq!(
            TruncSeries::<Q>::zero(0).differentiate(),
            Err(SeriesError::EmptySeries)
        );
    }

    #[test]
    fn inv_sqrt_examples() {
        assert_eq!(
            TruncSeries::<Q>::one(5).inv_sqrt(TOL).unwrap(),
            TruncSeries::one(5)
        );
        let r = ints(&[1, 2, 0]).inv_sqrt(TOL).unwrap();
        assert_eq!(r, s(&[(1, 1), (-1, 1), (3, 2)]));
        // oracle: r^2 * (1 + 2h) == 1 + O(h^3)
        assert_eq!(r.square().mul(&ints(&[1, 2, 0])), TruncSeries::one(3));
    }

    #[test]
    fn inv_sqrt_rejects_non_units() {
        assert!(matches!(
            ints(&[0, 1, 1]).inv_sqrt(TOL),
            Err(SeriesError::NotAUnit(_))
        ));
        assert!(matches!(
            ints(&[-4, 1]).inv_sqrt(TOL),
            Err(SeriesError::NotAUnit(_))
        ));
        assert_eq!(
            ints(&[2, 1]).inv_sqrt(TOL),
            Err(SeriesError::IrrationalRoot(2))
        );
        // float mode accepts the irrational root
        let f = TruncSeries::new(vec![2.0f64, 1.0]).inv_sqrt(TOL).unwrap();
        assert!((f.coeffs()[0] - 2f64.sqrt().recip()).abs() < 1e-15);
    }

    #[test]
    fn inv_sqrt_of_standard_speed_series() {
        // x = h^p, y = beta h^q: h^(p-1) / |r'| = 1/p - q^2 beta^2/(2 p^3) h^(2(q-p)) + ...
        for (p, qq, beta) in [(2usize, 3usize, q(1, 1)), (2, 4, q(3, 2)), (3, 5, q(-2, 5))] {
            let t = 24;
            let x = TruncSeries::monomial(Q::from_int(1), p, t);
            let y = TruncSeries::monomial(beta.clone(), qq, t);
            let (dx, dy) = (x.differentiate().unwrap(), y.differentiate().unwrap());
            let speed2 = dx.square().add(&dy.square());
            let (m, depressed) = speed2.extract_monomial_factor(TOL).unwrap();
            assert_eq!(m, 2 * p - 2);
            assert_eq!(depressed.coeffs()[0], Q::from_int((p * p) as i64));
            let g = depressed.inv_sqrt(TOL).unwrap();
            assert_eq!(g.coeffs()[0], q(1, p as i64));
            let k = 2 * (qq - p);
            let expected = -(Q::from_int((qq * qq) as i64) * beta.clone() * beta.clone())
                / Q::from_int(2 * (p * p * p) as i64);
            assert_eq!(g.coeffs()[k], expected);
            assert!((1..k).all(|i| g.coeffs()[i].is_zero()));
        }
    }

    #[test]
    fn extract_monomial_factor_examples() {
        let x = ints(&[0, 0, 4, 0, 1, 0]);
        let (m, t) = x.extract_monomial_factor(TOL).unwrap();
        assert_eq!((m, t), (2, ints(&[4, 0, 1, 0])));
        let (m, t) = ints(&[1, 1]).extract_monomial_factor(TOL).unwrap();
        assert_eq!((m, t), (0, ints(&[1, 1])));
        assert_eq!(
            TruncSeries::<Q>::zero(6).extract_monomial_factor(TOL),
            Err(SeriesError::OrderUndetermined(6))
        );
    }

    #[test]
    fn float_zero_detection_is_relative() {
        let x = TruncSeries::new(vec![1e-14, 3e-13, 2.0, 1e3]);
        assert_eq!(x.order(TOL), Some(2));
        let small = TruncSeries::new(vec![0.0, 1e-6]);
        assert_eq!(small.order(TOL), Some(1));
    }

    #[test]
    fn revert_inverts_composition() {
        // s = h + h^2 has inverse u with s(u(h)) = h
        let sr = ints(&[0, 1, 1, 0, 0, 0, 0, 0]);
        let u = sr.revert(TOL).unwrap();
        assert_eq!(u.coeffs()[..5], ints(&[0, 1, -1, 2, -5]).coeffs()[..]);
        let back = sr.compose(&u, TOL).unwrap();
        assert_eq!(back, TruncSeries::monomial(Q::from_int(1), 1, 8));
    }

    #[test]
    fn substitute_monomial_scales_exponents() {
        let x = ints(&[1, 2, 3]);
        let y = x.substitute_monomial(&Q::from_int(-1), 2);
        assert_eq!(y, ints(&[1, 0, -2, 0, 3, 0]));
    }

    #[test]
    fn display_is_readable() {
        let x = s(&[(1, 1), (-1, 1), (3, 2)]);
        assert_eq!(x.to_string(), "1 - h + 3/2*h^2");
    }
}
