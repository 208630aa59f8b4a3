//! Places, signatures and the four local shapes.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::poly::{parse_in_vars, ParseError};
use crate::scalar::{Scalar, Tolerance};
use crate::series::{SeriesError, TruncSeries};
use crate::Rational;

/// Truncation beyond which a missing `r` is accepted as `xi_r = 0`.
pub const TRUNC_CAP: usize = 64;

/// A real local parametrization `(x(h), y(h))` of a branch.
///
/// `x`, `y` live in a local frame; the world point is
/// `center + R (x, y)` where `R` is the rotation by `rotation = (cos, sin)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Place<S: Scalar> {
    pub x: TruncSeries<S>,
    pub y: TruncSeries<S>,
    pub center: (S, S),
    pub rotation: (S, S),
    /// Coordinates are polynomials: every coefficient past `trunc` is zero,
    /// so the truncation can be raised for free.
    pub exact: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("signature undetermined within truncation {trunc}; raise trunc")]
    SignatureUndetermined { trunc: usize },
    #[error("the place parametrizes a straight line")]
    Line,
    #[error("the place is constant (a single point)")]
    Degenerate,
    #[error("place coordinates have different truncations")]
    TruncMismatch,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl<S: Scalar> Place<S> {
    /// Place at the origin in the world frame.
    pub fn new(x: TruncSeries<S>, y: TruncSeries<S>) -> Self {
        let t = x.trunc().min(y.trunc());
        Self {
            x: x.truncate(t),
            y: y.truncate(t),
            center: (S::zero(), S::zero()),
            rotation: (S::one(), S::zero()),
            exact: false,
        }
    }

    /// Polynomial place `(x, y)` given as `(exponent, coefficient)` terms.
    pub fn polynomial(x: &[(usize, S)], y: &[(usize, S)], trunc: usize) -> Self {
        let mut pl = Self::new(
            TruncSeries::from_terms(x, trunc),
            TruncSeries::from_terms(y, trunc),
        );
        pl.exact = true;
        pl
    }

    pub fn trunc(&self) -> usize {
        self.x.trunc().min(self.y.trunc())
    }

    /// Re-truncates; for exact places the new coefficients are zeros.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        let resize = |s: &TruncSeries<S>| {
            if self.exact || trunc <= s.trunc() {
                TruncSeries::with_trunc(s.coeffs().to_vec(), trunc)
            } else {
                s.clone()
            }
        };
        Self {
            x: resize(&self.x),
            y: resize(&self.y),
            center: self.center.clone(),
            rotation: self.rotation.clone(),
            exact: self.exact,
        }
    }

    pub fn at(mut self, center: (S, S)) -> Self {
        self.center = center;
        self
    }

    /// Standard form `(h^p, beta h^q + ...)` with `q > p`.
    pub fn is_standard(&self, tol: Tolerance) -> bool {
        let xs = self.x.support(tol);
        match (xs.as_slice(), self.y.order(tol)) {
            ([(p, c)], Some(q)) => {
                *p >= 1 && c == &S::one() && q > *p && self.y.is_negligible_at(0, tol)
            }
            _ => false,
        }
    }

    /// Local-to-world map.
    pub fn to_world(&self, x: &S, y: &S) -> (S, S) {
        let (c, s) = &self.rotation;
        (
            self.center.0.clone() + c.clone() * x.clone() - s.clone() * y.clone(),
            self.center.1.clone() + s.clone() * x.clone() + c.clone() * y.clone(),
        )
    }

    pub fn world_point(&self, h: f64) -> (f64, f64) {
        let (x, y) = (self.x.eval_f64(h), self.y.eval_f64(h));
        world_f64(&self.center, &self.rotation, x, y)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Place<T> {
        Place {
            x: self.x.map(f),
            y: self.y.map(f),
            center: (f(&self.center.0), f(&self.center.1)),
            rotation: (f(&self.rotation.0), f(&self.rotation.1)),
            exact: self.exact,
        }
    }

    pub fn to_f64(&self) -> Place<f64> {
        self.map(|c| c.to_f64())
    }

    /// Text form `x(h), y(h)` in the local frame.
    pub fn describe(&self) -> String {
        format!("{}, {}", self.x, self.y)
    }
}

pub(crate) fn world_f64<S: Scalar>(center: &(S, S), rot: &(S, S), x: f64, y: f64) -> (f64, f64) {
    let (c, s) = (rot.0.to_f64(), rot.1.to_f64());
    (
        center.0.to_f64() + c * x - s * y,
        center.1.to_f64() + s * x + c * y,
    )
}

/// Parses `"x(h), y(h)"`, two polynomials in `h`, into an exact place.
pub fn parse_place(text: &str, trunc: usize) -> Result<Place<Rational>, ParseError> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                if split.is_some() {
                    return Err(ParseError::Syntax {
                        pos: i,
                        msg: "a place has exactly two coordinates".into(),
                    });
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    let Some(cut) = split else {
        return Err(ParseError::Syntax {
            pos: text.len(),
            msg: "expected `x(h), y(h)`".into(),
        });
    };
    let shift = |e: ParseError, by: usize| match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + by, msg },
        other => other,
    };
    let px = parse_in_vars(&text[..cut], &["h"])?;
    let py = parse_in_vars(&text[cut + 1..], &["h"]).map_err(|e| shift(e, cut + 1))?;
    let deg = px
        .total_degree()
        .unwrap_or(0)
        .max(py.total_degree().unwrap_or(0)) as usize;
    let t = trunc.max(deg + 1);
    let terms = |p: &crate::poly::RationalPoly| -> Vec<(usize, Rational)> {
        p.terms()
            .iter()
            .map(|((i, _), c)| (*i as usize, c.clone()))
            .collect()
    };
    Ok(Place::polynomial(&terms(&px), &terms(&py), t))
}

/// The four local shapes of a real place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalShape {
    Thorn,
    Elbow,
    Beak,
    Flex,
}

impl LocalShape {
    pub fn from_pq(p: u32, q: u32) -> Self {
        match (p.is_multiple_of(2), q.is_multiple_of(2)) {
            (true, true) => LocalShape::Thorn,
            (false, true) => LocalShape::Elbow,
            (true, false) => LocalShape::Beak,
            (false, false) => LocalShape::Flex,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LocalShape::Thorn => "thorn",
            LocalShape::Elbow => "elbow",
            LocalShape::Beak => "beak",
            LocalShape::Flex => "flex",
        }
    }
}

impl fmt::Display for LocalShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Signature `(p, q)` of a place, plus the second term `xi_r h^r` of a
/// standard place when one is visible.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature<S> {
    pub p: u32,
    pub q: u32,
    /// Leading coefficient `beta_q` (standard places; otherwise the
    /// determinant that certified `q`).
    pub beta: S,
    pub r: Option<(u32, S)>,
    /// Whether a missing `r` means `xi_r = 0` rather than "not seen yet".
    pub tail_certified: bool,
}

impl<S: Scalar> Signature<S> {
    pub fn pq(&self) -> (u32, u32) {
        (self.p, self.q)
    }

    pub fn xi(&self) -> Option<&S> {
        self.r.as_ref().map(|(_, c)| c)
    }

    pub fn r_exp(&self) -> Option<u32> {
        self.r.as_ref().map(|(e, _)| *e)
    }

    pub fn shape(&self) -> LocalShape {
        local_shape(self)
    }

    pub fn report(&self) -> SignatureReport {
        SignatureReport {
            p: self.p,
            q: self.q,
            r: self.r_exp(),
            shape: self.shape(),
            cuspidal: is_cuspidal(self),
        }
    }
}

/// Serialized form of a signature.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureReport {
    pub p: u32,
    pub q: u32,
    pub r: Option<u32>,
    pub shape: LocalShape,
    pub cuspidal: bool,
}

/// Signature of a place. Standard places read `p`, `q` and `r` off the
/// exponents; other places go through the derivative-independence test.
pub fn signature<S: Scalar>(pl: &Place<S>, tol: Tolerance) -> Result<Signature<S>, ShapeError> {
    if !pl.is_standard(tol) {
        return signature_general(pl, tol);
    }
    let p = pl.x.order(tol).expect("standard place") as u32;
    let terms = pl.y.support(tol);
    let (q, beta) = terms[0].clone();
    let r = terms.get(1).map(|(e, c)| (*e as u32, c.clone()));
    let tail_certified = r.is_some() || pl.exact || pl.trunc() >= TRUNC_CAP;
    Ok(Signature {
        p,
        q: q as u32,
        beta,
        r,
        tail_certified,
    })
}

/// Signature by the definition: `p` is the first order with a nonzero
/// derivative vector, `q` the first later order whose derivative is
/// independent of it. Coefficient vectors stand in for derivatives (they
/// differ by factorials). No `r` is reported.
pub fn signature_general<S: Scalar>(
    pl: &Place<S>,
    tol: Tolerance,
) -> Result<Signature<S>, ShapeError> {
    if pl.x.trunc() != pl.y.trunc() {
        return Err(ShapeError::TruncMismatch);
    }
    let t = pl.trunc();
    let scale = pl.x.coeffs()[1.min(t)..]
        .iter()
        .chain(pl.y.coeffs()[1.min(t)..].iter())
        .fold(0.0f64, |m, c| m.max(c.magnitude()));
    let vec_at = |k: usize| (pl.x.coeff_or_zero(k), pl.y.coeff_or_zero(k));
    let nonzero = |v: &S| !v.is_negligible(scale, tol);
    let p = (1..t).find(|&k| {
        let (a, b) = vec_at(k);
        nonzero(&a) || nonzero(&b)
    });
    let Some(p) = p else {
        return Err(if pl.exact {
            ShapeError::Degenerate
        } else {
            ShapeError::SignatureUndetermined { trunc: t }
        });
    };
    let (vx, vy) = vec_at(p);
    let q = (p + 1..t).find_map(|k| {
        let (wx, wy) = vec_at(k);
        let det = vx.clone() * wy - vy.clone() * wx;
        nonzero(&det).then_some((k, det))
    });
    let Some((q, det)) = q else {
        return Err(if pl.exact {
            ShapeError::Line
        } else {
            ShapeError::SignatureUndetermined { trunc: t }
        });
    };
    Ok(Signature {
        p: p as u32,
        q: q as u32,
        beta: det,
        r: None,
        tail_certified: false,
    })
}

pub fn local_shape<S>(sig: &Signature<S>) -> LocalShape {
    LocalShape::from_pq(sig.p, sig.q)
}

pub fn is_cuspidal<S>(sig: &Signature<S>) -> bool {
    sig.p.is_multiple_of(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn example_signatures() {
        let tol = Tolerance::DEFAULT;
        let cusp = Place::polynomial(&[(2, q(1))], &[(3, q(1))], 12);
        let s = signature(&cusp, tol).unwrap();
        assert_eq!((s.p, s.q, s.r_exp()), (2, 3, None));
        assert!(s.tail_certified);

        let tac = Place::polynomial(&[(2, q(1))], &[(4, q(1)), (9, q(1))], 12);
        let s = signature(&tac, tol).unwrap();
        assert_eq!((s.p, s.q, s.r_exp()), (2, 4, Some(9)));
        assert_eq!(s.xi(), Some(&q(1)));

        let parabola = Place::polynomial(&[(1, q(1))], &[(2, q(1))], 8);
        assert_eq!(signature(&parabola, tol).unwrap().pq(), (1, 2));
    }

    #[test]
    fn shapes_follow_parities() {
        assert_eq!(LocalShape::from_pq(2, 3), LocalShape::Beak);
        assert_eq!(LocalShape::from_pq(1, 2), LocalShape::Elbow);
        assert_eq!(LocalShape::from_pq(3, 5), LocalShape::Flex);
        assert_eq!(LocalShape::from_pq(2, 4), LocalShape::Thorn);
    }

    #[test]
    fn general_test_handles_rotated_places() {
        // (h^2, h^3) rotated by (3/5, 4/5)
        let (c, s) = (Rational::from_ratio(3, 5), Rational::from_ratio(4, 5));
        let pl = Place::polynomial(&[(2, c.clone()), (3, -s.clone())], &[(2, s), (3, c)], 10);
        assert!(!pl.is_standard(Tolerance::DEFAULT));
        let sig = signature(&pl, Tolerance::DEFAULT).unwrap();
        assert_eq!(sig.pq(), (2, 3));
    }

    #[test]
    fn lines_and_points_are_rejected() {
        let tol = Tolerance::DEFAULT;
        let line = Place::polynomial(&[(1, q(1))], &[(1, q(2))], 8);
        assert_eq!(signature(&line, tol), Err(ShapeError::Line));
        let point = Place::polynomial(&[(0, q(1))], &[], 8);
        assert_eq!(signature(&point, tol), Err(ShapeError::Degenerate));
        let short = Place::new(
            TruncSeries::from_terms(&[(1, q(1))], 4),
            TruncSeries::from_terms(&[(1, q(1))], 4),
        );
        assert_eq!(
            signature(&short, tol),
            Err(ShapeError::SignatureUndetermined { trunc: 4 })
        );
    }

    #[test]
    fn parses_places() {
        let pl = parse_place("h^2, h^4+h^9", 16).unwrap();
        assert_eq!(pl.trunc(), 16);
        let s = signature(&pl, Tolerance::DEFAULT).unwrap();
        assert_eq!((s.p, s.q, s.r_exp()), (2, 4, Some(9)));
        assert!(parse_place("h^2", 8).is_err());
        assert!(parse_place("h^2, h^3, h", 8).is_err());
        match parse_place("h^2, h^3 + k", 8) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 11),
            other => panic!("unexpected {other:?}"),
        }
    }
}
