//! Generalized offsets of places: series construction, pointwise sampling,
//! curvature and the regular-point predicates.
//!
//! Conventions. The normal of a place is the left normal
//! `N = (-y', x') / |r'|`, and the sheet with sign `s` is
//! `(x, y) + s d A N` with `A = [[a, -b], [b, a]]`. Differentiating along
//! arc length gives `r0' = (I + D k A) r'` with the signed distance
//! `D = -s d`; every regular-point predicate below is written in `D`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{Scalar, Tolerance};
use crate::series::{SeriesError, TruncSeries};
use crate::shape::{signature_general, world_f64, Place, ShapeError, Signature};

/// Which of the two offset sheets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> i64 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "+" | "plus" => Some(Branch::Plus),
            "-" | "minus" | "−" => Some(Branch::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OffsetError {
    #[error("offset distance must be nonzero")]
    ZeroDistance,
    #[error("(a, b) is not on the unit circle: a^2 + b^2 = {0}")]
    NotUnit(String),
    #[error("curvature is unbounded at the center (q < 2p)")]
    CurvatureUnbounded,
    #[error("not applicable to classical offsets (sin(theta) = 0)")]
    Classical,
    #[error("degenerate place: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Distance, rotation `(a, b) = (cos theta, sin theta)` and sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct OffsetParams<S> {
    pub d: S,
    pub a: S,
    pub b: S,
    pub branch: Branch,
}

impl<S: Scalar> OffsetParams<S> {
    pub fn new(d: S, a: S, b: S, branch: Branch, tol: Tolerance) -> Result<Self, OffsetError> {
        if d.is_negligible(0.0, tol) {
            return Err(OffsetError::ZeroDistance);
        }
        let norm = a.clone() * a.clone() + b.clone() * b.clone();
        if !(norm.clone() - S::one()).is_negligible(1.0, Tolerance(tol.0.max(1e-12))) {
            return Err(OffsetError::NotUnit(norm.to_text()));
        }
        Ok(Self { d, a, b, branch })
    }

    pub fn with_branch(&self, branch: Branch) -> Self {
        Self {
            branch,
            ..self.clone()
        }
    }

    /// `sin theta = 0`.
    pub fn classical(&self, tol: Tolerance) -> bool {
        self.b.is_negligible(1.0, tol)
    }

    /// `s d`, the multiplier of `A N` in the offset.
    pub fn sheet_distance(&self) -> S {
        self.d.clone() * S::from_int(self.branch.sign())
    }

    /// `D = -s d`, the distance in `r0' = (I + D k A) r'`.
    pub fn signed_distance(&self) -> S {
        -self.sheet_distance()
    }

    pub fn describe(&self) -> String {
        format!(
            "d={} a={} b={} branch={}",
            self.d.to_text(),
            self.a.to_text(),
            self.b.to_text(),
            self.branch
        )
    }
}

impl OffsetParams<f64> {
    pub fn from_angle(d: f64, theta: f64, branch: Branch) -> Self {
        Self {
            d,
            a: theta.cos(),
            b: theta.sin(),
            branch,
        }
    }
}

/// An offset place: coordinates in the source place's local frame.
#[derive(Clone, Debug, PartialEq)]
pub struct OffsetPlace<S: Scalar> {
    pub x: TruncSeries<S>,
    pub y: TruncSeries<S>,
    pub source: Place<S>,
    pub params: OffsetParams<S>,
}

impl<S: Scalar> OffsetPlace<S> {
    /// The offset as a (non-standard) place sharing the source frame.
    pub fn as_place(&self) -> Place<S> {
        Place {
            x: self.x.clone(),
            y: self.y.clone(),
            center: self.source.center.clone(),
            rotation: self.source.rotation.clone(),
            exact: false,
        }
    }

    /// Signature `(p0, q0)` by the derivative-independence test.
    pub fn signature(&self, tol: Tolerance) -> Result<Signature<S>, ShapeError> {
        signature_general(&self.as_place(), tol)
    }

    /// World coordinates of the offset center.
    pub fn world_center(&self) -> (S, S) {
        let pl = &self.source;
        pl.to_world(&self.x.coeff_or_zero(0), &self.y.coeff_or_zero(0))
    }

    pub fn world_point(&self, h: f64) -> (f64, f64) {
        world_f64(
            &self.source.center,
            &self.source.rotation,
            self.x.eval_f64(h),
            self.y.eval_f64(h),
        )
    }
}

/// Unit tangent components `(U, V) = (y', x') / |r'|` as series, using the
/// formal branch `|r'| = h^m sqrt(...)`, and the exponent `m`.
fn unit_tangent<S: Scalar>(
    pl: &Place<S>,
    tol: Tolerance,
) -> Result<(TruncSeries<S>, TruncSeries<S>, usize), OffsetError> {
    let dx = pl.x.differentiate()?;
    let dy = pl.y.differentiate()?;
    let speed2 = dx.square().add(&dy.square());
    let (e, depressed) = speed2
        .extract_monomial_factor(tol)
        .map_err(|err| match err {
            SeriesError::OrderUndetermined(_) => {
                OffsetError::Degenerate("derivative vanishes identically within trunc".into())
            }
            other => other.into(),
        })?;
    if e % 2 != 0 {
        return Err(OffsetError::Degenerate(
            "odd order of the squared speed".into(),
        ));
    }
    let m = e / 2;
    let g = depressed.inv_sqrt(tol)?;
    let u = dy.shift_down(m, tol)?.mul(&g);
    let v = dx.shift_down(m, tol)?.mul(&g);
    Ok((u, v, m))
}

/// Offset of a place as truncated series.
pub fn offset_series<S: Scalar>(
    pl: &Place<S>,
    op: &OffsetParams<S>,
    tol: Tolerance,
) -> Result<OffsetPlace<S>, OffsetError> {
    let (u, v, _) = unit_tangent(pl, tol)?;
    let sd = op.sheet_distance();
    // A (-y', x') / |r'| = (-a U - b V, a V - b U)
    let nx = u.scale_by(&op.a).add(&v.scale_by(&op.b)).neg();
    let ny = v.scale_by(&op.a).sub(&u.scale_by(&op.b));
    let x = pl.x.add(&nx.scale_by(&sd));
    let y = pl.y.add(&ny.scale_by(&sd));
    Ok(OffsetPlace {
        x,
        y,
        source: pl.clone(),
        params: op.clone(),
    })
}

/// One pointwise offset sample; `point` is `None` where the derivative of
/// the source vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct OffsetSample {
    pub h: f64,
    pub point: Option<(f64, f64)>,
}

/// Offset points by direct evaluation: position, derivative, normal,
/// rotation. The normal follows the formal place, so on the `h < 0` side of
/// a place with even `p` it is flipped (the place is analytic through 0).
pub fn offset_points<S: Scalar>(
    pl: &Place<S>,
    op: &OffsetParams<S>,
    hs: &[f64],
) -> Vec<OffsetSample> {
    let dx =
        pl.x.differentiate()
            .unwrap_or_else(|_| TruncSeries::zero(0));
    let dy =
        pl.y.differentiate()
            .unwrap_or_else(|_| TruncSeries::zero(0));
    let order = dx
        .order(Tolerance::DEFAULT)
        .into_iter()
        .chain(dy.order(Tolerance::DEFAULT))
        .min()
        .unwrap_or(0);
    let sd = op.sheet_distance().to_f64();
    let (a, b) = (op.a.to_f64(), op.b.to_f64());
    hs.iter()
        .map(|&h| {
            let (xp, yp) = (dx.eval_f64(h), dy.eval_f64(h));
            let norm = xp.hypot(yp);
            if norm == 0.0 || (h == 0.0 && order > 0) || !norm.is_finite() {
                return OffsetSample { h, point: None };
            }
            let flip = if h < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
            let (nx, ny) = (-yp / norm * flip, xp / norm * flip);
            let (rx, ry) = (a * nx - b * ny, b * nx + a * ny);
            let (x, y) = (pl.x.eval_f64(h) + sd * rx, pl.y.eval_f64(h) + sd * ry);
            OffsetSample {
                h,
                point: Some(world_f64(&pl.center, &pl.rotation, x, y)),
            }
        })
        .collect()
}

/// Side of the center for one-sided expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Signed curvature of the place as a series on one side of `h = 0`:
/// `(x' y'' - x'' y') / |r'|^3`, with `|h|^(3m)` resolved by side.
pub fn curvature_series<S: Scalar>(
    pl: &Place<S>,
    side: Side,
    tol: Tolerance,
) -> Result<TruncSeries<S>, OffsetError> {
    let dx = pl.x.differentiate()?;
    let dy = pl.y.differentiate()?;
    let ddx = dx.differentiate()?;
    let ddy = dy.differentiate()?;
    let num = dx.mul(&ddy).sub(&ddx.mul(&dy));
    let speed2 = dx.square().add(&dy.square());
    let (e, depressed) = speed2.extract_monomial_factor(tol)?;
    let m = e / 2;
    let g = depressed.inv_sqrt(tol)?;
    let g3 = g.square().mul(&g);
    let reduced = num.shift_down(3 * m, tol).map_err(|err| match err {
        SeriesError::NotDivisible { .. } => OffsetError::CurvatureUnbounded,
        other => other.into(),
    })?;
    let k = reduced.mul(&g3);
    Ok(if side == Side::Left && m % 2 == 1 {
        k.neg()
    } else {
        k
    })
}

/// Curvature quantities of a standard place.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData<S> {
    /// Right limit of the curvature at the center; `None` when unbounded.
    pub k: Option<S>,
    /// `dk/ds` at the center, for regular places.
    pub kprime: Option<S>,
    /// `2 beta_q`.
    pub ktilde: S,
    /// `r (r-p) (r-2p)! xi_r / p^2`, when `r >= 2p`.
    pub mtilde: Option<S>,
    /// `q beta_q / p`.
    pub utilde: S,
    /// Same formula as `mtilde`.
    pub vtilde: Option<S>,
    /// `r xi_r / p`: the combination `(p/(r-p)) * mtilde / (r-2p)!` that
    /// every condition actually uses; defined for all `r`.
    pub w: Option<S>,
}

impl<S: Scalar> CurvatureData<S> {
    /// Formula part only: `k` and `kprime` from the signature alone.
    pub fn from_signature(sig: &Signature<S>) -> Self {
        let (p, q) = (sig.p as i64, sig.q as i64);
        let ktilde = sig.beta.clone() * S::from_int(2);
        let utilde = sig.beta.clone() * S::from_ratio(q, p);
        let mtilde = sig.r.as_ref().and_then(|(r, xi)| {
            let r = *r as i64;
            (r >= 2 * p).then(|| {
                let mut fact = S::one();
                for i in 2..=(r - 2 * p) {
                    fact = fact * S::from_int(i);
                }
                xi.clone() * S::from_int(r * (r - p)) * fact / S::from_int(p * p)
            })
        });
        let w = sig
            .r
            .as_ref()
            .map(|(r, xi)| xi.clone() * S::from_ratio(*r as i64, p));
        let k = match (2 * p).cmp(&q) {
            std::cmp::Ordering::Less => Some(S::zero()),
            std::cmp::Ordering::Equal => Some(ktilde.clone()),
            std::cmp::Ordering::Greater => None,
        };
        Self {
            k,
            kprime: None,
            ktilde,
            vtilde: mtilde.clone(),
            mtilde,
            utilde,
            w,
        }
    }

    /// Adds `k` and `k'` from the curvature series.
    pub fn from_place(pl: &Place<S>, sig: &Signature<S>, tol: Tolerance) -> Self {
        let mut data = Self::from_signature(sig);
        if let Ok(k) = curvature_series(pl, Side::Right, tol) {
            if k.trunc() > 0 {
                data.k = Some(k.coeff_or_zero(0));
            }
            // standard regular places have unit speed at 0, so dk/dh = dk/ds
            if sig.p == 1 && k.trunc() > 1 {
                data.kprime = Some(k.coeff_or_zero(1));
            }
        }
        data
    }
}

/// `D k' b + k (k^2 D^2 + 2 D k a + 1)`: zero at regular points that can
/// generate an offset flex.
pub fn flex_condition<S: Scalar>(k: &S, kprime: &S, op: &OffsetParams<S>) -> S {
    let dd = op.signed_distance();
    let k = k.clone();
    dd.clone() * kprime.clone() * op.b.clone()
        + k.clone()
            * (k.clone() * k.clone() * dd.clone() * dd.clone()
                + S::from_int(2) * dd.clone() * k.clone() * op.a.clone()
                + S::one())
}

/// `det(I + D k A) = (1 + D k a)^2 + (D k b)^2` vanishes.
pub fn cusp_possible<S: Scalar>(k: &S, op: &OffsetParams<S>, tol: Tolerance) -> bool {
    let dk = op.signed_distance() * k.clone();
    let c = S::one() + dk.clone() * op.a.clone();
    let s = dk * op.b.clone();
    (c.clone() * c + s.clone() * s).is_negligible(1.0, tol)
}

/// `(I + D k A) r'`.
pub fn tangent_map<S: Scalar>(rprime: &(S, S), k: &S, op: &OffsetParams<S>) -> (S, S) {
    let dk = op.signed_distance() * k.clone();
    let (x, y) = rprime.clone();
    (
        x.clone() + dk.clone() * (op.a.clone() * x.clone() - op.b.clone() * y.clone()),
        y.clone() + dk * (op.b.clone() * x + op.a.clone() * y),
    )
}

/// Which source points generate an offset turning point.
#[derive(Clone, Debug, PartialEq)]
pub enum Turning<S> {
    /// `k = 0`: the offset tangent equals the source tangent.
    SameAsCurve,
    /// Source points whose tangent has this slope.
    Slope(S),
    /// Source points with vertical tangent.
    VerticalSource,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TurningSlopes<S> {
    pub vertical: Turning<S>,
    pub horizontal: Turning<S>,
}

/// Source tangent slopes producing vertical / horizontal offset tangents,
/// read off `tangent_map` for `r' = (1, m)`.
pub fn turning_slopes<S: Scalar>(
    k: &S,
    op: &OffsetParams<S>,
    tol: Tolerance,
) -> Result<TurningSlopes<S>, OffsetError> {
    if op.classical(tol) {
        return Err(OffsetError::Classical);
    }
    if k.is_negligible(1.0, tol) {
        return Ok(TurningSlopes {
            vertical: Turning::SameAsCurve,
            horizontal: Turning::SameAsCurve,
        });
    }
    let dk = op.signed_distance() * k.clone();
    let c = S::one() + dk.clone() * op.a.clone();
    let s = dk * op.b.clone();
    let vertical = Turning::Slope(c.clone() / s.clone());
    let horizontal = if c.is_negligible(1.0, tol) {
        Turning::VerticalSource
    } else {
        Turning::Slope(-s / c)
    };
    Ok(TurningSlopes {
        vertical,
        horizontal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn params(d: Rational, a: Rational, b: Rational, br: Branch) -> OffsetParams<Rational> {
        OffsetParams::new(d, a, b, br, TOL).unwrap()
    }

    #[test]
    fn params_validate() {
        assert!(OffsetParams::new(q(0, 1), q(1, 1), q(0, 1), Branch::Plus, TOL).is_err());
        assert!(OffsetParams::new(q(1, 1), q(1, 2), q(1, 2), Branch::Plus, TOL).is_err());
        assert!(OffsetParams::new(q(1, 1), q(3, 5), q(4, 5), Branch::Plus, TOL).is_ok());
    }

    #[test]
    fn constant_terms_are_rotated_normal() {
        let pl = Place::polynomial(&[(2, q(1, 1))], &[(4, q(1, 1)), (9, q(1, 1))], 20);
        for br in Branch::BOTH {
            let op = params(q(2, 1), q(3, 5), q(4, 5), br);
            let off = offset_series(&pl, &op, TOL).unwrap();
            let s = Rational::from_int(br.sign());
            assert_eq!(off.x.coeff_or_zero(0), -s.clone() * q(2, 1) * q(4, 5));
            assert_eq!(off.y.coeff_or_zero(0), s * q(2, 1) * q(3, 5));
        }
    }

    #[test]
    fn parabola_vertex_offset() {
        let pl = Place::polynomial(&[(1, 1.0)], &[(2, 1.0)], 10);
        let op = OffsetParams::from_angle(1.0, 0.0, Branch::Plus);
        let pts = offset_points(&pl, &op, &[0.0]);
        let (x, y) = pts[0].point.unwrap();
        assert!(x.abs() < 1e-15 && (y - 1.0).abs() < 1e-15);
        let cusp = Place::polynomial(&[(2, 1.0)], &[(3, 1.0)], 10);
        assert_eq!(offset_points(&cusp, &op, &[0.0])[0].point, None);
    }

    #[test]
    fn curvature_examples() {
        let parabola = Place::polynomial(&[(1, q(1, 1))], &[(2, q(1, 1))], 8);
        let k = curvature_series(&parabola, Side::Right, TOL).unwrap();
        assert_eq!(k.coeff_or_zero(0), q(2, 1));
        let tac = Place::polynomial(&[(2, q(1, 1))], &[(4, q(1, 1)), (9, q(1, 1))], 24);
        let right = curvature_series(&tac, Side::Right, TOL).unwrap();
        let left = curvature_series(&tac, Side::Left, TOL).unwrap();
        assert_eq!(right.coeff_or_zero(0), q(2, 1));
        assert_eq!(left.coeff_or_zero(0), q(-2, 1));
        // next term r(r-p) xi / p^2 h^(r-2p) = 63/4 h^5
        assert_eq!(right.coeff_or_zero(5), q(63, 4));
        // (16 + 126 h^5)/8 * (1 + 4 h^4)^(-3/2) = 2 - 12 h^4 + 63/4 h^5 + ...
        assert!((1..4).all(|i| right.coeff_or_zero(i) == q(0, 1)));
        assert_eq!(right.coeff_or_zero(4), q(-12, 1));
        let cusp = Place::polynomial(&[(2, q(1, 1))], &[(3, q(1, 1))], 12);
        assert_eq!(
            curvature_series(&cusp, Side::Right, TOL),
            Err(OffsetError::CurvatureUnbounded)
        );
    }

    #[test]
    fn predicate_examples() {
        let b = Branch::Minus; // D = d
        let classical = OffsetParams::from_angle(1.0, 0.0, b);
        assert!(cusp_possible(&-1.0, &classical, TOL));
        let tilted = OffsetParams::from_angle(1.0, std::f64::consts::PI / 50.0, b);
        for k in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            assert!(!cusp_possible(&k, &tilted, TOL));
        }
        let quarter = OffsetParams::from_angle(1.0, std::f64::consts::FRAC_PI_4, b);
        assert!((flex_condition(&0.0, &1.0, &quarter) - 0.5f64.sqrt()).abs() < 1e-15);
        let right = params(q(1, 1), q(0, 1), q(1, 1), b);
        assert_eq!(flex_condition(&q(1, 1), &q(0, 1), &right), q(2, 1));
        assert_eq!(
            tangent_map(&(q(1, 1), q(0, 1)), &q(1, 1), &right),
            (q(1, 1), q(1, 1))
        );
        assert_eq!(
            tangent_map(&(q(2, 1), q(7, 1)), &q(0, 1), &right),
            (q(2, 1), q(7, 1))
        );
    }

    #[test]
    fn turning_slopes_match_tangent_map() {
        let op = params(q(1, 1), q(0, 1), q(1, 1), Branch::Minus);
        let t = turning_slopes(&q(1, 1), &op, TOL).unwrap();
        let Turning::Slope(v) = t.vertical.clone() else {
            panic!()
        };
        let Turning::Slope(h) = t.horizontal.clone() else {
            panic!()
        };
        assert_eq!((v.clone(), h.clone()), (q(1, 1), q(-1, 1)));
        assert_eq!(tangent_map(&(q(1, 1), v), &q(1, 1), &op).0, q(0, 1));
        assert_eq!(tangent_map(&(q(1, 1), h), &q(1, 1), &op).1, q(0, 1));
        let flat = turning_slopes(&q(0, 1), &op, TOL).unwrap();
        assert_eq!(flat.vertical, Turning::SameAsCurve);
        let classical = params(q(1, 1), q(1, 1), q(0, 1), Branch::Minus);
        assert_eq!(
            turning_slopes(&q(1, 1), &classical, TOL),
            Err(OffsetError::Classical)
        );
    }
}
