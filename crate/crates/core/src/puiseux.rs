//! Real places of an implicit curve at a point (Newton–Puiseux).
//!
//! The point is moved to the origin and every real tangent line is rotated
//! onto the x axis. Newton polygon edges then give the branches tangent to
//! that axis; simple edge roots are lifted by Newton iteration on series,
//! repeated roots recurse. Places come out in standard form
//! `(h^p, beta h^q + ...)` together with the rotation that undoes the
//! change of frame.

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::poly::{squarefree, Poly2, RationalPoly};
use crate::scalar::{Scalar, Tolerance};
use crate::series::{SeriesError, TruncSeries};
use crate::shape::Place;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("the point ({0}, {1}) is not on the curve")]
    NotOnCurve(String, String),
    #[error("truncation {0} is too small (need at least 4)")]
    TruncTooSmall(usize),
    #[error("the place is a single point")]
    Degenerate,
    #[error("the place is a straight line")]
    Line,
    #[error("truncation {0} does not expose q")]
    TruncTooShallow(usize),
    #[error("standard form needs an irrational rotation or scaling; use float mode")]
    Irrational,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// All real places found at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet<S: Scalar> {
    pub places: Vec<Place<S>>,
    pub diagnostics: Vec<String>,
    /// Repeated factors were removed before expansion.
    pub reduced: bool,
    /// Real branches this coefficient field cannot express.
    pub irrational: usize,
}

const MAX_DEPTH: usize = 24;

/// Exact places at a rational point.
pub fn places_at(
    f: &RationalPoly,
    point: &(Rational, Rational),
    trunc: usize,
) -> Result<BranchSet<Rational>, IngestError> {
    places_at_in(f, point, trunc, Tolerance::DEFAULT)
}

/// Places at a rational point, computed over any scalar field. The square
/// free reduction and the translation stay exact. Inexact fields reuse the
/// exact expansion when every real branch is rational, since float lifting
/// cannot separate roots that agree to many orders.
pub fn places_at_in<S: Scalar>(
    f: &RationalPoly,
    point: &(Rational, Rational),
    trunc: usize,
    tol: Tolerance,
) -> Result<BranchSet<S>, IngestError> {
    if !S::EXACT {
        if let Ok(set) = expand::<Rational>(f, point, trunc, Tolerance::DEFAULT) {
            if set.irrational == 0 {
                return Ok(BranchSet {
                    places: set
                        .places
                        .iter()
                        .map(|pl| pl.map(S::from_rational))
                        .collect(),
                    diagnostics: set.diagnostics,
                    reduced: set.reduced,
                    irrational: 0,
                });
            }
        }
    }
    expand(f, point, trunc, tol)
}

fn expand<S: Scalar>(
    f: &RationalPoly,
    point: &(Rational, Rational),
    trunc: usize,
    tol: Tolerance,
) -> Result<BranchSet<S>, IngestError> {
    if trunc < 4 {
        return Err(IngestError::TruncTooSmall(trunc));
    }
    if !f.eval(&point.0, &point.1).is_zero() {
        return Err(IngestError::NotOnCurve(
            point.0.to_text(),
            point.1.to_text(),
        ));
    }
    let mut diagnostics = Vec::new();
    let (g, reduced) = squarefree(f);
    if reduced {
        diagnostics.push(format!("repeated factors removed; expanding {g}"));
    }
    if !(point.0.is_zero() && point.1.is_zero()) {
        diagnostics.push(format!(
            "center ({}, {}) translated to the origin",
            point.0.to_text(),
            point.1.to_text()
        ));
    }
    let local = g.translate(&point.0, &point.1).map(S::from_rational);
    let work_tol = if S::EXACT {
        tol
    } else {
        Tolerance(tol.0.max(1e-10))
    };
    let mut ctx = Ctx {
        trunc,
        tol: work_tol,
        irrational: 0,
        diagnostics: Vec::new(),
    };
    let center = (S::from_rational(&point.0), S::from_rational(&point.1));
    let mut places = Vec::new();
    for (c, s) in ctx.tangent_directions(&local) {
        let rotated = cleaned(&local.rotate(&c, &s), work_tol);
        for lift in ctx.newton(&rotated, true, 0) {
            places.push(lift.into_place(trunc, center.clone(), (c.clone(), s.clone())));
        }
    }
    diagnostics.append(&mut ctx.diagnostics);
    if places.is_empty() && ctx.irrational == 0 {
        diagnostics.push("isolated point: no real branch".into());
    }
    if ctx.irrational > 0 {
        diagnostics.push(format!(
            "{} real branch(es) need irrational coefficients",
            ctx.irrational
        ));
    }
    places.sort_by(|a, b| {
        place_key(a)
            .partial_cmp(&place_key(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(BranchSet {
        places,
        diagnostics,
        reduced,
        irrational: ctx.irrational,
    })
}

fn place_key<S: Scalar>(pl: &Place<S>) -> Vec<f64> {
    let angle = pl.rotation.1.to_f64().atan2(pl.rotation.0.to_f64());
    let mut key = vec![angle, pl.x.order(Tolerance::DEFAULT).unwrap_or(0) as f64];
    key.extend(pl.y.coeffs().iter().map(|c| c.to_f64()));
    key
}

fn cleaned<S: Scalar>(p: &Poly2<S>, tol: Tolerance) -> Poly2<S> {
    if S::EXACT {
        return p.clone();
    }
    let scale = p.scale_hint();
    Poly2::from_terms(
        p.terms()
            .iter()
            .filter(|(_, c)| !c.is_negligible(scale, tol))
            .map(|(m, c)| (*m, c.clone())),
    )
}

/// A lifted branch: `X = sign * s^n`, `Y = y(s)`.
struct Lift<S: Scalar> {
    sign: S,
    n: usize,
    y: TruncSeries<S>,
    exact: bool,
}

impl<S: Scalar> Lift<S> {
    fn into_place(self, trunc: usize, center: (S, S), rotation: (S, S)) -> Place<S> {
        let (mut y, mut rotation) = (self.y.truncate(trunc), rotation);
        if self.sign.is_negative() {
            if self.n % 2 == 1 {
                y = y.substitute_monomial(&-S::one(), 1);
            } else {
                // branch on the negative side of the tangent: turn by pi
                y = y.neg();
                rotation = (-rotation.0, -rotation.1);
            }
        }
        Place {
            x: TruncSeries::monomial(S::one(), self.n, trunc),
            y,
            center,
            rotation,
            exact: self.exact,
        }
    }
}

struct Ctx {
    trunc: usize,
    tol: Tolerance,
    irrational: usize,
    diagnostics: Vec<String>,
}

impl Ctx {
    /// Unit vectors along the real tangent lines at the origin.
    fn tangent_directions<S: Scalar>(&mut self, f: &Poly2<S>) -> Vec<(S, S)> {
        let Some((_, cone)) = f.tangent_cone() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let found = S::real_roots(&cone, self.tol);
        if found.unrepresented > 0 {
            self.irrational += found.unrepresented;
            self.diagnostics.push(format!(
                "{} tangent slope(s) are irrational",
                found.unrepresented
            ));
        }
        for (slope, _) in found.roots {
            let n2 = S::one() + slope.clone() * slope.clone();
            match n2.sqrt() {
                Some(n) => out.push((S::one() / n.clone(), slope / n)),
                None => {
                    self.irrational += 1;
                    self.diagnostics.push(format!(
                        "tangent slope {} needs an irrational rotation",
                        slope.to_text()
                    ));
                }
            }
        }
        let scale = cone.iter().fold(0.0f64, |m, c| m.max(c.magnitude()));
        if cone
            .last()
            .is_some_and(|c| c.is_negligible(scale, self.tol))
        {
            out.push((S::zero(), S::one()));
        }
        out
    }

    /// Branches of `g(t, y) = 0` through the origin with `y -> 0`; at the
    /// first stage only branches tangent to the `t` axis.
    fn newton<S: Scalar>(&mut self, g: &Poly2<S>, first: bool, depth: usize) -> Vec<Lift<S>> {
        let mut out = Vec::new();
        if depth > MAX_DEPTH {
            self.diagnostics
                .push("expansion depth limit reached; branch dropped".into());
            return out;
        }
        let t = self.trunc;
        let jmin = g.terms().keys().map(|m| m.1).min().unwrap_or(0);
        let g = if jmin > 0 {
            if first {
                self.diagnostics
                    .push("a line component through the point was skipped".into());
            } else {
                out.push(Lift {
                    sign: S::one(),
                    n: 1,
                    y: TruncSeries::zero(t),
                    exact: true,
                });
            }
            Poly2::from_terms(
                g.terms()
                    .iter()
                    .map(|((i, j), c)| ((*i, j - jmin), c.clone())),
            )
        } else {
            g.clone()
        };
        // lowest i for every j
        let mut lowest: std::collections::BTreeMap<u32, u32> = Default::default();
        for (i, j) in g.terms().keys() {
            let e = lowest.entry(*j).or_insert(*i);
            *e = (*e).min(*i);
        }
        let Some((&j0, &i0)) = lowest.iter().next() else {
            return out;
        };
        if i0 == 0 {
            return out;
        }
        let (mut ic, mut jc) = (i0, j0);
        loop {
            // steepest edge leaving (ic, jc)
            let mut best: Option<(u32, u32, u32, u32)> = None; // (num, den, i, j)
            for (&j, &i) in lowest.range(jc + 1..) {
                if i >= ic {
                    continue;
                }
                let (num, den) = (ic - i, j - jc);
                let better = match best {
                    None => true,
                    Some((bn, bd, _, bj)) => {
                        let lhs = num as u64 * bd as u64;
                        let rhs = bn as u64 * den as u64;
                        lhs > rhs || (lhs == rhs && j > bj)
                    }
                };
                if better {
                    best = Some((num, den, i, j));
                }
            }
            let Some((num, den, iend, jend)) = best else {
                break;
            };
            let gcd = num.gcd(&den);
            let (mu, nu) = (num / gcd, den / gcd);
            if !first || mu > nu {
                self.edge(&g, (ic, jc), (mu, nu), jend, depth, &mut out);
            }
            ic = iend;
            jc = jend;
        }
        out
    }

    fn edge<S: Scalar>(
        &mut self,
        g: &Poly2<S>,
        start: (u32, u32),
        (mu, nu): (u32, u32),
        jend: u32,
        depth: usize,
        out: &mut Vec<Lift<S>>,
    ) {
        let delta = nu * start.0 + mu * start.1;
        let eps_choices: &[i64] = if nu % 2 == 1 { &[1] } else { &[1, -1] };
        for &eps in eps_choices {
            let eps_s = S::from_int(eps);
            let mut phi = vec![S::zero(); (jend - start.1) as usize + 1];
            for ((i, j), c) in g.terms() {
                if nu * i + mu * j == delta {
                    let mut v = c.clone();
                    if eps < 0 && i % 2 == 1 {
                        v = -v;
                    }
                    phi[(j - start.1) as usize] = phi[(j - start.1) as usize].clone() + v;
                }
            }
            let roots = S::real_roots(&phi, self.tol);
            if roots.unrepresented > 0 {
                // phi is a polynomial in z^nu: with nu even, +-c are one branch
                let branches = if nu % 2 == 0 {
                    roots.unrepresented.div_ceil(2)
                } else {
                    roots.unrepresented
                };
                self.irrational += branches;
                self.diagnostics
                    .push(format!("{branches} branch coefficient(s) are irrational"));
            }
            for (c, mult) in roots.roots {
                if c.is_negligible(1.0, self.tol) {
                    continue;
                }
                // with nu even, c and -c give the same real branch
                if nu % 2 == 0 && c.is_negative() {
                    continue;
                }
                let c = if S::EXACT || mult == 1 {
                    c
                } else {
                    polish_root(&phi, c, mult)
                };
                let h = cleaned(&substitute(g, &eps_s, nu, mu, &c, delta), self.tol);
                let subs = if mult == 1 {
                    vec![self.lift_simple(&h)]
                } else {
                    self.newton(&h, false, depth + 1)
                };
                for sub in subs {
                    let sign = eps_s.clone() * pow(&sub.sign, nu);
                    let mut y = TruncSeries::constant(c.clone(), self.trunc).add(&sub.y);
                    let shift = sub.n * mu as usize;
                    // the shift pushes the top terms past the truncation
                    let kept = y
                        .coeffs()
                        .iter()
                        .rposition(|v| !v.is_zero())
                        .is_none_or(|top| top + shift < self.trunc);
                    y = y.scale_by(&pow(&sub.sign, mu)).shift_up(shift);
                    out.push(Lift {
                        sign,
                        n: sub.n * nu as usize,
                        y: y.truncate(self.trunc),
                        exact: sub.exact && kept,
                    });
                }
            }
        }
    }

    /// Unique series root `y(t)`, `y(0) = 0`, of `g(t, y)` with
    /// `g_y(0, 0) != 0`.
    fn lift_simple<S: Scalar>(&mut self, g: &Poly2<S>) -> Lift<S> {
        let t = self.trunc;
        let zero_line = g.terms().keys().all(|m| m.1 > 0);
        let mut y = TruncSeries::zero(t);
        if !zero_line {
            let tvar = TruncSeries::monomial(S::one(), 1, t);
            let gy = g.partial_y();
            let mut good = 1usize;
            while good < 2 * t {
                let r = g.eval_series(&tvar, &y);
                let slope = gy.eval_series(&tvar, &y);
                match slope.inv(self.tol) {
                    Ok(inv) => y = y.sub(&r.mul(&inv)),
                    Err(_) => {
                        self.diagnostics
                            .push("lifting lost its simple root; branch truncated".into());
                        break;
                    }
                }
                good *= 2;
            }
        }
        Lift {
            sign: S::one(),
            n: 1,
            y,
            exact: zero_line,
        }
    }
}

fn pow<S: Scalar>(v: &S, n: u32) -> S {
    (0..n).fold(S::one(), |acc, _| acc * v.clone())
}

/// `g(eps t^nu, t^mu (c + y)) / t^delta`.
fn substitute<S: Scalar>(g: &Poly2<S>, eps: &S, nu: u32, mu: u32, c: &S, delta: u32) -> Poly2<S> {
    let mut out = Poly2::zero();
    for ((i, j), coef) in g.terms() {
        let base = coef.clone() * pow(eps, *i);
        let texp = nu * i + mu * j - delta;
        let mut binom = S::one();
        for k in 0..=*j {
            let term = base.clone() * binom.clone() * pow(c, j - k);
            out = out.add(&Poly2::from_terms([((texp, k), term)]));
            binom = binom * S::from_int((j - k) as i64) / S::from_int(k as i64 + 1);
        }
    }
    out
}

/// Refines an approximate root of multiplicity `m` as a simple root of the
/// `(m-1)`-th derivative.
fn polish_root<S: Scalar>(phi: &[S], c: S, mult: usize) -> S {
    let mut d = phi.to_vec();
    for _ in 1..mult {
        d = crate::upoly::derivative(&d);
    }
    let dd = crate::upoly::derivative(&d);
    let mut x = c;
    for _ in 0..6 {
        let slope = crate::upoly::eval(&dd, &x);
        if slope.is_zero() {
            break;
        }
        x = x.clone() - crate::upoly::eval(&d, &x) / slope;
    }
    x
}

/// Brings a raw place to standard form: rotates its tangent onto the
/// positive x axis and reparametrizes so that `x = h^p`.
pub fn standardize<S: Scalar>(
    x: &TruncSeries<S>,
    y: &TruncSeries<S>,
    tol: Tolerance,
) -> Result<Place<S>, IngestError> {
    let t = x.trunc().min(y.trunc());
    let (x, y) = (x.truncate(t), y.truncate(t));
    let center = (x.coeff_or_zero(0), y.coeff_or_zero(0));
    let dx = x.sub(&TruncSeries::constant(center.0.clone(), t));
    let dy = y.sub(&TruncSeries::constant(center.1.clone(), t));
    let scale = dx
        .coeffs()
        .iter()
        .chain(dy.coeffs())
        .fold(0.0f64, |m, c| m.max(c.magnitude()));
    let p = (1..t)
        .find(|&k| {
            !dx.coeff_or_zero(k).is_negligible(scale, tol)
                || !dy.coeff_or_zero(k).is_negligible(scale, tol)
        })
        .ok_or(IngestError::Degenerate)?;
    let (vx, vy) = (dx.coeff_or_zero(p), dy.coeff_or_zero(p));
    let n = (vx.clone() * vx.clone() + vy.clone() * vy.clone())
        .sqrt()
        .ok_or(IngestError::Irrational)?;
    let (c, s) = (vx / n.clone(), vy / n.clone());
    let xr = dx.scale_by(&c).add(&dy.scale_by(&s));
    let yr = dy.scale_by(&c).sub(&dx.scale_by(&s));
    // xr = n h^p w(h) with w(0) = 1; new parameter k h w^(1/p), k^p = n
    let w = xr.shift_down(p, tol)?.scale_by(&(S::one() / n.clone()));
    let k = n.nth_root(p as u32).ok_or(IngestError::Irrational)?;
    let root = w.pow_frac(1, p as u32, tol)?;
    let phi = root.scale_by(&k).shift_up(1).truncate(root.trunc() + 1);
    let psi = phi.revert(tol)?;
    let y_new = yr.compose(&psi, tol)?;
    let tn = y_new.trunc();
    match y_new.order(tol) {
        Some(q) if q > p => {}
        Some(_) => return Err(IngestError::TruncTooShallow(t)),
        None => return Err(IngestError::TruncTooShallow(t)),
    }
    Ok(Place {
        x: TruncSeries::monomial(S::one(), p, tn),
        y: y_new,
        center,
        rotation: (c, s),
        exact: false,
    })
}
