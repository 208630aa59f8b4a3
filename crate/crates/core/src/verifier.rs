//! Independent checks of the predictor: the series classifier, a numeric
//! shape estimator on sampled points, cusp counting, and the random suite.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::offset::{
    offset_points, offset_series, Branch, CurvatureData, OffsetError, OffsetParams,
};
use crate::predictor::{predict, CaseId, Prediction, Preserved};
use crate::scalar::{Scalar, Tolerance};
use crate::shape::{signature, LocalShape, Place, ShapeError, SignatureReport, TRUNC_CAP};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("too few samples: {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Offset(#[from] OffsetError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Ordered samples `(h, x, y)` of one branch, with the branch center.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud {
    pub branch_id: String,
    pub center: Option<(f64, f64)>,
    pub samples: Vec<(f64, f64, f64)>,
}

impl PointCloud {
    pub fn of_place<S: Scalar>(branch_id: &str, pl: &Place<S>, hs: &[f64]) -> Self {
        Self {
            branch_id: branch_id.to_string(),
            center: Some(pl.world_point(0.0)),
            samples: hs
                .iter()
                .map(|&h| {
                    let (x, y) = pl.world_point(h);
                    (h, x, y)
                })
                .collect(),
        }
    }

    /// Offset samples; parameters where the source derivative vanishes are
    /// dropped.
    pub fn of_offset<S: Scalar>(
        branch_id: &str,
        pl: &Place<S>,
        op: &OffsetParams<S>,
        hs: &[f64],
        center: Option<(f64, f64)>,
    ) -> Self {
        Self {
            branch_id: branch_id.to_string(),
            center,
            samples: offset_points(pl, op, hs)
                .into_iter()
                .filter_map(|s| s.point.map(|(x, y)| (s.h, x, y)))
                .collect(),
        }
    }
}

/// `|h|` geometric from `h_min` to `h_max`, `per_side` on each side, in
/// increasing order of `h`.
pub fn shape_grid(h_min: f64, h_max: f64, per_side: usize) -> Vec<f64> {
    let ratio = (h_max / h_min).powf(1.0 / (per_side.max(2) - 1) as f64);
    let right: Vec<f64> = (0..per_side)
        .map(|i| h_min * ratio.powi(i as i32))
        .collect();
    right
        .iter()
        .rev()
        .map(|h| -h)
        .chain(right.iter().copied())
        .collect()
}

/// Evenly spaced parameters on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericVerdict {
    Shape(LocalShape),
    /// `p = 1` is established but `q` could not be resolved.
    Regular,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericShape {
    pub verdict: NumericVerdict,
    pub p_hat: Option<f64>,
    pub q_hat: Option<f64>,
    pub p: Option<u32>,
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl NumericShape {
    fn undetermined(p_hat: Option<f64>, p: Option<u32>, note: impl Into<String>) -> Self {
        Self {
            verdict: if p == Some(1) {
                NumericVerdict::Regular
            } else {
                NumericVerdict::Undetermined
            },
            p_hat,
            q_hat: None,
            p,
            q: None,
            notes: vec![note.into()],
        }
    }
}

const MIN_R2: f64 = 0.999;
const ROUNDING: f64 = 0.25;
const FIT_WINDOW: usize = 24;
const MIN_FIT: usize = 8;

/// Least squares slope and `R^2` of `y` on `x`.
fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

fn round_exponent(slope: f64, r2: f64) -> Option<u32> {
    let k = slope.round();
    (r2 >= MIN_R2 && (slope - k).abs() <= ROUNDING && k >= 1.0).then_some(k as u32)
}

/// Slope, `R^2`, and whether both halves of the window round to the same
/// exponent (a window straddling a change of dominant term fails this).
fn fit_window(points: &[(f64, f64)]) -> (f64, f64, bool) {
    let (slope, r2) = fit(points);
    let mid = points.len() / 2;
    let (lo, hi) = (fit(&points[..mid]), fit(&points[mid..]));
    let steady = lo.0.round() == hi.0.round() && (lo.0 - hi.0).abs() <= 2.0 * ROUNDING;
    (slope, r2, steady)
}

const TANGENT_DEGREE: usize = 8;

/// Fits `D(h) = sum_k c_k (h/h_hi)^(p+k)` by least squares and returns the
/// unit direction of `c_0` with a direction-error estimate.
fn tangent_fit(window: &[&(f64, f64, f64)], p: u32, h_hi: f64) -> Option<((f64, f64), f64)> {
    let cols = TANGENT_DEGREE + 1;
    if window.len() < 2 * cols {
        return None;
    }
    let a = DMatrix::from_fn(window.len(), cols, |i, k| {
        (window[i].0 / h_hi).powi(p as i32 + k as i32)
    });
    let bx = DVector::from_iterator(window.len(), window.iter().map(|s| s.1));
    let by = DVector::from_iterator(window.len(), window.iter().map(|s| s.2));
    let svd = a.clone().svd(true, true);
    let cx = svd.solve(&bx, 1e-14).ok()?;
    let cy = svd.solve(&by, 1e-14).ok()?;
    let n = cx[0].hypot(cy[0]);
    if !(n.is_finite() && n > 0.0) {
        return None;
    }
    let (rx, ry) = (&a * &cx - bx, &a * &cy - by);
    let rms = ((rx.norm_squared() + ry.norm_squared()) / window.len() as f64).sqrt();
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min().max(f64::MIN_POSITIVE);
    Some((
        (cx[0] / n, cy[0] / n),
        (rms * cond.sqrt() / n).max(f64::EPSILON),
    ))
}

/// Estimates `(p, q)` of a sampled branch from log-log slopes of the
/// displacement from the center and of its component normal to the
/// limiting tangent; parities are cross-checked on `+-h` pairs.
pub fn numeric_shape(cloud: &PointCloud) -> NumericShape {
    let Some(c) = cloud.center else {
        return NumericShape::undetermined(None, None, "no center");
    };
    let disp: Vec<(f64, f64, f64)> = cloud
        .samples
        .iter()
        .filter(|s| s.0 != 0.0 && s.1.is_finite() && s.2.is_finite())
        .map(|&(h, x, y)| (h, x - c.0, y - c.1))
        .collect();
    let (pos, neg) = (
        disp.iter().filter(|s| s.0 > 0.0).count(),
        disp.iter().filter(|s| s.0 < 0.0).count(),
    );
    if pos + neg < 64 || pos < MIN_FIT || neg < MIN_FIT {
        return NumericShape::undetermined(
            None,
            None,
            format!("need >= 64 samples on both sides, got {pos}+{neg}"),
        );
    }
    let extent = cloud.samples.iter().fold(c.0.abs().max(c.1.abs()), |m, s| {
        m.max(s.1.abs()).max(s.2.abs())
    });
    let noise = 64.0 * f64::EPSILON * (1.0 + extent);
    let side = |sign: f64| {
        let mut v: Vec<(f64, f64, f64)> =
            disp.iter().copied().filter(|s| s.0 * sign > 0.0).collect();
        v.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        v
    };
    let (right, left) = (side(1.0), side(-1.0));
    let norm = |s: &(f64, f64, f64)| s.1.hypot(s.2);

    // p from |D| ~ |h|^p
    let p_fit = |v: &[(f64, f64, f64)]| {
        let pts: Vec<(f64, f64)> = v
            .iter()
            .filter(|s| norm(s) > 1e3 * noise)
            .take(FIT_WINDOW)
            .map(|s| (s.0.abs().ln(), norm(s).ln()))
            .collect();
        if pts.len() < MIN_FIT {
            return None;
        }
        Some(fit_window(&pts))
    };
    let (Some((pr, r2r, sr)), Some((pl, r2l, sl))) = (p_fit(&right), p_fit(&left)) else {
        return NumericShape::undetermined(None, None, "displacement below noise");
    };
    let p_hat = 0.5 * (pr + pl);
    let p = match (round_exponent(pr, r2r), round_exponent(pl, r2l)) {
        (Some(a), Some(b)) if a == b && sr && sl => a,
        _ => {
            return NumericShape::undetermined(
                Some(p_hat),
                None,
                format!("p fit failed: slopes {pr:.3}/{pl:.3}"),
            )
        }
    };

    // limiting tangent: least squares of D on h^(p+k) over a window
    // straddling 0, so u = coefficient of h^p is interpolated, not extrapolated
    let Some(h_lo) = right.iter().find(|s| norm(s) > 1e6 * noise).map(|s| s.0) else {
        return NumericShape::undetermined(Some(p_hat), Some(p), "tangent fit failed");
    };
    let h_hi = (20.0 * h_lo).min(right.last().map_or(h_lo, |s| s.0));
    let window: Vec<&(f64, f64, f64)> = disp
        .iter()
        .filter(|s| s.0.abs() >= h_lo && s.0.abs() <= h_hi)
        .collect();
    let Some((u, u_err)) = tangent_fit(&window, p, h_hi) else {
        return NumericShape::undetermined(Some(p_hat), Some(p), "tangent fit failed");
    };
    let (ux, uy) = u;

    // q from the normal component eta = u x D ~ h^q
    let eta = |s: &(f64, f64, f64)| ux * s.2 - uy * s.1;
    let floor = |s: &(f64, f64, f64)| 1e3 * (noise + u_err * norm(s));
    let q_fit = |v: &[(f64, f64, f64)]| {
        let pts: Vec<(f64, f64)> = v
            .iter()
            .filter(|s| eta(s).abs() > floor(s))
            .take(FIT_WINDOW)
            .map(|s| (s.0.abs().ln(), eta(s).abs().ln()))
            .collect();
        if pts.len() < MIN_FIT {
            return None;
        }
        Some(fit_window(&pts))
    };
    let (Some((qr, q2r, sr)), Some((ql, q2l, sl))) = (q_fit(&right), q_fit(&left)) else {
        return NumericShape::undetermined(Some(p_hat), Some(p), "normal component below noise");
    };
    let q_hat = 0.5 * (qr + ql);
    let q = match (round_exponent(qr, q2r), round_exponent(ql, q2l)) {
        (Some(a), Some(b)) if a == b && a > p && sr && sl => a,
        _ => {
            let mut out = NumericShape::undetermined(
                Some(p_hat),
                Some(p),
                format!("q fit failed: slopes {qr:.3}/{ql:.3}"),
            );
            out.q_hat = Some(q_hat);
            return out;
        }
    };

    // parity cross-check on mirrored samples
    let pair = |ok: &dyn Fn(&(f64, f64, f64)) -> bool| {
        right.iter().filter(|s| ok(s)).find_map(|r| {
            left.iter()
                .find(|l| (l.0 + r.0).abs() <= 1e-12 * r.0.abs() && ok(l))
                .map(|l| (*r, *l))
        })
    };
    let mut notes = Vec::new();
    if let Some((r, l)) = pair(&|s| norm(s) > 1e3 * noise) {
        let even = r.1 * l.1 + r.2 * l.2 > 0.0;
        if even != (p % 2 == 0) {
            return NumericShape::undetermined(Some(p_hat), Some(p), "p parity check failed");
        }
    } else {
        notes.push("no mirrored pair for the p parity check".into());
    }
    if let Some((r, l)) = pair(&|s| eta(s).abs() > floor(s)) {
        let even = eta(&r) * eta(&l) > 0.0;
        if even != (q % 2 == 0) {
            return NumericShape::undetermined(Some(p_hat), Some(p), "q parity check failed");
        }
    } else {
        notes.push("no mirrored pair for the q parity check".into());
    }
    NumericShape {
        verdict: NumericVerdict::Shape(LocalShape::from_pq(p, q)),
        p_hat: Some(p_hat),
        q_hat: Some(q_hat),
        p: Some(p),
        q: Some(q),
        notes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspReport {
    pub count: usize,
    pub locations: Vec<f64>,
}

/// Counts reversals of the discrete tangent direction along the cloud. With
/// a sampler, each location is refined to the speed minimum in its bracket.
pub fn count_cusps(
    cloud: &PointCloud,
    sampler: Option<&dyn Fn(f64) -> Option<(f64, f64)>>,
) -> Result<CuspReport, VerifyError> {
    let pts = &cloud.samples;
    if pts.len() < 3 {
        return Err(VerifyError::TooFewSamples(pts.len()));
    }
    let tangents: Vec<(usize, f64, f64)> = pts
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let (dx, dy) = (w[1].1 - w[0].1, w[1].2 - w[0].2);
            let n = dx.hypot(dy);
            (n > 0.0).then(|| (i, dx / n, dy / n))
        })
        .collect();
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for w in tangents.windows(2) {
        let ((i, ax, ay), (j, bx, by)) = (w[0], w[1]);
        if ax * bx + ay * by < 0.0 {
            let (lo, hi) = (pts[i].0, pts[j + 1].0);
            match brackets.last_mut() {
                Some(last) if lo <= last.1 => last.1 = hi,
                _ => brackets.push((lo, hi)),
            }
        }
    }
    let locations = brackets
        .iter()
        .map(|&(lo, hi)| match sampler {
            Some(f) => refine_cusp(f, lo, hi),
            None => 0.5 * (lo + hi),
        })
        .collect::<Vec<_>>();
    Ok(CuspReport {
        count: locations.len(),
        locations,
    })
}

/// Golden-section search for the minimum of the central-difference speed.
fn refine_cusp(f: &dyn Fn(f64) -> Option<(f64, f64)>, lo: f64, hi: f64) -> f64 {
    let delta = 1e-7 * (hi - lo).abs().max(1e-3);
    let speed = |h: f64| match (f(h - delta), f(h + delta)) {
        (Some(a), Some(b)) => (b.0 - a.0).hypot(b.1 - a.1),
        _ => 0.0,
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (speed(c), speed(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = speed(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = speed(d);
        }
    }
    0.5 * (a + b)
}

/// Offset signature and shape computed from the offset series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub signature: (u32, u32),
    pub shape: LocalShape,
    pub regular: bool,
    pub preserved: bool,
    pub trunc: usize,
}

/// Classifies the offset by its series; exact places are re-truncated
/// deeper (doubling up to the cap) until the signature is determined.
pub fn series_verdict<S: Scalar>(
    pl: &Place<S>,
    op: &OffsetParams<S>,
    tol: Tolerance,
) -> Result<SeriesVerdict, VerifyError> {
    let src = signature(pl, tol)?;
    let mut t = pl.trunc();
    loop {
        let off = offset_series(&pl.with_trunc(t), op, tol)?;
        match off.signature(tol) {
            Ok(sig) => {
                let shape = LocalShape::from_pq(sig.p, sig.q);
                return Ok(SeriesVerdict {
                    signature: (sig.p, sig.q),
                    shape,
                    regular: sig.p == 1,
                    preserved: shape == src.shape(),
                    trunc: t,
                });
            }
            Err(ShapeError::SignatureUndetermined { .. }) if pl.exact && t < TRUNC_CAP => {
                t = (2 * t).min(TRUNC_CAP);
            }
            Err(e) => return Err(e.into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Agree,
    Disagree,
    Abstain,
}

impl Tri {
    fn of(v: Option<bool>) -> Self {
        match v {
            Some(true) => Tri::Agree,
            Some(false) => Tri::Disagree,
            None => Tri::Abstain,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Agreement {
    pub predictor_series: Tri,
    pub predictor_numeric: Tri,
    pub series_numeric: Tri,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchCheck {
    pub branch: Branch,
    pub prediction: Option<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_error: Option<String>,
    pub series: Option<SeriesVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_error: Option<String>,
    pub numeric: Option<NumericShape>,
    pub agreement: Agreement,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub source: SignatureReport,
    pub branches: Vec<BranchCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckConfig {
    pub tol: Tolerance,
    pub h_min: f64,
    pub h_max: f64,
    pub per_side: usize,
    pub numeric: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::DEFAULT,
            h_min: 1e-3,
            h_max: 0.5,
            per_side: 64,
            numeric: true,
        }
    }
}

/// Whether a decisive prediction matches the series classification.
pub fn prediction_matches(pred: &Prediction, series: &SeriesVerdict) -> Option<bool> {
    let preserved = pred.preserved.as_bool()?;
    let mut ok = preserved == series.preserved;
    if let Some(sig) = pred.predicted_signature {
        ok &= sig == series.signature;
    }
    if let Some(p0) = pred.predicted_p0 {
        ok &= p0 == series.signature.0;
    }
    if let Some(shape) = pred.predicted_shape {
        ok &= shape == series.shape;
    }
    Some(ok)
}

fn numeric_matches(num: &NumericShape, shape: LocalShape, regular: bool) -> Option<bool> {
    match num.verdict {
        NumericVerdict::Shape(s) => Some(s == shape),
        NumericVerdict::Regular => Some(regular),
        NumericVerdict::Undetermined => None,
    }
}

/// Runs the predictor, the series classifier and the numeric estimator on
/// both sheets.
pub fn cross_check<S: Scalar>(
    pl: &Place<S>,
    op: &OffsetParams<S>,
    cfg: &CheckConfig,
) -> Result<CrossCheck, VerifyError> {
    let tol = cfg.tol;
    let sig = signature(pl, tol)?;
    let data = CurvatureData::from_signature(&sig);
    let grid = shape_grid(cfg.h_min, cfg.h_max, cfg.per_side);
    let fpl = pl.to_f64();
    let mut branches = Vec::new();
    for br in Branch::BOTH {
        let op = op.with_branch(br);
        let (prediction, prediction_error) = match predict(&sig, &data, &op, tol) {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let (series, series_error) = match series_verdict(pl, &op, tol) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let numeric = cfg.numeric.then(|| {
            let center = offset_series(pl, &op, tol).ok().map(|o| {
                let (x, y) = o.world_center();
                (x.to_f64(), y.to_f64())
            });
            let fop = OffsetParams {
                d: op.d.to_f64(),
                a: op.a.to_f64(),
                b: op.b.to_f64(),
                branch: br,
            };
            numeric_shape(&PointCloud::of_offset(
                &format!("gen{br}"),
                &fpl,
                &fop,
                &grid,
                center,
            ))
        });
        let predictor_series = Tri::of(match (&prediction, &series) {
            (Some(p), Some(s)) => prediction_matches(p, s),
            _ => None,
        });
        let predictor_numeric = Tri::of(match (&prediction, &numeric) {
            (Some(p), Some(n)) if p.is_decisive() => p
                .predicted_shape
                .and_then(|shape| numeric_matches(n, shape, p.predicted_p0 == Some(1))),
            _ => None,
        });
        let series_numeric = Tri::of(match (&series, &numeric) {
            (Some(s), Some(n)) => numeric_matches(n, s.shape, s.regular),
            _ => None,
        });
        branches.push(BranchCheck {
            branch: br,
            prediction,
            prediction_error,
            series,
            series_error,
            numeric,
            agreement: Agreement {
                predictor_series,
                predictor_numeric,
                series_numeric,
            },
        });
    }
    Ok(CrossCheck {
        source: sig.report(),
        branches,
    })
}

/// Exponent bounds of random places.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteBounds {
    pub p_max: u32,
    pub q_max: u32,
    pub r_max: u32,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        Self {
            p_max: 4,
            q_max: 9,
            r_max: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteFlags {
    /// Only `q = p + 1` with `p >= 2`.
    pub force_smoothing: bool,
    /// Only odd `p` and odd `q`.
    pub force_flex: bool,
}

/// Rotations with rational cosine and sine.
pub const PYTHAGOREAN: [(i64, i64, i64); 8] = [
    (3, 4, 5),
    (4, 3, 5),
    (5, 12, 13),
    (12, 5, 13),
    (8, 15, 17),
    (0, 1, 1),
    (7, 24, 25),
    (20, 21, 29),
];

/// A nonzero rational with numerator up to 5 and denominator up to 4.
pub fn random_coefficient<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    Rational::from_ratio(n, rng.gen_range(1..=4))
}

/// A random non-classical rotation `(a, b)` on the unit circle.
pub fn random_rotation<R: Rng>(rng: &mut R, need_a: bool) -> (Rational, Rational) {
    loop {
        let &(a, b, c) = PYTHAGOREAN.choose(rng).expect("nonempty");
        if need_a && a == 0 {
            continue;
        }
        let sa = if rng.gen_bool(0.5) { 1 } else { -1 };
        let sb = if rng.gen_bool(0.5) { 1 } else { -1 };
        return (
            Rational::from_ratio(sa * a, c),
            Rational::from_ratio(sb * b, c),
        );
    }
}

/// Random non-classical offset parameters with a positive distance.
pub fn random_params<R: Rng>(rng: &mut R) -> OffsetParams<Rational> {
    let d = Rational::from_ratio(rng.gen_range(1..=6), rng.gen_range(1..=4));
    let (a, b) = random_rotation(rng, false);
    OffsetParams {
        d,
        a,
        b,
        branch: Branch::Plus,
    }
}

/// Truncation that leaves room for every clause: `2 * (last exponent) +
/// 2p + 4`, at least 24, at most the cap.
pub fn suite_trunc(p: u32, last: u32) -> usize {
    (24usize.max(2 * last as usize + 2 * p as usize + 4)).min(TRUNC_CAP)
}

/// The standard place `(h^p, beta h^q + xi h^r + ...)` with random nonzero
/// coefficients; a tail term past `r` is added when needed for primitivity.
pub fn random_standard_place<R: Rng>(
    rng: &mut R,
    p: u32,
    q: u32,
    r: Option<u32>,
) -> Place<Rational> {
    let mut y = vec![(q as usize, random_coefficient(rng))];
    let mut g = p.gcd(&q);
    let mut last = q;
    if let Some(r) = r {
        y.push((r as usize, random_coefficient(rng)));
        g = g.gcd(&r);
        last = r;
    }
    if g > 1 {
        let t = (last + 1..)
            .find(|t| t.gcd(&g) == 1)
            .expect("coprime exists");
        y.push((t as usize, random_coefficient(rng)));
        last = t;
    }
    Place::polynomial(
        &[(p as usize, Rational::from_int(1))],
        &y,
        suite_trunc(p, last),
    )
}

/// One generated suite item.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteItem {
    pub index: usize,
    pub place: Place<Rational>,
    pub params: OffsetParams<Rational>,
}

impl SuiteItem {
    pub fn repro(&self, branch: Branch) -> String {
        format!(
            "offsetshape analyze --place \"{}, {}\" --d {} --cosab {},{} --branch {}",
            self.place.x,
            self.place.y,
            self.params.d.to_text(),
            self.params.a.to_text(),
            self.params.b.to_text(),
            branch
        )
    }
}

fn pick<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> Option<u32> {
    (lo <= hi).then(|| rng.gen_range(lo..=hi))
}

fn generate_item<R: Rng>(
    rng: &mut R,
    index: usize,
    b: SuiteBounds,
    flags: SuiteFlags,
) -> SuiteItem {
    loop {
        let mut params = random_params(rng);
        let optional_r = |rng: &mut R, q: u32, prob: f64| {
            if rng.gen_bool(prob) {
                pick(rng, q + 1, b.r_max)
            } else {
                None
            }
        };
        let (p, q, r, tuned) = if flags.force_smoothing {
            let Some(p) = pick(rng, 2, b.p_max) else {
                continue;
            };
            (p, p + 1, optional_r(rng, p + 1, 0.5), false)
        } else if flags.force_flex {
            let p = *[1u32, 3].choose(rng).expect("nonempty");
            let odd: Vec<u32> = (p + 1..=b.q_max).filter(|q| q % 2 == 1).collect();
            let Some(&q) = odd.choose(rng) else { continue };
            (p, q, optional_r(rng, q, 0.5), false)
        } else {
            let p = rng.gen_range(1..=b.p_max);
            let u: f64 = rng.gen();
            if u < 0.45 {
                let q = 2 * p;
                if q > b.q_max {
                    continue;
                }
                let r = if p == 1 && rng.gen_bool(0.15) {
                    None
                } else {
                    let r = match rng.gen_range(0..3) {
                        0 => pick(rng, 2 * p + 1, (3 * p - 1).min(b.r_max)),
                        1 => (3 * p <= b.r_max).then_some(3 * p),
                        _ => pick(rng, 3 * p + 1, b.r_max),
                    };
                    let Some(r) = r else { continue };
                    Some(r)
                };
                (p, q, r, rng.gen_bool(1.0 / 3.0))
            } else if u < 0.65 {
                let Some(q) = pick(rng, 2 * p + 1, b.q_max) else {
                    continue;
                };
                (p, q, optional_r(rng, q, 0.5), false)
            } else {
                let Some(q) = pick(rng, p + 1, (2 * p - 1).min(b.q_max)) else {
                    continue;
                };
                (p, q, optional_r(rng, q, 0.7), false)
            }
        };
        let place = random_standard_place(rng, p, q, r);
        if tuned {
            // 1 - d a ktilde = 0 on the + sheet
            let beta = place.y.coeff_or_zero(q as usize);
            let (mut a, bb) = random_rotation(rng, true);
            if (a.clone() * beta.clone()) < Rational::from_int(0) {
                a = -a;
            }
            params.d = Rational::from_int(1) / (a.clone() * beta * Rational::from_int(2));
            params.a = a;
            params.b = bb;
        }
        return SuiteItem {
            index,
            place,
            params,
        };
    }
}

/// The suite items for a seed; item `i` depends only on `(seed, i)`.
pub fn suite_items(seed: u64, n: usize, bounds: SuiteBounds, flags: SuiteFlags) -> Vec<SuiteItem> {
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            generate_item(&mut rng, i, bounds, flags)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseStats {
    pub hits: usize,
    pub agree: usize,
    pub disagree: usize,
    pub undetermined: usize,
    pub borderline: usize,
    pub flagged_conflicts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Disagreement {
    pub index: usize,
    pub branch: Branch,
    pub case: CaseId,
    pub source: (u32, u32),
    pub predicted: Preserved,
    pub predicted_signature: Option<(u32, u32)>,
    pub series_signature: (u32, u32),
    pub series_preserved: bool,
    pub repro: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NumericStats {
    pub agree: usize,
    pub abstain: usize,
    pub contradict: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub n: usize,
    pub bounds: SuiteBounds,
    pub flags: SuiteFlags,
    pub cases: BTreeMap<String, CaseStats>,
    pub decisive_disagreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub flagged_conflicts: Vec<Disagreement>,
    pub numeric: NumericStats,
    /// Singular sources where "offset regular" and "q - p = 1" differ.
    pub smoothing_exceptions: usize,
    /// Flex sources with a decisive "preserved" verdict.
    pub flex_preserved: usize,
    /// Flex sources whose series offset shape is flex.
    pub flex_offsets: usize,
    /// `q > 2p` sources whose offset signature is not `(p, q - p)`.
    pub table_mismatches: usize,
    /// Clauses of the `q = 2p`, `xi_r != 0` T11/T12 clauses never reached.
    pub missing_coverage: Vec<String>,
    pub errors: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.decisive_disagreements == 0
    }
}

/// Runs `cross_check` over generated items and aggregates per clause.
pub fn random_suite(
    seed: u64,
    n: usize,
    bounds: SuiteBounds,
    flags: SuiteFlags,
    cfg: &CheckConfig,
) -> SuiteReport {
    let items = suite_items(seed, n, bounds, flags);
    let workers = std::thread::available_parallelism()
        .map_or(1, |k| k.get())
        .min(16);
    let chunk = items.len().div_ceil(workers).max(1);
    let checks: Vec<Result<CrossCheck, VerifyError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|it| cross_check(&it.place, &it.params, cfg))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("suite worker panicked"))
            .collect()
    });

    let mut report = SuiteReport {
        seed,
        n,
        bounds,
        flags,
        cases: BTreeMap::new(),
        decisive_disagreements: 0,
        disagreements: Vec::new(),
        flagged_conflicts: Vec::new(),
        numeric: NumericStats::default(),
        smoothing_exceptions: 0,
        flex_preserved: 0,
        flex_offsets: 0,
        table_mismatches: 0,
        missing_coverage: Vec::new(),
        errors: Vec::new(),
    };
    for (item, check) in items.iter().zip(checks) {
        let check = match check {
            Ok(c) => c,
            Err(e) => {
                report.errors.push(format!("item {}: {e}", item.index));
                continue;
            }
        };
        let (p, q) = (check.source.p, check.source.q);
        let flex = check.source.shape == LocalShape::Flex;
        for bc in &check.branches {
            for err in bc.prediction_error.iter().chain(bc.series_error.iter()) {
                report
                    .errors
                    .push(format!("item {} branch {}: {err}", item.index, bc.branch));
            }
            if let Some(s) = &bc.series {
                if p > 1 && s.regular != (q - p == 1) {
                    report.smoothing_exceptions += 1;
                }
                if flex && s.shape == LocalShape::Flex {
                    report.flex_offsets += 1;
                }
                if q > 2 * p && s.signature != (p, q - p) {
                    report.table_mismatches += 1;
                }
            }
            match bc.agreement.series_numeric {
                Tri::Agree => report.numeric.agree += 1,
                Tri::Abstain => report.numeric.abstain += 1,
                Tri::Disagree => report.numeric.contradict += 1,
            }
            let Some(pred) = &bc.prediction else { continue };
            if flex && pred.preserved == Preserved::Yes {
                report.flex_preserved += 1;
            }
            let stats = report.cases.entry(pred.case.to_string()).or_default();
            stats.hits += 1;
            match pred.preserved {
                Preserved::Undetermined => stats.undetermined += 1,
                Preserved::Borderline => stats.borderline += 1,
                _ => {}
            }
            let Some(series) = &bc.series else { continue };
            let Some(ok) = prediction_matches(pred, series) else {
                continue;
            };
            let record = || Disagreement {
                index: item.index,
                branch: bc.branch,
                case: pred.case,
                source: (p, q),
                predicted: pred.preserved,
                predicted_signature: pred.predicted_signature,
                series_signature: series.signature,
                series_preserved: series.preserved,
                repro: item.repro(bc.branch),
            };
            if ok {
                stats.agree += 1;
            } else if pred.flagged {
                stats.flagged_conflicts += 1;
                report.flagged_conflicts.push(record());
            } else {
                stats.disagree += 1;
                report.decisive_disagreements += 1;
                report.disagreements.push(record());
            }
        }
    }
    if !flags.force_flex && !flags.force_smoothing {
        report.missing_coverage = CaseId::Q2P_ZERO_WITH_R
            .iter()
            .filter(|c| !report.cases.contains_key(c.as_str()))
            .map(|c| c.to_string())
            .collect();
    }
    report
}
