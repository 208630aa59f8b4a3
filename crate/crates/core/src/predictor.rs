//! Shape-preservation verdicts from the signature and the leading
//! coefficients of a place, by the case analysis on `q - 2p`.
//!
//! Sign convention: the branch sign `s` of an offset sheet plays the role of
//! the upper sign in the `∓`/`±` pairs of the displayed conditions, so the
//! coefficient of `h^p` in `X` for `q = 2p` reads `1 - s d a ktilde`.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::offset::{Branch, CurvatureData, OffsetParams};
use crate::scalar::{Scalar, Tolerance};
use crate::shape::{LocalShape, Signature};

/// Clause tags, one per leaf of the case analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    SmoothedQp1,
    Q2pPosTable,
    Q2pNegP8,
    Q2pZeroT11_1,
    Q2pZeroT11_2,
    Q2pZeroT11_3,
    Q2pZeroT12_1,
    Q2pZeroT12_2,
    Q2pZeroT12_3,
    Q2pZeroParabola,
    Q2pNegT13_1,
    Q2pNegT13_2,
    Q2pNegT13Open,
    Q2pNegT14_1a,
    Q2pNegT14_1b,
    Q2pNegT14_2a,
    Q2pNegT14_2b1,
    Q2pNegT14_2b2,
    Q2pNegT14_2bOpen,
    Q2pNegT14_2c1,
    Q2pNegT14_2c2,
    Q2pNegT14_2cOpen,
    Q2pNegT14_3a,
    Q2pNegT14_3b,
    Q2pNegT14_3bOpen,
    Q2pNegT14_3c,
    Q2pNegT14_3cOpen,
    ClassicalSmoothed,
    ClassicalQ2pPos,
    ClassicalQ2pZero,
    ClassicalQ2pNeg,
}

impl CaseId {
    pub const ALL: [CaseId; 31] = [
        CaseId::SmoothedQp1,
        CaseId::Q2pPosTable,
        CaseId::Q2pNegP8,
        CaseId::Q2pZeroT11_1,
        CaseId::Q2pZeroT11_2,
        CaseId::Q2pZeroT11_3,
        CaseId::Q2pZeroT12_1,
        CaseId::Q2pZeroT12_2,
        CaseId::Q2pZeroT12_3,
        CaseId::Q2pZeroParabola,
        CaseId::Q2pNegT13_1,
        CaseId::Q2pNegT13_2,
        CaseId::Q2pNegT13Open,
        CaseId::Q2pNegT14_1a,
        CaseId::Q2pNegT14_1b,
        CaseId::Q2pNegT14_2a,
        CaseId::Q2pNegT14_2b1,
        CaseId::Q2pNegT14_2b2,
        CaseId::Q2pNegT14_2bOpen,
        CaseId::Q2pNegT14_2c1,
        CaseId::Q2pNegT14_2c2,
        CaseId::Q2pNegT14_2cOpen,
        CaseId::Q2pNegT14_3a,
        CaseId::Q2pNegT14_3b,
        CaseId::Q2pNegT14_3bOpen,
        CaseId::Q2pNegT14_3c,
        CaseId::Q2pNegT14_3cOpen,
        CaseId::ClassicalSmoothed,
        CaseId::ClassicalQ2pPos,
        CaseId::ClassicalQ2pZero,
        CaseId::ClassicalQ2pNeg,
    ];

    /// The T11 and T12 tags (`q = 2p`, `xi_r != 0`).
    pub const Q2P_ZERO_WITH_R: [CaseId; 6] = [
        CaseId::Q2pZeroT11_1,
        CaseId::Q2pZeroT11_2,
        CaseId::Q2pZeroT11_3,
        CaseId::Q2pZeroT12_1,
        CaseId::Q2pZeroT12_2,
        CaseId::Q2pZeroT12_3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::SmoothedQp1 => "SMOOTHED_QP1",
            CaseId::Q2pPosTable => "Q2P_POS_TABLE",
            CaseId::Q2pNegP8 => "Q2P_NEG_P8",
            CaseId::Q2pZeroT11_1 => "Q2P_ZERO_T11_1",
            CaseId::Q2pZeroT11_2 => "Q2P_ZERO_T11_2",
            CaseId::Q2pZeroT11_3 => "Q2P_ZERO_T11_3",
            CaseId::Q2pZeroT12_1 => "Q2P_ZERO_T12_1",
            CaseId::Q2pZeroT12_2 => "Q2P_ZERO_T12_2",
            CaseId::Q2pZeroT12_3 => "Q2P_ZERO_T12_3",
            CaseId::Q2pZeroParabola => "Q2P_ZERO_PARABOLA",
            CaseId::Q2pNegT13_1 => "Q2P_NEG_T13_1",
            CaseId::Q2pNegT13_2 => "Q2P_NEG_T13_2",
            CaseId::Q2pNegT13Open => "Q2P_NEG_T13_OPEN",
            CaseId::Q2pNegT14_1a => "Q2P_NEG_T14_1a",
            CaseId::Q2pNegT14_1b => "Q2P_NEG_T14_1b",
            CaseId::Q2pNegT14_2a => "Q2P_NEG_T14_2a",
            CaseId::Q2pNegT14_2b1 => "Q2P_NEG_T14_2b1",
            CaseId::Q2pNegT14_2b2 => "Q2P_NEG_T14_2b2",
            CaseId::Q2pNegT14_2bOpen => "Q2P_NEG_T14_2b_OPEN",
            CaseId::Q2pNegT14_2c1 => "Q2P_NEG_T14_2c1",
            CaseId::Q2pNegT14_2c2 => "Q2P_NEG_T14_2c2",
            CaseId::Q2pNegT14_2cOpen => "Q2P_NEG_T14_2c_OPEN",
            CaseId::Q2pNegT14_3a => "Q2P_NEG_T14_3a",
            CaseId::Q2pNegT14_3b => "Q2P_NEG_T14_3b",
            CaseId::Q2pNegT14_3bOpen => "Q2P_NEG_T14_3b_OPEN",
            CaseId::Q2pNegT14_3c => "Q2P_NEG_T14_3c",
            CaseId::Q2pNegT14_3cOpen => "Q2P_NEG_T14_3c_OPEN",
            CaseId::ClassicalSmoothed => "CLASSICAL_SMOOTHED",
            CaseId::ClassicalQ2pPos => "CLASSICAL_Q2P_POS",
            CaseId::ClassicalQ2pZero => "CLASSICAL_Q2P_ZERO",
            CaseId::ClassicalQ2pNeg => "CLASSICAL_Q2P_NEG",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == text)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseId {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preserved {
    Yes,
    No,
    /// The clause gives no verdict for this outcome of its condition.
    Undetermined,
    /// A condition fell inside the float tolerance band; see `alternatives`.
    Borderline,
}

impl Preserved {
    fn from_bool(v: bool) -> Self {
        if v {
            Preserved::Yes
        } else {
            Preserved::No
        }
    }

    pub fn is_decisive(self) -> bool {
        matches!(self, Preserved::Yes | Preserved::No)
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Preserved::Yes => Some(true),
            Preserved::No => Some(false),
            _ => None,
        }
    }
}

/// One displayed condition, evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub expr: String,
    pub value: String,
    pub zero: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub borderline: bool,
}

/// The verdict under one resolution of the borderline conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    /// `zero?` assumed for each borderline condition, in evaluation order.
    pub assumed_zero: Vec<bool>,
    pub case: CaseId,
    pub preserved: Preserved,
    pub predicted_signature: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub case: CaseId,
    pub branch: Branch,
    pub preserved: Preserved,
    pub predicted_signature: Option<(u32, u32)>,
    pub predicted_p0: Option<u32>,
    pub predicted_shape: Option<LocalShape>,
    pub conditions: Vec<Condition>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<Outcome>,
    /// The clause is one whose reading is ambiguous; a conflict with the
    /// series oracle is reported rather than counted as a disagreement.
    pub flagged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Prediction {
    pub fn is_decisive(&self) -> bool {
        self.preserved.is_decisive()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("the clause needs the second term xi_r h^r; raise trunc")]
    NeedDeeperTrunc,
    #[error("invalid signature ({p}, {q})")]
    InvalidSignature { p: u32, q: u32 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Verdict of one dispatch run, before assembly.
struct Leaf {
    case: CaseId,
    preserved: Preserved,
    sig: Option<(u32, u32)>,
    p0: Option<u32>,
    flagged: bool,
    notes: Vec<String>,
}

impl Leaf {
    fn new(case: CaseId, preserved: Preserved) -> Self {
        Self {
            case,
            preserved,
            sig: None,
            p0: None,
            flagged: false,
            notes: Vec::new(),
        }
    }

    fn sig(mut self, p0: u32, q0: u32) -> Self {
        self.sig = Some((p0, q0));
        self.p0 = Some(p0);
        self
    }

    fn p0(mut self, p0: u32) -> Self {
        self.p0 = Some(p0);
        self
    }

    fn flagged(mut self) -> Self {
        self.flagged = true;
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

/// Condition evaluator; float conditions inside the tolerance band take
/// forced outcomes so both readings can be explored.
struct Eval<'a> {
    tol: Tolerance,
    forced: &'a [bool],
    borderlines: usize,
    fork: bool,
    conds: Vec<Condition>,
}

impl Eval<'_> {
    /// Evaluates `sum(terms)`; the scale for the zero test is the largest
    /// term.
    fn zero<S: Scalar>(&mut self, expr: &str, terms: &[S]) -> bool {
        let value = terms.iter().cloned().fold(S::zero(), |acc, t| acc + t);
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.magnitude()));
        let negligible = value.is_negligible(scale, self.tol);
        let (zero, borderline) = if S::EXACT || !negligible {
            (negligible, false)
        } else {
            let z = match self.forced.get(self.borderlines) {
                Some(&z) => z,
                None => {
                    self.fork = true;
                    false
                }
            };
            self.borderlines += 1;
            (z, true)
        };
        self.conds.push(Condition {
            expr: expr.to_string(),
            value: value.to_text(),
            zero,
            borderline,
        });
        zero
    }
}

fn parity_eq(x: u32, y: u32) -> bool {
    x % 2 == y % 2
}

/// Applies the case analysis for a non-classical offset sheet.
pub fn predict<S: Scalar>(
    sig: &Signature<S>,
    coeffs: &CurvatureData<S>,
    op: &OffsetParams<S>,
    tol: Tolerance,
) -> Result<Prediction, PredictError> {
    if op.classical(tol) {
        return classical_reference(sig, coeffs, &op.d, op.branch, tol);
    }
    let pred = explore(sig, op.branch, tol, |ev| dispatch(sig, coeffs, op, ev))?;
    if LocalShape::from_pq(sig.p, sig.q) == LocalShape::Flex && pred.preserved == Preserved::Yes {
        return Err(PredictError::Invariant(format!(
            "flex place ({}, {}) predicted preserved by {}",
            sig.p, sig.q, pred.case
        )));
    }
    Ok(pred)
}

/// Runs `run` once per resolution of the borderline conditions it meets and
/// assembles the prediction.
fn explore<S: Scalar>(
    sig: &Signature<S>,
    branch: Branch,
    tol: Tolerance,
    run: impl Fn(&mut Eval) -> Result<Leaf, PredictError>,
) -> Result<Prediction, PredictError> {
    let mut pending: Vec<Vec<bool>> = vec![Vec::new()];
    let mut leaves: Vec<(Vec<bool>, Leaf, Vec<Condition>)> = Vec::new();
    while let Some(forced) = pending.pop() {
        let mut ev = Eval {
            tol,
            forced: &forced,
            borderlines: 0,
            fork: false,
            conds: Vec::new(),
        };
        let leaf = run(&mut ev)?;
        let (fork, conds) = (ev.fork, ev.conds);
        if fork {
            let mut zero = forced.clone();
            zero.push(true);
            let mut nonzero = forced;
            nonzero.push(false);
            pending.push(zero);
            pending.push(nonzero);
        } else {
            leaves.push((forced, leaf, conds));
        }
    }
    leaves.sort_by(|x, y| x.0.cmp(&y.0));
    let (_, first, conds) = leaves.remove(0);
    let src = LocalShape::from_pq(sig.p, sig.q);
    let shape = |leaf: &Leaf| match leaf.preserved {
        Preserved::Yes => Some(src),
        _ => leaf.sig.map(|(p0, q0)| LocalShape::from_pq(p0, q0)),
    };
    let mut pred = Prediction {
        case: first.case,
        branch,
        preserved: first.preserved,
        predicted_signature: first.sig,
        predicted_p0: first.p0,
        predicted_shape: shape(&first),
        conditions: conds,
        alternatives: Vec::new(),
        flagged: first.flagged,
        notes: first.notes.clone(),
    };
    if !leaves.is_empty() {
        let mut alts = vec![Outcome {
            assumed_zero: vec![false; pred.conditions.iter().filter(|c| c.borderline).count()],
            case: first.case,
            preserved: first.preserved,
            predicted_signature: first.sig,
        }];
        for (forced, leaf, _) in &leaves {
            alts.push(Outcome {
                assumed_zero: forced.clone(),
                case: leaf.case,
                preserved: leaf.preserved,
                predicted_signature: leaf.sig,
            });
        }
        pred.preserved = Preserved::Borderline;
        pred.predicted_shape = None;
        pred.alternatives = alts;
    }
    Ok(pred)
}

/// `r` and `w = r xi_r / p`, or `None` when `xi_r = 0` is certified.
fn second_term<S: Scalar>(
    sig: &Signature<S>,
    coeffs: &CurvatureData<S>,
) -> Result<Option<(u32, S)>, PredictError> {
    match (&sig.r, &coeffs.w) {
        (Some((r, xi)), w) => Ok(Some((
            *r,
            w.clone()
                .unwrap_or_else(|| xi.clone() * S::from_ratio(*r as i64, sig.p as i64)),
        ))),
        (None, _) if sig.tail_certified => Ok(None),
        (None, _) => Err(PredictError::NeedDeeperTrunc),
    }
}

fn dispatch<S: Scalar>(
    sig: &Signature<S>,
    coeffs: &CurvatureData<S>,
    op: &OffsetParams<S>,
    ev: &mut Eval,
) -> Result<Leaf, PredictError> {
    let (p, q) = (sig.p, sig.q);
    if p == 0 || q <= p {
        return Err(PredictError::InvalidSignature { p, q });
    }
    let two = || S::from_int(2);
    let half = || S::from_ratio(1, 2);
    let s = S::from_int(op.branch.sign());
    let (d, a, b) = (op.d.clone(), op.a.clone(), op.b.clone());
    let sd = s.clone() * d.clone();

    if q - p == 1 && p % 2 == 0 {
        return Ok(Leaf::new(CaseId::SmoothedQp1, Preserved::No).p0(1));
    }
    if q > 2 * p {
        return Ok(Leaf::new(CaseId::Q2pPosTable, Preserved::from_bool(p % 2 == 0)).sig(p, q - p));
    }
    if q < 2 * p && q % 2 == 1 {
        return Ok(Leaf::new(CaseId::Q2pNegP8, Preserved::No).p0(q - p));
    }
    let second = second_term(sig, coeffs)?;

    if q == 2 * p {
        let kt = coeffs.ktilde.clone();
        let Some((r, w)) = second else {
            let beta = sig.beta.clone();
            let zero = ev.zero(
                "1 - 4*s*d*a*beta + 4*d^2*beta^2",
                &[
                    S::one(),
                    -S::from_int(4) * sd.clone() * a.clone() * beta.clone(),
                    S::from_int(4) * d.clone() * d.clone() * beta.clone() * beta,
                ],
            );
            let mut leaf = if zero {
                Leaf::new(CaseId::Q2pZeroParabola, Preserved::Undetermined)
                    .p0(1)
                    .note("flex possible")
            } else {
                Leaf::new(CaseId::Q2pZeroParabola, Preserved::Yes).sig(1, 2)
            };
            if p > 1 {
                leaf = leaf.note("place is not primitive: it covers (t, beta t^2) with t = h^p");
            }
            return Ok(leaf);
        };
        let c1 = ev.zero(
            "1 - s*d*a*ktilde",
            &[S::one(), -sd.clone() * a.clone() * kt.clone()],
        );
        let lean = a.clone() * a.clone() - b.clone() * b.clone();
        if c1 {
            return Ok(match r.cmp(&(3 * p)) {
                std::cmp::Ordering::Greater => {
                    Leaf::new(CaseId::Q2pZeroT11_1, Preserved::Yes).sig(p, q)
                }
                std::cmp::Ordering::Less => {
                    Leaf::new(CaseId::Q2pZeroT11_2, Preserved::from_bool(parity_eq(r, p)))
                        .sig(p, r - p)
                }
                std::cmp::Ordering::Equal => {
                    let zero = ev.zero(
                        "(b/2)*ktilde^2 - a*w",
                        &[
                            b.clone() * half() * kt.clone() * kt.clone(),
                            -a.clone() * w.clone(),
                        ],
                    );
                    if zero {
                        Leaf::new(CaseId::Q2pZeroT11_3, Preserved::Undetermined)
                            .p0(p)
                            .note("paper silent when the condition vanishes")
                    } else {
                        Leaf::new(CaseId::Q2pZeroT11_3, Preserved::Yes).sig(p, q)
                    }
                }
            });
        }
        let tilt = [a.clone(), -sd.clone() * kt.clone() * lean.clone()];
        return Ok(match r.cmp(&(3 * p)) {
            std::cmp::Ordering::Greater => {
                if ev.zero("a - s*d*ktilde*(a^2-b^2)", &tilt) {
                    Leaf::new(CaseId::Q2pZeroT12_1, Preserved::Undetermined)
                        .p0(p)
                        .note("paper silent when the condition vanishes")
                } else {
                    Leaf::new(CaseId::Q2pZeroT12_1, Preserved::Yes).sig(p, q)
                }
            }
            std::cmp::Ordering::Equal => {
                let k2 = kt.clone() * kt.clone() * half();
                let zero = ev.zero(
                    "(ktilde^2/2)*(a - s*d*ktilde*(a^2-b^2)) - b*w",
                    &[
                        k2.clone() * tilt[0].clone(),
                        k2 * tilt[1].clone(),
                        -b.clone() * w.clone(),
                    ],
                );
                if zero {
                    return Ok(Leaf::new(CaseId::Q2pZeroT12_2, Preserved::Undetermined)
                        .p0(p)
                        .note("paper silent when the condition vanishes"));
                }
                // The displayed condition leaves out the beta_q h^q term of Y.
                // With it, the h^(2p) coefficient is independent of the h^p one
                // iff this determinant is nonzero.
                let c1v = S::one() - sd.clone() * a.clone() * kt.clone();
                let dbk = d.clone() * b.clone() * kt.clone();
                let det_zero = ev.zero(
                    "(ktilde/2)*((1 - s*d*a*ktilde)^2 + (d*b*ktilde)^2) - s*d*b*w",
                    &[
                        kt.clone() * half() * (c1v.clone() * c1v + dbk.clone() * dbk),
                        -sd.clone() * b.clone() * w.clone(),
                    ],
                );
                if det_zero {
                    Leaf::new(CaseId::Q2pZeroT12_2, Preserved::Undetermined)
                        .p0(p)
                        .flagged()
                        .note("h^(2p) coefficient of the offset is parallel to the h^p one; the displayed condition does not see this")
                } else {
                    Leaf::new(CaseId::Q2pZeroT12_2, Preserved::Yes).sig(p, q)
                }
            }
            std::cmp::Ordering::Less => {
                Leaf::new(CaseId::Q2pZeroT12_3, Preserved::from_bool(parity_eq(r, p))).sig(p, r - p)
            }
        });
    }

    // q < 2p, q even
    let u = coeffs.utilde.clone();
    let u2 = u.clone() * u.clone();
    let m = q - p;
    let p0 = m;
    let q_even = q % 2 == 0;
    let pq_even = q_even && p % 2 == 0;
    let Some((r, w)) = second else {
        if p != 2 * m {
            return Ok(Leaf::new(CaseId::Q2pNegT13_1, Preserved::Yes)
                .p0(p0)
                .flagged());
        }
        let c1 = ev.zero(
            "1 + s*d*b*utilde^2/2",
            &[S::one(), sd.clone() * b.clone() * u2.clone() * half()],
        );
        let c2 = ev.zero(
            "s*b + utilde^2*d/2",
            &[s.clone() * b.clone(), u2.clone() * d.clone() * half()],
        );
        return Ok(if !c1 && c2 {
            Leaf::new(CaseId::Q2pNegT13_2, Preserved::Yes)
                .p0(p0)
                .flagged()
        } else {
            Leaf::new(CaseId::Q2pNegT13Open, Preserved::Undetermined)
                .p0(p0)
                .flagged()
                .note("paper silent outside the stated condition")
        });
    };
    let n = r - p;
    let rp = parity_eq(r, p);
    let leaf = |case, v: bool| Leaf::new(case, Preserved::from_bool(v)).p0(p0);
    let open = |case| {
        Leaf::new(case, Preserved::Undetermined)
            .p0(p0)
            .note("paper silent for this combination of conditions")
    };
    Ok(match (2 * m).cmp(&n) {
        std::cmp::Ordering::Less => {
            if p < 2 * m {
                leaf(CaseId::Q2pNegT14_1a, pq_even)
            } else {
                leaf(CaseId::Q2pNegT14_1b, q_even)
            }
        }
        std::cmp::Ordering::Equal => match p.cmp(&(2 * m)) {
            std::cmp::Ordering::Less => leaf(CaseId::Q2pNegT14_2a, pq_even),
            std::cmp::Ordering::Greater => {
                let c1 = ev.zero(
                    "b*w - (a/2)*utilde^2",
                    &[b.clone() * w.clone(), -a.clone() * half() * u2.clone()],
                );
                if c1 {
                    leaf(CaseId::Q2pNegT14_2b2, q_even)
                } else if !ev.zero(
                    "((b^2-a^2)/2)*utilde^2 - a*b*w",
                    &[
                        -lean_of(&a, &b) * half() * u2.clone(),
                        -a.clone() * b.clone() * w.clone(),
                    ],
                ) {
                    leaf(CaseId::Q2pNegT14_2b1, q_even)
                } else {
                    open(CaseId::Q2pNegT14_2bOpen)
                }
            }
            std::cmp::Ordering::Equal => {
                let c1 = ev.zero(
                    "1 + s*d*b*utilde^2/2 - s*d*a*w",
                    &[
                        S::one(),
                        sd.clone() * b.clone() * u2.clone() * half(),
                        -sd.clone() * a.clone() * w.clone(),
                    ],
                );
                if c1 {
                    leaf(CaseId::Q2pNegT14_2c2, q_even)
                } else if !ev.zero(
                    "s*b*utilde + d*(a^2-b^2)*utilde^2/2 - 2*d*a*b*w",
                    &[
                        s.clone() * b.clone() * u.clone(),
                        d.clone() * lean_of(&a, &b) * u2.clone() * half(),
                        -two() * d.clone() * a.clone() * b.clone() * w.clone(),
                    ],
                ) {
                    leaf(CaseId::Q2pNegT14_2c1, q_even)
                } else {
                    open(CaseId::Q2pNegT14_2cOpen)
                }
            }
        },
        std::cmp::Ordering::Greater => match p.cmp(&n) {
            std::cmp::Ordering::Less => leaf(CaseId::Q2pNegT14_3a, pq_even),
            std::cmp::Ordering::Equal => {
                if ev.zero(
                    "1 - s*d*a*w",
                    &[S::one(), -sd.clone() * a.clone() * w.clone()],
                ) || !ev.zero(
                    "(d*a*utilde + s)*w",
                    &[
                        d.clone() * a.clone() * u.clone() * w.clone(),
                        s.clone() * w.clone(),
                    ],
                ) {
                    leaf(CaseId::Q2pNegT14_3c, q_even && rp)
                } else {
                    open(CaseId::Q2pNegT14_3cOpen)
                }
            }
            std::cmp::Ordering::Greater => {
                if ev.zero("a", std::slice::from_ref(&a)) {
                    open(CaseId::Q2pNegT14_3bOpen)
                } else {
                    leaf(CaseId::Q2pNegT14_3b, q_even && rp).flagged()
                }
            }
        },
    })
}

fn lean_of<S: Scalar>(a: &S, b: &S) -> S {
    a.clone() * a.clone() - b.clone() * b.clone()
}

/// The classical-offset verdicts, for side-by-side comparison.
pub fn classical_reference<S: Scalar>(
    sig: &Signature<S>,
    coeffs: &CurvatureData<S>,
    d: &S,
    branch: Branch,
    tol: Tolerance,
) -> Result<Prediction, PredictError> {
    let (p, q) = (sig.p, sig.q);
    if p == 0 || q <= p {
        return Err(PredictError::InvalidSignature { p, q });
    }
    explore(sig, branch, tol, |ev| {
        Ok(if q - p == 1 && p % 2 == 0 {
            Leaf::new(CaseId::ClassicalSmoothed, Preserved::No).p0(1)
        } else if q > 2 * p {
            Leaf::new(CaseId::ClassicalQ2pPos, Preserved::Yes).sig(p, q)
        } else if q == 2 * p {
            let kd = coeffs.ktilde.clone() * d.clone();
            if ev.zero("ktilde^2*d^2 - 1", &[kd.clone() * kd, -S::one()]) {
                Leaf::new(CaseId::ClassicalQ2pZero, Preserved::Undetermined).note("|k| = 1/d")
            } else {
                Leaf::new(CaseId::ClassicalQ2pZero, Preserved::Yes).sig(p, q)
            }
        } else {
            Leaf::new(CaseId::ClassicalQ2pNeg, Preserved::from_bool(q % 2 == 0))
        })
    })
}

/// A qualitative property compared across the two kinds of offset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyRow {
    pub property: &'static str,
    pub classical: &'static str,
    pub non_classical: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub a: String,
    pub b: String,
    pub classical: bool,
    pub predictions: Vec<Prediction>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub p: u32,
    pub q: u32,
    pub shape: LocalShape,
    pub rows: Vec<ComparisonRow>,
    pub properties: Vec<PropertyRow>,
}

const REGULAR_ROWS: [PropertyRow; 4] = [
    PropertyRow {
        property: "singular offset places",
        classical: "generated where k = -1/d; cusps may arise",
        non_classical: "never generated; cusps do not arise",
    },
    PropertyRow {
        property: "flex points",
        classical: "preserved",
        non_classical: "never preserved",
    },
    PropertyRow {
        property: "turning points",
        classical: "preserved",
        non_classical: "not preserved in general",
    },
    PropertyRow {
        property: "tangents",
        classical: "preserved",
        non_classical: "not preserved",
    },
];

const SINGULAR_ROWS: [PropertyRow; 5] = [
    PropertyRow {
        property: "smoothing",
        classical: "iff q-p=1",
        non_classical: "iff q-p=1",
    },
    PropertyRow {
        property: "singular flex points",
        classical: "preserved when q-2p>0",
        non_classical: "never preserved",
    },
    PropertyRow {
        property: "q-2p>0",
        classical: "preserved",
        non_classical: "preserved iff p even",
    },
    PropertyRow {
        property: "q-2p=0",
        classical: "preserved if |k| != 1/d",
        non_classical: "depends on |k| vs 1/(d cos theta); many subcases",
    },
    PropertyRow {
        property: "q-2p<0",
        classical: "preserved iff q even",
        non_classical: "many subcases",
    },
];

/// Predictions across rotations `(a, b)`, both sheets each, plus the
/// classical reference row and the qualitative property rows.
pub fn comparison_table<S: Scalar>(
    sig: &Signature<S>,
    coeffs: &CurvatureData<S>,
    d: &S,
    angles: &[(S, S)],
    tol: Tolerance,
) -> Result<ComparisonTable, PredictError> {
    let mut rows = Vec::new();
    let classical = Branch::BOTH
        .iter()
        .map(|&br| classical_reference(sig, coeffs, d, br, tol))
        .collect::<Result<Vec<_>, _>>()?;
    rows.push(ComparisonRow {
        a: S::one().to_text(),
        b: S::zero().to_text(),
        classical: true,
        predictions: classical,
    });
    for (a, b) in angles {
        let op = OffsetParams {
            d: d.clone(),
            a: a.clone(),
            b: b.clone(),
            branch: Branch::Plus,
        };
        let predictions = Branch::BOTH
            .iter()
            .map(|&br| predict(sig, coeffs, &op.with_branch(br), tol))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(ComparisonRow {
            a: a.to_text(),
            b: b.to_text(),
            classical: op.classical(tol),
            predictions,
        });
    }
    let properties = if sig.p == 1 {
        REGULAR_ROWS.to_vec()
    } else {
        SINGULAR_ROWS.to_vec()
    };
    Ok(ComparisonTable {
        p: sig.p,
        q: sig.q,
        shape: LocalShape::from_pq(sig.p, sig.q),
        rows,
        properties,
    })
}
