//! Bivariate polynomials: the implicit equation of the curve.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::{Scalar, Tolerance};
use crate::series::TruncSeries;
use crate::upoly;

/// Exponent pair `(deg_x, deg_y)`.
pub type Monomial = (u32, u32);

/// Sparse bivariate polynomial without stored zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly2<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Poly2<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn x() -> Self {
        Self::from_terms([((1, 0), S::one())])
    }

    pub fn y() -> Self {
        Self::from_terms([((0, 1), S::one())])
    }

    fn add_term(&mut self, m: Monomial, c: S) {
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, S> {
        &self.terms
    }

    pub fn coeff(&self, m: Monomial) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|(_, j)| *j).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (*m, v.clone() * c.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((i1, j1), a) in &self.terms {
            for ((i2, j2), b) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), a.clone() * b.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(S::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        let mut acc = S::zero();
        for ((i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..*i {
                t = t * x.clone();
            }
            for _ in 0..*j {
                t = t * y.clone();
            }
            acc = acc + t;
        }
        acc
    }

    pub fn partial_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|((i, j), c)| ((i - 1, *j), c.clone() * S::from_int(*i as i64))),
        )
    }

    pub fn partial_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|((i, j), c)| ((*i, j - 1), c.clone() * S::from_int(*j as i64))),
        )
    }

    /// Substitutes polynomials for both variables.
    pub fn substitute(&self, x: &Self, y: &Self) -> Self {
        let max_i = self.terms.keys().map(|m| m.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|m| m.1).max().unwrap_or(0);
        let mut xp = vec![Self::constant(S::one())];
        for k in 1..=max_i as usize {
            xp.push(xp[k - 1].mul(x));
        }
        let mut yp = vec![Self::constant(S::one())];
        for k in 1..=max_j as usize {
            yp.push(yp[k - 1].mul(y));
        }
        let mut out = Self::zero();
        for ((i, j), c) in &self.terms {
            out = out.add(&xp[*i as usize].mul(&yp[*j as usize]).scale(c));
        }
        out
    }

    /// `f(x + cx, y + cy)`: moves `(cx, cy)` to the origin.
    pub fn translate(&self, cx: &S, cy: &S) -> Self {
        let x = Self::x().add(&Self::constant(cx.clone()));
        let y = Self::y().add(&Self::constant(cy.clone()));
        self.substitute(&x, &y)
    }

    /// Rewrites the polynomial in coordinates `(X, Y)` with
    /// `x = c X - s Y`, `y = s X + c Y`.
    pub fn rotate(&self, c: &S, s: &S) -> Self {
        let x = Self::from_terms([((1, 0), c.clone()), ((0, 1), -s.clone())]);
        let y = Self::from_terms([((1, 0), s.clone()), ((0, 1), c.clone())]);
        self.substitute(&x, &y)
    }

    /// Lowest-degree homogeneous part as `(m, coeffs)` where `coeffs[j]`
    /// multiplies `x^(m-j) y^j`.
    pub fn tangent_cone(&self) -> Option<(u32, Vec<S>)> {
        let m = self.terms.keys().map(|(i, j)| i + j).min()?;
        let mut coeffs = vec![S::zero(); m as usize + 1];
        for ((i, j), c) in &self.terms {
            if i + j == m {
                coeffs[*j as usize] = c.clone();
            }
        }
        Some((m, coeffs))
    }

    /// Evaluates at a pair of series.
    pub fn eval_series(&self, x: &TruncSeries<S>, y: &TruncSeries<S>) -> TruncSeries<S> {
        let t = x.trunc().min(y.trunc());
        let max_i = self.terms.keys().map(|m| m.0).max().unwrap_or(0) as usize;
        let max_j = self.terms.keys().map(|m| m.1).max().unwrap_or(0) as usize;
        let mut xp = vec![TruncSeries::one(t)];
        for k in 1..=max_i {
            xp.push(xp[k - 1].mul(x));
        }
        let mut yp = vec![TruncSeries::one(t)];
        for k in 1..=max_j {
            yp.push(yp[k - 1].mul(y));
        }
        let mut acc = TruncSeries::zero(t);
        for ((i, j), c) in &self.terms {
            acc = acc.add(&xp[*i as usize].mul(&yp[*j as usize]).scale_by(c));
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly2<T> {
        Poly2::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Largest coefficient magnitude, used to scale float zero tests.
    pub fn scale_hint(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.magnitude()))
    }

    pub fn vanishes_at(&self, x: &S, y: &S, tol: Tolerance) -> bool {
        self.eval(x, y).is_negligible(self.scale_hint(), tol)
    }
}

impl<S: Scalar> fmt::Debug for Poly2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<S: Scalar> fmt::Display for Poly2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // graded order, highest degree first
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.0 + k.1, k.0)));
        for (n, m) in keys.into_iter().enumerate() {
            let text = self.terms[m].to_text();
            let (neg, body) = match text.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, text),
            };
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if body != "1" || *m == (0, 0) {
                factors.push(body);
            }
            for (v, e) in [("x", m.0), ("y", m.1)] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Exact-coefficient curve equation.
pub type RationalPoly = Poly2<BigRational>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("the polynomial is identically zero")]
    Zero,
    #[error("the polynomial is constant")]
    Constant,
    #[error("degree-1 input describes a line; offsets of lines are lines")]
    Line,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    Op(char),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [&'a str],
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(text: &str, vars: &[&str]) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let lit = &text[start..i];
            let v = crate::scalar::parse_rational(lit)
                .ok_or_else(|| syntax(start, format!("bad number `{lit}`")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            let name = &text[start..i];
            let idx = vars
                .iter()
                .position(|v| *v == name)
                .ok_or_else(|| syntax(start, format!("unknown variable `{name}`")))?;
            out.push((start, Tok::Var(idx)));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(syntax(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn var(&self, idx: usize) -> RationalPoly {
        let _ = self.vars;
        if idx == 0 {
            Poly2::x()
        } else {
            Poly2::y()
        }
    }

    fn expr(&mut self) -> Result<RationalPoly, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' {
                acc.add(&rhs)
            } else {
                acc.sub(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Op('/')) => {
                    let at = self.here();
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let c = match rhs.total_degree() {
                        Some(0) => rhs.coeff((0, 0)),
                        None => return Err(syntax(at, "division by zero")),
                        _ => return Err(syntax(at, "division by a non-constant polynomial")),
                    };
                    acc = acc.scale(&(BigRational::from_int(1) / c));
                }
                // implicit multiplication: `2x`, `x(y+1)`
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::Op('(')) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalPoly, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalPoly, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let at = self.here();
            match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
                Some(Tok::Num(n)) if n.is_integer() && !n.is_negative() => {
                    self.pos += 1;
                    let e = u32::try_from(n.to_integer())
                        .map_err(|_| syntax(at, "exponent too large"))?;
                    if e > 512 {
                        return Err(syntax(at, "exponent too large"));
                    }
                    return Ok(base.pow(e));
                }
                _ => return Err(syntax(at, "expected a non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RationalPoly, ParseError> {
        let at = self.here();
        match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Poly2::constant(v))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(self.var(i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(syntax(self.here(), "expected `)`")),
                }
            }
            Some(_) => Err(syntax(at, "expected a number, variable or `(`")),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

use num_traits::Signed;

/// Parses an arithmetic expression over up to two variables; the first
/// name maps to `x`, the second to `y`.
pub fn parse_in_vars(text: &str, vars: &[&str]) -> Result<RationalPoly, ParseError> {
    assert!(vars.len() <= 2);
    let toks = tokenize(text, vars)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vars,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Parses a curve equation in `x`, `y`, rejecting zero, constant and
/// degree-1 (line) inputs.
pub fn parse_poly(text: &str) -> Result<RationalPoly, ParseError> {
    let p = parse_in_vars(text, &["x", "y"])?;
    match p.total_degree() {
        None => Err(ParseError::Zero),
        Some(0) => Err(ParseError::Constant),
        Some(1) => Err(ParseError::Line),
        Some(_) => Ok(p),
    }
}

// ---- square-free reduction over Q[x][y] ----

type UPoly = Vec<BigRational>;

fn to_ycoeffs(f: &RationalPoly) -> Vec<UPoly> {
    let dy = f.degree_y().unwrap_or(0) as usize;
    let mut out: Vec<UPoly> = vec![Vec::new(); dy + 1];
    for ((i, j), c) in f.terms() {
        let slot = &mut out[*j as usize];
        if slot.len() <= *i as usize {
            slot.resize(*i as usize + 1, BigRational::from_int(0));
        }
        slot[*i as usize] = c.clone();
    }
    out.into_iter().map(upoly::trim).collect()
}

fn from_ycoeffs(c: &[UPoly]) -> RationalPoly {
    Poly2::from_terms(c.iter().enumerate().flat_map(|(j, p)| {
        p.iter()
            .enumerate()
            .map(move |(i, v)| ((i as u32, j as u32), v.clone()))
    }))
}

fn ydeg(c: &[UPoly]) -> Option<usize> {
    c.iter().rposition(|p| upoly::degree(p).is_some())
}

fn content(c: &[UPoly]) -> UPoly {
    c.iter()
        .filter(|p| upoly::degree(p).is_some())
        .fold(Vec::new(), |g, p| {
            if g.is_empty() {
                upoly::monic(p.clone())
            } else {
                upoly::gcd(&g, p)
            }
        })
}

fn primitive(c: &[UPoly]) -> Vec<UPoly> {
    let g = content(c);
    if g.is_empty() {
        return c.to_vec();
    }
    c.iter().map(|p| upoly::divrem(p, &g).0).collect()
}

fn prem(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let db = ydeg(b).expect("pseudo-division by zero");
    let lb = b[db].clone();
    let mut r: Vec<UPoly> = a.to_vec();
    while let Some(dr) = ydeg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<UPoly> = r.iter().map(|p| upoly::mul(p, &lb)).collect();
        for (k, bk) in b.iter().enumerate().take(db + 1) {
            next[k + shift] = upoly::sub(&next[k + shift], &upoly::mul(&lr, bk));
        }
        next.truncate(dr);
        r = next;
    }
    r
}

fn gcd_primitive(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if ydeg(&a) < ydeg(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        match ydeg(&b) {
            None => return a,
            Some(0) => return vec![vec![BigRational::from_int(1)]],
            Some(_) => {}
        }
        let r = prem(&a, &b);
        a = b;
        b = if ydeg(&r).is_none() { r } else { primitive(&r) };
    }
}

fn exact_div(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let db = ydeg(b).expect("division by zero");
    let mut r = a.to_vec();
    let mut q: Vec<UPoly> = vec![Vec::new(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = ydeg(&r) {
        if dr < db {
            break;
        }
        let (c, rem) = upoly::divrem(&r[dr], &b[db]);
        debug_assert!(upoly::degree(&rem).is_none(), "inexact bivariate division");
        let shift = dr - db;
        for (k, bk) in b.iter().enumerate().take(db + 1) {
            r[k + shift] = upoly::sub(&r[k + shift], &upoly::mul(&c, bk));
        }
        r[dr] = Vec::new();
        q[shift] = c;
    }
    q
}

/// Square-free part of a rational polynomial, and whether anything was
/// removed (a repeated factor).
pub fn squarefree(f: &RationalPoly) -> (RationalPoly, bool) {
    let c = to_ycoeffs(f);
    let cont = content(&c);
    let pp = primitive(&c);
    let cont_sf = upoly::squarefree(&cont);
    let deriv = to_ycoeffs(&from_ycoeffs(&pp).partial_y());
    let pp_sf = if ydeg(&pp).unwrap_or(0) == 0 {
        pp.clone()
    } else {
        let g = gcd_primitive(&pp, &deriv);
        exact_div(&pp, &g)
    };
    let reduced_c: Vec<UPoly> = pp_sf.iter().map(|p| upoly::mul(p, &cont_sf)).collect();
    let reduced = from_ycoeffs(&reduced_c);
    let changed = reduced.total_degree() != f.total_degree();
    (reduced, changed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    #[test]
    fn parses_cusp_curve() {
        let p = parse_poly("x^3 - y^2").unwrap();
        assert_eq!(p, Poly2::from_terms([((3, 0), q(1)), ((0, 2), q(-1))]));
    }

    #[test]
    fn parses_tacnode_like_curve() {
        let p = parse_poly("x^9-y^2+2*y*x^2-x^4").unwrap();
        assert_eq!(p.terms().len(), 4);
        assert_eq!(p.coeff((2, 1)), q(2));
        assert_eq!(p.coeff((4, 0)), q(-1));
    }

    #[test]
    fn parses_parabola() {
        let p = parse_poly("y - x^2").unwrap();
        assert_eq!(p, Poly2::from_terms([((0, 1), q(1)), ((2, 0), q(-1))]));
    }

    #[test]
    fn expands_products_and_rationals() {
        let p = parse_poly("(x + y)^2 - 3/2*x*y + 2x(y - 1/2)").unwrap();
        let expected = Poly2::from_terms([
            ((2, 0), q(1)),
            ((1, 1), BigRational::from_ratio(5, 2)),
            ((0, 2), q(1)),
            ((1, 0), q(-1)),
        ]);
        assert_eq!(p, expected);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(parse_poly("x + 2*y"), Err(ParseError::Line));
        assert_eq!(parse_poly("x^2 - x^2"), Err(ParseError::Zero));
        assert_eq!(parse_poly("7"), Err(ParseError::Constant));
        match parse_poly("x^2 + * y") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_poly("x^2 + z"),
            Err(ParseError::Syntax { pos: 6, .. })
        ));
        assert!(matches!(parse_poly("(x^2"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("x^y"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_poly("x/y + x^2"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let p = parse_poly("x^9-y^2+2*y*x^2-x^4").unwrap();
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn translation_and_rotation() {
        let p = parse_poly("x^2 + y^2 - 1").unwrap();
        let t = p.translate(&q(1), &q(0));
        assert_eq!(t, parse_poly("x^2 + 2*x + y^2").unwrap());
        // rotation by a Pythagorean angle keeps the circle
        let (c, s) = (BigRational::from_ratio(3, 5), BigRational::from_ratio(4, 5));
        assert_eq!(p.rotate(&c, &s), p);
    }

    #[test]
    fn squarefree_drops_repeated_factors() {
        let f = parse_poly("(y - x^2)^2 * (y + x)").unwrap();
        let (g, changed) = squarefree(&f);
        assert!(changed);
        let expected = parse_poly("(y - x^2) * (y + x)").unwrap();
        // equal up to a constant factor
        let ratio = g.coeff((0, 2)) / expected.coeff((0, 2));
        assert_eq!(g, expected.scale(&ratio));

        let f = parse_poly("x^2 * (x^3 - y^2)").unwrap();
        let (g, changed) = squarefree(&f);
        assert!(changed);
        let expected = parse_poly("x * (x^3 - y^2)").unwrap();
        let ratio = g.coeff((1, 2)) / expected.coeff((1, 2));
        assert_eq!(g, expected.scale(&ratio));

        let f = parse_poly("x^3 - y^2").unwrap();
        assert_eq!(squarefree(&f), (f.clone(), false));
    }

    #[test]
    fn series_evaluation_of_a_place() {
        let f = parse_poly("x^3 - y^2").unwrap();
        let x = TruncSeries::monomial(q(1), 2, 12);
        let y = TruncSeries::monomial(q(1), 3, 12);
        assert!(f.eval_series(&x, &y).is_zero(Tolerance::DEFAULT));
    }
}
