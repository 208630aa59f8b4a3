//! Dense univariate polynomials over a field, coefficient `i` for `z^i`.

use crate::scalar::Scalar;

pub fn trim<S: Scalar>(mut p: Vec<S>) -> Vec<S> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Degree, `None` for the zero polynomial.
pub fn degree<S: Scalar>(p: &[S]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval<S: Scalar>(p: &[S], z: &S) -> S {
    p.iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * z.clone() + c.clone())
}

pub fn derivative<S: Scalar>(p: &[S]) -> Vec<S> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.clone() * S::from_int(i as i64))
        .collect()
}

pub fn mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(S::zero);
        let y = b.get(i).cloned().unwrap_or_else(S::zero);
        out.push(x - y);
    }
    trim(out)
}

/// Euclidean division `a = q*b + r`. Panics on a zero divisor.
pub fn divrem<S: Scalar>(a: &[S], b: &[S]) -> (Vec<S>, Vec<S>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut r = trim(a.to_vec());
    let mut q = vec![S::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].clone() / lead.clone();
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[i + shift] = r[i + shift].clone() - c.clone() * bc.clone();
        }
        // the leading term cancels exactly in exact mode; force it in float mode
        r[dr] = S::zero();
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn monic<S: Scalar>(p: Vec<S>) -> Vec<S> {
    match degree(&p) {
        None => p,
        Some(d) => {
            let lead = p[d].clone();
            trim(p.into_iter().map(|c| c / lead.clone()).collect())
        }
    }
}

/// Monic gcd. Intended for exact coefficients.
pub fn gcd<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// Square-free part `p / gcd(p, p')`, monic.
pub fn squarefree<S: Scalar>(p: &[S]) -> Vec<S> {
    let p = trim(p.to_vec());
    if degree(&p).unwrap_or(0) == 0 {
        return monic(p);
    }
    let g = gcd(&p, &derivative(&p));
    monic(divrem(&p, &g).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn poly(c: &[i64]) -> Vec<BigRational> {
        c.iter().map(|&v| BigRational::from_int(v)).collect()
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (z-1)(z+2) and (z-1)(z-3)
        let a = poly(&[-2, 1, 1]);
        let b = poly(&[3, -4, 1]);
        assert_eq!(gcd(&a, &b), poly(&[-1, 1]));
    }

    #[test]
    fn squarefree_strips_repeated_roots() {
        // (z-1)^3 (z+1)
        let p = mul(
            &mul(&poly(&[-1, 1]), &poly(&[-1, 1])),
            &mul(&poly(&[-1, 1]), &poly(&[1, 1])),
        );
        assert_eq!(squarefree(&p), poly(&[-1, 0, 1]));
    }

    #[test]
    fn division_round_trips() {
        let a = poly(&[5, 0, -3, 2, 1]);
        let b = poly(&[1, 1]);
        let (q, r) = divrem(&a, &b);
        let back = trim(
            mul(&q, &b)
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() + r.get(i).cloned().unwrap_or_else(BigRational::zero))
                .collect(),
        );
        assert_eq!(back, a);
    }

    use num_traits::Zero;
}
