//! Real roots of univariate polynomials (Newton polygon edge equations).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{Scalar, Tolerance};
use crate::upoly;

/// Distinct real roots with multiplicities, plus the number of distinct real
/// roots the field cannot represent (irrational roots in exact mode).
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoots<S> {
    pub roots: Vec<(S, usize)>,
    pub unrepresented: usize,
}

/// Number of distinct real roots, by a Sturm sequence on the square-free part.
pub fn sturm_count(p: &[BigRational]) -> usize {
    let sf = upoly::squarefree(p);
    let Some(deg) = upoly::degree(&sf) else {
        return 0;
    };
    if deg == 0 {
        return 0;
    }
    let mut seq = vec![sf.clone(), upoly::derivative(&sf)];
    loop {
        let n = seq.len();
        let (_, r) = upoly::divrem(&seq[n - 2], &seq[n - 1]);
        if upoly::degree(&r).is_none() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |signs: Vec<i8>| -> usize {
        let nz: Vec<i8> = signs.into_iter().filter(|s| *s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sign_of = |c: &BigRational| -> i8 {
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    };
    let at_pos: Vec<i8> = seq
        .iter()
        .map(|q| sign_of(&q[upoly::degree(q).unwrap()]))
        .collect();
    let at_neg: Vec<i8> = seq
        .iter()
        .map(|q| {
            let d = upoly::degree(q).unwrap();
            let s = sign_of(&q[d]);
            if d % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    changes(at_neg) - changes(at_pos)
}

fn multiplicity(p: &[BigRational], root: &BigRational) -> usize {
    let factor = vec![-root.clone(), BigRational::one()];
    let mut cur = upoly::trim(p.to_vec());
    let mut m = 0;
    loop {
        let (q, r) = upoly::divrem(&cur, &factor);
        if upoly::degree(&r).is_some() {
            return m;
        }
        m += 1;
        cur = q;
        if upoly::degree(&cur).unwrap_or(0) == 0 {
            return m;
        }
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
    }
    Some(out)
}

/// Rational real roots with multiplicity. Candidates come from float
/// approximations of the square-free part, snapped to denominators that
/// divide the leading coefficient, and are confirmed exactly.
pub fn rational_real_roots(coeffs: &[BigRational]) -> RealRoots<BigRational> {
    let p = upoly::trim(coeffs.to_vec());
    if upoly::degree(&p).unwrap_or(0) == 0 {
        return RealRoots {
            roots: Vec::new(),
            unrepresented: 0,
        };
    }
    let mut roots = Vec::new();
    let zero_mult = p.iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        roots.push((BigRational::zero(), zero_mult));
    }
    let rest: Vec<BigRational> = p[zero_mult..].to_vec();
    let sf = upoly::squarefree(&rest);
    let distinct = sturm_count(&sf);
    if distinct == 0 {
        return RealRoots {
            roots,
            unrepresented: 0,
        };
    }
    // integer form of the square-free part
    let lcm = sf.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = sf
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let lead = ints.last().unwrap().clone();
    let approx: Vec<f64> = sf.iter().map(Scalar::to_f64).collect();
    let floats = float_real_roots(&approx, Tolerance(1e-12));
    let denominators = small_divisors(&lead);
    let mut found: Vec<BigRational> = Vec::new();
    let try_candidate = |cand: BigRational, found: &mut Vec<BigRational>| {
        if !found.contains(&cand) && upoly::eval(&sf, &cand).is_zero() {
            found.push(cand);
        }
    };
    for (x, _) in &floats.roots {
        match &denominators {
            Some(dens) => {
                for q in dens {
                    let qf = q.to_f64().unwrap_or(1.0);
                    let num = (x * qf).round();
                    if let Some(n) = BigInt::from_f64_checked(num) {
                        try_candidate(BigRational::new(n, q.clone()), &mut found);
                    }
                }
            }
            None => {
                if let Some(c) = BigRational::from_float(*x) {
                    // continued-fraction convergents of the approximation
                    for cand in convergents(&c, 40) {
                        try_candidate(cand, &mut found);
                    }
                }
            }
        }
    }
    found.sort();
    let unrepresented = distinct.saturating_sub(found.len());
    for r in found {
        let m = multiplicity(&rest, &r);
        roots.push((r, m));
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    RealRoots {
        roots,
        unrepresented,
    }
}

trait FromF64Checked: Sized {
    fn from_f64_checked(v: f64) -> Option<Self>;
}

impl FromF64Checked for BigInt {
    fn from_f64_checked(v: f64) -> Option<Self> {
        num_traits::FromPrimitive::from_f64(v)
    }
}

fn convergents(x: &BigRational, max: usize) -> Vec<BigRational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = x.clone();
    for _ in 0..max {
        let a = rem.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = &rem - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rem = frac.recip();
    }
    out
}

/// Real roots of a float polynomial from companion-matrix eigenvalues,
/// polished by Newton steps. Roots closer than a relative `1e-4` are merged
/// and reported with the cluster size as multiplicity.
pub fn float_real_roots(coeffs: &[f64], tol: Tolerance) -> RealRoots<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut p: Vec<f64> = coeffs.to_vec();
    while p
        .last()
        .is_some_and(|c| c.abs() <= tol.0 * scale.max(1e-300))
    {
        p.pop();
    }
    let mut roots: Vec<(f64, usize)> = Vec::new();
    let zero_mult = p.iter().take_while(|c| c.abs() <= tol.0 * scale).count();
    if zero_mult > 0 && zero_mult < p.len() {
        roots.push((0.0, zero_mult));
    }
    let p: Vec<f64> = p[zero_mult.min(p.len())..].to_vec();
    if p.len() <= 1 {
        return RealRoots {
            roots,
            unrepresented: 0,
        };
    }
    let n = p.len() - 1;
    let lead = p[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let mut reals: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
        .map(|z| polish(&p, z.re))
        .collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for r in reals {
        match clusters.last_mut() {
            Some((c, m)) if (r - *c / *m as f64).abs() <= 1e-4 * (1.0 + r.abs()) => {
                *c += r;
                *m += 1;
            }
            _ => clusters.push((r, 1)),
        }
    }
    roots.extend(clusters.into_iter().map(|(sum, m)| (sum / m as f64, m)));
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    RealRoots {
        roots,
        unrepresented: 0,
    }
}

fn polish(p: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (mut v, mut dv) = (0.0, 0.0);
        for c in p.iter().rev() {
            dv = dv * x + v;
            v = v * x + c;
        }
        if dv == 0.0 || !dv.is_finite() {
            break;
        }
        let step = v / dv;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}
