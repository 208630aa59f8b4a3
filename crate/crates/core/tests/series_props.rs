use offsetshape::{ExactSeries, FloatSeries, Rational, Scalar, Tolerance};
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;
const T: usize = 8;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn series() -> impl Strategy<Value = ExactSeries> {
    prop::collection::vec(rational(), T).prop_map(|c| ExactSeries::with_trunc(c, T))
}

fn unit() -> impl Strategy<Value = ExactSeries> {
    (series(), 1i64..=4).prop_map(|(s, c)| {
        let mut v = s.coeffs().to_vec();
        v[0] = Rational::from_int(c);
        ExactSeries::with_trunc(v, T)
    })
}

/// `s(0) = 0`, `s'(0) != 0`.
fn local_coordinate() -> impl Strategy<Value = ExactSeries> {
    (series(), 1i64..=3).prop_map(|(s, c)| {
        let mut v = s.coeffs().to_vec();
        v[0] = Rational::from_int(0);
        v[1] = Rational::from_int(c);
        ExactSeries::with_trunc(v, T)
    })
}

fn h() -> ExactSeries {
    ExactSeries::monomial(Rational::from_int(1), 1, T)
}

proptest! {
    #[test]
    fn ring_laws(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), ExactSeries::zero(T));
    }

    #[test]
    fn inverse_of_unit(u in unit()) {
        prop_assert_eq!(u.mul(&u.inv(TOL).unwrap()), ExactSeries::one(T));
    }

    #[test]
    fn product_rule(a in series(), b in series()) {
        let lhs = a.mul(&b).differentiate().unwrap();
        let rhs = a.differentiate().unwrap().mul(&b.truncate(T - 1))
            .add(&a.truncate(T - 1).mul(&b.differentiate().unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reversion_inverts_composition(s in local_coordinate()) {
        let r = s.revert(TOL).unwrap();
        prop_assert_eq!(s.compose(&r, TOL).unwrap(), h());
        prop_assert_eq!(r.compose(&s, TOL).unwrap(), h());
    }

    #[test]
    fn composition_is_a_sum_of_powers(a in series(), s in local_coordinate()) {
        let mut sum = ExactSeries::zero(T);
        for (i, c) in a.coeffs().iter().enumerate() {
            sum = sum.add(&s.pow(i as u32).scale_by(c));
        }
        prop_assert_eq!(a.compose(&s, TOL).unwrap(), sum);
    }

    #[test]
    fn fractional_powers(c in 1i64..=3, s in series()) {
        let mut v = s.coeffs().to_vec();
        v[0] = Rational::from_int(c * c);
        let u = ExactSeries::with_trunc(v, T);
        let root = u.pow_frac(1, 2, TOL).unwrap();
        prop_assert_eq!(root.square(), u.clone());
        let cube = u.pow_frac(3, 2, TOL).unwrap();
        prop_assert_eq!(cube, root.pow(3));
        let isq = u.inv_sqrt(TOL).unwrap();
        prop_assert_eq!(isq.mul(&root), ExactSeries::one(T));
    }

    #[test]
    fn float_series_track_exact(a in series(), b in unit()) {
        let exact = a.mul(&b.inv(TOL).unwrap()).to_f64();
        let float = a.to_f64().mul(&b.to_f64().inv(TOL).unwrap());
        for (x, y) in exact.coeffs().iter().zip(float.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }
}

#[test]
fn float_series_alias_is_usable() {
    let s = FloatSeries::from_terms(&[(0, 1.0), (1, 1.0)], 6);
    let e = s.inv(TOL).unwrap();
    assert_eq!(e.coeffs(), &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
}
