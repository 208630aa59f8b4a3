use offsetshape::poly::{parse_poly, Poly2, RationalPoly};
use offsetshape::puiseux::{places_at, places_at_in, IngestError};
use offsetshape::shape::Place;
use offsetshape::{ExactSeries, Rational, Scalar, Tolerance, TruncSeries};
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;
const T: usize = 12;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=5, 1i64..=3, any::<bool>()).prop_map(|(n, d, neg)| q(if neg { -n } else { n }, d))
}

/// `f` along the place, in world coordinates.
fn residual(f: &RationalPoly, pl: &Place<Rational>) -> ExactSeries {
    let (c, s) = &pl.rotation;
    let cx = ExactSeries::constant(pl.center.0.clone(), pl.trunc());
    let cy = ExactSeries::constant(pl.center.1.clone(), pl.trunc());
    let wx = cx.add(&pl.x.scale_by(c)).sub(&pl.y.scale_by(s));
    let wy = cy.add(&pl.x.scale_by(s)).add(&pl.y.scale_by(c));
    f.eval_series(&wx, &wy)
}

/// `y - (c2 x^2 + c3 x^3)` shifted to pass through `(u, v)`.
fn graph(c2: &Rational, c3: &Rational, u: &Rational, v: &Rational) -> RationalPoly {
    let g = Poly2::from_terms([
        ((0, 1), q(1, 1)),
        ((2, 0), -c2.clone()),
        ((3, 0), -c3.clone()),
    ]);
    g.translate(&-u.clone(), &-v.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn places_lie_on_the_curve(m in 2u32..=4, n in 3u32..=7, c in nonzero()) {
        prop_assume!(n > m);
        // y^m = c x^n
        let f = Poly2::from_terms([((0, m), q(1, 1)), ((n, 0), -c.clone())]);
        let set = places_at(&f, &(q(0, 1), q(0, 1)), T).unwrap();
        for pl in &set.places {
            prop_assert!(pl.is_standard(TOL));
            prop_assert!(residual(&f, pl).is_zero(TOL), "{}", pl.describe());
        }
    }

    #[test]
    fn tangent_graphs_separate(c in prop::collection::btree_set(-4i64..=4, 1..=3), e in nonzero()) {
        // distinct parabolas y = c_i x^2 + e x^3 through the origin
        let mut f = Poly2::constant(q(1, 1));
        for ci in &c {
            f = f.mul(&graph(&q(*ci, 1), &e, &q(0, 1), &q(0, 1)));
        }
        let set = places_at(&f, &(q(0, 1), q(0, 1)), T).unwrap();
        prop_assert_eq!(set.places.len(), c.len());
        prop_assert_eq!(set.irrational, 0);
        for pl in &set.places {
            prop_assert!(residual(&f, pl).is_zero(TOL));
        }
    }

    #[test]
    fn translation_moves_only_the_center(c2 in nonzero(), c3 in nonzero(), u in -3i64..=3, v in -3i64..=3) {
        let (u, v) = (q(u, 2), q(v, 1));
        let at_origin = places_at(&graph(&c2, &c3, &q(0, 1), &q(0, 1)), &(q(0, 1), q(0, 1)), T).unwrap();
        let moved = places_at(&graph(&c2, &c3, &u, &v), &(u.clone(), v.clone()), T).unwrap();
        prop_assert_eq!(at_origin.places.len(), 1);
        prop_assert_eq!(moved.places.len(), 1);
        let (a, b) = (&at_origin.places[0], &moved.places[0]);
        prop_assert_eq!(&a.x, &b.x);
        prop_assert_eq!(&a.y, &b.y);
        prop_assert_eq!(&a.rotation, &b.rotation);
        prop_assert_eq!(&b.center, &(u, v));
    }

    #[test]
    fn printing_reparses(c in prop::collection::vec((0u32..=3, 0u32..=3, nonzero()), 2..=5)) {
        let f = Poly2::from_terms(c.into_iter().map(|(i, j, v)| ((i, j), v)));
        prop_assume!(f.terms().keys().any(|(i, j)| i + j >= 2));
        let back = parse_poly(&f.to_string()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn float_mode_matches_exact_on_rational_branches(m in 2u32..=3, n in 3u32..=7, c in nonzero()) {
        prop_assume!(n > m);
        let f = Poly2::from_terms([((0, m), q(1, 1)), ((n, 0), -c.clone())]);
        let exact = places_at(&f, &(q(0, 1), q(0, 1)), T).unwrap();
        let float = places_at_in::<f64>(&f, &(q(0, 1), q(0, 1)), T, TOL).unwrap();
        prop_assert_eq!(exact.places.len() + exact.irrational, float.places.len() + float.irrational);
        if exact.irrational == 0 {
            for (e, f) in exact.places.iter().zip(&float.places) {
                prop_assert_eq!(e.to_f64(), f.clone());
            }
        }
    }
}

#[test]
fn worked_curves() {
    let origin = (q(0, 1), q(0, 1));
    let f = parse_poly("x^3 - y^2").unwrap();
    let pl = &places_at(&f, &origin, T).unwrap().places[0];
    assert_eq!(pl.x, TruncSeries::monomial(q(1, 1), 2, T));
    assert_eq!(pl.y.support(TOL), vec![(3, q(1, 1))]);

    let f = parse_poly("x^9 - y^2 + 2*y*x^2 - x^4").unwrap();
    let set = places_at(&f, &origin, T).unwrap();
    assert_eq!(set.places.len(), 1);
    assert_eq!(
        set.places[0].y.support(TOL),
        vec![(4, q(1, 1)), (9, q(1, 1))]
    );

    // the tacnode y^2 = x^4 has two smooth branches y = +-x^2
    let f = parse_poly("y^2 - x^4").unwrap();
    let set = places_at(&f, &origin, T).unwrap();
    assert_eq!(set.places.len(), 2);
    for pl in &set.places {
        assert!(residual(&f, pl).is_zero(TOL));
    }
}

#[test]
fn ingest_errors() {
    let f = parse_poly("y - x^2").unwrap();
    assert!(matches!(
        places_at(&f, &(q(1, 1), q(0, 1)), T),
        Err(IngestError::NotOnCurve(..))
    ));
    assert!(matches!(
        places_at(&f, &(q(0, 1), q(0, 1)), 3),
        Err(IngestError::TruncTooSmall(3))
    ));
    // a repeated factor is reduced first
    let g = parse_poly("(y - x^2)^2").unwrap();
    let set = places_at(&g, &(q(0, 1), q(0, 1)), T).unwrap();
    assert!(set.reduced);
    assert_eq!(set.places.len(), 1);
    // x^2 + y^2 has no real branch
    let h = parse_poly("x^2 + y^2").unwrap();
    assert!(places_at(&h, &(q(0, 1), q(0, 1)), T)
        .unwrap()
        .places
        .is_empty());
}
