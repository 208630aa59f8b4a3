use std::f64::consts::PI;

use offsetshape::offset::{offset_points, Branch, OffsetParams};
use offsetshape::shape::{signature, LocalShape, Place};
use offsetshape::verifier::{
    count_cusps, cross_check, numeric_shape, random_suite, shape_grid, suite_items, uniform_grid,
    CheckConfig, NumericVerdict, PointCloud, SuiteBounds, SuiteFlags, Tri,
};
use offsetshape::{Rational, Tolerance};

const TOL: Tolerance = Tolerance::DEFAULT;

/// `h = +-sqrt((2^(2/3) - 1) / 4)`, where `2 / (1 + 4h^2)^(3/2) = 1`.
fn parabola_cusp() -> f64 {
    ((2f64.powf(2.0 / 3.0) - 1.0) / 4.0).sqrt()
}

fn parabola() -> Place<f64> {
    Place::polynomial(&[(1, 1.0)], &[(2, 1.0)], 8)
}

fn cusps(pl: &Place<f64>, op: &OffsetParams<f64>, lo: f64, hi: f64) -> Vec<f64> {
    let hs = uniform_grid(lo, hi, 2001);
    let cloud = PointCloud::of_offset("gen", pl, op, &hs, None);
    let sampler = |h: f64| offset_points(pl, op, &[h])[0].point;
    count_cusps(&cloud, Some(&sampler)).unwrap().locations
}

#[test]
fn parabola_cusps_only_for_classical_offsets() {
    let found = cusps(
        &parabola(),
        &OffsetParams::from_angle(1.0, 0.0, Branch::Plus),
        -1.2,
        1.2,
    );
    assert_eq!(found.len(), 2);
    let h = parabola_cusp();
    assert!(
        (found[0] + h).abs() < 0.005 && (found[1] - h).abs() < 0.005,
        "{found:?}"
    );
    assert!(cusps(
        &parabola(),
        &OffsetParams::from_angle(1.0, 0.0, Branch::Minus),
        -1.2,
        1.2
    )
    .is_empty());
    for theta in [PI / 50.0, PI / 25.0, PI / 10.0] {
        for br in Branch::BOTH {
            let op = OffsetParams::from_angle(1.0, theta, br);
            assert!(
                cusps(&parabola(), &op, -1.2, 1.2).is_empty(),
                "theta {theta} {br}"
            );
        }
    }
}

#[test]
fn circle_offsets_have_no_cusps() {
    // unit circle through the origin: (sin h, 1 - cos h)
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut fact = 1.0;
    for k in 1..24usize {
        fact *= k as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            xs.push((k, sign / fact));
        } else {
            ys.push((k, -sign / fact));
        }
    }
    let circle = Place::polynomial(&xs, &ys, 24);
    for (d, theta) in [
        (0.5, 0.0),
        (2.0, 0.0),
        (0.5, PI / 3.0),
        (3.0, 2.0),
        (1.0, PI / 2.0),
    ] {
        for br in Branch::BOTH {
            let op = OffsetParams::from_angle(d, theta, br);
            assert!(
                cusps(&circle, &op, -1.5, 1.5).is_empty(),
                "d {d} theta {theta} {br}"
            );
        }
    }
}

#[test]
fn too_few_samples() {
    let cloud = PointCloud {
        branch_id: "src".into(),
        center: None,
        samples: vec![(0.0, 0.0, 0.0), (1.0, 1.0, 1.0)],
    };
    assert!(count_cusps(&cloud, None).is_err());
}

fn model(x: &[(usize, f64)], y: &[(usize, f64)]) -> NumericVerdict {
    let pl = Place::polynomial(x, y, 12);
    numeric_shape(&PointCloud::of_place(
        "src",
        &pl,
        &shape_grid(1e-3, 0.5, 64),
    ))
    .verdict
}

#[test]
fn numeric_shapes_of_model_clouds() {
    assert_eq!(
        model(&[(2, 1.0)], &[(3, 1.0)]),
        NumericVerdict::Shape(LocalShape::Beak)
    );
    assert_eq!(
        model(&[(1, 1.0)], &[(3, 1.0)]),
        NumericVerdict::Shape(LocalShape::Flex)
    );
    assert_eq!(
        model(&[(2, 1.0)], &[(4, 1.0), (5, 1.0)]),
        NumericVerdict::Shape(LocalShape::Thorn)
    );
}

#[test]
fn classical_parabola_offset_is_cuspidal_at_the_cusp() {
    // recenter the parabola at the cusp-generating point
    let h0 = parabola_cusp();
    let pl = Place::polynomial(
        &[(0, h0), (1, 1.0)],
        &[(0, h0 * h0), (1, 2.0 * h0), (2, 1.0)],
        8,
    );
    let op = OffsetParams::from_angle(1.0, 0.0, Branch::Plus);
    let center = offset_points(&pl, &op, &[0.0])[0].point;
    let cloud = PointCloud::of_offset("gen+", &pl, &op, &shape_grid(1e-3, 0.1, 64), center);
    let num = numeric_shape(&cloud);
    match num.verdict {
        NumericVerdict::Shape(s) => assert_eq!(num.p.unwrap() % 2, 0, "{s:?}"),
        v => panic!("{v:?}: {:?}", num.notes),
    }
}

fn exact(terms: &[(usize, i64)]) -> Vec<(usize, Rational)> {
    terms
        .iter()
        .map(|&(e, c)| (e, Rational::from_integer(c.into())))
        .collect()
}

#[test]
fn cross_check_worked_examples() {
    let cfg = CheckConfig::default();
    let quarter = OffsetParams::from_angle(1.0, PI / 4.0, Branch::Plus);

    let cusp = Place::polynomial(&[(2, 1.0)], &[(3, 1.0)], 24);
    let cc = cross_check(&cusp, &quarter, &cfg).unwrap();
    for b in &cc.branches {
        assert!(b.series.as_ref().unwrap().regular);
        assert_eq!(b.prediction.as_ref().unwrap().predicted_p0, Some(1));
        assert_eq!(
            b.numeric.as_ref().unwrap().verdict,
            NumericVerdict::Shape(LocalShape::Elbow)
        );
    }

    let thorn = Place::polynomial(&exact(&[(2, 1)]), &exact(&[(4, 1), (9, 1)]), 24);
    let op = OffsetParams::new(
        Rational::from_integer(1.into()),
        Rational::new(3.into(), 5.into()),
        Rational::new(4.into(), 5.into()),
        Branch::Plus,
        TOL,
    )
    .unwrap();
    let cc = cross_check(&thorn, &op, &cfg).unwrap();
    for b in &cc.branches {
        assert_eq!(b.series.as_ref().unwrap().shape, LocalShape::Thorn);
        assert!(b.series.as_ref().unwrap().preserved);
        assert_eq!(b.agreement.predictor_series, Tri::Agree);
        assert_eq!(b.agreement.series_numeric, Tri::Agree);
    }

    let flex = Place::polynomial(&[(1, 1.0)], &[(3, 1.0)], 24);
    let cc = cross_check(
        &flex,
        &OffsetParams::from_angle(1.0, PI / 3.0, Branch::Plus),
        &cfg,
    )
    .unwrap();
    for b in &cc.branches {
        assert_eq!(
            b.prediction.as_ref().unwrap().predicted_shape,
            Some(LocalShape::Elbow)
        );
        assert_eq!(b.series.as_ref().unwrap().shape, LocalShape::Elbow);
        assert_eq!(b.agreement.predictor_series, Tri::Agree);
    }
}

#[test]
fn source_clouds_match_exact_shapes() {
    let grid = shape_grid(1e-3, 0.5, 64);
    let items = suite_items(1, 200, SuiteBounds::default(), SuiteFlags::default());
    let (mut agree, mut abstain, mut contradict) = (0, 0, Vec::new());
    for it in &items {
        let pl = it.place.to_f64();
        let want = signature(&it.place, TOL).unwrap().shape();
        match numeric_shape(&PointCloud::of_place("src", &pl, &grid)).verdict {
            NumericVerdict::Shape(s) if s == want => agree += 1,
            NumericVerdict::Regular if want == LocalShape::Elbow || want == LocalShape::Flex => {
                agree += 1
            }
            NumericVerdict::Undetermined => abstain += 1,
            v => contradict.push(format!("{}: {v:?} vs {want:?}", it.place.describe())),
        }
    }
    assert!(contradict.is_empty(), "{contradict:?}");
    assert!(
        agree * 100 >= 95 * items.len(),
        "agree {agree}, abstain {abstain}"
    );
}

#[test]
fn suite_numeric_estimates_never_contradict() {
    let r = random_suite(
        1,
        200,
        SuiteBounds::default(),
        SuiteFlags::default(),
        &CheckConfig::default(),
    );
    assert!(r.passed());
    assert_eq!(r.numeric.contradict, 0, "{:?}", r.numeric);
    assert!(r.errors.is_empty(), "{:?}", r.errors);
}
