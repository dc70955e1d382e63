use detrep::compose::{block_diag, expand_product, represent_factored};
use detrep::linalg::C64;
use detrep::poly::BivariatePoly;
use detrep::verify::{self, QualityParams};

fn conic() -> BivariatePoly {
    BivariatePoly::from_real_terms(&[(2, 0, 1.0), (0, 2, 2.0), (1, 1, -0.5), (1, 0, 0.3), (0, 0, -1.0)])
}

fn cubic() -> BivariatePoly {
    BivariatePoly::from_real_terms(&[(3, 0, 0.8), (0, 3, -0.6), (2, 1, 0.4), (1, 1, 1.1), (0, 1, -0.2), (0, 0, 0.5)])
}

fn points() -> Vec<(C64, C64)> {
    vec![
        (C64::new(0.3, -0.2), C64::new(0.7, 0.1)),
        (C64::new(-1.1, 0.4), C64::new(0.2, -0.9)),
        (C64::new(0.05, 0.6), C64::new(-0.4, 0.35)),
    ]
}

fn assert_represents(rep: &detrep::minrep::PencilRep, p: &BivariatePoly) {
    for (x, y) in points() {
        let (d, v) = (rep.det_at(x, y), p.eval(x, y));
        assert!((d - v).norm() <= 1e-9 * (1.0 + v.norm()), "det {d} vs p {v}");
    }
}

#[test]
fn product_of_two_factors_is_five_by_five() {
    let params = QualityParams::default();
    let r2 = verify::robust_construct(&conic(), &params, 0).unwrap().rep;
    let r3 = verify::robust_construct(&cubic(), &params, 1).unwrap().rep;
    let rep = block_diag(&[r2, r3]).unwrap();
    assert_eq!(rep.order(), 5);
    assert_represents(&rep, &conic().mul(&cubic()));
}

#[test]
fn multiplicities_repeat_blocks() {
    let factors = [(conic(), 1), (cubic(), 2)];
    let rep = represent_factored(&factors, &QualityParams::default(), 3).unwrap();
    assert_eq!(rep.order(), 8);
    let product = expand_product(&factors);
    assert_eq!(product.degree(), 8);
    assert_represents(&rep, &product);
    // Off-diagonal blocks stay zero.
    assert!(rep.a.view((0, 2), (2, 6)).iter().all(|z| z.norm() == 0.0));
}

#[test]
fn squared_factor_cannot_be_represented_directly() {
    let square = expand_product(&[(conic(), 2)]);
    assert!(verify::robust_construct(&square, &QualityParams::default(), 0).is_err());
    let rep = represent_factored(&[(conic(), 2)], &QualityParams::default(), 0).unwrap();
    assert_represents(&rep, &square);
}
