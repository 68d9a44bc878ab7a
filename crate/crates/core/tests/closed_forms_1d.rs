use tmoment::oracle::quad_moment_1d;
use tmoment::t1d::{
    abs_moment, abs_moment_real, abs_moment_standard, central_abs_moment, central_moment, raw_from_central, raw_moment,
    raw_moment_standard,
};
use tmoment::{MomentKind, TParams1D};

const NUS: [f64; 5] = [2.5, 3.0, 5.0, 8.0, 30.0];
const MUS: [f64; 3] = [-2.0, 0.0, 1.3];
const SIGMAS: [f64; 3] = [0.5, 1.0, 4.0];
const INF: f64 = f64::INFINITY;

fn max_k(nu: f64) -> u32 {
    6.min(nu.ceil() as u32 - 1)
}

fn grid() -> impl Iterator<Item = (u32, TParams1D)> {
    NUS.iter().flat_map(|&nu| {
        MUS.iter().flat_map(move |&mu| {
            SIGMAS
                .iter()
                .flat_map(move |&sigma| (0..=max_k(nu)).map(move |k| (k, TParams1D::new(mu, sigma, nu).unwrap())))
        })
    })
}

fn oracle(kind: MomentKind, k: u32, p: &TParams1D) -> f64 {
    quad_moment_1d(kind, k, p, -INF, INF, 1e-13).unwrap().value
}

/// Relative error, with the matching absolute moment as the scale when the
/// target itself is (near) zero.
fn rel_err(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / want.abs().max(scale)
}

#[test]
fn one_d_closed_forms_match_quadrature() {
    let mut worst = 0.0f64;
    for (k, p) in grid() {
        let abs_scale = oracle(MomentKind::Abs, k, &p);
        let cabs_scale = oracle(MomentKind::CentralAbs, k, &p);
        let cases = [
            (MomentKind::Raw, raw_moment(k, &p).unwrap().value, abs_scale),
            (MomentKind::Central, central_moment(k, &p).unwrap().value, cabs_scale),
            (MomentKind::Abs, abs_moment(k, &p).unwrap().value, abs_scale),
            (MomentKind::CentralAbs, central_abs_moment(k, &p).unwrap().value, cabs_scale),
        ];
        for (kind, got, scale) in cases {
            let want = oracle(kind, k, &p);
            let e = rel_err(got, want, scale);
            worst = worst.max(e);
            assert!(e <= 1e-9, "{kind} k={k} {p:?}: {got} vs {want} (rel {e:e})");
        }
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn standard_forms_match_quadrature() {
    for &nu in &NUS {
        let p = TParams1D::standard(nu).unwrap();
        for k in 0..=max_k(nu) {
            let scale = oracle(MomentKind::Abs, k, &p);
            let raw = raw_moment_standard(k, nu).unwrap().value;
            assert!(rel_err(raw, oracle(MomentKind::Raw, k, &p), scale) <= 1e-9, "raw k={k} nu={nu}");
            let abs = abs_moment_standard(k, nu).unwrap().value;
            assert!(rel_err(abs, scale, scale) <= 1e-9, "abs k={k} nu={nu}");
        }
    }
}

#[test]
fn general_forms_reduce_to_standard() {
    for &nu in &NUS {
        let p = TParams1D::standard(nu).unwrap();
        for k in 0..=max_k(nu) {
            let a = raw_moment(k, &p).unwrap().value;
            let b = raw_moment_standard(k, nu).unwrap().value;
            assert!((a - b).abs() <= 1e-12 * b.abs(), "raw k={k} nu={nu}: {a} vs {b}");
            let a = abs_moment(k, &p).unwrap().value;
            let b = abs_moment_standard(k, nu).unwrap().value;
            assert!((a - b).abs() <= 1e-12 * b.abs(), "abs k={k} nu={nu}: {a} vs {b}");
        }
    }
}

#[test]
fn binomial_expansion_matches_raw() {
    for (k, p) in grid() {
        let a = raw_from_central(k, &p).unwrap().value;
        let b = raw_moment(k, &p).unwrap().value;
        let scale = abs_moment(k, &p).unwrap().value;
        assert!(rel_err(a, b, scale) <= 1e-10, "k={k} {p:?}: {a} vs {b}");
    }
}

#[test]
fn undefined_orders_flagged() {
    let p = TParams1D::new(0.5, 2.0, 3.0).unwrap();
    for k in 3..8 {
        for r in [raw_moment(k, &p), central_moment(k, &p), abs_moment(k, &p), central_abs_moment(k, &p)] {
            let r = r.unwrap();
            assert!(!r.defined);
            assert!(r.value.is_nan());
            assert_eq!(r.reason, tmoment::UNDEFINED_ORDER_REASON);
        }
    }
    assert!(raw_moment(0, &TParams1D::new(0.0, 1.0, 0.5).unwrap()).unwrap().defined);
}

#[test]
fn real_order_abs_moment_matches_quadrature() {
    let p = TParams1D::new(0.8, 1.5, 4.5).unwrap();
    for &k in &[0.3, 1.5, 2.7, 4.2] {
        let got = abs_moment_real(k, &p).unwrap().value;
        let want = tmoment::oracle::Integrator::new(1e-13, 1e-13)
            .integrate(|t| t.abs().powf(k) * tmoment::t1d::t_pdf(t, &p), -INF, INF)
            .value;
        assert!(((got - want) / want).abs() < 1e-9, "k={k}: {got} vs {want}");
    }
}
