use darksts::capacity::{
    estimate_dwt, estimate_length, fit, fit_loglinear, CapacityError, LengthDwtModel, ModelForm,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn samples() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((20.0f64..400.0, -0.3f64..0.3), 3..60).prop_map(|v| {
        v.into_iter()
            .map(|(l, e)| (l, (0.7 + 2.6 * l.ln() + e).exp()))
            .collect()
    })
}

fn spread(s: &[(f64, f64)]) -> bool {
    let lo = s.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = s.iter().map(|p| p.0).fold(0.0, f64::max);
    hi / lo > 1.2
}

fn least_squares(x: impl Fn(f64) -> f64, s: &[(f64, f64)]) -> (f64, f64) {
    let m = DMatrix::from_fn(s.len(), 2, |i, j| if j == 0 { 1.0 } else { x(s[i].0) });
    let y = DVector::from_iterator(s.len(), s.iter().map(|p| p.1.ln()));
    let beta = m.svd(true, true).solve(&y, 1e-12).unwrap();
    (beta[0], beta[1])
}

#[test]
fn too_few_or_degenerate_samples() {
    assert!(matches!(
        fit_loglinear(&[(100.0, 1e4), (200.0, 1e5)]),
        Err(CapacityError::DegenerateInput(_))
    ));
    assert!(fit_loglinear(&[(100.0, 1e4), (100.0, 2e4), (100.0, 3e4)]).is_err());
    assert!(fit_loglinear(&[(100.0, 1e4), (-5.0, 2e4), (150.0, 3e4)]).is_err());
}

#[test]
fn model_text_round_trip() {
    let m = fit(
        &[(100.0, 1e4), (150.0, 4e4), (220.0, 9e4), (300.0, 2e5)],
        ModelForm::LogLinear,
    )
    .unwrap();
    let back: LengthDwtModel = m.to_string().parse().unwrap();
    assert_eq!(back, m);
}

proptest! {
    #[test]
    fn log_log_matches_svd(s in samples()) {
        prop_assume!(spread(&s));
        let m = fit_loglinear(&s).unwrap();
        let (a, b) = least_squares(f64::ln, &s);
        prop_assert!((m.a - a).abs() < 1e-7 && (m.b - b).abs() < 1e-7);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m.r_squared));
    }

    #[test]
    fn log_linear_matches_svd(s in samples()) {
        prop_assume!(spread(&s));
        let m = fit(&s, ModelForm::LogLinear).unwrap();
        let (a, b) = least_squares(|l| l, &s);
        prop_assert!((m.a - a).abs() < 1e-7 && (m.b - b).abs() < 1e-9);
    }

    #[test]
    fn sample_order_does_not_matter(s in samples()) {
        prop_assume!(spread(&s));
        let mut r = s.clone();
        r.reverse();
        let (m, n) = (fit_loglinear(&s).unwrap(), fit_loglinear(&r).unwrap());
        prop_assert!((m.a - n.a).abs() < 1e-9 && (m.b - n.b).abs() < 1e-12);
    }

    #[test]
    fn scaling_lengths_shifts_intercept(s in samples(), k in 0.1f64..10.0) {
        prop_assume!(spread(&s));
        let scaled: Vec<_> = s.iter().map(|&(l, d)| (l * k, d)).collect();
        let (m, n) = (fit_loglinear(&s).unwrap(), fit_loglinear(&scaled).unwrap());
        prop_assert!((n.b - m.b).abs() < 1e-9);
        prop_assert!((n.a - (m.a - m.b * k.ln())).abs() < 1e-8);
    }

    #[test]
    fn fitted_model_reproduces_exact_power_law(a in -2.0f64..3.0, b in 1.5f64..3.5) {
        let s: Vec<_> = [60.0, 110.0, 180.0, 250.0, 330.0].iter().map(|&l: &f64| (l, (a + b * l.ln()).exp())).collect();
        let m = fit_loglinear(&s).unwrap();
        prop_assert!((estimate_dwt(200.0, &m) / estimate_dwt(200.0, &LengthDwtModel::new(a, b)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn length_is_linear_in_resolution(w in 1.0f64..500.0, h in 1.0f64..500.0, r in 0.1f64..30.0, k in 1.0f64..4.0) {
        let l = estimate_length(w, h, r);
        prop_assert!((estimate_length(w, h, r * k) - k * l).abs() < 1e-9 * k * l);
        prop_assert!(estimate_length(w + 1.0, h, r) > l);
        prop_assert!(estimate_length(w, h + 1.0, r) > l);
    }
}
