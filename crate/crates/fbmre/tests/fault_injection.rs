//! A ₂F₁ with its linear series term sign-flipped must be caught.

use fbmre::verify::{criterion_hyp2f1, criterion_rl_cov, Subject};
use fbmre_core::specfun::{hyp2f1, Hyp2F1Args};
use fbmre_core::Result;

fn mis_signed_hyp2f1(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    Ok(hyp2f1(args)? - 2.0 * a * b / c * z)
}

fn rlfbm_cov_with_fault(h: f64, t: f64, tau: f64) -> f64 {
    if t == 0.0 || h == 0.5 {
        return fbmre_core::analytic::rlfbm_cov(h, t, tau);
    }
    let z = t / (t + tau);
    let pre = 2.0 * h / (h + 0.5) * (t + tau).powf(h - 0.5) * t.powf(h + 0.5);
    pre * mis_signed_hyp2f1(Hyp2F1Args::new(0.5 - h, 1.0, 1.5 + h, z)).unwrap()
}

#[test]
fn mis_signed_term_fails_covariance_criterion() {
    let bad = Subject {
        hyp2f1: mis_signed_hyp2f1,
        rlfbm_cov: rlfbm_cov_with_fault,
        ..Subject::library()
    };
    let r = criterion_rl_cov(&bad);
    println!("{r}");
    assert!(!r.passed);
    assert!(r.measured > 1e-3);
    assert!(!criterion_hyp2f1(&bad).passed);
    assert!(criterion_rl_cov(&Subject::library()).passed);
}
