//! The circulant sampler against the analytic covariance and against the
//! dense Cholesky sampler.

use fbmre::ensemble::{par_ensemble, Method, Sampler};
use fbmre_core::analytic::fbm_cov;
use fbmre_core::estimate::{mean_tamsd, sample_cov_point};
use fbmre_core::{HurstModel, ProcessKind, ProcessSpec, TimeGrid};

#[test]
fn circulant_matches_covariance_and_cholesky() {
    let grid = TimeGrid::new(128, 0.25).unwrap();
    for h in [0.2, 0.7] {
        let spec = ProcessSpec::new(ProcessKind::Fbm, HurstModel::deterministic(h).unwrap());
        let circ = par_ensemble(&spec, grid, 4000, 1, &Sampler::new(&spec, grid, Method::Circulant).unwrap()).unwrap();
        let chol = par_ensemble(&spec, grid, 4000, 2, &Sampler::new(&spec, grid, Method::Cholesky).unwrap()).unwrap();
        for (i, j) in [(1, 1), (5, 60), (64, 64), (100, 128), (127, 128)] {
            let p = sample_cov_point(&circ, i, j).unwrap();
            let want = fbm_cov(h, grid.t(i), grid.t(j) - grid.t(i));
            assert!((p.value - want).abs() <= 5.0 * p.stderr.unwrap(), "H={h} ({i},{j})");
        }
        let a = mean_tamsd(&circ, &[1, 8, 32]).unwrap();
        let b = mean_tamsd(&chol, &[1, 8, 32]).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            let se = x.stderr.unwrap().hypot(y.stderr.unwrap());
            assert!((x.value - y.value).abs() <= 4.0 * se, "H={h} tau={}", x.abscissa);
        }
    }
}

#[test]
fn circulant_two_point_uses_both_atoms() {
    let spec = ProcessSpec::new(ProcessKind::Fbm, HurstModel::two_point(0.25, 0.75, 0.5).unwrap());
    let grid = TimeGrid::new(64, 0.1).unwrap();
    let ens = par_ensemble(&spec, grid, 200, 3, &Sampler::new(&spec, grid, Method::Circulant).unwrap()).unwrap();
    let low = ens.trajectories.iter().filter(|t| t.h_draw == 0.25).count();
    assert!(low > 50 && low < 150);
}
