use proptest::prelude::*;
use semineutral::manifolds::{center_manifold, restrict_to_center, strong_stable_manifold};
use semineutral::{Complex, Germ2, Series2};

const D: usize = 12;

fn nonlinear() -> impl Strategy<Value = Series2> {
    prop::collection::vec((0.0f64..0.3, 0.0f64..std::f64::consts::TAU), 12).prop_map(|v| {
        let monomials = [(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3), (4, 0), (0, 4), (2, 2), (5, 0), (0, 5)];
        let terms: Vec<_> = monomials.iter().zip(&v).map(|(&(i, j), &(r, t))| (i, j, Complex::from_polar(r, t))).collect();
        Series2::from_terms(D, &terms).unwrap()
    })
}

proptest! {
    #[test]
    fn graph_residuals(angle in 0.01f64..0.99, mu in 0.1f64..0.9, n1 in nonlinear(), n2 in nonlinear()) {
        let lambda = Complex::from_polar(1.0, std::f64::consts::TAU * angle);
        let g = Germ2::diagonal(lambda, Complex::new(mu, 0.0), &n1, &n2).unwrap();
        let cm = center_manifold(&g, D).unwrap();
        let ss = strong_stable_manifold(&g, D).unwrap();
        // rounding in the defect scales with the largest coefficient
        prop_assert!(cm.residual_norm < 1e-12 * cm.series.max_abs().max(1.0));
        prop_assert!(ss.residual_norm < 1e-12 * ss.series.max_abs().max(1.0));
        // the restriction fixes 0 and keeps the neutral multiplier
        let h = restrict_to_center(&g, &cm).unwrap();
        prop_assert_eq!(h.coeff(0), Complex::new(0.0, 0.0));
        prop_assert!((h.coeff(1) - lambda).norm() < 1e-14);
    }

    #[test]
    fn graphs_are_tangent(mu in 0.1f64..0.9, n2 in nonlinear()) {
        let lambda = Complex::from_polar(1.0, 1.0);
        let g = Germ2::diagonal(lambda, Complex::new(mu, 0.0), &Series2::zero(D), &n2).unwrap();
        let cm = center_manifold(&g, D).unwrap();
        prop_assert_eq!(cm.series.coeff(0), Complex::new(0.0, 0.0));
        prop_assert_eq!(cm.series.coeff(1), Complex::new(0.0, 0.0));
        // f1 = lambda x: the center graph alone absorbs n2(x, phi(x))
        let expect = n2.coeff(2, 0) / (lambda * lambda - Complex::new(mu, 0.0));
        prop_assert!((cm.series.coeff(2) - expect).norm() < 1e-14);
    }
}
