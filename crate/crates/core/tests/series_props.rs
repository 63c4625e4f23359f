use proptest::prelude::*;
use semineutral::{Complex, Series1, Series2};

const D: usize = 16;

fn int_series() -> impl Strategy<Value = Series1<i128>> {
    prop::collection::vec(-3i128..=3, D + 1).prop_map(|v| Series1::from_coeffs(v).unwrap())
}

fn int_inner() -> impl Strategy<Value = Series1<i128>> {
    int_series().prop_map(|mut s| {
        s.set_coeff(0, 0);
        s
    })
}

fn to_complex(s: &Series1<i128>) -> Series1 {
    Series1::from_coeffs(s.coeffs().iter().map(|&c| Complex::new(c as f64, 0.0)).collect()).unwrap()
}

/// `sum a_k b^k` with the powers built by repeated truncated products.
fn compose_oracle(a: &Series1<i128>, b: &Series1<i128>) -> Series1<i128> {
    let mut out = Series1::zero(D);
    let mut power = Series1::one(D);
    for k in 0..=D {
        out = &out + &power.scale(a.coeff(k));
        power = &power * b;
    }
    out
}

fn rel(a: &Series1, b: &Series1) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #[test]
    fn ring_axioms_exact(a in int_series(), b in int_series(), c in int_series()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Series1::zero(D));
        prop_assert_eq!(&a * &Series1::one(D), a.clone());
    }

    #[test]
    fn composition_matches_oracle(a in int_series(), b in int_inner()) {
        prop_assert_eq!(a.compose(&b, true).unwrap(), compose_oracle(&a, &b));
    }

    #[test]
    fn composition_associative_exact(a in int_series(), b in int_inner(), c in int_inner()) {
        let left = a.compose(&b.compose(&c, true).unwrap(), true).unwrap();
        let right = a.compose(&b, true).unwrap().compose(&c, true).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_associative_float(a in int_series(), b in int_inner(), c in int_inner()) {
        let (a, b, c) = (to_complex(&a), to_complex(&b), to_complex(&c));
        let left = a.compose(&b.compose(&c, true).unwrap(), true).unwrap();
        let right = a.compose(&b, true).unwrap().compose(&c, true).unwrap();
        prop_assert!(rel(&left, &right) < 1e-13);
    }

    #[test]
    fn inverse_is_two_sided(tail in prop::collection::vec(-0.2f64..0.2, D - 1), lin in 0.8f64..1.25) {
        let mut coeffs = vec![Complex::new(0.0, 0.0), Complex::new(lin, 0.3)];
        coeffs.extend(tail.iter().map(|&t| Complex::new(t, -t / 2.0)));
        let s = Series1::from_coeffs(coeffs).unwrap();
        let t = s.invert_local().unwrap();
        let id = Series1::var(D);
        let scale = t.max_abs().max(1.0);
        prop_assert!(s.compose(&t, true).unwrap().max_abs_diff(&id) < 1e-12 * scale);
        prop_assert!(t.compose(&s, true).unwrap().max_abs_diff(&id) < 1e-12 * scale);
    }

    #[test]
    fn truncation_is_idempotent(a in int_series()) {
        let once = a.with_cap(8);
        prop_assert_eq!(once.with_cap(8), once.clone());
        prop_assert_eq!((&once * &once).with_cap(8), (&a * &a).with_cap(8));
    }

    #[test]
    fn two_variable_ring_exact(
        a in prop::collection::vec(-3i128..=3, 12),
        b in prop::collection::vec(-3i128..=3, 12),
    ) {
        let build = |v: &[i128]| {
            let terms: Vec<_> = v.iter().enumerate().map(|(k, &c)| (k % 4, k / 4, c)).collect();
            Series2::from_terms(8, &terms).unwrap()
        };
        let (a, b) = (build(&a), build(&b));
        prop_assert_eq!(&a * &b, &b * &a);
        let x = Series2::<i128>::x(8);
        prop_assert_eq!(&(&a + &b) * &x, &(&a * &x) + &(&b * &x));
    }
}
