mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use thermo2d::hyperbolic::{find_hyperbolic_directions, hyp_poly, HypPoly};
use thermo2d::media::{assemble_symbol, direction, perpendicular, Moduli};
use thermo2d::spectral::{sample_branch, Sheet};

/// `η^⊥·A(η)η` straight from the symbol.
fn off_diagonal(m: &Moduli, phi: f64) -> f64 {
    let a = assemble_symbol(m, phi);
    let v = a.apply(direction(phi));
    let p = perpendicular(phi);
    p[0] * v[0] + p[1] * v[1]
}

fn dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #[test]
    fn polynomial_is_scaled_off_diagonal_entry(seed in any::<u64>(), phi in 0.0..TAU) {
        let m = common::random_moduli(&mut common::rng(seed));
        let p = hyp_poly(&m, phi);
        prop_assert!((p - 8.0 * off_diagonal(&m, phi)).abs() <= 1e-12 * HypPoly::new(&m).scale().max(1.0));
    }

    #[test]
    fn catalog_matches_sign_changes_of_couplings(seed in any::<u64>()) {
        let m = common::admissible_medium(&mut common::rng(seed));
        let cat = find_hyperbolic_directions(&m).unwrap();
        prop_assert!(!cat.identically_hyperbolic);
        let ell = cat.ell_sum();
        prop_assert!((4..=8).contains(&ell), "sum of vanishing orders {}", ell);
        prop_assert!(cat.multiplicity_sum() <= 8);
        for d in &cat.directions {
            prop_assert!(d.ell >= 1 && d.ell <= d.poly_multiplicity);
            let twin = cat.find((d.phi + PI).rem_euclid(TAU), 1e-9);
            prop_assert!(twin.map(|t| t.sheet == d.sheet && t.ell == d.ell).unwrap_or(false));
        }
        // every sign change of a coupling function on a fine grid lies at a
        // catalog direction of odd vanishing order on that sheet
        let n = 16_384;
        let b = sample_branch(&m, n).unwrap();
        let step = TAU / n as f64;
        for (j, sheet) in [Sheet::First, Sheet::Second].into_iter().enumerate() {
            let a = &b.coupling[j];
            for i in 0..n - 1 {
                if a[i] * a[i + 1] < 0.0 {
                    let mid = b.phi[i] + 0.5 * step;
                    let hit = cat.directions.iter().any(|d| {
                        d.sheet == sheet && d.ell % 2 == 1 && dist(d.phi, mid) <= step
                    });
                    prop_assert!(hit, "unmatched sign change near {} on sheet {}", mid, sheet);
                }
            }
        }
    }

    #[test]
    fn catalog_is_scale_invariant(seed in any::<u64>(), c in 0.2..5.0f64) {
        let m = common::admissible_medium(&mut common::rng(seed));
        let (a, b) = (find_hyperbolic_directions(&m).unwrap(), find_hyperbolic_directions(&m.scaled(c)).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.directions.iter().zip(&b.directions) {
            prop_assert!(dist(x.phi, y.phi) <= 1e-9);
            prop_assert_eq!((x.sheet, x.ell), (y.sheet, y.ell));
        }
    }
}

#[test]
fn cubic_directions_sit_at_multiples_of_quarter_pi() {
    let cat = find_hyperbolic_directions(&Moduli::cubic(2.5, 0.0, 1.0)).unwrap();
    assert_eq!(cat.len(), 8);
    for (k, d) in cat.directions.iter().enumerate() {
        assert!((d.phi - k as f64 * PI / 4.0).abs() <= 1e-9);
        assert_eq!(d.ell, 1);
    }
}

#[test]
fn isotropic_medium_is_hyperbolic_everywhere() {
    let cat = find_hyperbolic_directions(&Moduli::isotropic(1.0, 1.0)).unwrap();
    assert!(cat.identically_hyperbolic);
    assert!(cat.is_empty());
}

#[test]
fn catalog_csv_has_one_row_per_direction() {
    let cat = find_hyperbolic_directions(&Moduli::exceptional(0.0, 1.0)).unwrap();
    let mut out = vec![];
    cat.write_csv(&mut out, true).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), cat.len() + 1);
}
