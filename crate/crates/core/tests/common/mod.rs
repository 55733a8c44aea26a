#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thermo2d::media::{check_assumptions, Moduli};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Generic moduli drawn from a box; not necessarily admissible.
pub fn random_moduli(rng: &mut StdRng) -> Moduli {
    Moduli::elastic(
        rng.gen_range(0.3..6.0),
        rng.gen_range(0.3..6.0),
        rng.gen_range(-0.8..3.0),
        rng.gen_range(-0.6..0.6),
        rng.gen_range(-0.6..0.6),
        rng.gen_range(0.3..3.0),
    )
    .with_thermal(0.5, 1.0)
    .unwrap()
}

pub fn is_admissible(m: &Moduli) -> bool {
    matches!(check_assumptions(m), Ok((r, _)) if r.all_ok())
}

/// Draws until (A1)–(A4) hold.
pub fn admissible_medium(rng: &mut StdRng) -> Moduli {
    loop {
        let m = random_moduli(rng);
        if is_admissible(&m) {
            return m;
        }
    }
}

pub fn admissible_media(seed: u64, count: usize) -> Vec<Moduli> {
    let mut r = rng(seed);
    (0..count).map(|_| admissible_medium(&mut r)).collect()
}

pub fn random_rhombic(rng: &mut StdRng) -> Moduli {
    loop {
        let m = Moduli::rhombic(
            rng.gen_range(0.2..9.0),
            rng.gen_range(0.2..9.0),
            rng.gen_range(-0.8..3.0),
            rng.gen_range(0.3..3.0),
        )
        .with_thermal(0.5, 1.0)
        .unwrap();
        if is_admissible(&m) {
            return m;
        }
    }
}

/// Dense symmetric eigensolver used as an independent oracle.
pub fn oracle_eigen(a: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let m = nalgebra::Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
    let e = nalgebra::SymmetricEigen::new(m);
    let (i, j) = if e.eigenvalues[0] <= e.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let v = |k: usize| [e.eigenvectors[(0, k)], e.eigenvectors[(1, k)]];
    ([e.eigenvalues[i], e.eigenvalues[j]], [v(i), v(j)])
}
