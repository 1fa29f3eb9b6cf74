//! Seeded generators for the randomized verification suites.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qmat::QMatrix;
use crate::quat::Quaternion;

pub use rand::Rng;

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Components uniform in `[-1, 1]`.
pub fn quaternion(rng: &mut impl rand::Rng) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn matrix(rng: &mut impl rand::Rng, n: usize, scale: f64) -> QMatrix {
    QMatrix::from_fn(n, |_, _| quaternion(rng) * scale)
}

/// Random matrix rescaled so that `‖A‖ = bound · u` with `u` uniform in `(0.1, 1]`.
pub fn matrix_with_norm_at_most(rng: &mut impl rand::Rng, n: usize, bound: f64) -> QMatrix {
    let a = matrix(rng, n, 1.0);
    let target = bound * rng.gen_range(0.1..=1.0);
    let norm = a.op_norm();
    if norm == 0.0 {
        a
    } else {
        a.scale(target / norm)
    }
}

/// Random matrix with `σ_min ≥ floor`, by rejection.
pub fn invertible_matrix(rng: &mut impl rand::Rng, n: usize, floor: f64) -> QMatrix {
    loop {
        let a = matrix(rng, n, 1.0);
        if a.sigma_min() >= floor {
            return a;
        }
    }
}

/// Quaternionic unitary from Gram–Schmidt on random columns (`⟨x, y⟩ = Σ x̄ᵢ yᵢ`).
pub fn unitary(rng: &mut impl rand::Rng, n: usize) -> QMatrix {
    loop {
        let a = matrix(rng, n, 1.0);
        let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v: Vec<Quaternion> = (0..n).map(|i| a[(i, j)]).collect();
            for u in &cols {
                let ip = u
                    .iter()
                    .zip(&v)
                    .fold(Quaternion::ZERO, |acc, (ui, vi)| acc + ui.conj() * *vi);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= *ui * ip;
                }
            }
            let norm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|q| q / norm).collect());
        }
        if ok {
            return QMatrix::from_fn(n, |i, j| cols[j][i]);
        }
    }
}
