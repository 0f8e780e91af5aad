//! Seeded sampling of admissible period matrices.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chars::AronholdSystem;
use crate::error::{Error, Result};
use crate::theta::{PeriodMatrix, ThetaTable, TruncationPolicy};
use crate::weber::weber_coefficients;

pub const MAX_DRAWS: usize = 100;

/// Largest accepted `|k_i − 1|` for the reference frame of a sampled τ.
pub const ADMISSION_K_TOL: f64 = 1e-6;

/// One draw of `A + i(MMᵀ + I/2)` with `A` symmetric uniform in `[-1/2, 1/2]`
/// and `M` standard normal. Always in the Siegel half-space.
pub fn sample_tau<R: Rng>(rng: &mut R) -> PeriodMatrix {
    let mut a = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in i..3 {
            let x: f64 = rng.random_range(-0.5..=0.5);
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    let m = Matrix3::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
    let y = m * m.transpose() + Matrix3::identity() * 0.5;
    let raw = std::array::from_fn(|i| std::array::from_fn(|j| Complex64::new(a[(i, j)], y[(i, j)])));
    PeriodMatrix::new(raw).expect("sampled matrix lies in the Siegel half-space")
}

/// Near-vanishing constants can leave the scan empty while the Weber system
/// loses all precision; such draws fail to reproduce `k = (1, 1, 1)`.
fn well_conditioned(table: &ThetaTable) -> bool {
    weber_coefficients(&AronholdSystem::reference(), table, [1, 1, 1])
        .is_ok_and(|f| f.k.iter().all(|k| (k - 1.0).norm() < ADMISSION_K_TOL))
}

/// Draws until the special-locus scan is empty and the reference frame is
/// numerically sound, at most [`MAX_DRAWS`] times. Deterministic in `seed`.
pub fn random_tau(seed: u64, pol: &TruncationPolicy) -> Result<PeriodMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let tau = sample_tau(&mut rng);
        match ThetaTable::new(&tau, pol) {
            Ok(table) if table.vanishing_even().is_empty() && well_conditioned(&table) => return Ok(tau),
            Ok(_) | Err(Error::TruncationCap { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Exhausted { seed, tries: MAX_DRAWS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_admissible() {
        let pol = TruncationPolicy::default();
        let t1 = random_tau(7, &pol).unwrap();
        let t2 = random_tau(7, &pol).unwrap();
        assert_eq!(t1.entries(), t2.entries());
        assert_ne!(random_tau(8, &pol).unwrap().entries(), t1.entries());
        assert!(t1.min_im_eigenvalue() >= 0.5 - 1e-12);
        let raw = t1.entries();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(raw[i][j], raw[j][i]);
                assert!(raw[i][j].re.abs() <= 0.5);
            }
        }
    }
}
