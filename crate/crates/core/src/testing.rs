//! Helpers shared by unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrices::Mat;
use crate::scalars::{Field, Quat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut ChaCha8Rng, field: Field, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(field, rows, cols, |_, _| {
        let mut v = [0.0; 4];
        for x in v.iter_mut().take(field.real_dim()) {
            *x = StandardNormal.sample(rng);
        }
        Quat::from_array(v)
    })
}
