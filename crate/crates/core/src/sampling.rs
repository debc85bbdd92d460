//! Counter-based random streams: sample `i` of a check always draws from
//! stream `i` of the seeded generator, whatever the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mesh::{Field, Mesh};

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_field(mesh: Mesh, rng: &mut ChaCha8Rng) -> Field {
    let v = (0..mesh.dof()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Field::new(mesh, v).expect("gaussian samples are finite")
}

pub fn uniform_field(mesh: Mesh, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Field {
    let v = (0..mesh.dof()).map(|_| rng.random_range(lo..hi)).collect();
    Field::new(mesh, v).expect("uniform samples are finite")
}
