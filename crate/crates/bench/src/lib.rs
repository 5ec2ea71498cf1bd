//! Fixed workloads shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqkd_core::{random_attack, AttackModel, Povm};

/// A reproducible Haar-random attack on a `d`-dimensional ancilla together
/// with a random `d²`-outcome POVM.
pub fn random_case(d: usize, seed: u64) -> (AttackModel, Povm) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_attack(d, &mut rng).expect("d within range");
    let e = Povm::random(d, d * d, &mut rng).expect("gaussian factors are nonsingular");
    (a, e)
}
