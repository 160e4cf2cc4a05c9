use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::PrimeField;

/// Identifier recorded in certificates for the sampling stream.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Seeded sample stream. Single owner; parallel work takes a [`RngState::child`].
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh stream for task `index`, seeded by [`derive_seed`].
    pub fn child(&self, index: u64) -> RngState {
        RngState::new(derive_seed(self.seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen()
    }

    pub fn random_element(&mut self, field: PrimeField) -> u32 {
        self.rng.gen_range(0..field.modulus())
    }

    /// Uniform vector in `Z_p^dim`, redrawn until nonzero.
    pub fn random_vector(&mut self, field: PrimeField, dim: usize) -> Vec<u32> {
        assert!(dim >= 1, "random_vector needs dim >= 1");
        loop {
            let v: Vec<u32> = (0..dim).map(|_| self.random_element(field)).collect();
            if v.iter().any(|&x| x != 0) {
                return v;
            }
        }
    }
}

/// Child seed for task `index` of a run seeded with `seed`:
/// `splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let f = PrimeField::new(101).unwrap();
        let a = RngState::new(42).random_vector(f, 4);
        let b = RngState::new(42).random_vector(f, 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| x < 101));
    }

    #[test]
    fn dim_one_is_nonzero_scalar() {
        let f = PrimeField::new(3).unwrap();
        let mut rng = RngState::new(1);
        for _ in 0..200 {
            let v = rng.random_vector(f, 1);
            assert_eq!(v.len(), 1);
            assert_ne!(v[0], 0);
        }
    }

    #[test]
    fn zero_vector_never_returned() {
        let f = PrimeField::new(32003).unwrap();
        let mut rng = RngState::new(9);
        for _ in 0..10_000 {
            assert!(rng.random_vector(f, 2).iter().any(|&x| x != 0));
        }
    }

    #[test]
    fn children_differ_and_are_stable() {
        let root = RngState::new(5);
        assert_eq!(root.child(3).seed(), RngState::new(5).child(3).seed());
        assert_ne!(root.child(0).seed(), root.child(1).seed());
    }
}
