//! Seeded generator derivation.
//!
//! Every independent unit of randomized work (one binary task, one synthetic
//! item) draws from its own generator keyed on the run seed plus a stable
//! label, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Human-readable description written into manifests.
pub const DERIVATION_RULE: &str =
    "ChaCha8Rng::seed_from_u64(u64_le(sha256(u64_le(seed) || utf8(label))[0..8]))";

pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

pub fn derive_rng(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn stable_and_label_sensitive() {
        assert_eq!(derive_seed(7, "love"), derive_seed(7, "love"));
        assert_ne!(derive_seed(7, "love"), derive_seed(7, "awe"));
        assert_ne!(derive_seed(7, "love"), derive_seed(8, "love"));
        let a: u64 = derive_rng(1, "x").gen();
        let b: u64 = derive_rng(1, "x").gen();
        assert_eq!(a, b);
    }
}
