//! Deterministic seed derivation.
//!
//! Every random decision in a run is driven by a generator derived from the
//! master seed and a context path (purpose, image id, sample index, ...), so
//! results do not depend on scheduling or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Environment variable consulted when no explicit seed is given.
pub const SEED_ENV_VAR: &str = "SYNTHAL_SEED";

/// 32-byte sub-seed from the master seed and a context path.
pub fn derive_seed_bytes(master: u64, parts: &[&str]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for part in parts {
        hasher.update([0x1f]);
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    seed
}

/// 64-bit sub-seed for interfaces that take a plain seed.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let bytes = derive_seed_bytes(master, parts);
    u64::from_le_bytes(bytes[..8].try_into().expect("eight bytes"))
}

/// Seeded generator for a context path.
pub fn derive_rng(master: u64, parts: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed_bytes(master, parts))
}

/// Resolves the master seed: an explicit value wins over `SYNTHAL_SEED`,
/// and the default is 0.
pub fn resolve_master_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "{SEED_ENV_VAR} must be an unsigned integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}
