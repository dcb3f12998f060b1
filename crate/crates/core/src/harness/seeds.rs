//! Independent PRNG streams derived by hashing labels into 64-bit seeds.

use sha2::{Digest, Sha256};

/// Seed of the stream owned by `(master, instance, solver)`.
pub fn derive_seed(master: u64, instance_id: &str, solver_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    // length prefixes keep ("ab", "c") and ("a", "bc") apart
    for part in [instance_id, solver_id] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Seed of the `call`-th solver call within a stream.
pub fn call_seed(stream: u64, call: u64) -> u64 {
    derive_seed(stream, "call", &call.to_string())
}

/// Short stable hash of any serialisable value.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}
