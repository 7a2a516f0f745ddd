//! Deterministic random streams.
//!
//! Every random quantity in the crate comes from a stream addressed by
//! `(seed, purpose tag, index)`. The address is hashed into a ChaCha20 key, so
//! a stream's content never depends on how many other streams were opened
//! before it or on which thread opens it.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"compressive-sketch/stream/v1";

/// A reproducible pseudorandom stream. Reading from it advances it; two
/// streams with the same address produce the same bytes.
#[derive(Clone, Debug)]
pub struct RandomStream {
    inner: ChaCha20Rng,
}

/// Opens the stream addressed by `(seed, tag, index)`.
pub fn derive_stream(seed: u64, tag: &str, index: u64) -> RandomStream {
    let mut hasher = Sha256::new();
    hasher.update(DOMAIN);
    hasher.update(seed.to_le_bytes());
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.update(index.to_le_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    RandomStream {
        inner: ChaCha20Rng::from_seed(key),
    }
}

/// First 64 bits of the stream at `(seed, tag, index)`; used to fan a master
/// seed out into per-repetition seeds.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    derive_stream(seed, tag, index).next_u64()
}

/// Draws `count` i.i.d. standard normal values. Consecutive calls continue the
/// same sequence, so two draws of 5 equal one draw of 10.
pub fn gaussian_draw(stream: &mut RandomStream, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| StandardNormal.sample(&mut stream.inner))
        .collect()
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
