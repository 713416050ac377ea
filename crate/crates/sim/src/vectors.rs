// SPDX-License-Identifier: Apache-2.0

//! Golden test-vector emission.
//!
//! The emitted file pins the hashing, pad-derivation, and proof encodings
//! so other implementations (e.g. an on-chain verifier) can check
//! byte-for-byte compatibility. Emission is fully deterministic.

use dkg_core::dleq;
use dkg_core::group_math::{aux_generator, keccak256, G1Point, Scalar, U256};
use dkg_core::share_channel::{derive_pad, derive_shared_key, encrypt_share, SharedKey};
use dkg_core::vss::Share;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct KeccakVector {
    pub input_ascii: String,
    pub digest: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PadVector {
    pub shared_key_x: String,
    pub receiver: u16,
    pub pad: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EncryptionVector {
    pub issuer_secret: String,
    pub receiver_secret: String,
    pub share_value: String,
    pub receiver: u16,
    pub shared_key: String,
    pub pad: String,
    pub ciphertext: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DleqVector {
    pub x1: String,
    pub y1: String,
    pub x2: String,
    pub y2: String,
    pub challenge: String,
    pub response: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VectorsFile {
    pub keccak: Vec<KeccakVector>,
    pub pad_derivation: PadVector,
    pub share_encryption: EncryptionVector,
    pub dleq_roundtrip: DleqVector,
}

fn u256_hex(v: U256) -> String {
    v.to_string()
}

fn point_hex(p: &G1Point) -> String {
    format!("0x{}", hex::encode(p.to_bytes()))
}

fn scalar_hex(s: &Scalar) -> String {
    format!("0x{}", hex::encode(s.to_be_bytes()))
}

/// Builds the vector file. Byte-identical on every call.
pub fn emit_vectors() -> VectorsFile {
    let keccak = ["", "abc"]
        .into_iter()
        .map(|input| KeccakVector {
            input_ascii: input.to_string(),
            digest: format!("0x{}", hex::encode(keccak256(input.as_bytes()))),
        })
        .collect();

    // fixed secrets; same derivation chain as the frozen golden vector
    let sk_i = Scalar::from_u256(U256::from_be_bytes(keccak256(b"issuer secret")));
    let sk_j = Scalar::from_u256(U256::from_be_bytes(keccak256(b"receiver secret")));
    let value = Scalar::from_u256(U256::from_be_bytes(keccak256(b"share value")));
    let receiver = 3u16;

    let pk_j = G1Point::generator().mul_scalar(&sk_j);
    let key = derive_shared_key(&sk_i, &pk_j).expect("public key is not identity");
    let pad = derive_pad(&key, receiver);
    let encrypted = encrypt_share(
        &Share {
            issuer: 1,
            receiver,
            value,
        },
        &key,
    );

    let pad_derivation = PadVector {
        shared_key_x: u256_hex(key.point().normalize().0),
        receiver,
        pad: u256_hex(pad),
    };
    let share_encryption = EncryptionVector {
        issuer_secret: scalar_hex(&sk_i),
        receiver_secret: scalar_hex(&sk_j),
        share_value: scalar_hex(&value),
        receiver,
        shared_key: point_hex(&key.point()),
        pad: u256_hex(pad),
        ciphertext: u256_hex(encrypted.ciphertext),
    };

    // one full prove/verify roundtrip under a fixed seed
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    let alpha = Scalar::random(&mut rng);
    let x1 = G1Point::generator();
    let x2 = aux_generator();
    let y1 = x1.mul_scalar(&alpha);
    let y2 = x2.mul_scalar(&alpha);
    let proof = dleq::prove(&x1, &y1, &x2, &y2, &alpha, &mut rng).expect("no identity inputs");
    let dleq_roundtrip = DleqVector {
        x1: point_hex(&x1),
        y1: point_hex(&y1),
        x2: point_hex(&x2),
        y2: point_hex(&y2),
        challenge: u256_hex(proof.challenge),
        response: scalar_hex(&proof.response),
        verified: dleq::verify(&x1, &y1, &x2, &y2, &proof),
    };

    VectorsFile {
        keccak,
        pad_derivation,
        share_encryption,
        dleq_roundtrip,
    }
}

/// Re-derives the pairwise key named in the emitted vector; convenience
/// for consumers validating against the file.
pub fn shared_key_of(vector: &EncryptionVector) -> SharedKey {
    let sk_i = Scalar::from_be_bytes(
        &hex::decode(vector.issuer_secret.trim_start_matches("0x")).expect("vector hex"),
    )
    .expect("32 bytes");
    let sk_j = Scalar::from_be_bytes(
        &hex::decode(vector.receiver_secret.trim_start_matches("0x")).expect("vector hex"),
    )
    .expect("32 bytes");
    let pk_j = G1Point::generator().mul_scalar(&sk_j);
    derive_shared_key(&sk_i, &pk_j).expect("not identity")
}
