// SPDX-License-Identifier: Apache-2.0

//! Pairwise encrypted share delivery.
//!
//! Each participant holds an identity keypair `(sk, pk = sk * G)`. The
//! channel key between i and j is the Diffie-Hellman point
//! `k_ij = sk_i * pk_j = sk_j * pk_i`; the symmetric pad for receiver j
//! is `keccak256(encodePacked(k_ij.x, j))`, and shares are XORed with it
//! as full 256-bit words. A contract holding `k_ij` can re-derive the pad
//! and decrypt a logged ciphertext with one hash and one XOR.

use rand_core::RngCore;
use thiserror::Error;

use crate::group_math::{keccak256, pack_uint256, CodecError, G1Point, NodeIndex, Scalar, U256};
use crate::vss::Share;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("peer public key is the identity")]
    IdentityPublicKey,
}

/// An identity keypair with `public = secret * G` and a nonzero secret.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyPair {
    secret: Scalar,
    public: G1Point,
}

impl KeyPair {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut secret = Scalar::random(rng);
        while secret.is_zero() {
            secret = Scalar::random(rng);
        }
        KeyPair {
            secret,
            public: G1Point::generator().mul_scalar(&secret),
        }
    }

    pub fn secret(&self) -> Scalar {
        self.secret
    }

    pub fn public(&self) -> G1Point {
        self.public
    }
}

/// A pairwise Diffie-Hellman key; identical from either endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedKey {
    point: G1Point,
}

impl SharedKey {
    /// Wraps an already-known shared point (e.g. one revealed in a
    /// dispute); correctness is the DLEQ proof's job, not this type's.
    pub fn from_point(point: G1Point) -> Self {
        SharedKey { point }
    }

    pub fn point(&self) -> G1Point {
        self.point
    }
}

/// `k = my_secret * their_public`.
pub fn derive_shared_key(
    my_secret: &Scalar,
    their_public: &G1Point,
) -> Result<SharedKey, ChannelError> {
    if their_public.is_identity() {
        return Err(ChannelError::IdentityPublicKey);
    }
    Ok(SharedKey {
        point: their_public.mul_scalar(my_secret),
    })
}

/// The one-time pad for `receiver`: `keccak256(k.x || receiver)` with both
/// arguments packed as uint256.
pub fn derive_pad(key: &SharedKey, receiver: NodeIndex) -> U256 {
    let (x, _) = key.point.normalize();
    let packed = pack_uint256(&[x, U256::from_u64(u64::from(receiver))]);
    U256::from_be_bytes(keccak256(&packed))
}

/// A share encrypted for its receiver; the ciphertext is a full 256-bit
/// word (`value XOR pad`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncryptedShare {
    pub issuer: NodeIndex,
    pub receiver: NodeIndex,
    pub ciphertext: U256,
}

pub const ENCRYPTED_SHARE_BYTES: usize = 36;

impl EncryptedShare {
    /// Wire form: issuer (u16 BE) || receiver (u16 BE) || ciphertext (32 B).
    pub fn to_bytes(&self) -> [u8; ENCRYPTED_SHARE_BYTES] {
        let mut out = [0u8; ENCRYPTED_SHARE_BYTES];
        out[..2].copy_from_slice(&self.issuer.to_be_bytes());
        out[2..4].copy_from_slice(&self.receiver.to_be_bytes());
        out[4..].copy_from_slice(&self.ciphertext.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != ENCRYPTED_SHARE_BYTES {
            return Err(CodecError::InvalidLength {
                expected: ENCRYPTED_SHARE_BYTES,
                actual: bytes.len(),
            });
        }
        Ok(EncryptedShare {
            issuer: u16::from_be_bytes([bytes[0], bytes[1]]),
            receiver: u16::from_be_bytes([bytes[2], bytes[3]]),
            ciphertext: U256::from_be_slice(&bytes[4..])?,
        })
    }
}

/// XORs the share value with the receiver's pad.
pub fn encrypt_share(share: &Share, key: &SharedKey) -> EncryptedShare {
    let pad = derive_pad(key, share.receiver);
    EncryptedShare {
        issuer: share.issuer,
        receiver: share.receiver,
        ciphertext: share.value.to_u256() ^ pad,
    }
}

/// A decrypted share: the canonical value mod q, plus the raw pre-reduction
/// word disputes re-derive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecryptedShare {
    pub value: Scalar,
    pub raw: U256,
}

/// Strips the pad; the plaintext word is reduced mod q only after the XOR.
pub fn decrypt_share(enc: &EncryptedShare, key: &SharedKey) -> DecryptedShare {
    let raw = enc.ciphertext ^ derive_pad(key, enc.receiver);
    DecryptedShare {
        value: Scalar::from_u256(raw),
        raw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vss::{verify_share, SharePolynomial};
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn keygen_is_seed_deterministic_and_consistent() {
        let a = KeyPair::generate(&mut rng(1));
        let b = KeyPair::generate(&mut rng(1));
        assert_eq!(a, b);
        assert_eq!(a.public(), G1Point::generator().mul_scalar(&a.secret()));
    }

    #[test]
    fn keygen_seed_scan_gives_distinct_publics() {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..100u64 {
            let kp = KeyPair::generate(&mut rng(seed));
            assert!(seen.insert(kp.public().to_bytes()));
        }
    }

    #[test]
    fn shared_key_is_symmetric() {
        let a = KeyPair::generate(&mut rng(2));
        let b = KeyPair::generate(&mut rng(3));
        let kab = derive_shared_key(&a.secret(), &b.public()).unwrap();
        let kba = derive_shared_key(&b.secret(), &a.public()).unwrap();
        assert_eq!(kab, kba);
    }

    #[test]
    fn unit_secret_yields_their_public() {
        let b = KeyPair::generate(&mut rng(4));
        let k = derive_shared_key(&Scalar::one(), &b.public()).unwrap();
        assert_eq!(k.point(), b.public());
    }

    #[test]
    fn shared_key_matches_triple_product() {
        let a = KeyPair::generate(&mut rng(5));
        let b = KeyPair::generate(&mut rng(6));
        let k = derive_shared_key(&a.secret(), &b.public()).unwrap();
        let triple = G1Point::generator().mul_scalar(&(a.secret() * b.secret()));
        assert_eq!(k.point(), triple);
    }

    #[test]
    fn identity_public_key_is_rejected() {
        let a = KeyPair::generate(&mut rng(7));
        assert_eq!(
            derive_shared_key(&a.secret(), &G1Point::identity()).unwrap_err(),
            ChannelError::IdentityPublicKey
        );
    }

    #[test]
    fn pad_depends_on_receiver_index() {
        let a = KeyPair::generate(&mut rng(8));
        let b = KeyPair::generate(&mut rng(9));
        let k = derive_shared_key(&a.secret(), &b.public()).unwrap();
        assert_eq!(derive_pad(&k, 3), derive_pad(&k, 3));
        assert_ne!(derive_pad(&k, 3), derive_pad(&k, 4));
    }

    #[test]
    fn zero_share_encrypts_to_the_pad() {
        let a = KeyPair::generate(&mut rng(10));
        let b = KeyPair::generate(&mut rng(11));
        let k = derive_shared_key(&a.secret(), &b.public()).unwrap();
        let share = Share {
            issuer: 1,
            receiver: 2,
            value: Scalar::zero(),
        };
        assert_eq!(encrypt_share(&share, &k).ciphertext, derive_pad(&k, 2));
    }

    #[test]
    fn encrypt_decrypt_roundtrip() {
        let a = KeyPair::generate(&mut rng(12));
        let b = KeyPair::generate(&mut rng(13));
        let k = derive_shared_key(&a.secret(), &b.public()).unwrap();
        let share = Share {
            issuer: 1,
            receiver: 4,
            value: Scalar::random(&mut rng(14)),
        };
        let enc = encrypt_share(&share, &k);
        let dec = decrypt_share(&enc, &k);
        assert_eq!(dec.value, share.value);
        assert_eq!(dec.raw, share.value.to_u256());
    }

    #[test]
    fn ciphertext_equal_to_pad_decrypts_to_zero() {
        let a = KeyPair::generate(&mut rng(15));
        let b = KeyPair::generate(&mut rng(16));
        let k = derive_shared_key(&a.secret(), &b.public()).unwrap();
        let enc = EncryptedShare {
            issuer: 1,
            receiver: 2,
            ciphertext: derive_pad(&k, 2),
        };
        assert!(decrypt_share(&enc, &k).value.is_zero());
    }

    #[test]
    fn wrong_key_breaks_share_verification() {
        let issuer = KeyPair::generate(&mut rng(17));
        let receiver = KeyPair::generate(&mut rng(18));
        let eavesdropper = KeyPair::generate(&mut rng(19));

        let poly = SharePolynomial::generate(2, &mut rng(20)).unwrap();
        let commitments = poly.commit();
        let share = Share {
            issuer: 1,
            receiver: 2,
            value: poly.evaluate(2),
        };

        let good_key = derive_shared_key(&issuer.secret(), &receiver.public()).unwrap();
        let enc = encrypt_share(&share, &good_key);

        let bad_key = derive_shared_key(&eavesdropper.secret(), &receiver.public()).unwrap();
        let garbled = decrypt_share(&enc, &bad_key);
        assert!(!verify_share(&garbled.value, &commitments, 2));
    }

    #[test]
    fn encrypted_share_bytes_roundtrip() {
        let enc = EncryptedShare {
            issuer: 7,
            receiver: 260,
            ciphertext: U256::from_be_bytes(keccak256(b"ct")),
        };
        assert_eq!(EncryptedShare::from_bytes(&enc.to_bytes()).unwrap(), enc);
    }

    /// Golden vector frozen from an independent Keccak + curve
    /// implementation (tools/reference_vectors.py); pins the
    /// `encodePacked(uint256, uint256)` pad semantics byte-for-byte.
    #[test]
    fn golden_pad_and_ciphertext_vector() {
        let sk_i = Scalar::from_be_bytes(
            &hex::decode("00caf19c17c9bbd3964e95d55451f4b1a284b143244abfbc340b517de5abaa08")
                .unwrap(),
        )
        .unwrap();
        let sk_j = Scalar::from_be_bytes(
            &hex::decode("14d78c271507f7c505749630de7e06c797f786f370d4bf2504fdbdfdc7e4eeb4")
                .unwrap(),
        )
        .unwrap();
        let value = Scalar::from_be_bytes(
            &hex::decode("2319df19ceddda14f4aadad425d477513e793e756751759cbd84c702270f8e2f")
                .unwrap(),
        )
        .unwrap();

        let pk_j = G1Point::generator().mul_scalar(&sk_j);
        assert_eq!(
            pk_j.normalize().0,
            U256::from_hex("2d42ada792a9d4748b87bfa1aff703c7c3efabd590a24983c135b8e7428812b4")
                .unwrap()
        );

        let k = derive_shared_key(&sk_i, &pk_j).unwrap();
        assert_eq!(
            k.point().normalize().0,
            U256::from_hex("2211f2309dd221e85b2203e7813e2b4cdf74f26fa3f928b0c36636e9ce6810b9")
                .unwrap()
        );

        assert_eq!(
            derive_pad(&k, 3),
            U256::from_hex("f31d4036a68cb813fa8280af2176afc83c7bb9a1868a0590c9b55a824f4a5855")
                .unwrap()
        );

        let share = Share {
            issuer: 1,
            receiver: 3,
            value,
        };
        assert_eq!(
            encrypt_share(&share, &k).ciphertext,
            U256::from_hex("d0049f2f685162070e285a7b04a2d899020287d4e1db700c74319d806845d67a")
                .unwrap()
        );
    }
}
