// SPDX-License-Identifier: Apache-2.0

//! Chaum-Pedersen proofs of discrete-log equality.
//!
//! A proof `(c, r)` convinces a verifier that the prover knows `alpha`
//! with `y1 = alpha * x1` and `y2 = alpha * x2`, without revealing it.
//! The challenge is the Keccak-256 of the twelve packed uint256 affine
//! coordinates `(a1, a2, x1, y1, x2, y2)`, the exact encoding an
//! on-chain verifier recomputes with `abi.encodePacked`, and is compared
//! as a full 256-bit word, never reduced mod q.

use rand_core::RngCore;
use thiserror::Error;

use crate::group_math::{keccak256, pack_uint256, CodecError, G1Point, Scalar, U256};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DleqError {
    #[error("statement contains the identity point")]
    IdentityInput,
}

/// A discrete-log-equality proof: the unreduced 256-bit challenge `c`
/// and the response `r = w - alpha * c mod q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DleqProof {
    pub challenge: U256,
    pub response: Scalar,
}

impl DleqProof {
    /// 64-byte wire form `c || r`, matching a `uint256[2]` proof layout.
    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(&self.challenge.to_be_bytes());
        out[32..].copy_from_slice(&self.response.to_be_bytes());
        out
    }

    /// Decodes `c || r`; the response word is reduced mod q, as a
    /// uint256-consuming verifier would implicitly do.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != 64 {
            return Err(CodecError::InvalidLength {
                expected: 64,
                actual: bytes.len(),
            });
        }
        Ok(DleqProof {
            challenge: U256::from_be_slice(&bytes[..32])?,
            response: Scalar::from_be_bytes(&bytes[32..])?,
        })
    }
}

/// The Fiat-Shamir challenge over the packed affine coordinates of
/// `(a1, a2, x1, y1, x2, y2)`, as an unreduced 256-bit integer.
pub fn challenge(
    a1: &G1Point,
    a2: &G1Point,
    x1: &G1Point,
    y1: &G1Point,
    x2: &G1Point,
    y2: &G1Point,
) -> U256 {
    let mut words = Vec::with_capacity(12);
    for point in [a1, a2, x1, y1, x2, y2] {
        let (x, y) = point.normalize();
        words.push(x);
        words.push(y);
    }
    U256::from_be_bytes(keccak256(&pack_uint256(&words)))
}

/// Proves knowledge of `alpha` such that `y1 = alpha * x1` and
/// `y2 = alpha * x2`. Identity points are rejected: they make the
/// statement degenerate.
pub fn prove<R: RngCore + ?Sized>(
    x1: &G1Point,
    y1: &G1Point,
    x2: &G1Point,
    y2: &G1Point,
    alpha: &Scalar,
    rng: &mut R,
) -> Result<DleqProof, DleqError> {
    if [x1, y1, x2, y2].iter().any(|p| p.is_identity()) {
        return Err(DleqError::IdentityInput);
    }
    let w = Scalar::random(rng);
    let a1 = x1.mul_scalar(&w);
    let a2 = x2.mul_scalar(&w);
    let c = challenge(&a1, &a2, x1, y1, x2, y2);
    // r = w - alpha * c mod q; only c mod q enters the group equation the
    // verifier checks, so reducing here changes nothing downstream.
    let r = w - *alpha * Scalar::from_u256(c);
    Ok(DleqProof {
        challenge: c,
        response: r,
    })
}

/// Recomputes `a1 = r * x1 + c * y1`, `a2 = r * x2 + c * y2` and accepts
/// iff the challenge over them equals `proof.challenge` bit for bit.
pub fn verify(x1: &G1Point, y1: &G1Point, x2: &G1Point, y2: &G1Point, proof: &DleqProof) -> bool {
    let a1 = x1.mul_scalar(&proof.response) + y1.mul_u256(&proof.challenge);
    let a2 = x2.mul_scalar(&proof.response) + y2.mul_u256(&proof.challenge);
    challenge(&a1, &a2, x1, y1, x2, y2) == proof.challenge
}
