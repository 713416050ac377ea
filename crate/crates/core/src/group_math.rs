// SPDX-License-Identifier: Apache-2.0

//! Arithmetic for the alt_bn128 (BN254) G1 group and its scalar field,
//! plus the Keccak-256 / `abi.encodePacked` hashing used everywhere else.
//!
//! Conventions match the EVM precompiles at 0x06 / 0x07:
//! - the identity encodes and hashes as the affine pair `(0, 0)`,
//! - scalars serialize as 32-byte big-endian integers,
//! - points serialize as 64 bytes (affine `x || y`),
//! - scalar multiplication accepts full 256-bit unreduced integers.

use std::fmt;
use std::ops::{Add, BitXor, Mul, Neg, Sub};

use ark_bn254::{Fq, Fr, G1Affine, G1Projective};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, PrimeField, Zero};
use rand_core::RngCore;
use sha3::{Digest, Keccak256};
use thiserror::Error;

/// 1-based participant index, as used on the bulletin board.
pub type NodeIndex = u16;

pub const SCALAR_BYTES: usize = 32;
pub const POINT_BYTES: usize = 64;

/// Group order of G1 (the scalar field modulus q), big-endian.
const GROUP_ORDER_BE: [u8; 32] =
    hex_literal("30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001");
/// Base field modulus p, big-endian.
const FIELD_MODULUS_BE: [u8; 32] =
    hex_literal("30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47");

/// Affine coordinates of the auxiliary generator H1.
const AUX_GENERATOR_X: [u8; 32] =
    hex_literal("1581953bcf3ce078038fa19d974e26e4757a0e65573d9628ec8939bb77a6fd04");
const AUX_GENERATOR_Y: [u8; 32] =
    hex_literal("0b1fd6eda65bd4e6866a28bccfee143309bfb597378217a2002e5cac8cfe645f");

/// The G2 companion constant to H1, carried as opaque words (x.c0, x.c1,
/// y.c0, y.c1). No operation in this crate computes on it.
const AUX_G2_WORDS: [[u8; 32]; 4] = [
    hex_literal("14245f7ef31bc72385e2490579782910efc313b33c0ff49476230f21c8de17ce"),
    hex_literal("1f37ced0252f4e89975acf8473c86d390303289fdb9595b982d02185880d8795"),
    hex_literal("11b85d35c286c03ef9b6f14b8ab04c8646c28319259502ff6a63c7c6f1ac3873"),
    hex_literal("2fa557a218f5c8cb41968e5d7f802582b7eb6696400fb81b20295541af5577c5"),
];

/// Parses a fixed 64-char hex string at compile time.
const fn hex_literal(s: &str) -> [u8; 32] {
    const fn nibble(c: u8) -> u8 {
        match c {
            b'0'..=b'9' => c - b'0',
            b'a'..=b'f' => c - b'a' + 10,
            b'A'..=b'F' => c - b'A' + 10,
            _ => panic!("invalid hex digit"),
        }
    }
    let bytes = s.as_bytes();
    assert!(bytes.len() == 64, "expected 64 hex chars");
    let mut out = [0u8; 32];
    let mut i = 0;
    while i < 32 {
        out[i] = (nibble(bytes[2 * i]) << 4) | nibble(bytes[2 * i + 1]);
        i += 1;
    }
    out
}

/// Errors from decoding wire-format scalars, points, and hex strings.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("expected {expected} bytes, got {actual}")]
    InvalidLength { expected: usize, actual: usize },
    #[error("point coordinates are not on the curve")]
    NotOnCurve,
    #[error("coordinate is not a canonical field element")]
    NonCanonicalFieldElement,
    #[error("projective Z coordinate is zero")]
    ZeroProjectiveDenominator,
    #[error("invalid hex string")]
    InvalidHex,
}

// ---------------------------------------------------------------------------
// U256: raw 256-bit big-endian integers (hash outputs, pads, ciphertexts)
// ---------------------------------------------------------------------------

/// A 256-bit unsigned integer in big-endian byte order.
///
/// Used wherever the protocol manipulates full EVM words that are *not*
/// field elements: Keccak digests interpreted as integers, XOR pads,
/// ciphertexts, and unreduced DLEQ challenges.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct U256([u8; 32]);

impl U256 {
    pub const ZERO: U256 = U256([0u8; 32]);

    pub const fn from_be_bytes(bytes: [u8; 32]) -> Self {
        U256(bytes)
    }

    pub const fn to_be_bytes(self) -> [u8; 32] {
        self.0
    }

    pub fn from_u64(v: u64) -> Self {
        let mut out = [0u8; 32];
        out[24..].copy_from_slice(&v.to_be_bytes());
        U256(out)
    }

    pub fn from_be_slice(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != 32 {
            return Err(CodecError::InvalidLength {
                expected: 32,
                actual: bytes.len(),
            });
        }
        let mut out = [0u8; 32];
        out.copy_from_slice(bytes);
        Ok(U256(out))
    }

    /// Parses `0x`-prefixed or bare hex of exactly 32 bytes.
    pub fn from_hex(s: &str) -> Result<Self, CodecError> {
        let raw = s.strip_prefix("0x").unwrap_or(s);
        let bytes = hex::decode(raw).map_err(|_| CodecError::InvalidHex)?;
        Self::from_be_slice(&bytes)
    }

    pub fn is_zero(self) -> bool {
        self.0 == [0u8; 32]
    }

    /// Little-endian u64 limbs, the layout scalar multiplication consumes.
    pub fn to_limbs_le(self) -> [u64; 4] {
        let mut limbs = [0u64; 4];
        for (i, limb) in limbs.iter_mut().enumerate() {
            let mut chunk = [0u8; 8];
            chunk.copy_from_slice(&self.0[32 - 8 * (i + 1)..32 - 8 * i]);
            *limb = u64::from_be_bytes(chunk);
        }
        limbs
    }
}

impl BitXor for U256 {
    type Output = U256;

    fn bitxor(self, rhs: U256) -> U256 {
        let mut out = [0u8; 32];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(rhs.0.iter())) {
            *o = a ^ b;
        }
        U256(out)
    }
}

impl fmt::Display for U256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for U256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U256({self})")
    }
}

// ---------------------------------------------------------------------------
// Scalar: elements of Z_q
// ---------------------------------------------------------------------------

/// An element of the scalar field Z_q (q = the G1 group order).
///
/// Every constructor reduces mod q, so a `Scalar` is always canonical.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Scalar(Fr);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Fr::zero())
    }

    pub fn one() -> Self {
        Scalar(Fr::from(1u64))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Draws a uniform element of `[0, q)` from the given source.
    ///
    /// Deterministic for a fixed seed: consumes exactly 64 bytes and
    /// reduces them as a big-endian integer (bias < 2^-250).
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        Scalar(Fr::from_be_bytes_mod_order(&wide))
    }

    /// Interprets a 256-bit word as an integer and reduces it mod q.
    pub fn from_u256(v: U256) -> Self {
        Scalar(Fr::from_be_bytes_mod_order(&v.to_be_bytes()))
    }

    /// The canonical value as a 256-bit word (always < q).
    pub fn to_u256(self) -> U256 {
        U256::from_be_bytes(self.to_be_bytes())
    }

    pub fn to_be_bytes(self) -> [u8; 32] {
        let bytes = self.0.into_bigint().to_bytes_be();
        let mut out = [0u8; 32];
        out[32 - bytes.len()..].copy_from_slice(&bytes);
        out
    }

    /// Decodes a 32-byte big-endian integer, reducing mod q.
    pub fn from_be_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != 32 {
            return Err(CodecError::InvalidLength {
                expected: 32,
                actual: bytes.len(),
            });
        }
        Ok(Scalar(Fr::from_be_bytes_mod_order(bytes)))
    }

    pub fn inverse(&self) -> Option<Scalar> {
        self.0.inverse().map(Scalar)
    }

    pub(crate) fn into_inner(self) -> Fr {
        self.0
    }
}

impl From<u64> for Scalar {
    fn from(v: u64) -> Self {
        Scalar(Fr::from(v))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.to_u256())
    }
}

// ---------------------------------------------------------------------------
// G1Point
// ---------------------------------------------------------------------------

/// A point on the alt_bn128 G1 curve (y^2 = x^3 + 3 over F_p), including
/// the identity element.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct G1Point(G1Projective);

impl G1Point {
    pub fn identity() -> Self {
        G1Point(G1Projective::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    /// The standard generator, affine (1, 2).
    pub fn generator() -> Self {
        G1Point(G1Projective::generator())
    }

    /// Scalar multiplication by a canonical field element.
    pub fn mul_scalar(&self, k: &Scalar) -> Self {
        G1Point(self.0 * k.into_inner())
    }

    /// Scalar multiplication by a full 256-bit integer, reduced mod q
    /// internally (the group order annihilates the difference).
    pub fn mul_u256(&self, k: &U256) -> Self {
        G1Point(self.0.mul_bigint(k.to_limbs_le()))
    }

    /// Unique affine coordinates as 256-bit words; the identity
    /// normalizes to `(0, 0)`.
    pub fn normalize(&self) -> (U256, U256) {
        match self.0.into_affine().xy() {
            Some((x, y)) => (fq_to_u256(x), fq_to_u256(y)),
            None => (U256::ZERO, U256::ZERO),
        }
    }

    /// 64-byte encoding: affine `x || y`, each 32-byte big-endian.
    pub fn to_bytes(&self) -> [u8; POINT_BYTES] {
        let (x, y) = self.normalize();
        let mut out = [0u8; POINT_BYTES];
        out[..32].copy_from_slice(&x.to_be_bytes());
        out[32..].copy_from_slice(&y.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != POINT_BYTES {
            return Err(CodecError::InvalidLength {
                expected: POINT_BYTES,
                actual: bytes.len(),
            });
        }
        let x = U256::from_be_slice(&bytes[..32])?;
        let y = U256::from_be_slice(&bytes[32..])?;
        Self::from_affine_words(x, y)
    }

    /// Builds a point from homogeneous projective words, affine = (X/Z, Y/Z).
    ///
    /// This is the triple layout that py_ecc-style tooling prints; Z must
    /// be nonzero (the identity is spelled as affine `(0, 0)` instead).
    pub fn from_projective_words(x: U256, y: U256, z: U256) -> Result<Self, CodecError> {
        let z_inv = fq_from_u256(z)?
            .inverse()
            .ok_or(CodecError::ZeroProjectiveDenominator)?;
        let x = fq_from_u256(x)? * z_inv;
        let y = fq_from_u256(y)? * z_inv;
        Self::from_affine_words(fq_to_u256(x), fq_to_u256(y))
    }

    /// Builds a point from affine words; `(0, 0)` decodes to the identity.
    pub fn from_affine_words(x: U256, y: U256) -> Result<Self, CodecError> {
        if x.is_zero() && y.is_zero() {
            return Ok(Self::identity());
        }
        let x = fq_from_u256(x)?;
        let y = fq_from_u256(y)?;
        let affine = G1Affine::new_unchecked(x, y);
        // G1 has cofactor 1, so on-curve implies in-subgroup.
        if !affine.is_on_curve() {
            return Err(CodecError::NotOnCurve);
        }
        Ok(G1Point(affine.into()))
    }
}

impl Add for G1Point {
    type Output = G1Point;
    fn add(self, rhs: G1Point) -> G1Point {
        G1Point(self.0 + rhs.0)
    }
}

impl Neg for G1Point {
    type Output = G1Point;
    fn neg(self) -> G1Point {
        G1Point(-self.0)
    }
}

impl fmt::Debug for G1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.normalize();
        write!(f, "G1Point({x}, {y})")
    }
}

fn fq_to_u256(v: Fq) -> U256 {
    let bytes = v.into_bigint().to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    U256::from_be_bytes(out)
}

fn fq_from_u256(v: U256) -> Result<Fq, CodecError> {
    let bytes = v.to_be_bytes();
    if bytes >= FIELD_MODULUS_BE {
        return Err(CodecError::NonCanonicalFieldElement);
    }
    Ok(Fq::from_be_bytes_mod_order(&bytes))
}

// ---------------------------------------------------------------------------
// Curve parameters
// ---------------------------------------------------------------------------

/// The fixed protocol parameters: moduli, the two G1 generators, and the
/// opaque G2 companion words.
#[derive(Clone, Debug)]
pub struct CurveParams {
    /// Base field modulus p.
    pub p: U256,
    /// G1 group order q.
    pub q: U256,
    /// Standard generator.
    pub g1: G1Point,
    /// Auxiliary generator used by the DLEQ known-answer vectors.
    pub h1: G1Point,
    /// Companion G2 constant, stored but never operated on.
    pub h2: [U256; 4],
}

impl CurveParams {
    pub fn standard() -> Self {
        CurveParams {
            p: U256::from_be_bytes(FIELD_MODULUS_BE),
            q: U256::from_be_bytes(GROUP_ORDER_BE),
            g1: G1Point::generator(),
            h1: aux_generator(),
            h2: AUX_G2_WORDS.map(U256::from_be_bytes),
        }
    }
}

/// The auxiliary G1 generator H1.
pub fn aux_generator() -> G1Point {
    G1Point::from_affine_words(
        U256::from_be_bytes(AUX_GENERATOR_X),
        U256::from_be_bytes(AUX_GENERATOR_Y),
    )
    .expect("hard-coded auxiliary generator is on the curve")
}

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

/// Keccak-256 with the original (pre-NIST) padding, as used by the EVM.
pub fn keccak256(data: &[u8]) -> [u8; 32] {
    let mut hasher = Keccak256::new();
    hasher.update(data);
    hasher.finalize().into()
}

/// `abi.encodePacked` for a sequence of uint256 words: each value as
/// 32-byte big-endian, concatenated with no separators.
pub fn pack_uint256(values: &[U256]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 32);
    for v in values {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}
