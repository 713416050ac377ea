// SPDX-License-Identifier: Apache-2.0

//! A distributed key generation (DKG) toolkit mediated by a simulated
//! bulletin board.
//!
//! Participants deal Feldman-committed secret shares, encrypt them for
//! each receiver with a Diffie-Hellman derived Keccak-XOR pad, and post
//! everything to an append-only bulletin board that mirrors a smart
//! contract's verification logic. A receiver holding a bad share opens a
//! dispute by revealing the pairwise shared key together with a
//! Chaum-Pedersen DLEQ proof of its correctness; the board decrypts the
//! logged ciphertext, re-verifies it against the issuer's commitments,
//! and expels whichever party lied. Honest survivors aggregate their
//! received shares into additive key shares of the group secret.
//!
//! Modules:
//! - [`group_math`]: alt_bn128 G1 / scalar-field arithmetic, Keccak-256,
//!   `abi.encodePacked` packing.
//! - [`vss`]: share polynomials, Feldman commitments, share verification,
//!   Lagrange reconstruction.
//! - [`dleq`]: Chaum-Pedersen discrete-log-equality proofs with the
//!   EVM-compatible 12-word challenge encoding.
//! - [`share_channel`]: identity keys, pairwise DH keys, and the
//!   Keccak-XOR share encryption.
//! - [`bulletin`]: the simulated contract: phases, registrations,
//!   distribution hashes, dispute adjudication, transaction log.
//! - [`node`]: the participant state machine driving all phases.

pub mod bulletin;
pub mod dleq;
pub mod group_math;
pub mod node;
pub mod share_channel;
pub mod vss;

pub use bulletin::{Bulletin, BulletinError, DisputeEvent, Phase, TxBody, TxRecord, Verdict};
pub use dleq::DleqProof;
pub use group_math::{keccak256, pack_uint256, CurveParams, G1Point, NodeIndex, Scalar, U256};
pub use node::{DkgConfig, NodeState};
pub use share_channel::{EncryptedShare, KeyPair, SharedKey};
pub use vss::{CommitmentVector, Share, SharePolynomial};
