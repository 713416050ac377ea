// SPDX-License-Identifier: Apache-2.0

//! The simulated on-chain bulletin board.
//!
//! A single logical writer applies transactions in order: registrations,
//! share distributions (stored as a Keccak hash commitment, with the full
//! payload in the event log, mirroring calldata/event economics), dispute
//! adjudications, and phase advances. Every state transition is a pure
//! function of the transaction sequence, so replaying a log reproduces
//! the state bit for bit.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dleq::{self, DleqProof};
use crate::group_math::{keccak256, G1Point, NodeIndex, U256};
use crate::share_channel::{
    decrypt_share, derive_pad, EncryptedShare, SharedKey, ENCRYPTED_SHARE_BYTES,
};
use crate::vss::{verify_share, CommitmentVector};

pub const ZERO_HASH: [u8; 32] = [0u8; 32];

/// Protocol phases, advanced only forward by the simulator clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Registration,
    ShareDistribution,
    Dispute,
    KeyDerivation,
    Finished,
}

impl Phase {
    pub fn successor(self) -> Option<Phase> {
        match self {
            Phase::Registration => Some(Phase::ShareDistribution),
            Phase::ShareDistribution => Some(Phase::Dispute),
            Phase::Dispute => Some(Phase::KeyDerivation),
            Phase::KeyDerivation => Some(Phase::Finished),
            Phase::Finished => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Registration => "registration",
            Phase::ShareDistribution => "share_distribution",
            Phase::Dispute => "dispute",
            Phase::KeyDerivation => "key_derivation",
            Phase::Finished => "finished",
        }
    }

    pub fn from_str_name(s: &str) -> Option<Phase> {
        match s {
            "registration" => Some(Phase::Registration),
            "share_distribution" => Some(Phase::ShareDistribution),
            "dispute" => Some(Phase::Dispute),
            "key_derivation" => Some(Phase::KeyDerivation),
            "finished" => Some(Phase::Finished),
            _ => None,
        }
    }

    fn code(self) -> u8 {
        match self {
            Phase::Registration => 0,
            Phase::ShareDistribution => 1,
            Phase::Dispute => 2,
            Phase::KeyDerivation => 3,
            Phase::Finished => 4,
        }
    }

    fn from_code(code: u8) -> Option<Phase> {
        match code {
            0 => Some(Phase::Registration),
            1 => Some(Phase::ShareDistribution),
            2 => Some(Phase::Dispute),
            3 => Some(Phase::KeyDerivation),
            4 => Some(Phase::Finished),
            _ => None,
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of an adjudicated dispute, decided by the board alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The logged share really fails verification: the issuer is expelled.
    IssuerExpelled,
    /// The share verifies, so the dispute was false: the disputer is expelled.
    DisputerExpelled,
    /// The DLEQ proof is invalid; nothing can be concluded.
    Rejected,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::IssuerExpelled => "issuer_expelled",
            Verdict::DisputerExpelled => "disputer_expelled",
            Verdict::Rejected => "rejected",
        }
    }

    fn code(self) -> u8 {
        match self {
            Verdict::IssuerExpelled => 0,
            Verdict::DisputerExpelled => 1,
            Verdict::Rejected => 2,
        }
    }

    fn from_code(code: u8) -> Option<Verdict> {
        match code {
            0 => Some(Verdict::IssuerExpelled),
            1 => Some(Verdict::DisputerExpelled),
            2 => Some(Verdict::Rejected),
            _ => None,
        }
    }
}

/// An adjudicated dispute as it appears in the dispute log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisputeEvent {
    pub disputer: NodeIndex,
    pub issuer: NodeIndex,
    pub shared_key: G1Point,
    pub proof: DleqProof,
    pub verdict: Verdict,
    pub tx_index: u64,
}

/// One logged transaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TxRecord {
    pub tx_index: u64,
    /// Phase in force when the transaction executed.
    pub phase: Phase,
    /// Submitting node; 0 for the simulator clock.
    pub sender: NodeIndex,
    pub body: TxBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TxBody {
    Register {
        pk: G1Point,
    },
    DistributeShares {
        encrypted: Vec<EncryptedShare>,
        commitments: CommitmentVector,
    },
    SubmitDispute {
        issuer: NodeIndex,
        shared_key: G1Point,
        proof: DleqProof,
        /// Filled in by the board when the dispute is adjudicated.
        verdict: Verdict,
    },
    AdvancePhase {
        to: Phase,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PayloadError {
    #[error("unknown transaction kind {0:?}")]
    UnknownKind(String),
    #[error("payload is truncated or has trailing bytes")]
    Malformed,
    #[error("invalid point or word encoding: {0}")]
    Codec(#[from] crate::group_math::CodecError),
}

impl TxBody {
    pub fn kind(&self) -> &'static str {
        match self {
            TxBody::Register { .. } => "register",
            TxBody::DistributeShares { .. } => "distribute_shares",
            TxBody::SubmitDispute { .. } => "submit_dispute",
            TxBody::AdvancePhase { .. } => "advance_phase",
        }
    }

    /// Byte payload for the exported event log.
    pub fn to_payload(&self) -> Vec<u8> {
        match self {
            TxBody::Register { pk } => pk.to_bytes().to_vec(),
            TxBody::DistributeShares {
                encrypted,
                commitments,
            } => {
                let mut out = Vec::new();
                out.extend_from_slice(&(encrypted.len() as u16).to_be_bytes());
                for share in encrypted {
                    out.extend_from_slice(&share.to_bytes());
                }
                out.extend_from_slice(&(commitments.len() as u16).to_be_bytes());
                for point in commitments.points() {
                    out.extend_from_slice(&point.to_bytes());
                }
                out
            }
            TxBody::SubmitDispute {
                issuer,
                shared_key,
                proof,
                verdict,
            } => {
                let mut out = Vec::new();
                out.extend_from_slice(&issuer.to_be_bytes());
                out.extend_from_slice(&shared_key.to_bytes());
                out.extend_from_slice(&proof.to_bytes());
                out.push(verdict.code());
                out
            }
            TxBody::AdvancePhase { to } => vec![to.code()],
        }
    }

    pub fn from_payload(kind: &str, bytes: &[u8]) -> Result<TxBody, PayloadError> {
        match kind {
            "register" => {
                let pk = G1Point::from_bytes(bytes)?;
                Ok(TxBody::Register { pk })
            }
            "distribute_shares" => {
                let mut cursor = Cursor { bytes, pos: 0 };
                let share_count = cursor.take_u16()? as usize;
                let mut encrypted = Vec::with_capacity(share_count);
                for _ in 0..share_count {
                    encrypted.push(EncryptedShare::from_bytes(
                        cursor.take(ENCRYPTED_SHARE_BYTES)?,
                    )?);
                }
                let commitment_count = cursor.take_u16()? as usize;
                let mut points = Vec::with_capacity(commitment_count);
                for _ in 0..commitment_count {
                    points.push(G1Point::from_bytes(cursor.take(64)?)?);
                }
                cursor.finish()?;
                Ok(TxBody::DistributeShares {
                    encrypted,
                    commitments: CommitmentVector::from_points(points),
                })
            }
            "submit_dispute" => {
                let mut cursor = Cursor { bytes, pos: 0 };
                let issuer = cursor.take_u16()?;
                let shared_key = G1Point::from_bytes(cursor.take(64)?)?;
                let proof = DleqProof::from_bytes(cursor.take(64)?)?;
                let verdict =
                    Verdict::from_code(cursor.take(1)?[0]).ok_or(PayloadError::Malformed)?;
                cursor.finish()?;
                Ok(TxBody::SubmitDispute {
                    issuer,
                    shared_key,
                    proof,
                    verdict,
                })
            }
            "advance_phase" => {
                if bytes.len() != 1 {
                    return Err(PayloadError::Malformed);
                }
                let to = Phase::from_code(bytes[0]).ok_or(PayloadError::Malformed)?;
                Ok(TxBody::AdvancePhase { to })
            }
            other => Err(PayloadError::UnknownKind(other.to_string())),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], PayloadError> {
        if self.pos + len > self.bytes.len() {
            return Err(PayloadError::Malformed);
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn take_u16(&mut self) -> Result<u16, PayloadError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn finish(self) -> Result<(), PayloadError> {
        if self.pos != self.bytes.len() {
            return Err(PayloadError::Malformed);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BulletinError {
    #[error("operation not allowed in phase {actual}")]
    WrongPhase { actual: Phase },
    #[error("node {0} is outside the configured index range")]
    InvalidNodeIndex(NodeIndex),
    #[error("node {0} is already registered")]
    DuplicateRegistration(NodeIndex),
    #[error("public key is invalid")]
    InvalidPublicKey,
    #[error("node {0} is not registered")]
    NotRegistered(NodeIndex),
    #[error("malformed distribution payload: {0}")]
    MalformedPayload(String),
    #[error("node {0} already distributed shares")]
    AlreadyDistributed(NodeIndex),
    #[error("unknown party {0}")]
    UnknownParty(NodeIndex),
    #[error("no shares on record from issuer {issuer} to receiver {receiver}")]
    NoSharesOnRecord {
        issuer: NodeIndex,
        receiver: NodeIndex,
    },
    #[error("the phase machine already finished")]
    AlreadyFinished,
    #[error("the qualified set is empty")]
    EmptyQualifiedSet,
    #[error("invalid parameters: need 1 <= t < n, got n={n}, t={t}")]
    InvalidParameters { n: u16, t: usize },
}

/// The board state: maps keyed by node index plus the ordered log.
#[derive(Clone, Debug)]
pub struct Bulletin {
    n: u16,
    t: usize,
    phase: Phase,
    registrations: BTreeMap<NodeIndex, G1Point>,
    share_distribution_hashes: BTreeMap<NodeIndex, [u8; 32]>,
    commitments_log: BTreeMap<NodeIndex, CommitmentVector>,
    encrypted_shares_log: BTreeMap<NodeIndex, Vec<EncryptedShare>>,
    dispute_log: Vec<DisputeEvent>,
    expelled: BTreeSet<NodeIndex>,
    tx_counter: u64,
    log: Vec<TxRecord>,
}

impl Bulletin {
    pub fn new(n: u16, t: usize) -> Result<Self, BulletinError> {
        if t < 1 || usize::from(n) <= t {
            return Err(BulletinError::InvalidParameters { n, t });
        }
        Ok(Bulletin {
            n,
            t,
            phase: Phase::Registration,
            registrations: BTreeMap::new(),
            share_distribution_hashes: BTreeMap::new(),
            commitments_log: BTreeMap::new(),
            encrypted_shares_log: BTreeMap::new(),
            dispute_log: Vec::new(),
            expelled: BTreeSet::new(),
            tx_counter: 0,
            log: Vec::new(),
        })
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn registration(&self, node: NodeIndex) -> Option<G1Point> {
        self.registrations.get(&node).copied()
    }

    pub fn registrations(&self) -> &BTreeMap<NodeIndex, G1Point> {
        &self.registrations
    }

    pub fn share_distribution_hash(&self, node: NodeIndex) -> Option<[u8; 32]> {
        self.share_distribution_hashes.get(&node).copied()
    }

    pub fn commitments_of(&self, node: NodeIndex) -> Option<&CommitmentVector> {
        self.commitments_log.get(&node)
    }

    pub fn encrypted_shares_of(&self, node: NodeIndex) -> Option<&[EncryptedShare]> {
        self.encrypted_shares_log.get(&node).map(Vec::as_slice)
    }

    /// The logged ciphertext from `issuer` to `receiver`, if any.
    pub fn ciphertext_for(&self, issuer: NodeIndex, receiver: NodeIndex) -> Option<EncryptedShare> {
        self.encrypted_shares_log
            .get(&issuer)?
            .iter()
            .find(|s| s.receiver == receiver)
            .copied()
    }

    pub fn dispute_log(&self) -> &[DisputeEvent] {
        &self.dispute_log
    }

    pub fn expelled(&self) -> &BTreeSet<NodeIndex> {
        &self.expelled
    }

    pub fn tx_counter(&self) -> u64 {
        self.tx_counter
    }

    /// All transactions with `tx_index >= since_tx`, in order.
    pub fn read_events(&self, since_tx: u64) -> &[TxRecord] {
        let start = (since_tx as usize).min(self.log.len());
        &self.log[start..]
    }

    fn append(&mut self, sender: NodeIndex, body: TxBody) -> u64 {
        let tx_index = self.tx_counter;
        self.log.push(TxRecord {
            tx_index,
            phase: self.phase,
            sender,
            body,
        });
        self.tx_counter += 1;
        tx_index
    }

    fn require_phase(&self, phase: Phase) -> Result<(), BulletinError> {
        if self.phase != phase {
            return Err(BulletinError::WrongPhase { actual: self.phase });
        }
        Ok(())
    }

    /// Publishes a node's identity key.
    pub fn register(&mut self, node: NodeIndex, pk: G1Point) -> Result<u64, BulletinError> {
        self.require_phase(Phase::Registration)?;
        if node == 0 || node > self.n {
            return Err(BulletinError::InvalidNodeIndex(node));
        }
        if self.registrations.contains_key(&node) {
            return Err(BulletinError::DuplicateRegistration(node));
        }
        if pk.is_identity() {
            return Err(BulletinError::InvalidPublicKey);
        }
        self.registrations.insert(node, pk);
        Ok(self.append(node, TxBody::Register { pk }))
    }

    /// Commits an issuer's encrypted shares and Feldman commitments.
    ///
    /// The board stores `keccak256(shares || commitments)`; the payload
    /// itself lives in the event log.
    pub fn distribute_shares(
        &mut self,
        issuer: NodeIndex,
        encrypted: Vec<EncryptedShare>,
        commitments: CommitmentVector,
    ) -> Result<u64, BulletinError> {
        self.require_phase(Phase::ShareDistribution)?;
        if !self.registrations.contains_key(&issuer) {
            return Err(BulletinError::NotRegistered(issuer));
        }
        if self.share_distribution_hashes.contains_key(&issuer) {
            return Err(BulletinError::AlreadyDistributed(issuer));
        }
        if encrypted.len() != usize::from(self.n) - 1 {
            return Err(BulletinError::MalformedPayload(format!(
                "expected {} encrypted shares, got {}",
                self.n - 1,
                encrypted.len()
            )));
        }
        let mut receivers = BTreeSet::new();
        for share in &encrypted {
            if share.issuer != issuer {
                return Err(BulletinError::MalformedPayload(format!(
                    "share labeled with foreign issuer {}",
                    share.issuer
                )));
            }
            if share.receiver == 0 || share.receiver > self.n || share.receiver == issuer {
                return Err(BulletinError::MalformedPayload(format!(
                    "invalid receiver {}",
                    share.receiver
                )));
            }
            if !receivers.insert(share.receiver) {
                return Err(BulletinError::MalformedPayload(format!(
                    "duplicate receiver {}",
                    share.receiver
                )));
            }
        }
        if commitments.len() != self.t + 1 {
            return Err(BulletinError::MalformedPayload(format!(
                "expected {} commitments, got {}",
                self.t + 1,
                commitments.len()
            )));
        }

        let hash = distribution_hash(&encrypted, &commitments);
        self.share_distribution_hashes.insert(issuer, hash);
        self.commitments_log.insert(issuer, commitments.clone());
        self.encrypted_shares_log.insert(issuer, encrypted.clone());
        Ok(self.append(
            issuer,
            TxBody::DistributeShares {
                encrypted,
                commitments,
            },
        ))
    }

    /// Adjudicates a dispute on-board and logs the verdict.
    ///
    /// The disputer reveals the pairwise shared key plus a DLEQ proof that
    /// it really is `sk_disputer * pk_issuer`. If the proof holds, the
    /// board decrypts the logged ciphertext with the revealed key and
    /// re-runs share verification: a failing share expels the issuer
    /// (zeroing its distribution hash), a passing one expels the
    /// disputer.
    pub fn submit_dispute(
        &mut self,
        disputer: NodeIndex,
        issuer: NodeIndex,
        shared_key: G1Point,
        proof: DleqProof,
    ) -> Result<Verdict, BulletinError> {
        self.require_phase(Phase::Dispute)?;
        let pk_disputer = self
            .registrations
            .get(&disputer)
            .copied()
            .ok_or(BulletinError::UnknownParty(disputer))?;
        let pk_issuer = self
            .registrations
            .get(&issuer)
            .copied()
            .ok_or(BulletinError::UnknownParty(issuer))?;
        if !self.share_distribution_hashes.contains_key(&issuer) {
            return Err(BulletinError::NoSharesOnRecord {
                issuer,
                receiver: disputer,
            });
        }
        let ciphertext =
            self.ciphertext_for(issuer, disputer)
                .ok_or(BulletinError::NoSharesOnRecord {
                    issuer,
                    receiver: disputer,
                })?;
        let commitments = self
            .commitments_log
            .get(&issuer)
            .expect("commitments recorded alongside the distribution hash");

        let verdict = adjudicate_dispute(
            &pk_disputer,
            &pk_issuer,
            &shared_key,
            &proof,
            ciphertext.ciphertext,
            commitments,
            disputer,
        );

        match verdict {
            Verdict::IssuerExpelled => {
                self.share_distribution_hashes.insert(issuer, ZERO_HASH);
                self.expelled.insert(issuer);
            }
            Verdict::DisputerExpelled => {
                self.expelled.insert(disputer);
            }
            Verdict::Rejected => {}
        }

        let tx_index = self.append(
            disputer,
            TxBody::SubmitDispute {
                issuer,
                shared_key,
                proof,
                verdict,
            },
        );
        self.dispute_log.push(DisputeEvent {
            disputer,
            issuer,
            shared_key,
            proof,
            verdict,
            tx_index,
        });
        Ok(verdict)
    }

    /// Moves the phase machine one step forward.
    pub fn advance_phase(&mut self) -> Result<Phase, BulletinError> {
        let next = self
            .phase
            .successor()
            .ok_or(BulletinError::AlreadyFinished)?;
        self.append(0, TxBody::AdvancePhase { to: next });
        self.phase = next;
        Ok(next)
    }

    /// Registered nodes that distributed shares and were never expelled.
    pub fn qualified_set(&self) -> Result<BTreeSet<NodeIndex>, BulletinError> {
        if self.phase < Phase::KeyDerivation {
            return Err(BulletinError::WrongPhase { actual: self.phase });
        }
        Ok(self
            .share_distribution_hashes
            .iter()
            .filter(|(node, hash)| **hash != ZERO_HASH && !self.expelled.contains(node))
            .map(|(node, _)| *node)
            .collect())
    }

    /// The group public key: the sum of qualified constant-term commitments.
    pub fn master_public_key(&self) -> Result<G1Point, BulletinError> {
        let qualified = self.qualified_set()?;
        if qualified.is_empty() {
            return Err(BulletinError::EmptyQualifiedSet);
        }
        Ok(qualified
            .iter()
            .map(|node| self.commitments_log[node].points()[0])
            .fold(G1Point::identity(), |acc, c| acc + c))
    }

    /// The public key share of `node`: `sum_{i in QUAL} F_i(node)`.
    pub fn public_key_share(&self, node: NodeIndex) -> Result<G1Point, BulletinError> {
        let qualified = self.qualified_set()?;
        if qualified.is_empty() {
            return Err(BulletinError::EmptyQualifiedSet);
        }
        Ok(qualified
            .iter()
            .map(|issuer| self.commitments_log[issuer].evaluate_at(node))
            .fold(G1Point::identity(), |acc, c| acc + c))
    }
}

/// The hash stored on-board for a distribution: Keccak-256 over the raw
/// concatenation of the encoded shares followed by the encoded commitments.
pub fn distribution_hash(encrypted: &[EncryptedShare], commitments: &CommitmentVector) -> [u8; 32] {
    let mut data =
        Vec::with_capacity(encrypted.len() * ENCRYPTED_SHARE_BYTES + commitments.len() * 64);
    for share in encrypted {
        data.extend_from_slice(&share.to_bytes());
    }
    for point in commitments.points() {
        data.extend_from_slice(&point.to_bytes());
    }
    keccak256(&data)
}

/// The verdict function shared by the board and by nodes re-checking
/// dispute events: DLEQ first, then decrypt-and-verify.
pub fn adjudicate_dispute(
    pk_disputer: &G1Point,
    pk_issuer: &G1Point,
    shared_key: &G1Point,
    proof: &DleqProof,
    ciphertext: U256,
    commitments: &CommitmentVector,
    disputer: NodeIndex,
) -> Verdict {
    let proof_ok = dleq::verify(
        &G1Point::generator(),
        pk_disputer,
        pk_issuer,
        shared_key,
        proof,
    );
    if !proof_ok {
        return Verdict::Rejected;
    }
    let key = SharedKey::from_point(*shared_key);
    let pad = derive_pad(&key, disputer);
    let decrypted = decrypt_share(
        &EncryptedShare {
            issuer: 0,
            receiver: disputer,
            ciphertext,
        },
        &key,
    );
    debug_assert_eq!(decrypted.raw, ciphertext ^ pad);
    if verify_share(&decrypted.value, commitments, disputer) {
        Verdict::DisputerExpelled
    } else {
        Verdict::IssuerExpelled
    }
}
