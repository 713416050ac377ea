// SPDX-License-Identifier: Apache-2.0

//! The DKG participant state machine.
//!
//! A node walks the board's phases in order: it registers an identity
//! key, deals an encrypted share to every peer, loads and verifies the
//! shares dealt to it, disputes issuers whose shares fail, re-checks
//! every dispute the board adjudicated, and finally folds the qualified
//! shares into its additive key share.
//!
//! All randomness flows from a per-node generator seeded with
//! `keccak256(scenario_seed || node_index)`, so a scenario replays
//! identically from its configuration.

use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use thiserror::Error;

use crate::bulletin::{adjudicate_dispute, Bulletin, BulletinError, Phase, Verdict};
use crate::dleq::{self, DleqError};
use crate::group_math::{keccak256, G1Point, NodeIndex, Scalar};
use crate::share_channel::{
    decrypt_share, derive_shared_key, encrypt_share, ChannelError, EncryptedShare, KeyPair,
};
use crate::vss::{verify_share, CommitmentVector, Share, SharePolynomial};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NodeError {
    #[error("invalid config: need 1 <= t < n, got n={n}, t={t}")]
    InvalidConfig { n: u16, t: usize },
    #[error("node index {0} is outside [1, n]")]
    InvalidIndex(NodeIndex),
    #[error("node has no identity keys yet (register first)")]
    MissingKeys,
    #[error("no public key on the board for peer {0}")]
    MissingPeerKey(NodeIndex),
    #[error("the dispute phase has not ended yet")]
    DisputePhaseOpen,
    #[error("self-check of an outgoing dispute proof failed")]
    ProofSelfCheck,
    #[error("qualified issuer {0} has no valid share at this node")]
    MissingQualifiedShare(NodeIndex),
    #[error("derived key share disagrees with the public commitments")]
    InconsistentShare,
    #[error(transparent)]
    Bulletin(#[from] BulletinError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Dleq(#[from] DleqError),
}

/// Scenario-wide parameters every node shares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DkgConfig {
    pub n: u16,
    pub t: usize,
    pub seed: u64,
}

impl DkgConfig {
    pub fn new(n: u16, t: usize, seed: u64) -> Result<Self, NodeError> {
        if t < 1 || t >= usize::from(n) {
            return Err(NodeError::InvalidConfig { n, t });
        }
        Ok(DkgConfig { n, t, seed })
    }
}

/// How a received share fared under verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShareStatus {
    Valid,
    Invalid,
}

/// What a node recorded for one issuer after loading shares; `value` is
/// absent when the issuer never distributed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReceivedShare {
    pub value: Option<Scalar>,
    pub status: ShareStatus,
}

/// A node's independent re-verification of one logged dispute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DisputeReview {
    pub tx_index: u64,
    pub disputer: NodeIndex,
    pub issuer: NodeIndex,
    pub board_verdict: Verdict,
    /// None when this node lacks the data to re-verify.
    pub local_verdict: Option<Verdict>,
}

impl DisputeReview {
    pub fn agrees(&self) -> bool {
        self.local_verdict == Some(self.board_verdict)
    }
}

/// Derives the 32-byte seed for a node's random generator.
pub fn node_seed(scenario_seed: u64, index: NodeIndex) -> [u8; 32] {
    let mut data = [0u8; 10];
    data[..8].copy_from_slice(&scenario_seed.to_be_bytes());
    data[8..].copy_from_slice(&index.to_be_bytes());
    keccak256(&data)
}

/// One DKG participant.
#[derive(Clone, Debug)]
pub struct NodeState {
    index: NodeIndex,
    config: DkgConfig,
    rng: ChaCha20Rng,
    keys: Option<KeyPair>,
    polynomial: Option<SharePolynomial>,
    peer_pks: BTreeMap<NodeIndex, G1Point>,
    distributions: BTreeMap<NodeIndex, (Vec<EncryptedShare>, CommitmentVector)>,
    decrypted: BTreeMap<NodeIndex, ReceivedShare>,
    disputed_nodes: BTreeSet<NodeIndex>,
    dispute_reviews: Vec<DisputeReview>,
    key_share: Option<Scalar>,
}

impl NodeState {
    pub fn new(index: NodeIndex, config: DkgConfig) -> Result<Self, NodeError> {
        if index == 0 || index > config.n {
            return Err(NodeError::InvalidIndex(index));
        }
        Ok(NodeState {
            index,
            config,
            rng: ChaCha20Rng::from_seed(node_seed(config.seed, index)),
            keys: None,
            polynomial: None,
            peer_pks: BTreeMap::new(),
            distributions: BTreeMap::new(),
            decrypted: BTreeMap::new(),
            disputed_nodes: BTreeSet::new(),
            dispute_reviews: Vec::new(),
            key_share: None,
        })
    }

    pub fn index(&self) -> NodeIndex {
        self.index
    }

    pub fn public_key(&self) -> Option<G1Point> {
        self.keys.map(|k| k.public())
    }

    /// The dealt polynomial; white-box access for simulator oracles.
    pub fn polynomial(&self) -> Option<&SharePolynomial> {
        self.polynomial.as_ref()
    }

    pub fn decrypted(&self) -> &BTreeMap<NodeIndex, ReceivedShare> {
        &self.decrypted
    }

    pub fn disputed_nodes(&self) -> &BTreeSet<NodeIndex> {
        &self.disputed_nodes
    }

    pub fn dispute_reviews(&self) -> &[DisputeReview] {
        &self.dispute_reviews
    }

    pub fn key_share(&self) -> Option<Scalar> {
        self.key_share
    }

    fn sync_peer_keys(&mut self, bulletin: &Bulletin) {
        self.peer_pks = bulletin.registrations().clone();
    }

    fn identity(&self) -> Result<KeyPair, NodeError> {
        self.keys.ok_or(NodeError::MissingKeys)
    }

    /// Generates (once) the identity keypair from the node's derived seed
    /// and publishes the public half.
    pub fn phase_register(&mut self, bulletin: &mut Bulletin) -> Result<u64, NodeError> {
        if self.keys.is_none() {
            self.keys = Some(KeyPair::generate(&mut self.rng));
        }
        let pk = self.keys.expect("just generated").public();
        Ok(bulletin.register(self.index, pk)?)
    }

    /// Deals shares to every peer: `f(j)` encrypted under the pairwise
    /// DH key, plus the Feldman commitments.
    pub fn phase_distribute(&mut self, bulletin: &mut Bulletin) -> Result<u64, NodeError> {
        self.phase_distribute_with(bulletin, |_, value| value)
    }

    /// Same as [`phase_distribute`](Self::phase_distribute), with a hook
    /// that may replace the share value per receiver. The honest path is
    /// the identity hook; adversarial scenarios inject corruption here.
    pub fn phase_distribute_with(
        &mut self,
        bulletin: &mut Bulletin,
        mut tamper: impl FnMut(NodeIndex, Scalar) -> Scalar,
    ) -> Result<u64, NodeError> {
        self.sync_peer_keys(bulletin);
        let keys = self.identity()?;
        for j in 1..=self.config.n {
            if j != self.index && !self.peer_pks.contains_key(&j) {
                return Err(NodeError::MissingPeerKey(j));
            }
        }
        if self.polynomial.is_none() {
            self.polynomial = Some(
                SharePolynomial::generate(self.config.t, &mut self.rng)
                    .expect("config guarantees t >= 1"),
            );
        }
        let poly = self.polynomial.clone().expect("just generated");

        let mut encrypted = Vec::with_capacity(usize::from(self.config.n) - 1);
        for j in 1..=self.config.n {
            if j == self.index {
                continue;
            }
            let value = tamper(j, poly.evaluate(u64::from(j)));
            let key = derive_shared_key(&keys.secret(), &self.peer_pks[&j])?;
            encrypted.push(encrypt_share(
                &Share {
                    issuer: self.index,
                    receiver: j,
                    value,
                },
                &key,
            ));
        }
        Ok(bulletin.distribute_shares(self.index, encrypted, poly.commit())?)
    }

    /// Loads every issuer's distribution, decrypts this node's share and
    /// verifies it against the issuer's commitments. Issuers that never
    /// distributed are recorded as invalid with no value.
    pub fn phase_load_shares(&mut self, bulletin: &Bulletin) -> Result<(), NodeError> {
        self.sync_peer_keys(bulletin);
        let keys = self.identity()?;

        let issuers: Vec<NodeIndex> = self.peer_pks.keys().copied().collect();
        for issuer in issuers {
            let (shares, commitments) = match (
                bulletin.encrypted_shares_of(issuer),
                bulletin.commitments_of(issuer),
            ) {
                (Some(s), Some(c)) => (s.to_vec(), c.clone()),
                _ => {
                    if issuer != self.index {
                        self.decrypted.insert(
                            issuer,
                            ReceivedShare {
                                value: None,
                                status: ShareStatus::Invalid,
                            },
                        );
                    }
                    continue;
                }
            };
            if issuer == self.index {
                // own payload is cached for dispute re-verification only
                self.distributions.insert(issuer, (shares, commitments));
                continue;
            }

            let record = match shares.iter().find(|s| s.receiver == self.index) {
                Some(enc) => {
                    let key = derive_shared_key(&keys.secret(), &self.peer_pks[&issuer])?;
                    let dec = decrypt_share(enc, &key);
                    let status = if verify_share(&dec.value, &commitments, self.index) {
                        ShareStatus::Valid
                    } else {
                        ShareStatus::Invalid
                    };
                    ReceivedShare {
                        value: Some(dec.value),
                        status,
                    }
                }
                None => ReceivedShare {
                    value: None,
                    status: ShareStatus::Invalid,
                },
            };
            self.decrypted.insert(issuer, record);
            self.distributions.insert(issuer, (shares, commitments));
        }

        // a dealer trusts its own evaluation
        if let Some(poly) = &self.polynomial {
            self.decrypted.insert(
                self.index,
                ReceivedShare {
                    value: Some(poly.evaluate(u64::from(self.index))),
                    status: ShareStatus::Valid,
                },
            );
        }
        Ok(())
    }

    /// Disputes every issuer recorded invalid with a share on record.
    pub fn phase_submit_disputes(
        &mut self,
        bulletin: &mut Bulletin,
    ) -> Result<Vec<(NodeIndex, Verdict)>, NodeError> {
        self.phase_submit_disputes_with(bulletin, &[])
    }

    /// Same as [`phase_submit_disputes`](Self::phase_submit_disputes),
    /// additionally disputing `extra_targets` regardless of share status
    /// (the false-dispute hook).
    pub fn phase_submit_disputes_with(
        &mut self,
        bulletin: &mut Bulletin,
        extra_targets: &[NodeIndex],
    ) -> Result<Vec<(NodeIndex, Verdict)>, NodeError> {
        let keys = self.identity()?;
        let mut targets: Vec<NodeIndex> = self
            .decrypted
            .iter()
            .filter(|(_, rec)| rec.status == ShareStatus::Invalid && rec.value.is_some())
            .map(|(issuer, _)| *issuer)
            .collect();
        for extra in extra_targets {
            if !targets.contains(extra) {
                targets.push(*extra);
            }
        }

        let mut verdicts = Vec::with_capacity(targets.len());
        for issuer in targets {
            let pk_issuer = self
                .peer_pks
                .get(&issuer)
                .copied()
                .ok_or(NodeError::MissingPeerKey(issuer))?;
            let key = derive_shared_key(&keys.secret(), &pk_issuer)?;
            let proof = dleq::prove(
                &G1Point::generator(),
                &keys.public(),
                &pk_issuer,
                &key.point(),
                &keys.secret(),
                &mut self.rng,
            )?;
            if !dleq::verify(
                &G1Point::generator(),
                &keys.public(),
                &pk_issuer,
                &key.point(),
                &proof,
            ) {
                return Err(NodeError::ProofSelfCheck);
            }
            let verdict = bulletin.submit_dispute(self.index, issuer, key.point(), proof)?;
            verdicts.push((issuer, verdict));
        }
        Ok(verdicts)
    }

    /// Re-verifies every adjudicated dispute with the board's own verdict
    /// function over this node's copy of the logged data, and adds locally
    /// confirmed guilty issuers to `disputed_nodes`.
    pub fn phase_load_disputes(&mut self, bulletin: &Bulletin) -> Result<(), NodeError> {
        if bulletin.phase() <= Phase::Dispute {
            return Err(NodeError::DisputePhaseOpen);
        }
        self.sync_peer_keys(bulletin);
        self.dispute_reviews.clear();

        for event in bulletin.dispute_log() {
            let data = (
                self.peer_pks.get(&event.disputer),
                self.peer_pks.get(&event.issuer),
                self.distributions.get(&event.issuer),
            );
            let local_verdict = match data {
                (Some(pk_disputer), Some(pk_issuer), Some((shares, commitments))) => shares
                    .iter()
                    .find(|s| s.receiver == event.disputer)
                    .map(|enc| {
                        adjudicate_dispute(
                            pk_disputer,
                            pk_issuer,
                            &event.shared_key,
                            &event.proof,
                            enc.ciphertext,
                            commitments,
                            event.disputer,
                        )
                    }),
                _ => None,
            };
            if local_verdict == Some(Verdict::IssuerExpelled) {
                self.disputed_nodes.insert(event.issuer);
            }
            self.dispute_reviews.push(DisputeReview {
                tx_index: event.tx_index,
                disputer: event.disputer,
                issuer: event.issuer,
                board_verdict: event.verdict,
                local_verdict,
            });
        }
        Ok(())
    }

    /// Sums the qualified issuers' shares into this node's key share and
    /// checks it against the public commitments.
    pub fn derive_key_share(&mut self, bulletin: &Bulletin) -> Result<Scalar, NodeError> {
        let qualified = bulletin.qualified_set()?;
        if qualified.is_empty() {
            return Err(NodeError::Bulletin(BulletinError::EmptyQualifiedSet));
        }

        let mut sum = Scalar::zero();
        for issuer in &qualified {
            match self.decrypted.get(issuer) {
                Some(ReceivedShare {
                    value: Some(value),
                    status: ShareStatus::Valid,
                }) => {
                    sum = sum + *value;
                }
                _ => return Err(NodeError::MissingQualifiedShare(*issuer)),
            }
        }

        let expected = bulletin.public_key_share(self.index)?;
        if G1Point::generator().mul_scalar(&sum) != expected {
            return Err(NodeError::InconsistentShare);
        }
        self.key_share = Some(sum);
        Ok(sum)
    }
}
