// SPDX-License-Identifier: Apache-2.0

//! Scenario execution and event-log replay.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use dkg_core::bulletin::{Bulletin, BulletinError, Phase, TxBody};
use dkg_core::group_math::{G1Point, NodeIndex, Scalar};
use dkg_core::node::{DkgConfig, NodeError, NodeState};
use dkg_core::vss::{lagrange_coefficients_at_zero, lagrange_reconstruct};
use serde::Serialize;
use thiserror::Error;

use crate::log_io::{LogEntry, LogError, LogFile};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Node(#[from] NodeError),
    #[error(transparent)]
    Bulletin(#[from] BulletinError),
    #[error("corrupt log: {0}")]
    CorruptLog(String),
    #[error("corrupt log: {0}")]
    CorruptEntry(#[from] LogError),
    #[error("replayed verdict diverges from the logged one at tx {tx_index}")]
    VerdictDivergence { tx_index: u64 },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// A scripted misbehavior for one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Behavior {
    /// Corrupt the share dealt to `target` by adding one.
    BadShare { target: NodeIndex },
    /// Register but never distribute shares.
    NoDistribute,
    /// Dispute `target` although its share is valid.
    FalseDispute { target: NodeIndex },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adversary {
    pub node: NodeIndex,
    pub behavior: Behavior,
}

impl FromStr for Adversary {
    type Err = String;

    /// Parses `IDX:BEHAVIOR[:TARGET]`, e.g. `3:bad-share:2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(format!("expected IDX:BEHAVIOR[:TARGET], got {s:?}"));
        }
        let node: NodeIndex = parts[0]
            .parse()
            .map_err(|_| format!("bad node index {:?}", parts[0]))?;
        let target = || -> Result<NodeIndex, String> {
            parts
                .get(2)
                .ok_or_else(|| format!("behavior {:?} needs a target", parts[1]))?
                .parse()
                .map_err(|_| format!("bad target index {:?}", parts[2]))
        };
        let behavior = match parts[1] {
            "bad-share" => Behavior::BadShare { target: target()? },
            "no-distribute" => {
                if parts.len() == 3 {
                    return Err("no-distribute takes no target".into());
                }
                Behavior::NoDistribute
            }
            "false-dispute" => Behavior::FalseDispute { target: target()? },
            other => return Err(format!("unknown behavior {other:?}")),
        };
        Ok(Adversary { node, behavior })
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.behavior {
            Behavior::BadShare { target } => write!(f, "{}:bad-share:{}", self.node, target),
            Behavior::NoDistribute => write!(f, "{}:no-distribute", self.node),
            Behavior::FalseDispute { target } => {
                write!(f, "{}:false-dispute:{}", self.node, target)
            }
        }
    }
}

/// Everything a run needs: sizes, seed, and scripted misbehavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub n: u16,
    pub t: usize,
    pub seed: u64,
    pub adversaries: Vec<Adversary>,
}

impl ScenarioConfig {
    pub fn honest(n: u16, t: usize, seed: u64) -> Self {
        ScenarioConfig {
            n,
            t,
            seed,
            adversaries: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.t < 1 || self.t >= usize::from(self.n) {
            return Err(ScenarioError::InvalidConfig(format!(
                "need 1 <= t < n, got n={}, t={}",
                self.n, self.t
            )));
        }
        let mut seen = BTreeSet::new();
        for adv in &self.adversaries {
            if adv.node == 0 || adv.node > self.n {
                return Err(ScenarioError::InvalidConfig(format!(
                    "adversary index {} outside [1, {}]",
                    adv.node, self.n
                )));
            }
            if !seen.insert(adv.node) {
                return Err(ScenarioError::InvalidConfig(format!(
                    "node {} has two behaviors",
                    adv.node
                )));
            }
            let target = match adv.behavior {
                Behavior::BadShare { target } | Behavior::FalseDispute { target } => Some(target),
                Behavior::NoDistribute => None,
            };
            if let Some(target) = target {
                if target == 0 || target > self.n || target == adv.node {
                    return Err(ScenarioError::InvalidConfig(format!(
                        "behavior target {} invalid for node {}",
                        target, adv.node
                    )));
                }
            }
        }
        Ok(())
    }

    fn behavior_of(&self, node: NodeIndex) -> Option<Behavior> {
        self.adversaries
            .iter()
            .find(|a| a.node == node)
            .map(|a| a.behavior)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeyShareEntry {
    pub node: NodeIndex,
    pub public: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictEntry {
    pub tx_index: u64,
    pub disputer: NodeIndex,
    pub issuer: NodeIndex,
    pub verdict: String,
}

/// The machine-readable outcome of a run or replay. Serialization is
/// stable: same scenario, same bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub n: u16,
    pub t: usize,
    pub seed: u64,
    pub qualified: Vec<NodeIndex>,
    pub master_public_key: Option<String>,
    pub key_shares: Vec<KeyShareEntry>,
    pub verdicts: Vec<VerdictEntry>,
    /// `"passed"` / `"failed"`; present only when the run finished.
    pub reconstruction_check: Option<String>,
    /// Path of the exported event log, filled in by the caller.
    pub event_log: Option<String>,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn reconstruction_passed(&self) -> bool {
        self.reconstruction_check.as_deref() == Some("passed")
    }
}

/// A completed run: the report, the exportable log, and white-box access
/// to the node states for oracles.
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub log: LogFile,
    pub nodes: Vec<NodeState>,
    pub bulletin: Bulletin,
}

fn point_hex(p: &G1Point) -> String {
    format!("0x{}", hex::encode(p.to_bytes()))
}

/// Runs the full phase machine over `config.n` nodes against one board.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome, ScenarioError> {
    config.validate()?;
    let node_config = DkgConfig::new(config.n, config.t, config.seed)?;
    let mut bulletin = Bulletin::new(config.n, config.t)?;
    let mut nodes: Vec<NodeState> = (1..=config.n)
        .map(|i| NodeState::new(i, node_config))
        .collect::<Result<_, _>>()?;

    for node in &mut nodes {
        node.phase_register(&mut bulletin)?;
    }
    bulletin.advance_phase()?;

    for node in &mut nodes {
        match config.behavior_of(node.index()) {
            Some(Behavior::NoDistribute) => {}
            Some(Behavior::BadShare { target }) => {
                node.phase_distribute_with(&mut bulletin, |receiver, value| {
                    if receiver == target {
                        value + Scalar::one()
                    } else {
                        value
                    }
                })?;
            }
            _ => {
                node.phase_distribute(&mut bulletin)?;
            }
        }
    }
    bulletin.advance_phase()?;

    for node in &mut nodes {
        node.phase_load_shares(&bulletin)?;
    }
    for node in &mut nodes {
        match config.behavior_of(node.index()) {
            Some(Behavior::FalseDispute { target }) => {
                node.phase_submit_disputes_with(&mut bulletin, &[target])?;
            }
            _ => {
                node.phase_submit_disputes(&mut bulletin)?;
            }
        }
    }
    bulletin.advance_phase()?;

    for node in &mut nodes {
        node.phase_load_disputes(&bulletin)?;
    }
    for node in &mut nodes {
        if !bulletin.expelled().contains(&node.index()) {
            node.derive_key_share(&bulletin)?;
        }
    }
    bulletin.advance_phase()?;

    // -- invariants the simulator is privileged to check --------------------

    // each node's independent verdicts must match the board's
    for node in &nodes {
        for review in node.dispute_reviews() {
            if !review.agrees() {
                return Err(ScenarioError::InvariantViolation(format!(
                    "node {} disagrees with the board at tx {}",
                    node.index(),
                    review.tx_index
                )));
            }
        }
    }

    let qualified = bulletin.qualified_set()?;
    if !qualified.is_empty() {
        // white-box: master key must be the sum of the qualified secrets
        let master = bulletin.master_public_key()?;
        let secret_sum = nodes
            .iter()
            .filter(|node| qualified.contains(&node.index()))
            .try_fold(Scalar::zero(), |acc, node| {
                node.polynomial().map(|p| acc + p.secret()).ok_or_else(|| {
                    ScenarioError::InvariantViolation(format!(
                        "qualified node {} has no polynomial",
                        node.index()
                    ))
                })
            })?;
        if master != G1Point::generator().mul_scalar(&secret_sum) {
            return Err(ScenarioError::InvariantViolation(
                "master key does not aggregate the qualified secrets".into(),
            ));
        }

        // white-box: scalar reconstruction from every (t+1)-subset
        let holders: Vec<(NodeIndex, Scalar)> = nodes
            .iter()
            .filter_map(|node| node.key_share().map(|s| (node.index(), s)))
            .collect();
        if holders.len() > config.t {
            for subset in combinations(&holders, config.t + 1) {
                let secret = lagrange_reconstruct(&subset)
                    .map_err(|e| ScenarioError::InvariantViolation(e.to_string()))?;
                if secret != secret_sum {
                    return Err(ScenarioError::InvariantViolation(
                        "a key-share subset reconstructs a different secret".into(),
                    ));
                }
            }
        }
    }

    let report = report_from_bulletin(&bulletin, config.seed)?;
    let log = LogFile {
        n: config.n,
        t: config.t,
        seed: config.seed,
        events: bulletin
            .read_events(0)
            .iter()
            .map(LogEntry::from_record)
            .collect(),
    };
    Ok(ScenarioOutcome {
        report,
        log,
        nodes,
        bulletin,
    })
}

/// Re-applies a log to a fresh board; dispute verdicts are recomputed and
/// must match the logged ones. The report is rebuilt from public data.
pub fn replay(log: &LogFile) -> Result<ScenarioReport, ScenarioError> {
    let mut bulletin = Bulletin::new(log.n, log.t)?;
    for entry in &log.events {
        let record = entry.to_record()?;
        if record.tx_index != bulletin.tx_counter() {
            return Err(ScenarioError::CorruptLog(format!(
                "tx index {} out of sequence (expected {})",
                record.tx_index,
                bulletin.tx_counter()
            )));
        }
        if record.phase != bulletin.phase() {
            return Err(ScenarioError::CorruptLog(format!(
                "tx {} labeled phase {} but the board is in {}",
                record.tx_index,
                record.phase,
                bulletin.phase()
            )));
        }
        match record.body {
            TxBody::Register { pk } => {
                bulletin.register(record.sender, pk)?;
            }
            TxBody::DistributeShares {
                encrypted,
                commitments,
            } => {
                bulletin.distribute_shares(record.sender, encrypted, commitments)?;
            }
            TxBody::SubmitDispute {
                issuer,
                shared_key,
                proof,
                verdict,
            } => {
                let recomputed =
                    bulletin.submit_dispute(record.sender, issuer, shared_key, proof)?;
                if recomputed != verdict {
                    return Err(ScenarioError::VerdictDivergence {
                        tx_index: record.tx_index,
                    });
                }
            }
            TxBody::AdvancePhase { to } => {
                let reached = bulletin.advance_phase()?;
                if reached != to {
                    return Err(ScenarioError::CorruptLog(format!(
                        "tx {} advances to {} but the board reached {}",
                        record.tx_index, to, reached
                    )));
                }
            }
        }
    }
    report_from_bulletin(&bulletin, log.seed)
}

/// Builds the report from board state alone: qualified set, master key,
/// per-node key-share publics, verdicts, and the public reconstruction
/// check (Lagrange in the exponent over every (t+1)-subset).
fn report_from_bulletin(bulletin: &Bulletin, seed: u64) -> Result<ScenarioReport, ScenarioError> {
    let finished = bulletin.phase() == Phase::Finished;
    let key_material = bulletin.phase() >= Phase::KeyDerivation;

    let qualified: Vec<NodeIndex> = if key_material {
        bulletin.qualified_set()?.into_iter().collect()
    } else {
        Vec::new()
    };

    let master = if !qualified.is_empty() {
        Some(bulletin.master_public_key()?)
    } else {
        None
    };

    let mut key_shares = Vec::new();
    if !qualified.is_empty() {
        for node in bulletin.registrations().keys() {
            if bulletin.expelled().contains(node) {
                continue;
            }
            key_shares.push(KeyShareEntry {
                node: *node,
                public: point_hex(&bulletin.public_key_share(*node)?),
            });
        }
    }

    let verdicts = bulletin
        .dispute_log()
        .iter()
        .map(|event| VerdictEntry {
            tx_index: event.tx_index,
            disputer: event.disputer,
            issuer: event.issuer,
            verdict: event.verdict.as_str().to_string(),
        })
        .collect();

    let reconstruction_check = if finished {
        Some(
            if reconstruction_holds(bulletin, &qualified)? {
                "passed"
            } else {
                "failed"
            }
            .to_string(),
        )
    } else {
        None
    };

    Ok(ScenarioReport {
        n: bulletin.n(),
        t: bulletin.t(),
        seed,
        qualified,
        master_public_key: master.map(|p| point_hex(&p)),
        key_shares,
        verdicts,
        reconstruction_check,
        event_log: None,
    })
}

/// Interpolates the master key at x = 0 from every (t+1)-subset of the
/// surviving nodes' public key shares.
fn reconstruction_holds(
    bulletin: &Bulletin,
    qualified: &[NodeIndex],
) -> Result<bool, ScenarioError> {
    if qualified.is_empty() {
        return Ok(false);
    }
    let master = bulletin.master_public_key()?;
    let holders: Vec<(NodeIndex, G1Point)> = bulletin
        .registrations()
        .keys()
        .filter(|node| !bulletin.expelled().contains(node))
        .map(|node| Ok((*node, bulletin.public_key_share(*node)?)))
        .collect::<Result<_, ScenarioError>>()?;
    if holders.len() <= bulletin.t() {
        return Ok(false);
    }
    for subset in combinations(&holders, bulletin.t() + 1) {
        let xs: Vec<NodeIndex> = subset.iter().map(|(x, _)| *x).collect();
        let lambdas = lagrange_coefficients_at_zero(&xs)
            .map_err(|e| ScenarioError::InvariantViolation(e.to_string()))?;
        let interpolated = subset
            .iter()
            .zip(&lambdas)
            .fold(G1Point::identity(), |acc, ((_, share), lambda)| {
                acc + share.mul_scalar(lambda)
            });
        if interpolated != master {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All `k`-element subsets, in index order.
fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut current: Vec<T> = Vec::with_capacity(k);
    fn recurse<T: Clone>(
        items: &[T],
        k: usize,
        start: usize,
        current: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            current.push(items[i].clone());
            recurse(items, k, i + 1, current, out);
            current.pop();
        }
    }
    recurse(items, k, 0, &mut current, &mut out);
    out
}
