// SPDX-License-Identifier: Apache-2.0

//! JSON form of the bulletin's event log.
//!
//! The file wraps the scenario parameters around the exported event
//! array; each event is `{tx_index, phase, type, sender, payload_hex}`
//! with payload encodings as defined by the core wire formats.

use dkg_core::bulletin::{Phase, TxBody, TxRecord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("unknown phase {0:?}")]
    UnknownPhase(String),
    #[error("payload hex is invalid")]
    BadHex,
    #[error("bad payload for {kind}: {source}")]
    BadPayload {
        kind: String,
        source: dkg_core::bulletin::PayloadError,
    },
}

/// One exported transaction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub tx_index: u64,
    pub phase: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub sender: u16,
    pub payload_hex: String,
}

/// A scenario's full event log plus the parameters needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogFile {
    pub n: u16,
    pub t: usize,
    pub seed: u64,
    pub events: Vec<LogEntry>,
}

impl LogEntry {
    pub fn from_record(record: &TxRecord) -> Self {
        LogEntry {
            tx_index: record.tx_index,
            phase: record.phase.as_str().to_string(),
            kind: record.body.kind().to_string(),
            sender: record.sender,
            payload_hex: format!("0x{}", hex::encode(record.body.to_payload())),
        }
    }

    pub fn to_record(&self) -> Result<TxRecord, LogError> {
        let phase = Phase::from_str_name(&self.phase)
            .ok_or_else(|| LogError::UnknownPhase(self.phase.clone()))?;
        let raw = self
            .payload_hex
            .strip_prefix("0x")
            .unwrap_or(&self.payload_hex);
        let payload = hex::decode(raw).map_err(|_| LogError::BadHex)?;
        let body =
            TxBody::from_payload(&self.kind, &payload).map_err(|source| LogError::BadPayload {
                kind: self.kind.clone(),
                source,
            })?;
        Ok(TxRecord {
            tx_index: self.tx_index,
            phase,
            sender: self.sender,
            body,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dkg_core::bulletin::Bulletin;
    use dkg_core::share_channel::KeyPair;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    #[test]
    fn entries_roundtrip_through_records() {
        let mut bulletin = Bulletin::new(4, 2).unwrap();
        let kp = KeyPair::generate(&mut ChaCha20Rng::seed_from_u64(1));
        bulletin.register(1, kp.public()).unwrap();
        bulletin.advance_phase().unwrap();

        for record in bulletin.read_events(0) {
            let entry = LogEntry::from_record(record);
            assert!(entry.payload_hex.starts_with("0x"));
            assert_eq!(&entry.to_record().unwrap(), record);
        }
    }

    #[test]
    fn bad_entries_are_rejected() {
        let entry = LogEntry {
            tx_index: 0,
            phase: "warming_up".into(),
            kind: "register".into(),
            sender: 1,
            payload_hex: "0x00".into(),
        };
        assert!(matches!(entry.to_record(), Err(LogError::UnknownPhase(_))));

        let entry = LogEntry {
            tx_index: 0,
            phase: "registration".into(),
            kind: "register".into(),
            sender: 1,
            payload_hex: "0xzz".into(),
        };
        assert!(matches!(entry.to_record(), Err(LogError::BadHex)));

        let entry = LogEntry {
            tx_index: 0,
            phase: "registration".into(),
            kind: "register".into(),
            sender: 1,
            payload_hex: "0x0011".into(),
        };
        assert!(matches!(
            entry.to_record(),
            Err(LogError::BadPayload { .. })
        ));
    }
}
