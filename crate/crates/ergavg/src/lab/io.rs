//! CLI-facing wire formats that do not belong to a domain type: sampled
//! sequences for the variation commands.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::variation::IndexedSequence;
use crate::{Error, Result};

/// Wire form of a sampled sequence: `{times, re, im}`.
#[derive(Serialize, Deserialize)]
pub struct SequenceJson {
    pub times: Vec<u64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn sequence_from_json(bytes: &[u8]) -> Result<IndexedSequence> {
    let raw: SequenceJson = serde_json::from_slice(bytes)?;
    if raw.re.len() != raw.im.len() {
        return Err(Error::Parse(format!(
            "re has {} samples but im has {}",
            raw.re.len(),
            raw.im.len()
        )));
    }
    if raw.re.iter().chain(raw.im.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite sample".into()));
    }
    IndexedSequence::new(
        raw.times,
        raw.re
            .into_iter()
            .zip(raw.im)
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
    )
}

pub fn sequence_to_json(seq: &IndexedSequence) -> String {
    let raw = SequenceJson {
        times: seq.times().to_vec(),
        re: seq.samples().iter().map(|v| v.re).collect(),
        im: seq.samples().iter().map(|v| v.im).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_validation() {
        let seq = IndexedSequence::new(
            vec![1, 3, 7],
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, -0.5),
                Complex64::new(0.0, 0.25),
            ],
        )
        .unwrap();
        let back = sequence_from_json(sequence_to_json(&seq).as_bytes()).unwrap();
        assert_eq!(back, seq);
        assert!(sequence_from_json(b"{\"times\":[1],\"re\":[1.0],\"im\":[]}").is_err());
        assert!(
            sequence_from_json(b"{\"times\":[2,1],\"re\":[1.0,1.0],\"im\":[0.0,0.0]}").is_err()
        );
    }
}
