use serde::{Deserialize, Serialize};

use crate::error::McError;

/// Largest-eigenvalue moments of the Airy process, estimated by the
/// `tw_oracle` example from the β = 2 tridiagonal model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwReference {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub n: usize,
    pub draws: usize,
    pub seed: u64,
}

const TW_JSON: &str = include_str!("../../data/tw_gue_moments.json");

impl TwReference {
    pub fn parse(json: &str) -> Result<Self, McError> {
        serde_json::from_str(json).map_err(|e| McError::Reference(e.to_string()))
    }

    /// The shipped reference.
    pub fn shipped() -> Self {
        Self::parse(TW_JSON).expect("shipped reference parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_reference_is_plausible() {
        let r = TwReference::shipped();
        assert!(r.draws >= 10_000 && r.n >= 1000);
        assert!((r.mean + 1.77).abs() < 0.05, "{r:?}");
        assert!((r.variance - 0.81).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(matches!(TwReference::parse("{\"mean\": 1}"), Err(McError::Reference(_))));
    }
}
