use serde::{Deserialize, Serialize};

use super::StatsError;

/// Nine ordinal VRSQ items scored 0 to 3; items 1 to 4 are oculomotor,
/// 5 to 9 disorientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrsqResponse([u8; 9]);

impl VrsqResponse {
    pub fn new(items: [u8; 9]) -> Result<Self, StatsError> {
        if let Some((i, &v)) = items.iter().enumerate().find(|(_, &v)| v > 3) {
            return Err(StatsError::VrsqItem { item: i + 1, value: v });
        }
        Ok(Self(items))
    }

    pub fn items(&self) -> &[u8; 9] {
        &self.0
    }
}

/// Mean of the oculomotor and disorientation sub-scores, each on 0 to 100.
pub fn vrsq_score(r: &VrsqResponse) -> f64 {
    let oculomotor: u32 = r.0[..4].iter().map(|&v| u32::from(v)).sum();
    let disorientation: u32 = r.0[4..].iter().map(|&v| u32::from(v)).sum();
    (f64::from(oculomotor) / 12.0 * 100.0 + f64::from(disorientation) / 15.0 * 100.0) / 2.0
}
