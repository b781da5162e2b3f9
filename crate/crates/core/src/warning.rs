use std::fmt;

use serde::{Deserialize, Serialize};

/// Non-fatal conditions. `--strict` promotes them to errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    NegativeProfit { operator_profit: f64 },
    NoEligiblePeers { target: String },
    SmallGroup { cluster: usize, size: usize },
    UndefinedMean,
    /// Fewer distinct households than clusters; everyone was put in cluster 0.
    TooFewDistinct { distinct: usize, clusters: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NegativeProfit { operator_profit } => write!(
                f,
                "feed-in payments exceed market revenue (operator profit {operator_profit:.6})"
            ),
            Warning::NoEligiblePeers { target } => {
                write!(f, "no eligible peer improves on household '{target}'")
            }
            Warning::SmallGroup { cluster, size } => write!(
                f,
                "cluster {cluster} has {size} households; at least 4 are needed for flagging"
            ),
            Warning::TooFewDistinct { distinct, clusters } => write!(
                f,
                "only {distinct} distinct households for {clusters} clusters; clustering skipped"
            ),
            Warning::UndefinedMean => write!(f, "no target received a recommendation; mean saving undefined"),
        }
    }
}
