//! Set-valued agreement on the Plutchik emotion wheel, plus the tooling
//! around it: tweet preprocessing and lexicon filtering, worker quality
//! control and label aggregation, descriptive corpus analytics, balanced
//! binary task construction, and a random-annotation calibration baseline.
//!
//! ```
//! use pea_core::agreement::{directed_agreement, EmotionSet};
//! use pea_core::wheel::Emotion24::*;
//!
//! let x: EmotionSet = [Joy].into();
//! let y: EmotionSet = [Joy, Grief].into();
//! assert_eq!(directed_agreement(&x, &y).unwrap(), 1.0);
//! assert_eq!(directed_agreement(&y, &x).unwrap(), 0.5);
//! ```

pub mod agreement;
pub mod analytics;
pub mod calibration;
pub mod corpus;
pub mod error;
pub mod seed;
pub mod tasks;
pub mod wheel;

pub use error::{Error, Result};
pub use wheel::{group_of, pair_score, parse_emotion, radians_of, Emotion24, Emotion8, Label};

/// Version string recorded in every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
