//! Alphabets, configurations, subshifts and the two combinatorial metrics:
//! the configuration metric and the Hausdorff metric it induces on
//! subshifts.

mod alphabet;
mod config;
mod dictionary;
mod distance;
mod rotation;
mod slope;
mod substitution;

pub use alphabet::{exact_ratio, Alphabet, Letter};
pub use config::{kohmoto_configuration, shift, Configuration, PeriodicBlock, Source};
pub use dictionary::{Pattern, PatternDictionary, Subshift, SubshiftKind, DEFAULT_SAMPLE_LIMIT};
pub use distance::{config_distance, subshift_distance, Distance};
pub use rotation::{Cut, RotationCoding};
pub use slope::{convergents, convergents_from, Slope};
pub use substitution::{fibonacci_word, SubstitutionFixedPoint};
