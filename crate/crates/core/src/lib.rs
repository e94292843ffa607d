//! Capacity regions of symmetric injective K-user deterministic
//! interference channels.
//!
//! The region for a fixed product input distribution is computed two ways:
//! by Fourier-Motzkin projection of the Han-Kobayashi region onto aggregate
//! rates ([`hk_region`]), and by direct enumeration of the closed-form facet
//! family ([`theorem_region`]). [`coeff_scheme`] carries the facet algebra
//! that links the two.

pub mod channel;
pub mod coeff_scheme;
pub mod entropy;
pub mod error;
pub mod hk_region;
pub mod pipeline;
pub mod polytope;
pub mod subset;
pub mod theorem_region;

pub use channel::{validate_injectivity, ChannelSpec, InjectivityReport};
pub use coeff_scheme::{CoefficientScheme, DeVector};
pub use entropy::{build_entropy_table, EntropyTable, InputDistribution};
pub use error::{Error, Result};
pub use pipeline::{capacity_region, Method, RegionOptions};
pub use polytope::{LinearInequality, Region};
pub use subset::UserSet;
pub use theorem_region::FacetSpec;
