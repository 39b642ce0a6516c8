pub mod accsum;
pub mod amplitude;
pub mod config;
pub mod error;
pub mod kinematics;
pub mod normint;
pub mod omega;
pub mod pairstates;
pub mod quad;
pub mod scalprod;
pub mod specfun;
pub mod verify;

pub use amplitude::ComplexAmplitude;
pub use config::RunConfig;
pub use error::{Error, Result};

/// The guide under `book/`, compiled here so that its examples run as doc-tests.
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    pub mod special_functions {}
    #[doc = include_str!("../../../book/src/pair-states.md")]
    pub mod pair_states {}
    #[doc = include_str!("../../../book/src/normalization.md")]
    pub mod normalization {}
    #[doc = include_str!("../../../book/src/omega.md")]
    pub mod omega {}
    #[doc = include_str!("../../../book/src/scalar-product.md")]
    pub mod scalar_product {}
    #[doc = include_str!("../../../book/src/resummation.md")]
    pub mod resummation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/discrepancies.md")]
    pub mod discrepancies {}
}
