//! Exact leakage analysis for finite probabilistic channels.
//!
//! A channel `C` maps secrets to distributions over observations. Given an
//! adversary's prior `π` and gain function `g`, this crate computes
//!
//! * average-case and max-case multiplicative g-leakage,
//! * the Bayes capacity (the sum of column maxima),
//! * lift, the largest posterior-to-prior ratio `δ^y_x / π_x`,
//! * lift capacity, the supremum of lift over full-support priors, which is
//!   the `e^ε` of local differential privacy,
//!
//! all in exact rational arithmetic, together with the gain constructions
//! and correlation (Dalenius) analysis that tie them together. The
//! [`propcheck`] module fuzzes every relation between these quantities.
//!
//! ```
//! use qif::{labels, q, Channel, Prior};
//! use qif::measures::{lift, lift_capacity};
//!
//! let c = Channel::new(
//!     labels(&["b", "g", "bg"]),
//!     labels(&["b", "g"]),
//!     vec![
//!         vec![q(3, 4), q(1, 4)],
//!         vec![q(1, 4), q(3, 4)],
//!         vec![q(19, 20), q(1, 20)],
//!     ],
//! )?;
//! let pi = Prior::new(labels(&["b", "g", "bg"]), vec![q(1, 4), q(1, 2), q(1, 4)])?;
//!
//! assert_eq!(lift(&pi, &c)?.value, q(19, 11));
//! assert_eq!(lift_capacity(&c), q(15, 1));
//! # Ok::<(), qif::QifError>(())
//! ```

pub mod channel;
pub mod dalenius;
pub mod error;
pub mod gain;
pub mod label;
pub mod measures;
pub mod prior;
pub mod propcheck;
pub mod rational;

pub use channel::{compose, factorize, hyper, joint, Channel, Hyper, Joint};
pub use dalenius::Correlation;
pub use error::{QifError, Result};
pub use gain::GainFunction;
pub use label::{labels, Label};
pub use measures::LeakageReport;
pub use prior::Prior;
pub use rational::{q, ExtRational, Rational};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/leakage.md")]
    mod leakage {}
    #[doc = include_str!("../../../book/src/lift.md")]
    mod lift {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/gains.md")]
    mod gains {}
    #[doc = include_str!("../../../book/src/dalenius.md")]
    mod dalenius {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
