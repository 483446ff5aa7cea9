//! Link-level simulation and closed-form error analysis for two-user downlink
//! NOMA with BPSK, imperfect SIC and channel-estimation error.
//!
//! The crate is organised bottom-up:
//!
//! * [`mathkit`]: Gaussian tail, its Rayleigh average, complex Gaussian draws.
//! * [`channel`]: fading channels `h`, estimation error `ε`, estimates `ĥ = h − ε`.
//! * [`phy`]: superposition coding, the far user's ML detector, the near user's SIC chain.
//! * [`analytic`]: closed-form average BEPs in two formula variants, PF index.
//! * [`montecarlo`]: deterministic parallel simulation of the whole chain.
//! * [`poweropt`]: min-max fair power allocation over `α`.
//! * [`cli`]: config files, CSV/SVG output, figure presets and the command front end.
//!
//! ```
//! use noma_linklab::analytic::{AbepBreakdown, FormulaMode, OperatingPoint};
//! use noma_linklab::channel::{db_to_linear, FadingProfile};
//!
//! let profile = FadingProfile::from_db(10.0, 0.0, 0.05).unwrap();
//! let pt = OperatingPoint::new(0.2, db_to_linear(30.0), profile).unwrap();
//! let b = AbepBreakdown::evaluate(&pt, FormulaMode::AsDerived);
//! assert!(b.p1.value() < 0.5 && b.p2.value() < 0.5);
//! ```

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod mathkit;
pub mod montecarlo;
pub mod phy;
pub mod poweropt;

pub use error::{Error, Result};
