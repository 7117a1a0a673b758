//! Monte-Carlo simulator for a bistatic backscatter link with multi-antenna
//! carrier emitter (PanA) and reader (PanB).
//!
//! The protocol has two phases. In Phase I PanB sends orthogonal pilots and
//! PanA forms a least-squares estimate of the direct channel. In Phase II
//! PanA projects its probing signal away from the dominant direction of that
//! estimate, which suppresses direct-link interference at PanB, and PanB runs
//! a Neyman-Pearson test for the presence of the backscatter device.
//!
//! Modules, bottom-up: [`scene`] (geometry and channels), [`waveform`]
//! (pilots and probes), [`chanest`] (Phase I), [`nullproj`] (SVD and
//! projector), [`detector`] (Phase II and the NP test), [`metrics`] (SNR
//! calibration and dynamic range), [`harness`] (experiments and CSV).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chanest;
pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod nullproj;
pub mod qfunc;
pub mod scene;
pub mod selftest;
pub mod waveform;

pub use error::{Result, SimError};
pub use exec::Exec;
