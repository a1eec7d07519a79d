//! Link-level simulator and analytic calculator for functional
//! decode-and-forward (FDF) multi-way relay networks.
//!
//! An `L`-user network exchanges all messages through a single relay over
//! `L - 1` pairwise multiple-access slots followed by `L - 1` broadcast
//! slots. Three pairing schemes are supported: the common-user scheme, where
//! the user with the best average channel gain is paired with everyone else,
//! and two fixed chain schemes (consecutive and mirror pairing).
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: average-gain scenarios and block Rayleigh fading.
//! * [`pairing`]: schedules, common-user selection and fairness powers.
//! * [`network`]: per-frame plans tying the two together deterministically.
//! * [`rates`]: SNRs, rate bounds, common/sum rates and Jensen bounds.
//! * [`modem`]: M-QAM / PAM mapping, network-coded relay decoding and
//!   message extraction.
//! * [`ser`]: closed-form symbol error rate machinery.
//! * [`montecarlo`]: end-to-end symbol-level simulation.
//! * [`config`], [`output`], [`app`]: the command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod channel;
pub mod config;
pub mod error;
pub mod modem;
pub mod montecarlo;
pub mod network;
pub mod output;
pub mod pairing;
pub mod rates;
pub(crate) mod rng;
pub mod ser;
pub mod special;

pub use error::{Error, Result};
