//! Closed-form symbol error rate machinery.
//!
//! The chain is: coefficient tables ([`coeffs`]) give the relay and
//! downlink PAM transition matrices ([`matrices`]) as finite sums of
//! Q-functions; those give the per-slot network-coded error probability
//! `P_FDF`; [`events`] and [`estimators`] turn per-slot probabilities into
//! per-user average SER; [`ensemble`] averages over frames.

pub mod coeffs;
pub mod ensemble;
pub mod estimators;
pub mod events;
pub mod matrices;

pub use coeffs::{derive_coeff_tables, CoeffTables};
pub use ensemble::{ensemble_ser, ser_curve, SerPoint, SerSummary};
pub use estimators::{avg_ser, avg_ser_consecutive, frame_ser, pfdf_matrix, Estimator};
pub use events::{error_event_probs, DecoderRole, ErrorEvents};
pub use matrices::{build_prob_matrices, p_fdf, p_fdf_from_nc, p_pam_nc, ProbMatrices};
