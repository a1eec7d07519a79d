//! Error-event probabilities at a decoding user of the common-user scheme.
//!
//! A decoding user sees `L - 1` network-coded slots, each wrong
//! independently with its own `P_FDF`. Event `A_k`: exactly `k` messages
//! other than the common user's are wrong, with the slot shared with the
//! common user correct. Event `B_k` (other users only): the slot shared with
//! the common user is wrong, which corrupts every message whose own slot was
//! decoded correctly, while messages whose slot was also wrong are counted
//! as correct.

/// Which side of the pairing tree the decoding user sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderRole {
    Common,
    /// A non-common user; carries the index of its slot with the common user.
    Other { common_slot: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEvents {
    /// `a[k] = P(A_k)` for `k = 0..=L-1`.
    pub a: Vec<f64>,
    /// `b[k] = P(B_k)`, zero for `k = 0` and for the common user.
    pub b: Vec<f64>,
}

impl ErrorEvents {
    /// `P(k)`: probability of exactly `k` wrong messages.
    pub fn prob(&self, k: usize) -> f64 {
        self.a[k] + self.b[k]
    }

    /// `sum_k k P(k) / (L - 1)`.
    pub fn ser(&self) -> f64 {
        let n = self.a.len() - 1;
        (1..=n).map(|k| k as f64 * self.prob(k)).sum::<f64>() / n as f64
    }
}

/// `pb[j]`: probability that exactly `j` of the independent events with
/// probabilities `p` occur.
pub fn poisson_binomial(p: &[f64]) -> Vec<f64> {
    let mut pb = vec![0.0; p.len() + 1];
    pb[0] = 1.0;
    for (n, &x) in p.iter().enumerate() {
        for j in (0..=n + 1).rev() {
            let stay = pb[j] * (1.0 - x);
            let step = if j > 0 { pb[j - 1] * x } else { 0.0 };
            pb[j] = stay + step;
        }
    }
    pb
}

/// Event probabilities from the per-slot `P_FDF` seen by one decoding user.
pub fn error_event_probs(pfdf: &[f64], role: DecoderRole) -> ErrorEvents {
    let n = pfdf.len();
    match role {
        DecoderRole::Common => ErrorEvents { a: poisson_binomial(pfdf), b: vec![0.0; n + 1] },
        DecoderRole::Other { common_slot } => {
            let p_c = pfdf[common_slot];
            let rest: Vec<f64> = pfdf.iter().enumerate().filter(|&(s, _)| s != common_slot).map(|(_, &p)| p).collect();
            let pb = poisson_binomial(&rest);
            let mut a = vec![0.0; n + 1];
            let mut b = vec![0.0; n + 1];
            for k in 0..n {
                a[k] = (1.0 - p_c) * pb[k];
            }
            // k - 1 other slots correct, the remaining n - k wrong
            for k in 1..=n {
                b[k] = p_c * pb[n - k];
            }
            ErrorEvents { a, b }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn poisson_binomial_matches_binomial() {
        let pb = poisson_binomial(&[0.2; 5]);
        let binom = |k: i32| [1.0, 5.0, 10.0, 10.0, 5.0, 1.0][k as usize] * 0.2f64.powi(k) * 0.8f64.powi(5 - k);
        for k in 0..=5 {
            assert_relative_eq!(pb[k as usize], binom(k), epsilon = 1e-15);
        }
    }

    #[test]
    fn equal_probability_examples() {
        let (l, p) = (10usize, 0.03);
        let e = error_event_probs(&vec![p; l - 1], DecoderRole::Common);
        assert_relative_eq!(e.a[1], (l - 1) as f64 * p * (1.0 - p).powi(l as i32 - 2), epsilon = 1e-15);
        let zero = error_event_probs(&vec![0.0; l - 1], DecoderRole::Other { common_slot: 3 });
        assert_eq!(zero.prob(0), 1.0);
        assert!((1..l).all(|k| zero.prob(k) == 0.0));
    }

    #[test]
    fn events_partition_probability() {
        let pf = [0.1, 0.3, 0.05, 0.2];
        for role in [DecoderRole::Common, DecoderRole::Other { common_slot: 1 }] {
            let e = error_event_probs(&pf, role);
            assert_relative_eq!((0..=4).map(|k| e.prob(k)).sum::<f64>(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn other_user_last_event_is_full_propagation() {
        let pf = [0.1, 0.3, 0.05, 0.2];
        let e = error_event_probs(&pf, DecoderRole::Other { common_slot: 1 });
        assert_relative_eq!(e.b[4], 0.3 * 0.9 * 0.95 * 0.8, epsilon = 1e-15);
        assert_relative_eq!(e.b[1], 0.3 * 0.1 * 0.05 * 0.2, epsilon = 1e-15);
    }
}
