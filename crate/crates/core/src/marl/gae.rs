//! Generalized advantage estimation.

use crate::error::ModelError;

/// A_t = Σ_i (γλ)^i δ_{t+i} with δ_t = R_t + γ V_{t+1} - V_t, where V
/// after the last step is `last_value`.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    last_value: f64,
    gamma: f64,
    lambda: f64,
) -> Result<Vec<f64>, ModelError> {
    if rewards.len() != values.len() {
        return Err(ModelError::LengthMismatch {
            rewards: rewards.len(),
            values: values.len(),
        });
    }
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut acc = 0.0;
    for t in (0..n).rev() {
        let next = if t + 1 < n { values[t + 1] } else { last_value };
        let delta = rewards[t] + gamma * next - values[t];
        acc = delta + gamma * lambda * acc;
        adv[t] = acc;
    }
    Ok(adv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_give_zeros() {
        assert_eq!(gae(&[0.0; 5], &[0.0; 5], 0.0, 0.9, 0.95).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn single_step() {
        let a = gae(&[1.0], &[1.0], 2.0, 0.9, 0.95).unwrap();
        assert!((a[0] - 1.8).abs() < 1e-15);
    }

    #[test]
    fn two_steps() {
        // δ = (1, 2) with γ = 0.9, γλ = 0.45.
        let gamma = 0.9;
        let lambda = 0.5;
        let a = gae(&[1.0, 2.0], &[0.0, 0.0], 0.0, gamma, lambda).unwrap();
        assert!((a[0] - 1.9).abs() < 1e-15);
        assert_eq!(a[1], 2.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(gae(&[1.0], &[], 0.0, 0.9, 0.95).is_err());
    }
}
