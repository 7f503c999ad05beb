//! Per-slot UL, DL and global rewards.

/// +1 when INC loads differ by at most one user, -1 when any INC exceeds
/// its association capacity, 0 otherwise.
pub fn ul_reward(loads: &[usize], capacity: usize) -> f64 {
    if loads.iter().any(|&l| l > capacity) {
        return -1.0;
    }
    let max = loads.iter().copied().max().unwrap_or(0);
    let min = loads.iter().copied().min().unwrap_or(0);
    if max - min <= 1 {
        1.0
    } else {
        0.0
    }
}

/// -0.5 times the mean normalized downlink power.
pub fn dl_reward(powers: &[f64], p_min: f64, p_max: f64) -> f64 {
    if powers.is_empty() {
        return 0.0;
    }
    let mean = powers
        .iter()
        .map(|p| (p - p_min) / (p_max - p_min))
        .sum::<f64>()
        / powers.len() as f64;
    -0.5 * mean
}

/// -1 plus the total utility normalized by M·U_scale.
pub fn gl_reward(utilities: &[f64], utility_scale: f64) -> f64 {
    let m = utilities.len().max(1) as f64;
    -1.0 + utilities.iter().sum::<f64>() / (m * utility_scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ul_cases() {
        assert_eq!(ul_reward(&[2, 2, 2, 2], 5), 1.0);
        assert_eq!(ul_reward(&[6, 0, 0, 0], 5), -1.0);
        assert_eq!(ul_reward(&[4, 1, 1, 1], 5), 0.0);
        assert_eq!(ul_reward(&[1, 0, 1, 0], 5), 1.0);
    }

    #[test]
    fn dl_cases() {
        assert_eq!(dl_reward(&[0.0; 3], 0.0, 20.0), 0.0);
        assert_eq!(dl_reward(&[20.0; 3], 0.0, 20.0), -0.5);
        assert_eq!(dl_reward(&[0.0, 20.0], 0.0, 20.0), -0.25);
    }

    #[test]
    fn gl_cases() {
        assert_eq!(gl_reward(&[0.0; 4], 1.0), -1.0);
        assert_eq!(gl_reward(&[2.0; 4], 2.0), 0.0);
        let u = [0.3, -0.1, 0.7];
        assert!((gl_reward(&u, 1.0) - (-1.0 + 0.9 / 3.0)).abs() < 1e-15);
    }
}
