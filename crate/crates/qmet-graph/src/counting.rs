use num_bigint::BigUint;

/// Number of m-qubit stabilizer states, 2^m ∏_{j=0}^{m-1} (2^{m-j} + 1).
pub fn stabilizer_count(m: u32) -> BigUint {
    assert!(m <= 64, "m ≤ 64");
    let mut s = BigUint::from(1u8) << m;
    for j in 0..m {
        s *= (BigUint::from(1u8) << (m - j)) + 1u8;
    }
    s
}

fn binomial(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Smallest k with k ≥ n^{1-ε/2}, at least 1.
pub fn heisenberg_threshold(n: u32, eps: f64) -> u32 {
    let t = (n as f64).powf(1.0 - eps / 2.0);
    ((t - 1e-9).ceil() as u32).max(1)
}

/// Σ_{k ≥ n^{1-ε/2}} C(n-1, k-1) 2^k s_{n-k}: an upper bound on the number of
/// n-qubit stabilizer groups whose X-encoded QFI reaches n^{2-ε}.
pub fn heisenberg_count_bound(n: u32, eps: f64) -> BigUint {
    assert!((1..=64).contains(&n), "1 ≤ n ≤ 64");
    assert!(eps > 0.0 && eps <= 2.0, "ε must lie in (0, 2]");
    let k0 = heisenberg_threshold(n, eps);
    (k0..=n)
        .map(|k| binomial(n - 1, k - 1) * (BigUint::from(1u8) << k) * stabilizer_count(n - k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(stabilizer_count(0), BigUint::from(1u8));
        assert_eq!(stabilizer_count(1), BigUint::from(6u8));
        assert_eq!(stabilizer_count(2), BigUint::from(60u8));
        assert_eq!(stabilizer_count(3), BigUint::from(1080u32));
    }

    #[test]
    fn thresholds() {
        assert_eq!(heisenberg_threshold(4, 1.0), 2);
        assert_eq!(heisenberg_threshold(9, 2.0), 1);
        let want: u32 = (2..=4).map(|k| [1u32, 3, 3, 1][k - 1] * (1 << k) * [1u32, 6, 60][4 - k]).sum();
        assert_eq!(heisenberg_count_bound(4, 1.0), BigUint::from(want));
    }
}
