//! Sequence acceleration for slowly converging partial sums.

/// Wynn's epsilon algorithm applied to the whole sequence `s`; returns the
/// deepest even-column entry. Stops early if two neighbours coincide.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let Some(&last) = s.last() else {
        return 0.0;
    };
    let mut best = last;
    let mut prev: Vec<f64> = vec![0.0; s.len() + 1];
    let mut cur: Vec<f64> = s.to_vec();
    for k in 1..s.len() {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 {
                return best;
            }
            let v = prev[j + 1] + 1.0 / diff;
            if !v.is_finite() {
                return best;
            }
            next.push(v);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            best = *cur.last().expect("nonempty column");
        }
    }
    best
}

/// Euler (repeated pairwise averaging) transform of the partial sums of an
/// alternating series. Element `i` of the result is the `depth`-fold average
/// ending at partial sum `i + depth`, so for terms with monotonically
/// shrinking magnitude the estimates keep alternating around the limit while
/// their errors shrink.
pub fn euler_averages(partial_sums: &[f64], depth: usize) -> Vec<f64> {
    let mut row = partial_sums.to_vec();
    for _ in 0..depth {
        if row.len() < 2 {
            return Vec::new();
        }
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln2_partial_sums(n: usize) -> Vec<f64> {
        (1..=n)
            .scan(0.0, |s, k| {
                *s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                Some(*s)
            })
            .collect()
    }

    #[test]
    fn epsilon_accelerates_log2_series() {
        let s = ln2_partial_sums(20);
        let raw_err = (s[19] - std::f64::consts::LN_2).abs();
        let acc_err = (wynn_epsilon(&s) - std::f64::consts::LN_2).abs();
        assert!(raw_err > 1e-2);
        assert!(acc_err < 1e-12, "{acc_err}");
    }

    #[test]
    fn epsilon_on_constant_sequence() {
        assert_eq!(wynn_epsilon(&[2.0, 2.0, 2.0]), 2.0);
        assert_eq!(wynn_epsilon(&[]), 0.0);
    }

    #[test]
    fn euler_averages_bracket() {
        let s = ln2_partial_sums(40);
        let e = euler_averages(&s, 6);
        let l = std::f64::consts::LN_2;
        for w in e.windows(2).skip(2) {
            assert!((w[0] - l) * (w[1] - l) < 0.0);
            assert!((w[1] - l).abs() < (w[0] - l).abs());
        }
    }
}
