use serde::{Deserialize, Serialize};

/// Beam training schemes whose search cost is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchScheme {
    Exhaustive,
    /// Tree-dictionary hierarchical search.
    Td,
    /// Three-stage partial search dictionary.
    Psd,
    /// Location-restricted codebook search; cost is the product of the
    /// sub-codebook sizes and does not depend on `N`.
    SensorPba {
        receive: usize,
        ris: usize,
    },
}

/// Smallest `e` with `3^e >= n` (exact `log3` for powers of three).
pub fn ceil_log3(n: u64) -> u64 {
    let mut e = 0;
    let mut p = 1u64;
    while p < n {
        p = p.saturating_mul(3);
        e += 1;
    }
    e
}

/// Number of beam-pair evaluations of a scheme over `N`-point dictionaries.
pub fn search_complexity(scheme: SearchScheme, n: u64) -> u64 {
    let l = ceil_log3(n);
    match scheme {
        SearchScheme::Exhaustive => n * n + n * n * n * n,
        SearchScheme::Td => 18 * n + 12 * l - 3,
        SearchScheme::Psd => 6 * n + 4 * l - 1,
        SearchScheme::SensorPba { receive, ris } => (receive * ris) as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values_at_27() {
        assert_eq!(search_complexity(SearchScheme::Exhaustive, 27), 532_170);
        assert_eq!(search_complexity(SearchScheme::Td, 27), 519);
        assert_eq!(search_complexity(SearchScheme::Psd, 27), 173);
        assert_eq!(search_complexity(SearchScheme::Exhaustive, 1), 2);
        assert_eq!(
            search_complexity(SearchScheme::SensorPba { receive: 9, ris: 7 }, 1000),
            63
        );
    }

    #[test]
    fn log3() {
        assert_eq!(ceil_log3(1), 0);
        assert_eq!(ceil_log3(3), 1);
        assert_eq!(ceil_log3(4), 2);
        assert_eq!(ceil_log3(6561), 8);
    }

    #[test]
    fn ordering_up_to_3_pow_8() {
        for n in 3..=6561u64 {
            let e = search_complexity(SearchScheme::Exhaustive, n);
            let t = search_complexity(SearchScheme::Td, n);
            let p = search_complexity(SearchScheme::Psd, n);
            assert!(e >= t && t >= p, "n = {n}");
        }
    }
}
