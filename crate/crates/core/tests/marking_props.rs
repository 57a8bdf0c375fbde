use amfem::adapt::mark;
use proptest::prelude::*;

fn sum(eta: &[f64], set: impl IntoIterator<Item = usize>) -> f64 {
    set.into_iter().map(|i| eta[i]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dorfler_set_is_minimal(
        raw in proptest::collection::vec(0u32..20, 1..=12),
        theta in 0.05f64..=1.0,
    ) {
        // a coarse grid of values produces ties and zeros
        let eta: Vec<f64> = raw.iter().map(|&v| v as f64 / 7.0).collect();
        let total: f64 = eta.iter().sum();
        let m = mark(&eta, theta).unwrap();
        prop_assert!(m.windows(2).all(|w| w[0] < w[1]));
        if total == 0.0 {
            prop_assert!(m.is_empty());
            return Ok(());
        }
        let target = theta * theta * total;
        prop_assert!(sum(&eta, m.iter().copied()) >= target * (1.0 - 1e-12));

        let n = eta.len();
        let best = (0u32..1 << n)
            .filter(|s| sum(&eta, (0..n).filter(|i| s >> i & 1 == 1)) >= target * (1.0 - 1e-12))
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap();
        prop_assert_eq!(m.len(), best);

        // dropping the smallest marked indicator breaks the property
        let smallest = *m.iter().min_by(|&&a, &&b| eta[a].total_cmp(&eta[b])).unwrap();
        let rest = sum(&eta, m.iter().copied().filter(|&i| i != smallest));
        prop_assert!(rest < target);

        // marked elements dominate unmarked ones, ties to the lower id
        for &i in &m {
            for j in (0..n).filter(|j| !m.contains(j)) {
                prop_assert!(eta[i] > eta[j] || (eta[i] == eta[j] && i < j));
            }
        }
    }
}
