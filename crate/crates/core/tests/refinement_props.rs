use amfem::adapt::{run_amfem, AdaptConfig, StopRule};
use amfem::mesh::{Domain, Mesh};
use amfem::problem::Benchmark;
use proptest::prelude::*;

fn min_angle(m: &Mesh) -> f64 {
    (0..m.num_triangles())
        .flat_map(|t| m.angles(t))
        .fold(f64::INFINITY, f64::min)
}

fn domain_strategy() -> impl Strategy<Value = (Domain, usize)> {
    prop_oneof![
        (1usize..=2).prop_map(|r| (Domain::UnitSquare, r)),
        (1usize..=2).prop_map(|r| (Domain::Square, r)),
        (1usize..=2).prop_map(|r| (Domain::LShape, r)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_marking_keeps_mesh_valid(
        (domain, res) in domain_strategy(),
        rounds in proptest::collection::vec((any::<u64>(), 0.05f64..0.6, 1usize..=2), 1..6),
    ) {
        let mut mesh = Mesh::build_initial(domain, res).unwrap();
        let angle0 = min_angle(&mesh);
        let area0 = mesh.total_area();
        for (seed, fraction, b) in rounds {
            let n = mesh.num_triangles();
            // cheap deterministic pseudo-random subset
            let marked: Vec<usize> = (0..n)
                .filter(|&t| {
                    let h = (seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
                    ((h >> 11) as f64 / (1u64 << 53) as f64) < fraction
                })
                .collect();
            let next = mesh.refine(&marked, b).unwrap();
            prop_assert!(next.is_conforming());
            prop_assert!(((next.total_area() - area0) / area0).abs() < 1e-12);
            for e in next.edges() {
                prop_assert_eq!(e.patch().len(), if e.is_boundary() { 1 } else { 2 });
            }
            let mut children = vec![0usize; n];
            for tri in next.triangles() {
                children[tri.parent] += 1;
                let parent = &mesh.triangles()[tri.parent];
                prop_assert_eq!(tri.ancestor, parent.ancestor);
                if tri.generation > parent.generation {
                    prop_assert!(tri.size() < parent.size());
                } else {
                    prop_assert_eq!(tri.area, parent.area);
                }
            }
            for &t in &marked {
                prop_assert!(children[t] >= 1 << b);
            }
            prop_assert!(min_angle(&next) >= 0.5 * angle0 - 1e-12);
            mesh = next;
        }
    }
}

#[test]
fn adaptive_meshes_keep_angles_on_every_benchmark() {
    for name in Benchmark::names() {
        let b = Benchmark::parse(name, None).unwrap();
        let spec = b.spec();
        let angle0 = min_angle(&spec.initial_mesh().unwrap());
        let config = AdaptConfig {
            theta: b.default_theta(),
            stop: StopRule {
                max_iters: 16,
                ..StopRule::default()
            },
            ..AdaptConfig::default()
        };
        let mut worst = f64::INFINITY;
        run_amfem(&spec, &config, |step| {
            worst = worst.min(min_angle(step.mesh));
            assert!(step.mesh.is_conforming());
            Ok(())
        })
        .unwrap();
        assert!(worst >= 0.4 * angle0, "{name}: {worst} vs {angle0}");
    }
}
