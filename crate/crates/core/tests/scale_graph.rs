mod common;

use std::sync::Arc;

use ec_core::tower::ScaleAnalysis;
use ec_core::{chain_connected, power_reach, Certification, FiniteMetricSpace, MetricKind, ScaleGraph};
use proptest::prelude::*;

#[test]
fn filtration_is_monotone() {
    let strategy = (common::planar_points(2, 14), common::generic_scale(), common::generic_scale());
    common::runner(0x6a11_0001, 128)
        .run(&strategy, |(pts, a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let s = common::space(&pts);
            let fine = ScaleGraph::new(s.clone(), lo);
            let coarse = ScaleGraph::new(s, hi);
            for &(u, v) in fine.edges() {
                prop_assert!(coarse.is_edge(u as usize, v as usize));
            }
            prop_assert!(fine.triangle_count() <= coarse.triangle_count());
            Ok(())
        })
        .unwrap();
}

#[test]
fn edges_are_strict_and_sorted() {
    let strategy = (common::planar_points(2, 14), common::generic_scale());
    common::runner(0x6a11_0002, 128)
        .run(&strategy, |(pts, eps)| {
            let s = common::space(&pts);
            let g = ScaleGraph::new(s.clone(), eps);
            let mut expected = Vec::new();
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    if s.dist(i, j) < eps {
                        expected.push((i as u32, j as u32));
                    }
                }
            }
            prop_assert_eq!(g.edges(), &expected[..]);
            for (id, &(u, v)) in g.edges().iter().enumerate() {
                prop_assert_eq!(g.edge_id(u as usize, v as usize), Some(id));
                prop_assert_eq!(g.edge_id(v as usize, u as usize), Some(id));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn power_reach_grows_to_the_component() {
    let strategy = (common::planar_points(2, 14), common::generic_scale());
    common::runner(0x6a11_0003, 128)
        .run(&strategy, |(pts, eps)| {
            let s = common::space(&pts);
            let g = ScaleGraph::new(s.clone(), eps);
            let comps = chain_connected(&g);
            for x in 0..s.len() {
                let mut prev = power_reach(&g, x, 0);
                prop_assert_eq!(&prev, &vec![x]);
                for n in 1..=s.len() {
                    let next = power_reach(&g, x, n);
                    prop_assert!(prev.iter().all(|p| next.contains(p)));
                    prev = next;
                }
                let component: Vec<usize> = (0..s.len()).filter(|&y| comps.same(x, y)).collect();
                prop_assert_eq!(prev, component);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn invariants_survive_relabeling() {
    let strategy = (common::planar_points(3, 12), common::generic_scale()).prop_flat_map(|(pts, eps)| {
        let n = pts.len();
        (Just(pts), Just(eps), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
    });
    common::runner(0x6a11_0004, 96)
        .run(&strategy, |(pts, eps, order)| {
            let s = common::space(&pts);
            let p = Arc::new(s.permuted(&order));
            prop_assert_eq!(p.basepoint(), order.iter().position(|&i| i == 0).unwrap());
            let a = ScaleAnalysis::new(s, eps, 64);
            let b = ScaleAnalysis::new(p, eps, 64);
            prop_assert_eq!(a.invariants(), b.invariants());
            prop_assert_eq!(a.components, b.components);
            prop_assert_eq!(a.presentation.graph().edge_count(), b.presentation.graph().edge_count());
            Ok(())
        })
        .unwrap();
}

/// Random bipartite graph as a 1/2-valued metric: at scale 1.5 the scale graph
/// is the bipartite graph itself and has no triangles.
fn bipartite() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (2usize..6, 2usize..6).prop_flat_map(|(l, r)| {
        prop::collection::vec(any::<bool>(), l * r).prop_map(move |bits| {
            let n = l + r;
            let mut m = vec![vec![2.0; n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 0.0;
            }
            for a in 0..l {
                for b in 0..r {
                    if bits[a * r + b] {
                        m[a][l + b] = 1.0;
                        m[l + b][a] = 1.0;
                    }
                }
            }
            (n, m)
        })
    })
}

#[test]
fn triangle_free_rank_is_cycle_rank() {
    common::runner(0x6a11_0005, 128)
        .run(&bipartite(), |(n, m)| {
            let s = Arc::new(FiniteMetricSpace::from_matrix(&m, 0, MetricKind::Metric).unwrap());
            let a = ScaleAnalysis::new(s, 1.5, 64);
            prop_assert_eq!(a.presentation.graph().triangle_count(), 0);
            // Oracle: vertices and edges of the basepoint component by DFS.
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    if m[u][v] == 1.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            let vertices = seen.iter().filter(|&&b| b).count();
            let edges = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| seen[u] && m[u][v] == 1.0)
                .count();
            prop_assert_eq!(a.betti(), edges + 1 - vertices);
            prop_assert!(a.invariants().torsion.is_empty());
            prop_assert!(a.certification().is_free());
            if a.betti() > 0 {
                prop_assert_eq!(a.certification(), Certification::FreeCertified);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn space_files_round_trip() {
    common::runner(0x6a11_0006, 64)
        .run(&common::planar_points(1, 10), |pts| {
            let s = common::space(&pts);
            let back = FiniteMetricSpace::from_json(&s.to_json()).unwrap();
            prop_assert_eq!(&back, &*s);
            let m: Vec<Vec<f64>> = (0..s.len()).map(|i| (0..s.len()).map(|j| s.dist(i, j)).collect()).collect();
            let as_matrix = FiniteMetricSpace::from_matrix(&m, 0, MetricKind::Metric).unwrap();
            let back = FiniteMetricSpace::from_json(&as_matrix.to_json()).unwrap();
            prop_assert_eq!(back, as_matrix);
            Ok(())
        })
        .unwrap();
}

#[test]
fn rejects_invalid_matrices() {
    let bad = [
        vec![vec![0.0, 1.0], vec![2.0, 0.0]],
        vec![vec![0.0, -1.0], vec![-1.0, 0.0]],
        vec![vec![1.0, 1.0], vec![1.0, 0.0]],
        vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
    ];
    for m in bad {
        assert!(FiniteMetricSpace::from_matrix(&m, 0, MetricKind::Metric).is_err(), "{m:?}");
    }
    let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
    // Points at distance zero stay distinct and are joined at every scale.
    let s = Arc::new(FiniteMetricSpace::from_matrix(&zero, 0, MetricKind::Pseudometric).unwrap());
    assert_eq!(ScaleGraph::new(s, 1e-9).edge_count(), 1);
}
