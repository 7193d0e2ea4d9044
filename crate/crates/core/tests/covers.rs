mod common;

use std::sync::Arc;

use ec_core::cover::FiberLabel;
use ec_core::word::reduced_words;
use ec_core::{
    build_abelianized_cover, build_cover, check_discreteness, check_fibers, DeckImage, PresentationAtScale, ScaleGraph,
};
use proptest::prelude::*;

fn circle_presentation(n: usize, eps: f64) -> PresentationAtScale {
    PresentationAtScale::new(Arc::new(ScaleGraph::new(Arc::new(ec_core::spaces::circle(n, 1.0)), eps)))
}

#[test]
fn deck_action_is_equivariant() {
    let strategy = (common::planar_points(4, 9), common::generic_scale(), 2usize..5);
    common::runner(0xc0e5_0001, 64)
        .run(&strategy, |(pts, eps, radius)| {
            let pres = PresentationAtScale::new(Arc::new(ScaleGraph::new(common::space(&pts), eps)));
            let sim = pres.simplify(64);
            let Ok(cover) = build_cover(&pres, &sim, radius) else {
                return Ok(());
            };
            let words = reduced_words(cover.rank, 2);
            for v in 0..cover.len() {
                for g in &words {
                    for h in &words {
                        let gh = g.mul(h);
                        if let DeckImage::Inside(hv) = cover.deck_act(h, v) {
                            let direct = cover.deck_act(&gh, v);
                            let staged = cover.deck_act(g, hv);
                            prop_assert_eq!(direct, staged);
                        }
                    }
                }
                // Covering edges project to scale-graph edges.
                for &u in cover.neighbors(v) {
                    prop_assert!(pres.graph().is_edge(cover.point(u), cover.point(v)));
                }
            }
            prop_assert!(check_discreteness(&cover, 3).is_clean());
            prop_assert!(check_fibers(&cover, 2 * radius + 2).is_clean());
            Ok(())
        })
        .unwrap();
}

#[test]
fn square_cover_is_a_path() {
    let pres = PresentationAtScale::new(Arc::new(ScaleGraph::new(common::square(), 1.2)));
    let sim = pres.simplify(8);
    let cover = build_cover(&pres, &sim, 9).unwrap();
    assert_eq!(cover.len(), 19);
    assert_eq!(cover.edges().len(), 18);
    let report = check_discreteness(&cover, 4);
    assert!(report.is_clean());
    assert!(check_fibers(&cover, 8).is_clean());
}

#[test]
fn circle_cover_unwinds() {
    let pres = circle_presentation(60, 0.5);
    let sim = pres.simplify(64);
    assert_eq!(sim.rank(), 1);
    let cover = build_cover(&pres, &sim, 150).unwrap();
    // Every point has a lift per fiber label reached within the radius.
    let mut per_point = vec![0usize; 60];
    for v in 0..cover.len() {
        per_point[cover.point(v)] += 1;
    }
    assert!(per_point.iter().all(|&k| k >= 2));
    assert!(check_discreteness(&cover, 4).is_clean());
    assert!(check_fibers(&cover, 6).is_clean());
}

#[test]
fn torus_abelian_cover_is_free() {
    let pres = PresentationAtScale::new(Arc::new(ScaleGraph::new(common::flat_torus(5), 1.5)));
    let sim = pres.simplify(64);
    assert!(build_cover(&pres, &sim, 3).is_err());
    let cover = build_abelianized_cover(&pres, &sim, 6);
    assert!(cover.len() > 25);
    let base: Vec<usize> = (0..cover.len()).filter(|&v| cover.point(v) == 0).collect();
    assert!(base.len() > 1);
    for &v in &base {
        assert!(matches!(cover.label(v), FiberLabel::Vector(x) if x.len() == 2));
    }
}
