//! DOT and SVG text output.

use std::fmt::Write;

use ec_core::cover::FiberLabel;
use ec_core::{FoldedSubgroupGraph, ScaleGraph, ScaleTower, TruncatedCover};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected scale graph, one node per point.
pub fn graph_dot(graph: &ScaleGraph) -> String {
    let space = graph.space();
    let mut out = String::new();
    writeln!(out, "graph scale {{").unwrap();
    writeln!(out, "  // scale {}", graph.scale()).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for i in 0..graph.len() {
        let label = space.labels().map_or_else(|| i.to_string(), |l| l[i].clone());
        let mut attrs = format!("label={}", quote(&label));
        if let Some(c) = space.coords(i).filter(|c| c.len() == 2) {
            write!(attrs, ", pos=\"{},{}!\"", c[0], c[1]).unwrap();
        }
        if i == graph.basepoint() {
            attrs.push_str(", shape=doublecircle");
        }
        writeln!(out, "  {i} [{attrs}];").unwrap();
    }
    for &(a, b) in graph.edges() {
        writeln!(out, "  {a} -- {b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Folded subgroup graph; state 0 is the base.
pub fn folded_dot(folded: &FoldedSubgroupGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph folded {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for s in 0..folded.states() {
        let shape = if s == 0 { "doublecircle" } else { "circle" };
        writeln!(out, "  {s} [shape={shape}];").unwrap();
    }
    for t in folded.transitions() {
        writeln!(out, "  {} -> {} [label=\"g{}\"];", t.from, t.to, t.generator).unwrap();
    }
    out.push_str("}\n");
    out
}

fn fiber_label(label: &FiberLabel) -> String {
    match label {
        FiberLabel::Word(w) => w.to_string(),
        FiberLabel::Vector(v) => {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }
}

/// Truncated cover with vertices labeled `point:word`.
pub fn cover_dot(cover: &TruncatedCover) -> String {
    let mut out = String::new();
    writeln!(out, "graph cover {{").unwrap();
    writeln!(out, "  // scale {}, radius {}", cover.scale, cover.radius).unwrap();
    for v in 0..cover.len() {
        let label = format!("{}:{}", cover.point(v), fiber_label(cover.label(v)));
        writeln!(out, "  {v} [label={}];", quote(&label)).unwrap();
    }
    for (a, b) in cover.edges() {
        writeln!(out, "  {a} -- {b};").unwrap();
    }
    out.push_str("}\n");
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 56.0;

/// Betti number against scale on a log axis, critical intervals shaded.
pub fn tower_svg(tower: &ScaleTower) -> String {
    let scales: Vec<f64> = tower.scales.iter().map(|s| s.scale()).collect();
    let betti: Vec<usize> = tower.scales.iter().map(|s| s.betti()).collect();
    let (lo, hi) = (scales.last().unwrap().log10(), scales[0].log10());
    // Pad the axis so a single scale still has width.
    let pad = ((hi - lo) * 0.08).max(0.1);
    let (lo, hi) = (lo - pad, hi + pad);
    let top_betti = betti.iter().copied().max().unwrap_or(0).max(1);
    let x = |s: f64| LEFT + (s.log10() - lo) / (hi - lo) * (WIDTH - LEFT - RIGHT);
    let y = |b: usize| HEIGHT - BOTTOM - b as f64 / top_betti as f64 * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    for c in &tower.critical {
        let (x0, x1) = (x(c.lower), x(c.upper));
        writeln!(
            out,
            "<rect class=\"critical\" x=\"{x0:.2}\" y=\"{TOP}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#f6d5d5\"/>",
            x1 - x0,
            HEIGHT - TOP - BOTTOM
        )
        .unwrap();
    }
    // Axes.
    let (x_axis, y_axis) = (HEIGHT - BOTTOM, LEFT);
    writeln!(out, "<line x1=\"{y_axis}\" y1=\"{x_axis}\" x2=\"{}\" y2=\"{x_axis}\" stroke=\"black\"/>", WIDTH - RIGHT)
        .unwrap();
    writeln!(out, "<line x1=\"{y_axis}\" y1=\"{TOP}\" x2=\"{y_axis}\" y2=\"{x_axis}\" stroke=\"black\"/>").unwrap();
    let step = top_betti.div_ceil(8);
    for b in (0..=top_betti).step_by(step) {
        let yb = y(b);
        writeln!(out, "<line x1=\"{}\" y1=\"{yb:.2}\" x2=\"{y_axis}\" y2=\"{yb:.2}\" stroke=\"black\"/>", y_axis - 4.0)
            .unwrap();
        writeln!(out, "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{b}</text>", y_axis - 7.0, yb + 4.0).unwrap();
    }
    for &s in &scales {
        let xs = x(s);
        writeln!(out, "<line x1=\"{xs:.2}\" y1=\"{x_axis}\" x2=\"{xs:.2}\" y2=\"{}\" stroke=\"black\"/>", x_axis + 4.0)
            .unwrap();
        writeln!(
            out,
            "<text x=\"{xs:.2}\" y=\"{}\" text-anchor=\"end\" transform=\"rotate(-35 {xs:.2} {})\">{}</text>",
            x_axis + 16.0,
            x_axis + 16.0,
            format_scale(s)
        )
        .unwrap();
    }
    writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">scale (log)</text>",
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 8.0
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">betti</text>",
        (TOP + HEIGHT - BOTTOM) / 2.0
    )
    .unwrap();

    // Each value holds from its scale down to the next finer one.
    let mut path = format!("M {:.2} {:.2}", x(scales[0]), y(betti[0]));
    for i in 1..scales.len() {
        write!(path, " H {:.2} V {:.2}", x(scales[i]), y(betti[i])).unwrap();
    }
    writeln!(out, "<path d=\"{path}\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"2\"/>").unwrap();
    for (&s, &b) in scales.iter().zip(&betti) {
        writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f4e99\"/>", x(s), y(b)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn format_scale(s: f64) -> String {
    let t = format!("{s:.4}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "0" {
        format!("{s:.2e}")
    } else {
        t.to_string()
    }
}
