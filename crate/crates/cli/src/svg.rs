//! Static profile plots.

use std::fmt::Write;

use graphnls_core::mesh::GraphFunction;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 20.0;

/// Nodal values along the edges laid end to end, one polyline per edge.
pub fn profile(u: &GraphFunction) -> String {
    let v = u.values();
    let chains = u.mesh().chains();
    let total: f64 = chains.iter().map(|c| c.h * c.intervals as f64).sum::<f64>().max(f64::MIN_POSITIVE);
    let (lo, hi) = v.iter().fold((0.0f64, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let sx = |x: f64| MARGIN + x / total * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - lo) / span * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">"#);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#bbb"/>"##,
        sx(0.0),
        sx(total),
        y = sy(0.0)
    );
    let mut start = 0.0;
    for c in chains {
        let pts: Vec<String> = c
            .nodes()
            .enumerate()
            .map(|(k, node)| format!("{:.2},{:.2}", sx(start + k as f64 * c.h), sy(v[node])))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="black" points="{}"/>"#, pts.join(" "));
        start += c.h * c.intervals as f64;
    }
    s.push_str("</svg>\n");
    s
}
