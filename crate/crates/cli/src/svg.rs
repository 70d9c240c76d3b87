//! Chamber arrangement as a standalone SVG: `L` to the right, `r` upward.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use treeconf::param_chambers::ChamberArrangement;
use treeconf::rational::Q;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 50.0;
const LEGEND: f64 = 140.0;
const PALETTE: [&str; 12] = [
    "#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#fee391", "#fec44f", "#fe9929", "#ec7014", "#cc4c02",
    "#8c2d04",
];

fn f(x: &Q) -> f64 {
    x.to_f64().expect("finite rational")
}

/// `labels[c] = (h0, h1)` for chamber `c`.
pub fn arrangement(title: &str, arr: &ChamberArrangement, labels: &[(usize, usize)]) -> String {
    let bound = f(&arr.bound);
    let px = |l: f64| MARGIN + l / bound * SIZE;
    let py = |r: f64| MARGIN + SIZE - r / bound * SIZE;
    let h0s: Vec<usize> = labels.iter().map(|x| x.0).collect::<BTreeSet<_>>().into_iter().collect();
    let color = |h0: usize| PALETTE[h0s.binary_search(&h0).unwrap() % PALETTE.len()];
    let (w, h) = (2.0 * MARGIN + SIZE + LEGEND, 2.0 * MARGIN + SIZE);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#).unwrap();
    writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="14">{title}</text>"#, MARGIN / 2.0).unwrap();
    for (c, &(h0, h1)) in arr.chambers.iter().zip(labels) {
        let pts: Vec<String> = c.polygon.vertices.iter().map(|(r, l)| format!("{:.2},{:.2}", px(f(l)), py(f(r)))).collect();
        writeln!(s, r##"<polygon points="{}" fill="{}" stroke="#333" stroke-width="1"/>"##, pts.join(" "), color(h0)).unwrap();
        let (r, l) = c.polygon.centroid();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">({h0},{h1})</text>"#, px(f(&l)), py(f(&r))).unwrap();
    }
    for t in 0..=(bound.floor() as i64) {
        let v = t as f64;
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{t}</text>"#, px(v), py(0.0) + 14.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{t}</text>"#, px(0.0) - 4.0, py(v) + 3.0).unwrap();
    }
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">L</text>"#, px(bound / 2.0), py(0.0) + 32.0).unwrap();
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">r</text>"#, px(0.0) - 30.0, py(bound / 2.0)).unwrap();
    let lx = 2.0 * MARGIN + SIZE;
    writeln!(s, r#"<text x="{lx}" y="{MARGIN}" font-size="12">h0</text>"#).unwrap();
    for (k, &h0) in h0s.iter().enumerate() {
        let y = MARGIN + 10.0 + 20.0 * k as f64;
        writeln!(s, r##"<rect x="{lx}" y="{y}" width="14" height="14" fill="{}" stroke="#333"/>"##, color(h0)).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" font-size="11">{h0}</text>"#, lx + 20.0, y + 11.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
