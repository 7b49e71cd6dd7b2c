//! A small SVG writer for planar figures: polygons, polylines, dots and
//! labels in data coordinates, mapped into a fixed square canvas with the
//! y axis pointing up. Output depends only on the inputs.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

enum Item {
    Polygon { pts: Vec<[f64; 2]>, stroke: String, fill: String },
    Polyline { pts: Vec<[f64; 2]>, stroke: String },
    Dots { pts: Vec<[f64; 2]>, fill: String, radius: f64 },
    Label { at: [f64; 2], text: String },
}

#[derive(Default)]
pub struct Figure {
    title: Option<String>,
    items: Vec<Item>,
}

fn to_pairs(pts: &[Vec<f64>]) -> Vec<[f64; 2]> {
    pts.iter().filter(|p| p.len() >= 2).map(|p| [p[0], p[1]]).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn new(title: &str) -> Self {
        Figure {
            title: Some(title.to_string()),
            items: Vec::new(),
        }
    }

    pub fn polygon(&mut self, pts: &[Vec<f64>], stroke: &str, fill: &str) -> &mut Self {
        self.items.push(Item::Polygon {
            pts: to_pairs(pts),
            stroke: stroke.into(),
            fill: fill.into(),
        });
        self
    }

    pub fn polyline(&mut self, pts: &[Vec<f64>], stroke: &str) -> &mut Self {
        self.items.push(Item::Polyline {
            pts: to_pairs(pts),
            stroke: stroke.into(),
        });
        self
    }

    pub fn dots(&mut self, pts: &[Vec<f64>], fill: &str, radius: f64) -> &mut Self {
        self.items.push(Item::Dots {
            pts: to_pairs(pts),
            fill: fill.into(),
            radius,
        });
        self
    }

    pub fn label(&mut self, at: [f64; 2], text: &str) -> &mut Self {
        self.items.push(Item::Label {
            at,
            text: text.into(),
        });
        self
    }

    fn bounds(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let mut eat = |p: &[f64; 2]| {
            if p[0].is_finite() && p[1].is_finite() {
                b[0] = b[0].min(p[0]);
                b[1] = b[1].min(p[1]);
                b[2] = b[2].max(p[0]);
                b[3] = b[3].max(p[1]);
            }
        };
        for it in &self.items {
            match it {
                Item::Polygon { pts, .. } | Item::Polyline { pts, .. } | Item::Dots { pts, .. } => {
                    pts.iter().for_each(&mut eat)
                }
                Item::Label { at, .. } => eat(at),
            }
        }
        if !b[0].is_finite() {
            return [-1.0, -1.0, 1.0, 1.0];
        }
        b
    }

    pub fn render(&self) -> String {
        let [x0, y0, x1, y1] = self.bounds();
        // Equal scale on both axes; a degenerate extent still gets a frame.
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let scale = (SIZE - 2.0 * PAD) / span;
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        let map = |p: &[f64; 2]| {
            (
                SIZE / 2.0 + (p[0] - cx) * scale,
                SIZE / 2.0 - (p[1] - cy) * scale,
            )
        };
        let path = |pts: &[[f64; 2]]| {
            pts.iter()
                .map(|p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        if let Some(t) = &self.title {
            let _ = writeln!(s, r#"<title>{}</title>"#, escape(t));
        }
        for it in &self.items {
            match it {
                Item::Polygon { pts, stroke, fill } => {
                    let _ = writeln!(
                        s,
                        r#"<polygon points="{}" stroke="{stroke}" fill="{fill}" stroke-width="1.5"/>"#,
                        path(pts)
                    );
                }
                Item::Polyline { pts, stroke } => {
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" stroke="{stroke}" fill="none" stroke-width="1"/>"#,
                        path(pts)
                    );
                }
                Item::Dots { pts, fill, radius } => {
                    for p in pts {
                        let (x, y) = map(p);
                        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{fill}"/>"#);
                    }
                }
                Item::Label { at, text } => {
                    let (x, y) = map(at);
                    let _ = writeln!(
                        s,
                        r#"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="11">{}</text>"#,
                        escape(text)
                    );
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let mut f = Figure::new("square <1>");
        f.polygon(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], "black", "none")
            .dots(&[vec![0.5, 0.5]], "red", 2.0)
            .label([0.0, 1.0], "K");
        let a = f.render();
        assert_eq!(a, f.render());
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("square &lt;1&gt;"));
        // The unit square fills the padded canvas: corners land on the pads.
        assert!(a.contains("24.000,456.000"));
        assert!(a.contains("456.000,24.000"));
    }

    #[test]
    fn empty_figure_still_renders() {
        let s = Figure::default().render();
        assert!(s.contains("<rect"));
    }
}
