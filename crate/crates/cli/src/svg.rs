//! Deterministic SVG rendering: one image per pattern, items dark with id
//! labels, leftovers light.

use gdrr::model::{layout, CuttingPattern, Dim, Node, NodeKind, Orientation, Solution};

const ITEM_FILL: &str = "#4d4f56";
const ITEM_TEXT: &str = "#f5f5f5";
const LEFTOVER_FILL: &str = "#e9e6de";
const FRAME: &str = "#1a1a1a";

/// Renders one pattern to a standalone SVG document. All geometry is
/// integral, so output bytes are identical across runs.
pub fn render_pattern(pattern: &CuttingPattern) -> String {
    let w = pattern.width();
    let h = pattern.height();
    let mut out = String::with_capacity(1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 -1 {} {}\" \
         width=\"{}\" height=\"{}\">\n",
        w + 2,
        h + 2,
        (w + 2) * 8,
        (h + 2) * 8,
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"{LEFTOVER_FILL}\" \
         stroke=\"{FRAME}\" stroke-width=\"0.4\"/>\n"
    ));

    // leftover outlines first, then items on top
    render_leftovers(&pattern.root, 0, 0, &mut out);
    for rect in layout(pattern) {
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{ITEM_FILL}\" \
             stroke=\"{FRAME}\" stroke-width=\"0.15\"/>\n",
            rect.x, rect.y, rect.width, rect.height
        ));
        let label = if rect.rotated {
            format!("{}r", rect.copy.item.0)
        } else {
            rect.copy.item.0.to_string()
        };
        let font = (rect.width.min(rect.height) as f64 * 0.45).max(0.8);
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" fill=\"{ITEM_TEXT}\" font-size=\"{font:.2}\" \
             font-family=\"monospace\" text-anchor=\"middle\" dominant-baseline=\"central\"\
             >{label}</text>\n",
            rect.x as f64 + rect.width as f64 / 2.0,
            rect.y as f64 + rect.height as f64 / 2.0,
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn render_leftovers(node: &Node, x: Dim, y: Dim, out: &mut String) {
    match &node.kind {
        NodeKind::Leftover => {
            out.push_str(&format!(
                "  <rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{}\" fill=\"{LEFTOVER_FILL}\" \
                 stroke=\"{FRAME}\" stroke-width=\"0.05\" stroke-dasharray=\"0.4 0.3\"/>\n",
                node.width, node.height
            ));
        }
        NodeKind::Item { .. } => {}
        NodeKind::Structure {
            orientation,
            children,
        } => {
            let (mut cx, mut cy) = (x, y);
            for child in children {
                render_leftovers(child, cx, cy, out);
                match orientation {
                    Orientation::Vertical => cx += child.width,
                    Orientation::Horizontal => cy += child.height,
                }
            }
        }
    }
}

/// Renders the whole solution: `(file name, svg body)` per pattern.
pub fn render_solution(solution: &Solution) -> Vec<(String, String)> {
    solution
        .patterns()
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("pattern_{i:03}.svg"), render_pattern(p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_instance, InstanceFormat};
    use gdrr::search::{gdrr, SearchParams};

    fn solved() -> Solution {
        let named = parse_instance(
            br#"{"bins":[{"width":10,"height":10}],"items":[{"width":3,"height":2,"demand":4}]}"#,
            InstanceFormat::Canonical,
            "m.json",
            None,
        )
        .unwrap();
        let mut params = SearchParams::auto(&named.instance, std::time::Duration::ZERO);
        params.iteration_limit = Some(300);
        gdrr(&named.instance, &params, &mut |_| {})
            .best
            .expect("solvable")
    }

    #[test]
    fn single_item_renders_one_item_rect_inside_frame() {
        let named = parse_instance(
            br#"{"bins":[{"width":3,"height":2}],"items":[{"width":3,"height":2,"demand":1}]}"#,
            InstanceFormat::Canonical,
            "m.json",
            None,
        )
        .unwrap();
        let mut params = SearchParams::auto(&named.instance, std::time::Duration::ZERO);
        params.iteration_limit = Some(50);
        let solution = gdrr(&named.instance, &params, &mut |_| {})
            .best
            .expect("solvable");
        let images = render_solution(&solution);
        assert_eq!(images.len(), 1);
        let body = &images[0].1;
        assert!(body.contains(&format!("fill=\"{ITEM_FILL}\"")));
        assert!(body.starts_with("<svg "));
        assert!(body.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let solution = solved();
        let first = render_solution(&solution);
        let second = render_solution(&solution);
        assert_eq!(first, second);
    }

    #[test]
    fn item_rects_in_the_svg_match_the_layout_geometry() {
        let solution = solved();
        for (pattern, (_, body)) in solution.patterns().iter().zip(render_solution(&solution)) {
            for rect in layout(pattern) {
                let needle = format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{ITEM_FILL}\"",
                    rect.x, rect.y, rect.width, rect.height
                );
                assert!(body.contains(&needle), "missing {needle}");
            }
        }
    }
}
