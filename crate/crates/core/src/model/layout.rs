//! Coordinate realization of pattern trees.
//!
//! Trees store only relative structure; this walk assigns coordinates with
//! the origin at the bin's top-left corner, vertical nodes advancing x
//! left-to-right and horizontal nodes advancing y top-to-bottom.

use super::instance::{CopyId, Dim};
use super::tree::{CuttingPattern, Node, NodeKind, Orientation};

/// One placed item rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedRect {
    pub copy: CopyId,
    pub rotated: bool,
    pub x: Dim,
    pub y: Dim,
    pub width: Dim,
    pub height: Dim,
}

/// Rectangles of every item node in the pattern, preorder.
pub fn layout(pattern: &CuttingPattern) -> Vec<PlacedRect> {
    let mut out = Vec::new();
    place(&pattern.root, 0, 0, &mut out);
    out
}

fn place(node: &Node, x: Dim, y: Dim, out: &mut Vec<PlacedRect>) {
    match &node.kind {
        NodeKind::Item { copy, rotated } => out.push(PlacedRect {
            copy: *copy,
            rotated: *rotated,
            x,
            y,
            width: node.width,
            height: node.height,
        }),
        NodeKind::Leftover => {}
        NodeKind::Structure {
            orientation,
            children,
        } => {
            let (mut cx, mut cy) = (x, y);
            for child in children {
                place(child, cx, cy, out);
                match orientation {
                    Orientation::Vertical => cx += child.width,
                    Orientation::Horizontal => cy += child.height,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::{BinId, ItemId};
    use crate::model::tree::{NodeId, PatternId};

    fn item_node(id: u32, w: Dim, h: Dim, item: u32) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Item {
                copy: CopyId {
                    item: ItemId(item),
                    index: 0,
                },
                rotated: false,
            },
        }
    }

    fn leftover_node(id: u32, w: Dim, h: Dim) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Leftover,
        }
    }

    fn structure(id: u32, w: Dim, h: Dim, o: Orientation, children: Vec<Node>) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Structure {
                orientation: o,
                children,
            },
        }
    }

    #[test]
    fn single_item_fills_bin_at_origin() {
        let p = CuttingPattern::from_root(PatternId(0), BinId(0), item_node(0, 3, 2, 7));
        let rects = layout(&p);
        assert_eq!(rects.len(), 1);
        let r = rects[0];
        assert_eq!((r.x, r.y, r.width, r.height), (0, 0, 3, 2));
        assert!(!r.rotated);
    }

    #[test]
    fn vertical_root_advances_x() {
        let root = structure(
            0,
            8,
            5,
            Orientation::Vertical,
            vec![item_node(1, 3, 5, 0), item_node(2, 5, 5, 1)],
        );
        let p = CuttingPattern::from_root(PatternId(0), BinId(0), root);
        let rects = layout(&p);
        assert_eq!(rects[1].x, 3);
        assert_eq!(rects[1].y, 0);
    }

    /// Independent oracle: a second, hand-rolled recursion over the same
    /// tree that computes each item's rectangle from scratch by summing the
    /// extents of the siblings preceding it on every structure level.
    fn oracle_rects(node: &Node, x: Dim, y: Dim, out: &mut Vec<(CopyId, Dim, Dim, Dim, Dim)>) {
        match &node.kind {
            NodeKind::Item { copy, .. } => out.push((*copy, x, y, node.width, node.height)),
            NodeKind::Leftover => {}
            NodeKind::Structure {
                orientation,
                children,
            } => {
                for (i, child) in children.iter().enumerate() {
                    let offset: Dim = children[..i]
                        .iter()
                        .map(|c| match orientation {
                            Orientation::Vertical => c.width,
                            Orientation::Horizontal => c.height,
                        })
                        .sum();
                    match orientation {
                        Orientation::Vertical => oracle_rects(child, x + offset, y, out),
                        Orientation::Horizontal => oracle_rects(child, x, y + offset, out),
                    }
                }
            }
        }
    }

    #[test]
    fn nested_tree_matches_independent_oracle() {
        // V root: [H(two stacked items), item, leftover]
        let stacked = structure(
            1,
            4,
            6,
            Orientation::Horizontal,
            vec![item_node(2, 4, 2, 0), item_node(3, 4, 4, 1)],
        );
        let root = structure(
            0,
            10,
            6,
            Orientation::Vertical,
            vec![stacked, item_node(4, 3, 6, 2), leftover_node(5, 3, 6)],
        );
        let p = CuttingPattern::from_root(PatternId(0), BinId(0), root);

        let got: Vec<_> = layout(&p)
            .into_iter()
            .map(|r| (r.copy, r.x, r.y, r.width, r.height))
            .collect();
        let mut expected = Vec::new();
        oracle_rects(&p.root, 0, 0, &mut expected);
        assert_eq!(got, expected);
        assert_eq!(got[1], (CopyId { item: ItemId(1), index: 0 }, 0, 2, 4, 4));
        assert_eq!(got[2], (CopyId { item: ItemId(2), index: 0 }, 4, 0, 3, 6));
    }
}
