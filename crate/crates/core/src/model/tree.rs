//! Cutting-pattern trees.
//!
//! A pattern is a rooted tree over one bin. Internal (structure) nodes carry
//! a cut orientation and partition their rectangle into their children along
//! that axis; levels alternate orientation. Leaves are placed items or
//! leftover (unused) rectangles. The representation can only express
//! guillotine-cuttable layouts, so guillotine feasibility holds by
//! construction.

use super::instance::{Area, BinId, CopyId, Dim};

/// Cut direction of a structure node. Vertical cuts partition width,
/// horizontal cuts partition height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl Orientation {
    pub fn perpendicular(self) -> Orientation {
        match self {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        }
    }
}

/// Identifies a node within one pattern; stable across normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Identifies a pattern within one solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Structure {
        orientation: Orientation,
        children: Vec<Node>,
    },
    Item {
        copy: CopyId,
        rotated: bool,
    },
    Leftover,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub width: Dim,
    pub height: Dim,
    pub kind: NodeKind,
}

impl Node {
    pub fn area(&self) -> Area {
        self.width * self.height
    }

    pub fn is_leftover(&self) -> bool {
        matches!(self.kind, NodeKind::Leftover)
    }

    pub fn is_item(&self) -> bool {
        matches!(self.kind, NodeKind::Item { .. })
    }

    pub fn is_structure(&self) -> bool {
        matches!(self.kind, NodeKind::Structure { .. })
    }

    pub fn find(&self, id: NodeId) -> Option<&Node> {
        if self.id == id {
            return Some(self);
        }
        match &self.kind {
            NodeKind::Structure { children, .. } => children.iter().find_map(|c| c.find(id)),
            _ => None,
        }
    }

    /// Depth-first preorder visit.
    pub fn visit(&self, f: &mut impl FnMut(&Node)) {
        f(self);
        if let NodeKind::Structure { children, .. } = &self.kind {
            for child in children {
                child.visit(f);
            }
        }
    }

    pub fn for_each_leftover(&self, f: &mut impl FnMut(&Node)) {
        self.visit(&mut |n| {
            if n.is_leftover() {
                f(n);
            }
        });
    }

    /// Item copies in this subtree, preorder.
    pub fn collect_copies(&self, out: &mut Vec<CopyId>) {
        self.visit(&mut |n| {
            if let NodeKind::Item { copy, .. } = n.kind {
                out.push(copy);
            }
        });
    }

    /// Structural shape ignoring node ids, for outcome comparison.
    pub fn shape(&self) -> NodeShape {
        match &self.kind {
            NodeKind::Structure {
                orientation,
                children,
            } => NodeShape::Structure {
                orientation: *orientation,
                width: self.width,
                height: self.height,
                children: children.iter().map(Node::shape).collect(),
            },
            NodeKind::Item { copy, rotated } => NodeShape::Item {
                copy: *copy,
                rotated: *rotated,
                width: self.width,
                height: self.height,
            },
            NodeKind::Leftover => NodeShape::Leftover {
                width: self.width,
                height: self.height,
            },
        }
    }

    /// Restores normal form bottom-up: drops zero-area leftovers, splices
    /// same-orientation structure children into their parent, merges runs of
    /// adjacent leftover siblings and collapses single-child structures.
    pub fn normalize(self) -> Node {
        let Node {
            id,
            width,
            height,
            kind,
        } = self;
        let (orientation, children) = match kind {
            NodeKind::Structure {
                orientation,
                children,
            } => (orientation, children),
            kind => {
                return Node {
                    id,
                    width,
                    height,
                    kind,
                }
            }
        };

        let mut flat: Vec<Node> = Vec::with_capacity(children.len());
        for child in children {
            let child = child.normalize();
            if child.area() == 0 {
                debug_assert!(child.is_leftover(), "only leftovers may be zero-area");
                continue;
            }
            match child.kind {
                NodeKind::Structure {
                    orientation: child_orientation,
                    children: grandchildren,
                } if child_orientation == orientation => flat.extend(grandchildren),
                _ => flat.push(child),
            }
        }

        let mut merged: Vec<Node> = Vec::with_capacity(flat.len());
        for child in flat {
            match merged.last_mut() {
                Some(last) if last.is_leftover() && child.is_leftover() => match orientation {
                    Orientation::Vertical => last.width += child.width,
                    Orientation::Horizontal => last.height += child.height,
                },
                _ => merged.push(child),
            }
        }

        if merged.len() == 1 {
            let only = merged.pop().unwrap();
            debug_assert_eq!((only.width, only.height), (width, height));
            return only;
        }
        Node {
            id,
            width,
            height,
            kind: NodeKind::Structure {
                orientation,
                children: merged,
            },
        }
    }

    /// Checks the normal-form invariants for this subtree. Returns the first
    /// violation found, described; used by tests and the validator's oracle
    /// counterpart lives in `validate`.
    pub fn check_normal_form(&self) -> Result<(), String> {
        self.check_inner(None)
    }

    fn check_inner(&self, parent_orientation: Option<Orientation>) -> Result<(), String> {
        if self.width == 0 || self.height == 0 {
            return Err(format!("node {:?} has zero area", self.id));
        }
        let NodeKind::Structure {
            orientation,
            children,
        } = &self.kind
        else {
            return Ok(());
        };
        if parent_orientation == Some(*orientation) {
            return Err(format!(
                "structure node {:?} shares its parent's orientation",
                self.id
            ));
        }
        if children.len() < 2 {
            return Err(format!(
                "structure node {:?} has fewer than 2 children",
                self.id
            ));
        }
        let (mut along_sum, cross) = (0, match orientation {
            Orientation::Vertical => self.height,
            Orientation::Horizontal => self.width,
        });
        let mut prev_leftover = false;
        for child in children {
            let (along, child_cross) = match orientation {
                Orientation::Vertical => (child.width, child.height),
                Orientation::Horizontal => (child.height, child.width),
            };
            if child_cross != cross {
                return Err(format!(
                    "child {:?} does not span its parent's cross axis",
                    child.id
                ));
            }
            along_sum += along;
            if child.is_leftover() && prev_leftover {
                return Err(format!("adjacent leftover siblings at {:?}", child.id));
            }
            prev_leftover = child.is_leftover();
            child.check_inner(Some(*orientation))?;
        }
        let along_total = match orientation {
            Orientation::Vertical => self.width,
            Orientation::Horizontal => self.height,
        };
        if along_sum != along_total {
            return Err(format!(
                "children of {:?} do not partition it ({} != {})",
                self.id, along_sum, along_total
            ));
        }
        Ok(())
    }
}

/// Id-free structural form of a node, used to compare edit outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeShape {
    Structure {
        orientation: Orientation,
        width: Dim,
        height: Dim,
        children: Vec<NodeShape>,
    },
    Item {
        copy: CopyId,
        rotated: bool,
        width: Dim,
        height: Dim,
    },
    Leftover {
        width: Dim,
        height: Dim,
    },
}

impl PartialOrd for Orientation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Orientation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        fn rank(o: &Orientation) -> u8 {
            match o {
                Orientation::Vertical => 0,
                Orientation::Horizontal => 1,
            }
        }
        rank(self).cmp(&rank(other))
    }
}

/// One bin with its cutting-pattern tree. The root spans the whole bin; a
/// freshly opened bin is a single root leftover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingPattern {
    pub id: PatternId,
    pub bin: BinId,
    pub root: Node,
    next_node: u32,
}

impl CuttingPattern {
    /// Opens a fresh bin: the root is one leftover covering it.
    pub fn fresh(id: PatternId, bin: BinId, width: Dim, height: Dim) -> Self {
        CuttingPattern {
            id,
            bin,
            root: Node {
                id: NodeId(0),
                width,
                height,
                kind: NodeKind::Leftover,
            },
            next_node: 1,
        }
    }

    pub fn from_root(id: PatternId, bin: BinId, root: Node) -> Self {
        let mut max_id = 0;
        root.visit(&mut |n| max_id = max_id.max(n.id.0));
        CuttingPattern {
            id,
            bin,
            root,
            next_node: max_id + 1,
        }
    }

    pub fn next_node_id(&mut self) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        id
    }

    pub fn bin_area(&self) -> Area {
        self.root.area()
    }

    pub fn width(&self) -> Dim {
        self.root.width
    }

    pub fn height(&self) -> Dim {
        self.root.height
    }

    /// True when no item is placed in this pattern (single leftover root).
    pub fn is_all_leftover(&self) -> bool {
        self.root.is_leftover()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::ItemId;

    fn leftover(id: u32, w: Dim, h: Dim) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Leftover,
        }
    }

    fn item(id: u32, w: Dim, h: Dim, item_id: u32) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Item {
                copy: CopyId {
                    item: ItemId(item_id),
                    index: 0,
                },
                rotated: false,
            },
        }
    }

    fn vertical(id: u32, w: Dim, h: Dim, children: Vec<Node>) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Structure {
                orientation: Orientation::Vertical,
                children,
            },
        }
    }

    #[test]
    fn merges_adjacent_leftovers() {
        let tree = vertical(
            0,
            10,
            5,
            vec![item(1, 4, 5, 0), leftover(2, 3, 5), leftover(3, 3, 5)],
        );
        let norm = tree.normalize();
        let NodeKind::Structure { children, .. } = &norm.kind else {
            panic!("expected structure root");
        };
        assert_eq!(children.len(), 2);
        assert_eq!(children[1].width, 6);
        // merged leftover keeps the first sibling's id
        assert_eq!(children[1].id, NodeId(2));
        norm.check_normal_form().unwrap();
    }

    #[test]
    fn collapses_single_child_and_splices_same_orientation() {
        // V(V(item, leftover)) must flatten to V(item, leftover).
        let inner = vertical(1, 10, 5, vec![item(2, 4, 5, 0), leftover(3, 6, 5)]);
        let outer = vertical(0, 10, 5, vec![inner]);
        let norm = outer.normalize();
        let NodeKind::Structure { children, .. } = &norm.kind else {
            panic!("expected structure root");
        };
        assert_eq!(children.len(), 2);
        norm.check_normal_form().unwrap();
    }

    #[test]
    fn all_leftover_tree_collapses_to_single_leftover() {
        let tree = vertical(0, 10, 5, vec![leftover(1, 4, 5), leftover(2, 6, 5)]);
        let norm = tree.normalize();
        assert!(norm.is_leftover());
        assert_eq!((norm.width, norm.height), (10, 5));
    }

    #[test]
    fn drops_zero_area_leftovers() {
        let tree = vertical(
            0,
            10,
            5,
            vec![item(1, 4, 5, 0), leftover(2, 0, 5), item(3, 6, 5, 1)],
        );
        let norm = tree.normalize();
        let NodeKind::Structure { children, .. } = &norm.kind else {
            panic!("expected structure root");
        };
        assert_eq!(children.len(), 2);
        norm.check_normal_form().unwrap();
    }

    #[test]
    fn check_rejects_bad_partition() {
        let tree = vertical(0, 10, 5, vec![item(1, 4, 5, 0), leftover(2, 5, 5)]);
        assert!(tree.check_normal_form().is_err());
    }
}
