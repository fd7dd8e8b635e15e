//! Independent feasibility validation.
//!
//! Deliberately shares no traversal code with `layout` or the edit
//! operations: coordinates, partition sums and copy accounting are all
//! re-derived here from scratch so this module can serve as an oracle for
//! the rest of the crate.

use std::collections::HashMap;
use std::fmt;

use super::instance::{BinId, CopyId, Dim, Instance};
use super::solution::Solution;
use super::tree::{Node, NodeKind, Orientation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// (a) a placed rectangle protrudes from its bin
    OutsideBin { copy: CopyId },
    /// (b) two placed rectangles overlap within one bin
    Overlap { first: CopyId, second: CopyId },
    /// (c) a demanded copy is missing, duplicated, or unknown
    CopyCoverage { copy: CopyId, occurrences: u32 },
    /// (d) a placed rectangle's dimensions do not match its item spec
    DimensionMismatch { copy: CopyId },
    /// (e) the pattern tree violates the normal-form invariants
    MalformedTree { pattern: usize, detail: String },
    /// (f) more bins of a type used than its quantity allows
    BinQuantityExceeded { bin: BinId, used: u32, quantity: u32 },
    /// a pattern references an unknown bin type or has wrong root dims
    BadBin { pattern: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutsideBin { copy } => {
                write!(f, "item {}#{} extends outside its bin", copy.item.0, copy.index)
            }
            Violation::Overlap { first, second } => write!(
                f,
                "items {}#{} and {}#{} overlap",
                first.item.0, first.index, second.item.0, second.index
            ),
            Violation::CopyCoverage { copy, occurrences } => write!(
                f,
                "copy {}#{} appears {} times (expected exactly once)",
                copy.item.0, copy.index, occurrences
            ),
            Violation::DimensionMismatch { copy } => write!(
                f,
                "item {}#{} placed with dimensions that do not match its spec",
                copy.item.0, copy.index
            ),
            Violation::MalformedTree { pattern, detail } => {
                write!(f, "pattern {} tree malformed: {}", pattern, detail)
            }
            Violation::BinQuantityExceeded { bin, used, quantity } => write!(
                f,
                "bin type {} used {} times, only {} available",
                bin.0, used, quantity
            ),
            Violation::BadBin { pattern } => {
                write!(f, "pattern {} has an unknown bin type or wrong root size", pattern)
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    copy: CopyId,
    rotated: bool,
    x: Dim,
    y: Dim,
    w: Dim,
    h: Dim,
}

/// Checks a solution against the instance, independently of how it was
/// built. Violations are data, not errors.
pub fn validate(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut occurrences: HashMap<CopyId, u32> = HashMap::new();
    let mut bin_usage: HashMap<BinId, u32> = HashMap::new();

    for (idx, pattern) in solution.patterns().iter().enumerate() {
        let Some(bin) = instance.try_bin(pattern.bin) else {
            report.violations.push(Violation::BadBin { pattern: idx });
            continue;
        };
        *bin_usage.entry(pattern.bin).or_insert(0) += 1;
        if pattern.root.width != bin.width || pattern.root.height != bin.height {
            report.violations.push(Violation::BadBin { pattern: idx });
        }

        // (e) tree shape, checked with local recursion
        if let Err(detail) = check_tree(&pattern.root, None) {
            report
                .violations
                .push(Violation::MalformedTree { pattern: idx, detail });
        }

        // own coordinate derivation
        let mut rects = Vec::new();
        collect_rects(&pattern.root, 0, 0, &mut rects);

        for r in &rects {
            *occurrences.entry(r.copy).or_insert(0) += 1;

            // (a) containment
            if r.x + r.w > bin.width || r.y + r.h > bin.height {
                report.violations.push(Violation::OutsideBin { copy: r.copy });
            }

            // (d) spec dimensions, swapped only under rotation
            match instance.try_item(r.copy.item) {
                Some(spec) => {
                    let matches = if r.rotated {
                        instance.rotation_allowed() && r.w == spec.height && r.h == spec.width
                    } else {
                        r.w == spec.width && r.h == spec.height
                    };
                    if !matches {
                        report
                            .violations
                            .push(Violation::DimensionMismatch { copy: r.copy });
                    }
                }
                None => {
                    // unknown item id: counted in coverage below
                }
            }
        }

        // (b) pairwise overlap via sweep along x
        rects.sort_by_key(|r| (r.x, r.y));
        for i in 0..rects.len() {
            for j in (i + 1)..rects.len() {
                let (a, b) = (&rects[i], &rects[j]);
                if b.x >= a.x + a.w {
                    break; // sorted by x; nothing further can overlap a
                }
                if a.y < b.y + b.h && b.y < a.y + a.h {
                    report.violations.push(Violation::Overlap {
                        first: a.copy,
                        second: b.copy,
                    });
                }
            }
        }
    }

    // (c) every demanded copy exactly once, across placements and E
    for copy in solution.excluded() {
        *occurrences.entry(*copy).or_insert(0) += 1;
    }
    for item in instance.items() {
        for index in 0..item.demand {
            let copy = CopyId { item: item.id, index };
            let n = occurrences.remove(&copy).unwrap_or(0);
            if n != 1 {
                report
                    .violations
                    .push(Violation::CopyCoverage { copy, occurrences: n });
            }
        }
    }
    // anything left over references unknown items or out-of-range copies
    let mut strays: Vec<_> = occurrences.into_iter().collect();
    strays.sort_by_key(|(c, _)| *c);
    for (copy, n) in strays {
        report
            .violations
            .push(Violation::CopyCoverage { copy, occurrences: n });
    }

    // (f) quantity bounds
    for bin in instance.bins() {
        if let Some(q) = bin.quantity {
            let used = bin_usage.get(&bin.id).copied().unwrap_or(0);
            if used > q {
                report.violations.push(Violation::BinQuantityExceeded {
                    bin: bin.id,
                    used,
                    quantity: q,
                });
            }
        }
    }

    report
}

fn collect_rects(node: &Node, x: Dim, y: Dim, out: &mut Vec<Rect>) {
    match &node.kind {
        NodeKind::Item { copy, rotated } => out.push(Rect {
            copy: *copy,
            rotated: *rotated,
            x,
            y,
            w: node.width,
            h: node.height,
        }),
        NodeKind::Leftover => {}
        NodeKind::Structure {
            orientation,
            children,
        } => {
            let mut offset = 0;
            for child in children {
                match orientation {
                    Orientation::Vertical => collect_rects(child, x + offset, y, out),
                    Orientation::Horizontal => collect_rects(child, x, y + offset, out),
                }
                offset += match orientation {
                    Orientation::Vertical => child.width,
                    Orientation::Horizontal => child.height,
                };
            }
        }
    }
}

fn check_tree(node: &Node, parent: Option<Orientation>) -> Result<(), String> {
    if node.width == 0 || node.height == 0 {
        return Err("zero-area node".into());
    }
    let NodeKind::Structure {
        orientation,
        children,
    } = &node.kind
    else {
        return Ok(());
    };
    if parent == Some(*orientation) {
        return Err("child structure shares parent orientation".into());
    }
    if children.len() < 2 {
        return Err("structure node with fewer than 2 children".into());
    }
    let mut sum = 0;
    let mut prev_leftover = false;
    for child in children {
        let (along, cross) = match orientation {
            Orientation::Vertical => (child.width, child.height),
            Orientation::Horizontal => (child.height, child.width),
        };
        let expected_cross = match orientation {
            Orientation::Vertical => node.height,
            Orientation::Horizontal => node.width,
        };
        if cross != expected_cross {
            return Err("child does not span the parent's cross axis".into());
        }
        sum += along;
        if child.is_leftover() && prev_leftover {
            return Err("adjacent leftover siblings".into());
        }
        prev_leftover = child.is_leftover();
        check_tree(child, Some(*orientation))?;
    }
    let total = match orientation {
        Orientation::Vertical => node.width,
        Orientation::Horizontal => node.height,
    };
    if sum != total {
        return Err(format!("children sum to {sum}, parent spans {total}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::{BinSpec, ItemId, ItemSpec};
    use crate::model::tree::{CuttingPattern, NodeId, PatternId};

    fn inst() -> Instance {
        Instance::new(
            vec![ItemSpec {
                id: ItemId(0),
                width: 4,
                height: 5,
                demand: 1,
            }],
            vec![BinSpec {
                id: BinId(0),
                width: 10,
                height: 5,
                quantity: Some(1),
            }],
            false,
        )
        .unwrap()
    }

    fn item_node(id: u32, w: Dim, h: Dim) -> Node {
        Node {
            id: NodeId(id),
            width: w,
            height: h,
            kind: NodeKind::Item {
                copy: CopyId {
                    item: ItemId(0),
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

    fn vroot(children: Vec<Node>) -> Node {
        Node {
            id: NodeId(100),
            width: 10,
            height: 5,
            kind: NodeKind::Structure {
                orientation: Orientation::Vertical,
                children,
            },
        }
    }

    #[test]
    fn accepts_well_formed_pattern() {
        let inst = inst();
        let mut s = Solution::empty(&inst);
        s.push_pattern(CuttingPattern::from_root(
            PatternId(0),
            BinId(0),
            vroot(vec![item_node(0, 4, 5), leftover_node(1, 6, 5)]),
        ));
        s.mark_placed(CopyId {
            item: ItemId(0),
            index: 0,
        });
        let report = validate(&inst, &s);
        assert!(report.is_ok(), "{report}");
    }

    #[test]
    fn flags_bad_partition_sum() {
        let inst = inst();
        let mut s = Solution::empty(&inst);
        // child widths sum to 9, parent width 10
        s.push_pattern(CuttingPattern::from_root(
            PatternId(0),
            BinId(0),
            vroot(vec![item_node(0, 4, 5), leftover_node(1, 5, 5)]),
        ));
        s.mark_placed(CopyId {
            item: ItemId(0),
            index: 0,
        });
        let report = validate(&inst, &s);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MalformedTree { .. })));
    }

    #[test]
    fn flags_duplicate_placement() {
        let inst = inst();
        let mut s = Solution::empty(&inst);
        let tree = vroot(vec![item_node(0, 4, 5), item_node(1, 4, 5), leftover_node(2, 2, 5)]);
        s.push_pattern(CuttingPattern::from_root(PatternId(0), BinId(0), tree));
        s.mark_placed(CopyId {
            item: ItemId(0),
            index: 0,
        });
        let report = validate(&inst, &s);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CopyCoverage { occurrences: 2, .. })));
    }

    #[test]
    fn flags_quantity_excess() {
        let inst = inst();
        let mut s = Solution::empty(&inst);
        s.open_bin(BinId(0), 10, 5);
        s.open_bin(BinId(0), 10, 5);
        let report = validate(&inst, &s);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BinQuantityExceeded { used: 2, .. })));
    }

    #[test]
    fn flags_rotation_when_disallowed() {
        // square item, so the tree is otherwise perfectly shaped; only the
        // rotated flag is illegal under the fixed-orientation variant
        let inst = Instance::new(
            vec![ItemSpec {
                id: ItemId(0),
                width: 4,
                height: 4,
                demand: 1,
            }],
            vec![BinSpec {
                id: BinId(0),
                width: 10,
                height: 4,
                quantity: None,
            }],
            false,
        )
        .unwrap();
        let placed = Node {
            id: NodeId(0),
            width: 4,
            height: 4,
            kind: NodeKind::Item {
                copy: CopyId {
                    item: ItemId(0),
                    index: 0,
                },
                rotated: true,
            },
        };
        let mut s = Solution::empty(&inst);
        s.push_pattern(CuttingPattern::from_root(
            PatternId(0),
            BinId(0),
            Node {
                id: NodeId(100),
                width: 10,
                height: 4,
                kind: NodeKind::Structure {
                    orientation: Orientation::Vertical,
                    children: vec![placed, leftover_node(1, 6, 4)],
                },
            },
        ));
        s.mark_placed(CopyId {
            item: ItemId(0),
            index: 0,
        });
        let report = validate(&inst, &s);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DimensionMismatch { .. })));
    }
}
