//! Structural edits on cutting patterns: node removal (the ruin primitive),
//! insertion-option enumeration and costing, and insertion (the recreate
//! primitive).

use thiserror::Error;

use crate::model::{
    leftover_value, Area, CopyId, CuttingPattern, Dim, Node, NodeId, NodeKind, Orientation,
    PatternId, Solution,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeOpError {
    #[error("leftover nodes cannot be removed")]
    RemoveLeftover,
    #[error("node {0:?} not found in pattern")]
    UnknownNode(NodeId),
    #[error("pattern {0:?} not found in solution")]
    UnknownPattern(PatternId),
    #[error("insertion option is stale: its target no longer exists")]
    StaleOption,
    #[error("copy is not excluded, cannot be inserted")]
    CopyNotExcluded,
}

/// Result of removing a node from a pattern.
#[derive(Debug, PartialEq, Eq)]
pub struct Removal {
    /// Item copies that were in the removed subtree.
    pub released: Vec<CopyId>,
    /// True when the pattern collapsed to a single all-leftover root.
    pub emptied: bool,
}

/// Replaces an item or structure node by a leftover of identical size and
/// restores normal form. Returns the released copies and whether the whole
/// pattern became empty.
pub fn remove_node(pattern: &mut CuttingPattern, target: NodeId) -> Result<Removal, TreeOpError> {
    let node = pattern
        .root
        .find(target)
        .ok_or(TreeOpError::UnknownNode(target))?;
    if node.is_leftover() {
        return Err(TreeOpError::RemoveLeftover);
    }
    let mut released = Vec::new();
    node.collect_copies(&mut released);

    fn blank(node: &mut Node, target: NodeId) -> bool {
        if node.id == target {
            node.kind = NodeKind::Leftover;
            return true;
        }
        if let NodeKind::Structure { children, .. } = &mut node.kind {
            return children.iter_mut().any(|c| blank(c, target));
        }
        false
    }
    let hit = blank(&mut pattern.root, target);
    debug_assert!(hit);

    normalize_pattern(pattern);
    Ok(Removal {
        released,
        emptied: pattern.is_all_leftover(),
    })
}

/// Removes a node within a solution: released copies move to the excluded
/// set and an emptied pattern is dropped from the solution.
pub fn remove_and_release(
    solution: &mut Solution,
    pattern: PatternId,
    target: NodeId,
) -> Result<Vec<CopyId>, TreeOpError> {
    let p = solution
        .pattern_mut(pattern)
        .ok_or(TreeOpError::UnknownPattern(pattern))?;
    let removal = remove_node(p, target)?;
    if removal.emptied {
        solution.remove_pattern(pattern);
    }
    for copy in &removal.released {
        solution.mark_excluded(*copy);
    }
    Ok(removal.released)
}

fn normalize_pattern(pattern: &mut CuttingPattern) {
    let placeholder = Node {
        id: NodeId(u32::MAX),
        width: 1,
        height: 1,
        kind: NodeKind::Leftover,
    };
    let root = std::mem::replace(&mut pattern.root, placeholder);
    pattern.root = root.normalize();
}

/// Up to two leftovers produced by an insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CreatedLeftovers {
    dims: [(Dim, Dim); 2],
    len: u8,
}

impl CreatedLeftovers {
    pub fn push(&mut self, w: Dim, h: Dim) {
        debug_assert!(self.len < 2);
        self.dims[self.len as usize] = (w, h);
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[(Dim, Dim)] {
        &self.dims[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// One concrete way of inserting an item copy into a leftover node.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionOption {
    pub pattern: PatternId,
    pub target: NodeId,
    pub copy: CopyId,
    pub rotated: bool,
    /// Item dimensions in the chosen orientation.
    pub width: Dim,
    pub height: Dim,
    pub first_cut: Orientation,
    pub created: CreatedLeftovers,
    pub cost: f64,
}

/// Cost of consuming a leftover of `used_area` while creating `created`:
/// the loss in total leftover value. Created values are summed in sorted
/// area order before the one subtraction, so equal-area splits cost
/// bit-identically wherever they occur.
pub fn option_cost(used_area: Area, created: &CreatedLeftovers, exponent: f64) -> f64 {
    let mut areas = [0 as Area; 2];
    for (i, (w, h)) in created.as_slice().iter().enumerate() {
        areas[i] = w * h;
    }
    let n = created.len();
    areas[..n].sort_unstable();
    let created_value: f64 = areas[..n]
        .iter()
        .map(|&a| leftover_value(a, exponent))
        .sum();
    leftover_value(used_area, exponent) - created_value
}

/// Distinct orientations to try for an item: unrotated first, then rotated
/// when the variant allows it and the item is not square.
fn orientations(width: Dim, height: Dim, rotation_allowed: bool) -> [Option<(Dim, Dim, bool)>; 2] {
    let mut out = [Some((width, height, false)), None];
    if rotation_allowed && width != height {
        out[1] = Some((height, width, true));
    }
    out
}

/// Emits the deduplicated options for one oriented item in one leftover.
/// Exact fits along an axis make the two first-cut directions coincide
/// after normalization, so only one option is produced for them.
fn options_in_leftover(
    leftover_w: Dim,
    leftover_h: Dim,
    item_w: Dim,
    item_h: Dim,
    mut emit: impl FnMut(Orientation, CreatedLeftovers),
) {
    if item_w > leftover_w || item_h > leftover_h {
        return;
    }
    let spare_w = leftover_w - item_w;
    let spare_h = leftover_h - item_h;
    match (spare_w, spare_h) {
        (0, 0) => emit(Orientation::Vertical, CreatedLeftovers::default()),
        (0, _) => {
            // only a horizontal cut is actually made
            let mut created = CreatedLeftovers::default();
            created.push(leftover_w, spare_h);
            emit(Orientation::Horizontal, created);
        }
        (_, 0) => {
            let mut created = CreatedLeftovers::default();
            created.push(spare_w, leftover_h);
            emit(Orientation::Vertical, created);
        }
        _ => {
            let mut v_created = CreatedLeftovers::default();
            v_created.push(spare_w, leftover_h);
            v_created.push(item_w, spare_h);
            emit(Orientation::Vertical, v_created);

            let mut h_created = CreatedLeftovers::default();
            h_created.push(leftover_w, spare_h);
            h_created.push(spare_w, item_h);
            emit(Orientation::Horizontal, h_created);
        }
    }
}

/// All insertion options for `copy` within one pattern, in deterministic
/// (preorder leftover, orientation, first-cut) order.
pub fn enumerate_options_in_pattern(
    copy: CopyId,
    dims: (Dim, Dim),
    rotation_allowed: bool,
    pattern: &CuttingPattern,
    exponent: f64,
    out: &mut Vec<InsertionOption>,
) {
    pattern.root.for_each_leftover(&mut |leftover| {
        for orient in orientations(dims.0, dims.1, rotation_allowed).into_iter().flatten() {
            let (iw, ih, rotated) = orient;
            options_in_leftover(leftover.width, leftover.height, iw, ih, |first_cut, created| {
                out.push(InsertionOption {
                    pattern: pattern.id,
                    target: leftover.id,
                    copy,
                    rotated,
                    width: iw,
                    height: ih,
                    first_cut,
                    created,
                    cost: option_cost(leftover.area(), &created, exponent),
                });
            });
        }
    });
}

/// All insertion options for `copy` across every pattern of the solution.
pub fn enumerate_options(
    copy: CopyId,
    dims: (Dim, Dim),
    rotation_allowed: bool,
    solution: &Solution,
    exponent: f64,
) -> Vec<InsertionOption> {
    let mut out = Vec::new();
    for pattern in solution.patterns() {
        enumerate_options_in_pattern(copy, dims, rotation_allowed, pattern, exponent, &mut out);
    }
    out
}

/// Number of options an item with these dimensions has, without
/// materializing them. Matches `enumerate_options` exactly.
pub fn count_options(dims: (Dim, Dim), rotation_allowed: bool, solution: &Solution) -> usize {
    let mut count = 0;
    for pattern in solution.patterns() {
        pattern.root.for_each_leftover(&mut |leftover| {
            for orient in orientations(dims.0, dims.1, rotation_allowed).into_iter().flatten() {
                let (iw, ih, _) = orient;
                if iw > leftover.width || ih > leftover.height {
                    continue;
                }
                count += if iw == leftover.width || ih == leftover.height {
                    1
                } else {
                    2
                };
            }
        });
    }
    count
}

/// Applies an insertion option: the target leftover is replaced by the
/// option's subtree, normal form is restored and the copy leaves the
/// excluded set. Fails if the option no longer matches the solution.
pub fn insert(solution: &mut Solution, option: &InsertionOption) -> Result<(), TreeOpError> {
    if !solution.excluded().contains(&option.copy) {
        return Err(TreeOpError::CopyNotExcluded);
    }
    let pattern = solution
        .pattern_mut(option.pattern)
        .ok_or(TreeOpError::StaleOption)?;
    let target = pattern.root.find(option.target).ok_or(TreeOpError::StaleOption)?;
    if !target.is_leftover() || option.width > target.width || option.height > target.height {
        return Err(TreeOpError::StaleOption);
    }
    let (leftover_w, leftover_h) = (target.width, target.height);

    let replacement = build_insertion_subtree(
        pattern,
        leftover_w,
        leftover_h,
        option.width,
        option.height,
        option.copy,
        option.rotated,
        option.first_cut,
    );

    fn swap_in(node: &mut Node, target: NodeId, replacement: &mut Option<Node>) -> bool {
        if node.id == target {
            *node = replacement.take().expect("target ids are unique");
            return true;
        }
        if let NodeKind::Structure { children, .. } = &mut node.kind {
            return children.iter_mut().any(|c| swap_in(c, target, replacement));
        }
        false
    }
    let mut slot = Some(replacement);
    let hit = swap_in(&mut pattern.root, option.target, &mut slot);
    debug_assert!(hit);

    normalize_pattern(pattern);
    solution.mark_placed(option.copy);
    Ok(())
}

/// Builds the subtree that replaces the used leftover: the first cut splits
/// off the spare strip, the perpendicular second cut isolates the item.
/// Degenerate (zero-size) pieces are never materialized.
#[allow(clippy::too_many_arguments)]
fn build_insertion_subtree(
    pattern: &mut CuttingPattern,
    leftover_w: Dim,
    leftover_h: Dim,
    item_w: Dim,
    item_h: Dim,
    copy: CopyId,
    rotated: bool,
    first_cut: Orientation,
) -> Node {
    let item = Node {
        id: pattern.next_node_id(),
        width: item_w,
        height: item_h,
        kind: NodeKind::Item { copy, rotated },
    };
    let spare_w = leftover_w - item_w;
    let spare_h = leftover_h - item_h;

    match first_cut {
        Orientation::Vertical => {
            // vertical cut at the item's width, then a horizontal cut
            let inner = if spare_h > 0 {
                Node {
                    id: pattern.next_node_id(),
                    width: item_w,
                    height: leftover_h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Horizontal,
                        children: vec![
                            item,
                            Node {
                                id: pattern.next_node_id(),
                                width: item_w,
                                height: spare_h,
                                kind: NodeKind::Leftover,
                            },
                        ],
                    },
                }
            } else {
                item
            };
            if spare_w > 0 {
                Node {
                    id: pattern.next_node_id(),
                    width: leftover_w,
                    height: leftover_h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Vertical,
                        children: vec![
                            inner,
                            Node {
                                id: pattern.next_node_id(),
                                width: spare_w,
                                height: leftover_h,
                                kind: NodeKind::Leftover,
                            },
                        ],
                    },
                }
            } else {
                inner
            }
        }
        Orientation::Horizontal => {
            let inner = if spare_w > 0 {
                Node {
                    id: pattern.next_node_id(),
                    width: leftover_w,
                    height: item_h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Vertical,
                        children: vec![
                            item,
                            Node {
                                id: pattern.next_node_id(),
                                width: spare_w,
                                height: item_h,
                                kind: NodeKind::Leftover,
                            },
                        ],
                    },
                }
            } else {
                item
            };
            if spare_h > 0 {
                Node {
                    id: pattern.next_node_id(),
                    width: leftover_w,
                    height: leftover_h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Horizontal,
                        children: vec![
                            inner,
                            Node {
                                id: pattern.next_node_id(),
                                width: leftover_w,
                                height: spare_h,
                                kind: NodeKind::Leftover,
                            },
                        ],
                    },
                }
            } else {
                inner
            }
        }
    }
}
