//! Exact exhaustive solver for tiny instances, used as ground truth.
//!
//! Bin multisets are enumerated in non-decreasing total area; the first one
//! that can hold every item copy is optimal. Per-bin packing feasibility is
//! decided by two independent routes: a tree-space search over guillotine
//! split trees (primary, also produces the witness) and a placement-space
//! search over normalized coordinates followed by an explicit recursive
//! edge-to-edge separability check (cross-validation).

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    Area, BinId, CopyId, CuttingPattern, Dim, Instance, Node, NodeId, NodeKind, Orientation,
    PatternId, Solution,
};

/// Caps that keep the exhaustive search at toy scale.
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    /// Maximum number of item copies.
    pub max_copies: u32,
    /// Maximum number of bin multisets examined.
    pub max_multisets: u64,
    /// Maximum number of packing-feasibility subproblems explored.
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_copies: 6,
            max_multisets: 100_000,
            max_nodes: 20_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance exceeds the oracle budget: {0}")]
    BudgetExceeded(String),
    #[error("instance has no feasible solution under its bin quantities")]
    Infeasible,
}

#[derive(Debug, Clone, Copy)]
struct OracleItem {
    copy: CopyId,
    width: Dim,
    height: Dim,
    rotatable: bool,
}

/// Exact minimum total bin area plus a witness solution, via the tree-space
/// enumerator.
pub fn exact_min_area(
    instance: &Instance,
    budget: &OracleBudget,
) -> Result<(Area, Solution), OracleError> {
    let items = oracle_items(instance, budget)?;
    let mut search = TreeSearch::new(&items, budget.max_nodes);
    for multiset in bin_multisets(instance, items.len() as u32, budget)? {
        if let Some(assignment) = search.assign(instance, &multiset)? {
            let solution = search.witness(instance, &multiset, &assignment);
            let area = solution.total_bin_area();
            debug_assert!(crate::model::validate(instance, &solution).is_ok());
            return Ok((area, solution));
        }
    }
    Err(OracleError::Infeasible)
}

/// Exact minimum total bin area via the independent placement-space
/// enumerator with an explicit guillotine-separability check.
pub fn exact_min_area_by_placement(
    instance: &Instance,
    budget: &OracleBudget,
) -> Result<Area, OracleError> {
    let items = oracle_items(instance, budget)?;
    let mut nodes_left = budget.max_nodes;
    for multiset in bin_multisets(instance, items.len() as u32, budget)? {
        let bins = expand_multiset(instance, &multiset);
        if assign_by_placement(&items, &bins, 0, &mut vec![Vec::new(); bins.len()], &mut nodes_left)?
        {
            return Ok(bins.iter().map(|(w, h)| w * h).sum());
        }
    }
    Err(OracleError::Infeasible)
}

fn oracle_items(
    instance: &Instance,
    budget: &OracleBudget,
) -> Result<Vec<OracleItem>, OracleError> {
    if instance.total_copies() > budget.max_copies {
        return Err(OracleError::BudgetExceeded(format!(
            "{} copies exceed the cap of {}",
            instance.total_copies(),
            budget.max_copies
        )));
    }
    let mut items: Vec<OracleItem> = instance
        .copies()
        .map(|copy| {
            let (width, height) = instance.copy_dims(copy);
            OracleItem {
                copy,
                width,
                height,
                rotatable: instance.rotation_allowed() && width != height,
            }
        })
        .collect();
    // larger copies first prunes the assignment search sooner
    items.sort_by_key(|i| std::cmp::Reverse(i.width * i.height));
    Ok(items)
}

/// All usable bin multisets as per-type counts, sorted by total area (ties
/// by counts) ascending, pre-filtered by the item-area lower bound.
fn bin_multisets(
    instance: &Instance,
    copies: u32,
    budget: &OracleBudget,
) -> Result<Vec<Vec<u32>>, OracleError> {
    let caps: Vec<u32> = instance
        .bins()
        .iter()
        .map(|b| b.quantity.unwrap_or(copies).min(copies))
        .collect();
    let mut all = Vec::new();
    let mut counts = vec![0u32; caps.len()];
    loop {
        if counts.iter().any(|&c| c > 0) {
            all.push(counts.clone());
            if all.len() as u64 > budget.max_multisets {
                return Err(OracleError::BudgetExceeded(format!(
                    "more than {} bin multisets",
                    budget.max_multisets
                )));
            }
        }
        // odometer increment over the per-type caps
        let mut idx = 0;
        loop {
            if idx == counts.len() {
                let needed = instance.total_item_area();
                all.retain(|c| multiset_area(instance, c) >= needed);
                all.sort_by_key(|c| (multiset_area(instance, c), c.clone()));
                return Ok(all);
            }
            if counts[idx] < caps[idx] {
                counts[idx] += 1;
                break;
            }
            counts[idx] = 0;
            idx += 1;
        }
        if counts.iter().all(|&c| c == 0) {
            let needed = instance.total_item_area();
            all.retain(|c| multiset_area(instance, c) >= needed);
            all.sort_by_key(|c| (multiset_area(instance, c), c.clone()));
            return Ok(all);
        }
    }
}

fn multiset_area(instance: &Instance, counts: &[u32]) -> Area {
    instance
        .bins()
        .iter()
        .zip(counts)
        .map(|(b, &c)| b.area() * c as Area)
        .sum()
}

fn expand_multiset(instance: &Instance, counts: &[u32]) -> Vec<(Dim, Dim)> {
    let mut bins = Vec::new();
    for (bin, &count) in instance.bins().iter().zip(counts) {
        for _ in 0..count {
            bins.push((bin.width, bin.height));
        }
    }
    bins
}

type Mask = u8;

/// How a (width, height, mask) subproblem was packed.
#[derive(Debug, Clone, Copy)]
enum Split {
    Single { rotated: bool },
    Vertical { at: Dim, left: Mask },
    Horizontal { at: Dim, top: Mask },
}

/// Tree-space feasibility search with memoization shared across multisets.
struct TreeSearch<'a> {
    items: &'a [OracleItem],
    fits_memo: HashMap<(Dim, Dim, Mask), Option<Split>>,
    min_width_memo: HashMap<(Dim, Mask), Option<Dim>>,
    min_height_memo: HashMap<(Dim, Mask), Option<Dim>>,
    width_sums: HashMap<Mask, Vec<Dim>>,
    height_sums: HashMap<Mask, Vec<Dim>>,
    nodes_left: u64,
}

impl<'a> TreeSearch<'a> {
    fn new(items: &'a [OracleItem], max_nodes: u64) -> Self {
        TreeSearch {
            items,
            fits_memo: HashMap::new(),
            min_width_memo: HashMap::new(),
            min_height_memo: HashMap::new(),
            width_sums: HashMap::new(),
            height_sums: HashMap::new(),
            nodes_left: max_nodes,
        }
    }

    /// Sums of one chosen extent per item subset; any tight packing width
    /// is such a sum, because widths compose by addition and maximum.
    fn sums(&mut self, mask: Mask, widths: bool) -> Vec<Dim> {
        let memo = if widths {
            &self.width_sums
        } else {
            &self.height_sums
        };
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc: Vec<Dim> = vec![0];
        for (i, item) in self.items.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * 3);
            for &base in &acc {
                next.push(base);
                let (a, b) = if widths {
                    (item.width, item.height)
                } else {
                    (item.height, item.width)
                };
                next.push(base + a);
                if item.rotatable {
                    next.push(base + b);
                }
            }
            next.sort_unstable();
            next.dedup();
            acc = next;
        }
        acc.retain(|&v| v > 0);
        let memo = if widths {
            &mut self.width_sums
        } else {
            &mut self.height_sums
        };
        memo.insert(mask, acc.clone());
        acc
    }

    fn spend(&mut self) -> Result<(), OracleError> {
        if self.nodes_left == 0 {
            return Err(OracleError::BudgetExceeded(
                "packing-search node budget exhausted".into(),
            ));
        }
        self.nodes_left -= 1;
        Ok(())
    }

    /// Can the items of `mask` be guillotine-packed into `w` x `h`?
    fn fits(&mut self, w: Dim, h: Dim, mask: Mask) -> Result<Option<Split>, OracleError> {
        debug_assert!(mask != 0);
        if let Some(hit) = self.fits_memo.get(&(w, h, mask)) {
            return Ok(*hit);
        }
        self.spend()?;

        let result = if mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            let item = self.items[i];
            if item.width <= w && item.height <= h {
                Some(Split::Single { rotated: false })
            } else if item.rotatable && item.height <= w && item.width <= h {
                Some(Split::Single { rotated: true })
            } else {
                None
            }
        } else {
            self.split(w, h, mask)?
        };
        self.fits_memo.insert((w, h, mask), result);
        Ok(result)
    }

    fn split(&mut self, w: Dim, h: Dim, mask: Mask) -> Result<Option<Split>, OracleError> {
        let low = mask & mask.wrapping_neg();
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            // each unordered partition once: keep the lowest bit on the left
            if sub & low != 0 {
                let rest = mask & !sub;
                if let (Some(a), Some(b)) = (self.min_width(sub, h)?, self.min_width(rest, h)?) {
                    if a + b <= w {
                        return Ok(Some(Split::Vertical { at: a, left: sub }));
                    }
                }
                if let (Some(a), Some(b)) = (self.min_height(sub, w)?, self.min_height(rest, w)?) {
                    if a + b <= h {
                        return Ok(Some(Split::Horizontal { at: a, top: sub }));
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        Ok(None)
    }

    /// Smallest candidate width that packs `mask` at height `h`.
    fn min_width(&mut self, mask: Mask, h: Dim) -> Result<Option<Dim>, OracleError> {
        if let Some(hit) = self.min_width_memo.get(&(h, mask)) {
            return Ok(*hit);
        }
        let mut found = None;
        for width in self.sums(mask, true) {
            if self.fits(width, h, mask)?.is_some() {
                found = Some(width);
                break;
            }
        }
        self.min_width_memo.insert((h, mask), found);
        Ok(found)
    }

    fn min_height(&mut self, mask: Mask, w: Dim) -> Result<Option<Dim>, OracleError> {
        if let Some(hit) = self.min_height_memo.get(&(w, mask)) {
            return Ok(*hit);
        }
        let mut found = None;
        for height in self.sums(mask, false) {
            if self.fits(w, height, mask)?.is_some() {
                found = Some(height);
                break;
            }
        }
        self.min_height_memo.insert((w, mask), found);
        Ok(found)
    }

    /// Distributes every copy over the multiset's bins such that each bin
    /// packs its share; returns per-bin masks.
    fn assign(
        &mut self,
        instance: &Instance,
        counts: &[u32],
    ) -> Result<Option<Vec<Mask>>, OracleError> {
        let bins = expand_multiset(instance, counts);
        let mut masks = vec![0 as Mask; bins.len()];
        if self.assign_rec(&bins, 0, &mut masks)? {
            Ok(Some(masks))
        } else {
            Ok(None)
        }
    }

    fn assign_rec(
        &mut self,
        bins: &[(Dim, Dim)],
        item: usize,
        masks: &mut Vec<Mask>,
    ) -> Result<bool, OracleError> {
        if item == self.items.len() {
            return Ok(true);
        }
        let bit = 1 << item;
        let mut tried: Vec<(Dim, Dim, Mask)> = Vec::new();
        for b in 0..bins.len() {
            let state = (bins[b].0, bins[b].1, masks[b]);
            if tried.contains(&state) {
                continue; // identical bin with identical content
            }
            tried.push(state);
            if self.fits(bins[b].0, bins[b].1, masks[b] | bit)?.is_none() {
                continue;
            }
            masks[b] |= bit;
            if self.assign_rec(bins, item + 1, masks)? {
                return Ok(true);
            }
            masks[b] &= !bit;
        }
        Ok(false)
    }

    /// Materializes the witness solution from the memoized split decisions.
    fn witness(&mut self, instance: &Instance, counts: &[u32], masks: &[Mask]) -> Solution {
        let mut solution = Solution::empty(instance);
        let mut bin_ids = Vec::new();
        for (bin, &count) in instance.bins().iter().zip(counts) {
            for _ in 0..count {
                bin_ids.push((bin.id, bin.width, bin.height));
            }
        }
        for ((bin, w, h), &mask) in bin_ids.into_iter().zip(masks) {
            if mask == 0 {
                continue;
            }
            let mut next_id = 0u32;
            let root = self.build_region(w, h, mask, &mut next_id);
            let root = root.normalize();
            for i in 0..self.items.len() {
                if mask & (1 << i) != 0 {
                    solution.mark_placed(self.items[i].copy);
                }
            }
            solution.push_pattern(CuttingPattern::from_root(PatternId(0), bin_id_of(bin), root));
        }
        solution
    }

    fn build_region(&mut self, w: Dim, h: Dim, mask: Mask, next_id: &mut u32) -> Node {
        fn fresh_id(next_id: &mut u32) -> NodeId {
            let id = NodeId(*next_id);
            *next_id += 1;
            id
        }
        if mask == 0 {
            return Node {
                id: fresh_id(next_id),
                width: w,
                height: h,
                kind: NodeKind::Leftover,
            };
        }
        let split = self
            .fits(w, h, mask)
            .expect("witness region within budget")
            .expect("witness region is packable");
        match split {
            Split::Single { rotated } => {
                let i = mask.trailing_zeros() as usize;
                let item = self.items[i];
                let (iw, ih) = if rotated {
                    (item.height, item.width)
                } else {
                    (item.width, item.height)
                };
                let leaf = Node {
                    id: fresh_id(next_id),
                    width: iw,
                    height: ih,
                    kind: NodeKind::Item {
                        copy: item.copy,
                        rotated,
                    },
                };
                // pin the item to the top-left corner of its region
                let with_height = if ih < h {
                    Node {
                        id: fresh_id(next_id),
                        width: iw,
                        height: h,
                        kind: NodeKind::Structure {
                            orientation: Orientation::Horizontal,
                            children: vec![
                                leaf,
                                Node {
                                    id: fresh_id(next_id),
                                    width: iw,
                                    height: h - ih,
                                    kind: NodeKind::Leftover,
                                },
                            ],
                        },
                    }
                } else {
                    leaf
                };
                if iw < w {
                    Node {
                        id: fresh_id(next_id),
                        width: w,
                        height: h,
                        kind: NodeKind::Structure {
                            orientation: Orientation::Vertical,
                            children: vec![
                                with_height,
                                Node {
                                    id: fresh_id(next_id),
                                    width: w - iw,
                                    height: h,
                                    kind: NodeKind::Leftover,
                                },
                            ],
                        },
                    }
                } else {
                    with_height
                }
            }
            Split::Vertical { at, left } => {
                let rest = mask & !left;
                let left_node = self.build_region(at, h, left, next_id);
                let right_node = self.build_region(w - at, h, rest, next_id);
                Node {
                    id: fresh_id(next_id),
                    width: w,
                    height: h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Vertical,
                        children: vec![left_node, right_node],
                    },
                }
            }
            Split::Horizontal { at, top } => {
                let rest = mask & !top;
                let top_node = self.build_region(w, at, top, next_id);
                let bottom_node = self.build_region(w, h - at, rest, next_id);
                Node {
                    id: fresh_id(next_id),
                    width: w,
                    height: h,
                    kind: NodeKind::Structure {
                        orientation: Orientation::Horizontal,
                        children: vec![top_node, bottom_node],
                    },
                }
            }
        }
    }
}

fn bin_id_of(id: BinId) -> BinId {
    id
}

// ---------------------------------------------------------------------------
// placement-space route
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Placed {
    x: Dim,
    y: Dim,
    w: Dim,
    h: Dim,
}

fn assign_by_placement(
    items: &[OracleItem],
    bins: &[(Dim, Dim)],
    item: usize,
    per_bin: &mut Vec<Vec<usize>>,
    nodes_left: &mut u64,
) -> Result<bool, OracleError> {
    if item == items.len() {
        for (b, content) in per_bin.iter().enumerate() {
            if content.is_empty() {
                continue;
            }
            let chosen: Vec<OracleItem> = content.iter().map(|&i| items[i]).collect();
            if !packable_by_placement(bins[b].0, bins[b].1, &chosen, nodes_left)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let mut tried: Vec<(Dim, Dim, Vec<usize>)> = Vec::new();
    for b in 0..bins.len() {
        let state = (bins[b].0, bins[b].1, per_bin[b].clone());
        if tried.contains(&state) {
            continue;
        }
        tried.push(state);
        let used: Area = per_bin[b].iter().map(|&i| items[i].width * items[i].height).sum();
        if used + items[item].width * items[item].height > bins[b].0 * bins[b].1 {
            continue;
        }
        per_bin[b].push(item);
        if assign_by_placement(items, bins, item + 1, per_bin, nodes_left)? {
            return Ok(true);
        }
        per_bin[b].pop();
    }
    Ok(false)
}

/// Exhaustive placement at normalized coordinates, then an explicit
/// recursive edge-to-edge separability check on the full layout.
fn packable_by_placement(
    w: Dim,
    h: Dim,
    items: &[OracleItem],
    nodes_left: &mut u64,
) -> Result<bool, OracleError> {
    // candidate offsets: subset sums of every oriented extent
    let mut xs: Vec<Dim> = vec![0];
    let mut ys: Vec<Dim> = vec![0];
    for item in items {
        let grow = |acc: &mut Vec<Dim>, a: Dim, b: Dim, limit: Dim| {
            let mut next = acc.clone();
            for &base in acc.iter() {
                if base + a < limit {
                    next.push(base + a);
                }
                if item.rotatable && base + b < limit {
                    next.push(base + b);
                }
            }
            next.sort_unstable();
            next.dedup();
            *acc = next;
        };
        grow(&mut xs, item.width, item.height, w);
        grow(&mut ys, item.height, item.width, h);
    }
    let mut placed: Vec<Placed> = Vec::new();
    place_rec(w, h, items, 0, &xs, &ys, &mut placed, nodes_left)
}

#[allow(clippy::too_many_arguments)]
fn place_rec(
    w: Dim,
    h: Dim,
    items: &[OracleItem],
    idx: usize,
    xs: &[Dim],
    ys: &[Dim],
    placed: &mut Vec<Placed>,
    nodes_left: &mut u64,
) -> Result<bool, OracleError> {
    if *nodes_left == 0 {
        return Err(OracleError::BudgetExceeded(
            "placement-search node budget exhausted".into(),
        ));
    }
    *nodes_left -= 1;
    if idx == items.len() {
        return Ok(guillotine_separable(placed));
    }
    let item = items[idx];
    let mut orientations = vec![(item.width, item.height)];
    if item.rotatable {
        orientations.push((item.height, item.width));
    }
    for (iw, ih) in orientations {
        for &x in xs {
            if x + iw > w {
                continue;
            }
            for &y in ys {
                if y + ih > h {
                    continue;
                }
                let candidate = Placed { x, y, w: iw, h: ih };
                if placed.iter().any(|p| overlaps(p, &candidate)) {
                    continue;
                }
                placed.push(candidate);
                if place_rec(w, h, items, idx + 1, xs, ys, placed, nodes_left)? {
                    return Ok(true);
                }
                placed.pop();
            }
        }
    }
    Ok(false)
}

fn overlaps(a: &Placed, b: &Placed) -> bool {
    a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h
}

/// True when the rectangles can be separated by recursive full-length cuts.
fn guillotine_separable(rects: &[Placed]) -> bool {
    if rects.len() <= 1 {
        return true;
    }
    // vertical cut at a right edge crossed by no rectangle
    let mut edges: Vec<Dim> = rects.iter().map(|r| r.x + r.w).collect();
    edges.sort_unstable();
    edges.dedup();
    for &cut in &edges {
        let left: Vec<Placed> = rects.iter().filter(|r| r.x + r.w <= cut).copied().collect();
        let right: Vec<Placed> = rects.iter().filter(|r| r.x >= cut).copied().collect();
        if left.len() + right.len() == rects.len()
            && !left.is_empty()
            && !right.is_empty()
            && guillotine_separable(&left)
            && guillotine_separable(&right)
        {
            return true;
        }
    }
    let mut edges: Vec<Dim> = rects.iter().map(|r| r.y + r.h).collect();
    edges.sort_unstable();
    edges.dedup();
    for &cut in &edges {
        let top: Vec<Placed> = rects.iter().filter(|r| r.y + r.h <= cut).copied().collect();
        let bottom: Vec<Placed> = rects.iter().filter(|r| r.y >= cut).copied().collect();
        if top.len() + bottom.len() == rects.len()
            && !top.is_empty()
            && !bottom.is_empty()
            && guillotine_separable(&top)
            && guillotine_separable(&bottom)
        {
            return true;
        }
    }
    false
}
