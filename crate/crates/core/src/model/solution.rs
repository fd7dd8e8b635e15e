//! Solutions: a set of cutting patterns plus the excluded (unplaced) copies.

use std::collections::BTreeSet;

use thiserror::Error;

use super::instance::{Area, BinId, CopyId, Dim, Instance};
use super::tree::{CuttingPattern, PatternId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("utilization is undefined for a solution without patterns")]
    NoPatterns,
}

/// A (possibly incomplete) solution. Feasible iff `excluded` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    patterns: Vec<CuttingPattern>,
    excluded: BTreeSet<CopyId>,
    next_pattern: u64,
}

impl Solution {
    /// The empty solution: no patterns, every demanded copy excluded.
    pub fn empty(instance: &Instance) -> Self {
        Solution {
            patterns: Vec::new(),
            excluded: instance.copies().collect(),
            next_pattern: 0,
        }
    }

    pub fn patterns(&self) -> &[CuttingPattern] {
        &self.patterns
    }

    pub fn excluded(&self) -> &BTreeSet<CopyId> {
        &self.excluded
    }

    pub fn is_feasible(&self) -> bool {
        self.excluded.is_empty()
    }

    pub fn pattern(&self, id: PatternId) -> Option<&CuttingPattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    pub fn pattern_mut(&mut self, id: PatternId) -> Option<&mut CuttingPattern> {
        self.patterns.iter_mut().find(|p| p.id == id)
    }

    /// Opens a fresh bin and returns the new pattern's id.
    pub fn open_bin(&mut self, bin: BinId, width: Dim, height: Dim) -> PatternId {
        let id = PatternId(self.next_pattern);
        self.next_pattern += 1;
        self.patterns
            .push(CuttingPattern::fresh(id, bin, width, height));
        id
    }

    pub fn push_pattern(&mut self, mut pattern: CuttingPattern) -> PatternId {
        let id = PatternId(self.next_pattern);
        self.next_pattern += 1;
        pattern.id = id;
        self.patterns.push(pattern);
        id
    }

    pub fn remove_pattern(&mut self, id: PatternId) -> Option<CuttingPattern> {
        let idx = self.patterns.iter().position(|p| p.id == id)?;
        Some(self.patterns.remove(idx))
    }

    /// Drops patterns without any placed item.
    pub fn drop_empty_patterns(&mut self) {
        self.patterns.retain(|p| !p.is_all_leftover());
    }

    pub fn mark_excluded(&mut self, copy: CopyId) {
        self.excluded.insert(copy);
    }

    pub fn mark_placed(&mut self, copy: CopyId) -> bool {
        self.excluded.remove(&copy)
    }

    /// Total area of the bins used by the patterns.
    pub fn total_bin_area(&self) -> Area {
        self.patterns.iter().map(|p| p.bin_area()).sum()
    }

    /// Number of used bins per type.
    pub fn bin_usage(&self, bin: BinId) -> u32 {
        self.patterns.iter().filter(|p| p.bin == bin).count() as u32
    }

    /// Total area of placed items.
    pub fn placed_item_area(&self) -> Area {
        let mut total = 0;
        for p in &self.patterns {
            p.root.visit(&mut |n| {
                if n.is_item() {
                    total += n.area();
                }
            });
        }
        total
    }

    /// Total area of leftover nodes across all patterns.
    pub fn leftover_area(&self) -> Area {
        let mut total = 0;
        for p in &self.patterns {
            p.root.for_each_leftover(&mut |n| total += n.area());
        }
        total
    }

    /// Sum of the areas of the excluded copies.
    pub fn excluded_area(&self, instance: &Instance) -> Area {
        self.excluded
            .iter()
            .map(|c| instance.item(c.item).area())
            .sum()
    }

    /// Sum of leftover values. Areas are summed in sorted order so any two
    /// solutions with equal leftover-area multisets produce bit-identical
    /// sums, regardless of where the leftovers sit in the trees.
    pub fn leftover_value(&self, exponent: f64) -> f64 {
        let mut areas: Vec<Area> = Vec::new();
        for p in &self.patterns {
            p.root.for_each_leftover(&mut |n| areas.push(n.area()));
        }
        areas.sort_unstable();
        areas
            .into_iter()
            .map(|a| leftover_value(a, exponent))
            .sum()
    }

    /// Placed item area over used bin area, as a percentage.
    pub fn utilization(&self) -> Result<f64, MetricError> {
        let bin_area = self.total_bin_area();
        if bin_area == 0 {
            return Err(MetricError::NoPatterns);
        }
        Ok(self.placed_item_area() as f64 / bin_area as f64 * 100.0)
    }
}

/// Value of a leftover rectangle: area raised to `exponent`. Integer
/// exponents use exact repeated multiplication so tests can assert equality.
pub fn leftover_value(area: Area, exponent: f64) -> f64 {
    let a = area as f64;
    if exponent.fract() == 0.0 && (0.0..=16.0).contains(&exponent) {
        a.powi(exponent as i32)
    } else {
        a.powf(exponent)
    }
}
