//! Problem definition: item and bin catalogs plus variant flags.

use std::collections::HashSet;

use thiserror::Error;

/// Length in integer units. All geometry is exact integer arithmetic.
pub type Dim = u64;
/// Area in integer units squared.
pub type Area = u64;

/// Identifies an item type within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

/// Identifies a bin type within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinId(pub u32);

/// One placeable unit: the `index`-th demanded copy of an item type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyId {
    pub item: ItemId,
    pub index: u32,
}

/// A rectangular item type and how many copies of it are demanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSpec {
    pub id: ItemId,
    pub width: Dim,
    pub height: Dim,
    pub demand: u32,
}

impl ItemSpec {
    pub fn area(&self) -> Area {
        self.width * self.height
    }
}

/// A rectangular bin type; `quantity: None` means an unlimited supply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSpec {
    pub id: BinId,
    pub width: Dim,
    pub height: Dim,
    pub quantity: Option<u32>,
}

impl BinSpec {
    pub fn area(&self) -> Area {
        self.width * self.height
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("item {0}: width, height and demand must all be at least 1")]
    InvalidItem(u32),
    #[error("bin {0}: width, height and quantity must all be at least 1")]
    InvalidBin(u32),
    #[error("duplicate item id {0}")]
    DuplicateItemId(u32),
    #[error("duplicate bin id {0}")]
    DuplicateBinId(u32),
    #[error("instance has no items")]
    NoItems,
    #[error("instance has no bins")]
    NoBins,
    #[error("item {0} ({1}x{2}) does not fit in any bin")]
    ItemFitsNowhere(u32, Dim, Dim),
}

/// Immutable problem definition.
///
/// Construction validates the specs and rejects instances where some item
/// cannot fit into any bin in any allowed orientation.
#[derive(Debug, Clone)]
pub struct Instance {
    items: Vec<ItemSpec>,
    bins: Vec<BinSpec>,
    rotation_allowed: bool,
    /// Stored for interchange; not enforced as a constraint.
    stage_limit: Option<u32>,
    total_copies: u32,
    total_item_area: Area,
}

impl Instance {
    pub fn new(
        items: Vec<ItemSpec>,
        bins: Vec<BinSpec>,
        rotation_allowed: bool,
    ) -> Result<Self, InstanceError> {
        Self::with_stage_limit(items, bins, rotation_allowed, None)
    }

    pub fn with_stage_limit(
        items: Vec<ItemSpec>,
        bins: Vec<BinSpec>,
        rotation_allowed: bool,
        stage_limit: Option<u32>,
    ) -> Result<Self, InstanceError> {
        if items.is_empty() {
            return Err(InstanceError::NoItems);
        }
        if bins.is_empty() {
            return Err(InstanceError::NoBins);
        }
        let mut seen = HashSet::new();
        for item in &items {
            if item.width < 1 || item.height < 1 || item.demand < 1 {
                return Err(InstanceError::InvalidItem(item.id.0));
            }
            if !seen.insert(item.id) {
                return Err(InstanceError::DuplicateItemId(item.id.0));
            }
        }
        let mut seen = HashSet::new();
        for bin in &bins {
            if bin.width < 1 || bin.height < 1 || bin.quantity == Some(0) {
                return Err(InstanceError::InvalidBin(bin.id.0));
            }
            if !seen.insert(bin.id) {
                return Err(InstanceError::DuplicateBinId(bin.id.0));
            }
        }
        for item in &items {
            let fits = bins.iter().any(|bin| {
                fits_in(item.width, item.height, bin.width, bin.height)
                    || (rotation_allowed && fits_in(item.height, item.width, bin.width, bin.height))
            });
            if !fits {
                return Err(InstanceError::ItemFitsNowhere(
                    item.id.0,
                    item.width,
                    item.height,
                ));
            }
        }
        let total_copies = items.iter().map(|i| i.demand).sum();
        let total_item_area = items.iter().map(|i| i.area() * i.demand as Area).sum();
        Ok(Self {
            items,
            bins,
            rotation_allowed,
            stage_limit,
            total_copies,
            total_item_area,
        })
    }

    pub fn items(&self) -> &[ItemSpec] {
        &self.items
    }

    pub fn bins(&self) -> &[BinSpec] {
        &self.bins
    }

    pub fn rotation_allowed(&self) -> bool {
        self.rotation_allowed
    }

    pub fn stage_limit(&self) -> Option<u32> {
        self.stage_limit
    }

    pub fn item(&self, id: ItemId) -> &ItemSpec {
        self.items
            .iter()
            .find(|i| i.id == id)
            .expect("unknown item id")
    }

    pub fn try_item(&self, id: ItemId) -> Option<&ItemSpec> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn bin(&self, id: BinId) -> &BinSpec {
        self.bins
            .iter()
            .find(|b| b.id == id)
            .expect("unknown bin id")
    }

    pub fn try_bin(&self, id: BinId) -> Option<&BinSpec> {
        self.bins.iter().find(|b| b.id == id)
    }

    /// Total number of demanded item copies.
    pub fn total_copies(&self) -> u32 {
        self.total_copies
    }

    pub fn total_item_area(&self) -> Area {
        self.total_item_area
    }

    /// All demanded copies, ordered by item then copy index.
    pub fn copies(&self) -> impl Iterator<Item = CopyId> + '_ {
        self.items.iter().flat_map(|item| {
            (0..item.demand).map(move |index| CopyId {
                item: item.id,
                index,
            })
        })
    }

    /// Dimensions of a copy in its unrotated orientation.
    pub fn copy_dims(&self, copy: CopyId) -> (Dim, Dim) {
        let spec = self.item(copy.item);
        (spec.width, spec.height)
    }
}

pub(crate) fn fits_in(w: Dim, h: Dim, outer_w: Dim, outer_h: Dim) -> bool {
    w <= outer_w && h <= outer_h
}
