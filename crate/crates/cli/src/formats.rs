//! Instance and solution file formats.
//!
//! Instances come in two shapes: a structured JSON document and a compact
//! whitespace-separated text format (`#` starts a comment):
//!
//! ```text
//! B                 number of bin types
//! W H Q             per bin type; Q = 0 means unlimited
//! M                 number of item types
//! w h d             per item type
//! ```
//!
//! Solutions are written as a JSON document carrying the parameters, the
//! nested pattern trees and the flattened layout rectangles; reading one
//! back yields a solution equal in quality and layout to the original.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gdrr::model::{
    layout, validate, Area, BinId, BinSpec, CopyId, CuttingPattern, Dim, Instance, ItemId,
    ItemSpec, Node, NodeId, NodeKind, Orientation, PatternId, Solution,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{file}:{line}:{column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Semantic { file: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("solution does not validate: {report}")]
    InvalidSolution { report: String },
}

/// Which on-disk instance format to expect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Canonical,
    PlainText,
}

impl InstanceFormat {
    /// Guesses from a filename extension and the first non-space byte.
    pub fn detect(path: &str, bytes: &[u8]) -> InstanceFormat {
        if path.ends_with(".json") {
            return InstanceFormat::Canonical;
        }
        match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') => InstanceFormat::Canonical,
            _ => InstanceFormat::PlainText,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    name: Option<String>,
    #[serde(default)]
    rotation_allowed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stage_limit: Option<u32>,
    bins: Vec<BinDoc>,
    items: Vec<ItemDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BinDoc {
    width: Dim,
    height: Dim,
    #[serde(default)]
    quantity: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ItemDoc {
    width: Dim,
    height: Dim,
    #[serde(default = "one")]
    demand: u32,
}

fn one() -> u32 {
    1
}

/// A parsed instance together with its display name.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Instance,
}

/// Parses an instance document. `rotation_override`, when given, wins over
/// whatever the file says.
pub fn parse_instance(
    bytes: &[u8],
    format: InstanceFormat,
    file: &str,
    rotation_override: Option<bool>,
) -> Result<NamedInstance, FormatError> {
    match format {
        InstanceFormat::Canonical => parse_canonical(bytes, file, rotation_override),
        InstanceFormat::PlainText => parse_plain_text(bytes, file, rotation_override),
    }
}

fn stem_of(file: &str) -> String {
    std::path::Path::new(file)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| file.to_string())
}

fn parse_canonical(
    bytes: &[u8],
    file: &str,
    rotation_override: Option<bool>,
) -> Result<NamedInstance, FormatError> {
    let doc: InstanceDoc = serde_json::from_slice(bytes)?;
    let rotation = rotation_override.unwrap_or(doc.rotation_allowed);
    let items = doc
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| ItemSpec {
            id: ItemId(i as u32),
            width: item.width,
            height: item.height,
            demand: item.demand,
        })
        .collect();
    let bins = doc
        .bins
        .iter()
        .enumerate()
        .map(|(i, bin)| BinSpec {
            id: BinId(i as u32),
            width: bin.width,
            height: bin.height,
            quantity: bin.quantity,
        })
        .collect();
    let instance = Instance::with_stage_limit(items, bins, rotation, doc.stage_limit)
        .map_err(|e| FormatError::Semantic {
            file: file.to_string(),
            message: e.to_string(),
        })?;
    Ok(NamedInstance {
        name: doc.name.unwrap_or_else(|| stem_of(file)),
        instance,
    })
}

struct Tokens<'a> {
    tokens: Vec<(usize, usize, &'a str)>,
    cursor: usize,
    file: String,
}

impl<'a> Tokens<'a> {
    fn lex(text: &'a str, file: &str) -> Tokens<'a> {
        let mut tokens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let effective = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let mut column = 0;
            for chunk in effective.split_inclusive(char::is_whitespace) {
                let token = chunk.trim();
                if !token.is_empty() {
                    let offset = chunk.len() - chunk.trim_start().len();
                    tokens.push((lineno + 1, column + offset + 1, token));
                }
                column += chunk.len();
            }
        }
        Tokens {
            tokens,
            cursor: 0,
            file: file.to_string(),
        }
    }

    fn next_number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, FormatError> {
        match self.tokens.get(self.cursor) {
            Some(&(line, column, token)) => {
                self.cursor += 1;
                token.parse::<T>().map_err(|_| FormatError::Parse {
                    file: self.file.clone(),
                    line,
                    column,
                    message: format!("expected {what}, found {token:?}"),
                })
            }
            None => {
                let (line, column) = self
                    .tokens
                    .last()
                    .map(|&(l, c, t)| (l, c + t.len()))
                    .unwrap_or((1, 1));
                Err(FormatError::Parse {
                    file: self.file.clone(),
                    line,
                    column,
                    message: format!("unexpected end of input, expected {what}"),
                })
            }
        }
    }

    fn expect_end(&self) -> Result<(), FormatError> {
        match self.tokens.get(self.cursor) {
            None => Ok(()),
            Some(&(line, column, token)) => Err(FormatError::Parse {
                file: self.file.clone(),
                line,
                column,
                message: format!("trailing input {token:?}"),
            }),
        }
    }
}

fn parse_plain_text(
    bytes: &[u8],
    file: &str,
    rotation_override: Option<bool>,
) -> Result<NamedInstance, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Parse {
        file: file.to_string(),
        line: 1,
        column: 1,
        message: format!("not valid UTF-8: {e}"),
    })?;
    let mut tokens = Tokens::lex(text, file);

    let bin_count: u32 = tokens.next_number("the bin-type count")?;
    let mut bins = Vec::with_capacity(bin_count as usize);
    for i in 0..bin_count {
        let width: Dim = tokens.next_number("a bin width")?;
        let height: Dim = tokens.next_number("a bin height")?;
        let quantity: u32 = tokens.next_number("a bin quantity (0 = unlimited)")?;
        bins.push(BinSpec {
            id: BinId(i),
            width,
            height,
            quantity: if quantity == 0 { None } else { Some(quantity) },
        });
    }
    let item_count: u32 = tokens.next_number("the item-type count")?;
    let mut items = Vec::with_capacity(item_count as usize);
    for i in 0..item_count {
        let width: Dim = tokens.next_number("an item width")?;
        let height: Dim = tokens.next_number("an item height")?;
        let demand: u32 = tokens.next_number("an item demand")?;
        items.push(ItemSpec {
            id: ItemId(i),
            width,
            height,
            demand,
        });
    }
    tokens.expect_end()?;

    let instance = Instance::new(items, bins, rotation_override.unwrap_or(false)).map_err(|e| {
        FormatError::Semantic {
            file: file.to_string(),
            message: e.to_string(),
        }
    })?;
    Ok(NamedInstance {
        name: stem_of(file),
        instance,
    })
}

/// Serializes an instance to the canonical JSON document.
pub fn write_instance(named: &NamedInstance) -> String {
    let doc = InstanceDoc {
        name: Some(named.name.clone()),
        rotation_allowed: named.instance.rotation_allowed(),
        stage_limit: named.instance.stage_limit(),
        bins: named
            .instance
            .bins()
            .iter()
            .map(|b| BinDoc {
                width: b.width,
                height: b.height,
                quantity: b.quantity,
            })
            .collect(),
        items: named
            .instance
            .items()
            .iter()
            .map(|i| ItemDoc {
                width: i.width,
                height: i.height,
                demand: i.demand,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance docs always serialize")
}

// ---------------------------------------------------------------------------
// solution documents
// ---------------------------------------------------------------------------

/// Run metadata embedded in solution files.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RunMeta {
    pub seed: u64,
    pub threads: usize,
    pub value_power: f64,
    pub blink_rate: f64,
    pub mean_removals: u32,
    pub history_length: usize,
    pub time_limit_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration_limit: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionDoc {
    instance: String,
    rotation_allowed: bool,
    params: RunMeta,
    total_bin_area: Area,
    utilization: f64,
    excluded: Vec<ExcludedDoc>,
    patterns: Vec<PatternDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExcludedDoc {
    item: u32,
    count: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct PatternDoc {
    bin: u32,
    width: Dim,
    height: Dim,
    tree: NodeDoc,
    layout: Vec<RectDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NodeDoc {
    Structure {
        orientation: OrientationDoc,
        width: Dim,
        height: Dim,
        children: Vec<NodeDoc>,
    },
    Item {
        item: u32,
        rotated: bool,
        width: Dim,
        height: Dim,
    },
    Leftover {
        width: Dim,
        height: Dim,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum OrientationDoc {
    Vertical,
    Horizontal,
}

#[derive(Debug, Serialize, Deserialize)]
struct RectDoc {
    item: u32,
    rotated: bool,
    x: Dim,
    y: Dim,
    width: Dim,
    height: Dim,
}

fn node_to_doc(node: &Node) -> NodeDoc {
    match &node.kind {
        NodeKind::Structure {
            orientation,
            children,
        } => NodeDoc::Structure {
            orientation: match orientation {
                Orientation::Vertical => OrientationDoc::Vertical,
                Orientation::Horizontal => OrientationDoc::Horizontal,
            },
            width: node.width,
            height: node.height,
            children: children.iter().map(node_to_doc).collect(),
        },
        NodeKind::Item { copy, rotated } => NodeDoc::Item {
            item: copy.item.0,
            rotated: *rotated,
            width: node.width,
            height: node.height,
        },
        NodeKind::Leftover => NodeDoc::Leftover {
            width: node.width,
            height: node.height,
        },
    }
}

/// Serializes a validating solution. Refuses one that does not validate.
pub fn write_solution(
    solution: &Solution,
    named: &NamedInstance,
    meta: &RunMeta,
) -> Result<String, FormatError> {
    let report = validate(&named.instance, solution);
    if !report.is_ok() {
        return Err(FormatError::InvalidSolution {
            report: report.to_string(),
        });
    }
    let mut excluded_counts: std::collections::BTreeMap<u32, u32> = Default::default();
    for copy in solution.excluded() {
        *excluded_counts.entry(copy.item.0).or_insert(0) += 1;
    }
    let doc = SolutionDoc {
        instance: named.name.clone(),
        rotation_allowed: named.instance.rotation_allowed(),
        params: meta.clone(),
        total_bin_area: solution.total_bin_area(),
        utilization: solution.utilization().unwrap_or(0.0),
        excluded: excluded_counts
            .into_iter()
            .map(|(item, count)| ExcludedDoc { item, count })
            .collect(),
        patterns: solution
            .patterns()
            .iter()
            .map(|p| PatternDoc {
                bin: p.bin.0,
                width: p.width(),
                height: p.height(),
                tree: node_to_doc(&p.root),
                layout: layout(p)
                    .into_iter()
                    .map(|r| RectDoc {
                        item: r.copy.item.0,
                        rotated: r.rotated,
                        x: r.x,
                        y: r.y,
                        width: r.width,
                        height: r.height,
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc).expect("solution docs always serialize"))
}

/// Reads a solution document back against its instance. Copy indices are
/// reassigned in reading order; the result validates and has the same
/// quality and layout as the written solution.
pub fn read_solution(bytes: &[u8], named: &NamedInstance) -> Result<Solution, FormatError> {
    let doc: SolutionDoc = serde_json::from_slice(bytes)?;
    let mut solution = Solution::empty(&named.instance);
    let mut next_copy: std::collections::HashMap<u32, u32> = Default::default();

    for pattern_doc in &doc.patterns {
        let mut next_node = 0u32;
        let root = doc_to_node(&pattern_doc.tree, &mut next_node, &mut next_copy, &mut solution)?;
        solution.push_pattern(CuttingPattern::from_root(
            PatternId(0),
            BinId(pattern_doc.bin),
            root,
        ));
    }
    // remaining copies stay excluded; verify the counts line up
    for entry in &doc.excluded {
        let assigned = next_copy.get(&entry.item).copied().unwrap_or(0);
        let spec = named
            .instance
            .try_item(ItemId(entry.item))
            .ok_or_else(|| FormatError::Semantic {
                file: doc.instance.clone(),
                message: format!("excluded entry references unknown item {}", entry.item),
            })?;
        if assigned + entry.count != spec.demand {
            return Err(FormatError::Semantic {
                file: doc.instance.clone(),
                message: format!(
                    "item {}: {} placed + {} excluded != demand {}",
                    entry.item, assigned, entry.count, spec.demand
                ),
            });
        }
    }

    let report = validate(&named.instance, &solution);
    if !report.is_ok() {
        return Err(FormatError::InvalidSolution {
            report: report.to_string(),
        });
    }
    // the stored utilization must match a fresh recomputation
    if !doc.patterns.is_empty() {
        let recomputed = solution.utilization().unwrap_or(0.0);
        if (recomputed - doc.utilization).abs() > 1e-9 {
            return Err(FormatError::Semantic {
                file: doc.instance.clone(),
                message: format!(
                    "stored utilization {} does not match recomputed {}",
                    doc.utilization, recomputed
                ),
            });
        }
    }
    Ok(solution)
}

fn doc_to_node(
    doc: &NodeDoc,
    next_node: &mut u32,
    next_copy: &mut std::collections::HashMap<u32, u32>,
    solution: &mut Solution,
) -> Result<Node, FormatError> {
    let id = NodeId(*next_node);
    *next_node += 1;
    Ok(match doc {
        NodeDoc::Structure {
            orientation,
            width,
            height,
            children,
        } => Node {
            id,
            width: *width,
            height: *height,
            kind: NodeKind::Structure {
                orientation: match orientation {
                    OrientationDoc::Vertical => Orientation::Vertical,
                    OrientationDoc::Horizontal => Orientation::Horizontal,
                },
                children: children
                    .iter()
                    .map(|c| doc_to_node(c, next_node, next_copy, solution))
                    .collect::<Result<_, _>>()?,
            },
        },
        NodeDoc::Item {
            item,
            rotated,
            width,
            height,
        } => {
            let index = next_copy.entry(*item).or_insert(0);
            let copy = CopyId {
                item: ItemId(*item),
                index: *index,
            };
            *index += 1;
            solution.mark_placed(copy);
            Node {
                id,
                width: *width,
                height: *height,
                kind: NodeKind::Item {
                    copy,
                    rotated: *rotated,
                },
            }
        }
        NodeDoc::Leftover { width, height } => Node {
            id,
            width: *width,
            height: *height,
            kind: NodeKind::Leftover,
        },
    })
}
