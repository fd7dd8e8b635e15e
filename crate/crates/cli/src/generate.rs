//! Generator for class-shaped random instances in the plain-text format.
//!
//! Classes follow the usual item/bin distributions used for this problem
//! family. These are freshly drawn samples for harness exercises, not the
//! canonical published instance files, so results on them are not
//! comparable against published tables.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};

use gdrr::SolverRng;

#[derive(Debug, Clone)]
pub struct GenSpec {
    /// Class number, 1 through 10.
    pub class: u32,
    /// Items per instance (each its own type with demand 1).
    pub items: u32,
    /// Number of instances to generate.
    pub count: u32,
    pub seed: u64,
}

/// Bin size per class.
fn bin_size(class: u32) -> (u64, u64) {
    match class {
        1 => (10, 10),
        2 => (30, 30),
        3 => (40, 40),
        4 => (100, 100),
        5 => (100, 100),
        6 => (300, 300),
        7..=10 => (100, 100),
        _ => unreachable!("class checked by generate_class"),
    }
}

fn draw_item(class: u32, rng: &mut SolverRng) -> (u64, u64) {
    match class {
        1 | 2 => (rng.random_range(1..=10), rng.random_range(1..=10)),
        3 | 4 => (rng.random_range(1..=35), rng.random_range(1..=35)),
        5 | 6 => (rng.random_range(1..=100), rng.random_range(1..=100)),
        7..=10 => {
            // one dominant shape type with 70% probability, 10% for the rest
            let dominant = class - 6;
            let roll = rng.random_range(0..10u32);
            let shape = if roll < 7 {
                dominant
            } else {
                // remaining three types, uniformly
                let others: Vec<u32> = (1..=4).filter(|&t| t != dominant).collect();
                others[(roll - 7) as usize]
            };
            match shape {
                1 => (rng.random_range(67..=100), rng.random_range(1..=50)),
                2 => (rng.random_range(1..=50), rng.random_range(67..=100)),
                3 => (rng.random_range(50..=100), rng.random_range(50..=100)),
                _ => (rng.random_range(1..=50), rng.random_range(1..=50)),
            }
        }
        _ => unreachable!(),
    }
}

/// Writes `count` instances named `cl<class>_<items>_<k>.txt` into `dir`.
pub fn generate_class(spec: &GenSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    if !(1..=10).contains(&spec.class) {
        bail!("class must be between 1 and 10, got {}", spec.class);
    }
    if spec.items == 0 || spec.count == 0 {
        bail!("items and count must be at least 1");
    }
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;

    let (bin_w, bin_h) = bin_size(spec.class);
    let mut written = Vec::new();
    for index in 1..=spec.count {
        // stable per-instance stream so single files can be regenerated
        let mut rng = SolverRng::seed_from_u64(
            spec.seed ^ (spec.class as u64) << 32 ^ (spec.items as u64) << 16 ^ index as u64,
        );
        let mut body = String::new();
        body.push_str(&format!(
            "# generated: class {} with {} items, instance {} of {}\n",
            spec.class, spec.items, index, spec.count
        ));
        body.push_str(&format!("1\n{bin_w} {bin_h} 0\n{}\n", spec.items));
        for _ in 0..spec.items {
            let (w, h) = draw_item(spec.class, &mut rng);
            body.push_str(&format!("{w} {h} 1\n"));
        }
        let path = dir.join(format!(
            "cl{:02}_{:03}_{:02}.txt",
            spec.class, spec.items, index
        ));
        std::fs::write(&path, body)
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_instance, InstanceFormat};

    #[test]
    fn generated_files_parse_and_match_the_class_shape() {
        let dir = std::env::temp_dir().join(format!("gdrr-gen-test-{}", std::process::id()));
        let files = generate_class(
            &GenSpec {
                class: 1,
                items: 20,
                count: 3,
                seed: 7,
            },
            &dir,
        )
        .unwrap();
        assert_eq!(files.len(), 3);
        for file in &files {
            let bytes = std::fs::read(file).unwrap();
            let named = parse_instance(
                &bytes,
                InstanceFormat::PlainText,
                &file.to_string_lossy(),
                None,
            )
            .unwrap();
            assert_eq!(named.instance.total_copies(), 20);
            assert_eq!(named.instance.bins().len(), 1);
            assert_eq!(named.instance.bins()[0].width, 10);
            assert!(named
                .instance
                .items()
                .iter()
                .all(|i| i.width <= 10 && i.height <= 10 && i.demand == 1));
        }
        // same seed regenerates identical bytes
        let again = generate_class(
            &GenSpec {
                class: 1,
                items: 20,
                count: 3,
                seed: 7,
            },
            &dir,
        )
        .unwrap();
        for (a, b) in files.iter().zip(&again) {
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn class_bounds_are_enforced() {
        let dir = std::env::temp_dir().join("gdrr-gen-bounds");
        assert!(generate_class(
            &GenSpec {
                class: 11,
                items: 5,
                count: 1,
                seed: 0
            },
            &dir
        )
        .is_err());
    }
}
