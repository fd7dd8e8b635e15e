//! File formats, SVG rendering, parameter resolution and the benchmark
//! harness behind the `gdrr` binary.

pub mod bench;
pub mod formats;
pub mod generate;
pub mod params;
pub mod report;
pub mod svg;
