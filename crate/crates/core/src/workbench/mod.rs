//! Synthetic data, quality metrics, config and report files, benchmarks.

mod bench;
mod config;
mod generator;
mod metrics;
mod report;
mod zipf;

pub use bench::{bench, write_bench_table, BenchModule, BenchRow, Scenario};
pub use config::Config;
pub use generator::{generate_dataset, GeneratorConfig, ATTRIBUTE_NAMES, MAX_BLOCKS};
pub use metrics::{pairs_completeness, recall, GroundTruth};
pub use report::RunReport;
pub use zipf::{harmonic_sum, uniform_block_sizes, zipf_block_sizes, Distribution};
