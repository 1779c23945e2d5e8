//! Simulate a corpus of trees and round-trip it through the text format.
//!
//! ```sh
//! cargo run --example simulate_corpus
//! ```

use igwt::simulate::{sample_ensemble, SimConfig};
use igwt::{corpus, ModelSpec};

fn main() {
    // the built-in reference model: Poisson-zero offspring at the root
    // generation, geometric-zero afterwards, exponentially decaying
    // mean and variance structures
    let model = ModelSpec::reference();

    // replicate i draws from substream (seed, i), so any prefix of the
    // ensemble is reproducible regardless of scheduling
    let config = SimConfig::new(20260810);
    let trees = sample_ensemble(&model, 10, &config).expect("reference model simulates");

    println!("corpus format (one parent-pointer array per line):");
    print!("{}", corpus::serialize(&trees));

    println!("\nper-tree summaries:");
    println!("{:>4} {:>8} {:>6} {:>6}  generation sizes", "tree", "vertices", "height", "leaves");
    for (i, tree) in trees.iter().enumerate() {
        let s = tree.summary();
        println!(
            "{i:>4} {:>8} {:>6} {:>6}  {:?}",
            s.total_vertices, s.height, s.leaves, s.per_generation_counts
        );
    }

    // the serialization is lossless, including child order
    let text = corpus::serialize(&trees);
    assert_eq!(corpus::parse(&text).unwrap(), trees);
    println!("\nround-trip through the text format is exact");
}
