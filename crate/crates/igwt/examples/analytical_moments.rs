//! Analytical moments of a model: per-generation vertex and leaf counts,
//! whole-tree totals, and the height distribution.
//!
//! ```sh
//! cargo run --example analytical_moments
//! ```

use igwt::moments::{generation_cov, moment_report};
use igwt::ModelSpec;

fn main() {
    let model = ModelSpec::reference();
    let report = moment_report(&model, 1e-12).expect("reference model is sub-critical");

    println!("generation moments (first 10 of {}):", report.gen_mean.len());
    println!("{:>3} {:>10} {:>10} {:>10} {:>10} {:>10}", "n", "m_n", "s_n^2", "leaf m_n", "leaf s_n^2", "P(H<=n)");
    for n in 0..10 {
        println!(
            "{n:>3} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.6}",
            report.gen_mean[n],
            report.gen_var[n],
            report.leaf_gen_mean[n],
            report.leaf_gen_var[n],
            report.height_cdf[n],
        );
    }

    println!("\nwhole-tree summaries:");
    println!("total vertices: mean {:.4}, variance {:.2}", report.total_mean, report.total_var);
    println!("leaves:         mean {:.4}, variance {:.2}", report.leaf_total_mean, report.leaf_total_var);
    println!("height:         mean {:.4}, variance {:.4}", report.height_mean, report.height_var);
    println!(
        "sums truncated after generation {} with certified tail <= {:.2e}",
        report.truncation_generation, report.truncation_tol
    );

    // covariance decays along the generations by the product of means
    println!("\ncov(Z_3, Z_{{3+k}}):");
    for k in 1..=5 {
        println!("  k = {k}: {:.4}", generation_cov(&model, 3, k));
    }
}
