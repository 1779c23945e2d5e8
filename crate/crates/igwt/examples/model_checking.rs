//! Goodness-of-fit checking: compare a data corpus against a model's
//! simulated ensemble and analytical moments.
//!
//! ```sh
//! cargo run --example model_checking
//! ```

use igwt::check::check;
use igwt::simulate::{sample_ensemble, SimConfig};
use igwt::ModelSpec;

fn main() {
    let model = ModelSpec::reference();
    // stand-in "data": 100 trees from the model itself, so every column
    // of the report should agree
    let data = sample_ensemble(&model, 100, &SimConfig::new(404)).expect("simulates");

    let report = check(&model, &data, 2_000, 7, 1e-10).expect("check runs");

    println!(
        "{:<16} {:>18} {:>18} {:>18}",
        "statistic", "data (mean,var)", "sim (mean,var)", "analytic (mean,var)"
    );
    for row in &report.table {
        println!(
            "{:<16} ({:>7.2},{:>8.1}) ({:>7.2},{:>8.1}) ({:>7.2},{:>8.1})",
            row.statistic,
            row.data.mean,
            row.data.variance,
            row.simulation.mean,
            row.simulation.variance,
            row.analytical.mean,
            row.analytical.variance,
        );
    }

    println!("\ngeneration sizes, data vs analytic (mean [95% CI]):");
    for row in report.generation_sizes.iter().take(7) {
        println!(
            "  n = {}: data {:.3} [{:.3}, {:.3}] vs analytic {:.3}",
            row.generation,
            row.empirical.mean,
            row.empirical.mean_ci.0,
            row.empirical.mean_ci.1,
            row.analytic_mean
        );
    }

    let z = &report.ecdfs[0];
    println!(
        "\nECDF `{}`: {} jump points over [{}, {}], pointwise {}% band",
        z.name,
        z.ecdf.xs.len(),
        z.ecdf.xs.first().unwrap(),
        z.ecdf.xs.last().unwrap(),
        z.ecdf.level * 100.0
    );
    println!("full report serializes to JSON ({} bytes)", report.to_json().len());
    println!("plot-ready CSV series: CheckReport::write_csv_files(dir)");
}
