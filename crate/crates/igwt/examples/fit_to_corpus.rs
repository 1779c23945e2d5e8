//! Maximum-likelihood fitting: simulate a corpus from known parameters,
//! pre-flight the family choice, fit, and compare.
//!
//! ```sh
//! cargo run --example fit_to_corpus
//! ```

use igwt::estimate::{fit, profile_feasibility, FitOptions, FitTemplate};
use igwt::simulate::{sample_ensemble, SimConfig};
use igwt::stats::tally;
use igwt::ModelSpec;

fn main() {
    let truth = ModelSpec::reference();
    let trees = sample_ensemble(&truth, 5_000, &SimConfig::new(1)).expect("simulates");
    println!("simulated {} trees from the reference parameters", trees.len());

    // the likelihood depends on the corpus only through these tallies
    let stats = tally(&trees);
    println!(
        "tallied {} vertices over {} generations",
        stats.total_vertices(),
        stats.n_max_observed() + 1
    );

    // pre-flight: can the template family represent each generation's
    // empirical moments?
    let template = FitTemplate::reference();
    let profile = profile_feasibility(&template, &stats);
    let infeasible: Vec<u32> = profile
        .rows
        .iter()
        .filter(|r| r.feasible == Some(false))
        .map(|r| r.generation)
        .collect();
    println!("generations with infeasible empirical moments: {infeasible:?}");

    let result = fit(&stats, &template, &FitOptions::default()).expect("fit succeeds");
    println!(
        "\nfit: log-likelihood {:.2}, converged: {}, {} starts, {} iterations",
        result.log_likelihood, result.converged, result.restarts_used, result.iterations
    );

    println!("\n{:>10} {:>10} {:>10} {:>8}", "parameter", "truth", "fitted", "rel err");
    let names = ["phi_1", "phi_2", "phi_3", "phi_4", "psi_1", "psi_2"];
    let true_params: Vec<f64> = truth
        .mean
        .params()
        .iter()
        .chain(truth.variance.params())
        .copied()
        .collect();
    let fitted: Vec<f64> = result
        .model
        .mean
        .params()
        .iter()
        .chain(result.model.variance.params())
        .copied()
        .collect();
    for ((name, t), f) in names.iter().zip(&true_params).zip(&fitted) {
        println!("{name:>10} {t:>10.4} {f:>10.4} {:>8.4}", (f - t).abs() / t);
    }
}
