//! Effect of within-generation offspring correlation on the generation-2
//! variance: the closed form against an equicorrelated sampler.
//!
//! ```sh
//! cargo run --example correlated_offspring
//! ```

use igwt::moments::{correlated_gen2_variance, generation_moments};
use igwt::simulate::replicate_rng;
use igwt::ModelSpec;
use rand::Rng;

fn main() {
    let model = ModelSpec::reference();
    let g0 = model.moments_at(0);
    let g1 = model.moments_at(1);
    let native0 = model.native_at(0).unwrap();
    let native1 = model.native_at(1).unwrap();

    let (_, s2_2) = generation_moments(&model, 2);
    println!("independent offspring give Var(Z_2) = {s2_2:.4}");
    println!(
        "with pairwise correlation rho among generation-1 offspring the\n\
         variance grows by (sigma_0^2 + mu_0^2 - mu_0) sigma_1^2 rho:\n"
    );

    println!("{:>6} {:>12} {:>14}", "rho", "closed form", "sampled (2e5)");
    for rho in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
        let formula = correlated_gen2_variance(g0.mean, g0.variance, g1.mean, g1.variance, rho);

        // equicorrelated draws: each offspring count copies one shared
        // draw with probability beta = sqrt(rho), giving pairwise
        // correlation exactly rho with the exact marginal
        let beta = rho.sqrt();
        let mut rng = replicate_rng(2024, (rho * 100.0) as u64);
        let replicates = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..replicates {
            let x0 = native0.sample(&mut rng);
            let shared = f64::from(native1.sample(&mut rng));
            let mut z2 = 0.0;
            for _ in 0..x0 {
                z2 += if rng.random::<f64>() < beta {
                    shared
                } else {
                    f64::from(native1.sample(&mut rng))
                };
            }
            sum += z2;
            sum_sq += z2 * z2;
        }
        let n = replicates as f64;
        let mean = sum / n;
        let var = (sum_sq - n * mean * mean) / (n - 1.0);
        println!("{rho:>6.2} {formula:>12.4} {var:>14.4}");
    }
}
