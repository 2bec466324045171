//! Grid search for the data-fidelity weight lambda.
//!
//! Runs the standard acquisition (256x256 head phantom, 40% of the lines,
//! 4% center block, chirp intensity 0.25) once per decade of lambda and
//! prints the error each one reaches. The solver default of 1e3 was chosen
//! from this table.
//!
//! ```text
//! cargo run --release -p ssmri-core --example lambda_grid
//! ```

use ssmri_core::encoding::{forward, EncodingOperator};
use ssmri_core::metrics::rlne;
use ssmri_core::modulation::build_modulation;
use ssmri_core::phantom::{generate_phantom, PhantomSpec};
use ssmri_core::sampling::random_line_mask;
use ssmri_core::solver::{reconstruct, SolverConfig};

fn main() {
    let n = 256;
    let img = generate_phantom(&PhantomSpec::head(n)).expect("phantom");
    let mask = random_line_mask(n, 0.4, 0.04, 1).expect("mask");
    let modulation = build_modulation(0.25, n).expect("modulation");
    let op = EncodingOperator::new(modulation, mask, n).expect("operator");
    let data = forward(&img, &op).expect("acquisition");

    println!("{:>10} {:>10} {:>6} {:>8}", "lambda", "rlne", "iters", "seconds");
    for exp in 1..=6 {
        let lambda = 10f64.powi(exp);
        let cfg = SolverConfig { lambda, ..SolverConfig::default() };
        let res = reconstruct(&data, &op, &cfg, Some(&img)).expect("reconstruction");
        let err = rlne(&img, &res.image).expect("rlne");
        println!(
            "{:>10.0e} {:>10.5} {:>6} {:>8.2}",
            lambda, err, res.iterations, res.seconds
        );
    }
}
