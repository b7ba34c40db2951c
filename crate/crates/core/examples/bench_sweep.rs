//! Times the exact l = 80 disequilibrium and the nine figure sweeps.

use std::time::Instant;

use rotent::cli::{sweep_rows, SweepMode, SweepSpec};
use rotent::linearization::entropic_moment_exact;
use rotent::HyperState;

fn main() {
    let state = HyperState::new(3, vec![80, 0]).unwrap();
    for _ in 0..3 {
        let t = Instant::now();
        let w = entropic_moment_exact(&state, 2).unwrap();
        println!("W_2(l=80, m=0) = {:.15} in {:?}", w.value.value(), t.elapsed());
    }

    let t = Instant::now();
    let mut total = 0;
    for mode in SweepMode::all_figures() {
        let spec = SweepSpec::figure_defaults(mode);
        let rows = sweep_rows(&spec).unwrap();
        total += rows.len();
        println!(
            "  {:<9} {:>4} rows  ({:?} cumulative)",
            mode.name(),
            rows.len(),
            t.elapsed()
        );
    }
    println!("nine sweeps: {total} rows in {:?}", t.elapsed());
}
