//! Exact contour counts through the root against the exponential bound
//! `C0 * theta^l`, plus the connected-subgraph counts of the ball graph
//! against `(ek)^n`.
//!
//! ```bash
//! cargo run --release --example count_contours
//! ```

use cayley_contour::contour::{
    connected_ball_subgraph_count, count_contours, subtree_count_series,
};
use cayley_contour::ground::spectrum;
use cayley_contour::potential::{generalized_kronecker, DEFAULT_ENUM_CAP};
use cayley_contour::tree::Vertex;
use cayley_contour::{parse_rational, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

#[allow(clippy::needless_range_loop)]
fn main() {
    println!("connected n-subsets of the ball graph containing a fixed ball (k = 2):");
    let series = subtree_count_series(8, 2);
    println!("  n  enumerated  series  (ek)^n");
    for n in 1..=8usize {
        let count = connected_ball_subgraph_count(n, 2, 1 << 26).unwrap();
        let bound = (std::f64::consts::E * 2.0).powi(n as i32);
        println!("  {n}  {count:>9}  {:>6}  {bound:>10.1}", series[n]);
    }

    let model = generalized_kronecker(rat("1"), 1, 2, 2, DEFAULT_ENUM_CAP).unwrap();
    let sp = spectrum(&model);
    println!("\ncontours through the root by size (k = 2, q = 2, boundary 1):");
    println!("  l  N_l(root)  C0*theta^l   slack factor");
    for l in 4..=7usize {
        let rep = count_contours(&model, &sp, &Vertex::root(), l, 1, 1 << 30).unwrap();
        let slack = if rep.count > 0 {
            format!("{:.2e}", rep.bound / rep.count as f64)
        } else {
            "-".into()
        };
        println!("  {l}  {:>9}  {:>11.3e}  {slack}", rep.count, rep.bound);
    }
    println!("\nthe bound constants here: C0 = 4, theta = (4e)^2; the smallest");
    println!("realizable size is 4 (a single flipped vertex and its k+1 = 3");
    println!("surrounding balls), and size 5 is unrealizable.");
}
