//! Compiling a finite-range interaction into a ball potential and checking
//! that the covering-multiplicity weights telescope exactly.
//!
//! ```bash
//! cargo run --example interaction_compiler
//! ```

use num::Zero;

use cayley_contour::ground::WindowSampler;
use cayley_contour::potential::{
    compile_interaction, potts_competing, relative_interaction_sum, InteractionPotential,
    SpinWindow, DEFAULT_ENUM_CAP,
};
use cayley_contour::tree::{covering_multiplicity, Vertex, VertexSet};
use cayley_contour::{parse_rational, rational_string, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn main() {
    // covering multiplicities decide the compiled weights: an edge sits in
    // two radius-1 balls, a distance-2 pair in exactly one
    let root = Vertex::root();
    let edge: VertexSet = [root.clone(), root.step(1)].into_iter().collect();
    let pair: VertexSet = [root.step(1), root.step(2)].into_iter().collect();
    println!(
        "n(edge) = {}, n(distance-2 pair) = {}",
        covering_multiplicity(&edge, 2, 2).unwrap(),
        covering_multiplicity(&pair, 2, 2).unwrap()
    );

    // declare the competing interaction: J1 on equal nearest neighbours,
    // J2 on equal distance-2 pairs
    let (j1, j2) = (rat("-1"), rat("-1/4"));
    let mut inter = InteractionPotential::new(2, 3, 2);
    let j1c = j1.clone();
    inter
        .add_pair_classes(1, move |u, v| {
            if u == v {
                j1c.clone()
            } else {
                Rational::zero()
            }
        })
        .unwrap();
    let j2c = j2.clone();
    inter
        .add_pair_classes(2, move |u, v| {
            if u == v {
                j2c.clone()
            } else {
                Rational::zero()
            }
        })
        .unwrap();

    let compiled = compile_interaction(&inter, DEFAULT_ENUM_CAP).unwrap();
    let closed = potts_competing(j1, j2, 2, 3, DEFAULT_ENUM_CAP).unwrap();
    println!(
        "compiled table equals the closed-form model: {}",
        compiled.table() == closed.table()
    );

    // the telescoping identity, window by window: the ball route and the
    // direct interaction sum agree exactly
    let sampler = WindowSampler::new(2, 2, 3, 1, 2024);
    let mut checked = 0;
    for idx in 0..100 {
        let w = sampler.window(idx);
        let constant = compiled
            .conditional_energy(&SpinWindow::constant(w.n(), 2, 1))
            .unwrap();
        let via_balls = compiled.conditional_energy(&w).unwrap() - &constant;
        let direct = relative_interaction_sum(&inter, &w).unwrap();
        assert_eq!(via_balls, direct);
        checked += 1;
        if idx < 3 {
            println!(
                "window {idx}: relative energy {} by both routes",
                rational_string(&direct)
            );
        }
    }
    println!("telescoping verified exactly on {checked} windows");
}
