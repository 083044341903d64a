//! Walking the tree: reduced words, distances, balls, spheres, and the
//! counting primitives everything else is built on.
//!
//! ```bash
//! cargo run --example tree_basics
//! ```

use cayley_contour::tree::{
    ball, covering_multiplicity, distance, geodesic, intersecting_balls, outer_boundary, sphere,
    translate, volume, Vertex, VertexSet,
};

fn v(s: &str) -> Vertex {
    s.parse().unwrap()
}

fn main() {
    let k = 2u8;
    let x = v("1.2");
    let y = v("3");
    println!("d({x}, {y}) = {}", distance(&x, &y));
    let path: Vec<String> = geodesic(&x, &y).iter().map(|p| p.to_string()).collect();
    println!("geodesic: {}", path.join(" -> "));

    let g = v("2.1");
    println!(
        "left shift by {g}: {x} -> {}, distance preserved: {}",
        translate(&x, &g),
        distance(&translate(&x, &g), &translate(&y, &g)) == distance(&x, &y)
    );

    println!("\nvolumes and spheres (k = {k}):");
    for n in 0..=4 {
        println!("  |V_{n}| = {:>3}   |W_{n}| = {:>3}", volume(n, k).len(), sphere(n, k).len());
    }

    let b = ball(&v("1"), 1, k);
    let members: Vec<String> = b.members().iter().map(|m| m.to_string()).collect();
    println!("\nball around 1 of radius 1: {{{}}}", members.join(", "));

    let set: VertexSet = [v("-"), v("1"), v("1.2")].into_iter().collect();
    println!(
        "connected 3-set: outer boundary {} (formula (k-1)n+2 = {}), balls meeting it {}",
        outer_boundary(&set, k).len(),
        (k as usize - 1) * 3 + 2,
        intersecting_balls(&set, 1, k).len()
    );

    let edge: VertexSet = [v("-"), v("1")].into_iter().collect();
    let far: VertexSet = [v("2"), v("3")].into_iter().collect();
    println!(
        "covering multiplicities at r = 2: edge {}, distance-2 pair {}",
        covering_multiplicity(&edge, 2, k).unwrap(),
        covering_multiplicity(&far, 2, k).unwrap()
    );
}
