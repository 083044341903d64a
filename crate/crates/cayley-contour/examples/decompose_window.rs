//! Contour decomposition of a hand-built window, followed by a
//! contour-removal walkthrough showing the boundary bookkeeping.
//!
//! ```bash
//! cargo run --example decompose_window
//! ```

use cayley_contour::contour::{decompose, edge_boundary, imp_balls, remove_contour, subcontours};
use cayley_contour::ground::{improper_balls, spectrum};
use cayley_contour::potential::{potts_competing, SpinWindow, DEFAULT_ENUM_CAP};
use cayley_contour::tree::Vertex;
use cayley_contour::{parse_rational, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn v(s: &str) -> Vertex {
    s.parse().unwrap()
}

fn main() {
    let model = potts_competing(rat("-1"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap();
    let sp = spectrum(&model);

    // two clusters: a mark-2 pair near the root and a lone mark-3 vertex
    // two steps away from it
    let mut w = SpinWindow::constant(3, 2, 1);
    w.set(v("-"), 2).unwrap();
    w.set(v("1"), 2).unwrap();
    w.set(v("2"), 3).unwrap();
    w.set(v("3.1.3"), 3).unwrap();

    println!("window: n = {}, boundary mark = {}", w.n(), w.boundary());
    println!("boundary edges: {}", edge_boundary(&w).len());
    for t in subcontours(&w) {
        println!(
            "  subcontour mark {}: interior {:?}, |supp| = {}",
            t.mark,
            t.interior.as_slice(),
            t.support.len()
        );
    }

    let contours = decompose(&w, model.rprime());
    let bd = improper_balls(&model, &sp, &w).unwrap();
    println!("\ncontours: {}   improper balls: {}", contours.len(), bd.len());
    for (i, c) in contours.iter().enumerate() {
        let imp = imp_balls(c, &bd.improper);
        println!(
            "  contour {i}: marks {:?}, |Int| = {}, |imp| = {}",
            c.marks(),
            c.interior().len(),
            imp.len()
        );
    }

    // removing the first contour drops exactly its imp balls and leaves the
    // other contour untouched
    let gamma = &contours[0];
    let removed = remove_contour(&w, gamma, model.rprime()).unwrap();
    let bd_after = improper_balls(&model, &sp, &removed).unwrap();
    println!(
        "\nafter removing contour 0: improper balls {} -> {}",
        bd.len(),
        bd_after.len()
    );
    for (i, c) in decompose(&removed, model.rprime()).iter().enumerate() {
        println!(
            "  remaining contour {i}: marks {:?}, |imp| = {}",
            c.marks(),
            imp_balls(c, &bd_after.improper).len()
        );
    }
}
