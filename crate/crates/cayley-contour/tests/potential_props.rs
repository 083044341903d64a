//! Cross-module identities for ball potentials: the telescoping of compiled
//! interactions, the derived edge weights, and conditional-energy facts.

use num::Zero;

use cayley_contour::ground::{spectrum, WindowSampler};
use cayley_contour::potential::{
    compile_interaction, generalized_kronecker, nearest_neighbor, potts_competing,
    relative_interaction_sum, InteractionPotential, PairTable, SpinWindow, DEFAULT_ENUM_CAP,
};
use cayley_contour::{parse_rational, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

/// The direct interaction sum and the ball route agree exactly, window by
/// window: compiling through the covering multiplicities telescopes.
#[test]
fn telescoping_for_the_competing_interaction() {
    let j1 = rat("-1");
    let j2 = rat("-1/4");
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
    // the compiled table is exactly the closed-form model
    let closed = potts_competing(j1, j2, 2, 3, DEFAULT_ENUM_CAP).unwrap();
    assert_eq!(compiled.table(), closed.table());
    let sampler = WindowSampler::new(2, 2, 3, 1, 41);
    for idx in 0..200 {
        let w = sampler.window(idx);
        let constant = compiled
            .conditional_energy(&SpinWindow::constant(w.n(), 2, 1))
            .unwrap();
        let via_balls = compiled.conditional_energy(&w).unwrap() - &constant;
        let direct = relative_interaction_sum(&inter, &w).unwrap();
        assert_eq!(via_balls, direct, "window {idx}");
    }
}

#[test]
fn telescoping_for_a_pair_table() {
    let pair = PairTable::from_fn(2, |u, v| if u == v { rat("-2/3") } else { rat("1/5") });
    let mut inter = InteractionPotential::new(2, 2, 1);
    let p = pair.clone();
    inter
        .add_pair_classes(1, move |u, v| p.get(u, v).clone())
        .unwrap();
    let model = nearest_neighbor(2, 2, &pair, DEFAULT_ENUM_CAP).unwrap();
    let sampler = WindowSampler::new(2, 2, 2, 1, 42);
    for idx in 0..200 {
        let w = sampler.window(idx);
        let constant = model
            .conditional_energy(&SpinWindow::constant(w.n(), 2, 1))
            .unwrap();
        let via_balls = model.conditional_energy(&w).unwrap() - &constant;
        let direct = relative_interaction_sum(&inter, &w).unwrap();
        assert_eq!(via_balls, direct, "window {idx}");
    }
}

/// For a model whose constants minimize, the constant window's conditional
/// energy is the ball count times the minimum.
#[test]
fn constant_window_energy_is_ball_count_times_minimum() {
    for (model, n) in [
        (generalized_kronecker(rat("1"), 1, 2, 3, DEFAULT_ENUM_CAP).unwrap(), 2usize),
        (potts_competing(rat("-1"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap(), 2),
        (generalized_kronecker(rat("1"), 1, 3, 2, DEFAULT_ENUM_CAP).unwrap(), 1),
    ] {
        let sp = spectrum(&model);
        assert!(sp.is_ground_spin(1));
        let w = SpinWindow::constant(n, model.k(), 1);
        let e = model.conditional_energy(&w).unwrap();
        let balls = model.conditional_centers(n).len() as i64;
        assert_eq!(e, Rational::from(num::BigInt::from(balls)) * &sp.u_min);
    }
}

/// The Ising pair table, summed over a star with the derived half weights,
/// matches a Potts-style cross-check at zero second coupling: the two
/// spectra coincide up to the affine relation between the conventions.
#[test]
fn ising_table_cross_checks_against_potts() {
    // pair(u,v) = -J(2 delta - 1) = -2J delta + J; with r = 1 each edge is
    // halved, so the star energy is -J * (#equal edges) + (k+1) J / 2.
    let j = rat("3/7");
    let pair = PairTable::from_fn(3, |u, v| {
        if u == v {
            -&rat("3/7")
        } else {
            rat("3/7")
        }
    });
    let ising = nearest_neighbor(3, 2, &pair, DEFAULT_ENUM_CAP).unwrap();
    // potts_competing at (J1, J2) = (-2J, 0) counts each equal edge as -J
    let potts = potts_competing(rat("-6/7"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap();
    let offset = Rational::new(3.into(), 2.into()) * &j; // (k+1) J / 2
    for (a, b) in ising.table().iter().zip(potts.table().iter()) {
        assert_eq!(a, &(b + &offset));
    }
}

/// Spectrum values respond linearly to the couplings: scaling the model
/// scales the whole table.
#[test]
fn table_scales_with_coupling() {
    let base = generalized_kronecker(rat("1"), 1, 2, 3, DEFAULT_ENUM_CAP).unwrap();
    let tripled = generalized_kronecker(rat("3"), 1, 2, 3, DEFAULT_ENUM_CAP).unwrap();
    for (a, b) in base.table().iter().zip(tripled.table().iter()) {
        assert_eq!(&(a * rat("3")), b);
    }
}
