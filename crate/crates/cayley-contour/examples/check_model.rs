//! Spectrum, gap constant and assumption verdicts for the three bundled
//! model families.
//!
//! ```bash
//! cargo run --example check_model
//! ```

use cayley_contour::ground::{check_assumptions, spectrum};
use cayley_contour::potential::{
    generalized_kronecker, nearest_neighbor, potts_competing, BallModel, PairTable,
    DEFAULT_ENUM_CAP,
};
use cayley_contour::{parse_rational, rational_string, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn report(model: &BallModel) {
    let sp = spectrum(model);
    let verdict = check_assumptions(&sp);
    println!("{}", model.label());
    let values: Vec<String> = sp.distinct.iter().map(rational_string).collect();
    println!("  spectrum      {}", values.join(", "));
    println!("  u_min         {}", rational_string(&sp.u_min));
    match &sp.lambda0 {
        Some(l0) => println!("  lambda0       {}", rational_string(l0)),
        None => println!("  lambda0       undefined (one-point spectrum)"),
    }
    println!("  ground spins  {:?}  (s = {})", sp.gs_spins, verdict.s);
    println!(
        "  verdicts      A1(sufficient)={} A2={} A3={} -> {}",
        verdict.a1_sufficient,
        verdict.a2,
        verdict.a3,
        if verdict.all_pass() { "PASS" } else { "FAIL" }
    );
    println!();
}

fn main() {
    // the competing-interaction Potts model, inside and outside the
    // coexistence region J1 < 0, J1 + 4 J2 < 0
    report(&potts_competing(rat("-1"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap());
    report(&potts_competing(rat("1"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap());
    report(&potts_competing(rat("-1"), rat("1/2"), 2, 3, DEFAULT_ENUM_CAP).unwrap());

    // the generalized Kronecker family: all q constants are ground states
    // for J > 0, none for J < 0
    report(&generalized_kronecker(rat("1"), 1, 2, 3, DEFAULT_ENUM_CAP).unwrap());
    report(&generalized_kronecker(rat("-1"), 1, 2, 3, DEFAULT_ENUM_CAP).unwrap());
    report(&generalized_kronecker(rat("1"), 2, 2, 2, DEFAULT_ENUM_CAP).unwrap());

    // a ferromagnetic Ising pair table
    let pair = PairTable::from_fn(2, |u, v| if u == v { rat("-1") } else { rat("1") });
    report(&nearest_neighbor(2, 2, &pair, DEFAULT_ENUM_CAP).unwrap());
}
