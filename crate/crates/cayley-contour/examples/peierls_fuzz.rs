//! Exact Peierls checks on seeded random windows, including the tight
//! single-flip witness.
//!
//! ```bash
//! cargo run --release --example peierls_fuzz
//! ```

use cayley_contour::ground::{peierls_fuzz, spectrum};
use cayley_contour::potential::{generalized_kronecker, potts_competing, DEFAULT_ENUM_CAP};
use cayley_contour::{parse_rational, rational_string, Rational};

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn main() {
    let models = [
        generalized_kronecker(rat("1"), 1, 2, 2, DEFAULT_ENUM_CAP).unwrap(),
        potts_competing(rat("-1"), rat("0"), 2, 3, DEFAULT_ENUM_CAP).unwrap(),
    ];
    for model in &models {
        let sp = spectrum(model);
        let lambda0 = sp.lambda0.clone().unwrap();
        println!(
            "{}  (lambda0 = {})",
            model.label(),
            rational_string(&lambda0)
        );
        let rows = peierls_fuzz(model, &sp, 3, 2000, 12345).unwrap();
        println!("  seed,boundary_size,lhs,rhs,holds");
        for row in rows.iter().take(5) {
            println!(
                "  {},{},{},{},{}",
                row.seed,
                row.boundary_size,
                rational_string(&row.lhs),
                rational_string(&row.rhs),
                row.holds
            );
        }
        let violations = rows.iter().filter(|r| !r.holds).count();
        let ties = rows
            .iter()
            .filter(|r| r.boundary_size > 0 && r.lhs == r.rhs)
            .count();
        println!(
            "  ... {} rows total: {violations} violations, {ties} windows sit exactly on the bound\n",
            rows.len()
        );
    }
}
