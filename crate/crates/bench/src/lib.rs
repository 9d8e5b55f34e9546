//! Shared fixtures for the benchmarks.

use metastable::potential::{Domain, Potential};

pub fn double_well() -> Potential {
    Potential::parse("0.1*(x^2-1)^2", 1, Domain::new(vec![[-2.5, 2.5]]).unwrap()).unwrap()
}

pub fn cross_potential() -> Potential {
    Potential::parse(
        "(x^2-1)^2 + (y^2-1)^2 + 0.5*x^2*y^2",
        2,
        Domain::new(vec![[-2.0, 2.0], [-2.0, 2.0]]).unwrap(),
    )
    .unwrap()
}
