//! Fixtures shared by the benchmarks under `benches/`.

use monotrack_core::{Plant, Polynomial, RootSet};

/// PUMA 560 force-sensor plant, sixth order with three zeros.
pub fn puma() -> Plant {
    Plant::new(
        Polynomial::new(vec![0.094, 20.0, 2.4e3, 3.5e5]),
        Polynomial::new(vec![1.2e-3, 2.8, 2e3, 3.9e5, 8.7e7, 6.4e9, 6.4e11]),
    )
    .expect("valid plant")
}

/// Zeros -187 and -16±141i.
pub fn puma_zeros() -> RootSet {
    let mut z = RootSet::new();
    z.push_real(-187.0, 1);
    z.push_pair(-16.0, 141.0, 1);
    z
}
