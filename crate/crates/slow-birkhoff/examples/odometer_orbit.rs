//! Walk the binary odometer: carries, orbits and the cyclic cell structure.
//!
//! Run with: cargo run --example odometer_orbit

use slow_birkhoff::{Dyadic, OdometerZ};

fn main() {
    let od = OdometerZ::new();

    // T adds 1/2 with carry toward less significant digits
    let mut x = Dyadic::zero();
    println!("orbit of 0 (the van der Corput sequence):");
    for i in 0..8 {
        println!("  T^{}(0) = {}", i, x);
        x = od.step(&x).unwrap();
    }

    // jumping 2^20 steps is a single reversed-index addition, not a loop
    let far = od.iterate(&Dyadic::zero(), 1 << 20).unwrap();
    println!("T^(2^20)(0) = {}", far);
    let back = od.iterate(&far, -(1 << 20)).unwrap();
    println!("stepping back recovers {}", back);

    // the rank-3 cells are permuted in one 8-cycle: each cell appears once
    println!("rank-3 cell visits over 8 steps starting at 5/8:");
    let mut y = Dyadic::from_parts(5, 3).unwrap();
    let mut cells = Vec::new();
    for _ in 0..8 {
        cells.push(y.cell_index(3));
        y = od.step(&y).unwrap();
    }
    println!("  cells {:?}", cells);

    // the inverse orbit of 0 leaves the dyadic rationals
    match od.iterate(&Dyadic::zero(), -1) {
        Err(e) => println!("T^-1(0): {}", e),
        Ok(_) => unreachable!(),
    }
}
