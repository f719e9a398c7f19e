//! Build Rokhlin towers for the odometer: disjoint levels of prescribed
//! total measure, met from below by dyadic rounding, with zero residual.
//!
//! Run with: cargo run --example rokhlin_tower

use num_rational::BigRational;
use slow_birkhoff::{build_tower, build_tower_zn, tower_set, tower_set_zn};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn main() {
    // a height-4 tower of measure exactly 1/4: one level in each quarter
    let t = build_tower(4, &rat(1, 4), 6).unwrap();
    println!(
        "height {} tower, base [0,{}), measure {}",
        t.height(),
        t.base_width(),
        t.measure()
    );
    for i in 1..=t.height() {
        println!("  level {} = {}", i, t.level_set(i).unwrap());
    }
    println!("  union   = {}", tower_set(&t).unwrap());

    // non-dyadic target: the measure approaches 1/3 from below, and the
    // shortfall stays under h * 2^-p
    let t = build_tower(100, &rat(1, 3), 20).unwrap();
    println!(
        "height 100, target 1/3: measure {} (shortfall {})",
        t.measure(),
        rat(1, 3) - t.measure()
    );

    // a tall tower: 2^10 levels, measure exactly 1/16
    let t = build_tower(1 << 10, &rat(1, 16), 14).unwrap();
    println!(
        "height {}: measure {} with base width {}",
        t.height(),
        t.measure(),
        t.base_width()
    );

    // the box analogue for the Z^2 action: side 2, measure (2d)^2 = 1/4
    let t2 = build_tower_zn(2, &rat(1, 4), 6, 2).unwrap();
    println!(
        "Z^2 tower: side {}, base [0,{})^2, measure {}",
        t2.side(),
        t2.base_width(),
        t2.measure()
    );
    println!("  union has {} boxes", tower_set_zn(&t2).unwrap().boxes().len());
}
