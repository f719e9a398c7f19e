//! Exact dyadic interval-set algebra: unions merge, complements account for
//! every point, and odometer preimages preserve measure with zero error.
//!
//! Run with: cargo run --example interval_algebra

use slow_birkhoff::{Dyadic, DyadicInterval, IntervalSet, OdometerZ};

fn iv(lo: (u64, u32), hi: (u64, u32)) -> DyadicInterval {
    DyadicInterval::new(
        Dyadic::from_parts(lo.0, lo.1).unwrap(),
        Dyadic::from_parts(hi.0, hi.1).unwrap(),
    )
    .unwrap()
}

fn main() {
    // adjacent intervals merge into canonical form
    let a = IntervalSet::from_interval(iv((0, 0), (1, 2)));
    let b = IntervalSet::from_interval(iv((1, 2), (1, 1)));
    println!("[0,1/4) u [1/4,1/2) = {}", a.union(&b));

    let set = IntervalSet::from_intervals(vec![iv((1, 3), (1, 2)), iv((1, 1), (3, 2))]);
    println!("set        = {}", set);
    println!("complement = {}", set.complement());
    println!(
        "measures   = {} + {} = {}",
        set.measure(),
        set.complement().measure(),
        set.measure() + set.complement().measure()
    );

    // preimages under the odometer are again dyadic interval sets, with
    // exactly the same measure
    let od = OdometerZ::new();
    let pre = od.preimage(&set).unwrap();
    println!("preimage   = {}", pre);
    println!("preimage measure = {}", pre.measure());

    // membership matches the forward map pointwise
    let x = Dyadic::from_parts(11, 4).unwrap();
    println!(
        "x = {}: T(x) = {}, set contains T(x): {}, preimage contains x: {}",
        x,
        od.step(&x).unwrap(),
        set.contains(&od.step(&x).unwrap()),
        pre.contains(&x)
    );
}
