//! Order, simplicity and genus of the Hurwitz group of order 168, straight
//! from the library.

use vondyck::permgrp::{schreier_sims, SimplicityMode};
use vondyck::todd_coxeter::{enumerate, EnumerationLimits};
use vondyck::vondyck::genus;
use vondyck::words::parse_presentation;

fn main() {
    let p = parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=b^5, (a*b^-1)^4 >").unwrap();
    let table = enumerate(&p, &[], &EnumerationLimits::default()).unwrap();
    let g = schreier_sims(&table.generator_actions().unwrap()).unwrap();
    let verdict = g
        .is_simple(SimplicityMode::Deterministic { cap: 10_000 })
        .unwrap();
    println!("order {}", g.order());
    println!("{verdict:?}");
    println!("genus {}", genus(168, 7));
}
