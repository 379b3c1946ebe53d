use std::sync::Arc;

use barfill_core::homology::{homologous, is_boundary, is_cycle};
use barfill_core::registry::Registry;
use barfill_core::{random_chain, FiniteGroup, Limits, Modulus};
use proptest::prelude::*;

const GROUPS: &[&str] = &["cyclic:4", "cyclic:6", "sym:3", "dihedral:8"];

fn setup(gi: usize, l: u32) -> (Registry, Arc<FiniteGroup>, Modulus) {
    let reg = Registry::new(Limits::default());
    let g = reg.group_str(GROUPS[gi]).unwrap();
    (reg, g, Modulus::new(l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn filler_never_exceeds_source(gi in 0..GROUPS.len(), l in prop::sample::select(vec![2u32, 3]), size in 1usize..4, seed: u64) {
        let (reg, g, l) = setup(gi, l);
        let c = random_chain(g.clone(), 2, l, size, seed, 1 << 20).unwrap();
        let b = c.boundary().unwrap();
        let solver = reg.filler_solver(&GROUPS[gi].parse().unwrap(), 1, l).unwrap();
        let f = solver.norm(&b).unwrap();
        prop_assert!(f.filler_size <= c.size());
        prop_assert_eq!(f.witness.boundary().unwrap(), b.clone());
        prop_assert_eq!(f.witness.size(), f.filler_size);
        // Scaling by a unit leaves the norm alone.
        let scaled = solver.norm(&b.scale(l.get() as i64 - 1)).unwrap();
        prop_assert_eq!(scaled.filler_size, f.filler_size);
    }

    #[test]
    fn moving_by_a_boundary_keeps_the_class(gi in 0..GROUPS.len(), l in prop::sample::select(vec![2u32, 3, 5]), seed: u64) {
        let (reg, g, l) = setup(gi, l);
        let h = reg.homology(&GROUPS[gi].parse().unwrap(), 1, l).unwrap();
        let limits = Limits::default();
        for z in &h.reps {
            prop_assert!(is_cycle(z).unwrap());
            let b = random_chain(g.clone(), 2, l, 3, seed, 1 << 20).unwrap().boundary().unwrap();
            let moved = z.add(&b).unwrap();
            prop_assert!(homologous(z, &moved, &limits).unwrap());
            prop_assert_eq!(h.class_of(z).unwrap(), h.class_of(&moved).unwrap());
            prop_assert!(is_boundary(&b, &limits).unwrap().is_some());
        }
    }

    #[test]
    fn class_coordinates_are_linear(gi in 0..GROUPS.len(), l in prop::sample::select(vec![2u32, 3]), s1 in 1usize..4, s2 in 1usize..4, seed: u64) {
        let (reg, g, l) = setup(gi, l);
        let h = reg.homology(&GROUPS[gi].parse().unwrap(), 1, l).unwrap();
        let z1 = random_chain(g.clone(), 1, l, s1, seed, 1 << 20).unwrap();
        let z2 = random_chain(g.clone(), 1, l, s2, seed ^ 1, 1 << 20).unwrap();
        let a = h.class_of(&z1).unwrap();
        let b = h.class_of(&z2).unwrap();
        let sum = h.class_of(&z1.add(&z2).unwrap()).unwrap();
        let expect: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % l.get()).collect();
        prop_assert_eq!(sum, expect);
    }
}

#[test]
fn minimal_representatives_are_no_larger_than_any_cycle_in_their_class() {
    let reg = Registry::new(Limits::default());
    let l = Modulus::new(2).unwrap();
    let h = reg.homology(&"dihedral:8".parse().unwrap(), 1, l).unwrap();
    assert!(h.reps_minimal);
    let g = h.group().clone();
    for seed in 0..200 {
        let z = random_chain(g.clone(), 1, l, 1 + (seed % 3) as usize, seed, 1 << 20).unwrap();
        let coords = h.class_of(&z).unwrap();
        if coords.iter().all(|&c| c == 0) {
            continue;
        }
        for rep in &h.reps {
            if h.class_of(rep).unwrap() == coords {
                assert!(rep.size() <= z.size());
            }
        }
    }
}
