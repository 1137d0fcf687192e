//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use qsr_core::calculi::{derive_size_pa, load_rcc8};
use qsr_core::pc_oracle::{seeded_instances, BinaryNetwork};
use qsr_core::scenarios::link_topo_size;
use qsr_core::{AspectDecl, Scenario};

/// The five-region topology and size scenario that propagation refutes.
pub fn five_regions() -> Scenario {
    let mut s = Scenario::new(["0", "1", "2", "3", "4"]).unwrap();
    s.add_aspect(AspectDecl::binary("topo", Arc::new(load_rcc8()))).unwrap();
    s.add_aspect(AspectDecl::binary("size", Arc::new(derive_size_pa()))).unwrap();
    s.restrict("topo", &["0", "2"], &["TPP", "EQ"]).unwrap();
    s.restrict("topo", &["1", "0"], &["TPP", "EQ", "PO"]).unwrap();
    s.restrict("topo", &["1", "2"], &["TPP", "EQ"]).unwrap();
    s.restrict("topo", &["4", "3"], &["TPP", "EQ"]).unwrap();
    s.restrict("size", &["0", "2"], &["<"]).unwrap();
    s.restrict("size", &["3", "1"], &["<", "="]).unwrap();
    s.restrict("size", &["2", "4"], &["<", "="]).unwrap();
    s.link(Arc::new(link_topo_size()), &["topo", "size"]).unwrap();
    s
}

/// `n` unrestricted regions under RCC-8.
pub fn free_regions(n: usize) -> Scenario {
    let mut s = Scenario::new((0..n).map(|i| format!("r{i}"))).unwrap();
    s.add_aspect(AspectDecl::binary("topo", Arc::new(load_rcc8()))).unwrap();
    s
}

/// Random RCC-8 networks of exactly `n` objects.
pub fn random_networks(count: usize, n: usize, seed: u64) -> Vec<BinaryNetwork> {
    seeded_instances(Arc::new(load_rcc8()), count * 8, n, seed)
        .into_iter()
        .filter(|net| net.len() == n)
        .take(count)
        .collect()
}
