use std::fmt;

use crate::bitset::{ValueSet, MAX_UNIVERSE};

/// Domain of a relation variable: a subset of `0..universe_size`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteDomain {
    bits: ValueSet,
    universe: u16,
}

impl FiniteDomain {
    pub fn full(universe: usize) -> Self {
        Self::new(universe, ValueSet::full(universe))
    }

    pub fn empty(universe: usize) -> Self {
        Self::new(universe, ValueSet::EMPTY)
    }

    pub fn singleton(universe: usize, value: usize) -> Self {
        Self::new(universe, ValueSet::singleton(value))
    }

    pub fn from_values(universe: usize, values: impl IntoIterator<Item = usize>) -> Self {
        Self::new(universe, values.into_iter().collect())
    }

    /// Panics if `bits` has elements outside `0..universe`.
    pub fn new(universe: usize, bits: ValueSet) -> Self {
        assert!(universe <= MAX_UNIVERSE, "universe of {universe} values is too large");
        assert!(
            bits.is_subset(&ValueSet::full(universe)),
            "domain values exceed universe of {universe}"
        );
        FiniteDomain {
            bits,
            universe: universe as u16,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.universe as usize
    }

    pub fn bits(&self) -> &ValueSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    /// The assigned value when the domain is a singleton.
    pub fn value(&self) -> Option<usize> {
        self.bits.single()
    }

    pub fn is_bound(&self) -> bool {
        self.len() == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.remove(v);
    }

    /// Intersects in place; returns whether anything was removed.
    pub fn intersect_with(&mut self, other: &ValueSet) -> bool {
        let next = self.bits.intersection(other);
        let changed = next != self.bits;
        self.bits = next;
        changed
    }
}

impl fmt::Debug for FiniteDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.bits, self.universe)
    }
}

/// Largest universe for set-valued variables.
pub const MAX_SET_UNIVERSE: usize = 16;

/// Subset-bounds domain of a set variable: `lower ⊆ value ⊆ upper`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SetDomain {
    lower: u16,
    upper: u16,
    universe: u8,
}

impl SetDomain {
    /// Unconstrained set variable over `0..universe`.
    pub fn new(universe: usize) -> Self {
        assert!(universe <= MAX_SET_UNIVERSE);
        let upper = if universe == 16 {
            u16::MAX
        } else {
            (1u16 << universe) - 1
        };
        SetDomain {
            lower: 0,
            upper,
            universe: universe as u8,
        }
    }

    pub fn with_bounds(universe: usize, lower: u16, upper: u16) -> Self {
        let mut d = Self::new(universe);
        d.lower = lower;
        d.upper &= upper;
        d
    }

    pub fn universe_size(&self) -> usize {
        self.universe as usize
    }

    pub fn lower(&self) -> u16 {
        self.lower
    }

    pub fn upper(&self) -> u16 {
        self.upper
    }

    /// `lower ⊆ upper`, i.e. some set value remains.
    pub fn is_consistent(&self) -> bool {
        self.lower & !self.upper == 0
    }

    pub fn is_bound(&self) -> bool {
        self.lower == self.upper
    }

    pub fn admits(&self, set: u16) -> bool {
        self.lower & !set == 0 && set & !self.upper == 0
    }

    pub(crate) fn tighten(&mut self, lower: u16, upper: u16) -> bool {
        let nl = self.lower | lower;
        let nu = self.upper & upper;
        let changed = nl != self.lower || nu != self.upper;
        self.lower = nl;
        self.upper = nu;
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_domain_is_bound() {
        let d = FiniteDomain::singleton(8, 3);
        assert!(d.is_bound());
        assert_eq!(d.value(), Some(3));
    }

    #[test]
    #[should_panic]
    fn values_outside_universe_are_rejected() {
        FiniteDomain::from_values(3, [3]);
    }

    #[test]
    fn set_domain_bounds() {
        let mut d = SetDomain::new(9);
        assert_eq!(d.upper(), 0x1ff);
        assert!(!d.is_bound());
        d.tighten(0b1, 0b1);
        assert!(d.is_bound());
        assert!(d.admits(0b1));
        d.tighten(0b10, u16::MAX);
        assert!(!d.is_consistent());
        assert_eq!(SetDomain::new(16).upper(), u16::MAX);
    }
}
