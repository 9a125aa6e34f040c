//! Linguistic attribute sets.
//!
//! Number, animacy, person and gender are tracked as *sets* of possible
//! values rather than single values: an unknown attribute is the empty set,
//! an ambiguous one holds several values, and merging two coreferent
//! mentions unions their sets. Two attribute sets are compatible when they
//! intersect or when either side is unknown.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::marker::PhantomData;

/// A value that can live inside a [`ValueSet`]. Implementors enumerate all
/// variants in a fixed order; the position in `ALL` is the bit index.
pub trait LatticeValue: Copy + Eq + fmt::Debug + 'static {
    const ALL: &'static [Self];

    fn bit(self) -> u8 {
        let idx = Self::ALL
            .iter()
            .position(|v| *v == self)
            .expect("value listed in ALL");
        1u8 << idx
    }
}

macro_rules! lattice_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl LatticeValue for $name {
            const ALL: &'static [Self] = &[$(Self::$variant),+];
        }
    };
}

lattice_enum!(
    /// Grammatical number.
    NumberValue { Singular, Plural }
);
lattice_enum!(
    /// Animacy of the referent.
    AnimacyValue { Animate, Inanimate }
);
lattice_enum!(
    /// Grammatical person.
    PersonValue { First, Second, Third }
);
lattice_enum!(
    /// Gender, populated only from the name gazetteer.
    GenderValue { Feminine, Masculine, Neuter }
);

/// A small set of attribute values, stored as a bitmask.
///
/// The empty set means "unknown". `bits()` is stable across runs and is used
/// directly as a categorical feature code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValueSet<V: LatticeValue> {
    bits: u8,
    #[serde(skip)]
    _values: PhantomData<V>,
}

impl<V: LatticeValue> Default for ValueSet<V> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<V: LatticeValue> ValueSet<V> {
    pub const fn empty() -> Self {
        Self {
            bits: 0,
            _values: PhantomData,
        }
    }

    pub fn of(value: V) -> Self {
        Self {
            bits: value.bit(),
            _values: PhantomData,
        }
    }

    pub fn from_values<I: IntoIterator<Item = V>>(values: I) -> Self {
        let mut s = Self::empty();
        for v in values {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, value: V) {
        self.bits |= value.bit();
    }

    /// Set union; the merge operation of the attribute lattice.
    #[must_use]
    pub fn union(self, other: Self) -> Self {
        Self {
            bits: self.bits | other.bits,
            _values: PhantomData,
        }
    }

    pub fn contains(self, value: V) -> bool {
        self.bits & value.bit() != 0
    }

    pub fn intersects(self, other: Self) -> bool {
        self.bits & other.bits != 0
    }

    /// Unknown (no evidence recorded).
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Raw bitmask, used as a categorical feature code.
    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn iter(self) -> impl Iterator<Item = V> {
        V::ALL.iter().copied().filter(move |v| self.contains(*v))
    }

    /// Compatibility in the sieve sense: either side unknown, or a shared value.
    pub fn compatible(self, other: Self) -> bool {
        self.is_empty() || other.is_empty() || self.intersects(other)
    }
}

impl<V: LatticeValue> fmt::Debug for ValueSet<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The four attribute sets tracked per mention and per entity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeLattice {
    pub number: ValueSet<NumberValue>,
    pub animacy: ValueSet<AnimacyValue>,
    pub person: ValueSet<PersonValue>,
    pub gender: ValueSet<GenderValue>,
}

impl AttributeLattice {
    /// Component-wise union; applied when two entities merge.
    #[must_use]
    pub fn union(self, other: Self) -> Self {
        Self {
            number: self.number.union(other.number),
            animacy: self.animacy.union(other.animacy),
            person: self.person.union(other.person),
            gender: self.gender.union(other.gender),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_is_unknown_and_compatible_with_anything() {
        let unknown: ValueSet<NumberValue> = ValueSet::empty();
        let plural = ValueSet::of(NumberValue::Plural);
        assert!(unknown.is_empty());
        assert!(unknown.compatible(plural));
        assert!(plural.compatible(unknown));
    }

    #[test]
    fn disjoint_nonempty_sets_are_incompatible() {
        let sg = ValueSet::of(NumberValue::Singular);
        let pl = ValueSet::of(NumberValue::Plural);
        assert!(!sg.compatible(pl));
        assert!(sg.compatible(sg.union(pl)));
    }

    #[test]
    fn union_collects_both_sides() {
        // A collective ("group of students", singular head) merged with a
        // plural mention ("five students") leaves the entity ambiguous.
        let collective = ValueSet::of(NumberValue::Singular);
        let plural = ValueSet::of(NumberValue::Plural);
        let merged = collective.union(plural);
        assert!(merged.contains(NumberValue::Singular));
        assert!(merged.contains(NumberValue::Plural));
        assert_eq!(merged.len(), 2);
    }

    #[test]
    fn bits_are_stable_codes() {
        assert_eq!(ValueSet::<PersonValue>::empty().bits(), 0);
        assert_eq!(ValueSet::of(PersonValue::First).bits(), 1);
        assert_eq!(ValueSet::of(PersonValue::Second).bits(), 2);
        assert_eq!(ValueSet::of(PersonValue::Third).bits(), 4);
        let all = ValueSet::from_values([
            PersonValue::First,
            PersonValue::Second,
            PersonValue::Third,
        ]);
        assert_eq!(all.bits(), 7);
    }

    #[test]
    fn lattice_union_is_componentwise() {
        let a = AttributeLattice {
            number: ValueSet::of(NumberValue::Singular),
            animacy: ValueSet::of(AnimacyValue::Animate),
            ..Default::default()
        };
        let b = AttributeLattice {
            number: ValueSet::of(NumberValue::Plural),
            person: ValueSet::of(PersonValue::Third),
            ..Default::default()
        };
        let u = a.union(b);
        assert_eq!(u.number.len(), 2);
        assert!(u.animacy.contains(AnimacyValue::Animate));
        assert!(u.person.contains(PersonValue::Third));
        assert!(u.gender.is_empty());
    }
}
