use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;

/// One of the three colors, stored as 0, 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Color(u8);

impl Color {
    pub const ALL: [Color; 3] = [Color(0), Color(1), Color(2)];

    pub fn new(value: u8) -> Option<Self> {
        (value < 3).then_some(Color(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// The color different from both `a` and `b`, which must differ.
    pub fn third(a: Color, b: Color) -> Color {
        debug_assert_ne!(a, b);
        Color(3 - a.0 - b.0)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Subset of the three colors as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ColorSet(u8);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);
    pub const FULL: ColorSet = ColorSet(0b111);

    pub fn single(c: Color) -> Self {
        ColorSet(1 << c.0)
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 & (1 << c.0) != 0
    }

    pub fn insert(&mut self, c: Color) {
        self.0 |= 1 << c.0;
    }

    pub fn remove(&mut self, c: Color) {
        self.0 &= !(1 << c.0);
    }

    pub fn without(self, c: Color) -> Self {
        ColorSet(self.0 & !(1 << c.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        Color::ALL.into_iter().filter(move |&c| self.contains(c))
    }

    pub fn first(self) -> Option<Color> {
        self.iter().next()
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.0)).finish()
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        let mut s = ColorSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

/// Vertex → color map. Ordered so that outputs are reproducible.
pub type Coloring = BTreeMap<VertexId, Color>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_color() {
        for a in Color::ALL {
            for b in Color::ALL {
                if a != b {
                    let c = Color::third(a, b);
                    assert!(c != a && c != b);
                }
            }
        }
    }

    #[test]
    fn set_ops() {
        let mut s = ColorSet::FULL;
        s.remove(Color::ALL[1]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Color::ALL[0], Color::ALL[2]]);
        assert!(ColorSet::single(Color::ALL[2]).contains(Color::ALL[2]));
        assert!(Color::new(3).is_none());
    }
}
