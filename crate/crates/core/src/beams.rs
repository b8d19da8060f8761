//! Fixed-width beam sets.
//!
//! Beams are numbered `1..=K` externally; beam `i` lives in bit `i - 1`.

use std::fmt;

use rand::seq::index;
use rand::Rng;

use crate::config::MAX_SIM_BEAMS;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BeamSet {
    bits: u128,
    len: u32,
}

impl BeamSet {
    pub const fn empty() -> Self {
        BeamSet { bits: 0, len: 0 }
    }

    /// All beams `1..=k`.
    pub fn full(k: u32) -> Self {
        assert!(k <= MAX_SIM_BEAMS, "beam count {k} exceeds {MAX_SIM_BEAMS}");
        let bits = if k == 128 {
            u128::MAX
        } else {
            (1u128 << k) - 1
        };
        BeamSet { bits, len: k }
    }

    pub fn singleton(beam: u32) -> Self {
        BeamSet::from_bits(bit(beam))
    }

    pub fn from_bits(bits: u128) -> Self {
        BeamSet {
            bits,
            len: bits.count_ones(),
        }
    }

    pub fn from_beams<I: IntoIterator<Item = u32>>(beams: I) -> Self {
        BeamSet::from_bits(beams.into_iter().fold(0, |acc, b| acc | bit(b)))
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, beam: u32) -> bool {
        (1..=MAX_SIM_BEAMS).contains(&beam) && self.bits & bit(beam) != 0
    }

    pub fn difference(&self, other: &BeamSet) -> BeamSet {
        BeamSet::from_bits(self.bits & !other.bits)
    }

    pub fn intersection(&self, other: &BeamSet) -> BeamSet {
        BeamSet::from_bits(self.bits & other.bits)
    }

    pub fn is_subset(&self, other: &BeamSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &BeamSet) -> bool {
        self.bits & other.bits == 0
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros();
            rest &= rest - 1;
            Some(tz + 1)
        })
    }

    /// Uniformly random `size`-subset. `size` must not exceed `self.len()`.
    pub fn random_subset<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> BeamSet {
        assert!(
            size <= self.len(),
            "subset of size {size} from {} beams",
            self.len()
        );
        if size == 0 {
            return BeamSet::empty();
        }
        if size == self.len() {
            return *self;
        }
        let members: Vec<u32> = self.iter().collect();
        BeamSet::from_beams(
            index::sample(rng, members.len(), size)
                .into_iter()
                .map(|i| members[i]),
        )
    }

    /// Every `size`-subset, in lexicographic order of member positions.
    pub fn subsets(&self, size: usize) -> Vec<BeamSet> {
        let members: Vec<u32> = self.iter().collect();
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(size);
        fn rec(
            members: &[u32],
            start: usize,
            size: usize,
            pick: &mut Vec<u32>,
            out: &mut Vec<BeamSet>,
        ) {
            if pick.len() == size {
                out.push(BeamSet::from_beams(pick.iter().copied()));
                return;
            }
            let need = size - pick.len();
            for i in start..members.len() {
                if members.len() - i < need {
                    break;
                }
                pick.push(members[i]);
                rec(members, i + 1, size, pick, out);
                pick.pop();
            }
        }
        if size <= members.len() {
            rec(&members, 0, size, &mut pick, &mut out);
        }
        out
    }

    /// Lower-case hex of the bit mask, no prefix.
    pub fn to_hex(&self) -> String {
        format!("{:x}", self.bits)
    }

    pub fn from_hex(s: &str) -> Option<BeamSet> {
        u128::from_str_radix(s, 16).ok().map(BeamSet::from_bits)
    }
}

fn bit(beam: u32) -> u128 {
    assert!(
        (1..=MAX_SIM_BEAMS).contains(&beam),
        "beam index {beam} outside 1..={MAX_SIM_BEAMS}"
    );
    1u128 << (beam - 1)
}

impl fmt::Debug for BeamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<u32> for BeamSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        BeamSet::from_beams(iter)
    }
}
