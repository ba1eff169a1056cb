use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::layout::CodeLayout;

/// First-round stabiliser outcomes, one bit per stabiliser (1 = eigenvalue -1).
///
/// Bit `i` of `x` is the outcome of X stabiliser `i` in layout order. Printed
/// strings put stabiliser 0 first, so `"01"` means the second stabiliser fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Trajectory {
    x: u64,
    z: u64,
    nx: u8,
    nz: u8,
}

impl Trajectory {
    pub fn new(x: u64, nx: usize, z: u64, nz: usize) -> Self {
        assert!(nx <= 64 && nz <= 64);
        let keep = |v: u64, n: usize| if n == 64 { v } else { v & ((1u64 << n) - 1) };
        Self {
            x: keep(x, nx),
            z: keep(z, nz),
            nx: nx as u8,
            nz: nz as u8,
        }
    }

    /// All-zero outcomes for `layout`.
    pub fn trivial(layout: &CodeLayout) -> Self {
        Self::new(0, layout.num_x(), 0, layout.num_z())
    }

    /// Trivial X sector with the given Z outcomes.
    pub fn with_z(layout: &CodeLayout, z: u64) -> Self {
        Self::new(0, layout.num_x(), z, layout.num_z())
    }

    pub fn from_bit_strings(x_bits: &str, z_bits: &str) -> Result<Self> {
        let nx = x_bits.len();
        let nz = z_bits.len();
        if nx > 64 || nz > 64 {
            return Err(Error::TrajectoryParse(format!("{x_bits} {z_bits}")));
        }
        Ok(Self::new(parse_bits(x_bits)?, nx, parse_bits(z_bits)?, nz))
    }

    /// Parses `"x=10 z=01"` (comma or whitespace separated) or, given the
    /// layout, a bare concatenation `"1001"` of X then Z bits.
    pub fn parse_for(layout: &CodeLayout, text: &str) -> Result<Self> {
        let text = text.trim();
        let traj = if text.contains('=') {
            let mut xs = None;
            let mut zs = None;
            for part in text.split(|c: char| c == ',' || c.is_whitespace()) {
                if part.is_empty() {
                    continue;
                }
                match part.split_once('=') {
                    Some(("x", v)) => xs = Some(v),
                    Some(("z", v)) => zs = Some(v),
                    _ => return Err(Error::TrajectoryParse(text.into())),
                }
            }
            Self::from_bit_strings(xs.unwrap_or(""), zs.unwrap_or(""))?
        } else {
            if text.len() != layout.num_stabilizers() {
                return Err(Error::TrajectoryParse(text.into()));
            }
            let (x, z) = text.split_at(layout.num_x());
            Self::from_bit_strings(x, z)?
        };
        traj.check(layout)?;
        Ok(traj)
    }

    pub fn check(&self, layout: &CodeLayout) -> Result<()> {
        if self.nx() != layout.num_x() || self.nz() != layout.num_z() {
            return Err(Error::TrajectoryLength {
                got_x: self.nx(),
                got_z: self.nz(),
                want_x: layout.num_x(),
                want_z: layout.num_z(),
            });
        }
        Ok(())
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn nx(&self) -> usize {
        self.nx as usize
    }

    pub fn nz(&self) -> usize {
        self.nz as usize
    }

    pub fn x_bit(&self, i: usize) -> bool {
        (self.x >> i) & 1 == 1
    }

    pub fn z_bit(&self, i: usize) -> bool {
        (self.z >> i) & 1 == 1
    }

    pub fn is_trivial_x(&self) -> bool {
        self.x == 0
    }

    pub fn x_string(&self) -> String {
        bits_to_string(self.x, self.nx())
    }

    pub fn z_string(&self) -> String {
        bits_to_string(self.z, self.nz())
    }

    /// Every trajectory of `layout`, X-major, each sector counting upward
    /// in printed-string order.
    pub fn all(layout: &CodeLayout) -> impl Iterator<Item = Trajectory> + '_ {
        let nx = layout.num_x();
        let nz = layout.num_z();
        (0..1u64 << nx).flat_map(move |xi| {
            (0..1u64 << nz).map(move |zi| {
                Trajectory::new(reverse_bits(xi, nx), nx, reverse_bits(zi, nz), nz)
            })
        })
    }

    /// Trivial-X trajectories of `layout` in printed-string order of the Z bits.
    pub fn all_trivial_x(layout: &CodeLayout) -> impl Iterator<Item = Trajectory> + '_ {
        let nz = layout.num_z();
        (0..1u64 << nz).map(move |zi| Trajectory::with_z(layout, reverse_bits(zi, nz)))
    }
}

/// Counts so that `printed_rank(bits_to_string(v)) == i` for the i-th string.
fn reverse_bits(v: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - n)
    }
}

fn parse_bits(s: &str) -> Result<u64> {
    s.bytes().enumerate().try_fold(0u64, |acc, (i, b)| match b {
        b'0' => Ok(acc),
        b'1' => Ok(acc | 1 << i),
        _ => Err(Error::TrajectoryParse(s.into())),
    })
}

/// Prints bit 0 first.
pub fn bits_to_string(v: u64, n: usize) -> String {
    (0..n)
        .map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} z={}", self.x_string(), self.z_string())
    }
}

impl Ord for Trajectory {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.x_string(), self.z_string()).cmp(&(other.x_string(), other.z_string()))
    }
}

impl PartialOrd for Trajectory {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRepr {
    x_bits: String,
    z_bits: String,
}

impl Serialize for Trajectory {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TrajectoryRepr {
            x_bits: self.x_string(),
            z_bits: self.z_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trajectory {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TrajectoryRepr::deserialize(d)?;
        Trajectory::from_bit_strings(&r.x_bits, &r.z_bits).map_err(serde::de::Error::custom)
    }
}
