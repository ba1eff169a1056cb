//! Planar surface-code layouts.
//!
//! Both variants place data and ancilla qubits on a doubled integer grid and
//! number everything row-major:
//!
//! * **Unrotated**: a `(2d-1) x (2d-1)` grid. Data qubits sit where `r + c` is
//!   even, so rows alternate between `d` and `d-1` data qubits. X ancillas sit
//!   on even rows, Z ancillas on odd rows, and each stabiliser acts on its
//!   nearest-neighbour data qubits. For d=2 this reproduces
//!   `X = [{0,1,2},{2,3,4}]`, `Z = [{0,2,3},{1,2,4}]`.
//! * **Rotated**: a `d x d` data grid with weight-4 bulk plaquettes in a
//!   checkerboard and weight-2 boundary checks. X-type boundaries run along
//!   the top and bottom edges, Z-type boundaries along the left and right; at
//!   d=2 that gives two weight-2 X checks and one weight-4 Z check.
//!
//! In both variants `logical_z` is the top data row (left to right) and
//! `logical_x` the left data column (top to bottom).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2;

/// Largest data-qubit count representable with the `u64` bit strings used
/// throughout the exact derivation.
pub const MAX_DATA_QUBITS: usize = 64;

/// Stabiliser type assigned to the bulk plaquette whose top-left data qubit
/// is `(i, j)` in the rotated code when `i + j` is even. Flipping this swaps
/// the X/Z roles of the whole rotated lattice.
pub const ROTATED_EVEN_PLAQUETTE: Pauli = Pauli::Z;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Unrotated,
    Rotated,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unrotated" | "planar" => Ok(Self::Unrotated),
            "rotated" => Ok(Self::Rotated),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Unrotated => "unrotated",
            Self::Rotated => "rotated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

impl Pauli {
    fn flip(self) -> Self {
        match self {
            Self::X => Self::Z,
            Self::Z => Self::X,
        }
    }
}

/// Stabiliser supports and logical operators of a planar surface code.
///
/// The serialised form is the JSON interchange format read by every CLI
/// subcommand. Deserialisation re-validates the commutation structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeLayout {
    pub distance: usize,
    pub variant: Variant,
    pub n_data: usize,
    pub x_stabilizers: Vec<Vec<usize>>,
    pub z_stabilizers: Vec<Vec<usize>>,
    pub logical_z: Vec<usize>,
    pub logical_x: Vec<usize>,
}

#[derive(Deserialize)]
struct RawLayout {
    distance: usize,
    variant: Variant,
    n_data: usize,
    x_stabilizers: Vec<Vec<usize>>,
    z_stabilizers: Vec<Vec<usize>>,
    logical_z: Vec<usize>,
    logical_x: Vec<usize>,
}

impl<'de> Deserialize<'de> for CodeLayout {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLayout::deserialize(de)?;
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        let layout = CodeLayout {
            distance: raw.distance,
            variant: raw.variant,
            n_data: raw.n_data,
            x_stabilizers: raw.x_stabilizers.into_iter().map(sorted).collect(),
            z_stabilizers: raw.z_stabilizers.into_iter().map(sorted).collect(),
            logical_z: sorted(raw.logical_z),
            logical_x: sorted(raw.logical_x),
        };
        layout.validate().map_err(serde::de::Error::custom)?;
        Ok(layout)
    }
}

/// Which rows [`stabilizer_matrix`] and [`aux_index_directory`] select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Z stabilisers followed by `logical_z`.
    ZWithLogical,
    /// X stabilisers followed by `logical_x`.
    XWithLogical,
    /// X stabilisers, Z stabilisers, then `logical_z`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowLabel {
    X(usize),
    Z(usize),
    LogicalZ,
    LogicalX,
}

/// Binary rows over the data qubits, one per stabiliser plus a logical row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerMatrix {
    pub n_cols: usize,
    pub rows: Vec<u64>,
    pub row_labels: Vec<RowLabel>,
}

impl StabilizerMatrix {
    pub fn row_bits(&self, row: usize) -> Vec<u8> {
        (0..self.n_cols)
            .map(|c| ((self.rows[row] >> c) & 1) as u8)
            .collect()
    }

    /// Row printed with column 0 leftmost, e.g. `"11100"`.
    pub fn row_string(&self, row: usize) -> String {
        self.row_bits(row)
            .into_iter()
            .map(|b| if b == 1 { '1' } else { '0' })
            .collect()
    }
}

impl CodeLayout {
    pub fn new(distance: usize, variant: Variant) -> Result<Self> {
        match variant {
            Variant::Unrotated => build_unrotated_layout(distance),
            Variant::Rotated => build_rotated_layout(distance),
        }
    }

    pub fn num_x(&self) -> usize {
        self.x_stabilizers.len()
    }

    pub fn num_z(&self) -> usize {
        self.z_stabilizers.len()
    }

    pub fn num_stabilizers(&self) -> usize {
        self.num_x() + self.num_z()
    }

    pub fn x_masks(&self) -> Vec<u64> {
        self.x_stabilizers.iter().map(|s| gf2::mask_of(s)).collect()
    }

    pub fn z_masks(&self) -> Vec<u64> {
        self.z_stabilizers.iter().map(|s| gf2::mask_of(s)).collect()
    }

    pub fn logical_z_mask(&self) -> u64 {
        gf2::mask_of(&self.logical_z)
    }

    pub fn logical_x_mask(&self) -> u64 {
        gf2::mask_of(&self.logical_x)
    }

    /// Checks qubit ranges and the commutation structure of the code.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.distance == 0 {
            return Err(Error::InvalidDistance(0));
        }
        if self.n_data == 0 || self.n_data > MAX_DATA_QUBITS {
            return bad(format!("n_data {} outside 1..={MAX_DATA_QUBITS}", self.n_data));
        }
        let all = self
            .x_stabilizers
            .iter()
            .chain(&self.z_stabilizers)
            .chain([&self.logical_z, &self.logical_x]);
        for support in all {
            if support.iter().any(|&q| q >= self.n_data) {
                return bad(format!("support {support:?} exceeds n_data {}", self.n_data));
            }
        }
        if self.num_stabilizers() + 1 != self.n_data {
            return bad(format!(
                "{} stabilisers for {} data qubits",
                self.num_stabilizers(),
                self.n_data
            ));
        }
        let xs = self.x_masks();
        let zs = self.z_masks();
        let lz = self.logical_z_mask();
        let lx = self.logical_x_mask();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &z) in zs.iter().enumerate() {
                if gf2::parity(x & z) {
                    return bad(format!("X stabiliser {i} anticommutes with Z stabiliser {j}"));
                }
            }
            if gf2::parity(x & lz) {
                return bad(format!("logical Z anticommutes with X stabiliser {i}"));
            }
        }
        for (j, &z) in zs.iter().enumerate() {
            if gf2::parity(z & lx) {
                return bad(format!("logical X anticommutes with Z stabiliser {j}"));
            }
        }
        if !gf2::parity(lz & lx) {
            return bad("logical X and Z commute".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("layout serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Unrotated planar code with `d^2 + (d-1)^2` data qubits.
pub fn build_unrotated_layout(d: usize) -> Result<CodeLayout> {
    if d == 0 {
        return Err(Error::InvalidDistance(d));
    }
    let side = 2 * d - 1;
    let n_data = d * d + (d - 1) * (d - 1);
    if n_data > MAX_DATA_QUBITS {
        return Err(Error::TooLarge {
            what: "data qubit count",
            size: n_data,
            limit: MAX_DATA_QUBITS,
        });
    }
    let data_index = |r: usize, c: usize| -> usize {
        // rows before r hold alternately d and d-1 data qubits
        let before = (r / 2) * (2 * d - 1) + (r % 2) * d;
        before + c / 2
    };
    let neighbours = |r: usize, c: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(4);
        let (r, c) = (r as isize, c as isize);
        for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (nr, nc) = (r + dr, c + dc);
            if nr >= 0 && nc >= 0 && (nr as usize) < side && (nc as usize) < side {
                out.push(data_index(nr as usize, nc as usize));
            }
        }
        out.sort_unstable();
        out
    };
    let mut x_stabilizers = Vec::new();
    let mut z_stabilizers = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if (r + c) % 2 == 0 {
                continue;
            }
            if r % 2 == 0 {
                x_stabilizers.push(neighbours(r, c));
            } else {
                z_stabilizers.push(neighbours(r, c));
            }
        }
    }
    let logical_z = (0..d).collect();
    let logical_x = (0..d).map(|k| data_index(2 * k, 0)).collect();
    let layout = CodeLayout {
        distance: d,
        variant: Variant::Unrotated,
        n_data,
        x_stabilizers,
        z_stabilizers,
        logical_z,
        logical_x,
    };
    debug_assert!(layout.validate().is_ok());
    Ok(layout)
}

/// Rotated planar code with `d^2` data qubits.
pub fn build_rotated_layout(d: usize) -> Result<CodeLayout> {
    if d == 0 {
        return Err(Error::InvalidDistance(d));
    }
    let n_data = d * d;
    if n_data > MAX_DATA_QUBITS {
        return Err(Error::TooLarge {
            what: "data qubit count",
            size: n_data,
            limit: MAX_DATA_QUBITS,
        });
    }
    let q = |i: usize, j: usize| i * d + j;
    let bulk_type = |i: usize, j: usize| {
        if (i + j).is_multiple_of(2) {
            ROTATED_EVEN_PLAQUETTE
        } else {
            ROTATED_EVEN_PLAQUETTE.flip()
        }
    };
    let mut x_stabilizers = Vec::new();
    let mut z_stabilizers = Vec::new();
    let mut push = |kind: Pauli, mut support: Vec<usize>| {
        support.sort_unstable();
        match kind {
            Pauli::X => x_stabilizers.push(support),
            Pauli::Z => z_stabilizers.push(support),
        }
    };
    // Plaquette centres at half-integer offsets (i - 1/2, j - 1/2) for
    // i, j in 0..=d, visited row-major so stabilisers are ordered by position.
    for i in 0..=d {
        for j in 0..=d {
            let top = i == 0;
            let bottom = i == d;
            let left = j == 0;
            let right = j == d;
            if (top || bottom) && (left || right) {
                continue;
            }
            if top || bottom {
                // horizontal boundary check on data row 0 or d-1, columns j-1, j
                let row = if top { 0 } else { d - 1 };
                let inner = if top { 0 } else { d - 2 };
                if d >= 2 && bulk_type(inner, j - 1) == Pauli::Z {
                    push(Pauli::X, vec![q(row, j - 1), q(row, j)]);
                }
            } else if left || right {
                let col = if left { 0 } else { d - 1 };
                let inner = if left { 0 } else { d - 2 };
                if d >= 2 && bulk_type(i - 1, inner) == Pauli::X {
                    push(Pauli::Z, vec![q(i - 1, col), q(i, col)]);
                }
            } else {
                let support = vec![q(i - 1, j - 1), q(i - 1, j), q(i, j - 1), q(i, j)];
                push(bulk_type(i - 1, j - 1), support);
            }
        }
    }
    let layout = CodeLayout {
        distance: d,
        variant: Variant::Rotated,
        n_data,
        x_stabilizers,
        z_stabilizers,
        logical_z: (0..d).map(|j| q(0, j)).collect(),
        logical_x: (0..d).map(|i| q(i, 0)).collect(),
    };
    debug_assert!(layout.validate().is_ok(), "{:?}", layout.validate());
    Ok(layout)
}

/// Binary stabiliser rows in layout order, followed by the sector's logical row.
pub fn stabilizer_matrix(layout: &CodeLayout, sector: Sector) -> StabilizerMatrix {
    let mut rows = Vec::new();
    let mut row_labels = Vec::new();
    let xs = || {
        layout
            .x_masks()
            .into_iter()
            .enumerate()
            .map(|(i, m)| (m, RowLabel::X(i)))
    };
    let zs = || {
        layout
            .z_masks()
            .into_iter()
            .enumerate()
            .map(|(i, m)| (m, RowLabel::Z(i)))
    };
    let body: Vec<(u64, RowLabel)> = match sector {
        Sector::ZWithLogical => zs()
            .chain([(layout.logical_z_mask(), RowLabel::LogicalZ)])
            .collect(),
        Sector::XWithLogical => xs()
            .chain([(layout.logical_x_mask(), RowLabel::LogicalX)])
            .collect(),
        Sector::Full => xs()
            .chain(zs())
            .chain([(layout.logical_z_mask(), RowLabel::LogicalZ)])
            .collect(),
    };
    for (row, label) in body {
        rows.push(row);
        row_labels.push(label);
    }
    StabilizerMatrix {
        n_cols: layout.n_data,
        rows,
        row_labels,
    }
}

/// Per-stabiliser list of the data qubits it touches, ascending.
///
/// `Full` lists X stabilisers then Z stabilisers; logical rows are never
/// included.
pub fn aux_index_directory(layout: &CodeLayout, sector: Sector) -> Vec<Vec<usize>> {
    match sector {
        Sector::ZWithLogical => layout.z_stabilizers.clone(),
        Sector::XWithLogical => layout.x_stabilizers.clone(),
        Sector::Full => layout
            .x_stabilizers
            .iter()
            .chain(&layout.z_stabilizers)
            .cloned()
            .collect(),
    }
}
