//! Bit-packed linear algebra over GF(2).
//!
//! Rows are qubit-support masks (bit `i` set when qubit `i` is in the
//! support). Supports with up to 64 qubits fit a `u64`; symplectic rows
//! (X part, Z part) are packed into a `u128`.

/// Parity of the set bits of `word`.
#[inline]
pub fn parity(word: u64) -> bool {
    word.count_ones() & 1 == 1
}

/// Mask with bit `i` set for each index in `support`.
pub fn mask_of(support: &[usize]) -> u64 {
    support.iter().fold(0u64, |m, &q| {
        debug_assert!(q < 64);
        m | (1u64 << q)
    })
}

/// Ascending indices of the set bits of `mask`.
pub fn indices_of(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let q = m.trailing_zeros() as usize;
        out.push(q);
        m &= m - 1;
    }
    out
}

/// Rank of a set of rows.
pub fn rank<T>(rows: &[T]) -> usize
where
    T: Copy + Into<u128>,
{
    let mut basis: Vec<u128> = Vec::new();
    for &row in rows {
        let mut r: u128 = row.into();
        for &b in &basis {
            // basis is kept with distinct leading bits, highest first
            let lead = 127 - b.leading_zeros();
            if (r >> lead) & 1 == 1 {
                r ^= b;
            }
        }
        if r != 0 {
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Expresses targets as XOR combinations of a fixed generator list.
///
/// `decompose` returns a mask over generator indices (bit `g` set when
/// generator `g` is used), so at most 64 generators are supported.
#[derive(Debug, Clone)]
pub struct Decomposer {
    /// (pivot bit, reduced row, generator combination producing the row)
    pivots: Vec<(u32, u64, u64)>,
}

impl Decomposer {
    pub fn new(generators: &[u64]) -> Self {
        assert!(generators.len() <= 64, "at most 64 generators");
        let mut pivots: Vec<(u32, u64, u64)> = Vec::new();
        for (g, &gen) in generators.iter().enumerate() {
            let mut row = gen;
            let mut combo = 1u64 << g;
            for &(bit, prow, pcombo) in &pivots {
                if (row >> bit) & 1 == 1 {
                    row ^= prow;
                    combo ^= pcombo;
                }
            }
            if row == 0 {
                continue;
            }
            let bit = row.trailing_zeros();
            // keep previous pivots fully reduced against the new one
            for p in pivots.iter_mut() {
                if (p.1 >> bit) & 1 == 1 {
                    p.1 ^= row;
                    p.2 ^= combo;
                }
            }
            pivots.push((bit, row, combo));
        }
        Self { pivots }
    }

    /// Number of independent generators.
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Generator mask whose XOR equals `target`, if one exists.
    pub fn decompose(&self, target: u64) -> Option<u64> {
        let mut row = target;
        let mut combo = 0u64;
        for &(bit, prow, pcombo) in &self.pivots {
            if (row >> bit) & 1 == 1 {
                row ^= prow;
                combo ^= pcombo;
            }
        }
        (row == 0).then_some(combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_of_eq_m_rows() {
        // the binary d=2 matrix mixes X and Z rows and is rank deficient
        let rows: Vec<u64> = ["11100", "00111", "10110", "01101", "11000"]
            .iter()
            .map(|s| {
                s.bytes()
                    .enumerate()
                    .fold(0, |m, (i, b)| m | (((b - b'0') as u64) << i))
            })
            .collect();
        assert_eq!(rank(&rows), 4);
        assert_eq!(rank(&rows[2..]), 3);
    }

    #[test]
    fn decompose_reports_unreachable() {
        let d = Decomposer::new(&[0b011, 0b110]);
        assert_eq!(d.decompose(0b101), Some(0b11));
        assert_eq!(d.decompose(0b001), None);
        assert_eq!(d.decompose(0), Some(0));
    }

    proptest! {
        #[test]
        fn decomposition_reconstructs_target(gens in proptest::collection::vec(any::<u64>(), 1..20), pick in any::<u64>()) {
            let pick = pick & ((1u64 << gens.len()) - 1);
            let target = indices_of(pick).iter().fold(0u64, |acc, &g| acc ^ gens[g]);
            let dec = Decomposer::new(&gens);
            let combo = dec.decompose(target).expect("target is in the span");
            let rebuilt = indices_of(combo).iter().fold(0u64, |acc, &g| acc ^ gens[g]);
            prop_assert_eq!(rebuilt, target);
            prop_assert_eq!(dec.rank(), rank(&gens));
        }
    }
}
