//! Trajectory whitelists for post-selecting noisy injections.
//!
//! Trajectories are ranked by mean fidelity on a training run and admitted
//! greedily until their cumulative frequency reaches the acceptance budget.
//! The table is then applied to shots from an independent run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise_sim::{CompensatedSum, ShotRecord, TrajectoryStats};
use crate::trajectory::Trajectory;

/// Slack on the budget comparison so that decimal frequencies such as
/// `0.01 + 0.10 + 0.09` reach `0.20`.
pub const BUDGET_EPS: f64 = 1e-9;
/// Allowed deviation of the input frequencies from summing to one.
pub const FREQUENCY_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookupEntry {
    pub trajectory: Trajectory,
    pub mean_fidelity: f64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookupTable {
    pub budget: f64,
    /// Admitted trajectories, best first.
    pub whitelist: Vec<Trajectory>,
    /// Every input trajectory, best first.
    pub entries: Vec<LookupEntry>,
}

impl LookupTable {
    pub fn accepts(&self, t: &Trajectory) -> bool {
        self.whitelist.contains(t)
    }

    pub fn whitelist_frequency(&self) -> f64 {
        self.entries[..self.whitelist.len()].iter().map(|e| e.frequency).sum()
    }
}

/// Ranks by mean fidelity (descending), then frequency (descending), then
/// trajectory, and whitelists the shortest prefix whose cumulative frequency
/// reaches `budget`.
pub fn build_lookup(stats: &[TrajectoryStats], budget: f64) -> Result<LookupTable> {
    if stats.is_empty() {
        return Err(Error::EmptyStats);
    }
    if !(budget > 0.0 && budget <= 1.0) {
        return Err(Error::InvalidParameter(format!("budget {budget} outside (0, 1]")));
    }
    let total: f64 = stats.iter().map(|s| s.frequency).sum();
    if (total - 1.0).abs() > FREQUENCY_SUM_TOL {
        return Err(Error::InvalidParameter(format!("frequencies sum to {total}, not 1")));
    }
    let mut entries: Vec<LookupEntry> = stats
        .iter()
        .map(|s| LookupEntry {
            trajectory: s.trajectory,
            mean_fidelity: s.mean_fidelity,
            frequency: s.frequency,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.mean_fidelity
            .total_cmp(&a.mean_fidelity)
            .then(b.frequency.total_cmp(&a.frequency))
            .then(a.trajectory.cmp(&b.trajectory))
    });
    let mut cumulative = 0.0;
    let mut whitelist = Vec::new();
    for e in &entries {
        whitelist.push(e.trajectory);
        cumulative += e.frequency;
        if cumulative >= budget - BUDGET_EPS {
            break;
        }
    }
    Ok(LookupTable {
        budget,
        whitelist,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostSelection {
    /// Whitelisted stable shots over all stable shots.
    pub accepted_fraction: f64,
    pub logical_error_rate: f64,
    pub mean_fidelity: f64,
    pub accepted: u64,
    pub stable: u64,
}

/// Aggregates over stable, whitelisted shots.
pub fn apply_postselection(records: &[ShotRecord], table: &LookupTable) -> PostSelection {
    let mut fid = CompensatedSum::default();
    let mut accepted = 0u64;
    let mut errors = 0u64;
    let mut stable = 0u64;
    for r in records.iter().filter(|r| r.stable) {
        stable += 1;
        if table.accepts(&r.trajectory) {
            accepted += 1;
            errors += u64::from(r.logical_error);
            fid.add(r.fidelity);
        }
    }
    summary(accepted, stable, errors, fid)
}

/// Same as [`apply_postselection`] but from per-trajectory aggregates.
pub fn apply_to_stats(stats: &[TrajectoryStats], table: &LookupTable) -> PostSelection {
    let mut fid = CompensatedSum::default();
    let mut accepted = 0u64;
    let mut errors = 0u64;
    let mut stable = 0u64;
    for s in stats {
        stable += s.count;
        if table.accepts(&s.trajectory) {
            accepted += s.count;
            errors += s.logical_errors;
            fid.add(s.mean_fidelity * s.count as f64);
        }
    }
    summary(accepted, stable, errors, fid)
}

fn summary(accepted: u64, stable: u64, errors: u64, fid: CompensatedSum) -> PostSelection {
    let ratio = |a: f64, b: u64| if b == 0 { 0.0 } else { a / b as f64 };
    PostSelection {
        accepted_fraction: ratio(accepted as f64, stable),
        logical_error_rate: ratio(errors as f64, accepted),
        mean_fidelity: ratio(fid.value(), accepted),
        accepted,
        stable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(bits: &str) -> Trajectory {
        Trajectory::from_bit_strings(&bits[..2], &bits[2..]).unwrap()
    }

    fn stat(bits: &str, fid: f64, freq: f64) -> TrajectoryStats {
        TrajectoryStats {
            trajectory: t(bits),
            count: (freq * 100.0).round() as u64,
            mean_fidelity: fid,
            logical_errors: 0,
            frequency: freq,
        }
    }

    fn ranked_stats() -> Vec<TrajectoryStats> {
        [
            ("011", 99.99, 0.01),
            ("000", 99.89, 0.10),
            ("101", 98.58, 0.09),
            ("001", 98.01, 0.20),
            ("100", 97.84, 0.31),
            ("010", 95.43, 0.20),
            ("110", 95.21, 0.05),
            ("111", 94.99, 0.04),
        ]
        .iter()
        .map(|&(b, f, q)| stat(b, f / 100.0, q))
        .collect()
    }

    #[test]
    fn eight_trajectory_walkthrough() {
        let table = build_lookup(&ranked_stats(), 0.20).unwrap();
        assert_eq!(table.whitelist, vec![t("011"), t("000"), t("101")]);
        assert!((table.whitelist_frequency() - 0.20).abs() < 1e-12);
        assert_eq!(table.entries.len(), 8);
    }

    #[test]
    fn full_budget_takes_everything() {
        let table = build_lookup(&ranked_stats(), 1.0).unwrap();
        assert_eq!(table.whitelist.len(), 8);
    }

    #[test]
    fn ties_prefer_frequency_then_trajectory() {
        let stats = vec![stat("000", 0.9, 0.2), stat("001", 0.9, 0.5), stat("010", 0.9, 0.3)];
        let table = build_lookup(&stats, 0.1).unwrap();
        assert_eq!(table.whitelist, vec![t("001")]);
        let stats = vec![stat("010", 0.9, 0.5), stat("001", 0.9, 0.5)];
        let table = build_lookup(&stats, 0.1).unwrap();
        assert_eq!(table.whitelist, vec![t("001")]);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(build_lookup(&[], 0.2), Err(Error::EmptyStats)));
        assert!(build_lookup(&ranked_stats(), 0.0).is_err());
        assert!(build_lookup(&ranked_stats(), 1.5).is_err());
        assert!(build_lookup(&[stat("000", 0.9, 0.5)], 0.2).is_err());
    }

    fn record(shot: u64, bits: &str, fidelity: f64, stable: bool) -> ShotRecord {
        ShotRecord {
            shot,
            trajectory: t(bits),
            syndrome_history: vec![t(bits)],
            stable,
            fidelity,
            logical_error: fidelity < 0.5,
        }
    }

    #[test]
    fn whitelisting_the_better_trajectory_removes_errors() {
        let records = vec![
            record(0, "000", 1.0, true),
            record(1, "011", 0.0, true),
            record(2, "000", 1.0, true),
            record(3, "011", 0.0, false),
        ];
        let stats = vec![stat("000", 1.0, 2.0 / 3.0), stat("011", 0.0, 1.0 / 3.0)];
        let table = build_lookup(&stats, 0.5).unwrap();
        let ps = apply_postselection(&records, &table);
        assert_eq!(ps.logical_error_rate, 0.0);
        assert_eq!(ps.accepted, 2);
        assert_eq!(ps.stable, 3);
        assert!((ps.accepted_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ps.mean_fidelity, 1.0);
    }
}
