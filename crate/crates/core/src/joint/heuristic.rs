//! Greedy constructive plans used to seed the branch-and-bound search.
//!
//! Each plan fixes an RU-to-DU map up front and then places demands one at a
//! time, earliest deadline first, into (TTI, RU) cells. Placements
//! reuse DUs that are already switched on where possible, earliest TTI first,
//! and otherwise open the latest admissible TTI so that later arrivals can
//! share it.

use std::collections::BTreeSet;

use crate::scenario::Scenario;

use super::{energy_of, verify_with, Allocation, BuildOptions};

/// Places every demand under the fixed map `du_of[j]`, using only TTIs in
/// the `slots` bit mask, or returns `None` if some demand cannot be covered.
/// A demand that fits no single cell is spread over several TTIs. New TTIs
/// open as late as possible with `open_late`, else as early as possible.
pub fn greedy_plan(
    s: &Scenario,
    du_of: &[usize],
    slots: u64,
    open_late: bool,
    opts: &BuildOptions,
) -> Option<Allocation> {
    let (nj, nt, nr) = (s.num_ru, s.num_tti, s.rbs_per_tti);
    let mut next_rb = vec![0usize; nj * nt];
    let mut active: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut alloc = Allocation::default();

    let mut demands = s.demands();
    demands.sort_by_key(|d| (s.window_end(d.tti, d.class, opts.window_slack), d.tti, d.ue));
    for d in &demands {
        alloc.demand_flags.insert((d.ue, d.tti, d.class));
        let budget = s.classes[d.class].delay_budget_ms;
        let slack = 1e-9 * budget.abs().max(1.0);
        let last = s.window_end(d.tti, d.class, opts.window_slack);
        let mut left = d.bits;
        let mut used_slots = 0u64;
        let mut latest = d.tti;
        let mut fronthaul = 0.0;
        while left > 0 {
            // (partial, cost, slot order, RU) -> (slot, ru, rb count, bits);
            // open slots fill earliest first, and a cell that finishes the
            // demand beats one that does not
            let mut best: Option<((bool, f64, usize, usize), (usize, usize, usize, u64))> = None;
            for sl in (d.tti..=last).filter(|&sl| slots >> sl & 1 == 1 && used_slots >> sl & 1 == 0) {
                for (j, &l) in du_of.iter().enumerate() {
                    let start = next_rb[j * nt + sl];
                    let mut bits = 0u64;
                    let mut n = 0;
                    while bits < left && start + n < nr {
                        bits += s.rate_bits[j][d.ue][start + n][sl];
                        n += 1;
                    }
                    if bits == 0 {
                        continue;
                    }
                    let d_prop = s.prop_delay_ms[j][l];
                    let extra = if opts.per_du_propagation { d_prop } else { d_prop * n as f64 };
                    let delay = (sl.max(latest) - d.tti) as f64 * s.tti_ms + fronthaul + extra;
                    if delay > budget + slack {
                        continue;
                    }
                    let mut cost = s.e_dynamic_wh[l] * n as f64;
                    let order = if active.contains(&(l, sl)) {
                        sl
                    } else {
                        cost += s.e_static_wh[l];
                        if open_late {
                            nt - sl
                        } else {
                            sl
                        }
                    };
                    let partial = bits < left;
                    if partial {
                        cost /= bits as f64;
                    }
                    let key = (partial, cost, order, j);
                    if best.as_ref().map_or(true, |(k, _)| key < *k) {
                        best = Some((key, (sl, j, n, bits)));
                    }
                }
            }
            let Some((_, (sl, j, n, bits))) = best else {
                log::trace!("no cell for demand {d:?}");
                return None;
            };
            let l = du_of[j];
            let start = next_rb[j * nt + sl];
            for r in start..start + n {
                alloc.rb_assign.insert((d.ue, d.tti, j, r, sl));
            }
            next_rb[j * nt + sl] += n;
            active.insert((l, sl));
            alloc.du_assign.insert((j, l, sl));
            left = left.saturating_sub(bits);
            used_slots |= 1 << sl;
            latest = latest.max(sl);
            let d_prop = s.prop_delay_ms[j][l];
            fronthaul += if opts.per_du_propagation { d_prop } else { d_prop * n as f64 };
        }
    }
    alloc.du_active = active;
    alloc.canonical_serve_flags();
    Some(alloc)
}

/// Nearest DU of every RU, ties to the lowest index.
pub fn nearest_map(s: &Scenario) -> Vec<usize> {
    s.prop_delay_ms
        .iter()
        .map(|row| {
            (0..s.num_du)
                .min_by(|&a, &b| row[a].total_cmp(&row[b]))
                .unwrap_or(0)
        })
        .collect()
}

/// Horizons up to this many TTIs get every subset of TTIs tried as the
/// set of usable slots; longer ones only use all slots.
pub const SUBSET_SEARCH_TTIS: usize = 12;

/// The best greedy plan per RU-to-DU map that passes the checker: one map
/// per DU hosting all RUs, plus the nearest-DU map. Lowest energy first.
pub fn greedy_candidates(s: &Scenario, opts: &BuildOptions) -> Vec<(f64, Allocation)> {
    let mut maps: Vec<Vec<usize>> = (0..s.num_du).map(|l| vec![l; s.num_ru]).collect();
    maps.push(nearest_map(s));
    let full = if s.num_tti >= 64 { u64::MAX } else { (1u64 << s.num_tti) - 1 };
    let masks: Vec<u64> = if s.num_tti <= SUBSET_SEARCH_TTIS {
        (1..=full).collect()
    } else {
        vec![full]
    };
    let mut out: Vec<(f64, Allocation)> = Vec::new();
    for map in maps {
        let mut best: Option<(f64, Allocation)> = None;
        for (&mask, late) in masks.iter().flat_map(|m| [(m, true), (m, false)]) {
            let Some(a) = greedy_plan(s, &map, mask, late, opts) else {
                continue;
            };
            let Ok((energy, _)) = energy_of(s, &a) else {
                continue;
            };
            if best.as_ref().map_or(true, |(e, _)| energy < *e) {
                best = Some((energy, a));
            }
        }
        if let Some((_, a)) = best {
            let report = verify_with(s, &a, opts);
            if report.feasible {
                out.push((report.energy_total_wh, a));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
