//! The repair loop: charge the current packing, verify, and on failure look for a swap near the
//! failure before trying again.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::charge::{charge_order3, charge_order6, ChargeAssignment, ChargeError};
use crate::graph::{EdgeId, Graph, TriId};
use crate::order2::{charge_order2, TailNaming};
use crate::packing::{
    improve_packing, local_search_packing, sideways_swaps, targeted_swap, Packing, SwapCertificate,
    DEFAULT_MAX_SWAP,
};
use crate::rounding::compose_order_k;
use crate::structure::{build_structure, check_structure, violation_to_focus, StructureViolation};
use crate::verify::{verify_cover, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverOptions {
    pub seed: u64,
    pub max_swap: usize,
    pub tail_naming: TailNaming,
    /// Packings of equal size examined once improving swaps run out.
    pub sideways_budget: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            seed: 0,
            max_swap: DEFAULT_MAX_SWAP,
            tail_naming: TailNaming::default(),
            sideways_budget: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairStep {
    pub reason: String,
    pub focus: Vec<EdgeId>,
    pub swap: SwapCertificate,
    /// The swap keeps the packing size.
    pub sideways: bool,
}

#[derive(Debug, Clone)]
pub struct CoverOutcome {
    pub packing: Packing,
    pub f: ChargeAssignment,
    pub report: Report,
    pub log: Vec<RepairStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("order must be at least 2, got {0}")]
    BadOrder(u32),
    #[error("no repair found: {reason}")]
    RepairExhausted {
        reason: String,
        focus: Vec<EdgeId>,
        failing: Option<TriId>,
        log: Vec<RepairStep>,
    },
}

#[derive(Debug, Clone)]
struct Failure {
    reason: String,
    focus: Vec<EdgeId>,
    failing: Option<TriId>,
}

impl Failure {
    fn new(reason: impl ToString, focus: Vec<EdgeId>) -> Self {
        Failure {
            reason: reason.to_string(),
            focus,
            failing: None,
        }
    }
}

fn excess_focus(g: &Graph, e: ChargeError) -> Failure {
    let focus = match e {
        ChargeError::Excess { edge, .. } => g
            .triangles_on_edge(edge)
            .iter()
            .flat_map(|&t| g.triangle(t).edges)
            .collect(),
        ChargeError::InvalidStructure(t) => g.triangle(t).edges.to_vec(),
    };
    Failure::new(e, focus)
}

/// The charge of the requested order for one packing, without any repair.
pub fn charge(g: &Graph, p: &Packing, order: u32, naming: TailNaming) -> Result<ChargeAssignment, String> {
    attempt(g, p, order, naming, false).map_err(|f| f.reason)
}

/// With `strict`, any structure violation fails. Otherwise only those that block charging do.
fn attempt(
    g: &Graph,
    p: &Packing,
    order: u32,
    naming: TailNaming,
    strict: bool,
) -> Result<ChargeAssignment, Failure> {
    let s = build_structure(g, p);
    let blocking = |v: &StructureViolation| strict || v.kind.blocks_charging();
    if let Some(v) = check_structure(g, &s).into_iter().find(blocking) {
        return Err(Failure::new(
            format!("structure {:?}", v.kind),
            violation_to_focus(g, &v),
        ));
    }
    let f = engine(g, p, order, naming)?;
    let report = verify_cover(g, &f, p.len());
    if let Some(&t) = report.failing.first() {
        return Err(Failure {
            reason: format!("triangle {t} uncovered"),
            focus: g.triangle(t).edges.to_vec(),
            failing: Some(t),
        });
    }
    if !report.ok() {
        return Err(Failure::new("budget exceeded", (0..g.m() as EdgeId).collect()));
    }
    Ok(f)
}

/// The engine output for `order`, before verification.
fn engine(g: &Graph, p: &Packing, order: u32, naming: TailNaming) -> Result<ChargeAssignment, Failure> {
    let s = build_structure(g, p);
    let two = || {
        charge_order2(g, &s, naming)
            .map(|r| r.f)
            .map_err(|e| Failure::new(&e, e.focus(g)))
    };
    let three = || charge_order3(g, &s).map_err(|e| excess_focus(g, e));
    Ok(match order {
        2 => two()?,
        3 => three()?,
        6 => charge_order6(g, &s).map_err(|e| excess_focus(g, e))?,
        k => {
            let f2 = two()?;
            let f3 = if k % 2 == 1 { Some(three()?) } else { None };
            compose_order_k(Some(&f2), f3.as_ref(), k).map_err(|e| Failure::new(e, Vec::new()))?
        }
    })
}

/// Spends whatever budget the packing has left, one numerator at a time, on the edge lying in the
/// most triangles still short of a full unit. Each unit is booked to the packed triangle that has
/// spent least.
fn top_up(g: &Graph, p: &Packing, mut f: ChargeAssignment) -> Option<ChargeAssignment> {
    let budget = 2 * f.order as u64 * p.len() as u64;
    let tris = g.triangles().len() as TriId;
    loop {
        let short: Vec<TriId> = (0..tris).filter(|&t| !f.covers(g, t)).collect();
        if short.is_empty() {
            return Some(f);
        }
        if f.total_num() >= budget {
            return None;
        }
        let mut hits = vec![0usize; g.m()];
        for &t in &short {
            for e in g.triangle(t).edges {
                hits[e as usize] += 1;
            }
        }
        let e = (0..g.m())
            .filter(|&e| f.num[e] < f.order)
            .max_by_key(|&e| (hits[e], std::cmp::Reverse(e)))?;
        let by = p
            .triangles()
            .min_by_key(|t| (f.spent.get(t).copied().unwrap_or(0), *t))?;
        f.add(e as EdgeId, 1, by);
    }
}

fn escalate(g: &Graph, p: &Packing, focus: &[EdgeId], max_swap: usize) -> Option<SwapCertificate> {
    (max_swap..=max_swap + 2)
        .find_map(|m| targeted_swap(g, p, focus, m))
        .or_else(|| improve_packing(g, p, max_swap + 2))
}

/// Breadth-first walk over packings of the same size. Stops at the first one that charges
/// cleanly or admits an improving swap.
fn sideways(
    g: &Graph,
    start: &Packing,
    first: &Failure,
    order: u32,
    opts: &CoverOptions,
) -> Option<(Packing, Vec<RepairStep>)> {
    let key = |p: &Packing| p.triangles().collect::<Vec<_>>();
    let mut seen = BTreeSet::from([key(start)]);
    let mut queue = VecDeque::from([(start.clone(), first.clone(), Vec::new())]);
    let mut budget = opts.sideways_budget;
    while let Some((p, fail, path)) = queue.pop_front() {
        for swap in sideways_swaps(g, &p, &fail.focus, 2, 8) {
            let mut q = p.clone();
            if q.apply(g, &swap).is_err() || !seen.insert(key(&q)) {
                continue;
            }
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let mut steps: Vec<RepairStep> = path.clone();
            steps.push(RepairStep {
                reason: fail.reason.clone(),
                focus: fail.focus.clone(),
                swap,
                sideways: true,
            });
            match attempt(g, &q, order, opts.tail_naming, true) {
                Ok(_) => return Some((q, steps)),
                Err(next) => {
                    if improve_packing(g, &q, opts.max_swap).is_some() {
                        return Some((q, steps));
                    }
                    queue.push_back((q, next, steps));
                }
            }
        }
    }
    None
}

/// Runs the repair loop from a given packing.
pub fn cover_from(
    g: &Graph,
    mut p: Packing,
    order: u32,
    opts: &CoverOptions,
) -> Result<CoverOutcome, CoverError> {
    if order < 2 {
        return Err(CoverError::BadOrder(order));
    }
    let mut log = Vec::new();
    loop {
        let fail = match attempt(g, &p, order, opts.tail_naming, true) {
            Ok(f) => {
                let report = verify_cover(g, &f, p.len());
                return Ok(CoverOutcome {
                    packing: p,
                    f,
                    report,
                    log,
                });
            }
            Err(fail) => fail,
        };
        if let Some(swap) = escalate(g, &p, &fail.focus, opts.max_swap) {
            p.apply(g, &swap)
                .expect("swaps are built against the current packing");
            log.push(RepairStep {
                reason: fail.reason,
                focus: fail.focus,
                swap,
                sideways: false,
            });
            continue;
        }
        match sideways(g, &p, &fail, order, opts) {
            Some((q, steps)) => {
                p = q;
                log.extend(steps);
            }
            None => {
                let lenient = match attempt(g, &p, order, opts.tail_naming, false) {
                    Ok(f) => Some(f),
                    Err(Failure { failing: Some(_), .. }) => engine(g, &p, order, opts.tail_naming)
                        .ok()
                        .and_then(|f| top_up(g, &p, f)),
                    Err(_) => None,
                };
                if let Some(f) = lenient {
                    let report = verify_cover(g, &f, p.len());
                    return Ok(CoverOutcome {
                        packing: p,
                        f,
                        report,
                        log,
                    });
                }
                return Err(CoverError::RepairExhausted {
                    reason: fail.reason,
                    focus: fail.focus,
                    failing: fail.failing,
                    log,
                });
            }
        }
    }
}

/// Local search packing followed by the repair loop.
pub fn cover(g: &Graph, order: u32, opts: &CoverOptions) -> Result<CoverOutcome, CoverError> {
    let p = local_search_packing(g, opts.seed, opts.max_swap);
    cover_from(g, p, order, opts)
}

pub fn cover_order2(g: &Graph, seed: u64) -> Result<CoverOutcome, CoverError> {
    cover(
        g,
        2,
        &CoverOptions {
            seed,
            ..CoverOptions::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{complete, lend_chain};
    use num_rational::Ratio;

    #[test]
    fn small_complete_graphs() {
        let r = cover_order2(&complete(3), 0).unwrap();
        assert_eq!(r.f.total(), Ratio::new(3, 2));
        let r = cover_order2(&complete(4), 0).unwrap();
        assert_eq!(r.f.total(), Ratio::from_integer(2));
        let r = cover_order2(&complete(6), 0).unwrap();
        assert_eq!(r.packing.len(), 4);
        assert!(r.f.total() <= Ratio::from_integer(8));
        assert!(r.report.ok());
    }

    #[test]
    fn greedy_start_is_repaired() {
        let g = complete(6);
        let p = Packing::from_triangles(
            &g,
            &[g.triangle_id(0, 1, 2).unwrap(), g.triangle_id(3, 4, 5).unwrap()],
        )
        .unwrap();
        let r = cover_from(&g, p, 2, &CoverOptions::default()).unwrap();
        assert!(r.report.ok());
        assert!(!r.log.is_empty());
        assert_eq!(r.packing.len(), 4);
    }

    #[test]
    fn composed_orders() {
        let lc = lend_chain(2);
        for k in [2, 3, 4, 5, 6, 7] {
            let p = Packing::from_triangles(&lc.graph, &lc.packing).unwrap();
            let r = cover_from(&lc.graph, p, k, &CoverOptions::default()).unwrap();
            assert_eq!(r.f.order, k);
            assert!(r.report.ok(), "order {k}");
        }
    }

    #[test]
    fn k5_optimal_packing_is_charged_despite_violations() {
        let g = complete(5);
        for k in [2, 3, 6] {
            let r = cover(&g, k, &CoverOptions::default()).unwrap();
            assert_eq!(r.packing.len(), 2);
            assert!(r.report.ok(), "order {k}");
        }
    }

    #[test]
    fn top_up_spends_leftover_thirds() {
        let g = complete(5);
        let p = local_search_packing(&g, 0, 5);
        let s = build_structure(&g, &p);
        let f = charge_order3(&g, &s).unwrap();
        assert!(!verify_cover(&g, &f, 2).ok());
        let f = top_up(&g, &p, f).unwrap();
        assert!(verify_cover(&g, &f, 2).ok());
        assert!(f.total() <= Ratio::from_integer(4));
    }

    #[test]
    fn order_below_two() {
        assert_eq!(
            cover(&complete(4), 1, &CoverOptions::default()).unwrap_err(),
            CoverError::BadOrder(1)
        );
    }
}
