//! Exact solvers on conflict subgraphs: minimum vertex cover (the
//! cardinality-repair cost) and maximal-independent-set counting (the
//! subset-repair count). Both are budget-limited branch searches over
//! bitset graphs of at most 128 vertices; running out of budget is an
//! error, never a wrong answer.

use crate::budget::Budget;
use crate::error::{Error, Result};

/// Adjacency as bitmasks over vertices 0..n, n <= 128.
#[derive(Debug, Clone)]
pub(crate) struct BitGraph {
    pub adj: Vec<u128>,
}

impl BitGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > 128 {
            return Err(Error::BudgetExceeded(
                "conflict subgraph exceeds the 128-vertex exact-solver limit",
            ));
        }
        Ok(BitGraph { adj: vec![0; n] })
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn full_mask(&self) -> u128 {
        if self.n() == 128 {
            u128::MAX
        } else {
            (1u128 << self.n()) - 1
        }
    }
}

fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Size of a greedy maximal matching restricted to `active`; every edge of
/// a matching needs its own cover vertex, so this lower-bounds the cover.
fn matching_bound(g: &BitGraph, active: u128) -> u32 {
    let mut used = 0u128;
    let mut size = 0;
    for u in bits(active) {
        if used & (1 << u) != 0 {
            continue;
        }
        let nbrs = g.adj[u] & active & !used;
        if nbrs != 0 {
            let v = nbrs.trailing_zeros();
            used |= (1 << u) | (1u128 << v);
            size += 1;
        }
    }
    size
}

fn greedy_cover(g: &BitGraph, mut active: u128) -> u32 {
    let mut size = 0;
    loop {
        let mut best = usize::MAX;
        let mut best_deg = 0;
        for u in bits(active) {
            let deg = (g.adj[u] & active).count_ones();
            if deg > best_deg {
                best_deg = deg;
                best = u;
            }
        }
        if best_deg == 0 {
            return size;
        }
        active &= !(1u128 << best);
        size += 1;
    }
}

/// Exact minimum vertex cover of the subgraph induced by `active`.
pub(crate) fn min_vertex_cover(g: &BitGraph, active: u128, budget: &Budget) -> Result<u64> {
    let mut best = greedy_cover(g, active);
    branch_cover(g, active, 0, &mut best, budget)?;
    Ok(best as u64)
}

fn branch_cover(
    g: &BitGraph,
    mut active: u128,
    mut acc: u32,
    best: &mut u32,
    budget: &Budget,
) -> Result<()> {
    budget.spend(1, "minimum vertex cover")?;

    // reductions: isolated removal, degree-1, neighborhood dominance
    'reduce: loop {
        let mut degrees = [0u32; 128];
        let mut max_deg = 0;
        for u in bits(active) {
            let d = (g.adj[u] & active).count_ones();
            degrees[u] = d;
            max_deg = max_deg.max(d);
            if d == 0 {
                active &= !(1u128 << u);
            }
        }
        if active == 0 || max_deg == 0 {
            break;
        }
        for u in bits(active) {
            if degrees[u] == 1 {
                // the unique neighbor covers at least as much as u would
                let v = (g.adj[u] & active).trailing_zeros();
                acc += 1;
                active &= !((1 << u) | (1u128 << v));
                continue 'reduce;
            }
        }
        for u in bits(active) {
            let closed_u = (g.adj[u] & active) | (1 << u);
            for v in bits(g.adj[u] & active) {
                let closed_v = (g.adj[v] & active) | (1 << v);
                // N[u] ⊆ N[v]: some minimum cover contains v
                if closed_u & !closed_v == 0 {
                    acc += 1;
                    active &= !(1u128 << v);
                    continue 'reduce;
                }
            }
        }
        break;
    }

    if active == 0 {
        *best = (*best).min(acc);
        return Ok(());
    }
    if acc + matching_bound(g, active) >= *best {
        return Ok(());
    }

    // branch on a max-degree vertex: either it is in the cover, or its
    // whole neighborhood is
    let v = bits(active)
        .max_by_key(|&u| (g.adj[u] & active).count_ones())
        .unwrap();
    branch_cover(g, active & !(1u128 << v), acc + 1, best, budget)?;
    let nbrs = g.adj[v] & active;
    branch_cover(
        g,
        active & !nbrs & !(1u128 << v),
        acc + nbrs.count_ones(),
        best,
        budget,
    )?;
    Ok(())
}

/// Number of maximal independent sets of the subgraph induced by `active`.
/// Enumerated as maximal cliques of the complement (Bron–Kerbosch with
/// pivoting); the empty graph has exactly one (the empty set).
pub(crate) fn count_maximal_independent_sets(
    g: &BitGraph,
    active: u128,
    budget: &Budget,
) -> Result<u64> {
    let mask = g.full_mask();
    let complement: Vec<u128> = (0..g.n())
        .map(|u| !g.adj[u] & mask & !(1u128 << u))
        .collect();
    bron_kerbosch(&complement, active, 0, budget)
}

fn bron_kerbosch(complement: &[u128], mut p: u128, mut x: u128, budget: &Budget) -> Result<u64> {
    budget.spend(1, "maximal-independent-set enumeration")?;
    if p == 0 && x == 0 {
        return Ok(1);
    }
    let pivot = bits(p | x)
        .max_by_key(|&u| (p & complement[u]).count_ones())
        .unwrap();
    let mut count = 0;
    for v in bits(p & !complement[pivot]) {
        count += bron_kerbosch(complement, p & complement[v], x & complement[v], budget)?;
        p &= !(1u128 << v);
        x |= 1 << v;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> BitGraph {
        let mut g = BitGraph::new(n).unwrap();
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    fn all(n: usize) -> u128 {
        (1u128 << n) - 1
    }

    #[test]
    fn cover_of_single_edge_is_one() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(min_vertex_cover(&g, all(2), &Budget::default()).unwrap(), 1);
    }

    #[test]
    fn cover_of_triangle_is_two() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(min_vertex_cover(&g, all(3), &Budget::default()).unwrap(), 2);
    }

    #[test]
    fn cover_of_empty_graph_is_zero() {
        let g = graph(4, &[]);
        assert_eq!(min_vertex_cover(&g, all(4), &Budget::default()).unwrap(), 0);
    }

    #[test]
    fn cover_of_star_is_one() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(min_vertex_cover(&g, all(5), &Budget::default()).unwrap(), 1);
    }

    #[test]
    fn mis_of_four_cycle_is_two() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(
            count_maximal_independent_sets(&g, all(4), &Budget::default()).unwrap(),
            2
        );
    }

    #[test]
    fn mis_of_single_edge_is_two() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(
            count_maximal_independent_sets(&g, all(2), &Budget::default()).unwrap(),
            2
        );
    }

    #[test]
    fn mis_of_empty_graph_is_one() {
        let g = graph(3, &[]);
        assert_eq!(
            count_maximal_independent_sets(&g, 0, &Budget::default()).unwrap(),
            1
        );
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let tiny = Budget::new(1);
        assert!(matches!(
            count_maximal_independent_sets(&g, all(6), &tiny),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
