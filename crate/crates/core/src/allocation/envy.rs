//! Envy graphs and envy-cycle elimination.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{check_instance, Allocation};
use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet};
use crate::rational::Rational;
use crate::valuation::ValueOracle;

/// Edge `(i, j)` iff player `i` strictly prefers `A_j` to `A_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvyGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl EnvyGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i == j || i >= n || j >= n) {
            return Err(Error::usage(format!("invalid envy edge {i} -> {j} for {n} players")));
        }
        Ok(EnvyGraph { n, edges })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| j)
    }

    /// First cycle met by a depth-first search that starts from players in
    /// ascending order and follows edges in ascending order. Each member
    /// envies the next; the last envies the first.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        find_cycle_with(self.n, |i| self.successors(i).collect())
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }
}

fn find_cycle_with(n: usize, successors: impl Fn(usize) -> Vec<usize>) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    for start in 0..n {
        if mark[start] != Mark::New {
            continue;
        }
        // (vertex, successors, next successor position)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(start, successors(start), 0)];
        mark[start] = Mark::Open;
        while let Some(top) = stack.last_mut() {
            if top.2 == top.1.len() {
                mark[top.0] = Mark::Done;
                stack.pop();
                continue;
            }
            let next = top.1[top.2];
            top.2 += 1;
            match mark[next] {
                Mark::Open => {
                    let from = stack.iter().position(|f| f.0 == next).expect("open vertex on stack");
                    return Some(stack[from..].iter().map(|f| f.0).collect());
                }
                Mark::New => {
                    mark[next] = Mark::Open;
                    stack.push((next, successors(next), 0));
                }
                Mark::Done => {}
            }
        }
    }
    None
}

pub fn envy_graph<V: ValueOracle>(a: &Allocation, valuations: &[V]) -> Result<EnvyGraph> {
    check_instance(a, valuations)?;
    Ok(EnvyState::new(a, valuations).graph())
}

/// Lowest-index player nobody envies.
pub fn find_unenvied_player(g: &EnvyGraph) -> Result<usize> {
    let mut envied = vec![false; g.n];
    for &(_, j) in &g.edges {
        envied[j] = true;
    }
    envied
        .iter()
        .position(|e| !e)
        .ok_or_else(|| Error::Invariant("every player is envied; the envy graph has a cycle".into()))
}

/// Rotates bundles along envy cycles until the envy graph is acyclic.
///
/// Each member of a rotated cycle receives the bundle of the player they
/// envy, so their own utility strictly rises and the edge count strictly
/// drops. The returned allocation is a permutation of the input's bundles.
pub fn eliminate_envy_cycles<V: ValueOracle>(a: &Allocation, valuations: &[V]) -> Result<Allocation> {
    check_instance(a, valuations)?;
    let mut state = EnvyState::new(a, valuations);
    state.eliminate_cycles()?;
    Ok(state.allocation())
}

/// Bundles plus the matrix `worth[i][k] = v_i(bundle of player k)`.
///
/// Protocols that move goods around keep this up to date instead of
/// re-querying every valuation each round.
#[derive(Clone, Debug)]
pub(crate) struct EnvyState {
    m: usize,
    bundles: Vec<GoodSet>,
    worth: Vec<Vec<Rational>>,
}

impl EnvyState {
    pub(crate) fn new<V: ValueOracle>(a: &Allocation, valuations: &[V]) -> Self {
        let bundles = a.bundles().to_vec();
        let worth = valuations
            .iter()
            .map(|v| bundles.iter().map(|b| v.eval(*b)).collect())
            .collect();
        EnvyState {
            m: a.goods(),
            bundles,
            worth,
        }
    }

    pub(crate) fn players(&self) -> usize {
        self.bundles.len()
    }

    pub(crate) fn bundle(&self, k: usize) -> &GoodSet {
        &self.bundles[k]
    }

    /// `v_i` of the bundle currently held by `k`.
    pub(crate) fn worth(&self, i: usize, k: usize) -> &Rational {
        &self.worth[i][k]
    }

    pub(crate) fn envies(&self, i: usize, j: usize) -> bool {
        i != j && self.worth[i][i] < self.worth[i][j]
    }

    pub(crate) fn allocation(&self) -> Allocation {
        Allocation::new(self.bundles.clone(), self.m).expect("bundles stay disjoint")
    }

    pub(crate) fn graph(&self) -> EnvyGraph {
        let n = self.players();
        let edges = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.envies(i, j));
        EnvyGraph {
            n,
            edges: edges.collect(),
        }
    }

    pub(crate) fn edge_count(&self) -> usize {
        let n = self.players();
        (0..n).map(|i| (0..n).filter(|&j| self.envies(i, j)).count()).sum()
    }

    pub(crate) fn unenvied(&self) -> Option<usize> {
        let n = self.players();
        (0..n).find(|&j| (0..n).all(|i| !self.envies(i, j)))
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.players();
        find_cycle_with(n, |i| (0..n).filter(|&j| self.envies(i, j)).collect())
    }

    /// `cycle[t]` takes the bundle of `cycle[t + 1]` (wrapping around).
    pub(crate) fn rotate(&mut self, cycle: &[usize]) {
        let moved: Vec<GoodSet> = (0..cycle.len())
            .map(|t| self.bundles[cycle[(t + 1) % cycle.len()]])
            .collect();
        for (t, b) in moved.into_iter().enumerate() {
            self.bundles[cycle[t]] = b;
        }
        for row in &mut self.worth {
            let moved: Vec<Rational> = (0..cycle.len())
                .map(|t| row[cycle[(t + 1) % cycle.len()]].clone())
                .collect();
            for (t, w) in moved.into_iter().enumerate() {
                row[cycle[t]] = w;
            }
        }
    }

    /// Returns the cycles rotated, in order.
    pub(crate) fn eliminate_cycles(&mut self) -> Result<Vec<Vec<usize>>> {
        let mut rotated = Vec::new();
        let mut edges = self.edge_count();
        while let Some(cycle) = self.find_cycle() {
            self.rotate(&cycle);
            let after = self.edge_count();
            if after >= edges {
                return Err(Error::Invariant(format!(
                    "rotating cycle {cycle:?} did not remove an envy edge ({edges} -> {after})"
                )));
            }
            edges = after;
            rotated.push(cycle);
        }
        Ok(rotated)
    }

    /// Replaces the bundle of player `k`, re-querying that column.
    pub(crate) fn set_bundle<V: ValueOracle>(&mut self, k: usize, bundle: GoodSet, valuations: &[V]) {
        self.bundles[k] = bundle;
        for (i, v) in valuations.iter().enumerate() {
            self.worth[i][k] = v.eval(bundle);
        }
    }

    /// Adds `g` to the bundle of `k` when every valuation is additive.
    pub(crate) fn add_additive(&mut self, k: usize, g: Good, per_good: &[&[Rational]]) {
        self.bundles[k] = self.bundles[k].with(g);
        for (i, vals) in per_good.iter().enumerate() {
            self.worth[i][k] += &vals[g];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Valuation;

    fn fig1() -> Vec<Valuation> {
        vec![
            Valuation::additive_ints(&[5, 3, 1]).unwrap(),
            Valuation::additive_ints(&[5, 1, 3]).unwrap(),
        ]
    }

    #[test]
    fn empty_bundles_have_no_envy() {
        let g = envy_graph(&Allocation::empty(2, 3), &fig1()).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn nash_allocation_has_single_edge() {
        let a = Allocation::from_goods(&[&[0, 1], &[2]], 3).unwrap();
        let g = envy_graph(&a, &fig1()).unwrap();
        assert_eq!(g.edges.into_iter().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn unenvied_tie_breaks_low() {
        assert_eq!(find_unenvied_player(&EnvyGraph::new(3, []).unwrap()).unwrap(), 0);
        assert_eq!(find_unenvied_player(&EnvyGraph::new(3, [(1, 0)]).unwrap()).unwrap(), 1);
        assert_eq!(
            find_unenvied_player(&EnvyGraph::new(3, [(0, 1), (2, 1)]).unwrap()).unwrap(),
            0
        );
        assert!(matches!(
            find_unenvied_player(&EnvyGraph::new(2, [(0, 1), (1, 0)]).unwrap()),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn mutual_envy_is_swapped() {
        let vals = vec![
            Valuation::additive_ints(&[1, 2]).unwrap(),
            Valuation::additive_ints(&[2, 1]).unwrap(),
        ];
        let a = Allocation::from_goods(&[&[0], &[1]], 2).unwrap();
        assert_eq!(envy_graph(&a, &vals).unwrap().edge_count(), 2);
        let b = eliminate_envy_cycles(&a, &vals).unwrap();
        assert_eq!(b, Allocation::from_goods(&[&[1], &[0]], 2).unwrap());
        assert_eq!(envy_graph(&b, &vals).unwrap().edge_count(), 0);
    }

    #[test]
    fn acyclic_input_is_unchanged() {
        let a = Allocation::from_goods(&[&[0, 1], &[2]], 3).unwrap();
        assert_eq!(eliminate_envy_cycles(&a, &fig1()).unwrap(), a);
    }

    #[test]
    fn cycle_search_order() {
        let g = EnvyGraph::new(4, [(0, 1), (1, 2), (2, 1), (2, 3), (3, 0)]).unwrap();
        assert_eq!(g.find_cycle(), Some(vec![1, 2]));
        assert!(EnvyGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap().is_acyclic());
    }
}
