//! Pairwise flow compatibility and the contention graph built from it.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::LinkBudget;
use crate::scenario::{Flow, Scenario};

/// How two distinct flows share stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// Both transmit from one station (includes duplicate flows).
    SameTx,
    /// Both receive at one station.
    SameRx,
    /// One flow's transmitter is the other's receiver, but not the reverse.
    RsiOneWay,
    /// Each flow's transmitter is the other's receiver.
    RsiBothWays,
    NoCommonNode,
}

impl PairKind {
    pub fn is_role_conflict(self) -> bool {
        matches!(self, PairKind::SameTx | PairKind::SameRx)
    }
}

pub fn classify_pair(f: &Flow, l: &Flow) -> PairKind {
    if f.tx == l.tx {
        PairKind::SameTx
    } else if f.rx == l.rx {
        PairKind::SameRx
    } else {
        match (f.tx == l.rx, f.rx == l.tx) {
            (true, true) => PairKind::RsiBothWays,
            (true, false) | (false, true) => PairKind::RsiOneWay,
            (false, false) => PairKind::NoCommonNode,
        }
    }
}

/// Relative interference `(RI_{f,l}, RI_{l,f})` from a prebuilt link table.
///
/// `RI_{a,b}` measures how much `a` hurts `b`: residual SI plus noise over
/// `b`'s signal when `a` transmits from `b`'s receiver, otherwise noise plus
/// MUI from `a`'s transmitter over `b`'s signal.
pub fn pair_interference(
    links: &LinkBudget,
    f: usize,
    l: usize,
    kind: PairKind,
) -> Result<(f64, f64)> {
    if kind.is_role_conflict() {
        return Err(Error::Contract(format!(
            "relative interference undefined for role-conflicting flows {f} and {l} ({kind:?})"
        )));
    }
    let one_way = |a: usize, b: usize| -> f64 {
        let (t_a, _) = links.endpoints(a);
        let (_, r_b) = links.endpoints(b);
        if t_a == r_b {
            (links.noise() + links.rsi(a)) / links.signal(b)
        } else {
            (links.noise() + links.mui(a, b)) / links.signal(b)
        }
    };
    Ok((one_way(f, l), one_way(l, f)))
}

/// Relative interference between flows `f` and `l` of `scenario`.
pub fn relative_interference(
    f: usize,
    l: usize,
    kind: PairKind,
    scenario: &Scenario,
) -> Result<(f64, f64)> {
    pair_interference(&LinkBudget::new(scenario)?, f, l, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeCause {
    RoleConflict,
    RiExceeded,
}

impl fmt::Display for EdgeCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeCause::RoleConflict => "role-conflict",
            EdgeCause::RiExceeded => "ri-exceeded",
        })
    }
}

/// Duplex assumption used when deciding which shared nodes are conflicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Duplex {
    /// A station may transmit for one flow while receiving for another.
    Full,
    /// A station serves at most one flow at a time.
    Half,
}

/// Undirected graph over flows; an edge forbids concurrent transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentionGraph {
    n: usize,
    cells: Vec<Option<EdgeCause>>,
}

impl ContentionGraph {
    pub fn new(num_flows: usize) -> Self {
        Self {
            n: num_flows,
            cells: vec![None; num_flows * num_flows],
        }
    }

    /// Graph with exactly the given undirected edges.
    pub fn from_edges(num_flows: usize, edges: &[(usize, usize, EdgeCause)]) -> Self {
        let mut g = Self::new(num_flows);
        for &(a, b, c) in edges {
            g.add_edge(a, b, c);
        }
        g
    }

    pub fn num_flows(&self) -> usize {
        self.n
    }

    /// Panics on a self-loop.
    pub fn add_edge(&mut self, a: usize, b: usize, cause: EdgeCause) {
        assert_ne!(a, b, "contention graph has no self-loops");
        self.cells[a * self.n + b] = Some(cause);
        self.cells[b * self.n + a] = Some(cause);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.cells[a * self.n + b].is_some()
    }

    pub fn cause(&self, a: usize, b: usize) -> Option<EdgeCause> {
        self.cells[a * self.n + b]
    }

    pub fn neighbors(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        self.cells[f * self.n..(f + 1) * self.n]
            .iter()
            .enumerate()
            .filter_map(|(g, c)| c.map(|_| g))
    }

    pub fn degree(&self, f: usize) -> usize {
        self.neighbors(f).count()
    }

    /// True when `f` has no edge to any member of `set`.
    pub fn compatible_with(&self, f: usize, set: &[usize]) -> bool {
        set.iter().all(|&g| !self.has_edge(f, g))
    }

    /// Edges with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, EdgeCause)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if let Some(c) = self.cause(a, b) {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    /// One `a b cause` line per edge, preceded by a `flows N` header.
    pub fn edge_list(&self) -> String {
        let mut out = format!("flows {}\n", self.n);
        for (a, b, c) in self.edges() {
            let _ = writeln!(out, "{a} {b} {c}");
        }
        out
    }
}

/// Builds the contention graph from a prebuilt link table.
pub fn graph_from_links(
    links: &LinkBudget,
    flows: &[Flow],
    sigma: f64,
    duplex: Duplex,
) -> ContentionGraph {
    let mut g = ContentionGraph::new(flows.len());
    for a in 0..flows.len() {
        for b in a + 1..flows.len() {
            let kind = classify_pair(&flows[a], &flows[b]);
            let conflict = match duplex {
                Duplex::Full => kind.is_role_conflict(),
                Duplex::Half => kind != PairKind::NoCommonNode,
            };
            if conflict {
                g.add_edge(a, b, EdgeCause::RoleConflict);
                continue;
            }
            let (ri_ab, ri_ba) =
                pair_interference(links, a, b, kind).expect("role conflicts handled above");
            if ri_ab.max(ri_ba) > sigma {
                g.add_edge(a, b, EdgeCause::RiExceeded);
            }
        }
    }
    g
}

/// Full-duplex contention graph: role conflicts plus RI above σ.
pub fn build_graph(scenario: &Scenario) -> Result<ContentionGraph> {
    let links = LinkBudget::new(scenario)?;
    Ok(graph_from_links(
        &links,
        &scenario.flows,
        scenario.sigma,
        Duplex::Full,
    ))
}

/// Half-duplex contention graph: any shared station conflicts.
pub fn hd_graph(scenario: &Scenario) -> Result<ContentionGraph> {
    let links = LinkBudget::new(scenario)?;
    Ok(graph_from_links(
        &links,
        &scenario.flows,
        scenario.sigma,
        Duplex::Half,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flow(id: usize, tx: usize, rx: usize) -> Flow {
        Flow {
            id,
            tx,
            rx,
            qos_bps: 1e9,
        }
    }

    #[test]
    fn classification_examples() {
        let (a, b, c, d) = (0, 1, 2, 3);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, a, c)), PairKind::SameTx);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, c, b)), PairKind::SameRx);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, b, a)), PairKind::RsiBothWays);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, b, c)), PairKind::RsiOneWay);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, c, a)), PairKind::RsiOneWay);
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, c, d)), PairKind::NoCommonNode);
        // duplicates are a transmitter conflict
        assert_eq!(classify_pair(&flow(0, a, b), &flow(1, a, b)), PairKind::SameTx);
    }

    #[test]
    fn classification_is_symmetric() {
        for ft in 0..4 {
            for fr in 0..4 {
                for lt in 0..4 {
                    for lr in 0..4 {
                        if ft == fr || lt == lr {
                            continue;
                        }
                        let (f, l) = (flow(0, ft, fr), flow(1, lt, lr));
                        assert_eq!(classify_pair(&f, &l), classify_pair(&l, &f));
                    }
                }
            }
        }
    }

    #[test]
    fn four_flow_example_shape() {
        // flows 1..4 map to ids 0..3
        let g = ContentionGraph::from_edges(
            4,
            &[(0, 1, EdgeCause::RiExceeded), (0, 3, EdgeCause::RiExceeded)],
        );
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(g.has_edge(0, 3));
        assert!(!g.has_edge(0, 2));
        assert!(!g.has_edge(1, 3));
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(2), 0);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(g.edge_list(), "flows 4\n0 1 ri-exceeded\n0 3 ri-exceeded\n");
    }

    #[test]
    #[should_panic(expected = "self-loops")]
    fn self_loop_panics() {
        ContentionGraph::new(2).add_edge(1, 1, EdgeCause::RoleConflict);
    }
}
