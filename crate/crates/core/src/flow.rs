//! Small deterministic max-flow solver (Dinic) plus a feasibility check for
//! flows with lower bounds via the standard circulation transformation.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Edge>>,
    /// (node, edge slot) per added edge, in insertion order.
    handles: Vec<(usize, usize)>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            handles: Vec::new(),
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds a directed edge and returns its handle for flow readback.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let a = self.adj[from].len();
        let b = self.adj[to].len();
        self.adj[from].push(Edge { to, cap, rev: b });
        self.adj[to].push(Edge {
            to: from,
            cap: 0,
            rev: a,
        });
        self.handles.push((from, a));
        self.handles.len() - 1
    }

    /// Flow currently routed through the edge `handle`.
    pub fn flow_on(&self, handle: usize) -> i64 {
        let (node, slot) = self.handles[handle];
        let e = &self.adj[node][slot];
        self.adj[e.to][e.rev].cap
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for e in &self.adj[u] {
                if e.cap > 0 && level[e.to] < 0 {
                    level[e.to] = level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        (level[t] >= 0).then_some(level)
    }

    fn dfs_push(
        &mut self,
        u: usize,
        t: usize,
        pushed: i64,
        level: &[i32],
        it: &mut [usize],
    ) -> i64 {
        if u == t {
            return pushed;
        }
        while it[u] < self.adj[u].len() {
            let (to, cap) = {
                let e = &self.adj[u][it[u]];
                (e.to, e.cap)
            };
            if cap > 0 && level[to] == level[u] + 1 {
                let d = self.dfs_push(to, t, pushed.min(cap), level, it);
                if d > 0 {
                    let rev = self.adj[u][it[u]].rev;
                    self.adj[u][it[u]].cap -= d;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            it[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut it = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.dfs_push(s, t, i64::MAX, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// A directed edge demand `lower <= flow <= upper`.
#[derive(Debug, Clone, Copy)]
pub struct BoundedEdge {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
}

/// Feasible circulation with lower bounds on `nodes` vertices. Returns the
/// per-edge flows in input order when one exists.
pub fn feasible_circulation(nodes: usize, edges: &[BoundedEdge]) -> Option<Vec<i64>> {
    let mut net = FlowNetwork::new(nodes + 2);
    let s = nodes;
    let t = nodes + 1;
    let mut excess = vec![0i64; nodes];
    let mut handles = Vec::with_capacity(edges.len());
    for e in edges {
        if e.lower > e.upper {
            return None;
        }
        handles.push(net.add_edge(e.from, e.to, e.upper - e.lower));
        excess[e.to] += e.lower;
        excess[e.from] -= e.lower;
    }
    let mut need = 0;
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            net.add_edge(s, v, x);
            need += x;
        } else if x < 0 {
            net.add_edge(v, t, -x);
        }
    }
    if net.max_flow(s, t) != need {
        return None;
    }
    Some(
        edges
            .iter()
            .zip(&handles)
            .map(|(e, &h)| e.lower + net.flow_on(h))
            .collect(),
    )
}

/// Feasible s-t flow with lower bounds and a required total value.
pub fn feasible_flow_with_demands(
    nodes: usize,
    edges: &[BoundedEdge],
    s: usize,
    t: usize,
    value: i64,
) -> Option<Vec<i64>> {
    let mut all = edges.to_vec();
    all.push(BoundedEdge {
        from: t,
        to: s,
        lower: value,
        upper: value,
    });
    feasible_circulation(nodes, &all).map(|mut flows| {
        flows.pop();
        flows
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_max_flow() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 2);
        net.add_edge(0, 2, 2);
        net.add_edge(1, 3, 1);
        net.add_edge(2, 3, 3);
        net.add_edge(1, 2, 1);
        assert_eq!(net.max_flow(0, 3), 4);
    }

    #[test]
    fn circulation_respects_lower_bounds() {
        // A triangle needing at least one unit around the cycle.
        let edges = [
            BoundedEdge {
                from: 0,
                to: 1,
                lower: 1,
                upper: 2,
            },
            BoundedEdge {
                from: 1,
                to: 2,
                lower: 0,
                upper: 2,
            },
            BoundedEdge {
                from: 2,
                to: 0,
                lower: 0,
                upper: 2,
            },
        ];
        let flows = feasible_circulation(3, &edges).unwrap();
        assert!(flows[0] >= 1);
        assert_eq!(flows[0], flows[1]);
        assert_eq!(flows[1], flows[2]);
    }

    #[test]
    fn infeasible_circulation() {
        let edges = [
            BoundedEdge {
                from: 0,
                to: 1,
                lower: 2,
                upper: 2,
            },
            BoundedEdge {
                from: 1,
                to: 0,
                lower: 0,
                upper: 1,
            },
        ];
        assert!(feasible_circulation(2, &edges).is_none());
    }

    #[test]
    fn demand_flow() {
        // Two unit paths from 0 to 3.
        let edges = [
            BoundedEdge {
                from: 0,
                to: 1,
                lower: 0,
                upper: 1,
            },
            BoundedEdge {
                from: 1,
                to: 3,
                lower: 0,
                upper: 1,
            },
            BoundedEdge {
                from: 0,
                to: 2,
                lower: 0,
                upper: 1,
            },
            BoundedEdge {
                from: 2,
                to: 3,
                lower: 1,
                upper: 1,
            },
        ];
        let flows = feasible_flow_with_demands(4, &edges, 0, 3, 2).unwrap();
        assert_eq!(flows, vec![1, 1, 1, 1]);
        assert!(feasible_flow_with_demands(4, &edges, 0, 3, 3).is_none());
    }
}
