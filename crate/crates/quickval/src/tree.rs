//! Seed trees: the binary search tree built by successive seed insertions,
//! with per-node arrival data, interval bounds, cost sums, and the
//! quantile path that reproduces the pivot chain (the coupling identity).

use std::collections::BTreeMap;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::integrals::{integral_q, IntegralResult};

/// Node address: the path from the root as a string of '0' (left) and '1'
/// (right); the empty string is the root.
pub type NodeAddr = String;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedTreeNode {
    /// Arrival index `tau_theta` of the seed stored at this node (1-based).
    pub tau: usize,
    /// The stored pivot seed `U_{tau_theta}`.
    pub pivot: f64,
    /// Left end of the node's interval `L_theta`.
    pub lo: f64,
    /// Right end of the node's interval `R_theta`.
    pub hi: f64,
}

impl SeedTreeNode {
    pub fn interval_len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sparse seed tree: only the nodes that have received a seed exist.
#[derive(Clone, Debug)]
pub struct SeedTree {
    nodes: BTreeMap<NodeAddr, SeedTreeNode>,
}

impl SeedTree {
    /// Insert `seeds` in arrival order into an initially empty tree.
    pub fn build(seeds: &[f64]) -> Result<SeedTree> {
        if seeds.is_empty() {
            return Err(Error::Domain("seed tree needs at least one seed".into()));
        }
        let mut tree = SeedTree {
            nodes: BTreeMap::new(),
        };
        for (idx, &u) in seeds.iter().enumerate() {
            tree.insert(idx + 1, u)?;
        }
        Ok(tree)
    }

    fn insert(&mut self, tau: usize, u: f64) -> Result<()> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!(
                "seed {u} is outside the open unit interval"
            )));
        }
        let mut addr = NodeAddr::new();
        let (mut lo, mut hi) = (0.0, 1.0);
        loop {
            match self.nodes.get(&addr) {
                None => {
                    self.nodes.insert(
                        addr,
                        SeedTreeNode {
                            tau,
                            pivot: u,
                            lo,
                            hi,
                        },
                    );
                    return Ok(());
                }
                Some(node) => {
                    if u == node.pivot {
                        return Err(Error::Domain(format!(
                            "duplicate seed {u}; ties must be regenerated upstream"
                        )));
                    }
                    if u < node.pivot {
                        hi = node.pivot;
                        addr.push('0');
                    } else {
                        lo = node.pivot;
                        addr.push('1');
                    }
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, addr: &str) -> Option<&SeedTreeNode> {
        self.nodes.get(addr)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeAddr, &SeedTreeNode)> {
        self.nodes.iter()
    }

    /// Nodes at distance `k` from the root.
    pub fn level(&self, k: usize) -> impl Iterator<Item = (&NodeAddr, &SeedTreeNode)> {
        self.nodes.iter().filter(move |(addr, _)| addr.len() == k)
    }

    /// The path a search for the population quantile `alpha` follows, from
    /// the root until it falls off the tree. The k-th node on the path
    /// carries exactly the data of pivot-chain record k built from the same
    /// seeds.
    pub fn alpha_path(&self, alpha: f64) -> Vec<NodeAddr> {
        let mut path = Vec::new();
        let mut addr = NodeAddr::new();
        while let Some(node) = self.nodes.get(&addr) {
            path.push(addr.clone());
            addr.push(if alpha < node.pivot { '0' } else { '1' });
        }
        path
    }

    /// `S_{n,theta}`: total cost of comparing the seeds that arrive after
    /// `tau_theta` (up to `n`) and land in the node's interval against the
    /// node's pivot. Empty sum (`n <= tau_theta`) is 0.
    pub fn node_sum(&self, addr: &str, seeds: &[f64], n: usize, cost: &CostModel) -> Result<f64> {
        let node = self
            .node(addr)
            .ok_or_else(|| Error::Domain(format!("no node at address {addr:?}")))?;
        if n > seeds.len() {
            return Err(Error::Domain(format!(
                "n = {n} exceeds the {} available seeds",
                seeds.len()
            )));
        }
        let mut sum = 0.0;
        for i in node.tau + 1..=n {
            let u = seeds[i - 1];
            if node.lo < u && u < node.hi {
                sum += cost.beta(u, node.pivot)?;
            }
        }
        Ok(sum)
    }

    /// `I_{p,theta}`: conditional p-th moment of one comparison against the
    /// node's pivot, integrated over the node's interval.
    pub fn node_integral(&self, addr: &str, cost: &CostModel, p: f64) -> Result<IntegralResult> {
        let node = self
            .node(addr)
            .ok_or_else(|| Error::Domain(format!("no node at address {addr:?}")))?;
        integral_q(cost, node.lo, node.hi, node.pivot, p)
    }
}

/// Per-node summary of the tree cost quantities.
#[derive(Clone, Copy, Debug)]
pub struct NodeSums {
    pub s_n: f64,
    pub i1: IntegralResult,
    pub i2: IntegralResult,
}

/// `S_{n,theta}` together with `I_{1,theta}` and `I_{2,theta}` for one node.
pub fn node_sums(
    tree: &SeedTree,
    addr: &str,
    seeds: &[f64],
    n: usize,
    cost: &CostModel,
) -> Result<NodeSums> {
    Ok(NodeSums {
        s_n: tree.node_sum(addr, seeds, n, cost)?,
        i1: tree.node_integral(addr, cost, 1.0)?,
        i2: tree.node_integral(addr, cost, 2.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_pivot_chain;
    use crate::stream::{SeedStream, SeedTape};

    #[test]
    fn hand_insertion() {
        let tree = SeedTree::build(&[0.5, 0.9]).unwrap();
        assert_eq!(tree.len(), 2);
        let root = tree.node("").unwrap();
        assert_eq!((root.tau, root.pivot, root.lo, root.hi), (1, 0.5, 0.0, 1.0));
        let right = tree.node("1").unwrap();
        assert_eq!(
            (right.tau, right.pivot, right.lo, right.hi),
            (2, 0.9, 0.5, 1.0)
        );
        assert!(tree.node("0").is_none());
    }

    #[test]
    fn children_partition_the_parent_interval() {
        let seeds: Vec<f64> = SeedStream::new(17, 0).take(128).collect();
        let tree = SeedTree::build(&seeds).unwrap();
        for (addr, node) in tree.nodes() {
            if let Some(left) = tree.node(&format!("{addr}0")) {
                assert_eq!((left.lo, left.hi), (node.lo, node.pivot));
            }
            if let Some(right) = tree.node(&format!("{addr}1")) {
                assert_eq!((right.lo, right.hi), (node.pivot, node.hi));
            }
        }
    }

    #[test]
    fn alpha_path_extremes_are_spines() {
        let seeds: Vec<f64> = SeedStream::new(23, 1).take(64).collect();
        let tree = SeedTree::build(&seeds).unwrap();
        for addr in tree.alpha_path(0.0) {
            assert!(addr.chars().all(|c| c == '0'));
        }
        for addr in tree.alpha_path(1.0) {
            assert!(addr.chars().all(|c| c == '1'));
        }
    }

    #[test]
    fn alpha_path_reproduces_the_pivot_chain() {
        // hand case first
        let tree = SeedTree::build(&[0.5, 0.9, 0.3]).unwrap();
        let path = tree.alpha_path(0.25);
        let pivots: Vec<f64> = path.iter().map(|a| tree.node(a).unwrap().pivot).collect();
        assert_eq!(pivots, vec![0.5, 0.3]);

        // random streams, several alphas
        for alpha in [0.0, 0.3, 1.0] {
            for stream_idx in 0..4 {
                let seeds: Vec<f64> = SeedStream::new(99, stream_idx).take(1 << 10).collect();
                let tree = SeedTree::build(&seeds).unwrap();
                let path = tree.alpha_path(alpha);
                let mut tape = SeedTape::from_seeds(seeds).unwrap();
                let chain = build_pivot_chain(&mut tape, alpha, path.len()).unwrap();
                for (rec, addr) in chain.records().iter().zip(&path) {
                    let node = tree.node(addr).unwrap();
                    assert_eq!(rec.tau, Some(node.tau));
                    assert_eq!(rec.pivot, node.pivot);
                    assert_eq!((rec.lo, rec.hi), (node.lo, node.hi));
                }
            }
        }
    }

    #[test]
    fn node_sum_hand_case_and_empty_sum() {
        let seeds = [0.5, 0.9, 0.3];
        let tree = SeedTree::build(&seeds).unwrap();
        let key = CostModel::key_comparisons();
        assert_eq!(tree.node_sum("", &seeds, 3, &key).unwrap(), 2.0);
        // n = tau_theta: empty sum
        assert_eq!(tree.node_sum("", &seeds, 1, &key).unwrap(), 0.0);
        assert_eq!(tree.node_sum("1", &seeds, 2, &key).unwrap(), 0.0);
    }

    #[test]
    fn unit_cost_node_integral_is_the_interval_length() {
        let seeds: Vec<f64> = SeedStream::new(7, 7).take(32).collect();
        let tree = SeedTree::build(&seeds).unwrap();
        let key = CostModel::key_comparisons();
        for (addr, node) in tree.nodes() {
            let i1 = tree.node_integral(addr, &key, 1.0).unwrap();
            assert_eq!(i1.value, node.interval_len());
        }
    }

    #[test]
    fn missing_node_is_reported_absent() {
        let tree = SeedTree::build(&[0.5, 0.9]).unwrap();
        assert!(tree
            .node_sum("0", &[0.5, 0.9], 2, &CostModel::key_comparisons())
            .is_err());
    }
}
