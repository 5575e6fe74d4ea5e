//! Optimal Lattice Anonymisation.
//!
//! A lattice node is feasible when, after generalising every k-quasi to the
//! node's levels and suppressing all records that fall in classes smaller
//! than `k`, the suppressed fraction is within the budget. Feasibility is
//! monotone (coarser nodes merge classes, so they never suppress more), which
//! lets the search binary-search lattice heights and tag whole up-sets and
//! down-sets without evaluating them. The returned node minimises average
//! categorical precision loss; ties go to the lower node, then to the
//! lexicographically smaller level vector.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_rational::Ratio;

use super::{check_k, Algorithm, EquivalenceClass, KeyPart, Partition};
use crate::dataset::{AttributeClassification, Dataset};
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, Lattice, LatticeNode};
use crate::Scalar;

/// Average categorical precision loss of `node` as an exact fraction.
/// Attributes with a single level never generalise and contribute zero.
pub fn ola_loss_exact(node: &LatticeNode, level_counts: &[usize]) -> Ratio<u64> {
    let sum = node
        .levels
        .iter()
        .zip(level_counts)
        .filter(|(_, &h)| h >= 2)
        .fold(Ratio::from_integer(0u64), |acc, (&l, &h)| {
            acc + Ratio::new(l as u64, (h - 1) as u64)
        });
    sum / Ratio::from_integer(level_counts.len() as u64)
}

/// Search state over one dataset. Exposed so callers can inspect how many
/// nodes were actually evaluated.
pub struct OlaSearch {
    lattice: Lattice,
    /// `codes[a][l][row]`: token id of row at level `l` of attribute `a`.
    codes: Vec<Vec<Vec<u32>>>,
    tokens: Vec<Vec<Vec<String>>>,
    n: usize,
    k: usize,
    max_supp: f64,
    cache: HashMap<LatticeNode, usize>,
    feasible_tags: Vec<LatticeNode>,
    infeasible_tags: Vec<LatticeNode>,
    visited: HashSet<(LatticeNode, LatticeNode)>,
}

impl OlaSearch {
    pub fn new<T: Scalar>(
        ds: &Dataset<T>,
        cls: &AttributeClassification,
        hiers: &[Hierarchy],
        k: usize,
        max_supp: f64,
    ) -> Result<Self> {
        check_k(k, ds.n())?;
        if !(0.0..=1.0).contains(&max_supp) {
            return Err(Error::Parameter(format!(
                "suppression budget {max_supp} outside [0, 1]"
            )));
        }
        let quasis = cls.k_quasis(ds.schema());
        if quasis.is_empty() {
            return Err(Error::Classification("no k-quasi column".into()));
        }
        let mut used = Vec::with_capacity(quasis.len());
        for q in &quasis {
            let h = hiers
                .iter()
                .find(|h| h.attribute() == *q)
                .ok_or_else(|| Error::Config(format!("k-quasi `{q}` has no hierarchy")))?;
            used.push(h);
        }
        let lattice = Lattice::from_hierarchies(&used.iter().map(|h| (*h).clone()).collect::<Vec<_>>())?;

        let mut codes = Vec::with_capacity(quasis.len());
        let mut tokens = Vec::with_capacity(quasis.len());
        for (q, h) in quasis.iter().zip(&used) {
            let col = ds.column_index(q)?;
            let raw: Vec<String> = (0..ds.n()).map(|i| ds.text(i, col)).collect();
            let mut per_level = Vec::with_capacity(h.levels());
            let mut tok_level = Vec::with_capacity(h.levels());
            for l in 0..h.levels() {
                let mut ids: HashMap<String, u32> = HashMap::new();
                let mut names = Vec::new();
                let mut col_codes = Vec::with_capacity(ds.n());
                for v in &raw {
                    let t = h.generalise(v, l)?;
                    let next = ids.len() as u32;
                    let id = *ids.entry(t.clone()).or_insert_with(|| {
                        names.push(t);
                        next
                    });
                    col_codes.push(id);
                }
                per_level.push(col_codes);
                tok_level.push(names);
            }
            codes.push(per_level);
            tokens.push(tok_level);
        }

        Ok(OlaSearch {
            lattice,
            codes,
            tokens,
            n: ds.n(),
            k,
            max_supp,
            cache: HashMap::new(),
            feasible_tags: Vec::new(),
            infeasible_tags: Vec::new(),
            visited: HashSet::new(),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Number of nodes whose class structure was actually computed.
    pub fn evaluated(&self) -> usize {
        self.cache.len()
    }

    fn row_key(&self, node: &LatticeNode, row: usize) -> Vec<u32> {
        node.levels
            .iter()
            .enumerate()
            .map(|(a, &l)| self.codes[a][l][row])
            .collect()
    }

    fn class_sizes(&self, node: &LatticeNode) -> HashMap<Vec<u32>, usize> {
        let mut sizes: HashMap<Vec<u32>, usize> = HashMap::new();
        for row in 0..self.n {
            *sizes.entry(self.row_key(node, row)).or_default() += 1;
        }
        sizes
    }

    /// Records suppressed at `node`.
    pub fn suppressed_at(&mut self, node: &LatticeNode) -> usize {
        if let Some(&s) = self.cache.get(node) {
            return s;
        }
        let s = self
            .class_sizes(node)
            .values()
            .filter(|&&m| m < self.k)
            .sum();
        self.cache.insert(node.clone(), s);
        s
    }

    fn within_budget(&self, suppressed: usize) -> bool {
        suppressed as f64 / self.n as f64 <= self.max_supp
    }

    fn tagged_feasible(&self, node: &LatticeNode) -> bool {
        self.feasible_tags.iter().any(|f| f.generalised_by(node))
    }

    fn tagged_infeasible(&self, node: &LatticeNode) -> bool {
        self.infeasible_tags.iter().any(|g| node.generalised_by(g))
    }

    fn is_feasible(&mut self, node: &LatticeNode) -> bool {
        if self.tagged_feasible(node) {
            return true;
        }
        if self.tagged_infeasible(node) {
            return false;
        }
        let s = self.suppressed_at(node);
        let ok = self.within_budget(s);
        if ok {
            self.feasible_tags.push(node.clone());
        } else {
            self.infeasible_tags.push(node.clone());
        }
        ok
    }

    /// Collects every minimal feasible node of the sublattice `[bottom, top]`
    /// (plus possibly some non-minimal ones). `top` must be feasible.
    fn kmin(&mut self, bottom: &LatticeNode, top: &LatticeNode, found: &mut BTreeSet<LatticeNode>) {
        if !self.visited.insert((bottom.clone(), top.clone())) {
            return;
        }
        let span = top.height() - bottom.height();
        if span > 1 {
            let mid = bottom.height() + span / 2;
            for node in self.lattice.nodes_between(bottom, top, mid) {
                if self.is_feasible(&node) {
                    self.kmin(bottom, &node, found);
                } else {
                    self.kmin(&node, top, found);
                }
            }
        } else if span == 1 {
            if self.is_feasible(bottom) {
                found.insert(bottom.clone());
            } else {
                found.insert(top.clone());
            }
        } else if self.is_feasible(bottom) {
            found.insert(bottom.clone());
        }
    }

    /// Minimal feasible nodes of the whole lattice.
    pub fn k_minimal(&mut self) -> Vec<LatticeNode> {
        let (bottom, top) = (self.lattice.bottom(), self.lattice.top());
        let mut found = BTreeSet::new();
        if self.is_feasible(&top) {
            self.kmin(&bottom, &top, &mut found);
        }
        let all: Vec<LatticeNode> = found.into_iter().collect();
        all.iter()
            .filter(|n| !all.iter().any(|m| m != *n && m.generalised_by(n)))
            .cloned()
            .collect()
    }

    pub fn optimal_node(&mut self) -> Option<LatticeNode> {
        let counts = self.lattice.level_counts().to_vec();
        self.k_minimal()
            .into_iter()
            .min_by(|a, b| {
                ola_loss_exact(a, &counts)
                    .cmp(&ola_loss_exact(b, &counts))
                    .then(a.height().cmp(&b.height()))
                    .then(a.levels.cmp(&b.levels))
            })
    }

    /// Partition at `node`; rows are reported through `source`.
    pub fn partition_at<T: Scalar>(
        &self,
        node: &LatticeNode,
        source: &[usize],
        attributes: Vec<String>,
    ) -> Partition<T> {
        let mut order: Vec<Vec<u32>> = Vec::new();
        let mut groups: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (row, &src) in source.iter().enumerate().take(self.n) {
            let key = self.row_key(node, row);
            let g = groups.entry(key.clone()).or_default();
            if g.is_empty() {
                order.push(key);
            }
            g.push(src);
        }
        let mut classes = Vec::new();
        let mut suppressed = Vec::new();
        for key in order {
            let members = groups.remove(&key).expect("grouped key");
            if members.len() >= self.k {
                let parts = key
                    .iter()
                    .enumerate()
                    .map(|(a, &id)| KeyPart::Token(self.tokens[a][node.levels[a]][id as usize].clone()))
                    .collect();
                classes.push(EquivalenceClass { key: parts, members });
            } else {
                suppressed.extend(members);
            }
        }
        suppressed.sort_unstable();
        Partition {
            classes,
            suppressed,
            k: self.k,
            algorithm: Algorithm::Ola,
            node: Some(node.clone()),
            attributes,
        }
    }
}

/// Globally recodes the k-quasis of `ds` to the optimal feasible lattice
/// node. `hiers` must contain a hierarchy for every k-quasi (matched by
/// attribute name).
pub fn ola_anonymise<T: Scalar>(
    ds: &Dataset<T>,
    cls: &AttributeClassification,
    hiers: &[Hierarchy],
    k: usize,
    max_supp: f64,
) -> Result<Partition<T>> {
    let mut search = OlaSearch::new(ds, cls, hiers, k, max_supp)?;
    let node = search
        .optimal_node()
        .ok_or(Error::NoFeasibleNode { k, max_suppression: max_supp })?;
    let attributes = cls
        .k_quasis(ds.schema())
        .into_iter()
        .map(str::to_string)
        .collect();
    Ok(search.partition_at(&node, ds.source_indices(), attributes))
}
