//! Tensor networks for circuit amplitudes and their contraction by bucket
//! elimination.
//!
//! A network is built from a circuit with fixed computational-basis states
//! on both ends, so no open indices remain. Every index has dimension 2.
//! Within a tensor, data is row-major over its labels: the first label is
//! the most significant bit of the flat offset.
//!
//! Contraction eliminates one index at a time. All tensors holding the
//! index are multiplied and the index is summed out in a single fused pass,
//! so the largest tensor ever materialized has rank equal to the order's
//! width.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, GateKind, GateMatrix, Wires};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// Default cap on contraction width: the largest intermediate holds
/// `2^27` complex doubles (2 GiB).
pub const DEFAULT_WIDTH_CAP: usize = 27;

/// A computational basis state, wire `w` holding bit `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState(Vec<bool>);

impl BasisState {
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Little-endian: wire `w` takes bit `w` of `index`.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self((0..n).map(|w| w < usize::BITS as usize && (index >> w) & 1 == 1).collect())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, wire: usize) -> bool {
        self.0[wire]
    }

    /// Little-endian basis index; only meaningful for fewer than 64 wires.
    pub fn index(&self) -> usize {
        self.0.iter().enumerate().filter(|(_, b)| **b).map(|(w, _)| 1usize << w).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    labels: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(labels: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if labels.len() >= usize::BITS as usize || data.len() != 1usize << labels.len() {
            return Err(Error::InvalidTensor(format!(
                "{} labels need {} entries, got {}",
                labels.len(),
                1u128 << labels.len().min(127),
                data.len()
            )));
        }
        let distinct: BTreeSet<_> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidTensor(format!("repeated label in {labels:?}")));
        }
        Ok(Self { labels, data })
    }

    pub fn scalar(value: C64) -> Self {
        Self { labels: Vec::new(), data: vec![value] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Fixes the labels for which `fixed` returns a value, dropping them.
    fn slice(&self, fixed: impl Fn(usize) -> Option<bool>) -> Self {
        let rank = self.rank();
        let mut base = 0usize;
        let mut free = Vec::new();
        for (p, &l) in self.labels.iter().enumerate() {
            let stride = 1usize << (rank - 1 - p);
            match fixed(l) {
                Some(true) => base += stride,
                Some(false) => {}
                None => free.push((l, stride)),
            }
        }
        let k = free.len();
        let data = (0..1usize << k)
            .map(|x| {
                let off: usize = free
                    .iter()
                    .enumerate()
                    .filter(|(q, _)| (x >> (k - 1 - q)) & 1 == 1)
                    .map(|(_, (_, s))| s)
                    .sum();
                self.data[base + off]
            })
            .collect();
        Self { labels: free.into_iter().map(|(l, _)| l).collect(), data }
    }
}

/// Tensors over shared labels `0..label_count`, plus the index graph in
/// which each tensor contributes a clique over its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorNetwork {
    tensors: Vec<Tensor>,
    label_count: usize,
    graph: Vec<Vec<usize>>,
}

impl TensorNetwork {
    /// Every label in `0..=max label` must occur in some tensor.
    pub fn new(tensors: Vec<Tensor>) -> Result<Self> {
        let label_count = tensors.iter().flat_map(|t| t.labels.iter()).map(|l| l + 1).max().unwrap_or(0);
        let mut sets = vec![BTreeSet::new(); label_count];
        let mut seen = vec![false; label_count];
        for t in &tensors {
            for &a in &t.labels {
                seen[a] = true;
                for &b in &t.labels {
                    if a != b {
                        sets[a].insert(b);
                    }
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidTensor(format!("label {missing} appears in no tensor")));
        }
        let graph = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self { tensors, label_count, graph })
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    /// Sorted neighbours of `label` in the index graph.
    pub fn neighbors(&self, label: usize) -> &[usize] {
        &self.graph[label]
    }

    pub fn edge_count(&self) -> usize {
        self.graph.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// True when `other` has the same tensors over the same labels.
    pub fn same_structure(&self, other: &TensorNetwork) -> bool {
        self.tensors.len() == other.tensors.len()
            && self.tensors.iter().zip(&other.tensors).all(|(a, b)| a.labels == b.labels)
    }
}

/// Builds the closed network for `⟨output| c |input⟩`.
///
/// Non-diagonal gates create fresh labels for the wires they change. `CZ`
/// and `RotZ` reuse the wire labels, and `CNOT` reuses its control label.
/// Boundary labels are sliced away; a wire whose input and output label
/// coincide with different boundary bits makes the network a zero scalar.
pub fn build_network(c: &Circuit, input: &BasisState, output: &BasisState) -> Result<TensorNetwork> {
    let n = c.qubit_count();
    if input.len() != n || output.len() != n {
        return Err(Error::QubitMismatch { left: n, right: if input.len() != n { input.len() } else { output.len() } });
    }
    let mut fixed: Vec<Option<bool>> = (0..n).map(|w| Some(input.bit(w))).collect();
    let mut wire: Vec<usize> = (0..n).collect();
    let fresh = |fixed: &mut Vec<Option<bool>>| {
        fixed.push(None);
        fixed.len() - 1
    };
    let mut raw = Vec::with_capacity(c.len() + 1);
    for g in c.gates() {
        match (g.matrix(), g.wires()) {
            (GateMatrix::One(m), Wires::One(w)) => {
                if g.is_diagonal() {
                    raw.push(Tensor { labels: vec![wire[w]], data: vec![m[0][0], m[1][1]] });
                } else {
                    let out = fresh(&mut fixed);
                    raw.push(Tensor { labels: vec![out, wire[w]], data: vec![m[0][0], m[0][1], m[1][0], m[1][1]] });
                    wire[w] = out;
                }
            }
            (GateMatrix::Two(m), Wires::Two(a, b)) => match g.kind() {
                GateKind::Cz => {
                    raw.push(Tensor { labels: vec![wire[a], wire[b]], data: vec![m[0][0], m[1][1], m[2][2], m[3][3]] });
                }
                GateKind::Cnot => {
                    let out = fresh(&mut fixed);
                    let mut data = vec![ZERO; 8];
                    for ctl in 0..2 {
                        for to in 0..2 {
                            for ti in 0..2 {
                                data[ctl << 2 | to << 1 | ti] = m[2 * ctl + to][2 * ctl + ti];
                            }
                        }
                    }
                    raw.push(Tensor { labels: vec![wire[a], out, wire[b]], data });
                    wire[b] = out;
                }
                _ => {
                    let oa = fresh(&mut fixed);
                    let ob = fresh(&mut fixed);
                    let data = m.iter().flatten().copied().collect();
                    raw.push(Tensor { labels: vec![oa, ob, wire[a], wire[b]], data });
                    wire[a] = oa;
                    wire[b] = ob;
                }
            },
            _ => unreachable!("circuit validates gate arity"),
        }
    }
    let mut contradiction = false;
    for (w, &l) in wire.iter().enumerate() {
        match fixed[l] {
            Some(bit) if bit != output.bit(w) => contradiction = true,
            _ => fixed[l] = Some(output.bit(w)),
        }
    }
    let mut tensors: Vec<Tensor> = raw.iter().map(|t| t.slice(|l| fixed[l])).collect();
    if contradiction {
        tensors.push(Tensor::scalar(ZERO));
    }
    let mut remap = vec![usize::MAX; fixed.len()];
    let mut next = 0;
    for (l, f) in fixed.iter().enumerate() {
        if f.is_none() {
            remap[l] = next;
            next += 1;
        }
    }
    for t in &mut tensors {
        for l in &mut t.labels {
            *l = remap[*l];
        }
    }
    TensorNetwork::new(tensors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    #[default]
    MinFill,
    MinDegree,
    /// Each label eliminated right after the last tensor that uses it, a
    /// sweep through the circuit in time.
    Sweep,
}

impl Heuristic {
    pub const ALL: [Heuristic; 3] = [Heuristic::MinFill, Heuristic::MinDegree, Heuristic::Sweep];
}

/// A permutation of a network's labels and its contraction width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder {
    order: Vec<usize>,
    width: usize,
    cost: u128,
}

impl EliminationOrder {
    /// Validates `order` as a permutation of `net`'s labels and computes its width.
    pub fn new(net: &TensorNetwork, order: Vec<usize>) -> Result<Self> {
        let m = net.label_count();
        let mut seen = vec![false; m];
        if order.len() != m {
            return Err(Error::InvalidOrder(format!("{} entries for {m} labels", order.len())));
        }
        for &l in &order {
            if l >= m || seen[l] {
                return Err(Error::InvalidOrder(format!("label {l} missing or repeated")));
            }
            seen[l] = true;
        }
        let mut g = BitGraph::from_network(net);
        let (mut width, mut cost) = (0, 0);
        for &v in &order {
            let size = g.eliminate(v);
            width = width.max(size);
            cost += 1u128 << (size + 1).min(127);
        }
        Ok(Self { order, width, cost })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Sum over eliminations of `2^(neighborhood + 1)`, a proxy for work.
    pub fn cost(&self) -> u128 {
        self.cost
    }
}

/// Adjacency bitsets for the fill-in graph.
struct BitGraph {
    words: usize,
    adj: Vec<u64>,
    alive: Vec<u64>,
}

impl BitGraph {
    fn from_network(net: &TensorNetwork) -> Self {
        let m = net.label_count();
        let words = m.div_ceil(64).max(1);
        let mut adj = vec![0u64; m * words];
        for v in 0..m {
            for &u in net.neighbors(v) {
                adj[v * words + u / 64] |= 1 << (u % 64);
            }
        }
        let mut alive = vec![0u64; words];
        for v in 0..m {
            alive[v / 64] |= 1 << (v % 64);
        }
        Self { words, adj, alive }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    fn members(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
        row.iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            core::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + t)
            })
        })
    }

    fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Number of missing edges among the neighbours of `v`.
    fn fill(&self, v: usize) -> usize {
        let nv = self.row(v);
        let mut missing = 0;
        for u in Self::members(nv) {
            let nu = self.row(u);
            for w in 0..self.words {
                let mut others = nv[w] & !nu[w];
                if w == u / 64 {
                    others &= !(1 << (u % 64));
                }
                missing += others.count_ones() as usize;
            }
        }
        missing / 2
    }

    /// Removes `v`, connecting its neighbours; returns its degree.
    fn eliminate(&mut self, v: usize) -> usize {
        let nv: Vec<u64> = self.row(v).to_vec();
        let nbrs: Vec<usize> = Self::members(&nv).collect();
        for &u in &nbrs {
            let row = &mut self.adj[u * self.words..(u + 1) * self.words];
            for (r, b) in row.iter_mut().zip(&nv) {
                *r |= b;
            }
            row[u / 64] &= !(1 << (u % 64));
            row[v / 64] &= !(1 << (v % 64));
        }
        self.adj[v * self.words..(v + 1) * self.words].fill(0);
        self.alive[v / 64] &= !(1 << (v % 64));
        nbrs.len()
    }
}

/// Elimination order for `net`. The greedy heuristics break ties toward
/// the smallest label.
pub fn order_indices(net: &TensorNetwork, heuristic: Heuristic) -> EliminationOrder {
    let m = net.label_count();
    if heuristic == Heuristic::Sweep {
        let mut last = vec![0; m];
        for (i, t) in net.tensors.iter().enumerate() {
            for &l in &t.labels {
                last[l] = i;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&l| (last[l], l));
        return EliminationOrder::new(net, order).expect("permutation of labels");
    }
    let mut g = BitGraph::from_network(net);
    let score = |g: &BitGraph, v: usize| match heuristic {
        Heuristic::MinFill => (g.fill(v), g.degree(v)),
        _ => (g.degree(v), 0),
    };
    let mut scores: Vec<(usize, usize)> = (0..m).map(|v| score(&g, v)).collect();
    let mut eliminated = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let (mut width, mut cost) = (0, 0);
    for _ in 0..m {
        let v = (0..m).filter(|&v| !eliminated[v]).min_by_key(|&v| (scores[v], v)).expect("labels remain");
        let nv: Vec<u64> = g.row(v).to_vec();
        let size = g.eliminate(v);
        width = width.max(size);
        cost += 1u128 << (size + 1).min(127);
        eliminated[v] = true;
        order.push(v);
        // scores can only change within distance two of v
        let mut touched = nv.clone();
        if heuristic == Heuristic::MinFill {
            for u in BitGraph::members(&nv) {
                for (t, b) in touched.iter_mut().zip(g.row(u)) {
                    *t |= b;
                }
            }
        }
        for u in BitGraph::members(&touched) {
            if !eliminated[u] {
                scores[u] = score(&g, u);
            }
        }
    }
    EliminationOrder { order, width, cost }
}

#[derive(Debug, Clone)]
struct StepInput {
    slot: usize,
    lo_table: Vec<usize>,
    hi_table: Vec<usize>,
    sum_stride: usize,
}

#[derive(Debug, Clone)]
struct Step {
    inputs: Vec<StepInput>,
    rank: usize,
    lo_bits: usize,
}

/// Precomputed bucket-elimination schedule for one network structure.
///
/// The plan depends only on which labels each tensor carries, so one plan
/// serves every network with the same structure.
#[derive(Debug, Clone)]
pub struct ContractionPlan {
    labels: Vec<Vec<usize>>,
    steps: Vec<Step>,
    scalars: Vec<usize>,
    width: usize,
    flops: f64,
}

impl ContractionPlan {
    pub fn new(net: &TensorNetwork, order: &EliminationOrder, width_cap: usize) -> Result<Self> {
        if order.order.len() != net.label_count() {
            return Err(Error::InvalidOrder("order does not cover the network".into()));
        }
        if order.width > width_cap {
            return Err(Error::WidthCapExceeded { width: order.width, cap: width_cap });
        }
        let t = net.tensors.len();
        let mut active: Vec<(usize, Vec<usize>)> =
            net.tensors.iter().enumerate().map(|(i, x)| (i, x.labels.clone())).collect();
        let mut steps = Vec::with_capacity(order.order.len());
        let mut width = 0;
        let mut flops = 0.0;
        for &v in &order.order {
            let (bucket, rest): (Vec<_>, Vec<_>) = active.into_iter().partition(|(_, ls)| ls.contains(&v));
            active = rest;
            let result: Vec<usize> = bucket
                .iter()
                .flat_map(|(_, ls)| ls.iter().copied())
                .filter(|&l| l != v)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let rank = result.len();
            if rank > width_cap {
                return Err(Error::WidthCapExceeded { width: rank, cap: width_cap });
            }
            width = width.max(rank);
            flops += (1u64 << (rank + 1)) as f64 * bucket.len() as f64;
            let lo_bits = rank.div_ceil(2);
            let inputs = bucket
                .iter()
                .map(|(slot, ls)| {
                    let r = ls.len();
                    let stride = |label: usize| ls.iter().position(|&x| x == label).map_or(0, |p| 1usize << (r - 1 - p));
                    // result bit b (0 = least significant) carries label result[rank - 1 - b]
                    let bit_stride: Vec<usize> = (0..rank).map(|b| stride(result[rank - 1 - b])).collect();
                    let table = |bits: core::ops::Range<usize>| -> Vec<usize> {
                        let width = bits.len();
                        (0..1usize << width)
                            .map(|x| (0..width).filter(|i| (x >> i) & 1 == 1).map(|i| bit_stride[bits.start + i]).sum())
                            .collect()
                    };
                    StepInput {
                        slot: *slot,
                        lo_table: table(0..lo_bits),
                        hi_table: table(lo_bits..rank),
                        sum_stride: stride(v),
                    }
                })
                .collect();
            steps.push(Step { inputs, rank, lo_bits });
            active.push((t + steps.len() - 1, result));
        }
        debug_assert!(active.iter().all(|(_, ls)| ls.is_empty()));
        let scalars = active.into_iter().map(|(slot, _)| slot).collect();
        let labels = net.tensors.iter().map(|x| x.labels.clone()).collect();
        Ok(Self { labels, steps, scalars, width, flops })
    }

    /// Largest intermediate rank.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Complex multiply-adds, counted as `2^(rank+1)` per bucket member per step.
    pub fn flops(&self) -> f64 {
        self.flops
    }

    pub fn matches(&self, net: &TensorNetwork) -> bool {
        self.labels.len() == net.tensors.len() && self.labels.iter().zip(&net.tensors).all(|(a, t)| *a == t.labels)
    }

    pub fn execute(&self, net: &TensorNetwork) -> Result<C64> {
        if !self.matches(net) {
            return Err(Error::InvalidOrder("plan was built for a different network structure".into()));
        }
        let t = net.tensors.len();
        let mut results: Vec<Vec<C64>> = Vec::with_capacity(self.steps.len());
        let mut base = Vec::new();
        for step in &self.steps {
            let mut out = vec![ZERO; 1usize << step.rank];
            {
                let data: Vec<&[C64]> = step
                    .inputs
                    .iter()
                    .map(|i| if i.slot < t { net.tensors[i.slot].data.as_slice() } else { results[i.slot - t].as_slice() })
                    .collect();
                let nlo = 1usize << step.lo_bits;
                let nhi = 1usize << (step.rank - step.lo_bits);
                for hi in 0..nhi {
                    base.clear();
                    base.extend(step.inputs.iter().map(|i| i.hi_table[hi]));
                    let chunk = &mut out[hi * nlo..(hi + 1) * nlo];
                    match step.inputs.len() {
                        1 => {
                            let (d, inp, b) = (data[0], &step.inputs[0], base[0]);
                            for (lo, o) in chunk.iter_mut().enumerate() {
                                let k = b + inp.lo_table[lo];
                                *o = d[k] + d[k + inp.sum_stride];
                            }
                        }
                        2 => {
                            let (d0, d1) = (data[0], data[1]);
                            let (i0, i1) = (&step.inputs[0], &step.inputs[1]);
                            for (lo, o) in chunk.iter_mut().enumerate() {
                                let k0 = base[0] + i0.lo_table[lo];
                                let k1 = base[1] + i1.lo_table[lo];
                                *o = d0[k0] * d1[k1] + d0[k0 + i0.sum_stride] * d1[k1 + i1.sum_stride];
                            }
                        }
                        _ => {
                            for (lo, o) in chunk.iter_mut().enumerate() {
                                let mut p0 = ONE;
                                let mut p1 = ONE;
                                for (j, inp) in step.inputs.iter().enumerate() {
                                    let k = base[j] + inp.lo_table[lo];
                                    p0 *= data[j][k];
                                    p1 *= data[j][k + inp.sum_stride];
                                }
                                *o = p0 + p1;
                            }
                        }
                    }
                }
            }
            for i in &step.inputs {
                if i.slot >= t {
                    results[i.slot - t] = Vec::new();
                }
            }
            results.push(out);
        }
        Ok(self
            .scalars
            .iter()
            .map(|&s| if s < t { net.tensors[s].data[0] } else { results[s - t][0] })
            .product())
    }
}

/// Contracts `net` along `order`, refusing when the order's width exceeds
/// `width_cap`.
pub fn contract_amplitude(net: &TensorNetwork, order: &EliminationOrder, width_cap: usize) -> Result<C64> {
    ContractionPlan::new(net, order, width_cap)?.execute(net)
}

/// Cheapest order among all heuristics.
pub fn best_order(net: &TensorNetwork) -> EliminationOrder {
    Heuristic::ALL
        .iter()
        .map(|&h| order_indices(net, h))
        .min_by_key(|o| (o.cost, o.width))
        .expect("nonempty heuristic list")
}

/// Contracts many networks, reusing the last plan while the structure is
/// unchanged. Without an explicit heuristic it takes the cheapest order
/// among all of them.
#[derive(Debug, Clone)]
pub struct Contractor {
    heuristic: Option<Heuristic>,
    width_cap: usize,
    cached: Option<ContractionPlan>,
}

impl Default for Contractor {
    fn default() -> Self {
        Self::new(DEFAULT_WIDTH_CAP)
    }
}

impl Contractor {
    pub fn new(width_cap: usize) -> Self {
        Self { heuristic: None, width_cap, cached: None }
    }

    pub fn with_heuristic(mut self, heuristic: Heuristic) -> Self {
        self.heuristic = Some(heuristic);
        self
    }

    pub fn width_cap(&self) -> usize {
        self.width_cap
    }

    /// The plan for `net`, rebuilt only when the structure changed.
    pub fn plan(&mut self, net: &TensorNetwork) -> Result<&ContractionPlan> {
        let reuse = self.cached.as_ref().is_some_and(|p| p.matches(net));
        if !reuse {
            let order = match self.heuristic {
                Some(h) => order_indices(net, h),
                None => best_order(net),
            };
            self.cached = Some(ContractionPlan::new(net, &order, self.width_cap)?);
        }
        Ok(self.cached.as_ref().expect("plan just built"))
    }

    pub fn amplitude(&mut self, net: &TensorNetwork) -> Result<C64> {
        self.plan(net)?.execute(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{EnsembleSpec, Entangler, Gate};
    use crate::oracle::dense_amplitude;
    use core::f64::consts::FRAC_1_SQRT_2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn amp(c: &Circuit, input: &BasisState, output: &BasisState) -> C64 {
        let net = build_network(c, input, output).unwrap();
        let order = order_indices(&net, Heuristic::MinFill);
        contract_amplitude(&net, &order, DEFAULT_WIDTH_CAP).unwrap()
    }

    fn graph_of(edges: &[(usize, usize)], m: usize) -> TensorNetwork {
        let mut tensors: Vec<Tensor> =
            edges.iter().map(|&(a, b)| Tensor::new(vec![a, b], vec![ONE; 4]).unwrap()).collect();
        for l in 0..m {
            tensors.push(Tensor::new(vec![l], vec![ONE; 2]).unwrap());
        }
        TensorNetwork::new(tensors).unwrap()
    }

    #[test]
    fn empty_circuit_contracts_to_one() {
        let c = Circuit::new(4).unwrap();
        let z = BasisState::zeros(4);
        let net = build_network(&c, &z, &z).unwrap();
        assert_eq!(net.label_count(), 0);
        assert_eq!(amp(&c, &z, &z), ONE);
        assert_eq!(amp(&c, &z, &BasisState::from_index(4, 2)), ZERO);
    }

    #[test]
    fn hadamard_and_bell_amplitudes() {
        let mut c = Circuit::new(1).unwrap();
        c.push(Gate::hadamard(0)).unwrap();
        let z = BasisState::zeros(1);
        assert!((amp(&c, &z, &z) - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let mut bell = Circuit::new(2).unwrap();
        bell.push(Gate::hadamard(0)).unwrap();
        bell.push(Gate::cnot(0, 1)).unwrap();
        let z = BasisState::zeros(2);
        assert!((amp(&bell, &z, &z) - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_gates_reuse_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = EnsembleSpec::hardware_efficient(6, 3, Entangler::Cnot);
        let cnot = spec.sample(&mut rng).unwrap();
        let mut cz = Circuit::new(6).unwrap();
        for g in cnot.gates() {
            match (g.kind(), g.wires()) {
                (GateKind::Cnot, Wires::Two(a, b)) => cz.push(Gate::cz(a, b)).unwrap(),
                _ => cz.push(g.clone()).unwrap(),
            }
        }
        let z = BasisState::zeros(6);
        let a = build_network(&cnot, &z, &z).unwrap();
        let b = build_network(&cz, &z, &z).unwrap();
        assert!(b.label_count() < a.label_count());
    }

    #[test]
    fn edgeless_and_triangle_widths() {
        let net = graph_of(&[], 4);
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            let o = order_indices(&net, h);
            assert_eq!(o.width(), 0);
            assert_eq!(o.order(), [0, 1, 2, 3]);
        }
        let tri = graph_of(&[(0, 1), (1, 2), (0, 2)], 3);
        // every one of the 6 orders of a triangle has width 2
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            assert_eq!(EliminationOrder::new(&tri, p.to_vec()).unwrap().width(), 2);
        }
        for h in [Heuristic::MinFill, Heuristic::MinDegree] {
            assert_eq!(order_indices(&tri, h).width(), 2);
        }
    }

    #[test]
    fn min_fill_beats_bad_order_on_path() {
        // eliminating the middle of a path first creates fill
        let path = graph_of(&[(0, 1), (1, 2), (2, 3), (3, 4)], 5);
        assert_eq!(order_indices(&path, Heuristic::MinFill).width(), 1);
        assert_eq!(EliminationOrder::new(&path, vec![2, 1, 3, 0, 4]).unwrap().width(), 2);
    }

    #[test]
    fn invalid_orders_rejected() {
        let tri = graph_of(&[(0, 1), (1, 2), (0, 2)], 3);
        assert!(EliminationOrder::new(&tri, vec![0, 1]).is_err());
        assert!(EliminationOrder::new(&tri, vec![0, 1, 1]).is_err());
        assert!(EliminationOrder::new(&tri, vec![0, 1, 3]).is_err());
    }

    #[test]
    fn width_cap_refuses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = EnsembleSpec::parallel(6, 4).sample(&mut rng).unwrap();
        let z = BasisState::zeros(6);
        let net = build_network(&c, &z, &z).unwrap();
        let order = order_indices(&net, Heuristic::MinFill);
        assert!(order.width() > 2);
        assert_eq!(
            contract_amplitude(&net, &order, 2),
            Err(Error::WidthCapExceeded { width: order.width(), cap: 2 })
        );
    }

    #[test]
    fn plan_width_equals_order_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [EnsembleSpec::parallel(5, 4), EnsembleSpec::local(5, 9), EnsembleSpec::hardware_efficient(4, 3, Entangler::Cz)] {
            let c = spec.sample(&mut rng).unwrap();
            let z = BasisState::zeros(spec.qubits);
            let net = build_network(&c, &z, &z).unwrap();
            for h in Heuristic::ALL {
                let order = order_indices(&net, h);
                let plan = ContractionPlan::new(&net, &order, 64).unwrap();
                assert_eq!(plan.width(), order.width());
            }
        }
    }

    #[test]
    fn random_boundaries_match_statevector() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for spec in [EnsembleSpec::parallel(4, 3), EnsembleSpec::local(4, 6), EnsembleSpec::hardware_efficient(4, 2, Entangler::Cz)] {
            for _ in 0..10 {
                let c = spec.sample(&mut rng).unwrap();
                let i = BasisState::from_index(4, rng.gen_range(0..16));
                let o = BasisState::from_index(4, rng.gen_range(0..16));
                let d = dense_amplitude(&c, &i, &o).unwrap();
                assert!((amp(&c, &i, &o) - d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn contractor_reuses_plan_for_fixed_topology() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = EnsembleSpec::parallel(4, 3);
        let z = BasisState::zeros(4);
        let mut contractor = Contractor::default();
        let a = build_network(&spec.sample(&mut rng).unwrap(), &z, &z).unwrap();
        let b = build_network(&spec.sample(&mut rng).unwrap(), &z, &z).unwrap();
        assert!(a.same_structure(&b));
        contractor.amplitude(&a).unwrap();
        let plan = contractor.plan(&b).unwrap().clone();
        assert!(plan.matches(&a));
    }

    #[test]
    fn best_order_is_no_worse_than_any_heuristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = EnsembleSpec::parallel(6, 10);
        let u = spec.sample(&mut rng).unwrap();
        let v = spec.sample(&mut rng).unwrap();
        let t = crate::circuit::build_trace_circuit(&u, &v).unwrap();
        let z = BasisState::zeros(12);
        let net = build_network(&t, &z, &z).unwrap();
        let best = best_order(&net);
        for h in Heuristic::ALL {
            assert!(best.cost() <= order_indices(&net, h).cost());
        }
        // a time sweep never holds more than the live wires plus a gate's fan-in
        assert!(order_indices(&net, Heuristic::Sweep).width() <= 12 + 2);
    }

    #[test]
    fn tensor_validation() {
        assert!(Tensor::new(vec![0, 0], vec![ONE; 4]).is_err());
        assert!(Tensor::new(vec![0, 1], vec![ONE; 3]).is_err());
        assert!(TensorNetwork::new(vec![Tensor::new(vec![0, 2], vec![ONE; 4]).unwrap()]).is_err());
    }
}
