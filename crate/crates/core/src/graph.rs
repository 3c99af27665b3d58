//! Threshold network model: hidden-variable sampling, creation sequences and
//! the level/block structure of the resulting threshold graph.
//!
//! Vertices are addressed by *canonical position* everywhere outside this
//! module. The canonical order is the order in which the creation procedure
//! removes vertices: descending level, and inside a level the independent
//! block `V_i^(0)` precedes the clique block `V_i^(1)`. For a binary graph this
//! puts the clique first and the independent set after it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this size the pairwise adjacency cross-check at construction is
/// skipped; the O(n log n) degree check still runs.
const PAIRWISE_CHECK_LIMIT: usize = 2048;

/// Law of the hidden variables `X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HiddenDistribution {
    Bernoulli { p: f64 },
    Uniform { low: f64, high: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenVariableConfig {
    pub n: usize,
    pub distribution: HiddenDistribution,
    pub theta: f64,
    pub seed: u64,
}

impl HiddenVariableConfig {
    /// Binary threshold model `G_n(p)` with threshold 1/2.
    pub fn binary(n: usize, p: f64, seed: u64) -> Self {
        Self {
            n,
            distribution: HiddenDistribution::Bernoulli { p },
            theta: 0.5,
            seed,
        }
    }

    pub fn explicit(values: Vec<f64>, theta: f64) -> Self {
        Self {
            n: values.len(),
            distribution: HiddenDistribution::Explicit { values },
            theta,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("need n >= 2, got {}", self.n)));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("threshold must be finite".into()));
        }
        match &self.distribution {
            HiddenDistribution::Bernoulli { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::Config(format!(
                        "bernoulli p must lie in (0,1), got {p}"
                    )));
                }
            }
            HiddenDistribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::Config(format!(
                        "uniform bounds must be finite with low < high, got ({low}, {high})"
                    )));
                }
            }
            HiddenDistribution::Explicit { values } => {
                if values.len() != self.n {
                    return Err(Error::Config(format!(
                        "explicit sample list has length {}, expected n = {}",
                        values.len(),
                        self.n
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("explicit samples must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Draw the hidden values. Deterministic in `seed`.
    pub fn sample(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(match &self.distribution {
            HiddenDistribution::Bernoulli { p } => (0..self.n)
                .map(|_| if rng.gen_bool(*p) { 1.0 } else { 0.0 })
                .collect(),
            HiddenDistribution::Uniform { low, high } => {
                (0..self.n).map(|_| rng.gen_range(*low..*high)).collect()
            }
            HiddenDistribution::Explicit { values } => values.clone(),
        })
    }
}

/// Which half of a level a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    /// `V_i^(1)`: creation bit 1, a clique joined to everything created before it.
    Clique,
    /// `V_i^(0)`: creation bit 0, isolated from everything created before it.
    Independent,
}

impl Part {
    pub fn bit(self) -> u8 {
        match self {
            Part::Clique => 1,
            Part::Independent => 0,
        }
    }
}

/// Run lengths `(k_i, l_i)` of a creation sequence together with the common
/// degrees `D_{k_i}`, `D_{l_i}` of each block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    pub degrees_k: Vec<usize>,
    pub degrees_l: Vec<usize>,
}

impl BlockStructure {
    /// Build from run lengths, enforcing the creation-sequence shape rules.
    pub fn from_runs(k: Vec<usize>, l: Vec<usize>) -> Result<Self> {
        let m = k.len();
        if m == 0 || l.len() != m {
            return Err(Error::Config(format!(
                "run length vectors must be non-empty and equal in length (k: {}, l: {})",
                k.len(),
                l.len()
            )));
        }
        if k[1..].contains(&0) || l[..m - 1].contains(&0) {
            return Err(Error::Config(
                "interior runs must be non-empty (k_2..k_m >= 1, l_1..l_{m-1} >= 1)".into(),
            ));
        }
        let case_a = k[0] == 0 && l[0] >= 2;
        let case_b = k[0] >= 2;
        if !(case_a || case_b) {
            return Err(Error::Config(format!(
                "first level must have k_1 = 0 with l_1 >= 2, or k_1 >= 2 (got k_1 = {}, l_1 = {})",
                k[0], l[0]
            )));
        }
        let (degrees_k, degrees_l) = block_degrees(&k, &l);
        Ok(Self {
            k,
            l,
            degrees_k,
            degrees_l,
        })
    }

    pub fn from_creation_sequence(bits: &[u8]) -> Result<Self> {
        if bits.len() < 2 {
            return Err(Error::Argument(
                "creation sequence needs at least 2 bits".into(),
            ));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Argument("creation sequence must be binary".into()));
        }
        if bits[0] != bits[1] {
            return Err(Error::Argument(
                "creation sequence must satisfy s_1 = s_2".into(),
            ));
        }
        let mut k = Vec::new();
        let mut l = Vec::new();
        let mut i = 0;
        while i < bits.len() {
            let start = i;
            while i < bits.len() && bits[i] == 1 {
                i += 1;
            }
            k.push(i - start);
            let start = i;
            while i < bits.len() && bits[i] == 0 {
                i += 1;
            }
            l.push(i - start);
        }
        Self::from_runs(k, l)
    }

    pub fn to_creation_sequence(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(self.n());
        for (&ki, &li) in self.k.iter().zip(&self.l) {
            bits.extend(std::iter::repeat_n(1, ki));
            bits.extend(std::iter::repeat_n(0, li));
        }
        bits
    }

    /// Number of levels `m`.
    pub fn levels(&self) -> usize {
        self.k.len()
    }

    pub fn n(&self) -> usize {
        self.k.iter().sum::<usize>() + self.l.iter().sum::<usize>()
    }

    /// `u_i`: number of vertices in levels above `i` (0-based level index).
    pub fn above(&self, level: usize) -> usize {
        (level + 1..self.levels())
            .map(|j| self.k[j] + self.l[j])
            .sum()
    }

    /// `d_i`: number of vertices in levels below `i` (0-based level index).
    pub fn below(&self, level: usize) -> usize {
        (0..level).map(|j| self.k[j] + self.l[j]).sum()
    }

    /// Threshold graphs are connected iff the last creation bit is 1.
    pub fn is_connected(&self) -> bool {
        let m = self.levels();
        self.l[m - 1] == 0 && self.k[m - 1] >= 1
    }

    /// Check the degree/run-length relations
    /// `k_1 = D_{k_1} - D_{l_1} + 1`, `k_i = D_{l_{i-1}} - D_{l_i}`,
    /// `l_i = D_{k_{i+1}} - D_{k_i}`, and `D_{k_m} = n - 1`, `D_{l_m} = 0` when connected.
    pub fn check_relations(&self) -> Result<()> {
        let m = self.levels();
        let (dk, dl) = (&self.degrees_k, &self.degrees_l);
        let fail = |what: String| Err(Error::Consistency(what));
        if self.k[0] != 0 && self.k[0] + dl[0] != dk[0] + 1 {
            return fail(format!(
                "k_1 = {} but D_k1 - D_l1 + 1 = {}",
                self.k[0],
                dk[0] + 1 - dl[0]
            ));
        }
        for i in 1..m {
            if dl[i - 1] != dl[i] + self.k[i] {
                return fail(format!("k_{} does not match D_l differences", i + 1));
            }
        }
        for i in 0..m - 1 {
            if dk[i + 1] != dk[i] + self.l[i] {
                return fail(format!("l_{} does not match D_k differences", i + 1));
            }
        }
        if self.is_connected() && (dk[m - 1] != self.n() - 1 || dl[m - 1] != 0) {
            return fail("connected graph must have D_km = n - 1 and D_lm = 0".into());
        }
        Ok(())
    }
}

/// Common degrees of the clique and independent blocks of every level:
/// `D_{k_i} = (sum_j k_j) - 1 + sum_{j<i} l_j` and `D_{l_i} = sum_{j>i} k_j`.
///
/// The clique degree of an empty block (`k_1 = 0`) is formal; it saturates
/// at zero when the graph has no clique vertex at all.
pub fn block_degrees(k: &[usize], l: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let total_k: usize = k.iter().sum();
    let mut degrees_k = Vec::with_capacity(k.len());
    let mut l_below = 0;
    for &li in l {
        degrees_k.push((total_k + l_below).saturating_sub(1));
        l_below += li;
    }
    let mut degrees_l = vec![0; k.len()];
    let mut k_above = 0;
    for i in (0..k.len()).rev() {
        degrees_l[i] = k_above;
        k_above += k[i];
    }
    (degrees_k, degrees_l)
}

/// Creation sequence `s_1..s_n` (returned 0-indexed) of the threshold graph
/// on hidden values `x` with threshold `theta`.
pub fn creation_sequence(x: &[f64], theta: f64) -> Result<Vec<u8>> {
    if x.len() < 2 {
        return Err(Error::Argument(format!(
            "creation sequence needs at least 2 values, got {}",
            x.len()
        )));
    }
    Ok(removal_order(x, theta).0)
}

/// Run the removal procedure. Returns the bits indexed by creation index and
/// the original vertex assigned to each creation index. Ties in the sort are
/// broken by original index.
fn removal_order(x: &[f64], theta: f64) -> (Vec<u8>, Vec<usize>) {
    let n = x.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let (mut lo, mut hi) = (0, n - 1);
    let mut bits = vec![0u8; n];
    let mut vertex = vec![0usize; n];
    for j in (1..n).rev() {
        if x[sorted[lo]] + x[sorted[hi]] > theta {
            bits[j] = 1;
            vertex[j] = sorted[hi];
            hi -= 1;
        } else {
            vertex[j] = sorted[lo];
            lo += 1;
        }
    }
    vertex[0] = sorted[lo];
    bits[0] = bits[1];
    (bits, vertex)
}

/// A maximal run of the creation sequence, laid out contiguously in the
/// canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// 0-based level index (`i - 1` in the usual 1-based labelling).
    pub level: usize,
    pub part: Part,
    pub start: usize,
    pub len: usize,
    pub degree: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.range().contains(&pos)
    }
}

/// One realization of the threshold network model.
#[derive(Debug, Clone)]
pub struct ThresholdGraph {
    config: HiddenVariableConfig,
    x: Vec<f64>,
    blocks: BlockStructure,
    position_of: Vec<usize>,
    vertex_at: Vec<usize>,
    layout: Vec<Block>,
    block_at: Vec<usize>,
}

/// Sample a threshold graph from its hidden-variable configuration.
pub fn generate(config: &HiddenVariableConfig) -> Result<ThresholdGraph> {
    ThresholdGraph::generate(config)
}

impl ThresholdGraph {
    pub fn generate(config: &HiddenVariableConfig) -> Result<Self> {
        let x = config.sample()?;
        let n = x.len();
        let (bits, vertex_by_creation) = removal_order(&x, config.theta);
        let blocks = BlockStructure::from_creation_sequence(&bits)?;

        // canonical position = n - 1 - creation index
        let vertex_at: Vec<usize> = vertex_by_creation.iter().rev().copied().collect();
        let mut position_of = vec![0; n];
        for (pos, &v) in vertex_at.iter().enumerate() {
            position_of[v] = pos;
        }

        let mut layout = Vec::with_capacity(2 * blocks.levels());
        let mut start = 0;
        for level in (0..blocks.levels()).rev() {
            for (part, len, degree) in [
                (Part::Independent, blocks.l[level], blocks.degrees_l[level]),
                (Part::Clique, blocks.k[level], blocks.degrees_k[level]),
            ] {
                if len > 0 {
                    layout.push(Block {
                        level,
                        part,
                        start,
                        len,
                        degree,
                    });
                    start += len;
                }
            }
        }
        let mut block_at = Vec::with_capacity(n);
        for (b, block) in layout.iter().enumerate() {
            block_at.extend(std::iter::repeat_n(b, block.len));
        }

        let graph = Self {
            config: config.clone(),
            x,
            blocks,
            position_of,
            vertex_at,
            layout,
            block_at,
        };
        graph.blocks.check_relations()?;
        graph.validate_against_raw_rule()?;
        Ok(graph)
    }

    /// Realize a given creation sequence with explicit hidden values
    /// (`x_j = +j` for bit 1, `-j` for bit 0, threshold 0).
    pub fn from_creation_sequence(bits: &[u8]) -> Result<Self> {
        BlockStructure::from_creation_sequence(bits)?;
        let x = bits
            .iter()
            .enumerate()
            .map(|(c, &b)| {
                let j = (c + 1) as f64;
                if b == 1 {
                    j
                } else {
                    -j
                }
            })
            .collect();
        Self::generate(&HiddenVariableConfig::explicit(x, 0.0))
    }

    pub fn from_runs(k: Vec<usize>, l: Vec<usize>) -> Result<Self> {
        let blocks = BlockStructure::from_runs(k, l)?;
        Self::from_creation_sequence(&blocks.to_creation_sequence())
    }

    /// Degrees from the raw edge rule (sorted counting) must equal the block
    /// degrees; small graphs are also compared pair by pair.
    fn validate_against_raw_rule(&self) -> Result<()> {
        let theta = self.config.theta;
        let mut sorted = self.x.clone();
        sorted.sort_by(f64::total_cmp);
        for (v, &xv) in self.x.iter().enumerate() {
            // x_v + y is monotone in y, so the partition point is exact.
            let above = sorted.len() - sorted.partition_point(|&y| xv + y <= theta);
            let raw = above - usize::from(xv + xv > theta);
            let pos = self.position_of[v];
            if raw != self.degree(pos) {
                return Err(Error::Consistency(format!(
                    "vertex {v}: raw-rule degree {raw} but block degree {}",
                    self.degree(pos)
                )));
            }
        }
        if self.n() <= PAIRWISE_CHECK_LIMIT {
            for u in 0..self.n() {
                for w in u + 1..self.n() {
                    let raw = self.x[u] + self.x[w] > theta;
                    if raw != self.adjacent(self.position_of[u], self.position_of[w]) {
                        return Err(Error::Consistency(format!(
                            "vertices {u},{w}: raw rule and block structure disagree"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn config(&self) -> &HiddenVariableConfig {
        &self.config
    }

    pub fn theta(&self) -> f64 {
        self.config.theta
    }

    /// Hidden values in original vertex order.
    pub fn hidden_values(&self) -> &[f64] {
        &self.x
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    /// Non-empty blocks in canonical order.
    pub fn layout(&self) -> &[Block] {
        &self.layout
    }

    pub fn block_of(&self, pos: usize) -> &Block {
        &self.layout[self.block_at[pos]]
    }

    /// Canonical position of each original vertex.
    pub fn order(&self) -> &[usize] {
        &self.position_of
    }

    pub fn position_of(&self, vertex: usize) -> usize {
        self.position_of[vertex]
    }

    pub fn vertex_at(&self, pos: usize) -> usize {
        self.vertex_at[pos]
    }

    /// `(level, part)` of a canonical position, level 0-based.
    pub fn level_of(&self, pos: usize) -> (usize, Part) {
        let b = self.block_of(pos);
        (b.level, b.part)
    }

    pub fn degree(&self, pos: usize) -> usize {
        self.block_of(pos).degree
    }

    /// Adjacency of two canonical positions from the level hierarchy.
    pub fn adjacent(&self, p: usize, q: usize) -> bool {
        if p == q {
            return false;
        }
        match (self.level_of(p), self.level_of(q)) {
            ((_, Part::Clique), (_, Part::Clique)) => true,
            ((i, Part::Clique), (j, Part::Independent))
            | ((j, Part::Independent), (i, Part::Clique)) => j < i,
            _ => false,
        }
    }

    pub fn is_connected(&self) -> bool {
        self.blocks.is_connected()
    }

    pub fn check_vertex(&self, pos: usize) -> Result<()> {
        if pos < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: pos,
                n: self.n(),
            })
        }
    }

    /// Edges `(u, w)` with `u < w` in canonical positions, lexicographically sorted.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for u in 0..self.n() {
            for w in u + 1..self.n() {
                if self.adjacent(u, w) {
                    edges.push((u, w));
                }
            }
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|p| self.degree(p)).sum::<usize>() / 2
    }

    /// `(k_G, l_G)` if the graph is a complete split graph (the shape produced
    /// by the binary model). A complete graph counts as `(n, 0)`.
    pub fn binary_split(&self) -> Option<(usize, usize)> {
        let b = &self.blocks;
        match b.levels() {
            1 if b.l[0] == 0 => Some((b.k[0], 0)),
            2 if b.k[0] == 0 && b.l[1] == 0 => Some((b.k[1], b.l[0])),
            _ => None,
        }
    }

    /// First vertex of the top clique block `V_m^(1)` (degree `n - 1` when connected).
    pub fn top_clique_vertex(&self) -> Option<usize> {
        self.layout
            .iter()
            .find(|b| b.level == self.blocks.levels() - 1 && b.part == Part::Clique)
            .map(|b| b.start)
    }

    /// First vertex of the bottom independent block `V_1^(0)`.
    pub fn bottom_independent_vertex(&self) -> Option<usize> {
        self.layout
            .iter()
            .find(|b| b.level == 0 && b.part == Part::Independent)
            .map(|b| b.start)
    }

    /// Apply the Laplacian `L = D - A` in canonical coordinates using block
    /// sums; O(n + m).
    pub fn laplacian_apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n(), "vector length must equal vertex count");
        let m = self.blocks.levels();
        let mut clique_sum = vec![0.0; m];
        let mut indep_sum = vec![0.0; m];
        for b in &self.layout {
            let s: f64 = v[b.range()].iter().sum();
            match b.part {
                Part::Clique => clique_sum[b.level] = s,
                Part::Independent => indep_sum[b.level] = s,
            }
        }
        let all_clique: f64 = clique_sum.iter().sum();
        // indep_below[i] = sum_{j<i} S(V_j^0); clique_above[i] = sum_{j>i} S(V_j^1)
        let mut indep_below = vec![0.0; m];
        for i in 1..m {
            indep_below[i] = indep_below[i - 1] + indep_sum[i - 1];
        }
        let mut clique_above = vec![0.0; m];
        for i in (0..m.saturating_sub(1)).rev() {
            clique_above[i] = clique_above[i + 1] + clique_sum[i + 1];
        }
        let mut out = vec![0.0; self.n()];
        for b in &self.layout {
            let neighbour_sum = match b.part {
                Part::Clique => all_clique + indep_below[b.level],
                Part::Independent => clique_above[b.level],
            };
            for p in b.range() {
                let own = if b.part == Part::Clique { v[p] } else { 0.0 };
                out[p] = b.degree as f64 * v[p] - (neighbour_sum - own);
            }
        }
        out
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n(),
            theta: self.theta(),
            x: self.x.clone(),
            blocks: RunLengths {
                k: self.blocks.k.clone(),
                l: self.blocks.l.clone(),
            },
            order: self.position_of.clone(),
            edges: self.edge_list().into_iter().map(|(u, w)| [u, w]).collect(),
        }
    }

    /// Whitespace-separated edge list, one `u w` pair per line.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::new();
        for (u, w) in self.edge_list() {
            out.push_str(&format!("{u} {w}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLengths {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

/// On-disk graph format. `order[v]` is the canonical position of original
/// vertex `v`; `edges` use canonical positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub theta: f64,
    pub x: Vec<f64>,
    pub blocks: RunLengths,
    pub order: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    /// Rebuild the graph from its hidden values and check the stored
    /// structure against it.
    pub fn into_graph(self) -> Result<ThresholdGraph> {
        if self.x.len() != self.n {
            return Err(Error::Config(format!(
                "graph file lists {} hidden values for n = {}",
                self.x.len(),
                self.n
            )));
        }
        let graph =
            ThresholdGraph::generate(&HiddenVariableConfig::explicit(self.x.clone(), self.theta))?;
        let rebuilt = graph.to_file();
        if rebuilt.blocks != self.blocks
            || rebuilt.order != self.order
            || rebuilt.edges != self.edges
        {
            return Err(Error::Config(
                "graph file structure does not match its hidden values".into(),
            ));
        }
        Ok(graph)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad graph JSON: {e}")))
    }
}
