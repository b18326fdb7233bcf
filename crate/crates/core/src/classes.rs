//! Block decomposition, class detectors for block graphs, cacti and
//! claw-free graphs, the diamond minor test, and counting formulas.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::Serialize;
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalForm};
use crate::combinatorics::{double_factorial, factorial};
use crate::graph::{GraphError, SimpleGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Vertex sets of the biconnected components, each sorted, in sorted order.
    pub blocks: Vec<Vec<usize>>,
    pub cut_vertices: Vec<usize>,
    /// Nodes `0..blocks.len()` are blocks, the rest are cut vertices in
    /// `cut_vertices` order.
    pub block_cut_tree: SimpleGraph,
}

/// Biconnected components of a connected graph.
pub fn block_decomposition(g: &SimpleGraph) -> Result<BlockDecomposition, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    if n == 1 {
        blocks.push(vec![0]);
    } else {
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut timer = 0;
        let mut edge_stack: Vec<(usize, usize)> = Vec::new();
        // Iterative DFS: frames of (vertex, parent, next neighbour position).
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
        disc[0] = 0;
        low[0] = 0;
        timer += 1;
        while let Some(frame) = stack.last_mut() {
            let (v, parent, pos) = *frame;
            if pos < adj[v].len() {
                frame.2 += 1;
                let w = adj[v][pos];
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    edge_stack.push((v, w));
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            if let Some(&(u, _, _)) = stack.last() {
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    let mut block = Vec::new();
                    while let Some((a, b)) = edge_stack.pop() {
                        block.push(a);
                        block.push(b);
                        if (a, b) == (u, v) {
                            break;
                        }
                    }
                    block.sort_unstable();
                    block.dedup();
                    blocks.push(block);
                }
            }
        }
    }
    blocks.sort();
    let mut membership = vec![0usize; n];
    for b in &blocks {
        for &v in b {
            membership[v] += 1;
        }
    }
    let cut_vertices: Vec<usize> = (0..n).filter(|&v| membership[v] > 1).collect();
    let mut tree_edges = Vec::new();
    for (ci, &c) in cut_vertices.iter().enumerate() {
        for (bi, b) in blocks.iter().enumerate() {
            if b.binary_search(&c).is_ok() {
                tree_edges.push((bi, blocks.len() + ci));
            }
        }
    }
    let block_cut_tree = SimpleGraph::new(blocks.len() + cut_vertices.len(), tree_edges)?;
    Ok(BlockDecomposition {
        blocks,
        cut_vertices,
        block_cut_tree,
    })
}

fn induced_edge_count(g: &SimpleGraph, vertices: &[usize]) -> usize {
    g.induced(vertices).edge_count()
}

/// Connected graph whose blocks are all cliques.
pub fn is_block_graph(g: &SimpleGraph) -> Result<bool, GraphError> {
    let d = block_decomposition(g)?;
    let result = d
        .blocks
        .iter()
        .all(|b| induced_edge_count(g, b) == b.len() * (b.len() - 1) / 2);
    debug_assert_eq!(result, is_block_graph_by_forbidden_subgraphs(g)?);
    Ok(result)
}

/// Block graph test through forbidden subgraphs: no induced diamond and no
/// induced cycle of length four or more.
pub fn is_block_graph_by_forbidden_subgraphs(g: &SimpleGraph) -> Result<bool, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    Ok(!has_induced_diamond(g) && is_chordal(g))
}

fn has_induced_diamond(g: &SimpleGraph) -> bool {
    let adj = g.adjacency_bits();
    // An induced diamond is an edge uv with two non-adjacent common neighbours.
    g.edges().any(|(u, v)| {
        let mut common = adj[u] & adj[v];
        while common != 0 {
            let a = common.trailing_zeros() as usize;
            common &= common - 1;
            if common & !adj[a] & !(1 << a) != 0 {
                return true;
            }
        }
        false
    })
}

/// Maximum cardinality search, then a perfect elimination order check.
pub fn is_chordal(g: &SimpleGraph) -> bool {
    let n = g.vertex_count();
    let adj = g.adjacency_bits();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !numbered[v])
            .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
            .unwrap();
        numbered[v] = true;
        order.push(v);
        for w in 0..n {
            if adj[v] >> w & 1 == 1 && !numbered[w] {
                weight[w] += 1;
            }
        }
    }
    // In reverse MCS order, each vertex's earlier neighbours form a clique.
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    order.iter().all(|&v| {
        let earlier: Vec<usize> = (0..n)
            .filter(|&w| adj[v] >> w & 1 == 1 && position[w] < position[v])
            .collect();
        let Some(&parent) = earlier.iter().max_by_key(|&&w| position[w]) else {
            return true;
        };
        earlier
            .iter()
            .all(|&w| w == parent || adj[parent] >> w & 1 == 1)
    })
}

/// Connected graph in which every block is a single edge or a cycle.
pub fn is_cactus(g: &SimpleGraph) -> Result<bool, GraphError> {
    let d = block_decomposition(g)?;
    Ok(d.blocks.iter().all(|b| {
        let m = induced_edge_count(g, b);
        b.len() <= 2 || (b.len() >= 3 && m == b.len())
    }))
}

/// No induced claw `K_{1,3}`.
pub fn is_claw_free(g: &SimpleGraph) -> bool {
    let adj = g.adjacency();
    (0..g.vertex_count()).all(|v| {
        let nb = &adj[v];
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if g.has_edge(nb[i], nb[j]) {
                    continue;
                }
                for &c in &nb[j + 1..] {
                    if !g.has_edge(nb[i], c) && !g.has_edge(nb[j], c) {
                        return false;
                    }
                }
            }
        }
        true
    })
}

/// Whether the diamond (K4 minus an edge) is a minor, by search over edge
/// deletions and contractions with memoized canonical forms.
pub fn has_diamond_minor(g: &SimpleGraph) -> Result<bool, GraphError> {
    const LIMIT: usize = 12;
    if g.vertex_count() > LIMIT {
        return Err(GraphError::TooLarge {
            got: g.vertex_count(),
            limit: LIMIT,
        });
    }
    let mut memo = HashMap::new();
    Ok(diamond_minor(&g.without_colors(), &mut memo))
}

fn diamond_minor(g: &SimpleGraph, memo: &mut HashMap<CanonicalForm, bool>) -> bool {
    if g.vertex_count() < 4 || g.edge_count() < 5 {
        return false;
    }
    let adj = g.adjacency_bits();
    // Two triangles sharing an edge.
    if g.edges().any(|(u, v)| (adj[u] & adj[v]).count_ones() >= 2) {
        return true;
    }
    // The diamond is 2-connected, so it is a minor of one block.
    let comps = g.components();
    let blocks: Vec<Vec<usize>> = (0..g.component_count())
        .flat_map(|c| {
            let members: Vec<usize> = (0..g.vertex_count()).filter(|&v| comps[v] == c).collect();
            let sub = g.induced(&members);
            block_decomposition(&sub)
                .expect("component is connected")
                .blocks
                .into_iter()
                .map(move |b| b.into_iter().map(|v| members[v]).collect::<Vec<_>>())
        })
        .filter(|b: &Vec<usize>| b.len() >= 4)
        .collect();
    if blocks.len() != 1 || blocks[0].len() != g.vertex_count() {
        return blocks.iter().any(|b| diamond_minor(&g.induced(b), memo));
    }
    let key = canonical_form(g, false);
    if let Some(&known) = memo.get(&key) {
        return known;
    }
    let mut result = false;
    for (u, v) in g.edges() {
        if diamond_minor(&g.with_edge_removed(u, v), memo)
            || diamond_minor(&contract(g, u, v), memo)
        {
            result = true;
            break;
        }
    }
    memo.insert(key, result);
    result
}

/// Merges `v` into `u`, dropping loops and parallel edges.
pub fn contract(g: &SimpleGraph, u: usize, v: usize) -> SimpleGraph {
    let rename = |x: usize| {
        let x = if x == v { u } else { x };
        if x > v {
            x - 1
        } else {
            x
        }
    };
    let edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(a, b)| (rename(a), rename(b)))
        .filter(|(a, b)| a != b)
        .collect();
    SimpleGraph::new(g.vertex_count() - 1, edges).expect("contraction stays simple")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("block or polygon size {0} is below 2")]
    SizeTooSmall(usize),
    #[error("triangular cacti have an odd number of nodes, got {0}")]
    EvenNodeCount(u64),
}

/// `(n, k)`: vertex count and number of blocks for a size profile.
fn profile_totals(sizes: &BTreeMap<usize, usize>) -> Result<(u64, u64), CountError> {
    let mut n = 1u64;
    let mut k = 0u64;
    for (&size, &count) in sizes {
        if size < 2 {
            return Err(CountError::SizeTooSmall(size));
        }
        n += (size as u64 - 1) * count as u64;
        k += count as u64;
    }
    Ok((n, k))
}

/// Labeled block graphs with `sizes[i]` blocks of size `i`:
/// `(n-1)! / prod_i ((i-1)!^{n_i} n_i!) * n^{k-1}`.
pub fn husimi_count(sizes: &BTreeMap<usize, usize>) -> Result<BigUint, CountError> {
    let (n, k) = profile_totals(sizes)?;
    if k == 0 {
        return Ok(BigUint::one());
    }
    let mut den = BigUint::one();
    for (&size, &count) in sizes {
        den *= Pow::pow(factorial(size as u64 - 1), count as u32) * factorial(count as u64);
    }
    Ok(factorial(n - 1) * BigUint::from(n).pow((k - 1) as u32) / den)
}

/// Labeled cacti with `sizes[i]` polygons of size `i` (size 2 = an edge):
/// `(n-1)! / prod_i n_i! * n^{k-1} / 2^{p}` where `p` counts polygons of size
/// at least 3. Only those polygons have a reflection to quotient out.
pub fn cactus_count(sizes: &BTreeMap<usize, usize>) -> Result<BigUint, CountError> {
    let (n, k) = profile_totals(sizes)?;
    if k == 0 {
        return Ok(BigUint::one());
    }
    let mut den = BigUint::one();
    for (&size, &count) in sizes {
        den *= factorial(count as u64);
        if size >= 3 {
            den *= BigUint::from(2u32).pow(count as u32);
        }
    }
    Ok(factorial(n - 1) * BigUint::from(n).pow((k - 1) as u32) / den)
}

/// The cactus formula with a factor 1/2 for every polygon, edges included.
pub fn cactus_count_uniform_halving(
    sizes: &BTreeMap<usize, usize>,
) -> Result<BigRational, CountError> {
    let (n, k) = profile_totals(sizes)?;
    if k == 0 {
        return Ok(BigRational::one());
    }
    let mut den = BigUint::from(2u32).pow(k as u32);
    for &count in sizes.values() {
        den *= factorial(count as u64);
    }
    let num = factorial(n - 1) * BigUint::from(n).pow((k - 1) as u32);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Both readings of `x^{(x-3)/2} (x-2)!!` for labeled triangular cacti on
/// `nodes = 2t + 1` vertices: `x` as the node count or as the triangle count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangularCactusReadings {
    pub nodes: u64,
    pub triangles: u64,
    #[serde(serialize_with = "crate::bigserde::biguint")]
    pub node_reading: BigUint,
    /// `None` when the value is irrational (even triangle count above 0).
    #[serde(serialize_with = "crate::bigserde::opt_rational")]
    pub triangle_reading: Option<BigRational>,
}

fn power_double_factorial(x: u64) -> Option<BigRational> {
    let df = BigInt::from(double_factorial(x as i64 - 2));
    if x == 0 {
        return None;
    }
    if x.is_multiple_of(2) {
        // Half-integer exponent of an even base: rational only for squares.
        let root = (x as f64).sqrt().round() as u64;
        if root * root != x {
            return None;
        }
        let e = x as i64 - 3;
        let base = BigInt::from(root);
        return Some(if e >= 0 {
            BigRational::from_integer(base.pow(e as u32) * df)
        } else {
            BigRational::new(df, base.pow((-e) as u32))
        });
    }
    let e = (x as i64 - 3) / 2;
    let base = BigInt::from(x);
    Some(if e >= 0 {
        BigRational::from_integer(base.pow(e as u32) * df)
    } else {
        BigRational::new(df, base.pow((-e) as u32))
    })
}

pub fn triangular_cactus_readings(nodes: u64) -> Result<TriangularCactusReadings, CountError> {
    if nodes.is_multiple_of(2) {
        return Err(CountError::EvenNodeCount(nodes));
    }
    let triangles = (nodes - 1) / 2;
    let node_reading = power_double_factorial(nodes)
        .expect("odd base gives a rational value")
        .to_integer()
        .to_biguint()
        .expect("nonnegative");
    let triangle_reading = if triangles == 0 {
        Some(BigRational::one())
    } else {
        power_double_factorial(triangles)
    };
    Ok(TriangularCactusReadings {
        nodes,
        triangles,
        node_reading,
        triangle_reading,
    })
}

/// Labeled triangular cacti on `nodes` vertices, using the node-count
/// reading `nodes^{(nodes-3)/2} (nodes-2)!!`, which equals
/// `(2t+1)^{t-1} (2t-1)!!` for `t` triangles.
pub fn triangular_cactus_count(nodes: u64) -> Result<BigUint, CountError> {
    Ok(triangular_cactus_readings(nodes)?.node_reading)
}

/// Class membership summary of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub connected: bool,
    pub tree: bool,
    pub block_graph: Option<bool>,
    pub cactus: Option<bool>,
    pub claw_free: bool,
    pub diamond_minor: Option<bool>,
}

pub fn classify(g: &SimpleGraph) -> Classification {
    let connected = g.is_connected();
    Classification {
        connected,
        tree: g.is_tree(),
        block_graph: is_block_graph(g).ok(),
        cactus: is_cactus(g).ok(),
        claw_free: is_claw_free(g),
        diamond_minor: has_diamond_minor(g).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> SimpleGraph {
        SimpleGraph::new(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn bowtie() -> SimpleGraph {
        SimpleGraph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap()
    }

    fn spec(items: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn decomposition_examples() {
        let tri = block_decomposition(&SimpleGraph::complete(3)).unwrap();
        assert_eq!((tri.blocks.len(), tri.cut_vertices.len()), (1, 0));
        let p3 = block_decomposition(&SimpleGraph::path(3)).unwrap();
        assert_eq!(p3.blocks, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(p3.cut_vertices, vec![1]);
        let bt = block_decomposition(&bowtie()).unwrap();
        assert_eq!(bt.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(bt.cut_vertices, vec![2]);
        assert!(bt.block_cut_tree.is_tree());
        assert!(block_decomposition(&SimpleGraph::empty(2)).is_err());
    }

    #[test]
    fn detector_examples() {
        let d = diamond();
        assert!(!is_block_graph(&d).unwrap());
        assert!(!is_cactus(&d).unwrap());
        let p = SimpleGraph::path(5);
        assert!(is_block_graph(&p).unwrap() && is_cactus(&p).unwrap() && is_claw_free(&p));
        assert!(!is_claw_free(&SimpleGraph::star(3)));
        let c4 = SimpleGraph::cycle(4);
        assert!(!is_block_graph(&c4).unwrap());
        assert!(is_cactus(&c4).unwrap());
    }

    #[test]
    fn diamond_minor_examples() {
        assert!(has_diamond_minor(&SimpleGraph::complete(4)).unwrap());
        assert!(!has_diamond_minor(&bowtie()).unwrap());
        assert!(!has_diamond_minor(&SimpleGraph::path(6)).unwrap());
        // A 5-cycle with one chord contracts to a diamond.
        let chorded =
            SimpleGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        assert!(has_diamond_minor(&chorded).unwrap());
    }

    #[test]
    fn husimi_examples() {
        assert_eq!(husimi_count(&spec(&[(2, 1)])).unwrap(), BigUint::one());
        assert_eq!(husimi_count(&spec(&[(2, 2)])).unwrap(), BigUint::from(3u32));
        assert_eq!(husimi_count(&spec(&[(3, 1)])).unwrap(), BigUint::one());
        assert!(husimi_count(&spec(&[(1, 1)])).is_err());
    }

    #[test]
    fn cactus_examples() {
        assert_eq!(cactus_count(&spec(&[(3, 1)])).unwrap(), BigUint::one());
        assert_eq!(cactus_count(&spec(&[(2, 1)])).unwrap(), BigUint::one());
        assert_eq!(
            cactus_count_uniform_halving(&spec(&[(2, 1)])).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            cactus_count(&spec(&[(3, 2)])).unwrap(),
            BigUint::from(15u32)
        );
    }

    #[test]
    fn triangular_cactus_readings_differ() {
        assert_eq!(triangular_cactus_count(1).unwrap(), BigUint::one());
        assert_eq!(triangular_cactus_count(3).unwrap(), BigUint::one());
        assert_eq!(triangular_cactus_count(5).unwrap(), BigUint::from(15u32));
        assert_eq!(triangular_cactus_count(7).unwrap(), BigUint::from(735u32));
        let r = triangular_cactus_readings(5).unwrap();
        assert_eq!(r.triangle_reading, None);
        let r = triangular_cactus_readings(7).unwrap();
        assert_eq!(r.triangle_reading, Some(BigRational::one()));
        assert_eq!(
            triangular_cactus_count(4),
            Err(CountError::EvenNodeCount(4))
        );
    }
}
