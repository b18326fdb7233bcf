//! Spanning-tree counts: matrix-tree determinant, brute force, and the
//! Tutte polynomial at (1, 1).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{SimpleGraph, UnionFind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanningError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph has {got} {what}; at most {limit} supported")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

/// Degree matrix minus adjacency matrix.
pub fn laplacian(g: &SimpleGraph) -> Vec<Vec<i64>> {
    let n = g.vertex_count();
    let mut l = vec![vec![0i64; n]; n];
    for (a, b) in g.edges() {
        l[a][a] += 1;
        l[b][b] += 1;
        l[a][b] -= 1;
        l[b][a] -= 1;
    }
    l
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let value = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = value;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningCount {
    #[serde(serialize_with = "crate::bigserde::biguint")]
    pub count: BigUint,
    /// False for disconnected input, where `count` is 0.
    pub connected: bool,
}

/// Number of spanning trees from a principal minor of the Laplacian.
pub fn spanning_count_kirchhoff(g: &SimpleGraph) -> Result<SpanningCount, SpanningError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(SpanningError::Empty);
    }
    let count = multigraph_spanning_count(n, &g.edge_list());
    Ok(SpanningCount {
        connected: !count.is_zero(),
        count,
    })
}

/// Matrix-tree count for a multigraph; loops are ignored.
pub fn multigraph_spanning_count(n: usize, edges: &[(usize, usize)]) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let mut l = vec![vec![BigInt::zero(); n]; n];
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        l[a][a] += 1;
        l[b][b] += 1;
        l[a][b] -= 1;
        l[b][a] -= 1;
    }
    let minor: Vec<Vec<BigInt>> = l[1..].iter().map(|row| row[1..].to_vec()).collect();
    let det = bareiss_determinant(minor);
    debug_assert!(!det.is_negative());
    det.to_biguint().unwrap_or_default()
}

/// Every spanning tree as a list of edges, by checking all edge subsets of
/// size `n - 1`.
pub fn spanning_enumerate_brute(
    g: &SimpleGraph,
) -> Result<Vec<Vec<(usize, usize)>>, SpanningError> {
    const LIMIT: usize = 8;
    let n = g.vertex_count();
    if n == 0 {
        return Err(SpanningError::Empty);
    }
    if n > LIMIT {
        return Err(SpanningError::TooLarge {
            what: "vertices",
            got: n,
            limit: LIMIT,
        });
    }
    let edges = g.edge_list();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n - 1);
    subsets(&edges, n - 1, 0, &mut chosen, &mut |subset| {
        let mut uf = UnionFind::new(n);
        if subset.iter().all(|&(a, b)| uf.union(a, b)) {
            out.push(subset.to_vec());
        }
    });
    Ok(out)
}

fn subsets<T: Copy>(
    items: &[T],
    size: usize,
    start: usize,
    chosen: &mut Vec<T>,
    f: &mut dyn FnMut(&[T]),
) {
    if chosen.len() == size {
        f(chosen);
        return;
    }
    for i in start..items.len() {
        if items.len() - i < size - chosen.len() {
            break;
        }
        chosen.push(items[i]);
        subsets(items, size, i + 1, chosen, f);
        chosen.pop();
    }
}

/// `T(G; 1, 1)` by deletion and contraction on the multigraph: the number of
/// maximal spanning forests.
pub fn tutte_11(g: &SimpleGraph) -> Result<BigUint, SpanningError> {
    const LIMIT: usize = 21;
    if g.edge_count() > LIMIT {
        return Err(SpanningError::TooLarge {
            what: "edges",
            got: g.edge_count(),
            limit: LIMIT,
        });
    }
    Ok(tutte_11_multigraph(g.vertex_count(), g.edge_list()))
}

pub fn tutte_11_multigraph(n: usize, edges: Vec<(usize, usize)>) -> BigUint {
    let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).collect();
    let Some(&(u, v)) = edges.first() else {
        return BigUint::one();
    };
    let rest: Vec<(usize, usize)> = edges[1..].to_vec();
    let contracted = contract_multigraph(n, &rest, u, v);
    if connected_without(n, &rest, u, v) {
        tutte_11_multigraph(n, rest) + tutte_11_multigraph(n - 1, contracted)
    } else {
        // A bridge: every maximal forest contains it.
        tutte_11_multigraph(n - 1, contracted)
    }
}

fn contract_multigraph(
    n: usize,
    edges: &[(usize, usize)],
    u: usize,
    v: usize,
) -> Vec<(usize, usize)> {
    let (keep, gone) = (u.min(v), u.max(v));
    let rename = |x: usize| {
        let x = if x == gone { keep } else { x };
        if x > gone {
            x - 1
        } else {
            x
        }
    };
    debug_assert!(gone < n);
    edges.iter().map(|&(a, b)| (rename(a), rename(b))).collect()
}

fn connected_without(n: usize, edges: &[(usize, usize)], u: usize, v: usize) -> bool {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    uf.find(u) == uf.find(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kirchhoff_examples() {
        let one = spanning_count_kirchhoff(&SimpleGraph::empty(1)).unwrap();
        assert_eq!(
            one,
            SpanningCount {
                count: BigUint::one(),
                connected: true
            }
        );
        assert_eq!(
            spanning_count_kirchhoff(&SimpleGraph::complete(3))
                .unwrap()
                .count,
            BigUint::from(3u32)
        );
        assert_eq!(
            spanning_count_kirchhoff(&SimpleGraph::complete(4))
                .unwrap()
                .count,
            BigUint::from(16u32)
        );
        let split = spanning_count_kirchhoff(&SimpleGraph::empty(2)).unwrap();
        assert!(!split.connected);
        assert!(split.count.is_zero());
        assert_eq!(
            spanning_count_kirchhoff(&SimpleGraph::empty(0)),
            Err(SpanningError::Empty)
        );
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(
            spanning_enumerate_brute(&SimpleGraph::path(3))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            spanning_enumerate_brute(&SimpleGraph::cycle(4))
                .unwrap()
                .len(),
            4
        );
        assert_eq!(
            spanning_enumerate_brute(&SimpleGraph::complete(4))
                .unwrap()
                .len(),
            16
        );
        assert!(spanning_enumerate_brute(&SimpleGraph::path(9)).is_err());
    }

    #[test]
    fn tutte_examples() {
        assert_eq!(
            tutte_11(&SimpleGraph::complete(3)).unwrap(),
            BigUint::from(3u32)
        );
        let two = SimpleGraph::complete(3).disjoint_union(&SimpleGraph::complete(3));
        assert_eq!(tutte_11(&two).unwrap(), BigUint::from(9u32));
        assert_eq!(tutte_11(&SimpleGraph::path(2)).unwrap(), BigUint::one());
        assert_eq!(
            tutte_11(&SimpleGraph::complete(6)).unwrap(),
            BigUint::from(1296u32)
        );
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let l = laplacian(&SimpleGraph::complete(4));
        assert!(l.iter().all(|row| row.iter().sum::<i64>() == 0));
        assert_eq!(l[0][0], 3);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = vec![vec![0, 1], vec![1, 0]]
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        assert_eq!(bareiss_determinant(m), BigInt::from(-1));
    }
}
