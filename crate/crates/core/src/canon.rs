//! Canonical labeling of small graphs by individualization and refinement.

use crate::diagram::OrbitIndex;
use crate::graph::SimpleGraph;

/// Isomorphism-invariant form of a graph: relabeled adjacency rows and, when
/// colors are respected, the relabeled colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub n: usize,
    pub colors: Option<Vec<OrbitIndex>>,
    pub rows: Vec<u64>,
}

impl CanonicalForm {
    pub fn to_graph(&self) -> SimpleGraph {
        let mut edges = Vec::new();
        for (a, &row) in self.rows.iter().enumerate() {
            for b in a + 1..self.n {
                if row >> b & 1 == 1 {
                    edges.push((a, b));
                }
            }
        }
        let g = SimpleGraph::new(self.n, edges).expect("canonical rows describe a simple graph");
        match &self.colors {
            Some(c) => g.with_colors(c.clone()).expect("one color per vertex"),
            None => g,
        }
    }
}

/// Canonical form and a labeling `label[v]` that produces it.
pub fn canonical_labeling(g: &SimpleGraph, respect_colors: bool) -> (CanonicalForm, Vec<usize>) {
    let n = g.vertex_count();
    let adj = g.adjacency_bits();
    let colors = if respect_colors { g.colors() } else { None };
    let initial = initial_partition(n, &adj, colors);
    let mut search = Search {
        n,
        adj: &adj,
        colors,
        best: None,
        automorphisms: Vec::new(),
    };
    search.explore(initial, &mut Vec::new());
    let (form, label) = search.best.expect("search reaches at least one leaf");
    (form, label)
}

pub fn canonical_form(g: &SimpleGraph, respect_colors: bool) -> CanonicalForm {
    canonical_labeling(g, respect_colors).0
}

/// Exact isomorphism test through canonical forms.
pub fn graphs_isomorphic(g1: &SimpleGraph, g2: &SimpleGraph, respect_colors: bool) -> bool {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return false;
    }
    if respect_colors && g1.colors().is_some() != g2.colors().is_some() {
        return false;
    }
    let mut d1 = g1.degrees();
    let mut d2 = g2.degrees();
    d1.sort_unstable();
    d2.sort_unstable();
    d1 == d2 && canonical_form(g1, respect_colors) == canonical_form(g2, respect_colors)
}

type Partition = Vec<Vec<usize>>;

fn initial_partition(n: usize, adj: &[u64], colors: Option<&[OrbitIndex]>) -> Partition {
    let mut cells: Partition = vec![(0..n).collect()];
    if let Some(c) = colors {
        cells = split_by(&cells, |v| c[v].value() as i64);
    }
    refine(cells, adj)
}

fn split_by(cells: &Partition, key: impl Fn(usize) -> i64) -> Partition {
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut keyed: Vec<(i64, usize)> = cell.iter().map(|&v| (key(v), v)).collect();
        keyed.sort_unstable();
        let mut start = 0;
        for i in 1..=keyed.len() {
            if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                out.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                start = i;
            }
        }
    }
    out
}

// Splits cells by neighbour counts into every cell until nothing changes.
fn refine(mut cells: Partition, adj: &[u64]) -> Partition {
    loop {
        let masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect();
        let mut out = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                out.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|m| (adj[v] & m).count_ones()).collect(), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    out.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        if out.len() == cells.len() {
            return out;
        }
        cells = out;
    }
}

struct Search<'a> {
    n: usize,
    adj: &'a [u64],
    colors: Option<&'a [OrbitIndex]>,
    best: Option<(CanonicalForm, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn explore(&mut self, cells: Partition, path: &mut Vec<usize>) {
        let Some(target) = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i)
        else {
            self.leaf(&cells);
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            // Skip v when a known automorphism fixing the path maps a tried
            // vertex onto it: that subtree is an image of one already seen.
            let redundant = self.automorphisms.iter().any(|gamma| {
                path.iter().all(|&p| gamma[p] == p) && tried.iter().any(|&w| gamma[w] == v)
            });
            if redundant {
                continue;
            }
            tried.push(v);
            let mut next = cells.clone();
            let rest: Vec<usize> = next[target].iter().copied().filter(|&w| w != v).collect();
            next[target] = vec![v];
            next.insert(target + 1, rest);
            path.push(v);
            self.explore(refine(next, self.adj), path);
            path.pop();
        }
    }

    fn leaf(&mut self, cells: &Partition) {
        let mut label = vec![0; self.n];
        for (i, c) in cells.iter().enumerate() {
            label[c[0]] = i;
        }
        let form = self.form_for(&label);
        match &self.best {
            Some((best, best_label)) if form == *best => {
                // label⁻¹ then best_label maps this leaf onto the best one.
                let mut inverse = vec![0; self.n];
                for v in 0..self.n {
                    inverse[label[v]] = v;
                }
                let gamma: Vec<usize> = (0..self.n).map(|v| inverse[best_label[v]]).collect();
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.automorphisms.push(gamma);
                }
            }
            Some((best, _)) if form < *best => {}
            _ => self.best = Some((form, label)),
        }
    }

    fn form_for(&self, label: &[usize]) -> CanonicalForm {
        let mut rows = vec![0u64; self.n];
        for v in 0..self.n {
            let mut bits = self.adj[v];
            while bits != 0 {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                rows[label[v]] |= 1 << label[w];
            }
        }
        let colors = self.colors.map(|c| {
            let mut out = vec![OrbitIndex::Zero; self.n];
            for v in 0..self.n {
                out[label[v]] = c[v];
            }
            out
        });
        CanonicalForm {
            n: self.n,
            colors,
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_three_cycle() {
        assert!(graphs_isomorphic(
            &SimpleGraph::complete(3),
            &SimpleGraph::cycle(3),
            false
        ));
    }

    #[test]
    fn claw_is_not_a_path() {
        assert!(!graphs_isomorphic(
            &SimpleGraph::star(3),
            &SimpleGraph::path(4),
            false
        ));
    }

    #[test]
    fn rotated_five_cycle() {
        let rotated = SimpleGraph::cycle(5).relabeled(&[2, 3, 4, 0, 1]);
        assert!(graphs_isomorphic(&SimpleGraph::cycle(5), &rotated, false));
    }

    #[test]
    fn colors_matter_when_respected() {
        use OrbitIndex::*;
        let a = SimpleGraph::path(3)
            .with_colors(vec![Plus, Zero, Minus])
            .unwrap();
        let b = SimpleGraph::path(3)
            .with_colors(vec![Zero, Plus, Minus])
            .unwrap();
        assert!(graphs_isomorphic(&a, &b, false));
        assert!(!graphs_isomorphic(&a, &b, true));
        let c = SimpleGraph::path(3)
            .with_colors(vec![Minus, Zero, Plus])
            .unwrap();
        assert!(graphs_isomorphic(&a, &c, true));
    }

    #[test]
    fn regular_graphs_are_told_apart() {
        // Two 3-regular graphs on 6 vertices: the prism and K_{3,3}.
        let prism = SimpleGraph::new(
            6,
            [
                (0, 1),
                (1, 2),
                (0, 2),
                (3, 4),
                (4, 5),
                (3, 5),
                (0, 3),
                (1, 4),
                (2, 5),
            ],
        )
        .unwrap();
        let k33 = SimpleGraph::new(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
        assert!(!graphs_isomorphic(&prism, &k33, false));
        let shuffled = prism.relabeled(&[5, 3, 1, 0, 4, 2]);
        assert_eq!(
            canonical_form(&prism, false),
            canonical_form(&shuffled, false)
        );
    }

    #[test]
    fn form_round_trips_to_an_isomorphic_graph() {
        let g = SimpleGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let f = canonical_form(&g, false);
        assert!(graphs_isomorphic(&g, &f.to_graph(), false));
        assert_eq!(canonical_form(&f.to_graph(), false), f);
    }
}
