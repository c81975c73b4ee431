use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::SparseMatrix;

/// Minimum degree elimination order for the symmetrized pattern `A + Aᵀ`.
///
/// Works on the explicit elimination graph: eliminating a vertex turns its
/// remaining neighbourhood into a clique. Ties go to the smallest index, so
/// the order is deterministic.
pub fn minimum_degree(a: &SparseMatrix) -> Vec<usize> {
    let n = a.n_rows.min(a.n_cols);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.triplets() {
        if i != j && i < n && j < n {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let mut eliminated = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|v| Reverse((adj[v].len(), v))).collect();
    let mut order = Vec::with_capacity(n);
    let mut merged = Vec::new();

    while let Some(Reverse((deg, v))) = heap.pop() {
        if eliminated[v] || deg != adj[v].len() {
            continue;
        }
        eliminated[v] = true;
        order.push(v);
        let clique = std::mem::take(&mut adj[v]);
        for &u in &clique {
            merged.clear();
            let current = &adj[u];
            let (mut p, mut q) = (0, 0);
            while p < current.len() || q < clique.len() {
                let next = match (current.get(p), clique.get(q)) {
                    (Some(&x), Some(&y)) if x == y => {
                        p += 1;
                        q += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        p += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        q += 1;
                        y
                    }
                    (Some(&x), None) => {
                        p += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        q += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                if next != u && next != v {
                    merged.push(next);
                }
            }
            std::mem::swap(&mut adj[u], &mut merged);
            heap.push(Reverse((adj[u].len(), u)));
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_a_permutation() {
        let triplets: Vec<_> = (0..20)
            .flat_map(|i| [(i, i, 4.0), (i, (i * 7 + 3) % 20, 1.0)])
            .collect();
        let a = SparseMatrix::from_triplets(20, 20, &triplets).unwrap();
        let mut order = minimum_degree(&a);
        order.sort_unstable();
        assert_eq!(order, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn star_graph_eliminates_leaves_first() {
        // Hub 0 connected to every leaf: eliminating the hub first would fill
        // the whole matrix.
        let mut triplets: Vec<_> = (0..6).map(|i| (i, i, 10.0)).collect();
        triplets.extend((1..6).map(|i| (0, i, 1.0)));
        let a = SparseMatrix::from_triplets(6, 6, &triplets).unwrap();
        let order = minimum_degree(&a);
        assert_ne!(order[0], 0);
        assert!(order[..4].iter().all(|&v| v != 0));
    }
}
