#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mo_layout::crossmin::LayerOrders;
use mo_layout::graph::{Direction, Graph};
use mo_layout::layering::{insert_dummies, LayeredGraph, Layering};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Every file below `dir` with extension `ext`, sorted.
pub fn files(dir: &str, ext: &str) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![fixtures().join(dir)];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == ext) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// `n` nodes, `m` edges with uniformly random endpoints (self-loops and
/// parallel edges included).
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
    let mut g = Graph::new(Direction::Right);
    for i in 0..n {
        g.add_node(format!("v{i}"));
    }
    for _ in 0..m {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.add_edge(&format!("v{a}"), &format!("v{b}"));
    }
    g
}

/// Acyclic graph whose topological order is a random permutation of the
/// declaration order, so some edges point against model order.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
    let mut topo: Vec<usize> = (0..n).collect();
    topo.shuffle(rng);
    let mut g = Graph::new(Direction::Right);
    for i in 0..n {
        g.add_node(format!("v{i}"));
    }
    if n < 2 {
        return g;
    }
    for _ in 0..m {
        let (mut a, mut b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        g.add_edge(&format!("v{}", topo[a]), &format!("v{}", topo[b]));
    }
    g
}

/// Two layers without ports: `top` nodes above `bottom` nodes, edges given
/// as (top index, bottom index).
pub fn bilayer(top: usize, bottom: usize, edges: &[(usize, usize)]) -> LayeredGraph {
    let mut g = Graph::default();
    for i in 0..top + bottom {
        g.add_node(format!("n{i}"));
    }
    for &(s, t) in edges {
        g.add_edge(&format!("n{s}"), &format!("n{}", top + t));
    }
    let layer_of = (0..top + bottom).map(|i| usize::from(i >= top)).collect();
    insert_dummies(&g, &Layering { layer_of }).unwrap()
}

pub fn random_bilayer(rng: &mut ChaCha8Rng, max_per_layer: usize) -> LayeredGraph {
    let top = rng.gen_range(1..=max_per_layer);
    let bottom = rng.gen_range(1..=max_per_layer);
    let m = rng.gen_range(0..=top * bottom);
    let edges: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..top), rng.gen_range(0..bottom))).collect();
    bilayer(top, bottom, &edges)
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Crossings by the pair formula: segments (a→b), (c→d) cross iff
/// (pos a − pos c)(pos b − pos d) < 0. Port ranks break ties on shared nodes.
pub fn pair_crossings(lg: &LayeredGraph, orders: &LayerOrders) -> usize {
    let ranks = orders.port_ranks(lg);
    let key = |node: usize, port: Option<usize>| -> (i64, i64) {
        let rank = match (lg.nodes[node].real(), port) {
            (Some(v), Some(p)) => ranks[v][p] as i64,
            _ => 0,
        };
        (orders.position[node] as i64, rank)
    };
    let mut count = 0;
    for (i, a) in lg.edges.iter().enumerate() {
        for b in &lg.edges[i + 1..] {
            if lg.nodes[a.source].layer != lg.nodes[b.source].layer {
                continue;
            }
            let (sa, sb) = (key(a.source, a.source_port), key(b.source, b.source_port));
            let (ta, tb) = (key(a.target, a.target_port), key(b.target, b.target_port));
            let ds = (sa.0 - sb.0) * 64 + (sa.1 - sb.1);
            let dt = (ta.0 - tb.0) * 64 + (ta.1 - tb.1);
            if ds * dt < 0 {
                count += 1;
            }
        }
    }
    count
}

/// Pair-formula crossings of a port-free bilayer for explicit top/bottom orders.
pub fn bilayer_crossings(lg: &LayeredGraph, top: &[usize], bottom: &[usize]) -> usize {
    let mut pos = vec![0i64; lg.nodes.len()];
    for (i, &v) in top.iter().enumerate() {
        pos[v] = i as i64;
    }
    for (i, &v) in bottom.iter().enumerate() {
        pos[v] = i as i64;
    }
    let mut count = 0;
    for (i, a) in lg.edges.iter().enumerate() {
        for b in &lg.edges[i + 1..] {
            if (pos[a.source] - pos[b.source]) * (pos[a.target] - pos[b.target]) < 0 {
                count += 1;
            }
        }
    }
    count
}

/// Inversions of a sequence of model orders, by pairs.
pub fn pair_inversions(seq: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                c += 1;
            }
        }
    }
    c
}
