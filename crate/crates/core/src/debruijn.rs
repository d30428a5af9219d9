//! Repetition-free de Bruijn-style sequences.
//!
//! Over an alphabet `S` and order `r`, the overlap digraph has as vertices
//! the `r`-tuples with no two equal adjacent entries and an edge `x -> y`
//! whenever the last `r - 1` entries of `x` start `y`. It is
//! `(|S| - 1)`-regular and strongly connected, so it has an Eulerian circuit.
//! Reading the first coordinate of each vertex along the circuit yields a
//! cyclic sequence of length `|S| (|S| - 1)^r` whose cyclic `(r + 1)`-windows
//! are pairwise distinct and whose cyclically adjacent symbols differ.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

/// Vertex-code tables larger than this are refused.
const MAX_CODE_SPACE: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DebruijnError {
    #[error("alphabet needs at least 2 distinct symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("graph over {symbols} symbols of order {order} is too large")]
    TooLarge { symbols: usize, order: usize },
    #[error("graph has no Eulerian circuit: {0}")]
    NotEulerian(String),
}

/// Overlap digraph on repetition-free `r`-tuples.
#[derive(Clone, Debug)]
pub struct DbGraph<T> {
    alphabet: Vec<T>,
    order: usize,
    /// Tuples of symbol indices, in lexicographic order.
    vertices: Vec<Vec<u32>>,
    /// Out-neighbours, sorted.
    adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
}

impl<T: Clone> DbGraph<T> {
    pub fn alphabet(&self) -> &[T] {
        &self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Vertex `i` as a tuple of symbols.
    pub fn vertex(&self, i: usize) -> Vec<T> {
        self.vertices[i].iter().map(|&s| self.alphabet[s as usize].clone()).collect()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        in_degrees(&self.adjacency)
    }

    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected(&self.adjacency)
    }
}

fn in_degrees(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut deg = vec![0; adj.len()];
    for out in adj {
        for &v in out {
            deg[v] += 1;
        }
    }
    deg
}

fn reachable_count(adj: &[Vec<usize>], start: usize) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count
}

fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            rev[v].push(u);
        }
    }
    rev
}

fn strongly_connected(adj: &[Vec<usize>]) -> bool {
    adj.is_empty() || (reachable_count(adj, 0) == adj.len() && reachable_count(&reverse(adj), 0) == adj.len())
}

/// Sorted, deduplicated copy of the alphabet.
fn canonical_alphabet<T: Ord + Clone>(alphabet: &[T]) -> Vec<T> {
    let mut a = alphabet.to_vec();
    a.sort();
    a.dedup();
    a
}

/// Builds the overlap digraph and checks its regularity and connectivity.
pub fn build_graph<T: Ord + Clone>(alphabet: &[T], r: usize) -> Result<DbGraph<T>, DebruijnError> {
    let alphabet = canonical_alphabet(alphabet);
    let m = alphabet.len();
    if m < 2 {
        return Err(DebruijnError::AlphabetTooSmall(m));
    }
    if r == 0 {
        return Err(DebruijnError::ZeroOrder);
    }
    let too_large = || DebruijnError::TooLarge { symbols: m, order: r };
    let code_space = (m as u64).checked_pow(r as u32).filter(|&c| c <= MAX_CODE_SPACE).ok_or_else(too_large)?;

    // Lexicographic enumeration of repetition-free tuples.
    let mut vertices: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..r {
        vertices = vertices
            .into_iter()
            .flat_map(|t| {
                let last = t.last().copied();
                (0..m as u32).filter(move |&x| last != Some(x)).map(move |x| {
                    let mut next = t.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    let code = |t: &[u32]| t.iter().fold(0u64, |acc, &x| acc * m as u64 + x as u64);
    let mut index = vec![u32::MAX; code_space as usize];
    for (i, t) in vertices.iter().enumerate() {
        index[code(t) as usize] = i as u32;
    }
    let adjacency: Vec<Vec<usize>> = vertices
        .iter()
        .map(|t| {
            let last = *t.last().expect("r >= 1");
            (0..m as u32)
                .filter(|&x| x != last)
                .map(|x| {
                    let mut next: Vec<u32> = t[1..].to_vec();
                    next.push(x);
                    index[code(&next) as usize] as usize
                })
                .collect()
        })
        .collect();

    let g = DbGraph { alphabet, order: r, vertices, adjacency };
    let expected = m * (m - 1).pow(r as u32 - 1);
    let regular = g.adjacency.iter().all(|a| a.len() == m - 1) && g.in_degrees().iter().all(|&d| d == m - 1);
    if g.vertex_count() != expected || !regular || !g.is_strongly_connected() {
        return Err(DebruijnError::NotEulerian(format!(
            "overlap graph failed its invariants ({} vertices, expected {expected})",
            g.vertex_count()
        )));
    }
    Ok(g)
}

/// Hierholzer's algorithm on a general digraph, starting from vertex 0 and
/// taking out-edges in the order given. Returns the closed walk
/// `v_0, v_1, ..., v_E = v_0`.
pub fn eulerian_walk(adj: &[Vec<usize>]) -> Result<Vec<usize>, DebruijnError> {
    if adj.is_empty() {
        return Err(DebruijnError::NotEulerian("empty graph".into()));
    }
    let indeg = in_degrees(adj);
    if let Some(v) = (0..adj.len()).find(|&v| indeg[v] != adj[v].len()) {
        return Err(DebruijnError::NotEulerian(format!(
            "vertex {v} has indegree {} and outdegree {}",
            indeg[v],
            adj[v].len()
        )));
    }
    let edges: usize = adj.iter().map(Vec::len).sum();
    if edges == 0 {
        return Err(DebruijnError::NotEulerian("no edges".into()));
    }
    let mut next = vec![0usize; adj.len()];
    let mut stack = vec![0usize];
    let mut walk = Vec::with_capacity(edges + 1);
    while let Some(&u) = stack.last() {
        if next[u] < adj[u].len() {
            stack.push(adj[u][next[u]]);
            next[u] += 1;
        } else {
            walk.push(u);
            stack.pop();
        }
    }
    if walk.len() != edges + 1 {
        return Err(DebruijnError::NotEulerian(format!(
            "circuit from vertex 0 covers {} of {edges} edges (graph not connected)",
            walk.len() - 1
        )));
    }
    walk.reverse();
    Ok(walk)
}

/// Eulerian circuit of the overlap graph as an edge sequence, starting at the
/// lexicographically least vertex.
pub fn eulerian_circuit<T: Clone>(g: &DbGraph<T>) -> Result<Vec<Edge>, DebruijnError> {
    let walk = eulerian_walk(&g.adjacency)?;
    Ok(walk.windows(2).map(|w| Edge { from: w[0], to: w[1] }).collect())
}

/// Cyclic sequence over an alphabet with no equal neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DbSequence<T> {
    pub symbols: Vec<T>,
    /// Length of the cyclic windows that are pairwise distinct.
    pub window: usize,
}

impl<T> DbSequence<T> {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Cyclic sequence of length `|S| (|S| - 1)^(window - 1)` whose cyclic
/// `window`-tuples are distinct and whose adjacent symbols differ.
///
/// `window = 1` degenerates to the alphabet itself in sorted order.
pub fn repetition_free_sequence<T: Ord + Clone>(alphabet: &[T], window: usize) -> Result<DbSequence<T>, DebruijnError> {
    if window == 0 {
        return Err(DebruijnError::ZeroOrder);
    }
    let canon = canonical_alphabet(alphabet);
    if canon.len() < 2 {
        return Err(DebruijnError::AlphabetTooSmall(canon.len()));
    }
    if window == 1 {
        return Ok(DbSequence { symbols: canon, window });
    }
    let g = build_graph(&canon, window - 1)?;
    let circuit = eulerian_circuit(&g)?;
    let symbols = circuit.iter().map(|e| g.alphabet[g.vertices[e.from][0] as usize].clone()).collect();
    Ok(DbSequence { symbols, window })
}

/// Sequence with distinct cyclic `(r + 1)`-windows, length `|S| (|S| - 1)^r`.
pub fn window_sequence<T: Ord + Clone>(alphabet: &[T], r: usize) -> Result<DbSequence<T>, DebruijnError> {
    if r == 0 {
        return Err(DebruijnError::ZeroOrder);
    }
    repetition_free_sequence(alphabet, r + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthCheck {
    pub holds: bool,
    pub expected: Option<u128>,
    pub actual: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub holds: bool,
    /// 1-based start positions of two equal windows.
    pub repeat: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjacencyCheck {
    pub holds: bool,
    /// 1-based `j` with `s_j = s_{j+1}` (cyclically).
    pub position: Option<usize>,
}

/// Per-property outcome of [`verify_sequence`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    /// (a) cyclic `(r + 1)`-windows pairwise distinct.
    pub windows_distinct: WindowCheck,
    /// (b) length equals `|S| (|S| - 1)^r`.
    pub length: LengthCheck,
    /// (c) cyclically adjacent symbols differ.
    pub adjacent_distinct: AdjacencyCheck,
    /// 1-based position of a symbol outside the alphabet, if any.
    pub foreign_symbol: Option<usize>,
}

impl SequenceReport {
    pub fn all_pass(&self) -> bool {
        self.windows_distinct.holds
            && self.length.holds
            && self.adjacent_distinct.holds
            && self.foreign_symbol.is_none()
    }
}

pub fn verify_sequence<T: Ord + Clone + std::hash::Hash>(seq: &[T], alphabet: &[T], r: usize) -> SequenceReport {
    let canon = canonical_alphabet(alphabet);
    let m = canon.len() as u128;
    let k = seq.len();
    let expected = m.checked_sub(1).and_then(|d| d.checked_pow(r as u32)).and_then(|p| p.checked_mul(m));
    let length = LengthCheck { holds: expected == Some(k as u128), expected, actual: k };

    let foreign_symbol = seq.iter().position(|s| canon.binary_search(s).is_err()).map(|i| i + 1);

    let position = (0..k).find(|&j| seq[j] == seq[(j + 1) % k]).map(|j| j + 1);
    let adjacent_distinct = AdjacencyCheck { holds: position.is_none(), position };

    let mut first_seen: HashMap<Vec<&T>, usize> = HashMap::with_capacity(k);
    let mut repeat = None;
    for j in 0..k {
        let window: Vec<&T> = (0..=r).map(|t| &seq[(j + t) % k]).collect();
        if let Some(&i) = first_seen.get(&window) {
            repeat = Some((i + 1, j + 1));
            break;
        }
        first_seen.insert(window, j);
    }
    let windows_distinct = WindowCheck { holds: repeat.is_none(), repeat };

    SequenceReport { windows_distinct, length, adjacent_distinct, foreign_symbol }
}
