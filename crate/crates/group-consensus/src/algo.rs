//! Adjacency-list graph algorithms shared by the full graph and the quotient.
//!
//! All functions take forward adjacency lists: `adj[v]` holds the targets of
//! edges leaving `v`.

/// Strongly connected components with the induced condensation DAG.
pub struct Condensation {
    /// Component id of every node.
    pub comp_of: Vec<usize>,
    /// Node lists per component.
    pub components: Vec<Vec<usize>>,
    /// Condensation edges (deduplicated, sorted).
    pub dag: Vec<Vec<usize>>,
    /// Components with no incoming condensation edge, sorted by their
    /// smallest member node.
    pub sources: Vec<usize>,
}

/// Tarjan's strongly connected components, iterative to keep large graphs off
/// the call stack.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = 0usize;
    let mut indices: Vec<Option<usize>> = vec![None; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS frames: (node, next child position).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if indices[start].is_some() {
            continue;
        }
        frames.push((start, 0));
        indices[start] = Some(index);
        lowlink[start] = index;
        index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                match indices[w] {
                    None => {
                        indices[w] = Some(index);
                        lowlink[w] = index;
                        index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    }
                    Some(wi) => {
                        if on_stack[w] {
                            lowlink[v] = lowlink[v].min(wi);
                        }
                    }
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == indices[v].unwrap() {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    sccs.push(comp);
                }
            }
        }
    }
    sccs
}

pub fn condensation(adj: &[Vec<usize>]) -> Condensation {
    let n = adj.len();
    let mut components = tarjan_scc(adj);
    // Canonical order: by smallest member node.
    components.sort_by_key(|c| c[0]);

    let mut comp_of = vec![usize::MAX; n];
    for (cid, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }

    let ncomp = components.len();
    let mut dag = vec![Vec::new(); ncomp];
    let mut has_incoming = vec![false; ncomp];
    for u in 0..n {
        let cu = comp_of[u];
        for &v in &adj[u] {
            let cv = comp_of[v];
            if cu != cv {
                dag[cu].push(cv);
                has_incoming[cv] = true;
            }
        }
    }
    for out in &mut dag {
        out.sort_unstable();
        out.dedup();
    }
    let sources = (0..ncomp).filter(|&c| !has_incoming[c]).collect();

    Condensation {
        comp_of,
        components,
        dag,
        sources,
    }
}

/// Nodes reachable from `start` (inclusive) following edge direction.
pub fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = vec![start];
    seen[start] = true;
    while let Some(v) = queue.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push(w);
            }
        }
    }
    seen
}

/// Reachability from a set of start nodes.
pub fn reachable_from_set(adj: &[Vec<usize>], starts: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: Vec<usize> = Vec::new();
    for &s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push(s);
        }
    }
    while let Some(v) = queue.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push(w);
            }
        }
    }
    seen
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            rev[v].push(u);
        }
    }
    rev
}

/// Weak connectivity: connectivity of the underlying undirected graph.
/// The empty graph and single nodes count as connected.
pub fn weakly_connected(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if n <= 1 {
        return true;
    }
    let mut und = vec![Vec::new(); n];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            und[u].push(v);
            und[v].push(u);
        }
    }
    reachable_from(&und, 0).iter().all(|&s| s)
}
