use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;

use super::tensor::TensorClosure;
use super::{GeneratorKind, ModelError, PlacementRule, QrtInstance, Step, Word};

const MAX_INDEXED: usize = 1 << 26;
const UNSEEN: u32 = u32::MAX;

/// Placements of every non-identity generator on a system of `width`
/// subsystems whose output fits in `max_out` subsystems, in canonical order.
pub fn steps_for_width(q: &QrtInstance, width: usize, max_out: usize) -> Vec<Step> {
    let mut steps = Vec::new();
    for (gi, g) in q.generators.iter().enumerate() {
        if g.kind == GeneratorKind::Identity || g.arity_in > width {
            continue;
        }
        let (a, b) = (g.arity_in, g.arity_out);
        if width - a + b > max_out {
            continue;
        }
        let square = a == b || b == 0;
        match g.placement {
            PlacementRule::All => {
                for inputs in ordered_choices(width, a) {
                    let ats = if square { 0..=0 } else { 0..=(width - a) };
                    for at in ats {
                        steps.push(Step {
                            generator: gi,
                            inputs: inputs.clone(),
                            at,
                        });
                    }
                }
            }
            PlacementRule::Adjacent => {
                for p in 0..=(width - a) {
                    steps.push(Step {
                        generator: gi,
                        inputs: (p..p + a).collect(),
                        at: if square { 0 } else { p },
                    });
                }
            }
        }
    }
    steps
}

/// Ordered selections of `k` distinct positions out of `n`, lexicographic.
fn ordered_choices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Dense indexing of all tuples of length ≤ `max_width`: tuples of length k
/// occupy the block starting at Σ_{j<k} bʲ, in lexicographic order.
#[derive(Debug, Clone)]
pub(crate) struct DiscreteSpace {
    pub base: usize,
    pub max_width: usize,
    offsets: Vec<usize>,
}

impl DiscreteSpace {
    pub fn new(base: usize, max_width: usize) -> Result<Self, ModelError> {
        let mut offsets = Vec::with_capacity(max_width + 2);
        let mut acc: usize = 0;
        let mut block: usize = 1;
        for _ in 0..=max_width {
            offsets.push(acc);
            acc = acc.checked_add(block).filter(|&s| s <= MAX_INDEXED).ok_or(ModelError::SpaceTooLarge {
                width: max_width,
                base,
            })?;
            block = block.saturating_mul(base);
        }
        offsets.push(acc);
        Ok(Self {
            base,
            max_width,
            offsets,
        })
    }

    /// Number of tuples of length ≤ `width`.
    pub fn size_up_to(&self, width: usize) -> usize {
        self.offsets[width + 1]
    }

    pub fn index(&self, t: &[u8]) -> u32 {
        let code = t.iter().fold(0usize, |acc, &s| acc * self.base + s as usize);
        (self.offsets[t.len()] + code) as u32
    }

    pub fn width_of(&self, idx: u32) -> usize {
        let idx = idx as usize;
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn decode_into(&self, idx: u32, buf: &mut Vec<u8>) {
        let w = self.width_of(idx);
        let mut code = idx as usize - self.offsets[w];
        buf.clear();
        buf.resize(w, 0);
        for slot in buf.iter_mut().rev() {
            *slot = (code % self.base) as u8;
            code /= self.base;
        }
    }

    pub fn decode(&self, idx: u32) -> Vec<u8> {
        let mut buf = Vec::new();
        self.decode_into(idx, &mut buf);
        buf
    }
}

/// (next node, step index) pairs of one node.
type Successors = Box<[(u32, u32)]>;

/// Breadth-first exploration of label tuples under lifted generators, with
/// successor lists cached across searches.
pub struct DiscreteExplorer<'a> {
    q: &'a QrtInstance,
    space: Rc<DiscreteSpace>,
    steps: Rc<Vec<Vec<Step>>>,
    adjacency: Vec<Option<Successors>>,
    closures: BTreeMap<usize, Option<Rc<TensorClosure>>>,
}

impl<'a> DiscreteExplorer<'a> {
    pub fn new(q: &'a QrtInstance, max_width: usize) -> Result<Self, ModelError> {
        let space = Rc::new(DiscreteSpace::new(q.base_dim, max_width)?);
        let steps = Rc::new((0..=max_width).map(|w| steps_for_width(q, w, max_width)).collect());
        let size = space.size_up_to(max_width);
        Ok(Self {
            q,
            space,
            steps,
            adjacency: vec![None; size],
            closures: BTreeMap::new(),
        })
    }

    pub fn instance(&self) -> &'a QrtInstance {
        self.q
    }

    pub fn max_width(&self) -> usize {
        self.space.max_width
    }

    pub fn ensure_width(&mut self, width: usize) -> Result<(), ModelError> {
        if width > self.space.max_width {
            *self = Self::new(self.q, width)?;
        }
        Ok(())
    }

    fn ensure_successors(&mut self, node: u32) {
        if self.adjacency[node as usize].is_none() {
            let t = self.space.decode(node);
            let steps = &self.steps[t.len()];
            let mut out = Vec::with_capacity(steps.len());
            for (si, step) in steps.iter().enumerate() {
                let next = super::apply_step_tuple(self.q, step, &t);
                let ni = self.space.index(&next);
                if ni != node {
                    out.push((ni, si as u32));
                }
            }
            self.adjacency[node as usize] = Some(out.into_boxed_slice());
        }
    }

    /// All tuples reachable from `source` through systems of at most `width`
    /// subsystems and words of at most `depth` steps.
    pub fn reach(&mut self, source: &[u8], width: usize, depth: Option<usize>) -> Result<DiscreteReach, ModelError> {
        let width = width.max(source.len());
        self.ensure_width(width)?;
        let size = self.space.size_up_to(width);
        let limit = size as u32;
        let mut parent = vec![UNSEEN; size];
        let mut via = vec![0u32; size];
        let mut dist = vec![0u32; size];
        let start = self.space.index(source);
        parent[start as usize] = start;
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            let d = dist[node as usize];
            if depth.is_some_and(|lim| d as usize >= lim) {
                continue;
            }
            self.ensure_successors(node);
            let cap = self.q.closure_cap;
            for &(next, si) in self.adjacency[node as usize].as_deref().unwrap_or(&[]) {
                if next >= limit || parent[next as usize] != UNSEEN {
                    continue;
                }
                parent[next as usize] = node;
                via[next as usize] = si;
                dist[next as usize] = d + 1;
                order.push(next);
                if order.len() > cap {
                    return Err(ModelError::ClosureCap { cap });
                }
                queue.push_back(next);
            }
        }
        Ok(DiscreteReach {
            space: Rc::clone(&self.space),
            start,
            width,
            parent,
            via,
            order,
            steps: Rc::clone(&self.steps),
        })
    }
}

impl DiscreteExplorer<'_> {
    /// The tensor-closed reach at `width`, computed once per width. None when
    /// the tuple space is too large to close.
    pub fn closure(&mut self, width: usize) -> Result<Option<Rc<TensorClosure>>, ModelError> {
        if let Some(c) = self.closures.get(&width) {
            return Ok(c.clone());
        }
        let c = TensorClosure::compute(self, width)?.map(Rc::new);
        self.closures.insert(width, c.clone());
        Ok(c)
    }

    pub fn index_of(&self, t: &[u8]) -> u32 {
        self.space.index(t)
    }

    /// `out[s][t]` iff `targets[t]` is reachable from `sources[s]` through
    /// systems of at most `width` subsystems, under the full closure.
    ///
    /// One pass of Tarjan's algorithm over the part of the graph reachable from
    /// the sources; target sets are propagated along the condensation.
    pub fn reachability(&mut self, sources: &[Vec<u8>], targets: &[Vec<u8>], width: usize) -> Result<Vec<Vec<bool>>, ModelError> {
        let width = sources.iter().chain(targets).map(Vec::len).fold(width, usize::max);
        self.ensure_width(width)?;
        let size = self.space.size_up_to(width);
        let limit = size as u32;
        let words = targets.len().div_ceil(64).max(1);
        let mut target_bits: HashBits = HashBits::new(words);
        for (ti, t) in targets.iter().enumerate() {
            target_bits.mark(self.space.index(t), ti);
        }

        let mut index = vec![UNSEEN; size];
        let mut low = vec![0u32; size];
        let mut on_stack = vec![false; size];
        let mut comp = vec![UNSEEN; size];
        let mut comp_bits: Vec<Vec<u64>> = Vec::new();
        let mut stack: Vec<u32> = Vec::new();
        let mut counter = 0u32;
        let mut visited = 0usize;
        let cap = self.q.closure_cap;

        for src in sources {
            let root = self.space.index(src);
            if index[root as usize] != UNSEEN {
                continue;
            }
            // Frames: (node, next edge position).
            let mut frames: Vec<(u32, usize)> = vec![(root, 0)];
            index[root as usize] = counter;
            low[root as usize] = counter;
            counter += 1;
            visited += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            while let Some(&mut (node, ref mut pos)) = frames.last_mut() {
                self.ensure_successors(node);
                let succ = self.adjacency[node as usize].as_deref().unwrap_or(&[]);
                let mut descended = false;
                while *pos < succ.len() {
                    let next = succ[*pos].0;
                    *pos += 1;
                    if next >= limit {
                        continue;
                    }
                    if index[next as usize] == UNSEEN {
                        index[next as usize] = counter;
                        low[next as usize] = counter;
                        counter += 1;
                        visited += 1;
                        if visited > cap {
                            return Err(ModelError::ClosureCap { cap });
                        }
                        stack.push(next);
                        on_stack[next as usize] = true;
                        frames.push((next, 0));
                        descended = true;
                        break;
                    } else if on_stack[next as usize] {
                        low[node as usize] = low[node as usize].min(index[next as usize]);
                    }
                }
                if descended {
                    continue;
                }
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent as usize] = low[parent as usize].min(low[node as usize]);
                }
                if low[node as usize] == index[node as usize] {
                    let c = comp_bits.len() as u32;
                    let mut bits = vec![0u64; words];
                    let mut members = Vec::new();
                    loop {
                        let v = stack.pop().expect("Tarjan stack holds the component");
                        on_stack[v as usize] = false;
                        comp[v as usize] = c;
                        target_bits.or_into(v, &mut bits);
                        members.push(v);
                        if v == node {
                            break;
                        }
                    }
                    // Successor components were all emitted earlier.
                    for &v in &members {
                        for &(next, _) in self.adjacency[v as usize].as_deref().unwrap_or(&[]) {
                            if next < limit {
                                let nc = comp[next as usize];
                                if nc != c && nc != UNSEEN {
                                    for (b, o) in bits.iter_mut().zip(&comp_bits[nc as usize]) {
                                        *b |= o;
                                    }
                                }
                            }
                        }
                    }
                    comp_bits.push(bits);
                }
            }
        }
        Ok(sources
            .iter()
            .map(|s| {
                let bits = &comp_bits[comp[self.space.index(s) as usize] as usize];
                (0..targets.len()).map(|t| bits[t / 64] >> (t % 64) & 1 == 1).collect()
            })
            .collect())
    }
}

/// Sparse map from node index to a target bitset.
struct HashBits {
    words: usize,
    bits: std::collections::HashMap<u32, Vec<u64>>,
}

impl HashBits {
    fn new(words: usize) -> Self {
        Self {
            words,
            bits: std::collections::HashMap::new(),
        }
    }

    fn mark(&mut self, node: u32, t: usize) {
        let words = self.words;
        self.bits.entry(node).or_insert_with(|| vec![0; words])[t / 64] |= 1 << (t % 64);
    }

    fn or_into(&self, node: u32, out: &mut [u64]) {
        if let Some(b) = self.bits.get(&node) {
            for (o, x) in out.iter_mut().zip(b) {
                *o |= x;
            }
        }
    }
}

/// Result of a discrete search: reachable tuples with shortest witnesses.
#[derive(Debug, Clone)]
pub struct DiscreteReach {
    space: Rc<DiscreteSpace>,
    start: u32,
    width: usize,
    parent: Vec<u32>,
    via: Vec<u32>,
    order: Vec<u32>,
    steps: Rc<Vec<Vec<Step>>>,
}

impl DiscreteReach {
    pub fn contains(&self, t: &[u8]) -> bool {
        t.len() <= self.width && self.parent[self.space.index(t) as usize] != UNSEEN
    }

    pub fn word_to(&self, t: &[u8]) -> Option<Word> {
        if !self.contains(t) {
            return None;
        }
        let mut node = self.space.index(t);
        let mut steps = Vec::new();
        while node != self.start {
            let prev = self.parent[node as usize];
            let w = self.space.width_of(prev);
            steps.push(self.steps[w][self.via[node as usize] as usize].clone());
            node = prev;
        }
        steps.reverse();
        Some(Word(steps))
    }

    /// Reached tuples in discovery order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.order.iter().map(|&n| self.space.decode(n))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_index_round_trips() {
        let s = DiscreteSpace::new(3, 4).unwrap();
        assert_eq!(s.size_up_to(4), 1 + 3 + 9 + 27 + 81);
        for t in [vec![], vec![2], vec![0, 0], vec![2, 1, 0, 2]] {
            let i = s.index(&t);
            assert_eq!(s.decode(i), t);
            assert_eq!(s.width_of(i), t.len());
        }
    }

    #[test]
    fn ordered_choices_counts() {
        assert_eq!(ordered_choices(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(ordered_choices(3, 2).len(), 6);
        assert_eq!(ordered_choices(4, 3).len(), 24);
        assert!(ordered_choices(1, 2).is_empty());
    }

    #[test]
    fn reachability_matches_breadth_first_search() {
        let q = crate::model::load_instance_str(
            r#"{"flavor": "discrete", "alphabet": ["0", "1", "2"], "max_level": 3,
                "generators": [
                    {"name": "id", "kind": "builtin:identity"},
                    {"name": "tr", "kind": "builtin:trace"},
                    {"name": "append0", "kind": "builtin:append", "payload": "0"},
                    {"name": "up", "kind": "discrete", "payload": {"0": "1", "1": "2", "2": "2"}},
                    {"name": "merge", "kind": "discrete", "payload": {
                        "00": "0", "01": "1", "02": "1", "10": "1", "11": "2", "12": "0",
                        "20": "1", "21": "0", "22": "2"}}
                ]}"#,
        )
        .unwrap();
        let mut x = DiscreteExplorer::new(&q, 3).unwrap();
        let all: Vec<Vec<u8>> = (0..=3).flat_map(|k| crate::model::all_tuples(3, k)).collect();
        let sources: Vec<Vec<u8>> = all.iter().filter(|t| !t.is_empty()).step_by(3).cloned().collect();
        let fast = x.reachability(&sources, &all, 3).unwrap();
        for (s, row) in sources.iter().zip(&fast) {
            let r = x.reach(s, 3, None).unwrap();
            for (t, &hit) in all.iter().zip(row) {
                assert_eq!(hit, r.contains(t), "{s:?} -> {t:?}");
            }
        }
    }

    #[test]
    fn oversized_space_is_rejected() {
        assert!(matches!(DiscreteSpace::new(16, 12), Err(ModelError::SpaceTooLarge { .. })));
    }
}
