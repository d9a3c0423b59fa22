//! The resourcefulness preorder on a finite roster: φ ⪰ ψ when a generated
//! free operation maps φ to ψ.

use crate::model::{Explorer, ModelError, QrtInstance, RosterState, State, Word};

/// Outcome of a single convertibility query.
#[derive(Debug, Clone, PartialEq)]
pub struct Conversion {
    pub convertible: bool,
    pub witness: Option<Word>,
    /// Word-length bound the search ran under; `None` for the full closure.
    pub depth: Option<usize>,
}

/// Decides φ ⪰ ψ over the generated operations. A negative answer is exact for
/// the full closure and "not convertible at depth d" otherwise.
pub fn convertible(q: &QrtInstance, from: &State, to: &State) -> Result<Conversion, ModelError> {
    let mut explorer = Explorer::new(q)?;
    convertible_with(&mut explorer, q, from, to)
}

pub fn convertible_with(
    explorer: &mut Explorer<'_>,
    q: &QrtInstance,
    from: &State,
    to: &State,
) -> Result<Conversion, ModelError> {
    let width = q.one_shot_width(&[from.level(), to.level()]);
    let reach = explorer.closed_reach(from, width)?;
    let witness = reach.witness(to).map(|w| if w.is_empty() { q.identity_word(from.level()) } else { w });
    Ok(Conversion {
        convertible: witness.is_some(),
        witness,
        depth: q.depth_limit(),
    })
}

/// ⪰ on the roster of one level, with a witness word for every true entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PreorderRelation {
    pub level: usize,
    pub roster: Vec<RosterState>,
    /// `reaches[i][j]` iff roster state i ⪰ roster state j.
    pub reaches: Vec<Vec<bool>>,
    pub witnesses: Vec<Vec<Option<Word>>>,
    pub depth: Option<usize>,
}

impl PreorderRelation {
    /// Builds a relation from an explicit matrix, without witnesses.
    pub fn from_matrix(level: usize, roster: Vec<RosterState>, reaches: Vec<Vec<bool>>) -> Self {
        let n = roster.len();
        assert!(reaches.len() == n && reaches.iter().all(|r| r.len() == n), "relation matrix must be square");
        Self {
            level,
            roster,
            reaches,
            witnesses: vec![vec![None; n]; n],
            depth: None,
        }
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.roster.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.roster.iter().position(|r| r.label == label)
    }

    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        self.reaches[i][j] && self.reaches[j][i]
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.reaches[i][i])
    }

    /// A triple (i, j, k) with i ⪰ j ⪰ k but not i ⪰ k.
    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in (0..n).filter(|&j| self.reaches[i][j]) {
                if let Some(k) = (0..n).find(|&k| self.reaches[j][k] && !self.reaches[i][k]) {
                    return Some((i, j, k));
                }
            }
        }
        None
    }

    /// The first true entry whose witness does not replay to its target.
    pub fn witness_failure(&self, q: &QrtInstance) -> Result<Option<(usize, usize)>, ModelError> {
        for (i, row) in self.witnesses.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if let Some(w) = w {
                    let out = q.replay(w, &self.roster[i].state)?;
                    if !out.approx_eq(&self.roster[j].state, crate::model::TAU_CONV) {
                        return Ok(Some((i, j)));
                    }
                }
            }
        }
        Ok(None)
    }
}

pub fn preorder_matrix(q: &QrtInstance, level: usize) -> Result<PreorderRelation, ModelError> {
    let mut explorer = Explorer::new(q)?;
    preorder_matrix_with(&mut explorer, q, level)
}

pub fn preorder_matrix_with(
    explorer: &mut Explorer<'_>,
    q: &QrtInstance,
    level: usize,
) -> Result<PreorderRelation, ModelError> {
    let roster = q.roster(level);
    let n = roster.len();
    let width = q.one_shot_width(&[level]);
    let mut reaches = vec![vec![false; n]; n];
    let mut witnesses = vec![vec![None; n]; n];
    for i in 0..n {
        let reach = explorer.closed_reach(&roster[i].state, width)?;
        for j in 0..n {
            let w = if i == j {
                Some(q.identity_word(level))
            } else {
                reach.witness(&roster[j].state)
            };
            reaches[i][j] = w.is_some();
            witnesses[i][j] = w;
        }
    }
    Ok(PreorderRelation {
        level,
        roster,
        reaches,
        witnesses,
        depth: q.depth_limit(),
    })
}

/// The ∼-classes and the order they inherit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientOrder {
    /// Roster indices per class, classes ordered by their first member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// `above[a][b]` iff class a ⪰ class b strictly.
    pub above: Vec<Vec<bool>>,
    pub maximal_classes: Vec<usize>,
    pub minimal_classes: Vec<usize>,
}

pub fn equivalence_classes(rel: &PreorderRelation) -> QuotientOrder {
    let n = rel.len();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| class_of[j] == usize::MAX && rel.equivalent(i, j)).collect();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members);
    }
    let c = classes.len();
    let mut above = vec![vec![false; c]; c];
    for a in 0..c {
        for b in 0..c {
            above[a][b] = a != b && rel.reaches[classes[a][0]][classes[b][0]];
        }
    }
    let maximal_classes = (0..c).filter(|&a| (0..c).all(|b| !above[b][a])).collect();
    let minimal_classes = (0..c).filter(|&a| (0..c).all(|b| !above[a][b])).collect();
    QuotientOrder {
        classes,
        class_of,
        above,
        maximal_classes,
        minimal_classes,
    }
}

/// The maximally resourceful states, with an upper bound for every state.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalSet {
    pub members: Vec<usize>,
    /// For roster state ψ, the first maximal φ in roster order with φ ⪰ ψ.
    pub upper_bounds: Vec<Option<usize>>,
}

/// {φ : ψ ⪰ φ implies φ ⪰ ψ}.
pub fn maximal_set(rel: &PreorderRelation) -> MaximalSet {
    let n = rel.len();
    let members: Vec<usize> = (0..n)
        .filter(|&f| (0..n).all(|p| !rel.reaches[p][f] || rel.reaches[f][p]))
        .collect();
    let upper_bounds = (0..n).map(|p| members.iter().copied().find(|&f| rel.reaches[f][p])).collect();
    MaximalSet { members, upper_bounds }
}

/// {φ : φ ⪰ ψ implies ψ ⪰ φ}.
pub fn minimal_set(rel: &PreorderRelation) -> Vec<usize> {
    let n = rel.len();
    (0..n)
        .filter(|&f| (0..n).all(|p| !rel.reaches[f][p] || rel.reaches[p][f]))
        .collect()
}
