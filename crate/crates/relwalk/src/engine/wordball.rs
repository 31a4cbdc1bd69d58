//! Word balls of a free product stored as a trie of normal forms.
//!
//! Nodes are numbered breadth first by syllable count. The children of a
//! node are the letters (non-identity factor elements) that fit in the
//! remaining word-length budget and are not in the factor of the node's
//! last syllable, laid out contiguously in letter order. Right
//! multiplication by a letter is then a constant-time index computation.

use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::freeprod::{factor_letters, FactorElement, FactorId, GroupElement, GroupSpec};

/// Index meaning "outside the ball".
pub const OUTSIDE: u32 = u32::MAX;
const IDENT: u32 = u32::MAX - 1;

/// Bytes of index data per node.
pub const NODE_BYTES: usize = 18;

/// All letters up to a word length, sorted by length then element order.
#[derive(Debug, Clone)]
pub struct LetterTable {
    letters: Vec<FactorElement>,
    len: Vec<u32>,
    factor: Vec<FactorId>,
    index: HashMap<FactorElement, u32>,
    upto: Vec<u32>,
    rank_excl: Vec<Vec<u32>>,
}

impl LetterTable {
    pub fn new(spec: &GroupSpec, max_len: u32) -> Self {
        let mut all: Vec<(u32, FactorElement)> = Vec::new();
        for id in 1..=spec.n_factors() as FactorId {
            for s in factor_letters(spec, id, max_len as u64) {
                all.push((spec.syllable_len(&s) as u32, s));
            }
        }
        all.sort();
        let len: Vec<u32> = all.iter().map(|(l, _)| *l).collect();
        let letters: Vec<FactorElement> = all.into_iter().map(|(_, s)| s).collect();
        let factor: Vec<FactorId> = letters.iter().map(|s| s.factor).collect();
        let index = letters
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut upto = vec![0u32; max_len as usize + 1];
        for (l, slot) in upto.iter_mut().enumerate() {
            *slot = len.partition_point(|&x| x as usize <= l) as u32;
        }
        let n = spec.n_factors();
        let mut rank_excl = vec![vec![0u32; letters.len()]; n];
        for (f, ranks) in rank_excl.iter_mut().enumerate() {
            let mut seen = 0u32;
            for (i, slot) in ranks.iter_mut().enumerate() {
                *slot = i as u32 - seen;
                if factor[i] as usize == f + 1 {
                    seen += 1;
                }
            }
        }
        LetterTable {
            letters,
            len,
            factor,
            index,
            upto,
            rank_excl,
        }
    }

    pub fn letter(&self, id: u32) -> &FactorElement {
        &self.letters[id as usize]
    }

    pub fn id(&self, s: &FactorElement) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn letter_len(&self, id: u32) -> u32 {
        self.len[id as usize]
    }

    pub fn count(&self) -> usize {
        self.letters.len()
    }
}

/// One right-multiplication step by a fixed letter.
#[derive(Debug, Clone)]
pub struct Step {
    letter: u32,
    prod: Vec<u32>,
}

/// Right multiplication by a fixed element, as a sequence of letter steps.
#[derive(Debug, Clone)]
pub struct Move {
    steps: Vec<Step>,
}

#[derive(Debug, Clone)]
pub struct WordBall {
    spec: GroupSpec,
    radius: u32,
    table: LetterTable,
    parent: Vec<u32>,
    letter: Vec<u32>,
    first_child: Vec<u32>,
    wlen: Vec<u16>,
    depth: Vec<u16>,
    maxsyl: Vec<u16>,
}

/// Number of elements of word length at most `radius`.
pub fn ball_size(spec: &GroupSpec, radius: u32) -> u128 {
    let n = spec.n_factors();
    let w = radius as usize;
    let mut per = vec![vec![0u128; w + 1]; n];
    for id in 1..=n as FactorId {
        for s in factor_letters(spec, id, radius as u64) {
            per[id as usize - 1][spec.syllable_len(&s) as usize] += 1;
        }
    }
    // cnt[b][f]: subtree size with budget b below a syllable of factor f (0: none).
    let mut cnt = vec![vec![0u128; n + 1]; w + 1];
    for b in 0..=w {
        for f in 0..=n {
            let mut c = 1u128;
            for g in 1..=n {
                if g == f {
                    continue;
                }
                for l in 1..=b {
                    c = c.saturating_add(per[g - 1][l].saturating_mul(cnt[b - l][g]));
                }
            }
            cnt[b][f] = c;
        }
    }
    cnt[w][0]
}

impl WordBall {
    /// Builds the ball of word radius `radius`. Letters up to
    /// `max(radius, letter_radius)` are indexed so that moves by long
    /// support elements stay exact.
    pub fn new(spec: &GroupSpec, radius: u32, letter_radius: u32) -> Self {
        let size = ball_size(spec, radius);
        assert!(
            size < (u32::MAX - 2) as u128,
            "word ball too large to index"
        );
        let size = size as usize;
        let table = LetterTable::new(spec, radius.max(letter_radius));
        let mut parent = Vec::with_capacity(size);
        let mut letter = Vec::with_capacity(size);
        let mut first_child = vec![0u32; size];
        let mut wlen = Vec::with_capacity(size);
        let mut depth = Vec::with_capacity(size);
        let mut maxsyl = Vec::with_capacity(size);
        parent.push(OUTSIDE);
        letter.push(OUTSIDE);
        wlen.push(0u16);
        depth.push(0u16);
        maxsyl.push(0u16);
        let mut v = 0usize;
        while v < parent.len() {
            first_child[v] = parent.len() as u32;
            let budget = radius - wlen[v] as u32;
            let f = if v == 0 {
                0
            } else {
                table.factor[letter[v] as usize]
            };
            for id in 0..table.upto[budget as usize] {
                if table.factor[id as usize] == f {
                    continue;
                }
                let l = table.len[id as usize] as u16;
                parent.push(v as u32);
                letter.push(id);
                wlen.push(wlen[v] + l);
                depth.push(depth[v] + 1);
                maxsyl.push(maxsyl[v].max(l));
            }
            v += 1;
        }
        debug_assert_eq!(parent.len(), size);
        WordBall {
            spec: spec.clone(),
            radius,
            table,
            parent,
            letter,
            first_child,
            wlen,
            depth,
            maxsyl,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn table(&self) -> &LetterTable {
        &self.table
    }

    #[inline]
    pub fn word_len(&self, v: u32) -> u32 {
        self.wlen[v as usize] as u32
    }

    /// Syllable count of node `v`.
    #[inline]
    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize] as u32
    }

    /// Longest syllable (factor word length) of node `v`.
    #[inline]
    pub fn max_syllable(&self, v: u32) -> u32 {
        self.maxsyl[v as usize] as u32
    }

    pub fn word_lens(&self) -> &[u16] {
        &self.wlen
    }

    #[inline]
    fn node_factor(&self, v: u32) -> FactorId {
        if v == 0 {
            0
        } else {
            self.table.factor[self.letter[v as usize] as usize]
        }
    }

    #[inline]
    fn child(&self, v: u32, id: u32) -> u32 {
        let f = self.node_factor(v);
        let off = if f == 0 {
            id
        } else {
            self.table.rank_excl[f as usize - 1][id as usize]
        };
        self.first_child[v as usize] + off
    }

    /// The group element stored at node `v`.
    pub fn element(&self, v: u32) -> GroupElement {
        let mut syl = Vec::with_capacity(self.depth(v) as usize);
        let mut x = v;
        while x != 0 {
            syl.push(self.table.letter(self.letter[x as usize]).clone());
            x = self.parent[x as usize];
        }
        syl.reverse();
        GroupElement::from_reduced(syl)
    }

    /// Node index of `g`, if it lies in the ball.
    pub fn locate(&self, g: &GroupElement) -> Option<u32> {
        let mut v = 0u32;
        for s in g.syllables() {
            let id = self.table.id(s)?;
            if self.word_len(v) + self.table.letter_len(id) > self.radius {
                return None;
            }
            v = self.child(v, id);
        }
        Some(v)
    }

    /// Precomputes right multiplication by `g`.
    pub fn mover(&self, g: &GroupElement) -> Option<Move> {
        let mut steps = Vec::with_capacity(g.relative_len());
        for s in g.syllables() {
            let id = self.table.id(s)?;
            let mut prod = vec![OUTSIDE; self.table.count()];
            for (t, slot) in prod.iter_mut().enumerate() {
                let lt = &self.table.letters[t];
                if lt.factor != s.factor {
                    continue;
                }
                let m = self.spec.factor_mul(lt, s);
                *slot = if m.is_zero() {
                    IDENT
                } else {
                    self.table.id(&m).unwrap_or(OUTSIDE)
                };
            }
            steps.push(Step { letter: id, prod });
        }
        Some(Move { steps })
    }

    #[inline]
    fn step(&self, v: u32, st: &Step) -> u32 {
        let s = st.letter;
        let ls = self.table.len[s as usize];
        if v == 0 {
            return if ls <= self.radius {
                self.child(0, s)
            } else {
                OUTSIDE
            };
        }
        let t = self.letter[v as usize];
        if self.table.factor[t as usize] != self.table.factor[s as usize] {
            return if self.word_len(v) + ls <= self.radius {
                self.child(v, s)
            } else {
                OUTSIDE
            };
        }
        let m = st.prod[t as usize];
        let p = self.parent[v as usize];
        match m {
            IDENT => p,
            OUTSIDE => OUTSIDE,
            m => {
                if self.word_len(p) + self.table.len[m as usize] <= self.radius {
                    self.child(p, m)
                } else {
                    OUTSIDE
                }
            }
        }
    }

    /// Node of `v * g`, or [`OUTSIDE`].
    #[inline]
    pub fn apply(&self, v: u32, mv: &Move) -> u32 {
        let mut x = v;
        for st in &mv.steps {
            x = self.step(x, st);
            if x == OUTSIDE {
                break;
            }
        }
        x
    }
}
