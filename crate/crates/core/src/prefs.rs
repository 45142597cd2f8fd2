//! Candidate sets, linear and partial votes, and the order-theoretic
//! primitives behind every solver: transitive closure, linear-extension
//! enumeration, and top-k placement feasibility.
//!
//! A partial vote is a strict partial order over candidate indices, stored
//! transitively closed as per-candidate ancestor bitmasks. Candidate identity
//! is the index into [`CandidateSet::labels`]; labels are for I/O only.

use crate::error::{Error, Result};

/// Hard ceiling on linear-extension enumeration.
pub const DEFAULT_EXTENSION_BUDGET: u64 = 10_000_000;

const MAX_CANDIDATES: usize = 64;

#[inline]
fn bit(i: usize) -> u64 {
    1u64 << i
}

/// An ordered set of distinct candidate labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    labels: Vec<String>,
}

impl CandidateSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Parameter("candidate set must be non-empty".into()));
        }
        if labels.len() > MAX_CANDIDATES {
            return Err(Error::TooManyCandidates { m: labels.len() });
        }
        for (i, a) in labels.iter().enumerate() {
            for b in labels.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::Parameter(format!("duplicate candidate label `{a}`")));
                }
            }
        }
        Ok(CandidateSet { labels })
    }

    pub fn from_names(names: &[&str]) -> Result<Self> {
        CandidateSet::new(names.iter().map(|s| s.to_string()).collect())
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A complete ranking, most-preferred candidate first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearVote {
    ranking: Vec<usize>,
}

impl LinearVote {
    pub fn new(ranking: Vec<usize>, m: usize) -> Result<Self> {
        if ranking.len() != m {
            return Err(Error::Dimension {
                expected: m,
                got: ranking.len(),
            });
        }
        let mut seen = 0u64;
        for &c in &ranking {
            if c >= m || seen & bit(c) != 0 {
                return Err(Error::Parameter(format!(
                    "ranking is not a permutation of 0..{m}"
                )));
            }
            seen |= bit(c);
        }
        Ok(LinearVote { ranking })
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn m(&self) -> usize {
        self.ranking.len()
    }

    /// 1-based position of a candidate.
    pub fn position(&self, c: usize) -> usize {
        self.ranking
            .iter()
            .position(|&x| x == c)
            .expect("candidate in ranking")
            + 1
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position(a) < self.position(b)
    }

    /// Candidates in the top `k` positions, as a bitmask.
    pub fn top_mask(&self, k: usize) -> u64 {
        self.ranking
            .iter()
            .take(k)
            .fold(0u64, |acc, &c| acc | bit(c))
    }
}

/// A strict partial order over candidates, transitively closed.
///
/// `above[i]` is the bitmask of candidates strictly preferred to `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialVote {
    m: usize,
    above: Vec<u64>,
}

impl PartialVote {
    /// The empty order: every pair incomparable.
    pub fn empty(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter(
                "a vote needs at least one candidate".into(),
            ));
        }
        if m > MAX_CANDIDATES {
            return Err(Error::TooManyCandidates { m });
        }
        Ok(PartialVote {
            m,
            above: vec![0; m],
        })
    }

    pub fn from_linear(v: &LinearVote) -> Self {
        let m = v.m();
        let mut above = vec![0u64; m];
        let mut seen = 0u64;
        for &c in v.ranking() {
            above[c] = seen;
            seen |= bit(c);
        }
        PartialVote { m, above }
    }

    /// Transitively closes `pairs` (each meaning "first strictly preferred to
    /// second") and validates irreflexivity and antisymmetry.
    pub fn transitive_close(pairs: &[(usize, usize)], m: usize) -> Result<Self> {
        let mut v = PartialVote::empty(m)?;
        for &(a, b) in pairs {
            if a >= m || b >= m {
                return Err(Error::Parameter(format!(
                    "pair ({a},{b}) out of range for m={m}"
                )));
            }
            if a == b {
                return Err(Error::Cycle { a, b });
            }
            v.above[b] |= bit(a);
        }
        // Warshall closure on ancestor masks.
        for k in 0..m {
            for i in 0..m {
                if v.above[i] & bit(k) != 0 {
                    v.above[i] |= v.above[k];
                }
            }
        }
        for i in 0..m {
            if v.above[i] & bit(i) != 0 {
                let j = (0..m)
                    .find(|&j| j != i && v.above[i] & bit(j) != 0 && v.above[j] & bit(i) != 0)
                    .unwrap_or(i);
                return Err(Error::Cycle {
                    a: i.min(j),
                    b: i.max(j),
                });
            }
        }
        Ok(v)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.above[b] & bit(a) != 0
    }

    /// Bitmask of candidates strictly preferred to `c`.
    pub fn above_mask(&self, c: usize) -> u64 {
        self.above[c]
    }

    /// Bitmask of candidates `c` is strictly preferred to.
    pub fn below_mask(&self, c: usize) -> u64 {
        let mut mask = 0u64;
        for i in 0..self.m {
            if self.above[i] & bit(c) != 0 {
                mask |= bit(i);
            }
        }
        mask
    }

    /// All ordered pairs (a, b) with a strictly preferred to b.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.m {
            for a in 0..self.m {
                if self.above[b] & bit(a) != 0 {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn pair_count(&self) -> usize {
        self.above
            .iter()
            .map(|&mask| mask.count_ones() as usize)
            .sum()
    }

    pub fn is_complete(&self) -> bool {
        self.pair_count() == self.m * (self.m - 1) / 2
    }

    /// Earliest (1-based) position `c` can take in any extension.
    pub fn min_position(&self, c: usize) -> usize {
        self.above[c].count_ones() as usize + 1
    }

    /// Latest (1-based) position `c` can take in any extension.
    pub fn max_position(&self, c: usize) -> usize {
        self.m - self.below_mask(c).count_ones() as usize
    }

    /// Transitive reduction: the pairs not implied by any other pair.
    pub fn reduction_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(a, b) in &self.pairs() {
            let between =
                (0..self.m).any(|x| self.above[b] & bit(x) != 0 && self.above[x] & bit(a) != 0);
            if !between {
                out.push((a, b));
            }
        }
        out
    }

    fn visit_extensions<F: FnMut(&[usize])>(&self, budget: u64, f: &mut F) -> Result<u64> {
        let m = self.m;
        let mut ranking: Vec<usize> = Vec::with_capacity(m);
        let mut used = 0u64;
        let mut count = 0u64;
        // Backtracking over remaining minimal elements, smallest index first,
        // yields extensions in lexicographic ranking order.
        let mut stack: Vec<usize> = vec![0];
        loop {
            let depth = ranking.len();
            if depth == m {
                count += 1;
                if count > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                f(&ranking);
                let last = ranking.pop().expect("non-empty");
                used &= !bit(last);
                stack.pop();
                *stack.last_mut().expect("root frame") = last + 1;
                continue;
            }
            let start = *stack.last().expect("frame");
            let mut chosen = None;
            for c in start..m {
                if used & bit(c) == 0 && self.above[c] & !used == 0 {
                    chosen = Some(c);
                    break;
                }
            }
            match chosen {
                Some(c) => {
                    ranking.push(c);
                    used |= bit(c);
                    stack.push(0);
                }
                None => {
                    if depth == 0 {
                        break;
                    }
                    let last = ranking.pop().expect("non-empty");
                    used &= !bit(last);
                    stack.pop();
                    *stack.last_mut().expect("frame") = last + 1;
                }
            }
        }
        Ok(count)
    }

    /// All linear extensions, in lexicographic ranking order, subject to an
    /// explicit budget.
    pub fn extensions_budgeted(&self, budget: u64) -> Result<Vec<LinearVote>> {
        let mut out = Vec::new();
        self.visit_extensions(budget, &mut |r| {
            out.push(LinearVote {
                ranking: r.to_vec(),
            });
        })?;
        Ok(out)
    }

    /// All linear extensions under the default budget.
    pub fn extensions(&self) -> Result<Vec<LinearVote>> {
        self.extensions_budgeted(DEFAULT_EXTENSION_BUDGET)
    }

    /// Number of linear extensions, by the same enumeration as `extensions`.
    pub fn count_extensions(&self) -> Result<u64> {
        self.visit_extensions(DEFAULT_EXTENSION_BUDGET, &mut |_| {})
    }

    /// Whether some extension places all of `include` within the top `k`
    /// positions and all of `exclude` outside them.
    ///
    /// Decided by order-ideal reasoning: with `B` the exclude set plus its
    /// descendants, the candidates whose ancestor closure avoids `B` form the
    /// largest ancestor-closed set `F` usable as a top segment; the answer is
    /// yes iff the ancestor closure of `include` fits inside `F` and `k` lies
    /// between the two sizes.
    pub fn placement_feasible(&self, include: &[usize], exclude: &[usize], k: usize) -> bool {
        debug_assert!(include.iter().all(|c| !exclude.contains(c)));
        if k > self.m {
            return false;
        }
        let mut closure_inc = 0u64;
        for &c in include {
            closure_inc |= bit(c) | self.above[c];
        }
        let mut blocked = 0u64;
        for &c in exclude {
            blocked |= bit(c) | self.below_mask(c);
        }
        let mut fitting = 0u64;
        for i in 0..self.m {
            if (self.above[i] | bit(i)) & blocked == 0 {
                fitting |= bit(i);
            }
        }
        if closure_inc & !fitting != 0 {
            return false;
        }
        let need = closure_inc.count_ones() as usize;
        let room = fitting.count_ones() as usize;
        need <= k && k <= room
    }

    /// Whether some extension places `x` at position `p` and `y` at position
    /// `q` simultaneously (both 1-based).
    pub fn position_pair_feasible(&self, x: usize, p: usize, y: usize, q: usize) -> bool {
        if x == y || p == q || p == 0 || q == 0 || p > self.m || q > self.m {
            return false;
        }
        let (u, pu, w, qw) = if p < q { (x, p, y, q) } else { (y, q, x, p) };
        match PairPlacement::new(self, u, w) {
            Some(ctx) => ctx.feasible(pu, qw),
            None => false,
        }
    }

    /// Largest per-vote value of `alphas[pos(cp)] - alphas[pos(c)]` over all
    /// extensions of this vote.
    pub fn max_score_gap(&self, alphas: &[i64], cp: usize, c: usize) -> i64 {
        debug_assert_eq!(alphas.len(), self.m);
        debug_assert_ne!(cp, c);
        if !self.prefers(c, cp) {
            // cp at its earliest and c at its latest are jointly achievable.
            return alphas[self.min_position(cp) - 1] - alphas[self.max_position(c) - 1];
        }
        // c is forced above cp: scan feasible position pairs.
        let ctx = PairPlacement::new(self, c, cp).expect("c above cp is consistent");
        let mut best = i64::MIN;
        for j in 1..self.m {
            for i in (j + 1)..=self.m {
                if ctx.feasible(j, i) {
                    best = best.max(alphas[i - 1] - alphas[j - 1]);
                }
            }
        }
        debug_assert!(best > i64::MIN);
        best
    }

    fn greedy_deferred(&self, hi: Option<usize>, lo: usize) -> LinearVote {
        let m = self.m;
        let mut ranking = Vec::with_capacity(m);
        let mut used = 0u64;
        let mut hi_pending = hi;
        while ranking.len() < m {
            let restrict = match hi_pending {
                Some(h) => {
                    if self.above[h] & !used == 0 {
                        hi_pending = None;
                        ranking.push(h);
                        used |= bit(h);
                        continue;
                    }
                    self.above[h]
                }
                None => !0u64,
            };
            let mut pick = None;
            for c in 0..m {
                if restrict & bit(c) == 0 || used & bit(c) != 0 || self.above[c] & !used != 0 {
                    continue;
                }
                if c != lo {
                    pick = Some(c);
                    break;
                }
                if pick.is_none() {
                    pick = Some(c);
                }
            }
            let c = pick.expect("some candidate is always available");
            ranking.push(c);
            used |= bit(c);
        }
        LinearVote { ranking }
    }

    /// The deterministic extension placing `hi` at its earliest possible
    /// position and, subject to that, `lo` at its latest; remaining ties by
    /// candidate index.
    pub fn extend_extreme(&self, hi: usize, lo: usize) -> LinearVote {
        debug_assert_ne!(hi, lo);
        self.greedy_deferred(Some(hi), lo)
    }

    /// The deterministic extension placing `lo` at its latest possible
    /// position; remaining ties by candidate index.
    pub fn extend_low(&self, lo: usize) -> LinearVote {
        self.greedy_deferred(None, lo)
    }

    /// The deterministic extension placing `hi` at its earliest possible
    /// position; remaining ties by candidate index.
    pub fn extend_high(&self, hi: usize) -> LinearVote {
        // `m` is never a candidate index, so nothing is deferred.
        self.greedy_deferred(Some(hi), self.m)
    }
}

/// O(1)-per-pair feasibility context for placing `u` above `w`.
struct PairPlacement {
    m: usize,
    anc_u_n: usize,
    f_uw_n: usize,
    f_w_n: usize,
    anc_w_less_u_n: usize,
    base_overlap: usize,
    w_prime_extra_n: usize,
}

impl PairPlacement {
    fn new(v: &PartialVote, u: usize, w: usize) -> Option<Self> {
        if v.prefers(w, u) {
            return None;
        }
        let m = v.m;
        let anc_u = v.above[u];
        let anc_w = v.above[w];
        let desc_u = v.below_mask(u);
        let desc_w = v.below_mask(w);
        let forbidden = bit(u) | bit(w) | desc_u | desc_w;
        let forb_w = bit(w) | desc_w;
        let mut f_uw = 0u64;
        let mut f_w = 0u64;
        for i in 0..m {
            let up = v.above[i] | bit(i);
            if up & forbidden == 0 {
                f_uw |= bit(i);
            }
            if up & forb_w == 0 {
                f_w |= bit(i);
            }
        }
        if anc_u & !f_uw != 0 || (v.above[u] | bit(u)) & forb_w != 0 {
            return None;
        }
        let w_prime = anc_w & f_uw;
        Some(PairPlacement {
            m,
            anc_u_n: anc_u.count_ones() as usize,
            f_uw_n: f_uw.count_ones() as usize,
            f_w_n: f_w.count_ones() as usize,
            anc_w_less_u_n: (anc_w & !bit(u)).count_ones() as usize,
            base_overlap: (anc_w & anc_u).count_ones() as usize,
            w_prime_extra_n: (w_prime & !anc_u).count_ones() as usize,
        })
    }

    /// Feasibility of `u` at position `p` and `w` at position `q`, p < q.
    fn feasible(&self, p: usize, q: usize) -> bool {
        if p < 1 || q <= p || q > self.m {
            return false;
        }
        if p - 1 < self.anc_u_n || p - 1 > self.f_uw_n {
            return false;
        }
        let extra = (p - 1 - self.anc_u_n).min(self.w_prime_extra_n);
        let min_above_w = p + self.anc_w_less_u_n - self.base_overlap - extra;
        q - 1 >= min_above_w && q - 1 <= self.f_w_n
    }
}

/// A sequence of complete votes over a shared candidate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub candidates: CandidateSet,
    pub votes: Vec<LinearVote>,
}

impl Profile {
    pub fn new(candidates: CandidateSet, votes: Vec<LinearVote>) -> Result<Self> {
        let m = candidates.m();
        for v in &votes {
            if v.m() != m {
                return Err(Error::Dimension {
                    expected: m,
                    got: v.m(),
                });
            }
        }
        Ok(Profile { candidates, votes })
    }

    pub fn m(&self) -> usize {
        self.candidates.m()
    }

    pub fn n(&self) -> usize {
        self.votes.len()
    }

    pub fn to_partial(&self) -> PartialProfile {
        PartialProfile {
            candidates: self.candidates.clone(),
            votes: self.votes.iter().map(PartialVote::from_linear).collect(),
        }
    }
}

/// A sequence of partial votes over a shared candidate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialProfile {
    pub candidates: CandidateSet,
    pub votes: Vec<PartialVote>,
}

impl PartialProfile {
    pub fn new(candidates: CandidateSet, votes: Vec<PartialVote>) -> Result<Self> {
        let m = candidates.m();
        for v in &votes {
            if v.m() != m {
                return Err(Error::Dimension {
                    expected: m,
                    got: v.m(),
                });
            }
        }
        Ok(PartialProfile { candidates, votes })
    }

    pub fn m(&self) -> usize {
        self.candidates.m()
    }

    pub fn n(&self) -> usize {
        self.votes.len()
    }
}
