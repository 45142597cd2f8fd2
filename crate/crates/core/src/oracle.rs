//! Definitionally exact, budget-bounded solvers for the possible-winner,
//! necessary-winner, coalitional-manipulation, weak-manipulation and
//! strong-manipulation problems. These are the ground truth the polynomial
//! solvers and the reduction gadgets are validated against.
//!
//! Candidates, manipulator votes and extensions are always iterated
//! lexicographically, so the first witness found is deterministic.

use crate::error::{Error, Result};
use crate::prefs::{LinearVote, PartialProfile, PartialVote, Profile};
use crate::rules::{Rule, Tally};

/// Default node budget: one node per evaluated (votes, extension) combination.
pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

/// Which manipulation problem an instance is being solved as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Pw,
    Nw,
    Cm,
    Wm,
    Sm,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Pw => "pw",
            ProblemKind::Nw => "nw",
            ProblemKind::Cm => "cm",
            ProblemKind::Wm => "wm",
            ProblemKind::Sm => "sm",
        }
    }
}

/// Rule, non-manipulator partial votes, manipulator count, and the candidate
/// the manipulators want to win.
#[derive(Debug, Clone)]
pub struct ManipulationInstance {
    pub rule: Rule,
    pub partial: PartialProfile,
    pub manipulators: usize,
    pub preferred: usize,
}

impl ManipulationInstance {
    pub fn new(
        rule: Rule,
        partial: PartialProfile,
        manipulators: usize,
        preferred: usize,
    ) -> Result<Self> {
        if manipulators == 0 {
            return Err(Error::Parameter("manipulator set must be non-empty".into()));
        }
        if preferred >= partial.m() {
            return Err(Error::Parameter(format!(
                "preferred candidate {preferred} outside candidate set of size {}",
                partial.m()
            )));
        }
        Ok(ManipulationInstance {
            rule,
            partial,
            manipulators,
            preferred,
        })
    }
}

/// Certificate for a yes answer: manipulator votes and, where the problem
/// quantifies existentially over extensions, one extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub manipulator_votes: Vec<LinearVote>,
    pub extension: Option<Vec<LinearVote>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Evaluated (votes, extension) combinations.
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub answer: bool,
    pub witness: Option<Witness>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn no(stats: SolveStats) -> Self {
        SolveResult {
            answer: false,
            witness: None,
            stats,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub budget: u64,
    /// Fix the preferred candidate at the top of every manipulator vote.
    /// Sound for every rule implemented here (promoting the preferred
    /// candidate never hurts it); kept off by default so the oracle stays a
    /// plain transcription of the definitions.
    pub prune_preferred_top: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: DEFAULT_ORACLE_BUDGET,
            prune_preferred_top: false,
        }
    }
}

struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Lexicographic permutations of `0..m`, optionally with a fixed first
/// element.
struct VoteStream {
    current: Option<Vec<usize>>,
    fixed_prefix: usize,
}

impl VoteStream {
    fn new(m: usize, fix_top: Option<usize>) -> Self {
        let mut first: Vec<usize> = Vec::with_capacity(m);
        match fix_top {
            Some(c) => {
                first.push(c);
                first.extend((0..m).filter(|&x| x != c));
            }
            None => first.extend(0..m),
        }
        VoteStream {
            current: Some(first),
            fixed_prefix: usize::from(fix_top.is_some()),
        }
    }
}

impl Iterator for VoteStream {
    type Item = LinearVote;

    fn next(&mut self) -> Option<LinearVote> {
        let cur = self.current.take()?;
        let vote = LinearVote::new(cur.clone(), cur.len()).expect("permutation");
        // Advance the suffix after the fixed prefix to the next permutation.
        let mut v = cur;
        let lo = self.fixed_prefix;
        let n = v.len();
        if n - lo >= 2 {
            let mut i = n - 1;
            while i > lo && v[i - 1] >= v[i] {
                i -= 1;
            }
            if i > lo {
                let mut j = n - 1;
                while v[j] <= v[i - 1] {
                    j -= 1;
                }
                v.swap(i - 1, j);
                v[i..].reverse();
                self.current = Some(v);
            }
        }
        Some(vote)
    }
}

/// Non-decreasing multisets of size `size` over a materialized vote list,
/// in lexicographic order. Rules here are anonymous, so vote order within
/// the manipulator coalition is irrelevant.
struct VoteMultisets {
    votes: Vec<LinearVote>,
    idx: Option<Vec<usize>>,
}

impl VoteMultisets {
    fn new(m: usize, size: usize, fix_top: Option<usize>, budget: u64) -> Result<Self> {
        let perms: u64 = {
            let free = m - usize::from(fix_top.is_some());
            (1..=free as u64).product()
        };
        if size > 1 && perms > budget.max(1) {
            // Even a single sweep per multiset would blow the budget.
            return Err(Error::BudgetExceeded { budget });
        }
        let votes: Vec<LinearVote> = if size == 1 {
            Vec::new() // streamed lazily by the caller
        } else {
            VoteStream::new(m, fix_top).collect()
        };
        Ok(VoteMultisets {
            votes,
            idx: Some(vec![0; size]),
        })
    }
}

impl Iterator for VoteMultisets {
    type Item = Vec<LinearVote>;

    fn next(&mut self) -> Option<Vec<LinearVote>> {
        let idx = self.idx.take()?;
        let out: Vec<LinearVote> = idx.iter().map(|&i| self.votes[i].clone()).collect();
        let mut next = idx;
        let k = next.len();
        let last = self.votes.len() - 1;
        let mut pos = k;
        while pos > 0 {
            if next[pos - 1] < last {
                let v = next[pos - 1] + 1;
                for slot in next.iter_mut().skip(pos - 1) {
                    *slot = v;
                }
                self.idx = Some(next);
                break;
            }
            pos -= 1;
        }
        Some(out)
    }
}

enum ManipulatorVotes {
    Single(VoteStream),
    Multi(VoteMultisets),
}

impl ManipulatorVotes {
    fn new(m: usize, size: usize, fix_top: Option<usize>, budget: u64) -> Result<Self> {
        if size == 1 {
            Ok(ManipulatorVotes::Single(VoteStream::new(m, fix_top)))
        } else {
            Ok(ManipulatorVotes::Multi(VoteMultisets::new(
                m, size, fix_top, budget,
            )?))
        }
    }
}

impl Iterator for ManipulatorVotes {
    type Item = Vec<LinearVote>;

    fn next(&mut self) -> Option<Vec<LinearVote>> {
        match self {
            ManipulatorVotes::Single(s) => s.next().map(|v| vec![v]),
            ManipulatorVotes::Multi(m) => m.next(),
        }
    }
}

/// Pre-expanded joint-extension space of a partial profile. Votes with a
/// single extension are folded into a base tally once.
struct ExtensionSpace {
    m: usize,
    base: Tally,
    fixed: Vec<(usize, LinearVote)>,
    free: Vec<(usize, Vec<LinearVote>)>,
    n_votes: usize,
}

impl ExtensionSpace {
    fn build(p: &PartialProfile, budget: u64) -> Result<Self> {
        let m = p.m();
        let mut base = Tally::new(m);
        let mut fixed = Vec::new();
        let mut free = Vec::new();
        for (i, v) in p.votes.iter().enumerate() {
            let exts = v.extensions_budgeted(budget)?;
            if exts.len() == 1 {
                let only = exts.into_iter().next().expect("one extension");
                base.add_vote(&only);
                fixed.push((i, only));
            } else {
                free.push((i, exts));
            }
        }
        Ok(ExtensionSpace {
            m,
            base,
            fixed,
            free,
            n_votes: p.n(),
        })
    }

    /// Full extension in original vote order for a free-slot assignment.
    fn assemble(&self, assignment: &[usize]) -> Vec<LinearVote> {
        let mut out: Vec<Option<LinearVote>> = vec![None; self.n_votes];
        for (i, v) in &self.fixed {
            out[*i] = Some(v.clone());
        }
        for (slot, (i, exts)) in self.free.iter().enumerate() {
            out[*i] = Some(exts[assignment[slot]].clone());
        }
        out.into_iter().map(|v| v.expect("assigned")).collect()
    }

    /// Walk joint extensions in lexicographic order. The callback receives
    /// the free-slot assignment and a tally of base + assigned free votes +
    /// `extra`; it returns `true` to stop early.
    fn for_each_joint<F>(
        &self,
        extra: &[LinearVote],
        budget: &mut Budget,
        mut f: F,
    ) -> Result<Option<Vec<usize>>>
    where
        F: FnMut(&Tally) -> bool,
    {
        let mut with_extra = self.base.clone();
        for v in extra {
            with_extra.add_vote(v);
        }
        let mut assignment = vec![0usize; self.free.len()];
        loop {
            budget.spend()?;
            let mut tally = with_extra.clone();
            for (slot, (_, exts)) in self.free.iter().enumerate() {
                tally.add_vote(&exts[assignment[slot]]);
            }
            if f(&tally) {
                return Ok(Some(assignment));
            }
            // Odometer: advance the last slot, lexicographic over tuples.
            let mut pos = assignment.len();
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                if assignment[pos - 1] + 1 < self.free[pos - 1].1.len() {
                    assignment[pos - 1] += 1;
                    for a in assignment.iter_mut().skip(pos) {
                        *a = 0;
                    }
                    break;
                }
                pos -= 1;
            }
        }
    }
}

/// Possible winner: does some joint extension make `c` the unique winner?
pub fn solve_pw(rule: &Rule, p: &PartialProfile, c: usize) -> Result<SolveResult> {
    solve_pw_opts(rule, p, c, &OracleOptions::default())
}

pub fn solve_pw_opts(
    rule: &Rule,
    p: &PartialProfile,
    c: usize,
    opts: &OracleOptions,
) -> Result<SolveResult> {
    let space = ExtensionSpace::build(p, opts.budget)?;
    let mut budget = Budget::new(opts.budget);
    let hit = space.for_each_joint(&[], &mut budget, |tally| {
        tally.unique_winner(rule).expect("valid rule") == Some(c)
    })?;
    let stats = SolveStats { nodes: budget.used };
    Ok(match hit {
        Some(assignment) => SolveResult {
            answer: true,
            witness: Some(Witness {
                manipulator_votes: vec![],
                extension: Some(space.assemble(&assignment)),
            }),
            stats,
        },
        None => SolveResult::no(stats),
    })
}

/// Necessary winner: is `c` the unique winner in every joint extension?
/// On a no answer the witness carries a counterexample extension.
pub fn solve_nw(rule: &Rule, p: &PartialProfile, c: usize) -> Result<SolveResult> {
    solve_nw_opts(rule, p, c, &OracleOptions::default())
}

pub fn solve_nw_opts(
    rule: &Rule,
    p: &PartialProfile,
    c: usize,
    opts: &OracleOptions,
) -> Result<SolveResult> {
    let space = ExtensionSpace::build(p, opts.budget)?;
    let mut budget = Budget::new(opts.budget);
    let hit = space.for_each_joint(&[], &mut budget, |tally| {
        tally.unique_winner(rule).expect("valid rule") != Some(c)
    })?;
    let stats = SolveStats { nodes: budget.used };
    Ok(match hit {
        Some(assignment) => SolveResult {
            answer: false,
            witness: Some(Witness {
                manipulator_votes: vec![],
                extension: Some(space.assemble(&assignment)),
            }),
            stats,
        },
        None => SolveResult {
            answer: true,
            witness: None,
            stats,
        },
    })
}

/// Coalitional manipulation with complete information: can `manipulators`
/// additional votes make `c` the unique winner of `p` extended by them?
pub fn solve_cm(rule: &Rule, p: &Profile, manipulators: usize, c: usize) -> Result<SolveResult> {
    solve_cm_opts(rule, p, manipulators, c, &OracleOptions::default())
}

pub fn solve_cm_opts(
    rule: &Rule,
    p: &Profile,
    manipulators: usize,
    c: usize,
    opts: &OracleOptions,
) -> Result<SolveResult> {
    if manipulators == 0 {
        return Err(Error::Parameter("manipulator set must be non-empty".into()));
    }
    let m = p.m();
    let base = Tally::from_votes(m, &p.votes);
    let fix = opts.prune_preferred_top.then_some(c);
    let mut budget = Budget::new(opts.budget);
    for q in ManipulatorVotes::new(m, manipulators, fix, opts.budget)? {
        budget.spend()?;
        let mut tally = base.clone();
        for v in &q {
            tally.add_vote(v);
        }
        if tally.unique_winner(rule)? == Some(c) {
            return Ok(SolveResult {
                answer: true,
                witness: Some(Witness {
                    manipulator_votes: q,
                    extension: None,
                }),
                stats: SolveStats { nodes: budget.used },
            });
        }
    }
    Ok(SolveResult::no(SolveStats { nodes: budget.used }))
}

/// Weak manipulation: do manipulator votes and one extension exist that make
/// the preferred candidate the unique winner?
pub fn solve_wm(inst: &ManipulationInstance) -> Result<SolveResult> {
    solve_wm_opts(inst, &OracleOptions::default())
}

pub fn solve_wm_opts(inst: &ManipulationInstance, opts: &OracleOptions) -> Result<SolveResult> {
    let c = inst.preferred;
    let space = ExtensionSpace::build(&inst.partial, opts.budget)?;
    let fix = opts.prune_preferred_top.then_some(c);
    let mut budget = Budget::new(opts.budget);
    for q in ManipulatorVotes::new(space.m, inst.manipulators, fix, opts.budget)? {
        let hit = space.for_each_joint(&q, &mut budget, |tally| {
            tally.unique_winner(&inst.rule).expect("valid rule") == Some(c)
        })?;
        if let Some(assignment) = hit {
            return Ok(SolveResult {
                answer: true,
                witness: Some(Witness {
                    manipulator_votes: q,
                    extension: Some(space.assemble(&assignment)),
                }),
                stats: SolveStats { nodes: budget.used },
            });
        }
    }
    Ok(SolveResult::no(SolveStats { nodes: budget.used }))
}

/// Strong manipulation: do manipulator votes exist that make the preferred
/// candidate the unique winner in every extension?
pub fn solve_sm(inst: &ManipulationInstance) -> Result<SolveResult> {
    solve_sm_opts(inst, &OracleOptions::default())
}

pub fn solve_sm_opts(inst: &ManipulationInstance, opts: &OracleOptions) -> Result<SolveResult> {
    let c = inst.preferred;
    let space = ExtensionSpace::build(&inst.partial, opts.budget)?;
    let fix = opts.prune_preferred_top.then_some(c);
    let mut budget = Budget::new(opts.budget);
    for q in ManipulatorVotes::new(space.m, inst.manipulators, fix, opts.budget)? {
        let counterexample = space.for_each_joint(&q, &mut budget, |tally| {
            tally.unique_winner(&inst.rule).expect("valid rule") != Some(c)
        })?;
        if counterexample.is_none() {
            return Ok(SolveResult {
                answer: true,
                witness: Some(Witness {
                    manipulator_votes: q,
                    extension: None,
                }),
                stats: SolveStats { nodes: budget.used },
            });
        }
    }
    Ok(SolveResult::no(SolveStats { nodes: budget.used }))
}

/// Checks that `extension` really extends `partial`, vote for vote.
pub fn extension_is_valid(partial: &PartialProfile, extension: &[LinearVote]) -> bool {
    extension.len() == partial.n()
        && partial
            .votes
            .iter()
            .zip(extension)
            .all(|(pv, lv)| lv.m() == pv.m() && pv.pairs().iter().all(|&(a, b)| lv.prefers(a, b)))
}

/// Re-derives a claimed result from its witness.
///
/// For yes answers this recomputes the unique winner on the witness data
/// (for SM, via the necessary-winner oracle). A no answer carries no witness
/// and is re-checked by re-solving within the budget.
pub fn verify_result(
    kind: ProblemKind,
    inst: &ManipulationInstance,
    result: &SolveResult,
    opts: &OracleOptions,
) -> Result<bool> {
    let c = inst.preferred;
    let rule = &inst.rule;
    let complete_plus = |q: &[LinearVote]| -> PartialProfile {
        let mut votes = inst.partial.votes.clone();
        votes.extend(q.iter().map(PartialVote::from_linear));
        PartialProfile {
            candidates: inst.partial.candidates.clone(),
            votes,
        }
    };
    match (kind, result.answer, &result.witness) {
        (ProblemKind::Nw, true, None) => Ok(solve_nw_opts(rule, &inst.partial, c, opts)?.answer),
        (ProblemKind::Nw, false, Some(w)) => {
            let ext = match &w.extension {
                Some(e) => e,
                None => return Ok(false),
            };
            if !extension_is_valid(&inst.partial, ext) {
                return Ok(false);
            }
            let tally = Tally::from_votes(inst.partial.m(), ext);
            Ok(tally.unique_winner(rule)? != Some(c))
        }
        (ProblemKind::Pw, true, Some(w)) => {
            let ext = match &w.extension {
                Some(e) => e,
                None => return Ok(false),
            };
            if !extension_is_valid(&inst.partial, ext) {
                return Ok(false);
            }
            let tally = Tally::from_votes(inst.partial.m(), ext);
            Ok(tally.unique_winner(rule)? == Some(c))
        }
        (ProblemKind::Cm, true, Some(w)) => {
            if w.manipulator_votes.len() != inst.manipulators
                || !inst.partial.votes.iter().all(PartialVote::is_complete)
            {
                return Ok(false);
            }
            let joined = complete_plus(&w.manipulator_votes);
            // Complete votes: the single extension is the profile itself.
            let exts: Vec<LinearVote> = joined
                .votes
                .iter()
                .map(|pv| pv.extensions().map(|mut e| e.swap_remove(0)))
                .collect::<Result<_>>()?;
            let tally = Tally::from_votes(joined.m(), &exts);
            Ok(tally.unique_winner(rule)? == Some(c))
        }
        (ProblemKind::Wm, true, Some(w)) => {
            if w.manipulator_votes.len() != inst.manipulators {
                return Ok(false);
            }
            let ext = match &w.extension {
                Some(e) => e,
                None => return Ok(false),
            };
            if !extension_is_valid(&inst.partial, ext) {
                return Ok(false);
            }
            let mut tally = Tally::from_votes(inst.partial.m(), ext);
            for v in &w.manipulator_votes {
                tally.add_vote(v);
            }
            Ok(tally.unique_winner(rule)? == Some(c))
        }
        (ProblemKind::Sm, true, Some(w)) => {
            if w.manipulator_votes.len() != inst.manipulators || w.extension.is_some() {
                return Ok(false);
            }
            let joined = complete_plus(&w.manipulator_votes);
            Ok(solve_nw_opts(rule, &joined, c, opts)?.answer)
        }
        // No answers carry no witness: re-solve.
        (ProblemKind::Pw, false, None) => Ok(!solve_pw_opts(rule, &inst.partial, c, opts)?.answer),
        (ProblemKind::Cm, false, None) | (ProblemKind::Wm, false, None) => {
            Ok(!solve_wm_opts(inst, opts)?.answer)
        }
        (ProblemKind::Sm, false, None) => Ok(!solve_sm_opts(inst, opts)?.answer),
        _ => Ok(false),
    }
}
