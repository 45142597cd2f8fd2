//! Constructive generators for the hardness-reduction gadgets: a McGarvey
//! profile builder for prescribed pairwise margins, an exact score-profile
//! generator for k-approval differentials, the exact-cover reductions (weak
//! manipulation under maximin, Copeland and Bucklin, strong manipulation
//! under Copeland, and the possible-winner gadgets for k-approval and
//! k-veto), conversions between problem kinds, and a brute-force exact-cover
//! solver used to validate everything.
//!
//! Every generator emits a machine-readable audit so a failure localizes to
//! the construction rather than the solvers.

use crate::error::{Error, Result};
use crate::oracle::{ManipulationInstance, ProblemKind, Witness};
use crate::prefs::{CandidateSet, LinearVote, PartialProfile, PartialVote, Profile};
use crate::rules::{MarginMatrix, Rule, Tally};

/// An exact-cover-by-3-sets instance over a universe {0, …, q−1} with q
/// divisible by 3. Set elements are stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3CInstance {
    universe_size: usize,
    sets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(universe_size: usize, sets: Vec<[usize; 3]>) -> Result<Self> {
        if universe_size == 0 || universe_size % 3 != 0 {
            return Err(Error::Parameter(format!(
                "universe size {universe_size} must be a positive multiple of 3"
            )));
        }
        if sets.is_empty() {
            return Err(Error::Parameter("set family must be non-empty".into()));
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for s in sets {
            let mut s = s;
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(Error::Parameter(format!("set {s:?} has repeated elements")));
            }
            if s[2] >= universe_size {
                return Err(Error::Parameter(format!("set {s:?} outside universe")));
            }
            sorted.push(s);
        }
        Ok(X3CInstance {
            universe_size,
            sets: sorted,
        })
    }

    pub fn q(&self) -> usize {
        self.universe_size
    }

    pub fn t(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[[usize; 3]] {
        &self.sets
    }
}

const X3C_BRUTE_LIMIT: usize = 12;

/// First exact cover in lexicographic index order, by subset enumeration.
pub fn x3c_cover(x: &X3CInstance) -> Result<Option<Vec<usize>>> {
    if x.q() > X3C_BRUTE_LIMIT || x.t() > X3C_BRUTE_LIMIT {
        return Err(Error::Scope(format!(
            "exact-cover brute force limited to q <= {X3C_BRUTE_LIMIT}, t <= {X3C_BRUTE_LIMIT}"
        )));
    }
    fn rec(
        x: &X3CInstance,
        start: usize,
        need: usize,
        covered: u64,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == need {
            return covered == (1u64 << x.q()) - 1;
        }
        for i in start..x.t() {
            let mask = x.sets()[i].iter().fold(0u64, |acc, &e| acc | 1 << e);
            if covered & mask != 0 {
                continue;
            }
            chosen.push(i);
            if rec(x, i + 1, need, covered | mask, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let need = x.q() / 3;
    let mut chosen: Vec<usize> = Vec::with_capacity(need);
    if need <= x.t() && rec(x, 0, need, 0, &mut chosen) {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

/// Whether an exact cover exists (brute force).
pub fn x3c_solve(x: &X3CInstance) -> Result<bool> {
    Ok(x3c_cover(x)?.is_some())
}

/// A prescribed antisymmetric, even pairwise-margin table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginTarget {
    f: Vec<Vec<i64>>,
}

impl MarginTarget {
    pub fn new(f: Vec<Vec<i64>>) -> Result<Self> {
        let m = f.len();
        for row in &f {
            if row.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        for a in 0..m {
            if f[a][a] != 0 {
                return Err(Error::Parameter(format!(
                    "diagonal entry ({a},{a}) must be 0"
                )));
            }
            for b in 0..m {
                if f[a][b] != -f[b][a] {
                    return Err(Error::Parameter(format!(
                        "entries ({a},{b}) not antisymmetric"
                    )));
                }
                if f[a][b].rem_euclid(2) != 0 {
                    return Err(Error::Parity {
                        a,
                        b,
                        value: f[a][b],
                    });
                }
            }
        }
        Ok(MarginTarget { f })
    }

    pub fn from_entries(m: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        let mut f = vec![vec![0i64; m]; m];
        for &(a, b, v) in entries {
            f[a][b] = v;
            f[b][a] = -v;
        }
        MarginTarget::new(f)
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }

    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.f[a][b]
    }
}

/// Realizes the target margins exactly with paired votes: each +2 on (a, b)
/// adds the votes `a > b > rest` and `reversed rest > a > b`, which cancel on
/// every other pair. The vote count is Σ |f(a,b)| over unordered pairs.
pub fn mcgarvey(target: &MarginTarget, candidates: &CandidateSet) -> Result<Profile> {
    let m = candidates.m();
    if target.m() != m {
        return Err(Error::Dimension {
            expected: m,
            got: target.m(),
        });
    }
    let mut votes = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            let v = target.get(a, b);
            if v == 0 {
                continue;
            }
            let (hi, lo) = if v > 0 { (a, b) } else { (b, a) };
            let rest: Vec<usize> = (0..m).filter(|&x| x != a && x != b).collect();
            for _ in 0..(v.unsigned_abs() / 2) {
                let mut first = vec![hi, lo];
                first.extend(rest.iter().copied());
                let mut second: Vec<usize> = rest.iter().rev().copied().collect();
                second.push(hi);
                second.push(lo);
                votes.push(LinearVote::new(first, m)?);
                votes.push(LinearVote::new(second, m)?);
            }
        }
    }
    let profile = Profile::new(candidates.clone(), votes)?;
    let achieved = Tally::from_votes(m, &profile.votes).margins();
    for a in 0..m {
        for b in 0..m {
            if achieved.get(a, b) != target.get(a, b) {
                return Err(Error::Infeasible(format!(
                    "margin ({a},{b}): wanted {}, got {}",
                    target.get(a, b),
                    achieved.get(a, b)
                )));
            }
        }
    }
    Ok(profile)
}

/// Audit record of a score_gen run: realized member scores against λ + X and
/// the slack candidate strictly below all of them.
#[derive(Debug, Clone)]
pub struct ScoreAudit {
    pub lambda: i64,
    pub targets: Vec<i64>,
    pub achieved: Vec<i64>,
    pub slack_score: i64,
    pub passed: bool,
}

/// Greedy exact k-subset decomposition: a multiset of k-subsets of
/// 0..targets.len() whose column sums equal `targets`. Requires the sums to
/// be divisible by k and no target above the vote count.
fn subset_decomposition(targets: &[i64], k: usize) -> Option<Vec<Vec<usize>>> {
    let total: i64 = targets.iter().sum();
    if total % k as i64 != 0 {
        return None;
    }
    let votes = total / k as i64;
    if targets.iter().any(|&t| t < 0 || t > votes) {
        return None;
    }
    let mut remaining = targets.to_vec();
    let mut out = Vec::with_capacity(votes as usize);
    for _ in 0..votes {
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by_key(|&i| (-remaining[i], i));
        let mut pick: Vec<usize> = order.into_iter().take(k).collect();
        if pick.iter().any(|&i| remaining[i] == 0) {
            return None;
        }
        pick.sort_unstable();
        for &i in &pick {
            remaining[i] -= 1;
        }
        out.push(pick);
    }
    remaining.iter().all(|&r| r == 0).then_some(out)
}

/// Internal engine for score_gen: realizes k-approval scores λ′ + Y_i on the
/// members 0..n−1 and a strictly smaller score on member n (the slack), as
/// approval sets over 0..=n. Returns (sets, λ, slack score).
fn approval_realization(x: &[i64], k: usize) -> Result<(Vec<Vec<usize>>, i64, i64)> {
    let members = x.len();
    if k < 1 || k >= members {
        return Err(Error::Parameter(format!(
            "score generator needs 1 <= k < {members}, got {k}"
        )));
    }
    let min_x = *x.iter().min().expect("non-empty");
    let max_y = x.iter().map(|&v| v - min_x).max().expect("non-empty");
    let k64 = k as i64;
    // Large enough that the slack slot stays strictly lowest and the greedy
    // decomposition never runs out of positive columns.
    let lambda_prime = k64.max(k64 * max_y).max(min_x).max(1);
    let mut targets: Vec<i64> = x.iter().map(|&v| lambda_prime + (v - min_x)).collect();
    let sum: i64 = targets.iter().sum();
    let slack_score = (k64 - sum.rem_euclid(k64)).rem_euclid(k64);
    targets.push(slack_score);
    let sets = subset_decomposition(&targets, k)
        .ok_or_else(|| Error::Infeasible("no k-subset decomposition".into()))?;
    Ok((sets, lambda_prime - min_x, slack_score))
}

/// Builds a profile over candidates {c_1, …, c_m, d} whose k-approval scores
/// are exactly λ + X_i for the c_i and strictly less than all of them for d.
/// Returns the profile, λ, and the tally audit.
pub fn score_gen(x: &[i64], k: usize) -> Result<(Profile, i64, ScoreAudit)> {
    let m = x.len();
    let (sets, lambda, _) = approval_realization(x, k)?;
    let mut labels: Vec<String> = (1..=m).map(|i| format!("c{i}")).collect();
    labels.push("d".into());
    let candidates = CandidateSet::new(labels)?;
    let total = m + 1;
    let votes: Vec<LinearVote> = sets
        .iter()
        .map(|approved| {
            let mut ranking = approved.clone();
            ranking.extend((0..total).filter(|c| !approved.contains(c)));
            LinearVote::new(ranking, total)
        })
        .collect::<Result<_>>()?;
    let profile = Profile::new(candidates, votes)?;
    let tally = Tally::from_votes(total, &profile.votes);
    let scores = tally.positional_scores(&crate::rules::ScoreVector::k_approval(total, k))?;
    let targets: Vec<i64> = x.iter().map(|&v| lambda + v).collect();
    let achieved: Vec<i64> = scores[..m].to_vec();
    let slack_score = scores[m];
    let passed = achieved == targets && targets.iter().all(|&t| slack_score < t);
    let audit = ScoreAudit {
        lambda,
        targets,
        achieved,
        slack_score,
        passed,
    };
    if !audit.passed {
        return Err(Error::Infeasible(
            "score generator failed its tally audit".into(),
        ));
    }
    Ok((profile, lambda, audit))
}

/// Builds a chain vote `order[0] > order[1] > …` with the listed pairs
/// removed, and checks the remainder is still transitively closed.
fn chain_with_removals(
    order: &[usize],
    m: usize,
    removed: &[(usize, usize)],
) -> Result<PartialVote> {
    let mut pairs = Vec::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            let p = (order[i], order[j]);
            if !removed.contains(&p) {
                pairs.push(p);
            }
        }
    }
    let v = PartialVote::transitive_close(&pairs, m)?;
    if v.pair_count() != pairs.len() {
        return Err(Error::Infeasible(
            "relation removal left a non-transitively-closed vote".into(),
        ));
    }
    Ok(v)
}

/// How an intended margin-table entry is audited: against the generated
/// complete votes alone, or against those votes plus the forced pairs of the
/// partial votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditScope {
    GeneratedVotes,
    WithForcedPairs,
}

#[derive(Debug, Clone)]
pub struct MarginAuditEntry {
    pub a: usize,
    pub b: usize,
    pub intended: i64,
    pub achieved: i64,
    pub scope: AuditScope,
}

#[derive(Debug, Clone)]
pub struct MarginAudit {
    pub entries: Vec<MarginAuditEntry>,
    pub passed: bool,
}

impl MarginAudit {
    fn build(
        entries: Vec<(usize, usize, i64, AuditScope)>,
        generated: &MarginMatrix,
        forced: &[Vec<i64>],
    ) -> Self {
        let rows: Vec<MarginAuditEntry> = entries
            .into_iter()
            .map(|(a, b, intended, scope)| {
                let achieved = match scope {
                    AuditScope::GeneratedVotes => generated.get(a, b),
                    AuditScope::WithForcedPairs => generated.get(a, b) + forced[a][b],
                };
                MarginAuditEntry {
                    a,
                    b,
                    intended,
                    achieved,
                    scope,
                }
            })
            .collect();
        let passed = rows.iter().all(|e| e.intended == e.achieved);
        MarginAudit {
            entries: rows,
            passed,
        }
    }
}

/// Net forced margins of a partial profile: (a over b) − (b over a) counting
/// only pairs present in the partial orders.
fn forced_margins(votes: &[PartialVote], m: usize) -> Vec<Vec<i64>> {
    let mut f = vec![vec![0i64; m]; m];
    for v in votes {
        for a in 0..m {
            for b in 0..m {
                if a != b && v.prefers(a, b) {
                    f[a][b] += 1;
                    f[b][a] -= 1;
                }
            }
        }
    }
    f
}

fn pad_sets(x: &X3CInstance, want_even: bool) -> Vec<[usize; 3]> {
    let mut sets = x.sets().to_vec();
    if (sets.len() % 2 == 0) != want_even {
        sets.push(sets[0]);
    }
    sets
}

/// Output of an exact-cover reduction: the manipulation instance, its margin
/// audit, and the padded set family needed to code the proof's witness.
#[derive(Debug, Clone)]
pub struct X3cGadget {
    pub instance: ManipulationInstance,
    pub kind: ProblemKind,
    pub audit: MarginAudit,
    pub sets: Vec<[usize; 3]>,
    partial_votes: usize,
}

impl X3cGadget {
    /// Number of set-derived partial votes at the front of the profile.
    pub fn set_votes(&self) -> usize {
        self.partial_votes
    }

    pub fn t(&self) -> usize {
        self.sets.len()
    }
}

fn x3c_candidates(q: usize, extra: &[&str]) -> Result<CandidateSet> {
    let mut labels: Vec<String> = (1..=q).map(|i| format!("u{i}")).collect();
    labels.extend(extra.iter().map(|s| s.to_string()));
    CandidateSet::new(labels)
}

/// A label equal to `base` or, on collision with `taken`, the first free
/// `base2`, `base3`, ….
fn fresh_label(base: &str, taken: &[String]) -> String {
    if !taken.iter().any(|l| l == base) {
        return base.to_string();
    }
    let mut i = 2usize;
    loop {
        let candidate = format!("{base}{i}");
        if !taken.iter().any(|l| l == &candidate) {
            return candidate;
        }
        i += 1;
    }
}

/// Appends the singleton extensions of the trailing complete votes.
fn extend_complete_tail(g: &X3cGadget, extension: &mut Vec<LinearVote>) -> Result<()> {
    for pv in &g.instance.partial.votes[g.set_votes()..] {
        let mut exts = pv.extensions_budgeted(2)?;
        extension.push(exts.swap_remove(0));
    }
    Ok(())
}

/// Weak manipulation under maximin from exact cover.
///
/// Candidates are U ∪ {c, w, w1, w2, w3}; each set S_i yields the partial
/// vote `(U∖S_i) > w > S_i > c > w1 > w2 > w3` with w's relations to
/// S_i ∪ {c} removed, and McGarvey votes install the margin table. One
/// manipulator prefers c; a cover exists iff some vote plus extension makes
/// c the unique maximin winner.
pub fn reduce_x3c_to_wm_maximin(x: &X3CInstance) -> Result<X3cGadget> {
    let q = x.q();
    let sets = pad_sets(x, true);
    let t = sets.len() as i64;
    let m = q + 5;
    let (c, w, w1, w2, w3) = (q, q + 1, q + 2, q + 3, q + 4);
    let candidates = x3c_candidates(q, &["c", "w", "w1", "w2", "w3"])?;

    let mut partial_votes = Vec::with_capacity(sets.len());
    for s in &sets {
        let mut order: Vec<usize> = (0..q).filter(|e| !s.contains(e)).collect();
        order.push(w);
        order.extend(s.iter().copied());
        order.extend([c, w1, w2, w3]);
        let mut removed: Vec<(usize, usize)> = s.iter().map(|&e| (w, e)).collect();
        removed.push((w, c));
        partial_votes.push(chain_with_removals(&order, m, &removed)?);
    }
    let forced = forced_margins(&partial_votes, m);

    // The u_i-vs-w entries count the partial votes' resolutions wholesale, so
    // they are installed on the generated votes alone; every other entry is a
    // combined value and the generator subtracts the forced pairs.
    let q3 = (q / 3) as i64;
    let mut table: Vec<(usize, usize, i64, AuditScope)> = vec![
        (c, w, -2 * t + 2 * q3, AuditScope::GeneratedVotes),
        (c, w1, -t, AuditScope::WithForcedPairs),
        (w, w1, -4 * t, AuditScope::WithForcedPairs),
        (w1, w2, -t - 2, AuditScope::WithForcedPairs),
        (w2, w3, -t - 2, AuditScope::WithForcedPairs),
        (w3, w1, -t - 2, AuditScope::WithForcedPairs),
    ];
    for u in 0..q {
        table.push((u, w, -2 * t + 2, AuditScope::GeneratedVotes));
    }
    let mut f = vec![vec![0i64; m]; m];
    let mut pinned = vec![vec![false; m]; m];
    for &(a, b, intended, scope) in &table {
        let delta = match scope {
            AuditScope::GeneratedVotes => intended,
            AuditScope::WithForcedPairs => intended - forced[a][b],
        };
        f[a][b] = delta;
        f[b][a] = -delta;
        pinned[a][b] = true;
        pinned[b][a] = true;
    }
    // Unlisted pairs sit at a combined margin of zero.
    for a in 0..m {
        for b in (a + 1)..m {
            if !pinned[a][b] {
                f[a][b] = -forced[a][b];
                f[b][a] = forced[a][b];
            }
        }
    }
    let generated = mcgarvey(&MarginTarget::new(f)?, &candidates)?;
    let audit = MarginAudit::build(
        table,
        &Tally::from_votes(m, &generated.votes).margins(),
        &forced,
    );

    let n_partial = partial_votes.len();
    let mut votes = partial_votes;
    votes.extend(generated.votes.iter().map(PartialVote::from_linear));
    let partial = PartialProfile::new(candidates, votes)?;
    let instance = ManipulationInstance::new(Rule::Maximin, partial, 1, c)?;
    Ok(X3cGadget {
        instance,
        kind: ProblemKind::Wm,
        audit,
        sets,
        partial_votes: n_partial,
    })
}

/// The proof's witness for a maximin gadget built from an exact cover:
/// manipulator vote `c > w > w1 > w2 > w3 > U` and the cover-keyed extension
/// (cover votes keep w over S_i and c, the rest put c over w).
pub fn maximin_witness(g: &X3cGadget, cover: &[usize]) -> Result<Witness> {
    let m = g.instance.partial.m();
    let q = m - 5;
    let (c, w, w1, w2, w3) = (q, q + 1, q + 2, q + 3, q + 4);
    let mut vote = vec![c, w, w1, w2, w3];
    vote.extend(0..q);
    let manipulator = LinearVote::new(vote, m)?;
    let mut extension = Vec::with_capacity(g.instance.partial.n());
    for (i, s) in g.sets.iter().enumerate() {
        let mut order: Vec<usize> = (0..q).filter(|e| !s.contains(e)).collect();
        if cover.contains(&i) {
            order.push(w);
            order.extend(s.iter().copied());
            order.extend([c, w1, w2, w3]);
        } else {
            order.extend(s.iter().copied());
            order.extend([c, w, w1, w2, w3]);
        }
        extension.push(LinearVote::new(order, m)?);
    }
    extend_complete_tail(g, &mut extension)?;
    Ok(Witness {
        manipulator_votes: vec![manipulator],
        extension: Some(extension),
    })
}

fn copeland_gadget_core(x: &X3CInstance, sm_variant: bool) -> Result<X3cGadget> {
    let q = x.q();
    let sets = pad_sets(x, sm_variant);
    let t = sets.len() as i64;
    let m = q + 4;
    let (c, w, z, d) = (q, q + 1, q + 2, q + 3);
    let candidates = x3c_candidates(q, &["c", "w", "z", "d"])?;

    let mut partial_votes = Vec::with_capacity(sets.len());
    for s in &sets {
        let mut order: Vec<usize> = (0..q).filter(|e| !s.contains(e)).collect();
        order.extend([z, c, d]);
        order.extend(s.iter().copied());
        order.push(w);
        // Both proof templates require z and c to float against S_i, d and w.
        let mut removed = Vec::new();
        for &a in &[z, c] {
            for &e in s {
                removed.push((a, e));
            }
            removed.push((a, d));
            removed.push((a, w));
        }
        partial_votes.push(chain_with_removals(&order, m, &removed)?);
    }
    let forced = forced_margins(&partial_votes, m);

    // The proof's increase accounting treats all set-vote resolutions as
    // deltas over the table, so every entry is installed on the generated
    // votes alone.
    let q3 = (q / 3) as i64;
    let mut table: Vec<(usize, usize, i64, AuditScope)> = vec![
        (
            c,
            d,
            if sm_variant { -4 * t } else { 4 * t },
            AuditScope::GeneratedVotes,
        ),
        (c, z, 4 * t, AuditScope::GeneratedVotes),
        (z, d, 4 * t, AuditScope::GeneratedVotes),
        (w, c, 4 * t, AuditScope::GeneratedVotes),
        (
            z,
            w,
            if sm_variant {
                t - 2 * q3 - 2
            } else {
                t - 2 * q3 + 1
            },
            AuditScope::GeneratedVotes,
        ),
    ];
    for u in 0..q {
        table.push((u, d, 4 * t, AuditScope::GeneratedVotes));
        table.push((z, u, 4 * t, AuditScope::GeneratedVotes));
        table.push((
            c,
            u,
            if sm_variant { t } else { t - 1 },
            AuditScope::GeneratedVotes,
        ));
    }
    // The u_i need decisive mutual margins (a single extra vote must not flip
    // any of them) with every u_i defeated by its cyclic predecessor, and no
    // u_i may beat too many others. A circular tournament does both; the
    // combined value's parity follows the forced set-vote pairs.
    let decisive = if t % 2 == 0 { 2 } else { 1 };
    for i in 0..q {
        for j in 1..=(q - 1) / 2 {
            table.push((i, (i + j) % q, decisive, AuditScope::WithForcedPairs));
        }
    }
    if q % 2 == 0 {
        for i in 0..q / 2 {
            table.push((i, i + q / 2, decisive, AuditScope::WithForcedPairs));
        }
    }
    let mut f = vec![vec![0i64; m]; m];
    for &(a, b, intended, scope) in &table {
        let delta = match scope {
            AuditScope::GeneratedVotes => intended,
            AuditScope::WithForcedPairs => intended - forced[a][b],
        };
        f[a][b] = delta;
        f[b][a] = -delta;
    }
    let generated = mcgarvey(&MarginTarget::new(f)?, &candidates)?;
    let audit = MarginAudit::build(
        table,
        &Tally::from_votes(m, &generated.votes).margins(),
        &forced,
    );

    let n_partial = partial_votes.len();
    let mut votes = partial_votes;
    votes.extend(generated.votes.iter().map(PartialVote::from_linear));
    let partial = PartialProfile::new(candidates, votes)?;
    let preferred = if sm_variant { z } else { c };
    let instance = ManipulationInstance::new(Rule::Copeland, partial, 1, preferred)?;
    Ok(X3cGadget {
        instance,
        kind: if sm_variant {
            ProblemKind::Sm
        } else {
            ProblemKind::Wm
        },
        audit,
        sets,
        partial_votes: n_partial,
    })
}

/// Weak manipulation under Copeland from exact cover; one manipulator
/// prefers c.
pub fn reduce_x3c_to_wm_copeland(x: &X3CInstance) -> Result<X3cGadget> {
    copeland_gadget_core(x, false)
}

/// Strong manipulation under Copeland from exact cover; one manipulator
/// prefers z. The margin overrides keep c permanently behind d. Note the
/// polarity: the generated instance is strongly manipulable exactly when the
/// exact-cover instance has NO cover, because here the cover powers the
/// adversarial extension rather than the manipulator.
pub fn reduce_x3c_to_sm_copeland(x: &X3CInstance) -> Result<X3cGadget> {
    copeland_gadget_core(x, true)
}

/// Proof witness vote for the Copeland gadgets: `c > w > z > d > U` for the
/// weak variant, `z > w > d > U > c` for the strong variant.
pub fn copeland_witness_vote(g: &X3cGadget) -> Result<LinearVote> {
    let m = g.instance.partial.m();
    let q = m - 4;
    let (c, w, z, d) = (q, q + 1, q + 2, q + 3);
    let mut vote = match g.kind {
        ProblemKind::Wm => vec![c, w, z, d],
        ProblemKind::Sm => vec![z, w, d],
        _ => return Err(Error::Parameter("not a Copeland gadget".into())),
    };
    vote.extend(0..q);
    if g.kind == ProblemKind::Sm {
        vote.push(c);
    }
    LinearVote::new(vote, m)
}

/// Cover-keyed extension of the Copeland gadgets' partial votes: cover sets
/// keep z and c high, the rest push them below w.
pub fn copeland_extension(g: &X3cGadget, cover: &[usize]) -> Result<Vec<LinearVote>> {
    let m = g.instance.partial.m();
    let q = m - 4;
    let (c, w, z, d) = (q, q + 1, q + 2, q + 3);
    let mut extension = Vec::with_capacity(g.instance.partial.n());
    for (i, s) in g.sets.iter().enumerate() {
        let mut order: Vec<usize> = (0..q).filter(|e| !s.contains(e)).collect();
        if cover.contains(&i) {
            order.extend([z, c, d]);
            order.extend(s.iter().copied());
            order.push(w);
        } else {
            order.push(d);
            order.extend(s.iter().copied());
            order.extend([w, z, c]);
        }
        extension.push(LinearVote::new(order, m)?);
    }
    extend_complete_tail(g, &mut extension)?;
    Ok(extension)
}

/// Weak manipulation under Bucklin from exact cover. Candidates are
/// W ∪ D ∪ U ∪ {c, w} with |W| = |D| = q + 1, and the electorate including
/// the manipulator has exactly 2t + 2q/3 + 1 voters.
pub fn reduce_x3c_to_wm_bucklin(x: &X3CInstance) -> Result<X3cGadget> {
    let q = x.q();
    let sets = x.sets().to_vec();
    let t = sets.len();
    let m = 3 * q + 4;
    // Index layout: W = 0..=q, D = q+1..=2q+1, U = 2q+2..3q+2, then c, w.
    let w_idx = |i: usize| i - 1;
    let d_idx = |i: usize| q + i;
    let u_idx = |e: usize| 2 * q + 2 + e;
    let c = 3 * q + 2;
    let w = 3 * q + 3;
    let mut labels: Vec<String> = (1..=q + 1).map(|i| format!("w{i}")).collect();
    labels.extend((1..=q + 1).map(|i| format!("d{i}")));
    labels.extend((1..=q).map(|i| format!("u{i}")));
    labels.push("c".into());
    labels.push("w".into());
    let candidates = CandidateSet::new(labels)?;

    let mut partial_votes = Vec::with_capacity(t);
    for s in &sets {
        let mut order: Vec<usize> = (1..=q + 1).map(w_idx).collect();
        order.extend(s.iter().map(|&e| u_idx(e)));
        order.push(c);
        order.extend((0..q).filter(|e| !s.contains(e)).map(u_idx));
        order.extend((1..=q + 1).map(d_idx));
        order.push(w);
        // The last four W members float against c and the set's elements;
        // w itself stays pinned at the bottom.
        let mut removed = Vec::new();
        for wi in [q - 2, q - 1, q, q + 1] {
            removed.push((w_idx(wi), c));
            for &e in s {
                removed.push((w_idx(wi), u_idx(e)));
            }
        }
        partial_votes.push(chain_with_removals(&order, m, &removed)?);
    }

    let mut complete = Vec::new();
    for _ in 0..t {
        // U > c > W > D > w.
        let mut order: Vec<usize> = (0..q).map(u_idx).collect();
        order.push(c);
        order.extend((1..=q + 1).map(w_idx));
        order.extend((1..=q + 1).map(d_idx));
        order.push(w);
        complete.push(LinearVote::new(order, m)?);
    }
    for _ in 0..(q / 3 - 1) {
        // U > w > c > W > D.
        let mut order: Vec<usize> = (0..q).map(u_idx).collect();
        order.push(w);
        order.push(c);
        order.extend((1..=q + 1).map(w_idx));
        order.extend((1..=q + 1).map(d_idx));
        complete.push(LinearVote::new(order, m)?);
    }
    for _ in 0..(q / 3 + 1) {
        // D > w_1 > rest of W > U > c > w.
        let mut order: Vec<usize> = (1..=q + 1).map(d_idx).collect();
        order.push(w_idx(1));
        order.extend((2..=q + 1).map(w_idx));
        order.extend((0..q).map(u_idx));
        order.push(c);
        order.push(w);
        complete.push(LinearVote::new(order, m)?);
    }

    let voters_with_manipulator = (t + complete.len() + 1) as i64;
    let intended = (2 * t + 2 * q / 3 + 1) as i64;
    let audit = MarginAudit {
        entries: vec![MarginAuditEntry {
            a: 0,
            b: 0,
            intended,
            achieved: voters_with_manipulator,
            scope: AuditScope::GeneratedVotes,
        }],
        passed: voters_with_manipulator == intended,
    };
    if !audit.passed {
        return Err(Error::Infeasible("bucklin gadget voter count off".into()));
    }

    let n_partial = partial_votes.len();
    let mut votes = partial_votes;
    votes.extend(complete.iter().map(PartialVote::from_linear));
    let partial = PartialProfile::new(candidates, votes)?;
    let instance = ManipulationInstance::new(Rule::Bucklin, partial, 1, c)?;
    Ok(X3cGadget {
        instance,
        kind: ProblemKind::Wm,
        audit,
        sets,
        partial_votes: n_partial,
    })
}

/// Proof witness for the Bucklin gadget: manipulator vote `c > D > …` and
/// the extension keyed on an exact cover (cover votes slide S_i and c above
/// the last four W members).
pub fn bucklin_witness(g: &X3cGadget, cover: &[usize]) -> Result<Witness> {
    let m = g.instance.partial.m();
    let q = (m - 4) / 3;
    let w_idx = |i: usize| i - 1;
    let d_idx = |i: usize| q + i;
    let u_idx = |e: usize| 2 * q + 2 + e;
    let c = 3 * q + 2;
    let w = 3 * q + 3;
    let mut vote = vec![c];
    vote.extend((1..=q + 1).map(d_idx));
    vote.extend((1..=q + 1).map(w_idx));
    vote.extend((0..q).map(u_idx));
    vote.push(w);
    let manipulator = LinearVote::new(vote, m)?;
    let mut extension = Vec::with_capacity(g.instance.partial.n());
    for (i, s) in g.sets.iter().enumerate() {
        let mut order: Vec<usize> = Vec::with_capacity(m);
        if cover.contains(&i) {
            order.extend((1..=q - 3).map(w_idx));
            order.extend(s.iter().map(|&e| u_idx(e)));
            order.push(c);
            order.extend((q - 2..=q + 1).map(w_idx));
        } else {
            order.extend((1..=q + 1).map(w_idx));
            order.extend(s.iter().map(|&e| u_idx(e)));
            order.push(c);
        }
        order.extend((0..q).filter(|e| !s.contains(e)).map(u_idx));
        order.extend((1..=q + 1).map(d_idx));
        order.push(w);
        extension.push(LinearVote::new(order, m)?);
    }
    extend_complete_tail(g, &mut extension)?;
    Ok(Witness {
        manipulator_votes: vec![manipulator],
        extension: Some(extension),
    })
}

/// Audit record for the possible-winner gadgets.
#[derive(Debug, Clone)]
pub struct PwGadgetAudit {
    /// Highest k-approval score any dummy can reach from the modified
    /// partial votes (k-approval variant; must be 0).
    pub max_dummy_partial_score: i64,
    /// Fixed k-veto scores of (c, the blocker dummies, d) once the generated
    /// votes are included (k-veto variant).
    pub pinned_scores: Option<(i64, Vec<i64>, i64)>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct PwGadget {
    pub instance: ManipulationInstance,
    pub audit: PwGadgetAudit,
    pub original_m: usize,
}

/// Weak manipulation under k-approval from possible winner (k ≥ 2): every
/// non-preferred candidate gains one point from a dedicated complete vote
/// topped by it and filled with fresh dummies, the dummies are pinned below
/// all original candidates in the partial votes, and one manipulator is
/// added.
pub fn reduce_pw_to_wm_kapproval(
    p: &PartialProfile,
    preferred: usize,
    k: usize,
) -> Result<PwGadget> {
    let base_m = p.m();
    if k < 2 || k >= base_m {
        return Err(Error::Parameter(format!(
            "k-approval gadget needs 2 <= k < {base_m}, got {k}"
        )));
    }
    if preferred >= base_m {
        return Err(Error::Parameter(
            "preferred candidate outside candidate set".into(),
        ));
    }
    let dummies = base_m * (k - 1);
    let m = base_m + dummies;
    let mut labels = p.candidates.labels().to_vec();
    for i in 1..=dummies {
        let label = fresh_label(&format!("dummy{i}"), &labels);
        labels.push(label);
    }
    let candidates = CandidateSet::new(labels)?;

    let originals: Vec<usize> = (0..base_m).filter(|&x| x != preferred).collect();
    let mut votes: Vec<PartialVote> = Vec::new();
    for v in &p.votes {
        let mut pairs = v.pairs();
        for orig in 0..base_m {
            for dummy in base_m..m {
                pairs.push((orig, dummy));
            }
        }
        votes.push(PartialVote::transitive_close(&pairs, m)?);
    }
    // One complete vote per non-preferred candidate: it first, then its own
    // block of k−1 dummies, then everything else.
    for (slot, &x) in originals.iter().enumerate() {
        let block: Vec<usize> = (0..k - 1).map(|j| base_m + slot * (k - 1) + j).collect();
        let mut order = vec![x];
        order.extend(block.iter().copied());
        order.extend((0..m).filter(|y| *y != x && !block.contains(y)));
        votes.push(PartialVote::from_linear(&LinearVote::new(order, m)?));
    }
    let n_partial = p.n();
    let partial = PartialProfile::new(candidates, votes)?;
    let max_dummy = partial.votes[..n_partial]
        .iter()
        .flat_map(|v| (base_m..m).map(|dummy| i64::from(v.min_position(dummy) <= k)))
        .max()
        .unwrap_or(0);
    let audit = PwGadgetAudit {
        max_dummy_partial_score: max_dummy,
        pinned_scores: None,
        passed: max_dummy == 0,
    };
    let instance = ManipulationInstance::new(Rule::KApproval(k), partial, 1, preferred)?;
    Ok(PwGadget {
        instance,
        audit,
        original_m: base_m,
    })
}

/// Weak manipulation under k-veto from possible winner (k ≥ 2): the
/// preferred candidate is pinned as high as possible so its k-veto score is
/// fixed, k blocker dummies are pinned at the top of every partial vote with
/// an extra dummy d just under them, and generated complete votes bring
/// every blocker to exactly c's fixed score with d strictly below. Any
/// successful manipulator vote must then spend all k vetoes on the blockers.
pub fn reduce_pw_to_wm_kveto(p: &PartialProfile, preferred: usize, k: usize) -> Result<PwGadget> {
    let base_m = p.m();
    if k < 2 || k >= base_m {
        return Err(Error::Parameter(format!(
            "k-veto gadget needs 2 <= k < {base_m}, got {k}"
        )));
    }
    if preferred >= base_m {
        return Err(Error::Parameter(
            "preferred candidate outside candidate set".into(),
        ));
    }
    let m = base_m + k + 1;
    let blockers: Vec<usize> = (base_m..base_m + k).collect();
    let slack = base_m + k;
    let mut labels = p.candidates.labels().to_vec();
    for i in 1..=k {
        let label = fresh_label(&format!("d{i}"), &labels);
        labels.push(label);
    }
    let slack_label = fresh_label("d", &labels);
    labels.push(slack_label);
    let candidates = CandidateSet::new(labels)?;

    let mut votes: Vec<PartialVote> = Vec::new();
    let mut vetoes_on_c = 0i64;
    for v in &p.votes {
        let mut pairs = v.pairs();
        // Fix c as high as possible: above everything not forced above it.
        let anc = v.above_mask(preferred);
        for x in 0..base_m {
            if x != preferred && anc & (1 << x) == 0 {
                pairs.push((preferred, x));
            }
        }
        // Blockers chain on top, then d, all above the originals.
        for i in 0..k - 1 {
            pairs.push((blockers[i], blockers[i + 1]));
        }
        pairs.push((blockers[k - 1], slack));
        for &b in &blockers {
            for x in 0..base_m {
                pairs.push((b, x));
            }
        }
        for x in 0..base_m {
            pairs.push((slack, x));
        }
        let closed = PartialVote::transitive_close(&pairs, m)?;
        let pos = closed.above_mask(preferred).count_ones() as usize + 1;
        debug_assert_eq!(pos, closed.max_position(preferred));
        if pos > m - k {
            vetoes_on_c += 1;
        }
        votes.push(closed);
    }

    // Generated votes realize (m−k)-approval differentials: every original
    // candidate t0 above the blockers, which lands the blockers exactly on
    // c's fixed k-veto score and d strictly below everyone.
    let t0 = vetoes_on_c;
    let mut x = vec![t0; base_m];
    x.extend(vec![0i64; k]);
    let (sets, _, _) = approval_realization(&x, m - k)?;
    let generated: Vec<LinearVote> = sets
        .iter()
        .map(|approved| {
            let mut ranking = approved.clone();
            ranking.extend((0..m).filter(|cand| !approved.contains(cand)));
            LinearVote::new(ranking, m)
        })
        .collect::<Result<_>>()?;

    let gen_tally = Tally::from_votes(m, &generated);
    let gen_scores = gen_tally.positional_scores(&crate::rules::ScoreVector::k_veto(m, k))?;
    let c_score = -t0 + gen_scores[preferred];
    let blocker_scores: Vec<i64> = blockers.iter().map(|&b| gen_scores[b]).collect();
    let d_score = gen_scores[slack];
    let passed = blocker_scores.iter().all(|&s| s == c_score) && d_score < c_score;
    let audit = PwGadgetAudit {
        max_dummy_partial_score: 0,
        pinned_scores: Some((c_score, blocker_scores, d_score)),
        passed,
    };
    if !audit.passed {
        return Err(Error::Infeasible(
            "k-veto gadget failed its score audit".into(),
        ));
    }

    votes.extend(generated.iter().map(PartialVote::from_linear));
    let partial = PartialProfile::new(candidates, votes)?;
    let instance = ManipulationInstance::new(Rule::KVeto(k), partial, 1, preferred)?;
    Ok(PwGadget {
        instance,
        audit,
        original_m: base_m,
    })
}

/// Views a complete-information manipulation problem as a WM or SM instance;
/// complete votes have a single extension, so the answers coincide.
pub fn embed_cm_as(
    kind: ProblemKind,
    rule: Rule,
    p: &Profile,
    manipulators: usize,
    preferred: usize,
) -> Result<(ProblemKind, ManipulationInstance)> {
    match kind {
        ProblemKind::Wm | ProblemKind::Sm => {}
        _ => return Err(Error::Parameter("embedding targets are WM and SM".into())),
    }
    Ok((
        kind,
        ManipulationInstance::new(rule, p.to_partial(), manipulators, preferred)?,
    ))
}

/// Turns a weak-manipulation instance into the possible-winner instance with
/// one fully empty vote appended per manipulator.
pub fn wm_to_pw(inst: &ManipulationInstance) -> Result<(PartialProfile, usize)> {
    let m = inst.partial.m();
    let mut votes = inst.partial.votes.clone();
    for _ in 0..inst.manipulators {
        votes.push(PartialVote::empty(m)?);
    }
    Ok((
        PartialProfile::new(inst.partial.candidates.clone(), votes)?,
        inst.preferred,
    ))
}

/// Parses the X3C text format: `universe: q`, then `set: i j k` lines with
/// 1-based elements; `#` starts a comment.
pub fn parse_x3c(text: &str) -> Result<X3CInstance> {
    let mut universe = None;
    let mut sets = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("line {}: expected `key: …`", ln + 1)))?;
        match key.trim() {
            "universe" => {
                universe = Some(rest.trim().parse::<usize>().map_err(|_| {
                    Error::Parameter(format!("line {}: bad universe size", ln + 1))
                })?);
            }
            "set" => {
                let elems: Vec<usize> = rest
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<usize>()
                            .map_err(|_| Error::Parameter(format!("line {}: bad element", ln + 1)))
                    })
                    .collect::<Result<_>>()?;
                if elems.len() != 3 {
                    return Err(Error::Parameter(format!(
                        "line {}: sets must have exactly 3 elements",
                        ln + 1
                    )));
                }
                if elems.iter().any(|&e| e == 0) {
                    return Err(Error::Parameter(format!(
                        "line {}: elements are 1-based",
                        ln + 1
                    )));
                }
                sets.push([elems[0] - 1, elems[1] - 1, elems[2] - 1]);
            }
            other => {
                return Err(Error::Parameter(format!(
                    "line {}: unknown key `{other}`",
                    ln + 1
                )));
            }
        }
    }
    let q = universe.ok_or_else(|| Error::Parameter("missing `universe:` line".into()))?;
    X3CInstance::new(q, sets)
}

/// Serializes an X3C instance in the text format.
pub fn format_x3c(x: &X3CInstance) -> String {
    let mut out = format!("universe: {}\n", x.q());
    for s in x.sets() {
        out.push_str(&format!("set: {} {} {}\n", s[0] + 1, s[1] + 1, s[2] + 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{
        solve_cm, solve_nw, solve_pw, solve_sm_opts, solve_wm, solve_wm_opts, OracleOptions,
    };
    use crate::rules::unique_winner;

    fn x3c(q: usize, sets: &[[usize; 3]]) -> X3CInstance {
        X3CInstance::new(q, sets.to_vec()).unwrap()
    }

    #[test]
    fn x3c_solver_examples() {
        assert!(x3c_solve(&x3c(3, &[[0, 1, 2]])).unwrap());
        assert!(x3c_solve(&x3c(6, &[[0, 1, 2], [3, 4, 5], [0, 3, 4]])).unwrap());
        assert!(!x3c_solve(&x3c(6, &[[0, 1, 2], [0, 3, 4]])).unwrap());
        assert!(matches!(
            x3c_solve(&X3CInstance::new(15, vec![[0, 1, 2]; 13]).unwrap()),
            Err(Error::Scope(_))
        ));
    }

    #[test]
    fn x3c_rejects_bad_sets() {
        assert!(X3CInstance::new(3, vec![[0, 0, 1]]).is_err());
        assert!(X3CInstance::new(3, vec![[0, 1, 3]]).is_err());
        assert!(X3CInstance::new(4, vec![[0, 1, 2]]).is_err());
        assert!(X3CInstance::new(3, vec![]).is_err());
    }

    #[test]
    fn x3c_text_round_trip() {
        let x = x3c(6, &[[0, 1, 2], [2, 3, 5]]);
        let text = format_x3c(&x);
        assert_eq!(parse_x3c(&text).unwrap(), x);
        assert!(parse_x3c("set: 1 2 3\n").is_err());
        assert!(parse_x3c("universe: 3\nset: 0 1 2\n").is_err());
    }

    #[test]
    fn mcgarvey_single_pair() {
        let cands = CandidateSet::from_names(&["a", "b", "c"]).unwrap();
        let target = MarginTarget::from_entries(3, &[(0, 1, 2)]).unwrap();
        let p = mcgarvey(&target, &cands).unwrap();
        assert_eq!(p.n(), 2);
        let d = crate::rules::margins(&p);
        assert_eq!(d.get(0, 1), 2);
        assert_eq!(d.get(0, 2), 0);
        assert_eq!(d.get(1, 2), 0);
    }

    #[test]
    fn mcgarvey_zero_and_larger_targets() {
        let cands = CandidateSet::from_names(&["a", "b", "c"]).unwrap();
        let p = mcgarvey(&MarginTarget::from_entries(3, &[]).unwrap(), &cands).unwrap();
        assert_eq!(p.n(), 0);
        let p = mcgarvey(
            &MarginTarget::from_entries(3, &[(0, 1, 4)]).unwrap(),
            &cands,
        )
        .unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(crate::rules::margins(&p).get(0, 1), 4);
    }

    #[test]
    fn mcgarvey_rejects_odd_entries() {
        assert!(matches!(
            MarginTarget::from_entries(2, &[(0, 1, 3)]),
            Err(Error::Parity { .. })
        ));
    }

    #[test]
    fn mcgarvey_respects_size_bound_on_random_targets() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..60 {
            let m = rng.gen_range(2..=6);
            let labels: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
            let cands = CandidateSet::new(labels).unwrap();
            let mut entries = Vec::new();
            let mut bound = 0i64;
            for a in 0..m {
                for b in (a + 1)..m {
                    let v = 2 * rng.gen_range(-4i64..=4);
                    bound += v.abs();
                    entries.push((a, b, v));
                }
            }
            let target = MarginTarget::from_entries(m, &entries).unwrap();
            let p = mcgarvey(&target, &cands).unwrap();
            assert!(p.n() as i64 <= bound);
            let d = crate::rules::margins(&p);
            for &(a, b, v) in &entries {
                assert_eq!(d.get(a, b), v);
            }
        }
    }

    #[test]
    fn score_gen_examples() {
        let (_, _, audit) = score_gen(&[0, 0], 1).unwrap();
        assert!(audit.passed);
        let (p, lambda, _) = score_gen(&[1, 0], 1).unwrap();
        let scores = crate::rules::rule_scores(&Rule::KApproval(1), &p).unwrap();
        assert_eq!(scores[0], lambda + 1);
        assert_eq!(scores[1], lambda);
        assert!(scores[2] < lambda);
        let (_, _, audit) = score_gen(&[0, 0, 0, 0], 3).unwrap();
        assert!(audit.passed);
    }

    #[test]
    fn score_gen_random_targets() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..60 {
            let m = rng.gen_range(2..=6usize);
            let k = rng.gen_range(1..m.min(4));
            let x: Vec<i64> = (0..m).map(|_| rng.gen_range(-5i64..=5)).collect();
            let (_, _, audit) = score_gen(&x, k).unwrap();
            assert!(audit.passed, "x={x:?} k={k}");
        }
    }

    fn toy_pw_yes() -> (PartialProfile, usize) {
        // Complete vote a > b > c plus partial a > b: extending the partial
        // vote as a > c > b gives a two 2-approval points against one each.
        let cands = CandidateSet::from_names(&["a", "b", "c"]).unwrap();
        let complete = PartialVote::from_linear(&LinearVote::new(vec![0, 1, 2], 3).unwrap());
        let v = PartialVote::transitive_close(&[(0, 1)], 3).unwrap();
        (PartialProfile::new(cands, vec![complete, v]).unwrap(), 0)
    }

    fn toy_pw_no_kapproval() -> (PartialProfile, usize) {
        // Two complete votes pin c's 2-approval score at 0 while a and b
        // hold 2 points each; c can never catch up.
        let cands = CandidateSet::from_names(&["a", "b", "c"]).unwrap();
        let v1 = PartialVote::from_linear(&LinearVote::new(vec![1, 0, 2], 3).unwrap());
        let v2 = PartialVote::from_linear(&LinearVote::new(vec![1, 0, 2], 3).unwrap());
        (PartialProfile::new(cands, vec![v1, v2]).unwrap(), 2)
    }

    #[test]
    fn kapproval_gadget_preserves_answers() {
        let (p, c) = toy_pw_yes();
        assert!(solve_pw(&Rule::KApproval(2), &p, c).unwrap().answer);
        let g = reduce_pw_to_wm_kapproval(&p, c, 2).unwrap();
        assert!(g.audit.passed);
        assert!(solve_wm(&g.instance).unwrap().answer);

        let (p, c) = toy_pw_no_kapproval();
        assert!(!solve_pw(&Rule::KApproval(2), &p, c).unwrap().answer);
        let g = reduce_pw_to_wm_kapproval(&p, c, 2).unwrap();
        assert!(g.audit.passed);
        assert!(!solve_wm(&g.instance).unwrap().answer);
    }

    #[test]
    fn kveto_gadget_preserves_answers() {
        // Four original candidates so that k = 2 < m.
        let cands = CandidateSet::from_names(&["a", "b", "c", "x"]).unwrap();
        let v = PartialVote::transitive_close(&[(0, 1), (0, 3)], 4).unwrap();
        let p = PartialProfile::new(cands, vec![v]).unwrap();
        let pruned = OracleOptions {
            prune_preferred_top: true,
            ..Default::default()
        };
        for c in 0..4 {
            let pw = solve_pw(&Rule::KVeto(2), &p, c).unwrap().answer;
            let g = reduce_pw_to_wm_kveto(&p, c, 2).unwrap();
            assert!(g.audit.passed);
            let wm = solve_wm_opts(&g.instance, &pruned).unwrap().answer;
            assert_eq!(pw, wm, "candidate {c}");
        }
    }

    #[test]
    fn maximin_gadget_forward_witness() {
        let x = x3c(3, &[[0, 1, 2]]);
        let g = reduce_x3c_to_wm_maximin(&x).unwrap();
        assert!(g.audit.passed);
        assert_eq!(g.t(), 2, "odd family padded to even");
        let cover = x3c_cover(&x).unwrap().unwrap();
        let w = maximin_witness(&g, &cover).unwrap();
        assert!(crate::oracle::extension_is_valid(
            &g.instance.partial,
            w.extension.as_ref().unwrap()
        ));
        let mut votes = w.extension.clone().unwrap();
        votes.extend(w.manipulator_votes.clone());
        let p = Profile::new(g.instance.partial.candidates.clone(), votes).unwrap();
        assert_eq!(
            unique_winner(&Rule::Maximin, &p).unwrap(),
            Some(g.instance.preferred)
        );
    }

    #[test]
    fn copeland_wm_gadget_forward_witness() {
        let x = x3c(3, &[[0, 1, 2]]);
        let g = reduce_x3c_to_wm_copeland(&x).unwrap();
        assert!(g.audit.passed);
        assert_eq!(g.t() % 2, 1);
        let cover = x3c_cover(&x).unwrap().unwrap();
        let vote = copeland_witness_vote(&g).unwrap();
        let mut votes = copeland_extension(&g, &cover).unwrap();
        assert!(crate::oracle::extension_is_valid(
            &g.instance.partial,
            &votes
        ));
        votes.push(vote);
        let p = Profile::new(g.instance.partial.candidates.clone(), votes).unwrap();
        assert_eq!(
            unique_winner(&Rule::Copeland, &p).unwrap(),
            Some(g.instance.preferred)
        );
    }

    #[test]
    fn copeland_sm_gadget_polarity() {
        // Cover exists: the cover-keyed extension beats every manipulator
        // vote, so strong manipulation fails.
        let x = x3c(3, &[[0, 1, 2]]);
        let g = reduce_x3c_to_sm_copeland(&x).unwrap();
        assert!(g.audit.passed);
        assert_eq!(g.t() % 2, 0);
        // c can never defeat d: the set votes plus one manipulator vote are
        // fewer than the installed 4t deficit.
        let t = g.t() as i64;
        let q = g.instance.partial.m() - 4;
        let (c, d) = (q, q + 3);
        let deficit = g
            .audit
            .entries
            .iter()
            .find(|e| e.a == c && e.b == d)
            .expect("c-vs-d entry")
            .achieved;
        assert_eq!(deficit, -4 * t);
        assert!((g.set_votes() as i64) + 1 < 4 * t);
        let cover = x3c_cover(&x).unwrap().unwrap();
        let vote = copeland_witness_vote(&g).unwrap();
        let mut votes = copeland_extension(&g, &cover).unwrap();
        votes.push(vote);
        let p = Profile::new(g.instance.partial.candidates.clone(), votes).unwrap();
        assert_ne!(
            unique_winner(&Rule::Copeland, &p).unwrap(),
            Some(g.instance.preferred)
        );
        let pruned = OracleOptions {
            prune_preferred_top: true,
            ..Default::default()
        };
        assert!(!solve_sm_opts(&g.instance, &pruned).unwrap().answer);
    }

    #[test]
    fn copeland_sm_gadget_yes_without_cover() {
        let x = x3c(6, &[[0, 1, 2], [0, 3, 4]]);
        assert!(!x3c_solve(&x).unwrap());
        let g = reduce_x3c_to_sm_copeland(&x).unwrap();
        assert!(g.audit.passed);
        // The coded vote strongly manipulates: z wins in every extension.
        let vote = copeland_witness_vote(&g).unwrap();
        let mut votes = g.instance.partial.votes.clone();
        votes.push(PartialVote::from_linear(&vote));
        let joined = PartialProfile::new(g.instance.partial.candidates.clone(), votes).unwrap();
        let nw = solve_nw(&Rule::Copeland, &joined, g.instance.preferred).unwrap();
        assert!(nw.answer);
    }

    #[test]
    fn bucklin_gadget_forward_witness() {
        // Two copies keep the dummy block from tying c at the decisive level.
        let x = x3c(3, &[[0, 1, 2], [0, 1, 2]]);
        let g = reduce_x3c_to_wm_bucklin(&x).unwrap();
        assert!(g.audit.passed);
        // Total electorate including the manipulator is 2t + 2q/3 + 1.
        assert_eq!(g.instance.partial.n() + 1, 2 * g.t() + 2 * x.q() / 3 + 1);
        let cover = x3c_cover(&x).unwrap().unwrap();
        let w = bucklin_witness(&g, &cover).unwrap();
        assert!(crate::oracle::extension_is_valid(
            &g.instance.partial,
            w.extension.as_ref().unwrap()
        ));
        let mut votes = w.extension.clone().unwrap();
        votes.extend(w.manipulator_votes.clone());
        let p = Profile::new(g.instance.partial.candidates.clone(), votes).unwrap();
        assert_eq!(
            unique_winner(&Rule::Bucklin, &p).unwrap(),
            Some(g.instance.preferred)
        );
    }

    #[test]
    fn embed_and_unembed_round_trips() {
        let cands = CandidateSet::from_names(&["a", "b"]).unwrap();
        let p = Profile::new(cands, vec![LinearVote::new(vec![1, 0], 2).unwrap()]).unwrap();
        for kind in [ProblemKind::Wm, ProblemKind::Sm] {
            let (_, inst) = embed_cm_as(kind, Rule::Plurality, &p, 2, 0).unwrap();
            assert_eq!(inst.partial.n(), p.n());
            let cm = solve_cm(&Rule::Plurality, &p, 2, 0).unwrap().answer;
            assert_eq!(cm, solve_wm(&inst).unwrap().answer);
        }
        let cands = CandidateSet::from_names(&["a", "b"]).unwrap();
        let inst = ManipulationInstance::new(
            Rule::Plurality,
            PartialProfile::new(cands, vec![]).unwrap(),
            2,
            0,
        )
        .unwrap();
        let (pw, c) = wm_to_pw(&inst).unwrap();
        assert_eq!(pw.n(), 2);
        assert_eq!(c, 0);
        assert!(solve_pw(&Rule::Plurality, &pw, c).unwrap().answer);
    }
}
