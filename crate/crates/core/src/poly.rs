//! Polynomial-time algorithms for the tractable manipulation problems, each
//! contractually equivalent to the corresponding oracle:
//!
//! - strong manipulation for k-approval and k-veto (any coalition size),
//!   via per-candidate worst-case score gaps and flow feasibility;
//! - strong manipulation for any positional scoring rule with one
//!   manipulator, via bipartite matching of candidates to positions;
//! - strong manipulation for Bucklin (any coalition size), via adversarial
//!   extensions per (opponent, level) and a greedy left-to-right fill;
//! - strong manipulation for maximin with one manipulator, via pessimistic
//!   pairwise bounds and a greedy vote construction;
//! - possible winner (hence weak manipulation) for plurality and veto, via
//!   top/bottom assignment flows.

use crate::error::{Error, Result};
use crate::flow::{feasible_flow_with_demands, BoundedEdge, FlowNetwork};
use crate::oracle::{ManipulationInstance, SolveResult, SolveStats, Witness};
use crate::prefs::{LinearVote, PartialProfile, PartialVote};
use crate::rules::{Rule, ScoreVector};

/// Pessimistic and optimistic pairwise comparison counts over a partial
/// profile: `nmin[a][b]` votes force a over b, `nmax[a][b]` votes are
/// consistent with a over b.
#[derive(Debug, Clone)]
pub struct PairwiseBounds {
    pub nmin: Vec<Vec<i64>>,
    pub nmax: Vec<Vec<i64>>,
}

impl PairwiseBounds {
    pub fn compute(p: &PartialProfile) -> Self {
        let m = p.m();
        let n = p.n() as i64;
        let mut nmin = vec![vec![0i64; m]; m];
        for v in &p.votes {
            for a in 0..m {
                for b in 0..m {
                    if a != b && v.prefers(a, b) {
                        nmin[a][b] += 1;
                    }
                }
            }
        }
        let mut nmax = vec![vec![0i64; m]; m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    nmax[a][b] = n - nmin[b][a];
                }
            }
        }
        PairwiseBounds { nmin, nmax }
    }
}

/// Per-opponent maximum of the non-manipulators' score advantage over the
/// preferred candidate, summed per-vote over worst-case extensions.
#[derive(Debug, Clone)]
pub struct ScoreGap {
    pub preferred: usize,
    /// smax_nm[c'] = max over extensions of score(c') − score(preferred);
    /// the entry at `preferred` itself is 0.
    pub smax_nm: Vec<i64>,
}

/// Computes the worst-case score gaps for every opponent under `sv`.
///
/// Per vote, the maximum of `score(c') − score(c)` over that vote's
/// extensions is found by order-ideal position reasoning; per-vote maxima sum
/// because votes extend independently.
pub fn score_gap(sv: &ScoreVector, p: &PartialProfile, c: usize) -> Result<ScoreGap> {
    let m = p.m();
    if sv.m() != m {
        return Err(Error::Dimension {
            expected: m,
            got: sv.m(),
        });
    }
    let mut smax_nm = vec![0i64; m];
    for cp in 0..m {
        if cp == c {
            continue;
        }
        smax_nm[cp] = p
            .votes
            .iter()
            .map(|v| v.max_score_gap(sv.alphas(), cp, c))
            .sum();
    }
    Ok(ScoreGap {
        preferred: c,
        smax_nm,
    })
}

fn poly_yes(votes: Vec<LinearVote>, extension: Option<Vec<LinearVote>>) -> SolveResult {
    SolveResult {
        answer: true,
        witness: Some(Witness {
            manipulator_votes: votes,
            extension,
        }),
        stats: SolveStats::default(),
    }
}

fn poly_no() -> SolveResult {
    SolveResult {
        answer: false,
        witness: None,
        stats: SolveStats::default(),
    }
}

/// Builds a manipulator vote with `c` first, then `mid`, then the remaining
/// candidates ascending.
fn vote_c_top(m: usize, c: usize, mid: &[usize]) -> LinearVote {
    let mut ranking = Vec::with_capacity(m);
    ranking.push(c);
    ranking.extend_from_slice(mid);
    let mut rest: Vec<usize> = (0..m).filter(|x| *x != c && !mid.contains(x)).collect();
    rest.sort_unstable();
    ranking.extend(rest);
    LinearVote::new(ranking, m).expect("permutation")
}

/// Strong manipulation under k-approval, any coalition size.
///
/// The preferred candidate is fixed at the top of every manipulator vote.
/// Each opponent tolerates at most `|M| − 1 − smax_nm` manipulator approvals
/// before it could tie in some extension; filling the remaining approval
/// slots subject to those caps is a max-flow feasibility question.
pub fn sm_kapproval(inst: &ManipulationInstance, k: usize) -> Result<SolveResult> {
    let m = inst.partial.m();
    let c = inst.preferred;
    if k < 1 || k >= m {
        return Err(Error::Parameter(format!(
            "k-approval needs 1 <= k < m, got k={k}, m={m}"
        )));
    }
    let coalition = inst.manipulators;
    let gap = score_gap(&ScoreVector::k_approval(m, k), &inst.partial, c)?;
    let mut cap = vec![0i64; m];
    for cp in 0..m {
        if cp == c {
            continue;
        }
        cap[cp] = coalition as i64 - 1 - gap.smax_nm[cp];
        if cap[cp] < 0 {
            return Ok(poly_no());
        }
    }
    let slots = (k - 1) * coalition;
    if slots == 0 {
        let votes = vec![vote_c_top(m, c, &[]); coalition];
        return Ok(poly_yes(votes, None));
    }
    // source → vote (k−1) → candidate (1) → sink (cap).
    let others: Vec<usize> = (0..m).filter(|&x| x != c).collect();
    let mut net = FlowNetwork::new(2 + coalition + others.len());
    let source = 0;
    let sink = 1;
    let vote_node = |i: usize| 2 + i;
    let cand_node = |j: usize| 2 + coalition + j;
    for i in 0..coalition {
        net.add_edge(source, vote_node(i), (k - 1) as i64);
    }
    let mut mid_handles = Vec::new();
    for i in 0..coalition {
        for (j, _) in others.iter().enumerate() {
            mid_handles.push((i, j, net.add_edge(vote_node(i), cand_node(j), 1)));
        }
    }
    for (j, &cp) in others.iter().enumerate() {
        net.add_edge(cand_node(j), sink, cap[cp].min(coalition as i64));
    }
    if net.max_flow(source, sink) != slots as i64 {
        return Ok(poly_no());
    }
    let mut approved: Vec<Vec<usize>> = vec![Vec::new(); coalition];
    for &(i, j, h) in &mid_handles {
        if net.flow_on(h) > 0 {
            approved[i].push(others[j]);
        }
    }
    let mut votes: Vec<LinearVote> = approved
        .into_iter()
        .map(|mut mid| {
            mid.sort_unstable();
            vote_c_top(m, c, &mid)
        })
        .collect();
    votes.sort();
    Ok(poly_yes(votes, None))
}

/// Strong manipulation under k-veto, any coalition size.
///
/// Manipulators never veto the preferred candidate; opponent `c'` must
/// collect at least `smax_nm(c') + 1` manipulator vetoes. Feasibility is a
/// flow with lower bounds.
pub fn sm_kveto(inst: &ManipulationInstance, k: usize) -> Result<SolveResult> {
    let m = inst.partial.m();
    let c = inst.preferred;
    if k < 1 || k >= m {
        return Err(Error::Parameter(format!(
            "k-veto needs 1 <= k < m, got k={k}, m={m}"
        )));
    }
    let coalition = inst.manipulators as i64;
    let gap = score_gap(&ScoreVector::k_veto(m, k), &inst.partial, c)?;
    let others: Vec<usize> = (0..m).filter(|&x| x != c).collect();
    let mut need = vec![0i64; m];
    for &cp in &others {
        need[cp] = (gap.smax_nm[cp] + 1).max(0);
        if need[cp] > coalition {
            return Ok(poly_no());
        }
    }
    // source → vote [k,k] → candidate [0,1] → sink [need, |M|].
    let votes_n = inst.manipulators;
    let source = 0;
    let sink = 1;
    let vote_node = |i: usize| 2 + i;
    let cand_node = |j: usize| 2 + votes_n + j;
    let nodes = 2 + votes_n + others.len();
    let mut edges = Vec::new();
    for i in 0..votes_n {
        edges.push(BoundedEdge {
            from: source,
            to: vote_node(i),
            lower: k as i64,
            upper: k as i64,
        });
    }
    let mut mid = Vec::new();
    for i in 0..votes_n {
        for j in 0..others.len() {
            mid.push((i, j, edges.len()));
            edges.push(BoundedEdge {
                from: vote_node(i),
                to: cand_node(j),
                lower: 0,
                upper: 1,
            });
        }
    }
    for (j, &cp) in others.iter().enumerate() {
        edges.push(BoundedEdge {
            from: cand_node(j),
            to: sink,
            lower: need[cp],
            upper: coalition,
        });
    }
    let total = (k * votes_n) as i64;
    let flows = match feasible_flow_with_demands(nodes, &edges, source, sink, total) {
        Some(f) => f,
        None => return Ok(poly_no()),
    };
    let mut vetoed: Vec<Vec<usize>> = vec![Vec::new(); votes_n];
    for &(i, j, e) in &mid {
        if flows[e] > 0 {
            vetoed[i].push(others[j]);
        }
    }
    let mut votes: Vec<LinearVote> = vetoed
        .into_iter()
        .map(|mut bottom| {
            bottom.sort_unstable();
            let mut ranking = vec![c];
            ranking.extend((0..m).filter(|x| *x != c && !bottom.contains(x)));
            ranking.extend(bottom.iter().copied());
            LinearVote::new(ranking, m).expect("permutation")
        })
        .collect();
    votes.sort();
    Ok(poly_yes(votes, None))
}

/// Strong manipulation under an arbitrary positional scoring rule with a
/// single manipulator, by perfect matching of opponents to vote positions.
pub fn sm_scoring_single(inst: &ManipulationInstance, sv: &ScoreVector) -> Result<SolveResult> {
    if inst.manipulators != 1 {
        return Err(Error::Parameter(
            "scoring-rule SM solver needs exactly one manipulator".into(),
        ));
    }
    let m = inst.partial.m();
    let c = inst.preferred;
    let gap = score_gap(sv, &inst.partial, c)?;
    let alphas = sv.alphas();
    if m == 1 {
        return Ok(poly_yes(vec![vote_c_top(1, 0, &[])], None));
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != c).collect();
    // allowed[j][i]: opponent j may sit at 1-based position i+2.
    let allowed: Vec<Vec<bool>> = others
        .iter()
        .map(|&cp| {
            (1..m)
                .map(|i| gap.smax_nm[cp] + alphas[i] - alphas[0] < 0)
                .collect()
        })
        .collect();
    let positions = m - 1;
    let mut matched_of_pos: Vec<Option<usize>> = vec![None; positions];
    fn augment(
        j: usize,
        allowed: &[Vec<bool>],
        matched_of_pos: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for i in 0..matched_of_pos.len() {
            if allowed[j][i] && !seen[i] {
                seen[i] = true;
                let free = match matched_of_pos[i] {
                    None => true,
                    Some(owner) => augment(owner, allowed, matched_of_pos, seen),
                };
                if free {
                    matched_of_pos[i] = Some(j);
                    return true;
                }
            }
        }
        false
    }
    for j in 0..others.len() {
        let mut seen = vec![false; positions];
        if !augment(j, &allowed, &mut matched_of_pos, &mut seen) {
            return Ok(poly_no());
        }
    }
    let mut ranking = vec![c];
    for slot in matched_of_pos {
        ranking.push(others[slot.expect("perfect matching")]);
    }
    Ok(poly_yes(vec![LinearVote::new(ranking, m)?], None))
}

/// Strong manipulation under Bucklin, any coalition size.
///
/// For every opponent `w` and level `l`, the worst extension for the
/// preferred candidate is built by a four-case analysis on how `c` and `w`
/// compare in each partial vote; negating the resulting failure conditions
/// caps how often `w` may appear in the manipulators' top `l`. A greedy
/// left-to-right fill respecting all caps jointly then constructs the votes.
pub fn sm_bucklin(inst: &ManipulationInstance) -> Result<SolveResult> {
    let m = inst.partial.m();
    let c = inst.preferred;
    let coalition = inst.manipulators;
    let n_total = (inst.partial.n() + coalition) as i64;
    if m == 1 {
        return Ok(poly_yes(vec![vote_c_top(1, 0, &[])], None));
    }
    // caps[w][l], valid for w != c and 2 <= l <= m.
    let mut caps = vec![vec![coalition as i64; m + 1]; m];
    for w in 0..m {
        if w == c {
            continue;
        }
        for l in 2..=m {
            let mut d_c = coalition as i64; // c tops every manipulator vote
            let mut d_w = 0i64;
            let mut reserve = 0i64; // votes where w in top l forces c into top l−1
            for v in &inst.partial.votes {
                let adversarial = if !v.prefers(c, w) {
                    Some(v.extend_extreme(w, c))
                } else if (v.above_mask(w).count_ones() as usize) >= l {
                    Some(v.extend_low(c))
                } else if v.max_position(c) <= l - 1 {
                    Some(v.extend_extreme(w, c))
                } else {
                    reserve += 1;
                    None
                };
                if let Some(e) = adversarial {
                    if e.position(c) <= l - 1 {
                        d_c += 1;
                    }
                    if e.position(w) <= l {
                        d_w += 1;
                    }
                }
            }
            caps[w][l] = if 2 * d_c > n_total {
                coalition as i64
            } else {
                let by_majority = n_total / 2 - reserve - d_w;
                let by_gap = d_c - d_w;
                let cap = by_majority.max(by_gap);
                if cap < 0 {
                    // The adversary reaches a majority for w without any
                    // manipulator appearances: no vote profile can help.
                    return Ok(poly_no());
                }
                cap.min(coalition as i64)
            };
        }
    }
    let mut rankings: Vec<Vec<usize>> = vec![vec![c]; coalition];
    let mut used = vec![vec![0i64; m + 1]; m];
    for pos in 2..=m {
        for ranking in rankings.iter_mut() {
            let pick = (0..m).find(|&w| {
                w != c && !ranking.contains(&w) && (pos..=m).all(|l| used[w][l] < caps[w][l])
            });
            let w = match pick {
                Some(w) => w,
                None => return Ok(poly_no()),
            };
            ranking.push(w);
            for l in pos..=m {
                used[w][l] += 1;
            }
        }
    }
    let votes = rankings
        .into_iter()
        .map(|r| LinearVote::new(r, m).expect("permutation"))
        .collect();
    Ok(poly_yes(votes, None))
}

/// Per-(opponent, benchmark) adversarial comparison counts for the maximin
/// solver. For opponent `w` and benchmark pair (c, y), every partial vote is
/// extended to simultaneously put y over c wherever consistent and w as high
/// as possible; `count[d]` is then the number of votes where w beats d.
struct MaximinAdversary {
    /// counts[w][y][d]
    counts: Vec<Vec<Vec<i64>>>,
    nmin: Vec<Vec<i64>>,
}

impl MaximinAdversary {
    fn compute(p: &PartialProfile, c: usize) -> Self {
        let m = p.m();
        let bounds = PairwiseBounds::compute(p);
        let mut counts = vec![vec![vec![0i64; m]; m]; m];
        // Complete votes admit no adversarial freedom; fold them in once.
        let mut base = vec![vec![0i64; m]; m];
        let mut open: Vec<&PartialVote> = Vec::new();
        for v in &p.votes {
            if v.is_complete() {
                for w in 0..m {
                    let blocked = v.above_mask(w);
                    for d in 0..m {
                        if d != w && blocked & (1 << d) == 0 {
                            base[w][d] += 1;
                        }
                    }
                }
            } else {
                open.push(v);
            }
        }
        for w in 0..m {
            for y in 0..m {
                counts[w][y].clone_from(&base[w]);
            }
        }
        for v in open {
            for w in 0..m {
                let anc_w = v.above_mask(w);
                let conflict_base = anc_w & (1 << c) != 0;
                for y in 0..m {
                    if y == c {
                        continue;
                    }
                    // Hoisting y (and its ancestors) over c drags them over w
                    // only when c is forced above w and y is not already
                    // forced below c.
                    let hoisted = if conflict_base && !v.prefers(c, y) {
                        (1u64 << y) | v.above_mask(y)
                    } else {
                        0
                    };
                    let blocked = anc_w | hoisted;
                    for d in 0..m {
                        if d != w && blocked & (1 << d) == 0 {
                            counts[w][y][d] += 1;
                        }
                    }
                }
            }
        }
        MaximinAdversary {
            counts,
            nmin: bounds.nmin,
        }
    }

    /// Whether placing `w` below everything in `placed` (and above the rest)
    /// still leaves the preferred candidate `c` strictly ahead of `w` in
    /// every extension. Unplaced opponents are credited one future point of
    /// the manipulator's vote.
    fn opponent_blocked(&self, m: usize, c: usize, w: usize, placed: &[bool]) -> bool {
        for y in 0..m {
            if y == c {
                continue;
            }
            let threshold = self.nmin[c][y];
            let adversary_wins = (0..m).all(|d| {
                if d == w {
                    return true;
                }
                let required = if placed[d] { threshold + 1 } else { threshold };
                self.counts[w][y][d] >= required
            });
            if adversary_wins {
                return false;
            }
        }
        true
    }
}

/// Strong manipulation under maximin with a single manipulator.
///
/// The vote is built greedily from the top: the preferred candidate first,
/// then any candidate that stays strictly beaten in the worst case, with
/// already-placed candidates' manipulator margins frozen and unplaced ones
/// credited one future point. Admissibility is monotone in the placed set,
/// so any greedy completion order works; ties go to the smallest index.
pub fn sm_maximin_single(inst: &ManipulationInstance) -> Result<SolveResult> {
    if inst.manipulators != 1 {
        return Err(Error::Parameter(
            "maximin SM solver needs exactly one manipulator".into(),
        ));
    }
    let m = inst.partial.m();
    let c = inst.preferred;
    if m == 1 {
        return Ok(poly_yes(vec![vote_c_top(1, 0, &[])], None));
    }
    let adv = MaximinAdversary::compute(&inst.partial, c);
    let mut placed = vec![false; m];
    placed[c] = true;
    let mut ranking = vec![c];
    while ranking.len() < m {
        let pick = (0..m).find(|&w| !placed[w] && adv.opponent_blocked(m, c, w, &placed));
        let w = match pick {
            Some(w) => w,
            None => return Ok(poly_no()),
        };
        placed[w] = true;
        ranking.push(w);
    }
    Ok(poly_yes(vec![LinearVote::new(ranking, m)?], None))
}

/// Possible winner under plurality.
///
/// The candidate is placed first wherever it is maximal; every remaining vote
/// must hand its top position to one of its maximal elements, with each
/// opponent receiving strictly fewer tops than the candidate's total. That
/// assignment is a bipartite flow.
pub fn pw_plurality(p: &PartialProfile, c: usize) -> Result<SolveResult> {
    let m = p.m();
    if p.n() == 0 {
        return Ok(poly_no());
    }
    let mut tops: Vec<Option<usize>> = vec![None; p.n()];
    let mut score_c = 0i64;
    let mut rest = Vec::new();
    for (i, v) in p.votes.iter().enumerate() {
        if v.above_mask(c) == 0 {
            tops[i] = Some(c);
            score_c += 1;
        } else {
            rest.push(i);
        }
    }
    if !rest.is_empty() && score_c == 0 {
        return Ok(poly_no());
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != c).collect();
    if !rest.is_empty() {
        let mut net = FlowNetwork::new(2 + rest.len() + others.len());
        let source = 0;
        let sink = 1;
        let vote_node = |i: usize| 2 + i;
        let cand_node = |j: usize| 2 + rest.len() + j;
        let mut mid = Vec::new();
        for (slot, &vi) in rest.iter().enumerate() {
            net.add_edge(source, vote_node(slot), 1);
            for (j, &x) in others.iter().enumerate() {
                if p.votes[vi].above_mask(x) == 0 {
                    mid.push((slot, j, net.add_edge(vote_node(slot), cand_node(j), 1)));
                }
            }
        }
        for (j, _) in others.iter().enumerate() {
            net.add_edge(cand_node(j), sink, score_c - 1);
        }
        if net.max_flow(source, sink) != rest.len() as i64 {
            return Ok(poly_no());
        }
        for &(slot, j, h) in &mid {
            if net.flow_on(h) > 0 {
                tops[rest[slot]] = Some(others[j]);
            }
        }
    }
    let extension: Vec<LinearVote> = p
        .votes
        .iter()
        .zip(&tops)
        .map(|(v, top)| v.extend_high(top.expect("assigned")))
        .collect();
    Ok(poly_yes(vec![], Some(extension)))
}

/// Possible winner under veto.
///
/// The candidate absorbs a veto only where it is the unique minimal element;
/// every other vote vetoes one of its minimal elements, and each opponent
/// must collect strictly more vetoes than the candidate. Feasibility is a
/// flow with lower bounds.
pub fn pw_veto(p: &PartialProfile, c: usize) -> Result<SolveResult> {
    let m = p.m();
    if m < 2 {
        return Err(Error::Parameter(
            "veto needs at least two candidates".into(),
        ));
    }
    if p.n() == 0 {
        return Ok(poly_no());
    }
    let minimal = |v: &PartialVote, x: usize| v.below_mask(x) == 0;
    let mut bottoms: Vec<Option<usize>> = vec![None; p.n()];
    let mut vetoes_c = 0i64;
    let mut rest = Vec::new();
    for (i, v) in p.votes.iter().enumerate() {
        let c_only_minimal = minimal(v, c) && (0..m).all(|x| x == c || !minimal(v, x));
        if c_only_minimal {
            bottoms[i] = Some(c);
            vetoes_c += 1;
        } else {
            rest.push(i);
        }
    }
    let others: Vec<usize> = (0..m).filter(|&x| x != c).collect();
    let source = 0;
    let sink = 1;
    let vote_node = |i: usize| 2 + i;
    let cand_node = |j: usize| 2 + rest.len() + j;
    let nodes = 2 + rest.len() + others.len();
    let mut edges = Vec::new();
    let mut mid = Vec::new();
    for (slot, &vi) in rest.iter().enumerate() {
        edges.push(BoundedEdge {
            from: source,
            to: vote_node(slot),
            lower: 1,
            upper: 1,
        });
        for (j, &x) in others.iter().enumerate() {
            if minimal(&p.votes[vi], x) {
                mid.push((slot, j, edges.len()));
                edges.push(BoundedEdge {
                    from: vote_node(slot),
                    to: cand_node(j),
                    lower: 0,
                    upper: 1,
                });
            }
        }
    }
    for (j, _) in others.iter().enumerate() {
        edges.push(BoundedEdge {
            from: cand_node(j),
            to: sink,
            lower: vetoes_c + 1,
            upper: p.n() as i64,
        });
    }
    let flows = match feasible_flow_with_demands(nodes, &edges, source, sink, rest.len() as i64) {
        Some(f) => f,
        None => return Ok(poly_no()),
    };
    for &(slot, j, e) in &mid {
        if flows[e] > 0 {
            bottoms[rest[slot]] = Some(others[j]);
        }
    }
    let extension: Vec<LinearVote> = p
        .votes
        .iter()
        .zip(&bottoms)
        .map(|(v, bottom)| v.extend_low(bottom.expect("assigned")))
        .collect();
    Ok(poly_yes(vec![], Some(extension)))
}

/// Weak manipulation under plurality or veto: solved as a possible-winner
/// question on the profile with one empty vote appended per manipulator.
pub fn wm_plurality_veto(inst: &ManipulationInstance) -> Result<SolveResult> {
    let m = inst.partial.m();
    let c = inst.preferred;
    let mut votes = inst.partial.votes.clone();
    for _ in 0..inst.manipulators {
        votes.push(PartialVote::empty(m)?);
    }
    let aug = PartialProfile::new(inst.partial.candidates.clone(), votes)?;
    let solved = match inst.rule {
        Rule::Plurality => pw_plurality(&aug, c)?,
        Rule::Veto => pw_veto(&aug, c)?,
        _ => {
            return Err(Error::Parameter(
                "weak-manipulation poly solver supports only plurality and veto".into(),
            ))
        }
    };
    Ok(match solved.witness {
        Some(w) => {
            let mut extension = w.extension.expect("possible-winner witness");
            let manipulator_votes = extension.split_off(inst.partial.n());
            poly_yes(manipulator_votes, Some(extension))
        }
        None => poly_no(),
    })
}
