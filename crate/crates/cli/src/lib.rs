//! File formats and solver dispatch for the `manip` command line tool.
//!
//! The election file format is newline-delimited UTF-8 with `#` comments:
//!
//! ```text
//! candidates: a b c
//! vote: a > b > c          # complete ranking
//! pvote: a > b ; b > c     # semicolon-separated chains, closed transitively
//! pvote:                   # a fully unknown vote
//! manipulators: 2
//! preferred: a
//! rule: k-approval 2
//! ```
//!
//! Results are emitted as a single JSON object per run with the fields
//! `problem`, `rule`, `answer`, `witness`, and `stats` always present.

use serde::{Deserialize, Serialize};

use manip_core::error::Error as CoreError;
use manip_core::oracle::{
    self, ManipulationInstance, OracleOptions, ProblemKind, SolveResult, SolveStats, Witness,
};
use manip_core::poly;
use manip_core::prefs::{CandidateSet, LinearVote, PartialProfile, PartialVote, Profile};
use manip_core::rules::{Rule, ScoreVector};

/// Exit codes shared by every subcommand.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const BUDGET: i32 = 2;
    pub const HARDNESS: i32 = 3;
    pub const WITNESS_REJECTED: i32 = 4;
    pub const MISMATCH: i32 = 5;
}

/// An input-file diagnostic with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "line {} column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// Parsed election file: a partial profile plus the optional instance lines.
#[derive(Debug, Clone)]
pub struct ElectionFile {
    pub profile: PartialProfile,
    pub manipulators: Option<usize>,
    pub preferred: Option<usize>,
    pub rule: Option<Rule>,
}

fn err_at(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn token_column(line: &str, token: &str) -> usize {
    line.find(token).map_or(1, |i| i + 1)
}

/// Parses a rule specification such as `bucklin`, `k-approval 2` or
/// `scoring 2,1,1,0`.
pub fn parse_rule(text: &str) -> Result<Rule, String> {
    let mut parts = text.split_whitespace();
    let head = parts.next().ok_or("empty rule")?;
    let arg = parts.next();
    if parts.next().is_some() {
        return Err(format!("trailing tokens after rule `{head}`"));
    }
    let need_k = |arg: Option<&str>| -> Result<usize, String> {
        let raw = arg.ok_or(format!("rule `{head}` needs a k parameter"))?;
        raw.parse::<usize>()
            .map_err(|_| format!("bad k value `{raw}`"))
    };
    match head {
        "plurality" => Ok(Rule::Plurality),
        "veto" => Ok(Rule::Veto),
        "borda" => Ok(Rule::Borda),
        "bucklin" => Ok(Rule::Bucklin),
        "maximin" => Ok(Rule::Maximin),
        "copeland" => Ok(Rule::Copeland),
        "k-approval" => Ok(Rule::KApproval(need_k(arg)?)),
        "k-veto" => Ok(Rule::KVeto(need_k(arg)?)),
        "scoring" => {
            let raw = arg.ok_or("rule `scoring` needs a comma-separated vector")?;
            let alphas: Vec<i64> = raw
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| format!("bad score `{t}`"))
                })
                .collect::<Result<_, _>>()?;
            ScoreVector::new(alphas)
                .map(Rule::Scoring)
                .map_err(|e| e.to_string())
        }
        other => Err(format!("unknown rule `{other}`")),
    }
}

/// Formats a rule in the same syntax `parse_rule` accepts.
pub fn format_rule(rule: &Rule) -> String {
    match rule {
        Rule::KApproval(k) => format!("k-approval {k}"),
        Rule::KVeto(k) => format!("k-veto {k}"),
        Rule::Scoring(sv) => {
            let parts: Vec<String> = sv.alphas().iter().map(|a| a.to_string()).collect();
            format!("scoring {}", parts.join(","))
        }
        other => other.name().to_string(),
    }
}

/// Parses the election file format.
pub fn parse_election(text: &str) -> Result<ElectionFile, ParseError> {
    let mut candidates: Option<CandidateSet> = None;
    // (line number, raw body, is_complete)
    let mut vote_lines: Vec<(usize, String, bool)> = Vec::new();
    let mut manipulators = None;
    let mut preferred_label: Option<(usize, String)> = None;
    let mut rule = None;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err_at(ln, 1, "expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "candidates" => {
                if candidates.is_some() {
                    return Err(err_at(ln, 1, "duplicate candidates line"));
                }
                let labels: Vec<String> = rest.split_whitespace().map(String::from).collect();
                candidates = Some(
                    CandidateSet::new(labels)
                        .map_err(|e| err_at(ln, token_column(line, rest), e.to_string()))?,
                );
            }
            "vote" => vote_lines.push((ln, rest.to_string(), true)),
            "pvote" => vote_lines.push((ln, rest.to_string(), false)),
            "manipulators" => {
                manipulators =
                    Some(rest.parse::<usize>().map_err(|_| {
                        err_at(ln, token_column(line, rest), "bad manipulator count")
                    })?);
            }
            "preferred" => preferred_label = Some((ln, rest.to_string())),
            "rule" => {
                rule = Some(parse_rule(rest).map_err(|m| err_at(ln, token_column(line, rest), m))?);
            }
            other => {
                return Err(err_at(ln, 1, format!("unknown key `{other}`")));
            }
        }
    }
    let candidates = candidates.ok_or_else(|| err_at(1, 1, "missing `candidates:` line"))?;
    let m = candidates.m();
    let lookup = |ln: usize, line: &str, label: &str| -> Result<usize, ParseError> {
        candidates.index_of(label).ok_or_else(|| {
            err_at(
                ln,
                token_column(line, label),
                format!("unknown candidate `{label}`"),
            )
        })
    };
    let mut votes = Vec::with_capacity(vote_lines.len());
    for (ln, body, complete) in &vote_lines {
        if *complete {
            let labels: Vec<&str> = body.split('>').map(str::trim).collect();
            if labels.len() == 1 && labels[0].is_empty() {
                return Err(err_at(*ln, 1, "empty `vote:` line"));
            }
            let mut ranking = Vec::with_capacity(labels.len());
            for label in labels {
                ranking.push(lookup(*ln, body, label)?);
            }
            let vote = LinearVote::new(ranking, m).map_err(|e| err_at(*ln, 1, e.to_string()))?;
            votes.push(PartialVote::from_linear(&vote));
        } else {
            let mut pairs = Vec::new();
            for chain in body.split(';') {
                let chain = chain.trim();
                if chain.is_empty() {
                    continue;
                }
                let labels: Vec<&str> = chain.split('>').map(str::trim).collect();
                if labels.len() < 2 {
                    return Err(err_at(
                        *ln,
                        token_column(body, chain),
                        "a chain needs at least two candidates",
                    ));
                }
                for pair in labels.windows(2) {
                    pairs.push((lookup(*ln, body, pair[0])?, lookup(*ln, body, pair[1])?));
                }
            }
            let vote = PartialVote::transitive_close(&pairs, m)
                .map_err(|e| err_at(*ln, 1, e.to_string()))?;
            votes.push(vote);
        }
    }
    let profile =
        PartialProfile::new(candidates, votes).map_err(|e| err_at(1, 1, e.to_string()))?;
    let preferred = match preferred_label {
        Some((ln, label)) => Some(
            profile
                .candidates
                .index_of(&label)
                .ok_or_else(|| err_at(ln, 1, format!("unknown candidate `{label}`")))?,
        ),
        None => None,
    };
    Ok(ElectionFile {
        profile,
        manipulators,
        preferred,
        rule,
    })
}

/// Serializes an election file; parsing the output reproduces the input
/// structure.
pub fn format_election(e: &ElectionFile) -> String {
    let labels = e.profile.candidates.labels();
    let mut out = format!("candidates: {}\n", labels.join(" "));
    for v in &e.profile.votes {
        if v.is_complete() {
            let ranking = v.extensions_budgeted(2).expect("complete vote");
            let names: Vec<&str> = ranking[0]
                .ranking()
                .iter()
                .map(|&c| labels[c].as_str())
                .collect();
            out.push_str(&format!("vote: {}\n", names.join(" > ")));
        } else {
            let chains: Vec<String> = v
                .reduction_pairs()
                .into_iter()
                .map(|(a, b)| format!("{} > {}", labels[a], labels[b]))
                .collect();
            out.push_str(&format!("pvote: {}\n", chains.join(" ; ")));
        }
    }
    if let Some(n) = e.manipulators {
        out.push_str(&format!("manipulators: {n}\n"));
    }
    if let Some(c) = e.preferred {
        out.push_str(&format!("preferred: {}\n", labels[c]));
    }
    if let Some(rule) = &e.rule {
        out.push_str(&format!("rule: {}\n", format_rule(rule)));
    }
    out
}

/// Margin-target file: `candidates: a b c` plus `margin: a b 4` lines.
pub fn parse_margin_file(
    text: &str,
) -> Result<(CandidateSet, manip_core::gadgets::MarginTarget), ParseError> {
    let mut candidates: Option<CandidateSet> = None;
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err_at(ln, 1, "expected `key: value`"))?;
        let rest = rest.trim();
        match key.trim() {
            "candidates" => {
                let labels: Vec<String> = rest.split_whitespace().map(String::from).collect();
                candidates =
                    Some(CandidateSet::new(labels).map_err(|e| err_at(ln, 1, e.to_string()))?);
            }
            "margin" => {
                let cands = candidates
                    .as_ref()
                    .ok_or_else(|| err_at(ln, 1, "candidates line must come first"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err_at(ln, 1, "expected `margin: a b VALUE`"));
                }
                let a = cands
                    .index_of(toks[0])
                    .ok_or_else(|| err_at(ln, 1, format!("unknown candidate `{}`", toks[0])))?;
                let b = cands
                    .index_of(toks[1])
                    .ok_or_else(|| err_at(ln, 1, format!("unknown candidate `{}`", toks[1])))?;
                let v = toks[2]
                    .parse::<i64>()
                    .map_err(|_| err_at(ln, 1, format!("bad margin `{}`", toks[2])))?;
                entries.push((a, b, v));
            }
            other => return Err(err_at(ln, 1, format!("unknown key `{other}`"))),
        }
    }
    let cands = candidates.ok_or_else(|| err_at(1, 1, "missing `candidates:` line"))?;
    let target = manip_core::gadgets::MarginTarget::from_entries(cands.m(), &entries)
        .map_err(|e| err_at(1, 1, e.to_string()))?;
    Ok((cands, target))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessRecord {
    pub manipulator_votes: Vec<Vec<String>>,
    pub extension: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct StatsRecord {
    pub elapsed_ms: u64,
    pub nodes: u64,
}

/// The stable result schema: all five keys are always present; `witness` is
/// null exactly when the answer is "no" or the problem is a necessary-winner
/// yes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ResultRecord {
    pub problem: String,
    pub rule: String,
    pub answer: String,
    pub witness: Option<WitnessRecord>,
    pub stats: StatsRecord,
}

fn vote_labels(v: &LinearVote, cands: &CandidateSet) -> Vec<String> {
    v.ranking()
        .iter()
        .map(|&c| cands.label(c).to_string())
        .collect()
}

pub fn result_to_record(
    problem: ProblemKind,
    rule: &Rule,
    cands: &CandidateSet,
    result: &SolveResult,
    elapsed_ms: u64,
) -> ResultRecord {
    let witness = result.witness.as_ref().map(|w| WitnessRecord {
        manipulator_votes: w
            .manipulator_votes
            .iter()
            .map(|v| vote_labels(v, cands))
            .collect(),
        extension: w
            .extension
            .as_ref()
            .map(|ext| ext.iter().map(|v| vote_labels(v, cands)).collect()),
    });
    ResultRecord {
        problem: problem.name().to_string(),
        rule: format_rule(rule),
        answer: if result.answer { "yes" } else { "no" }.to_string(),
        witness,
        stats: StatsRecord {
            elapsed_ms,
            nodes: result.stats.nodes,
        },
    }
}

/// Rebuilds a SolveResult from a record, resolving labels back to indices.
pub fn record_to_result(
    record: &ResultRecord,
    cands: &CandidateSet,
) -> Result<SolveResult, String> {
    let answer = match record.answer.as_str() {
        "yes" => true,
        "no" => false,
        other => return Err(format!("bad answer `{other}`")),
    };
    let m = cands.m();
    let to_vote = |labels: &Vec<String>| -> Result<LinearVote, String> {
        let mut ranking = Vec::with_capacity(labels.len());
        for l in labels {
            ranking.push(
                cands
                    .index_of(l)
                    .ok_or(format!("unknown candidate `{l}`"))?,
            );
        }
        LinearVote::new(ranking, m).map_err(|e| e.to_string())
    };
    let witness = match &record.witness {
        None => None,
        Some(w) => {
            let manipulator_votes = w
                .manipulator_votes
                .iter()
                .map(to_vote)
                .collect::<Result<Vec<_>, _>>()?;
            let extension = match &w.extension {
                None => None,
                Some(ext) => Some(ext.iter().map(to_vote).collect::<Result<Vec<_>, _>>()?),
            };
            Some(Witness {
                manipulator_votes,
                extension,
            })
        }
    };
    Ok(SolveResult {
        answer,
        witness,
        stats: SolveStats::default(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Auto,
    Poly,
    Oracle,
}

/// Why a poly-only request cannot be served, citing the known complexity
/// status of the combination.
pub fn hardness_note(problem: ProblemKind, rule: &Rule, manipulators: usize) -> String {
    let status: &str = match (problem, rule) {
        (ProblemKind::Wm, Rule::KApproval(_)) => {
            "weak manipulation is NP-complete for k-approval with any constant k > 1, \
             even with a single manipulator"
        }
        (ProblemKind::Wm, Rule::KVeto(_)) => {
            "weak manipulation is NP-complete for k-veto with any constant k > 1"
        }
        (ProblemKind::Wm, Rule::Maximin) => {
            "weak manipulation is NP-complete for maximin with a single manipulator"
        }
        (ProblemKind::Wm, Rule::Copeland) => {
            "weak manipulation is NP-complete for Copeland with a single manipulator"
        }
        (ProblemKind::Wm, Rule::Bucklin) => {
            "weak manipulation is NP-complete for Bucklin with a single manipulator"
        }
        (ProblemKind::Wm, Rule::Borda | Rule::Scoring(_)) => {
            "weak manipulation for Borda is NP-complete with two or more manipulators \
             and open with one; no polynomial algorithm implemented"
        }
        (ProblemKind::Sm, Rule::Copeland) => {
            "strong manipulation is NP-hard for Copeland with a single manipulator"
        }
        (ProblemKind::Sm, Rule::Maximin) if manipulators >= 2 => {
            "strong manipulation is NP-hard for maximin with two or more manipulators"
        }
        (ProblemKind::Sm, Rule::Borda | Rule::Scoring(_)) if manipulators >= 2 => {
            "strong manipulation is NP-hard for Borda with two or more manipulators; \
             general scoring rules have no polynomial algorithm implemented here"
        }
        (ProblemKind::Pw, _) => {
            "the possible-winner problem is polynomial only for plurality and veto here; \
             it is NP-complete for k-approval and most other rules"
        }
        (ProblemKind::Nw, _) => "no polynomial necessary-winner algorithm is implemented",
        (ProblemKind::Cm, Rule::Borda) if manipulators >= 2 => {
            "coalitional manipulation is NP-complete for Borda with two or more manipulators"
        }
        _ => "no polynomial algorithm implemented for this combination",
    };
    status.to_string()
}

/// Dispatch failure modes mapped to exit codes by the binary.
#[derive(Debug)]
pub enum DispatchError {
    Input(String),
    Budget(u64),
    NoPolyAlgorithm(String),
}

impl From<CoreError> for DispatchError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { budget } => DispatchError::Budget(budget),
            other => DispatchError::Input(other.to_string()),
        }
    }
}

fn complete_profile_of(p: &PartialProfile) -> Result<Profile, DispatchError> {
    let votes: Vec<LinearVote> = p
        .votes
        .iter()
        .map(|v| {
            if !v.is_complete() {
                return Err(DispatchError::Input(
                    "coalitional manipulation needs complete non-manipulator votes".into(),
                ));
            }
            let mut exts = v
                .extensions_budgeted(2)
                .map_err(|e| DispatchError::Input(e.to_string()))?;
            Ok(exts.swap_remove(0))
        })
        .collect::<Result<_, _>>()?;
    Profile::new(p.candidates.clone(), votes).map_err(|e| DispatchError::Input(e.to_string()))
}

/// Routes a problem to a polynomial solver when one exists.
fn poly_route(
    problem: ProblemKind,
    inst: &ManipulationInstance,
) -> Result<Option<SolveResult>, DispatchError> {
    let solved = match problem {
        ProblemKind::Pw => match inst.rule {
            Rule::Plurality => Some(poly::pw_plurality(&inst.partial, inst.preferred)?),
            Rule::Veto => Some(poly::pw_veto(&inst.partial, inst.preferred)?),
            _ => None,
        },
        ProblemKind::Nw => None,
        ProblemKind::Wm => match inst.rule {
            Rule::Plurality | Rule::Veto => Some(poly::wm_plurality_veto(inst)?),
            _ => None,
        },
        // Complete votes make SM, WM and CM coincide, so CM rides the SM and
        // WM solvers.
        ProblemKind::Sm | ProblemKind::Cm => match &inst.rule {
            Rule::KApproval(k) => Some(poly::sm_kapproval(inst, *k)?),
            Rule::KVeto(k) => Some(poly::sm_kveto(inst, *k)?),
            Rule::Plurality if problem == ProblemKind::Cm => Some(poly::wm_plurality_veto(inst)?),
            Rule::Veto if problem == ProblemKind::Cm => Some(poly::wm_plurality_veto(inst)?),
            Rule::Plurality => Some(poly::sm_kapproval(inst, 1)?),
            Rule::Veto => Some(poly::sm_kveto(inst, 1)?),
            Rule::Bucklin => Some(poly::sm_bucklin(inst)?),
            Rule::Borda | Rule::Scoring(_) if inst.manipulators == 1 => {
                let sv = inst
                    .rule
                    .score_vector(inst.partial.m())?
                    .expect("positional rule");
                Some(poly::sm_scoring_single(inst, &sv)?)
            }
            Rule::Maximin if inst.manipulators == 1 => Some(poly::sm_maximin_single(inst)?),
            _ => None,
        },
    };
    Ok(solved)
}

/// Solves `problem` on `inst` with the requested algorithm choice. `auto`
/// takes the polynomial route whenever the problem/rule/coalition combination
/// has one and falls back to the oracle otherwise.
pub fn dispatch(
    problem: ProblemKind,
    inst: &ManipulationInstance,
    algo: Algo,
    budget: u64,
) -> Result<SolveResult, DispatchError> {
    // Surface unusable rule parameters as input errors up front.
    inst.rule.score_vector(inst.partial.m())?;
    if matches!(algo, Algo::Auto | Algo::Poly) {
        // CM instances must be complete before a poly route may stand in.
        let embeddable =
            problem != ProblemKind::Cm || inst.partial.votes.iter().all(PartialVote::is_complete);
        if embeddable {
            if let Some(result) = poly_route(problem, inst)? {
                return Ok(result);
            }
        }
        if algo == Algo::Poly {
            return Err(DispatchError::NoPolyAlgorithm(hardness_note(
                problem,
                &inst.rule,
                inst.manipulators,
            )));
        }
    }
    let opts = OracleOptions {
        budget,
        ..Default::default()
    };
    let result = match problem {
        ProblemKind::Pw => oracle::solve_pw_opts(&inst.rule, &inst.partial, inst.preferred, &opts)?,
        ProblemKind::Nw => oracle::solve_nw_opts(&inst.rule, &inst.partial, inst.preferred, &opts)?,
        ProblemKind::Cm => {
            let profile = complete_profile_of(&inst.partial)?;
            oracle::solve_cm_opts(
                &inst.rule,
                &profile,
                inst.manipulators,
                inst.preferred,
                &opts,
            )?
        }
        ProblemKind::Wm => oracle::solve_wm_opts(inst, &opts)?,
        ProblemKind::Sm => oracle::solve_sm_opts(inst, &opts)?,
    };
    Ok(result)
}

/// Re-checks a claimed result against its witness; `Ok(true)` means the
/// record is substantiated.
pub fn verify_record(
    inst: &ManipulationInstance,
    record: &ResultRecord,
    budget: u64,
) -> Result<bool, DispatchError> {
    let problem = match record.problem.as_str() {
        "pw" => ProblemKind::Pw,
        "nw" => ProblemKind::Nw,
        "cm" => ProblemKind::Cm,
        "wm" => ProblemKind::Wm,
        "sm" => ProblemKind::Sm,
        other => return Err(DispatchError::Input(format!("bad problem `{other}`"))),
    };
    let result =
        record_to_result(record, &inst.partial.candidates).map_err(DispatchError::Input)?;
    let opts = OracleOptions {
        budget,
        ..Default::default()
    };
    Ok(oracle::verify_result(problem, inst, &result, &opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# toy instance\ncandidates: a b c\nvote: a > b > c\npvote: a > b ; b > c\npvote:\nmanipulators: 1\npreferred: c\nrule: bucklin\n";

    #[test]
    fn parse_and_round_trip() {
        let parsed = parse_election(SAMPLE).unwrap();
        assert_eq!(parsed.profile.n(), 3);
        assert_eq!(parsed.manipulators, Some(1));
        assert_eq!(parsed.preferred, Some(2));
        assert_eq!(parsed.rule, Some(Rule::Bucklin));
        assert!(parsed.profile.votes[0].is_complete());
        // Chains a > b ; b > c close to the full order.
        assert!(parsed.profile.votes[1].is_complete());
        assert_eq!(parsed.profile.votes[2].pair_count(), 0);

        let text = format_election(&parsed);
        let reparsed = parse_election(&text).unwrap();
        assert_eq!(reparsed.profile, parsed.profile);
        assert_eq!(reparsed.manipulators, parsed.manipulators);
        assert_eq!(reparsed.preferred, parsed.preferred);
        assert_eq!(reparsed.rule, parsed.rule);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_election("candidates: a b\nvote: a > z\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.column > 1);
        assert!(err.message.contains("unknown candidate"));

        let err = parse_election("candidates: a b\npvote: a > b ; b > a\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("cycle"));
    }

    #[test]
    fn rule_strings_round_trip() {
        for rule in [
            Rule::Plurality,
            Rule::Veto,
            Rule::Borda,
            Rule::Bucklin,
            Rule::Maximin,
            Rule::Copeland,
            Rule::KApproval(2),
            Rule::KVeto(3),
            Rule::Scoring(ScoreVector::new(vec![2, 1, 1, 0]).unwrap()),
        ] {
            assert_eq!(parse_rule(&format_rule(&rule)).unwrap(), rule);
        }
        assert!(parse_rule("k-approval").is_err());
        assert!(parse_rule("ranked-pairs").is_err());
    }

    #[test]
    fn dispatch_auto_matches_oracle_on_toy() {
        let parsed = parse_election(SAMPLE).unwrap();
        let inst = ManipulationInstance::new(
            Rule::Bucklin,
            parsed.profile.clone(),
            1,
            parsed.preferred.unwrap(),
        )
        .unwrap();
        let auto = dispatch(ProblemKind::Sm, &inst, Algo::Auto, 1_000_000).unwrap();
        let oracle = dispatch(ProblemKind::Sm, &inst, Algo::Oracle, 1_000_000).unwrap();
        assert_eq!(auto.answer, oracle.answer);
    }

    #[test]
    fn dispatch_poly_refuses_hard_combinations() {
        let parsed = parse_election(SAMPLE).unwrap();
        let inst = ManipulationInstance::new(Rule::Copeland, parsed.profile, 1, 2).unwrap();
        match dispatch(ProblemKind::Wm, &inst, Algo::Poly, 1_000) {
            Err(DispatchError::NoPolyAlgorithm(msg)) => {
                assert!(msg.contains("NP-complete"));
                assert!(msg.contains("Copeland"));
            }
            other => panic!("expected hardness refusal, got {other:?}"),
        }
    }

    #[test]
    fn record_schema_is_stable() {
        let parsed = parse_election(SAMPLE).unwrap();
        let inst = ManipulationInstance::new(Rule::Plurality, parsed.profile, 1, 0).unwrap();
        let result = dispatch(ProblemKind::Wm, &inst, Algo::Auto, 100_000).unwrap();
        let record = result_to_record(
            ProblemKind::Wm,
            &Rule::Plurality,
            &inst.partial.candidates,
            &result,
            3,
        );
        let json = serde_json::to_string(&record).unwrap();
        for key in ["problem", "rule", "answer", "witness", "stats"] {
            assert!(json.contains(&format!("\"{key}\"")), "missing {key}");
        }
        let back: ResultRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn verify_rejects_tampered_witness() {
        let parsed = parse_election(SAMPLE).unwrap();
        let inst =
            ManipulationInstance::new(Rule::Plurality, parsed.profile.clone(), 1, 0).unwrap();
        let result = dispatch(ProblemKind::Wm, &inst, Algo::Auto, 100_000).unwrap();
        assert!(result.answer);
        let mut record = result_to_record(
            ProblemKind::Wm,
            &Rule::Plurality,
            &inst.partial.candidates,
            &result,
            0,
        );
        assert!(verify_record(&inst, &record, 100_000).unwrap());
        // An extension that contradicts the fixed votes must be rejected.
        let w = record.witness.as_mut().unwrap();
        for vote in w.extension.as_mut().unwrap().iter_mut() {
            vote.reverse();
        }
        assert!(!verify_record(&inst, &record, 100_000).unwrap());
    }
}
