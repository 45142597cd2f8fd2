//! Randomized oracle-vs-polynomial cross-checking. The instance generator
//! draws a random linear order per vote and then, with probability one half,
//! forgets one uniformly chosen candidate entirely, which keeps per-vote
//! extension counts at most m. All randomness flows from a 64-bit seed
//! through a fixed-stream generator, so reports are reproducible bytes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gadgets;
use crate::oracle::{self, ManipulationInstance, OracleOptions, ProblemKind, SolveResult};
use crate::poly;
use crate::prefs::{CandidateSet, LinearVote, PartialProfile, PartialVote};
use crate::rules::{Rule, ScoreVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Sm,
    Wm,
    Pw,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sm => "sm",
            Suite::Wm => "wm",
            Suite::Pw => "pw",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_candidates: usize,
    pub max_votes: usize,
    pub max_manipulators: usize,
    pub suite: Suite,
    pub budget: u64,
    /// Test-only hook: negate every polynomial answer so the harness's own
    /// mismatch reporting can be exercised.
    pub inject_fault: bool,
}

impl HarnessConfig {
    pub fn new(suite: Suite, trials: u64, seed: u64) -> Self {
        HarnessConfig {
            trials,
            seed,
            max_candidates: 5,
            max_votes: 3,
            max_manipulators: 2,
            suite,
            budget: oracle::DEFAULT_ORACLE_BUDGET,
            inject_fault: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_candidates < 2 || self.max_candidates > 5 {
            return Err(Error::Parameter("max candidates must be in 2..=5".into()));
        }
        if self.max_votes > 3 {
            return Err(Error::Parameter("max votes must be at most 3".into()));
        }
        if self.max_manipulators < 1 || self.max_manipulators > 2 {
            return Err(Error::Parameter("max manipulators must be 1 or 2".into()));
        }
        Ok(())
    }
}

/// One disagreement between a polynomial solver and the oracle.
#[derive(Debug, Clone)]
pub struct Mismatch {
    pub trial: u64,
    pub solver: String,
    pub instance: ManipulationInstance,
    pub kind: ProblemKind,
    pub poly_answer: bool,
    pub oracle_answer: bool,
}

/// A yes answer kept for downstream witness verification.
#[derive(Debug, Clone)]
pub struct YesRecord {
    pub trial: u64,
    pub solver: String,
    pub kind: ProblemKind,
    pub instance: ManipulationInstance,
    pub result: SolveResult,
}

#[derive(Debug, Clone, Default)]
pub struct SolverTally {
    pub runs: u64,
    pub agreements: u64,
}

#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub per_solver: Vec<(String, SolverTally)>,
    pub mismatches: Vec<Mismatch>,
    pub yes_records: Vec<YesRecord>,
}

impl CrosscheckReport {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite={} trials={} seed={}",
            self.suite.name(),
            self.trials,
            self.seed
        );
        for (name, tally) in &self.per_solver {
            let _ = writeln!(out, "{name}: agree {}/{}", tally.agreements, tally.runs);
        }
        let _ = writeln!(out, "mismatches={}", self.mismatches.len());
        out
    }
}

/// Draws a partial vote: a uniform linear order, then with probability 1/2
/// one uniformly chosen candidate forgotten (all its relations removed).
pub fn random_partial_vote<R: Rng>(rng: &mut R, m: usize) -> PartialVote {
    let mut ranking: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        ranking.swap(i, j);
    }
    let complete = PartialVote::from_linear(&LinearVote::new(ranking, m).expect("permutation"));
    if rng.gen_bool(0.5) {
        let forget = rng.gen_range(0..m);
        let pairs: Vec<(usize, usize)> = complete
            .pairs()
            .into_iter()
            .filter(|&(a, b)| a != forget && b != forget)
            .collect();
        PartialVote::transitive_close(&pairs, m).expect("subset of a closed order")
    } else {
        complete
    }
}

/// Draws (profile, preferred candidate, manipulator count).
pub fn random_instance<R: Rng>(rng: &mut R, cfg: &HarnessConfig) -> (PartialProfile, usize, usize) {
    let m = rng.gen_range(2..=cfg.max_candidates);
    let n = rng.gen_range(0..=cfg.max_votes);
    let votes: Vec<PartialVote> = (0..n).map(|_| random_partial_vote(rng, m)).collect();
    let labels: Vec<String> = (0..m).map(|i| format!("c{}", i + 1)).collect();
    let candidates = CandidateSet::new(labels).expect("fresh labels");
    let profile = PartialProfile::new(candidates, votes).expect("consistent m");
    let preferred = rng.gen_range(0..m);
    let manipulators = rng.gen_range(1..=cfg.max_manipulators);
    (profile, preferred, manipulators)
}

struct Check {
    name: String,
    kind: ProblemKind,
    rule: Rule,
    manipulators: usize,
    poly: SolveResult,
}

fn applicable_checks(
    suite: Suite,
    profile: &PartialProfile,
    preferred: usize,
    manipulators: usize,
) -> Result<Vec<Check>> {
    let m = profile.m();
    let mut out = Vec::new();
    match suite {
        Suite::Sm => {
            for k in 1..=3usize.min(m - 1) {
                let inst = ManipulationInstance::new(
                    Rule::KApproval(k),
                    profile.clone(),
                    manipulators,
                    preferred,
                )?;
                out.push(Check {
                    name: format!("sm_kapproval(k={k})"),
                    kind: ProblemKind::Sm,
                    rule: inst.rule.clone(),
                    manipulators,
                    poly: poly::sm_kapproval(&inst, k)?,
                });
            }
            for k in 1..=2usize.min(m - 1) {
                let inst = ManipulationInstance::new(
                    Rule::KVeto(k),
                    profile.clone(),
                    manipulators,
                    preferred,
                )?;
                out.push(Check {
                    name: format!("sm_kveto(k={k})"),
                    kind: ProblemKind::Sm,
                    rule: inst.rule.clone(),
                    manipulators,
                    poly: poly::sm_kveto(&inst, k)?,
                });
            }
            {
                let inst = ManipulationInstance::new(
                    Rule::Bucklin,
                    profile.clone(),
                    manipulators,
                    preferred,
                )?;
                out.push(Check {
                    name: "sm_bucklin".into(),
                    kind: ProblemKind::Sm,
                    rule: Rule::Bucklin,
                    manipulators,
                    poly: poly::sm_bucklin(&inst)?,
                });
            }
            if manipulators == 1 {
                let mut vectors = vec![
                    ("plurality".to_string(), ScoreVector::plurality(m)),
                    ("veto".to_string(), ScoreVector::veto(m)),
                    ("borda".to_string(), ScoreVector::borda(m)),
                ];
                if m == 4 {
                    vectors.push(("2110".to_string(), ScoreVector::new(vec![2, 1, 1, 0])?));
                }
                for (label, sv) in vectors {
                    let inst = ManipulationInstance::new(
                        Rule::Scoring(sv.clone()),
                        profile.clone(),
                        1,
                        preferred,
                    )?;
                    out.push(Check {
                        name: format!("sm_scoring_single({label})"),
                        kind: ProblemKind::Sm,
                        rule: inst.rule.clone(),
                        manipulators: 1,
                        poly: poly::sm_scoring_single(&inst, &sv)?,
                    });
                }
                let inst = ManipulationInstance::new(Rule::Maximin, profile.clone(), 1, preferred)?;
                out.push(Check {
                    name: "sm_maximin_single".into(),
                    kind: ProblemKind::Sm,
                    rule: Rule::Maximin,
                    manipulators: 1,
                    poly: poly::sm_maximin_single(&inst)?,
                });
            }
        }
        Suite::Wm => {
            for rule in [Rule::Plurality, Rule::Veto] {
                let inst = ManipulationInstance::new(
                    rule.clone(),
                    profile.clone(),
                    manipulators,
                    preferred,
                )?;
                out.push(Check {
                    name: format!("wm_plurality_veto({})", rule.name()),
                    kind: ProblemKind::Wm,
                    rule,
                    manipulators,
                    poly: poly::wm_plurality_veto(&inst)?,
                });
            }
        }
        Suite::Pw => {
            out.push(Check {
                name: "pw_plurality".into(),
                kind: ProblemKind::Pw,
                rule: Rule::Plurality,
                manipulators: 1,
                poly: poly::pw_plurality(profile, preferred)?,
            });
            out.push(Check {
                name: "pw_veto".into(),
                kind: ProblemKind::Pw,
                rule: Rule::Veto,
                manipulators: 1,
                poly: poly::pw_veto(profile, preferred)?,
            });
        }
    }
    Ok(out)
}

/// Runs the configured suite: every applicable polynomial solver against the
/// corresponding oracle on each random instance.
pub fn run_crosscheck(cfg: &HarnessConfig) -> Result<CrosscheckReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = OracleOptions {
        budget: cfg.budget,
        ..Default::default()
    };
    let mut per_solver: Vec<(String, SolverTally)> = Vec::new();
    let mut mismatches = Vec::new();
    let mut yes_records = Vec::new();
    for trial in 0..cfg.trials {
        let (profile, preferred, manipulators) = random_instance(&mut rng, cfg);
        for check in applicable_checks(cfg.suite, &profile, preferred, manipulators)? {
            let inst = ManipulationInstance::new(
                check.rule.clone(),
                profile.clone(),
                check.manipulators,
                preferred,
            )?;
            let oracle_answer = match check.kind {
                ProblemKind::Sm => oracle::solve_sm_opts(&inst, &opts)?.answer,
                ProblemKind::Wm => oracle::solve_wm_opts(&inst, &opts)?.answer,
                ProblemKind::Pw => {
                    oracle::solve_pw_opts(&check.rule, &profile, preferred, &opts)?.answer
                }
                _ => unreachable!("suites cover sm/wm/pw"),
            };
            let poly_answer = check.poly.answer != cfg.inject_fault;
            let slot = match per_solver.iter_mut().find(|(n, _)| *n == check.name) {
                Some((_, tally)) => tally,
                None => {
                    per_solver.push((check.name.clone(), SolverTally::default()));
                    &mut per_solver.last_mut().expect("just pushed").1
                }
            };
            slot.runs += 1;
            if poly_answer == oracle_answer {
                slot.agreements += 1;
            } else {
                mismatches.push(Mismatch {
                    trial,
                    solver: check.name.clone(),
                    instance: inst.clone(),
                    kind: check.kind,
                    poly_answer,
                    oracle_answer,
                });
            }
            if check.poly.answer {
                yes_records.push(YesRecord {
                    trial,
                    solver: check.name,
                    kind: check.kind,
                    instance: inst,
                    result: check.poly,
                });
            }
        }
    }
    Ok(CrosscheckReport {
        suite: cfg.suite,
        trials: cfg.trials,
        seed: cfg.seed,
        per_solver,
        mismatches,
        yes_records,
    })
}

/// Counters for the definitional implications between the problems.
#[derive(Debug, Clone, Default)]
pub struct ImplicationReport {
    pub sm_implies_wm_checked: u64,
    pub nw_implies_pw_checked: u64,
    pub cm_embedding_checked: u64,
    pub wm_equals_pw_checked: u64,
    pub violations: u64,
}

impl ImplicationReport {
    pub fn summary(&self) -> String {
        format!(
            "sm=>wm {} | nw=>pw {} | cm-embedding {} | wm==pw {} | violations {}\n",
            self.sm_implies_wm_checked,
            self.nw_implies_pw_checked,
            self.cm_embedding_checked,
            self.wm_equals_pw_checked,
            self.violations
        )
    }
}

/// Replays the instance stream and checks, per instance: SM ⇒ WM, NW ⇒ PW,
/// the complete-votes embedding of CM agreeing with WM and SM, and (on
/// instances small enough to enumerate) WM agreeing with PW on the profile
/// with empty votes appended.
pub fn run_implication_checks(cfg: &HarnessConfig) -> Result<ImplicationReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = OracleOptions {
        budget: cfg.budget,
        ..Default::default()
    };
    let mut report = ImplicationReport::default();
    let rules = [
        Rule::Plurality,
        Rule::Veto,
        Rule::Bucklin,
        Rule::Maximin,
        Rule::Copeland,
    ];
    for _ in 0..cfg.trials {
        let (profile, preferred, manipulators) = random_instance(&mut rng, cfg);
        let m = profile.m();
        for rule in &rules {
            let inst =
                ManipulationInstance::new(rule.clone(), profile.clone(), manipulators, preferred)?;
            let sm = oracle::solve_sm_opts(&inst, &opts)?;
            if sm.answer {
                report.sm_implies_wm_checked += 1;
                if !oracle::solve_wm_opts(&inst, &opts)?.answer {
                    report.violations += 1;
                }
            }
            let nw = oracle::solve_nw_opts(rule, &profile, preferred, &opts)?;
            if nw.answer {
                report.nw_implies_pw_checked += 1;
                if !oracle::solve_pw_opts(rule, &profile, preferred, &opts)?.answer {
                    report.violations += 1;
                }
            }
            // Complete the profile along first extensions, then compare the
            // CM answer with its WM and SM embeddings.
            let completed: Vec<LinearVote> = profile
                .votes
                .iter()
                .map(|v| {
                    v.extensions_budgeted(cfg.budget)
                        .map(|mut e| e.swap_remove(0))
                })
                .collect::<Result<_>>()?;
            let complete_profile =
                crate::prefs::Profile::new(profile.candidates.clone(), completed)?;
            let cm =
                oracle::solve_cm_opts(rule, &complete_profile, manipulators, preferred, &opts)?;
            let (_, wm_inst) = gadgets::embed_cm_as(
                ProblemKind::Wm,
                rule.clone(),
                &complete_profile,
                manipulators,
                preferred,
            )?;
            report.cm_embedding_checked += 1;
            if oracle::solve_wm_opts(&wm_inst, &opts)?.answer != cm.answer
                || oracle::solve_sm_opts(&wm_inst, &opts)?.answer != cm.answer
            {
                report.violations += 1;
            }
            // WM equals PW with empty votes appended; enumeration over an
            // appended empty vote costs m!, so keep it to small instances.
            if m <= 4 && manipulators == 1 {
                let wm = oracle::solve_wm_opts(&inst, &opts)?;
                let (aug, c) = gadgets::wm_to_pw(&inst)?;
                report.wm_equals_pw_checked += 1;
                if oracle::solve_pw_opts(rule, &aug, c, &opts)?.answer != wm.answer {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}
