//! `manip` — solve, generate, verify and cross-check election-manipulation
//! instances with incomplete votes.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use manip_cli::{
    dispatch, exit_codes, format_election, parse_election, parse_margin_file, parse_rule,
    result_to_record, verify_record, Algo, DispatchError, ElectionFile, ResultRecord,
};
use manip_core::gadgets::{
    self, reduce_pw_to_wm_kapproval, reduce_pw_to_wm_kveto, reduce_x3c_to_sm_copeland,
    reduce_x3c_to_wm_bucklin, reduce_x3c_to_wm_copeland, reduce_x3c_to_wm_maximin,
};
use manip_core::harness::{run_crosscheck, HarnessConfig, Suite};
use manip_core::oracle::{ManipulationInstance, ProblemKind, DEFAULT_ORACLE_BUDGET};
use manip_core::rules::Rule;

#[derive(Parser)]
#[command(
    name = "manip",
    about = "Election manipulation under incomplete votes: solvers, gadget \
             generators, witness verification, and oracle cross-checks",
    after_help = "Exit codes: 0 success/agreement, 1 input error, 2 budget \
                  exhausted, 3 no polynomial algorithm for a hard combination, \
                  4 witness rejected, 5 cross-check mismatch."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem on an election file and print a result record.
    Solve(SolveArgs),
    /// Generate a gadget instance file on standard output.
    Gen(GenArgs),
    /// Check a result record against its instance.
    Verify(VerifyArgs),
    /// Run randomized poly-vs-oracle cross-checks.
    Crosscheck(CrosscheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Pw,
    Nw,
    Cm,
    Wm,
    Sm,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> ProblemKind {
        match p {
            ProblemArg::Pw => ProblemKind::Pw,
            ProblemArg::Nw => ProblemKind::Nw,
            ProblemArg::Cm => ProblemKind::Cm,
            ProblemArg::Wm => ProblemKind::Wm,
            ProblemArg::Sm => ProblemKind::Sm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Auto,
    Poly,
    Oracle,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: ProblemArg,
    /// Rule name; overrides the file's rule line. One of plurality, veto,
    /// k-approval, k-veto, borda, scoring, bucklin, maximin, copeland.
    #[arg(long)]
    rule: Option<String>,
    /// k for k-approval / k-veto when --rule gives no parameter.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated score vector for --rule scoring.
    #[arg(long)]
    scores: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    algo: AlgoArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct GenArgs {
    /// One of: mcgarvey, scoregen, pw2wm-kapproval, pw2wm-kveto,
    /// x3c2wm-maximin, x3c2wm-copeland, x3c2sm-copeland, x3c2wm-bucklin.
    #[arg(long)]
    gadget: String,
    /// X3C instance file (x3c2* gadgets).
    #[arg(long)]
    x3c: Option<PathBuf>,
    /// Margin target file (mcgarvey).
    #[arg(long)]
    target: Option<PathBuf>,
    /// Election file holding the possible-winner instance (pw2wm-* gadgets).
    #[arg(long)]
    input: Option<PathBuf>,
    /// k parameter (scoregen, pw2wm-*).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated X vector (scoregen).
    #[arg(long)]
    x: Option<String>,
    /// Also emit the generator's audit record on standard error.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Result record JSON produced by `manip solve`.
    #[arg(long)]
    witness: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_candidates: usize,
    #[arg(long, default_value_t = 3)]
    max_votes: usize,
    #[arg(long, default_value_t = 2)]
    max_manipulators: usize,
    #[arg(long)]
    suite: String,
    /// Where mismatching instances are dumped as election files.
    #[arg(long, default_value = "crosscheck-failures")]
    dump_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u64,
    /// Flip every polynomial answer (harness self-test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(exit_codes::INPUT as u8)
}

fn read_file(path: &PathBuf) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn effective_rule(args: &SolveArgs, file: &ElectionFile) -> Result<Rule, ExitCode> {
    let base = match &args.rule {
        Some(name) => {
            let rule_text = match (&args.k, &args.scores) {
                (Some(k), _) if matches!(name.as_str(), "k-approval" | "k-veto") => {
                    format!("{name} {k}")
                }
                (_, Some(scores)) if name == "scoring" => format!("{name} {scores}"),
                _ => name.clone(),
            };
            Some(parse_rule(&rule_text).map_err(input_error)?)
        }
        None => file.rule.clone(),
    };
    base.ok_or_else(|| input_error("no rule given (use --rule or a rule line in the file)"))
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let text = match read_file(&args.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let file = match parse_election(&text) {
        Ok(f) => f,
        Err(e) => return input_error(e),
    };
    let rule = match effective_rule(&args, &file) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let problem: ProblemKind = args.problem.into();
    let preferred = match file.preferred {
        Some(c) => c,
        None => return input_error("the instance needs a `preferred:` line"),
    };
    let manipulators = match problem {
        ProblemKind::Pw | ProblemKind::Nw => file.manipulators.unwrap_or(1),
        _ => match file.manipulators {
            Some(n) => n,
            None => return input_error("the instance needs a `manipulators:` line"),
        },
    };
    let inst = match ManipulationInstance::new(
        rule.clone(),
        file.profile.clone(),
        manipulators,
        preferred,
    ) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    let algo = match args.algo {
        AlgoArg::Auto => Algo::Auto,
        AlgoArg::Poly => Algo::Poly,
        AlgoArg::Oracle => Algo::Oracle,
    };
    let started = Instant::now();
    match dispatch(problem, &inst, algo, args.budget) {
        Ok(result) => {
            let elapsed = started.elapsed().as_millis() as u64;
            let record =
                result_to_record(problem, &rule, &inst.partial.candidates, &result, elapsed);
            println!(
                "{}",
                serde_json::to_string(&record).expect("serializable record")
            );
            ExitCode::from(exit_codes::OK as u8)
        }
        Err(DispatchError::Budget(b)) => {
            eprintln!("error: enumeration budget of {b} nodes exceeded");
            ExitCode::from(exit_codes::BUDGET as u8)
        }
        Err(DispatchError::NoPolyAlgorithm(msg)) => {
            eprintln!("no polynomial algorithm: {msg}");
            ExitCode::from(exit_codes::HARDNESS as u8)
        }
        Err(DispatchError::Input(msg)) => input_error(msg),
    }
}

fn emit_instance(
    instance: &ManipulationInstance,
    kind: ProblemKind,
    audit_json: Option<String>,
    audit_flag: bool,
) -> ExitCode {
    let file = ElectionFile {
        profile: instance.partial.clone(),
        manipulators: Some(instance.manipulators),
        preferred: Some(instance.preferred),
        rule: Some(instance.rule.clone()),
    };
    print!("{}", format_election(&file));
    if audit_flag {
        if let Some(json) = audit_json {
            eprintln!("{json}");
        }
        eprintln!("# solve with: --problem {}", kind.name());
    }
    ExitCode::from(exit_codes::OK as u8)
}

fn margin_audit_json(audit: &manip_core::gadgets::MarginAudit) -> String {
    let entries: Vec<serde_json::Value> = audit
        .entries
        .iter()
        .map(|e| {
            serde_json::json!({
                "a": e.a,
                "b": e.b,
                "intended": e.intended,
                "achieved": e.achieved,
                "scope": match e.scope {
                    gadgets::AuditScope::GeneratedVotes => "generated-votes",
                    gadgets::AuditScope::WithForcedPairs => "with-forced-pairs",
                },
            })
        })
        .collect();
    serde_json::json!({ "audit": "margins", "passed": audit.passed, "entries": entries })
        .to_string()
}

fn run_gen(args: GenArgs) -> ExitCode {
    let need = |opt: &Option<PathBuf>, what: &str| -> Result<String, ExitCode> {
        match opt {
            Some(p) => read_file(p),
            None => Err(input_error(format!(
                "gadget `{}` needs {what}",
                args.gadget
            ))),
        }
    };
    match args.gadget.as_str() {
        "mcgarvey" => {
            let text = match need(&args.target, "--target FILE") {
                Ok(t) => t,
                Err(code) => return code,
            };
            let (cands, target) = match parse_margin_file(&text) {
                Ok(v) => v,
                Err(e) => return input_error(e),
            };
            let profile = match gadgets::mcgarvey(&target, &cands) {
                Ok(p) => p,
                Err(e) => return input_error(e),
            };
            let file = ElectionFile {
                profile: profile.to_partial(),
                manipulators: None,
                preferred: None,
                rule: None,
            };
            print!("{}", format_election(&file));
            if args.audit {
                let achieved = manip_core::rules::margins(&profile);
                let ok = (0..cands.m())
                    .all(|a| (0..cands.m()).all(|b| achieved.get(a, b) == target.get(a, b)));
                eprintln!(
                    "{}",
                    serde_json::json!({ "audit": "mcgarvey", "passed": ok, "votes": profile.n() })
                );
            }
            ExitCode::from(exit_codes::OK as u8)
        }
        "scoregen" => {
            let raw = match &args.x {
                Some(x) => x,
                None => return input_error("gadget `scoregen` needs --x CSV"),
            };
            let x: Vec<i64> = match raw.split(',').map(|t| t.trim().parse::<i64>()).collect() {
                Ok(v) => v,
                Err(_) => return input_error(format!("bad X vector `{raw}`")),
            };
            let k = match args.k {
                Some(k) => k,
                None => return input_error("gadget `scoregen` needs --k"),
            };
            let (profile, lambda, audit) = match gadgets::score_gen(&x, k) {
                Ok(v) => v,
                Err(e) => return input_error(e),
            };
            let file = ElectionFile {
                profile: profile.to_partial(),
                manipulators: None,
                preferred: None,
                rule: Some(Rule::KApproval(k)),
            };
            print!("{}", format_election(&file));
            if args.audit {
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "audit": "scoregen",
                        "passed": audit.passed,
                        "lambda": lambda,
                        "targets": audit.targets,
                        "achieved": audit.achieved,
                        "slack_score": audit.slack_score,
                    })
                );
            }
            ExitCode::from(exit_codes::OK as u8)
        }
        "pw2wm-kapproval" | "pw2wm-kveto" => {
            let text = match need(&args.input, "--input FILE (the PW instance)") {
                Ok(t) => t,
                Err(code) => return code,
            };
            let file = match parse_election(&text) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            let preferred = match file.preferred {
                Some(c) => c,
                None => return input_error("the PW instance needs a `preferred:` line"),
            };
            let k = match args.k {
                Some(k) => k,
                None => return input_error("this gadget needs --k"),
            };
            let built = if args.gadget == "pw2wm-kapproval" {
                reduce_pw_to_wm_kapproval(&file.profile, preferred, k)
            } else {
                reduce_pw_to_wm_kveto(&file.profile, preferred, k)
            };
            let g = match built {
                Ok(g) => g,
                Err(e) => return input_error(e),
            };
            let audit = serde_json::json!({
                "audit": args.gadget,
                "passed": g.audit.passed,
                "max_dummy_partial_score": g.audit.max_dummy_partial_score,
                "pinned_scores": g.audit.pinned_scores,
            })
            .to_string();
            emit_instance(&g.instance, ProblemKind::Wm, Some(audit), args.audit)
        }
        "x3c2wm-maximin" | "x3c2wm-copeland" | "x3c2sm-copeland" | "x3c2wm-bucklin" => {
            let text = match need(&args.x3c, "--x3c FILE") {
                Ok(t) => t,
                Err(code) => return code,
            };
            let x = match gadgets::parse_x3c(&text) {
                Ok(x) => x,
                Err(e) => return input_error(e),
            };
            let built = match args.gadget.as_str() {
                "x3c2wm-maximin" => reduce_x3c_to_wm_maximin(&x),
                "x3c2wm-copeland" => reduce_x3c_to_wm_copeland(&x),
                "x3c2sm-copeland" => reduce_x3c_to_sm_copeland(&x),
                _ => reduce_x3c_to_wm_bucklin(&x),
            };
            let g = match built {
                Ok(g) => g,
                Err(e) => return input_error(e),
            };
            emit_instance(
                &g.instance,
                g.kind,
                Some(margin_audit_json(&g.audit)),
                args.audit,
            )
        }
        other => input_error(format!("unknown gadget `{other}`")),
    }
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let instance_text = match read_file(&args.input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let record_text = match read_file(&args.witness) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let file = match parse_election(&instance_text) {
        Ok(f) => f,
        Err(e) => return input_error(e),
    };
    let record: ResultRecord = match serde_json::from_str(&record_text) {
        Ok(r) => r,
        Err(e) => return input_error(format!("bad result record: {e}")),
    };
    let rule = match parse_rule(&record.rule) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    let preferred = match file.preferred {
        Some(c) => c,
        None => return input_error("the instance needs a `preferred:` line"),
    };
    let inst = match ManipulationInstance::new(
        rule,
        file.profile,
        file.manipulators.unwrap_or(1),
        preferred,
    ) {
        Ok(i) => i,
        Err(e) => return input_error(e),
    };
    match verify_record(&inst, &record, args.budget) {
        Ok(true) => {
            println!("witness ok");
            ExitCode::from(exit_codes::OK as u8)
        }
        Ok(false) => {
            eprintln!("witness rejected: the record's answer is not substantiated");
            ExitCode::from(exit_codes::WITNESS_REJECTED as u8)
        }
        Err(DispatchError::Budget(b)) => {
            eprintln!("error: enumeration budget of {b} nodes exceeded");
            ExitCode::from(exit_codes::BUDGET as u8)
        }
        Err(DispatchError::Input(msg)) | Err(DispatchError::NoPolyAlgorithm(msg)) => {
            input_error(msg)
        }
    }
}

fn run_crosscheck_cmd(args: CrosscheckArgs) -> ExitCode {
    let suite = match args.suite.as_str() {
        "sm" => Suite::Sm,
        "wm" => Suite::Wm,
        "pw" => Suite::Pw,
        other => return input_error(format!("unknown suite `{other}`")),
    };
    let mut cfg = HarnessConfig::new(suite, args.trials, args.seed);
    cfg.max_candidates = args.max_candidates;
    cfg.max_votes = args.max_votes;
    cfg.max_manipulators = args.max_manipulators;
    cfg.budget = args.budget;
    cfg.inject_fault = args.inject_fault;
    if let Err(e) = cfg.validate() {
        return input_error(e);
    }
    let report = match run_crosscheck(&cfg) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    print!("{}", report.summary());
    if report.mismatches.is_empty() {
        return ExitCode::from(exit_codes::OK as u8);
    }
    if let Err(e) = fs::create_dir_all(&args.dump_dir) {
        eprintln!("error: cannot create {}: {e}", args.dump_dir.display());
        return ExitCode::from(exit_codes::INPUT as u8);
    }
    for m in &report.mismatches {
        let solver = m.solver.replace(['(', ')', '='], "-");
        let path = args.dump_dir.join(format!(
            "mismatch-{}-{}-{}.election",
            suite.name(),
            m.trial,
            solver
        ));
        let file = ElectionFile {
            profile: m.instance.partial.clone(),
            manipulators: Some(m.instance.manipulators),
            preferred: Some(m.instance.preferred),
            rule: Some(m.instance.rule.clone()),
        };
        let mut body = format!(
            "# mismatch: solver {} said {}, oracle said {} (trial {})\n",
            m.solver, m.poly_answer, m.oracle_answer, m.trial
        );
        body.push_str(&format_election(&file));
        if let Err(e) = fs::write(&path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(exit_codes::INPUT as u8);
        }
        eprintln!("dumped {}", path.display());
    }
    ExitCode::from(exit_codes::MISMATCH as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Gen(args) => run_gen(args),
        Command::Verify(args) => run_verify(args),
        Command::Crosscheck(args) => run_crosscheck_cmd(args),
    }
}
