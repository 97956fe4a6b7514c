use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use promise_lab_core::circuit::{
    check_compiled, compile_sigma2, compile_uval2, eval_circuit, parse_circuit, valid_assignments,
    OracleCircuit,
};
use promise_lab_core::expr::{
    add_leading_variable, fix_first_block_prefix, format_bits, from_truth_table,
    negate_block_inputs, negate_output, parse_bits,
};
use promise_lab_core::harness::{
    full_campaign, mutation_sensitivity, rule_counterexample, tally,
    verify_hierarchy, verify_rule_exhaustive, vv_completeness, with_jobs, CampaignOptions,
    Counterexample, Verdict,
};
use promise_lab_core::oracle::{check_machine, machine, run_adversarial, Resolution, DEFAULT_PATH_CAP};
use promise_lab_core::reductions::{
    build_uval_intersection, build_val_intersection, check_pi1_to_uval, check_uval_intersection,
    check_val_intersection, pi1_to_uval, Catalog, Registry, PI1_TO_UVAL,
};
use promise_lab_core::semantics::Solver;
use promise_lab_core::vv::{default_trials, hash_from_seed, plan_from_seed, vv_run};
use promise_lab_core::{
    Assignment, Error, Family, Mutation, ProblemId, ProblemKind, Quantifier,
};

#[derive(Parser)]
#[command(name = "promise-lab", version, about = "Promise problems, reductions and their checks")]
struct Cli {
    /// Worker threads for campaigns (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Input {
    /// Input text.
    #[arg(long = "in", value_name = "TEXT", conflicts_with = "file")]
    text: Option<String>,
    /// Read the input from a file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct Report {
    /// Print `time=0` so that repeated runs are byte-identical.
    #[arg(long)]
    no_time: bool,
    /// Write the first counterexample here (a directory for `campaign`).
    #[arg(long, value_name = "PATH")]
    cex_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantArg {
    Exists,
    Forall,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntersectionArg {
    Val,
    Uval,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Sigma2,
    Uval2,
}

#[derive(Subcommand)]
enum Command {
    /// Print, transform or evaluate a family.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Build the family from a truth table instead (bits, entry 0 first).
        #[arg(long, requires = "widths", conflicts_with_all = ["text", "file"])]
        table: Option<String>,
        /// Block widths for `--table`, comma separated.
        #[arg(long, value_delimiter = ',')]
        widths: Vec<usize>,
        /// Fix a prefix of the first block.
        #[arg(long, value_name = "BITS")]
        fix: Option<String>,
        /// Negate the inputs of one block.
        #[arg(long, value_name = "BLOCK")]
        negate_block: Option<usize>,
        /// Insert an unused leading variable into one block.
        #[arg(long, value_name = "BLOCK")]
        add_leading: Option<usize>,
        #[arg(long)]
        negate_output: bool,
        /// Evaluate at an assignment, blocks separated by commas.
        #[arg(long, value_name = "BITS")]
        assign: Option<String>,
    },
    /// Solve a promise problem, a QBF, or list first-block solutions.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with_all = ["qbf", "solutions"])]
        problem: Option<String>,
        #[arg(long, value_enum, conflicts_with = "solutions")]
        qbf: Option<QuantArg>,
        #[arg(long)]
        solutions: bool,
    },
    /// Apply a reduction rule or an intersection construction.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "intersection")]
        rule: Option<String>,
        /// Bit string for the level-0 rule.
        #[arg(long)]
        bits: Option<String>,
        /// Build from two witness families given on two input lines.
        #[arg(long, value_enum)]
        intersection: Option<IntersectionArg>,
        #[arg(long, value_name = "BITS", default_value = "")]
        x: String,
    },
    /// Check a rule on one instance or exhaustively.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "intersection")]
        rule: Option<String>,
        #[arg(long)]
        bits: Option<String>,
        #[arg(long, value_name = "M", conflicts_with_all = ["text", "file", "bits"])]
        exhaustive_m: Option<usize>,
        #[arg(long, value_enum)]
        intersection: Option<IntersectionArg>,
        #[arg(long, value_name = "BITS", default_value = "")]
        x: String,
        /// Check a rule with a fault injected.
        #[arg(long)]
        mutation: Option<String>,
        #[command(flatten)]
        report: Report,
    },
    /// Compile an oracle circuit at an input.
    Compile {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "BITS")]
        alpha: String,
        #[arg(long, value_enum, default_value = "uval2")]
        target: TargetArg,
        /// Print the circuit value instead.
        #[arg(long, conflicts_with_all = ["check", "valid"])]
        eval: bool,
        /// List the valid vertex assignments.
        #[arg(long, conflicts_with = "check")]
        valid: bool,
        /// Check the compiled families against the circuit.
        #[arg(long)]
        check: bool,
    },
    /// Explore an oracle machine against every adversary.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        machine: String,
        #[arg(long, value_name = "M", conflicts_with_all = ["text", "file"])]
        exhaustive_m: Option<usize>,
        #[arg(long)]
        mutation: Option<String>,
        /// Print every path.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        report: Report,
    },
    /// Run the randomized isolation reduction.
    Vv {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        seed: u64,
        /// Trials (default 24m).
        #[arg(long)]
        trials: Option<usize>,
        /// Inclusive range of constraint counts, `lo..hi`.
        #[arg(long, value_name = "LO..HI")]
        k_range: Option<String>,
        /// Explore both answers to every promise-violating query.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        dump: bool,
        /// Completeness statistics over all functions of width `--m`.
        #[arg(long, requires = "m", conflicts_with_all = ["text", "file"])]
        stats: bool,
        /// Print one sampled hash of `--k` rows over `--m` bits.
        #[arg(long, requires_all = ["m", "k"], conflicts_with_all = ["text", "file", "stats"])]
        sample_hash: bool,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[command(flatten)]
        report: Report,
    },
    /// Run the default verification campaign.
    Campaign {
        #[arg(long)]
        seed: u64,
        /// Exhaustive rule checks at width 4.
        #[arg(long)]
        nightly: bool,
        /// Inject a fault and run the rule and machine campaigns.
        #[arg(long)]
        mutation: Option<String>,
        #[command(flatten)]
        report: Report,
    },
    /// Verify the diagram witnesses and emit DOT.
    Hierarchy {
        #[arg(long, value_name = "PATH")]
        dot_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_time: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::CapExceeded { .. } | Error::PathCapExceeded { .. }) => 3,
            Failure::Core(Error::IncompleteRegistry { .. }) => 1,
            _ => 2,
        }
    }
}

type Outcome = Result<bool, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl Input {
    fn read(&self) -> Result<String, Failure> {
        match (&self.text, &self.file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(p)) => fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display()))),
            (None, None) => Err(usage("an input is required (--in or --file)")),
        }
    }

    fn is_given(&self) -> bool {
        self.text.is_some() || self.file.is_some()
    }

    fn family(&self) -> Result<Family, Failure> {
        Ok(self.read()?.trim().parse()?)
    }

    fn pair(&self) -> Result<(Family, Family), Failure> {
        let text = self.read()?;
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        match lines.as_slice() {
            [g, h] => Ok((g.parse()?, h.parse()?)),
            _ => Err(usage("intersections need two families, one per line")),
        }
    }

    fn circuit(&self) -> Result<OracleCircuit, Failure> {
        Ok(parse_circuit(&self.read()?)?)
    }
}

fn flat_bits(text: &str) -> Result<Vec<bool>, Failure> {
    Ok(parse_bits(text)?.concat())
}

/// `--bits`, or else the input text.
fn bit_input(bits: Option<&str>, input: &Input) -> Result<Vec<bool>, Failure> {
    match bits {
        Some(b) => flat_bits(b),
        None => flat_bits(input.read()?.trim()),
    }
}

fn print_verdict(v: &Verdict, report: &Report, cex_file: Option<PathBuf>) -> Result<(), Failure> {
    println!("{}", v.report_line(!report.no_time));
    if let Some(note) = &v.note {
        println!("NOTE {} {note}", v.name);
    }
    if let Some(c) = &v.counterexample {
        print_counterexample(&v.name, c, cex_file)?;
    }
    Ok(())
}

fn print_counterexample(name: &str, c: &Counterexample, file: Option<PathBuf>) -> Result<(), Failure> {
    println!("COUNTEREXAMPLE {name}");
    for line in c.to_string().lines() {
        println!("  {line}");
    }
    if let Some(path) = file {
        fs::write(&path, format!("{}\n", c.instance))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        println!("  file: {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn eval_cmd(
    input: &Input,
    table: Option<&str>,
    widths: &[usize],
    fix: Option<&str>,
    negate_block: Option<usize>,
    add_leading: Option<usize>,
    negate: bool,
    assign: Option<&str>,
) -> Outcome {
    let mut f = match table {
        Some(t) => from_truth_table(widths, &flat_bits(t)?)?,
        None => input.family()?,
    };
    if let Some(bits) = fix {
        f = fix_first_block_prefix(&f, &flat_bits(bits)?)?;
    }
    if let Some(b) = negate_block {
        f = negate_block_inputs(&f, b)?;
    }
    if let Some(b) = add_leading {
        f = add_leading_variable(&f, b)?;
    }
    if negate {
        f = negate_output(&f);
    }
    match assign {
        Some(a) => {
            let value = f.evaluate(&Assignment::new(parse_bits(a)?))?;
            println!("{}", u8::from(value));
        }
        None => println!("{f}"),
    }
    Ok(true)
}

fn solve_cmd(input: &Input, problem: Option<&str>, qbf: Option<QuantArg>, solutions: bool) -> Outcome {
    let f = input.family()?;
    let solver = Solver::default();
    if let Some(p) = problem {
        let kind: ProblemKind = p.parse()?;
        println!("{}", solver.solve(ProblemId::new(kind, f.level()), &f)?);
    } else if let Some(q) = qbf {
        let start = match q {
            QuantArg::Exists => Quantifier::Exists,
            QuantArg::Forall => Quantifier::Forall,
        };
        println!("{}", u8::from(solver.qbf_value(&f, start)?));
    } else if solutions {
        for x in solver.first_block_solution_set(&f)? {
            println!("{}", format_bits(&x));
        }
    } else {
        return Err(usage("give one of --problem, --qbf or --solutions"));
    }
    Ok(true)
}

fn reduce_cmd(
    input: &Input,
    rule: Option<&str>,
    bits: Option<&str>,
    intersection: Option<IntersectionArg>,
    x: &str,
) -> Outcome {
    let out = match (rule, intersection) {
        (Some(PI1_TO_UVAL), _) => {
            pi1_to_uval(&bit_input(bits, input)?)?
        }
        (Some(name), _) => Registry::standard().lookup(name)?.apply(&input.family()?)?,
        (None, Some(kind)) => {
            let (g, h) = input.pair()?;
            let x = flat_bits(x)?;
            match kind {
                IntersectionArg::Val => build_val_intersection(&g, &h, &x)?,
                IntersectionArg::Uval => build_uval_intersection(&g, &h, &x)?,
            }
        }
        (None, None) => return Err(usage("give --rule or --intersection")),
    };
    println!("{out}");
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn check_cmd(
    input: &Input,
    rule: Option<&str>,
    bits: Option<&str>,
    exhaustive_m: Option<usize>,
    intersection: Option<IntersectionArg>,
    x: &str,
    mutation: Option<&str>,
    report: &Report,
) -> Outcome {
    let verdict_line = |pass: bool| if pass { "PASS" } else { "FAIL" };
    if let Some(kind) = intersection {
        let (g, h) = input.pair()?;
        let x = flat_bits(x)?;
        let o = match kind {
            IntersectionArg::Val => check_val_intersection(&g, &h, &x)?,
            IntersectionArg::Uval => check_uval_intersection(&g, &h, &x)?,
        };
        println!("{} value={} forced={}", verdict_line(o.pass), o.value, o.forced);
        return Ok(o.pass);
    }
    let name = rule.ok_or_else(|| usage("give --rule or --intersection"))?;
    if name == PI1_TO_UVAL {
        let x = bit_input(bits, input)?;
        let (v, ok) = check_pi1_to_uval(&x)?;
        println!("{} UVAL={v}", verdict_line(ok));
        return Ok(ok);
    }
    let registry = Registry::from_catalog(Catalog::with_mutation(parse_mutation(mutation)?));
    let rule = registry.lookup(name)?;
    if let Some(m) = exhaustive_m {
        let v = verify_rule_exhaustive(rule, m)?;
        print_verdict(&v, report, report.cex_out.clone())?;
        return Ok(v.ok());
    }
    let f = input.family()?;
    let o = rule.check(&f)?;
    println!(
        "{} {}={} {}={} size={}->{}",
        verdict_line(o.pass),
        rule.source(),
        o.source_value,
        rule.target(),
        o.target_value,
        f.size(),
        o.transformed.size()
    );
    if let Some(c) = rule_counterexample(&Solver::default(), rule, &f)? {
        print_counterexample(rule.name(), &c, report.cex_out.clone())?;
    }
    Ok(o.pass)
}

fn compile_cmd(input: &Input, alpha: &str, target: TargetArg, eval: bool, valid: bool, check: bool) -> Outcome {
    let c = input.circuit()?;
    let alpha = flat_bits(alpha)?;
    if eval {
        println!("{}", u8::from(eval_circuit(&c, &alpha)?));
        return Ok(true);
    }
    if valid {
        for x in valid_assignments(&c, &alpha)? {
            println!("{}", format_bits(&x));
        }
        return Ok(true);
    }
    if check {
        let r = check_compiled(&c, &alpha)?;
        println!(
            "{} circuit={} valid={} sigma2={} uval2={} solutions={} side_conditions={} size={}->{}",
            if r.pass() { "PASS" } else { "FAIL" },
            u8::from(r.circuit_value),
            r.valid_count,
            u8::from(r.sigma2_value),
            r.uval2_value,
            r.uval2_solutions,
            r.side_conditions,
            c.size(),
            r.uval2_size
        );
        return Ok(r.pass());
    }
    match target {
        TargetArg::Sigma2 => println!("{}", compile_sigma2(&c, &alpha)?.family),
        TargetArg::Uval2 => {
            let u = compile_uval2(&c, &alpha)?;
            println!("{}", u.family);
            eprintln!("layout {}", u.layout);
        }
    }
    Ok(true)
}

fn parse_mutation(m: Option<&str>) -> Result<Option<Mutation>, Failure> {
    m.map(str::parse).transpose().map_err(Failure::from)
}

fn simulate_cmd(
    input: &Input,
    name: &str,
    exhaustive_m: Option<usize>,
    mutation: Option<&str>,
    dump: bool,
    report: &Report,
) -> Outcome {
    let mutation = parse_mutation(mutation)?;
    let mach = machine(name, mutation)?;
    let suffix = mutation.map_or(String::new(), |mu| format!(" --mutation {mu}"));
    if let Some(m) = exhaustive_m {
        let tables = promise_lab_core::harness::enumerate_truth_tables(m)?;
        let v = tally(format!("machine/{name}/m{m}"), &tables, |f| {
            let r = check_machine(mach.as_ref(), f, Some(m))?;
            Ok((!r.pass()).then(|| Counterexample {
                replay: format!("simulate --machine {name}{suffix}"),
                instance: f.to_string(),
                expected: format!("every leaf in {} after {m} calls", r.source_value),
                got: format!("{r:?}"),
            }))
        })?;
        print_verdict(&v, report, report.cex_out.clone())?;
        return Ok(v.ok());
    }
    let f = input.family()?;
    if dump {
        let tree = run_adversarial(mach.as_ref(), &f, Resolution::Exhaustive, DEFAULT_PATH_CAP)?;
        print!("{}", tree.dump());
        println!();
    }
    let r = check_machine(mach.as_ref(), &f, f.level().eq(&1).then(|| f.width(1)))?;
    println!(
        "{} source={} leaves={} max_calls={}",
        if r.pass() { "PASS" } else { "FAIL" },
        r.source_value,
        r.leaves,
        r.max_calls
    );
    Ok(r.pass())
}

fn parse_k_range(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || usage(format!("bad k range `{text}`, expected LO..HI"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

#[allow(clippy::too_many_arguments)]
fn vv_cmd(
    input: &Input,
    seed: u64,
    trials: Option<usize>,
    k_range: Option<&str>,
    exhaustive: bool,
    dump: bool,
    stats: bool,
    sample: bool,
    m: Option<usize>,
    k: Option<usize>,
    seeds: u64,
    report: &Report,
) -> Outcome {
    if sample {
        let hc = hash_from_seed(m.unwrap_or(0), k.unwrap_or(0), seed)?;
        println!("{hc}");
        return Ok(true);
    }
    if stats {
        let (verdicts, _) = vv_completeness(m.unwrap_or(0), seeds, seed)?;
        for v in &verdicts {
            print_verdict(v, report, None)?;
        }
        return Ok(verdicts.iter().all(Verdict::ok));
    }
    if !input.is_given() {
        return Err(usage("an input is required (--in or --file)"));
    }
    let f = input.family()?;
    if f.level() != 1 {
        return Err(Error::LevelMismatch { expected: 1, found: f.level() }.into());
    }
    let m = f.width(1);
    let k_range = k_range.map(parse_k_range).transpose()?;
    let plan = plan_from_seed(m, trials.unwrap_or_else(|| default_trials(m)), k_range, seed)?;
    let resolution = if exhaustive { Resolution::Exhaustive } else { Resolution::Fixed(false) };
    let tree = vv_run(&f, plan, resolution)?;
    if dump {
        print!("{}", tree.dump());
        println!();
    }
    let outputs: Vec<String> = tree.outputs().map(|b| u8::from(b).to_string()).collect();
    println!("output={} paths={} max_calls={}", outputs.join(","), tree.leaf_count(), tree.max_calls());
    Ok(true)
}

fn file_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect::<String>()
        + ".txt"
}

fn campaign_cmd(seed: u64, nightly: bool, mutation: Option<&str>, report: &Report) -> Outcome {
    let verdicts = match parse_mutation(mutation)? {
        Some(mu) => mutation_sensitivity(mu, 3)?,
        None => {
            let opts = CampaignOptions {
                seed,
                rule_width: if nightly { 4 } else { 3 },
                ..CampaignOptions::default()
            };
            full_campaign(&opts)?
        }
    };
    if let Some(dir) = &report.cex_out {
        fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    for v in &verdicts {
        let file = report.cex_out.as_deref().map(|d: &Path| d.join(file_name(&v.name)));
        print_verdict(v, report, file)?;
    }
    let failed = verdicts.iter().filter(|v| !v.ok()).count();
    println!("SUMMARY checks={} failed={failed}", verdicts.len());
    Ok(failed == 0)
}

fn hierarchy_cmd(dot_out: Option<&Path>, seed: u64, no_time: bool) -> Outcome {
    let r = verify_hierarchy(&Registry::standard(), seed)?;
    let mut lines: Vec<String> = r.verdicts.iter().map(|v| v.report_line(!no_time)).collect();
    lines.push(format!(
        "AUTOMORPHISM {}",
        if r.automorphism { "ok" } else { "broken" }
    ));
    match dot_out {
        Some(p) => {
            fs::write(p, &r.dot).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
            for l in &lines {
                println!("{l}");
            }
        }
        None => {
            print!("{}", r.dot);
            for l in &lines {
                eprintln!("{l}");
            }
        }
    }
    Ok(r.ok())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval {
            input,
            table,
            widths,
            fix,
            negate_block,
            add_leading,
            negate_output,
            assign,
        } => eval_cmd(
            &input,
            table.as_deref(),
            &widths,
            fix.as_deref(),
            negate_block,
            add_leading,
            negate_output,
            assign.as_deref(),
        ),
        Command::Solve { input, problem, qbf, solutions } => {
            solve_cmd(&input, problem.as_deref(), qbf, solutions)
        }
        Command::Reduce { input, rule, bits, intersection, x } => {
            reduce_cmd(&input, rule.as_deref(), bits.as_deref(), intersection, &x)
        }
        Command::Check { input, rule, bits, exhaustive_m, intersection, x, mutation, report } => {
            check_cmd(
                &input,
                rule.as_deref(),
                bits.as_deref(),
                exhaustive_m,
                intersection,
                &x,
                mutation.as_deref(),
                &report,
            )
        }
        Command::Compile { input, alpha, target, eval, valid, check } => {
            compile_cmd(&input, &alpha, target, eval, valid, check)
        }
        Command::Simulate { input, machine, exhaustive_m, mutation, dump, report } => {
            simulate_cmd(&input, &machine, exhaustive_m, mutation.as_deref(), dump, &report)
        }
        Command::Vv {
            input,
            seed,
            trials,
            k_range,
            exhaustive,
            dump,
            stats,
            sample_hash,
            m,
            k,
            seeds,
            report,
        } => vv_cmd(
            &input,
            seed,
            trials,
            k_range.as_deref(),
            exhaustive,
            dump,
            stats,
            sample_hash,
            m,
            k,
            seeds,
            &report,
        ),
        Command::Campaign { seed, nightly, mutation, report } => {
            campaign_cmd(seed, nightly, mutation.as_deref(), &report)
        }
        Command::Hierarchy { dot_out, seed, no_time } => hierarchy_cmd(dot_out.as_deref(), seed, no_time),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match with_jobs(jobs, || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Usage(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
