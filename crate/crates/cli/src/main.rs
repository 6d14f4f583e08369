//! `fhc`: exact experiments with generalized C-type operators.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 horizon or budget exceeded.

mod report;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use fhc_core::fhc::{
    assemble_fhc, choose_plan, epsilon, gen_dense_corpus, validate_plan, visit_check, visit_profile,
    FhcPlan,
};
use fhc_core::inverse::{scarcity_profile, synthesize_tau};
use fhc_core::sets::{build_family, prefix_density, verify_family};
use fhc_core::{derive_structure, BlockStructure, Dyadic, Error, FinVec, OperatorSpec, Schedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use report::{density_csv, norm_csv, write_atomic, Check, Report};
use verify::Level;

#[derive(Parser)]
#[command(name = "fhc", version, about = "Exact orbit experiments for C-type operators on l1")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Schedule commands.
    Schedule {
        #[command(subcommand)]
        cmd: ScheduleCmd,
    },
    /// Operator application.
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
    /// Certificate suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Separated sets of positive lower density.
    Sets {
        #[command(subcommand)]
        cmd: SetsCmd,
    },
    /// Frequently hypercyclic vector construction.
    Fhc {
        #[command(subcommand)]
        cmd: FhcCmd,
    },
    /// τ schedules.
    Tau {
        #[command(subcommand)]
        cmd: TauCmd,
    },
    /// Inverse-orbit analysis.
    Inv {
        #[command(subcommand)]
        cmd: InvCmd,
    },
}

#[derive(Subcommand)]
enum ScheduleCmd {
    /// Validate a schedule and print the derived block structure.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Compute T^k x exactly.
    Apply {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        power: i64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every applicable certificate.
    All {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

#[derive(Subcommand)]
enum SetsCmd {
    /// Build and verify the family for `s:l` pairs.
    Gen {
        /// JSON file of `[s, l]` pairs, or inline `s:l` pairs such as `3:5,7:16`.
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        horizon: u64,
        /// Directory for `density_<j>.csv`.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FhcCmd {
    /// Choose a plan for J targets and assemble the truncated vector.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "J")]
        big_j: usize,
        #[arg(long)]
        horizon: u64,
        /// JSON array of target vectors; defaults to the dense enumeration.
        #[arg(long)]
        targets: Option<PathBuf>,
        /// Directory receiving `plan.json` and `vector.json`.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Check every visit of T^M x to the ε_J-ball of y^(J).
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Vector to check; rebuilt from the plan when absent.
        #[arg(long)]
        vec: Option<PathBuf>,
        #[arg(long = "J")]
        big_j: Option<usize>,
    },
    /// Forward visit densities at radius ε_J.
    Density {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        vec: Option<PathBuf>,
        #[arg(long = "J")]
        big_j: Option<usize>,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Subcommand)]
enum TauCmd {
    /// Synthesize (τ_l) for l ≤ L.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short = 'L')]
        l: usize,
    },
}

#[derive(Subcommand)]
enum InvCmd {
    /// Inverse-orbit norms and return scarcity.
    Profile {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        chain: usize,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_spec(path: &Path) -> anyhow::Result<(Schedule, OperatorSpec)> {
    let schedule: Schedule = read_json(path)?;
    let spec = derive_structure(&schedule)?;
    Ok((schedule, spec))
}

fn parse_pairs(s: &str) -> anyhow::Result<Vec<(u64, u64)>> {
    let path = Path::new(s);
    if path.is_file() {
        return read_json(path);
    }
    s.split(',')
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| anyhow!("pair `{p}` is not s:l"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn to_value<T: serde::Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

struct Timer {
    on: bool,
    marks: BTreeMap<String, f64>,
    start: Instant,
}

impl Timer {
    fn mark(&mut self, what: &str) {
        if self.on {
            self.marks.insert(what.to_string(), self.start.elapsed().as_secs_f64());
        }
        self.start = Instant::now();
    }
}

fn plan_target(plan: &FhcPlan, big_j: Option<usize>) -> anyhow::Result<usize> {
    let j = big_j.unwrap_or(plan.entries.len());
    if j == 0 || j > plan.entries.len() {
        bail!(Error::UnknownSet(j));
    }
    Ok(j)
}

fn run(cli: &Cli, timer: &mut Timer) -> anyhow::Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let report = match &cli.cmd {
        Cmd::Schedule { cmd: ScheduleCmd::Validate { spec } } => {
            let (schedule, op) = load_spec(spec)?;
            let mut r = Report::new("schedule validate", json!({ "spec": schedule }));
            r.checks.push(Check::of(
                "schedule constraints: 2δ+η < Δ, 2Δ^(k) | Δ^(k+1), constant η/Δ, increasing",
                true,
                "",
            ));
            let bounds = op.blocks().boundaries();
            r.result = json!({
                "generations": op.blocks().generations(),
                "nblocks": op.nblocks(),
                "horizon": op.horizon(),
                "boundaries_head": &bounds[..bounds.len().min(17)],
                "tau_head": &op.taus()[..op.taus().len().min(16)],
            });
            r
        }
        Cmd::Op { cmd: OpCmd::Apply { spec, vec, power } } => {
            let (schedule, op) = load_spec(spec)?;
            let x: FinVec = read_json(vec)?;
            let mut r = Report::new("op apply", json!({ "spec": schedule, "vec": x, "power": power }));
            let y = op.apply_t_power(&x, *power)?;
            r.result = to_value(&y)?;
            r
        }
        Cmd::Verify { cmd: VerifyCmd::All { spec, level } } => {
            let (schedule, op) = load_spec(spec)?;
            let level_name = format!("{level:?}").to_lowercase();
            let mut r = Report::new(
                "verify all",
                json!({ "spec": schedule, "level": level_name, "seed": cli.seed }),
            );
            r.checks = verify::verify_all(&schedule, &op, *level, &mut rng)?;
            r
        }
        Cmd::Sets { cmd: SetsCmd::Gen { pairs, horizon, csv_dir } } => {
            let pairs = parse_pairs(pairs)?;
            let mut r = Report::new("sets gen", json!({ "pairs": pairs, "horizon": horizon }));
            let fam = build_family(&pairs, *horizon)?;
            r.checks.push(Check::from_verdict(
                "separated family: disjoint, |n - n'| ≥ s_j + s_j', min A_j ≥ l_j",
                verify_family(&fam, *horizon)?,
            ));
            let mut sets = Vec::new();
            for j in 1..=fam.len() {
                let members = fam.members(j, *horizon)?;
                let curve = prefix_density(&members, *horizon);
                let bound = fam.certified_bound(j)?;
                let burn_in = fam.burn_in(j)?;
                r.checks.push(Check::of(
                    format!("prefix density of A_{j} ≥ 1/(2 d_j 3^(2^j)) beyond burn-in"),
                    curve.dominates(&bound, burn_in),
                    format!("set {j}"),
                ));
                if let Some(dir) = csv_dir {
                    write_atomic(&dir.join(format!("density_{j}.csv")), &density_csv(&curve))?;
                }
                sets.push(json!({
                    "j": j,
                    "count": members.len(),
                    "members": members,
                    "certified_bound": bound.to_string(),
                    "burn_in": burn_in,
                }));
            }
            r.result = json!({ "strides": fam.strides, "starts_head": &fam.starts[..fam.starts.len().min(16)], "sets": sets });
            r
        }
        Cmd::Fhc { cmd: FhcCmd::Build { spec, big_j, horizon, targets, out_dir } } => {
            let (schedule, op) = load_spec(spec)?;
            let ys: Vec<FinVec> = match targets {
                Some(p) => read_json(p)?,
                None => gen_dense_corpus(&op, *big_j)?,
            };
            if ys.len() < *big_j {
                bail!(Error::Precondition(format!("{} targets given, J = {big_j}", ys.len())));
            }
            let ys = &ys[..*big_j];
            let mut r = Report::new(
                "fhc build",
                json!({ "spec": schedule, "J": big_j, "horizon": horizon, "targets": ys }),
            );
            let plan = choose_plan(&op, ys, *horizon)?;
            timer.mark("plan");
            let asm = assemble_fhc(&op, &plan)?;
            timer.mark("assemble");
            r.checks.push(Check::from_verdict(
                "plan conditions hold and every constant is minimal",
                validate_plan(&op, &plan)?,
            ));
            r.checks.push(Check::of(
                "‖x^(m)‖ ≤ ‖y‖ 2^(τ*) 2^(-(m - (2N+1)Δ - (2N+1)η - 1)) for every term",
                asm.term_bounds_hold,
                "a block vector exceeds its norm bound",
            ));
            write_atomic(&out_dir.join("plan.json"), &(serde_json::to_string_pretty(&plan)? + "\n"))?;
            write_atomic(&out_dir.join("vector.json"), &(serde_json::to_string(&asm.x)? + "\n"))?;
            r.result = json!({
                "entries": plan.entries.iter().map(|e| json!({
                    "j": e.j, "N": e.big_n, "s": e.s, "l": e.l, "tau_star": e.tau_star,
                    "members": e.members, "hosts": e.hosts,
                })).collect::<Vec<_>>(),
                "support_size": asm.x.len(),
                "norm": asm.norm,
                "tail_bound": asm.tail_bound,
            });
            r
        }
        Cmd::Fhc { cmd: FhcCmd::Check { spec, plan, vec, big_j } } => {
            let (schedule, op) = load_spec(spec)?;
            let plan: FhcPlan = read_json(plan)?;
            let j = plan_target(&plan, *big_j)?;
            let mut r = Report::new("fhc check", json!({ "spec": schedule, "J": j, "horizon": plan.horizon }));
            r.checks.push(Check::from_verdict(
                "plan conditions hold and every constant is minimal",
                validate_plan(&op, &plan)?,
            ));
            let mut asm = assemble_fhc(&op, &plan)?;
            if let Some(p) = vec {
                asm.x = read_json(p)?;
            }
            let visits = visit_check(&op, &plan, &asm, j)?;
            timer.mark("visits");
            if let Some(v) = visits.first_failure() {
                eprintln!(
                    "visit failed at M = {}: exact distance {} exceeds ε_J = {}",
                    v.big_m, v.distance, visits.epsilon.total
                );
            }
            for v in &visits.visits {
                r.checks.push(Check::of(
                    format!("‖T^M x - y^(J)‖ ≤ ε_J at M = {}", v.big_m),
                    v.passed,
                    format!("M = {}: distance {} > ε_J = {}", v.big_m, v.distance, visits.epsilon.total),
                ));
                r.checks.push(Check::of(
                    format!("T^M x^(M) recovers y^(J) exactly on the low section, M = {}", v.big_m),
                    v.own_exact,
                    format!("M = {}", v.big_m),
                ));
                r.checks.push(Check::of(
                    format!("T^M x^(m) = 2^M shift_M x^(m) for m > M, M = {}", v.big_m),
                    v.later_shift_ok,
                    format!("M = {}", v.big_m),
                ));
            }
            r.result = to_value(&visits)?;
            r
        }
        Cmd::Fhc { cmd: FhcCmd::Density { spec, plan, vec, big_j, csv } } => {
            let (schedule, op) = load_spec(spec)?;
            let plan: FhcPlan = read_json(plan)?;
            let j = plan_target(&plan, *big_j)?;
            let x: FinVec = match vec {
                Some(p) => read_json(p)?,
                None => assemble_fhc(&op, &plan)?.x,
            };
            let eps = epsilon(&plan, j)?;
            let y = &plan.entries[j - 1].target;
            let mut r = Report::new("fhc density", json!({ "spec": schedule, "J": j, "horizon": plan.horizon }));
            let prof = visit_profile(&op, &x, y, &eps.total, plan.horizon)?;
            timer.mark("orbit");
            let fam = plan.family()?;
            let bound = fam.certified_bound(j)?;
            let burn_in = fam.burn_in(j)?;
            r.checks.push(Check::of(
                "forward visit density ≥ certified lower density of A(s_J, l_J) beyond burn-in",
                prof.curve.dominates(&bound, burn_in),
                "visit density below the certified bound",
            ));
            write_atomic(csv, &density_csv(&prof.curve))?;
            r.result = json!({
                "radius": eps.total,
                "visits": prof.visits,
                "certified_bound": bound.to_string(),
                "burn_in": burn_in,
            });
            r
        }
        Cmd::Tau { cmd: TauCmd::Synth { spec, l } } => {
            let schedule: Schedule = read_json(spec)?;
            let blocks = BlockStructure::new(schedule.generations()?)?;
            let mut r = Report::new("tau synth", json!({ "spec": schedule, "L": l }));
            let sched = synthesize_tau(&blocks, *l)?;
            r.checks.push(Check::of(
                "τ_l ≥ S_l + 2η_l + δ_l + 2l + 3 and 2^l J_l ≤ τ_l - l - S_l - δ_l - 3, τ increasing",
                sched.verify(&blocks),
                "substitution failed",
            ));
            r.result = to_value(&sched)?;
            r
        }
        Cmd::Inv { cmd: InvCmd::Profile { spec, vec, horizon, csv, chain } } => {
            let (schedule, op) = load_spec(spec)?;
            let x: FinVec = read_json(vec)?;
            let mut r = Report::new(
                "inv profile",
                json!({ "spec": schedule, "vec": x, "horizon": horizon, "chain": chain }),
            );
            op.inverse_supported()?;
            let (norms, trace) = match scarcity_profile(&op, &x, *horizon, *chain) {
                Ok(t) => (t.norms.clone(), to_value(&t)?),
                Err(Error::AnchorUndefined) => {
                    let mut cur = x.clone();
                    let mut norms = Vec::with_capacity(*horizon as usize);
                    for j in 0..*horizon {
                        norms.push(cur.norm_l1());
                        if j + 1 < *horizon {
                            cur = op.apply_t_inv(&cur)?;
                        }
                    }
                    (norms, Value::Null)
                }
                Err(e) => return Err(e.into()),
            };
            timer.mark("orbit");
            if let Some(p) = csv {
                write_atomic(p, &norm_csv(&norms))?;
            }
            let last: Option<&Dyadic> = norms.last();
            r.result = json!({ "scarcity": trace, "final_norm": last });
            r
        }
    };
    Ok(report)
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::HorizonExceeded { .. } | Error::BudgetExceeded(_) | Error::HorizonExhausted(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var("FHC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut timer = Timer { on: cli.timings, marks: BTreeMap::new(), start: Instant::now() };
    let total = Instant::now();
    let mut report = match run(&cli, &mut timer) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    if cli.timings {
        timer.marks.insert("total".into(), total.elapsed().as_secs_f64());
        report.timings = Some(timer.marks);
    }
    let text = match report.to_json() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = write_atomic(p, &text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let Some(c) = report.failed() {
        eprintln!("check failed: {}: {}", c.statement, c.witness.as_deref().unwrap_or(""));
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
