mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use askcount::exactcore::{FiniteField, PrimePower};
use askcount::graphloci::{graph_rep, graph_vmax, limit_congruence_check, Graph};
use askcount::grouplab::{
    baer_group, class_count_naive, class_count_structural, heisenberg_group, lie_adjoint_rep,
    lie_exp_group, lie_from_json, lie_inclusion_rep, mtheta_group, mtheta_orbit_count,
    natural_orbit_count, structure_constants, GroupTable, LieData, OrbitMode, StructuralKind,
};
use askcount::modrep::{ask_from_histogram, rank_histogram, rep_from_json, rep_to_value, ModuleRep};
use askcount::qseries::{laurent_fit, read_samples};
use askcount::shell::{
    affine_count, hm_combination, theorem_a_check, verify_battery, AffineScheme, BBDecomposition,
    BatteryConfig,
};
use askcount::{Budget, Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "askcount", version, about = "Average kernel sizes, class numbers and orbit counts over finite fields")]
struct Cli {
    /// Maximum number of points a single enumeration may visit.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u128,
    /// Maximum group order for naive class counting.
    #[arg(long, global = true)]
    group_budget: Option<u128>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite field data.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Module representations.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Groups attached to representations.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Nilpotent matrix Lie algebras.
    #[command(subcommand)]
    Lie(LieCmd),
    /// Graph loci of symmetric matrices.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Affine schemes.
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Graph decompositions of point counts.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Run the identity battery.
    Verify {
        /// Battery configuration; defaults to the shipped suite.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Fit a Laurent polynomial to sampled values.
    Fit {
        /// CSV with columns q_p, q_f, num, den_exp.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, allow_hyphen_values = true)]
        hi: i64,
    },
}

#[derive(Subcommand)]
enum FieldCmd {
    Info {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Args)]
struct RepQ {
    #[arg(long)]
    rep: PathBuf,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum RepCmd {
    /// Average kernel size of the m-th power.
    Ask {
        #[command(flatten)]
        a: RepQ,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Rank histogram.
    Hist {
        #[command(flatten)]
        a: RepQ,
    },
    /// Knuth dual.
    Dual {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Alternating hull.
    Hull {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Block-diagonal m-th power.
    Power {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Direct sum of two representations.
    Sum {
        #[arg(long, num_args = 2, required = true)]
        rep: Vec<PathBuf>,
    },
    /// Saturation of the image lattice.
    Saturate {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Shape and structural properties.
    Check {
        #[arg(long)]
        rep: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupKindArg {
    Baer,
    Heisenberg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassMode {
    Naive,
    Structural,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitModeArg {
    Bfs,
    Burnside,
    Formula,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Baer group of an alternating representation.
    Baer {
        #[command(flatten)]
        a: RepQ,
    },
    /// Heisenberg-type group.
    Heisenberg {
        #[command(flatten)]
        a: RepQ,
    },
    /// The module acting on pairs of vectors.
    Mtheta {
        #[command(flatten)]
        a: RepQ,
    },
    /// Number of conjugacy classes.
    Classes {
        #[command(flatten)]
        a: RepQ,
        #[arg(long, value_enum)]
        kind: GroupKindArg,
        #[arg(long, value_enum, default_value_t = ClassMode::Naive)]
        mode: ClassMode,
    },
    /// Number of orbits of the module action.
    Orbits {
        #[command(flatten)]
        a: RepQ,
        #[arg(long, value_enum, default_value_t = OrbitModeArg::Bfs)]
        mode: OrbitModeArg,
    },
}

#[derive(Args)]
struct LieQ {
    #[arg(long)]
    lie: PathBuf,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum LieCmd {
    /// Check the basis and print structure constants.
    Validate {
        #[arg(long)]
        lie: PathBuf,
    },
    /// Inclusion representation.
    Iota {
        #[arg(long)]
        lie: PathBuf,
    },
    /// Adjoint representation.
    Ad {
        #[arg(long)]
        lie: PathBuf,
    },
    /// Exponential group.
    Exp {
        #[command(flatten)]
        a: LieQ,
    },
    /// Orbits of the exponential group on column space.
    Orbits {
        #[command(flatten)]
        a: LieQ,
    },
    /// Conjugacy classes of the exponential group.
    Classes {
        #[command(flatten)]
        a: LieQ,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Representation of the graph's symmetric matrix space.
    Rep {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Number of invertible matrices in the space.
    Vmax {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        q: u64,
    },
    /// Congruence between the scaled m-th power ask and the full-rank count.
    LimitCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum SchemeCmd {
    /// Count F_q-points.
    Count {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    /// Evaluate the graph combination H_m at q.
    Hm {
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: u64,
    },
    /// Verify a decomposition and the resulting congruences.
    TheoremA {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
    },
}

struct Ctx {
    budget: Budget,
}

impl Ctx {
    fn field(&self, q: u64) -> Result<FiniteField> {
        FiniteField::with_budget(PrimePower::from_q(q)?, &self.budget)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_rep(path: &Path) -> Result<ModuleRep> {
    let rep = rep_from_json(&read(path)?)?;
    if rep.name().is_some() {
        return Ok(rep);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("rep").to_string();
    Ok(rep.named(stem))
}

fn load_graph(path: &Path) -> Result<Graph> {
    Ok(serde_json::from_str(&read(path)?)?)
}

fn load_lie(path: &Path) -> Result<LieData> {
    lie_from_json(&read(path)?)
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn rep_output(rep: &ModuleRep) -> Output {
    let v = rep_to_value(rep);
    let text = serde_json::to_string_pretty(&v).expect("json");
    Output::new(v, text)
}

fn ask_text(num: &BigInt, den_exp: u32, value: &str) -> String {
    format!("{value} (num {num}, den-exp {den_exp})")
}

fn cmd_rep(ctx: &Ctx, cmd: RepCmd) -> Result<Output> {
    let budget = &ctx.budget;
    Ok(match cmd {
        RepCmd::Ask { a, m } => {
            if m == 0 {
                return Err(Error::Invalid("m must be at least 1".into()));
            }
            let rep = load_rep(&a.rep)?;
            let field = ctx.field(a.q)?;
            let h = rank_histogram(&rep, &field, budget)?;
            if h.counts.get(rep.d()).copied().unwrap_or(0) == 0 {
                warn("the full-rank locus is empty at this q");
            }
            if !rep.is_immersive() {
                warn("representation is not immersive");
            }
            let v = ask_from_histogram(&h, m);
            let shown = v.to_string();
            Output::new(
                json!({"rep": rep.label(), "q": a.q, "m": m, "value": shown, "num": v.numerator.to_string(), "den_exp": v.denom_exp}),
                ask_text(&v.numerator, v.denom_exp, &shown),
            )
        }
        RepCmd::Hist { a } => {
            let rep = load_rep(&a.rep)?;
            let h = rank_histogram(&rep, &ctx.field(a.q)?, budget)?;
            let mut table = String::from("rank  count\n");
            for (i, c) in h.counts.iter().enumerate() {
                table.push_str(&format!("{i:>4}  {c}\n"));
            }
            Output::new(json!({"rep": rep.label(), "q": a.q, "counts": h.counts}), table)
        }
        RepCmd::Dual { rep } => rep_output(&load_rep(&rep)?.knuth_dual()),
        RepCmd::Hull { rep } => rep_output(&load_rep(&rep)?.alternating_hull()),
        RepCmd::Power { rep, m } => rep_output(&load_rep(&rep)?.mth_power(m)),
        RepCmd::Sum { rep } => rep_output(&load_rep(&rep[0])?.direct_sum(&load_rep(&rep[1])?)),
        RepCmd::Saturate { rep } => {
            let rep = load_rep(&rep)?;
            let (sat, index) = rep.saturate();
            let v = json!({"index": index.to_string(), "rep": rep_to_value(&sat)});
            let text = format!("index {index}\n{}", serde_json::to_string_pretty(&rep_to_value(&sat)).expect("json"));
            Output::new(v, text)
        }
        RepCmd::Check { rep } => {
            let rep = load_rep(&rep)?;
            let (l, d, e) = rep.shape();
            let (_, index) = rep.saturate();
            let v = json!({
                "rep": rep.label(), "l": l, "d": d, "e": e,
                "rational_rank": rep.rational_rank(),
                "alternating": rep.is_alternating(),
                "immersive": rep.is_immersive(),
                "saturation_index": index.to_string(),
            });
            let text = format!(
                "{}: l={l} d={d} e={e}\nrational rank {}\nalternating {}\nimmersive {}\nsaturation index {index}",
                rep.label(),
                rep.rational_rank(),
                rep.is_alternating(),
                rep.is_immersive()
            );
            Output::new(v, text)
        }
    })
}

fn group_summary(g: &GroupTable, rep: &ModuleRep, q: u64, structural: Option<BigInt>, budget: &Budget) -> Result<Output> {
    let naive = match class_count_naive(g, budget) {
        Ok(k) => Some(k),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    let mut text = format!("{} group of {} at q={q}\norder {}\n", g.kind(), rep.label(), g.order());
    if let Some(k) = naive {
        text.push_str(&format!("classes (naive) {k}\n"));
    }
    if let Some(k) = &structural {
        text.push_str(&format!("classes (structural) {k}\n"));
    }
    Ok(Output::new(
        json!({
            "kind": g.kind().to_string(), "rep": rep.label(), "q": q, "order": g.order(),
            "classes_naive": naive, "classes_structural": structural.map(|k| k.to_string()),
        }),
        text,
    ))
}

fn cmd_group(ctx: &Ctx, cmd: GroupCmd) -> Result<Output> {
    let budget = &ctx.budget;
    match cmd {
        GroupCmd::Baer { a } => {
            let (rep, field) = (load_rep(&a.rep)?, ctx.field(a.q)?);
            let g = baer_group(&rep, &field, budget)?;
            let s = class_count_structural(&rep, &field, StructuralKind::Baer, budget)?;
            group_summary(&g, &rep, a.q, Some(s), budget)
        }
        GroupCmd::Heisenberg { a } => {
            let (rep, field) = (load_rep(&a.rep)?, ctx.field(a.q)?);
            let g = heisenberg_group(&rep, &field, budget)?;
            let s = class_count_structural(&rep, &field, StructuralKind::Heisenberg, budget)?;
            group_summary(&g, &rep, a.q, Some(s), budget)
        }
        GroupCmd::Mtheta { a } => {
            let (rep, field) = (load_rep(&a.rep)?, ctx.field(a.q)?);
            let g = mtheta_group(&rep, &field, budget)?;
            let orbits = mtheta_orbit_count(&rep, &field, OrbitMode::Bfs, budget)?;
            Ok(Output::new(
                json!({"kind": g.kind().to_string(), "rep": rep.label(), "q": a.q, "order": g.order(), "orbits": orbits.to_string()}),
                format!("module group of {} at q={}\norder {}\norbits on pairs {orbits}", rep.label(), a.q, g.order()),
            ))
        }
        GroupCmd::Classes { a, kind, mode } => {
            let (rep, field) = (load_rep(&a.rep)?, ctx.field(a.q)?);
            let k: BigInt = match (kind, mode) {
                (GroupKindArg::Baer, ClassMode::Naive) => class_count_naive(&baer_group(&rep, &field, budget)?, budget)?.into(),
                (GroupKindArg::Heisenberg, ClassMode::Naive) => {
                    class_count_naive(&heisenberg_group(&rep, &field, budget)?, budget)?.into()
                }
                (GroupKindArg::Baer, ClassMode::Structural) => {
                    class_count_structural(&rep, &field, StructuralKind::Baer, budget)?
                }
                (GroupKindArg::Heisenberg, ClassMode::Structural) => {
                    class_count_structural(&rep, &field, StructuralKind::Heisenberg, budget)?
                }
            };
            let mode_name = if mode == ClassMode::Naive { "naive" } else { "structural" };
            Ok(Output::new(
                json!({"rep": rep.label(), "q": a.q, "mode": mode_name, "classes": k.to_string()}),
                k.to_string(),
            ))
        }
        GroupCmd::Orbits { a, mode } => {
            let (rep, field) = (load_rep(&a.rep)?, ctx.field(a.q)?);
            let (m, name) = match mode {
                OrbitModeArg::Bfs => (OrbitMode::Bfs, "bfs"),
                OrbitModeArg::Burnside => (OrbitMode::Burnside, "burnside"),
                OrbitModeArg::Formula => (OrbitMode::Formula, "formula"),
            };
            let n = mtheta_orbit_count(&rep, &field, m, budget)?;
            Ok(Output::new(
                json!({"rep": rep.label(), "q": a.q, "mode": name, "orbits": n.to_string()}),
                n.to_string(),
            ))
        }
    }
}

fn cmd_lie(ctx: &Ctx, cmd: LieCmd) -> Result<Output> {
    let budget = &ctx.budget;
    match cmd {
        LieCmd::Validate { lie } => {
            let l = load_lie(&lie)?;
            let s: Vec<Vec<Vec<String>>> = structure_constants(&l)
                .iter()
                .map(|a| a.iter().map(|b| b.iter().map(|x| x.to_string()).collect()).collect())
                .collect();
            Ok(Output::new(
                json!({"n": l.n(), "dim": l.dim(), "abelian": l.is_abelian(), "structure_constants": s}),
                format!("valid: n={} dim={} abelian={}", l.n(), l.dim(), l.is_abelian()),
            ))
        }
        LieCmd::Iota { lie } => Ok(rep_output(&lie_inclusion_rep(&load_lie(&lie)?))),
        LieCmd::Ad { lie } => Ok(rep_output(&lie_adjoint_rep(&load_lie(&lie)?))),
        LieCmd::Exp { a } => {
            let (l, field) = (load_lie(&a.lie)?, ctx.field(a.q)?);
            let g = lie_exp_group(&l, &field, budget)?;
            if !g.order_matches() {
                warn("group order differs from q^dim");
            }
            Ok(Output::new(
                json!({"q": a.q, "order": g.order(), "expected_order": g.expected_order().map(|o| o.to_string())}),
                format!("order {}", g.order()),
            ))
        }
        LieCmd::Orbits { a } => {
            let (l, field) = (load_lie(&a.lie)?, ctx.field(a.q)?);
            let g = lie_exp_group(&l, &field, budget)?;
            let n = natural_orbit_count(&g, budget)?;
            let iota = lie_inclusion_rep(&l);
            if !iota.is_immersive() {
                warn("inclusion representation is not immersive");
            }
            let v = ask_from_histogram(&rank_histogram(&iota, &field, budget)?, 1);
            Ok(Output::new(
                json!({"q": a.q, "orbits": n, "ask_iota": v.to_string()}),
                format!("orbits {n}\nask(iota) {v}"),
            ))
        }
        LieCmd::Classes { a } => {
            let (l, field) = (load_lie(&a.lie)?, ctx.field(a.q)?);
            let g = lie_exp_group(&l, &field, budget)?;
            let k = class_count_naive(&g, budget)?;
            let v = ask_from_histogram(&rank_histogram(&lie_adjoint_rep(&l), &field, budget)?, 1);
            Ok(Output::new(
                json!({"q": a.q, "classes": k, "ask_ad": v.to_string()}),
                format!("classes {k}\nask(ad) {v}"),
            ))
        }
    }
}

fn cmd_graph(ctx: &Ctx, cmd: GraphCmd) -> Result<Output> {
    let budget = &ctx.budget;
    Ok(match cmd {
        GraphCmd::Rep { graph } => rep_output(&graph_rep(&load_graph(&graph)?)),
        GraphCmd::Vmax { graph, q } => {
            let g = load_graph(&graph)?;
            let v = graph_vmax(&g, &ctx.field(q)?, budget)?;
            Output::new(json!({"graph": g.label(), "q": q, "vmax": v}), v.to_string())
        }
        GraphCmd::LimitCheck { graph, q, m } => {
            let g = load_graph(&graph)?;
            let lc = limit_congruence_check(&g, &ctx.field(q)?, m, budget)?;
            let modulus = num_traits::Pow::pow(BigInt::from(q), m as u32);
            let residue = ((&lc.vmax % &modulus) + &modulus) % &modulus;
            let verdict = if lc.holds { "PASS" } else { "FAIL" };
            let exp = lc.congruence_exp.map_or("inf".to_string(), |k| k.to_string());
            let text = if lc.holds {
                format!(
                    "{verdict}, both ≡ {residue} mod {modulus} (q^l ask = {}, V_max = {}, congruence exponent {exp})",
                    lc.scaled_ask, lc.vmax
                )
            } else {
                format!(
                    "{verdict}: q^l ask = {} and V_max = {} agree only mod q^{exp}, not mod {modulus}",
                    lc.scaled_ask, lc.vmax
                )
            };
            Output::new(serde_json::to_value(&lc)?, text).failing(!lc.holds)
        }
    })
}

fn cmd_pipeline(ctx: &Ctx, cmd: PipelineCmd) -> Result<Output> {
    let budget = &ctx.budget;
    match cmd {
        PipelineCmd::Hm { decomposition, m, q } => {
            if m == 0 {
                return Err(Error::Invalid("m must be at least 1".into()));
            }
            let d = BBDecomposition::from_json(&read(&decomposition)?)?;
            let v = hm_combination(&d, m, &ctx.field(q)?, budget)?;
            Ok(Output::new(json!({"m": m, "q": q, "value": v.to_string()}), v.to_string()))
        }
        PipelineCmd::TheoremA { scheme, decomposition, n, q } => {
            let y = AffineScheme::from_json(&read(&scheme)?)?;
            let d = BBDecomposition::from_json(&read(&decomposition)?)?;
            let fields = q.iter().map(|&q| ctx.field(q)).collect::<Result<Vec<_>>>()?;
            Ok(Output::report(theorem_a_check(&y, &d, n, &fields, budget)?))
        }
    }
}

fn run(cli: Cli) -> Result<Output> {
    let mut budget = Budget::with_points(cli.budget);
    if let Some(g) = cli.group_budget {
        budget.group_order = g;
    }
    let ctx = Ctx { budget };
    match cli.command {
        Command::Field(FieldCmd::Info { q }) => {
            let k = ctx.field(q)?;
            let pp = k.prime_power();
            let text = format!(
                "F_{q}: p={} f={} modulus (constant term first) {:?} primitive element {}",
                pp.p(),
                pp.f(),
                k.modulus(),
                k.primitive_element()
            );
            Ok(Output::new(
                json!({"q": q, "p": pp.p(), "f": pp.f(), "modulus": k.modulus(), "primitive_element": k.primitive_element()}),
                text,
            ))
        }
        Command::Rep(c) => cmd_rep(&ctx, c),
        Command::Group(c) => cmd_group(&ctx, c),
        Command::Lie(c) => cmd_lie(&ctx, c),
        Command::Graph(c) => cmd_graph(&ctx, c),
        Command::Scheme(SchemeCmd::Count { scheme, q }) => {
            let y = AffineScheme::from_json(&read(&scheme)?)?;
            let n = affine_count(&y, &ctx.field(q)?, &ctx.budget)?;
            Ok(Output::new(json!({"q": q, "count": n}), n.to_string()))
        }
        Command::Pipeline(c) => cmd_pipeline(&ctx, c),
        Command::Verify { config } => {
            let config = match config {
                Some(path) => BatteryConfig::from_json(&read(&path)?)?,
                None => BatteryConfig::default_suite(),
            };
            Ok(Output::report(verify_battery(&config, &ctx.budget)?))
        }
        Command::Fit { samples, lo, hi } => {
            let file = fs::File::open(&samples).map_err(|e| Error::Invalid(format!("{}: {e}", samples.display())))?;
            let data = read_samples(file)?;
            Ok(match laurent_fit(&data, lo, hi)? {
                Some(f) => Output::new(json!({"fit": serde_json::to_value(&f)?, "display": f.to_string()}), f.to_string()),
                None => Output::new(json!({"fit": Value::Null}), "none"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (format, out) = (cli.format, cli.out.clone());
    match run(cli) {
        Ok(output) => {
            if let Err(e) = output.emit(format, out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if output.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
