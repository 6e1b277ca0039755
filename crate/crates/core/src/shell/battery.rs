use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::pipeline::{budget_or_fail, mth_power_identities, theorem_a_check, BBDecomposition};
use super::report::{CheckRecord, VerificationReport};
use super::scheme::{affine_count, AffineScheme, Term};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::exactcore::{FiniteField, PrimePower};
use crate::graphloci::{graph_rep, limit_congruence_check, Graph};
use crate::grouplab::{
    baer_group, class_count_naive, general_linear_group, heisenberg_group, lie_adjoint_rep,
    lie_exp_group, lie_from_json, lie_inclusion_rep, mtheta_orbit_count, natural_orbit_count,
    unitriangular_group, LieData, OrbitMode,
};
use crate::modrep::{ask, ask_from_histogram, ask_naive, q_pow, rank_histogram, rep_from_value, rep_to_value, ModuleRep};

/// The configuration shipped with the crate.
pub const DEFAULT_CONFIG: &str = include_str!("../../configs/default.json");

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    #[serde(default)]
    pub q: Vec<u64>,
    #[serde(default = "one")]
    pub m_max: usize,
    #[serde(default)]
    pub reps: Vec<RepEntry>,
    /// Adds every labelled graph on at most this many vertices.
    #[serde(default)]
    pub graphs_up_to: Option<usize>,
    #[serde(default)]
    pub graphs: Vec<Graph>,
    #[serde(default)]
    pub lie: Vec<LieEntry>,
    #[serde(default)]
    pub unitriangular: Vec<usize>,
    #[serde(default)]
    pub general_linear: Vec<usize>,
    #[serde(default)]
    pub pipelines: Vec<PipelineEntry>,
}

fn one() -> usize {
    1
}

/// A representation given inline or by a builtin name, with optional claims
/// that become checks of their own.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected_ask: Vec<ExpectedAsk>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternating: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub immersive: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedAsk {
    pub q: u64,
    #[serde(with = "crate::num_json")]
    pub num: BigInt,
    pub den_exp: u32,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineEntry {
    pub name: String,
    pub scheme: AffineScheme,
    pub decomposition: BBDecomposition,
    pub n: usize,
}

impl BatteryConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn default_suite() -> Self {
        Self::from_json(DEFAULT_CONFIG).expect("shipped config parses")
    }
}

pub fn builtin_rep(name: &str) -> Result<ModuleRep> {
    let id1 = ModuleRep::id1();
    Ok(match name {
        "id1" => id1.named("id1"),
        "hull_id1" => id1.alternating_hull().named("hull_id1"),
        "id1_sum" => id1.direct_sum(&id1).named("id1_sum"),
        "hull_id1_sum" => id1.direct_sum(&id1).alternating_hull().named("hull_id1_sum"),
        "zero" => ModuleRep::zero(1, 1, 1).named("zero"),
        _ => return Err(Error::Invalid(format!("unknown builtin representation {name:?}"))),
    })
}

pub fn builtin_lie(name: &str) -> Result<LieData> {
    match name {
        "n2" => LieData::full_upper(2),
        "n3" => LieData::full_upper(3),
        "n4" => LieData::full_upper(4),
        "n4_abelian" => LieData::from_units(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]),
        _ => Err(Error::Invalid(format!("unknown builtin Lie algebra {name:?}"))),
    }
}

fn resolve_rep(entry: &RepEntry) -> Result<ModuleRep> {
    match (&entry.builtin, &entry.rep) {
        (Some(b), None) => builtin_rep(b),
        (None, Some(v)) => rep_from_value(v),
        _ => Err(Error::Invalid("a rep entry needs exactly one of builtin, rep".into())),
    }
}

fn resolve_lie(entry: &LieEntry) -> Result<(String, LieData)> {
    let lie = match (&entry.builtin, &entry.lie) {
        (Some(b), None) => builtin_lie(b)?,
        (None, Some(v)) => lie_from_json(&v.to_string())?,
        _ => return Err(Error::Invalid("a lie entry needs exactly one of builtin, lie".into())),
    };
    let name = entry
        .name
        .clone()
        .or_else(|| entry.builtin.clone())
        .unwrap_or_else(|| format!("lie{}", lie.n()));
    Ok((name, lie))
}

type Task<'a> = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync + 'a>;

/// Runs `f`, turning budget errors into skips and other errors into failures.
fn guarded(rec: CheckRecord, f: impl FnOnce(CheckRecord) -> Result<CheckRecord>) -> CheckRecord {
    let start = Instant::now();
    let template = rec.clone();
    match f(rec) {
        Ok(r) => r.timed(start),
        Err(err) => budget_or_fail(template, err).timed(start),
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// The scheme `{(a, x) : x (a theta) = 0}` whose point count is `q^l ask`.
pub fn kernel_scheme(theta: &ModuleRep) -> AffineScheme {
    let (l, d, e) = theta.shape();
    let polys = (0..e)
        .map(|j| {
            let mut terms = Vec::new();
            for k in 0..l {
                for i in 0..d {
                    let c = theta.entry(k, i, j);
                    if c.sign() != num_bigint::Sign::NoSign {
                        let mut exps = vec![0; l + d];
                        exps[k] = 1;
                        exps[l + i] = 1;
                        terms.push(Term { coeff: c.clone(), exps });
                    }
                }
            }
            terms
        })
        .collect();
    AffineScheme { vars: l + d, polys }
}

fn rep_static_checks(theta: &ModuleRep, entry: Option<&RepEntry>, m_max: usize) -> Vec<CheckRecord> {
    let name = theta.label();
    let params = format!("theta={name}");
    let repro = json!({"rep": rep_to_value(theta)});
    let mut out = Vec::new();
    let fail_repro = |r: CheckRecord| if r.passed() { r } else { r.with_repro(repro.clone()) };
    out.push(fail_repro(CheckRecord::new("dual_involution", &params).boolean(
        theta.knuth_dual().knuth_dual().same_tensor(theta),
        "",
    )));
    out.push(fail_repro(
        CheckRecord::new("hull_alternating", &params).boolean(theta.alternating_hull().is_alternating(), ""),
    ));
    let immersive = theta.is_immersive();
    for m in 2..=m_max {
        out.push(fail_repro(
            CheckRecord::new("power_preserves_immersive", format!("{params} m={m}"))
                .boolean(theta.mth_power(m).is_immersive() == immersive, format!("immersive={immersive}")),
        ));
    }
    let (sat, index) = theta.saturate();
    out.push(fail_repro(CheckRecord::new("saturation_rank", &params).boolean(
        sat.rational_rank() == theta.rational_rank(),
        format!("index={index}"),
    )));
    if let Some(entry) = entry {
        if let Some(claim) = entry.alternating {
            out.push(fail_repro(
                CheckRecord::new("claimed_alternating", &params)
                    .boolean(theta.is_alternating() == claim, format!("claimed {claim}")),
            ));
        }
        if let Some(claim) = entry.immersive {
            out.push(fail_repro(
                CheckRecord::new("claimed_immersive", &params).boolean(immersive == claim, format!("claimed {claim}")),
            ));
        }
    }
    out
}

fn rep_field_checks(
    theta: &ModuleRep,
    entry: Option<&RepEntry>,
    field: &FiniteField,
    m_max: usize,
    budget: &Budget,
) -> Vec<CheckRecord> {
    let q = field.prime_power();
    let (l, d, e) = theta.shape();
    let name = theta.label();
    let params = format!("theta={name} q={q}");
    let mut out = Vec::new();
    let rec = |check: &str, params: &str| CheckRecord::new(check, params).at_q(q);

    let hist = match rank_histogram(theta, field, budget) {
        Ok(h) => h,
        Err(err) => {
            out.push(budget_or_fail(rec("rank_histogram_total", &params), err));
            return out;
        }
    };
    out.push(rec("rank_histogram_total", &params).equality(&rat(hist.total()), &q_pow(q, l as i64)));
    let ask1 = ask_from_histogram(&hist, 1);

    out.push(guarded(rec("kernel_scheme_count", &params), |r| {
        let n = affine_count(&kernel_scheme(theta), field, budget)?;
        Ok(r.equality(&rat(n), &rat(ask1.numerator.clone())))
    }));

    for m in 1..=m_max {
        let p = format!("theta={name} m={m} q={q}");
        out.push(guarded(rec("histogram_power_formula", &p), |r| {
            let naive = ask_naive(&theta.mth_power(m), field, budget)?;
            Ok(r.equality(&ask_from_histogram(&hist, m).to_rational(), &naive.to_rational()))
        }));
    }

    let formula = ask1.scale_q_pow(e as i64);
    out.push(guarded(rec("orbit_count_union_find", &params), |r| {
        let bfs = mtheta_orbit_count(theta, field, OrbitMode::Bfs, budget)?;
        Ok(r.equality(&rat(bfs), &formula))
    }));
    out.push(guarded(rec("orbit_count_burnside", &params), |r| {
        let b = mtheta_orbit_count(theta, field, OrbitMode::Burnside, budget)?;
        Ok(r.equality(&rat(b), &formula))
    }));

    out.push(guarded(rec("square_vs_dual_hull", &params), |r| {
        let rhs = ask(&theta.knuth_dual().alternating_hull(), field, budget)?.scale_q_pow(d as i64 - e as i64);
        Ok(r.equality(&ask_from_histogram(&hist, 2).to_rational(), &rhs))
    }));

    let mut baer_inputs = vec![("hull", theta.alternating_hull())];
    if theta.is_alternating() {
        baer_inputs.push(("self", theta.clone()));
    }
    for (tag, alt) in baer_inputs {
        let p = format!("theta={name} form={tag} q={q}");
        out.push(guarded(rec("baer_class_number", &p), |r| {
            let order = crate::budget::pow_saturating(field.q(), alt.l() + alt.e());
            budget.check_group("baer class count", order)?;
            let k = class_count_naive(&baer_group(&alt, field, budget)?, budget)?;
            let rhs = ask(&alt, field, budget)?.scale_q_pow(alt.e() as i64);
            Ok(r.equality(&rat(k), &rhs))
        }));
    }

    out.push(guarded(rec("heisenberg_class_number", &params), |r| {
        budget.check_group("heisenberg class count", crate::budget::pow_saturating(field.q(), l + d + e))?;
        let k = class_count_naive(&heisenberg_group(theta, field, budget)?, budget)?;
        let rhs = crate::modrep::ask_power(&theta.knuth_dual(), 2, field, budget)?
            .scale_q_pow(l as i64 + e as i64 - d as i64);
        Ok(r.equality(&rat(k), &rhs))
    }));

    let (sat, index) = theta.saturate();
    if BigInt::from(field.p()).gcd(&index).is_one() {
        for m in 1..=m_max {
            let p = format!("theta={name} m={m} q={q}");
            out.push(guarded(rec("saturation_invariance", &p), |r| {
                let rhs = ask_from_histogram(&rank_histogram(&sat, field, budget)?, m);
                Ok(r.equality(&ask_from_histogram(&hist, m).to_rational(), &rhs.to_rational()))
            }));
        }
    }

    for m in 1..=m_max {
        out.extend(mth_power_identities(theta, m, field, budget).records);
    }

    if let Some(entry) = entry {
        for exp in entry.expected_ask.iter().filter(|x| x.q == q.q()) {
            let claimed = BigRational::new(exp.num.clone(), num_traits::Pow::pow(BigInt::from(q.q()), exp.den_exp));
            out.push(rec("expected_ask", &params).equality(&ask1.to_rational(), &claimed));
        }
    }

    let repro = json!({"rep": rep_to_value(theta), "q": q.q(), "m_max": m_max});
    out.into_iter()
        .map(|r| if r.passed() || r.repro.is_some() { r } else { r.with_repro(repro.clone()) })
        .collect()
}

fn direct_sum_checks(
    a: &ModuleRep,
    b: &ModuleRep,
    field: &FiniteField,
    m_max: usize,
    budget: &Budget,
) -> Vec<CheckRecord> {
    let q = field.prime_power();
    let sum = a.direct_sum(b);
    let hists = (|| Ok::<_, Error>((rank_histogram(a, field, budget)?, rank_histogram(b, field, budget)?, rank_histogram(&sum, field, budget)?)))();
    let repro = json!({"left": rep_to_value(a), "right": rep_to_value(b), "q": q.q()});
    (1..=m_max)
        .map(|m| {
            let p = format!("left={} right={} m={m} q={q}", a.label(), b.label());
            let r = CheckRecord::new("direct_sum_multiplicativity", p).at_q(q);
            let r = match &hists {
                Ok((ha, hb, hs)) => r.equality(
                    &ask_from_histogram(hs, m).to_rational(),
                    &(ask_from_histogram(ha, m).to_rational() * ask_from_histogram(hb, m).to_rational()),
                ),
                Err(err) => {
                    if err.is_budget() {
                        r.skipped(err.to_string())
                    } else {
                        r.failed(err.to_string())
                    }
                }
            };
            if r.passed() {
                r
            } else {
                r.with_repro(repro.clone())
            }
        })
        .collect()
}

fn graph_checks(g: &Graph, field: &FiniteField, m_max: usize, budget: &Budget) -> Vec<CheckRecord> {
    let q = field.prime_power();
    let mut out = Vec::new();
    for m in 1..=m_max.max(1) {
        let p = format!("graph={} m={m} q={q}", g.label());
        out.push(guarded(CheckRecord::new("limit_congruence", p).at_q(q), |r| {
            let lc = limit_congruence_check(g, field, m, budget)?;
            Ok(r.congruence(&rat(lc.scaled_ask), &rat(lc.vmax), m as i64)
                .with_repro(json!({"graph": g, "q": q.q(), "m": m})))
        }));
    }
    out.into_iter().map(|mut r| {
        if r.passed() {
            r.repro = None;
        }
        r
    }).collect()
}

fn lie_field_checks(name: &str, lie: &LieData, field: &FiniteField, budget: &Budget) -> Vec<CheckRecord> {
    let q = field.prime_power();
    let params = format!("lie={name} q={q}");
    let rec = |check: &str| CheckRecord::new(check, &params).at_q(q);
    let group = match lie_exp_group(lie, field, budget) {
        Ok(g) => g,
        Err(err) => {
            let note = err.to_string();
            let skip = err.is_budget() || matches!(err, Error::CharTooSmall { .. });
            return ["lie_exp_order", "lie_orbits_vs_inclusion_ask", "lie_classes_vs_adjoint_ask"]
                .iter()
                .map(|c| if skip { rec(c).skipped(&note) } else { rec(c).failed(&note) })
                .collect();
        }
    };
    let mut out = vec![rec("lie_exp_order").equality(
        &rat(group.order()),
        &rat(group.expected_order().map(BigInt::from).unwrap_or_default()),
    )];
    out.push(guarded(rec("lie_orbits_vs_inclusion_ask"), |r| {
        let orbits = natural_orbit_count(&group, budget)?;
        Ok(r.equality(&rat(orbits), &ask(&lie_inclusion_rep(lie), field, budget)?.to_rational()))
    }));
    out.push(guarded(rec("lie_classes_vs_adjoint_ask"), |r| {
        let k = class_count_naive(&group, budget)?;
        Ok(r.equality(&rat(k), &ask(&lie_adjoint_rep(lie), field, budget)?.to_rational()))
    }));
    out
}

fn intro_checks(config: &BatteryConfig, field: &FiniteField, budget: &Budget) -> Vec<CheckRecord> {
    let q = field.prime_power();
    let mut out = Vec::new();
    for &n in &config.unitriangular {
        out.push(guarded(CheckRecord::new("unitriangular_orbits", format!("n={n} q={q}")).at_q(q), |r| {
            let g = unitriangular_group(n, field, budget)?;
            let count = natural_orbit_count(&g, budget)?;
            let qq = q.q() as i64;
            Ok(r.equality(&rat(count), &rat(n as i64 * qq - n as i64 + 1)))
        }));
    }
    for &n in &config.general_linear {
        out.push(guarded(CheckRecord::new("general_linear_orbits", format!("n={n} q={q}")).at_q(q), |r| {
            let g = general_linear_group(n, field, budget)?;
            let count = natural_orbit_count(&g, budget)?;
            Ok(r.equality(&rat(count), &rat(if n == 0 { 1 } else { 2 })))
        }));
    }
    out
}

/// Runs every registered identity over the configured inputs. Individual
/// failures become report rows; only malformed configuration is an error.
pub fn verify_battery(config: &BatteryConfig, budget: &Budget) -> Result<VerificationReport> {
    let mut fields = Vec::new();
    for &q in &config.q {
        fields.push(FiniteField::with_budget(PrimePower::from_q(q)?, budget)?);
    }
    let mut setup = Vec::new();

    let mut reps: Vec<(ModuleRep, Option<&RepEntry>)> = Vec::new();
    for entry in &config.reps {
        match resolve_rep(entry) {
            Ok(r) => reps.push((r, Some(entry))),
            Err(err) => setup.push(CheckRecord::new("config_rep", format!("{entry:?}")).failed(err.to_string())),
        }
    }
    let pair_count = reps.len();

    let mut graphs: Vec<Graph> = Vec::new();
    if let Some(nmax) = config.graphs_up_to {
        for n in 0..=nmax {
            graphs.extend(Graph::all_labelled(n));
        }
    }
    for g in &config.graphs {
        if !graphs.contains(g) {
            graphs.push(g.clone());
        }
    }
    for g in &graphs {
        reps.push((graph_rep(g).named(format!("gamma({})", g.label())), None));
    }

    let mut lies = Vec::new();
    for entry in &config.lie {
        match resolve_lie(entry) {
            Ok((name, lie)) => {
                reps.push((lie_inclusion_rep(&lie).named(format!("iota({name})")), None));
                reps.push((lie_adjoint_rep(&lie).named(format!("ad({name})")), None));
                lies.push((name, lie));
            }
            Err(err) => setup.push(CheckRecord::new("config_lie", format!("{entry:?}")).failed(err.to_string())),
        }
    }

    let m_max = config.m_max;
    let mut tasks: Vec<Task> = Vec::new();
    for (theta, entry) in &reps {
        tasks.push(Box::new(move || rep_static_checks(theta, *entry, m_max)));
        for field in &fields {
            tasks.push(Box::new(move || rep_field_checks(theta, *entry, field, m_max, budget)));
        }
    }
    for i in 0..pair_count {
        for j in i..pair_count {
            for field in &fields {
                let (a, b) = (&reps[i].0, &reps[j].0);
                tasks.push(Box::new(move || direct_sum_checks(a, b, field, m_max, budget)));
            }
        }
    }
    for g in &graphs {
        for field in &fields {
            tasks.push(Box::new(move || graph_checks(g, field, m_max, budget)));
        }
    }
    for (name, lie) in &lies {
        for field in &fields {
            tasks.push(Box::new(move || lie_field_checks(name, lie, field, budget)));
        }
    }
    for field in &fields {
        tasks.push(Box::new(move || intro_checks(config, field, budget)));
    }
    let fields_ref = &fields;
    for p in &config.pipelines {
        tasks.push(Box::new(move || {
            let params = format!("pipeline={} n={}", p.name, p.n);
            match theorem_a_check(&p.scheme, &p.decomposition, p.n, fields_ref, budget) {
                Ok(report) => report
                    .records
                    .into_iter()
                    .map(|mut r| {
                        r.params = format!("pipeline={} {}", p.name, r.params);
                        r
                    })
                    .collect(),
                Err(err) => vec![budget_or_fail(CheckRecord::new("decomposition_equation", params), err)],
            }
        }));
    }

    let mut records: Vec<CheckRecord> = tasks.par_iter().flat_map_iter(|t| t()).collect();
    records.extend(setup);
    Ok(VerificationReport::new(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell::report::Status;

    #[test]
    fn empty_config_gives_empty_report() {
        let report = verify_battery(&BatteryConfig::default(), &Budget::default()).unwrap();
        assert!(report.records.is_empty());
        assert!(report.passed());
        let parsed = BatteryConfig::from_json("{}").unwrap();
        assert!(verify_battery(&parsed, &Budget::default()).unwrap().records.is_empty());
    }

    #[test]
    fn shipped_config_parses() {
        let c = BatteryConfig::default_suite();
        assert_eq!(c.q, vec![2, 3, 4, 5, 7, 9]);
        assert_eq!(c.m_max, 3);
        for entry in &c.reps {
            resolve_rep(entry).unwrap();
        }
        for entry in &c.lie {
            resolve_lie(entry).unwrap();
        }
    }

    #[test]
    fn small_battery_passes() {
        let config = BatteryConfig::from_json(
            r#"{"q": [2, 3], "m_max": 2, "reps": [{"builtin": "id1", "expected_ask": [{"q": 3, "num": 5, "den_exp": 1}]}],
                "graphs": [{"n": 2, "edges": [[0, 1]]}], "lie": [{"builtin": "n3"}], "unitriangular": [2], "general_linear": [2]}"#,
        )
        .unwrap();
        let report = verify_battery(&config, &Budget::default()).unwrap();
        assert!(report.passed(), "{}", report.to_table());
        assert!(report.count(Status::Pass) > 20);
        let names: Vec<&str> = report.records.iter().map(|r| r.check.as_str()).collect();
        for expected in ["expected_ask", "kernel_scheme_count", "heisenberg_class_number", "limit_congruence", "lie_exp_order"] {
            assert!(names.contains(&expected), "{expected} missing");
        }
        let mut sorted = report.records.clone();
        sorted.sort_by(|a, b| (&a.check, &a.params).cmp(&(&b.check, &b.params)));
        assert_eq!(
            sorted.iter().map(|r| (&r.check, &r.params)).collect::<Vec<_>>(),
            report.records.iter().map(|r| (&r.check, &r.params)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn corrupted_claims_fail() {
        let config = BatteryConfig::from_json(
            r#"{"q": [3], "reps": [{"rep": {"name": "bad", "l": 1, "d": 1, "e": 1, "tensor": [[[1]]]},
                "expected_ask": [{"q": 3, "num": 6, "den_exp": 1}], "alternating": true}]}"#,
        )
        .unwrap();
        let report = verify_battery(&config, &Budget::default()).unwrap();
        let failed: Vec<&str> = report.failures().map(|r| r.check.as_str()).collect();
        assert_eq!(failed, vec!["claimed_alternating", "expected_ask"]);
        assert!(report.failures().all(|r| r.repro.is_some()));
    }

    #[test]
    fn kernel_scheme_counts_match() {
        let k = crate::exactcore::make_field(3, 1).unwrap();
        let theta = ModuleRep::id1().alternating_hull();
        let n = affine_count(&kernel_scheme(&theta), &k, &Budget::default()).unwrap();
        assert_eq!(n, 33);
    }
}
