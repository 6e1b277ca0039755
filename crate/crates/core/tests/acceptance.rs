mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use askcount::exactcore::{FiniteField, PrimePower};
use askcount::graphloci::{graph_rep, limit_congruence_check, Graph};
use askcount::grouplab::{
    baer_group, class_count_naive, general_linear_group, heisenberg_group, lie_adjoint_rep,
    lie_exp_group, lie_inclusion_rep, mtheta_orbit_count, natural_orbit_count, unitriangular_group,
    LieData, OrbitMode,
};
use askcount::modrep::{ask, ask_from_histogram, ask_naive, ask_power, q_pow, rank_histogram, ModuleRep};
use askcount::qseries::{laurent_fit, LaurentPoly};
use askcount::shell::{mth_power_identities, theorem_a_check, AffineScheme, BBDecomposition, Status};
use askcount::Budget;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Pow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn field(q: u64) -> FiniteField {
    FiniteField::new(PrimePower::from_q(q).unwrap()).unwrap()
}

fn budget() -> Budget {
    Budget::default()
}

fn n3() -> LieData {
    LieData::full_upper(3).unwrap()
}

fn id1_sum() -> ModuleRep {
    ModuleRep::id1().direct_sum(&ModuleRep::id1()).named("id1_sum")
}

fn suite() -> Vec<ModuleRep> {
    vec![
        ModuleRep::id1(),
        ModuleRep::id1().alternating_hull().named("hull_id1"),
        id1_sum(),
        graph_rep(&Graph::complete(2)),
        lie_inclusion_rep(&n3()),
        lie_adjoint_rep(&n3()),
    ]
}

fn unitriangular_orbits() {
    for n in [2usize, 3, 4] {
        for q in [2u64, 3, 5] {
            let g = unitriangular_group(n, &field(q), &budget()).unwrap();
            assert_eq!(g.order() as u64, q.pow((n * (n - 1) / 2) as u32));
            let orbits = natural_orbit_count(&g, &budget()).unwrap();
            assert_eq!(orbits, n as u64 * q - n as u64 + 1, "n={n} q={q}");
        }
    }
}

fn general_linear_orbits() {
    for q in [2u64, 3, 5] {
        let g = general_linear_group(2, &field(q), &budget()).unwrap();
        assert_eq!(g.order() as u64, (q * q - 1) * (q * q - q));
        assert_eq!(natural_orbit_count(&g, &budget()).unwrap(), 2, "q={q}");
    }
}

fn baer_class_numbers() {
    let reps = [
        ModuleRep::id1().alternating_hull(),
        id1_sum().alternating_hull(),
        lie_adjoint_rep(&n3()),
    ];
    for theta in &reps {
        assert!(theta.is_alternating());
        for q in [2u64, 3, 5] {
            let order = q.pow((theta.l() + theta.e()) as u32);
            assert!(order <= 5u64.pow(6));
            let g = baer_group(theta, &field(q), &budget()).unwrap();
            let k = class_count_naive(&g, &budget()).unwrap();
            let oracle = oracle_ask(theta, 1, q) * q_pow(PrimePower::from_q(q).unwrap(), theta.e() as i64);
            assert_eq!(int(k), oracle, "{} q={q}", theta.label());
            if order <= 729 {
                assert_eq!(commuting_pairs_classes(&g), k);
            }
        }
    }
}

fn heisenberg_class_numbers() {
    let reps = [ModuleRep::id1(), id1_sum(), graph_rep(&Graph::complete(2))];
    for theta in &reps {
        let (l, d, e) = theta.shape();
        for q in [2u64, 3] {
            let g = heisenberg_group(theta, &field(q), &budget()).unwrap();
            let k = class_count_naive(&g, &budget()).unwrap();
            let oracle = oracle_ask(&theta.knuth_dual(), 2, q)
                * q_pow(PrimePower::from_q(q).unwrap(), l as i64 - d as i64 + e as i64);
            assert_eq!(int(k), oracle, "{} q={q}", theta.label());
            if g.order() <= 729 {
                assert_eq!(commuting_pairs_classes(&g), k);
            }
        }
    }
    for q in [2u64, 3, 5] {
        let g = unitriangular_group(3, &field(q), &budget()).unwrap();
        let k = class_count_naive(&g, &budget()).unwrap();
        assert_eq!(k, q * q + q - 1);
        assert_eq!(commuting_pairs_classes(&g), k);
    }
}

fn histogram_power_formula() {
    for theta in suite() {
        for q in [2u64, 3, 4, 5] {
            let k = field(q);
            let h = rank_histogram(&theta, &k, &budget()).unwrap();
            for m in 1..=3 {
                let fast = ask_from_histogram(&h, m);
                let naive = ask_naive(&theta.mth_power(m), &k, &budget()).unwrap();
                assert_eq!(fast.to_rational(), naive.to_rational(), "{} q={q} m={m}", theta.label());
                if q != 4 {
                    assert_eq!(fast.to_rational(), oracle_ask(&theta, m, q));
                }
            }
        }
    }
}

fn limit_congruences() {
    for n in 0..=3 {
        for g in Graph::all_labelled(n) {
            let edges: Vec<(usize, usize)> = g.edges().collect();
            for q in [2u64, 3, 5] {
                let vmax = oracle_vmax(n, &edges, q);
                for m in 1..=4usize {
                    let lc = limit_congruence_check(&g, &field(q), m, &budget()).unwrap();
                    let scaled = oracle_ask_num(&graph_rep(&g), m, q);
                    assert_eq!(lc.scaled_ask, scaled);
                    assert_eq!(lc.vmax, BigInt::from(vmax));
                    let modulus = Pow::pow(BigInt::from(q), m as u32);
                    assert!((&scaled - BigInt::from(vmax)).is_multiple_of(&modulus), "{} q={q} m={m}", g.label());
                    assert!(lc.holds);
                }
            }
        }
    }
}

fn lie_n3() {
    let lie = n3();
    for q in [5u64, 7] {
        let k = field(q);
        let g = lie_exp_group(&lie, &k, &budget()).unwrap();
        assert_eq!(g.order() as u64, q.pow(3));
        let orbits = natural_orbit_count(&g, &budget()).unwrap();
        let classes = class_count_naive(&g, &budget()).unwrap();
        assert_eq!(orbits, 3 * q - 2);
        assert_eq!(classes, q * q + q - 1);
        assert_eq!(oracle_ask(&lie_inclusion_rep(&lie), 1, q), int(orbits));
        assert_eq!(oracle_ask(&lie_adjoint_rep(&lie), 1, q), int(classes));
        assert_eq!(ask(&lie_inclusion_rep(&lie), &k, &budget()).unwrap().to_rational(), int(orbits));
        assert_eq!(ask(&lie_adjoint_rep(&lie), &k, &budget()).unwrap().to_rational(), int(classes));
    }
}

fn power_identities() {
    for theta in [ModuleRep::id1(), graph_rep(&Graph::complete(1))] {
        for m in [1usize, 2] {
            for q in [2u64, 3] {
                let report = mth_power_identities(&theta, m, &field(q), &budget());
                assert!(report.records.len() >= 2);
                for r in &report.records {
                    assert_eq!(r.status, Status::Pass, "{} {}: {}", r.check, r.params, r.note);
                }
                let orbit = report.records.iter().find(|r| r.check == "power_orbit_identity").unwrap();
                let qq = q as i64;
                // q^{me} ask(m id1) = q^{m-1} (q^m + q - 1)
                let expect = int(qq.pow(m as u32 - 1) * (qq.pow(m as u32) + qq - 1));
                assert_eq!(orbit.lhs.as_ref().unwrap().to_rational(Some(PrimePower::from_q(q).unwrap())), expect);
                let class = report.records.iter().find(|r| r.check == "power_class_identity").unwrap();
                assert_eq!(
                    class.rhs.as_ref().unwrap().to_rational(Some(PrimePower::from_q(q).unwrap())),
                    oracle_ask(&theta, 2 * m, q)
                );
            }
        }
    }
}

fn saturation() {
    let double = ModuleRep::from_i64(1, 1, 1, &[&[&[2]]]).unwrap();
    let (sat, index) = double.saturate();
    assert_eq!(index, BigInt::from(2));
    assert!(sat.same_tensor(&ModuleRep::id1()));
    for q in [3u64, 5, 7, 9] {
        let k = field(q);
        assert_eq!(ask(&double, &k, &budget()).unwrap(), ask(&sat, &k, &budget()).unwrap(), "q={q}");
    }
    let k2 = field(2);
    assert_eq!(ask(&double, &k2, &budget()).unwrap().to_rational(), int(2));
    assert_eq!(ask(&sat, &k2, &budget()).unwrap().to_rational(), rat(3, 2));
}

fn pipeline_demo() {
    let d = BBDecomposition::new(
        vec![Graph::complete(1), Graph::empty(0)],
        vec![
            askcount::qseries::SRingElem::integer(1),
            askcount::qseries::SRingElem::integer(1),
        ],
    )
    .unwrap();
    let fields: Vec<FiniteField> = [2u64, 3, 5].iter().map(|&q| field(q)).collect();
    let report = theorem_a_check(&AffineScheme::affine_space(1), &d, 3, &fields, &budget()).unwrap();
    assert!(report.passed());
    for q in [2i64, 3, 5] {
        let params = format!("n=3 q={q}");
        let r = report
            .records
            .iter()
            .find(|r| r.check == "point_count_congruence" && r.params == params)
            .unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.congruence_exp.map_or(true, |k| k >= 3));
        // H_3(q) = q^3 + q, and q = H_3(q) mod q^3
        let h = askcount::shell::hm_combination(&d, 3, &field(q as u64), &budget()).unwrap();
        assert_eq!(h, int(q.pow(3) + q));
        assert!((BigInt::from(q.pow(3) + q) - BigInt::from(q)).is_multiple_of(&BigInt::from(q.pow(3))));
    }
}

fn orbit_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let qs = [2u64, 3, 4, 5];
    for i in 0..20 {
        let q = qs[i % qs.len()];
        let max = if q >= 4 { 2 } else { 3 };
        let theta = random_rep(&mut rng, max, 3);
        let k = field(q);
        let bfs = mtheta_orbit_count(&theta, &k, OrbitMode::Bfs, &budget()).unwrap();
        let burnside = mtheta_orbit_count(&theta, &k, OrbitMode::Burnside, &budget()).unwrap();
        let formula = ask(&theta, &k, &budget()).unwrap().scale_q_pow(theta.e() as i64);
        assert_eq!(bfs, burnside, "rep {i} q={q}");
        assert_eq!(int(bfs.clone()), formula, "rep {i} q={q}");
        if q != 4 {
            let oracle = oracle_ask(&theta, 1, q) * q_pow(PrimePower::from_q(q).unwrap(), theta.e() as i64);
            assert_eq!(int(bfs), oracle);
        }
    }
}

fn algebraic_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let theta = random_rep(&mut rng, 4, 5);
        assert!(theta.knuth_dual().knuth_dual().same_tensor(&theta));
    }
    for i in 0..20 {
        let a = random_rep(&mut rng, 2, 3);
        let b = random_rep(&mut rng, 2, 3);
        let q = if i % 2 == 0 { 2 } else { 3 };
        let k = field(q);
        let lhs = ask(&a.direct_sum(&b), &k, &budget()).unwrap().to_rational();
        let rhs = ask(&a, &k, &budget()).unwrap().to_rational() * ask(&b, &k, &budget()).unwrap().to_rational();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, oracle_ask(&a, 1, q) * oracle_ask(&b, 1, q));
    }
    for theta in suite() {
        for q in [2u64, 3, 4, 5] {
            let k = field(q);
            let lhs = ask_power(&theta, 2, &k, &budget()).unwrap().to_rational();
            let rhs = ask(&theta.knuth_dual().alternating_hull(), &k, &budget()).unwrap().to_rational()
                * q_pow(k.prime_power(), theta.d() as i64 - theta.e() as i64);
            assert_eq!(lhs, rhs, "{} q={q}", theta.label());
        }
    }
}

fn laurent_fitting() {
    let iota = lie_inclusion_rep(&n3());
    let mut samples = Vec::new();
    for q in [2u64, 3, 5, 7, 9, 11] {
        let k = field(q);
        let v = ask(&iota, &k, &budget()).unwrap().scale_q_pow(3);
        samples.push((k.prime_power(), v));
    }
    let fit = laurent_fit(&samples, 0, 4).unwrap().expect("polynomial data");
    assert_eq!(fit, LaurentPoly::from_i64(3, &[-2, 3]));
    assert_eq!(fit.to_string(), "3X^4 - 2X^3");

    let bad: Vec<(PrimePower, BigRational)> = [2u64, 3, 5, 7, 9, 11]
        .iter()
        .map(|&q| (PrimePower::from_q(q).unwrap(), int(Pow::pow(BigInt::from(2), q as u32))))
        .collect();
    assert_eq!(laurent_fit(&bad, 0, 4).unwrap(), None);
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn(),
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let s = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "unitriangular orbit counts nq-n+1", limit: s(10), run: unitriangular_orbits },
        Criterion { id: 2, name: "GL_2 has two orbits", limit: s(30), run: general_linear_orbits },
        Criterion { id: 3, name: "Baer class numbers q^e ask", limit: s(120), run: baer_class_numbers },
        Criterion { id: 4, name: "Heisenberg class numbers and k(U_3)", limit: s(120), run: heisenberg_class_numbers },
        Criterion { id: 5, name: "histogram formula for m-th powers", limit: s(60), run: histogram_power_formula },
        Criterion { id: 6, name: "graph limit congruences", limit: s(120), run: limit_congruences },
        Criterion { id: 7, name: "n3 orbits and classes via ask", limit: s(60), run: lie_n3 },
        Criterion { id: 8, name: "m-th power orbit and class identities", limit: s(60), run: power_identities },
        Criterion { id: 9, name: "saturation invariance away from the index", limit: s(60), run: saturation },
        Criterion { id: 10, name: "affine line point count congruence", limit: s(10), run: pipeline_demo },
        Criterion { id: 11, name: "orbit counting modes agree", limit: s(120), run: orbit_modes },
        Criterion { id: 12, name: "dual, sum and hull invariants", limit: s(120), run: algebraic_invariants },
        Criterion { id: 13, name: "Laurent fit recovery and rejection", limit: s(60), run: laurent_fitting },
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("    {info}")));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(c.run)).is_ok();
        let took = start.elapsed();
        let (verdict, extra) = match (ok, took <= c.limit) {
            (true, true) => ("PASS", String::new()),
            (true, false) => ("FAIL", format!(", over the {}s limit", c.limit.as_secs())),
            (false, _) => ("FAIL", String::new()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict}  {} ({:.2}s{extra})", c.id, c.name, took.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
