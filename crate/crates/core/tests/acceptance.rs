//! Acceptance criteria 1 to 10. Runs without the libtest harness so that every criterion
//! prints exactly one PASS or FAIL line; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use treeflow::gen::{random_instance, random_term_sum, random_tree, random_convex, random_two_separable, rng, InstanceParams};
use treeflow::ksubmod::{brute_force_min, build_network, for_each_point, minimize, scaled_value};
use treeflow::lconvex::{AnchoredPair, PairTerm, Side, TwoSeparable};
use treeflow::multiflow::{
    lovasz_cherkassky_value, multiway_cut, multiway_objective, solve_descent, solve_mcmf, solve_scaling, Edge,
    Instance, Problem, Solution,
};
use treeflow::oracles::{
    brute_force_l, brute_force_multiway, check_persistency, check_proximity, distance_to_optima,
    lconvex_minimizers, OracleBudget,
};
use treeflow::rational::{q, qf, Ext};

use rand::Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn claw() -> Instance {
    let e = |v| Edge { u: 0, v, cap: 1, cost: 1 };
    Instance { n: 4, terminals: vec![1, 2, 3], edges: vec![e(1), e(2), e(3)], demands: vec![1, 1, 1], problem: Problem::N }
}

fn triangle() -> Instance {
    let e = |u, v| Edge { u, v, cap: 1, cost: 1 };
    Instance {
        n: 3,
        terminals: vec![0, 1, 2],
        edges: vec![e(0, 1), e(1, 2), e(0, 2)],
        demands: vec![2, 2, 2],
        problem: Problem::N,
    }
}

/// 100 random feasible instances (n ≤ 7, c ≤ 3, a ≤ 3, k ≤ 4), then the two golden ones.
fn suite() -> Vec<Instance> {
    let mut r = rng(2024);
    let mut out = Vec::new();
    while out.len() < 100 {
        let nodes = r.gen_range(3..=7);
        let params = InstanceParams {
            nodes,
            terminals: r.gen_range(2..=nodes.min(4)),
            max_cap: 3,
            max_cost: 3,
            max_grid: 1_000_000,
        };
        out.push(random_instance(&mut r, &params));
    }
    out.push(claw());
    out.push(triangle());
    out
}

fn term_sums() -> Vec<treeflow::ksubmod::TermSum> {
    let mut r = rng(1);
    (0..500).map(|_| random_term_sum(&mut r, 5, 4, 8)).collect()
}

fn criterion_1() -> Outcome {
    for (idx, f) in term_sums().iter().enumerate() {
        let (_, fast) = minimize(f).map_err(|e| format!("sum {idx}: {e}"))?;
        let (_, slow) = brute_force_min(f).map_err(|e| format!("sum {idx}: {e}"))?;
        ensure(fast == slow, || format!("sum {idx}: minimize {fast} but brute force {slow}"))?;
    }
    Ok("500 random term sums, exact equality".into())
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let (mut exhaustive, mut sampled) = (0usize, 0usize);
    for (idx, f) in term_sums().iter().enumerate() {
        let rep = build_network(f).map_err(|e| format!("sum {idx}: {e}"))?;
        let inf = rep.net.inf_value();
        let mut bad = None;
        for_each_point(&f.arities, |x| {
            let cap = rep.cut_capacity(&rep.legal_cut(x));
            let ok = match f.eval(x).unwrap() {
                Ext::Finite(v) => scaled_value(&rep, v) == Some(cap),
                Ext::Inf => cap >= inf,
            };
            if !ok && bad.is_none() {
                bad = Some(x.to_vec());
            }
        });
        ensure(bad.is_none(), || format!("sum {idx}: representation fails at {:?}", bad))?;
        let inner: Vec<usize> = (0..rep.net.node_count()).filter(|&v| v != rep.s && v != rep.t).collect();
        let check = |mask: u64| -> Result<(), String> {
            let mut side = vec![false; rep.net.node_count()];
            side[rep.s] = true;
            for (b, &v) in inner.iter().enumerate() {
                side[v] = mask >> b & 1 == 1;
            }
            let legal = rep.legalize(&side);
            ensure(rep.cut_capacity(&legal) <= rep.cut_capacity(&side), || {
                format!("sum {idx}: legalizing cut {mask:#b} raised its capacity")
            })
        };
        if inner.len() <= 12 {
            exhaustive += 1;
            for mask in 0..(1u64 << inner.len()) {
                check(mask)?;
            }
        } else {
            sampled += 1;
            for _ in 0..4096 {
                check(r.gen_range(0..(1u64 << inner.len())))?;
            }
        }
    }
    Ok(format!("500 sums; cuts enumerated exhaustively for {exhaustive}, 4096 samples for {sampled}"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut points = 0usize;
    for round in 0..300 {
        let nv = r.gen_range(2..=7);
        let tree = random_tree(&mut r, nv);
        let h = random_convex(&mut r, 2 * nv + 2).evenized();
        let mut omega = TwoSeparable::new(tree, 2);
        if r.gen_bool(0.6) {
            omega.pairs.push(PairTerm { i: 0, j: 1, h });
        } else {
            let color = if r.gen_bool(0.5) { treeflow::trees::Color::Black } else { treeflow::trees::Color::White };
            let pool: Vec<usize> = (0..nv).filter(|&v| omega.tree.color(v) == color).collect();
            let pool = if pool.is_empty() { (0..nv).filter(|&v| omega.tree.is_black(v)).collect() } else { pool };
            let z = pool[r.gen_range(0..pool.len())];
            let w = pool[r.gen_range(0..pool.len())];
            omega.anchored_pairs.push(AnchoredPair { i: 0, j: 1, z, w, h });
        }
        let x = vec![r.gen_range(0..nv), r.gen_range(0..nv)];
        for side in [Side::Filter, Side::Ideal] {
            let local = omega.local_term_sum(&x, side).map_err(|e| format!("round {round}: {e}"))?;
            let mut bad = None;
            for_each_point(&local.sum.arities, |y| {
                points += 1;
                let lhs = local.sum.eval(y).unwrap();
                let rhs = omega.eval(&local.decode(y)).unwrap();
                if lhs != rhs && bad.is_none() {
                    bad = Some((y.to_vec(), lhs, rhs));
                }
            });
            ensure(bad.is_none(), || format!("round {round} {side:?} at {x:?}: {:?}", bad))?;
        }
    }
    Ok(format!("300 local boxes, {points} points agree"))
}

/// A random point of `Tⁿ` with finite value, if one is found quickly.
fn finite_point(r: &mut impl Rng, omega: &TwoSeparable) -> Option<Vec<usize>> {
    (0..200).find_map(|_| {
        let x: Vec<usize> = (0..omega.n).map(|_| r.gen_range(0..omega.tree.len())).collect();
        omega.eval(&x).unwrap().is_finite().then_some(x)
    })
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let budget = OracleBudget::default();
    let (mut done, mut exact, mut worst) = (0, 0, 0i64);
    while done < 200 {
        let omega = random_two_separable(&mut r, 7, 3, true);
        let Some(x0) = finite_point(&mut r, &omega) else { continue };
        let (_, trace) = omega.steepest_descent(&x0).map_err(|e| e.to_string())?;
        let d = distance_to_optima(&omega, &x0, &budget).map_err(|e| e.to_string())?;
        let steps = trace.steps();
        ensure(steps <= d + 2, || format!("instance {done}: {steps} steps, distance {d}"))?;
        if omega.side_condition(&x0).map_err(|e| e.to_string())? {
            exact += 1;
            ensure(steps == d, || format!("instance {done}: side condition holds but {steps} steps vs distance {d}"))?;
        }
        worst = worst.max(steps as i64 - d as i64);
        done += 1;
    }
    Ok(format!("200 instances; {exact} met the side condition exactly; max steps minus distance {worst}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let budget = OracleBudget::default();
    let mut done = 0;
    while done < 200 {
        let omega = random_two_separable(&mut r, 7, 3, false);
        let relaxation = omega.evenize();
        let Ok((_, global)) = lconvex_minimizers(&relaxation, false, &budget) else { continue };
        if lconvex_minimizers(&omega, true, &budget).is_err() {
            continue;
        }
        let start = finite_point(&mut r, &relaxation).unwrap_or_else(|| global[0].clone());
        let (descended, _) = relaxation.steepest_descent(&start).map_err(|e| e.to_string())?;
        for x in [&global[0], &descended] {
            let ok = check_persistency(&omega, x, &budget).map_err(|e| e.to_string())?;
            ensure(ok, || format!("instance {done}: no Black minimizer in F({x:?})"))?;
        }
        ensure(check_proximity(&relaxation, &budget).map_err(|e| e.to_string())?, || {
            format!("instance {done}: proximity fails")
        })?;
        done += 1;
    }
    Ok("200 instances: persistency and proximity hold".into())
}

fn solve_all(suite: &[Instance]) -> Result<Vec<Solution>, String> {
    suite
        .iter()
        .enumerate()
        .map(|(k, inst)| solve_scaling(inst).map_err(|e| format!("instance {k}: {e}")))
        .collect()
}

fn criterion_6(suite: &[Instance], sols: &[Solution]) -> Outcome {
    let budget = OracleBudget::default();
    for (k, (inst, sol)) in suite.iter().zip(sols).enumerate() {
        let rep = &sol.report;
        ensure(rep.primal_halves == rep.dual_halves, || format!("instance {k}: duality gap"))?;
        ensure(sol.certified(), || format!("instance {k}: {:?}", rep.violations))?;
        ensure(sol.multiflow.paths.iter().all(|p| p.lambda_halves > 0), || format!("instance {k}: bad lambda"))?;
        let (_, oracle) = brute_force_l(inst, &budget).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(oracle == sol.value_halves, || {
            format!("instance {k}: solver {} halves, oracle {oracle} halves", sol.value_halves)
        })?;
    }
    let golden = [sols[sols.len() - 2].value_halves, sols[sols.len() - 1].value_halves];
    ensure(golden == [6, 6], || format!("golden values {golden:?} (halves)"))?;
    Ok(format!("{} instances certified and equal to the oracle; golden claw and triangle = 3", suite.len()))
}

fn criterion_7(suite: &[Instance], sols: &[Solution]) -> Outcome {
    let mut steps = 0;
    for (k, (inst, sol)) in suite.iter().zip(sols).enumerate() {
        let d = solve_descent(inst).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(d.value_halves == sol.value_halves, || {
            format!("instance {k}: descent {} vs scaling {}", d.value_halves, sol.value_halves)
        })?;
        ensure(d.certified(), || format!("instance {k}: descent output not certified"))?;
        let stats = d.descent.as_ref().unwrap();
        for (i, s) in stats.steps.iter().enumerate() {
            ensure(s.identity_holds(), || format!("instance {k} step {i}: {s:?}"))?;
        }
        steps += stats.steps.len();
    }
    Ok(format!("values agree; identity exact on all {steps} cut steps"))
}

fn criterion_8(suite: &[Instance]) -> Outcome {
    let budget = OracleBudget { max_enumeration: u128::MAX, timeout: None };
    for (k, inst) in suite.iter().enumerate() {
        let m = solve_mcmf(inst).map_err(|e| format!("instance {k}: {e}"))?;
        let lc = lovasz_cherkassky_value(inst).map_err(|e| e.to_string())?;
        ensure(qf(m.value_halves, 2) == lc, || format!("instance {k}: flow {} halves, bound {lc}", m.value_halves))?;
        let (_, oracle) = brute_force_l(&m.reduction.instance, &budget).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(oracle == m.cost_halves, || format!("instance {k}: cost {} vs oracle {oracle}", m.cost_halves))?;
    }
    Ok(format!("{} instances attain the isolating-cut bound at oracle cost", suite.len()))
}

fn criterion_9() -> Outcome {
    let budget = OracleBudget::default();
    let claw_res = multiway_cut(&claw()).map_err(|e| e.to_string())?;
    ensure(claw_res.relaxation == qf(3, 2) && claw_res.rounded_value == q(2), || {
        format!("claw: relaxation {} rounded {}", claw_res.relaxation, claw_res.rounded_value)
    })?;
    let mut r = rng(9);
    let mut worst = qf(0, 1);
    for k in 0..100 {
        let nodes = r.gen_range(3..=8);
        let params = InstanceParams {
            nodes,
            terminals: r.gen_range(2..=nodes.min(4)),
            max_cap: 3,
            max_cost: 1,
            max_grid: u128::MAX,
        };
        let mut inst = random_instance(&mut r, &params);
        inst.problem = Problem::Multiway;
        let res = multiway_cut(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let half_kappa = qf(res.kappa.iter().sum(), 2);
        ensure(res.relaxation == half_kappa, || format!("instance {k}: relaxation is not half the cut sum"))?;
        let (omega, _) = multiway_objective(&inst).map_err(|e| e.to_string())?;
        let (_, relaxed_min) = treeflow::oracles::brute_force_lconvex(&omega, &budget).map_err(|e| e.to_string())?;
        ensure(relaxed_min == res.relaxation, || {
            format!("instance {k}: relaxation {} but exhaustive minimum {relaxed_min}", res.relaxation)
        })?;
        let (_, opt) = brute_force_multiway(&inst, &budget).map_err(|e| e.to_string())?;
        ensure(res.cut_capacity <= 2 * opt, || format!("instance {k}: rounded {} vs optimum {opt}", res.cut_capacity))?;
        if opt > 0 {
            worst = worst.max(qf(res.cut_capacity, opt));
        }
    }
    Ok(format!("claw 3/2 -> 2; 100 graphs with relaxation = half the cut sum, worst ratio {worst}"))
}

fn ceil_log2(h: i64) -> usize {
    (64 - (h.max(1) - 1).leading_zeros()) as usize
}

fn criterion_10(suite: &[Instance], sols: &[Solution]) -> Outcome {
    let (mut max_steps, mut max_phases) = (0, 0);
    for (k, (inst, sol)) in suite.iter().zip(sols).enumerate() {
        let zero_cap: i64 = inst.edges.iter().filter(|e| e.cost == 0).map(|e| e.cap).sum();
        let a = inst.max_cost().max(1);
        let phase_bound = ceil_log2(2 * (zero_cap + 1) * inst.n as i64 * a) + 1;
        let budget = 6 * inst.n + 6;
        for stats in [sol.scaling.as_ref(), sol.certificate.as_ref()].into_iter().flatten() {
            ensure(stats.phases.len() <= phase_bound, || {
                format!("instance {k}: {} phases, bound {phase_bound}", stats.phases.len())
            })?;
            for p in &stats.phases {
                ensure(p.steps <= budget, || format!("instance {k} phase {}: {} steps > {budget}", p.sigma, p.steps))?;
                max_steps = max_steps.max(p.steps);
            }
            max_phases = max_phases.max(stats.phases.len());
        }
    }
    Ok(format!("max steps in a phase {max_steps}, max phases {max_phases}, all within bounds"))
}

fn main() {
    let started = Instant::now();
    let suite = suite();
    let sols = solve_all(&suite);
    let with_sols = |f: fn(&[Instance], &[Solution]) -> Outcome| match &sols {
        Ok(s) => f(&suite, s),
        Err(e) => Err(e.clone()),
    };
    let criteria: Vec<Criterion> = vec![
        ("k-submodular oracle equivalence", Box::new(criterion_1)),
        ("representation identity", Box::new(criterion_2)),
        ("local expansion exactness", Box::new(criterion_3)),
        ("descent step bound", Box::new(criterion_4)),
        ("persistency and proximity", Box::new(criterion_5)),
        ("strong duality and half-integrality", Box::new(move || with_sols(criterion_6))),
        ("cross-solver agreement", Box::new(move || with_sols(criterion_7))),
        ("MCMF and the isolating-cut bound", Box::new(|| criterion_8(&suite))),
        ("multiway cut", Box::new(criterion_9)),
        ("phase budget", Box::new(move || with_sols(criterion_10))),
    ];
    let mut failures = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", idx + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", idx + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
