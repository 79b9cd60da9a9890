//! Acceptance criteria. Runs without the libtest harness so the summary
//! lines always reach the terminal; exits nonzero if any criterion fails.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use cxa_core::attention::{eight_state_instance, run_reallocation, shrinkage_instance, AttentionModel, ChoiceProblem};
use cxa_core::axioms::{self, ActFamily, AxiomId, Witness};
use cxa_core::car::{compare_aversion, validate_cost};
use cxa_core::contract::{identities, solve_oracle, ContractProblem};
use cxa_core::equilibrium::{three_consumer_economy, solve_cace, solve_given_profile, standard_equilibrium, SolverOptions, DEFAULT_PROFILE_CAP};
use cxa_core::gen;
use cxa_core::rational::{int, ratio};
use cxa_core::statespace::{enumerate_partitions_of, DEFAULT_ENUMERATION_CAP};
use cxa_core::updating::{classify_dynamics, conditional_cost_of, ConditionalModel, DynamicsCase, Method};
use cxa_core::{Act, Belief, CarModel, CostFunction, Event, Partition, Rational, StateSpace, UtilityIndex, Value};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

const CAP: usize = DEFAULT_ENUMERATION_CAP;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn q(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(a, b)| ratio(a, b)).collect()
}

fn events(n: usize) -> impl Iterator<Item = Event> {
    (1u32..(1 << n)).map(move |mask| Event::new(n, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap())
}

fn three_consumer_equilibrium() -> Outcome {
    let e = three_consumer_economy();
    let opts = SolverOptions::default();
    let sce = standard_equilibrium(&e, &opts).map_err(err)?;
    ensure!(sce.clearing_residual <= 1e-9 && sce.exact, "standard solve not exact (residual {:e})", sce.clearing_residual);
    ensure!(sce.prices == q(&[(1, 1), (1, 2), (1, 3)]), "standard prices {:?}", sce.prices);
    for bundle in &sce.exact_allocation {
        ensure!(*bundle == q(&[(1, 3), (2, 3), (1, 1)]), "standard bundle {bundle:?}");
    }
    let profile: Vec<Partition> = vec!["[[0,1],[2]]".parse().unwrap(), Partition::discrete(3), Partition::discrete(3)];
    let cace = solve_given_profile(&e, &profile, &opts).map_err(err)?;
    ensure!(cace.clearing_residual <= 1e-9 && cace.exact, "profile solve not exact");
    ensure!(cace.prices == q(&[(1, 1), (1, 3), (5, 18)]), "prices {:?}", cace.prices);
    let expected = vec![q(&[(1, 2), (1, 2), (6, 5)]), q(&[(2, 9), (2, 3), (4, 5)]), q(&[(5, 18), (5, 6), (1, 1)])];
    ensure!(cace.exact_allocation == expected, "allocation {:?}", cace.allocation);
    let report = solve_cace(&e, &opts, CAP, DEFAULT_PROFILE_CAP).map_err(err)?;
    ensure!(report.equilibria.len() == 1, "{} equilibria found", report.equilibria.len());
    ensure!(report.equilibria[0].partition_profile == profile, "equilibrium profile differs");
    let sce_ratio = &sce.prices[0] / &sce.prices[2];
    let cace_ratio = &cace.prices[0] / &cace.prices[2];
    ensure!(sce_ratio < cace_ratio, "price ratios {sce_ratio} vs {cace_ratio}");
    Ok(format!(
        "p*=(1,1/2,1/3), p̂=(1,1/3,5/18) exact; unique equilibrium among {} profiles",
        report.profiles_checked
    ))
}

fn investment_reversal() -> Outcome {
    let m = CarModel::simple(3, CostFunction::finite_table(3, [(Partition::discrete(3), int(1))]).map_err(err)?)
        .map_err(err)?;
    let f = Act::from_ints(&[1, 3, 4]);
    let g = Act::from_ints(&[2, 2, 2]);
    ensure!(m.evaluate(&f).map_err(err)? == Value::Finite(ratio(5, 3)), "V(f)");
    ensure!(m.evaluate(&g).map_err(err)? == Value::Finite(int(2)), "V(g)");
    ensure!(m.prefers(&g, &f).map_err(err)? == Ordering::Greater, "g should be strictly preferred ex ante");
    let e = Event::new(3, [1]).map_err(err)?;
    let cm = ConditionalModel::new(&m, &e).map_err(err)?;
    ensure!(cm.prefers(&f, &g).map_err(err)? == Ordering::Greater, "f should be strictly preferred given E");
    let r = classify_dynamics(&m, &e, &f, &g).map_err(err)?;
    ensure!(r.case == DynamicsCase::Reversal, "case {:?}", r.case);
    Ok("V(f)=5/3 < V(g)=2, V_E(f)=3 > V_E(g)=2, reversal case".into())
}

fn conditional_cost_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    for n in 3..=6 {
        for _ in 0..3 {
            let m = CarModel::simple(n, gen::monotone_table(&mut rng, n)).map_err(err)?;
            for e in events(n) {
                for restricted in enumerate_partitions_of(&e, CAP).map_err(err)? {
                    let fast = conditional_cost_of(&m, &e, &restricted, Method::Attachment, CAP).map_err(err)?;
                    let slow = conditional_cost_of(&m, &e, &restricted, Method::Enumeration, CAP).map_err(err)?;
                    ensure!(fast.cost == slow.cost, "n={n} E={e:?} S={restricted}: {:?} vs {:?}", fast.cost, slow.cost);
                    ensure!(m.cost(&fast.witness) == fast.unconditional, "witness cost mismatch");
                    ensure!(fast.witness.restrict(&e).map_err(err)? == restricted, "witness incompatible");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (table, event, on-event partition) cases agree exactly"))
}

fn axiom_suite() -> Outcome {
    let wanted = [
        AxiomId::WeakOrder,
        AxiomId::WeakCertaintyIndependence,
        AxiomId::WeakMonotonicity,
        AxiomId::AversionToComplexity,
        AxiomId::Consequentialism,
        AxiomId::MinimalComplexityUpdating,
        AxiomId::DynamicComplexityAversion,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..100 {
        let n = rng.gen_range(2..=4);
        let m = gen::model(&mut rng, n);
        let fam = ActFamily::random(n, 8, 4, 1000 + i);
        let mask: u32 = rng.gen_range(1..(1 << n));
        let e = Event::new(n, (0..n).filter(|j| mask >> j & 1 == 1)).map_err(err)?;
        for r in axioms::check_all(&m, &fam, &e).map_err(err)? {
            if wanted.contains(&r.axiom) {
                ensure!(r.holds(), "model {i}: {:?} violated by {:?}", r.axiom, r.witness);
            }
        }
    }

    // non-monotone cost
    let mut controls = 0;
    for n in 2..=4 {
        let cost = gen::non_monotone_table(&mut rng, n);
        ensure!(!validate_cost(&cost, &StateSpace::new(n).unwrap(), CAP).map_err(err)?.is_valid(), "control validated");
        let bad = CarModel::new_unchecked(StateSpace::new(n).unwrap(), UtilityIndex::identity(), Belief::uniform(n), cost)
            .map_err(err)?;
        let fam = ActFamily::new(gen::grid_acts(n, 2), vec![int(0), int(1)], axioms::default_weights(), 0).map_err(err)?;
        let a4 = axioms::check_weak_monotonicity(&bad, &fam).map_err(err)?;
        let a5 = axioms::check_aversion_to_complexity(&bad, &fam).map_err(err)?;
        let w = a4.witness.or(a5.witness).ok_or(format!("n={n}: no violation of Axiom 4 or 5"))?;
        ensure!(w.recheck(&bad, None).map_err(err)?, "witness does not recheck");
        controls += 1;
    }

    // full independence
    let inv = CarModel::simple(3, CostFunction::finite_table(3, [(Partition::discrete(3), int(1))]).unwrap()).unwrap();
    let fam = ActFamily::new(
        vec![Act::from_ints(&[2, 2, 2]), Act::from_ints(&[1, 3, 4]), Act::from_ints(&[3, 1, 0])],
        vec![],
        vec![ratio(1, 2)],
        0,
    )
    .map_err(err)?;
    let ind = axioms::check_independence(&inv, &fam).map_err(err)?;
    let w = ind.witness.ok_or("independence not violated")?;
    ensure!(w.recheck(&inv, None).map_err(err)?, "independence witness does not recheck");
    let witness = Witness::Independence {
        f: Act::from_ints(&[2, 2, 2]),
        g: Act::from_ints(&[1, 3, 4]),
        h: Act::from_ints(&[3, 1, 0]),
        alpha: ratio(1, 2),
    };
    ensure!(witness.recheck(&inv, None).map_err(err)?, "independence witness does not recheck");

    // dynamic consistency
    let half = ratio(1, 2);
    let dear = CarModel::simple(
        3,
        CostFunction::finite_table(3, [
            ("[[0,1],[2]]".parse().unwrap(), half.clone()),
            ("[[0],[1,2]]".parse().unwrap(), half.clone()),
            ("[[0,2],[1]]".parse().unwrap(), half),
            (Partition::discrete(3), int(1)),
        ])
        .unwrap(),
    )
    .map_err(err)?;
    let e = Event::new(3, [1]).unwrap();
    let cm = ConditionalModel::new(&dear, &e).map_err(err)?;
    let fam = ActFamily::new(vec![Act::from_ints(&[1, 3, 4]), Act::from_ints(&[2, 2, 2])], vec![], vec![ratio(1, 2)], 0)
        .map_err(err)?;
    let dc = axioms::check_dynamic_consistency(&dear, &cm, &fam).map_err(err)?;
    let w = dc.witness.ok_or("dynamic consistency not violated")?;
    ensure!(w.recheck(&dear, Some(&cm)).map_err(err)?, "dynamic consistency witness does not recheck");
    ensure!(axioms::check_dca(&dear, &cm, &fam).map_err(err)?.holds(), "Axiom 9 should still hold");
    Ok(format!("100 models pass A1,A3,A4,A5,A7,A8,A9; {controls} monotonicity controls + independence + DC witnesses recheck"))
}

fn contract_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let p: ContractProblem = gen::contract_problem(&mut rng).map_err(err)?;
        let (first, second) = identities(&p);
        ensure!(first.is_zero() && second.is_zero(), "problem {i}: identities {first} {second}");
        let sol = solve_oracle(&p).map_err(err)?;
        for s in &sol.candidates {
            ensure!(s.max_violation() <= 1e-9, "problem {i}: {} violates by {:e}", s.regime, s.max_violation());
        }
        let b = &sol.best;
        ensure!(b.binds(1e-9), "problem {i}: optimum {} slack ({:e}, {:e})", b.regime, b.participation_slack, b.incentive_slack);
        worst = worst.max(b.participation_slack.abs()).max(b.incentive_slack.abs());
        let flip = sol.flip_delta.ok_or(format!("problem {i}: complex regime not attained"))?;
        ensure!(flip > 0.0, "problem {i}: no complex region");
        let top = flip * 2.0;
        let mut regimes = Vec::new();
        for k in 1..=100 {
            let delta = gen_delta(top * k as f64 / 100.0);
            regimes.push(solve_oracle(&p.with_delta(delta).map_err(err)?).map_err(err)?.best.regime.blocks());
        }
        let changes = regimes.windows(2).filter(|w| w[0] != w[1]).count();
        ensure!(regimes[0] == 3 && *regimes.last().unwrap() == 2 && changes == 1, "problem {i}: regimes {regimes:?}");
    }
    Ok(format!("20 problems: identities exact, constraints bind (max |slack| {worst:.1e}), one complex→moderate flip each"))
}

fn gen_delta(x: f64) -> Rational {
    cxa_core::rational::approximate(x, 1_000_000).expect("finite")
}

fn attention_traces() -> Outcome {
    let start = Instant::now();
    let (model, menu, e) = eight_state_instance();
    let t = run_reallocation(&model, &menu, &e, CAP).map_err(err)?;
    let poss: Vec<Vec<usize>> = t.stages.iter().map(|s| s.possibility.members().to_vec()).collect();
    ensure!(poss[0] == vec![1, 2, 3, 4, 5] && poss[1] == vec![2, 3, 4, 5], "trace {poss:?}");
    ensure!(t.stages.last().unwrap().possibility.members() == [2, 3, 4, 5], "terminal {poss:?}");
    let n8 = start.elapsed();
    ensure!(n8 < Duration::from_secs(30), "n=8 trace took {n8:?}");

    let (model, menu, e) = shrinkage_instance();
    let t = run_reallocation(&model, &menu, &e, CAP).map_err(err)?;
    ensure!(t.shrank() && t.final_possibility().is_subset_of(t.first_possibility()), "no strict shrinkage");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..40 {
        let n = rng.gen_range(2..=6);
        let m = AttentionModel::new(UtilityIndex::identity(), gen::belief(&mut rng, n), gen::monotone_table(&mut rng, n))
            .map_err(err)?;
        let count = rng.gen_range(2..=4);
        let menu = ChoiceProblem::new(gen::acts(&mut rng, n, count, 6)).map_err(err)?;
        let mask: u32 = rng.gen_range(1..(1 << n));
        let e = Event::new(n, (0..n).filter(|j| mask >> j & 1 == 1)).unwrap();
        let t = run_reallocation(&m, &menu, &e, CAP).map_err(err)?;
        ensure!(t.stages.len() <= n, "instance {i}: {} stages for n={n}", t.stages.len());
        for w in t.stages.windows(2) {
            ensure!(w[1].possibility.is_subset_of(&w[0].possibility), "instance {i}: possibility set grew");
            ensure!(e.is_subset_of(&w[1].possibility), "instance {i}: event lost");
        }
    }
    Ok(format!("worked trace {{1..5}} → {{2..5}} in {n8:.2?}; strict shrinkage; 40 random traces monotone within n stages"))
}

fn comparative_statics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..50 {
        let n = rng.gen_range(2..=3);
        let (m1, m2) = gen::dominated_pair(&mut rng, n);
        let r = compare_aversion(&m1, &m2, &gen::grid_acts(n, 3), CAP).map_err(err)?;
        ensure!(r.parameter_holds && r.definitional_holds, "pair {i}: counterexample {:?}", r.definitional_witness);
    }
    for i in 0..20 {
        let n = rng.gen_range(2..=3);
        let (m1, m2) = gen::undominated_pair(&mut rng, n);
        let r = compare_aversion(&m1, &m2, &gen::grid_acts(n, 3), CAP).map_err(err)?;
        ensure!(!r.parameter_holds, "pair {i}: dominance unexpectedly holds");
        let w = r.constructed_witness.ok_or(format!("pair {i}: nothing constructed"))?;
        ensure!(w.recheck(&m1, &m2).map_err(err)?, "pair {i}: constructed witness fails");
    }
    Ok("50 dominated pairs without counterexample; 20 undominated pairs with rechecked witnesses".into())
}

fn affine_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..50 {
        let n = rng.gen_range(2..=4);
        let m = gen::model(&mut rng, n);
        let a = ratio(rng.gen_range(1..=20), rng.gen_range(1..=5));
        let b = ratio(rng.gen_range(-20..=20), rng.gen_range(1..=5));
        let t = m.affine_transform(&a, &b).map_err(err)?;
        let acts = gen::acts(&mut rng, n, 50, 5);
        for f in &acts {
            for g in &acts {
                ensure!(m.prefers(f, g).map_err(err)? == t.prefers(f, g).map_err(err)?, "model {i}: ordering changed");
            }
        }
    }
    Ok("50 models × 2500 ordered pairs unchanged".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 three-consumer equilibrium", three_consumer_equilibrium, 5),
        ("2 investment reversal", investment_reversal, 5),
        ("3 conditional-cost oracle", conditional_cost_oracle, 60),
        ("4 axiom suite", axiom_suite, 120),
        ("5 contract oracle", contract_oracle, 60),
        ("6 attention reallocation", attention_traces, 30),
        ("7 comparative statics", comparative_statics, 60),
        ("8 affine invariance", affine_invariance, 60),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("took {elapsed:.2?}, budget {budget}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
