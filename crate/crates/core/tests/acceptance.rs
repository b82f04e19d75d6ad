//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use dkdv_core::harness::{
    confinement_test, interference_shift, run_crosscheck, single_strip_scenario, smoke_1d, strips_and_diagonals,
    sweep_single_strip, transparency_test, ConfinementVerdict, Verdict,
};
use dkdv_core::rules::{
    closed_form_taishi, elementary_step, interact_diagonal, interaction_trace, scenario_predict, single_strip_rule,
    PairScenario, Taishi, WeightVector,
};
use dkdv_core::Rational;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn confinement_extent() -> Outcome {
    let one = Rational::from_integer(1);
    let mut seen = Vec::new();
    for n in 1..=4u32 {
        let start = Instant::now();
        let r = confinement_test(&one, n, 40, 0).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(10), &format!("N = {n}"))?;
        let e = 2 * n as usize - 1;
        ensure(r.verdict == ConfinementVerdict::ConfinedWithExtent { extent: e }, || {
            format!("N = {n}: {:?}", r.verdict)
        })?;
        let cl = r.cluster.as_ref().ok_or("no cluster")?;
        ensure(cl.extent == (e, e) && cl.confined && r.other_objects == 0, || {
            format!("N = {n}: cluster {cl:?}, {} other objects", r.other_objects)
        })?;
        seen.push(format!("{}x{}", cl.extent.0, cl.extent.1));
    }
    Ok(format!("extents {}", seen.join(" ")))
}

fn unconfinement() -> Outcome {
    let two = Rational::from_integer(2);
    let mut seen = Vec::new();
    for n in 1..=2u32 {
        let start = Instant::now();
        let r = confinement_test(&two, n, 60, 0).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(30), &format!("N = {n}"))?;
        match &r.verdict {
            ConfinementVerdict::Unconfined { band: Some(b) } if b.is_flanked_zero_line() => {
                seen.push(format!("{:?}", b.lines))
            }
            v => return Err(format!("N = {n}: {v:?}")),
        }
    }
    Ok(format!("edge bands {}", seen.join(" ")))
}

fn strip_sweep() -> Outcome {
    let start = Instant::now();
    let mut results = sweep_single_strip(6, 6, 0);
    let mut extra = single_strip_scenario(3, 7);
    extra.prng_seed = 0;
    results.push((3, 7, run_crosscheck(&extra)));
    for (p, q, r) in &results {
        let r = r.as_ref().map_err(|e| format!("({p},{q}): {e}"))?;
        ensure(r.verdict == Verdict::Agree, || format!("({p},{q}): {:?}", r.verdict))?;
        ensure(r.east == r.predicted && r.closed_form == r.predicted, || {
            format!("({p},{q}): east {:?} closed {:?} dynamics {:?}", r.east, r.closed_form, r.predicted)
        })?;
        let base = r.west.as_ref().unwrap().base_row;
        let rule = single_strip_rule(*p, *q).placed(base);
        ensure(r.east.as_ref() == Some(&rule), || format!("({p},{q}): single-strip rule {rule}"))?;
    }
    let anchors: [((u32, u32), i64, &[u32]); 6] = [
        ((1, 1), 2, &[1]),
        ((2, 1), 1, &[2]),
        ((3, 1), 0, &[1, 2]),
        ((5, 3), 1, &[4, 1]),
        ((2, 4), 4, &[2]),
        ((3, 7), 4, &[1, 2]),
    ];
    for ((p, q), k, w) in anchors {
        let r = results.iter().find(|c| (c.0, c.1) == (p, q)).unwrap().2.as_ref().unwrap();
        let base = r.west.as_ref().unwrap().base_row;
        let want = WeightVector::new(base + k, w.to_vec());
        ensure(r.east.as_ref() == Some(&want), || format!("anchor ({p},{q}): {:?} != {want}", r.east))?;
    }
    within(start, Duration::from_secs(300), "sweep")?;
    Ok(format!("{} scenarios agree in {:.1?}", results.len(), start.elapsed()))
}

fn check_sequence(name: &str, columns: &[&[u32]], q: u32) -> Result<(), String> {
    let start = WeightVector::from_top_down(0, columns[0]);
    let trace = interaction_trace(&start, q);
    ensure(trace.len() + 1 == columns.len(), || format!("{name}: {} steps", trace.len()))?;
    for (i, (got, want)) in trace.iter().zip(&columns[1..]).enumerate() {
        ensure(got.to_top_down() == want.to_vec(), || {
            format!("{name} step {}: {:?} != {:?}", i + 1, got.to_top_down(), want)
        })?;
    }
    Ok(())
}

fn golden_sequences() -> Outcome {
    check_sequence(
        "first",
        &[
            &[0, 0, 9, 0, 3, 1],
            &[0, 1, 8, 0, 4, 0],
            &[0, 2, 7, 1, 3, 0],
            &[0, 3, 6, 2, 2, 0],
            &[0, 4, 5, 3, 1, 0],
            &[0, 5, 4, 4, 0, 0],
            &[1, 4, 5, 3, 0, 0],
        ],
        3,
    )?;
    check_sequence(
        "second",
        &[
            &[0, 0, 1, 4, 5, 3],
            &[0, 0, 2, 3, 6, 2],
            &[0, 0, 3, 2, 7, 1],
            &[0, 0, 4, 1, 8, 0],
            &[0, 1, 3, 2, 7, 0],
            &[0, 2, 2, 3, 6, 0],
            &[0, 3, 1, 4, 5, 0],
            &[0, 4, 0, 5, 4, 0],
            &[1, 3, 0, 6, 3, 0],
        ],
        4,
    )?;
    let third: [&[u32]; 11] = [
        &[0, 0, 0, 6, 0, 2, 1],
        &[0, 0, 1, 5, 0, 3, 0],
        &[0, 0, 2, 4, 1, 2, 0],
        &[0, 0, 3, 3, 2, 1, 0],
        &[0, 0, 4, 2, 3, 0, 0],
        &[0, 1, 3, 3, 2, 0, 0],
        &[0, 2, 2, 4, 1, 0, 0],
        &[0, 3, 1, 5, 0, 0, 0],
        &[1, 2, 2, 4, 0, 0, 0],
        &[2, 1, 3, 3, 0, 0, 0],
        &[3, 0, 4, 2, 0, 0, 0],
    ];
    check_sequence("third", &third, 5)?;
    // Checkpoints after diagonals of weight 2, 2 and 1.
    let start = WeightVector::from_top_down(0, third[0]);
    let mut cur = start;
    for (q, step) in [(2, 4), (2, 8), (1, 10)] {
        cur = interact_diagonal(&cur, q);
        ensure(cur.to_top_down() == third[step].to_vec(), || format!("third after {step} steps"))?;
    }
    Ok("3 sequences, 6 + 8 + 10 steps, checkpoints 4/8/10".into())
}

fn cumulativity() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    });
    let dynamics = (prop::collection::vec(0u32..12, 1..9), 1u32..8, 1u32..8);
    runner
        .run(&dynamics, |(w, q1, q2)| {
            let v = WeightVector::new(0, w);
            let stepwise = interact_diagonal(&interact_diagonal(&v, q1), q2).canonical();
            prop_assert_eq!(stepwise, interact_diagonal(&v, q1 + q2).canonical());
            Ok(())
        })
        .map_err(|e| format!("dynamics: {e}"))?;
    let closed = (1u32..10, 0u32..10, 1u32..8, 1u32..8);
    runner
        .run(&closed, |(n, p, q1, q2)| {
            let first = closed_form_taishi(n, p, q1).unwrap().placed(0);
            let (b, n1, p1) = (first.base_row, first.w[0], first.w.get(1).copied().unwrap_or(0));
            let chained = closed_form_taishi(n1, p1, q2).unwrap().placed(b);
            let direct = closed_form_taishi(n, p, q1 + q2).unwrap().placed(0);
            prop_assert_eq!(&chained, &direct);
            prop_assert_eq!(direct, interact_diagonal(&WeightVector::new(0, vec![n, p]), q1 + q2).canonical());
            Ok(())
        })
        .map_err(|e| format!("closed form: {e}"))?;
    Ok("500 dynamics triples, 500 closed-form taishi triples".into())
}

fn conservation() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(prop::collection::vec(0u32..50, 0..12), -20i64..20), |(w, base)| {
            let v = WeightVector::new(base, w);
            prop_assert_eq!(elementary_step(&v).total(), v.total());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 random vectors".into())
}

fn scenario_b() -> Outcome {
    let start = Instant::now();
    let sc = strips_and_diagonals(vec![1, 2, 0, 5, 2], &[(5, (0, 0))]);
    let r = run_crosscheck(&sc).map_err(|e| e.to_string())?;
    let base = r.west.as_ref().ok_or("no west profile")?.base_row;
    let lower = Taishi { base_row: base, n: 1, p: 2 };
    let upper = Taishi { base_row: base + 3, n: 5, p: 2 };
    let predicted = scenario_predict(lower, upper, 5).map_err(|e| e.to_string())?;
    ensure(predicted.scenario == PairScenario::B, || format!("{:?}", predicted.scenario))?;
    let combined = predicted.combined.clone().ok_or("no combined profile")?;
    let dynamics = interact_diagonal(&WeightVector::new(base, vec![1, 2, 0, 5, 2]), 5).canonical();
    ensure(combined == dynamics, || format!("prediction {combined} vs dynamics {dynamics}"))?;
    ensure(r.verdict == Verdict::Agree, || format!("{:?}", r.verdict))?;
    ensure(r.east.as_ref() == Some(&combined), || format!("lattice {:?} vs {combined}", r.east))?;
    ensure(combined == WeightVector::new(base + 3, vec![1, 6, 0, 3]), || format!("{combined}"))?;
    within(start, Duration::from_secs(60), "scenario B")?;
    Ok(format!("east {combined} relative to base {base}"))
}

fn interference() -> Outcome {
    let mut shifts = Vec::new();
    for q in 1..=2 {
        let s = interference_shift(1, 2, q, 0).map_err(|e| e.to_string())?;
        ensure(s == 2, || format!("q = {q}: extra upshift {s}"))?;
        shifts.push(s);
    }
    Ok(format!("extra upshift {shifts:?} for q = 1, 2"))
}

fn transparency() -> Outcome {
    let r = |n, d| Rational::new(n, d).unwrap();
    let one = r(1, 1);
    let a = transparency_test(1, &r(2, 1), &r(3, 1), &one, 14, 0).map_err(|e| e.to_string())?;
    let b = transparency_test(3, &r(1, 2), &r(5, 1), &one, 14, 0).map_err(|e| e.to_string())?;
    ensure(a.pass && b.pass, || format!("p=1 {:?}, p=3 {:?}", a.differing, b.differing))?;
    let control = transparency_test(1, &r(2, 1), &r(3, 1), &r(2, 1), 14, 0).map_err(|e| e.to_string())?;
    ensure(!control.pass, || "lambda = 2 control passed".into())?;
    Ok(format!(
        "{} + {} sites identical; control differs at {}",
        a.compared,
        b.compared,
        control.differing.len()
    ))
}

fn smoke() -> Outcome {
    let r = smoke_1d();
    ensure(r.pass, || format!("{r:?}"))?;
    let show = |v: &[Option<i64>]| v.iter().map(|x| x.unwrap().to_string()).collect::<Vec<_>>().join(",");
    Ok(format!("eq2 {} | eq1 {}", show(&r.eq2), show(&r.eq1[..9])))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("confinement extent 2N-1, lambda=1, N=1..4", confinement_extent),
        ("unconfined flanked zero line, lambda=2, N=1,2", unconfinement),
        ("single-strip sweep p,q in 1..6", strip_sweep),
        ("golden weight sequences", golden_sequences),
        ("cumulativity", cumulativity),
        ("conservation under elementary steps", conservation),
        ("scenario B pair prediction", scenario_b),
        ("interference shift independent of q", interference),
        ("taishi transparency", transparency),
        ("1D smoke patterns", smoke),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
