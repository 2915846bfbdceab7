//! Acceptance criteria, one line per criterion.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qif::dalenius::{dalenius_capacity_bound, dalenius_lift};
use qif::gain::{
    gid, max_normalized_max_case_leakage, max_prior_vulnerability, pointwise_gain, reciprocal_gain,
};
use qif::measures::*;
use qif::propcheck::{
    gen_instance, mutants, property, run_registry, run_registry_with, InstanceSpec,
};
use qif::{hyper, labels, q, Channel, Correlation, ExtRational, Prior, Rational};
use serde_json::Value;

#[path = "../../core/tests/support/grid.rs"]
mod grid;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn survey() -> (Prior, Channel) {
    let xs = labels(&["b", "g", "bg"]);
    let c = Channel::new(
        xs.clone(),
        labels(&["b", "g"]),
        vec![
            vec![q(3, 4), q(1, 4)],
            vec![q(1, 4), q(3, 4)],
            vec![q(19, 20), q(1, 20)],
        ],
    )
    .unwrap();
    (Prior::new(xs, vec![q(1, 4), q(1, 2), q(1, 4)]).unwrap(), c)
}

fn three_by_three(rows: [[Rational; 3]; 3]) -> Channel {
    Channel::new(
        labels(&["x1", "x2", "x3"]),
        labels(&["y1", "y2", "y3"]),
        rows.into_iter().map(Vec::from).collect(),
    )
    .unwrap()
}

fn channel_g() -> Channel {
    three_by_three([
        [q(2, 3), q(1, 6), q(1, 6)],
        [q(1, 3), q(1, 3), q(1, 3)],
        [q(1, 6), q(1, 6), q(2, 3)],
    ])
}

fn channel_r() -> Channel {
    three_by_three([
        [q(3, 5), q(1, 5), q(1, 5)],
        [q(1, 5), q(3, 5), q(1, 5)],
        [q(1, 5), q(1, 5), q(3, 5)],
    ])
}

fn fuzz_spec(trials: usize, seed: u64) -> InstanceSpec {
    InstanceSpec {
        trials,
        seed,
        ..InstanceSpec::default()
    }
}

fn running_example() -> Outcome {
    let (pi, c) = survey();
    let l = lift(&pi, &c).map_err(|e| e.to_string())?;
    check(l.value == q(19, 11), || format!("lift {}", l.value))?;
    let cap = lift_capacity(&c);
    check(cap == q(15, 1), || format!("epsilon factor {cap}"))?;
    let h = hyper(&pi, &c).unwrap();
    check(h.marginals() == [q(11, 20), q(9, 20)], || {
        format!("marginals {:?}", h.marginals())
    })?;
    let b = h.posteriors()[0].masses();
    let g = h.posteriors()[1].masses();
    check(b == [q(15, 44), q(5, 22), q(19, 44)], || {
        format!("posterior b {b:?}")
    })?;
    check(g == [q(5, 36), q(5, 6), q(1, 36)], || {
        format!("posterior g {g:?}")
    })?;
    Ok(format!(
        "lift = {}, factor = {cap}, p = (11/20, 9/20)",
        l.value
    ))
}

fn bayes_capacity_running() -> Outcome {
    let (_, c) = survey();
    let v = bayes_capacity(&c);
    check(v == q(17, 10), || format!("Bayes capacity {v}"))?;
    Ok(format!("Bayes capacity = {v}"))
}

fn motivating_example() -> Outcome {
    let (gc, rc) = (channel_g(), channel_r());
    let u = Prior::uniform(gc.secrets().to_vec()).unwrap();
    let g = gid(u.labels()).unwrap();
    let expect = [
        (
            "avg leakage G",
            mult_leakage(&g, &u, &gc).unwrap().into(),
            q(5, 3),
        ),
        (
            "avg leakage R",
            mult_leakage(&g, &u, &rc).unwrap().into(),
            q(9, 5),
        ),
        (
            "max-case G",
            max_case_leakage(&g, &u, &gc).unwrap().into(),
            q(12, 7),
        ),
        (
            "max-case R",
            max_case_leakage(&g, &u, &rc).unwrap().into(),
            q(9, 5),
        ),
        ("lift capacity G", lift_capacity(&gc), q(4, 1)),
        ("lift capacity R", lift_capacity(&rc), q(3, 1)),
        ("Bayes capacity G", bayes_capacity(&gc).into(), q(5, 3)),
        ("Bayes capacity R", bayes_capacity(&rc).into(), q(9, 5)),
    ];
    for (name, got, want) in &expect {
        let got: &ExtRational = got;
        check(got == want, || format!("{name}: {got} != {want}"))?;
    }

    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let out = Command::new(env!("CARGO_BIN_EXE_qif"))
        .args([
            "compare",
            "--prior",
            "uniform",
            "--gain",
            "gid",
            "--format",
            "json",
            "--channel",
        ])
        .arg(data.join("G.csv"))
        .arg("--channel")
        .arg(data.join("R.csv"))
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = v["rows"].as_array().ok_or("no rows")?;
    let get = |row: &Value, col: &str| -> Rational {
        let e = &row[col]["value"];
        Rational::parse(&format!(
            "{}/{}",
            e["num"].as_str().unwrap(),
            e["den"].as_str().unwrap()
        ))
        .unwrap()
    };
    let table: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            [
                "avg-leakage",
                "max-case-leakage",
                "bayes-capacity",
                "lift-capacity",
            ]
            .map(|c| get(r, c))
            .to_vec()
        })
        .collect();
    check(table[0] == [q(5, 3), q(12, 7), q(5, 3), q(4, 1)], || {
        format!("compare row G {:?}", table[0])
    })?;
    check(table[1] == [q(9, 5), q(9, 5), q(9, 5), q(3, 1)], || {
        format!("compare row R {:?}", table[1])
    })?;
    // R leaks more than G although its ε is smaller
    check(
        table[1][0] > table[0][0] && table[1][3] < table[0][3],
        || "anomaly not reproduced".into(),
    )?;
    Ok("G (5/3, 12/7, 5/3, 4) vs R (9/5, 9/5, 9/5, 3); compare reproduces the anomaly".into())
}

fn realization() -> Outcome {
    let spec = fuzz_spec(1000, 0xA11CE);
    for t in 0..spec.trials {
        let i = gen_instance(&spec, t);
        let g = reciprocal_gain(&i.prior).unwrap();
        let leak = max_case_leakage(&g, &i.prior, &i.channel).unwrap();
        let l = lift_value(&i.prior, &i.channel).unwrap();
        check(leak == l, || format!("trial {t}: {leak} != {l}"))?;
    }
    let (pi, c) = survey();
    let g = reciprocal_gain(&pi).unwrap();
    let best = max_posterior_vulnerability_report(&g, &pi, &c).unwrap();
    check(best.value == q(19, 11), || format!("V^max {}", best.value))?;
    let binding = best
        .witness
        .and_then(|w| w.observation)
        .map(|l| l.to_string());
    check(binding.as_deref() == Some("b"), || {
        format!("binding posterior {binding:?}")
    })?;
    let h = hyper(&pi, &c).unwrap();
    let vg = prior_vulnerability(&g, h.posterior(&"g".parse().unwrap()).unwrap()).unwrap();
    check(vg == q(5, 3), || format!("V(delta^g) {vg}"))?;
    Ok("1000/1000 exact equalities; V^max = 19/11 at b, V(delta^g) = 5/3".into())
}

fn ordering_chain() -> Outcome {
    let spec = fuzz_spec(1000, 0xC4A1);
    let mut violations = 0;
    let mut first = None;
    for t in 0..spec.trials {
        let i = gen_instance(&spec, t);
        let chain = check_ordering_chain(&i.gain, &i.prior, &i.channel).unwrap();
        check(chain.relations.len() == 6, || {
            "chain must have six relations".into()
        })?;
        for r in chain.violations() {
            violations += 1;
            first.get_or_insert_with(|| format!("trial {t}: {r}"));
        }
    }
    check(violations == 0, || {
        format!(
            "{violations} violations, first {}",
            first.unwrap_or_default()
        )
    })?;
    Ok("1000 instances x 6 relations, 0 violations".into())
}

fn capacity_closed_form() -> Outcome {
    let spec = fuzz_spec(200, 0xCAFE);
    let mut worst_gap = Rational::zero();
    let mut infinite = 0;
    for t in 0..spec.trials {
        let c = gen_instance(&spec, t).channel;
        let cap = lift_capacity(&c);
        check(cap == pairwise_ratio_max(&c), || {
            format!("trial {t}: closed forms differ")
        })?;
        match &cap {
            ExtRational::Finite(k) => {
                let sup = grid::lift_grid_sup(&c, 4);
                check(&sup <= k, || format!("trial {t}: grid sup {sup} > {k}"))?;
                let gap = (k - &sup) / k.clone();
                check(gap <= q(1, 100), || format!("trial {t}: gap {gap}"))?;
                worst_gap = worst_gap.max(gap);
            }
            ExtRational::Infinite => {
                infinite += 1;
                let sups: Vec<Rational> = (1..=4).map(|d| grid::lift_grid_sup(&c, d)).collect();
                check(sups.windows(2).all(|w| w[0] < w[1]), || {
                    format!("trial {t}: {sups:?}")
                })?;
            }
        }
    }
    Ok(format!(
        "200 channels; worst relative gap at depth 4 = {:.2e}; {infinite} infinite capacities diverge on the grid",
        worst_gap.to_f64()
    ))
}

fn pointwise_gain_equivalence() -> Outcome {
    let spec = fuzz_spec(1000, 0xB0B);
    for t in 0..spec.trials {
        let i = gen_instance(&spec, t);
        let star = pointwise_gain(&i.gain);
        let v_star = prior_vulnerability(&star, &i.prior).unwrap();
        let v_max = max_prior_vulnerability(&i.gain, &i.prior).unwrap();
        check(v_star == v_max, || {
            format!("trial {t}: {v_star} != {v_max}")
        })?;
        let a = max_case_leakage(&star, &i.prior, &i.channel).unwrap();
        let b = max_normalized_max_case_leakage(&i.gain, &i.prior, &i.channel).unwrap();
        check(a == b, || format!("trial {t}: normalizations {a} != {b}"))?;
    }
    Ok("1000/1000 exact equalities for vulnerability and leakage".into())
}

fn dalenius() -> Outcome {
    let spec = fuzz_spec(500, 0xDA1E);
    for t in 0..spec.trials {
        let i = gen_instance(&spec, t);
        let j = Correlation::from_factors(&i.rho, &i.correlation).unwrap();
        let l = dalenius_lift(&j, &i.channel).unwrap();
        check(
            l.lhs <= l.lift_correlation && l.lhs <= l.lift_channel,
            || {
                format!(
                    "trial {t}: {} > min({}, {})",
                    l.lhs, l.lift_correlation, l.lift_channel
                )
            },
        )?;
        let g = gid(i.rho.labels()).unwrap();
        let b = dalenius_capacity_bound(&j, &i.channel, &g).unwrap();
        check(b.cap_dc <= b.cap_c, || {
            format!(
                "trial {t}: MaxLift(DC) {} > MaxLift(C) {}",
                b.cap_dc, b.cap_c
            )
        })?;
        check(b.holds, || format!("trial {t}: capacity chain"))?;
    }
    let (pi, c) = survey();
    let v = max_case_leakage(&gid(pi.labels()).unwrap(), &pi, &c).unwrap();
    check(v == q(5, 3), || format!("running gid max-case leakage {v}"))?;
    Ok("500/500 pairs satisfy both bounds; running gid max-case leakage = 5/3".into())
}

fn mutation() -> Outcome {
    let spec = InstanceSpec::default();
    let reference = run_registry(&spec).map_err(|e| e.to_string())?;
    if let Some(r) = reference.iter().find(|r| !r.passed) {
        return Err(format!("reference fails: {r}"));
    }
    let subject = mutants::broken_lift_subject();
    let results = run_registry_with(&spec, &subject).map_err(|e| e.to_string())?;
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    check(!failed.is_empty(), || "mutant not detected".into())?;
    let mut dims = Vec::new();
    for r in &failed {
        let f = r.failure.as_ref().unwrap();
        let (n, m) = f.shrunk.channel_dims();
        check(n <= 3 && m <= 3, || {
            format!("{}: shrunk only to {n}x{m}", r.property)
        })?;
        let again = property(r.property).unwrap().check(&f.shrunk, &subject);
        check(again.as_ref().err() == Some(&f.violation), || {
            format!("{}: counterexample does not reproduce", r.property)
        })?;
        dims.push(format!("{} at {n}x{m}: {}", r.property, f.violation));
    }
    Ok(format!(
        "reference passes all {} properties; mutant caught by {}",
        reference.len(),
        dims.join("; ")
    ))
}

fn degenerate() -> Outcome {
    let xs = labels(&["a", "b", "c"]);
    let id = Channel::identity(xs.clone()).unwrap();
    check(lift_capacity(&id) == ExtRational::Infinite, || {
        "identity capacity is finite".into()
    })?;
    for k in [q(1, 1), q(3, 2), q(15, 1), q(1_000_000_007, 1)] {
        let holds = verify_ldp(&id, &ExtRational::Finite(k.clone())).unwrap();
        check(!holds, || format!("identity is {k}-LDP"))?;
    }
    let flat = Channel::non_interacting(
        xs.clone(),
        labels(&["u", "v", "w"]),
        vec![q(1, 2), q(1, 3), q(1, 6)],
    )
    .unwrap();
    let pi = Prior::new(xs.clone(), vec![q(1, 5), q(3, 5), q(1, 5)]).unwrap();
    let one = Rational::one();
    for g in [gid(&xs).unwrap(), reciprocal_gain(&pi).unwrap()] {
        check(mult_leakage(&g, &pi, &flat).unwrap() == one, || {
            "mult leakage".into()
        })?;
        check(max_case_leakage(&g, &pi, &flat).unwrap() == one, || {
            "max-case leakage".into()
        })?;
    }
    check(lift_value(&pi, &flat).unwrap() == one, || "lift".into())?;
    check(bayes_capacity(&flat) == one, || "Bayes capacity".into())?;
    check(lift_capacity(&flat) == one, || "lift capacity".into())?;
    Ok("identity: capacity inf, never finitely LDP; non-interacting: every measure = 1".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "running example: lift, epsilon factor, hyper",
            running_example,
        ),
        (
            "Bayes capacity of the running channel",
            bayes_capacity_running,
        ),
        ("motivating example G vs R and compare", motivating_example),
        ("reciprocal gain realizes lift", realization),
        ("ordering chain", ordering_chain),
        ("lift capacity closed form vs grid", capacity_closed_form),
        ("pointwise gain equivalence", pointwise_gain_equivalence),
        ("correlated-secret bounds", dalenius),
        ("mutation sensitivity", mutation),
        ("degenerate channels", degenerate),
    ];
    let mut failures = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("AC{:<2} PASS  {name} ({secs:.1}s): {detail}", n + 1),
            Err(why) => {
                failures += 1;
                println!("AC{:<2} FAIL  {name} ({secs:.1}s): {why}", n + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
