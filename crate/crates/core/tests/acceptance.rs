//! Acceptance suite: eight criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the console.
//! Reference values are computed here, independently of the library paths
//! they check, wherever an independent route exists.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use limitlab::convergence::{
    coincidence_report, escaped_mass, extended_limit, identity_row, tightness_check, Classification, Ladder,
    LimitConfig, TightnessOutcome,
};
use limitlab::families::{binomial, default_k_max, poisson_truncated, record_index};
use limitlab::oracle::{enumerate_exact, simulate, DEFAULT_WORKERS};
use limitlab::uncertain::{transmission_range, DigitPrefix};
use limitlab::{
    tv_distance, BigRational, DiscreteMeasure, EventRule, EventSet, ExtendedReal, Mass, MeasureFamily, TailPolicy,
};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(v: i64) -> ExtendedReal {
    ExtendedReal::from_int(v)
}

fn pow(q: &BigRational, k: u64) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * q)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_identity() -> Outcome {
    let mut checked = 0;
    for k in 1..=9 {
        let q = r(k, 10);
        for n in 1..=50u64 {
            let row = identity_row(&q, n).map_err(|e| e.to_string())?;
            let expected = &q - pow(&q, n);
            ensure(row.residual.is_zero(), || format!("q={q} n={n}: residual {}", row.residual))?;
            ensure(row.lhs == expected && row.rhs == expected, || {
                format!("q={q} n={n}: sides {} and {} differ from q - q^n", row.lhs, row.rhs)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (q, n) pairs, residual exactly 0, both sides q - q^n"))
}

/// Laws of Xₙ, Yₙ, Zₙ written out from their formulas.
fn formula_laws(q: &BigRational, n: u64) -> [Vec<(i64, BigRational)>; 3] {
    let p = BigRational::one() - q;
    let x = vec![(0, q.clone()), (1, p.clone())];
    let y = vec![(0, pow(q, n)), (1, BigRational::one() - pow(q, n))];
    let mut z: Vec<(i64, BigRational)> = (1..n).map(|j| (j as i64, &p * pow(q, n - j))).collect();
    z.push((n as i64, &p + pow(q, n)));
    [x, y, z]
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for q in [r(3, 10), r(1, 2), r(7, 10)] {
        for n in 1..=12u64 {
            let pm = enumerate_exact(&q, n).map_err(|e| e.to_string())?;
            for (name, law, formula) in [("X", &pm.x, 0), ("Y", &pm.y, 1), ("Z", &pm.z, 2)] {
                let expected = &formula_laws(&q, n)[formula];
                let want =
                    DiscreteMeasure::from_atoms(expected.iter().map(|(v, m)| (int(*v), m.clone()))).unwrap();
                ensure(*law == want, || format!("{name}_{n} at q={q}: {law} != {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} enumerated laws equal their closed forms exactly"))
}

fn tightness_verdicts() -> Outcome {
    let horizon = 500;
    let b_max = BigRational::from_integer((horizon / 2).into());
    let q = r(1, 2);
    let eps_esc = 0.5;
    for fam in [
        MeasureFamily::bernoulli_marginal(q.clone()).unwrap(),
        MeasureFamily::running_max(q.clone()).unwrap(),
    ] {
        for eps in [0.1, 0.01] {
            let v = tightness_check(&fam, eps, horizon, &b_max).map_err(|e| e.to_string())?;
            let closed01: EventSet = "[0,1]".parse().unwrap();
            ensure(v.interval() == Some(&closed01), || format!("{fam} at eps={eps}: {:?}", v.outcome))?;
        }
    }

    let record = MeasureFamily::record_index(q.clone()).unwrap();
    let v = tightness_check(&record, eps_esc, horizon, &b_max).map_err(|e| e.to_string())?;
    let TightnessOutcome::NotTight { witness } = &v.outcome else {
        return Err("record index reported tight".into());
    };
    ensure(witness.len() == 251, || format!("expected 251 scanned bounds, got {}", witness.len()))?;
    let one_minus_q = BigRational::one() - &q;
    for w in witness {
        let n = w.n;
        ensure(BigRational::from_integer(n.into()) == w.bound.floor() + BigRational::one(), || {
            format!("bound {} first escapes at n={n}", w.bound)
        })?;
        let top = &one_minus_q + pow(&q, n);
        let top_from_law = record_index::<BigRational>(&q, n).unwrap().mass_at(&int(n as i64));
        ensure(top_from_law == top && top > one_minus_q, || format!("mu_{n}({{{n}}}) = {top_from_law}"))?;
        ensure((w.mass_outside - ToPrimitive::to_f64(&top).unwrap()).abs() < 1e-15, || {
            format!("witness mass {} at n={n}", w.mass_outside)
        })?;
    }
    // every scanned n, not only the witness indices
    for n in 1..=horizon {
        let top = &one_minus_q + pow(&q, n);
        ensure(top > one_minus_q, || format!("mu_{n}({{{n}}}) not above 1-q"))?;
    }

    let walk = tightness_check(&MeasureFamily::dirac_walk(), eps_esc, horizon, &b_max).map_err(|e| e.to_string())?;
    ensure(!walk.is_tight(), || "dirac walk reported tight".into())?;
    Ok(format!(
        "lambda, gamma tight on [0,1] at eps 0.1, 0.01; mu, delta not tight at eps = 1-q = {eps_esc}; mu_n({{n}}) = 1-q+q^n > 1-q for n <= {horizon}"
    ))
}

fn escape_accounting() -> Outcome {
    let cfg = LimitConfig::default();
    let horizon = 200;
    let record = MeasureFamily::record_index(r(1, 2)).unwrap();
    let acc = escaped_mass(&record, &Ladder::for_horizon(horizon), &cfg);
    let plus = acc.mass_to_plus_inf.value().ok_or("escape to +inf did not settle")?;
    ensure((plus - 1.0).abs() <= 1e-9, || format!("escaped mass {plus}"))?;
    // total from the lag masses: (1-q) + (1-q) Σ_{k≥1} q^k
    let q = 0.5f64;
    let series = (1.0 - q) + (1.0 - q) * (1..200).map(|k| q.powi(k)).sum::<f64>();
    ensure((series - plus).abs() <= 1e-9, || format!("series total {series}"))?;
    let lim = extended_limit(&record, horizon, &cfg).ok_or("no confirmed extended limit")?;
    let inf = DiscreteMeasure::<f64>::dirac(ExtendedReal::PosInf);
    ensure(lim == inf, || format!("extended limit {lim}"))?;
    let on_r = lim.measure_of(&EventSet::real_line());
    ensure(on_r == 0.0, || format!("[lim mu_n](R) = {on_r}"))?;
    Ok(format!("escaped to +inf {plus}; extended limit {lim}; [lim mu_n](R) = {on_r}"))
}

fn coincidence_outcomes() -> Outcome {
    let cfg = LimitConfig::default();
    let n = 200;
    let q = r(1, 2);
    let close = |a: Option<f64>, b: f64| a.is_some_and(|v| (v - b).abs() <= 1e-9);

    let ex1 = coincidence_report(&MeasureFamily::dirac_walk(), &EventRule::singleton_shift(), n, &cfg);
    ensure(
        ex1.classification == Classification::LimitNotAProbability
            && close(ex1.numeric_limit, 1.0)
            && ex1.limit_event.in_real().is_none(),
        || format!("ex1: {:?} {:?}", ex1.classification, ex1.numeric_limit),
    )?;

    let ex2 = coincidence_report(
        &MeasureFamily::dirac_recip(),
        &EventRule::identity("(-inf,0]".parse().unwrap()),
        n,
        &cfg,
    );
    ensure(
        ex2.classification == Classification::Mismatch
            && close(ex2.numeric_limit, 0.0)
            && close(ex2.measure_side_r, 1.0),
        || format!("ex2: {:?} {:?} {:?}", ex2.classification, ex2.numeric_limit, ex2.measure_side_r),
    )?;

    let ex3 = coincidence_report(&MeasureFamily::dirac_recip(), &EventRule::singleton_shift(), n, &cfg);
    ensure(
        ex3.classification == Classification::LimitNotAProbability && close(ex3.numeric_limit, 0.0),
        || format!("ex3: {:?} {:?}", ex3.classification, ex3.numeric_limit),
    )?;

    let record = MeasureFamily::record_index(q.clone()).unwrap();
    let ex5_top = coincidence_report(&record, &EventRule::singleton_shift(), n, &cfg);
    let ex5_below = coincidence_report(&record, &EventRule::ray_growth(), n, &cfg);
    ensure(
        ex5_top.classification == Classification::LimitNotAProbability
            && close(ex5_top.numeric_limit, 0.5)
            && ex5_below.classification == Classification::LimitNotAProbability
            && close(ex5_below.numeric_limit, 0.5),
        || format!("ex5: {:?} {:?}", ex5_top.classification, ex5_below.classification),
    )?;

    for (name, fam, expected) in [
        ("ex7", MeasureFamily::bernoulli_marginal(r(3, 10)).unwrap(), [0.3, 0.7]),
        ("ex8", MeasureFamily::running_max(q.clone()).unwrap(), [0.0, 1.0]),
    ] {
        for (a, want) in [0, 1].into_iter().zip(expected) {
            let rep = coincidence_report(&fam, &EventRule::identity(EventSet::singleton(a)), n, &cfg);
            ensure(
                rep.classification == Classification::Coincides
                    && close(rep.numeric_limit, want)
                    && close(rep.measure_side_r, want),
                || format!("{name} at {{{a}}}: {:?} {:?}", rep.classification, rep.numeric_limit),
            )?;
        }
    }
    Ok("ex1, ex3, ex5 limit_not_a_probability; ex2 mismatch (0 vs 1); ex7, ex8 coincide".into())
}

/// `ln C(n, k)` from the exact integer coefficient.
fn ln_choose(n: u64, k: u64) -> f64 {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c.to_f64().unwrap().ln()
}

/// TV between Bin(n, c/n) and Poisson(c) by direct summation of both pmfs.
fn tv_by_summation(n: u64, c: f64, terms: u64) -> f64 {
    let p = c / n as f64;
    let mut poisson = (-c).exp();
    let mut seen = 0.0;
    let mut sum = 0.0;
    for k in 0..=terms.max(n) {
        let b = if k <= n {
            (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        } else {
            0.0
        };
        sum += (b - poisson).abs();
        seen += poisson;
        poisson *= c / (k + 1) as f64;
    }
    0.5 * (sum + (1.0 - seen).max(0.0))
}

fn poisson_limit() -> Outcome {
    let c = BigRational::one();
    let limit: DiscreteMeasure<f64> = poisson_truncated(&c, default_k_max(&c), TailPolicy::LumpAtKmax).unwrap();
    let mut tvs = Vec::new();
    for n in [10u64, 100, 1000] {
        let p = r(1, n as i64);
        let tv = tv_distance(&binomial::<f64>(n, &p).unwrap(), &limit);
        let reference = tv_by_summation(n, 1.0, 60);
        ensure((tv - reference).abs() <= 1e-12, || format!("n={n}: library {tv} vs summation {reference}"))?;
        ensure(tv <= 1.0 / n as f64, || format!("n={n}: tv {tv} above 1/n"))?;
        tvs.push(tv);
    }
    ensure(tvs.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {tvs:?}"))?;
    Ok(format!("tv at n = 10, 100, 1000: {:.4e}, {:.4e}, {:.4e}", tvs[0], tvs[1], tvs[2]))
}

fn monte_carlo() -> Outcome {
    let q = r(1, 2);
    let a = simulate(&q, 3, 1_000_000, 42, DEFAULT_WORKERS).map_err(|e| e.to_string())?;
    let b = simulate(&q, 3, 1_000_000, 42, DEFAULT_WORKERS).map_err(|e| e.to_string())?;
    let exact = enumerate_exact(&q, 3).unwrap();
    let mut worst = 0.0f64;
    for v in 1..=3u32 {
        let want = exact.z.mass_at(&int(i64::from(v)));
        let want = Mass::to_f64(&want);
        let err = (a.z.frequency(v) - want).abs();
        ensure(err < 0.005, || format!("Z=3 freq {} vs {want}", a.z.frequency(v)))?;
        worst = worst.max(err);
    }
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    ensure(ja.as_bytes() == jb.as_bytes(), || "reruns differ".into())?;
    Ok(format!("max |freq - exact| = {worst:.2e}; rerun byte-identical ({} bytes)", ja.len()))
}

fn uncertain_intervals() -> Outcome {
    let mut prefix = DigitPrefix::decimal(&[1]).unwrap();
    for m in 1..=30usize {
        let ten_m = (0..m).fold(BigInt::one(), |acc, _| acc * 10);
        let want = BigRational::new(BigInt::one(), ten_m);
        let iv = prefix.interval();
        ensure(iv.width() == want && prefix.width() == want, || format!("m={m}: width {}", iv.width()))?;
        let child = prefix.refine(((m * 7) % 10) as u32).unwrap();
        let civ = child.interval();
        ensure(civ.is_within(&iv) && civ != iv, || format!("m={m}: {civ} not strictly inside {iv}"))?;
        prefix = child;
    }
    let range = transmission_range(&"0.7".parse().unwrap()).map_err(|e| e.to_string())?;
    let inside = 0.75f64.cos().powi(2);
    let outside = 0.9f64.cos().powi(2);
    ensure(range.contains(inside), || format!("{range} misses cos^2(0.75) = {inside}"))?;
    ensure(!range.contains(outside), || format!("{range} contains cos^2(0.9) = {outside}"))?;
    Ok(format!("widths 10^-m exact for m <= 30, chain strictly nested; cos^2 over [0.7, 0.8) in {range}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("exact identity", exact_identity, Duration::from_secs(1)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(10)),
        ("tightness verdicts", tightness_verdicts, Duration::from_secs(5)),
        ("escape accounting", escape_accounting, Duration::from_secs(30)),
        ("coincidence classifier", coincidence_outcomes, Duration::from_secs(30)),
        ("poisson limit", poisson_limit, Duration::from_secs(1)),
        ("monte carlo consistency", monte_carlo, Duration::from_secs(30)),
        ("uncertain intervals", uncertain_intervals, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}; took {took:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
