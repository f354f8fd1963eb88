//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use maxent_toric::maxent::{
    direct_system, dual_system, entropy_audit, fit_algebraic, fit_numeric, model_distribution,
    moments, sample_feasible, solve_algebraic, FitOptions, MaxEntProblem, SolverKind, Targets,
};
use maxent_toric::par::Execution;
use maxent_toric::ratpoly::{
    buchberger, indexed_vars, multivariate_divide, rat, rat_int, ExponentVector, MonomialOrder,
    Polynomial, Rational, VarList,
};
use maxent_toric::toric::{
    rank, toric_ideal_generators, toric_param, toric_param_exact, ConstraintMatrix,
    DistributionVector,
};
use maxent_toric::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mat(rows: &[&[i64]]) -> ConstraintMatrix {
    ConstraintMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn dice(target: Rational) -> MaxEntProblem {
    MaxEntProblem::new(
        mat(&[&[1, 2, 3, 4, 5, 6]]),
        Targets::Moments(vec![target]),
        None,
    )
    .unwrap()
}

fn poly(text: &str, vars: &VarList) -> Polynomial {
    Polynomial::parse_in(text, vars.clone()).unwrap()
}

fn dice_fits() -> Outcome {
    let problem = dice(rat(9, 2));
    let opts = FitOptions::default();
    let start = Instant::now();
    let gis = fit_numeric(&problem, SolverKind::Gis, &opts).map_err(|e| format!("gis: {e}"))?;
    let newton =
        fit_numeric(&problem, SolverKind::Newton, &opts).map_err(|e| format!("newton: {e}"))?;
    let elapsed = start.elapsed();
    let oracle = [
        0.054_353_167_826_491_518,
        0.078_771_545_633_053_52,
        0.114_159_977_229_440_56,
        0.165_446_803_110_053_34,
        0.239_774_440_426_9,
        0.347_494_065_774_061_1,
    ];
    let mut worst_mean: f64 = 0.0;
    for fit in [&gis, &newton] {
        let mean = moments(problem.matrix(), &fit.p).unwrap()[0];
        worst_mean = worst_mean.max((mean - 4.5).abs());
        for (x, y) in fit.p.iter().zip(oracle) {
            ensure((x - y).abs() < 1e-8, || {
                format!("{:?} p differs from oracle", fit.solver)
            })?;
        }
    }
    ensure(worst_mean <= 1e-8, || format!("mean off by {worst_mean:e}"))?;
    let dxi = (gis.xi[0] - newton.xi[0]).abs();
    ensure(dxi <= 1e-6, || format!("xi differ by {dxi:e}"))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "gis {} it, newton {} it, |mean-4.5| {worst_mean:.1e}, |dxi| {dxi:.1e}, {:.0?}",
        gis.iterations, newton.iterations, elapsed
    ))
}

fn exact_algebraic_path() -> Outcome {
    let a = mat(&[&[0, 1, 2]]);
    let system = direct_system(&a, &[rat(1, 1)]).unwrap();
    let expected = poly("t1^2 - 1", system.vars());
    ensure(system.cleared() == [expected], || {
        format!("system {:?}", system.cleared())
    })?;
    let sols = solve_algebraic(&system, &MonomialOrder::lex(1)).map_err(|e| e.to_string())?;
    ensure(
        sols.len() == 1 && sols[0].exact == Some(vec![rat(1, 1)]),
        || format!("{sols:?}"),
    )?;
    let problem = MaxEntProblem::new(a, Targets::Moments(vec![rat(1, 1)]), None).unwrap();
    let alg = fit_algebraic(&problem, &MonomialOrder::lex(1)).map_err(|e| e.to_string())?;
    let third = rat(1, 3);
    ensure(
        alg.p_exact == Some(vec![third.clone(), third.clone(), third]),
        || format!("{:?}", alg.p_exact),
    )?;
    let num = fit_numeric(&problem, SolverKind::Newton, &FitOptions::default())
        .map_err(|e| e.to_string())?;
    let diff = num.p.max_abs_diff(&DistributionVector::uniform(3));
    ensure(diff <= 1e-9, || format!("numeric fit off by {diff:e}"))?;
    Ok(format!(
        "t1^2 - 1, theta = 1, p = (1/3, 1/3, 1/3), numeric diff {diff:.1e}"
    ))
}

fn rational_target_path() -> Outcome {
    let a = mat(&[&[0, 1, 2]]);
    let system = direct_system(&a, &[rat(1, 2)]).unwrap();
    let expected = poly("3*t1^2 + t1 - 1", system.vars());
    ensure(system.cleared()[0].primitive_part() == expected, || {
        format!("cleared {}", system.cleared()[0])
    })?;
    let sols = solve_algebraic(&system, &MonomialOrder::lex(1)).map_err(|e| e.to_string())?;
    let root = (-1.0 + 13f64.sqrt()) / 6.0;
    ensure(sols.len() == 1, || format!("{sols:?}"))?;
    let err = (sols[0].theta[0] - root).abs();
    ensure(err <= 1e-10, || format!("root off by {err:e}"))?;
    let oracle = [1.0, root, root * root].map(|w| w / (1.0 + root + root * root));
    let problem = MaxEntProblem::new(a, Targets::Moments(vec![rat(1, 2)]), None).unwrap();
    let fit = fit_numeric(&problem, SolverKind::Newton, &FitOptions::default())
        .map_err(|e| e.to_string())?;
    let diff = fit
        .p
        .iter()
        .zip(oracle)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    ensure(diff <= 1e-6, || format!("p off by {diff:e}"))?;
    let rounded = [0.6162, 0.2676, 0.1162];
    ensure(
        fit.p.iter().zip(rounded).all(|(x, y)| (x - y).abs() < 5e-5),
        || "4-digit values".into(),
    )?;
    Ok(format!(
        "root err {err:.1e}, p err {diff:.1e} vs quadratic formula"
    ))
}

fn empirical_dual_example() -> Outcome {
    let a = mat(&[&[0, 1]]);
    let problem = MaxEntProblem::from_samples(a.clone(), &[1, 2]).unwrap();
    let system = dual_system(&a, problem.targets()).map_err(|e| e.to_string())?;
    let vars = system.vars().clone();
    ensure(
        system.objective() == Some(&poly("t1 + t1^-1", &vars)),
        || format!("objective {:?}", system.objective().map(|p| p.to_string())),
    )?;
    ensure(system.cleared() == [poly("t1^2 - 1", &vars)], || {
        format!("{:?}", system.cleared())
    })?;
    let sols = solve_algebraic(&system, &MonomialOrder::lex(1)).map_err(|e| e.to_string())?;
    ensure(
        sols.len() == 1 && sols[0].exact == Some(vec![rat(1, 1)]),
        || format!("{sols:?}"),
    )?;
    // theta~ = exp(xi~) = 1, so xi = N xi~ = 0 and the primal theta is exp(-xi) = 1
    let p = toric_param_exact(&a, None, &[rat(1, 1)]).unwrap();
    ensure(p == [rat(1, 2), rat(1, 2)], || format!("{p:?}"))?;
    let alg = fit_algebraic(&problem, &MonomialOrder::lex(1)).map_err(|e| e.to_string())?;
    ensure(alg.p_exact == Some(vec![rat(1, 2), rat(1, 2)]), || {
        format!("{:?}", alg.p_exact)
    })?;
    Ok("objective t1 + t1^-1, cleared t1^2 - 1, theta~ = 1, p = (1/2, 1/2)".into())
}

fn independence_ideal() -> Outcome {
    let a = mat(&[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 0, 1, 0], &[0, 1, 0, 1]]);
    let gens = toric_ideal_generators(&a).map_err(|e| e.to_string())?;
    ensure(gens.len() == 1, || format!("{} generators", gens.len()))?;
    let expected = poly("p1*p4 - p2*p3", gens.vars());
    let g = &gens.binomials()[0];
    ensure(*g == expected || *g == -&expected, || {
        format!("generator {g}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..5.0)).collect();
        let p = toric_param(&a, None, &theta).unwrap();
        worst = worst.max(g.eval_f64(&p).unwrap().abs());
    }
    ensure(worst < 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!("{g}, max residual {worst:.1e} over 100 points"))
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &VarList, max_deg: i32) -> Polynomial {
    let n = vars.len();
    let terms = rng.random_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0i32; n];
        let deg = rng.random_range(0..=max_deg);
        for _ in 0..deg {
            e[rng.random_range(0..n)] += 1;
        }
        let c = rng.random_range(-5i64..=5);
        out.push((ExponentVector::new(e), rat_int(c)));
    }
    Polynomial::from_terms(vars.clone(), out, Some(false)).unwrap()
}

fn groebner_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sizes = 0;
    let mut units = 0;
    for k in 0..50 {
        let n = rng.random_range(1..=3);
        let vars = indexed_vars("x", n);
        let count = rng.random_range(1..=3);
        let gens: Vec<Polynomial> = (0..count)
            .map(|_| random_poly(&mut rng, &vars, 3))
            .collect();
        let ord = if k % 2 == 0 {
            MonomialOrder::grevlex(n)
        } else {
            MonomialOrder::lex(n)
        };
        let gb = buchberger(&gens, &ord).map_err(|e| format!("ideal {k}: {e}"))?;
        ensure(gb.is_groebner(), || {
            format!("ideal {k}: S-polynomial with nonzero normal form")
        })?;
        for g in &gens {
            ensure(gb.normal_form(g).unwrap().is_zero(), || {
                format!("ideal {k}: {g} does not reduce to 0")
            })?;
        }
        sizes += gb.len();
        units += usize::from(gb.is_unit());
    }
    for k in 0..200 {
        let n = rng.random_range(1..=3);
        let vars = indexed_vars("x", n);
        let f = random_poly(&mut rng, &vars, 4);
        let divisors: Vec<Polynomial> = (0..rng.random_range(1..=3))
            .map(|_| random_poly(&mut rng, &vars, 2))
            .filter(|g| !g.is_zero())
            .collect();
        if divisors.is_empty() {
            continue;
        }
        let ord = if k % 2 == 0 {
            MonomialOrder::lex(n)
        } else {
            MonomialOrder::grevlex(n)
        };
        let (q, r) = multivariate_divide(&f, &divisors, &ord).map_err(|e| e.to_string())?;
        let mut sum = r.clone();
        for (qi, gi) in q.iter().zip(&divisors) {
            sum = &sum + &(qi * gi);
        }
        ensure(sum == f, || format!("division identity fails for {f}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "50 ideals ({sizes} basis elements, {units} unit ideals), 200 divisions, {elapsed:.1?}"
    ))
}

fn random_problem(rng: &mut ChaCha8Rng) -> MaxEntProblem {
    loop {
        let m = rng.random_range(3..=5);
        let d = rng.random_range(1..=2);
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|_| (0..m).map(|_| rng.random_range(0..=3)).collect())
            .collect();
        let a = ConstraintMatrix::new(rows).unwrap();
        if rank(&a.with_ones_row()) < d + 1 {
            continue;
        }
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
        let q = DistributionVector::from_weights(&w).unwrap();
        let t = moments(&a, &q).unwrap();
        return MaxEntProblem::with_targets(a, &t).unwrap();
    }
}

fn entropy_maximality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    let mut tightest = f64::INFINITY;
    for k in 0..10 {
        let plain = random_problem(&mut rng);
        let m = plain.matrix().m();
        let prior: Vec<Rational> = (0..m).map(|_| rat(rng.random_range(1..=9), 4)).collect();
        let weighted = plain.clone().with_prior(prior).unwrap();
        for (label, problem) in [("plain", &plain), ("prior", &weighted)] {
            let fit = fit_numeric(problem, SolverKind::Newton, &FitOptions::default())
                .map_err(|e| format!("problem {k} {label}: {e}"))?;
            let samples = sample_feasible(problem, &fit.p, 1000, 1000 + k, Execution::Parallel)
                .map_err(|e| format!("problem {k}: {e}"))?;
            let report = entropy_audit(problem, &fit, &samples, 1e-9, Execution::Parallel)
                .map_err(|e| e.to_string())?;
            ensure(report.passed(), || {
                format!("problem {k} {label}: {report:?}")
            })?;
            tightest = tightest.min(if problem.prior().is_some() {
                report.min_sampled_kl - report.fitted_kl
            } else {
                report.fitted_entropy - report.max_sampled_entropy
            });
            checked += samples.len();
        }
    }
    Ok(format!(
        "{checked} feasible samples, smallest margin {tightest:.1e}"
    ))
}

fn dual_consistency() -> Outcome {
    let a = mat(&[&[0, 1, 2, 3, 1], &[1, 0, 2, 1, 3]]);
    let targets = [2i64, 1];
    let system = dual_system(
        &a,
        &Targets::Moments(targets.iter().map(|&t| rat_int(t)).collect()),
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_grad: f64 = 0.0;
    for _ in 0..100 {
        let theta: Vec<f64> = (0..2).map(|_| rng.random_range(0.3..3.0)).collect();
        for k in 0..2 {
            let h = 1e-6 * theta[k];
            let (mut up, mut down) = (theta.clone(), theta.clone());
            up[k] += h;
            down[k] -= h;
            let fd = (system.dual_objective(&up).unwrap() - system.dual_objective(&down).unwrap())
                / (2.0 * h);
            let sym = system.equations()[k].eval_f64(&theta).unwrap();
            worst_grad = worst_grad.max((fd - sym).abs() / sym.abs().max(1.0));
        }
    }
    ensure(worst_grad <= 1e-6, || {
        format!("gradient mismatch {worst_grad:e}")
    })?;

    let h = [0.5, 2.0, 1.0, 1.5, 0.25];
    let mut worst_dual: f64 = 0.0;
    let mut worst_param: f64 = 0.0;
    for _ in 0..100 {
        let xi: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
        let theta_dual: Vec<f64> = xi.iter().map(|x| x.exp()).collect();
        let (_, log_z) = model_distribution(&a, &xi, None).unwrap();
        let shift: f64 = xi.iter().zip(targets).map(|(x, t)| x * t as f64).sum();
        let lhs = system.dual_objective(&theta_dual).unwrap().ln();
        worst_dual = worst_dual.max((lhs - (log_z + shift)).abs());

        let theta: Vec<f64> = xi.iter().map(|x| (-x).exp()).collect();
        for prior in [None, Some(&h[..])] {
            let (p, _) = model_distribution(&a, &xi, prior).unwrap();
            let q = toric_param(&a, prior, &theta).unwrap();
            worst_param = worst_param.max(p.max_abs_diff(&q));
        }
    }
    ensure(worst_dual <= 1e-12, || {
        format!("duality gap {worst_dual:e}")
    })?;
    ensure(worst_param <= 1e-12, || {
        format!("parametrization gap {worst_param:e}")
    })?;
    Ok(format!(
        "gradient {worst_grad:.1e}, log-dual {worst_dual:.1e}, parametrization {worst_param:.1e}"
    ))
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_maxent")
}

fn run_cli(args: &[&str], stdin: Option<&[u8]>) -> (i32, Vec<u8>, Vec<u8>) {
    let mut child = Command::new(binary())
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn maxent");
    {
        let mut pipe = child.stdin.take().expect("stdin");
        if let Some(bytes) = stdin {
            pipe.write_all(bytes).expect("write stdin");
        }
    }
    let out = child.wait_with_output().expect("wait");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn infeasibility() -> Outcome {
    let problem = dice(rat(13, 2));
    let mut notes = Vec::new();
    for solver in [SolverKind::Gis, SolverKind::Newton] {
        let opts = FitOptions::default();
        let res = catch_unwind(AssertUnwindSafe(|| fit_numeric(&problem, solver, &opts)))
            .map_err(|_| format!("{solver:?} panicked"))?;
        match res {
            Err(Error::InfeasibleMoments { iterations, .. }) => {
                ensure(iterations <= solver.default_max_iter(), || {
                    format!("{iterations} iterations")
                })?;
                notes.push(format!("{solver:?} stopped after {iterations} it"));
            }
            other => return Err(format!("{solver:?}: {other:?}")),
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dice.json");
    std::fs::write(
        &path,
        r#"{"m":6,"constraints":[{"name":"mean","values":[1,2,3,4,5,6],"target":"6.5"}]}"#,
    )
    .unwrap();
    for solver in ["gis", "newton"] {
        let (code, _, err) = run_cli(&["fit", "--solver", solver, path.to_str().unwrap()], None);
        ensure(code == 1, || {
            format!(
                "cli {solver} exit {code}: {}",
                String::from_utf8_lossy(&err)
            )
        })?;
    }
    Ok(format!("{}, cli exit 1", notes.join(", ")))
}

fn cli_round_trip() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let dice = write(
        "dice.json",
        r#"{"m":6,"constraints":[{"name":"mean","values":[1,2,3,4,5,6],"target":"9/2"}]}"#,
    );
    let two = write(
        "two.json",
        r#"{"m":4,"constraints":[{"values":[0,1,2,1],"target":"6/5"},{"values":[1,0,1,2],"target":1}],"prior":[1,2,1,"1/2"]}"#,
    );
    let emp = write(
        "emp.json",
        r#"{"m":3,"constraints":[{"values":[0,1,-2]}],"samples":[1,2,2,3]}"#,
    );
    let ind = write(
        "ind.json",
        r#"{"m":4,"constraints":[{"values":[1,1,0,0]},{"values":[0,0,1,1]},{"values":[1,0,1,0]},{"values":[0,1,0,1]}]}"#,
    );

    let mut fits = 0;
    for spec in [&dice, &two, &emp] {
        for solver in ["gis", "newton", "groebner"] {
            let (code, fit, err) = run_cli(&["fit", "--solver", solver, spec], None);
            ensure(code == 0, || {
                format!("fit {solver} {spec}: {}", String::from_utf8_lossy(&err))
            })?;
            let (code, check, _) = run_cli(&["check", spec, "--dist", "-"], Some(&fit));
            let report: serde_json::Value =
                serde_json::from_slice(&check).map_err(|e| e.to_string())?;
            ensure(code == 0 && report["pass"] == true, || {
                format!("check {solver} {spec}: {report}")
            })?;
            fits += 1;
        }
    }

    let mut reparsed = 0;
    let mut emitted = Vec::new();
    for (cmd, spec) in [
        ("system", &dice),
        ("system", &two),
        ("dual", &emp),
        ("dual", &ind),
        ("ideal", &ind),
        ("ideal", &two),
    ] {
        let (code, out, err) = run_cli(&[cmd, "--format", "json", spec], None);
        if cmd == "dual" && spec == &ind {
            // no targets: an input error, not a crash
            ensure(code == 2, || format!("dual without targets exit {code}"))?;
            continue;
        }
        ensure(code == 0, || {
            format!("{cmd} {spec}: {}", String::from_utf8_lossy(&err))
        })?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let vars: Vec<String> = v["vars"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_str().unwrap().to_string())
            .collect();
        let mut texts: Vec<String> = Vec::new();
        for key in ["equations", "cleared", "generators"] {
            if let Some(arr) = v[key].as_array() {
                texts.extend(arr.iter().map(|x| x.as_str().unwrap().to_string()));
            }
        }
        if let Some(o) = v["objective"].as_str() {
            texts.push(o.to_string());
        }
        for t in texts {
            let p = Polynomial::parse(&t, &vars).map_err(|e| format!("{t}: {e}"))?;
            ensure(p.to_string() == t, || format!("{t} reprints as {p}"))?;
            reparsed += 1;
        }
        emitted.push((cmd, spec.clone(), out));
    }
    let (_, sys_text, _) = run_cli(&["system", &dice], None);
    ensure(!sys_text.is_empty(), || "empty system output".into())?;

    let mut reruns = 0;
    for (cmd, spec, first) in &emitted {
        let (_, again, _) = run_cli(&[cmd, "--format", "json", spec], None);
        ensure(&again == first, || {
            format!("{cmd} {spec} not byte-identical")
        })?;
        reruns += 1;
    }
    for solver in ["gis", "newton", "groebner"] {
        let (_, a, _) = run_cli(&["fit", "--solver", solver, &dice, &two, &emp], None);
        let (_, b, _) = run_cli(&["fit", "--solver", solver, &dice, &two, &emp], None);
        ensure(a == b && !a.is_empty(), || {
            format!("fit {solver} not byte-identical")
        })?;
        reruns += 1;
    }
    Ok(format!(
        "{fits} fit/check pairs, {reparsed} polynomials reparsed, {reruns} identical reruns"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("dice fit with GIS and Newton", dice_fits),
        ("exact algebraic path, T = 1", exact_algebraic_path),
        (
            "rational-target algebraic path, T = 1/2",
            rational_target_path,
        ),
        ("empirical dual example", empirical_dual_example),
        ("toric ideal of 2x2 independence", independence_ideal),
        ("Groebner engine suite", groebner_suite),
        (
            "entropy maximality and minimum divergence",
            entropy_maximality,
        ),
        ("dual consistency", dual_consistency),
        ("infeasible targets", infeasibility),
        ("CLI round trip", cli_round_trip),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
