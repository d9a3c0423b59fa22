//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrt_core::linalg::{classical_kl, quantum_relative_entropy, von_neumann_entropy, ComplexMatrix, DensityMatrix};
use qrt_core::measures::{
    check_consistency, check_monotonicity, inconsistency_detector, relative_entropy_of_resource, uniqueness_report,
    FreeSpec, ResourceContext, ResourceMeasure, SandwichStatus, SolverConfig, Verdict, MONOTONICITY_SLACK, SANDWICH_TOL,
};
use qrt_core::model::{load_instance, QrtInstance, State};
use qrt_core::rates::{ExtRational, RateConfig, Replication};
use qrt_core::synth::random_instance;
use qrtlab::{execute, Command, OutputFormat, RunConfig};

const RANDOM_INSTANCES: u64 = 200;
const N_MAX: usize = 3;
const RER_TOL: f64 = 1e-4;
const FW_RESIDUAL: f64 = 1e-6;
const SELF_ENTROPY_TOL: f64 = 1e-10;
const KL_TOL: f64 = 1e-9;
const MONOTONICITY_WORDS: usize = 100;

type Outcome = Result<String, String>;

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn load(name: &str) -> QrtInstance {
    load_instance(&spec(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn context(q: &QrtInstance) -> ResourceContext<'_> {
    ResourceContext::new(q, RateConfig { n_max: N_MAX, ..RateConfig::default() }).expect("context builds")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn roster(ctx: &ResourceContext<'_>) -> Vec<(usize, String, State)> {
    ctx.levels
        .iter()
        .flat_map(|(&l, d)| d.relation.roster.iter().map(move |r| (l, r.label.clone(), r.state.clone())))
        .collect()
}

/// Runs `f` on every random instance, reporting the first failure by seed.
fn over_random(mut f: impl FnMut(&mut ResourceContext<'_>) -> Result<(), String>) -> Result<(), String> {
    for seed in 0..RANDOM_INSTANCES {
        let q = random_instance(seed);
        let mut ctx = context(&q);
        f(&mut ctx).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}

fn one_bit_catalyst_reproduction() -> Outcome {
    let q = load("one_bit_catalyst.json");
    let mut ctx = context(&q);
    for n in 1..=3 {
        let free = ctx.level(n).map_err(|e| e.to_string())?.free.labels().join(",");
        ensure(free == "0".repeat(n), || format!("F at level {n} is {{{free}}}"))?;
    }
    let d1 = ctx.level(1).map_err(|e| e.to_string())?;
    let g: Vec<&str> = d1.maximal.members.iter().map(|&i| d1.relation.roster[i].label.as_str()).collect();
    ensure(g == ["1"], || format!("G at level 1 is {g:?}"))?;
    let one = q.state(1, "1").map_err(|e| e.to_string())?;
    let rep = ctx.engine.replication(&one).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Replication::Infinite, || format!("replication is {}", rep.verdict))?;
    let w = rep.witness.ok_or("no replication witness")?;
    ensure(ctx.engine.witness_replays(&w, &one, &one).unwrap_or(false), || "witness does not replay".into())?;
    let rd = ctx.distillable_resource(&one).map_err(|e| e.to_string())?;
    let rc = ctx.resource_cost(&one).map_err(|e| e.to_string())?;
    ensure(rd.value() == f64::INFINITY && rc.value() == 0.0, || format!("R_D = {rd}, R_C = {rc}"))?;
    Ok(format!("F = {{0ⁿ}} for n ≤ 3, G = {{1}}, replication INFINITE ({} → {} replayed), R_D = {rd}, R_C = {rc}", w.n, w.m))
}

fn maximal_existence() -> Outcome {
    over_random(|ctx| {
        for (level, d) in &ctx.levels {
            ensure(!d.maximal.members.is_empty(), || format!("level {level}: empty maximal set"))?;
            ensure(d.maximal.upper_bounds.iter().all(Option::is_some), || format!("level {level}: state without a maximal bound"))?;
        }
        Ok(())
    })?;
    Ok(format!("{RANDOM_INSTANCES} instances"))
}

fn maximal_not_free() -> Outcome {
    let mut checked = 0;
    over_random(|ctx| {
        for (level, d) in &ctx.levels {
            let free: Vec<bool> = d.relation.roster.iter().map(|r| d.free.contains(&r.state)).collect();
            if free.iter().all(|&f| f) {
                continue;
            }
            checked += 1;
            ensure(d.maximal.members.iter().all(|&g| !free[g]), || format!("level {level}: maximal state is free"))?;
        }
        Ok(())
    })?;
    Ok(format!("{checked} levels with a non-free state"))
}

fn dichotomy() -> Outcome {
    let (mut unit, mut infinite) = (0, 0);
    over_random(|ctx| {
        for (_, label, s) in roster(ctx) {
            let rep = ctx.engine.replication(&s).map_err(|e| e.to_string())?;
            let est = ctx.engine.estimate(&s, &s).map_err(|e| e.to_string())?;
            let amplifies = est.witnesses.iter().any(|w| w.m > w.n);
            match rep.verdict {
                Replication::Unit => {
                    unit += 1;
                    ensure(!amplifies, || format!("{label}: UNIT despite an amplifying witness"))?;
                }
                Replication::Infinite => {
                    infinite += 1;
                    let w = rep.witness.as_ref().ok_or_else(|| format!("{label}: INFINITE without a witness"))?;
                    ensure(w.m > w.n, || format!("{label}: witness {} → {} does not amplify", w.n, w.m))?;
                    if ctx.engine.can_replay(&w.plan) {
                        let ok = ctx.engine.witness_replays(w, &s, &s).map_err(|e| e.to_string())?;
                        ensure(ok, || format!("{label}: witness does not replay"))?;
                    }
                }
                Replication::Unknown => return Err(format!("{label}: UNKNOWN on a discrete instance")),
            }
        }
        Ok(())
    })?;
    Ok(format!("{unit} UNIT, {infinite} INFINITE, none in between"))
}

fn catalytic_free(ctx: &mut ResourceContext<'_>) -> Result<bool, String> {
    for (_, _, s) in roster(ctx) {
        let free = ctx.is_free(&s).map_err(|e| e.to_string())?;
        if !free && ctx.engine.replication(&s).map_err(|e| e.to_string())?.verdict != Replication::Unit {
            return Ok(false);
        }
    }
    Ok(true)
}

fn has_resource(ctx: &ResourceContext<'_>, level: usize) -> Result<bool, String> {
    for r in &ctx.level(level).map_err(|e| e.to_string())?.relation.roster {
        if !ctx.is_free(&r.state).map_err(|e| e.to_string())? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn distillation_below_cost() -> Outcome {
    let mut eligible = 0;
    over_random(|ctx| {
        if !catalytic_free(ctx)? {
            return Ok(());
        }
        eligible += 1;
        for (level, label, s) in roster(ctx) {
            // The inequality presumes a resource state on the system.
            if !has_resource(ctx, level)? {
                continue;
            }
            let rd = ctx.distillable_resource(&s).map_err(|e| e.to_string())?;
            let rc = ctx.resource_cost(&s).map_err(|e| e.to_string())?;
            ensure(rd.units <= rc.units, || format!("{label}: R_D = {rd} > R_C = {rc}"))?;
        }
        Ok(())
    })?;
    ensure(eligible > 0, || "no instance had all resource states UNIT".into())?;
    Ok(format!("{eligible} instances with every resource state UNIT"))
}

fn discrete_contexts() -> Vec<QrtInstance> {
    let mut qs: Vec<QrtInstance> = ["one_bit_catalyst.json", "swap_only.json", "two_maximal.json"].into_iter().map(load).collect();
    qs.extend((0..RANDOM_INSTANCES).map(random_instance));
    qs
}

fn weak_subadditivity() -> Outcome {
    let mut cases = 0;
    for q in discrete_contexts() {
        let ctx = context(&q);
        for (level, label, s) in roster(&ctx).into_iter().filter(|(l, _, _)| *l == 1) {
            let two = s.tensor_power(2);
            if !ctx.levels.contains_key(&(2 * level)) {
                continue;
            }
            let k = ExtRational::ratio(2, 1);
            let (rd, rc) = (ctx.distillable_resource(&s).unwrap(), ctx.resource_cost(&s).unwrap());
            let (rd2, rc2) = (ctx.distillable_resource(&two).unwrap(), ctx.resource_cost(&two).unwrap());
            cases += 1;
            ensure(rd2.units <= rd.units.mul(&k) && rc2.units <= rc.units.mul(&k), || {
                format!("{}: {label}: R_D(ψ⊗ψ) = {rd2} vs {rd}, R_C(ψ⊗ψ) = {rc2} vs {rc}", q.name)
            })?;
        }
    }
    Ok(format!("{cases} level-1 states, exact"))
}

fn maximal_sufficiency() -> Outcome {
    let mut cases = 0;
    for q in discrete_contexts() {
        let ctx = context(&q);
        for (_, label, s) in roster(&ctx) {
            cases += 1;
            let (rd, rc) = (ctx.distillable_resource(&s).unwrap(), ctx.resource_cost(&s).unwrap());
            let (rd_all, rc_all) = (ctx.distillable_over_roster(&s).unwrap(), ctx.cost_over_roster(&s).unwrap());
            ensure(rd.units == rd_all.units && rc.units == rc_all.units, || {
                format!("{}: {label}: over G ({rd}, {rc}), over the roster ({rd_all}, {rc_all})", q.name)
            })?;
        }
    }
    Ok(format!("{cases} roster states, exact"))
}

fn dephased(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let diag: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re).collect();
    DensityMatrix::new(ComplexMatrix::diag_real(&diag), rho.subsystem_dims().to_vec()).expect("diagonal state")
}

fn rer_numeric() -> Outcome {
    let q = load("coherence_qubit.json");
    let mut ctx = context(&q);
    let plus = q.state(1, "+").map_err(|e| e.to_string())?;
    let psi = plus.as_density().ok_or("numeric state")?.clone();
    let oracle = von_neumann_entropy(&dephased(&psi)).unwrap() - von_neumann_entropy(&psi).unwrap();
    let free = FreeSpec::ConvexHull(ctx.free_extremes().map_err(|e| e.to_string())?);
    let sol = relative_entropy_of_resource(&psi, &free, &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure((sol.value - oracle).abs() <= RER_TOL, || format!("R_R = {} against oracle {oracle}", sol.value))?;
    ensure(sol.residual < FW_RESIDUAL, || format!("residual {:e}", sol.residual))?;
    let mono = check_monotonicity(&mut ctx, &ResourceMeasure::rer(), q.max_level, MONOTONICITY_WORDS, 42)
        .map_err(|e| e.to_string())?;
    ensure(mono.verdict.is_pass() && mono.samples == MONOTONICITY_WORDS, || {
        format!("monotonicity {} over {} samples", mono.verdict.tag(), mono.samples)
    })?;
    Ok(format!(
        "R_R(|+⟩) = {:.9} (oracle {oracle:.9}), residual {:.1e}, {} words within slack {MONOTONICITY_SLACK:e}",
        sol.value, sol.residual, mono.samples
    ))
}

fn random_state<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = qrt_core::linalg::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let g = a.try_mul(&a.adjoint()).unwrap();
    let t = g.trace().re;
    DensityMatrix::new(g.scale_real(1.0 / t).hermitian_part(), vec![d]).unwrap()
}

fn relative_entropy_core() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_self: f64 = 0.0;
    for d in [2, 3, 4] {
        for _ in 0..10 {
            let rho = random_state(&mut rng, d);
            worst_self = worst_self.max(quantum_relative_entropy(&rho, &rho).unwrap().abs());
        }
    }
    ensure(worst_self <= SELF_ENTROPY_TOL, || format!("D(ψ‖ψ) reached {worst_self:e}"))?;
    let mut worst_kl: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.gen_range(2..=4);
        let mut p: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let mut r: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let (sp, sr): (f64, f64) = (p.iter().sum(), r.iter().sum());
        p.iter_mut().for_each(|x| *x /= sp);
        r.iter_mut().for_each(|x| *x /= sr);
        let rho = DensityMatrix::new(ComplexMatrix::diag_real(&p), vec![d]).unwrap();
        let sigma = DensityMatrix::new(ComplexMatrix::diag_real(&r), vec![d]).unwrap();
        let diff = (quantum_relative_entropy(&rho, &sigma).unwrap() - classical_kl(&p, &r)).abs();
        worst_kl = worst_kl.max(diff);
    }
    ensure(worst_kl <= KL_TOL, || format!("KL disagreement {worst_kl:e}"))?;
    let zero = DensityMatrix::basis(&[2], 0);
    let one = DensityMatrix::basis(&[2], 1);
    let mixed = DensityMatrix::maximally_mixed(vec![2]);
    let cases = [(&one, &zero), (&mixed, &zero)];
    for (a, b) in cases {
        let v = quantum_relative_entropy(a, b).unwrap();
        ensure(v == f64::INFINITY, || format!("support violation gave {v}"))?;
    }
    Ok(format!("max |D(ψ‖ψ)| = {worst_self:.1e}, max KL gap = {worst_kl:.1e} over 100 pairs, support cases +∞"))
}

fn consistency_machinery() -> Outcome {
    let swap = load("swap_only.json");
    let mut ctx = context(&swap);
    let ones = ResourceMeasure::count_ones();
    let v = check_consistency(&mut ctx, &ones, N_MAX).map_err(|e| e.to_string())?;
    ensure(v.verdict.is_pass(), || format!("swap_only consistency {}", v.verdict.tag()))?;
    let one = swap.state(1, "1").unwrap();
    let report = uniqueness_report(&mut ctx, &ones, std::slice::from_ref(&one), N_MAX).map_err(|e| e.to_string())?;
    let e = &report.sandwich[0];
    let tight = [e.distillable.value(), e.value.unwrap_or(f64::NAN), e.cost.value()]
        .iter()
        .all(|x| (x - 1.0).abs() <= SANDWICH_TOL);
    ensure(e.status == SandwichStatus::Holds && tight, || {
        format!("sandwich {} ≤ {:?} ≤ {} ({:?})", e.distillable, e.value, e.cost, e.status)
    })?;

    let catalyst = load("one_bit_catalyst.json");
    let mut ctx = context(&catalyst);
    let v = check_consistency(&mut ctx, &ones, N_MAX).map_err(|e| e.to_string())?;
    let Verdict::Fail(cx) = &v.verdict else {
        return Err(format!("one_bit_catalyst consistency {}", v.verdict.tag()));
    };
    ensure(cx.detail.starts_with("replication witness"), || format!("counterexample: {}", cx.detail))?;
    Ok(format!("swap_only PASS, sandwich 1 ≤ 1 ≤ 1; one_bit_catalyst FAIL: {}", cx.detail))
}

fn detector() -> Outcome {
    let q = load("two_maximal.json");
    let mut ctx = context(&q);
    let fired = inconsistency_detector(&mut ctx).map_err(|e| e.to_string())?;
    ensure(fired.fires, || "silent on two_maximal".into())?;
    let f = &fired.findings[0];
    ensure(f.replayed, || "witness does not replay".into())?;
    let swap = load("swap_only.json");
    let mut ctx = context(&swap);
    let silent = inconsistency_detector(&mut ctx).map_err(|e| e.to_string())?;
    ensure(!silent.fires, || "fires on swap_only".into())?;
    Ok(format!("two_maximal: {} → {} at rate {} (replayed); swap_only: silent", f.from, f.to, f.rate))
}

fn determinism() -> Outcome {
    let specs = ["one_bit_catalyst.json", "swap_only.json", "coherence_qubit.json", "two_maximal.json"];
    for name in specs {
        for format in [OutputFormat::Json, OutputFormat::Text] {
            let mut config = RunConfig::new(spec(name), Command::ALL.to_vec());
            config.format = format;
            let (a, b) = (execute(&config), execute(&config));
            ensure(a.exit_code == 0, || format!("{name}: exit {}", a.exit_code))?;
            ensure(a.output == b.output, || format!("{name}: reports differ"))?;
        }
    }
    Ok(format!("{} specs, json and text, byte-identical", specs.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("one-bit catalyst reproduction", one_bit_catalyst_reproduction),
        ("maximal existence", maximal_existence),
        ("maximal states are not free", maximal_not_free),
        ("replication dichotomy", dichotomy),
        ("R_D ≤ R_C without catalysis", distillation_below_cost),
        ("weak subadditivity", weak_subadditivity),
        ("maximal states suffice", maximal_sufficiency),
        ("relative entropy of resource", rer_numeric),
        ("relative-entropy core", relative_entropy_core),
        ("consistency machinery", consistency_machinery),
        ("inconsistency detector", detector),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} [PASS] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} [FAIL] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
