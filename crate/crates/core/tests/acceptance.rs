//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use osc_core::cstar::{self, HermiteSpace};
use osc_core::derham::{self, ComplexAssembly, ConnectionSpec, TorusModel};
use osc_core::exterior::{self, binomial, ExteriorBasis};
use osc_core::hilbert::OscillatoryModule;
use osc_core::oscillator::{self, SpElement};
use osc_core::report::{self, Experiment, ExperimentConfig, Outcome};
use osc_core::{Covector, Metric, Sampler};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()))
}

fn err(e: osc_core::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    for dim in [2, 4, 6] {
        let basis = ExteriorBasis::new(dim).map_err(err)?;
        let mut s = Sampler::new(100 + dim as u64);
        for _ in 0..100 {
            let xi = s.covector(dim);
            let report = exterior::cartan_report(&basis, &xi, &Metric::identity(dim)).map_err(err)?;
            let expected: Vec<usize> = (0..dim).map(|k| binomial(dim - 1, k)).collect();
            ensure(report.ranks == expected, format!("2n={dim}: ranks {:?}, expected {expected:?}", report.ranks))?;
            ensure(report.exact, format!("2n={dim}: not exact at {:?}", xi.components))?;
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("ranks C(2n-1,k) for 2n = 2,4,6 x 100 samples in {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Check {
    let mut worst: f64 = 0.0;
    for dim in [2, 4, 6] {
        let basis = ExteriorBasis::new(dim).map_err(err)?;
        let mut s = Sampler::new(200 + dim as u64);
        for _ in 0..100 {
            let xi = s.covector(dim);
            let g = s.metric(dim);
            worst = worst.max(exterior::cartan_identity_residual(&basis, &xi, &g).map_err(err)?);
        }
    }
    ensure(worst < 1e-12, format!("residual {worst:e}"))?;
    Ok(format!("max relative residual {worst:.2e}"))
}

fn criterion_3() -> Check {
    let mut worst_axiom: f64 = 0.0;
    let mut worst_gen: f64 = 0.0;
    for dim in [2, 4] {
        let module = OscillatoryModule::new(dim, HermiteSpace::new(dim / 2, 4), Metric::identity(dim)).map_err(err)?;
        let suite = module.axiom_suite(300 + dim as u64, 100).map_err(err)?;
        ensure(suite.identities.len() == 6, "expected six identities")?;
        for id in &suite.identities {
            ensure(id.max_residual < 1e-10, format!("2n={dim}: {} residual {:e}", id.name, id.max_residual))?;
        }
        worst_axiom = worst_axiom.max(suite.max_residual());
        let mut s = Sampler::new(310 + dim as u64);
        for _ in 0..20 {
            let u = module.random_element(&mut s);
            worst_gen = worst_gen.max(module.generation_solve(&u).map_err(err)?.residual);
        }
    }
    ensure(worst_gen < 1e-12, format!("generation residual {worst_gen:e}"))?;
    Ok(format!("six identities max {worst_axiom:.2e}, generation {worst_gen:.2e}"))
}

fn criterion_4() -> Check {
    let space = HermiteSpace::new(1, 6);
    let mut s = Sampler::new(400);
    let (mut star, mut norm, mut comp): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let (k, l, m, p) = (s.hvector(space), s.hvector(space), s.hvector(space), s.hvector(space));
        let kl = cstar::rank_one(&k, &l).map_err(err)?;
        let lk = cstar::rank_one(&l, &k).map_err(err)?;
        star = star.max((cstar::star(&kl).matrix() - lk.matrix()).norm() / kl.matrix().norm());
        let target = k.norm() * l.norm();
        norm = norm.max((cstar::op_norm(&kl) - target).abs() / target);
        let lhs = &kl * &cstar::rank_one(&m, &p).map_err(err)?;
        let rhs = cstar::rank_one(&k, &p).map_err(err)?.scale(l.inner(&m));
        comp = comp.max((lhs.matrix() - rhs.matrix()).norm() / (target * m.norm() * p.norm()));
    }
    ensure(star.max(norm).max(comp) < 1e-12, format!("star {star:e}, norm {norm:e}, composition {comp:e}"))?;
    Ok(format!("adjoint {star:.1e}, norm {norm:.1e}, composition {comp:.1e}"))
}

fn run_passing(cfg: &ExperimentConfig, names: &[&str]) -> Result<report::Report, String> {
    let report = report::run(cfg).map_err(err)?;
    for name in names {
        let e = report.entry(name).ok_or_else(|| format!("missing entry {name:?}"))?;
        ensure(e.pass, format!("{name}: {:e} vs {:e}", e.value, e.tolerance))?;
    }
    ensure(report.outcome() == Outcome::Pass, format!("{} outcome {:?}", cfg.experiment, report.outcome()))?;
    Ok(report)
}

fn criterion_5() -> Check {
    let mut worst: f64 = 0.0;
    for dim in [2, 4] {
        let mut cfg = ExperimentConfig::new(Experiment::Mishchenko, 500 + dim as u64);
        cfg.dim2n = dim;
        cfg.hermite_cutoff = 4;
        let names = ["reconstruction u = P_ker u + P_im u", "A-orthogonality of ker B and im B*"];
        let report = run_passing(&cfg, &names)?;
        for name in names {
            worst = worst.max(report.entry(name).unwrap().value);
        }
    }
    Ok(format!("ext_xi and 20 random morphisms at 2n = 2,4; max residual {worst:.2e}"))
}

fn criterion_6() -> Check {
    let ladders = oscillator::ladder_matrices(1, 16).map_err(err)?;
    let (h, e, f) = oscillator::sl2_triple();
    let mut worst: f64 = 0.0;
    for (a, b) in [(&h, &e), (&h, &f), (&e, &f)] {
        worst = worst.max(oscillator::commutator_defect(a, b, &ladders).map_err(err)?);
    }
    let mut s = Sampler::new(600);
    for _ in 0..100 {
        let a = s.sp_element(2);
        let b = s.sp_element(2);
        worst = worst.max(oscillator::commutator_defect(&a, &b, &ladders).map_err(err)?);
        worst = worst.max(oscillator::skew_defect(&a, &ladders).map_err(err)?);
        worst = worst.max(oscillator::parity_defect(&a, &ladders).map_err(err)?);
    }
    for x in [&h, &e, &f] {
        worst = worst.max(oscillator::skew_defect(x, &ladders).map_err(err)?);
        worst = worst.max(oscillator::parity_defect(x, &ladders).map_err(err)?);
    }
    ensure(worst < 1e-10, format!("defect {worst:e}"))?;
    let j = SpElement::new(oscillator::standard_symplectic(2)).map_err(err)?;
    let spectrum = oscillator::interior_spectrum(&j, &ladders).map_err(err)?;
    ensure(spectrum.len() == ladders.interior().len(), "interior block size")?;
    let spec_err = spectrum.iter().enumerate().map(|(k, x)| (x - (k as f64 + 0.5)).abs()).fold(0.0, f64::max);
    ensure(spec_err < 1e-10, format!("spectrum error {spec_err:e}"))?;
    Ok(format!("N = 16: max defect {worst:.2e}, rho'(J) spectrum error {spec_err:.2e}"))
}

fn connection_variants(dim: usize) -> Vec<(&'static str, ConnectionSpec)> {
    let gamma = {
        let mut m = DMatrix::zeros(dim, dim);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = -1.0;
        m
    };
    let g1 = SpElement::new(gamma.clone()).unwrap();
    let g2 = SpElement::new(gamma * 2.0).unwrap();
    vec![
        ("trivial", ConnectionSpec::Trivial),
        ("line_twist", ConnectionSpec::LineTwist { c: vec![0.3, -1.1] }),
        ("rep_twist", ConnectionSpec::RepTwist { generators: vec![g1, g2] }),
    ]
}

fn criterion_7() -> Check {
    let model = TorusModel::new(2, 1, 4).map_err(err)?;
    let mut s = Sampler::new(700);
    let xis: Vec<Covector> = (0..100).map(|_| s.unit_covector(2)).collect();
    let mut worst: f64 = 0.0;
    for (name, spec) in connection_variants(2) {
        let r = derham::symbol_report(&spec, &model, &xis, 701, 1e-10).map_err(err)?;
        ensure(r.a_elliptic, format!("{name}: verdict false"))?;
        let m = r.max_extraction_residual().max(r.max_adjoint_residual()).max(r.max_complex_residual());
        ensure(m < 1e-10, format!("{name}: residual {m:e}"))?;
        worst = worst.max(m);
    }
    Ok(format!("three connections x 100 samples, max residual {worst:.2e}"))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let model = TorusModel::new(2, 2, 2).map_err(err)?;
    let spec = ConnectionSpec::Trivial;
    let asm = ComplexAssembly::build(&spec, &model, 0).map_err(err)?;
    ensure(asm.d_squared_defect() < 1e-10, format!("d o d {:e}", asm.d_squared_defect()))?;
    let mut s = Sampler::new(800);
    let xis: Vec<Covector> = (0..20).map(|_| s.unit_covector(2)).collect();
    ensure(derham::symbol_report(&spec, &model, &xis, 801, 1e-10).map_err(err)?.a_elliptic, "A-elliptic verdict false")?;

    let ranks = |m: &TorusModel, spec: &ConnectionSpec| -> Result<Vec<(Option<usize>, usize, usize)>, String> {
        let asm = ComplexAssembly::build(spec, m, 0).map_err(err)?;
        (0..=2)
            .map(|k| {
                let r = asm.harmonic_report(k, 1e-8).map_err(err)?;
                ensure(r.determinate, format!("degree {k} indeterminate"))?;
                Ok((r.a_rank, r.complex_dim, asm.cohomology_rank(k, 1e-8)))
            })
            .collect()
    };
    let h = model.space().dim();
    let at2 = ranks(&model, &spec)?;
    let a_ranks: Vec<Option<usize>> = at2.iter().map(|r| r.0).collect();
    ensure(a_ranks == [Some(1), Some(2), Some(1)], format!("A-ranks {a_ranks:?}"))?;
    for (k, (_, harmonic, coh)) in at2.iter().enumerate() {
        ensure(harmonic == coh, format!("degree {k}: harmonic {harmonic} vs rank-nullity {coh}"))?;
        ensure(*coh == a_ranks[k].unwrap() * h, "rank-nullity is not A-rank times dim H_N")?;
    }
    let at3 = ranks(&TorusModel::new(2, 3, 2).map_err(err)?, &spec)?;
    ensure(at3 == at2, format!("M = 3 gives {at3:?}"))?;
    let twisted = ranks(&model, &ConnectionSpec::LineTwist { c: vec![PI, PI] })?;
    ensure(twisted.iter().all(|r| r.1 == 0 && r.2 == 0), format!("line_twist (pi, pi): {twisted:?}"))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!("A-ranks (1,2,1), stable at M = 3, twisted ranks 0, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let target = 4.0 * PI * PI;
    for m in 1..=3 {
        let model = TorusModel::new(2, m, 3).map_err(err)?;
        let asm = ComplexAssembly::build(&ConnectionSpec::Trivial, &model, 0).map_err(err)?;
        for k in 0..=2 {
            let gap = asm.harmonic_report(k, 1e-8).map_err(err)?.spectral_gap.ok_or("no gap")?;
            ensure((gap - target).abs() < 1e-6, format!("M = {m}, k = {k}: gap {gap}"))?;
        }
    }
    let mut cfg = ExperimentConfig::new(Experiment::GapScan, 900);
    cfg.grid = 10;
    let report = run_passing(&cfg, &["spectral gap error over the grid"])?;
    let points = report.entries()[0].detail.as_ref().and_then(|d| d["points"].as_array().map(Vec::len));
    ensure(points == Some(100), format!("gap-scan produced {points:?} points"))?;
    within(start.elapsed(), 300.0)?;
    Ok(format!("gap 4 pi^2 for M = 1..3; 10x10 gap-scan passes; {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_10() -> Check {
    let mut configs: Vec<ExperimentConfig> = Experiment::ALL
        .into_iter()
        .map(|e| {
            let mut c = ExperimentConfig::new(e, 1000);
            c.samples = 30;
            c.grid = 4;
            c
        })
        .collect();
    let mut twisted = ExperimentConfig::new(Experiment::Cohomology, 1001);
    twisted.connection = connection_variants(2).pop().unwrap().1;
    configs.push(twisted);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    for cfg in &configs {
        let a = report::run(cfg).map_err(err)?.body_json();
        let b = report::run(cfg).map_err(err)?.body_json();
        let c = pool.install(|| report::run(cfg)).map_err(err)?.body_json();
        ensure(a == b, format!("{}: repeated runs differ", cfg.experiment))?;
        ensure(a == c, format!("{}: 4-thread run differs", cfg.experiment))?;
    }
    Ok(format!("{} configs byte-identical across repeats and thread counts", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Cartan exactness rank law", criterion_1),
        ("Cartan identity", criterion_2),
        ("Hilbert A-module identities and generation", criterion_3),
        ("rank-one calculus", criterion_4),
        ("kernel/adjoint-image splitting", criterion_5),
        ("oscillator representation at N = 16", criterion_6),
        ("principal symbol for all connections", criterion_7),
        ("torus cohomology pipeline", criterion_8),
        ("spectral gap and gap-scan", criterion_9),
        ("report determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
