//! Scratch runner: executes the full verification battery and prints any
//! failing cases plus aggregate timing. `--sweeps` runs every default
//! sharpness sweep instead; `--find-errors` lists battery cases whose
//! verifier errors out (sequentially, with the full error text).

use std::time::Instant;

use hardy_core::quad::QuadratureSpec;
use hardy_core::suite::{run_battery, run_remainder_battery, DEFAULT_TOL_MARGIN};

fn main() {
    let spec = QuadratureSpec::default();
    if std::env::args().any(|a| a == "--sweeps") {
        use hardy_core::sharpness::{default_epsilon_grid, sweep, FamilyId, FamilyParams, TestFamily};
        let t0 = Instant::now();
        let runs: Vec<(FamilyId, f64, f64)> = vec![
            (FamilyId::Lh2LogPower, 2.0, 2.0),
            (FamilyId::Lh2LogPower, 3.0, 2.0),
            (FamilyId::Lh2LogPower, 4.0, 2.0),
            (FamilyId::CritLogLogCut, 2.0, 2.0),
            (FamilyId::CritLogLogCut, 3.0, 3.0),
            (FamilyId::ClassicalPower, 2.0, 4.0),
            (FamilyId::ClassicalPower, 2.0, 3.0),
            (FamilyId::ClassicalPower, 3.0, 5.5),
            (FamilyId::EtLogConc, 2.0, 2.0),
            (FamilyId::EtLogConc, 3.0, 3.0),
        ];
        for (id, p, q) in runs {
            let fam = TestFamily::new(
                id,
                FamilyParams { p, q_dim: q, big_r: 1.0 },
                default_epsilon_grid(id),
            )
            .unwrap();
            let res = sweep(&fam, &spec, 1e-6);
            let ratios: Vec<String> = res
                .entries
                .iter()
                .map(|e| match &e.outcome {
                    Ok(v) => format!("{:.16}", v.ratio),
                    Err(msg) => format!("ERR[{msg}]"),
                })
                .collect();
            println!("{id} p={p} Q={q}: {}", ratios.join("  "));
        }
        println!("sweeps total {:.2?}", t0.elapsed());
        return;
    }
    if std::env::args().any(|a| a == "--find-errors") {
        for case in hardy_core::suite::battery_cases() {
            if let Err(e) = hardy_core::suite::verify_case(&case, &spec, DEFAULT_TOL_MARGIN) {
                println!("ERR {} -> {e}", case.case_id());
            }
        }
        return;
    }
    let t0 = Instant::now();
    let results = run_battery(&spec, DEFAULT_TOL_MARGIN).expect("battery run failed");
    let dt = t0.elapsed();
    let failures: Vec<_> = results.iter().filter(|r| !r.pass).collect();
    println!(
        "battery: {} cases in {:.2?}, {} failures",
        results.len(),
        dt,
        failures.len()
    );
    for f in &failures {
        println!("  FAIL {} ratio={:.6e} lhs={:.6e} rhs={:.6e}", f.case_id, f.ratio, f.lhs, f.rhs);
    }
    let mut max_ratio: f64 = 0.0;
    let mut max_id = String::new();
    for r in &results {
        if r.ratio > max_ratio {
            max_ratio = r.ratio;
            max_id = r.case_id.clone();
        }
    }
    println!("max ratio {max_ratio:.12} at {max_id}");

    let t1 = Instant::now();
    let reports = run_remainder_battery(&spec).expect("remainder battery failed");
    let dt1 = t1.elapsed();
    let mut worst = 0.0_f64;
    let mut worst_id = String::new();
    let mut worst_p2 = 0.0_f64;
    for rep in &reports {
        let scale = rep.term_u.max(rep.term_v).max(1e-300);
        let rel = rep.residual / scale;
        if rel > worst {
            worst = rel;
            worst_id = rep.case_id.clone();
        }
        if let Some(dev) = rep.p2_identity_rel_dev {
            worst_p2 = worst_p2.max(dev);
        }
        assert!(rep.term_rem >= -1e-12, "negative remainder at {}", rep.case_id);
    }
    println!(
        "remainder: {} cases in {:.2?}, worst residual rel {worst:.3e} at {worst_id}, worst p2 dev {worst_p2:.3e}",
        reports.len(),
        dt1
    );
}
