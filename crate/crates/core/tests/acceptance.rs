//! Exit criteria, one line per criterion. Runs as a plain binary so the
//! report is printed by `cargo test` without `--nocapture`.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prbox_core::bell::{self, chsh, is_local, local_max, BellFunctional};
use prbox_core::cloning::{max_symmetric_isotropic_extension, perfect_clone_composite};
use prbox_core::multiparty::{
    check_lhv_impossible, corr3_constraints, ghz_constraints, search_corr3_strategies,
    search_wirings, simulate_ghz_with_box, SharedRandomnessTable,
};
use prbox_core::protocols::{run_ip_cc, run_ip_cc_with_boxes, run_ot_with_box, PrBox};
use prbox_core::rational::{int, rat};
use prbox_core::singlet::{chsh_from_simulation, estimate_correlation, ChshSettings};
use prbox_core::{Behavior, Scenario, UnitVector3};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_pr_box_chsh() -> Check {
    let value = chsh(&Behavior::pr_box()).map_err(err)?;
    ensure(value == int(4), format!("CHSH(PR) = {value}"))?;
    let strategies = bell::deterministic_strategies(&Scenario::binary(2)).map_err(err)?;
    ensure(
        strategies.len() == 16,
        format!("{} strategies", strategies.len()),
    )?;
    let bound = local_max(&BellFunctional::chsh()).map_err(err)?;
    ensure(bound == int(2), format!("local max = {bound}"))?;
    Ok(format!(
        "CHSH(PR) = {value}, local max = {bound} over 16 strategies"
    ))
}

fn c2_isotropic() -> Check {
    let mut verdicts = Vec::new();
    for v in [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1)] {
        let b = Behavior::isotropic(&v).map_err(err)?;
        let value = chsh(&b).map_err(err)?;
        ensure(value == &v * int(4), format!("CHSH at v={v} is {value}"))?;
        let cert = is_local(&b).map_err(err)?;
        cert.verify(&b).map_err(err)?;
        ensure(
            cert.is_local() == (v <= rat(1, 2)),
            format!("wrong verdict at v={v}"),
        )?;
        verdicts.push(format!("{v}:{}", if cert.is_local() { "L" } else { "NL" }));
    }
    Ok(format!("CHSH = 4v; verdicts {}", verdicts.join(" ")))
}

fn c3_monogamy() -> Check {
    let r = max_symmetric_isotropic_extension().map_err(err)?;
    ensure(r.v_star == rat(1, 2), format!("V* = {}", r.v_star))?;
    ensure(
        r.certificate.check_no_signalling().is_no_signalling(),
        "certificate signals",
    )?;
    let target = Behavior::isotropic(&r.v_star).map_err(err)?;
    for keep in [[0, 1], [0, 2]] {
        for z in 0..2 {
            let m = r.certificate.marginal(&keep, &[z]).map_err(err)?;
            ensure(
                m == target,
                format!("marginal {keep:?} at {z} is not isotropic"),
            )?;
        }
    }
    Ok(format!("V* = {}", r.v_star))
}

fn c4_clone_signalling() -> Check {
    let clone = perfect_clone_composite();
    let report = clone.check_no_signalling();
    ensure(
        !report.is_no_signalling(),
        "clone passes the no-signalling check",
    )?;
    let witness = report
        .violations
        .iter()
        .find(|v| v.parties == vec![1, 2] && v.party_inputs == vec![0, 1])
        .ok_or("no (Bob, Bob') violation at (y, y') = (0, 1)")?;
    ensure(
        witness.reference_inputs == vec![0] && witness.differing_inputs == vec![1],
        "violation is not against Alice's input",
    )?;
    let s = clone.scenario();
    let mut cases = 0;
    for x in 0..2 {
        let row = clone.row(&[x, 0, 1]).map_err(err)?;
        for (o, p) in row.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let out = s.output_tuple(o);
            ensure(
                out[1] ^ out[2] == x,
                format!("b+b' != x at x={x}, a={}", out[0]),
            )?;
            cases += 1;
        }
    }
    ensure(cases == 4, format!("{cases} internal cases"))?;
    Ok(format!(
        "{} violations; b+b' = x in all 4 cases",
        report.violations.len()
    ))
}

fn c5_singlet_sweep() -> Check {
    const SHOTS: u64 = 1_000_000;
    let a = UnitVector3::in_xz_plane(0.0);
    let mut worst: f64 = 0.0;
    for k in 0..12 {
        let theta = (30.0 * k as f64).to_radians();
        let b = UnitVector3::in_xz_plane(theta);
        let e = estimate_correlation(&a, &b, SHOTS, 1000 + k).map_err(err)?;
        let dev = (e.mean_ra_rb + theta.cos()).abs();
        worst = worst.max(dev);
        ensure(
            dev <= 5e-3 + 1e-3,
            format!("θ={}°: deviation {dev}", 30 * k),
        )?;
        ensure(
            e.mean_ra.abs() <= 5e-3,
            format!("θ={}°: <rA> = {}", 30 * k, e.mean_ra),
        )?;
        ensure(
            e.mean_rb.abs() <= 5e-3,
            format!("θ={}°: <rB> = {}", 30 * k, e.mean_rb),
        )?;
    }
    Ok(format!("max |<rArB> + cos θ| = {worst:.5}"))
}

fn c6_simulated_chsh() -> Check {
    let est = chsh_from_simulation(&ChshSettings::optimal(), 1_000_000, 2).map_err(err)?;
    let target = 2.0 * 2f64.sqrt();
    ensure(
        (est.value - target).abs() <= 0.02,
        format!("CHSH = {}", est.value),
    )?;
    Ok(format!("CHSH = {:.4} (2√2 = {target:.4})", est.value))
}

fn c7_oblivious_transfer() -> Check {
    let mut cases = 0;
    for x0 in 0..2u8 {
        for x1 in 0..2u8 {
            for c in 0..2u8 {
                let xc = if c == 0 { x0 } else { x1 };
                let mut views = Vec::new();
                for bit in 0..2 {
                    let t = run_ot_with_box(x0, x1, c, &mut PrBox::with_bit(bit)).map_err(err)?;
                    ensure(t.output == xc, format!("x0={x0} x1={x1} c={c} a={bit}"))?;
                    ensure(t.bits_communicated == 1, "more than one bit sent")?;
                    views.push((t.m, t.b));
                    cases += 1;
                }
                views.sort();
                // Flip the unchosen secret and compare Bob's view.
                let (y0, y1) = if c == 0 { (x0, x1 ^ 1) } else { (x0 ^ 1, x1) };
                let mut other: Vec<_> = (0..2)
                    .map(|bit| {
                        run_ot_with_box(y0, y1, c, &mut PrBox::with_bit(bit)).map(|t| (t.m, t.b))
                    })
                    .collect::<Result<_, _>>()
                    .map_err(err)?;
                other.sort();
                ensure(views == other, "Bob's view depends on the unchosen secret")?;
            }
        }
    }
    ensure(cases == 16, format!("{cases} cases"))?;
    Ok("output = x_c in 16/16 cases, 1 bit, view independent of x_(c+1)".into())
}

fn c8_inner_product() -> Check {
    let ip = |xs: &[u8], ys: &[u8]| xs.iter().zip(ys).fold(0, |a, (x, y)| a ^ (x & y));
    let mut runs = 0;
    for n in 1..=3usize {
        for xi in 0..1u32 << n {
            for yi in 0..1u32 << n {
                let xs: Vec<u8> = (0..n).map(|k| (xi >> k & 1) as u8).collect();
                let ys: Vec<u8> = (0..n).map(|k| (yi >> k & 1) as u8).collect();
                for bits in 0..1u32 << n {
                    let boxes = (0..n).map(|k| PrBox::with_bit((bits >> k & 1) as u8));
                    let t = run_ip_cc_with_boxes(&xs, &ys, boxes).map_err(err)?;
                    ensure(t.f == ip(&xs, &ys), format!("{xs:?}·{ys:?}"))?;
                    ensure(t.bits_communicated == 1, "more than one bit sent")?;
                    runs += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..1000 {
        let xs: Vec<u8> = (0..100).map(|_| rng.random::<bool>() as u8).collect();
        let ys: Vec<u8> = (0..100).map(|_| rng.random::<bool>() as u8).collect();
        let t = run_ip_cc(&xs, &ys, trial).map_err(err)?;
        ensure(t.f == ip(&xs, &ys), format!("random trial {trial}"))?;
        ensure(t.bits_communicated == 1, "more than one bit sent")?;
    }
    Ok(format!(
        "{runs} exhaustive runs (n ≤ 3) + 1000 at n = 100, 1 bit each"
    ))
}

fn c9_ghz() -> Check {
    let lhv = check_lhv_impossible(&ghz_constraints(), 3).map_err(err)?;
    ensure(lhv.strategies_checked == 64, "not 64 strategies")?;
    ensure(lhv.is_impossible(), "an LHV strategy satisfies GHZ")?;
    let mut runs = 0;
    for table in SharedRandomnessTable::all()
        .into_iter()
        .filter(|t| t.fits_ghz_premise())
    {
        for x in 0..2u8 {
            for y in 0..2u8 {
                for z in 0..2u8 {
                    for bit in 0..2 {
                        let (a, b, c) =
                            simulate_ghz_with_box(x, y, z, &table, &mut PrBox::with_bit(bit))
                                .map_err(err)?;
                        for k in ghz_constraints() {
                            let inputs = [x, y, z];
                            if k.terms().iter().all(|&(p, v)| inputs[p] == v) {
                                ensure(a ^ b ^ c == k.parity(), format!("{table:?} {inputs:?}"))?;
                            }
                        }
                        runs += 1;
                    }
                }
            }
        }
    }
    ensure(runs == 8 * 8 * 2, format!("{runs} runs"))?;
    Ok(format!(
        "LHV impossible over 64; {runs} PR-box runs satisfy all relations"
    ))
}

fn c10_corr3() -> Check {
    let lhv = check_lhv_impossible(&corr3_constraints(), 3).map_err(err)?;
    ensure(lhv.is_impossible(), "an LHV strategy satisfies corr3")?;
    let r = search_corr3_strategies().map_err(err)?;
    // Each party touches two of the three boxes: 1 + 2·2 choices per input,
    // two inputs each, times 2^6 shared-randomness tables.
    let expected_size = (1u64 + 2 * 2).pow(2).pow(3) * 2u64.pow(6);
    ensure(
        r.total_strategies == expected_size,
        format!("search size {} != {expected_size}", r.total_strategies),
    )?;
    ensure(
        r.perfect_count == 0,
        format!("{} perfect strategies", r.perfect_count),
    )?;
    let ghz = search_wirings(&ghz_constraints(), 3, &[(0, 1)]).map_err(err)?;
    ensure(ghz.perfect_count >= 1, "GHZ with PR_AB not found")?;
    Ok(format!(
        "{} strategies, 0 perfect (best {} of 5); GHZ with PR_AB: {} perfect",
        r.total_strategies, r.best_satisfied_constraints, ghz.perfect_count
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "1 PR-box CHSH and local bound",
            Duration::from_secs(1),
            c1_pr_box_chsh,
        ),
        (
            "2 isotropic CHSH and locality",
            Duration::from_secs(5),
            c2_isotropic,
        ),
        ("3 monogamy optimum", Duration::from_secs(10), c3_monogamy),
        (
            "4 perfect clone signals",
            Duration::from_secs(1),
            c4_clone_signalling,
        ),
        (
            "5 singlet correlation sweep",
            Duration::from_secs(60),
            c5_singlet_sweep,
        ),
        (
            "6 simulated CHSH",
            Duration::from_secs(30),
            c6_simulated_chsh,
        ),
        (
            "7 oblivious transfer",
            Duration::from_secs(1),
            c7_oblivious_transfer,
        ),
        (
            "8 inner-product protocol",
            Duration::from_secs(5),
            c8_inner_product,
        ),
        ("9 GHZ", Duration::from_secs(1), c9_ghz),
        ("10 corr3 refutation", Duration::from_secs(300), c10_corr3),
    ];
    let mut failures = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took longer than {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
