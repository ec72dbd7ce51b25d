//! One line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::rel_close;
use portal_core::agent::AgentParams;
use portal_core::geometry::{Pose, Ray, Rotation, Vec3};
use portal_core::harness::{self, analyze_sessions, run_batch, Analysis, ExperimentConfig, Measure, Preset};
use portal_core::portal::{place_portal, ArmReach, PortalFeatures, PortalPair};
use portal_core::stats::{kruskal_wallis_exact, rm_anova_two_way, tukey_hsd, vrsq_score, RmDesign, VrsqResponse};
use portal_core::tasks::{compute_id, TaskKind};
use portal_core::technique::{effective_cd_ratio, CdConfig, HomerState, LinearOffsetState, Technique};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REPORTED_ID: f64 = 3.26;
const ID_TOL: f64 = 0.005;
const EXACT: f64 = 1e-9;
const STATS_REL: f64 = 1e-8;
const KW_TOL: f64 = 1e-6;
const RANDOM_CASES: usize = 1_000;
const PORTAL_TIME_SPREAD: f64 = 0.05;
const HOMER_TIME_GROWTH: f64 = 1.30;
const PORTAL_ERROR_SPREAD: f64 = 0.10;
const TREND_SEEDS: std::ops::RangeInclusive<u64> = 1..=20;
const BATCH_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if let Some(u) = v.try_normalize().filter(|_| v.norm() <= 1.0 && v.norm() > 1e-3) {
            return u;
        }
    }
}

fn rotation(rng: &mut ChaCha8Rng) -> Rotation {
    Rotation::from_axis_angle(unit(rng), rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

fn point(rng: &mut ChaCha8Rng, half: f64) -> Vec3 {
    Vec3::new(rng.random_range(-half..half), rng.random_range(-half..half), rng.random_range(-half..half))
}

fn portal_case(rng: &mut ChaCha8Rng) -> (Pose, Vec3, Vec3, f64, PortalPair) {
    let user = Pose::new(point(rng, 5.0), rotation(rng));
    let dir = unit(rng);
    let r = rng.random_range(0.4..0.9);
    let target = user.position + dir * rng.random_range(0.75 * r + 0.5..20.0);
    let ray = Ray::new(user.position, dir).unwrap();
    let pair = place_portal(&user, &ray, target, ArmReach::new(r).unwrap()).unwrap();
    (user, dir, target, r, pair)
}

fn id_reproduction() -> Outcome {
    let id = compute_id(0.60, 0.07).map_err(|e| e.to_string())?;
    check(
        (id - REPORTED_ID).abs() <= ID_TOL,
        format!("ID = {id:.6} bits, |ID - {REPORTED_ID}| = {:.6} <= {ID_TOL}", (id - REPORTED_ID).abs()),
    )
}

fn placement_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let (user, _, target, r, pair) = portal_case(&mut rng);
        let p = pair.primary_disc().center.distance(user.position) / r;
        let s = pair.secondary_disc().center.distance(target) / r;
        let c = pair.portal_camera().position.distance(target) / r;
        worst = worst.max((p - 0.5).abs()).max((s - 0.25).abs()).max((c - 0.75).abs());
    }
    let t = start.elapsed();
    check(
        worst <= EXACT && t < Duration::from_secs(1),
        format!("{RANDOM_CASES} cases, max ratio error {worst:.2e}, {t:.2?}"),
    )
}

fn depth_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..RANDOM_CASES {
        let (user, _, _, _, mut pair) = portal_case(&mut rng);
        if i % 2 == 1 {
            pair = pair.with_features(PortalFeatures { relocation: true, passthrough: true });
            let pivot = pair.primary_disc().center;
            let delta = Pose::rotation_about(pivot, Rotation::from_axis_angle(unit(&mut rng), rng.random_range(-0.8..0.8)))
                .translated(point(&mut rng, 0.3));
            pair = pair.relocate_portal(&delta).map_err(|e| e.to_string())?;
        }
        let head = Pose::new(user.position + point(&mut rng, 0.5), rotation(&mut rng));
        let d = pair.perceived_target_distance(&head).map_err(|e| e.to_string())?;
        worst = worst.max((d.through_portal - d.camera_to_target).abs());
    }
    let t = start.elapsed();
    check(
        worst <= EXACT && t < Duration::from_secs(1),
        format!("{RANDOM_CASES} head poses (half on relocated portals), max |difference| {worst:.2e} m, {t:.2?}"),
    )
}

fn clutching_isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (_, _, _, _, pair) = portal_case(&mut rng);
        let frame = *pair.primary_frame();
        let cloud: Vec<Vec3> = (0..8)
            .map(|_| {
                let local = Vec3::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), rng.random_range(-0.3..-0.01));
                frame.transform_point(local)
            })
            .collect();
        let remote: Vec<Vec3> = cloud
            .iter()
            .map(|&p| {
                pair.map_hand_through_portal(&Pose::from_position(p))
                    .ok()
                    .and_then(|h| h.remote_pose)
                    .map(|r| r.position)
                    .ok_or("hand not through the portal")
            })
            .collect::<Result<_, _>>()?;
        for i in 0..cloud.len() {
            for j in i + 1..cloud.len() {
                worst = worst.max((cloud[i].distance(cloud[j]) - remote[i].distance(remote[j])).abs());
            }
        }
    }
    let cd = effective_cd_ratio(Technique::Portal, &CdConfig::default(), 6.0).map_err(|e| e.to_string())?;
    check(
        worst < EXACT && cd.value() == 1.0,
        format!("200 clouds of 8 hands, max pairwise distortion {worst:.2e} m, CD ratio {}", cd.value()),
    )
}

fn homer_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut land, mut gain_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..RANDOM_CASES {
        let user = Pose::new(point(&mut rng, 3.0), rotation(&mut rng));
        let controller = Pose::new(user.position + unit(&mut rng) * rng.random_range(0.1..0.7), rotation(&mut rng));
        let object = user.position + unit(&mut rng) * rng.random_range(1.0..12.0);
        let mut h = HomerState::new();
        h.begin_aiming();
        let hand = h.grab(&user, &controller, Some(object)).map_err(|e| e.to_string())?;
        land = land.max(hand.position.distance(object));
        let gain = user.position.distance(object) / user.position.distance(controller.position);
        let delta = point(&mut rng, 0.3);
        let moved = h.track(&user, &controller.translated(delta)).map_err(|e| e.to_string())?;
        let expected = hand.position + delta * gain;
        gain_err = gain_err.max(moved.position.distance(expected) / delta.norm().max(1e-12) / gain);
    }
    check(
        land <= EXACT && gain_err <= EXACT,
        format!("{RANDOM_CASES} grabs, max landing error {land:.2e} m, max relative gain error {gain_err:.2e}"),
    )
}

fn lo_calibration() -> Outcome {
    let lo = LinearOffsetState::calibrate(9.0, ArmReach::new(0.6).unwrap()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let user = Pose::new(point(&mut rng, 1.0), rotation(&mut rng));
        let controller = Pose::from_position(user.position + unit(&mut rng) * 0.6);
        worst = worst.max((lo.map(&user, &controller).position.distance(user.position) - 9.0).abs());
    }
    check(worst <= EXACT, format!("gain {:.6}, full extension reaches 9 m within {worst:.2e}", lo.gain()))
}

fn vrsq() -> Outcome {
    let s = |x: [u8; 9]| VrsqResponse::new(x).map(|r| vrsq_score(&r)).map_err(|e| e.to_string());
    let (zero, full, fixture) = (s([0; 9])?, s([3; 9])?, s([1, 1, 1, 1, 0, 0, 0, 0, 0])?);
    check(
        zero == 0.0 && full == 100.0 && (fixture - 50.0 / 3.0).abs() <= EXACT,
        format!("all-zero {zero}, all-three {full}, fixture {fixture:.9}"),
    )
}

fn fixture(seed: u64, n: usize, a: usize, b: usize) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subject: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (0..n)
        .map(|p| {
            (0..a)
                .map(|i| {
                    (0..b)
                        .map(|j| {
                            let spread = 0.3 + 0.4 * (i * b + j) as f64 / (a * b) as f64;
                            2.0 + subject[p] + 0.2 * i as f64 - 0.15 * j as f64
                                + 0.1 * (i * j) as f64
                                + spread * rng.random_range(-1.0..1.0)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn statistics_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut note = |ok: bool, rel: f64| {
        if ok {
            worst = worst.max(rel);
        }
        ok
    };
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let mut fixtures = 0;
    for (seed, n, a, b) in [(1, 8, 3, 3), (2, 6, 2, 3), (3, 10, 3, 4), (4, 12, 4, 2)] {
        let data = fixture(seed, n, a, b);
        let ours = rm_anova_two_way(&RmDesign::from_nested(&data).map_err(|e| e.to_string())?, "A", "B")
            .map_err(|e| e.to_string())?;
        let oracle = common::rm_anova(&data);
        for (row, o) in ours.rows.iter().zip(oracle.iter()) {
            let pairs = [
                (row.ss_effect, o.ss),
                (row.ss_error, o.ss_err),
                (row.dof1_uncorrected, o.df1),
                (row.dof2_uncorrected, o.df2),
                (row.f, o.f),
                (row.eta_p2, o.eta_p2),
                (row.gg_epsilon, o.eps),
                (row.dof1, o.df1 * o.eps),
                (row.p, o.p),
            ];
            for (x, y) in pairs {
                if !note(rel_close(x, y, STATS_REL), rel(x, y)) {
                    return Err(format!("fixture {seed} row {}: {x} vs oracle {y}", row.factor));
                }
            }
        }
        let row = ours.row("A").unwrap();
        let means: Vec<f64> = (0..a)
            .map(|i| data.iter().map(|p| p[i].iter().sum::<f64>()).sum::<f64>() / (n * b) as f64)
            .collect();
        let nb = (n * b) as f64;
        for pair in tukey_hsd(&means, row.ms_error, row.dof2_uncorrected, nb).map_err(|e| e.to_string())? {
            let q = (means[pair.i] - means[pair.j]).abs() / (oracle[0].ss_err / oracle[0].df2 / nb).sqrt();
            let p = common::ptukey_sf(q, a, oracle[0].df2);
            if !note(rel_close(pair.q, q, STATS_REL), rel(pair.q, q)) || !note(rel_close(pair.p, p, STATS_REL), rel(pair.p, p)) {
                return Err(format!("fixture {seed} tukey {}-{}: q {} vs {q}, p {} vs {p}", pair.i, pair.j, pair.q, pair.p));
            }
        }
        fixtures += 1;
    }
    let mut kw_worst: f64 = 0.0;
    let kw_fixtures: [Vec<Vec<f64>>; 4] = [
        vec![vec![1.1, 2.3, 0.7], vec![3.2, 4.1, 2.9], vec![5.0, 4.4]],
        vec![vec![1.0, 2.0, 2.0, 3.0], vec![2.0, 4.0, 5.0, 5.0]],
        vec![vec![0.3, 0.9], vec![1.5, 0.2, 1.1], vec![2.2, 2.4, 1.9]],
        vec![vec![7.0, 7.0, 3.0], vec![1.0, 9.0, 2.0, 8.0, 7.5]],
    ];
    for (i, g) in kw_fixtures.iter().enumerate() {
        let ours = kruskal_wallis_exact(g, 1 << 20).map_err(|e| e.to_string())?;
        let (h, p) = common::kruskal_wallis_exact(g);
        let d = (ours.p - p).abs().max((ours.h - h).abs());
        kw_worst = kw_worst.max(d);
        if d > KW_TOL {
            return Err(format!("KW fixture {i}: H {} vs {h}, p {} vs {p}", ours.h, ours.p));
        }
    }
    let t = start.elapsed();
    check(
        t < Duration::from_secs(10),
        format!(
            "{fixtures} ANOVA+Tukey fixtures, max relative deviation {worst:.2e}; {} KW fixtures, max deviation {kw_worst:.2e}; {t:.2?}",
            kw_fixtures.len()
        ),
    )
}

fn mean_of(analyses: &[Analysis], technique: Technique, d: f64, m: Measure) -> f64 {
    analyses.iter().map(|a| a.condition(technique, d, m).expect("condition present").mean).sum::<f64>()
        / analyses.len() as f64
}

fn batch_for(preset: Preset, seed: u64) -> Analysis {
    let mut c = ExperimentConfig::preset(preset);
    c.master_seed = seed;
    c.agent = AgentParams::default();
    let sessions = run_batch(&c, None).expect("batch runs");
    analyze_sessions(&sessions).expect("analysis").remove(0)
}

fn trend_reproduction() -> Outcome {
    let start = Instant::now();
    let first = [batch_for(Preset::Study1Task1, 1), batch_for(Preset::Study1Task2, 1)];
    let one_batch = start.elapsed();
    let mut selection = vec![first[0].clone()];
    let mut docking = vec![first[1].clone()];
    for seed in TREND_SEEDS.skip(1) {
        selection.push(batch_for(Preset::Study1Task1, seed));
        docking.push(batch_for(Preset::Study1Task2, seed));
    }
    assert!(selection.iter().all(|a| a.task == TaskKind::Selection) && docking.iter().all(|a| a.task == TaskKind::Docking));
    let dist = [3.0, 6.0, 9.0];
    let by_d = |set: &[Analysis], t, m| dist.map(|d| mean_of(set, t, d, m));

    let portal_t = by_d(&selection, Technique::Portal, Measure::SelectionTime);
    let homer_t = by_d(&selection, Technique::Homer, Measure::SelectionTime);
    let spread = |x: [f64; 3]| {
        let mean = x.iter().sum::<f64>() / 3.0;
        (x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min)) / mean
    };
    let a_ok = spread(portal_t) < PORTAL_TIME_SPREAD && homer_t[2] / homer_t[0] > HOMER_TIME_GROWTH;

    let err9 = |t| mean_of(&selection, t, 9.0, Measure::ErrorRate);
    let (ep, el, eh) = (err9(Technique::Portal), err9(Technique::LinearOffset), err9(Technique::Homer));
    let b_ok = ep < el && el < eh;

    let portal_e = by_d(&docking, Technique::Portal, Measure::ErrorDistance);
    let homer_e = by_d(&docking, Technique::Homer, Measure::ErrorDistance);
    let lo_e = by_d(&docking, Technique::LinearOffset, Measure::ErrorDistance);
    let grows = |x: [f64; 3]| x[0] < x[1] && x[1] < x[2];
    let c_ok = spread(portal_e) < PORTAL_ERROR_SPREAD && grows(homer_e) && grows(lo_e);

    let detail = format!(
        "(a) PORTAL time {:.3}/{:.3}/{:.3} s spread {:.1}% < {}%, HOMER 9m/3m {:.3} > {HOMER_TIME_GROWTH} [{}]; \
         (b) error rate at 9 m PORTAL {ep:.3} < LO {el:.3} < HOMER {eh:.3} [{}]; \
         (c) docking error PORTAL {:.4}/{:.4}/{:.4} m spread {:.1}% < {}%, HOMER {:.4}/{:.4}/{:.4}, LO {:.4}/{:.4}/{:.4} [{}]; \
         seeds {}-{}, one Study-1 batch pair {one_batch:.2?} < {BATCH_BUDGET:?}",
        portal_t[0], portal_t[1], portal_t[2], 100.0 * spread(portal_t), 100.0 * PORTAL_TIME_SPREAD,
        homer_t[2] / homer_t[0], pass_word(a_ok), pass_word(b_ok),
        portal_e[0], portal_e[1], portal_e[2], 100.0 * spread(portal_e), 100.0 * PORTAL_ERROR_SPREAD,
        homer_e[0], homer_e[1], homer_e[2], lo_e[0], lo_e[1], lo_e[2], pass_word(c_ok),
        TREND_SEEDS.start(), TREND_SEEDS.end(),
    );
    check(a_ok && b_ok && c_ok && one_batch < BATCH_BUDGET, detail)
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn preset_fidelity() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (preset, want) in [(Preset::Study1Task1, (27, 432, 0)), (Preset::Study1Task2, (0, 0, 27)), (Preset::Study2, (0, 0, 54))] {
        let c = ExperimentConfig::preset(preset);
        let sessions = run_batch(&c, None).map_err(|e| e.to_string())?;
        let all = sessions.len() == c.participants as usize
            && sessions.iter().all(|s| (s.center_selections(), s.scored_ring_selections(), s.docking_trials()) == want);
        ok &= all;
        lines.push(format!("{preset} {} participants x {want:?} [{}]", sessions.len(), pass_word(all)));
    }
    check(ok, format!("(center, ring, docking) per participant: {}", lines.join(", ")))
}

fn determinism() -> Outcome {
    let mut detail = Vec::new();
    for preset in [Preset::Study1Task1, Preset::Study1Task2, Preset::Study2] {
        let c = ExperimentConfig::preset(preset);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for (dir, threads) in dirs.iter().zip([1, 3]) {
            let sessions = run_batch(&c, Some(threads)).map_err(|e| e.to_string())?;
            harness::write_outputs(dir.path(), &c, &sessions).map_err(|e| e.to_string())?;
        }
        let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        for name in &names {
            let a = std::fs::read(dirs[0].path().join(name)).unwrap();
            let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| format!("{name}: {e}"))?;
            if a != b {
                return Err(format!("{preset}: {name} differs between runs"));
            }
        }
        detail.push(format!("{preset} {} files", names.len()));
    }
    Ok(format!("two runs (1 and 3 workers) byte-identical: {}", detail.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("ID reproduction", id_reproduction),
        ("portal placement algebra", placement_algebra),
        ("depth-identity invariant", depth_identity),
        ("clutching isometry", clutching_isometry),
        ("HOMER exactness", homer_exactness),
        ("LO calibration", lo_calibration),
        ("VRSQ", vrsq),
        ("statistics oracle", statistics_oracle),
        ("trend reproduction", trend_reproduction),
        ("preset fidelity", preset_fidelity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
