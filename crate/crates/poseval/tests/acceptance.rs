//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed; exits non-zero on any failure.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use poseval::io::{load_estimates, load_ground_truth, save_estimates, write_ground_truth_tree};
use poseval::run::{evaluate_parallel, prepare_parallel, simulate_parallel, sweep_parallel, thread_pool};
use poseval::config::RunConfig;
use poseval_core::{
    compute_add, compute_ap_ar, compute_axis_components, compute_mde, evaluate, perturb, sample_scene,
    ConfidenceModel, EvalConfig, Estimate, GtAnnotation, ModelSet, NoiseModel, ObjectModel, Pose, SceneLayout,
    Vector3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("metric exactness vs brute-force oracle", metric_exactness),
        ("geometry invariants", geometry_invariants),
        ("matching vs exhaustive enumeration, determinism", matching_oracle),
        ("threshold laws, miscalibrated AP(c)", threshold_laws),
        ("end-to-end perfect estimator", end_to_end_perfect),
        ("noise calibration", noise_calibration),
        ("process-sim granularity and conservation", process_granularity),
        ("I/O round-trip and diagnostics", io_round_trip),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {} {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pose(rng: &mut ChaCha8Rng, max_t: f64) -> Pose {
    // uniform rotation from a normalized quaternion
    let q: [f64; 4] = loop {
        let q = [0; 4].map(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            break q.map(|x| x / n);
        }
    };
    let axis = Vector3::new(q[1], q[2], q[3]);
    let angle = 2.0 * axis.norm().atan2(q[0]);
    let t = Vector3::new(
        rng.random_range(-max_t..max_t),
        rng.random_range(-max_t..max_t),
        rng.random_range(300.0..800.0),
    );
    Pose::from_axis_angle(axis, angle, t).unwrap_or_else(|_| Pose::from_translation(t).unwrap())
}

fn random_model(rng: &mut ChaCha8Rng, id: u32, max_vertices: usize) -> ObjectModel {
    loop {
        let n = rng.random_range(4..=max_vertices);
        let vs = (0..n).map(|_| Vector3::from([0; 3].map(|_| rng.random_range(-100.0..100.0)))).collect();
        if let Ok(m) = ObjectModel::new(id, vs) {
            return m;
        }
    }
}

/// Per-vertex errors computed from the row-major arrays, without the library's
/// displacement formulation.
fn oracle(gt: &Pose, est: &Pose, model: &ObjectModel) -> (f64, f64, [f64; 3]) {
    let apply = |pose: &Pose, v: &Vector3<f64>| {
        let r = pose.rotation_row_major();
        let t = pose.translation_array();
        [0, 1, 2].map(|i| r[3 * i] * v[0] + r[3 * i + 1] * v[1] + r[3 * i + 2] * v[2] + t[i])
    };
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut axis = [0.0; 3];
    for v in model.vertices() {
        let (a, b) = (apply(gt, v), apply(est, v));
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        max = max.max(dist);
        sum += dist;
        for k in 0..3 {
            axis[k] += d[k].abs();
        }
    }
    let n = model.vertices().len() as f64;
    (max, sum / n, axis.map(|a| a / n))
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn metric_exactness() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<(Pose, Pose, ObjectModel)> =
        (0..1000).map(|_| (random_pose(&mut rng, 200.0), random_pose(&mut rng, 200.0), random_model(&mut rng, 1, 300))).collect();
    let start = Instant::now();
    let computed: Vec<(f64, f64, [f64; 3])> =
        cases.iter().map(|(a, b, m)| (compute_mde(a, b, m), compute_add(a, b, m), compute_axis_components(a, b, m))).collect();
    let elapsed = start.elapsed();
    let mut worst = 0.0f64;
    for ((a, b, m), (mde, add, comp)) in cases.iter().zip(&computed) {
        let (o_mde, o_add, o_comp) = oracle(a, b, m);
        worst = worst.max(rel_err(*mde, o_mde)).max(rel_err(*add, o_add));
        for k in 0..3 {
            worst = worst.max(rel_err(comp[k], o_comp[k]));
        }
    }
    ensure(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 triples, max rel. error {worst:.1e}, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn geometry_invariants() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_iso = 0.0f64;
    let mut interior = 0usize;
    for case in 0..10_000 {
        let (a, b, q) = (random_pose(&mut rng, 300.0), random_pose(&mut rng, 300.0), random_pose(&mut rng, 300.0));
        let m = random_model(&mut rng, 1, 24);
        let fail = |what: &str| format!("case {case}: {what}");
        ensure(compute_mde(&a, &a, &m) == 0.0 && compute_add(&a, &a, &m) == 0.0, || fail("identity not zero"))?;
        let (mde, add) = (compute_mde(&a, &b, &m), compute_add(&a, &b, &m));
        ensure(rel_err(mde, compute_mde(&b, &a, &m)) <= 1e-12, || fail("MDE not symmetric"))?;
        ensure(rel_err(add, compute_add(&b, &a, &m)) <= 1e-12, || fail("ADD not symmetric"))?;
        let (qa, qb) = (q.compose(&a), q.compose(&b));
        let iso = rel_err(compute_mde(&qa, &qb, &m), mde).max(rel_err(compute_add(&qa, &qb, &m), add));
        worst_iso = worst_iso.max(iso);
        ensure(iso <= 1e-9, || fail(&format!("left isometry changed the error by {iso:e}")))?;
        ensure(add <= mde * (1.0 + 1e-12), || fail("ADD exceeds MDE"))?;
        let d = Vector3::from([0; 3].map(|_| rng.random_range(-50.0..50.0)));
        let shifted = Pose::from_translation(d).unwrap().compose(&a);
        ensure((compute_mde(&a, &shifted, &m) - d.norm()).abs() < 1e-9, || fail("translation law (MDE)"))?;
        ensure((compute_add(&a, &shifted, &m) - d.norm()).abs() < 1e-9, || fail("translation law (ADD)"))?;
        let n = m.vertices().len();
        for _ in 0..1000 {
            let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let total: f64 = w.iter().sum();
            let x = m.vertices().iter().zip(&w).fold(Vector3::zeros(), |acc, (v, wi)| acc + v * (wi / total));
            let err = (a.transform_point(&x) - b.transform_point(&x)).norm();
            ensure(err <= mde * (1.0 + 1e-12) + 1e-12, || fail("interior point exceeds the vertex maximum"))?;
            interior += 1;
        }
    }
    Ok(format!("10000 cases, {interior} interior points, worst isometry rel. error {worst_iso:.1e}"))
}

/// All assignments of each surviving estimate to one of its same-object
/// ground truths, scored by total MDE; returns (max TP, counts of the
/// minimum-total assignment).
fn exhaustive(gts: &[GtAnnotation], ests: &[Estimate], models: &ModelSet, cfg: &EvalConfig) -> (usize, (usize, usize, usize)) {
    let kept: Vec<&Estimate> = ests.iter().filter(|e| e.confidence >= cfg.confidence_threshold).collect();
    let options: Vec<Vec<(usize, f64)>> = kept
        .iter()
        .map(|e| {
            let m = models.get(e.object_id).unwrap();
            gts.iter()
                .enumerate()
                .filter(|(_, g)| g.object_id == e.object_id)
                .map(|(j, g)| (j, oracle(&g.pose, &e.pose, m).0))
                .collect()
        })
        .collect();
    let radix: Vec<usize> = options.iter().map(|o| o.len().max(1)).collect();
    let total: usize = radix.iter().product();
    let mut max_tp = 0;
    let mut best: Option<(f64, (usize, usize, usize))> = None;
    for code in 0..total {
        let mut c = code;
        let mut cost = 0.0;
        let mut tp = 0;
        let mut covered = vec![false; gts.len()];
        for (opts, r) in options.iter().zip(&radix) {
            let pick = c % r;
            c /= r;
            if let Some(&(j, d)) = opts.get(pick) {
                cost += d;
                if d <= cfg.error_threshold_mm {
                    tp += 1;
                    covered[j] = true;
                }
            }
        }
        max_tp = max_tp.max(tp);
        let fn_ = (0..gts.len()).filter(|&j| !covered[j] && gts[j].visibility >= cfg.visibility_threshold).count();
        if best.is_none_or(|(b, _)| cost < b) {
            best = Some((cost, (tp, kept.len() - tp, fn_)));
        }
    }
    (max_tp, best.unwrap().1)
}

fn small_dataset(rng: &mut ChaCha8Rng, samples: u32) -> (Vec<GtAnnotation>, Vec<Estimate>) {
    let mut gts = Vec::new();
    let mut ests = Vec::new();
    for image in 0..samples {
        let n_gt = rng.random_range(0..=5);
        let n_est = rng.random_range(usize::from(n_gt == 0)..=5);
        let mut local = Vec::new();
        for _ in 0..n_gt {
            let pose = random_pose(rng, 40.0);
            let g = GtAnnotation::new(image / 7, image, rng.random_range(1..=2), pose, rng.random_range(0.5..=1.0)).unwrap();
            local.push(g.clone());
            gts.push(g);
        }
        for _ in 0..n_est {
            let object = rng.random_range(1..=3);
            let pose = if !local.is_empty() && rng.random_bool(0.7) {
                let base = local[rng.random_range(0..local.len())].pose;
                let jitter = Vector3::from([0; 3].map(|_| rng.random_range(-12.0..12.0)));
                Pose::from_translation(jitter).unwrap().compose(&base)
            } else {
                random_pose(rng, 40.0)
            };
            ests.push(Estimate::new(image / 7, image, object, pose, rng.random_range(0.0..=1.0), 0.0).unwrap());
        }
    }
    (gts, ests)
}

fn three_models(rng: &mut ChaCha8Rng) -> ModelSet {
    ModelSet::from_models((1..=3).map(|id| random_model(rng, id, 12))).unwrap()
}

fn matching_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let models = three_models(&mut rng);
    let (gts, ests) = small_dataset(&mut rng, 500);
    let cfg = EvalConfig { confidence_threshold: 0.2, ..Default::default() };
    let report = evaluate(&gts, &ests, &models, &cfg).map_err(|e| e.to_string())?;
    ensure(report.per_sample.len() == 500, || format!("{} samples", report.per_sample.len()))?;
    let mut compared = 0;
    for r in &report.per_sample {
        let g: Vec<GtAnnotation> = gts.iter().filter(|g| g.key() == r.key).cloned().collect();
        let e: Vec<Estimate> = ests.iter().filter(|e| e.key() == r.key).cloned().collect();
        let (max_tp, counts) = exhaustive(&g, &e, &models, &cfg);
        let got = (r.counts.tp, r.counts.fp, r.counts.fn_);
        ensure(got == counts, || format!("image {}: greedy {got:?}, enumeration {counts:?}", r.key.image_id))?;
        ensure(max_tp == r.counts.tp, || format!("image {}: enumeration reaches {max_tp} TP", r.key.image_id))?;
        compared += 1;
    }
    let json = |jobs: usize| {
        let pool = thread_pool(jobs).unwrap();
        serde_json::to_string(&evaluate_parallel(&pool, &gts, &ests, &models, &cfg).unwrap()).unwrap()
    };
    let one = json(1);
    ensure(one == json(1), || "two runs differ".into())?;
    ensure(one == json(4), || "jobs 1 and 4 differ".into())?;
    Ok(format!("{compared} samples match enumeration; report bytes identical across runs and jobs 1/4"))
}

fn threshold_laws() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pool = thread_pool(2).unwrap();
    for dataset in 0..40 {
        let models = three_models(&mut rng);
        let (gts, ests) = small_dataset(&mut rng, 30);
        let prepared = prepare_parallel(&pool, &gts, &ests, &models).map_err(|e| e.to_string())?;
        let score = |cfg: &EvalConfig| {
            let results: Vec<_> = prepared.iter().map(|p| p.match_with(cfg)).collect();
            compute_ap_ar(&results, cfg.empty_sample_policy).unwrap()
        };
        let mut prev = score(&EvalConfig::default().with_error_threshold(0.5));
        for step in 1..=80 {
            let cur = score(&EvalConfig::default().with_error_threshold(0.5 + step as f64));
            ensure(cur.ap >= prev.ap && cur.ar >= prev.ar, || format!("dataset {dataset}: score fell as the error threshold rose"))?;
            prev = cur;
        }
        let sweep = sweep_parallel(&pool, &gts, &ests, &models, &EvalConfig::default()).map_err(|e| e.to_string())?;
        ensure(sweep.windows(2).all(|w| w[1].ar <= w[0].ar), || format!("dataset {dataset}: AR rose with the confidence threshold"))?;
    }

    let model = ObjectModel::new(1, handle_vertices().into_iter().map(Vector3::from).collect()).unwrap();
    let models = ModelSet::from_models([model.clone()]).unwrap();
    let gts: Vec<GtAnnotation> = (0..25).flat_map(|s| sample_scene(&SceneLayout::default(), 8, &model, s, 40 + s as u64).unwrap()).collect();
    let noise = NoiseModel { translation_sigma_mm: 9.0, confidence: ConfidenceModel::Miscalibrated, seed: 5, ..Default::default() };
    let ests = perturb(&gts, &models, &noise).map_err(|e| e.to_string())?;
    let sweep = sweep_parallel(&pool, &gts, &ests, &models, &EvalConfig::default()).map_err(|e| e.to_string())?;
    let drops = sweep.windows(2).filter(|w| w[1].ap < w[0].ap).count();
    ensure(drops > 0, || "miscalibrated AP(c) is monotone".into())?;
    Ok(format!("40 datasets monotone in threshold and confidence; miscalibrated AP(c) drops at {drops} of 99 steps"))
}

fn end_to_end_perfect() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let models = write_models(dir.path(), &[(1, handle_vertices())]);
    let data = dir.path().join("data");
    let start = Instant::now();
    let run = |args: &[&str]| {
        let o = poseval(args);
        if o.status.success() {
            Ok(stdout(&o))
        } else {
            Err(stderr(&o))
        }
    };
    run(&["perturb", "--models", p(&models), "--scenes", "25", "--parts", "8", "--out", p(&data)])?;
    let gt = data.join("scenes");
    let est = data.join("estimates.csv");
    let eval = run(&["evaluate", "--models", p(&models), "--gt", p(&gt), "--estimates", p(&est), "--out", p(&dir.path().join("e"))])?;
    let sim = run(&["simulate", "--models", p(&models), "--out", p(&dir.path().join("s"))])?;
    let elapsed = start.elapsed();
    ensure(eval == "AP 100.0 AR 100.0", || format!("evaluate printed `{eval}`"))?;
    ensure(sim == "AP 100.0 AR 100.0", || format!("simulate printed `{sim}`"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("evaluate `{eval}`, simulate `{sim}` on 25 x 8 parts"))
}

fn noise_calibration() -> Result<String, String> {
    let model = ObjectModel::new(1, handle_vertices().into_iter().map(Vector3::from).collect()).unwrap();
    let models = ModelSet::from_models([model.clone()]).unwrap();
    let gts: Vec<GtAnnotation> =
        (0..12_500).flat_map(|s| sample_scene(&SceneLayout::default(), 8, &model, s, s as u64).unwrap()).collect();
    let pool = thread_pool(0).unwrap();
    let components = |noise: NoiseModel| {
        let ests = perturb(&gts, &models, &noise).unwrap();
        let report = evaluate_parallel(&pool, &gts, &ests, &models, &EvalConfig::default()).unwrap();
        report.components
    };
    let expected = 5.0 * (2.0 / std::f64::consts::PI).sqrt();
    let c = components(NoiseModel { translation_sigma_mm: 5.0, seed: 6, ..Default::default() });
    ensure(c.count == 100_000, || format!("{} matched errors", c.count))?;
    for k in 0..3 {
        let rel = (c.mean_mm[k] - expected).abs() / expected;
        ensure(rel < 0.03, || format!("axis {k} mean {:.4} vs {expected:.4}", c.mean_mm[k]))?;
    }
    let z = components(NoiseModel { z_bias_mm: 10.0, seed: 6, ..Default::default() });
    ensure((z.mean_mm[2] - 10.0).abs() < 0.1, || format!("z mean {}", z.mean_mm[2]))?;
    Ok(format!(
        "sigma 5: means {:.3}/{:.3}/{:.3} (expected {expected:.3}); z bias 10: z mean {:.6}",
        c.mean_mm[0], c.mean_mm[1], c.mean_mm[2], z.mean_mm[2]
    ))
}

fn process_granularity() -> Result<String, String> {
    let model = ObjectModel::new(1, handle_vertices().into_iter().map(Vector3::from).collect()).unwrap();
    let mut cfg = RunConfig::default();
    cfg.simulate.replications = 10_000;
    cfg.process.seed = 77;
    cfg.noise = NoiseModel {
        translation_sigma_mm: 8.0,
        rotation_sigma_deg: 3.0,
        outlier_rate: 0.1,
        miss_rate: 0.05,
        ..Default::default()
    };
    let outcomes = simulate_parallel(&thread_pool(0).unwrap(), &cfg, &model).map_err(|e| e.to_string())?;
    let mut distinct = std::collections::BTreeSet::new();
    for (r, o) in outcomes.iter().enumerate() {
        ensure(o.counts.tp + o.counts.fn_ == 40, || format!("replication {r}: tp + fn = {}", o.counts.tp + o.counts.fn_))?;
        let units = o.ar * 40.0;
        ensure((units - units.round()).abs() < 1e-9, || format!("replication {r}: AR {} not a multiple of 2.5%", o.ar))?;
        distinct.insert(units.round() as i64);
    }
    Ok(format!("10000 replications conserve 40 parts; {} distinct AR values, all multiples of 2.5%", distinct.len()))
}

fn same_pose_bits(a: &Pose, b: &Pose) -> bool {
    a.rotation_row_major().map(f64::to_bits) == b.rotation_row_major().map(f64::to_bits)
        && a.translation_array().map(f64::to_bits) == b.translation_array().map(f64::to_bits)
}

fn io_round_trip() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = ObjectModel::new(1, handle_vertices().into_iter().map(Vector3::from).collect()).unwrap();
    let models = ModelSet::from_models([model.clone()]).unwrap();
    let layout = SceneLayout::RandomDrop { half_extent_mm: 180.0, occlusion_factor: 0.7 };
    let gts: Vec<GtAnnotation> = (0..20).flat_map(|s| sample_scene(&layout, 12, &model, s, 900 + s as u64).unwrap()).collect();
    let noise = NoiseModel {
        rotation_sigma_deg: 5.0,
        translation_sigma_mm: 7.0,
        z_bias_mm: -3.0,
        outlier_rate: 0.2,
        miss_rate: 0.1,
        confidence: ConfidenceModel::Miscalibrated,
        seed: 8,
    };
    let ests = perturb(&gts, &models, &noise).map_err(|e| e.to_string())?;
    let scenes = dir.path().join("scenes");
    write_ground_truth_tree(&scenes, &gts).map_err(|e| e.to_string())?;
    let est_path = dir.path().join("estimates.csv");
    save_estimates(&est_path, &ests).map_err(|e| e.to_string())?;
    let gts_back = load_ground_truth(&scenes).map_err(|e| e.to_string())?;
    let ests_back = load_estimates(&est_path).map_err(|e| e.to_string())?;
    ensure(gts_back.len() == gts.len() && ests_back.len() == ests.len(), || "instance counts differ".into())?;
    for (a, b) in gts.iter().zip(&gts_back) {
        ensure(
            (a.scene_id, a.image_id, a.object_id) == (b.scene_id, b.image_id, b.object_id)
                && a.visibility.to_bits() == b.visibility.to_bits()
                && same_pose_bits(&a.pose, &b.pose),
            || format!("ground truth differs in scene {}", a.scene_id),
        )?;
    }
    for (a, b) in ests.iter().zip(&ests_back) {
        ensure(
            (a.scene_id, a.image_id, a.object_id) == (b.scene_id, b.image_id, b.object_id)
                && a.confidence.to_bits() == b.confidence.to_bits()
                && a.inference_time.to_bits() == b.inference_time.to_bits()
                && same_pose_bits(&a.pose, &b.pose),
            || format!("estimate differs in scene {}", a.scene_id),
        )?;
    }

    let models_dir = write_models(dir.path(), &[(1, handle_vertices())]);
    let text = fs::read_to_string(&est_path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let broken = lines[3].replacen(" 0", "", 1);
    lines[3] = broken;
    let bad_csv = dir.path().join("bad.csv");
    fs::write(&bad_csv, lines.join("\n")).unwrap();
    let expect_failure = |gt: &Path, est: &Path, out: &str, needle: &str| {
        let o = poseval(&["evaluate", "--models", p(&models_dir), "--gt", p(gt), "--estimates", p(est), "--out", p(&dir.path().join(out))]);
        ensure(o.status.code() == Some(2), || format!("{out}: exit {:?}", o.status.code()))?;
        ensure(stderr(&o).contains(needle), || format!("{out}: diagnostic `{}` lacks `{needle}`", stderr(&o).trim()))?;
        Ok::<String, String>(stderr(&o).trim().to_string())
    };
    let csv_msg = expect_failure(&scenes, &bad_csv, "o1", "row 4, field ")?;
    let bad_gt = dir.path().join("000005");
    fs::create_dir_all(&bad_gt).unwrap();
    let gt_file = bad_gt.join("scene_gt.json");
    fs::write(&gt_file, r#"{"0": [{"obj_id": 1, "cam_R_m2c": [1,0,0,0,1,0,0,0,1], "cam_t_m2c": [0,0,400], "visib_fract": 1.5}]}"#).unwrap();
    let gt_msg = expect_failure(&gt_file, &est_path, "o2", "field visib_fract")?;
    Ok(format!(
        "{} GT and {} estimates reload bit-identically; exit 2 with `{}` / `{}`",
        gts.len(),
        ests.len(),
        csv_msg.rsplit(": ").nth(1).unwrap_or(&csv_msg),
        gt_msg.rsplit(": ").nth(1).unwrap_or(&gt_msg)
    ))
}
