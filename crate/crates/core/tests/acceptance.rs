//! Acceptance gate: one PASS/FAIL line per criterion, all tolerances pinned
//! here. Criterion 12 needs the MIT-BIH records in `WAKESIM_MITBIH_DIR` and
//! reports SKIP otherwise.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use wakesim::bayesfront::{bayes_infer, BayesModel, IdealReader, WordAddress, N_FEATURES, N_LEVELS, N_WORDS};
use wakesim::datapipe::{decode_wfdb212, read_annotations, BeatClass, QuantizerSpec};
use wakesim::energymodel::{sweep, RatesTable};
use wakesim::memsim::{program_arrays, DeviceDistributions, MemristorReader, OperatingConfig, OperatingPoint, ReadErrorModel};
use wakesim::mlpback::{mlp_infer, quantize_mlp, FloatMlp, InputQuantizer, MLP_DIMS};
use wakesim::report::{
    features_of, labels_of, load_dataset, macro_f1_abnormal, run_with_models, train_models, Config, ConfusionMatrix,
    DataSource,
};
use wakesim::wakectl::{decide_wake, WakePolicy, WakeReason};
use wakesim::{Curve, EnergyParams, ExactEnergyParams, LogCodec, Rational};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const NJ: f64 = 1e-9;

/// Paper wake rates (p_wake_abn, p_wake_n) and operating supplies.
const REGIMES: [(&str, f64, f64, f64, f64); 3] = [
    ("A", 1.2, 0.998, 0.0188, 100.0 * NJ),
    ("B", 1.2, 1.0, 0.225, 757.0 * NJ),
    ("C", 0.8, 1.0, 0.773, 2500.0 * NJ),
];

fn c1_energy_regimes() -> Outcome {
    let p = EnergyParams::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, vdd, abn, n, paper) in REGIMES {
        let e = p.e_avg(vdd, &wakesim::WakeRates::new(abn, n).unwrap()).unwrap().total;
        let rel = (e - paper).abs() / paper;
        ok &= rel <= 0.05;
        parts.push(format!("{name} {:.1} nJ ({:+.2}%)", e / NJ, 100.0 * (e - paper) / paper));
    }
    check(ok, parts.join(", "))
}

fn c2_baseline_ratio() -> Outcome {
    let p = EnergyParams::default();
    let e = p.e_avg(1.2, &wakesim::WakeRates::new(0.998, 0.0188).unwrap()).unwrap().total;
    let ratio = p.e_baseline(1.2) / e;
    check((30.0..=37.0).contains(&ratio), format!("baseline / e_avg(A) = {ratio:.2}"))
}

fn c3_marginal_wake_cost() -> Outcome {
    let p = ExactEnergyParams::default();
    let vdd = Rational::new(12, 10);
    let step = Rational::new(1, 100);
    let expected = Rational::new(32, 1_000_000_000);
    let mut ok = true;
    for k in 0..=99 {
        let pw = Rational::new(k, 100);
        let d = p.e_avg_at(vdd, pw + step).unwrap().total - p.e_avg_at(vdd, pw).unwrap().total;
        ok &= d == expected;
    }
    let pf = EnergyParams::default();
    let df = pf.e_avg_at(1.2, 0.038592).unwrap().total - pf.e_avg_at(1.2, 0.028592).unwrap().total;
    ok &= (df - 32.0 * NJ).abs() < 1e-12 * NJ * 1e3;
    check(ok, format!("exact delta 32 nJ at every p in 0..0.99; f64 delta {:.6} nJ", df / NJ))
}

fn c4_log_codec() -> Outcome {
    let c = LogCodec::default();
    let above = c.codes_above(0.5);
    let roundtrip = (0..=255u8).all(|n| c.encode(c.decode(n)).unwrap() == n);
    let decoded_above = (0..=255u8).filter(|&n| c.decode(n) > 0.5).count();
    check(
        above == (0..=6).collect::<Vec<u8>>() && roundtrip,
        format!(
            "p in (0.5, 1] encodes to codes {:?}..={:?} ({} levels); 256/256 round trips {}; decode(6) = {:.7}, {} codes decode above 0.5",
            above.first(),
            above.last(),
            above.len(),
            roundtrip,
            c.decode(6),
            decoded_above
        ),
    )
}

fn random_model(rng: &mut ChaCha8Rng, max_code: u8) -> BayesModel {
    BayesModel {
        codec: LogCodec::default(),
        feature_bins: [8, 12, 16, 20],
        quantizers: std::array::from_fn(|_| QuantizerSpec::new(0.0, 1.0, N_LEVELS).unwrap()),
        codes: (0..N_WORDS).map(|_| rng.gen_range(0..=max_code)).collect(),
        class_names: BeatClass::ALL.iter().map(|c| c.name().to_string()).collect(),
    }
}

/// Float posterior oracle: sum of log decoded probabilities, argmax with
/// ties (within 1e-9) to the lowest class; invalid when the best posterior
/// is below 2^-16.
fn float_oracle(model: &BayesModel, levels: &[usize; N_FEATURES]) -> (usize, bool) {
    let logp: Vec<f64> = (0..4)
        .map(|c| {
            (0..N_FEATURES)
                .map(|f| model.codec.decode(model.code(WordAddress { class: c, feature: f, level: levels[f] })).ln())
                .sum()
        })
        .collect();
    let best = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let arg = logp.iter().position(|&v| v >= best - 1e-9).unwrap();
    (arg, best < -16.0 * 2f64.ln())
}

fn c5_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let quiet = ReadErrorModel { sigma_n: Curve::constant(0.0) };
    let devices = DeviceDistributions {
        lrs_log10_mean: Curve::constant(3.7),
        lrs_log10_sigma: Curve::constant(0.2),
        hrs_log10_mean: 5.0,
        hrs_log10_sigma: 0.2,
    };
    let op = OperatingPoint::new(0.5, 2.4, "quiet").unwrap();
    let (mut cases, mut mem_mismatch, mut oracle_mismatch, mut invalid_seen) = (0, 0, 0, 0);
    for m in 0..1000u64 {
        let model = random_model(&mut rng, if m % 2 == 0 { 30 } else { 255 });
        let state = program_arrays(&model.codes, &devices, 2.4, m).unwrap();
        let mut mem = MemristorReader::new(&state, &op, &quiet, m);
        for i in 0..10u64 {
            let levels: [usize; N_FEATURES] = std::array::from_fn(|_| rng.gen_range(0..N_LEVELS));
            let ideal = bayes_infer(&levels, &model, &mut IdealReader::new(&model));
            use wakesim::bayesfront::WordReader;
            mem.begin_input(i);
            let noisy = bayes_infer(&levels, &model, &mut mem);
            mem_mismatch += (noisy != ideal) as usize;
            let (arg, invalid) = float_oracle(&model, &levels);
            oracle_mismatch += (arg != ideal.predicted.index() || invalid != ideal.invalid) as usize;
            invalid_seen += ideal.invalid as usize;
            cases += 1;
        }
    }
    check(
        mem_mismatch == 0 && oracle_mismatch == 0,
        format!("{cases} cases ({invalid_seen} invalid): memristor-vs-ideal mismatches {mem_mismatch}, ideal-vs-float-oracle mismatches {oracle_mismatch}"),
    )
}

struct Benchmark {
    lines: Vec<String>,
    ok6: bool,
    float_acc: f64,
    int8_acc: f64,
    agreement: f64,
}

/// Shared synthetic benchmark for criteria 6 and 9.
fn benchmark() -> Result<Benchmark, String> {
    let config = Config::default();
    let ds = load_dataset(&config).map_err(|e| e.to_string())?;
    let models = train_models(&features_of(&ds.train), &labels_of(&ds.train), &config).map_err(|e| e.to_string())?;

    let test_features = features_of(&ds.test);
    let ys = labels_of(&ds.test);
    let inputs: Vec<Vec<i8>> = test_features.iter().map(|f| models.backend.input.quantize(f)).collect();
    let float = models.backend.model.float_reference.as_ref().ok_or("no float reference")?;
    let (mut fh, mut qh, mut agree) = (0, 0, 0);
    for (q, &y) in inputs.iter().zip(&ys) {
        let fp = float.predict(&InputQuantizer::to_float(q));
        let qp = mlp_infer(q, &models.backend.model).class;
        fh += (fp == y) as usize;
        qh += (qp == y) as usize;
        agree += (fp == qp) as usize;
    }
    let n = ys.len() as f64;

    let mut lines = Vec::new();
    let mut ok6 = true;
    for preset in ["A", "B", "C"] {
        let cfg = Config { operating_point: OperatingConfig::preset(preset), ..config.clone() };
        let out = run_with_models(&cfg, ds.clone(), models.clone()).map_err(|e| e.to_string())?;
        let r = &out.report;
        let front = r.front_end.as_ref().and_then(|s| s.macro_f1).unwrap_or(f64::NAN);
        let system = r.system.as_ref().and_then(|s| s.macro_f1).unwrap_or(f64::NAN);
        let normal = &r.wake.as_ref().ok_or("no wake stats")?.per_class[0];
        let uncertain = normal.by_reason[WakeReason::Ambiguous.index()] + normal.by_reason[WakeReason::Invalid.index()];
        let pass = match preset {
            "A" => front >= 0.99,
            "B" => front <= 0.75 && system >= 0.95,
            _ => front <= 0.75 && system >= 0.95 && 2 * uncertain > normal.wakes(),
        };
        ok6 &= pass;
        lines.push(format!(
            "{preset}: front {front:.4} system {system:.4} normal wakes {}/{} ({} ambiguous/invalid)",
            normal.wakes(),
            normal.beats,
            uncertain
        ));
    }
    Ok(Benchmark {
        lines,
        ok6,
        float_acc: fh as f64 / n,
        int8_acc: qh as f64 / n,
        agreement: agree as f64 / n,
    })
}

fn c6_degradation_recovery(b: &Result<Benchmark, String>) -> Outcome {
    let b = b.as_ref().map_err(Clone::clone)?;
    check(b.ok6, b.lines.join("; "))
}

/// Golden SHA-256 of integer logits from an untrained, quantized network;
/// only IEEE-exact float operations feed the integer path.
const INT8_GOLDEN: &str = "9da3b8341ab770c98fb746682eba9ce05a73a6ffdec3156ef35930e76affdb4e";

fn int8_fingerprint() -> String {
    let float = FloatMlp::<f64>::init(&MLP_DIMS, 2024);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let calib: Vec<Vec<f64>> = (0..256).map(|_| (0..32).map(|_| rng.gen_range(-128i32..128) as f64 / 128.0).collect()).collect();
    let q = quantize_mlp(&float, &calib).unwrap();
    let mut h = Sha256::new();
    for _ in 0..1000 {
        let x: Vec<i8> = (0..32).map(|_| rng.gen()).collect();
        for l in mlp_infer(&x, &q).logits {
            h.update(l.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn gradient_check() -> (usize, f64) {
    let model = FloatMlp::<f64>::init(&MLP_DIMS, 31);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let xs: Vec<Vec<f64>> = (0..4).map(|_| (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let bx: Vec<&[f64]> = xs.iter().map(|x| x.as_slice()).collect();
    let ys = [0, 1, 2, 3];
    let (_, grads) = model.loss_and_grad(&bx, &ys);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for li in 0..model.layers.len() {
        let nw = model.layers[li].w.len();
        for k in 0..nw + model.layers[li].b.len() {
            let eval = |d: f64| {
                let mut m = model.clone();
                if k < nw {
                    m.layers[li].w[k] += d;
                } else {
                    m.layers[li].b[k - nw] += d;
                }
                m.loss_and_grad(&bx, &ys).0
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            let g = if k < nw { grads[li].w[k] } else { grads[li].b[k - nw] };
            let scale = g.abs().max(fd.abs());
            if scale > 1e-7 {
                worst = worst.max((g - fd).abs() / scale);
            }
            if (g - fd).abs() > 1e-4 * scale + 1e-9 {
                failures += 1;
            }
        }
    }
    (failures, worst)
}

fn c9_mlp(b: &Result<Benchmark, String>) -> Outcome {
    let b = b.as_ref().map_err(Clone::clone)?;
    let (grad_failures, worst) = gradient_check();
    let fp = int8_fingerprint();
    let ok = b.float_acc >= 0.98
        && (b.float_acc - b.int8_acc).abs() <= 0.02
        && b.agreement >= 0.98
        && grad_failures == 0
        && fp == INT8_GOLDEN;
    check(
        ok,
        format!(
            "float acc {:.4}, int8 acc {:.4}, agreement {:.4}; gradient failures {grad_failures} (worst rel {worst:.1e}); int8 golden {}",
            b.float_acc,
            b.int8_acc,
            b.agreement,
            if fp == INT8_GOLDEN { "match".to_string() } else { format!("MISMATCH {fp}") }
        ),
    )
}

fn c7_wake_policy_safety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let policy = WakePolicy::default();
    let mut violations = 0;
    let mut sleeps = 0;
    for i in 0..100_000 {
        let hi = if i % 2 == 0 { 6 } else { 400 };
        let scores: [u16; 4] = std::array::from_fn(|_| rng.gen_range(0..hi) + if i % 3 == 0 { 90 } else { 0 });
        let s = wakesim::bayesfront::ClassScores::from_scores(scores, 94);
        let d = decide_wake(&s, &policy);
        let sleeps_as_n = !d.wake && d.front_pred == BeatClass::N;
        let strict_min = scores[1..].iter().all(|&x| x > scores[0]);
        let invalid = scores.iter().min().copied().unwrap() >= 94;
        violations += (sleeps_as_n != (strict_min && !invalid)) as usize;
        violations += (!d.wake && d.front_pred != BeatClass::N) as usize;
        sleeps += sleeps_as_n as usize;
    }
    check(violations == 0, format!("100000 fuzzed vectors, {sleeps} local N finals, {violations} violations"))
}

fn c8_interior_optimum() -> Outcome {
    let params = EnergyParams::default();
    let grid = [0.7, 0.8, 0.9, 1.0, 1.1, 1.2];
    let mut rates = RatesTable::shipped().for_vddr(2.4);
    let table = sweep(&params, &grid, &[1.0], &mut rates).map_err(|e| e.to_string())?;
    let best = table.best(0).ok_or("no valid point")?;
    let pt = best.outcome.as_ref().map_err(Clone::clone)?;
    let nominal = table.rows.iter().find(|r| (r.vdd - 1.2).abs() < 1e-12).and_then(|r| r.outcome.as_ref().ok()).ok_or("no nominal row")?;
    let factor = pt.e_baseline / pt.breakdown.total;
    let nominal_gain = nominal.breakdown.total / pt.breakdown.total;
    let interior = best.vdd > grid[0] && best.vdd < grid[grid.len() - 1];
    check(
        interior && (factor - 2.4).abs() <= 0.2 * 2.4,
        format!(
            "argmin vdd {} V at T_s = 1 s, e_avg {:.4} uJ; baseline/e_avg = {factor:.3}; e_avg(1.2 V)/e_avg(argmin) = {nominal_gain:.3}",
            best.vdd,
            pt.breakdown.total * 1e6
        ),
    )
}

/// Independent format-212 packer.
fn pack212(pairs: &[(i16, i16)]) -> Vec<u8> {
    let mut out = Vec::with_capacity(pairs.len() * 3);
    for &(a, b) in pairs {
        let (a, b) = (a as u16 & 0x0FFF, b as u16 & 0x0FFF);
        out.push((a & 0xFF) as u8);
        out.push((((b >> 8) << 4) | (a >> 8)) as u8);
        out.push((b & 0xFF) as u8);
    }
    out
}

fn c10_parsers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pairs: Vec<(i16, i16)> = (0..10_000).map(|_| (rng.gen_range(-2048..2048), rng.gen_range(-2048..2048))).collect();
    let decoded = decode_wfdb212(&pack212(&pairs), 2, pairs.len()).map_err(|e| e.to_string())?;
    let wfdb_ok = pairs.iter().enumerate().all(|(i, &(a, b))| decoded[0][i] == a && decoded[1][i] == b);

    let mut ann_ok = true;
    let mut annotations = 0;
    for _ in 0..200 {
        let mut bytes = Vec::new();
        let mut t: u64 = 0;
        let mut expected = Vec::new();
        for _ in 0..rng.gen_range(1..60) {
            match rng.gen_range(0..10) {
                0 => {
                    let skip: u32 = rng.gen_range(0..100_000);
                    t += skip as u64;
                    bytes.extend_from_slice(&((59u16 << 10).to_le_bytes()));
                    bytes.extend_from_slice(&((skip >> 16) as u16).to_le_bytes());
                    bytes.extend_from_slice(&((skip & 0xFFFF) as u16).to_le_bytes());
                }
                1 => {
                    let len: u16 = rng.gen_range(0..9);
                    bytes.extend_from_slice(&((63u16 << 10) | len).to_le_bytes());
                    bytes.extend(std::iter::repeat(b'x').take((len + (len & 1)) as usize));
                }
                2 => bytes.extend_from_slice(&((61u16 << 10) | 3).to_le_bytes()),
                _ => {
                    let code = [1u16, 2, 3, 12, 5, 28][rng.gen_range(0..6)];
                    let delta: u16 = rng.gen_range(0..1024);
                    t += delta as u64;
                    bytes.extend_from_slice(&((code << 10) | delta).to_le_bytes());
                    if [1, 2, 3, 12].contains(&code) {
                        expected.push(t);
                    }
                }
            }
        }
        bytes.extend_from_slice(&[0, 0]);
        let got: Vec<u64> = read_annotations(&bytes).map_err(|e| e.to_string())?.iter().map(|a| a.time).collect();
        annotations += got.len();
        ann_ok &= got == expected;
    }
    check(
        wfdb_ok && ann_ok,
        format!("212 round trip on 10000 pairs: {wfdb_ok}; cumulative times on 200 generated streams ({annotations} beats): {ann_ok}"),
    )
}

/// Direct counting from per-beat (true, predicted) pairs.
fn brute_macro_f1(pairs: &[(usize, usize)]) -> Option<f64> {
    let mut total = 0.0;
    for c in 1..4 {
        let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
        for &(t, p) in pairs {
            if t == c && p == c {
                tp += 1.0;
            } else if p == c {
                fp += 1.0;
            } else if t == c {
                fn_ += 1.0;
            }
        }
        if tp + fp + fn_ == 0.0 {
            return None;
        }
        let f1 = if tp == 0.0 {
            0.0
        } else {
            let (pr, rc) = (tp / (tp + fp), tp / (tp + fn_));
            2.0 * pr * rc / (pr + rc)
        };
        total += f1;
    }
    Some(total / 3.0)
}

fn c11_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut mismatched = 0;
    for i in 0..1000 {
        let mut pairs = Vec::new();
        let max = if i % 10 == 0 { 3 } else { 60 };
        for t in 0..4 {
            for p in 0..4 {
                for _ in 0..rng.gen_range(0..max) {
                    pairs.push((t, p));
                }
            }
        }
        let cm = ConfusionMatrix::from_pairs(pairs.iter().map(|&(t, p)| (BeatClass::ALL[t], BeatClass::ALL[p])));
        match (macro_f1_abnormal::<f64>(&cm), brute_macro_f1(&pairs)) {
            (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
            (None, None) => {}
            _ => mismatched += 1,
        }
    }
    check(worst <= 1e-12 && mismatched == 0, format!("1000 matrices, max |diff| {worst:.1e}, definedness mismatches {mismatched}"))
}

fn c12_mitbih() -> Option<Outcome> {
    let dir = std::env::var_os("WAKESIM_MITBIH_DIR")?;
    let mut config = Config { ideal: true, ..Config::default() };
    config.dataset.source = DataSource::Wfdb;
    config.dataset.path = Some(dir.into());
    config.dataset.train_per_class = 3200;
    config.dataset.test_per_class = 800;
    let run = || -> Result<(f64, f64), String> {
        let ds = load_dataset(&config).map_err(|e| e.to_string())?;
        let models = train_models(&features_of(&ds.train), &labels_of(&ds.train), &config).map_err(|e| e.to_string())?;
        let out = run_with_models(&config, ds, models).map_err(|e| e.to_string())?;
        let f = |s: &Option<wakesim::report::ClassifierSummary>| s.as_ref().and_then(|s| s.macro_f1).unwrap_or(f64::NAN);
        Ok((f(&out.report.front_end), f(&out.report.system)))
    };
    Some(run().and_then(|(front, system)| check(front >= 0.85 && system >= front, format!("front {front:.4} system {system:.4}"))))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Option<Outcome>| {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Some(Err(format!("panicked: {}", msg.unwrap_or_default())))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Some(Ok(msg)) => println!("PASS {id:>2} {name} [{secs:.1}s]: {msg}"),
            Some(Err(msg)) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s]: {msg}");
            }
            None => println!("SKIP {id:>2} {name}: WAKESIM_MITBIH_DIR not set"),
        }
    };
    report(1, "energy regimes", &mut || Some(c1_energy_regimes()));
    report(2, "baseline ratio", &mut || Some(c2_baseline_ratio()));
    report(3, "marginal wake cost", &mut || Some(c3_marginal_wake_cost()));
    report(4, "log codec", &mut || Some(c4_log_codec()));
    report(5, "fault-free oracle equivalence", &mut || Some(c5_oracle_equivalence()));
    let t = Instant::now();
    let bench = catch_unwind(benchmark).unwrap_or_else(|_| Err("benchmark panicked".into()));
    println!("     synthetic benchmark trained and streamed in {:.1}s", t.elapsed().as_secs_f64());
    report(6, "degradation recovery", &mut || Some(c6_degradation_recovery(&bench)));
    report(7, "wake-policy safety", &mut || Some(c7_wake_policy_safety()));
    report(8, "interior optimum", &mut || Some(c8_interior_optimum()));
    report(9, "MLP", &mut || Some(c9_mlp(&bench)));
    report(10, "parsers", &mut || Some(c10_parsers()));
    report(11, "metrics", &mut || Some(c11_metrics()));
    report(12, "MIT-BIH beat-level run", &mut c12_mitbih);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
