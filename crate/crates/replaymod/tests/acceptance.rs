//! Exit criteria. Each test prints one `PASS`/`FAIL` line with the measured
//! figures and then asserts the criterion at its pinned tolerance.

use std::f64::consts::PI;
use std::io::Write as _;
use std::sync::OnceLock;
use std::time::Instant;

use replaymod::corpus::{generate, CorpusConfig, Sample};
use replaymod::eval::{
    corpus_features, cross_validate, cross_validate_paired, percentile, time_frames, train_detector, CvReport,
    EvalConfig, UtteranceFeatures,
};
use replaymod_core::attack::modulated_replay;
use replaymod_core::dsp::{fft_padded, ifft_in_place, next_pow2, Complex64};
use replaymod_core::dualguard::{extract_lep_samples, spectral_auc_with};
use replaymod_core::rng::SplitMix64;
use replaymod_core::speaker::{AmplitudeShape, PhaseModel, MEASUREMENT_TONE_S};
use replaymod_core::{
    build_inverse_filter, fft, fit_response, ifft, l2_similarity, measure_speaker, split, synth_voice, Provenance,
    Signal, SpectrumConvention, SpeakerModel, VoiceSpec,
};

const FS: u32 = 96_000;
const PER_CLASS: usize = 500;
const FOLDS: usize = 10;

// Written straight to stdout so the lines survive libtest's output capture.
fn report(id: u32, name: &str, pass: bool, detail: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Voice whose length is exactly one power-of-two transform, so spectral
/// identities hold bin for bin without truncating a padded tail.
fn pow2_voice(seed: u64) -> Signal {
    let n = next_pow2((0.5 * FS as f64) as usize);
    let spec = VoiceSpec { duration_s: n as f64 / FS as f64, ..VoiceSpec::with_seed(seed) };
    let v = synth_voice(&spec).unwrap();
    assert_eq!(v.len(), n);
    v
}

struct Shared {
    quiet: Vec<Sample>,
    quiet_feats: Vec<UtteranceFeatures>,
    quiet_cv: CvReport,
}

fn eval_cfg() -> EvalConfig {
    EvalConfig { folds: FOLDS, ..EvalConfig::default() }
}

fn corpus_cfg(snr_db: f64) -> CorpusConfig {
    CorpusConfig { n_per_class: PER_CLASS, snr_db, ..CorpusConfig::default() }
}

fn shared() -> &'static Shared {
    static CELL: OnceLock<Shared> = OnceLock::new();
    CELL.get_or_init(|| {
        let quiet = generate(&corpus_cfg(f64::INFINITY)).unwrap();
        let quiet_feats = corpus_features(&quiet, &eval_cfg()).unwrap();
        let quiet_cv = cross_validate(&quiet_feats, &eval_cfg()).unwrap();
        Shared { quiet, quiet_feats, quiet_cv }
    })
}

fn naive_dft(x: &[f64], n: usize) -> Vec<Complex64> {
    let tw: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64)).collect();
    (0..n)
        .map(|k| x.iter().enumerate().map(|(t, &v)| tw[(k * t) % n] * v).sum())
        .collect()
}

#[test]
fn c01_transform_correctness() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(1);
    let (mut dft_err, mut rt_err, mut parseval_err) = (0.0f64, 0.0f64, 0.0f64);
    for len in 1..=1024usize {
        let x: Vec<f64> = (0..len).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let n = next_pow2(len);
        let got = fft_padded(&x, n).unwrap();
        let want = naive_dft(&x, n);
        dft_err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(dft_err, f64::max);

        let s = Signal::new(x.clone(), FS).unwrap();
        let spec = fft(&s).unwrap();
        let back = ifft(&spec).unwrap();
        rt_err = back.samples().iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(rt_err, f64::max);

        let et: f64 = x.iter().map(|v| v * v).sum();
        let ef: f64 = spec.bins.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        parseval_err = parseval_err.max((et - ef).abs() / et);

        let mut buf = got.clone();
        ifft_in_place(&mut buf).unwrap();
        rt_err = buf[..len].iter().zip(&x).map(|(a, b)| (a.re - b).abs()).fold(rt_err, f64::max);
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = dft_err <= 1e-9 && rt_err <= 1e-9 && parseval_err <= 1e-9 && secs < 5.0;
    report(
        1,
        "transform correctness",
        pass,
        format!("dft {dft_err:.2e}, round trip {rt_err:.2e}, parseval {parseval_err:.2e}, {secs:.2} s"),
    );
    assert!(pass);
}

#[test]
fn c02_spline_fidelity() {
    let model = SpeakerModel::phone(0);
    let n = next_pow2((MEASUREMENT_TONE_S * FS as f64) as usize);
    let measured = measure_speaker(&model.profile(FS, n).unwrap(), FS, n).unwrap();
    assert_eq!(measured.points().len(), 68);
    let curve = fit_response(&measured).unwrap();
    let knot_err = measured
        .points()
        .iter()
        .map(|&(f, g)| (curve.eval(f) - g).abs())
        .fold(0.0, f64::max);
    let s = curve.spline();
    let mut c2_err = 0.0f64;
    for piece in 0..s.pieces() - 1 {
        let l = s.right_end(piece);
        let r = s.left_end(piece + 1);
        c2_err = c2_err.max((l.0 - r.0).abs()).max((l.1 - r.1).abs()).max((l.2 - r.2).abs());
    }
    let pass = knot_err <= 1e-9 && c2_err <= 1e-9;
    report(2, "spline fidelity", pass, format!("knot error {knot_err:.2e}, C2 jump {c2_err:.2e}"));
    assert!(pass);
}

#[test]
fn c03_all_pass_compensation() {
    let (eps, c) = (1e-3, 1.0);
    let mut worst_ratio = 0.0f64;
    let mut violations = 0usize;
    for seed in 0..20u64 {
        let x = pow2_voice(1000 + seed);
        let n = x.len();
        let profile = SpeakerModel::phone(seed).profile(FS, n).unwrap().without_phase_and_noise();
        let df = profile.delta_f();
        let filter = build_inverse_filter(&profile.amplitude_full(), df, eps, c).unwrap();
        let y = modulated_replay(&x, &filter, &profile, seed).unwrap().signal;
        let (xa, _) = split(&fft(&x).unwrap());
        let ys = fft(&y).unwrap();
        let xs = fft(&x).unwrap();
        let band: Vec<usize> = (0..=n / 2).filter(|&k| (60.0..=4000.0).contains(&(k as f64 * df))).collect();
        let h_min = band.iter().map(|&k| profile.amplitude[k]).fold(f64::INFINITY, f64::min);
        // Rounding floor of two length-n transforms.
        let floor = 1e-12 * xa.magnitudes.iter().cloned().fold(0.0, f64::max);
        for &k in &band {
            let dev = (ys.bins[k] - xs.bins[k] * c).norm();
            let bound = c * eps / h_min * xa.magnitudes[k];
            if dev > bound + floor {
                violations += 1;
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(dev / bound);
            }
        }
    }
    let pass = violations == 0;
    report(3, "all-pass compensation", pass, format!("{violations} violating bins, worst deviation/bound {worst_ratio:.3}"));
    assert!(pass);
}

#[test]
fn c04_ringing_bound() {
    let c = 1.0;
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for pair in 0..100u64 {
        let x = pow2_voice(2000 + pair);
        let n = x.len();
        let model = SpeakerModel {
            name: "ringing".into(),
            amplitude: AmplitudeShape::Flat { gain: 1.0 },
            phase: PhaseModel::random(pair, PI / 4.0),
            subbass_noise_rms: 0.0,
        };
        let profile = model.profile(FS, n).unwrap();
        assert!(profile.phase.iter().all(|p| p.abs() <= PI / 4.0 + 1e-12));
        let filter = build_inverse_filter(&profile.amplitude_full(), profile.delta_f(), 1e-3, c).unwrap();
        let y = modulated_replay(&x, &filter, &profile, pair).unwrap().signal;
        let spec = fft(&x).unwrap();
        let bound: f64 = (0..=n / 2)
            .map(|k| {
                let a = spec.bins[k].norm() / n as f64;
                let a = if k == 0 || k == n / 2 { a } else { 2.0 * a };
                a * profile.phase[k].abs()
            })
            .sum();
        let dev = y.samples().iter().zip(x.samples()).map(|(a, b)| (a - c * b).abs()).fold(0.0, f64::max);
        if dev > bound {
            violations += 1;
        }
        worst = worst.max(dev / bound);
    }
    let pass = violations == 0;
    report(4, "ringing bound", pass, format!("{violations}/100 violations, worst deviation/bound {worst:.3}"));
    assert!(pass);
}

fn brute_ler(x: &[f64], r: usize) -> f64 {
    let n = x.len();
    let hits = (1..n - 1)
        .filter(|&i| {
            let w = &x[i.saturating_sub(r)..=(i + r).min(n - 1)];
            let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
            x[i] == max || x[i] == min
        })
        .count();
    hits as f64 / (n - 2) as f64
}

#[test]
fn c05_ler_oracle_equivalence() {
    let mut rng = SplitMix64::new(5);
    let mut mismatches = 0usize;
    for seg in 0..1000 {
        let len = 3 + rng.below(62);
        // Every other segment is coarsely quantised to exercise ties.
        let x: Vec<f64> = (0..len)
            .map(|_| {
                let v = rng.uniform(-1.0, 1.0);
                if seg % 2 == 0 { (v * 3.0).round() } else { v }
            })
            .collect();
        let r_max = 1 + rng.below(20);
        let lep = extract_lep_samples(&x, r_max).unwrap();
        for r in 1..=r_max {
            if lep[r - 1] != brute_ler(&x, r) {
                mismatches += 1;
            }
        }
    }
    let pass = mismatches == 0;
    report(5, "LER oracle equivalence", pass, format!("{mismatches} mismatches over 1000 segments"));
    assert!(pass);
}

#[test]
fn c06_attack_efficacy_proxy() {
    let quiet = &shared().quiet;
    let mut sums = [0.0f64; 2];
    let mut count = 0usize;
    for index in 0..100 {
        let of = |label: Provenance| quiet.iter().find(|s| s.index == index && s.label == label).unwrap();
        let amp = |s: &Sample| split(&fft(&s.signal).unwrap()).0;
        let g = amp(of(Provenance::Genuine));
        sums[0] += l2_similarity(&amp(of(Provenance::ModulatedReplay)), &g).unwrap();
        sums[1] += l2_similarity(&amp(of(Provenance::ClassicalReplay)), &g).unwrap();
        count += 1;
    }
    let (m, cl) = (sums[0] / count as f64, sums[1] / count as f64);
    let ratio = cl / m;
    let pass = ratio >= 5.0;
    report(
        6,
        "attack efficacy proxy",
        pass,
        format!("mean L2 modulated {m:.3e}, classical {cl:.3e}, ratio {ratio:.2}"),
    );
    assert!(pass);
}

#[test]
fn c07_detection_accuracy() {
    let cv = &shared().quiet_cv;
    let modulated = cv.flagged_rate(2);
    let classical = cv.flagged_rate(1);
    let fpr = cv.false_positive_rate();
    let pass = modulated >= 0.95 && classical >= 0.85 && fpr <= 0.08;
    report(
        7,
        "detection accuracy",
        pass,
        format!(
            "modulated {:.2}% (exact {:.2}%), classical {:.2}% (exact {:.2}%), genuine false positives {:.2}%",
            100.0 * modulated,
            100.0 * cv.class_accuracy(2),
            100.0 * classical,
            100.0 * cv.class_accuracy(1),
            100.0 * fpr
        ),
    );
    let _ = writeln!(std::io::stdout().lock(), "  confusion (rows true genuine/classical/modulated): {:?}", cv.confusion);
    assert!(pass);
}

#[test]
fn c08_frequency_only_insufficiency() {
    let cv = &shared().quiet_cv;
    let dual = cv.flagged_rate(2);
    let freq = cv.freq_only_flagged_rate(2);
    let gap = 100.0 * (dual - freq);
    let pass = gap >= 20.0;
    report(
        8,
        "frequency-only insufficiency",
        pass,
        format!("modulated detection dual {:.2}% vs frequency-only {:.2}% (gap {gap:.2} points)", 100.0 * dual, 100.0 * freq),
    );
    assert!(pass);
}

#[test]
fn c09_noise_robustness() {
    let s = shared();
    let quiet = s.quiet_cv.binary_accuracy();
    let mut drops = Vec::new();
    for snr in [40.0, 60.0] {
        let noisy = generate(&corpus_cfg(snr)).unwrap();
        let feats = corpus_features(&noisy, &eval_cfg()).unwrap();
        let cv = cross_validate_paired(&s.quiet_feats, &feats, &eval_cfg()).unwrap();
        drops.push((snr, 100.0 * (quiet - cv.binary_accuracy()), cv.binary_accuracy()));
    }
    let pass = drops[0].1 <= 5.0 && drops[1].1 <= 1.0;
    let detail = drops
        .iter()
        .map(|(snr, d, a)| format!("{snr} dB accuracy {:.2}% (drop {d:.2} points)", 100.0 * a))
        .collect::<Vec<_>>()
        .join(", ");
    report(9, "noise robustness", pass, format!("quiet {:.2}%, {detail}", 100.0 * quiet));
    assert!(pass);
}

#[test]
fn c10_throughput() {
    let s = shared();
    let det = train_detector(&s.quiet_feats.iter().collect::<Vec<_>>(), &eval_cfg()).unwrap();
    let times = time_frames(&det, &s.quiet, 1000).unwrap();
    let median = percentile(&times, 0.5);
    let pass = median < 32.0;
    report(
        10,
        "throughput",
        pass,
        format!("median {median:.3} ms per 32 ms frame, p95 {:.3} ms, {} frames", percentile(&times, 0.95), times.len()),
    );
    assert!(pass);
}

#[test]
fn c11_amplitude_invariance() {
    let mut rng = SplitMix64::new(11);
    let (mut ler_changes, mut auc_err) = (0usize, 0.0f64);
    for _ in 0..500 {
        let len = 64 + rng.below(3000);
        let x: Vec<f64> = (0..len).map(|_| rng.gaussian()).collect();
        let g = f64::exp(rng.uniform(-6.0, 6.0));
        let y: Vec<f64> = x.iter().map(|v| v * g).collect();
        if extract_lep_samples(&x, 20).unwrap() != extract_lep_samples(&y, 20).unwrap() {
            ler_changes += 1;
        }
        let n = next_pow2(len);
        for conv in [SpectrumConvention::OneSided, SpectrumConvention::TwoSided] {
            let a = spectral_auc_with(&x, n, conv).unwrap();
            let b = spectral_auc_with(&y, n, conv).unwrap();
            auc_err = auc_err.max((a - b).abs());
        }
    }
    let pass = ler_changes == 0 && auc_err <= 1e-12;
    report(11, "amplitude invariance", pass, format!("{ler_changes} LEP changes, max AUC change {auc_err:.2e}"));
    assert!(pass);
}

