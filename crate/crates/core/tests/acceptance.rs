//! Acceptance criteria, one test per criterion.
//!
//! Every test writes a single `[PASS]`/`[FAIL]` line straight to stderr (not
//! through the test harness capture) and then asserts, so
//! `cargo test --test acceptance` shows the verdicts even when all pass.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use pitchsync::decision::{
    identify_combined, verify_claim, ClaimDecision, DistanceReport, SpeakerDistance,
};
use pitchsync::evaluation::{
    make_synthetic_corpus, read_manifest, reference_formants, run_evaluation, run_training,
    synth_vowel, CorpusSpec, EvalReport, System, TrialOutcome,
};
use pitchsync::features::{autocorrelation, count_extrema_in, levinson_durbin, lpc_to_cepstral};
use pitchsync::modeling::{format_models, load_models, save_models};
use pitchsync::pipeline::{analyze, mark_utterance};
use pitchsync::{
    score_against_models, DistanceWeights, PipelineConfig, VerificationOutcome, Vowel,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{tag}] criterion {id} ({name}): {detail}");
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_report_arithmetic() {
    // (vowel, rejected, correct, wrong) per vowel, 100 utterances each.
    let rows = [
        (Vowel::A, 77, 17, 6, 73.91),
        (Vowel::E, 66, 33, 1, 97.05),
        (Vowel::O, 77, 19, 4, 82.60),
        (Vowel::U, 79, 21, 0, 100.0),
        (Vowel::I, 67, 32, 1, 96.97),
    ];
    let ids = ["s1", "s2", "s3"];
    let mut trials = Vec::new();
    for &(vowel, rejected, correct, wrong, _) in &rows {
        let mut push = |truth: &str, c: &str, t: &str| {
            trials.push(TrialOutcome {
                true_speaker: truth.into(),
                vowel,
                cepstral_pick: c.into(),
                temporal_pick: t.into(),
            })
        };
        for _ in 0..rejected {
            push(ids[0], ids[1], ids[2]);
        }
        for _ in 0..correct {
            push(ids[0], ids[0], ids[0]);
        }
        for _ in 0..wrong {
            push(ids[0], ids[1], ids[1]);
        }
    }
    let report = EvalReport::from_trials(trials);
    let comb = report.system(System::Combined);
    let pct = comb.accuracy_pct().unwrap();

    let mut ok = comb.total == 500 && comb.accepted() == 134 && comb.correct == 122;
    ok &= (pct - 91.04).abs() <= 0.01;
    let mut detail = format!(
        "combined {}/{} accepted of {}, {pct:.4}%",
        comb.correct,
        comb.accepted(),
        comb.total
    );
    for &(vowel, _, _, _, expected) in &rows {
        let got = report.vowel(vowel).unwrap().accuracy_pct().unwrap();
        ok &= (got - expected).abs() <= 0.01;
        detail.push_str(&format!("; {vowel} {got:.4}% (expected {expected})"));
    }
    verdict(1, "report arithmetic", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_2_pitch_accuracy() {
    let config = PipelineConfig::default();
    let mut worst = (1.0f64, String::new());
    let mut slowest = Duration::ZERO;
    let mut all_ok = true;
    for vowel in Vowel::ALL {
        for f0 in [80.0, 120.0, 160.0, 220.0, 300.0] {
            for seed in 0..2u64 {
                let s = synth_vowel(f0, &reference_formants(vowel), 1.0, 16_000, seed).unwrap();
                let start = Instant::now();
                let marked = mark_utterance(&s.buffer, &config).unwrap();
                analyze(&s.buffer, vowel, &config).unwrap();
                slowest = slowest.max(start.elapsed());

                let diffs: Vec<usize> = marked
                    .marks
                    .mark_indices
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .collect();
                let good = diffs
                    .iter()
                    .filter(|&&d| d.abs_diff(s.period_samples) <= 1)
                    .count();
                let frac = good as f64 / diffs.len() as f64;
                all_ok &= frac >= 0.95;
                if frac < worst.0 {
                    worst = (frac, format!("{vowel} at {f0} Hz seed {seed}"));
                }
            }
        }
    }
    let ok = all_ok && slowest < Duration::from_secs(1);
    let detail = format!(
        "worst {:.2}% within ±1 sample ({}), slowest utterance {:?}",
        100.0 * worst.0,
        worst.1,
        slowest
    );
    verdict(2, "pitch accuracy", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 3

/// Autocorrelation of a random AR(2)-coloured noise burst; always positive
/// definite for a nonzero signal.
fn random_autocorrelation(rng: &mut ChaCha8Rng, order: usize) -> Vec<f64> {
    let n = rng.random_range(64..512);
    let r1 = rng.random_range(0.0..0.9);
    let th = rng.random_range(0.0..PI);
    let (b1, b2) = (2.0 * r1 * th.cos(), -r1 * r1);
    let mut x = vec![0.0f64; n];
    for i in 0..n {
        let e: f64 = rng.random_range(-1.0..1.0);
        let y1 = if i >= 1 { x[i - 1] } else { 0.0 };
        let y2 = if i >= 2 { x[i - 2] } else { 0.0 };
        x[i] = e + b1 * y1 + b2 * y2;
    }
    autocorrelation(&x, order).unwrap()
}

#[test]
fn criterion_3_levinson_durbin_oracle() {
    const ORDER: usize = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_rel = 0.0f64;
    let mut monotone = true;
    for _ in 0..100 {
        let r = random_autocorrelation(&mut rng, ORDER);
        let lpc = levinson_durbin(&r, ORDER).unwrap();

        let toeplitz = DMatrix::from_fn(ORDER, ORDER, |i, j| r[i.abs_diff(j)]);
        let rhs = DVector::from_iterator(ORDER, r[1..=ORDER].iter().copied());
        let direct = toeplitz.lu().solve(&rhs).expect("positive definite");
        let got = DVector::from_vec(lpc.coefficients.clone());
        worst_rel = worst_rel.max((&got - &direct).norm() / direct.norm());

        monotone &= lpc.errors.len() == ORDER + 1;
        monotone &= lpc.errors.windows(2).all(|w| w[1] <= w[0]);
        monotone &= lpc.errors[ORDER] > 0.0;
    }
    let ok = worst_rel <= 1e-9 && monotone;
    let detail = format!("max relative error {worst_rel:.3e}, E0>=...>=E12>0: {monotone}");
    verdict(3, "Levinson-Durbin oracle", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 4

/// Predictor `a_1..a_p` from reflection coefficients (step-up recursion).
fn step_up(k: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = Vec::new();
    for (i, &ki) in k.iter().enumerate() {
        let mut next = vec![0.0; i + 1];
        for j in 0..i {
            next[j] = a[j] - ki * a[i - 1 - j];
        }
        next[i] = ki;
        a = next;
    }
    a
}

/// `c_n` from a uniform-grid quadrature of `ln|1/A(e^{jw})|`, with
/// `A(z) = 1 - Σ a_j z^-j`. The rectangle rule is exact up to aliasing of
/// `c_{M±n}`, which decays like `r^M` for the largest pole radius `r`.
fn integrated_cepstrum(a: &[f64], n_max: usize, grid: usize) -> Vec<f64> {
    let mut c = vec![0.0; n_max];
    let depth = a.len().max(n_max);
    let mut pow = vec![(0.0, 0.0); depth + 1];
    for m in 0..grid {
        let w = 2.0 * PI * m as f64 / grid as f64;
        let (cw, sw) = (w.cos(), w.sin());
        pow[0] = (1.0, 0.0);
        for j in 1..=depth {
            let (re, im) = pow[j - 1];
            pow[j] = (re * cw - im * sw, re * sw + im * cw);
        }
        // A(e^{jw}) = 1 - Σ a_j e^{-jwj}.
        let (mut re, mut im) = (1.0, 0.0);
        for (j, aj) in a.iter().enumerate() {
            re -= aj * pow[j + 1].0;
            im += aj * pow[j + 1].1;
        }
        let g = -0.5 * (re * re + im * im).ln();
        for (n, cn) in c.iter_mut().enumerate() {
            *cn += g * pow[n + 1].0;
        }
    }
    c.iter().map(|v| 2.0 * v / grid as f64).collect()
}

/// Doubles the grid from 4096 points until two successive estimates agree to
/// `1e-10`; returns the converged estimate and the grid size used.
fn converged_cepstrum(a: &[f64], n_max: usize) -> (Vec<f64>, usize) {
    let mut grid = 4096;
    let mut prev = integrated_cepstrum(a, n_max, grid);
    while grid < 1 << 24 {
        grid *= 2;
        let next = integrated_cepstrum(a, n_max, grid);
        let step = prev
            .iter()
            .zip(&next)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        prev = next;
        if step <= 1e-10 {
            break;
        }
    }
    (prev, grid)
}

#[test]
fn criterion_4_cepstral_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut largest_grid = 0;
    for _ in 0..25 {
        let k: Vec<f64> = (0..12).map(|_| rng.random_range(-0.9..0.9)).collect();
        let a = step_up(&k);
        let fast = lpc_to_cepstral(&a);
        let (slow, grid) = converged_cepstrum(&a, 12);
        largest_grid = largest_grid.max(grid);
        for (x, y) in fast.0.iter().zip(&slow) {
            worst = worst.max((x - y).abs());
        }
    }
    let ok = worst <= 1e-6;
    let detail = format!(
        "max abs deviation {worst:.3e} over 25 predictors (quadrature grid up to {largest_grid})"
    );
    verdict(4, "cepstral oracle", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 5

/// Classifies every interior sample independently: `(poc, pot, nec, net)`.
fn brute_force_extrema(s: &[f64]) -> [u32; 4] {
    let mut out = [0u32; 4];
    for i in 1..s.len() - 1 {
        let (l, c, r) = (s[i - 1], s[i], s[i + 1]);
        let is_max = c > l && c > r;
        let is_min = c < l && c < r;
        let slot = match (c > 0.0, is_max, is_min) {
            (true, true, _) => 0,
            (true, _, true) => 1,
            (false, true, _) => 2,
            (false, _, true) => 3,
            _ => continue,
        };
        out[slot] += 1;
    }
    out
}

#[test]
fn criterion_5_extrema_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for case in 0..1000 {
        let len = rng.random_range(3..=500);
        // Half the cases use a coarse integer alphabet so plateaus and exact
        // zeros occur.
        let s: Vec<f64> = if case % 2 == 0 {
            (0..len).map(|_| rng.random_range(-1e4..1e4)).collect()
        } else {
            (0..len)
                .map(|_| f64::from(rng.random_range(-3i32..=3)))
                .collect()
        };
        let c = count_extrema_in(&s).unwrap();
        if [c.poc, c.pot, c.nec, c.net] != brute_force_extrema(&s) {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    let detail = format!("{mismatches} mismatches on 1000 sequences");
    verdict(5, "extrema oracle", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 6

/// Smallest value, ties to the lexicographically smallest id.
fn oracle_argmin(rows: &[(String, f64, f64)], pick: impl Fn(&(String, f64, f64)) -> f64) -> &str {
    let best = rows.iter().map(&pick).fold(f64::INFINITY, f64::min);
    rows.iter()
        .filter(|r| pick(r) == best)
        .map(|r| r.0.as_str())
        .min()
        .unwrap()
}

/// Checks fusion and claim decisions for one table; returns false on mismatch.
fn check_table(rows: &[(String, f64, f64)]) -> bool {
    let report = DistanceReport::from_rows(
        rows.iter()
            .map(|(id, c, t)| SpeakerDistance {
                speaker_id: id.clone(),
                cepstral: *c,
                temporal: *t,
            })
            .collect(),
    )
    .unwrap();
    let c = oracle_argmin(rows, |r| r.1);
    let t = oracle_argmin(rows, |r| r.2);
    let expected = if c == t {
        VerificationOutcome::Accepted(c.to_string())
    } else {
        VerificationOutcome::Rejected
    };
    if report.argmin_cepstral != c || report.argmin_temporal != t {
        return false;
    }
    if identify_combined(&report) != expected {
        return false;
    }
    rows.iter().all(|(id, _, _)| {
        let want = match &expected {
            VerificationOutcome::Accepted(s) if s == id => ClaimDecision::Verified,
            VerificationOutcome::Accepted(_) => ClaimDecision::Impostor,
            VerificationOutcome::Rejected => ClaimDecision::Retry,
        };
        verify_claim(&report, id).unwrap() == want
    })
}

#[test]
fn criterion_6_fusion_logic() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0usize;
    let mut checked = 0usize;

    // Exhaustive over a 3-level distance alphabet (ties included) and every
    // row order, for 2 to 4 speakers.
    for n in 2..=4usize {
        let ids: Vec<String> = (0..n).map(|i| format!("spk{i}")).collect();
        let cells = 2 * n;
        for code in 0..3usize.pow(cells as u32) {
            let mut digits = code;
            let mut vals = Vec::with_capacity(cells);
            for _ in 0..cells {
                vals.push((digits % 3) as f64);
                digits /= 3;
            }
            let mut rows: Vec<(String, f64, f64)> = (0..n)
                .map(|i| (ids[i].clone(), vals[2 * i], vals[2 * i + 1]))
                .collect();
            rows.shuffle(&mut rng);
            checked += 1;
            if !check_table(&rows) {
                failures += 1;
            }
        }
    }

    // Random tables with up to 12 speakers and continuous or coarse values.
    for case in 0..10_000 {
        let n = rng.random_range(2..=12);
        let rows: Vec<(String, f64, f64)> = (0..n)
            .map(|i| {
                let (c, t) = if case % 2 == 0 {
                    (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))
                } else {
                    (
                        f64::from(rng.random_range(0..4u8)),
                        f64::from(rng.random_range(0..4u8)),
                    )
                };
                (format!("id{:02}", (i * 7) % 13), c, t)
            })
            .collect();
        checked += 1;
        if !check_table(&rows) {
            failures += 1;
        }
    }

    let ok = failures == 0;
    let detail = format!("{failures} mismatches over {checked} tables");
    verdict(6, "fusion logic", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_7_synthetic_study() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    make_synthetic_corpus(dir.path(), &CorpusSpec::default()).unwrap();
    let manifest = read_manifest(dir.path().join("manifest.csv")).unwrap();
    let config = PipelineConfig::default();
    let trained = run_training(&manifest, &config).unwrap();
    let report = run_evaluation(
        &manifest,
        &trained.models,
        &config,
        &DistanceWeights::default(),
    )
    .unwrap();
    let elapsed = start.elapsed();

    let acc = |s| report.system(s).accuracy_pct().unwrap_or(0.0);
    let (c, t, f) = (
        acc(System::Cepstral),
        acc(System::Temporal),
        acc(System::Combined),
    );
    let comb = report.system(System::Combined);
    let ok = f >= c
        && f >= t
        && comb.accepted() > 0
        && report.failures.is_empty()
        && trained.models.len() == 50
        && elapsed <= Duration::from_secs(120);
    let detail = format!(
        "combined {f:.2}% ({} of {} accepted) vs cepstral {c:.2}% vs temporal {t:.2}%, \
         {} training warnings, {} test failures, {elapsed:.2?}",
        comb.accepted(),
        comb.total,
        trained.warnings.len(),
        report.failures.len()
    );
    verdict(7, "synthetic study", ok, &detail);
    assert!(ok, "{detail}");
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_8_determinism_and_round_trips() {
    let mut problems: Vec<String> = Vec::new();
    let config = PipelineConfig::default();
    let weights = DistanceWeights::default();

    // Corpus generation and training are reproducible byte for byte.
    let spec = CorpusSpec {
        n_speakers: 4,
        train_per_vowel: 4,
        test_per_vowel: 2,
        ..CorpusSpec::default()
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let entries = make_synthetic_corpus(d1.path(), &spec).unwrap();
    make_synthetic_corpus(d2.path(), &spec).unwrap();
    for e in &entries {
        let a = std::fs::read(d1.path().join(&e.path)).unwrap();
        let b = std::fs::read(d2.path().join(&e.path)).unwrap();
        if a != b {
            problems.push(format!("corpus file {} differs", e.path.display()));
        }
    }
    let manifest = read_manifest(d1.path().join("manifest.csv")).unwrap();
    let m1 = run_training(&manifest, &config).unwrap().models;
    let m2 = run_training(&manifest, &config).unwrap().models;
    if format_models(&m1) != format_models(&m2) {
        problems.push("repeated training differs".into());
    }

    // Model file round trip.
    let path = d1.path().join("models.txt");
    save_models(&m1, &path).unwrap();
    let loaded = load_models(&path).unwrap();
    let mut worst = 0.0f64;
    for m in m1.iter() {
        let l = loaded.get(&m.speaker_id, m.vowel).expect("model survives");
        for (x, y) in m.mean_features.iter().zip(&l.mean_features) {
            worst = worst.max((x - y).abs());
        }
        if l.n_utterances != m.n_utterances {
            problems.push(format!("utterance count of {} changed", m.speaker_id));
        }
    }
    if loaded.len() != m1.len() || worst > 1e-9 {
        problems.push(format!("round trip error {worst:.3e}"));
    }

    // Bit-identical reruns and amplitude-scale invariance per test utterance.
    let mut scale_checks = 0;
    for e in manifest.split(pitchsync::evaluation::Split::Test) {
        let buf = pitchsync::signal_io::load_signal(manifest.resolve(e), 16_000).unwrap();
        let f1 = analyze(&buf, e.vowel, &config).unwrap();
        let f2 = analyze(&buf, e.vowel, &config).unwrap();
        let bits = |f: &pitchsync::UtteranceFeatures| f.to_vector().map(f64::to_bits);
        if bits(&f1) != bits(&f2) {
            problems.push(format!("{} not bit-identical", e.path.display()));
        }
        let base = score_against_models(&f1, &m1, &weights).unwrap();
        for c in [0.25, 0.37, 2.0, 7.1] {
            let scaled = buf.scaled(c).unwrap();
            let fs = analyze(&scaled, e.vowel, &config).unwrap();
            let r = score_against_models(&fs, &m1, &weights).unwrap();
            scale_checks += 1;
            if fs.temporal != f1.temporal {
                problems.push(format!(
                    "{} temporal changed at scale {c}",
                    e.path.display()
                ));
            }
            if (r.argmin_cepstral.as_str(), r.argmin_temporal.as_str())
                != (base.argmin_cepstral.as_str(), base.argmin_temporal.as_str())
            {
                problems.push(format!(
                    "{} decision changed at scale {c}",
                    e.path.display()
                ));
            }
        }
    }

    let ok = problems.is_empty();
    let detail = if ok {
        format!(
            "{} models, round trip max error {worst:.1e}, {scale_checks} scaled reruns agree",
            m1.len()
        )
    } else {
        problems.join("; ")
    };
    verdict(8, "determinism and round trips", ok, &detail);
    assert!(ok, "{detail}");
}
