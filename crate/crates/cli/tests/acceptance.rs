//! Acceptance gate: one PASS/FAIL line per criterion, then a single assertion.
//!
//! Run with `cargo test -p dimlab-cli --test acceptance -- --nocapture` to see the lines.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dimlab_core::bits::{join2, BitWord, Constant, Periodic, Pseudorandom, Source};
use dimlab_core::complexity::{
    CeilingEstimator, ComplexityEstimator, CompressorEstimator, ExactEstimator, ToyPrefixMachine,
};
use dimlab_core::constructions::{
    build_generic_like, build_theorem4, ell_lambda, endpoint_set, KFilter, Polarity, Schedule, UseBound, EVEN,
};
use dimlab_core::dimensions::{
    dim_is_from, dim_si_from, member_report, member_reports, profile_from, RatioTable, Window,
};
use dimlab_core::families::{thin_enumeration, IndexFamily, IndexSet};
use dimlab_core::reductions::{apply_wtt, transduce, WttMachine};
use dimlab_core::thresholds as th;

struct Verdict {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Verdict {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Verdict {
        id,
        name,
        pass,
        detail: format!("{detail} [{:.1}s]", start.elapsed().as_secs_f64()),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn random_base(rng: &mut ChaCha8Rng) -> Source {
    match rng.random_range(0..4u8) {
        0 => Arc::new(Constant(rng.random())),
        1 => {
            let len = rng.random_range(1..24usize);
            let pat: BitWord = (0..len).map(|_| rng.random::<bool>()).collect();
            Arc::new(Periodic::new(pat).unwrap())
        }
        2 => Arc::new(Pseudorandom::new(rng.random())),
        _ => Arc::new(build_theorem4(Arc::new(Pseudorandom::new(rng.random())), Schedule::default())),
    }
}

fn random_source(rng: &mut ChaCha8Rng) -> Source {
    if rng.random_range(0..3u8) == 0 {
        let (a, b) = (random_base(rng), random_base(rng));
        join2(a, b)
    } else {
        random_base(rng)
    }
}

fn random_set(rng: &mut ChaCha8Rng) -> IndexSet {
    match rng.random_range(0..3u8) {
        0 => IndexSet::progression(rng.random_range(0..50), rng.random_range(1..40)),
        1 => {
            let modulus = rng.random_range(1..4);
            IndexSet::pow2(rng.random_range(0..modulus), modulus)
        }
        _ => {
            let mut x = 0u64;
            let xs: Vec<u64> = (0..rng.random_range(1..60))
                .map(|_| {
                    x += rng.random_range(1..400);
                    x
                })
                .collect();
            IndexSet::explicit(xs, "random-explicit").unwrap()
        }
    }
}

/// Criterion 1.
fn chain() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = Window::with_defaults(1 << 13).unwrap();
    let est = CompressorEstimator;
    let mut extra_members = 0;
    for i in 0..100 {
        let src = random_source(&mut rng);
        let t = RatioTable::compute(src.as_ref(), &est, w.horizon());
        let mut fam = w.tail_family();
        for _ in 0..4 {
            let s = random_set(&mut rng);
            if member_report(&t, &s, &w).is_ok() {
                fam.members.push(s);
                extra_members += 1;
            }
        }
        let p = profile_from(&t, src.describe(), est.id(), &fam, &w).map_err(|e| e.to_string())?;
        ensure(p.chain_holds(), || {
            format!(
                "source {i} ({}): H={} is={} si={} p={}",
                p.source, p.dim_h.value, p.dim_is.value, p.dim_si.value, p.dim_p.value
            )
        })?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("100 profiles ordered, {extra_members} non-tail members"))
}

/// Criterion 2.
fn separation() -> Result<String, String> {
    let start = Instant::now();
    let b = build_theorem4(Arc::new(Pseudorandom::new(th::SEGMENT_SEED)), Schedule::default());
    let w = th::segment_window();
    let t = RatioTable::compute(&b, &CompressorEstimator, w.horizon());
    let tails = |label, filter| {
        IndexFamily::tails_of(label, &endpoint_set(Schedule::default(), filter, 0), w.floor(), w.horizon()).unwrap()
    };
    let si = dim_si_from(&member_reports(&t, &tails("R", KFilter::ODD), &w).unwrap()).value.to_f64();
    let is = dim_is_from(&member_reports(&t, &tails("Z", EVEN), &w).unwrap()).value.to_f64();
    ensure(si >= th::SEGMENT_SI_MIN, || format!("si over R tails {si:.4}"))?;
    ensure(is <= th::SEGMENT_IS_MAX, || format!("is over Z tails {is:.4}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("si(R)={si:.4} >= {}, is(Z)={is:.4} <= {}", th::SEGMENT_SI_MIN, th::SEGMENT_IS_MAX))
}

/// Criterion 3.
fn generic() -> Result<String, String> {
    let g = build_generic_like(
        th::generic_bank(),
        Arc::new(Constant(false)),
        Arc::new(Pseudorandom::new(th::GENERIC_HIGH_SEED)),
        th::GENERIC_PARAMS,
    )
    .map_err(|e| e.to_string())?;
    ensure(g.bank().len() == 4, || "bank size".into())?;
    ensure(g.meet_counts().iter().all(|&c| c >= 1), || format!("meets {:?}", g.meet_counts()))?;
    let w = th::generic_window();
    let t = RatioTable::compute(&g, &CompressorEstimator, w.horizon());
    let reports = |p| member_reports(&t, &g.designated_family(p).unwrap(), &w).map_err(|e| e.to_string());
    let si = dim_si_from(&reports(Polarity::Compressible)?).value.to_f64();
    let is = dim_is_from(&reports(Polarity::Incompressible)?).value.to_f64();
    ensure(si <= th::GENERIC_SI_MAX, || format!("si over compressible {si:.4}"))?;
    ensure(is >= th::GENERIC_IS_MIN, || format!("is over incompressible {is:.4}"))?;
    Ok(format!("si(C)={si:.4} <= {}, is(I)={is:.4} >= {}", th::GENERIC_SI_MAX, th::GENERIC_IS_MIN))
}

/// Criterion 4.
fn transducer() -> Result<String, String> {
    let est = CompressorEstimator;
    let r = transduce(Arc::new(Constant(false)), Arc::new(Pseudorandom::new(7)), th::TRANSDUCER_STAGES, &est);
    ensure(r.final_track == 1, || format!("final track {}", r.final_track))?;
    ensure(r.switches.len() == th::TRANSDUCER_SWITCHES, || format!("{} switches", r.switches.len()))?;
    ensure(r.use_within_bound(), || "use bound 2n exceeded".into())?;
    ensure(r.use_trace.len() == r.output.len(), || "use trace incomplete".into())?;
    let n = r.output.len();
    let quarter: BitWord = r.output.iter().skip(n * 3 / 4).collect();
    let ratio = est.estimate(&quarter) as f64 / quarter.len() as f64;
    ensure(ratio >= th::TRANSDUCER_TAIL_MIN, || format!("final quarter ratio {ratio:.4}"))?;

    let a0: Source = Arc::new(Pseudorandom::new(1));
    let both = transduce(a0.clone(), Arc::new(Pseudorandom::new(2)), th::TRANSDUCER_STAGES, &CeilingEstimator::default());
    ensure(both.switches.is_empty(), || format!("{} switches under the ceiling", both.switches.len()))?;
    ensure(both.output == a0.prefix(th::TRANSDUCER_STAGES), || "ceiling run did not copy A0".into())?;
    Ok(format!(
        "{} switch, final track 1, use < 2n at all {n} prefixes, final quarter {ratio:.4}; ceiling run 0 switches",
        r.switches.len()
    ))
}

/// Criterion 5.
fn recurrences() -> Result<String, String> {
    let s = ell_lambda(&UseBound::Identity, 8).map_err(|e| e.to_string())?;
    ensure(small(&s.ell) == ["1", "16", "512", "65536"], || format!("ell {:?}", small(&s.ell)))?;
    ensure(small(&s.lambda) == ["1", "2", "18", "530"], || format!("lambda {:?}", small(&s.lambda)))?;
    s.check_inequalities().map_err(|k| format!("inequalities fail at k={k}"))?;
    s.check_ratio_decreasing().map_err(|k| format!("ratio does not decrease at k={k}"))?;
    Ok(format!("{} terms; ell_8 = 2^{}", s.ell.len(), s.ell[8].bits() - 1))
}

fn small<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().take(4).map(T::to_string).collect()
}

/// Criterion 6.
fn bit_repeat() -> Result<String, String> {
    let est = CompressorEstimator;
    let x: Source = Arc::new(Pseudorandom::new(th::BIT_REPEAT_SEED));
    let y = apply_wtt(&WttMachine::bit_repeat(), x.clone(), th::BIT_REPEAT_N).map_err(|e| e.to_string())?;
    let n = th::BIT_REPEAT_N as f64;
    let image = est.estimate(y.bits()) as f64 / n;
    let oracle = est.estimate(&x.prefix(th::BIT_REPEAT_N)) as f64 / n;
    ensure(image <= th::BIT_REPEAT_IMAGE_MAX, || format!("image ratio {image:.4}"))?;
    ensure(oracle >= th::BIT_REPEAT_ORACLE_MIN, || format!("oracle ratio {oracle:.4}"))?;
    Ok(format!("image {image:.4} <= {}, oracle {oracle:.4} >= {}", th::BIT_REPEAT_IMAGE_MAX, th::BIT_REPEAT_ORACLE_MIN))
}

/// Criterion 7.
fn exact_k() -> Result<String, String> {
    let start = Instant::now();
    let en = Arc::new(ToyPrefixMachine::with_limits(th::EXACT_L_MAX, th::EXACT_PROGRAM_MAX).enumerate());
    ensure(en.is_prefix_free(), || "halting programs are not prefix-free".into())?;
    ensure(en.kraft_holds(), || format!("Kraft numerator {}", en.kraft_numerator()))?;
    let c = en.machine_constant(th::EXACT_L_MAX);
    ensure(c == th::MACHINE_CONSTANT, || format!("machine constant {c}"))?;
    for len in 0..=th::EXACT_L_MAX {
        for v in 0u64..(1 << len) {
            let w: BitWord = (0..len).rev().map(|i| v >> i & 1 == 1).collect();
            let k = en.exact_k(&w, None).map_err(|e| e.to_string())?.value as i64;
            ensure(k <= 2 * len as i64 + c, || format!("K({w}) = {k}"))?;
        }
    }
    let est = ExactEstimator::new(en.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let len = rng.random_range(0..=th::EXACT_L_MAX);
        let w: BitWord = (0..len).map(|_| rng.random::<bool>()).collect();
        let s = rng.random_range(0..200u64);
        let (a, b) = (est.staged_estimate(&w, s), est.staged_estimate(&w, s + 1));
        ensure(b <= a, || format!("K_s({w}) rose from {a} to {b} at s={s}"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} programs, Kraft {}/2^{}, c_machine = {c}, 1000 staged pairs monotone",
        en.programs.len(),
        en.kraft_numerator(),
        th::EXACT_PROGRAM_MAX
    ))
}

/// Criterion 8.
fn monotonicity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let est = CompressorEstimator;
    let w = Window::new(32, 1 << 12, Some(vec![32, 64, 128])).unwrap();
    for pair in 0..50 {
        let src = random_source(&mut rng);
        let t = RatioTable::compute(src.as_ref(), &est, w.horizon());
        let pool: Vec<_> = (0..12)
            .map(|_| random_set(&mut rng))
            .chain(w.tail_family().members)
            .filter_map(|s| member_report(&t, &s, &w).ok())
            .collect();
        let small_len = rng.random_range(1..=pool.len());
        let mut order: Vec<usize> = (0..pool.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let small: Vec<_> = order[..small_len].iter().map(|&i| pool[i].clone()).collect();
        let large: Vec<_> = order.iter().map(|&i| pool[i].clone()).collect();
        ensure(dim_si_from(&small).value <= dim_si_from(&large).value, || format!("pair {pair}: si decreased"))?;
        ensure(dim_is_from(&small).value >= dim_is_from(&large).value, || format!("pair {pair}: is increased"))?;
    }
    for stream_id in 0..1000 {
        let len = rng.random_range(1..200usize);
        let stream: Vec<u64> = (0..len).map(|_| rng.random_range(0..5000u64)).collect();
        let horizon = 4000;
        let thinned = match thin_enumeration(stream.clone(), horizon) {
            Ok(s) => s.elements_up_to(u64::MAX),
            Err(_) => {
                ensure(stream.iter().all(|&x| x > horizon), || format!("stream {stream_id}: spurious exhaustion"))?;
                continue;
            }
        };
        ensure(thinned.windows(2).all(|p| p[0] < p[1]), || format!("stream {stream_id}: not increasing"))?;
        let mut it = stream.iter();
        ensure(thinned.iter().all(|x| it.any(|y| y == x)), || format!("stream {stream_id}: not a subsequence"))?;
        ensure(Some(&thinned[0]) == stream.iter().find(|&&x| x <= horizon), || {
            format!("stream {stream_id}: does not start at the first admissible element")
        })?;
    }
    Ok("50 family pairs monotone, 1000 thinned streams increasing subsequences".into())
}

fn dimlab(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dimlab")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("dimlab {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = std::fs::read_dir(a).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = std::fs::read_dir(b).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    other.sort();
    ensure(names == other, || format!("{} vs {}: file lists differ", a.display(), b.display()))?;
    for n in &names {
        let (x, y) = (std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap());
        ensure(x == y, || format!("{} differs on replay", n.to_string_lossy()))?;
    }
    Ok(names.len())
}

/// Criterion 9.
fn replay() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    let family = d("family.txt");
    std::fs::write(&family, "label aps\nkind=ap start=1 step=3\nkind=pow2 residue=0 modulus=2\n").unwrap();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("construct", vec!["--horizon".into(), "8192".into(), "--seed".into(), "3".into()]),
        ("profile", vec!["--horizon".into(), "4096".into(), "--family".into(), family.clone()]),
        ("transduce", vec!["--stages".into(), "1024".into()]),
        ("wtt", vec!["--horizon".into(), "2048".into()]),
        ("exactk", vec![]),
    ];
    let mut files = 0;
    for (cmd, extra) in &runs {
        let first = d(&format!("{cmd}-1"));
        let replayed = d(&format!("{cmd}-2"));
        let mut args = vec![*cmd, "--out", first.as_str()];
        args.extend(extra.iter().map(String::as_str));
        dimlab(&args)?;
        let manifest = Path::new(&first).join("manifest.toml").to_string_lossy().into_owned();
        dimlab(&["replay", &manifest, "--out", &replayed])?;
        files += same_tree(Path::new(&first), Path::new(&replayed))?;
    }
    Ok(format!("5 commands replayed, {files} artifacts byte-identical"))
}

#[test]
fn acceptance() {
    let verdicts = [
        check(1, "inequality chain", chain),
        check(2, "segment separation", separation),
        check(3, "generic-like builder", generic),
        check(4, "transducer", transducer),
        check(5, "recurrences", recurrences),
        check(6, "bit-repeat image", bit_repeat),
        check(7, "exact-K substrate", exact_k),
        check(8, "monotonicity and thinning", monotonicity),
        check(9, "replay", replay),
    ];
    for v in &verdicts {
        println!(
            "{} criterion {} ({}): {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
