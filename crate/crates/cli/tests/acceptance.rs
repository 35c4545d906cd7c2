//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use phonofeat::frontend::{self, MappingTable, PronToken};
use phonofeat::metrics::{self, OosCounting};
use phonofeat::projection::{self, ProjectionLayer};
use phonofeat::schema::{self, BitVector, FeatureSchema};
use phonofeat::zeroshot::{self, PhonemeInventory, Strategy};
use phonofeat::{Analyzer, Segment};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance for floating-point criteria.
const REL_TOL: f64 = 1e-9;

fn data(rel: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", rel].iter().collect()
}

fn rel_close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return true;
    }
    (a - b).abs() / scale <= REL_TOL
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn phonemes_of_chart(an: &Analyzer) -> Vec<Segment> {
    an.chart().bases().map(Segment::phoneme).collect()
}

/// Every diacritic value the schema knows about.
fn diacritic_names(schema: &FeatureSchema) -> Vec<String> {
    schema.feature(schema::DIACRITIC).unwrap().values.clone()
}

/// A random chart base with 0 to 3 random diacritics and random stress,
/// round-tripped through its IPA string.
fn random_decorated(an: &Analyzer, rng: &mut ChaCha8Rng) -> Segment {
    let bases: Vec<char> = an.chart().bases().collect();
    let names = diacritic_names(an.schema());
    let base = *bases.choose(rng).unwrap();
    let mut seg = Segment::phoneme(base);
    for _ in 0..rng.random_range(0..=3) {
        let name = names.choose(rng).unwrap();
        if !seg.diacritics.contains(name) {
            seg = seg.with_diacritic(name);
        }
    }
    if an.chart().is_vowel(base) {
        seg = seg.stressed(rng.random_bool(0.5));
    }
    let text = seg.to_string();
    let mut parsed = an.tokenize(&text).unwrap_or_else(|e| panic!("`{text}`: {e}"));
    assert_eq!(parsed.len(), 1, "`{text}`");
    parsed.remove(0)
}

fn ac1_bit_budget() -> Outcome {
    let start = Instant::now();
    let schema = FeatureSchema::default();
    let bits = schema.total_bits();
    let labels = schema.bit_labels().len();
    let elapsed = start.elapsed();
    ensure(bits == 60 && labels == 60, format!("total_bits={bits}, labels={labels}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("60 bits in {elapsed:?}"))
}

fn ac2_round_trip() -> Outcome {
    let an = Analyzer::default();
    let segs = phonemes_of_chart(&an);
    ensure(segs.len() >= 100, format!("chart has only {} bases", segs.len()))?;
    let mut failures = Vec::new();
    for seg in &segs {
        let v = an.analyze(seg).map_err(|e| format!("{seg}: {e}"))?;
        let bits = an.schema().binarize(&v.categorical).map_err(|e| e.to_string())?;
        let back = an.schema().debinarize(&bits).map_err(|e| e.to_string())?;
        if back != v.categorical || bits != v.bits {
            failures.push(seg.to_string());
        }
    }
    ensure(failures.is_empty(), format!("failures: {failures:?}"))?;
    Ok(format!("{} bases, 0 failures", segs.len()))
}

fn ac3_one_hot() -> Outcome {
    let an = Analyzer::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut segs = phonemes_of_chart(&an);
    segs.extend((0..1000).map(|_| random_decorated(&an, &mut rng)));
    let mut violations = 0;
    for seg in &segs {
        let bits = an.analyze(seg).map_err(|e| format!("{seg}: {e}"))?.bits;
        for f in an.schema().features() {
            let pop = f.bit_range().filter(|&i| bits.get(i)).count();
            if pop > 1 || (!f.nullable && pop != 1) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    Ok(format!("{} segments, 0 violations", segs.len()))
}

fn ac4_mapping_fixtures() -> Outcome {
    let an = Analyzer::default();
    let seg = |s: &str| an.tokenize(s).unwrap().remove(0);
    let d = |a: &str, b: &str| an.pf_distance(&seg(a), &seg(b)).unwrap();
    let pairs = [("ç", "ʃ", 1), ("ʏ", "ɪ", 1), ("ʀ", "ɹ", 2), ("ʀ", "g", 2)];
    for (a, b, want) in pairs {
        let got = d(a, b);
        ensure(got == want, format!("d({a},{b}) = {got}, want {want}"))?;
    }
    // the same distances surface through suggest_nearest
    let inv = |s: &str| PhonemeInventory::parse(s, "fixture", false, &an).unwrap();
    let near = |q: &str, i: &str| zeroshot::suggest_nearest(&seg(q), &inv(i), 10, &an).unwrap();
    let palatal = near("ç", "ʃ p a");
    ensure(palatal[0].segment == seg("ʃ") && palatal[0].distance == 1, format!("ç -> {:?}", palatal[0]))?;
    let front_round = near("ʏ", "ɪ p a");
    ensure(front_round[0].segment == seg("ɪ") && front_round[0].distance == 1, format!("ʏ -> {:?}", front_round[0]))?;
    let uvular = near("ʀ", "ɹ ɡ a");
    ensure(
        uvular[0].distance == 2 && uvular[1].distance == 2,
        format!("ʀ -> {} at {}, {} at {}", uvular[0].segment, uvular[0].distance, uvular[1].segment, uvular[1].distance),
    )?;
    Ok("ç–ʃ 1, ʏ–ɪ 1, ʀ–ɹ 2, ʀ–ɡ 2".into())
}

fn ac5_frontend_rules() -> Outcome {
    let an = Analyzer::default();
    let lex = frontend::load_lexicon(&data("lexicons/de-fixture.tsv"), "mary-de").map_err(|e| e.to_string())?;
    let table = MappingTable::load(&data("mappings/mary-de.tsv"), &an).map_err(|e| e.to_string())?;
    ensure(lex.len() == 50, format!("lexicon has {} entries", lex.len()))?;

    let mut long_symbols = 0;
    let mut stressed_diphthongs = 0;
    let mut bad = Vec::new();
    for word in lex.words() {
        let pron = lex.get(word).unwrap();
        let segs = frontend::to_ipa(pron, &table, &an).map_err(|e| format!("{word}: {e}"))?;
        if segs.iter().any(|s| s.long) {
            bad.push(format!("{word}: long flag"));
        }
        // align resource symbols with their output segments
        let mut pos = 0;
        for tok in pron {
            let PronToken::Symbol(sym) = tok else { continue };
            let n = table.get(sym).unwrap().len();
            if table.get(sym).unwrap().iter().any(|s| s.long) {
                long_symbols += 1;
            }
            if table.is_diphthong(sym) {
                let (first, second) = (&segs[pos], &segs[pos + 1]);
                if second.stressed {
                    bad.push(format!("{word}: second component of {sym} stressed"));
                }
                if first.stressed {
                    stressed_diphthongs += 1;
                }
            }
            pos += n;
        }
        ensure(pos == segs.len(), format!("{word}: alignment"))?;
    }
    ensure(bad.is_empty(), format!("{bad:?}"))?;
    ensure(long_symbols > 0, "fixture has no long vowels")?;
    ensure(stressed_diphthongs > 0, "fixture has no stressed diphthongs")?;
    Ok(format!(
        "50 entries, {long_symbols} long symbols cleared, {stressed_diphthongs} stressed diphthongs"
    ))
}

fn ac6_auto_pass_through() -> Outcome {
    let an = Analyzer::default();
    let inv = PhonemeInventory::load(&data("inventories/rp.txt"), false, &an).map_err(|e| e.to_string())?;
    let segs = an.tokenize("ˈʃtʀaːsə # ˈmʏnçən # p͡fɛʀt .").map_err(|e| e.to_string())?;
    let oos = zeroshot::detect_oos(&segs, &inv);
    ensure(!oos.is_empty(), "fixture has no OOS phonemes")?;
    let plan = zeroshot::build_plan(Strategy::Auto, &oos, &inv, None, None, &an).map_err(|e| e.to_string())?;
    let direct = an.encode(&segs).map_err(|e| e.to_string())?;
    let via_plan: Vec<BitVector> = plan
        .encode(&segs, &an)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| match r {
            zeroshot::InputRow::Features(b) => Ok(b),
            zeroshot::InputRow::Embedding(id) => Err(format!("unexpected embedding row {id}")),
        })
        .collect::<Result<_, _>>()?;
    ensure(via_plan == direct, "AUTO matrix differs from direct encoding")?;
    Ok(format!("{} rows identical, {} OOS", direct.len(), oos.len()))
}

/// Inventory identity without stress or length, read off the IPA string.
fn oracle_key(seg: &Segment) -> String {
    seg.to_string().replace(['ˈ', 'ː'], "")
}

fn ac7_oracle_equivalence() -> Outcome {
    let an = Analyzer::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..200 {
        let mut draw = || -> Vec<Segment> {
            let n = rng.random_range(1..40);
            (0..n).map(|_| random_decorated(&an, &mut rng)).collect()
        };
        let (a, b) = (draw(), draw());
        let inv_a = PhonemeInventory::from_segments("a", false, &a);
        let inv_b = PhonemeInventory::from_segments("b", false, &b);

        let keys_a: BTreeSet<String> = a.iter().map(oracle_key).collect();
        let keys_b: BTreeSet<String> = b.iter().map(oracle_key).collect();
        let want: BTreeSet<String> = keys_b.difference(&keys_a).cloned().collect();

        let got_vec: Vec<String> = zeroshot::detect_oos(&b, &inv_a).iter().map(oracle_key).collect();
        let got: BTreeSet<String> = got_vec.iter().cloned().collect();
        let stats = metrics::inventory_stats(&inv_a, &inv_b);
        if got != want || got.len() != got_vec.len() || stats.unique != keys_a.len() || stats.oos != want.len() {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("200 pairs, 0 mismatches in {elapsed:?}"))
}

fn ac8_upr_arithmetic() -> Outcome {
    let an = Analyzer::default();
    let inv = PhonemeInventory::parse("p t k a i", "fixture", false, &an).map_err(|e| e.to_string())?;
    let in_set = ['p', 'a', 't', 'i', 'k'];
    let out_set = ['ç', 'ʏ', 'x'];
    let mut expected = Vec::new();
    let mut utterances = Vec::new();
    for i in 0..20usize {
        let n_in = 5 + i;
        let n_oos = i % 4 + (i / 10);
        let mut symbols: Vec<char> = (0..n_in).map(|j| in_set[j % in_set.len()]).collect();
        for j in 0..n_oos {
            symbols.insert((j * 3) % (symbols.len() + 1), out_set[j % out_set.len()]);
        }
        let words: Vec<String> = symbols.chunks(3).map(|c| c.iter().collect()).collect();
        let text = format!("{} .", words.join(" # "));
        let segs = an.tokenize(&text).map_err(|e| e.to_string())?;
        let s = metrics::upr(&segs, &inv, OosCounting::Tokens).map_err(|e| e.to_string())?;
        let want = 100.0 * n_oos as f64 / (n_in + n_oos) as f64;
        ensure(
            rel_close(s.upr_percent, want) && s.word_count == words.len() && s.phoneme_count == n_in + n_oos,
            format!("utterance {i}: {s:?}, want {want}"),
        )?;
        expected.push(want);
        utterances.push(segs);
    }
    let ts = metrics::testset_stats(&utterances, &inv, OosCounting::Tokens).map_err(|e| e.to_string())?;
    let mean = expected.iter().sum::<f64>() / expected.len() as f64;
    let min = expected.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = expected.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ensure(rel_close(ts.upr_mean, mean), format!("mean {} vs {mean}", ts.upr_mean))?;
    ensure(ts.upr_min == min && rel_close(ts.upr_max, max), format!("range {}-{}", ts.upr_min, ts.upr_max))?;
    Ok(format!("20 utterances, mean {mean:.6}%"))
}

fn ac9_parameter_count() -> Outcome {
    let pf = projection::pf_parameter_count(512, FeatureSchema::default().total_bits());
    ensure(pf == 512 * 60 + 512, format!("pf path = {pf}"))?;
    for n in [73, 89] {
        let table = projection::table_parameter_count(n, 512);
        ensure(table == n * 512, format!("table({n}) = {table}"))?;
        ensure(pf < table, format!("{pf} >= {table}"))?;
    }
    Ok(format!("{pf} < {} and < {}", 73 * 512, 89 * 512))
}

fn ac10_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let layer = projection::init_projection(64, 60, 99).map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        let bits = BitVector::from_ones(60, &(0..60).filter(|_| rng.random_bool(0.3)).collect::<Vec<_>>());
        let got = layer.project(&bits).map_err(|e| e.to_string())?;
        for (r, &g) in got.iter().enumerate() {
            let want: f64 = layer.bias()[r] + bits.ones().map(|c| layer.weight(r, c)).sum::<f64>();
            ensure(rel_close(g, want), format!("row {r}: {g} vs {want}"))?;
        }
    }
    let an = Analyzer::default();
    let segs = phonemes_of_chart(&an);
    let export = || -> Result<Vec<u8>, String> {
        let layer = ProjectionLayer::init_injective(32, 60, 5, &an.encode(&segs).unwrap()).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        projection::write_embeddings(&layer, &segs, &an, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    let (a, b) = (export()?, export()?);
    ensure(a == b, "exports differ")?;
    Ok(format!("1000 vectors within {REL_TOL:e}, {}-byte export identical", a.len()))
}

fn ac11_cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let s = |p: PathBuf| p.to_string_lossy().into_owned();
    let (rp, de) = (s(data("inventories/rp.txt")), s(data("inventories/de.txt")));
    let emb = s(tmp.path().join("emb.csv"));
    let cases: Vec<Vec<String>> = [
        vec!["schema", "show"],
        vec!["schema", "validate"],
        vec!["encode", "--ipa", "ˈhaʊs # ç ."],
        vec!["analyze", "--ipa", "t͡ʃʰ"],
        vec![
            "frontend",
            "--lexicon",
            &s(data("lexicons/de-fixture.tsv")),
            "--mapping",
            &s(data("mappings/mary-de.tsv")),
            "--text",
            "Mein Haus.",
        ],
        vec!["inventory", "--segments", &de],
        vec!["oos", "--inventory", &rp, "--target", &de],
        vec!["upr", "--inventory", &rp, "--utterances", &s(data("utterances/upr-fixture.txt"))],
        vec!["nearest", "--inventory", &rp, "--phoneme", "ç", "-k", "3"],
        vec!["plan", "--strategy", "auto", "--inventory", &rp, "--target", &de],
        vec!["plan", "--strategy", "manual", "--inventory", &rp, "--target", &de],
        vec!["plan", "--strategy", "random", "--seed", "42", "--inventory", &rp, "--target", &de],
        vec!["project", "--dim", "8", "--seed", "1", "--segments", &de, "--out", &emb],
    ]
    .iter()
    .map(|v| v.iter().map(|x| x.to_string()).collect())
    .collect();
    for args in &cases {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_phonofeat"))
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), format!("{args:?} exited {}", out.status))?;
            let file = if args[0] == "project" { std::fs::read(&emb).unwrap() } else { Vec::new() };
            outputs.push((out.stdout, file));
        }
        ensure(outputs[0] == outputs[1], format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} subcommand invocations byte-identical", cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("AC1  bit budget", ac1_bit_budget),
        ("AC2  round trip", ac2_round_trip),
        ("AC3  one-hot law", ac3_one_hot),
        ("AC4  mapping fixtures", ac4_mapping_fixtures),
        ("AC5  frontend rules", ac5_frontend_rules),
        ("AC6  AUTO pass-through", ac6_auto_pass_through),
        ("AC7  oracle equivalence", ac7_oracle_equivalence),
        ("AC8  UPR arithmetic", ac8_upr_arithmetic),
        ("AC9  parameter count", ac9_parameter_count),
        ("AC10 projection linearity", ac10_projection),
        ("AC11 CLI determinism", ac11_cli_determinism),
    ];
    // written straight to stdout so the lines show up without --nocapture
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => writeln!(out, "PASS {name}: {detail}").unwrap(),
            Err(detail) => {
                writeln!(out, "FAIL {name}: {detail}").unwrap();
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
