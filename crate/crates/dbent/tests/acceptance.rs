//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use debruijn_entropy::oracle::{burnside_necklaces, count_euler_circuits, enumerate_class};
use debruijn_entropy::quiver::boxminus;
use debruijn_entropy::spin::{
    partition_function, thermodynamic_limit, CouplingConvention, SpinParams,
};
use debruijn_entropy::{
    binary_w1_closed_form, componentwise_entropy, distance_matrix, eulerian_entropy, levenshtein,
    linkage, relative_entropy, word_entropy, Alphabet, CyclicWord, LinkageMethod, Quiver,
    Tolerances,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Quiver identity for grouping words into classes.
type ClassKey = Vec<((usize, usize), u64)>;

fn run_criterion(n: u32, desc: &str, budget_s: f64, body: impl FnOnce() + UnwindSafe) {
    let start = Instant::now();
    let result = catch_unwind(body);
    let elapsed = start.elapsed().as_secs_f64();
    match &result {
        Ok(()) => println!("criterion {n} ({desc}): PASS in {elapsed:.2}s (budget {budget_s}s)"),
        Err(_) => println!("criterion {n} ({desc}): FAIL after {elapsed:.2}s"),
    }
    if let Err(e) = result {
        resume_unwind(e);
    }
    assert!(
        elapsed < budget_s,
        "criterion {n} exceeded its runtime budget: {elapsed:.2}s > {budget_s}s"
    );
}

fn alphabet(symbols: &str) -> Arc<Alphabet> {
    Arc::new(Alphabet::from_str(symbols).unwrap())
}

fn word(text: &str, symbols: &str) -> CyclicWord {
    CyclicWord::from_text(text, &alphabet(symbols)).unwrap()
}

fn dbent_stdout(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_dbent"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "dbent {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn criterion_01_golden_counts() {
    run_criterion(1, "golden counts", 1.0, || {
        let tol = Tolerances::default();
        let abra = Quiver::from_word(&word("ABRACADABRA", "ABCDR"), 1).unwrap();
        let report = eulerian_entropy(&abra).unwrap();
        assert_eq!(report.count(&tol), Some(12));
        assert_eq!(report.euler_circuit_count(&tol), Some(96));
        let t = report.log_spanning_trees.exp();
        assert!((t - 4.0).abs() <= 1e-6 * 4.0, "t = {t}");

        let w2 = word_entropy(&word("ABRACADABRA", "ABCDR"), 2).unwrap();
        assert_eq!(w2.count(), Some(1));

        let barbara = Quiver::from_word(&word("BARBARA", "ABR"), 1).unwrap();
        let report = eulerian_entropy(&barbara).unwrap();
        assert_eq!(report.count(&tol), Some(2));
        assert_eq!(report.euler_circuit_count(&tol), Some(8));
        let t = report.log_spanning_trees.exp();
        assert!((t - 4.0).abs() <= 1e-6 * 4.0, "t = {t}");

        let atagtc = word_entropy(&word("ATAGTC", "ACGT"), 1).unwrap();
        assert_eq!(atagtc.count(), Some(2));
    });
}

#[test]
fn criterion_02_class_listing() {
    run_criterion(2, "ABRACADABRA class listing", 30.0, || {
        // the twelve known members of the class, compared as cyclic words:
        // both sides canonicalized to least rotations
        let listed = [
            "ABRABRACADA",
            "ABRABRADACA",
            "ABRACABRADA",
            "ABRACADABRA",
            "ABRADABRACA",
            "ABRADACABRA",
            "ACABRABRADA",
            "ACABRADABRA",
            "ACADABRABRA",
            "ADABRABRACA",
            "ADABRACABRA",
            "ADACABRABRA",
        ];
        let mut expected: Vec<String> = listed
            .iter()
            .map(|w| word(w, "ABCDR").canonical_rotation().to_string())
            .collect();
        expected.sort();

        let class = enumerate_class(&word("ABRACADABRA", "ABCDR"), 1).unwrap();
        assert_eq!(class.count(), 12);
        let got: Vec<String> = class.members.iter().map(|m| m.to_string()).collect();
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(got, sorted, "members are in lexicographic order");
        assert_eq!(got, expected);
    });
}

#[test]
fn criterion_03_ell16_table() {
    run_criterion(3, "ell=16 table", 5.0, || {
        // frozen W_1(x00, x*) values for ell = 16, zeros omitted
        let frozen: [&[u64]; 9] = [
            &[1], // x* = 0 also has a 1 at x00 = 16, handled below
            &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            &[7, 12, 17, 20, 23, 24, 25, 24, 23, 20, 17, 12, 7],
            &[22, 55, 90, 120, 140, 147, 140, 120, 90, 55, 22],
            &[43, 120, 212, 280, 309, 280, 212, 120, 43],
            &[42, 126, 210, 245, 210, 126, 42],
            &[22, 56, 75, 56, 22],
            &[4, 7, 4],
            &[1],
        ];
        let mut expected: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for (xstar, row) in frozen.iter().enumerate() {
            for (x00, &w) in row.iter().enumerate() {
                expected.insert((xstar as u64, x00 as u64), w);
            }
        }
        expected.insert((0, 16), 1);

        let csv = dbent_stdout(&["table", "--ell", "16"]);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 18);
        let mut got: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for line in lines {
            let mut fields = line.split(',');
            let xstar: u64 = fields.next().unwrap().parse().unwrap();
            for (x00, field) in fields.enumerate() {
                if !field.is_empty() {
                    got.insert((xstar, x00 as u64), field.parse().unwrap());
                }
            }
        }
        assert_eq!(got, expected, "every nonempty cell matches");

        // spot anchors
        for ((xstar, x00), w) in [
            ((2, 0), 7),
            ((2, 1), 12),
            ((3, 5), 147),
            ((4, 4), 309),
            ((2, 6), 25),
        ] {
            assert_eq!(got[&(xstar, x00)], w);
        }
        let total: u64 = got.values().sum();
        assert_eq!(total, 4116);
        assert_eq!(total, burnside_necklaces(2, 16).unwrap());
    });
}

#[test]
fn criterion_04_oracle_equivalence() {
    run_criterion(4, "oracle equivalence", 600.0, || {
        // every binary cyclic word with ell <= 12, k in {1, 2}: the formula
        // count equals the enumeration count exactly
        let a2 = alphabet("01");
        for ell in 2..=12usize {
            for k in 1..=2usize {
                if k >= ell {
                    continue;
                }
                let mut class_sizes: BTreeMap<ClassKey, (CyclicWord, u64)> = BTreeMap::new();
                for bits in 0..(1u64 << ell) {
                    let indices: Vec<u32> = (0..ell).map(|j| ((bits >> j) & 1) as u32).collect();
                    let w = CyclicWord::from_indices(indices, &a2).unwrap();
                    if w.canonical_rotation().indices() != w.indices() {
                        continue;
                    }
                    let q = Quiver::from_word(&w, k).unwrap();
                    class_sizes.entry(q.entries().collect()).or_insert((w, 0)).1 += 1;
                }
                for (rep, size) in class_sizes.into_values() {
                    assert_eq!(
                        word_entropy(&rep, k).unwrap().count(),
                        Some(size),
                        "ell {ell} k {k} word {rep}"
                    );
                }
            }
        }

        // fixture set of Eulerian quivers with <= 12 edges: BEST equals
        // backtracking
        let tol = Tolerances::default();
        let mut fixtures: Vec<Quiver> = vec![
            Quiver::from_word(&word("ABRACADABRA", "ABCDR"), 1).unwrap(),
            Quiver::from_word(&word("BARBARA", "ABR"), 1).unwrap(),
            Quiver::from_word(&word("ATAGTC", "ACGT"), 1).unwrap(),
            Quiver::from_word(&word("ATAGTC", "ACGT"), 2).unwrap(),
        ];
        for loops in 1..=6u64 {
            fixtures.push(Quiver::from_dense_matrix(0, 1, &[vec![loops]]).unwrap());
        }
        // all connected binary 2x2 Eulerian quivers with <= 12 edges
        for total in 2..=12u64 {
            for xstar in 1..=total / 2 {
                for x00 in 0..=total - 2 * xstar {
                    let x11 = total - x00 - 2 * xstar;
                    fixtures.push(
                        Quiver::from_dense_matrix(1, 2, &[vec![x00, xstar], vec![xstar, x11]])
                            .unwrap(),
                    );
                }
            }
        }
        // random small words over larger alphabets
        let mut rng = ChaCha8Rng::seed_from_u64(0x04ac);
        let a3 = alphabet("012");
        let a4 = alphabet("0123");
        while fixtures.len() < 220 {
            let (n, ab) = if rng.gen_bool(0.5) {
                (3, &a3)
            } else {
                (4, &a4)
            };
            let ell = rng.gen_range(3..=12usize);
            let indices: Vec<u32> = (0..ell).map(|_| rng.gen_range(0..n as u32)).collect();
            let w = CyclicWord::from_indices(indices, ab).unwrap();
            let k = rng.gen_range(1..=2usize.min(ell - 1));
            fixtures.push(Quiver::from_word(&w, k).unwrap());
        }
        let mut checked = 0usize;
        for q in &fixtures {
            let exact = match count_euler_circuits(q) {
                Ok(c) => c,
                Err(_) => continue, // disconnected fixture
            };
            let report = eulerian_entropy(q).unwrap();
            assert_eq!(report.euler_circuit_count(&tol), Some(exact));
            checked += 1;
        }
        assert!(checked >= 150, "only {checked} connected fixtures");
    });
}

#[test]
fn criterion_05_relative_entropy_vs_edit_distance() {
    run_criterion(5, "relative entropy vs edit distance", 30.0, || {
        let u = word("ABRACADABRA", "ABCDR");
        let v = word("ABARACARBAD", "ABCDR");
        let h = relative_entropy(&u, &v, 1).unwrap();
        assert_eq!(h.count(), Some(1));
        assert!(h.nats.abs() <= 1e-9, "H = {}", h.nats);
        assert_eq!(levenshtein("ABRACADABRA", "ABARACARBAD"), 5);

        let qu = Quiver::from_word(&u, 1).unwrap();
        let qv = Quiver::from_word(&v, 1).unwrap();
        let expected = Quiver::from_word(&word("ABRABRABRA", "ABCDR"), 1).unwrap();
        assert_eq!(boxminus(&qu, &qv).unwrap(), expected);
    });
}

#[test]
fn criterion_06_example4_separation() {
    run_criterion(
        6,
        "bounded relative entropy vs linear edit distance",
        60.0,
        || {
            let a = alphabet("01");
            let m = 2usize;
            let mut entropies = Vec::new();
            for ell in [8usize, 16, 32, 64] {
                let w_text = format!("{}{}", "0".repeat(m * ell), "1".repeat(m * ell));
                let wp_text = format!("{}{}", "0".repeat(ell), "1".repeat(ell)).repeat(m);
                let w = CyclicWord::from_text(&w_text, &a).unwrap();
                let wp = CyclicWord::from_text(&wp_text, &a).unwrap();
                entropies.push(relative_entropy(&w, &wp, 2).unwrap().nats);
                assert_eq!(
                    levenshtein(&w_text, &wp_text),
                    2 * (m / 2) * ell,
                    "edit distance at ell {ell}"
                );
            }
            let spread = entropies.iter().cloned().fold(f64::MIN, f64::max)
                - entropies.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < 2.0, "entropies: {entropies:?}");
        },
    );
}

#[test]
fn criterion_07_invariant_suites() {
    run_criterion(7, "randomized invariant suites", 600.0, || {
        let mut cases = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(0x1007);
        let alphabets: Vec<Arc<Alphabet>> =
            ["01", "012", "0123"].iter().map(|s| alphabet(s)).collect();
        let random_word = |rng: &mut ChaCha8Rng, max_len: usize| {
            let ab = &alphabets[rng.gen_range(0..alphabets.len())];
            let ell = rng.gen_range(3..=max_len);
            let indices: Vec<u32> = (0..ell)
                .map(|_| rng.gen_range(0..ab.size() as u32))
                .collect();
            CyclicWord::from_indices(indices, ab).unwrap()
        };

        // symmetry: exact equality under operand swap
        for _ in 0..250 {
            let u = random_word(&mut rng, 64);
            let mut v = random_word(&mut rng, 64);
            while v.alphabet() != u.alphabet() {
                v = random_word(&mut rng, 64);
            }
            let k = rng.gen_range(1..=3usize.min(u.len().min(v.len()) - 1));
            let ab = relative_entropy(&u, &v, k).unwrap().nats;
            let ba = relative_entropy(&v, &u, k).unwrap().nats;
            assert_eq!(ab.to_bits(), ba.to_bits(), "{u} / {v} k {k}");
            cases += 1;
        }

        // transpose invariance
        for _ in 0..200 {
            let u = random_word(&mut rng, 96);
            let k = rng.gen_range(1..=3usize.min(u.len() - 1));
            let q = Quiver::from_word(&u, k).unwrap();
            let h = componentwise_entropy(&q).unwrap().nats;
            let ht = componentwise_entropy(&q.transpose()).unwrap().nats;
            assert!((h - ht).abs() <= 1e-9, "{u} k {k}: {h} vs {ht}");
            cases += 1;
        }

        // monotonicity in k
        for _ in 0..150 {
            let u = random_word(&mut rng, 256);
            let mut previous = f64::INFINITY;
            for k in 1..=5usize.min(u.len() - 1) {
                let h = word_entropy(&u, k).unwrap().nats;
                assert!(h <= previous + 1e-9, "{u} k {k}");
                previous = h;
                cases += 1;
            }
        }

        // dominant-term lower bound
        let mut bound_checked = 0usize;
        while bound_checked < 150 {
            let u = random_word(&mut rng, 128);
            let q = Quiver::from_word(&u, 1).unwrap();
            if let Ok(report) = eulerian_entropy(&q) {
                assert!(report.log_w >= report.divisor_terms[0].log_term - 1e-9);
                bound_checked += 1;
                cases += 1;
            }
        }

        // closed form vs engine over the full domain up to ell = 64
        for ell in 2..=64u64 {
            for xstar in 1..=ell / 2 {
                for x00 in 0..=ell - 2 * xstar {
                    let x11 = ell - x00 - 2 * xstar;
                    let closed = binary_w1_closed_form(x00, xstar, ell).unwrap();
                    let q = Quiver::from_dense_matrix(1, 2, &[vec![x00, xstar], vec![xstar, x11]])
                        .unwrap();
                    let engine = componentwise_entropy(&q).unwrap().nats;
                    assert!(
                        (closed - engine).abs() <= 1e-9 * closed.abs().max(1.0),
                        "cell ({x00},{xstar}) ell {ell}"
                    );
                    cases += 1;
                }
            }
        }

        assert!(cases >= 1000, "only {cases} randomized cases ran");
        println!("  ({cases} invariant cases, zero failures)");
    });
}

#[test]
fn criterion_08_spin_module() {
    run_criterion(8, "spin partition functions", 120.0, || {
        // beta = 0: every configuration weighs 1
        for ell in [12u64, 256] {
            let p =
                SpinParams::new(0.7, -0.3, 0.0, ell, CouplingConvention::Eq12Consistent).unwrap();
            let log_z = partition_function(&p);
            assert!(
                (log_z - ell as f64 * 2.0f64.ln()).abs() <= 1e-9,
                "ell {ell}: {log_z}"
            );
        }

        // exhaustive agreement for ell <= 12 under both conventions
        let a = alphabet("01");
        for convention in [
            CouplingConvention::Eq12Consistent,
            CouplingConvention::TextPotential,
        ] {
            for ell in [8usize, 11, 12] {
                let p = SpinParams::new(0.45, 0.17, 0.9, ell as u64, convention).unwrap();
                let mut z = 0.0f64;
                for bits in 0..(1u64 << ell) {
                    let indices: Vec<u32> = (0..ell).map(|j| ((bits >> j) & 1) as u32).collect();
                    let w = CyclicWord::from_indices(indices, &a).unwrap();
                    z += (-p.beta * debruijn_entropy::spin::word_energy(&w, &p).unwrap()).exp();
                }
                let log_z = partition_function(&p);
                assert!(
                    (log_z - z.ln()).abs() <= 1e-9,
                    "{convention:?} ell {ell}: {log_z} vs {}",
                    z.ln()
                );
            }
        }

        // ell = 256 per-site value within 1% of the thermodynamic limit
        let p = SpinParams::new(0.5, 0.2, 1.0, 256, CouplingConvention::Eq12Consistent).unwrap();
        let per_site = (partition_function(&p) / 256.0).exp();
        let limit = thermodynamic_limit(&p);
        assert!(
            (per_site - limit).abs() / limit < 0.01,
            "{per_site} vs {limit}"
        );
    });
}

#[test]
fn criterion_09_synthetic_phylogeny() {
    run_criterion(9, "synthetic clade recovery", 120.0, || {
        let a = alphabet("ACGTN");
        let bases = ['A', 'C', 'G', 'T'];
        let mut rng = ChaCha8Rng::seed_from_u64(0x9109);
        let ell = 800usize;
        let mutation_rates = [0.02, 0.05, 0.10, 0.05];

        let mut words = Vec::new();
        for _ancestor in 0..3 {
            let ancestor: Vec<char> = (0..ell).map(|_| bases[rng.gen_range(0..4)]).collect();
            for &rate in &mutation_rates {
                let mutant: String = ancestor
                    .iter()
                    .map(|&c| {
                        if rng.gen_bool(rate) {
                            // substitute with a different base
                            loop {
                                let b = bases[rng.gen_range(0..4)];
                                if b != c {
                                    break b;
                                }
                            }
                        } else {
                            c
                        }
                    })
                    .collect();
                words.push(CyclicWord::from_text(&mutant, &a).unwrap());
            }
        }

        let d = distance_matrix(&words, 3, true).unwrap();
        let tree = linkage(&d, LinkageMethod::Average).unwrap();
        let clades: Vec<Vec<usize>> = (0..tree.merges().len())
            .map(|m| tree.leaf_members(tree.leaves() + m))
            .collect();
        for planted in 0..3 {
            let expected: Vec<usize> = (4 * planted..4 * planted + 4).collect();
            assert!(
                clades.contains(&expected),
                "planted clade {expected:?} not recovered; clades: {clades:?}"
            );
        }
    });
}

#[test]
fn criterion_10_example5_grid() {
    run_criterion(10, "relative-entropy grid", 300.0, || {
        let csv = dbent_stdout(&["relgrid", "--ell", "256", "--x00", "32", "--xstar", "80"]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "x00p,xstarp,h1_nats,boxminus_entry_sum,exceeds_ell"
        );
        let mut rows = 0usize;
        let mut flagged = 0usize;
        let mut over_length = 0usize;
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            let xstarp: i64 = fields[1].parse().unwrap();
            let h: f64 = fields[2].parse().unwrap();
            let entry_sum: u64 = fields[3].parse().unwrap();
            let exceeds: u8 = fields[4].parse().unwrap();
            let in_strip = (xstarp - 80).abs() <= 1;
            if in_strip {
                assert_eq!(h, 0.0, "strip cell {line} must be exactly zero");
            } else {
                assert!(h > 1e-9, "off-strip cell {line} must be positive");
            }
            assert_eq!(exceeds == 1, entry_sum > 256, "{line}");
            flagged += usize::from(exceeds == 1);
            // the relative entropy can exceed the word length, and only in
            // cells with a flagged entry-sum disparity
            if h / std::f64::consts::LN_2 > 256.0 {
                over_length += 1;
                assert_eq!(exceeds, 1, "{line} exceeds ell without the flag");
            }
            rows += 1;
        }
        // full triangular domain: sum over xstar of (ell - 2 xstar + 1)
        let expected_rows: u64 = (1..=128u64).map(|x| 256 - 2 * x + 1).sum();
        assert_eq!(rows as u64, expected_rows);
        assert!(flagged > 0, "the exceedance region must be nonempty");
        assert!(over_length > 0, "no cell exceeded the word length");
    });
}
