//! Acceptance criteria 1 to 11, one line each. Runs without the libtest
//! harness so the lines always reach stdout.

use alcove_sheaves::hecke::{Flavor, Hecke};
use alcove_sheaves::hom::{degree_dim, dominant_indecomposable, finiteness_bounds, hom_grk_formula, hom_space, stability_scan, Verdict};
use alcove_sheaves::pullback::restriction_experiment;
use alcove_sheaves::sheaf::{ambient_for, bm_build, RingMode};
use alcove_sheaves::translation::{ch, ch_times_bs, star, support_window, theta_rank_laws, theta_s, translate_sheaf, working_windows};
use alcove_sheaves::{Affine, Alcove, Laurent, MomentGraph, RootDatum, Sheaf, Vector, MAXR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn rd(label: &str) -> Arc<RootDatum> {
    Arc::new(RootDatum::from_label(label).unwrap())
}

fn vector(xs: &[i64]) -> Vector {
    let mut v = [0; MAXR];
    v[..xs.len()].copy_from_slice(xs);
    v
}

fn scaled(rd: &RootDatum, v: &Vector, k: i64) -> Vector {
    let mut out = [0; MAXR];
    for i in 0..rd.rank() {
        out[i] = k * v[i];
    }
    out
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(what()) }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn axioms_and_gkm(f: &Sheaf, what: &str) -> Result<(), String> {
    let r = f.verify_axioms().map_err(e)?;
    check(r.all_ok(), || format!("{what}: {r}"))?;
    check(f.graph().check_gkm().is_empty(), || format!("{what}: GKM fails"))
}

fn alcove_graph(rd: &Arc<RootDatum>, coords: &[Affine]) -> Arc<MomentGraph> {
    let alc: Vec<Alcove> = coords.iter().map(|c| rd.alcove(c)).collect();
    Arc::new(MomentGraph::alcove_window(rd.clone(), &alc).unwrap())
}

/// `grk B(x)^y = v^{ℓ(y)−ℓ(x)} h_{y,x}` for every `x` up to `max_len`.
fn bm_equals_kl(label: &str, max_len: i64) -> Outcome {
    let rd = rd(label);
    let mut hk = Hecke::with_budget(rd.clone(), max_len);
    let mut pairs = 0;
    let xs = rd.waff_up_to(max_len);
    for x in &xs {
        let g = Arc::new(MomentGraph::bruhat_interval(rd.clone(), x, max_len).map_err(e)?);
        let amb = ambient_for(&g, RingMode::Labels).map_err(e)?;
        let top = g.vertex(x).map_err(e)?;
        let b = bm_build(g.clone(), amb, top).map_err(e)?;
        let h = hk.kl(x).map_err(e)?;
        for y in 0..g.len() {
            let want = h.coeff(&g.coord(y)).shift((g.length(y) - g.length(top)) as i32);
            check(b.stalk_grk(y) == want, || format!("x={} y={}: {} vs {}", rd.word_string(x), g.vertex_name(y), b.stalk_grk(y), want))?;
            pairs += 1;
        }
        axioms_and_gkm(&b, &rd.word_string(x))?;
    }
    Ok(format!("{} elements, {} (y,x) pairs", xs.len(), pairs))
}

/// Random `B(x)` on the `s`-closure of a window around the base alcove.
struct ThetaCase {
    f: Sheaf,
    t: Sheaf,
    s: usize,
}

fn theta_cases(seed: u64, count: usize) -> Vec<ThetaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let rd = rd(if i % 2 == 0 { "A1" } else { "A2" });
            let a0 = rd.fundamental_alcove();
            let rho = rd.rho_check();
            let lo = rd.translate(a0, &scaled(&rd, &rho, -1));
            let hi = rd.translate(a0, &rho);
            let target: Vec<Affine> = rd.interval(lo, hi).iter().map(|a| a.coord()).collect();
            let s = rng.gen_range(0..rd.nwalls());
            let win = working_windows(&alcove_graph(&rd, &target), &target, &[s]).unwrap().remove(0);
            let g = alcove_graph(&rd, &win);
            let x = rng.gen_range(0..g.len());
            let f = bm_build(g.clone(), ambient_for(&g, RingMode::Labels).unwrap(), x).unwrap();
            let t = theta_s(&f, s).unwrap();
            ThetaCase { f, t, s }
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut vertices = 0;
    let cases = theta_cases(3, 24);
    for c in &cases {
        let rep = theta_rank_laws(&c.f, &c.t, c.s).map_err(e)?;
        check(rep.failures.is_empty(), || rep.failures.join("; "))?;
        axioms_and_gkm(&c.t, "theta_s")?;
        vertices += rep.checked;
    }
    Ok(format!("{} (F,s) pairs, {} (F,s,A) instances", cases.len(), vertices))
}

fn criterion_4() -> Outcome {
    let cases = theta_cases(4, 12);
    for c in &cases {
        let hk = Hecke::new(c.f.graph().root_datum().clone());
        let lhs = ch(&c.t).map_err(e)?;
        let rhs = ch_times_bs(&hk, &ch(&c.f).map_err(e)?, c.s).map_err(e)?;
        check(lhs == rhs, || format!("s{}: {} vs {}", c.s, hk.format_periodic(&lhs), hk.format_periodic(&rhs)))?;
    }
    Ok(format!("{} (F,s) pairs", cases.len()))
}

fn criterion_5() -> Outcome {
    let mut detail = Vec::new();
    for (label, top) in [("A1", vec![0, 1, 0]), ("A2", vec![0, 1, 2])] {
        let rd = rd(label);
        let top = rd.from_word(&top).unwrap();
        let g = Arc::new(MomentGraph::bruhat_interval(rd.clone(), &top, 10).map_err(e)?);
        let amb = ambient_for(&g, RingMode::Labels).map_err(e)?;
        let sheaves: Vec<Sheaf> = (0..g.len()).map(|x| bm_build(g.clone(), amb.clone(), x).unwrap()).collect();
        let mut pairs = 0;
        for (i, f) in sheaves.iter().enumerate() {
            for h in sheaves.iter().skip(i % 3).step_by(3) {
                let grk = hom_grk_formula(f, h).map_err(e)?;
                let dim = hom_space(f, h, 0).map_err(e)?.dimension;
                check(dim == degree_dim(f, &grk, 0), || format!("{label}: {} vs formula {grk}", dim))?;
                pairs += 1;
            }
        }
        check(pairs >= 5, || format!("{label}: only {pairs} pairs"))?;
        detail.push(format!("{label} {pairs} pairs"));
    }
    // End(B(s)) on [e, s] over the full ring
    let rd = rd("A1");
    let s = rd.from_word(&[1]).unwrap();
    let g = Arc::new(MomentGraph::bruhat_interval(rd, &s, 10).map_err(e)?);
    let b = bm_build(g.clone(), ambient_for(&g, RingMode::Full).map_err(e)?, g.vertex(&s).map_err(e)?).map_err(e)?;
    let grk = hom_grk_formula(&b, &b).map_err(e)?;
    let d2 = hom_space(&b, &b, 2).map_err(e)?.dimension;
    check(d2 == 4 && degree_dim(&b, &grk, 2) == 4, || format!("dim Hom(B(s),B(s)) in degree 2 is {d2}"))?;
    detail.push(format!("Hom(B(s),B(s)): grk {grk}, degree-2 dimension {d2}"));
    Ok(detail.join(", "))
}

fn criterion_6() -> Outcome {
    let rd = rd("A1");
    let a0 = rd.fundamental_alcove();
    let scan = stability_scan(rd, a0, a0, a0, 6, RingMode::Labels).map_err(e)?;
    check(scan.rows.len() == 7, || "expected 7 rows".into())?;
    check(scan.rows.iter().all(|r| r.onto_previous != Some(false)), || scan.to_csv())?;
    let dims: Vec<usize> = scan.rows.iter().map(|r| r.dimension).collect();
    match scan.verdict {
        Verdict::Stabilized { from_step } if dims[from_step..].iter().all(|&d| d == dims[6]) => {
            Ok(format!("dimensions {dims:?}, stabilized from step {from_step}, restriction onto at every step"))
        }
        v => Err(format!("verdict {v:?}, dimensions {dims:?}")),
    }
}

fn criterion_7() -> Outcome {
    let rd = rd("A1");
    let mut hk = Hecke::with_budget(rd.clone(), 12);
    let a0 = rd.fundamental_alcove();
    let zero = [0; MAXR];
    let rho = rd.rho_check();
    let mut first = Vec::new();
    let mut a = a0;
    for n in 0..=5i32 {
        check(rd.alcove_string(a) == format!("({},{})", -n, -n + 1), || rd.alcove_string(a))?;
        let q = hk.generic_q(a, &zero);
        check(q == Laurent::v_pow(n), || format!("q at n={n} is {q}"))?;
        let target = q.shift((rd.length(a) - rd.length(a0)) as i32);
        // v^{ℓ(x_k)−ℓ(t_k)} m_{x_k,t_k} with A₀⁺x_k = A + kρ∨, t_k = t⁰_{kρ∨}
        let mut agree_from = None;
        for k in 1..=6 {
            let ak = rd.translate(a, &scaled(&rd, &rho, k));
            let t = rd.a_plus(&scaled(&rd, &rho, k)).coord();
            let ok = rd.is_dominant(ak) && {
                let x = ak.coord();
                let m = hk.parabolic_mn(&x, &t, Flavor::Spherical).map_err(e)?;
                m.shift((rd.coxeter_length(&x) - rd.coxeter_length(&t)) as i32) == target
            };
            match (ok, agree_from) {
                (true, None) => agree_from = Some(k),
                (false, Some(k0)) => return Err(format!("n={n}: agreement at k={k0} lost at k={k}")),
                _ => {}
            }
        }
        let k0 = agree_from.ok_or_else(|| format!("n={n}: no agreement up to k=6"))?;
        first.push(k0);
        a = rd.down(rd.positive_roots()[0], a);
    }
    Ok(format!("q = v^n for n = 0..5; m agrees from k = {first:?}"))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for label in ["A1", "A2"] {
        let rd = rd(label);
        let hk = Hecke::new(rd.clone());
        let cs: Vec<Vector> = (0..rd.rank()).map(|i| rd.simple_coroot(i)).collect();
        let range: Vec<i64> = (-4..=4).collect();
        let mut coeffs: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..rd.rank() {
            coeffs = coeffs.iter().flat_map(|c| range.iter().map(move |&x| [c.clone(), vec![x]].concat())).collect();
        }
        for c in &coeffs {
            let mut lam = [0; MAXR];
            for (i, ci) in c.iter().enumerate() {
                for j in 0..rd.rank() {
                    lam[j] += ci * cs[i][j];
                }
            }
            for w in rd.weyl().elements() {
                check(hk.kato_check(&lam, w).map_err(e)?, || format!("{label} λ={c:?} w={w}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (λ, w) pairs"))
}

fn random_alcove(rd: &RootDatum, rng: &mut ChaCha8Rng) -> Alcove {
    let w = rng.gen_range(0..rd.weyl().order()) as u8;
    let t: Vec<i64> = (0..rd.rank()).map(|_| rng.gen_range(-3..=3)).collect();
    let mut lam = [0; MAXR];
    for (i, ti) in t.iter().enumerate() {
        let c = rd.simple_coroot(i);
        for j in 0..rd.rank() {
            lam[j] += ti * c[j];
        }
    }
    rd.alcove(&Affine::new(w, lam))
}

fn random_dominant(rd: &RootDatum, rng: &mut ChaCha8Rng) -> Alcove {
    let a = random_alcove(rd, rng);
    rd.weyl().elements().map(|u| rd.left_act(&rd.finite(u), a)).find(|&b| rd.is_dominant(b)).unwrap()
}

fn criterion_9() -> Outcome {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = [0usize; 5];
    for label in ["A1", "A2"] {
        let rd = rd(label);
        let pos = rd.positive_roots().to_vec();
        // A + α∨ > A, and s_(α,n)A > A when <α,λ> + n < 0 on A
        for _ in 0..N / 2 {
            let a = random_alcove(&rd, &mut rng);
            let p = pos[rng.gen_range(0..pos.len())];
            check(rd.leq(a, rd.translate(a, &rd.root(p).coroot)) && rd.translate(a, &rd.root(p).coroot) != a, || format!("{label} A+α∨ at {}", rd.alcove_string(a)))?;
            let n = -rd.k_alpha(&a.coord(), p) - 1 - rng.gen_range(0..3);
            let b = rd.left_act(&rd.affine_reflection(p, n), a);
            check(b != a && rd.leq(a, b), || format!("{label} reflection at {}", rd.alcove_string(a)))?;
            counts[0] += 1;
        }
        // As > A < A' > A's, A' ≠ As, A and A' joined by an edge  ⇒  As < A's
        let mut tries = 0;
        let mut done = 0;
        while done < N / 2 {
            tries += 1;
            if tries > 200 * N {
                return Err(format!("{label}: too few instances of the edge lemma"));
            }
            let a = random_alcove(&rd, &mut rng);
            let s = rng.gen_range(0..rd.nwalls());
            let p = pos[rng.gen_range(0..pos.len())];
            let refl = rd.affine_reflection(p, rng.gen_range(-3..=3));
            let a2 = rd.alcove(&rd.mul(&a.coord(), &refl));
            let as_ = rd.right_act(a, s).unwrap();
            let a2s = rd.right_act(a2, s).unwrap();
            let lt = |x: Alcove, y: Alcove| x != y && rd.leq(x, y);
            if !(lt(a, as_) && lt(a, a2) && lt(a2s, a2) && a2 != as_) {
                continue;
            }
            check(lt(as_, a2s), || format!("{label} edge lemma at {} s{s}", rd.alcove_string(a)))?;
            done += 1;
        }
        counts[1] += done;
        // ℓ(A + λ) = ℓ(A) + 2<ρ,λ>
        for _ in 0..N / 2 {
            let a = random_alcove(&rd, &mut rng);
            let lam: Vector = vector(&(0..rd.rank()).map(|_| rng.gen_range(-4..=4)).collect::<Vec<_>>());
            check(rd.length(rd.translate(a, &lam)) == rd.length(a) + rd.pairing(&rd.two_rho(), &lam), || format!("{label} length at {}", rd.alcove_string(a)))?;
            counts[2] += 1;
        }
        // A dominant, x ∈ W_f  ⇒  xA ≤ A;  As > A  ⇒  As dominant
        for _ in 0..N / 2 {
            let a = random_dominant(&rd, &mut rng);
            let x = rng.gen_range(0..rd.weyl().order()) as u8;
            check(rd.leq(rd.left_act(&rd.finite(x), a), a), || format!("{label} orbit at {}", rd.alcove_string(a)))?;
            counts[3] += 1;
            let s = rng.gen_range(0..rd.nwalls());
            let as_ = rd.right_act(a, s).unwrap();
            if rd.length(as_) > rd.length(a) {
                check(rd.is_dominant(as_), || format!("{label} As at {}", rd.alcove_string(a)))?;
            }
            counts[4] += 1;
        }
    }
    // ⁰W_aff ≅ A⁺ as ordered sets, exhaustively up to length 6
    let mut pairs = 0;
    for label in ["A1", "A2"] {
        let rd = rd(label);
        let reps: Vec<Affine> = rd.waff_up_to(6).into_iter().filter(|x| rd.is_min_coset_rep(x)).collect();
        for x in &reps {
            check(rd.is_dominant(rd.alcove(x)), || format!("{label} {} not dominant", rd.word_string(x)))?;
            for y in &reps {
                check(rd.bruhat_leq(x, y) == rd.leq(rd.alcove(x), rd.alcove(y)), || format!("{label} {} vs {}", rd.word_string(x), rd.word_string(y)))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("random instances {counts:?}, {pairs} ordered pairs of dominant alcoves"))
}

fn criterion_10() -> Outcome {
    let mut checked = Vec::new();
    // star on a padded window, and translation
    let rd2 = rd("A2");
    let (lo, hi) = (rd2.fundamental_alcove(), rd2.translate(rd2.fundamental_alcove(), &rd2.rho_check()));
    let x = rd2.alcove(&rd2.from_word(&[0, 1]).unwrap());
    let word = [2, 0];
    let target: Vec<Affine> = support_window(&rd2, lo, hi, x, &word).map_err(e)?.iter().map(|a| a.coord()).collect();
    let wins = working_windows(&alcove_graph(&rd2, &target), &target, &word).map_err(e)?;
    let g = alcove_graph(&rd2, &wins[0]);
    let f = bm_build(g.clone(), ambient_for(&g, RingMode::Labels).map_err(e)?, g.find_alcove(x).unwrap()).map_err(e)?;
    axioms_and_gkm(&star(&f, &word, &target).map_err(e)?, "star")?;
    checked.push("star");
    for (label, lam) in [("A1", vec![1]), ("A2", vec![1, -1])] {
        let rd = rd(label);
        let a0 = rd.fundamental_alcove();
        let top = rd.translate(a0, &rd.rho_check());
        let g = Arc::new(MomentGraph::alcove_interval(rd.clone(), a0, top).map_err(e)?);
        let b = bm_build(g.clone(), ambient_for(&g, RingMode::Labels).map_err(e)?, g.len() - 1).map_err(e)?;
        axioms_and_gkm(&translate_sheaf(&b, &vector(&lam)).map_err(e)?, "translate")?;
    }
    checked.push("translate_sheaf");
    // finiteness bounds on B(A_λ⁺)
    let mut windows = Vec::new();
    for (label, lam, steps) in [("A1", vec![0], 7), ("A1", vec![1], 7), ("A2", vec![0, 0], 2)] {
        let rd = rd(label);
        let lam = vector(&lam);
        let f = dominant_indecomposable(rd, &lam, steps, RingMode::Labels).map_err(e)?;
        axioms_and_gkm(&f, "dominant indecomposable")?;
        let b = finiteness_bounds(&f, &lam).map_err(e)?;
        check(b.violations.is_empty(), || format!("{label}: {:?}", b.violations))?;
        check(f.graph().len() >= 8, || format!("{label}: window of {} alcoves", f.graph().len()))?;
        windows.push(f.graph().len());
    }
    Ok(format!("bm_build and theta_s under 1-3, {} pass; bounds hold on windows of {windows:?} alcoves", checked.join(", ")))
}

fn criterion_11() -> Outcome {
    let mut runs = Vec::new();
    for (label, ks) in [("A1", vec![1, 2, 3]), ("A2", vec![1, 2])] {
        let rd = rd(label);
        let a = rd.fundamental_alcove();
        let rho = rd.rho_check();
        let lower = rd.translate(a, &scaled(&rd, &rho, -1));
        for k in ks {
            let run = restriction_experiment(rd.clone(), a, lower, &scaled(&rd, &rho, k), RingMode::Labels).map_err(e)?;
            check(run.axioms_ok && run.contains_top, || format!("{run:?}"))?;
            runs.push(format!("{label} k={k} ({} vertices)", run.vertices));
        }
    }
    Ok(runs.join(", "))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "BM = KL, A1, length <= 8", || bm_equals_kl("A1", 8)),
        (2, "BM = KL, A2, length <= 5", || bm_equals_kl("A2", 5)),
        (3, "theta_s rank laws", criterion_3),
        (4, "character homomorphism", criterion_4),
        (5, "Hom formula", criterion_5),
        (6, "stability scan", criterion_6),
        (7, "generic KL", criterion_7),
        (8, "Kato identity", criterion_8),
        (9, "order and length lemmas", criterion_9),
        (10, "axioms and finiteness bounds", criterion_10),
        (11, "restriction experiment", criterion_11),
    ];
    let results: Vec<(u32, &str, Outcome, f64)> = std::thread::scope(|sc| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(n, name, f)| {
                sc.spawn(move || {
                    let t = Instant::now();
                    let out = std::panic::catch_unwind(f).unwrap_or_else(|p| {
                        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
                    });
                    (n, name, out, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (n, name, out, secs) in &results {
        match out {
            Ok(d) => println!("criterion {n:>2} PASS  {name} ({secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name} ({secs:.1}s): {d}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
