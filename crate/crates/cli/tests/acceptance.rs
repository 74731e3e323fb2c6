//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use isingkw::combmap::generate::{figure_eight, planar_grid, random_corpus, random_planar};
use isingkw::combmap::{homology_basis, CombMap};
use isingkw::exactalg::{
    det_field, det_symbolic, pfaffian_field, pfaffian_symbolic, GPoly, GaussRat, SkewMat, VarId,
};
use isingkw::fisher::{blowup, z_dimer_partials};
use isingkw::ising::{z_ising, z_ising_partials};
use isingkw::kacward::{det_c64, kw_matrix_planar_geometric, planar_exact_det, KacWard};
use isingkw::kasteleyn::{cluster_block, kasteleyn_matrix, spin_classes, z_dimer_pfaffian, QuadForm2};
use isingkw::zeta::verify_bass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn x(v: VarId) -> GPoly {
    GPoly::var(v)
}

fn c(k: i64) -> GPoly {
    GPoly::from_int(k)
}

fn corpus() -> Vec<CombMap> {
    random_corpus(&mut ChaCha8Rng::seed_from_u64(2024), &[16, 16, 12, 8], 8)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let g = figure_eight(false);
    let kw = KacWard::new(&g).map_err(|e| e.to_string())?;
    let det = det_symbolic(&kw.kw_matrix(0).map_err(|e| e.to_string())?.mat).map_err(|e| e.to_string())?;
    let expect = &(&c(1) + &x(0)).pow(2) * &(&c(1) + &x(1)).pow(2);
    ensure(det == expect, || format!("det(I - T) = {det}"))?;
    let z = kw.z_symbolic().map_err(|e| e.to_string())?;
    let z_expect = &(&c(1) + &x(0)) * &(&c(1) + &x(1));
    ensure(z == z_expect, || format!("Z = {z}"))?;
    let el = t.elapsed();
    ensure(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("det = (1+x1)^2(1+x2)^2, Z = 1+x1+x2+x1x2 in {:.1} ms", el.as_secs_f64() * 1e3))
}

fn criterion_2() -> Outcome {
    let g = figure_eight(true);
    let kw = KacWard::new(&g).map_err(|e| e.to_string())?;
    let loops: Vec<Vec<usize>> = kw.basis.basis.iter().map(|b| b.edges().collect()).collect();
    ensure(loops == vec![vec![0], vec![1]], || format!("basis is not the two loops: {loops:?}"))?;
    for (i, cl) in kw.classes.iter().enumerate() {
        let eps: Vec<i64> = cl.form.values.iter().map(|&q| if q { 1 } else { -1 }).collect();
        let root = &(&(&c(1) - &x(0).scale_int(eps[0])) - &x(1).scale_int(eps[1])) - &(&x(0) * &x(1)).scale_int(eps[0] * eps[1]);
        let det = det_symbolic(&kw.kw_matrix(i).map_err(|e| e.to_string())?.mat).map_err(|e| e.to_string())?;
        ensure(det == root.pow(2), || format!("class {i} with eps {eps:?}: det = {det}"))?;
        ensure(cl.arf == (eps == [1, 1]), || format!("class {i} with eps {eps:?} has Arf {}", cl.arf as u8))?;
    }
    ensure(kw.classes.iter().filter(|c| c.arf).count() == 1, || "not exactly one odd class".into())?;
    let z = kw.z_symbolic().map_err(|e| e.to_string())?;
    ensure(z == &(&c(1) + &x(0)) * &(&c(1) + &x(1)), || format!("alternating sum {z}"))?;
    Ok("4 class determinants match the eps dictionary, Arf = 1 only at eps = (1,1), sum = Z".into())
}

fn criterion_3(maps: &[CombMap]) -> Outcome {
    let t = Instant::now();
    for (k, g) in maps.iter().enumerate() {
        let zb = z_ising(g).map_err(|e| format!("map {k}: {e}"))?;
        let zk = KacWard::new(g).and_then(|kw| kw.z_symbolic()).map_err(|e| format!("map {k}: {e}"))?;
        let zp = homology_basis(g)
            .and_then(|hb| z_dimer_pfaffian(&blowup(g), g, &hb))
            .map_err(|e| format!("map {k}: {e}"))?;
        ensure(zb == zk && zk == zp, || format!("map {k} (genus {}): methods differ", g.genus()))?;
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(60), || format!("corpus took {el:?}"))?;
    Ok(format!("{} maps, genus 0-3, three methods equal, {:.2} s", maps.len(), el.as_secs_f64()))
}

fn criterion_4(maps: &[CombMap]) -> Outcome {
    let mut n = 0;
    for (k, g) in maps.iter().enumerate() {
        let kw = KacWard::new(g).map_err(|e| e.to_string())?;
        for i in 0..kw.classes.len() {
            let det = det_symbolic(&kw.kw_matrix(i).map_err(|e| e.to_string())?.mat).map_err(|e| e.to_string())?;
            let root = kw.det_sqrt(i).map_err(|e| format!("map {k} class {i}: {e}"))?;
            ensure(&root * &root == det, || format!("map {k} class {i}: nonzero residual"))?;
            n += 1;
        }
    }
    Ok(format!("{n} class determinants are exact squares"))
}

fn criterion_5(maps: &[CombMap]) -> Outcome {
    let mut n_classes = 0;
    for (k, g) in maps.iter().enumerate() {
        let err = |e: isingkw::Error| format!("map {k}: {e}");
        let hb = homology_basis(g).map_err(err)?;
        let f = blowup(g);
        let zi = z_ising_partials(g, &hb).map_err(err)?;
        let zd = z_dimer_partials(&f, g, &hb).map_err(err)?;
        ensure(zi == zd, || format!("map {k}: Z^I_alpha != Z^D_alpha"))?;
        let lifted = f.lifted_basis(g, &hb).map_err(err)?;
        let classes = spin_classes(&f, &lifted, hb.cocycles()).map_err(err)?;
        let gen = g.genus();
        ensure(classes.len() == 1 << (2 * gen), || format!("map {k}: {} classes", classes.len()))?;
        for (i, cl) in classes.iter().enumerate() {
            let pf = pfaffian_symbolic(&kasteleyn_matrix(&f.gamma, &cl.orientation), 1 << 22).map_err(err)?;
            let mut rhs = GPoly::zero();
            for (mask, p) in zd.iter().enumerate() {
                if cl.form.eval_mask(mask) {
                    rhs.sub_assign_ref(p);
                } else {
                    rhs.add_assign_ref(p);
                }
            }
            ensure(pf.scale_int(cl.eps_m0 as i64) == rhs, || format!("map {k} class {i}: linear relation fails"))?;
            ensure(refinement_holds(&cl.form), || format!("map {k} class {i}: not a refinement"))?;
        }
        for i in 0..classes.len() {
            for j in 0..i {
                ensure(classes[i].form != classes[j].form, || format!("map {k}: classes {i} and {j} share a form"))?;
            }
        }
        let even = classes.iter().filter(|c| !c.arf).count();
        let expect = if gen == 0 { 1 } else { (1 << (gen - 1)) * ((1 << gen) + 1) };
        ensure(even == expect, || format!("map {k}: {even} even forms, expected {expect}"))?;
        n_classes += classes.len();
    }
    Ok(format!("{n_classes} classes: partials, linear relation, refinement, distinctness, even count"))
}

fn refinement_holds(q: &QuadForm2) -> bool {
    let r = q.rank();
    (0..1usize << r).all(|a| {
        (0..1usize << r).all(|b| {
            let dot = (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).fold(false, |acc, (i, j)| {
                acc ^ (a >> i & 1 == 1 && b >> j & 1 == 1 && q.intersection[i][j])
            });
            q.eval_mask(a ^ b) ^ q.eval_mask(a) ^ q.eval_mask(b) == dot
        })
    })
}

fn criterion_6(maps: &[CombMap]) -> Outcome {
    let mut n = 0;
    for (k, g) in maps.iter().enumerate() {
        let kw = KacWard::new(g).map_err(|e| e.to_string())?;
        for (i, cl) in kw.classes.iter().enumerate() {
            ensure(cl.eps_m0 == 1, || format!("map {k} class {i}: eps(M0) = {}", cl.eps_m0))?;
            let pf = pfaffian_symbolic(&kw.kasteleyn_matrix(i), 1 << 22).map_err(|e| e.to_string())?;
            let root = kw.det_sqrt(i).map_err(|e| e.to_string())?;
            ensure(pf == root, || format!("map {k} class {i}: eps Pf != det^(1/2)"))?;
            n += 1;
        }
    }
    for d in 2..=8 {
        let pf = pfaffian_symbolic(&cluster_block(d), 1 << 22).map_err(|e| e.to_string())?;
        ensure(pf == GPoly::one(), || format!("cluster of degree {d} has Pf {pf}"))?;
    }
    Ok(format!("{n} classes with eps(M0) = +1 and eps Pf = det^(1/2); cluster Pf = +1 for degrees 2..8"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut graphs = vec![planar_grid(3, 3)];
    while graphs.len() < 6 {
        let nv = rng.gen_range(5..=8);
        let g = random_planar(&mut rng, nv, 12);
        if g.cycle_rank() > 0 {
            graphs.push(g);
        }
    }
    let mut worst = 0.0f64;
    for (k, g) in graphs.iter().enumerate() {
        let exact: Vec<GaussRat> = (0..g.n_edges()).map(|_| GaussRat::from_frac(rng.gen_range(100..=900), 1000)).collect();
        let numeric: Vec<f64> = exact.iter().map(|w| w.to_c64().re).collect();
        let geo = det_c64(kw_matrix_planar_geometric(g, &numeric).map_err(|e| e.to_string())?);
        let ex = planar_exact_det(g, &exact).map_err(|e| e.to_string())?.to_c64();
        let rel = (geo - ex).norm() / ex.norm();
        ensure(rel <= 1e-9, || format!("graph {k}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("3x3 grid + 5 random planar graphs, worst relative error {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let g = figure_eight(true);
    let kw = KacWard::new(&g).map_err(|e| e.to_string())?;
    for i in 0..4 {
        let r = verify_bass(&g, &kw.kw_matrix(i).map_err(|e| e.to_string())?, 8).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("class {i}: {}", r.first_mismatch.clone().unwrap_or_default()))?;
    }
    Ok("torus figure-eight, 4 classes, identity holds modulo degree > 8".into())
}

fn bench_json(n: usize) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_isingkw"))
        .args(["--json", "bench", "--torus", &n.to_string(), "--weight", "0.3"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("bench --torus {n} exited with {:?}", out.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok(v["bench"].clone())
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let b16 = bench_json(16)?;
    let wall = t.elapsed().as_secs_f64();
    let pf = b16["pfaffian_seconds"].as_f64().unwrap_or(f64::INFINITY);
    ensure(b16["fisher_vertices"] == 2048, || format!("Fisher graph has {} vertices", b16["fisher_vertices"]))?;
    ensure(wall <= 5.0, || format!("bench --torus 16 took {wall:.2} s"))?;
    let b4 = bench_json(4)?;
    let rel = b4["relative_error"].as_f64().unwrap_or(f64::INFINITY);
    ensure(rel <= 1e-12, || format!("N = 4 relative error {rel:e}"))?;
    Ok(format!("torus 16: {pf:.3} s for the Pfaffians, {wall:.2} s wall; torus 4 vs brute force {rel:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..100 {
        let n = rng.gen_range(1..=12);
        let mut a = SkewMat::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.3) {
                    let v = GaussRat::from_ints(rng.gen_range(-5..=5), if rng.gen_bool(0.2) { rng.gen_range(-2..=2) } else { 0 });
                    a.set(i, j, GPoly::constant(v));
                }
            }
        }
        let dense = a.eval(&|_| GaussRat::from_int(0));
        let pf_elim = pfaffian_field(dense.clone());
        let det = det_field(dense);
        ensure(&pf_elim * &pf_elim == det, || format!("matrix {t} (size {n}): Pf^2 != det"))?;
        if n % 2 == 0 {
            let pf_exp = pfaffian_symbolic(&a, 1 << 22).map_err(|e| e.to_string())?;
            ensure(pf_exp == GPoly::constant(pf_elim.clone()), || format!("matrix {t}: expansion and elimination differ"))?;
        }
    }
    Ok("100 random sparse skew matrices, sizes 1..12, Pf^2 = det exactly".into())
}

fn main() {
    let maps = corpus();
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3(&maps)),
        (4, criterion_4(&maps)),
        (5, criterion_5(&maps)),
        (6, criterion_6(&maps)),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
    ];
    let mut failed = 0;
    for (k, r) in &results {
        match r {
            Ok(msg) => println!("criterion {k:>2}: PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {msg}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
