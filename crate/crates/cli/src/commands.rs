//! Command implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use isingkw::combmap::generate::torus_lattice;
use isingkw::combmap::{homology_basis, CombMap, HomologyBasis, Weight};
use isingkw::exactalg::{
    det_field, pfaffian_field, pfaffian_symbolic, GPoly, GaussRat, VarId, DEFAULT_MATCHING_CAP,
};
use isingkw::fisher::{blowup, check_bijection, z_dimer_partials};
use isingkw::ising::{z_ising, z_ising_f64, z_ising_partials, BRUTE_FORCE_CAP};
use isingkw::kacward::{det_c64, kw_matrix_planar_geometric, planar_exact_det, KacWard};
use isingkw::kasteleyn::{cluster_block, kasteleyn_matrix, spin_classes, z_dimer_pfaffian, z_dimer_pfaffian_eval};
use isingkw::zeta::verify_bass;
use isingkw::Error;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mapfile::{parse_map, MapFile, ParseError};
use crate::report::{BenchInfo, Check, ClassInfo, GraphInfo, Matrices, MethodResult, PathInfo, Report, Status, Value};
use crate::{Level, Method};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Invariant(_)) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn load(path: &Path) -> CliResult<MapFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_map(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn names(map: &CombMap) -> impl Fn(VarId) -> String + '_ {
    move |v| map.var_name(v)
}

fn graph_info(map: &CombMap) -> GraphInfo {
    GraphInfo {
        vertices: map.n_vertices(),
        edges: map.n_edges(),
        faces: map.faces().len(),
        genus: map.genus(),
        components: map.n_components(),
        variables: map.vars().names().to_vec(),
    }
}

fn basis_names(mf: &MapFile, hb: &HomologyBasis) -> Vec<Vec<String>> {
    hb.basis.iter().map(|c| c.edges().map(|e| mf.edge_names[e].clone()).collect()).collect()
}

/// Values for every variable: seeded draws from `{1/10, ..., 9/10}`,
/// overridden by explicit `name=value` assignments.
pub fn evaluation_point(map: &CombMap, seed: u64, assignments: Option<&str>) -> CliResult<Vec<GaussRat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point: Vec<GaussRat> =
        (0..map.vars().len()).map(|_| GaussRat::from_frac(rng.gen_range(1..=9), 10)).collect();
    if let Some(text) = assignments {
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("expected name=value in --eval, found `{item}`")))?;
            let var = map
                .vars()
                .lookup(k.trim())
                .ok_or_else(|| CliError::Input(format!("unknown variable `{}` in --eval", k.trim())))?;
            point[var as usize] = v
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("invalid value `{}` for `{}`", v.trim(), k.trim())))?;
        }
    }
    Ok(point)
}

fn point_report(map: &CombMap, point: &[GaussRat]) -> BTreeMap<String, String> {
    point.iter().enumerate().map(|(v, c)| (map.var_name(v as VarId), c.to_string())).collect()
}

fn timed<T>(report: &mut Report, on: bool, name: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    if on {
        report.timing(name, t.elapsed().as_secs_f64());
    }
    out
}

pub struct PartitionArgs<'a> {
    pub method: Method,
    pub symbolic: bool,
    pub eval: Option<&'a str>,
    pub seed: Option<u64>,
    pub timings: bool,
}

pub fn partition(path: &Path, args: &PartitionArgs<'_>) -> CliResult<Report> {
    let mf = load(path)?;
    let g = &mf.map;
    let mut report = Report::new("partition", Some(path.display().to_string()));
    report.graph = Some(graph_info(g));
    let evaluated = !args.symbolic && (args.eval.is_some() || args.seed.is_some());
    let point = if evaluated { Some(evaluation_point(g, args.seed.unwrap_or(0), args.eval)?) } else { None };
    if let Some(p) = &point {
        report.point = Some(point_report(g, p));
    }
    let at = |v: VarId| point.as_ref().expect("evaluated mode")[v as usize].clone();
    let methods: &[Method] = match args.method {
        Method::All => &[Method::Brute, Method::Kacward, Method::Pfaffian],
        ref m => std::slice::from_ref(m),
    };
    let nm = names(g);
    let t = args.timings;
    for m in methods {
        let value = match (m, evaluated) {
            (Method::Brute, false) => Value::poly(&timed(&mut report, t, "brute", || z_ising(g))?, &nm),
            (Method::Brute, true) => Value::scalar(&timed(&mut report, t, "brute", || z_ising(g))?.eval_with(at)),
            (Method::Kacward, false) => {
                Value::poly(&timed(&mut report, t, "kacward", || KacWard::new(g).and_then(|kw| kw.z_symbolic()))?, &nm)
            }
            (Method::Kacward, true) => {
                Value::scalar(&timed(&mut report, t, "kacward", || KacWard::new(g).map(|kw| kw.z_evaluated(&at)))?)
            }
            (Method::Pfaffian, false) => Value::poly(
                &timed(&mut report, t, "pfaffian", || {
                    homology_basis(g).and_then(|hb| z_dimer_pfaffian(&blowup(g), g, &hb))
                })?,
                &nm,
            ),
            (Method::Pfaffian, true) => Value::scalar(&timed(&mut report, t, "pfaffian", || {
                homology_basis(g).and_then(|hb| z_dimer_pfaffian_eval(&blowup(g), g, &hb, &at))
            })?),
            (Method::All, _) => unreachable!("expanded above"),
        };
        report.methods.push(MethodResult { method: m.name().into(), value });
    }
    if report.methods.len() > 1 {
        let first = &report.methods[0].value;
        let ok = report.methods.iter().all(|r| &r.value == first);
        report.checks.push(Check::new("methods agree", ok, ""));
    }
    Ok(report)
}

fn class_infos(kw: &KacWard, with_roots: bool) -> CliResult<Vec<ClassInfo>> {
    let nm = names(&kw.g);
    let mut out = Vec::new();
    for (i, c) in kw.classes.iter().enumerate() {
        let det_sqrt = if with_roots {
            match kw.det_sqrt(i) {
                Ok(p) => Some(Value::poly(&p, &nm)),
                Err(Error::Capacity { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        out.push(ClassInfo {
            index: i,
            form: c.form.values.iter().map(|&b| b as u8).collect(),
            arf: c.arf as u8,
            eps_m0: c.eps_m0,
            det_sqrt,
        });
    }
    Ok(out)
}

pub fn spins(path: &Path) -> CliResult<Report> {
    let mf = load(path)?;
    let kw = KacWard::new(&mf.map)?;
    let mut report = Report::new("spins", Some(path.display().to_string()));
    report.graph = Some(graph_info(&mf.map));
    report.basis = basis_names(&mf, &kw.basis);
    report.classes = class_infos(&kw, true)?;
    Ok(report)
}

fn check_spin(kw: &KacWard, spin: usize) -> CliResult<()> {
    if spin >= kw.classes.len() {
        return Err(CliError::Input(format!("--spin {spin} out of range: the map has {} classes", kw.classes.len())));
    }
    Ok(())
}

fn half_label(mf: &MapFile, h: usize) -> String {
    mf.half_names[h].clone()
}

pub fn matrices(path: &Path, spin: usize) -> CliResult<Report> {
    let mf = load(path)?;
    let g = &mf.map;
    let kw = KacWard::new(g)?;
    check_spin(&kw, spin)?;
    let nm = names(g);
    let m = kw.kw_matrix(spin)?;
    let n = m.size();
    let kac_ward = (0..n).map(|i| (0..n).map(|j| m.mat.get(i, j).display_with(&nm).to_string()).collect()).collect();
    let a = kw.kasteleyn_matrix(spin);
    let k = a.size();
    let kasteleyn = (0..k).map(|i| (0..k).map(|j| a.get(i, j).display_with(&nm).to_string()).collect()).collect();
    let mut report = Report::new("matrices", Some(path.display().to_string()));
    report.graph = Some(graph_info(g));
    report.classes = class_infos(&kw, false)?.into_iter().filter(|c| c.index == spin).collect();
    report.matrices = Some(Matrices {
        spin,
        kw_rows: m.halfedges.iter().map(|&h| half_label(&mf, h)).collect(),
        kac_ward,
        kasteleyn_size: k,
        kasteleyn,
    });
    Ok(report)
}

/// Oriented edges as `e1 -e2`; names that do not start with a digit are kept.
fn path_text(mf: &MapFile, p: &[usize]) -> String {
    let label = |e: usize| {
        let n = &mf.edge_names[e];
        if n.starts_with(|c: char| c.is_ascii_digit()) { format!("e{n}") } else { n.clone() }
    };
    p.iter()
        .map(|&h| if h & 1 == 0 { label(h >> 1) } else { format!("-{}", label(h >> 1)) })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn zeta(path: &Path, max_len: usize, spin: usize) -> CliResult<Report> {
    let mf = load(path)?;
    let g = &mf.map;
    let kw = KacWard::new(g)?;
    check_spin(&kw, spin)?;
    let r = verify_bass(g, &kw.kw_matrix(spin)?, max_len)?;
    let mut report = Report::new("zeta", Some(path.display().to_string()));
    report.graph = Some(graph_info(g));
    report.paths = r
        .path_signs
        .iter()
        .map(|(p, s)| PathInfo { path: path_text(&mf, &p.0), length: p.len(), sign: *s })
        .collect();
    report.checks.push(Check::new(
        format!("det(I - T) = product over {} oriented prime paths, mod degree > {max_len}", r.n_oriented_paths),
        r.holds,
        r.first_mismatch.unwrap_or_default(),
    ));
    report.checks.push(Check::new("path weights are +-x(path)", r.signs_ok, ""));
    Ok(report)
}

/// Runs `f`, turning a capacity error into a skipped check.
fn guarded(name: &str, f: impl FnOnce() -> isingkw::Result<(bool, String)>) -> Check {
    match f() {
        Ok((ok, detail)) => Check::new(name, ok, detail),
        Err(Error::Capacity { what, got, limit, .. }) => Check::skipped(name, format!("{what} {got} exceeds {limit}")),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

fn sum_by_form(parts: &[GPoly], form: &isingkw::kasteleyn::QuadForm2) -> GPoly {
    let mut s = GPoly::zero();
    for (mask, p) in parts.iter().enumerate() {
        if form.eval_mask(mask) {
            s.sub_assign_ref(p);
        } else {
            s.add_assign_ref(p);
        }
    }
    s
}

/// The invariant suite for one map.
pub fn verify_map(mf: &MapFile, level: Level, seed: u64) -> Vec<Check> {
    let g = &mf.map;
    let mut checks = Vec::new();
    let kw = match KacWard::new(g) {
        Ok(kw) => kw,
        Err(e) => return vec![Check::new("spin classes", false, e.to_string())],
    };
    let genus = g.genus();
    let point = evaluation_point(g, seed, None).expect("no assignments");
    let at = |v: VarId| point[v as usize].clone();

    checks.push(Check::new(
        "Fisher graph has the same genus",
        kw.fisher.gamma.genus() == kw.pre.map.genus() && kw.pre.map.genus() == genus,
        "",
    ));
    let n_even = kw.classes.iter().filter(|c| !c.arf).count();
    let expect_even = ((1usize << (2 * genus)) + (1usize << genus)) / 2;
    checks.push(Check::new(
        "spin classes",
        kw.classes.len() == 1 << (2 * genus) && kw.classes.iter().all(|c| c.form.is_refinement()) && n_even == expect_even,
        format!("{} classes, {n_even} even", kw.classes.len()),
    ));
    checks.push(Check::new("eps(M0) = +1", kw.classes.iter().all(|c| c.eps_m0 == 1), ""));
    checks.push(guarded("brute = kacward = pfaffian at a point", || {
        let zb = z_ising(g)?.eval_with(at);
        let zk = kw.z_evaluated(&at);
        let zp = z_dimer_pfaffian_eval(&blowup(g), g, &kw.basis, &at)?;
        Ok((zb == zk && zk == zp, format!("{zb}")))
    }));
    checks.push(guarded("det(I - T) = (eps Pf)^2 at a point", || {
        for c in 0..kw.classes.len() {
            let d = det_field(kw.kw_matrix(c)?.mat.eval(&at));
            let s = kw.signed_pfaffian_at(c, &at);
            if d != &s * &s {
                return Ok((false, format!("class {c}")));
            }
        }
        Ok((true, String::new()))
    }));
    if level == Level::Quick {
        return checks;
    }

    let hb = &kw.basis;
    let f = blowup(g);
    checks.push(guarded("symbolic methods agree", || {
        let zb = z_ising(g)?;
        let zp = z_dimer_pfaffian(&f, g, hb)?;
        let zk = kw.z_symbolic()?;
        Ok((zb == zp && zp == zk, zb.display_with(&names(g)).to_string()))
    }));
    checks.push(guarded("class determinants are perfect squares", || {
        for c in 0..kw.classes.len() {
            kw.det_sqrt(c)?;
        }
        Ok((true, String::new()))
    }));
    checks.push(guarded("eps Pf = det^(1/2) per class", || {
        for c in 0..kw.classes.len() {
            let root = kw.det_sqrt(c)?;
            let pf = pfaffian_symbolic(&kw.kasteleyn_matrix(c), DEFAULT_MATCHING_CAP)?;
            if pf.scale_int(kw.classes[c].eps_m0 as i64) != root {
                return Ok((false, format!("class {c}")));
            }
        }
        Ok((true, String::new()))
    }));
    checks.push(guarded("Pf^2 = det for Kasteleyn matrices at a point", || {
        for c in 0..kw.classes.len() {
            let a = kw.kasteleyn_matrix(c).eval(&at);
            let pf = pfaffian_field(a.clone());
            if &pf * &pf != det_field(a) {
                return Ok((false, format!("class {c}")));
            }
        }
        Ok((true, String::new()))
    }));
    checks.push(guarded("matchings correspond to even subgraphs", || check_bijection(&f, g).map(|_| (true, String::new()))));
    checks.push(guarded("Z^I_alpha = Z^D_alpha", || {
        let zi = z_ising_partials(g, hb)?;
        let zd = z_dimer_partials(&f, g, hb)?;
        Ok((zi == zd, String::new()))
    }));
    checks.push(guarded("eps Pf = twisted dimer sum per class", || {
        let lifted = f.lifted_basis(g, hb)?;
        let classes = spin_classes(&f, &lifted, hb.cocycles())?;
        let parts = z_dimer_partials(&f, g, hb)?;
        for (i, c) in classes.iter().enumerate() {
            let pf = pfaffian_symbolic(&kasteleyn_matrix(&f.gamma, &c.orientation), DEFAULT_MATCHING_CAP)?;
            if pf.scale_int(c.eps_m0 as i64) != sum_by_form(&parts, &c.form) {
                return Ok((false, format!("class {i}")));
            }
        }
        Ok((true, String::new()))
    }));
    let max_deg = (0..g.n_vertices()).map(|v| g.degree(v)).max().unwrap_or(0);
    checks.push(guarded("cluster Pfaffians are +1", || {
        for n in 1..=max_deg.max(2) {
            if pfaffian_symbolic(&cluster_block(n), DEFAULT_MATCHING_CAP)? != GPoly::one() {
                return Ok((false, format!("degree {n}")));
            }
        }
        Ok((true, String::new()))
    }));
    let bass_len = if g.n_half_edges() <= 6 { 6 } else { 4 };
    checks.push(guarded(&format!("truncated product identity to degree {bass_len}"), || {
        for c in 0..kw.classes.len() {
            let r = verify_bass(g, &kw.kw_matrix(c)?, bass_len)?;
            if !r.holds || !r.signs_ok {
                return Ok((false, format!("class {c}: {}", r.first_mismatch.unwrap_or_default())));
            }
        }
        Ok((true, String::new()))
    }));
    if g.coords().is_some() {
        checks.push(guarded("geometric Kac-Ward determinant", || {
            let exact: Vec<GaussRat> = (0..g.n_edges())
                .map(|e| match g.weight(e) {
                    Weight::Var(v) => point[*v as usize].clone(),
                    Weight::Const(c) => c.clone(),
                })
                .collect();
            if exact.iter().any(|c| !c.is_real()) {
                return Err(Error::Precondition("complex weights".into()));
            }
            let numeric: Vec<f64> = exact.iter().map(|c| c.re.to_f64().unwrap_or(f64::NAN)).collect();
            let geo = det_c64(kw_matrix_planar_geometric(g, &numeric)?);
            let ex = planar_exact_det(g, &exact)?.to_c64();
            let rel = (geo - ex).norm() / ex.norm();
            Ok((rel <= 1e-9, format!("relative error {rel:.2e}")))
        }));
    }
    checks
}

/// Map files under `path`: the file itself, or every `*.map` in a directory.
pub fn collect_maps(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_dir() {
        let mut out: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "map"))
            .collect();
        out.sort();
        if out.is_empty() {
            return Err(CliError::Input(format!("{}: no .map files", path.display())));
        }
        Ok(out)
    } else {
        Ok(vec![path.to_path_buf()])
    }
}

pub fn verify(path: &Path, level: Level, seed: u64, timings: bool) -> CliResult<Vec<Report>> {
    let mut out = Vec::new();
    for p in collect_maps(path)? {
        let mf = load(&p)?;
        let mut report = Report::new("verify", Some(p.display().to_string()));
        report.graph = Some(graph_info(&mf.map));
        report.checks = timed(&mut report, timings, "verify", || verify_map(&mf, level, seed));
        out.push(report);
    }
    Ok(out)
}

pub fn bench(n: usize, weight: f64) -> CliResult<Report> {
    if n < 2 {
        return Err(CliError::Input("--torus needs N >= 2".into()));
    }
    if !(weight.is_finite()) {
        return Err(CliError::Input("--weight must be finite".into()));
    }
    let g = torus_lattice(n);
    let t0 = Instant::now();
    let kw = KacWard::new(&g)?;
    let setup = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let z = kw.z_f64(&|_| weight)?;
    let pf_time = t1.elapsed().as_secs_f64();
    let (mut z_brute, mut rel, mut brute_time) = (None, None, None);
    if g.cycle_rank() <= BRUTE_FORCE_CAP {
        let t2 = Instant::now();
        let zb = z_ising_f64(&g, &vec![weight; g.n_edges()], BRUTE_FORCE_CAP)?;
        brute_time = Some(t2.elapsed().as_secs_f64());
        z_brute = Some(zb);
        rel = Some(((z - zb) / zb).abs());
    }
    let mut report = Report::new("bench", None);
    report.graph = Some(graph_info(&g));
    if let Some(r) = rel {
        report.checks.push(Check::new("matches brute force to 1e-12", r <= 1e-12, format!("{r:.2e}")));
    }
    report.bench = Some(BenchInfo {
        n,
        weight,
        ising_vertices: g.n_vertices(),
        ising_edges: g.n_edges(),
        fisher_vertices: kw.fisher.gamma.n_vertices(),
        z,
        free_energy_per_site: z.ln() / g.n_vertices() as f64,
        z_brute,
        relative_error: rel,
        setup_seconds: setup,
        pfaffian_seconds: pf_time,
        brute_seconds: brute_time,
    });
    Ok(report)
}

pub fn any_failed(reports: &[Report]) -> bool {
    reports.iter().any(|r| r.failed())
}

pub fn status_counts(reports: &[Report]) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for ch in reports.iter().flat_map(|r| &r.checks) {
        match ch.status {
            Status::Pass => c.0 += 1,
            Status::Fail => c.1 += 1,
            Status::Skipped => c.2 += 1,
        }
    }
    c
}
