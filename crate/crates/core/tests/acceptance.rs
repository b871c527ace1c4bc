//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use onecover::cli::run_cli;
use onecover::dodeca::{cell_frame, dodeca_params, CellFrame, DodecaConfig};
use onecover::hull::{convex_hull, mesh_volume, surface_volume};
use onecover::planar::{
    check_cover_lemma2, coverage_multiplicity_histogram, maximize_sector_once_area, LatticeCover,
};
use onecover::volume::{
    delta3_dc, rejection_volume, run_trials, Estimator, GnPConfig, HullPatchConfig,
    RejectionEstimate, TryStats,
};
use onecover::{Point2, Point3, RandomStream};

const SEED: u64 = 20240611;
const TRIES: usize = 100;
const GNP_NS: [usize; 3] = [80_000, 140_000, 200_000];

struct Outcome {
    checks: Vec<(String, bool)>,
}

impl Outcome {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn frame() -> &'static CellFrame {
    static F: OnceLock<CellFrame> = OnceLock::new();
    F.get_or_init(|| cell_frame(&dodeca_params(DodecaConfig::Paper)))
}

fn gnp_table() -> &'static Vec<TryStats> {
    static T: OnceLock<Vec<TryStats>> = OnceLock::new();
    T.get_or_init(|| {
        GNP_NS
            .iter()
            .map(|&n| {
                let est = Estimator::Gnp(GnPConfig::new(n).unwrap());
                run_trials(&est, frame(), TRIES, SEED).unwrap()
            })
            .collect()
    })
}

fn hull_table() -> &'static Vec<(usize, TryStats)> {
    static T: OnceLock<Vec<(usize, TryStats)>> = OnceLock::new();
    T.get_or_init(|| {
        (1..=10)
            .map(|k| {
                let m = 2000 * k;
                let est = Estimator::Hull(HullPatchConfig::new(m).unwrap());
                (m, run_trials(&est, frame(), TRIES, SEED).unwrap())
            })
            .collect()
    })
}

fn rejection_1e7() -> &'static RejectionEstimate {
    static R: OnceLock<RejectionEstimate> = OnceLock::new();
    R.get_or_init(|| rejection_volume(frame(), 10_000_000, &mut RandomStream::new(SEED, 0)).unwrap())
}

fn criterion_1(o: &mut Outcome) {
    let opt = maximize_sector_once_area();
    let f_star = (3.0 * 3f64.sqrt() - PI) / 12.0;
    let ratio = (3.0 * 3f64.sqrt() - PI) / PI;
    o.check(format!("x_star {}", opt.x_star), (opt.x_star - 3f64.sqrt() / 2.0).abs() <= 1e-9);
    o.check(format!("f_star {}", opt.f_star), (opt.f_star - f_star).abs() <= 1e-12);
    o.check(format!("ratio_star {}", opt.ratio_star), (opt.ratio_star - ratio).abs() <= 1e-12);
}

fn criterion_2(o: &mut Outcome) {
    let p = dodeca_params(DodecaConfig::Paper);
    let f = frame();
    o.check(format!("R {}", p.face_circumradius), (p.face_circumradius - 0.649841).abs() <= 5e-6);
    o.check(format!("H {}", p.face_distance), (p.face_distance - 0.760071).abs() <= 5e-6);
    o.check(format!("alpha1 {}", p.alpha1), (p.alpha1 - 0.728762).abs() <= 1e-4);
    o.check(format!("vol_T {}", f.vol_t), (f.vol_t - 0.050877).abs() <= 1e-5);
    o.check(format!("vol_T' {}", f.vol_t_prime), (f.vol_t_prime - 0.0163051).abs() <= 1e-5);
    o.check(format!("vol_big {}", f.vol_big), (f.vol_big - 0.0348169).abs() <= 1e-5);
}

fn criterion_3(o: &mut Outcome) {
    for (n, stats) in GNP_NS.iter().zip(gnp_table()) {
        o.check(
            format!("gnp n={n} mean {:.7} sigma {:.3e}", stats.mean, stats.sigma),
            (0.0215..=0.0226).contains(&stats.mean),
        );
    }
}

fn criterion_4(o: &mut Outcome) {
    let table = hull_table();
    for (m, stats) in table {
        o.check(
            format!("hull m={m} mean {:.7} sigma {:.3e}", stats.mean, stats.sigma),
            (0.02185..=0.02205).contains(&stats.mean),
        );
    }
    let last = &table.last().unwrap().1;
    o.check(
        format!("hull m=20000 mean {:.7} in [0.02195, 0.02203]", last.mean),
        (0.02195..=0.02203).contains(&last.mean),
    );
    let max = table.iter().map(|(_, s)| s.max).fold(f64::NEG_INFINITY, f64::max);
    o.check(format!("hull max over all tries {max:.7} <= 0.02202"), max <= 0.02202);
    let mut monotone = true;
    for w in table.windows(2) {
        let (a, b) = (&w[0].1, &w[1].1);
        if b.mean < a.mean - a.std_error().max(b.std_error()) {
            monotone = false;
        }
    }
    o.check("hull means non-decreasing in m within one standard error", monotone);
}

fn criterion_5(o: &mut Outcome) {
    let r = rejection_1e7();
    let d = delta3_dc(&dodeca_params(DodecaConfig::Paper), r.estimate).unwrap();
    o.check(format!("alpha2 {:.6}", d.alpha2), (d.alpha2 - 0.4324).abs() <= 0.002);
    o.check(format!("delta {:.6}", d.delta), (d.delta - 0.3151).abs() <= 0.002);
}

fn criterion_6(o: &mut Outcome) {
    let gnp = &gnp_table()[2];
    let hull = &hull_table().last().unwrap().1;
    let rej = rejection_1e7();
    let means = [
        ("gnp", gnp.mean, gnp.std_error()),
        ("hull", hull.mean, hull.std_error()),
        ("rejection", rej.estimate, rej.std_error),
    ];
    for i in 0..3 {
        for j in i + 1..3 {
            let (na, ma, sa) = means[i];
            let (nb, mb, sb) = means[j];
            let combined = (sa * sa + sb * sb).sqrt();
            o.check(
                format!("{na} vs {nb}: |{ma:.7} - {mb:.7}| <= 3 x {combined:.2e}"),
                (ma - mb).abs() <= 3.0 * combined,
            );
        }
    }
    let f = frame();
    let all = gnp
        .estimates
        .iter()
        .chain(&hull.estimates)
        .chain(std::iter::once(&rej.estimate))
        .all(|&e| e > f.vol_t_prime && e < f.vol_big);
    o.check("all estimates inside (vol_T', vol_big)", all);
}

fn criterion_7(o: &mut Outcome) {
    let hex = check_cover_lemma2(&LatticeCover::hexagonal(3f64.sqrt()).unwrap(), 3).unwrap();
    o.check(
        format!("hex sqrt3 cover r_max {}", hex.r_max),
        hex.is_cover && (hex.r_max - 1.0).abs() <= 1e-9,
    );
    let wide = check_cover_lemma2(&LatticeCover::hexagonal(1.8).unwrap(), 3).unwrap();
    o.check(
        format!("hex 1.8 non-cover r_max {}", wide.r_max),
        !wide.is_cover && (wide.r_max - 1.0392).abs() <= 1e-4,
    );
    let sq = check_cover_lemma2(&LatticeCover::square(2f64.sqrt()).unwrap(), 3).unwrap();
    o.check(format!("square sqrt2 cover r_max {}", sq.r_max), sq.is_cover);
}

fn random_covering_lattice(rng: &mut RandomStream) -> LatticeCover {
    loop {
        let u = Point2::new(rng.gen_range(0.8..1.6), rng.gen_range(-0.3..0.3));
        let w = Point2::new(rng.gen_range(-0.8..0.8), rng.gen_range(0.8..1.6));
        let Ok(cover) = LatticeCover::new(u, w) else { continue };
        if check_cover_lemma2(&cover, 3).map(|v| v.is_cover).unwrap_or(false) {
            return cover;
        }
    }
}

fn criterion_8(o: &mut Outcome) {
    let mut rng = RandomStream::new(SEED, 8);
    let cases = [
        ("hex sqrt3", LatticeCover::hexagonal(3f64.sqrt()).unwrap()),
        ("square sqrt2", LatticeCover::square(2f64.sqrt()).unwrap()),
        ("random", random_covering_lattice(&mut rng)),
    ];
    for (k, (name, cover)) in cases.iter().enumerate() {
        let h = coverage_multiplicity_histogram(cover, 1_000_000, &RandomStream::new(SEED, 80 + k as u64))
            .unwrap();
        let expect = PI / cover.cell_area();
        o.check(
            format!(
                "{name}: mean multiplicity {:.5} vs {:.5} (se {:.1e})",
                h.mean_multiplicity, expect, h.mean_std_error
            ),
            (h.mean_multiplicity - expect).abs() <= 3.0 * h.mean_std_error,
        );
        if *name == "square sqrt2" {
            let want = (4.0 - PI) / 2.0;
            o.check(
                format!("square sqrt2 fraction[1] {:.5} vs {want:.5}", h.fraction(1)),
                (h.fraction(1) - want).abs() <= 0.002,
            );
        }
    }
}

fn cloud(rng: &mut RandomStream, size: usize, kind: usize) -> Vec<Point3> {
    (0..size)
        .map(|_| {
            let p = Point3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            match kind {
                0 => p,
                1 => p.normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0)),
                _ => Point3::new(p.x * 10.0, p.y, p.z * 0.1),
            }
        })
        .collect()
}

fn criterion_9(o: &mut Outcome) {
    let mut rng = RandomStream::new(SEED, 9);
    let (mut euler, mut manifold, mut contain, mut perm) = (true, true, true, true);
    for c in 0..100 {
        let size = (4.0 * (5000.0f64 / 4.0).powf(rng.gen::<f64>())).round() as usize;
        let size = if c == 0 { 4 } else if c == 1 { 5000 } else { size };
        let mut pts = cloud(&mut rng, size, c % 3);
        let mesh = convex_hull(&pts).unwrap();
        euler &= mesh.euler_characteristic() == 2;
        manifold &= mesh.is_closed_manifold();
        contain &= mesh.max_violation(&pts) <= mesh.tau;
        let vol = mesh_volume(&mesh);
        pts.shuffle(&mut rng);
        let again = mesh_volume(&convex_hull(&pts).unwrap());
        perm &= (vol - again).abs() <= 1e-9 * vol.max(1e-300);
    }
    o.check("Euler formula V - E + F = 2 on 100 clouds", euler);
    o.check("every edge has two incident faces", manifold);
    o.check("all input points within tau of the hull", contain);
    o.check("volume invariant under input permutation", perm);

    let mut cube = Vec::new();
    for i in 0..8 {
        cube.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
    }
    let mesh = convex_hull(&cube).unwrap();
    o.check(
        "unit cube volume 1 to 1e-12",
        (mesh_volume(&mesh) - 1.0).abs() <= 1e-12 && (surface_volume(&mesh) - 1.0).abs() <= 1e-12,
    );
    let simplex = [
        Point3::ORIGIN,
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
    ];
    let mesh = convex_hull(&simplex).unwrap();
    o.check(
        "corner simplex volume 1/6 to 1e-12",
        (mesh_volume(&mesh) - 1.0 / 6.0).abs() <= 1e-12 && mesh.face_count() == 4,
    );
}

fn cli_csv(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(args, &mut out, &mut err);
    (code, out)
}

fn criterion_10(o: &mut Outcome) {
    let runs: [&[&str]; 6] = [
        &["--format", "csv", "planar", "density", "--family", "square", "--spacing", "1.3", "--n", "200000", "--seed", "5"],
        &["--format", "csv", "planar", "sweep", "--family", "hex", "--min", "1.5", "--max", "1.9", "--steps", "5", "--n", "50000", "--seed", "5"],
        &["--format", "csv", "dodeca", "volume", "--method", "gnp", "--n", "20000", "--tries", "8", "--seed", "5"],
        &["--format", "csv", "dodeca", "volume", "--method", "hull", "--m", "1000,3000", "--tries", "8", "--seed", "5"],
        &["--format", "csv", "dodeca", "volume", "--method", "rejection", "--n", "200000", "--tries", "8", "--seed", "5"],
        &["--format", "csv", "dodeca", "delta", "--n", "1000000", "--seed", "5"],
    ];
    for args in runs {
        let (c1, a) = cli_csv(args);
        let (c2, b) = cli_csv(args);
        o.check(
            format!("{} byte-identical", args[2..6].join(" ")),
            c1 == 0 && c2 == 0 && !a.is_empty() && a == b,
        );
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Outcome)); 10] = [
        ("sector optimum", criterion_1),
        ("dodecahedral constants", criterion_2),
        ("generate-and-probe table", criterion_3),
        ("hull patch table", criterion_4),
        ("alpha2 and delta", criterion_5),
        ("estimator cross-consistency", criterion_6),
        ("planar cover checks", criterion_7),
        ("multiplicity conservation", criterion_8),
        ("hull property suite", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = Outcome::new();
        run(&mut o);
        let secs = start.elapsed().as_secs_f64();
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name} ({secs:.2}s)", i + 1);
        for (label, ok) in &o.checks {
            println!("    [{}] {label}", if *ok { "ok" } else { "FAIL" });
        }
        if !o.passed() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
