//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hembed::circuits::{trotter_fragment_circuit, ProductFormula};
use hembed::discretize::{centered_difference, fourier_frequencies, upwind, Grid1D, TridiagonalOperator};
use hembed::dynamics::{run_schrodingerization, LinearProblem, SchrodConfig};
use hembed::embed::{codewords, embed_tridiagonal, tridiagonal_fragments, EncodingScheme};
use hembed::experiments::advection::{advection_fragments, initial_grid, run_advection, AdvectionConfig};
use hembed::experiments::levelset::{levelset_evolution, run_levelset, LevelsetConfig};
use hembed::experiments::resources::{depth_exponent, run_resources, ResourceConfig, ResourceRow, Variant};
use hembed::experiments::tfim::{run_tfim, stderr_slope, TfimConfig};
use hembed::extrapolate::{extrapolate, plan};
use hembed::linalg::{expm, expm_hermitian, kron, CVector};
use hembed::pauli::{Pauli, PauliString, PauliSum};
use hembed::simulate::{expm_evolve, StateVector};
use hembed::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_hermitian_tridiagonal(rng: &mut ChaCha8Rng, n: usize, wrap: bool) -> TridiagonalOperator {
    let mut t = TridiagonalOperator::zeros(n);
    let z = |rng: &mut ChaCha8Rng| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for j in 0..n {
        t.diag[j] = c(rng.gen_range(-1.0..1.0), 0.0);
    }
    for j in 0..n - 1 {
        let a = z(rng);
        t.upper[j] = a;
        t.lower[j] = a.conj();
    }
    if wrap {
        let a = z(rng);
        t.wrap_upper = Some(a);
        t.wrap_lower = Some(a.conj());
    }
    t
}

fn embedding_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = (0.0f64, 0.0f64);
    for scheme in [EncodingScheme::StdBinary, EncodingScheme::OneHot, EncodingScheme::Unary, EncodingScheme::CircUnary] {
        for trial in 0..50 {
            let (n, wrap) = match scheme {
                EncodingScheme::CircUnary => (2 * rng.gen_range(2..=6), true),
                EncodingScheme::Unary => (rng.gen_range(2..=12), false),
                _ => {
                    let n = rng.gen_range(3..=12);
                    (n, trial % 2 == 1)
                }
            };
            let t = random_hermitian_tridiagonal(&mut rng, n, wrap);
            let h = match embed_tridiagonal(scheme, &t) {
                Ok(h) => h,
                Err(e) => return outcome(false, format!("{scheme} N={n}: {e}")),
            };
            let sub = codewords(scheme, n).expect("codebook").subspace();
            let (restricted, leakage) = sub.restrict_with_leakage(&h).expect("restriction");
            let diff = (restricted - t.to_dense()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = (worst.0.max(diff), worst.1.max(leakage));
        }
    }
    outcome(worst.0 <= 1e-12 && worst.1 <= 1e-12, format!("max block error {:.1e}, max off-block norm {:.1e}", worst.0, worst.1))
}

fn schrodingerization_recovery() -> Outcome {
    let n = 8;
    let grid = Grid1D::inflow(0.0, 1.0, n).expect("grid");
    let a = upwind(&grid, |_| 1.0).expect("upwind");
    let (h1, h2) = a.cartesian();
    let u0: Vec<C64> = grid.points().iter().map(|x| c((-((x - 0.3) / 0.15).powi(2)).exp(), 0.0)).collect();
    let q = 3;
    let o = PauliSum::from_terms(q, [(c(0.5, 0.0), PauliString::identity(q)), (c(-0.5, 0.0), PauliString::single(q, q - 1, Pauli::Z))]);
    let problem = LinearProblem::new(
        tridiagonal_fragments(EncodingScheme::StdBinary, &h1).expect("h1"),
        tridiagonal_fragments(EncodingScheme::StdBinary, &h2).expect("h2"),
        o.clone(),
        u0.clone(),
    )
    .expect("problem");
    let t = 0.5;
    let cfg = SchrodConfig { steps: 200, ..SchrodConfig::new(10, 4.0) };
    let est = run_schrodingerization(&problem, t, &cfg).expect("pipeline");
    let exact = expm_evolve(&a.to_dense(), &CVector::from_vec(u0), t).expect("oracle").u_t;
    let want = (exact.adjoint() * o.to_dense().expect("dense") * &exact)[(0, 0)].re / exact.norm_squared();
    let rel = (est.value - want).abs() / want.abs();
    outcome(rel <= 0.01, format!("estimate {:.6} vs oracle {:.6}, relative error {:.2e}", est.value, want, rel))
}

fn frequency_diagonal() -> Outcome {
    for n in 1..=8usize {
        let big = 1i64 << n;
        let want: Vec<f64> = (0..big).map(|j| if j < big / 2 { j as f64 } else { (j - big) as f64 }).collect();
        let d = fourier_frequencies(n).to_dense().expect("dense");
        for (j, w) in want.iter().enumerate() {
            if d[(j, j)] != c(*w, 0.0) {
                return outcome(false, format!("n={n}, entry {j}: {} vs {w}", d[(j, j)]));
            }
        }
        let off = (0..d.nrows()).flat_map(|i| (0..d.ncols()).map(move |j| (i, j))).any(|(i, j)| i != j && d[(i, j)] != c(0.0, 0.0));
        if off {
            return outcome(false, format!("n={n}: non-diagonal entries"));
        }
    }
    outcome(true, "exact for n = 1..8")
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn trotter_order() -> Outcome {
    let n = 8;
    let t = 0.5;
    let cfg = AdvectionConfig { n, ..AdvectionConfig::default() };
    let frags = advection_fragments(&cfg).expect("fragments");
    let book = codewords(cfg.encoding, n).expect("codebook");
    let q = book.q;
    let words: Vec<usize> = book.codewords.iter().map(|w| w[0] as usize).collect();
    let index: Vec<usize> = (0..n * n).map(|k| words[k % n] | (words[k / n] << q)).collect();
    let u0 = initial_grid(&cfg);

    let grid = Grid1D::periodic(0.0, 1.0, n).expect("grid");
    let a = centered_difference(&grid, |_| 1.0, |_| 0.0).expect("operator").to_dense();
    let u1 = expm(&(a * c(t, 0.0)));
    let exact = kron(&u1, &u1) * CVector::from_iterator(n * n, u0.iter().map(|&x| c(x, 0.0)));

    let mut amps = vec![c(0.0, 0.0); 1 << (2 * q)];
    for (k, &i) in index.iter().enumerate() {
        amps[i] = c(u0[k], 0.0);
    }
    let start = StateVector::from_amplitudes(amps).expect("state");
    let mut pts = Vec::new();
    for r in [4usize, 8, 16, 32, 64] {
        let circ = trotter_fragment_circuit(&frags, t, &ProductFormula::second_order(), r).expect("circuit");
        let mut s = start.clone();
        s.apply_circuit(&circ).expect("run");
        let inside: f64 = index.iter().map(|&i| s.amplitudes()[i].norm_sqr()).sum();
        let err2: f64 = index.iter().enumerate().map(|(k, &i)| (s.amplitudes()[i] - exact[k]).norm_sqr()).sum::<f64>() + (1.0 - inside).abs();
        pts.push(((r as f64).ln(), err2.sqrt().ln()));
    }
    let slope = -least_squares_slope(&pts);
    outcome((slope - 2.0).abs() <= 0.2, format!("global error slope {slope:.3} over r = 4..64"))
}

fn richardson() -> Outcome {
    let h = PauliSum::from_letters(&[(1.0, "XXI"), (0.8, "IYY"), (0.6, "ZIZ"), (0.5, "XII"), (0.4, "IZI")]).expect("h");
    let o = PauliSum::from_letters(&[(1.0, "IIZ"), (0.5, "XIX")]).expect("o");
    let t = 2.0;
    let u = expm_hermitian(&h.to_dense().expect("dense"), t);
    let mut e0 = CVector::zeros(8);
    e0[0] = c(1.0, 0.0);
    let v = &u * e0;
    let truth = (v.adjoint() * o.to_dense().expect("dense") * &v)[(0, 0)].re;
    let pl = plan(3, 2, 2, 1, t).expect("plan");
    let vals: Vec<_> = pl
        .r
        .iter()
        .map(|&r| {
            let mut s = StateVector::zero(3);
            s.apply_circuit(&trotter_fragment_circuit(&single_terms(&h), t, &ProductFormula::second_order(), r).expect("circuit")).expect("run");
            hembed::dynamics::ObservableEstimate::exact(s.expectation(&o).expect("expectation"), None, 1)
        })
        .collect();
    let best = vals.iter().map(|v| (v.value - truth).abs()).fold(f64::INFINITY, f64::min);
    let err = (extrapolate(&pl, &vals).expect("extrapolate").value - truth).abs();

    let series = |s: f64| 0.42 + 1.3 * s * s - 0.7 * s.powi(4);
    let spl = plan(3, 2, 2, 1, 0.5).expect("plan");
    let svals: Vec<_> = spl.steps().iter().map(|&s| hembed::dynamics::ObservableEstimate::exact(series(s), None, 1)).collect();
    let serr = (extrapolate(&spl, &svals).expect("extrapolate").value - 0.42).abs();
    outcome(
        err * 10.0 <= best && serr <= 1e-9,
        format!("nodes {:?}: best single {best:.2e}, extrapolated {err:.2e} ({:.0}x); series error {serr:.1e}", pl.r, best / err),
    )
}

fn single_terms(h: &PauliSum) -> Vec<PauliSum> {
    h.terms().iter().map(|(k, s)| PauliSum::from_terms(h.n_qubits(), [(*k, s.clone())])).collect()
}

fn tfim_comparison() -> Outcome {
    let start = Instant::now();
    let cfg = TfimConfig::default();
    let r = run_tfim(&cfg).expect("tfim");
    let at = |m: &str| r.method_rows(m).find(|row| row.estimate.shots == 10_000).map(|row| row.estimate.clone());
    let (Some(s), Some(l)) = (at("schrod"), at("lchs")) else {
        return outcome(false, "no estimates at 1e4 executions");
    };
    let combined = (s.stderr.powi(2) + l.stderr.powi(2)).sqrt();
    let ok_values = (s.value - r.oracle).abs() <= 2.0 * combined && (l.value - r.oracle).abs() <= 2.0 * combined;
    let ss = stderr_slope(r.method_rows("schrod")).unwrap_or(f64::NAN);
    let ls = stderr_slope(r.method_rows("lchs")).unwrap_or(f64::NAN);
    let ok_slopes = (ss + 0.5).abs() <= 0.1 && (ls + 0.5).abs() <= 0.1;
    let elapsed = start.elapsed();
    outcome(
        ok_values && ok_slopes && elapsed < Duration::from_secs(600),
        format!(
            "oracle {:.4}; schrod {:.4}, lchs {:.4}, 2 combined stderr {:.4}; slopes {ss:.3} / {ls:.3}; {:.1}s",
            r.oracle,
            s.value,
            l.value,
            2.0 * combined,
            elapsed.as_secs_f64()
        ),
    )
}

fn advection_demo() -> Outcome {
    let cfg = AdvectionConfig::default();
    let r = run_advection(&cfg).expect("advection");
    let drift = r.drift_error_cells(cfg.velocity);
    let within = |got: usize, reference: f64| (got as f64) <= 2.0 * reference && (got as f64) >= reference / 2.0;
    let g = &r.gates_rxx;
    outcome(
        drift <= 1.5 && within(g.count_1q, 212.0) && within(g.count_2q, 115.0),
        format!("drift error {drift:.2} cells; rxx preset {} 1q / {} 2q gates", g.count_1q, g.count_2q),
    )
}

fn levelset_demo() -> Outcome {
    let cfg = LevelsetConfig { n_x: 5, n_q: 32, ..LevelsetConfig::default() };
    let r = run_levelset(&cfg).expect("levelset");
    let frac = r.fraction_within_one_spacing();
    let run = |steps| {
        let layout_qubits = 2 * cfg.n_x + cfg.encoding.qubits(cfg.n_q);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let amps: Vec<C64> = (0..1usize << layout_qubits).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut s = StateVector::from_amplitudes(amps).expect("state");
        s.apply_circuit(&levelset_evolution(&LevelsetConfig { steps, ..cfg.clone() }).expect("circuit")).expect("run");
        s
    };
    let (a, b) = (run(1), run(100));
    let diff = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    outcome(frac >= 0.9 && diff <= 1e-10, format!("{:.1}% within one q spacing; r=1 vs r=100 max difference {diff:.1e}", 100.0 * frac))
}

/// Orderings are read from the rxx preset with control fan-out, pinned before the sweep was run.
fn resource_orderings() -> Outcome {
    let pinned = Variant::ALL[3];
    let depth = |rows: &[ResourceRow], e: EncodingScheme, n: usize| {
        rows.iter().find(|r| r.encoding == e && r.n == n && r.variant == pinned).map(|r| r.report.depth_2q).expect("row")
    };
    let (bin, hot, una) = (EncodingScheme::StdBinary, EncodingScheme::OneHot, EncodingScheme::Unary);
    let nl = run_resources(&ResourceConfig { variants: vec![pinned], ..ResourceConfig::nonlinear() }).expect("nonlinear sweep");
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [8, 16, 32] {
        let (h, u, b) = (depth(&nl, hot, n), depth(&nl, una, n), depth(&nl, bin, n));
        ok &= h < u && u < b;
        notes.push(format!("NL N_q={n}: {h}/{u}/{b}"));
    }
    let adv = run_resources(&ResourceConfig { variants: vec![pinned], encodings: vec![bin, hot], ..ResourceConfig::advection() })
        .expect("advection sweep");
    for n in [8, 16, 32] {
        let (h, b) = (depth(&adv, hot, n), depth(&adv, bin, n));
        ok &= h < b;
        notes.push(format!("adv N={n}: {h}/{b}"));
    }
    let big = run_resources(&ResourceConfig { variants: vec![pinned], encodings: vec![hot], sizes: vec![64], ..ResourceConfig::advection() })
        .expect("advection sweep");
    let all: Vec<ResourceRow> = adv.into_iter().chain(big).collect();
    let k = depth_exponent(&all, hot, pinned).unwrap_or(f64::NAN);
    ok &= (k - 1.5).abs() <= 0.3;
    outcome(ok, format!("{} (one-hot/unary/binary, one-hot/binary); one-hot exponent {k:.2}", notes.join(", ")))
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_hembed")).args(args).output().expect("spawn hembed");
    assert!(out.status.success(), "hembed {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["--seed", "3", "--shots", "200", "advection", "--n", "6"],
        &["levelset", "--nx", "3", "--nq", "8"],
        &["--seed", "5", "tfim-compare", "--budgets", "100,1000"],
        &["resources", "--model", "nonlinear", "--sizes", "8"],
        &["resources", "--sizes", "8", "--encoding", "onehot"],
    ];
    for args in runs {
        if cli(args) != cli(args) {
            return outcome(false, format!("outputs differ for {args:?}"));
        }
    }
    outcome(true, format!("{} subcommand runs bit-identical", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("embedding exactness", embedding_exactness),
        ("warped-phase recovery", schrodingerization_recovery),
        ("frequency diagonal", frequency_diagonal),
        ("second-order slope", trotter_order),
        ("Richardson extrapolation", richardson),
        ("TFIM comparison", tfim_comparison),
        ("2D advection demo", advection_demo),
        ("level-set demo", levelset_demo),
        ("resource orderings", resource_orderings),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "criterion {:>2} {:<26} {}  {} [{:.1}s]",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
