//! Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cjkit::channel::{action_distance, compose, Channel};
use cjkit::choi::{channel_from_choi, choi_from_channel, choi_rank};
use cjkit::cli::{to_canonical_json, ChannelJson, ChoiJson};
use cjkit::linalg::{herm_eig, kron, partial_trace, svd_right, swap_factors, ComplexMatrix, Factor, C64};
use cjkit::phase_covariant::{build_channel, extract_tau, TauFamily};
use cjkit::random::{random_channel, random_density, random_matrix, random_unitary};
use cjkit::rotation::{haar_rotation, rotation_invariant_state, spin_rep, OrbitalSpace};
use cjkit::states::{diagonal_reference, make_reference, ReferenceState};
use cjkit::symmetry::{check_covariance, check_modular_covariance, twirl_choi, Representation};
use cjkit::transpose::{commutant_dual, transpose_channel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] criterion {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn random_reference(rng: &mut ChaCha8Rng, d: usize) -> ReferenceState {
    make_reference(&random_density(rng, d)).unwrap()
}

struct RoundtripStats {
    worst_roundtrip: f64,
    worst_margin: f64,
    count: usize,
    elapsed: Duration,
}

/// Shared by criteria 1 and 2: 100 random unital channels per `(d_in, d_out) ∈ {2..5}²`.
fn roundtrip_stats() -> &'static RoundtripStats {
    static STATS: OnceLock<RoundtripStats> = OnceLock::new();
    STATS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(1001);
        let start = Instant::now();
        let (mut worst_roundtrip, mut worst_margin, mut count) = (0.0f64, 0.0f64, 0);
        for d_in in 2usize..=5 {
            for d_out in 2..=5 {
                for _ in 0..100 {
                    let n_kraus = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out);
                    let c = random_channel(&mut rng, d_in, d_out, n_kraus);
                    let r = random_reference(&mut rng, d_in);
                    let s = choi_from_channel(&c, &r).unwrap();
                    let back = choi_from_channel(&channel_from_choi(&s).unwrap(), &r).unwrap();
                    worst_roundtrip = worst_roundtrip.max(back.matrix().dist(s.matrix()));
                    let margin = partial_trace(s.matrix(), Factor::Second, (d_in, d_out)).unwrap();
                    worst_margin = worst_margin.max(margin.dist(&r.density()));
                    count += 1;
                }
            }
        }
        RoundtripStats { worst_roundtrip, worst_margin, count, elapsed: start.elapsed() }
    })
}

#[test]
fn criterion_01_isomorphism_roundtrip() {
    let st = roundtrip_stats();
    let secs = st.elapsed.as_secs_f64();
    report(
        1,
        "isomorphism roundtrip",
        st.worst_roundtrip <= 1e-9 && secs <= 10.0,
        format!("{} channels, max ‖ΔS‖_F = {:.2e} (tol 1e-9), {secs:.2} s (limit 10 s)", st.count, st.worst_roundtrip),
    );
}

#[test]
fn criterion_02_margin_law() {
    let st = roundtrip_stats();
    report(
        2,
        "margin law",
        st.worst_margin <= 1e-10,
        format!("{} channels, max ‖tr₂S − ρ₀‖_F = {:.2e} (tol 1e-10)", st.count, st.worst_margin),
    );
}

/// Reconstructs `Φ(B)` from `tr[S(A'⊗B)] = tr[ρ₀^{1/2} A'ᵀ ρ₀^{1/2} X]` by a dense linear solve
/// over the standard matrix units `A'`.
fn recovery_by_solve(s: &cjkit::ChoiState, b: &ComplexMatrix) -> ComplexMatrix {
    let r = s.reference();
    let d = r.dim();
    let sq = r.sqrt();
    let mut lhs = DMatrix::<C64>::zeros(d * d, d * d);
    let mut rhs = DVector::<C64>::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            let a = ComplexMatrix::unit(d, d, i, j);
            let n = &(&sq * &r.transpose_in_basis(&a).unwrap()) * &sq;
            // tr[N X] = Σ_{p,q} N[q,p] X[p,q]
            for p in 0..d {
                for q in 0..d {
                    lhs[(i * d + j, p * d + q)] = n[(q, p)];
                }
            }
            rhs[i * d + j] = s.pairing(&a, b).unwrap();
        }
    }
    let x = lhs.lu().solve(&rhs).expect("pairing system is invertible");
    ComplexMatrix::from_vec(d, d, x.iter().copied().collect()).unwrap()
}

#[test]
fn criterion_03_recovery_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst: f64 = 0.0;
    let mut probes = 0;
    for d_in in 1usize..=4 {
        for d_out in 1..=4 {
            let c = { let n = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out); random_channel(&mut rng, d_in, d_out, n) };
            let r = random_reference(&mut rng, d_in);
            let s = choi_from_channel(&c, &r).unwrap();
            for k in 0..d_out {
                for l in 0..d_out {
                    let b = ComplexMatrix::unit(d_out, d_out, k, l);
                    let kraus = c.apply_heisenberg(&b).unwrap();
                    let rec2 = s.recover_heisenberg(&b).unwrap();
                    let rec1 = recovery_by_solve(&s, &b);
                    worst = worst.max(rec1.dist(&rec2)).max(rec1.dist(&kraus)).max(rec2.dist(&kraus));
                    probes += 1;
                }
            }
        }
    }
    report(3, "recovery consistency", worst <= 1e-10, format!("{probes} matrix-unit probes, max discrepancy {worst:.2e} (tol 1e-10)"));
}

/// Numerical rank of the stacked vectorized Kraus operators.
fn kraus_span_rank(c: &Channel) -> usize {
    let n = c.kraus().len();
    let len = c.d_in() * c.d_out();
    let m = ComplexMatrix::from_fn(n, len, |i, j| c.kraus()[i].data()[j]);
    let (sv, _) = svd_right(&m);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&x| x > 1e-10 * top).count()
}

#[test]
fn criterion_04_kraus_minimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let (mut worst_gram, mut bad) = (0.0f64, 0);
    for inst in 0..100 {
        let d_in: usize = rng.random_range(2..=4);
        let d_out = rng.random_range(2..=4);
        let mut c = { let n = rng.random_range(d_in.div_ceil(d_out)..=d_in * d_out); random_channel(&mut rng, d_in, d_out, n) };
        if inst % 4 == 0 {
            // redundant input: every Kraus operator split in two
            let split: Vec<_> = c.kraus().iter().flat_map(|k| [k.scale_real(0.6), k.scale_real(0.8)]).collect();
            c = Channel::new(d_in, d_out, split).unwrap();
        }
        let r = random_reference(&mut rng, d_in);
        let s = choi_from_channel(&c, &r).unwrap();
        let ext = channel_from_choi(&s).unwrap();
        let g = ext.kraus_gram(&r).unwrap();
        let off = ComplexMatrix::from_fn(g.rows(), g.cols(), |i, j| if i == j { C64::new(0.0, 0.0) } else { g[(i, j)] });
        worst_gram = worst_gram.max(off.frobenius_norm());
        let n = ext.kraus().len();
        if n != choi_rank(&s) || !ext.is_minimal_kraus() || kraus_span_rank(&ext) != n || n != kraus_span_rank(&c) {
            bad += 1;
        }
    }
    report(
        4,
        "Kraus minimality",
        bad == 0 && worst_gram <= 1e-9,
        format!("100 instances, {bad} cardinality/independence failures, max off-diagonal Gram {worst_gram:.2e} (tol 1e-9)"),
    );
}

#[test]
fn criterion_05_transpose_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let (mut defining, mut involution, mut contra, mut swap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let (d0, d1, d2) = (rng.random_range(2..=4), rng.random_range(2..=4), rng.random_range(2..=4));
        let r0 = random_reference(&mut rng, d0);
        let phi = { let n = rng.random_range(d1..=d0 * d1); random_channel(&mut rng, d0, d1, n) };
        let psi = { let n = rng.random_range(d2..=d1 * d2); random_channel(&mut rng, d1, d2, n) };

        let t_phi = transpose_channel(&phi, &r0).unwrap();
        defining = defining.max(t_phi.defining_residual().unwrap());
        let tt = transpose_channel(&t_phi.transposed, &t_phi.rho1).unwrap();
        involution = involution.max(action_distance(&tt.transposed, &t_phi.original).unwrap());

        let t_psi = transpose_channel(&psi, &t_phi.rho1).unwrap();
        defining = defining.max(t_psi.defining_residual().unwrap());
        // Heisenberg Φ∘Ψ has Schrödinger order Φ_* then Ψ_*
        let t_both = transpose_channel(&compose(&psi, &phi).unwrap(), &r0).unwrap();
        let chained = compose(&t_phi.transposed, &t_psi.transposed).unwrap();
        contra = contra.max(action_distance(&t_both.transposed, &chained).unwrap());

        let s = choi_from_channel(&phi, &r0).unwrap();
        let s_dual = choi_from_channel(&commutant_dual(&phi, &r0).unwrap(), &t_phi.rho1).unwrap();
        swap = swap.max(s_dual.matrix().dist(&swap_factors(s.matrix(), (d0, d1))));
    }
    report(
        5,
        "transpose laws",
        defining <= 1e-9 && involution <= 1e-9 && contra <= 1e-9 && swap <= 1e-10,
        format!(
            "50 chains, defining {defining:.2e}, involution {involution:.2e}, contravariance {contra:.2e} (tol 1e-9), Choi swap {swap:.2e} (tol 1e-10)"
        ),
    );
}

fn random_tau_family(rng: &mut ChaCha8Rng, d: usize) -> TauFamily {
    use std::collections::BTreeMap;
    let mut raw: BTreeMap<(i64, usize, usize), C64> = BTreeMap::new();
    let mut norms = vec![0.0; d];
    for (m, norm) in norms.iter_mut().enumerate() {
        for l in -(m as i64)..(d - m) as i64 {
            for j in 0..2 {
                if rng.random_bool(0.4) || (l == 0 && j == 0) {
                    let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    *norm += z.norm_sqr();
                    raw.insert((l, j, m), z);
                }
            }
        }
    }
    let taus = raw.into_iter().map(|((l, j, m), z)| ((l, j, m), z / norms[m].sqrt())).collect();
    TauFamily::new(d, taus).unwrap()
}

#[test]
fn criterion_06_phase_covariant_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let (mut unital, mut cov, mut roundtrip) = (0.0f64, 0.0f64, 0.0f64);
    let mut angle_counts_ok = true;
    for _ in 0..50 {
        let d = rng.random_range(2..=8);
        let c = build_channel(&random_tau_family(&mut rng, d)).unwrap();
        unital = unital.max(c.unital_residual());
        let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        let r = diagonal_reference(&p).unwrap();
        let rep = Representation::number(d);
        let rc = check_covariance(&c, &rep, &rep, &r).unwrap();
        angle_counts_ok &= rc.elements_tested == 2 * d - 1;
        cov = cov.max(rc.residual);
        let back = build_channel(&extract_tau(&c, &r).unwrap()).unwrap();
        roundtrip = roundtrip.max(action_distance(&back, &c).unwrap());
    }
    let mut rotation: f64 = 0.0;
    for d in 2..=8 {
        let th = rng.random_range(0.0..2.0 * PI);
        let u = ComplexMatrix::diag(&(0..d).map(|m| C64::from_polar(1.0, m as f64 * th)).collect::<Vec<_>>());
        let c = build_channel(&TauFamily::rotation(d, th)).unwrap();
        let b = random_matrix(&mut rng, d, d);
        rotation = rotation.max(c.apply_heisenberg(&b).unwrap().dist(&b.conjugate_by(&u.adjoint())));
    }
    report(
        6,
        "phase-covariant family",
        unital <= 1e-10 && cov <= 1e-10 && angle_counts_ok && roundtrip <= 1e-9 && rotation <= 1e-12,
        format!(
            "50 families, unital {unital:.2e}, covariance {cov:.2e} at N = 2d−1 angles (tol 1e-10), extract∘build {roundtrip:.2e} (tol 1e-9), rotation {rotation:.2e} (tol 1e-12)"
        ),
    );
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// 576-point product rule (8 α × 8 cos β × 9 γ) for the Haar twirl of a qubit Choi state.
fn quadrature_twirl(s: &ComplexMatrix) -> ComplexMatrix {
    let spin = spin_rep(1).unwrap();
    let (na, ng) = (8, 9);
    let mut acc = ComplexMatrix::zeros(4, 4);
    let mut points = 0;
    for (x, w) in gauss_legendre(8) {
        let beta = x.acos();
        for ia in 0..na {
            for ig in 0..ng {
                let alpha = 2.0 * PI * ia as f64 / na as f64;
                let gamma = 2.0 * PI * ig as f64 / ng as f64;
                let u = &(&spin.rotation([0.0, 0.0, 1.0], alpha) * &spin.rotation([0.0, 1.0, 0.0], beta))
                    * &spin.rotation([0.0, 0.0, 1.0], gamma);
                let x = kron(&u.conj(), &u);
                acc = &acc + &s.conjugate_by(&x.adjoint()).scale_real(w / 2.0 / (na * ng) as f64);
                points += 1;
            }
        }
    }
    assert_eq!(points, 576);
    acc
}

#[test]
fn criterion_07_twirl_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut idempotence: f64 = 0.0;
    let mut iff_failures = 0;
    let mut quadrature: f64 = 0.0;

    let pauli = Representation::finite(vec![
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_rows(&[vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)], vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]]),
        ComplexMatrix::diag_real(&[1.0, -1.0]),
    ])
    .unwrap();
    let reps: Vec<(Representation, ReferenceState)> = vec![
        (Representation::number(3), diagonal_reference(&[0.5, 0.3, 0.2]).unwrap()),
        (pauli, ReferenceState::maximally_mixed(2)),
        (Representation::spin(1).unwrap(), ReferenceState::maximally_mixed(2)),
        (Representation::spin(2).unwrap(), ReferenceState::maximally_mixed(3)),
    ];
    for (rep, r) in &reps {
        let d = rep.dim();
        for k in 0..6 {
            let c = random_channel(&mut rng, d, d, 1 + k % 3);
            let s = choi_from_channel(&c, r).unwrap();
            let t1 = twirl_choi(&s, rep, rep).unwrap();
            let t2 = twirl_choi(&t1, rep, rep).unwrap();
            idempotence = idempotence.max(t2.matrix().dist(t1.matrix()));
            // non-covariant input: not a fixed point and not covariant
            let fixed = t1.matrix().dist(s.matrix()) <= 1e-9;
            if fixed || check_covariance(&c, rep, rep, r).unwrap().covariant {
                iff_failures += 1;
            }
            // constructed covariant input: fixed point and covariant
            let cov = channel_from_choi(&t1).unwrap();
            let s_cov = choi_from_channel(&cov, r).unwrap();
            let fixed = twirl_choi(&s_cov, rep, rep).unwrap().matrix().dist(s_cov.matrix()) <= 1e-9;
            if !fixed || !check_covariance(&cov, rep, rep, r).unwrap().covariant {
                iff_failures += 1;
            }
        }
    }
    let spin = Representation::spin(1).unwrap();
    let r = ReferenceState::maximally_mixed(2);
    for _ in 0..10 {
        let c = { let n = rng.random_range(1..=4); random_channel(&mut rng, 2, 2, n) };
        let s = choi_from_channel(&c, &r).unwrap();
        let exact = twirl_choi(&s, &spin, &spin).unwrap();
        quadrature = quadrature.max(exact.matrix().dist(&quadrature_twirl(s.matrix())));
    }
    report(
        7,
        "twirl projection",
        idempotence <= 1e-10 && iff_failures == 0 && quadrature <= 1e-6,
        format!(
            "idempotence {idempotence:.2e} (tol 1e-10), fixed-point⇔covariant failures {iff_failures}, SU(2) vs 576-point quadrature {quadrature:.2e} (tol 1e-6)"
        ),
    );
}

#[test]
fn criterion_08_modular_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let (mut positive, mut negative) = (0.0f64, f64::INFINITY);
    for d in 2..=4 {
        let r = random_reference(&mut rng, d);
        let h = r.log().scale_real(-1.0);
        positive = positive.max(check_modular_covariance(&Channel::identity(d), &r, &h).unwrap().residual);
        let u = Channel::unitary(random_unitary(&mut rng, d));
        negative = negative.min(check_modular_covariance(&u, &r, &h).unwrap().residual);
    }
    report(
        8,
        "modular covariance",
        positive <= 1e-10 && negative >= 1e-3,
        format!("identity with H = −log ρ₀: {positive:.2e} (tol 1e-10); rotated control: min {negative:.2e} (needs ≥ 1e-3)"),
    );
}

#[test]
fn criterion_09_rotation_invariant_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let (mut worst, mut min_eig) = (0.0f64, f64::INFINITY);
    for l_max in 0..=2 {
        for n_rad in 1..=3 {
            let sp = OrbitalSpace::new(l_max, n_rad).unwrap();
            let mut t: Vec<f64> = (0..=l_max).map(|_| rng.random_range(0.1..1.0)).collect();
            let tot: f64 = t.iter().sum();
            t.iter_mut().for_each(|x| *x /= tot);
            let sigmas: Vec<_> = (0..=l_max).map(|_| random_density(&mut rng, n_rad)).collect();
            let r = rotation_invariant_state(&sp, &t, &sigmas).unwrap();
            let rho = r.density();
            min_eig = min_eig.min(herm_eig(&rho).unwrap().min());
            for _ in 0..50 {
                let (axis, angle) = haar_rotation(&mut rng);
                let u = sp.rotation(axis, angle);
                worst = worst.max((&u * &rho).dist(&(&rho * &u)));
            }
        }
    }
    report(
        9,
        "rotation-invariant states",
        worst <= 1e-10 && min_eig > 0.0,
        format!("9 spaces × 50 rotations, max commutator {worst:.2e} (tol 1e-10), min eigenvalue {min_eig:.3e} (> 0)"),
    );
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cjkit(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cjkit")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn criterion_10_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let tmp = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let fx = |n: &str| fixture(n).to_string_lossy().into_owned();
    let mut failures = Vec::new();

    // golden regeneration must be byte-identical; parse→serialize of every golden is a fixed
    // point; converting back lands within 1e-9 of the input
    let goldens = [
        ("kraus", "choi", "identity_channel.json", "identity_choi.json"),
        ("choi", "kraus", "depolarizing_choi.json", "depolarizing_channel.json"),
        ("kraus", "kraus", "amplitude_damping.json", "amplitude_damping_canonical.json"),
    ];
    let mut roundtrip: f64 = 0.0;
    for (from, to, input, golden) in goldens {
        let want = std::fs::read_to_string(fixture(golden)).unwrap();
        for pass in 0..2 {
            let (code, _) = cjkit(&["convert", "--from", from, "--to", to, &fx(input), &tmp("out.json")]);
            if code != 0 || std::fs::read_to_string(tmp("out.json")).unwrap_or_default() != want {
                failures.push(format!("{input} → {golden} (pass {pass})"));
            }
        }
        let reserialized = if to == "choi" {
            to_canonical_json(&serde_json::from_str::<ChoiJson>(&want).unwrap())
        } else {
            to_canonical_json(&serde_json::from_str::<ChannelJson>(&want).unwrap())
        };
        if reserialized != want {
            failures.push(format!("{golden} does not reserialize byte-identically"));
        }
        let (code, _) = cjkit(&["convert", "--from", to, "--to", from, &tmp("out.json"), &tmp("back.json")]);
        if code != 0 {
            failures.push(format!("{golden} reverse conversion exit {code}"));
            continue;
        }
        let as_choi = |path: &Path, form: &str| {
            let text = std::fs::read_to_string(path).unwrap();
            if form == "choi" {
                serde_json::from_str::<ChoiJson>(&text).unwrap().s.to_matrix().unwrap()
            } else {
                let c = serde_json::from_str::<ChannelJson>(&text).unwrap().to_channel().unwrap();
                choi_from_channel(&c, &ReferenceState::maximally_mixed(c.d_in())).unwrap().matrix().clone()
            }
        };
        roundtrip = roundtrip.max(as_choi(&fixture(input), from).dist(&as_choi(&dir.path().join("back.json"), from)));
    }
    if roundtrip > 1e-9 {
        failures.push(format!("convert∘convert drift {roundtrip:.2e}"));
    }

    let matrix: [(&[&str], i32); 6] = [
        (&["check", "--unital", "--cp"], 0),
        (&["check", "--unital", "BROKEN"], 1),
        (&["convert", "--from", "kraus", "--to", "choi", "MALFORMED", "OUT"], 2),
        (&["convert", "--from", "choi", "--to", "kraus", "NONPSD", "OUT"], 3),
        (&["check", "--covariant", "PHASE", "PHASE", "TAUCH"], 0),
        (&["check", "--covariant", "SPIN", "SPIN", "AD"], 1),
    ];
    let mut codes_seen = [false; 4];
    let (code, _) = cjkit(&["phase-family", "build", &fx("tau_rotation.json"), &tmp("tauch.json")]);
    if code != 0 {
        failures.push("phase-family build".into());
    }
    for (args, want) in matrix {
        let mut argv: Vec<String> = args
            .iter()
            .map(|a| match *a {
                "BROKEN" => fx("broken_normalization.json"),
                "MALFORMED" => fx("malformed.json"),
                "NONPSD" => fx("nonpsd_choi.json"),
                "PHASE" => fx("rep_phase_3.json"),
                "SPIN" => fx("rep_spin_half.json"),
                "TAUCH" => tmp("tauch.json"),
                "AD" => fx("amplitude_damping.json"),
                "OUT" => tmp("unused.json"),
                other => other.to_string(),
            })
            .collect();
        if want == 0 && args.len() == 3 {
            argv.push(fx("depolarizing_channel.json"));
        }
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        let (code, _) = cjkit(&refs);
        if code != want {
            failures.push(format!("{args:?}: exit {code}, expected {want}"));
        }
        if (0..4).contains(&code) {
            codes_seen[code as usize] = true;
        }
    }
    report(
        10,
        "CLI contract",
        failures.is_empty() && codes_seen.iter().all(|&s| s),
        if failures.is_empty() {
            format!("3 goldens byte-stable, convert∘convert {roundtrip:.2e} (tol 1e-9), exit codes {{0,1,2,3}} all exercised")
        } else {
            format!("failures: {}", failures.join("; "))
        },
    );
}
