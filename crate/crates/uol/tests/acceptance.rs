//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantities. Run with
//! `cargo test -p uol --test acceptance -- --nocapture` to see the table.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uol::boundary::{BoundaryData, BoundaryValues};
use uol::cross::{
    fit_phi, matching_conditions, ode_residual, synthesize_cross_field, theta_samples,
    CrossExpansion, Side,
};
use uol::extremal::{maximal_solution, minimal_solution, ExtremalParams};
use uol::fb::{
    blowup, extract_free_boundary, frequency_defect, monotonicity_trace, nondegeneracy_check,
    nondegeneracy_slack, pulse, rotation_fit, weiss_phi, Normalization, Regime,
};
use uol::field::{GridSpec, Point, ScalarField};
use uol::runner::{self, ExperimentConfig};
use uol::variational::{energy, instability_probe, minimize_energy_traced, DescentParams};

/// Torsion-function center value on [-1,1]² from the cosine/cosh series,
/// summed to convergence before the build.
const TORSION_CENTER: f64 = 0.294_685_413_126_055_3;

fn pass(n: u32, name: &str, detail: String) {
    println!("ACCEPTANCE {n:02} ({name}): PASS — {detail}");
}

fn square(h_inv: usize) -> GridSpec {
    GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 1.0 / h_inv as f64).unwrap()
}

fn pulse_domain(h_inv: usize) -> GridSpec {
    GridSpec::from_extent(-1.5, 1.5, -1.5, 1.5, 1.0 / h_inv as f64).unwrap()
}

#[test]
fn criterion_01_nonuniqueness_bracket() {
    let started = Instant::now();
    let spec = square(256);
    let g = BoundaryValues::constant(spec, 0.0);
    let params = ExtremalParams::for_spacing(spec.h);
    let hi = maximal_solution(&g, &params).unwrap();
    let lo = minimal_solution(&g, &params).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let center = hi.u.at(256, 256);
    let rel = (center - TORSION_CENTER).abs() / TORSION_CENTER;
    assert!(rel <= 0.01, "maximal center {center} is {rel:.2e} from the oracle");
    let lo_norm = lo.u.norm_inf();
    assert!(lo_norm <= 1e-8, "minimal solution norm {lo_norm}");
    let undershoot = lo.u.sup_diff(&hi.u).unwrap();
    assert!(undershoot <= 0.0, "minimal exceeds maximal by {undershoot}");
    assert!(elapsed <= 60.0, "took {elapsed:.1}s");
    pass(
        1,
        "nonuniqueness bracket",
        format!(
            "max u(0,0) = {center:.8} vs oracle {TORSION_CENTER:.8} (rel {rel:.2e}), \
             ‖min‖∞ = {lo_norm:.1e}, ordering holds, {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_02_energy_consistency() {
    // The pulse-trace problem is posed on a square inside the unit disc,
    // where the trace is positive and the descent minimum and the maximal
    // solution genuinely coincide. On squares containing the unit disc the
    // minimal solution (an everywhere-negative harmonic field) carries less
    // energy than the maximal one — see the energy-ordering test in
    // `variational` for the measured gap.
    let contained = GridSpec::from_extent(-0.625, 0.625, -0.625, 0.625, 1.0 / 64.0).unwrap();
    let mut details = Vec::new();
    for (label, spec, data) in [
        ("square g=0", square(64), BoundaryData::Constant { value: 0.0 }),
        ("pulse trace", contained, BoundaryData::PulseTrace),
    ] {
        let g = data.materialize(spec).unwrap();
        let outcome = minimize_energy_traced(&g, &DescentParams::default()).unwrap();
        let maximal = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h)).unwrap();
        let e_min = energy(&outcome.report.u).total;
        let e_max = energy(&maximal.u).total;
        let gap = (e_min - e_max).abs();
        let tol = 1e-3 * (1.0 + e_max.abs());
        assert!(gap <= tol, "{label}: |{e_min} - {e_max}| = {gap:.2e} > {tol:.2e}");
        details.push(format!("{label}: E_min = {e_min:.6}, E_max = {e_max:.6}, gap {gap:.1e}"));
    }
    pass(2, "energy consistency", details.join("; "));
}

#[test]
fn criterion_03_nondegeneracy_at_zeros() {
    let spec = pulse_domain(128);
    let g = BoundaryData::PulseTrace.materialize(spec).unwrap();
    let report = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h)).unwrap();
    let fb = extract_free_boundary(&report.u);
    assert!(!fb.is_empty(), "zero set must be nonempty for this problem");

    let h = spec.h;
    let radii = [8.0 * h, 16.0 * h, 32.0 * h];

    // detected zeros: the free-boundary vertices plus every interior node
    // where |u| dips below h²
    let mut zeros: Vec<Point> = fb.vertices().step_by(4).map(|v| v.point).collect();
    for (i, j) in spec.interior_indices() {
        if report.u.at(i, j).abs() <= h * h {
            zeros.push(spec.node(i, j));
        }
    }

    let mut checked = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    for z in zeros {
        if spec.clearance(z) < radii[2] {
            continue;
        }
        let margins = nondegeneracy_check(&report.u, z, &radii).unwrap();
        for m in &margins {
            let slack = nondegeneracy_slack(m.r, h);
            let excess = m.margin - slack;
            worst_excess = worst_excess.max(excess);
            assert!(
                excess <= 0.0,
                "zero at ({:.4},{:.4}), r = {}: margin {} > slack {slack}",
                z[0],
                z[1],
                m.r,
                m.margin
            );
        }
        checked += 1;
    }
    assert!(checked > 50, "only {checked} zeros checked");
    pass(
        3,
        "non-degeneracy 1/(4e)",
        format!("{checked} zeros × 3 shells; worst margin-slack = {worst_excess:.4} ≤ 0"),
    );
}

#[test]
fn criterion_04_monotonicity_formula() {
    let tol = 1e-2;
    let mut traces = 0usize;
    let mut worst_violation = 0.0f64;
    let mut worst_defect = 0.0f64;
    let mut slowest = 0.0f64;

    let solver_outputs: Vec<(&str, ScalarField)> = vec![
        (
            "maximal square g=0",
            maximal_solution(
                &BoundaryData::Constant { value: 0.0 }.materialize(square(128)).unwrap(),
                &ExtremalParams::for_spacing(1.0 / 128.0),
            )
            .unwrap()
            .u,
        ),
        (
            "maximal pulse trace",
            maximal_solution(
                &BoundaryData::PulseTrace.materialize(pulse_domain(128)).unwrap(),
                &ExtremalParams::for_spacing(1.0 / 128.0),
            )
            .unwrap()
            .u,
        ),
        (
            "minimal pulse trace",
            minimal_solution(
                &BoundaryData::PulseTrace.materialize(pulse_domain(128)).unwrap(),
                &ExtremalParams::for_spacing(1.0 / 128.0),
            )
            .unwrap()
            .u,
        ),
    ];
    let centers: [Point; 3] = [[0.0, 0.0], [0.3, -0.2], [-0.45, 0.25]];

    for (label, u) in &solver_outputs {
        let h = u.spec().h;
        for center in centers {
            let radii: Vec<f64> = (0..4)
                .map(|k| 8.0 * h * (1 << k) as f64)
                .filter(|r| u.spec().clearance(center) >= *r)
                .collect();
            if radii.len() < 2 {
                continue;
            }
            let started = Instant::now();
            let trace = monotonicity_trace(u, center, &radii).unwrap();
            slowest = slowest.max(started.elapsed().as_secs_f64());
            traces += 1;

            // non-decreasing within 1e-2·(1+|phi|)
            for w in trace.phi.windows(2) {
                let drop = w[0] - w[1];
                let scale = 1.0 + w[0].abs().max(w[1].abs());
                worst_violation = worst_violation.max(drop / scale);
                assert!(
                    drop <= tol * scale,
                    "{label} at {center:?}: phi decreases by {drop:.3e}"
                );
            }
            let defect = trace.identity_defect();
            worst_defect = worst_defect.max(defect);
            assert!(defect <= tol, "{label} at {center:?}: drift identity defect {defect:.3e}");
        }
    }
    assert!(traces >= 6, "only {traces} traces evaluated");
    assert!(slowest <= 5.0, "slowest trace {slowest:.2}s");
    pass(
        4,
        "monotonicity formula",
        format!(
            "{traces} traces; worst decrease {worst_violation:.2e}, worst identity defect \
             {worst_defect:.2e} (tol {tol}), slowest trace {slowest:.2}s"
        ),
    );
}

#[test]
fn criterion_05_homogeneous_field_phi() {
    let spec = GridSpec::from_extent(-0.75, 0.75, -0.75, 0.75, 1.0 / 256.0).unwrap();
    let u = ScalarField::from_fn(spec, |p| p[0] * p[0] - p[1] * p[1]).unwrap();
    let mut details = Vec::new();
    for r in [0.125, 0.25, 0.5] {
        let phi = weiss_phi(&u, [0.0, 0.0], r).unwrap();
        assert!((phi + 1.0).abs() <= 1e-2, "phi({r}) = {phi}");
        details.push(format!("Φ({r}) = {phi:.5}"));
    }
    pass(5, "homogeneous-field Φ = -1", details.join(", "));
}

#[test]
fn criterion_06_frequency_lemma() {
    let spec = GridSpec::from_extent(-1.1, 1.1, -1.1, 1.1, 2.2 / 564.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    let mut worst_low = f64::INFINITY;
    let mut worst_homog = 0.0f64;
    for alpha in [2u32, 3] {
        for _ in 0..20 {
            // random harmonic combination of degrees alpha..=5, normalized
            let coeffs: Vec<(f64, f64)> = (alpha..=5)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = coeffs.iter().map(|(a, b)| PI * (a * a + b * b)).sum::<f64>().sqrt();
            let w = harmonic_field(spec, alpha, &coeffs, norm);
            let d = frequency_defect(&w, alpha).unwrap();
            assert!(d.is_clean(), "warnings: {:?}", d.warnings);
            assert!(d.value >= -1e-3, "alpha {alpha}: defect {}", d.value);
            worst_low = worst_low.min(d.value);

            // homogeneous member of the same family: equality case
            let k = rng.gen_range(0..coeffs.len());
            let hn: f64 = (PI * (coeffs[k].0.powi(2) + coeffs[k].1.powi(2))).sqrt();
            if hn < 0.1 {
                continue;
            }
            let wk = harmonic_field(spec, alpha + k as u32, &coeffs[k..=k], hn);
            let dk = frequency_defect(&wk, alpha + k as u32).unwrap();
            assert!(dk.value.abs() <= 1e-3, "homogeneous defect {}", dk.value);
            worst_homog = worst_homog.max(dk.value.abs());
        }
    }
    pass(
        6,
        "frequency inequality",
        format!(
            "40 random harmonics: min defect {worst_low:.2e} ≥ -1e-3; \
             homogeneous |defect| ≤ {worst_homog:.2e} ≤ 1e-3"
        ),
    );
}

/// `sum_k r^(alpha+k) (a_k cos((alpha+k)θ) + b_k sin((alpha+k)θ)) / norm`
fn harmonic_field(spec: GridSpec, alpha: u32, coeffs: &[(f64, f64)], norm: f64) -> ScalarField {
    ScalarField::from_fn(spec, |p| {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let th = p[1].atan2(p[0]);
        coeffs
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let k = (alpha + j as u32) as f64;
                r.powf(k) * (a * (k * th).cos() + b * (k * th).sin())
            })
            .sum::<f64>()
            / norm
    })
    .unwrap()
}

#[test]
fn criterion_07_blowup_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(1_234_509);
    let r = 1e-2;
    let spec = GridSpec::from_extent(-0.025, 0.025, -0.025, 0.025, 1e-4).unwrap();
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let amp = rng.gen_range(2.0..3.0);
        let ang = rng.gen_range(0.0..PI);
        let (a_true, b_true) = (amp * ang.cos(), amp * ang.sin());
        let u = ScalarField::from_fn(spec, |p| {
            let q = a_true * (p[0] * p[0] - p[1] * p[1]) + 2.0 * b_true * p[0] * p[1];
            let rr = (p[0] * p[0] + p[1] * p[1]).sqrt();
            q + rr * rr * rr
        })
        .unwrap();
        let trend = [
            (r, weiss_phi(&u, [0.0, 0.0], r).unwrap()),
            (2.0 * r, weiss_phi(&u, [0.0, 0.0], 2.0 * r).unwrap()),
        ];
        let fit = blowup(&u, [0.0, 0.0], r, Normalization::Spherical, &trend).unwrap();
        assert_eq!(
            fit.regime,
            Regime::HomogeneousSolution,
            "trial {trial}: flat negative Φ trend must classify as a degree-2 limit"
        );
        // relative L²(∂B₁) distance between the fitted model and the planted
        // normalized quadratic
        let norm = (PI * (a_true * a_true + b_true * b_true)).sqrt();
        let err = (PI * (fit.coeffs[0] - a_true / norm).powi(2)
            + PI * (fit.coeffs[1] - b_true / norm).powi(2)
            + 2.0 * PI * fit.coeffs[2].powi(2))
        .sqrt();
        assert!(err <= 1e-2, "trial {trial}: coefficient error {err:.3e}");
        worst = worst.max(err);
    }
    pass(
        7,
        "blow-up classification",
        format!("10 planted quadratics at r = {r}: regime recovered, worst rel L² error {worst:.2e} ≤ 1e-2"),
    );
}

#[test]
fn criterion_08_cross_expansion_exactness() {
    let started = Instant::now();
    let e = CrossExpansion::canonical();
    let samples = theta_samples(1000);
    let mut worst_ode = 0.0f64;
    for side in [Side::Plus, Side::Minus] {
        for k in 0..=1u8 {
            worst_ode = worst_ode.max(ode_residual(&e, k, side, &samples).unwrap());
        }
    }
    assert!(worst_ode <= 1e-12, "ODE residual {worst_ode:.3e}");

    let report = matching_conditions(&e);
    let worst_match = report.max_defect();
    assert!(worst_match <= 1e-12, "matching defect {worst_match:.3e}");

    // the arc conditions pin the coefficients jointly: z⁻¹(π/4) = 0 forces
    // (1+2φ¹)A⁰π/4 = 0, and z⁺¹(π/4) = 0 then forces (1-2φ¹)A⁰ = 1/π
    let phi1 = -0.5;
    let a0 = (1.0 / PI) / (1.0 - 2.0 * phi1);
    assert!((phi1 - e.phi1).abs() <= 1e-15);
    assert!((a0 - 0.5 / PI).abs() <= 1e-15 && (a0 - e.a0).abs() <= 1e-15);

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 1.0, "took {elapsed:.2}s");
    pass(
        8,
        "cross expansion exactness",
        format!(
            "ODE residual ≤ {worst_ode:.1e}, matching defects ≤ {worst_match:.1e}, \
             arc conditions force φ¹ = -1/2 and A⁰ = 1/(2π), {elapsed:.2}s"
        ),
    );
}

#[test]
fn criterion_09_cross_instability() {
    let started = Instant::now();
    let e = CrossExpansion::canonical();
    let spec = GridSpec::centered(513, 0.5 / 512.0).unwrap();
    let u = synthesize_cross_field(&e, spec, (-1.0f64).exp()).unwrap();
    let deltas: Vec<f64> = (2..=6).map(|k| 0.5f64.powi(k)).collect();
    let samples = instability_probe(&u, [0.0, 0.0], 0.24, &deltas).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let table: Vec<String> = samples
        .iter()
        .map(|s| format!("δ=2^{:.0}: total {:+.3} (D {:.2}, B {:.2})",
            s.delta.log2(), s.value.total, s.value.dirichlet, s.value.boundary))
        .collect();
    println!("ACCEPTANCE 09 (cross instability): probe table — {}", table.join("; "));

    // totals non-increasing over the delta list
    for w in samples.windows(2) {
        assert!(
            w[1].value.total <= w[0].value.total + 1e-9,
            "totals increased: {} -> {}",
            w[0].value.total,
            w[1].value.total
        );
    }
    // boundary term grows against log(1/delta)
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| (1.0 / s.delta).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.value.boundary).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(slope > 0.0, "boundary-term slope {slope}");
    assert!(elapsed <= 30.0, "took {elapsed:.1}s");

    // the sign change: the second variation must go negative by delta = 2^-6
    let min_total = samples.iter().map(|s| s.value.total).fold(f64::INFINITY, f64::min);
    assert!(
        min_total < 0.0,
        "totals stay positive (min {min_total:+.3}): at the canonical amplitude A0 = 1/(2pi) the \
         boundary term accumulates only log log(1/delta) ≈ {:.1} by delta = 2^-6 against a \
         Dirichlet mass of 7.2π ≈ 22.6; the crossing sits near delta ≈ 2^-14, below any \
         resolvable scale",
        samples.last().unwrap().value.boundary
    );
    pass(
        9,
        "cross instability",
        format!("min total {min_total:+.3} < 0, boundary slope {slope:.2} > 0, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_10_free_boundary_fit() {
    let e = CrossExpansion::canonical();
    let spec = GridSpec::centered(1025, 0.5 / 1024.0).unwrap();
    let u = synthesize_cross_field(&e, spec, (-1.0f64).exp()).unwrap();
    let fb = extract_free_boundary(&u);
    let radii: Vec<f64> = (0..4).map(|k| 0.135 / 2f64.powi(k)).collect();
    let fit = fit_phi(&fb, [0.0, 0.0], &radii).unwrap();
    let rel = (fit.slope + 0.5).abs() / 0.5;
    assert!(rel <= 0.02, "slope {} is {rel:.3} from -1/2", fit.slope);

    // exploratory path on a solver output: reported, never pass/fail
    let g = BoundaryData::PulseTrace.materialize(pulse_domain(64)).unwrap();
    let solver = maximal_solution(&g, &ExtremalParams::for_spacing(1.0 / 64.0)).unwrap();
    let solver_fb = extract_free_boundary(&solver.u);
    let note = match fit_phi(&solver_fb, [1.0, 0.0], &[0.0625, 0.125]) {
        Ok(f) => format!("solver-output slope {:.3} (exploratory)", f.slope),
        Err(err) => format!("solver output has no four-arc structure ({err}); reported only"),
    };
    pass(
        10,
        "free-boundary fit",
        format!("synthesized cross slope {:.5} within 2% of -1/2; {note}", fit.slope),
    );
}

#[test]
fn criterion_11_rotation_fit_stability() {
    let e = CrossExpansion::canonical();
    let spec = GridSpec::centered(1025, 0.5 / 1024.0).unwrap();
    let u = synthesize_cross_field(&e, spec, (-1.0f64).exp()).unwrap();
    let radii: Vec<f64> = (0..4).map(|k| 0.18 / 2f64.powi(k)).rev().collect();
    let fits = rotation_fit(&u, [0.0, 0.0], &radii).unwrap();
    let mut worst = 0.0f64;
    for w in fits.windows(2) {
        let d = (w[1].angle - w[0].angle).abs();
        let drift = d.min(std::f64::consts::FRAC_PI_2 - d);
        worst = worst.max(drift);
        assert!(drift <= 1e-2, "drift {drift} between r={} and r={}", w[0].r, w[1].r);
    }
    pass(
        11,
        "rotation-fit stability",
        format!("max |θ(2r)-θ(r)| = {worst:.2e} ≤ 1e-2 over four dyadic radii"),
    );
}

#[test]
fn criterion_12_reproducibility() {
    let configs = [
        r#"{
  "domain": { "origin": [-1.0, -1.0], "size": [2.0, 2.0], "h": 0.03125 },
  "boundary": { "kind": "constant", "value": 0.0 },
  "task": { "kind": "solve-max" },
  "seed": 11
}"#,
        r#"{
  "domain": { "origin": [-1.0, -1.0], "size": [2.0, 2.0], "h": 0.0625 },
  "boundary": { "kind": "quadratic", "a": 0.3, "b": 0.1 },
  "task": { "kind": "minimize",
            "starts": ["zero", "harmonic", { "random-perturbation": { "index": 1 } }] },
  "seed": 99
}"#,
    ];
    let mut compared = 0usize;
    for text in configs {
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let a = runner::run(&cfg, &dir.path().join("a")).unwrap();
        let b = runner::run(&cfg, &dir.path().join("b")).unwrap();
        assert_eq!(a.metrics.len(), b.metrics.len());
        for (k, va) in &a.metrics {
            let vb = b.metrics[k];
            assert!(
                (va - vb).abs() <= 1e-12 * (1.0 + va.abs()),
                "{k}: {va} vs {vb}"
            );
        }
        assert_eq!(a.artifacts.len(), b.artifacts.len());
        for (ea, eb) in a.artifacts.iter().zip(&b.artifacts) {
            assert_eq!(ea.path, eb.path);
            assert_eq!(ea.sha256, eb.sha256, "artifact {} differs", ea.path);
            compared += 1;
        }
    }
    pass(
        12,
        "reproducibility",
        format!("2 configs × 2 runs: all metrics equal to 1e-12, {compared} artifact hashes identical"),
    );
}

#[test]
fn pulse_subsolution_domination() {
    // supporting check used by several criteria: the maximal solution
    // dominates the sampled pulse up to O(h²)
    let spec = pulse_domain(128);
    let g = BoundaryData::PulseTrace.materialize(spec).unwrap();
    let report = maximal_solution(&g, &ExtremalParams::for_spacing(spec.h)).unwrap();
    let p = ScalarField::from_fn(spec, pulse::pulse).unwrap();
    let undershoot = p.sup_diff(&report.u).unwrap();
    assert!(undershoot <= 20.0 * spec.h * spec.h, "pulse rises {undershoot} above maximal");
}
