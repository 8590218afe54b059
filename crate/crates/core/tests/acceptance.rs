//! Acceptance criteria AC1–AC10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use tgeo_core::fields::{
    codazzi_residual, hopf_field, jacobi_relation_residual, killing_canonical_frames,
    killing_identity_residual, meridian_field, sasakian_identity_residual, singular_decomposition,
    UnitVectorField,
};
use tgeo_core::manifold::{Sphere, SpherePoint, Vector};
use tgeo_core::rng::{self, Rng};
use tgeo_core::sasaki::{
    bundle_sectional_curvature, geodesic_field_obstruction, lifted_plane_curvature, obstruction_entries,
    sasaki_inner, second_form_direct, second_form_lemma, submanifold_plane_curvature, xi_normal_lift,
    xi_tangential_lift, BundleVector,
};
use tgeo_core::variation::{
    destabilizing_field, duschek_integrand_general, horizontal_constant_field, propagate_fiber_frame,
    reduced_integrand, stable_s3_field, witness_residuals, HopfFrameCombination, TrigPolynomial,
    VariationField,
};
use tgeo_core::FieldDescriptor;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn points(s: &Sphere, seed: u64, n: usize) -> Vec<SpherePoint> {
    (0..n).map(|i| s.random_point_with(&mut rng::stream(seed, i as u64))).collect()
}

fn max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Unit tangent vector orthogonal to `xi`.
fn horizontal(s: &Sphere, p: &SpherePoint, xi: &Vector, rng: &mut Rng) -> Vector {
    let x = s.random_tangent_with(p, rng);
    let v = x.vec() - xi * xi.dot(x.vec());
    v.normalize()
}

fn ac1() -> Outcome {
    let mut worst_l: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for m in 1..=3 {
        let xi = hopf_field(m, 1.0).unwrap();
        let pts = points(xi.sphere(), 1000 + m as u64, 200);
        let (l, d) = pts
            .par_iter()
            .map(|p| {
                let sd = singular_decomposition(&xi, p).unwrap();
                let l = second_form_lemma(&xi, p, Some(&sd)).unwrap().max_abs();
                let d = second_form_direct(&xi, p, Some(&sd)).unwrap().max_abs();
                (l, d)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        worst_l = worst_l.max(l);
        worst_d = worst_d.max(d);
    }
    outcome(
        worst_l < 1e-4 && worst_d < 1e-4,
        format!("Hopf on S3, S5, S7: max |Omega| lemma {worst_l:.2e}, direct {worst_d:.2e} over 3x200 points (tol 1e-4)"),
    )
}

fn ac2() -> Outcome {
    let xi = hopf_field(1, 2.0).unwrap();
    let k: f64 = 0.25;
    let om = 0.5 * k * (1.0 - k) / (1.0 + k);
    let remark = k * (1.0 - k) / (2.0 * (1.0 + k).powf(1.5));
    let pts = points(xi.sphere(), 2000, 50);
    let mut pattern_value: f64 = 0.0;
    let mut pattern_min = f64::INFINITY;
    let mut off_pattern: f64 = 0.0;
    let mut om_gap: f64 = 0.0;
    let mut remark_gap = f64::INFINITY;
    for p in &pts {
        let sd = killing_canonical_frames(&xi, p).unwrap();
        let omega = second_form_direct(&xi, p, Some(&sd)).unwrap();
        for (s, i, j, v) in omega.nonzero(0.0) {
            let in_pattern = (j == 0 && i == 3 - s) || (i == 0 && j == 3 - s);
            if in_pattern {
                pattern_value = pattern_value.max(v.abs());
                pattern_min = pattern_min.min(v.abs());
                om_gap = om_gap.max((v.abs() - om).abs());
                remark_gap = remark_gap.min((v.abs() - remark).abs());
            } else {
                off_pattern = off_pattern.max(v.abs());
            }
        }
    }
    let pass = om_gap < 1e-4 && remark_gap > 1e-4 && off_pattern < 1e-4 && pattern_min > 1e-2;
    outcome(
        pass,
        format!(
            "Hopf on S3(2): |Omega(s|m+s,0)| = {pattern_value:.6} matches 1/2 K(1-K)/(1+K) = {om:.6} \
             (gap {om_gap:.1e}), not the (1+K)^(3/2) form {remark:.6}; off-pattern max {off_pattern:.1e}"
        ),
    )
}

fn ac3() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in 1..=2 {
        let xi = hopf_field(m, 1.0).unwrap();
        let s = *xi.sphere();
        let (a, b) = (0..10_000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::stream(3000 + m as u64, i);
                let p = s.random_point_with(&mut rng);
                let f = s.random_orthonormal_frame_with(&p, &mut rng).unwrap();
                let k = lifted_plane_curvature(&xi, &f.vectors()[0], &f.vectors()[1]).unwrap();
                (k, k)
            })
            .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |x, y| (x.0.min(y.0), x.1.max(y.1)));
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let in_range = lo >= 0.25 - 1e-6 && hi <= 1.25 + 1e-6;

    // designated sections on S3 and S5
    let mut designated: f64 = 0.0;
    for m in 1..=2 {
        let xi = hopf_field(m, 1.0).unwrap();
        let s = *xi.sphere();
        let mut rng = rng::stream(3100, m as u64);
        for _ in 0..20 {
            let p = s.random_point_with(&mut rng);
            let u = xi.at(&p).unwrap();
            let x = s.tangent(&p, horizontal(&s, &p, u.vec(), &mut rng)).unwrap();
            let ax = tgeo_core::fields::shape_operator(&xi, &x).unwrap();
            let k_xi = submanifold_plane_curvature(&xi, &u, &x).unwrap();
            let k_phi = submanifold_plane_curvature(&xi, &x, &ax).unwrap();
            designated = designated.max((k_xi - 0.25).abs()).max((k_phi - 1.25).abs());
        }
    }

    // planes of T₁S³ at arbitrary unit vectors
    let s3 = Sphere::unit(4).unwrap();
    let (blo, bhi) = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(3200, i);
            let p = s3.random_point_with(&mut rng);
            let u = s3.random_unit_tangent_with(&p, &mut rng);
            let mk = |rng: &mut Rng| {
                let h = s3.random_tangent_with(&p, rng);
                let v = s3.random_tangent_with(&p, rng);
                let v = v.vec() - u.vec() * u.vec().dot(v.vec());
                BundleVector::new(p.clone(), u.vec().clone(), h.vec().clone(), v)
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let k = bundle_sectional_curvature(&s3, &a, &b).unwrap().value;
            (k, k)
        })
        .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |x, y| (x.0.min(y.0), x.1.max(y.1)));
    let bundle_ok = blo >= -1e-6 && bhi <= 1.25 + 1e-6;
    outcome(
        in_range && designated < 1e-10 && bundle_ok,
        format!(
            "xi(M) planes on S3, S5 in [{lo:.6}, {hi:.6}]; designated sections off by {designated:.1e}; \
             T1S3 planes in [{blo:.6}, {bhi:.6}]"
        ),
    )
}

fn ac4() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=2 {
        let xi = hopf_field(m, 1.0).unwrap();
        let s = *xi.sphere();
        let mut rng = rng::stream(4000, m as u64);
        for _ in 0..250 {
            let p = s.random_point_with(&mut rng);
            let f = s.random_orthonormal_frame_with(&p, &mut rng).unwrap();
            let (x, y) = (&f.vectors()[0], &f.vectors()[1]);
            let closed = submanifold_plane_curvature(&xi, x, y).unwrap();
            let direct = lifted_plane_curvature(&xi, x, y).unwrap();
            worst = worst.max((closed - direct).abs());
        }
    }
    outcome(worst < 1e-8, format!("closed form vs bundle curvature on 500 pairs: max gap {worst:.2e} (tol 1e-8)"))
}

/// `4[(e₀a + b)² + (e₀b − a)²] + 2Σ_β[(e_βa)² + (e_βb)²] + ½(a² + b²)` from
/// the coefficient functions directly.
fn s3_oracle(a: &TrigPolynomial, b: &TrigPolynomial, x: &Vector) -> (f64, f64) {
    let [j1, j2, j3] = tgeo_core::variation::quaternion_structures();
    let e = [&j1 * x, &j2 * x, &j3 * x];
    let (av, bv) = (a.value(x), b.value(x));
    let (ga, gb) = (a.gradient(x), b.gradient(x));
    let d = |g: &Vector, i: usize| g.dot(&e[i]);
    let fiber = (d(&ga, 0) + bv).powi(2) + (d(&gb, 0) - av).powi(2);
    let grad: f64 = (1..3).map(|i| d(&ga, i).powi(2) + d(&gb, i).powi(2)).sum();
    let eta_sq = av * av + bv * bv;
    (4.0 * fiber + 2.0 * grad + 0.5 * eta_sq, eta_sq)
}

fn ac5() -> Outcome {
    let xi = hopf_field(1, 1.0).unwrap();
    let s = *xi.sphere();
    let rows: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|f| {
            let mut rng = rng::stream(5000, f);
            let a = TrigPolynomial::random(4, 3, &mut rng);
            let b = TrigPolynomial::random(4, 3, &mut rng);
            let eta = HopfFrameCombination::new(a.clone(), b.clone());
            let desc = FieldDescriptor { name: "combination".into(), params: Default::default() };
            let v = VariationField::new(xi.clone(), Arc::new(eta), desc);
            let mut margin = f64::NEG_INFINITY;
            let mut gap: f64 = 0.0;
            for _ in 0..100 {
                let p = s.random_point_with(&mut rng);
                let r = reduced_integrand(&v, &p, None).unwrap();
                let (oracle, eta_sq) = s3_oracle(&a, &b, p.coords());
                margin = margin.max(0.5 * eta_sq - r.value);
                gap = gap.max((oracle - r.value).abs() / (1.0 + oracle.abs()));
            }
            (margin, gap)
        })
        .collect();
    let margin = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let gap = max(rows.iter().map(|r| r.1));
    outcome(
        margin <= 1e-3 && gap < 1e-8,
        format!(
            "S3: 100 fields x 100 points, max(|eta|^2/2 - integrand) = {margin:.2e} (tol 1e-3); \
             matches the coefficient form to {gap:.1e}"
        ),
    )
}

fn ac6() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (d, want) in [(6usize, -1.5), (8, -3.5)] {
        let s = Sphere::unit(d).unwrap();
        let p0 = s.random_point(6000 + d as u64);
        let fr = propagate_fiber_frame(&p0, d / 2 - 1, 128).unwrap();
        let mut dev: f64 = 0.0;
        let mut res_max: f64 = 0.0;
        let mut formula: f64 = 0.0;
        for k in 1..=fr.pairs() {
            let eta = destabilizing_field(&fr, k).unwrap();
            let r = witness_residuals(&fr, k, &eta).unwrap();
            res_max = res_max.max(r.fiber_derivative).max(r.gradient);
            formula = formula.max(r.formula);
            for j in 0..fr.len() {
                let q = s.point(fr.point(j).clone()).unwrap();
                let ratio = reduced_integrand(&eta, &q, None).unwrap().ratio();
                dev = dev.max((ratio - want).abs());
            }
        }
        pass &= dev < 1e-3 && res_max < 1e-4 && formula < 1e-6 && fr.table_residual() < 1e-4;
        lines.push(format!(
            "S{}: ratio {want} within {dev:.1e} over {} samples, derivative residuals {res_max:.1e}, table {:.1e}",
            d - 1,
            fr.len(),
            fr.table_residual()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn ac7() -> Outcome {
    let mut conn_gap: f64 = 0.0;
    let mut curv_gap: f64 = 0.0;
    let mut fields: Vec<(VariationField, Vec<SpherePoint>)> = Vec::new();
    let s3 = Sphere::unit(4).unwrap();
    for f in 0..5u64 {
        fields.push((stable_s3_field(7000 + f, 3).unwrap(), points(&s3, 7100 + f, 10)));
    }
    let xi5 = hopf_field(2, 1.0).unwrap();
    let s5 = *xi5.sphere();
    for f in 0..5u64 {
        let mut rng = rng::stream(7200, f);
        let p = s5.random_point_with(&mut rng);
        let v = horizontal(&s5, &p, xi5.at(&p).unwrap().vec(), &mut rng);
                fields.push((horizontal_constant_field(&xi5, v).unwrap(), points(&s5, 7300 + f, 10)));
    }
    for (v, pts) in &fields {
        for p in pts {
            let g = duschek_integrand_general(v, p).unwrap();
            let r = reduced_integrand(v, p, None).unwrap();
            let scale = 1.0 + g.eta_sq;
            conn_gap = conn_gap.max((g.connection - r.connection).abs() / scale);
            curv_gap = curv_gap.max((g.curvature - r.curvature).abs() / scale);
        }
    }
    outcome(
        conn_gap < 1e-3 && curv_gap < 1e-3,
        format!(
            "S3, S5: connection-term identity gap {conn_gap:.3e}, curvature-term identity gap {curv_gap:.1e} \
             (tol 1e-3, relative to 1+|eta|^2)"
        ),
    )
}

fn ac8() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (m, r) in [(1usize, 1.0), (2, 1.0), (1, 2.0)] {
        let xi = hopf_field(m, r).unwrap();
        let s = *xi.sphere();
        let pts = points(&s, 8000 + 10 * m as u64 + r as u64, 100);
        let rows: Vec<[f64; 5]> = pts
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let seed = 8100 + i as u64;
                let codazzi = codazzi_residual(&xi, p, 4, seed).unwrap();
                let jacobi = jacobi_relation_residual(&xi, p).unwrap();
                let killing = killing_identity_residual(&xi, p, 4, seed).unwrap();
                let sas = sasakian_identity_residual(&xi, p, 4, seed, None).unwrap().result.residual;
                let mut rng = rng::stream(seed, 99);
                let mut dual: f64 = 0.0;
                for _ in 0..4 {
                    let x = s.random_tangent_with(p, &mut rng);
                    let y = s.random_tangent_with(p, &mut rng);
                    let t = xi_tangential_lift(&xi, &x).unwrap();
                    let n = xi_normal_lift(&xi, &y).unwrap();
                    dual = dual.max(sasaki_inner(&t, &n).unwrap().abs());
                }
                [codazzi, jacobi, killing, sas, dual]
            })
            .collect();
        let col = |k: usize| max(rows.iter().map(|r| r[k]));
        let sas_min = rows.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
        let (codazzi, jacobi, killing, sas, dual) = (col(0), col(1), col(2), col(3), col(4));
        let unit = r == 1.0;
        // on S³(2) the field is not Sasakian; detecting that is the expected outcome
        let sas_ok = if unit { sas < 1e-4 } else { sas_min > 0.1 };
        let ok = codazzi < 1e-4 && jacobi < 1e-10 && killing < 1e-4 && dual < 1e-10 && sas_ok;
        pass &= ok;
        lines.push(format!(
            "S{}({r}): Codazzi {codazzi:.1e}, Jacobi {jacobi:.1e}, Killing {killing:.1e}, duality {dual:.1e}, \
             Sasakian {} {:.1e}",
            2 * m + 1,
            if unit { "residual" } else { "violation detected, min" },
            if unit { sas } else { sas_min }
        ));
    }
    outcome(pass, lines.join("; "))
}

fn ac9() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut spectra = Vec::new();
    for (m, r) in [(1usize, 1.0), (2, 1.0), (3, 1.0), (1, 2.0)] {
        let xi = hopf_field(m, r).unwrap();
        let s = *xi.sphere();
        let mut lam: f64 = 0.0;
        for p in points(&s, 9000 + m as u64, 50) {
            let sd = singular_decomposition(&xi, &p).unwrap();
            let can = killing_canonical_frames(&xi, &p).unwrap();
            for d in [&sd, &can] {
                worst = worst
                    .max(d.relation_residual())
                    .max(d.orthonormality_residual())
                    .max(d.ordering_violation());
            }
            worst = worst.max(can.canonical_residual()).max(sd.shape().normality_defect());
            // λ = (0, 1/r, …, 1/r)
            lam = lam.max(sd.lambdas()[0].abs());
            for l in &sd.lambdas()[1..] {
                lam = lam.max((l - 1.0 / r).abs());
            }
        }
        worst = worst.max(lam);
        spectra.push(format!("S{}({r})", 2 * m + 1));
    }
    let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
    let mer = meridian_field(Sphere::unit(4).unwrap(), axis).unwrap();
    for p in points(mer.sphere(), 9100, 50) {
        let sd = singular_decomposition(&mer, &p).unwrap();
        worst = worst.max(sd.relation_residual()).max(sd.orthonormality_residual()).max(sd.ordering_violation());
    }
    outcome(worst < 1e-8, format!("{} and meridian on S3: max residual {worst:.1e} (tol 1e-8)", spectra.join(", ")))
}

fn ac10() -> Outcome {
    let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
    let mer: UnitVectorField = meridian_field(Sphere::unit(4).unwrap(), axis).unwrap();
    let s = *mer.sphere();
    let mut omega_max: f64 = 0.0;
    let mut gap_formula: f64 = 0.0;
    let mut gap_direct: f64 = 0.0;
    let mut rng = rng::stream(10_000, 0);
    let mut taken = 0;
    while taken < 50 {
        let p = s.random_point_with(&mut rng);
        let theta = mer.polar_angle(&p).unwrap();
        if !(0.2..PI - 0.2).contains(&theta) {
            continue;
        }
        taken += 1;
        let sd = singular_decomposition(&mer, &p).unwrap();
        let omega = second_form_direct(&mer, &p, Some(&sd)).unwrap();
        omega_max = omega_max.max(omega.max_abs());
        let m = geodesic_field_obstruction(&mer, &p, Some(&sd)).unwrap();
        let l = sd.lambdas();
        let cot2 = (theta.cos() / theta.sin()).powi(2);
        for sig in 1..l.len() {
            for a in 1..l.len() {
                let big_l = ((1.0 + l[sig] * l[sig]) * (1.0 + l[a] * l[a])).sqrt().recip();
                let want = -0.5 * big_l * (cot2 + 1.0) * sd.e(a).dot(sd.f(sig));
                gap_formula = gap_formula.max((m[(sig - 1, a - 1)] - want).abs());
            }
        }
        gap_direct = gap_direct.max((&m - obstruction_entries(&omega)).amax());
    }
    outcome(
        omega_max > 1e-4 && gap_formula < 1e-4 && gap_direct < 1e-4,
        format!(
            "meridian on S3: max |Omega| = {omega_max:.3} (not totally geodesic); obstruction vs \
             -1/2 L (cot^2 + 1)<e_a, f_s> {gap_formula:.1e}, vs direct Omega(s|a,0) {gap_direct:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{name} {verdict} {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
