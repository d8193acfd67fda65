//! Report builders for the `siegel-lab` subcommands.
//!
//! Each builder returns the command-specific payload together with the
//! process exit code. Randomized suites seed a dedicated generator, so a
//! payload is a pure function of (configuration, seed, nodes).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use siegel_core::group::{act, bracket, compose};
use siegel_core::multiplier::{bundles_equivalent, classify_multiplier as classify, cocycle_defect};
use siegel_core::{
    apply_pi_c, apply_v, linalg, mf, phi_defect, psi_st, v_equivalent, v_fn, C64, CVec,
    DomainPoint, FockFn, GroupElement, HoloFn, KernelQuadrature, MfReport, NormalizedConfig, RVec,
    SiegelDomain,
};

const IDENTITY_TOL: f64 = 1e-10;
const PSI_TOL: f64 = 1e-8;

fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn cvec_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| cx(*z)).collect())
}

fn rvec_json(v: &RVec) -> Value {
    Value::Array(v.iter().map(|x| json!(x)).collect())
}

fn cmat_json(m: &siegel_core::CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| cx(m[(i, j)])).collect()))
            .collect(),
    )
}

fn random_group<R: Rng>(n: usize, m: usize, rng: &mut R) -> GroupElement {
    let x = RVec::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let u = CVec::from_fn(m, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    GroupElement::new(x, u)
}

fn random_point<R: Rng>(domain: &SiegelDomain, rng: &mut R) -> DomainPoint {
    let n = domain.n();
    let m = domain.m();
    let u = CVec::from_fn(m, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let t = RVec::from_fn(n, |_, _| rng.random_range(0.3..1.0));
    let y = domain.q().eval_diag(&u).expect("fiber dimensions match") + domain.cone().generator_matrix() * t;
    let z = CVec::from_iterator(
        n,
        y.iter().map(|b| C64::new(rng.random_range(-1.0..1.0), *b)),
    );
    DomainPoint::new(z, u)
}

pub fn validate(norm: &NormalizedConfig) -> Value {
    json!({
        "valid": true,
        "N": norm.domain.n(),
        "M": norm.domain.m(),
        "orthant": norm.domain.cone().is_orthant(),
        "points": norm.points.len(),
        "functionals": norm.xi.len(),
    })
}

/// Group-law identities over 1000 random cases each: associativity,
/// bracket against `4 Im Q`, action compatibility, height preservation.
pub fn group_check(norm: &NormalizedConfig, seed: u64) -> anyhow::Result<(Value, i32)> {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = &norm.domain;
    let q = domain.q();
    let (n, m) = (domain.n(), domain.m());
    let mut assoc = 0.0f64;
    let mut brk = 0.0f64;
    let mut action = 0.0f64;
    let mut height = 0.0f64;
    for _ in 0..CASES {
        let g1 = random_group(n, m, &mut rng);
        let g2 = random_group(n, m, &mut rng);
        let g3 = random_group(n, m, &mut rng);
        let p = random_point(domain, &mut rng);

        let left = compose(q, &compose(q, &g1, &g2)?, &g3)?;
        let right = compose(q, &g1, &compose(q, &g2, &g3)?)?;
        assoc = assoc
            .max((&left.x - &right.x).amax())
            .max((&left.u - &right.u).camax());

        let b = bracket(q, &g1, &g2)?;
        let im4 = RVec::from_iterator(n, q.eval(&g1.u, &g2.u)?.iter().map(|z| 4.0 * z.im));
        brk = brk.max((&b.x - im4).amax()).max(b.u.camax());

        let two_step = act(q, &g1, &act(q, &g2, &p)?)?;
        let one_step = act(q, &compose(q, &g1, &g2)?, &p)?;
        action = action
            .max((&two_step.z - &one_step.z).camax())
            .max((&two_step.u - &one_step.u).camax());

        let moved = act(q, &g1, &p)?;
        height = height.max((domain.height(&moved)? - domain.height(&p)?).amax());
    }
    let pass = assoc < IDENTITY_TOL && brk < IDENTITY_TOL && action < IDENTITY_TOL
        && height < IDENTITY_TOL;
    let payload = json!({
        "cases": CASES,
        "max_defects": {
            "associativity": assoc,
            "bracket": brk,
            "action_compatibility": action,
            "height_preservation": height,
        },
        "tolerance": IDENTITY_TOL,
        "pass": pass,
    });
    Ok((payload, if pass { 0 } else { 1 }))
}

/// Cocycle defect statistics and canonical-parameter recovery for the
/// configured multiplier.
pub fn classify_multiplier(norm: &NormalizedConfig, seed: u64) -> anyhow::Result<(Value, i32)> {
    const CASES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = &norm.domain;
    let q = domain.q();
    let (n, m) = (domain.n(), domain.m());
    let mut max_cocycle = 0.0f64;
    for _ in 0..CASES {
        let g1 = random_group(n, m, &mut rng);
        let g2 = random_group(n, m, &mut rng);
        let p = random_point(domain, &mut rng);
        max_cocycle = max_cocycle.max(cocycle_defect(&norm.multiplier, q, &g1, &g2, &p)?);
    }
    let c_hat = classify(&norm.multiplier, domain)?;
    let error = (&c_hat - &norm.c).camax();
    let pass = max_cocycle < IDENTITY_TOL && error < 1e-6;
    let payload = json!({
        "cases": CASES,
        "c": cvec_json(&norm.c),
        "c_hat": cvec_json(&c_hat),
        "classification_error": error,
        "cocycle_max_defect": max_cocycle,
        "trivial_bundle": bundles_equivalent(&c_hat, &CVec::zeros(m)),
        "pass": pass,
    });
    Ok((payload, if pass { 0 } else { 1 }))
}

/// Representation-model identities: homomorphism defects for the domain
/// and fiber models, the intertwining defect between them, and the fiber
/// integral normalization.
pub fn rep_check(norm: &NormalizedConfig, seed: u64) -> anyhow::Result<(Value, i32)> {
    const CASES: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = &norm.domain;
    let q = domain.q();
    let (n, m) = (domain.n(), domain.m());
    let xi = norm.xi.first().cloned().unwrap_or_else(|| norm.default_xi());
    let c = norm.c.clone();

    let holo = {
        let xi = xi.clone();
        HoloFn::new(move |p: &DomainPoint| {
            let phase: C64 = p
                .z
                .iter()
                .zip(xi.iter())
                .map(|(z, x)| C64::new(0.0, *x) * z)
                .sum();
            let affine: C64 = p.u.iter().sum();
            phase.exp() * (C64::new(1.0, 0.0) + affine)
        })
    };
    let fock = if m == 0 {
        FockFn::constant(C64::new(1.0, 0.0))
    } else {
        let mut terms = vec![(vec![0u32; m], C64::new(1.0, 0.0))];
        let mut first = vec![0u32; m];
        first[0] = 1;
        terms.push((first, C64::new(0.5, 0.25)));
        FockFn::poly(terms)
    };

    let mut pi_defect = 0.0f64;
    let mut v_defect = 0.0f64;
    let mut phi_max = 0.0f64;
    for _ in 0..CASES {
        let g1 = random_group(n, m, &mut rng);
        let g2 = random_group(n, m, &mut rng);
        let p = random_point(domain, &mut rng);
        let u = CVec::from_fn(m, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });

        let lhs = apply_pi_c(domain, &c, &compose(q, &g1, &g2)?, &holo, &p)?;
        let inner = {
            let domain = domain.clone();
            let c = c.clone();
            let g2 = g2.clone();
            let holo = holo.clone();
            HoloFn::new(move |pt: &DomainPoint| {
                apply_pi_c(&domain, &c, &g2, &holo, pt).expect("interior point")
            })
        };
        let rhs = apply_pi_c(domain, &c, &g1, &inner, &p)?;
        pi_defect = pi_defect.max((lhs - rhs).norm() / lhs.norm().max(1.0));

        let lhs = apply_v(q, &xi, &c, &compose(q, &g1, &g2)?, &fock, &u)?;
        let rhs = apply_v(q, &xi, &c, &g1, &v_fn(q, &xi, &c, &g2, &fock)?, &u)?;
        v_defect = v_defect.max((lhs - rhs).norm() / lhs.norm().max(1.0));

        phi_max = phi_max.max(phi_defect(domain, &xi, &c, &g1, &fock, &p)?);
    }

    let psi_error = if (1..=2).contains(&m) {
        let value = psi_st(q, &xi, &c, &c, &FockFn::constant(C64::new(1.0, 0.0)), &CVec::zeros(m))?;
        Some((value - C64::new(1.0, 0.0)).norm())
    } else {
        None
    };
    let reflexive = v_equivalent(q, &xi, &c, &c)?;

    let pass = pi_defect < IDENTITY_TOL
        && v_defect < IDENTITY_TOL
        && phi_max < IDENTITY_TOL
        && psi_error.map_or(true, |e| e < PSI_TOL)
        && reflexive;
    let payload = json!({
        "cases": CASES,
        "xi": rvec_json(&xi),
        "max_defects": {
            "domain_model_homomorphism": pi_defect,
            "fiber_model_homomorphism": v_defect,
            "intertwining": phi_max,
        },
        "fiber_integral_normalization_error": psi_error,
        "fiber_equivalence_reflexive": reflexive,
        "pass": pass,
    });
    Ok((payload, if pass { 0 } else { 1 }))
}

/// Kernel values at the configured points: diagonal at each, plus the
/// pair value for the first two points.
pub fn kernel(norm: &NormalizedConfig, nodes: usize) -> anyhow::Result<(Value, i32)> {
    let kq = KernelQuadrature::new(norm.domain.clone(), nodes)?;
    let points = if norm.points.is_empty() {
        vec![norm.domain.reference_point()]
    } else {
        norm.points.clone()
    };
    let mut diagonal = Vec::new();
    for (j, p) in points.iter().enumerate() {
        let kv = kq.kernel_eval(p, p)?;
        let mut entry = json!({
            "index": j,
            "value": cx(kv.value),
            "certified": kv.certified,
            "convergence_estimate": kv.convergence_estimate,
        });
        if norm.domain.n() == 1 {
            entry["closed_form"] = cx(kq.closed_form_n1(p, p)?);
        }
        diagonal.push(entry);
    }
    let pair = if points.len() >= 2 {
        let kv = kq.kernel_eval(&points[0], &points[1])?;
        json!({
            "value": cx(kv.value),
            "certified": kv.certified,
            "convergence_estimate": kv.convergence_estimate,
        })
    } else {
        Value::Null
    };
    Ok((json!({"diagonal": diagonal, "pair": pair}), 0))
}

/// Metric blocks at the configured points, with Hermitian and positivity
/// statistics of the assembled matrix.
pub fn metric(norm: &NormalizedConfig, nodes: usize) -> anyhow::Result<(Value, i32)> {
    let kq = KernelQuadrature::new(norm.domain.clone(), nodes)?;
    let points = if norm.points.is_empty() {
        vec![norm.domain.reference_point()]
    } else {
        norm.points.clone()
    };
    let mut entries = Vec::new();
    for (j, p) in points.iter().enumerate() {
        let blocks = kq.metric_blocks(p)?;
        let g = blocks.assemble();
        let (vals, _) = linalg::hermitian_eigen(&g);
        entries.push(json!({
            "index": j,
            "matrix": cmat_json(&g),
            "min_eigenvalue": vals[0],
            "hermitian_defect": linalg::hermitian_defect(&g),
            "max_imag_diagonal": blocks.max_imag(),
        }));
    }
    Ok((json!({"points": entries}), 0))
}

/// The exit code contract for multiplicity-freeness reports: agreement
/// (either way) exits 0, disagreement exits 2.
pub fn mf_exit_code(report: &MfReport) -> i32 {
    if report.consistent {
        0
    } else {
        2
    }
}

/// Cross-checked multiplicity-freeness report for the configured real
/// form.
pub fn mf_report(norm: &NormalizedConfig, nodes: usize, seed: u64) -> anyhow::Result<(Value, i32)> {
    let report = mf::mf_report(&norm.domain, &norm.w, nodes, seed)?;
    let witness = |w: Option<(usize, usize)>| match w {
        Some((a, b)) => json!([a, b]),
        None => Value::Null,
    };
    let payload = json!({
        "verdicts": {
            "i_orbit": report.i_orbit.verdict,
            "ii": report.ii.verdict,
            "iii_numeric": report.iii_numeric.as_ref().map(|c| c.verdict),
            "iv": report.iv.verdict,
            "v": report.v.verdict,
        },
        "certificates": {
            "i_orbit": {
                "checked": report.i_orbit.checked,
                "failing_xi": report.i_orbit.failing_xi,
            },
            "ii": {"max_im": report.ii.max_im, "witness": witness(report.ii.witness)},
            "iii_numeric": report.iii_numeric.as_ref().map(|c| json!({
                "max_defect": c.max_defect,
                "samples": c.samples,
            })),
            "iv": {"max_bracket": report.iv.max_bracket, "witness": witness(report.iv.witness)},
            "v": {
                "orbit_defect": report.v.orbit_defect,
                "obstruction": report.v.obstruction,
            },
        },
        "quadrature_skipped": report.iii_numeric.is_none(),
        "consistent": report.consistent,
        "verdict": report.verdict(),
    });
    Ok((payload, mf_exit_code(&report)))
}
