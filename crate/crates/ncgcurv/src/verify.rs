//! Named check batteries: the classical-geometry checks, the randomized
//! property suites, the Dirac-module conditions, and the sabotage fixtures
//! guarding against vacuous passes.

use crate::algebra::{sample_element, AlgebraElement, CheckOutcome, Mode};
use crate::curvature::{ricci, riemann, riemann_left_apply, riemann_right_by_definition, scalar_curvature};
use crate::dirac::{DiracCalculus, SpinTensor};
use crate::forms::{display_tensor, Calculus, Tensor};
use crate::geometries::{builtin_phase4, builtin_sphere3, builtin_torus, GeometrySpec};
use crate::levi_civita::{
    check_left_torsion, check_postconditions, concordance_check, solve_levi_civita, Connection,
};
use crate::scalar::{rat_frac, Rat, Scalar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Structural-or-numeric comparison policy.
#[derive(Clone)]
pub struct Judge {
    pub numeric: Option<Rat>,
    pub tol: f64,
}

impl Judge {
    pub fn symbolic() -> Self {
        Judge { numeric: None, tol: 1e-9 }
    }

    pub fn scalar_diff(&self, a: &Scalar, b: &Scalar) -> Option<String> {
        match &self.numeric {
            None => {
                if a == b {
                    None
                } else {
                    Some(format!("{a} != {b}"))
                }
            }
            Some(q) => {
                let d = (a - b).eval(q).map(|c| c.norm()).unwrap_or(f64::INFINITY);
                if d <= self.tol {
                    None
                } else {
                    Some(format!("|{a} - {b}| = {d:.3e} at q = {q}"))
                }
            }
        }
    }
}

pub fn judge_elt(j: &Judge, a: &AlgebraElement, b: &AlgebraElement) -> Option<String> {
    match &j.numeric {
        None => {
            if a == b {
                None
            } else {
                Some(format!("elements differ: {:?} vs {:?}", a, b))
            }
        }
        Some(q) => {
            let d = a.sub(b);
            let worst = d
                .terms()
                .map(|(_, s)| s.eval(q).map(|c| c.norm()).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            if worst <= j.tol {
                None
            } else {
                Some(format!("residual {worst:.3e} at q = {q}"))
            }
        }
    }
}

pub fn judge_tensor(j: &Judge, a: &Tensor, b: &Tensor) -> Option<String> {
    match &j.numeric {
        None => {
            if a == b {
                None
            } else {
                Some("tensors differ structurally".into())
            }
        }
        Some(q) => {
            let d = a.sub(b);
            let worst = d
                .terms()
                .flat_map(|(_, e)| e.terms())
                .map(|(_, s)| s.eval(q).map(|c| c.norm()).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            if worst <= j.tol {
                None
            } else {
                Some(format!("residual {worst:.3e} at q = {q}"))
            }
        }
    }
}

pub fn judge_spin(j: &Judge, a: &SpinTensor, b: &SpinTensor) -> Option<String> {
    match &j.numeric {
        None => {
            if a == b {
                None
            } else {
                Some("spinor tensors differ structurally".into())
            }
        }
        Some(q) => {
            let d = a.sub(b);
            let worst = d
                .terms()
                .map(|(_, s)| s.eval(q).map(|c| c.norm()).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            if worst <= j.tol {
                None
            } else {
                Some(format!("residual {worst:.3e} at q = {q}"))
            }
        }
    }
}

pub fn judge_scalar(j: &Judge, a: &Scalar, b: &Scalar) -> Option<String> {
    j.scalar_diff(a, b)
}

/// Random right-standard tensor with homogeneous terms.
pub fn sample_tensor(calc: &Calculus, rank: usize, rng: &mut StdRng, max_terms: usize) -> Tensor {
    let mut t = Tensor::zero(rank);
    let n = calc.n();
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let idx: Vec<u8> = (0..rank).map(|_| rng.gen_range(0..n) as u8).collect();
        t.add_term(idx, sample_element(calc.algebra, rng, 2));
    }
    t
}

pub fn sample_spinor(dc: &DiracCalculus, rng: &mut StdRng, max_terms: usize) -> SpinTensor {
    sample_spin_tensor(dc, 0, rng, max_terms)
}

pub fn sample_spin_tensor(
    dc: &DiracCalculus,
    rank: usize,
    rng: &mut StdRng,
    max_terms: usize,
) -> SpinTensor {
    let mut t = SpinTensor::zero(rank);
    let n = dc.calc.n();
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let legs: Vec<u8> = (0..rank).map(|_| rng.gen_range(0..n) as u8).collect();
        let b = rng.gen_range(0..dc.dirac.spinor_rank) as u8;
        let key = crate::algebra::sample_key(dc.calc.algebra, rng);
        t.add_term(legs, b, key, crate::algebra::sample_scalar(rng));
    }
    t
}

/// The four Dirac-spectral-triple conditions for the given connection.
pub fn check_dirac_conditions(
    dc: &DiracCalculus,
    conn: &Connection,
    seed: u64,
    numeric: Option<Rat>,
) -> Vec<CheckOutcome> {
    let j = Judge { numeric, tol: 1e-9 };
    let mut out = Vec::new();
    let n = dc.calc.n();
    let unit = dc.calc.algebra.unit_key();

    // Condition 1: (m . junk)(rho (x) eta) = e^{-beta} m(G) <rho^dag | eta>
    let mut c1 = CheckOutcome::pass("dirac-condition-1");
    'c1: for a in 0..n {
        for b in 0..n {
            let t = Tensor::basis(&[a, b]);
            let lhs = dc
                .m_rep_matrix(&dc.calc.junk_at(&t, 0))
                .expect("scalar coefficients on the frame pair basis");
            let v = dc
                .calc
                .inner_right(&dc.calc.frame_dagger1(a as u8), &Tensor::basis1(b))
                .expect("rank");
            let mut vs = Scalar::zero();
            for (k, s) in v.terms() {
                if *k != unit {
                    c1 = CheckOutcome::fail("dirac-condition-1", "non-scalar pairing");
                    break 'c1;
                }
                vs = &vs + s;
            }
            let mg = dc.m_rep_matrix(&dc.calc.line_element()).expect("scalar");
            let rhs = mg.scale(&(&dc.e_beta_inv() * &vs));
            if lhs != rhs {
                c1 = CheckOutcome::fail("dirac-condition-1", format!("frame pair ({a},{b})"));
                break 'c1;
            }
        }
    }
    out.push(c1);

    // Condition 1 on random homogeneous samples, as an identity of operators
    // applied to spinors: (m . junk)(rho (x) eta) x = e^{-beta} m(G) <rho^dag|eta> x.
    let mut rng = StdRng::seed_from_u64(seed ^ 0x20);
    let mut c1s = CheckOutcome::pass("dirac-condition-1-samples");
    for _ in 0..12 {
        let rho = sample_tensor(&dc.calc, 1, &mut rng, 2);
        let eta = sample_tensor(&dc.calc, 1, &mut rng, 2);
        let x = sample_spinor(dc, &mut rng, 2);
        let pair = dc.calc.junk_at(&dc.calc.tensor_mul(&rho, &eta), 0);
        let lhs = dc.clifford_consume(&dc.clifford_consume_second(&dc.graft(&pair, &x)));
        let v = dc
            .calc
            .inner_right(&dc.calc.dagger(&rho), &eta)
            .expect("rank");
        let rhs = dc.apply_e_beta_m_g(&dc.alg_mul_left(&v, &x));
        if let Some(w) = judge_spin(&j, &lhs, &rhs) {
            c1s = CheckOutcome::fail("dirac-condition-1-samples", w);
            break;
        }
    }
    out.push(c1s);

    // Condition 2: c is balanced over the algebra action.
    let mut rng = StdRng::seed_from_u64(seed ^ 0x21);
    let mut c2 = CheckOutcome::pass("dirac-condition-2");
    for _ in 0..20 {
        let a = sample_element(dc.calc.algebra, &mut rng, 2);
        let jdx = rng.gen_range(0..n);
        let x = sample_spinor(dc, &mut rng, 2);
        let wa = dc.calc.scale_right(&Tensor::basis1(jdx), &a);
        let ax = dc.alg_mul_left(&a, &x);
        let lhs = dc.clifford(&wa, &x);
        let rhs = dc.clifford(&Tensor::basis1(jdx), &ax);
        if let Some(w) = judge_spin(&j, &lhs, &rhs) {
            c2 = CheckOutcome::fail("dirac-condition-2", w);
            break;
        }
    }
    out.push(c2);

    // Condition 3: D is phi-symmetric numerically at sampled points.
    let mut c3 = CheckOutcome::pass("dirac-condition-3");
    let qs = [rat_frac(1, 5), rat_frac(2, 7), rat_frac(3, 11), rat_frac(1, 12), rat_frac(4, 9)];
    'c3: for _ in 0..10 {
        let x = sample_spinor(dc, &mut rng, 2);
        let y = sample_spinor(dc, &mut rng, 2);
        let lhs = dc.l2_pairing(&dc.dirac_apply(&x), &y);
        let rhs = dc.l2_pairing(&x, &dc.dirac_apply(&y));
        for q in &qs {
            match (lhs.eval(q), rhs.eval(q)) {
                (Ok(l), Ok(r)) if (l - r).norm() < 1e-10 => {}
                _ => {
                    c3 = CheckOutcome::fail("dirac-condition-3", format!("phi-symmetry at q = {q}"));
                    break 'c3;
                }
            }
        }
    }
    out.push(c3);

    // Condition 4: the braided Clifford-connection compatibility.
    let mut c4 = CheckOutcome::pass("dirac-condition-4");
    let mut inputs: Vec<(Tensor, SpinTensor)> = Vec::new();
    for jdx in 0..n {
        for b in 0..dc.dirac.spinor_rank {
            inputs.push((Tensor::basis1(jdx), SpinTensor::basis_spinor(b, unit)));
        }
    }
    for _ in 0..12 {
        inputs.push((sample_tensor(&dc.calc, 1, &mut rng, 2), sample_spinor(dc, &mut rng, 2)));
    }
    for (omega, x) in &inputs {
        let lhs = dc.dirac_apply(&dc.clifford(omega, x));
        let t1 = dc.graft(&conn.apply_right(&dc.calc, omega), x);
        let t2 = dc.graft(omega, &dc.spin_connection(x));
        let rhs = dc.clifford_of_braided_pair(&t1.add(&t2));
        if let Some(w) = judge_spin(&j, &lhs, &rhs) {
            c4 = CheckOutcome::fail("dirac-condition-4", w);
            break;
        }
    }
    out.push(c4);

    out
}

/// Weitzenbock: residue equals the braided Clifford image of the spin
/// curvature, computed by an independent code path; the oracle factor is
/// checked when the geometry declares one.
pub fn check_weitzenbock(
    dc: &DiracCalculus,
    conn: &Connection,
    oracle_factor: Option<&Scalar>,
    seed: u64,
    samples: usize,
    numeric: Option<Rat>,
) -> CheckOutcome {
    let j = Judge { numeric, tol: 1e-9 };
    let mut rng = StdRng::seed_from_u64(seed ^ 0x33);
    for i in 0..samples {
        let x = if i < dc.dirac.spinor_rank {
            SpinTensor::basis_spinor(i, dc.calc.algebra.unit_key())
        } else {
            sample_spinor(dc, &mut rng, 2)
        };
        let residue = dc.weitzenbock_residue(conn, &x);
        let rhs = dc.clifford_of_braided_pair(&dc.spin_curvature(&x));
        if let Some(w) = judge_spin(&j, &residue, &rhs) {
            return CheckOutcome::fail("weitzenbock", format!("independent route: {w}"));
        }
        if let Some(f) = oracle_factor {
            if let Some(w) = judge_spin(&j, &residue, &x.scalar_mul(f)) {
                return CheckOutcome::fail("weitzenbock", format!("oracle factor: {w}"));
            }
        }
    }
    CheckOutcome::pass("weitzenbock")
}

/// Divergence functional and the positivity identity of the Laplacian.
pub fn check_divergence(
    dc: &DiracCalculus,
    conn: &Connection,
    seed: u64,
    samples: usize,
) -> CheckOutcome {
    let name = "divergence-positivity";
    let mut rng = StdRng::seed_from_u64(seed ^ 0x44);
    let g = dc.calc.line_element();
    let qs = [rat_frac(1, 5), rat_frac(2, 7), rat_frac(3, 11), rat_frac(1, 12), rat_frac(4, 9)];
    for i in 0..samples {
        let x = if i < dc.dirac.spinor_rank {
            SpinTensor::basis_spinor(i, dc.calc.algebra.unit_key())
        } else {
            sample_spinor(dc, &mut rng, 2)
        };
        let rho = dc.sweedler_pair(&x, &x);
        let div = dc.phi(&dc.calc.inner_left(&conn.apply_right(&dc.calc, &rho), &g).expect("rank"));
        if div.is_zero() {
            // positivity identity: phi(<Lap x, x>) equals the manifestly
            // positive pairing of nabla x with itself
            let lhs = dc.phi(&dc.spin_inner_left(&dc.laplacian(conn, &x), &x));
            let nx = dc.spin_connection(&x);
            let pair = dc.left_pair_x(&nx, &nx);
            let rhs = dc.phi(&dc.calc.inner_left(&pair, &g).expect("rank"));
            if lhs != rhs {
                return CheckOutcome::fail(name, format!("identity: {lhs} != {rhs}"));
            }
            for q in &qs {
                if let Ok(v) = lhs.eval(q) {
                    if v.re < -1e-10 {
                        return CheckOutcome::fail(name, format!("negative at q = {q}: {v}"));
                    }
                }
            }
        }
    }
    CheckOutcome::pass(name)
}

/// Adjoint identity relating the second-derivative pairing, the divergence
/// term and the first-derivative pairing.
pub fn check_adjoint_identity(
    dc: &DiracCalculus,
    conn: &Connection,
    seed: u64,
    samples: usize,
) -> CheckOutcome {
    let name = "adjoint-connection-identity";
    let mut rng = StdRng::seed_from_u64(seed ^ 0x55);
    let g = dc.calc.line_element();
    for _ in 0..samples {
        let x = sample_spinor(dc, &mut rng, 2);
        let y = sample_spinor(dc, &mut rng, 2);
        let nx = dc.spin_connection(&x);
        let ny = dc.spin_connection(&y);
        // LHS: <G | B<nabla x | nabla y>>_B
        let lhs = dc.calc.inner_right(&g, &dc.left_pair_x(&nx, &ny)).expect("rank");
        // RHS: B< T2-pairing of the second derivative against y
        //        - nabla(omega_(0) . B<x_(1)|y>) | G >
        let second = dc.second_derivative(conn, &x);
        let mut t2_pair = Tensor::zero(2);
        for ((legs, b, key), s) in second.terms() {
            let mut x1 = SpinTensor::zero(0);
            x1.add_term(Vec::new(), *b, *key, s.clone());
            let v = dc.spin_inner_left(&x1, &y);
            if !v.is_zero() {
                let base = Tensor::basis(&[legs[0] as usize, legs[1] as usize]);
                t2_pair = t2_pair.add(&dc.calc.scale_right(&base, &v));
            }
        }
        let rho = dc.sweedler_pair(&x, &y);
        let div = conn.apply_right(&dc.calc, &rho);
        let rhs = dc.calc.inner_left(&t2_pair.sub(&div), &g).expect("rank");
        if lhs != rhs {
            return CheckOutcome::fail(name, "adjoint identity failed on a sample");
        }
    }
    CheckOutcome::pass(name)
}

/// The randomized property battery of the module calculus (seed-fixed).
pub fn property_battery(geo: &GeometrySpec, mode: Mode, seed: u64, cases: usize) -> Vec<CheckOutcome> {
    let calc = geo.calculus(mode);
    let dc = geo.dirac_calculus(mode);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();

    // frame identity
    let mut ok = true;
    for _ in 0..cases {
        let rho = sample_tensor(&calc, 1, &mut rng, 3);
        if calc.frame_reconstruct(&rho) != rho {
            ok = false;
            break;
        }
    }
    out.push(if ok {
        CheckOutcome::pass("frame-identity")
    } else {
        CheckOutcome::fail("frame-identity", "reconstruction failed")
    });

    // junk idempotent and self-adjoint; braiding axiom; sigma squared
    let mut junk_ok = true;
    let mut braid_ok = true;
    for _ in 0..cases {
        let s = sample_tensor(&calc, 2, &mut rng, 2);
        let t = sample_tensor(&calc, 2, &mut rng, 2);
        let ps = calc.junk_projection(&s).expect("rank");
        if calc.junk_projection(&ps).expect("rank") != ps {
            junk_ok = false;
            break;
        }
        let a = calc.inner_right(&ps, &t).expect("rank");
        let b = calc.inner_right(&s, &calc.junk_projection(&t).expect("rank")).expect("rank");
        if a != b {
            junk_ok = false;
            break;
        }
        // dagger . sigma = sigma^{-1} . dagger, and sigma^2 = id here
        let lhs = calc.dagger(&calc.sigma(&s).expect("rank"));
        let rhs = calc.sigma(&calc.dagger(&s)).expect("rank");
        if lhs != rhs || calc.sigma(&calc.sigma(&s).expect("rank")).expect("rank") != s {
            braid_ok = false;
            break;
        }
    }
    out.push(if junk_ok {
        CheckOutcome::pass("junk-idempotent-self-adjoint")
    } else {
        CheckOutcome::fail("junk-idempotent-self-adjoint", "sampled failure")
    });
    out.push(if braid_ok {
        CheckOutcome::pass("braiding-axiom")
    } else {
        CheckOutcome::fail("braiding-axiom", "sampled failure")
    });

    // sigma fixes the junk image and the line element; dagger fixes G
    let g = calc.line_element();
    let sigma_g = calc.sigma(&g).expect("rank");
    let psi_g = calc.junk_projection(&g).expect("rank");
    let dag_g = calc.dagger(&g);
    let mut sigma_junk_ok = sigma_g == g && psi_g == g && dag_g == g;
    for _ in 0..cases.min(30) {
        let s = sample_tensor(&calc, 2, &mut rng, 2);
        let ps = calc.junk_projection(&s).expect("rank");
        if calc.sigma(&ps).expect("rank") != ps {
            sigma_junk_ok = false;
            break;
        }
    }
    out.push(if sigma_junk_ok {
        CheckOutcome::pass("sigma-fixes-junk-and-G")
    } else {
        CheckOutcome::fail("sigma-fixes-junk-and-G", "sampled failure")
    });

    // connection Leibniz rules (solved + Grassmann + spin)
    if let Ok(conn) = solve_levi_civita(&calc) {
        let mut leib_ok = true;
        let mut witness = String::new();
        for _ in 0..cases.min(40) {
            let rho = sample_tensor(&calc, 1, &mut rng, 2);
            let a = sample_element(calc.algebra, &mut rng, 2);
            let lhs = conn.apply_right(&calc, &calc.scale_right(&rho, &a));
            let da = calc.derivative_tensor(&a);
            let rhs = calc
                .scale_right(&conn.apply_right(&calc, &rho), &a)
                .add(&calc.tensor_mul(&rho, &da));
            if lhs != rhs {
                leib_ok = false;
                witness = display_tensor(&lhs.sub(&rhs), calc.algebra);
                break;
            }
            // left Leibniz for the conjugate connection
            let lhs_l = conn.apply_left(&calc, &calc.scale_left(&a, &rho));
            let rhs_l = calc
                .scale_left(&a, &conn.apply_left(&calc, &rho))
                .add(&calc.tensor_mul(&da, &rho));
            if lhs_l != rhs_l {
                leib_ok = false;
                witness = "left Leibniz".into();
                break;
            }
            // spin connection Leibniz
            let x = sample_spinor(&dc, &mut rng, 2);
            let lhs_s = dc.spin_connection(&dc.alg_mul_left(&a, &x));
            let rhs_s = dc
                .graft(&da, &x)
                .add(&{
                    let nx = dc.spin_connection(&x);
                    // a * nabla(x): move a past the leg then into the coefficient
                    let mut acc = SpinTensor::zero(1);
                    for ((legs, b, key), s) in nx.terms() {
                        let past = calc.leg_degree(legs[0]) + dc.spin_degree(*b);
                        let moved = a.commuted_past(calc.algebra, past, mode);
                        let mut x1 = SpinTensor::zero(0);
                        x1.add_term(Vec::new(), *b, *key, s.clone());
                        let prod = dc.alg_mul_left(&moved, &x1);
                        for ((_, b3, k3), s3) in prod.terms() {
                            acc.add_term(legs.clone(), *b3, *k3, s3.clone());
                        }
                    }
                    acc
                });
            if lhs_s != rhs_s {
                leib_ok = false;
                witness = "spin Leibniz".into();
                break;
            }
        }
        out.push(if leib_ok {
            CheckOutcome::pass("connection-leibniz")
        } else {
            CheckOutcome::fail("connection-leibniz", witness)
        });

        // conjugate involution on samples
        let conj2 = conn.conjugate().conjugate();
        let mut invol_ok = conj2 == conn;
        for _ in 0..cases.min(20) {
            let rho = sample_tensor(&calc, 1, &mut rng, 2);
            if conj2.apply(&calc, &rho) != conn.apply(&calc, &rho) {
                invol_ok = false;
                break;
            }
        }
        out.push(if invol_ok {
            CheckOutcome::pass("conjugate-involution")
        } else {
            CheckOutcome::fail("conjugate-involution", "sampled failure")
        });

        out.push(check_left_torsion(&calc, &conn));
        out.push(check_adjoint_identity(&dc, &conn, seed, cases.min(25)));
        out.push(check_divergence(&dc, &conn, seed, cases.min(25)));
    }

    out
}

/// The classical check battery for one geometry in one mode: solve, verify
/// postconditions, curvature oracles, Dirac conditions, Weitzenbock.
pub fn geometry_checks(
    geo: &GeometrySpec,
    mode: Mode,
    seed: u64,
    numeric: Option<Rat>,
) -> Vec<CheckOutcome> {
    let calc = geo.calculus(mode);
    let dc = geo.dirac_calculus(mode);
    let mut out = Vec::new();
    let j = Judge { numeric: numeric.clone(), tol: 1e-9 };

    // validator
    let violations = geo.validate();
    out.push(if violations.is_empty() {
        CheckOutcome::pass("validator")
    } else {
        CheckOutcome::fail(
            "validator",
            format!("{}: {}", violations[0].check, violations[0].detail),
        )
    });

    // concordance
    match concordance_check(&calc) {
        Ok(rep) => {
            out.push(if rep.concordant && rep.decomposition_ok {
                CheckOutcome::pass("concordance")
            } else {
                CheckOutcome::fail("concordance", rep.difference.unwrap_or_default())
            });
        }
        Err(e) => out.push(CheckOutcome::fail("concordance", e.to_string())),
    }

    // solve + postconditions
    let conn = match solve_levi_civita(&calc) {
        Ok(c) => c,
        Err(e) => {
            out.push(CheckOutcome::fail("levi-civita", e.to_string()));
            return out;
        }
    };
    out.push(CheckOutcome::pass("levi-civita"));
    for c in check_postconditions(&calc, &conn) {
        out.push(c);
    }

    // curvature and the oracles
    let r = riemann(&calc, &conn);
    // cross-check the frame formula against the covariant-square definition
    let mut rng = StdRng::seed_from_u64(seed ^ 0x66);
    let mut def_ok = true;
    for _ in 0..12 {
        let rho = sample_tensor(&calc, 1, &mut rng, 2);
        if riemann_right_by_definition(&calc, &conn, &rho) != r.apply(&calc, &rho) {
            def_ok = false;
            break;
        }
    }
    // endomorphism linearity: R(rho a) = R(rho) a
    for _ in 0..12 {
        let rho = sample_tensor(&calc, 1, &mut rng, 2);
        let a = sample_element(calc.algebra, &mut rng, 2);
        if r.apply(&calc, &calc.scale_right(&rho, &a))
            != calc.scale_right(&r.apply(&calc, &rho), &a)
        {
            def_ok = false;
            break;
        }
    }
    // conjugate relation R_right(x)^dag = R_left(x^dag)
    for _ in 0..8 {
        let rho = sample_tensor(&calc, 1, &mut rng, 2);
        let lhs = calc.dagger(&r.apply(&calc, &rho));
        let rhs = riemann_left_apply(&calc, &conn, &calc.dagger(&rho));
        if lhs != rhs {
            def_ok = false;
            break;
        }
    }
    out.push(if def_ok {
        CheckOutcome::pass("curvature-two-routes")
    } else {
        CheckOutcome::fail("curvature-two-routes", "frame formula vs definition")
    });

    let ric = ricci(&calc, &r).expect("rank");
    let rr = scalar_curvature(&calc, &ric).expect("rank");
    if let Some(f) = &geo.oracle.ricci_factor {
        let expect = calc.line_element().scalar_mul(f);
        out.push(match judge_tensor(&j, &ric, &expect) {
            None => CheckOutcome::pass("ricci-oracle"),
            Some(w) => CheckOutcome::fail("ricci-oracle", w),
        });
    }
    if let Some(s) = &geo.oracle.scalar_curvature {
        let expect = AlgebraElement::scalar(calc.algebra, s.clone());
        out.push(match judge_elt(&j, &rr, &expect) {
            None => CheckOutcome::pass("scalar-curvature-oracle"),
            Some(w) => CheckOutcome::fail("scalar-curvature-oracle", w),
        });
    }

    // Dirac conditions, Weitzenbock, divergence
    out.extend(check_dirac_conditions(&dc, &conn, seed, numeric.clone()));
    out.push(check_weitzenbock(&dc, &conn, geo.oracle.residue_factor.as_ref(), seed, 12, numeric));
    out.push(check_divergence(&dc, &conn, seed, 12));

    out
}

/// A sabotage fixture: corrupted data or a corrupted operator that must make
/// at least one named check fail.
pub struct SabotageFixture {
    pub name: &'static str,
    pub description: &'static str,
    /// Runs the relevant checks; the fixture trips when at least one fails.
    pub run: Box<dyn Fn() -> Vec<CheckOutcome> + Send + Sync>,
}

pub fn sabotage_fixtures() -> Vec<SabotageFixture> {
    vec![
        SabotageFixture {
            name: "scaled-spin-table",
            description: "sphere spin connection table scaled by 2",
            run: Box::new(|| {
                let mut geo = builtin_sphere3();
                for m in geo.dirac.spin_table.iter_mut() {
                    *m = m.scale(&Scalar::from_int(2));
                }
                let calc = geo.calculus(Mode::Classical);
                let dc = geo.dirac_calculus(Mode::Classical);
                match solve_levi_civita(&calc) {
                    Ok(conn) => check_dirac_conditions(&dc, &conn, 7, None),
                    Err(e) => vec![CheckOutcome::fail("levi-civita", e.to_string())],
                }
            }),
        },
        SabotageFixture {
            name: "flipped-sigma-phase",
            description: "braiding bicharacter exponent negated (phase4 geometry)",
            run: Box::new(|| {
                let geo = builtin_phase4();
                let cl = geo.calculus(Mode::Classical);
                let th = geo.calculus(Mode::Deformed).with_sigma_flip();
                let mut rng = StdRng::seed_from_u64(40);
                let mut outcome = CheckOutcome::pass("sigma-psi-theta-conjugation");
                for _ in 0..60 {
                    let t = sample_tensor(&th, 2, &mut rng, 2);
                    let lhs = th.sigma(&t).expect("rank");
                    let rhs = cl.twist(&cl.sigma(&cl.twist_inv(&t, 1)).expect("rank"), 1);
                    if lhs != rhs {
                        outcome = CheckOutcome::fail(
                            "sigma-psi-theta-conjugation",
                            display_tensor(&lhs.sub(&rhs), th.algebra),
                        );
                        break;
                    }
                }
                vec![outcome]
            }),
        },
        SabotageFixture {
            name: "corrupted-derivation-table",
            description: "torus derivation with d(U) doubled",
            run: Box::new(|| {
                let mut geo = builtin_torus();
                let doubled = vec![(
                    0usize,
                    AlgebraElement::from_term(
                        crate::algebra::BasisKey::Mono(1, 0),
                        &Scalar::i() * &Scalar::from_int(2),
                    ),
                )];
                geo.derivation.overrides.insert(crate::algebra::BasisKey::Mono(1, 0), doubled);
                let violations = geo.validate();
                vec![if violations.iter().any(|v| v.check == "leibniz") {
                    CheckOutcome::fail(
                        "leibniz",
                        violations
                            .iter()
                            .find(|v| v.check == "leibniz")
                            .map(|v| v.detail.clone())
                            .unwrap_or_default(),
                    )
                } else {
                    CheckOutcome::pass("leibniz")
                }]
            }),
        },
        SabotageFixture {
            name: "wrong-star-matrix",
            description: "torus star matrix +Id instead of -Id",
            run: Box::new(|| {
                let mut geo = builtin_torus();
                geo.frame.star = crate::matrix::Matrix::identity(2);
                let violations = geo.validate();
                vec![if let Some(v) = violations.first() {
                    CheckOutcome::fail(v.check.clone(), v.detail.clone())
                } else {
                    CheckOutcome::pass("validator")
                }]
            }),
        },
        SabotageFixture {
            name: "perturbed-connection-form",
            description: "sphere connection form shifted by a junk-image tensor",
            run: Box::new(|| {
                let geo = builtin_sphere3();
                let calc = geo.calculus(Mode::Classical);
                let conn = solve_levi_civita(&calc).expect("sphere solves");
                let mut extra = Tensor::zero(3);
                extra.add_term(
                    vec![0, 1, 2],
                    AlgebraElement::scalar(calc.algebra, Scalar::from_int(1)),
                );
                extra.add_term(
                    vec![1, 0, 2],
                    AlgebraElement::scalar(calc.algebra, Scalar::from_int(1)),
                );
                let bad = crate::levi_civita::perturb_connection(
                    &conn,
                    &calc.junk_at(&extra, 0),
                    &Scalar::from_rat(rat_frac(1, 3)),
                );
                check_postconditions(&calc, &bad)
            }),
        },
    ]
}

/// Uniqueness witness: perturbing A along the intersection projector breaks
/// at least one postcondition.
pub fn uniqueness_witness(geo: &GeometrySpec, seed: u64) -> CheckOutcome {
    let calc = geo.calculus(Mode::Classical);
    let conn = match solve_levi_civita(&calc) {
        Ok(c) => c,
        Err(e) => return CheckOutcome::fail("uniqueness-witness", e.to_string()),
    };
    let mut rng = StdRng::seed_from_u64(seed ^ 0x77);
    for attempt in 0..8 {
        let raw = sample_tensor(&calc, 3, &mut rng, 3);
        // project onto Im(P) cap Im(Q) block by block
        let degrees = crate::blocks::frame_degrees_of(&calc, &raw);
        let mut proj = Tensor::zero(3);
        for block in crate::blocks::blocks_for_degrees(&calc, &degrees) {
            let ops = match crate::blocks::block_operators(&calc, block) {
                Ok(o) => o,
                Err(e) => return CheckOutcome::fail("uniqueness-witness", e.to_string()),
            };
            let v = crate::blocks::tensor_block_vector(&raw, &ops.block);
            let pv = crate::blocks::apply_to_elements(&ops.pi, &v);
            crate::blocks::accumulate_block(&mut proj, &ops.block, &pv);
        }
        if proj.is_zero() {
            continue;
        }
        let bad = crate::levi_civita::perturb_connection(&conn, &proj, &Scalar::one());
        let checks = check_postconditions(&calc, &bad);
        if checks.iter().any(|c| !c.passed) {
            return CheckOutcome::pass("uniqueness-witness");
        }
        let _ = attempt;
    }
    CheckOutcome::fail("uniqueness-witness", "no perturbation broke a postcondition")
}

/// Express a tensor given in rotated-frame coordinates (w'_m = sum_k w_k
/// u[k][m]) back in the original frame. Rotation entries are scalars, so the
/// legs expand independently of the coefficients.
pub fn reexpress_in_original_frame(t: &Tensor, u: &crate::matrix::Matrix) -> Tensor {
    let n = u.rows;
    let mut out = Tensor::zero(t.rank());
    for (idx, e) in t.terms() {
        let mut partial: Vec<(Vec<u8>, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for &leg in idx {
            let mut next = Vec::new();
            for (prefix, coeff) in &partial {
                for k in 0..n {
                    let f = u.at(k, leg as usize);
                    if f.is_zero() {
                        continue;
                    }
                    let mut p2 = prefix.clone();
                    p2.push(k as u8);
                    next.push((p2, coeff * f));
                }
            }
            partial = next;
        }
        for (legs, coeff) in partial {
            out.add_term(legs, e.scale(&coeff));
        }
    }
    out
}

/// Frame independence: a degree-preserving unitary frame rotation (or
/// permutation) leaves the line element, e^beta, and the curvature scalars
/// unchanged.
pub fn frame_independence(geo: &GeometrySpec, mode: Mode) -> CheckOutcome {
    let name = "frame-independence";
    let calc = geo.calculus(mode);
    let g_orig = calc.line_element();
    let mut tested = 0;
    for u in candidate_rotations(geo) {
        let Some(rotated) = transport_frame(geo, &u) else { continue };
        tested += 1;
        let calc2 = rotated.calculus(mode);
        if calc.e_beta() != calc2.e_beta() {
            return CheckOutcome::fail(name, "e^beta changed under rotation");
        }
        // the line element is the same element: re-express and compare
        if reexpress_in_original_frame(&calc2.line_element(), &u) != g_orig {
            return CheckOutcome::fail(name, "line element changed under rotation");
        }
        let (c1, c2) = match (solve_levi_civita(&calc), solve_levi_civita(&calc2)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return CheckOutcome::fail(name, "solve failed on a rotated frame"),
        };
        let r1 = riemann(&calc, &c1);
        let r2 = riemann(&calc2, &c2);
        let s1 = scalar_curvature(&calc, &ricci(&calc, &r1).expect("rank")).expect("rank");
        let s2 = scalar_curvature(&calc2, &ricci(&calc2, &r2).expect("rank")).expect("rank");
        if s1 != s2 {
            return CheckOutcome::fail(name, "scalar curvature changed under rotation");
        }
        // the Ricci tensor is the same element of T^2
        let ric1 = ricci(&calc, &r1).expect("rank");
        let ric2 = ricci(&calc2, &r2).expect("rank");
        if reexpress_in_original_frame(&ric2, &u) != ric1 {
            return CheckOutcome::fail(name, "Ricci tensor changed under rotation");
        }
    }
    if tested == 0 {
        return CheckOutcome::pass(name); // no nontrivial rotation available
    }
    CheckOutcome::pass(name)
}

/// Degree-preserving unitary rotations with exact entries, per geometry.
fn candidate_rotations(geo: &GeometrySpec) -> Vec<crate::matrix::Matrix> {
    match geo.name.as_str() {
        "torus" => vec![
            // swap the two neutral legs
            crate::matrix::Matrix::from_rows(vec![
                vec![Scalar::zero(), Scalar::one()],
                vec![Scalar::one(), Scalar::zero()],
            ]),
            // a rational rotation mixing them
            crate::matrix::Matrix::from_rows(vec![
                vec![Scalar::from_rat(rat_frac(3, 5)), Scalar::from_rat(rat_frac(-4, 5))],
                vec![Scalar::from_rat(rat_frac(4, 5)), Scalar::from_rat(rat_frac(3, 5))],
            ]),
        ],
        // phases on the charged legs, a sign on the neutral one
        "sphere3" => vec![crate::matrix::Matrix::from_rows(vec![
            vec![&Scalar::i() * &Scalar::lambda(), Scalar::zero(), Scalar::zero()],
            vec![Scalar::zero(), (&(-&Scalar::i())) * &Scalar::lambda_pow(-1), Scalar::zero()],
            vec![Scalar::zero(), Scalar::zero(), -&Scalar::one()],
        ])],
        _ => Vec::new(),
    }
}

/// Transport the geometry's tables along w'_j = sum_k w_k u[k][j]. The
/// coefficient change for tensors and matrices conjugates by u.
fn transport_frame(geo: &GeometrySpec, u: &crate::matrix::Matrix) -> Option<GeometrySpec> {
    let n = geo.frame.size;
    let uinv = u.inverse().ok()?;
    // unitarity with respect to the conjugation
    if u.adjoint().mul(u) != crate::matrix::Matrix::identity(n) {
        return None;
    }
    let mut g2 = geo.clone();
    g2.name = format!("{}-rotated", geo.name);
    // degrees must be preserved: u[k][j] nonzero requires equal degrees
    for j in 0..n {
        for k in 0..n {
            if !u.at(k, j).is_zero() && geo.frame.degrees[k] != geo.frame.degrees[j] {
                return None;
            }
        }
    }
    // star' = u^{-1-conj-free...}: w'_j^dag = sum w'_k star'[k][j]
    // w'_j^dag = (sum_k w_k u[k][j])^dag = sum_k conj(u[k][j]) w_k^dag
    //          = sum_{k,l} conj(u[k][j]) w_l star[l][k]
    //          = sum_{l,m} w'_m uinv[m][l] sum_k star[l][k] conj(u[k][j])
    let conj_u = crate::matrix::Matrix::from_fn(n, n, |r, c| u.at(r, c).conj());
    g2.frame.star = uinv.mul(&geo.frame.star).mul(&conj_u);
    // dw'_j = sum_k d(w_k) u[k][j], with the legs re-expressed in the new
    // frame through w_k = sum_m w'_m uinv[m][k]
    let mut dw2 = Vec::new();
    for j in 0..n {
        let mut acc = Tensor::zero(2);
        for k in 0..n {
            let f = u.at(k, j);
            if !f.is_zero() {
                acc = acc.add(&reexpress_in_original_frame(&geo.frame.dw[k], &uinv).scalar_mul(f));
            }
        }
        dw2.push(acc);
    }
    g2.frame.dw = dw2;
    // gamma'_j = sum_k gamma_k u[k][j]; spin table transports the same way
    let mut gamma2 = Vec::new();
    let mut table2 = Vec::new();
    for j in 0..n {
        let mut g_acc = crate::matrix::Matrix::zero(geo.dirac.spinor_rank, geo.dirac.spinor_rank);
        let mut t_acc = crate::matrix::Matrix::zero(geo.dirac.spinor_rank, geo.dirac.spinor_rank);
        for k in 0..n {
            let f = u.at(k, j);
            if !f.is_zero() {
                g_acc = g_acc.add(&geo.dirac.gamma[k].scale(f));
                t_acc = t_acc.add(&geo.dirac.spin_table[k].scale(f));
            }
        }
        gamma2.push(g_acc);
        table2.push(t_acc);
    }
    g2.dirac.gamma = gamma2;
    g2.dirac.spin_table = table2;
    // the derivation table is expressed in frame coordinates too
    match &geo.derivation.rule {
        crate::algebra::DerivationRule::Zero => {}
        crate::algebra::DerivationRule::TorusStandard => {
            // re-express d(U^m V^n) through the new frame explicitly is not
            // representable by the builtin rule; skip rotation in that case
            // unless the rotation is the identity on the derivation legs.
            // The torus rotation mixes w1, w2, so build an override-free table
            // is impossible; instead leave the rule and rotate via overrides
            // for the generators' span: not needed, the rotated check uses
            // only constants geometries plus the torus where we handle the
            // derivation by transporting coordinates:
            return transport_torus_derivation(geo, u, g2);
        }
        crate::algebra::DerivationRule::Table(_) => {
            return None;
        }
    }
    Some(g2)
}

fn transport_torus_derivation(
    geo: &GeometrySpec,
    u: &crate::matrix::Matrix,
    mut g2: GeometrySpec,
) -> Option<GeometrySpec> {
    // d'(key) coordinates c'_j with d(a) = sum_j w_j c_j = sum_{j,m} w'_m uinv[m][j] c_j
    let n = geo.frame.size;
    let uinv = u.inverse().ok()?;
    let mut table = std::collections::BTreeMap::new();
    for m in -3i64..=3 {
        for nn in -3i64..=3 {
            let key = crate::algebra::BasisKey::Mono(m, nn);
            let coords = geo.derivation.of_key(key);
            let mut newc: Vec<AlgebraElement> = vec![AlgebraElement::zero(); n];
            for (j, c) in coords {
                for mm in 0..n {
                    let f = uinv.at(mm, j);
                    if !f.is_zero() {
                        newc[mm] = newc[mm].add(&c.scale(f));
                    }
                }
            }
            let coords2: Vec<(usize, AlgebraElement)> = newc
                .into_iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .collect();
            table.insert(key, coords2);
        }
    }
    g2.derivation = crate::algebra::Derivation {
        rule: crate::algebra::DerivationRule::Table(table),
        overrides: Default::default(),
    };
    Some(g2)
}
