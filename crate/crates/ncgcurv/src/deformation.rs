//! The twist-deformation comparison maps and the verification suite for the
//! naturality and invariance identities: each named check evaluates one exact
//! identity in the formal phase, on the frame basis and on seeded random
//! samples.

use crate::algebra::{bicharacter, sample_scalar, AlgebraElement, CheckOutcome, Degree, Mode};
use crate::curvature::{ricci, riemann, riemann_left_apply, scalar_curvature};
use crate::dirac::{DiracCalculus, SpinTensor};
use crate::forms::{Calculus, Tensor};
use crate::geometries::GeometrySpec;
use crate::levi_civita::{solve_levi_civita, Connection, SolveError};
use crate::scalar::{Rat, Scalar};
use crate::verify::{judge_elt, judge_spin, judge_tensor, sample_spinor, sample_tensor, Judge};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Deform a solved classical connection: the action becomes the twist image
/// of the classical action, so the deformed connection form is re-assembled
/// from the twisted frame values.
pub fn deform_connection(
    cl: &Calculus,
    th: &Calculus,
    conn: &Connection,
) -> Connection {
    assert_eq!(conn.mode, Mode::Classical);
    let mut a = Tensor::zero(3);
    for j in 0..cl.n() {
        let nabla_j = cl.twist(&conn.apply_right(cl, &Tensor::basis1(j)), 1);
        a = a.add(&th.tensor_mul(&nabla_j, &th.frame_dagger1(j as u8)));
    }
    Connection {
        chirality: conn.chirality,
        mode: Mode::Deformed,
        a_form: a,
        pi_dims: conn.pi_dims.clone(),
    }
}

/// Everything the theta checks need, solved once.
pub struct ThetaContext<'g> {
    pub geo: &'g GeometrySpec,
    pub cl: Calculus<'g>,
    pub th: Calculus<'g>,
    pub conn_cl: Connection,
    pub conn_th: Connection,
    pub conn_deformed: Connection,
    pub seed: u64,
    pub samples: usize,
    /// When set, identities are judged numerically at L = e^{2 pi i q}.
    pub numeric: Option<Rat>,
}

impl<'g> ThetaContext<'g> {
    pub fn new(
        geo: &'g GeometrySpec,
        seed: u64,
        samples: usize,
        numeric: Option<Rat>,
    ) -> Result<Self, SolveError> {
        let cl = geo.calculus(Mode::Classical);
        let th = geo.calculus(Mode::Deformed);
        let conn_cl = solve_levi_civita(&cl)?;
        let conn_th = solve_levi_civita(&th)?;
        let conn_deformed = deform_connection(&cl, &th, &conn_cl);
        Ok(ThetaContext { geo, cl, th, conn_cl, conn_th, conn_deformed, seed, samples, numeric })
    }

    fn judge(&self) -> Judge {
        Judge { numeric: self.numeric.clone(), tol: 1e-9 }
    }

    fn rng(&self, salt: u64) -> StdRng {
        StdRng::seed_from_u64(self.seed ^ salt)
    }

    fn dirac_cl(&self) -> DiracCalculus<'g> {
        DiracCalculus::new(self.cl, &self.geo.dirac)
    }

    fn dirac_th(&self) -> DiracCalculus<'g> {
        DiracCalculus::new(self.th, &self.geo.dirac)
    }
}

pub fn theta_check_names() -> Vec<&'static str> {
    vec![
        "theta-cocycle-bicharacter",
        "deformed-module-structure",
        "tee-theta-inner-products",
        "h-theta-coherence",
        "dee-theta",
        "sigma-psi-theta-conjugation",
        "dag-theta",
        "herm-theta",
        "tf-theta",
        "deformed-uniqueness",
        "curv-theta-riemann",
        "curv-theta-ricci",
        "curv-theta-scalar",
        "contraction-4",
        "contraction-3",
        "invariant-c",
        "well-defined-pieces",
        "deformed-dirac-conditions",
        "deformed-weitzenbock",
        "cliff-R-inv",
        "laplacian-invariance",
    ]
}

/// Run every theta identity check, fanning the independent ones out over the
/// worker pool; the returned list is keyed by check name.
pub fn verify_theta_theorems(ctx: &ThetaContext) -> Vec<CheckOutcome> {
    type CheckFn = for<'a, 'b> fn(&'a ThetaContext<'b>) -> Vec<CheckOutcome>;
    let checks: Vec<CheckFn> = vec![
        |c| vec![check_bicharacter(c)],
        |c| vec![check_deformed_module(c)],
        |c| vec![check_tee_theta(c)],
        |c| vec![check_h_coherence(c)],
        |c| vec![check_dee_theta(c)],
        |c| vec![check_sigma_psi_conjugation(c)],
        |c| vec![check_dag_theta(c)],
        |c| vec![check_herm_theta(c)],
        |c| vec![check_tf_theta(c)],
        |c| vec![check_deformed_uniqueness(c)],
        check_curv_theta,
        |c| vec![check_contraction_4(c)],
        |c| vec![check_contraction_3(c)],
        |c| vec![check_invariant_c(c)],
        |c| vec![check_well_defined_pieces(c)],
        |c| {
            crate::verify::check_dirac_conditions(
                &c.dirac_th(),
                &c.conn_th,
                c.seed,
                c.numeric.clone(),
            )
            .into_iter()
            .map(|mut o| {
                o.name = format!("deformed-{}", o.name);
                o
            })
            .collect()
        },
        |c| vec![check_deformed_weitzenbock(c)],
        |c| vec![check_cliff_r_invariance(c)],
        |c| vec![check_laplacian_invariance(c)],
    ];
    crate::par::maybe_par_map(checks, |f| f(ctx)).into_iter().flatten().collect()
}

fn check_bicharacter(ctx: &ThetaContext) -> CheckOutcome {
    let name = "theta-cocycle-bicharacter";
    let j = ctx.judge();
    let mut rng = ctx.rng(0x01);
    // pinned values from the exponent formula
    if bicharacter(Degree::new(1, 0), Degree::new(0, 1)) != Scalar::lambda_pow(-1) {
        return CheckOutcome::fail(name, "Theta((1,0),(0,1)) != L^-1");
    }
    if bicharacter(Degree::new(1, -1), Degree::new(-1, 1)) != Scalar::one() {
        return CheckOutcome::fail(name, "Theta((1,-1),(-1,1)) != 1");
    }
    for _ in 0..ctx.samples {
        let d = |rng: &mut StdRng| Degree::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let (a, b, c) = (d(&mut rng), d(&mut rng), d(&mut rng));
        let lhs = bicharacter(a + b, c);
        let rhs = &bicharacter(a, c) * &bicharacter(b, c);
        if let Some(w) = j.scalar_diff(&lhs, &rhs) {
            return CheckOutcome::fail(name, format!("additivity: {w}"));
        }
        if let Some(w) = j.scalar_diff(&(&bicharacter(a, b) * &bicharacter(b, a)), &Scalar::one()) {
            return CheckOutcome::fail(name, format!("antisymmetry: {w}"));
        }
        if bicharacter(a, a) != Scalar::one() {
            return CheckOutcome::fail(name, format!("Theta({a},{a}) != 1"));
        }
    }
    CheckOutcome::pass(name)
}

fn check_deformed_module(ctx: &ThetaContext) -> CheckOutcome {
    let name = "deformed-module-structure";
    let mut rng = ctx.rng(0x02);
    for _ in 0..ctx.samples {
        let a = crate::algebra::sample_element(ctx.th.algebra, &mut rng, 2);
        let b = crate::algebra::sample_element(ctx.th.algebra, &mut rng, 2);
        let x = sample_tensor(&ctx.th, 1, &mut rng, 2);
        // (a * x) * b = a * (x * b)
        let lhs = ctx.th.scale_right(&ctx.th.scale_left(&a, &x), &b);
        let rhs = ctx.th.scale_left(&a, &ctx.th.scale_right(&x, &b));
        if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

/// The twisted inner product of the tensor square viewed as a single graded
/// module: per homogeneous term pair, the classical pairing scaled by
/// L^{(n1(u) - n1(v)) n2(u)}.
fn flat_theta_inner(cl: &Calculus, s: &Tensor, t: &Tensor) -> AlgebraElement {
    let mut acc = AlgebraElement::zero();
    for (i, a) in s.terms() {
        for (jx, b) in t.terms() {
            if i != jx {
                continue;
            }
            for (ka, sa) in a.terms() {
                for (kb, sb) in b.terms() {
                    let du = cl.term_degree(i, *ka);
                    let dv = cl.term_degree(jx, *kb);
                    let phase = Scalar::lambda_pow((du.n1 - dv.n1) * du.n2);
                    let mut ea = AlgebraElement::from_term(*ka, sa.clone());
                    let eb = AlgebraElement::from_term(*kb, sb.clone());
                    ea = ea.star(cl.algebra, Mode::Classical);
                    let prod = ea.mul(&eb, cl.algebra, Mode::Classical).scale(&phase);
                    acc = acc.add(&prod);
                }
            }
        }
    }
    acc
}

fn check_tee_theta(ctx: &ThetaContext) -> CheckOutcome {
    let name = "tee-theta-inner-products";
    let mut rng = ctx.rng(0x03);
    for _ in 0..ctx.samples.max(100) {
        let s = sample_tensor(&ctx.cl, 2, &mut rng, 2);
        let t = sample_tensor(&ctx.cl, 2, &mut rng, 2);
        let lhs = ctx
            .th
            .inner_right(&ctx.cl.twist(&s, 1), &ctx.cl.twist(&t, 1))
            .expect("rank");
        let rhs = flat_theta_inner(&ctx.cl, &s, &t);
        if let Some(w) = judge_elt(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
        // invertibility: twist_inv . twist = id
        if ctx.cl.twist_inv(&ctx.cl.twist(&s, 1), 1) != s {
            return CheckOutcome::fail(name, "twist not invertible");
        }
    }
    CheckOutcome::pass(name)
}

fn check_h_coherence(ctx: &ThetaContext) -> CheckOutcome {
    let name = "h-theta-coherence";
    let mut rng = ctx.rng(0x04);
    for _ in 0..ctx.samples.max(100) {
        let t = sample_tensor(&ctx.cl, 3, &mut rng, 2);
        let direct = ctx.cl.twist3(&t);
        // (1 (x) T) . T_{X, Y(x)Z}
        let route_a = ctx.cl.twist_span(&ctx.cl.twist(&t, 1), 1..2, 2..3, true);
        // (T (x) 1) . T_{X(x)Y, Z}
        let route_b = ctx.cl.twist_span(&ctx.cl.twist(&t, 2), 0..1, 1..2, false);
        if direct != route_a || direct != route_b {
            return CheckOutcome::fail(name, "composite routes disagree");
        }
    }
    CheckOutcome::pass(name)
}

fn check_dee_theta(ctx: &ThetaContext) -> CheckOutcome {
    let name = "dee-theta";
    let mut rng = ctx.rng(0x05);
    for _ in 0..ctx.samples {
        let x = sample_tensor(&ctx.cl, 1, &mut rng, 2);
        let lhs = ctx.th.exterior_d(&ctx.cl.rank1_to_deformed(&x)).expect("rank 1");
        let rhs = ctx.cl.twist(&ctx.cl.exterior_d(&x).expect("rank 1"), 1);
        if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

fn check_sigma_psi_conjugation(ctx: &ThetaContext) -> CheckOutcome {
    let name = "sigma-psi-theta-conjugation";
    let mut rng = ctx.rng(0x06);
    for _ in 0..ctx.samples {
        let t = sample_tensor(&ctx.th, 2, &mut rng, 2);
        let back = ctx.cl.twist_inv(&t, 1);
        let sigma_rhs = ctx.cl.twist(&ctx.cl.sigma(&back).expect("rank"), 1);
        let sigma_lhs = ctx.th.sigma(&t).expect("rank");
        if let Some(w) = judge_tensor(&ctx.judge(), &sigma_lhs, &sigma_rhs) {
            return CheckOutcome::fail(name, format!("sigma: {w}"));
        }
        let junk_rhs = ctx.cl.twist(&ctx.cl.junk_projection(&back).expect("rank"), 1);
        let junk_lhs = ctx.th.junk_projection(&t).expect("rank");
        if let Some(w) = judge_tensor(&ctx.judge(), &junk_lhs, &junk_rhs) {
            return CheckOutcome::fail(name, format!("junk: {w}"));
        }
    }
    CheckOutcome::pass(name)
}

fn check_dag_theta(ctx: &ThetaContext) -> CheckOutcome {
    let name = "dag-theta";
    let mut rng = ctx.rng(0x07);
    for _ in 0..ctx.samples {
        let t = sample_tensor(&ctx.th, 2, &mut rng, 2);
        let lhs = ctx.th.dagger(&t);
        // T . dag_{2,theta} . T^{-1}: the twisted dagger of the plain tensor
        // square is the classical dagger followed by the total-degree phase
        // (the phase of the input term equals that of its dagger image).
        let back = ctx.cl.twist_inv(&t, 1);
        let phased = ctx.cl.phase_map(&ctx.cl.dagger(&back), |idx, key| {
            let n = ctx.cl.term_degree(idx, key);
            n.n1 * n.n2
        });
        let rhs = ctx.cl.twist(&phased, 1);
        if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

fn check_herm_theta(ctx: &ThetaContext) -> CheckOutcome {
    let name = "herm-theta";
    let g = ctx.th.line_element();
    let mut acc = Tensor::zero(3);
    for (idx, a) in g.terms() {
        let mut tail = Tensor::zero(1);
        tail.add_term(vec![idx[1]], a.clone());
        acc = acc.add(&ctx.th.tensor_mul(
            &ctx.conn_deformed.apply_right(&ctx.th, &Tensor::basis1(idx[0] as usize)),
            &tail,
        ));
        acc = acc.add(&ctx.th.tensor_mul(
            &Tensor::basis1(idx[0] as usize),
            &ctx.conn_deformed.apply_left(&ctx.th, &tail),
        ));
    }
    match judge_tensor(&ctx.judge(), &acc, &Tensor::zero(3)) {
        None => CheckOutcome::pass(name),
        Some(w) => CheckOutcome::fail(name, w),
    }
}

fn check_tf_theta(ctx: &ThetaContext) -> CheckOutcome {
    let name = "tf-theta";
    let mut rng = ctx.rng(0x08);
    let mut samples: Vec<Tensor> = (0..ctx.th.n()).map(Tensor::basis1).collect();
    for _ in 0..ctx.samples.min(16) {
        samples.push(sample_tensor(&ctx.th, 1, &mut rng, 2));
    }
    for rho in &samples {
        let lhs = ctx.th.co_junk_at(&ctx.conn_deformed.apply_right(&ctx.th, rho), 0);
        let rhs = ctx.th.exterior_d(rho).expect("rank 1").neg();
        if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

fn check_deformed_uniqueness(ctx: &ThetaContext) -> CheckOutcome {
    let name = "deformed-uniqueness";
    if let Some(w) = judge_tensor(&ctx.judge(), &ctx.conn_th.a_form, &ctx.conn_deformed.a_form) {
        return CheckOutcome::fail(name, format!("connection forms differ: {w}"));
    }
    let mut rng = ctx.rng(0x09);
    for _ in 0..ctx.samples.min(20) {
        let rho = sample_tensor(&ctx.th, 1, &mut rng, 2);
        let lhs = ctx.conn_th.apply_right(&ctx.th, &rho);
        let rhs = ctx.conn_deformed.apply_right(&ctx.th, &rho);
        if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, format!("actions differ: {w}"));
        }
    }
    CheckOutcome::pass(name)
}

fn check_curv_theta(ctx: &ThetaContext) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let j = ctx.judge();

    // R_theta(rho) = H_theta(R(rho)) for the left Levi-Civita connections
    let mut rng = ctx.rng(0x0A);
    let mut ok = true;
    let mut witness = String::new();
    let mut samples: Vec<Tensor> = (0..ctx.cl.n()).map(Tensor::basis1).collect();
    for _ in 0..ctx.samples.min(12) {
        samples.push(sample_tensor(&ctx.cl, 1, &mut rng, 2));
    }
    for rho in &samples {
        let lhs = riemann_left_apply(&ctx.th, &ctx.conn_th, &ctx.cl.rank1_to_deformed(rho));
        let rhs = ctx.cl.twist3(&riemann_left_apply(&ctx.cl, &ctx.conn_cl, rho));
        if let Some(w) = judge_tensor(&j, &lhs, &rhs) {
            ok = false;
            witness = w;
            break;
        }
    }
    out.push(if ok {
        CheckOutcome::pass("curv-theta-riemann")
    } else {
        CheckOutcome::fail("curv-theta-riemann", witness)
    });

    // Ric_theta = T_theta(Ric), r_theta = r
    let r_cl = riemann(&ctx.cl, &ctx.conn_cl);
    let r_th = riemann(&ctx.th, &ctx.conn_th);
    let ric_cl = ricci(&ctx.cl, &r_cl).expect("rank");
    let ric_th = ricci(&ctx.th, &r_th).expect("rank");
    out.push(match judge_tensor(&j, &ric_th, &ctx.cl.twist(&ric_cl, 1)) {
        None => CheckOutcome::pass("curv-theta-ricci"),
        Some(w) => CheckOutcome::fail("curv-theta-ricci", w),
    });
    let s_cl = scalar_curvature(&ctx.cl, &ric_cl).expect("rank");
    let s_th = scalar_curvature(&ctx.th, &ric_th).expect("rank");
    out.push(match judge_elt(&j, &s_th, &s_cl) {
        None => CheckOutcome::pass("curv-theta-scalar"),
        Some(w) => CheckOutcome::fail("curv-theta-scalar", w),
    });
    out
}

fn check_contraction_4(ctx: &ThetaContext) -> CheckOutcome {
    let name = "contraction-4";
    let n = ctx.cl.n();
    let g_cl = ctx.cl.line_element();
    let g_th = ctx.th.line_element();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let total = ctx
                        .cl
                        .idx_degree(&[a as u8, b as u8, c as u8, d as u8]);
                    if !total.is_zero() {
                        continue;
                    }
                    // LHS: left-pair the tail of H(w_a (x) w_b (x) w_c) (x)_th w_d against G_th
                    let h = ctx.cl.twist3(&Tensor::basis(&[a, b, c]));
                    let t4 = ctx.th.tensor_mul(&h, &Tensor::basis1(d));
                    let mut lhs = Tensor::zero(2);
                    for (idx, e) in t4.terms() {
                        let mut tail = Tensor::zero(2);
                        tail.add_term(vec![idx[2], idx[3]], e.clone());
                        let v = ctx.th.inner_left(&tail, &g_th).expect("rank");
                        if !v.is_zero() {
                            lhs.add_term(vec![idx[0], idx[1]], v);
                        }
                    }
                    // RHS: T(w_a (x) w_b) . <w_c (x) w_d | G>_classical, carrying
                    // the twisted-adjoint phase of the fourth leg (which the
                    // shipped test pins; it is invisible when that leg is
                    // neutral, and cancels against frame daggers in the Ricci
                    // naturality application).
                    let v0 = ctx
                        .cl
                        .inner_left(&Tensor::basis(&[c, d]), &g_cl)
                        .expect("rank");
                    let dt = ctx.cl.leg_degree(d as u8);
                    let rhs = ctx
                        .th
                        .scale_right(&ctx.cl.twist(&Tensor::basis(&[a, b]), 1), &v0)
                        .scalar_mul(&Scalar::lambda_pow(-dt.n1 * dt.n2));
                    if let Some(w) = judge_tensor(&ctx.judge(), &lhs, &rhs) {
                        return CheckOutcome::fail(name, format!("({a},{b},{c},{d}): {w}"));
                    }
                }
            }
        }
    }
    CheckOutcome::pass(name)
}

fn check_contraction_3(ctx: &ThetaContext) -> CheckOutcome {
    let name = "contraction-3";
    let dcl = ctx.dirac_cl();
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x0B);
    let n = ctx.cl.n();
    for _ in 0..ctx.samples.min(25) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let x = sample_spinor(&dcl, &mut rng, 2);
        let classical = dcl.graft(&Tensor::basis(&[a, b]), &x);
        let lhs = dth.g_pair_spin(&dth.twist3_spin(&classical));
        let v = ctx.cl.inner_right(&ctx.cl.line_element(), &Tensor::basis(&[a, b])).expect("rank");
        let rhs = dth.spin0_to_deformed(&dcl.alg_mul_left(&v, &x));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, format!("({a},{b}): {w}"));
        }
    }
    CheckOutcome::pass(name)
}

fn check_invariant_c(ctx: &ThetaContext) -> CheckOutcome {
    let name = "invariant-c";
    let dcl = ctx.dirac_cl();
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x0C);
    let n = ctx.cl.n();
    // (1) m = m_theta . T_theta and (2) g = g_theta . T_theta on frame pairs
    for a in 0..n {
        for b in 0..n {
            let t = Tensor::basis(&[a, b]);
            let tw = ctx.cl.twist(&t, 1);
            let m_cl = dcl.m_rep_matrix(&t).expect("scalar");
            let m_th = dth.m_rep_matrix(&tw).expect("scalar");
            if m_cl != m_th {
                return CheckOutcome::fail(name, format!("m mismatch at ({a},{b})"));
            }
            let g_cl = ctx.cl.g_pair(&t).expect("rank");
            let g_th = ctx.th.g_pair(&tw).expect("rank");
            if let Some(w) = judge_elt(&ctx.judge(), &g_cl, &g_th) {
                return CheckOutcome::fail(name, format!("g mismatch at ({a},{b}): {w}"));
            }
        }
    }
    // (3) c = c_theta . T_theta on samples
    for _ in 0..ctx.samples.min(25) {
        let j = rng.gen_range(0..n);
        let x = sample_spinor(&dcl, &mut rng, 2);
        let classical = dcl.graft(&Tensor::basis1(j), &x);
        let lhs = dth.clifford_consume(&dth.twist_spin1(&classical));
        let rhs = dth.spin0_to_deformed(&dcl.clifford_consume(&classical));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, format!("c mismatch: {w}"));
        }
    }
    // (4) (1 (x) c_theta) . H_theta = T_theta . (1 (x) c) on rank-2 samples
    for _ in 0..ctx.samples.min(25) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let x = sample_spinor(&dcl, &mut rng, 2);
        let classical = dcl.graft(&Tensor::basis(&[a, b]), &x);
        let lhs = dth.clifford_consume_second(&dth.twist3_spin(&classical));
        let rhs = dth.twist_spin1(&dcl.clifford_consume_second(&classical));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, format!("1(x)c mismatch: {w}"));
        }
    }
    // (5) sigma_theta (x) 1 = H (sigma (x) 1) H^{-1} on rank-2 spin samples
    for _ in 0..ctx.samples.min(25) {
        let t = crate::verify::sample_spin_tensor(&dth, 2, &mut rng, 2);
        let lhs = dth.sigma_spin(&t);
        let rhs = dth.twist3_spin(&dcl.sigma_spin(&dth.twist3_spin_inv(&t)));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, format!("sigma(x)1 mismatch: {w}"));
        }
    }
    CheckOutcome::pass(name)
}

fn check_well_defined_pieces(ctx: &ThetaContext) -> CheckOutcome {
    let name = "well-defined-pieces";
    let dcl = ctx.dirac_cl();
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x0D);
    let sum_nabla = |dc: &DiracCalculus, conn: &Connection, s: &SpinTensor| {
        let mut acc = SpinTensor::zero(2);
        for ((legs, b, key), c) in s.terms() {
            let mut x1 = SpinTensor::zero(0);
            x1.add_term(Vec::new(), *b, *key, c.clone());
            acc = acc.add(&dc.graft(
                &conn.apply_right(&dc.calc, &Tensor::basis1(legs[0] as usize)),
                &x1,
            ));
            acc = acc.add(&dc.graft(&Tensor::basis1(legs[0] as usize), &dc.spin_connection(&x1)));
        }
        acc
    };
    for _ in 0..ctx.samples.min(20) {
        let s = crate::verify::sample_spin_tensor(&dth, 1, &mut rng, 2);
        let lhs = sum_nabla(&dth, &ctx.conn_th, &s);
        let rhs = dth.twist3_spin(&sum_nabla(&dcl, &ctx.conn_cl, &dth.twist_spin1_inv(&s)));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

fn check_deformed_weitzenbock(ctx: &ThetaContext) -> CheckOutcome {
    let name = "deformed-weitzenbock";
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x0E);
    for _ in 0..ctx.samples.min(20) {
        let x = sample_spinor(&dth, &mut rng, 2);
        let lhs = dth.weitzenbock_residue(&ctx.conn_th, &x);
        let rhs = dth.clifford_of_braided_pair(&dth.spin_curvature(&x));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
        if let Some(f) = &ctx.geo.oracle.residue_factor {
            if let Some(w) = judge_spin(&ctx.judge(), &lhs, &x.scalar_mul(f)) {
                return CheckOutcome::fail(name, format!("residue factor: {w}"));
            }
        }
    }
    CheckOutcome::pass(name)
}

fn check_cliff_r_invariance(ctx: &ThetaContext) -> CheckOutcome {
    let name = "cliff-R-inv";
    let dcl = ctx.dirac_cl();
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x0F);
    for _ in 0..ctx.samples.min(20) {
        let x = sample_spinor(&dcl, &mut rng, 2);
        let classical = dcl.clifford_of_braided_pair(&dcl.spin_curvature(&x));
        let deformed =
            dth.clifford_of_braided_pair(&dth.spin_curvature(&dth.spin0_to_deformed(&x)));
        let rhs = dth.spin0_to_deformed(&classical);
        if let Some(w) = judge_spin(&ctx.judge(), &deformed, &rhs) {
            return CheckOutcome::fail(name, w);
        }
    }
    CheckOutcome::pass(name)
}

fn check_laplacian_invariance(ctx: &ThetaContext) -> CheckOutcome {
    let name = "laplacian-invariance";
    let dcl = ctx.dirac_cl();
    let dth = ctx.dirac_th();
    let mut rng = ctx.rng(0x10);
    for _ in 0..ctx.samples.min(20) {
        let x = sample_spinor(&dcl, &mut rng, 2);
        let lhs = dth.laplacian(&ctx.conn_th, &dth.spin0_to_deformed(&x));
        let rhs = dth.spin0_to_deformed(&dcl.laplacian(&ctx.conn_cl, &x));
        if let Some(w) = judge_spin(&ctx.judge(), &lhs, &rhs) {
            return CheckOutcome::fail(name, w);
        }
        // and D_theta transported equals D
        let dl = dth.dirac_apply(&dth.spin0_to_deformed(&x));
        let dr = dth.spin0_to_deformed(&dcl.dirac_apply(&x));
        if let Some(w) = judge_spin(&ctx.judge(), &dl, &dr) {
            return CheckOutcome::fail(name, format!("dirac transport: {w}"));
        }
    }
    CheckOutcome::pass(name)
}

/// lambda -> 1 specialization of a tensor (e.g. to compare a deformed
/// connection form with the classical one).
pub fn specialize_lambda_one(t: &Tensor) -> Option<Tensor> {
    let mut out = Tensor::zero(t.rank());
    for (idx, e) in t.terms() {
        let mut e2 = AlgebraElement::zero();
        for (k, s) in e.terms() {
            e2.add_term(*k, s.at_lambda_one().ok()?);
        }
        out.add_term(idx.clone(), e2);
    }
    Some(out)
}

/// Convenience for tests: a random scalar with unit-circle evaluation.
pub fn sample_phase_scalar(rng: &mut StdRng) -> Scalar {
    sample_scalar(rng)
}
