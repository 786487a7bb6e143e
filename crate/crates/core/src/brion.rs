//! The headline formulas: the classical vertex expansion, its degenerate
//! generalization over constant faces with alternating Levi cones, the
//! flag-product boundary values, the decomposition identity, and dilation
//! series.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::error::{Error, Result};
use crate::eval::{
    all_flag_rays, cone_i_series, cone_s_series, generic_direction, polytope_i_series,
    polytope_s_series, virtual_i_series, virtual_s_series, ComplexField, EvalCtx, Measure,
};
use crate::hull::normalized_volume;
use crate::inner::InnerProduct;
use crate::lattice::{coset_representatives, lattice_section, Lattice};
use crate::levi::{levi_cone, levi_cone_within, LeviBase};
use crate::matrix::{is_zero_vec, QMatrix, QVector};
use crate::numeric::{exp_pair, float_from_rat, Complex};
use crate::polytope::{cones_at_face, face_lattice, FaceLattice, Polytope};
use crate::rat::Rat;
use crate::series::{value_at_numeric, NumericValue, Series};
use crate::xi::{is_adapted_point, xi_decomposition, xi_prime, Xi};

/// A value plus its holomorphy diagnostics.
#[derive(Clone, Debug)]
pub struct EngineValue {
    pub value: Complex,
    pub holomorphy_margin: f64,
}

/// One face term of a degenerate expansion.
#[derive(Clone, Debug)]
pub struct DegenerateTermReport {
    pub face: usize,
    pub normalized_face_volume: Float,
    pub levi_value: Complex,
    pub rate: Complex,
    pub holomorphy_margin: f64,
    /// Discrete mode: (coset representative, point count, cone value).
    pub coset_breakdown: Vec<(QVector, BigInt, Complex)>,
}

/// Retry wrapper for engine entry points: redraws the generic direction
/// when a pairing certificate fails deep inside a recursion, and doubles
/// the truncation once when a series window comes out too shallow.
pub(crate) fn with_engine_retries<T>(
    ctx: &EvalCtx,
    seed: u64,
    mut f: impl FnMut(&EvalCtx, u64) -> Result<T>,
) -> Result<T> {
    let mut boosted: Option<EvalCtx> = None;
    let mut last = None;
    let mut attempt = 0u64;
    while attempt < 16 {
        let current = boosted.as_ref().unwrap_or(ctx);
        match f(current, seed.wrapping_add(attempt)) {
            Ok(v) => return Ok(v),
            Err(Error::NonGenericLine(m)) => {
                last = Some(Error::NonGenericLine(m));
                attempt += 1;
            }
            Err(Error::TruncationTooShallow { .. }) if boosted.is_none() => {
                boosted = Some(EvalCtx::new(ctx.ip.clone(), ctx.prec, ctx.trunc * 2));
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::ExhaustedRetries(16)))
}

/// Classical continuous expansion: sum of vertex tangent cone integrals
/// along one shared generic line; the sum must be holomorphic.
pub fn brion_continuous(p: &Polytope, xi: &Xi, ctx: &EvalCtx, seed: u64) -> Result<EngineValue> {
    let fl = face_lattice(p);
    brion_continuous_fl(&fl, xi, ctx, seed)
}

pub fn brion_continuous_fl(
    fl: &FaceLattice,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<EngineValue> {
    let rays = all_flag_rays(fl, &ctx.ip);
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let field = ComplexField { prec: ctx.prec };
        let series = polytope_i_series(&field, fl, &Measure::Euclidean, &line, ctx)?;
        let v = value_at_numeric(&series, &ctx.tol())?;
        if !v.holomorphic {
            return Err(Error::HolomorphyViolation(v.margin));
        }
        Ok(EngineValue {
            value: v.value,
            holomorphy_margin: v.margin,
        })
    })
}

/// Classical discrete expansion over shift + L.
pub fn brion_discrete(
    p: &Polytope,
    l: &Lattice,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<EngineValue> {
    let fl = face_lattice(p);
    let rays = all_flag_rays(&fl, &ctx.ip);
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let field = ComplexField { prec: ctx.prec };
        let mut total: Series<Complex> = Series::zero();
        let zero_shift = vec![Rat::zero(); p.ambient_dim()];
        for v in fl.faces_of_dim(0) {
            let (tangent, _, _) = cones_at_face(&fl, v, &ctx.ip);
            total = total.add(&cone_s_series(
                &field,
                &tangent,
                l,
                &zero_shift,
                &line,
                ctx,
            )?);
        }
        let v = value_at_numeric(&total, &ctx.tol())?;
        if !v.holomorphic {
            return Err(Error::HolomorphyViolation(v.margin));
        }
        Ok(EngineValue {
            value: v.value,
            holomorphy_margin: v.margin,
        })
    })
}

/// Hermitian pairing <xi, w>_H = <conj(xi), w> for a real vector w, as an
/// exact rational pair turned complex: <re, w> - 2*pi*i*<im2pi, w>.
fn hermitian_pair(prec: u32, ip: &InnerProduct, xi: &Xi, w: &[Rat]) -> Complex {
    let a = ip.pair(&xi.re, w);
    let b = ip.pair(&xi.im2pi, w);
    Complex::from_pair(prec, &a, &-b)
}

/// ||xi restricted to span||^2 (Hermitian), exact rational parts.
fn restricted_norm_sq(prec: u32, ip: &InnerProduct, xi: &Xi, span: &QMatrix) -> Float {
    let proj = ip.projection_matrix(span);
    let pre = proj.mul_vec(&xi.re);
    let pim = proj.mul_vec(&xi.im2pi);
    let a = ip.norm_sq(&pre);
    let b = ip.norm_sq(&pim);
    let two_pi = crate::numeric::float_two_pi(prec);
    let bi = float_from_rat(prec, &b) * &two_pi * &two_pi;
    float_from_rat(prec, &a) + bi
}

/// The flag-product boundary value: sum over saturated adapted flags from g
/// of products <xi, eta>_H / ||xi^h||^2, with eta the outward unit normal
/// of the previous face within the next. Numeric only (unit normals).
pub fn flag_product_value(fl: &FaceLattice, g: usize, xi: &Xi, ctx: &EvalCtx) -> Result<Complex> {
    let dec = xi_decomposition(fl, xi, &ctx.ip);
    if !dec.constant_faces.contains(&g) {
        return Err(Error::NotXiConstant);
    }
    let flags = crate::xi::flags(fl, g, crate::xi::FlagMode::XiAdapted, xi, &ctx.ip)?;
    let prec = ctx.prec;
    let mut total = Complex::zero(prec);
    for flag in &flags {
        let mut prod = Complex::one(prec);
        for w in 1..flag.len() {
            let lower = flag[w - 1];
            let upper = flag[w];
            // Outward normal direction of `lower` within lin(upper):
            // the 1-dim space lin(upper) ∩ lin(lower)^perp, oriented from
            // the interior of upper towards lower.
            let upper_lin = &fl.faces[upper].lin_basis;
            let lower_lin = &fl.faces[lower].lin_basis;
            let constr = lower_lin.transpose().mul(ctx.ip.gram()).mul(upper_lin);
            let ker = constr.kernel();
            if ker.ncols() != 1 {
                return Err(Error::Invalid(
                    "facet normal space not 1-dimensional".into(),
                ));
            }
            let mut w_dir = upper_lin.mul_vec(&ker.col(0));
            let outward = crate::matrix::sub_vec(
                &fl.faces[lower].relint_point,
                &fl.faces[upper].relint_point,
            );
            if ctx.ip.pair(&w_dir, &outward).is_negative() {
                w_dir = w_dir.iter().map(|x| -x).collect();
            }
            let norm_w = float_from_rat(prec, &ctx.ip.norm_sq(&w_dir)).sqrt();
            let num = hermitian_pair(prec, &ctx.ip, xi, &w_dir);
            let den = restricted_norm_sq(prec, &ctx.ip, xi, upper_lin);
            if den.is_zero() {
                return Err(Error::ZeroRestriction);
            }
            let factor = num.scale(&(Float::with_val(prec, 1) / (norm_w * den)));
            prod = prod.mul(&factor);
        }
        total = total.add(&prod);
    }
    Ok(total)
}

/// Euclidean volume of a face: exact lattice-normalized volume times the
/// covolume of the chosen direction lattice, the latter as a float.
pub fn face_euclidean_volume(fl: &FaceLattice, face: usize, ctx: &EvalCtx) -> Result<Float> {
    let f = &fl.faces[face];
    if f.dim == 0 {
        return Ok(Float::with_val(ctx.prec, 1));
    }
    let g = Lattice::from_generators(fl.polytope.ambient_dim(), &f.lin_basis.columns());
    let verts = fl.face_vertices(face);
    let v = normalized_volume(&verts, &g)?;
    let gr2 = g.gram_det_sq(&ctx.ip);
    Ok(float_from_rat(ctx.prec, &v) * float_from_rat(ctx.prec, &gr2).sqrt())
}

/// Exact lattice-normalized face volume vol^{L ∩ lin(f)}(f).
pub fn face_lattice_volume(fl: &FaceLattice, face: usize, l: &Lattice) -> Result<Rat> {
    let f = &fl.faces[face];
    if f.dim == 0 {
        return Ok(Rat::one());
    }
    let sec = lattice_section(l, &f.lin_basis)?;
    normalized_volume(&fl.face_vertices(face), &sec)
}

/// Degenerate continuous expansion: sum over constant faces of
/// e^{<xi, f>} vol(f) I(0LC_f; xi), every Levi value holomorphic.
pub fn degenerate_brion_continuous(
    p: &Polytope,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<(EngineValue, Vec<DegenerateTermReport>)> {
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    let rays = all_flag_rays(&fl, &ctx.ip);
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let field = ComplexField { prec: ctx.prec };
        let mut total = Complex::zero(ctx.prec);
        let mut terms = Vec::new();
        let mut min_margin = f64::INFINITY;
        for &f in &dec.constant_faces {
            let lc = levi_cone(&fl, f, xi, &ctx.ip, LeviBase::Origin)?;
            let series = virtual_i_series(&field, &lc, &Measure::Euclidean, &line, ctx)?;
            let v = value_at_numeric(&series, &ctx.tol())?;
            if !v.holomorphic {
                return Err(Error::HolomorphyViolation(v.margin));
            }
            min_margin = min_margin.min(v.margin);
            let vol = face_euclidean_volume(&fl, f, ctx)?;
            let (re, im) = xi.pair(&ctx.ip, &fl.faces[f].relint_point);
            let rate = Complex::from_pair(ctx.prec, &re, &im);
            let weight = exp_pair(ctx.prec, &re, &im);
            let term_value = weight.mul(&v.value).scale(&vol);
            total = total.add(&term_value);
            terms.push(DegenerateTermReport {
                face: f,
                normalized_face_volume: vol,
                levi_value: v.value.clone(),
                rate,
                holomorphy_margin: v.margin,
                coset_breakdown: Vec::new(),
            });
        }
        Ok((
            EngineValue {
                value: total,
                holomorphy_margin: min_margin,
            },
            terms,
        ))
    })
}

/// Report of the decomposition-identity check at random generic probes.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub probes: usize,
    pub max_rel_dev_continuous: f64,
    pub max_rel_dev_discrete: Option<f64>,
}

/// Compares I(p; a) (and S_L(p; a)) against the face-wise product
/// decomposition at random generic probes a.
pub fn decomposition_check(
    p: &Polytope,
    xi: &Xi,
    ctx: &EvalCtx,
    probes: usize,
    lattice: Option<&Lattice>,
    seed: u64,
) -> Result<DecompositionReport> {
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    // Face projections f^f and their own expansions need genericity too.
    let mut constraints = all_flag_rays(&fl, &ctx.ip);
    let mut projected: Vec<(usize, Polytope, FaceLattice)> = Vec::new();
    for &f in &dec.constant_faces {
        let lin = &fl.faces[f].lin_basis;
        let proj = ctx.ip.projection_matrix(lin);
        let pts: Vec<QVector> = fl
            .face_vertices(f)
            .iter()
            .map(|v| proj.mul_vec(v))
            .collect();
        let pf = Polytope::from_vertices(&pts, &ctx.ip)?;
        let pfl = face_lattice(&pf);
        constraints.extend(all_flag_rays(&pfl, &ctx.ip));
        projected.push((f, pf, pfl));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b9).wrapping_add(17));
    let n = p.ambient_dim();
    let field = ComplexField { prec: ctx.prec };
    let mut max_dev_c = 0.0f64;
    let mut max_dev_d: Option<f64> = lattice.map(|_| 0.0);
    for probe_idx in 0..probes {
        // A random real rational probe, generic for every ray in sight.
        let alpha = loop {
            let cand: QVector = (0..n)
                .map(|_| crate::rat::rat(rng.gen_range(-19i64..=19), rng.gen_range(1i64..=3)))
                .collect();
            if is_zero_vec(&cand) {
                continue;
            }
            let ok = constraints
                .iter()
                .filter(|v| !is_zero_vec(v))
                .all(|v| !ctx.ip.pair(&cand, v).is_zero());
            if ok {
                break Xi::real(cand);
            }
        };
        let line_seed = seed.wrapping_add(1000 + probe_idx as u64);
        // Continuous: I(p; alpha) versus the face-product sum.
        let lhs = brion_continuous_fl(&fl, &alpha, ctx, line_seed)?;
        let rhs = with_engine_retries(ctx, line_seed, |ctx, s| {
            let line = generic_direction(ctx, &alpha, &constraints, s)?;
            let mut acc = Complex::zero(ctx.prec);
            for (f, _, pfl) in &projected {
                let i_face = value_at_numeric(
                    &polytope_i_series(&field, pfl, &Measure::Euclidean, &line, ctx)?,
                    &ctx.tol(),
                )?;
                let lc = levi_cone(&fl, *f, &alpha_for_levi(xi), &ctx.ip, LeviBase::Projected)?;
                let i_lc = value_at_numeric(
                    &virtual_i_series(&field, &lc, &Measure::Euclidean, &line, ctx)?,
                    &ctx.tol(),
                )?;
                acc = acc.add(&i_face.value.mul(&i_lc.value));
            }
            Ok(acc)
        })?;
        max_dev_c = max_dev_c.max(rel_dev(&lhs.value, &rhs));
        // Discrete: S_L(p; alpha) versus the coset-split product sum.
        if let Some(l) = lattice {
            let lhs = with_engine_retries(ctx, line_seed, |ctx, s| {
                let line = generic_direction(ctx, &alpha, &constraints, s)?;
                let zero = vec![Rat::zero(); n];
                let series = polytope_s_series(&field, p, l, &zero, &line, ctx)?;
                Ok(value_at_numeric(&series, &ctx.tol())?.value)
            })?;
            let rhs = with_engine_retries(ctx, line_seed, |ctx, s| {
                let line = generic_direction(ctx, &alpha, &constraints, s)?;
                let mut acc = Complex::zero(ctx.prec);
                for (f, pf, _) in &projected {
                    let lin = &fl.faces[*f].lin_basis;
                    let perp = ctx.ip.perp_basis(lin);
                    let l_f = lattice_section(l, lin)?;
                    let l_perp = lattice_section(l, &perp)?;
                    let cosets = coset_representatives(l, &l_f, &l_perp, &ctx.ip)?;
                    let lc = levi_cone(&fl, *f, &alpha_for_levi(xi), &ctx.ip, LeviBase::Projected)?;
                    for (k, _) in cosets.representatives.iter().enumerate() {
                        let phi1 = &cosets.phi1_images[k];
                        let phi2 = &cosets.phi2_images[k];
                        let s_face = value_at_numeric(
                            &polytope_s_series(&field, pf, &l_f, phi1, &line, ctx)?,
                            &ctx.tol(),
                        )?;
                        let s_lc = value_at_numeric(
                            &virtual_s_series(&field, &lc, &l_perp, phi2, &line, ctx)?,
                            &ctx.tol(),
                        )?;
                        acc = acc.add(&s_face.value.mul(&s_lc.value));
                    }
                }
                Ok(acc)
            })?;
            let d = rel_dev(&lhs, &rhs);
            max_dev_d = max_dev_d.map(|m| m.max(d));
        }
    }
    Ok(DecompositionReport {
        probes,
        max_rel_dev_continuous: max_dev_c,
        max_rel_dev_discrete: max_dev_d,
    })
}

/// The Levi cone in the decomposition identity is built for the original
/// xi (the probe only moves the evaluation point).
fn alpha_for_levi(xi: &Xi) -> Xi {
    xi.clone()
}

pub fn rel_dev(a: &Complex, b: &Complex) -> f64 {
    let diff = a.sub(b).abs().to_f64();
    let scale = a.abs().to_f64().max(b.abs().to_f64()).max(1e-300);
    diff / scale
}

/// Degenerate discrete expansion, version 1: counts of shifted section
/// lattice points on the face projection times Levi cone sums over the
/// complementary section, summed over cosets.
pub fn degenerate_brion_discrete_v1(
    p: &Polytope,
    l: &Lattice,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<(EngineValue, Vec<DegenerateTermReport>)> {
    if !is_adapted_point(xi, l, &ctx.ip) {
        return Err(Error::Invalid(
            "discrete degenerate expansion needs an adapted functional; reduce with xi_prime first"
                .into(),
        ));
    }
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    let rays = all_flag_rays(&fl, &ctx.ip);
    let field = ComplexField { prec: ctx.prec };
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let mut total = Complex::zero(ctx.prec);
        let mut terms = Vec::new();
        let mut min_margin = f64::INFINITY;
        for &f in &dec.constant_faces {
            let lin = &fl.faces[f].lin_basis;
            let perp = ctx.ip.perp_basis(lin);
            let l_f = lattice_section(l, lin)?;
            let l_perp = lattice_section(l, &perp)?;
            let cosets = coset_representatives(l, &l_f, &l_perp, &ctx.ip)?;
            let lc = levi_cone(&fl, f, xi, &ctx.ip, LeviBase::Projected)?;
            // Face projection onto its own direction space.
            let proj = ctx.ip.projection_matrix(lin);
            let pf = Polytope::from_vertices(
                &fl.face_vertices(f)
                    .iter()
                    .map(|v| proj.mul_vec(v))
                    .collect::<Vec<_>>(),
                &ctx.ip,
            )?;
            let mut face_total = Complex::zero(ctx.prec);
            let mut breakdown = Vec::new();
            for (k, rep) in cosets.representatives.iter().enumerate() {
                let phi1 = &cosets.phi1_images[k];
                let phi2 = &cosets.phi2_images[k];
                let count =
                    BigInt::from(crate::oracle::lattice_points(&pf, &l_f, phi1)?.len() as u64);
                let series = virtual_s_series(&field, &lc, &l_perp, phi2, &line, ctx)?;
                let v = value_at_numeric(&series, &ctx.tol())?;
                if !v.holomorphic {
                    return Err(Error::HolomorphyViolation(v.margin));
                }
                min_margin = min_margin.min(v.margin);
                let c = float_from_rat(ctx.prec, &Rat::from_integer(count.clone()));
                face_total = face_total.add(&v.value.scale(&c));
                breakdown.push((rep.clone(), count, v.value.clone()));
            }
            total = total.add(&face_total);
            let (re, im) = xi.pair(&ctx.ip, &fl.faces[f].relint_point);
            terms.push(DegenerateTermReport {
                face: f,
                normalized_face_volume: Float::with_val(ctx.prec, 1),
                levi_value: face_total,
                rate: Complex::from_pair(ctx.prec, &re, &im),
                holomorphy_margin: min_margin,
                coset_breakdown: breakdown,
            });
        }
        Ok((
            EngineValue {
                value: total,
                holomorphy_margin: min_margin,
            },
            terms,
        ))
    })
}

/// General-xi wrapper: reduce with xi_prime, then expand each coset with
/// version 1 on the translated polytope over the finite-index sublattice.
pub fn degenerate_brion_discrete_general(
    p: &Polytope,
    l: &Lattice,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<EngineValue> {
    let data = xi_prime(l, xi, &ctx.ip);
    let mut total = Complex::zero(ctx.prec);
    let mut min_margin = f64::INFINITY;
    for (idx, (gamma, _)) in data.cosets.iter().enumerate() {
        // S_{[g]+L'}(p; xi') = e^{<xi', g>} S_{L'}(-g + p; xi'), and the
        // coset weight e^{<xi, g^{V'}>} combines to e^{<xi, g>}.
        let (wr, wi) = xi.pair(&ctx.ip, gamma);
        let weight = exp_pair(ctx.prec, &wr, &wi);
        let neg: QVector = gamma.iter().map(|x| -x).collect();
        let moved = p.dilate_translate(&Rat::one(), &neg)?;
        let (v, _) = degenerate_brion_discrete_v1(
            &moved,
            &data.lambda_prime,
            &data.xi_prime,
            ctx,
            seed.wrapping_add(idx as u64),
        )?;
        min_margin = min_margin.min(v.holomorphy_margin);
        total = total.add(&weight.mul(&v.value));
    }
    Ok(EngineValue {
        value: total,
        holomorphy_margin: min_margin,
    })
}

/// One term of a dilation series.
#[derive(Clone, Debug)]
pub struct DilationTerm {
    pub face: usize,
    pub poly_degree: usize,
    /// Exact exponent pair of the rate <xi, f>.
    pub rate: (Rat, Rat),
    /// Continuous mode: a single coefficient. Discrete mode: one
    /// coefficient per residue class of t modulo `period`.
    pub coefficients: Vec<Complex>,
    pub period: u32,
}

#[derive(Clone, Debug)]
pub struct DilationSeries {
    pub terms: Vec<DilationTerm>,
    pub prec: u32,
}

impl DilationSeries {
    /// Evaluates the series at a positive integer dilation factor.
    pub fn eval_at(&self, t: u32) -> Complex {
        let mut acc = Complex::zero(self.prec);
        for term in &self.terms {
            let residue = (t % term.period) as usize;
            let coeff = &term.coefficients[residue];
            let t_rat = Rat::from_integer(t.into());
            let tre = &term.rate.0 * &t_rat;
            let tim = &term.rate.1 * &t_rat;
            let expt = exp_pair(self.prec, &tre, &tim);
            let tp = float_from_rat(self.prec, &t_rat.pow(term.poly_degree as i32));
            acc = acc.add(&coeff.mul(&expt).scale(&tp));
        }
        acc
    }
}

/// Continuous dilation series: I(t p; xi) = sum over constant faces of
/// vol(f) I(0LC_f; xi) t^{dim f} e^{t <xi, f>}.
pub fn dilation_series_continuous(
    p: &Polytope,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<DilationSeries> {
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    let rays = all_flag_rays(&fl, &ctx.ip);
    let field = ComplexField { prec: ctx.prec };
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let mut terms = Vec::new();
        for &f in &dec.constant_faces {
            let lc = levi_cone(&fl, f, xi, &ctx.ip, LeviBase::Origin)?;
            let series = virtual_i_series(&field, &lc, &Measure::Euclidean, &line, ctx)?;
            let v = value_at_numeric(&series, &ctx.tol())?;
            if !v.holomorphic {
                return Err(Error::HolomorphyViolation(v.margin));
            }
            let vol = face_euclidean_volume(&fl, f, ctx)?;
            let rate = xi.pair(&ctx.ip, &fl.faces[f].relint_point);
            terms.push(DilationTerm {
                face: f,
                poly_degree: fl.faces[f].dim,
                rate,
                coefficients: vec![v.value.scale(&vol)],
                period: 1,
            });
        }
        Ok(DilationSeries {
            terms,
            prec: ctx.prec,
        })
    })
}

/// Discrete dilation series over L at an adapted functional: per constant
/// face g, per residue class of t, coefficients assembled from the
/// transverse-cone mu weights and relative Levi integrals.
pub fn dilation_series_discrete(
    p: &Polytope,
    l: &Lattice,
    xi: &Xi,
    ctx: &EvalCtx,
    seed: u64,
) -> Result<DilationSeries> {
    if !is_adapted_point(xi, l, &ctx.ip) {
        return Err(Error::Invalid(
            "discrete dilation series needs an adapted functional".into(),
        ));
    }
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    let field = ComplexField { prec: ctx.prec };
    let exact = xi.is_zero();
    let mut terms = Vec::new();
    for &g in &dec.constant_faces {
        let vol = face_lattice_volume(&fl, g, l)?;
        let lin_g = &fl.faces[g].lin_basis;
        let perp_g = ctx.ip.perp_basis(lin_g);
        let l_gperp_proj = crate::lattice::lattice_projection(l, &perp_g, &ctx.ip)?;
        // Candidate faces: g itself plus non-constant superfaces.
        let mut candidates = vec![g];
        for &f in &fl.strict_superfaces(g) {
            if !dec.constant_faces.contains(&f) {
                candidates.push(f);
            }
        }
        // Period: lcm over candidate faces of the order of f^{f-perp} in
        // lin(f)^perp / L^{f-perp}.
        let mut period = 1u32;
        let mut mu_inputs = Vec::new();
        for &f in &candidates {
            let lin_f = &fl.faces[f].lin_basis;
            let perp_f = ctx.ip.perp_basis(lin_f);
            let proj_f = ctx.ip.projection_matrix(&perp_f);
            let l_fperp = crate::lattice::lattice_projection(l, &perp_f, &ctx.ip)?;
            let w = proj_f.mul_vec(&fl.faces[f].relint_point);
            let m = if is_zero_vec(&w) {
                1u32
            } else {
                let coords = l_fperp.span_coords(&w).ok_or(Error::NotRational)?;
                crate::rat::lcm_denoms(coords.iter())
                    .to_string()
                    .parse::<u32>()
                    .map_err(|_| Error::Invalid("dilation period overflow".into()))?
            };
            period = num_integer::lcm(period, m);
            let (_, transverse, _) = cones_at_face(&fl, f, &ctx.ip);
            mu_inputs.push((f, w, m, transverse.at_origin(), l_fperp));
        }
        // I factors do not depend on t.
        let mut i_factors = Vec::new();
        for &f in &candidates {
            let lc = levi_cone_within(&fl, g, f, xi, &ctx.ip, LeviBase::Origin)?;
            let l_meas = lattice_section(&l_gperp_proj, &fl.faces[f].lin_basis)?;
            let value = with_engine_retries(ctx, seed.wrapping_add(977 + f as u64), |ctx, s| {
                let mut rays: Vec<QVector> = Vec::new();
                for t in &lc.terms {
                    rays.extend(t.cone.rays.clone());
                }
                let line = generic_direction(ctx, xi, &rays, s)?;
                let series = virtual_i_series(
                    &field,
                    &lc,
                    &Measure::LatticeNormalized(&l_meas),
                    &line,
                    ctx,
                )?;
                let v = value_at_numeric(&series, &ctx.tol())?;
                if !v.holomorphic {
                    return Err(Error::HolomorphyViolation(v.margin));
                }
                Ok(v.value)
            })?;
            i_factors.push(value);
        }
        // Per residue class r of t: mu weights at the translated cones.
        let mut coefficients = Vec::new();
        for r in 0..period {
            let mut acc = Complex::zero(ctx.prec);
            for (idx, (f, w, _, t0, l_fperp)) in mu_inputs.iter().enumerate() {
                let _ = f;
                let shift: QVector = w.iter().map(|x| x * Rat::from_integer(r.into())).collect();
                let cone = t0.translated(&shift);
                let mu = crate::euler::mu_value(&cone, l_fperp, xi, ctx, exact, seed)?;
                acc = acc.add(&mu.mul(&i_factors[idx]));
            }
            coefficients.push(acc.scale(&float_from_rat(ctx.prec, &vol)));
        }
        let rate = xi.pair(&ctx.ip, &fl.faces[g].relint_point);
        terms.push(DilationTerm {
            face: g,
            poly_degree: fl.faces[g].dim,
            rate,
            coefficients,
            period,
        });
    }
    Ok(DilationSeries {
        terms,
        prec: ctx.prec,
    })
}

/// Leading-term asymptotics data for I(t p; xi) with a unique maximal face.
pub fn asymptotic_ratio(
    p: &Polytope,
    xi: &Xi,
    ctx: &EvalCtx,
    t: u32,
    seed: u64,
) -> Result<(Complex, Complex)> {
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    // The maximal face with the largest rate.
    let g0 = dec
        .maximal_faces
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let ra = xi.pair(&ctx.ip, &fl.faces[a].relint_point).0;
            let rb = xi.pair(&ctx.ip, &fl.faces[b].relint_point).0;
            ra.cmp(&rb)
        })
        .ok_or(Error::Empty)?;
    let tp = p.dilate_translate(
        &Rat::from_integer(t.into()),
        &vec![Rat::zero(); p.ambient_dim()],
    )?;
    let full = brion_continuous(&tp, xi, ctx, seed)?;
    // Normalizer: t^{dim g0} e^{t <xi, g0>}.
    let (re, im) = xi.pair(&ctx.ip, &fl.faces[g0].relint_point);
    let t_rat = Rat::from_integer(t.into());
    let expt = exp_pair(ctx.prec, &(&re * &t_rat), &(&im * &t_rat));
    let tp_f = float_from_rat(ctx.prec, &t_rat.pow(fl.faces[g0].dim as i32));
    let normalized = full.value.div(&expt.scale(&tp_f));
    // Limit: vol(g0) * I(0t_{g0}; xi).
    let field = ComplexField { prec: ctx.prec };
    let limit = with_engine_retries(ctx, seed, |ctx, s| {
        let rays = all_flag_rays(&fl, &ctx.ip);
        let line = generic_direction(ctx, xi, &rays, s)?;
        let (_, transverse, _) = cones_at_face(&fl, g0, &ctx.ip);
        let series = cone_i_series(
            &field,
            &transverse.at_origin(),
            &Measure::Euclidean,
            &line,
            ctx,
        )?;
        let v = value_at_numeric(&series, &ctx.tol())?;
        Ok(v.value)
    })?;
    let vol = face_euclidean_volume(&fl, g0, ctx)?;
    Ok((normalized, limit.scale(&vol)))
}

/// Verifies the Stokes recursion: I(p; xi) = (1/||xi||^2) sum over facets
/// of <xi, eta>_H I(facet; xi), numeric mode.
pub fn stokes_check(p: &Polytope, xi: &Xi, ctx: &EvalCtx, seed: u64) -> Result<f64> {
    if xi.is_zero() {
        return Err(Error::Invalid(
            "Stokes recursion needs a nonzero functional".into(),
        ));
    }
    let fl = face_lattice(p);
    let lhs = brion_continuous_fl(&fl, xi, ctx, seed)?.value;
    let prec = ctx.prec;
    let mut rhs = Complex::zero(prec);
    let top = fl.top();
    let top_dim = fl.faces[top].dim;
    for f in fl.faces_of_dim(top_dim.saturating_sub(1)) {
        // Outward unit normal within lin(p).
        let upper_lin = &fl.faces[top].lin_basis;
        let lower_lin = &fl.faces[f].lin_basis;
        let constr = lower_lin.transpose().mul(ctx.ip.gram()).mul(upper_lin);
        let ker = constr.kernel();
        let mut w_dir = upper_lin.mul_vec(&ker.col(0));
        let outward =
            crate::matrix::sub_vec(&fl.faces[f].relint_point, &fl.faces[top].relint_point);
        if ctx.ip.pair(&w_dir, &outward).is_negative() {
            w_dir = w_dir.iter().map(|x| -x).collect();
        }
        let norm_w = float_from_rat(prec, &ctx.ip.norm_sq(&w_dir)).sqrt();
        let num = hermitian_pair(prec, &ctx.ip, xi, &w_dir);
        // I over the facet (Euclidean facet measure).
        let facet_poly = Polytope::from_vertices(&fl.face_vertices(f), &ctx.ip)?;
        let i_f = brion_continuous(&facet_poly, xi, ctx, seed)?.value;
        rhs = rhs.add(&num.scale(&(Float::with_val(prec, 1) / norm_w)).mul(&i_f));
    }
    let den = restricted_norm_sq(prec, &ctx.ip, xi, &fl.faces[top].lin_basis);
    rhs = rhs.scale(&(Float::with_val(prec, 1) / den));
    Ok(rel_dev(&lhs, &rhs))
}

/// Exposes the generic-collapse comparison: at a functional constant only
/// on vertices, the degenerate term list matches per-vertex classical
/// values.
pub fn generic_collapse_check(p: &Polytope, xi: &Xi, ctx: &EvalCtx, seed: u64) -> Result<f64> {
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, &ctx.ip);
    if dec.constant_faces.iter().any(|&f| fl.faces[f].dim > 0) {
        return Err(Error::Invalid(
            "functional is not generic on this polytope".into(),
        ));
    }
    let (_, terms) = degenerate_brion_continuous(p, xi, ctx, seed)?;
    let rays = all_flag_rays(&fl, &ctx.ip);
    let field = ComplexField { prec: ctx.prec };
    with_engine_retries(ctx, seed, |ctx, s| {
        let line = generic_direction(ctx, xi, &rays, s)?;
        let mut max_dev = 0.0f64;
        for term in &terms {
            let (tangent, _, _) = cones_at_face(&fl, term.face, &ctx.ip);
            let series = cone_i_series(&field, &tangent, &Measure::Euclidean, &line, ctx)?;
            let v = value_at_numeric(&series, &ctx.tol())?;
            let classical = v.value;
            let degenerate = term
                .levi_value
                .mul(&exp_rate(ctx.prec, &term.rate))
                .scale(&term.normalized_face_volume);
            max_dev = max_dev.max(rel_dev(&classical, &degenerate));
        }
        Ok(max_dev)
    })
}

fn exp_rate(prec: u32, rate: &Complex) -> Complex {
    // e^{rate} for a complex rate already carrying 2*pi factors.
    let e = rate.re.clone().exp();
    let (sin, cos) = rate.im.clone().sin_cos(Float::with_val(prec, 0));
    Complex::new(cos, sin).scale(&e)
}

/// Convenience accessor used by tests and the CLI.
pub fn value_or_error(v: &NumericValue) -> Result<Complex> {
    if v.holomorphic {
        Ok(v.value.clone())
    } else {
        Err(Error::HolomorphyViolation(v.margin))
    }
}
