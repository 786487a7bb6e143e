//! Meromorphic evaluation of exponential integrals and sums over cones as
//! truncated Laurent series along a generic complex line through the base
//! functional. One generic implementation serves the high-precision complex
//! field and, for expansions based at zero, exact rationals.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::decompose::{
    decompose_cone, lattice_primitive_rays, parallelepiped_points, DecomposeMode,
};
use crate::error::{Error, Result};
use crate::inner::InnerProduct;
use crate::lattice::{lattice_section, Lattice};
use crate::levi::VirtualCone;
use crate::matrix::{is_zero_vec, sub_vec, QMatrix, QVector};
use crate::numeric::{exp_pair, exp_pair_is_one, float_from_rat, Complex};
use crate::polytope::{Cone, Polytope};
use crate::rat::Rat;
use crate::series::{Coef, Series};
use crate::xi::Xi;

/// Evaluation parameters: inner product, precision, truncation order.
#[derive(Clone, Debug)]
pub struct EvalCtx {
    pub ip: InnerProduct,
    pub prec: u32,
    pub trunc: i64,
}

impl EvalCtx {
    pub fn new(ip: InnerProduct, prec: u32, trunc: i64) -> Self {
        EvalCtx { ip, prec, trunc }
    }

    pub fn standard(n: usize) -> Self {
        EvalCtx {
            ip: InnerProduct::standard(n),
            prec: 256,
            trunc: n as i64 + 4,
        }
    }

    /// Working window length: truncation plus headroom for pole orders.
    pub fn window(&self, dim_bound: usize) -> usize {
        (self.trunc + dim_bound as i64 + 2).max(3) as usize
    }

    pub fn tol(&self) -> Float {
        crate::series::default_tol(self.prec)
    }
}

/// A generic complex line xi + t*beta. The direction is real rational and
/// certified nonzero against every pairing that occurs in a computation.
#[derive(Clone, Debug)]
pub struct GenericLine {
    pub base: Xi,
    pub dir: QVector,
    /// Vectors v for which <dir, v> != 0 was certified.
    pub certificates: Vec<QVector>,
}

impl GenericLine {
    /// Pairing of the moving functional with a vector: (constant part as a
    /// rational pair, linear coefficient <dir, v>).
    pub fn pair(&self, ip: &InnerProduct, v: &[Rat]) -> ((Rat, Rat), Rat) {
        let c0 = (ip.pair(&self.base.re, v), ip.pair(&self.base.im2pi, v));
        let c1 = ip.pair(&self.dir, v);
        (c0, c1)
    }
}

/// Draws a deterministic pseudo-random rational direction until every
/// constraint pairing is nonzero.
pub fn generic_direction(
    ctx: &EvalCtx,
    base: &Xi,
    constraints: &[QVector],
    seed: u64,
) -> Result<GenericLine> {
    let n = base.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let dir: QVector = (0..n)
            .map(|_| Rat::from_integer(rng.gen_range(-9i64..=9).into()))
            .collect();
        if is_zero_vec(&dir) {
            continue;
        }
        let ok = constraints
            .iter()
            .filter(|v| !is_zero_vec(v))
            .all(|v| !ctx.ip.pair(&dir, v).is_zero());
        if ok {
            return Ok(GenericLine {
                base: base.clone(),
                dir,
                certificates: constraints.to_vec(),
            });
        }
    }
    Err(Error::ExhaustedRetries(1000))
}

/// Field adapter: how exact rational data enters the coefficient ring.
pub trait SeriesField {
    type C: Coef;
    fn from_rat(&self, r: &Rat) -> Self::C;
    /// Value of re + 2*pi*i*im2pi as a scalar (a linear value, unreduced).
    fn linear_value(&self, re: &Rat, im2pi: &Rat) -> Result<Self::C>;
    /// e^{re + 2*pi*i*im2pi} as a scalar.
    fn exp_value(&self, re: &Rat, im2pi: &Rat) -> Result<Self::C>;
    /// sqrt of a positive rational (Euclidean volume factors).
    fn sqrt(&self, r: &Rat) -> Result<Self::C>;
}

/// 256-bit-style floating complex coefficients.
pub struct ComplexField {
    pub prec: u32,
}

impl SeriesField for ComplexField {
    type C = Complex;
    fn from_rat(&self, r: &Rat) -> Complex {
        Complex::from_rat(self.prec, r)
    }
    fn linear_value(&self, re: &Rat, im2pi: &Rat) -> Result<Complex> {
        Ok(Complex::from_pair(self.prec, re, im2pi))
    }
    fn exp_value(&self, re: &Rat, im2pi: &Rat) -> Result<Complex> {
        Ok(exp_pair(self.prec, re, im2pi))
    }
    fn sqrt(&self, r: &Rat) -> Result<Complex> {
        Ok(Complex::new(
            float_from_rat(self.prec, r).sqrt(),
            Float::with_val(self.prec, 0),
        ))
    }
}

/// Exact rational coefficients: only expansions based at zero are
/// representable; any other request is a hard error.
pub struct RatField;

impl SeriesField for RatField {
    type C = Rat;
    fn from_rat(&self, r: &Rat) -> Rat {
        r.clone()
    }
    fn linear_value(&self, re: &Rat, im2pi: &Rat) -> Result<Rat> {
        if !im2pi.is_zero() {
            return Err(Error::Invalid(
                "exact mode requires a real expansion point".into(),
            ));
        }
        Ok(re.clone())
    }
    fn exp_value(&self, re: &Rat, im2pi: &Rat) -> Result<Rat> {
        if exp_pair_is_one(re, im2pi) {
            Ok(Rat::one())
        } else {
            Err(Error::Invalid(
                "exact mode requires exponentials equal to one".into(),
            ))
        }
    }
    fn sqrt(&self, r: &Rat) -> Result<Rat> {
        // Exact mode only ever uses lattice-normalized measures.
        if r.is_one() {
            Ok(Rat::one())
        } else {
            Err(Error::Invalid("exact mode cannot take square roots".into()))
        }
    }
}

/// Measure for integrals: the inner-product Lebesgue measure, or the one
/// normalized so the given lattice has covolume 1.
pub enum Measure<'a> {
    Euclidean,
    LatticeNormalized(&'a Lattice),
}

/// e^{c0} * e^{c1 t} expanded to `len` coefficients: scalar w = e^{c0}
/// entered through the field, c1 a linear value.
fn exp_series<F: SeriesField>(
    field: &F,
    len: usize,
    c0: &(Rat, Rat),
    c1: &F::C,
) -> Result<Series<F::C>> {
    let w = field.exp_value(&c0.0, &c0.1)?;
    let mut coeffs = Vec::with_capacity(len);
    let mut term = w;
    coeffs.push(term.clone());
    for k in 1..len {
        term = term.c_mul(c1);
        let kk = field.from_rat(&Rat::new(1.into(), (k as i64).into()));
        term = term.c_mul(&kk);
        coeffs.push(term.clone());
    }
    Ok(Series { ord: 0, coeffs })
}

/// The series <xi + t beta, v> with its true leading order: exact zero test
/// on the constant part decides whether the order is 0 or 1.
fn linear_factor<F: SeriesField>(
    field: &F,
    len: usize,
    line: &GenericLine,
    ip: &InnerProduct,
    v: &[Rat],
) -> Result<Series<F::C>> {
    let ((re0, im0), c1) = line.pair(ip, v);
    let c1v = field.from_rat(&c1);
    if re0.is_zero() && im0.is_zero() {
        if c1.is_zero() {
            return Err(Error::NonGenericLine(format!(
                "direction not generic for ray {v:?}"
            )));
        }
        let zero = c1v.c_zero();
        let mut coeffs = vec![zero.clone(); len];
        coeffs[0] = c1v;
        Ok(Series { ord: 1, coeffs })
    } else {
        let c0 = field.linear_value(&re0, &im0)?;
        let zero = c0.c_zero();
        let mut coeffs = vec![zero.clone(); len];
        coeffs[0] = c0;
        if len > 1 {
            coeffs[1] = c1v;
        }
        Ok(Series { ord: 0, coeffs })
    }
}

/// The series 1/(1 - e^{<xi + t beta, v>}); the structural decision whether
/// e^{<xi, v>} = 1 picks the true pole order.
fn inv_one_minus_exp<F: SeriesField>(
    field: &F,
    len: usize,
    line: &GenericLine,
    ip: &InnerProduct,
    v: &[Rat],
) -> Result<Series<F::C>> {
    let ((re0, im0), c1) = line.pair(ip, v);
    if exp_pair_is_one(&re0, &im0) {
        // 1 - e^{c1 t} = -(c1 t + (c1 t)^2/2 + ...), order 1.
        if c1.is_zero() {
            return Err(Error::NonGenericLine(format!(
                "discrete direction not generic for ray {v:?}"
            )));
        }
        let c1v = field.from_rat(&c1);
        let mut term = c1v.clone();
        let mut coeffs = Vec::with_capacity(len);
        coeffs.push(term.c_neg());
        for k in 2..=len {
            term = term.c_mul(&c1v);
            term = term.c_mul(&field.from_rat(&Rat::new(1.into(), (k as i64).into())));
            coeffs.push(term.c_neg());
        }
        Series { ord: 1, coeffs }.inv()
    } else {
        // 1 - w e^{c1 t} with w != 1: unit constant term.
        let w = field.exp_value(&re0, &im0)?;
        let c1v = field.from_rat(&c1);
        let one = field.from_rat(&Rat::one());
        let mut coeffs = Vec::with_capacity(len);
        let mut term = w;
        coeffs.push(one.c_sub(&term));
        for k in 1..len {
            term = term.c_mul(&c1v);
            term = term.c_mul(&field.from_rat(&Rat::new(1.into(), (k as i64).into())));
            coeffs.push(term.c_neg());
        }
        Series { ord: 0, coeffs }.inv()
    }
}

/// Volume of the half-open parallelepiped of the rays in the requested
/// measure: gram-determinant square root (Euclidean) or |det| in lattice
/// coordinates (exact rational).
fn box_volume<F: SeriesField>(
    field: &F,
    ip: &InnerProduct,
    rays: &[QVector],
    measure: &Measure<'_>,
) -> Result<F::C> {
    match measure {
        Measure::Euclidean => {
            let m = QMatrix::from_columns(&rays.to_vec());
            let g = m.transpose().mul(ip.gram()).mul(&m).det();
            field.sqrt(&g)
        }
        Measure::LatticeNormalized(l) => {
            let cols: Vec<QVector> = rays
                .iter()
                .map(|r| l.span_coords(r).ok_or(Error::NotRational))
                .collect::<Result<Vec<_>>>()?;
            let d = QMatrix::from_columns(&cols).det();
            Ok(field.from_rat(&d.abs()))
        }
    }
}

/// I of a single cone along the line: zero for cones with lineality;
/// otherwise sum over closed simplicial pieces of
/// vol(box) * e^{<a, apex>} * prod_j (-1/<a, v_j>), a = xi + t beta.
pub fn cone_i_series<F: SeriesField>(
    field: &F,
    cone: &Cone,
    measure: &Measure<'_>,
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    if !cone.is_pointed() {
        return Ok(Series::zero());
    }
    let len = ctx.window(cone.ambient_dim());
    if cone.rays.is_empty() {
        // A point: integral with the zero-dimensional convention vol = 1.
        let ((re0, im0), c1) = line.pair(&ctx.ip, &cone.apex);
        let c1v = field.from_rat(&c1);
        return exp_series(field, len, &(re0, im0), &c1v);
    }
    let pieces = decompose_cone(cone, DecomposeMode::Integral)?;
    let mut total: Series<F::C> = Series::zero();
    for (_, piece) in &pieces {
        let vol = box_volume(field, &ctx.ip, &piece.rays, measure)?;
        let ((re0, im0), c1) = line.pair(&ctx.ip, &piece.apex);
        let c1v = field.from_rat(&c1);
        let mut s = exp_series(field, len, &(re0, im0), &c1v)?.scale(&vol);
        for v in &piece.rays {
            let lf = linear_factor(field, len, line, &ctx.ip, v)?;
            s = s.mul(&lf.inv()?.neg());
        }
        total = total.add(&s);
    }
    Ok(total.truncate_to(ctx.trunc))
}

/// I of a virtual cone: coefficient-weighted sum of the term series.
pub fn virtual_i_series<F: SeriesField>(
    field: &F,
    vc: &VirtualCone,
    measure: &Measure<'_>,
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    let mut total: Series<F::C> = Series::zero();
    for t in &vc.terms {
        let s = cone_i_series(field, &t.cone, measure, line, ctx)?;
        let c = field.from_rat(&Rat::from_integer(t.coeff.into()));
        total = total.add(&s.scale(&c));
    }
    Ok(total)
}

/// S of a single cone over the affine lattice shift + L along the line.
/// Cones with lineality contribute zero. The cone may span a strict
/// subspace of span(L): the sum then reduces to the section lattice of the
/// affine span, and vanishes when that span misses shift + L entirely.
pub fn cone_s_series<F: SeriesField>(
    field: &F,
    cone: &Cone,
    l: &Lattice,
    shift: &[Rat],
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    if !cone.is_pointed() {
        return Ok(Series::zero());
    }
    let len = ctx.window(cone.ambient_dim());
    let span = cone.span_basis();
    if span.ncols() < l.rank() {
        // Find one point of (shift + L) in apex + span(cone).
        match lattice_point_in_affine(l, shift, &cone.apex, &span)? {
            None => return Ok(Series::zero()),
            Some(p) => {
                let l_w = lattice_section(l, &span)?;
                let moved = Cone {
                    apex: sub_vec(&cone.apex, &p),
                    rays: cone.rays.clone(),
                    lineality: cone.lineality.clone(),
                };
                let zero_shift = vec![Rat::zero(); l.ambient_dim()];
                let inner = cone_s_series(field, &moved, &l_w, &zero_shift, line, ctx)?;
                // S_{shift+L}(cone) = e^{<a, p>} S_{L_W}(cone - p).
                let ((re0, im0), c1) = line.pair(&ctx.ip, &p);
                let c1v = field.from_rat(&c1);
                let e = exp_series(field, len, &(re0, im0), &c1v)?;
                return Ok(e.mul(&inner).truncate_to(ctx.trunc));
            }
        }
    }
    if cone.rays.is_empty() {
        // A single point: e^{<a, apex>} if the apex lies on shift + L.
        let d = sub_vec(&cone.apex, shift);
        if l.contains(&d) {
            let ((re0, im0), c1) = line.pair(&ctx.ip, &cone.apex);
            let c1v = field.from_rat(&c1);
            return exp_series(field, len, &(re0, im0), &c1v);
        }
        return Ok(Series::zero());
    }
    // Full rank in span(L): primitive rays and half-open pieces.
    let prim = lattice_primitive_rays(cone, l)?;
    let prim_cone = Cone {
        apex: cone.apex.clone(),
        rays: prim,
        lineality: Vec::new(),
    };
    let pieces = decompose_cone(&prim_cone, DecomposeMode::Discrete)?;
    let mut total: Series<F::C> = Series::zero();
    for (_, piece) in &pieces {
        let pts = parallelepiped_points(&piece.rays, l, &piece.apex, shift, &piece.open_facets)?;
        let mut numer: Series<F::C> = Series::zero();
        for p in &pts {
            let ((re0, im0), c1) = line.pair(&ctx.ip, p);
            let c1v = field.from_rat(&c1);
            numer = numer.add(&exp_series(field, len, &(re0, im0), &c1v)?);
        }
        if numer.is_structural_zero() {
            continue;
        }
        let mut s = numer;
        for v in &piece.rays {
            s = s.mul(&inv_one_minus_exp(field, len, line, &ctx.ip, v)?);
        }
        total = total.add(&s);
    }
    Ok(total.truncate_to(ctx.trunc))
}

/// S of a virtual cone over shift + L.
pub fn virtual_s_series<F: SeriesField>(
    field: &F,
    vc: &VirtualCone,
    l: &Lattice,
    shift: &[Rat],
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    let mut total: Series<F::C> = Series::zero();
    for t in &vc.terms {
        let s = cone_s_series(field, &t.cone, l, shift, line, ctx)?;
        let c = field.from_rat(&Rat::from_integer(t.coeff.into()));
        total = total.add(&s.scale(&c));
    }
    Ok(total)
}

/// One lattice point in (shift + L) ∩ (apex + span W), if any.
fn lattice_point_in_affine(
    l: &Lattice,
    shift: &[Rat],
    apex: &[Rat],
    w: &QMatrix,
) -> Result<Option<QVector>> {
    // Condition: T (shift + B x - apex) = 0 where rows of T annihilate W.
    let t = if w.ncols() == 0 {
        QMatrix::identity(l.ambient_dim())
    } else {
        w.transpose().kernel().transpose()
    };
    if t.nrows() == 0 {
        return Ok(Some(shift.to_vec()));
    }
    let m = t.mul(l.basis());
    let rhs: QVector = t.mul_vec(&sub_vec(apex, shift));
    match solve_integer(&m, &rhs) {
        None => Ok(None),
        Some(x) => Ok(Some(crate::matrix::add_vec(shift, &l.basis().mul_vec(&x)))),
    }
}

/// One integer solution of m x = b (rational data, x constrained integral).
pub fn solve_integer(m: &QMatrix, b: &[Rat]) -> Option<QVector> {
    use num_bigint::BigInt;
    let scale =
        crate::rat::lcm_denoms((0..m.nrows()).flat_map(|i| m.row(i).iter()).chain(b.iter()));
    let sc = Rat::from_integer(scale);
    let mut mi = crate::normal_forms::IMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m.get(i, j) * &sc;
            debug_assert!(v.denom().is_one());
            mi.set(i, j, v.numer().clone());
        }
    }
    let bi: Vec<BigInt> = b
        .iter()
        .map(|x| {
            let v = x * &sc;
            debug_assert!(v.denom().is_one());
            v.numer().clone()
        })
        .collect();
    let (h, u) = crate::normal_forms::hnf_columns(&mi);
    // Solve H y = b by pivot substitution; free coordinates stay zero.
    let mut y = vec![BigInt::from(0); h.ncols()];
    let mut resid = bi;
    for j in 0..h.ncols() {
        // Topmost nonzero row of column j.
        let Some(pivot_row) = (0..h.nrows()).find(|&i| !h.get(i, j).is_zero()) else {
            continue;
        };
        let r = &resid[pivot_row];
        let p = h.get(pivot_row, j);
        if (r % p).is_zero() {
            let q = r / p;
            if !q.is_zero() {
                for i in 0..h.nrows() {
                    let v = &resid[i] - &q * h.get(i, j);
                    resid[i] = v;
                }
                y[j] = q;
            }
        }
    }
    if resid.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let x: QVector = (0..u.nrows())
        .map(|i| {
            let mut acc = BigInt::from(0);
            for (j, yj) in y.iter().enumerate() {
                acc += u.get(i, j) * yj;
            }
            Rat::from_integer(acc)
        })
        .collect();
    Some(x)
}

/// Entire function I(p; .) along the line, as the sum of vertex tangent
/// cone series (the classical expansion; the sum is holomorphic even when
/// terms have poles).
pub fn polytope_i_series<F: SeriesField>(
    field: &F,
    fl: &crate::polytope::FaceLattice,
    measure: &Measure<'_>,
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    let mut total: Series<F::C> = Series::zero();
    for f in fl.faces_of_dim(0) {
        let (tangent, _, _) = crate::polytope::cones_at_face(fl, f, &ctx.ip);
        total = total.add(&cone_i_series(field, &tangent, measure, line, ctx)?);
    }
    Ok(total)
}

/// Entire function S_{shift+L}(p; .) along the line by direct enumeration
/// (p is bounded, so the sum is finite).
pub fn polytope_s_series<F: SeriesField>(
    field: &F,
    p: &Polytope,
    l: &Lattice,
    shift: &[Rat],
    line: &GenericLine,
    ctx: &EvalCtx,
) -> Result<Series<F::C>> {
    let len = ctx.window(p.ambient_dim());
    let pts = crate::oracle::lattice_points(p, l, shift)?;
    let mut total: Series<F::C> = Series::zero();
    for pt in &pts {
        let ((re0, im0), c1) = line.pair(&ctx.ip, pt);
        let c1v = field.from_rat(&c1);
        total = total.add(&exp_series(field, len, &(re0, im0), &c1v)?);
    }
    Ok(total.truncate_to(ctx.trunc))
}

/// Collects every ray that can occur in evaluations over a face lattice:
/// all transverse directions between nested faces plus all lattice
/// primitive scalings are not needed (scaling preserves nonvanishing).
pub fn all_flag_rays(fl: &crate::polytope::FaceLattice, ip: &InnerProduct) -> Vec<QVector> {
    let mut rays = Vec::new();
    for small in 0..fl.faces.len() {
        for big in 0..fl.faces.len() {
            if small != big && fl.contains_face(small, big) {
                let t = crate::polytope::transverse_within(fl, small, big, ip);
                rays.extend(t.rays);
            }
        }
    }
    rays.sort_by(crate::polytope::lex_cmp);
    rays.dedup();
    rays
}
