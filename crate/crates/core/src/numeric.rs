//! Floating-point cross-validation: fixed-step RK4 orbits (real or
//! complexified state), confinement checks for invariant surfaces, and
//! constancy checks for Darboux functions evaluated through their real
//! forms.

use crate::darboux::{DarbouxFunction, RealFactorDescription};
use crate::field::PolyVectorField;
use crate::poly::MultiPoly;
use crate::scalar::rat_to_f64;
use crate::sphere::SphereContext;
use crate::surfaces::InvariantSurface;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Orbit {
    /// Time-ordered states, one every `stepsize` starting at t = 0.
    pub states: Vec<Vec<Complex64>>,
    pub stepsize: f64,
    /// Max |G| over raw post-step states, recorded before renormalization.
    pub drift: f64,
    /// Set when a sphere-mode orbit exceeded the drift tolerance.
    pub drift_flagged: bool,
}

impl Orbit {
    pub fn time(&self, idx: usize) -> f64 {
        idx as f64 * self.stepsize
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegrateError {
    Diverged { step: usize },
    OffSphereStart,
}

impl std::fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IntegrateError::Diverged { step } => {
                write!(f, "orbit diverged to a non-finite state at step {step}")
            }
            IntegrateError::OffSphereStart => {
                write!(f, "sphere-mode initial point is not on the sphere (|G| > 1e-12)")
            }
        }
    }
}

impl std::error::Error for IntegrateError {}

/// Terms flattened to f64 for fast repeated evaluation.
struct CompiledPoly {
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl CompiledPoly {
    fn new(p: &MultiPoly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| {
                    let (re, im) = c.to_f64();
                    (Complex64::new(re, im), m.0.clone())
                })
                .collect(),
        }
    }

    fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t *= x[i];
                }
            }
            acc += t;
        }
        acc
    }
}

struct CompiledField {
    components: Vec<CompiledPoly>,
}

impl CompiledField {
    fn new(x: &PolyVectorField) -> Self {
        CompiledField {
            components: x.components().iter().map(CompiledPoly::new).collect(),
        }
    }

    fn eval(&self, state: &[Complex64], out: &mut [Complex64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(state);
        }
    }
}

fn g_value(state: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(-1.0, 0.0);
    for z in state {
        s += z * z;
    }
    s
}

/// Classical fixed-step RK4. In sphere mode (real states only) each step is
/// followed by radial renormalization onto S^n, and the raw |G| before
/// renormalization feeds the drift statistic.
pub fn integrate(
    x: &PolyVectorField,
    x0: &[f64],
    stepsize: f64,
    steps: usize,
    ctx: Option<&SphereContext>,
) -> Result<Orbit, IntegrateError> {
    let start: Vec<Complex64> = x0.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    integrate_complex(x, &start, stepsize, steps, ctx)
}

/// RK4 over complexified states; complex fields get honest orbits this way.
pub fn integrate_complex(
    x: &PolyVectorField,
    x0: &[Complex64],
    stepsize: f64,
    steps: usize,
    ctx: Option<&SphereContext>,
) -> Result<Orbit, IntegrateError> {
    assert!(stepsize > 0.0, "stepsize must be positive");
    assert_eq!(x0.len(), x.nvars(), "initial point dimension mismatch");
    if ctx.is_some() && g_value(x0).norm() > 1e-12 {
        return Err(IntegrateError::OffSphereStart);
    }
    let field = CompiledField::new(x);
    let n = x0.len();
    let h = stepsize;
    let mut state = x0.to_vec();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(state.clone());
    let mut drift: f64 = 0.0;

    let mut k1 = vec![Complex64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    for step in 0..steps {
        field.eval(&state, &mut k1);
        for i in 0..n {
            tmp[i] = state[i] + k1[i] * (h / 2.0);
        }
        field.eval(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = state[i] + k2[i] * (h / 2.0);
        }
        field.eval(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = state[i] + k3[i] * h;
        }
        field.eval(&tmp, &mut k4);
        for i in 0..n {
            state[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(IntegrateError::Diverged { step });
        }
        if ctx.is_some() {
            drift = drift.max(g_value(&state).norm());
            let r2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
            let r = r2.sqrt();
            for z in state.iter_mut() {
                *z /= r;
            }
        }
        states.push(state.clone());
    }
    let drift_flagged = ctx.is_some() && drift > 1e-9;
    Ok(Orbit {
        states,
        stepsize,
        drift,
        drift_flagged,
    })
}

#[derive(Clone, Debug)]
pub struct SurfaceCheck {
    pub trials: usize,
    pub max_abs_f: f64,
    pub pass: bool,
    /// Trials skipped because no real start point exists (complex surface).
    pub skipped: bool,
}

/// Sample start points on {f = 0} (∩ S^n in sphere mode) for a linear real
/// f and assert the orbit keeps |f| below `tol`.
pub fn check_surface_numeric(
    x: &PolyVectorField,
    surface: &InvariantSurface,
    ctx: Option<&SphereContext>,
    trials: usize,
    tol: f64,
    stepsize: f64,
    steps: usize,
    seed: u64,
) -> SurfaceCheck {
    let f = &surface.f;
    if !f.has_real_coeffs() || f.degree() != Some(1) {
        return SurfaceCheck {
            trials: 0,
            max_abs_f: 0.0,
            pass: true,
            skipped: true,
        };
    }
    let compiled = CompiledPoly::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs = 0.0f64;
    let mut ran = 0;
    for _ in 0..trials {
        let Some(start) = sample_on_surface(f, ctx, &mut rng) else {
            continue;
        };
        // Complex fields get ambient complexified orbits; renormalization
        // only applies to real fields on the sphere.
        let real_field = x.components().iter().all(|p| p.has_real_coeffs());
        let orbit = if real_field {
            integrate(x, &start, stepsize, steps, ctx)
        } else {
            integrate(x, &start, stepsize, steps, None)
        };
        let Ok(orbit) = orbit else { continue };
        ran += 1;
        for state in &orbit.states {
            max_abs = max_abs.max(compiled.eval(state).norm());
        }
    }
    SurfaceCheck {
        trials: ran,
        max_abs_f: max_abs,
        pass: ran > 0 && max_abs <= tol,
        skipped: ran == 0,
    }
}

/// A real start point with f(p) = 0, on the sphere when ctx is given.
fn sample_on_surface(
    f: &MultiPoly,
    ctx: Option<&SphereContext>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    let nvars = f.nvars();
    let mut a = vec![0.0f64; nvars];
    let mut c = 0.0f64;
    for (m, coeff) in f.terms() {
        let (re, _) = coeff.to_f64();
        match m.total_degree() {
            0 => c = re,
            1 => a[m.0.iter().position(|&e| e == 1).unwrap()] = re,
            _ => return None,
        }
    }
    let norm2: f64 = a.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return None;
    }
    // Orthonormal basis of the hyperplane direction space.
    let basis = orthonormal_complement(&a);
    let foot: Vec<f64> = a.iter().map(|ai| -c * ai / norm2).collect();
    match ctx {
        None => {
            let mut p = foot;
            for b in &basis {
                let w: f64 = rng.gen_range(-1.0..1.0);
                for i in 0..nvars {
                    p[i] += w * b[i];
                }
            }
            Some(p)
        }
        Some(_) => {
            // {f=0} ∩ S^n is a sphere of radius sqrt(1 − |foot|²) around the
            // foot point inside the hyperplane.
            let foot_norm2: f64 = foot.iter().map(|v| v * v).sum();
            let r2 = 1.0 - foot_norm2;
            if r2 <= 1e-12 {
                return None; // tangent or empty real section
            }
            let r = r2.sqrt();
            let mut dir = vec![0.0f64; nvars];
            loop {
                let mut norm = 0.0;
                for b in &basis {
                    let w: f64 = rng.gen_range(-1.0..1.0);
                    for i in 0..nvars {
                        dir[i] += w * b[i];
                    }
                }
                for v in &dir {
                    norm += v * v;
                }
                if norm > 1e-6 {
                    let s = r / norm.sqrt();
                    return Some(
                        (0..nvars).map(|i| foot[i] + s * dir[i]).collect(),
                    );
                }
                dir.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }
}

fn orthonormal_complement(a: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = a.iter().map(|v| v / norm).collect();
    let mut basis: Vec<Vec<f64>> = vec![unit];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for b in &basis {
            let dot: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
            for j in 0..n {
                e[j] -= dot * b[j];
            }
        }
        let nrm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 1e-9 {
            e.iter_mut().for_each(|v| *v /= nrm);
            basis.push(e);
        }
    }
    basis.remove(0); // drop the normal direction
    basis
}

#[derive(Clone, Debug)]
pub struct FirstIntegralCheck {
    pub orbits_used: usize,
    pub orbits_excluded: usize,
    pub max_relative_variation: f64,
    pub pass: bool,
}

/// Evaluate the product of real-form factors at one state; `None` inside the
/// guard band of a factor's zero set.
pub fn evaluate_real_factors(
    factors: &[RealFactorDescription],
    state: &[Complex64],
) -> Option<f64> {
    let compiled: Vec<CompiledRealFactor> = factors.iter().map(CompiledRealFactor::new).collect();
    let mut value = 1.0;
    for f in &compiled {
        value *= f.eval(state)?;
    }
    Some(value)
}

/// Evaluate Π of the real-form factors (times e^{σt}) along orbits and
/// assert the relative variation stays below `tol`. Orbits that touch a
/// factor's zero set (guard band 1e−9) are excluded and reported.
pub fn check_first_integral_numeric(
    factors: &[RealFactorDescription],
    d: &DarbouxFunction,
    orbits: &[Orbit],
    tol: f64,
) -> FirstIntegralCheck {
    let sigma = rat_to_f64(&d.sigma);
    let compiled: Vec<CompiledRealFactor> =
        factors.iter().map(CompiledRealFactor::new).collect();
    let mut used = 0;
    let mut excluded = 0;
    let mut worst: f64 = 0.0;
    'orbit: for orbit in orbits {
        let mut reference: Option<f64> = None;
        let mut orbit_worst: f64 = 0.0;
        for (idx, state) in orbit.states.iter().enumerate() {
            let mut value = (sigma * orbit.time(idx)).exp();
            for f in &compiled {
                match f.eval(state) {
                    Some(v) => value *= v,
                    None => {
                        excluded += 1;
                        continue 'orbit;
                    }
                }
            }
            match reference {
                None => reference = Some(value),
                Some(h0) => {
                    let rel = (value - h0).abs() / h0.abs().max(f64::MIN_POSITIVE);
                    orbit_worst = orbit_worst.max(rel);
                }
            }
        }
        used += 1;
        worst = worst.max(orbit_worst);
    }
    FirstIntegralCheck {
        orbits_used: used,
        orbits_excluded: excluded,
        max_relative_variation: worst,
        pass: used > 0 && worst <= tol,
    }
}

struct CompiledRealFactor {
    kind: CompiledKind,
}

enum CompiledKind {
    RealPower {
        f: CompiledPoly,
        lambda: f64,
    },
    ConjugatePair {
        base: CompiledPoly,
        re_f: CompiledPoly,
        im_f: CompiledPoly,
        power: f64,
        angle_coeff: f64,
    },
    ExpReal {
        g: CompiledPoly,
        h: CompiledPoly,
        mu: f64,
    },
    ExpPair {
        g: CompiledPoly,
        h: CompiledPoly,
        mu: Complex64,
    },
}

const GUARD: f64 = 1e-9;

impl CompiledRealFactor {
    fn new(d: &RealFactorDescription) -> Self {
        let kind = match d {
            RealFactorDescription::RealPower { f, lambda } => CompiledKind::RealPower {
                f: CompiledPoly::new(f),
                lambda: rat_to_f64(lambda),
            },
            RealFactorDescription::ConjugatePair {
                base,
                re_f,
                im_f,
                power,
                angle_coeff,
            } => CompiledKind::ConjugatePair {
                base: CompiledPoly::new(base),
                re_f: CompiledPoly::new(re_f),
                im_f: CompiledPoly::new(im_f),
                power: rat_to_f64(power),
                angle_coeff: rat_to_f64(angle_coeff),
            },
            RealFactorDescription::ExpReal { g, h, mu } => CompiledKind::ExpReal {
                g: CompiledPoly::new(g),
                h: CompiledPoly::new(h),
                mu: rat_to_f64(mu),
            },
            RealFactorDescription::ExpPair { g, h, mu } => {
                let (re, im) = mu.to_f64();
                CompiledKind::ExpPair {
                    g: CompiledPoly::new(g),
                    h: CompiledPoly::new(h),
                    mu: Complex64::new(re, im),
                }
            }
        };
        CompiledRealFactor { kind }
    }

    /// None when the state is inside the guard band of a zero set.
    fn eval(&self, state: &[Complex64]) -> Option<f64> {
        match &self.kind {
            CompiledKind::RealPower { f, lambda } => {
                let v = f.eval(state).norm();
                if v < GUARD {
                    return None;
                }
                Some(v.powf(*lambda))
            }
            CompiledKind::ConjugatePair {
                base,
                re_f,
                im_f,
                power,
                angle_coeff,
            } => {
                let b = base.eval(state).re;
                if b.abs() < GUARD {
                    return None;
                }
                // two-argument angle avoids arctan branch jumps
                let angle = im_f.eval(state).re.atan2(re_f.eval(state).re);
                Some(b.powf(*power) * (angle_coeff * angle).exp())
            }
            CompiledKind::ExpReal { g, h, mu } => {
                let hv = h.eval(state).re;
                if hv.abs() < GUARD {
                    return None;
                }
                Some((mu * g.eval(state).re / hv).exp())
            }
            CompiledKind::ExpPair { g, h, mu } => {
                let hv = h.eval(state);
                if hv.norm() < GUARD {
                    return None;
                }
                let w = mu * g.eval(state) / hv;
                Some((2.0 * w.re).exp())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pxyz, rotation_field, single_parallel_field};
    use crate::scalar::Rat;
    use crate::surfaces::{cofactor_solve, CofactorOutcome};
    use num_traits::Zero;

    #[test]
    fn rotation_stays_on_circle() {
        let ctx = SphereContext::new(2);
        let orbit = integrate(
            &rotation_field(),
            &[1.0, 0.0, 0.0],
            1e-3,
            2000,
            Some(&ctx),
        )
        .unwrap();
        assert!(orbit.drift < 1e-12, "drift {}", orbit.drift);
        assert!(!orbit.drift_flagged);
    }

    #[test]
    fn zero_field_constant_orbit() {
        let vars = vec!["x".into(), "y".into()];
        let zero = PolyVectorField::new(vec![
            crate::parse::parse_poly("0", &vars).unwrap(),
            crate::parse::parse_poly("0", &vars).unwrap(),
        ]);
        let orbit = integrate(&zero, &[0.3, -0.4], 0.1, 50, None).unwrap();
        assert_eq!(orbit.states.first(), orbit.states.last());
    }

    #[test]
    fn invariant_plane_confines_orbits() {
        let x = single_parallel_field();
        let ctx = SphereContext::new(2);
        let surface = match cofactor_solve(&x, &pxyz("z"), Some(&ctx)) {
            CofactorOutcome::Invariant(s) => s,
            other => panic!("{other:?}"),
        };
        let check =
            check_surface_numeric(&x, &surface, Some(&ctx), 5, 1e-6, 1e-3, 5_000, 9);
        assert!(check.pass, "max |f| = {}", check.max_abs_f);
    }

    #[test]
    fn non_invariant_plane_fails() {
        let x = crate::fixtures::real_two_meridian_field();
        let ctx = SphereContext::new(2);
        // x + y is not invariant for this field; fake a surface to watch the
        // orbit leave it.
        let fake = InvariantSurface {
            f: pxyz("x + y"),
            cofactor: pxyz("0"),
            kind: crate::surfaces::SurfaceKind::Meridian,
            multiplicity: 1,
            sphere_multiplier: None,
        };
        let check = check_surface_numeric(&x, &fake, Some(&ctx), 5, 1e-6, 1e-3, 2_000, 11);
        assert!(!check.pass);
    }

    #[test]
    fn sphere_norm_is_first_integral_of_rotation() {
        let x = rotation_field();
        let orbit = integrate(&x, &[0.6, 0.0, 0.8], 1e-3, 5_000, None).unwrap();
        let d = DarbouxFunction {
            surface_exponents: vec![crate::scalar::GaussianRational::one()],
            exp_exponents: vec![],
            sigma: Rat::zero(),
        };
        let factor = RealFactorDescription::RealPower {
            f: pxyz("x^2 + y^2 + z^2"),
            lambda: crate::scalar::rat(1, 1),
        };
        let check = check_first_integral_numeric(&[factor], &d, &[orbit], 1e-9);
        assert!(check.pass, "variation {}", check.max_relative_variation);
    }

    #[test]
    fn non_integral_varies() {
        let x = rotation_field();
        let orbit = integrate(&x, &[0.6, 0.0, 0.8], 1e-2, 1_000, None).unwrap();
        let d = DarbouxFunction {
            surface_exponents: vec![crate::scalar::GaussianRational::one()],
            exp_exponents: vec![],
            sigma: Rat::zero(),
        };
        let factor = RealFactorDescription::RealPower {
            f: pxyz("x"),
            lambda: crate::scalar::rat(1, 1),
        };
        let check = check_first_integral_numeric(&[factor], &d, &[orbit], 1e-6);
        assert!(!check.pass);
        assert!(check.max_relative_variation > 0.1);
    }

    #[test]
    fn rk4_order_on_sphere_drift() {
        // Without renormalization the accumulated |G| drift of a tangent
        // field scales like h^4: halving h divides it by ~16.
        let x = crate::fixtures::real_two_meridian_field();
        let p0 = [0.6, 0.0, 0.8];
        let drift_at = |h: f64| {
            let steps = (1.0 / h) as usize;
            let orbit = integrate(&x, &p0, h, steps, None).unwrap();
            orbit
                .states
                .iter()
                .map(|s| g_value(s).norm())
                .fold(0.0f64, f64::max)
        };
        let d1 = drift_at(2e-2);
        let d2 = drift_at(1e-2);
        let ratio = d1 / d2;
        assert!(
            (8.0..40.0).contains(&ratio),
            "expected ~16x reduction, got {ratio} ({d1} -> {d2})"
        );
    }

    #[test]
    fn renormalization_per_step_drift_is_order_five() {
        let x = crate::fixtures::real_two_meridian_field();
        let ctx = SphereContext::new(2);
        let p0 = [0.6, 0.0, 0.8];
        let one_step_drift = |h: f64| {
            integrate(&x, &p0, h, 1, Some(&ctx)).unwrap().drift
        };
        let d1 = one_step_drift(2e-1);
        let d2 = one_step_drift(1e-1);
        let ratio = d1 / d2;
        assert!(
            (16.0..70.0).contains(&ratio),
            "expected ~32x per-step reduction, got {ratio} ({d1} -> {d2})"
        );
    }

    #[test]
    fn off_sphere_start_rejected() {
        let ctx = SphereContext::new(2);
        let err = integrate(&rotation_field(), &[1.0, 0.5, 0.0], 1e-3, 10, Some(&ctx))
            .unwrap_err();
        assert_eq!(err, IntegrateError::OffSphereStart);
    }

    #[test]
    fn real_factor_evaluation_values() {
        use crate::darboux::{real_form, real_form_exponential};
        use crate::scalar::GaussianRational;
        let state = [
            Complex64::new(0.3, 0.0),
            Complex64::new(0.7, 0.0),
            Complex64::new(0.2, 0.0),
        ];
        // A conjugate exponential pair exp((x+iy)/1) with mu = 1 merges to
        // exp(2x).
        let pair = real_form_exponential(
            &pxyz("x + i*y"),
            &pxyz("1"),
            &GaussianRational::one(),
        );
        let got = evaluate_real_factors(&[pair], &state).unwrap();
        assert!((got - (2.0 * 0.3f64).exp()).abs() < 1e-12);
        // A conjugate surface pair (x+iy) with lambda = i evaluates to
        // exp(-2·atan2(y, x)).
        let pair = real_form(&pxyz("x + i*y"), &GaussianRational::i());
        let got = evaluate_real_factors(&[pair], &state).unwrap();
        let expected = (-2.0 * 0.7f64.atan2(0.3)).exp();
        assert!((got - expected).abs() < 1e-12);
        // And with lambda = 1 it is just x² + y².
        let pair = real_form(&pxyz("x + i*y"), &GaussianRational::one());
        let got = evaluate_real_factors(&[pair], &state).unwrap();
        assert!((got - (0.09 + 0.49)).abs() < 1e-12);
    }
}
