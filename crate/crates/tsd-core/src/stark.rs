//! AC-Stark compensation for two-photon Rydberg excitation: Clebsch-Gordan
//! algebra, the branching factor `C^2` of the two qubit states' couplings to
//! the intermediate manifold, and the solvers for the detuning and the
//! field-amplitude ratio that cancel the differential shifts.
//!
//! Clebsch-Gordan coefficients are evaluated with exact big-rational
//! arithmetic under the square root (the Racah sum is exactly rational), so
//! squared couplings and their ratios are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A value of the form `coefficient * sqrt(radicand)` with both parts exact
/// rationals (`radicand >= 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtRational {
    pub coefficient: BigRational,
    pub radicand: BigRational,
}

impl SqrtRational {
    pub fn zero() -> Self {
        Self { coefficient: BigRational::zero(), radicand: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero() || self.radicand.is_zero()
    }

    /// Exact square.
    pub fn squared(&self) -> BigRational {
        &self.coefficient * &self.coefficient * &self.radicand
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coefficient.to_f64().unwrap_or(f64::NAN);
        let r = self.radicand.to_f64().unwrap_or(f64::NAN);
        c * r.sqrt()
    }
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Exact Clebsch-Gordan coefficient `<j1 m1 j2 m2 | j m>` in the
/// Condon-Shortley convention; quantum numbers are doubled so half-integers
/// stay integral.
///
/// Malformed `j` values (negative, or paired with an `m` of the wrong
/// integer/half-integer parity) are an error; everything else that merely
/// fails a selection rule (`m != m1 + m2`, `|m| > j`, triangle rule,
/// incompatible coupling parity) returns exact zero.
pub fn clebsch_gordan_exact(
    tj1: i32,
    tj2: i32,
    tj: i32,
    tm1: i32,
    tm2: i32,
    tm: i32,
) -> Result<SqrtRational> {
    for (j, m) in [(tj1, tm1), (tj2, tm2), (tj, tm)] {
        if j < 0 || (j - m) % 2 != 0 {
            return Err(Error::invalid(format!(
                "malformed angular momentum (2j = {j}, 2m = {m})"
            )));
        }
    }
    if tm1 + tm2 != tm
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm.abs() > tj
        || tj > tj1 + tj2
        || tj < (tj1 - tj2).abs()
        || (tj1 + tj2 + tj) % 2 != 0
    {
        return Ok(SqrtRational::zero());
    }

    let a = ((tj1 + tj2 - tj) / 2) as i64;
    let g = ((tj1 - tj2 + tj) / 2) as i64;
    let h = ((-tj1 + tj2 + tj) / 2) as i64;
    let p1 = ((tj1 + tj2 + tj) / 2 + 1) as i64;
    let j1p = ((tj1 + tm1) / 2) as i64;
    let j1m = ((tj1 - tm1) / 2) as i64;
    let j2p = ((tj2 + tm2) / 2) as i64;
    let j2m = ((tj2 - tm2) / 2) as i64;
    let jp = ((tj + tm) / 2) as i64;
    let jm = ((tj - tm) / 2) as i64;

    let mut radicand = ratio(BigInt::from(tj as i64 + 1), BigInt::one());
    radicand *= ratio(factorial(a) * factorial(g) * factorial(h), factorial(p1));
    radicand *= ratio(
        factorial(j1p)
            * factorial(j1m)
            * factorial(j2p)
            * factorial(j2m)
            * factorial(jp)
            * factorial(jm),
        BigInt::one(),
    );

    let d = ((tj - tj2 + tm1) / 2) as i64;
    let e = ((tj - tj1 - tm2) / 2) as i64;
    let k_min = 0_i64.max(-d).max(-e);
    let k_max = a.min(j1m).min(j2p);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(j1m - k)
            * factorial(j2p - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = ratio(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(SqrtRational { coefficient: sum, radicand })
}

/// Clebsch-Gordan coefficient for (half-)integer arguments.
pub fn clebsch_gordan<T: Scalar>(j1: T, j2: T, j: T, m1: T, m2: T, m: T) -> Result<T> {
    let doubled = |x: T, name: &str| -> Result<i32> {
        let d = (x * T::cst(2.0)).as_f64();
        let r = d.round();
        if (d - r).abs() > 1e-9 {
            return Err(Error::invalid(format!("{name} is not a half-integer")));
        }
        Ok(r as i32)
    };
    let cg = clebsch_gordan_exact(
        doubled(j1, "j1")?,
        doubled(j2, "j2")?,
        doubled(j, "j")?,
        doubled(m1, "m1")?,
        doubled(m2, "m2")?,
        doubled(m, "m")?,
    )?;
    Ok(T::cst(cg.to_f64()))
}

/// A hyperfine qubit state `|F, mF>` (doubled quantum numbers).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HyperfineState {
    pub two_f: i32,
    pub two_mf: i32,
}

/// Transition specification for the branching factor: both qubit states
/// couple to one intermediate fine-structure level through a single
/// polarization component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CFactorSpec {
    /// Electronic J of the ground level (doubled).
    pub two_j_ground: i32,
    /// Electronic J of the intermediate level (doubled).
    pub two_j_excited: i32,
    /// Nuclear spin I (doubled).
    pub two_i: i32,
    /// Photon polarization component q (doubled: -2, 0, +2).
    pub two_q: i32,
    /// Numerator state (the qubit state whose coupling goes on top).
    pub numerator: HyperfineState,
    pub denominator: HyperfineState,
}

impl CFactorSpec {
    /// The cesium configuration: `|0> = |6S1/2, F=4, mF=4>`,
    /// `|1> = |6S1/2, F=3, mF=3>`, intermediate `7P1/2`, sigma-minus light.
    pub fn cesium() -> Self {
        Self {
            two_j_ground: 1,
            two_j_excited: 1,
            two_i: 7,
            two_q: -2,
            numerator: HyperfineState { two_f: 8, two_mf: 8 },
            denominator: HyperfineState { two_f: 6, two_mf: 6 },
        }
    }
}

/// Exact squared coupling of one hyperfine state to the intermediate
/// manifold: the state is decomposed over `|mJ, mI>`, each component is taken
/// to `|mJ + q>` by the photon, and the squared amplitudes are summed over
/// the distinct final `(me, mI)` states.
fn coupling_strength_exact(spec: &CFactorSpec, state: HyperfineState) -> Result<BigRational> {
    let mut total = BigRational::zero();
    let mut t_mj = -spec.two_j_ground;
    while t_mj <= spec.two_j_ground {
        let t_mi = state.two_mf - t_mj;
        let t_me = t_mj + spec.two_q;
        if t_mi.abs() <= spec.two_i && t_me.abs() <= spec.two_j_excited {
            let decomposition = clebsch_gordan_exact(
                spec.two_j_ground,
                spec.two_i,
                state.two_f,
                t_mj,
                t_mi,
                state.two_mf,
            )?;
            let photon = clebsch_gordan_exact(
                spec.two_j_ground,
                2,
                spec.two_j_excited,
                t_mj,
                spec.two_q,
                t_me,
            )?;
            total += decomposition.squared() * photon.squared();
        }
        t_mj += 2;
    }
    Ok(total)
}

/// Exact ratio of the squared couplings of the two qubit states.
pub fn c_factor_squared_exact(spec: &CFactorSpec) -> Result<BigRational> {
    let num = coupling_strength_exact(spec, spec.numerator)?;
    let den = coupling_strength_exact(spec, spec.denominator)?;
    if den.is_zero() {
        return Err(Error::NoSolution(
            "denominator state does not couple to the intermediate manifold".into(),
        ));
    }
    Ok(num / den)
}

/// Branching factor `C^2` as a scalar.
pub fn c_factor_squared<T: Scalar>(spec: &CFactorSpec) -> Result<T> {
    Ok(T::cst(c_factor_squared_exact(spec)?.to_f64().unwrap_or(f64::NAN)))
}

/// Intermediate detuning `Delta = omega_q / (C^2 - 1)` that balances the
/// resonant light shifts of the two qubit states.
pub fn solve_compensation<T: Scalar>(omega_q: T, c_factor_sq: T) -> Result<T> {
    if omega_q <= T::zero() {
        return Err(Error::invalid("omega_q must be positive"));
    }
    if c_factor_sq <= T::one() {
        return Err(Error::NoSolution(
            "C^2 <= 1: the off-resonant shift cannot be balanced".into(),
        ));
    }
    Ok(omega_q / (c_factor_sq - T::one()))
}

/// Polarizability-ratio magnitude `|alpha2 / alpha1|` of the cesium dataset.
pub const CESIUM_ALPHA_RATIO_MAG: f64 = 16.3;
/// Resonant coefficient of the cesium dataset's reduced compensation
/// relation `Delta_bar [16.3 (E2/E1)^2 - 1] = 2.98`, with
/// `Delta_bar = Delta(rad/s) * 1e-9 s`.
pub const CESIUM_RESONANT_COEFF: f64 = 2.98;

/// Field-amplitude ratio `|E2/E1|` from the reduced compensation relation
/// with the cesium constants.
pub fn solve_field_ratio<T: Scalar>(delta: T) -> Result<T> {
    solve_field_ratio_with(
        delta,
        T::cst(CESIUM_ALPHA_RATIO_MAG),
        T::cst(CESIUM_RESONANT_COEFF),
    )
}

/// Field-amplitude ratio for a general `(|alpha2/alpha1|, resonant
/// coefficient)` dataset: `ratio = sqrt((coeff/Delta_bar + 1)/alpha_ratio)`.
pub fn solve_field_ratio_with<T: Scalar>(
    delta: T,
    alpha_ratio_mag: T,
    resonant_coeff: T,
) -> Result<T> {
    if delta <= T::zero() {
        return Err(Error::invalid("delta must be positive"));
    }
    if alpha_ratio_mag <= T::zero() {
        return Err(Error::invalid("alpha ratio magnitude must be positive"));
    }
    let delta_bar = delta * T::cst(1e-9);
    let required = resonant_coeff / delta_bar + T::one();
    if required <= T::zero() {
        return Err(Error::NoSolution("field-ratio radicand is not positive".into()));
    }
    Ok((required / alpha_ratio_mag).sqrt())
}

/// Residual of the reduced relation at a given `(delta, ratio)` pair.
pub fn field_ratio_residual<T: Scalar>(delta: T, ratio: T) -> T {
    let delta_bar = delta * T::cst(1e-9);
    (delta_bar * (T::cst(CESIUM_ALPHA_RATIO_MAG) * ratio * ratio - T::one())
        - T::cst(CESIUM_RESONANT_COEFF))
    .abs()
}

/// A two-photon drive with everything needed to evaluate the three standing
/// light shifts.
#[derive(Clone, Copy, Debug)]
pub struct TwoPhotonDrive<T> {
    /// Laser angular frequencies (rad/s) of the lower and upper transitions.
    pub omega1: T,
    pub omega2: T,
    /// Field amplitudes (V/m).
    pub e1: T,
    pub e2: T,
    /// Intermediate detuning (rad/s).
    pub delta: T,
    /// Single-photon Rabi frequencies (rad/s).
    pub rabi1: T,
    pub rabi2: T,
    /// Nonresonant polarizabilities of the two fields (SI, C m^2/V).
    pub alpha1: T,
    pub alpha2: T,
    /// Qubit hyperfine splitting (rad/s).
    pub omega_q: T,
    /// Branching factor of the other qubit state's coupling.
    pub c_factor_sq: T,
}

/// The three standing shifts `(delta_r, delta_q1, delta_q0)` of the Rydberg
/// level and the two qubit states, in rad/s.
pub fn stark_shifts<T: Scalar>(drive: &TwoPhotonDrive<T>) -> Result<(T, T, T)> {
    if drive.delta == T::zero() || drive.delta + drive.omega_q == T::zero() {
        return Err(Error::invalid("detunings must be nonzero"));
    }
    if drive.omega1 <= T::zero() || drive.omega2 <= T::zero() {
        return Err(Error::invalid("laser frequencies must be positive"));
    }
    let four = T::cst(4.0);
    // CODATA 2018: elementary charge (exact), electron mass, hbar (exact)
    let e_charge = T::cst(1.602_176_634e-19);
    let m_e = T::cst(9.109_383_701_5e-31);
    let hbar = T::cst(1.054_571_817e-34);

    let ponderomotive = e_charge * e_charge / (four * m_e * hbar)
        * (drive.e1 * drive.e1 / (drive.omega1 * drive.omega1)
            + drive.e2 * drive.e2 / (drive.omega2 * drive.omega2));
    let delta_r = drive.rabi2 * drive.rabi2 / (four * drive.delta) - ponderomotive;

    let polarizability = (drive.alpha1 * drive.e1 * drive.e1
        + drive.alpha2 * drive.e2 * drive.e2)
        / (four * hbar);
    let delta_q1 = drive.rabi1 * drive.rabi1 / (four * drive.delta) - polarizability;
    let delta_q0 = drive.c_factor_sq * drive.rabi1 * drive.rabi1
        / (four * (drive.delta + drive.omega_q))
        - polarizability;
    Ok((delta_r, delta_q1, delta_q0))
}

/// One solution branch of the target-qubit balance problem: both transition
/// chains (`A`: `|0>->|p>->|r>`, `B`: `|1>->|p>->|r>`) drive the target atom,
/// and three conditions are imposed on the six variables
/// `(delta_a, e1_a, e2_a, delta_b, e1_b, e2_b)`:
///
/// 1. the total light shift of `|0>` vanishes,
/// 2. the total light shift of `|1>` vanishes,
/// 3. the two chains' effective Rabi frequencies are equal.
///
/// Chain B is pinned to the single-chain compensation solution
/// (`delta_b = omega_q/(C^2-1)`, `e1_b = 1`, `e2_b` from the reduced field
/// relation) and the chain-A variables are solved by damped Newton iteration.
/// Fields are in units of `e1_b`, couplings in the reduced units fixed by the
/// dataset's resonant coefficient. The returned branch has
/// `delta_a = C^2 omega_q/(C^2-1)`: chain A sits above the splitting by the
/// same margin chain B sits below it.
#[derive(Clone, Copy, Debug)]
pub struct TargetBalance<T> {
    pub delta_a: T,
    pub e1_a: T,
    pub e2_a: T,
    pub delta_b: T,
    pub e1_b: T,
    pub e2_b: T,
    /// Common effective Rabi frequency (reduced units).
    pub omega_eff: T,
    /// Residuals of the three balance equations at the returned point, each
    /// normalized by its equation's natural scale.
    pub residuals: [T; 3],
}

pub fn solve_target_balance<T: Scalar>(omega_q: T, c_factor_sq: T) -> Result<TargetBalance<T>> {
    let c2 = c_factor_sq;
    if c2 <= T::one() {
        return Err(Error::NoSolution("C^2 <= 1".into()));
    }
    let c = c2.sqrt();
    let four = T::cst(4.0);
    let alpha_ratio = T::cst(CESIUM_ALPHA_RATIO_MAG);
    // reduced units: -alpha1/(4 hbar) = 1, kappa^2 = 4 x resonant coefficient
    let kappa_sq = four * T::cst(CESIUM_RESONANT_COEFF) * T::cst(1e9);

    let delta_b = solve_compensation(omega_q, c2)?;
    let e1_b = T::one();
    let e2_b = solve_field_ratio(delta_b)?;

    // normalization of the shift and Rabi equations
    let shift_scale = kappa_sq * e1_b * e1_b / (four * delta_b);
    let rabi_scale = e1_b * e2_b / delta_b;

    // light shift of |0>: resonant from chain A (direct) and chain B (cross)
    let shift0 = |x: &[T; 3]| -> T {
        let (da, e1a, e2a) = (x[0], x[1], x[2]);
        let p = polar_term(alpha_ratio, e1a, e2a, e1_b, e2_b);
        (c2 * kappa_sq * e1a * e1a / (four * da)
            + c2 * kappa_sq * e1_b * e1_b / (four * (delta_b + omega_q))
            - p)
            / shift_scale
    };
    // light shift of |1>: resonant from chain B (direct) and chain A (cross);
    // the chain-A laser sits at detuning (delta_a - omega_q) from |1>
    let shift1 = |x: &[T; 3]| -> T {
        let (da, e1a, e2a) = (x[0], x[1], x[2]);
        let p = polar_term(alpha_ratio, e1a, e2a, e1_b, e2_b);
        (kappa_sq * e1_b * e1_b / (four * delta_b)
            + kappa_sq * e1a * e1a / (four * (da - omega_q))
            - p)
            / shift_scale
    };
    // effective-Rabi mismatch (common upper-transition coupling dropped)
    let rabi_eq = |x: &[T; 3]| -> T {
        let (da, e1a, e2a) = (x[0], x[1], x[2]);
        (c * e1a * e2a / da - e1_b * e2_b / delta_b) / rabi_scale
    };
    let f = |x: &[T; 3]| -> [T; 3] { [shift0(x), shift1(x), rabi_eq(x)] };

    // The solution branch lies above the omega_q pole of the chain-A cross
    // term: dividing the two shift equations pins delta_a near
    // c2 omega_q/(c2-1). Start slightly off that point.
    let mut x = [
        omega_q * c2 / (c2 - T::one()) * T::cst(1.3),
        e1_b,
        e2_b * T::cst(1.1),
    ];
    let mut fx = f(&x);
    let norm = |v: &[T; 3]| v.iter().fold(T::zero(), |m, &a| m.max(a.abs()));
    let tol = T::cst(1e-12);
    let mut converged = norm(&fx) <= tol;
    for _ in 0..200 {
        if converged {
            break;
        }
        // finite-difference Jacobian of the normalized system
        let mut jac = [[T::zero(); 3]; 3];
        for col in 0..3 {
            let h = (x[col].abs() + T::one()) * T::cst(1e-8);
            let mut xp = x;
            xp[col] += h;
            let fp = f(&xp);
            for row in 0..3 {
                jac[row][col] = (fp[row] - fx[row]) / h;
            }
        }
        let step = solve3(&jac, &fx)
            .ok_or_else(|| Error::NoSolution("singular Jacobian in balance solver".into()))?;
        // damped update staying in the valid region
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let cand = [x[0] - lambda * step[0], x[1] - lambda * step[1], x[2] - lambda * step[2]];
            if cand[0] > omega_q && cand[1] > T::zero() && cand[2] > T::zero() {
                let fc = f(&cand);
                if norm(&fc) < norm(&fx) {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= T::cst(0.5);
        }
        if !accepted {
            break;
        }
        converged = norm(&fx) <= tol;
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            steps: 200,
            last_delta: norm(&fx).as_f64(),
        });
    }
    let omega_eff = c * kappa_sq.sqrt() * x[1] * x[2] / (T::cst(2.0) * x[0]);
    Ok(TargetBalance {
        delta_a: x[0],
        e1_a: x[1],
        e2_a: x[2],
        delta_b,
        e1_b,
        e2_b,
        omega_eff,
        residuals: fx,
    })
}

fn polar_term<T: Scalar>(alpha_ratio: T, e1a: T, e2a: T, e1b: T, e2b: T) -> T {
    // -(alpha1 (e1a^2+e1b^2) + alpha2 (e2a^2+e2b^2))/(4 hbar) in units where
    // -alpha1/(4 hbar) = 1 and alpha2/alpha1 = -alpha_ratio
    alpha_ratio * (e2a * e2a + e2b * e2b) - (e1a * e1a + e1b * e1b)
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
fn solve3<T: Scalar>(a: &[[T; 3]; 3], b: &[T; 3]) -> Option<[T; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[pivot][col].abs() <= T::epsilon() * T::cst(1e3) {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] = m[row][k] - factor * m[col][k];
            }
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc = acc - m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Hyperfine splittings (rad/s) of the usual qubit pairs.
pub fn cesium_omega_q<T: Scalar>() -> T {
    T::cst(2.0 * std::f64::consts::PI * 9.192_631_770e9)
}

pub fn rubidium87_omega_q<T: Scalar>() -> T {
    T::cst(2.0 * std::f64::consts::PI * 6.834_682_610_904e9)
}
