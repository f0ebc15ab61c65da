//! Domain types and Hamiltonian builders for the two-atom gate model.
//!
//! All basis orderings are frozen here and imported by every other module:
//!
//! * control-in-`|0>` block: `{|00>, |01>, |0r>}`
//! * control-in-`|1>` block, blockaded (no `|rr>`): `{|1r>, |r1>, |r0>, |11>, |10>}`
//! * control-in-`|1>` block with interaction: `{|rr>, |1r>, |r1>, |r0>, |11>, |10>}`
//! * two-state slow-down model: `{|1r>, |r1>, |11>}`
//! * union bases (both blocks as one state space) for Bell preparation
//!
//! Drive conventions, fixed once for the whole crate:
//!
//! * three channels: control `|1><->|r>` at `omega_c`, target `|0><->|r>` at
//!   `omega_t1`, target `|1><->|r>` at `omega_t2`;
//! * a drive tone places `(omega/2) e^{i t k v s}` on the *raising* matrix
//!   element `<upper|H|lower>`, with `s` the resolved sign of that channel's
//!   `k v` phase argument;
//! * the spin-echo flip (`-omega_t` in the second pulse) is a real sign on
//!   both target amplitudes, not a phase;
//! * the constant initial-position phase of the control drive is dropped: it
//!   is a global gauge on one channel with no effect on populations or on any
//!   of the reported error metrics.

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::scalar::{cis, norm_sqr, Scalar, C};

/// A sign, used for spin-echo flips and propagation-direction switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The three drive channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// Control atom `|1> <-> |r>`.
    Control,
    /// Target atom `|0> <-> |r>`.
    TargetZero,
    /// Target atom `|1> <-> |r>`.
    TargetOne,
}

/// Per-channel signs of the `k v` phase arguments within one pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelSigns {
    pub control: Sign,
    pub target1: Sign,
    pub target2: Sign,
}

impl ChannelSigns {
    pub fn all_plus() -> Self {
        Self { control: Sign::Plus, target1: Sign::Plus, target2: Sign::Plus }
    }

    pub fn all_minus() -> Self {
        Self { control: Sign::Minus, target1: Sign::Minus, target2: Sign::Minus }
    }

    /// Flip only the target channels (the narrower reading of the
    /// direction-switched second pulse).
    pub fn target_only_minus() -> Self {
        Self { control: Sign::Plus, target1: Sign::Minus, target2: Sign::Minus }
    }
}

/// `|rr>` interaction energy: finite, or the blockaded limit in which the
/// doubly excited state is removed from the basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Interaction<T> {
    /// Energy of `|rr>` in rad/s; the 6-dimensional model applies.
    Finite(T),
    /// `|rr>` excluded from the basis; the 5-dimensional model applies.
    InfiniteBlockade,
}

impl<T: Scalar> Interaction<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Interaction::InfiniteBlockade)
    }

    pub fn energy(&self) -> Option<T> {
        match self {
            Interaction::Finite(v) => Some(*v),
            Interaction::InfiniteBlockade => None,
        }
    }
}

/// The three drive channels of the gate: Rabi magnitudes, interaction,
/// wavevector, and the relative Doppler-phase sign of the target `|1><->|r>`
/// channel (`Plus` = copropagating, dephasing-resilient chain; `Minus` =
/// counterpropagating worst case).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateChannelConfig<T> {
    pub omega_c: T,
    pub omega_t1: T,
    pub omega_t2: T,
    pub interaction: Interaction<T>,
    pub wavevector_k: T,
    pub target2_k_sign: Sign,
}

impl<T: Scalar> GateChannelConfig<T> {
    /// Configuration at the design condition `omega_t = sqrt(3/2) omega_c`.
    pub fn design(omega_c: T, interaction: Interaction<T>) -> Result<Self> {
        let omega_t = omega_c * T::cst(1.5).sqrt();
        Self::symmetric(omega_c, omega_t, interaction)
    }

    /// Equal Rabi magnitudes on the two target channels.
    pub fn symmetric(omega_c: T, omega_t: T, interaction: Interaction<T>) -> Result<Self> {
        Self::new(omega_c, omega_t, omega_t, interaction)
    }

    pub fn new(omega_c: T, omega_t1: T, omega_t2: T, interaction: Interaction<T>) -> Result<Self> {
        if omega_c <= T::zero() || omega_t1 <= T::zero() || omega_t2 <= T::zero() {
            return Err(Error::invalid("Rabi magnitudes must be positive"));
        }
        Ok(Self {
            omega_c,
            omega_t1,
            omega_t2,
            interaction,
            wavevector_k: PhysicalConstants::<T>::standard().wavevector_k,
            target2_k_sign: Sign::Plus,
        })
    }

    pub fn with_wavevector(mut self, k: T) -> Self {
        self.wavevector_k = k;
        self
    }

    pub fn with_target2_k_sign(mut self, s: Sign) -> Self {
        self.target2_k_sign = s;
        self
    }

    pub fn with_interaction(mut self, v: Interaction<T>) -> Self {
        self.interaction = v;
        self
    }

    /// Largest relative deviation of the target Rabi magnitudes from the
    /// design condition `omega_t / omega_c = sqrt(6)/2`.
    pub fn design_ratio_deviation(&self) -> T {
        let target = self.omega_c * T::cst(1.5).sqrt();
        let d1 = ((self.omega_t1 - target) / target).abs();
        let d2 = ((self.omega_t2 - target) / target).abs();
        d1.max(d2)
    }

    /// Gate duration `2 pi / omega_c` of the two-pulse sequence (excluding
    /// the phase-change gap).
    pub fn gate_time(&self) -> T {
        T::cst(2.0) * T::PI() / self.omega_c
    }

    /// Duration `pi / omega_c` of one pulse.
    pub fn pulse_time(&self) -> T {
        T::PI() / self.omega_c
    }
}

/// One constant-envelope drive interval of the sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSegment<T> {
    /// Drive duration in seconds.
    pub duration: T,
    /// Spin-echo sign of both target-channel amplitudes.
    pub omega_t_sign: Sign,
    /// Per-channel signs of the `k v` phase arguments.
    pub channel_k_signs: ChannelSigns,
    /// All-drives-off gap preceding this segment (the phase-change time).
    pub gap_before: T,
}

impl<T: Scalar> PulseSegment<T> {
    pub fn new(duration: T, omega_t_sign: Sign, channel_k_signs: ChannelSigns, gap_before: T) -> Result<Self> {
        if duration < T::zero() || gap_before < T::zero() {
            return Err(Error::invalid("segment durations must be non-negative"));
        }
        Ok(Self { duration, omega_t_sign, channel_k_signs, gap_before })
    }
}

/// Signed channel amplitudes (rad/s) within one segment.
#[derive(Clone, Copy, Debug)]
pub struct ChannelAmps<T> {
    pub control: T,
    pub target1: T,
    pub target2: T,
}

impl<T: Scalar> ChannelAmps<T> {
    pub fn for_segment(cfg: &GateChannelConfig<T>, seg: &PulseSegment<T>) -> Self {
        let s: T = seg.omega_t_sign.value();
        Self { control: cfg.omega_c, target1: s * cfg.omega_t1, target2: s * cfg.omega_t2 }
    }

    pub fn get(&self, ch: Channel) -> T {
        match ch {
            Channel::Control => self.control,
            Channel::TargetZero => self.target1,
            Channel::TargetOne => self.target2,
        }
    }
}

/// Angular frequencies (rad/s) of the `e^{i w t}` tones multiplying each
/// channel's raising element within one segment.
#[derive(Clone, Copy, Debug)]
pub struct ChannelTones<T> {
    pub control: T,
    pub target1: T,
    pub target2: T,
}

impl<T: Scalar> ChannelTones<T> {
    pub fn for_segment(cfg: &GateChannelConfig<T>, seg: &PulseSegment<T>, v_c: T, v_t: T) -> Self {
        let k = cfg.wavevector_k;
        Self {
            control: k * v_c * seg.channel_k_signs.control.value(),
            target1: k * v_t * seg.channel_k_signs.target1.value(),
            target2: k * v_t
                * seg.channel_k_signs.target2.value::<T>()
                * cfg.target2_k_sign.value::<T>(),
        }
    }

    pub fn zero() -> Self {
        Self { control: T::zero(), target1: T::zero(), target2: T::zero() }
    }

    pub fn get(&self, ch: Channel) -> T {
        match ch {
            Channel::Control => self.control,
            Channel::TargetZero => self.target1,
            Channel::TargetOne => self.target2,
        }
    }
}

/// Net photon numbers (control, target1, target2) absorbed to reach a basis
/// state from the ground pair; these generate the diagonal gauge that removes
/// the drive tones.
pub type PhotonCounts = (i8, i8, i8);

type Coupling = (usize, usize, Channel); // (upper, lower, channel)

/// The documented basis orderings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `{|00>, |01>, |0r>}`
    ControlZero,
    /// `{|1r>, |r1>, |r0>, |11>, |10>}`
    ControlOneBlockaded,
    /// `{|rr>, |1r>, |r1>, |r0>, |11>, |10>}`
    ControlOneFull,
    /// `{|1r>, |r1>, |11>}` for the two-state slow-down model
    TwoState,
    /// `{|00>, |01>, |0r>} ++ {|1r>, |r1>, |r0>, |11>, |10>}`
    UnionBlockaded,
    /// `{|00>, |01>, |0r>} ++ {|rr>, |1r>, |r1>, |r0>, |11>, |10>}`
    UnionFull,
}

const C0_LABELS: &[&str] = &["00", "01", "0r"];
const C0_COUPLINGS: &[Coupling] = &[(2, 0, Channel::TargetZero), (2, 1, Channel::TargetOne)];
const C0_PHOTONS: &[PhotonCounts] = &[(0, 0, 0), (0, 1, -1), (0, 1, 0)];

const C1B_LABELS: &[&str] = &["1r", "r1", "r0", "11", "10"];
const C1B_COUPLINGS: &[Coupling] = &[
    (0, 3, Channel::TargetOne),
    (0, 4, Channel::TargetZero),
    (1, 3, Channel::Control),
    (2, 4, Channel::Control),
];
const C1B_PHOTONS: &[PhotonCounts] =
    &[(0, 1, 0), (1, 1, -1), (1, 0, 0), (0, 1, -1), (0, 0, 0)];

const C1F_LABELS: &[&str] = &["rr", "1r", "r1", "r0", "11", "10"];
const C1F_COUPLINGS: &[Coupling] = &[
    (0, 1, Channel::Control),
    (0, 2, Channel::TargetOne),
    (0, 3, Channel::TargetZero),
    (1, 4, Channel::TargetOne),
    (1, 5, Channel::TargetZero),
    (2, 4, Channel::Control),
    (3, 5, Channel::Control),
];
const C1F_PHOTONS: &[PhotonCounts] =
    &[(1, 1, 0), (0, 1, 0), (1, 1, -1), (1, 0, 0), (0, 1, -1), (0, 0, 0)];

const TWO_LABELS: &[&str] = &["1r", "r1", "11"];
const TWO_COUPLINGS: &[Coupling] = &[(0, 2, Channel::TargetOne), (1, 2, Channel::Control)];
const TWO_PHOTONS: &[PhotonCounts] = &[(0, 0, 1), (1, 0, 0), (0, 0, 0)];

const UB_LABELS: &[&str] = &["00", "01", "0r", "1r", "r1", "r0", "11", "10"];
const UB_COUPLINGS: &[Coupling] = &[
    (2, 0, Channel::TargetZero),
    (2, 1, Channel::TargetOne),
    (3, 6, Channel::TargetOne),
    (3, 7, Channel::TargetZero),
    (4, 6, Channel::Control),
    (5, 7, Channel::Control),
];
const UB_PHOTONS: &[PhotonCounts] = &[
    (0, 0, 0),
    (0, 1, -1),
    (0, 1, 0),
    (0, 1, 0),
    (1, 1, -1),
    (1, 0, 0),
    (0, 1, -1),
    (0, 0, 0),
];

const UF_LABELS: &[&str] = &["00", "01", "0r", "rr", "1r", "r1", "r0", "11", "10"];
const UF_COUPLINGS: &[Coupling] = &[
    (2, 0, Channel::TargetZero),
    (2, 1, Channel::TargetOne),
    (3, 4, Channel::Control),
    (3, 5, Channel::TargetOne),
    (3, 6, Channel::TargetZero),
    (4, 7, Channel::TargetOne),
    (4, 8, Channel::TargetZero),
    (5, 7, Channel::Control),
    (6, 8, Channel::Control),
];
const UF_PHOTONS: &[PhotonCounts] = &[
    (0, 0, 0),
    (0, 1, -1),
    (0, 1, 0),
    (1, 1, 0),
    (0, 1, 0),
    (1, 1, -1),
    (1, 0, 0),
    (0, 1, -1),
    (0, 0, 0),
];

impl Basis {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Basis::ControlZero => C0_LABELS,
            Basis::ControlOneBlockaded => C1B_LABELS,
            Basis::ControlOneFull => C1F_LABELS,
            Basis::TwoState => TWO_LABELS,
            Basis::UnionBlockaded => UB_LABELS,
            Basis::UnionFull => UF_LABELS,
        }
    }

    pub fn dim(self) -> usize {
        self.labels().len()
    }

    pub fn couplings(self) -> &'static [Coupling] {
        match self {
            Basis::ControlZero => C0_COUPLINGS,
            Basis::ControlOneBlockaded => C1B_COUPLINGS,
            Basis::ControlOneFull => C1F_COUPLINGS,
            Basis::TwoState => TWO_COUPLINGS,
            Basis::UnionBlockaded => UB_COUPLINGS,
            Basis::UnionFull => UF_COUPLINGS,
        }
    }

    pub fn photon_counts(self) -> &'static [PhotonCounts] {
        match self {
            Basis::ControlZero => C0_PHOTONS,
            Basis::ControlOneBlockaded => C1B_PHOTONS,
            Basis::ControlOneFull => C1F_PHOTONS,
            Basis::TwoState => TWO_PHOTONS,
            Basis::UnionBlockaded => UB_PHOTONS,
            Basis::UnionFull => UF_PHOTONS,
        }
    }

    pub fn index_of(self, label: &str) -> Option<usize> {
        self.labels().iter().position(|&l| l == label)
    }

    /// Index of `|rr>` when the basis includes it.
    pub fn rr_index(self) -> Option<usize> {
        self.index_of("rr")
    }

    /// Indices of the singly excited Rydberg states entering the decay-error
    /// integrand (`|rr>` deliberately excluded).
    pub fn rydberg_decay_indices(self) -> Vec<usize> {
        self.labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.contains('r') && **l != "rr")
            .map(|(i, _)| i)
            .collect()
    }
}

/// A pure state over one of the documented bases.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomState<T> {
    basis: Basis,
    amplitudes: Vec<C<T>>,
}

impl<T: Scalar> AtomState<T> {
    /// Wrap amplitudes; the norm must already be 1 (scaled machine tolerance).
    pub fn new(basis: Basis, amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::invalid(format!(
                "amplitude count {} does not match basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - T::one()).abs() > T::epsilon() * T::cst(4500.0) {
            return Err(Error::invalid(format!(
                "state norm {} is not 1",
                norm.as_f64()
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    /// The basis state with the given index.
    pub fn basis_state(basis: Basis, index: usize) -> Self {
        assert!(index < basis.dim(), "basis index out of range");
        let mut amplitudes = vec![C::new(T::zero(), T::zero()); basis.dim()];
        amplitudes[index] = C::new(T::one(), T::zero());
        Self { basis, amplitudes }
    }

    /// The basis state with the given label.
    pub fn labeled(basis: Basis, label: &str) -> Result<Self> {
        let idx = basis
            .index_of(label)
            .ok_or_else(|| Error::invalid(format!("no state |{label}> in basis")))?;
        Ok(Self::basis_state(basis, idx))
    }

    /// Normalized superposition of basis states.
    pub fn superposition(basis: Basis, terms: &[(usize, C<T>)]) -> Result<Self> {
        let mut amplitudes = vec![C::new(T::zero(), T::zero()); basis.dim()];
        for &(idx, a) in terms {
            if idx >= basis.dim() {
                return Err(Error::invalid("basis index out of range"));
            }
            amplitudes[idx] = amplitudes[idx] + a;
        }
        let norm = vec_norm(&amplitudes);
        if norm <= T::zero() {
            return Err(Error::invalid("zero superposition"));
        }
        for a in &mut amplitudes {
            *a = *a / C::new(norm, T::zero());
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        vec_norm(&self.amplitudes)
    }

    pub fn population(&self, index: usize) -> T {
        norm_sqr(self.amplitudes[index])
    }

    pub fn populations(&self) -> Vec<T> {
        self.amplitudes.iter().map(|&a| norm_sqr(a)).collect()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> C<T> {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        crate::matrix::inner(&self.amplitudes, &other.amplitudes)
    }

    pub(crate) fn from_parts_unchecked(basis: Basis, amplitudes: Vec<C<T>>) -> Self {
        Self { basis, amplitudes }
    }
}

/// Drive Hamiltonian of a basis at one instant: `(amp/2) e^{i w t}` on every
/// raising element, plus the `|rr>` interaction energy on the diagonal.
pub fn drive_hamiltonian<T: Scalar>(
    basis: Basis,
    amps: &ChannelAmps<T>,
    tones: &ChannelTones<T>,
    t: T,
    interaction: &Interaction<T>,
) -> ComplexMatrix<T> {
    let mut h = ComplexMatrix::zeros(basis.dim());
    let half = T::cst(0.5);
    for &(upper, lower, ch) in basis.couplings() {
        let elem = cis(tones.get(ch) * t) * C::new(amps.get(ch) * half, T::zero());
        h.set(upper, lower, elem);
        h.set(lower, upper, elem.conj());
    }
    if let (Some(rr), Interaction::Finite(v)) = (basis.rr_index(), interaction) {
        h.set(rr, rr, C::new(*v, T::zero()));
    }
    h
}

/// The 3x3 control-in-`|0>` Hamiltonian: `<0r|H|00> = <0r|H|01> = (omega_t/2) phase`,
/// basis `{|00>, |01>, |0r>}`.
pub fn build_hc0<T: Scalar>(omega_t: T, phase: C<T>) -> Result<ComplexMatrix<T>> {
    if omega_t <= T::zero() {
        return Err(Error::invalid("omega_t must be positive"));
    }
    if (phase.norm() - T::one()).abs() > T::epsilon() * T::cst(100.0) {
        return Err(Error::invalid("phase must have unit modulus"));
    }
    let mut h = ComplexMatrix::zeros(3);
    let elem = phase * C::new(omega_t * T::cst(0.5), T::zero());
    h.set(2, 0, elem);
    h.set(0, 2, elem.conj());
    h.set(2, 1, elem);
    h.set(1, 2, elem.conj());
    Ok(h)
}

/// The 5x5 blockaded control-in-`|1>` Hamiltonian over
/// `{|1r>, |r1>, |r0>, |11>, |10>}`; the sign of `omega_t` carries the
/// spin-echo flip.
pub fn build_hc1_blockaded<T: Scalar>(omega_c: T, omega_t: T) -> Result<ComplexMatrix<T>> {
    if omega_c <= T::zero() {
        return Err(Error::invalid("omega_c must be positive"));
    }
    if omega_t == T::zero() {
        return Err(Error::invalid("omega_t must be nonzero"));
    }
    Ok(build_hc1_blockaded_channels(omega_c, omega_t, omega_t))
}

/// Blockaded Hamiltonian with independent target-channel amplitudes
/// (`omega_t1` on `|0><->|r>`, `omega_t2` on `|1><->|r>`).
pub fn build_hc1_blockaded_channels<T: Scalar>(
    omega_c: T,
    omega_t1: T,
    omega_t2: T,
) -> ComplexMatrix<T> {
    let amps = ChannelAmps { control: omega_c, target1: omega_t1, target2: omega_t2 };
    drive_hamiltonian(
        Basis::ControlOneBlockaded,
        &amps,
        &ChannelTones::zero(),
        T::zero(),
        &Interaction::InfiniteBlockade,
    )
}

/// The 6x6 control-in-`|1>` Hamiltonian with finite interaction, evaluated at
/// absolute time `t` with the Doppler tones of the given segment signs.
pub fn build_hc1_full<T: Scalar>(
    cfg: &GateChannelConfig<T>,
    omega_t_sign: Sign,
    v_c: T,
    v_t: T,
    t: T,
    channel_k_signs: ChannelSigns,
) -> Result<ComplexMatrix<T>> {
    if cfg.interaction.is_infinite() {
        return Err(Error::invalid(
            "infinite blockade has no |rr> level; use the blockaded builder",
        ));
    }
    if t < T::zero() {
        return Err(Error::invalid("time must be non-negative"));
    }
    let seg = PulseSegment {
        duration: T::zero(),
        omega_t_sign,
        channel_k_signs,
        gap_before: T::zero(),
    };
    let amps = ChannelAmps::for_segment(cfg, &seg);
    let tones = ChannelTones::for_segment(cfg, &seg, v_c, v_t);
    Ok(drive_hamiltonian(Basis::ControlOneFull, &amps, &tones, t, &cfg.interaction))
}

/// Named physical constants with provenance notes.
#[derive(Clone, Debug)]
pub struct PhysicalConstants<T> {
    /// Effective two-photon wavevector `2 pi (1/420.3 - 1/1012.7) nm^-1`, rad/m.
    pub wavevector_k: T,
    /// Boltzmann constant, J/K. SI 2019 exact value (CODATA 2018).
    pub boltzmann: T,
    /// Mass of 87Rb, kg. 86.909180531 u (AME2016) times the CODATA 2018
    /// atomic mass constant 1.66053906660e-27 kg.
    pub rb87_mass: T,
    pub wavevector_provenance: &'static str,
    pub boltzmann_provenance: &'static str,
    pub mass_provenance: &'static str,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn standard() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let k = two_pi * (1.0 / 420.3e-9 - 1.0 / 1012.7e-9);
        Self {
            wavevector_k: T::cst(k),
            boltzmann: T::cst(1.380_649e-23),
            rb87_mass: T::cst(86.909_180_531 * 1.660_539_066_60e-27),
            wavevector_provenance: "counterpropagating 420.3 nm / 1012.7 nm two-photon drive",
            boltzmann_provenance: "SI 2019 exact (CODATA 2018)",
            mass_provenance: "86.909180531 u (AME2016) x CODATA 2018 atomic mass constant",
        }
    }

    /// One-dimensional Maxwell-Boltzmann velocity width `sqrt(kB T / m)`.
    pub fn sigma_v(&self, temperature: T) -> T {
        if temperature <= T::zero() {
            return T::zero();
        }
        (self.boltzmann * temperature / self.rb87_mass).sqrt()
    }
}

/// Convenience accessor for the constants record.
pub fn physical_constants<T: Scalar>() -> PhysicalConstants<T> {
    PhysicalConstants::standard()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::eigh;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn wavevector_matches_formula() {
        let pc = physical_constants::<f64>();
        assert!((pc.wavevector_k / TWO_PI / 1.3918e6 - 1.0).abs() < 1e-3);
        assert!((pc.wavevector_k / 8.745e6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn maxwell_width_at_5_uk() {
        let pc = physical_constants::<f64>();
        assert!((pc.sigma_v(5e-6) / 0.0219 - 1.0).abs() < 2e-3);
        assert_eq!(pc.sigma_v(0.0), 0.0);
    }

    #[test]
    fn hc0_spectrum_is_flat_plus_effective_coupling() {
        // rank-1 coupling of (|00>+|01>)/sqrt(2) to |0r> at sqrt(2) omega_t
        let omega_t = TWO_PI * 4.0e6;
        let h = build_hc0(omega_t, C::new(1.0, 0.0)).unwrap();
        let e = eigh(&h).unwrap();
        let expect = omega_t / 2.0_f64.sqrt();
        assert!((e.values[0] + expect).abs() < 1e-6 * omega_t);
        assert!(e.values[1].abs() < 1e-6 * omega_t);
        assert!((e.values[2] - expect).abs() < 1e-6 * omega_t);
    }

    #[test]
    fn hc0_spectrum_is_phase_gauge_invariant() {
        let omega_t = TWO_PI * 3.5e6;
        let e1 = eigh(&build_hc0(omega_t, C::new(1.0, 0.0)).unwrap()).unwrap();
        let phase = cis(0.83_f64);
        let e2 = eigh(&build_hc0(omega_t, phase).unwrap()).unwrap();
        for (a, b) in e1.values.iter().zip(&e2.values) {
            assert!((a - b).abs() < 1e-7 * omega_t);
        }
    }

    #[test]
    fn hc0_rejects_bad_arguments() {
        assert!(build_hc0(-1.0, C::new(1.0, 0.0)).is_err());
        assert!(build_hc0(1.0, C::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn blockaded_eigenvalues_at_design_point() {
        let omega_c = TWO_PI * 3.5e6;
        let omega_t = 1.5_f64.sqrt() * omega_c;
        let h = build_hc1_blockaded(omega_c, omega_t).unwrap();
        let e = eigh(&h).unwrap();
        let bar = (omega_c * omega_c + 2.0 * omega_t * omega_t).sqrt();
        assert!((bar - 2.0 * omega_c).abs() < 1e-6);
        let expected = [-bar / 2.0, -omega_c / 2.0, 0.0, omega_c / 2.0, bar / 2.0];
        for (v, want) in e.values.iter().zip(expected) {
            assert!((v - want).abs() < 1e-10 * omega_c, "{v} vs {want}");
        }
    }

    #[test]
    fn blockaded_builder_matches_displayed_matrix() {
        let (oc, ot) = (2.0, 3.0);
        let h = build_hc1_blockaded(oc, ot).unwrap();
        // rows {1r, r1, r0, 11, 10}: omega/2 in the stated positions
        let expect = ComplexMatrix::<f64>::from_real_rows(&[
            &[0.0, 0.0, 0.0, ot / 2.0, ot / 2.0],
            &[0.0, 0.0, 0.0, oc / 2.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, oc / 2.0],
            &[ot / 2.0, oc / 2.0, 0.0, 0.0, 0.0],
            &[ot / 2.0, 0.0, oc / 2.0, 0.0, 0.0],
        ]);
        assert!(h.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn full_model_at_zero_velocity_embeds_blockaded() {
        let omega_c = TWO_PI * 3.5e6;
        let v_int = TWO_PI * 500e6;
        let cfg =
            GateChannelConfig::design(omega_c, Interaction::Finite(v_int)).unwrap();
        let h6 = build_hc1_full(&cfg, Sign::Plus, 0.0, 0.0, 37e-9, ChannelSigns::all_plus())
            .unwrap();
        // time independence at v = 0
        let h6b = build_hc1_full(&cfg, Sign::Plus, 0.0, 0.0, 0.0, ChannelSigns::all_plus())
            .unwrap();
        assert!(h6.max_abs_diff(&h6b) == 0.0);
        assert_eq!(h6.get(0, 0), C::new(v_int, 0.0));
        // delete the |rr> row/column: equals the 5-dim builder entrywise
        let h5 = build_hc1_blockaded(cfg.omega_c, cfg.omega_t1).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(h6.get(r + 1, c + 1), h5.get(r, c));
            }
        }
    }

    #[test]
    fn full_model_is_hermitian_with_velocities() {
        let cfg = GateChannelConfig::design(
            TWO_PI * 3.5e6,
            Interaction::Finite(TWO_PI * 500e6),
        )
        .unwrap();
        let h = build_hc1_full(&cfg, Sign::Minus, 0.3, -0.2, 37e-9, ChannelSigns::all_plus())
            .unwrap();
        assert!(h.hermiticity_deviation() <= 1e-12);
    }

    #[test]
    fn full_model_rejects_infinite_blockade() {
        let cfg =
            GateChannelConfig::design(1.0, Interaction::InfiniteBlockade).unwrap();
        assert!(matches!(
            build_hc1_full(&cfg, Sign::Plus, 0.0, 0.0, 0.0, ChannelSigns::all_plus()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn photon_counts_generate_coupling_tones() {
        // every coupling's photon difference must be a single photon of its channel
        for basis in [
            Basis::ControlZero,
            Basis::ControlOneBlockaded,
            Basis::ControlOneFull,
            Basis::TwoState,
            Basis::UnionBlockaded,
            Basis::UnionFull,
        ] {
            let photons = basis.photon_counts();
            for &(u, l, ch) in basis.couplings() {
                let d = (
                    photons[u].0 - photons[l].0,
                    photons[u].1 - photons[l].1,
                    photons[u].2 - photons[l].2,
                );
                let want = match ch {
                    Channel::Control => (1, 0, 0),
                    Channel::TargetZero => (0, 1, 0),
                    Channel::TargetOne => (0, 0, 1),
                };
                assert_eq!(d, want, "{basis:?} coupling {u}->{l}");
            }
        }
    }

    #[test]
    fn drive_spectrum_is_invariant_under_the_tone_gauge() {
        // H(t) is a diagonal unitary conjugation of H(0) (common channel
        // phases are a gauge), so its spectrum cannot depend on t
        let cfg = GateChannelConfig::design(
            TWO_PI * 3.5e6,
            Interaction::Finite(TWO_PI * 500e6),
        )
        .unwrap();
        let at = |t: f64| {
            let h = build_hc1_full(&cfg, Sign::Plus, 0.31, -0.18, t, ChannelSigns::all_plus())
                .unwrap();
            eigh(&h).unwrap().values
        };
        let base = at(0.0);
        for t in [17e-9, 53e-9, 140e-9] {
            for (a, b) in at(t).iter().zip(&base) {
                assert!((a - b).abs() < 1e-6, "spectrum moved at t = {t}");
            }
        }
    }

    #[test]
    fn state_construction_and_norm_guard() {
        let s = AtomState::<f64>::labeled(Basis::ControlOneBlockaded, "10").unwrap();
        assert_eq!(s.population(4), 1.0);
        let bad = AtomState::<f64>::new(
            Basis::ControlZero,
            vec![C::new(0.5, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
        );
        assert!(bad.is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn every_builder_output_is_hermitian(
                oc_mhz in 0.1f64..20.0,
                ot_mhz in 0.1f64..20.0,
                v_mhz in 1.0f64..1000.0,
                v_c in -0.5f64..0.5,
                v_t in -0.5f64..0.5,
                t_ns in 0.0f64..500.0,
                flip in any::<bool>(),
            ) {
                let cfg = GateChannelConfig::new(
                    TWO_PI * oc_mhz * 1e6,
                    TWO_PI * ot_mhz * 1e6,
                    TWO_PI * ot_mhz * 1e6,
                    Interaction::Finite(TWO_PI * v_mhz * 1e6),
                )
                .unwrap();
                let sign = if flip { Sign::Minus } else { Sign::Plus };
                let h = build_hc1_full(
                    &cfg,
                    sign,
                    v_c,
                    v_t,
                    t_ns * 1e-9,
                    ChannelSigns::all_plus(),
                )
                .unwrap();
                prop_assert!(h.hermiticity_deviation() <= 1e-12 * h.max_abs().max(1.0));
            }

            #[test]
            fn common_channel_phase_is_a_spectral_gauge(
                ot_mhz in 0.1f64..20.0,
                phi in 0.0f64..std::f64::consts::TAU,
            ) {
                let omega_t = TWO_PI * ot_mhz * 1e6;
                let a = eigh(&build_hc0(omega_t, C::new(1.0, 0.0)).unwrap()).unwrap();
                let b = eigh(&build_hc0(omega_t, cis(phi)).unwrap()).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    prop_assert!((x - y).abs() <= 1e-9 * omega_t);
                }
            }
        }
    }
}
