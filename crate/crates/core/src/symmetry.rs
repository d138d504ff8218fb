//! Group representations, covariance through Choi states, and twirling.
//!
//! A channel is covariant when `Φ(V(g)† B V(g)) = U(g)† Φ(B) U(g)`, with `U` on the input space
//! `ℋ` and `V` on the output space `𝒦`. On the Choi state this reads
//! `(Ū⊗V)† S (Ū⊗V) = S_{Ω'}` with `Ω' = (U⊗Ū)†Ω`, the bar denoting conjugation in the reference
//! eigenbasis. When `ρ₀` is `U`-invariant, `Ω' = Ω` and the test collapses to `[Ū⊗V, S] = 0`.
//!
//! Finite groups are given as element lists indexed in parallel on both sides, phase groups by
//! integer weights, and connected rotation groups by their generators (decided at the Lie-algebra
//! level, never by sampling).

use std::f64::consts::PI;

use crate::channel::Channel;
use crate::choi::{choi_from_channel, choi_from_vector, choi_of_operator, ChoiState};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, exp_i, herm_eig, kron, ComplexMatrix, C64, HERMITIAN_GATE};
use crate::rotation::spin_rep;
use crate::states::{make_reference, DensityMatrix, ReferenceState};

/// Covariance decision threshold on the report residual.
pub const COVARIANCE_TOL: f64 = 1e-9;
/// Threshold for treating `ρ₀` as invariant under the input representation.
pub const INVARIANCE_TOL: f64 = 1e-10;
/// Unitarity / commutation-relation tolerance on representation data.
pub const REP_TOL: f64 = 1e-10;
/// Relative eigenvalue threshold for the commutant kernel.
pub const NULLSPACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Unitaries closed under products, containing the identity.
    Finite { elements: Vec<ComplexMatrix> },
    /// `U(θ) = F diag(e^{i n_k θ}) F†`; the frame `F` is the identity unless the representation
    /// came out of [`conjugate_rep`].
    Phase { weights: Vec<i64>, frame: ComplexMatrix },
    /// Hermitian generators with `[J_x, J_y] = iJ_z` (cyclic); elements `exp(−iθ n̂·J)`.
    Spin { generators: [ComplexMatrix; 3] },
}

impl Representation {
    pub fn finite(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidRepresentation("empty element list".into()))?;
        let d = first.rows();
        for (k, u) in elements.iter().enumerate() {
            if u.shape() != (d, d) {
                return Err(Error::InvalidRepresentation(format!("element {k} is not {d}x{d}")));
            }
            let res = u.unitarity_residual();
            if res > REP_TOL {
                return Err(Error::InvalidRepresentation(format!("element {k} is not unitary (residual {res:e})")));
            }
        }
        let id = ComplexMatrix::identity(d);
        if !elements.iter().any(|u| u.dist(&id) <= REP_TOL) {
            return Err(Error::InvalidRepresentation("element list does not contain the identity".into()));
        }
        // closure up to a global phase, so projective representations are accepted
        for a in &elements {
            for b in &elements {
                let ab = a * b;
                if !elements.iter().any(|g| phase_dist(&ab, g) <= 1e-8) {
                    return Err(Error::InvalidRepresentation("element list is not closed under products".into()));
                }
            }
        }
        Ok(Self::Finite { elements })
    }

    pub fn phase(weights: Vec<i64>) -> Self {
        let frame = ComplexMatrix::identity(weights.len());
        Self::Phase { weights, frame }
    }

    /// Number-operator phase representation `diag(e^{imθ})`, `m = 0, …, d−1`.
    pub fn number(d: usize) -> Self {
        Self::phase((0..d as i64).collect())
    }

    pub fn spin(two_j: i64) -> Result<Self> {
        Ok(spin_rep(two_j)?.into_representation())
    }

    pub fn from_generators(generators: [ComplexMatrix; 3]) -> Result<Self> {
        let d = generators[0].rows();
        for g in &generators {
            if g.shape() != (d, d) {
                return Err(Error::InvalidRepresentation("generators of different shapes".into()));
            }
            if g.hermitian_residual() > REP_TOL {
                return Err(Error::InvalidRepresentation("generator is not Hermitian".into()));
            }
        }
        let i = c(0.0, 1.0);
        let [x, y, z] = &generators;
        let scale = generators.iter().map(|g| g.frobenius_norm()).fold(1.0, f64::max);
        let res = [x.commutator(y).dist(&z.scale(i)), y.commutator(z).dist(&x.scale(i)), z.commutator(x).dist(&y.scale(i))]
            .into_iter()
            .fold(0.0, f64::max);
        if res > REP_TOL * scale {
            return Err(Error::InvalidRepresentation(format!("generators violate [Jx, Jy] = iJz (residual {res:e})")));
        }
        Ok(Self::Spin { generators })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Finite { elements } => elements[0].rows(),
            Self::Phase { weights, .. } => weights.len(),
            Self::Spin { generators } => generators[0].rows(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Finite { .. } => "finite",
            Self::Phase { .. } => "phase",
            Self::Spin { .. } => "spin",
        }
    }

    /// `U(θ)` of a phase representation.
    pub fn phase_element(&self, theta: f64) -> Option<ComplexMatrix> {
        match self {
            Self::Phase { weights, frame } => {
                let d = ComplexMatrix::diag(&weights.iter().map(|&n| C64::from_polar(1.0, n as f64 * theta)).collect::<Vec<_>>());
                Some(d.conjugate_by(frame))
            }
            _ => None,
        }
    }

    /// Largest weight difference of a phase representation.
    pub fn weight_gap(&self) -> Option<i64> {
        match self {
            Self::Phase { weights, .. } => {
                let max = weights.iter().copied().max().unwrap_or(0);
                let min = weights.iter().copied().min().unwrap_or(0);
                Some(max - min)
            }
            _ => None,
        }
    }

    /// Generator-level description: the number operator `F diag(n) F†` for phases, the three
    /// `J_k` for spins.
    fn generators(&self) -> Vec<ComplexMatrix> {
        match self {
            Self::Finite { .. } => Vec::new(),
            Self::Phase { weights, frame } => {
                vec![ComplexMatrix::diag_real(&weights.iter().map(|&n| n as f64).collect::<Vec<_>>()).conjugate_by(frame)]
            }
            Self::Spin { generators } => generators.to_vec(),
        }
    }
}

/// `min_φ ‖A − e^{iφ}B‖_F`.
fn phase_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let ov = b.hs_inner(a);
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { cr(1.0) };
    a.dist(&b.scale(ph))
}

/// Exact angle count for phase averages: `N = 2·gap + 1`.
pub fn phase_angle_count(gap: i64) -> usize {
    2 * gap.unsigned_abs() as usize + 1
}

fn phase_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// The complex-conjugate representation `g ↦ Ū(g)`, conjugation taken in the eigenbasis of `r`.
pub fn conjugate_rep(rep: &Representation, r: &ReferenceState) -> Result<Representation> {
    if rep.dim() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "representation of dimension {} against reference of dimension {}",
            rep.dim(),
            r.dim()
        )));
    }
    Ok(match rep {
        Representation::Finite { elements } => Representation::Finite {
            elements: elements.iter().map(|u| r.conj_in_basis(u)).collect::<Result<_>>()?,
        },
        Representation::Phase { weights, frame } => {
            let w = r.basis();
            Representation::Phase {
                weights: weights.iter().map(|n| -n).collect(),
                frame: w * &(&w.adjoint() * frame).conj(),
            }
        }
        Representation::Spin { generators } => {
            let g = |k: usize| r.conj_in_basis(&generators[k]).map(|x| x.scale_real(-1.0));
            Representation::Spin { generators: [g(0)?, g(1)?, g(2)?] }
        }
    })
}

/// Largest `‖U(g) ρ₀ U(g)† − ρ₀‖_F` over elements, or `‖[J_k, ρ₀]‖_F` over generators.
pub fn invariance_residual(rep: &Representation, r: &ReferenceState) -> Result<f64> {
    if rep.dim() != r.dim() {
        return Err(Error::DimensionMismatch("representation does not act on the reference space".into()));
    }
    let rho = r.density();
    Ok(match rep {
        Representation::Finite { elements } => elements.iter().map(|u| rho.conjugate_by(u).dist(&rho)).fold(0.0, f64::max),
        _ => rep.generators().iter().map(|g| g.commutator(&rho).frobenius_norm()).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceReport {
    pub residual: f64,
    pub covariant: bool,
    pub elements_tested: usize,
    /// Whether the commutation fast path (invariant `ρ₀`) was taken.
    pub invariant_reference: bool,
}

impl CovarianceReport {
    fn new(residual: f64, elements_tested: usize, invariant_reference: bool) -> Self {
        Self { residual, covariant: residual <= COVARIANCE_TOL, elements_tested, invariant_reference }
    }
}

fn check_pair(rep_a: &Representation, rep_b: &Representation, d_in: usize, d_out: usize) -> Result<()> {
    if rep_a.dim() != d_in || rep_b.dim() != d_out {
        return Err(Error::DimensionMismatch(format!(
            "representations of dimensions ({}, {}) for a channel {d_in} → {d_out}",
            rep_a.dim(),
            rep_b.dim()
        )));
    }
    match (rep_a, rep_b) {
        (Representation::Finite { elements: a }, Representation::Finite { elements: b }) if a.len() != b.len() => {
            Err(Error::InvalidRepresentation(format!("finite groups of orders {} and {}", a.len(), b.len())))
        }
        (Representation::Finite { .. }, Representation::Finite { .. })
        | (Representation::Phase { .. }, Representation::Phase { .. })
        | (Representation::Spin { .. }, Representation::Spin { .. }) => Ok(()),
        _ => Err(Error::InvalidRepresentation(format!("mismatched kinds {} and {}", rep_a.kind(), rep_b.kind()))),
    }
}

/// Paired group elements `(U(g), V(g))` for the discrete kinds.
fn element_pairs(rep_a: &Representation, rep_b: &Representation) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    match (rep_a, rep_b) {
        (Representation::Finite { elements: a }, Representation::Finite { elements: b }) => {
            a.iter().cloned().zip(b.iter().cloned()).collect()
        }
        (Representation::Phase { .. }, Representation::Phase { .. }) => {
            let gap = rep_a.weight_gap().unwrap().max(rep_b.weight_gap().unwrap());
            phase_angles(phase_angle_count(gap))
                .into_iter()
                .map(|t| (rep_a.phase_element(t).unwrap(), rep_b.phase_element(t).unwrap()))
                .collect()
        }
        _ => Vec::new(),
    }
}

/// `G_k = Ĵ_k ⊗ I + I ⊗ J_k`, with `Ĵ` the conjugate-representation generators.
fn joint_generators(conj_a: &Representation, rep_b: &Representation) -> Vec<ComplexMatrix> {
    let (ga, gb) = (conj_a.generators(), rep_b.generators());
    let (da, db) = (conj_a.dim(), rep_b.dim());
    ga.iter()
        .zip(&gb)
        .map(|(a, b)| &kron(a, &ComplexMatrix::identity(db)) + &kron(&ComplexMatrix::identity(da), b))
        .collect()
}

/// Decides covariance of `c` through its Choi state relative to `r`.
pub fn check_covariance(
    c: &Channel,
    rep_a: &Representation,
    rep_b: &Representation,
    r: &ReferenceState,
) -> Result<CovarianceReport> {
    check_pair(rep_a, rep_b, c.d_in(), c.d_out())?;
    let s = choi_from_channel(c, r)?;
    let s = s.matrix();
    let conj_a = conjugate_rep(rep_a, r)?;
    let invariant = invariance_residual(rep_a, r)? <= INVARIANCE_TOL;
    let omega = r.gns_vector();

    if let Representation::Spin { generators } = rep_a {
        let gens = joint_generators(&conj_a, rep_b);
        let residual = if invariant {
            gens.iter().map(|g| g.commutator(s).frobenius_norm()).fold(0.0, f64::max)
        } else {
            // Differentiate both sides of the displaced identity at the group identity.
            let d = c.d_in();
            let id = ComplexMatrix::identity(d);
            let p = ComplexMatrix::outer(&omega, &omega);
            let i = C64::new(0.0, 1.0);
            let mut worst: f64 = 0.0;
            for (g, (j, jhat)) in gens.iter().zip(generators.iter().zip(conj_a.generators())) {
                let m = &kron(j, &id) + &kron(&id, &jhat);
                let lhs = g.commutator(s).scale(i);
                let rhs = choi_of_operator(c, &m.commutator(&p).scale(i))?;
                worst = worst.max(lhs.dist(&rhs));
            }
            worst
        };
        return Ok(CovarianceReport::new(residual, gens.len(), invariant));
    }

    let pairs = element_pairs(&conj_a, rep_b);
    let originals = element_pairs(rep_a, rep_b);
    let mut worst: f64 = 0.0;
    for ((ubar, v), (u, _)) in pairs.iter().zip(&originals) {
        let x = kron(ubar, v);
        let res = if invariant {
            (&x * s).dist(&(s * &x))
        } else {
            let lhs = s.conjugate_by(&x.adjoint());
            let displaced = kron(u, ubar).adjoint().apply(&omega);
            lhs.dist(&choi_from_vector(c, &displaced)?)
        };
        worst = worst.max(res);
    }
    Ok(CovarianceReport::new(worst, pairs.len(), invariant))
}

/// Orthogonal projection of `x` onto the commutant of `gens`.
///
/// Row-major vectorization turns `X ↦ [G, X]` into `A = G⊗I − I⊗Gᵀ`; the commutant is the kernel
/// of the Hermitian Gram operator `Σ A†A`, found by one eigendecomposition. Eigenvalues are
/// squared singular values, so the cutoff applies to `λ/λ_max`.
pub fn commutant_projection(gens: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    let id = ComplexMatrix::identity(n);
    let mut gram = ComplexMatrix::zeros(n * n, n * n);
    for g in gens {
        let sup = &kron(g, &id) - &kron(&id, &g.transpose());
        gram = &gram + &(&sup.adjoint() * &sup);
    }
    let eig = herm_eig(&gram).expect("Gram operator is Hermitian");
    let top = eig.max().max(1.0);
    let idx: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] <= NULLSPACE_TOL * top).collect();
    let basis = eig.eigenvectors.columns(&idx);
    let coeffs = basis.adjoint().apply(x.data());
    let v = basis.apply(&coeffs);
    ComplexMatrix::from_vec(n, n, v).expect("projection keeps the shape")
}

/// Group average of the Choi state; `ρ₀` must be invariant under the input representation.
pub fn twirl_choi(s: &ChoiState, rep_a: &Representation, rep_b: &Representation) -> Result<ChoiState> {
    check_pair(rep_a, rep_b, s.d_in(), s.d_out())?;
    let r = s.reference();
    let inv = invariance_residual(rep_a, r)?;
    if inv > INVARIANCE_TOL {
        return Err(Error::NonInvariantReference(inv));
    }
    let conj_a = conjugate_rep(rep_a, r)?;
    let m = s.matrix();
    let out = match rep_a {
        Representation::Spin { .. } => commutant_projection(&joint_generators(&conj_a, rep_b), m),
        _ => {
            let pairs = element_pairs(&conj_a, rep_b);
            let n = m.rows();
            let mut acc = ComplexMatrix::zeros(n, n);
            for (ubar, v) in &pairs {
                acc = &acc + &m.conjugate_by(&kron(ubar, v).adjoint());
            }
            acc.scale_real(1.0 / pairs.len() as f64)
        }
    };
    ChoiState::from_parts(r.clone(), s.d_out(), out.hermitian_part())
}

/// Twirl at the channel level: Choi state, average, minimal Kraus extraction.
pub fn twirl_channel(c: &Channel, rep_a: &Representation, rep_b: &Representation, r: &ReferenceState) -> Result<Channel> {
    crate::choi::channel_from_choi(&twirl_choi(&choi_from_channel(c, r)?, rep_a, rep_b)?)
}

/// Phase-average over an explicit number of angles; exposed for exactness checks.
pub fn twirl_choi_phase_with(s: &ChoiState, rep_a: &Representation, rep_b: &Representation, n: usize) -> Result<ChoiState> {
    check_pair(rep_a, rep_b, s.d_in(), s.d_out())?;
    if rep_a.kind() != "phase" || n == 0 {
        return Err(Error::InvalidRepresentation("explicit angle counts need phase representations".into()));
    }
    let conj_a = conjugate_rep(rep_a, s.reference())?;
    let m = s.matrix();
    let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
    for t in phase_angles(n) {
        let x = kron(&conj_a.phase_element(t).unwrap(), &rep_b.phase_element(t).unwrap());
        acc = &acc + &m.conjugate_by(&x.adjoint());
    }
    ChoiState::from_parts(s.reference().clone(), s.d_out(), acc.scale_real(1.0 / n as f64).hermitian_part())
}

/// Group-averaged state `∫ U(g) ρ U(g)† dg`.
pub fn invariantize_state(rho: &DensityMatrix, rep: &Representation) -> Result<ReferenceState> {
    if rep.dim() != rho.dim() {
        return Err(Error::DimensionMismatch("representation does not act on the state".into()));
    }
    let m = rho.matrix();
    let avg = match rep {
        Representation::Finite { elements } => {
            let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
            for u in elements {
                acc = &acc + &m.conjugate_by(u);
            }
            acc.scale_real(1.0 / elements.len() as f64)
        }
        Representation::Phase { .. } => {
            let angles = phase_angles(phase_angle_count(rep.weight_gap().unwrap()));
            let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
            for &t in &angles {
                acc = &acc + &m.conjugate_by(&rep.phase_element(t).unwrap());
            }
            acc.scale_real(1.0 / angles.len() as f64)
        }
        Representation::Spin { generators } => commutant_projection(generators, m),
    };
    make_reference(&DensityMatrix::new(avg.hermitian_part())?)
}

/// Covariance under the modular flow of `ρ₀` on the input and `b ↦ e^{−itH} b e^{itH}` on the
/// output.
///
/// Decided by `‖[log ρ₀ ⊗ I + I ⊗ H, S]‖_F`, with spot checks of
/// `[ρ₀^{−it} ⊗ e^{−itH}, S] = 0` at `t ∈ {0.1, 1, π}`. With this sign, `H = −log ρ₀` is the
/// flow of `ρ₀` itself and the identity channel passes.
pub fn check_modular_covariance(c: &Channel, r: &ReferenceState, h: &ComplexMatrix) -> Result<CovarianceReport> {
    if h.shape() != (c.d_out(), c.d_out()) {
        return Err(Error::DimensionMismatch("generator does not act on the output space".into()));
    }
    let herm = h.hermitian_residual();
    if herm > HERMITIAN_GATE * h.frobenius_norm().max(1.0) {
        return Err(Error::NonHermitian(herm));
    }
    let h = h.hermitian_part();
    let s = choi_from_channel(c, r)?;
    let s = s.matrix();
    let (ia, ib) = (ComplexMatrix::identity(c.d_in()), ComplexMatrix::identity(c.d_out()));
    let g = &kron(&r.log(), &ib) + &kron(&ia, &h);
    let mut worst = g.commutator(s).frobenius_norm();
    for t in [0.1, 1.0, PI] {
        let x = kron(&r.pow_it(-t), &exp_i(&h, -t)?);
        worst = worst.max(x.commutator(s).frobenius_norm());
    }
    Ok(CovarianceReport::new(worst, 4, true))
}

/// Both-modular covariance with a faithful output state `σ₀`:
/// `(ρ₀^{−1} ⊗ σ₀) S = S (ρ₀^{−1} ⊗ σ₀)`, together with the flow test at `H = −log σ₀`.
pub fn check_bimodular_covariance(c: &Channel, r: &ReferenceState, sigma0: &ReferenceState) -> Result<CovarianceReport> {
    if sigma0.dim() != c.d_out() {
        return Err(Error::DimensionMismatch("output state does not match d_out".into()));
    }
    let flow = check_modular_covariance(c, r, &sigma0.log().scale_real(-1.0))?;
    let s = choi_from_channel(c, r)?;
    let x = kron(&r.spectral(|t| cr(1.0 / t)), &sigma0.density());
    let direct = x.commutator(s.matrix()).frobenius_norm();
    Ok(CovarianceReport::new(flow.residual.max(direct), flow.elements_tested + 1, true))
}
