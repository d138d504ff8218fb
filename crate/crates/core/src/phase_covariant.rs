//! Phase-shift covariant channels on a truncated oscillator.
//!
//! With `U(θ) = diag(e^{imθ})`, every covariant unital channel has Kraus operators
//! `K_{l,j}|m⟩ = τ_{l,j,m}|m+l⟩` with `Σ_{l,j} |τ_{l,j,m}|² = 1` for each `m`. Sector shifts `l`
//! run over all of `(−d, d)`: lowering channels such as amplitude damping live in `l < 0`.
//!
//! On the Choi side, `ℋ⊗ℋ` splits into sectors `𝒦_l = span{|m, m+l⟩}` and a covariant Choi
//! state is block diagonal across them; factoring each block recovers the `τ`.

use std::collections::BTreeMap;

use crate::channel::Channel;
use crate::choi::{canonical_phase, choi_from_channel, ChoiState, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, ComplexMatrix, C64};
use crate::states::ReferenceState;
use crate::symmetry::{check_covariance, Representation, COVARIANCE_TOL};

/// Per-`m` normalization tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Coefficients `τ_{l,j,m}` keyed by `(l, j, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauFamily {
    d: usize,
    taus: BTreeMap<(i64, usize, usize), C64>,
}

impl TauFamily {
    pub fn new(d: usize, taus: BTreeMap<(i64, usize, usize), C64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionMismatch("truncation dimension must be positive".into()));
        }
        for &(l, j, m) in taus.keys() {
            let target = m as i64 + l;
            if m >= d || target < 0 || target >= d as i64 {
                return Err(Error::TruncationViolation { l, j, m, d });
            }
        }
        for (m, sum) in norms(d, &taus).into_iter().enumerate() {
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NormalizationViolation { m, sum });
            }
        }
        Ok(Self { d, taus })
    }

    /// `τ_{0,0,m} = e^{imθ₀}`: the channel `B ↦ U(θ₀)† B U(θ₀)`.
    pub fn rotation(d: usize, theta0: f64) -> Self {
        let taus = (0..d).map(|m| ((0, 0, m), C64::from_polar(1.0, m as f64 * theta0))).collect();
        Self { d, taus }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn taus(&self) -> &BTreeMap<(i64, usize, usize), C64> {
        &self.taus
    }

    pub fn get(&self, l: i64, j: usize, m: usize) -> C64 {
        self.taus.get(&(l, j, m)).copied().unwrap_or(cr(0.0))
    }
}

fn norms(d: usize, taus: &BTreeMap<(i64, usize, usize), C64>) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (&(_, _, m), t) in taus {
        if m < d {
            out[m] += t.norm_sqr();
        }
    }
    out
}

/// Kraus operators `K_{l,j} = Σ_m τ_{l,j,m} |m+l⟩⟨m|`, one per `(l, j)` in key order.
pub fn build_channel(tf: &TauFamily) -> Result<Channel> {
    let d = tf.d;
    let mut ops: BTreeMap<(i64, usize), ComplexMatrix> = BTreeMap::new();
    for (&(l, j, m), &t) in &tf.taus {
        let k = ops.entry((l, j)).or_insert_with(|| ComplexMatrix::zeros(d, d));
        k[((m as i64 + l) as usize, m)] = t;
    }
    Channel::new(d, d, ops.into_values().collect())
}

/// Index of `|m, m+l⟩` in `ℋ⊗𝒦`.
fn sector_index(d: usize, m: usize, l: i64) -> usize {
    m * d + (m as i64 + l) as usize
}

/// The `m` values admissible in sector `l`.
pub fn sector_range(d: usize, l: i64) -> std::ops::Range<usize> {
    let lo = (-l).max(0) as usize;
    let hi = (d as i64 - l.max(0)).max(0) as usize;
    lo..hi
}

/// Compressions of a Choi state to the weight sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlocks {
    pub d: usize,
    /// `l ↦ S_l`, rows and columns indexed by `m` over [`sector_range`].
    pub blocks: BTreeMap<i64, ComplexMatrix>,
    /// Frobenius norm of everything outside the blocks.
    pub off_sector: f64,
}

impl SectorBlocks {
    pub fn total_trace(&self) -> f64 {
        self.blocks.values().map(|b| b.trace().re).sum()
    }

    /// `Σ_l ⟨m, m+l|S_l|m, m+l⟩`, which reproduces `t_m`.
    pub fn margin_weights(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.d];
        for (&l, b) in &self.blocks {
            for (k, m) in sector_range(self.d, l).enumerate() {
                t[m] += b[(k, k)].re;
            }
        }
        t
    }
}

/// Weights `t_m` of a reference state whose pinned eigenbasis is the number basis (up to order).
fn number_weights(r: &ReferenceState) -> Result<Vec<f64>> {
    let d = r.dim();
    let w = r.basis();
    let mut t = vec![0.0; d];
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let col = w.col(k);
        let (m, top) = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, z)| (i, *z))
            .unwrap();
        let off: f64 = col.iter().enumerate().filter(|&(i, _)| i != m).map(|(_, z)| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(off).max((top - cr(1.0)).norm());
        t[m] = r.weights()[k];
    }
    if worst > 1e-10 {
        return Err(Error::NondiagonalReference(worst));
    }
    Ok(t)
}

pub fn sector_decompose(s: &ChoiState) -> Result<SectorBlocks> {
    let d = s.d_in();
    if s.d_out() != d {
        return Err(Error::DimensionMismatch("sector decomposition needs d_in = d_out".into()));
    }
    number_weights(s.reference())?;
    let m = s.matrix();
    let mut blocks = BTreeMap::new();
    let mut inside = 0.0;
    for l in -(d as i64 - 1)..=(d as i64 - 1) {
        let idx: Vec<usize> = sector_range(d, l).map(|mm| sector_index(d, mm, l)).collect();
        let b = m.select(&idx, &idx);
        inside += b.frobenius_norm().powi(2);
        blocks.insert(l, b);
    }
    let off_sector = (m.frobenius_norm().powi(2) - inside).max(0.0).sqrt();
    Ok(SectorBlocks { d, blocks, off_sector })
}

/// Reads `τ` off the sector blocks of a covariant channel's Choi state.
///
/// Within each sector the block eigenvectors, by descending eigenvalue and with the first
/// nonzero component real positive, give `j = 0, 1, …`; then `τ_{l,j,m} = √μ v[m] / √t_m`.
pub fn extract_tau(c: &Channel, r: &ReferenceState) -> Result<TauFamily> {
    let d = c.d_in();
    if c.d_out() != d || r.dim() != d {
        return Err(Error::DimensionMismatch("phase family needs square channels".into()));
    }
    let t = number_weights(r)?;
    let rep = Representation::number(d);
    let report = check_covariance(c, &rep, &rep, r)?;
    if report.residual > COVARIANCE_TOL {
        return Err(Error::NotCovariant(report.residual));
    }
    let s = choi_from_channel(c, r)?;
    let top = herm_eig(s.matrix())?.max();
    let blocks = sector_decompose(&s)?;
    let mut taus = BTreeMap::new();
    for (&l, b) in &blocks.blocks {
        if b.rows() == 0 {
            continue;
        }
        let eig = herm_eig(b)?;
        let ms: Vec<usize> = sector_range(d, l).collect();
        for (j, idx) in (0..eig.eigenvalues.len()).rev().enumerate() {
            let mu = eig.eigenvalues[idx];
            if mu <= RANK_CUTOFF * top {
                break;
            }
            let mut v = eig.eigenvectors.col(idx);
            canonical_phase(&mut v);
            for (k, &m) in ms.iter().enumerate() {
                let tau = v[k] * (mu / t[m]).sqrt();
                if tau.norm() > 0.0 {
                    taus.insert((l, j, m), tau);
                }
            }
        }
    }
    TauFamily::new(d, taus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::action_distance;
    use crate::linalg::c;
    use crate::states::diagonal_reference;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn amplitude_damping_family(g: f64) -> TauFamily {
        let mut taus = BTreeMap::new();
        taus.insert((0, 0, 0), cr(1.0));
        taus.insert((0, 0, 1), cr((1.0 - g).sqrt()));
        taus.insert((-1, 1, 1), cr(g.sqrt()));
        TauFamily::new(2, taus).unwrap()
    }

    #[test]
    fn rotation_family_is_conjugation() {
        let th = 0.7;
        let ch = build_channel(&TauFamily::rotation(4, th)).unwrap();
        let u = ComplexMatrix::diag(&(0..4).map(|m| C64::from_polar(1.0, m as f64 * th)).collect::<Vec<_>>());
        assert!(action_distance(&ch, &Channel::unitary(u)).unwrap() < 1e-12);
        let id = build_channel(&TauFamily::rotation(3, 0.0)).unwrap();
        assert!(action_distance(&id, &Channel::identity(3)).unwrap() < 1e-15);
    }

    #[test]
    fn amplitude_damping_matches_standard_kraus() {
        let ch = build_channel(&amplitude_damping_family(0.36)).unwrap();
        assert!(action_distance(&ch, &Channel::amplitude_damping(0.36)).unwrap() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut taus = BTreeMap::new();
        taus.insert((0, 0, 0), cr(1.0));
        taus.insert((1, 0, 1), cr(1.0));
        assert!(matches!(TauFamily::new(2, taus), Err(Error::TruncationViolation { l: 1, m: 1, .. })));
        let mut taus = BTreeMap::new();
        taus.insert((0, 0, 0), cr(1.0));
        taus.insert((0, 0, 1), cr(0.5));
        assert!(matches!(TauFamily::new(2, taus), Err(Error::NormalizationViolation { m: 1, .. })));
    }

    #[test]
    fn sectors_of_simple_channels() {
        let r = diagonal_reference(&[0.4, 0.35, 0.25]).unwrap();
        let s = choi_from_channel(&Channel::identity(3), &r).unwrap();
        let b = sector_decompose(&s).unwrap();
        assert!((b.blocks[&0].trace().re - 1.0).abs() < 1e-14);
        assert!(b.off_sector < 1e-14);
        let s = choi_from_channel(&build_channel(&TauFamily::rotation(3, 1.1)).unwrap(), &r).unwrap();
        let b = sector_decompose(&s).unwrap();
        assert_eq!(psd_rank_of(&b.blocks[&0]), 1);
        for (m, t) in b.margin_weights().iter().enumerate() {
            assert!((t - [0.4, 0.35, 0.25][m]).abs() < 1e-14);
        }

        let g = 0.36;
        let r = diagonal_reference(&[0.6, 0.4]).unwrap();
        let s = choi_from_channel(&Channel::amplitude_damping(g), &r).unwrap();
        let b = sector_decompose(&s).unwrap();
        // l = 0 holds √t₀|00⟩ + √(t₁(1−γ))|11⟩, l = −1 holds √(t₁γ)|10⟩
        assert!((b.blocks[&0].trace().re - (0.6 + 0.4 * (1.0 - g))).abs() < 1e-14);
        assert!((b.blocks[&-1].trace().re - 0.4 * g).abs() < 1e-14);
        assert!(b.blocks[&1].max_abs() < 1e-15);
        assert!((b.total_trace() - 1.0).abs() < 1e-14);
    }

    fn psd_rank_of(m: &ComplexMatrix) -> usize {
        crate::linalg::psd_rank(&herm_eig(m).unwrap(), 1e-10)
    }

    #[test]
    fn nondiagonal_reference_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let r = crate::states::make_reference(&crate::random::random_density(&mut rng, 2)).unwrap();
        let s = choi_from_channel(&Channel::identity(2), &r).unwrap();
        assert!(matches!(sector_decompose(&s), Err(Error::NondiagonalReference(_))));
    }

    pub(crate) fn random_family<R: Rng>(rng: &mut R, d: usize) -> TauFamily {
        let mut raw: BTreeMap<(i64, usize, usize), C64> = BTreeMap::new();
        for m in 0..d {
            for l in -(m as i64)..(d - m) as i64 {
                for j in 0..2 {
                    if rng.random_bool(0.5) {
                        raw.insert((l, j, m), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                    }
                }
            }
            if !raw.keys().any(|k| k.2 == m) {
                raw.insert((0, 0, m), cr(1.0));
            }
        }
        let n = norms(d, &raw);
        let taus = raw.into_iter().map(|((l, j, m), t)| ((l, j, m), t / n[m].sqrt())).collect();
        TauFamily::new(d, taus).unwrap()
    }

    #[test]
    fn roundtrip_random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for _ in 0..20 {
            let d = rng.random_range(2..6);
            let tf = random_family(&mut rng, d);
            let ch = build_channel(&tf).unwrap();
            assert!(ch.unital_residual() < 1e-10);
            let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..1.0)).collect();
            let tot: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= tot);
            let r = diagonal_reference(&p).unwrap();
            let back = build_channel(&extract_tau(&ch, &r).unwrap()).unwrap();
            let s1 = choi_from_channel(&ch, &r).unwrap();
            let s2 = choi_from_channel(&back, &r).unwrap();
            assert!(s1.matrix().dist(s2.matrix()) < 1e-10);
        }
    }

    #[test]
    fn extract_rotation_phases() {
        let th = 0.4;
        let r = diagonal_reference(&[0.3, 0.3, 0.4]).unwrap();
        let tf = extract_tau(&build_channel(&TauFamily::rotation(3, th)).unwrap(), &r).unwrap();
        assert_eq!(tf.taus().len(), 3);
        for m in 0..3 {
            let t = tf.get(0, 0, m);
            assert!((t.norm() - 1.0).abs() < 1e-12);
            let rel = t / tf.get(0, 0, 0);
            assert!((rel - C64::from_polar(1.0, m as f64 * th)).norm() < 1e-12);
        }
    }

    #[test]
    fn extract_rejects_non_covariant() {
        let r = ReferenceState::maximally_mixed(2);
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(1.0 / 2f64.sqrt());
        assert!(matches!(extract_tau(&Channel::unitary(h), &r), Err(Error::NotCovariant(_))));
    }
}
