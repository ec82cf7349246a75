//! XXZ / XX ring Hamiltonians.
//!
//! ```text
//! H = Σᵢ [ J (σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁) + (J + Δ) σᶻᵢσᶻᵢ₊₁ + B σᶻᵢ + B′ σˣᵢ ],  i + 1 mod N
//! ```
//!
//! The field sign follows σᶻ|0⟩ = −|0⟩, σᶻ|1⟩ = +|1⟩ with `|0⟩` spin-up, so
//! `|00…0⟩` has field energy `−NB`. This is the conventional Pauli σᶻ after a
//! global `0 ↔ 1` relabel, equivalently `B → −B`.
//!
//! The XX model is `Δ = −J`: the z coupling vanishes.
//!
//! All operators are real symmetric in the computational basis and are
//! stored densely. Full-basis operators are limited to
//! [`MAX_FULL_SITES`](crate::hilbert::MAX_FULL_SITES) sites and sector
//! operators to [`MAX_SECTOR_DIM`](crate::hilbert::MAX_SECTOR_DIM) states.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{check_sites, BasisTag, SectorBasis, MAX_FULL_SITES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n_sites: usize,
    j_xy: f64,
    delta: f64,
    b_field: f64,
    b_perp: f64,
}

impl ModelParams {
    /// Ring of `n_sites ≥ 3` with x/y coupling `j_xy`, z coupling
    /// `j_xy + delta`, longitudinal field `b_field` and transverse
    /// perturbation `b_perp ≥ 0`.
    pub fn new(n_sites: usize, j_xy: f64, delta: f64, b_field: f64, b_perp: f64) -> Result<Self> {
        if n_sites < 3 {
            return Err(Error::InvalidArgument(format!(
                "ring models need at least 3 sites, got {n_sites}"
            )));
        }
        if n_sites > 63 {
            return Err(Error::Budget(format!("{n_sites} sites")));
        }
        for (name, v) in [
            ("j_xy", j_xy),
            ("delta", delta),
            ("b_field", b_field),
            ("b_perp", b_perp),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if b_perp < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "b_perp must be non-negative, got {b_perp}"
            )));
        }
        Ok(Self {
            n_sites,
            j_xy,
            delta,
            b_field,
            b_perp,
        })
    }

    pub fn xxz(n_sites: usize, j_xy: f64, delta: f64, b_field: f64) -> Result<Self> {
        Self::new(n_sites, j_xy, delta, b_field, 0.0)
    }

    pub fn xx(n_sites: usize, j_xy: f64, b_field: f64) -> Result<Self> {
        Self::new(n_sites, j_xy, -j_xy, b_field, 0.0)
    }

    pub fn with_b_field(self, b_field: f64) -> Result<Self> {
        Self::new(self.n_sites, self.j_xy, self.delta, b_field, self.b_perp)
    }

    pub fn with_b_perp(self, b_perp: f64) -> Result<Self> {
        Self::new(self.n_sites, self.j_xy, self.delta, self.b_field, b_perp)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn j_xy(&self) -> f64 {
        self.j_xy
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn j_z(&self) -> f64 {
        self.j_xy + self.delta
    }

    pub fn b_field(&self) -> f64 {
        self.b_field
    }

    pub fn b_perp(&self) -> f64 {
        self.b_perp
    }

    /// `Δ = −J` exactly (no z coupling).
    pub fn is_xx(&self) -> bool {
        self.j_z() == 0.0
    }

    pub fn conserves_magnetization(&self) -> bool {
        self.b_perp == 0.0
    }
}

/// Real symmetric operator in a tagged basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    tag: BasisTag,
    entries: DMatrix<f64>,
}

impl Operator {
    /// Validates shape and symmetry (1e-12).
    pub fn new(tag: BasisTag, entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != tag.dim() || entries.ncols() != tag.dim() {
            return Err(Error::DimensionMismatch {
                expected: tag.dim(),
                found: entries.nrows(),
            });
        }
        let deviation = symmetric_deviation(&entries);
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { tag, entries })
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &Operator) -> Result<f64> {
        if self.tag != other.tag {
            return Err(Error::InvalidArgument("basis mismatch".into()));
        }
        let c = &self.entries * &other.entries - &other.entries * &self.entries;
        Ok(c.norm())
    }
}

pub(crate) fn symmetric_deviation(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn bonds(n_sites: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_sites).map(move |i| (i, (i + 1) % n_sites))
}

/// Diagonal energy of a configuration: z bonds plus longitudinal field.
fn diagonal_energy(params: &ModelParams, mask: u64) -> f64 {
    let n = params.n_sites;
    let j_z = params.j_z();
    let mut e = 0.0;
    for (i, j) in bonds(n) {
        let aligned = ((mask >> i) & 1) == ((mask >> j) & 1);
        e += if aligned { j_z } else { -j_z };
    }
    let m = mask.count_ones() as f64;
    e + params.b_field * (2.0 * m - n as f64)
}

/// Full `2^N`-dimensional Hamiltonian.
pub fn build_full(params: &ModelParams) -> Result<Operator> {
    let n = params.n_sites;
    check_sites(n, MAX_FULL_SITES)?;
    let dim = 1usize << n;
    let hop = 2.0 * params.j_xy;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let mask = s as u64;
        h[(s, s)] = diagonal_energy(params, mask);
        for (i, j) in bonds(n) {
            if ((mask >> i) & 1) != ((mask >> j) & 1) {
                let t = s ^ (1 << i) ^ (1 << j);
                h[(t, s)] += hop;
            }
        }
        if params.b_perp != 0.0 {
            for i in 0..n {
                h[(s ^ (1 << i), s)] += params.b_perp;
            }
        }
    }
    Ok(Operator {
        tag: BasisTag::Full(n),
        entries: h,
    })
}

/// Restriction of [`build_full`] to the `m`-excitation sector.
pub fn build_sector(params: &ModelParams, m: usize) -> Result<Operator> {
    if !params.conserves_magnetization() {
        return Err(Error::SectorBreaking(params.b_perp));
    }
    let n = params.n_sites;
    let basis = SectorBasis::new(n, m)?;
    let dim = basis.len();
    let hop = 2.0 * params.j_xy;
    let mut h = DMatrix::zeros(dim, dim);
    for (col, &mask) in basis.members().iter().enumerate() {
        h[(col, col)] = diagonal_energy(params, mask);
        for (i, j) in bonds(n) {
            if ((mask >> i) & 1) != ((mask >> j) & 1) {
                let t = mask ^ (1 << i) ^ (1 << j);
                let row = basis
                    .rank_mask(t)
                    .expect("hopping preserves excitation number");
                h[(row, col)] += hop;
            }
        }
    }
    Ok(Operator {
        tag: BasisTag::Sector(n, m),
        entries: h,
    })
}

/// `Σᵢ σᶻᵢ`, diagonal with entries `2m − N`.
pub fn total_sz_operator(n_sites: usize) -> Result<Operator> {
    check_sites(n_sites, MAX_FULL_SITES)?;
    let dim = 1usize << n_sites;
    let diag = nalgebra::DVector::from_fn(dim, |s, _| {
        2.0 * s.count_ones() as f64 - n_sites as f64
    });
    Ok(Operator {
        tag: BasisTag::Full(n_sites),
        entries: DMatrix::from_diagonal(&diag),
    })
}

/// Cyclic shift moving the spin on site `n` to site `n + 1 mod N`.
pub fn translation_operator(n_sites: usize) -> Result<Operator> {
    check_sites(n_sites, MAX_FULL_SITES)?;
    let dim = 1usize << n_sites;
    let full = (1usize << n_sites) - 1;
    let mut t = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let shifted = ((s << 1) | (s >> (n_sites - 1))) & full;
        t[(shifted, s)] = 1.0;
    }
    // Not symmetric, so bypass Operator::new.
    Ok(Operator {
        tag: BasisTag::Full(n_sites),
        entries: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spin_flip(h: &DMatrix<f64>) -> DMatrix<f64> {
        let dim = h.nrows();
        let all = dim - 1;
        DMatrix::from_fn(dim, dim, |r, c| h[(r ^ all, c ^ all)])
    }

    #[test]
    fn rejects_small_rings_and_negative_perturbation() {
        assert!(ModelParams::xx(2, -1.0, 1.0).is_err());
        assert!(ModelParams::new(4, -1.0, 1.0, 1.0, -0.1).is_err());
        assert!(ModelParams::new(4, f64::NAN, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn heisenberg_triangle_spectrum() {
        for j in [-1.3, 0.7, 2.0] {
            let h = build_full(&ModelParams::xxz(3, j, 0.0, 0.0).unwrap()).unwrap();
            let mut vals: Vec<f64> = h.entries().clone().symmetric_eigenvalues().iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            let mut expected = vec![3.0 * j; 4];
            expected.extend(vec![-3.0 * j; 4]);
            expected.sort_by(f64::total_cmp);
            for (a, b) in vals.iter().zip(&expected) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn all_up_diagonal_element() {
        let p = ModelParams::new(5, -0.8, 0.3, 1.7, 0.0).unwrap();
        let h = build_full(&p).unwrap();
        let n = 5.0;
        assert_abs_diff_eq!(h.entries()[(0, 0)], n * (-0.8 + 0.3) - n * 1.7, epsilon = 1e-14);
        let p3 = ModelParams::xxz(3, -1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(build_full(&p3).unwrap().entries()[(0, 0)], -3.0, epsilon = 1e-14);
    }

    #[test]
    fn traceless_and_real_symmetric() {
        // Dyadic couplings keep every diagonal sum exact.
        let p = ModelParams::new(6, 0.5, -1.25, 0.75, 0.25).unwrap();
        let h = build_full(&p).unwrap();
        assert_eq!(h.trace(), 0.0);
        assert_eq!(symmetric_deviation(h.entries()), 0.0);

        let p = ModelParams::new(6, 0.4, -1.1, 0.9, 0.2).unwrap();
        let h = build_full(&p).unwrap();
        assert_abs_diff_eq!(h.trace(), 0.0, epsilon = 1e-12);
        assert_eq!(symmetric_deviation(h.entries()), 0.0);
    }

    #[test]
    fn sector_triangle() {
        let p = ModelParams::xxz(3, -1.0, 1.0, 0.0).unwrap();
        let h = build_sector(&p, 1).unwrap();
        for i in 0..3 {
            assert_eq!(h.entries()[(i, i)], 0.0);
            for j in 0..3 {
                if i != j {
                    assert_eq!(h.entries()[(i, j)], -2.0);
                }
            }
        }
    }

    #[test]
    fn empty_sector_energy() {
        let p = ModelParams::xx(7, -1.0, 0.6).unwrap();
        let h = build_sector(&p, 0).unwrap();
        assert_eq!(h.dim(), 1);
        assert_abs_diff_eq!(h.entries()[(0, 0)], -7.0 * 0.6, epsilon = 1e-14);
    }

    #[test]
    fn sectors_tile_full_hamiltonian() {
        let p = ModelParams::xxz(5, 0.7, -0.2, 0.45).unwrap();
        let full = build_full(&p).unwrap();
        for m in 0..=5 {
            let basis = SectorBasis::new(5, m).unwrap();
            let block = build_sector(&p, m).unwrap();
            for (r, &mr) in basis.members().iter().enumerate() {
                for (c, &mc) in basis.members().iter().enumerate() {
                    assert_eq!(block.entries()[(r, c)], full.entries()[(mr as usize, mc as usize)]);
                }
            }
        }
    }

    #[test]
    fn sector_requires_conserved_magnetization() {
        let p = ModelParams::new(4, -1.0, 1.0, 1.0, 0.1).unwrap();
        assert!(matches!(build_sector(&p, 1), Err(Error::SectorBreaking(_))));
    }

    #[test]
    fn symmetries_commute() {
        let p = ModelParams::xxz(6, -0.9, 0.4, 1.3).unwrap();
        let h = build_full(&p).unwrap();
        let sz = total_sz_operator(6).unwrap();
        let t = translation_operator(6).unwrap();
        assert_eq!(h.commutator_norm(&sz).unwrap(), 0.0);
        assert_eq!(h.commutator_norm(&t).unwrap(), 0.0);

        let hp = build_full(&p.with_b_perp(0.3).unwrap()).unwrap();
        assert_eq!(hp.commutator_norm(&t).unwrap(), 0.0);
        assert!(hp.commutator_norm(&sz).unwrap() > 0.1);
    }

    #[test]
    fn sz_convention() {
        let sz = total_sz_operator(4).unwrap();
        assert_eq!(sz.entries()[(0, 0)], -4.0);
        assert_eq!(sz.entries()[(15, 15)], 4.0);
    }

    #[test]
    fn perturbation_couples_adjacent_sectors_only() {
        let p = ModelParams::new(5, -1.0, 0.5, 1.0, 0.25).unwrap();
        let h = build_full(&p).unwrap();
        for r in 0..32usize {
            for c in 0..32usize {
                let dw = (r.count_ones() as i32 - c.count_ones() as i32).abs();
                let v = h.entries()[(r, c)];
                if dw == 1 && v != 0.0 {
                    assert_eq!(v, 0.25);
                    assert_eq!((r ^ c).count_ones(), 1);
                } else if dw > 1 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn spin_flip_reverses_field() {
        let p = ModelParams::new(5, -1.0, 0.3, 1.4, 0.2).unwrap();
        let flipped = spin_flip(build_full(&p).unwrap().entries());
        let reversed = build_full(&p.with_b_field(-1.4).unwrap()).unwrap();
        assert_eq!(&flipped, reversed.entries());
    }
}
