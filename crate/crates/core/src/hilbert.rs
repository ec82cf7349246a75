//! Basis bookkeeping for N-qubit rings.
//!
//! A basis state is an N-bit mask; bit `n` set means site `n` is spin-down
//! (`|1⟩`, an excitation). Sites are 0-based: site `n` here is site `n + 1`
//! in the usual 1-based ket notation, and the ket string `|s_1 s_2 … s_N⟩`
//! corresponds to the mask `Σ s_n 2^(n-1)`. The full-basis index of a
//! configuration is its mask read as an integer.
//!
//! Fixed-magnetization sectors list their members in increasing mask order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest ring for which dense full-basis operators are built.
pub const MAX_FULL_SITES: usize = 14;
/// Largest ring for which full-basis state vectors are built.
pub const MAX_STATE_SITES: usize = 24;
/// Largest sector dimension handled densely.
pub const MAX_SECTOR_DIM: usize = 20_000;

/// Rank-1 test threshold on the second Schmidt value.
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn check_sites(n_sites: usize, max: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidArgument("ring must have at least one site".into()));
    }
    if n_sites > max {
        return Err(Error::Budget(format!(
            "{n_sites} sites exceeds the dense limit of {max}"
        )));
    }
    Ok(())
}

/// Binomial coefficient `C(n, k)`; saturates instead of overflowing.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Dimension of the `m`-excitation subspace of an `n_sites` ring.
pub fn sector_dimension(n_sites: usize, m: usize) -> Result<usize> {
    if m > n_sites {
        return Err(Error::SectorOutOfRange { n_sites, m });
    }
    Ok(binomial(n_sites, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    n_sites: usize,
    mask: u64,
}

impl SpinConfiguration {
    pub fn new(n_sites: usize, mask: u64) -> Result<Self> {
        if n_sites == 0 || n_sites > 63 {
            return Err(Error::InvalidArgument(format!(
                "n_sites must be in 1..=63, got {n_sites}"
            )));
        }
        if mask >> n_sites != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask:#b} has bits beyond {n_sites} sites"
            )));
        }
        Ok(Self { n_sites, mask })
    }

    /// Parses a ket string such as `"100"`; the first character is site 0.
    pub fn from_ket(ket: &str) -> Result<Self> {
        let mut mask = 0u64;
        let mut n = 0;
        for (site, c) in ket.chars().enumerate() {
            match c {
                '0' => {}
                '1' => mask |= 1 << site,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "ket {ket:?} contains {c:?}"
                    )))
                }
            }
            n = site + 1;
        }
        Self::new(n, mask)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Number of excitations (down spins).
    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_excited(&self, site: usize) -> bool {
        (self.mask >> site) & 1 == 1
    }

    pub fn to_ket(&self) -> String {
        (0..self.n_sites)
            .map(|s| if self.is_excited(s) { '1' } else { '0' })
            .collect()
    }
}

/// All weight-`m` configurations of an `n_sites` ring in increasing mask order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_sites: usize,
    m: usize,
    members: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, m: usize) -> Result<Self> {
        check_sites(n_sites, 63)?;
        let dim = sector_dimension(n_sites, m)?;
        if dim > MAX_SECTOR_DIM {
            return Err(Error::Budget(format!(
                "sector C({n_sites}, {m}) = {dim} exceeds {MAX_SECTOR_DIM}"
            )));
        }
        let mut members = Vec::with_capacity(dim);
        if m == 0 {
            members.push(0);
        } else {
            // Gosper's hack walks same-weight masks in increasing order.
            let limit = 1u64 << n_sites;
            let mut x = (1u64 << m) - 1;
            while x < limit {
                members.push(x);
                let c = x & x.wrapping_neg();
                let r = x + c;
                x = (((r ^ x) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(members.len(), dim);
        Ok(Self { n_sites, m, members })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn excitations(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn rank(&self, config: &SpinConfiguration) -> Result<usize> {
        if config.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: config.n_sites(),
            });
        }
        if config.weight() != self.m {
            return Err(Error::WeightMismatch {
                expected: self.m,
                found: config.weight(),
            });
        }
        self.rank_mask(config.mask())
            .ok_or_else(|| Error::InvalidArgument("mask not in sector".into()))
    }

    pub(crate) fn rank_mask(&self, mask: u64) -> Option<usize> {
        self.members.binary_search(&mask).ok()
    }

    pub fn unrank(&self, index: usize) -> Result<SpinConfiguration> {
        let mask = *self.members.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.members.len(),
        })?;
        SpinConfiguration::new(self.n_sites, mask)
    }
}

/// Which basis a vector or matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTag {
    Full(usize),
    Sector(usize, usize),
}

impl BasisTag {
    pub fn n_sites(&self) -> usize {
        match *self {
            BasisTag::Full(n) | BasisTag::Sector(n, _) => n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            BasisTag::Full(n) => 1usize << n,
            BasisTag::Sector(n, m) => binomial(n, m),
        }
    }
}

fn validate_sites(n_sites: usize, sites: &[usize]) -> Result<Vec<usize>> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument("site subset is empty".into()));
    }
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sites.len() {
        return Err(Error::InvalidArgument(format!("repeated site in {sites:?}")));
    }
    if let Some(&bad) = sorted.iter().find(|&&s| s >= n_sites) {
        return Err(Error::InvalidArgument(format!(
            "site {bad} out of range for {n_sites} sites"
        )));
    }
    Ok(sorted)
}

/// Splits full-basis indices into (kept part, rest) with kept sites packed
/// in ascending site order.
struct Bipartition {
    kept: Vec<usize>,
    rest: Vec<usize>,
}

impl Bipartition {
    fn new(n_sites: usize, kept: Vec<usize>) -> Self {
        let rest = (0..n_sites).filter(|s| !kept.contains(s)).collect();
        Self { kept, rest }
    }

    fn compose(&self, a: usize, b: usize) -> usize {
        let mut idx = 0;
        for (bit, &site) in self.kept.iter().enumerate() {
            idx |= ((a >> bit) & 1) << site;
        }
        for (bit, &site) in self.rest.iter().enumerate() {
            idx |= ((b >> bit) & 1) << site;
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    tag: BasisTag,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(tag: BasisTag, amplitudes: DVector<Complex64>) -> Result<Self> {
        if let BasisTag::Full(n) = tag {
            check_sites(n, MAX_STATE_SITES)?;
        }
        if amplitudes.len() != tag.dim() {
            return Err(Error::DimensionMismatch {
                expected: tag.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { tag, amplitudes })
    }

    pub fn basis_state(config: SpinConfiguration) -> Result<Self> {
        let n = config.n_sites();
        check_sites(n, MAX_STATE_SITES)?;
        let mut amps = DVector::from_element(1 << n, C_ZERO);
        amps[config.mask() as usize] = Complex64::new(1.0, 0.0);
        Ok(Self {
            tag: BasisTag::Full(n),
            amplitudes: amps,
        })
    }

    /// `|00…0⟩` on the full basis.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis_state(SpinConfiguration::new(n_sites, 0)?)
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn n_sites(&self) -> usize {
        self.tag.n_sites()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-9
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        self.amplitudes.unscale_mut(norm);
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.tag != other.tag {
            return Err(Error::InvalidArgument(format!(
                "basis mismatch: {:?} vs {:?}",
                self.tag, other.tag
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn conj(&self) -> Self {
        Self {
            tag: self.tag,
            amplitudes: self.amplitudes.map(|z| z.conj()),
        }
    }

    /// Embeds a sector vector into the full basis; full vectors are cloned.
    pub fn to_full(&self) -> Result<Self> {
        match self.tag {
            BasisTag::Full(_) => Ok(self.clone()),
            BasisTag::Sector(n, m) => {
                check_sites(n, MAX_STATE_SITES)?;
                let basis = SectorBasis::new(n, m)?;
                let mut amps = DVector::from_element(1 << n, C_ZERO);
                for (i, &mask) in basis.members().iter().enumerate() {
                    amps[mask as usize] = self.amplitudes[i];
                }
                Ok(Self {
                    tag: BasisTag::Full(n),
                    amplitudes: amps,
                })
            }
        }
    }

    /// Probability weight in each excitation sector `m = 0..=N`.
    pub fn sector_populations(&self) -> Vec<f64> {
        let n = self.n_sites();
        let mut pops = vec![0.0; n + 1];
        match self.tag {
            BasisTag::Full(_) => {
                for (idx, a) in self.amplitudes.iter().enumerate() {
                    pops[idx.count_ones() as usize] += a.norm_sqr();
                }
            }
            BasisTag::Sector(_, m) => pops[m] = self.amplitudes.norm_squared(),
        }
        pops
    }

    fn require_full(&self) -> Result<usize> {
        match self.tag {
            BasisTag::Full(n) => Ok(n),
            BasisTag::Sector(..) => Err(Error::InvalidArgument(
                "operation requires a full-basis state".into(),
            )),
        }
    }

    /// Reduced density matrix on `keep`, computed directly from amplitudes.
    ///
    /// Equal to `partial_trace(&DensityMatrix::from_pure(self), keep)`
    /// without forming the `2^N × 2^N` projector.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.require_full()?;
        let kept = validate_sites(n, keep)?;
        let k = kept.len();
        let split = Bipartition::new(n, kept);
        let coeffs = self.coefficient_matrix(&split);
        let rho = &coeffs * coeffs.adjoint();
        Ok(DensityMatrix::from_raw(BasisTag::Full(k), hermitize(rho)))
    }

    fn coefficient_matrix(&self, split: &Bipartition) -> DMatrix<Complex64> {
        let rows = 1usize << split.kept.len();
        let cols = 1usize << split.rest.len();
        DMatrix::from_fn(rows, cols, |a, b| self.amplitudes[split.compose(a, b)])
    }
}

/// Schmidt coefficients of `psi` across `part_a | complement`, descending.
pub fn schmidt_values(psi: &StateVector, part_a: &[usize]) -> Result<Vec<f64>> {
    let n = psi.require_full()?;
    let kept = validate_sites(n, part_a)?;
    if kept.len() == n {
        return Err(Error::InvalidArgument(
            "bipartition must leave both parts non-empty".into(),
        ));
    }
    let split = Bipartition::new(n, kept);
    let coeffs = psi.coefficient_matrix(&split);
    let mut values: Vec<f64> = coeffs.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// True when the second Schmidt value across `part_a` is at most
/// [`PRODUCT_TOLERANCE`].
pub fn is_product_across(psi: &StateVector, part_a: &[usize]) -> Result<bool> {
    let values = schmidt_values(psi, part_a)?;
    Ok(values.get(1).copied().unwrap_or(0.0) <= PRODUCT_TOLERANCE)
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj).unscale(2.0)
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    tag: BasisTag,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn new(tag: BasisTag, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != tag.dim() || entries.ncols() != tag.dim() {
            return Err(Error::DimensionMismatch {
                expected: tag.dim(),
                found: entries.nrows(),
            });
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::NotNormalized { trace: trace.re });
        }
        let entries = hermitize(entries);
        let min_eigenvalue = hermitian_eigenvalues(&entries)[0];
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { tag, entries })
    }

    pub(crate) fn from_raw(tag: BasisTag, entries: DMatrix<Complex64>) -> Self {
        Self { tag, entries }
    }

    /// `|ψ⟩⟨ψ|` for a normalized `psi`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        if !psi.is_normalized() {
            return Err(Error::NotNormalized {
                trace: psi.norm().powi(2),
            });
        }
        if let BasisTag::Full(n) = psi.tag() {
            check_sites(n, MAX_FULL_SITES)?;
        }
        let v = psi.amplitudes();
        Ok(Self::from_raw(psi.tag(), v * v.adjoint()))
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let tag = first.1.tag;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must be a probability vector (sum {total})"
            )));
        }
        let mut acc = DMatrix::from_element(tag.dim(), tag.dim(), C_ZERO);
        for (w, rho) in parts {
            if rho.tag != tag {
                return Err(Error::InvalidArgument("mixture of different bases".into()));
            }
            acc += rho.entries.map(|z| z * *w);
        }
        Ok(Self::from_raw(tag, acc))
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.tag() != self.tag {
            return Err(Error::InvalidArgument("basis mismatch".into()));
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.entries * v)).re)
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.tag != other.tag {
            return Err(Error::InvalidArgument("basis mismatch".into()));
        }
        let diff = hermitize(&self.entries - &other.entries);
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Traces out every site not in `keep`; the result's site order is ascending
/// over `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = match rho.tag() {
        BasisTag::Full(n) => n,
        BasisTag::Sector(..) => {
            return Err(Error::InvalidArgument(
                "partial trace requires a full-basis density matrix".into(),
            ))
        }
    };
    let kept = validate_sites(n, keep)?;
    let k = kept.len();
    let split = Bipartition::new(n, kept);
    let dim_k = 1usize << k;
    let dim_e = 1usize << (n - k);
    let mut out = DMatrix::from_element(dim_k, dim_k, C_ZERO);
    for r1 in 0..dim_k {
        for r2 in 0..dim_k {
            let mut acc = C_ZERO;
            for e in 0..dim_e {
                acc += rho.entries[(split.compose(r1, e), split.compose(r2, e))];
            }
            out[(r1, r2)] = acc;
        }
    }
    Ok(DensityMatrix::from_raw(BasisTag::Full(k), hermitize(out)))
}
