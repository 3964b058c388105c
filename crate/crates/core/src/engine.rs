//! Greedy sparse model generation over the DCT dictionary.
//!
//! Each iteration fits every basis function to the current residual
//! `r = f − g` by weighted least squares,
//!
//! ```text
//! ĉ(k,l) = Σ w·r·φ(k,l) / Σ w·φ(k,l)²,     ΔE(k,l) = ĉ(k,l)² · Σ w·φ(k,l)²
//! ```
//!
//! picks the basis with the largest (optionally spectrally weighted) energy
//! reduction, and adds it to the model. The residual kept in state is always
//! unweighted; the spatial weight enters both sums, which covers the mesh-only
//! variant and the key-point variant (whose pre-weighted residual reduces to
//! the same expression).
//!
//! The projections `Σ w·r·φ(k,l)` are updated incrementally from weighted
//! Gram columns of the selected bases. A product of two DCT cosines is a sum
//! of two cosines at the summed and differenced frequencies, so every Gram
//! entry is a combination of four weighted cosine sums over the doubled
//! frequency range. Those sums are tabulated once per block, after which a
//! Gram column costs no more than the update it feeds.

use crate::basis::{dct_cos, BasisSpec, BasisTable, Freq};
use crate::error::{Error, Result};

/// Spatial and spectral weighting parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingConfig {
    /// Base of the isotropic spatial window, `0 < rho < 1`.
    pub rho: f64,
    /// Attenuation of key-point samples, `0 <= alpha <= 1`.
    pub alpha: f64,
    /// Base of the spectral window, `0 < sigma < 1`.
    pub sigma: f64,
    pub spectral_enabled: bool,
}

impl Default for WeightingConfig {
    fn default() -> Self {
        Self {
            rho: 0.8,
            alpha: 0.5,
            sigma: 0.9,
            spectral_enabled: true,
        }
    }
}

impl WeightingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in ]0,1[, got {}", self.rho)));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must lie in ]0,1[, got {}",
                self.sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in [0,1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingConfig {
    pub max_iterations: usize,
    /// Stop once the selected basis would reduce the energy by less than this.
    pub min_energy_reduction: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            min_energy_reduction: 0.0,
        }
    }
}

impl StoppingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.min_energy_reduction >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "min_energy_reduction must be non-negative, got {}",
                self.min_energy_reduction
            )));
        }
        Ok(())
    }
}

/// `rho^d` where `d` is the distance of `(x, y)` from the area center.
pub fn spatial_weight(x: f64, y: f64, m: usize, n: usize, rho: f64) -> f64 {
    let dx = x - (m as f64 - 1.0) / 2.0;
    let dy = y - (n as f64 - 1.0) / 2.0;
    rho.powf((dx * dx + dy * dy).sqrt())
}

/// [`spatial_weight`] with key points attenuated by `alpha`.
pub fn spatial_weight_fsmr(
    x: f64,
    y: f64,
    m: usize,
    n: usize,
    rho: f64,
    alpha: f64,
    is_key_point: bool,
) -> f64 {
    let w = spatial_weight(x, y, m, n, rho);
    if is_key_point {
        alpha * w
    } else {
        w
    }
}

/// `sigma^sqrt(k² + l²)`.
pub fn spectral_weight(k: usize, l: usize, sigma: f64) -> f64 {
    sigma.powf(((k * k + l * l) as f64).sqrt())
}

/// Samples of one reconstruction area with their weights and basis table.
#[derive(Debug, Clone)]
pub struct WeightedSampleSet {
    positions: Vec<[f64; 2]>,
    values: Vec<f64>,
    weights: Vec<f64>,
    basis: BasisTable,
}

impl WeightedSampleSet {
    pub fn new(
        positions: Vec<[f64; 2]>,
        values: Vec<f64>,
        weights: Vec<f64>,
        spec: BasisSpec,
    ) -> Result<Self> {
        if positions.len() != values.len() || positions.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "mismatched lengths: {} positions, {} values, {} weights",
                positions.len(),
                values.len(),
                weights.len()
            )));
        }
        if positions.is_empty() {
            return Err(Error::EmptyArea);
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be finite and >= 0".into()));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidArgument("at least one weight must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sample values must be finite".into()));
        }
        let basis = BasisTable::build(&positions, spec);
        Ok(Self {
            positions,
            values,
            weights,
            basis,
        })
    }

    /// Samples weighted by the spatial window of `spec`'s area.
    pub fn with_spatial_weights(
        positions: Vec<[f64; 2]>,
        values: Vec<f64>,
        spec: BasisSpec,
        rho: f64,
    ) -> Result<Self> {
        let weights = positions
            .iter()
            .map(|&[x, y]| spatial_weight(x, y, spec.m(), spec.n(), rho))
            .collect();
        Self::new(positions, values, weights, spec)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> &BasisTable {
        &self.basis
    }

    pub fn spec(&self) -> BasisSpec {
        self.basis.spec()
    }

    /// Same samples with every weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= factor;
        }
        if !out.weights.iter().any(|&w| w > 0.0) || out.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad weight scale {factor}")));
        }
        Ok(out)
    }

    fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn degeneracy_floor(&self) -> f64 {
        (DEGENERATE_RATIO * self.total_weight()).max(MIN_DENOMINATOR)
    }
}

/// Absolute floor below which `Σ w·φ²` counts as zero.
pub const MIN_DENOMINATOR: f64 = 1e-300;

/// Bases whose `Σ w·φ²` falls below this fraction of `Σ w` are treated as
/// vanishing on the sample set (all samples on or next to nodal lines).
const DEGENERATE_RATIO: f64 = 1e-12;

/// Weighted least-squares amplitude of `f` against the unweighted residual.
pub fn estimate_coefficient(set: &WeightedSampleSet, residual: &[f64], f: Freq) -> Result<f64> {
    check_freq(set.spec(), f)?;
    if residual.len() != set.len() {
        return Err(Error::InvalidArgument(format!(
            "residual has {} entries for {} samples",
            residual.len(),
            set.len()
        )));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, (&r, &w)) in residual.iter().zip(&set.weights).enumerate() {
        let phi = set.basis.at(i, f);
        num += r * phi * w;
        den += w * phi * phi;
    }
    if !(den > MIN_DENOMINATOR) {
        return Err(Error::CoefficientUndefined { k: f.k, l: f.l });
    }
    Ok(num / den)
}

/// Energy removed by adding `c_hat · φ(f)` to the model: `ĉ² Σ w·φ²`.
pub fn energy_reduction(set: &WeightedSampleSet, c_hat: f64, f: Freq) -> f64 {
    let den: f64 = (0..set.len())
        .map(|i| {
            let phi = set.basis.at(i, f);
            set.weights[i] * phi * phi
        })
        .sum();
    c_hat * c_hat * den
}

/// Weighted residual energy `Σ w·r²`.
pub fn residual_energy(set: &WeightedSampleSet, residual: &[f64]) -> f64 {
    set.weights
        .iter()
        .zip(residual)
        .map(|(w, r)| w * r * r)
        .sum()
}

fn check_freq(spec: BasisSpec, f: Freq) -> Result<()> {
    if f.k >= spec.m() || f.l >= spec.n() {
        return Err(Error::InvalidArgument(format!(
            "frequency ({}, {}) outside {}x{} dictionary",
            f.k,
            f.l,
            spec.m(),
            spec.n()
        )));
    }
    Ok(())
}

/// Argmax over the dictionary with deterministic tie-breaking.
///
/// Candidates are ranked by increasing `k² + l²`, then increasing `k`; among
/// equal scores the lowest rank wins.
#[derive(Debug, Clone)]
struct Selector {
    rank: Vec<u32>,
    score_weight: Vec<f64>,
}

impl Selector {
    fn new(spec: BasisSpec, cfg: &WeightingConfig) -> Self {
        let mut order: Vec<u32> = (0..spec.len() as u32).collect();
        order.sort_by_key(|&j| {
            let f = spec.freq(j as usize);
            (f.radius_sq(), f.k)
        });
        let mut rank = vec![0; spec.len()];
        for (r, &j) in order.iter().enumerate() {
            rank[j as usize] = r as u32;
        }
        let score_weight = spec
            .freqs()
            .map(|f| {
                if cfg.spectral_enabled {
                    spectral_weight(f.k, f.l, cfg.sigma)
                } else {
                    1.0
                }
            })
            .collect();
        Self { rank, score_weight }
    }

    /// Best `(index, score)` with `score(j) = proj[j]² · factor[j]`.
    #[inline]
    fn best(&self, proj: &[f64], factor: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, u32)> = None;
        for (j, ((&p, &q), &r)) in proj.iter().zip(factor).zip(&self.rank).enumerate() {
            let s = p * p * q;
            match best {
                Some((_, bs, br)) if s < bs || (s == bs && r > br) || s.is_nan() => {}
                _ => best = Some((j, s, r)),
            }
        }
        best.map(|(j, s, _)| (j, s))
    }

    /// Best index given per-basis energy reductions; non-finite or negative
    /// entries are not selectable.
    fn select(&self, delta_e: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &de) in delta_e.iter().enumerate() {
            if !(de.is_finite() && de >= 0.0) {
                continue;
            }
            let s = de * self.score_weight[j];
            match best {
                Some((b, bs)) if s < bs || (s == bs && self.rank[j] > self.rank[b]) => {}
                _ => best = Some((j, s)),
            }
        }
        best
    }
}

/// Chooses the basis with the largest energy reduction, spectrally weighted
/// when enabled. `delta_e` is indexed like `spec` (`k * n + l`).
pub fn select_basis(delta_e: &[f64], spec: BasisSpec, cfg: &WeightingConfig) -> Result<Freq> {
    if delta_e.len() != spec.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} energy reductions, got {}",
            spec.len(),
            delta_e.len()
        )));
    }
    Selector::new(spec, cfg)
        .select(delta_e)
        .map(|(j, _)| spec.freq(j))
        .ok_or(Error::NoSelectableBasis)
}

/// Accumulated expansion coefficients of one area model.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpectrum {
    spec: BasisSpec,
    coefficients: Vec<f64>,
    pub iterations_used: usize,
    pub final_energy: f64,
}

impl SparseSpectrum {
    pub fn zeros(spec: BasisSpec) -> Self {
        Self {
            spec,
            coefficients: vec![0.0; spec.len()],
            iterations_used: 0,
            final_energy: 0.0,
        }
    }

    pub fn from_coefficients(spec: BasisSpec, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coefficients.len()
            )));
        }
        Ok(Self {
            spec,
            coefficients,
            iterations_used: 0,
            final_energy: 0.0,
        })
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn coefficient(&self, f: Freq) -> f64 {
        self.coefficients[self.spec.index(f)]
    }

    /// Coefficients indexed `k * n + l`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (Freq, f64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (self.spec.freq(j), c))
    }

    /// Model value `Σ ĉ(k,l) φ(k,l)` at each point.
    pub fn evaluate(&self, points: &[[f64; 2]]) -> Vec<f64> {
        evaluate_model(self, points)
    }
}

/// Per-iteration record of a model generation run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelTrace {
    pub selected: Vec<Freq>,
    /// Coefficient increment applied in each iteration.
    pub increments: Vec<f64>,
    pub energy_reductions: Vec<f64>,
    /// Weighted residual energy before the first and after every iteration.
    pub energies: Vec<f64>,
}

/// Runs the greedy model generation on one area.
pub fn generate_model(
    set: &WeightedSampleSet,
    wcfg: &WeightingConfig,
    scfg: &StoppingConfig,
) -> Result<SparseSpectrum> {
    run(set, wcfg, scfg, None)
}

/// [`generate_model`], also recording the selection sequence and energies.
pub fn generate_model_traced(
    set: &WeightedSampleSet,
    wcfg: &WeightingConfig,
    scfg: &StoppingConfig,
) -> Result<(SparseSpectrum, ModelTrace)> {
    let mut trace = ModelTrace::default();
    let spectrum = run(set, wcfg, scfg, Some(&mut trace))?;
    Ok((spectrum, trace))
}

fn run(
    set: &WeightedSampleSet,
    wcfg: &WeightingConfig,
    scfg: &StoppingConfig,
    mut trace: Option<&mut ModelTrace>,
) -> Result<SparseSpectrum> {
    if set.is_empty() {
        return Err(Error::EmptyArea);
    }
    wcfg.validate()?;
    scfg.validate()?;

    let spec = set.spec();
    let (m, n) = (spec.m(), spec.n());
    let len = spec.len();
    let table = &set.basis;
    let samples = set.len();

    // proj[j] = Σ w·r·φ_j, denom[j] = Σ w·φ_j², accumulated row by row so
    // the inner loop runs over contiguous vertical frequencies.
    let mut proj = vec![0.0; len];
    let mut denom = vec![0.0; len];
    let mut cy_sq = vec![0.0; n];
    for i in 0..samples {
        let w = set.weights[i];
        let wf = w * set.values[i];
        let cx = table.cos_x(i);
        let cy = table.cos_y(i);
        for (s, c) in cy_sq.iter_mut().zip(cy) {
            *s = c * c;
        }
        for k in 0..m {
            let a = wf * cx[k];
            let b = w * cx[k] * cx[k];
            let row = k * n;
            for l in 0..n {
                proj[row + l] += a * cy[l];
                denom[row + l] += b * cy_sq[l];
            }
        }
    }

    let floor = set.degeneracy_floor();
    let selector = Selector::new(spec, wcfg);
    // score(j) = ΔE(j)·w_f(j) = proj[j]²·gain[j]; degenerate bases never win
    // because a zero best score ends the loop.
    let gain_factor: Vec<f64> = denom
        .iter()
        .zip(&selector.score_weight)
        .map(|(&d, &w)| if d > floor { w / d } else { 0.0 })
        .collect();
    let constant = set.values.iter().all(|&v| v == set.values[0]);
    let mut coefficients = vec![0.0; len];
    let mut sums: Option<CosineSums> = None;
    let mut iterations = 0;
    // The residual itself is only needed for tracing; otherwise it is
    // rebuilt from the final model.
    let mut residual = set.values.clone();

    if let Some(t) = trace.as_deref_mut() {
        t.energies.push(residual_energy(set, &residual));
    }

    while iterations < scfg.max_iterations {
        let Some((sel, score)) = selector.best(&proj, &gain_factor) else {
            break;
        };
        let gain = proj[sel] * proj[sel] / denom[sel];
        if !(score > 0.0) || gain < scfg.min_energy_reduction {
            break;
        }
        let f = spec.freq(sel);
        // Constant data is matched by DC exactly; the quotient of the two
        // weighted sums can be off by an ulp.
        let exact = constant && iterations == 0 && f == Freq::DC;
        let c_hat = if exact {
            set.values[0]
        } else {
            proj[sel] / denom[sel]
        };
        coefficients[sel] += c_hat;
        iterations += 1;

        if let Some(t) = trace.as_deref_mut() {
            for (i, r) in residual.iter_mut().enumerate() {
                *r -= c_hat * table.at(i, f);
            }
            t.selected.push(f);
            t.increments.push(c_hat);
            t.energy_reductions.push(gain);
            t.energies.push(residual_energy(set, &residual));
        }
        if exact {
            // Nothing left to fit; the projections would only hold rounding
            // noise.
            break;
        }
        sums.get_or_insert_with(|| CosineSums::new(set))
            .subtract_gram_column(f, c_hat, &mut proj);
    }

    if trace.is_none() {
        let terms: Vec<(Freq, f64)> = coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (spec.freq(j), c))
            .collect();
        for (i, r) in residual.iter_mut().enumerate() {
            let g: f64 = terms.iter().map(|&(f, c)| c * table.at(i, f)).sum();
            *r -= g;
        }
    }

    Ok(SparseSpectrum {
        spec,
        coefficients,
        iterations_used: iterations,
        final_energy: residual_energy(set, &residual),
    })
}

/// Continues `c[a] = cos(aθ)` past the first `known` entries with
/// `cos(aθ) = 2 cos θ · cos((a−1)θ) − cos((a−2)θ)`.
fn extend_chebyshev(c: &mut [f64], known: usize) {
    for a in known.max(2)..c.len() {
        c[a] = 2.0 * c[1] * c[a - 1] - c[a - 2];
    }
}

/// `H[a][b] = Σ w·cos(πa(2x+1)/2M)·cos(πb(2y+1)/2N)` for `a < 2M−1`,
/// `b < 2N−1`.
struct CosineSums {
    spec: BasisSpec,
    cols: usize,
    h: Vec<f64>,
}

impl CosineSums {
    fn new(set: &WeightedSampleSet) -> Self {
        let spec = set.spec();
        let (m, n) = (spec.m(), spec.n());
        let (rows, cols) = (2 * m - 1, 2 * n - 1);
        let mut h = vec![0.0; rows * cols];
        let mut cx = vec![0.0; rows];
        let mut cy = vec![0.0; cols];
        for (i, &w) in set.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            cx[..m].copy_from_slice(set.basis.cos_x(i));
            cy[..n].copy_from_slice(set.basis.cos_y(i));
            extend_chebyshev(&mut cx, m);
            extend_chebyshev(&mut cy, n);
            for (a, &ca) in cx.iter().enumerate() {
                let t = w * ca;
                let row = &mut h[a * cols..(a + 1) * cols];
                for (acc, &cb) in row.iter_mut().zip(&cy) {
                    *acc += t * cb;
                }
            }
        }
        Self { spec, cols, h }
    }

    /// `proj[j] -= c · Σ w·φ_f·φ_j` for every dictionary entry `j`.
    fn subtract_gram_column(&self, f: Freq, c: f64, proj: &mut [f64]) {
        let (m, n) = (self.spec.m(), self.spec.n());
        let c = 0.25 * c;
        let v = f.l;
        for k in 0..m {
            let (kp, km) = (k + f.k, k.abs_diff(f.k));
            let hp = &self.h[kp * self.cols..(kp + 1) * self.cols];
            let hm = &self.h[km * self.cols..(km + 1) * self.cols];
            let (below, above) = proj[k * n..(k + 1) * n].split_at_mut(v);
            // l < v: the difference index runs v − l downwards.
            for (i, p) in below.iter_mut().enumerate() {
                let (lp, lm) = (i + v, v - i);
                *p -= c * (hp[lp] + hp[lm] + hm[lp] + hm[lm]);
            }
            // l ≥ v: both indices run upwards, from 2v and from 0.
            let len = above.len();
            let parts = hp[2 * v..2 * v + len]
                .iter()
                .zip(&hp[..len])
                .zip(hm[2 * v..2 * v + len].iter().zip(&hm[..len]));
            for (p, ((a, b), (d, e))) in above.iter_mut().zip(parts) {
                *p -= c * (a + b + d + e);
            }
        }
    }
}

/// Model values `Σ ĉ(k,l) φ(k,l)(x, y)`; zero coefficients are skipped.
pub fn evaluate_model(spectrum: &SparseSpectrum, points: &[[f64; 2]]) -> Vec<f64> {
    let spec = spectrum.spec;
    let (m, n) = (spec.m(), spec.n());
    let terms: Vec<(Freq, f64)> = spectrum.nonzero().collect();
    let mut cx = vec![0.0; m];
    let mut cy = vec![0.0; n];
    points
        .iter()
        .map(|&[x, y]| {
            for (k, c) in cx.iter_mut().enumerate() {
                *c = dct_cos(k, x, m);
            }
            for (l, c) in cy.iter_mut().enumerate() {
                *c = dct_cos(l, y, n);
            }
            terms.iter().map(|&(f, c)| c * (cx[f.k] * cy[f.l])).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(m: usize, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .flat_map(|y| (0..m).map(move |x| [x as f64, y as f64]))
            .collect()
    }

    fn spec24() -> BasisSpec {
        BasisSpec::new(24, 24).unwrap()
    }

    #[test]
    fn spatial_window_values() {
        assert_eq!(spatial_weight(11.5, 11.5, 24, 24, 0.8), 1.0);
        // 0.8^sqrt(2·11.5²), 50-digit reference.
        let corner = spatial_weight(0.0, 0.0, 24, 24, 0.8);
        assert!((corner - 0.026_540_449_296_665_09).abs() < 1e-15, "{corner}");
        assert!((spatial_weight(12.5, 11.5, 24, 24, 0.8) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn key_point_window_values() {
        assert_eq!(spatial_weight_fsmr(11.5, 11.5, 24, 24, 0.8, 0.5, true), 0.5);
        assert_eq!(
            spatial_weight_fsmr(3.3, 7.1, 24, 24, 0.8, 0.5, false),
            spatial_weight(3.3, 7.1, 24, 24, 0.8)
        );
        let corner = spatial_weight_fsmr(0.0, 0.0, 24, 24, 0.8, 0.5, true);
        assert!((corner - 0.013_270_224_648_332_546).abs() < 1e-15);
    }

    #[test]
    fn spectral_window_values() {
        assert_eq!(spectral_weight(0, 0, 0.3), 1.0);
        assert!((spectral_weight(3, 4, 0.9) - 0.59049).abs() < 1e-15);
        assert_eq!(spectral_weight(1, 0, 0.9), 0.9);
    }

    #[test]
    fn config_validation() {
        let bad = [
            WeightingConfig { rho: 1.0, ..Default::default() },
            WeightingConfig { sigma: 0.0, ..Default::default() },
            WeightingConfig { alpha: 1.5, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
        assert!(StoppingConfig { max_iterations: 0, min_energy_reduction: 0.0 }
            .validate()
            .is_err());
    }

    #[test]
    fn coefficient_of_constant_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<[f64; 2]> = (0..40).map(|_| [rng.gen_range(0.0..24.0), rng.gen_range(0.0..24.0)]).collect();
        let set = WeightedSampleSet::with_spatial_weights(pts, vec![0.0; 40], spec24(), 0.8).unwrap();
        let c = estimate_coefficient(&set, &vec![42.0; 40], Freq::DC).unwrap();
        assert!((c - 42.0).abs() < 1e-12);
        for f in [Freq::new(0, 0), Freq::new(3, 9), Freq::new(23, 1)] {
            assert_eq!(estimate_coefficient(&set, &vec![0.0; 40], f).unwrap(), 0.0);
        }
    }

    #[test]
    fn coefficient_matches_normal_equations() {
        // Single-column least squares: minimize ||r − c·φ||², solved via the
        // 1×1 normal equation (φᵀφ) c = φᵀ r on the dense column.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 2]> = (0..50).map(|_| [rng.gen_range(0.0..24.0), rng.gen_range(0.0..24.0)]).collect();
        let f = Freq::new(2, 3);
        let residual: Vec<f64> = pts
            .iter()
            .map(|&[x, y]| crate::basis::eval_basis(2, 3, x, y, 24, 24).unwrap())
            .collect();
        let set = WeightedSampleSet::new(pts.clone(), residual.clone(), vec![1.0; 50], spec24()).unwrap();
        let c = estimate_coefficient(&set, &residual, f).unwrap();

        let col: Vec<f64> = pts
            .iter()
            .map(|&[x, y]| {
                (std::f64::consts::PI * 2.0 * (2.0 * x + 1.0) / 48.0).cos()
                    * (std::f64::consts::PI * 3.0 * (2.0 * y + 1.0) / 48.0).cos()
            })
            .collect();
        let ata: f64 = col.iter().map(|v| v * v).sum();
        let atb: f64 = col.iter().zip(&residual).map(|(a, b)| a * b).sum();
        assert!((c - atb / ata).abs() < 1e-9);
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vanishing_denominator() {
        // φ(1,0) vanishes at x = 11.5 on a 24-wide area; with a tiny weight
        // the denominator underflows the absolute floor.
        let set = WeightedSampleSet::new(vec![[11.5, 3.0]], vec![1.0], vec![1e-280], spec24()).unwrap();
        assert!(matches!(
            estimate_coefficient(&set, &[1.0], Freq::new(1, 0)),
            Err(Error::CoefficientUndefined { k: 1, l: 0 })
        ));
        assert!(matches!(
            estimate_coefficient(&set, &[0.0], Freq::new(24, 0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn nodal_bases_are_skipped() {
        // A single sample on the nodal line of φ(1,0): the engine must fit the
        // DC and never pick the degenerate basis.
        let set = WeightedSampleSet::new(vec![[11.5, 3.0]], vec![10.0], vec![1.0], spec24()).unwrap();
        let wcfg = WeightingConfig { spectral_enabled: false, ..Default::default() };
        let (s, t) = generate_model_traced(&set, &wcfg, &StoppingConfig::default()).unwrap();
        assert!(!t.selected.contains(&Freq::new(1, 0)));
        assert!(s.coefficients().iter().all(|c| c.is_finite()));
        assert!(s.final_energy < 1e-20);
    }

    #[test]
    fn energy_reduction_values() {
        let pts = vec![[1.0, 2.0], [5.5, 7.25], [20.0, 3.0]];
        let w = vec![0.5, 1.5, 2.0];
        let set = WeightedSampleSet::new(pts, vec![0.0; 3], w, spec24()).unwrap();
        assert_eq!(energy_reduction(&set, 0.0, Freq::new(4, 4)), 0.0);
        assert!((energy_reduction(&set, 3.0, Freq::DC) - 9.0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_reduction_matches_recomputed_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 2]> = (0..80).map(|_| [rng.gen_range(0.0..24.0), rng.gen_range(0.0..24.0)]).collect();
        let vals: Vec<f64> = (0..80).map(|_| rng.gen_range(0.0..255.0)).collect();
        let set = WeightedSampleSet::with_spatial_weights(pts, vals.clone(), spec24(), 0.8).unwrap();
        for f in [Freq::new(0, 0), Freq::new(1, 2), Freq::new(7, 3), Freq::new(15, 20)] {
            let c = estimate_coefficient(&set, &vals, f).unwrap();
            let before = residual_energy(&set, &vals);
            let after_res: Vec<f64> = vals
                .iter()
                .enumerate()
                .map(|(i, v)| v - c * set.basis().at(i, f))
                .collect();
            let after = residual_energy(&set, &after_res);
            let de = energy_reduction(&set, c, f);
            assert!(((before - after) - de).abs() <= 1e-6 * de.max(1e-300), "{f:?}");
        }
    }

    #[test]
    fn selection_rules() {
        let spec = spec24();
        let mut de = vec![0.0; spec.len()];
        let on = WeightingConfig::default();
        let off = WeightingConfig { spectral_enabled: false, ..on };

        de[spec.index(Freq::new(5, 5))] = 3.0;
        de[spec.index(Freq::DC)] = 3.0;
        assert_eq!(select_basis(&de, spec, &on).unwrap(), Freq::DC);
        // Equal scores without spectral weighting: lowest radius wins.
        assert_eq!(select_basis(&de, spec, &off).unwrap(), Freq::DC);

        de[spec.index(Freq::new(5, 5))] = 10.0;
        de[spec.index(Freq::DC)] = 1.0;
        assert_eq!(select_basis(&de, spec, &off).unwrap(), Freq::new(5, 5));

        // 10·0.9^(5√2) = 4.747… < 6.1
        de[spec.index(Freq::DC)] = 6.1;
        assert_eq!(select_basis(&de, spec, &on).unwrap(), Freq::DC);
        de[spec.index(Freq::DC)] = 4.7;
        assert_eq!(select_basis(&de, spec, &on).unwrap(), Freq::new(5, 5));

        // Same radius: smaller k wins.
        let mut de = vec![0.0; spec.len()];
        de[spec.index(Freq::new(0, 3))] = 2.0;
        de[spec.index(Freq::new(3, 0))] = 2.0;
        assert_eq!(select_basis(&de, spec, &on).unwrap(), Freq::new(0, 3));

        let nan = vec![f64::NAN; spec.len()];
        assert!(matches!(select_basis(&nan, spec, &on), Err(Error::NoSelectableBasis)));
    }

    #[test]
    fn constant_signal_is_dc_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 2]> = (0..300).map(|_| [rng.gen_range(0.0..24.0), rng.gen_range(0.0..24.0)]).collect();
        let set = WeightedSampleSet::with_spatial_weights(pts.clone(), vec![128.0; 300], spec24(), 0.8).unwrap();
        let scfg = StoppingConfig { max_iterations: 1000, min_energy_reduction: 1e-9 };
        let s = generate_model(&set, &WeightingConfig::default(), &scfg).unwrap();
        assert_eq!(s.coefficient(Freq::DC), 128.0);
        assert_eq!(s.nonzero().count(), 1);
        // The DC update is the only one applied; the second selection finds
        // ΔE = 0 and terminates.
        assert_eq!(s.iterations_used, 1);
        assert_eq!(s.final_energy, 0.0);
        let out = s.evaluate(&grid(24, 24));
        assert!(out.iter().all(|&v| v == 128.0));

        let set = WeightedSampleSet::with_spatial_weights(pts, vec![77.3; 300], spec24(), 0.8).unwrap();
        let s = generate_model(&set, &WeightingConfig::default(), &StoppingConfig::default()).unwrap();
        assert_eq!(s.iterations_used, 1);
        assert!(s.evaluate(&grid(24, 24)).iter().all(|&v| v == 77.3));
    }

    #[test]
    fn tabulated_gram_matches_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.gen_range(-0.5..12.5), rng.gen_range(-0.5..9.5)]).collect();
        let spec = BasisSpec::new(13, 10).unwrap();
        let set = WeightedSampleSet::with_spatial_weights(pts, vec![0.0; 200], spec, 0.8).unwrap();
        let sums = CosineSums::new(&set);
        for f in [Freq::DC, Freq::new(3, 7), Freq::new(12, 9), Freq::new(5, 0)] {
            let mut col = vec![0.0; spec.len()];
            sums.subtract_gram_column(f, -1.0, &mut col);
            for (j, g) in col.iter().enumerate() {
                let h = spec.freq(j);
                let direct: f64 = (0..set.len())
                    .map(|i| set.weights()[i] * set.basis().at(i, f) * set.basis().at(i, h))
                    .sum();
                assert!((g - direct).abs() < 1e-12, "{f:?} {h:?}");
            }
        }
    }

    #[test]
    fn zero_signal() {
        let set = WeightedSampleSet::with_spatial_weights(grid(24, 24), vec![0.0; 576], spec24(), 0.8).unwrap();
        let s = generate_model(&set, &WeightingConfig::default(), &StoppingConfig::default()).unwrap();
        assert_eq!(s.nonzero().count(), 0);
        assert_eq!(s.final_energy, 0.0);
    }

    fn synth(coeffs: &[(Freq, f64)], pts: &[[f64; 2]]) -> Vec<f64> {
        pts.iter()
            .map(|&[x, y]| {
                coeffs
                    .iter()
                    .map(|&(f, c)| c * crate::basis::eval_basis(f.k, f.l, x, y, 24, 24).unwrap())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn exact_recovery_and_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts = grid(24, 24);
        let coeffs = [
            (Freq::new(2, 5), 40.0),
            (Freq::new(0, 0), 100.0),
            (Freq::new(11, 3), -17.5),
        ];
        let set = WeightedSampleSet::new(pts.clone(), synth(&coeffs, &pts), vec![1.0; 576], spec24()).unwrap();
        let wcfg = WeightingConfig { spectral_enabled: false, ..Default::default() };
        let scfg = StoppingConfig { max_iterations: 10, min_energy_reduction: 0.0 };
        let s = generate_model(&set, &wcfg, &scfg).unwrap();
        for f in spec24().freqs() {
            let expected = coeffs.iter().find(|c| c.0 == f).map_or(0.0, |c| c.1);
            assert!((s.coefficient(f) - expected).abs() < 1e-6, "{f:?}");
        }
        let probe: Vec<[f64; 2]> = (0..10).map(|_| [rng.gen_range(0.0..23.0), rng.gen_range(0.0..23.0)]).collect();
        for (a, b) in s.evaluate(&probe).iter().zip(synth(&coeffs, &probe)) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn evaluate_trivial_spectra() {
        let spec = spec24();
        let pts = [[0.5, 3.0], [17.2, 22.9]];
        assert_eq!(SparseSpectrum::zeros(spec).evaluate(&pts), vec![0.0, 0.0]);
        let mut c = vec![0.0; spec.len()];
        c[0] = 128.0;
        let s = SparseSpectrum::from_coefficients(spec, c).unwrap();
        assert_eq!(s.evaluate(&pts), vec![128.0, 128.0]);
    }

    #[test]
    fn spectral_weighting_does_not_change_increments() {
        // Same first selection with and without spectral weighting gives the
        // same coefficient value.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.gen_range(0.0..24.0), rng.gen_range(0.0..24.0)]).collect();
        let vals: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..255.0)).collect();
        let set = WeightedSampleSet::with_spatial_weights(pts, vals, spec24(), 0.8).unwrap();
        let scfg = StoppingConfig { max_iterations: 1, min_energy_reduction: 0.0 };
        let on = WeightingConfig::default();
        let off = WeightingConfig { spectral_enabled: false, ..on };
        let (a, ta) = generate_model_traced(&set, &on, &scfg).unwrap();
        let (_, tb) = generate_model_traced(&set, &off, &scfg).unwrap();
        // DC dominates for positive-valued data either way.
        assert_eq!(ta.selected, tb.selected);
        assert_eq!(ta.increments, tb.increments);
        let f = ta.selected[0];
        let direct = estimate_coefficient(&set, set.values(), f).unwrap();
        assert!((a.coefficient(f) - direct).abs() < 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(
            WeightedSampleSet::new(vec![], vec![], vec![], spec24()),
            Err(Error::EmptyArea)
        ));
        assert!(WeightedSampleSet::new(vec![[0.0, 0.0]], vec![1.0], vec![0.0], spec24()).is_err());
    }
}
