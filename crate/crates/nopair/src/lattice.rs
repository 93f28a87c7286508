//! Periodic discretization: box geometry, spinor and scalar fields, the
//! unitary position/momentum transforms and the lattice Coulomb kernel.
//!
//! Conventions used throughout the crate:
//!
//! * Position nodes are `x = (L/n) j`, `j in {0,..,n-1}^3`; sums over
//!   position carry the volume element `h^3 = (L/n)^3` so they approximate
//!   integrals.
//! * Momenta are `k = (2 pi / L) m`, `m in {-n/2,..,n/2-1}^3`, stored in
//!   FFT frequency order (`0,..,n/2-1,-n/2,..,-1` per axis).
//! * Spinor transforms are unitary: `|psi|^2 = h^3 sum_x |psi(x)|^2
//!   = sum_k |psi_hat(k)|^2`.
//! * Scalar densities use the integral-like normalization
//!   `rho_hat(k) = h^3 sum_x e^{-ikx} rho(x)`, matching the continuum
//!   Fourier integral, so the Coulomb kernel reads
//!   `v_hat(k) = 4 pi / (L^3 |k|^2)` with `v_hat(0) = 0`.
//!
//! The zero Fourier mode of the Coulomb kernel is dropped (uniform
//! neutralizing background), so the direct energy of a constant density
//! vanishes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::NopairError;
use crate::Result;

/// Complex scalar used everywhere.
pub type C64 = Complex64;

/// Which representation a field's samples currently live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rep {
    Position,
    Momentum,
}

/// Precomputed per-box data shared by all fields on the same box.
struct BoxTable {
    /// Momentum vector per linear site index, FFT frequency order.
    momenta: Vec<[f64; 3]>,
    /// |k|^2 per linear site index.
    k_squared: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

/// Periodic simulation cell: speed of light `c`, edge length `L`, `n` grid
/// points per axis, and the derived momentum lattice.
#[derive(Clone)]
pub struct BoxSpec {
    c: f64,
    length: f64,
    n: usize,
    table: Arc<BoxTable>,
}

impl fmt::Debug for BoxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoxSpec")
            .field("c", &self.c)
            .field("L", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for BoxSpec {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.length == other.length && self.n == other.n
    }
}

impl Serialize for BoxSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            c: f64,
            #[serde(rename = "L")]
            length: f64,
            n: usize,
        }
        Raw { c: self.c, length: self.length, n: self.n }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoxSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            c: f64,
            #[serde(rename = "L")]
            length: f64,
            n: usize,
        }
        let raw = Raw::deserialize(d)?;
        build_box(raw.c, raw.length, raw.n).map_err(serde::de::Error::custom)
    }
}

/// Validate `(c, L, n)` and materialize the momentum lattice.
pub fn build_box(c: f64, length: f64, n: usize) -> Result<BoxSpec> {
    if !(c > 0.0) {
        return Err(NopairError::NonPositive { name: "c", value: c });
    }
    if !(length > 0.0) {
        return Err(NopairError::NonPositive { name: "L", value: length });
    }
    if n % 2 != 0 {
        return Err(NopairError::OddGrid(n));
    }
    if n < 4 {
        return Err(NopairError::GridTooSmall(n));
    }

    let n3 = n * n * n;
    let unit = 2.0 * PI / length;
    let mut momenta = Vec::with_capacity(n3);
    let mut k_squared = Vec::with_capacity(n3);
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let m = [freq_of(ix, n), freq_of(iy, n), freq_of(iz, n)];
                let k = [unit * m[0] as f64, unit * m[1] as f64, unit * m[2] as f64];
                momenta.push(k);
                k_squared.push(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            }
        }
    }

    let mut planner = FftPlanner::new();
    let fft_forward = planner.plan_fft_forward(n);
    let fft_inverse = planner.plan_fft_inverse(n);

    Ok(BoxSpec {
        c,
        length,
        n,
        table: Arc::new(BoxTable { momenta, k_squared, fft_forward, fft_inverse }),
    })
}

/// Signed FFT frequency for axis index `j`: `j` for `j < n/2`, else `j - n`.
fn freq_of(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl BoxSpec {
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Box edge length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Grid points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total lattice sites `n^3`.
    pub fn sites(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Grid spacing `h = L/n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume element `h^3`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Box volume `L^3`.
    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Momentum vector at linear site index (FFT frequency order).
    pub fn momentum(&self, idx: usize) -> [f64; 3] {
        self.table.momenta[idx]
    }

    /// All momenta, indexed by linear site index.
    pub fn momenta(&self) -> &[[f64; 3]] {
        &self.table.momenta
    }

    /// `|k|^2` at linear site index.
    pub fn k_squared(&self, idx: usize) -> f64 {
        self.table.k_squared[idx]
    }

    /// Position node at linear site index.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.site_coords(idx);
        let h = self.spacing();
        [h * ix as f64, h * iy as f64, h * iz as f64]
    }

    /// Linear site index of axis indices.
    pub fn site(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Axis indices of a linear site index.
    pub fn site_coords(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Signed frequency triple `m` of a linear site index.
    pub fn frequency(&self, idx: usize) -> [i64; 3] {
        let [ix, iy, iz] = self.site_coords(idx);
        [freq_of(ix, self.n), freq_of(iy, self.n), freq_of(iz, self.n)]
    }

    /// Linear site index of a signed frequency triple (wrapped into range).
    pub fn index_of_frequency(&self, m: [i64; 3]) -> usize {
        let n = self.n as i64;
        let wrap = |v: i64| -> usize { (((v % n) + n) % n) as usize };
        self.site(wrap(m[0]), wrap(m[1]), wrap(m[2]))
    }

    /// Wrap a signed frequency triple into the first Brillouin zone
    /// `{-n/2,..,n/2-1}` per axis (modular arithmetic on the lattice).
    pub fn wrap_frequency(&self, m: [i64; 3]) -> [i64; 3] {
        let n = self.n as i64;
        let wrap = |v: i64| -> i64 {
            let r = ((v % n) + n) % n;
            if r < n / 2 {
                r
            } else {
                r - n
            }
        };
        [wrap(m[0]), wrap(m[1]), wrap(m[2])]
    }

    /// Momentum vector of a signed frequency triple after wrapping.
    pub fn momentum_of_frequency(&self, m: [i64; 3]) -> [f64; 3] {
        let w = self.wrap_frequency(m);
        let unit = 2.0 * PI / self.length;
        [unit * w[0] as f64, unit * w[1] as f64, unit * w[2] as f64]
    }

    /// Minimum-image displacement between two positions.
    pub fn min_image(&self, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let l = self.length;
        let mut d = [0.0; 3];
        for i in 0..3 {
            let mut v = (a[i] - b[i]) % l;
            if v < -l / 2.0 {
                v += l;
            }
            if v >= l / 2.0 {
                v -= l;
            }
            d[i] = v;
        }
        d
    }

    /// Minimum-image distance between two positions.
    pub fn min_image_distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        let d = self.min_image(a, b);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// In-place unnormalized 3D FFT over one `n^3` component block.
    fn fft3(&self, values: &mut [C64], direction: Rep) {
        debug_assert_eq!(values.len(), self.sites());
        let n = self.n;
        let fft = match direction {
            // Position -> momentum uses the forward kernel e^{-i k x}.
            Rep::Momentum => &self.table.fft_forward,
            Rep::Position => &self.table.fft_inverse,
        };
        let mut line = vec![C64::new(0.0, 0.0); n];
        // z axis: contiguous runs.
        for start in (0..n * n * n).step_by(n) {
            fft.process(&mut values[start..start + n]);
        }
        // y axis: stride n.
        for ix in 0..n {
            for iz in 0..n {
                for iy in 0..n {
                    line[iy] = values[self.site(ix, iy, iz)];
                }
                fft.process(&mut line);
                for iy in 0..n {
                    values[self.site(ix, iy, iz)] = line[iy];
                }
            }
        }
        // x axis: stride n^2.
        for iy in 0..n {
            for iz in 0..n {
                for ix in 0..n {
                    line[ix] = values[self.site(ix, iy, iz)];
                }
                fft.process(&mut line);
                for ix in 0..n {
                    values[self.site(ix, iy, iz)] = line[ix];
                }
            }
        }
    }
}

/// Four-component complex field sampled on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    box_spec: BoxSpec,
    rep: Rep,
    /// Component-major layout: component `s` occupies `s*n^3 .. (s+1)*n^3`.
    values: Vec<C64>,
}

impl SpinorField {
    pub fn zero(box_spec: &BoxSpec, rep: Rep) -> Self {
        let len = 4 * box_spec.sites();
        SpinorField { box_spec: box_spec.clone(), rep, values: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_values(box_spec: &BoxSpec, rep: Rep, values: Vec<C64>) -> Result<Self> {
        if values.len() != 4 * box_spec.sites() {
            return Err(NopairError::DimensionMismatch {
                expected: 4 * box_spec.sites(),
                got: values.len(),
            });
        }
        Ok(SpinorField { box_spec: box_spec.clone(), rep, values })
    }

    /// Normalized plane wave `L^{-3/2} e^{i k x} u` for a frequency triple
    /// `m` and a fixed 4-spinor polarization `u`.
    pub fn plane_wave(box_spec: &BoxSpec, m: [i64; 3], polarization: [C64; 4]) -> Self {
        let mut field = SpinorField::zero(box_spec, Rep::Position);
        let n = box_spec.n();
        let n3 = box_spec.sites();
        let norm = box_spec.volume().powf(-0.5);
        for idx in 0..n3 {
            let [jx, jy, jz] = box_spec.site_coords(idx);
            let phase = 2.0 * PI
                * ((m[0] * jx as i64 + m[1] * jy as i64 + m[2] * jz as i64) as f64)
                / n as f64;
            let w = C64::from_polar(norm, phase);
            for s in 0..4 {
                field.values[s * n3 + idx] = w * polarization[s];
            }
        }
        field
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.box_spec
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// One spinor component as a slice over sites.
    pub fn component(&self, s: usize) -> &[C64] {
        let n3 = self.box_spec.sites();
        &self.values[s * n3..(s + 1) * n3]
    }

    /// Amplitude `(site, component)`.
    pub fn at(&self, idx: usize, s: usize) -> C64 {
        self.values[s * self.box_spec.sites() + idx]
    }

    pub fn set(&mut self, idx: usize, s: usize, value: C64) {
        let n3 = self.box_spec.sites();
        self.values[s * n3 + idx] = value;
    }

    /// Unitary change of representation; an involution up to roundoff.
    pub fn transform(&self) -> Self {
        let mut out = self.clone();
        out.transform_in_place();
        out
    }

    pub fn transform_in_place(&mut self) {
        let n3 = self.box_spec.sites();
        let (target, scale) = match self.rep {
            Rep::Position => (Rep::Momentum, self.box_spec.volume().sqrt() / n3 as f64),
            Rep::Momentum => (Rep::Position, 1.0 / self.box_spec.volume().sqrt()),
        };
        for s in 0..4 {
            let block = &mut self.values[s * n3..(s + 1) * n3];
            self.box_spec.fft3(block, target);
            for v in block.iter_mut() {
                *v *= scale;
            }
        }
        self.rep = target;
    }

    /// Return this field in the requested representation.
    pub fn in_rep(&self, rep: Rep) -> Self {
        if self.rep == rep {
            self.clone()
        } else {
            self.transform()
        }
    }

    /// Check that two fields are comparable.
    fn compatible(&self, other: &Self) -> Result<()> {
        if self.box_spec != other.box_spec {
            return Err(NopairError::BoxMismatch("spinor fields on different boxes"));
        }
        if self.rep != other.rep {
            return Err(NopairError::BoxMismatch("spinor fields in different representations"));
        }
        Ok(())
    }

    /// Sesquilinear inner product (antilinear in `self`).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.compatible(other)?;
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a.conj() * b;
        }
        let weight = match self.rep {
            Rep::Position => self.box_spec.cell_volume(),
            Rep::Momentum => 1.0,
        };
        Ok(acc * weight)
    }

    pub fn norm_squared(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.values {
            acc += v.norm_sqr();
        }
        match self.rep {
            Rep::Position => acc * self.box_spec.cell_volume(),
            Rep::Momentum => acc,
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&mut self, factor: C64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other`; representations must match.
    pub fn axpy(&mut self, factor: C64, other: &Self) -> Result<()> {
        self.compatible(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Multiply every spinor component pointwise by a real position-space
    /// scalar (a local potential).
    pub fn multiply_scalar(&mut self, scalar: &LatticeScalar) -> Result<()> {
        if self.rep != Rep::Position || scalar.rep != Rep::Position {
            return Err(NopairError::BoxMismatch("potential multiply needs position rep"));
        }
        if self.box_spec != scalar.box_spec {
            return Err(NopairError::BoxMismatch("potential on a different box"));
        }
        let n3 = self.box_spec.sites();
        for s in 0..4 {
            for (v, w) in self.values[s * n3..(s + 1) * n3].iter_mut().zip(&scalar.values) {
                *v *= w;
            }
        }
        Ok(())
    }

    /// Multiply each momentum amplitude by a scalar symbol `S(k)`.
    pub fn apply_scalar_symbol(&mut self, symbol: &[f64]) -> Result<()> {
        if self.rep != Rep::Momentum {
            return Err(NopairError::BoxMismatch("scalar symbol needs momentum rep"));
        }
        let n3 = self.box_spec.sites();
        if symbol.len() != n3 {
            return Err(NopairError::DimensionMismatch { expected: n3, got: symbol.len() });
        }
        for s in 0..4 {
            for (v, w) in self.values[s * n3..(s + 1) * n3].iter_mut().zip(symbol) {
                *v *= w;
            }
        }
        Ok(())
    }

    /// Spin contraction `t(x) = sum_s conj(a(x,s)) b(x,s)` as a position
    /// scalar. Used for overlap densities.
    pub fn spin_contract(&self, other: &Self) -> Result<LatticeScalar> {
        self.compatible(other)?;
        if self.rep != Rep::Position {
            return Err(NopairError::BoxMismatch("spin contraction needs position rep"));
        }
        let n3 = self.box_spec.sites();
        let mut values = vec![C64::new(0.0, 0.0); n3];
        for s in 0..4 {
            let a = &self.values[s * n3..(s + 1) * n3];
            let b = &other.values[s * n3..(s + 1) * n3];
            for i in 0..n3 {
                values[i] += a[i].conj() * b[i];
            }
        }
        Ok(LatticeScalar { box_spec: self.box_spec.clone(), rep: Rep::Position, values })
    }
}

/// One complex value per lattice point, in either representation.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeScalar {
    box_spec: BoxSpec,
    rep: Rep,
    values: Vec<C64>,
}

impl LatticeScalar {
    pub fn zero(box_spec: &BoxSpec, rep: Rep) -> Self {
        LatticeScalar {
            box_spec: box_spec.clone(),
            rep,
            values: vec![C64::new(0.0, 0.0); box_spec.sites()],
        }
    }

    pub fn from_values(box_spec: &BoxSpec, rep: Rep, values: Vec<C64>) -> Result<Self> {
        if values.len() != box_spec.sites() {
            return Err(NopairError::DimensionMismatch {
                expected: box_spec.sites(),
                got: values.len(),
            });
        }
        Ok(LatticeScalar { box_spec: box_spec.clone(), rep, values })
    }

    pub fn from_real(box_spec: &BoxSpec, rep: Rep, values: &[f64]) -> Result<Self> {
        let complex: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::from_values(box_spec, rep, complex)
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.box_spec
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Real parts; callers use this for fields that are real by
    /// construction (densities, potentials).
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest imaginary magnitude relative to the field norm; densities
    /// and potentials keep this below 1e-12.
    pub fn imaginary_defect(&self) -> f64 {
        let norm: f64 = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / norm
    }

    /// Scalar transform with the integral-like normalization:
    /// forward `rho_hat = h^3 DFT(rho)`, inverse `rho = IDFT(rho_hat)/L^3`.
    pub fn transform(&self) -> Self {
        let mut out = self.clone();
        out.transform_in_place();
        out
    }

    pub fn transform_in_place(&mut self) {
        let (target, scale) = match self.rep {
            Rep::Position => (Rep::Momentum, self.box_spec.cell_volume()),
            Rep::Momentum => (Rep::Position, 1.0 / self.box_spec.volume()),
        };
        self.box_spec.fft3(&mut self.values, target);
        for v in &mut self.values {
            *v *= scale;
        }
        self.rep = target;
    }

    pub fn in_rep(&self, rep: Rep) -> Self {
        if self.rep == rep {
            self.clone()
        } else {
            self.transform()
        }
    }

    /// `sum_x h^3 f(x)` (position rep only).
    pub fn integral(&self) -> C64 {
        debug_assert_eq!(self.rep, Rep::Position);
        let mut acc = C64::new(0.0, 0.0);
        for v in &self.values {
            acc += v;
        }
        acc * self.box_spec.cell_volume()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if self.box_spec != other.box_spec || self.rep != other.rep {
            return Err(NopairError::BoxMismatch("scalar fields incompatible"));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }
}

/// Momentum-space Coulomb kernel `v_hat(k) = 4 pi / (L^3 |k|^2)`, with the
/// zero mode dropped (neutralizing background).
pub fn coulomb_fourier(box_spec: &BoxSpec) -> LatticeScalar {
    let n3 = box_spec.sites();
    let mut values = vec![C64::new(0.0, 0.0); n3];
    let prefactor = 4.0 * PI / box_spec.volume();
    for idx in 0..n3 {
        let k2 = box_spec.k_squared(idx);
        if k2 > 0.0 {
            values[idx] = C64::new(prefactor / k2, 0.0);
        }
    }
    LatticeScalar { box_spec: box_spec.clone(), rep: Rep::Momentum, values }
}

/// Pairing `sum_k v_hat(k) conj(rho_hat(k)) sigma_hat(k)`; equals the double
/// integral `int int rho(x) sigma(y) / |x-y|` on the periodic lattice.
/// Inputs are position-space scalars.
pub fn coulomb_pairing(rho: &LatticeScalar, sigma: &LatticeScalar) -> Result<f64> {
    if rho.box_spec != sigma.box_spec {
        return Err(NopairError::BoxMismatch("densities on different boxes"));
    }
    let v = coulomb_fourier(&rho.box_spec);
    let rho_hat = rho.in_rep(Rep::Momentum);
    let sigma_hat = sigma.in_rep(Rep::Momentum);
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..rho_hat.values.len() {
        acc += v.values[i].re * rho_hat.values[i].conj() * sigma_hat.values[i];
    }
    Ok(acc.re)
}

/// Convolution with the periodic Coulomb kernel: `phi = v * rho`, returned
/// in position space. The result is real for real input up to roundoff;
/// the imaginary part is discarded.
pub fn coulomb_convolve(rho: &LatticeScalar) -> LatticeScalar {
    let v = coulomb_fourier(&rho.box_spec);
    let mut rho_hat = rho.in_rep(Rep::Momentum);
    let volume = rho.box_spec.volume();
    for (a, b) in rho_hat.values.iter_mut().zip(&v.values) {
        // phi_hat = L^3 v_hat rho_hat in the scalar convention.
        *a *= b.re * volume;
    }
    rho_hat.transform_in_place();
    for a in rho_hat.values.iter_mut() {
        *a = C64::new(a.re, 0.0);
    }
    rho_hat
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(box_spec: &BoxSpec, seed: u64) -> SpinorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = SpinorField::zero(box_spec, Rep::Position);
        for v in field.values_mut() {
            *v = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        field
    }

    #[test]
    fn build_box_validates_inputs() {
        assert!(matches!(build_box(1.0, 10.0, 5), Err(NopairError::OddGrid(5))));
        assert!(matches!(build_box(1.0, 10.0, 2), Err(NopairError::GridTooSmall(2))));
        assert!(matches!(build_box(0.0, 10.0, 4), Err(NopairError::NonPositive { .. })));
        assert!(matches!(build_box(1.0, -1.0, 4), Err(NopairError::NonPositive { .. })));
    }

    #[test]
    fn momentum_lattice_has_all_points() {
        let b = build_box(1.0, 10.0, 4).unwrap();
        assert_eq!(b.momenta().len(), 64);
        let zero = b.momenta().iter().filter(|k| k[0] == 0.0 && k[1] == 0.0 && k[2] == 0.0);
        assert_eq!(zero.count(), 1);
    }

    #[test]
    fn momentum_lattice_max_component() {
        let b = build_box(137.036, 1.0, 8).unwrap();
        assert_eq!(b.momenta().len(), 512);
        let max = b
            .momenta()
            .iter()
            .flat_map(|k| k.iter().map(|v| v.abs()))
            .fold(0.0, f64::max);
        // Largest magnitude per axis is 2 pi * (n/2) / L; largest with a
        // positive partner is 2 pi * 3 / 1.
        assert_relative_eq!(max, 2.0 * PI * 4.0, max_relative = 1e-12);
        let max_positive = b
            .momenta()
            .iter()
            .flat_map(|k| k.iter().copied())
            .fold(0.0, f64::max);
        assert_relative_eq!(max_positive, 2.0 * PI * 3.0, max_relative = 1e-12);
    }

    #[test]
    fn constant_field_transforms_to_delta() {
        let b = build_box(1.0, 10.0, 4).unwrap();
        let f = SpinorField::plane_wave(&b, [0, 0, 0], [C64::new(1.0, 0.0); 4]);
        let fhat = f.transform();
        let zero_idx = b.site(0, 0, 0);
        for s in 0..4 {
            for idx in 0..b.sites() {
                let v = fhat.at(idx, s);
                if idx == zero_idx {
                    assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
                    assert!(v.im.abs() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn plane_wave_transforms_to_shifted_delta() {
        let b = build_box(1.0, 5.0, 6).unwrap();
        let m = [2, -1, 1];
        let e1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let f = SpinorField::plane_wave(&b, m, e1);
        let fhat = f.transform();
        let target = b.index_of_frequency(m);
        assert!((fhat.at(target, 0).re - 1.0).abs() < 1e-12);
        for idx in 0..b.sites() {
            if idx != target {
                assert!(fhat.at(idx, 0).norm() < 1e-12, "leak at {idx}");
            }
        }
    }

    #[test]
    fn transform_is_unitary_and_involutive() {
        let b = build_box(2.0, 7.0, 6).unwrap();
        let f = random_field(&b, 7);
        let fhat = f.transform();
        assert_relative_eq!(f.norm(), fhat.norm(), max_relative = 1e-12);
        let back = fhat.transform();
        let mut diff = back.clone();
        diff.axpy(C64::new(-1.0, 0.0), &f).unwrap();
        assert!(diff.norm() < 1e-12 * f.norm().max(1.0));
    }

    #[test]
    fn inner_product_is_sesquilinear() {
        let b = build_box(1.0, 3.0, 4).unwrap();
        let f = random_field(&b, 1);
        let g = random_field(&b, 2);
        let fg = f.inner(&g).unwrap();
        let gf = g.inner(&f).unwrap();
        assert_relative_eq!(fg.re, gf.re, max_relative = 1e-12);
        assert_relative_eq!(fg.im, -gf.im, max_relative = 1e-12);
        assert!(f.inner(&f).unwrap().re >= 0.0);
    }

    #[test]
    fn spinor_plane_waves_orthogonal_in_polarization() {
        let b = build_box(1.0, 3.0, 4).unwrap();
        let e1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let e2 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let f = SpinorField::plane_wave(&b, [1, 0, 0], e1);
        let g = SpinorField::plane_wave(&b, [1, 0, 0], e2);
        assert!(f.inner(&g).unwrap().norm() < 1e-13);
        assert_relative_eq!(f.inner(&f).unwrap().re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn inner_rejects_rep_mismatch() {
        let b = build_box(1.0, 3.0, 4).unwrap();
        let f = random_field(&b, 1);
        let g = f.transform();
        assert!(f.inner(&g).is_err());
    }

    #[test]
    fn coulomb_kernel_values() {
        let l = 10.0;
        let b = build_box(1.0, l, 8).unwrap();
        let v = coulomb_fourier(&b);
        let idx = b.index_of_frequency([1, 0, 0]);
        assert_relative_eq!(v.values()[idx].re, 1.0 / (PI * l), max_relative = 1e-12);
        assert_eq!(v.values()[b.site(0, 0, 0)].re, 0.0);
        for (i, val) in v.values().iter().enumerate() {
            assert!(val.re >= 0.0);
            let neg = b.index_of_frequency({
                let m = b.frequency(i);
                [-m[0], -m[1], -m[2]]
            });
            assert_relative_eq!(val.re, v.values()[neg].re, max_relative = 1e-12);
        }
    }

    #[test]
    fn scalar_parseval() {
        let b = build_box(1.0, 4.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<f64> = (0..b.sites()).map(|_| rng.gen::<f64>() - 0.5).collect();
        let rho = LatticeScalar::from_real(&b, Rep::Position, &vals).unwrap();
        let rho_hat = rho.transform();
        let pos: f64 = rho.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * b.cell_volume();
        let mom: f64 = rho_hat.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / b.volume();
        assert_relative_eq!(pos, mom, max_relative = 1e-12);
    }

    #[test]
    fn convolution_theorem_matches_direct_sum() {
        let b = build_box(1.0, 6.0, 8).unwrap();
        // Two smooth bumps.
        let center1 = [1.5, 3.0, 3.0];
        let center2 = [4.5, 3.0, 3.0];
        let width = 0.6;
        let mut rho = vec![0.0; b.sites()];
        let mut sigma = vec![0.0; b.sites()];
        for idx in 0..b.sites() {
            let x = b.position(idx);
            let d1 = b.min_image_distance(x, center1);
            let d2 = b.min_image_distance(x, center2);
            rho[idx] = (-d1 * d1 / (2.0 * width * width)).exp();
            sigma[idx] = (-d2 * d2 / (2.0 * width * width)).exp();
        }
        let rho = LatticeScalar::from_real(&b, Rep::Position, &rho).unwrap();
        let sigma = LatticeScalar::from_real(&b, Rep::Position, &sigma).unwrap();

        let spectral = coulomb_pairing(&rho, &sigma).unwrap();

        // Direct double sum against the position-space kernel.
        let v = coulomb_fourier(&b);
        let mut v_pos = v.clone();
        // v(z) = sum_k v_hat(k) e^{ikz}: plain unnormalized inverse DFT.
        v_pos.box_spec.fft3(&mut v_pos.values, Rep::Position);
        let h3 = b.cell_volume();
        let mut direct = 0.0;
        for xi in 0..b.sites() {
            let [ax, ay, az] = b.site_coords(xi);
            let rx = rho.values()[xi].re;
            if rx == 0.0 {
                continue;
            }
            for yi in 0..b.sites() {
                let [bx, by, bz] = b.site_coords(yi);
                let n = b.n();
                let diff = b.site((ax + n - bx) % n, (ay + n - by) % n, (az + n - bz) % n);
                direct += rx * v_pos.values[diff].re * sigma.values()[yi].re;
            }
        }
        direct *= h3 * h3;
        assert_relative_eq!(spectral, direct, max_relative = 1e-8);
    }

    #[test]
    fn coulomb_pairing_is_symmetric_and_positive() {
        let b = build_box(1.0, 5.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r: Vec<f64> = (0..b.sites()).map(|_| rng.gen::<f64>()).collect();
        let s: Vec<f64> = (0..b.sites()).map(|_| rng.gen::<f64>()).collect();
        let rho = LatticeScalar::from_real(&b, Rep::Position, &r).unwrap();
        let sigma = LatticeScalar::from_real(&b, Rep::Position, &s).unwrap();
        let rs = coulomb_pairing(&rho, &sigma).unwrap();
        let sr = coulomb_pairing(&sigma, &rho).unwrap();
        assert_relative_eq!(rs, sr, max_relative = 1e-10);
        assert!(coulomb_pairing(&rho, &rho).unwrap() >= 0.0);
    }

    #[test]
    fn constant_density_has_zero_coulomb_energy() {
        let b = build_box(1.0, 5.0, 4).unwrap();
        let rho = LatticeScalar::from_real(&b, Rep::Position, &vec![3.0; b.sites()]).unwrap();
        assert!(coulomb_pairing(&rho, &rho).unwrap().abs() < 1e-20);
    }

    #[test]
    fn screening_convolution_consistent_with_pairing() {
        let b = build_box(1.0, 5.0, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r: Vec<f64> = (0..b.sites()).map(|_| rng.gen::<f64>()).collect();
        let s: Vec<f64> = (0..b.sites()).map(|_| rng.gen::<f64>()).collect();
        let rho = LatticeScalar::from_real(&b, Rep::Position, &r).unwrap();
        let sigma = LatticeScalar::from_real(&b, Rep::Position, &s).unwrap();
        let phi = coulomb_convolve(&sigma);
        let lhs: f64 = rho
            .values()
            .iter()
            .zip(phi.values())
            .map(|(a, b)| a.re * b.re)
            .sum::<f64>()
            * b.cell_volume();
        let rhs = coulomb_pairing(&rho, &sigma).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }
}
