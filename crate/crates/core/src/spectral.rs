//! Lag-window and sequential spectral density operator estimates.
//!
//! The estimator on the first `m = ⌊ηT⌋` observations is
//! `F̂(η, ω) = (2π m)⁻¹ Σ_{|h|<m} w(bh) e^{−iωh} S_h`, with raw lag sums
//! `S_h = Σ_t X_{t+h} X_tᵀ`. [`LagSums`] grows the `S_h` one observation at a
//! time so a whole η grid costs a single pass over the data.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fts::{FunctionalSeries, OperatorMatrix};

/// Lag window family.
#[derive(Debug, Clone, Copy)]
pub enum WindowKind {
    /// `sin(πx)/(πx)`.
    Daniell,
    /// `(1 − |x|)₊`.
    Bartlett,
    Parzen,
    /// User-supplied even window with its `∫w²`; never validated.
    Custom { w: fn(f64) -> f64, kappa: f64 },
}

impl PartialEq for WindowKind {
    fn eq(&self, other: &Self) -> bool {
        use WindowKind::*;
        match (self, other) {
            (Daniell, Daniell) | (Bartlett, Bartlett) | (Parzen, Parzen) => true,
            (Custom { w: a, kappa: ka }, Custom { w: b, kappa: kb }) => {
                core::ptr::fn_addr_eq(*a, *b) && ka == kb
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub kind: WindowKind,
}

impl WindowSpec {
    pub const DANIELL: WindowSpec = WindowSpec { kind: WindowKind::Daniell };
    pub const BARTLETT: WindowSpec = WindowSpec { kind: WindowKind::Bartlett };
    pub const PARZEN: WindowSpec = WindowSpec { kind: WindowKind::Parzen };

    pub fn custom(w: fn(f64) -> f64, kappa: f64) -> Self {
        WindowSpec { kind: WindowKind::Custom { w, kappa } }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "daniell" => Ok(Self::DANIELL),
            "bartlett" => Ok(Self::BARTLETT),
            "parzen" => Ok(Self::PARZEN),
            other => Err(Error::InvalidInput(alloc::format!("unknown window '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WindowKind::Daniell => "daniell",
            WindowKind::Bartlett => "bartlett",
            WindowKind::Parzen => "parzen",
            WindowKind::Custom { .. } => "custom",
        }
    }

    /// Whether the window is one of the built-in families whose regularity
    /// is known; custom windows are accepted unchecked.
    pub fn is_checked(&self) -> bool {
        !matches!(self.kind, WindowKind::Custom { .. })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let a = libm::fabs(x);
        match self.kind {
            WindowKind::Daniell => {
                if a < 1e-12 {
                    1.0
                } else {
                    libm::sin(PI * a) / (PI * a)
                }
            }
            WindowKind::Bartlett => (1.0 - a).max(0.0),
            WindowKind::Parzen => {
                if a <= 0.5 {
                    1.0 - 6.0 * a * a + 6.0 * a * a * a
                } else if a <= 1.0 {
                    2.0 * (1.0 - a) * (1.0 - a) * (1.0 - a)
                } else {
                    0.0
                }
            }
            WindowKind::Custom { w, .. } => w(x),
        }
    }

    /// `κ = ∫ w²(x) dx`.
    pub fn kappa(&self) -> f64 {
        match self.kind {
            WindowKind::Daniell => 1.0,
            WindowKind::Bartlett => 2.0 / 3.0,
            WindowKind::Parzen => 151.0 / 280.0,
            WindowKind::Custom { kappa, .. } => kappa,
        }
    }
}

/// How the bandwidth `b` depends on the sample length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// `b = T^{−exponent}`.
    PowerLaw { exponent: f64 },
    Fixed(f64),
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::PowerLaw { exponent: 1.0 / 3.0 }
    }
}

impl BandwidthRule {
    pub fn resolve(&self, t_len: usize) -> Result<f64> {
        let b = match *self {
            BandwidthRule::PowerLaw { exponent } => libm::pow(t_len as f64, -exponent),
            BandwidthRule::Fixed(b) => b,
        };
        check_bandwidth(b)?;
        if b * (t_len as f64) < 4.0 {
            return Err(Error::Bandwidth(b));
        }
        Ok(b)
    }
}

fn check_bandwidth(b: f64) -> Result<()> {
    if b.is_finite() && b > 0.0 && b <= 1.0 {
        Ok(())
    } else {
        Err(Error::Bandwidth(b))
    }
}

/// Frequency band `[lo, hi] ⊆ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub const FULL: Band = Band { lo: 0.0, hi: PI };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let tol = 1e-12;
        if !(lo.is_finite() && hi.is_finite()) || lo < -tol || hi > PI + tol || lo > hi {
            return Err(Error::InvalidBand { lo, hi });
        }
        Ok(Band { lo: lo.max(0.0), hi: hi.min(PI) })
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Equispaced grid including both endpoints; a single node for a point band.
    pub fn grid(&self, n_freq: usize) -> Result<Vec<f64>> {
        if self.is_point() {
            if n_freq == 0 {
                return Err(Error::InvalidInput("n_freq must be >= 1".into()));
            }
            return Ok(alloc::vec![self.lo]);
        }
        if n_freq < 2 {
            return Err(Error::InvalidInput("a proper band needs n_freq >= 2".into()));
        }
        let step = self.width() / (n_freq - 1) as f64;
        let mut g: Vec<f64> = (0..n_freq).map(|j| self.lo + step * j as f64).collect();
        g[n_freq - 1] = self.hi;
        Ok(g)
    }
}

/// `⌊ηT⌋`, robust to `η = i/n` landing a hair below an integer.
pub fn prefix_len(eta: f64, t_len: usize) -> usize {
    libm::floor(eta * t_len as f64 + 1e-9) as usize
}

fn prefix_checked(eta: f64, t_len: usize) -> Result<usize> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidInput(alloc::format!("eta = {eta} outside (0, 1]")));
    }
    let m = prefix_len(eta, t_len);
    if m < 2 {
        return Err(Error::WindowTooShort { len: m });
    }
    Ok(m)
}

/// `Ĉ_h^{(m)} = m⁻¹ Σ X_{t+h} X_tᵀ` over indices in `1..m`; negative lags give
/// the transpose.
pub fn autocov_lag(series: &FunctionalSeries, h: isize, m: usize) -> Result<DMatrix<f64>> {
    if m > series.len() || m == 0 {
        return Err(Error::InvalidInput(alloc::format!("prefix length {m} outside 1..={}", series.len())));
    }
    if h.unsigned_abs() >= m {
        return Err(Error::LagOutOfRange { lag: h, len: m });
    }
    let x = series.coeffs();
    let d = series.dim();
    let a = h.unsigned_abs();
    let mut c = DMatrix::zeros(d, d);
    for t in 0..(m - a) {
        for i in 0..d {
            let xi = x[(t + a, i)];
            for j in 0..d {
                c[(i, j)] += xi * x[(t, j)];
            }
        }
    }
    c /= m as f64;
    Ok(if h < 0 { c.transpose() } else { c })
}

/// Sequential estimate `F̂(η, ω)` via the lag-sum form.
pub fn sequential_estimate(
    series: &FunctionalSeries,
    eta: f64,
    omega: f64,
    window: &WindowSpec,
    b: f64,
) -> Result<OperatorMatrix> {
    check_bandwidth(b)?;
    let m = prefix_checked(eta, series.len())?;
    let d = series.dim();
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for h in 0..m as isize {
        let c = autocov_lag(series, h, m)?;
        let w = window.eval(b * h as f64);
        let ph = Complex64::from_polar(w, -omega * h as f64);
        if h == 0 {
            acc += c.map(|v| Complex64::new(v, 0.0));
        } else {
            let ct = c.transpose();
            for i in 0..d {
                for j in 0..d {
                    acc[(i, j)] += ph * c[(i, j)] + ph.conj() * ct[(i, j)];
                }
            }
        }
    }
    acc *= Complex64::new(1.0 / (2.0 * PI), 0.0);
    OperatorMatrix::new(acc, omega)
}

/// Reference `O(m²)` double sum
/// `m⁻¹ Σ_{s,t ≤ m} (2π)⁻¹ w(b(t−s)) e^{iω(t−s)} X_s X_tᵀ`.
pub fn naive_sequential_estimate(
    series: &FunctionalSeries,
    eta: f64,
    omega: f64,
    window: &WindowSpec,
    b: f64,
) -> Result<OperatorMatrix> {
    check_bandwidth(b)?;
    let m = prefix_checked(eta, series.len())?;
    let d = series.dim();
    let x = series.coeffs();
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for s in 0..m {
        for t in 0..m {
            let lag = t as f64 - s as f64;
            let f = Complex64::from_polar(window.eval(b * lag), omega * lag);
            for i in 0..d {
                for j in 0..d {
                    acc[(i, j)] += f * (x[(s, i)] * x[(t, j)]);
                }
            }
        }
    }
    acc *= Complex64::new(1.0 / (2.0 * PI * m as f64), 0.0);
    OperatorMatrix::new(acc, omega)
}

/// Observations seen as `p × q` frames; `S_h` accumulates `F_{t+h} F_tᵀ / q`.
/// A plain series is the case `q = 1`.
#[derive(Debug, Clone)]
pub struct LagSums {
    p: usize,
    q: usize,
    len: usize,
    frames: Vec<f64>,
    // S_h, row-major p×p, for h = 0..len
    sums: Vec<f64>,
}

impl LagSums {
    pub fn new(p: usize, q: usize, capacity: usize) -> Self {
        LagSums {
            p,
            q,
            len: 0,
            frames: Vec::with_capacity(capacity * p * q),
            sums: Vec::with_capacity(capacity * p * p),
        }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends one frame (row-major `p × q`).
    pub fn push(&mut self, frame: &[f64]) {
        let (p, q) = (self.p, self.q);
        debug_assert_eq!(frame.len(), p * q);
        self.frames.extend_from_slice(frame);
        self.sums.resize((self.len + 1) * p * p, 0.0);
        let m = self.len;
        let inv_q = 1.0 / q as f64;
        let cur = &self.frames[m * p * q..(m + 1) * p * q];
        for h in 0..=m {
            let past = &self.frames[(m - h) * p * q..(m - h + 1) * p * q];
            let s = &mut self.sums[h * p * p..(h + 1) * p * p];
            for i in 0..p {
                let ci = &cur[i * q..(i + 1) * q];
                let row = &mut s[i * p..(i + 1) * p];
                if q == 1 {
                    let a = ci[0];
                    for (r, pj) in row.iter_mut().zip(past.iter()) {
                        *r += a * pj;
                    }
                } else {
                    for (j, r) in row.iter_mut().enumerate() {
                        let pj = &past[j * q..(j + 1) * q];
                        let dot: f64 = ci.iter().zip(pj).map(|(a, b)| a * b).sum();
                        *r += dot * inv_q;
                    }
                }
            }
        }
        self.len += 1;
    }

    /// Raw lag sum `S_h` over the frames pushed so far.
    pub fn raw(&self, h: usize) -> &[f64] {
        let pp = self.p * self.p;
        &self.sums[h * pp..(h + 1) * pp]
    }

    /// Estimates at every `omega` from the current prefix.
    pub fn estimates(
        &self,
        omegas: &[f64],
        weights: &[f64],
        trig: &TrigTable,
    ) -> Vec<OperatorMatrix> {
        let p = self.p;
        let m = self.len;
        let ns = p * (p + 1) / 2;
        let na = p * (p - 1) / 2;
        let mut sym = alloc::vec![0.0; m * ns];
        let mut anti = alloc::vec![0.0; m * na];
        for h in 0..m {
            let s = self.raw(h);
            let (mut e, mut f) = (h * ns, h * na);
            for i in 0..p {
                for j in i..p {
                    sym[e] = if h == 0 { s[i * p + j] } else { s[i * p + j] + s[j * p + i] };
                    e += 1;
                    if j > i {
                        anti[f] = s[i * p + j] - s[j * p + i];
                        f += 1;
                    }
                }
            }
        }
        let scale = 1.0 / (2.0 * PI * m as f64);
        let mut out = Vec::with_capacity(omegas.len());
        let mut re = alloc::vec![0.0; ns];
        let mut im = alloc::vec![0.0; na];
        for (k, &omega) in omegas.iter().enumerate() {
            re.iter_mut().for_each(|v| *v = 0.0);
            im.iter_mut().for_each(|v| *v = 0.0);
            let (cos, sin) = trig.row(k);
            for h in 0..m {
                let c = weights[h] * cos[h];
                if c != 0.0 {
                    for (r, v) in re.iter_mut().zip(&sym[h * ns..(h + 1) * ns]) {
                        *r += c * v;
                    }
                }
                let s = weights[h] * sin[h];
                if h > 0 && s != 0.0 {
                    for (r, v) in im.iter_mut().zip(&anti[h * na..(h + 1) * na]) {
                        *r -= s * v;
                    }
                }
            }
            let mut mat = DMatrix::<Complex64>::zeros(p, p);
            let (mut e, mut f) = (0, 0);
            for i in 0..p {
                for j in i..p {
                    let z = if j > i {
                        let z = Complex64::new(re[e] * scale, im[f] * scale);
                        f += 1;
                        z
                    } else {
                        Complex64::new(re[e] * scale, 0.0)
                    };
                    mat[(i, j)] = z;
                    mat[(j, i)] = z.conj();
                    e += 1;
                }
            }
            out.push(OperatorMatrix { entries: mat, freq: omega });
        }
        out
    }
}

/// Cached `cos(ωh), sin(ωh)` for a frequency grid and lags `0..n_lags`.
#[derive(Debug, Clone)]
pub struct TrigTable {
    n_lags: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    pub fn new(omegas: &[f64], n_lags: usize) -> Self {
        let mut cos = Vec::with_capacity(omegas.len() * n_lags);
        let mut sin = Vec::with_capacity(omegas.len() * n_lags);
        for &w in omegas {
            for h in 0..n_lags {
                let (s, c) = libm::sincos(w * h as f64);
                cos.push(c);
                sin.push(s);
            }
        }
        TrigTable { n_lags, cos, sin }
    }

    fn row(&self, k: usize) -> (&[f64], &[f64]) {
        let r = k * self.n_lags..(k + 1) * self.n_lags;
        (&self.cos[r.clone()], &self.sin[r])
    }
}

/// Window weights `w(bh)` for `h = 0..n`.
pub fn lag_weights(window: &WindowSpec, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|h| window.eval(b * h as f64)).collect()
}

/// Sequential estimates over an `(η, ω)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub freqs: Vec<f64>,
    pub etas: Vec<f64>,
    /// `ops[i][j]` is the estimate at `(etas[i], freqs[j])`.
    pub ops: Vec<Vec<OperatorMatrix>>,
    pub t_len: usize,
    pub bandwidth: f64,
    pub window: WindowSpec,
}

impl SpectralEstimate {
    pub fn dim(&self) -> usize {
        self.ops.first().and_then(|r| r.first()).map_or(0, |o| o.dim())
    }

    /// Operators at the largest η (the full-sample estimator when η = 1).
    pub fn full(&self) -> &[OperatorMatrix] {
        self.ops.last().map_or(&[], |v| v.as_slice())
    }
}

fn check_etas(etas: &[f64]) -> Result<()> {
    if etas.is_empty() {
        return Err(Error::InvalidInput("empty eta grid".into()));
    }
    for w in etas.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput("eta grid must be strictly increasing".into()));
        }
    }
    if !(etas[0] > 0.0 && etas[etas.len() - 1] <= 1.0) {
        return Err(Error::InvalidInput("eta grid must lie in (0, 1]".into()));
    }
    Ok(())
}

/// Feeds frames into a [`LagSums`] and evaluates at each prefix `⌊η T⌋`.
pub fn surface_from_frames<'a, I>(
    frames: I,
    p: usize,
    q: usize,
    t_len: usize,
    freqs: &[f64],
    etas: &[f64],
    window: &WindowSpec,
    b: f64,
) -> Result<Vec<Vec<OperatorMatrix>>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    check_etas(etas)?;
    check_bandwidth(b)?;
    let prefixes: Vec<usize> =
        etas.iter().map(|&e| prefix_checked(e, t_len)).collect::<Result<_>>()?;
    let weights = lag_weights(window, b, t_len);
    let trig = TrigTable::new(freqs, t_len);
    let mut acc = LagSums::new(p, q, t_len);
    let mut out = Vec::with_capacity(etas.len());
    let mut next = 0;
    for frame in frames {
        if next == prefixes.len() {
            break;
        }
        acc.push(frame);
        while next < prefixes.len() && prefixes[next] == acc.len() {
            out.push(acc.estimates(freqs, &weights, &trig));
            next += 1;
        }
    }
    if next != prefixes.len() {
        return Err(Error::InvalidInput("fewer frames than the sample length".into()));
    }
    Ok(out)
}

/// Full `(η, ω)` surface of sequential estimates.
pub fn spectral_surface(
    series: &FunctionalSeries,
    band: Band,
    n_freq: usize,
    etas: &[f64],
    window: &WindowSpec,
    bandwidth: &BandwidthRule,
) -> Result<SpectralEstimate> {
    let t_len = series.len();
    let b = bandwidth.resolve(t_len)?;
    let freqs = band.grid(n_freq)?;
    let data = series.time_major();
    let d = series.dim();
    let ops = surface_from_frames(data.chunks(d), d, 1, t_len, &freqs, etas, window, b)?;
    Ok(SpectralEstimate { freqs, etas: etas.to_vec(), ops, t_len, bandwidth: b, window: *window })
}
