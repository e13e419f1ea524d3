//! Two-sided Wiener sample paths, the shift group and the conjugation factor.
//!
//! A [`WienerPath`] stores `omega(t_k)` on the grid `t_k = t_min + k dt` with
//! `omega(0) = 0` exactly. The forward half (`t > 0`) and the backward half
//! (`t < 0`) are generated from two independent ChaCha streams of the same
//! master seed, so extending either end never changes the other half, and
//! extending an end only appends samples.
//!
//! Solvers read noise through the [`NoisePath`] trait, which only answers at
//! grid nodes. [`ShiftedPath`] is a lazy view covering both the Wiener shift
//! `theta_s omega(.) = omega(. + s) - omega(s)` and the plain translation
//! `omega^s(.) = omega(. + s)`.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const FORWARD_STREAM: u64 = 0;
const BACKWARD_STREAM: u64 = 1;
const REFINE_STREAM_BASE: u64 = 2;

/// Largest `|alpha * omega|` accepted before `exp` is considered to have left
/// the useful float range.
const MAX_EXPONENT: f64 = 700.0;

/// Relative slack when deciding whether a time sits on a grid node.
const ALIGN_EPS: f64 = 1e-6;

/// Converts `value` to a whole number of grid steps, or fails.
pub(crate) fn grid_steps(what: &'static str, value: f64, dt: f64) -> Result<i64> {
    let x = value / dt;
    let k = x.round();
    if !x.is_finite() || (x - k).abs() > ALIGN_EPS {
        return Err(Error::NotAligned { what, value, dt });
    }
    Ok(k as i64)
}

/// Where the samples of a path came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathOrigin {
    /// The deterministic member `omega = 0`.
    Zero,
    Sampled { seed: u64 },
    Imported,
}

/// Provenance of a path view, as written to run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDescriptor {
    pub origin: PathOrigin,
    pub refine_level: u32,
    pub dt: f64,
    /// Time offset of the view relative to the base path.
    pub offset: f64,
    /// `Some(a)` when the view subtracts `omega(a)` (Wiener shift), `None` for
    /// a plain translation.
    pub anchor: Option<f64>,
}

/// Read access to a noise trajectory at grid nodes.
pub trait NoisePath: Send + Sync {
    /// `omega(t)`; `t` must be a grid node inside [`NoisePath::domain`].
    fn omega(&self, t: f64) -> Result<f64>;
    fn dt(&self) -> f64;
    fn domain(&self) -> (f64, f64);
    fn descriptor(&self) -> PathDescriptor;
}

/// Sampled two-sided Brownian trajectory with `omega(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    origin: PathOrigin,
    level: u32,
    dt: f64,
    /// Number of grid steps below `t = 0`.
    n_neg: usize,
    values: Arc<[f64]>,
}

/// Samples a two-sided Wiener path on `[t_min, t_max]` with step `dt`.
pub fn sample_path(seed: u64, t_min: f64, t_max: f64, dt: f64) -> Result<WienerPath> {
    let (n_neg, n_pos) = check_bounds(t_min, t_max, dt)?;
    let scale = dt.sqrt();
    let mut values = vec![0.0; n_neg + n_pos + 1];

    let mut fwd = ChaCha8Rng::seed_from_u64(seed);
    fwd.set_stream(FORWARD_STREAM);
    let mut acc = 0.0;
    for v in values[n_neg + 1..].iter_mut() {
        let z: f64 = StandardNormal.sample(&mut fwd);
        acc += scale * z;
        *v = acc;
    }

    let mut bwd = ChaCha8Rng::seed_from_u64(seed);
    bwd.set_stream(BACKWARD_STREAM);
    acc = 0.0;
    for v in values[..n_neg].iter_mut().rev() {
        let z: f64 = StandardNormal.sample(&mut bwd);
        acc += scale * z;
        *v = acc;
    }

    Ok(WienerPath {
        origin: PathOrigin::Sampled { seed },
        level: 0,
        dt,
        n_neg,
        values: values.into(),
    })
}

fn check_bounds(t_min: f64, t_max: f64, dt: f64) -> Result<(usize, usize)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive and finite, got {dt}")));
    }
    if !(t_min < 0.0 && t_max > 0.0) {
        return Err(invalid(
            "t_min/t_max",
            format!("need t_min < 0 < t_max, got [{t_min}, {t_max}]"),
        ));
    }
    let n_neg = -grid_steps("t_min", t_min, dt)?;
    let n_pos = grid_steps("t_max", t_max, dt)?;
    Ok((n_neg as usize, n_pos as usize))
}

impl WienerPath {
    /// The deterministic path `omega = 0` on `[t_min, t_max]`.
    pub fn zero(t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        let (n_neg, n_pos) = check_bounds(t_min, t_max, dt)?;
        Ok(WienerPath {
            origin: PathOrigin::Zero,
            level: 0,
            dt,
            n_neg,
            values: vec![0.0; n_neg + n_pos + 1].into(),
        })
    }

    /// Builds a path from explicit samples starting at `t_min`. The sample at
    /// `t = 0` must be exactly zero.
    pub fn from_samples(t_min: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(invalid("values", "need at least three samples"));
        }
        let t_max = t_min + (values.len() - 1) as f64 * dt;
        let (n_neg, n_pos) = check_bounds(t_min, t_max, dt)?;
        if n_neg + n_pos + 1 != values.len() {
            return Err(Error::SizeMismatch(format!(
                "{} samples do not span [{t_min}, {t_max}] at dt = {dt}",
                values.len()
            )));
        }
        if values[n_neg] != 0.0 {
            return Err(invalid(
                "values",
                format!("sample at t = 0 must be 0, got {}", values[n_neg]),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "non-finite sample"));
        }
        Ok(WienerPath {
            origin: PathOrigin::Imported,
            level: 0,
            dt,
            n_neg,
            values: values.into(),
        })
    }

    pub fn origin(&self) -> PathOrigin {
        self.origin
    }

    pub fn refine_level(&self) -> u32 {
        self.level
    }

    pub fn t_min(&self) -> f64 {
        -(self.n_neg as f64) * self.dt
    }

    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1 - self.n_neg) as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Time of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        (k as i64 - self.n_neg as i64) as f64 * self.dt
    }

    /// `omega` at grid step `k` relative to `t = 0`.
    pub fn at_step(&self, k: i64) -> Result<f64> {
        let idx = k + self.n_neg as i64;
        if idx < 0 || idx >= self.values.len() as i64 {
            return Err(Error::OutOfDomain {
                t: k as f64 * self.dt,
                lo: self.t_min(),
                hi: self.t_max(),
            });
        }
        Ok(self.values[idx as usize])
    }

    /// Linear interpolation between nodes. Intended for plotting only; the
    /// solvers query nodes through [`NoisePath::omega`].
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.t_min(), self.t_max());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfDomain { t, lo, hi });
        }
        let x = (t - lo) / self.dt;
        let k = (x.floor() as usize).min(self.values.len() - 2);
        let w = x - k as f64;
        Ok((1.0 - w) * self.values[k] + w * self.values[k + 1])
    }

    /// Identity view of this path.
    pub fn view(&self) -> ShiftedPath {
        ShiftedPath {
            base: self.clone(),
            offset: 0,
            anchor: None,
        }
    }

    /// Wiener shift `theta_s omega`.
    pub fn shift(&self, s: f64) -> Result<ShiftedPath> {
        self.view().shift(s)
    }

    /// Translation `omega^s(.) = omega(. + s)` (no re-anchoring).
    pub fn translate(&self, s: f64) -> Result<ShiftedPath> {
        self.view().translate(s)
    }

    /// Writes the path as CSV with header `t,omega`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,omega")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.time(k), v)?;
        }
        Ok(())
    }

    /// Reads a path written by [`WienerPath::write_csv`]. The grid step is
    /// taken from the first two rows and every other row must agree with it.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
        if header.trim() != "t,omega" {
            return Err(Error::Parse(format!("expected header `t,omega`, got `{header}`")));
        }
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Parse(format!("row {}: missing column", i + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))
            };
            ts.push(parse(it.next())?);
            vs.push(parse(it.next())?);
        }
        if ts.len() < 3 {
            return Err(Error::Parse("need at least three rows".into()));
        }
        let dt = ts[1] - ts[0];
        for (k, t) in ts.iter().enumerate() {
            let expected = ts[0] + k as f64 * dt;
            if (t - expected).abs() > ALIGN_EPS * dt {
                return Err(Error::Parse(format!("row {}: non-uniform time grid", k + 2)));
            }
        }
        let t_min = grid_steps("t_min", ts[0], dt)? as f64 * dt;
        WienerPath::from_samples(t_min, dt, vs)
    }
}

impl NoisePath for WienerPath {
    fn omega(&self, t: f64) -> Result<f64> {
        let k = grid_steps("t", t, self.dt)?;
        self.at_step(k)
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn domain(&self) -> (f64, f64) {
        (self.t_min(), self.t_max())
    }

    fn descriptor(&self) -> PathDescriptor {
        PathDescriptor {
            origin: self.origin,
            refine_level: self.level,
            dt: self.dt,
            offset: 0.0,
            anchor: None,
        }
    }
}

/// Lazy view `t -> base(t + offset) - base(anchor)` (anchor term absent for
/// a plain translation). Offsets are kept in whole grid steps, so composing
/// shifts is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedPath {
    base: WienerPath,
    offset: i64,
    anchor: Option<i64>,
}

/// Wiener shift of a path by `s`: `theta_s omega(t) = omega(t + s) - omega(s)`.
pub fn shift(path: &WienerPath, s: f64) -> Result<ShiftedPath> {
    path.shift(s)
}

impl ShiftedPath {
    pub fn base(&self) -> &WienerPath {
        &self.base
    }

    pub fn offset(&self) -> f64 {
        self.offset as f64 * self.base.dt
    }

    /// `theta_r` applied to this view.
    pub fn shift(&self, r: f64) -> Result<ShiftedPath> {
        let k = self.offset + grid_steps("s", r, self.base.dt)?;
        // the anchor must be a sample of the base path
        self.base.at_step(k)?;
        Ok(ShiftedPath {
            base: self.base.clone(),
            offset: k,
            anchor: Some(k),
        })
    }

    /// Translation by `r`: `t -> self(t + r)`.
    pub fn translate(&self, r: f64) -> Result<ShiftedPath> {
        let k = self.offset + grid_steps("s", r, self.base.dt)?;
        Ok(ShiftedPath {
            base: self.base.clone(),
            offset: k,
            anchor: self.anchor,
        })
    }
}

impl NoisePath for ShiftedPath {
    fn omega(&self, t: f64) -> Result<f64> {
        let k = grid_steps("t", t, self.base.dt)?;
        let v = self.base.at_step(k + self.offset).map_err(|_| {
            let (lo, hi) = self.domain();
            Error::OutOfDomain { t, lo, hi }
        })?;
        match self.anchor {
            Some(a) => Ok(v - self.base.at_step(a)?),
            None => Ok(v),
        }
    }

    fn dt(&self) -> f64 {
        self.base.dt
    }

    fn domain(&self) -> (f64, f64) {
        let s = self.offset();
        (self.base.t_min() - s, self.base.t_max() - s)
    }

    fn descriptor(&self) -> PathDescriptor {
        let dt = self.base.dt;
        PathDescriptor {
            origin: self.base.origin,
            refine_level: self.base.level,
            dt,
            offset: self.offset as f64 * dt,
            anchor: self.anchor.map(|a| a as f64 * dt),
        }
    }
}

/// Conjugation factor `z(t, omega) = exp(-alpha omega(t))`.
pub fn conj_factor<P: NoisePath + ?Sized>(path: &P, t: f64, alpha: f64) -> Result<f64> {
    let exponent = -alpha * path.omega(t)?;
    if !exponent.is_finite() || exponent.abs() > MAX_EXPONENT {
        return Err(Error::PathRange { t, exponent });
    }
    Ok(exponent.exp())
}

/// Refines the grid by an integer factor, filling new nodes by Brownian-bridge
/// sampling. Existing nodes are kept bit-for-bit. The bridge noise is keyed to
/// the master seed and the refinement level, so refining twice in a row is
/// reproducible.
pub fn refine(path: &WienerPath, factor: usize) -> Result<WienerPath> {
    if factor < 2 {
        return Err(invalid("factor", format!("must be >= 2, got {factor}")));
    }
    let dt = path.dt / factor as f64;
    let n_out = (path.values.len() - 1) * factor + 1;
    let level = path.level + 1;

    if path.origin == PathOrigin::Zero {
        return Ok(WienerPath {
            origin: PathOrigin::Zero,
            level,
            dt,
            n_neg: path.n_neg * factor,
            values: vec![0.0; n_out].into(),
        });
    }

    let seed = match path.origin {
        PathOrigin::Sampled { seed } => seed,
        _ => 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(REFINE_STREAM_BASE + path.level as u64);

    let mut out = Vec::with_capacity(n_out);
    for w in path.values.windows(2) {
        let (mut x, b) = (w[0], w[1]);
        out.push(x);
        for i in 1..factor {
            // remaining time to the right knot, in units of dt
            let remaining = (factor - i + 1) as f64;
            let mean = x + (b - x) / remaining;
            let var = dt * (remaining - 1.0) / remaining;
            let z: f64 = StandardNormal.sample(&mut rng);
            x = mean + var.sqrt() * z;
            out.push(x);
        }
    }
    out.push(*path.values.last().unwrap());

    Ok(WienerPath {
        origin: path.origin,
        level,
        dt,
        n_neg: path.n_neg * factor,
        values: out.into(),
    })
}

/// Growth diagnostic for `omega(t)/t -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SublinearityReport {
    pub t_half: f64,
    /// `max |omega(t)/t|` over grid nodes with `|t| >= t_half`.
    pub max_ratio: f64,
    pub argmax: f64,
}

/// Reports `max |omega(t)/t|` over `|t| >= |t_min|/2`. A finite sample cannot
/// certify sublinear growth, so this is only a sanity check.
pub fn sublinearity_report(path: &WienerPath) -> SublinearityReport {
    let t_half = path.t_min().abs() / 2.0;
    let mut best = (0.0, 0.0);
    for (k, &v) in path.values.iter().enumerate() {
        let t = path.time(k);
        if t.abs() >= t_half && t != 0.0 {
            let r = (v / t).abs();
            if r > best.0 {
                best = (r, t);
            }
        }
    }
    SublinearityReport {
        t_half,
        max_ratio: best.0,
        argmax: best.1,
    }
}

/// Parses a seed given as decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse::<u64>(),
    };
    parsed.map_err(|e| Error::Parse(format!("seed `{s}`: {e}")))
}

/// A path choice in configurations: the zero path or a sampled seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseSeed {
    Zero,
    Seed(u64),
}

impl NoiseSeed {
    /// `"zero"` or a seed accepted by [`parse_seed`].
    pub fn parse(s: &str) -> Result<NoiseSeed> {
        match s.trim() {
            "zero" => Ok(NoiseSeed::Zero),
            other => parse_seed(other).map(NoiseSeed::Seed),
        }
    }

    pub fn path(self, t_min: f64, t_max: f64, dt: f64) -> Result<WienerPath> {
        match self {
            NoiseSeed::Zero => WienerPath::zero(t_min, t_max, dt),
            NoiseSeed::Seed(s) => sample_path(s, t_min, t_max, dt),
        }
    }
}

impl std::fmt::Display for NoiseSeed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseSeed::Zero => f.write_str("zero"),
            NoiseSeed::Seed(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for NoiseSeed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_seed_labels() {
        assert_eq!(NoiseSeed::parse("zero").unwrap(), NoiseSeed::Zero);
        assert_eq!(NoiseSeed::parse("0x10").unwrap(), NoiseSeed::Seed(16));
        assert_eq!(NoiseSeed::Seed(7).to_string(), "7");
        assert!(NoiseSeed::parse("seven").is_err());
    }

    #[test]
    fn origin_sample_is_zero() {
        let p = sample_path(42, -10.0, 10.0, 0.01).unwrap();
        assert_eq!(p.len(), 2001);
        assert_eq!(p.values()[1000], 0.0);
        assert_eq!(p.omega(0.0).unwrap(), 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_path(42, -10.0, 10.0, 0.01).unwrap();
        let b = sample_path(42, -10.0, 10.0, 0.01).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn extending_past_keeps_future_and_vice_versa() {
        let a = sample_path(3, -5.0, 5.0, 0.1).unwrap();
        let b = sample_path(3, -20.0, 5.0, 0.1).unwrap();
        let c = sample_path(3, -5.0, 9.0, 0.1).unwrap();
        for k in -50..=50 {
            assert_eq!(a.at_step(k).unwrap(), b.at_step(k).unwrap());
            assert_eq!(a.at_step(k).unwrap(), c.at_step(k).unwrap());
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(sample_path(1, -1.0, 1.0, 0.0).is_err());
        assert!(sample_path(1, -1.0, 1.0, -0.1).is_err());
        assert!(matches!(
            sample_path(1, -1.05, 1.0, 0.1),
            Err(Error::NotAligned { .. })
        ));
        assert!(sample_path(1, 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn shift_rules() {
        let p = sample_path(9, -10.0, 10.0, 0.01).unwrap();
        let id = p.shift(0.0).unwrap();
        for k in [-700, -3, 0, 5, 999] {
            let t = k as f64 * 0.01;
            assert_eq!(id.omega(t).unwrap(), p.omega(t).unwrap());
        }
        for s in [-3.0, 0.37, 2.0] {
            assert_eq!(p.shift(s).unwrap().omega(0.0).unwrap(), 0.0);
        }
        let back = p.shift(1.0).unwrap().shift(-1.0).unwrap();
        for k in -800..800 {
            let t = k as f64 * 0.01;
            assert!((back.omega(t).unwrap() - p.omega(t).unwrap()).abs() < 1e-14);
        }
        assert!(matches!(p.shift(0.005), Err(Error::NotAligned { .. })));
        assert!(p.shift(3.0).unwrap().omega(8.0).is_err());
    }

    #[test]
    fn translation_keeps_absolute_values() {
        let p = sample_path(5, -4.0, 4.0, 0.5).unwrap();
        let tr = p.translate(-2.0).unwrap();
        assert_eq!(tr.omega(1.0).unwrap(), p.omega(-1.0).unwrap());
        assert_eq!(tr.domain(), (-2.0, 6.0));
    }

    #[test]
    fn conj_factor_values() {
        let z = WienerPath::zero(-2.0, 2.0, 0.5).unwrap();
        assert_eq!(conj_factor(&z, 1.5, 3.0).unwrap(), 1.0);
        let p = WienerPath::from_samples(-1.0, 1.0, vec![0.3, 0.0, 0.2, 0.5]).unwrap();
        let v = conj_factor(&p, 2.0, 1.0).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn conj_factor_overflow_is_path_range() {
        let p = WienerPath::from_samples(-1.0, 1.0, vec![1e3, 0.0, 1.0]).unwrap();
        assert!(matches!(
            conj_factor(&p, -1.0, 1.0),
            Err(Error::PathRange { .. })
        ));
    }

    #[test]
    fn refine_keeps_knots() {
        let p = sample_path(11, -2.0, 2.0, 0.1).unwrap();
        let r = refine(&p, 4).unwrap();
        assert_eq!(r.dt(), 0.025);
        for k in -20..=20 {
            assert_eq!(r.at_step(4 * k).unwrap(), p.at_step(k).unwrap());
        }
        assert_eq!(r.refine_level(), 1);
        assert!(refine(&p, 1).is_err());
        let z = refine(&WienerPath::zero(-1.0, 1.0, 0.5).unwrap(), 2).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let p = sample_path(77, -1.0, 1.0, 0.25).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = WienerPath::read_csv(&buf[..]).unwrap();
        assert_eq!(p.values(), q.values());
        assert_eq!(q.origin(), PathOrigin::Imported);
        assert!(WienerPath::read_csv(&b"x,y\n"[..]).is_err());
    }

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0x2A").unwrap(), 42);
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn sublinearity_of_zero_path() {
        let z = WienerPath::zero(-4.0, 4.0, 0.5).unwrap();
        assert_eq!(sublinearity_report(&z).max_ratio, 0.0);
    }

    #[test]
    fn interpolation_between_nodes() {
        let p = WienerPath::from_samples(-1.0, 1.0, vec![2.0, 0.0, 1.0]).unwrap();
        assert!((p.interpolate(0.25).unwrap() - 0.25).abs() < 1e-15);
        assert!((p.interpolate(-0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(p.interpolate(1.5).is_err());
    }
}
