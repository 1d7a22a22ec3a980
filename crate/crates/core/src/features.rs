//! Support feature generation.
//!
//! Four families make up an expanded space, evaluated in this order:
//!
//! - `X`: the original columns,
//! - `Z`: projections `w·x` on random directions `w ∈ [0,1]^n`,
//! - `H`: binary windows `a ≤ w·x ≤ b` over pure single-class clusters
//!   found on those same projections,
//! - `K`: Gaussian kernels `exp(-β‖x - xᵢ‖²)` anchored at training rows.
//!
//! Nothing here filters features; see [`crate::selection`].

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::stats::{dot, squared_distance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    X,
    Z,
    H,
    K,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::X, Family::Z, Family::H, Family::K];

    pub fn letter(self) -> char {
        match self {
            Family::X => 'X',
            Family::Z => 'Z',
            Family::H => 'H',
            Family::K => 'K',
        }
    }
}

/// A non-empty-or-empty subset of {X, Z, H, K}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FamilySet {
    bits: u8,
}

impl FamilySet {
    pub fn new(families: &[Family]) -> FamilySet {
        let mut s = FamilySet::default();
        for &f in families {
            s.bits |= 1 << f as u8;
        }
        s
    }

    pub fn contains(self, f: Family) -> bool {
        self.bits & (1 << f as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Family> {
        Family::ALL.into_iter().filter(move |&f| self.contains(f))
    }
}

impl fmt::Display for FamilySet {
    /// Written in the K, H, Z, X order used by result tables, e.g. `K+H+Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = [Family::K, Family::H, Family::Z, Family::X];
        let parts: Vec<String> = order
            .iter()
            .filter(|&&fam| self.contains(fam))
            .map(|fam| fam.letter().to_string())
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for FamilySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = FamilySet::default();
        for part in s.split(['+', ',']).map(str::trim).filter(|p| !p.is_empty()) {
            let fam = match part.to_ascii_uppercase().as_str() {
                "X" => Family::X,
                "Z" => Family::Z,
                "H" => Family::H,
                "K" => Family::K,
                other => {
                    return Err(Error::Parse(format!("unknown feature family {other:?}")));
                }
            };
            set.bits |= 1 << fam as u8;
        }
        if set.is_empty() {
            return Err(Error::Parse(format!("empty feature family set {s:?}")));
        }
        Ok(set)
    }
}

/// Generation and selection parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    /// Number of random directions; `None` means `max(30, 3n)`.
    pub n_directions: Option<usize>,
    /// Minimum cluster / neighborhood size.
    pub eta: usize,
    /// Mutual information threshold, bits.
    pub alpha: f64,
    /// Maximum class posterior threshold.
    pub delta: f64,
    /// Kernel dispersion.
    pub beta: f64,
    /// Kernel neighborhood cutoff.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_directions: None,
            eta: 10,
            alpha: 0.005,
            delta: 0.5,
            beta: 1.0 / 32.0,
            epsilon: 0.001,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn directions_for(&self, n_features: usize) -> usize {
        self.n_directions.unwrap_or_else(|| (3 * n_features).max(30))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_directions == Some(0) {
            return bad("number of directions must be >= 1".into());
        }
        if self.eta == 0 {
            return bad("eta must be >= 1".into());
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad(format!("delta must be in [0,1], got {}", self.delta));
        }
        if !(self.beta > 0.0) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must be in (0,1), got {}", self.epsilon));
        }
        Ok(())
    }
}

/// One generated coordinate of the expanded space.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureDef {
    Original {
        column: usize,
    },
    Projection {
        direction: Vec<f64>,
    },
    Window {
        direction: Vec<f64>,
        lower: f64,
        upper: f64,
        class: usize,
    },
    Kernel {
        anchor: Vec<f64>,
        beta: f64,
    },
}

impl FeatureDef {
    pub fn window(direction: Vec<f64>, lower: f64, upper: f64, class: usize) -> Result<Self> {
        check_direction(&direction)?;
        if !(lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "window needs lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(FeatureDef::Window {
            direction,
            lower,
            upper,
            class,
        })
    }

    pub fn projection(direction: Vec<f64>) -> Result<Self> {
        check_direction(&direction)?;
        Ok(FeatureDef::Projection { direction })
    }

    pub fn kernel(anchor: Vec<f64>, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        Ok(FeatureDef::Kernel { anchor, beta })
    }

    pub fn family(&self) -> Family {
        match self {
            FeatureDef::Original { .. } => Family::X,
            FeatureDef::Projection { .. } => Family::Z,
            FeatureDef::Window { .. } => Family::H,
            FeatureDef::Kernel { .. } => Family::K,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FeatureDef::Original { .. } => "original",
            FeatureDef::Projection { .. } => "projection",
            FeatureDef::Window { .. } => "window",
            FeatureDef::Kernel { .. } => "kernel",
        }
    }

    /// Raw input dimension this def expects, if it constrains one.
    fn input_dim(&self) -> Option<usize> {
        match self {
            FeatureDef::Original { .. } => None,
            FeatureDef::Projection { direction } | FeatureDef::Window { direction, .. } => {
                Some(direction.len())
            }
            FeatureDef::Kernel { anchor, .. } => Some(anchor.len()),
        }
    }

    /// Value of this feature on `x`; `x` must have the right dimension.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            FeatureDef::Original { column } => x[*column],
            FeatureDef::Projection { direction } => dot(direction, x),
            FeatureDef::Window {
                direction,
                lower,
                upper,
                ..
            } => {
                let z = dot(direction, x);
                if *lower <= z && z <= *upper {
                    1.0
                } else {
                    0.0
                }
            }
            FeatureDef::Kernel { anchor, beta } => (-beta * squared_distance(anchor, x)).exp(),
        }
    }

    fn key(&self) -> Vec<u64> {
        let mut key = Vec::new();
        match self {
            FeatureDef::Original { column } => {
                key.push(0);
                key.push(*column as u64);
            }
            FeatureDef::Projection { direction } => {
                key.push(1);
                key.extend(direction.iter().map(|v| v.to_bits()));
            }
            FeatureDef::Window {
                direction,
                lower,
                upper,
                class,
            } => {
                key.push(2);
                key.extend([lower.to_bits(), upper.to_bits(), *class as u64]);
                key.extend(direction.iter().map(|v| v.to_bits()));
            }
            FeatureDef::Kernel { anchor, beta } => {
                key.push(3);
                key.push(beta.to_bits());
                key.extend(anchor.iter().map(|v| v.to_bits()));
            }
        }
        key
    }
}

fn check_direction(direction: &[f64]) -> Result<()> {
    if direction.is_empty() || direction.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidParameter("direction must be non-zero".into()));
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Uniform draw from `[0,1]^n`, redrawn if it comes out all zero.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    assert!(n >= 1, "direction dimension must be >= 1");
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        if w.iter().any(|&v| v != 0.0) {
            return w;
        }
    }
}

pub fn project(x: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(w.len(), x.len())?;
    Ok(dot(w, x))
}

pub fn window_feature(x: &[f64], def: &FeatureDef) -> Result<f64> {
    match def {
        FeatureDef::Window { direction, .. } => {
            check_dim(direction.len(), x.len())?;
            Ok(def.evaluate(x))
        }
        other => Err(Error::InvalidParameter(format!(
            "expected a window feature, got {}",
            other.kind_name()
        ))),
    }
}

pub fn kernel_feature(x: &[f64], def: &FeatureDef) -> Result<f64> {
    match def {
        FeatureDef::Kernel { anchor, .. } => {
            check_dim(anchor.len(), x.len())?;
            Ok(def.evaluate(x))
        }
        other => Err(Error::InvalidParameter(format!(
            "expected a kernel feature, got {}",
            other.kind_name()
        ))),
    }
}

/// A pure single-class interval on a 1-D projection.
#[derive(Clone, Debug, PartialEq)]
pub struct PureCluster {
    pub lower: f64,
    pub upper: f64,
    pub class: usize,
    pub count: usize,
}

/// Maximal runs of same-class points in sorted projection order that hold at
/// least `eta` points.
///
/// Points sharing one projected value but carrying different classes end any
/// run and belong to none. Interval bounds sit halfway to the neighbouring
/// sorted value; a run touching the end of the data is padded by half its
/// own span instead.
pub fn find_pure_clusters(z: &[f64], labels: &[usize], eta: usize) -> Vec<PureCluster> {
    debug_assert_eq!(z.len(), labels.len());
    if z.is_empty() || z.len() < eta {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));

    // Groups of equal values: (value, Some(class) if single-class, size).
    let mut groups: Vec<(f64, Option<usize>, usize)> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some((v, class, size)) if *v == z[i] => {
                if *class != Some(labels[i]) {
                    *class = None;
                }
                *size += 1;
            }
            _ => groups.push((z[i], Some(labels[i]), 1)),
        }
    }

    let mut clusters = Vec::new();
    let mut g = 0;
    while g < groups.len() {
        let Some(class) = groups[g].1 else {
            g += 1;
            continue;
        };
        let start = g;
        let mut count = 0;
        while g < groups.len() && groups[g].1 == Some(class) {
            count += groups[g].2;
            g += 1;
        }
        let end = g - 1;
        if count < eta {
            continue;
        }
        let lo = groups[start].0;
        let hi = groups[end].0;
        let half_span = (hi - lo) / 2.0;
        let below = (start > 0).then(|| (groups[start - 1].0 + lo) / 2.0);
        let above = (end + 1 < groups.len()).then(|| (hi + groups[end + 1].0) / 2.0);
        let pad = |inner_gap: Option<f64>| {
            if half_span > 0.0 {
                half_span
            } else {
                inner_gap.filter(|g| *g > 0.0).unwrap_or(0.5)
            }
        };
        let lower = below.unwrap_or_else(|| lo - pad(above.map(|a| a - hi)));
        let upper = above.unwrap_or_else(|| hi + pad(below.map(|b| lo - b)));
        clusters.push(PureCluster {
            lower,
            upper,
            class,
            count,
        });
    }
    clusters
}

/// Which family and generation step produced a def: the column for X, the
/// direction index for Z and H, the anchor row for K.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub family: Family,
    pub pass: usize,
}

/// Ordered feature definitions mapping raw samples to expanded vectors.
#[derive(Clone, Debug)]
pub struct FeatureSpace {
    input_dim: usize,
    defs: Vec<FeatureDef>,
    provenance: Vec<Provenance>,
    keys: HashSet<Vec<u64>>,
}

impl PartialEq for FeatureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.input_dim == other.input_dim
            && self.defs == other.defs
            && self.provenance == other.provenance
    }
}

impl FeatureSpace {
    pub fn new(input_dim: usize) -> FeatureSpace {
        FeatureSpace {
            input_dim,
            defs: Vec::new(),
            provenance: Vec::new(),
            keys: HashSet::new(),
        }
    }

    /// Append a def; returns false (and drops it) if an identical def exists.
    pub fn push(&mut self, def: FeatureDef, provenance: Provenance) -> Result<bool> {
        if let Some(d) = def.input_dim() {
            check_dim(self.input_dim, d)?;
        }
        if let FeatureDef::Original { column } = def {
            if column >= self.input_dim {
                return Err(Error::InvalidParameter(format!(
                    "column {column} out of range for dimension {}",
                    self.input_dim
                )));
            }
        }
        if !self.keys.insert(def.key()) {
            return Ok(false);
        }
        self.defs.push(def);
        self.provenance.push(provenance);
        Ok(true)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn defs(&self) -> &[FeatureDef] {
        &self.defs
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn count_family(&self, family: Family) -> usize {
        self.defs.iter().filter(|d| d.family() == family).count()
    }

    /// Keep only defs whose index passes `keep`, preserving order.
    pub fn retain_indices(&self, keep: &[bool]) -> FeatureSpace {
        let mut out = FeatureSpace::new(self.input_dim);
        for ((def, prov), &k) in self.defs.iter().zip(&self.provenance).zip(keep) {
            if k {
                out.keys.insert(def.key());
                out.defs.push(def.clone());
                out.provenance.push(*prov);
            }
        }
        out
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim, x.len())?;
        Ok(self.defs.iter().map(|d| d.evaluate(x)).collect())
    }

    /// Expanded matrix, one row per input row.
    pub fn transform(&self, samples: &Array2<f64>) -> Result<Array2<f64>> {
        check_dim(self.input_dim, samples.ncols())?;
        let m = samples.nrows();
        let rows: Vec<Vec<f64>> = par_range_map!(0..m, |i| {
            let row = samples.row(i);
            let x: Vec<f64> = row.iter().copied().collect();
            self.defs.iter().map(|d| d.evaluate(&x)).collect::<Vec<f64>>()
        });
        let width = self.defs.len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(Array2::from_shape_vec((m, width), flat).expect("row widths match def count"))
    }

    /// One def per line: `<kind> <pass> <parameters...>` after a `space` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("space {} {}\n", self.input_dim, self.defs.len());
        for (def, prov) in self.defs.iter().zip(&self.provenance) {
            let mut fields = vec![def.kind_name().to_string(), prov.pass.to_string()];
            match def {
                FeatureDef::Original { column } => fields.push(column.to_string()),
                FeatureDef::Projection { direction } => {
                    fields.extend(direction.iter().map(|v| format!("{v}")))
                }
                FeatureDef::Window {
                    direction,
                    lower,
                    upper,
                    class,
                } => {
                    fields.extend([class.to_string(), format!("{lower}"), format!("{upper}")]);
                    fields.extend(direction.iter().map(|v| format!("{v}")));
                }
                FeatureDef::Kernel { anchor, beta } => {
                    fields.push(format!("{beta}"));
                    fields.extend(anchor.iter().map(|v| format!("{v}")));
                }
            }
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<FeatureSpace> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty feature space file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "space" {
            return Err(Error::Parse(format!("bad feature space header {header:?}")));
        }
        let input_dim: usize = parse_field(h[1])?;
        let count: usize = parse_field(h[2])?;
        let mut space = FeatureSpace::new(input_dim);
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() < 3 {
                return Err(Error::Parse(format!("bad feature line {line:?}")));
            }
            let pass: usize = parse_field(f[1])?;
            let floats = |s: &[&str]| s.iter().map(|t| parse_field::<f64>(t)).collect::<Result<Vec<f64>>>();
            let def = match f[0] {
                "original" => FeatureDef::Original {
                    column: parse_field(f[2])?,
                },
                "projection" => FeatureDef::projection(floats(&f[2..])?)?,
                "window" if f.len() >= 6 => FeatureDef::window(
                    floats(&f[5..])?,
                    parse_field(f[3])?,
                    parse_field(f[4])?,
                    parse_field(f[2])?,
                )?,
                "kernel" if f.len() >= 4 => {
                    FeatureDef::kernel(floats(&f[3..])?, parse_field(f[2])?)?
                }
                _ => return Err(Error::Parse(format!("bad feature line {line:?}"))),
            };
            let family = def.family();
            space.push(def, Provenance { family, pass })?;
        }
        if space.len() != count {
            return Err(Error::Parse(format!(
                "feature space header promises {count} defs, found {}",
                space.len()
            )));
        }
        Ok(space)
    }
}

fn parse_field<T: FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse field {s:?}")))
}

/// Generate every requested family on `train` (no filtering).
pub fn build_feature_space(
    train: &Dataset,
    params: &GenParams,
    families: FamilySet,
) -> Result<FeatureSpace> {
    if families.is_empty() {
        return Err(Error::InvalidParameter("no feature families requested".into()));
    }
    if train.n_samples() == 0 {
        return Err(Error::Empty("training set".into()));
    }
    params.validate()?;
    let n = train.n_features();
    let mut space = FeatureSpace::new(n);

    if families.contains(Family::X) {
        for column in 0..n {
            space.push(
                FeatureDef::Original { column },
                Provenance {
                    family: Family::X,
                    pass: column,
                },
            )?;
        }
    }

    if families.contains(Family::Z) || families.contains(Family::H) {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let directions: Vec<Vec<f64>> = (0..params.directions_for(n))
            .map(|_| random_direction(n, &mut rng))
            .collect();

        if families.contains(Family::Z) {
            for (pass, w) in directions.iter().enumerate() {
                space.push(
                    FeatureDef::projection(w.clone())?,
                    Provenance {
                        family: Family::Z,
                        pass,
                    },
                )?;
            }
        }

        if families.contains(Family::H) {
            let windows: Vec<Vec<FeatureDef>> =
                par_map!(directions, |w: &Vec<f64>| windows_for_direction(train, w, params.eta));
            for (pass, defs) in windows.into_iter().enumerate() {
                for def in defs {
                    space.push(
                        def,
                        Provenance {
                            family: Family::H,
                            pass,
                        },
                    )?;
                }
            }
        }
    }

    if families.contains(Family::K) {
        for i in 0..train.n_samples() {
            space.push(
                FeatureDef::kernel(train.row(i).to_vec(), params.beta)?,
                Provenance {
                    family: Family::K,
                    pass: i,
                },
            )?;
        }
    }

    Ok(space)
}

/// Window defs for every pure cluster on one direction, each re-checked for
/// purity and size on the training rows.
fn windows_for_direction(train: &Dataset, w: &[f64], eta: usize) -> Vec<FeatureDef> {
    let z: Vec<f64> = (0..train.n_samples()).map(|i| dot(w, train.row(i))).collect();
    find_pure_clusters(&z, &train.labels, eta)
        .into_iter()
        .filter_map(|c| {
            let mut members = 0;
            for (zi, &l) in z.iter().zip(&train.labels) {
                if c.lower <= *zi && *zi <= c.upper {
                    if l != c.class {
                        return None;
                    }
                    members += 1;
                }
            }
            if members < eta {
                return None;
            }
            FeatureDef::window(w.to_vec(), c.lower, c.upper, c.class).ok()
        })
        .collect()
}

/// Set of def keys, for dedup checks in callers and tests.
pub fn distinct_defs(space: &FeatureSpace) -> usize {
    space.defs().iter().map(FeatureDef::key).collect::<HashSet<_>>().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_parity;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn family_set_roundtrip() {
        let s: FamilySet = "K+H+Z".parse().unwrap();
        assert_eq!(s.to_string(), "K+H+Z");
        assert!(s.contains(Family::H) && !s.contains(Family::X));
        assert!("".parse::<FamilySet>().is_err());
        assert!("Q".parse::<FamilySet>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(GenParams::default().validate().is_ok());
        let bad = GenParams {
            epsilon: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = GenParams {
            delta: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(GenParams::default().directions_for(8), 30);
        assert_eq!(GenParams::default().directions_for(34), 102);
    }

    #[test]
    fn random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_direction(8, &mut rng);
        let b = random_direction(8, &mut rng);
        assert_ne!(a, b);
        assert!(a.iter().chain(&b).all(|v| (0.0..=1.0).contains(v)));
        let s = random_direction(1, &mut rng);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn direction_component_means() {
        // 10000 draws, sd of the mean is 0.2887/100; [0.45, 0.55] is > 17 sd wide.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sums = [0.0; 4];
        for _ in 0..10_000 {
            for (s, v) in sums.iter_mut().zip(random_direction(4, &mut rng)) {
                *s += v;
            }
        }
        for s in sums {
            let m = s / 10_000.0;
            assert!((0.45..=0.55).contains(&m), "{m}");
        }
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(project(&[5.0, 7.0, 9.0], &[0.0, 1.0, 0.0]).unwrap(), 7.0);
        assert!(project(&[1.0], &[1.0, 2.0]).is_err());
        let p = generate_parity(8).unwrap();
        let ones = vec![1.0; 8];
        for i in 0..p.n_samples() {
            let pop = p.row(i).iter().sum::<f64>();
            assert_eq!(project(p.row(i), &ones).unwrap(), pop);
        }
    }

    #[test]
    fn parity_popcount_clusters() {
        let p = generate_parity(8).unwrap();
        let z: Vec<f64> = (0..256).map(|i| p.row(i).iter().sum()).collect();
        let clusters = find_pure_clusters(&z, &p.labels, 10);
        // Oracle: enumerate popcounts k with C(8,k) >= 10.
        let expected: Vec<(usize, usize)> = (0..=8)
            .filter(|&k| binom(8, k) >= 10)
            .map(|k| (k, binom(8, k)))
            .collect();
        assert_eq!(expected.iter().map(|e| e.1).collect::<Vec<_>>(), vec![28, 56, 70, 56, 28]);
        assert_eq!(clusters.len(), expected.len());
        for (c, (k, count)) in clusters.iter().zip(&expected) {
            assert_eq!(c.count, *count);
            assert_eq!(c.class, k % 2);
            assert_eq!((c.lower, c.upper), (*k as f64 - 0.5, *k as f64 + 0.5));
        }
    }

    #[test]
    fn interleaved_and_uniform_clusters() {
        let z: Vec<f64> = (0..10).map(f64::from).collect();
        let alt: Vec<usize> = (0..10).map(|i| i % 2).collect();
        assert!(find_pure_clusters(&z, &alt, 2).is_empty());
        let same = vec![1; 10];
        let c = find_pure_clusters(&z, &same, 10);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].count, c[0].lower, c[0].upper), (10, -4.5, 13.5));
    }

    #[test]
    fn mixed_ties_break_runs() {
        // values 0,1,2 class 0; value 3 holds both classes; 4..6 class 0
        let z = [0.0, 1.0, 2.0, 3.0, 3.0, 4.0, 5.0, 6.0];
        let l = [0, 0, 0, 0, 1, 0, 0, 0];
        let c = find_pure_clusters(&z, &l, 3);
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].lower, c[0].upper, c[0].count), (-1.0, 2.5, 3));
        assert_eq!((c[1].lower, c[1].upper, c[1].count), (3.5, 7.0, 3));
    }

    #[test]
    fn window_and_kernel_values() {
        let w = FeatureDef::window(vec![1.0, 0.0], 1.0, 2.0, 0).unwrap();
        assert_eq!(window_feature(&[1.5, 9.0], &w).unwrap(), 1.0);
        assert_eq!(window_feature(&[1.0, 9.0], &w).unwrap(), 1.0);
        assert_eq!(window_feature(&[2.0, 9.0], &w).unwrap(), 1.0);
        assert_eq!(window_feature(&[2.5, 9.0], &w).unwrap(), 0.0);
        assert!(FeatureDef::window(vec![1.0], 2.0, 2.0, 0).is_err());
        assert!(FeatureDef::window(vec![0.0], 1.0, 2.0, 0).is_err());

        let k = FeatureDef::kernel(vec![0.0, 0.0], 1.0 / 32.0).unwrap();
        assert_eq!(kernel_feature(&[0.0, 0.0], &k).unwrap(), 1.0);
        // ‖x‖² = 32
        let v = kernel_feature(&[4.0, 4.0], &k).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-12);
        let k2 = FeatureDef::kernel(vec![0.0, 0.0], 0.5).unwrap();
        assert!(kernel_feature(&[1.0, 0.0], &k2).unwrap() < kernel_feature(&[1.0, 0.0], &k).unwrap());
        assert!(kernel_feature(&[1.0], &k).is_err());
        assert!(kernel_feature(&[1.0, 0.0], &w).is_err());
        assert!(FeatureDef::kernel(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn build_spaces() {
        let p = generate_parity(8).unwrap();
        let params = GenParams::default();
        let x = build_feature_space(&p, &params, "X".parse().unwrap()).unwrap();
        assert_eq!(x.len(), 8);
        let out = x.transform(&p.samples).unwrap();
        assert_eq!(out, p.samples);

        let k = build_feature_space(&p, &params, "K".parse().unwrap()).unwrap();
        assert_eq!(k.len(), 256);
        let kv = k.transform(&p.samples).unwrap();
        for i in 0..256 {
            assert_eq!(kv[(i, i)], 1.0);
        }

        let z = build_feature_space(&p, &params, "Z".parse().unwrap()).unwrap();
        assert_eq!(z.len(), 30);
        assert!(build_feature_space(&p, &params, FamilySet::default()).is_err());
    }

    #[test]
    fn duplicate_rows_dedup_kernels() {
        let mut p = generate_parity(2).unwrap();
        p = p.subset(&[0, 1, 1, 2]);
        let k = build_feature_space(&p, &GenParams::default(), "K".parse().unwrap()).unwrap();
        assert_eq!(k.len(), 3);
        assert_eq!(distinct_defs(&k), 3);
    }

    #[test]
    fn windows_are_pure_and_large() {
        let p = generate_parity(8).unwrap();
        let params = GenParams {
            n_directions: Some(60),
            seed: 9,
            ..Default::default()
        };
        let space = build_feature_space(&p, &params, "H".parse().unwrap()).unwrap();
        assert!(!space.is_empty());
        let values = space.transform(&p.samples).unwrap();
        for (j, def) in space.defs().iter().enumerate() {
            let FeatureDef::Window { class, .. } = def else {
                panic!("non-window def in H space")
            };
            let members: Vec<usize> = (0..256).filter(|&i| values[(i, j)] == 1.0).collect();
            assert!(members.len() >= params.eta);
            assert!(members.iter().all(|&i| p.labels[i] == *class));
        }
    }

    #[test]
    fn out_of_window_coordinate_is_zero() {
        let mut space = FeatureSpace::new(2);
        space
            .push(
                FeatureDef::window(vec![1.0, 1.0], 0.0, 1.0, 0).unwrap(),
                Provenance { family: Family::H, pass: 0 },
            )
            .unwrap();
        assert_eq!(space.transform_row(&[3.0, 3.0]).unwrap(), vec![0.0]);
        assert!(space.transform_row(&[3.0]).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let p = generate_parity(3).unwrap();
        let params = GenParams {
            n_directions: Some(5),
            eta: 2,
            seed: 1,
            ..Default::default()
        };
        let space = build_feature_space(&p, &params, "X+Z+H+K".parse().unwrap()).unwrap();
        let back = FeatureSpace::from_text(&space.to_text()).unwrap();
        assert_eq!(back, space);
        assert!(FeatureSpace::from_text("space 2 1\n").is_err());
    }
}
