//! Panel data model shared by every other module: typed observation keys,
//! a variable registry, and frame algebra (select, lag, difference,
//! demean-by-group).
//!
//! Frames are immutable after construction; every operation returns a new
//! frame. Keys are kept in deterministic (country, industry, year) order so
//! downstream matrix builds are reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Admissible 2-digit ISIC manufacturing branch codes (23 branches).
pub const ISIC_BRANCHES: [&str; 23] = [
    "15", "16", "17", "18", "19", "20", "21", "22", "23", "24", "25", "26", "27", "28", "29",
    "30", "31", "32", "33", "34", "35", "36", "37",
];

pub const YEAR_MIN: i32 = 1990;
pub const YEAR_MAX: i32 = 2100;

/// Observation key: (country, industry, year).
///
/// Country-level frames (no industry dimension) use an empty industry code;
/// branch-code validity is enforced at ingestion, not here.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsKey {
    pub country: String,
    pub industry: String,
    pub year: i32,
}

impl ObsKey {
    pub fn new(country: impl Into<String>, industry: impl Into<String>, year: i32) -> Result<Self> {
        let country = country.into();
        let industry = industry.into();
        if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
            return Err(Error::InvalidKey(format!(
                "year {year} outside [{YEAR_MIN}, {YEAR_MAX}] for ({country}, {industry})"
            )));
        }
        if country.is_empty() {
            return Err(Error::InvalidKey("empty country code".into()));
        }
        Ok(ObsKey {
            country,
            industry,
            year,
        })
    }

    /// Key for country-level data (no industry dimension).
    pub fn country_level(country: impl Into<String>, year: i32) -> Result<Self> {
        ObsKey::new(country, "", year)
    }
}

impl fmt::Display for ObsKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.industry.is_empty() {
            write!(f, "({}, {})", self.country, self.year)
        } else {
            write!(f, "({}, {}, {})", self.country, self.industry, self.year)
        }
    }
}

/// Grouping dimension for demeaning, clustering, and dummy generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Country,
    Industry,
    Year,
    CountryIndustry,
}

impl Dimension {
    pub fn label_for(self, key: &ObsKey) -> String {
        match self {
            Dimension::Country => key.country.clone(),
            Dimension::Industry => key.industry.clone(),
            Dimension::Year => key.year.to_string(),
            Dimension::CountryIndustry => format!("{}\u{1f}{}", key.country, key.industry),
        }
    }
}

/// Nonempty set of grouping dimensions; the group cell of an observation is
/// the tuple of its dimension labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    dimensions: Vec<Dimension>,
}

impl GroupSpec {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::Spec("group spec must name at least one dimension".into()));
        }
        let mut dims = dimensions;
        dims.sort();
        dims.dedup();
        Ok(GroupSpec { dimensions: dims })
    }

    pub fn country_industry() -> Self {
        GroupSpec {
            dimensions: vec![Dimension::CountryIndustry],
        }
    }

    pub fn industry() -> Self {
        GroupSpec {
            dimensions: vec![Dimension::Industry],
        }
    }

    pub fn year() -> Self {
        GroupSpec {
            dimensions: vec![Dimension::Year],
        }
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    /// Cell label of one observation under this grouping.
    pub fn cell(&self, key: &ObsKey) -> String {
        let mut parts = Vec::with_capacity(self.dimensions.len());
        for d in &self.dimensions {
            parts.push(d.label_for(key));
        }
        parts.join("\u{1e}")
    }
}

/// Rectangularizable collection of observations keyed by (country, industry,
/// year) carrying named numeric variables. Missing is an explicit per-cell
/// state; stored values are always finite.
#[derive(Debug, Clone, Default)]
pub struct PanelFrame {
    keys: Vec<ObsKey>,
    variables: BTreeMap<String, Vec<Option<f64>>>,
}

impl PanelFrame {
    /// Build a frame from sorted-or-not keys; keys are deduplicated-checked
    /// and stored in (country, industry, year) order.
    pub fn new(mut keys: Vec<ObsKey>) -> Result<Self> {
        keys.sort();
        for w in keys.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateKey(w[0].to_string()));
            }
        }
        Ok(PanelFrame {
            keys,
            variables: BTreeMap::new(),
        })
    }

    pub fn n_obs(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[ObsKey] {
        &self.keys
    }

    pub fn variable_names(&self) -> Vec<&str> {
        self.variables.keys().map(|s| s.as_str()).collect()
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.variables.contains_key(name)
    }

    /// Column of values aligned with `keys()`.
    pub fn column(&self, name: &str) -> Result<&[Option<f64>]> {
        self.variables
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn index_of(&self, key: &ObsKey) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }

    pub fn value(&self, name: &str, key: &ObsKey) -> Result<Option<f64>> {
        let col = self.column(name)?;
        Ok(self.index_of(key).and_then(|i| col[i]))
    }

    /// Attach a full column. Non-finite entries are rejected; use `None` for
    /// missing cells.
    pub fn with_column(mut self, name: impl Into<String>, values: Vec<Option<f64>>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.keys.len() {
            return Err(Error::Spec(format!(
                "column '{}' has {} values for {} keys",
                name,
                values.len(),
                self.keys.len()
            )));
        }
        if let Some(bad) = values.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::Spec(format!(
                "column '{name}' contains non-finite value {bad}; encode missing as an explicit state"
            )));
        }
        self.variables.insert(name, values);
        Ok(self)
    }

    /// Attach a column given sparse (key, value) pairs; unlisted keys are missing.
    pub fn with_sparse_column<I>(self, name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ObsKey, f64)>,
    {
        let mut values = vec![None; self.keys.len()];
        for (key, v) in entries {
            if let Some(i) = self.keys.binary_search(&key).ok() {
                values[i] = Some(v);
            }
        }
        self.with_column(name, values)
    }

    /// New frame restricted to the named variables.
    pub fn select(&self, names: &[&str]) -> Result<PanelFrame> {
        let mut out = PanelFrame {
            keys: self.keys.clone(),
            variables: BTreeMap::new(),
        };
        for &name in names {
            let col = self.column(name)?;
            out.variables.insert(name.to_string(), col.to_vec());
        }
        Ok(out)
    }

    /// Lagged variable: value at (c, i, t) equals the source value at
    /// (c, i, t−k). Year alignment is strict; a gap year yields missing.
    /// The new column is named `{var}_lag_{k}`.
    pub fn lag(&self, var: &str, k: u32) -> Result<PanelFrame> {
        if k == 0 {
            return Err(Error::Spec("lag order must be >= 1".into()));
        }
        let col = self.column(var)?;
        let mut values = vec![None; self.keys.len()];
        for (i, key) in self.keys.iter().enumerate() {
            let source = ObsKey {
                country: key.country.clone(),
                industry: key.industry.clone(),
                year: key.year - k as i32,
            };
            if let Some(j) = self.index_of(&source) {
                values[i] = col[j];
            }
        }
        let mut out = self.clone();
        out.variables.insert(format!("{var}_lag_{k}"), values);
        Ok(out)
    }

    /// First difference over k years within (country, industry), strict year
    /// alignment. The new column is named `{var}_diff_{k}`.
    pub fn difference(&self, var: &str, k: u32) -> Result<PanelFrame> {
        if k == 0 {
            return Err(Error::Spec("difference order must be >= 1".into()));
        }
        let col = self.column(var)?;
        let mut values = vec![None; self.keys.len()];
        for (i, key) in self.keys.iter().enumerate() {
            let source = ObsKey {
                country: key.country.clone(),
                industry: key.industry.clone(),
                year: key.year - k as i32,
            };
            if let (Some(cur), Some(j)) = (col[i], self.index_of(&source)) {
                if let Some(prev) = col[j] {
                    values[i] = Some(cur - prev);
                }
            }
        }
        let mut out = self.clone();
        out.variables.insert(format!("{var}_diff_{k}"), values);
        Ok(out)
    }

    /// Replace each value by value minus its group-cell mean over non-missing
    /// entries. The demeaned column replaces the original name in the
    /// returned frame.
    pub fn group_demean(&self, var: &str, groups: &GroupSpec) -> Result<PanelFrame> {
        let col = self.column(var)?;
        let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for (i, key) in self.keys.iter().enumerate() {
            if let Some(v) = col[i] {
                let e = sums.entry(groups.cell(key)).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        let mut values = vec![None; self.keys.len()];
        for (i, key) in self.keys.iter().enumerate() {
            if let Some(v) = col[i] {
                let (sum, n) = sums[&groups.cell(key)];
                values[i] = Some(v - sum / n as f64);
            }
        }
        let mut out = self.clone();
        out.variables.insert(var.to_string(), values);
        Ok(out)
    }

    /// Group cell label per observation (for clustering and dummies).
    pub fn cells(&self, groups: &GroupSpec) -> Vec<String> {
        self.keys.iter().map(|k| groups.cell(k)).collect()
    }

    /// Per-(country, industry) map from year to value, for reduction rules.
    pub fn series_by_unit(&self, var: &str) -> Result<BTreeMap<(String, String), BTreeMap<i32, f64>>> {
        let col = self.column(var)?;
        let mut out: BTreeMap<(String, String), BTreeMap<i32, f64>> = BTreeMap::new();
        for (i, key) in self.keys.iter().enumerate() {
            if let Some(v) = col[i] {
                out.entry((key.country.clone(), key.industry.clone()))
                    .or_default()
                    .insert(key.year, v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with_series(entries: &[(i32, f64)]) -> PanelFrame {
        let keys: Vec<ObsKey> = entries
            .iter()
            .map(|(y, _)| ObsKey::new("MKD", "15", *y).unwrap())
            .collect();
        let frame = PanelFrame::new(keys.clone()).unwrap();
        frame
            .with_sparse_column(
                "x",
                entries
                    .iter()
                    .map(|(y, v)| (ObsKey::new("MKD", "15", *y).unwrap(), *v)),
            )
            .unwrap()
    }

    #[test]
    fn lag_shifts_by_one_year() {
        let f = frame_with_series(&[(2018, 5.0), (2019, 7.0)]);
        let g = f.lag("x", 1).unwrap();
        let k18 = ObsKey::new("MKD", "15", 2018).unwrap();
        let k19 = ObsKey::new("MKD", "15", 2019).unwrap();
        assert_eq!(g.value("x_lag_1", &k19).unwrap(), Some(5.0));
        assert_eq!(g.value("x_lag_1", &k18).unwrap(), None);
    }

    #[test]
    fn lag_of_constant_is_constant_on_overlap() {
        let f = frame_with_series(&[(2000, 3.0), (2001, 3.0), (2002, 3.0), (2003, 3.0)]);
        for k in 1..=3u32 {
            let g = f.lag("x", k).unwrap();
            let col = g.column(&format!("x_lag_{k}")).unwrap();
            for (i, key) in g.keys().iter().enumerate() {
                if key.year - k as i32 >= 2000 {
                    assert_eq!(col[i], Some(3.0));
                } else {
                    assert_eq!(col[i], None);
                }
            }
        }
    }

    #[test]
    fn lag_respects_year_gaps() {
        // 2018 absent, so the 1-year lag at 2019 must be missing.
        let f = frame_with_series(&[(2017, 3.0), (2019, 4.0)]);
        let g = f.lag("x", 1).unwrap();
        let k19 = ObsKey::new("MKD", "15", 2019).unwrap();
        assert_eq!(g.value("x_lag_1", &k19).unwrap(), None);
        // Hand-enumerated: only 2019 could carry a value if 2018 existed.
        let col = g.column("x_lag_1").unwrap();
        assert!(col.iter().all(|v| v.is_none()));
    }

    #[test]
    fn lag_unknown_variable_errors() {
        let f = frame_with_series(&[(2018, 5.0)]);
        assert!(matches!(f.lag("nope", 1), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn demean_removes_group_mean() {
        let keys = vec![
            ObsKey::new("AAA", "15", 2000).unwrap(),
            ObsKey::new("AAA", "15", 2001).unwrap(),
        ];
        let f = PanelFrame::new(keys.clone())
            .unwrap()
            .with_column("x", vec![Some(2.0), Some(4.0)])
            .unwrap();
        let g = f
            .group_demean("x", &GroupSpec::country_industry())
            .unwrap();
        assert_eq!(g.value("x", &keys[0]).unwrap(), Some(-1.0));
        assert_eq!(g.value("x", &keys[1]).unwrap(), Some(1.0));
    }

    #[test]
    fn demean_singleton_group_is_zero() {
        let keys = vec![ObsKey::new("AAA", "15", 2000).unwrap()];
        let f = PanelFrame::new(keys.clone())
            .unwrap()
            .with_column("x", vec![Some(7.5)])
            .unwrap();
        let g = f.group_demean("x", &GroupSpec::country_industry()).unwrap();
        assert_eq!(g.value("x", &keys[0]).unwrap(), Some(0.0));
    }

    #[test]
    fn demean_two_groups_uses_per_group_means() {
        let keys = vec![
            ObsKey::new("AAA", "15", 2000).unwrap(),
            ObsKey::new("AAA", "15", 2001).unwrap(),
            ObsKey::new("BBB", "15", 2000).unwrap(),
        ];
        let f = PanelFrame::new(keys.clone())
            .unwrap()
            .with_column("x", vec![Some(1.0), Some(3.0), Some(10.0)])
            .unwrap();
        // Per-group means 2 and 10 by hand.
        let g = f.group_demean("x", &GroupSpec::country_industry()).unwrap();
        assert_eq!(g.value("x", &keys[0]).unwrap(), Some(-1.0));
        assert_eq!(g.value("x", &keys[1]).unwrap(), Some(1.0));
        assert_eq!(g.value("x", &keys[2]).unwrap(), Some(0.0));
    }

    #[test]
    fn duplicate_keys_rejected() {
        let keys = vec![
            ObsKey::new("MKD", "15", 2019).unwrap(),
            ObsKey::new("MKD", "15", 2019).unwrap(),
        ];
        assert!(matches!(PanelFrame::new(keys), Err(Error::DuplicateKey(_))));
    }

    #[test]
    fn year_range_enforced() {
        assert!(ObsKey::new("MKD", "15", 1989).is_err());
        assert!(ObsKey::new("MKD", "15", 2101).is_err());
        assert!(ObsKey::new("MKD", "15", 1990).is_ok());
    }

    #[test]
    fn nonfinite_values_rejected() {
        let keys = vec![ObsKey::new("MKD", "15", 2019).unwrap()];
        let f = PanelFrame::new(keys).unwrap();
        assert!(f.with_column("x", vec![Some(f64::NAN)]).is_err());
    }
}
