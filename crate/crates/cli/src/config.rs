//! Flat `key = value` run configuration.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use dunkl_ou::inequalities::{battery, Settings, Suite, Tolerances};
use dunkl_ou::kernel::DEFAULT_PRECISION_DIGITS;
use dunkl_ou::quadrature::DEFAULT_ORDER;
use dunkl_ou::rational::{self, Rational};
use dunkl_ou::{Error, GroupSpec, Polynomial, Result};

pub const MAX_TAYLOR_TERMS: usize = 60;

pub const KEYS: [&str; 17] = [
    "group",
    "k",
    "quad_order",
    "precision_digits",
    "t",
    "seed",
    "battery_size",
    "tol_symbolic",
    "tol_quadrature",
    "tol_compound",
    "jobs",
    "out_json",
    "out_csv",
    "suite",
    "function",
    "terms",
    "tol",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub group: GroupSpec,
    /// Multiplicity grid of the sweep; each value is applied to every orbit.
    pub k_grid: Vec<Rational>,
    pub quad_order: usize,
    pub precision_digits: u32,
    pub t_grid: Vec<f64>,
    pub seed: u64,
    pub battery_size: usize,
    pub tolerances: Tolerances,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    pub out_json: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub suite: Suite,
    /// Polynomial for the Taylor table.
    pub function: String,
    pub terms: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let settings = Settings::default();
        RunConfig {
            group: "rank1:k=1".parse().expect("default group parses"),
            k_grid: vec![rational::int(0), rational::ratio(1, 2), rational::int(1), rational::int(2)],
            quad_order: DEFAULT_ORDER,
            precision_digits: DEFAULT_PRECISION_DIGITS,
            t_grid: settings.t_grid,
            seed: battery::DEFAULT_SEED,
            battery_size: battery::DEFAULT_SIZE,
            tolerances: Tolerances::default(),
            jobs: 0,
            out_json: None,
            out_csv: None,
            suite: Suite::All,
            function: "x1".into(),
            terms: 30,
        }
    }
}

fn bad(key: &str, value: &str, why: impl fmt::Display) -> Error {
    Error::Parse(format!("{key} = {value:?}: {why}"))
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

fn positive_float(key: &str, value: &str) -> Result<f64> {
    let v: f64 = number(key, value)?;
    if !(v.is_finite() && v > 0.0) {
        return Err(bad(key, value, "expected a positive number"));
    }
    Ok(v)
}

fn list<T>(key: &str, value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = value.split(',').map(|s| item(s.trim())).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(bad(key, value, "empty list"));
    }
    Ok(items)
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl RunConfig {
    /// Sets one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "group" => self.group = value.parse()?,
            "k" => {
                self.k_grid = list(key, value, |s| {
                    let k = rational::parse(s)?;
                    if k < Rational::from_integer(0.into()) {
                        return Err(bad(key, s, "multiplicities must be nonnegative"));
                    }
                    Ok(k)
                })?
            }
            "quad_order" => {
                self.quad_order = number(key, value)?;
                if self.quad_order < 2 {
                    return Err(bad(key, value, "order must be at least 2"));
                }
            }
            "precision_digits" => {
                self.precision_digits = number(key, value)?;
                if self.precision_digits == 0 {
                    return Err(bad(key, value, "precision must be positive"));
                }
            }
            "t" => {
                self.t_grid = list(key, value, |s| {
                    let t: f64 = number(key, s)?;
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(bad(key, s, "times must be finite and nonnegative"));
                    }
                    Ok(t)
                })?
            }
            "seed" => self.seed = number(key, value)?,
            "battery_size" => self.battery_size = number(key, value)?,
            "tol" => self.tolerances = Tolerances::uniform(positive_float(key, value)?),
            "tol_symbolic" => self.tolerances.symbolic = positive_float(key, value)?,
            "tol_quadrature" => self.tolerances.quadrature = positive_float(key, value)?,
            "tol_compound" => self.tolerances.compound = positive_float(key, value)?,
            "jobs" => self.jobs = number(key, value)?,
            "out_json" => self.out_json = path(value),
            "out_csv" => self.out_csv = path(value),
            "suite" => self.suite = value.parse()?,
            "function" => {
                if value.is_empty() {
                    return Err(bad(key, value, "empty polynomial"));
                }
                self.function = value.to_string()
            }
            "terms" => {
                self.terms = number(key, value)?;
                if self.terms > MAX_TAYLOR_TERMS {
                    return Err(bad(key, value, format!("at most {MAX_TAYLOR_TERMS} terms")));
                }
            }
            _ => return Err(Error::Parse(format!("unknown key {key:?}, expected one of {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// The test polynomial, parsed in the group's dimension.
    pub fn polynomial(&self) -> Result<Polynomial> {
        Polynomial::parse(&self.function, self.group.kind.dimension())
    }

    pub fn settings(&self) -> Settings {
        Settings {
            order: self.quad_order,
            digits: self.precision_digits,
            t_grid: self.t_grid.clone(),
            seed: self.seed,
            battery_size: self.battery_size,
            tolerances: self.tolerances,
            ..Settings::default()
        }
    }

    /// Checks that need the group as a whole.
    pub fn validate(&self) -> Result<()> {
        self.group.build()?;
        self.polynomial()?;
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    /// Defaults overridden by the given lines.
    fn from_str(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

/// Canonical text: every key except the `tol` shorthand, in a fixed order.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(s, "group = {}", self.group);
        let _ = writeln!(s, "k = {}", join(&self.k_grid, rational::format));
        let _ = writeln!(s, "quad_order = {}", self.quad_order);
        let _ = writeln!(s, "precision_digits = {}", self.precision_digits);
        let _ = writeln!(s, "t = {}", join(&self.t_grid, |t| t.to_string()));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "battery_size = {}", self.battery_size);
        let _ = writeln!(s, "tol_symbolic = {:e}", self.tolerances.symbolic);
        let _ = writeln!(s, "tol_quadrature = {:e}", self.tolerances.quadrature);
        let _ = writeln!(s, "tol_compound = {:e}", self.tolerances.compound);
        let _ = writeln!(s, "jobs = {}", self.jobs);
        let _ = writeln!(s, "out_json = {}", show_path(&self.out_json));
        let _ = writeln!(s, "out_csv = {}", show_path(&self.out_csv));
        let _ = writeln!(s, "suite = {}", self.suite);
        let _ = writeln!(s, "function = {}", self.function);
        let _ = writeln!(s, "terms = {}", self.terms);
        f.write_str(&s)
    }
}
