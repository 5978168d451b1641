//! Run settings gathered from a key=value file and command-line flags.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use asymtop::verify::{Check, Tolerances};
use asymtop::{Route, TopParams};
use clap::{ArgMatches, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: TopParams,
    pub jmax: u32,
    pub routes: Vec<Route>,
    pub tolerances: Tolerances,
    pub format: Format,
    pub seed: u64,
}

/// Partially specified settings; later layers override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub jmax: Option<u32>,
    pub routes: Option<String>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tol_all: Option<f64>,
    pub tols: Vec<(Check, f64)>,
}

pub fn tol_flag(check: Check) -> String {
    format!("tol-{}", check.name())
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("bad value '{value}' for {key}"))
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut out = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            out.set(key.trim().trim_start_matches("--"), value)
                .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
        }
        Ok(out)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "A" => self.a = Some(parse(key, value)?),
            "B" => self.b = Some(parse(key, value)?),
            "C" => self.c = Some(parse(key, value)?),
            "jmax" => self.jmax = Some(parse(key, value)?),
            "routes" => self.routes = Some(value.trim().to_string()),
            "seed" => self.seed = Some(parse(key, value)?),
            "format" => self.format = Some(Format::from_str(value.trim(), true)?),
            "tol-all" => self.tol_all = Some(parse(key, value)?),
            _ => {
                let name = key.strip_prefix("tol-").ok_or_else(|| format!("unknown key '{key}'"))?;
                let check: Check = name.parse().map_err(|_| format!("unknown key '{key}'"))?;
                self.tols.push((check, parse(key, value)?));
            }
        }
        Ok(())
    }

    /// Settings given explicitly on the command line.
    pub fn from_matches(m: &ArgMatches) -> Self {
        let tols = Check::ALL
            .into_iter()
            .filter_map(|c| m.get_one::<f64>(c.name()).map(|v| (c, *v)))
            .collect();
        Settings {
            a: m.get_one::<f64>("A").copied(),
            b: m.get_one::<f64>("B").copied(),
            c: m.get_one::<f64>("C").copied(),
            jmax: m.get_one::<u32>("jmax").copied(),
            routes: m.get_one::<String>("routes").cloned(),
            format: m.get_one::<Format>("format").copied(),
            seed: m.get_one::<u64>("seed").copied(),
            tol_all: m.get_one::<f64>("tol_all").copied(),
            tols,
        }
    }

    pub fn resolve(file: Settings, flags: Settings) -> Result<RunConfig, String> {
        let params = TopParams::new(
            flags.a.or(file.a).unwrap_or(3.0),
            flags.b.or(file.b).unwrap_or(2.0),
            flags.c.or(file.c).unwrap_or(1.0),
        )
        .map_err(|e| e.to_string())?;
        let routes = match flags.routes.as_ref().or(file.routes.as_ref()) {
            None => Route::ALL.to_vec(),
            Some(list) => parse_routes(list)?,
        };
        let mut tolerances = Tolerances::default();
        for layer in [&file, &flags] {
            if let Some(t) = layer.tol_all {
                tolerances.set_all(t).map_err(|e| e.to_string())?;
            }
            for &(check, t) in &layer.tols {
                tolerances.set(check, t).map_err(|e| e.to_string())?;
            }
        }
        Ok(RunConfig {
            params,
            jmax: flags.jmax.or(file.jmax).unwrap_or(4),
            routes,
            tolerances,
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            seed: flags.seed.or(file.seed).unwrap_or(42),
        })
    }
}

fn parse_routes(list: &str) -> Result<Vec<Route>, String> {
    let mut routes = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let r: Route = part.parse().map_err(|e: asymtop::Error| e.to_string())?;
        if !routes.contains(&r) {
            routes.push(r);
        }
    }
    if routes.is_empty() {
        return Err("at least one route is required".into());
    }
    routes.sort_by_key(|r| Route::ALL.iter().position(|x| x == r));
    Ok(routes)
}
