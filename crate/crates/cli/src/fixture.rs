//! Fixture definitions in key=value form.

use std::collections::BTreeMap;
use std::path::Path;

use isogap::geometry::ConvexBody;
use isogap::measures::Measure1D;
use isogap::spectral::Domain;

use crate::error::CliError;

const BUILTIN: &str = include_str!("../fixtures/fixtures.kv");
const POTENTIAL_NODES: usize = 4001;
const MAX_NESTING: usize = 4;

pub type Params = BTreeMap<String, String>;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub params: Params,
    pub domain: Domain,
    /// Log-concave measure or uniform measure on a convex body.
    pub convex: bool,
    /// Closed-form values with relative tolerances.
    pub expect: BTreeMap<String, (f64, f64)>,
}

impl Fixture {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// The 1-D measure behind the fixture, if it is one.
    pub fn measure(&self) -> Option<&Measure1D> {
        match &self.domain {
            Domain::Measure(m) => Some(m),
            _ => None,
        }
    }

    pub fn body(&self) -> Option<&ConvexBody> {
        match &self.domain {
            Domain::Body(b) => Some(b),
            _ => None,
        }
    }

    pub fn factors(&self) -> Option<&[Domain]> {
        match &self.domain {
            Domain::Product(f) => Some(f),
            _ => None,
        }
    }

    /// Canonical text of the definition, used in config hashes.
    pub fn canonical(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Parses blocks of `key=value` lines. `#` starts a comment and blank lines
/// separate blocks.
pub fn parse(text: &str, origin: &str) -> Result<Vec<Params>, CliError> {
    let mut out = Vec::new();
    let mut cur = Params::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{origin}:{}: expected key=value", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Config(format!("{origin}:{}: empty key", i + 1)));
        }
        if cur.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("{origin}:{}: duplicate key {k}", i + 1)));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    for p in &out {
        if !p.contains_key("name") {
            return Err(CliError::Config(format!("{origin}: block without name")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    defs: BTreeMap<String, Params>,
}

impl Registry {
    pub fn builtin() -> Self {
        let mut r = Registry::default();
        r.add_text(BUILTIN, "builtin").expect("builtin fixtures parse");
        r
    }

    /// Adds every block of `text`, returning the names in file order.
    pub fn add_text(&mut self, text: &str, origin: &str) -> Result<Vec<String>, CliError> {
        let mut names = Vec::new();
        for p in parse(text, origin)? {
            let name = p["name"].clone();
            self.defs.insert(name.clone(), p);
            names.push(name);
        }
        Ok(names)
    }

    pub fn add_file(&mut self, path: &Path) -> Result<Vec<String>, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read fixture file {}: {e}", path.display())))?;
        self.add_text(&text, &path.display().to_string())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(|s| s.as_str())
    }

    /// A builtin or previously added name, or else a path to a fixture file
    /// (all of whose blocks are returned).
    pub fn lookup(&mut self, arg: &str) -> Result<Vec<Fixture>, CliError> {
        if self.defs.contains_key(arg) {
            return Ok(vec![self.resolve(arg)?]);
        }
        let path = Path::new(arg);
        if path.exists() {
            let names = self.add_file(path)?;
            return names.iter().map(|n| self.resolve(n)).collect();
        }
        Err(CliError::Config(format!("unknown fixture {arg}")))
    }

    pub fn resolve(&self, name: &str) -> Result<Fixture, CliError> {
        self.resolve_depth(name, 0)
    }

    fn resolve_depth(&self, name: &str, depth: usize) -> Result<Fixture, CliError> {
        if depth > MAX_NESTING {
            return Err(CliError::Config(format!("fixture {name}: products nested too deeply")));
        }
        let p = self.defs.get(name).ok_or_else(|| CliError::Config(format!("unknown fixture {name}")))?;
        let bad = |msg: String| CliError::Config(format!("fixture {name}: {msg}"));
        let kind = p.get("kind").ok_or_else(|| bad("missing kind".into()))?.as_str();
        let mut convex = true;
        let domain = match kind {
            "uniform" => Domain::Measure(Measure1D::uniform(num(p, "lo", None)?, num(p, "hi", None)?)?),
            "gaussian" => Domain::Measure(Measure1D::gaussian(num(p, "mean", Some(0.0))?, num(p, "sd", Some(1.0))?)?),
            "laplace" => Domain::Measure(Measure1D::laplace(num(p, "loc", Some(0.0))?, num(p, "scale", Some(1.0))?)?),
            "exponential" => Domain::Measure(Measure1D::exponential(num(p, "rate", Some(1.0))?)?),
            "potential" => {
                let a = num(p, "alpha", None)?;
                if !(a >= 1.0) {
                    return Err(bad(format!("alpha = {a} gives a non-convex potential")));
                }
                let f = move |x: f64| x.abs().powf(a) / a;
                Domain::Measure(Measure1D::from_potential(
                    f,
                    num(p, "lo", None)?,
                    num(p, "hi", None)?,
                    POTENTIAL_NODES,
                )?)
            }
            "counterexample" => {
                convex = false;
                let m = num(p, "m", Some(3.0))?;
                if m.fract() != 0.0 || m < 0.0 {
                    return Err(bad(format!("m = {m} is not a whole number")));
                }
                Domain::Measure(Measure1D::gap_counterexample(m as u32, true)?)
            }
            "interval" => Domain::Body(ConvexBody::interval(num(p, "lo", None)?, num(p, "hi", None)?)?),
            "box" => Domain::Body(ConvexBody::boxed(list(p, "lo")?, list(p, "hi")?)?),
            "ball" => Domain::Body(ConvexBody::ball(list(p, "center")?, num(p, "radius", Some(1.0))?)?),
            "lp_ball" => {
                let d = num(p, "dim", None)?;
                Domain::Body(ConvexBody::lp_ball(d as usize, num(p, "p", None)?, num(p, "radius", Some(1.0))?)?)
            }
            "polygon" => {
                let pts = p.get("points").ok_or_else(|| bad("missing points".into()))?;
                let mut v = Vec::new();
                for pair in pts.split(';') {
                    let (x, y) = pair.split_once(':').ok_or_else(|| bad(format!("bad point {pair}")))?;
                    v.push([parse_f64(x, "points")?, parse_f64(y, "points")?]);
                }
                Domain::Body(ConvexBody::polygon(&v)?)
            }
            "product" => {
                let names = p.get("factors").ok_or_else(|| bad("missing factors".into()))?;
                let mut doms = Vec::new();
                for n in names.split(',') {
                    let f = self.resolve_depth(n.trim(), depth + 1)?;
                    convex &= f.convex;
                    doms.push(f.domain);
                }
                if doms.len() < 2 {
                    return Err(bad("a product needs at least two factors".into()));
                }
                Domain::Product(doms)
            }
            other => return Err(bad(format!("unknown kind {other}"))),
        };
        if let Some(c) = p.get("convex") {
            convex = c.parse().map_err(|_| bad(format!("convex={c} is not a boolean")))?;
        }
        let mut expect = BTreeMap::new();
        for (k, v) in p {
            if let Some(q) = k.strip_prefix("expect.") {
                let tol = num(p, &format!("tol.{q}"), Some(1e-2))?;
                expect.insert(q.to_string(), (parse_f64(v, k)?, tol));
            }
        }
        let mut params = p.clone();
        if kind == "product" {
            // Inline the factor definitions so the hash covers them.
            for n in p["factors"].split(',') {
                let f = self.resolve_depth(n.trim(), depth + 1)?;
                for (k, v) in f.params {
                    params.insert(format!("factor.{}.{k}", n.trim()), v);
                }
            }
        }
        Ok(Fixture { name: name.to_string(), params, domain, convex, expect })
    }
}

fn parse_f64(s: &str, key: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {s:?} as a number")))
}

fn num(p: &Params, key: &str, default: Option<f64>) -> Result<f64, CliError> {
    match (p.get(key), default) {
        (Some(v), _) => parse_f64(v, key),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(CliError::Config(format!("fixture {}: missing {key}", p["name"]))),
    }
}

fn list(p: &Params, key: &str) -> Result<Vec<f64>, CliError> {
    let v = p.get(key).ok_or_else(|| CliError::Config(format!("fixture {}: missing {key}", p["name"])))?;
    v.split(',').map(|s| parse_f64(s, key)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        let r = Registry::builtin();
        for n in r.names() {
            let f = r.resolve(n).unwrap();
            assert_eq!(f.convex, n != "counterexample3", "{n}");
        }
        let g = r.resolve("gauss2").unwrap();
        assert_eq!(g.dim(), 2);
        assert!(g.params.contains_key("factor.gaussian1d.kind"));
        assert_eq!(r.resolve("uniform01").unwrap().expect["d_che"], (2.0, 5e-7));
    }

    #[test]
    fn parse_errors() {
        assert!(parse("name=a\nkind", "t").is_err());
        assert!(parse("name=a\nname=b", "t").is_err());
        assert!(parse("kind=box", "t").is_err());
        let mut r = Registry::default();
        r.add_text("name=x\nkind=box\nlo=0,0\nhi=1", "t").unwrap();
        assert!(r.resolve("x").is_err());
        r.add_text("name=y\nkind=warp", "t").unwrap();
        assert!(matches!(r.resolve("y"), Err(CliError::Config(_))));
        r.add_text("# comment\nname=z # trailing\nkind=uniform\nlo=0\nhi=3\n", "t").unwrap();
        assert!(r.resolve("z").is_ok());
        assert!(r.lookup("no_such_fixture").is_err());
    }
}
