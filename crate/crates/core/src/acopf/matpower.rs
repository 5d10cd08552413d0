//! Matpower `.m` case files.
//!
//! Only the numeric matrices `bus`, `gen`, `branch` and `gencost` and the
//! scalar `baseMVA` are read. Everything is converted to per-unit on load.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    /// Bus number as written in the file.
    pub id: usize,
    /// 1 = PQ, 2 = PV, 3 = reference, 4 = isolated.
    pub kind: u8,
    /// Demand `Pd + iQd`, per-unit.
    pub load: Complex64,
    /// Shunt admittance `Gs + iBs`, per-unit.
    pub shunt: Complex64,
    pub vmin: f64,
    pub vmax: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    /// Index into [`NetworkCase::buses`].
    pub bus: usize,
    /// Lower bounds `Pmin + iQmin`, per-unit.
    pub smin: Complex64,
    /// Upper bounds `Pmax + iQmax`, per-unit.
    pub smax: Complex64,
    /// `[c2, c1, c0]` with the cost `c2 P² + c1 P + c0` for `P` in MW.
    pub cost: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    /// Series admittance `1 / (r + ix)`.
    pub y: Complex64,
    /// Total line charging susceptance.
    pub charging: f64,
    /// `tap · e^{i·shift}`.
    pub tap: Complex64,
    /// Apparent power limit, per-unit.
    pub rate: Option<f64>,
    /// Angle difference bounds in degrees; `None` means unbounded.
    pub angmin: Option<f64>,
    pub angmax: Option<f64>,
}

/// An AC power network with at most one generator per bus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkCase {
    pub name: String,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub branches: Vec<Branch>,
    /// Index of the reference bus.
    pub reference: usize,
}

impl NetworkCase {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut case = parse_matpower(&text)?;
        if case.name.is_empty() {
            if let Some(stem) = path.file_stem() {
                case.name = stem.to_string_lossy().into_owned();
            }
        }
        Ok(case)
    }

    /// Generator attached to bus `i`, if any.
    pub fn generator_at(&self, i: usize) -> Option<&Generator> {
        self.generators.iter().find(|g| g.bus == i)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(k) => &line[..k],
        None => line,
    }
}

/// Collects `mpc.<name> = <value>` assignments. Matrix values keep their
/// raw text between the brackets.
fn assignments(text: &str) -> HashMap<String, String> {
    let mut out = HashMap::new();
    let mut lines = text.lines().map(strip_comment);
    while let Some(line) = lines.next() {
        let Some(rest) = line.trim().strip_prefix("mpc.") else {
            continue;
        };
        let Some((name, value)) = rest.split_once('=') else {
            continue;
        };
        let name = name.trim().to_string();
        let value = value.trim();
        if let Some(body) = value.strip_prefix('[') {
            let mut buf = String::new();
            let mut cur = body.to_string();
            loop {
                if let Some(k) = cur.find(']') {
                    buf.push_str(&cur[..k]);
                    break;
                }
                buf.push_str(&cur);
                buf.push('\n');
                match lines.next() {
                    Some(l) => cur = l.to_string(),
                    None => break,
                }
            }
            out.insert(name, buf);
        } else {
            out.insert(name, value.trim_end_matches(';').trim().to_string());
        }
    }
    out
}

fn matrix(vars: &HashMap<String, String>, name: &str) -> Result<Vec<Vec<f64>>> {
    let body = vars
        .get(name)
        .ok_or_else(|| Error::Parse(format!("missing matrix mpc.{name}")))?;
    let mut rows = Vec::new();
    for row in body.split([';', '\n']) {
        let vals: Vec<f64> = row
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("mpc.{name}: bad number '{t}'")))
            })
            .collect::<Result<_>>()?;
        if !vals.is_empty() {
            rows.push(vals);
        }
    }
    Ok(rows)
}

fn need(row: &[f64], cols: usize, what: &str, k: usize) -> Result<()> {
    if row.len() < cols {
        return Err(Error::Parse(format!(
            "{what} row {} has {} columns, expected at least {cols}",
            k + 1,
            row.len()
        )));
    }
    Ok(())
}

/// Parses the Matpower case subset into per-unit data.
pub fn parse_matpower(text: &str) -> Result<NetworkCase> {
    let vars = assignments(text);
    let name = text
        .lines()
        .map(strip_comment)
        .find_map(|l| {
            let l = l.trim().strip_prefix("function")?;
            Some(l.split('=').nth(1)?.trim().to_string())
        })
        .unwrap_or_default();
    let base: f64 = vars
        .get("baseMVA")
        .ok_or_else(|| Error::Parse("missing mpc.baseMVA".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad mpc.baseMVA".into()))?;
    if !(base > 0.0) {
        return Err(Error::Network(format!(
            "baseMVA must be positive, got {base}"
        )));
    }
    let bus_rows = matrix(&vars, "bus")?;
    let gen_rows = matrix(&vars, "gen")?;
    let branch_rows = matrix(&vars, "branch")?;
    let cost_rows = matrix(&vars, "gencost")?;

    let mut buses = Vec::new();
    let mut index = HashMap::new();
    let mut reference = None;
    for (k, r) in bus_rows.iter().enumerate() {
        need(r, 13, "bus", k)?;
        let kind = r[1] as u8;
        if kind == 4 {
            continue;
        }
        let id = r[0] as usize;
        let (vmax, vmin) = (r[11], r[12]);
        if vmin > vmax || vmin < 0.0 {
            return Err(Error::Network(format!(
                "bus {id}: bad voltage bounds [{vmin}, {vmax}]"
            )));
        }
        if index.insert(id, buses.len()).is_some() {
            return Err(Error::Network(format!("duplicate bus number {id}")));
        }
        if kind == 3 {
            reference.get_or_insert(buses.len());
        }
        buses.push(Bus {
            id,
            kind,
            load: Complex64::new(r[2], r[3]) / base,
            shunt: Complex64::new(r[4], r[5]) / base,
            vmin,
            vmax,
        });
    }
    let reference = reference.ok_or_else(|| Error::Network("no reference bus".into()))?;
    let bus_index = |id: f64, what: &str| -> Result<usize> {
        index
            .get(&(id as usize))
            .copied()
            .ok_or_else(|| Error::Network(format!("{what} refers to unknown bus {id}")))
    };

    if cost_rows.len() < gen_rows.len() {
        return Err(Error::Parse(format!(
            "mpc.gencost has {} rows for {} generators",
            cost_rows.len(),
            gen_rows.len()
        )));
    }
    let mut generators: Vec<Generator> = Vec::new();
    for (k, (r, c)) in gen_rows.iter().zip(&cost_rows).enumerate() {
        need(r, 10, "gen", k)?;
        if r[7] <= 0.0 {
            continue;
        }
        let bus = bus_index(r[0], "generator")?;
        if generators.iter().any(|g| g.bus == bus) {
            return Err(Error::Network(format!(
                "bus {} has more than one generator",
                buses[bus].id
            )));
        }
        need(c, 4, "gencost", k)?;
        if c[0] as i64 != 2 {
            return Err(Error::Network(format!(
                "generator {}: only polynomial cost models are supported",
                k + 1
            )));
        }
        let ncoef = c[3] as usize;
        if ncoef > 3 {
            return Err(Error::Network(format!(
                "generator {}: cost of degree {} exceeds 2",
                k + 1,
                ncoef - 1
            )));
        }
        need(c, 4 + ncoef, "gencost", k)?;
        // highest degree first in the file
        let mut cost = [0.0; 3];
        for (d, &v) in c[4..4 + ncoef].iter().rev().enumerate() {
            cost[2 - d] = v;
        }
        let (pmin, pmax, qmin, qmax) = (r[9], r[8], r[4], r[3]);
        if pmin > pmax || qmin > qmax {
            return Err(Error::Network(format!(
                "generator {}: bounds out of order",
                k + 1
            )));
        }
        generators.push(Generator {
            bus,
            smin: Complex64::new(pmin, qmin) / base,
            smax: Complex64::new(pmax, qmax) / base,
            cost,
        });
    }

    let mut branches = Vec::new();
    for (k, r) in branch_rows.iter().enumerate() {
        need(r, 11, "branch", k)?;
        if r[10] <= 0.0 {
            continue;
        }
        let (from, to) = (bus_index(r[0], "branch")?, bus_index(r[1], "branch")?);
        let z = Complex64::new(r[2], r[3]);
        if z.norm_sqr() == 0.0 {
            return Err(Error::Network(format!("branch {}: zero impedance", k + 1)));
        }
        let ratio = if r[8] == 0.0 { 1.0 } else { r[8] };
        let tap = Complex64::from_polar(ratio, r[9].to_radians());
        let rate = (r[5] > 0.0).then(|| r[5] / base);
        // Matpower ignores zero and ±360 angle bounds
        let (angmin, angmax) = if r.len() >= 13 {
            (
                (r[11] != 0.0 && r[11] > -360.0).then_some(r[11]),
                (r[12] != 0.0 && r[12] < 360.0).then_some(r[12]),
            )
        } else {
            (None, None)
        };
        if let (Some(lo), Some(hi)) = (angmin, angmax) {
            if lo > hi {
                return Err(Error::Network(format!(
                    "branch {}: angle bounds out of order",
                    k + 1
                )));
            }
        }
        branches.push(Branch {
            from,
            to,
            y: z.inv(),
            charging: r[4],
            tap,
            rate,
            angmin,
            angmax,
        });
    }
    Ok(NetworkCase {
        name,
        base_mva: base,
        buses,
        generators,
        branches,
        reference,
    })
}
