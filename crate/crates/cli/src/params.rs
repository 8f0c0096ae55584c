//! `k=v,k=v` parameter maps, validated against a family's key set.

use std::collections::BTreeMap;

use clap::ValueEnum;
use skewcirc::circular::CircularModel;
use skewcirc::cylindrical::{CylindricalModel, GParetoParams};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sswc,
    Ssvm,
    Mc,
    Abeley,
    Gpareto,
}

impl FamilyArg {
    pub fn name(self) -> &'static str {
        match self {
            FamilyArg::Sswc => "sswc",
            FamilyArg::Ssvm => "ssvm",
            FamilyArg::Mc => "mc",
            FamilyArg::Abeley => "abeley",
            FamilyArg::Gpareto => "gpareto",
        }
    }

    pub fn keys(self) -> &'static [&'static str] {
        match self {
            FamilyArg::Sswc => &["mu", "rho", "lambda"],
            FamilyArg::Ssvm => &["mu", "kappa", "lambda"],
            FamilyArg::Mc => &["mu", "rho_alpha", "rho_bar", "xi"],
            FamilyArg::Abeley => &["alpha", "beta", "mu", "kappa", "lambda"],
            FamilyArg::Gpareto => &["sigma", "delta", "tau", "mu", "kappa", "lambda"],
        }
    }

    pub fn is_circular(self) -> bool {
        matches!(self, FamilyArg::Sswc | FamilyArg::Ssvm | FamilyArg::Mc)
    }
}

pub fn parse_map(text: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("expected key=value, got `{item}`")))?;
        let k = k.trim();
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("`{k}`: `{}` is not a number", v.trim())))?;
        if out.insert(k.to_string(), value).is_some() {
            return Err(CliError::Validation(format!("parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

/// Values for exactly `keys`, in order.
fn take(
    family: FamilyArg,
    map: &BTreeMap<String, f64>,
    keys: &[&'static str],
) -> Result<Vec<f64>, CliError> {
    if let Some(k) = map.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(CliError::Validation(format!(
            "unknown parameter `{k}` for family {} (expected {})",
            family.name(),
            keys.join(", ")
        )));
    }
    keys.iter()
        .map(|&k| {
            map.get(k).copied().ok_or_else(|| {
                CliError::Validation(format!("missing parameter `{k}` for family {}", family.name()))
            })
        })
        .collect()
}

pub fn circular(family: FamilyArg, text: &str) -> Result<CircularModel, CliError> {
    let map = parse_map(text)?;
    let v = take(family, &map, family.keys())?;
    let m = match family {
        FamilyArg::Sswc => CircularModel::sswc(v[0], v[1], v[2]),
        FamilyArg::Ssvm => CircularModel::ssvm(v[0], v[1], v[2]),
        FamilyArg::Mc => CircularModel::mc(v[0], v[1], v[2], v[3]),
        _ => {
            return Err(CliError::Validation(format!(
                "family {} is cylindrical; this command takes sswc, ssvm or mc",
                family.name()
            )))
        }
    };
    Ok(m?)
}

pub fn cylindrical(family: FamilyArg, text: &str) -> Result<CylindricalModel, CliError> {
    let map = parse_map(text)?;
    let v = take(family, &map, family.keys())?;
    let m = match family {
        FamilyArg::Abeley => CylindricalModel::abe_ley(v[0], v[1], v[2], v[3], v[4]),
        FamilyArg::Gpareto => CylindricalModel::gpareto(v[0], v[1], v[2], v[3], v[4], v[5]),
        _ => {
            return Err(CliError::Validation(format!(
                "family {} is circular; this command takes abeley or gpareto",
                family.name()
            )))
        }
    };
    Ok(m?)
}

/// Pareto-type parameters without `tau`, which the caller sweeps.
pub fn pareto_without_tau(text: &str) -> Result<[f64; 5], CliError> {
    let map = parse_map(text)?;
    let keys = ["sigma", "delta", "mu", "kappa", "lambda"];
    let v = take(FamilyArg::Gpareto, &map, &keys)?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

pub fn pareto(sigma_delta_mu_kappa_lambda: [f64; 5], tau: f64) -> Result<GParetoParams, CliError> {
    let [s, d, mu, k, l] = sigma_delta_mu_kappa_lambda;
    Ok(GParetoParams::new(s, d, tau, mu, k, l)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_and_missing_keys() {
        assert!(matches!(
            circular(FamilyArg::Sswc, "mu=0,rho=0.5,lambda=0.1,nu=2"),
            Err(CliError::Validation(m)) if m.contains("unknown parameter `nu`")
        ));
        assert!(matches!(
            circular(FamilyArg::Sswc, "mu=0,rho=0.5"),
            Err(CliError::Validation(m)) if m.contains("missing parameter `lambda`")
        ));
        assert!(circular(FamilyArg::Sswc, "mu=0,mu=1,rho=0.5,lambda=0").is_err());
        assert!(circular(FamilyArg::Abeley, "alpha=1").is_err());
    }

    #[test]
    fn out_of_space_names_the_bound() {
        let e = circular(FamilyArg::Sswc, "mu=0,rho=1.5,lambda=0").unwrap_err();
        assert!(matches!(&e, CliError::Validation(m) if m.contains("0 < rho < 1")), "{e:?}");
    }
}
