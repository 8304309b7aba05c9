//! JSON scenario and allocation files.
//!
//! A scenario holds `countries`, `relations` and an optional `utilities`
//! section. Writers emit the canonical form: countries sorted by label,
//! relations and utility entries sorted by label, rationals as `"num/den"`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::environment::{Country, CountryId, Environment, Relation};
use crate::error::{Error, Result};
use crate::mechanics::StrategyMatrix;
use crate::rational::{format_rational, rational_from_json, Rational};
use crate::utility::{PairValues, PairwiseTable, UtilityForm, UtilityModel};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    countries: Vec<RawCountry>,
    #[serde(default)]
    relations: Vec<RawRelation>,
    utilities: Option<RawUtilities>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCountry {
    label: String,
    power: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    a: String,
    b: String,
    sign: Relation,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUtilities {
    #[serde(default)]
    form: UtilityForm,
    #[serde(default)]
    pairs: Vec<RawPair>,
    #[serde(default, rename = "self")]
    own: Vec<RawOwn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    i: String,
    j: String,
    favorable: Value,
    unfavorable: Value,
    sign: Option<Relation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOwn {
    i: String,
    survive: Value,
    fail: Value,
}

fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

fn rational_at(value: &Value, location: String) -> Result<Rational> {
    rational_from_json(value).map_err(|source| Error::Rational { location, source })
}

fn lookup(env: &Environment, label: &str, location: &str) -> Result<CountryId> {
    env.id_of(label).ok_or_else(|| Error::UnknownLabel {
        location: location.to_string(),
        label: label.to_string(),
    })
}

fn relocate(e: Error, location: &str) -> Error {
    match e {
        Error::UtilityOrder {
            favorable,
            unfavorable,
            ..
        } => Error::UtilityOrder {
            location: location.to_string(),
            favorable,
            unfavorable,
        },
        other => other,
    }
}

fn build_environment(raw: &RawScenario) -> Result<Environment> {
    let countries = raw
        .countries
        .iter()
        .enumerate()
        .map(|(k, c)| {
            Ok(Country::new(
                c.label.clone(),
                rational_at(&c.power, format!("countries[{k}].power"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = Environment::new(countries.clone(), [])?;
    let relations = raw
        .relations
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let location = format!("relations[{k}]");
            Ok((
                lookup(&labels, &r.a, &location)?,
                lookup(&labels, &r.b, &location)?,
                r.sign,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Environment::new(countries, relations)
}

fn build_model(env: &Environment, raw: Option<&RawUtilities>) -> Result<UtilityModel> {
    let Some(raw) = raw else {
        return Ok(UtilityModel::default_for(env));
    };
    let mut table = PairwiseTable::new(env.len());
    let mut seen = BTreeSet::new();
    for (k, p) in raw.pairs.iter().enumerate() {
        let location = format!("utilities.pairs[{k}]");
        let i = lookup(env, &p.i, &location)?;
        let j = lookup(env, &p.j, &location)?;
        if i == j {
            return Err(Error::Malformed {
                location,
                message: format!("use `self` for the values of `{}` about itself", p.i),
            });
        }
        let sign = match p.sign.or_else(|| env.relation(i, j)) {
            Some(s) => s,
            None => {
                return Err(Error::Malformed {
                    location,
                    message: format!(
                        "`{}` and `{}` are unrelated, so the entry needs a `sign`",
                        p.i, p.j
                    ),
                })
            }
        };
        if !seen.insert((i, j, sign)) {
            return Err(Error::DuplicatePair {
                location,
                a: p.i.clone(),
                b: p.j.clone(),
            });
        }
        let values = PairValues::new(
            rational_at(&p.favorable, format!("{location}.favorable"))?,
            rational_at(&p.unfavorable, format!("{location}.unfavorable"))?,
        );
        table
            .set_pair(i, j, sign, values)
            .map_err(|e| relocate(e, &location))?;
    }
    let mut seen = BTreeSet::new();
    for (k, o) in raw.own.iter().enumerate() {
        let location = format!("utilities.self[{k}]");
        let i = lookup(env, &o.i, &location)?;
        if !seen.insert(i) {
            return Err(Error::DuplicatePair {
                location,
                a: o.i.clone(),
                b: o.i.clone(),
            });
        }
        let values = PairValues::new(
            rational_at(&o.survive, format!("{location}.survive"))?,
            rational_at(&o.fail, format!("{location}.fail"))?,
        );
        table
            .set_own(i, values)
            .map_err(|e| relocate(e, &location))?;
    }
    Ok(UtilityModel::new(table, raw.form))
}

/// Environment plus utility model; the default fixture when `utilities` is
/// absent.
pub fn parse_scenario(text: &str) -> Result<(Environment, UtilityModel)> {
    let raw: RawScenario = serde_json::from_str(text).map_err(malformed)?;
    let env = build_environment(&raw)?;
    let model = build_model(&env, raw.utilities.as_ref())?;
    Ok((env, model))
}

pub fn parse_environment(text: &str) -> Result<Environment> {
    parse_scenario(text).map(|(env, _)| env)
}

#[derive(Serialize)]
struct OutCountry<'a> {
    label: &'a str,
    power: String,
}

#[derive(Serialize)]
struct OutRelation<'a> {
    a: &'a str,
    b: &'a str,
    sign: Relation,
}

#[derive(Serialize)]
struct OutPair<'a> {
    i: &'a str,
    j: &'a str,
    sign: Relation,
    favorable: String,
    unfavorable: String,
}

#[derive(Serialize)]
struct OutOwn<'a> {
    i: &'a str,
    survive: String,
    fail: String,
}

#[derive(Serialize)]
struct OutUtilities<'a> {
    form: UtilityForm,
    pairs: Vec<OutPair<'a>>,
    #[serde(rename = "self")]
    own: Vec<OutOwn<'a>>,
}

#[derive(Serialize)]
struct OutScenario<'a> {
    countries: Vec<OutCountry<'a>>,
    relations: Vec<OutRelation<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    utilities: Option<OutUtilities<'a>>,
}

fn ordered(env: &Environment, a: CountryId, b: CountryId) -> (&str, &str) {
    let (x, y) = (env.label(a), env.label(b));
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Canonical JSON value of a scenario. Utility entries are written only when
/// they were set explicitly; `utilities` is omitted for the plain default.
pub fn scenario_to_value(env: &Environment, model: Option<&UtilityModel>) -> Value {
    let mut countries: Vec<_> = env
        .countries()
        .iter()
        .map(|c| OutCountry {
            label: &c.label,
            power: format_rational(&c.power),
        })
        .collect();
    countries.sort_by(|x, y| x.label.cmp(y.label));
    let mut relations: Vec<_> = env
        .relations()
        .map(|(a, b, sign)| {
            let (a, b) = ordered(env, a, b);
            OutRelation { a, b, sign }
        })
        .collect();
    relations.sort_by(|x, y| (x.a, x.b).cmp(&(y.a, y.b)));
    let utilities = model.and_then(|m| {
        let mut pairs: Vec<_> = m
            .table
            .explicit_pairs()
            .into_iter()
            .map(|(i, j, sign, v)| OutPair {
                i: env.label(i),
                j: env.label(j),
                sign,
                favorable: format_rational(&v.favorable),
                unfavorable: format_rational(&v.unfavorable),
            })
            .collect();
        pairs.sort_by(|x, y| (x.i, x.j, x.sign).cmp(&(y.i, y.j, y.sign)));
        let mut own: Vec<_> = m
            .table
            .explicit_own()
            .into_iter()
            .map(|(i, v)| OutOwn {
                i: env.label(i),
                survive: format_rational(&v.favorable),
                fail: format_rational(&v.unfavorable),
            })
            .collect();
        own.sort_by(|x, y| x.i.cmp(y.i));
        let plain = pairs.is_empty() && own.is_empty() && m.form == UtilityForm::default();
        (!plain).then_some(OutUtilities {
            form: m.form,
            pairs,
            own,
        })
    });
    serde_json::to_value(OutScenario {
        countries,
        relations,
        utilities,
    })
    .expect("scenario serializes")
}

/// Pretty-printed canonical scenario with a trailing newline.
pub fn write_scenario(env: &Environment, model: Option<&UtilityModel>) -> String {
    let mut s =
        serde_json::to_string_pretty(&scenario_to_value(env, model)).expect("scenario serializes");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAllocation {
    rows: BTreeMap<String, BTreeMap<String, Value>>,
}

/// Reads `{"rows": {label: {label: rational}}}` against `env`; omitted cells
/// are zero.
pub fn parse_allocation(env: &Environment, text: &str) -> Result<StrategyMatrix> {
    let raw: RawAllocation = serde_json::from_str(text).map_err(malformed)?;
    let n = env.len();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for (row_label, cells) in &raw.rows {
        let i = lookup(env, row_label, "rows")?;
        for (col_label, value) in cells {
            let location = format!("rows.{row_label}.{col_label}");
            let j = lookup(env, col_label, &location)?;
            rows[i.0][j.0] = rational_at(value, location)?;
        }
    }
    StrategyMatrix::validate(env, rows)
}

/// Allocation-file value listing the nonzero cells.
pub fn allocation_to_value(u: &StrategyMatrix) -> Value {
    let env = u.environment();
    let rows: BTreeMap<&str, BTreeMap<&str, String>> = env
        .ids()
        .map(|i| {
            let cells = env
                .ids()
                .filter(|&j| !u.get(i, j).is_zero())
                .map(|j| (env.label(j), format_rational(u.get(i, j))))
                .collect();
            (env.label(i), cells)
        })
        .collect();
    serde_json::json!({ "rows": rows })
}
