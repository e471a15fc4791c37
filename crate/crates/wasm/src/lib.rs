//! Browser bindings: generate a unit, run NSGA-II on it, and read back the
//! coverage of any front member. Everything crosses the boundary as JSON.

use roster_core::codec::{from_json, to_canonical};
use roster_core::instances::builtin_profile;
use roster_core::reports::{coverage_matrix, coverage_rate, solve};
use roster_core::{decode_instance, encode_instance, generate_instance, Config, Method, RunReport};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Instance JSON for a builtin unit profile.
pub fn generate_json(profile: &str, seed: u64) -> Result<String, String> {
    let p = builtin_profile(profile).ok_or_else(|| format!("unknown profile {profile:?}"))?;
    let config = Config::default();
    let inst = generate_instance(&p, &config.generator, &config.weights, seed).map_err(|e| e.to_string())?;
    Ok(encode_instance(&inst))
}

/// Runs NSGA-II and returns the run report as JSON.
pub fn solve_moo_json(instance: &str, population: usize, generations: usize, seed: u64) -> Result<String, String> {
    let inst = decode_instance(instance).map_err(|e| e.to_string())?;
    let mut ga = Config::default().ga;
    ga.population_size = population;
    ga.generations = generations;
    ga.master_seed = seed;
    let report = solve(Method::Moo, &inst, &ga, 1, |_| {}).map_err(|e| e.to_string())?;
    Ok(to_canonical(&report))
}

#[derive(Serialize)]
struct Coverage {
    /// `difference[day][slot]`: assigned minus required.
    difference: Vec<Vec<i64>>,
    rate: f64,
}

/// Coverage matrix and rate of front member `index` of a report.
pub fn coverage_json(report: &str, index: usize) -> Result<String, String> {
    let report: RunReport = from_json(report).map_err(|e| e.to_string())?;
    let s = report.schedule(index).map_err(|e| e.to_string())?;
    Ok(to_canonical(&Coverage {
        difference: coverage_matrix(&s, &report.instance),
        rate: coverage_rate(&s, &report.instance).percent,
    }))
}

#[wasm_bindgen]
pub fn generate(profile: &str, seed: u32) -> Result<String, JsError> {
    generate_json(profile, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_moo(instance: &str, population: u32, generations: u32, seed: u32) -> Result<String, JsError> {
    solve_moo_json(instance, population as usize, generations as usize, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn coverage(report: &str, index: u32) -> Result<String, JsError> {
    coverage_json(report, index as usize).map_err(|e| JsError::new(&e))
}
