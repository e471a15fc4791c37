//! Canonical JSON documents for instances and schedules.
//!
//! Encoding goes through [`serde_json::Value`], whose object map keeps keys
//! sorted, so equal values always produce byte-identical text. Slot-sets are
//! written as ID arrays sorted lexicographically.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{Instance, Schedule, SLOTS_PER_DAY};

/// Wire form of a [`Schedule`]: `days[d][t]` is the sorted list of employee IDs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub unit_id: String,
    pub days: Vec<Vec<Vec<String>>>,
}

/// Serializes any value with sorted object keys and no insignificant whitespace.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("model types always serialize");
    serde_json::to_string(&v).expect("values always serialize")
}

/// Deserializes with a JSON-path-like location in the error.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ModelError::Decode {
            path: if path.is_empty() || path == "." {
                "$".into()
            } else {
                path
            },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn encode_instance(instance: &Instance) -> String {
    to_canonical(instance)
}

pub fn decode_instance(text: &str) -> Result<Instance, ModelError> {
    let inst: Instance = from_json(text)?;
    inst.validate()?;
    Ok(inst)
}

pub fn schedule_to_doc(schedule: &Schedule, instance: &Instance) -> ScheduleDoc {
    let days = (0..schedule.days())
        .map(|d| {
            (0..SLOTS_PER_DAY)
                .map(|t| {
                    let mut ids: Vec<String> = schedule
                        .slot_members(d, t)
                        .map(|e| instance.employees[e].id.clone())
                        .collect();
                    ids.sort_unstable();
                    ids
                })
                .collect()
        })
        .collect();
    ScheduleDoc {
        unit_id: instance.unit_id.clone(),
        days,
    }
}

pub fn schedule_from_doc(doc: &ScheduleDoc, instance: &Instance) -> Result<Schedule, ModelError> {
    if doc.unit_id != instance.unit_id {
        return Err(ModelError::invalid(
            "unit_id",
            format!("schedule is for {:?}, instance is {:?}", doc.unit_id, instance.unit_id),
        ));
    }
    if doc.days.len() != instance.days {
        return Err(ModelError::invalid(
            "days",
            format!("expected {} days, found {}", instance.days, doc.days.len()),
        ));
    }
    let mut s = instance.empty_schedule();
    for (d, day) in doc.days.iter().enumerate() {
        if day.len() != SLOTS_PER_DAY {
            return Err(ModelError::invalid(
                format!("days[{d}]"),
                format!("expected {SLOTS_PER_DAY} slots, found {}", day.len()),
            ));
        }
        for (t, ids) in day.iter().enumerate() {
            for id in ids {
                let e = instance.employee_index(id)?;
                if s.is_assigned(d, t, e) {
                    return Err(ModelError::invalid(
                        format!("days[{d}][{t}]"),
                        format!("employee {id:?} listed twice"),
                    ));
                }
                s.assign(d, t, e);
            }
        }
    }
    Ok(s)
}

pub fn encode_schedule(schedule: &Schedule, instance: &Instance) -> String {
    to_canonical(&schedule_to_doc(schedule, instance))
}

pub fn decode_schedule(text: &str, instance: &Instance) -> Result<Schedule, ModelError> {
    let doc: ScheduleDoc = from_json(text)?;
    schedule_from_doc(&doc, instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstraintParams, DemandGrid, Employee, PenaltyWeights, Skill};

    fn minimal() -> Instance {
        Instance {
            unit_id: "ward".into(),
            days: 1,
            employees: vec![Employee::new("m", Skill::L1, true, 1)],
            demand: DemandGrid::zeros(1),
            constraints: ConstraintParams::default(),
            weights: PenaltyWeights::default(),
        }
    }

    #[test]
    fn minimal_instance_round_trips_byte_identically() {
        let inst = minimal();
        let text = encode_instance(&inst);
        let back = decode_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(encode_instance(&back), text);
    }

    #[test]
    fn keys_are_sorted() {
        let text = encode_instance(&minimal());
        let c = text.find("\"constraints\"").unwrap();
        let d = text.find("\"demand\"").unwrap();
        let w = text.find("\"weights\"").unwrap();
        assert!(c < d && d < w);
    }

    #[test]
    fn unknown_employee_in_schedule_is_rejected() {
        let inst = minimal();
        let mut days = vec![vec![Vec::<String>::new(); SLOTS_PER_DAY]];
        days[0][3].push("ghost".into());
        let text = to_canonical(&ScheduleDoc {
            unit_id: "ward".into(),
            days,
        });
        assert_eq!(
            decode_schedule(&text, &inst),
            Err(ModelError::UnknownEmployee("ghost".into()))
        );
    }

    #[test]
    fn short_day_is_a_validation_error() {
        let inst = minimal();
        let days = vec![vec![Vec::<String>::new(); 47]];
        let text = to_canonical(&ScheduleDoc {
            unit_id: "ward".into(),
            days,
        });
        assert!(matches!(decode_schedule(&text, &inst), Err(ModelError::Invalid { .. })));
    }

    #[test]
    fn duplicate_id_in_slot_is_rejected() {
        let inst = minimal();
        let mut days = vec![vec![Vec::<String>::new(); SLOTS_PER_DAY]];
        days[0][0] = vec!["m".into(), "m".into()];
        let text = to_canonical(&ScheduleDoc {
            unit_id: "ward".into(),
            days,
        });
        assert!(matches!(decode_schedule(&text, &inst), Err(ModelError::Invalid { .. })));
    }

    #[test]
    fn schema_errors_name_the_path() {
        let mut v: serde_json::Value = serde_json::from_str(&encode_instance(&minimal())).unwrap();
        v["employees"][0]["skill"] = serde_json::json!("L9");
        let err = decode_instance(&v.to_string()).unwrap_err();
        match err {
            ModelError::Decode { path, .. } => assert_eq!(path, "employees[0].skill"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn demand_with_47_slots_fails_validation() {
        let mut inst = minimal();
        inst.demand.ideal[0].pop();
        let err = decode_instance(&encode_instance(&inst)).unwrap_err();
        assert!(matches!(err, ModelError::Invalid { .. }));
    }
}
