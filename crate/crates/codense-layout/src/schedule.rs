use crate::error::LayoutError;
use codense_core::unpair;
use serde::{Deserialize, Serialize};

/// One user-specified row: payload width exponent and error-budget exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSpec {
    pub n: u32,
    pub b: u32,
}

/// Row source. The default schedule enumerates `(n_i, s_i)` by unpairing the
/// row index and takes `b_i = 2 n_i + i + 1`; a custom schedule lists `(n, b)`
/// pairs directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayoutSchedule {
    Paper,
    Custom(Vec<RowSpec>),
}

/// Parameters of one row as drawn from a schedule: `(n, s, b)` where `s`
/// counts earlier rows carrying the same width exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrawnRow {
    pub n: u32,
    pub s: u32,
    pub b: u32,
}

impl LayoutSchedule {
    pub fn draw(&self, i: usize) -> Result<DrawnRow, LayoutError> {
        match self {
            LayoutSchedule::Paper => {
                let (n, s) = unpair(i as u64);
                let n = u32::try_from(n).expect("column index is small");
                Ok(DrawnRow {
                    n,
                    s: u32::try_from(s).expect("row index is small"),
                    b: 2 * n + i as u32 + 1,
                })
            }
            LayoutSchedule::Custom(rows) => {
                let spec = *rows.get(i).ok_or(LayoutError::ScheduleExhausted(rows.len()))?;
                let s = rows[..i].iter().filter(|r| r.n == spec.n).count() as u32;
                Ok(DrawnRow { n: spec.n, s, b: spec.b })
            }
        }
    }

    /// Number of rows, when finite.
    pub fn len(&self) -> Option<usize> {
        match self {
            LayoutSchedule::Paper => None,
            LayoutSchedule::Custom(rows) => Some(rows.len()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScheduleRepr {
    Literal(String),
    Rows(Vec<RowSpec>),
}

impl Serialize for LayoutSchedule {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            LayoutSchedule::Paper => ScheduleRepr::Literal("paper".into()).serialize(ser),
            LayoutSchedule::Custom(rows) => ScheduleRepr::Rows(rows.clone()).serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for LayoutSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match ScheduleRepr::deserialize(de)? {
            ScheduleRepr::Literal(s) if s == "paper" => Ok(LayoutSchedule::Paper),
            ScheduleRepr::Literal(_) => {
                Err(serde::de::Error::custom(LayoutError::BadScheduleLiteral))
            }
            ScheduleRepr::Rows(rows) => Ok(LayoutSchedule::Custom(rows)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_rows() {
        let s = LayoutSchedule::Paper;
        assert_eq!(s.draw(0).unwrap(), DrawnRow { n: 0, s: 0, b: 1 });
        assert_eq!(s.draw(1).unwrap(), DrawnRow { n: 1, s: 0, b: 4 });
        assert_eq!(s.draw(2).unwrap(), DrawnRow { n: 0, s: 1, b: 3 });
    }

    #[test]
    fn custom_counts_same_width_rows() {
        let s = LayoutSchedule::Custom(vec![
            RowSpec { n: 1, b: 2 },
            RowSpec { n: 0, b: 1 },
            RowSpec { n: 1, b: 3 },
        ]);
        assert_eq!(s.draw(2).unwrap(), DrawnRow { n: 1, s: 1, b: 3 });
        assert!(matches!(s.draw(3), Err(LayoutError::ScheduleExhausted(3))));
    }

    #[test]
    fn json_forms() {
        let paper: LayoutSchedule = serde_json::from_str("\"paper\"").unwrap();
        assert_eq!(paper, LayoutSchedule::Paper);
        let custom: LayoutSchedule = serde_json::from_str(r#"[{"n":1,"b":2}]"#).unwrap();
        assert_eq!(custom, LayoutSchedule::Custom(vec![RowSpec { n: 1, b: 2 }]));
        assert!(serde_json::from_str::<LayoutSchedule>("\"desk\"").is_err());
        assert_eq!(serde_json::to_string(&paper).unwrap(), "\"paper\"");
    }
}
