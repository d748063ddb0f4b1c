//! The Qubist format: a `<N> <m>` header followed by `i j value` lines,
//! where `i = j` gives a field and `i < j` a coupling. Spin semantics,
//! 0-based indices, no comments, no metadata.

use std::collections::BTreeMap;

use crate::pbf::VarId;

use super::{Domain, FormatError, QuboInstance};

pub fn read_qubist(text: &str) -> Result<QuboInstance, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::MalformedLine {
        line: 1,
        content: "missing '<N> <m>' header".to_string(),
    })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let malformed_header = || FormatError::MalformedLine {
        line: 1,
        content: header.to_string(),
    };
    if tokens.len() != 2 {
        return Err(malformed_header());
    }
    let n: u64 = tokens[0].parse().map_err(|_| malformed_header())?;
    let m: usize = tokens[1].parse().map_err(|_| malformed_header())?;

    let mut fields: BTreeMap<VarId, f64> = BTreeMap::new();
    let mut couplings: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
    let mut entries = 0usize;
    for (index, raw) in lines {
        let line_no = index + 1;
        let malformed = || FormatError::MalformedLine {
            line: line_no,
            content: raw.to_string(),
        };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(malformed());
        }
        let i: i64 = tokens[0].parse().map_err(|_| malformed())?;
        let j: i64 = tokens[1].parse().map_err(|_| malformed())?;
        let value: f64 = tokens[2].parse().map_err(|_| malformed())?;
        if i < 0 || j < 0 {
            return Err(FormatError::NegativeIndex { line: line_no });
        }
        for index in [i, j] {
            if index as u64 >= n {
                return Err(FormatError::IndexRange {
                    line: line_no,
                    index,
                    n,
                });
            }
        }
        if i > j {
            return Err(FormatError::IndexOrder { line: line_no, i, j });
        }
        entries += 1;
        let (i, j) = (i as VarId, j as VarId);
        if i == j {
            if fields.insert(i, value).is_some() {
                return Err(FormatError::DuplicateTerm {
                    kind: "field",
                    key: i.to_string(),
                });
            }
        } else if couplings.insert((i, j), value).is_some() {
            return Err(FormatError::DuplicateTerm {
                kind: "coupling",
                key: format!("({i}, {j})"),
            });
        }
    }
    if entries != m {
        return Err(FormatError::CountMismatch {
            kind: "entry",
            declared: m,
            found: entries,
        });
    }

    let ids: Vec<VarId> = (0..n).map(|v| v as VarId).collect();
    QuboInstance::new(Domain::Spin, ids, fields, couplings, 1.0, 0.0)
}

pub fn write_qubist(q: &QuboInstance) -> String {
    let q = q.to_spin();
    let scale = q.scale();
    let n = q.variable_ids().last().map_or(0, |&v| u64::from(v) + 1);
    let m = q.linear().len() + q.quadratic().len();
    let mut out = format!("{n} {m}\n");
    for (&v, &c) in q.linear() {
        out.push_str(&format!("{v} {v} {}\n", c * scale));
    }
    for (&(i, j), &c) in q.quadratic() {
        out.push_str(&format!("{i} {j} {}\n", c * scale));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_serialization() {
        let q = QuboInstance::new(
            Domain::Spin,
            vec![0, 1],
            [(0, 1.0)].into(),
            [((0, 1), -1.0)].into(),
            1.0,
            0.0,
        )
        .unwrap();
        let text = write_qubist(&q);
        assert_eq!(text, "2 2\n0 0 1\n0 1 -1\n");
        let back = read_qubist(&text).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_qubist(&back), text);
    }

    #[test]
    fn empty_instance() {
        let q = QuboInstance::new(
            Domain::Spin,
            vec![],
            BTreeMap::new(),
            BTreeMap::new(),
            1.0,
            0.0,
        )
        .unwrap();
        assert_eq!(write_qubist(&q), "0 0\n");
        assert_eq!(read_qubist("0 0\n").unwrap(), q);
    }

    #[test]
    fn entry_count_mismatch_is_diagnosed() {
        assert!(matches!(
            read_qubist("2 3\n0 0 1\n0 1 -1\n"),
            Err(FormatError::CountMismatch { kind: "entry", declared: 3, found: 2 })
        ));
    }

    #[test]
    fn lower_triangular_entry_is_rejected() {
        assert!(matches!(
            read_qubist("2 1\n1 0 1\n"),
            Err(FormatError::IndexOrder { line: 2, i: 1, j: 0 })
        ));
    }

    #[test]
    fn index_beyond_declared_sites_is_rejected() {
        assert!(matches!(
            read_qubist("2 1\n0 2 1\n"),
            Err(FormatError::IndexRange { line: 2, index: 2, n: 2 })
        ));
    }

    #[test]
    fn read_write_fixed_point_on_random_spin_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let n = rng.gen_range(1..10u32);
            let mut fields = BTreeMap::new();
            let mut couplings = BTreeMap::new();
            for i in 0..n {
                if rng.gen_bool(0.6) {
                    fields.insert(i, f64::from(rng.gen_range(-50..50_i32)) / 4.0);
                }
                for j in (i + 1)..n {
                    if rng.gen_bool(0.4) {
                        couplings.insert((i, j), f64::from(rng.gen_range(-50..50_i32)) / 4.0);
                    }
                }
            }
            let q = QuboInstance::new(
                Domain::Spin,
                (0..n).collect(),
                fields,
                couplings,
                1.0,
                0.0,
            )
            .unwrap();
            let text = write_qubist(&q);
            let back = read_qubist(&text).unwrap();
            assert_eq!(write_qubist(&back), text);
            assert_eq!(back, q);
        }
    }
}
