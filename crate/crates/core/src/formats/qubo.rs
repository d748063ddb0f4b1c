//! The plain-text QUBO format: comment lines, a `p qubo` sentinel carrying
//! node and term counts, then diagonal (linear) and off-diagonal lines.
//! Boolean semantics only; spin instances are converted on write. Scale is
//! folded into the coefficients and a nonzero offset cannot be represented
//! (the conversion layer reports it as a lossy warning).

use std::collections::BTreeMap;

use crate::pbf::VarId;

use super::{Domain, FormatError, QuboInstance};

pub fn read_qubo(text: &str) -> Result<QuboInstance, FormatError> {
    let mut sentinel: Option<(u64, usize, usize)> = None;
    let mut linear: BTreeMap<VarId, f64> = BTreeMap::new();
    let mut quadratic: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        if raw.starts_with('c') {
            continue;
        }
        let malformed = || FormatError::MalformedLine {
            line: line_no,
            content: raw.to_string(),
        };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match sentinel {
            None => {
                // First significant line must be the sentinel
                // `p qubo 0 <maxNodes> <nDiagonals> <nElements>`.
                if tokens.len() != 6 || tokens[0] != "p" || tokens[1] != "qubo" || tokens[2] != "0"
                {
                    return Err(malformed());
                }
                let max_nodes: u64 = tokens[3].parse().map_err(|_| malformed())?;
                let n_diagonals: usize = tokens[4].parse().map_err(|_| malformed())?;
                let n_elements: usize = tokens[5].parse().map_err(|_| malformed())?;
                sentinel = Some((max_nodes, n_diagonals, n_elements));
            }
            Some((max_nodes, _, _)) => {
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
                    if index as u64 >= max_nodes {
                        return Err(FormatError::IndexRange {
                            line: line_no,
                            index,
                            n: max_nodes,
                        });
                    }
                }
                if i > j {
                    return Err(FormatError::IndexOrder { line: line_no, i, j });
                }
                let (i, j) = (i as VarId, j as VarId);
                if i == j {
                    if linear.insert(i, value).is_some() {
                        return Err(FormatError::DuplicateTerm {
                            kind: "diagonal",
                            key: i.to_string(),
                        });
                    }
                } else if quadratic.insert((i, j), value).is_some() {
                    return Err(FormatError::DuplicateTerm {
                        kind: "off-diagonal",
                        key: format!("({i}, {j})"),
                    });
                }
            }
        }
    }

    let (max_nodes, n_diagonals, n_elements) = sentinel.ok_or(FormatError::MalformedLine {
        line: 1,
        content: "missing 'p qubo' sentinel".to_string(),
    })?;
    if linear.len() != n_diagonals {
        return Err(FormatError::CountMismatch {
            kind: "diagonal",
            declared: n_diagonals,
            found: linear.len(),
        });
    }
    if quadratic.len() != n_elements {
        return Err(FormatError::CountMismatch {
            kind: "off-diagonal",
            declared: n_elements,
            found: quadratic.len(),
        });
    }

    let ids: Vec<VarId> = (0..max_nodes).map(|v| v as VarId).collect();
    QuboInstance::new(Domain::Boolean, ids, linear, quadratic, 1.0, 0.0)
}

pub fn write_qubo(q: &QuboInstance) -> String {
    let q = q.to_boolean();
    let scale = q.scale();
    let max_nodes = q.variable_ids().last().map_or(0, |&v| u64::from(v) + 1);
    let mut out = format!(
        "p qubo 0 {} {} {}\n",
        max_nodes,
        q.linear().len(),
        q.quadratic().len()
    );
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
            Domain::Boolean,
            vec![0, 1],
            [(0, -1.0)].into(),
            [((0, 1), 2.0)].into(),
            1.0,
            0.0,
        )
        .unwrap();
        let text = write_qubo(&q);
        assert_eq!(text, "p qubo 0 2 1 1\n0 0 -1\n0 1 2\n");
        let back = read_qubo(&text).unwrap();
        assert_eq!(back, q);
        assert_eq!(write_qubo(&back), text);
    }

    #[test]
    fn empty_instance_has_zero_counts_and_no_body() {
        let q = QuboInstance::new(
            Domain::Boolean,
            vec![],
            BTreeMap::new(),
            BTreeMap::new(),
            1.0,
            0.0,
        )
        .unwrap();
        assert_eq!(write_qubo(&q), "p qubo 0 0 0 0\n");
    }

    #[test]
    fn comment_lines_are_ignored() {
        let with_comments = "c a comment\np qubo 0 2 1 1\nc another\n0 0 -1\n0 1 2\nc done\n";
        let plain = "p qubo 0 2 1 1\n0 0 -1\n0 1 2\n";
        assert_eq!(read_qubo(with_comments).unwrap(), read_qubo(plain).unwrap());
    }

    #[test]
    fn count_mismatch_is_diagnosed() {
        let text = "p qubo 0 2 2 0\n0 0 -1\n";
        assert!(matches!(
            read_qubo(text),
            Err(FormatError::CountMismatch { kind: "diagonal", declared: 2, found: 1 })
        ));
    }

    #[test]
    fn negative_index_is_diagnosed() {
        let text = "p qubo 0 2 1 0\n-1 -1 1\n";
        assert!(matches!(
            read_qubo(text),
            Err(FormatError::NegativeIndex { line: 2 })
        ));
    }

    #[test]
    fn lower_triangular_entry_is_rejected() {
        let text = "p qubo 0 2 0 1\n1 0 2\n";
        assert!(matches!(
            read_qubo(text),
            Err(FormatError::IndexOrder { line: 2, i: 1, j: 0 })
        ));
    }

    #[test]
    fn malformed_line_reports_position() {
        let text = "p qubo 0 2 1 0\n0 0\n";
        assert!(matches!(
            read_qubo(text),
            Err(FormatError::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn scale_is_folded_into_coefficients() {
        let q = QuboInstance::new(
            Domain::Boolean,
            vec![0, 1],
            [(0, 1.5)].into(),
            [((0, 1), -0.5)].into(),
            2.0,
            0.0,
        )
        .unwrap();
        let text = write_qubo(&q);
        let back = read_qubo(&text).unwrap();
        for bits in 0..4u8 {
            let state = [i8::from(bits & 1 == 1), i8::from(bits & 2 == 2)];
            assert!((q.energy(&state).unwrap() - back.energy(&state).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_instances_are_converted_before_writing() {
        let spin = QuboInstance::new(
            Domain::Spin,
            vec![0, 1],
            [(0, 1.0)].into(),
            [((0, 1), -1.0)].into(),
            1.0,
            2.0, // chosen so the boolean twin has zero offset
        )
        .unwrap();
        let boolean = spin.to_boolean();
        assert_eq!(boolean.offset(), 0.0);
        let text = write_qubo(&spin);
        let back = read_qubo(&text).unwrap();
        for bits in 0..4u8 {
            let x = [i8::from(bits & 1 == 1), i8::from(bits & 2 == 2)];
            let s = [2 * x[0] - 1, 2 * x[1] - 1];
            assert!((back.energy(&x).unwrap() - spin.energy(&s).unwrap()).abs() < 1e-12);
        }
    }
}
