//! Text tables for fields: `elem,row,col,value` and `node,comp,value`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::mesh::{ElemField, Mesh, NodalField};

pub fn write_elem_field<W: Write>(field: &ElemField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["elem", "row", "col", "value"])?;
    for e in 0..field.len() {
        let t = field.at(e);
        for r in 0..field.rows() {
            for c in 0..field.cols() {
                w.write_record(&[
                    e.to_string(),
                    r.to_string(),
                    c.to_string(),
                    t[r * field.cols() + c].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_nodal_field<W: Write>(field: &NodalField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "comp", "value"])?;
    let n = field.components();
    for (k, v) in field.values().iter().enumerate() {
        w.write_record(&[(k / n).to_string(), (k % n).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an element table for `mesh`; the tensor shape is inferred from the largest indices.
pub fn read_elem_field<R: Read>(mesh: &Mesh, input: R) -> Result<ElemField> {
    let rows = parse_table(input, &["elem", "row", "col", "value"])?;
    let (mut max_r, mut max_c) = (0, 0);
    for (_, idx, _) in &rows {
        max_r = max_r.max(idx[1]);
        max_c = max_c.max(idx[2]);
    }
    let (nr, nc) = (max_r + 1, max_c + 1);
    let stride = nr * nc;
    fill(
        rows,
        stride * mesh.element_count(),
        |idx| (idx[0] < mesh.element_count()).then(|| idx[0] * stride + idx[1] * nc + idx[2]),
        |data| ElemField::from_values(mesh, nr, nc, data),
    )
}

pub fn read_nodal_field<R: Read>(mesh: &Mesh, input: R) -> Result<NodalField> {
    let rows = parse_table(input, &["node", "comp", "value"])?;
    let n = rows.iter().map(|(_, idx, _)| idx[1]).max().unwrap_or(0) + 1;
    fill(
        rows,
        n * mesh.node_count(),
        |idx| (idx[0] < mesh.node_count()).then(|| idx[0] * n + idx[1]),
        |data| NodalField::from_values(mesh, n, data),
    )
}

type Row = (usize, Vec<usize>, f64);

fn parse_table<R: Read>(input: R, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}, found {}", header.join(","), found.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Parse { line, message };
        if record.len() != header.len() {
            return Err(bad(format!("expected {} fields, found {}", header.len(), record.len())));
        }
        let mut idx = Vec::with_capacity(header.len() - 1);
        for k in 0..header.len() - 1 {
            idx.push(
                record[k]
                    .parse::<usize>()
                    .map_err(|_| bad(format!("{} is not an index: {:?}", header[k], &record[k])))?,
            );
        }
        let last = &record[header.len() - 1];
        let value: f64 = last.parse().map_err(|_| bad(format!("value is not a number: {last:?}")))?;
        if !value.is_finite() {
            return Err(bad(format!("value is not finite: {last}")));
        }
        rows.push((line, idx, value));
    }
    Ok(rows)
}

fn fill<T>(
    rows: Vec<Row>,
    len: usize,
    slot: impl Fn(&[usize]) -> Option<usize>,
    build: impl FnOnce(Vec<f64>) -> Result<T>,
) -> Result<T> {
    let mut data = vec![f64::NAN; len];
    for (line, idx, value) in rows {
        let k = slot(&idx).filter(|&k| k < len).ok_or_else(|| Error::Parse {
            line,
            message: format!("index {idx:?} out of range for this mesh"),
        })?;
        if !data[k].is_nan() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate entry {idx:?}"),
            });
        }
        data[k] = value;
    }
    if let Some(k) = data.iter().position(|v| v.is_nan()) {
        return Err(Error::Parse {
            line: 0,
            message: format!("missing entry at flat position {k}"),
        });
    }
    build(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elem_round_trip() {
        let mesh = Mesh::unit_square(3).unwrap();
        let f = ElemField::from_fn(&mesh, 2, 2, |x, t| {
            t.copy_from_slice(&[x[0], x[1].sin(), -x[0] * x[1], 1.0 / 3.0])
        });
        let mut buf = Vec::new();
        write_elem_field(&f, &mut buf).unwrap();
        let back = read_elem_field(&mesh, buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn nodal_round_trip() {
        let mesh = Mesh::unit_square(4).unwrap();
        let u = NodalField::interpolate(&mesh, 2, |x, o| {
            o[0] = x[0].exp();
            o[1] = 0.1 * x[1];
        });
        let mut buf = Vec::new();
        write_nodal_field(&u, &mut buf).unwrap();
        assert_eq!(read_nodal_field(&mesh, buf.as_slice()).unwrap(), u);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let mesh = Mesh::unit_square(2).unwrap();
        let text = "elem,row,col,value\n0,0,0,1.0\n1,0,0,abc\n";
        match read_elem_field(&mesh, text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let header = "node,value\n0,1\n";
        assert!(matches!(read_nodal_field(&mesh, header.as_bytes()), Err(Error::Parse { line: 1, .. })));
        let missing = "elem,row,col,value\n0,0,0,1.0\n";
        assert!(read_elem_field(&mesh, missing.as_bytes()).is_err());
    }
}
