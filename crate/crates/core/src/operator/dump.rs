//! Binary dump of an assembled operator matrix for external cross-checks.
//!
//! Layout, all little-endian:
//!   u32  kind (0 = random walk, 1 = twisted Laplacian)
//!   u64  n (matrix size)
//!   f64  delta (grid spacing)
//!   f64  h
//!   u64  nnz
//!   u64  row_ptr[n + 1]
//!   u64  col_idx[nnz]
//!   f64  values[nnz]
//! CSR over the full symmetric matrix (both triangles), rows in order,
//! columns ascending within each row; exact zeros inside the band are
//! not stored.

use std::io::{self, Write};

use super::{DiscreteOperator, OperatorKind};

pub fn dump_matrix<W: Write>(op: &DiscreteOperator, mut out: W) -> io::Result<()> {
    let n = op.matrix.n;
    let bw = op.matrix.bw;

    let kind: u32 = match op.kind {
        OperatorKind::RandomWalk => 0,
        OperatorKind::Witten => 1,
    };
    out.write_all(&kind.to_le_bytes())?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&op.delta.to_le_bytes())?;
    out.write_all(&op.h.to_le_bytes())?;

    let mut row_ptr: Vec<u64> = Vec::with_capacity(n + 1);
    let mut col_idx: Vec<u64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let lo = i.saturating_sub(bw);
        let hi = (i + bw).min(n - 1);
        for j in lo..=hi {
            let v = op.matrix.get(i, j);
            if v != 0.0 {
                col_idx.push(j as u64);
                values.push(v);
            }
        }
        row_ptr.push(col_idx.len() as u64);
    }

    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for r in &row_ptr {
        out.write_all(&r.to_le_bytes())?;
    }
    for c in &col_idx {
        out.write_all(&c.to_le_bytes())?;
    }
    for v in &values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_witten_matrix;
    use crate::potential::{Domain, Potential};

    #[test]
    fn dump_roundtrip() {
        let p = Potential::parse(
            "0.1*(x^2-1)^2",
            1,
            Domain::new(vec![[-2.5, 2.5]]).unwrap(),
        )
        .unwrap();
        let op = build_witten_matrix(&p, 101, 0.3).unwrap();
        let mut buf = Vec::new();
        dump_matrix(&op, &mut buf).unwrap();

        // header
        let kind = u32::from_le_bytes(buf[0..4].try_into().unwrap());
        assert_eq!(kind, 1);
        let n = u64::from_le_bytes(buf[4..12].try_into().unwrap()) as usize;
        assert_eq!(n, 101);
        let delta = f64::from_le_bytes(buf[12..20].try_into().unwrap());
        assert!((delta - 0.05).abs() < 1e-15);
        let h = f64::from_le_bytes(buf[20..28].try_into().unwrap());
        assert_eq!(h, 0.3);
        let nnz = u64::from_le_bytes(buf[28..36].try_into().unwrap()) as usize;

        // reconstruct and compare to the dense form
        let mut pos = 36;
        let read_u64 = |pos: &mut usize| {
            let v = u64::from_le_bytes(buf[*pos..*pos + 8].try_into().unwrap());
            *pos += 8;
            v as usize
        };
        let row_ptr: Vec<usize> = (0..=n).map(|_| read_u64(&mut pos)).collect();
        assert_eq!(row_ptr[n], nnz);
        let col_idx: Vec<usize> = (0..nnz).map(|_| read_u64(&mut pos)).collect();
        let values: Vec<f64> = (0..nnz)
            .map(|k| f64::from_le_bytes(buf[pos + 8 * k..pos + 8 * k + 8].try_into().unwrap()))
            .collect();
        assert_eq!(buf.len(), pos + 8 * nnz);

        let dense = op.matrix.to_dense();
        let mut seen = 0;
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                assert_eq!(dense[(i, col_idx[k])], values[k]);
                seen += 1;
            }
        }
        assert_eq!(seen, nnz);
        // symmetric CSR: every stored entry has its mirror
        for i in 0..n {
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = col_idx[k];
                let mirrored = (row_ptr[j]..row_ptr[j + 1])
                    .any(|kk| col_idx[kk] == i && values[kk] == values[k]);
                assert!(mirrored);
            }
        }
    }
}
