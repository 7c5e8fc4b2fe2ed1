//! One-hot encoding of RNA sequences into fixed-width matrices.
//!
//! Row order is (A, C, G, U): A = (1,0,0,0), C = (0,1,0,0), G = (0,0,1,0),
//! U = (0,0,0,1). Columns past the sequence end are zero padding; the
//! sequence is left-aligned at column 0.

use ndarray::Array2;

use crate::sequence::{Base, RnaSequence};
use crate::{Error, Result, MAX_SEQ_LEN};

/// A 4×width one-hot matrix with zero padding past `valid_length`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotMatrix {
    pub values: Array2<f64>,
    pub valid_length: usize,
}

impl OneHotMatrix {
    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    /// Recovers the original sequence by per-column argmax over the valid
    /// prefix.
    pub fn decode(&self) -> String {
        (0..self.valid_length)
            .map(|j| {
                let col = self.values.column(j);
                let row = (0..4).max_by(|&a, &b| col[a].partial_cmp(&col[b]).unwrap()).unwrap();
                Base::ALL[row].to_char()
            })
            .collect()
    }
}

/// Encodes a sequence into a 4×`width` one-hot matrix.
pub fn one_hot_encode(seq: &RnaSequence, width: usize) -> Result<OneHotMatrix> {
    if seq.len() > width {
        return Err(Error::InvalidArgument(format!(
            "sequence '{}' is {} nt, wider than the {} column encoder",
            seq.id(),
            seq.len(),
            width
        )));
    }
    let mut values = Array2::zeros((4, width));
    for (j, base) in seq.bases().enumerate() {
        values[(base.index(), j)] = 1.0;
    }
    Ok(OneHotMatrix {
        values,
        valid_length: seq.len(),
    })
}

/// Encodes with the default width of [`MAX_SEQ_LEN`] columns.
pub fn one_hot_encode_default(seq: &RnaSequence) -> Result<OneHotMatrix> {
    one_hot_encode(seq, MAX_SEQ_LEN)
}

/// Binary cache dump: 4-byte little-endian width, then per matrix a 4-byte
/// valid_length followed by 4×width row-major 8-bit entries.
pub fn write_matrix_dump(matrices: &[OneHotMatrix]) -> Vec<u8> {
    let width = matrices.first().map_or(MAX_SEQ_LEN, OneHotMatrix::width);
    let mut out = Vec::new();
    out.extend_from_slice(&(width as u32).to_le_bytes());
    for m in matrices {
        out.extend_from_slice(&(m.valid_length as u32).to_le_bytes());
        out.extend(m.values.iter().map(|&v| v as u8));
    }
    out
}

/// Reads a dump produced by [`write_matrix_dump`].
pub fn read_matrix_dump(bytes: &[u8]) -> Result<Vec<OneHotMatrix>> {
    let bad = || Error::Data("truncated one-hot matrix dump".into());
    if bytes.len() < 4 {
        return Err(bad());
    }
    let width = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    let record = 4 + 4 * width;
    let body = &bytes[4..];
    if body.len() % record != 0 {
        return Err(bad());
    }
    let mut out = Vec::new();
    for chunk in body.chunks(record) {
        let valid_length = u32::from_le_bytes(chunk[..4].try_into().unwrap()) as usize;
        let values = Array2::from_shape_vec(
            (4, width),
            chunk[4..].iter().map(|&b| b as f64).collect(),
        )
        .map_err(|e| Error::Data(format!("one-hot dump shape: {e}")))?;
        out.push(OneHotMatrix { values, valid_length });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::RnaSequence;

    fn seq(s: &str) -> RnaSequence {
        RnaSequence::new("t", s).unwrap()
    }

    #[test]
    fn encodes_acgu_columns() {
        let m = one_hot_encode_default(&seq("ACGU")).unwrap();
        assert_eq!(m.valid_length, 4);
        for (j, expect) in [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
        .iter()
        .enumerate()
        {
            let col: Vec<f64> = m.values.column(j).to_vec();
            assert_eq!(&col, expect);
        }
        // all other columns zero
        for j in 4..160 {
            assert_eq!(m.values.column(j).sum(), 0.0);
        }
    }

    #[test]
    fn minimal_single_base() {
        let m = one_hot_encode(&seq("A"), 1).unwrap();
        assert_eq!(m.valid_length, 1);
        assert_eq!(m.values.column(0).to_vec(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn saturated_row() {
        let s = "A".repeat(160);
        let m = one_hot_encode_default(&seq(&s)).unwrap();
        assert_eq!(m.values.row(0).sum(), 160.0);
        assert_eq!(m.values.sum(), 160.0);
    }

    #[test]
    fn rejects_too_wide() {
        assert!(one_hot_encode(&seq("ACGU"), 3).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let ms: Vec<OneHotMatrix> = ["ACGU", "GG", "UUUAC"]
            .iter()
            .map(|s| one_hot_encode(&seq(s), 8).unwrap())
            .collect();
        let bytes = write_matrix_dump(&ms);
        let back = read_matrix_dump(&bytes).unwrap();
        assert_eq!(ms, back);
        assert!(read_matrix_dump(&bytes[..bytes.len() - 3]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn sum_and_decode(bases in proptest::collection::vec(0u8..4, 1..160)) {
            let s: String = bases
                .iter()
                .map(|&b| crate::sequence::Base::ALL[b as usize].to_char())
                .collect();
            let rna = seq(&s);
            let m = one_hot_encode_default(&rna).unwrap();
            // total mass equals valid length; each valid column sums to 1
            proptest::prop_assert_eq!(m.values.sum(), rna.len() as f64);
            for j in 0..rna.len() {
                proptest::prop_assert_eq!(m.values.column(j).sum(), 1.0);
            }
            proptest::prop_assert_eq!(m.decode(), s);
        }
    }
}
