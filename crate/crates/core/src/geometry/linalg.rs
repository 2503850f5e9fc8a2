use nalgebra::{DMatrix, Matrix3, SVector};

/// Right singular vectors of a design matrix with nine columns, ordered by
/// increasing singular value.
pub(crate) struct NullSpace {
    /// Singular values, ascending.
    pub values: [f64; 9],
    /// `vectors[i]` pairs with `values[i]`.
    pub vectors: [SVector<f64, 9>; 9],
}

impl NullSpace {
    /// Decomposes `rows` (each of length nine). Fewer than nine rows are
    /// zero-padded so the full right basis is always available.
    pub fn of_rows(rows: &[[f64; 9]]) -> Option<Self> {
        let height = rows.len().max(9);
        let mut a = DMatrix::<f64>::zeros(height, 9);
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a[(r, c)] = *v;
            }
        }
        let svd = a.try_svd(false, true, f64::EPSILON, 200)?;
        let v_t = svd.v_t?;
        let mut order: [usize; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        let mut values = [0.0; 9];
        let mut vectors = [SVector::<f64, 9>::zeros(); 9];
        for (slot, &idx) in order.iter().enumerate() {
            values[slot] = svd.singular_values[idx];
            vectors[slot] = SVector::<f64, 9>::from_iterator(v_t.row(idx).iter().copied());
        }
        Some(Self { values, vectors })
    }

    pub fn largest(&self) -> f64 {
        self.values[8]
    }
}

pub(crate) fn to_matrix3(v: &SVector<f64, 9>) -> Matrix3<f64> {
    Matrix3::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8])
}
