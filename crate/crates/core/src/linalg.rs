//! Fixed-size 3-vector and 3×3 matrix helpers.
//!
//! Everything in this crate lives in three dimensions (three bodies, three
//! spatial axes), so plain arrays are enough.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn normalize(a: &Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = m[i][j];
        }
    }
    out
}

pub fn trace(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rotation by `angle` about the unit vector `axis` (Rodrigues).
pub fn rotation_about(axis: &Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let [x, y, z] = *axis;
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

/// A rotation taking the unit vector `from` onto +z.
pub fn rotation_to_z(from: &Vec3) -> Mat3 {
    let ez = [0.0, 0.0, 1.0];
    let axis = cross(from, &ez);
    let s = norm(&axis);
    let c = dot(from, &ez);
    if s < 1e-15 {
        return if c > 0.0 {
            IDENTITY
        } else {
            rotation_about(&[1.0, 0.0, 0.0], std::f64::consts::PI)
        };
    }
    rotation_about(&scale(&axis, 1.0 / s), s.atan2(c))
}

/// Eigen-decomposition of a symmetric 3×3 matrix.
///
/// Returns eigenvalues ascending with eigenvectors as the matching entries of
/// the second array. Ties are broken by the solver's column index so the
/// output is deterministic for degenerate spectra.
pub fn symmetric_eigen(m: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let mat = nalgebra::Matrix3::from_fn(|i, j| m[i][j]);
    let eig = mat.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.map(|i| eig.eigenvalues[i]);
    let vectors = order.map(|i| {
        let col = eig.eigenvectors.column(i);
        canonical_sign([col[0], col[1], col[2]])
    });
    (values, vectors)
}

/// Flip a vector so its largest-magnitude component is positive.
fn canonical_sign(v: Vec3) -> Vec3 {
    let mut idx = 0;
    for k in 1..3 {
        if v[k].abs() > v[idx].abs() + 1e-12 {
            idx = k;
        }
    }
    if v[idx] < 0.0 {
        scale(&v, -1.0)
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_recovers_known_spectrum() {
        let m = [[2.0, 0.5, 0.5], [0.5, 2.0, 0.5], [0.5, 0.5, 2.0]];
        let (vals, vecs) = symmetric_eigen(&m);
        assert!((vals[0] - 1.5).abs() < 1e-13);
        assert!((vals[1] - 1.5).abs() < 1e-13);
        assert!((vals[2] - 3.0).abs() < 1e-13);
        let r = 1.0 / 3f64.sqrt();
        for k in 0..3 {
            assert!((vecs[2][k] - r).abs() < 1e-13);
        }
    }

    #[test]
    fn rotation_to_z_maps_vector() {
        let v = normalize(&[0.3, -0.4, 0.5]).unwrap();
        let r = rotation_to_z(&v);
        let w = mat_vec(&r, &v);
        assert!((w[2] - 1.0).abs() < 1e-14);
        let south = rotation_to_z(&[0.0, 0.0, -1.0]);
        assert!((mat_vec(&south, &[0.0, 0.0, -1.0])[2] - 1.0).abs() < 1e-14);
    }
}
