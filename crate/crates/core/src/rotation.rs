use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub type Mat3<T> = [[T; 3]; 3];

/// Proper rotation `R = R_z(alpha) R_y(beta) R_z(gamma)` (Z-Y-Z Euler angles, radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSO3<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> RotationSO3<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_angles(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn angles(&self) -> [T; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn to_matrix(&self) -> Mat3<T> {
        mat_mul(&mat_mul(&rot_z(self.alpha), &rot_y(self.beta)), &rot_z(self.gamma))
    }

    /// Same rotation with `alpha, gamma ∈ [0, 2π)` and `beta ∈ [0, π]`.
    pub fn canonical(&self) -> Self {
        let two_pi = T::PI() + T::PI();
        let wrap = |x: T| {
            let r = x % two_pi;
            let r = if r < T::zero() { r + two_pi } else { r };
            if r >= two_pi {
                T::zero()
            } else {
                r
            }
        };
        let mut b = wrap(self.beta);
        let (mut a, mut g) = (self.alpha, self.gamma);
        if b > T::PI() {
            // R_z(a) R_y(b) R_z(g) = R_z(a+π) R_y(2π-b) R_z(g+π)
            b = two_pi - b;
            a = a + T::PI();
            g = g + T::PI();
        }
        Self::new(wrap(a), b, wrap(g))
    }

    pub fn apply(&self, v: [T; 3]) -> [T; 3] {
        mat_vec(&self.to_matrix(), v)
    }
}

pub fn rot_z<T: Real>(t: T) -> Mat3<T> {
    let (s, c) = t.sin_cos();
    let (o, l) = (T::zero(), T::one());
    [[c, -s, o], [s, c, o], [o, o, l]]
}

pub fn rot_y<T: Real>(t: T) -> Mat3<T> {
    let (s, c) = t.sin_cos();
    let (o, l) = (T::zero(), T::one());
    [[c, o, s], [o, l, o], [-s, o, c]]
}

pub fn mat_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_vec<T: Real>(m: &Mat3<T>, v: [T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

pub fn transpose<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[j][i]))
}

pub fn determinant<T: Real>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn euler_matrix_is_proper_rotation(a in -10.0..10.0f64, b in -10.0..10.0f64, g in -10.0..10.0f64) {
            let m = RotationSO3::new(a, b, g).to_matrix();
            let mtm = mat_mul(&transpose(&m), &m);
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((mtm[i][j] - e).abs() < 1e-12);
                }
            }
            prop_assert!((determinant(&m) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn canonical_form_preserves_matrix(a in -10.0..10.0f64, b in -10.0..10.0f64, g in -10.0..10.0f64) {
            let r = RotationSO3::new(a, b, g);
            let c = r.canonical();
            prop_assert!(c.beta >= 0.0 && c.beta <= std::f64::consts::PI);
            prop_assert!(c.alpha >= 0.0 && c.alpha < 2.0 * std::f64::consts::PI);
            let (m1, m2) = (r.to_matrix(), c.to_matrix());
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((m1[i][j] - m2[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identity_angles_give_identity() {
        let m = RotationSO3::<f64>::identity().to_matrix();
        assert_eq!(m, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }
}
