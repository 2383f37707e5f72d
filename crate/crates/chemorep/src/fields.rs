//! Closed-form time-dependent fields used as exact solutions, projection
//! targets and right-hand sides.

/// Scalar field with first spatial derivatives.
pub trait ScalarField: Sync {
    fn value(&self, x: f64, y: f64, t: f64) -> f64;
    fn gradient(&self, x: f64, y: f64, t: f64) -> [f64; 2];
}

/// 2-vector field with first spatial derivatives. The Jacobian rows are
/// components: `jac[i][j] = d sigma_i / d x_j`.
pub trait VectorField: Sync {
    fn value(&self, x: f64, y: f64, t: f64) -> [f64; 2];
    fn jacobian(&self, x: f64, y: f64, t: f64) -> [[f64; 2]; 2];

    fn divergence(&self, x: f64, y: f64, t: f64) -> f64 {
        let j = self.jacobian(x, y, t);
        j[0][0] + j[1][1]
    }

    /// 2D scalar curl: rot sigma = d(sigma_2)/dx - d(sigma_1)/dy.
    fn curl(&self, x: f64, y: f64, t: f64) -> f64 {
        let j = self.jacobian(x, y, t);
        j[1][0] - j[0][1]
    }
}

/// Scalar field built from value and gradient closures.
pub struct ScalarClosure<V, G>
where
    V: Fn(f64, f64, f64) -> f64 + Sync,
    G: Fn(f64, f64, f64) -> [f64; 2] + Sync,
{
    pub value: V,
    pub gradient: G,
}

impl<V, G> ScalarField for ScalarClosure<V, G>
where
    V: Fn(f64, f64, f64) -> f64 + Sync,
    G: Fn(f64, f64, f64) -> [f64; 2] + Sync,
{
    fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.value)(x, y, t)
    }

    fn gradient(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        (self.gradient)(x, y, t)
    }
}

/// Vector field built from value and Jacobian closures.
pub struct VectorClosure<V, J>
where
    V: Fn(f64, f64, f64) -> [f64; 2] + Sync,
    J: Fn(f64, f64, f64) -> [[f64; 2]; 2] + Sync,
{
    pub value: V,
    pub jacobian: J,
}

impl<V, J> VectorField for VectorClosure<V, J>
where
    V: Fn(f64, f64, f64) -> [f64; 2] + Sync,
    J: Fn(f64, f64, f64) -> [[f64; 2]; 2] + Sync,
{
    fn value(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        (self.value)(x, y, t)
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> [[f64; 2]; 2] {
        (self.jacobian)(x, y, t)
    }
}

/// The zero vector field.
pub struct ZeroVector;

impl VectorField for ZeroVector {
    fn value(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn jacobian(&self, _: f64, _: f64, _: f64) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [0.0, 0.0]]
    }
}
