//! P1 and P2 Lagrange bases on the reference triangle.
//!
//! Local node order: the three vertices (0,0), (1,0), (0,1), then for P2
//! the midpoints of local edges (v0,v1), (v1,v2), (v2,v0).

/// Number of local basis functions for a scalar element of `degree`.
pub fn basis_count(degree: u8) -> usize {
    match degree {
        1 => 3,
        2 => 6,
        _ => panic!("unsupported element degree {degree}"),
    }
}

/// Values and reference-coordinate gradients of all local basis functions
/// at reference point `p`.
pub fn eval_reference_basis(degree: u8, p: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let [x, y] = p;
    let l0 = 1.0 - x - y;
    match degree {
        1 => (vec![l0, x, y], vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]),
        2 => {
            let values = vec![
                l0 * (2.0 * l0 - 1.0),
                x * (2.0 * x - 1.0),
                y * (2.0 * y - 1.0),
                4.0 * l0 * x,
                4.0 * x * y,
                4.0 * y * l0,
            ];
            let d0 = 1.0 - 4.0 * l0; // d(l0(2l0-1))/dl0 applied to dl0 = (-1,-1)
            let grads = vec![
                [d0, d0],
                [4.0 * x - 1.0, 0.0],
                [0.0, 4.0 * y - 1.0],
                [4.0 * (l0 - x), -4.0 * x],
                [4.0 * y, 4.0 * x],
                [-4.0 * y, 4.0 * (l0 - y)],
            ];
            (values, grads)
        }
        _ => panic!("unsupported element degree {degree}"),
    }
}

/// Reference coordinates of the local nodes (3 for P1, 6 for P2).
pub fn local_nodes(degree: u8) -> Vec<[f64; 2]> {
    match degree {
        1 => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        2 => vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [0.5, 0.0],
            [0.5, 0.5],
            [0.0, 0.5],
        ],
        _ => panic!("unsupported element degree {degree}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kronecker_delta_at_nodes() {
        for degree in [1u8, 2] {
            let nodes = local_nodes(degree);
            for (i, &node) in nodes.iter().enumerate() {
                let (values, _) = eval_reference_basis(degree, node);
                for (j, v) in values.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(*v, expect, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        for degree in [1u8, 2] {
            for &p in &[[0.2, 0.3], [0.05, 0.9], [1.0 / 3.0, 1.0 / 3.0]] {
                let (values, grads) = eval_reference_basis(degree, p);
                let sum: f64 = values.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-14);
                let gx: f64 = grads.iter().map(|g| g[0]).sum();
                let gy: f64 = grads.iter().map(|g| g[1]).sum();
                assert_abs_diff_eq!(gx, 0.0, epsilon = 1e-13);
                assert_abs_diff_eq!(gy, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn p2_gradients_match_finite_differences() {
        let h = 1e-6;
        let p = [0.27, 0.41];
        let (_, grads) = eval_reference_basis(2, p);
        for i in 0..6 {
            let (vpx, _) = eval_reference_basis(2, [p[0] + h, p[1]]);
            let (vmx, _) = eval_reference_basis(2, [p[0] - h, p[1]]);
            let (vpy, _) = eval_reference_basis(2, [p[0], p[1] + h]);
            let (vmy, _) = eval_reference_basis(2, [p[0], p[1] - h]);
            assert_abs_diff_eq!(grads[i][0], (vpx[i] - vmx[i]) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(grads[i][1], (vpy[i] - vmy[i]) / (2.0 * h), epsilon = 1e-8);
        }
    }
}
