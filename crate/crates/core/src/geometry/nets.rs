//! Deterministic direction nets on the unit sphere.

use std::f64::consts::PI;

/// Default net size for support-function sweeps in the plane.
pub const NET_2D: usize = 720;
/// Default Fibonacci net size on the 2-sphere.
pub const NET_3D: usize = 2000;

/// Unit directions: `{-1, +1}` in 1-D, `count` equally spaced angles in 2-D,
/// a Fibonacci lattice of `count` points in 3-D.
pub fn direction_net(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let th = golden * (i as f64 + 0.5);
                    vec![r * th.cos(), r * th.sin(), z]
                })
                .collect()
        }
        _ => panic!("direction nets are only defined for dimensions 1 to 3"),
    }
}

/// Worst-case angle between an arbitrary unit vector and its nearest net
/// direction. The 3-D figure is an empirical bound for Fibonacci lattices
/// (measured ratio about 0.76 for 2000 points and 0.70 asymptotically).
pub fn covering_angle(dim: usize, count: usize) -> f64 {
    match dim {
        1 => 0.0,
        2 => PI / count as f64,
        _ => 0.8 * (4.0 * PI / count as f64).sqrt(),
    }
}

/// Net size needed for a covering angle of at most `angle` radians.
pub fn count_for_angle(dim: usize, angle: f64) -> usize {
    match dim {
        1 => 2,
        2 => (PI / angle).ceil() as usize,
        _ => (4.0 * PI * (0.8 / angle).powi(2)).ceil() as usize,
    }
}
