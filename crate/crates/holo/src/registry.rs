//! Named paths and frame families with parameter vectors.

use holo_core::holonomic::{BlochCircle, FrameFamily, GeodesicTriangle, RotatingPlane};
use holo_core::kraus::random_channel;
use holo_core::random::seeded;
use holo_core::smooth::{spin_rotation_path, ChannelPath, FnPath, IsometryPath};
use holo_core::Error;

use crate::error::{HoloError, HoloResult};

pub const PATH_NAMES: &[&str] = &["constant", "isometry", "spin-rotation"];
pub const FAMILY_NAMES: &[&str] = &["rotating-plane", "bloch-circle", "geodesic-triangle"];

fn count(name: &'static str, params: &[f64], allowed: &[usize]) -> HoloResult<()> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::ParamCount { name, expected: allowed[0], found: params.len() }.into())
    }
}

fn positive_int(name: &'static str, x: f64) -> HoloResult<usize> {
    if x >= 1.0 && x.fract() == 0.0 && x < 1e6 {
        Ok(x as usize)
    } else {
        Err(Error::ParamOutOfRange { name, value: x }.into())
    }
}

fn seed_param(x: f64) -> HoloResult<u64> {
    if x >= 0.0 && x.fract() == 0.0 && x < 9.0e15 {
        Ok(x as u64)
    } else {
        Err(Error::ParamOutOfRange { name: "seed", value: x }.into())
    }
}

/// Analytic paths:
///
/// * `constant [dim, k, seed]`: a fixed random channel.
/// * `isometry [dim, k, speed, seed]`: Kraus blocks of `exp(sM)V0`.
/// * `spin-rotation [phi]` or `[phi, nx, ny, nz]`: `exp(−isφ n̂·σ/2)`.
pub fn named_path(name: &str, params: &[f64]) -> HoloResult<Box<dyn ChannelPath>> {
    match name {
        "constant" => {
            count("constant", params, &[3])?;
            let (d, k) = (positive_int("dim", params[0])?, positive_int("k", params[1])?);
            let rep = random_channel(d, k, seed_param(params[2])?)?;
            let ops = rep.into_ops();
            let zeros: Vec<_> = ops.iter().map(|o| o.map(|_| holo_core::C64::new(0.0, 0.0))).collect();
            Ok(Box::new(FnPath::with_derivative(d, k, move |_| Ok(ops.clone()), move |_| Ok(zeros.clone()))))
        }
        "isometry" => {
            count("isometry", params, &[4])?;
            let (d, k) = (positive_int("dim", params[0])?, positive_int("k", params[1])?);
            if k > d * d {
                return Err(Error::BadArity { dim: d, k }.into());
            }
            let mut rng = seeded(seed_param(params[3])?);
            Ok(Box::new(IsometryPath::random(d, k, params[2], &mut rng)))
        }
        "spin-rotation" => {
            count("spin-rotation", params, &[1, 4])?;
            let axis = if params.len() == 4 { [params[1], params[2], params[3]] } else { [0.0, 0.0, 1.0] };
            Ok(Box::new(spin_rotation_path(params[0], axis)?))
        }
        other => Err(HoloError::Core(Error::UnknownName(other.to_string()))),
    }
}

/// Frame families:
///
/// * `rotating-plane [omega, beta]`
/// * `bloch-circle [theta]`
/// * `geodesic-triangle [ax, ay, az, bx, by, bz, cx, cy, cz]`
pub fn named_family(name: &str, params: &[f64]) -> HoloResult<NamedFamily> {
    match name {
        "rotating-plane" => {
            count("rotating-plane", params, &[2])?;
            Ok(NamedFamily::Rotating(RotatingPlane { omega: params[0], beta: params[1] }))
        }
        "bloch-circle" => {
            count("bloch-circle", params, &[1])?;
            Ok(NamedFamily::Circle(BlochCircle { theta: params[0] }))
        }
        "geodesic-triangle" => {
            count("geodesic-triangle", params, &[9])?;
            let v = |i: usize| [params[3 * i], params[3 * i + 1], params[3 * i + 2]];
            Ok(NamedFamily::Triangle(GeodesicTriangle::new(v(0), v(1), v(2))?))
        }
        other => Err(HoloError::Core(Error::UnknownName(other.to_string()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NamedFamily {
    Rotating(RotatingPlane),
    Circle(BlochCircle),
    Triangle(GeodesicTriangle),
}

impl NamedFamily {
    pub fn as_family(&self) -> &dyn FrameFamily {
        match self {
            NamedFamily::Rotating(f) => f,
            NamedFamily::Circle(f) => f,
            NamedFamily::Triangle(f) => f,
        }
    }

    /// Phases `arg Tr U_g(C_k)` predicted for the closed path.
    pub fn expected_phases(&self) -> Vec<f64> {
        match self {
            // Real frames carry no connection; the loop returns each line
            // rotated by ω, so the traces are cos ω.
            NamedFamily::Rotating(f) => {
                let c = f.omega.cos();
                let ph = if c >= 0.0 { 0.0 } else { std::f64::consts::PI };
                vec![ph, ph]
            }
            NamedFamily::Circle(f) => {
                let omega = f.solid_angle();
                vec![-omega / 2.0, omega / 2.0]
            }
            NamedFamily::Triangle(f) => {
                let [a, b, c] = f.vertices;
                let omega = triangle_solid_angle(a, b, c);
                vec![-omega / 2.0, omega / 2.0]
            }
        }
    }
}

/// Signed solid angle of the geodesic triangle on unit vectors `a, b, c`.
pub fn triangle_solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let cross = [b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2], b[0] * c[1] - b[1] * c[0]];
    2.0 * f64::atan2(dot(a, cross), 1.0 + dot(a, b) + dot(b, c) + dot(c, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_build() {
        for (name, params) in [("constant", vec![2.0, 2.0, 1.0]), ("isometry", vec![2.0, 2.0, 1.0, 3.0]), ("spin-rotation", vec![6.0])] {
            let p = named_path(name, &params).unwrap();
            assert_eq!(p.dim(), 2);
            assert!(p.kraus_at(0.3).unwrap().completeness_defect() < 1e-10);
        }
        assert!(named_path("spin-rotation", &[1.0, 0.0, 1.0, 0.0]).is_ok());
        assert!(named_path("nope", &[]).is_err());
        assert!(named_path("constant", &[2.0]).is_err());
        assert!(named_path("isometry", &[2.0, 5.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn families_build() {
        for (name, params) in [
            ("rotating-plane", vec![1.0, 0.0]),
            ("bloch-circle", vec![1.0]),
            ("geodesic-triangle", vec![1.0, 0.0, 0.3, 0.0, 1.0, 0.2, 0.1, 0.2, 1.0]),
        ] {
            let f = named_family(name, &params).unwrap();
            assert_eq!(f.as_family().dim(), 2);
            assert_eq!(f.expected_phases().len(), 2);
        }
        assert!(named_family("bloch-circle", &[]).is_err());
    }

    #[test]
    fn octant_solid_angle() {
        let omega = triangle_solid_angle([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert!((omega - std::f64::consts::PI / 2.0).abs() < 1e-14);
    }
}
