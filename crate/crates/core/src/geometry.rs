//! Spatial model of the vehicular network.
//!
//! A realization lives in a disk of radius `r` centred on the transmitter
//! (Alice). Pedestrian and infrastructure devices are planar Poisson point
//! processes over the disk. Streets are a Poisson line process restricted to
//! the disk: each street is a chord whose midpoint sits at a uniform radius
//! `p ∈ [0, r)` and uniform angle `θ ∈ [0, 2π)`, the chord being perpendicular
//! to the radius through that midpoint. Vehicles are a Cox process: a 1-D
//! Poisson process of intensity `u` on every street.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};

/// A position in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A street: the chord of the disk perpendicular to the radius at angle
/// `angle`, crossing it at distance `midpoint_radius` from the centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub midpoint_radius: f64,
    pub angle: f64,
    pub endpoint_a: Point2D,
    pub endpoint_b: Point2D,
    pub length: f64,
}

impl Chord {
    pub fn midpoint(&self) -> Point2D {
        Point2D::new(
            self.midpoint_radius * self.angle.cos(),
            self.midpoint_radius * self.angle.sin(),
        )
    }

    /// Point at fraction `t ∈ [0, 1]` of the way from `endpoint_a` to `endpoint_b`.
    pub fn point_at(&self, t: f64) -> Point2D {
        Point2D::new(
            self.endpoint_a.x + t * (self.endpoint_b.x - self.endpoint_a.x),
            self.endpoint_a.y + t * (self.endpoint_b.y - self.endpoint_a.y),
        )
    }

    /// Perpendicular distance from `point` to the line carrying the chord.
    pub fn distance_to_line(&self, point: &Point2D) -> f64 {
        (point.x * self.angle.cos() + point.y * self.angle.sin() - self.midpoint_radius).abs()
    }
}

/// One sampled topology.
///
/// Vehicular nodes keep the index of the street that generated them in the
/// parallel `*_street` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub radius: f64,
    pub streets: Vec<Chord>,
    pub planar_eves: Vec<Point2D>,
    pub planar_charlies: Vec<Point2D>,
    pub vehicular_eves: Vec<Point2D>,
    pub vehicular_eve_streets: Vec<usize>,
    pub vehicular_charlies: Vec<Point2D>,
    pub vehicular_charlie_streets: Vec<usize>,
    pub alice: Point2D,
}

impl NetworkRealization {
    pub fn eve_count(&self) -> usize {
        self.planar_eves.len() + self.vehicular_eves.len()
    }

    pub fn charlie_count(&self) -> usize {
        self.planar_charlies.len() + self.vehicular_charlies.len()
    }

    /// All Eves, planar first.
    pub fn eves(&self) -> impl Iterator<Item = &Point2D> + '_ {
        self.planar_eves.iter().chain(&self.vehicular_eves)
    }

    /// All Charlies, planar first.
    pub fn charlies(&self) -> impl Iterator<Item = &Point2D> + '_ {
        self.planar_charlies.iter().chain(&self.vehicular_charlies)
    }

    pub fn total_street_length(&self) -> f64 {
        self.streets.iter().map(|c| c.length).sum()
    }
}

/// Draws a Poisson count with the given mean. A zero mean yields zero.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::domain(format!("poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::domain(format!("poisson mean {mean}: {e}")))?;
    let n: f64 = dist.sample(rng);
    Ok(n as usize)
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::domain(format!("{name} must be finite and >= 0, got {value}")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("disk radius must be finite and > 0, got {r}")));
    }
    Ok(())
}

/// Builds the chord whose midpoint is at polar coordinates `(p, theta)`.
pub fn chord_endpoints(p: f64, theta: f64, r: f64) -> Result<Chord> {
    check_radius(r)?;
    if !(0.0..r).contains(&p) {
        return Err(Error::domain(format!("chord midpoint radius {p} outside [0, {r})")));
    }
    if !(0.0..TAU).contains(&theta) {
        return Err(Error::domain(format!("chord angle {theta} outside [0, 2π)")));
    }
    let (sin, cos) = theta.sin_cos();
    let half = (r * r - p * p).sqrt();
    let (mx, my) = (p * cos, p * sin);
    Ok(Chord {
        midpoint_radius: p,
        angle: theta,
        endpoint_a: Point2D::new(mx + half * sin, my - half * cos),
        endpoint_b: Point2D::new(mx - half * sin, my + half * cos),
        length: 2.0 * half,
    })
}

/// Uniform point in the disk of radius `r` by radius inversion.
fn uniform_in_disk<R: Rng + ?Sized>(r: f64, rng: &mut R) -> Point2D {
    let rho = r * rng.random::<f64>().sqrt();
    let phi = TAU * rng.random::<f64>();
    Point2D::new(rho * phi.cos(), rho * phi.sin())
}

/// Homogeneous PPP of `intensity` points per m² on the disk of radius `r`.
pub fn sample_planar_ppp<R: Rng + ?Sized>(intensity: f64, r: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    check_rate("planar intensity", intensity)?;
    check_radius(r)?;
    let n = poisson_count(intensity * PI * r * r, rng)?;
    Ok((0..n).map(|_| uniform_in_disk(r, rng)).collect())
}

/// Poisson line process of `lambda_l` per meter restricted to the disk.
///
/// The line density is `lambda_l / π`, so the number of chords is Poisson
/// with mean `2 · lambda_l · r`.
pub fn sample_plp_streets<R: Rng + ?Sized>(lambda_l: f64, r: f64, rng: &mut R) -> Result<Vec<Chord>> {
    check_rate("street intensity", lambda_l)?;
    check_radius(r)?;
    let line_density = lambda_l / PI;
    let n = poisson_count(line_density * TAU * r, rng)?;
    let mut streets = Vec::with_capacity(n);
    for _ in 0..n {
        let p = r * rng.random::<f64>();
        let theta = TAU * rng.random::<f64>();
        streets.push(chord_endpoints(p, theta, r)?);
    }
    Ok(streets)
}

/// 1-D PPP of intensity `u` on each street, kept per street.
pub fn sample_vehicles_per_street<R: Rng + ?Sized>(
    streets: &[Chord],
    u: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Point2D>>> {
    check_rate("vehicle intensity", u)?;
    streets
        .iter()
        .map(|street| {
            let n = poisson_count(u * street.length, rng)?;
            Ok((0..n).map(|_| street.point_at(rng.random::<f64>())).collect())
        })
        .collect()
}

/// Cox process of vehicles on `streets`, concatenated over all streets.
pub fn sample_vehicular_cox<R: Rng + ?Sized>(streets: &[Chord], u: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    Ok(sample_vehicles_per_street(streets, u, rng)?.into_iter().flatten().collect())
}

fn flatten_indexed(per_street: Vec<Vec<Point2D>>) -> (Vec<Point2D>, Vec<usize>) {
    per_street
        .into_iter()
        .enumerate()
        .flat_map(|(i, pts)| pts.into_iter().map(move |p| (p, i)))
        .unzip()
}

/// Draws one joint topology.
///
/// Draw order is fixed (streets, vehicular Eves, vehicular Charlies, planar
/// Eves, planar Charlies) so a seed pins the whole realization. Both
/// vehicular processes condition on the same street set.
pub fn generate_network<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<NetworkRealization> {
    let r = config.radius_m;
    let streets = sample_plp_streets(config.lambda_l_per_m, r, rng)?;
    let (vehicular_eves, vehicular_eve_streets) =
        flatten_indexed(sample_vehicles_per_street(&streets, config.u_e_per_m, rng)?);
    let (vehicular_charlies, vehicular_charlie_streets) =
        flatten_indexed(sample_vehicles_per_street(&streets, config.u_c_per_m, rng)?);
    let planar_eves = sample_planar_ppp(config.lambda_e_per_m2, r, rng)?;
    let planar_charlies = sample_planar_ppp(config.lambda_c_per_m2, r, rng)?;
    Ok(NetworkRealization {
        radius: r,
        streets,
        planar_eves,
        planar_charlies,
        vehicular_eves,
        vehicular_eve_streets,
        vehicular_charlies,
        vehicular_charlie_streets,
        alice: Point2D::ORIGIN,
    })
}

/// Distance floor applied to every link distance entering a path-loss term.
pub fn clamp_distance(d: f64, exclusion: f64) -> f64 {
    d.max(exclusion)
}
